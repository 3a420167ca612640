//! The calibrated solution `g(s)` of `s g'(s) = F(g(s))`.
//!
//! Separating variables gives `h(g) = log s + c` with `h' = g^m / H = 1 / F`.
//! The antiderivative `h` is assembled in closed form from a partial fraction
//! expansion of `1/F` and inverted by a safeguarded Newton iteration in the
//! logarithm of the distance to the nearer window endpoint.

use crate::jet::Jet;
use crate::ode::{integrate_through, DpOptions, OdeError};
use crate::profile::{AdmissibleWindow, ProfileModel, ProfilePoint};
use crate::quadrature::{integrate, QuadError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("anchor g={g} lies outside the window {window}")]
    OutOfWindow { g: f64, window: AdmissibleWindow },
    #[error("anchor s={0} must be positive and finite")]
    BadAnchor(f64),
    #[error("repeated complex root pairs are not supported")]
    RepeatedComplexPair,
    #[error("ODE oracle failed: {0}")]
    Ode(#[from] OdeError),
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

/// One closed-form summand of `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Term {
    /// `coeff * ln(sign_inside * (g - root))`.
    LogLinear { coeff: f64, root: f64, sign_inside: f64 },
    /// `coeff / (g - root)^power`.
    Reciprocal { coeff: f64, root: f64, power: u32 },
    /// `coeff * ln((g - a)^2 + b^2)`.
    LogQuadratic { coeff: f64, a: f64, b: f64 },
    /// `coeff * atan((g - a) / b)`.
    ArcTan { coeff: f64, a: f64, b: f64 },
}

/// `h(g)` as a sum of closed-form terms, valid on the window.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitEquation {
    pub terms: Vec<Term>,
    pub window: AdmissibleWindow,
}

impl ImplicitEquation {
    /// Signed `g - root`, taken from the accurate endpoint distances when
    /// `root` is a window endpoint.
    fn offset(&self, p: &ProfilePoint, root: f64) -> f64 {
        if root == self.window.a {
            p.d_lo
        } else if root == self.window.b {
            -p.d_hi
        } else {
            p.g - root
        }
    }

    /// `h` at a window point.
    pub fn eval_point(&self, p: &ProfilePoint) -> f64 {
        self.terms
            .iter()
            .map(|t| match *t {
                Term::LogLinear {
                    coeff,
                    root,
                    sign_inside,
                } => coeff * (sign_inside * self.offset(p, root)).ln(),
                Term::Reciprocal { coeff, root, power } => {
                    coeff / self.offset(p, root).powi(power as i32)
                }
                Term::LogQuadratic { coeff, a, b } => {
                    let x = p.g - a;
                    coeff * (x * x + b * b).ln()
                }
                Term::ArcTan { coeff, a, b } => coeff * ((p.g - a) / b).atan(),
            })
            .sum()
    }

    /// `h(g)`.
    pub fn eval(&self, g: f64) -> f64 {
        self.eval_point(&ProfilePoint::from_g(&self.window, g))
    }

    /// `dh/dg`, term by term.
    pub fn derivative(&self, g: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| match *t {
                Term::LogLinear { coeff, root, .. } => coeff / (g - root),
                Term::Reciprocal { coeff, root, power } => {
                    -(power as f64) * coeff / (g - root).powi(power as i32 + 1)
                }
                Term::LogQuadratic { coeff, a, b } => {
                    let x = g - a;
                    coeff * 2.0 * x / (x * x + b * b)
                }
                Term::ArcTan { coeff, a, b } => {
                    let x = g - a;
                    coeff * b / (x * x + b * b)
                }
            })
            .sum()
    }
}

/// Partial fraction antiderivative of `g^m / H(g)`.
pub fn implicit_equation(model: &ProfileModel) -> Result<ImplicitEquation, SolverError> {
    let h = model.profile.h();
    let m = model.profile.m();
    let lead = h.lead();
    let w = model.window;
    let roots = &model.roots;
    if roots.complex_pairs.iter().any(|p| p.multiplicity > 1) {
        return Err(SolverError::RepeatedComplexPair);
    }
    let mut terms = Vec::new();
    for (i, r) in roots.roots.iter().enumerate() {
        let k = r.multiplicity;
        let t = Jet::variable(r.value, k - 1);
        let mut den = Jet::constant(lead, k - 1);
        for (j, o) in roots.roots.iter().enumerate() {
            if j != i {
                den = den.mul(&t.add_scalar(-o.value).powi(o.multiplicity));
            }
        }
        for p in &roots.complex_pairs {
            let x = t.add_scalar(-p.a);
            den = den.mul(&x.mul(&x).add_scalar(p.b * p.b));
        }
        let q = t.powi(m).div(&den);
        for j in 1..=k {
            let c = q.coeff(k - j);
            if j == 1 {
                terms.push(Term::LogLinear {
                    coeff: c,
                    root: r.value,
                    sign_inside: if r.value <= w.a { 1.0 } else { -1.0 },
                });
            } else {
                terms.push(Term::Reciprocal {
                    coeff: c / (1.0 - j as f64),
                    root: r.value,
                    power: (j - 1) as u32,
                });
            }
        }
    }
    let dh = h.derivative();
    for p in &roots.complex_pairs {
        let z = Complex64::new(p.a, p.b);
        let residue = z.powi(m as i32) / dh.eval_complex(z);
        terms.push(Term::LogQuadratic {
            coeff: residue.re,
            a: p.a,
            b: p.b,
        });
        terms.push(Term::ArcTan {
            coeff: -2.0 * residue.im,
            a: p.a,
            b: p.b,
        });
    }
    Ok(ImplicitEquation { terms, window: w })
}

/// Reference point `(s, g)` fixing the integration constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Anchor {
    pub s: f64,
    pub g: f64,
}

impl Anchor {
    /// `s = 1` at the window midpoint, or at `A + 1` when unbounded.
    pub fn canonical(w: &AdmissibleWindow) -> Self {
        Anchor {
            s: 1.0,
            g: w.midpoint(),
        }
    }
}

/// Coordinate in which the inversion is carried out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Chart {
    /// `x = ln(g - A)`.
    Lower,
    /// `x = ln(B - g)`.
    Upper,
    /// `x = ln g`, used towards an infinite `B`.
    Direct,
}

/// A model with its implicit equation and integration constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileSolution {
    pub model: ProfileModel,
    pub h: ImplicitEquation,
    pub c: f64,
    pub anchor: Anchor,
    h_mid: f64,
}

/// Fixes `c = h(g★) - log s★`.
pub fn calibrate(
    model: &ProfileModel,
    h: ImplicitEquation,
    anchor: Anchor,
) -> Result<ProfileSolution, SolverError> {
    let w = model.window;
    if !(anchor.s > 0.0 && anchor.s.is_finite()) {
        return Err(SolverError::BadAnchor(anchor.s));
    }
    if !w.contains(anchor.g) {
        return Err(SolverError::OutOfWindow {
            g: anchor.g,
            window: w,
        });
    }
    let c = h.eval(anchor.g) - anchor.s.ln();
    let h_mid = h.eval(w.midpoint());
    Ok(ProfileSolution {
        model: model.clone(),
        h,
        c,
        anchor,
        h_mid,
    })
}

const MAX_ITER: usize = 300;
const X_FLOOR: f64 = -740.0;
const X_CEIL: f64 = 700.0;

impl ProfileSolution {
    /// Builds the implicit equation and calibrates it at `anchor`.
    pub fn new(model: &ProfileModel, anchor: Anchor) -> Result<Self, SolverError> {
        calibrate(model, implicit_equation(model)?, anchor)
    }

    pub fn window(&self) -> AdmissibleWindow {
        self.model.window
    }

    fn point(&self, chart: Chart, x: f64) -> ProfilePoint {
        let w = &self.model.window;
        match chart {
            Chart::Lower => ProfilePoint::from_lower(w, x.exp()),
            Chart::Upper => ProfilePoint::from_upper(w, x.exp()),
            Chart::Direct => ProfilePoint::from_g(w, x.exp()),
        }
    }

    /// `h - target` and its derivative in the chart coordinate.
    fn residual(&self, chart: Chart, x: f64, target: f64) -> (f64, f64, ProfilePoint) {
        let p = self.point(chart, x);
        let v = self.h.eval_point(&p) - target;
        let f = self.model.f_at(&p);
        let dv = match chart {
            Chart::Lower => p.d_lo / f,
            Chart::Upper => -p.d_hi / f,
            Chart::Direct => p.g / f,
        };
        (v, dv, p)
    }

    /// The window point with `h = log s + c`, given `t = log s`.
    pub fn solve_at_log(&self, t: f64) -> ProfilePoint {
        let w = self.model.window;
        let target = t + self.c;
        if t == f64::NEG_INFINITY {
            return ProfilePoint::from_lower(&w, 0.0);
        }
        if t == f64::INFINITY {
            return if w.is_bounded() {
                ProfilePoint::from_upper(&w, 0.0)
            } else {
                ProfilePoint::from_g(&w, f64::INFINITY)
            };
        }
        let mid = w.midpoint();
        let (chart, x_mid) = if target < self.h_mid {
            (Chart::Lower, (mid - w.a).ln())
        } else if w.is_bounded() {
            (Chart::Upper, (w.b - mid).ln())
        } else {
            (Chart::Direct, mid.ln())
        };
        // Orientation: `sign * residual` increases with x.
        let sign = if chart == Chart::Upper { -1.0 } else { 1.0 };
        // The midpoint is one end of the bracket; search outward for the other.
        let mid_on_high_side = (chart == Chart::Lower) || (chart == Chart::Upper);
        let (mut lo, mut hi) = if mid_on_high_side {
            (f64::NAN, x_mid)
        } else {
            (x_mid, f64::NAN)
        };
        let mut step = 1.0;
        loop {
            if mid_on_high_side {
                let x = (x_mid - step).max(X_FLOOR);
                let (v, _, _) = self.residual(chart, x, target);
                if sign * v <= 0.0 || x == X_FLOOR {
                    lo = x;
                    break;
                }
                hi = x;
            } else {
                let x = (x_mid + step).min(X_CEIL);
                let (v, _, _) = self.residual(chart, x, target);
                if v >= 0.0 || x == X_CEIL {
                    hi = x;
                    break;
                }
                lo = x;
            }
            step *= 2.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..MAX_ITER {
            let (v, dv, _) = self.residual(chart, x, target);
            let sv = sign * v;
            if sv == 0.0 {
                break;
            }
            if sv < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - v / dv;
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
            if (next - x).abs() <= tol || hi - lo <= tol {
                x = next;
                break;
            }
            x = next;
        }
        self.point(chart, x)
    }

    /// The window point reached at `s`.
    pub fn solve_point(&self, s: f64) -> ProfilePoint {
        self.solve_at_log(s.ln())
    }

    /// `g(s)`.
    pub fn solve(&self, s: f64) -> f64 {
        self.solve_point(s).g
    }

    /// `F(g(s))`, accurate near the window endpoints.
    pub fn f_at_s(&self, s: f64) -> f64 {
        self.model.f_at(&self.solve_point(s))
    }
}

/// Builds a canonical solution directly from a model.
pub fn solution_with_canonical_anchor(model: &ProfileModel) -> Result<ProfileSolution, SolverError> {
    ProfileSolution::new(model, Anchor::canonical(&model.window))
}

/// ODE oracle: integrates `dφ/dt = F(φ)`, `t = log s`, from the anchor to
/// each target with an embedded Runge-Kutta pair.
///
/// The state is the distance to the endpoint being approached, so relative
/// error control keeps full precision as the solution flattens out.
pub fn ode_oracle_points(
    model: &ProfileModel,
    anchor: Anchor,
    targets: &[f64],
    opts: &DpOptions,
) -> Result<Vec<ProfilePoint>, SolverError> {
    let w = model.window;
    let t0 = anchor.s.ln();
    let mut out = vec![ProfilePoint::from_g(&w, anchor.g); targets.len()];
    let mut below: Vec<(usize, f64)> = Vec::new();
    let mut above: Vec<(usize, f64)> = Vec::new();
    for (i, &s) in targets.iter().enumerate() {
        let t = s.ln();
        if t < t0 {
            below.push((i, t));
        } else {
            above.push((i, t));
        }
    }
    below.sort_by(|a, b| b.1.total_cmp(&a.1));
    above.sort_by(|a, b| a.1.total_cmp(&b.1));

    if !below.is_empty() {
        let ts: Vec<f64> = below.iter().map(|p| p.1).collect();
        let ys = integrate_through(
            |d| model.f_at(&ProfilePoint::from_lower(&w, d)),
            t0,
            anchor.g - w.a,
            &ts,
            opts,
        )?;
        for ((i, _), d) in below.iter().zip(ys) {
            out[*i] = ProfilePoint::from_lower(&w, d);
        }
    }
    if !above.is_empty() {
        let ts: Vec<f64> = above.iter().map(|p| p.1).collect();
        if w.is_bounded() {
            let ys = integrate_through(
                |d| -model.f_at(&ProfilePoint::from_upper(&w, d)),
                t0,
                w.b - anchor.g,
                &ts,
                opts,
            )?;
            for ((i, _), d) in above.iter().zip(ys) {
                out[*i] = ProfilePoint::from_upper(&w, d);
            }
        } else {
            let ys = integrate_through(
                |g| model.f_at(&ProfilePoint::from_g(&w, g)),
                t0,
                anchor.g,
                &ts,
                opts,
            )?;
            for ((i, _), g) in above.iter().zip(ys) {
                out[*i] = ProfilePoint::from_g(&w, g);
            }
        }
    }
    Ok(out)
}

/// `g(s_target)` from the ODE oracle with default tolerances.
pub fn ode_oracle(model: &ProfileModel, anchor: Anchor, s_target: f64) -> Result<f64, SolverError> {
    Ok(ode_oracle_points(model, anchor, &[s_target], &DpOptions::default())?[0].g)
}

/// Potential `u` normalized by `u(s_ref) = 0`, with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialSample {
    pub s: f64,
    pub u: f64,
    pub u_prime: f64,
    pub u_second: f64,
}

/// `u(s) = ∫ g(σ)/σ dσ` from `s_ref`, integrated in `τ = log σ`.
pub fn potential(sol: &ProfileSolution, s: f64, s_ref: f64) -> Result<PotentialSample, SolverError> {
    let r = integrate(|tau| sol.solve_at_log(tau).g, s_ref.ln(), s.ln(), 1e-13, 1e-12)?;
    let p = sol.solve_point(s);
    let f = sol.model.f_at(&p);
    Ok(PotentialSample {
        s,
        u: r.value,
        u_prime: p.g / s,
        u_second: (f - p.g) / (s * s),
    })
}
