//! Curvature along a solved profile.
//!
//! Every derivative of `g` and `u` is obtained by chaining the ODE
//! `s g' = F(g)`, never by numerical differentiation.

use crate::jet::Jet;
use crate::poly::Poly;
use crate::profile::ProfilePolynomial;
use crate::solver::ProfileSolution;

/// Klembeck's three nonzero curvature components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Klembeck {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Curvature quantities at one value of `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometrySample {
    pub s: f64,
    pub g: f64,
    pub g_prime: f64,
    pub u_prime: f64,
    /// Metric eigenvalue `u'` along the base directions, multiplicity `n-1`.
    pub eig_base: f64,
    /// Metric eigenvalue `g' = u' + s u''` along the fiber direction.
    pub eig_fiber: f64,
    pub r_affine: f64,
    pub r_direct: f64,
    pub v_prime: f64,
    pub v_second: f64,
    pub xi: f64,
    pub klembeck: Klembeck,
}

impl GeometrySample {
    pub fn positive(&self) -> bool {
        self.eig_base > 0.0 && self.eig_fiber > 0.0
    }

    /// `|R_affine - R_direct| / (1 + |R_affine|)`.
    pub fn scalar_curvature_discrepancy(&self) -> f64 {
        (self.r_affine - self.r_direct).abs() / (1.0 + self.r_affine.abs())
    }
}

/// Evaluates every curvature quantity at `s`.
pub fn curvature_sample(sol: &ProfileSolution, s: f64) -> GeometrySample {
    let model = &sol.model;
    let n = model.n.get() as f64;
    let p = sol.solve_point(s);
    let g = p.g;
    let f = model.f_at(&p);
    let prof = &model.profile;
    let df = prof.eval_derivative(g).unwrap_or(f64::NAN);
    let d2f = prof.eval_second_derivative(g).unwrap_or(f64::NAN);

    let s2 = s * s;
    let s3 = s2 * s;
    let g1 = f / s;
    let g2 = (df * f - f) / s2;
    let g3 = (f * (d2f * f + df * df - df) - 2.0 * (df * f - f)) / s3;
    let u1 = g / s;
    let u2 = (f - g) / s2;
    let u3 = g2 / s - 2.0 * (f - g) / s3;

    let v1 = -(n - 1.0) * u2 / u1 - g2 / g1;
    let v2 = -(n - 1.0) * (u3 / u1 - (u2 / u1).powi(2)) - (g3 / g1 - (g2 / g1).powi(2));
    let r_direct = (n - 1.0) * v1 / u1 + (s * v1 + s2 * v2) / (s * u1 + s2 * u2);
    let (slope, intercept) = model.affine_curvature();

    let a = -(1.0 / g1) * ((g2 + s * g3) / g1 - s * g2 * g2 / (g1 * g1));
    let b = u2 / (u1 * u1) - g2 / (u1 * g1);
    let c = -2.0 * u2 / (u1 * u1);

    GeometrySample {
        s,
        g,
        g_prime: g1,
        u_prime: u1,
        eig_base: u1,
        eig_fiber: g1,
        r_affine: slope * g + intercept,
        r_direct,
        v_prime: v1,
        v_second: v2,
        xi: 1.0 - df,
        klembeck: Klembeck { a, b, c },
    }
}

/// `n` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Which positivity condition on `ξ` failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BisectionalCondition {
    /// The metric does not extend smoothly over the origin.
    NotOnCn,
    /// `ξ(0) = 0` fails.
    XiAtOrigin,
    /// `ξ' > 0` fails.
    XiIncreasing,
    /// `ξ < 1` fails.
    XiBelowOne,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionalWitness {
    pub s: f64,
    pub g: f64,
    pub condition: BisectionalCondition,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionalVerdict {
    pub positive: bool,
    pub witness: Option<BisectionalWitness>,
}

/// Number of grid points used by [`bisectional_positive_test`].
pub const BISECTIONAL_GRID: usize = 1000;

/// Grid test of the conditions `ξ(0) = 0`, `ξ' > 0` and `ξ < 1` for
/// positive bisectional curvature, checked in that order over 1000
/// log-spaced points of `[1e-6, 1e6]`.
///
/// Since `ξ = 1 - F'(g)` and `g' > 0`, the sign of `ξ'` is the sign of `-F''(g)`.
pub fn bisectional_positive_test(sol: &ProfileSolution) -> BisectionalVerdict {
    let model = &sol.model;
    let fail = |s: f64, g: f64, condition| BisectionalVerdict {
        positive: false,
        witness: Some(BisectionalWitness { s, g, condition }),
    };
    if model.window.a != 0.0 || model.profile.m() != 0 {
        return fail(0.0, model.window.a, BisectionalCondition::NotOnCn);
    }
    let xi0 = 1.0 - model.df(0.0).unwrap_or(f64::NAN);
    if !(xi0.abs() <= 1e-9) {
        return fail(0.0, 0.0, BisectionalCondition::XiAtOrigin);
    }
    let pts: Vec<(f64, f64)> = log_grid(1e-6, 1e6, BISECTIONAL_GRID)
        .into_iter()
        .map(|s| (s, sol.solve(s)))
        .collect();
    for &(s, g) in &pts {
        let d2f = model.d2f(g).unwrap_or(f64::NAN);
        if !(-d2f > 0.0) {
            return fail(s, g, BisectionalCondition::XiIncreasing);
        }
    }
    for &(s, g) in &pts {
        let xi = 1.0 - model.df(g).unwrap_or(f64::NAN);
        if !(xi < 1.0) {
            return fail(s, g, BisectionalCondition::XiBelowOne);
        }
    }
    BisectionalVerdict {
        positive: true,
        witness: None,
    }
}

/// Scalar curvature as a function of `g`, as a jet in `g`.
///
/// With `W = n - (n-1) F/g - F'`, the curvature of the metric with profile
/// `F` is `R = (n-1) W/g + W'`. The input jet of `F` needs order three to
/// return `R` to first order.
pub fn scalar_curvature_jet(n: usize, g: &Jet, f: &Jet) -> Jet {
    let nf = n as f64;
    let df = f.derivative();
    let w = df
        .scale(-1.0)
        .sub(&f.div(g).scale(nf - 1.0))
        .add_scalar(nf);
    curvature_from_w(n, g, &w)
}

fn curvature_from_w(n: usize, g: &Jet, w: &Jet) -> Jet {
    w.div(g).scale(n as f64 - 1.0).add(&w.derivative())
}

/// Numerator of `W = n - (n-1) F/g - F'` over `g^{m+1}` for `F = H/g^m`:
/// `n g^{m+1} - (n-1-m) H - g H'`, formed coefficientwise so that constant
/// terms cancel exactly.
pub fn w_numerator(n: usize, prof: &ProfilePolynomial) -> Poly {
    let m = prof.m();
    let h = prof.h();
    Poly::monomial(m + 1)
        .scale(n as f64)
        .sub(&h.scale(n as f64 - 1.0 - m as f64))
        .sub(&h.derivative().shift_up(1))
}

/// Scalar curvature jet of a rational profile, built from [`w_numerator`].
pub fn profile_curvature_jet(n: usize, prof: &ProfilePolynomial, g: &Jet) -> Jet {
    let w = g
        .compose_poly(&w_numerator(n, prof))
        .div(&g.powi(prof.m() + 1));
    curvature_from_w(n, g, &w)
}

/// `|dR/dg - slope|` where `R` is the curvature of the profile `f` at `x`.
///
/// Along a solution `R'(s) / (u' + s u'') = dR/dg` because `u' + s u'' = g'`,
/// so this is the extremality residual at that point.
fn residual_over<Rf: Fn(&Jet) -> Jet>(
    slope: f64,
    xs: impl Iterator<Item = f64>,
    curvature: Rf,
) -> f64 {
    xs.map(|x| (curvature(&Jet::variable(x, 3)).coeff(1) - slope).abs())
        .fold(0.0, f64::max)
}

/// Maximum over `grid` of `|R'(s)/(u' + s u'') - (-(n+2)(n+1) c4)|`, with `R`
/// computed from the metric itself rather than from the affine formula.
pub fn extremal_residual(sol: &ProfileSolution, grid: &[f64]) -> f64 {
    let model = &sol.model;
    let (slope, _) = model.affine_curvature();
    let prof: &ProfilePolynomial = &model.profile;
    let n = model.n.get();
    residual_over(slope, grid.iter().map(|&s| sol.solve(s)), |g| {
        profile_curvature_jet(n, prof, g)
    })
}

/// The same residual for the perturbed profile `g̃ = g^p` in place of `g`.
///
/// `g̃` solves `s g̃' = F̃(g̃)` with `F̃(x) = p x^{1 - 1/p} F(x^{1/p})`; the
/// residual is measured against the unperturbed constant.
pub fn extremal_residual_perturbed(sol: &ProfileSolution, grid: &[f64], p: f64) -> f64 {
    let model = &sol.model;
    let (slope, _) = model.affine_curvature();
    let prof = &model.profile;
    let n = model.n.get();
    residual_over(slope, grid.iter().map(|&s| sol.solve(s).powf(p)), |x| {
        let y = x.powf(1.0 / p);
        let f = x.powf(1.0 - 1.0 / p).mul(&prof.jet(&y)).scale(p);
        scalar_curvature_jet(n, x, &f)
    })
}
