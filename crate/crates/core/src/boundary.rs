//! Behaviour of a solution at `s -> 0` and `s -> ∞`: the endpoint taxonomy,
//! cone angles, gluing integers, geodesic distances, and the space obtained
//! by completing the metric.

use crate::profile::{fmt_sig, ProfilePoint};
use crate::quadrature::{integrate, QuadError};
use crate::solver::ProfileSolution;
use std::fmt;
use thiserror::Error;

/// Default tolerance for recognising an integer cone parameter.
pub const GLUE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("the solution comes no closer than {reached:e} to the {end} endpoint")]
    InsufficientDecay { end: End, reached: f64 },
    #[error("inconsistent endpoint pair: {0}")]
    Inconsistent(String),
    #[error("distance quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Origin,
    Infinity,
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            End::Origin => "Origin",
            End::Infinity => "Infinity",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointKind {
    SmoothPoint,
    DivisorAdded,
    CompleteEnd,
}

/// Leading-order law of the approach of `g` to an endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AsymptoticLaw {
    /// `|g - root| ≈ c s^{±theta}`.
    PowerLaw { theta: f64, c: f64 },
    /// `|g - root|^{k-1} ≈ c / |log s + shift|` at a root of multiplicity `k`.
    LogLaw { c: f64, shift: f64, multiplicity: usize },
    /// `g ≈ a s^{exponent}` as `s -> ∞`, with `exponent` fitted.
    LinearGrowth { a: f64, exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticFit {
    pub law: AsymptoticLaw,
    /// Root mean square residual of the fit in its linearised variables.
    pub fit_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointBehavior {
    pub end: End,
    pub kind: EndpointKind,
    /// Cone parameter `|F'|` at the endpoint, for smooth points and divisors.
    pub theta: Option<f64>,
    pub glue_k: Option<u32>,
    pub asymptotic: AsymptoticFit,
}

/// `Some(k)` when `theta` lies within `tol` of a positive integer `k`.
pub fn gluing_order(theta: f64, tol: f64) -> Option<u32> {
    let k = theta.round();
    if k >= 1.0 && (theta - k).abs() <= tol && k < u32::MAX as f64 {
        Some(k as u32)
    } else {
        None
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

const T_LIMIT: f64 = 1e15;
const FIT_POINTS: usize = 21;

fn endpoint_distance(sol: &ProfileSolution, end: End, t: f64) -> f64 {
    let p = sol.solve_at_log(t);
    match end {
        End::Origin => p.d_lo,
        End::Infinity => p.d_hi,
    }
}

/// `log s` at which the distance to the endpoint first drops to `target`.
fn log_s_at_distance(sol: &ProfileSolution, end: End, target: f64, floor: f64) -> Result<f64, BoundaryError> {
    let dir = if end == End::Origin { -1.0 } else { 1.0 };
    let t0 = sol.anchor.s.ln();
    let mut near = t0;
    let mut step = 1.0;
    let mut far;
    loop {
        far = t0 + dir * step;
        let d = endpoint_distance(sol, end, far);
        if d <= target {
            break;
        }
        near = far;
        if step >= T_LIMIT {
            if d > floor {
                return Err(BoundaryError::InsufficientDecay { end, reached: d });
            }
            return Ok(far);
        }
        step *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (near + far);
        if mid == near || mid == far {
            break;
        }
        if endpoint_distance(sol, end, mid) > target {
            near = mid;
        } else {
            far = mid;
        }
    }
    Ok(far)
}

fn endpoint_scale(sol: &ProfileSolution) -> f64 {
    let w = sol.window();
    if w.is_bounded() {
        w.b - w.a
    } else {
        w.a.max(1.0)
    }
}

/// Fits the leading asymptotic law at `end` over two decades of the
/// distance to the endpoint.
///
/// Simple roots give a power law fitted as `log|g - root|` against `log s`;
/// roots of multiplicity `k >= 2` give `|g - root|^{1-k}` linear in `log s`;
/// an infinite endpoint gives `log g` linear in `log s`.
pub fn fit_asymptotics(sol: &ProfileSolution, end: End) -> Result<AsymptoticFit, BoundaryError> {
    let w = sol.window();
    if end == End::Infinity && !w.is_bounded() {
        let ts: Vec<f64> = (0..FIT_POINTS)
            .map(|i| (1e6f64).ln() + (100f64).ln() * i as f64 / (FIT_POINTS - 1) as f64)
            .collect();
        let ys: Vec<f64> = ts.iter().map(|&t| sol.solve_at_log(t).g.ln()).collect();
        let (slope, intercept, rms) = least_squares(&ts, &ys);
        return Ok(AsymptoticFit {
            law: AsymptoticLaw::LinearGrowth {
                a: intercept.exp(),
                exponent: slope,
            },
            fit_residual: rms,
        });
    }
    let k = match end {
        End::Origin => w.a_multiplicity,
        End::Infinity => w.b_multiplicity,
    };
    let scale = endpoint_scale(sol);
    let (start, stop) = if k == 1 { (1e-6, 1e-8) } else { (1e-3, 1e-5) };
    let t1 = log_s_at_distance(sol, end, start * scale, 1e-4 * scale)?;
    let t2 = log_s_at_distance(sol, end, stop * scale, 1e-4 * scale)?;
    let ts: Vec<f64> = (0..FIT_POINTS)
        .map(|i| t1 + (t2 - t1) * i as f64 / (FIT_POINTS - 1) as f64)
        .collect();
    let ds: Vec<f64> = ts.iter().map(|&t| endpoint_distance(sol, end, t)).collect();
    if k == 1 {
        let ys: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
        let (slope, intercept, rms) = least_squares(&ts, &ys);
        Ok(AsymptoticFit {
            law: AsymptoticLaw::PowerLaw {
                theta: slope.abs(),
                c: intercept.exp(),
            },
            fit_residual: rms,
        })
    } else {
        let ys: Vec<f64> = ds.iter().map(|d| d.powi(1 - k as i32)).collect();
        let (slope, intercept, rms) = least_squares(&ts, &ys);
        let ymax = ys.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        Ok(AsymptoticFit {
            law: AsymptoticLaw::LogLaw {
                c: 1.0 / slope.abs(),
                shift: intercept / slope,
                multiplicity: k,
            },
            fit_residual: rms / ymax,
        })
    }
}

/// Classifies one end of the solution and fits its asymptotic law.
pub fn endpoint_behavior(
    sol: &ProfileSolution,
    end: End,
    glue_tol: f64,
) -> Result<EndpointBehavior, BoundaryError> {
    let w = sol.window();
    let model = &sol.model;
    let asymptotic = fit_asymptotics(sol, end)?;
    let (kind, theta) = match end {
        End::Origin if w.a == 0.0 => (EndpointKind::SmoothPoint, Some(1.0)),
        End::Origin if w.a_multiplicity == 1 => (
            EndpointKind::DivisorAdded,
            Some(model.df(w.a).unwrap_or(f64::NAN)),
        ),
        End::Origin => (EndpointKind::CompleteEnd, None),
        End::Infinity if !w.is_bounded() => (EndpointKind::CompleteEnd, None),
        End::Infinity if w.b_multiplicity == 1 => (
            EndpointKind::DivisorAdded,
            Some(-model.df(w.b).unwrap_or(f64::NAN)),
        ),
        End::Infinity => (EndpointKind::CompleteEnd, None),
    };
    Ok(EndpointBehavior {
        end,
        kind,
        theta,
        glue_k: theta.and_then(|t| gluing_order(t, glue_tol)),
        asymptotic,
    })
}

/// Geodesic distance along the radial direction, `½ ∫ dg / √F(g)`.
///
/// `s1 = 0` and `s2 = ∞` denote the window endpoints. Ends at a multiple
/// root or at an infinite `B` lie at infinite distance, so the result is
/// `f64::INFINITY` when such an end is included.
pub fn geodesic_distance(sol: &ProfileSolution, s1: f64, s2: f64) -> Result<f64, BoundaryError> {
    assert!(s1 < s2, "geodesic_distance needs s1 < s2");
    let w = sol.window();
    let model = &sol.model;
    let p1 = sol.solve_point(s1);
    let p2 = sol.solve_point(s2);
    if (s1 == 0.0 && w.a_multiplicity > 1) || (s2 == f64::INFINITY && (!w.is_bounded() || w.b_multiplicity > 1)) {
        return Ok(f64::INFINITY);
    }
    let gm = w.midpoint().clamp(p1.g, p2.g);
    let tol = 1e-13;
    let mut total = 0.0;
    // Lower piece in terms of the distance to A.
    let d_lo_end = gm - w.a;
    if p1.d_lo < d_lo_end {
        total += if w.a_multiplicity == 1 {
            // g = A + v^2, so ½ dg/√F = v dv / √F.
            integrate(
                |v| {
                    let f = model.f_at(&ProfilePoint::from_lower(&w, v * v));
                    v / f.sqrt()
                },
                p1.d_lo.sqrt(),
                d_lo_end.sqrt(),
                tol,
                tol,
            )?
            .value
        } else {
            integrate(
                |x| {
                    let d = x.exp();
                    0.5 * d / model.f_at(&ProfilePoint::from_lower(&w, d)).sqrt()
                },
                p1.d_lo.ln(),
                d_lo_end.ln(),
                tol,
                tol,
            )?
            .value
        };
    }
    if p2.g > gm {
        total += if !w.is_bounded() {
            integrate(
                |x| {
                    let g = x.exp();
                    0.5 * g / model.f_at(&ProfilePoint::from_g(&w, g)).sqrt()
                },
                gm.ln(),
                p2.g.ln(),
                tol,
                tol,
            )?
            .value
        } else if w.b_multiplicity == 1 {
            integrate(
                |v| {
                    let f = model.f_at(&ProfilePoint::from_upper(&w, v * v));
                    v / f.sqrt()
                },
                p2.d_hi.sqrt(),
                (w.b - gm).sqrt(),
                tol,
                tol,
            )?
            .value
        } else {
            integrate(
                |x| {
                    let d = x.exp();
                    0.5 * d / model.f_at(&ProfilePoint::from_upper(&w, d)).sqrt()
                },
                p2.d_hi.ln(),
                (w.b - gm).ln(),
                tol,
                tol,
            )?
            .value
        };
    }
    Ok(total)
}

/// The same distance as an integral over `t = log s` of `½ √F(g(e^t))`.
///
/// Used to corroborate [`geodesic_distance`] on finite ranges.
pub fn distance_by_log_s(sol: &ProfileSolution, t1: f64, t2: f64) -> Result<f64, BoundaryError> {
    Ok(integrate(
        |t| 0.5 * sol.model.f_at(&sol.solve_at_log(t)).sqrt(),
        t1,
        t2,
        1e-12,
        1e-12,
    )?
    .value)
}

/// The space obtained by completing the metric at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceLabel {
    Cn,
    CPn,
    WeightedCPn(u32),
    NegBundle(u32),
    PosBundle(u32),
    Hirzebruch(u32),
    PuncturedQuotient(u32),
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceLabel::Cn => write!(f, "Cn"),
            SpaceLabel::CPn => write!(f, "CPn"),
            SpaceLabel::WeightedCPn(k) => write!(f, "WeightedCPn({k})"),
            SpaceLabel::NegBundle(k) => write!(f, "NegBundle({k})"),
            SpaceLabel::PosBundle(k) => write!(f, "PosBundle({k})"),
            SpaceLabel::Hirzebruch(k) => write!(f, "Hirzebruch({k})"),
            SpaceLabel::PuncturedQuotient(k) => write!(f, "PuncturedQuotient({k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceId {
    pub label: SpaceLabel,
    /// Ends carrying a cone singularity, with the cone parameter `θ/k`.
    pub cone_data: Vec<(End, f64)>,
}

impl fmt::Display for SpaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        for (end, c) in &self.cone_data {
            write!(f, " cone {end} {}", fmt_sig(*c, 12))?;
        }
        Ok(())
    }
}

/// Pairs the two endpoint behaviours into a completed space.
///
/// A divisor end whose `θ` differs from the chosen `k` carries the cone
/// parameter `θ/k`. Orbifold points are produced only when `k_choice`
/// matches the gluing integer at infinity.
pub fn identify_space(
    origin: &EndpointBehavior,
    infinity: &EndpointBehavior,
    k_choice: Option<u32>,
) -> Result<SpaceId, BoundaryError> {
    use EndpointKind::*;
    if infinity.kind == SmoothPoint {
        return Err(BoundaryError::Inconsistent(
            "a smooth point can only be added at the origin, since g is strictly increasing".into(),
        ));
    }
    let cone = |b: &EndpointBehavior, k: u32| -> Option<(End, f64)> {
        let t = b.theta?;
        let ratio = t / k as f64;
        ((ratio - 1.0).abs() > GLUE_TOL).then_some((b.end, ratio))
    };
    let (label, cones) = match (origin.kind, infinity.kind) {
        (SmoothPoint, CompleteEnd) => (SpaceLabel::Cn, vec![]),
        (SmoothPoint, DivisorAdded) => match (infinity.glue_k, k_choice) {
            (Some(1), _) => (SpaceLabel::CPn, vec![]),
            (Some(g), Some(k)) if g == k => (SpaceLabel::WeightedCPn(k), vec![]),
            _ => (SpaceLabel::CPn, cone(infinity, 1).into_iter().collect()),
        },
        (DivisorAdded, CompleteEnd) => {
            let k = origin.glue_k.or(k_choice).unwrap_or(1);
            (SpaceLabel::NegBundle(k), cone(origin, k).into_iter().collect())
        }
        (CompleteEnd, DivisorAdded) => {
            let k = infinity.glue_k.or(k_choice).unwrap_or(1);
            (SpaceLabel::PosBundle(k), cone(infinity, k).into_iter().collect())
        }
        (DivisorAdded, DivisorAdded) => {
            let k = match (origin.glue_k, infinity.glue_k) {
                (Some(a), Some(b)) if a == b => a,
                _ => k_choice.or(origin.glue_k).unwrap_or(1),
            };
            (
                SpaceLabel::Hirzebruch(k),
                cone(origin, k).into_iter().chain(cone(infinity, k)).collect(),
            )
        }
        (CompleteEnd, CompleteEnd) => (SpaceLabel::PuncturedQuotient(k_choice.unwrap_or(1)), vec![]),
        (CompleteEnd | DivisorAdded, SmoothPoint) | (_, SmoothPoint) => unreachable!(),
    };
    Ok(SpaceId {
        label,
        cone_data: cones,
    })
}

/// Both endpoint behaviours, the distances to them and the completed space.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryReport {
    pub origin: EndpointBehavior,
    pub infinity: EndpointBehavior,
    /// Distance from the origin end to the anchor.
    pub distance_origin: f64,
    /// Distance from the anchor to the end at infinity.
    pub distance_infinity: f64,
    pub space: SpaceId,
}

impl BoundaryReport {
    /// One-line summary, e.g.
    /// `Origin: divisor θ=2 glue k=2; Infinity: complete; Space: NegBundle(2)`.
    pub fn summary(&self) -> String {
        format!(
            "Origin: {}; Infinity: {}; Space: {}",
            describe(&self.origin),
            describe(&self.infinity),
            self.space
        )
    }
}

fn describe(b: &EndpointBehavior) -> String {
    match b.kind {
        EndpointKind::SmoothPoint => "smooth point".into(),
        EndpointKind::CompleteEnd => "complete".into(),
        EndpointKind::DivisorAdded => {
            let t = fmt_sig(b.theta.unwrap_or(f64::NAN), 12);
            match b.glue_k {
                Some(k) => format!("divisor θ={t} glue k={k}"),
                None => format!("divisor θ={t} cone"),
            }
        }
    }
}

/// Runs the full boundary analysis.
pub fn boundary_report(
    sol: &ProfileSolution,
    k_choice: Option<u32>,
    glue_tol: f64,
) -> Result<BoundaryReport, BoundaryError> {
    let origin = endpoint_behavior(sol, End::Origin, glue_tol)?;
    let infinity = endpoint_behavior(sol, End::Infinity, glue_tol)?;
    let space = identify_space(&origin, &infinity, k_choice)?;
    Ok(BoundaryReport {
        origin,
        infinity,
        distance_origin: geodesic_distance(sol, 0.0, sol.anchor.s)?,
        distance_infinity: geodesic_distance(sol, sol.anchor.s, f64::INFINITY)?,
        space,
    })
}
