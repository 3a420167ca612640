//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.

use thiserror::Error;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite near x={0}")]
    NonFinite(f64),
    #[error("no convergence after {intervals} subintervals (estimate {value}, error {abs_error})")]
    NotConverged {
        value: f64,
        abs_error: f64,
        intervals: usize,
    },
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for (i, &x) in XGK.iter().take(7).enumerate() {
        let f1 = f(c - h * x);
        let f2 = f(c + h * x);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(QuadError::NonFinite(c));
        }
        k += WGK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let value: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                abs_error: err,
                intervals: parts.len(),
            });
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(QuadError::NotConverged {
                value,
                abs_error: err,
                intervals: parts.len(),
            });
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (pa, pb, _, _) = parts.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        if m <= pa.min(pb) || m >= pa.max(pb) {
            return Err(QuadError::NotConverged {
                value,
                abs_error: err,
                intervals: parts.len(),
            });
        }
        let (v1, e1) = gk15(&f, pa, m)?;
        let (v2, e2) = gk15(&f, m, pb)?;
        parts.push((pa, m, v1, e1));
        parts.push((m, pb, v2, e2));
    }
}
