//! Dormand–Prince 5(4) integration of a scalar autonomous equation `y' = f(y)`.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpOptions {
    /// Relative local error tolerance.
    pub rtol: f64,
    /// Absolute local error tolerance.
    pub atol: f64,
    /// Smallest admissible step size.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions {
            rtol: 1e-10,
            atol: 1e-300,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size collapsed to {h:e} at t={t}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget exhausted at t={t}")]
    MaxSteps { t: f64 },
    #[error("non-finite state at t={t}")]
    NonFinite { t: f64 },
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates from `(t0, y0)` through each entry of `targets`, which must be
/// ordered in the direction of integration, and returns the state at each.
pub fn integrate_through<F: Fn(f64) -> f64>(
    f: F,
    t0: f64,
    y0: f64,
    targets: &[f64],
    opts: &DpOptions,
) -> Result<Vec<f64>, OdeError> {
    let mut out = Vec::with_capacity(targets.len());
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(y);
    let mut h: f64 = 1e-2;
    let mut steps = 0usize;
    for &target in targets {
        let dir = if target >= t { 1.0 } else { -1.0 };
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(OdeError::MaxSteps { t });
            }
            let remaining = (target - t).abs();
            let mut step = h.min(remaining);
            let last = step >= remaining;
            if step < opts.h_min && !last {
                return Err(OdeError::StepUnderflow { t, h: step });
            }
            step *= dir;
            let mut k = [0.0f64; 7];
            k[0] = k0;
            for i in 1..7 {
                let yi = y + step * (0..i).map(|j| A[i][j] * k[j]).sum::<f64>();
                k[i] = f(yi);
            }
            let y_new = y + step * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
            let err_abs = (step * (0..7).map(|j| E[j] * k[j]).sum::<f64>()).abs();
            if !y_new.is_finite() || !err_abs.is_finite() {
                h = step.abs() * 0.1;
                if h < opts.h_min {
                    return Err(OdeError::NonFinite { t });
                }
                continue;
            }
            let scale = opts.atol + opts.rtol * y.abs().max(y_new.abs());
            let err = err_abs / scale;
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_new;
                k0 = k[6];
                let fac: f64 = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    h = step.abs() * fac;
                }
            } else {
                h = step.abs() * (0.9 * err.powf(-0.2_f64)).clamp(0.1, 0.9);
                if h < opts.h_min {
                    return Err(OdeError::StepUnderflow { t, h });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}
