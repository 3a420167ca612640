//! Real root isolation with multiplicities.
//!
//! The polynomial is split into square-free factors by repeated gcd with the
//! derivative. Real roots of each factor are isolated with Sturm sequences and
//! refined by sign-change bisection. Whatever remains after deflating the real
//! roots has no real zeros and is reported as conjugate pairs.

use crate::poly::{approx_gcd, Poly};
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold below which a Euclidean remainder counts as zero.
const GCD_REL: f64 = 1e-10;

/// Factor applied to `tol` when merging neighbouring roots into one multiple root.
const MERGE_FACTOR: f64 = 1e3;
/// Iteration cap for the companion-matrix Schur decomposition.
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// The conjugate pair `a ± i b` with `b > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPair {
    pub a: f64,
    pub b: f64,
    pub multiplicity: usize,
}

/// Roots of a real polynomial, real ones sorted ascending.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RootMultiset {
    pub roots: Vec<RealRoot>,
    pub complex_pairs: Vec<ComplexPair>,
}

impl RootMultiset {
    /// Degree accounted for by the listed roots.
    pub fn total_degree(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum::<usize>()
            + 2 * self
                .complex_pairs
                .iter()
                .map(|p| p.multiplicity)
                .sum::<usize>()
    }

    /// Real root values with multiplicity expanded.
    pub fn expanded_real(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }

    /// Number of distinct real roots.
    pub fn distinct_real(&self) -> usize {
        self.roots.len()
    }

    /// Multiplicity pattern of the real roots in ascending order.
    pub fn pattern(&self) -> Vec<usize> {
        self.roots.iter().map(|r| r.multiplicity).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("roots near {near} are closer than tol={tol}; tighten tol or treat as a multiple root")]
    IllConditioned { near: f64, tol: f64 },
    #[error("the zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Isolates all real roots of `p` with multiplicities and reports the
/// remaining conjugate pairs.
pub fn find_real_roots(p: &Poly, tol: f64) -> Result<RootMultiset, RootError> {
    if !(tol > 0.0) {
        return Err(RootError::BadTolerance(tol));
    }
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let mut out = RootMultiset::default();
    if p.degree() == 0 {
        return Ok(out);
    }
    for (mult, q) in square_free_factors(p) {
        if q.degree() == 0 {
            continue;
        }
        let real = isolate_square_free(&q, tol)?;
        let mut rest = q.clone();
        for &r in &real {
            rest = rest.deflate_root(r);
            out.roots.push(RealRoot {
                value: r,
                multiplicity: mult,
            });
        }
        for (a, b) in conjugate_pairs(&rest) {
            out.complex_pairs.push(ComplexPair {
                a,
                b,
                multiplicity: mult,
            });
        }
    }
    out.roots.sort_by(|x, y| x.value.total_cmp(&y.value));
    out.roots = merge_close(&out.roots, MERGE_FACTOR * tol);
    if p.coeff(0) == 0.0 {
        // An exactly vanishing constant term pins a root at the origin.
        if let Some(r) = out
            .roots
            .iter_mut()
            .min_by(|x, y| x.value.abs().total_cmp(&y.value.abs()))
        {
            r.value = 0.0;
        }
    }
    out.complex_pairs
        .sort_by(|x, y| x.a.total_cmp(&y.a).then(x.b.total_cmp(&y.b)));
    Ok(out)
}

/// Square-free decomposition: returns `(multiplicity, factor)` pairs whose
/// product with exponents reproduces `p` up to a constant.
pub fn square_free_factors(p: &Poly) -> Vec<(usize, Poly)> {
    // g[0] = p, g[i] = gcd(g[i-1], g[i-1]').
    let mut g = vec![p.monic()];
    loop {
        let last = g.last().unwrap();
        if last.degree() == 0 {
            break;
        }
        let next = approx_gcd(last, &last.derivative(), GCD_REL);
        g.push(next);
    }
    // h[i] = g[i-1]/g[i] collects the factors of multiplicity at least i.
    let h: Vec<Poly> = g.windows(2).map(|w| w[0].div_rem(&w[1]).0).collect();
    let mut out = Vec::new();
    for i in 0..h.len() {
        let q = if i + 1 < h.len() {
            h[i].div_rem(&h[i + 1]).0
        } else {
            h[i].clone()
        };
        out.push((i + 1, q));
    }
    out
}

fn sturm_sequence(q: &Poly) -> Vec<Poly> {
    let mut seq = vec![q.clone(), q.derivative()];
    let scale = q.norm_inf();
    loop {
        let n = seq.len();
        if seq[n - 1].degree() == 0 {
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.norm_inf() <= 1e-14 * scale.max(seq[n - 1].norm_inf()) {
            break;
        }
        seq.push(r.scale(-1.0));
    }
    seq
}

fn sign_changes(seq: &[Poly], x: f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for p in seq {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Real roots of a square-free polynomial, ascending.
fn isolate_square_free(q: &Poly, tol: f64) -> Result<Vec<f64>, RootError> {
    if q.degree() == 1 {
        return Ok(vec![-q.coeff(0) / q.coeff(1)]);
    }
    let lead = q.lead();
    let bound = 1.0
        + q.coeffs()[..q.degree()]
            .iter()
            .fold(0.0f64, |m, a| m.max((a / lead).abs()));
    let seq = sturm_sequence(q);
    let count = |a: f64, b: f64| sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b));
    let mut stack = vec![(-bound, bound)];
    let mut roots = Vec::new();
    while let Some((a, b)) = stack.pop() {
        let c = count(a, b);
        if c == 0 {
            continue;
        }
        if c == 1 {
            roots.push(refine(q, &seq, a, b));
            continue;
        }
        if b - a < tol {
            return Err(RootError::IllConditioned {
                near: 0.5 * (a + b),
                tol,
            });
        }
        let m = 0.5 * (a + b);
        stack.push((a, m));
        stack.push((m, b));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Refines the single root of `q` in `(a, b]`.
fn refine(q: &Poly, seq: &[Poly], mut a: f64, mut b: f64) -> f64 {
    let fb = q.eval(b);
    if fb == 0.0 {
        return b;
    }
    let mut fa = q.eval(a);
    if fa * fb < 0.0 {
        loop {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = q.eval(m);
            if fm == 0.0 {
                return m;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
    } else {
        // Sign information is unreliable here, fall back on Sturm counts.
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if sign_changes(seq, a).saturating_sub(sign_changes(seq, m)) == 1 {
                b = m;
            } else {
                a = m;
            }
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..3 {
        let (v, d) = q.eval_with_derivative(x);
        if d == 0.0 {
            break;
        }
        let nx = x - v / d;
        if !(nx >= a - (b - a) && nx <= b + (b - a)) || q.eval(nx).abs() >= v.abs() {
            break;
        }
        x = nx;
    }
    x
}

/// Conjugate pairs `(a, b)` of a polynomial assumed to have no real roots.
fn conjugate_pairs(r: &Poly) -> Vec<(f64, f64)> {
    let d = r.degree();
    if d < 2 {
        return Vec::new();
    }
    let lead = r.lead();
    let mut comp = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        comp[(i, d - 1)] = -r.coeff(i) / lead;
    }
    let eig: Vec<Complex64> = match Schur::try_new(comp, f64::EPSILON, SCHUR_MAX_ITER) {
        Some(schur) => schur
            .complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect(),
        None => aberth(r),
    };
    let mut pairs: Vec<(f64, f64)> = eig
        .iter()
        .filter(|z| z.im > 0.0)
        .map(|z| {
            let p = polish_complex(r, Complex64::new(z.re, z.im));
            (p.re, p.im.abs())
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    pairs
}

/// All complex roots by the Aberth-Ehrlich simultaneous iteration, used when
/// the companion-matrix eigenvalue iteration does not converge.
fn aberth(r: &Poly) -> Vec<Complex64> {
    let d = r.degree();
    let dr = r.derivative();
    let lead = r.lead();
    let radius = 1.0
        + r.coeffs()[..d]
            .iter()
            .fold(0.0f64, |m, a| m.max((a / lead).abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(0.5 * radius, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let ratio = r.eval_complex(z[i]) / dr.eval_complex(z[i]);
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn polish_complex(r: &Poly, mut z: Complex64) -> Complex64 {
    let dr = r.derivative();
    for _ in 0..3 {
        let v = r.eval_complex(z);
        let d = dr.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let nz = z - v / d;
        if r.eval_complex(nz).norm() >= v.norm() {
            break;
        }
        z = nz;
    }
    z
}

fn merge_close(sorted: &[RealRoot], gap: f64) -> Vec<RealRoot> {
    let mut out: Vec<RealRoot> = Vec::new();
    for r in sorted {
        if let Some(last) = out.last_mut() {
            if (r.value - last.value).abs() <= gap {
                let m = last.multiplicity + r.multiplicity;
                last.value = (last.value * last.multiplicity as f64
                    + r.value * r.multiplicity as f64)
                    / m as f64;
                last.multiplicity = m;
                continue;
            }
        }
        out.push(*r);
    }
    out
}
