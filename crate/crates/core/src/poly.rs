//! Dense real polynomials with ascending coefficient storage.

use num_complex::Complex64;
use std::fmt;

/// A real polynomial `c[0] + c[1] x + ... + c[d] x^d`.
///
/// Trailing exact zeros are trimmed on construction, so the stored leading
/// coefficient is nonzero unless the polynomial is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    c: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients.
    pub fn new(mut c: Vec<f64>) -> Self {
        while c.len() > 1 && c[c.len() - 1] == 0.0 {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![0.0] }
    }

    pub fn constant(a: f64) -> Self {
        Poly::new(vec![a])
    }

    /// The monomial `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Poly { c }
    }

    /// `lead * prod (x - r)` over the given roots.
    pub fn from_roots(lead: f64, roots: &[f64]) -> Self {
        let mut p = Poly::constant(lead);
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 0.0
    }

    pub fn lead(&self) -> f64 {
        self.c[self.c.len() - 1]
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    /// Horner evaluation at a complex point.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.c
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Evaluates `p(x)` together with `p'(x)`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &a in self.c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() == 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| k as f64 * a)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        Poly::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut c = vec![0.0; self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        let mut c = vec![0.0; k];
        c.extend_from_slice(&self.c);
        Poly::new(c)
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree();
        if self.degree() < dd {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.c.clone();
        let lead = d.lead();
        let mut q = vec![0.0; self.degree() - dd + 1];
        for k in (0..q.len()).rev() {
            let t = r[k + dd] / lead;
            q[k] = t;
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] -= t * b;
            }
            r[k + dd] = 0.0;
        }
        r.truncate(dd.max(1));
        (Poly::new(q), Poly::new(r))
    }

    /// Coefficients of `q(d) = p(a + d)`.
    pub fn taylor_shift(&self, a: f64) -> Poly {
        let mut c = self.c.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                c[j] += a * c[j + 1];
            }
        }
        Poly::new(c)
    }

    /// Coefficients of `q(d) = p(-d)`.
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .map(|(k, &a)| if k % 2 == 1 { -a } else { a })
                .collect(),
        )
    }

    /// Drops the constant term and divides by `x`.
    pub fn deflate_origin(&self) -> Poly {
        if self.c.len() == 1 {
            return Poly::zero();
        }
        Poly::new(self.c[1..].to_vec())
    }

    /// Divides by `(x - r)` with synthetic division, discarding the remainder.
    pub fn deflate_root(&self, r: f64) -> Poly {
        if self.c.len() == 1 {
            return Poly::zero();
        }
        let n = self.c.len();
        let mut q = vec![0.0; n - 1];
        let mut acc = self.c[n - 1];
        for k in (0..n - 1).rev() {
            q[k] = acc;
            acc = self.c[k] + acc * r;
        }
        Poly::new(q)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        self.scale(1.0 / self.lead())
    }

    /// Sets coefficients below `rel * norm_inf` to zero.
    pub fn chop(&self, rel: f64) -> Poly {
        let t = rel * self.norm_inf();
        Poly::new(
            self.c
                .iter()
                .map(|&a| if a.abs() <= t { 0.0 } else { a })
                .collect(),
        )
    }

    /// Number of low-order exact-zero coefficients, i.e. the power of `x`
    /// dividing the polynomial.
    pub fn low_order_zeros(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        self.c.iter().take_while(|&&a| a == 0.0).count()
    }
}

/// Approximate greatest common divisor by the Euclidean algorithm.
///
/// A remainder whose coefficients are all below `rel` times the dividend's
/// scale is treated as zero. The result is monic.
pub fn approx_gcd(a: &Poly, b: &Poly, rel: f64) -> Poly {
    if b.is_zero() {
        return a.monic();
    }
    if a.is_zero() {
        return b.monic();
    }
    let (mut x, mut y) = if a.degree() >= b.degree() {
        (a.monic(), b.monic())
    } else {
        (b.monic(), a.monic())
    };
    loop {
        if y.degree() == 0 {
            return Poly::constant(1.0);
        }
        let (_, r) = x.div_rem(&y);
        let scale = x.norm_inf().max(y.norm_inf());
        if r.norm_inf() <= rel * scale {
            return y.monic();
        }
        x = y;
        y = r.monic();
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &a) in self.c.iter().enumerate().rev() {
            if a == 0.0 && self.c.len() > 1 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a} x")?,
                _ => write!(f, "{a} x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_roots_and_eval() {
        let p = Poly::from_roots(2.0, &[1.0, -3.0]);
        assert_eq!(p.coeffs(), &[-6.0, 4.0, 2.0]);
        assert_eq!(p.eval(1.0), 0.0);
        assert_eq!(p.eval(2.0), 10.0);
    }

    #[test]
    fn division_recovers_factors() {
        let a = Poly::from_roots(1.0, &[1.0, 2.0, 5.0]);
        let (q, r) = a.div_rem(&Poly::from_roots(1.0, &[2.0]));
        assert!(r.norm_inf() < 1e-14);
        assert_eq!(q, Poly::from_roots(1.0, &[1.0, 5.0]));
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::new(vec![0.3, -1.0, 2.0, 0.5]);
        let q = p.taylor_shift(1.7);
        for d in [-0.4, 0.0, 0.25, 2.0] {
            assert!((q.eval(d) - p.eval(1.7 + d)).abs() < 1e-12);
        }
        let r = p.reflect();
        assert!((r.eval(0.3) - p.eval(-0.3)).abs() < 1e-15);
    }

    #[test]
    fn deflation() {
        let p = Poly::from_roots(3.0, &[0.5, -2.0, 4.0]);
        assert_eq!(p.deflate_root(0.5), Poly::from_roots(3.0, &[-2.0, 4.0]));
        let x = Poly::from_roots(1.0, &[0.0, 1.0]);
        assert_eq!(x.deflate_origin(), Poly::new(vec![-1.0, 1.0]));
    }

    #[test]
    fn gcd_of_repeated_factor() {
        let p = Poly::from_roots(0.25, &[1.0, 1.0, 2.0, 2.0]);
        let g = approx_gcd(&p, &p.derivative(), 1e-11);
        let expect = Poly::from_roots(1.0, &[1.0, 2.0]);
        for (a, b) in g.coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).abs() < 1e-10);
        }
        let q = Poly::from_roots(1.0, &[1.0, 2.0, 3.0]);
        assert_eq!(approx_gcd(&q, &q.derivative(), 1e-11).degree(), 0);
    }

    #[test]
    fn derivative_and_combined_eval() {
        let p = Poly::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.derivative(), Poly::new(vec![2.0, 6.0]));
        assert_eq!(p.eval_with_derivative(2.0), (17.0, 14.0));
    }
}
