//! Truncated Taylor series arithmetic.
//!
//! A [`Jet`] of order `N` stores the Taylor coefficients `c[0..=N]` of a
//! function around an expansion point, so `c[k] = f^(k)(x0) / k!`.

use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least one coefficient");
        Jet { c }
    }

    /// A constant function.
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order > 0 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Taylor coefficient `k`.
    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative_value(&self, k: usize) -> f64 {
        let f: f64 = (1..=k).map(|i| i as f64).product();
        self.coeff(k) * f
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    fn len_with(&self, o: &Jet) -> usize {
        self.c.len().min(o.c.len())
    }

    /// Jet of the derivative, one order shorter.
    pub fn derivative(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet::constant(0.0, 0);
        }
        Jet {
            c: (1..self.c.len()).map(|k| k as f64 * self.c[k]).collect(),
        }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            c: self.c[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let n = self.len_with(o);
        Jet {
            c: (0..n).map(|k| self.c[k] + o.c[k]).collect(),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        let n = self.len_with(o);
        Jet {
            c: (0..n).map(|k| self.c[k] - o.c[k]).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut c = self.c.clone();
        c[0] += s;
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.len_with(o);
        Jet {
            c: (0..n)
                .map(|k| (0..=k).map(|j| self.c[j] * o.c[k - j]).sum())
                .collect(),
        }
    }

    pub fn div(&self, o: &Jet) -> Jet {
        let n = self.len_with(o);
        let b0 = o.c[0];
        let mut c = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (1..=k).map(|j| o.c[j] * c[k - j]).sum();
            c[k] = (self.c[k] - s) / b0;
        }
        Jet { c }
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div(self)
    }

    /// Natural logarithm, requires a positive value.
    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut b = vec![0.0; n];
        b[0] = a0.ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * b[j] * self.c[k - j]).sum();
            b[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: b }
    }

    /// Real power, requires a positive value.
    pub fn powf(&self, p: f64) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut b = vec![0.0; n];
        b[0] = a0.powf(p);
        for k in 1..n {
            let s: f64 = (1..=k)
                .map(|j| ((p + 1.0) * j as f64 - k as f64) * self.c[j] * b[k - j])
                .sum();
            b[k] = s / (k as f64 * a0);
        }
        Jet { c: b }
    }

    /// Non-negative integer power by repeated multiplication.
    pub fn powi(&self, e: usize) -> Jet {
        let mut r = Jet::constant(1.0, self.order());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Composition `p(self)` by Horner's rule.
    pub fn compose_poly(&self, p: &Poly) -> Jet {
        let mut r = Jet::constant(0.0, self.order());
        for &a in p.coeffs().iter().rev() {
            r = r.mul(self).add_scalar(a);
        }
        r
    }
}
