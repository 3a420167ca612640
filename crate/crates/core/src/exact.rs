//! Closing conditions of the catalog families in exact rational arithmetic.
//!
//! Parameters are converted from `f64` without rounding and every derived
//! quantity is formed with `BigRational`, so a closing condition either holds
//! exactly or fails by a visible rational amount.

use crate::boundary::End;
use crate::catalog::{CatalogError, FamilyName, FamilySpec};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Converts a float to the rational number it represents exactly.
pub fn exact(x: f64) -> Result<BigRational, CatalogError> {
    BigRational::from_float(x)
        .ok_or_else(|| CatalogError::ConstraintViolation(format!("{x} is not finite")))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Dense polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalPoly(pub Vec<BigRational>);

impl RationalPoly {
    pub fn from_roots(roots: &[BigRational]) -> Self {
        let mut c = vec![BigRational::one()];
        for r in roots {
            let mut next = vec![BigRational::zero(); c.len() + 1];
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= ci * r;
            }
            c = next;
        }
        RationalPoly(c)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RationalPoly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn derivative(&self) -> Self {
        RationalPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

/// `F'(r)` at a root `r` of `K`, for `F = K / g^m` normalised so that the
/// `g^n` coefficient of `g^{n-1-m} K` equals one.
pub fn slope_at_root(
    n: usize,
    m: usize,
    roots: &[BigRational],
    r: &BigRational,
) -> Result<BigRational, CatalogError> {
    let k = RationalPoly::from_roots(roots);
    let lead = k.coeff(n - (n - 1 - m));
    if lead.is_zero() {
        return Err(CatalogError::ConstraintViolation(
            "roots give no g^n term".into(),
        ));
    }
    let k = k.scale(&lead.recip());
    let mut den = BigRational::one();
    for _ in 0..m {
        den *= r;
    }
    if den.is_zero() {
        return Err(CatalogError::ConstraintViolation(
            "slope at g = 0 with a pole".into(),
        ));
    }
    Ok(k.derivative().eval(r) / den)
}

/// One closing condition `F'(root) = target` evaluated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosingCheck {
    pub family: FamilyName,
    pub end: End,
    pub root: BigRational,
    pub value: BigRational,
    pub target: BigRational,
}

impl ClosingCheck {
    pub fn holds(&self) -> bool {
        self.value == self.target
    }

    pub fn defect(&self) -> BigRational {
        (&self.value - &self.target).abs()
    }
}

impl fmt::Display for ClosingCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: F'({}) = {} (target {}, {:.6e})",
            self.family,
            self.end,
            self.root,
            self.value,
            self.target,
            self.value.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// Exact `(α, β)` of the positive cscK family on a positive bundle.
pub fn pos_csck_params_exact(k: u32) -> (BigRational, BigRational) {
    let lambda = BigRational::new(1.into(), (16 * k as i64).into());
    (lambda.clone(), lambda * int(2))
}

/// `(β-α)² / (β² (β+2α))`, the closing quantity as printed alongside this
/// family in the literature. It differs from the model slope `-F'(β)` by a
/// factor of β.
pub fn pos_csck_printed_relation(alpha: &BigRational, beta: &BigRational) -> BigRational {
    let d = beta - alpha;
    &d * &d / (beta * beta * (beta + alpha * int(2)))
}

/// The closing conditions that hold by construction for a family.
///
/// Families whose endpoints are cone points or complete ends return no
/// checks. The Hirzebruch extremal family is solved in floating point and
/// has no exact check.
pub fn closing_checks(spec: &FamilySpec) -> Result<Vec<ClosingCheck>, CatalogError> {
    let n = spec.n.get();
    let p = |key: &str| exact(spec.param(key));
    let k_int = || exact(spec.param("k"));
    let zero = BigRational::zero();
    let one = BigRational::one();
    let check = |end: End,
                 m: usize,
                 roots: &[BigRational],
                 r: &BigRational,
                 target: BigRational|
     -> Result<ClosingCheck, CatalogError> {
        Ok(ClosingCheck {
            family: spec.name,
            end,
            root: r.clone(),
            value: slope_at_root(n, m, roots, r)?,
            target,
        })
    };
    let smooth = |roots: &[BigRational]| check(End::Origin, 0, roots, &zero, one.clone());
    Ok(match spec.name {
        FamilyName::Euclidean => vec![smooth(&[zero.clone()])?],
        FamilyName::FubiniStudy => vec![smooth(&[zero.clone(), one.clone()])?],
        FamilyName::Biquard => {
            let b = p("beta")?;
            vec![smooth(&[zero.clone(), b.clone(), b])?]
        }
        FamilyName::WeightedProjective => {
            let g = p("gamma")?;
            let b = g.abs() * (k_int()? - &one);
            let roots = [zero.clone(), b.clone(), g];
            vec![
                smooth(&roots)?,
                check(End::Infinity, 0, &roots, &b, -k_int()?)?,
            ]
        }
        FamilyName::GauduchonCone => {
            vec![smooth(&[zero.clone(), p("beta")?, p("gamma")?])?]
        }
        FamilyName::LeBrunNeg => {
            let b = p("beta")?;
            let a = &b * (&one - k_int()?);
            vec![check(End::Origin, 1, &[a, b.clone()], &b, k_int()?)?]
        }
        FamilyName::PosCscKOnPosBundle => {
            let k = spec.param("k") as u32;
            let (a, b) = pos_csck_params_exact(k);
            vec![check(
                End::Infinity,
                1,
                &[a.clone(), a, b.clone()],
                &b,
                -k_int()?,
            )?]
        }
        FamilyName::StrictExtremalNegBundle => {
            let k = k_int()?;
            let b = p("beta")?;
            let g = &b * int(2);
            let a = (&one - &k * int(8)) / (&one + &k * int(5)) * &b;
            vec![check(End::Origin, 1, &[a, b.clone(), g.clone(), g], &b, k)?]
        }
        FamilyName::HirzebruchCscKCone
        | FamilyName::StrictExtremalPunctured
        | FamilyName::HirzebruchExtremal => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::Dimension;

    fn spec(name: &str) -> FamilySpec {
        FamilySpec::named(name, Dimension::new(2).unwrap()).unwrap()
    }

    #[test]
    fn eguchi_hanson_and_burns_close() {
        for (name, theta) in [("EguchiHanson", 2), ("Burns", 1)] {
            let c = closing_checks(&spec(name)).unwrap();
            assert!(c[0].holds(), "{}", c[0]);
            assert_eq!(c[0].value, int(theta));
        }
    }

    #[test]
    fn weighted_projective_and_extremal_neg_bundle_close() {
        for name in ["WeightedProjective", "StrictExtremalNegBundle", "Biquard"] {
            for c in closing_checks(&spec(name)).unwrap() {
                assert!(c.holds(), "{c}");
            }
        }
    }

    #[test]
    fn pos_csck_model_slope_is_minus_beta_times_printed_relation() {
        let (a, b) = pos_csck_params_exact(1);
        assert_eq!(pos_csck_printed_relation(&a, &b), int(1));
        let c = &closing_checks(&spec("PosCscKOnPosBundle")).unwrap()[0];
        assert_eq!(c.value, BigRational::new((-1).into(), 8.into()));
        assert!(!c.holds());
    }

    #[test]
    fn exact_conversion_is_lossless() {
        assert_eq!(exact(0.1).unwrap().to_f64().unwrap(), 0.1);
        assert!(exact(f64::NAN).is_err());
    }
}
