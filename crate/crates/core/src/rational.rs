//! Exact rationals and continued-fraction tools.
//!
//! Every exact quantity in the crate (arc endpoints, rotation numbers,
//! Haar integrals of step functions) is a [`Rational`]. Floating rotation
//! numbers are related back to rationals through continued-fraction
//! convergents, see [`classify_rationality`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or(Error::Overflow("integer conversion"))
}

pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or(Error::Overflow("integer conversion"))
}

/// Least common multiple of the denominators of `xs` (1 for an empty list).
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, decimals)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), decimals);
        let mut n: BigInt = digits
            .parse()
            .map_err(|_| Error::invalid(format!("bad decimal {s:?}")))?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), decimals.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::invalid(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Continued-fraction convergents `p/q` of the exact binary value of `x`.
///
/// The expansion of an `f64` always terminates; iteration stops there or
/// when the numbers stop fitting in `i128`.
pub fn convergents(x: f64) -> Convergents {
    let exact = Rational::from_float(x).unwrap_or_else(Rational::zero);
    Convergents {
        rest: Some(exact),
        prev: (1, 0),
        prev2: (0, 1),
    }
}

pub struct Convergents {
    rest: Option<Rational>,
    prev: (i128, i128),
    prev2: (i128, i128),
}

impl Iterator for Convergents {
    type Item = (i128, i128);

    fn next(&mut self) -> Option<(i128, i128)> {
        let r = self.rest.take()?;
        let a = r.floor();
        let a_i = a.to_integer().to_i128()?;
        let p = a_i.checked_mul(self.prev.0)?.checked_add(self.prev2.0)?;
        let q = a_i.checked_mul(self.prev.1)?.checked_add(self.prev2.1)?;
        self.prev2 = self.prev;
        self.prev = (p, q);
        let f = r - a;
        if !f.is_zero() {
            self.rest = Some(f.recip());
        }
        Some((p, q))
    }
}

/// Result of relating a floating rotation number to the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RationalClass {
    /// `num/den` reduced, with `0 <= num < den`.
    Rational { num: i64, den: u64 },
    /// No convergent with denominator at most `bound` lies within the residual.
    IrrationalTo { bound: u64 },
}

impl RationalClass {
    pub fn as_rational(&self) -> Option<Rational> {
        match *self {
            RationalClass::Rational { num, den } => Some(ratio(num, den as i64)),
            RationalClass::IrrationalTo { .. } => None,
        }
    }
}

impl fmt::Display for RationalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalClass::Rational { num, den } => write!(f, "{num}/{den}"),
            RationalClass::IrrationalTo { bound } => write!(f, "irrational-to-{bound}"),
        }
    }
}

/// Returns the first convergent `p/q` of `alpha` with `q <= q_bound` whose
/// distance to `alpha` is at most `residual`, reduced modulo 1.
pub fn classify_rationality(alpha: f64, residual: f64, q_bound: u64) -> RationalClass {
    let alpha = alpha.rem_euclid(1.0);
    for (p, q) in convergents(alpha) {
        if q as u128 > q_bound as u128 {
            break;
        }
        if (alpha - p as f64 / q as f64).abs() <= residual {
            let den = q as u64;
            let num = (p.rem_euclid(q)) as i64;
            return RationalClass::Rational { num, den };
        }
    }
    RationalClass::IrrationalTo { bound: q_bound }
}

/// Largest denominator that a measurement with uncertainty `tol` can
/// meaningfully resolve: a rational `p/q` is only accepted when
/// `100 * tol * q^2 <= 1`, so the accepted rationals are well separated
/// compared to the uncertainty.
pub fn resolvable_denominator(tol: f64) -> u64 {
    if tol <= 0.0 {
        return u64::MAX;
    }
    let q = (1.0 / (100.0 * tol)).sqrt().floor();
    if q >= u64::MAX as f64 {
        u64::MAX
    } else {
        q.max(1.0) as u64
    }
}

/// [`classify_rationality`] with the denominator bound capped by what the
/// uncertainty `tol` can resolve.
pub fn certify_rational(alpha: f64, tol: f64, q_bound: u64) -> RationalClass {
    let bound = q_bound.min(resolvable_denominator(tol));
    match classify_rationality(alpha, tol, bound) {
        RationalClass::IrrationalTo { .. } => RationalClass::IrrationalTo { bound: q_bound },
        r => r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergents_of_golden_conjugate_are_fibonacci_ratios() {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let qs: Vec<i128> = convergents(golden).take(10).map(|(_, q)| q).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55]);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify_rationality(0.3333333333, 1e-10, 1000),
            RationalClass::Rational { num: 1, den: 3 }
        );
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(
            classify_rationality(golden + 1e-10, 1e-10, 1000),
            RationalClass::IrrationalTo { bound: 1000 }
        );
        assert_eq!(
            classify_rationality(0.0, 1e-10, 1000),
            RationalClass::Rational { num: 0, den: 1 }
        );
        assert_eq!(
            classify_rationality(0.999_999_999_99, 1e-10, 1000),
            RationalClass::Rational { num: 0, den: 1 }
        );
    }

    #[test]
    fn certify_caps_denominator_by_uncertainty() {
        // 832040/1346269 is within 1e-12 of the golden conjugate, but a
        // measurement that coarse cannot resolve such a denominator.
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(matches!(
            certify_rational(golden, 1e-12, 1_000_000),
            RationalClass::IrrationalTo { .. }
        ));
        assert_eq!(
            certify_rational(2.0 / 81.0 + 3e-9, 1e-8, 1_000_000),
            RationalClass::Rational { num: 2, den: 81 }
        );
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("-2/4").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
    }
}
