//! Exact real numbers of the form `r + Σ q_i √c_i` with rational `r, q_i`
//! and distinct squarefree radicands `c_i ≥ 2`.
//!
//! Quadratic irrationals such as the golden-ratio conjugate or `√2 − 1`
//! live here, and so do the integer combinations of them that appear in
//! subgroup presentations. Sums of square roots of distinct squarefree
//! integers are linearly independent over the rationals, so a form is zero
//! exactly when all of its coefficients are; signs of non-zero forms are
//! decided with integer square roots at increasing precision.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, int, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Surd {
    offset: Rational,
    terms: BTreeMap<u64, Rational>,
}

/// Splits `c = f² · s` with `s` squarefree.
pub fn squarefree_split(c: u64) -> (u64, u64) {
    let mut s = c;
    let mut f = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= s {
        while s % (p * p) == 0 {
            s /= p * p;
            f *= p;
        }
        p += 1;
    }
    (f, s)
}

impl Surd {
    pub fn rational(q: Rational) -> Self {
        Surd {
            offset: q,
            terms: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    /// `(a + b√c) / d`.
    pub fn quadratic(a: i64, b: i64, c: u64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("quadratic literal with zero denominator"));
        }
        let den = BigInt::from(d);
        let offset = Rational::new(BigInt::from(a), den.clone());
        if b == 0 || c == 0 {
            return Ok(Self::rational(offset));
        }
        let (f, s) = squarefree_split(c);
        let coef = Rational::new(BigInt::from(b) * BigInt::from(f), den);
        if s == 1 {
            return Ok(Self::rational(offset + coef));
        }
        let mut terms = BTreeMap::new();
        terms.insert(s, coef);
        Ok(Surd { offset, terms })
    }

    /// Builds a form from an offset and `(radicand, coefficient)` pairs with
    /// squarefree radicands.
    pub fn from_parts(offset: Rational, terms: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        let mut out = Self::rational(offset);
        for (c, q) in terms {
            out.add_term(c, q);
        }
        out
    }

    fn add_term(&mut self, radicand: u64, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        if radicand == 1 {
            self.offset += coef;
            return;
        }
        let slot = self.terms.entry(radicand).or_insert_with(Rational::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn is_rational(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.offset)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.offset.is_zero()
    }

    pub fn add(&self, other: &Surd) -> Surd {
        let mut out = self.clone();
        out.offset += &other.offset;
        for (&c, q) in &other.terms {
            out.add_term(c, q.clone());
        }
        out
    }

    pub fn neg(&self) -> Surd {
        Surd {
            offset: -&self.offset,
            terms: self.terms.iter().map(|(&c, q)| (c, -q)).collect(),
        }
    }

    pub fn sub(&self, other: &Surd) -> Surd {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Surd {
        if k.is_zero() {
            return Surd::zero();
        }
        Surd {
            offset: &self.offset * k,
            terms: self.terms.iter().map(|(&c, q)| (c, q * k)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Surd {
        self.scale(&int(n))
    }

    pub fn sub_rational(&self, q: &Rational) -> Surd {
        Surd {
            offset: &self.offset - q,
            terms: self.terms.clone(),
        }
    }

    /// Nearest-double value. The direct float sum loses about
    /// `scale · 2^-53` to cancellation, so large coefficients fall back to
    /// the double-double evaluation.
    pub fn to_f64(&self) -> f64 {
        let (sum, scale) = self.terms.iter().fold(
            (to_f64(&self.offset), to_f64(&self.offset).abs()),
            |(acc, sc), (&c, q)| {
                let t = to_f64(q) * (c as f64).sqrt();
                (acc + t, sc + t.abs())
            },
        );
        if scale <= 4.0 || !scale.is_finite() {
            sum
        } else {
            self.to_f64_pair().0
        }
    }

    /// Rational approximation within `n_terms · 2^-bits`.
    pub fn approximate(&self, bits: u32) -> Rational {
        let s = BigInt::one() << bits;
        let mut acc = self.offset.clone();
        for (&c, q) in &self.terms {
            let den = q.denom().clone();
            let num = q.numer().clone();
            // floor(|num| √c · s / den) / s, with the sign of q.
            let mag = (num.abs() * num.abs() * BigInt::from(c) * &s * &s).sqrt() / &den;
            let t = Rational::new(mag, s.clone());
            if num.sign() == Sign::Minus {
                acc -= t;
            } else {
                acc += t;
            }
        }
        acc
    }

    /// Double-double `(hi, lo)` with `hi + lo` within about `2^-100`.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let x = self.approximate(128);
        let hi = to_f64(&x);
        let lo = match Rational::from_float(hi) {
            Some(h) => to_f64(&(x - h)),
            None => 0.0,
        };
        (hi, lo)
    }

    /// Exact sign of the represented real number.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return self.offset.cmp(&Rational::zero());
        }
        // Fast path: a float evaluation that is clear of its own error bound.
        let approx = self.to_f64();
        let scale = self
            .terms
            .iter()
            .fold(to_f64(&self.offset).abs(), |acc, (&c, q)| {
                acc + to_f64(q).abs() * (c as f64).sqrt()
            });
        if approx.is_finite() && approx.abs() > 1e-12 * scale.max(1.0) {
            return if approx > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.signum_exact()
    }

    /// Interval evaluation with integer square roots, doubling the precision
    /// until the sign is certain. Terminates because a form with a non-zero
    /// irrational part is never zero.
    fn signum_exact(&self) -> Ordering {
        let den = common_denominator(std::iter::once(&self.offset).chain(self.terms.values()));
        let r = (&self.offset * Rational::from_integer(den.clone())).to_integer();
        let qs: Vec<(BigInt, u64)> = self
            .terms
            .iter()
            .map(|(&c, q)| ((q * Rational::from_integer(den.clone())).to_integer(), c))
            .collect();
        let mut bits = 64u32;
        loop {
            let s = BigInt::one() << bits;
            // Each term contributes sign(q) * floor(|q| √c · s) + [0, 1).
            let mut lo = &r * &s;
            let mut hi = lo.clone();
            for (q, c) in &qs {
                let mag = (q.abs() * q.abs() * BigInt::from(*c) * &s * &s).sqrt();
                if q.sign() == Sign::Minus {
                    lo -= &mag + BigInt::one();
                    hi -= &mag;
                } else {
                    lo += &mag;
                    hi += &mag + BigInt::one();
                }
            }
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        self.sub_rational(q).signum()
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.terms.is_empty() {
            return self.offset.floor().to_integer();
        }
        let guess = self.to_f64().floor();
        let mut k = BigInt::from(guess.to_i64().unwrap_or(0));
        if !guess.is_finite() || guess.abs() > 1e15 {
            k = self.offset.floor().to_integer();
        }
        loop {
            let kq = Rational::from_integer(k.clone());
            if self.cmp_rational(&kq) == Ordering::Less {
                k -= 1;
                continue;
            }
            if self.cmp_rational(&(kq + Rational::one())) != Ordering::Less {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// Representative in `[0, 1)`.
    pub fn frac(&self) -> Surd {
        let k = self.floor();
        self.sub_rational(&Rational::from_integer(k))
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.offset)?;
        for (c, q) in &self.terms {
            write!(f, " + ({q})√{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn double_double_of_golden() {
        let g = Surd::quadratic(-1, 1, 5, 2).unwrap();
        let (hi, lo) = g.to_f64_pair();
        assert!((hi - 0.6180339887498949).abs() < 1e-16);
        assert!(lo != 0.0 && lo.abs() < 1e-16);
        // hi + lo is closer than hi alone: compare against a 200-bit value.
        let exact = g.approximate(200);
        let err = to_f64(&(exact - Rational::from_float(hi).unwrap())) - lo;
        assert!(err.abs() < 1e-30);
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(5), (1, 5));
        assert_eq!(squarefree_split(36), (6, 1));
    }

    #[test]
    fn golden_conjugate_floor_and_compare() {
        let g = Surd::quadratic(-1, 1, 5, 2).unwrap();
        assert_eq!(g.floor(), BigInt::zero());
        assert_eq!(g.cmp_rational(&ratio(618, 1000)), Ordering::Greater);
        assert_eq!(g.cmp_rational(&ratio(619, 1000)), Ordering::Less);
        // 1000 * g lies in (618, 619)
        let big = g.scale_int(1000);
        assert_eq!(big.floor(), BigInt::from(618));
    }

    #[test]
    fn perfect_square_collapses() {
        let x = Surd::quadratic(1, 2, 9, 7).unwrap();
        assert_eq!(x, Surd::rational(ratio(1, 1)));
    }

    #[test]
    fn exact_sign_of_near_cancellation() {
        // Fibonacci convergents of the golden conjugate approach it within
        // float resolution; the exact path still separates them.
        let g = Surd::quadratic(-1, 1, 5, 2).unwrap();
        let p = ratio(1_134_903_170, 1_836_311_903);
        let d = g.sub_rational(&p);
        assert_ne!(d.signum(), Ordering::Equal);
        assert_eq!(d.signum(), d.signum_exact());
        assert!(d.to_f64().abs() < 1e-15);
    }

    #[test]
    fn multi_radicand_arithmetic() {
        let a = Surd::quadratic(0, 1, 2, 1).unwrap();
        let b = Surd::quadratic(0, 1, 3, 1).unwrap();
        let s = a.add(&b);
        assert!((s.to_f64() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-15);
        assert!(s.sub(&a).sub(&b).is_zero());
        assert_eq!(s.frac().floor(), BigInt::zero());
    }
}
