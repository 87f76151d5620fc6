//! Elements of the circle group 𝕋 = ℝ/ℤ, characters of ℤ, and points of
//! the finite-dimensional groups 𝕋^k × F.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rational::{frac, parse_rational, to_f64, Rational};
use crate::surd::Surd;

/// Default uncertainty attached to a floating literal.
pub const FLOAT_LITERAL_TOL: f64 = 4.0 * f64::EPSILON;

/// A point of 𝕋, always reduced into `[0, 1)`.
///
/// Exact values are sums of square roots with rational coefficients (see
/// [`Surd`]); floating values carry an absolute uncertainty.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    Exact(Surd),
    Float { value: f64, tol: f64 },
}

impl Angle {
    pub fn zero() -> Self {
        Angle::Exact(Surd::zero())
    }

    pub fn from_rational(q: &Rational) -> Self {
        Angle::Exact(Surd::rational(frac(q)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::from_rational(&crate::rational::ratio(num, den))
    }

    /// `(a + b√c) / d` modulo 1.
    pub fn quadratic(a: i64, b: i64, c: u64, d: i64) -> Result<Self> {
        Ok(Self::from_surd(Surd::quadratic(a, b, c, d)?))
    }

    pub fn from_surd(s: Surd) -> Self {
        Angle::Exact(s.frac())
    }

    pub fn float(value: f64) -> Self {
        Self::float_with_tol(value, FLOAT_LITERAL_TOL)
    }

    pub fn float_with_tol(value: f64, tol: f64) -> Self {
        let mut v = value.rem_euclid(1.0);
        if v >= 1.0 {
            v = 0.0;
        }
        Angle::Float {
            value: v,
            tol: tol.abs(),
        }
    }

    /// Parses `p/q`, a decimal float, or `quadratic:a,b,c,d`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("quadratic:") {
            let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::invalid(format!(
                    "quadratic literal needs a,b,c,d: {s:?}"
                )));
            }
            let p = |i: usize| -> Result<i64> {
                parts[i]
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad integer {:?}", parts[i])))
            };
            let c = p(2)?;
            if c < 0 {
                return Err(Error::invalid("negative radicand"));
            }
            return Self::quadratic(p(0)?, p(1)?, c as u64, p(3)?);
        }
        if let Some(rest) = s.strip_prefix("float:") {
            let v: f64 = rest
                .parse()
                .map_err(|_| Error::invalid(format!("bad float {rest:?}")))?;
            return Ok(Self::float(v));
        }
        if s.contains('/') {
            return Ok(Self::from_rational(&parse_rational(s)?));
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::invalid(format!("bad angle literal {s:?}")))?;
        Ok(Self::float(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::Exact(_))
    }

    pub fn as_surd(&self) -> Option<&Surd> {
        match self {
            Angle::Exact(s) => Some(s),
            Angle::Float { .. } => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.as_surd().and_then(Surd::as_rational)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Angle::Exact(s) => s.to_f64(),
            Angle::Float { value, .. } => *value,
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Angle::Exact(_) => 0.0,
            Angle::Float { tol, .. } => *tol,
        }
    }

    /// Exact zero test, or a test against the uncertainty for floats.
    pub fn is_zero(&self) -> bool {
        match self {
            Angle::Exact(s) => s.is_zero(),
            Angle::Float { value, tol } => value.min(1.0 - value) <= *tol,
        }
    }

    pub fn to_float(&self) -> Angle {
        match self {
            Angle::Exact(s) => Angle::float_with_tol(s.to_f64(), FLOAT_LITERAL_TOL),
            f => f.clone(),
        }
    }

    pub fn add(&self, other: &Angle) -> Angle {
        match (self, other) {
            (Angle::Exact(a), Angle::Exact(b)) => Angle::from_surd(a.add(b)),
            _ => Angle::float_with_tol(
                self.to_f64() + other.to_f64(),
                self.tol() + other.tol() + f64::EPSILON,
            ),
        }
    }

    pub fn neg(&self) -> Angle {
        match self {
            Angle::Exact(s) => Angle::from_surd(s.neg()),
            Angle::Float { value, tol } => Angle::float_with_tol(-value, *tol),
        }
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        self.add(&other.neg())
    }

    pub fn mul_int(&self, n: i64) -> Angle {
        match self {
            Angle::Exact(s) => Angle::from_surd(s.scale_int(n)),
            Angle::Float { value, tol } => {
                let prod = (*value as f64) * n as f64;
                Angle::float_with_tol(
                    prod,
                    tol * (n as f64).abs() + f64::EPSILON * prod.abs().max(1.0),
                )
            }
        }
    }

    /// Double-double `(hi, lo)` approximation of the representative.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        match self {
            Angle::Exact(s) => s.to_f64_pair(),
            Angle::Float { value, .. } => (*value, 0.0),
        }
    }

    /// Compares the representative in `[0, 1)` with a rational, exactly when
    /// `self` is exact.
    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        match self {
            Angle::Exact(s) => s.cmp_rational(q),
            Angle::Float { value, .. } => value.partial_cmp(&to_f64(q)).unwrap_or(Ordering::Equal),
        }
    }

    /// Circular distance to 0, `‖x‖ ∈ [0, 1/2]`.
    pub fn norm(&self) -> f64 {
        let v = self.to_f64();
        v.min(1.0 - v)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Exact(s) => match s.as_rational() {
                Some(q) => write!(f, "{q}"),
                None => write!(f, "{s}"),
            },
            Angle::Float { value, tol } => write!(f, "{value}±{tol:e}"),
        }
    }
}

/// A character of ℤ, `n ↦ e^{2πi n α}`, identified with its rotation number.
#[derive(Clone, Debug, PartialEq)]
pub struct Character(pub Angle);

impl Character {
    pub fn new(alpha: Angle) -> Self {
        Character(alpha)
    }

    pub fn trivial() -> Self {
        Character(Angle::zero())
    }

    pub fn alpha(&self) -> &Angle {
        &self.0
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        phase(self.0.to_f64(), n)
    }
}

/// `e^{2πi n α}` with the product reduced modulo 1 before the exponential.
pub fn phase(alpha: f64, n: i64) -> Complex64 {
    let t = (alpha * n as f64).rem_euclid(1.0);
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `n (hi + lo) mod 1` with the product error-free in `hi` (about `1e-16`
/// absolute accuracy for `|n| < 2^53`).
pub fn mul_turns((hi, lo): (f64, f64), n: i64) -> f64 {
    let nf = n as f64;
    let prod = hi * nf;
    let err = hi.mul_add(nf, -prod);
    let r = (prod.rem_euclid(1.0) + (err + lo * nf)).rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// The abstract group 𝕋^k × ℤ/n_1 × … × ℤ/n_N.
///
/// Elements of the finite part are addressed by mixed-radix indices with
/// the first factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompactGroup {
    torus_rank: usize,
    finite: Vec<u64>,
}

impl CompactGroup {
    pub fn new(torus_rank: usize, finite: Vec<u64>) -> Result<Self> {
        if finite.iter().any(|&n| n == 0) {
            return Err(Error::invalid("cyclic factor of order zero"));
        }
        let finite: Vec<u64> = finite.into_iter().filter(|&n| n > 1).collect();
        let order = finite
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .ok_or(Error::Overflow("finite group order"))?;
        if order > 1 << 24 {
            return Err(Error::invalid("finite part too large"));
        }
        Ok(CompactGroup { torus_rank, finite })
    }

    pub fn torus(k: usize) -> Self {
        CompactGroup {
            torus_rank: k,
            finite: Vec::new(),
        }
    }

    pub fn torus_rank(&self) -> usize {
        self.torus_rank
    }

    pub fn finite_part(&self) -> &[u64] {
        &self.finite
    }

    pub fn finite_order(&self) -> usize {
        self.finite.iter().product::<u64>() as usize
    }

    pub fn is_trivial(&self) -> bool {
        self.torus_rank == 0 && self.finite.is_empty()
    }

    pub fn element(&self, mut index: usize) -> Vec<u64> {
        let mut out = vec![0; self.finite.len()];
        for (slot, &n) in out.iter_mut().zip(&self.finite).rev() {
            *slot = (index as u64) % n;
            index /= n as usize;
        }
        out
    }

    pub fn index(&self, element: &[u64]) -> usize {
        element
            .iter()
            .zip(&self.finite)
            .fold(0usize, |acc, (&u, &n)| acc * n as usize + (u % n) as usize)
    }

    /// Index of `a + b` (or `a - b` with `negate_b`).
    pub fn combine(&self, a: usize, b: usize, negate_b: bool) -> usize {
        let ea = self.element(a);
        let eb = self.element(b);
        let sum: Vec<u64> = ea
            .iter()
            .zip(&eb)
            .zip(&self.finite)
            .map(|((&x, &y), &n)| {
                if negate_b {
                    (x + n - y) % n
                } else {
                    (x + y) % n
                }
            })
            .collect();
        self.index(&sum)
    }
}

impl fmt::Display for CompactGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T^{}", self.torus_rank)?;
        for n in &self.finite {
            write!(f, " x Z/{n}")?;
        }
        Ok(())
    }
}

/// A point of 𝕋^k × F.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub torus: Vec<Angle>,
    pub finite: Vec<u64>,
}

impl Point {
    pub fn new(torus: Vec<Angle>, finite: Vec<u64>) -> Self {
        Point { torus, finite }
    }

    pub fn zero(group: &CompactGroup) -> Self {
        Point {
            torus: vec![Angle::zero(); group.torus_rank()],
            finite: vec![0; group.finite_part().len()],
        }
    }

    pub fn rational(torus: &[Rational], finite: Vec<u64>) -> Self {
        Point {
            torus: torus.iter().map(Angle::from_rational).collect(),
            finite,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.torus.iter().all(Angle::is_exact)
    }

    pub fn rational_coords(&self) -> Option<Vec<Rational>> {
        self.torus
            .iter()
            .map(|a| a.as_rational().cloned())
            .collect()
    }

    pub fn float_coords(&self) -> Vec<f64> {
        self.torus.iter().map(Angle::to_f64).collect()
    }

    pub fn add(&self, other: &Point, group: &CompactGroup) -> Point {
        Point {
            torus: self
                .torus
                .iter()
                .zip(&other.torus)
                .map(|(a, b)| a.add(b))
                .collect(),
            finite: self
                .finite
                .iter()
                .zip(&other.finite)
                .zip(group.finite_part())
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        }
    }

    /// Sup of the circular torus distances; infinite off the identity
    /// component.
    pub fn norm(&self) -> f64 {
        if self.finite.iter().any(|&u| u != 0) {
            return f64::INFINITY;
        }
        self.torus.iter().map(Angle::norm).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.finite.iter().all(|&u| u == 0) && self.torus.iter().all(Angle::is_zero)
    }
}
