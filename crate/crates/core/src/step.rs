//! Riemann-integrable realizations on `𝕋^k × F`: step functions with box
//! pieces, trigonometric polynomials, and continuous sandwich witnesses.
//!
//! A [`StepFunction`] is stored in grid normal form. Each torus coordinate
//! carries sorted cut points `0 = c_0 < c_1 < … < c_r < 1`, the cells are
//! products of half-open arcs `[c_i, c_{i+1})` (with `c_{r+1} = 1`), and
//! every cell × finite element holds one value. Translations, refinements
//! and `L¹` distances all reduce to re-gridding.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_traits::{Num, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, CompactGroup, Point};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

/// Coordinate type of step functions: exact rationals or floats.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Num + Send + Sync + 'static {
    const EXACT: bool;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn frac(&self) -> Self;
    fn half(&self) -> Self;
    fn abs_val(&self) -> Self;
    /// `|z| · w` as a [`Magnitude`].
    fn weighted_norm(z: &Complex<Self>, w: &Self) -> Magnitude;
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        to_f64(self)
    }
    fn frac(&self) -> Self {
        self - self.floor()
    }
    fn half(&self) -> Self {
        self / Rational::from_integer(BigInt::from(2))
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn weighted_norm(z: &Complex<Self>, w: &Self) -> Magnitude {
        if z.im.is_zero() {
            Magnitude::Exact(z.re.abs() * w)
        } else {
            Magnitude::Approx(Complex64::new(to_f64(&z.re), to_f64(&z.im)).norm() * to_f64(w))
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn frac(&self) -> Self {
        let r = self.rem_euclid(1.0);
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }
    fn half(&self) -> Self {
        self / 2.0
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn weighted_norm(z: &Complex<Self>, w: &Self) -> Magnitude {
        Magnitude::Approx(z.norm() * w)
    }
}

/// A non-negative real that is exact when the data allow it.
#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Exact(Rational),
    Approx(f64),
}

impl Magnitude {
    pub fn zero() -> Self {
        Magnitude::Exact(Rational::zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(q) => to_f64(q),
            Magnitude::Approx(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Magnitude::Exact(q) => Some(q),
            Magnitude::Approx(_) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Magnitude::Exact(q) if q.is_zero())
    }

    pub fn add(&self, other: &Magnitude) -> Magnitude {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => Magnitude::Exact(a + b),
            _ => Magnitude::Approx(self.to_f64() + other.to_f64()),
        }
    }
}

impl std::fmt::Display for Magnitude {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Magnitude::Exact(q) => write!(f, "{q}"),
            Magnitude::Approx(x) => write!(f, "~{x}"),
        }
    }
}

/// Half-open arc `[start, start + length)` on 𝕋 with `0 < length <= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Arc<T> {
    /// `[a, b)` read modulo 1; `b` may exceed 1 to wrap around.
    pub fn new(start: T, end: T) -> Self {
        Arc { start, end }
    }

    pub fn full() -> Self {
        Arc {
            start: T::zero(),
            end: T::one(),
        }
    }

    pub fn length(&self) -> T {
        self.end.clone() - self.start.clone()
    }
}

/// One box × fiber piece with a constant value.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece<T> {
    pub arcs: Vec<Arc<T>>,
    /// Mixed-radix indices of the finite elements covered.
    pub fiber: Vec<usize>,
    pub value: Complex<T>,
}

/// Finitely-piecewise-constant function on `𝕋^k × F` in grid normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction<T: Scalar> {
    group: CompactGroup,
    cuts: Vec<Vec<T>>,
    values: Vec<Complex<T>>,
}

/// Index of the cell of `cuts` containing `y ∈ [0, 1)`.
fn locate<T: Scalar>(cuts: &[T], y: &T) -> usize {
    cuts.partition_point(|c| c <= y).saturating_sub(1)
}

fn cell_bounds<T: Scalar>(cuts: &[T], i: usize) -> (T, T) {
    let hi = cuts.get(i + 1).cloned().unwrap_or_else(T::one);
    (cuts[i].clone(), hi)
}

fn sorted_unique<T: Scalar>(mut v: Vec<T>) -> Vec<T> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

/// Iterates over all multi-indices of a box of the given shape, last
/// coordinate fastest.
pub(crate) fn multi_indices(shape: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = shape.iter().product();
    (0..total).map(move |mut idx| {
        let mut out = vec![0; shape.len()];
        for (slot, &n) in out.iter_mut().zip(shape).rev() {
            *slot = idx % n;
            idx /= n;
        }
        out
    })
}

impl<T: Scalar> StepFunction<T> {
    pub fn constant(group: CompactGroup, c: Complex<T>) -> Self {
        let cuts = vec![vec![T::zero()]; group.torus_rank()];
        let values = vec![c; group.finite_order()];
        StepFunction { group, cuts, values }
    }

    pub fn zero(group: CompactGroup) -> Self {
        Self::constant(group, Complex::zero())
    }

    /// Builds a step function from pairwise disjoint pieces; uncovered
    /// points take the value 0.
    pub fn from_pieces(group: CompactGroup, pieces: &[Piece<T>]) -> Result<Self> {
        let k = group.torus_rank();
        let nf = group.finite_order();
        let mut cuts: Vec<Vec<T>> = vec![vec![T::zero()]; k];
        for p in pieces {
            if p.arcs.len() != k {
                return Err(Error::invalid(format!(
                    "piece has {} arcs, domain has rank {k}",
                    p.arcs.len()
                )));
            }
            if p.fiber.iter().any(|&u| u >= nf) {
                return Err(Error::invalid("fiber element outside the finite part"));
            }
            for (j, a) in p.arcs.iter().enumerate() {
                let len = a.length();
                if len <= T::zero() || len > T::one() {
                    return Err(Error::invalid("arc length must lie in (0, 1]"));
                }
                if len < T::one() {
                    cuts[j].push(a.start.frac());
                    cuts[j].push(a.end.frac());
                }
            }
        }
        let cuts: Vec<Vec<T>> = cuts.into_iter().map(sorted_unique).collect();
        let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
        let mut values = Vec::with_capacity(shape.iter().product::<usize>() * nf);
        for cell in multi_indices(&shape) {
            let mids: Vec<T> = cell
                .iter()
                .enumerate()
                .map(|(j, &i)| {
                    let (lo, hi) = cell_bounds(&cuts[j], i);
                    (lo + hi).half()
                })
                .collect();
            for u in 0..nf {
                let mut hit: Option<&Complex<T>> = None;
                for p in pieces {
                    if !p.fiber.contains(&u) {
                        continue;
                    }
                    let inside = p.arcs.iter().zip(&mids).all(|(a, m)| {
                        let t = (m.clone() - a.start.clone()).frac();
                        t < a.length() || a.length() >= T::one()
                    });
                    if inside {
                        if hit.is_some() {
                            return Err(Error::invalid("pieces overlap"));
                        }
                        hit = Some(&p.value);
                    }
                }
                values.push(hit.cloned().unwrap_or_else(Complex::zero));
            }
        }
        Ok(StepFunction {
            group,
            cuts,
            values,
        })
    }

    /// Indicator of a box on the identity fiber set `fiber`.
    pub fn indicator(group: CompactGroup, arcs: Vec<Arc<T>>, fiber: Vec<usize>) -> Result<Self> {
        Self::from_pieces(
            group,
            &[Piece {
                arcs,
                fiber,
                value: Complex::new(T::one(), T::zero()),
            }],
        )
    }

    /// Builds directly from grid data; `values` is laid out cell-major with
    /// the finite index fastest.
    pub fn from_grid(group: CompactGroup, cuts: Vec<Vec<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        if cuts.len() != group.torus_rank() {
            return Err(Error::invalid("cut list rank mismatch"));
        }
        for c in &cuts {
            if c.first() != Some(&T::zero()) {
                return Err(Error::invalid("cut lists must start at 0"));
            }
            if c.windows(2).any(|w| w[0] >= w[1]) || c.last().is_some_and(|x| *x >= T::one()) {
                return Err(Error::invalid("cuts must be strictly increasing in [0, 1)"));
            }
        }
        let cells: usize = cuts.iter().map(Vec::len).product();
        if values.len() != cells * group.finite_order() {
            return Err(Error::invalid("value count does not match the grid"));
        }
        Ok(StepFunction {
            group,
            cuts,
            values,
        })
    }

    pub fn group(&self) -> &CompactGroup {
        &self.group
    }

    pub fn cuts(&self) -> &[Vec<T>] {
        &self.cuts
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.cuts.iter().map(Vec::len).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    pub(crate) fn flat(&self, cell: &[usize], u: usize) -> usize {
        let mut idx = 0;
        for (j, &i) in cell.iter().enumerate() {
            idx = idx * self.cuts[j].len() + i;
        }
        idx * self.group.finite_order() + u
    }

    pub fn value_at(&self, cell: &[usize], u: usize) -> &Complex<T> {
        &self.values[self.flat(cell, u)]
    }

    pub fn cell_arcs(&self, cell: &[usize]) -> Vec<Arc<T>> {
        cell.iter()
            .enumerate()
            .map(|(j, &i)| {
                let (lo, hi) = cell_bounds(&self.cuts[j], i);
                Arc::new(lo, hi)
            })
            .collect()
    }

    pub fn cell_midpoint(&self, cell: &[usize]) -> Vec<T> {
        cell.iter()
            .enumerate()
            .map(|(j, &i)| {
                let (lo, hi) = cell_bounds(&self.cuts[j], i);
                (lo + hi).half()
            })
            .collect()
    }

    fn cell_volume(&self, cell: &[usize]) -> T {
        cell.iter().enumerate().fold(T::one(), |acc, (j, &i)| {
            let (lo, hi) = cell_bounds(&self.cuts[j], i);
            acc * (hi - lo)
        })
    }

    /// Non-zero cells as pieces, one per cell and fiber value.
    pub fn pieces(&self) -> Vec<Piece<T>> {
        let nf = self.group.finite_order();
        let shape = self.shape();
        let mut out = Vec::new();
        for cell in multi_indices(&shape) {
            let arcs = self.cell_arcs(&cell);
            // Group fiber elements by value.
            let mut groups: Vec<(Complex<T>, Vec<usize>)> = Vec::new();
            for u in 0..nf {
                let v = self.value_at(&cell, u);
                if v.is_zero() {
                    continue;
                }
                match groups.iter_mut().find(|(w, _)| w == v) {
                    Some((_, fib)) => fib.push(u),
                    None => groups.push((v.clone(), vec![u])),
                }
            }
            for (value, fiber) in groups {
                out.push(Piece {
                    arcs: arcs.clone(),
                    fiber,
                    value,
                });
            }
        }
        out
    }

    /// `f(x, u)` for torus coordinates `x` (any reals, read modulo 1).
    pub fn eval(&self, x: &[T], u: usize) -> Complex<T> {
        let cell: Vec<usize> = x
            .iter()
            .zip(&self.cuts)
            .map(|(xj, cuts)| locate(cuts, &xj.frac()))
            .collect();
        self.value_at(&cell, u).clone()
    }

    pub fn eval_f64(&self, x: &[f64], u: usize) -> Complex64 {
        let cell: Vec<usize> = x
            .iter()
            .zip(&self.cuts)
            .map(|(&xj, cuts)| {
                let y = xj.rem_euclid(1.0);
                cuts.partition_point(|c| c.to_f64() <= y).saturating_sub(1)
            })
            .collect();
        let v = self.value_at(&cell, u);
        Complex64::new(v.re.to_f64(), v.im.to_f64())
    }

    /// Re-grids onto a superset of the current cuts.
    pub fn regrid(&self, cuts: Vec<Vec<T>>) -> Self {
        let nf = self.group.finite_order();
        let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
        let mut values = Vec::with_capacity(shape.iter().product::<usize>() * nf);
        let tmp = StepFunction {
            group: self.group.clone(),
            cuts,
            values: Vec::new(),
        };
        for cell in multi_indices(&shape) {
            let mid = tmp.cell_midpoint(&cell);
            let old: Vec<usize> = mid
                .iter()
                .zip(&self.cuts)
                .map(|(m, c)| locate(c, m))
                .collect();
            for u in 0..nf {
                values.push(self.value_at(&old, u).clone());
            }
        }
        StepFunction {
            group: self.group.clone(),
            cuts: tmp.cuts,
            values,
        }
    }

    fn union_cuts(&self, other: &Self) -> Vec<Vec<T>> {
        self.cuts
            .iter()
            .zip(&other.cuts)
            .map(|(a, b)| sorted_unique(a.iter().chain(b).cloned().collect()))
            .collect()
    }

    /// Pointwise combination on the common refinement.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&Complex<T>, &Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::DomainMismatch);
        }
        let cuts = self.union_cuts(other);
        let a = self.regrid(cuts.clone());
        let b = other.regrid(cuts);
        let values = a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect();
        Ok(StepFunction {
            group: a.group,
            cuts: a.cuts,
            values,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn map_values(&self, f: impl Fn(&Complex<T>) -> Complex<T>) -> Self {
        StepFunction {
            group: self.group.clone(),
            cuts: self.cuts.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// `∫ f dμ` for the normalized Haar measure.
    pub fn haar_integral(&self) -> Complex<T> {
        let nf = self.group.finite_order();
        let shape = self.shape();
        let mut total: Complex<T> = Complex::zero();
        for cell in multi_indices(&shape) {
            let vol = self.cell_volume(&cell);
            let mut s: Complex<T> = Complex::zero();
            for u in 0..nf {
                s = s + self.value_at(&cell, u).clone();
            }
            total = total + s * vol;
        }
        let n = (0..nf).fold(T::zero(), |acc, _| acc + T::one());
        total / n
    }

    /// `∫ |f| dμ`.
    pub fn l1_norm(&self) -> Magnitude {
        let nf = self.group.finite_order();
        let n = (0..nf).fold(T::zero(), |acc, _| acc + T::one());
        let shape = self.shape();
        let mut total = Magnitude::zero();
        for cell in multi_indices(&shape) {
            let w = self.cell_volume(&cell) / n.clone();
            for u in 0..nf {
                total = total.add(&T::weighted_norm(self.value_at(&cell, u), &w));
            }
        }
        total
    }

    /// `‖f − g‖₁` via the common refinement.
    pub fn l1_distance(&self, other: &Self) -> Result<Magnitude> {
        Ok(self.sub(other)?.l1_norm())
    }

    /// `τ_x f : y ↦ f(y + x)`.
    pub fn translate(&self, x: &[T], du: usize) -> Self {
        let cuts: Vec<Vec<T>> = self
            .cuts
            .iter()
            .zip(x)
            .map(|(c, xj)| {
                let mut v: Vec<T> = c.iter().map(|ci| (ci.clone() - xj.clone()).frac()).collect();
                v.push(T::zero());
                sorted_unique(v)
            })
            .collect();
        let nf = self.group.finite_order();
        let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
        let tmp = StepFunction {
            group: self.group.clone(),
            cuts,
            values: Vec::new(),
        };
        let mut values = Vec::with_capacity(shape.iter().product::<usize>() * nf);
        for cell in multi_indices(&shape) {
            let shifted: Vec<T> = tmp
                .cell_midpoint(&cell)
                .into_iter()
                .zip(x)
                .map(|(m, xj)| m + xj.clone())
                .collect();
            for u in 0..nf {
                let v = self.group.combine(u, du, false);
                values.push(self.eval(&shifted, v));
            }
        }
        StepFunction {
            group: self.group.clone(),
            cuts: tmp.cuts,
            values,
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| Complex64::new(v.re.to_f64(), v.im.to_f64()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether cut `i` of coordinate `j` separates different values. Cut 0
    /// compares the last cell with the first (wrap-around).
    pub fn is_essential_cut(&self, j: usize, i: usize) -> bool {
        let n = self.cuts[j].len();
        if n == 1 {
            return false;
        }
        let prev = if i == 0 { n - 1 } else { i - 1 };
        let mut shape = self.shape();
        shape[j] = 1;
        let nf = self.group.finite_order();
        for mut cell in multi_indices(&shape) {
            for u in 0..nf {
                cell[j] = prev;
                let a = self.value_at(&cell, u).clone();
                cell[j] = i;
                if *self.value_at(&cell, u) != a {
                    return true;
                }
            }
        }
        false
    }

    /// Cut points of coordinate `j` across which the function jumps.
    pub fn essential_cuts(&self, j: usize) -> Vec<T> {
        (0..self.cuts[j].len())
            .filter(|&i| self.is_essential_cut(j, i))
            .map(|i| self.cuts[j][i].clone())
            .collect()
    }

    /// Removes cuts (other than 0) that separate equal values.
    pub fn simplify(&self) -> Self {
        let cuts: Vec<Vec<T>> = (0..self.cuts.len())
            .map(|j| {
                let mut keep = vec![T::zero()];
                for i in 1..self.cuts[j].len() {
                    if self.is_essential_cut(j, i) {
                        keep.push(self.cuts[j][i].clone());
                    }
                }
                keep
            })
            .collect();
        self.regrid_coarser(cuts)
    }

    /// Re-grids onto a subset of the cuts; only valid when the removed cuts
    /// are inessential.
    fn regrid_coarser(&self, cuts: Vec<Vec<T>>) -> Self {
        let nf = self.group.finite_order();
        let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
        let mut values = Vec::with_capacity(shape.iter().product::<usize>() * nf);
        for cell in multi_indices(&shape) {
            let lows: Vec<T> = cell.iter().enumerate().map(|(j, &i)| cuts[j][i].clone()).collect();
            let old: Vec<usize> = lows.iter().zip(&self.cuts).map(|(m, c)| locate(c, m)).collect();
            for u in 0..nf {
                values.push(self.value_at(&old, u).clone());
            }
        }
        StepFunction {
            group: self.group.clone(),
            cuts,
            values,
        }
    }

    /// Equality almost everywhere.
    pub fn ae_eq(&self, other: &Self) -> bool {
        self.group == other.group && self.simplify().values_eq_on_union(&other.simplify())
    }

    fn values_eq_on_union(&self, other: &Self) -> bool {
        let cuts = self.union_cuts(other);
        self.regrid(cuts.clone()).values == other.regrid(cuts).values
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.is_zero())
    }

    /// Whether the function does not depend on torus coordinate `j`.
    pub fn is_constant_in(&self, j: usize) -> bool {
        (0..self.cuts[j].len()).all(|i| !self.is_essential_cut(j, i))
    }
}

impl StepFunction<Rational> {
    pub fn to_float(&self) -> StepFunction<f64> {
        StepFunction {
            group: self.group.clone(),
            cuts: self
                .cuts
                .iter()
                .map(|c| c.iter().map(to_f64).collect())
                .collect(),
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(to_f64(&v.re), to_f64(&v.im)))
                .collect(),
        }
    }

    /// Translation by a point of the domain: exact for rational points,
    /// floating otherwise.
    pub fn translate_point(&self, x: &Point) -> AnyStep {
        let du = self.group.index(&x.finite);
        match x.rational_coords() {
            Some(q) => AnyStep::Exact(self.translate(&q, du)),
            None => AnyStep::Approx(self.to_float().translate(&x.float_coords(), du)),
        }
    }

    /// `f(x)` at an exact or floating point; exact comparisons against the
    /// rational cuts are used for exact coordinates.
    pub fn eval_point(&self, x: &Point) -> Complex64 {
        let u = self.group.index(&x.finite);
        let cell: Vec<usize> = x
            .torus
            .iter()
            .zip(&self.cuts)
            .map(|(a, cuts)| match a {
                Angle::Exact(_) => cuts
                    .partition_point(|c| a.cmp_rational(c) != Ordering::Less)
                    .saturating_sub(1),
                Angle::Float { value, .. } => cuts
                    .partition_point(|c| to_f64(c) <= *value)
                    .saturating_sub(1),
            })
            .collect();
        let v = self.value_at(&cell, u);
        Complex64::new(to_f64(&v.re), to_f64(&v.im))
    }
}

/// A step function on either the exact or the floating path.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyStep {
    Exact(StepFunction<Rational>),
    Approx(StepFunction<f64>),
}

impl AnyStep {
    pub fn to_float(&self) -> StepFunction<f64> {
        match self {
            AnyStep::Exact(f) => f.to_float(),
            AnyStep::Approx(f) => f.clone(),
        }
    }
}

/// `‖f − τ_x f‖₁`-style distance between an exact function and a step
/// function on either path.
pub fn l1_distance_any(f: &StepFunction<Rational>, g: &AnyStep) -> Result<Magnitude> {
    match g {
        AnyStep::Exact(g) => f.l1_distance(g),
        AnyStep::Approx(g) => f.to_float().l1_distance(g),
    }
}

/// Frequency of a character of `𝕋^k × ℤ/n_1 × …`: integer torus
/// frequencies and one residue per cyclic factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Frequency {
    pub torus: Vec<i64>,
    pub finite: Vec<u64>,
}

impl Frequency {
    pub fn new(torus: Vec<i64>, finite: Vec<u64>) -> Self {
        Frequency { torus, finite }
    }

    pub fn zero(group: &CompactGroup) -> Self {
        Frequency {
            torus: vec![0; group.torus_rank()],
            finite: vec![0; group.finite_part().len()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.torus.iter().all(|&m| m == 0) && self.finite.iter().all(|&j| j == 0)
    }

    /// Phase `m·x + Σ j_i u_i / n_i` in turns, reduced modulo 1.
    pub fn phase(&self, group: &CompactGroup, x: &[f64], u: &[u64]) -> f64 {
        let mut t = 0.0;
        for (&m, &xj) in self.torus.iter().zip(x) {
            t += (m as f64 * xj).rem_euclid(1.0);
        }
        for ((&j, &ui), &n) in self.finite.iter().zip(u).zip(group.finite_part()) {
            t += ((j * ui) % n) as f64 / n as f64;
        }
        t.rem_euclid(1.0)
    }
}

/// Finite sum `Σ c_m χ_m` of characters of `𝕋^k × F`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial<T: Scalar> {
    group: CompactGroup,
    terms: BTreeMap<Frequency, Complex<T>>,
}

impl<T: Scalar> TrigPolynomial<T> {
    pub fn new(group: CompactGroup) -> Self {
        TrigPolynomial {
            group,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(group: CompactGroup, terms: impl IntoIterator<Item = (Frequency, Complex<T>)>) -> Result<Self> {
        let mut p = Self::new(group);
        for (f, c) in terms {
            p.add_term(f, c)?;
        }
        Ok(p)
    }

    pub fn add_term(&mut self, f: Frequency, c: Complex<T>) -> Result<()> {
        if f.torus.len() != self.group.torus_rank() || f.finite.len() != self.group.finite_part().len() {
            return Err(Error::invalid("frequency does not match the domain"));
        }
        let f = Frequency {
            torus: f.torus,
            finite: f
                .finite
                .iter()
                .zip(self.group.finite_part())
                .map(|(&j, &n)| j % n)
                .collect(),
        };
        let slot = self.terms.entry(f.clone()).or_insert_with(Complex::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&f);
        }
        Ok(())
    }

    pub fn group(&self) -> &CompactGroup {
        &self.group
    }

    pub fn terms(&self) -> &BTreeMap<Frequency, Complex<T>> {
        &self.terms
    }

    pub fn coefficient(&self, f: &Frequency) -> Complex<T> {
        self.terms.get(f).cloned().unwrap_or_else(Complex::zero)
    }

    /// Value at a torus point `x` and finite element `u` (as residues).
    pub fn eval(&self, x: &[f64], u: &[u64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(f, c)| {
                let (s, co) = (std::f64::consts::TAU * f.phase(&self.group, x, u)).sin_cos();
                Complex64::new(c.re.to_f64(), c.im.to_f64()) * Complex64::new(co, s)
            })
            .sum()
    }

    pub fn eval_index(&self, x: &[f64], u: usize) -> Complex64 {
        self.eval(x, &self.group.element(u))
    }

    /// Maximum absolute torus frequency.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|f| f.torus.iter().map(|m| m.abs()))
            .max()
            .unwrap_or(0)
    }

    /// `Σ |c_m|`, an upper bound for the sup norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms
            .values()
            .map(|c| Complex64::new(c.re.to_f64(), c.im.to_f64()).norm())
            .sum()
    }

    pub fn to_float(&self) -> TrigPolynomial<f64> {
        TrigPolynomial {
            group: self.group.clone(),
            terms: self
                .terms
                .iter()
                .map(|(f, c)| (f.clone(), Complex64::new(c.re.to_f64(), c.im.to_f64())))
                .collect(),
        }
    }

    /// The constant coefficient, which is the Haar integral.
    pub fn haar_integral(&self) -> Complex<T> {
        self.coefficient(&Frequency::zero(&self.group))
    }
}

/// Continuous piecewise-linear witness built from ramped boxes.
#[derive(Clone, Debug)]
pub struct RampFunction {
    group: CompactGroup,
    delta: Rational,
    /// `(cell arcs, fiber element, value, inner ramp?)`.
    terms: Vec<(Vec<Arc<Rational>>, usize, Rational, bool)>,
}

fn ramp_eval(arc: &Arc<Rational>, delta: f64, inner: bool, x: f64) -> f64 {
    let a = to_f64(&arc.start);
    let len = to_f64(&arc.length());
    if len >= 1.0 {
        return 1.0;
    }
    let t = (x - a).rem_euclid(1.0);
    if inner {
        if t >= len {
            return 0.0;
        }
        (t.min(len - t) / delta).min(1.0)
    } else {
        if t < len {
            return 1.0;
        }
        let s = (t - len).min(1.0 - t);
        (1.0 - s / delta).max(0.0)
    }
}

fn ramp_integral(len: &Rational, delta: &Rational, inner: bool) -> Rational {
    let one = Rational::one();
    if *len >= one {
        return one;
    }
    let four = Rational::from_integer(BigInt::from(4));
    let two_delta = delta * Rational::from_integer(BigInt::from(2));
    if inner {
        if *len >= two_delta {
            len - delta
        } else {
            len * len / (&four * delta)
        }
    } else {
        let gap = &one - len;
        if gap >= two_delta {
            len + delta
        } else {
            len + &gap - &gap * &gap / (&four * delta)
        }
    }
}

impl RampFunction {
    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn eval(&self, x: &[f64], u: usize) -> f64 {
        let d = to_f64(&self.delta);
        self.terms
            .iter()
            .filter(|(_, fu, _, _)| *fu == u)
            .map(|(arcs, _, v, inner)| {
                let w: f64 = arcs
                    .iter()
                    .zip(x)
                    .map(|(a, &xj)| ramp_eval(a, d, *inner, xj))
                    .product();
                to_f64(v) * w
            })
            .sum()
    }

    /// Exact Haar integral.
    pub fn integral(&self) -> Rational {
        let nf = Rational::from_integer(BigInt::from(self.group.finite_order()));
        self.terms
            .iter()
            .map(|(arcs, _, v, inner)| {
                let w = arcs
                    .iter()
                    .fold(Rational::one(), |acc, a| acc * ramp_integral(&a.length(), &self.delta, *inner));
                v * w
            })
            .fold(Rational::zero(), |acc, t| acc + t)
            / nf
    }
}

/// Continuous minorant and majorant of a real step function.
#[derive(Clone, Debug)]
pub struct Sandwich {
    pub lower: RampFunction,
    pub upper: RampFunction,
    /// `∫ (upper − lower)`, exact.
    pub gap: Rational,
}

/// Continuous `g ≤ f ≤ h` with `∫(h − g) < eps`, using ramps of width
/// `eps / (4 k P max|v|)` on every cell edge (`P` cells).
pub fn sandwich(f: &StepFunction<Rational>, eps: &Rational) -> Result<Sandwich> {
    if !eps.is_positive() {
        return Err(Error::invalid("eps must be positive"));
    }
    if !f.is_real() {
        return Err(Error::invalid("sandwich witnesses need a real-valued step function"));
    }
    let f = f.simplify();
    let k = f.group().torus_rank();
    let cells = f.cell_count();
    let max_v = f
        .values()
        .iter()
        .map(|v| v.re.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let delta = if k == 0 || max_v.is_zero() {
        Rational::zero()
    } else {
        eps / (Rational::from_integer(BigInt::from(4 * k * cells)) * &max_v)
    };
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let nf = f.group().finite_order();
    for cell in multi_indices(&f.shape()) {
        let arcs = f.cell_arcs(&cell);
        for u in 0..nf {
            let v = f.value_at(&cell, u).re.clone();
            if v.is_zero() {
                continue;
            }
            let pos = v.is_positive();
            lower.push((arcs.clone(), u, v.clone(), pos));
            upper.push((arcs.clone(), u, v, !pos));
        }
    }
    let delta_eff = if delta.is_zero() { Rational::one() } else { delta.clone() };
    let lower = RampFunction {
        group: f.group().clone(),
        delta: delta_eff.clone(),
        terms: lower,
    };
    let upper = RampFunction {
        group: f.group().clone(),
        delta: delta_eff,
        terms: upper,
    };
    let gap = if delta.is_zero() {
        Rational::zero()
    } else {
        upper.integral() - lower.integral()
    };
    Ok(Sandwich { lower, upper, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn one() -> Complex<Rational> {
        Complex::new(int(1), int(0))
    }

    fn arc(a: (i64, i64), b: (i64, i64)) -> Arc<Rational> {
        Arc::new(ratio(a.0, a.1), ratio(b.0, b.1))
    }

    fn t1() -> CompactGroup {
        CompactGroup::torus(1)
    }

    #[test]
    fn haar_examples() {
        let f = StepFunction::indicator(t1(), vec![arc((0, 1), (1, 3))], vec![0]).unwrap();
        assert_eq!(f.haar_integral(), Complex::new(ratio(1, 3), int(0)));
        let g = CompactGroup::new(2, vec![2]).unwrap();
        let c = StepFunction::constant(g, one());
        assert_eq!(c.haar_integral(), one());
        let sq = StepFunction::indicator(
            CompactGroup::torus(2),
            vec![arc((0, 1), (1, 2)), arc((0, 1), (1, 2))],
            vec![0],
        )
        .unwrap();
        assert_eq!(sq.haar_integral(), Complex::new(ratio(1, 4), int(0)));
    }

    #[test]
    fn translate_examples() {
        let f = StepFunction::indicator(t1(), vec![arc((0, 1), (1, 3))], vec![0]).unwrap();
        let g = f.translate(&[ratio(1, 3)], 0);
        let expect = StepFunction::indicator(t1(), vec![arc((2, 3), (1, 1))], vec![0]).unwrap();
        assert!(g.ae_eq(&expect));
        assert!(f.translate(&[int(0)], 0).ae_eq(&f));
        let x = ratio(2, 7);
        let back = f.translate(&[x.clone()], 0).translate(&[int(1) - x], 0);
        assert!(back.ae_eq(&f));
    }

    #[test]
    fn l1_examples() {
        let f = StepFunction::indicator(t1(), vec![arc((0, 1), (1, 3))], vec![0]).unwrap();
        let g = StepFunction::indicator(t1(), vec![arc((1, 3), (2, 3))], vec![0]).unwrap();
        assert_eq!(f.l1_distance(&f).unwrap(), Magnitude::zero());
        assert_eq!(f.l1_distance(&g).unwrap(), Magnitude::Exact(ratio(2, 3)));
        let t = f.translate(&[ratio(1, 10)], 0);
        assert_eq!(f.l1_distance(&t).unwrap(), Magnitude::Exact(ratio(1, 5)));
    }

    #[test]
    fn wrapping_arc() {
        let f = StepFunction::indicator(t1(), vec![arc((5, 6), (7, 6))], vec![0]).unwrap();
        assert_eq!(f.haar_integral().re, ratio(1, 3));
        assert_eq!(f.eval(&[ratio(1, 12)], 0), one());
        assert_eq!(f.eval(&[ratio(1, 2)], 0), Complex::zero());
        assert_eq!(f.essential_cuts(0), vec![ratio(1, 6), ratio(5, 6)]);
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let p = Piece {
            arcs: vec![arc((0, 1), (1, 2))],
            fiber: vec![0],
            value: one(),
        };
        let q = Piece {
            arcs: vec![arc((1, 3), (2, 3))],
            fiber: vec![0],
            value: one(),
        };
        assert!(StepFunction::from_pieces(t1(), &[p, q]).is_err());
    }

    #[test]
    fn fiber_translation_permutes() {
        let g = CompactGroup::new(1, vec![2]).unwrap();
        let f = StepFunction::indicator(g, vec![arc((0, 1), (1, 2))], vec![0]).unwrap();
        let t = f.translate(&[int(0)], 1);
        assert_eq!(t.eval(&[ratio(1, 4)], 1), one());
        assert_eq!(t.eval(&[ratio(1, 4)], 0), Complex::zero());
    }

    #[test]
    fn sandwich_examples() {
        let c = StepFunction::constant(t1(), Complex::new(ratio(3, 2), int(0)));
        let s = sandwich(&c, &ratio(1, 10)).unwrap();
        assert!(s.gap.is_zero());
        let f = StepFunction::indicator(t1(), vec![arc((0, 1), (1, 3))], vec![0]).unwrap();
        let s = sandwich(&f, &ratio(1, 10)).unwrap();
        assert!(s.lower.delta() < &ratio(1, 40));
        assert!(s.gap <= int(2) * s.lower.delta());
        assert!(s.gap < ratio(1, 10));
        // Numerical integration of the gap with the midpoint rule; the
        // integrand is piecewise linear with rational kinks.
        let n = 1 << 16;
        let num: f64 = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) / n as f64;
                s.upper.eval(&[x], 0) - s.lower.eval(&[x], 0)
            })
            .sum::<f64>()
            / n as f64;
        assert!((num - to_f64(&s.gap)).abs() < 1e-6);
    }

    #[test]
    fn trig_eval() {
        let g = CompactGroup::new(1, vec![3]).unwrap();
        let mut p = TrigPolynomial::<Rational>::new(g);
        p.add_term(Frequency::new(vec![1], vec![0]), one()).unwrap();
        p.add_term(Frequency::new(vec![0], vec![1]), one()).unwrap();
        let v = p.eval(&[0.25], &[1]);
        let expect = Complex64::new(0.0, 1.0) + Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        assert!((v - expect).norm() < 1e-14);
    }
}
