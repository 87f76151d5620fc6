//! Bounded sequences on ℤ: realized Hartman functions `φ = φ* ∘ ι_Γ`,
//! sampled windows, the named example families, and CSV I/O.

use std::cmp::Ordering;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::{Complex, Complex64};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::angle::{mul_turns, Angle, CompactGroup, Point};
use crate::error::{Error, Result};
use crate::group::{induce_compactification, Compactification, Membership, SpectralSubgroup};
use crate::rational::{frac, ratio, to_f64, Rational};
use crate::step::{Arc, Frequency, Piece, StepFunction, TrigPolynomial};

/// A realization `φ*` on the torus-times-finite group of a compactification.
#[derive(Clone, Debug)]
pub enum Realization {
    Step(StepFunction<Rational>),
    Trig(TrigPolynomial<Rational>),
    /// Floating coefficients, as produced by synthesis from estimates.
    TrigApprox(TrigPolynomial<f64>),
}

impl Realization {
    pub fn group(&self) -> &CompactGroup {
        match self {
            Realization::Step(f) => f.group(),
            Realization::Trig(p) => p.group(),
            Realization::TrigApprox(p) => p.group(),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Realization::TrigApprox(_))
    }

    pub fn eval_point(&self, x: &Point) -> Complex64 {
        match self {
            Realization::Step(f) => f.eval_point(x),
            Realization::Trig(p) => p.eval(&x.float_coords(), &x.finite),
            Realization::TrigApprox(p) => p.eval(&x.float_coords(), &x.finite),
        }
    }

    /// An upper bound for `sup |φ*|`, attained for step functions.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Realization::Step(f) => f.sup_abs(),
            Realization::Trig(p) => p.coefficient_l1(),
            Realization::TrigApprox(p) => p.coefficient_l1(),
        }
    }
}

/// A bounded function on ℤ.
#[derive(Clone, Debug)]
pub enum HartmanFunction {
    Realized {
        realization: Realization,
        comp: Compactification,
    },
    /// Values at `n = −radius, …, radius`.
    Sampled { radius: i64, values: Vec<Complex64> },
}

impl HartmanFunction {
    pub fn realized(realization: Realization, comp: Compactification) -> Result<Self> {
        if realization.group() != comp.group() {
            return Err(Error::DomainMismatch);
        }
        Ok(HartmanFunction::Realized { realization, comp })
    }

    /// Wraps a symmetric window; `values.len()` must be odd.
    pub fn sampled(values: Vec<Complex64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return Err(Error::invalid("a symmetric window has an odd number of samples"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("samples must be finite"));
        }
        let radius = (values.len() / 2) as i64;
        Ok(HartmanFunction::Sampled { radius, values })
    }

    /// Window radius of a sampled function; `None` when realized.
    pub fn radius(&self) -> Option<i64> {
        match self {
            HartmanFunction::Realized { .. } => None,
            HartmanFunction::Sampled { radius, .. } => Some(*radius),
        }
    }

    pub fn compactification(&self) -> Option<&Compactification> {
        match self {
            HartmanFunction::Realized { comp, .. } => Some(comp),
            HartmanFunction::Sampled { .. } => None,
        }
    }

    pub fn realization(&self) -> Option<&Realization> {
        match self {
            HartmanFunction::Realized { realization, .. } => Some(realization),
            HartmanFunction::Sampled { .. } => None,
        }
    }

    /// `sup |φ|`, or an upper bound for trigonometric realizations.
    pub fn sup_bound(&self) -> f64 {
        match self {
            HartmanFunction::Realized { realization, .. } => realization.sup_bound(),
            HartmanFunction::Sampled { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }

    /// Fails with [`Error::InsufficientWindow`] unless `[−radius, radius]`
    /// is available.
    pub fn require_radius(&self, radius: i64) -> Result<()> {
        match self.radius() {
            Some(r) if r < radius => Err(Error::InsufficientWindow {
                needed: radius,
                available: r,
            }),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, n: i64) -> Result<Complex64> {
        match self {
            HartmanFunction::Realized { realization, comp } => Ok(Sampler::new(realization, comp)?.value(n)),
            HartmanFunction::Sampled { radius, values } => {
                if n.abs() > *radius {
                    return Err(Error::OutOfWindow { index: n, radius: *radius });
                }
                Ok(values[(n + radius) as usize])
            }
        }
    }

    /// Values at `lo..=hi`.
    pub fn sample(&self, lo: i64, hi: i64) -> Result<Vec<Complex64>> {
        if hi < lo {
            return Ok(Vec::new());
        }
        match self {
            HartmanFunction::Realized { realization, comp } => {
                let s = Sampler::new(realization, comp)?;
                Ok((lo..=hi).into_par_iter().map(|n| s.value(n)).collect())
            }
            HartmanFunction::Sampled { radius, values } => {
                for n in [lo, hi] {
                    if n.abs() > *radius {
                        return Err(Error::OutOfWindow { index: n, radius: *radius });
                    }
                }
                Ok(values[(lo + radius) as usize..=(hi + radius) as usize].to_vec())
            }
        }
    }

    /// Values at `−radius..=radius`.
    pub fn window(&self, radius: i64) -> Result<Vec<Complex64>> {
        self.require_radius(radius)?;
        self.sample(-radius, radius)
    }

    pub fn to_sampled(&self, radius: i64) -> Result<HartmanFunction> {
        HartmanFunction::sampled(self.window(radius)?)
    }

    /// Writes `n,re,im` lines with a header.
    pub fn write_csv<W: Write>(&self, radius: i64, out: W) -> Result<()> {
        write_csv(&self.window(radius)?, radius, out)
    }

    pub fn save_csv(&self, radius: i64, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(radius, std::io::BufWriter::new(f))
    }

    pub fn load_csv(path: &Path) -> Result<HartmanFunction> {
        read_csv(std::fs::File::open(path)?)
    }
}

pub fn write_csv<W: Write>(values: &[Complex64], radius: i64, out: W) -> Result<()> {
    if values.len() as i64 != 2 * radius + 1 {
        return Err(Error::invalid("window length does not match the radius"));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "re", "im"])?;
    for (i, v) in values.iter().enumerate() {
        let n = i as i64 - radius;
        w.write_record([n.to_string(), v.re.to_string(), v.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `n,re,im` lines (optional header) covering a contiguous symmetric
/// window.
pub fn read_csv<R: Read>(input: R) -> Result<HartmanFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut values = Vec::new();
    let mut first: Option<i64> = None;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if line == 0 && rec.get(0).is_some_and(|s| s.parse::<i64>().is_err()) {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::invalid(format!("line {}: expected n,re,im", line + 1)));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("line {}: bad number {:?}", line + 1, &rec[i])))
        };
        let n: i64 = rec[0]
            .parse()
            .map_err(|_| Error::invalid(format!("line {}: bad index {:?}", line + 1, &rec[0])))?;
        let start = *first.get_or_insert(n);
        if n != start + values.len() as i64 {
            return Err(Error::invalid(format!(
                "line {}: index {n} breaks contiguity (expected {})",
                line + 1,
                start + values.len() as i64
            )));
        }
        values.push(Complex64::new(parse(1)?, parse(2)?));
    }
    let Some(start) = first else {
        return Err(Error::invalid("empty sequence file"));
    };
    let end = start + values.len() as i64 - 1;
    if start != -end {
        return Err(Error::invalid(format!("window [{start}, {end}] is not symmetric")));
    }
    HartmanFunction::sampled(values)
}

/// Torus coordinate `n h mod 1` of the embedding.
#[derive(Debug)]
enum Coord {
    /// `h = p/q`, evaluated with integer residues.
    Rational { p: i128, q: i128 },
    /// `h ≈ hi + lo`; `exact` is kept for points close to a cut.
    Irrational { hi: f64, lo: f64, exact: Option<Angle> },
}

impl Coord {
    fn new(h: &Angle) -> Result<Coord> {
        if let Some(q) = h.as_rational() {
            let p = q.numer().to_i128();
            let d = q.denom().to_i128();
            if let (Some(p), Some(q)) = (p, d) {
                if q < (1i128 << 62) {
                    return Ok(Coord::Rational { p, q });
                }
            }
            return Err(Error::Overflow("rational generator denominator"));
        }
        Ok(match h {
            Angle::Exact(s) => {
                let (hi, lo) = s.to_f64_pair();
                Coord::Irrational {
                    hi,
                    lo,
                    exact: Some(h.clone()),
                }
            }
            Angle::Float { value, .. } => Coord::Irrational {
                hi: *value,
                lo: 0.0,
                exact: None,
            },
        })
    }

    /// Residue `a` with `n h ≡ a/q` for rational generators.
    fn residue(p: i128, q: i128, n: i64) -> i128 {
        ((n as i128).rem_euclid(q) * p).rem_euclid(q)
    }

    /// `n h mod 1` to about `1e-16` absolute accuracy.
    fn approx(&self, n: i64) -> f64 {
        match self {
            Coord::Rational { p, q } => Self::residue(*p, *q, n) as f64 / *q as f64,
            Coord::Irrational { hi, lo, .. } => mul_turns((*hi, *lo), n),
        }
    }
}

/// Locates `x = n h mod 1` among rational cut points; exact for exact `h`.
#[derive(Debug)]
struct Locator {
    coord: Coord,
    cuts_f: Vec<f64>,
    /// `(num, den)` pairs, present when all fit in `i64`.
    cuts_i: Option<Vec<(i128, i128)>>,
    cuts_q: Vec<Rational>,
}

/// Margin below which a floating location is re-checked exactly.
const CUT_MARGIN: f64 = 1e-13;

impl Locator {
    fn new(coord: Coord, cuts: &[Rational]) -> Locator {
        let cuts_i = cuts
            .iter()
            .map(|c| Some((c.numer().to_i64()? as i128, c.denom().to_i64()? as i128)))
            .collect();
        Locator {
            coord,
            cuts_f: cuts.iter().map(to_f64).collect(),
            cuts_i,
            cuts_q: cuts.to_vec(),
        }
    }

    fn cell(&self, n: i64) -> usize {
        match &self.coord {
            Coord::Rational { p, q } => {
                let a = Coord::residue(*p, *q, n);
                if let Some(ci) = &self.cuts_i {
                    if q.checked_mul(1 << 62).is_some() {
                        return ci.partition_point(|(cn, cd)| cn * q <= a * cd).saturating_sub(1);
                    }
                }
                let x = Rational::new(a.into(), (*q).into());
                self.cuts_q.partition_point(|c| *c <= x).saturating_sub(1)
            }
            Coord::Irrational { exact, .. } => {
                let x = self.coord.approx(n);
                let i = self.cuts_f.partition_point(|&c| c <= x).saturating_sub(1);
                let lower = self.cuts_f[i];
                let upper = self.cuts_f.get(i + 1).copied().unwrap_or(1.0);
                let near = x - lower < CUT_MARGIN || upper - x < CUT_MARGIN || x < CUT_MARGIN;
                match exact {
                    Some(h) if near => {
                        let y = h.mul_int(n);
                        self.cuts_q
                            .partition_point(|c| y.cmp_rational(c) != Ordering::Less)
                            .saturating_sub(1)
                    }
                    _ => i,
                }
            }
        }
    }
}

/// Fast evaluation of `φ*(ι(n))` for many `n`.
struct Sampler<'a> {
    realization: &'a Realization,
    torsion: i64,
    coords: Vec<Coord>,
    locators: Vec<Locator>,
    /// Values over `ℤ/L` when the torus part is trivial.
    table: Option<Vec<Complex64>>,
}

impl<'a> Sampler<'a> {
    fn new(realization: &'a Realization, comp: &Compactification) -> Result<Sampler<'a>> {
        let gens = comp.free_generators();
        let torsion = comp.torsion_order() as i64;
        let mut s = Sampler {
            realization,
            torsion,
            coords: Vec::new(),
            locators: Vec::new(),
            table: None,
        };
        match realization {
            Realization::Step(f) => {
                for (h, cuts) in gens.iter().zip(f.cuts()) {
                    s.locators.push(Locator::new(Coord::new(h)?, cuts));
                }
            }
            Realization::Trig(_) | Realization::TrigApprox(_) => {
                for h in &gens {
                    s.coords.push(Coord::new(h)?);
                }
                let terms = match realization {
                    Realization::Trig(p) => p.terms().len(),
                    Realization::TrigApprox(p) => p.terms().len(),
                    Realization::Step(_) => 0,
                };
                if gens.is_empty() && (torsion as u128) * (terms as u128) <= 50_000_000 {
                    let table = (0..torsion).map(|u| s.trig_value(&[], u)).collect();
                    s.table = Some(table);
                }
            }
        }
        Ok(s)
    }

    fn finite(&self, n: i64) -> Vec<u64> {
        if self.torsion > 1 {
            vec![n.rem_euclid(self.torsion) as u64]
        } else {
            vec![]
        }
    }

    fn trig_value(&self, x: &[f64], u: i64) -> Complex64 {
        let fin = if self.torsion > 1 { vec![u as u64] } else { vec![] };
        match self.realization {
            Realization::Trig(p) => p.eval(x, &fin),
            Realization::TrigApprox(p) => p.eval(x, &fin),
            Realization::Step(_) => unreachable!("trig evaluation of a step realization"),
        }
    }

    fn value(&self, n: i64) -> Complex64 {
        let u = if self.torsion > 1 { n.rem_euclid(self.torsion) } else { 0 };
        match self.realization {
            Realization::Step(f) => {
                let cell: Vec<usize> = self.locators.iter().map(|l| l.cell(n)).collect();
                let v = f.value_at(&cell, f.group().index(&self.finite(n)));
                Complex64::new(to_f64(&v.re), to_f64(&v.im))
            }
            _ => {
                if let Some(t) = &self.table {
                    return t[u as usize];
                }
                let x: Vec<f64> = self.coords.iter().map(|c| c.approx(n)).collect();
                self.trig_value(&x, u)
            }
        }
    }
}

fn one() -> Complex<Rational> {
    Complex::new(Rational::one(), Rational::zero())
}

/// Coordinates `(m, t)` of an element of Γ, or an error if the
/// compactification does not contain it.
fn coordinates_in(comp: &Compactification, alpha: &Angle) -> Result<(Vec<i64>, u64)> {
    match comp.membership(alpha)?.0 {
        Membership::Member { coords, torsion } => Ok((coords, torsion)),
        Membership::NotMember => Err(Error::invalid(format!("{alpha} is not in the subgroup"))),
    }
}

pub(crate) fn frequency_of(comp: &Compactification, alpha: &Angle) -> Result<Frequency> {
    let (m, t) = coordinates_in(comp, alpha)?;
    let finite = if comp.torsion_order() > 1 { vec![t] } else { vec![] };
    Ok(Frequency::new(m, finite))
}

/// `Σ c_j e^{2πi n α_j}` realized as a trigonometric polynomial on `comp`,
/// which must contain every `α_j`.
pub fn trig_sequence_on(comp: Compactification, terms: &[(Angle, Complex<Rational>)]) -> Result<HartmanFunction> {
    let mut p = TrigPolynomial::new(comp.group().clone());
    for (alpha, c) in terms {
        p.add_term(frequency_of(&comp, alpha)?, c.clone())?;
    }
    HartmanFunction::realized(Realization::Trig(p), comp)
}

/// `Σ c_j e^{2πi n α_j}` over the subgroup generated by the frequencies.
pub fn trig_sequence(terms: &[(Angle, Complex<Rational>)]) -> Result<HartmanFunction> {
    let gamma = SpectralSubgroup::from_angles(terms.iter().map(|(a, _)| a.clone()));
    trig_sequence_on(induce_compactification(&gamma)?, terms)
}

/// `c · e^{2πi n α}`.
pub fn character_sequence(alpha: Angle, c: Complex<Rational>) -> Result<HartmanFunction> {
    trig_sequence(&[(alpha, c)])
}

/// The periodic sequence `n ↦ values[n mod p]`, realized over `⟨1/p⟩`.
pub fn periodic(values: Vec<Complex<Rational>>) -> Result<HartmanFunction> {
    let p = values.len();
    if p == 0 {
        return Err(Error::invalid("period must be positive"));
    }
    let comp = induce_compactification(&SpectralSubgroup::from_angles([Angle::rational(1, p as i64)]))?;
    let f = StepFunction::from_grid(comp.group().clone(), vec![], values)?;
    HartmanFunction::realized(Realization::Step(f), comp)
}

/// `φ_n(k) = ∏_{j=1}^n cos²(2πk/3^j)`, period `3^n`.
///
/// Stored as the expanded trigonometric polynomial with frequencies
/// `Σ ε_j 2/3^j`, `ε_j ∈ {−1, 0, 1}`, and coefficients `∏ (1/2 or 1/4)`.
pub fn cos2_product(n: u32) -> Result<HartmanFunction> {
    if n == 0 {
        return Err(Error::invalid("cos2_product needs n >= 1"));
    }
    if n > 12 {
        return Err(Error::invalid("cos2_product supports n <= 12"));
    }
    let period = 3i64.pow(n);
    let gens = (1..=n).map(|j| Angle::rational(2, 3i64.pow(j)));
    let comp = induce_compactification(&SpectralSubgroup::from_angles(gens))?;
    let mut terms = Vec::with_capacity(3usize.pow(n));
    for code in 0..3usize.pow(n) {
        let mut c = code;
        let mut num = 0i64;
        let mut coef = Rational::one();
        for j in 1..=n {
            let eps = (c % 3) as i64 - 1;
            c /= 3;
            num += eps * 2 * 3i64.pow(n - j);
            coef *= if eps == 0 { ratio(1, 2) } else { ratio(1, 4) };
        }
        terms.push((Angle::rational(num, period), Complex::new(coef, Rational::zero())));
    }
    trig_sequence_on(comp, &terms)
}

/// `n ↦ 1_{[0, β)}(nα mod 1)`, realized as an arc indicator over `⟨α⟩`.
pub fn cut_sequence(alpha: Angle, beta: Rational) -> Result<HartmanFunction> {
    if beta <= Rational::zero() || beta >= Rational::one() {
        return Err(Error::invalid("beta must lie in (0, 1)"));
    }
    let gamma = SpectralSubgroup::from_angles([alpha.clone()]);
    let comp = induce_compactification(&gamma)?;
    let group = comp.group().clone();
    let (m, t) = if gamma.generators().is_empty() {
        (vec![0; group.torus_rank()], 0)
    } else {
        comp.source_coordinates()[0].clone()
    };
    let l = comp.torsion_order().max(1);
    let nf = group.finite_order();
    let f = if group.torus_rank() == 0 {
        let values = (0..nf)
            .map(|u| {
                let x = ratio((t * u as u64 % l) as i64, l as i64);
                if x < beta {
                    one()
                } else {
                    Complex::zero()
                }
            })
            .collect();
        StepFunction::from_grid(group, vec![], values)?
    } else {
        let m = m[0];
        let am = m.unsigned_abs() as i64;
        let mut pieces = Vec::new();
        for u in 0..nf {
            let s = ratio((t * u as u64 % l) as i64, l as i64);
            for r in 0..am {
                let r = Rational::from_integer(r.into());
                // m > 0: m x + s ∈ [r, r + β); m < 0: a.e. |m| x − s ∈ [r + 1 − β, r + 1).
                let start = if m > 0 {
                    (&r - &s) / Rational::from_integer(am.into())
                } else {
                    (&r + &s + Rational::one() - &beta) / Rational::from_integer(am.into())
                };
                let start = frac(&start);
                let end = &start + &beta / Rational::from_integer(am.into());
                pieces.push(Piece {
                    arcs: vec![Arc::new(start, end)],
                    fiber: vec![u],
                    value: one(),
                });
            }
        }
        StepFunction::from_pieces(group, &pieces)?
    };
    HartmanFunction::realized(Realization::Step(f), comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Angle {
        Angle::quadratic(-1, 1, 5, 2).unwrap()
    }

    #[test]
    fn cut_sequence_matches_direct_definition() {
        let beta = ratio(1, 3);
        let f = cut_sequence(golden(), beta.clone()).unwrap();
        let w = f.sample(-2000, 2000).unwrap();
        for (i, v) in w.iter().enumerate() {
            let n = i as i64 - 2000;
            let x = golden().mul_int(n);
            let expect = if x.cmp_rational(&beta) == Ordering::Less { 1.0 } else { 0.0 };
            assert_eq!(v.re, expect, "n = {n}");
        }
    }

    #[test]
    fn negative_generator_orientation() {
        let alpha = Angle::quadratic(1, -1, 5, 2).unwrap();
        let beta = ratio(1, 3);
        let f = cut_sequence(alpha.clone(), beta.clone()).unwrap();
        for n in -500..=500 {
            let expect = if alpha.mul_int(n).cmp_rational(&beta) == Ordering::Less { 1.0 } else { 0.0 };
            assert_eq!(f.evaluate(n).unwrap().re, expect);
        }
    }

    #[test]
    fn halves_alternate() {
        let f = cut_sequence(Angle::rational(1, 2), ratio(1, 2)).unwrap();
        let w = f.sample(0, 5).unwrap();
        let re: Vec<f64> = w.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let g = periodic(vec![one(), -one()]).unwrap();
        for n in -5..5 {
            assert_eq!(g.evaluate(n).unwrap().re, if n % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn arc_membership_example() {
        // nα mod 1 = 0.2 ⇒ value 1 for 1_{[0,1/3)}.
        let f = cut_sequence(Angle::rational(1, 5), ratio(1, 3)).unwrap();
        assert_eq!(f.evaluate(1).unwrap().re, 1.0);
        assert_eq!(f.evaluate(2).unwrap().re, 0.0);
    }

    #[test]
    fn cos2_values() {
        let f = cos2_product(1).unwrap();
        assert!((f.evaluate(0).unwrap().re - 1.0).abs() < 1e-14);
        assert!((f.evaluate(1).unwrap().re - 0.25).abs() < 1e-14);
        let f = cos2_product(3).unwrap();
        for k in -40..40 {
            let direct: f64 = (1..=3)
                .map(|j| (std::f64::consts::TAU * k as f64 / 3f64.powi(j)).cos().powi(2))
                .product();
            let v = f.evaluate(k).unwrap();
            assert!((v.re - direct).abs() < 1e-12 && v.im.abs() < 1e-12);
            assert!((f.evaluate(k + 27).unwrap() - v).norm() < 1e-12);
        }
        assert_eq!(f.compactification().unwrap().torsion_order(), 27);
    }

    #[test]
    fn sampled_window_bounds() {
        let f = HartmanFunction::sampled(vec![Complex64::new(1.0, 0.0); 5]).unwrap();
        assert_eq!(f.radius(), Some(2));
        assert!(matches!(f.evaluate(3), Err(Error::OutOfWindow { .. })));
        assert!(matches!(f.window(3), Err(Error::InsufficientWindow { .. })));
        assert!(HartmanFunction::sampled(vec![Complex64::new(1.0, 0.0); 4]).is_err());
    }

    #[test]
    fn csv_round_trip_and_contiguity() {
        let f = cut_sequence(golden(), ratio(1, 3)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(10, &mut buf).unwrap();
        let g = read_csv(buf.as_slice()).unwrap();
        assert_eq!(g.window(10).unwrap(), f.window(10).unwrap());
        let broken = "n,re,im\n-1,0,0\n1,0,0\n";
        assert!(read_csv(broken.as_bytes()).is_err());
        let lopsided = "-1,0,0\n0,1,0\n1,0,0\n2,0,0\n";
        assert!(read_csv(lopsided.as_bytes()).is_err());
    }
}
