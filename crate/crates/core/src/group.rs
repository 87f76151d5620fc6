//! Finitely generated subgroups Γ ≤ 𝕋 of the dual of ℤ and the
//! compactifications `𝕋^k × ℤ/L` they induce.
//!
//! A subgroup is presented by writing every generator as a rational linear
//! form `r + Σ q_s b_s` in a basis of symbols `b_s` that are rationally
//! independent from each other and from 1. Exact generators use square
//! roots of squarefree integers as symbols; floating generators introduce
//! numerical symbols found by a bounded relation search. The relation
//! lattice `{c ∈ ℤ^n : Σ c_i g_i ∈ ℤ}` is then an integer left kernel, and
//! its Smith normal form splits Γ into free generators and a cyclic torsion
//! part (every finite subgroup of 𝕋 is cyclic).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::angle::{Angle, Character, CompactGroup, Point};
use crate::error::{Error, Result};
use crate::lattice::{left_kernel, smith, IntMatrix};
use crate::rational::{
    certify_rational, classify_rationality, common_denominator, int, resolvable_denominator, to_f64, RationalClass, Rational,
};
use crate::surd::Surd;

/// Bounds for presenting subgroups and deciding membership.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresentationConfig {
    /// Largest denominator accepted when certifying a floating value as rational.
    pub denominator_bound: u64,
    /// Largest absolute integer coefficient tried in relation and membership searches.
    pub coefficient_bound: i64,
    /// Largest multiplier `m` in a relation `m γ = Σ c_s b_s + p/q`.
    pub multiplier_bound: i64,
    /// Largest `q` in the rational remainder of a relation.
    pub remainder_denominator: i64,
    /// Maximum number of coefficient vectors visited by one search.
    pub search_budget: u64,
    /// A relation hit is only trusted while the expected number of chance
    /// hits among the candidates visited so far stays below this level.
    pub false_hit_level: f64,
}

impl Default for PresentationConfig {
    fn default() -> Self {
        PresentationConfig {
            denominator_bound: 1_000_000,
            coefficient_bound: 1000,
            multiplier_bound: 4,
            remainder_denominator: 16,
            search_budget: 4_000_000,
            false_hit_level: 0.05,
        }
    }
}

/// How a presentation or a membership verdict was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    Exact,
    Numerical,
}

impl Certification {
    fn and(self, other: Certification) -> Certification {
        if self == Certification::Exact && other == Certification::Exact {
            Certification::Exact
        } else {
            Certification::Numerical
        }
    }
}

/// Basis element of a presentation.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// `√c` for squarefree `c ≥ 2`.
    Sqrt(u64),
    /// A measured value with absolute uncertainty.
    Float { value: f64, tol: f64 },
}

impl Symbol {
    pub fn value(&self) -> f64 {
        match self {
            Symbol::Sqrt(c) => (*c as f64).sqrt(),
            Symbol::Float { value, .. } => *value,
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Symbol::Sqrt(_) => 0.0,
            Symbol::Float { tol, .. } => *tol,
        }
    }
}

/// `offset + Σ coords[s] · symbol_s`, an element of ℝ (read modulo 1).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LinearForm {
    pub offset: Rational,
    pub coords: BTreeMap<usize, Rational>,
}

impl LinearForm {
    pub fn rational(q: Rational) -> Self {
        LinearForm {
            offset: q,
            coords: BTreeMap::new(),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.coords.is_empty()
    }

    fn add_scaled(&mut self, other: &LinearForm, k: &Rational) {
        self.offset += &other.offset * k;
        for (&s, q) in &other.coords {
            let slot = self.coords.entry(s).or_insert_with(Rational::zero);
            *slot += q * k;
            if slot.is_zero() {
                self.coords.remove(&s);
            }
        }
    }

    fn scaled(&self, k: &Rational) -> LinearForm {
        let mut out = LinearForm::default();
        out.add_scaled(self, k);
        out
    }

    pub fn value(&self, symbols: &[Symbol]) -> f64 {
        self.coords
            .iter()
            .fold(to_f64(&self.offset), |acc, (&s, q)| acc + to_f64(q) * symbols[s].value())
    }

    pub fn tol(&self, symbols: &[Symbol]) -> f64 {
        self.coords
            .iter()
            .map(|(&s, q)| to_f64(q).abs() * symbols[s].tol())
            .sum()
    }

    fn is_exact(&self, symbols: &[Symbol]) -> bool {
        self.coords.keys().all(|&s| matches!(symbols[s], Symbol::Sqrt(_)))
    }

    fn to_angle(&self, symbols: &[Symbol]) -> Angle {
        if self.is_exact(symbols) {
            let terms = self.coords.iter().map(|(&s, q)| match symbols[s] {
                Symbol::Sqrt(c) => (c, q.clone()),
                Symbol::Float { .. } => unreachable!(),
            });
            Angle::from_surd(Surd::from_parts(self.offset.clone(), terms))
        } else {
            Angle::float_with_tol(
                self.value(symbols),
                self.tol(symbols) + 4.0 * f64::EPSILON,
            )
        }
    }
}

/// A finitely generated subgroup of 𝕋 given by generators.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSubgroup {
    generators: Vec<Character>,
}

impl SpectralSubgroup {
    /// Reduces generators modulo 1 and drops duplicates and zeros.
    pub fn new(generators: Vec<Character>) -> Self {
        let mut out: Vec<Character> = Vec::new();
        for g in generators {
            if g.alpha().is_zero() && g.alpha().is_exact() {
                continue;
            }
            let dup = out.iter().any(|h| match (h.alpha(), g.alpha()) {
                (Angle::Exact(a), Angle::Exact(b)) => a == b,
                (a, b) => {
                    let d = (a.to_f64() - b.to_f64()).rem_euclid(1.0);
                    d.min(1.0 - d) <= a.tol() + b.tol()
                }
            });
            if !dup {
                out.push(g);
            }
        }
        SpectralSubgroup { generators: out }
    }

    pub fn trivial() -> Self {
        SpectralSubgroup {
            generators: Vec::new(),
        }
    }

    pub fn from_angles(angles: impl IntoIterator<Item = Angle>) -> Self {
        Self::new(angles.into_iter().map(Character).collect())
    }

    pub fn generators(&self) -> &[Character] {
        &self.generators
    }

    pub fn is_exact(&self) -> bool {
        self.generators.iter().all(|g| g.alpha().is_exact())
    }
}

/// The compactification `(ι_Γ, 𝕋^k × ℤ/L)` induced by a subgroup Γ.
///
/// `ι_Γ(n) = (n h_1, …, n h_k mod 1, n mod L)`; the characters of the
/// compactification correspond to `Σ m_j h_j + t/L ∈ Γ`.
#[derive(Clone, Debug)]
pub struct Compactification {
    group: CompactGroup,
    symbols: Vec<Symbol>,
    free: Vec<LinearForm>,
    torsion_order: u64,
    certification: Certification,
    source: SpectralSubgroup,
    /// Coordinates `(m, t)` of each source generator.
    source_coords: Vec<(Vec<i64>, u64)>,
}

/// Outcome of a membership query `x ∈ Γ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// `x = Σ coords_j h_j + torsion / L (mod 1)`.
    Member { coords: Vec<i64>, torsion: u64 },
    NotMember,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

struct Presenter<'a> {
    cfg: &'a PresentationConfig,
    symbols: Vec<Symbol>,
    /// Number of floating generators tested for rationality.
    trials: usize,
}

impl Presenter<'_> {
    fn sqrt_symbol(&mut self, c: u64) -> usize {
        if let Some(i) = self.symbols.iter().position(|s| *s == Symbol::Sqrt(c)) {
            return i;
        }
        self.symbols.push(Symbol::Sqrt(c));
        self.symbols.len() - 1
    }

    fn exact_form(&mut self, s: &Surd) -> LinearForm {
        let mut f = LinearForm::rational(s.offset().clone());
        for (&c, q) in s.terms() {
            let idx = self.sqrt_symbol(c);
            f.coords.insert(idx, q.clone());
        }
        f
    }

    fn float_form(&mut self, value: f64, tol: f64) -> LinearForm {
        // The denominator cap shrinks with the number of floating generators
        // so that a chance rational match stays unlikely across all of them.
        let bound = self
            .cfg
            .denominator_bound
            .min(resolvable_denominator(tol * self.trials.max(1) as f64));
        if let RationalClass::Rational { num, den } = classify_rationality(value, tol, bound) {
            return LinearForm::rational(Rational::new(num.into(), (den as i64).into()));
        }
        if let Some(f) = find_relation(value, tol, &self.symbols, self.cfg) {
            return f;
        }
        self.symbols.push(Symbol::Float { value, tol });
        let mut f = LinearForm::default();
        f.coords.insert(self.symbols.len() - 1, Rational::one());
        f
    }
}

/// Searches for `m γ ≡ Σ c_s b_s + p/q (mod 1)` in height order and returns
/// the corresponding form for γ.
///
/// Integer combinations (`m = 1`, `p/q = 0`) are tried first as their own
/// family; the full family with multipliers and rational remainders follows.
/// Each family stops once its expected number of chance hits reaches
/// `cfg.false_hit_level`.
fn find_relation(value: f64, tol: f64, symbols: &[Symbol], cfg: &PresentationConfig) -> Option<LinearForm> {
    if symbols.is_empty() {
        return None;
    }
    search_family(value, tol, symbols, cfg, 1, 1)
        .or_else(|| search_family(value, tol, symbols, cfg, cfg.multiplier_bound, cfg.remainder_denominator))
}

fn search_family(
    value: f64,
    tol: f64,
    symbols: &[Symbol],
    cfg: &PresentationConfig,
    mmax: i64,
    qmax: i64,
) -> Option<LinearForm> {
    let s = symbols.len();
    let per_axis = ((cfg.search_budget as f64).powf(1.0 / s as f64) / 2.0).floor() as i64;
    let bound = cfg.coefficient_bound.min(per_axis.max(1));
    let vals: Vec<f64> = symbols.iter().map(Symbol::value).collect();
    let tols: Vec<f64> = symbols.iter().map(Symbol::tol).collect();
    // Fraction of the circle within reach of some p/q with q <= qmax, per
    // unit of tolerance.
    let coverage_per_tol: f64 = (1..=qmax).map(|q| 2.0 * q as f64).sum();
    let mut visited = 0.0f64;
    for height in 1..=bound {
        for c in shell(s, height) {
            let lin: f64 = c.iter().zip(&vals).map(|(&ci, v)| ci as f64 * v).sum();
            let spread: f64 = c.iter().zip(&tols).map(|(&ci, t)| (ci as f64).abs() * t).sum();
            for m in 1..=mmax {
                let budget = m as f64 * tol + spread + 1e-12;
                visited += 1.0;
                if visited * coverage_per_tol * budget > cfg.false_hit_level {
                    return None;
                }
                let y = (m as f64 * value - lin).rem_euclid(1.0);
                for q in 1..=qmax {
                    let p = (y * q as f64).round();
                    if (y - p / q as f64).abs() > budget {
                        continue;
                    }
                    // γ ≡ (Σ c b + p/q + j) / m; pick the branch j closest to γ.
                    let base = (lin + p / q as f64) / m as f64;
                    let j = (0..m)
                        .min_by(|&a, &b| {
                            let da = circ(value - base - a as f64 / m as f64);
                            let db = circ(value - base - b as f64 / m as f64);
                            da.total_cmp(&db)
                        })
                        .unwrap_or(0);
                    let offset = Rational::new(
                        BigInt::from(p as i64 + j * q),
                        BigInt::from(q * m),
                    );
                    let mut f = LinearForm::rational(offset);
                    for (idx, &ci) in c.iter().enumerate() {
                        if ci != 0 {
                            f.coords
                                .insert(idx, Rational::new(BigInt::from(ci), BigInt::from(m)));
                        }
                    }
                    return Some(f);
                }
            }
        }
    }
    None
}

fn circ(x: f64) -> f64 {
    let d = x.rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Integer vectors of length `s` with max-norm exactly `h`, in a fixed order.
fn shell(s: usize, h: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * h + 1) as u64;
    let total = side.pow(s as u32);
    (0..total).filter_map(move |mut idx| {
        let mut v = Vec::with_capacity(s);
        for _ in 0..s {
            v.push((idx % side) as i64 - h);
            idx /= side;
        }
        v.iter().any(|x| x.abs() == h).then_some(v)
    })
}

fn bigint_to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or(Error::Overflow("presentation"))
}

/// Builds `C_Γ` for a finitely generated Γ.
pub fn induce_compactification(gamma: &SpectralSubgroup) -> Result<Compactification> {
    induce_with(gamma, &PresentationConfig::default())
}

pub fn induce_with(gamma: &SpectralSubgroup, cfg: &PresentationConfig) -> Result<Compactification> {
    let mut p = Presenter {
        cfg,
        symbols: Vec::new(),
        trials: gamma.generators().iter().filter(|g| !g.alpha().is_exact()).count(),
    };
    let mut cert = Certification::Exact;
    let forms: Vec<LinearForm> = gamma
        .generators()
        .iter()
        .map(|g| match g.alpha() {
            Angle::Exact(s) => p.exact_form(s),
            Angle::Float { value, tol } => {
                cert = Certification::Numerical;
                p.float_form(*value, *tol)
            }
        })
        .collect();
    let symbols = p.symbols;
    let n = forms.len();
    let s = symbols.len();
    let den = common_denominator(
        forms
            .iter()
            .flat_map(|f| std::iter::once(&f.offset).chain(f.coords.values())),
    );
    if den > BigInt::from(cfg.denominator_bound) {
        return Err(Error::Uncertified(format!(
            "common denominator {den} exceeds the bound {}",
            cfg.denominator_bound
        )));
    }
    let d_int = bigint_to_i128(&den)?;
    let scale = Rational::from_integer(den.clone());
    // Rows: generators as [D·coords | D·offset], then [0 … 0 | D].
    let mut a = IntMatrix::zeros(n + 1, s + 1);
    for (i, f) in forms.iter().enumerate() {
        for (&sym, q) in &f.coords {
            a[(i, sym)] = bigint_to_i128(&(q * &scale).to_integer())?;
        }
        a[(i, s)] = bigint_to_i128(&(&f.offset * &scale).to_integer())?;
    }
    a[(n, s)] = d_int;
    let kernel = left_kernel(&a)?;
    let relations: Vec<Vec<i128>> = kernel.to_rows().into_iter().map(|r| r[..n].to_vec()).collect();
    let rel = IntMatrix::from_rows(&relations);
    let (diag, v_inv) = if relations.is_empty() || n == 0 {
        (vec![0; n], IntMatrix::identity(n))
    } else {
        let sm = smith(&rel)?;
        let mut d = sm.diagonal.clone();
        d.resize(n, 0);
        (d, sm.v_inv)
    };
    let mut free = Vec::new();
    let mut torsion_order: i128 = 1;
    for j in 0..n {
        let mut h = LinearForm::default();
        for i in 0..n {
            let c = v_inv[(j, i)];
            if c != 0 {
                h.add_scaled(&forms[i], &Rational::from_integer(BigInt::from(c)));
            }
        }
        match diag[j] {
            0 => free.push(h),
            1 => {}
            d => {
                if !h.is_rational() {
                    return Err(Error::Uncertified("torsion generator with irrational part".into()));
                }
                torsion_order = crate::lattice::lcm(torsion_order, d)?;
            }
        }
    }
    let l = torsion_order;
    for h in &mut free {
        // Orientation: first symbol coordinate positive.
        if h.coords.values().next().is_some_and(|q| q.is_negative()) {
            *h = h.scaled(&-Rational::one());
        }
        h.offset -= h.offset.floor();
    }
    let l_u = u64::try_from(l).map_err(|_| Error::Overflow("torsion order"))?;
    let group = CompactGroup::new(free.len(), if l_u > 1 { vec![l_u] } else { vec![] })?;
    let mut comp = Compactification {
        group,
        symbols,
        free,
        torsion_order: l_u,
        certification: cert,
        source: gamma.clone(),
        source_coords: Vec::new(),
    };
    comp.check_independence()?;
    // With one free generator, orient it along the first source generator
    // that involves it, so that e.g. ⟨−α⟩ embeds as n ↦ −nα.
    if comp.free.len() == 1 {
        for f in &forms {
            if let Some(Membership::Member { coords, .. }) = comp.solve_form(f)? {
                if coords[0] != 0 {
                    if coords[0] < 0 {
                        let h = comp.free[0].scaled(&-Rational::one());
                        comp.free[0] = h;
                        let fl = comp.free[0].offset.floor();
                        comp.free[0].offset -= fl;
                    }
                    break;
                }
            }
        }
    }
    for f in &forms {
        match comp.solve_form(f)? {
            Some(Membership::Member { coords, torsion }) => comp.source_coords.push((coords, torsion)),
            _ => {
                return Err(Error::Uncertified(
                    "generator not reproduced by the reduced presentation".into(),
                ))
            }
        }
    }
    Ok(comp)
}

/// Gaussian elimination over ℚ: solves `Σ_j x_j cols[j] = rhs` when the
/// columns are independent. Returns `None` if inconsistent.
fn solve_rational(cols: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let k = cols.len();
    let rows = rhs.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Rational> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=k {
                    let t = &m[row][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][k].clone();
    }
    Some(x)
}

impl Compactification {
    pub fn group(&self) -> &CompactGroup {
        &self.group
    }

    pub fn torus_rank(&self) -> usize {
        self.group.torus_rank()
    }

    /// Invariant factors of the finite part (`[L]` or empty).
    pub fn finite_part(&self) -> &[u64] {
        self.group.finite_part()
    }

    pub fn torsion_order(&self) -> u64 {
        self.torsion_order
    }

    pub fn certification(&self) -> Certification {
        self.certification
    }

    pub fn source(&self) -> &SpectralSubgroup {
        &self.source
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_exact(&self) -> bool {
        self.free.iter().all(|h| h.is_exact(&self.symbols))
    }

    /// Rotation numbers `h_1, …, h_k` of the torus coordinates.
    pub fn free_generators(&self) -> Vec<Angle> {
        self.free.iter().map(|h| h.to_angle(&self.symbols)).collect()
    }

    /// Characters whose generated subgroup is Γ: the free generators and
    /// `1/L` when the torsion part is non-trivial.
    pub fn coordinate_characters(&self) -> Vec<Character> {
        let mut out: Vec<Character> = self.free_generators().into_iter().map(Character).collect();
        if self.torsion_order > 1 {
            out.push(Character(Angle::rational(1, self.torsion_order as i64)));
        }
        out
    }

    /// Coordinates `(m, t)` of the i-th source generator.
    pub fn source_coordinates(&self) -> &[(Vec<i64>, u64)] {
        &self.source_coords
    }

    /// `ι_Γ(n)`.
    pub fn embed(&self, n: i64) -> Point {
        let torus = self.free_generators().iter().map(|h| h.mul_int(n)).collect();
        let finite = if self.torsion_order > 1 {
            vec![n.rem_euclid(self.torsion_order as i64) as u64]
        } else {
            vec![]
        };
        Point::new(torus, finite)
    }

    /// The element `Σ m_j h_j + t/L` of Γ.
    pub fn character_of(&self, m: &[i64], t: u64) -> Angle {
        let mut f = LinearForm::rational(Rational::new(
            BigInt::from(t),
            BigInt::from(self.torsion_order.max(1)),
        ));
        for (h, &mj) in self.free.iter().zip(m) {
            f.add_scaled(h, &int(mj));
        }
        f.to_angle(&self.symbols)
    }

    fn check_independence(&self) -> Result<()> {
        let s = self.symbols.len();
        let cols: Vec<Vec<Rational>> = self
            .free
            .iter()
            .map(|h| (0..s).map(|i| h.coords.get(&i).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        // Independent iff the zero vector has only the trivial solution:
        // test by rank via elimination on a random-free combination.
        let mut rank_rows: Vec<Vec<Rational>> = cols.clone();
        let mut rank = 0;
        for col in 0..s {
            if let Some(p) = (rank..rank_rows.len()).find(|&i| !rank_rows[i][col].is_zero()) {
                rank_rows.swap(rank, p);
                for i in rank + 1..rank_rows.len() {
                    if rank_rows[i][col].is_zero() {
                        continue;
                    }
                    let f = &rank_rows[i][col] / &rank_rows[rank][col];
                    for j in col..s {
                        let t = &rank_rows[rank][j] * &f;
                        rank_rows[i][j] -= t;
                    }
                }
                rank += 1;
            }
        }
        if rank != self.free.len() {
            return Err(Error::Uncertified("free generators are rationally dependent".into()));
        }
        Ok(())
    }

    /// Exact membership of a form written over this presentation's symbols.
    fn solve_form(&self, x: &LinearForm) -> Result<Option<Membership>> {
        let s = self.symbols.len();
        let cols: Vec<Vec<Rational>> = self
            .free
            .iter()
            .map(|h| (0..s).map(|i| h.coords.get(&i).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        let rhs: Vec<Rational> = (0..s)
            .map(|i| x.coords.get(&i).cloned().unwrap_or_else(Rational::zero))
            .collect();
        let Some(m) = solve_rational(&cols, &rhs) else {
            return Ok(Some(Membership::NotMember));
        };
        if m.iter().any(|q| !q.is_integer()) {
            return Ok(Some(Membership::NotMember));
        }
        let mut rem = x.offset.clone();
        for (h, q) in self.free.iter().zip(&m) {
            rem -= &h.offset * q;
        }
        let scaled = rem * Rational::from_integer(BigInt::from(self.torsion_order));
        if !scaled.is_integer() {
            return Ok(Some(Membership::NotMember));
        }
        let t = scaled
            .to_integer()
            .mod_floor(&BigInt::from(self.torsion_order))
            .to_u64()
            .ok_or(Error::Overflow("torsion coordinate"))?;
        let coords = m
            .iter()
            .map(|q| q.to_integer().to_i64().ok_or(Error::Overflow("coordinate")))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(Membership::Member { coords, torsion: t }))
    }

    /// Decides `x ∈ Γ`.
    ///
    /// Exact data is decided exactly. Floating data is decided by a bounded
    /// search; [`Error::Undecided`] is returned when the search is exhausted
    /// without a certified exclusion.
    pub fn membership(&self, x: &Angle) -> Result<(Membership, Certification)> {
        self.membership_with(x, &PresentationConfig::default())
    }

    pub fn membership_with(&self, x: &Angle, cfg: &PresentationConfig) -> Result<(Membership, Certification)> {
        if let (Angle::Exact(sx), true) = (x, self.is_exact()) {
            let mut f = LinearForm::rational(sx.offset().clone());
            for (&c, q) in sx.terms() {
                match self.symbols.iter().position(|s| *s == Symbol::Sqrt(c)) {
                    Some(i) => {
                        f.coords.insert(i, q.clone());
                    }
                    None => return Ok((Membership::NotMember, Certification::Exact)),
                }
            }
            let m = self.solve_form(&f)?.unwrap_or(Membership::NotMember);
            return Ok((m, Certification::Exact));
        }
        self.float_membership(x.to_f64(), x.tol() + 4.0 * f64::EPSILON, cfg)
            .map(|m| (m, Certification::Numerical))
    }

    fn float_membership(&self, x: f64, tol: f64, cfg: &PresentationConfig) -> Result<Membership> {
        let l = self.torsion_order as f64;
        let hs: Vec<(f64, f64)> = self
            .free
            .iter()
            .map(|h| (h.value(&self.symbols), h.tol(&self.symbols)))
            .collect();
        let torsion_hit = |r: f64, budget: f64| -> Option<u64> {
            let y = (r * l).rem_euclid(l);
            let t = y.round();
            ((y - t).abs() <= budget * l).then(|| (t as u64) % self.torsion_order)
        };
        if let Some(t) = torsion_hit(x, tol + 1e-12) {
            return Ok(Membership::Member {
                coords: vec![0; hs.len()],
                torsion: t,
            });
        }
        if hs.is_empty() {
            return Ok(Membership::NotMember);
        }
        let k = hs.len();
        let per_axis = ((cfg.search_budget as f64).powf(1.0 / k as f64) / 2.0).floor() as i64;
        let bound = cfg.coefficient_bound.min(per_axis.max(1));
        for height in 1..=bound {
            for m in shell(k, height) {
                let lin: f64 = m.iter().zip(&hs).map(|(&mi, (v, _))| mi as f64 * v).sum();
                let spread: f64 = m.iter().zip(&hs).map(|(&mi, (_, t))| (mi as f64).abs() * t).sum();
                if let Some(t) = torsion_hit(x - lin, tol + spread + 1e-12) {
                    return Ok(Membership::Member { coords: m, torsion: t });
                }
            }
        }
        // A value certified rational can only be met by the torsion part.
        if let RationalClass::Rational { .. } = certify_rational(x, tol, cfg.denominator_bound) {
            return Ok(Membership::NotMember);
        }
        Err(Error::Undecided(format!(
            "no representation with coefficients up to {bound} found"
        )))
    }

    /// Whether every generator of `self`'s subgroup lies in `other`'s.
    pub fn covered_by(&self, other: &Compactification) -> Result<bool> {
        covers(self, other)
    }
}

/// `Γ(c1) ⊆ Γ(c2)`, i.e. `c1` is covered by `c2`.
pub fn covers(c1: &Compactification, c2: &Compactification) -> Result<bool> {
    let mut undecided = None;
    for chi in c1.coordinate_characters() {
        match c2.membership(chi.alpha()) {
            Ok((Membership::NotMember, _)) => return Ok(false),
            Ok(_) => {}
            Err(e @ Error::Undecided(_)) => undecided = Some(e),
            Err(e) => return Err(e),
        }
    }
    match undecided {
        Some(e) => Err(e),
        None => Ok(true),
    }
}

impl fmt::Display for Compactification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.group)?;
        let gens: Vec<String> = self.free_generators().iter().map(|a| a.to_string()).collect();
        if !gens.is_empty() {
            write!(f, " via [{}]", gens.join(", "))?;
        }
        Ok(())
    }
}

/// Certification of a compactification and the combined certification of
/// two of them.
pub fn joint_certification(c1: &Compactification, c2: &Compactification) -> Certification {
    c1.certification().and(c2.certification())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> Angle {
        Angle::quadratic(-1, 1, 5, 2).unwrap()
    }

    fn comp(angles: Vec<Angle>) -> Compactification {
        induce_compactification(&SpectralSubgroup::from_angles(angles)).unwrap()
    }

    #[test]
    fn torsion_only() {
        let c = comp(vec![Angle::rational(1, 2)]);
        assert_eq!(c.torus_rank(), 0);
        assert_eq!(c.finite_part(), &[2]);
        assert_eq!(c.embed(3).finite, vec![1]);
        assert_eq!(c.certification(), Certification::Exact);
    }

    #[test]
    fn golden_rotation() {
        let c = comp(vec![golden()]);
        assert_eq!(c.torus_rank(), 1);
        assert!(c.finite_part().is_empty());
        assert_eq!(c.embed(1).torus[0], golden());
        let c = comp(vec![golden().neg()]);
        assert_eq!(c.embed(1).torus[0], golden().neg());
    }

    #[test]
    fn golden_with_thirds() {
        let c = comp(vec![golden(), Angle::rational(1, 3)]);
        assert_eq!(c.torus_rank(), 1);
        assert_eq!(c.finite_part(), &[3]);
        let p = c.embed(4);
        assert_eq!(p.finite, vec![1]);
        assert_eq!(p.torus[0], golden().mul_int(4));
    }

    #[test]
    fn rational_generators_collapse_to_cyclic() {
        let c = comp(vec![Angle::rational(1, 2), Angle::rational(1, 3)]);
        assert_eq!(c.finite_part(), &[6]);
        let c = comp((1..=4).map(|j| Angle::rational(2, 3i64.pow(j))).collect());
        assert_eq!(c.finite_part(), &[81]);
    }

    #[test]
    fn dependent_irrationals_reduce_rank() {
        let c = comp(vec![golden().mul_int(2), golden().mul_int(3)]);
        assert_eq!(c.torus_rank(), 1);
        assert!(c.finite_part().is_empty());
        let s2 = Angle::quadratic(0, 1, 2, 1).unwrap();
        let c = comp(vec![golden(), s2.clone(), golden().add(&s2)]);
        assert_eq!(c.torus_rank(), 2);
    }

    #[test]
    fn covering_examples() {
        let half = comp(vec![Angle::rational(1, 2)]);
        let quarter = comp(vec![Angle::rational(1, 4)]);
        assert!(covers(&half, &quarter).unwrap());
        assert!(!covers(&quarter, &half).unwrap());
        let g = comp(vec![golden()]);
        let g2 = comp(vec![Angle::from_surd(golden().as_surd().unwrap().scale(&crate::rational::ratio(1, 2)))]);
        assert!(covers(&g, &g2).unwrap());
        let third = comp(vec![Angle::rational(1, 3)]);
        assert!(!covers(&g, &third).unwrap());
    }

    #[test]
    fn float_presentation_finds_multiples() {
        let a = (5f64.sqrt() - 1.0) / 2.0;
        let tol = 1e-11;
        let angles: Vec<Angle> = [1i64, -1, 2, -2, 4, 5, 7, -275]
            .iter()
            .map(|&k| Angle::float_with_tol(k as f64 * a, tol * k.abs() as f64))
            .collect();
        let c = comp(angles);
        assert_eq!(c.torus_rank(), 1);
        assert!(c.finite_part().is_empty());
        assert_eq!(c.certification(), Certification::Numerical);
        let h = c.free_generators()[0].to_f64();
        assert!(circ(h - a) < 1e-9 || circ(h + a) < 1e-9);
    }

    #[test]
    fn float_rationals_give_torsion() {
        let angles: Vec<Angle> = (0..9)
            .map(|t| Angle::float_with_tol(t as f64 / 9.0 + 3e-11, 1e-10))
            .collect();
        let c = comp(angles);
        assert_eq!(c.torus_rank(), 0);
        assert_eq!(c.finite_part(), &[9]);
    }

    #[test]
    fn float_membership_against_exact() {
        let s = Angle::quadratic(-1, 1, 2, 1).unwrap();
        let exact = comp(vec![s.clone()]);
        let noisy = comp(vec![Angle::float_with_tol(s.to_f64() + 2e-10, 1e-9)]);
        assert!(covers(&exact, &noisy).unwrap());
        assert!(covers(&noisy, &exact).unwrap());
        let with_half = comp(vec![s, Angle::rational(1, 2)]);
        assert!(!covers(&with_half, &noisy).unwrap());
    }

    #[test]
    fn source_generators_reproduced() {
        let c = comp(vec![golden().mul_int(2), Angle::rational(1, 6), golden().add(&Angle::rational(1, 3))]);
        for (g, (m, t)) in c.source().generators().iter().zip(c.source_coordinates()) {
            let back = c.character_of(m, *t);
            assert_eq!(&back, g.alpha());
        }
    }
}
