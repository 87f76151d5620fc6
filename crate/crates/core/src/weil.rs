//! Closed subgroups `H ≤ 𝕋^k × F` of supported shape, the quotient map
//! `X → X/H`, the fiber average `b̄`, and aperiodization.
//!
//! Supported shape: `H = S × P` where `S` is a coordinate subtorus and `P`
//! is a finite group of rational translations whose pure-torus part
//! `P ∩ (𝕋^k × {0})` is a rectangular lattice `Π (1/q_j)ℤ`. The quotient is
//! then again `𝕋^r × F'`, with `π(x, u) = (q ⊙ x − τ(u), c(u))` for a
//! homomorphism `τ : F → 𝕋^r` and the projection `c : F → F/P_F`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::angle::{Angle, CompactGroup};
use crate::error::{Error, Result};
use crate::lattice::{lcm, smith, solve_congruences, IntMatrix};
use crate::rational::{frac, Rational};
use crate::step::{multi_indices, Magnitude, StepFunction};

/// Cap on the number of elements of the finite part of `H`.
const MAX_TORSION: usize = 1 << 16;

/// A finite-order translation `(y, u)` of `𝕋^k × F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Translation {
    pub torus: Vec<Rational>,
    /// Mixed-radix index of the finite component.
    pub finite: usize,
}

impl Translation {
    pub fn zero(group: &CompactGroup) -> Self {
        Translation {
            torus: vec![Rational::zero(); group.torus_rank()],
            finite: 0,
        }
    }

    fn add(&self, other: &Translation, group: &CompactGroup) -> Translation {
        Translation {
            torus: self.torus.iter().zip(&other.torus).map(|(a, b)| frac(&(a + b))).collect(),
            finite: group.combine(self.finite, other.finite, false),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.finite == 0 && self.torus.iter().all(Zero::is_zero)
    }
}

/// `H = S × P`: a coordinate subtorus times a finite translation group.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupH {
    group: CompactGroup,
    subtorus: Vec<usize>,
    generators: Vec<Translation>,
    /// All elements of `P`, sorted; subtorus coordinates are zero.
    elements: Vec<Translation>,
}

impl SubgroupH {
    pub fn trivial(group: &CompactGroup) -> Self {
        SubgroupH {
            group: group.clone(),
            subtorus: Vec::new(),
            generators: Vec::new(),
            elements: vec![Translation::zero(group)],
        }
    }

    /// The subgroup generated by the coordinate subtorus `subtorus` and the
    /// given translations.
    pub fn new(group: &CompactGroup, subtorus: Vec<usize>, generators: Vec<Translation>) -> Result<Self> {
        let k = group.torus_rank();
        let subtorus: Vec<usize> = subtorus.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if subtorus.iter().any(|&j| j >= k) {
            return Err(Error::invalid("subtorus direction out of range"));
        }
        let nf = group.finite_order();
        let mut h = SubgroupH {
            group: group.clone(),
            subtorus,
            generators: Vec::new(),
            elements: vec![Translation::zero(group)],
        };
        let mut seen: HashSet<Translation> = h.elements.iter().cloned().collect();
        for g in generators {
            if g.torus.len() != k || g.finite >= nf {
                return Err(Error::invalid("translation does not match the domain"));
            }
            let g = h.normalize(g);
            if seen.contains(&g) {
                continue;
            }
            h.generators.push(g);
            // Closure under the new generator.
            let mut frontier: Vec<Translation> = h.elements.clone();
            while let Some(x) = frontier.pop() {
                for gen in &h.generators {
                    let y = x.add(gen, group);
                    if seen.insert(y.clone()) {
                        if seen.len() > MAX_TORSION {
                            return Err(Error::UnsupportedSubgroup("finite part too large".into()));
                        }
                        frontier.push(y);
                    }
                }
            }
            h.elements = seen.iter().cloned().collect();
        }
        h.elements.sort();
        Ok(h)
    }

    /// Reduces modulo 1 and zeroes subtorus coordinates.
    fn normalize(&self, mut t: Translation) -> Translation {
        for (j, y) in t.torus.iter_mut().enumerate() {
            *y = if self.subtorus.contains(&j) { Rational::zero() } else { frac(y) };
        }
        t
    }

    pub fn group(&self) -> &CompactGroup {
        &self.group
    }

    pub fn subtorus(&self) -> &[usize] {
        &self.subtorus
    }

    pub fn generators(&self) -> &[Translation] {
        &self.generators
    }

    /// Elements of the finite part `P`.
    pub fn torsion(&self) -> &[Translation] {
        &self.elements
    }

    /// `P ∩ ({0} × F)` as finite indices.
    pub fn f_part(&self) -> Vec<usize> {
        self.elements
            .iter()
            .filter(|t| t.torus.iter().all(Zero::is_zero))
            .map(|t| t.finite)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.subtorus.is_empty() && self.elements.len() == 1
    }

    pub fn contains(&self, t: &Translation) -> bool {
        self.elements.binary_search(&self.normalize(t.clone())).is_ok()
    }
}

impl fmt::Display for SubgroupH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "{{0}}");
        }
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| {
                let ys: Vec<String> = g.torus.iter().map(|y| y.to_string()).collect();
                format!("({}; {:?})", ys.join(", "), self.group.element(g.finite))
            })
            .collect();
        write!(
            f,
            "subtorus {:?} + <{}> ({} torsion elements)",
            self.subtorus,
            gens.join(", "),
            self.elements.len()
        )
    }
}

/// JSON descriptor of `H`.
#[derive(Clone, Debug, Serialize)]
pub struct SubgroupDescriptor {
    pub subtorus: Vec<usize>,
    pub torsion_generators: Vec<(Vec<String>, Vec<u64>)>,
    pub torsion_order: usize,
    pub f_part: Vec<Vec<u64>>,
    pub trivial: bool,
}

impl SubgroupH {
    pub fn descriptor(&self) -> SubgroupDescriptor {
        SubgroupDescriptor {
            subtorus: self.subtorus.clone(),
            torsion_generators: self
                .generators
                .iter()
                .map(|g| (g.torus.iter().map(|y| y.to_string()).collect(), self.group.element(g.finite)))
                .collect(),
            torsion_order: self.elements.len(),
            f_part: self.f_part().into_iter().map(|u| self.group.element(u)).collect(),
            trivial: self.is_trivial(),
        }
    }
}

/// The quotient map `π : 𝕋^k × F → 𝕋^r × F/P_F` for a supported `H`.
#[derive(Clone, Debug)]
pub struct Quotient {
    source: CompactGroup,
    target: CompactGroup,
    /// Torus coordinates of the source that survive, in order.
    kept: Vec<usize>,
    /// Scale `q_j` per kept coordinate.
    scale: Vec<i64>,
    /// `τ(u)` per finite index of the source, per kept coordinate.
    tau: Vec<Vec<Rational>>,
    /// `c(u)` per finite index of the source.
    class: Vec<usize>,
    /// A preimage of each finite index of the target.
    reps: Vec<usize>,
}

impl Quotient {
    pub fn new(h: &SubgroupH) -> Result<Quotient> {
        let group = h.group();
        let k = group.torus_rank();
        let kept: Vec<usize> = (0..k).filter(|j| !h.subtorus.contains(j)).collect();
        // Pure-torus part Λ0 and its axis subgroups.
        let lambda0: Vec<&Translation> = h.elements.iter().filter(|t| t.finite == 0).collect();
        let mut scale = Vec::with_capacity(kept.len());
        for &j in &kept {
            let axis = lambda0
                .iter()
                .filter(|t| t.torus.iter().enumerate().all(|(i, y)| i == j || y.is_zero()))
                .count();
            scale.push(axis as i64);
        }
        let rect: usize = scale.iter().map(|&q| q as usize).product();
        if rect != lambda0.len() {
            return Err(Error::UnsupportedSubgroup(
                "torsion translations do not form a coordinate-aligned lattice".into(),
            ));
        }
        let moduli: Vec<u64> = group.finite_part().to_vec();
        let nf = group.finite_order();
        let f_gens: Vec<&Translation> = h.generators.iter().filter(|g| g.finite != 0).collect();
        let big_n = moduli.iter().try_fold(1i128, |acc, &n| lcm(acc, n as i128))?;
        // τ_j(e_i) = s_ij / n_i, solving Σ_i u_pi s_ij / n_i ≡ q_j y_pj for every generator p.
        let mut s = vec![vec![0i128; kept.len()]; moduli.len()];
        if !f_gens.is_empty() {
            let mut a = IntMatrix::zeros(f_gens.len(), moduli.len());
            for (r, g) in f_gens.iter().enumerate() {
                let u = group.element(g.finite);
                for (i, &n) in moduli.iter().enumerate() {
                    a[(r, i)] = u[i] as i128 * (big_n / n as i128);
                }
            }
            for (jj, &j) in kept.iter().enumerate() {
                let b = f_gens
                    .iter()
                    .map(|g| {
                        let v = frac(&(&g.torus[j] * Rational::from_integer(scale[jj].into())))
                            * Rational::from_integer(BigInt::from(big_n));
                        if !v.is_integer() {
                            return Err(Error::UnsupportedSubgroup("torsion order mismatch".into()));
                        }
                        v.to_integer().to_i128().ok_or(Error::Overflow("torsion translation"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let sol = solve_congruences(&a, &b, big_n)?
                    .ok_or_else(|| Error::UnsupportedSubgroup("no compatible section".into()))?;
                for (i, x) in sol.into_iter().enumerate() {
                    s[i][jj] = x;
                }
            }
        }
        let tau: Vec<Vec<Rational>> = (0..nf)
            .map(|u| {
                let e = group.element(u);
                (0..kept.len())
                    .map(|jj| {
                        let t = e.iter().zip(&moduli).enumerate().fold(Rational::zero(), |acc, (i, (&ui, &n))| {
                            acc + Rational::new(BigInt::from(ui as i128 * s[i][jj]), BigInt::from(n))
                        });
                        frac(&t)
                    })
                    .collect()
            })
            .collect();
        // F/P_F from the Smith form of the relations {n_i e_i} ∪ {u_p}.
        let (target_finite, class) = if moduli.is_empty() {
            (Vec::new(), vec![0; nf])
        } else {
            let mut rel = IntMatrix::zeros(moduli.len() + f_gens.len(), moduli.len());
            for (i, &n) in moduli.iter().enumerate() {
                rel[(i, i)] = n as i128;
            }
            for (r, g) in f_gens.iter().enumerate() {
                for (i, &ui) in group.element(g.finite).iter().enumerate() {
                    rel[(moduli.len() + r, i)] = ui as i128;
                }
            }
            let sm = smith(&rel)?;
            let factors: Vec<(usize, i128)> =
                sm.diagonal.iter().enumerate().filter(|(_, &d)| d > 1).map(|(l, &d)| (l, d)).collect();
            let target_finite: Vec<u64> = factors.iter().map(|&(_, d)| d as u64).collect();
            let tgt = CompactGroup::new(0, target_finite.clone())?;
            let class = (0..nf)
                .map(|u| {
                    let e = group.element(u);
                    let coords: Vec<u64> = factors
                        .iter()
                        .map(|&(l, d)| {
                            let x: i128 = e.iter().enumerate().map(|(i, &ui)| ui as i128 * sm.v[(i, l)]).sum();
                            x.rem_euclid(d) as u64
                        })
                        .collect();
                    tgt.index(&coords)
                })
                .collect();
            (target_finite, class)
        };
        let target = CompactGroup::new(kept.len(), target_finite)?;
        let mut reps = vec![usize::MAX; target.finite_order()];
        for (u, &v) in class.iter().enumerate() {
            if reps[v] == usize::MAX {
                reps[v] = u;
            }
        }
        if reps.contains(&usize::MAX) {
            return Err(Error::UnsupportedSubgroup("finite projection is not onto".into()));
        }
        Ok(Quotient {
            source: group.clone(),
            target,
            kept,
            scale,
            tau,
            class,
            reps,
        })
    }

    pub fn source(&self) -> &CompactGroup {
        &self.source
    }

    pub fn target(&self) -> &CompactGroup {
        &self.target
    }

    /// Rotation numbers of `π ∘ ι` for `ι(n) = (n h, n mod L)`: one angle per
    /// target torus coordinate, then `c(ι(1))_l / d_l` per target cyclic
    /// factor `ℤ/d_l`.
    pub fn image_angles(&self, free: &[Angle]) -> Result<(Vec<Angle>, Vec<Angle>)> {
        if free.len() != self.source.torus_rank() {
            return Err(Error::DomainMismatch);
        }
        let one: Vec<u64> = self.source.finite_part().iter().map(|&n| 1 % n).collect();
        let u = self.source.index(&one);
        let torus = self
            .kept
            .iter()
            .enumerate()
            .map(|(jj, &j)| free[j].mul_int(self.scale[jj]).sub(&Angle::from_rational(&self.tau[u][jj])))
            .collect();
        let finite = self
            .target
            .element(self.class[u])
            .iter()
            .zip(self.target.finite_part())
            .map(|(&c, &d)| Angle::rational(c as i64, d as i64))
            .collect();
        Ok((torus, finite))
    }

    /// `π(x, u)`.
    pub fn project(&self, x: &[Rational], u: usize) -> (Vec<Rational>, usize) {
        let w = self
            .kept
            .iter()
            .enumerate()
            .map(|(jj, &j)| frac(&(&x[j] * Rational::from_integer(self.scale[jj].into()) - &self.tau[u][jj])))
            .collect();
        (w, self.class[u])
    }

    /// `ψ ∘ π` as a step function on the source.
    pub fn pullback(&self, psi: &StepFunction<Rational>) -> Result<StepFunction<Rational>> {
        if psi.group() != &self.target {
            return Err(Error::DomainMismatch);
        }
        let k = self.source.torus_rank();
        let nf = self.source.finite_order();
        let mut cuts: Vec<Vec<Rational>> = vec![vec![Rational::zero()]; k];
        for (jj, &j) in self.kept.iter().enumerate() {
            let q = Rational::from_integer(self.scale[jj].into());
            let mut set: BTreeSet<Rational> = BTreeSet::new();
            set.insert(Rational::zero());
            for w in &psi.cuts()[jj] {
                for tau in &self.tau {
                    for r in 0..self.scale[jj] {
                        set.insert(frac(&((w + &tau[jj] + Rational::from_integer(r.into())) / &q)));
                    }
                }
            }
            cuts[j] = set.into_iter().collect();
        }
        let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
        let probe = StepFunction::<Rational>::zero(self.source.clone()).regrid(cuts.clone());
        let mut values = Vec::with_capacity(probe.cell_count() * nf);
        for cell in multi_indices(&shape) {
            let mid = probe.cell_midpoint(&cell);
            for u in 0..nf {
                let (w, v) = self.project(&mid, u);
                values.push(psi.eval(&w, v));
            }
        }
        StepFunction::from_grid(self.source.clone(), cuts, values)
    }
}

/// Integrates out the torus coordinates in `dirs`.
fn average_out(f: &StepFunction<Rational>, dirs: &[usize]) -> Result<StepFunction<Rational>> {
    let k = f.group().torus_rank();
    let kept: Vec<usize> = (0..k).filter(|j| !dirs.contains(j)).collect();
    let group = CompactGroup::new(kept.len(), f.group().finite_part().to_vec())?;
    let nf = group.finite_order();
    let cuts: Vec<Vec<Rational>> = kept.iter().map(|&j| f.cuts()[j].clone()).collect();
    let out_shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
    let dropped_shape: Vec<usize> = dirs.iter().map(|&j| f.cuts()[j].len()).collect();
    let length = |j: usize, i: usize| -> Rational {
        let c = &f.cuts()[j];
        let hi = c.get(i + 1).cloned().unwrap_or_else(Rational::one);
        hi - &c[i]
    };
    let mut values = Vec::with_capacity(out_shape.iter().product::<usize>() * nf);
    for cell in multi_indices(&out_shape) {
        let mut full = vec![0usize; k];
        for (jj, &j) in kept.iter().enumerate() {
            full[j] = cell[jj];
        }
        for u in 0..nf {
            let mut acc: Complex<Rational> = Complex::zero();
            for sub in multi_indices(&dropped_shape) {
                let mut w = Rational::one();
                for (d, &j) in dirs.iter().enumerate() {
                    full[j] = sub[d];
                    w *= length(j, sub[d]);
                }
                acc = acc + f.value_at(&full, u).clone() * w;
            }
            values.push(acc);
        }
    }
    StepFunction::from_grid(group, cuts, values)
}

/// `b̄f(π(s)) = ∫_H f(s + t) dμ_H(t)` as a step function on `X/H`, with the
/// quotient map used. Cells are half-open, so the representative is
/// right-continuous on the measure-zero boundary set.
pub fn fiber_average(f: &StepFunction<Rational>, h: &SubgroupH) -> Result<(StepFunction<Rational>, Quotient)> {
    if f.group() != h.group() {
        return Err(Error::DomainMismatch);
    }
    let quotient = Quotient::new(h)?;
    let g = average_out(f, h.subtorus())?;
    let kept = &quotient.kept;
    let target = quotient.target.clone();
    let nf_src = f.group().finite_order();
    let torsion: Vec<(Vec<Rational>, usize)> = h
        .elements
        .iter()
        .map(|t| (kept.iter().map(|&j| t.torus[j].clone()).collect(), t.finite))
        .collect();
    let order = Rational::from_integer(BigInt::from(torsion.len()));
    let mut cuts: Vec<Vec<Rational>> = Vec::with_capacity(kept.len());
    for jj in 0..kept.len() {
        let q = Rational::from_integer(quotient.scale[jj].into());
        let mut set: BTreeSet<Rational> = BTreeSet::new();
        set.insert(Rational::zero());
        for c in &g.cuts()[jj] {
            for u in 0..nf_src {
                set.insert(frac(&(c * &q - &quotient.tau[u][jj])));
            }
        }
        cuts.push(set.into_iter().collect());
    }
    let shape: Vec<usize> = cuts.iter().map(Vec::len).collect();
    let probe = StepFunction::<Rational>::zero(target.clone()).regrid(cuts.clone());
    let mut values = Vec::with_capacity(probe.cell_count() * target.finite_order());
    for cell in multi_indices(&shape) {
        let w = probe.cell_midpoint(&cell);
        for &u0 in &quotient.reps {
            // A preimage x of w in the fiber over u0.
            let x: Vec<Rational> = w
                .iter()
                .enumerate()
                .map(|(jj, wj)| (wj + &quotient.tau[u0][jj]) / Rational::from_integer(quotient.scale[jj].into()))
                .collect();
            let mut acc: Complex<Rational> = Complex::zero();
            for (y, up) in &torsion {
                let pt: Vec<Rational> = x.iter().zip(y).map(|(a, b)| a + b).collect();
                acc = acc + g.eval(&pt, f.group().combine(u0, *up, false));
            }
            values.push(acc / order.clone());
        }
    }
    let psi = StepFunction::from_grid(target, cuts, values)?.simplify();
    Ok((psi, quotient))
}

/// Evidence attached to an aperiodization.
#[derive(Clone, Debug, Serialize)]
pub struct ApCertificate {
    pub kernel: SubgroupDescriptor,
    /// `‖φ* − ψ* ∘ π_H‖₁`, exact.
    pub residual: String,
    pub residual_is_zero: bool,
    /// `"exact-pass"` when `∫ ψ* = ∫ φ*` exactly.
    pub weil_check: String,
    pub quotient_kernel_trivial: bool,
}

impl ApCertificate {
    pub fn passed(&self) -> bool {
        self.residual_is_zero && self.weil_check == "exact-pass" && self.quotient_kernel_trivial
    }
}

/// Output of [`aperiodize`].
#[derive(Clone, Debug)]
pub struct Aperiodization {
    pub psi_star: StepFunction<Rational>,
    pub kernel: SubgroupH,
    pub quotient: Quotient,
    pub certificate: ApCertificate,
}

/// `ψ* = b̄ φ*` over `H = ker d_{φ*}`, with a certificate that `ψ*` is
/// aperiodic and `ψ* ∘ π_H = φ*` almost everywhere.
pub fn aperiodize(phi_star: &StepFunction<Rational>) -> Result<Aperiodization> {
    let kernel = crate::distance::kernel_subgroup(phi_star)?;
    let (psi_star, quotient) = fiber_average(phi_star, &kernel)?;
    let back = quotient.pullback(&psi_star)?;
    let residual = phi_star.l1_distance(&back)?;
    let residual_is_zero = residual.is_exact_zero();
    let weil_check = if psi_star.haar_integral() == phi_star.haar_integral() {
        "exact-pass"
    } else {
        "fail"
    };
    let quotient_kernel_trivial = crate::distance::kernel_subgroup(&psi_star)?.is_trivial();
    let certificate = ApCertificate {
        kernel: kernel.descriptor(),
        residual: match &residual {
            Magnitude::Exact(q) => q.to_string(),
            Magnitude::Approx(x) => format!("~{x}"),
        },
        residual_is_zero,
        weil_check: weil_check.to_string(),
        quotient_kernel_trivial,
    };
    Ok(Aperiodization {
        psi_star,
        kernel,
        quotient,
        certificate,
    })
}
