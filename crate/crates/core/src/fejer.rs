//! Fejér summation `σ_n` on `𝕋^k × F` acting on coefficient representations.
//!
//! `K_n(x) = ∏_j (1/n) (sin(nπx_j) / sin(πx_j))²`, so `∫ K_n = 1`, `K_n ≥ 0`
//! and `K̂_n(m) = ∏_j max(0, 1 − |m_j|/n)`. Finite-group characters are not
//! damped.

use std::f64::consts::{PI, TAU};

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::angle::CompactGroup;
use crate::error::{Error, Result};
use crate::rational::{frac, to_f64, Rational};
use crate::sequence::Realization;
use crate::step::{multi_indices, Frequency, StepFunction, TrigPolynomial};

/// Largest number of torus frequencies produced from a step function.
const MAX_FREQUENCIES: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FejerOperator {
    n: u64,
    k: usize,
}

impl FejerOperator {
    pub fn new(n: u64, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Fejér order must be at least 1"));
        }
        Ok(FejerOperator { n, k })
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    /// `K̂_n(m)`, exact.
    pub fn weight(&self, m: &[i64]) -> Rational {
        let n = Rational::from_integer((self.n as i64).into());
        m.iter().fold(Rational::one(), |acc, &mj| {
            let a = mj.unsigned_abs();
            if a >= self.n {
                Rational::zero()
            } else {
                acc * (Rational::one() - Rational::from_integer((a as i64).into()) / &n)
            }
        })
    }

    pub fn weight_f64(&self, m: &[i64]) -> f64 {
        let n = self.n as f64;
        m.iter().map(|&mj| (1.0 - mj.unsigned_abs() as f64 / n).max(0.0)).product()
    }

    /// `K_n(x)` from the closed form.
    pub fn kernel(&self, x: &[f64]) -> f64 {
        x.iter().map(|&t| fejer_1d(self.n, t)).product()
    }

    fn check(&self, group: &CompactGroup) -> Result<()> {
        if group.torus_rank() != self.k {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }
}

/// One-dimensional Fejér kernel `(1/n) (sin(nπt) / sin(πt))²`.
pub fn fejer_1d(n: u64, t: f64) -> f64 {
    let t = t - t.round();
    let nf = n as f64;
    let s = (PI * t).sin();
    if s.abs() < 1e-9 {
        return nf;
    }
    let r = (nf * PI * t).sin() / s;
    r * r / nf
}

/// `σ_n p`, exact.
pub fn fejer_trig(op: &FejerOperator, p: &TrigPolynomial<Rational>) -> Result<TrigPolynomial<Rational>> {
    op.check(p.group())?;
    TrigPolynomial::from_terms(
        p.group().clone(),
        p.terms().iter().filter_map(|(f, c)| {
            let w = op.weight(&f.torus);
            (!w.is_zero()).then(|| (f.clone(), c * w))
        }),
    )
}

pub fn fejer_trig_f64(op: &FejerOperator, p: &TrigPolynomial<f64>) -> Result<TrigPolynomial<f64>> {
    op.check(p.group())?;
    TrigPolynomial::from_terms(
        p.group().clone(),
        p.terms().iter().filter_map(|(f, c)| {
            let w = op.weight_f64(&f.torus);
            (w != 0.0).then(|| (f.clone(), c * w))
        }),
    )
}

/// `∫_a^b e^{−2πimx} dx` with the phases reduced exactly.
fn arc_integral(m: i64, a: &Rational, b: &Rational) -> Complex64 {
    if m == 0 {
        return Complex64::new(to_f64(&(b - a)), 0.0);
    }
    let mr = Rational::from_integer(m.into());
    let ea = Complex64::from_polar(1.0, -TAU * to_f64(&frac(&(&mr * a))));
    let eb = Complex64::from_polar(1.0, -TAU * to_f64(&frac(&(&mr * b))));
    (ea - eb) / Complex64::new(0.0, TAU * m as f64)
}

/// Fourier coefficients of `f` at all `(m, j)` with `|m_d| < n`, times the
/// Fejér weights.
pub fn fejer_step(op: &FejerOperator, f: &StepFunction<Rational>) -> Result<TrigPolynomial<f64>> {
    op.check(f.group())?;
    let group = f.group().clone();
    let k = group.torus_rank();
    let n = op.n as i64;
    let side = (2 * n - 1) as usize;
    let count = side.checked_pow(k as u32).unwrap_or(usize::MAX);
    if count > MAX_FREQUENCIES {
        return Err(Error::invalid(format!("Fejér order {n} on 𝕋^{k} exceeds the frequency budget")));
    }
    let shape = f.shape();
    // arcs[d][m + n − 1][i] = ∫ over the i-th cell of axis d.
    let arcs: Vec<Vec<Vec<Complex64>>> = (0..k)
        .map(|d| {
            let cuts = &f.cuts()[d];
            (-(n - 1)..n)
                .map(|m| {
                    (0..cuts.len())
                        .map(|i| {
                            let hi = cuts.get(i + 1).cloned().unwrap_or_else(Rational::one);
                            arc_integral(m, &cuts[i], &hi)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // Finite DFT of the values per cell: vhat[cell][j].
    let nf = group.finite_order();
    let elements: Vec<Vec<u64>> = (0..nf).map(|u| group.element(u)).collect();
    let moduli = group.finite_part().to_vec();
    let cells: Vec<Vec<usize>> = multi_indices(&shape).collect();
    let vhat: Vec<Vec<Complex64>> = cells
        .iter()
        .map(|cell| {
            (0..nf)
                .map(|j| {
                    let fj = &elements[j];
                    (0..nf)
                        .map(|u| {
                            let v = f.value_at(cell, u);
                            let t: f64 = fj
                                .iter()
                                .zip(&elements[u])
                                .zip(&moduli)
                                .map(|((&a, &b), &md)| ((a * b) % md) as f64 / md as f64)
                                .sum();
                            Complex64::new(to_f64(&v.re), to_f64(&v.im)) * Complex64::from_polar(1.0, -TAU * t)
                        })
                        .sum::<Complex64>()
                        / nf as f64
                })
                .collect()
        })
        .collect();
    let freqs: Vec<Vec<usize>> = multi_indices(&vec![side; k]).collect();
    let terms: Vec<(Frequency, Complex64)> = freqs
        .par_iter()
        .flat_map_iter(|idx| {
            let m: Vec<i64> = idx.iter().map(|&i| i as i64 - (n - 1)).collect();
            let w = op.weight_f64(&m);
            let mut acc = vec![Complex64::zero(); nf];
            if w != 0.0 {
                for (cell, vh) in cells.iter().zip(&vhat) {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for d in 0..k {
                        prod *= arcs[d][idx[d]][cell[d]];
                    }
                    for j in 0..nf {
                        acc[j] += prod * vh[j];
                    }
                }
            }
            let elements = &elements;
            acc.into_iter().enumerate().filter_map(move |(j, c)| {
                (c.norm() > 1e-15).then(|| (Frequency::new(m.clone(), elements[j].clone()), c * w))
            })
        })
        .collect();
    TrigPolynomial::from_terms(group, terms)
}

/// `σ_n` on any exact or floating realization.
pub fn fejer_apply(op: &FejerOperator, f: &Realization) -> Result<Realization> {
    Ok(match f {
        Realization::Step(s) => Realization::TrigApprox(fejer_step(op, s)?),
        Realization::Trig(p) => Realization::Trig(fejer_trig(op, p)?),
        Realization::TrigApprox(p) => Realization::TrigApprox(fejer_trig_f64(op, p)?),
    })
}

/// `‖p‖₂²` of an exact polynomial, by Parseval.
pub fn l2_norm_sq(p: &TrigPolynomial<Rational>) -> Rational {
    p.terms().values().fold(Rational::zero(), |acc, c| acc + &c.re * &c.re + &c.im * &c.im)
}

/// `‖σ_n p − p‖₂²`, exact.
pub fn fejer_residual_l2_sq(op: &FejerOperator, p: &TrigPolynomial<Rational>) -> Result<Rational> {
    op.check(p.group())?;
    Ok(p.terms().iter().fold(Rational::zero(), |acc, (f, c)| {
        let d = Rational::one() - op.weight(&f.torus);
        acc + &d * &d * (&c.re * &c.re + &c.im * &c.im)
    }))
}

/// Values of `p` at the cell midpoints `((i + 1/2)/g)` of a uniform grid,
/// one row-major block of `g^k` values per finite element.
pub fn sample_grid(p: &TrigPolynomial<f64>, g: usize) -> Result<Vec<Vec<Complex64>>> {
    let group = p.group();
    let k = group.torus_rank();
    if g == 0 {
        return Err(Error::invalid("grid size must be positive"));
    }
    let total = g.checked_pow(k as u32).ok_or(Error::Overflow("grid"))?;
    let nf = group.finite_order();
    let moduli = group.finite_part().to_vec();
    let elements: Vec<Vec<u64>> = (0..nf).map(|u| group.element(u)).collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(g);
    Ok(elements
        .iter()
        .map(|u| {
            let mut buf = vec![Complex64::zero(); total];
            for (f, c) in p.terms() {
                let t: f64 = f
                    .finite
                    .iter()
                    .zip(u)
                    .zip(&moduli)
                    .map(|((&j, &ui), &md)| ((j * ui) % md) as f64 / md as f64)
                    .sum();
                // Midpoint shift e^{2πi m/(2g)} per axis.
                let shift: f64 = f.torus.iter().map(|&m| m as f64 / (2.0 * g as f64)).sum();
                let idx = f
                    .torus
                    .iter()
                    .fold(0usize, |acc, &m| acc * g + m.rem_euclid(g as i64) as usize);
                buf[idx] += c * Complex64::from_polar(1.0, TAU * (t + shift));
            }
            // Separable inverse transform along each axis.
            for axis in 0..k {
                let stride = g.pow((k - 1 - axis) as u32);
                let mut line = vec![Complex64::zero(); g];
                for base in 0..total {
                    if (base / stride) % g != 0 {
                        continue;
                    }
                    for (i, slot) in line.iter_mut().enumerate() {
                        *slot = buf[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        buf[base + i * stride] = *v;
                    }
                }
            }
            buf
        })
        .collect())
}

/// Midpoint-rule `‖p − f‖₁` on a `g^k` grid.
pub fn grid_l1_distance(p: &TrigPolynomial<f64>, f: &StepFunction<Rational>, g: usize) -> Result<f64> {
    if p.group() != f.group() {
        return Err(Error::DomainMismatch);
    }
    let k = p.group().torus_rank();
    let vals = sample_grid(p, g)?;
    let flo = f.to_float();
    let nf = vals.len();
    let total = vals[0].len();
    let sum: f64 = (0..total)
        .into_par_iter()
        .map(|i| {
            let mut x = vec![0.0; k];
            let mut r = i;
            for d in (0..k).rev() {
                x[d] = ((r % g) as f64 + 0.5) / g as f64;
                r /= g;
            }
            (0..nf).map(|u| (vals[u][i] - flo.eval_f64(&x, u)).norm()).sum::<f64>()
        })
        .sum();
    Ok(sum / (total * nf) as f64)
}

/// Midpoint-rule `‖p‖₁` on a `g^k` grid.
pub fn grid_l1_norm(p: &TrigPolynomial<f64>, g: usize) -> Result<f64> {
    let vals = sample_grid(p, g)?;
    let count = (vals.len() * vals[0].len()) as f64;
    Ok(vals.iter().flatten().map(|v| v.norm()).sum::<f64>() / count)
}

/// Smallest real part of `p` on a `g^k` grid.
pub fn grid_min_re(p: &TrigPolynomial<f64>, g: usize) -> Result<f64> {
    Ok(sample_grid(p, g)?.iter().flatten().map(|v| v.re).fold(f64::INFINITY, f64::min))
}

/// Complex rational constant.
pub fn constant(group: CompactGroup, c: Complex<Rational>) -> Result<TrigPolynomial<Rational>> {
    TrigPolynomial::from_terms(group.clone(), [(Frequency::zero(&group), c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::step::Arc;

    fn one() -> Complex<Rational> {
        Complex::new(Rational::one(), Rational::zero())
    }

    #[test]
    fn constants_are_fixed() {
        let g = CompactGroup::torus(2);
        let p = constant(g, Complex::new(ratio(3, 7), ratio(-1, 2))).unwrap();
        for n in [1, 2, 64] {
            assert_eq!(fejer_trig(&FejerOperator::new(n, 2).unwrap(), &p).unwrap(), p);
        }
    }

    #[test]
    fn single_character_damping() {
        let g = CompactGroup::torus(1);
        let p = TrigPolynomial::from_terms(g.clone(), [(Frequency::new(vec![5], vec![]), one())]).unwrap();
        let q = fejer_trig(&FejerOperator::new(8, 1).unwrap(), &p).unwrap();
        assert_eq!(q.coefficient(&Frequency::new(vec![5], vec![])), Complex::new(ratio(3, 8), Rational::zero()));
        assert!(fejer_trig(&FejerOperator::new(5, 1).unwrap(), &p).unwrap().terms().is_empty());
    }

    #[test]
    fn kernel_has_unit_mass_and_is_nonnegative() {
        let op = FejerOperator::new(16, 1).unwrap();
        let g = 4096;
        let mass: f64 = (0..g).map(|i| op.kernel(&[i as f64 / g as f64])).sum::<f64>() / g as f64;
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((0..g).all(|i| op.kernel(&[(i as f64 + 0.3) / g as f64]) >= 0.0));
        assert_eq!(op.weight(&[0]), Rational::one());
    }

    #[test]
    fn finite_part_passes_through() {
        let g = CompactGroup::new(1, vec![3]).unwrap();
        let p = TrigPolynomial::from_terms(g, [(Frequency::new(vec![0], vec![2]), one())]).unwrap();
        assert_eq!(fejer_trig(&FejerOperator::new(4, 1).unwrap(), &p).unwrap(), p);
    }

    #[test]
    fn step_coefficients_of_an_arc() {
        let g = CompactGroup::torus(1);
        let f = StepFunction::indicator(g, vec![Arc::new(ratio(0, 1), ratio(1, 3))], vec![0]).unwrap();
        let p = fejer_step(&FejerOperator::new(4, 1).unwrap(), &f).unwrap();
        let c1 = p.coefficient(&Frequency::new(vec![1], vec![]));
        let w = Complex64::from_polar(1.0, -TAU / 3.0);
        let expect = (Complex64::new(1.0, 0.0) - w) / Complex64::new(0.0, TAU) * 0.75;
        assert!((c1 - expect).norm() < 1e-15);
        assert!(p.coefficient(&Frequency::new(vec![3], vec![])).norm() == 0.0);
        assert!((p.coefficient(&Frequency::new(vec![0], vec![])).re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn grid_sampling_matches_direct_evaluation() {
        let g = CompactGroup::new(2, vec![2]).unwrap();
        let p = TrigPolynomial::from_terms(
            g,
            [
                (Frequency::new(vec![1, -2], vec![1]), Complex64::new(0.5, 0.25)),
                (Frequency::new(vec![0, 3], vec![0]), Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let gsz = 8;
        let vals = sample_grid(&p, gsz).unwrap();
        for u in 0..2 {
            for i in 0..gsz * gsz {
                let x = [((i / gsz) as f64 + 0.5) / gsz as f64, ((i % gsz) as f64 + 0.5) / gsz as f64];
                assert!((vals[u][i] - p.eval(&x, &[u as u64])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn smoothing_an_indicator_stays_in_range() {
        let g = CompactGroup::torus(1);
        let f = StepFunction::indicator(g, vec![Arc::new(ratio(0, 1), ratio(1, 3))], vec![0]).unwrap();
        let mut prev = f64::INFINITY;
        for n in [8, 16, 32, 64] {
            let p = fejer_step(&FejerOperator::new(n, 1).unwrap(), &f).unwrap();
            assert!(grid_min_re(&p, 1024).unwrap() > -1e-12);
            let vals = sample_grid(&p, 1024).unwrap();
            assert!(vals[0].iter().all(|v| v.re <= 1.0 + 1e-12));
            let d = grid_l1_distance(&p, &f, 4096).unwrap();
            assert!(d < prev);
            prev = d;
        }
    }
}
