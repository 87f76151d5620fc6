//! End-to-end recovery of `C_{Γ(φ)}` from samples, and equivalence of
//! compactifications.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fejer::FejerOperator;
use crate::group::{covers, induce_compactification, Certification, Compactification, Membership, PresentationConfig, SpectralSubgroup};
use crate::lattice::{smith, IntMatrix};
use crate::mean::window_mean;
use crate::sequence::{HartmanFunction, Realization};
use crate::spectrum::{peak_compactification_with, round12, scan_window, SpectrumParams, SpectrumReport};
use crate::step::{Frequency, TrigPolynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructParams {
    pub radius: i64,
    pub theta: f64,
    /// Fejér order of the synthesized realization.
    pub order: u64,
    pub presentation: PresentationConfig,
}

impl Default for ReconstructParams {
    fn default() -> Self {
        ReconstructParams {
            radius: 100_000,
            theta: 1e-3,
            order: 256,
            presentation: PresentationConfig::default(),
        }
    }
}

/// One recovered frequency in the coordinates of `C_Γ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyFit {
    pub alpha: f64,
    pub rational: Option<String>,
    pub coords: Vec<i64>,
    pub torsion: u64,
    pub re: f64,
    pub im: f64,
    /// Fejér weight applied in the synthesis.
    pub weight: f64,
    /// Uncertainty of `alpha`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructReport {
    #[serde(rename = "N")]
    pub radius: i64,
    pub theta: f64,
    pub order: u64,
    pub generators: Vec<String>,
    pub torus_rank: usize,
    pub finite_part: Vec<u64>,
    pub certification: Certification,
    pub frequencies: Vec<FrequencyFit>,
    /// Window mean of `|fit − φ|` at the synthesis order.
    pub fitted_l1: f64,
    /// `(order, fitted L¹ error)` for increasing orders.
    pub l1_by_order: Vec<(u64, f64)>,
    /// Whether the synthesized frequencies generate all of Γ.
    pub kernel_trivial: bool,
    /// `"estimated"` for sampled input.
    pub kernel_check: String,
}

impl ReconstructReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut r = self.clone();
        r.fitted_l1 = round12(r.fitted_l1);
        for (_, e) in &mut r.l1_by_order {
            *e = round12(*e);
        }
        for f in &mut r.frequencies {
            f.alpha = round12(f.alpha);
            f.re = round12(f.re);
            f.im = round12(f.im);
            f.weight = round12(f.weight);
            f.residual = round12(f.residual);
        }
        serde_json::to_value(r).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub compactification: Compactification,
    pub realization: Realization,
    pub spectrum: SpectrumReport,
    pub report: ReconstructReport,
}

impl Reconstruction {
    pub fn function(&self) -> Result<HartmanFunction> {
        HartmanFunction::realized(self.realization.clone(), self.compactification.clone())
    }
}

/// `scan_spectrum → subgroup_of → C_Γ → Fejér synthesis` on the window
/// `[−N, N]` of `samples`.
pub fn reconstruct(samples: &HartmanFunction, params: &ReconstructParams) -> Result<Reconstruction> {
    if params.radius < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let values = samples.window(params.radius)?;
    let spectrum = scan_window(&values, &SpectrumParams::with_theta(params.theta))?;
    if spectrum.is_empty() {
        return constant_fit(&values, spectrum, params);
    }
    let comp = peak_compactification_with(&spectrum, &params.presentation)?;
    let k = comp.torus_rank();
    let op = FejerOperator::new(params.order, k)?;
    let mut coords = Vec::with_capacity(spectrum.peaks.len());
    for p in &spectrum.peaks {
        match comp.membership_with(p.character.alpha(), &params.presentation)?.0 {
            Membership::Member { coords: m, torsion } => coords.push((m, torsion)),
            Membership::NotMember => {
                return Err(Error::Uncertified(format!("peak {} is not in the presented Γ", p.alpha)))
            }
        }
    }
    let synth = |op: &FejerOperator| -> Result<TrigPolynomial<f64>> {
        let mut poly = TrigPolynomial::new(comp.group().clone());
        for (p, (m, t)) in spectrum.peaks.iter().zip(&coords) {
            let w = op.weight_f64(m);
            if w != 0.0 {
                poly.add_term(frequency(&comp, m, *t), p.coefficient * w)?;
            }
        }
        Ok(poly)
    };
    let mut orders: Vec<u64> = [params.order / 4, params.order / 2, params.order]
        .into_iter()
        .filter(|&n| n >= 1)
        .collect();
    orders.dedup();
    let mut l1_by_order = Vec::new();
    for &n in &orders {
        let poly = synth(&FejerOperator::new(n, k)?)?;
        l1_by_order.push((n, fitted_error(&values, &poly, &comp)?));
    }
    let poly = synth(&op)?;
    let fitted_l1 = l1_by_order.last().map(|&(_, e)| e).unwrap_or(f64::NAN);
    let active: Vec<&(Vec<i64>, u64)> = coords.iter().filter(|(m, _)| op.weight_f64(m) != 0.0).collect();
    let kernel_trivial = generates_everything(&active, k, comp.torsion_order())?;
    let frequencies = spectrum
        .peaks
        .iter()
        .zip(&coords)
        .map(|(p, (m, t))| FrequencyFit {
            alpha: p.alpha,
            rational: p.rational.as_rational().map(|q| q.to_string()),
            coords: m.clone(),
            torsion: *t,
            re: p.coefficient.re,
            im: p.coefficient.im,
            weight: op.weight_f64(m),
            residual: p.residual,
        })
        .collect();
    let report = ReconstructReport {
        radius: params.radius,
        theta: params.theta,
        order: params.order,
        generators: comp.coordinate_characters().iter().map(|c| c.alpha().to_string()).collect(),
        torus_rank: k,
        finite_part: comp.finite_part().to_vec(),
        certification: comp.certification(),
        frequencies,
        fitted_l1,
        l1_by_order,
        kernel_trivial,
        kernel_check: "estimated".into(),
    };
    Ok(Reconstruction {
        compactification: comp,
        realization: Realization::TrigApprox(poly),
        spectrum,
        report,
    })
}

fn frequency(comp: &Compactification, m: &[i64], t: u64) -> Frequency {
    let finite = if comp.torsion_order() > 1 { vec![t] } else { vec![] };
    Frequency::new(m.to_vec(), finite)
}

fn fitted_error(values: &[Complex64], poly: &TrigPolynomial<f64>, comp: &Compactification) -> Result<f64> {
    let radius = (values.len() / 2) as i64;
    let fit = HartmanFunction::realized(Realization::TrigApprox(poly.clone()), comp.clone())?.window(radius)?;
    let diff: Vec<Complex64> = fit.iter().zip(values).map(|(a, b)| Complex64::new((a - b).norm(), 0.0)).collect();
    Ok(window_mean(&diff)?.value.re)
}

fn constant_fit(values: &[Complex64], spectrum: SpectrumReport, params: &ReconstructParams) -> Result<Reconstruction> {
    let comp = induce_compactification(&SpectralSubgroup::trivial())?;
    let mean = window_mean(values)?.value;
    let poly = TrigPolynomial::from_terms(comp.group().clone(), [(Frequency::zero(comp.group()), mean)])?;
    let fitted_l1 = fitted_error(values, &poly, &comp)?;
    let report = ReconstructReport {
        radius: params.radius,
        theta: params.theta,
        order: params.order,
        generators: Vec::new(),
        torus_rank: 0,
        finite_part: Vec::new(),
        certification: comp.certification(),
        frequencies: Vec::new(),
        fitted_l1,
        l1_by_order: vec![(params.order, fitted_l1)],
        kernel_trivial: true,
        kernel_check: "estimated".into(),
    };
    Ok(Reconstruction {
        compactification: comp,
        realization: Realization::TrigApprox(poly),
        spectrum,
        report,
    })
}

/// Whether the vectors `(m, t)` generate `ℤ^k × ℤ/L`.
fn generates_everything(vectors: &[&(Vec<i64>, u64)], k: usize, l: u64) -> Result<bool> {
    let cols = k + usize::from(l > 1);
    if cols == 0 {
        return Ok(true);
    }
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|(m, t)| {
            let mut r: Vec<i128> = m.iter().map(|&x| x as i128).collect();
            if l > 1 {
                r.push(*t as i128);
            }
            r
        })
        .collect();
    if l > 1 {
        let mut r = vec![0i128; cols];
        r[k] = l as i128;
        rows.push(r);
    }
    if rows.len() < cols {
        return Ok(false);
    }
    let s = smith(&IntMatrix::from_rows(&rows))?;
    Ok(s.diagonal.len() == cols && s.diagonal.iter().all(|&d| d == 1))
}

/// Outcome of [`equivalence_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// `c1` is covered by `c2`.
    pub first_in_second: bool,
    pub second_in_first: bool,
    /// `(torus rank, invariant factors)` of each side.
    pub invariants: [(usize, Vec<u64>); 2],
    pub certification: Certification,
}

/// Two-sided cover test with invariant-factor normal forms compared.
pub fn equivalence_check(c1: &Compactification, c2: &Compactification) -> Result<Equivalence> {
    let first_in_second = covers(c1, c2)?;
    let second_in_first = covers(c2, c1)?;
    let invariants = [
        (c1.torus_rank(), c1.finite_part().to_vec()),
        (c2.torus_rank(), c2.finite_part().to_vec()),
    ];
    let equivalent = first_in_second && second_in_first && invariants[0] == invariants[1];
    Ok(Equivalence {
        equivalent,
        first_in_second,
        second_in_first,
        invariants,
        certification: crate::group::joint_certification(c1, c2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::rational::ratio;
    use crate::sequence::{character_sequence, cos2_product};
    use num_complex::Complex;
    use num_traits::One;

    fn comp(angles: Vec<Angle>) -> Compactification {
        induce_compactification(&SpectralSubgroup::from_angles(angles)).unwrap()
    }

    #[test]
    fn alternating_signs() {
        let f = character_sequence(Angle::rational(1, 2), Complex::one()).unwrap();
        let params = ReconstructParams {
            radius: 1000,
            ..Default::default()
        };
        let r = reconstruct(&f, &params).unwrap();
        assert_eq!(r.compactification.torus_rank(), 0);
        assert_eq!(r.compactification.finite_part(), &[2]);
        assert!(r.report.fitted_l1 < 1e-9);
        assert!(r.report.kernel_trivial);
        let g = r.function().unwrap();
        assert!((g.evaluate(1).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn cos2_period() {
        let f = cos2_product(3).unwrap();
        let params = ReconstructParams {
            radius: 27 * 40,
            ..Default::default()
        };
        let r = reconstruct(&f, &params).unwrap();
        assert_eq!(r.compactification.finite_part(), &[27]);
        assert_eq!(r.report.kernel_check, "estimated");
    }

    #[test]
    fn empty_spectrum_gives_constant() {
        let f = HartmanFunction::sampled(vec![Complex64::new(1e-6, 0.0); 201]).unwrap();
        let params = ReconstructParams {
            radius: 100,
            theta: 0.1,
            ..Default::default()
        };
        let r = reconstruct(&f, &params).unwrap();
        assert_eq!(r.compactification.torus_rank(), 0);
        assert!(r.compactification.finite_part().is_empty());
        assert!(r.report.fitted_l1 < 1e-15);
    }

    #[test]
    fn equivalences() {
        let a = Angle::quadratic(-1, 1, 2, 1).unwrap();
        let e = equivalence_check(&comp(vec![a.clone()]), &comp(vec![a.clone(), Angle::rational(1, 2)])).unwrap();
        assert!(!e.equivalent);
        assert!(e.first_in_second && !e.second_in_first);
        let e = equivalence_check(
            &comp(vec![Angle::rational(1, 2), Angle::rational(1, 3)]),
            &comp(vec![Angle::rational(1, 6)]),
        )
        .unwrap();
        assert!(e.equivalent);
        let _ = ratio(1, 2);
    }

    #[test]
    fn lattice_generation() {
        assert!(generates_everything(&[&(vec![2], 0), &(vec![3], 0)], 1, 1).unwrap());
        assert!(!generates_everything(&[&(vec![2], 0)], 1, 1).unwrap());
        assert!(generates_everything(&[&(vec![], 1)], 0, 4).unwrap());
        assert!(!generates_everything(&[&(vec![], 2)], 0, 4).unwrap());
    }
}
