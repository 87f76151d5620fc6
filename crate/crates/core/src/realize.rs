//! Realization on the minimal compactification `C_{Γ(φ)}`.
//!
//! Trigonometric realizations carry `Γ(φ)` in their frequencies. For step
//! functions `Γ(φ)` is the annihilator of the period group, so the
//! aperiodization `ψ*` on `X/H` is a realization on a compactification
//! equivalent to `C_{Γ(φ)}`; its Fejér means are transported to the
//! coordinates of `C_{Γ(φ)}`.

use num_complex::Complex64;

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::fejer::{
    fejer_residual_l2_sq, fejer_step, fejer_trig, grid_l1_distance, FejerOperator,
};
use crate::group::{induce_compactification, Compactification, Membership, SpectralSubgroup};
use crate::rational::{to_f64, Rational};
use crate::sequence::{frequency_of, HartmanFunction, Realization};
use crate::step::{Frequency, TrigPolynomial};
use crate::weil::{aperiodize, Aperiodization};

/// Largest number of grid points used for the step-route residual.
const RESIDUAL_POINTS: usize = 1 << 21;

/// How the smoothing residual was obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Residual {
    /// `‖σ_n φ* − φ*‖₂²` exactly; its square root bounds the `L¹` residual.
    ExactL2Sq(Rational),
    /// Midpoint-rule `‖σ_n ψ* − ψ*‖₁` on a grid with `points` cells.
    Quadrature { l1: f64, points: usize },
}

impl Residual {
    /// An estimate of (exact case: upper bound for) `‖σ_n φ* − φ*‖₁`.
    pub fn l1(&self) -> f64 {
        match self {
            Residual::ExactL2Sq(q) => to_f64(q).sqrt(),
            Residual::Quadrature { l1, .. } => *l1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GammaRealization {
    pub gamma: SpectralSubgroup,
    /// `C_{Γ(φ)}`.
    pub compactification: Compactification,
    /// `φ*` transported exactly, for trigonometric inputs.
    pub exact: Option<Realization>,
    /// The aperiodization behind a step-function input.
    pub aperiodization: Option<Aperiodization>,
    /// `σ_n` of the realization, on `C_{Γ(φ)}`.
    pub smoothed: Realization,
    pub order: u64,
    pub residual: Residual,
}

impl GammaRealization {
    pub fn smoothed_function(&self) -> Result<HartmanFunction> {
        HartmanFunction::realized(self.smoothed.clone(), self.compactification.clone())
    }
}

/// Computes `Γ(φ)`, builds `C_{Γ(φ)}` and returns the Fejér mean of order
/// `order` of the realization there.
pub fn realize_on_gamma(phi: &HartmanFunction, order: u64) -> Result<GammaRealization> {
    let (realization, comp) = match phi {
        HartmanFunction::Realized { realization, comp } => (realization, comp),
        HartmanFunction::Sampled { .. } => return Err(Error::NotExact),
    };
    match realization {
        Realization::Trig(p) => realize_trig(p, comp, order),
        Realization::Step(f) => {
            let ap = aperiodize(f)?;
            let (torus, finite) = ap.quotient.image_angles(&comp.free_generators())?;
            let psi = &ap.psi_star;
            let gamma = SpectralSubgroup::from_angles(torus.iter().chain(&finite).cloned());
            let c_gamma = induce_compactification(&gamma)?;
            let k = psi.group().torus_rank();
            let op = FejerOperator::new(order, k)?;
            let smooth = fejer_step(&op, psi)?;
            let map = CoordinateMap::new(&c_gamma, &torus, &finite)?;
            let mut out = TrigPolynomial::new(c_gamma.group().clone());
            for (f, c) in smooth.terms() {
                out.add_term(map.apply(f), *c)?;
            }
            let g = residual_grid(k, order);
            let l1 = grid_l1_distance(&smooth, psi, g)?;
            let points = g.pow(k as u32) * psi.group().finite_order();
            Ok(GammaRealization {
                gamma,
                compactification: c_gamma,
                exact: None,
                aperiodization: Some(ap),
                smoothed: Realization::TrigApprox(out),
                order,
                residual: Residual::Quadrature { l1, points },
            })
        }
        Realization::TrigApprox(_) => Err(Error::NotExact),
    }
}

fn realize_trig(p: &TrigPolynomial<Rational>, comp: &Compactification, order: u64) -> Result<GammaRealization> {
    let angles: Vec<(Angle, &num_complex::Complex<Rational>)> = p
        .terms()
        .iter()
        .map(|(f, c)| (comp.character_of(&f.torus, f.finite.first().copied().unwrap_or(0)), c))
        .collect();
    let gamma = SpectralSubgroup::from_angles(angles.iter().map(|(a, _)| a.clone()));
    let c_gamma = induce_compactification(&gamma)?;
    let mut q = TrigPolynomial::new(c_gamma.group().clone());
    for (a, c) in &angles {
        q.add_term(frequency_of(&c_gamma, a)?, (*c).clone())?;
    }
    let op = FejerOperator::new(order, c_gamma.torus_rank())?;
    let smoothed = fejer_trig(&op, &q)?;
    let residual = Residual::ExactL2Sq(fejer_residual_l2_sq(&op, &q)?);
    Ok(GammaRealization {
        gamma,
        compactification: c_gamma,
        exact: Some(Realization::Trig(q)),
        aperiodization: None,
        smoothed: Realization::Trig(smoothed),
        order,
        residual,
    })
}

fn residual_grid(k: usize, order: u64) -> usize {
    if k == 0 {
        return 1;
    }
    let want = (8 * order as usize).max(1024);
    let cap = (RESIDUAL_POINTS as f64).powf(1.0 / k as f64).floor() as usize;
    want.min(cap).max(1)
}

/// Linear map from characters of `X/H` to characters of `C_Γ`, given the
/// images of the coordinate characters.
struct CoordinateMap {
    torus: Vec<(Vec<i64>, u64)>,
    finite: Vec<(Vec<i64>, u64)>,
    modulus: u64,
    rank: usize,
}

impl CoordinateMap {
    fn new(c: &Compactification, torus: &[Angle], finite: &[Angle]) -> Result<Self> {
        let coords = |a: &Angle| -> Result<(Vec<i64>, u64)> {
            match c.membership(a)?.0 {
                Membership::Member { coords, torsion } => Ok((coords, torsion)),
                Membership::NotMember => Err(Error::Uncertified(format!("{a} is not in Γ"))),
            }
        };
        Ok(CoordinateMap {
            torus: torus.iter().map(coords).collect::<Result<_>>()?,
            finite: finite.iter().map(coords).collect::<Result<_>>()?,
            modulus: c.torsion_order().max(1),
            rank: c.torus_rank(),
        })
    }

    fn apply(&self, f: &Frequency) -> Frequency {
        let mut m = vec![0i64; self.rank];
        let l = self.modulus as i128;
        let mut t: i128 = 0;
        let parts = f
            .torus
            .iter()
            .map(|&x| x as i128)
            .zip(&self.torus)
            .chain(f.finite.iter().map(|&x| x as i128).zip(&self.finite));
        for (x, (cm, ct)) in parts {
            for (slot, &c) in m.iter_mut().zip(cm) {
                *slot += (x * c as i128) as i64;
            }
            t = (t + x * *ct as i128).rem_euclid(l);
        }
        let finite = if self.modulus > 1 { vec![t as u64] } else { vec![] };
        Frequency::new(m, finite)
    }
}

/// Largest `|φ_a(n) − φ_b(n)|` for `|n| ≤ radius`.
pub fn sup_difference(a: &HartmanFunction, b: &HartmanFunction, radius: i64) -> Result<f64> {
    let wa = a.window(radius)?;
    let wb = b.window(radius)?;
    Ok(wa.iter().zip(&wb).map(|(x, y): (&Complex64, &Complex64)| (x - y).norm()).fold(0.0, f64::max))
}
