//! The invariant mean on ℤ as symmetric Cesàro averages, Fourier-Bohr
//! coefficients, and the exact Haar-integral oracle.

use std::f64::consts::TAU;

use num_complex::{Complex, Complex64};
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::{mul_turns, Angle, Character};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sequence::{HartmanFunction, Realization};

/// Fixed chunk length for parallel sums; keeps results independent of the
/// thread count.
const CHUNK: usize = 4096;

/// A Cesàro estimate with its dyadic sub-window history.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub value: Complex64,
    pub window_radius: i64,
    /// `(r, mean over [−r, r])` for `r = N, N/2, N/4, …, 1`.
    pub diagnostic: Vec<(i64, Complex64)>,
}

impl MeanEstimate {
    /// Largest deviation of the sub-window means from the final value over
    /// the first `levels` halvings.
    pub fn spread(&self, levels: usize) -> f64 {
        self.diagnostic
            .iter()
            .take(levels + 1)
            .map(|(_, v)| (v - self.value).norm())
            .fold(0.0, f64::max)
    }
}

/// Deterministic sum of a slice.
pub fn chunked_sum(values: &[Complex64]) -> Complex64 {
    let partial: Vec<Complex64> = values.par_chunks(CHUNK).map(|c| c.iter().sum()).collect();
    partial.iter().sum()
}

/// Mean over a symmetric window `values[i] = φ(i − N)`.
pub fn window_mean(values: &[Complex64]) -> Result<MeanEstimate> {
    if values.len() % 2 == 0 {
        return Err(Error::invalid("a symmetric window has an odd number of samples"));
    }
    let n = (values.len() / 2) as i64;
    if n < 1 {
        return Err(Error::invalid("window radius must be at least 1"));
    }
    let mut diagnostic = Vec::new();
    let mut r = n;
    while r >= 1 {
        let lo = (n - r) as usize;
        let hi = (n + r) as usize;
        let m = chunked_sum(&values[lo..=hi]) / (2 * r + 1) as f64;
        diagnostic.push((r, m));
        r /= 2;
    }
    Ok(MeanEstimate {
        value: diagnostic[0].1,
        window_radius: n,
        diagnostic,
    })
}

/// `(1/(2N+1)) Σ_{|n| ≤ N} φ(n)` with dyadic diagnostics.
pub fn cesaro_mean(phi: &HartmanFunction, radius: i64) -> Result<MeanEstimate> {
    if radius < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    window_mean(&phi.window(radius)?)
}

/// `e^{−2πinα}` for `n = lo..=hi`, with `nα` reduced in double-double.
pub fn conjugate_character_window(alpha: &Angle, lo: i64, hi: i64) -> Vec<Complex64> {
    let pair = alpha.to_f64_pair();
    (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let (s, c) = (TAU * mul_turns(pair, n)).sin_cos();
            Complex64::new(c, -s)
        })
        .collect()
}

/// Mean of `φ · χ̄` over a symmetric window.
pub fn window_coefficient(values: &[Complex64], alpha: &Angle) -> Result<MeanEstimate> {
    let n = (values.len() / 2) as i64;
    let chi = conjugate_character_window(alpha, -n, n);
    let prod: Vec<Complex64> = values.par_iter().zip(&chi).map(|(v, c)| v * c).collect();
    window_mean(&prod)
}

/// Estimate of `m(φ χ̄)`.
pub fn fourier_coefficient(phi: &HartmanFunction, chi: &Character, radius: i64) -> Result<MeanEstimate> {
    if radius < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    window_coefficient(&phi.window(radius)?, chi.alpha())
}

/// The exact invariant mean: the Haar integral of an exact realization.
pub fn exact_mean(phi: &HartmanFunction) -> Result<Complex<Rational>> {
    match phi.realization() {
        Some(Realization::Step(f)) => Ok(f.haar_integral()),
        Some(Realization::Trig(p)) => Ok(p.haar_integral()),
        Some(Realization::TrigApprox(_)) => Err(Error::NotExact),
        None => Err(Error::NotExact),
    }
}

/// Exact average of one period of rational values.
pub fn exact_period_mean(period: &[Complex<Rational>]) -> Result<Complex<Rational>> {
    if period.is_empty() {
        return Err(Error::invalid("empty period"));
    }
    let sum = period
        .iter()
        .fold(Complex::new(Rational::from_integer(0.into()), Rational::from_integer(0.into())), |a, b| a + b);
    Ok(sum / Rational::from_integer((period.len() as i64).into()))
}
