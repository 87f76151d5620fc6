//! Spectrum extraction: FFT scan, local refinement and the generated subgroup.
//!
//! The window coefficient `C(α) = (1/M) Σ_{|n| ≤ N} x_n e^{−2πinα}`, `M = 2N+1`,
//! is evaluated off the FFT grid through Taylor moments
//! `m_p[j] = (1/M) Σ x_n (n/N)^p e^{−2πinj/M}`, so that
//! `C(j/M + δ) = Σ_p m_p[j] (−2πiNδ)^p / p!`.
//! Peaks are found greedily: each candidate is refined on the residual
//! spectrum with the Dirichlet leakage of the accepted peaks removed, then
//! Gauss–Seidel sweeps re-refine every peak against all others.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::angle::{Angle, Character};
use crate::error::{Error, Result};
use crate::group::{induce_with, Compactification, PresentationConfig, SpectralSubgroup};
use crate::rational::{certify_rational, RationalClass};
use crate::sequence::HartmanFunction;

pub use crate::rational::classify_rationality;

/// Number of Taylor moments; the series is evaluated for `|δ| ≤ 1.5/M`.
const MOMENTS: usize = 36;
/// Candidates beyond this count indicate a non-sparse spectrum at θ.
const MAX_CANDIDATES: usize = 200_000;
/// Bins used to estimate the residual noise floor.
const NOISE_BINS: usize = 1024;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumParams {
    pub theta: f64,
    /// Golden-section tolerance in frequency.
    pub refine_tol: f64,
    pub sweeps: usize,
    /// Largest denominator tried when certifying a peak as rational.
    pub denominator_bound: u64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        SpectrumParams {
            theta: 1e-3,
            refine_tol: 1e-10,
            sweeps: 2,
            denominator_bound: 1_000_000,
        }
    }
}

impl SpectrumParams {
    pub fn with_theta(theta: f64) -> Self {
        SpectrumParams {
            theta,
            ..Self::default()
        }
    }

    /// Peaks closer than this are one frequency.
    pub fn dedup_tol(&self) -> f64 {
        10.0 * self.refine_tol
    }
}

/// One refined spectral peak.
#[derive(Clone, Debug, PartialEq)]
pub struct Peak {
    /// Exact rational when certified, otherwise a float with `tol = residual`.
    pub character: Character,
    pub alpha: f64,
    pub coefficient: Complex64,
    /// Uncertainty of `alpha`.
    pub residual: f64,
    pub rational: RationalClass,
}

impl Peak {
    pub fn magnitude(&self) -> f64 {
        self.coefficient.norm()
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Sorted by `alpha` in `[0, 1)`.
    pub peaks: Vec<Peak>,
    pub theta: f64,
    pub radius: i64,
    /// Median magnitude of the residual spectrum.
    pub noise_floor: f64,
}

#[derive(Serialize)]
struct PeakJson {
    alpha: f64,
    rational: Option<String>,
    re: f64,
    im: f64,
    magnitude: f64,
    residual: f64,
}

#[derive(Serialize)]
struct ReportJson {
    theta: f64,
    #[serde(rename = "N")]
    radius: i64,
    noise_floor: f64,
    peaks: Vec<PeakJson>,
    generators: Vec<String>,
}

/// Rounds to 12 significant digits so that serialized reports are stable.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

impl SpectrumReport {
    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// Peaks ordered by decreasing magnitude.
    pub fn by_magnitude(&self) -> Vec<&Peak> {
        let mut v: Vec<&Peak> = self.peaks.iter().collect();
        v.sort_by(|a, b| b.magnitude().total_cmp(&a.magnitude()).then(a.alpha.total_cmp(&b.alpha)));
        v
    }

    pub fn find(&self, alpha: f64, tol: f64) -> Option<&Peak> {
        self.peaks.iter().find(|p| circular_distance(p.alpha, alpha) <= tol)
    }

    /// `Σ |c|²` over the peaks.
    pub fn energy(&self) -> f64 {
        self.peaks.iter().map(|p| p.coefficient.norm_sqr()).sum()
    }

    pub fn to_json(&self, generators: &SpectralSubgroup) -> serde_json::Value {
        let peaks = self
            .peaks
            .iter()
            .map(|p| PeakJson {
                alpha: round12(p.alpha),
                rational: p.rational.as_rational().map(|q| q.to_string()),
                re: round12(p.coefficient.re),
                im: round12(p.coefficient.im),
                magnitude: round12(p.magnitude()),
                residual: round12(p.residual),
            })
            .collect();
        let generators = generators.generators().iter().map(|g| g.alpha().to_string()).collect();
        serde_json::to_value(ReportJson {
            theta: self.theta,
            radius: self.radius,
            noise_floor: round12(self.noise_floor),
            peaks,
            generators,
        })
        .expect("report serializes")
    }
}

pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Normalized Dirichlet kernel `(1/M) Σ_{|n| ≤ N} e^{2πinδ}`, 1-periodic.
pub fn dirichlet(m: usize, delta: f64) -> f64 {
    let d = delta - delta.round();
    let mf = m as f64;
    let s = (PI * d).sin();
    if s.abs() < 1e-7 {
        let x = PI * d;
        return 1.0 - (mf * mf - 1.0) * x * x / 6.0;
    }
    (PI * mf * d).sin() / (mf * s)
}

/// `(0, 1)` peak-resolution floor: `sup|φ| / (2πN)`.
pub fn resolution_floor(sup: f64, radius: i64) -> f64 {
    sup / (2.0 * PI * radius as f64)
}

/// Scans `spec φ` above `θ` from the window `[−N, N]`.
pub fn scan_spectrum(phi: &HartmanFunction, radius: i64, theta: f64) -> Result<SpectrumReport> {
    scan_spectrum_with(phi, radius, &SpectrumParams::with_theta(theta))
}

pub fn scan_spectrum_with(phi: &HartmanFunction, radius: i64, params: &SpectrumParams) -> Result<SpectrumReport> {
    if radius < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let values = phi.window(radius)?;
    scan_window(&values, params)
}

/// Scans a symmetric window `values[i] = φ(i − N)`.
pub fn scan_window(values: &[Complex64], params: &SpectrumParams) -> Result<SpectrumReport> {
    let theta = params.theta;
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::invalid("theta must be positive"));
    }
    if values.len() % 2 == 0 || values.len() < 3 {
        return Err(Error::invalid("a symmetric window has an odd number of samples, at least 3"));
    }
    let m = values.len();
    let radius = (m / 2) as i64;
    let sup = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = resolution_floor(sup, radius);
    if theta < floor {
        return Err(Error::BelowResolution { theta, floor });
    }
    let mut moments = Moments::new(values);
    let cands = moments.candidates(theta / 2.0)?;
    moments.fill(&cands);
    let mut engine = Clean {
        mom: &moments,
        peaks: Vec::new(),
        tol: params.refine_tol,
    };
    engine.greedy(theta / 2.0);
    for _ in 0..params.sweeps {
        engine.sweep();
        engine.peaks.retain(|p| p.coef.norm() >= theta / 2.0);
    }
    // Final sweep after dropping sub-threshold peaks records the last shifts.
    engine.peaks.retain(|p| p.coef.norm() >= theta);
    engine.sweep();
    engine.peaks.retain(|p| p.coef.norm() >= theta);
    engine.dedup(params.dedup_tol());
    let noise = engine.noise_floor();

    let count = engine.peaks.len().max(1) as f64;
    let mut peaks: Vec<Peak> = engine
        .peaks
        .iter()
        .map(|p| {
            let alpha = p.alpha().rem_euclid(1.0);
            let alpha = if alpha >= 1.0 { 0.0 } else { alpha };
            // Unmodelled leakage of size η moves the maximizer by about
            // 3η / (π |c| M); the bound carries a factor 2 margin.
            let leak = 6.0 * noise / (PI * p.coef.norm() * m as f64);
            let residual = params.refine_tol.max(p.shift).max(leak);
            // The denominator cap shrinks with the number of peaks so that a
            // chance rational match stays unlikely across the whole report.
            let cap = (1.0 / (100.0 * residual * count)).sqrt().floor().max(1.0);
            let bound = params.denominator_bound.min(cap as u64);
            let rational = match certify_rational(alpha, residual, bound) {
                RationalClass::IrrationalTo { .. } => RationalClass::IrrationalTo {
                    bound: params.denominator_bound.min(cap as u64),
                },
                r => r,
            };
            let character = match rational.as_rational() {
                Some(q) => Character(Angle::from_rational(&q)),
                None => Character(Angle::float_with_tol(alpha, residual)),
            };
            Peak {
                character,
                alpha,
                coefficient: p.coef,
                residual,
                rational,
            }
        })
        .collect();
    peaks.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(SpectrumReport {
        peaks,
        theta,
        radius,
        noise_floor: noise,
    })
}

/// The subgroup generated by the peak characters, in the reduced
/// presentation of its compactification.
pub fn subgroup_of(report: &SpectrumReport) -> Result<SpectralSubgroup> {
    Ok(SpectralSubgroup::new(peak_compactification(report)?.coordinate_characters()))
}

/// `C_Γ` for the subgroup generated by the peaks, strongest peaks first.
pub fn peak_compactification(report: &SpectrumReport) -> Result<Compactification> {
    peak_compactification_with(report, &PresentationConfig::default())
}

pub fn peak_compactification_with(report: &SpectrumReport, cfg: &PresentationConfig) -> Result<Compactification> {
    let gamma = SpectralSubgroup::new(report.by_magnitude().into_iter().map(|p| p.character.clone()).collect());
    induce_with(&gamma, cfg)
}

/// FFT moments of a window.
struct Moments<'a> {
    values: &'a [Complex64],
    m: usize,
    radius: usize,
    /// `C` on the FFT grid.
    grid: Vec<Complex64>,
    /// For each candidate bin: `m_p / p!` for `p < MOMENTS`.
    series: Vec<(usize, [Complex64; MOMENTS])>,
}

impl<'a> Moments<'a> {
    fn new(values: &'a [Complex64]) -> Self {
        let m = values.len();
        let radius = m / 2;
        let grid = Self::transform(values, radius, 0);
        Moments {
            values,
            m,
            radius,
            grid,
            series: Vec::new(),
        }
    }

    /// `(1/M) Σ x_n (n/N)^p e^{−2πinj/M}` for all `j`.
    fn transform(values: &[Complex64], radius: usize, p: usize) -> Vec<Complex64> {
        let m = values.len();
        let nf = radius as f64;
        let mut buf: Vec<Complex64> = values
            .iter()
            .enumerate()
            .map(|(i, x)| {
                if p == 0 {
                    *x
                } else {
                    x * ((i as f64 - nf) / nf).powi(p as i32)
                }
            })
            .collect();
        let mut planner = FftPlanner::new();
        planner.plan_fft_forward(m).process(&mut buf);
        // Index i carries n = i − N, so multiply by e^{2πi N j / M}.
        let mf = m as f64;
        buf.par_iter_mut().enumerate().for_each(|(j, v)| {
            let k = ((radius as u128 * j as u128) % m as u128) as f64;
            let (s, c) = (2.0 * PI * k / mf).sin_cos();
            *v = *v * Complex64::new(c, s) / mf;
        });
        buf
    }

    /// Local maxima of `|C|` on the grid with magnitude at least `level`.
    fn candidates(&self, level: f64) -> Result<Vec<usize>> {
        let m = self.m;
        let mag: Vec<f64> = self.grid.iter().map(|c| c.norm()).collect();
        let mut out: Vec<usize> = (0..m)
            .filter(|&j| {
                let v = mag[j];
                if v < level {
                    return false;
                }
                if m < 3 {
                    return true;
                }
                let l = mag[(j + m - 1) % m];
                let r = mag[(j + 1) % m];
                v > l && v >= r
            })
            .collect();
        if out.len() > MAX_CANDIDATES {
            return Err(Error::Invalid(format!(
                "{} spectral candidates above θ/2; the spectrum is not sparse at this threshold",
                out.len()
            )));
        }
        out.sort_by(|&a, &b| mag[b].total_cmp(&mag[a]).then(a.cmp(&b)));
        Ok(out)
    }

    fn fill(&mut self, cands: &[usize]) {
        let mut series: Vec<(usize, [Complex64; MOMENTS])> = cands
            .iter()
            .map(|&j| {
                let mut s = [Complex64::new(0.0, 0.0); MOMENTS];
                s[0] = self.grid[j];
                (j, s)
            })
            .collect();
        let mut fact = 1.0;
        for p in 1..MOMENTS {
            fact *= p as f64;
            let t = Self::transform(self.values, self.radius, p);
            for (j, s) in series.iter_mut() {
                s[p] = t[*j] / fact;
            }
        }
        self.series = series;
    }

    fn bin_alpha(&self, idx: usize) -> f64 {
        self.series[idx].0 as f64 / self.m as f64
    }

    /// `C(j/M + δ)` for candidate `idx`, valid for `|δ| ≤ 1.5/M`.
    fn eval(&self, idx: usize, delta: f64) -> Complex64 {
        let z = Complex64::new(0.0, -2.0 * PI * self.radius as f64 * delta);
        let s = &self.series[idx].1;
        let mut acc = s[MOMENTS - 1];
        for p in (0..MOMENTS - 1).rev() {
            acc = acc * z + s[p];
        }
        acc
    }
}

#[derive(Clone, Debug)]
struct Found {
    idx: usize,
    bin: f64,
    delta: f64,
    coef: Complex64,
    shift: f64,
}

impl Found {
    fn alpha(&self) -> f64 {
        self.bin + self.delta
    }
}

struct Clean<'a, 'b> {
    mom: &'b Moments<'a>,
    peaks: Vec<Found>,
    tol: f64,
}

impl Clean<'_, '_> {
    fn leakage(&self, alpha: f64, skip: Option<usize>) -> Complex64 {
        let m = self.mom.m;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, p) in self.peaks.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            acc += p.coef * dirichlet(m, alpha - p.alpha());
        }
        acc
    }

    fn residual(&self, idx: usize, bin: f64, delta: f64, skip: Option<usize>) -> Complex64 {
        self.mom.eval(idx, delta) - self.leakage(bin + delta, skip)
    }

    /// Maximizes `|R|` over `[lo, hi]` in δ: grid search, then golden section.
    fn refine(&self, idx: usize, bin: f64, lo: f64, hi: f64, skip: Option<usize>) -> (f64, Complex64) {
        let f = |d: f64| self.residual(idx, bin, d, skip).norm();
        let steps = 16;
        let h = (hi - lo) / steps as f64;
        let mut best = (lo, f(lo));
        for i in 1..=steps {
            let d = lo + h * i as f64;
            let v = f(d);
            if v > best.1 {
                best = (d, v);
            }
        }
        let (mut a, mut b) = ((best.0 - h).max(lo), (best.0 + h).min(hi));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > self.tol {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = f(d);
            }
        }
        let x = if fc >= fd { c } else { d };
        let x = if f(x) >= best.1 { x } else { best.0 };
        (x, self.residual(idx, bin, x, skip))
    }

    fn greedy(&mut self, level: f64) {
        let m = self.mom.m as f64;
        for idx in 0..self.mom.series.len() {
            let bin = self.mom.bin_alpha(idx);
            let probe = [-0.5 / m, 0.0, 0.5 / m]
                .iter()
                .map(|&d| self.residual(idx, bin, d, None).norm())
                .fold(0.0, f64::max);
            if probe < level {
                continue;
            }
            let (delta, coef) = self.refine(idx, bin, -1.0 / m, 1.0 / m, None);
            if coef.norm() < level {
                continue;
            }
            self.peaks.push(Found {
                idx,
                bin,
                delta,
                coef,
                shift: f64::INFINITY,
            });
        }
    }

    fn sweep(&mut self) {
        let m = self.mom.m as f64;
        for k in 0..self.peaks.len() {
            let p = self.peaks[k].clone();
            let lo = (p.delta - 0.25 / m).max(-1.5 / m);
            let hi = (p.delta + 0.25 / m).min(1.5 / m);
            let (delta, coef) = self.refine(p.idx, p.bin, lo, hi, Some(k));
            let q = &mut self.peaks[k];
            q.shift = (delta - p.delta).abs();
            q.delta = delta;
            q.coef = coef;
        }
    }

    fn dedup(&mut self, tol: f64) {
        let mut order: Vec<usize> = (0..self.peaks.len()).collect();
        order.sort_by(|&a, &b| self.peaks[b].coef.norm().total_cmp(&self.peaks[a].coef.norm()));
        let mut kept: Vec<Found> = Vec::new();
        for i in order {
            let p = &self.peaks[i];
            if kept.iter().all(|q| circular_distance(q.alpha(), p.alpha()) > tol) {
                kept.push(p.clone());
            }
        }
        self.peaks = kept;
    }

    /// Median of `|C − Σ c_l D|` over evenly spaced grid bins.
    fn noise_floor(&self) -> f64 {
        let m = self.mom.m;
        let count = NOISE_BINS.min(m);
        let mut r: Vec<f64> = (0..count)
            .into_par_iter()
            .map(|i| {
                let j = i * m / count;
                (self.mom.grid[j] - self.leakage(j as f64 / m as f64, None)).norm()
            })
            .collect();
        r.sort_by(f64::total_cmp);
        r[r.len() / 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::sequence::{character_sequence, cos2_product, cut_sequence, trig_sequence};
    use num_complex::Complex;
    use num_traits::Zero;

    fn cr(re: i64, im: i64) -> Complex<crate::rational::Rational> {
        Complex::new(ratio(re, 1), ratio(im, 1))
    }

    #[test]
    fn dirichlet_matches_direct_sum() {
        let m = 21;
        for &d in &[0.0, 1e-9, 0.013, 0.3, -0.47, 1.2] {
            let direct: f64 = (-10..=10).map(|n: i64| (2.0 * PI * n as f64 * d).cos()).sum::<f64>() / m as f64;
            assert!((dirichlet(m, d) - direct).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn taylor_moments_match_direct_coefficient() {
        let golden = Angle::quadratic(-1, 1, 5, 2).unwrap();
        let f = cut_sequence(golden, ratio(1, 3)).unwrap();
        let w = f.window(500).unwrap();
        let mut mom = Moments::new(&w);
        mom.fill(&[0, 7, 600]);
        for idx in 0..3 {
            for &d in &[-1.4e-3, -3e-4, 0.0, 5e-4, 1.4e-3] {
                let alpha = mom.bin_alpha(idx) + d;
                let direct: Complex64 = w
                    .iter()
                    .enumerate()
                    .map(|(i, x)| x * Complex64::from_polar(1.0, -2.0 * PI * (i as f64 - 500.0) * alpha))
                    .sum::<Complex64>()
                    / w.len() as f64;
                assert!((mom.eval(idx, d) - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_character() {
        let golden = Angle::quadratic(-1, 1, 5, 2).unwrap();
        let f = character_sequence(golden.clone(), cr(3, 0)).unwrap();
        let r = scan_spectrum(&f, 10_000, 1e-3).unwrap();
        assert_eq!(r.peaks.len(), 1);
        let p = &r.peaks[0];
        assert!((p.alpha - golden.to_f64()).abs() < 1e-10);
        assert!((p.coefficient - Complex64::new(3.0, 0.0)).norm() < 1e-8);
        assert!(matches!(p.rational, RationalClass::IrrationalTo { .. }));
    }

    #[test]
    fn trig_polynomial_recovery() {
        let terms = vec![
            (Angle::rational(1, 7), cr(1, 0)),
            (Angle::quadratic(-1, 1, 2, 1).unwrap(), cr(0, 1)),
            (Angle::rational(0, 1), cr(2, 0)),
        ];
        let f = trig_sequence(&terms).unwrap();
        let r = scan_spectrum(&f, 20_000, 1e-3).unwrap();
        assert_eq!(r.peaks.len(), 3);
        for (a, c) in &terms {
            let p = r.find(a.to_f64(), 1e-8).expect("peak");
            let expect = Complex64::new(crate::rational::to_f64(&c.re), crate::rational::to_f64(&c.im));
            assert!((p.coefficient - expect).norm() < 1e-6);
        }
        assert_eq!(r.find(1.0 / 7.0, 1e-8).unwrap().rational, RationalClass::Rational { num: 1, den: 7 });
    }

    #[test]
    fn cos2_spectrum_is_cyclic() {
        for n in 1..=3u32 {
            let f = cos2_product(n).unwrap();
            let radius = 3i64.pow(n) * 100;
            let r = scan_spectrum(&f, radius, 1e-3).unwrap();
            assert_eq!(r.peaks.len(), 3usize.pow(n));
            let c = peak_compactification(&r).unwrap();
            assert_eq!(c.torus_rank(), 0);
            assert_eq!(c.finite_part(), &[3u64.pow(n)]);
            let zero = r.find(0.0, 1e-9).unwrap();
            assert!((zero.coefficient.re - 1.0 / (1u64 << n) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn cut_sequence_peaks() {
        let golden = Angle::quadratic(-1, 1, 5, 2).unwrap();
        let f = cut_sequence(golden.clone(), ratio(1, 3)).unwrap();
        let r = scan_spectrum(&f, 20_000, 1e-2).unwrap();
        let expect = 3f64.sqrt() / (2.0 * PI);
        for k in [1i64, -1, 2, -2] {
            let p = r.find(golden.mul_int(k).to_f64(), 1e-6).expect("peak at kα");
            assert!((p.magnitude() - expect / k.abs() as f64).abs() < 1e-3);
        }
        assert!(r.find(golden.mul_int(3).to_f64(), 1e-4).is_none());
        let c = peak_compactification(&r).unwrap();
        assert_eq!(c.torus_rank(), 1);
        assert!(c.finite_part().is_empty());
        let h = c.free_generators()[0].to_f64();
        assert!(circular_distance(h, golden.to_f64()) < 1e-6);
    }

    #[test]
    fn empty_spectrum_gives_trivial_subgroup() {
        let f = trig_sequence(&[(Angle::rational(1, 3), Complex::new(ratio(1, 100_000), ratio(0, 1)))]).unwrap();
        let r = scan_spectrum(&f, 1000, 1e-2).unwrap();
        assert!(r.is_empty());
        assert!(subgroup_of(&r).unwrap().generators().is_empty());
        let _ = Complex64::zero();
    }

    #[test]
    fn below_resolution() {
        let f = character_sequence(Angle::rational(1, 3), cr(1, 0)).unwrap();
        assert!(matches!(scan_spectrum(&f, 100, 1e-4), Err(Error::BelowResolution { .. })));
    }

    #[test]
    fn round12_is_stable() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0).to_string(), "0.333333333333");
    }
}
