//! Translation distances `d_φ(g) = m(|φ − τ_g φ|)` on ℤ and
//! `d_{φ*}(x) = ‖φ* − τ_x φ*‖₁` on the compactification, kernel subgroups,
//! windowed filter sets, and the `Sub(φ)` envelope test.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::{Character, Point};
use crate::error::{Error, Result};
use crate::mean::{chunked_sum, window_coefficient};
use crate::rational::{frac, to_f64, Rational};
use crate::sequence::{HartmanFunction, Realization};
use crate::step::{l1_distance_any, Magnitude, StepFunction};
use crate::weil::{SubgroupH, Translation};

/// `(1/(2N+1)) Σ_{|n| ≤ N} |φ(n) − φ(n+g)|`.
pub fn distance_on_z(phi: &HartmanFunction, g: i64, radius: i64) -> Result<f64> {
    if radius < 1 {
        return Err(Error::invalid("N must be at least 1"));
    }
    phi.require_radius(radius + g.abs())?;
    let a = phi.sample(-radius, radius)?;
    let b = phi.sample(-radius + g, radius + g)?;
    let diffs: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| Complex64::new((x - y).norm(), 0.0)).collect();
    Ok(chunked_sum(&diffs).re / (2 * radius + 1) as f64)
}

/// `‖φ* − τ_x φ*‖₁`; exact for rational `x`.
pub fn distance_on_x(phi_star: &StepFunction<Rational>, x: &Point) -> Result<Magnitude> {
    if x.torus.len() != phi_star.group().torus_rank() || x.finite.len() != phi_star.group().finite_part().len() {
        return Err(Error::DomainMismatch);
    }
    l1_distance_any(phi_star, &phi_star.translate_point(x))
}

/// Estimates of `d_φ(g)` for `|g| ≤ G` from one window of radius `N + G`.
///
/// The stored value for `±g` is the mean of the two one-sided estimates,
/// so the profile is exactly symmetric.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceProfile {
    pub radius: i64,
    pub g_window: i64,
    /// `values[g + G]`.
    pub values: Vec<f64>,
    /// `sup |φ|` over the sampled window.
    pub sup: f64,
    #[serde(skip)]
    on_x: Option<StepFunction<Rational>>,
}

impl DistanceProfile {
    pub fn get(&self, g: i64) -> Option<f64> {
        (g.abs() <= self.g_window).then(|| self.values[(g + self.g_window) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i as i64 - self.g_window, v))
    }

    /// Exact `d_{φ*}(x)` when the source was realized by a rational step
    /// function.
    pub fn on_x(&self, x: &Point) -> Option<Result<Magnitude>> {
        self.on_x.as_ref().map(|f| distance_on_x(f, x))
    }

    /// Window-shift bound `2|g| sup|φ| / (2N+1)` on the estimator bias.
    pub fn shift_slack(&self, g: i64) -> f64 {
        2.0 * g.abs() as f64 * self.sup / (2 * self.radius + 1) as f64
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("g,value\n");
        for (g, v) in self.iter() {
            s.push_str(&format!("{g},{v:.12e}\n"));
        }
        s
    }
}

pub fn distance_profile(phi: &HartmanFunction, g_window: i64, radius: i64) -> Result<DistanceProfile> {
    if radius < 1 || g_window < 0 {
        return Err(Error::invalid("need N >= 1 and G >= 0"));
    }
    let outer = radius + g_window;
    phi.require_radius(outer)?;
    let w = phi.sample(-outer, outer)?;
    let m = (2 * radius + 1) as f64;
    let center = outer as usize;
    let r = radius as usize;
    let one_sided = |g: i64| -> f64 {
        let lo = center - r;
        let shifted = (lo as i64 + g) as usize;
        let diffs: Vec<Complex64> = (0..=2 * r)
            .map(|i| Complex64::new((w[lo + i] - w[shifted + i]).norm(), 0.0))
            .collect();
        chunked_sum(&diffs).re / m
    };
    let half: Vec<f64> = (0..=g_window)
        .into_par_iter()
        .map(|g| if g == 0 { 0.0 } else { 0.5 * (one_sided(g) + one_sided(-g)) })
        .collect();
    let values = (-g_window..=g_window).map(|g| half[g.unsigned_abs() as usize]).collect();
    let sup = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let on_x = match phi.realization() {
        Some(Realization::Step(f)) => Some(f.clone()),
        _ => None,
    };
    Ok(DistanceProfile {
        radius,
        g_window,
        values,
        sup,
        on_x,
    })
}

/// `{g : d̂_φ(g) < ε}` within `|g| ≤ G`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterSet {
    pub eps: f64,
    pub g_window: i64,
    pub members: Vec<i64>,
}

impl FilterSet {
    pub fn contains(&self, g: i64) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

pub fn filter_set_from_profile(profile: &DistanceProfile, eps: f64) -> Result<FilterSet> {
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    Ok(FilterSet {
        eps,
        g_window: profile.g_window,
        members: profile.iter().filter(|&(_, d)| d < eps).map(|(g, _)| g).collect(),
    })
}

pub fn filter_set(phi: &HartmanFunction, eps: f64, g_window: i64, radius: i64) -> Result<FilterSet> {
    filter_set_from_profile(&distance_profile(phi, g_window, radius)?, eps)
}

/// `ker d_{φ*} = {x : τ_x φ* = φ* a.e.}` for a rational step function.
///
/// The coordinate directions in which `φ*` is constant form the subtorus.
/// Any other kernel element `x` maps the essential cut set `E_j` of each
/// remaining coordinate onto itself, so `x_j ∈ e_0 − E_j`; each candidate,
/// combined with every finite element, is verified by exact comparison.
pub fn kernel_subgroup(phi_star: &StepFunction<Rational>) -> Result<SubgroupH> {
    let f = phi_star.simplify();
    let group = f.group().clone();
    let k = group.torus_rank();
    let subtorus: Vec<usize> = (0..k).filter(|&j| f.is_constant_in(j)).collect();
    let mut axes: Vec<Vec<Rational>> = Vec::with_capacity(k);
    for j in 0..k {
        if subtorus.contains(&j) {
            axes.push(vec![Rational::from_integer(0.into())]);
            continue;
        }
        let e = f.essential_cuts(j);
        let e0 = e[0].clone();
        let set: BTreeSet<Rational> = e.iter().map(|c| frac(&(&e0 - c))).collect();
        axes.push(set.into_iter().collect());
    }
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let nf = group.finite_order();
    let total = shape.iter().product::<usize>().saturating_mul(nf);
    if total > 1 << 22 {
        return Err(Error::Overflow("kernel candidate count"));
    }
    let candidates: Vec<(Vec<usize>, usize)> = crate::step::multi_indices(&shape)
        .flat_map(|cell| (0..nf).map(move |u| (cell.clone(), u)))
        .collect();
    let members: Vec<Translation> = candidates
        .par_iter()
        .filter_map(|(cell, u)| {
            let x: Vec<Rational> = cell.iter().enumerate().map(|(j, &i)| axes[j][i].clone()).collect();
            let t = Translation { torus: x, finite: *u };
            if t.is_zero() {
                return None;
            }
            f.translate(&t.torus, *u).ae_eq(&f).then_some(t)
        })
        .collect();
    SubgroupH::new(&group, subtorus, members)
}

/// Verdict of the `Sub(φ)` envelope test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubVerdict {
    ConsistentWithMembership,
    Inconsistent,
    Inconclusive,
}

/// Parameters of [`sub_membership_test`].
#[derive(Clone, Debug, Serialize)]
pub struct SubTestParams {
    pub g_window: i64,
    pub radius: i64,
    /// Decreasing `δ` grid; empty selects `sup|φ| · 2^{−i/2}`, `i = 0..48`.
    pub deltas: Vec<f64>,
    /// Envelope at the finest populated level below which the verdict is
    /// "consistent".
    pub accept: f64,
    /// Envelope at the finest populated level above which the verdict is
    /// "inconsistent".
    pub reject: f64,
    /// Between `accept` and `reject`, the verdict is still "consistent" when
    /// the envelope shrank by at least this factor over the finest six
    /// populated levels (three octaves of `δ`).
    pub decay: f64,
}

impl Default for SubTestParams {
    fn default() -> Self {
        SubTestParams {
            g_window: 1000,
            radius: 20_000,
            deltas: Vec::new(),
            accept: 0.1,
            reject: 0.5,
            decay: 4.0,
        }
    }
}

/// Envelope report for `χ ∈ Sub(φ)`.
#[derive(Clone, Debug, Serialize)]
pub struct SubReport {
    pub alpha: f64,
    pub g_window: i64,
    pub radius: i64,
    /// `m̂(φ χ̄)` over the same window.
    pub coefficient: Complex64,
    /// `(δ, E(δ))`, with `E(δ) = max{|1 − χ(g)| : 0 < |g| ≤ G, d̂(g) < δ}`;
    /// `None` when no `g ≠ 0` qualifies.
    pub envelope: Vec<(f64, Option<f64>)>,
    /// Envelope at the smallest `δ` with a member `g ≠ 0`.
    pub finest: Option<(f64, f64)>,
    pub verdict: SubVerdict,
    /// Largest `|1 − χ(g)| · |m̂(φχ̄)| − d̂(g) − slack(g)` over `|g| ≤ G`;
    /// non-positive when the inequality holds everywhere.
    pub max_violation: f64,
}

/// Populated `δ` levels inspected for the decay trend.
const TREND_LEVELS: usize = 6;

/// `e^{2πigα}` with `gα` reduced in double-double.
fn char_at(chi: &Character, g: i64) -> Complex64 {
    let t = crate::angle::mul_turns(chi.alpha().to_f64_pair(), g);
    Complex64::from_polar(1.0, std::f64::consts::TAU * t)
}

pub fn sub_membership_test(phi: &HartmanFunction, chi: &Character, params: &SubTestParams) -> Result<SubReport> {
    let profile = distance_profile(phi, params.g_window, params.radius)?;
    sub_membership_from_profile(phi, &profile, chi, params)
}

pub fn sub_membership_from_profile(
    phi: &HartmanFunction,
    profile: &DistanceProfile,
    chi: &Character,
    params: &SubTestParams,
) -> Result<SubReport> {
    let coefficient = window_coefficient(&phi.window(profile.radius)?, chi.alpha())?.value;
    let deltas: Vec<f64> = if params.deltas.is_empty() {
        let top = profile.sup.max(f64::MIN_POSITIVE);
        (0..48).map(|i| top * 2f64.powf(-(i as f64) / 2.0)).collect()
    } else {
        params.deltas.clone()
    };
    let gaps: Vec<(f64, f64)> = profile
        .iter()
        .filter(|&(g, _)| g != 0)
        .map(|(g, d)| (d, (Complex64::new(1.0, 0.0) - char_at(chi, g)).norm()))
        .collect();
    let envelope: Vec<(f64, Option<f64>)> = deltas
        .iter()
        .map(|&delta| {
            let e = gaps.iter().filter(|(d, _)| *d < delta).map(|(_, e)| *e).fold(None, |acc: Option<f64>, e| {
                Some(acc.map_or(e, |a| a.max(e)))
            });
            (delta, e)
        })
        .collect();
    let finest = envelope
        .iter()
        .filter_map(|&(d, e)| e.map(|e| (d, e)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let populated: Vec<f64> = envelope.iter().filter_map(|&(_, e)| e).collect();
    let decayed = populated.len() >= TREND_LEVELS && {
        let tail = &populated[populated.len() - TREND_LEVELS..];
        tail[0] >= params.decay * tail[TREND_LEVELS - 1]
    };
    let verdict = match finest {
        None => SubVerdict::Inconclusive,
        Some((_, e)) if e <= params.accept => SubVerdict::ConsistentWithMembership,
        Some((_, e)) if e >= params.reject => SubVerdict::Inconsistent,
        Some(_) if decayed => SubVerdict::ConsistentWithMembership,
        Some(_) => SubVerdict::Inconclusive,
    };
    let c = coefficient.norm();
    let max_violation = profile
        .iter()
        .map(|(g, d)| (Complex64::new(1.0, 0.0) - char_at(chi, g)).norm() * c - d - profile.shift_slack(g) - 1e-12)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SubReport {
        alpha: chi.alpha().to_f64(),
        g_window: profile.g_window,
        radius: profile.radius,
        coefficient,
        envelope,
        finest,
        verdict,
        max_violation,
    })
}

/// Outcome of the windowed check that filter sets refine pulled-back
/// neighborhoods, and conversely for aperiodic realizations.
#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodCheck {
    /// `(ε, members, worst d_{φ*}(ι(g)) − ε)`; passes when every excess is
    /// below the estimation slack.
    pub forward: Vec<(f64, usize, f64)>,
    /// `(r, ε(r), members, all inside ‖ι(g)‖ < r)`.
    pub reverse: Vec<(f64, f64, usize, bool)>,
    pub slack: f64,
    pub passed: bool,
}

/// `min {d_{φ*}(x) : ‖x‖ ≥ r}`, exact.
///
/// `d_{φ*}` is multilinear on the boxes cut out by the pairwise cut
/// differences, so the minimum over the closed set `‖x‖ ≥ r` is attained at
/// a vertex of that grid refined by `±r`. Points off the identity component
/// have infinite norm.
pub fn min_distance_outside(phi_star: &StepFunction<Rational>, r: &Rational) -> Result<Rational> {
    let f = phi_star.simplify();
    let group = f.group().clone();
    let k = group.torus_rank();
    let grids: Vec<Vec<Rational>> = (0..k)
        .map(|j| {
            let c = &f.cuts()[j];
            let mut set: BTreeSet<Rational> = BTreeSet::new();
            for a in c {
                for b in c {
                    set.insert(frac(&(a - b)));
                }
            }
            set.insert(frac(r));
            set.insert(frac(&-r));
            set.into_iter().collect()
        })
        .collect();
    let shape: Vec<usize> = grids.iter().map(Vec::len).collect();
    let nf = group.finite_order();
    let points: Vec<(Vec<usize>, usize)> = crate::step::multi_indices(&shape)
        .flat_map(|cell| (0..nf).map(move |u| (cell.clone(), u)))
        .collect();
    let best = points
        .par_iter()
        .filter_map(|(cell, u)| {
            let x: Vec<Rational> = cell.iter().enumerate().map(|(j, &i)| grids[j][i].clone()).collect();
            let outside = *u != 0
                || x.iter().any(|y| {
                    let n = if y * Rational::from_integer(2.into()) > Rational::from_integer(1.into()) {
                        Rational::from_integer(1.into()) - y
                    } else {
                        y.clone()
                    };
                    n >= *r
                });
            if !outside {
                return None;
            }
            match f.l1_distance(&f.translate(&x, *u)) {
                Ok(Magnitude::Exact(q)) => Some(Ok(q)),
                Ok(Magnitude::Approx(_)) => Some(Err(Error::NotExact)),
                Err(e) => Some(Err(e)),
            }
        })
        .collect::<Result<Vec<Rational>>>()?;
    best.into_iter()
        .min()
        .ok_or_else(|| Error::invalid("no point of norm at least r"))
}

/// Finite check that `F(φ, ε)` lands in `{x : d_{φ*}(x) < ε + slack}` and,
/// for aperiodic `φ*`, that `F(φ, ε(r) − slack) ⊆ {g : ‖ι(g)‖ < r}`.
pub fn neighborhood_check(
    phi: &HartmanFunction,
    profile: &DistanceProfile,
    eps: &[f64],
    radii: &[Rational],
    slack: f64,
) -> Result<NeighborhoodCheck> {
    let (Some(Realization::Step(f)), Some(comp)) = (phi.realization(), phi.compactification()) else {
        return Err(Error::invalid("neighborhood check needs a step realization"));
    };
    let embed: Vec<Point> = (-profile.g_window..=profile.g_window).map(|g| comp.embed(g)).collect();
    let point = |g: i64| &embed[(g + profile.g_window) as usize];
    let mut passed = true;
    let mut forward = Vec::new();
    for &e in eps {
        let fs = filter_set_from_profile(profile, e)?;
        let worst = fs
            .members
            .par_iter()
            .map(|&g| distance_on_x(f, point(g)).map(|d| d.to_f64() - e))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        passed &= worst < slack;
        forward.push((e, fs.members.len(), worst));
    }
    let mut reverse = Vec::new();
    if kernel_subgroup(f)?.is_trivial() {
        for r in radii {
            let e = to_f64(&min_distance_outside(f, r)?) - slack;
            if e <= 0.0 {
                return Err(Error::invalid(format!("radius {r} is below the estimation slack")));
            }
            let fs = filter_set_from_profile(profile, e)?;
            let rf = to_f64(r);
            let inside = fs.members.iter().all(|&g| point(g).norm() < rf);
            passed &= inside;
            reverse.push((rf, e + slack, fs.members.len(), inside));
        }
    }
    Ok(NeighborhoodCheck {
        forward,
        reverse,
        slack,
        passed,
    })
}
