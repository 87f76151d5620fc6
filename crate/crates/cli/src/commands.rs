//! Subcommand bodies. Every report is JSON with floats rounded to twelve
//! significant digits, so identical inputs give byte-identical output.

use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};

use hartman_core::corpus;
use hartman_core::distance::{distance_profile, filter_set_from_profile, sub_membership_from_profile};
use hartman_core::fejer::{fejer_step, grid_l1_norm, grid_min_re};
use hartman_core::json::{CompactificationJson, StepFunctionJson, TrigJson};
use hartman_core::spectrum::round12;
use hartman_core::{
    aperiodize as aperiodize_core, cesaro_mean, equivalence_check, exact_mean, fiber_average, fourier_coefficient,
    induce_compactification, reconstruct as reconstruct_core, scan_spectrum, subgroup_of, Character, FejerOperator,
    HartmanFunction, ReconstructParams, SpectralSubgroup, SubTestParams, SubVerdict,
};

use crate::source::{angle, read_step, SourceArgs};
use crate::{Failure, Output, Window};

const DEFAULT_RADIUS: i64 = 100_000;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// Exact Weil formula over every supported subgroup shape.
    Weil,
    /// Aperiodization certificates.
    Aperiodize,
    /// Fejer positivity and norm bound.
    Fejer,
}

fn radius(phi: &HartmanFunction, w: Window) -> i64 {
    w.radius.or(phi.radius()).unwrap_or(DEFAULT_RADIUS)
}

/// Rounds every float in `v` to twelve significant digits.
fn fixed(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(round12(n.as_f64().unwrap_or(0.0))),
        Value::Array(a) => Value::Array(a.into_iter().map(fixed).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, fixed(v))).collect()),
        other => other,
    }
}

fn report(v: Value, decided: bool) -> Result<Output, Failure> {
    let text = serde_json::to_string_pretty(&fixed(v)).map_err(|e| Failure::Invalid(e.to_string()))?;
    Ok(Output {
        text: text + "\n",
        decided,
    })
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn generate(source: &SourceArgs, radius: i64, out: Option<&Path>) -> Result<Output, Failure> {
    let phi = source.load()?;
    if let Some(path) = out {
        phi.save_csv(radius, path)?;
        return Ok(Output {
            text: String::new(),
            decided: true,
        });
    }
    let mut buf = Vec::new();
    phi.write_csv(radius, &mut buf)?;
    Ok(Output {
        text: String::from_utf8(buf).map_err(|e| Failure::Invalid(e.to_string()))?,
        decided: true,
    })
}

pub fn mean(source: &SourceArgs, w: Window) -> Result<Output, Failure> {
    let phi = source.load()?;
    let n = radius(&phi, w);
    let est = cesaro_mean(&phi, n)?;
    let exact = exact_mean(&phi).ok().map(|c| json!({ "re": c.re.to_string(), "im": c.im.to_string() }));
    report(
        json!({
            "N": n,
            "re": est.value.re,
            "im": est.value.im,
            "exact": exact,
            "diagnostic": est.diagnostic.iter().map(|(r, v)| json!([r, v.re, v.im])).collect::<Vec<_>>(),
        }),
        true,
    )
}

pub fn coeff(source: &SourceArgs, w: Window, alpha: &str) -> Result<Output, Failure> {
    let phi = source.load()?;
    let n = radius(&phi, w);
    let a = angle(alpha)?;
    let est = fourier_coefficient(&phi, &Character::new(a.clone()), n)?;
    report(
        json!({
            "N": n,
            "alpha": a.to_string(),
            "re": est.value.re,
            "im": est.value.im,
            "magnitude": est.value.norm(),
        }),
        true,
    )
}

pub fn spectrum(source: &SourceArgs, w: Window, theta: f64) -> Result<Output, Failure> {
    let phi = source.load()?;
    let n = radius(&phi, w);
    let rep = scan_spectrum(&phi, n, theta)?;
    let gamma = subgroup_of(&rep)?;
    let comp = induce_compactification(&gamma)?;
    let mut v = rep.to_json(&gamma);
    v["compactification"] = to_value(&CompactificationJson::from(&comp));
    report(v, true)
}

pub fn distance(source: &SourceArgs, w: Window, g_window: i64) -> Result<Output, Failure> {
    let phi = source.load()?;
    let profile = distance_profile(&phi, g_window, radius(&phi, w))?;
    Ok(Output {
        text: profile.to_csv(),
        decided: true,
    })
}

pub fn filter_set(source: &SourceArgs, w: Window, g_window: i64, eps: f64) -> Result<Output, Failure> {
    if !(eps > 0.0) {
        return Err(Failure::Invalid("eps must be positive".into()));
    }
    let phi = source.load()?;
    let n = radius(&phi, w);
    let fs = filter_set_from_profile(&distance_profile(&phi, g_window, n)?, eps)?;
    let mut v = to_value(&fs);
    v["N"] = json!(n);
    report(v, true)
}

pub fn subgroup_test(
    source: &SourceArgs,
    w: Window,
    g_window: i64,
    alpha: &str,
    envelope_csv: Option<&Path>,
) -> Result<Output, Failure> {
    let phi = source.load()?;
    let params = SubTestParams {
        g_window,
        radius: radius(&phi, w),
        ..SubTestParams::default()
    };
    let profile = distance_profile(&phi, params.g_window, params.radius)?;
    let rep = sub_membership_from_profile(&phi, &profile, &Character::new(angle(alpha)?), &params)?;
    if let Some(path) = envelope_csv {
        let mut s = String::from("delta,envelope\n");
        for (d, e) in &rep.envelope {
            match e {
                Some(e) => s.push_str(&format!("{d:.12e},{e:.12e}\n")),
                None => s.push_str(&format!("{d:.12e},\n")),
            }
        }
        std::fs::write(path, s).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    }
    report(to_value(&rep), rep.verdict != SubVerdict::Inconclusive)
}

pub fn fejer(step: &Path, n: u64, grid: usize) -> Result<Output, Failure> {
    let f = read_step(step)?;
    let op = FejerOperator::new(n, f.group().torus_rank())?;
    let p = fejer_step(&op, &f)?;
    report(
        json!({
            "order": n,
            "input_l1": f.l1_norm().to_f64(),
            "grid": grid,
            "grid_l1": grid_l1_norm(&p, grid)?,
            "grid_min_re": grid_min_re(&p, grid)?,
            "polynomial": to_value(&TrigJson::from(&p)),
        }),
        true,
    )
}

pub fn aperiodize(step: &Path) -> Result<Output, Failure> {
    let f = read_step(step)?;
    let ap = aperiodize_core(&f)?;
    report(
        json!({
            "psi_star": to_value(&StepFunctionJson::from(&ap.psi_star)),
            "certificate": to_value(&ap.certificate),
        }),
        ap.certificate.passed(),
    )
}

pub fn reconstruct(source: &SourceArgs, w: Window, theta: f64, order: u64, compare: &[String]) -> Result<Output, Failure> {
    let phi = source.load()?;
    let params = ReconstructParams {
        radius: radius(&phi, w),
        theta,
        order,
        ..ReconstructParams::default()
    };
    let r = reconstruct_core(&phi, &params)?;
    let mut v = r.report.to_json();
    if !compare.is_empty() {
        let gens = compare.iter().map(|g| angle(g)).collect::<Result<Vec<_>, _>>()?;
        let reference = induce_compactification(&SpectralSubgroup::from_angles(gens))?;
        v["comparison"] = to_value(&equivalence_check(&r.compactification, &reference)?);
    }
    report(v, true)
}

pub fn verify(suite: Suite, seed: u64) -> Result<Output, Failure> {
    let mut lines = Vec::new();
    let mut all = true;
    match suite {
        Suite::Weil => {
            for c in corpus::weil_corpus(seed)? {
                let (psi, _) = fiber_average(&c.f, &c.h)?;
                let ok = psi.haar_integral() == c.f.haar_integral();
                all &= ok;
                lines.push(format!("{} {}", c.name, if ok { "exact-pass" } else { "fail" }));
            }
        }
        Suite::Aperiodize => {
            for c in corpus::step_corpus(seed)? {
                let ap = aperiodize_core(&c.f)?;
                let ok = ap.certificate.passed();
                all &= ok;
                lines.push(format!(
                    "{} {} kernel-order={} residual={}",
                    c.name,
                    if ok { "pass" } else { "fail" },
                    ap.kernel.descriptor().torsion_order,
                    ap.certificate.residual
                ));
            }
        }
        Suite::Fejer => {
            for c in corpus::step_corpus(seed)? {
                let op = FejerOperator::new(32, c.f.group().torus_rank())?;
                let p = fejer_step(&op, &c.f)?;
                let g = if c.f.group().torus_rank() > 1 { 64 } else { 256 };
                let min = grid_min_re(&p, g)?;
                let l1 = grid_l1_norm(&p, g)?;
                let bound = c.f.l1_norm().to_f64();
                let ok = min >= -1e-9 && l1 <= bound + 1e-9;
                all &= ok;
                lines.push(format!(
                    "{} {} min={:.3e} l1={:.12} input_l1={:.12}",
                    c.name,
                    if ok { "pass" } else { "fail" },
                    round12(min),
                    l1,
                    bound
                ));
            }
        }
    }
    lines.push(if all { "all passed".into() } else { "FAILED".into() });
    Ok(Output {
        text: lines.join("\n") + "\n",
        decided: all,
    })
}
