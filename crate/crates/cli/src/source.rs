//! Sequence sources shared by the subcommands.

use std::path::PathBuf;

use clap::Args;
use num_complex::Complex;

use hartman_core::json::StepFunctionJson;
use hartman_core::rational::{parse_rational, Rational};
use hartman_core::sequence::{character_sequence, cos2_product, cut_sequence, periodic};
use hartman_core::{induce_compactification, Angle, HartmanFunction, Realization, SpectralSubgroup};

use crate::Failure;

/// Exactly one sequence source.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// CSV samples with columns `n,re,im`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Arc cut sequence `1_[0,beta)(n alpha)`: `alpha=A beta=B`.
    #[arg(long, num_args = 2, value_names = ["alpha=A", "beta=B"], allow_hyphen_values = true)]
    pub cut: Option<Vec<String>>,
    /// `prod_{j<=n} cos^2(2 pi k / 3^j)`.
    #[arg(long)]
    pub cos2: Option<u32>,
    /// `e^{2 pi i n alpha}`.
    #[arg(long, allow_hyphen_values = true)]
    pub character: Option<String>,
    /// One period of rational values, comma separated.
    #[arg(long)]
    pub periodic: Option<String>,
    /// Step function JSON realized over the generators given with `--generators`.
    #[arg(long, requires = "generators")]
    pub step: Option<PathBuf>,
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    pub generators: Vec<String>,
}

pub fn angle(s: &str) -> Result<Angle, Failure> {
    Ok(Angle::parse(s)?)
}

pub fn read_step(path: &std::path::Path) -> Result<hartman_core::StepFunction<Rational>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let json: StepFunctionJson = serde_json::from_str(&text).map_err(|e| Failure::Invalid(e.to_string()))?;
    Ok(json.to_step()?)
}

fn key_value<'a>(items: &'a [String], key: &str) -> Result<&'a str, Failure> {
    items
        .iter()
        .find_map(|s| s.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Failure::Invalid(format!("--cut needs {key}=...")))
}

impl SourceArgs {
    pub fn load(&self) -> Result<HartmanFunction, Failure> {
        if let Some(path) = &self.input {
            return HartmanFunction::load_csv(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())));
        }
        if let Some(items) = &self.cut {
            let alpha = angle(key_value(items, "alpha")?)?;
            let beta = parse_rational(key_value(items, "beta")?)?;
            return Ok(cut_sequence(alpha, beta)?);
        }
        if let Some(n) = self.cos2 {
            return Ok(cos2_product(n)?);
        }
        if let Some(a) = &self.character {
            return Ok(character_sequence(angle(a)?, Complex::new(Rational::from_integer(1.into()), Rational::from_integer(0.into())))?);
        }
        if let Some(list) = &self.periodic {
            let values = list
                .split(',')
                .map(|v| Ok(Complex::new(parse_rational(v.trim())?, Rational::from_integer(0.into()))))
                .collect::<hartman_core::Result<Vec<_>>>()?;
            return Ok(periodic(values)?);
        }
        if let Some(path) = &self.step {
            let f = read_step(path)?;
            let gens = self.generators.iter().map(|g| angle(g)).collect::<Result<Vec<_>, _>>()?;
            let comp = induce_compactification(&SpectralSubgroup::from_angles(gens))?;
            if comp.group() != f.group() {
                return Err(Failure::Invalid(format!(
                    "step function lives on {} but the generators induce {}",
                    f.group(),
                    comp.group()
                )));
            }
            return Ok(HartmanFunction::realized(Realization::Step(f), comp)?);
        }
        Err(Failure::Invalid("no sequence source given".into()))
    }
}
