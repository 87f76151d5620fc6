//! JSON schemas for subgroups, compactifications, step functions and
//! trigonometric polynomials. Rationals are written as `"p/q"` strings so
//! that exact data round-trips.

use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::angle::CompactGroup;
use crate::error::{Error, Result};
use crate::group::{Certification, Compactification, SpectralSubgroup};
use crate::rational::{parse_rational, Rational};
use crate::spectrum::round12;
use crate::step::{Frequency, StepFunction, TrigPolynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupJson {
    pub generators: Vec<String>,
    pub exact: bool,
}

impl From<&SpectralSubgroup> for SubgroupJson {
    fn from(g: &SpectralSubgroup) -> Self {
        SubgroupJson {
            generators: g.generators().iter().map(|c| c.alpha().to_string()).collect(),
            exact: g.is_exact(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactificationJson {
    pub torus_rank: usize,
    pub finite_part: Vec<u64>,
    /// Free generators followed by `1/L` when the torsion part is non-trivial.
    pub generators: Vec<String>,
    pub certification: Certification,
}

impl From<&Compactification> for CompactificationJson {
    fn from(c: &Compactification) -> Self {
        CompactificationJson {
            torus_rank: c.torus_rank(),
            finite_part: c.finite_part().to_vec(),
            generators: c.coordinate_characters().iter().map(|g| g.alpha().to_string()).collect(),
            certification: c.certification(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunctionJson {
    pub torus_rank: usize,
    #[serde(default)]
    pub finite_part: Vec<u64>,
    /// Cut points per torus coordinate, each list starting at `"0"`.
    pub cuts: Vec<Vec<String>>,
    /// `[re, im]` per cell × finite element, cells in row-major order with
    /// the finite index fastest.
    pub values: Vec<[String; 2]>,
}

impl From<&StepFunction<Rational>> for StepFunctionJson {
    fn from(f: &StepFunction<Rational>) -> Self {
        StepFunctionJson {
            torus_rank: f.group().torus_rank(),
            finite_part: f.group().finite_part().to_vec(),
            cuts: f.cuts().iter().map(|c| c.iter().map(|q| q.to_string()).collect()).collect(),
            values: f.values().iter().map(|v| [v.re.to_string(), v.im.to_string()]).collect(),
        }
    }
}

impl StepFunctionJson {
    pub fn to_step(&self) -> Result<StepFunction<Rational>> {
        if self.cuts.len() != self.torus_rank {
            return Err(Error::invalid("one cut list per torus coordinate is required"));
        }
        let group = CompactGroup::new(self.torus_rank, self.finite_part.clone())?;
        let cuts = self
            .cuts
            .iter()
            .map(|c| c.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let values = self
            .values
            .iter()
            .map(|[re, im]| Ok(Complex::new(parse_rational(re)?, parse_rational(im)?)))
            .collect::<Result<Vec<_>>>()?;
        StepFunction::from_grid(group, cuts, values)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub torus: Vec<i64>,
    #[serde(default)]
    pub finite: Vec<u64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigJson {
    pub torus_rank: usize,
    #[serde(default)]
    pub finite_part: Vec<u64>,
    /// Sorted by frequency.
    pub terms: Vec<TermJson>,
}

impl From<&TrigPolynomial<f64>> for TrigJson {
    fn from(p: &TrigPolynomial<f64>) -> Self {
        TrigJson {
            torus_rank: p.group().torus_rank(),
            finite_part: p.group().finite_part().to_vec(),
            terms: p
                .terms()
                .iter()
                .map(|(f, c): (&Frequency, &Complex64)| TermJson {
                    torus: f.torus.clone(),
                    finite: f.finite.clone(),
                    re: round12(c.re),
                    im: round12(c.im),
                })
                .collect(),
        }
    }
}
