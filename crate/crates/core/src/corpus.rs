//! Deterministic test corpora: rational step functions on `𝕋`, `𝕋²` and
//! `𝕋 × ℤ/2`, the supported subgroup shapes on each, and realized sequences.
//! Random members are drawn from a ChaCha stream seeded explicitly.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::angle::{Angle, CompactGroup};
use crate::error::Result;
use crate::group::{induce_compactification, SpectralSubgroup};
use crate::rational::{ratio, Rational};
use crate::sequence::{character_sequence, cos2_product, cut_sequence, periodic, HartmanFunction, Realization};
use crate::step::{Arc, Piece, StepFunction};
use crate::weil::{fiber_average, Quotient, SubgroupH, Translation};

pub const DEFAULT_SEED: u64 = 20_240_601;

const DENOMINATORS: [i64; 8] = [2, 3, 4, 5, 6, 7, 8, 12];

#[derive(Clone, Debug)]
pub struct StepCase {
    pub name: String,
    pub f: StepFunction<Rational>,
}

#[derive(Clone, Debug)]
pub struct WeilCase {
    pub name: String,
    pub f: StepFunction<Rational>,
    pub h: SubgroupH,
}

#[derive(Clone, Debug)]
pub struct SequenceCase {
    pub name: String,
    pub phi: HartmanFunction,
}

pub fn groups() -> Vec<(&'static str, CompactGroup)> {
    vec![
        ("T1", CompactGroup::torus(1)),
        ("T2", CompactGroup::torus(2)),
        ("T1xZ2", CompactGroup::new(1, vec![2]).expect("valid group")),
    ]
}

/// Random grid step function with up to three interior cuts per axis and
/// values in `{0, 1/6, …, 2}`; complex values when `complex`.
pub fn random_step(rng: &mut ChaCha8Rng, group: &CompactGroup, complex: bool) -> Result<StepFunction<Rational>> {
    let k = group.torus_rank();
    let cuts: Vec<Vec<Rational>> = (0..k)
        .map(|_| {
            let mut c = vec![Rational::zero()];
            for _ in 0..rng.random_range(1..=3) {
                let q = DENOMINATORS[rng.random_range(0..DENOMINATORS.len())];
                c.push(ratio(rng.random_range(1..q), q));
            }
            c.sort();
            c.dedup();
            c
        })
        .collect();
    let cells: usize = cuts.iter().map(Vec::len).product::<usize>() * group.finite_order();
    let value = |rng: &mut ChaCha8Rng| ratio(rng.random_range(0..=12), 6);
    let values = (0..cells)
        .map(|_| {
            let re = value(rng);
            let im = if complex { value(rng) - ratio(1, 1) } else { Rational::zero() };
            Complex::new(re, im)
        })
        .collect();
    StepFunction::from_grid(group.clone(), cuts, values)
}

fn t(torus: &[(i64, i64)], finite: usize) -> Translation {
    Translation {
        torus: torus.iter().map(|&(p, q)| ratio(p, q)).collect(),
        finite,
    }
}

/// Every supported shape of `H` exercised on `group`.
pub fn subgroup_shapes(group: &CompactGroup) -> Result<Vec<(String, SubgroupH)>> {
    let k = group.torus_rank();
    let f = group.finite_order();
    let mut out = vec![("trivial".to_string(), SubgroupH::trivial(group))];
    let mut add = |name: &str, sub: Vec<usize>, gens: Vec<Translation>| -> Result<()> {
        out.push((name.to_string(), SubgroupH::new(group, sub, gens)?));
        Ok(())
    };
    match (k, f) {
        (1, 1) => {
            add("half", vec![], vec![t(&[(1, 2)], 0)])?;
            add("third", vec![], vec![t(&[(1, 3)], 0)])?;
            add("sixth", vec![], vec![t(&[(1, 6)], 0)])?;
            add("whole-torus", vec![0], vec![])?;
        }
        (2, 1) => {
            add("subtorus-y", vec![1], vec![])?;
            add("subtorus-x", vec![0], vec![])?;
            add("half-x", vec![], vec![t(&[(1, 2), (0, 1)], 0)])?;
            add("third-y", vec![], vec![t(&[(0, 1), (1, 3)], 0)])?;
            add("halves-rectangle", vec![], vec![t(&[(1, 2), (0, 1)], 0), t(&[(0, 1), (1, 2)], 0)])?;
            add("subtorus-y-quarter-x", vec![1], vec![t(&[(1, 4), (0, 1)], 0)])?;
        }
        (1, 2) => {
            add("finite-part", vec![], vec![t(&[(0, 1)], 1)])?;
            add("twisted-half", vec![], vec![t(&[(1, 2)], 1)])?;
            add("twisted-quarter", vec![], vec![t(&[(1, 4)], 1)])?;
            add("third", vec![], vec![t(&[(1, 3)], 0)])?;
            add("torus-and-finite", vec![0], vec![t(&[(0, 1)], 1)])?;
        }
        _ => {}
    }
    Ok(out)
}

/// Pairs `(f, H)` over all groups and shapes, two functions per pair.
pub fn weil_corpus(seed: u64) -> Result<Vec<WeilCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (gname, g) in groups() {
        for (hname, h) in subgroup_shapes(&g)? {
            for i in 0..2 {
                out.push(WeilCase {
                    name: format!("{gname}/{hname}/{i}"),
                    f: random_step(&mut rng, &g, i == 1)?,
                    h: h.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Random functions, named examples, and `H`-invariant pullbacks for every
/// non-trivial supported shape. All values are non-negative reals.
pub fn step_corpus(seed: u64) -> Result<Vec<StepCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut out = Vec::new();
    for (gname, g) in groups() {
        for i in 0..3 {
            out.push(StepCase {
                name: format!("{gname}/random/{i}"),
                f: random_step(&mut rng, &g, false)?,
            });
        }
        for (hname, h) in subgroup_shapes(&g)? {
            if h.is_trivial() {
                continue;
            }
            let f = random_step(&mut rng, &g, false)?;
            let (psi, _) = fiber_average(&f, &h)?;
            let back = Quotient::new(&h)?.pullback(&psi)?.simplify();
            out.push(StepCase {
                name: format!("{gname}/invariant/{hname}"),
                f: back,
            });
        }
    }
    let t1 = CompactGroup::torus(1);
    out.push(StepCase {
        name: "T1/arc-third".into(),
        f: StepFunction::indicator(t1.clone(), vec![Arc::new(ratio(0, 1), ratio(1, 3))], vec![0])?,
    });
    out.push(StepCase {
        name: "T1/constant".into(),
        f: StepFunction::constant(t1, Complex::new(ratio(1, 1), Rational::zero())),
    });
    out.push(StepCase {
        name: "T2/box".into(),
        f: StepFunction::indicator(
            CompactGroup::torus(2),
            vec![Arc::new(ratio(0, 1), ratio(1, 3)), Arc::new(ratio(1, 4), ratio(3, 4))],
            vec![0],
        )?,
    });
    out.push(StepCase {
        name: "T1xZ2/shifted-arcs".into(),
        f: shifted_arcs()?,
    });
    Ok(out)
}

/// `1_{[0,1/3)}` on the even fiber and `1_{[1/2,5/6)}` on the odd fiber.
fn shifted_arcs() -> Result<StepFunction<Rational>> {
    let one = Complex::new(ratio(1, 1), Rational::zero());
    StepFunction::from_pieces(
        CompactGroup::new(1, vec![2])?,
        &[
            Piece {
                arcs: vec![Arc::new(ratio(0, 1), ratio(1, 3))],
                fiber: vec![0],
                value: one.clone(),
            },
            Piece {
                arcs: vec![Arc::new(ratio(1, 2), ratio(5, 6))],
                fiber: vec![1],
                value: one,
            },
        ],
    )
}

pub fn golden() -> Angle {
    Angle::quadratic(-1, 1, 5, 2).expect("valid literal")
}

pub fn silver() -> Angle {
    Angle::quadratic(-1, 1, 2, 1).expect("valid literal")
}

/// Realized sequences whose realizations are step functions.
pub fn step_sequences() -> Result<Vec<SequenceCase>> {
    let one = Complex::new(ratio(1, 1), Rational::zero());
    let zero = Complex::new(Rational::zero(), Rational::zero());
    let mut out = vec![
        SequenceCase {
            name: "cut(golden,1/3)".into(),
            phi: cut_sequence(golden(), ratio(1, 3))?,
        },
        SequenceCase {
            name: "cut(silver,1/4)".into(),
            phi: cut_sequence(silver(), ratio(1, 4))?,
        },
        SequenceCase {
            name: "periodic(1,0,0,1,1)".into(),
            phi: periodic(vec![one.clone(), zero.clone(), zero.clone(), one.clone(), one.clone()])?,
        },
    ];
    let c2 = induce_compactification(&SpectralSubgroup::from_angles([golden(), silver()]))?;
    let g2 = c2.group().clone();
    out.push(SequenceCase {
        name: "box(golden,silver)".into(),
        phi: HartmanFunction::realized(
            Realization::Step(StepFunction::indicator(
                g2.clone(),
                vec![Arc::new(ratio(0, 1), ratio(1, 3)), Arc::new(ratio(0, 1), ratio(1, 2))],
                vec![0],
            )?),
            c2.clone(),
        )?,
    });
    out.push(SequenceCase {
        name: "strip(golden,silver)".into(),
        phi: HartmanFunction::realized(
            Realization::Step(StepFunction::indicator(
                g2,
                vec![Arc::full(), Arc::new(ratio(0, 1), ratio(1, 3))],
                vec![0],
            )?),
            c2,
        )?,
    });
    let cz = induce_compactification(&SpectralSubgroup::from_angles([golden(), Angle::rational(1, 2)]))?;
    out.push(SequenceCase {
        name: "shifted-arcs(golden,1/2)".into(),
        phi: HartmanFunction::realized(Realization::Step(shifted_arcs()?), cz)?,
    });
    Ok(out)
}

/// Step sequences plus trigonometric ones.
pub fn sequence_corpus() -> Result<Vec<SequenceCase>> {
    let mut out = step_sequences()?;
    out.push(SequenceCase {
        name: "cos2_product(2)".into(),
        phi: cos2_product(2)?,
    });
    out.push(SequenceCase {
        name: "character(silver)".into(),
        phi: character_sequence(silver(), Complex::new(ratio(1, 1), Rational::zero()))?,
    });
    Ok(out)
}
