//! Acceptance suite: one pass/fail line per criterion, each with its runtime
//! budget. Exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex;
use num_traits::{One, Zero};

use hartman_core::corpus::{self, DEFAULT_SEED};
use hartman_core::distance::{distance_profile, neighborhood_check, sub_membership_from_profile};
use hartman_core::fejer::{fejer_step, grid_min_re, sample_grid, FejerOperator};
use hartman_core::rational::{ratio, Rational};
use hartman_core::sequence::{cos2_product, cut_sequence};
use hartman_core::spectrum::scan_spectrum;
use hartman_core::{
    cesaro_mean, equivalence_check, exact_mean, fiber_average, fourier_coefficient, induce_compactification,
    kernel_subgroup, reconstruct, subgroup_of, aperiodize, Angle, Character, ReconstructParams, SpectralSubgroup,
    StepFunction, SubTestParams, SubVerdict,
};

type Outcome = Result<String, String>;

fn golden_f64() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

fn circ(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    r.min(1.0 - r)
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c1_means() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=6u32 {
        let phi = cos2_product(n).map_err(|e| e.to_string())?;
        let m = exact_mean(&phi).map_err(|e| e.to_string())?;
        let expect = Complex::new(ratio(1, 1 << n), Rational::zero());
        if m != expect {
            return Err(format!("n={n}: exact mean {} + {}i", m.re, m.im));
        }
        let est = cesaro_mean(&phi, 3 * 729).map_err(|e| e.to_string())?;
        worst = worst.max((est.value - Complex::new(1.0 / (1u64 << n) as f64, 0.0)).norm());
    }
    check(worst <= 1e-3, format!("exact 2^-n for n=1..6, Cesaro worst error {worst:.2e}"))
}

fn c2_spectrum() -> Outcome {
    let mut orders = Vec::new();
    for n in 1..=4u32 {
        let phi = cos2_product(n).map_err(|e| e.to_string())?;
        let radius = 3i64.pow(n) * 100;
        let report = scan_spectrum(&phi, radius, 1e-3).map_err(|e| e.to_string())?;
        let c = induce_compactification(&subgroup_of(&report).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let expect = vec![3u64.pow(n)];
        if c.torus_rank() != 0 || c.finite_part() != expect.as_slice() {
            return Err(format!("n={n}: rank {} finite {:?}", c.torus_rank(), c.finite_part()));
        }
        orders.push(3u64.pow(n));
    }
    Ok(format!("cyclic of orders {orders:?}"))
}

fn c3_equidistribution() -> Outcome {
    let phi = cut_sequence(corpus::golden(), ratio(1, 3)).map_err(|e| e.to_string())?;
    let m = cesaro_mean(&phi, 100_000).map_err(|e| e.to_string())?.value;
    let err = (m - Complex::new(1.0 / 3.0, 0.0)).norm();
    check(err <= 2e-3, format!("|m - 1/3| = {err:.2e}"))
}

fn c4_distance_law() -> Outcome {
    let phi = cut_sequence(corpus::golden(), ratio(1, 3)).map_err(|e| e.to_string())?;
    let profile = distance_profile(&phi, 100, 100_000).map_err(|e| e.to_string())?;
    let a = golden_f64();
    let worst = profile
        .iter()
        .map(|(g, d)| (d - 2.0 * circ(g as f64 * a).min(1.0 / 3.0)).abs())
        .fold(0.0, f64::max);
    check(worst <= 5e-3, format!("max |d(g) - 2 min(|g a|, 1/3)| = {worst:.2e}"))
}

fn c5_coefficient() -> Outcome {
    let phi = cut_sequence(corpus::golden(), ratio(1, 3)).map_err(|e| e.to_string())?;
    let c = fourier_coefficient(&phi, &Character::new(corpus::golden()), 100_000).map_err(|e| e.to_string())?;
    // ∫_0^{1/3} e^{-2πix} dx has modulus sin(π/3)/π.
    let expect = (std::f64::consts::PI / 3.0).sin() / std::f64::consts::PI;
    let err = (c.value.norm() - expect).abs();
    check(err <= 1e-3, format!("|c1| = {:.6}, error {err:.2e}", c.value.norm()))
}

/// `∫_a^b K_n(x − y) dy` by composite five-point Gauss–Legendre with
/// subintervals of length at most `1/(16n)`.
fn kernel_arc_integral(n: u64, x: f64, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [0.236_926_885_056_189_1, 0.478_628_670_499_366_5, 0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_1];
    let kernel = |t: f64| {
        let s = (std::f64::consts::PI * t).sin();
        if s.abs() < 1e-12 {
            n as f64
        } else {
            let num = (std::f64::consts::PI * n as f64 * t).sin();
            num * num / (n as f64 * s * s)
        }
    };
    let pieces = ((b - a) * 16.0 * n as f64).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            NODES.iter().zip(WEIGHTS).map(|(z, w)| w * kernel(x - (mid + z * h / 2.0))).sum::<f64>() * h / 2.0
        })
        .sum()
}

/// `σ_n f` at the midpoints of a `g^k` grid by direct convolution.
fn oracle_grid(n: u64, f: &StepFunction<Rational>, g: usize) -> Vec<Vec<Complex<f64>>> {
    let ff = f.to_float();
    let k = ff.group().torus_rank();
    let shape = ff.shape();
    // weights[j][i][c]: ∫ over cell c of axis j of K_n(x_i − y).
    let weights: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|j| {
            let cuts = &ff.cuts()[j];
            (0..g)
                .map(|i| {
                    let x = (i as f64 + 0.5) / g as f64;
                    (0..cuts.len())
                        .map(|c| {
                            let hi = if c + 1 < cuts.len() { cuts[c + 1] } else { 1.0 };
                            kernel_arc_integral(n, x, cuts[c], hi)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let nf = ff.group().finite_order();
    let cells: Vec<Vec<usize>> = multi(&shape);
    let points: Vec<Vec<usize>> = multi(&vec![g; k]);
    (0..nf)
        .map(|u| {
            points
                .iter()
                .map(|p| {
                    cells
                        .iter()
                        .map(|c| {
                            let w: f64 = (0..k).map(|j| weights[j][p[j]][c[j]]).product();
                            ff.value_at(c, u) * w
                        })
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn multi(shape: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in shape {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..s).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

fn c6_fejer() -> Outcome {
    let n = 64u64;
    let mut functions: Vec<(String, StepFunction<Rational>)> = corpus::step_corpus(DEFAULT_SEED)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|c| (c.name, c.f))
        .collect();
    // Signed real parts of the complex-valued corpus members.
    for c in corpus::weil_corpus(DEFAULT_SEED).map_err(|e| e.to_string())? {
        let re = c.f.map_values(|v| Complex::new(v.re.clone() - ratio(1, 1), Rational::zero()));
        functions.push((format!("{}/signed", c.name), re));
    }
    let mut worst_bound = f64::NEG_INFINITY;
    let mut worst_oracle = 0.0f64;
    let mut checked = 0;
    for (name, f) in &functions {
        let k = f.group().torus_rank();
        let op = FejerOperator::new(n, k).map_err(|e| e.to_string())?;
        if op.weight(&vec![0; k]) != Rational::one() {
            return Err("weight(0) != 1".into());
        }
        let nonneg = f.values().iter().all(|v| v.im.is_zero() && v.re >= Rational::zero());
        let abs = f.map_values(|v| Complex::new(if v.re < Rational::zero() { -v.re.clone() } else { v.re.clone() }, Rational::zero()));
        let g = if k == 1 { 512 } else { 128 };
        let sf = sample_grid(&fejer_step(&op, f).map_err(|e| e.to_string())?, g).map_err(|e| e.to_string())?;
        // |σ_n f| ≤ σ_n |f| pointwise, whose integral is exactly ‖f‖₁.
        let sa = sample_grid(&fejer_step(&op, &abs).map_err(|e| e.to_string())?, g).map_err(|e| e.to_string())?;
        for (row_f, row_a) in sf.iter().zip(&sa) {
            for (v, a) in row_f.iter().zip(row_a) {
                worst_bound = worst_bound.max(v.norm() - a.re);
                if nonneg {
                    worst_bound = worst_bound.max(-v.re);
                }
            }
        }
        if nonneg && grid_min_re(&fejer_step(&op, f).map_err(|e| e.to_string())?, g).map_err(|e| e.to_string())? < -1e-9 {
            return Err(format!("{name}: negative value"));
        }
        if k <= 2 && f.group().finite_order() == 1 {
            let og = if k == 1 { 64 } else { 16 };
            let oracle = oracle_grid(n, f, og);
            let coeff = sample_grid(&fejer_step(&op, f).map_err(|e| e.to_string())?, og).map_err(|e| e.to_string())?;
            for (ro, rc) in oracle.iter().zip(&coeff) {
                for (a, b) in ro.iter().zip(rc) {
                    worst_oracle = worst_oracle.max((a - b).norm());
                }
            }
        }
        checked += 1;
    }
    check(
        worst_bound <= 1e-9 && worst_oracle <= 1e-8,
        format!(
            "{checked} functions at n={n}: worst |s f| - s|f| {worst_bound:.1e}, oracle vs damping {worst_oracle:.1e}"
        ),
    )
}

fn c7_weil() -> Outcome {
    let cases = corpus::weil_corpus(DEFAULT_SEED).map_err(|e| e.to_string())?;
    for c in &cases {
        let (psi, _) = fiber_average(&c.f, &c.h).map_err(|e| format!("{}: {e}", c.name))?;
        if psi.haar_integral() != c.f.haar_integral() {
            return Err(format!("{}: integrals differ", c.name));
        }
    }
    check(cases.len() >= 20, format!("{} cases, exact equality", cases.len()))
}

fn c8_aperiodize() -> Outcome {
    let mut fs: Vec<(String, StepFunction<Rational>)> = corpus::step_corpus(DEFAULT_SEED)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|c| (c.name, c.f))
        .collect();
    fs.extend(
        corpus::weil_corpus(DEFAULT_SEED)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|c| (c.name, c.f)),
    );
    let mut periodic = 0;
    for (name, f) in &fs {
        let ap = aperiodize(f).map_err(|e| format!("{name}: {e}"))?;
        if !ap.kernel.is_trivial() {
            periodic += 1;
        }
        if !kernel_subgroup(&ap.psi_star).map_err(|e| e.to_string())?.is_trivial() {
            return Err(format!("{name}: quotient kernel not trivial"));
        }
        if !ap.certificate.residual_is_zero {
            return Err(format!("{name}: residual {}", ap.certificate.residual));
        }
    }
    Ok(format!("{} functions ({periodic} with non-trivial kernel), residual exactly 0", fs.len()))
}

fn c9_reconstruct() -> Outcome {
    let alpha = Angle::quadratic(-1, 1, 2, 1).map_err(|e| e.to_string())?;
    let samples = cut_sequence(alpha.clone(), ratio(1, 3))
        .and_then(|f| f.to_sampled(100_000))
        .map_err(|e| e.to_string())?;
    let r = reconstruct(&samples, &ReconstructParams::default()).map_err(|e| e.to_string())?;
    let gens = r.compactification.free_generators();
    if gens.len() != 1 || !r.compactification.finite_part().is_empty() {
        return Err(format!("presented as {}", r.compactification));
    }
    let a = 2f64.sqrt() - 1.0;
    let g = gens[0].to_f64();
    let err = circ(g - a).min(circ(g + a));
    let exact = induce_compactification(&SpectralSubgroup::from_angles([alpha])).map_err(|e| e.to_string())?;
    let eq = equivalence_check(&r.compactification, &exact).map_err(|e| e.to_string())?;
    check(
        err <= 1e-5 && eq.equivalent,
        format!("generator {g:.11}, error {err:.1e}, equivalent {}", eq.equivalent),
    )
}

fn c10_sub() -> Outcome {
    // Rank-two members need a wide shift window before d̂ resolves small δ.
    let params = SubTestParams {
        g_window: 8000,
        radius: 20_000,
        ..SubTestParams::default()
    };
    let mut peaks = 0;
    let mut worst = f64::NEG_INFINITY;
    for case in corpus::sequence_corpus().map_err(|e| e.to_string())? {
        let report = scan_spectrum(&case.phi, params.radius, 1e-2).map_err(|e| e.to_string())?;
        let profile = distance_profile(&case.phi, params.g_window, params.radius).map_err(|e| e.to_string())?;
        for p in &report.peaks {
            let sub = sub_membership_from_profile(&case.phi, &profile, &p.character, &params)
                .map_err(|e| e.to_string())?;
            worst = worst.max(sub.max_violation);
            if sub.verdict != SubVerdict::ConsistentWithMembership || sub.max_violation > 0.0 {
                return Err(format!(
                    "{}: peak {:.6} verdict {:?}, finest {:?}, violation {:.2e}",
                    case.name, p.alpha, sub.verdict, sub.finest, sub.max_violation
                ));
            }
            peaks += 1;
        }
    }
    Ok(format!("{peaks} peaks consistent, worst violation {worst:.2e}"))
}

fn c11_filters() -> Outcome {
    let eps = [0.5, 0.1, 0.02];
    let radii = [ratio(1, 10), ratio(1, 20), ratio(1, 50)];
    let slack = 0.01;
    let mut reverse = 0;
    let mut cases = 0;
    for case in corpus::step_sequences().map_err(|e| e.to_string())? {
        let profile = distance_profile(&case.phi, 1000, 20_000).map_err(|e| e.to_string())?;
        let nc = neighborhood_check(&case.phi, &profile, &eps, &radii, slack).map_err(|e| format!("{}: {e}", case.name))?;
        if !nc.passed {
            return Err(format!("{}: forward {:?} reverse {:?}", case.name, nc.forward, nc.reverse));
        }
        reverse += usize::from(!nc.reverse.is_empty());
        cases += 1;
    }
    Ok(format!("{cases} realized functions, {reverse} with reverse inclusion checked"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("exact and Cesaro means of the cos2 products", 5, c1_means),
        ("cos2 product spectra generate Z/3^n", 30, c2_spectrum),
        ("cut sequence equidistribution", 1, c3_equidistribution),
        ("arc distance law", 10, c4_distance_law),
        ("first Fourier coefficient of the arc", 0, c5_coefficient),
        ("Fejer positivity, norm bound and oracle", 0, c6_fejer),
        ("Weil formula, exact", 0, c7_weil),
        ("aperiodization", 0, c8_aperiodize),
        ("reconstruction of sqrt(2)-1", 60, c9_reconstruct),
        ("peaks lie in Sub", 0, c10_sub),
        ("filter sets refine realization neighborhoods", 0, c11_filters),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let over = *budget > 0 && elapsed > Duration::from_secs(*budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {tag} [{:.2} s] {name}: {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
