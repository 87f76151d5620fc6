//! Property tests for the invariants of each module.

use num_complex::{Complex, Complex64};
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hartman_core::corpus::{self, golden, random_step, silver, subgroup_shapes};
use hartman_core::distance::distance_on_x;
use hartman_core::fejer::{fejer_1d, fejer_step, fejer_trig, l2_norm_sq, sample_grid, FejerOperator};
use hartman_core::mean::window_mean;
use hartman_core::rational::{ratio, Rational};
use hartman_core::sequence::{cos2_product, trig_sequence};
use hartman_core::step::{Arc, Magnitude};
use hartman_core::{
    aperiodize, cesaro_mean, covers, exact_mean, fiber_average, induce_compactification, kernel_subgroup,
    scan_spectrum, Angle, CompactGroup, Point, SpectralSubgroup, StepFunction,
};

fn pool() -> Vec<Angle> {
    vec![
        golden(),
        silver(),
        Angle::quadratic(-1, 1, 3, 1).unwrap(),
        Angle::rational(1, 6),
        Angle::rational(2, 9),
        Angle::rational(1, 4),
        Angle::rational(3, 10),
    ]
}

fn subset(mask: u8) -> SpectralSubgroup {
    let p = pool();
    SpectralSubgroup::from_angles((0..p.len()).filter(|i| mask >> i & 1 == 1).map(|i| p[i].clone()))
}

fn circ(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    r.min(1.0 - r)
}

fn same_point(a: &Point, b: &Point) -> bool {
    a.finite == b.finite && a.float_coords().iter().zip(b.float_coords()).all(|(x, y)| circ(x - y) < 1e-9)
}

fn step_on(seed: u64, group: &CompactGroup) -> StepFunction<Rational> {
    random_step(&mut ChaCha8Rng::seed_from_u64(seed), group, false).unwrap()
}

fn exact(m: Magnitude) -> Rational {
    m.as_exact().cloned().expect("exact magnitude")
}

fn any_group() -> impl Strategy<Value = CompactGroup> {
    prop_oneof![
        Just(CompactGroup::torus(1)),
        Just(CompactGroup::torus(2)),
        Just(CompactGroup::new(1, vec![2]).unwrap()),
        Just(CompactGroup::new(0, vec![6]).unwrap()),
    ]
}

fn rational_point() -> impl Strategy<Value = (i64, i64, i64, i64)> {
    (0i64..24, 1i64..25, 0i64..24, 1i64..25)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn embed_is_a_homomorphism(mask in 1u8..128, n in -1_000_000i64..1_000_000, m in -1_000_000i64..1_000_000) {
        let c = induce_compactification(&subset(mask)).unwrap();
        let sum = c.embed(n).add(&c.embed(m), c.group());
        prop_assert!(same_point(&c.embed(n + m), &sum));
    }

    #[test]
    fn covers_is_a_preorder(a in 1u8..128, b in 1u8..128) {
        let ca = induce_compactification(&subset(a)).unwrap();
        let cb = induce_compactification(&subset(b)).unwrap();
        let cab = induce_compactification(&subset(a | b)).unwrap();
        prop_assert!(covers(&ca, &ca).unwrap());
        // ⟨a⟩ ⊆ ⟨a ∪ b⟩ and ⟨b⟩ ⊆ ⟨a ∪ b⟩; transitivity through any c ⊇ a ∪ b.
        prop_assert!(covers(&ca, &cab).unwrap());
        let full = induce_compactification(&subset(127)).unwrap();
        prop_assert!(covers(&cab, &full).unwrap());
        prop_assert!(covers(&ca, &full).unwrap());
        if covers(&ca, &cb).unwrap() && covers(&cb, &ca).unwrap() {
            prop_assert_eq!(ca.torus_rank(), cb.torus_rank());
            prop_assert_eq!(ca.finite_part(), cb.finite_part());
        }
    }

    #[test]
    fn coordinate_characters_generate_the_input(mask in 1u8..128) {
        let c = induce_compactification(&subset(mask)).unwrap();
        let again = induce_compactification(&SpectralSubgroup::new(c.coordinate_characters())).unwrap();
        prop_assert!(covers(&c, &again).unwrap() && covers(&again, &c).unwrap());
    }

    #[test]
    fn haar_integral_is_translation_invariant(seed in any::<u64>(), g in any_group(), (p, q, r, s) in rational_point(), du in 0usize..6) {
        let f = step_on(seed, &g);
        let x: Vec<Rational> = [ratio(p, q), ratio(r, s)].into_iter().take(g.torus_rank()).collect();
        let t = f.translate(&x, du % g.finite_order());
        prop_assert_eq!(t.haar_integral(), f.haar_integral());
    }

    #[test]
    fn l1_distance_is_a_pseudometric(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), g in any_group()) {
        let (f, h, k) = (step_on(a, &g), step_on(b, &g), step_on(c, &g));
        let fh = exact(f.l1_distance(&h).unwrap());
        prop_assert_eq!(&fh, &exact(h.l1_distance(&f).unwrap()));
        prop_assert!(fh <= exact(f.l1_distance(&k).unwrap()) + exact(k.l1_distance(&h).unwrap()));
        prop_assert!(exact(f.l1_distance(&f).unwrap()).is_zero());
    }

    #[test]
    fn indicator_distance_matches_grid_count(a in 0i64..60, la in 1i64..60, b in 0i64..60, lb in 1i64..60) {
        let g = CompactGroup::torus(1);
        let arc = |s: i64, l: i64| Arc::new(ratio(s, 61), ratio(s + l, 61));
        let f = StepFunction::indicator(g.clone(), vec![arc(a, la)], vec![0]).unwrap();
        let h = StepFunction::indicator(g, vec![arc(b, lb)], vec![0]).unwrap();
        let d = exact(f.l1_distance(&h).unwrap());
        let inside = |s: i64, l: i64, x: f64| ((x - s as f64 / 61.0).rem_euclid(1.0)) < l as f64 / 61.0;
        let count = (0..1024)
            .filter(|i| {
                let x = (*i as f64 + 0.5) / 1024.0;
                inside(a, la, x) != inside(b, lb, x)
            })
            .count();
        // Each of the 4 endpoints misclassifies at most one grid cell.
        let dd = hartman_core::rational::to_f64(&d);
        prop_assert!((dd - count as f64 / 1024.0).abs() <= 4.0 / 1024.0);
    }

    #[test]
    fn realized_evaluation_matches_embedding(idx in 0usize..8, n in -10_000_000i64..10_000_000) {
        let case = &corpus::sequence_corpus().unwrap()[idx];
        let phi = &case.phi;
        let x = phi.compactification().unwrap().embed(n);
        let direct = phi.evaluate(n).unwrap();
        let via = phi.realization().unwrap().eval_point(&x);
        prop_assert!((direct - via).norm() <= 1e-12, "{}: {} vs {}", case.name, direct, via);
    }

    #[test]
    fn cos2_product_is_periodic_and_in_unit_interval(n in 1u32..6, k in -100_000i64..100_000) {
        let phi = cos2_product(n).unwrap();
        let a = phi.evaluate(k).unwrap();
        let b = phi.evaluate(k + 3i64.pow(n)).unwrap();
        prop_assert!((a - b).norm() < 1e-12);
        prop_assert!(a.re >= -1e-12 && a.re <= 1.0 + 1e-12 && a.im.abs() < 1e-12);
    }

    #[test]
    fn cesaro_mean_shift_bound(idx in 0usize..8, g in -500i64..500) {
        let phi = &corpus::sequence_corpus().unwrap()[idx].phi;
        let n = 5_000;
        let m0 = cesaro_mean(phi, n).unwrap().value;
        let shifted = window_mean(&phi.sample(g - n, g + n).unwrap()).unwrap().value;
        let bound = 2.0 * phi.sup_bound() * g.abs() as f64 / (2 * n + 1) as f64;
        prop_assert!((m0 - shifted).norm() <= bound + 1e-12);
    }

    #[test]
    fn fejer_kernel_is_nonnegative(n in 1u64..200, t in 0.0f64..1.0) {
        prop_assert!(fejer_1d(n, t) >= 0.0);
    }

    #[test]
    fn fejer_contracts_coefficients(seed in any::<u64>(), n in 1u64..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let terms: Vec<(Angle, Complex<Rational>)> = (0..4)
            .map(|_| {
                let a = pool()[rng.random_range(0..3)].mul_int(rng.random_range(-5..=5));
                (a, Complex::new(ratio(rng.random_range(-6..=6), 6), ratio(rng.random_range(-6..=6), 6)))
            })
            .collect();
        let phi = trig_sequence(&terms).unwrap();
        let Some(hartman_core::Realization::Trig(p)) = phi.realization() else { unreachable!() };
        let op = FejerOperator::new(n, p.group().torus_rank()).unwrap();
        let s = fejer_trig(&op, p).unwrap();
        prop_assert!(l2_norm_sq(&s) <= l2_norm_sq(p));
        prop_assert!(s.coefficient_l1() <= p.coefficient_l1() + 1e-15);
        prop_assert_eq!(s.haar_integral(), p.haar_integral());
    }

    #[test]
    fn weil_formula_is_exact(seed in any::<u64>(), g in 0usize..3, shape in 0usize..7, complex in any::<bool>()) {
        let (_, group) = &corpus::groups()[g];
        let shapes = subgroup_shapes(group).unwrap();
        let (_, h) = &shapes[shape % shapes.len()];
        let f = random_step(&mut ChaCha8Rng::seed_from_u64(seed), group, complex).unwrap();
        let (psi, _) = fiber_average(&f, h).unwrap();
        prop_assert_eq!(psi.haar_integral(), f.haar_integral());
    }

    #[test]
    fn aperiodization_is_sound(seed in any::<u64>(), g in 0usize..3, shape in 0usize..7) {
        let (_, group) = &corpus::groups()[g];
        let shapes = subgroup_shapes(group).unwrap();
        let (_, h) = &shapes[shape % shapes.len()];
        let f = step_on(seed, group);
        // Pull an H-invariant function back so that kernels are often non-trivial.
        let (psi, q) = fiber_average(&f, h).unwrap();
        let invariant = q.pullback(&psi).unwrap();
        for input in [f, invariant] {
            let ap = aperiodize(&input).unwrap();
            prop_assert!(ap.certificate.residual_is_zero);
            prop_assert!(kernel_subgroup(&ap.psi_star).unwrap().is_trivial());
        }
    }

    #[test]
    fn distance_is_lipschitz_in_the_shift(seed in any::<u64>(), (p, q, r, s) in rational_point()) {
        let group = CompactGroup::torus(1);
        let f = step_on(seed, &group);
        let x = ratio(p, q);
        let y = ratio(r, s);
        let d = |t: &Rational| exact(distance_on_x(&f, &Point::rational(&[t.clone()], vec![])).unwrap());
        let gap = d(&x) - d(&y);
        let gap = if gap < Rational::zero() { -gap } else { gap };
        prop_assert!(gap <= d(&(&x - &y)));
        // d(h) ≤ 2 sup|f| · (number of cuts) · ‖h‖.
        let h = hartman_core::rational::to_f64(&(&x - &y)).rem_euclid(1.0);
        let moved = h.min(1.0 - h) * f.cuts()[0].len() as f64;
        prop_assert!(hartman_core::rational::to_f64(&d(&(&x - &y))) <= 2.0 * f.sup_abs() * moved + 1e-12);
    }

    #[test]
    fn smoothing_moves_distances_by_at_most_twice_the_error(seed in any::<u64>(), n in 2u64..40, shift in 0usize..64) {
        let group = CompactGroup::torus(1);
        let f = step_on(seed, &group);
        let g = 64;
        let p = fejer_step(&FejerOperator::new(n, 1).unwrap(), &f).unwrap();
        let ps = &sample_grid(&p, g).unwrap()[0];
        let ff = f.to_float();
        let fs: Vec<Complex64> = (0..g).map(|i| ff.eval_f64(&[(i as f64 + 0.5) / g as f64], 0)).collect();
        let d = |v: &[Complex64]| (0..g).map(|i| (v[i] - v[(i + shift) % g]).norm()).sum::<f64>() / g as f64;
        let err = (0..g).map(|i| (ps[i] - fs[i]).norm()).sum::<f64>() / g as f64;
        prop_assert!((d(ps) - d(&fs)).abs() <= 2.0 * err + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spectrum_recovers_trigonometric_polynomials(seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms: Vec<(Angle, Complex<Rational>)> = Vec::new();
        for (k, l) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, -1)] {
            if rng.random_bool(0.7) {
                let a = golden().mul_int(k).add(&silver().mul_int(l));
                let c = Complex::new(ratio(rng.random_range(1..=20), 20), ratio(rng.random_range(-20..=20), 20));
                terms.push((a, c));
            }
        }
        prop_assume!(!terms.is_empty());
        let phi = trig_sequence(&terms).unwrap();
        let report = scan_spectrum(&phi, 100_000, 1e-3).unwrap();
        prop_assert_eq!(report.peaks.len(), terms.len());
        for (a, c) in &terms {
            let peak = report.find(a.to_f64(), 1e-8).expect("frequency recovered");
            let want = Complex64::new(hartman_core::rational::to_f64(&c.re), hartman_core::rational::to_f64(&c.im));
            prop_assert!((peak.coefficient - want).norm() <= 1e-6);
        }
    }

    #[test]
    fn parseval_and_realizable_peaks(idx in 0usize..8) {
        let case = &corpus::sequence_corpus().unwrap()[idx];
        let phi = &case.phi;
        let n = 20_000;
        let report = scan_spectrum(phi, n, 1e-2).unwrap();
        let energy: f64 = report.peaks.iter().map(|p| p.magnitude().powi(2)).sum();
        let sq: Vec<Complex64> = phi.window(n).unwrap().iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        prop_assert!(energy <= window_mean(&sq).unwrap().value.re + 1e-6);
        let comp = phi.compactification().unwrap();
        for p in &report.peaks {
            let m = comp.membership(&p.character.alpha().clone()).unwrap().0;
            prop_assert!(matches!(m, hartman_core::Membership::Member { .. }), "{}: {}", case.name, p.alpha);
        }
    }
}

#[test]
fn constant_one_has_mean_exactly_one() {
    let phi = hartman_core::sequence::periodic(vec![Complex::new(ratio(1, 1), Rational::zero())]).unwrap();
    assert_eq!(cesaro_mean(&phi, 1000).unwrap().value, Complex64::new(1.0, 0.0));
    assert_eq!(exact_mean(&phi).unwrap(), Complex::new(ratio(1, 1), Rational::zero()));
}

#[test]
fn nonnegative_sequences_have_nonnegative_means() {
    for case in corpus::step_sequences().unwrap() {
        assert!(cesaro_mean(&case.phi, 3000).unwrap().value.re >= 0.0, "{}", case.name);
    }
}

#[test]
fn cesaro_converges_to_the_exact_mean() {
    for case in corpus::step_sequences().unwrap() {
        let exact = exact_mean(&case.phi).unwrap();
        let target = Complex64::new(hartman_core::rational::to_f64(&exact.re), hartman_core::rational::to_f64(&exact.im));
        let errs: Vec<f64> = [1_000, 10_000, 100_000]
            .iter()
            .map(|&n| (cesaro_mean(&case.phi, n).unwrap().value - target).norm())
            .collect();
        assert!(errs[2] <= errs[0] + 1e-4 && errs[2] < 2e-3, "{}: {errs:?}", case.name);
    }
}
