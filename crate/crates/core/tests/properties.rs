use lonely_core::bounds::{self, BoundSpec, BoundStatus};
use lonely_core::equality::{self, Family};
use lonely_core::exact::{self, dense_grid_gap_lower};
use lonely_core::lpcore::{self, LinearProgram, LpOutcome, Relation};
use lonely_core::trigpoly::{self, TrigPoly};
use lonely_core::{Rational, Sign, SpeedVector};
use proptest::prelude::*;

fn speeds(max_len: usize, max_speed: u64) -> impl Strategy<Value = SpeedVector> {
    prop::collection::btree_set(1..=max_speed, 1..=max_len)
        .prop_map(|s| SpeedVector::new(s.into_iter().collect()).unwrap())
}

fn poly(max_degree: usize) -> impl Strategy<Value = TrigPoly> {
    prop::collection::vec(-1.0f64..1.0, 1..=max_degree + 1).prop_map(TrigPoly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_is_dilation_invariant(v in speeds(5, 30), a in 1u64..6) {
        prop_assert_eq!(exact::gap(&v.scaled(a).unwrap()).gap, exact::gap(&v).gap);
    }

    #[test]
    fn gap_range_and_divisibility(v in speeds(6, 40)) {
        let g = exact::gap(&v);
        prop_assert!(g.gap > Rational::from_integer(0) && g.gap <= Rational::new(1, 2));
        prop_assert_eq!(g.q as i128 % g.gap.denom(), 0);
        prop_assert_eq!(g.t_min, g.maximizers[0]);
        for t in &g.maximizers {
            prop_assert_eq!(exact::mu(&v, *t), g.gap);
        }
    }

    #[test]
    fn known_conjecture_range(v in speeds(6, 40)) {
        let n = v.runners() as i128;
        prop_assert!(exact::gap(&v).gap >= Rational::new(1, n));
    }

    #[test]
    fn all_odd_gives_one_half(raw in prop::collection::btree_set(0u64..50, 1..=6)) {
        let v = SpeedVector::new(raw.into_iter().map(|k| 2 * k + 1).collect()).unwrap();
        prop_assert_eq!(exact::gap(&v).gap, Rational::new(1, 2));
    }

    #[test]
    fn grid_oracle_agrees(v in speeds(4, 30)) {
        let n = 100_000u64;
        let exact = exact::gap(&v).gap.to_f64();
        let grid = dense_grid_gap_lower(&v, n).unwrap();
        prop_assert!(grid <= exact + 1e-15);
        prop_assert!(exact - grid <= v.max_speed() as f64 / (2.0 * n as f64) + 1e-12);
    }

    #[test]
    fn dft_round_trip(f in poly(12), extra in 0usize..4) {
        let d = f.degree() + extra;
        let g = trigpoly::dft_coeffs(|x| f.eval(x), d).unwrap();
        for k in 0..=d {
            prop_assert!((g.coeff(k) - f.coeff(k)).abs() < 1e-10);
        }
    }

    #[test]
    fn fejer_matches_closed_form(m in 1usize..=50, x in 0.001f64..0.999) {
        let f = trigpoly::fejer(m).unwrap();
        prop_assert!((f.eval(x) - trigpoly::fejer_closed_form(m, x)).abs() < 1e-9);
    }

    #[test]
    fn dilation_is_pointwise(f in poly(8), a in 1usize..6, x in 0.0f64..1.0) {
        let g = f.dilate(a).unwrap();
        prop_assert!((g.eval(x) - f.eval(a as f64 * x)).abs() < 1e-10);
    }

    #[test]
    fn rigorous_min_is_a_lower_bound(f in poly(10), lo in 0.0f64..0.25, w in 0.01f64..0.25) {
        let hi = lo + w;
        let m = trigpoly::rigorous_min(&f, lo, hi).unwrap();
        prop_assert!(m.bound <= m.observed_min);
        for j in 0..=2000 {
            let x = lo + (hi - lo) * j as f64 / 2000.0;
            prop_assert!(f.eval(x) >= m.bound - 1e-12);
        }
        prop_assert!(m.observed_min - m.bound <= 1e-10 * f.sup_norm_bound().max(1.0) + 1e-9);
    }

    #[test]
    fn lp_optimum_is_feasible(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 3), 0.5f64..5.0), 1..12),
        obj in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let mut lp = LinearProgram::new(obj);
        for (a, b) in rows {
            lp.add_constraint(a, Relation::Le, b);
        }
        for j in 0..3 {
            lp.set_bounds(j, 0.0, 10.0);
        }
        let out = lpcore::solve(&lp).unwrap();
        prop_assert_eq!(&out, &lpcore::solve(&lp).unwrap());
        match out {
            LpOutcome::Optimal { solution, objective_value, .. } => {
                prop_assert!(lp.max_violation(&solution) <= 1e-8);
                prop_assert!((lp.objective_at(&solution) - objective_value).abs() <= 1e-8 * (1.0 + objective_value.abs()));
            }
            other => prop_assert!(false, "bounded feasible program reported {:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich(v in speeds(4, 14)) {
        let gap = exact::gap(&v).gap.to_f64();
        let up = bounds::compute(&BoundSpec::upper(v.clone())).unwrap();
        prop_assert_eq!(up.status, BoundStatus::Certified);
        prop_assert!(gap <= up.certified_value.unwrap() + 1e-12, "{} > {:?}", gap, up.certified_value);
        if v.len() >= 2 {
            let lo = bounds::compute(&BoundSpec::lower(v.clone())).unwrap();
            if lo.status == BoundStatus::Certified {
                prop_assert!(lo.certified_value.unwrap() <= gap + 1e-12);
            }
        }
        let q = exact::gap(&v).q;
        if q >= 3 {
            let lq = bounds::compute(&BoundSpec::lower_q(v.clone(), q)).unwrap();
            if lq.status == BoundStatus::Certified {
                prop_assert!(lq.certified_value.unwrap() <= gap + 1e-12);
            }
        }
    }

    #[test]
    fn certified_polynomials_pass_audit(v in speeds(4, 12)) {
        let spec = BoundSpec::upper(v.clone());
        let r = bounds::compute(&spec).unwrap();
        let g = r.polynomial.unwrap();
        let audit = bounds::audit(&spec, &g).unwrap();
        prop_assert!(audit.admissible(1e-12), "{:?}", audit);
        prop_assert!(equality::montgomery_chain(&g, &v).holds(Sign::Plus, 1e-9));
    }

    #[test]
    fn q_class_contains_plain_class(v in speeds(4, 12).prop_filter("two speeds", |v| v.len() >= 2)) {
        let q = exact::gap(&v).q;
        prop_assume!(q >= 3);
        let plain = bounds::compute(&BoundSpec::lower(v.clone())).unwrap();
        let with_q = bounds::compute(&BoundSpec::lower_q(v.clone(), q)).unwrap();
        if let (Some(a), Some(b)) = (plain.lp_value, with_q.lp_value) {
            prop_assert!(b >= a - 1e-6, "q-class {} below plain {}", b, a);
        }
    }

    #[test]
    fn nested_grid_refinement_does_not_raise_upper_value(v in speeds(4, 10), n in 9usize..60) {
        let spec = BoundSpec::upper(v).refine_rounds(0).certify(false);
        let coarse = bounds::compute(&spec.clone().samples(n)).unwrap().lp_value.unwrap();
        let fine = bounds::compute(&spec.samples(2 * n - 1)).unwrap().lp_value.unwrap();
        prop_assert!(fine >= coarse - 1e-9, "fine {} coarse {}", fine, coarse);
    }

    #[test]
    fn higher_degree_does_not_worsen_upper_value(v in speeds(4, 10), extra in 1usize..8) {
        let d = v.max_speed() as usize;
        let spec = BoundSpec::upper(v).refine_rounds(0).certify(false);
        let low = bounds::compute(&spec.clone().degree(d).samples(201)).unwrap().lp_value.unwrap();
        let high = bounds::compute(&spec.degree(d + extra).samples(201)).unwrap().lp_value.unwrap();
        prop_assert!(high <= low + 1e-9, "D+{}: {} > {}", extra, high, low);
    }

    #[test]
    fn detector_is_sound(v in speeds(4, 12)) {
        let case = equality::detect_thm12(&v).unwrap();
        if let Some(predicted) = case.predicted_gap {
            prop_assert_eq!(predicted, exact::gap(&v).gap);
            let f = case.polynomial.unwrap();
            let spec = BoundSpec::upper(v.clone()).degree(f.degree().max(v.max_speed() as usize));
            prop_assert!(bounds::audit(&spec, &f).unwrap().admissible(1e-9));
            let r = bounds::compute(&spec).unwrap();
            prop_assert!((r.certified_value.unwrap() - predicted.to_f64()).abs() < 1e-6);
            prop_assert!(equality::montgomery_chain(&f, &v).tight(1e-8));
        }
    }
}

#[test]
fn dirichlet_sharpness() {
    for n in 2..=12u64 {
        let v = SpeedVector::dirichlet(n).unwrap();
        assert_eq!(exact::gap(&v).gap, Rational::new(1, n as i128));
    }
}

#[test]
fn fejer_kernels_are_nonnegative() {
    for m in 1..=40 {
        let f = trigpoly::fejer(m).unwrap();
        assert!(trigpoly::rigorous_min(&f, 0.0, 0.5).unwrap().bound >= -1e-8, "m = {m}");
    }
}

#[test]
fn thm31_support_for_unit_dilation() {
    for q in 3..=12 {
        let f = trigpoly::thm31_poly(1, q).unwrap();
        assert_eq!(f.degree(), q - 1);
        assert!((f.at_zero() - q as f64).abs() < 1e-8 && (f.mass() - 1.0).abs() < 1e-8);
        let m = trigpoly::rigorous_min(&f.scaled(-1.0), 1.0 / q as f64, 0.5).unwrap();
        assert!(m.bound >= -1e-9, "q = {q}: {m:?}");
    }
}

#[test]
fn hat_synthesis_converges_slowly() {
    for delta in [0.25, 1.0 / 3.0] {
        for x in [0.0, 0.1, 0.2, 0.45] {
            let s: f64 = trigpoly::hat_coeff(delta, 0)
                + 2.0
                    * (1..=1000)
                        .map(|k| trigpoly::hat_coeff(delta, k) * (2.0 * std::f64::consts::PI * k as f64 * x).cos())
                        .sum::<f64>();
            assert!((s - trigpoly::hat(delta, x)).abs() < 1e-3, "delta {delta} x {x}: {s}");
        }
    }
}

#[test]
fn goddyn_wong_vectors_are_tight() {
    for (n, fam) in [(8, Family::A), (14, Family::A), (20, Family::A), (33, Family::B)] {
        let v = equality::goddyn_wong_family(n, fam).unwrap();
        let g = exact::gap(&v);
        assert_eq!(g.gap, Rational::new(1, n as i128));
        assert_eq!(g.q, n);
    }
}

#[test]
fn lp_scale_sanity() {
    // About 200 free variables and 2000 rows: the upper-bound program for a degree-200 polynomial.
    let v = SpeedVector::new((1..=10).map(|k| 20 * k - 1).collect()).unwrap();
    let spec = BoundSpec::upper(v).degree(199).samples(1800).refine_rounds(0).certify(false);
    let lp = bounds::build_lp(&spec).unwrap();
    assert!(lp.num_vars >= 200 && lp.constraints.len() >= 1900);
    let t = std::time::Instant::now();
    assert!(matches!(lpcore::solve(&lp).unwrap(), LpOutcome::Optimal { .. }));
    assert!(t.elapsed().as_secs_f64() < 5.0, "{:?}", t.elapsed());
}

#[test]
fn dilated_thm31_poly_leaves_the_q_class() {
    // F(a x) returns to F(0) = q at x = 1/a, which lies in [1/q, 1/2] once a >= 2.
    for (a, q) in [(2usize, 3usize), (2, 5), (3, 4), (3, 5)] {
        let f = trigpoly::thm31_poly(a, q).unwrap();
        assert!((f.eval(1.0 / a as f64) - q as f64).abs() < 1e-8);
        let m = trigpoly::rigorous_min(&f.scaled(-1.0), 1.0 / q as f64, 0.5).unwrap();
        assert!(m.observed_min < -1.0, "a={a} q={q}");
    }
}
