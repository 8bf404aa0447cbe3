use bayesrisk::bounds::{
    bd_bounds, harmonic_pair, hellman_raviv_bound, improved_equivocation_bound, power_mean_upper,
    quadratic_bounds, renyi_bound,
};
use bayesrisk::numerics::{find_roots, integrate, maximize_over_simplex, QuadratureSpec};
use bayesrisk::prob::{entropy, map_conditional_error, Pmf, Posterior};
use proptest::prelude::*;

fn pmf_strategy(max_len: usize) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(0.0f64..1.0, 1..=max_len)
        .prop_filter_map("nonzero mass", |w| Pmf::from_masses(&w).ok())
}

fn sparse_pmf_strategy(max_len: usize) -> impl Strategy<Value = Pmf> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 1..=max_len)
        .prop_filter_map("nonzero mass", |w| Pmf::from_masses(&w).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn entropy_in_range(p in sparse_pmf_strategy(64)) {
        let h = entropy(&p);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
        prop_assert!(map_conditional_error(&Posterior::from(p.clone())) <= 1.0 - 1.0 / p.len() as f64 + 1e-12);
    }

    #[test]
    fn squares_dominate_entropy_power(p in sparse_pmf_strategy(64)) {
        let s = p.sum_of_squares();
        prop_assert!(s + 1e-12 >= (-entropy(&p)).exp2());
        prop_assert!(p.max() <= s.sqrt() + 1e-12);
        prop_assert!(p.max() + 1e-12 >= s);
        prop_assert!(2.0 * (1.0 - s.sqrt()) + 1e-12 >= 1.0 - s);
    }

    #[test]
    fn posterior_bounds_sandwich_map_error(p in sparse_pmf_strategy(64)) {
        let post = Posterior::from(p);
        let exact = map_conditional_error(&post);
        let bd = bd_bounds(&post);
        let quad = quadratic_bounds(&post);
        let improved = improved_equivocation_bound(&post);
        prop_assert!(bd.raw_lower <= exact + 1e-9 && exact <= bd.raw_upper + 1e-9);
        prop_assert!(quad.raw_lower <= exact + 1e-9 && exact <= quad.raw_upper + 1e-9);
        prop_assert!(quad.raw_upper <= improved + 1e-9);
        prop_assert!(improved <= renyi_bound(&post) + 1e-9);
        prop_assert!(improved <= 4f64.ln() * hellman_raviv_bound(&post) + 1e-9);
        prop_assert!(bd.raw_lower + 1e-9 >= quad.raw_lower);
    }

    #[test]
    fn binary_power_means_tighten(q in 0.0f64..=1.0, b1 in -20.0f64..-0.01, gap in 0.0f64..20.0) {
        let post = Posterior::new(vec![q, 1.0 - q]).unwrap();
        let exact = map_conditional_error(&post);
        let loose = power_mean_upper(&post, b1).unwrap();
        let tight = power_mean_upper(&post, b1 - gap).unwrap();
        prop_assert!(tight + 1e-12 >= exact);
        prop_assert!(tight <= loose + 1e-12);
        let h = harmonic_pair(&post).unwrap();
        prop_assert_eq!(h.raw_upper, 2.0 * h.raw_lower);
    }

    #[test]
    fn integration_is_linear(
        a in prop::collection::vec(-3.0f64..3.0, 1..6),
        b in prop::collection::vec(-3.0f64..3.0, 1..6),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let spec = QuadratureSpec::default();
        let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let fa = integrate(|x| poly(&a, x), -1.0, 2.0, &spec).unwrap().value;
        let fb = integrate(|x| poly(&b, x), -1.0, 2.0, &spec).unwrap().value;
        let fab = integrate(|x| alpha * poly(&a, x) + beta * poly(&b, x), -1.0, 2.0, &spec).unwrap().value;
        prop_assert!((fab - (alpha * fa + beta * fb)).abs() <= 2.0 * spec.tolerance + 1e-12);
    }

    #[test]
    fn roots_of_negation_agree(c in prop::collection::vec(-2.0f64..2.0, 2..5)) {
        let f = |x: f64| c.iter().enumerate().map(|(i, k)| k * (x * (i as f64 + 1.0)).sin()).sum::<f64>();
        let r1 = find_roots(f, -3.0, 3.0, 0.05);
        let r2 = find_roots(|x| -f(x), -3.0, 3.0, 0.05);
        prop_assert_eq!(r1.len(), r2.len());
        for (x, y) in r1.iter().zip(&r2) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn simplex_argmax_is_a_pmf(target in pmf_strategy(5).prop_filter("dim >= 2", |p| p.len() >= 2)) {
        let dim = target.len();
        let (p, _) = maximize_over_simplex(
            |q| -q.iter().zip(target.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>(),
            dim,
            1e-10,
        ).unwrap();
        prop_assert_eq!(p.len(), dim);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn equality_cases_of_entropy_power() {
    for m in 1..=64usize {
        let u = Pmf::uniform(m);
        assert!((u.sum_of_squares() - (-entropy(&u)).exp2()).abs() < 1e-12);
        assert!((entropy(&u) - (m as f64).log2()).abs() < 1e-12);
        let mut w = vec![0.0; m];
        w[m / 2] = 1.0;
        let d = Pmf::new(w).unwrap();
        assert!((d.sum_of_squares() - (-entropy(&d)).exp2()).abs() < 1e-12);
    }
}
