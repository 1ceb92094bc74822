use permix::matrix::permutation_matrix;
use permix::{
    collapse, correlation, fine_markov, gram_bound, reduced_markov, spectrum, symmetry_orbit, tau,
    transfer_matrix, worst_mixing_rate, ComposedMap, IntervalPermutation, Mode, Rational, SlopeSignature,
    StepObservable, Strategy as Search,
};
use permix::correlation::transfer_density;
use proptest::prelude::*;

/// A signature with `m` branches and a permutation of `n >= m` cells.
fn composed(max_m: usize, max_n: usize) -> impl Strategy<Value = ComposedMap> {
    (2..=max_m)
        .prop_flat_map(move |m| {
            (
                proptest::collection::vec(prop_oneof![Just(1i64), Just(-1i64)], m),
                (m..=max_n).prop_flat_map(|n| Just((0..n).collect::<Vec<usize>>()).prop_shuffle()),
            )
        })
        .prop_map(|(signs, p)| {
            ComposedMap::new(
                SlopeSignature::from_signs(&signs).unwrap(),
                IntervalPermutation::from_zero_based(p).unwrap(),
            )
            .unwrap()
        })
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=720).prop_flat_map(|d| (0..=d).prop_map(move |k| Rational::new(k, d)))
}

fn observable(level: usize) -> impl Strategy<Value = StepObservable<f64>> {
    proptest::collection::vec(-1.0f64..1.0, level).prop_map(|v| StepObservable::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maps_send_the_interval_into_itself(g in composed(5, 9), x in unit_rational()) {
        let y = g.eval(&x).unwrap();
        prop_assert!(y >= Rational::from_integer(0) && y <= Rational::from_integer(1));
    }

    #[test]
    fn permuting_cells_permutes_columns(g in composed(5, 8)) {
        let base = reduced_markov(&ComposedMap::unpermuted(g.signature().clone(), g.n()).unwrap()).unwrap();
        let p = permutation_matrix(g.perm()).unwrap();
        prop_assert_eq!(reduced_markov(&g).unwrap(), base.matmul(&p).unwrap());
    }

    #[test]
    fn fine_matrix_collapses_to_reduced(g in composed(5, 8)) {
        let b = fine_markov(&g).unwrap();
        prop_assert_eq!(collapse(&b, g.m()).unwrap(), reduced_markov(&g).unwrap());
    }

    #[test]
    fn line_sums_equal_m(g in composed(5, 9)) {
        let m = g.m() as i64;
        prop_assert_eq!(reduced_markov(&g).unwrap().line_sum(), Some(m));
        prop_assert_eq!(fine_markov(&g).unwrap().line_sum(), Some(m));
    }

    #[test]
    fn fine_and_reduced_share_tau(g in composed(3, 6)) {
        let ta: f64 = tau(&reduced_markov(&g).unwrap()).unwrap();
        let tb: f64 = tau(&fine_markov(&g).unwrap()).unwrap();
        prop_assert!((ta - tb).abs() < 1e-7, "tau(A) = {ta}, tau(B) = {tb}");
    }

    #[test]
    fn eigenvalues_lie_in_the_disc_of_radius_m(g in composed(5, 9)) {
        let s = spectrum::<f64, i64>(&reduced_markov(&g).unwrap()).unwrap();
        let c = g.m() as f64;
        prop_assert_eq!(s.leading(), c);
        for z in s.nonleading() {
            prop_assert!(z.norm() <= c + 1e-9, "{z} exceeds {c}");
        }
    }

    #[test]
    fn gram_bound_dominates_every_permutation(g in composed(4, 7)) {
        let a = reduced_markov(&g).unwrap();
        let base = reduced_markov(&ComposedMap::unpermuted(g.signature().clone(), g.n()).unwrap()).unwrap();
        let bound: f64 = gram_bound(&base).unwrap();
        let t: f64 = tau(&a).unwrap();
        prop_assert!(t <= bound + 1e-9, "tau = {t} above the Gram bound {bound}");
        // A^T A is positive semidefinite
        let gram = a.transpose().matmul(&a).unwrap();
        let s = spectrum::<f64, i64>(&gram).unwrap();
        prop_assert!(s.nonleading().iter().all(|z| z.re >= -1e-9 && z.im.abs() < 1e-9));
    }

    #[test]
    fn transfer_operator_conserves_mass(g in composed(4, 8), seed in any::<u64>()) {
        let p = transfer_matrix::<f64>(&g).unwrap();
        let n = p.order();
        let rho: Vec<f64> = (0..n).map(|i| ((seed >> (i % 64)) & 7) as f64 + 0.5).collect();
        let pushed = transfer_density(&p, &rho);
        let (before, after): (f64, f64) = (rho.iter().sum(), pushed.iter().sum());
        prop_assert!((before - after).abs() < 1e-10 * before);
        prop_assert!(pushed.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn refining_an_observable_leaves_correlations_unchanged(
        (g, phi, psi) in composed(3, 6).prop_flat_map(|g| {
            let n = g.n();
            (Just(g), observable(n), observable(n))
        }),
        lag in 0usize..6,
    ) {
        let coarse = correlation(&g, &phi, &psi, lag).unwrap();
        let fine = correlation(&g, &phi.refine(g.m()).unwrap(), &psi.refine(g.m()).unwrap(), lag).unwrap();
        prop_assert!((coarse - fine).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn worst_rate_is_constant_on_symmetry_orbits(g in composed(4, 6)) {
        let f = g.signature();
        let want: f64 = worst_mixing_rate(f, g.n(), Mode::All, Search::Exhaustive).unwrap().value;
        for h in symmetry_orbit(f) {
            let got: f64 = worst_mixing_rate(&h, g.n(), Mode::All, Search::Exhaustive).unwrap().value;
            prop_assert!((got - want).abs() < 1e-9, "{f} gives {want}, {h} gives {got}");
        }
    }
}
