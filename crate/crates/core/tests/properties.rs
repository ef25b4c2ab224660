use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use seqnet::massaction::{
    conservation_substitute, ode_rhs, phi_jacobian, sequestration_jacobian, sequestration_rhs,
    stamp_eps,
};
use seqnet::scalar::{format_rational, parse_rational, rat};
use seqnet::stability::eigenvalues;
use seqnet::steady::{tridiagonal_det, tridiagonal_det_by_elimination};
use seqnet::{
    format_network, open_sequestration, parse_network, FrontRates, Matrix, ModelParams, Rational,
};

fn shape() -> impl Strategy<Value = (u32, usize)> {
    (2u32..=6, prop::sample::select(vec![3usize, 5, 7, 9]))
}

fn ratio() -> impl Strategy<Value = Rational> {
    (1i64..=5000, 1i64..=500).prop_map(|(p, q)| rat(p, q))
}

fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    v
}

fn square(n: usize) -> impl Strategy<Value = Matrix<f64>> {
    prop::collection::vec(-10.0f64..10.0, n * n)
        .prop_map(move |v| Matrix::from_rows(v.chunks(n).map(|c| c.to_vec()).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ones_is_an_exact_steady_state(
        (m, n) in shape(),
        front in prop::collection::vec(ratio(), 12),
        rn2 in ratio(),
        eps in ratio(),
    ) {
        let p = ModelParams::bistable(m, n).unwrap();
        let front = FrontRates::new(&p, front[..n].to_vec(), rn2).unwrap();
        let eps = eps / rat(1000, 1);
        let rates = conservation_substitute(&p, &stamp_eps(&p, &front, &eps));
        prop_assume!(rates.is_ok());
        let f = sequestration_rhs(&p, rates.unwrap().values(), &vec![rat(1, 1); n]);
        prop_assert!(f.iter().all(|v| *v == rat(0, 1)));
    }

    #[test]
    fn generic_and_specialised_fields_agree(
        (m, n) in shape(),
        rates in prop::collection::vec(0.1f64..10.0, 27),
        x in prop::collection::vec(0.01f64..50.0, 9),
    ) {
        let net = open_sequestration(m, n).unwrap();
        let p = ModelParams::bistable(m, n).unwrap();
        let (rates, x) = (&rates[..3 * n], &x[..n]);
        let a = ode_rhs(&net, rates, x).unwrap();
        let b = sequestration_rhs(&p, rates, x);
        for (u, v) in a.iter().zip(&b) {
            assert_relative_eq!(*u, *v, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn eigenvalues_match_nalgebra(a in square(6)) {
        let ours = sorted(eigenvalues(&a).unwrap());
        let oracle = DMatrix::from_fn(6, 6, |i, j| a[(i, j)]);
        let theirs = sorted(oracle.complex_eigenvalues().iter().cloned().collect());
        let scale = a.inf_norm();
        for (u, v) in ours.iter().zip(&theirs) {
            prop_assert!((u - v).norm() <= 1e-8 * scale, "{u} vs {v}");
        }
    }

    #[test]
    fn diagonal_similarity_keeps_the_spectrum(
        a in square(5),
        d in prop::collection::vec(0.2f64..5.0, 5),
    ) {
        let before = sorted(eigenvalues(&a).unwrap());
        let after = sorted(eigenvalues(&a.diagonal_similarity(&d)).unwrap());
        let scale = a.inf_norm() * 25.0;
        for (u, v) in before.iter().zip(&after) {
            prop_assert!((u - v).norm() <= 1e-8 * scale, "{u} vs {v}");
        }
    }

    #[test]
    fn trace_equals_eigenvalue_sum(
        (m, n) in shape(),
        rates in prop::collection::vec(0.1f64..10.0, 27),
        x in prop::collection::vec(0.01f64..50.0, 9),
    ) {
        let p = ModelParams::bistable(m, n).unwrap();
        let j = sequestration_jacobian(&p, &rates[..3 * n], &x[..n]);
        let trace: f64 = (0..n).map(|i| j[(i, i)]).sum();
        let sum: Complex64 = eigenvalues(&j).unwrap().into_iter().sum();
        assert_relative_eq!(sum.re, trace, max_relative = 1e-9);
        prop_assert!(sum.im.abs() <= 1e-9 * trace.abs());
    }

    #[test]
    fn tridiagonal_determinant_is_exact(
        a in prop::collection::vec(ratio(), 1..9),
        b in prop::collection::vec(ratio(), 8),
    ) {
        let b = &b[..a.len() - 1];
        prop_assert_eq!(tridiagonal_det(&a, b), tridiagonal_det_by_elimination(&a, b));
    }

    #[test]
    fn phi_jacobian_determinant_is_reciprocal_of_last_coordinate(
        y in prop::collection::vec(ratio(), 3..10),
        r2n in ratio(),
    ) {
        let det = phi_jacobian(&y, &r2n).unwrap().determinant().unwrap();
        prop_assert_eq!(det, rat(1, 1) / y.last().unwrap().clone());
    }

    #[test]
    fn rationals_round_trip_through_text(v in ratio(), neg in any::<bool>()) {
        let v = if neg { -v } else { v };
        prop_assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
    }

    #[test]
    fn networks_round_trip_through_text((m, n) in shape()) {
        let net = open_sequestration(m, n).unwrap();
        let back = parse_network(&format_network(&net)).unwrap();
        prop_assert_eq!(back.reactions(), net.reactions());
        prop_assert_eq!(back.num_species(), net.num_species());
    }
}
