use proptest::prelude::*;

use gmt_core::geometry::{product_of_projective_spaces, CohPresentation, GeometryInput};
use gmt_core::laurent::Laurent;
use gmt_core::matrix::Matrix;
use gmt_core::novikov::{NovikovExponent, NovikovSeries, Truncation};
use gmt_core::pipeline::{run, Artifacts, RunConfig, Stage};
use gmt_core::{Rational, Scalar};

fn laurent() -> impl Strategy<Value = Laurent<Rational>> {
    prop::collection::vec(((-3i32..3, 0u32..2), -5i64..6, 1i64..4), 0..4).prop_map(|terms| {
        Laurent::from_terms(terms.into_iter().map(|(k, n, d)| (k, Rational::ratio(n, d))))
    })
}

/// A series in one Novikov variable with constant term 1.
fn unit_series() -> impl Strategy<Value = NovikovSeries<Laurent<Rational>>> {
    prop::collection::vec(laurent(), 3).prop_map(|cs| {
        let t = Truncation::uniform(1, 3);
        let mut s = NovikovSeries::constant(t, Laurent::one());
        for (d, c) in cs.into_iter().enumerate() {
            s.add_term(NovikovExponent(vec![d as u32 + 1]), c);
        }
        s
    })
}

proptest! {
    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn projections_split_the_hbar_expansion(a in laurent()) {
        prop_assert_eq!(&a.pi_plus() + &a.pi_minus(), a.clone());
        prop_assert_eq!(a.pi_plus().pi_plus(), a.pi_plus());
        prop_assert!(a.pi_minus().pi_plus().is_zero());
        prop_assert!(a.pi_plus().min_hbar().is_none_or(|h| h >= 0));
    }

    #[test]
    fn series_inverse(s in unit_series()) {
        let inv = s.invert().unwrap();
        prop_assert_eq!(s.mul(&inv), NovikovSeries::constant(s.truncation().clone(), Laurent::one()));
    }
}

fn permute(m: &Matrix<Rational>, sigma: &[usize]) -> Matrix<Rational> {
    let n = m.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, m.get(sigma[i], sigma[j]).clone());
        }
    }
    out
}

/// Products of one or two projective spaces with a nef bundle, presented
/// in a shuffled basis (the unit stays first).
fn geometry() -> impl Strategy<Value = GeometryInput<Rational>> {
    (prop::collection::vec(1usize..=3, 1..=2), any::<bool>(), prop::collection::vec(0i64..=2, 2), any::<prop::sample::Index>())
        .prop_filter("keep the basis small", |(dims, ..)| dims.iter().map(|n| n + 1).product::<usize>() <= 9)
        .prop_map(|(dims, twisted, ks, shuffle)| {
            let mut bundle = Vec::new();
            if twisted {
                bundle.push(ks[..dims.len()].to_vec());
            }
            let g = product_of_projective_spaces::<Rational>(&dims, &bundle).unwrap();
            let p = g.presentation().unwrap();
            let n = p.dim();
            let mut sigma: Vec<usize> = (0..n).collect();
            let tail = &mut sigma[1..];
            if !tail.is_empty() {
                let k = shuffle.index(tail.len());
                tail.rotate_left(k);
            }
            let pres = CohPresentation::new(
                sigma.iter().map(|&k| p.basis_monomials()[k].clone()).collect(),
                sigma.iter().map(|&k| p.degrees()[k]).collect(),
                p.cup_matrices().iter().map(|m| permute(m, &sigma)).collect(),
                p.pairing().map(|m| permute(m, &sigma)),
            )
            .unwrap();
            GeometryInput::new(g.name.clone(), g.weights().to_vec(), g.bundle().to_vec(), true, pres).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn invariant_suite_holds_on_random_presentations(g in geometry()) {
        let config = RunConfig { q_order: 2, t_order: 2, stages: Stage::ALL.to_vec(), ..RunConfig::default() };
        let art = run(&g, &config, Artifacts::default());
        let art = art.map_err(|e| TestCaseError::fail(format!("{}: {e}", g.name)))?;
        let report = art.verify.unwrap();
        prop_assert!(report.all_passed(), "{}: {:?}", g.name, report);
    }
}
