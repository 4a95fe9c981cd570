use proptest::prelude::*;
use rand::Rng;

use wignerkit::commutative::{composition_operator, extract_point_map, PointMap};
use wignerkit::jordan::{
    is_jordan_star_homomorphism, kadison_split, kadison_split_with_probe, random_jordan_iso, verify_isometry,
    verify_order_iso, verify_orthoisomorphism, LinearMapTable, Probe,
};
use wignerkit::linalg::{self, CVector};
use wignerkit::raymaps::{as_blackbox, classify, replay_witness, Verdict};
use wignerkit::rng::stream;
use wignerkit::wigner::{assemble, dim2_biorthogonal_not_tp, random_canonical_layout, InducedMap};
use wignerkit::{
    is_orthogonal, make_algebra, projection_witness, state_distance, transition_probability, AlgebraSpec, Complex64,
    PureState,
};

fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=5, 1..=3)
}

fn random_pair(alg: &AlgebraSpec, seed: u64) -> (PureState, PureState) {
    let mut r = stream(seed, 0);
    let b0 = r.random_range(0..alg.num_blocks());
    // Bias towards shared blocks and exactly orthogonal vectors.
    let b1 = if r.random_bool(0.6) { b0 } else { r.random_range(0..alg.num_blocks()) };
    let w0 = PureState::random(alg, b0, &mut r).unwrap();
    let w1 = if b1 == b0 && alg.dim(b0).unwrap() > 1 && r.random_bool(0.3) {
        let y = wignerkit::rng::unit_vector(&mut r, alg.dim(b0).unwrap());
        let z = linalg::orthogonal_complement(w0.vector(), &y).unwrap();
        PureState::new(alg, b0, z).unwrap()
    } else {
        PureState::random(alg, b1, &mut r).unwrap()
    };
    (w0, w1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn involution_is_exact(d in dims(), seed in any::<u64>()) {
        let alg = make_algebra(&d).unwrap();
        let a = alg.random_element(&mut stream(seed, 1));
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn norm_identities(d in dims(), seed in any::<u64>()) {
        let alg = make_algebra(&d).unwrap();
        let mut r = stream(seed, 2);
        let a = alg.random_element(&mut r);
        let b = alg.random_element(&mut r);
        let (na, nb) = (a.operator_norm(), b.operator_norm());
        prop_assert!(a.mul(&b).unwrap().operator_norm() <= na * nb + 1e-9);
        let cstar = a.adjoint().mul(&a).unwrap().operator_norm();
        prop_assert!((cstar - na * na).abs() <= 1e-8 * (1.0 + na * na));
        let sym = a.jordan_product(&b).unwrap().sub(&b.jordan_product(&a).unwrap()).unwrap();
        prop_assert!(sym.operator_norm() <= 1e-12);
    }

    #[test]
    fn orthogonality_oracles_agree(d in dims(), seed in any::<u64>()) {
        let alg = make_algebra(&d).unwrap();
        let (w0, w1) = random_pair(&alg, seed);
        let by_inner = is_orthogonal(&w0, &w1, 1e-9).unwrap();
        let dist = state_distance(&w0, &w1).unwrap();
        let by_distance = (dist - 2.0).abs() <= 1e-8;
        let by_witness = projection_witness(&w0, &w1, 1e-8).unwrap().is_some();
        prop_assert_eq!(by_inner, by_distance);
        prop_assert_eq!(by_inner, by_witness);
        let tp = transition_probability(&w0, &w1).unwrap();
        prop_assert_eq!(tp, transition_probability(&w1, &w0).unwrap());
        if w0.block() == w1.block() {
            prop_assert!((dist - 2.0 * (1.0 - tp).max(0.0).sqrt()).abs() <= 1e-8);
        }
    }

    #[test]
    fn unit_tp_means_same_ray(d in 1usize..=5, seed in any::<u64>(), phase in 0.0..std::f64::consts::TAU) {
        let alg = make_algebra(&[d]).unwrap();
        let w = PureState::random(&alg, 0, &mut stream(seed, 3)).unwrap();
        let rotated: CVector = w.vector() * Complex64::from_polar(1.0, phase);
        let same = PureState::new(&alg, 0, rotated).unwrap();
        prop_assert!((transition_probability(&w, &same).unwrap() - 1.0).abs() <= 1e-12);
        prop_assert!((w.vector() - same.vector()).iter().all(|z| z.norm() <= 1e-9));
    }

    #[test]
    fn canonical_maps_classify_clean(seed in 0u64..10_000) {
        let m = random_canonical_layout(seed).unwrap();
        let report = classify(&as_blackbox(&m).unwrap(), 20, seed, 1e-8);
        prop_assert!(report.co_orthogonal.holds());
        prop_assert!(report.fibre_preserving.holds());
        prop_assert!(report.bi_orthogonal.holds() <= report.locally_injective.holds());
        prop_assert!(report.locally_tp_preserving.holds());
    }

    #[test]
    fn wigner_round_trip(seed in 0u64..10_000) {
        let m = random_canonical_layout(seed).unwrap();
        let phi = assemble(&as_blackbox(&m).unwrap(), 1e-8).unwrap();
        for (got, want) in phi.canonical().fibers().iter().zip(m.fibers()) {
            prop_assert_eq!(got.target_block, want.target_block);
            prop_assert_eq!(got.kind, want.kind);
            prop_assert!(linalg::phase_aligned_distance(&got.isometry, &want.isometry) <= 1e-7);
        }
    }

    #[test]
    fn induced_maps_are_unital_positive_contractive(seed in 0u64..10_000) {
        let m = random_canonical_layout(seed).unwrap();
        let phi = InducedMap::new(m.clone());
        let one = phi.apply(&m.target().identity()).unwrap();
        prop_assert!(one.distance(&m.source().identity()).unwrap() <= 1e-10);
        let mut r = stream(seed, 4);
        for _ in 0..10 {
            let p = m.target().random_positive(&mut r);
            prop_assert!(phi.apply(&p).unwrap().min_hermitian_eigenvalue() >= -1e-9);
            let a = m.target().random_element(&mut r);
            prop_assert!(phi.apply(&a).unwrap().operator_norm() <= a.operator_norm() + 1e-9);
        }
    }

    #[test]
    fn failing_witnesses_replay(alpha in 0.05f64..0.45, seed in 0u64..1000) {
        let bb = dim2_biorthogonal_not_tp(alpha).unwrap();
        let report = classify(&bb, 30, seed, 1e-8);
        for w in report.witnesses() {
            let again = replay_witness(&bb, w, 1e-8).unwrap().expect("violation reproduces");
            prop_assert!((again.input_tp - w.input_tp).abs() <= 1e-12);
            prop_assert!((again.output_tp - w.output_tp).abs() <= 1e-12);
        }
        let fails = matches!(report.locally_tp_preserving, Verdict::Fails { .. });
        prop_assert!(fails);
    }

    #[test]
    fn jordan_isos_pass_every_check(d in dims(), seed in any::<u64>()) {
        let p = random_jordan_iso(&d, seed).unwrap();
        prop_assert!(is_jordan_star_homomorphism(&p.table, 1e-10).is_verified());
        prop_assert!(verify_isometry(&p.table, 5, seed, 1e-8).unwrap().is_verified());
        prop_assert!(verify_order_iso(&p.table, 5, seed, 1e-8).unwrap().is_verified());
        prop_assert!(verify_orthoisomorphism(&p.table, 5, seed, 1e-8).unwrap().is_verified());
        let a = kadison_split_with_probe(&p.table, 1e-8, Probe::Standard).unwrap();
        let b = kadison_split_with_probe(&p.table, 1e-8, Probe::Alternate).unwrap();
        let tags: Vec<_> = a.tags.iter().map(|t| t.tag).collect();
        prop_assert_eq!(&tags, &p.tags);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn kadison_rebuild_matches(d in dims(), seed in any::<u64>()) {
        let p = random_jordan_iso(&d, seed).unwrap();
        kadison_split(&p.table, 1e-8).unwrap();
        let phi = assemble(&p.table.dual_ray_map(), 1e-8).unwrap();
        let rebuilt = LinearMapTable::from_induced(&phi).unwrap();
        prop_assert!(rebuilt.max_entry_distance(&p.table).unwrap() <= 1e-8);
    }

    #[test]
    fn point_maps_round_trip(n in 1usize..=8, nu in prop::collection::vec(0usize..8, 1..=8)) {
        let nu = PointMap::new(n, nu.into_iter().map(|k| k % n).collect()).unwrap();
        let table = composition_operator(&nu);
        prop_assert_eq!(extract_point_map(&table, 1e-10).unwrap(), nu);
    }
}

#[test]
fn classify_is_deterministic() {
    for seed in 0..5 {
        let bb = as_blackbox(&random_canonical_layout(seed).unwrap()).unwrap();
        let a = serde_json::to_string(&classify(&bb, 30, seed, 1e-8)).unwrap();
        let b = serde_json::to_string(&classify(&bb, 30, seed, 1e-8)).unwrap();
        assert_eq!(a, b);
    }
}
