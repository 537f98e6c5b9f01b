use laffaille::breuil::breuil_validate;
use laffaille::functors::{breuil_to_fl, change_basis, fl_to_breuil, roundtrip_breuil, roundtrip_fl, section_compute, MatrixRelation};
use laffaille::gen::{self, rng_for};
use laffaille::kisin::kisin_to_breuil;
use laffaille::*;
use proptest::prelude::*;
use rand::Rng;

fn amb(p: u64, r: u32) -> Ambient {
    Ambient::standard(p, r, 6).unwrap()
}

#[test]
fn rank_one_fl_image_is_p_power_times_unit() {
    // Ftil = (c), jump j: the Breuil Frobenius matrix is p^j c in degree zero
    let a = amb(5, 3);
    for j in 0..=3 {
        let c = a.witt.from_int(7);
        let m = FLModule::new(&a, vec![j], RingMatrix::from_rows(vec![vec![c.clone()]]).unwrap()).unwrap();
        let b = fl_to_breuil(&a, &m);
        let x = b.phi.get(0, 0);
        assert!(a.witt.eq_at(&x.gcoeffs()[0], &a.witt.from_int(7 * 5i64.pow(j)), 6));
        assert!(x.gcoeffs()[1..].iter().all(|g| a.witt.is_zero(g)));
        assert!(breuil_validate(&a, &b).unwrap().strongly_divisible);
        // dividing by p^j costs j digits of precision
        let back = breuil_to_fl(&a, &b).unwrap();
        assert_eq!(back.jumps, m.jumps);
        assert!(back.ftil.eq_mod(&a.witt, &m.ftil, 6));
    }
}

#[test]
fn unipotent_only_at_r_equal_p_minus_one() {
    let a = amb(3, 2);
    // jump r with unit Ftil is multiplicative, so not unipotent
    let m = FLModule::new(&a, vec![2], RingMatrix::from_ints(&a.witt, &[&[1]])).unwrap();
    assert_eq!(roundtrip_fl(&a, &m, false).unwrap_err(), Error::NotUnipotent);
    assert!(roundtrip_fl(&a, &m, true).unwrap().success());
}

#[test]
fn perturbed_basis_round_trip() {
    let a = amb(5, 3);
    let mut rng = rng_for(11);
    let m = gen::fl_random(&a, &mut rng, vec![0, 2]).unwrap();
    let g = gen::random_basis_change(&a, &mut rng, 2);
    let rep = roundtrip_breuil(&a, &m, &g, 10, &mut rng).unwrap();
    assert!(rep.success(), "{:?}", rep.details);
    assert!(matches!(rep.matrix_relation, MatrixRelation::Exact | MatrixRelation::Conjugate(_)));
}

#[test]
fn kisin_sections_survive_a_basis_change() {
    let a = amb(5, 3);
    let mut rng = rng_for(11);
    let k = gen::kisin_random_gls(&a, &mut rng, vec![0, 2]).unwrap();
    let b = kisin_to_breuil(&a, &k).unwrap();
    let g = gen::random_basis_change(&a, &mut rng, 2);
    let moved = change_basis(&a, &b, &g).unwrap();
    let (s0, s1) = (section_compute(&a, &b).unwrap(), section_compute(&a, &moved).unwrap());
    // both recover the same filtered module
    let (m0, m1) = (breuil_to_fl(&a, &b).unwrap(), breuil_to_fl(&a, &moved).unwrap());
    assert_eq!(m0.jumps, m1.jumps);
    assert!(s0.iterations <= s0.rate_bound + 1 && s1.residual >= 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fl_round_trip_is_exact(seed in any::<u64>(), d in 1usize..=3) {
        let a = amb(5, 3);
        let mut rng = rng_for(seed);
        let j = gen::random_jumps(&a, &mut rng, d);
        let m = gen::fl_random(&a, &mut rng, j).unwrap();
        let rep = roundtrip_fl(&a, &m, false).unwrap();
        prop_assert!(rep.success(), "{:?}", rep.details);
    }

    #[test]
    fn fl_section_is_identity(seed in any::<u64>()) {
        let a = amb(3, 2);
        let mut rng = rng_for(seed);
        let d = rng.gen_range(1..=3);
        let j = gen::random_jumps(&a, &mut rng, d);
        let m = gen::fl_random(&a, &mut rng, j).unwrap();
        let res = section_compute(&a, &fl_to_breuil(&a, &m)).unwrap();
        prop_assert_eq!(res.iterations, 0);
        prop_assert!(res.bmat.eq_mod(&a.pd, &RingMatrix::identity(&a.pd, d), 6));
    }

    #[test]
    fn not_strong_modules_are_not_strongly_divisible(seed in any::<u64>()) {
        let a = amb(5, 3);
        let mut rng = rng_for(seed);
        let d = rng.gen_range(1..=3);
        let j = gen::random_jumps(&a, &mut rng, d);
        let m = gen::fl_random_not_strong(&a, &mut rng, j).unwrap();
        prop_assert!(!breuil_validate(&a, &fl_to_breuil(&a, &m)).unwrap().strongly_divisible);
    }
}
