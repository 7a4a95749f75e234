use bcstab_core::formed::FormedSpace;
use bcstab_core::stiefel::{is_simplex, random_simplex, transitivity_witness, SimplexClass, StiefelSimplex};
use bcstab_core::{Base, FieldSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_space(rng: &mut ChaCha8Rng, max_r: usize) -> FormedSpace {
    let r = rng.gen_range(1..=max_r);
    let (spec, d) = match rng.gen_range(0..4) {
        0 => (FieldSpec::alternating(Base::Rationals), 0),
        1 => (FieldSpec::symmetric(Base::Rationals), rng.gen_range(0..=2)),
        2 => (FieldSpec::symmetric(Base::GaussianRationals), rng.gen_range(0..=1)),
        _ => (FieldSpec::hermitian(), rng.gen_range(0..=2)),
    };
    FormedSpace::standard(spec, r, d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn witnesses_map_simplices_exactly(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_space(&mut rng, 5);
        let r = v.rank();
        let l = rng.gen_range(0..r);
        let x = random_simplex(&v, l, &mut rng).unwrap();
        let y = random_simplex(&v, l, &mut rng).unwrap();
        let g = transitivity_witness(&v, &x, &y).unwrap();
        prop_assert!(v.is_isometry(g.matrix()));
        prop_assert_eq!(x.transform(&g), y);
    }

    #[test]
    fn top_dimensional_witnesses(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_space(&mut rng, 4);
        let r = v.rank();
        let x = random_simplex(&v, r, &mut rng).unwrap();
        let y = random_simplex(&v, r, &mut rng).unwrap();
        let g = transitivity_witness(&v, &x, &y).unwrap();
        prop_assert_eq!(x.transform(&g), y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn faces_of_open_simplices_are_open(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_space(&mut rng, 4);
        let l = rng.gen_range(0..=v.rank());
        let s = random_simplex(&v, l, &mut rng).unwrap();
        prop_assert_eq!(is_simplex(&v, s.points()), SimplexClass::InX);
        for i in 0..s.len() {
            prop_assert_eq!(is_simplex(&v, s.face(i).unwrap().points()), SimplexClass::InX);
        }
    }

    #[test]
    fn faces_commute_with_the_action(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_space(&mut rng, 4);
        let l = rng.gen_range(0..=v.rank());
        let s = random_simplex(&v, l, &mut rng).unwrap();
        let g = v.random_isometry(&mut rng, 3).unwrap();
        for i in 0..s.len() {
            prop_assert_eq!(s.transform(&g).face(i).unwrap(), s.face(i).unwrap().transform(&g));
        }
    }

    #[test]
    fn no_open_simplex_beyond_dimension_r(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_space(&mut rng, 3);
        let r = v.rank();
        let mut points = random_simplex(&v, r, &mut rng).unwrap().points().to_vec();
        let extra = random_simplex(&v, r, &mut rng).unwrap();
        points.push(extra.points()[0].clone());
        prop_assert_ne!(is_simplex(&v, &points), SimplexClass::InX);
        let s = StiefelSimplex::new(points);
        prop_assert_eq!(s.len(), r + 2);
    }
}
