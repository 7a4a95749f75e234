use bcstab_core::formed::{random_scalar, FormedSpace};
use bcstab_core::linalg::{Matrix, Subspace, Vector};
use bcstab_core::{Base, Epsilon, FieldSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn specs() -> [FieldSpec; 4] {
    [
        FieldSpec::alternating(Base::Rationals),
        FieldSpec::symmetric(Base::Rationals),
        FieldSpec::symmetric(Base::GaussianRationals),
        FieldSpec::hermitian(),
    ]
}

fn random_standard(rng: &mut ChaCha8Rng) -> FormedSpace {
    let spec = specs()[rng.gen_range(0..4)];
    let r = rng.gen_range(0..=3);
    let d = match (spec.epsilon(), spec.base(), spec.sigma()) {
        (Epsilon::Minus, _, _) => 0,
        (_, Base::GaussianRationals, bcstab_core::Involution::Identity) => rng.gen_range(0..=1),
        _ => rng.gen_range(0..=2),
    };
    FormedSpace::standard(spec, r, d).unwrap()
}

/// A product of `2n` random shears `I + c·E_ij` with `c` of height one.
fn random_unimodular(base: Base, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut p = Matrix::identity(n);
    if n < 2 {
        return p;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let mut e = Matrix::identity(n);
        e[(i, j)] = random_scalar(base, rng, 1);
        p = e.mul(&p);
    }
    p
}

/// `A + ε σ(A)ᵀ` is reflexive for every `A`.
fn random_reflexive(spec: FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> FormedSpace {
    let a = Matrix::from_fn(n, n, |_, _| random_scalar(spec.base(), rng, 3));
    let g = a.add(&a.sigma_transpose(spec).scale(&spec.epsilon_scalar()));
    FormedSpace::new(spec, g).unwrap()
}

fn random_vectors(v: &FormedSpace, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vector> {
    (0..k).map(|_| v.random_vector(rng, 3)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gram_reflexivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = specs()[rng.gen_range(0..4)];
        let n = rng.gen_range(1..=5);
        let v = random_reflexive(spec, n, &mut rng);
        let x = v.random_vector(&mut rng, 4);
        let y = v.random_vector(&mut rng, 4);
        let lhs = v.omega(&y, &x).unwrap();
        let rhs = spec.epsilon_scalar() * spec.apply(&v.omega(&x, &y).unwrap());
        prop_assert_eq!(lhs, rhs);
        if spec.epsilon() == Epsilon::Minus {
            prop_assert!(v.q(&x).is_zero());
        }
    }

    #[test]
    fn perp_duality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_standard(&mut rng);
        let n = v.dim();
        let k = rng.gen_range(0..=n);
        let a = Subspace::span(n, &random_vectors(&v, k, &mut rng));
        let ap = v.perp(&a);
        prop_assert_eq!(a.dim() + ap.dim(), n);
        prop_assert_eq!(&v.perp(&ap), &a);
        let b = a.sum(&Subspace::span(n, &random_vectors(&v, 1, &mut rng)));
        prop_assert!(v.perp(&b).is_subspace_of(&ap));
    }

    #[test]
    fn adapted_basis_reassembles_the_gram(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = specs()[rng.gen_range(0..4)];
        let n = rng.gen_range(0..=5);
        let v = random_reflexive(spec, n, &mut rng);
        let b = v.adapted_basis();
        let vs = b.vectors();
        prop_assert_eq!(vs.len(), n);
        prop_assert_eq!(Subspace::span(n, &vs).dim(), n);
        prop_assert_eq!(v.gram_of(&vs), b.expected_gram(&v));
        prop_assert!(b.anisotropic.iter().all(|h| !v.q(h).is_zero()));
    }

    #[test]
    fn rank_is_invariant_under_unimodular_change_of_basis(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_standard(&mut rng);
        let p = random_unimodular(v.spec().base(), v.dim(), &mut rng);
        let g = p.sigma_transpose(v.spec()).mul(v.gram()).mul(&p);
        let w = FormedSpace::new(v.spec(), g).unwrap();
        prop_assert_eq!(w.rank(), v.rank());
    }

    #[test]
    fn witt_extension_restricts_to_the_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_standard(&mut rng);
        let n = v.dim();
        let k = rng.gen_range(0..=n);
        let w = Subspace::span(n, &random_vectors(&v, k, &mut rng));
        let h = v.random_isometry(&mut rng, 4).unwrap();
        let images: Vec<Vector> = w.basis().iter().map(|x| h.apply(x)).collect();
        let g = v.witt_extend(w.basis(), &images).unwrap();
        prop_assert!(v.is_isometry(g.matrix()));
        for (x, y) in w.basis().iter().zip(&images) {
            prop_assert_eq!(&g.apply(x), y);
        }
    }
}
