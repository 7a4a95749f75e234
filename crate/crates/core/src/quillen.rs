//! Quillen data of the classical families: the flag `o_{r,q}`, its stabilizer
//! `H_{r,q}`, the face-translation matrices `w_{r,q,i}` and the block maps
//! `σ_{r,q}`, `π_{r,q}`, `ι`.
//!
//! In the coordinates `(e_r, …, e_1, h_1, …, h_d, f_1, …, f_r)` the flag is
//! spanned by the first `q+1` unit vectors. Its stabilizer consists of the
//! isometries
//!
//! ```text
//!     ⎛ D  ∗  ∗    ⎞
//!     ⎜ 0  A  ∗    ⎟      D diagonal, A ∈ G_{r−q−1}, Θ(D) = Q σ(D)^{−ᵀ} Q
//!     ⎝ 0  0  Θ(D) ⎠
//! ```
//!
//! `M_{q,i}` is the cyclic shift on `q+2−i` coordinates whose subdiagonal
//! identity block has size `q+1−i`; it is the matrix forced by
//! `δ_i(o_{r,q+1}) = w_{r,q,i}·o_{r,q}`. The transpose in `Θ` matters once the
//! argument is a permutation rather than a diagonal matrix.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::formed::{random_scalar, FormedSpace, Isometry};
use crate::linalg::{unit_vector, vec_add, zero_vector, Matrix, Vector};
use crate::scalar::{Base, Epsilon, FieldSpec, Scalar};
use crate::stiefel::base_flag;

/// The eight families accepted on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Sp,
    /// `O_{2r}(C)`
    OC0,
    /// `O_{2r+1}(C)`
    OC1,
    OR,
    U,
    /// `SO_{2r+1}(C)`
    SOC,
    SOR,
    SU,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Sp,
        Family::OC0,
        Family::OC1,
        Family::OR,
        Family::U,
        Family::SOC,
        Family::SOR,
        Family::SU,
    ];
    /// Automorphism groups of a formed space, as opposed to their determinant-one subgroups.
    pub const GENERAL: [Family; 5] = [Family::Sp, Family::OC0, Family::OC1, Family::OR, Family::U];

    pub fn code(self) -> &'static str {
        match self {
            Family::Sp => "sp",
            Family::OC0 => "oC0",
            Family::OC1 => "oC1",
            Family::OR => "oR",
            Family::U => "u",
            Family::SOC => "soC",
            Family::SOR => "soR",
            Family::SU => "su",
        }
    }

    pub fn from_code(code: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Sp => "Sp_{2r}(k)",
            Family::OC0 => "O_{2r}(C)",
            Family::OC1 => "O_{2r+1}(C)",
            Family::OR => "O(d+r,r)",
            Family::U => "U(d+r,r)",
            Family::SOC => "SO_{2r+1}(C)",
            Family::SOR => "SO(d+r,r)",
            Family::SU => "SU(d+r,r)",
        }
    }

    pub fn is_special(self) -> bool {
        matches!(self, Family::SOC | Family::SOR | Family::SU)
    }

    /// The family whose determinant-one subgroups form `self`.
    pub fn general(self) -> Family {
        match self {
            Family::SOC => Family::OC1,
            Family::SOR => Family::OR,
            Family::SU => Family::U,
            f => f,
        }
    }

    pub fn field_spec(self) -> FieldSpec {
        match self.general() {
            Family::Sp => FieldSpec::alternating(Base::Rationals),
            Family::OC0 | Family::OC1 => FieldSpec::symmetric(Base::GaussianRationals),
            Family::OR => FieldSpec::symmetric(Base::Rationals),
            _ => FieldSpec::hermitian(),
        }
    }

    pub fn admits(self, d: usize) -> bool {
        match self {
            Family::Sp | Family::OC0 => d == 0,
            Family::OC1 | Family::SOC => d == 1,
            Family::OR | Family::U | Family::SU => true,
            Family::SOR => d % 2 == 1,
        }
    }

    /// The smallest admissible `d`.
    pub fn default_d(self) -> usize {
        match self {
            Family::OC1 | Family::SOC | Family::SOR => 1,
            _ => 0,
        }
    }

    /// Degrees `q ≤ q0` are stable for the initial reason that `H¹_b`
    /// vanishes, plus `H²_b` outside the indefinite real orthogonal case.
    pub fn q0(self) -> usize {
        match self.general() {
            Family::OR => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FamilySpec {
    pub family: Family,
    pub field_spec: FieldSpec,
    pub d: usize,
    pub name: &'static str,
}

impl FamilySpec {
    pub fn new(family: Family, d: usize) -> Result<FamilySpec> {
        if !family.admits(d) {
            return Err(Error::InadmissibleParameters);
        }
        Ok(FamilySpec {
            family,
            field_spec: family.field_spec(),
            d,
            name: family.name(),
        })
    }

    pub fn q0(&self) -> usize {
        self.family.q0()
    }

    /// `V^{r,d}`, whose isometry group is `G_r`.
    pub fn space(&self, r: usize) -> Result<FormedSpace> {
        FormedSpace::standard(self.field_spec, r, self.d)
    }

    /// The general families with the small `d` covered by the exhaustive sweep.
    pub fn sweep_grid() -> Vec<FamilySpec> {
        let mut out = Vec::new();
        for family in Family::GENERAL {
            let ds: &[usize] = match family {
                Family::Sp | Family::OC0 => &[0],
                Family::OC1 => &[1],
                _ => &[0, 1, 2],
            };
            for &d in ds {
                out.push(FamilySpec::new(family, d).expect("admissible"));
            }
        }
        out
    }
}

/// `Θ(A) = Q σ(A)^{−ᵀ} Q` with `Q` antidiagonal.
pub fn theta(spec: FieldSpec, a: &Matrix) -> Result<Matrix> {
    let q = crate::formed::antidiagonal(a.rows());
    let inv = a.sigma_transpose(spec).inverse()?;
    Ok(q.mul(&inv).mul(&q))
}

/// `ι: A ↦ I_1 ⊕ A ⊕ I_1`, the inclusion `G_m → G_{m+1}`.
pub fn inclusion(a: &Matrix) -> Matrix {
    let one = Matrix::identity(1);
    Matrix::direct_sum(&[&one, a, &one])
}

/// `σ_{r,q}: G_{r−q−1} → H_{r,q}`, `A ↦ I_{q+1} ⊕ A ⊕ I_{q+1}`.
pub fn section(a: &Matrix, q: usize) -> Matrix {
    let id = Matrix::identity(q + 1);
    Matrix::direct_sum(&[&id, a, &id])
}

/// `π_{r,q}: H_{r,q} → G_{r−q−1}`, the middle diagonal block.
pub fn projection(m: &Matrix, q: usize) -> Matrix {
    let k = m.rows() - 2 * (q + 1);
    m.block(q + 1, q + 1, k, k)
}

/// Sizes of the three diagonal blocks of the stabilizer pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BlockPattern {
    pub diagonal: usize,
    pub middle: usize,
}

/// The Quillen data of `G_r` at degree `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuillenData {
    pub family: FamilySpec,
    pub r: usize,
    pub q: usize,
    pub space: FormedSpace,
    pub flag: crate::stiefel::StiefelSimplex,
    pub pattern: BlockPattern,
    /// `w_{r,q,i}` for `i = 0, …, q+1`; empty when `q > r−2`.
    pub w: Vec<Isometry>,
}

impl QuillenData {
    pub fn new(family: FamilySpec, r: usize, q: usize) -> Result<QuillenData> {
        let space = family.space(r)?;
        let flag = base_flag(&space, q)?;
        let pattern = BlockPattern {
            diagonal: q + 1,
            middle: space.dim() - 2 * (q + 1),
        };
        let w = if q + 2 <= r {
            (0..=q + 1).map(|i| w_matrix(&family, r, q, i)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(QuillenData {
            family,
            r,
            q,
            space,
            flag,
            pattern,
            w,
        })
    }

    /// `π_{r,q}`, checked to be applied to a stabilizer element.
    pub fn project(&self, m: &Matrix) -> Result<Matrix> {
        if !stabilizer_membership(&self.family, m, self.r, self.q)? {
            return Err(Error::HypothesisViolated("matrix does not stabilize the flag"));
        }
        Ok(projection(m, self.q))
    }

    pub fn section(&self, a: &Matrix) -> Matrix {
        section(a, self.q)
    }
}

fn check_degree(r: usize, q: usize) -> Result<()> {
    if q >= r {
        return Err(Error::IndexOutOfRange { index: q, len: r });
    }
    Ok(())
}

/// Whether `M` lies in `H_{r,q}`, the pointwise stabilizer of the lines of `o_{r,q}`.
pub fn stabilizer_membership(family: &FamilySpec, m: &Matrix, r: usize, q: usize) -> Result<bool> {
    check_degree(r, q)?;
    let space = family.space(r)?;
    if !space.is_isometry(m) {
        return Err(Error::NotAnIsometry);
    }
    let n = space.dim();
    let k = q + 1;
    for j in 0..k {
        if m[(j, j)].is_zero() || (0..n).any(|i| i != j && !m[(i, j)].is_zero()) {
            return Ok(false);
        }
    }
    for i in n - k..n {
        if (0..n - k).any(|j| !m[(i, j)].is_zero()) {
            return Ok(false);
        }
    }
    let d = Matrix::from_fn(k, k, |i, j| if i == j { m[(i, i)].clone() } else { Scalar::zero() });
    if m.block(n - k, n - k, k, k) != theta(family.field_spec, &d)? {
        return Ok(false);
    }
    Ok(family.space(r - k)?.is_isometry(&projection(m, q)))
}

/// `M_{q,i}`: sends the local basis vector `j` to `j+1` and the last to the first.
pub fn m_block(q: usize, i: usize) -> Matrix {
    let k = q + 2 - i;
    Matrix::from_fn(k, k, |a, b| if a == (b + 1) % k { Scalar::one() } else { Scalar::zero() })
}

/// `w_{r,q,i} = R ⊕ I_{d+2(r−q−2)} ⊕ Θ(R)` with `R = I_i ⊕ M_{q,i}`.
pub fn w_matrix(family: &FamilySpec, r: usize, q: usize, i: usize) -> Result<Isometry> {
    if q + 2 > r {
        return Err(Error::IndexOutOfRange {
            index: q,
            len: r.saturating_sub(1),
        });
    }
    if i > q + 1 {
        return Err(Error::IndexOutOfRange { index: i, len: q + 2 });
    }
    let rr = Matrix::direct_sum(&[&Matrix::identity(i), &m_block(q, i)]);
    let mid = Matrix::identity(family.d + 2 * (r - q - 2));
    let th = theta(family.field_spec, &rr)?;
    Isometry::new(&family.space(r)?, Matrix::direct_sum(&[&rr, &mid, &th]))
}

/// `δ_i(o_{r,q+1}) = w_{r,q,i}·o_{r,q}`.
pub fn verify_flag_identity(family: &FamilySpec, r: usize, q: usize, i: usize) -> Result<bool> {
    let space = family.space(r)?;
    let w = w_matrix(family, r, q, i)?;
    Ok(base_flag(&space, q + 1)?.face(i)? == base_flag(&space, q)?.transform(&w))
}

fn random_unit<R: Rng + ?Sized>(base: Base, rng: &mut R) -> Scalar {
    loop {
        let x = random_scalar(base, rng, 2);
        if !x.is_zero() {
            return x;
        }
    }
}

/// A random element of `ker π_{r,q}`: `diag(D, I, Θ(D))` times one Eichler
/// map `E(e_a, v_a)` per flag line, with `v_a` free of `f`-components on the flag.
pub fn random_kernel_element<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, rng: &mut R) -> Result<Matrix> {
    check_degree(r, q)?;
    let space = family.space(r)?;
    let n = space.dim();
    let base = family.field_spec.base();
    let k = q + 1;
    let dvals: Vec<Scalar> = (0..k).map(|_| random_unit(base, rng)).collect();
    let dmat = Matrix::from_fn(k, k, |i, j| if i == j { dvals[i].clone() } else { Scalar::zero() });
    let mut m = Matrix::direct_sum(&[&dmat, &Matrix::identity(n - 2 * k), &theta(family.field_spec, &dmat)?]);
    for a in 0..k {
        let mut v = space.random_vector(rng, 2);
        for p in 0..k {
            v[n - 1 - p] = Scalar::zero();
        }
        let e = space.eichler(&unit_vector(n, a), &v)?;
        m = m.mul(e.matrix());
    }
    Ok(m)
}

/// `σ_{r,q}(A)·K` for random `A ∈ G_{r−q−1}` and a random kernel element `K`.
pub fn random_stabilizer_element<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, rng: &mut R) -> Result<Matrix> {
    check_degree(r, q)?;
    let a = family.space(r - q - 1)?.random_isometry(rng, 3)?;
    Ok(section(a.matrix(), q).mul(&random_kernel_element(family, r, q, rng)?))
}

fn conjugate(space: &FormedSpace, w: &Matrix, h: &Matrix) -> Matrix {
    w.mul(h).mul(&space.isometry_inverse(w))
}

/// `w h w⁻¹ ∈ H_{r,q+1}` for `samples` random `h ∈ H_{r,q+1}`.
pub fn verify_normalizer_with<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, w: &Matrix, samples: usize, rng: &mut R) -> Result<bool> {
    let space = family.space(r)?;
    for _ in 0..samples {
        let h = random_stabilizer_element(family, r, q + 1, rng)?;
        if !stabilizer_membership(family, &conjugate(&space, w, &h), r, q + 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn verify_normalizer<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, i: usize, samples: usize, rng: &mut R) -> Result<bool> {
    let w = w_matrix(family, r, q, i)?;
    verify_normalizer_with(family, r, q, w.matrix(), samples, rng)
}

/// `w_{r,q,i}` followed by the swap `e_{r−q−1} ↦ f_{r−q−1}`, `f_{r−q−1} ↦ ε·e_{r−q−1}`:
/// an isometry that moves the last flag line off the flag.
pub fn non_normalizing_mutation(family: &FamilySpec, r: usize, q: usize, i: usize) -> Result<Matrix> {
    let w = w_matrix(family, r, q, i)?;
    let n = w.matrix().rows();
    let (e, f) = (q + 1, n - 2 - q);
    let mut s = Matrix::identity(n);
    s[(e, e)] = Scalar::zero();
    s[(f, f)] = Scalar::zero();
    s[(f, e)] = Scalar::one();
    s[(e, f)] = family.field_spec.epsilon_scalar();
    Ok(w.matrix().mul(&s))
}

/// Elementary isometries along the coordinate vectors and their pairwise
/// sums: reflections for symmetric and Hermitian forms, unit transvections
/// for alternating ones.
pub fn elementary_generators(space: &FormedSpace) -> Vec<Matrix> {
    let n = space.dim();
    let mut vs: Vec<Vector> = (0..n).map(|i| unit_vector(n, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            vs.push(vec_add(&unit_vector(n, i), &unit_vector(n, j)));
            if space.spec().base() == Base::GaussianRationals {
                let mut v = zero_vector(n);
                v[i] = Scalar::one();
                v[j] = Scalar::i();
                vs.push(v);
            }
        }
    }
    vs.iter()
        .filter_map(|v| match space.spec().epsilon() {
            Epsilon::Minus => space.transvection(v, &Scalar::one()).ok(),
            Epsilon::Plus => space.reflection(v).ok(),
        })
        .map(Isometry::into_matrix)
        .collect()
}

/// `π_{r,q}(w·σ_{r,q+1}(A)·w⁻¹) = ι(A)` for the elementary generators of
/// `G_{r−q−2}` and `samples` random `A`.
pub fn verify_diagram<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, i: usize, samples: usize, rng: &mut R) -> Result<bool> {
    let w = w_matrix(family, r, q, i)?;
    let space = family.space(r)?;
    let small = family.space(r - q - 2)?;
    let mut tests = elementary_generators(&small);
    for _ in 0..samples {
        tests.push(small.random_isometry(rng, 3)?.into_matrix());
    }
    Ok(tests
        .iter()
        .all(|a| projection(&conjugate(&space, w.matrix(), &section(a, q + 1)), q) == inclusion(a)))
}

fn is_nilpotent(m: &Matrix) -> bool {
    let mut p = m.clone();
    for _ in 0..m.rows() {
        if p.is_zero() {
            return true;
        }
        p = p.mul(m);
    }
    p.is_zero()
}

/// Evidence that `ker π_{r,q}` is solvable: products and inverses of random
/// kernel elements stay in the kernel, and their commutators have trivial
/// diagonal and are unipotent, so the kernel is an extension of a unipotent
/// group by a diagonal torus.
pub fn kernel_is_block_solvable<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, samples: usize, rng: &mut R) -> Result<bool> {
    check_degree(r, q)?;
    let space = family.space(r)?;
    let id = Matrix::identity(space.dim() - 2 * (q + 1));
    let in_kernel = |m: &Matrix| -> Result<bool> { Ok(stabilizer_membership(family, m, r, q)? && projection(m, q) == id) };
    for _ in 0..samples {
        let a = random_kernel_element(family, r, q, rng)?;
        let b = random_kernel_element(family, r, q, rng)?;
        let (ai, bi) = (space.isometry_inverse(&a), space.isometry_inverse(&b));
        if !(in_kernel(&a)? && in_kernel(&a.mul(&b))? && in_kernel(&ai)?) {
            return Ok(false);
        }
        let c = a.mul(&b).mul(&ai).mul(&bi);
        if !(0..=q).all(|j| c[(j, j)].is_one()) || !is_nilpotent(&c.sub(&Matrix::identity(space.dim()))) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `π(σ(A)) = A` for random `A ∈ G_{r−q−1}`.
pub fn verify_section<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, samples: usize, rng: &mut R) -> Result<bool> {
    check_degree(r, q)?;
    let small = family.space(r - q - 1)?;
    for _ in 0..samples {
        let a = small.random_isometry(rng, 3)?.into_matrix();
        let s = section(&a, q);
        if !stabilizer_membership(family, &s, r, q)? || projection(&s, q) != a {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `π(MN) = π(M)π(N)` on random pairs of `H_{r,q}`.
pub fn verify_projection_homomorphism<R: Rng + ?Sized>(family: &FamilySpec, r: usize, q: usize, samples: usize, rng: &mut R) -> Result<bool> {
    for _ in 0..samples {
        let m = random_stabilizer_element(family, r, q, rng)?;
        let n = random_stabilizer_element(family, r, q, rng)?;
        if projection(&m.mul(&n), q) != projection(&m, q).mul(&projection(&n, q)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stiefel::StiefelSimplex;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fam(f: Family, d: usize) -> FamilySpec {
        FamilySpec::new(f, d).unwrap()
    }

    #[test]
    fn catalog() {
        assert_eq!(fam(Family::Sp, 0).name, "Sp_{2r}(k)");
        assert_eq!(fam(Family::U, 2).name, "U(d+r,r)");
        assert_eq!(Family::from_code("oR"), Some(Family::OR));
        assert_eq!(Family::OR.q0(), 1);
        assert_eq!(Family::SOR.q0(), 1);
        assert_eq!(Family::U.q0(), 2);
        assert!(FamilySpec::new(Family::Sp, 1).is_err());
        assert!(FamilySpec::new(Family::SOR, 2).is_err());
        assert_eq!(FamilySpec::sweep_grid().len(), 9);
        for f in Family::ALL {
            assert!(FamilySpec::new(f, f.default_d()).is_ok());
        }
    }

    #[test]
    fn m_blocks() {
        // q = 1, i = 0: e_0 ↦ e_1 ↦ e_2 ↦ e_0.
        assert_eq!(m_block(1, 0), Matrix::from_int_rows(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(m_block(1, 2), Matrix::identity(1));
    }

    #[test]
    fn identity_and_sections_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in FamilySpec::sweep_grid() {
            let r = 3;
            let n = spec.space(r).unwrap().dim();
            for q in 0..r {
                assert!(stabilizer_membership(&spec, &Matrix::identity(n), r, q).unwrap());
                assert!(verify_section(&spec, r, q, 2, &mut rng).unwrap(), "{spec:?} q={q}");
            }
        }
    }

    #[test]
    fn membership_matches_flag_stabilization() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for spec in [fam(Family::Sp, 0), fam(Family::U, 1), fam(Family::OR, 1)] {
            let (r, q) = (3, 1);
            let space = spec.space(r).unwrap();
            let o = base_flag(&space, q).unwrap();
            let mut members = 0;
            for s in 0..100 {
                let g = if s % 2 == 0 {
                    random_stabilizer_element(&spec, r, q, &mut rng).unwrap()
                } else {
                    space.random_isometry(&mut rng, 3).unwrap().into_matrix()
                };
                let fixes = o.transform(&Isometry::new(&space, g.clone()).unwrap()) == o;
                let member = stabilizer_membership(&spec, &g, r, q).unwrap();
                assert_eq!(member, fixes);
                members += member as usize;
            }
            assert!((50..100).contains(&members));
        }
    }

    #[test]
    fn non_isometries_are_rejected() {
        let spec = fam(Family::Sp, 0);
        let m = Matrix::identity(4).scale(&Scalar::from_int(2));
        assert_eq!(stabilizer_membership(&spec, &m, 2, 0), Err(Error::NotAnIsometry));
        assert!(matches!(
            stabilizer_membership(&spec, &Matrix::identity(4), 2, 2),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn w_matrices() {
        for spec in FamilySpec::sweep_grid() {
            for r in 2..=4 {
                for q in 0..=r - 2 {
                    for i in 0..=q + 1 {
                        assert!(verify_flag_identity(&spec, r, q, i).unwrap());
                    }
                    let space = spec.space(r).unwrap();
                    let w = w_matrix(&spec, r, q, q + 1).unwrap();
                    let o = base_flag(&space, q).unwrap();
                    assert_eq!(o.transform(&w), o);
                }
            }
        }
        let sp = fam(Family::Sp, 0);
        assert!(matches!(w_matrix(&sp, 3, 2, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(w_matrix(&sp, 3, 0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn face_translation_by_hand() {
        // r = 3, q = 0, i = 0: w·[e_3] = [e_2].
        let spec = fam(Family::Sp, 0);
        let w = w_matrix(&spec, 3, 0, 0).unwrap();
        let expected = StiefelSimplex::new(alloc::vec![crate::formed::ProjectivePoint::new(unit_vector(6, 1)).unwrap()]);
        assert_eq!(base_flag(&spec.space(3).unwrap(), 0).unwrap().transform(&w), expected);
    }

    #[test]
    fn normalizer_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sp = fam(Family::Sp, 0);
        assert!(verify_normalizer(&sp, 3, 0, 0, 20, &mut rng).unwrap());
        let u = fam(Family::U, 1);
        for q in 0..=2 {
            for i in 0..=q + 1 {
                assert!(verify_normalizer(&u, 4, q, i, 20, &mut rng).unwrap());
            }
        }
        for spec in [sp, u, fam(Family::OC0, 0)] {
            let bad = non_normalizing_mutation(&spec, 3, 0, 0).unwrap();
            assert!(spec.space(3).unwrap().is_isometry(&bad));
            assert!(!verify_normalizer_with(&spec, 3, 0, &bad, 20, &mut rng).unwrap());
        }
    }

    #[test]
    fn diagram_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sp = fam(Family::Sp, 0);
        assert!(verify_diagram(&sp, 4, 1, 0, 5, &mut rng).unwrap());
        let space = sp.space(4).unwrap();
        let w = w_matrix(&sp, 4, 1, 0).unwrap();
        let small = sp.space(1).unwrap();
        let id = Matrix::identity(small.dim());
        assert!(projection(&conjugate(&space, w.matrix(), &section(&id, 2)), 1).is_identity());
        for spec in [fam(Family::OR, 2), fam(Family::OC1, 1), fam(Family::U, 0)] {
            assert!(verify_diagram(&spec, 4, 0, 1, 5, &mut rng).unwrap());
        }
    }

    #[test]
    fn kernels() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for spec in [fam(Family::Sp, 0), fam(Family::U, 1), fam(Family::OC1, 1)] {
            assert!(kernel_is_block_solvable(&spec, 3, 1, 10, &mut rng).unwrap());
            assert!(verify_projection_homomorphism(&spec, 3, 0, 10, &mut rng).unwrap());
        }
    }

    #[test]
    fn quillen_data() {
        let data = QuillenData::new(fam(Family::OR, 1), 3, 1).unwrap();
        assert_eq!(data.pattern, BlockPattern { diagonal: 2, middle: 3 });
        assert_eq!(data.w.len(), 3);
        assert_eq!(data.flag.len(), 2);
        let top = QuillenData::new(fam(Family::OR, 1), 3, 2).unwrap();
        assert!(top.w.is_empty());
        let a = fam(Family::OR, 1).space(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let g = a.random_isometry(&mut rng, 2).unwrap().into_matrix();
        assert_eq!(data.project(&data.section(&g)).unwrap(), g);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn theta_is_an_involution(entries in proptest::collection::vec((1i64..5, -3i64..4), 1..5), hermitian in any::<bool>()) {
            let spec = if hermitian { FieldSpec::hermitian() } else { FieldSpec::symmetric(Base::GaussianRationals) };
            let k = entries.len();
            let d = Matrix::from_fn(k, k, |i, j| if i == j { Scalar::gauss(entries[i].0, entries[i].1) } else { Scalar::zero() });
            prop_assert_eq!(theta(spec, &theta(spec, &d).unwrap()).unwrap(), d);
        }

        #[test]
        fn w_is_an_isometry(r in 2usize..6, q_seed in 0usize..10, i_seed in 0usize..10, f in 0usize..5) {
            let spec = FamilySpec::sweep_grid()[f * 2 % 9];
            let q = q_seed % (r - 1);
            let i = i_seed % (q + 2);
            let w = w_matrix(&spec, r, q, i).unwrap();
            prop_assert!(spec.space(r).unwrap().is_isometry(w.matrix()));
        }
    }
}
