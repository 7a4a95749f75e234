//! Simplices of the Stiefel complex: tuples of pairwise-orthogonal isotropic
//! points, in general position for the open complex `X`.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::formed::{FormedSpace, Isometry, ProjectivePoint};
use crate::linalg::{unit_vector, vec_add, vec_scale, Matrix, Subspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimplexClass {
    /// Pairwise orthogonal isotropic points in general position.
    InX,
    /// Pairwise orthogonal isotropic points, not in general position.
    InXBar,
    No,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StiefelSimplex {
    points: Vec<ProjectivePoint>,
}

impl StiefelSimplex {
    pub fn new(points: Vec<ProjectivePoint>) -> Self {
        StiefelSimplex { points }
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    /// `l` for a simplex with `l + 1` points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `δ_i`: deletes the `i`-th point.
    pub fn face(&self, i: usize) -> Result<StiefelSimplex> {
        if i >= self.points.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.points.len(),
            });
        }
        let mut points = self.points.clone();
        points.remove(i);
        Ok(StiefelSimplex { points })
    }

    pub fn transform(&self, g: &Isometry) -> StiefelSimplex {
        StiefelSimplex {
            points: self.points.iter().map(|p| p.transform(g)).collect(),
        }
    }

    fn reps(&self) -> Vec<Vector> {
        self.points.iter().map(|p| p.rep().to_vec()).collect()
    }
}

/// Every subcollection `I` spans a linear subspace of dimension `min(|I|, r)`.
/// Checking the subcollections of size `min(len, r)` is enough.
pub fn in_general_position(space: &FormedSpace, points: &[ProjectivePoint]) -> bool {
    let r = space.rank();
    let n = space.dim();
    let k = points.len().min(r);
    if points.is_empty() {
        return true;
    }
    if k == 0 {
        return false;
    }
    let reps: Vec<Vector> = points.iter().map(|p| p.rep().to_vec()).collect();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<Vector> = subset.iter().map(|&i| reps[i].clone()).collect();
        if Subspace::span(n, &chosen).dim() != k {
            return false;
        }
        // next k-subset of 0..len
        let len = reps.len();
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if subset[i] < len - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn is_simplex(space: &FormedSpace, points: &[ProjectivePoint]) -> SimplexClass {
    let n = space.dim();
    if points.iter().any(|p| p.rep().len() != n) {
        return SimplexClass::No;
    }
    // The complex has simplices of dimension 0, …, r only.
    if points.len() > space.rank() + 1 {
        return SimplexClass::No;
    }
    for p in points {
        for q in points {
            if !space.form(p.rep(), q.rep()).is_zero() {
                return SimplexClass::No;
            }
        }
    }
    if in_general_position(space, points) {
        SimplexClass::InX
    } else {
        SimplexClass::InXBar
    }
}

/// `o_{r,q} = ([e_r], …, [e_{r−q}])` in a standard space.
pub fn base_flag(space: &FormedSpace, q: usize) -> Result<StiefelSimplex> {
    let shape = space.shape().ok_or(Error::NotStandard)?;
    if q >= shape.r {
        return Err(Error::IndexOutOfRange { index: q, len: shape.r });
    }
    let n = space.dim();
    // e_r, …, e_1 occupy coordinates 0, …, r−1.
    let points = (0..=q).map(|i| ProjectivePoint::new(unit_vector(n, i)).expect("unit vector")).collect();
    Ok(StiefelSimplex { points })
}

/// A simplex of `X_l` in a standard space: the base flag, extended by
/// `[e_r + ⋯ + e_1]` when `l = r`.
pub fn standard_simplex(space: &FormedSpace, l: usize) -> Result<StiefelSimplex> {
    let shape = space.shape().ok_or(Error::NotStandard)?;
    if l > shape.r || shape.r == 0 {
        return Err(Error::IndexOutOfRange { index: l, len: shape.r + 1 });
    }
    if l < shape.r {
        return base_flag(space, l);
    }
    let mut s = base_flag(space, shape.r - 1)?;
    let n = space.dim();
    let sum = (0..shape.r).fold(crate::linalg::zero_vector(n), |acc, i| vec_add(&acc, &unit_vector(n, i)));
    s.points.push(ProjectivePoint::new(sum)?);
    Ok(s)
}

/// `g · o` for a random product `g` of four elementary isometries.
pub fn random_simplex<R: Rng + ?Sized>(space: &FormedSpace, l: usize, rng: &mut R) -> Result<StiefelSimplex> {
    let o = standard_simplex(space, l)?;
    let g = space.random_isometry(rng, 4)?;
    Ok(o.transform(&g))
}

/// An isometry `g` with `g·x = y` pointwise, for simplices of `X_l`.
pub fn transitivity_witness(space: &FormedSpace, x: &StiefelSimplex, y: &StiefelSimplex) -> Result<Isometry> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch);
    }
    for s in [x, y] {
        if is_simplex(space, &s.points) != SimplexClass::InX {
            return Err(Error::NotGeneralPosition);
        }
    }
    let xs = x.reps();
    let ys = y.reps();
    let r = space.rank();
    if xs.len() <= r {
        // Both spans are totally isotropic, so any linear map between them
        // preserves the form.
        return space.witt_extend(&xs, &ys);
    }
    // l = r: the last point is a combination of the others with all
    // coefficients nonzero; rescale the images so it lands on y_r.
    let c = coefficients(&xs[..r], &xs[r])?;
    let d = coefficients(&ys[..r], &ys[r])?;
    let images: Vec<Vector> = (0..r).map(|i| vec_scale(&d[i].checked_div(&c[i]).expect("general position"), &ys[i])).collect();
    space.witt_extend(&xs[..r], &images)
}

fn coefficients(basis: &[Vector], v: &[crate::Scalar]) -> Result<Vector> {
    let m = Matrix::from_columns(v.len(), basis);
    m.solve(v).ok_or(Error::NotGeneralPosition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Base, FieldSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sp(r: usize) -> FormedSpace {
        FormedSpace::standard(FieldSpec::alternating(Base::Rationals), r, 0).unwrap()
    }

    fn pt(n: usize, i: usize) -> ProjectivePoint {
        ProjectivePoint::new(unit_vector(n, i)).unwrap()
    }

    #[test]
    fn classification_examples() {
        let v = sp(2);
        // e_2, e_1, f_1, f_2 at coordinates 0, 1, 2, 3.
        let (e1, f1) = (pt(4, 1), pt(4, 2));
        assert_eq!(is_simplex(&v, core::slice::from_ref(&e1)), SimplexClass::InX);
        assert_eq!(is_simplex(&v, &[e1.clone(), e1.clone()]), SimplexClass::InXBar);
        assert_eq!(is_simplex(&v, &[e1, f1]), SimplexClass::No);
    }

    #[test]
    fn overlong_tuples_are_not_simplices() {
        let v = sp(1);
        assert_eq!(is_simplex(&v, &[pt(2, 0), pt(2, 0)]), SimplexClass::InX);
        assert_eq!(is_simplex(&v, &[pt(2, 0), pt(2, 0), pt(2, 0)]), SimplexClass::No);
    }

    #[test]
    fn faces() {
        let v = sp(2);
        let s = StiefelSimplex::new(alloc::vec![pt(4, 1), pt(4, 0)]);
        assert_eq!(s.face(0).unwrap().points(), &[pt(4, 0)]);
        assert!(matches!(s.face(2), Err(Error::IndexOutOfRange { .. })));
        let _ = v;
    }

    #[test]
    fn face_identity_on_four_simplices() {
        let v = sp(5);
        let s = base_flag(&v, 4).unwrap();
        for j in 0..5 {
            for i in 0..j {
                let lhs = s.face(j).unwrap().face(i).unwrap();
                let rhs = s.face(i).unwrap().face(j - 1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn base_flags() {
        let v = sp(2);
        assert_eq!(base_flag(&v, 0).unwrap().points(), &[pt(4, 0)]);
        assert_eq!(base_flag(&v, 1).unwrap().points(), &[pt(4, 0), pt(4, 1)]);
        assert!(base_flag(&v, 2).is_err());
        let v = sp(4);
        for q in 0..3 {
            assert_eq!(base_flag(&v, q + 1).unwrap().face(q + 1).unwrap(), base_flag(&v, q).unwrap());
        }
    }

    #[test]
    fn witness_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v = sp(2);
        let o = base_flag(&v, 1).unwrap();
        let g = transitivity_witness(&v, &o, &o).unwrap();
        assert_eq!(o.transform(&g), o);
        let y = random_simplex(&v, 1, &mut rng).unwrap();
        let g = transitivity_witness(&v, &o, &y).unwrap();
        assert!(v.is_isometry(g.matrix()));
        assert_eq!(o.transform(&g), y);
        let top = standard_simplex(&v, 2).unwrap();
        let y = random_simplex(&v, 2, &mut rng).unwrap();
        let g = transitivity_witness(&v, &top, &y).unwrap();
        assert_eq!(top.transform(&g), y);
        assert_eq!(transitivity_witness(&v, &o, &top), Err(Error::LengthMismatch));
    }
}
