//! Dense exact matrices, vectors and canonical subspaces.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{FieldSpec, Scalar};

/// Coordinates with respect to the standard basis.
pub type Vector = Vec<Scalar>;

pub fn zero_vector(n: usize) -> Vector {
    vec![Scalar::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = Scalar::one();
    v
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Scalar, a: &[Scalar]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

/// `a + c·b`
pub fn vec_axpy(a: &[Scalar], c: &Scalar, b: &[Scalar]) -> Vector {
    if c.is_zero() {
        return a.to_vec();
    }
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn vec_sigma(spec: FieldSpec, a: &[Scalar]) -> Vector {
    a.iter().map(|x| spec.apply(x)).collect()
}

/// The positive rational `λ` making `λ·a` integral with coprime entries
/// (real and imaginary parts together). `1` for the zero vector.
pub fn primitive_scale(a: &[Scalar]) -> BigRational {
    let parts = a.iter().flat_map(|x| [x.re(), x.im()]).filter(|p| !p.is_zero());
    let (mut num_gcd, mut den_lcm) = (BigInt::zero(), BigInt::one());
    for p in parts {
        num_gcd = num_gcd.gcd(p.numer());
        den_lcm = den_lcm.lcm(p.denom());
    }
    if num_gcd.is_zero() {
        return BigRational::one();
    }
    BigRational::new(den_lcm, num_gcd)
}

pub fn primitive(a: &[Scalar]) -> Vector {
    let l = Scalar::from(primitive_scale(a));
    vec_scale(&l, a)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// The matrix whose columns are `cols`, each of length `n`.
    pub fn from_columns(n: usize, cols: &[Vector]) -> Self {
        Matrix::from_fn(n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let t = a * b;
                        out[(i, j)] += &t;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        let mut out = zero_vector(self.rows);
        for (i, o) in out.iter_mut().enumerate() {
            for (j, x) in v.iter().enumerate() {
                let a = &self[(i, j)];
                if !a.is_zero() && !x.is_zero() {
                    *o += &(a * x);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn sigma(&self, spec: FieldSpec) -> Matrix {
        self.map(|x| spec.apply(x))
    }

    /// `σ(M)ᵀ`
    pub fn sigma_transpose(&self, spec: FieldSpec) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| spec.apply(&self[(j, i)]))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        self.map(|x| c * x)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: vec_add(&self.data, &other.data),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: vec_sub(&self.data, &other.data),
        }
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, m: &Matrix) {
        for i in 0..m.rows {
            for j in 0..m.cols {
                self[(r0 + i, c0 + j)] = m[(i, j)].clone();
            }
        }
    }

    pub fn direct_sum(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self[(i, j)].is_one() } else { self[(i, j)].is_zero() }))
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("nonzero pivot");
            for j in col..m.cols {
                m[(row, j)] = &m[(row, j)] * &inv;
            }
            for i in 0..m.rows {
                if i == row || m[(i, col)].is_zero() {
                    continue;
                }
                let f = m[(i, col)].clone();
                for j in col..m.cols {
                    if !m[(row, j)].is_zero() {
                        let t = &f * &m[(row, j)];
                        m[(i, j)] -= &t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{x : M x = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = zero_vector(self.cols);
            v[free] = Scalar::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(k, free)];
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `M x = b`.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vector> {
        assert_eq!(self.rows, b.len());
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |i, j| if j < self.cols { self[(i, j)].clone() } else { b[i].clone() });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = zero_vector(self.cols);
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r[(k, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotInvertible);
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots.get(n.wrapping_sub(1)).is_some_and(|&p| p >= n) {
            return Err(Error::NotInvertible);
        }
        Ok(r.block(0, n, n, n))
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                return Scalar::zero();
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let piv = m[(col, col)].clone();
            det = &det * &piv;
            let inv = piv.inv().expect("nonzero pivot");
            for i in col + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = &m[(i, col)] * &inv;
                for j in col..m.cols {
                    let t = &f * &m[(col, j)];
                    m[(i, j)] -= &t;
                }
            }
        }
        det
    }
}

/// A subspace of `k^n`, stored as the nonzero rows of a reduced echelon basis.
///
/// The basis is canonical, so derived equality is equality of subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(n: usize, vectors: &[Vector]) -> Self {
        if vectors.is_empty() {
            return Subspace::zero(n);
        }
        let m = Matrix::from_rows(vectors.to_vec());
        assert_eq!(m.cols(), n, "vector length differs from ambient dimension");
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace { n, basis, pivots }
    }

    pub fn zero(n: usize) -> Self {
        Subspace {
            n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: (0..n).map(|i| unit_vector(n, i)).collect(),
            pivots: (0..n).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Residue of `v` after clearing the pivot coordinates.
    pub fn reduce(&self, v: &[Scalar]) -> Vector {
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !r[p].is_zero() {
                let c = r[p].clone();
                r = vec_axpy(&r, &-c, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vector(&self.reduce(v))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.n, &all)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let a = self.dim();
        let b = other.dim();
        if a == 0 || b == 0 {
            return Subspace::zero(self.n);
        }
        // Columns: basis of self, then minus basis of other.
        let m = Matrix::from_fn(self.n, a + b, |i, j| if j < a { self.basis[j][i].clone() } else { -&other.basis[j - a][i] });
        let vectors: Vec<Vector> = m
            .kernel()
            .iter()
            .map(|c| {
                let mut v = zero_vector(self.n);
                for (j, cj) in c.iter().take(a).enumerate() {
                    v = vec_axpy(&v, cj, &self.basis[j]);
                }
                v
            })
            .collect();
        Subspace::span(self.n, &vectors)
    }

    /// Standard basis vectors completing `self` to the whole space.
    pub fn complement_indices(&self) -> Vec<usize> {
        (0..self.n).filter(|j| !self.pivots.contains(j)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_rank() {
        let m = Matrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(Matrix::from_int_rows(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Matrix::from_int_rows(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::NotInvertible));
        assert_eq!(Matrix::from_int_rows(&[&[0, 1], &[1, 0]]).det(), Scalar::from_int(-1));
    }

    #[test]
    fn kernel_and_solve() {
        let m = Matrix::from_int_rows(&[&[1, 1, 0], &[0, 0, 1]]);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(is_zero_vector(&m.mul_vec(&k[0])));
        let b = [Scalar::from_int(3), Scalar::from_int(2)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b.to_vec());
        let singular = Matrix::from_int_rows(&[&[1, 1], &[1, 1]]);
        assert!(singular.solve(&[Scalar::one(), Scalar::zero()]).is_none());
    }

    #[test]
    fn subspace_canonical_form() {
        let a = Subspace::span(3, &[vec![1.into(), 1.into(), 0.into()], vec![0.into(), 1.into(), 0.into()]]);
        let b = Subspace::span(3, &[unit_vector(3, 0), unit_vector(3, 1)]);
        assert_eq!(a, b);
        let c = Subspace::span(3, &[unit_vector(3, 1), unit_vector(3, 2)]);
        assert_eq!(a.intersection(&c), Subspace::span(3, &[unit_vector(3, 1)]));
        assert_eq!(a.sum(&c), Subspace::full(3));
        assert_eq!(a.complement_indices(), vec![2]);
    }
}
