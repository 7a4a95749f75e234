//! Formed spaces `(V, ω)` with `ω(v, w) = σ(v)ᵀ J w`.
//!
//! Besides the basic geometry (perpendiculars, radicals, adapted bases) this
//! module carries the constructive side of Witt's theorem: `witt_extend`
//! builds an explicit global isometry out of reflections (symmetric and
//! Hermitian forms) or transvections (alternating forms).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{is_zero_vector, primitive, primitive_scale, vec_axpy, vec_scale, vec_sigma, zero_vector, Matrix, Subspace, Vector};
use crate::scalar::{Base, Epsilon, FieldSpec, Involution, Scalar};

/// `(r, d)` of a standard space `V^{r,d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StandardShape {
    pub r: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormedSpace {
    spec: FieldSpec,
    gram: Matrix,
    shape: Option<StandardShape>,
}

/// Alternating forms live in even dimension, and a complex symmetric form has
/// no anisotropic subspace beyond dimension one.
pub fn admissible(spec: FieldSpec, d: usize) -> bool {
    match (spec.base(), spec.sigma(), spec.epsilon()) {
        (_, _, Epsilon::Minus) => d == 0,
        (Base::GaussianRationals, Involution::Identity, Epsilon::Plus) => d <= 1,
        _ => true,
    }
}

/// The `k × k` antidiagonal matrix of ones.
pub fn antidiagonal(k: usize) -> Matrix {
    Matrix::from_fn(k, k, |i, j| if i + j + 1 == k { Scalar::one() } else { Scalar::zero() })
}

/// `J_ε^{r,d}` in the basis `(e_r, …, e_1, h_1, …, h_d, f_1, …, f_r)`, with
/// `ω(h_j, h_j) = 1 + ε`.
pub fn standard_gram(spec: FieldSpec, r: usize, d: usize) -> Matrix {
    let n = 2 * r + d;
    let eps = spec.epsilon_scalar();
    let two = Scalar::from_int(1 + spec.epsilon().sign());
    Matrix::from_fn(n, n, |i, j| {
        if i < r && j >= r + d && i + (j - r - d) + 1 == r {
            Scalar::one()
        } else if i >= r + d && j < r && (i - r - d) + j + 1 == r {
            eps.clone()
        } else if i >= r && i < r + d && i == j {
            two.clone()
        } else {
            Scalar::zero()
        }
    })
}

impl FormedSpace {
    pub fn new(spec: FieldSpec, gram: Matrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        let n = gram.rows();
        for i in 0..n {
            for j in 0..n {
                if !spec.contains(&gram[(i, j)]) {
                    return Err(Error::HypothesisViolated("Gram entry outside the base field"));
                }
            }
        }
        let eps = spec.epsilon_scalar();
        if gram.sigma_transpose(spec).scale(&eps) != gram {
            return Err(Error::HypothesisViolated("Gram matrix is not reflexive"));
        }
        Ok(FormedSpace { spec, gram, shape: None })
    }

    pub fn standard(spec: FieldSpec, r: usize, d: usize) -> Result<Self> {
        if !admissible(spec, d) {
            return Err(Error::InadmissibleParameters);
        }
        Ok(FormedSpace {
            spec,
            gram: standard_gram(spec, r, d),
            shape: Some(StandardShape { r, d }),
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn shape(&self) -> Option<StandardShape> {
        self.shape
    }

    pub fn omega(&self, v: &[Scalar], w: &[Scalar]) -> Result<Scalar> {
        let n = self.dim();
        for len in [v.len(), w.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        Ok(self.form(v, w))
    }

    /// `ω(v, w)` without the length check.
    pub fn form(&self, v: &[Scalar], w: &[Scalar]) -> Scalar {
        let jw = self.gram.mul_vec(w);
        let mut acc = Scalar::zero();
        for (a, b) in v.iter().zip(&jw) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(self.spec.apply(a) * b);
            }
        }
        acc
    }

    pub fn q(&self, v: &[Scalar]) -> Scalar {
        self.form(v, v)
    }

    /// The row vector `σ(v)ᵀ J`, so that `ω(v, x) = row · x`.
    fn covector(&self, v: &[Scalar]) -> Vector {
        let n = self.dim();
        let sv = vec_sigma(self.spec, v);
        let mut row = zero_vector(n);
        for (i, si) in sv.iter().enumerate() {
            if si.is_zero() {
                continue;
            }
            for (j, rj) in row.iter_mut().enumerate() {
                let g = &self.gram[(i, j)];
                if !g.is_zero() {
                    *rj += &(si * g);
                }
            }
        }
        row
    }

    /// `σ(P)ᵀ J P` for the matrix `P` whose columns are `vectors`.
    pub fn gram_of(&self, vectors: &[Vector]) -> Matrix {
        Matrix::from_fn(vectors.len(), vectors.len(), |i, j| self.form(&vectors[i], &vectors[j]))
    }

    pub fn is_isometry(&self, m: &Matrix) -> bool {
        m.rows() == self.dim() && m.is_square() && m.sigma_transpose(self.spec).mul(&self.gram).mul(m) == self.gram
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().dim() == 0
    }

    /// `{v : ω(v, a) = 0 for every a}`.
    pub fn perp_of(&self, vectors: &[Vector]) -> Subspace {
        let n = self.dim();
        if vectors.is_empty() {
            return Subspace::full(n);
        }
        // ω(v, a) = 0  ⇔  vᵀ σ(J a) = 0.
        let rows: Vec<Vector> = vectors.iter().map(|a| vec_sigma(self.spec, &self.gram.mul_vec(a))).collect();
        Subspace::span(n, &Matrix::from_rows(rows).kernel())
    }

    pub fn perp(&self, a: &Subspace) -> Subspace {
        self.perp_of(a.basis())
    }

    pub fn radical(&self) -> Subspace {
        self.perp(&Subspace::full(self.dim()))
    }

    /// Grows a totally isotropic `T` one vector at a time inside `T^⊥`, then
    /// attaches hyperbolic partners. Searching in `T^⊥` rather than in the
    /// complement of the pairs found so far keeps coordinates small.
    pub fn adapted_basis(&self) -> AdaptedBasis {
        let n = self.dim();
        let radical = self.radical();
        let mut iso: Vec<Vector> = Vec::new();
        let anisotropic = loop {
            let mut spanned: Vec<Vector> = radical.basis().to_vec();
            spanned.extend(iso.iter().cloned());
            let mut taken = Subspace::span(n, &spanned);
            let mut work = Vec::new();
            for b in self.perp_of(&iso).basis() {
                if !taken.contains(b) {
                    taken = taken.sum(&Subspace::span(n, core::slice::from_ref(b)));
                    work.push(b.clone());
                }
            }
            if work.is_empty() {
                break Vec::new();
            }
            match self.find_isotropic(&work) {
                Ok(u) => iso.push(u),
                Err(orthogonal) => break orthogonal,
            }
        };
        let partners = self
            .partners(&anisotropic, &iso)
            .expect("isotropic vectors of a non-degenerate part have partners");
        AdaptedBasis {
            hyperbolic_pairs: iso.into_iter().zip(partners).collect(),
            anisotropic,
            radical: radical.basis().to_vec(),
        }
    }

    pub fn rank(&self) -> usize {
        match self.shape {
            Some(s) => s.r,
            None => self.adapted_basis().hyperbolic_pairs.len(),
        }
    }

    /// Given isotropic `e` and `f` with `ω(e, f) = 1`, returns the isotropic `f + λe`.
    fn isotropize(&self, e: &[Scalar], f: &[Scalar]) -> Vector {
        match self.spec.epsilon() {
            Epsilon::Minus => f.to_vec(),
            Epsilon::Plus => {
                let lambda = -(self.q(f) * Scalar::ratio(1, 2));
                vec_axpy(f, &lambda, e)
            }
        }
    }

    /// Component of `w` perpendicular to the hyperbolic pair `(e, f)`.
    fn project_off_pair(&self, e: &[Scalar], f: &[Scalar], w: &[Scalar]) -> Vector {
        let b = self.form(e, w);
        let a = self.spec.epsilon_scalar() * self.form(f, w);
        let w1 = vec_axpy(w, &-a, e);
        vec_axpy(&w1, &-b, f)
    }

    /// Finds an isotropic vector in the non-degenerate span of `work`, or
    /// returns an orthogonal basis of that span if the bounded search fails.
    fn find_isotropic(&self, work: &[Vector]) -> core::result::Result<Vector, Vec<Vector>> {
        if let Some(w) = work.iter().find(|w| self.q(w).is_zero()) {
            return Ok(w.clone());
        }
        let reduced = self.reduce_basis(work);
        let work = &reduced[..];
        if let Some(w) = work.iter().find(|w| self.q(w).is_zero()) {
            return Ok(w.clone());
        }
        let mut rest: Vec<Vector> = work.to_vec();
        let mut diag: Vec<Vector> = Vec::new();
        while !rest.is_empty() {
            let idx = match rest.iter().position(|w| !self.q(w).is_zero()) {
                Some(i) => i,
                None => return Ok(rest.swap_remove(0)),
            };
            let p = rest.swap_remove(idx);
            let qp = self.q(&p);
            let mut next = Vec::with_capacity(rest.len());
            for w in rest {
                let c = self.form(&p, &w).checked_div(&qp).expect("anisotropic pivot");
                let w1 = vec_axpy(&w, &-c, &p);
                if is_zero_vector(&w1) {
                    continue;
                }
                if self.q(&w1).is_zero() {
                    return Ok(w1);
                }
                next.push(w1);
            }
            rest = next;
            diag.push(p);
        }
        match self.search_lines(work).or_else(|| self.search_diagonal(&diag)) {
            Some(v) => Ok(v),
            None => Err(diag),
        }
    }

    /// Greedy basis reduction: applies shears `b_i ← b_i + c·b_j` with `c` a
    /// unit as long as they shrink the total size of the Gram matrix. Gains
    /// are scored on a floating-point shadow of the Gram; the basis itself
    /// stays exact.
    fn reduce_basis(&self, work: &[Vector]) -> Vec<Vector> {
        let m = work.len();
        let mut b = work.to_vec();
        if m < 2 || self.spec.epsilon() == Epsilon::Minus {
            return b;
        }
        let units: &[(f64, f64)] = match self.spec.base() {
            Base::Rationals => &[(1.0, 0.0), (-1.0, 0.0)],
            Base::GaussianRationals => &[(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)],
        };
        let conj = self.spec.sigma() == Involution::Conjugation;
        let sig = |c: (f64, f64)| if conj { (c.0, -c.1) } else { c };
        let g = self.gram_of(&b);
        let mut gf: Vec<Vec<(f64, f64)>> = (0..m).map(|i| (0..m).map(|j| approx(&g[(i, j)])).collect()).collect();
        for _ in 0..4096 {
            let mut best: Option<(usize, usize, (f64, f64), f64)> = None;
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    for &c in units {
                        let sc = sig(c);
                        let mut gain = csize(gf[i][i]) - csize(shear_diag(&gf, i, j, c, sc));
                        for k in (0..m).filter(|&k| k != i) {
                            gain += csize(gf[i][k]) + csize(gf[k][i]);
                            gain -= csize(cadd(gf[i][k], cmul(sc, gf[j][k]))) + csize(cadd(gf[k][i], cmul(gf[k][j], c)));
                        }
                        if gain > 1e-9 * (1.0 + csize(gf[i][i])) && best.is_none_or(|bst| gain > bst.3) {
                            best = Some((i, j, c, gain));
                        }
                    }
                }
            }
            let Some((i, j, c, _)) = best else { break };
            let sc = sig(c);
            let diag = shear_diag(&gf, i, j, c, sc);
            for k in (0..m).filter(|&k| k != i) {
                gf[i][k] = cadd(gf[i][k], cmul(sc, gf[j][k]));
                gf[k][i] = cadd(gf[k][i], cmul(gf[k][j], c));
            }
            gf[i][i] = diag;
            let exact = Scalar::gauss(c.0 as i64, c.1 as i64);
            b[i] = vec_axpy(&b[i], &exact, &b[j]);
        }
        b
    }

    /// Bounded search over lines `x + s·μ·b`, where `b` is a basis vector,
    /// `x` a small integer combination of at most two others and `μ ∈ {1, i}`:
    /// the restriction of `q` to such a line is a quadratic in `s`, solved
    /// exactly whenever its discriminant is a square.
    fn search_lines(&self, work: &[Vector]) -> Option<Vector> {
        let m = work.len();
        if m < 2 || self.spec.epsilon() == Epsilon::Minus {
            return None;
        }
        let mus = match self.spec.sigma() {
            Involution::Identity => vec![Scalar::one()],
            Involution::Conjugation => vec![Scalar::one(), Scalar::i()],
        };
        let root_base = match self.spec.sigma() {
            Involution::Identity => self.spec.base(),
            Involution::Conjugation => Base::Rationals,
        };
        let values: Vec<Scalar> = [1, -1, 2, -2, 3, -3].iter().map(|&c| Scalar::from_int(c)).collect();
        let mut budget: usize = 60_000;
        for size in 1..=(m - 1).min(3) {
            for s in 0..m {
                let b = &work[s];
                let qb = self.q(b);
                let others: Vec<usize> = (0..m).filter(|&k| k != s).collect();
                let mut subset: Vec<usize> = (0..size).collect();
                loop {
                    let mut idx = vec![0usize; size];
                    loop {
                        let mut x = zero_vector(self.dim());
                        for (slot, &v) in idx.iter().enumerate() {
                            x = vec_axpy(&x, &values[v], &work[others[subset[slot]]]);
                        }
                        let c = self.q(&x);
                        let wxb = self.form(&x, b);
                        for mu in &mus {
                            let smu = self.spec.apply(mu);
                            let a = &smu * mu * &qb;
                            let bb = mu * &wxb + &smu * self.spec.apply(&wxb) * self.spec.epsilon_scalar();
                            let root = if a.is_zero() {
                                (!bb.is_zero()).then(|| -(c.checked_div(&bb).expect("nonzero")))
                            } else {
                                let disc = &bb * &bb - Scalar::from_int(4) * &a * &c;
                                disc.sqrt_in(root_base)
                                    .map(|r| (r - &bb).checked_div(&(Scalar::from_int(2) * &a)).expect("nonzero"))
                            };
                            if let Some(t) = root {
                                let v = vec_axpy(&x, &(t * mu), b);
                                if !is_zero_vector(&v) && self.q(&v).is_zero() {
                                    return Some(v);
                                }
                            }
                        }
                        budget -= 1;
                        if budget == 0 {
                            return None;
                        }
                        if !next_tuple(&mut idx, values.len()) {
                            break;
                        }
                    }
                    if !next_combination(&mut subset, others.len()) {
                        break;
                    }
                }
            }
        }
        None
    }

    /// Bounded search for `Σ c_k d_k + t·d_s` isotropic over an orthogonal
    /// basis `d`: the `c_k` run over small integers (Gaussian integers for
    /// Hermitian forms) on supports of size at most three, and `t` solves
    /// `a_s σ(t) t = -Σ a_k σ(c_k) c_k` exactly when a root exists.
    fn search_diagonal(&self, d: &[Vector]) -> Option<Vector> {
        let m = d.len();
        if m < 2 || self.spec.epsilon() == Epsilon::Minus {
            return None;
        }
        let a: Vec<Scalar> = d.iter().map(|v| self.q(v)).collect();
        let coeffs: Vec<Scalar> = match self.spec.sigma() {
            Involution::Identity => (1..=6).map(Scalar::from_int).collect(),
            Involution::Conjugation => (0..=4)
                .flat_map(|x| (0..=x).map(move |y| Scalar::gauss(x, y)))
                .filter(|z| !z.is_zero())
                .collect(),
        };
        let norms: Vec<Scalar> = coeffs.iter().map(|c| self.spec.apply(c) * c).collect();
        let mut budget: usize = 60_000;
        for size in 1..=(m - 1).min(3) {
            for s in 0..m {
                let others: Vec<usize> = (0..m).filter(|&k| k != s).collect();
                let mut subset: Vec<usize> = (0..size).collect();
                loop {
                    let mut values = vec![0usize; size];
                    loop {
                        let mut sum = Scalar::zero();
                        for (slot, &v) in values.iter().enumerate() {
                            sum += &(&a[others[subset[slot]]] * &norms[v]);
                        }
                        let target = (-sum).checked_div(&a[s]).expect("anisotropic diagonal");
                        if let Some(t) = self.solve_norm(&target) {
                            let mut v = vec_scale(&t, &d[s]);
                            for (slot, &val) in values.iter().enumerate() {
                                v = vec_axpy(&v, &coeffs[val], &d[others[subset[slot]]]);
                            }
                            return Some(v);
                        }
                        budget -= 1;
                        if budget == 0 {
                            return None;
                        }
                        if !next_tuple(&mut values, coeffs.len()) {
                            break;
                        }
                    }
                    if !next_combination(&mut subset, others.len()) {
                        break;
                    }
                }
            }
        }
        None
    }

    /// Some `t` with `σ(t)·t = target`.
    fn solve_norm(&self, target: &Scalar) -> Option<Scalar> {
        match self.spec.sigma() {
            Involution::Identity => target.sqrt_in(self.spec.base()),
            Involution::Conjugation => target.norm_preimage(),
        }
    }

    /// The elementary map `x ↦ x + c·ω(v, x)·v`.
    pub fn elementary(&self, v: &[Scalar], c: &Scalar) -> Matrix {
        let n = self.dim();
        let row = self.covector(v);
        let mut m = Matrix::identity(n);
        for i in 0..n {
            if v[i].is_zero() {
                continue;
            }
            let cv = c * &v[i];
            for j in 0..n {
                if !row[j].is_zero() {
                    let t = &cv * &row[j];
                    m[(i, j)] += &t;
                }
            }
        }
        m
    }

    /// The reflection `x ↦ x − 2ω(v, x)/ω(v, v)·v`.
    pub fn reflection(&self, v: &[Scalar]) -> Result<Isometry> {
        if self.spec.epsilon() == Epsilon::Minus {
            return Err(Error::HypothesisViolated("reflections need a symmetric or Hermitian form"));
        }
        let q = self.q(v);
        if q.is_zero() {
            return Err(Error::HypothesisViolated("reflection vector must be anisotropic"));
        }
        let c = Scalar::from_int(-2).checked_div(&q)?;
        Ok(Isometry { mat: self.elementary(v, &c) })
    }

    /// The symplectic transvection `x ↦ x + λ·ω(v, x)·v`.
    pub fn transvection(&self, v: &[Scalar], lambda: &Scalar) -> Result<Isometry> {
        if self.spec.epsilon() == Epsilon::Plus {
            return Err(Error::HypothesisViolated("transvections need an alternating form"));
        }
        Ok(Isometry {
            mat: self.elementary(v, lambda),
        })
    }

    /// The unipotent map `x ↦ x + ω(u,x)·v − ε·ω(v,x)·u − ½ω(v,v)·ω(u,x)·u`
    /// for isotropic `u` and `v ⊥ u`.
    pub fn eichler(&self, u: &[Scalar], v: &[Scalar]) -> Result<Isometry> {
        if !self.q(u).is_zero() || !self.form(u, v).is_zero() {
            return Err(Error::HypothesisViolated("Eichler map needs isotropic u and v ⊥ u"));
        }
        let n = self.dim();
        let ru = self.covector(u);
        let rv = self.covector(v);
        let eps = self.spec.epsilon_scalar();
        let half_q = self.q(v) * Scalar::ratio(1, 2);
        let mut m = Matrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                let t = &v[i] * &ru[j] - &eps * &u[i] * &rv[j] - &half_q * &u[i] * &ru[j];
                if !t.is_zero() {
                    m[(i, j)] += &t;
                }
            }
        }
        Ok(Isometry { mat: m })
    }

    /// Extends the linear map `domain[i] ↦ images[i]` to a global isometry.
    pub fn witt_extend(&self, domain: &[Vector], images: &[Vector]) -> Result<Isometry> {
        let n = self.dim();
        if domain.len() != images.len() {
            return Err(Error::LengthMismatch);
        }
        for v in domain.iter().chain(images) {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if !self.is_nondegenerate() {
            return Err(Error::DegenerateAmbient);
        }
        let k = domain.len();
        if Subspace::span(n, domain).dim() != k {
            return Err(Error::HypothesisViolated("domain vectors are linearly dependent"));
        }
        if self.gram_of(domain) != self.gram_of(images) {
            return Err(Error::NotAnIsometry);
        }
        if Subspace::span(n, images).dim() != k {
            return Err(Error::HypothesisViolated("map is not injective"));
        }
        if let Some(shape) = self.shape {
            if self.gram_of(domain).is_zero() {
                let h_src = self.isotropic_frame(shape, domain)?;
                let h_dst = self.isotropic_frame(shape, images)?;
                return Ok(Isometry {
                    mat: self.isometry_inverse(&h_dst).mul(&h_src),
                });
            }
        }
        let src = self.complete_nondegenerate(domain)?;
        let dst = self.complete_nondegenerate(images)?;
        let factors = match self.spec.epsilon() {
            Epsilon::Plus => self.extend_by_reflections(&src, &dst),
            Epsilon::Minus => self.extend_by_transvections(&src, &dst),
        };
        let g = Isometry { mat: factors.to_matrix(n) };
        Ok(g)
    }

    /// `J⁻¹ σ(M)ᵀ J` for an isometry `M`.
    pub fn isometry_inverse(&self, m: &Matrix) -> Matrix {
        let j_inv = self.gram.inverse().expect("non-degenerate");
        j_inv.mul(&m.sigma_transpose(self.spec)).mul(&self.gram)
    }

    /// For an independent totally isotropic tuple `z` in a standard space, an
    /// isometry `h` with `h·z_m` the `m`-th basis vector (`e_r, e_{r−1}, …`).
    /// Built from Eichler maps and maps of a single hyperbolic plane, one
    /// elimination step per vector, which keeps the entries small.
    fn isotropic_frame(&self, shape: StandardShape, z: &[Vector]) -> Result<Matrix> {
        let n = self.dim();
        let e_at = |p: usize| p;
        let f_at = |p: usize| n - 1 - p;
        let eps = self.spec.epsilon_scalar();
        let mut h = Matrix::identity(n);
        let mut work: Vec<Vector> = z.to_vec();
        let apply = |op: &dyn Fn(&Vector) -> Vector, h: &mut Matrix, work: &mut [Vector]| {
            let cols: Vec<Vector> = (0..n).map(|j| op(&h.col(j))).collect();
            *h = Matrix::from_columns(n, &cols);
            for w in work.iter_mut() {
                *w = op(w);
            }
        };
        // `(x_e, x_f) ↦ (a·x_e + b·x_f, c·x_e + d·x_f)` on the plane of pair `p`.
        let plane = |p: usize, m: [Scalar; 4]| {
            move |x: &Vector| {
                let mut y = x.clone();
                let (xe, xf) = (&x[e_at(p)], &x[f_at(p)]);
                y[e_at(p)] = &m[0] * xe + &m[1] * xf;
                y[f_at(p)] = &m[2] * xe + &m[3] * xf;
                y
            }
        };
        // e ↦ f, f ↦ ε·e.
        let swap = |p: usize| plane(p, [Scalar::zero(), eps.clone(), Scalar::one(), Scalar::zero()]);
        for m in 0..z.len() {
            let x = &work[m];
            let j = (m..shape.r)
                .find(|&p| !x[f_at(p)].is_zero() || !x[e_at(p)].is_zero())
                .ok_or(Error::HypothesisViolated("vectors are not independent and totally isotropic"))?;
            if work[m][f_at(j)].is_zero() {
                apply(&swap(j), &mut h, &mut work[m..]);
            }
            let x = work[m].clone();
            let beta = x[f_at(j)].clone();
            let mut w = x.clone();
            w[e_at(j)] = Scalar::zero();
            w[f_at(j)] = Scalar::zero();
            if !is_zero_vector(&w) {
                let v = vec_scale(&-beta.inv()?, &w);
                let u = crate::linalg::unit_vector(n, e_at(j));
                let (ru, rv) = (self.covector(&u), self.covector(&v));
                let half_q = self.q(&v) * Scalar::ratio(1, 2);
                let op = |x: &Vector| {
                    let a = dot(&ru, x);
                    let b = dot(&rv, x);
                    let x = vec_axpy(x, &a, &v);
                    vec_axpy(&x, &(-(&eps * &b) - &half_q * &a), &u)
                };
                apply(&op, &mut h, &mut work[m..]);
            }
            let alpha = work[m][e_at(j)].clone();
            if !alpha.is_zero() {
                // f ↦ f + t·e is an isometry exactly when σ(t) = −εt, which
                // isotropy of α·e + β·f guarantees for t = −α/β.
                let t = -alpha.checked_div(&beta)?;
                apply(&plane(j, [Scalar::one(), t, Scalar::zero(), Scalar::one()]), &mut h, &mut work[m..]);
            }
            apply(&swap(j), &mut h, &mut work[m..]);
            let lambda = work[m][e_at(j)].inv()?;
            let sigma_inv = self.spec.apply(&lambda).inv()?;
            apply(&plane(j, [lambda, Scalar::zero(), Scalar::zero(), sigma_inv]), &mut h, &mut work[m..]);
            if j != m {
                let op = |x: &Vector| {
                    let mut y = x.clone();
                    y.swap(e_at(j), e_at(m));
                    y.swap(f_at(j), f_at(m));
                    y
                };
                apply(&op, &mut h, &mut work[m..]);
            }
            debug_assert_eq!(work[m], crate::linalg::unit_vector(n, e_at(m)));
        }
        Ok(h)
    }

    /// Splits off the radical `Z` of `W = span(vs)` and adds hyperbolic
    /// partners `Y` for it. The coordinates used depend only on the Gram
    /// matrix of `vs`, so isometric inputs give isometric completions.
    fn complete_nondegenerate(&self, vs: &[Vector]) -> Result<Completion> {
        let k = vs.len();
        let n = self.dim();
        let rad_coords = self.gram_of(vs).kernel();
        let z: Vec<Vector> = rad_coords
            .iter()
            .map(|c| vs.iter().zip(c).fold(zero_vector(n), |acc, (v, cj)| vec_axpy(&acc, cj, v)))
            .collect();
        let w0: Vec<Vector> = Subspace::span(k, &rad_coords).complement_indices().iter().map(|&j| vs[j].clone()).collect();
        let y = self.partners(&w0, &z)?;
        Ok(Completion { w0, z, y })
    }

    /// Isotropic `y_i ⊥ w0` with `ω(z_i, y_j) = δ_ij` and `ω(y_i, y_j) = 0`.
    fn partners(&self, w0: &[Vector], z: &[Vector]) -> Result<Vec<Vector>> {
        let mut ys: Vec<Vector> = Vec::new();
        for i in 0..z.len() {
            let mut constraints: Vec<Vector> = w0.to_vec();
            constraints.extend(z.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()));
            constraints.extend(ys.iter().cloned());
            let space = self.perp_of(&constraints);
            let (y, c) = space
                .basis()
                .iter()
                .find_map(|b| {
                    let c = self.form(&z[i], b);
                    (!c.is_zero()).then_some((b.clone(), c))
                })
                .ok_or(Error::HypothesisViolated("no hyperbolic partner"))?;
            let y = vec_scale(&c.inv()?, &y);
            ys.push(self.isotropize(&z[i], &y));
        }
        Ok(ys)
    }

    fn factor(&self, v: Vector, c: Scalar) -> Elementary {
        let row = self.covector(&v);
        Elementary { v, row, c }
    }

    fn extend_by_reflections(&self, src: &Completion, dst: &Completion) -> Factors {
        // Orthogonal bases with identical Gram matrices: Gram–Schmidt on w0
        // with the same coefficients on both sides, then z ± y per pair.
        let (mut xs, mut bs) = self.orthogonalize_pairwise(src.w0.clone(), dst.w0.clone());
        for (side, out) in [(src, &mut xs), (dst, &mut bs)] {
            for (z, y) in side.z.iter().zip(&side.y) {
                out.push(crate::linalg::vec_add(z, y));
                out.push(crate::linalg::vec_sub(z, y));
            }
        }
        let mut g = Factors::default();
        for (x, b) in xs.iter().zip(&bs) {
            let l = Scalar::from(primitive_scale(b));
            let (x, b) = (vec_scale(&l, x), vec_scale(&l, b));
            let a = g.apply(&x);
            if a != b {
                for f in self.reflection_moving(&a, &b) {
                    g.push(f);
                }
            }
        }
        g
    }

    fn orthogonalize_pairwise(&self, mut src: Vec<Vector>, mut dst: Vec<Vector>) -> (Vec<Vector>, Vec<Vector>) {
        let mut out_src = Vec::new();
        let mut out_dst = Vec::new();
        while !src.is_empty() {
            let idx = match src.iter().position(|v| !self.q(v).is_zero()) {
                Some(i) => i,
                None => {
                    let (i, j, c) = (0..src.len())
                        .flat_map(|i| (0..src.len()).map(move |j| (i, j)))
                        .find_map(|(i, j)| {
                            let c = self.form(&src[i], &src[j]);
                            (i != j && !c.is_zero()).then_some((i, j, c))
                        })
                        .expect("non-degenerate span");
                    let t = self.spec.apply(&c);
                    src[i] = vec_axpy(&src[i], &t, &src[j]);
                    dst[i] = vec_axpy(&dst[i], &t, &dst[j]);
                    i
                }
            };
            let p = src.swap_remove(idx);
            let pd = dst.swap_remove(idx);
            let qp = self.q(&p);
            for (s, d) in src.iter_mut().zip(dst.iter_mut()) {
                let c = self.form(&p, s).checked_div(&qp).expect("anisotropic pivot");
                *s = vec_axpy(s, &-c.clone(), &p);
                *d = vec_axpy(d, &-c, &pd);
            }
            out_src.push(p);
            out_dst.push(pd);
        }
        (out_src, out_dst)
    }

    /// Sends `a` to `b` (equal anisotropic lengths), fixing every vector
    /// perpendicular to both.
    fn reflection_moving(&self, a: &[Scalar], b: &[Scalar]) -> Vec<Elementary> {
        let q = self.q(a);
        let generalized = |v: Vector, c: &Scalar| {
            // x ↦ x + (ζ−1)ω(v,x)/ω(v,v)·v with ζ = −(Q − σ(c))/(Q − c).
            let zeta = -(&q - self.spec.apply(c)).checked_div(&(&q - c)).expect("Q ≠ c");
            let coef = (zeta - Scalar::one()).checked_div(&self.q(&v)).expect("anisotropic");
            self.factor(v, coef)
        };
        let diff = primitive(&crate::linalg::vec_sub(a, b));
        let c = self.form(b, a);
        if !self.q(&diff).is_zero() {
            return vec![generalized(diff, &c)];
        }
        let first = generalized(primitive(&crate::linalg::vec_add(a, b)), &-c);
        let b = primitive(b);
        let flip = self.factor(b.clone(), Scalar::from_int(-2).checked_div(&self.q(&b)).expect("anisotropic"));
        vec![first, flip]
    }

    fn extend_by_transvections(&self, src: &Completion, dst: &Completion) -> Factors {
        let (mut xs, mut bs) = self.symplectic_pairwise(src.w0.clone(), dst.w0.clone());
        for (side, out) in [(src, &mut xs), (dst, &mut bs)] {
            for (z, y) in side.z.iter().zip(&side.y) {
                out.push(z.clone());
                out.push(y.clone());
            }
        }
        let mut g = Factors::default();
        let mut fixed: Vec<Vector> = Vec::new();
        for (x, b) in xs.iter().zip(&bs) {
            let a = g.apply(x);
            if &a != b {
                for f in self.transvection_moving(&a, b, &fixed) {
                    g.push(f);
                }
            }
            fixed.push(b.clone());
        }
        g
    }

    fn symplectic_pairwise(&self, mut src: Vec<Vector>, mut dst: Vec<Vector>) -> (Vec<Vector>, Vec<Vector>) {
        let mut out_src = Vec::new();
        let mut out_dst = Vec::new();
        while !src.is_empty() {
            let e = src.swap_remove(0);
            let ed = dst.swap_remove(0);
            let j = src.iter().position(|w| !self.form(&e, w).is_zero()).expect("non-degenerate span");
            let c = self.form(&e, &src[j]).inv().expect("nonzero");
            let f = vec_scale(&c, &src.swap_remove(j));
            let fd = vec_scale(&c, &dst.swap_remove(j));
            for (s, d) in src.iter_mut().zip(dst.iter_mut()) {
                *s = self.project_off_pair(&e, &f, s);
                *d = self.project_off_pair(&ed, &fd, d);
            }
            out_src.extend([e, f]);
            out_dst.extend([ed, fd]);
        }
        (out_src, out_dst)
    }

    /// At most two transvections sending `a` to `b` and fixing `fixed`
    /// pointwise; needs `ω(a, y) = ω(b, y)` for `y` in `fixed`.
    fn transvection_moving(&self, a: &[Scalar], b: &[Scalar], fixed: &[Vector]) -> Vec<Elementary> {
        let single = |a: &[Scalar], b: &[Scalar]| {
            let lambda = self.form(b, a).inv().expect("ω(b, a) ≠ 0");
            self.factor(crate::linalg::vec_sub(b, a), lambda)
        };
        if !self.form(b, a).is_zero() {
            return vec![single(a, b)];
        }
        let free = self.perp_of(fixed);
        let pick = |pred: &dyn Fn(&Vector) -> bool| free.basis().iter().find(|t| pred(t)).cloned();
        let t1 = pick(&|t| !self.form(a, t).is_zero()).expect("a lies outside the fixed span");
        let t = if !self.form(&t1, b).is_zero() {
            t1
        } else {
            let t2 = pick(&|t| !self.form(t, b).is_zero()).expect("b lies outside the fixed span");
            if !self.form(a, &t2).is_zero() {
                t2
            } else {
                crate::linalg::vec_add(&t1, &t2)
            }
        };
        let c = crate::linalg::vec_add(a, &t);
        vec![single(a, &c), single(&c, b)]
    }

    pub fn random_vector<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Vector {
        (0..self.dim()).map(|_| random_scalar(self.spec.base(), rng, bound)).collect()
    }

    pub fn random_isotropic_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ProjectivePoint> {
        const BOX: i64 = 5;
        if self.dim() == 0 {
            return Err(Error::NoIsotropicVectors);
        }
        if self.spec.epsilon() == Epsilon::Minus {
            loop {
                let v = self.random_vector(rng, BOX);
                if !is_zero_vector(&v) {
                    return ProjectivePoint::new(v);
                }
            }
        }
        let basis = self.adapted_basis();
        let Some((e, f)) = basis.hyperbolic_pairs.first().cloned() else {
            return Err(Error::NoIsotropicVectors);
        };
        let mut others: Vec<Vector> = basis.hyperbolic_pairs[1..].iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
        others.extend(basis.anisotropic.iter().cloned());
        others.extend(basis.radical.iter().cloned());
        let y = loop {
            let y = random_scalar(self.spec.base(), rng, BOX);
            if !y.is_zero() {
                break y;
            }
        };
        let mut rest = vec_scale(&y, &f);
        for b in &others {
            rest = vec_axpy(&rest, &random_scalar(self.spec.base(), rng, BOX), b);
        }
        // ω(xe + rest, xe + rest) = q(rest) + σ(x)y + xσ(y) = 0.
        let x = -(self.q(&rest).checked_div(&(Scalar::from_int(2) * self.spec.apply(&y)))?);
        let v = vec_axpy(&rest, &x, &e);
        debug_assert!(self.q(&v).is_zero());
        ProjectivePoint::new(v)
    }

    /// A product of `length` random reflections (symmetric, Hermitian) or
    /// transvections (alternating).
    pub fn random_isometry<R: Rng + ?Sized>(&self, rng: &mut R, length: usize) -> Result<Isometry> {
        if !self.is_nondegenerate() {
            return Err(Error::DegenerateAmbient);
        }
        let n = self.dim();
        let mut g = Matrix::identity(n);
        if n == 0 {
            return Ok(Isometry { mat: g });
        }
        for _ in 0..length {
            let step = match self.spec.epsilon() {
                Epsilon::Minus => {
                    let v = self.random_vector(rng, 3);
                    let lambda = loop {
                        let l = rng.gen_range(-3i64..=3);
                        if l != 0 {
                            break Scalar::from_int(l);
                        }
                    };
                    self.elementary(&v, &lambda)
                }
                Epsilon::Plus => {
                    let v = loop {
                        let v = self.random_vector(rng, 3);
                        if !self.q(&v).is_zero() {
                            break v;
                        }
                    };
                    self.reflection(&v)?.mat
                }
            };
            g = step.mul(&g);
        }
        Ok(Isometry { mat: g })
    }

    /// Whether `samples` random isotropic points span the whole space.
    pub fn isotropic_span_check<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Result<bool> {
        let mut vs = Vec::with_capacity(samples);
        for _ in 0..samples {
            vs.push(self.random_isotropic_point(rng)?.rep().to_vec());
        }
        Ok(Subspace::span(self.dim(), &vs).dim() == self.dim())
    }

    /// For isotropic points with `ω(p_i, p_j) = 0` and `ω(p_i, q_j) = 0 ⇔ i ≠ j`,
    /// whether their span `L` is non-degenerate of dimension `2(k+1)`.
    pub fn config_nondegenerate_check(&self, p: &[ProjectivePoint], q: &[ProjectivePoint]) -> Result<bool> {
        if p.len() != q.len() {
            return Err(Error::LengthMismatch);
        }
        let n = self.dim();
        for x in p.iter().chain(q) {
            if x.rep().len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.rep().len(),
                });
            }
            if !self.q(x.rep()).is_zero() {
                return Err(Error::HypothesisViolated("points must be isotropic"));
            }
        }
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                if !self.form(pi.rep(), pj.rep()).is_zero() {
                    return Err(Error::HypothesisViolated("p-points must be pairwise orthogonal"));
                }
                if self.form(pi.rep(), q[j].rep()).is_zero() == (i == j) {
                    return Err(Error::HypothesisViolated("ω(p_i, q_j) must vanish exactly off the diagonal"));
                }
            }
        }
        let all: Vec<Vector> = p.iter().chain(q).map(|x| x.rep().to_vec()).collect();
        let l = Subspace::span(n, &all);
        let degenerate = l.intersection(&self.perp(&l)).dim() > 0;
        Ok(l.dim() == 2 * p.len() && !degenerate)
    }

    /// A random configuration `(p_0, …, p_k; q_0, …, q_k)` as in
    /// `config_nondegenerate_check`, in a standard space with `k < r`:
    /// `p_i = g·e_i` and `q_i = g·(f_i + x_i + t_i·e_i)` for a random isometry
    /// `g`, random `x_i ⊥ e_0, …, e_k` and `t_i` making `q_i` isotropic.
    pub fn random_configuration<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<(Vec<ProjectivePoint>, Vec<ProjectivePoint>)> {
        let shape = self.shape.ok_or(Error::NotStandard)?;
        if k >= shape.r {
            return Err(Error::IndexOutOfRange { index: k, len: shape.r });
        }
        let n = self.dim();
        let g = self.random_isometry(rng, 3)?;
        let unit = |i: usize| crate::linalg::unit_vector(n, i);
        let mut p = Vec::with_capacity(k + 1);
        let mut q = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut x = self.random_vector(rng, 2);
            for j in 0..=k {
                x[n - 1 - j] = Scalar::zero();
            }
            x[i] = Scalar::zero();
            let v = crate::linalg::vec_add(&unit(n - 1 - i), &x);
            // q(v + t·e_i) = q(v) + t + σ(t) = q(v) + 2t for real t when ε = +1.
            let t = match self.spec.epsilon() {
                Epsilon::Minus => Scalar::zero(),
                Epsilon::Plus => -(self.q(&v) * Scalar::ratio(1, 2)),
            };
            let v = vec_axpy(&v, &t, &unit(i));
            debug_assert!(self.q(&v).is_zero());
            p.push(ProjectivePoint::new(g.apply(&unit(i)))?);
            q.push(ProjectivePoint::new(g.apply(&v))?);
        }
        Ok((p, q))
    }
}

fn next_tuple(values: &mut [usize], base: usize) -> bool {
    for v in values.iter_mut() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn approx(x: &Scalar) -> (f64, f64) {
    use num_traits::ToPrimitive;
    (x.re().to_f64().unwrap_or(f64::MAX), x.im().to_f64().unwrap_or(f64::MAX))
}

fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn csize(a: (f64, f64)) -> f64 {
    a.0.abs() + a.1.abs()
}

/// `q(b_i + c·b_j)` from the Gram shadow.
fn shear_diag(g: &[Vec<(f64, f64)>], i: usize, j: usize, c: (f64, f64), sc: (f64, f64)) -> (f64, f64) {
    let t = cadd(g[i][i], cmul(sc, g[j][i]));
    let t = cadd(t, cmul(c, g[i][j]));
    cadd(t, cmul(cmul(sc, c), g[j][j]))
}

pub fn random_scalar<R: Rng + ?Sized>(base: Base, rng: &mut R, bound: i64) -> Scalar {
    let re = rng.gen_range(-bound..=bound);
    match base {
        Base::Rationals => Scalar::from_int(re),
        Base::GaussianRationals => Scalar::gauss(re, rng.gen_range(-bound..=bound)),
    }
}

struct Completion {
    w0: Vec<Vector>,
    z: Vec<Vector>,
    y: Vec<Vector>,
}

fn dot(row: &[Scalar], x: &[Scalar]) -> Scalar {
    let mut t = Scalar::zero();
    for (r, xi) in row.iter().zip(x) {
        if !r.is_zero() && !xi.is_zero() {
            t += &(r * xi);
        }
    }
    t
}

/// `x ↦ x + c·(row·x)·v`, with `row = σ(v)ᵀJ`.
struct Elementary {
    v: Vector,
    row: Vector,
    c: Scalar,
}

/// A product of elementary maps, applied right to left in push order.
#[derive(Default)]
struct Factors(Vec<Elementary>);

impl Factors {
    fn push(&mut self, f: Elementary) {
        self.0.push(f);
    }

    fn apply(&self, x: &[Scalar]) -> Vector {
        let mut x = x.to_vec();
        for f in &self.0 {
            let t = dot(&f.row, &x);
            if !t.is_zero() {
                x = vec_axpy(&x, &(t * &f.c), &f.v);
            }
        }
        x
    }

    fn to_matrix(&self, n: usize) -> Matrix {
        let cols: Vec<Vector> = (0..n).map(|j| self.apply(&crate::linalg::unit_vector(n, j))).collect();
        Matrix::from_columns(n, &cols)
    }
}

/// A point of `P(V)`, represented with first nonzero coordinate `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectivePoint {
    rep: Vector,
}

impl ProjectivePoint {
    pub fn new(v: Vector) -> Result<Self> {
        let Some(lead) = v.iter().find(|x| !x.is_zero()) else {
            return Err(Error::HypothesisViolated("the zero vector has no projective class"));
        };
        let inv = lead.inv()?;
        Ok(ProjectivePoint { rep: vec_scale(&inv, &v) })
    }

    pub fn rep(&self) -> &[Scalar] {
        &self.rep
    }

    pub fn transform(&self, g: &Isometry) -> ProjectivePoint {
        ProjectivePoint::new(g.apply(&self.rep)).expect("isometries are injective")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    mat: Matrix,
}

impl Isometry {
    pub fn new(space: &FormedSpace, mat: Matrix) -> Result<Self> {
        if space.is_isometry(&mat) {
            Ok(Isometry { mat })
        } else {
            Err(Error::NotAnIsometry)
        }
    }

    pub fn identity(n: usize) -> Self {
        Isometry { mat: Matrix::identity(n) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        self.mat.mul_vec(v)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry { mat: self.mat.mul(&other.mat) }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            mat: self.mat.inverse().expect("isometries are invertible"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedBasis {
    pub hyperbolic_pairs: Vec<(Vector, Vector)>,
    pub anisotropic: Vec<Vector>,
    pub radical: Vec<Vector>,
}

impl AdaptedBasis {
    /// `e_1, f_1, …, e_r, f_r, anisotropic…, radical…`
    pub fn vectors(&self) -> Vec<Vector> {
        let mut out: Vec<Vector> = self.hyperbolic_pairs.iter().flat_map(|(e, f)| [e.clone(), f.clone()]).collect();
        out.extend(self.anisotropic.iter().cloned());
        out.extend(self.radical.iter().cloned());
        out
    }

    /// The Gram matrix the basis must have: hyperbolic blocks `[[0,1],[ε,0]]`,
    /// then the anisotropic diagonal, then zeros.
    pub fn expected_gram(&self, space: &FormedSpace) -> Matrix {
        let eps = space.spec().epsilon_scalar();
        let hyp = Matrix::from_rows(vec![vec![Scalar::zero(), Scalar::one()], vec![eps, Scalar::zero()]]);
        let diag: Vec<Scalar> = self.anisotropic.iter().map(|h| space.q(h)).collect();
        let aniso = Matrix::from_fn(diag.len(), diag.len(), |i, j| if i == j { diag[i].clone() } else { Scalar::zero() });
        let zero = Matrix::zeros(self.radical.len(), self.radical.len());
        let mut blocks: Vec<&Matrix> = self.hyperbolic_pairs.iter().map(|_| &hyp).collect();
        blocks.push(&aniso);
        blocks.push(&zero);
        Matrix::direct_sum(&blocks)
    }
}
