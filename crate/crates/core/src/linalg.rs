//! Dense matrices over a [`Field`]: exact Gaussian elimination for exact
//! fields, singular value decompositions for complex doubles.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Numerical rank with the singular values that decided it.
#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// A singular value lies within a factor 10 of the threshold.
    pub ambiguous: bool,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, cols: usize, rows: &[Vec<F::Elem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r.iter().cloned());
        }
        Matrix { field: field.clone(), rows: rows.len(), cols, data }
    }

    pub fn from_columns(field: &F, rows: usize, cols: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, r: &[F::Elem]) {
        assert_eq!(r.len(), self.cols);
        self.data.extend(r.iter().cloned());
        self.rows += 1;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), &f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
            })
            .collect()
    }

    pub fn stack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut m = self.clone();
        m.data.extend(other.data.iter().cloned());
        m.rows += other.rows;
        m
    }

    pub fn to_dmatrix(&self) -> DMatrix<Complex64> {
        let f = &self.field;
        DMatrix::from_fn(self.rows, self.cols, |i, j| f.to_complex(self.get(i, j)).expect("field has no complex embedding"))
    }

    /// Reduced row echelon form and pivot columns. Exact fields only.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        assert!(self.field.is_exact(), "rref requires an exact field");
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    if f.is_zero(m.get(r, j)) {
                        continue;
                    }
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank_info(&self) -> RankInfo {
        if self.field.is_exact() {
            let rank = self.rref().1.len();
            return RankInfo { rank, singular_values: Vec::new(), threshold: 0.0, ambiguous: false };
        }
        let sv = singular_values(&self.to_dmatrix());
        classify_singular_values(&sv, self.field.rank_tol())
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rank_info().rank
    }

    /// Basis of `{x : A x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        if self.cols == 0 {
            return Vec::new();
        }
        if self.rows == 0 {
            return Matrix::identity(f, self.cols).row_vecs();
        }
        if f.is_exact() {
            let (r, pivots) = self.rref();
            let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
            free.iter()
                .map(|&fc| {
                    let mut v = vec![f.zero(); self.cols];
                    v[fc] = f.one();
                    for (i, &pc) in pivots.iter().enumerate() {
                        v[pc] = f.neg(r.get(i, fc));
                    }
                    v
                })
                .collect()
        } else {
            complex_nullspace(&self.to_dmatrix(), f.rank_tol())
                .into_iter()
                .map(|v| v.into_iter().map(|c| f.from_complex(c).unwrap()).collect())
                .collect()
        }
    }

    /// Solves `A x = b`. Exact fields: `None` if inconsistent. Floating fields:
    /// minimum-norm least squares solution (always `Some`).
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows);
        let f = &self.field;
        if f.is_exact() {
            let mut aug = Self::zeros(f, self.rows, self.cols + 1);
            for i in 0..self.rows {
                for j in 0..self.cols {
                    aug.set(i, j, self.get(i, j).clone());
                }
                aug.set(i, self.cols, b[i].clone());
            }
            let (r, pivots) = aug.rref();
            if pivots.last() == Some(&self.cols) {
                return None;
            }
            let mut x = vec![f.zero(); self.cols];
            for (i, &pc) in pivots.iter().enumerate() {
                x[pc] = r.get(i, self.cols).clone();
            }
            Some(x)
        } else {
            let a = self.to_dmatrix();
            let bv = nalgebra::DVector::from_iterator(b.len(), b.iter().map(|c| f.to_complex(c).unwrap()));
            let x = least_squares(&a, &bv, f.rank_tol());
            Some(x.iter().map(|c| f.from_complex(*c).unwrap()).collect())
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols);
        let f = &self.field;
        let n = self.rows;
        if f.is_exact() {
            let mut aug = Self::zeros(f, n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    aug.set(i, j, self.get(i, j).clone());
                }
                aug.set(i, n + i, f.one());
            }
            let (r, pivots) = aug.rref();
            if pivots.len() < n || pivots[n - 1] != n - 1 {
                return Err(Error::Degenerate("singular matrix".into()));
            }
            let mut inv = Self::zeros(f, n, n);
            for i in 0..n {
                for j in 0..n {
                    inv.set(i, j, r.get(i, n + j).clone());
                }
            }
            Ok(inv)
        } else {
            let inv = self.to_dmatrix().try_inverse().ok_or_else(|| Error::Degenerate("singular matrix".into()))?;
            Ok(from_dmatrix(f, &inv))
        }
    }

    /// Determinant by elimination (exact fields).
    pub fn det(&self) -> F::Elem {
        assert_eq!(self.rows, self.cols);
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = f.one();
        for c in 0..n {
            let Some(p) = (c..n).max_by(|&a, &b| {
                f.magnitude(m.get(a, c)).partial_cmp(&f.magnitude(m.get(b, c))).unwrap()
            }) else {
                return f.zero();
            };
            if f.is_zero(m.get(p, c)) {
                return f.zero();
            }
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = f.neg(&det);
            }
            let piv = m.get(c, c).clone();
            det = f.mul(&det, &piv);
            let inv = f.inv(&piv).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), &inv);
                if f.is_zero(&factor) {
                    continue;
                }
                for j in c..n {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

pub fn from_dmatrix<F: Field>(field: &F, m: &DMatrix<Complex64>) -> Matrix<F> {
    let mut out = Matrix::zeros(field, m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.set(i, j, field.from_complex(m[(i, j)]).expect("field has no complex embedding"));
        }
    }
    out
}

pub fn singular_values(a: &DMatrix<Complex64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

pub fn classify_singular_values(sv: &[f64], tol: f64) -> RankInfo {
    let smax = sv.first().copied().unwrap_or(0.0);
    let threshold = tol * smax;
    if smax == 0.0 {
        return RankInfo { rank: 0, singular_values: sv.to_vec(), threshold, ambiguous: false };
    }
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    let ambiguous = sv.iter().any(|&s| s > threshold / 10.0 && s < threshold * 10.0);
    RankInfo { rank, singular_values: sv.to_vec(), threshold, ambiguous }
}

/// Full SVD `A = U S V^H` with `V` square, padding with zero rows if needed.
fn full_v(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let (m, n) = a.shape();
    let padded = if m < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    (sv, vt)
}

/// Orthonormal basis of the numerical nullspace.
pub fn complex_nullspace(a: &DMatrix<Complex64>, tol: f64) -> Vec<Vec<Complex64>> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return (0..n).map(|i| (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect()).collect();
    }
    let (sv, vt) = full_v(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let threshold = tol * smax;
    (0..vt.nrows())
        .filter(|&i| smax == 0.0 || sv[i] <= threshold)
        .map(|i| (0..n).map(|j| vt[(i, j)].conj()).collect())
        .collect()
}

/// Minimum-norm least squares solution via the pseudo-inverse.
pub fn least_squares(a: &DMatrix<Complex64>, b: &nalgebra::DVector<Complex64>, tol: f64) -> nalgebra::DVector<Complex64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return nalgebra::DVector::zeros(a.ncols());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = (tol * smax).max(f64::MIN_POSITIVE);
    svd.solve(b, eps).unwrap_or_else(|_| nalgebra::DVector::zeros(a.ncols()))
}

/// Orthonormal basis (rows) of the row space of `a`.
pub fn complex_row_space(a: &DMatrix<Complex64>, tol: f64) -> Vec<Vec<Complex64>> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let (sv, vt) = full_v(a);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    (0..vt.nrows())
        .filter(|&i| smax > 0.0 && sv[i] > tol * smax)
        .map(|i| (0..a.ncols()).map(|j| vt[(i, j)].conj()).collect())
        .collect()
}

/// A linear subspace of `F^ambient` given by a basis.
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    basis: Vec<Vec<F::Elem>>,
}

impl<F: Field> Subspace<F> {
    /// Span of the given vectors; dependent vectors are dropped.
    pub fn span(field: &F, ambient: usize, vectors: Vec<Vec<F::Elem>>) -> Self {
        if vectors.is_empty() {
            return Subspace { field: field.clone(), ambient, basis: Vec::new() };
        }
        let m = Matrix::from_rows(field, ambient, &vectors);
        let basis = if field.is_exact() {
            let (r, pivots) = m.rref();
            (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
        } else {
            complex_row_space(&m.to_dmatrix(), field.rank_tol())
                .into_iter()
                .map(|v| v.into_iter().map(|c| field.from_complex(c).unwrap()).collect())
                .collect()
        };
        Subspace { field: field.clone(), ambient, basis }
    }

    /// Wraps vectors already known to be independent.
    pub fn from_basis(field: &F, ambient: usize, basis: Vec<Vec<F::Elem>>) -> Self {
        Subspace { field: field.clone(), ambient, basis }
    }

    pub fn whole(field: &F, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Matrix::identity(field, ambient).row_vecs() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }
    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn matrix(&self) -> Matrix<F> {
        Matrix::from_rows(&self.field, self.ambient, &self.basis)
    }

    /// Canonical reduced row echelon representative (exact fields).
    pub fn canonical(&self) -> Matrix<F> {
        self.matrix().rref().0
    }

    /// Largest relative projection residual of `v` onto this subspace
    /// (floating fields); 0 or 1 for exact fields.
    pub fn projection_residual(&self, v: &[F::Elem]) -> f64 {
        let f = &self.field;
        if f.is_exact() {
            let mut rows = self.basis.clone();
            rows.push(v.to_vec());
            let r = Matrix::from_rows(f, self.ambient, &rows).rank();
            return if r == self.basis.len() { 0.0 } else { 1.0 };
        }
        let q = complex_row_space(&self.matrix().to_dmatrix(), f.rank_tol());
        let vc: Vec<Complex64> = v.iter().map(|c| f.to_complex(c).unwrap()).collect();
        let norm = vc.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let mut resid = vc.clone();
        for qi in &q {
            let dot: Complex64 = qi.iter().zip(&vc).map(|(a, b)| a.conj() * b).sum();
            for (r, a) in resid.iter_mut().zip(qi) {
                *r -= dot * a;
            }
        }
        resid.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() / norm
    }

    /// Whether `other` is contained in `self`. Exact: rank of the stacked
    /// basis. Floating: every basis vector of `other` projects with relative
    /// residual at most the field tolerance.
    pub fn contains(&self, other: &Subspace<F>) -> bool {
        assert_eq!(self.ambient, other.ambient);
        if other.dim() == 0 {
            return true;
        }
        if self.field.is_exact() {
            let stacked = self.matrix().stack(&other.matrix());
            stacked.rank() == self.dim()
        } else {
            other.basis.iter().all(|v| self.projection_residual(v) <= self.field.rank_tol())
        }
    }

    pub fn same_as(&self, other: &Subspace<F>) -> bool {
        self.dim() == other.dim() && self.contains(other)
    }

    pub fn intersect(&self, other: &Subspace<F>) -> Subspace<F> {
        // x = sum a_i s_i = sum b_j o_j
        let f = &self.field;
        let n = self.dim() + other.dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::from_basis(f, self.ambient, Vec::new());
        }
        let mut m = Matrix::zeros(f, self.ambient, n);
        for (k, v) in self.basis.iter().enumerate() {
            for i in 0..self.ambient {
                m.set(i, k, v[i].clone());
            }
        }
        for (k, v) in other.basis.iter().enumerate() {
            for i in 0..self.ambient {
                m.set(i, self.dim() + k, f.neg(&v[i]));
            }
        }
        let vecs = m
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut x = vec![f.zero(); self.ambient];
                for (k, v) in self.basis.iter().enumerate() {
                    for i in 0..self.ambient {
                        x[i] = f.add(&x[i], &f.mul(&c[k], &v[i]));
                    }
                }
                x
            })
            .collect();
        Subspace::span(f, self.ambient, vecs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, ComplexDouble, PrimeField, Rationals};

    #[test]
    fn identity_rank_and_nullspace() {
        let m = Matrix::identity(&Rationals, 3);
        assert_eq!(m.rank(), 3);
        assert!(m.nullspace().is_empty());
        let z = Matrix::zeros(&Rationals, 2, 5);
        assert_eq!(z.rank(), 0);
        assert_eq!(z.nullspace().len(), 5);
    }

    #[test]
    fn complex_rank_matches_exact() {
        let rows = vec![vec![q(1, 1), q(2, 1), q(3, 1)], vec![q(2, 1), q(4, 1), q(6, 1)], vec![q(0, 1), q(1, 1), q(1, 1)]];
        let m = Matrix::from_rows(&Rationals, 3, &rows);
        assert_eq!(m.rank(), 2);
        let cc = ComplexDouble::default();
        let mc = Matrix::from_rows(
            &cc,
            3,
            &rows.iter().map(|r| r.iter().map(|x| Rationals.to_complex(x).unwrap()).collect()).collect::<Vec<_>>(),
        );
        assert_eq!(mc.rank(), 2);
        let ns = mc.nullspace();
        assert_eq!(ns.len(), 1);
        let img = mc.mul_vec(&ns[0]);
        assert!(img.iter().all(|c| c.norm() < 1e-12));
        let zero_wide = Matrix::zeros(&cc, 2, 5);
        assert_eq!(zero_wide.nullspace().len(), 5);
    }

    #[test]
    fn solve_and_inverse() {
        let f = PrimeField::new(32003).unwrap();
        let m = Matrix::from_rows(&f, 2, &[vec![1, 2], vec![3, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        let x = m.solve(&[5, 6]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![5, 6]);
        assert_eq!(m.det(), f.from_i64(-2));
    }

    #[test]
    fn subspace_containment_and_intersection() {
        let f = Rationals;
        let a = Subspace::span(&f, 3, vec![vec![q(1, 1), q(0, 1), q(0, 1)], vec![q(0, 1), q(1, 1), q(0, 1)]]);
        let b = Subspace::span(&f, 3, vec![vec![q(1, 1), q(1, 1), q(0, 1)]]);
        let c = Subspace::span(&f, 3, vec![vec![q(0, 1), q(1, 1), q(1, 1)], vec![q(1, 1), q(0, 1), q(0, 1)]]);
        assert!(a.contains(&b));
        assert!(!b.contains(&a));
        assert_eq!(a.intersect(&c).dim(), 1);
    }
}
