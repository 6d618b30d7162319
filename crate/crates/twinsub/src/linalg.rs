//! Sparse and dense complex linear algebra used by the Fock-space core.
//!
//! Operators on the truncated two-mode space are band sparse (ladder and
//! Schwinger operators couple only neighboring occupation numbers), so the
//! default storage is a square CSR matrix. Dense blocks appear only in the
//! per-sector matrix exponentials and in the small eigenvalue problems of
//! the test oracles.

use ndarray::Array2;
use num_complex::Complex64;

/// Square complex sparse matrix in compressed-sparse-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn zeros(dim: usize) -> Self {
        CsrMatrix {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        CsrMatrix {
            dim,
            indptr: (0..=dim).collect(),
            indices: (0..dim).collect(),
            data: vec![Complex64::new(1.0, 0.0); dim],
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        for &(r, c, _) in &triplets {
            assert!(r < dim && c < dim, "triplet ({r},{c}) outside dim {dim}");
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = Vec::with_capacity(dim + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<Complex64> = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut it = triplets.into_iter().peekable();
        for row in 0..dim {
            while let Some(&(r, c, v)) = it.peek() {
                if r != row {
                    break;
                }
                it.next();
                if indices.len() > indptr[row] && *indices.last().unwrap() == c {
                    *data.last_mut().unwrap() += v;
                } else {
                    indices.push(c);
                    data.push(v);
                }
            }
            indptr.push(indices.len());
        }
        let m = CsrMatrix {
            dim,
            indptr,
            indices,
            data,
        };
        m.pruned(0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let lo = self.indptr[row];
        let hi = self.indptr[row + 1];
        match self.indices[lo..hi].binary_search(&col) {
            Ok(k) => self.data[lo + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    /// Drops entries with |v| <= tol (tol = 0 drops exact zeros only).
    pub fn pruned(&self, tol: f64) -> Self {
        let mut indptr = vec![0usize; self.dim + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.data[k].norm() > tol {
                    indices.push(self.indices[k]);
                    data.push(self.data[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        CsrMatrix {
            dim: self.dim,
            indptr,
            indices,
            data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= factor;
        }
        out
    }

    /// Sum of coeff * matrix over the given terms.
    pub fn linear_combination(terms: &[(Complex64, &CsrMatrix)]) -> Self {
        assert!(!terms.is_empty());
        let dim = terms[0].1.dim;
        let mut triplets = Vec::new();
        for (coeff, m) in terms {
            assert_eq!(m.dim, dim);
            for (r, c, v) in m.iter() {
                triplets.push((r, c, coeff * v));
            }
        }
        CsrMatrix::from_triplets(dim, triplets)
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        let one = Complex64::new(1.0, 0.0);
        CsrMatrix::linear_combination(&[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        CsrMatrix::linear_combination(&[
            (Complex64::new(1.0, 0.0), self),
            (Complex64::new(-1.0, 0.0), other),
        ])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let triplets = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        CsrMatrix::from_triplets(self.dim, triplets)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        for r in 0..self.dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
        y
    }

    /// Sparse-sparse product with a dense row accumulator.
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::new();
        let mut data = Vec::new();
        let mut acc = vec![Complex64::new(0.0, 0.0); dim];
        let mut touched: Vec<usize> = Vec::new();
        for r in 0..dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let a = self.data[k];
                let mid = self.indices[k];
                for k2 in other.indptr[mid]..other.indptr[mid + 1] {
                    let c = other.indices[k2];
                    if acc[c] == Complex64::new(0.0, 0.0) {
                        touched.push(c);
                    }
                    acc[c] += a * other.data[k2];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != Complex64::new(0.0, 0.0) {
                    indices.push(c);
                    data.push(acc[c]);
                }
                acc[c] = Complex64::new(0.0, 0.0);
            }
            touched.clear();
            indptr[r + 1] = indices.len();
        }
        CsrMatrix {
            dim,
            indptr,
            indices,
            data,
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max |A - A^dagger| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let mut m = Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &Array2<Complex64>, tol: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let triplets = m
            .indexed_iter()
            .filter(|(_, v)| v.norm() > tol)
            .map(|((r, c), v)| (r, c, *v))
            .collect();
        CsrMatrix::from_triplets(m.nrows(), triplets)
    }
}

pub fn max_abs_diff(a: &CsrMatrix, b: &CsrMatrix) -> f64 {
    a.sub(b).max_abs()
}

/// Dense matrix exponential by scaling-and-squaring with a Taylor series.
///
/// Intended for the small per-sector blocks of beam splitter unitaries and
/// for test oracles; not tuned for large matrices.
pub fn expm_dense(a: &Array2<Complex64>) -> Array2<Complex64> {
    let dim = a.nrows();
    let norm: f64 = (0..dim)
        .map(|r| (0..dim).map(|c| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = Complex64::new(1.0 / 2f64.powi(squarings as i32), 0.0);
    let b = a.mapv(|v| v * scale);

    let mut result = Array2::<Complex64>::eye(dim);
    let mut term = Array2::<Complex64>::eye(dim);
    for k in 1..=40u32 {
        term = term.dot(&b).mapv(|v| v / k as f64);
        result += &term;
        let tmax = term.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if tmax < 1e-300 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix by the cyclic complex Jacobi method.
///
/// Returns eigenvalues in ascending order. Used by positivity checks and
/// the trace-distance oracle on small dense blocks.
pub fn eigvalsh(a: &Array2<Complex64>) -> Vec<f64> {
    let dim = a.nrows();
    assert_eq!(dim, a.ncols());
    let mut m = a.clone();
    let tol = 1e-14
        * m.iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..dim {
            for q in (p + 1)..dim {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag < tol {
                    continue;
                }
                let u = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = 0.5 * (2.0 * mag).atan2(aqq - app);
                let c = Complex64::new(theta.cos(), 0.0);
                let s = Complex64::new(theta.sin(), 0.0);
                // columns: M <- M G with G = [[c, s u], [-s conj(u), c]] on (p, q)
                for i in 0..dim {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = c * mip - s * u.conj() * miq;
                    m[(i, q)] = s * u * mip + c * miq;
                }
                // rows: M <- G^dagger M
                for j in 0..dim {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = c * mpj - s * u * mqj;
                    m[(q, j)] = s * u.conj() * mpj + c * mqj;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..dim).map(|i| m[(i, i)].re).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_roundtrip_and_merge() {
        let m = CsrMatrix::from_triplets(
            3,
            vec![
                (0, 1, c(1.0, 0.0)),
                (2, 2, c(0.5, -0.5)),
                (0, 1, c(2.0, 0.0)),
            ],
        );
        assert_eq!(m.get(0, 1), c(3.0, 0.0));
        assert_eq!(m.get(2, 2), c(0.5, -0.5));
        assert_eq!(m.get(1, 1), c(0.0, 0.0));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = CsrMatrix::from_triplets(
            3,
            vec![(0, 1, c(1.0, 1.0)), (1, 2, c(2.0, 0.0)), (2, 0, c(0.0, -1.0))],
        );
        let b = CsrMatrix::from_triplets(3, vec![(1, 1, c(3.0, 0.0)), (2, 0, c(1.0, 2.0))]);
        let prod = a.matmul(&b);
        let dense = a.to_dense().dot(&b.to_dense());
        assert!(max_abs_diff(&prod, &CsrMatrix::from_dense(&dense, 0.0)) < 1e-14);
    }

    #[test]
    fn adjoint_involution() {
        let a = CsrMatrix::from_triplets(4, vec![(0, 3, c(1.0, 2.0)), (2, 1, c(-1.0, 0.5))]);
        assert!(max_abs_diff(&a.adjoint().adjoint(), &a) < 1e-15);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = Array2::<Complex64>::zeros((4, 4));
        let e = expm_dense(&z);
        let id = Array2::<Complex64>::eye(4);
        let diff = (&e - &id).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn expm_pauli_x_rotation() {
        // exp(i t X) = cos(t) I + i sin(t) X
        let t = 0.7f64;
        let mut x = Array2::<Complex64>::zeros((2, 2));
        x[(0, 1)] = c(0.0, t);
        x[(1, 0)] = c(0.0, t);
        let e = expm_dense(&x);
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - c(0.0, t.sin())).norm() < 1e-14);
    }

    #[test]
    fn jacobi_eigenvalues_hermitian() {
        let mut a = Array2::<Complex64>::zeros((3, 3));
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(-1.0, 0.0);
        a[(2, 2)] = c(0.5, 0.0);
        a[(0, 1)] = c(0.3, 0.4);
        a[(1, 0)] = c(0.3, -0.4);
        a[(1, 2)] = c(0.0, -0.2);
        a[(2, 1)] = c(0.0, 0.2);
        let vals = eigvalsh(&a);
        // invariants: trace and Frobenius norm preserved
        let tr: f64 = vals.iter().sum();
        assert!((tr - 1.5).abs() < 1e-12);
        let frob2: f64 = vals.iter().map(|v| v * v).sum();
        let expect: f64 = a.iter().map(|v| v.norm_sqr()).sum();
        assert!((frob2 - expect).abs() < 1e-10);
    }
}
