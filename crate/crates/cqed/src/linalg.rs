//! Shared numerical kernels: sparse complex matrices, Hermitian
//! eigensolvers and sparse linear solves.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Compressed sparse row matrix over complex numbers.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from (row, col, value) triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut per_row: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for &(r, c, v) in triplets {
            debug_assert!(r < nrows && c < ncols);
            per_row[r].push((c, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for row in per_row.iter_mut() {
            row.sort_unstable_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let col = row[i].0;
                let mut acc = C64::new(0.0, 0.0);
                while i < row.len() && row[i].0 == col {
                    acc += row[i].1;
                    i += 1;
                }
                if acc != C64::new(0.0, 0.0) {
                    indices.push(col);
                    data.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        CsrMatrix {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec(x, &mut y);
        y
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut triplets = Vec::with_capacity(self.nnz() + other.nnz());
        for m in [self, other] {
            for r in 0..m.nrows {
                for k in m.indptr[r]..m.indptr[r + 1] {
                    triplets.push((r, m.indices[k], m.data[k]));
                }
            }
        }
        Self::from_triplets(self.nrows, self.ncols, &triplets)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                triplets.push((self.indices[k], r, self.data[k].conj()));
            }
        }
        Self::from_triplets(self.ncols, self.nrows, &triplets)
    }

    /// Element-wise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = v.conj();
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let a = self.data[k];
                let mid = self.indices[k];
                for k2 in other.indptr[mid]..other.indptr[mid + 1] {
                    triplets.push((r, other.indices[k2], a * other.data[k2]));
                }
            }
        }
        Self::from_triplets(self.nrows, other.ncols, &triplets)
    }

    /// Kronecker product, row-major convention: index = i_left * ncols_right + i_right.
    pub fn kron(&self, other: &Self) -> Self {
        let nrows = self.nrows * other.nrows;
        let ncols = self.ncols * other.ncols;
        let mut triplets = Vec::with_capacity(self.nnz() * other.nnz());
        for r1 in 0..self.nrows {
            for k1 in self.indptr[r1]..self.indptr[r1 + 1] {
                let c1 = self.indices[k1];
                let v1 = self.data[k1];
                for r2 in 0..other.nrows {
                    for k2 in other.indptr[r2]..other.indptr[r2 + 1] {
                        triplets.push((
                            r1 * other.nrows + r2,
                            c1 * other.ncols + other.indices[k2],
                            v1 * other.data[k2],
                        ));
                    }
                }
            }
        }
        Self::from_triplets(nrows, ncols, &triplets)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] += self.data[k];
            }
        }
        m
    }

    /// max |A - A^dagger| entry, 0 for exactly Hermitian matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.add(&self.dagger().scale(C64::new(-1.0, 0.0)));
        d.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for r in 0..self.nrows.min(self.ncols) {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.indices[k] == r {
                    t += self.data[k];
                }
            }
        }
        t
    }
}

/// Eigendecomposition of a dense Hermitian matrix, eigenvalues ascending.
pub fn eigh(matrix: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = matrix.nrows();
    let se = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Fixes eigenvector phases so the largest-magnitude component is real positive.
pub fn fix_phases(vectors: &mut DMatrix<C64>) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0usize;
        let mut best_norm = 0.0;
        for (i, v) in col.iter().enumerate() {
            if v.norm() > best_norm {
                best_norm = v.norm();
                best = i;
            }
        }
        if best_norm > 0.0 {
            let phase = col[best] / C64::new(best_norm, 0.0);
            let correction = phase.conj();
            for v in col.iter_mut() {
                *v *= correction;
            }
        }
    }
}

fn to_faer_triplets(m: &CsrMatrix) -> Vec<faer::sparse::Triplet<usize, usize, faer::c64>> {
    let mut t = Vec::with_capacity(m.nnz());
    for r in 0..m.nrows {
        for k in m.indptr[r]..m.indptr[r + 1] {
            t.push(faer::sparse::Triplet::new(
                r,
                m.indices[k],
                faer::c64::new(m.data[k].re, m.data[k].im),
            ));
        }
    }
    t
}

/// Sparse LU factorization wrapper (complex, square).
pub struct SparseLu {
    n: usize,
    lu: faer::sparse::linalg::solvers::Lu<usize, faer::c64>,
}

impl SparseLu {
    pub fn factor(m: &CsrMatrix) -> Result<Self> {
        assert_eq!(m.nrows, m.ncols);
        let t = to_faer_triplets(m);
        let mat = faer::sparse::SparseColMat::<usize, faer::c64>::try_new_from_triplets(
            m.nrows, m.ncols, &t,
        )
        .map_err(|e| Error::ConvergenceFailure(format!("sparse assembly failed: {e:?}")))?;
        let lu = mat
            .sp_lu()
            .map_err(|_| Error::SingularLiouvillian { null_dim: None })?;
        Ok(SparseLu { n: m.nrows, lu })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        use faer::prelude::*;
        let mut b = faer::Mat::<faer::c64>::zeros(self.n, 1);
        for i in 0..self.n {
            b[(i, 0)] = faer::c64::new(rhs[i].re, rhs[i].im);
        }
        let x = self.lu.solve(&b);
        (0..self.n).map(|i| C64::new(x[(i, 0)].re, x[(i, 0)].im)).collect()
    }
}

/// Lowest-`k` eigenpairs of a sparse Hermitian matrix by shift-invert
/// Lanczos with full reorthogonalization. The shift sits below the
/// spectrum (Gershgorin bound) so the target eigenvalues map to the
/// dominant end of the inverted operator.
pub fn lanczos_lowest(h: &CsrMatrix, k: usize, tol: f64) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = h.nrows;
    assert_eq!(n, h.ncols);
    if k >= n {
        return Err(Error::DimensionMismatch(format!(
            "requested {k} eigenpairs of a dimension-{n} operator"
        )));
    }

    // Gershgorin lower bound.
    let mut lower = f64::INFINITY;
    let mut scale: f64 = 1.0;
    for r in 0..n {
        let mut diag = 0.0;
        let mut radius = 0.0;
        for idx in h.indptr[r]..h.indptr[r + 1] {
            if h.indices[idx] == r {
                diag = h.data[idx].re;
            } else {
                radius += h.data[idx].norm();
            }
        }
        lower = lower.min(diag - radius);
        scale = scale.max(diag.abs() + radius);
    }
    let sigma = lower - 1e-3 * scale.max(1.0);

    // Factor H - sigma I once.
    let shift = CsrMatrix::identity(n).scale(C64::new(-sigma, 0.0));
    let lu = SparseLu::factor(&h.add(&shift))?;

    let mut steps = (3 * k + 30).min(n);
    loop {
        match lanczos_run(h, &lu, sigma, k, steps, tol, scale) {
            Ok(result) => return Ok(result),
            Err(e) if steps < n => {
                let _ = e;
                steps = (2 * steps).min(n);
            }
            Err(e) => return Err(e),
        }
    }
}

fn lanczos_run(
    h: &CsrMatrix,
    lu: &SparseLu,
    sigma: f64,
    k: usize,
    m: usize,
    tol: f64,
    scale: f64,
) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = h.nrows;
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::new();

    // Deterministic start vector.
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.7324).sin(), 0.0))
        .collect();
    normalize(&mut v);
    basis.push(v);

    for j in 0..m {
        let mut w = lu.solve(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        axpy(&mut w, &basis[j], -C64::new(a, 0.0));
        if j > 0 {
            let b = beta[j - 1];
            let prev = basis[j - 1].clone();
            axpy(&mut w, &prev, -C64::new(b, 0.0));
        }
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in basis.iter() {
                let p = dot(q, &w);
                axpy(&mut w, q, -p);
            }
        }
        let nb = norm(&w);
        if j + 1 == m || nb < 1e-14 {
            break;
        }
        for x in w.iter_mut() {
            *x /= nb;
        }
        beta.push(nb);
        basis.push(w);
    }

    let steps = alpha.len();
    let mut tri = DMatrix::<f64>::zeros(steps, steps);
    for i in 0..steps {
        tri[(i, i)] = alpha[i];
        if i + 1 < steps {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let se = tri.symmetric_eigen();
    // Largest theta of (H - sigma)^-1 correspond to the lowest eigenvalues of H.
    let mut order: Vec<usize> = (0..steps).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());

    let kept = order.iter().take(k).copied().collect::<Vec<_>>();
    let mut values = Vec::with_capacity(k);
    let mut vectors = DMatrix::<C64>::zeros(n, k);
    for (col, &ri) in kept.iter().enumerate() {
        let theta = se.eigenvalues[ri];
        if theta.abs() < 1e-300 {
            return Err(Error::ConvergenceFailure("degenerate Ritz value".into()));
        }
        values.push(sigma + 1.0 / theta);
        let s = se.eigenvectors.column(ri);
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (j, q) in basis.iter().enumerate() {
            let c = C64::new(s[j], 0.0);
            axpy(&mut x, q, c);
        }
        normalize(&mut x);
        for i in 0..n {
            vectors[(i, col)] = x[i];
        }
    }

    // Residual check against the original operator.
    for (col, &lambda) in values.iter().enumerate() {
        let x: Vec<C64> = vectors.column(col).iter().copied().collect();
        let hx = h.matvec_alloc(&x);
        let mut res = 0.0;
        for i in 0..n {
            res += (hx[i] - C64::new(lambda, 0.0) * x[i]).norm_sqr();
        }
        let res = res.sqrt();
        if res > tol * scale.max(1.0) {
            return Err(Error::ConvergenceFailure(format!(
                "Ritz residual {res:.3e} above tolerance for eigenvalue {lambda:.6e}"
            )));
        }
    }

    // ascending
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let sorted_values: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = DMatrix::<C64>::zeros(n, k);
    for (dst, &src) in idx.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    Ok((sorted_values, sorted_vectors))
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [C64]) {
    let n = norm(a);
    if n > 0.0 {
        for x in a.iter_mut() {
            *x /= n;
        }
    }
}

fn axpy(y: &mut [C64], x: &[C64], a: C64) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Restarted GMRES for square complex systems. Fallback for Liouvillians
/// too large for a direct factorization.
pub fn gmres(
    a: &CsrMatrix,
    b: &[C64],
    x0: Option<&[C64]>,
    restart: usize,
    max_restarts: usize,
    tol: f64,
) -> Result<Vec<C64>> {
    let n = a.nrows;
    let mut x = x0.map(|v| v.to_vec()).unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    let bnorm = norm(b).max(1e-300);

    for _ in 0..max_restarts {
        let ax = a.matvec_alloc(&x);
        let mut r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let rnorm = norm(&r);
        if rnorm / bnorm < tol {
            return Ok(x);
        }
        for v in r.iter_mut() {
            *v /= rnorm;
        }
        let m = restart.min(n);
        let mut basis = vec![r];
        let mut hess = DMatrix::<C64>::zeros(m + 1, m);
        let mut g = DVector::<C64>::zeros(m + 1);
        g[0] = C64::new(rnorm, 0.0);
        let mut last = m;
        for j in 0..m {
            let mut w = a.matvec_alloc(&basis[j]);
            for i in 0..=j {
                let hij = dot(&basis[i], &w);
                hess[(i, j)] = hij;
                axpy(&mut w, &basis[i], -hij);
            }
            let h1 = norm(&w);
            hess[(j + 1, j)] = C64::new(h1, 0.0);
            if h1 < 1e-14 {
                last = j + 1;
                break;
            }
            for v in w.iter_mut() {
                *v /= h1;
            }
            basis.push(w);
        }
        // least squares on the (last+1) x last Hessenberg block
        let cols = last;
        let hm = hess.view((0, 0), (cols + 1, cols)).into_owned();
        let gm = g.rows(0, cols + 1).into_owned();
        let svd = hm.svd(true, true);
        let y = svd
            .solve(&gm, 1e-14)
            .map_err(|e| Error::ConvergenceFailure(format!("GMRES least-squares failed: {e}")))?;
        for (j, basis_vec) in basis.iter().take(cols).enumerate() {
            axpy(&mut x, basis_vec, y[j]);
        }
    }
    let ax = a.matvec_alloc(&x);
    let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    if norm(&r) / bnorm < tol {
        Ok(x)
    } else {
        Err(Error::ConvergenceFailure(format!(
            "GMRES residual {:.3e} after {} restarts",
            norm(&r) / bnorm,
            max_restarts
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn random_hermitian(n: usize, seed: u64) -> CsrMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for i in 0..n {
            triplets.push((i, i, C64::new(rng.random_range(-1.0..1.0), 0.0)));
            for _ in 0..3 {
                let j = rng.random_range(0..n);
                if j == i {
                    continue;
                }
                let v = C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                triplets.push((i, j, v));
                triplets.push((j, i, v.conj()));
            }
        }
        CsrMatrix::from_triplets(n, n, &triplets)
    }

    #[test]
    fn eigh_known_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(2.0, 0.0),
            ],
        );
        let (vals, vecs) = eigh(&m);
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-12);
        let residual = &m * vecs.column(0) - vecs.column(0) * C64::new(vals[0], 0.0);
        assert!(residual.norm() < 1e-12);
    }

    #[test]
    fn lanczos_matches_dense() {
        let h = random_hermitian(120, 7);
        let (dense_vals, _) = eigh(&h.to_dense());
        let (vals, vecs) = lanczos_lowest(&h, 5, 1e-9).unwrap();
        for i in 0..5 {
            assert_relative_eq!(vals[i], dense_vals[i], epsilon = 1e-9);
        }
        // eigenvector residual
        let x: Vec<C64> = vecs.column(0).iter().copied().collect();
        let hx = h.matvec_alloc(&x);
        let mut res = 0.0;
        for i in 0..120 {
            res += (hx[i] - C64::new(vals[0], 0.0) * x[i]).norm_sqr();
        }
        assert!(res.sqrt() < 1e-8);
    }

    #[test]
    fn sparse_lu_roundtrip() {
        let h = random_hermitian(50, 3);
        let lu = SparseLu::factor(&h).unwrap();
        let b: Vec<C64> = (0..50).map(|i| C64::new(i as f64, -1.0)).collect();
        let x = lu.solve(&b);
        let hx = h.matvec_alloc(&x);
        for i in 0..50 {
            assert!((hx[i] - b[i]).norm() < 1e-9);
        }
    }

    #[test]
    fn gmres_solves_small_system() {
        let h = random_hermitian(40, 11);
        // make it diagonally dominant so GMRES converges quickly
        let shifted = h.add(&CsrMatrix::identity(40).scale(C64::new(8.0, 0.0)));
        let b: Vec<C64> = (0..40).map(|i| C64::new(1.0, i as f64 * 0.1)).collect();
        let x = gmres(&shifted, &b, None, 30, 50, 1e-10).unwrap();
        let ax = shifted.matvec_alloc(&x);
        for i in 0..40 {
            assert!((ax[i] - b[i]).norm() < 1e-8);
        }
    }

    #[test]
    fn kron_and_matmul_agree_with_dense() {
        let a = random_hermitian(6, 1);
        let b = random_hermitian(5, 2);
        let k = a.kron(&b).to_dense();
        let ad = a.to_dense();
        let bd = b.to_dense();
        for i1 in 0..6 {
            for j1 in 0..6 {
                for i2 in 0..5 {
                    for j2 in 0..5 {
                        let lhs = k[(i1 * 5 + i2, j1 * 5 + j2)];
                        let rhs = ad[(i1, j1)] * bd[(i2, j2)];
                        assert!((lhs - rhs).norm() < 1e-14);
                    }
                }
            }
        }
        let p = a.matmul(&a).to_dense();
        let pd = &ad * &ad;
        assert!((p - pd).norm() < 1e-12);
    }
}
