//! Minimal sparse operator type for fast left/right application to dense
//! matrices and vectors.
//!
//! The Fock-space operators of this model (ladder operators, number
//! operators, the squared coupling term) have O(1) nonzeros per column, so
//! applying them as sparse operators turns the master-equation right-hand
//! side from O(d^3) into O(d^2) work.

use crate::{CMatrix, CVector, C64};

/// Sparse complex operator stored as column-sorted COO triplets.
#[derive(Debug, Clone)]
pub struct SparseOp {
    dim: usize,
    /// (row, col, value), sorted by column then row.
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn from_dense(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "operator must be square");
        let dim = m.nrows();
        let tol = 1e-300;
        let mut entries = Vec::new();
        for j in 0..dim {
            for i in 0..dim {
                let v = m[(i, j)];
                if v.norm_sqr() > tol {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] = v;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|&(i, j, v)| (j, i, v.conj()))
            .collect();
        entries.sort_by_key(|&(_, j, _)| j);
        Self {
            dim: self.dim,
            entries,
        }
    }

    /// y += scale * A x
    pub fn mul_vec_acc(&self, scale: C64, x: &CVector, y: &mut CVector) {
        for &(i, j, v) in &self.entries {
            y[i] += scale * v * x[j];
        }
    }

    pub fn mul_vec(&self, x: &CVector) -> CVector {
        let mut y = CVector::zeros(self.dim);
        self.mul_vec_acc(C64::new(1.0, 0.0), x, &mut y);
        y
    }

    /// out += scale * A * rho
    pub fn mul_left_acc(&self, scale: C64, rho: &CMatrix, out: &mut CMatrix) {
        let d = self.dim;
        for c in 0..d {
            let col_in = rho.column(c);
            let mut col_out = out.column_mut(c);
            for &(i, j, v) in &self.entries {
                col_out[i] += scale * v * col_in[j];
            }
        }
    }

    /// out += scale * rho * A  (column axpy: out[:,j] += v * rho[:,i])
    pub fn mul_right_acc(&self, scale: C64, rho: &CMatrix, out: &mut CMatrix) {
        for &(i, j, v) in &self.entries {
            let s = scale * v;
            let col_in = rho.column(i).clone_owned();
            let mut col_out = out.column_mut(j);
            for (o, r) in col_out.iter_mut().zip(col_in.iter()) {
                *o += s * r;
            }
        }
    }

    /// Tr(rho * A)
    pub fn trace_with(&self, rho: &CMatrix) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(i, j, v) in &self.entries {
            acc += rho[(j, i)] * v;
        }
        acc
    }

    /// <x|A|x>
    pub fn expectation(&self, x: &CVector) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &(i, j, v) in &self.entries {
            acc += x[i].conj() * v * x[j];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rand_matrix(d: usize, seed: u64) -> CMatrix {
        // tiny LCG, deterministic
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(d, d, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn sparse_matches_dense_products() {
        let a = rand_matrix(7, 1);
        let rho = rand_matrix(7, 2);
        let sp = SparseOp::from_dense(&a);

        let mut left = CMatrix::zeros(7, 7);
        sp.mul_left_acc(C64::new(1.0, 0.0), &rho, &mut left);
        assert!((&left - &a * &rho).norm() < 1e-12);

        let mut right = CMatrix::zeros(7, 7);
        sp.mul_right_acc(C64::new(1.0, 0.0), &rho, &mut right);
        assert!((&right - &rho * &a).norm() < 1e-12);

        let x = CVector::from_fn(7, |i, _| C64::new(i as f64, -1.0));
        assert!((sp.mul_vec(&x) - &a * &x).norm() < 1e-12);

        let tr = sp.trace_with(&rho);
        let dense_tr = (&rho * &a).trace();
        assert!((tr - dense_tr).norm() < 1e-12);

        let adj = sp.adjoint().to_dense();
        assert!((adj - a.adjoint()).norm() < 1e-14);
    }
}
