//! Gram-Schmidt orthogonalization state in double precision.
//!
//! Basis entries stay exact integers; only the GSO coefficients live in
//! f64. For the supported contract (`q <= 2^40`, dimension <= 256) the
//! inner products fit comfortably in the f64 range and carry enough
//! mantissa for LLL decisions; degenerate or non-finite projections
//! surface as precision errors.

use alloc::vec::Vec;

use super::mat::IntMat;
use super::LatticeError;

pub struct Gso {
    /// Row-major square `mu` matrix (lower triangle meaningful).
    pub mu: Vec<f64>,
    /// Squared norms of the orthogonalized vectors.
    pub bnorm: Vec<f64>,
    /// Number of active rows.
    pub dim: usize,
    stride: usize,
    bstar: Vec<f64>,
}

impl Gso {
    pub fn with_capacity(max_rows: usize, cols: usize) -> Self {
        Gso {
            mu: alloc::vec![0.0; max_rows * max_rows],
            bnorm: alloc::vec![0.0; max_rows],
            dim: 0,
            stride: max_rows,
            bstar: alloc::vec![0.0; max_rows * cols],
        }
    }

    #[inline]
    pub fn mu(&self, i: usize, j: usize) -> f64 {
        self.mu[i * self.stride + j]
    }

    #[inline]
    pub fn mu_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.mu[i * self.stride + j]
    }

    /// Full modified-Gram-Schmidt recompute over the first `upto` rows.
    pub fn recompute(&mut self, m: &IntMat, upto: usize) -> Result<(), LatticeError> {
        let cols = m.cols();
        assert!(upto <= m.rows());
        assert!(upto <= self.stride, "GSO capacity exceeded");
        self.dim = upto;
        for i in 0..upto {
            let (head, tail) = self.bstar.split_at_mut(i * cols);
            let v = &mut tail[..cols];
            for (vj, &bj) in v.iter_mut().zip(m.row(i)) {
                *vj = bj as f64;
            }
            for j in 0..i {
                let bj = &head[j * cols..(j + 1) * cols];
                let denom = self.bnorm[j];
                let mut num = 0.0;
                for (a, b) in v.iter().zip(bj) {
                    num += a * b;
                }
                let mu = num / denom;
                if !mu.is_finite() {
                    return Err(LatticeError::Precision("non-finite GSO coefficient"));
                }
                self.mu[i * self.stride + j] = mu;
                for (a, b) in v.iter_mut().zip(bj) {
                    *a -= mu * b;
                }
            }
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            if !norm2.is_finite() {
                return Err(LatticeError::Precision("non-finite projected norm"));
            }
            if norm2 <= 0.0 {
                return Err(LatticeError::Precision("zero projected norm (degenerate basis)"));
            }
            self.bnorm[i] = norm2;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gso_identity() {
        let m = IntMat::from_rows(&[
            alloc::vec![2, 0, 0],
            alloc::vec![0, 3, 0],
            alloc::vec![0, 0, 4],
        ]);
        let mut g = Gso::with_capacity(3, 3);
        g.recompute(&m, 3).unwrap();
        assert_eq!(g.bnorm[0], 4.0);
        assert_eq!(g.bnorm[1], 9.0);
        assert_eq!(g.bnorm[2], 16.0);
        assert_eq!(g.mu(1, 0), 0.0);
        assert_eq!(g.mu(2, 1), 0.0);
    }

    #[test]
    fn gso_degenerate_is_error() {
        let m = IntMat::from_rows(&[alloc::vec![1, 2], alloc::vec![2, 4]]);
        let mut g = Gso::with_capacity(2, 2);
        assert!(matches!(
            g.recompute(&m, 2),
            Err(LatticeError::Precision(_))
        ));
    }

    #[test]
    fn gso_known_values() {
        // b0 = (1, 0), b1 = (1, 2): mu = 1, b1* = (0, 2).
        let m = IntMat::from_rows(&[alloc::vec![1, 0], alloc::vec![1, 2]]);
        let mut g = Gso::with_capacity(2, 2);
        g.recompute(&m, 2).unwrap();
        assert_eq!(g.mu(1, 0), 1.0);
        assert_eq!(g.bnorm[0], 1.0);
        assert_eq!(g.bnorm[1], 4.0);
    }
}
