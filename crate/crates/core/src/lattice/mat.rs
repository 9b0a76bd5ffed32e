//! Row-major integer matrix used by the reduction algorithms.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: alloc::vec![0i64; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        IntMat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [i64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let (a, b) = self.data.split_at_mut(hi * self.cols);
        a[lo * self.cols..(lo + 1) * self.cols].swap_with_slice(&mut b[..self.cols]);
    }

    /// Two distinct rows, one mutable: `(row i, row j mutable)`.
    pub fn row_pair_mut(&mut self, i: usize, j: usize) -> (&[i64], &mut [i64]) {
        assert_ne!(i, j);
        let c = self.cols;
        if i < j {
            let (a, b) = self.data.split_at_mut(j * c);
            (&a[i * c..(i + 1) * c], &mut b[..c])
        } else {
            let (a, b) = self.data.split_at_mut(i * c);
            let aj = &a[j * c..(j + 1) * c] as *const [i64];
            // Safe split: j < i, so the mutable row lives in `b`.
            let _ = aj;
            let (a2, _) = a.split_at_mut((j + 1) * c);
            let aj = &mut a2[j * c..(j + 1) * c];
            (&b[..c], aj)
        }
    }

    /// Exact squared Euclidean norm of a row.
    pub fn row_norm2(&self, i: usize) -> i128 {
        self.row(i).iter().map(|&x| x as i128 * x as i128).sum()
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&x| x == 0)
    }

    /// Exact dot product of two rows in i128.
    pub fn row_dot(&self, i: usize, j: usize) -> i128 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum()
    }
}

/// `dst -= r * src`, computed in i128 with an exact fit-check back to i64.
/// Returns false (leaving `dst` partially updated is avoided by checking
/// first) when any entry would overflow.
pub fn row_sub_mul(dst: &mut [i64], src: &[i64], r: i64) -> bool {
    debug_assert_eq!(dst.len(), src.len());
    for (&d, &s) in dst.iter().zip(src.iter()) {
        let v = d as i128 - r as i128 * s as i128;
        if v > i64::MAX as i128 || v < i64::MIN as i128 {
            return false;
        }
    }
    for (d, &s) in dst.iter_mut().zip(src.iter()) {
        *d -= r.wrapping_mul(s);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_pair_mut_both_orders() {
        let mut m = IntMat::from_rows(&[alloc::vec![1, 2], alloc::vec![3, 4]]);
        {
            let (a, b) = m.row_pair_mut(0, 1);
            assert_eq!(a, &[1, 2]);
            b[0] = 9;
        }
        assert_eq!(m.row(1), &[9, 4]);
        {
            let (a, b) = m.row_pair_mut(1, 0);
            assert_eq!(a, &[9, 4]);
            b[1] = 7;
        }
        assert_eq!(m.row(0), &[1, 7]);
    }

    #[test]
    fn row_sub_mul_overflow_guard() {
        let mut dst = alloc::vec![i64::MAX, 0];
        let src = alloc::vec![-1i64, 0];
        assert!(!row_sub_mul(&mut dst, &src, 1));
        // Untouched on failure.
        assert_eq!(dst, alloc::vec![i64::MAX, 0]);
    }
}
