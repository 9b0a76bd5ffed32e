//! Pairwise re-orthogonalization with provably non-increasing norms.
//!
//! For each ordered pair `(i, j)` with `i != j`, replaces
//! `v_i <- v_i - round(<v_i, v_j> / <v_j, v_j>) * v_j` whenever that
//! strictly decreases `||v_i||`. Sweeps run to a fixpoint (or an iteration
//! cap). All arithmetic is exact in i128, so the accept test is exact and
//! no row norm ever increases.

use super::mat::{row_sub_mul, IntMat};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PolishStats {
    pub sweeps: usize,
    pub updates: usize,
}

const SWEEP_CAP: usize = 256;
/// Entry bound keeping `<v_i, v_j>` inside i128 for up to 4096 columns.
const ENTRY_BOUND: i64 = 1 << 55;

/// Nearest integer to `a / b` for `b > 0` (ties toward +inf; exact ties
/// never produce a strict norm decrease, so the tie direction is moot).
#[inline]
fn round_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    let q = a.div_euclid(b);
    let r = a.rem_euclid(b);
    if 2 * r >= b {
        q + 1
    } else {
        q
    }
}

pub fn polish(m: &mut IntMat) -> PolishStats {
    let rows = m.rows();
    let mut stats = PolishStats::default();
    if rows < 2 {
        return stats;
    }
    for i in 0..rows {
        for &x in m.row(i) {
            assert!(x.abs() < ENTRY_BOUND, "polish entry bound exceeded");
        }
    }
    // Cache exact squared norms; they only change on accepted updates.
    let mut norm2: alloc::vec::Vec<i128> = (0..rows).map(|i| m.row_norm2(i)).collect();
    loop {
        let mut changed = false;
        for i in 0..rows {
            for j in 0..rows {
                if i == j || norm2[j] == 0 {
                    continue;
                }
                let dot = m.row_dot(i, j);
                let r = round_div(dot, norm2[j]);
                if r == 0 {
                    continue;
                }
                // ||v_i - r v_j||^2 - ||v_i||^2 = r^2 ||v_j||^2 - 2 r <v_i, v_j>
                let delta = r * (r * norm2[j] - 2 * dot);
                if delta >= 0 {
                    continue;
                }
                let r64 = i64::try_from(r).expect("polish coefficient fits i64");
                let (src, dst) = m.row_pair_mut(j, i);
                let ok = row_sub_mul(dst, src, r64);
                assert!(ok, "polish row update overflow");
                norm2[i] += delta;
                stats.updates += 1;
                changed = true;
            }
        }
        stats.sweeps += 1;
        if !changed || stats.sweeps >= SWEEP_CAP {
            return stats;
        }
    }
}

#[cfg(test)]
mod tests {
    use alloc::vec::Vec;

    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn orthogonal_basis_unchanged() {
        let mut m = IntMat::from_rows(&[alloc::vec![3, 0], alloc::vec![0, 5]]);
        let before = m.clone();
        polish(&mut m);
        assert_eq!(m, before);
    }

    #[test]
    fn known_pair_update() {
        // (5,0),(4,1): round(20/17) = 1, so (5,0) -> (1,-1).
        let mut m = IntMat::from_rows(&[alloc::vec![5, 0], alloc::vec![4, 1]]);
        polish(&mut m);
        // Brute-force the shortest value reachable for row 0 by integer
        // multiples of row 1.
        let mut best = i128::MAX;
        for r in -10i64..=10 {
            let x = 5 - r * 4;
            let y = -r;
            best = best.min((x as i128).pow(2) + (y as i128).pow(2));
        }
        assert_eq!(m.row_norm2(0).min(m.row_norm2(1)), best);
        assert_eq!(m.row(0), &[1, -1]);
    }

    #[test]
    fn norms_never_increase() {
        let mut rng = Stream::new(17, stream::MATRIX);
        for _ in 0..1000 {
            let rows: Vec<Vec<i64>> = (0..16)
                .map(|_| (0..16).map(|_| rng.below(201) as i64 - 100).collect())
                .collect();
            let mut m = IntMat::from_rows(&rows);
            let before: i128 = (0..16).map(|i| m.row_norm2(i)).sum();
            polish(&mut m);
            let after: i128 = (0..16).map(|i| m.row_norm2(i)).sum();
            assert!(after <= before);
        }
    }

    #[test]
    fn round_div_cases() {
        assert_eq!(round_div(20, 17), 1);
        assert_eq!(round_div(-20, 17), -1);
        assert_eq!(round_div(8, 16), 1); // tie, toward +inf
        assert_eq!(round_div(7, 16), 0);
        assert_eq!(round_div(-8, 16), 0); // tie, toward +inf
    }
}
