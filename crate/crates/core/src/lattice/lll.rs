//! LLL reduction with floating-point GSO and exact integer row operations.
//!
//! The output is size-reduced (`|mu_ij| <= 1/2`) and satisfies the Lovász
//! condition with the given `delta` on every consecutive pair. Swaps and
//! size reductions update the GSO incrementally; a full recompute runs
//! periodically and before the final verification pass to wash out f64
//! drift.

use super::gso::Gso;
use super::mat::{row_sub_mul, IntMat};
use super::LatticeError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LllStats {
    pub swaps: usize,
    pub size_reductions: usize,
}

/// Iterations between defensive full GSO recomputes.
const RECOMPUTE_PERIOD: usize = 4096;
/// Hard cap on main-loop iterations; hitting it means f64 precision is
/// insufficient for the input.
const ITERATION_CAP: usize = 50_000_000;
/// Verification slack on |mu| <= 1/2 after the final recompute.
const MU_TOL: f64 = 1e-9;

pub fn lll_reduce(m: &mut IntMat, delta: f64) -> Result<LllStats, LatticeError> {
    let rows = m.rows();
    let mut gso = Gso::with_capacity(rows, m.cols());
    lll_prefix(m, delta, rows, &mut gso)
}

/// LLL over the first `upto` rows only; rows at and beyond `upto` are
/// untouched. Used by BKZ to clean up after block insertions.
pub fn lll_prefix(
    m: &mut IntMat,
    delta: f64,
    upto: usize,
    gso: &mut Gso,
) -> Result<LllStats, LatticeError> {
    assert!(
        delta > 0.25 && delta < 1.0,
        "Lovász delta {delta} outside (0.25, 1)"
    );
    let mut stats = LllStats::default();
    if upto < 2 {
        return Ok(stats);
    }

    // Up to three passes: the later ones re-verify on a fresh GSO.
    for _pass in 0..3 {
        gso.recompute(m, upto)?;
        let mut k = 1usize;
        let mut iters = 0usize;
        let mut since_recompute = 0usize;
        while k < upto {
            iters += 1;
            if iters > ITERATION_CAP {
                return Err(LatticeError::Precision("LLL iteration cap exceeded"));
            }
            size_reduce_row(m, gso, k, &mut stats)?;
            let lhs = gso.bnorm[k];
            let mu = gso.mu(k, k - 1);
            if lhs >= (delta - mu * mu) * gso.bnorm[k - 1] {
                k += 1;
            } else {
                swap_update(m, gso, k)?;
                stats.swaps += 1;
                since_recompute += 1;
                if since_recompute >= RECOMPUTE_PERIOD {
                    gso.recompute(m, upto)?;
                    since_recompute = 0;
                }
                k = k.saturating_sub(1).max(1);
            }
        }
        // Verify on a fresh GSO; accept or run another pass.
        gso.recompute(m, upto)?;
        if verify_reduced(gso, delta, upto) {
            return Ok(stats);
        }
    }
    Err(LatticeError::Precision("LLL postconditions unmet after retries"))
}

fn verify_reduced(gso: &Gso, delta: f64, upto: usize) -> bool {
    for i in 1..upto {
        for j in 0..i {
            if gso.mu(i, j).abs() > 0.5 + MU_TOL {
                return false;
            }
        }
        let mu = gso.mu(i, i - 1);
        if gso.bnorm[i] < (delta - mu * mu) * gso.bnorm[i - 1] * (1.0 - 1e-12) {
            return false;
        }
    }
    true
}

/// Size-reduces row `k` against rows `k-1 .. 0`, updating `mu` row `k`
/// in place (the orthogonalized vectors are unchanged by these ops).
fn size_reduce_row(
    m: &mut IntMat,
    gso: &mut Gso,
    k: usize,
    stats: &mut LllStats,
) -> Result<(), LatticeError> {
    for j in (0..k).rev() {
        let mu_kj = gso.mu(k, j);
        if !mu_kj.is_finite() {
            return Err(LatticeError::Precision("non-finite mu in size reduction"));
        }
        if mu_kj.abs() <= 0.5 {
            continue;
        }
        let r_f = libm::round(mu_kj);
        if r_f.abs() >= 9.0e18 {
            return Err(LatticeError::Precision("size-reduction coefficient overflow"));
        }
        let r = r_f as i64;
        {
            let (src, dst) = m.row_pair_mut(j, k);
            if !row_sub_mul(dst, src, r) {
                return Err(LatticeError::Overflow("row entry overflow in size reduction"));
            }
        }
        stats.size_reductions += 1;
        for c in 0..j {
            let mu_jc = gso.mu(j, c);
            *gso.mu_mut(k, c) -= r_f * mu_jc;
        }
        *gso.mu_mut(k, j) -= r_f;
    }
    Ok(())
}

/// Swaps rows `k-1` and `k` and patches the GSO state (classic O(n)
/// update).
fn swap_update(m: &mut IntMat, gso: &mut Gso, k: usize) -> Result<(), LatticeError> {
    let nu = gso.mu(k, k - 1);
    let b_k = gso.bnorm[k];
    let b_km1 = gso.bnorm[k - 1];
    let b_new = b_k + nu * nu * b_km1;
    if !(b_new.is_finite()) || b_new <= 0.0 {
        return Err(LatticeError::Precision("degenerate norm in swap"));
    }
    let mu_new = nu * b_km1 / b_new;
    gso.bnorm[k] = b_km1 * b_k / b_new;
    gso.bnorm[k - 1] = b_new;
    m.swap_rows(k - 1, k);
    for j in 0..k - 1 {
        let a = gso.mu(k - 1, j);
        let b = gso.mu(k, j);
        *gso.mu_mut(k - 1, j) = b;
        *gso.mu_mut(k, j) = a;
    }
    for i in k + 1..gso.dim {
        let t = gso.mu(i, k);
        let new_ik = gso.mu(i, k - 1) - nu * t;
        *gso.mu_mut(i, k) = new_ik;
        *gso.mu_mut(i, k - 1) = t + mu_new * new_ik;
    }
    *gso.mu_mut(k, k - 1) = mu_new;
    Ok(())
}

#[cfg(test)]
mod tests {
    use alloc::vec::Vec;

    use super::*;
    use crate::rng::{stream, Stream};

    fn exhaustive_shortest_2d(rows: [[i64; 2]; 2], range: i64) -> i128 {
        let mut best = i128::MAX;
        for a in -range..=range {
            for b in -range..=range {
                if a == 0 && b == 0 {
                    continue;
                }
                let x = a * rows[0][0] + b * rows[1][0];
                let y = a * rows[0][1] + b * rows[1][1];
                let n = x as i128 * x as i128 + y as i128 * y as i128;
                best = best.min(n);
            }
        }
        best
    }

    #[test]
    fn identity_unchanged() {
        let mut m = IntMat::from_rows(&[
            alloc::vec![1, 0, 0],
            alloc::vec![0, 1, 0],
            alloc::vec![0, 0, 1],
        ]);
        let before = m.clone();
        lll_reduce(&mut m, 0.99).unwrap();
        assert_eq!(m, before);
    }

    #[test]
    fn finds_shortest_in_reference_2d_case() {
        let rows = [[201i64, 37], [1648, 297]];
        let mut m = IntMat::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]);
        lll_reduce(&mut m, 0.99).unwrap();
        let want = exhaustive_shortest_2d(rows, 60);
        let got = m.row_norm2(0).min(m.row_norm2(1));
        assert_eq!(got, want, "first minimum mismatch");
    }

    #[test]
    fn random_bases_are_size_reduced() {
        let mut rng = Stream::new(41, stream::MATRIX);
        for _ in 0..50 {
            let rows: Vec<Vec<i64>> = (0..8)
                .map(|_| (0..8).map(|_| rng.below(2001) as i64 - 1000).collect())
                .collect();
            let mut m = IntMat::from_rows(&rows);
            if lll_reduce(&mut m, 0.99).is_err() {
                continue; // degenerate random basis
            }
            let mut gso = Gso::with_capacity(8, 8);
            gso.recompute(&m, 8).unwrap();
            for i in 1..8 {
                for j in 0..i {
                    assert!(gso.mu(i, j).abs() <= 0.5 + 1e-9, "mu {}", gso.mu(i, j));
                }
                let mu = gso.mu(i, i - 1);
                assert!(gso.bnorm[i] >= (0.99 - mu * mu) * gso.bnorm[i - 1] * (1.0 - 1e-9));
            }
        }
    }

    #[test]
    fn preserves_lattice_determinant() {
        // |det| is invariant under unimodular row ops; check on a 4x4.
        let mut rng = Stream::new(43, stream::MATRIX);
        let rows: Vec<Vec<i64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.below(41) as i64 - 20).collect())
            .collect();
        let det_before = det4(&rows);
        if det_before == 0 {
            return;
        }
        let mut m = IntMat::from_rows(&rows);
        lll_reduce(&mut m, 0.75).unwrap();
        let after: Vec<Vec<i64>> = (0..4).map(|i| m.row(i).to_vec()).collect();
        assert_eq!(det4(&after).abs(), det_before.abs());
    }

    fn det4(rows: &[Vec<i64>]) -> i128 {
        // Laplace expansion; fine for 4x4 test sizes.
        fn det_rec(m: &[Vec<i128>]) -> i128 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut acc = 0i128;
            for (j, &lead) in m[0].iter().enumerate() {
                if lead == 0 {
                    continue;
                }
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                acc += sign * lead * det_rec(&minor);
            }
            acc
        }
        let wide: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        det_rec(&wide)
    }
}
