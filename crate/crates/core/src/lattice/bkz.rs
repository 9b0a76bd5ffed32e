//! Block-reduction tour: exact enumeration of the projected shortest
//! vector in each block, unimodular insertion, local re-LLL.
//!
//! Blocks are capped at size 12, where Schnorr-Euchner enumeration on an
//! LLL-reduced block is cheap. A found vector `v = sum x_i b_i` (with
//! primitive `x`) is worked into the basis by Euclidean row operations on
//! the block, which keeps every transform integer and invertible without
//! any rank-deficient intermediate state.

use alloc::vec::Vec;

use super::gso::Gso;
use super::lll::lll_prefix;
use super::mat::{row_sub_mul, IntMat};
use super::LatticeError;

pub const MAX_BLOCK: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BkzOutcome {
    pub inserted: usize,
    /// False when a block hit the enumeration node cap and the tour was
    /// abandoned early (partial-tour warning).
    pub complete: bool,
}

enum EnumResult {
    Found(Vec<i64>),
    None,
    Capped,
}

/// One full tour over all blocks `[k, min(k+beta, d))`.
pub fn bkz_tour(
    m: &mut IntMat,
    block_size: usize,
    delta: f64,
    node_cap: u64,
) -> Result<BkzOutcome, LatticeError> {
    assert!(
        (2..=MAX_BLOCK).contains(&block_size),
        "block size {block_size} outside supported range 2..=12"
    );
    let rows = m.rows();
    let mut gso = Gso::with_capacity(rows, m.cols());
    lll_prefix(m, delta, rows, &mut gso)?;
    let mut outcome = BkzOutcome { inserted: 0, complete: true };
    if rows < 2 {
        return Ok(outcome);
    }
    for k in 0..rows - 1 {
        let end = (k + block_size).min(rows);
        gso.recompute(m, rows)?;
        // Insert only on a strict delta-improvement over b*_k; this makes
        // beta=2 tours exactly idle on an LLL(delta) fixpoint.
        let radius2 = delta * gso.bnorm[k];
        match enumerate_block(&gso, k, end, radius2, node_cap) {
            EnumResult::Found(x) => {
                let backup = m.clone();
                let ok = insert_block_vector(m, k, &x)
                    .and_then(|_| lll_prefix(m, delta, end, &mut gso).map(|_| ()));
                match ok {
                    Ok(()) => outcome.inserted += 1,
                    Err(_) => *m = backup, // revert and skip the block
                }
            }
            EnumResult::None => {}
            EnumResult::Capped => {
                outcome.complete = false;
                break;
            }
        }
    }
    Ok(outcome)
}

/// Schnorr-Euchner enumeration over the block `[begin, end)` of the GSO:
/// finds integer coefficients `x != 0` minimizing the projected norm
/// `|| pi_begin(sum x_i b_{begin+i}) ||^2`, returning the best strictly
/// inside `radius2`.
fn enumerate_block(
    gso: &Gso,
    begin: usize,
    end: usize,
    radius2: f64,
    node_cap: u64,
) -> EnumResult {
    let dim = end - begin;
    debug_assert!(dim >= 1);
    let mut x = alloc::vec![0i64; dim];
    let mut x0 = alloc::vec![0i64; dim];
    let mut center = alloc::vec![0.0f64; dim];
    let mut trial = alloc::vec![0u32; dim];
    let mut dir = alloc::vec![1i64; dim];
    // partial[i] = squared norm contributed by levels > i-1 (partial[dim] = 0).
    let mut partial = alloc::vec![0.0f64; dim + 1];

    let mut best: Option<(f64, Vec<i64>)> = None;
    let mut radius = radius2;
    let mut nodes: u64 = 0;
    let mut level = dim - 1;

    // Zigzag offsets: 0, d, -d, 2d, -2d, ... with d the side of the center;
    // this visits candidates in non-decreasing distance from the center.
    #[inline]
    fn offset(trial: u32, dir: i64) -> i64 {
        if trial == 0 {
            0
        } else if trial % 2 == 1 {
            dir * ((trial as i64 + 1) / 2)
        } else {
            -dir * (trial as i64 / 2)
        }
    }

    loop {
        nodes += 1;
        if nodes > node_cap {
            return EnumResult::Capped;
        }
        let cand = x0[level] + offset(trial[level], dir[level]);
        let diff = cand as f64 - center[level];
        let norm_here = partial[level + 1] + diff * diff * gso.bnorm[begin + level];
        if norm_here < radius {
            trial[level] += 1;
            x[level] = cand;
            if level == 0 {
                if x.iter().any(|&v| v != 0) {
                    radius = norm_here;
                    best = Some((norm_here, x.clone()));
                }
            } else {
                partial[level] = norm_here;
                level -= 1;
                let mut c = 0.0;
                for j in level + 1..dim {
                    c -= x[j] as f64 * gso.mu(begin + j, begin + level);
                }
                center[level] = c;
                let rounded = libm::round(c);
                x0[level] = rounded as i64;
                dir[level] = if c >= rounded { 1 } else { -1 };
                trial[level] = 0;
            }
        } else {
            // Candidates at this level come in non-decreasing distance, so
            // the level is exhausted.
            if level == dim - 1 {
                break;
            }
            level += 1;
        }
    }
    match best {
        Some((_, x)) => EnumResult::Found(x),
        None => EnumResult::None,
    }
}

/// Works the lattice vector `v = sum x_i b_{begin+i}` into the basis so it
/// ends up at row `begin`, via unimodular row operations only.
///
/// Euclidean reduction on the coefficient vector: a row op
/// `b_r <- b_r + c*b_p` rewrites the coefficients as `x_p <- x_p - c*x_r`.
/// For primitive `x` this terminates with a single coefficient of +-1, at
/// which point that row *is* (+-) `v`; it is then rotated to `begin`.
fn insert_block_vector(m: &mut IntMat, begin: usize, coeffs: &[i64]) -> Result<(), LatticeError> {
    let dim = coeffs.len();
    let mut x = coeffs.to_vec();
    // Exact value of v for the final invariant check.
    let cols = m.cols();
    let mut v = alloc::vec![0i128; cols];
    for (i, &xi) in x.iter().enumerate() {
        for (c, &b) in m.row(begin + i).iter().enumerate() {
            v[c] += xi as i128 * b as i128;
        }
    }

    loop {
        let nz: Vec<usize> = (0..dim).filter(|&i| x[i] != 0).collect();
        match nz.len() {
            0 => return Err(LatticeError::Internal("zero insertion vector")),
            1 => {
                let p = nz[0];
                if x[p].abs() != 1 {
                    return Err(LatticeError::Internal("non-primitive insertion vector"));
                }
                // Row begin+p now equals +-v; rotate it up to `begin`.
                for r in (begin + 1..=begin + p).rev() {
                    m.swap_rows(r, r - 1);
                }
                let got: Vec<i128> =
                    m.row(begin).iter().map(|&b| b as i128 * x[p] as i128).collect();
                if got != v {
                    return Err(LatticeError::Internal("insertion invariant violated"));
                }
                return Ok(());
            }
            _ => {
                // Reduce the largest coefficient against the smallest.
                let &r = nz.iter().min_by_key(|&&i| x[i].unsigned_abs()).unwrap();
                let &p = nz.iter().filter(|&&i| i != r).max_by_key(|&&i| x[i].unsigned_abs()).unwrap();
                let c = rounded_quotient(x[p], x[r]);
                if c == 0 {
                    return Err(LatticeError::Internal("stalled coefficient reduction"));
                }
                {
                    let (src, dst) = m.row_pair_mut(begin + p, begin + r);
                    if !row_sub_mul(dst, src, -c) {
                        return Err(LatticeError::Overflow("row overflow in block insertion"));
                    }
                }
                x[p] -= c * x[r];
            }
        }
    }
}

#[inline]
fn rounded_quotient(a: i64, b: i64) -> i64 {
    debug_assert!(b != 0);
    let q = a as i128;
    let d = b as i128;
    let quot = q.div_euclid(d);
    let rem = q.rem_euclid(d);
    let half = d.unsigned_abs().div_ceil(2);
    if rem.unsigned_abs() >= half && rem != 0 {
        (quot + d.signum()) as i64
    } else {
        quot as i64
    }
}
