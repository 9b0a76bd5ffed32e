//! q-ary embedding lattices and the interleaved reduction controller.
//!
//! An `m x n` sample matrix `A` is embedded as the `(m+n) x (m+n)` basis
//!
//! ```text
//!   [ 0          q*I_n ]
//!   [ omega*I_m  A     ]
//! ```
//!
//! Any row of a reduced basis has the shape `[omega*R | R*A + q*C]`, so the
//! operator `R` is read off the left block and `R*A mod q` off the right.
//! The controller alternates a fast LLL-class reducer with BKZ tours,
//! switching whenever three consecutive loops of the active reducer make
//! less than 0.001 of rho progress, polishing after every loop, and
//! tightening `(beta, delta)` once rho crosses a midpoint checkpoint.

mod bkz;
mod gso;
mod lll;
mod mat;
mod polish;

pub use bkz::{bkz_tour, BkzOutcome, MAX_BLOCK};
pub use gso::Gso;
pub use lll::{lll_reduce, LllStats};
pub use mat::IntMat;
pub use polish::{polish, PolishStats};

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::clock::Clock;
use crate::modq::Modulus;

/// Precision contract for the f64 Gram-Schmidt backend.
pub const MAX_REDUCE_MODULUS: u64 = 1 << 40;
pub const MAX_REDUCE_DIM: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    Param(&'static str),
    Precision(&'static str),
    Overflow(&'static str),
    Internal(&'static str),
    TimeBudget,
}

impl core::fmt::Display for LatticeError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LatticeError::Param(m) => write!(f, "invalid reduction parameters: {m}"),
            LatticeError::Precision(m) => write!(f, "numeric precision failure: {m}"),
            LatticeError::Overflow(m) => write!(f, "integer overflow: {m}"),
            LatticeError::Internal(m) => write!(f, "internal invariant violated: {m}"),
            LatticeError::TimeBudget => {
                write!(f, "time budget exhausted before any reduction loop completed")
            }
        }
    }
}

impl core::error::Error for LatticeError {}

/// The embedding basis plus the layout parameters needed for extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingLattice {
    pub basis: IntMat,
    pub omega: u64,
    pub m: usize,
    pub n: usize,
    pub q: Modulus,
}

/// Builds the initial `[[0, qI], [omega I, A]]` embedding.
pub fn build_lambda(
    a_sub: &[u64],
    m: usize,
    n: usize,
    q: Modulus,
    omega: u64,
) -> Result<EmbeddingLattice, LatticeError> {
    if m == 0 || n == 0 || m > n {
        return Err(LatticeError::Param("need 1 <= m <= n"));
    }
    if a_sub.len() != m * n {
        return Err(LatticeError::Param("A_sub shape mismatch"));
    }
    if omega == 0 {
        return Err(LatticeError::Param("omega must be >= 1"));
    }
    if a_sub.iter().any(|&x| x >= q.get()) {
        return Err(LatticeError::Param("A_sub entries must be canonical residues"));
    }
    let d = m + n;
    let mut basis = IntMat::zeros(d, d);
    for i in 0..n {
        basis.row_mut(i)[m + i] = q.get() as i64;
    }
    for j in 0..m {
        let row = basis.row_mut(n + j);
        row[j] = omega as i64;
        for c in 0..n {
            row[m + c] = a_sub[j * n + c] as i64;
        }
    }
    Ok(EmbeddingLattice { basis, omega, m, n, q })
}

/// The extracted reduction operator and its transformed rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionResult {
    /// Row-major `m' x m` integer operator (zero rows dropped).
    pub r: Vec<i64>,
    /// Row-major `m' x n` canonical residues, `RA = R*A mod q` exactly.
    pub ra: Vec<u64>,
    pub kept_rows: usize,
    pub m: usize,
    pub n: usize,
    pub rho: f64,
    /// Max row sup-norm of `R` over `q`.
    pub r_ratio: f64,
    pub loop_log: Vec<LoopLogEntry>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReducerId {
    Lll,
    Bkz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Stagnation,
    LoopCap,
    TimeBudget,
    NotRun,
}

/// One controller loop: reducer pass plus polish, with rho bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopLogEntry {
    pub loop_index: usize,
    pub reducer: ReducerId,
    /// rho after the loop's polish.
    pub rho: f64,
    /// Change versus the previous loop's rho.
    pub delta_rho: f64,
    /// rho after the reducer pass but before polish.
    pub rho_pre_polish: f64,
    pub seconds: f64,
    /// False when a BKZ tour was cut short by the enumeration node cap.
    pub complete: bool,
}

/// Reduction schedule: start/end parameters, switch rule, polish, and
/// budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionSchedule {
    pub beta1: usize,
    pub beta2: usize,
    pub delta1: f64,
    pub delta2: f64,
    /// Loops per stagnation window.
    pub switch_window: usize,
    /// Switch when the window's total delta-rho exceeds this (i.e. less
    /// progress than 0.001 of rho).
    pub switch_threshold: f64,
    pub polish_each_loop: bool,
    pub max_loops: usize,
    /// Seconds; inf disables the budget.
    pub time_budget: f64,
    /// Tighten `(beta, delta)` from stage 1 to stage 2 once rho crosses
    /// below this midpoint checkpoint.
    pub tighten_rho: f64,
    pub enum_node_cap: u64,
}

impl ReductionSchedule {
    /// Desk-scale defaults: blocks 4 -> 8, delta 0.96 -> 0.99.
    pub fn desk() -> Self {
        ReductionSchedule {
            beta1: 4,
            beta2: 8,
            delta1: 0.96,
            delta2: 0.99,
            switch_window: 3,
            switch_threshold: -0.001,
            polish_each_loop: true,
            max_loops: 24,
            time_budget: f64::INFINITY,
            tighten_rho: 0.85,
            enum_node_cap: 1 << 22,
        }
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if self.beta1 > self.beta2 || self.beta1 < 2 || self.beta2 > MAX_BLOCK {
            return Err(LatticeError::Param("block sizes must satisfy 2 <= beta1 <= beta2 <= 12"));
        }
        for d in [self.delta1, self.delta2] {
            if !(d > 0.25 && d < 1.0) {
                return Err(LatticeError::Param("delta must lie in (0.25, 1)"));
            }
        }
        if self.switch_window == 0 || self.max_loops == 0 {
            return Err(LatticeError::Param("window and loop cap must be positive"));
        }
        Ok(())
    }
}

/// Mean over rows of the standard deviation of centered entries.
fn mean_row_std(rows: &[u64], n: usize, q: Modulus) -> f64 {
    assert!(n > 0 && rows.len() % n == 0);
    let count = rows.len() / n;
    if count == 0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..count {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for &x in &rows[i * n..(i + 1) * n] {
            let c = q.center(x) as f64;
            sum += c;
            sum2 += c * c;
        }
        let mean = sum / n as f64;
        let var = (sum2 / n as f64 - mean * mean).max(0.0);
        acc += libm::sqrt(var);
    }
    acc / count as f64
}

/// Reduction strength `sigma(RA) / sigma(A_ref)` (smaller is stronger).
pub fn rho(ra: &[u64], a_ref: &[u64], n: usize, q: Modulus) -> Result<f64, LatticeError> {
    if ra.is_empty() || a_ref.is_empty() {
        return Err(LatticeError::Param("rho inputs must be nonempty"));
    }
    let denom = mean_row_std(a_ref, n, q);
    if denom == 0.0 {
        return Err(LatticeError::Param("rho reference has zero deviation"));
    }
    Ok(mean_row_std(ra, n, q) / denom)
}

/// Reads `(R, RA)` off a reduced basis: left block over omega, right block
/// mod q; rows with `R = 0` are dropped.
pub fn extract_r(
    lat: &EmbeddingLattice,
    reduced: &IntMat,
) -> Result<ReductionResult, LatticeError> {
    let (m, n, q) = (lat.m, lat.n, lat.q);
    if reduced.cols() != m + n {
        return Err(LatticeError::Param("reduced basis has wrong width"));
    }
    let omega = lat.omega as i64;
    let mut r = Vec::new();
    let mut ra = Vec::new();
    let mut max_sup: u64 = 0;
    let mut kept = 0usize;
    for i in 0..reduced.rows() {
        let row = reduced.row(i);
        let left = &row[..m];
        if left.iter().all(|&x| x == 0) {
            continue;
        }
        for &x in left {
            if x % omega != 0 {
                return Err(LatticeError::Internal("left block not divisible by omega"));
            }
        }
        kept += 1;
        for &x in left {
            let ri = x / omega;
            max_sup = max_sup.max(ri.unsigned_abs());
            r.push(ri);
        }
        for &x in &row[m..] {
            ra.push(q.canonical(x));
        }
    }
    if kept < m || kept > m + n {
        return Err(LatticeError::Internal("kept row count outside [m, m+n]"));
    }
    Ok(ReductionResult {
        r,
        ra,
        kept_rows: kept,
        m,
        n,
        rho: f64::NAN,
        r_ratio: max_sup as f64 / q.get() as f64,
        loop_log: Vec::new(),
        termination: Termination::NotRun,
    })
}

/// rho of the current basis state against the reference deviation.
fn rho_of_basis(lat: &EmbeddingLattice, basis: &IntMat, sigma_ref: f64) -> f64 {
    let (m, n, q) = (lat.m, lat.n, lat.q);
    let mut acc = 0.0;
    let mut kept = 0usize;
    for i in 0..basis.rows() {
        let row = basis.row(i);
        if row[..m].iter().all(|&x| x == 0) {
            continue;
        }
        kept += 1;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for &x in &row[m..] {
            let c = q.center(q.canonical(x)) as f64;
            sum += c;
            sum2 += c * c;
        }
        let mean = sum / n as f64;
        let var = (sum2 / n as f64 - mean * mean).max(0.0);
        acc += libm::sqrt(var);
    }
    if kept == 0 {
        return f64::NAN;
    }
    (acc / kept as f64) / sigma_ref
}

/// Full controller: interleaved LLL/BKZ loops with polish, stagnation
/// switching, midpoint tightening, and budget/loop-cap termination.
pub fn reduce_matrix(
    a_sub: &[u64],
    m: usize,
    n: usize,
    q: Modulus,
    omega: u64,
    schedule: &ReductionSchedule,
    clock: &dyn Clock,
) -> Result<ReductionResult, LatticeError> {
    schedule.validate()?;
    if q.get() > MAX_REDUCE_MODULUS {
        return Err(LatticeError::Precision("modulus above 2^40 precision contract"));
    }
    if m + n > MAX_REDUCE_DIM {
        return Err(LatticeError::Precision("dimension above 256 precision contract"));
    }
    let lat = build_lambda(a_sub, m, n, q, omega)?;
    let sigma_ref = mean_row_std(a_sub, n, q);
    if sigma_ref == 0.0 {
        return Err(LatticeError::Param("reference matrix has zero deviation"));
    }
    let mut basis = lat.basis.clone();
    let d = basis.rows();
    let mut gso = Gso::with_capacity(d, d);

    let t0 = clock.now();
    let mut log: Vec<LoopLogEntry> = Vec::new();
    let mut rho_prev = rho_of_basis(&lat, &basis, sigma_ref);
    let mut active = ReducerId::Lll;
    let mut beta = schedule.beta1;
    let mut delta = schedule.delta1;
    let mut tightened = false;
    let mut window: Vec<f64> = Vec::new();
    let mut other_stagnant = false;
    let mut termination = Termination::LoopCap;

    for loop_index in 1..=schedule.max_loops {
        if clock.now() - t0 > schedule.time_budget {
            if log.is_empty() {
                return Err(LatticeError::TimeBudget);
            }
            termination = Termination::TimeBudget;
            break;
        }
        let loop_t0 = clock.now();
        let complete = match active {
            ReducerId::Lll => {
                lll::lll_prefix(&mut basis, delta, d, &mut gso)?;
                true
            }
            ReducerId::Bkz => bkz_tour(&mut basis, beta, delta, schedule.enum_node_cap)?.complete,
        };
        let rho_pre_polish = rho_of_basis(&lat, &basis, sigma_ref);
        if schedule.polish_each_loop {
            polish(&mut basis);
        }
        let rho_now = rho_of_basis(&lat, &basis, sigma_ref);
        let delta_rho = rho_now - rho_prev;
        log.push(LoopLogEntry {
            loop_index,
            reducer: active,
            rho: rho_now,
            delta_rho,
            rho_pre_polish,
            seconds: clock.now() - loop_t0,
            complete,
        });
        rho_prev = rho_now;

        if !tightened && rho_now < schedule.tighten_rho {
            beta = schedule.beta2;
            delta = schedule.delta2;
            tightened = true;
        }
        if delta_rho <= schedule.switch_threshold {
            // Real progress clears the other reducer's stagnation memory.
            other_stagnant = false;
        }
        window.push(delta_rho);
        if window.len() >= schedule.switch_window {
            let recent: f64 =
                window[window.len() - schedule.switch_window..].iter().sum();
            if recent > schedule.switch_threshold {
                if other_stagnant {
                    termination = Termination::Stagnation;
                    break;
                }
                other_stagnant = true;
                active = match active {
                    ReducerId::Lll => ReducerId::Bkz,
                    ReducerId::Bkz => ReducerId::Lll,
                };
                window.clear();
            }
        }
    }

    let mut result = extract_r(&lat, &basis)?;
    result.rho = rho(&result.ra, a_sub, n, q)?;
    result.loop_log = log;
    result.termination = termination;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::NullClock;
    use crate::modq::mod_dot;
    use crate::rng::{stream, Stream};

    fn random_a(rng: &mut Stream, m: usize, n: usize, q: u64) -> Vec<u64> {
        (0..m * n).map(|_| rng.below(q)).collect()
    }

    #[test]
    fn lambda_layout_tiny() {
        let q = Modulus::new(7).unwrap();
        let lat = build_lambda(&[3], 1, 1, q, 2).unwrap();
        assert_eq!(lat.basis.rows(), 2);
        assert_eq!(lat.basis.row(0), &[0, 7]);
        assert_eq!(lat.basis.row(1), &[2, 3]);
    }

    #[test]
    fn lambda_dimensions_and_errors() {
        let q = Modulus::new(1_048_573).unwrap();
        let mut rng = Stream::new(1, stream::MATRIX);
        let a = random_a(&mut rng, 4, 8, q.get());
        let lat = build_lambda(&a, 4, 8, q, 10).unwrap();
        assert_eq!(lat.basis.rows(), 12);
        assert_eq!(lat.basis.cols(), 12);
        assert!(build_lambda(&a, 8, 4, q, 10).is_err());
        assert!(build_lambda(&a, 4, 8, q, 0).is_err());
    }

    #[test]
    fn extract_unreduced_identity() {
        let q = Modulus::new(1009).unwrap();
        let mut rng = Stream::new(2, stream::MATRIX);
        let a = random_a(&mut rng, 3, 5, q.get());
        let lat = build_lambda(&a, 3, 5, q, 10).unwrap();
        let res = extract_r(&lat, &lat.basis).unwrap();
        // Top n rows have R = 0 and are dropped; bottom m rows give R = I.
        assert_eq!(res.kept_rows, 3);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(res.r[i * 3 + j], i64::from(i == j));
            }
            for c in 0..5 {
                assert_eq!(res.ra[i * 5 + c], a[i * 5 + c]);
            }
        }
        assert_eq!(rho(&res.ra, &a, 5, q).unwrap(), 1.0);
    }

    #[test]
    fn rho_trivial_values() {
        let q = Modulus::new(101).unwrap();
        let a = alloc::vec![5u64, 50, 77, 3, 20, 98];
        assert_eq!(rho(&a.clone(), &a, 3, q).unwrap(), 1.0);
        let zeros = alloc::vec![0u64; 6];
        assert_eq!(rho(&zeros, &a, 3, q).unwrap(), 0.0);
        assert!(rho(&a, &zeros, 3, q).is_err());
    }

    #[test]
    fn reduce_matrix_exactness_small() {
        // RA == R*A mod q for every kept row, on a small seeded instance.
        let q = Modulus::new(65_521).unwrap();
        let mut rng = Stream::new(3, stream::MATRIX);
        let (m, n) = (8usize, 12usize);
        let a = random_a(&mut rng, m, n, q.get());
        let sched = ReductionSchedule { max_loops: 8, ..ReductionSchedule::desk() };
        let res = reduce_matrix(&a, m, n, q, 10, &sched, &NullClock).unwrap();
        assert!(res.kept_rows >= m && res.kept_rows <= m + n);
        for i in 0..res.kept_rows {
            for c in 0..n {
                // (R*A)_{ic} mod q via exact i128.
                let mut acc: i128 = 0;
                for j in 0..m {
                    acc += res.r[i * m + j] as i128 * a[j * n + c] as i128;
                }
                let want = acc.rem_euclid(q.get() as i128) as u64;
                assert_eq!(res.ra[i * n + c], want);
            }
        }
        // Quality should improve markedly at this easy scale.
        assert!(res.rho < 0.85, "rho {}", res.rho);
        // Consistency with mod_dot on a ternary probe.
        let s: Vec<i8> = (0..n).map(|i| [(0), 1, -1][i % 3]).collect();
        let row0 = &res.ra[..n];
        let _ = mod_dot(row0, &s, q);
    }

    #[test]
    fn reduce_matrix_rejects_oversize() {
        let q = Modulus::new((1u64 << 41) + 9).unwrap_or_else(|_| Modulus::new(3).unwrap());
        let _ = q;
        let big = Modulus::new((1u64 << 40) + 27);
        if let Ok(q) = big {
            let a = alloc::vec![1u64; 4];
            let err = reduce_matrix(&a, 2, 2, q, 10, &ReductionSchedule::desk(), &NullClock);
            assert!(matches!(err, Err(LatticeError::Precision(_))));
        }
    }

    #[test]
    fn reduce_matrix_time_budget_error() {
        struct FastClock(core::cell::Cell<f64>);
        impl Clock for FastClock {
            fn now(&self) -> f64 {
                let t = self.0.get();
                self.0.set(t + 100.0);
                t
            }
        }
        let q = Modulus::new(65_521).unwrap();
        let mut rng = Stream::new(4, stream::MATRIX);
        let a = random_a(&mut rng, 4, 6, q.get());
        let sched = ReductionSchedule { time_budget: 1.0, ..ReductionSchedule::desk() };
        let err = reduce_matrix(&a, 4, 6, q, 10, &sched, &FastClock(core::cell::Cell::new(0.0)));
        assert!(matches!(err, Err(LatticeError::TimeBudget)));
    }

    #[test]
    fn polish_step_never_raises_rho_at_desk_scale() {
        let q = Modulus::new(1_048_573).unwrap();
        let mut rng = Stream::new(5, stream::MATRIX);
        let (m, n) = (64usize, 64usize);
        let a = random_a(&mut rng, m, n, q.get());
        let res =
            reduce_matrix(&a, m, n, q, 10, &ReductionSchedule::desk(), &NullClock).unwrap();
        assert!(res.rho < 0.85, "rho {}", res.rho);
        for e in &res.loop_log {
            assert!(
                e.rho <= e.rho_pre_polish + 1e-12,
                "polish raised rho at loop {}",
                e.loop_index
            );
        }
        // First loop does the bulk of the work from the rho = 1 baseline.
        assert!(res.loop_log[0].delta_rho < -0.5);
    }
}
