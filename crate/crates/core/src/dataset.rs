//! Training-set assembly: subsampling, applying reduction operators,
//! synthetic reduction-like rows, and multi-secret token tagging.
//!
//! A training record is a reduced row (canonical residues) with a target
//! residue, optionally tagged with a secret-token id for multi-secret
//! pre-training. Targets are always recomputed from the raw `b` through
//! the exact integer operator `R`, never cached.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::lattice::ReductionResult;
use crate::lwe::{SampleSet, Secret};
use crate::modq::Modulus;
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetSource {
    Reduced,
    Synthetic,
}

/// Provenance carried alongside a training set (and duplicated in the
/// JSON sidecar when persisted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub n: u32,
    pub q: u64,
    pub rho: f64,
    pub source: SetSource,
    pub seed: u64,
    pub secret_ids: Vec<u32>,
}

/// Rows, targets, and optional per-record secret-token ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSet {
    /// Row-major `len x n` canonical residues.
    pub rows: Vec<u64>,
    pub targets: Vec<u64>,
    pub token_ids: Option<Vec<u16>>,
    pub n: usize,
    pub meta: TrainMeta,
}

impl TrainSet {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.n..(i + 1) * self.n]
    }

    pub fn validate(&self, q: Modulus) -> Result<(), DatasetError> {
        if self.rows.len() != self.targets.len() * self.n {
            return Err(DatasetError::Shape("rows/targets length mismatch"));
        }
        if let Some(t) = &self.token_ids {
            if t.len() != self.targets.len() {
                return Err(DatasetError::Shape("token id length mismatch"));
            }
        }
        if self.rows.iter().chain(self.targets.iter()).any(|&x| x >= q.get()) {
            return Err(DatasetError::Shape("entry out of canonical range"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetError {
    Shape(&'static str),
    Index(String),
}

impl core::fmt::Display for DatasetError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            DatasetError::Shape(m) => write!(f, "shape error: {m}"),
            DatasetError::Index(m) => write!(f, "index bookkeeping mismatch: {m}"),
        }
    }
}

impl core::error::Error for DatasetError {}

/// `m` distinct sample indices drawn without replacement, plus the
/// selected rows of `A` and entries of `b`.
pub fn subsample(
    samples: &SampleSet,
    m: usize,
    seed: u64,
) -> Result<(Vec<u32>, Vec<u64>, Vec<u64>), DatasetError> {
    let t = samples.params.t;
    let n = samples.params.n;
    if m > t {
        return Err(DatasetError::Index(alloc::format!("m={m} exceeds t={t}")));
    }
    let mut rng = Stream::new(seed, stream::SUBSAMPLE);
    let mut idx: Vec<u32> = (0..t as u32).collect();
    rng.shuffle(&mut idx);
    idx.truncate(m);
    let mut a_sub = Vec::with_capacity(m * n);
    let mut b_sub = Vec::with_capacity(m);
    for &i in &idx {
        a_sub.extend_from_slice(samples.row(i as usize));
        b_sub.push(samples.b[i as usize]);
    }
    Ok((idx, a_sub, b_sub))
}

/// One reduction paired with the sample indices it was computed from, so
/// the matching `b` restriction is unambiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexedReduction {
    pub indices: Vec<u32>,
    pub result: ReductionResult,
}

/// Applies every reduction's `R` to the matching `b` restriction and
/// stacks the `(Ra, Rb)` rows into one training set.
pub fn assemble(
    reductions: &[IndexedReduction],
    samples: &SampleSet,
    secret_id: u32,
    seed: u64,
) -> Result<TrainSet, DatasetError> {
    let n = samples.params.n;
    let q = samples.params.q;
    let mut rows = Vec::new();
    let mut targets = Vec::new();
    let mut rho_acc = 0.0;
    for red in reductions {
        let res = &red.result;
        if res.n != n {
            return Err(DatasetError::Shape("reduction width mismatch"));
        }
        if red.indices.len() != res.m {
            return Err(DatasetError::Index(alloc::format!(
                "reduction has {} source indices but m={}",
                red.indices.len(),
                res.m
            )));
        }
        if let Some(&bad) = red.indices.iter().find(|&&i| i as usize >= samples.params.t) {
            return Err(DatasetError::Index(alloc::format!("source index {bad} out of range")));
        }
        let b_sub: Vec<u64> = red.indices.iter().map(|&i| samples.b[i as usize]).collect();
        for r in 0..res.kept_rows {
            rows.extend_from_slice(&res.ra[r * n..(r + 1) * n]);
            // Rb recomputed from raw b, exactly.
            let mut acc: i128 = 0;
            for (j, &bi) in b_sub.iter().enumerate() {
                acc += res.r[r * res.m + j] as i128 * bi as i128;
            }
            targets.push(q.canonical_i128(acc));
        }
        rho_acc += res.rho * res.kept_rows as f64;
    }
    let count = targets.len();
    let rho = if count == 0 { f64::NAN } else { rho_acc / count as f64 };
    Ok(TrainSet {
        rows,
        targets,
        token_ids: None,
        n,
        meta: TrainMeta {
            n: n as u32,
            q: q.get(),
            rho,
            source: SetSource::Reduced,
            seed,
            secret_ids: alloc::vec![secret_id],
        },
    })
}

/// Synthesizes reduction-like rows: entries `round(N(0, (rho*q/sqrt(12))^2))`
/// centered then canonicalized, targets `row . s + e mod q`.
pub fn synthesize_reduced(
    n: usize,
    q: Modulus,
    sigma_e: f64,
    target_rho: f64,
    count: usize,
    secret: &Secret,
    seed: u64,
) -> TrainSet {
    assert!(target_rho > 0.0 && target_rho <= 1.0, "target_rho outside (0, 1]");
    assert_eq!(secret.len(), n, "secret length mismatch");
    let row_sigma = target_rho * q.get() as f64 / libm::sqrt(12.0);
    let mut row_rng = Stream::new(seed, stream::SYNTH_ROWS);
    let mut err_rng = Stream::new(seed, stream::SYNTH_ERR);
    let mut rows = Vec::with_capacity(count * n);
    let mut targets = Vec::with_capacity(count);
    for _ in 0..count {
        let start = rows.len();
        for _ in 0..n {
            rows.push(q.canonical(row_rng.rounded_normal(row_sigma)));
        }
        let dot = crate::modq::mod_dot(&rows[start..], secret.coeffs(), q);
        let e = err_rng.rounded_normal(sigma_e);
        targets.push(q.canonical(q.center(dot).wrapping_add(e)));
    }
    TrainSet {
        rows,
        targets,
        token_ids: None,
        n,
        meta: TrainMeta {
            n: n as u32,
            q: q.get(),
            rho: target_rho,
            source: SetSource::Synthetic,
            seed,
            secret_ids: Vec::new(),
        },
    }
}

/// Achieved reduction strength of a set's rows against the uniform
/// reference deviation `q/sqrt(12)`.
pub fn achieved_rho(set: &TrainSet, q: Modulus) -> f64 {
    let n = set.n;
    let count = set.len();
    if count == 0 {
        return f64::NAN;
    }
    let mut acc = 0.0;
    for i in 0..count {
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        for &x in set.row(i) {
            let c = q.center(x) as f64;
            sum += c;
            sum2 += c * c;
        }
        let mean = sum / n as f64;
        acc += libm::sqrt((sum2 / n as f64 - mean * mean).max(0.0));
    }
    (acc / count as f64) / (q.get() as f64 / libm::sqrt(12.0))
}

/// Builds a token-tagged multi-secret set: every input row is paired with
/// each secret in turn (rows shared, fresh errors per pair), targets
/// `row . s_i + e`, token ids `1..=S` matching the secret index.
pub fn tag_with_secrets(
    base: &TrainSet,
    secrets: &[Secret],
    q: Modulus,
    sigma_e: f64,
    seed: u64,
) -> TrainSet {
    assert!(!secrets.is_empty(), "need at least one secret");
    assert!(secrets.len() <= u16::MAX as usize - 1, "too many secrets");
    let n = base.n;
    let count = base.len();
    let total = count * secrets.len();
    let mut rows = Vec::with_capacity(total * n);
    let mut targets = Vec::with_capacity(total);
    let mut token_ids = Vec::with_capacity(total);
    let mut err_rng = Stream::new(seed, stream::SYNTH_ERR);
    for i in 0..count {
        let row = base.row(i);
        for (si, secret) in secrets.iter().enumerate() {
            assert_eq!(secret.len(), n, "secret length mismatch");
            rows.extend_from_slice(row);
            let dot = crate::modq::mod_dot(row, secret.coeffs(), q);
            let e = err_rng.rounded_normal(sigma_e);
            targets.push(q.canonical(q.center(dot).wrapping_add(e)));
            token_ids.push((si + 1) as u16);
        }
    }
    TrainSet {
        rows,
        targets,
        token_ids: Some(token_ids),
        n,
        meta: TrainMeta {
            n: n as u32,
            q: q.get(),
            rho: base.meta.rho,
            source: base.meta.source,
            seed,
            secret_ids: (1..=secrets.len() as u32).collect(),
        },
    }
}
