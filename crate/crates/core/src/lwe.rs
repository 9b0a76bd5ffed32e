//! LWE instance generation, residual verification, and the NoMod
//! wraparound diagnostic.
//!
//! An instance is `b = A*s + e mod q` with `A` uniform, `s` a sparse
//! binary/ternary secret of Hamming weight `h`, and `e` a rounded Gaussian
//! of width `sigma_e`. By default `t = 4n` samples are kept; candidate
//! secrets are tested by the standard deviation of the centered residuals
//! `b - A*s*` over those samples: correct secrets leave roughly
//! `sigma_e`, wrong ones leave roughly `q/sqrt(12)` (uniform).

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::modq::{centered_dot, mod_dot, Modulus};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecretDist {
    Binary,
    Ternary,
}

/// Problem parameters: dimension, modulus, error width, secret weight and
/// distribution, and sample budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LweParams {
    pub n: usize,
    pub q: Modulus,
    pub sigma_e: f64,
    pub h: usize,
    pub dist: SecretDist,
    pub t: usize,
}

impl LweParams {
    /// Parameters with the default sample budget `t = 4n`.
    pub fn new(
        n: usize,
        q: u64,
        sigma_e: f64,
        h: usize,
        dist: SecretDist,
    ) -> Result<Self, LweError> {
        Self::with_samples(n, q, sigma_e, h, dist, 4 * n)
    }

    pub fn with_samples(
        n: usize,
        q: u64,
        sigma_e: f64,
        h: usize,
        dist: SecretDist,
        t: usize,
    ) -> Result<Self, LweError> {
        let q = Modulus::new(q).map_err(|e| LweError::Param(alloc::format!("{e}")))?;
        if n == 0 {
            return Err(LweError::Param(String::from("dimension n must be positive")));
        }
        if h > n {
            return Err(LweError::Param(alloc::format!(
                "hamming weight {h} exceeds dimension {n}"
            )));
        }
        if !(sigma_e >= 0.0 && sigma_e.is_finite()) {
            return Err(LweError::Param(String::from("sigma_e must be finite and >= 0")));
        }
        if t == 0 {
            return Err(LweError::Param(String::from("sample count t must be positive")));
        }
        Ok(LweParams { n, q, sigma_e, h, dist, t })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LweError {
    Param(String),
}

impl core::fmt::Display for LweError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            LweError::Param(msg) => write!(f, "invalid LWE parameters: {msg}"),
        }
    }
}

impl core::error::Error for LweError {}

/// A sparse secret with entries in `{-1, 0, 1}` and exactly `h` nonzeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Secret {
    coeffs: Vec<i8>,
}

impl Secret {
    /// Wraps explicit coefficients, validating the entry range.
    pub fn from_coeffs(coeffs: Vec<i8>) -> Result<Self, LweError> {
        if coeffs.iter().any(|&c| !(-1..=1).contains(&c)) {
            return Err(LweError::Param(String::from("secret entries must be in {-1,0,1}")));
        }
        Ok(Secret { coeffs })
    }

    #[inline]
    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn hamming_weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `t` LWE samples sharing one secret. `secret` is kept only in lab mode
/// for diagnostics; a real attack never has it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    /// Row-major `t x n` canonical residues.
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub params: LweParams,
    pub secret: Option<Secret>,
}

impl SampleSet {
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        let n = self.params.n;
        &self.a[i * n..(i + 1) * n]
    }

    /// Rebuilds `b` for a different secret over the same `A`, with fresh
    /// errors drawn from `seed`. This is the multi-secret reuse trick:
    /// reductions of `A` are expensive and secret-independent.
    pub fn rekey(&self, secret: &Secret, seed: u64) -> SampleSet {
        assert_eq!(secret.len(), self.params.n, "secret length mismatch");
        let mut err = Stream::new(seed, stream::ERROR);
        let q = self.params.q;
        let b = (0..self.params.t)
            .map(|i| {
                let dot = mod_dot(self.row(i), secret.coeffs(), q);
                let e = err.rounded_normal(self.params.sigma_e);
                q.canonical(q.center(dot).wrapping_add(e))
            })
            .collect();
        SampleSet {
            a: self.a.clone(),
            b,
            params: self.params,
            secret: Some(secret.clone()),
        }
    }
}

/// Samples a secret with exactly `h` nonzero coordinates, positions
/// uniform without replacement; ternary nonzeros are +-1 with equal
/// probability.
pub fn gen_secret(params: &LweParams, seed: u64) -> Secret {
    let mut rng = Stream::new(seed, stream::SECRET);
    let mut idx: Vec<usize> = (0..params.n).collect();
    rng.shuffle(&mut idx);
    let mut coeffs = alloc::vec![0i8; params.n];
    for &i in idx.iter().take(params.h) {
        coeffs[i] = match params.dist {
            SecretDist::Binary => 1,
            SecretDist::Ternary => rng.sign(),
        };
    }
    Secret { coeffs }
}

/// Generates `t` samples: `A` i.i.d. uniform on `[0, q)`, errors rounded
/// Gaussian, `b = A*s + e mod q`. Deterministic in `seed`.
pub fn gen_samples(params: &LweParams, secret: &Secret, seed: u64) -> SampleSet {
    assert_eq!(secret.len(), params.n, "secret length mismatch");
    let q = params.q;
    let mut mat = Stream::new(seed, stream::MATRIX);
    let a: Vec<u64> = (0..params.t * params.n).map(|_| mat.below(q.get())).collect();
    let mut err = Stream::new(seed, stream::ERROR);
    let b = (0..params.t)
        .map(|i| {
            let row = &a[i * params.n..(i + 1) * params.n];
            let dot = mod_dot(row, secret.coeffs(), q);
            let e = err.rounded_normal(params.sigma_e);
            q.canonical(q.center(dot).wrapping_add(e))
        })
        .collect();
    SampleSet { a, b, params: *params, secret: Some(secret.clone()) }
}

/// Residual test outcome for one candidate secret.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub accepted: bool,
    pub residual_std: f64,
}

/// Acceptance threshold: a tenth of the uniform-residual std `q/sqrt(12)`.
pub fn accept_threshold(q: Modulus) -> f64 {
    q.get() as f64 / (10.0 * libm::sqrt(12.0))
}

/// Tests a candidate by the standard deviation of the centered residuals
/// `b - A*s*` over all `t` samples.
pub fn verify_secret(samples: &SampleSet, candidate: &Secret) -> Verification {
    assert_eq!(candidate.len(), samples.params.n, "candidate length mismatch");
    let q = samples.params.q;
    let t = samples.params.t;
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for i in 0..t {
        let dot = mod_dot(samples.row(i), candidate.coeffs(), q);
        let r = q.center(q.canonical(q.center(samples.b[i]) - q.center(dot)))
            as f64;
        sum += r;
        sum2 += r * r;
    }
    let mean = sum / t as f64;
    let var = (sum2 / t as f64 - mean * mean).max(0.0);
    let residual_std = libm::sqrt(var);
    Verification { accepted: residual_std < accept_threshold(q), residual_std }
}

/// Centered error vector `center(b - A*s)`; lab-mode only.
pub fn error_vector(samples: &SampleSet, secret: &Secret) -> Vec<i64> {
    let q = samples.params.q;
    (0..samples.params.t)
        .map(|i| {
            let dot = mod_dot(samples.row(i), secret.coeffs(), q);
            q.center(q.canonical(q.center(samples.b[i]) - q.center(dot)))
        })
        .collect()
}

/// Fraction of `(row, target)` pairs whose centered integer product
/// `row . s - target` stays strictly inside `(-q/2, q/2)`, i.e. incurred
/// no modular wraparound. Computed over the integers, exactly.
pub fn nomod_fraction(rows: &[u64], targets: &[u64], secret: &Secret, q: Modulus) -> f64 {
    let n = secret.len();
    assert!(n > 0, "empty secret");
    assert_eq!(rows.len(), targets.len() * n, "rows/targets length mismatch");
    if targets.is_empty() {
        return 1.0;
    }
    let mut hits = 0usize;
    for (i, &t) in targets.iter().enumerate() {
        let row = &rows[i * n..(i + 1) * n];
        let x = centered_dot(row, secret.coeffs(), q) - q.center(t) as i128;
        // Strict comparison |x| < q/2, exact in integers: 2|x| < q.
        if x.unsigned_abs() * 2 < q.get() as u128 {
            hits += 1;
        }
    }
    hits as f64 / targets.len() as f64
}
