//! Desk-scale toolkit for machine-learning attacks on Learning With Errors.
//!
//! The pipeline has two halves. Preprocessing builds q-ary embedding
//! lattices from LWE sample matrices and reduces them with interleaved
//! LLL/BKZ passes plus polishing, producing short-row operators `R` whose
//! transformed pairs `(RA, Rb)` are still LWE samples for the same secret.
//! The learning half trains a small encoder-only transformer with an
//! angular embedding to predict `Rb` from `Ra`, then extracts the secret
//! with coordinate-perturbation distinguishers and verifies candidates
//! against the original samples via residual statistics.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `lwelab` crate. All randomness is counter-based and
//! seeded, so every run is reproducible.

#![no_std]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod clock;
pub mod dataset;
pub mod distinguish;
pub mod lattice;
pub mod lwe;
pub mod model;
pub mod modq;
pub mod rng;
pub mod train;
