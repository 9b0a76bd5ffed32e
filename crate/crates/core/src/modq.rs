//! Exact arithmetic over Z_q with canonical and centered representations.
//!
//! Residues are stored canonically in `[0, q)` as `u64`; the centered view
//! in `(-q/2, q/2]`-style ranges is computed on demand. Dot products
//! against small secrets accumulate in `i128`, which cannot wrap for
//! `q < 2^51` and dimensions up to `2^12`.

use serde::{Deserialize, Serialize};

/// Largest supported modulus (exclusive): products of two centered
/// residues fit in 103 bits, leaving ample summation headroom in i128.
pub const MAX_MODULUS: u64 = 1 << 51;

/// Largest supported vector length for [`mod_dot`].
pub const MAX_DOT_LEN: usize = 1 << 12;

/// A validated modulus `q` with `3 <= q < 2^51`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modulus {
    q: u64,
}

impl Modulus {
    pub fn new(q: u64) -> Result<Self, ModulusError> {
        if q < 3 {
            return Err(ModulusError::TooSmall(q));
        }
        if q >= MAX_MODULUS {
            return Err(ModulusError::TooLarge(q));
        }
        Ok(Modulus { q })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.q
    }

    pub fn is_odd(&self) -> bool {
        self.q & 1 == 1
    }

    /// Centered representative of a canonical residue.
    ///
    /// For odd q the result lies in `[-(q-1)/2, (q-1)/2]`; for even q in
    /// `[-q/2, q/2 - 1]`. Panics on out-of-range input (contract
    /// violation).
    #[inline]
    pub fn center(&self, x: u64) -> i64 {
        assert!(x < self.q, "residue {x} out of range for q={}", self.q);
        if x <= (self.q - 1) / 2 {
            x as i64
        } else {
            x as i64 - self.q as i64
        }
    }

    /// Canonical residue of an arbitrary signed integer.
    #[inline]
    pub fn canonical(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }

    /// Canonical residue of an i128 (used by wide accumulations).
    #[inline]
    pub fn canonical_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.q as i128) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModulusError {
    TooSmall(u64),
    TooLarge(u64),
}

impl core::fmt::Display for ModulusError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModulusError::TooSmall(q) => write!(f, "modulus {q} below minimum 3"),
            ModulusError::TooLarge(q) => write!(f, "modulus {q} at or above 2^51"),
        }
    }
}

impl core::error::Error for ModulusError {}

/// `sum_i a_i * s_i mod q` for a residue vector and a small-entry secret.
///
/// Entries of `s` must lie in `{-1, 0, 1}`. Accumulation is i128
/// throughout, so no intermediate wraps for any supported modulus.
pub fn mod_dot(a: &[u64], s: &[i8], q: Modulus) -> u64 {
    assert_eq!(a.len(), s.len(), "vector length mismatch");
    assert!(a.len() <= MAX_DOT_LEN, "vector too long for mod_dot");
    let mut acc: i128 = 0;
    for (&ai, &si) in a.iter().zip(s.iter()) {
        debug_assert!(ai < q.get());
        match si {
            0 => {}
            1 => acc += ai as i128,
            -1 => acc -= ai as i128,
            _ => panic!("secret entry {si} outside {{-1,0,1}}"),
        }
    }
    q.canonical_i128(acc)
}

/// Centered dot product `sum_i center(a_i) * s_i` over the integers (no
/// modular reduction). Used by wraparound diagnostics.
pub fn centered_dot(a: &[u64], s: &[i8], q: Modulus) -> i128 {
    assert_eq!(a.len(), s.len(), "vector length mismatch");
    let mut acc: i128 = 0;
    for (&ai, &si) in a.iter().zip(s.iter()) {
        match si {
            0 => {}
            1 => acc += q.center(ai) as i128,
            -1 => acc -= q.center(ai) as i128,
            _ => panic!("secret entry {si} outside {{-1,0,1}}"),
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use alloc::vec::Vec;

    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    #[test]
    fn center_small_cases() {
        let q = Modulus::new(7).unwrap();
        assert_eq!(q.center(0), 0);
        assert_eq!(q.center(6), -1);
        assert_eq!(q.center(5), -2);
        assert_eq!(q.center(3), 3);
        assert_eq!(q.center(4), -3);
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn center_rejects_out_of_range() {
        let q = Modulus::new(7).unwrap();
        q.center(7);
    }

    #[test]
    fn modulus_bounds() {
        assert!(Modulus::new(2).is_err());
        assert!(Modulus::new(3).is_ok());
        assert!(Modulus::new(MAX_MODULUS).is_err());
        assert!(Modulus::new(MAX_MODULUS - 1).is_ok());
    }

    #[test]
    fn mod_dot_small_cases() {
        let q = Modulus::new(7).unwrap();
        assert_eq!(mod_dot(&[3, 5], &[1, 1], q), 1);
        assert_eq!(mod_dot(&[3, 5], &[0, 0], q), 0);
        let big = Modulus::new(2_199_023_255_531).unwrap();
        let qm1 = big.get() - 1;
        assert_eq!(mod_dot(&[qm1, qm1], &[1, 1], big), big.get() - 2);
    }

    #[test]
    fn mod_dot_matches_bigint_oracle_near_2p50() {
        // Accumulation safety at the top of the supported range.
        let q = Modulus::new((1u64 << 50) + 27).unwrap();
        let mut rng = crate::rng::Stream::new(99, crate::rng::stream::MATRIX);
        let n = 1024;
        for _ in 0..100 {
            let a: Vec<u64> = (0..n).map(|_| rng.below(q.get())).collect();
            let s: Vec<i8> = (0..n)
                .map(|_| (rng.below(3) as i8) - 1)
                .collect();
            let got = mod_dot(&a, &s, q);
            let mut acc = BigInt::from(0);
            for (&ai, &si) in a.iter().zip(s.iter()) {
                acc += BigInt::from(ai) * BigInt::from(si);
            }
            let want = ((acc % q.get()) + q.get()) % q.get();
            assert_eq!(BigInt::from(got), want);
        }
    }

    proptest! {
        #[test]
        fn center_canonical_round_trip(q in 3u64..(1u64 << 51), x in 0u64..u64::MAX) {
            let m = Modulus::new(q).unwrap();
            let x = x % q;
            prop_assert_eq!(m.canonical(m.center(x)), x);
            // Centered magnitude bound for odd q.
            if m.is_odd() {
                prop_assert!(m.center(x).unsigned_abs() <= (q - 1) / 2);
            }
        }
    }
}
