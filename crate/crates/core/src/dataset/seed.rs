use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha512};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("invalid run id {0:?}: expected R followed by at least two digits")]
    InvalidRunId(String),
    #[error("hash of {0:?} has fewer than eight decimal digits")]
    DigitsExhausted(String),
}

/// Run label such as `R01`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunId(String);

impl RunId {
    pub fn new(label: &str) -> Result<Self, SeedError> {
        let digits = label.strip_prefix('R').unwrap_or("");
        if digits.len() < 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(SeedError::InvalidRunId(label.to_string()));
        }
        Ok(RunId(label.to_string()))
    }

    /// `R01` for 1, `R10` for 10.
    pub fn numbered(n: u32) -> Self {
        RunId(format!("R{n:02}"))
    }

    /// `R01` through `R{count}`.
    pub fn default_runs(count: u32) -> Vec<RunId> {
        (1..=count).map(RunId::numbered).collect()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn seed(&self) -> u64 {
        derive_seed(&self.0).expect("SHA-512 hex of a run label has eight digits")
    }
}

impl fmt::Display for RunId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for RunId {
    type Err = SeedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RunId::new(s)
    }
}

/// Derives the shuffle seed for a run label.
///
/// The label is hashed as a line of text (`label` followed by `\n`, which is
/// what `echo R01 | sha512sum` digests), the digest is written as lowercase
/// hex, non-digit characters are dropped, and the first eight remaining
/// digits are read as a base-10 integer.
pub fn derive_seed(label: &str) -> Result<u64, SeedError> {
    let mut hasher = Sha512::new();
    hasher.update(label.as_bytes());
    hasher.update(b"\n");
    let hex = hex::encode(hasher.finalize());
    let digits: String = hex.chars().filter(char::is_ascii_digit).take(8).collect();
    if digits.len() < 8 {
        return Err(SeedError::DigitsExhausted(label.to_string()));
    }
    Ok(digits.parse().expect("eight ASCII digits"))
}

/// The SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound` by rejection sampling.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        // 2^64 mod bound; values under it would bias the remainder
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % bound;
            }
        }
    }
}

/// Fisher–Yates shuffle driven by SplitMix64.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut rng = SplitMix64::new(seed);
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_seeds() {
        assert_eq!(derive_seed("R01").unwrap(), 99975818);
        assert_eq!(derive_seed("R02").unwrap(), 56899599);
    }

    #[test]
    fn run_id_validation() {
        assert!(RunId::new("R01").is_ok());
        assert!(RunId::new("R123").is_ok());
        assert!(RunId::new("R1").is_err());
        assert!(RunId::new("X01").is_err());
        assert!(RunId::new("R0a").is_err());
        assert_eq!(RunId::numbered(7).as_str(), "R07");
    }

    #[test]
    fn splitmix_reference_stream() {
        // first outputs for seed 0 from the reference C implementation
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SplitMix64::new(42);
        for bound in 1..200 {
            assert!(rng.below(bound) < bound);
        }
    }
}
