//! Randomized verification: instance generators, brute-force oracles, the campaigns
//! over generated corpora, shrinking of failures and the discrepancy corpus.

use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::arith::is_prime;

pub mod campaign;
pub mod corpus;
pub mod gen;
pub mod oracle;
pub mod shrink;

pub use campaign::{run_campaign, Campaign, CampaignOutput, Report};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub max_types: usize,
    pub max_c_rank: usize,
    pub max_m: u64,
    pub prime_pool: BTreeSet<u64>,
    /// Number of generated groups per campaign.
    pub samples: usize,
    /// Discrepancy corpus (JSON lines), appended to after each campaign.
    pub corpus: Option<PathBuf>,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            max_types: 3,
            max_c_rank: 2,
            max_m: 12,
            prime_pool: [2, 3, 5, 7, 11].into_iter().collect(),
            samples: 100,
            corpus: None,
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_types == 0 {
            return Err("max_types must be positive".into());
        }
        if self.max_m < 2 {
            return Err("max_m must be at least 2".into());
        }
        if self.prime_pool.is_empty() {
            return Err("prime_pool must not be empty".into());
        }
        if let Some(p) = self.prime_pool.iter().find(|&&p| !is_prime(p)) {
            return Err(format!("{p} in prime_pool is not prime"));
        }
        if self.max_types > 1 && self.prime_pool.len() < 2 {
            return Err("several types need at least two primes in the pool".into());
        }
        Ok(())
    }
}
