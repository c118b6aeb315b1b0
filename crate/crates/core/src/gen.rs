//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Driver, GridInstance, VertexId};
use crate::money::Money;

/// Budgets are `b_max / 2^k` with `k` uniform in `k_min..=k_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetPattern {
    pub b_max: u64,
    pub k_min: u32,
    pub k_max: u32,
}

impl Default for BudgetPattern {
    fn default() -> Self {
        BudgetPattern { b_max: 8, k_min: 0, k_max: 3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub width: usize,
    pub length: usize,
    pub drivers: usize,
    pub budgets: BudgetPattern,
    /// Probability that each edge is removed, drawn before any driver.
    pub missing_rate: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(width: usize, length: usize, drivers: usize, seed: u64) -> Self {
        GenConfig { width, length, drivers, budgets: BudgetPattern::default(), missing_rate: 0.0, seed }
    }
}

pub fn generate(cfg: &GenConfig) -> Result<GridInstance> {
    if cfg.budgets.k_min > cfg.budgets.k_max || cfg.budgets.k_max > 62 {
        return Err(Error::InvalidArgument(format!("invalid halving range {}..={}", cfg.budgets.k_min, cfg.budgets.k_max)));
    }
    if !(0.0..=1.0).contains(&cfg.missing_rate) {
        return Err(Error::InvalidArgument(format!("missing-edge rate {} outside [0, 1]", cfg.missing_rate)));
    }
    let mut g = GridInstance::new(cfg.width, cfg.length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if cfg.missing_rate > 0.0 {
        let edges: Vec<_> = g.shape().edges().collect();
        for e in edges {
            if rng.gen_bool(cfg.missing_rate) {
                g.remove_edge(e)?;
            }
        }
    }
    let b_max = Money::from_integer(cfg.budgets.b_max);
    for _ in 0..cfg.drivers {
        let u = VertexId::new(rng.gen_range(0..cfg.length), rng.gen_range(0..cfg.width));
        let v = VertexId::new(rng.gen_range(0..cfg.length), rng.gen_range(0..cfg.width));
        let k = rng.gen_range(cfg.budgets.k_min..=cfg.budgets.k_max);
        g.add_driver(Driver::new(u, v, b_max.div_int(1u64 << k)))?;
    }
    Ok(g)
}
