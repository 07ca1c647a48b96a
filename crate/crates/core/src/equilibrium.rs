//! Agent-based staker entry.
//!
//! Prospective stakers arrive in batches. Each one joins only if, after it
//! joins, the validators split evenly across all running beacon nodes still
//! earn every node at least its annual cost. The simulation stops at the
//! first batch that is not fully admitted; at that point the next entrant
//! would run at a loss. This gives an equilibrium node count that does not
//! go through the closed-form expression in [`crate::pos`], so the two can
//! check each other.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pos::{self, PosError, PosScenario, HOURS_PER_YEAR};

pub const DEFAULT_ENTRY_BATCH: u64 = 100;
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("still profitable to join after {steps} steps ({nodes} nodes)")]
    NonConvergence { steps: u64, nodes: u64 },
    #[error("entry batch and step limit must both be at least 1")]
    InvalidConfig,
    #[error(transparent)]
    Model(#[from] PosError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: PosScenario,
    pub entry_batch: u64,
    pub max_steps: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(scenario: PosScenario, seed: u64) -> Self {
        Self {
            scenario,
            entry_batch: DEFAULT_ENTRY_BATCH,
            max_steps: DEFAULT_MAX_STEPS,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub node_count: u64,
    /// Validators run by each node at the final state.
    pub validators_assigned: f64,
    /// TWh per year drawn by the final node population.
    pub total_energy: f64,
    pub converged: bool,
    pub steps_used: u64,
}

struct Economics {
    validators: f64,
    annual_return: f64,
    annual_cost: f64,
}

impl Economics {
    fn breaks_even(&self, nodes: u64) -> bool {
        let per_node = self.validators / nodes as f64;
        per_node * self.annual_return >= self.annual_cost
    }
}

pub fn simulate_equilibrium(config: &SimConfig) -> Result<SimOutcome, SimError> {
    if config.entry_batch == 0 || config.max_steps == 0 {
        return Err(SimError::InvalidConfig);
    }
    let PosScenario { params, hardware } = &config.scenario;
    params.validate().map_err(PosError::from)?;
    hardware.validate().map_err(PosError::from)?;

    let econ = Economics {
        validators: pos::validator_count(params.total_stake, params.stake_per_validator)?,
        annual_return: pos::validator_annual_return(
            params.total_stake,
            params.token_price,
            params.reward_constant,
        ),
        annual_cost: pos::staker_annual_cost(hardware, &params.weighted, params.depreciation_years),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut nodes: u64 = 0;
    let mut next_id: u64 = 0;
    let mut steps: u64 = 0;
    let mut queue: Vec<u64> = Vec::with_capacity(config.entry_batch as usize);

    loop {
        if steps == config.max_steps {
            if econ.breaks_even(nodes + 1) {
                return Err(SimError::NonConvergence { steps, nodes });
            }
            break;
        }
        steps += 1;

        // Identical agents, so arrival order cannot change who is admitted,
        // only the order in which they are tried.
        queue.clear();
        queue.extend(next_id..next_id + config.entry_batch);
        next_id += config.entry_batch;
        queue.shuffle(&mut rng);

        let mut admitted = 0;
        for _candidate in &queue {
            if econ.breaks_even(nodes + admitted + 1) {
                admitted += 1;
            } else {
                break;
            }
        }
        nodes += admitted;
        if admitted < config.entry_batch {
            break;
        }
    }

    let validators_assigned = if nodes == 0 {
        0.0
    } else {
        econ.validators / nodes as f64
    };
    Ok(SimOutcome {
        node_count: nodes,
        validators_assigned,
        total_energy: HOURS_PER_YEAR * hardware.power_w * nodes as f64 / 1e12,
        converged: true,
        steps_used: steps,
    })
}
