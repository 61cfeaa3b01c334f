//! Ground-state back ends shared by the division and linear-system drivers.

use crate::anneal::{sample, sample_embedded, SamplerConfig};
use crate::chimera::{ChainPenalty, ChimeraGraph, UnembedPolicy};
use crate::error::Result;
use crate::par::Execution;
use crate::qubo::{ground_states, BinaryState, QuboModel, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedAnnealing {
    pub config: SamplerConfig,
    /// Chain strength in the units the problem was built in, before λ-scaling.
    pub penalty: ChainPenalty,
    pub policy: UnembedPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Solver {
    /// Exhaustive enumeration; ties resolve to the lowest state index.
    #[default]
    BruteForce,
    /// Simulated annealing directly on the logical model.
    Anneal(SamplerConfig),
    /// Simulated annealing on a Chimera embedding of the logical model.
    Embedded(EmbeddedAnnealing),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainStats {
    pub reads: usize,
    pub broken_reads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub state: BinaryState,
    /// Energy of `state` under the model that was solved.
    pub energy: f64,
    pub chains: Option<ChainStats>,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::BruteForce => "brute",
            Solver::Anneal(_) => "sa",
            Solver::Embedded(_) => "sa-embedded",
        }
    }

    pub fn solve(&self, model: &QuboModel) -> Result<SolveOutcome> {
        self.solve_with(model, Execution::default())
    }

    pub fn solve_with(&self, model: &QuboModel, exec: Execution) -> Result<SolveOutcome> {
        match self {
            Solver::BruteForce => {
                let ground = ground_states(model, DEFAULT_ENUMERATION_CAP, 0.0, exec)?;
                let state = ground.states.into_iter().next().expect("enumeration yields at least one state");
                Ok(SolveOutcome { energy: model.energy(&state)?, state, chains: None })
            }
            Solver::Anneal(config) => {
                let set = sample(model, config)?;
                let best = set.best().expect("sampler returns at least one read");
                Ok(SolveOutcome { state: best.state.clone(), energy: best.energy, chains: None })
            }
            Solver::Embedded(run) => {
                // The model may already be divided by λ; keep α in the original units.
                let penalty = ChainPenalty::new(run.penalty.alpha() / model.scale())?;
                let graph = ChimeraGraph::for_complete_graph(model.num_vars());
                let set = sample_embedded(model, &graph, penalty, &run.config, run.policy)?;
                let best = set.logical.best().expect("embedded sampler returns a sample or an error");
                Ok(SolveOutcome {
                    state: best.state.clone(),
                    energy: best.energy,
                    chains: Some(ChainStats { reads: set.reads, broken_reads: set.broken_reads }),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_breaks_ties_by_index() {
        let mut m = QuboModel::with_weights(vec![-1.0, -1.0]);
        m.set_coupling(0, 1, 0.5).unwrap();
        // 01, 10 and 11 all reach -1
        let out = Solver::BruteForce.solve(&m).unwrap();
        assert_eq!(out.state.bits(), &[0, 1]);
        assert_eq!(out.energy, -1.0);
    }

    #[test]
    fn names() {
        assert_eq!(Solver::default().name(), "brute");
        assert_eq!(Solver::Anneal(SamplerConfig::default()).name(), "sa");
    }
}
