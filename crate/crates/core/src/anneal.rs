//! Classical simulated annealing as a stand-in for multi-read hardware sampling.
//!
//! Each read starts from a uniformly random state and performs `sweeps`
//! passes of single-flip Metropolis updates while the temperature falls
//! geometrically from `T_hot` to `T_cold`. Reads are seeded independently from
//! the run seed, so executing them in parallel gives the same sample set as a
//! sequential loop.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chimera::{
    embed_complete_graph, embed_hamiltonian, ChainPenalty, ChimeraGraph, Embedding, UnembedPolicy, Unembedded,
};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::qubo::{BinaryState, QuboModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub reads: usize,
    pub sweeps: usize,
    /// Defaults to `10·max|coefficient|` of the sampled model.
    pub t_hot: Option<f64>,
    /// Defaults to `0.01·min nonzero |coefficient|`.
    pub t_cold: Option<f64>,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { reads: 100, sweeps: 1000, t_hot: None, t_cold: None, seed: 0 }
    }
}

impl SamplerConfig {
    pub fn with_reads(reads: usize, seed: u64) -> Self {
        SamplerConfig { reads, seed, ..Self::default() }
    }

    /// Resolves the temperature schedule for `model`.
    pub fn schedule_for(&self, model: &QuboModel) -> Result<Schedule> {
        if self.reads == 0 || self.sweeps == 0 {
            return Err(Error::InvalidParameter("reads and sweeps must be positive".into()));
        }
        let max = model.max_abs_coefficient();
        let min = model.min_nonzero_abs_coefficient();
        let t_hot = self.t_hot.unwrap_or(if max > 0.0 { 10.0 * max } else { 1.0 });
        let t_cold = self.t_cold.unwrap_or(min.map_or(0.01, |m| 0.01 * m));
        if !(t_cold > 0.0 && t_hot > t_cold && t_hot.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "temperature schedule needs T_hot > T_cold > 0, got {t_hot} and {t_cold}"
            )));
        }
        Ok(Schedule { t_hot, t_cold, sweeps: self.sweeps })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub t_hot: f64,
    pub t_cold: f64,
    pub sweeps: usize,
}

impl Schedule {
    /// Temperature of sweep `k`, geometric between the endpoints.
    pub fn temperature(&self, k: usize) -> f64 {
        if self.sweeps <= 1 {
            return self.t_cold;
        }
        let t = k as f64 / (self.sweeps - 1) as f64;
        self.t_hot * (self.t_cold / self.t_hot).powf(t)
    }
}

/// Seed of read `read`: SplitMix64 of `mix(seed) ^ read`.
///
/// The run seed is mixed first; a bare `seed ^ read` would give runs with
/// small seeds nearly the same set of per-read seeds.
pub fn read_seed(seed: u64, read: usize) -> u64 {
    splitmix64(splitmix64(seed) ^ read as u64)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: BinaryState,
    pub energy: f64,
    pub count: usize,
    /// Set when the state came from a read with at least one broken chain.
    pub broken: bool,
}

/// Distinct outcomes of a sampling run, lowest energy first.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
}

impl SampleSet {
    /// Aggregates raw outcomes; energies are recomputed from `model`.
    pub fn from_outcomes(model: &QuboModel, outcomes: impl IntoIterator<Item = (BinaryState, bool)>) -> Result<Self> {
        let mut counts: BTreeMap<(BinaryState, bool), usize> = BTreeMap::new();
        for key in outcomes {
            *counts.entry(key).or_default() += 1;
        }
        Self::from_counts(model, counts)
    }

    fn from_counts(model: &QuboModel, counts: BTreeMap<(BinaryState, bool), usize>) -> Result<Self> {
        let mut samples = counts
            .into_iter()
            .map(|((state, broken), count)| Ok(Sample { energy: model.energy(&state)?, state, count, broken }))
            .collect::<Result<Vec<_>>>()?;
        samples.sort_by(|a, b| {
            a.energy.total_cmp(&b.energy).then_with(|| a.state.cmp(&b.state)).then(a.broken.cmp(&b.broken))
        });
        Ok(SampleSet { samples })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    /// Lowest-energy sample whose chains were all intact.
    pub fn best_intact(&self) -> Option<&Sample> {
        self.samples.iter().find(|s| !s.broken)
    }

    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.count).sum()
    }

    pub fn count_of(&self, state: &BinaryState) -> usize {
        self.samples.iter().filter(|s| &s.state == state).map(|s| s.count).sum()
    }

    /// CSV with header `bits,energy,count,broken`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bits,energy,count,broken\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{:?},{},{}", s.state, s.energy, s.count, s.broken);
        }
        out
    }
}

pub fn sample(model: &QuboModel, config: &SamplerConfig) -> Result<SampleSet> {
    sample_with(model, config, Execution::default())
}

pub fn sample_with(model: &QuboModel, config: &SamplerConfig, exec: Execution) -> Result<SampleSet> {
    if model.num_vars() == 0 {
        return Err(Error::InvalidParameter("cannot sample a model with no variables".into()));
    }
    let schedule = config.schedule_for(model)?;
    let fields = model.local_fields();
    let n = model.num_vars();
    let betas: Vec<f64> = (0..schedule.sweeps).map(|k| 1.0 / schedule.temperature(k)).collect();

    let finals = map_indexed(config.reads, exec, |read| {
        let mut rng = ChaCha8Rng::seed_from_u64(read_seed(config.seed, read));
        let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
        let mut h = fields.fields_for(&bits);
        for &beta in &betas {
            for r in 0..n {
                let delta = if bits[r] == 0 { h[r] } else { -h[r] };
                if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                    fields.flip(r, &mut bits, &mut h);
                }
            }
        }
        BinaryState::new(bits).expect("annealer only writes 0/1")
    });
    SampleSet::from_outcomes(model, finals.into_iter().map(|s| (s, false)))
}

/// Logical samples recovered from an embedded run.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSampleSet {
    /// Logical outcomes after unembedding. Under discard only intact reads appear.
    pub logical: SampleSet,
    pub physical: SampleSet,
    pub embedding: Embedding,
    pub reads: usize,
    pub broken_reads: usize,
}

impl EmbeddedSampleSet {
    pub fn break_fraction(&self) -> f64 {
        self.broken_reads as f64 / self.reads as f64
    }
}

/// Embeds `logical` as a complete graph on `graph`, samples the physical
/// model and unembeds every read.
///
/// Fails with [`Error::BrokenChains`] when no read survives the policy.
pub fn sample_embedded(
    logical: &QuboModel,
    graph: &ChimeraGraph,
    penalty: ChainPenalty,
    config: &SamplerConfig,
    policy: UnembedPolicy,
) -> Result<EmbeddedSampleSet> {
    sample_embedded_with(logical, graph, penalty, config, policy, Execution::default())
}

pub fn sample_embedded_with(
    logical: &QuboModel,
    graph: &ChimeraGraph,
    penalty: ChainPenalty,
    config: &SamplerConfig,
    policy: UnembedPolicy,
    exec: Execution,
) -> Result<EmbeddedSampleSet> {
    let embedding = embed_complete_graph(logical.num_vars(), graph)?;
    let physical_model = embed_hamiltonian(logical, &embedding, graph, penalty)?;
    let physical = sample_with(&physical_model.qubo, config, exec)?;

    let mut counts: BTreeMap<(BinaryState, bool), usize> = BTreeMap::new();
    let mut broken_reads = 0;
    for s in physical.samples() {
        let outcome = physical_model.unembed(&s.state, policy)?;
        if outcome.is_broken() {
            broken_reads += s.count;
        }
        match outcome {
            Unembedded::Intact(state) => *counts.entry((state, false)).or_default() += s.count,
            Unembedded::Repaired { state, .. } => *counts.entry((state, true)).or_default() += s.count,
            Unembedded::Rejected { .. } => {}
        }
    }
    if counts.is_empty() {
        return Err(Error::BrokenChains { reads: config.reads });
    }
    Ok(EmbeddedSampleSet {
        logical: SampleSet::from_counts(logical, counts)?,
        physical,
        embedding,
        reads: config.reads,
        broken_reads,
    })
}
