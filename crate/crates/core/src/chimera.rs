//! Chimera topology, complete-graph minor embedding and chain counter-terms.
//!
//! Each unit cell holds 8 qubits. Local indices `0..4` form the vertical shore
//! and `4..8` the horizontal shore; every vertical qubit couples to every
//! horizontal qubit of the same cell (the 16-edge bipartite cell). Vertical
//! qubits couple to the same local index in the cell below, horizontal qubits
//! to the same local index in the cell to the right.
//!
//! Qubit ids are `8·(row·cols + col) + k`. In the usual 1-based cell labels,
//! label `ℓ` is local index `ℓ − 1`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::qubo::{BinaryState, QuboModel};

pub const CELL_QUBITS: usize = 8;
pub const SHORE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChimeraGraph {
    rows: usize,
    cols: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl ChimeraGraph {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("Chimera grid needs at least one cell".into()));
        }
        let mut graph =
            ChimeraGraph { rows, cols, edges: BTreeSet::new(), adjacency: vec![Vec::new(); rows * cols * CELL_QUBITS] };
        for row in 0..rows {
            for col in 0..cols {
                for v in 0..SHORE {
                    for h in SHORE..CELL_QUBITS {
                        graph.insert(graph.qubit(row, col, v), graph.qubit(row, col, h));
                    }
                }
                if row + 1 < rows {
                    for v in 0..SHORE {
                        graph.insert(graph.qubit(row, col, v), graph.qubit(row + 1, col, v));
                    }
                }
                if col + 1 < cols {
                    for h in SHORE..CELL_QUBITS {
                        graph.insert(graph.qubit(row, col, h), graph.qubit(row, col + 1, h));
                    }
                }
            }
        }
        for adj in &mut graph.adjacency {
            adj.sort_unstable();
        }
        Ok(graph)
    }

    /// Smallest square grid that [`embed_complete_graph`] can use for `K_n`.
    pub fn for_complete_graph(n: usize) -> Self {
        let t = n.div_ceil(SHORE).max(1);
        ChimeraGraph::new(t, t).expect("grid dimensions are positive")
    }

    fn insert(&mut self, p: usize, q: usize) {
        self.edges.insert((p.min(q), p.max(q)));
        self.adjacency[p].push(q);
        self.adjacency[q].push(p);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_qubits(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn qubit(&self, row: usize, col: usize, k: usize) -> usize {
        debug_assert!(row < self.rows && col < self.cols && k < CELL_QUBITS);
        CELL_QUBITS * (row * self.cols + col) + k
    }

    /// `(row, col, local index)` of a qubit id.
    pub fn coordinates(&self, q: usize) -> (usize, usize, usize) {
        let cell = q / CELL_QUBITS;
        (cell / self.cols, cell % self.cols, q % CELL_QUBITS)
    }

    pub fn has_edge(&self, p: usize, q: usize) -> bool {
        self.edges.contains(&(p.min(q), p.max(q)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }
}

/// Logical vertex `v` is represented by the physical path `chains[v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    chains: Vec<Vec<usize>>,
}

impl Embedding {
    pub fn new(chains: Vec<Vec<usize>>) -> Self {
        Embedding { chains }
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn chain(&self, v: usize) -> &[usize] {
        &self.chains[v]
    }

    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    pub fn num_physical(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn max_chain_length(&self) -> usize {
        self.chains.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// One line per logical vertex: `L<id>: q q q …`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Embedding> {
        let mut chains: Vec<(usize, Vec<usize>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            let (label, rest) = line.split_once(':').ok_or_else(|| err("missing ':'".into()))?;
            let id = label
                .trim()
                .strip_prefix('L')
                .ok_or_else(|| err("label must start with 'L'".into()))?
                .parse::<usize>()
                .map_err(|e| err(e.to_string()))?;
            let chain = rest
                .split_whitespace()
                .map(|q| q.parse::<usize>().map_err(|e| err(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            chains.push((id, chain));
        }
        chains.sort_by_key(|(id, _)| *id);
        if chains.iter().enumerate().any(|(i, (id, _))| i != *id) {
            return Err(Error::Parse { line: 0, message: "logical ids must be 0..n without gaps".into() });
        }
        Ok(Embedding::new(chains.into_iter().map(|(_, c)| c).collect()))
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, chain) in self.chains.iter().enumerate() {
            write!(f, "L{v}:")?;
            for q in chain {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Embeds the complete graph `K_n`.
///
/// Up to four vertices fit in the first cell using two chains of length two
/// (cell labels 1–6 and 3–8) and two single qubits (labels 5 and 2). Larger
/// `n` uses the diagonal clique construction on a `t×t` block,
/// `t = ⌈n/4⌉`: vertex `4k + j` takes vertical qubit `j` in column `k` for
/// rows `0..=k`, then horizontal qubit `j` in row `k` for columns `k..t`,
/// giving paths of length `t + 1`.
pub fn embed_complete_graph(n: usize, graph: &ChimeraGraph) -> Result<Embedding> {
    if n == 0 {
        return Ok(Embedding::new(Vec::new()));
    }
    if n <= SHORE {
        let q = |k| graph.qubit(0, 0, k);
        let chains = match n {
            1 => vec![vec![q(0)]],
            2 => vec![vec![q(0)], vec![q(4)]],
            _ => {
                let mut c = vec![vec![q(0), q(5)], vec![q(4)], vec![q(1)], vec![q(2), q(7)]];
                c.truncate(n);
                c
            }
        };
        return Ok(Embedding::new(chains));
    }
    let t = n.div_ceil(SHORE);
    if graph.rows() < t || graph.cols() < t {
        return Err(Error::InsufficientHardware(format!(
            "K_{n} needs a {t}x{t} cell block, graph is {}x{}",
            graph.rows(),
            graph.cols()
        )));
    }
    let chains = (0..n)
        .map(|v| {
            let (k, j) = (v / SHORE, v % SHORE);
            let vertical = (0..=k).map(|row| graph.qubit(row, k, j));
            let horizontal = (k..t).map(|col| graph.qubit(k, col, SHORE + j));
            vertical.chain(horizontal).collect()
        })
        .collect();
    Ok(Embedding::new(chains))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    VertexCount {
        expected: usize,
        found: usize,
    },
    EmptyChain {
        vertex: usize,
    },
    UnknownQubit {
        vertex: usize,
        qubit: usize,
    },
    SharedQubit {
        qubit: usize,
        vertices: (usize, usize),
    },
    DisconnectedChain {
        vertex: usize,
    },
    /// Consecutive chain qubits at `position` and `position + 1` are not coupled.
    NotAPath {
        vertex: usize,
        position: usize,
    },
    MissingCoupler {
        edge: (usize, usize),
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbeddingReport {
    pub violations: Vec<Violation>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks disjointness, chain connectivity and coverage of every nonzero
/// logical coupling.
pub fn verify_embedding(embedding: &Embedding, logical: &QuboModel, graph: &ChimeraGraph) -> EmbeddingReport {
    let mut violations = Vec::new();
    if embedding.num_logical() != logical.num_vars() {
        violations.push(Violation::VertexCount { expected: logical.num_vars(), found: embedding.num_logical() });
    }
    let mut owner: Vec<Option<usize>> = vec![None; graph.num_qubits()];
    for (v, chain) in embedding.chains().iter().enumerate() {
        if chain.is_empty() {
            violations.push(Violation::EmptyChain { vertex: v });
            continue;
        }
        let mut known = true;
        for &q in chain {
            if q >= graph.num_qubits() {
                violations.push(Violation::UnknownQubit { vertex: v, qubit: q });
                known = false;
                continue;
            }
            match owner[q] {
                Some(u) => violations.push(Violation::SharedQubit { qubit: q, vertices: (u, v) }),
                None => owner[q] = Some(v),
            }
        }
        if !known {
            continue;
        }
        for (pos, pair) in chain.windows(2).enumerate() {
            if !graph.has_edge(pair[0], pair[1]) {
                violations.push(Violation::NotAPath { vertex: v, position: pos });
            }
        }
        if !is_connected(chain, graph) {
            violations.push(Violation::DisconnectedChain { vertex: v });
        }
    }
    for ((u, v), _) in logical.couplings() {
        if u >= embedding.num_logical() || v >= embedding.num_logical() {
            continue;
        }
        if first_coupler(embedding.chain(u), embedding.chain(v), graph).is_none() {
            violations.push(Violation::MissingCoupler { edge: (u, v) });
        }
    }
    EmbeddingReport { violations }
}

fn is_connected(chain: &[usize], graph: &ChimeraGraph) -> bool {
    let members: BTreeSet<usize> = chain.iter().copied().collect();
    let mut seen = BTreeSet::from([chain[0]]);
    let mut queue = VecDeque::from([chain[0]]);
    while let Some(q) = queue.pop_front() {
        for &p in graph.neighbors(q) {
            if members.contains(&p) && seen.insert(p) {
                queue.push_back(p);
            }
        }
    }
    seen.len() == members.len()
}

/// Lexicographically first physical edge joining two chains.
fn first_coupler(a: &[usize], b: &[usize], graph: &ChimeraGraph) -> Option<(usize, usize)> {
    a.iter()
        .flat_map(|&p| b.iter().map(move |&q| (p, q)))
        .filter(|&(p, q)| q < graph.num_qubits() && p < graph.num_qubits() && graph.has_edge(p, q))
        .min_by_key(|&(p, q)| (p.min(q), p.max(q)))
}

/// Chain coupling strength α (zero only for diagnostics).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainPenalty(f64);

impl ChainPenalty {
    pub const DEFAULT_ALPHA: f64 = 20.0;

    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("chain penalty {alpha} must be finite and >= 0")));
        }
        Ok(ChainPenalty(alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }
}

impl Default for ChainPenalty {
    fn default() -> Self {
        ChainPenalty(Self::DEFAULT_ALPHA)
    }
}

/// Whether chain qubits receive the compensating weight `2(N−1)α/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CounterTerms {
    Weighted,
    /// Only the `−α` chain couplings; intact-chain energies then drift with the
    /// number and length of chains set to 1.
    CouplingOnly,
}

/// Counter-term Hamiltonian of an isolated linear chain of `len` qubits:
/// weights `2(N−1)α/N`, nearest-neighbour couplings `−α`. Vanishes on both
/// aligned states.
pub fn chain_counter_term(len: usize, penalty: ChainPenalty) -> QuboModel {
    let alpha = penalty.alpha();
    let extra = counter_weight(len, alpha);
    let mut model = QuboModel::with_weights(vec![extra; len]);
    for r in 1..len {
        model.set_coupling(r - 1, r, -alpha).expect("consecutive indices are distinct");
    }
    model
}

fn counter_weight(len: usize, alpha: f64) -> f64 {
    2.0 * (len as f64 - 1.0) * alpha / len as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnembedPolicy {
    /// Reject any state with a broken chain.
    #[default]
    Discard,
    /// Take each chain's majority value, ties to 0.
    MajorityVote,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unembedded {
    Intact(BinaryState),
    Repaired { state: BinaryState, broken: Vec<usize> },
    Rejected { broken: Vec<usize> },
}

impl Unembedded {
    pub fn state(&self) -> Option<&BinaryState> {
        match self {
            Unembedded::Intact(s) | Unembedded::Repaired { state: s, .. } => Some(s),
            Unembedded::Rejected { .. } => None,
        }
    }

    pub fn is_broken(&self) -> bool {
        !matches!(self, Unembedded::Intact(_))
    }
}

/// A logical model mapped onto physical qubits.
///
/// Variable `k` of `qubo` is physical qubit `qubits[k]`; chains are stored as
/// lists of those local indices, concatenated in logical-vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalModel {
    pub qubo: QuboModel,
    pub qubits: Vec<usize>,
    pub chains: Vec<Vec<usize>>,
    pub penalty: ChainPenalty,
}

/// Splits each logical weight uniformly over its chain, adds the counter-term
/// per chain, and puts every logical coupling on the lexicographically first
/// physical edge between the two chains.
pub fn embed_hamiltonian(
    logical: &QuboModel,
    embedding: &Embedding,
    graph: &ChimeraGraph,
    penalty: ChainPenalty,
) -> Result<PhysicalModel> {
    embed_hamiltonian_with(logical, embedding, graph, penalty, CounterTerms::Weighted)
}

pub fn embed_hamiltonian_with(
    logical: &QuboModel,
    embedding: &Embedding,
    graph: &ChimeraGraph,
    penalty: ChainPenalty,
    counter: CounterTerms,
) -> Result<PhysicalModel> {
    if embedding.num_logical() != logical.num_vars() {
        return Err(Error::DimensionMismatch { expected: logical.num_vars(), found: embedding.num_logical() });
    }
    let alpha = penalty.alpha();
    let mut qubits = Vec::with_capacity(embedding.num_physical());
    let mut chains = Vec::with_capacity(embedding.num_logical());
    let mut local = vec![usize::MAX; graph.num_qubits()];
    for chain in embedding.chains() {
        let mut ids = Vec::with_capacity(chain.len());
        for &q in chain {
            if q >= graph.num_qubits() || local[q] != usize::MAX {
                return Err(Error::InvalidParameter(format!("qubit {q} unknown or shared between chains")));
            }
            local[q] = qubits.len();
            ids.push(qubits.len());
            qubits.push(q);
        }
        chains.push(ids);
    }

    let mut qubo = QuboModel::new(qubits.len());
    for (v, ids) in chains.iter().enumerate() {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidParameter(format!("logical vertex {v} has an empty chain")));
        }
        let extra = match counter {
            CounterTerms::Weighted => counter_weight(n, alpha),
            CounterTerms::CouplingOnly => 0.0,
        };
        let share = logical.weight(v) / n as f64;
        for &k in ids {
            qubo.set_weight(k, share + extra)?;
        }
        for pair in ids.windows(2) {
            if !graph.has_edge(qubits[pair[0]], qubits[pair[1]]) {
                return Err(Error::InvalidParameter(format!("chain of logical vertex {v} is not a physical path")));
            }
            if alpha != 0.0 {
                qubo.set_coupling(pair[0], pair[1], -alpha)?;
            }
        }
    }
    for ((u, v), b) in logical.couplings() {
        let (p, q) = first_coupler(embedding.chain(u), embedding.chain(v), graph).ok_or(Error::NoPhysicalEdge(u, v))?;
        qubo.set_coupling(local[p], local[q], b)?;
    }
    qubo.set_constant(logical.constant());
    Ok(PhysicalModel { qubo, qubits, chains, penalty })
}

impl PhysicalModel {
    pub fn num_logical(&self) -> usize {
        self.chains.len()
    }

    /// Physical state with every chain set to its logical value.
    pub fn lift(&self, logical: &BinaryState) -> Result<BinaryState> {
        if logical.len() != self.num_logical() {
            return Err(Error::DimensionMismatch { expected: self.num_logical(), found: logical.len() });
        }
        let mut bits = vec![0u8; self.qubits.len()];
        for (v, ids) in self.chains.iter().enumerate() {
            for &k in ids {
                bits[k] = logical.get(v);
            }
        }
        BinaryState::new(bits)
    }

    /// Logical vertices whose chain is not constant in `state`.
    pub fn broken_chains(&self, state: &BinaryState) -> Vec<usize> {
        self.chains
            .iter()
            .enumerate()
            .filter(|(_, ids)| ids.iter().any(|&k| state.get(k) != state.get(ids[0])))
            .map(|(v, _)| v)
            .collect()
    }

    pub fn unembed(&self, state: &BinaryState, policy: UnembedPolicy) -> Result<Unembedded> {
        if state.len() != self.qubits.len() {
            return Err(Error::DimensionMismatch { expected: self.qubits.len(), found: state.len() });
        }
        let broken = self.broken_chains(state);
        let logical = |value: &dyn Fn(&[usize]) -> u8| {
            BinaryState::new(self.chains.iter().map(|ids| value(ids)).collect()).expect("bits are 0/1")
        };
        if broken.is_empty() {
            return Ok(Unembedded::Intact(logical(&|ids| state.get(ids[0]))));
        }
        Ok(match policy {
            UnembedPolicy::Discard => Unembedded::Rejected { broken },
            UnembedPolicy::MajorityVote => {
                let vote = |ids: &[usize]| {
                    let ones = ids.iter().filter(|&&k| state.is_set(k)).count();
                    u8::from(2 * ones > ids.len())
                };
                Unembedded::Repaired { state: logical(&vote), broken }
            }
        })
    }
}
