//! Division and linear-system solving compiled to QUBO problems.
//!
//! Real unknowns are written as fixed-point binary expansions, the squared
//! residual becomes a quadratic objective over bits, and the ground state of
//! that objective decodes to the answer. Ground states come from exhaustive
//! enumeration or from a simulated-annealing sampler, optionally run on a
//! Chimera-style hardware graph with chained qubits.
//!
//! Data-parallel loops use rayon behind the default `parallel` feature; build
//! with `--no-default-features` for a purely sequential library. Results are
//! identical either way.

pub mod anneal;
pub mod chimera;
pub mod division;
pub mod encoding;
pub mod error;
pub mod fixtures;
pub mod landscape;
pub mod linear;
pub mod par;
pub mod qubo;
pub mod solver;

pub use anneal::{sample, sample_embedded, EmbeddedSampleSet, Sample, SampleSet, SamplerConfig};
pub use chimera::{
    chain_counter_term, embed_complete_graph, embed_hamiltonian, verify_embedding, ChainPenalty, ChimeraGraph,
    Embedding, PhysicalModel, UnembedPolicy, Unembedded,
};
pub use division::{
    build_division_qubo, iterate_division, solve_division, DivisionProblem, DivisionResult, IterationTrace,
};
pub use encoding::{exponent_offset, BinaryEncoding, ExponentOffset};
pub use error::{Error, Result};
pub use landscape::{compare_embedded_landscape, degeneracy_report, gray_projection, gray_sequence, Window};
pub use linear::{
    build_linear_qubo, condition_number, eigenvalue_condition_number, invert_matrix, reconstruct_solution,
    solve_linear, IndexMap, LinearSolution, MatrixProblem, ProblemFile,
};
pub use par::Execution;
pub use qubo::{brute_force_solve, BinaryState, IsingModel, QuboModel, Spectrum};
pub use solver::{EmbeddedAnnealing, Solver};
