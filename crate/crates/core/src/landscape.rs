//! Energy landscapes in reflected-binary Gray order and near-ground diagnostics.

use std::fmt::Write as _;

use crate::chimera::{embed_hamiltonian_with, ChainPenalty, ChimeraGraph, CounterTerms, Embedding};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::qubo::{brute_force_solve_with, BinaryState, QuboModel, DEFAULT_ENUMERATION_CAP};

pub const MAX_GRAY_BITS: usize = 24;

/// Integer value of the `i`-th reflected-binary codeword.
pub fn gray_code(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Iterator over the `2^n` codewords of the `n`-bit reflected-binary code.
#[derive(Debug, Clone)]
pub struct GrayCode {
    bits: usize,
    next: u64,
}

impl GrayCode {
    pub fn new(bits: usize) -> Result<Self> {
        check_bits(bits)?;
        Ok(GrayCode { bits, next: 0 })
    }
}

impl Iterator for GrayCode {
    type Item = BinaryState;

    fn next(&mut self) -> Option<BinaryState> {
        if self.next >> self.bits != 0 {
            return None;
        }
        let state = BinaryState::from_index(gray_code(self.next), self.bits);
        self.next += 1;
        Some(state)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = ((1u64 << self.bits) - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for GrayCode {}

fn check_bits(bits: usize) -> Result<()> {
    if bits == 0 || bits > MAX_GRAY_BITS {
        return Err(Error::InvalidParameter(format!("Gray code width {bits} must be in 1..={MAX_GRAY_BITS}")));
    }
    Ok(())
}

pub fn gray_sequence(bits: usize) -> Result<Vec<BinaryState>> {
    Ok(GrayCode::new(bits)?.collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayPoint {
    /// Position in the Gray sequence.
    pub gray_index: u64,
    pub state: BinaryState,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayProjection {
    pub points: Vec<GrayPoint>,
}

impl GrayProjection {
    /// CSV with header `gray_index,bits,energy`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gray_index,bits,energy\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{:?}", p.gray_index, p.state, p.energy);
        }
        out
    }
}

pub fn gray_projection(model: &QuboModel) -> Result<GrayProjection> {
    gray_projection_with(model, Execution::default())
}

pub fn gray_projection_with(model: &QuboModel, exec: Execution) -> Result<GrayProjection> {
    let n = model.num_vars();
    check_bits(n)?;
    let chunk_bits = n.min(12);
    let chunk = 1u64 << chunk_bits;
    let points = map_indexed(1usize << (n - chunk_bits), exec, |c| {
        let start = c as u64 * chunk;
        (start..start + chunk)
            .map(|i| {
                let code = gray_code(i);
                GrayPoint {
                    gray_index: i,
                    state: BinaryState::from_index(code, n),
                    energy: model.energy_of_index(code),
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(GrayProjection { points: points.into_iter().flatten().collect() })
}

/// Width of the counting window above the ground energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    Absolute(f64),
    /// Fraction of the spectral range `E_max − E_0`.
    FractionOfRange(f64),
}

impl Default for Window {
    fn default() -> Self {
        Window::FractionOfRange(0.05)
    }
}

/// Near-ground statistics. The window is a counting proxy for how crowded the
/// bottom of the spectrum is, not a physical adiabatic criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyReport {
    pub ground_energy: f64,
    /// Second-lowest entry of the spectrum (equal to `ground_energy` when the
    /// ground state is degenerate).
    pub first_excited: f64,
    pub gap: f64,
    pub window: f64,
    pub count: usize,
}

pub fn degeneracy_report(model: &QuboModel, window: Window) -> Result<DegeneracyReport> {
    let spectrum = brute_force_solve_with(model, DEFAULT_ENUMERATION_CAP, Execution::default())?;
    let ground_energy = spectrum.ground_energy();
    let first_excited = spectrum.first_excited().unwrap_or(ground_energy);
    let delta = match window {
        Window::Absolute(d) => d,
        Window::FractionOfRange(f) => f * (spectrum.max_energy() - ground_energy),
    };
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!("window {delta} must be non-negative")));
    }
    Ok(DegeneracyReport {
        ground_energy,
        first_excited,
        gap: first_excited - ground_energy,
        window: delta,
        count: spectrum.count_within(delta),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlayPoint {
    pub gray_index: u64,
    pub state: BinaryState,
    pub logical: f64,
    /// Physical energy of the chain-aligned lift of `state`.
    pub embedded: f64,
    /// Same, with chain couplings but without the compensating weights.
    pub no_counterweight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub points: Vec<OverlayPoint>,
}

impl Overlay {
    pub fn max_deviation(&self) -> f64 {
        self.points.iter().map(|p| (p.embedded - p.logical).abs()).fold(0.0, f64::max)
    }

    pub fn max_uncompensated_deviation(&self) -> f64 {
        self.points.iter().map(|p| (p.no_counterweight - p.logical).abs()).fold(0.0, f64::max)
    }

    /// CSV with header `gray_index,bits,logical,embedded,no_counterweight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gray_index,bits,logical,embedded,no_counterweight\n");
        for p in &self.points {
            let _ =
                writeln!(out, "{},{},{:?},{:?},{:?}", p.gray_index, p.state, p.logical, p.embedded, p.no_counterweight);
        }
        out
    }
}

/// Logical energies beside the embedded energies of the intact-chain states.
pub fn compare_embedded_landscape(
    logical: &QuboModel,
    embedding: &Embedding,
    graph: &ChimeraGraph,
    penalty: ChainPenalty,
) -> Result<Overlay> {
    let weighted = embed_hamiltonian_with(logical, embedding, graph, penalty, CounterTerms::Weighted)?;
    let bare = embed_hamiltonian_with(logical, embedding, graph, penalty, CounterTerms::CouplingOnly)?;
    let projection = gray_projection(logical)?;
    let points = projection
        .points
        .into_iter()
        .map(|p| {
            let lifted = weighted.lift(&p.state)?;
            Ok(OverlayPoint {
                embedded: weighted.qubo.energy(&lifted)?,
                no_counterweight: bare.qubo.energy(&lifted)?,
                gray_index: p.gray_index,
                logical: p.energy,
                state: p.state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Overlay { points })
}
