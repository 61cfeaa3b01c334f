//! QUBO objective, Ising correspondence and exhaustive ground-state search.
//!
//! Coefficients follow the double-count convention: a coupling is stored once
//! per unordered pair, but the objective sums over ordered pairs,
//!
//! ```text
//! E(Q) = Σ_r w_r Q_r + Σ_{r≠s} b_rs Q_r Q_s = Σ_r w_r Q_r + 2 Σ_{r<s} b_rs Q_r Q_s
//! ```
//!
//! The diagonal `b_rr` terms are folded into the weights by idempotency
//! (`Q_r² = Q_r`), so self-couplings are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

/// Default variable cap for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// A vector of bits `Q_r ∈ {0, 1}`.
///
/// States order lexicographically, which for equal lengths is the order of
/// their integer value with `Q_0` as the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryState(Vec<u8>);

impl BinaryState {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidParameter(format!("bit value {b} is not 0 or 1")));
        }
        Ok(BinaryState(bits))
    }

    pub fn zeros(len: usize) -> Self {
        BinaryState(vec![0; len])
    }

    /// State whose integer value is `index`, `Q_0` being the most significant bit.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64, "integer state index limited to 64 bits");
        BinaryState((0..len).map(|r| ((index >> (len - 1 - r)) & 1) as u8).collect())
    }

    pub fn index(&self) -> u64 {
        assert!(self.0.len() <= 64, "integer state index limited to 64 bits");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, r: usize) -> u8 {
        self.0[r]
    }

    pub fn is_set(&self, r: usize) -> bool {
        self.0[r] == 1
    }

    pub fn hamming_distance(&self, other: &BinaryState) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BinaryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryState {
    type Err = Error;

    /// Parses either `0111` or `[0,1,1,1]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => {
                    Err(Error::Parse { line: 1, message: format!("unexpected character {other:?} in bit string") })
                }
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BinaryState(bits))
    }
}

impl From<&[u8]> for BinaryState {
    fn from(bits: &[u8]) -> Self {
        BinaryState(bits.iter().map(|&b| u8::from(b != 0)).collect())
    }
}

/// Result of [`QuboModel::scale_by_max_coupling`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleOutcome {
    /// Coefficients were divided by this λ.
    Scaled(f64),
    /// No nonzero coupling; the model was returned unchanged with scale 1.
    NoCouplings,
}

/// Quadratic unconstrained binary objective over `num_vars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    weights: Vec<f64>,
    /// Keyed by `(i, j)` with `i < j`. Zero couplings are not stored.
    couplings: BTreeMap<(usize, usize), f64>,
    constant: f64,
    scale: f64,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        Self::with_weights(vec![0.0; num_vars])
    }

    pub fn with_weights(weights: Vec<f64>) -> Self {
        QuboModel { weights, couplings: BTreeMap::new(), constant: 0.0, scale: 1.0 }
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, r: usize) -> f64 {
        self.weights[r]
    }

    pub fn set_weight(&mut self, r: usize, value: f64) -> Result<()> {
        self.check_index(r)?;
        self.weights[r] = value;
        Ok(())
    }

    pub fn add_weight(&mut self, r: usize, value: f64) -> Result<()> {
        self.check_index(r)?;
        self.weights[r] += value;
        Ok(())
    }

    /// Ordered-pair coefficient `b_rs` (zero when absent or `r == s`).
    pub fn coupling(&self, r: usize, s: usize) -> f64 {
        if r == s {
            return 0.0;
        }
        self.couplings.get(&ordered(r, s)).copied().unwrap_or(0.0)
    }

    pub fn set_coupling(&mut self, r: usize, s: usize, value: f64) -> Result<()> {
        self.check_pair(r, s)?;
        if value == 0.0 {
            self.couplings.remove(&ordered(r, s));
        } else {
            self.couplings.insert(ordered(r, s), value);
        }
        Ok(())
    }

    pub fn add_coupling(&mut self, r: usize, s: usize, value: f64) -> Result<()> {
        let current = self.coupling(r, s);
        self.set_coupling(r, s, current + value)
    }

    /// Nonzero couplings as `((i, j), b_ij)` with `i < j`, in lexicographic order.
    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.couplings.iter().map(|(&k, &v)| (k, v))
    }

    pub fn num_couplings(&self) -> usize {
        self.couplings.len()
    }

    /// Constant term carried for reporting; excluded from [`energy`](Self::energy).
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn set_constant(&mut self, constant: f64) {
        self.constant = constant;
    }

    /// λ already applied to the stored coefficients (1 if unscaled).
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Scaled objective value, constant excluded.
    pub fn energy(&self, state: &BinaryState) -> Result<f64> {
        if state.len() != self.num_vars() {
            return Err(Error::DimensionMismatch { expected: self.num_vars(), found: state.len() });
        }
        Ok(self.energy_with(|r| state.is_set(r)))
    }

    /// Energy in the units the model was built in, i.e. undoing λ.
    pub fn raw_energy(&self, state: &BinaryState) -> Result<f64> {
        Ok(self.energy(state)? * self.scale)
    }

    /// Full unscaled objective including the constant term.
    pub fn objective(&self, state: &BinaryState) -> Result<f64> {
        Ok((self.energy(state)? + self.constant) * self.scale)
    }

    /// Energy of the state with integer value `index` (`Q_0` most significant).
    pub fn energy_of_index(&self, index: u64) -> f64 {
        let n = self.num_vars();
        self.energy_with(|r| (index >> (n - 1 - r)) & 1 == 1)
    }

    // Single summation order shared by every energy path, so that energies
    // reported by different solvers compare exactly.
    fn energy_with(&self, is_set: impl Fn(usize) -> bool) -> f64 {
        let mut e = 0.0;
        for (r, &w) in self.weights.iter().enumerate() {
            if is_set(r) {
                e += w;
            }
        }
        for (&(r, s), &b) in &self.couplings {
            if is_set(r) && is_set(s) {
                e += 2.0 * b;
            }
        }
        e
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.couplings.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.weights.iter().fold(self.max_abs_coupling(), |m, v| m.max(v.abs()))
    }

    /// Smallest nonzero coefficient magnitude, if any.
    pub fn min_nonzero_abs_coefficient(&self) -> Option<f64> {
        self.weights.iter().chain(self.couplings.values()).map(|v| v.abs()).filter(|&v| v > 0.0).min_by(f64::total_cmp)
    }

    /// Divides the whole objective by λ = max |b_rs|, the reported-energy convention.
    pub fn scale_by_max_coupling(&self) -> (QuboModel, ScaleOutcome) {
        let lambda = self.max_abs_coupling();
        if lambda == 0.0 {
            let mut unchanged = self.clone();
            unchanged.scale = 1.0;
            return (unchanged, ScaleOutcome::NoCouplings);
        }
        let scaled = QuboModel {
            weights: self.weights.iter().map(|w| w / lambda).collect(),
            couplings: self.couplings.iter().map(|(&k, &v)| (k, v / lambda)).collect(),
            constant: self.constant / lambda,
            scale: self.scale * lambda,
        };
        (scaled, ScaleOutcome::Scaled(lambda))
    }

    /// Relabels variable `r` as `perm[r]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<QuboModel> {
        let n = self.num_vars();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let mut out = QuboModel::new(n);
        for (r, &w) in self.weights.iter().enumerate() {
            out.weights[perm[r]] = w;
        }
        for (&(r, s), &b) in &self.couplings {
            out.couplings.insert(ordered(perm[r], perm[s]), b);
        }
        out.constant = self.constant;
        out.scale = self.scale;
        Ok(out)
    }

    /// Ising form under `Q = J + 1/2` with spins `J = ±1/2`.
    pub fn to_ising(&self) -> IsingModel {
        let mut fields = self.weights.clone();
        let mut offset = 0.5 * self.weights.iter().sum::<f64>();
        for (&(r, s), &b) in &self.couplings {
            fields[r] += b;
            fields[s] += b;
            offset += 0.5 * b;
        }
        IsingModel { fields, couplings: self.couplings.clone(), offset }
    }

    /// Text form: a header line `n`, then `w <idx> <value>` and `c <i> <j> <value>` lines.
    ///
    /// Values use the shortest representation that parses back to the same `f64`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.num_vars());
        for (r, w) in self.weights.iter().enumerate() {
            out.push_str(&format!("w {r} {w:?}\n"));
        }
        for (&(r, s), b) in &self.couplings {
            out.push_str(&format!("c {r} {s} {b:?}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<QuboModel> {
        let mut model: Option<QuboModel> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some(m) = model.as_mut() else {
                let n = fields[0].parse::<usize>().map_err(|e| parse_err(format!("header: {e}")))?;
                if fields.len() != 1 {
                    return Err(parse_err("header must be a single integer".into()));
                }
                model = Some(QuboModel::new(n));
                continue;
            };
            let idx = |s: &str| s.parse::<usize>().map_err(|e| parse_err(format!("index: {e}")));
            let val = |s: &str| s.parse::<f64>().map_err(|e| parse_err(format!("value: {e}")));
            match fields.as_slice() {
                ["w", r, v] => m.set_weight(idx(r)?, val(v)?).map_err(|e| parse_err(e.to_string()))?,
                ["c", r, s, v] => m.set_coupling(idx(r)?, idx(s)?, val(v)?).map_err(|e| parse_err(e.to_string()))?,
                _ => return Err(parse_err(format!("unrecognised line {line:?}"))),
            }
        }
        model.ok_or(Error::Parse { line: 0, message: "missing header".into() })
    }

    fn check_index(&self, r: usize) -> Result<()> {
        if r >= self.num_vars() {
            return Err(Error::IndexOutOfRange { index: r, size: self.num_vars() });
        }
        Ok(())
    }

    fn check_pair(&self, r: usize, s: usize) -> Result<()> {
        self.check_index(r)?;
        self.check_index(s)?;
        if r == s {
            return Err(Error::InvalidParameter(format!(
                "self-coupling on vertex {r}; fold diagonal terms into the weight"
            )));
        }
        Ok(())
    }

    pub(crate) fn local_fields(&self) -> LocalFields {
        let mut neighbors = vec![Vec::new(); self.num_vars()];
        for (&(r, s), &b) in &self.couplings {
            neighbors[r].push((s, 2.0 * b));
            neighbors[s].push((r, 2.0 * b));
        }
        LocalFields { weights: self.weights.clone(), neighbors }
    }
}

fn ordered(r: usize, s: usize) -> (usize, usize) {
    if r < s {
        (r, s)
    } else {
        (s, r)
    }
}

/// Adjacency view used by incremental (single-flip) energy updates.
///
/// Flipping variable `r` changes the energy by `(1 - 2 Q_r) * h_r` where
/// `h_r = w_r + Σ_s 2 b_rs Q_s`.
pub(crate) struct LocalFields {
    pub weights: Vec<f64>,
    pub neighbors: Vec<Vec<(usize, f64)>>,
}

impl LocalFields {
    pub fn fields_for(&self, bits: &[u8]) -> Vec<f64> {
        let mut h = self.weights.clone();
        for (r, adj) in self.neighbors.iter().enumerate() {
            for &(s, b2) in adj {
                if bits[s] == 1 {
                    h[r] += b2;
                }
            }
        }
        h
    }

    /// Flips `r` in place, updating the neighbouring fields; returns ΔE.
    pub fn flip(&self, r: usize, bits: &mut [u8], h: &mut [f64]) -> f64 {
        let delta = if bits[r] == 0 { h[r] } else { -h[r] };
        let sign = if bits[r] == 0 { 1.0 } else { -1.0 };
        bits[r] ^= 1;
        for &(s, b2) in &self.neighbors[r] {
            h[s] += sign * b2;
        }
        delta
    }
}

/// Ising form `E(J) = Σ_r h_r J_r + Σ_{r≠s} J_rs J_r J_s` with `J_r = ±1/2`.
///
/// `energy(spins) + offset` equals the source QUBO energy of the matching state.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    fields: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl IsingModel {
    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn coupling(&self, r: usize, s: usize) -> f64 {
        if r == s {
            return 0.0;
        }
        self.couplings.get(&ordered(r, s)).copied().unwrap_or(0.0)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Maps `Q ∈ {0, 1}` to `J = Q - 1/2`.
    pub fn spins_of(state: &BinaryState) -> Vec<f64> {
        state.bits().iter().map(|&q| f64::from(q) - 0.5).collect()
    }

    pub fn energy(&self, spins: &[f64]) -> Result<f64> {
        if spins.len() != self.fields.len() {
            return Err(Error::DimensionMismatch { expected: self.fields.len(), found: spins.len() });
        }
        let mut e: f64 = self.fields.iter().zip(spins).map(|(h, j)| h * j).sum();
        for (&(r, s), &b) in &self.couplings {
            e += 2.0 * b * spins[r] * spins[s];
        }
        Ok(e)
    }

    pub fn is_zero(&self) -> bool {
        self.fields.iter().all(|&h| h == 0.0) && self.couplings.is_empty() && self.offset == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    /// Integer value of the state, `Q_0` most significant.
    pub index: u64,
    pub energy: f64,
}

/// Every state of a model with its energy, sorted by energy then by state index.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    num_vars: usize,
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn state(&self, position: usize) -> BinaryState {
        BinaryState::from_index(self.entries[position].index, self.num_vars)
    }

    pub fn ground_state(&self) -> BinaryState {
        self.state(0)
    }

    /// E_0.
    pub fn ground_energy(&self) -> f64 {
        self.entries[0].energy
    }

    /// E_1, the second-lowest entry (equal to E_0 when the ground state is degenerate).
    pub fn first_excited(&self) -> Option<f64> {
        self.entries.get(1).map(|e| e.energy)
    }

    pub fn max_energy(&self) -> f64 {
        self.entries[self.entries.len() - 1].energy
    }

    /// Number of states with energy `<= E_0 + window`.
    pub fn count_within(&self, window: f64) -> usize {
        let limit = self.ground_energy() + window;
        self.entries.partition_point(|e| e.energy <= limit)
    }
}

/// Exact spectrum of `model` with the default cap.
pub fn brute_force_solve(model: &QuboModel) -> Result<Spectrum> {
    brute_force_solve_with(model, DEFAULT_ENUMERATION_CAP, Execution::default())
}

pub fn brute_force_solve_with(model: &QuboModel, cap: usize, exec: Execution) -> Result<Spectrum> {
    let n = model.num_vars();
    if n > cap || n > 63 {
        return Err(Error::TooLarge { num_vars: n, cap });
    }
    let total = 1u64 << n;
    let chunk_bits = n.min(12);
    let chunk = 1u64 << chunk_bits;
    let chunks = (total / chunk) as usize;
    let mut entries: Vec<SpectrumEntry> = map_indexed(chunks, exec, |c| {
        let start = c as u64 * chunk;
        (start..start + chunk)
            .map(|index| SpectrumEntry { index, energy: model.energy_of_index(index) })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    entries.sort_unstable_by(|a, b| a.energy.total_cmp(&b.energy).then(a.index.cmp(&b.index)));
    Ok(Spectrum { num_vars: n, entries })
}

/// Minimum energy and every state attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    /// Sorted by state index.
    pub states: Vec<BinaryState>,
}

/// Exhaustive minimisation without storing the spectrum.
///
/// Walks each block of the state space in Gray-code order with incremental
/// energy updates, then re-evaluates near-minimal candidates exactly. States
/// whose exact energy is within `tie_tolerance` of the minimum are all
/// returned. Suitable for embedded models of up to ~30 variables.
pub fn ground_states(model: &QuboModel, cap: usize, tie_tolerance: f64, exec: Execution) -> Result<GroundStates> {
    let n = model.num_vars();
    if n > cap || n > 63 {
        return Err(Error::TooLarge { num_vars: n, cap });
    }
    if n == 0 {
        return Ok(GroundStates { energy: 0.0, states: vec![BinaryState::zeros(0)] });
    }
    let fields = model.local_fields();
    let high_bits = n.min(6);
    let low_bits = n - high_bits;
    // Incremental sums drift slightly; candidates inside this slack are re-checked exactly.
    let slack = 1e-9 * (1.0 + model.max_abs_coefficient() * n as f64) + tie_tolerance;

    let per_block = map_indexed(1usize << high_bits, exec, |block| {
        let start = (block as u64) << low_bits;
        let mut bits = BinaryState::from_index(start, n).into_bits();
        let mut h = fields.fields_for(&bits);
        let mut energy = model.energy_of_index(start);
        let mut best = energy;
        let mut candidates = vec![(start, energy)];
        let mut index = start;
        for step in 1u64..(1u64 << low_bits) {
            let bit = step.trailing_zeros() as usize;
            let var = n - 1 - bit;
            energy += fields.flip(var, &mut bits, &mut h);
            index ^= 1 << bit;
            if energy < best - slack {
                best = energy;
                candidates.retain(|&(_, e)| e <= best + slack);
            }
            if energy <= best + slack {
                best = best.min(energy);
                candidates.push((index, energy));
            }
        }
        candidates
    });

    let mut exact: Vec<(u64, f64)> =
        per_block.into_iter().flatten().map(|(index, _)| (index, model.energy_of_index(index))).collect();
    let min = exact.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    exact.retain(|&(_, e)| e <= min + tie_tolerance);
    exact.sort_unstable_by_key(|&(index, _)| index);
    Ok(GroundStates { energy: min, states: exact.into_iter().map(|(i, _)| BinaryState::from_index(i, n)).collect() })
}
