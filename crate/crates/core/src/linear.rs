//! Linear systems `M·x = Y` compiled to QUBO over the bits of every `x_i`.
//!
//! Variable `i` is encoded by `R` bits; bit `r` of variable `i` is QUBO
//! vertex `ℓ = i·R + r`. With `Z = Y + d·M·1` and `G = MᵀM` the objective
//! `‖M·x − Y‖² = ‖c·M·χ − Z‖²` expands to
//!
//! ```text
//! a_{ir}        = c²·2^{-2r}·G_ii − 2c·2^{-r}·(MᵀZ)_i
//! b_{(ir),(js)} = c²·2^{-r-s}·G_ij        (every ℓ ≠ ℓ', including i = j)
//! constant      = ‖Z‖²
//! ```

use nalgebra::{DMatrix, DVector};

use crate::division::{IterationRecord, IterationTrace};
use crate::encoding::{exponent_offset, BinaryEncoding};
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};
use crate::qubo::{BinaryState, QuboModel};
use crate::solver::{ChainStats, Solver};

/// Below this `σ_min/σ_max` a matrix is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

pub fn linear_index(i: usize, r: usize, resolution: usize) -> usize {
    i * resolution + r
}

pub fn inverse_index(l: usize, resolution: usize) -> (usize, usize) {
    (l / resolution, l % resolution)
}

/// Checked bijection between `(variable, bit)` pairs and vertex indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMap {
    n: usize,
    resolution: usize,
}

impl IndexMap {
    pub fn new(n: usize, resolution: usize) -> Self {
        IndexMap { n, resolution }
    }

    pub fn len(&self) -> usize {
        self.n * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn linear(&self, i: usize, r: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, size: self.n });
        }
        if r >= self.resolution {
            return Err(Error::IndexOutOfRange { index: r, size: self.resolution });
        }
        Ok(linear_index(i, r, self.resolution))
    }

    pub fn inverse(&self, l: usize) -> Result<(usize, usize)> {
        if l >= self.len() {
            return Err(Error::IndexOutOfRange { index: l, size: self.len() });
        }
        Ok(inverse_index(l, self.resolution))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProblem {
    m: DMatrix<f64>,
    y: DVector<f64>,
    enc: BinaryEncoding,
}

impl MatrixProblem {
    /// Rejects non-square, mismatched, non-finite or numerically singular input.
    pub fn new(m: DMatrix<f64>, y: DVector<f64>, enc: BinaryEncoding) -> Result<Self> {
        check_square(&m)?;
        if y.len() != m.nrows() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: y.len() });
        }
        if m.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix and right-hand side must be finite".into()));
        }
        let (max, min) = singular_value_extremes(&m)?;
        let ratio = min / max;
        if ratio.is_nan() || ratio < SINGULARITY_THRESHOLD {
            return Err(Error::Singular { ratio: if max > 0.0 { ratio } else { 0.0 } });
        }
        Ok(MatrixProblem { m, y, enc })
    }

    pub fn from_rows(rows: &[Vec<f64>], y: &[f64], enc: BinaryEncoding) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m, DVector::from_column_slice(y), enc)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn encoding(&self) -> BinaryEncoding {
        self.enc
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn index_map(&self) -> IndexMap {
        IndexMap::new(self.n(), self.enc.resolution())
    }

    /// Same matrix with a different right-hand side, skipping the singularity screen.
    fn with_rhs(&self, y: DVector<f64>) -> Self {
        MatrixProblem { m: self.m.clone(), y, enc: self.enc }
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidParameter("matrix must be at least 1x1".into()));
    }
    Ok(())
}

pub fn build_linear_qubo(p: &MatrixProblem) -> QuboModel {
    let (c, d) = (p.enc.c(), p.enc.d());
    let map = p.index_map();
    let n = p.n();
    let gram = p.m.transpose() * &p.m;
    let z = &p.y + &p.m * DVector::from_element(n, d);
    let mz = p.m.transpose() * &z;
    let place = BinaryEncoding::place_value;

    let mut model = QuboModel::new(map.len());
    for l in 0..map.len() {
        let (i, r) = inverse_index(l, p.enc.resolution());
        let w = c * c * place(2 * r) * gram[(i, i)] - 2.0 * c * place(r) * mz[i];
        model.set_weight(l, w).expect("index within model");
        for k in l + 1..map.len() {
            let (j, s) = inverse_index(k, p.enc.resolution());
            model.set_coupling(l, k, c * c * place(r + s) * gram[(i, j)]).expect("distinct indices");
        }
    }
    model.set_constant(z.norm_squared());
    model
}

/// `x_i = c·Σ_r 2^{-r}·q_{ℓ(i,r)} − d`.
pub fn reconstruct_solution(bits: &[u8], map: IndexMap, enc: BinaryEncoding) -> Result<DVector<f64>> {
    if bits.len() != map.len() {
        return Err(Error::DimensionMismatch { expected: map.len(), found: bits.len() });
    }
    let r = enc.resolution();
    let values = bits.chunks(r).map(|block| enc.decode(block)).collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub x: DVector<f64>,
    pub bits: BinaryState,
    /// Energy of `bits` under the λ-scaled model, constant excluded.
    pub scaled_energy: f64,
    /// Same energy before λ-scaling.
    pub raw_energy: f64,
    /// `‖M·x − Y‖₂`.
    pub residual_norm: f64,
    pub chains: Option<ChainStats>,
}

pub fn solve_linear(p: &MatrixProblem, solver: &Solver) -> Result<LinearSolution> {
    let (scaled, _) = build_linear_qubo(p).scale_by_max_coupling();
    let outcome = solver.solve(&scaled)?;
    let x = reconstruct_solution(outcome.state.bits(), p.index_map(), p.enc)?;
    Ok(LinearSolution {
        residual_norm: (&p.m * &x - &p.y).norm(),
        x,
        raw_energy: scaled.raw_energy(&outcome.state)?,
        bits: outcome.state,
        scaled_energy: outcome.energy,
        chains: outcome.chains,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    /// Columns whose solve failed are filled with NaN.
    pub inverse: DMatrix<f64>,
    pub failures: Vec<(usize, Error)>,
}

impl Inversion {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Solves `M·x = e_j` for every basis vector; the solutions are the columns
/// of `M⁻¹`.
pub fn invert_matrix(m: &DMatrix<f64>, enc: BinaryEncoding, solver: &Solver) -> Result<Inversion> {
    invert_matrix_with(m, enc, solver, Execution::default())
}

pub fn invert_matrix_with(
    m: &DMatrix<f64>,
    enc: BinaryEncoding,
    solver: &Solver,
    exec: Execution,
) -> Result<Inversion> {
    let n = m.nrows();
    let base = MatrixProblem::new(m.clone(), DVector::zeros(n), enc)?;
    let columns = map_indexed(n, exec, |j| {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        solve_linear(&base.with_rhs(e), solver)
    });
    let mut inverse = DMatrix::from_element(n, n, f64::NAN);
    let mut failures = Vec::new();
    for (j, column) in columns.into_iter().enumerate() {
        match column {
            Ok(sol) => inverse.set_column(j, &sol.x),
            Err(e) => failures.push((j, e)),
        }
    }
    Ok(Inversion { inverse, failures })
}

const POWER_MAX_ITER: usize = 100_000;
const POWER_TOL: f64 = 1e-15;

/// `(σ_max, σ_min)` by power iteration on `MᵀM` and on its inverse (applied
/// through an LU factorisation of `M`). `σ_min` is 0 for exactly singular `M`.
pub fn singular_value_extremes(m: &DMatrix<f64>) -> Result<(f64, f64)> {
    check_square(m)?;
    let gram = m.transpose() * m;
    let lambda_max = dominant_eigenvalue(|v| &gram * v, m.nrows());
    if lambda_max == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lu = m.clone().lu();
    let lu_t = m.transpose().lu();
    let mut failed = false;
    let inv_max = dominant_eigenvalue(
        |v| match lu_t.solve(v).and_then(|w| lu.solve(&w)) {
            Some(u) if u.iter().all(|x| x.is_finite()) => u,
            _ => {
                failed = true;
                DVector::zeros(v.len())
            }
        },
        m.nrows(),
    );
    let sigma_min = if failed || inv_max.is_nan() || inv_max <= 0.0 || inv_max.is_infinite() {
        0.0
    } else {
        (1.0 / inv_max).sqrt()
    };
    Ok((lambda_max.sqrt(), sigma_min))
}

/// Largest eigenvalue of a symmetric positive semidefinite operator.
fn dominant_eigenvalue(mut apply: impl FnMut(&DVector<f64>) -> DVector<f64>, n: usize) -> f64 {
    // A start vector with no special symmetry, so it is not orthogonal to
    // the dominant eigenvector of structured matrices.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + ((i + 1) as f64 * 0.618_033_988_749_895).fract());
    v.normalize_mut();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = apply(&v);
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 || !norm.is_finite() {
            return if norm == 0.0 { 0.0 } else { f64::INFINITY };
        }
        v = w / norm;
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// `κ = σ_max/σ_min`; `+∞` for singular matrices.
pub fn condition_number(m: &DMatrix<f64>) -> Result<f64> {
    let (max, min) = singular_value_extremes(m)?;
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// `|λ|_max / |λ|_min` over the (possibly complex) eigenvalues; `+∞` if any
/// eigenvalue vanishes. Coincides with [`condition_number`] for normal matrices.
pub fn eigenvalue_condition_number(m: &DMatrix<f64>) -> Result<f64> {
    check_square(m)?;
    let moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let min = moduli.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

/// Iterative refinement with the residual as the next right-hand side.
///
/// Each round shifts the residual by the exponent offset of `‖r‖₂` against
/// `σ_min`, which bounds every component of the shifted solution by 1.
/// Stops once `‖r‖_∞ ≤ tol·max(1, ‖Y‖_∞)`.
pub fn iterate_linear(
    p: &MatrixProblem,
    tol: f64,
    max_iter: usize,
    solver: &Solver,
) -> Result<IterationTrace<DVector<f64>>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let (_, sigma_min) = singular_value_extremes(&p.m)?;
    let threshold = tol * p.y.amax().max(1.0);
    let mut records = Vec::new();
    let mut solution = DVector::zeros(p.n());
    let mut residual = p.y.clone();
    while residual.amax() > threshold && records.len() < max_iter {
        let offset = exponent_offset(residual.norm(), sigma_min)?;
        let round = solve_linear(&p.with_rhs(residual.map(|v| offset.shift_down(v))), solver)?;
        let contribution = round.x.map(|v| offset.shift_up(v));
        solution += &contribution;
        residual -= &p.m * &contribution;
        records.push(IterationRecord {
            partial: round.x,
            offset: offset.offset,
            contribution,
            residual: residual.clone(),
        });
    }
    let error = residual.amax();
    Ok(IterationTrace { records, solution, residual, error, converged: error <= threshold })
}

/// Parsed problem file: `N R`, then `N` matrix rows, then optionally `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub matrix: DMatrix<f64>,
    pub rhs: Option<DVector<f64>>,
    pub resolution: usize,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let numbers = |lineno: usize, line: &str| {
            line.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| Error::Parse { line: lineno, message: format!("{t:?}: {e}") }))
                .collect::<Result<Vec<_>>>()
        };
        let (lineno, header) = lines.next().ok_or(Error::Parse { line: 0, message: "empty problem file".into() })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad header token {t:?}") }))
            .collect::<Result<_>>()?;
        let [n, resolution] = dims[..] else {
            return Err(Error::Parse { line: lineno, message: "header must be `N R`".into() });
        };
        if n == 0 || resolution == 0 {
            return Err(Error::Parse { line: lineno, message: "N and R must be positive".into() });
        }
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (lineno, line) =
                lines.next().ok_or(Error::Parse { line: 0, message: format!("expected {n} matrix rows") })?;
            let row = numbers(lineno, line)?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected {n} values, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        let rhs = match lines.next() {
            None => None,
            Some((lineno, line)) => {
                let y = numbers(lineno, line)?;
                if y.len() != n {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected {n} values, found {}", y.len()),
                    });
                }
                Some(DVector::from_vec(y))
            }
        };
        if let Some((lineno, _)) = lines.next() {
            return Err(Error::Parse { line: lineno, message: "unexpected trailing content".into() });
        }
        Ok(ProblemFile { matrix: DMatrix::from_fn(n, n, |i, j| rows[i][j]), rhs, resolution })
    }

    /// Problem with encoding `(R, c, d)`; fails if the file has no `Y` line.
    pub fn into_problem(self, c: f64, d: f64) -> Result<MatrixProblem> {
        let rows = self.matrix.nrows();
        let y =
            self.rhs.ok_or(Error::Parse { line: 0, message: format!("missing right-hand side after {rows} rows") })?;
        MatrixProblem::new(self.matrix, y, BinaryEncoding::new(self.resolution, c, d)?)
    }
}
