//! Division `x = y/m` as the minimum of `(m·x − y)²` over encoded `x`.

use crate::encoding::{exponent_offset, BinaryEncoding};
use crate::error::{Error, Result};
use crate::qubo::{BinaryState, QuboModel};
use crate::solver::{ChainStats, Solver};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisionProblem {
    m: f64,
    y: f64,
    enc: BinaryEncoding,
}

impl DivisionProblem {
    pub fn new(m: f64, y: f64, enc: BinaryEncoding) -> Result<Self> {
        if m == 0.0 {
            return Err(Error::ZeroDivisor);
        }
        if !m.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParameter(format!("m = {m} and y = {y} must be finite")));
        }
        Ok(DivisionProblem { m, y, enc })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn encoding(&self) -> BinaryEncoding {
        self.enc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisionResult {
    pub x: f64,
    pub bits: BinaryState,
    /// Energy of `bits` under the λ-scaled model, constant excluded.
    pub scaled_energy: f64,
    /// `(m·x − y)²`.
    pub raw_objective: f64,
    pub offset_applied: i32,
    pub chains: Option<ChainStats>,
}

/// Expands `(m(c·χ − d) − y)²` with `Q_r² = Q_r`:
///
/// ```text
/// A_r  = m²c²·2^{-2r} − 2mc(md + y)·2^{-r}
/// B_rs = m²c²·2^{-r-s}
/// constant = (md + y)²
/// ```
pub fn build_division_qubo(p: &DivisionProblem) -> QuboModel {
    let (m, y, c, d) = (p.m, p.y, p.enc.c(), p.enc.d());
    let resolution = p.enc.resolution();
    let place = BinaryEncoding::place_value;
    let quad = m * m * c * c;
    let lin = 2.0 * m * c * (m * d + y);
    let mut model = QuboModel::with_weights((0..resolution).map(|r| quad * place(2 * r) - lin * place(r)).collect());
    for r in 0..resolution {
        for s in r + 1..resolution {
            model.set_coupling(r, s, quad * place(r + s)).expect("indices are distinct and in range");
        }
    }
    model.set_constant((m * d + y).powi(2));
    model
}

/// Single-shot division on the λ-scaled model, no exponent offset.
pub fn solve_division(p: &DivisionProblem, solver: &Solver) -> Result<DivisionResult> {
    let (scaled, _) = build_division_qubo(p).scale_by_max_coupling();
    let outcome = solver.solve(&scaled)?;
    let x = p.enc.decode_state(&outcome.state)?;
    Ok(DivisionResult {
        x,
        raw_objective: (p.m * x - p.y).powi(2),
        bits: outcome.state,
        scaled_energy: outcome.energy,
        offset_applied: 0,
        chains: outcome.chains,
    })
}

/// One refinement round: `residual_after = residual_before − m·contribution`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    /// Solution of the shifted problem as decoded from the ground state.
    pub partial: T,
    pub offset: i32,
    /// `2^{offset}·partial`, the amount added to the running solution.
    pub contribution: T,
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    pub solution: T,
    pub residual: T,
    /// Largest residual component magnitude at exit.
    pub error: f64,
    pub converged: bool,
}

impl<T> IterationTrace<T> {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// Iterative refinement: each round rescales the residual by its exponent
/// offset against `m`, solves, and subtracts the scaled-back contribution.
/// Stops once `|residual| ≤ tol·max(1, |y|)`; running out of rounds leaves
/// the trace marked unconverged.
pub fn iterate_division(
    y: f64,
    m: f64,
    enc: BinaryEncoding,
    tol: f64,
    max_iter: usize,
    solver: &Solver,
) -> Result<IterationTrace<f64>> {
    DivisionProblem::new(m, y, enc)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let threshold = tol * y.abs().max(1.0);
    let mut records = Vec::new();
    let mut solution = 0.0;
    let mut residual = y;
    while residual.abs() > threshold && records.len() < max_iter {
        let offset = exponent_offset(residual, m)?;
        let round = solve_division(&DivisionProblem::new(m, offset.shift_down(residual), enc)?, solver)?;
        let contribution = offset.shift_up(round.x);
        solution += contribution;
        residual -= m * contribution;
        records.push(IterationRecord { partial: round.x, offset: offset.offset, contribution, residual });
    }
    Ok(IterationTrace { records, solution, residual, error: residual.abs(), converged: residual.abs() <= threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(m: f64, y: f64) -> DivisionProblem {
        DivisionProblem::new(m, y, BinaryEncoding::default()).unwrap()
    }

    #[test]
    fn unit_coefficients() {
        let model = build_division_qubo(&problem(1.0, 1.0));
        assert_eq!(model.weight(0), -4.0);
        assert_eq!(model.weight(1), -3.0);
        assert_eq!(model.coupling(0, 1), 2.0);
        assert_eq!(model.constant(), 4.0);
        assert_eq!(model.num_couplings(), 6);
    }

    #[test]
    fn half_divisor_scaling() {
        let model = build_division_qubo(&problem(0.5, 0.5));
        assert_eq!(model.weight(0), -1.0);
        let (scaled, _) = model.scale_by_max_coupling();
        assert_eq!(scaled.scale(), 0.5);
        let out = solve_division(&problem(0.5, 0.5), &Solver::BruteForce).unwrap();
        assert_eq!(out.scaled_energy, -2.0);
    }

    #[test]
    fn energy_plus_constant_is_squared_error() {
        let p = DivisionProblem::new(0.75, -0.4, BinaryEncoding::new(5, 1.5, 0.7).unwrap()).unwrap();
        let model = build_division_qubo(&p);
        for i in 0..32 {
            let s = BinaryState::from_index(i, 5);
            let x = p.encoding().decode_state(&s).unwrap();
            let lhs = model.energy(&s).unwrap() + model.constant();
            assert!((lhs - (0.75 * x + 0.4).powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn table_examples() {
        let out = solve_division(&problem(1.0, 0.25), &Solver::BruteForce).unwrap();
        assert_eq!((out.x, out.bits.to_string(), out.scaled_energy), (0.25, "0101".into(), -0.78125));
        let rounded = solve_division(&problem(1.0, 0.9), &Solver::BruteForce).unwrap();
        assert_eq!(rounded.x, 1.0);
        assert!((rounded.scaled_energy + 1.8).abs() < 1e-12);
        let zero = solve_division(&problem(0.25, 0.0), &Solver::BruteForce).unwrap();
        assert_eq!((zero.x, zero.bits.to_string()), (0.0, "0100".into()));
        let neg = solve_division(&problem(1.0, -1.0), &Solver::BruteForce).unwrap();
        assert_eq!((neg.bits.to_string(), neg.scaled_energy), ("0000".into(), 0.0));
    }

    #[test]
    fn zero_divisor_rejected() {
        assert_eq!(DivisionProblem::new(0.0, 1.0, BinaryEncoding::default()), Err(Error::ZeroDivisor));
    }

    #[test]
    fn iteration_counts() {
        let enc = BinaryEncoding::default();
        let run = |y, m| iterate_division(y, m, enc, 1e-6, 50, &Solver::BruteForce).unwrap();
        let exact = run(0.75, 1.0);
        assert_eq!((exact.iterations(), exact.solution), (1, 0.75));
        let third = run(0.3, 0.9);
        assert!(third.converged);
        assert!((third.solution - 1.0 / 3.0).abs() < 1e-6);
        let seventh = run(1.0, 7.0);
        assert!((seventh.solution - 1.0 / 7.0).abs() < 1e-6);
        let zero = run(0.0, 3.0);
        assert_eq!((zero.iterations(), zero.solution, zero.converged), (0, 0.0, true));
    }

    #[test]
    fn records_satisfy_residual_update() {
        let trace = iterate_division(0.3, 0.9, BinaryEncoding::default(), 1e-6, 50, &Solver::BruteForce).unwrap();
        let mut prev = 0.3;
        for rec in &trace.records {
            assert_eq!(rec.residual, prev - 0.9 * rec.contribution);
            prev = rec.residual;
        }
    }

    #[test]
    fn stalls_are_flagged() {
        let trace = iterate_division(0.3, 0.9, BinaryEncoding::default(), 1e-6, 2, &Solver::BruteForce).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterations(), 2);
    }
}
