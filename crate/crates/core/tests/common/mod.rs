#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use qubo_linsolve::QuboModel;

/// Random model on `lo..=hi` variables; roughly half the couplings are zero.
pub fn qubo(lo: usize, hi: usize) -> impl Strategy<Value = QuboModel> {
    (lo..=hi).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (
            prop::collection::vec(-4.0f64..4.0, n),
            prop::collection::vec(prop_oneof![Just(0.0), -3.0f64..3.0], pairs),
            -2.0f64..2.0,
        )
            .prop_map(move |(weights, couplings, constant)| {
                let mut model = QuboModel::with_weights(weights);
                let mut k = 0;
                for r in 0..n {
                    for s in r + 1..n {
                        model.set_coupling(r, s, couplings[k]).unwrap();
                        k += 1;
                    }
                }
                model.set_constant(constant);
                model
            })
    })
}

/// Strictly diagonally dominant `n×n` matrix, so never singular.
pub fn dominant_matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let mut m = DMatrix::from_vec(n, n, v);
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum();
            m[(i, i)] = m[(i, i)].signum().max(0.0).mul_add(2.0, -1.0) * (off + 0.5 + m[(i, i)].abs());
        }
        m
    })
}

/// All `2^n` states of `n` variables.
pub fn all_states(n: usize) -> impl Iterator<Item = qubo_linsolve::BinaryState> {
    (0..1u64 << n).map(move |i| qubo_linsolve::BinaryState::from_index(i, n))
}
