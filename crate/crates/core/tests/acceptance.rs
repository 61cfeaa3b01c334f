//! Acceptance suite: one PASS/FAIL line per criterion, with logged detail.
//!
//! Runs as a plain binary so the report is always printed. Exits non-zero if
//! any criterion fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qubo_linsolve::anneal::{sample, sample_embedded};
use qubo_linsolve::chimera::{chain_counter_term, embed_complete_graph, embed_hamiltonian, UnembedPolicy, Unembedded};
use qubo_linsolve::division::{build_division_qubo, iterate_division, solve_division, DivisionProblem};
use qubo_linsolve::landscape::{degeneracy_report, gray_sequence, Window};
use qubo_linsolve::linear::{build_linear_qubo, condition_number, eigenvalue_condition_number, solve_linear};
use qubo_linsolve::qubo::{ground_states, BinaryState, QuboModel, DEFAULT_ENUMERATION_CAP};
use qubo_linsolve::{
    fixtures, BinaryEncoding, ChainPenalty, ChimeraGraph, Error, Execution, MatrixProblem, ProblemFile, SamplerConfig,
    Solver,
};

type Criterion = (&'static str, fn() -> Report);

struct Report {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Report { passed: true, summary: String::new(), details: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        if !ok {
            self.passed = false;
        }
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn log(&mut self, line: String) {
        self.details.push(format!("note {line}"));
    }
}

fn enc() -> BinaryEncoding {
    BinaryEncoding::default()
}

fn problem(name: &str) -> MatrixProblem {
    ProblemFile::parse(fixtures::get(name).unwrap()).unwrap().into_problem(2.0, 1.0).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// (y, divisors, reference x, reference ground state, reference energy)
const EXACT_DIVISION: &[(f64, &[f64], f64, &str, f64)] = &[
    (1.00, &[1.0], 1.00, "1000", -2.0),
    (0.50, &[0.5], 1.00, "1000", -2.0),
    (1.00, &[-1.0], -1.00, "0000", 0.0),
    (-1.00, &[1.0], -1.00, "0000", 0.0),
    (0.50, &[-0.5], -1.00, "0000", 0.0),
    (-0.50, &[0.5], -1.00, "0000", 0.0),
    (0.75, &[1.0], 0.75, "0111", -1.53125),
    (-0.75, &[1.0], -0.75, "0001", -0.03125),
    (0.75, &[-1.0], -0.75, "0001", -0.03125),
    (0.50, &[1.0], 0.50, "0110", -1.125),
    (-0.50, &[1.0], -0.50, "0010", -0.125),
    (0.50, &[-1.0], -0.50, "0010", -0.125),
    (0.25, &[1.0], 0.25, "0101", -0.78125),
    (-0.25, &[1.0], -0.25, "0011", -0.28125),
    (0.25, &[-1.0], -0.25, "0011", -0.28125),
    (0.25, &[0.5], 0.50, "0110", -1.125),
    (-0.25, &[0.5], -0.50, "0010", -0.125),
    (0.25, &[-0.5], -0.50, "0010", -0.125),
    (0.00, &[1.0, -1.0], 0.00, "0100", -0.5),
    (0.00, &[0.75, -0.75], 0.00, "0100", -0.5),
    (0.00, &[0.5, -0.5], 0.00, "0100", -0.5),
    (0.00, &[0.25, -0.25], 0.00, "0100", -0.5),
];

// (y, m, reference rounded x, reference energy)
const ROUNDED_DIVISION: &[(f64, f64, f64, f64)] = &[
    (0.90, 1.0, 1.00, -1.8),
    (-0.90, 1.0, -1.00, 0.0),
    (0.80, 1.0, 0.75, -1.6875),
    (-0.80, 1.0, -0.75, -0.01875),
    (0.70, 1.0, 0.75, -1.44375),
    (-0.70, 1.0, -0.75, -0.04374),
    (0.60, 1.0, 0.50, -1.275),
    (-0.60, 1.0, -0.50, -0.075),
    (0.40, 1.0, 0.50, -0.975),
    (-0.40, 1.0, -0.50, -0.175),
    (0.30, 1.0, 0.25, -0.84375),
    (-0.30, 1.0, -0.25, -0.24375),
    (0.20, 1.0, 0.25, -0.71875),
    (-0.20, 1.0, -0.25, -0.31875),
    (0.10, 1.0, 0.00, -0.6),
    (-0.10, 1.0, 0.00, -0.4),
    (0.30, 0.9, 0.25, -0.88542),
    (-0.30, 0.9, -0.25, -0.21875),
    (1.0, 7.0, 0.25, -0.64732),
    (-1.0, 7.0, -0.25, -0.36161),
];

/// The +0.80 row's reference energy belongs to a different state; this is the
/// energy of the reference solution 0.75.
const ROUNDED_PLUS_080_ORACLE: f64 = -1.61875;

// (y, m, reference iterations)
const ITERATED_DIVISION: &[(f64, f64, usize)] = &[
    (0.25, 1.0, 1),
    (-0.25, 1.0, 1),
    (0.50, 1.0, 1),
    (-0.50, 1.0, 1),
    (0.75, 1.0, 1),
    (-0.75, 1.0, 1),
    (0.80, 1.0, 5),
    (-0.80, 1.0, 5),
    (0.70, 1.0, 5),
    (-0.70, 1.0, 5),
    (0.10, 1.0, 5),
    (-0.10, 1.0, 5),
    (0.30, 0.9, 10),
    (-0.30, 0.9, 10),
    (1.0, 7.0, 7),
    (-1.0, 7.0, 7),
];

// (fixture, solution, reference energy, whether the energy is an acceptance target)
const SYSTEMS_2X2: &[(&str, [f64; 2], f64, bool)] = &[
    ("1a", [-0.25, 0.75], -2.167, true),
    ("1b", [0.75, -0.25], -2.167, true),
    ("1c", [1.0, 1.0], -0.444, true),
    ("1d", [-1.0, 1.0], -1.889, true),
    ("1e", [1.0, -1.0], -1.650, false),
    ("1f", [1.0, 0.0], -2.125, true),
    ("1g", [0.25, -0.5], -0.925, true),
    ("1h", [0.25, 0.25], -2.03125, true),
    ("1i", [2.0, 1.0], -2.450126, false),
    ("1j", [2.0, 1.0], -2.532545, false),
];

// (fixture used for acceptance, verbatim fixture, solution, reference energy)
const SYSTEMS_3X3: &[(&str, &str, [f64; 3], Option<f64>)] = &[
    ("2a-corrected", "2a", [0.25, -0.5, 1.0], Some(-15.5625)),
    ("2b-corrected", "2b", [0.25, -0.5, 0.0], Some(-12.5625)),
    ("2c", "2c", [0.25, 0.0, -0.5], Some(-13.5)),
    ("2d", "2d", [1.0, 0.25, -0.5], Some(-15.6875)),
    ("2e", "2e", [0.0, 0.25, -0.5], Some(-12.75)),
    ("2f", "2f", [0.0, 0.25, -0.75], None),
    ("2g-corrected", "2g", [0.0, 0.25, -0.75], Some(-557.437)),
];

fn criterion_1() -> Report {
    let mut rep = Report::new();
    let start = Instant::now();
    let mut rows_ok = 0;
    for &(y, divisors, x, bits, energy) in EXACT_DIVISION {
        let mut row_ok = true;
        for &m in divisors {
            let out = solve_division(&DivisionProblem::new(m, y, enc()).unwrap(), &Solver::BruteForce).unwrap();
            let ok = out.bits.to_string() == bits && close(out.scaled_energy, energy, 1e-6) && out.x == x;
            row_ok &= ok;
            rep.check(ok, format!("y={y:+.2} m={m:+.2}: x={} bits={} E={}", out.x, out.bits, out.scaled_energy));
        }
        rows_ok += usize::from(row_ok);
    }
    let elapsed = start.elapsed().as_secs_f64();
    rep.check(elapsed < 1.0, format!("runtime {elapsed:.3} s (< 1 s)"));
    rep.summary = format!("{rows_ok}/{} rows, {elapsed:.3} s", EXACT_DIVISION.len());
    rep
}

fn criterion_2() -> Report {
    let mut rep = Report::new();
    let mut rows_ok = 0;
    for &(y, m, x, reference) in ROUNDED_DIVISION {
        let out = solve_division(&DivisionProblem::new(m, y, enc()).unwrap(), &Solver::BruteForce).unwrap();
        let target = if y == 0.80 && m == 1.0 { ROUNDED_PLUS_080_ORACLE } else { reference };
        let ok = out.x == x && close(out.scaled_energy, target, 1e-4);
        rows_ok += usize::from(ok);
        rep.check(
            ok,
            format!(
                "y={y:+.2} m={m}: x={} bits={} E={:.6} (reference {reference})",
                out.x, out.bits, out.scaled_energy
            ),
        );
        if target != reference {
            rep.log(format!(
                "y={y:+.2}: reference energy {reference} is not the energy of x={x}; compared with {target}"
            ));
        }
    }
    rep.summary = format!("{rows_ok}/{} rows", ROUNDED_DIVISION.len());
    rep
}

fn criterion_3() -> Report {
    let mut rep = Report::new();
    let mut rows_ok = 0;
    for &(y, m, reference_iters) in ITERATED_DIVISION {
        let trace = iterate_division(y, m, enc(), 1e-6, 100, &Solver::BruteForce).unwrap();
        let exact = y / m;
        let mut ok = trace.converged && close(trace.solution, exact, 1e-6);
        ok &= trace.iterations().abs_diff(reference_iters) <= 3;
        if reference_iters == 1 {
            ok &= trace.iterations() == 1;
        }
        if (y.abs() == 0.8 || y.abs() == 0.7) && m == 1.0 {
            ok &= trace.iterations() <= 6;
        }
        rows_ok += usize::from(ok);
        rep.check(
            ok,
            format!(
                "y={y:+.2} m={m}: x={:.9} after {} iterations (reference {reference_iters}), |x - y/m| = {:.1e}",
                trace.solution,
                trace.iterations(),
                (trace.solution - exact).abs()
            ),
        );
    }
    rep.log("1/7 rows: the reference 0.1248751 is not within tolerance of 1/7; the true quotient is the target".into());
    rep.summary = format!("{rows_ok}/{} rows", ITERATED_DIVISION.len());
    rep
}

fn criterion_4() -> Report {
    let mut rep = Report::new();
    let mut rows_ok = 0;
    for &(name, x, reference, energy_checked) in SYSTEMS_2X2 {
        let sol = solve_linear(&problem(name), &Solver::BruteForce).unwrap();
        let mut ok = sol.x.as_slice() == x;
        if energy_checked {
            ok &= close(sol.scaled_energy, reference, 1e-3);
        }
        rows_ok += usize::from(ok);
        rep.check(
            ok,
            format!(
                "{name}: x={:?} bits={} scaled E={:.6} raw E={:.6} (reference {reference})",
                sol.x.as_slice(),
                sol.bits,
                sol.scaled_energy,
                sol.raw_energy
            ),
        );
        if !energy_checked {
            rep.log(format!(
                "{name}: energy logged only; oracle scaled {:.6} vs reference {reference}",
                sol.scaled_energy
            ));
        }
    }
    rep.summary = format!("{rows_ok}/{} tests", SYSTEMS_2X2.len());
    rep
}

fn criterion_5() -> Report {
    let mut rep = Report::new();
    let start = Instant::now();
    let mut rows_ok = 0;
    for &(name, verbatim, x, reference) in SYSTEMS_3X3 {
        let sol = solve_linear(&problem(name), &Solver::BruteForce).unwrap();
        let ok = sol.x.as_slice() == x;
        rows_ok += usize::from(ok);
        let reference = reference.map_or("N/A".to_string(), |e| e.to_string());
        rep.check(
            ok,
            format!("{name}: x={:?} raw E={:.4} (reference x={x:?}, E={reference})", sol.x.as_slice(), sol.raw_energy),
        );
        if name != verbatim {
            let raw = solve_linear(&problem(verbatim), &Solver::BruteForce).unwrap();
            rep.log(format!("{verbatim} verbatim: x={:?} raw E={:.4}", raw.x.as_slice(), raw.raw_energy));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    rep.check(elapsed < 10.0, format!("runtime {elapsed:.3} s (< 10 s)"));
    rep.summary = format!("{rows_ok}/{} tests, {elapsed:.3} s", SYSTEMS_3X3.len());
    rep
}

fn criterion_6() -> Report {
    let mut rep = Report::new();
    for alpha in [1.0, 3.0, 20.0] {
        let penalty = ChainPenalty::new(alpha).unwrap();
        let two = chain_counter_term(2, penalty);
        let two_e: Vec<f64> = (0..4).map(|i| two.energy_of_index(i)).collect();
        rep.check(two_e == [0.0, alpha, alpha, 0.0], format!("alpha={alpha}: 2-qubit energies {two_e:?}"));

        let three = chain_counter_term(3, penalty);
        let mut three_e: Vec<f64> = (0..8).map(|i| three.energy_of_index(i)).collect();
        three_e.sort_by(f64::total_cmp);
        let a = alpha / 3.0;
        let expected = [0.0, 0.0, 2.0 * a, 2.0 * a, 4.0 * a, 4.0 * a, 4.0 * a, 8.0 * a];
        let ok = three_e.iter().zip(expected).all(|(e, x)| close(*e, x, 1e-12 * alpha));
        let mut levels = three_e.clone();
        levels.dedup_by(|a, b| close(*a, *b, 1e-12 * alpha));
        rep.check(ok && levels.len() == 4, format!("alpha={alpha}: 3-qubit levels {levels:?}"));
    }
    rep.summary = "alpha in {1, 3, 20}".into();
    rep
}

fn random_model(rng: &mut ChaCha8Rng) -> QuboModel {
    let n = rng.gen_range(1..=8);
    let mut m = QuboModel::with_weights((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    for r in 0..n {
        for s in r + 1..n {
            if rng.gen_bool(0.7) {
                m.set_coupling(r, s, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
    }
    m
}

/// Chain strength that provably keeps every physical ground state intact.
///
/// Repairing a broken chain of length `N` lowers the counter-term by at least
/// `2α/N` and changes the logical part by at most `G_v = |w_v| + 2Σ_u |b_uv|`,
/// so any `α > (N/2)·max_v G_v` suffices; this uses twice that.
fn sufficient_alpha(logical: &QuboModel, chain_len: usize) -> f64 {
    let n = logical.num_vars();
    let mut g: Vec<f64> = logical.weights().iter().map(|w| w.abs()).collect();
    for ((u, v), b) in logical.couplings() {
        g[u] += 2.0 * b.abs();
        g[v] += 2.0 * b.abs();
    }
    let bound = g.into_iter().take(n).fold(0.0, f64::max) * chain_len as f64;
    bound.max(logical.max_abs_coefficient())
}

struct EmbeddingTally {
    exact: usize,
    degenerate: usize,
    wrong: Vec<String>,
    max_dev: f64,
}

fn embedding_trials(trials: usize, alpha_rule: impl Fn(&QuboModel, usize) -> f64) -> EmbeddingTally {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ac7);
    let mut tally = EmbeddingTally { exact: 0, degenerate: 0, wrong: Vec::new(), max_dev: 0.0 };
    for trial in 0..trials {
        let logical = random_model(&mut rng);
        let n = logical.num_vars();
        let graph = ChimeraGraph::for_complete_graph(n);
        let emb = embed_complete_graph(n, &graph).unwrap();
        let alpha = alpha_rule(&logical, emb.max_chain_length());
        let phys = embed_hamiltonian(&logical, &emb, &graph, ChainPenalty::new(alpha).unwrap()).unwrap();
        for i in 0..1u64 << n {
            let s = BinaryState::from_index(i, n);
            let dev = (phys.qubo.energy(&phys.lift(&s).unwrap()).unwrap() - logical.energy(&s).unwrap()).abs();
            tally.max_dev = tally.max_dev.max(dev);
        }
        let logical_ground = ground_states(&logical, DEFAULT_ENUMERATION_CAP, 1e-9, Execution::Parallel).unwrap();
        let phys_ground = ground_states(&phys.qubo, DEFAULT_ENUMERATION_CAP, 0.0, Execution::Parallel).unwrap();
        match phys.unembed(&phys_ground.states[0], UnembedPolicy::Discard).unwrap() {
            Unembedded::Intact(s) if s == logical_ground.states[0] => tally.exact += 1,
            Unembedded::Intact(s) if logical_ground.states.contains(&s) => tally.degenerate += 1,
            other => tally.wrong.push(format!("trial {trial} (n={n}, alpha={alpha:.3}): {other:?}")),
        }
    }
    tally
}

fn criterion_7() -> Report {
    let mut rep = Report::new();
    let trials = 200;
    let t = embedding_trials(trials, sufficient_alpha);
    let ground = t.exact + t.degenerate;
    rep.check(t.max_dev <= 1e-12, format!("max |E_phys - E_logical| over intact states = {:.2e}", t.max_dev));
    rep.check(
        ground as f64 >= 0.99 * trials as f64,
        format!("{ground}/{trials} physical ground states unembed to a logical ground state ({} via a degenerate alternate)", t.degenerate),
    );
    rep.check(t.wrong.is_empty(), format!("{} misses outside a degenerate logical ground level", t.wrong.len()));
    for line in &t.wrong {
        rep.log(line.clone());
    }

    let floor = embedding_trials(trials, |m, _| m.max_abs_coefficient());
    rep.log(format!(
        "at alpha = max|coefficient| only {}/{trials} physical ground states are intact logical ground states; \
         a 3-qubit chain break then costs 2*alpha/3, less than one vertex's coupling total",
        floor.exact + floor.degenerate
    ));
    rep.summary = format!(
        "{trials} models, alpha = chain length x max_v(|w_v| + 2 sum|b_uv|): {ground}/{trials} ground states preserved"
    );
    rep
}

fn criterion_8() -> Report {
    let mut rep = Report::new();
    let seeds = 50u64;
    let mut models: Vec<(String, QuboModel)> = Vec::new();
    for &(y, divisors, ..) in EXACT_DIVISION {
        for &m in divisors {
            let p = DivisionProblem::new(m, y, enc()).unwrap();
            models.push((format!("div y={y:+.2} m={m:+.2}"), build_division_qubo(&p).scale_by_max_coupling().0));
        }
    }
    for name in ["1a", "1b", "1c", "1d", "1e", "1f", "1g", "1h"] {
        models.push((name.to_string(), build_linear_qubo(&problem(name)).scale_by_max_coupling().0));
    }
    let mut worst: f64 = 1.0;
    for (name, model) in &models {
        let ground = ground_states(model, DEFAULT_ENUMERATION_CAP, 1e-12, Execution::Parallel).unwrap();
        let hits = (0..seeds)
            .filter(|&seed| {
                let set = sample(model, &SamplerConfig::with_reads(100, seed)).unwrap();
                ground.states.contains(&set.best().unwrap().state)
            })
            .count();
        let rate = hits as f64 / seeds as f64;
        worst = worst.min(rate);
        rep.check(rate >= 0.99, format!("{name}: {hits}/{seeds} seeds recover the ground state"));
    }

    let target = [0.0, 0.25, -0.75];
    let logical = build_linear_qubo(&problem("2g-corrected")).scale_by_max_coupling().0;
    let graph = ChimeraGraph::for_complete_graph(logical.num_vars());
    let unscaled = |alpha: f64| ChainPenalty::new(alpha / logical.scale()).unwrap();
    // Seeds fixed in advance; a single run can miss a near-degenerate target,
    // so report how often an independent 2500-read run gets there.
    let runs = 10u64;
    let mut recovered = 0;
    let mut details = Vec::new();
    for seed in 0..runs {
        match sample_embedded(
            &logical,
            &graph,
            unscaled(2200.0),
            &SamplerConfig::with_reads(2500, seed),
            UnembedPolicy::Discard,
        ) {
            Ok(run) => {
                let x = decode(&run.logical.best().unwrap().state, 3);
                recovered += usize::from(x == target);
                details.push(format!("seed {seed}: best x={x:?}, break fraction {:.3}", run.break_fraction()));
            }
            Err(e) => details.push(format!("seed {seed}: {e}")),
        }
    }
    rep.check(
        2 * recovered > runs as usize,
        format!("2g-corrected, alpha=2200, 2500 reads: target recovered in {recovered}/{runs} independent runs"),
    );
    for d in details {
        rep.log(d);
    }
    let config = SamplerConfig::with_reads(2500, 0);
    let weak = sample_embedded(&logical, &graph, unscaled(20.0), &config, UnembedPolicy::Discard);
    let broken = matches!(weak, Err(Error::BrokenChains { .. }));
    rep.check(
        broken,
        format!(
            "2g-corrected, alpha=20: {}",
            match &weak {
                Ok(run) => format!("{} of {} reads intact", run.reads - run.broken_reads, run.reads),
                Err(e) => e.to_string(),
            }
        ),
    );
    rep.summary = format!(
        "{} logical fixtures x {seeds} seeds, worst success {:.0}%; 2g at alpha=2200 recovered in {recovered}/{runs} runs",
        models.len(),
        100.0 * worst
    );
    rep
}

fn decode(state: &BinaryState, n: usize) -> Vec<f64> {
    qubo_linsolve::reconstruct_solution(state.bits(), qubo_linsolve::IndexMap::new(n, 4), enc())
        .unwrap()
        .as_slice()
        .to_vec()
}

fn criterion_9() -> Report {
    let mut rep = Report::new();
    let count = |name: &str| {
        let model = build_linear_qubo(&problem(name)).scale_by_max_coupling().0;
        degeneracy_report(&model, Window::FractionOfRange(0.05)).unwrap()
    };
    for (ill, pre) in [("1i", "1j"), ("2f", "2g-corrected")] {
        let (a, b) = (count(ill), count(pre));
        rep.check(b.count < a.count, format!("near-ground count {pre} = {} < {ill} = {}", b.count, a.count));
        rep.log(format!("{ill}: gap {:.4e}; {pre}: gap {:.4e}", a.gap, b.gap));
    }
    rep.log(format!("2g verbatim: {} states in the window", count("2g").count));
    let mut gray_ok = true;
    for n in 1..=16 {
        let seq = gray_sequence(n).unwrap();
        let mut seen = vec![false; seq.len()];
        for (i, s) in seq.iter().enumerate() {
            seen[s.index() as usize] = true;
            gray_ok &= s.hamming_distance(&seq[(i + 1) % seq.len()]) == 1 || seq.len() == 1;
        }
        gray_ok &= seen.iter().all(|&v| v) && seq.len() == 1 << n;
    }
    rep.check(gray_ok, "Gray sequences n = 1..16 are Hamming-1 cyclic permutations".into());
    rep.summary = "window = 5% of spectral range".into();
    rep
}

fn criterion_10() -> Report {
    let mut rep = Report::new();
    let cases: [(&str, f64, f64); 4] = [("1i", 25.0, 0.05), ("1j", 5.0, 0.05), ("2f", 78.0, 0.05), ("2g", 1.0, 0.0)];
    for (name, expected, rel) in cases {
        let m = ProblemFile::parse(fixtures::get(name).unwrap()).unwrap().matrix;
        let kappa = eigenvalue_condition_number(&m).unwrap();
        let sigma = condition_number(&m).unwrap();
        let ok = if rel > 0.0 { (kappa - expected).abs() <= rel * expected } else { kappa <= 1.1 };
        let target = if rel > 0.0 { format!("{expected} ± {}%", rel * 100.0) } else { "<= 1.1".into() };
        rep.check(ok, format!("{name}: |lambda| ratio {kappa:.4} (target {target}); sigma ratio {sigma:.4}"));
    }
    rep.summary = "eigenvalue-modulus ratio".into();
    rep
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact division", criterion_1),
        ("rounded division", criterion_2),
        ("iterated division", criterion_3),
        ("2x2 systems", criterion_4),
        ("3x3 systems", criterion_5),
        ("counter-term spectra", criterion_6),
        ("embedding invariants", criterion_7),
        ("sampler quality", criterion_8),
        ("landscape diagnostics", criterion_9),
        ("condition numbers", criterion_10),
    ];
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let rep = run();
        println!("criterion {:>2}: {} {title}: {}", i + 1, if rep.passed { "PASS" } else { "FAIL" }, rep.summary);
        for line in &rep.details {
            if verbose || !line.starts_with("ok") {
                println!("    {line}");
            }
        }
        if !rep.passed {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
