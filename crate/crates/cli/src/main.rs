//! `qls`: division, linear systems and embedding diagnostics from the command line.

mod format;
mod manifest;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use qubo_linsolve::chimera::{embed_complete_graph, verify_embedding};
use qubo_linsolve::linear::iterate_linear;
use qubo_linsolve::solver::ChainStats;
use qubo_linsolve::{
    brute_force_solve, build_linear_qubo, chain_counter_term, compare_embedded_landscape, degeneracy_report,
    gray_projection, invert_matrix, iterate_division, solve_division, solve_linear, BinaryEncoding, ChainPenalty,
    ChimeraGraph, DivisionProblem, EmbeddedAnnealing, Error, MatrixProblem, ProblemFile, QuboModel, SamplerConfig,
    Solver, Spectrum, UnembedPolicy, Window,
};

use format::g17;
use manifest::{captured_env, InputRecord, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "qls", version, about = "Division and linear systems solved as QUBO ground states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve x = y/m.
    #[command(allow_negative_numbers = true)]
    Divide(DivideArgs),
    /// Solve M·x = Y from a problem file.
    Solve(SolveArgs),
    /// Invert the matrix of a problem file column by column.
    Invert(FileArgs),
    /// Energy of every state in Gray-code order, as CSV.
    Landscape(LandscapeArgs),
    /// Sorted spectrum of a problem file or of a single chain's counter-term.
    Spectrum(SpectrumArgs),
    /// Chains of the complete-graph embedding on a Chimera graph.
    EmbedInfo(EmbedInfoArgs),
    /// Repeat a run from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct EncodingArgs {
    /// Scale c of the fixed-point encoding x = c·χ − d.
    #[arg(long, default_value_t = 2.0, env = "QL_C", allow_negative_numbers = true)]
    c: f64,
    /// Offset d of the fixed-point encoding.
    #[arg(long, default_value_t = 1.0, env = "QL_D", allow_negative_numbers = true)]
    d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Brute,
    Sa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Discard,
    Majority,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::Brute, env = "QL_SOLVER")]
    solver: SolverKind,
    /// Annealing reads.
    #[arg(long, default_value_t = 100, env = "QL_READS")]
    reads: usize,
    /// Metropolis sweeps per read.
    #[arg(long, default_value_t = 1000, env = "QL_SWEEPS")]
    sweeps: usize,
    #[arg(long, default_value_t = 0, env = "QL_SEED")]
    seed: u64,
    /// Chain strength in problem units; runs the sampler on the Chimera embedding.
    #[arg(long, env = "QL_ALPHA")]
    alpha: Option<f64>,
    /// What to do with reads that have broken chains.
    #[arg(long, value_enum, default_value_t = Policy::Discard, env = "QL_POLICY")]
    policy: Policy,
}

#[derive(Debug, Args)]
struct IterateArgs {
    /// Refine iteratively with exponent offsets.
    #[arg(long)]
    iterate: bool,
    #[arg(long, default_value_t = 1e-6, env = "QL_TOL")]
    tol: f64,
    #[arg(long, default_value_t = 50, env = "QL_MAX_ITER")]
    max_iter: usize,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write the report here instead of stdout; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DivideArgs {
    #[arg(long)]
    m: f64,
    #[arg(long)]
    y: f64,
    /// Bits per encoded value.
    #[arg(long = "R", default_value_t = 4, env = "QL_R")]
    resolution: usize,
    #[command(flatten)]
    encoding: EncodingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    iterate: IterateArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct FileArgs {
    file: PathBuf,
    /// Bits per unknown; defaults to the value in the file header.
    #[arg(long = "R")]
    resolution: Option<usize>,
    #[command(flatten)]
    encoding: EncodingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    file: FileArgs,
    #[command(flatten)]
    iterate: IterateArgs,
}

#[derive(Debug, Args)]
struct LandscapeArgs {
    file: PathBuf,
    #[arg(long = "R")]
    resolution: Option<usize>,
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Also write logical-versus-embedded energies to this CSV.
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Chain strength for the overlay, in problem units.
    #[arg(long, default_value_t = 20.0, env = "QL_ALPHA")]
    alpha: f64,
    /// Near-ground window as a fraction of the spectral range.
    #[arg(long, default_value_t = 0.05)]
    window: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Problem file; omit when using `--chain`.
    #[arg(required_unless_present = "chain", conflicts_with = "chain")]
    file: Option<PathBuf>,
    /// Length of a single chain whose counter-term spectrum is listed.
    #[arg(long, requires = "alpha")]
    chain: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "R")]
    resolution: Option<usize>,
    #[command(flatten)]
    encoding: EncodingArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct EmbedInfoArgs {
    /// Size of the complete graph K_k to embed.
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    manifest: PathBuf,
}

/// Bad input from the user: exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Singular { .. }) => 4,
        Some(Error::BrokenChains { .. }) => 5,
        Some(
            Error::Parse { .. }
            | Error::InvalidParameter(_)
            | Error::ZeroDivisor
            | Error::DimensionMismatch { .. }
            | Error::OutOfRange { .. },
        ) => 2,
        Some(_) => 3,
        None => 1,
    }
}

/// What a subcommand produced, before it is written out.
#[derive(Default)]
struct Run {
    body: String,
    parameters: BTreeMap<String, Value>,
    input: Option<InputRecord>,
    extra_outputs: Vec<PathBuf>,
    diagnostics: BTreeMap<String, Value>,
    /// Error to report after the body has been written.
    deferred: Option<anyhow::Error>,
}

impl Run {
    fn param(&mut self, key: &str, value: Value) {
        self.parameters.insert(key.to_string(), value);
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    ExitCode::from(execute(cli, argv))
}

fn execute(cli: Cli, argv: Vec<String>) -> u8 {
    if let Command::Replay(args) = &cli.command {
        return match replay(&args.manifest) {
            Ok((cli, argv)) => execute(cli, argv),
            Err(e) => report_error(&e),
        };
    }
    let (name, out) = describe(&cli.command);
    let env = captured_env();
    let mut run = Run::default();
    let result = dispatch(cli.command, &mut run).and_then(|()| {
        if let Some(path) = &out {
            fs::write(path, &run.body).with_context(|| format!("cannot write {}", path.display()))?;
        } else {
            print!("{}", run.body);
        }
        Ok(())
    });
    let error = result.err().or(run.deferred.take());
    let code = error.as_ref().map_or(0, exit_code);
    let mut outputs: Vec<String> = out.iter().map(|p| p.display().to_string()).collect();
    outputs.extend(run.extra_outputs.iter().map(|p| p.display().to_string()));
    let manifest = RunManifest {
        tool: "qls".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: name.into(),
        argv,
        env,
        parameters: run.parameters,
        input: run.input,
        outputs,
        diagnostics: run.diagnostics,
        status: error.as_ref().map_or_else(|| "ok".into(), |e| format!("{e:#}")),
        exit_code: code,
    };
    eprintln!("{}", serde_json::to_string(&manifest).expect("manifest serialises"));
    if let Some(path) = &out {
        let mut target = path.clone().into_os_string();
        target.push(".manifest.json");
        let pretty = serde_json::to_string_pretty(&manifest).expect("manifest serialises") + "\n";
        if let Err(e) = fs::write(&target, pretty) {
            eprintln!("error: cannot write {}: {e}", PathBuf::from(target).display());
            return code.max(1);
        }
    }
    match error {
        Some(e) => report_error(&e),
        None => 0,
    }
}

fn report_error(err: &anyhow::Error) -> u8 {
    eprintln!("error: {err:#}");
    exit_code(err)
}

fn describe(command: &Command) -> (&'static str, Option<PathBuf>) {
    match command {
        Command::Divide(a) => ("divide", a.out.out.clone()),
        Command::Solve(a) => ("solve", a.file.out.out.clone()),
        Command::Invert(a) => ("invert", a.out.out.clone()),
        Command::Landscape(a) => ("landscape", a.out.out.clone()),
        Command::Spectrum(a) => ("spectrum", a.out.out.clone()),
        Command::EmbedInfo(a) => ("embed-info", a.out.out.clone()),
        Command::Replay(_) => ("replay", None),
    }
}

fn dispatch(command: Command, run: &mut Run) -> Result<()> {
    match command {
        Command::Divide(a) => divide(a, run),
        Command::Solve(a) => solve(a, run),
        Command::Invert(a) => invert(a, run),
        Command::Landscape(a) => landscape(a, run),
        Command::Spectrum(a) => spectrum(a, run),
        Command::EmbedInfo(a) => embed_info(a, run),
        Command::Replay(_) => unreachable!("handled before dispatch"),
    }
}

fn replay(path: &Path) -> Result<(Cli, Vec<String>)> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| usage(format!("{} is not a run manifest: {e}", path.display())))?;
    if manifest.subcommand == "replay" {
        bail!(usage("a replay manifest cannot be replayed"));
    }
    if let Some(input) = &manifest.input {
        let (_, now) = InputRecord::read(Path::new(&input.path)).map_err(|e| usage(format!("{e:#}")))?;
        if now.sha256 != input.sha256 {
            bail!(usage(format!("{} has changed since the recorded run", input.path)));
        }
    }
    let stale: Vec<String> = std::env::vars().map(|(k, _)| k).filter(|k| k.starts_with(manifest::ENV_PREFIX)).collect();
    for key in stale {
        std::env::remove_var(key);
    }
    for (key, value) in &manifest.env {
        std::env::set_var(key, value);
    }
    let cli =
        Cli::try_parse_from(&manifest.argv).map_err(|e| usage(format!("recorded arguments no longer parse: {e}")))?;
    Ok((cli, manifest.argv))
}

impl EncodingArgs {
    fn encoding(&self, resolution: usize, run: &mut Run) -> Result<BinaryEncoding> {
        run.param("R", json!(resolution));
        run.param("c", json!(self.c));
        run.param("d", json!(self.d));
        Ok(BinaryEncoding::new(resolution, self.c, self.d)?)
    }
}

impl SolverArgs {
    fn solver(&self, run: &mut Run) -> Result<Solver> {
        run.param("solver", json!(self.solver.to_possible_value().expect("named").get_name()));
        if self.solver == SolverKind::Brute {
            if self.alpha.is_some() {
                bail!(usage("--alpha applies to the annealing sampler; add --solver sa"));
            }
            return Ok(Solver::BruteForce);
        }
        let config = SamplerConfig { sweeps: self.sweeps, ..SamplerConfig::with_reads(self.reads, self.seed) };
        run.param("reads", json!(self.reads));
        run.param("sweeps", json!(self.sweeps));
        run.param("seed", json!(self.seed));
        let Some(alpha) = self.alpha else {
            return Ok(Solver::Anneal(config));
        };
        let policy = match self.policy {
            Policy::Discard => UnembedPolicy::Discard,
            Policy::Majority => UnembedPolicy::MajorityVote,
        };
        run.param("alpha", json!(alpha));
        run.param("policy", json!(self.policy.to_possible_value().expect("named").get_name()));
        Ok(Solver::Embedded(EmbeddedAnnealing { config, penalty: ChainPenalty::new(alpha)?, policy }))
    }
}

impl IterateArgs {
    fn record(&self, run: &mut Run) {
        run.param("iterate", json!(self.iterate));
        if self.iterate {
            run.param("tolerance", json!(self.tol));
            run.param("max_iter", json!(self.max_iter));
        }
    }
}

fn chain_lines(body: &mut String, chains: Option<ChainStats>) {
    if let Some(stats) = chains {
        let fraction = stats.broken_reads as f64 / stats.reads as f64;
        let _ = writeln!(
            body,
            "reads: {}\nbroken_reads: {}\nbreak_fraction: {}",
            stats.reads,
            stats.broken_reads,
            g17(fraction)
        );
    }
}

fn divide(a: DivideArgs, run: &mut Run) -> Result<()> {
    run.param("m", json!(a.m));
    run.param("y", json!(a.y));
    let enc = a.encoding.encoding(a.resolution, run)?;
    let solver = a.solver.solver(run)?;
    a.iterate.record(run);
    let body = &mut run.body;
    let _ = writeln!(body, "solver: {}", solver.name());
    if a.iterate.iterate {
        let trace = iterate_division(a.y, a.m, enc, a.iterate.tol, a.iterate.max_iter, &solver)?;
        for (k, rec) in trace.records.iter().enumerate() {
            let _ = writeln!(
                body,
                "round {}: offset={} partial={} contribution={} residual={}",
                k + 1,
                rec.offset,
                g17(rec.partial),
                g17(rec.contribution),
                g17(rec.residual)
            );
        }
        let _ = writeln!(
            body,
            "x: {}\niterations: {}\nconverged: {}\nerror: {}",
            g17(trace.solution),
            trace.iterations(),
            trace.converged,
            g17(trace.error)
        );
        if !trace.converged {
            run.deferred = Some(anyhow::anyhow!("no convergence within {} rounds", a.iterate.max_iter));
        }
        return Ok(());
    }
    let out = solve_division(&DivisionProblem::new(a.m, a.y, enc)?, &solver)?;
    let _ = writeln!(
        body,
        "x: {}\nbits: {}\nscaled_energy: {}\nraw_objective: {}",
        g17(out.x),
        out.bits,
        g17(out.scaled_energy),
        g17(out.raw_objective)
    );
    chain_lines(body, out.chains);
    Ok(())
}

/// Reads a problem file and records its hash; `R` from the flag wins over the header.
fn load(path: &Path, resolution: Option<usize>, run: &mut Run) -> Result<ProblemFile> {
    let (text, record) = InputRecord::read(path).map_err(|e| usage(format!("{e:#}")))?;
    run.input = Some(record);
    let mut file = ProblemFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    if let Some(r) = resolution {
        file.resolution = r;
    }
    Ok(file)
}

fn load_problem(
    path: &Path,
    resolution: Option<usize>,
    encoding: &EncodingArgs,
    run: &mut Run,
) -> Result<MatrixProblem> {
    let file = load(path, resolution, run)?;
    encoding.encoding(file.resolution, run)?;
    Ok(file.into_problem(encoding.c, encoding.d)?)
}

fn solve(a: SolveArgs, run: &mut Run) -> Result<()> {
    let f = &a.file;
    let problem = load_problem(&f.file, f.resolution, &f.encoding, run)?;
    let solver = f.solver.solver(run)?;
    a.iterate.record(run);
    let body = &mut run.body;
    let _ = writeln!(body, "solver: {}", solver.name());
    if a.iterate.iterate {
        let trace = iterate_linear(&problem, a.iterate.tol, a.iterate.max_iter, &solver)?;
        for (k, rec) in trace.records.iter().enumerate() {
            let _ = writeln!(
                body,
                "round {}: offset={} contribution={} residual={}",
                k + 1,
                rec.offset,
                format::vector(&rec.contribution),
                format::vector(&rec.residual)
            );
        }
        let _ = writeln!(
            body,
            "x: {}\niterations: {}\nconverged: {}\nerror: {}",
            format::vector(&trace.solution),
            trace.iterations(),
            trace.converged,
            g17(trace.error)
        );
        if !trace.converged {
            run.deferred = Some(anyhow::anyhow!("no convergence within {} rounds", a.iterate.max_iter));
        }
        return Ok(());
    }
    let sol = solve_linear(&problem, &solver)?;
    let _ = writeln!(
        body,
        "x: {}\nbits: {}\nresidual_norm: {}\nscaled_energy: {}\nraw_energy: {}",
        format::vector(&sol.x),
        sol.bits,
        g17(sol.residual_norm),
        g17(sol.scaled_energy),
        g17(sol.raw_energy)
    );
    chain_lines(body, sol.chains);
    Ok(())
}

fn invert(a: FileArgs, run: &mut Run) -> Result<()> {
    let file = load(&a.file, a.resolution, run)?;
    let enc = a.encoding.encoding(file.resolution, run)?;
    let solver = a.solver.solver(run)?;
    let inv = invert_matrix(&file.matrix, enc, &solver)?;
    let body = &mut run.body;
    let _ = writeln!(body, "solver: {}", solver.name());
    let _ = writeln!(body, "inverse:");
    for row in format::matrix_rows(&inv.inverse) {
        let _ = writeln!(body, "{row}");
    }
    if inv.is_complete() {
        let n = file.matrix.nrows();
        let residual = (&file.matrix * &inv.inverse - DMatrix::identity(n, n)).norm();
        let _ = writeln!(body, "residual_frobenius: {}", g17(residual));
    }
    for (j, e) in &inv.failures {
        let _ = writeln!(body, "column {j}: {e}");
    }
    if let Some((_, e)) = inv.failures.into_iter().next() {
        run.deferred = Some(e.into());
    }
    Ok(())
}

fn scaled_model(problem: &MatrixProblem) -> QuboModel {
    build_linear_qubo(problem).scale_by_max_coupling().0
}

fn landscape(a: LandscapeArgs, run: &mut Run) -> Result<()> {
    let problem = load_problem(&a.file, a.resolution, &a.encoding, run)?;
    let model = scaled_model(&problem);
    run.body = gray_projection(&model)?.to_csv();
    run.param("window", json!(a.window));
    let report = degeneracy_report(&model, Window::FractionOfRange(a.window))?;
    run.diagnostics.insert("ground_energy".into(), json!(report.ground_energy));
    run.diagnostics.insert("gap".into(), json!(report.gap));
    run.diagnostics.insert("window_energy".into(), json!(report.window));
    run.diagnostics.insert("near_ground_count".into(), json!(report.count));
    if let Some(path) = a.overlay {
        run.param("alpha", json!(a.alpha));
        let graph = ChimeraGraph::for_complete_graph(model.num_vars());
        let embedding = embed_complete_graph(model.num_vars(), &graph)?;
        let overlay =
            compare_embedded_landscape(&model, &embedding, &graph, ChainPenalty::new(a.alpha / model.scale())?)?;
        fs::write(&path, overlay.to_csv()).with_context(|| format!("cannot write {}", path.display()))?;
        run.diagnostics.insert("overlay_max_deviation".into(), json!(overlay.max_deviation()));
        run.extra_outputs.push(path);
    }
    Ok(())
}

fn spectrum_csv(spectrum: &Spectrum) -> String {
    let mut out = String::from("bits,energy\n");
    for (k, entry) in spectrum.entries().iter().enumerate() {
        let _ = writeln!(out, "{},{:?}", spectrum.state(k), entry.energy);
    }
    out
}

fn spectrum(a: SpectrumArgs, run: &mut Run) -> Result<()> {
    let model = match (&a.file, a.chain) {
        (_, Some(len)) => {
            let alpha = a.alpha.expect("clap enforces --alpha with --chain");
            run.param("chain", json!(len));
            run.param("alpha", json!(alpha));
            if len == 0 {
                bail!(usage("--chain must be at least 1"));
            }
            chain_counter_term(len, ChainPenalty::new(alpha)?)
        }
        (Some(path), None) => scaled_model(&load_problem(path, a.resolution, &a.encoding, run)?),
        (None, None) => unreachable!("clap requires a file or --chain"),
    };
    run.body = spectrum_csv(&brute_force_solve(&model)?);
    Ok(())
}

fn embed_info(a: EmbedInfoArgs, run: &mut Run) -> Result<()> {
    run.param("k", json!(a.k));
    if a.k == 0 {
        bail!(usage("--k must be at least 1"));
    }
    let graph = ChimeraGraph::for_complete_graph(a.k);
    let embedding = embed_complete_graph(a.k, &graph)?;
    let mut complete = QuboModel::new(a.k);
    for u in 0..a.k {
        for v in u + 1..a.k {
            complete.set_coupling(u, v, 1.0)?;
        }
    }
    let report = verify_embedding(&embedding, &complete, &graph);
    let body = &mut run.body;
    let _ = writeln!(
        body,
        "graph: chimera {}x{} ({} qubits, {} couplers)",
        graph.rows(),
        graph.cols(),
        graph.num_qubits(),
        graph.num_edges()
    );
    let _ = writeln!(
        body,
        "logical: {}\nphysical: {}\nmax_chain_length: {}\nvalid: {}",
        embedding.num_logical(),
        embedding.num_physical(),
        embedding.max_chain_length(),
        report.is_valid()
    );
    body.push_str(&embedding.to_text());
    if !report.is_valid() {
        run.deferred = Some(anyhow::anyhow!("embedding failed verification: {report:?}"));
    }
    Ok(())
}
