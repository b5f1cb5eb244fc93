//! Experiment CLI: instance generation or loading, solver configuration,
//! sweep orchestration, and machine-readable JSON/CSV output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use riemann_dc::io::{
    load_matrix, parse_generate_spec, summary_row, RunReport, SummaryRow, CSV_HEADER,
};
use riemann_dc::solver::{solve, SolverConfig};
use riemann_dc::spca::{
    dichotomy_violations, gaussian_data, sk_distance, SpcaInstance, SpcaMetrics, SpcaModel,
    SweepOptions, SweepResult,
};
use riemann_dc::subproblem::SubsolverKind;

const SEED_ENV: &str = "RIEMANN_DC_SEED";

#[derive(Parser)]
#[command(
    name = "riemann-dc",
    version,
    about = "Difference-of-convex solver on the sphere/Stiefel manifolds with a sparse-PCA harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one sparse-PCA model instance and emit trace + metrics.
    Solve(SolveCmd),
    /// Continuation over the cap parameter υ of the capped-ℓ1 model.
    SweepCapped(SweepCappedCmd),
    /// Continuation over γ̃ of the ℓ1-minus-largest-k model toward a target
    /// sparsity.
    SweepL1lk(SweepL1lkCmd),
    /// Check the sparsity certificates (distance bound, threshold dichotomy).
    Certify(CertifyCmd),
    /// Run all three dual subsolvers on the same instance and compare.
    Bench(BenchCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    L1,
    Capped,
    L1lk,
}

#[derive(Args)]
struct InputArgs {
    /// Generate a seeded Gaussian instance: "seed=1,m=50,n=200" (seed may be
    /// omitted; the RIEMANN_DC_SEED environment variable is the fallback).
    #[arg(long, value_name = "SPEC")]
    generate: Option<String>,
    /// Load a dense matrix file (plain "m n" header or CSV with "# m,n").
    #[arg(long, value_name = "PATH", conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Number of components (columns of the loading matrix).
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Explicit seed; overrides the generate spec and the environment.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long, default_value_t = 1.0)]
    gamma_tilde: f64,
    /// Cap parameter of the capped-ℓ1 model.
    #[arg(long)]
    upsilon: Option<f64>,
    /// Sparsity budget of the largest-k model.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "bb")]
    subsolver: SubsolverKind,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    max_outer: usize,
}

#[derive(Args)]
struct OutputArgs {
    /// JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV summary path (fixed header, one row per run/sweep).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SolveCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Independent repetitions (seeds seed, seed+1, …); requires --generate.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Worker threads for repetitions.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct SweepCappedCmd {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    gamma_tilde: f64,
    /// Maximum number of υ steps (υ = 1, 1.5, 1.5², …).
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepL1lkCmd {
    #[command(flatten)]
    input: InputArgs,
    /// Sparsity budget k; defaults to (1 − target_sp)·n·r.
    #[arg(long)]
    k: Option<usize>,
    /// Target zero fraction.
    #[arg(long, default_value_t = 0.8)]
    target_sp: f64,
    #[arg(long, default_value_t = 21)]
    steps: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CertifyCmd {
    /// Check the distance bound to the k-sparse sphere (tight case plus
    /// Monte-Carlo sampling).
    #[arg(long)]
    sk_distance: bool,
    /// Solve beyond the sphere equivalence threshold and check the resulting
    /// sparsity structure (capped or l1lk model).
    #[arg(long)]
    equivalence: bool,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    #[arg(long, default_value_t = 30)]
    m: usize,
    #[arg(long, default_value_t = 2.0)]
    gamma_tilde: f64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    max_outer: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Resolved run parameters echoed into every JSON report.
#[derive(Serialize)]
struct SpecEcho {
    source: SourceEcho,
    model: SpcaModel,
    r: usize,
    solver: SolverConfig,
    reps: usize,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SourceEcho {
    Generate { seed: u64, m: usize, n: usize },
    Load { path: String, m: usize, n: usize },
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|v| v.parse().ok())
}

enum DataSource {
    Generate { seed: u64, m: usize, n: usize },
    Load { path: PathBuf, data: DMatrix<f64> },
}

impl DataSource {
    fn resolve(input: &InputArgs) -> Result<Self, String> {
        match (&input.generate, &input.input) {
            (Some(spec), None) => {
                let spec = parse_generate_spec(spec).map_err(|e| e.to_string())?;
                let seed = input.seed.or(spec.seed).or_else(env_seed).unwrap_or(0);
                Ok(DataSource::Generate {
                    seed,
                    m: spec.m,
                    n: spec.n,
                })
            }
            (None, Some(path)) => {
                let data = load_matrix(path).map_err(|e| format!("{}: {e}", path.display()))?;
                Ok(DataSource::Load {
                    path: path.clone(),
                    data,
                })
            }
            (None, None) => Err("one of --generate or --input is required".into()),
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        }
    }

    fn instance(
        &self,
        r: usize,
        model: SpcaModel,
        seed_offset: u64,
    ) -> Result<SpcaInstance, String> {
        match self {
            DataSource::Generate { seed, m, n } => {
                SpcaInstance::generate(seed + seed_offset, *m, *n, r, model)
                    .map_err(|e| e.to_string())
            }
            DataSource::Load { data, .. } => {
                SpcaInstance::from_matrix(data.clone(), r, model).map_err(|e| e.to_string())
            }
        }
    }

    fn echo(&self, inst: &SpcaInstance) -> SourceEcho {
        match self {
            DataSource::Generate { seed, m, n } => SourceEcho::Generate {
                seed: *seed,
                m: *m,
                n: *n,
            },
            DataSource::Load { path, .. } => SourceEcho::Load {
                path: path.display().to_string(),
                m: inst.m(),
                n: inst.n(),
            },
        }
    }
}

fn build_model(args: &ModelArgs) -> Result<SpcaModel, String> {
    Ok(match args.model {
        ModelKind::L1 => SpcaModel::L1 {
            gamma_tilde: args.gamma_tilde,
        },
        ModelKind::Capped => SpcaModel::Capped {
            gamma_tilde: args.gamma_tilde,
            upsilon: args
                .upsilon
                .ok_or("--upsilon is required for the capped model")?,
        },
        ModelKind::L1lk => SpcaModel::L1lk {
            gamma_tilde: args.gamma_tilde,
            k: args.k.ok_or("--k is required for the l1lk model")?,
        },
    })
}

/// The ℓ0-model objective reported in summaries: the regularized objective
/// for the ℓ1/capped models, the raw variance objective for largest-k.
fn table_objective(model: &SpcaModel, metrics: &SpcaMetrics) -> f64 {
    match model {
        SpcaModel::L1lk { .. } => metrics.obj_l0_con,
        _ => metrics.obj_l0_reg,
    }
}

fn write_json(path: &PathBuf, value: &serde_json::Value) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_csv(path: &PathBuf, rows: &[SummaryRow]) -> Result<(), String> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_solve(cmd: SolveCmd) -> Result<(), String> {
    let source = DataSource::resolve(&cmd.input)?;
    let model = build_model(&cmd.model)?;
    if cmd.reps > 1 && matches!(source, DataSource::Load { .. }) {
        return Err("--reps needs --generate (repetitions reseed the instance)".into());
    }
    let run_one = |rep: u64| -> Result<(serde_json::Value, SummaryRow), String> {
        let inst = source.instance(cmd.input.r, model, rep)?;
        let obj = inst.objective();
        let mut cfg = SolverConfig::for_objective(&obj, inst.n(), inst.r());
        cfg.subsolver = cmd.solver.subsolver;
        cfg.epsilon = cmd.solver.epsilon;
        cfg.max_outer = cmd.solver.max_outer;
        let out = solve(&obj, inst.x_pca(), &cfg).map_err(|e| e.to_string())?;
        let metrics = inst.metrics(&out.x);
        let echo = SpecEcho {
            source: source.echo(&inst),
            model,
            r: inst.r(),
            solver: cfg,
            reps: cmd.reps,
        };
        let report = RunReport::new(echo, inst.seed(), &out.trace, Some(metrics));
        let row = summary_row(
            inst.r(),
            &out.trace,
            table_objective(&model, &metrics),
            &metrics,
        );
        Ok((report.to_json(), row))
    };
    let results: Result<Vec<_>, String> = if cmd.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cmd.jobs)
            .build()
            .map_err(|e| e.to_string())?;
        pool.install(|| (0..cmd.reps as u64).into_par_iter().map(run_one).collect())
    } else {
        (0..cmd.reps as u64).map(run_one).collect()
    };
    let results = results?;
    let (reports, rows): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let json = if reports.len() == 1 {
        reports.into_iter().next().unwrap()
    } else {
        serde_json::json!({ "runs": reports })
    };
    if let Some(path) = &cmd.output.out {
        write_json(path, &json)?;
    } else {
        println!(
            "{}",
            serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?
        );
    }
    if let Some(path) = &cmd.output.csv {
        write_csv(path, &rows)?;
    }
    for row in &rows {
        eprintln!("done: {}", row.to_csv());
    }
    Ok(())
}

fn sweep_options(solver: &SolverArgs, steps: usize) -> SweepOptions {
    SweepOptions {
        subsolver: solver.subsolver,
        epsilon: solver.epsilon,
        max_outer: solver.max_outer,
        max_steps: steps,
        ..SweepOptions::default()
    }
}

fn sweep_summary(r: usize, sweep: &SweepResult, obj: f64) -> SummaryRow {
    let iter_out: usize = sweep.steps.iter().map(|s| s.outer_iters).sum();
    let inner: usize = sweep.steps.iter().map(|s| s.inner_iters).sum();
    let rows: usize = sweep.steps.iter().map(|s| s.outer_iters + 1).sum();
    let last = sweep.steps.last().expect("sweep has at least one step");
    SummaryRow {
        r,
        iter_out,
        iter_in_mean: inner as f64 / rows.max(1) as f64,
        time_s: sweep.steps.iter().map(|s| s.time_s).sum(),
        time_sub_s: sweep.steps.iter().map(|s| s.time_sub_s).sum(),
        obj,
        v_sc: last.metrics.v_sc,
        s_p: last.metrics.s_p,
    }
}

fn emit_sweep(
    output: &OutputArgs,
    echo: serde_json::Value,
    sweep: &SweepResult,
    row: SummaryRow,
) -> Result<(), String> {
    let json = serde_json::json!({
        "config": echo,
        "steps": sweep.steps,
        "stopped_early": sweep.stopped_early,
        "target_met": sweep.target_met,
        "summary": row,
    });
    if let Some(path) = &output.out {
        write_json(path, &json)?;
    } else {
        println!(
            "{}",
            serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?
        );
    }
    if let Some(path) = &output.csv {
        write_csv(path, &[row])?;
    }
    Ok(())
}

fn run_sweep_capped(cmd: SweepCappedCmd) -> Result<(), String> {
    let source = DataSource::resolve(&cmd.input)?;
    let model = SpcaModel::Capped {
        gamma_tilde: cmd.gamma_tilde,
        upsilon: 1.0,
    };
    let inst = source.instance(cmd.input.r, model, 0)?;
    let opts = sweep_options(&cmd.solver, cmd.steps);
    let sweep = inst.continuation_capped(&opts).map_err(|e| e.to_string())?;
    let last = sweep.steps.last().expect("at least one step");
    let row = sweep_summary(inst.r(), &sweep, last.metrics.obj_l0_reg);
    let echo = serde_json::json!({
        "source": source.echo(&inst),
        "gamma_tilde": cmd.gamma_tilde,
        "r": inst.r(),
        "seed": inst.seed(),
        "sweep": opts,
    });
    emit_sweep(&cmd.output, echo, &sweep, row)?;
    eprintln!(
        "sweep-capped: {} steps, terminal upsilon {:.2}, s_p {:.4}, v_sc {:.4}",
        sweep.steps.len(),
        last.param,
        last.metrics.s_p,
        last.metrics.v_sc
    );
    Ok(())
}

fn run_sweep_l1lk(cmd: SweepL1lkCmd) -> Result<(), String> {
    let source = DataSource::resolve(&cmd.input)?;
    let probe = source.instance(cmd.input.r, SpcaModel::L1 { gamma_tilde: 1.0 }, 0)?;
    let total = probe.n() * probe.r();
    let k = cmd.k.unwrap_or_else(|| {
        (((1.0 - cmd.target_sp) * total as f64).round() as usize).max(probe.r())
    });
    if k < probe.r() {
        return Err(format!("k = {k} must be at least r = {}", probe.r()));
    }
    let target_sp = 1.0 - k as f64 / total as f64;
    let model = SpcaModel::L1lk {
        gamma_tilde: 1.0,
        k,
    };
    let inst = source.instance(cmd.input.r, model, 0)?;
    let opts = sweep_options(&cmd.solver, cmd.steps);
    let sweep = inst
        .continuation_l1lk(target_sp, &opts)
        .map_err(|e| e.to_string())?;
    let last = sweep.steps.last().expect("at least one step");
    let row = sweep_summary(inst.r(), &sweep, last.metrics.obj_l0_con);
    let echo = serde_json::json!({
        "source": source.echo(&inst),
        "k": k,
        "target_sp": target_sp,
        "r": inst.r(),
        "seed": inst.seed(),
        "sweep": opts,
    });
    emit_sweep(&cmd.output, echo, &sweep, row)?;
    eprintln!(
        "sweep-l1lk: {} steps, target {} {}, s_p {:.4}, v_sc {:.4}",
        sweep.steps.len(),
        target_sp,
        if sweep.target_met { "met" } else { "NOT met" },
        last.metrics.s_p,
        last.metrics.v_sc
    );
    if !sweep.target_met {
        eprintln!("warning: target sparsity not reached within the sweep schedule");
    }
    Ok(())
}

fn run_certify(cmd: CertifyCmd) -> Result<(), String> {
    if !cmd.sk_distance && !cmd.equivalence {
        return Err("choose --sk-distance and/or --equivalence".into());
    }
    let mut ok = true;
    if cmd.sk_distance {
        ok &= certify_sk_distance(&cmd)?;
    }
    if cmd.equivalence {
        ok &= certify_equivalence(&cmd)?;
    }
    if ok {
        Ok(())
    } else {
        Err("certificate check failed".into())
    }
}

fn certify_sk_distance(cmd: &CertifyCmd) -> Result<bool, String> {
    let (n, k) = (cmd.n, cmd.k);
    if k < 1 || k > n {
        return Err(format!("need 1 <= k <= n, got k = {k}, n = {n}"));
    }
    let mut ok = true;
    if n == 2 && k == 1 {
        let half = 0.5f64.sqrt();
        let (dist, bound) = sk_distance(&DVector::from_column_slice(&[half, half]), 1)
            .map_err(|e| e.to_string())?;
        let gap = (dist - bound).abs();
        let tight = gap <= 1e-12;
        println!(
            "sk-distance tight case (n=2, k=1): dist {dist:.15}, bound {bound:.15}, gap {gap:.2e} => {}",
            if tight { "equality" } else { "MISMATCH" }
        );
        ok &= tight;
    }
    let samples = if cmd.samples == 0 {
        10_000
    } else {
        cmd.samples
    };
    let seed = cmd.seed.or_else(env_seed).unwrap_or(0);
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..samples {
        let mut x = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        x /= x.norm();
        let (dist, bound) = sk_distance(&x, k).map_err(|e| e.to_string())?;
        worst_margin = worst_margin.min(bound - dist);
        if dist > bound + 1e-12 {
            violations += 1;
        }
    }
    println!(
        "sk-distance Monte-Carlo (n={n}, k={k}, {samples} samples, seed {seed}): {violations} violations, min margin {worst_margin:.3e}"
    );
    Ok(ok && violations == 0)
}

fn certify_equivalence(cmd: &CertifyCmd) -> Result<bool, String> {
    let seed = cmd.seed.or_else(env_seed).unwrap_or(0);
    let n = if cmd.n > 2 { cmd.n } else { 50 };
    let data = gaussian_data(seed, cmd.m, n);
    let eps = 1e-4;
    match cmd.model {
        Some(ModelKind::L1lk) => {
            let k = cmd.k.max(1);
            let inst = SpcaInstance::from_matrix(
                data,
                1,
                SpcaModel::L1lk {
                    gamma_tilde: 1.0,
                    k,
                },
            )
            .map_err(|e| e.to_string())?;
            let gstar = inst
                .equivalence_thresholds()
                .map_err(|e| e.to_string())?
                .gamma_star
                .expect("largest-k threshold");
            let gamma_tilde = gstar * 1.05 / (inst.pca_energy() / n as f64);
            let obj = inst.objective_for(&SpcaModel::L1lk { gamma_tilde, k });
            let mut cfg = SolverConfig::for_objective(&obj, n, 1);
            cfg.epsilon = eps;
            cfg.max_outer = 500;
            let out = solve(&obj, inst.x_pca(), &cfg).map_err(|e| e.to_string())?;
            let l1: f64 = out.x.mat().iter().map(|v| v.abs()).sum();
            let gap = l1 - riemann_dc::penalty::largest_k_norm(out.x.mat(), k);
            let pass = gap <= eps;
            println!(
                "equivalence l1lk (n={n}, m={}, k={k}, seed {seed}): gamma {:.1} > gamma* {:.1}, \
                 sparsity gap {gap:.3e} => {}",
                cmd.m,
                gamma_tilde * inst.pca_energy() / n as f64,
                gstar,
                if pass {
                    "k-sparse within tolerance"
                } else {
                    "FAILED"
                }
            );
            Ok(pass)
        }
        _ => {
            let inst = SpcaInstance::from_matrix(
                data,
                1,
                SpcaModel::Capped {
                    gamma_tilde: cmd.gamma_tilde,
                    upsilon: 1.0,
                },
            )
            .map_err(|e| e.to_string())?;
            let ustar = inst
                .equivalence_thresholds()
                .map_err(|e| e.to_string())?
                .upsilon_star
                .expect("capped threshold");
            let mut x = inst.x_pca().clone();
            let mut upsilon = 1.0f64;
            loop {
                let obj = inst.objective_for(&SpcaModel::Capped {
                    gamma_tilde: cmd.gamma_tilde,
                    upsilon,
                });
                let mut cfg = SolverConfig::for_objective(&obj, n, 1);
                cfg.epsilon = eps;
                let out = solve(&obj, &x, &cfg).map_err(|e| e.to_string())?;
                x = out.x;
                if upsilon >= ustar {
                    break;
                }
                upsilon = (upsilon * 1.5).min(ustar);
            }
            let tol = eps * (1.0 + 1.0 / upsilon);
            let violations = dichotomy_violations(x.mat(), upsilon, tol);
            let pass = violations == 0;
            println!(
                "equivalence capped (n={n}, m={}, seed {seed}): upsilon {upsilon:.1} >= upsilon* {ustar:.1}, \
                 dichotomy violations {violations} (tol {tol:.1e}) => {}",
                cmd.m,
                if pass { "certified" } else { "FAILED" }
            );
            Ok(pass)
        }
    }
}

fn run_bench(cmd: BenchCmd) -> Result<(), String> {
    let source = DataSource::resolve(&cmd.input)?;
    let model = build_model(&cmd.model)?;
    let inst = source.instance(cmd.input.r, model, 0)?;
    let obj = inst.objective();
    let mut rows = Vec::new();
    println!("subsolver,{CSV_HEADER}");
    for kind in [SubsolverKind::Nfg, SubsolverKind::Bb, SubsolverKind::Ar] {
        let mut cfg = SolverConfig::for_objective(&obj, inst.n(), inst.r());
        cfg.subsolver = kind;
        cfg.epsilon = cmd.epsilon;
        cfg.max_outer = cmd.max_outer;
        let out = solve(&obj, inst.x_pca(), &cfg).map_err(|e| e.to_string())?;
        let metrics = inst.metrics(&out.x);
        let row = summary_row(
            inst.r(),
            &out.trace,
            table_objective(&model, &metrics),
            &metrics,
        );
        println!("{kind},{}", row.to_csv());
        rows.push(row);
    }
    if let Some(path) = &cmd.output.csv {
        write_csv(path, &rows)?;
    }
    if let Some(path) = &cmd.output.out {
        let _ = path;
        return Err("bench emits CSV only; use --csv".into());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Command::Solve(cmd) => run_solve(cmd),
        Command::SweepCapped(cmd) => run_sweep_capped(cmd),
        Command::SweepL1lk(cmd) => run_sweep_l1lk(cmd),
        Command::Certify(cmd) => run_certify(cmd),
        Command::Bench(cmd) => run_bench(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
