//! Command-line front end: `solve`, `compare`, `flow`, `diag`, `gen-data`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical
//! failure.

pub mod config;
pub mod csv;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{
    degeneracy_delta, fit_power_law, fit_rate, identification_index, reference_optimum,
    support_set, support_trajectory_ids, RateFit, Report, Series,
};
use crate::domains::DomainSet;
use crate::error::{Error, Result};
use crate::experiments::{
    generate_cs, generate_l2ball_quadratic, generate_sparse_logistic, load_svmlight, log_grid,
    save_svmlight, train_val_split, SparseLogisticSpec,
};
use crate::flows::{force_signal, integrate, FlowConfig, DEFAULT_REFERENCE_ITERS};
use crate::objectives::{LogisticData, Objective};
use crate::solvers::{solve, IterateTrace, SolverConfig, Variant};

use config::{ProblemSource, Radius, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Radius grid for the validation sweep on logistic problems.
const SWEEP_GRID: (f64, f64, usize) = (1.0, 100.0, 10);
/// Radii, as multiples of `‖x₀‖₁`, for the compressed-sensing support sweep.
const CS_ALPHA_SCALES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Parser)]
#[command(
    name = "avgfw",
    version,
    about = "Frank-Wolfe and LMO-averaged Frank-Wolfe experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory [default: config `output.dir`, then $AVGFW_OUT, then ./out].
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides every seed in the configuration.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Suppress progress output.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one solver and write its trace.
    Solve,
    /// Run FW and AvgFW on one instance; write both traces and a summary.
    Compare,
    /// Integrate a continuous-time flow, or a forced averaging signal.
    Flow,
    /// Re-analyze an existing trace CSV.
    Diag(DiagArgs),
    /// Write a synthetic sparse logistic dataset in svmlight format.
    GenData(GenDataArgs),
}

#[derive(Debug, Args)]
pub struct DiagArgs {
    /// Trace CSV written by `solve` or `compare`.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub fit_lo: Option<u64>,
    #[arg(long)]
    pub fit_hi: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, default_value_t = SparseLogisticSpec::default().m_samples)]
    pub samples: usize,
    #[arg(long, default_value_t = SparseLogisticSpec::default().n_features)]
    pub features: usize,
    #[arg(long, default_value_t = SparseLogisticSpec::default().density)]
    pub density: f64,
    #[arg(long, default_value_t = SparseLogisticSpec::default().separator_nnz)]
    pub separator_nnz: usize,
    /// File name inside the output directory.
    #[arg(long, default_value = "synthetic.svm")]
    pub file: String,
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NumericalBlowup { .. }
        | Error::StepTooLarge { .. }
        | Error::BrokenOracle { .. }
        | Error::DegenerateGradient
        | Error::InsufficientData { .. }
        | Error::NoZeroSet
        | Error::WrongBranch => EXIT_NUMERICAL,
        Error::Config(_)
        | Error::Parse { .. }
        | Error::Label { .. }
        | Error::UnsupportedKind(_)
        | Error::DimensionMismatch { .. }
        | Error::Io(_) => EXIT_CONFIG,
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let env_out = std::env::var_os("AVGFW_OUT").map(PathBuf::from);
    let fallback = env_out.unwrap_or_else(|| PathBuf::from("out"));
    let out_dir = g.out.clone().unwrap_or_else(|| fallback.clone());
    match &cli.command {
        Command::Diag(a) => cmd_diag(g, &out_dir, a),
        Command::GenData(a) => cmd_gen_data(g, &out_dir, a),
        cmd => {
            let path = g
                .config
                .as_deref()
                .ok_or_else(|| Error::config("--config PATH is required"))?;
            let cfg = RunConfig::load(path, g.seed)?;
            let out_dir = g
                .out
                .clone()
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or(fallback);
            let ctx = Ctx {
                cfg,
                out_dir,
                quiet: g.quiet,
            };
            match cmd {
                Command::Solve => cmd_solve(&ctx),
                Command::Compare => cmd_compare(&ctx),
                Command::Flow => cmd_flow(&ctx),
                _ => unreachable!(),
            }
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    out_dir: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        let p = self.out_dir.join(name);
        std::fs::write(&p, contents)?;
        self.say(format!("wrote {}", p.display()));
        Ok(p)
    }

    fn solver_config(&self, variant: Variant) -> SolverConfig {
        let s = &self.cfg.solver;
        SolverConfig {
            x0: s.x0.clone(),
            ..SolverConfig::new(variant, s.schedule, s.max_iters).with_trace_every(s.trace_every)
        }
    }
}

/// A ready-to-run instance.
struct Problem {
    objective: Objective,
    domain: DomainSet,
    /// Known optimal value, when the instance has one in closed form.
    f_exact: Option<f64>,
    validation: Option<LogisticData>,
    info: Report,
}

fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    let p = &cfg.problem;
    let mut info = Report::new();
    let radius = |scale: f64| match p.radius {
        Radius::Absolute(a) => a,
        Radius::Scaled(s) => s * scale,
    };
    let mut f_exact = None;
    let mut validation = None;
    let (objective, alpha) = match &p.source {
        ProblemSource::Scalar1D => {
            f_exact = Some(0.0);
            (Objective::Scalar1D, radius(1.0))
        }
        ProblemSource::CompressedSensing(spec) => {
            info.push("seed", spec.seed);
            let inst = generate_cs(spec)?;
            info.push("ground_truth_l1", inst.ground_truth_l1());
            info.push("ground_truth_nnz", inst.ground_truth_support().len());
            let alpha = radius(inst.ground_truth_l1());
            (inst.objective, alpha)
        }
        ProblemSource::L2Ball { seed } => {
            info.push("seed", seed);
            let probe = generate_l2ball_quadratic(1.0, *seed)?;
            let alpha = radius(probe.unconstrained_norm());
            info.push("unconstrained_norm", probe.unconstrained_norm());
            let inst = generate_l2ball_quadratic(alpha, *seed)?;
            info.push("boundary_regime", inst.is_boundary_regime());
            if !inst.is_boundary_regime() {
                f_exact = Some(0.0);
            }
            (inst.objective, alpha)
        }
        ProblemSource::Svmlight {
            path,
            n_features_hint,
        } => {
            let data = load_svmlight(path, *n_features_hint)?;
            let seed = cfg.output.seed.unwrap_or(0);
            (
                split_logistic(cfg, data, seed, &mut validation, &mut info)?,
                radius(1.0),
            )
        }
        ProblemSource::SyntheticLogistic(spec) => {
            info.push("seed", spec.seed);
            let data = generate_sparse_logistic(spec)?;
            (
                split_logistic(cfg, data, spec.seed, &mut validation, &mut info)?,
                radius(1.0),
            )
        }
    };
    let domain = DomainSet::new(p.domain, alpha, objective.dim())?;
    info.push("alpha", alpha);
    info.push("dim", objective.dim());
    Ok(Problem {
        objective,
        domain,
        f_exact,
        validation,
        info,
    })
}

fn split_logistic(
    cfg: &RunConfig,
    data: LogisticData,
    seed: u64,
    validation: &mut Option<LogisticData>,
    info: &mut Report,
) -> Result<Objective> {
    info.push("n_samples", data.n_samples());
    Ok(match cfg.problem.val_frac {
        None => Objective::Logistic(data),
        Some(frac) => {
            let (train, val) = train_val_split(&data, frac, seed)?;
            info.push("n_train", train.n_samples());
            *validation = Some(val);
            Objective::Logistic(train)
        }
    })
}

fn header(ctx: &Ctx, problem: &Problem, f_ref: Option<f64>) -> Report {
    let mut h = Report::new();
    for (s, k, v) in ctx.cfg.raw.entries() {
        h.push(format!("config.{s}.{k}"), v);
    }
    h.extend(&problem.info);
    h.push("objective", problem.objective.kind_name());
    h.push("domain", problem.domain.kind());
    h.push("c", ctx.cfg.solver.schedule.c());
    h.push("p", ctx.cfg.solver.schedule.p());
    h.push(
        "lipschitz_estimate",
        format!("{:e}", problem.objective.lipschitz_bound()),
    );
    match f_ref {
        Some(v) => h.push("f_ref", format!("{v:e}")),
        None => h.push("f_ref", "na"),
    }
    h
}

fn f_ref_if_requested(ctx: &Ctx, problem: &Problem) -> Result<Option<f64>> {
    if let Some(v) = problem.f_exact {
        return Ok(Some(v));
    }
    ctx.cfg
        .solver
        .reference_iters
        .map(|iters| {
            ctx.say(format!("reference run: {iters} iterations"));
            reference_optimum(&problem.objective, &problem.domain, iters).map(|r| r.f_star)
        })
        .transpose()
}

fn cmd_solve(ctx: &Ctx) -> Result<()> {
    let problem = build_problem(&ctx.cfg)?;
    let variant = ctx.cfg.solver.variant;
    let f_ref = f_ref_if_requested(ctx, &problem)?;
    let trace = solve(
        &problem.objective,
        &problem.domain,
        &ctx.solver_config(variant),
    )?;
    let mut h = header(ctx, &problem, f_ref);
    h.push("variant", variant);
    ctx.write(&format!("trace_{variant}.csv"), &csv::trace_csv(&h, &trace))?;
    let last = trace.last_row();
    ctx.say(format!(
        "{variant}: k={} f={:e} gap={:e}",
        last.k, last.f_value, last.gap
    ));
    Ok(())
}

fn fit_entry(r: &mut Report, key: &str, fit: Result<RateFit>) {
    match fit {
        Ok(f) => {
            r.push(format!("slope_{key}"), f.slope);
            r.push(format!("r2_{key}"), f.r_squared);
        }
        Err(e) => r.push(format!("slope_{key}"), format!("na ({e})")),
    }
}

/// Validation loss for each radius on the sweep grid; returns the best radius.
fn alpha_sweep(ctx: &Ctx, problem: &Problem, summary: &mut Report) -> Result<f64> {
    let val = problem
        .validation
        .as_ref()
        .ok_or_else(|| Error::config("alpha sweep needs a validation split"))?;
    let val_obj = Objective::Logistic(val.clone());
    let cfg = ctx
        .solver_config(ctx.cfg.solver.variant)
        .with_trace_every(u64::MAX);
    let mut best = (f64::INFINITY, problem.domain.radius());
    for (i, a) in log_grid(SWEEP_GRID.0, SWEEP_GRID.1, SWEEP_GRID.2)
        .into_iter()
        .enumerate()
    {
        let trace = solve(&problem.objective, &problem.domain.with_radius(a)?, &cfg)?;
        let loss = val_obj.value(trace.final_x());
        summary.push(format!("sweep_{i}_alpha"), a);
        summary.push(format!("sweep_{i}_val_loss"), loss);
        ctx.say(format!("sweep alpha={a:.4} val_loss={loss:.6}"));
        if loss < best.0 {
            best = (loss, a);
        }
    }
    summary.push("sweep_best_alpha", best.1);
    Ok(best.1)
}

fn cmd_compare(ctx: &Ctx) -> Result<()> {
    let mut problem = build_problem(&ctx.cfg)?;
    let mut summary = Report::new();
    let mut cs_sweep = None;
    if ctx.cfg.problem.alpha_sweep {
        if problem.validation.is_some() {
            let a = alpha_sweep(ctx, &problem, &mut summary)?;
            problem.domain = problem.domain.with_radius(a)?;
        } else {
            cs_sweep = Some(cs_support_sweep(ctx, &problem, &mut summary)?);
        }
    }
    let iters = ctx
        .cfg
        .solver
        .reference_iters
        .unwrap_or(DEFAULT_REFERENCE_ITERS);
    ctx.say(format!("reference run: {iters} iterations"));
    let reference = reference_optimum(&problem.objective, &problem.domain, iters)?;
    let f_ref = problem.f_exact.unwrap_or(reference.f_star);

    let (obj, dom) = (&problem.objective, &problem.domain);
    let (fw, avg) = std::thread::scope(|s| {
        let fw = s.spawn(|| solve(obj, dom, &ctx.solver_config(Variant::Fw)));
        let avg = s.spawn(|| solve(obj, dom, &ctx.solver_config(Variant::AvgFw)));
        (
            fw.join().expect("solver thread"),
            avg.join().expect("solver thread"),
        )
    });
    let (fw, avg) = (fw?, avg?);

    let h = header(ctx, &problem, Some(f_ref));
    for t in [&fw, &avg] {
        let mut h = h.clone();
        h.push("variant", t.variant);
        ctx.write(&format!("trace_{}.csv", t.variant), &csv::trace_csv(&h, t))?;
    }

    summary.push("c", ctx.cfg.solver.schedule.c());
    summary.push("p", ctx.cfg.solver.schedule.p());
    summary.push("alpha", problem.domain.radius());
    summary.push("max_iters", ctx.cfg.solver.max_iters);
    summary.push("f_ref", format!("{f_ref:e}"));
    summary.push("reference_gap", format!("{:e}", reference.gap_final));
    let window = ctx.cfg.fit_window();
    summary.push("fit_lo", window.0);
    summary.push("fit_hi", window.1);
    for t in [&fw, &avg] {
        let v = t.variant;
        fit_entry(
            &mut summary,
            &format!("gap_{v}"),
            fit_rate(t, Series::Gap, window),
        );
        fit_entry(
            &mut summary,
            &format!("disc_err_{v}"),
            fit_rate(t, Series::DiscErr, window),
        );
        fit_entry(
            &mut summary,
            &format!("h_{v}"),
            fit_rate(t, Series::FValueMinusRef(f_ref), window),
        );
    }

    let supports = manifold_entries(&problem, &reference.x_star, &[&fw, &avg], &mut summary);
    if let Some(d) = summary.get("delta").and_then(|v| v.parse::<f64>().ok()) {
        // the threshold exactly as stated, f(x_k) − f* ≤ δ/(L n); its derivation is unverified
        let l = problem.objective.lipschitz_bound();
        let thr = d / (l * problem.objective.dim() as f64);
        summary.push("identification_threshold", format!("{thr:e}"));
    }
    ctx.write("summary.txt", &summary.to_string())?;
    if !ctx.quiet {
        print!("{summary}");
    }

    if ctx.cfg.output.emit_plots {
        write_plots(ctx, &[&fw, &avg], supports.as_deref())?;
        if let Some(sweep) = &cs_sweep {
            let labels: Vec<String> = CS_ALPHA_SCALES
                .iter()
                .map(|m| format!("alpha={m}x"))
                .collect();
            let series: Vec<svg::Series> = sweep
                .iter()
                .zip(&labels)
                .map(|(tr, n)| svg::Series {
                    name: n,
                    points: tr
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| (j as f64, c as f64))
                        .collect(),
                })
                .collect();
            ctx.write(
                "support_alpha.svg",
                &svg::loglog_chart(
                    "AvgFW atoms used from k onward",
                    "k",
                    "distinct atoms",
                    &series,
                ),
            )?;
        }
    }
    Ok(())
}

/// AvgFW support trajectories for radii `CS_ALPHA_SCALES · ‖x₀‖₁`.
fn cs_support_sweep(ctx: &Ctx, problem: &Problem, summary: &mut Report) -> Result<Vec<Vec<usize>>> {
    let l1 = problem
        .info
        .get("ground_truth_l1")
        .and_then(|v| v.parse::<f64>().ok())
        .ok_or_else(|| Error::config("alpha_sweep without a validation split needs kind = cs"))?;
    let cfg = ctx.solver_config(Variant::AvgFw);
    let mut out = Vec::new();
    for (i, m) in CS_ALPHA_SCALES.iter().enumerate() {
        let dom = problem.domain.with_radius(m * l1)?;
        let t = solve(&problem.objective, &dom, &cfg)?;
        let tr = support_trajectory_ids(&t.atom_ids)?;
        summary.push(format!("sweep_{i}_alpha_scale"), m);
        summary.push(
            format!("sweep_{i}_final_gap"),
            format!("{:e}", t.last_row().gap),
        );
        summary.push(
            format!("sweep_{i}_support_start"),
            tr.first().copied().unwrap_or(0),
        );
        summary.push(
            format!("sweep_{i}_support_mid"),
            tr.get(tr.len() / 2).copied().unwrap_or(0),
        );
        ctx.say(format!(
            "sweep alpha={m}x: support_start={}",
            tr.first().copied().unwrap_or(0)
        ));
        out.push(tr);
    }
    Ok(out)
}

/// Adds `|𝒮(x*)|`, `δ`, `k̄` and support-trajectory endpoints where the
/// domain supports them; returns the per-variant trajectories.
fn manifold_entries(
    problem: &Problem,
    x_star: &[f64],
    traces: &[&IterateTrace],
    summary: &mut Report,
) -> Option<Vec<Vec<usize>>> {
    let (obj, dom) = (&problem.objective, &problem.domain);
    match degeneracy_delta(obj, dom, x_star) {
        Ok(d) => summary.push("delta", format!("{d:e}")),
        Err(e) => summary.push("delta", format!("na ({e})")),
    }
    let star = support_set(obj, dom, x_star).ok();
    match &star {
        Some(s) => summary.push("support_star_size", s.len()),
        None => summary.push("support_star_size", "na"),
    }
    let mut out = Vec::new();
    for t in traces {
        let v = t.variant;
        match &star {
            Some(s) => match identification_index(t.start_k, &t.atom_ids, s) {
                Some(k) => summary.push(format!("k_bar_{v}"), k),
                None => summary.push(format!("k_bar_{v}"), "none"),
            },
            None => summary.push(format!("k_bar_{v}"), "na"),
        }
        match support_trajectory_ids(&t.atom_ids) {
            Ok(tr) => {
                summary.push(
                    format!("support_start_{v}"),
                    tr.first().copied().unwrap_or(0),
                );
                summary.push(
                    format!("support_mid_{v}"),
                    tr.get(tr.len() / 2).copied().unwrap_or(0),
                );
                summary.push(format!("support_end_{v}"), tr.last().copied().unwrap_or(0));
                out.push(tr);
            }
            Err(_) => {
                summary.push(format!("support_start_{v}"), "na");
                summary.push(format!("support_end_{v}"), "na");
            }
        }
    }
    (out.len() == traces.len()).then_some(out)
}

fn write_plots(ctx: &Ctx, traces: &[&IterateTrace], supports: Option<&[Vec<usize>]>) -> Result<()> {
    let names: Vec<String> = traces.iter().map(|t| t.variant.to_string()).collect();
    let series = |f: &dyn Fn(&crate::solvers::TraceRow) -> f64| -> Vec<svg::Series> {
        traces
            .iter()
            .zip(&names)
            .map(|(t, n)| svg::Series {
                name: n,
                points: t.rows.iter().map(|r| (r.k as f64, f(r))).collect(),
            })
            .collect()
    };
    ctx.write(
        "gap.svg",
        &svg::loglog_chart("duality gap", "k", "gap", &series(&|r| r.gap)),
    )?;
    ctx.write(
        "disc_err.svg",
        &svg::loglog_chart(
            "discretization error",
            "k",
            "||d_k - x_k||",
            &series(&|r| r.disc_err),
        ),
    )?;
    let support_series: Vec<svg::Series> = match supports {
        Some(s) => traces
            .iter()
            .zip(&names)
            .zip(s)
            .map(|((t, n), tr)| svg::Series {
                name: n,
                points: tr
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| ((t.start_k + j as u64) as f64, c as f64))
                    .collect(),
            })
            .collect(),
        None => Vec::new(),
    };
    ctx.write(
        "support.svg",
        &svg::loglog_chart(
            "atoms used from k onward",
            "k",
            "distinct atoms",
            &support_series,
        ),
    )?;
    Ok(())
}

fn cmd_flow(ctx: &Ctx) -> Result<()> {
    let flow = ctx
        .cfg
        .flow
        .as_ref()
        .ok_or_else(|| Error::config("the flow command needs a [flow] section"))?;
    let schedule = ctx.cfg.solver.schedule;
    let fc = FlowConfig {
        dt: flow.dt,
        record_every: flow.record_every,
        x0: ctx.cfg.solver.x0.clone(),
        f_ref: flow.f_ref,
        ..FlowConfig::new(flow.variant, schedule, flow.t_end)
    };
    let mut h = Report::new();
    for (s, k, v) in ctx.cfg.raw.entries() {
        h.push(format!("config.{s}.{k}"), v);
    }
    if let Some(v) = flow.forced_signal {
        let trace = force_signal(&fc, |_| vec![v])?;
        let t_end = trace.last().t;
        h.push("s_bar_final", format!("{:e}", trace.final_s_bar[0]));
        h.push(
            "s_bar_closed_form",
            format!("{:e}", v * schedule.accumulation(t_end)),
        );
        ctx.write("flow_forced.csv", &csv::flow_csv(&h, &trace))?;
        ctx.say(format!(
            "forced signal {v}: s_bar({t_end}) = {:e}",
            trace.final_s_bar[0]
        ));
        return Ok(());
    }
    fc.validate()?;
    let problem = build_problem(&ctx.cfg)?;
    let fc = FlowConfig {
        f_ref: fc.f_ref.or(problem.f_exact),
        ..fc
    };
    if fc.f_ref.is_none() {
        ctx.say(format!(
            "reference run: {DEFAULT_REFERENCE_ITERS} iterations"
        ));
    }
    let trace = integrate(&problem.objective, &problem.domain, &fc)?;
    h.extend(&problem.info);
    h.push("variant", flow.variant);
    h.push("f_ref", format!("{:e}", trace.f_ref));
    ctx.write(
        &format!("flow_{}.csv", flow.variant),
        &csv::flow_csv(&h, &trace),
    )?;
    let last = trace.last();
    ctx.say(format!(
        "{}: t={} gap={:e} h={:e}",
        flow.variant, last.t, last.gap, last.h
    ));
    Ok(())
}

fn cmd_diag(g: &GlobalArgs, out_dir: &Path, a: &DiagArgs) -> Result<()> {
    let file = csv::read_trace_csv(&a.input).map_err(|e| match e {
        Error::Io(io) => Error::config(format!("cannot read {}: {io}", a.input.display())),
        other => other,
    })?;
    let rows = &file.rows;
    let last_k = rows.last().map_or(0, |r| r.k);
    let window = (a.fit_lo.unwrap_or(1), a.fit_hi.unwrap_or(last_k));
    let mut r = Report::new();
    r.push("input", a.input.display());
    r.push("rows", rows.len());
    r.push("fit_lo", window.0);
    r.push("fit_hi", window.1);
    let pts = |f: &dyn Fn(&crate::solvers::TraceRow) -> f64| -> Vec<(u64, f64)> {
        rows.iter().map(|row| (row.k, f(row))).collect()
    };
    fit_entry(&mut r, "gap", fit_power_law(pts(&|x| x.gap), window));
    fit_entry(
        &mut r,
        "disc_err",
        fit_power_law(pts(&|x| x.disc_err), window),
    );
    if let Some(f_ref) = file.header.get("f_ref").and_then(|v| v.parse::<f64>().ok()) {
        fit_entry(
            &mut r,
            "h",
            fit_power_law(pts(&|x| x.f_value - f_ref), window),
        );
    }
    let contiguous = rows.windows(2).all(|w| w[1].k == w[0].k + 1);
    let ids: Vec<Option<i64>> = rows.iter().map(|x| x.atom_id).collect();
    match support_trajectory_ids(&ids) {
        Ok(tr) if contiguous => {
            r.push("support_start", tr.first().copied().unwrap_or(0));
            r.push("support_end", tr.last().copied().unwrap_or(0));
        }
        _ => r.push("support_start", "na"),
    }
    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("diag.txt"), r.to_string())?;
    if !g.quiet {
        print!("{r}");
    }
    Ok(())
}

fn cmd_gen_data(g: &GlobalArgs, out_dir: &Path, a: &GenDataArgs) -> Result<()> {
    let spec = SparseLogisticSpec {
        m_samples: a.samples,
        n_features: a.features,
        density: a.density,
        separator_nnz: a.separator_nnz,
        seed: g.seed.unwrap_or(0),
    };
    let data = generate_sparse_logistic(&spec)?;
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(&a.file);
    save_svmlight(&path, &data)?;
    if !g.quiet {
        println!("wrote {}", path.display());
    }
    Ok(())
}
