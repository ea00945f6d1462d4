//! Command-line front end. `run_command` parses arguments, runs one
//! subcommand inside a sized thread pool and maps the outcome to an exit
//! code: 0 success, 1 configuration error, 2 numerical failure, 3 invariant
//! violation. Every run writes into one output directory: the echoed config,
//! a JSON report, CSV tables, and `error.json` when something failed.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use rough_elastic::config::RunConfig;
use rough_elastic::harness::{self, output};
use rough_elastic::params::{bound_constants, stability_constants};
use rough_elastic::spectral::{extend_field, verify_symbol_lemma, BoundaryTrace};
use rough_elastic::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rough-elastic", version, about = "Elastic scattering by rigid rough surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: `run.out_dir`, else `out/<subcommand>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Cap on worker threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Override `physics.omega`.
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sampled check of the DtN symbol estimates.
    VerifyDtn(Common),
    /// One deterministic solve with diagnostics and the a priori bound.
    Solve(Common),
    /// Deterministic solves over the `[sweep]` values.
    Sweep(Common),
    /// Monte Carlo over the configured ensemble.
    Mc {
        #[command(flatten)]
        common: Common,
        /// Override `run.n_samples`.
        #[arg(long)]
        n_samples: Option<usize>,
    },
    /// Transformed solve against a boundary-fitted solve of the same surface.
    Pushforward(Common),
    /// Extend a trace given on `x3 = h` upward by the angular spectrum.
    Extend {
        #[command(flatten)]
        common: Common,
        /// CSV with columns x1,x2,u1_re,u1_im,u2_re,u2_im,u3_re,u3_im.
        #[arg(long)]
        trace: PathBuf,
        /// Target heights (at least `h`).
        #[arg(long, required = true, num_args = 1..)]
        x3: Vec<f64>,
    },
    /// Closed-form stability and bound constants.
    Constants(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyDtn(_) => "verify-dtn",
            Command::Solve(_) => "solve",
            Command::Sweep(_) => "sweep",
            Command::Mc { .. } => "mc",
            Command::Pushforward(_) => "pushforward",
            Command::Extend { .. } => "extend",
            Command::Constants(_) => "constants",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::VerifyDtn(c)
            | Command::Solve(c)
            | Command::Sweep(c)
            | Command::Pushforward(c)
            | Command::Constants(c) => c,
            Command::Mc { common, .. } | Command::Extend { common, .. } => common,
        }
    }
}

/// Map a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } | Error::SingularTransform(..) | Error::SingularBlock(..) | Error::Internal(_) => {
            EXIT_NUMERICAL
        }
        Error::Invariant(_) => EXIT_INVARIANT,
        Error::Constraint(_)
        | Error::SlabViolation { .. }
        | Error::Unsupported(_)
        | Error::Config(_)
        | Error::Io(_) => EXIT_CONFIG,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Constraint(_) => "constraint",
        Error::SlabViolation { .. } => "slab_violation",
        Error::SingularTransform(..) => "singular_transform",
        Error::SingularBlock(..) => "singular_block",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Invariant(_) => "invariant",
        Error::Unsupported(_) => "unsupported",
        Error::Internal(_) => "internal",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
    }
}

/// Result of a subcommand that ran to completion: the exit code (0 or 3)
/// and the lines printed to stdout.
struct Outcome {
    code: i32,
    lines: Vec<String>,
}

fn load_config(c: &Common) -> rough_elastic::Result<RunConfig> {
    let mut cfg = RunConfig::load(&c.config).map_err(|e| match e {
        Error::Io(io) => Error::Config(format!("cannot read {}: {io}", c.config.display())),
        other => other,
    })?;
    if let Some(s) = c.seed {
        cfg.run.seed = s;
    }
    if let Some(w) = c.omega {
        cfg.physics.omega = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cmd: &Command, cfg: Option<&RunConfig>) -> PathBuf {
    let c = cmd.common();
    if let Some(o) = &c.out {
        return o.clone();
    }
    if let Some(d) = cfg.and_then(|c| c.run.out_dir.as_ref()) {
        return PathBuf::from(d);
    }
    PathBuf::from("out").join(cmd.name())
}

fn violations_code(v: &[String]) -> i32 {
    if v.is_empty() {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    }
}

fn execute(cmd: &Command, cfg: &mut RunConfig, dir: &Path) -> rough_elastic::Result<Outcome> {
    let mut lines = Vec::new();
    let code = match cmd {
        Command::VerifyDtn(_) => {
            let rep = verify_symbol_lemma(&cfg.params()?, cfg.run.lemma_samples, cfg.run.seed)?;
            output::write_json(&dir.join("report.json"), &rep)?;
            output::write_pairs_csv(
                &dir.join("lemma.csv"),
                &[
                    ("k", rep.constants.k),
                    ("c_k", rep.constants.c_k),
                    ("min_eig_outer", rep.min_eig_outer),
                    ("max_ratio_inner", rep.max_ratio_inner),
                    ("n_violations", rep.n_violations as f64),
                ],
            )?;
            lines.push(format!("min eigenvalue of Re(-iM) outside K*omega: {:.6e}", rep.min_eig_outer));
            lines.push(format!("max |M_ij| / (C_K omega) inside K*omega: {:.6e}", rep.max_ratio_inner));
            lines.push(format!("{} violations", rep.n_violations));
            if rep.passed() {
                EXIT_OK
            } else {
                EXIT_INVARIANT
            }
        }
        Command::Solve(_) => {
            let (rep, u) = harness::deterministic_run_with_field(cfg)?;
            let pb = harness::Problem::from_config(cfg)?;
            output::write_json(&dir.join("report.json"), &rep)?;
            output::write_summary_csv(&dir.join("summary.csv"), std::slice::from_ref(&rep))?;
            output::write_field_csv(&dir.join("field.csv"), &u)?;
            output::write_surface_csv(&dir.join("surface.csv"), &pb.surface, pb.mesh.grid().padded_dims())?;
            lines.push(format!("||u||_Vh = {:.6e}", rep.u_vh));
            lines.push(format!("||g||_H1 = {:.6e}", rep.g_h1));
            lines.push(format!("total bound = {:.6e}", rep.bound.total_bound));
            lines.push(format!("measured ratio = {:.6e}", rep.measured_ratio()));
            lines.push(format!("energy residual = {:.3e}", rep.diagnostics.energy.residual));
            lines.extend(rep.violations.iter().map(|v| format!("violation: {v}")));
            violations_code(&rep.violations)
        }
        Command::Sweep(_) => {
            let sw = cfg
                .sweep
                .clone()
                .ok_or_else(|| Error::Config("sweep needs a [sweep] section with axis and values".into()))?;
            let table = harness::parameter_sweep(cfg, sw.axis, &sw.values)?;
            output::write_json(&dir.join("report.json"), &table)?;
            output::write_sweep_csv(&dir.join("sweep.csv"), &table)?;
            let mut viol = Vec::new();
            let mut failed = false;
            for row in &table.rows {
                match (&row.report, &row.error) {
                    (Some(r), _) => {
                        lines.push(format!("value {:.6e}: ratio {:.6e}", row.value, r.measured_ratio()));
                        viol.extend(r.violations.iter().map(|v| format!("value {}: {v}", row.value)));
                    }
                    (None, e) => {
                        failed = true;
                        lines.push(format!("value {:.6e}: failed: {}", row.value, e.as_deref().unwrap_or("")));
                    }
                }
            }
            lines.extend(viol.iter().map(|v| format!("violation: {v}")));
            if !viol.is_empty() {
                EXIT_INVARIANT
            } else if failed {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            }
        }
        Command::Mc { n_samples, .. } => {
            if let Some(n) = n_samples {
                cfg.run.n_samples = *n;
                cfg.validate()?;
            }
            let rep = harness::monte_carlo(cfg, cfg.run.n_samples, cfg.run.seed)?;
            output::write_json(&dir.join("report.json"), &rep)?;
            output::write_mc_csv(&dir.join("samples.csv"), &rep)?;
            output::write_pairs_csv(
                &dir.join("mc_summary.csv"),
                &[
                    ("n_samples", rep.n_samples as f64),
                    ("completeness", rep.completeness),
                    ("mean_u_sq", rep.mean_u_sq),
                    ("se_u_sq", rep.se_u_sq),
                    ("mean_g_sq", rep.mean_g_sq),
                    ("se_g_sq", rep.se_g_sq),
                    ("l0", rep.l0),
                    ("bound_factor", rep.bound_factor),
                    ("ratio", rep.ratio),
                ],
            )?;
            lines.push(format!("completed {}/{} samples", rep.n_completed, rep.n_samples));
            lines.push(format!("mean ||u||^2 = {:.6e} +- {:.2e}", rep.mean_u_sq, rep.se_u_sq));
            lines.push(format!("mean ||g||^2 = {:.6e} +- {:.2e}", rep.mean_g_sq, rep.se_g_sq));
            lines.push(format!("ratio = {:.6e}", rep.ratio));
            lines.extend(rep.violations.iter().map(|v| format!("violation: {v}")));
            violations_code(&rep.violations)
        }
        Command::Pushforward(_) => {
            let pb = harness::Problem::from_config(cfg)?;
            let rep = harness::pushforward_check(&pb.as_sample(), cfg)?;
            output::write_json(&dir.join("report.json"), &rep)?;
            output::write_pairs_csv(
                &dir.join("pushforward.csv"),
                &[
                    ("difference", rep.difference),
                    ("norm_transformed", rep.norm_transformed),
                    ("norm_fitted", rep.norm_fitted),
                ],
            )?;
            lines.push(format!("relative V_h difference = {:.6e}", rep.difference));
            let viol: Vec<String> = rep.diagnostics.iter().flat_map(|d| d.violations()).collect();
            lines.extend(viol.iter().map(|v| format!("violation: {v}")));
            violations_code(&viol)
        }
        Command::Extend { trace, x3, .. } => {
            let params = cfg.params()?;
            let grid = cfg.grid();
            let h = cfg.geometry.h;
            let values = output::read_trace_csv(trace).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", trace.display())),
                other => other,
            })?;
            let tr = BoundaryTrace::new(grid.clone(), h, values)?;
            let mut points = Vec::new();
            for &z in x3 {
                let u = extend_field(&tr, z, &params)?;
                for (p, v) in u.into_iter().enumerate() {
                    let x = grid.point(p);
                    points.push(([x[0], x[1], z], v));
                }
            }
            output::write_points_csv(&dir.join("extended.csv"), &points)?;
            output::write_json(&dir.join("report.json"), &json!({ "heights": x3, "n_points": points.len() }))?;
            lines.push(format!("extended {} points to {} heights", grid.n_points(), x3.len()));
            EXIT_OK
        }
        Command::Constants(_) => {
            let params = cfg.params()?;
            let pb = harness::Problem::from_config(cfg)?;
            let s = stability_constants(&params);
            let lip = pb.surface.lipschitz_bound();
            let b = bound_constants(&params, &pb.geom, lip, cfg.run.generic_c)?;
            let pairs = [
                ("kp", params.kp()),
                ("ks", params.ks()),
                ("K", s.k),
                ("C_K", s.c_k),
                ("c_K", s.small_c_k),
                ("L", lip),
                ("C1", b.c1),
                ("C2", b.c2),
                ("C3", b.c3),
                ("C4", b.c4),
                ("C5", b.c5),
                ("C6", b.c6),
                ("total_bound", b.total_bound),
                ("total_bound_linear", b.total_bound_linear),
            ];
            output::write_pairs_csv(&dir.join("constants.csv"), &pairs)?;
            output::write_json(&dir.join("report.json"), &json!({ "stability": s, "bound": b, "lipschitz": lip }))?;
            lines.extend(pairs.iter().map(|(n, v)| format!("{n:<20} {v:.10e}")));
            EXIT_OK
        }
    };
    Ok(Outcome { code, lines })
}

fn write_error(dir: &Path, cmd: &str, e: &Error, code: i32) {
    let rec = json!({ "command": cmd, "kind": error_kind(e), "message": e.to_string(), "exit_code": code });
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = output::write_json(&dir.join("error.json"), &rec);
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cmd = &cli.command;
    let common = cmd.common();

    let mut cfg = match load_config(common) {
        Ok(c) => c,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            write_error(&out_dir(cmd, None), cmd.name(), &e, code);
            return code;
        }
    };
    let dir = out_dir(cmd, Some(&cfg));

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(common.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            let e = Error::Internal(format!("thread pool: {e}"));
            eprintln!("error: {e}");
            write_error(&dir, cmd.name(), &e, EXIT_NUMERICAL);
            return EXIT_NUMERICAL;
        }
    };
    let result = std::fs::create_dir_all(&dir).map_err(Error::from).and_then(|_| {
        std::fs::write(dir.join("config.toml"), cfg.to_toml_string()?)?;
        pool.install(|| execute(cmd, &mut cfg, &dir))
    });
    match result {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            if out.code != EXIT_OK {
                let e = Error::Invariant(
                    out.lines.iter().filter(|l| l.starts_with("violation")).cloned().collect::<Vec<_>>().join("; "),
                );
                let e = if out.code == EXIT_NUMERICAL { Error::Internal("some sweep points failed".into()) } else { e };
                eprintln!("error: {e}");
                write_error(&dir, cmd.name(), &e, out.code);
            }
            out.code
        }
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            write_error(&dir, cmd.name(), &e, code);
            code
        }
    }
}
