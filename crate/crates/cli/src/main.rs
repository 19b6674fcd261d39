//! Command-line front end: reproduces the reference datasets (worked
//! three-oscillator example, ball/shell field scans, partner profiles)
//! as CSV/JSON artifacts and runs the Monte-Carlo criterion verifier.
//!
//! Every command runs with no flags using defaults equal to the reference
//! figure parameters. Outputs are deterministic for a fixed configuration
//! and seed, and files are replaced atomically.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use config::{resolve, FileConfig};
use output::{fmt_f64, ho_demo_csv, profile_csv, scan_csv, write_atomic};
use symoverlap::circuits::ho_example;
use symoverlap::field::{
    default_r_grid, evaluate_point, falloff_exponent, mass_grid, partner_profile, separation_grid,
    width_grid, BallShellParams, QuadConfig, RadialWindow, ScanPoint,
};
use symoverlap::measures::random_check;

#[derive(Parser)]
#[command(
    name = "symoverlap",
    version,
    about = "Symplectic overlap toolkit: partner modes, the D^sym entanglement criterion, and the ball/shell field example"
)]
struct Cli {
    /// TOML config file; flags and SYMOVERLAP_* variables override it.
    #[arg(long, global = true, env = "SYMOVERLAP_CONFIG")]
    config: Option<PathBuf>,

    /// Worker threads for scans.
    #[arg(long, global = true, env = "SYMOVERLAP_JOBS")]
    jobs: Option<usize>,

    /// Relative tolerance for the momentum quadrature.
    #[arg(long, global = true, env = "SYMOVERLAP_TOL")]
    tol: Option<f64>,

    /// Output path (defaults to a command-specific file name).
    #[arg(long, global = true, env = "SYMOVERLAP_OUT")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squeezer + beam-splitter example: E_N, D^sym, D_c over a theta grid.
    HoDemo(HoDemoArgs),
    /// Ball/shell field-theory datasets.
    #[command(subcommand)]
    BallShell(BallShellCmd),
    /// Monte-Carlo check of the criterion against PPT on random states.
    RandomCheck(RandomCheckArgs),
}

#[derive(Args)]
struct HoDemoArgs {
    /// Squeezing intensity r.
    #[arg(long, env = "SYMOVERLAP_R")]
    r: Option<f64>,
    /// Number of interior theta grid points on (0, pi).
    #[arg(long, env = "SYMOVERLAP_THETA_STEPS")]
    theta_steps: Option<usize>,
}

#[derive(Subcommand)]
enum BallShellCmd {
    /// E_N and overlap quantities against the separation R_B - R_A.
    ScanSeparation(ScanArgs),
    /// ... against the dimensionless mass mu = m R_A.
    ScanMass(ScanArgs),
    /// ... against the shell width d_B.
    ScanWidth(ScanArgs),
    /// Partner-mode radial profiles f_Ap, g_Ap of the ball mode.
    PartnerProfile(ProfileArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Dimensionless mass mu = m R_A.
    #[arg(long, env = "SYMOVERLAP_MU")]
    mu: Option<f64>,
    /// Inner shell radius R_B (units of R_A).
    #[arg(long, env = "SYMOVERLAP_R_B")]
    r_b: Option<f64>,
    /// Shell width d_B (units of R_A).
    #[arg(long, env = "SYMOVERLAP_D_B")]
    d_b: Option<f64>,
    /// Grid points.
    #[arg(long, env = "SYMOVERLAP_STEPS")]
    steps: Option<usize>,
    /// Range minimum (separation / mu / d_B depending on the scan).
    #[arg(long, env = "SYMOVERLAP_FROM")]
    from: Option<f64>,
    /// Range maximum.
    #[arg(long, env = "SYMOVERLAP_TO")]
    to: Option<f64>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Dimensionless mass mu = m R_A.
    #[arg(long, env = "SYMOVERLAP_MU")]
    mu: Option<f64>,
    /// Grid minimum in units of R_A.
    #[arg(long, env = "SYMOVERLAP_R_MIN")]
    r_min: Option<f64>,
    /// Grid maximum in units of R_A.
    #[arg(long, env = "SYMOVERLAP_R_MAX")]
    r_max: Option<f64>,
    /// Number of logarithmic grid points.
    #[arg(long, env = "SYMOVERLAP_POINTS")]
    points: Option<usize>,
}

#[derive(Args)]
struct RandomCheckArgs {
    /// Number of random two-mode states.
    #[arg(long, env = "SYMOVERLAP_N_TRIALS")]
    n_trials: Option<usize>,
    /// RNG seed; reruns with the same seed are identical.
    #[arg(long, env = "SYMOVERLAP_SEED")]
    seed: Option<u64>,
    /// Also dump one CSV row per trial to this path.
    #[arg(long, env = "SYMOVERLAP_ROWS")]
    rows: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScanDiagnostics {
    k_max: f64,
    tol: f64,
    point_failures: Vec<PointFailure>,
}

#[derive(Serialize)]
struct PointFailure {
    param: f64,
    error: String,
}

#[derive(Serialize)]
struct ProfileSummary {
    det_ja: f64,
    i_plus: f64,
    i_minus: f64,
    tail_slope_f_ap: Option<f64>,
    tail_slope_f_ap_stderr: Option<f64>,
    tail_slope_g_ap: Option<f64>,
    tail_slope_g_ap_stderr: Option<f64>,
    point_failures: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(clean) => {
            if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let quad = QuadConfig {
        rel_tol: resolve(cli.tol, file.quad.rel_tol, QuadConfig::default().rel_tol),
        ..QuadConfig::default()
    };
    let jobs = cli.jobs.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;

    match cli.command {
        Command::HoDemo(args) => {
            let r = resolve(args.r, file.ho_demo.r, 0.5);
            let steps = resolve(args.theta_steps, file.ho_demo.theta_steps, 200);
            if steps < 2 {
                return Err("theta-steps must be at least 2".into());
            }
            // interior grid: endpoints theta = 0, pi excluded
            let thetas: Vec<f64> = (1..=steps)
                .map(|k| std::f64::consts::PI * k as f64 / (steps + 1) as f64)
                .collect();
            let rows: Vec<_> = pool
                .install(|| {
                    thetas
                        .par_iter()
                        .map(|&theta| ho_example(r, theta).map(|ex| (theta, ex.report)))
                        .collect::<Result<Vec<_>, _>>()
                })
                .map_err(|e| e.to_string())?;
            let out = cli.out.unwrap_or_else(|| PathBuf::from("ho-demo.csv"));
            write_atomic(&out, ho_demo_csv(&rows).as_bytes()).map_err(|e| e.to_string())?;
            eprintln!("wrote {} ({} rows, r = {r})", out.display(), rows.len());
            Ok(true)
        }

        Command::BallShell(cmd) => match cmd {
            BallShellCmd::ScanSeparation(args) => {
                let mu = resolve(args.mu, file.ball_shell.mu, 0.0);
                let d_b = resolve(args.d_b, file.ball_shell.d_b, 0.5);
                let lo = resolve(args.from, file.ball_shell.sep_min, 0.0);
                let hi = resolve(args.to, file.ball_shell.sep_max, 0.12);
                let steps = resolve(args.steps, file.ball_shell.steps, 25);
                let grid = separation_grid(mu, d_b, (lo, hi), steps).map_err(|e| e.to_string())?;
                run_scan(
                    &pool,
                    grid,
                    &quad,
                    "rb_minus_ra",
                    cli.out,
                    "scan-separation",
                )
            }
            BallShellCmd::ScanMass(args) => {
                let r_b = resolve(args.r_b, file.ball_shell.r_b, 1.0);
                let d_b = resolve(args.d_b, file.ball_shell.d_b, 0.5);
                let lo = resolve(args.from, file.ball_shell.mu_min, 0.0);
                let hi = resolve(args.to, file.ball_shell.mu_max, 3.0);
                let steps = resolve(args.steps, file.ball_shell.steps, 25);
                let grid = mass_grid((lo, hi), steps, r_b, d_b).map_err(|e| e.to_string())?;
                run_scan(&pool, grid, &quad, "mu", cli.out, "scan-mass")
            }
            BallShellCmd::ScanWidth(args) => {
                let mu = resolve(args.mu, file.ball_shell.mu, 0.0);
                let r_b = resolve(args.r_b, file.ball_shell.r_b, 1.0);
                let lo = resolve(args.from, file.ball_shell.db_min, 0.05);
                let hi = resolve(args.to, file.ball_shell.db_max, 2.0);
                let steps = resolve(args.steps, file.ball_shell.steps, 25);
                let grid = width_grid((lo, hi), steps, mu, r_b).map_err(|e| e.to_string())?;
                run_scan(&pool, grid, &quad, "d_b", cli.out, "scan-width")
            }
            BallShellCmd::PartnerProfile(args) => {
                let mu = resolve(args.mu, file.ball_shell.mu, 0.0);
                let r_min = resolve(args.r_min, file.ball_shell.r_min, 1e-2);
                let r_max = resolve(args.r_max, file.ball_shell.r_max, 50.0);
                let points = resolve(args.points, file.ball_shell.points, 400);
                if !(r_min > 0.0 && r_max > r_min && points >= 2) {
                    return Err("bad profile grid".into());
                }
                let grid: Vec<f64> = if (r_min, r_max, points) == (1e-2, 50.0, 400) {
                    default_r_grid(1.0)
                } else {
                    (0..points)
                        .map(|i| r_min * (r_max / r_min).powf(i as f64 / (points - 1) as f64))
                        .collect()
                };
                let ball = RadialWindow::ball(1.0).map_err(|e| e.to_string())?;
                let prof = partner_profile(&ball, mu, &grid, &quad).map_err(|e| e.to_string())?;
                // tail-slope summary over [10, 50] R_A where covered
                let idx: Vec<usize> = (0..grid.len())
                    .filter(|&i| grid[i] >= 10.0 && grid[i] <= 50.0)
                    .collect();
                let tail = |v: &[f64]| -> Option<(f64, f64)> {
                    let r: Vec<f64> = idx.iter().map(|&i| grid[i]).collect();
                    let w: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
                    falloff_exponent(&r, &w).ok()
                };
                let tf = tail(&prof.f_ap);
                let tg = tail(&prof.g_ap);
                let failures: Vec<f64> = (0..grid.len())
                    .filter(|&i| !prof.converged[i])
                    .map(|i| grid[i])
                    .collect();
                let clean = failures.is_empty();
                let summary = ProfileSummary {
                    det_ja: prof.det_ja,
                    i_plus: prof.i_plus,
                    i_minus: prof.i_minus,
                    tail_slope_f_ap: tf.map(|t| t.0),
                    tail_slope_f_ap_stderr: tf.map(|t| t.1),
                    tail_slope_g_ap: tg.map(|t| t.0),
                    tail_slope_g_ap_stderr: tg.map(|t| t.1),
                    point_failures: failures,
                };
                let out = cli
                    .out
                    .unwrap_or_else(|| PathBuf::from("partner-profile.csv"));
                write_atomic(&out, profile_csv(&grid, &prof.f_ap, &prof.g_ap).as_bytes())
                    .map_err(|e| e.to_string())?;
                let json_path = sidecar_json(&out);
                write_atomic(
                    &json_path,
                    serde_json::to_string_pretty(&summary)
                        .map_err(|e| e.to_string())?
                        .as_bytes(),
                )
                .map_err(|e| e.to_string())?;
                eprintln!(
                    "wrote {} and {} (det J_A = {}, slopes f: {:?}, g: {:?})",
                    out.display(),
                    json_path.display(),
                    fmt_f64(prof.det_ja),
                    summary.tail_slope_f_ap,
                    summary.tail_slope_g_ap,
                );
                Ok(clean)
            }
        },

        Command::RandomCheck(args) => {
            let n_trials = resolve(args.n_trials, file.random_check.n_trials, 100_000);
            let seed = resolve(args.seed, file.random_check.seed, 42);
            if n_trials < 1 {
                return Err("n-trials must be at least 1".into());
            }
            // deterministic seed-sharded parallel merge (rows, when asked
            // for, are concatenated in shard order)
            let shards: Vec<(usize, usize)> = {
                let per = n_trials.div_ceil(jobs.max(1));
                (0..n_trials)
                    .step_by(per.max(1))
                    .map(|start| (start, per.min(n_trials - start)))
                    .collect()
            };
            let want_rows = args.rows.is_some();
            let results: Vec<_> = pool.install(|| {
                shards
                    .par_iter()
                    .map(|&(start, len)| {
                        if want_rows {
                            let (rep, rows) = symoverlap::measures::random_sweep(
                                len,
                                seed.wrapping_add(start as u64),
                            );
                            (rep, rows)
                        } else {
                            (
                                random_check(len, seed.wrapping_add(start as u64)),
                                Vec::new(),
                            )
                        }
                    })
                    .collect()
            });
            let mut report = results[0].0.clone();
            for (rep, _) in &results[1..] {
                report.n_trials += rep.n_trials;
                report.n_entangled += rep.n_entangled;
                report.n_separable += rep.n_separable;
                report.n_boundary += rep.n_boundary;
                report.n_not_applicable += rep.n_not_applicable;
                report.n_disagreements += rep.n_disagreements;
            }
            report.seed = seed;
            if let Some(rows_path) = &args.rows {
                let mut csv = String::from(symoverlap::measures::SweepRow::CSV_HEADER);
                csv.push('\n');
                for (_, rows) in &results {
                    for row in rows {
                        csv.push_str(&row.to_csv());
                        csv.push('\n');
                    }
                }
                write_atomic(rows_path, csv.as_bytes()).map_err(|e| e.to_string())?;
                eprintln!("wrote {}", rows_path.display());
            }
            let out = cli
                .out
                .unwrap_or_else(|| PathBuf::from("random-check.json"));
            write_atomic(
                &out,
                serde_json::to_string_pretty(&report)
                    .map_err(|e| e.to_string())?
                    .as_bytes(),
            )
            .map_err(|e| e.to_string())?;
            eprintln!(
                "wrote {} ({} trials, {} disagreements)",
                out.display(),
                report.n_trials,
                report.n_disagreements
            );
            Ok(report.n_disagreements == 0)
        }
    }
}

fn run_scan(
    pool: &rayon::ThreadPool,
    grid: Vec<(f64, BallShellParams)>,
    quad: &QuadConfig,
    param_name: &str,
    out: Option<PathBuf>,
    default_stem: &str,
) -> Result<bool, String> {
    let points: Vec<ScanPoint> = pool.install(|| {
        grid.par_iter()
            .map(|&(param, params)| evaluate_point(params, param, quad))
            .collect()
    });
    let failures: Vec<PointFailure> = points
        .iter()
        .filter_map(|p| {
            p.error.as_ref().map(|e| PointFailure {
                param: p.param,
                error: e.clone(),
            })
        })
        .collect();
    let k_max = points
        .iter()
        .filter_map(|p| p.diagnostics.map(|d| d.k_max))
        .fold(0.0f64, f64::max);
    let clean = failures.is_empty();
    let diag = ScanDiagnostics {
        k_max,
        tol: quad.rel_tol,
        point_failures: failures,
    };
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{default_stem}.csv")));
    write_atomic(&out, scan_csv(param_name, &points).as_bytes()).map_err(|e| e.to_string())?;
    let json_path = sidecar_json(&out);
    write_atomic(
        &json_path,
        serde_json::to_string_pretty(&diag)
            .map_err(|e| e.to_string())?
            .as_bytes(),
    )
    .map_err(|e| e.to_string())?;
    eprintln!(
        "wrote {} and {} ({} points, {} failures)",
        out.display(),
        json_path.display(),
        points.len(),
        diag.point_failures.len()
    );
    Ok(clean)
}

fn sidecar_json(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
