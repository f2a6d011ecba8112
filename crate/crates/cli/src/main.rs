use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ri2d_core::error::{Error, Result};
use ri2d_core::exec::Execution;
use ri2d_core::interlacements::{InterlacementConfig, MinLabelGrid, SoupSampler};
use ri2d_core::lattice::{parse_point_list, LatticePoint, LatticeSet};
use ri2d_core::potential_kernel::{PotentialKernel, DEFAULT_EXACT_RADIUS};
use ri2d_core::potential_theory::analyze;
use ri2d_core::rng::RngSeed;
use ri2d_core::torus::conditional_uncovered_estimate;
use ri2d_core::verify::{render_table, Suite, Verifier, VerifyConfig};
use ri2d_core::walks::{hat_run_until_escape, srw_run_until_exit, BallTracer, WalkPath};

/// Two-dimensional random interlacements and random walk on the torus.
#[derive(Parser)]
#[command(name = "ri2d", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed (decimal or 0x-prefixed hex).
    #[arg(long, global = true, env = "RI2D_SEED", default_value = "0x5EED", value_parser = parse_seed)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Radius of the exactly tabulated potential kernel.
    #[arg(long, global = true, default_value_t = DEFAULT_EXACT_RADIUS)]
    exact_radius: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the potential kernel a(x) as `x,y,a` lines.
    Kernel {
        /// Point `x,y`; repeatable.
        #[arg(long = "point", required = true, value_parser = parse_point)]
        points: Vec<LatticePoint>,
    },
    /// Capacity, harmonic measure and equilibrium measure of a finite set, as JSON.
    Cap {
        /// Points `x1,y1;x2,y2;...`
        #[arg(long, value_parser = parse_points)]
        set: PointList,
    },
    /// Run simple random walk or the conditioned walk.
    Walk {
        #[arg(long, value_enum, default_value_t = Mode::Hat)]
        mode: Mode,
        #[arg(long, value_parser = parse_point)]
        start: LatticePoint,
        /// Stop once the walk leaves B(kill radius). Without it the
        /// conditioned walk is traced exactly on B(radius).
        #[arg(long)]
        kill_radius: Option<f64>,
        /// Observation window (conditioned walk) or exit ball (simple walk).
        #[arg(long, default_value_t = 20)]
        radius: i64,
        #[arg(long, value_enum, default_value_t = WalkFormat::Json)]
        format: WalkFormat,
    },
    /// Sample the vacant set of random interlacements on B(radius) at several levels.
    SampleVacant {
        #[arg(long, default_value_t = 40)]
        radius: i64,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.25,1.5")]
        levels: Vec<f64>,
        #[arg(long, value_enum, default_value_t = VacantFormat::Pgm)]
        out: VacantFormat,
        /// Directory for the output files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Estimate P[A uncovered | 0 uncovered] at time t_alpha on the n-torus.
    Torus {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_parser = parse_points, default_value = "0,0;1,0")]
        set: PointList,
        #[arg(long, default_value_t = 2000)]
        replicas: u64,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Srw,
    Hat,
}

#[derive(Clone, Copy, ValueEnum)]
enum WalkFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VacantFormat {
    Pgm,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Exact,
    Mc,
    Torus,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn parse_point(s: &str) -> std::result::Result<LatticePoint, String> {
    s.parse::<LatticePoint>().map_err(|e| e.to_string())
}

/// A `;`-separated point list taken as a single argument.
#[derive(Clone)]
struct PointList(Vec<LatticePoint>);

fn parse_points(s: &str) -> std::result::Result<PointList, String> {
    parse_point_list(s).map(PointList).map_err(|e| e.to_string())
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn level_tag(alpha: f64) -> String {
    format!("{alpha}").replace('.', "p")
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t as usize)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let kernel = || PotentialKernel::build(g.exact_radius);
    match cli.command {
        Command::Kernel { points } => {
            let k = kernel()?;
            for p in points {
                println!("{},{},{:.12}", p.x, p.y, k.potential(p));
            }
        }
        Command::Cap { set } => {
            let k = kernel()?;
            let prof = analyze(&LatticeSet::new(set.0)?, &k)?;
            print_json(&json!({
                "schema": 1,
                "points": prof.set.points(),
                "cap": prof.cap,
                "hm": prof.hm,
                "equilibrium": prof.equilibrium,
                "translation": prof.translation,
                "condition": prof.condition,
            }))?;
        }
        Command::Walk {
            mode,
            start,
            kill_radius,
            radius,
            format,
        } => {
            let mut rng = RngSeed::new(g.seed, 0).rng();
            let (paths, extra): (Vec<WalkPath>, serde_json::Value) = match (mode, kill_radius) {
                (Mode::Srw, kill) => {
                    let r = kill.unwrap_or(radius as f64);
                    (
                        vec![srw_run_until_exit(start, r, &mut rng)?],
                        json!({ "exit_radius": r }),
                    )
                }
                (Mode::Hat, Some(kill)) => {
                    let k = kernel()?;
                    let run = hat_run_until_escape(start, radius as f64, kill, &k, &mut rng)?;
                    let extra = json!({
                        "window_radius": run.window_radius,
                        "kill_radius": run.kill_radius,
                        "bias_bound": run.bias_bound,
                    });
                    (vec![run.path], extra)
                }
                (Mode::Hat, None) => {
                    let k = kernel()?;
                    let tracer = BallTracer::new(radius, &k)?;
                    (
                        tracer.trace(start, &mut rng)?,
                        json!({ "window_radius": radius, "bias_bound": 0.0 }),
                    )
                }
            };
            match format {
                WalkFormat::Csv => {
                    println!("excursion,step,x,y");
                    for (e, path) in paths.iter().enumerate() {
                        for (i, p) in path.steps.iter().enumerate() {
                            println!("{e},{i},{},{}", p.x, p.y);
                        }
                    }
                }
                WalkFormat::Json => {
                    let steps: usize = paths.iter().map(|p| p.len()).sum();
                    let last = paths.last().and_then(|p| p.steps.last()).copied();
                    print_json(&json!({
                        "schema": 1,
                        "mode": match mode { Mode::Srw => "srw", Mode::Hat => "hat" },
                        "seed": g.seed,
                        "start": start,
                        "excursions": paths.len(),
                        "sites": steps,
                        "last": last,
                        "visits_origin": paths.iter().any(|p| p.visits_origin()),
                        "details": extra,
                    }))?;
                }
            }
        }
        Command::SampleVacant {
            radius,
            levels,
            out,
            out_dir,
        } => {
            let k = kernel()?;
            let cfg = InterlacementConfig::new(radius, levels.clone(), RngSeed::new(g.seed, 0));
            let sampler = SoupSampler::new(&cfg, &k)?;
            let mut grid = MinLabelGrid::new(radius);
            let count = sampler.sample_into(&mut cfg.seed.rng(), &mut grid);
            std::fs::create_dir_all(&out_dir)?;
            let mut summary = Vec::new();
            for &alpha in &levels {
                let v = grid.vacant_grid(alpha);
                let base = out_dir.join(format!("vacant_r{radius}_a{}", level_tag(alpha)));
                let file = match out {
                    VacantFormat::Pgm => {
                        let f = base.with_extension("pgm");
                        v.write_pgm(&f)?;
                        f
                    }
                    VacantFormat::Csv => {
                        let f = base.with_extension("csv");
                        std::fs::write(&f, v.to_csv())?;
                        f
                    }
                    VacantFormat::Json => {
                        let f = base.with_extension("json");
                        let body =
                            json!({ "schema": 1, "alpha": alpha, "radius": radius, "vacant": v.vacant_points() });
                        std::fs::write(&f, serde_json::to_string(&body)?)?;
                        f
                    }
                };
                summary.push(json!({ "alpha": alpha, "vacant": v.vacant_count, "file": file }));
            }
            print_json(&json!({
                "schema": 1,
                "seed": g.seed,
                "radius": radius,
                "trajectories": count,
                "expected_trajectories": sampler.expected_count(),
                "levels": summary,
            }))?;
        }
        Command::Torus {
            n,
            alpha,
            set,
            replicas,
        } => {
            let k = kernel()?;
            let set = LatticeSet::new(set.0)?;
            let rep = conditional_uncovered_estimate(
                n,
                alpha,
                &set,
                replicas,
                RngSeed::new(g.seed, 0),
                &k,
                Execution::Parallel,
            )?;
            print_json(&json!({
                "schema": 1,
                "seed": g.seed,
                "n": n,
                "alpha": alpha,
                "set": rep.set,
                "replicas": rep.replicas,
                "accepted": rep.accepted,
                "acceptance_rate": rep.acceptance_rate,
                "estimate": rep.estimate.mean,
                "ci": [rep.estimate.ci_low, rep.estimate.ci_high],
                "ci_level": rep.estimate.ci_level,
                "predicted": rep.predicted,
            }))?;
        }
        Command::Verify { suite, format } => {
            let suite = match suite {
                SuiteArg::Exact => Suite::Exact,
                SuiteArg::Mc => Suite::Mc,
                SuiteArg::Torus => Suite::Torus,
                SuiteArg::All => Suite::All,
            };
            let verifier = Verifier::new(VerifyConfig {
                seed: g.seed,
                exact_radius: g.exact_radius,
                execution: Execution::Parallel,
            })?;
            let report = verifier.run_suite(suite);
            match format {
                ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
                ReportFormat::Table => print!("{}", render_table(&report)),
            }
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
