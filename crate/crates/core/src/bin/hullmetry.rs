use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hullmetry::chaining::{entropy_integral, gamma_exact_small, gamma_greedy, gaussian_sup_mc};
use hullmetry::covering::{covering_report, volume_cover_bounds};
use hullmetry::entropy::{l_existence_report, EntropyProfile};
use hullmetry::error::HullError;
use hullmetry::geometry::sampling::polytope_samples;
use hullmetry::geometry::{quickhull, volume_det, volume_projected, volume_ratio_poly, PointCloud, Polytope};
use hullmetry::harness::{self, DEFAULT_SEED, SEED_ENV};
use hullmetry::minkowski::{check_reverse_bm, hausdorff_to_hull, minkowski_average, BodyApprox};

#[derive(Parser)]
#[command(name = "hullmetry", version, about = "Convex hull, covering and chaining checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario suite and write reports into a directory.
    Run {
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed (falls back to HULLMETRY_SEED, then the suite).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Convex hull of a body or cloud.
    Hull(Source),
    /// Volume of a body by both boundary formulas.
    Volume {
        #[arg(long)]
        body: String,
    },
    /// Minkowski average A(k) of a body: volume and gap to the hull.
    Minkavg {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Reverse Brunn-Minkowski ledger for two bodies.
    Revbm {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Covering numbers of a cloud, or of a body sampled at ε/4.
    Cover {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        eps: f64,
    },
    /// γ_α of a cloud.
    Gamma {
        #[arg(long)]
        cloud: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
    },
    /// Monte Carlo E sup of the canonical Gaussian process on a cloud.
    Supgauss {
        #[arg(long)]
        cloud: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Entropy profile verdict.
    Profile {
        #[arg(long, allow_hyphen_values = true)]
        chi: f64,
        #[arg(long, allow_hyphen_values = true)]
        psi: f64,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    #[arg(long)]
    body: Option<String>,
    #[arg(long)]
    cloud: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Greedy,
    Entropy,
}

/// A file path, or the name of a bundled fixture when no such file exists.
fn read_input(arg: &str, bundled: fn(&str) -> hullmetry::error::Result<&'static str>) -> Result<String, HullError> {
    let path = Path::new(arg);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| HullError::InvalidInput(format!("{arg}: {e}")));
    }
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    bundled(stem).map(str::to_string)
}

fn load_body(arg: &str) -> Result<Polytope, HullError> {
    Polytope::from_json_str(&read_input(arg, hullmetry::fixtures::body_json)?)
}

fn load_cloud(arg: &str) -> Result<PointCloud, HullError> {
    PointCloud::from_json_str(&read_input(arg, hullmetry::fixtures::cloud_json)?)
}

fn load_source(src: &Source) -> Result<BodyApprox, HullError> {
    match (&src.body, &src.cloud) {
        (Some(b), _) => BodyApprox::from_polytope(&load_body(b)?),
        (_, Some(c)) => Ok(BodyApprox::from_cloud(&load_cloud(c)?)),
        _ => unreachable!("clap enforces one source"),
    }
}

fn single(cmd: Cmd) -> Result<Value, HullError> {
    Ok(match cmd {
        Cmd::Run { .. } => unreachable!("handled by main"),
        Cmd::Hull(src) => {
            let hull = match (&src.body, &src.cloud) {
                (Some(b), _) => load_body(b)?.hull()?,
                (_, Some(c)) => quickhull(&load_cloud(c)?)?,
                _ => unreachable!(),
            };
            json!({"hull": hull.to_doc(), "volume": hull.volume()})
        }
        Cmd::Volume { body } => {
            let p = load_body(&body)?;
            json!({
                "volume": p.volume(),
                "volume_det": volume_det(&p.boundary),
                "volume_projected": volume_projected(&p.boundary),
                "ratio_poly": volume_ratio_poly(&p)?,
            })
        }
        Cmd::Minkavg { src, k } => {
            let a = load_source(&src)?;
            let ak = minkowski_average(&a, k)?;
            let gap = hausdorff_to_hull(&ak, &a.points())?;
            json!({"k": k, "volume": ak.volume(), "hausdorff_to_hull": gap})
        }
        Cmd::Revbm { a, b, s, t, m } => {
            let (a, b) = (BodyApprox::from_polytope(&load_body(&a)?)?, BodyApprox::from_polytope(&load_body(&b)?)?);
            serde_json::to_value(check_reverse_bm(&a, &b, s, t, m)?).expect("report serializes")
        }
        Cmd::Cover { src, eps } => {
            let (cloud, bounds) = match (&src.body, &src.cloud) {
                (Some(b), _) => {
                    let p = load_body(b)?;
                    let bounds = volume_cover_bounds(&p, eps).ok();
                    (PointCloud::new(polytope_samples(&p, eps / 4.0))?, bounds)
                }
                (_, Some(c)) => (load_cloud(c)?, None),
                _ => unreachable!(),
            };
            let mut r = covering_report(&cloud, eps)?;
            if let Some((lo, hi)) = bounds {
                r.vol_lower = Some(lo);
                r.vol_upper = Some(hi);
            }
            serde_json::to_value(r).expect("report serializes")
        }
        Cmd::Gamma { cloud, alpha, method } => {
            let c = load_cloud(&cloud)?;
            let est = match method {
                Method::Exact => gamma_exact_small(&c, alpha)?,
                Method::Greedy => gamma_greedy(&c, alpha)?,
                Method::Entropy => entropy_integral(&c, alpha)?,
            };
            serde_json::to_value(est).expect("estimate serializes")
        }
        Cmd::Supgauss { cloud, trials, seed } => {
            let seed = match seed {
                Some(s) => s,
                None => match std::env::var(SEED_ENV) {
                    Ok(v) => v.trim().parse().map_err(|_| HullError::InvalidInput(format!("{SEED_ENV} is not an integer")))?,
                    Err(_) => DEFAULT_SEED,
                },
            };
            serde_json::to_value(gaussian_sup_mc(&load_cloud(&cloud)?, trials, seed)?).expect("estimate serializes")
        }
        Cmd::Profile { chi, psi, delta, c } => {
            let p = EntropyProfile::plain(chi, psi)?;
            serde_json::to_value(l_existence_report(&p, delta, c)?).expect("report serializes")
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.cmd {
        Cmd::Run { suite, out, seed, jobs } => {
            let run = || harness::run_suite(&suite, &out, seed);
            let result = match jobs {
                Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build() {
                    Ok(pool) => pool.install(run),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(2);
                    }
                },
                None => run(),
            };
            match result {
                Ok(outcome) => {
                    let failed: Vec<_> = outcome.report.records.iter().filter(|r| !r.holds).collect();
                    for r in &failed {
                        eprintln!("FAILED {} {} {}{}", r.scenario, r.check.as_str(), r.case,
                            r.error.as_ref().map(|e| format!(": {e}")).unwrap_or_default());
                    }
                    eprintln!("{} records, {} failed", outcome.report.records.len(), failed.len());
                    ExitCode::from(if failed.is_empty() { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        cmd => match single(cmd) {
            Ok(v) => {
                let text = serde_json::to_string_pretty(&v).expect("JSON value serializes");
                // A closed pipe (e.g. `| head`) is not an error worth a panic.
                let _ = writeln!(std::io::stdout().lock(), "{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
