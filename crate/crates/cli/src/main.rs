use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use slide_stats::generators::{sample, SourceKind, SourceSpec};
use slide_stats::harness::{
    cloud, normality_test, parse_config, replicate, standard_rows, summaries_csv, table_run,
    tangibility_check, CloudPoint, Family, TANGIBILITY_TOLERANCE,
};
use slide_stats::io::{fmt_num, load_prices_file, read_point_cloud_file, write_point_cloud, PriceColumn};
use slide_stats::returns::{log_returns, rho_curve, scatter_csv, scatter_point, ScatterPoint, Windows};
use slide_stats::slide::rho12;
use slide_stats::{nn_distances, nn_distances_1d, Engine, Error, Mode};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "slide", version, about = "Slide statistics of point sets and return series")]
struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Nearest,
    Consecutive,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Kdtree,
    Brute,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Kdtree => Engine::KdTree,
            EngineArg::Brute => Engine::Brute,
        }
    }
}

#[derive(clap::Args)]
struct KindArgs {
    /// uniform, uniform-cube, normal, bivariate-normal, exponential, sqrt-power,
    /// laplace, cauchy, stable, cantor, sierpinski, cos-walk, primes
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

impl KindArgs {
    fn parse(&self) -> Result<SourceKind, Error> {
        let name = self.kind.as_deref().ok_or_else(|| Error::BadSpec("--kind is required".into()))?;
        SourceKind::parse(name, self.m, self.alpha, self.beta)
    }
}

#[derive(clap::Args)]
struct PriceArgs {
    /// Column holding the price: zero-based index or header name. Defaults to the last column.
    #[arg(long)]
    price_col: Option<PriceColumn>,
    /// Drop the first row even if it looks numeric.
    #[arg(long)]
    skip_header: bool,
}

#[derive(Subcommand)]
enum Command {
    /// ρ₁ and ρ₂ of a point cloud read from CSV.
    Compute {
        #[arg(long)]
        input: PathBuf,
        /// Expected number of columns.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_enum, default_value_t = ModeArg::Nearest)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
        engine: EngineArg,
        /// Drop exact duplicate points instead of failing.
        #[arg(long)]
        dedupe: bool,
    },
    /// Draw a point cloud and write it as CSV.
    Sample {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replicate summary of one source.
    Simulate {
        /// key = value file with kind, m, alpha, beta, size, reps, seed.
        #[arg(long, conflicts_with_all = ["kind", "size", "reps", "seed"])]
        config: Option<PathBuf>,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long)]
        size: Option<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Compare the summary against a tangible source of this dimension.
        #[arg(long)]
        dimension: Option<f64>,
        #[arg(long, default_value_t = TANGIBILITY_TOLERANCE)]
        tolerance: f64,
    },
    /// Replicate summaries of the ten standard sources.
    Table {
        #[arg(long, default_value_t = 10_000)]
        size: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long)]
        seed: u64,
    },
    /// ρ₁ and ρ₂ of the delay embedding of a return series at each depth.
    ReturnsCurve {
        #[arg(long)]
        prices: PathBuf,
        /// Depths as `a:b`, `a,b,c` or a single value.
        #[arg(long, default_value = "2:30")]
        n: String,
        /// Windows per embedding; all maximal windows by default.
        #[arg(long)]
        windows: Option<usize>,
        #[command(flatten)]
        price: PriceArgs,
    },
    /// (ρ₂, ρ₁) points from price files or from a simulated family.
    Scatter {
        /// One point per file, labelled by file stem.
        #[arg(long, conflicts_with_all = ["family", "count"])]
        prices: Vec<PathBuf>,
        #[command(flatten)]
        price: PriceArgs,
        /// `stable` for α ~ U(1,2), β ~ U(0,1), or any source kind.
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Draws per simulated sample.
        #[arg(long, default_value_t = 500)]
        length: usize,
        /// Embedding depth; `0` uses the raw sample.
        #[arg(long, default_value_t = 3)]
        embed: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo normality test on a sample or on the returns of a price file.
    TestNormal {
        /// One value per row.
        #[arg(long, required_unless_present = "prices", conflicts_with = "prices")]
        input: Option<PathBuf>,
        #[arg(long)]
        prices: Option<PathBuf>,
        #[command(flatten)]
        price: PriceArgs,
        /// Embedding depth; omit to test the raw values.
        #[arg(long)]
        embed: Option<usize>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

#[derive(Serialize)]
struct ComputeOut {
    n: usize,
    rho1: f64,
    rho2: f64,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

fn parse_depths(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidArgument(format!("cannot read depths '{spec}'"));
    if let Some((a, b)) = spec.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a == 0 || a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn returns_of(path: &Path, price: &PriceArgs) -> Result<slide_stats::ReturnSeries, Error> {
    let column = price.price_col.clone().unwrap_or_default();
    let prices = load_prices_file(path, &column, price.skip_header)?;
    log_returns(&prices, label_of(path))
}

fn compute(input: &Path, dim: Option<usize>, mode: ModeArg, engine: EngineArg, dedupe: bool, format: Format) -> Result<String, Error> {
    let mut pc = read_point_cloud_file(input, dim)?;
    if dedupe {
        pc = pc.dedupe()?;
    }
    let profile = match mode {
        ModeArg::Nearest => nn_distances(&pc, engine.into())?,
        ModeArg::Consecutive if pc.dim() == 1 => nn_distances_1d(pc.coords(), Mode::Consecutive)?,
        ModeArg::Consecutive => {
            return Err(Error::InvalidArgument("--mode consecutive needs one-dimensional input".into()))
        }
    };
    let (rho1, rho2) = rho12(&profile);
    let out = ComputeOut {
        n: profile.len(),
        rho1,
        rho2,
    };
    Ok(match format {
        Format::Csv => format!("n,rho1,rho2\n{},{},{}\n", out.n, fmt_num(rho1), fmt_num(rho2)),
        Format::Json => json(&out),
    })
}

fn cloud_output(points: &[CloudPoint], format: Format) -> String {
    match format {
        Format::Csv => scatter_csv(&points.iter().map(ScatterPoint::from).collect::<Vec<_>>()),
        Format::Json => json(&points),
    }
}

fn run(command: Command, format: Format) -> Result<String, Error> {
    match command {
        Command::Compute { .. } => unreachable!("handled separately"),
        Command::Sample { kind, size, seed, output } => {
            let spec = SourceSpec::new(kind.parse()?, size, seed);
            let pc = sample(&spec)?;
            match output {
                Some(path) => {
                    write_point_cloud(std::fs::File::create(&path)?, &pc)?;
                    Ok(String::new())
                }
                None => {
                    let mut buf = Vec::new();
                    write_point_cloud(&mut buf, &pc)?;
                    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
                }
            }
        }
        Command::Simulate {
            config,
            kind,
            size,
            reps,
            seed,
            dimension,
            tolerance,
        } => {
            let (k, size, reps, seed) = match config {
                Some(path) => {
                    let c = parse_config(&std::fs::read_to_string(&path)?)?;
                    (c.kind, c.size, c.reps, c.seed)
                }
                None => (
                    kind.parse()?,
                    size.unwrap_or(slide_stats::harness::DEFAULT_SIZE),
                    reps.unwrap_or(slide_stats::harness::DEFAULT_REPS),
                    seed.ok_or_else(|| Error::BadSpec("--seed is required".into()))?,
                ),
            };
            let summary = replicate(k, size, reps, seed)?;
            match dimension {
                None => Ok(match format {
                    Format::Csv => summaries_csv(std::slice::from_ref(&summary)),
                    Format::Json => json(&summary),
                }),
                Some(d) => {
                    let r = tangibility_check(&summary, d, tolerance)?;
                    Ok(match format {
                        Format::Csv => format!(
                            "d,mu1,target1,mu2,target2,dim_est1,dim_est2,discrepancy1,discrepancy2,consistent\n{},{},{},{},{},{},{},{},{},{}\n",
                            fmt_num(r.d),
                            fmt_num(r.mu1),
                            fmt_num(r.target1),
                            fmt_num(r.mu2),
                            fmt_num(r.target2),
                            fmt_num(r.dim_est1),
                            fmt_num(r.dim_est2),
                            fmt_num(r.discrepancy1),
                            fmt_num(r.discrepancy2),
                            r.consistent
                        ),
                        Format::Json => json(&r),
                    })
                }
            }
        }
        Command::Table { size, reps, seed } => {
            let rows = table_run(&standard_rows(), size, reps, seed)?;
            Ok(match format {
                Format::Csv => summaries_csv(&rows),
                Format::Json => json(&rows),
            })
        }
        Command::ReturnsCurve { prices, n, windows, price } => {
            let rs = returns_of(&prices, &price)?;
            let windows = windows.map_or(Windows::All, Windows::Count);
            let curve = rho_curve(&rs, &parse_depths(&n)?, windows)?;
            Ok(match format {
                Format::Csv => curve.to_csv(),
                Format::Json => json(&curve),
            })
        }
        Command::Scatter {
            prices,
            price,
            family,
            m,
            alpha,
            beta,
            count,
            length,
            embed,
            seed,
        } => {
            if !prices.is_empty() {
                let points = prices
                    .iter()
                    .map(|p| scatter_point(&returns_of(p, &price)?, embed.max(1)))
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok(match format {
                    Format::Csv => scatter_csv(&points),
                    Format::Json => json(&points),
                });
            }
            let family = match family.as_deref() {
                Some("stable") if alpha.is_none() => Family::StableRandom,
                Some(name) => Family::Fixed {
                    kind: SourceKind::parse(name, m, alpha, beta)?,
                },
                None => return Err(Error::InvalidArgument("give --prices or --family".into())),
            };
            let seed = seed.ok_or_else(|| Error::BadSpec("--seed is required".into()))?;
            let embed = (embed > 0).then_some(embed);
            Ok(cloud_output(&cloud(family, count, embed, length, seed)?, format))
        }
        Command::TestNormal {
            input,
            prices,
            price,
            embed,
            reps,
            seed,
            alpha,
        } => {
            let data = match (input, prices) {
                (Some(path), _) => read_point_cloud_file(&path, Some(1))?.coords().to_vec(),
                (None, Some(path)) => returns_of(&path, &price)?.u,
                (None, None) => return Err(Error::InvalidArgument("give --input or --prices".into())),
            };
            let r = normality_test(&data, embed, reps, seed, alpha)?;
            Ok(match format {
                Format::Csv => format!(
                    "rho1,rho2,length,reps,distance2,p_value,alpha,reject\n{},{},{},{},{},{},{},{}\n",
                    fmt_num(r.rho1),
                    fmt_num(r.rho2),
                    r.length,
                    r.reps,
                    fmt_num(r.distance2),
                    fmt_num(r.p_value),
                    fmt_num(r.alpha),
                    r.reject
                ),
                Format::Json => json(&r),
            })
        }
    }
}

/// Exit status of `compute`: 2 for unreadable input, 3 for duplicate points,
/// 4 for numeric failures.
fn compute_exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::TooFewPoints(_)
        | Error::InvalidArgument(_)
        | Error::BadSpec(_) => 2,
        Error::DuplicatePoint { .. } | Error::NonPositiveDistance { .. } => 3,
        _ => 4,
    }
}

fn hint(e: &Error) -> Option<&'static str> {
    match e {
        Error::DuplicatePoint { .. } => Some("hint: remove exact duplicates first (compute --dedupe)"),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let is_compute = matches!(cli.command, Command::Compute { .. });
    let result = match cli.command {
        Command::Compute {
            input,
            dim,
            mode,
            engine,
            dedupe,
        } => compute(&input, dim, mode, engine, dedupe, cli.format),
        other => run(other, cli.format),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = hint(&e) {
                eprintln!("{h}");
            }
            ExitCode::from(if is_compute { compute_exit_code(&e) } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_specs() {
        assert_eq!(parse_depths("2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_depths("1, 3,7").unwrap(), vec![1, 3, 7]);
        assert_eq!(parse_depths("4").unwrap(), vec![4]);
        assert!(parse_depths("5:2").is_err());
        assert!(parse_depths("0:2").is_err());
        assert!(parse_depths("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(compute_exit_code(&Error::Parse { line: 3, message: String::new() }), 2);
        assert_eq!(compute_exit_code(&Error::DuplicatePoint { index: 0 }), 3);
        assert_eq!(compute_exit_code(&Error::Overflow { t: 1.0 }), 4);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
