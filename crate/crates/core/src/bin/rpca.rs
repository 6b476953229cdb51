use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use robust_pca::bounds::{default_sigma, BoundParams};
use robust_pca::gram_estimator::{estimate_gram, NetStrategy, RobustMethod};
use robust_pca::harness::{
    project_onto, run_comparison, run_coverage, ExperimentConfig, ProjectionBasis,
};
use robust_pca::io::{read_sample, read_symmetric, write_scores_csv, write_text, EstimateFile};
use robust_pca::pca::eigenvalue_report;
use robust_pca::projector_geometry::{
    analyze_pair, projector_distance, ranks_equal, restricted_distance, ProjectorPairAnalysis,
    DEFAULT_TOL,
};
use robust_pca::{Error, Result, Sample};

/// Robust dimension-free PCA with certified bounds.
#[derive(Parser)]
#[command(name = "rpca", version)]
struct Cli {
    /// TOML experiment/estimator config; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Robust Gram estimate of a data file (CSV or RSPM) as JSON.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        data: DataFlags,
        #[command(flatten)]
        est: EstimatorFlags,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Table of zeta, B_*, B and interval half-widths over a grid of t.
    Bounds {
        #[command(flatten)]
        est: EstimatorFlags,
        #[arg(long)]
        n: Option<usize>,
        /// Values of t; defaults to a logarithmic grid up to s4_sq.
        #[arg(long, value_delimiter = ',')]
        t: Vec<f64>,
    },
    /// Monte Carlo coverage of the high-probability events.
    Coverage {
        #[command(flatten)]
        exp: ExperimentFlags,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Empirical Gram vs robust estimates on synthetic data.
    Compare {
        #[command(flatten)]
        exp: ExperimentFlags,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Scores of each observation on the top r eigenvectors.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = BasisArg::Robust)]
        basis: BasisArg,
        #[command(flatten)]
        data: DataFlags,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Joint geometry of two orthogonal projectors.
    Geometry {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataFlags {
    /// Skip the first CSV line.
    #[arg(long)]
    skip_header: bool,
    /// Subtract the sample mean before estimating.
    #[arg(long)]
    center: bool,
}

#[derive(Args)]
struct EstimatorFlags {
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    s4_sq: Option<f64>,
    #[arg(long)]
    gram_frobenius: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_enum)]
    net_strategy: Option<StrategyArg>,
    #[arg(long)]
    net_size: Option<usize>,
    #[arg(long)]
    net_seed: Option<u64>,
    #[arg(long)]
    block_seed: Option<u64>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Number of blocks for the median of means.
    #[arg(long)]
    blocks: Option<usize>,
    /// Influence width for the truncated mean.
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Args)]
struct ExperimentFlags {
    #[command(flatten)]
    est: EstimatorFlags,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Randomized,
    EigenAugmented,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    MedianOfMeans,
    TruncatedMean,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Robust,
    Cutoff,
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_path(p),
        None => Ok(ExperimentConfig::default()),
    }
}

impl EstimatorFlags {
    fn apply(&self, config: &mut ExperimentConfig) {
        let est = &mut config.estimator;
        if let Some(v) = self.epsilon {
            est.epsilon = v;
        }
        if let Some(v) = self.a {
            est.a = v;
        }
        est.sigma = self.sigma.or(est.sigma);
        est.kappa = self.kappa.or(est.kappa);
        est.s4_sq = self.s4_sq.or(est.s4_sq);
        est.gram_frobenius = self.gram_frobenius.or(est.gram_frobenius);
        if let Some(v) = self.delta {
            est.net.delta = v;
        }
        if let Some(s) = self.net_strategy {
            est.net.strategy = match s {
                StrategyArg::Exhaustive => NetStrategy::Exhaustive,
                StrategyArg::Randomized => NetStrategy::Randomized,
                StrategyArg::EigenAugmented => NetStrategy::EigenAugmented,
            };
        }
        if let Some(v) = self.net_size {
            est.net.size = v;
        }
        if let Some(v) = self.net_seed {
            est.net.seed = v;
        }
        if let Some(v) = self.block_seed {
            est.block_seed = v;
        }
        if self.method.is_none() && self.blocks.is_none() && self.width.is_none() {
            return;
        }
        let (blocks, width) = match est.method {
            RobustMethod::MedianOfMeans { blocks } => (blocks, None),
            RobustMethod::TruncatedMean { width } => (None, width),
        };
        let kind = self.method.unwrap_or(match est.method {
            RobustMethod::MedianOfMeans { .. } => MethodArg::MedianOfMeans,
            RobustMethod::TruncatedMean { .. } => MethodArg::TruncatedMean,
        });
        est.method = match kind {
            MethodArg::MedianOfMeans => RobustMethod::MedianOfMeans {
                blocks: self.blocks.or(blocks),
            },
            MethodArg::TruncatedMean => RobustMethod::TruncatedMean {
                width: self.width.or(width),
            },
        };
    }
}

impl ExperimentFlags {
    fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        self.est.apply(config);
        if let Some(v) = self.n {
            config.n = v;
        }
        if let Some(v) = self.trials {
            config.trials = v;
        }
        if let Some(v) = self.seed {
            config.root_seed = v;
        }
        if let Some(v) = &self.spectrum {
            config.spectrum = v.clone();
            config.d = None;
        }
        if let Some(v) = self.rank {
            config.projector_rank = v;
        }
        config.validate()
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => write_text(p, text),
        None => {
            let mut out = io::stdout().lock();
            let written = out.write_all(text.as_bytes()).and_then(|()| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    out.write_all(b"\n")
                }
            });
            match written {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn load_data(path: &Path, flags: &DataFlags) -> Result<Sample> {
    let sample = read_sample(path, flags.skip_header)?;
    Ok(if flags.center {
        sample.centered()
    } else {
        sample
    })
}

#[derive(Serialize)]
struct BoundRow {
    t: f64,
    zeta: f64,
    b_star: f64,
    bound: f64,
    eigenvalue_halfwidth: f64,
}

fn bounds_table(config: &ExperimentConfig, n: Option<usize>, ts: &[f64]) -> Result<String> {
    let est = &config.estimator;
    let missing = |name: &'static str| Error::InvalidParameter {
        name,
        reason: "required (flag or [estimator] key)".into(),
    };
    let n = n.unwrap_or(config.n);
    let kappa = est.kappa.ok_or_else(|| missing("kappa"))?;
    let s4_sq = est.s4_sq.ok_or_else(|| missing("s4_sq"))?;
    let params = BoundParams {
        n,
        kappa,
        s4_sq,
        sigma: est
            .sigma
            .unwrap_or_else(|| default_sigma(n, kappa, s4_sq, est.epsilon, est.a)),
        delta: est.net.delta,
        epsilon: est.epsilon,
        a: est.a,
        gram_frobenius: est.gram_frobenius.unwrap_or(0.0),
    };
    params.validate()?;
    let grid: Vec<f64> = if ts.is_empty() {
        (0..=20)
            .map(|j| s4_sq * 10f64.powf(-(20 - j) as f64 / 5.0))
            .collect()
    } else {
        ts.to_vec()
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for &t in &grid {
        w.serialize(BoundRow {
            t,
            zeta: params.zeta(t)?,
            b_star: params.b_star(t),
            bound: params.bound(t),
            eigenvalue_halfwidth: params.eigenvalue_halfwidth(t),
        })
        .map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    let mut text = format!(
        "# n={} kappa={} s4_sq={} sigma={} delta={} epsilon={} a={} |G|_F={} K={} standing_assumption={}\n",
        params.n,
        params.kappa,
        params.s4_sq,
        params.sigma,
        params.delta,
        params.epsilon,
        params.a,
        params.gram_frobenius,
        params.grid_size(),
        params.standing_assumption_holds()
    );
    text.push_str(&String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?);
    Ok(text)
}

#[derive(Serialize)]
struct GeometryOutput {
    analysis: ProjectorPairAnalysis,
    ranks_equal: bool,
    projector_distance: f64,
    restricted_distance: Option<f64>,
}

fn run(cli: Cli) -> Result<()> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Estimate {
            input,
            data,
            est,
            output,
        } => {
            est.apply(&mut config);
            let sample = load_data(&input, &data)?;
            let estimate = estimate_gram(&sample, &config.estimator)?;
            let report = eigenvalue_report(&estimate)?;
            eprintln!(
                "eigenvalues {:?} +/- {}",
                report.lambda_hat, report.interval_halfwidth
            );
            emit(output.as_deref(), &EstimateFile::from(&estimate).to_json()?)
        }
        Command::Bounds { est, n, t } => {
            est.apply(&mut config);
            emit(None, &bounds_table(&config, n, &t)?)
        }
        Command::Coverage {
            exp,
            report,
            summary,
        } => {
            exp.apply(&mut config)?;
            let result = run_coverage(&config)?;
            let report_path = report.or(config.output.report.clone());
            let summary_path = summary.or(config.output.summary.clone());
            let mut csv_bytes = Vec::new();
            result.write_summary_csv(&mut csv_bytes)?;
            let csv_text =
                String::from_utf8(csv_bytes).map_err(|e| Error::Format(e.to_string()))?;
            match summary_path {
                Some(p) => write_text(&p, &csv_text)?,
                None => eprint!("{csv_text}"),
            }
            emit(report_path.as_deref(), &result.to_json()?)
        }
        Command::Compare { exp, output } => {
            exp.apply(&mut config)?;
            let result = run_comparison(&config)?;
            let path = output.or(config.output.report.clone());
            emit(path.as_deref(), &result.to_json()?)
        }
        Command::Project {
            input,
            estimate,
            rank,
            basis,
            data,
            output,
        } => {
            let sample = load_data(&input, &data)?;
            let est = EstimateFile::read(&estimate)?;
            let basis = match basis {
                BasisArg::Robust => ProjectionBasis::Robust,
                BasisArg::Cutoff => ProjectionBasis::Cutoff,
            };
            let scores = project_onto(&sample, &est.g_hat, &est.params, rank, basis)?;
            let mut bytes = Vec::new();
            write_scores_csv(&mut bytes, &scores)?;
            emit(
                output.as_deref(),
                &String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?,
            )
        }
        Command::Geometry { p, q, tol, output } => {
            let p = read_symmetric(&p)?;
            let q = read_symmetric(&q)?;
            let analysis = analyze_pair(&p, &q, tol)?;
            let restricted = match restricted_distance(&p, &q) {
                Ok(v) => Some(v),
                Err(Error::RankMismatch { .. }) => None,
                Err(e) => return Err(e),
            };
            let out = GeometryOutput {
                ranks_equal: ranks_equal(&analysis),
                projector_distance: projector_distance(&p, &q)?,
                restricted_distance: restricted,
                analysis,
            };
            emit(output.as_deref(), &serde_json::to_string_pretty(&out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
