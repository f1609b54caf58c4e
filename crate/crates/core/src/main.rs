use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use loopsoup::exact::MomentTable;
use loopsoup::graph::GraphSpec;
use loopsoup::harness::report::{ReportMetadata, ReportRow};
use loopsoup::harness::{self, ExperimentConfig, ExperimentKind, ExperimentReport, OutputFormat};
use loopsoup::partition::Partition;
use loopsoup::rng::seeded;
use loopsoup::sampler::{CompleteSampler, GeneralSampler};

#[derive(Parser)]
#[command(name = "loopsoup", version, about = "Loop soups on complete graphs: exact values and Monte Carlo checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact-engine values for the model.
    Exact {
        #[command(flatten)]
        common: Common,
        /// Emit the moment/cumulant table up to this index as JSON instead.
        #[arg(long)]
        moments: Option<usize>,
    },
    /// Emit sampled loop configurations as JSON lines.
    Sample {
        #[command(flatten)]
        common: Common,
        /// GraphSpec JSON file; the complete graph from --n/--kappa otherwise.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run one verification experiment.
    Verify {
        kind: ExperimentKind,
        #[command(flatten)]
        common: Common,
    },
    /// Erdős–Rényi isolated-tree baseline.
    Er {
        #[command(flatten)]
        common: Common,
    },
    /// Cumulant-ratio and loop-mass tables.
    Asymptotics {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        ns: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        ds: Vec<usize>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    batches: Option<u64>,
    #[arg(long)]
    precision_bits: Option<usize>,
    /// Large-cluster exponent: threshold n^(1 - epsilon).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Relative truncation of the loop-length distribution.
    #[arg(long)]
    tail_epsilon: Option<f64>,
    /// ER edge-rate constant, p = c/n.
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<f64>>,
    /// A partition as JSON, e.g. '[[0],[1,2]]'; repeatable.
    #[arg(long = "partition")]
    partitions: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

impl Common {
    fn resolve(&self, kind: Option<ExperimentKind>) -> loopsoup::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(kind) = kind {
            c.kind = kind;
        }
        macro_rules! set {
            ($($field:ident => $target:expr),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { $target = v; })*
            };
        }
        set!(n => c.model.n, kappa => c.model.kappa, alpha => c.model.alpha, d => c.d, k => c.k,
             samples => c.samples, seed => c.seed, batches => c.batches, epsilon => c.epsilon,
             tail_epsilon => c.tail_epsilon, c => c.c, theta => c.theta, format => c.format);
        if self.precision_bits.is_some() {
            c.precision_bits = self.precision_bits;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        if !self.partitions.is_empty() {
            c.partitions = self
                .partitions
                .iter()
                .map(|s| serde_json::from_str::<Partition>(s))
                .collect::<Result<_, _>>()?;
        }
        if c.batches > c.samples {
            c.batches = c.samples.max(1);
        }
        Ok(c)
    }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(config: &ExperimentConfig, report: &ExperimentReport) -> loopsoup::Result<bool> {
    let mut out = output(&config.out)?;
    report.write(&mut out, config.format)?;
    out.flush()?;
    for row in report.failures() {
        eprintln!("FAIL {}: estimate {} vs {:?} ({:?})", row.name, row.estimate, row.exact, row.check);
    }
    Ok(report.all_pass())
}

fn info_report(config: &ExperimentConfig, kind: &str, rows: Vec<ReportRow>) -> ExperimentReport {
    ExperimentReport {
        metadata: ReportMetadata {
            kind: kind.into(),
            seed: config.seed,
            samples: 0,
            batches: 0,
            precision_bits: config.precision_bits.unwrap_or(0),
            threads: harness::runner::thread_count(),
            wall_time_seconds: 0.0,
        },
        rows,
    }
}

fn run(cli: Cli) -> loopsoup::Result<bool> {
    match cli.command {
        Command::Exact { common, moments } => {
            let config = common.resolve(None)?;
            if let Some(upto) = moments {
                let table = MomentTable::new(
                    upto,
                    &config.model,
                    config
                        .precision_bits
                        .unwrap_or_else(|| loopsoup::exact::required_precision_bits(upto, &config.model) + 64),
                )?;
                let mut out = output(&config.out)?;
                serde_json::to_writer_pretty(&mut out, &table)?;
                writeln!(out)?;
                out.flush()?;
                return Ok(true);
            }
            let rows = harness::exact_rows(&config)?;
            emit(&config, &info_report(&config, "exact", rows))
        }
        Command::Sample { common, graph } => {
            let config = common.resolve(None)?;
            let mut rng = seeded(config.seed);
            let mut out = output(&config.out)?;
            let spec = match graph {
                Some(p) => serde_json::from_str::<GraphSpec>(&std::fs::read_to_string(p)?)?,
                None => config.model.graph_spec(),
            };
            if spec.as_complete().is_some() {
                let params = loopsoup::exact::ModelParams {
                    n: spec.n(),
                    kappa: spec.killing(0),
                    alpha: config.model.alpha,
                };
                let s = CompleteSampler::new(params, config.tail_epsilon)?;
                for _ in 0..config.samples {
                    serde_json::to_writer(&mut out, &s.sample_soup(&mut rng))?;
                    writeln!(out)?;
                }
            } else {
                let s = GeneralSampler::new(&spec, config.model.alpha, config.tail_epsilon)?;
                for _ in 0..config.samples {
                    serde_json::to_writer(&mut out, &s.sample_soup(&mut rng))?;
                    writeln!(out)?;
                }
            }
            out.flush()?;
            Ok(true)
        }
        Command::Verify { kind, common } => {
            let config = common.resolve(Some(kind))?;
            let report = harness::run(&config)?;
            emit(&config, &report)
        }
        Command::Er { common } => {
            let mut config = common.resolve(Some(ExperimentKind::ErBaseline))?;
            if common.n.is_none() && common.config.is_none() {
                config.model.n = 500;
            }
            if common.d.is_none() && common.config.is_none() {
                config.d = 3;
            }
            config.validate()?;
            let rows = harness::er_rows(&config)?;
            let mut out = output(&config.out)?;
            match config.format {
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut out, &rows)?;
                    writeln!(out)?;
                }
                OutputFormat::Csv => {
                    let mut w = csv::Writer::from_writer(&mut out);
                    for r in &rows {
                        w.serialize(r).map_err(io::Error::from)?;
                    }
                    w.flush()?;
                }
            }
            out.flush()?;
            Ok(rows.iter().all(|r| r.passes()))
        }
        Command::Asymptotics { common, ns, alphas, ds } => {
            let config = common.resolve(None)?;
            let rows = harness::asymptotic_rows(&ns, config.model.kappa, &alphas, &ds)?;
            emit(&config, &info_report(&config, "asymptotics", rows))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
