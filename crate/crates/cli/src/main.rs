use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kahlerkit::scalar::CoeffMode;
use kahlerkit_cli::{
    describe_error, execute, now_secs, op_uses_seed, render_report, CliError, EmbeddingSpec, Job,
    Report, ScenarioFile, CONVENTIONS,
};

#[derive(Parser)]
#[command(
    name = "kahlerkit",
    version,
    about = "Diastasis, Bochner coordinates, Einstein checks, Bergman metrics, and volume probes as reproducible JSON reports"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Truncation order for series built by the command
    #[arg(long, global = true, default_value_t = 8)]
    order: u32,
    /// Coefficient arithmetic: exact (rationals) or float (extended doubles)
    #[arg(long, global = true, default_value = "exact")]
    mode: String,
    /// Zero tolerance for float-mode comparisons
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RNG seed for Monte Carlo operations
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Exit 3 unless the computed metric is Einstein to the checked order
    #[arg(long, global = true)]
    expect_einstein: bool,
    /// Omit the timestamp so reports are byte-identical across runs
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Args, Clone)]
struct SeriesInput {
    /// JSON file with a BiSeries document
    #[arg(long)]
    series: Option<PathBuf>,
    /// Catalog model name (fubini-study, product-fs, flat, hyperbolic)
    #[arg(long)]
    model: Option<String>,
    /// Complex dimension for catalog models
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args, Clone)]
struct EmbeddingInput {
    /// JSON file with a HoloMap document
    #[arg(long = "embedding-file")]
    embedding_file: Option<PathBuf>,
    /// Built-in embedding: identity, slice, conic, cubic, diagonal
    #[arg(long = "embedding-name")]
    embedding_name: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Normalize and re-truncate a series document
    Expand {
        #[command(flatten)]
        input: SeriesInput,
    },
    /// Strip pure terms from a real potential (Calabi's diastasis)
    Diastasis {
        #[command(flatten)]
        input: SeriesInput,
    },
    /// Bochner normal coordinates of a diastasis
    Bochner {
        #[command(flatten)]
        input: SeriesInput,
    },
    /// Kahler-Einstein check with the lambda convention rho = lambda omega
    Einstein {
        #[command(flatten)]
        input: SeriesInput,
    },
    /// Residual of log det g + (lambda/2) Phi (zero iff Einstein in Bochner form)
    FactorCheck {
        #[command(flatten)]
        input: SeriesInput,
    },
    /// Pull a potential back along a holomorphic embedding
    Pullback {
        #[command(flatten)]
        input: SeriesInput,
        #[command(flatten)]
        embedding: EmbeddingInput,
    },
    /// Catalog model report (diastasis, lambda, conditions (A)/(B))
    Model {
        /// Model name
        #[arg(long)]
        name: String,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Bergman diastasis D^k of the degree-k monomial basis on CP^n
    Bergman {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Conditions (C)/(D) and the quadrature Gram matrix for O(k) on CP^n
    Conditions {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 32)]
        radial_nodes: usize,
    },
    /// Monte Carlo volume comparison for an embedded submanifold
    Probe {
        /// Ambient catalog model
        #[arg(long)]
        model: String,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        embedding: EmbeddingInput,
        /// Increasing radius ladder, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16")]
        radii: Vec<f64>,
        /// Monte Carlo samples per radius
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Ambient coordinates to project onto (default: first m)
        #[arg(long, value_delimiter = ',')]
        projection: Option<Vec<usize>>,
    },
    /// Execute a scenario file (schema "1")
    Run { scenario: PathBuf },
}

fn read_to_string(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Precondition(format!("cannot read {}: {e}", path.display())))
}

fn series_doc(path: &PathBuf) -> Result<kahlerkit::jsonio::BiSeriesDoc, CliError> {
    serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn map_doc(path: &PathBuf) -> Result<kahlerkit::jsonio::HoloMapDoc, CliError> {
    serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn apply_series_input(job: &mut Job, input: &SeriesInput) -> Result<(), CliError> {
    if let Some(p) = &input.series {
        job.series = Some(series_doc(p)?);
    }
    job.model = input.model.clone();
    job.dim = input.dim;
    Ok(())
}

fn apply_embedding_input(job: &mut Job, input: &EmbeddingInput) -> Result<(), CliError> {
    match (&input.embedding_file, &input.embedding_name) {
        (Some(p), None) => job.embedding = Some(EmbeddingSpec::Doc(map_doc(p)?)),
        (None, Some(n)) => job.embedding = Some(EmbeddingSpec::Name(n.clone())),
        (None, None) => {}
        (Some(_), Some(_)) => {
            return Err(CliError::Precondition(
                "give either --embedding-file or --embedding-name, not both".to_string(),
            ))
        }
    }
    Ok(())
}

fn build_job(cli: &Cli) -> Result<Job, CliError> {
    let mut job = Job {
        order: cli.common.order,
        mode: CoeffMode::parse(&cli.common.mode)?,
        seed: cli.common.seed,
        expect_einstein: cli.common.expect_einstein,
        ..Job::default()
    };
    if let Some(t) = cli.common.tol {
        job.tol = t;
    }
    match &cli.cmd {
        Cmd::Expand { input } => {
            job.op = "expand".into();
            apply_series_input(&mut job, input)?;
        }
        Cmd::Diastasis { input } => {
            job.op = "diastasis".into();
            apply_series_input(&mut job, input)?;
        }
        Cmd::Bochner { input } => {
            job.op = "bochner".into();
            apply_series_input(&mut job, input)?;
        }
        Cmd::Einstein { input } => {
            job.op = "einstein".into();
            apply_series_input(&mut job, input)?;
        }
        Cmd::FactorCheck { input } => {
            job.op = "factor-check".into();
            apply_series_input(&mut job, input)?;
        }
        Cmd::Pullback { input, embedding } => {
            job.op = "pullback".into();
            apply_series_input(&mut job, input)?;
            apply_embedding_input(&mut job, embedding)?;
        }
        Cmd::Model { name, dim } => {
            job.op = "model".into();
            job.model = Some(name.clone());
            job.dim = *dim;
        }
        Cmd::Bergman { dim, k } => {
            job.op = "bergman".into();
            job.dim = Some(*dim);
            job.k = *k;
        }
        Cmd::Conditions {
            dim,
            k,
            kmax,
            radial_nodes,
        } => {
            job.op = "conditions".into();
            job.dim = Some(*dim);
            job.k = *k;
            job.kmax = *kmax;
            job.radial_nodes = *radial_nodes;
        }
        Cmd::Probe {
            model,
            dim,
            embedding,
            radii,
            samples,
            projection,
        } => {
            job.op = "probe".into();
            job.model = Some(model.clone());
            job.dim = *dim;
            apply_embedding_input(&mut job, embedding)?;
            job.radii = radii.clone();
            job.samples = *samples;
            job.projection = projection.clone();
        }
        Cmd::Run { scenario } => {
            let text = read_to_string(scenario)?;
            let file: ScenarioFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Schema(format!("{}: {e}", scenario.display())))?;
            let mut sjob = Job::from_scenario(&file)?;
            // envelope flags still apply to scenario runs
            sjob.expect_einstein = sjob.expect_einstein || cli.common.expect_einstein;
            if file.tol.is_none() {
                if let Some(t) = cli.common.tol {
                    sjob.tol = t;
                }
            }
            job = sjob;
        }
    }
    Ok(job)
}

fn run(cli: &Cli) -> Result<(String, bool, Option<String>), CliError> {
    let job = build_job(cli)?;
    let outcome = execute(&job)?;
    let report = Report {
        schema: "1",
        op: job.op.clone(),
        mode: job.mode.as_str().to_string(),
        tol: job.tol,
        order: job.order,
        seed: op_uses_seed(&job.op).then_some(job.seed),
        timestamp: (!cli.common.no_timestamp).then(now_secs),
        conventions: CONVENTIONS,
        payload: outcome.payload,
    };
    Ok((render_report(&report), outcome.verdict_ok, outcome.verdict_note))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, verdict_ok, note)) => {
            let write_res = match &cli.common.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(msg) = write_res {
                eprintln!("error (precondition violation): {msg}");
                return ExitCode::from(2);
            }
            if !verdict_ok {
                if let Some(n) = note {
                    eprintln!("error (verdict failure): {n}");
                }
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", describe_error(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
