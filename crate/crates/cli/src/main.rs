mod commands;
mod manifest;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use commands::{Body, Emit};
use manifest::RunManifest;

#[derive(Parser, Serialize, Debug)]
#[command(name = "detsum", version, about = "Inverse determinant sums and unit growth of space-time lattice codes")]
pub struct Cli {
    /// Output format; defaults to the command's natural one.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for enumeration and simulation.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A built-in code name or a JSON lattice descriptor.
#[derive(Args, Serialize, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct LatticeArg {
    /// gaussian, nf-sqrt5, nf-sqrt2, alamouti, l1, l2, golden-order
    #[arg(long)]
    code: Option<String>,
    /// Path to a lattice descriptor (JSON).
    #[arg(long)]
    lattice: Option<PathBuf>,
}

#[derive(Subcommand, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a lattice and print its descriptor, Gram matrix and covolume.
    Construct {
        #[command(flatten)]
        src: LatticeArg,
    },
    /// Count lattice points in Frobenius balls.
    Enumerate {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(long, default_value = "1:16:g8")]
        radii: String,
        /// List the coefficient vectors in the largest ball instead.
        #[arg(long)]
        points: bool,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Inverse determinant sums `S^m(M)` with unit counts.
    Sum {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(short = 'm', default_value_t = 2)]
        m: u32,
        #[arg(long, default_value = "8:96:g12")]
        radii: String,
        /// Skip points with zero determinant instead of failing.
        #[arg(long)]
        skip_zero: bool,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Log-log slope of a column of a CSV table against `M`.
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "sum")]
        col: String,
        #[arg(long, requires = "hi")]
        lo: Option<f64>,
        #[arg(long, requires = "lo")]
        hi: Option<f64>,
        /// Fit the raw value against log M (for log-type growth).
        #[arg(long)]
        log: bool,
        /// Minimum ratio between the largest and smallest fitted radius.
        #[arg(long)]
        min_span: Option<f64>,
    },
    /// Predicted growth exponent of `S^{2 n_r}` for a code.
    Predict {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(long)]
        nr: usize,
    },
    /// Optimal DMT curve, sum lower exponent and (optionally) a code segment.
    Dmt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        nr: usize,
        #[arg(long)]
        code: Option<String>,
    },
    /// Ball-volume exponent `T` from restricted root data.
    Lie {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
    },
    /// Monte Carlo block error rate of a 16-QAM lattice code.
    Simulate {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        #[arg(long, default_value = "10:24:2")]
        snr: String,
        #[arg(long, default_value_t = 100_000)]
        blocks: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        noiseless: bool,
    },
    /// Sum table, fits, predictions and a verdict in one bundle.
    Report {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(short = 'm', default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        nr: usize,
        #[arg(long, default_value = "8:96:g12")]
        radii: String,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Truncated Dedekind zeta of ℚ(i).
    Zeta {
        #[arg(long, default_value_t = 2.0)]
        s: f64,
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
    /// Exact non-vanishing determinant scan.
    Nvd {
        #[command(flatten)]
        src: LatticeArg,
        #[arg(long, default_value_t = 8.0)]
        radius: f64,
    },
}

impl Command {
    fn seed(&self) -> Option<u64> {
        match self {
            Command::Simulate { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<commands::UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<detsum_core::Error>() {
        Some(detsum_core::Error::RadiusTooLarge { .. }) => 4,
        Some(detsum_core::Error::UnknownCode(_)) | Some(detsum_core::Error::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

fn write_all(cli: &Cli, emit: Emit, mut manifest: RunManifest, start: Instant) -> Result<()> {
    let primary = commands::select_body(&emit, cli.format)?;
    let mut outputs: Vec<String> = emit.files.iter().map(|(p, _)| p.display().to_string()).collect();
    outputs.insert(0, cli.out.as_ref().map_or("stdout".into(), |p| p.display().to_string()));
    manifest.outputs = outputs;
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    for (path, body) in &emit.files {
        std::fs::write(path, body.render(&manifest))?;
    }
    let text = primary.render(&manifest);
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            // a closed downstream pipe (`| head`) is not an error
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn run(cli: &Cli, argv: &[String]) -> Result<u8> {
    let start = Instant::now();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    let manifest = RunManifest::new(argv, cli, cli.command.seed());
    let emit = commands::dispatch(&cli.command)?;
    let status = emit.status;
    write_all(cli, emit, manifest, start)?;
    Ok(status)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

impl Body {
    fn render(&self, m: &RunManifest) -> String {
        match self {
            Body::Csv(s) | Body::Text(s) => format!("{}{s}", m.header()),
            Body::Json(v) => {
                let mut v = v.clone();
                if let Some(obj) = v.as_object_mut() {
                    obj.insert("manifest".into(), serde_json::to_value(m).expect("manifest serializes"));
                }
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json serializes"))
            }
        }
    }
}
