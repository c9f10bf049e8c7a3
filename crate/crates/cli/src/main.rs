//! Monte-Carlo simulation CLI for tensor product codes.

use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tensorcode::component_code::CodeSpec;
use tensorcode::sim::{self, PointResult, SimConfig, CSV_HEADER};
use tensorcode::tensor::{self, TensorCode};
use tensorcode::turbo::{default_max_queries, DecoderConfig};
use tensorcode::PointKind;

/// Exit status for configuration problems (missing/invalid flags).
const USAGE_ERROR: u8 = 2;
/// Exit status for runtime failures (I/O, simulation errors).
const RUNTIME_ERROR: u8 = 1;

#[derive(Parser)]
#[command(
    name = "tensorcode",
    version,
    about = "Simulate square and cubic tensor product codes over a BPSK/AWGN channel",
    after_help = "EXAMPLES:\n  tensorcode --code crc:0x15:15 --dims 3 --points 6,7,8 --point-kind snr\n  tensorcode --code ebch:16:11 --dims 3 --alpha 0.7 --points 1.5 --point-kind ebn0 --out run.csv\n  tensorcode design-space --max-redundancy 25 --max-n 464 --out designspace.csv"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the component/square/cubic design-space table as CSV.
    DesignSpace(DesignSpaceArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Component code, e.g. crc:0x15:15 or ebch:16:11.
    #[arg(long)]
    code: Option<String>,

    /// Tensor dimension count: 1, 2 or 3.
    #[arg(long, default_value_t = 3)]
    dims: usize,

    /// Extrinsic weighting factor; defaults to 0.5 for dims <= 2, 0.7 for 3.
    #[arg(long)]
    alpha: Option<f64>,

    /// Iteration threshold before abandonment (half-iteration granularity).
    #[arg(long)]
    max_iters: Option<f64>,

    /// Component decoder list size L.
    #[arg(long, default_value_t = 4)]
    list_size: usize,

    /// Query budget per component decode; defaults to 2^min(n-k+4, 16).
    #[arg(long)]
    max_queries: Option<u64>,

    /// Not-in-list early-stop threshold for component decoding.
    #[arg(long, default_value_t = 1e-5)]
    early_stop: f64,

    /// Operating points in dB, comma separated, e.g. 1.5,2.0,2.5.
    #[arg(long, value_delimiter = ',')]
    points: Vec<f64>,

    /// Interpretation of the points: snr (Es/N0) or ebn0.
    #[arg(long, default_value = "ebn0")]
    point_kind: String,

    /// Stop a point once this many block errors have been observed.
    #[arg(long, default_value_t = 100)]
    min_block_errors: u64,

    /// Hard cap on blocks per point.
    #[arg(long, default_value_t = 1_000_000)]
    max_blocks: u64,

    /// Master RNG seed; results are reproducible given the full config.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,

    /// Write per-point results as CSV.
    #[arg(long, value_name = "PATH.CSV")]
    out: Option<PathBuf>,

    /// Write results plus the resolved config as JSON.
    #[arg(long, value_name = "PATH.JSON")]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct DesignSpaceArgs {
    /// Largest allowed component redundancy n - k.
    #[arg(long, default_value_t = 25)]
    max_redundancy: usize,

    /// Largest component length n.
    #[arg(long, default_value_t = 464)]
    max_n: usize,

    /// Output CSV path; stdout when omitted.
    #[arg(long, value_name = "PATH.CSV")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::DesignSpace(args)) => run_design_space(&args),
        None => run_simulation(&cli.sim),
    }
}

fn run_design_space(args: &DesignSpaceArgs) -> ExitCode {
    let table = tensor::design_space(args.max_redundancy, args.max_n);
    let result = match &args.out {
        Some(path) => File::create(path)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))
            .and_then(|f| {
                tensor::write_design_space_csv(&table, f).map_err(|e| e.to_string())
            }),
        None => tensor::write_design_space_csv(&table, std::io::stdout().lock())
            .map_err(|e| e.to_string()),
    };
    if let Err(msg) = result {
        eprintln!("error: {msg}");
        return ExitCode::from(RUNTIME_ERROR);
    }
    if let Some(path) = &args.out {
        eprintln!("wrote {} design points to {}", table.len(), path.display());
    }
    ExitCode::SUCCESS
}

fn run_simulation(args: &SimArgs) -> ExitCode {
    let config = match resolve_config(args) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(USAGE_ERROR);
        }
    };

    let component = match config.code.build() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };
    let code = match TensorCode::new(component, config.dims) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_ERROR);
        }
    };

    eprintln!(
        "code {} | rate {:.5} | alpha {} | max iters {} | L {} | max queries {} | seed {}",
        code.label(),
        code.rate(),
        config.alpha,
        config.max_iters,
        config.list_size,
        config.max_queries,
        config.seed,
    );
    println!("{CSV_HEADER}");
    let result = sim::sweep_with(&config, |point: &PointResult| {
        println!("{}", point.csv_row());
    });
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: simulation failed: {e}");
            return ExitCode::from(RUNTIME_ERROR);
        }
    };

    if let Some(path) = &args.out {
        let mut file = match File::create(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(RUNTIME_ERROR);
            }
        };
        if let Err(e) = result.write_csv(&mut file) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(RUNTIME_ERROR);
        }
        eprintln!("wrote CSV to {}", path.display());
    }
    if let Some(path) = &args.json {
        let payload = result.to_json();
        if let Err(e) = File::create(path).and_then(|mut f| f.write_all(payload.as_bytes())) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(RUNTIME_ERROR);
        }
        eprintln!("wrote JSON to {}", path.display());
    }
    ExitCode::SUCCESS
}

fn resolve_config(args: &SimArgs) -> Result<SimConfig, String> {
    let spec_text = args
        .code
        .as_deref()
        .ok_or("missing required flag --code (e.g. --code crc:0x15:15)")?;
    let code: CodeSpec = spec_text.parse().map_err(|e| format!("{e}"))?;
    if !(1..=3).contains(&args.dims) {
        return Err(format!("--dims must be 1, 2 or 3, got {}", args.dims));
    }
    if args.points.is_empty() {
        return Err("missing required flag --points (e.g. --points 1.5,2.0)".into());
    }
    let point_kind: PointKind = args.point_kind.parse()?;
    let component = code.build().map_err(|e| format!("{e}"))?;
    let defaults: DecoderConfig<f64> = DecoderConfig::recommended(args.dims, &component);
    let workers = match args.workers {
        Some(0) => return Err("--workers must be at least 1".into()),
        Some(w) => w,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(SimConfig {
        code,
        dims: args.dims,
        points: args.points.clone(),
        point_kind,
        alpha: args.alpha.unwrap_or(defaults.alpha),
        max_iters: args.max_iters.unwrap_or(defaults.thres),
        list_size: args.list_size,
        max_queries: args.max_queries.unwrap_or_else(|| default_max_queries(&component)),
        early_stop: args.early_stop,
        min_block_errors: args.min_block_errors,
        max_blocks: args.max_blocks,
        seed: args.seed,
        workers,
    })
}
