use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use errtrade::geometry::LemmaId;
use errtrade::{Branch, RelationId};
use errtrade_cli::config::{parse_dims, parse_relations, ConfigFile};
use errtrade_cli::output::{emit, render_json};
use errtrade_cli::{
    cmd_curve, cmd_experiments, cmd_lemmas, cmd_verify, CliError, CliResult, Experiment, Format, LemmaConfig,
    RunRecord, StrategyKind, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "errtrade",
    version,
    about = "Error trade-off relations: sweeps, curves and fuzzing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized check of the relations on random strategies.
    Verify(VerifyArgs),
    /// Export a boundary curve in the normalized error plane.
    Curve(CurveArgs),
    /// Export the predicted points of the neutron and photon experiments.
    Experiments(ExperimentArgs),
    /// Fuzz the geometric inequalities behind the bounds.
    Lemmas(LemmaArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self, default: Format) -> CliResult<Format> {
        self.format.as_deref().map_or(Ok(default), str::parse)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Dimensions, e.g. `2,3` or `2-6`.
    #[arg(long)]
    dims: Option<String>,
    /// Number of instances.
    #[arg(long)]
    n: Option<usize>,
    /// Relations to check (repeatable or comma separated); `all` for every one.
    #[arg(long = "relation", value_delimiter = ',')]
    relations: Vec<String>,
    /// random_basis, optimal_outputs or saturating.
    #[arg(long)]
    strategy: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long)]
    relation: String,
    #[arg(long = "c-tilde", allow_hyphen_values = true)]
    c_tilde: f64,
    #[arg(long = "n-points", default_value_t = 101)]
    n_points: usize,
    /// lower, upper or contour.
    #[arg(long)]
    branch: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExperimentArgs {
    /// erhart or rozema.
    which: String,
    #[arg(long = "n-points", default_value_t = 101)]
    n_points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "3-8")]
    dims: String,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// distances, perpendicular or mixed (repeatable); all by default.
    #[arg(long = "lemma", value_delimiter = ',')]
    lemmas: Vec<String>,
    /// Plant a saturating instance every this many instances (0 disables).
    #[arg(long = "planted-every", default_value_t = 16)]
    planted_every: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn write_record(record: &RunRecord, output: &OutputArgs) -> CliResult<i32> {
    let text = match output.format(Format::Json)? {
        Format::Json => render_json(record),
        Format::Csv => record.to_csv(),
    };
    emit(output.out.as_deref(), &text)?;
    eprintln!(
        "{}: {} after {:.3} s",
        record.command,
        if record.passed { "pass" } else { "FAIL" },
        record.wall_time.as_secs_f64()
    );
    Ok(record.exit_code())
}

fn verify(args: VerifyArgs) -> CliResult<i32> {
    let mut config = SweepConfig::default();
    if let Some(path) = &args.config {
        config = ConfigFile::load(path)?.apply(config)?;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(d) = &args.dims {
        config.dims = parse_dims(d)?;
    }
    if let Some(n) = args.n {
        config.n_instances = n;
    }
    if !args.relations.is_empty() {
        config.relations = parse_relations(&args.relations)?;
    }
    if let Some(s) = &args.strategy {
        config.strategy = s.parse::<StrategyKind>()?;
    }
    let record = cmd_verify(&config)?;
    write_record(&record, &args.output)
}

fn curve(args: CurveArgs) -> CliResult<i32> {
    let relation: RelationId = args
        .relation
        .parse()
        .map_err(|e: errtrade::Error| CliError::config(e.to_string()))?;
    let branch = args
        .branch
        .as_deref()
        .map(str::parse::<Branch>)
        .transpose()
        .map_err(|e| CliError::config(e.to_string()))?;
    let format = args.output.format(Format::Csv)?;
    cmd_curve(
        relation,
        args.c_tilde,
        args.n_points,
        branch,
        format,
        args.output.out.as_deref(),
    )?;
    Ok(0)
}

fn experiments(args: ExperimentArgs) -> CliResult<i32> {
    let which: Experiment = args.which.parse()?;
    let format = args.output.format(Format::Csv)?;
    cmd_experiments(which, args.n_points, format, args.output.out.as_deref())?;
    Ok(0)
}

fn lemmas(args: LemmaArgs) -> CliResult<i32> {
    let lemmas = if args.lemmas.is_empty() {
        LemmaId::ALL.to_vec()
    } else {
        args.lemmas
            .iter()
            .map(|s| s.parse::<LemmaId>().map_err(|e| CliError::config(e.to_string())))
            .collect::<CliResult<_>>()?
    };
    let config = LemmaConfig {
        seed: args.seed,
        n_instances: args.n,
        dims: parse_dims(&args.dims)?,
        lemmas,
        planted_every: args.planted_every,
    };
    let record = cmd_lemmas(&config)?;
    write_record(&record, &args.output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Curve(a) => curve(a),
        Command::Experiments(a) => experiments(a),
        Command::Lemmas(a) => lemmas(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
