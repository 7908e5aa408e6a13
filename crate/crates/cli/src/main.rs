mod chart;
mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use edutree::{Algorithm, LearnerParams};

/// Decision-tree toolkit: train, predict, extract rules and compare ID3,
/// C4.5 and CART by stratified cross-validation.
#[derive(Debug, Parser)]
#[command(name = "edutree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one learner on the full data and save the model.
    Train(TrainArgs),
    /// Apply a saved model to every row of a data file.
    Predict(PredictArgs),
    /// Train one learner and print its tree as IF-THEN rules.
    Rules(RulesArgs),
    /// Cross-validate several learners and report accuracy.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    JsonDocument,
    Svg,
}

#[derive(Debug, Args)]
struct DataArgs {
    /// ARFF or CSV file, or `@embedded` for the bundled student dataset.
    data: String,
    /// ARFF file whose header gives the schema of a CSV input.
    #[arg(long)]
    schema: Option<String>,
    /// Class attribute (default: the last attribute).
    #[arg(long)]
    class: Option<String>,
}

#[derive(Debug, Args)]
struct LearnerArgs {
    #[arg(long, default_value = "on")]
    pruning: Switch,
    #[arg(long, default_value_t = 2)]
    min_leaf: usize,
    #[arg(long, default_value_t = 0.25)]
    confidence_factor: f64,
    #[arg(long, default_value_t = 5)]
    cc_folds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl LearnerArgs {
    fn params(&self) -> LearnerParams {
        LearnerParams {
            min_leaf: self.min_leaf,
            confidence_factor: self.confidence_factor,
            cc_folds: self.cc_folds,
            seed: self.seed,
            pruning: self.pruning.is_on(),
        }
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Model file; the rendered tree goes to `<output>.txt`. `-` prints the
    /// model to stdout.
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Model written by `train`.
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct RulesArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    learner: LearnerArgs,
    /// Merge adjacent sibling leaves with the same class into one rule.
    #[arg(long)]
    merge_siblings: bool,
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated learners; reports always follow the order id3, c45, cart.
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',', default_value = "id3,c45,cart")]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[command(flatten)]
    learner: LearnerArgs,
    #[arg(long, default_value = "-")]
    output: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Also write the SVG chart to this path.
    #[arg(long)]
    chart: Option<String>,
    /// `off` reports build time as NA, making repeated runs byte-identical.
    #[arg(long, default_value = "on")]
    timing: Switch,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

/// Exit status categories.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, parameters or model/data mismatch (exit 1).
    Usage(String),
    /// Unreadable or malformed input data (exit 2).
    Data(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) => m,
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
    let result = match cli.command {
        Command::Train(a) => commands::train(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Rules(a) => commands::rules(&a),
        Command::Compare(a) => commands::compare(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("edutree: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
