use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "avc-jsc",
    version,
    about = "Symmetrizability checks, capacity-distortion bounds and coding simulations \
             for state-dependent arbitrarily varying channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide every symmetrizability variant of a channel.
    CheckSym(CheckSymArgs),
    /// Evaluate a capacity or capacity-distortion bound.
    Bound(BoundArgs),
    /// Run Monte Carlo transmissions with the random coding schemes.
    Simulate(SimulateArgs),
    /// Recompute one of the two built-in worked examples.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// Binary input, state and jammer with state prior (0.9, 0.1).
    BinaryExample,
    /// Y = X + S + J.
    Adder,
    /// Output reveals the state; jammer picks the crossover.
    StateRevealing,
    /// Erasure probability set by state and jammer.
    JammedErasure,
}

/// Where the channel comes from and where the report goes.
#[derive(Debug, Args)]
pub struct Io {
    /// Channel file (JSON).
    #[arg(long, conflicts_with = "builtin")]
    pub channel: Option<PathBuf>,
    /// Built-in channel instead of a file.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckSymArgs {
    #[command(flatten)]
    pub io: Io,
    /// Variants to test (XS, X, S, X|S, S|X, P2P_X); all state variants and
    /// the state-averaged P2P_X by default.
    #[arg(long, value_delimiter = ',')]
    pub variant: Vec<String>,
    /// Margin at or below which a variant counts as symmetrizable.
    #[arg(long, default_value_t = avc_jsc::sym::DEFAULT_SYM_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub io: Io,
    /// Bound to evaluate: minimax, strictly-causal, lossless-strictly-causal,
    /// noncausal, noncausal-maximal, strictly-causal-maximal,
    /// binary-noncausal, binary-strictly-causal or lossless-feasibility.
    #[arg(long)]
    pub kind: String,
    /// Distortion budget, required by the capacity-distortion bounds.
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// Simplex grid denominator of the search.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Random starts of the search.
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    /// Auxiliary alphabet size; |S| + 1 by default.
    #[arg(long)]
    pub u_card: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = avc_jsc::sym::DEFAULT_SYM_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// Strictly causal, U = S.
    DescribeState,
    /// Strictly causal, constant U.
    NoDescription,
    /// Noncausal, U = X uniform and independent of the state.
    StateBlind,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub io: Io,
    #[arg(long, value_enum, default_value = "describe-state")]
    pub scheme: Scheme,
    /// Input law of the strictly causal schemes; uniform by default.
    #[arg(long, value_delimiter = ',')]
    pub q_x: Vec<f64>,
    /// Rate slack of the plan.
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    /// Lower message rate than the plan's largest.
    #[arg(long)]
    pub rate: Option<f64>,
    /// Decoder threshold; the blocklength default when absent. The
    /// covering threshold is half of it.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Blocklengths.
    #[arg(long, value_delimiter = ',', default_value = "8,12,16")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Jammers: constant-J, iid-uniform, periodic-DIGITS, symmetrizing-x,
    /// symmetrizing-s, message-aware. Defaults to every constant plus
    /// iid-uniform.
    #[arg(long = "jammer")]
    pub jammers: Vec<String>,
    /// Jamming sequences a message-aware jammer may try.
    #[arg(long, default_value_t = 1 << 16)]
    pub jam_budget: u64,
    /// Node budget of one decoder search.
    #[arg(long, default_value_t = avc_jsc::sim::DEFAULT_SEARCH_BUDGET)]
    pub search_budget: u64,
    /// Largest codebook, in stored words.
    #[arg(long, default_value_t = avc_jsc::sim::DEFAULT_MAX_WORDS)]
    pub max_words: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// Adder channel: symmetrizability verdicts.
    #[value(alias = "example_1")]
    Example1,
    /// Binary example: average versus maximal error.
    #[value(alias = "binary_example")]
    BinaryExample,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub which: Example,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}
