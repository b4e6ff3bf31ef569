//! Flag surface.
//!
//! Every experiment takes an explicit `--seed`; there is no wall-clock
//! default, so the command line alone pins the output. `--threads` falls back
//! to the `QNET_THREADS` environment variable and then to all cores; thread
//! count never changes the numbers, only the wall time.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "qnet",
    version,
    about = "Fisher-information experiments for displacement sensing through beam-splitter networks",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Average the displacement QFI over Haar-random networks.
    HaarAverage(HaarAverageArgs),
    /// Sweep brickwork circuit depth toward the Haar plateau.
    LocalDepth(LocalDepthArgs),
    /// Degrade the probe with photon loss across a transmittivity list.
    LossSweep(LossSweepArgs),
    /// Evaluate one network (sampled or from a file) and print its breakdown.
    Single(SingleArgs),
    /// Run the internal invariant suite and report pass/fail per check.
    Validate(ValidateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Output and scheduling flags shared by the experiment commands.
#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Output file (stdout when omitted); written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Omit the generation-time header line / metadata field.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Worker threads (default: all cores).
    #[arg(long, env = "QNET_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct HaarAverageArgs {
    /// Number of network modes.
    #[arg(long = "M", value_name = "M", conflicts_with = "m_list", required_unless_present = "m_list")]
    pub m: Option<usize>,
    /// Comma-separated mode counts, one output row per entry.
    #[arg(long = "M-list", value_name = "M,M,...", value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    /// Mean photons per mode in the squeezed input (total is nbar times M).
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    /// Transmittivity of a uniform loss channel; 1 means lossless.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub eta: f64,
    /// Haar samples per row.
    #[arg(long)]
    pub samples: usize,
    /// Tail thresholds as fractions of the Haar plateau height; each entry f
    /// in (0,1) adds a column pair reporting k = f·2πn̄ and the fraction of
    /// samples with h_lo ≤ (2πn̄ − k)·M².
    #[arg(long = "k-fractions", value_name = "F,F,...", value_delimiter = ',', allow_negative_numbers = true)]
    pub k_fractions: Option<Vec<f64>>,
    /// Master seed; sample i draws from RNG stream i.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LocalDepthArgs {
    /// Number of network modes (at least 2).
    #[arg(long = "M", value_name = "M")]
    pub m: usize,
    /// Mean photons per mode in the squeezed input.
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    /// Independent circuits per depth.
    #[arg(long)]
    pub configs: usize,
    /// Comma-separated layer counts. Default: 8 points geometric in
    /// D/M² from 0.01 to 2. Rows are sorted by depth.
    #[arg(long, value_name = "D,D,...", value_delimiter = ',')]
    pub depths: Option<Vec<usize>>,
    /// Master seed; circuit c draws from RNG stream c.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct LossSweepArgs {
    /// Number of network modes.
    #[arg(long = "M", value_name = "M")]
    pub m: usize,
    /// Mean photons per mode in the squeezed input.
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    /// Single transmittivity (alternative to --eta-list).
    #[arg(long, conflicts_with = "eta_list", required_unless_present = "eta_list", allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Comma-separated transmittivities in [0, 1], one row each.
    #[arg(long = "eta-list", value_name = "E,E,...", value_delimiter = ',', allow_negative_numbers = true)]
    pub eta_list: Option<Vec<f64>>,
    /// Haar samples per row.
    #[arg(long)]
    pub samples: usize,
    /// Master seed; shared across rows so eta = 1 reproduces the lossless run.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SingleArgs {
    /// Modes of a Haar-sampled network (needs --seed).
    #[arg(long = "M", value_name = "M", conflicts_with = "matrix_file", required_unless_present = "matrix_file")]
    pub m: Option<usize>,
    /// Evaluate the unitary stored in this file instead of sampling.
    #[arg(long)]
    pub matrix_file: Option<PathBuf>,
    /// Mean photons per mode in the squeezed input.
    #[arg(long, allow_negative_numbers = true)]
    pub nbar: f64,
    /// Master seed for sampling (stream 0).
    #[arg(long, required_unless_present = "matrix_file", conflicts_with = "matrix_file")]
    pub seed: Option<u64>,
    /// Output file (stdout when omitted). The breakdown is always JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit the generation-time metadata field.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Machine-readable report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Fault-injection hook for the exit-code contract: perturbs one entry of
    /// the quadrature transform inside the cross-path check.
    #[arg(long, hide = true)]
    pub break_symplectic: bool,
    /// Worker threads (default: all cores).
    #[arg(long, env = "QNET_THREADS")]
    pub threads: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn list_flags_split_on_commas() {
        let cli = Cli::try_parse_from([
            "qnet",
            "haar-average",
            "--M-list",
            "4,10,20",
            "--nbar",
            "0.3",
            "--samples",
            "100",
            "--seed",
            "1",
        ])
        .unwrap();
        match cli.command {
            Command::HaarAverage(a) => assert_eq!(a.m_list.unwrap(), vec![4, 10, 20]),
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn mode_count_and_list_are_exclusive() {
        let err = Cli::try_parse_from([
            "qnet",
            "haar-average",
            "--M",
            "4",
            "--M-list",
            "4,10",
            "--nbar",
            "0.3",
            "--samples",
            "100",
            "--seed",
            "1",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), clap::error::ErrorKind::ArgumentConflict);
    }

    #[test]
    fn seed_is_mandatory_for_experiments() {
        let err = Cli::try_parse_from([
            "qnet",
            "haar-average",
            "--M",
            "4",
            "--nbar",
            "0.3",
            "--samples",
            "100",
        ])
        .unwrap_err();
        assert_eq!(err.kind(), clap::error::ErrorKind::MissingRequiredArgument);
    }

    #[test]
    fn single_accepts_matrix_file_without_seed() {
        let cli = Cli::try_parse_from([
            "qnet",
            "single",
            "--matrix-file",
            "u.txt",
            "--nbar",
            "0.3",
        ])
        .unwrap();
        match cli.command {
            Command::Single(a) => {
                assert!(a.m.is_none());
                assert!(a.seed.is_none());
                assert_eq!(a.matrix_file.unwrap(), PathBuf::from("u.txt"));
            }
            _ => panic!("wrong command"),
        }
    }
}
