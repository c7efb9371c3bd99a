//! Self-describing run configuration: one JSON document per invocation,
//! merged from an optional `--config` file and command-line flags.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Tolerance on `Σ p_i = 1` before renormalisation.
pub const PROBABILITY_SUM_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordsParams {
    /// Number of substitution steps applied to `seed_word`.
    pub iters: usize,
    pub seed_word: String,
    /// List the exact words of generation `gen` instead of sampling.
    pub exact: bool,
    pub gen: usize,
    /// Exact listings with more words only report the count.
    pub list_threshold: usize,
}

impl Default for WordsParams {
    fn default() -> Self {
        WordsParams { iters: 5, seed_word: "b".into(), exact: false, gen: 4, list_threshold: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegalParams {
    pub ell: usize,
}

impl Default for LegalParams {
    fn default() -> Self {
        LegalParams { ell: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyParams {
    /// Table runs over `m ..= m_max`; `None` means just `m`.
    pub m_max: Option<u32>,
    pub truncation: usize,
}

impl Default for EntropyParams {
    fn default() -> Self {
        EntropyParams { m_max: None, truncation: 60 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqsParams {
    pub ell: usize,
}

impl Default for FreqsParams {
    fn default() -> Self {
        FreqsParams { ell: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BirkhoffParams {
    pub word: String,
    pub window: usize,
    pub trials: usize,
    pub offset: i64,
}

impl Default for BirkhoffParams {
    fn default() -> Self {
        BirkhoffParams { word: "a".into(), window: 100_000, trials: 20, offset: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftParams {
    pub iters: usize,
    pub hist_bins: usize,
    /// Export the individual points instead of the histogram.
    pub points: bool,
    /// Points used for the difference-set scan of the JSON summary.
    pub meyer_cap: usize,
}

impl Default for LiftParams {
    fn default() -> Self {
        LiftParams { iters: 20, hist_bins: 200, points: false, meyer_cap: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripParams {
    pub bound: i128,
}

impl Default for StripParams {
    fn default() -> Self {
        StripParams { bound: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffractParams {
    pub pp: bool,
    pub ac: bool,
    pub pq_max: i128,
    pub kmin: f64,
    pub kmax: f64,
    pub kstep: f64,
    pub truncation: usize,
    pub steps: usize,
}

impl Default for DiffractParams {
    fn default() -> Self {
        DiffractParams {
            pp: true,
            ac: true,
            pq_max: 30,
            kmin: 0.0,
            kmax: 3.0,
            kstep: 1e-3,
            truncation: noble_means::diffraction::DEFAULT_AC_TRUNCATION,
            steps: noble_means::diffraction::DEFAULT_PP_STEPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "lowercase")]
pub enum CommandConfig {
    Words(WordsParams),
    Legal(LegalParams),
    Entropy(EntropyParams),
    Freqs(FreqsParams),
    Birkhoff(BirkhoffParams),
    Lift(LiftParams),
    Strip(StripParams),
    Diffract(DiffractParams),
}

impl CommandConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CommandConfig::Words(_) => "words",
            CommandConfig::Legal(_) => "legal",
            CommandConfig::Entropy(_) => "entropy",
            CommandConfig::Freqs(_) => "freqs",
            CommandConfig::Birkhoff(_) => "birkhoff",
            CommandConfig::Lift(_) => "lift",
            CommandConfig::Strip(_) => "strip",
            CommandConfig::Diffract(_) => "diffract",
        }
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: u32,
    pub probs: Vec<f64>,
    pub seed: u64,
    pub format: Format,
    /// Admit zero entries in `probs` (deterministic or partly deterministic runs).
    #[serde(default)]
    pub allow_degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub command: CommandConfig,
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))?;
        cfg.validated()
    }

    /// SHA-256 of the configuration without the output path.
    pub fn hash(&self) -> String {
        let mut clean = self.clone();
        clean.out = None;
        let bytes = serde_json::to_vec(&clean).expect("configuration serialises");
        hex::encode(Sha256::digest(bytes))
    }

    /// Checks `m` and the probability vector, renormalising sums within
    /// [`PROBABILITY_SUM_SLACK`] of one.
    pub fn validated(mut self) -> Result<Self, CliError> {
        if self.m == 0 {
            return Err(CliError::Config("m must be at least 1".into()));
        }
        if self.probs.len() != self.m as usize + 1 {
            return Err(CliError::Config(format!(
                "expected {} probabilities for m = {}, got {}",
                self.m + 1,
                self.m,
                self.probs.len()
            )));
        }
        if self.probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(CliError::Config(format!("probabilities must be non-negative: {:?}", self.probs)));
        }
        if !self.allow_degenerate && self.probs.contains(&0.0) {
            return Err(CliError::Config(
                "probabilities must be strictly positive (use --allow-degenerate for zeros)".into(),
            ));
        }
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_SLACK {
            return Err(CliError::Config(format!("probabilities sum to {sum}, not 1")));
        }
        if sum != 1.0 {
            for p in &mut self.probs {
                *p /= sum;
            }
        }
        Ok(self)
    }

    pub fn probabilities(&self) -> Result<noble_means::Probabilities, CliError> {
        noble_means::Probabilities::new(self.probs.clone()).map_err(CliError::from)
    }
}

// ---------------------------------------------------------------------------
// Command-line surface. Every flag is optional so that a config file can
// supply it; explicit flags win.

#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Family parameter m ≥ 1.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Comma-separated rule probabilities p_0,…,p_m (default: uniform).
    #[arg(long, global = true, value_delimiter = ',')]
    pub probs: Option<Vec<f64>>,
    /// Seed of the ChaCha8 generator.
    #[arg(long = "rng-seed", global = true)]
    pub rng_seed: Option<u64>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Accept zero probabilities.
    #[arg(long, global = true)]
    pub allow_degenerate: bool,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Random realisations of ζ_m^k(seed) or exact word listings.
    Words {
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed_word: Option<String>,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        gen: Option<usize>,
        #[arg(long)]
        list_threshold: Option<usize>,
    },
    /// Legal words of one length.
    Legal {
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Topological entropy from the series, with certified tail bounds.
    Entropy {
        #[arg(long)]
        m_max: Option<u32>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Word frequencies from the induced substitution.
    Freqs {
        #[arg(long)]
        ell: Option<usize>,
    },
    /// Monte-Carlo frequency check of one word.
    Birkhoff {
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<i64>,
    },
    /// Internal-space lift of a random realisation of ζ_m^k(b).
    Lift {
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        hist_bins: Option<usize>,
        #[arg(long)]
        points: bool,
        #[arg(long)]
        meyer_cap: Option<usize>,
    },
    /// Lattice points and windows of the cut-and-project scheme.
    Strip {
        #[arg(long)]
        bound: Option<i128>,
    },
    /// Diffraction of the m = 1 family: Bragg peaks and continuous density.
    Diffract {
        #[arg(long)]
        pp: bool,
        #[arg(long)]
        ac: bool,
        #[arg(long)]
        pq_max: Option<i128>,
        #[arg(long, allow_hyphen_values = true)]
        kmin: Option<f64>,
        #[arg(long)]
        kmax: Option<f64>,
        #[arg(long)]
        kstep: Option<f64>,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn pick<T>(flag: Option<T>, base: T) -> T {
    flag.unwrap_or(base)
}

impl CommandArgs {
    fn name(&self) -> &'static str {
        match self {
            CommandArgs::Words { .. } => "words",
            CommandArgs::Legal { .. } => "legal",
            CommandArgs::Entropy { .. } => "entropy",
            CommandArgs::Freqs { .. } => "freqs",
            CommandArgs::Birkhoff { .. } => "birkhoff",
            CommandArgs::Lift { .. } => "lift",
            CommandArgs::Strip { .. } => "strip",
            CommandArgs::Diffract { .. } => "diffract",
        }
    }

    /// Overrides `base` (the file's parameters or the defaults) with flags.
    fn merge(self, base: Option<CommandConfig>) -> CommandConfig {
        match self {
            CommandArgs::Words { iters, seed_word, exact, gen, list_threshold } => {
                let b = match base {
                    Some(CommandConfig::Words(p)) => p,
                    _ => WordsParams::default(),
                };
                CommandConfig::Words(WordsParams {
                    iters: pick(iters, b.iters),
                    seed_word: pick(seed_word, b.seed_word),
                    exact: exact || b.exact,
                    gen: pick(gen, b.gen),
                    list_threshold: pick(list_threshold, b.list_threshold),
                })
            }
            CommandArgs::Legal { ell } => {
                let b = match base {
                    Some(CommandConfig::Legal(p)) => p,
                    _ => LegalParams::default(),
                };
                CommandConfig::Legal(LegalParams { ell: pick(ell, b.ell) })
            }
            CommandArgs::Entropy { m_max, truncation } => {
                let b = match base {
                    Some(CommandConfig::Entropy(p)) => p,
                    _ => EntropyParams::default(),
                };
                CommandConfig::Entropy(EntropyParams {
                    m_max: m_max.or(b.m_max),
                    truncation: pick(truncation, b.truncation),
                })
            }
            CommandArgs::Freqs { ell } => {
                let b = match base {
                    Some(CommandConfig::Freqs(p)) => p,
                    _ => FreqsParams::default(),
                };
                CommandConfig::Freqs(FreqsParams { ell: pick(ell, b.ell) })
            }
            CommandArgs::Birkhoff { word, window, trials, offset } => {
                let b = match base {
                    Some(CommandConfig::Birkhoff(p)) => p,
                    _ => BirkhoffParams::default(),
                };
                CommandConfig::Birkhoff(BirkhoffParams {
                    word: pick(word, b.word),
                    window: pick(window, b.window),
                    trials: pick(trials, b.trials),
                    offset: pick(offset, b.offset),
                })
            }
            CommandArgs::Lift { iters, hist_bins, points, meyer_cap } => {
                let b = match base {
                    Some(CommandConfig::Lift(p)) => p,
                    _ => LiftParams::default(),
                };
                CommandConfig::Lift(LiftParams {
                    iters: pick(iters, b.iters),
                    hist_bins: pick(hist_bins, b.hist_bins),
                    points: points || b.points,
                    meyer_cap: pick(meyer_cap, b.meyer_cap),
                })
            }
            CommandArgs::Strip { bound } => {
                let b = match base {
                    Some(CommandConfig::Strip(p)) => p,
                    _ => StripParams::default(),
                };
                CommandConfig::Strip(StripParams { bound: pick(bound, b.bound) })
            }
            CommandArgs::Diffract { pp, ac, pq_max, kmin, kmax, kstep, truncation, steps } => {
                let b = match base {
                    Some(CommandConfig::Diffract(p)) => p,
                    _ => DiffractParams::default(),
                };
                // naming one part on the command line selects only that part
                let (pp, ac) = if pp || ac { (pp, ac) } else { (b.pp, b.ac) };
                CommandConfig::Diffract(DiffractParams {
                    pp,
                    ac,
                    pq_max: pick(pq_max, b.pq_max),
                    kmin: pick(kmin, b.kmin),
                    kmax: pick(kmax, b.kmax),
                    kstep: pick(kstep, b.kstep),
                    truncation: pick(truncation, b.truncation),
                    steps: pick(steps, b.steps),
                })
            }
        }
    }
}

/// Builds the resolved configuration from flags and an optional file.
pub fn resolve(common: CommonArgs, command: CommandArgs) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
            let cfg: RunConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))?;
            if cfg.command.name() != command.name() {
                return Err(CliError::Config(format!(
                    "config {} is for `{}`, not `{}`",
                    path.display(),
                    cfg.command.name(),
                    command.name()
                )));
            }
            Some(cfg)
        }
        None => None,
    };
    let m = common.m.or(file.as_ref().map(|f| f.m)).unwrap_or(1);
    let probs = match (common.probs, &file) {
        (Some(p), _) => p,
        // a file's vector only applies to the file's m
        (None, Some(f)) if f.m == m => f.probs.clone(),
        _ => vec![1.0 / (m as f64 + 1.0); m as usize + 1],
    };
    let cfg = RunConfig {
        m,
        probs,
        seed: common.rng_seed.or(file.as_ref().map(|f| f.seed)).unwrap_or(0),
        format: common.format.or(file.as_ref().map(|f| f.format)).unwrap_or_default(),
        allow_degenerate: common.allow_degenerate || file.as_ref().is_some_and(|f| f.allow_degenerate),
        out: common.out.or(file.as_ref().and_then(|f| f.out.clone())),
        command: command.merge(file.map(|f| f.command)),
    };
    cfg.validated()
}
