use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tropsec::models::{grassmann_config, segre_config, segre_veronese_config, veronese_config};
use tropsec::{ModelDescriptor, PointConfig, Problem};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "tropsec", version, about = "Tropical lower bounds on secant dimensions of toric cones")]
pub struct Cli {
    /// Seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for search restarts and oracle trials.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Output file; a `.manifest.json` is written next to it. Defaults to stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the point configuration of a model.
    Generate(FamilyArgs),
    /// Evaluate a witness on a configuration.
    Eval(EvalArgs),
    /// Search for a high-value witness.
    Search(SearchArgs),
    /// Code-theoretic bounds and code witnesses.
    Codes {
        #[command(subcommand)]
        command: CodesCommand,
    },
    /// Terracini rank of a secant variety over a prime field.
    Oracle(OracleArgs),
    /// Re-run a headline computation and compare with the expected values.
    Reproduce(ReproduceArgs),
    /// Draw a planar configuration coloured by winning player as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Veronese,
    BinaryForms,
    Segre,
    SegreVeronese,
    Grassmann,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    /// Segre only: drop column 0 of every row.
    #[arg(long)]
    pub reduced: bool,
    /// Segre-Veronese factors as `m:d` pairs, e.g. `3:2,2:1`.
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
}

impl FamilyArgs {
    fn need(&self, v: Option<usize>, name: &str) -> CliResult<usize> {
        v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this family")))
    }

    fn factor_list(&self) -> CliResult<Vec<(usize, usize)>> {
        if self.factors.is_empty() {
            return Err(CliError::Usage("--factors is required for segre-veronese".into()));
        }
        self.factors
            .iter()
            .map(|f| {
                let bad = || CliError::Usage(format!("factor {f:?} is not of the form m:d"));
                let (m, d) = f.split_once(':').ok_or_else(bad)?;
                Ok((m.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?))
            })
            .collect()
    }

    pub fn descriptor(&self) -> CliResult<ModelDescriptor> {
        let desc = match self.family {
            FamilyName::Veronese => ModelDescriptor::veronese(self.need(self.m, "m")?, self.need(self.d, "d")?),
            FamilyName::BinaryForms => ModelDescriptor::binary_forms(self.need(self.d, "d")?),
            FamilyName::Segre => ModelDescriptor::segre(self.need(self.d, "d")?, self.need(self.m, "m")?),
            FamilyName::SegreVeronese => ModelDescriptor::segre_veronese(self.factor_list()?),
            FamilyName::Grassmann => ModelDescriptor::grassmannian(self.need(self.m, "m")?, self.need(self.d, "d")?),
        };
        desc.map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn config(&self) -> CliResult<PointConfig> {
        let config = match self.family {
            FamilyName::Veronese => veronese_config(self.need(self.m, "m")?, self.need(self.d, "d")?),
            FamilyName::BinaryForms => veronese_config(2, self.need(self.d, "d")?),
            FamilyName::Segre => segre_config(self.need(self.d, "d")?, self.need(self.m, "m")?, self.reduced),
            FamilyName::SegreVeronese => segre_veronese_config(&self.factor_list()?),
            FamilyName::Grassmann => grassmann_config(self.need(self.m, "m")?, self.need(self.d, "d")?),
        };
        config.map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Linear,
    Affine,
    Voronoi,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Linear => Problem::Linear,
            ProblemArg::Affine => Problem::Affine,
            ProblemArg::Voronoi => Problem::Voronoi,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = ProblemArg::Voronoi)]
    pub problem: ProblemArg,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub witness: PathBuf,
    /// Gram matrix JSON for the Voronoi problem; standard inner product if absent.
    #[arg(long)]
    pub gram: Option<PathBuf>,
    /// Resolve ties by the deterministic perturbation before evaluating.
    #[arg(long)]
    pub perturb: bool,
    /// Include the per-player minima in the result.
    #[arg(long)]
    pub minima: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CandidateSet {
    /// The configuration's points.
    Points,
    /// Points and midpoints of all pairs.
    Midpoints,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ProblemArg::Voronoi)]
    pub problem: ProblemArg,
    #[arg(long)]
    pub gram: Option<PathBuf>,
    /// Starting witnesses for annealing (repeatable).
    #[arg(long = "seed-witness")]
    pub seed_witnesses: Vec<PathBuf>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Rational in (0, 1), e.g. `997/1000`.
    #[arg(long)]
    pub cooling: Option<String>,
    #[arg(long)]
    pub step_size: Option<String>,
    #[arg(long)]
    pub den: Option<u64>,
    /// Exhaustive search over k-subsets of a candidate set instead of annealing.
    #[arg(long)]
    pub brute_force: bool,
    #[arg(long, value_enum, default_value_t = CandidateSet::Midpoints)]
    pub candidates: CandidateSet,
    #[arg(long, default_value_t = tropsec::search::DEFAULT_BUDGET)]
    pub budget: u128,
}

#[derive(Debug, Subcommand)]
pub enum CodesCommand {
    /// Kernel of a parity-check matrix given as comma-separated rows.
    Parity {
        #[arg(long, value_delimiter = ',')]
        h: Vec<String>,
        #[arg(long, default_value_t = 2)]
        q: usize,
    },
    /// Words within Hamming distance 1 of a code file.
    Rook {
        #[arg(long)]
        code: PathBuf,
    },
    /// Weight-d words within distance 2 of a constant-weight code file.
    Grassmann {
        #[arg(long)]
        code: PathBuf,
    },
    /// Points within 1-distance 2 of the chosen simplex corners.
    Corner {
        /// 1-based corner indices.
        #[arg(long, value_delimiter = ',')]
        corners: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
    },
    /// Lexicographic greedy constant-weight code.
    Greedy {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        min_dist: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub k: usize,
    /// Use a single prime instead of rotating through the defaults.
    #[arg(long)]
    pub prime: Option<u64>,
    #[arg(long, default_value_t = tropsec::oracle::DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    BinaryForms,
    VeroneseM3,
    #[value(name = "segre-p1-6")]
    SegreP16,
    CodeBounds,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    /// Largest degree for the binary-forms and veronese-m3 targets.
    #[arg(long)]
    pub dmax: Option<usize>,
    #[arg(long, default_value_t = tropsec::oracle::DEFAULT_TRIALS)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub witness: PathBuf,
    #[arg(long)]
    pub gram: Option<PathBuf>,
}
