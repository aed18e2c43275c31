use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::harness::NegativeControl;
use crate::ops::{ModulationMode, OffsetTransform};

/// Parsed command line: one subcommand plus its flags.
#[derive(Debug, Parser)]
#[command(
    name = "radconv",
    version,
    about = "Region-aware deformable convolution: checks, analysis and demos"
)]
pub struct RunConfig {
    /// Plain-text key=value file supplying defaults; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic gradients against central differences on a random instance.
    Gradcheck(GradcheckArgs),
    /// Closed-form region averages against brute-force quadrature.
    Oracle(OracleArgs),
    /// Input pixels read by each output position.
    Footprint(FootprintArgs),
    /// Window, reach and cost classes of the operator family.
    Taxonomy(TaxonomyArgs),
    /// Forward-pass wall-clock sweeps over K and R.
    Bench(BenchArgs),
    /// Gradient descent on the synthetic region-recovery task.
    TrainToy(TrainArgs),
}

/// `CxHxW`, every dimension positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape(pub usize, pub usize, pub usize);

impl Shape {
    pub fn dims(self) -> (usize, usize, usize) {
        (self.0, self.1, self.2)
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('x').collect();
        let dims: Option<Vec<usize>> = parts.iter().map(|p| p.trim().parse().ok().filter(|&v| v > 0)).collect();
        match dims.as_deref() {
            Some(&[c, h, w]) => Ok(Shape(c, h, w)),
            _ => Err(Error::arg(format!("shape '{s}' is not CxHxW with positive dimensions"))),
        }
    }
}

/// Output position `y,x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position(pub usize, pub usize);

impl FromStr for Position {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (y, x) = s
            .split_once(',')
            .ok_or_else(|| Error::arg(format!("position '{s}' is not y,x")))?;
        let parse = |v: &str| {
            v.trim()
                .parse()
                .map_err(|_| Error::arg(format!("position '{s}' is not y,x")))
        };
        Ok(Position(parse(y)?, parse(x)?))
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct GradcheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "CxHxW")]
    pub shape: Shape,
    /// Kernel side; K = kernel^2.
    #[arg(long, default_value_t = 3)]
    pub kernel: usize,
    #[arg(long, default_value_t = 1)]
    pub groups: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// exp or softplus.
    #[arg(long, default_value = "exp")]
    pub transform: OffsetTransform,
    /// softmax, sigmoid or none.
    #[arg(long, default_value = "softmax")]
    pub modulation: ModulationMode,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value_t = crate::region::DEFAULT_MIN_EXTENT)]
    pub epsilon_min: f64,
    /// none, or flip-right to corrupt the right-boundary gradient.
    #[arg(long, default_value = "none")]
    pub negative_control: NegativeControl,
    /// CSV report; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Quadrature subdivisions per axis.
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size of the random planes; ignored with --input.
    #[arg(long, value_name = "CxHxW", default_value = "1x8x8")]
    pub shape: Shape,
    /// RADT feature map to integrate instead of random planes.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionMode {
    /// Boundary distances uniform in [0.25, 3].
    Random,
    /// Every region covers the whole map.
    Full,
    /// Unit boundary distances, the zero-logit start under exp.
    Unit,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct FootprintArgs {
    /// conv, conv1x1, large-kernel-conv, dcn (dcnv1..dcnv4) or radconv.
    #[arg(long)]
    pub op: String,
    #[arg(long, default_value_t = 3)]
    pub kernel: usize,
    #[arg(long, default_value_t = 1)]
    pub groups: usize,
    /// Input size; only H and W matter.
    #[arg(long, value_name = "CxHxW", default_value = "1x16x16")]
    pub shape: Shape,
    /// RAD-Conv region layout when no --input is given.
    #[arg(long, value_enum, default_value_t = RegionMode::Random)]
    pub region: RegionMode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "exp")]
    pub transform: OffsetTransform,
    /// RADT dump of raw offsets: G*4K boundary logits for radconv, G*2K
    /// point displacements for dcn.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// SVG of one position (--at, else the centre).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Restrict the report to one output position.
    #[arg(long, value_name = "Y,X")]
    pub at: Option<Position>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TaxonomyArgs {
    /// Output positions for the ops column.
    #[arg(long, default_value_t = 196)]
    pub n: u64,
    /// Kernel elements.
    #[arg(long, default_value_t = 9)]
    pub k: u64,
    /// Region side.
    #[arg(long, default_value_t = 5)]
    pub r: u64,
    /// Feature dimension.
    #[arg(long, default_value_t = 64)]
    pub d: u64,
    /// Attention window side.
    #[arg(long, default_value_t = 7)]
    pub w: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct BenchArgs {
    #[arg(long, value_name = "CxHxW,...", value_delimiter = ',', default_value = "8x32x32")]
    pub shapes: Vec<Shape>,
    #[arg(long, default_value_t = 7)]
    pub repeats: usize,
    /// Kernel sides of the K sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
    pub kernels: Vec<usize>,
    /// Window sides of the R sweep.
    #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
    pub regions: Vec<usize>,
    /// Window side held fixed during the K sweep.
    #[arg(long, default_value_t = 4)]
    pub fixed_r: usize,
    /// Kernel side held fixed during the R sweep.
    #[arg(long, default_value_t = 3)]
    pub fixed_kernel: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Map side.
    #[arg(long, default_value_t = 16)]
    pub size: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    /// Required final/initial loss ratio.
    #[arg(long, default_value_t = 0.01)]
    pub target: f64,
    #[arg(long, default_value = "softplus")]
    pub transform: OffsetTransform,
    #[arg(long, default_value = "softmax")]
    pub modulation: ModulationMode,
    /// Loss curve CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RADT dump of the trained raw offsets.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}
