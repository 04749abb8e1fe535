//! Command-line flags. The same types serialize to `run.json`, and
//! [`RunConfig::to_args`] turns a configuration back into flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eulerist::builders::Decreasing;
use eulerist::transforms::PrimitiveKernel;
use serde::{Deserialize, Serialize};

/// The resolved configuration of one run: every flag, parsed.
pub type RunConfig = Cli;

#[derive(Parser, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[command(name = "eulerist", version, about = "Euler characteristic profiles and hybrid transforms")]
#[serde(deny_unknown_fields)]
pub struct Cli {
    /// Directory receiving outputs and run.json.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "EULERIST_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Build a filtration from points, a graph, or a filtration file.
    Build(BuildArgs),
    /// Sample the Euler characteristic profile on a grid.
    Ecp(EcpArgs),
    /// Sample the hybrid transform on a grid of directions.
    Ht(HtArgs),
    /// Vectorize every input of a dataset directory on a shared grid.
    Featurize(FeaturizeArgs),
    /// Distance between two filtrations.
    Distance(DistanceArgs),
    /// Draw a synthetic point cloud.
    Sample(SampleArgs),
}

macro_rules! string_serde {
    ($t:ty) => {
        impl From<$t> for String {
            fn from(v: $t) -> String {
                v.to_string()
            }
        }
        impl TryFrom<String> for $t {
            type Error = String;
            fn try_from(s: String) -> Result<Self, String> {
                s.parse()
            }
        }
    };
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_nan() {
        return Err(format!("`{s}` is not a number"));
    }
    Ok(v)
}

/// Per-axis `lo,hi` pairs separated by `x`, e.g. `0,1x0,2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PairList(pub Vec<(f64, f64)>);

impl FromStr for PairList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let pairs = s
            .split('x')
            .map(|part| {
                let (a, b) = part
                    .split_once(',')
                    .ok_or_else(|| format!("`{part}` is not a `lo,hi` pair"))?;
                Ok((parse_real(a)?, parse_real(b)?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(PairList(pairs))
    }
}

impl fmt::Display for PairList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{a},{b}")?;
        }
        Ok(())
    }
}
string_serde!(PairList);

/// Per-axis grid resolutions separated by `x`, e.g. `30x30`. A single value
/// applies to every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Resolution(pub Vec<usize>);

impl FromStr for Resolution {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split('x')
            .map(|t| {
                let d: usize = t
                    .trim()
                    .parse()
                    .map_err(|_| format!("`{t}` is not a resolution"))?;
                if d == 0 {
                    return Err("resolution must be >= 1".to_string());
                }
                Ok(d)
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Resolution(v))
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("x"))
    }
}
string_serde!(Resolution);

/// Comma-separated reals, e.g. `0.5,0.5`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(RealList(
            s.split(',').map(parse_real).collect::<Result<Vec<_>, String>>()?,
        ))
    }
}

impl fmt::Display for RealList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}
string_serde!(RealList);

/// A validated kernel name such as `exp_pow:4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct KernelSpec(String);

impl KernelSpec {
    pub fn kernel(&self) -> PrimitiveKernel {
        self.0.parse().expect("validated on construction")
    }
}

impl FromStr for KernelSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let k: PrimitiveKernel = s.parse().map_err(|e: eulerist::Error| e.to_string())?;
        Ok(KernelSpec(k.spec_string()))
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
string_serde!(KernelSpec);

/// `signed-w1`, `l1-window:<M>` or `w1-diagram`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Metric {
    SignedW1,
    L1Window(f64),
    W1Diagram,
}

impl FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "signed-w1" => Ok(Metric::SignedW1),
            "w1-diagram" => Ok(Metric::W1Diagram),
            _ => match s.strip_prefix("l1-window:") {
                Some(m) => {
                    let m = parse_real(m)?;
                    if !(m > 0.0 && m.is_finite()) {
                        return Err(format!("window half-width must be positive, got {m}"));
                    }
                    Ok(Metric::L1Window(m))
                }
                None => Err(format!(
                    "unknown metric `{s}` (expected signed-w1, l1-window:<M>, w1-diagram)"
                )),
            },
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::SignedW1 => f.write_str("signed-w1"),
            Metric::L1Window(m) => write!(f, "l1-window:{m}"),
            Metric::W1Diagram => f.write_str("w1-diagram"),
        }
    }
}
string_serde!(Metric);

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputType {
    Points,
    Graph,
    Filtration,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuilderKind {
    Rips,
    Cech,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Descriptor {
    Ecp,
    Ht,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Orbit,
    Poisson,
    Torus,
    Sphere,
    Clutter,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

/// How inputs become filtrations.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuilderArgs {
    /// Kind of input file.
    #[arg(long = "type", value_enum, default_value_t = InputType::Points)]
    pub input_type: InputType,

    /// Point-cloud complex.
    #[arg(long, value_enum, default_value_t = BuilderKind::Rips)]
    pub builder: BuilderKind,

    /// Maximal simplex dimension for point-cloud complexes.
    #[arg(long, default_value_t = 1)]
    pub max_dim: usize,

    /// Largest filtration value kept (unbounded if omitted).
    #[arg(long)]
    pub max_scale: Option<f64>,

    /// Add a codensity axis (Gaussian KDE post-composed with --post).
    #[arg(long)]
    pub codensity: bool,

    /// KDE bandwidth (median pairwise distance if omitted).
    #[arg(long)]
    pub bandwidth: Option<f64>,

    /// Decreasing map applied to the density: neg or gauss.
    #[arg(long, default_value = "neg")]
    pub post: Decreasing,

    /// Vertex functions for graphs: hks:<t>, closeness, attr:<column>.
    #[arg(long = "vf", value_delimiter = ',')]
    pub vertex_functions: Vec<String>,

    /// Edge functions for graphs: forman, betweenness.
    #[arg(long = "ef", value_delimiter = ',')]
    pub edge_functions: Vec<String>,

    /// Vertex attribute CSV for graphs (one row per vertex).
    #[arg(long)]
    pub attributes: Option<PathBuf>,
}

impl BuilderArgs {
    fn push_args(&self, out: &mut Vec<String>) {
        out.push("--type".into());
        out.push(value_name(&self.input_type));
        out.push("--builder".into());
        out.push(value_name(&self.builder));
        out.push("--max-dim".into());
        out.push(self.max_dim.to_string());
        if let Some(s) = self.max_scale {
            out.push("--max-scale".into());
            out.push(s.to_string());
        }
        if self.codensity {
            out.push("--codensity".into());
        }
        if let Some(h) = self.bandwidth {
            out.push("--bandwidth".into());
            out.push(h.to_string());
        }
        out.push("--post".into());
        out.push(self.post.to_string());
        for v in &self.vertex_functions {
            out.push("--vf".into());
            out.push(v.clone());
        }
        for e in &self.edge_functions {
            out.push("--ef".into());
            out.push(e.clone());
        }
        if let Some(p) = &self.attributes {
            out.push("--attributes".into());
            out.push(p.display().to_string());
        }
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub builder: BuilderArgs,
    /// Output file name inside --out-dir.
    #[arg(long, default_value = "filtration.txt")]
    pub output: String,
}

/// Grid choice for Euler profiles.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcpGridArgs {
    /// Explicit bounds per axis, e.g. 0,1x0,1.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "quantiles")]
    pub bounds: Option<PairList>,
    /// Percentile range per axis (one pair applies to every axis), e.g. 0.1,0.9.
    #[arg(long)]
    pub quantiles: Option<PairList>,
}

/// Grid choice for hybrid transforms.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HtGridArgs {
    /// Primitive kernel: exp_neg, exp_pow:<p>, pow_exp_pow:<p>, cosine.
    #[arg(long)]
    pub kernel: Option<KernelSpec>,
    /// Explicit direction bounds per axis, e.g. 0,20.
    #[arg(long, conflicts_with_all = ["quantile", "alpha"])]
    pub xi_bounds: Option<PairList>,
    /// Percentile per axis defining the direction range [0, alpha / v].
    #[arg(long)]
    pub quantile: Option<RealList>,
    /// Scale of the quantile-derived direction range.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EcpArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub grid: EcpGridArgs,
    /// Points per axis, e.g. 30 or 30x30.
    #[arg(long, default_value = "30")]
    pub resolution: Resolution,
    /// Output stem inside --out-dir (writes <stem>.csv and <stem>.json).
    #[arg(long, default_value = "ecp")]
    pub output: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HtArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub grid: HtGridArgs,
    #[arg(long, default_value = "30")]
    pub resolution: Resolution,
    #[arg(long, default_value = "ht")]
    pub output: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturizeArgs {
    /// Dataset directory; files in sub-directories are labelled by the
    /// sub-directory name.
    pub input: PathBuf,
    #[command(flatten)]
    pub builder: BuilderArgs,
    #[arg(long, value_enum, default_value_t = Descriptor::Ecp)]
    pub descriptor: Descriptor,
    #[command(flatten)]
    pub ecp_grid: EcpGridArgs,
    #[command(flatten)]
    pub ht_grid: HtGridArgs,
    #[arg(long, default_value = "30")]
    pub resolution: Resolution,
    #[arg(long, default_value = "features")]
    pub output: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// signed-w1, l1-window:<M> or w1-diagram.
    #[arg(long, default_value = "signed-w1")]
    pub metric: Metric,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub generator: Generator,
    /// Random seed (mandatory).
    #[arg(long)]
    pub seed: u64,
    /// Number of points (orbit, torus, sphere).
    #[arg(long)]
    pub n: Option<usize>,
    /// Orbit parameter.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Poisson intensity.
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Poisson cube side.
    #[arg(long, default_value_t = 1.0)]
    pub side: f64,
    /// Poisson ambient dimension.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Area-uniform sampling (torus, sphere).
    #[arg(long)]
    pub uniform: bool,
    /// Clutter background points.
    #[arg(long, default_value_t = 400)]
    pub n_noise: usize,
    /// Clutter line points in total, split among the lines.
    #[arg(long, default_value_t = 150)]
    pub n_line: usize,
    #[arg(long, default_value_t = 1)]
    pub lines: usize,
    #[arg(long, default_value_t = 0.005)]
    pub jitter: f64,
    #[arg(long, default_value = "sample.csv")]
    pub output: String,
}

fn push_opt<T: fmt::Display>(out: &mut Vec<String>, flag: &str, v: &Option<T>) {
    if let Some(v) = v {
        out.push(flag.into());
        out.push(v.to_string());
    }
}

impl EcpGridArgs {
    fn push_args(&self, out: &mut Vec<String>) {
        push_opt(out, "--bounds", &self.bounds);
        push_opt(out, "--quantiles", &self.quantiles);
    }
}

impl HtGridArgs {
    fn push_args(&self, out: &mut Vec<String>) {
        push_opt(out, "--kernel", &self.kernel);
        push_opt(out, "--xi-bounds", &self.xi_bounds);
        push_opt(out, "--quantile", &self.quantile);
        push_opt(out, "--alpha", &self.alpha);
    }
}

impl Cli {
    /// Flags that parse back to this configuration (without the program
    /// name).
    pub fn to_args(&self) -> Vec<String> {
        let mut out = vec!["--out-dir".to_string(), self.out_dir.display().to_string()];
        push_opt(&mut out, "--threads", &self.threads);
        match &self.command {
            Command::Build(a) => {
                out.push("build".into());
                out.push(a.input.display().to_string());
                a.builder.push_args(&mut out);
                out.extend(["--output".into(), a.output.clone()]);
            }
            Command::Ecp(a) => {
                out.push("ecp".into());
                out.push(a.input.display().to_string());
                a.grid.push_args(&mut out);
                out.extend([
                    "--resolution".into(),
                    a.resolution.to_string(),
                    "--output".into(),
                    a.output.clone(),
                ]);
            }
            Command::Ht(a) => {
                out.push("ht".into());
                out.push(a.input.display().to_string());
                a.grid.push_args(&mut out);
                out.extend([
                    "--resolution".into(),
                    a.resolution.to_string(),
                    "--output".into(),
                    a.output.clone(),
                ]);
            }
            Command::Featurize(a) => {
                out.push("featurize".into());
                out.push(a.input.display().to_string());
                a.builder.push_args(&mut out);
                out.extend(["--descriptor".into(), value_name(&a.descriptor)]);
                a.ecp_grid.push_args(&mut out);
                a.ht_grid.push_args(&mut out);
                out.extend([
                    "--resolution".into(),
                    a.resolution.to_string(),
                    "--output".into(),
                    a.output.clone(),
                ]);
            }
            Command::Distance(a) => {
                out.push("distance".into());
                out.push(a.first.display().to_string());
                out.push(a.second.display().to_string());
                out.extend(["--metric".into(), a.metric.to_string()]);
            }
            Command::Sample(a) => {
                out.push("sample".into());
                out.extend([
                    "--generator".into(),
                    value_name(&a.generator),
                    "--seed".into(),
                    a.seed.to_string(),
                ]);
                push_opt(&mut out, "--n", &a.n);
                push_opt(&mut out, "--rho", &a.rho);
                push_opt(&mut out, "--intensity", &a.intensity);
                out.extend(["--side".into(), a.side.to_string()]);
                out.extend(["--dim".into(), a.dim.to_string()]);
                if a.uniform {
                    out.push("--uniform".into());
                }
                out.extend([
                    "--n-noise".into(),
                    a.n_noise.to_string(),
                    "--n-line".into(),
                    a.n_line.to_string(),
                    "--lines".into(),
                    a.lines.to_string(),
                    "--jitter".into(),
                    a.jitter.to_string(),
                    "--output".into(),
                    a.output.clone(),
                ]);
            }
        }
        out
    }

    /// The configuration as pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
