//! Command-line front end. Every report embeds a [`RunManifest`] and is a
//! pure function of the input files and the arguments.
//!
//! Exit codes: 0 for a positive outcome (shadowed, property holds,
//! expansive, lift within bounds), 2 for a negative one, 1 for errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::expansive::{
    certify_expansive, check_expansive_lift, max_certified_delta, quantize_with_grid, ExpansiveVerdict,
    GRID_CAVEAT,
};
use crate::lifting::{
    lift_inv, lift_pseudo_orbit, shadow_in_shift, shadow_inverse, transfer_shadowing_down, Invertible,
    LiftReport,
};
use crate::orbits::{generate_pseudo_orbit, max_slack, TruncatedOrbitPoint, DEFAULT_DEPTH};
use crate::shadowing::{
    decide_finite_shadowing, decide_shadowing_property, delta_star, nstep_criterion, PropertyLimits, Verdict,
};
use crate::space::{rational_from_f64, FiniteSet, FiniteSpace, IntervalSpace, Rational, TOL};
use crate::svmap::{
    example_3_11, identity_fn, symmetrize, tent_family, Affine, Branch, Exception, PiecewiseMap, Relation,
};

/// Significant digits of every float in JSON and CSV output.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "svdyn", version, about = "Set-valued dynamics: shadowing, lifting and expansiveness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Semicontinuity, openness and surjectivity report.
    Check {
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide ε-shadowing of one pseudo-orbit, or of all δ-pseudo-orbits
    /// with `--property`.
    Shadow {
        system: PathBuf,
        #[command(flatten)]
        input: PointsArgs,
        #[arg(long)]
        eps: f64,
        /// Decide the shadowing property at `--delta` instead of one input.
        #[arg(long, requires = "delta")]
        property: bool,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = PropertyLimits::default().max_points)]
        max_points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// δ(ε) table as CSV.
    Scan {
        system: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        eps_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', conflicts_with = "delta_star")]
        delta_grid: Vec<f64>,
        #[arg(long)]
        delta_star: bool,
        #[arg(long, default_value_t = PropertyLimits::default().max_points)]
        max_points: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Lift a pseudo-orbit to an orbit space or shadow it through the inverse.
    Lift {
        system: PathBuf,
        #[command(flatten)]
        input: PointsArgs,
        #[arg(long, value_enum)]
        mode: LiftMode,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Certify an expansive constant and sample the shift-level check.
    Expansive {
        system: PathBuf,
        #[arg(long)]
        delta: f64,
        /// Number of sampled orbit pairs for the shift-level check.
        #[arg(long, default_value_t = 0, requires = "seed")]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Write the grid relation of an interval system as a system file.
    Quantize {
        system: PathBuf,
        #[arg(long)]
        h: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a seeded δ-pseudo-orbit.
    Gen {
        system: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LiftMode {
    Shift,
    Inv,
    InverseShadow,
    Nstep,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Timestamp recorded in the manifest; absent means `null`.
    #[arg(long)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    /// Comma-separated points: labels or ids on finite carriers, numbers on
    /// interval carriers.
    #[arg(long, conflicts_with_all = ["orbit", "gen_delta"])]
    pub points: Option<String>,
    /// JSON file holding an array of points or an object with `points`.
    #[arg(long, conflicts_with = "gen_delta")]
    pub orbit: Option<PathBuf>,
    /// Generate the input as a δ-pseudo-orbit with this slack.
    #[arg(long, requires_all = ["len", "seed"])]
    pub gen_delta: Option<f64>,
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Provenance embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub depth: Option<usize>,
    pub timestamp: Option<String>,
    pub input_digests: Vec<InputDigest>,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// A number given either as a JSON number or as a string such as `"1/3"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn rational(&self) -> Result<Rational> {
        match self {
            Number::Float(x) => rational_from_f64(*x),
            Number::Text(s) => s
                .trim()
                .parse::<Rational>()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}"))),
        }
    }
}

/// Carrier description of a system file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSpec {
    /// Labeled points on the real line.
    Line { labels: Vec<String>, positions: Vec<Number> },
    /// Labeled points with an explicit distance table.
    Table { labels: Vec<String>, distances: Vec<Vec<Number>> },
    /// A union of closed intervals.
    Components { components: Vec<(f64, f64)> },
    Interval { interval: (f64, f64) },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub lo: f64,
    pub hi: f64,
    /// Affine pieces `(slope, intercept)`.
    pub pieces: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionSpec {
    pub x: f64,
    pub image: Vec<f64>,
}

/// Map description of a system file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    /// Image labels of each point, in the order of the space labels.
    Images { images: Vec<Vec<String>> },
    Piecewise {
        branches: Vec<BranchSpec>,
        #[serde(default)]
        exceptions: Vec<ExceptionSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresetSpec {
    Name(String),
    Params { preset: String, c: Option<f64> },
}

/// JSON system description: an explicit space and map, or a preset, with
/// optional grid quantization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Replace the interval system by its grid relation at this resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantize: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<Value>,
}

/// A loaded system.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Finite(Relation),
    Interval(PiecewiseMap),
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<SystemFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(&self) -> Result<Loaded> {
        let base = match (&self.preset, &self.space, &self.map) {
            (Some(p), None, None) => {
                let (name, c) = match p {
                    PresetSpec::Name(n) => (n.as_str(), self.c),
                    PresetSpec::Params { preset, c } => (preset.as_str(), c.or(self.c)),
                };
                preset(name, c)?
            }
            (None, Some(space), Some(map)) => build(space, map)?,
            _ => {
                return Err(Error::Parse(
                    "a system file needs either `preset` or both `space` and `map`".into(),
                ))
            }
        };
        match (self.quantize, base) {
            (None, loaded) => Ok(loaded),
            (Some(h), Loaded::Interval(p)) => Ok(Loaded::Finite(quantize_with_grid(&p, h)?.1)),
            (Some(_), Loaded::Finite(_)) => Err(Error::Domain("only interval systems can be quantized".into())),
        }
    }
}

fn preset(name: &str, c: Option<f64>) -> Result<Loaded> {
    let need_c = || c.ok_or_else(|| Error::Parse(format!("preset {name:?} needs a parameter `c`")));
    let no_c = || match c {
        Some(_) => Err(Error::Parse(format!("preset {name:?} takes no parameter `c`"))),
        None => Ok(()),
    };
    Ok(match name {
        "example_3_11" => {
            no_c()?;
            Loaded::Interval(example_3_11())
        }
        "symmetrized_tent" => Loaded::Interval(symmetrize(&tent_family(need_c()?)?)?),
        "tent" => Loaded::Interval(tent_family(need_c()?)?.into_map()),
        "identity" => {
            no_c()?;
            Loaded::Interval(identity_fn(0.0, 1.0)?.into_map())
        }
        "finite_line" => {
            no_c()?;
            let s = FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1)])?;
            Loaded::Finite(Relation::from_fn(s, &[1, 2, 2])?)
        }
        "three_cycle" => {
            no_c()?;
            let s = FiniteSpace::on_line(&[Rational::new(0, 1), Rational::new(1, 2), Rational::new(1, 1)])?;
            Loaded::Finite(Relation::from_fn(s, &[1, 2, 0])?)
        }
        other => return Err(Error::Parse(format!("unknown preset {other:?}"))),
    })
}

fn build(space: &SpaceSpec, map: &MapSpec) -> Result<Loaded> {
    match (space, map) {
        (SpaceSpec::Line { labels, positions }, MapSpec::Images { images }) => {
            let pos = positions.iter().map(Number::rational).collect::<Result<Vec<_>>>()?;
            relation(FiniteSpace::on_line_labeled(labels.clone(), &pos)?, images)
        }
        (SpaceSpec::Table { labels, distances }, MapSpec::Images { images }) => {
            let table = distances
                .iter()
                .map(|row| row.iter().map(Number::rational).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            relation(FiniteSpace::new(labels.clone(), table)?, images)
        }
        (SpaceSpec::Components { components }, MapSpec::Piecewise { branches, exceptions }) => {
            piecewise(IntervalSpace::new(components.clone())?, branches, exceptions)
        }
        (SpaceSpec::Interval { interval }, MapSpec::Piecewise { branches, exceptions }) => {
            piecewise(IntervalSpace::interval(interval.0, interval.1)?, branches, exceptions)
        }
        _ => Err(Error::Parse("finite spaces need `images`, interval spaces need `branches`".into())),
    }
}

fn relation(space: FiniteSpace, images: &[Vec<String>]) -> Result<Loaded> {
    let sets = images
        .iter()
        .map(|img| img.iter().map(|l| space.index_of(l)).collect::<Result<FiniteSet>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Loaded::Finite(Relation::new(space, sets)?))
}

fn piecewise(space: IntervalSpace, branches: &[BranchSpec], exceptions: &[ExceptionSpec]) -> Result<Loaded> {
    let branches = branches
        .iter()
        .map(|b| Branch::new(b.lo, b.hi, b.pieces.iter().map(|&(a, c)| Affine::new(a, c)).collect()))
        .collect();
    let exceptions = exceptions.iter().map(|e| Exception::new(e.x, e.image.clone())).collect();
    Ok(Loaded::Interval(PiecewiseMap::new(space, branches, exceptions)?))
}

/// Point conversion between JSON and a system's point type.
pub trait CliSystem: Invertible {
    fn point_json(&self, p: Self::Point) -> Value;
    fn parse_point(&self, v: &Value) -> Result<Self::Point>;
    fn parse_token(&self, s: &str) -> Result<Self::Point>;
    fn as_relation(&self) -> Option<&Relation>;

    fn points_json(&self, pts: &[Self::Point]) -> Value {
        Value::Array(pts.iter().map(|&p| self.point_json(p)).collect())
    }
}

impl CliSystem for Relation {
    fn point_json(&self, p: usize) -> Value {
        Value::String(self.space().label(p).to_string())
    }

    fn parse_point(&self, v: &Value) -> Result<usize> {
        match v {
            Value::String(s) => self.space().index_of(s),
            Value::Number(n) => {
                let id = n.as_u64().ok_or_else(|| Error::Parse(format!("bad point id {n}")))? as usize;
                self.space().check(id)?;
                Ok(id)
            }
            other => Err(Error::Parse(format!("bad point {other}"))),
        }
    }

    fn parse_token(&self, s: &str) -> Result<usize> {
        let s = s.trim();
        self.space().index_of(s).or_else(|e| match s.parse::<usize>() {
            Ok(id) => self.space().check(id).map(|_| id),
            Err(_) => Err(e),
        })
    }

    fn as_relation(&self) -> Option<&Relation> {
        Some(self)
    }
}

impl CliSystem for PiecewiseMap {
    fn point_json(&self, p: f64) -> Value {
        json!(p)
    }

    fn parse_point(&self, v: &Value) -> Result<f64> {
        let x = v.as_f64().ok_or_else(|| Error::Parse(format!("bad point {v}")))?;
        self.space().check(x)?;
        Ok(x)
    }

    fn parse_token(&self, s: &str) -> Result<f64> {
        let x: f64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad point {s:?}")))?;
        self.space().check(x)?;
        Ok(x)
    }

    fn as_relation(&self) -> Option<&Relation> {
        None
    }
}

/// Result of one CLI invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Caps the global thread pool at `SVDYN_THREADS` when it is set.
pub fn configure_threads() {
    if let Some(n) = std::env::var("SVDYN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the CLI on `args` (without the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(std::iter::once("svdyn".into()).chain(args.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let arguments = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli.command, arguments) {
        Ok((code, text, out)) => match out {
            Some(path) => match std::fs::write(&path, &text) {
                Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
                Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
            },
            None => Outcome { code, stdout: text, stderr: String::new() },
        },
        Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

type Executed = (i32, String, Option<PathBuf>);

struct Ctx {
    manifest: RunManifest,
}

impl Ctx {
    fn new(command: &str, arguments: Vec<String>, common: &Common) -> Self {
        Ctx {
            manifest: RunManifest {
                command: command.to_string(),
                arguments,
                seed: None,
                tolerance: TOL,
                depth: None,
                timestamp: common.timestamp.clone(),
                input_digests: Vec::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
        }
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.manifest.input_digests.push(InputDigest {
            path: path.display().to_string(),
            sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
        });
        String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn system(&mut self, path: &Path) -> Result<Loaded> {
        let text = self.read(path)?;
        SystemFile::parse(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            .load()
    }

    fn document(&self, body: Value) -> String {
        let mut doc = json!({ "manifest": &self.manifest });
        if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
            d.extend(b);
        }
        let mut text = serde_json::to_string_pretty(&round_floats(doc)).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

fn execute(command: &Command, arguments: Vec<String>) -> Result<Executed> {
    match command {
        Command::Check { system, common } => {
            let mut ctx = Ctx::new("check", arguments, common);
            let report = match ctx.system(system)? {
                Loaded::Finite(r) => crate::svmap::SetValuedMap::Relation(r).properties(),
                Loaded::Interval(p) => p.properties(),
            };
            Ok((0, ctx.document(json!({ "report": report })), common.out.clone()))
        }
        Command::Gen { system, delta, len, seed, common } => {
            let mut ctx = Ctx::new("gen", arguments, common);
            ctx.manifest.seed = Some(*seed);
            let body = match ctx.system(system)? {
                Loaded::Finite(r) => gen_body(&r, *delta, *len, *seed)?,
                Loaded::Interval(p) => gen_body(&p, *delta, *len, *seed)?,
            };
            Ok((0, ctx.document(body), common.out.clone()))
        }
        Command::Shadow { system, input, eps, property, delta, max_points, common } => {
            let mut ctx = Ctx::new("shadow", arguments, common);
            ctx.manifest.seed = input.seed;
            let loaded = ctx.system(system)?;
            let (code, body) = if *property {
                let Loaded::Finite(r) = &loaded else {
                    return Err(Error::Unsupported("the shadowing property is decided on finite systems".into()));
                };
                let limits = PropertyLimits { max_points: *max_points, ..PropertyLimits::default() };
                let rep = decide_shadowing_property(r, *eps, delta.expect("clap requires delta"), limits)?;
                (exit_for(rep.verdict.is_positive()), shadow_body(r, None, &rep))
            } else {
                match &loaded {
                    Loaded::Finite(r) => shadow_one(&mut ctx, r, input, *eps)?,
                    Loaded::Interval(p) => shadow_one(&mut ctx, p, input, *eps)?,
                }
            };
            Ok((code, ctx.document(body), common.out.clone()))
        }
        Command::Scan { system, eps_grid, delta_grid, delta_star: star, max_points, common } => {
            let mut ctx = Ctx::new("scan", arguments, common);
            let Loaded::Finite(r) = ctx.system(system)? else {
                return Err(Error::Unsupported("scan needs a finite or quantized system".into()));
            };
            if !*star && delta_grid.is_empty() {
                return Err(Error::Domain("scan needs --delta-grid or --delta-star".into()));
            }
            let limits = PropertyLimits { max_points: *max_points, ..PropertyLimits::default() };
            Ok((0, scan_csv(&ctx.manifest, &r, eps_grid, delta_grid, *star, limits), common.out.clone()))
        }
        Command::Lift { system, input, mode, delta, eps, depth, common } => {
            let mut ctx = Ctx::new("lift", arguments, common);
            ctx.manifest.seed = input.seed;
            ctx.manifest.depth = *depth;
            let loaded = ctx.system(system)?;
            let args = LiftArgs { mode: *mode, delta: *delta, eps: *eps, depth: *depth };
            let (code, body) = match &loaded {
                Loaded::Finite(r) => lift_cmd(&mut ctx, r, input, args)?,
                Loaded::Interval(p) => lift_cmd(&mut ctx, p, input, args)?,
            };
            Ok((code, ctx.document(body), common.out.clone()))
        }
        Command::Expansive { system, delta, samples, seed, depth, common } => {
            let mut ctx = Ctx::new("expansive", arguments, common);
            ctx.manifest.seed = *seed;
            ctx.manifest.depth = Some(*depth);
            let text = ctx.read(system)?;
            let file = SystemFile::parse(&text)?;
            let Loaded::Finite(r) = file.load()? else {
                return Err(Error::Unsupported(
                    "expansiveness is certified on finite systems; quantize interval systems first".into(),
                ));
            };
            let mut cert = certify_expansive(&r, *delta)?;
            if file.quantize.is_some() || file.manifest.as_ref().is_some_and(|m| m["command"] == "quantize") {
                cert.caveat = Some(GRID_CAVEAT.to_string());
            }
            let lift = if *samples > 0 {
                Some(check_expansive_lift(&r, *delta, *samples, *depth, seed.expect("clap requires seed"))?)
            } else {
                None
            };
            let code = exit_for(cert.verdict == ExpansiveVerdict::Expansive);
            let witness = cert.witness_pair.as_ref().map(|w| {
                json!({
                    "x": r.points_json(&w.x),
                    "y": r.points_json(&w.y),
                    "distances": w.distances,
                    "cycle_start": w.cycle_start,
                })
            });
            let body = json!({
                "certificate": {
                    "delta": cert.delta,
                    "verdict": cert.verdict,
                    "witness_pair": witness,
                    "product_nodes": cert.product_nodes,
                    "surviving_nodes": cert.surviving_nodes,
                    "caveat": cert.caveat,
                },
                "max_certified_delta": max_certified_delta(&r)?,
                "lift_check": lift,
            });
            Ok((code, ctx.document(body), common.out.clone()))
        }
        Command::Quantize { system, h, common } => {
            let mut ctx = Ctx::new("quantize", arguments, common);
            let text = ctx.read(system)?;
            let mut file = SystemFile::parse(&text)?;
            if file.quantize.take().is_some() {
                return Err(Error::Domain("the system is already quantized".into()));
            }
            let Loaded::Interval(p) = file.load()? else {
                return Err(Error::Domain("only interval systems can be quantized".into()));
            };
            let (positions, r) = quantize_with_grid(&p, *h)?;
            let labels = r.space().labels().to_vec();
            let out = SystemFile {
                space: Some(SpaceSpec::Line {
                    labels: labels.clone(),
                    positions: positions.iter().map(|q| Number::Text(q.to_string())).collect(),
                }),
                map: Some(MapSpec::Images {
                    images: r.images().iter().map(|s| s.iter().map(|y| labels[y].clone()).collect()).collect(),
                }),
                preset: None,
                c: None,
                quantize: None,
                manifest: Some(serde_json::to_value(&ctx.manifest).expect("manifest serializes")),
            };
            let mut text = serde_json::to_string_pretty(&round_floats(serde_json::to_value(&out)?))?;
            text.push('\n');
            Ok((0, text, common.out.clone()))
        }
    }
}

fn exit_for(positive: bool) -> i32 {
    if positive {
        0
    } else {
        2
    }
}

fn gen_body<S: CliSystem>(f: &S, delta: f64, len: usize, seed: u64) -> Result<Value> {
    let p = generate_pseudo_orbit(f, delta, len, seed)?;
    Ok(json!({ "delta": delta, "points": f.points_json(&p.points) }))
}

fn read_points<S: CliSystem>(ctx: &mut Ctx, f: &S, input: &PointsArgs) -> Result<Vec<S::Point>> {
    if let Some(list) = &input.points {
        return list.split(',').map(|t| f.parse_token(t)).collect();
    }
    if let Some(path) = &input.orbit {
        let text = ctx.read(path)?;
        let v: Value = serde_json::from_str(&text)?;
        let arr = match &v {
            Value::Array(a) => a,
            Value::Object(o) => o
                .get("points")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("orbit file needs a `points` array".into()))?,
            _ => return Err(Error::Parse("orbit file must hold an array or an object".into())),
        };
        return arr.iter().map(|p| f.parse_point(p)).collect();
    }
    if let Some(delta) = input.gen_delta {
        let len = input.len.expect("clap requires len");
        let seed = input.seed.expect("clap requires seed");
        return Ok(generate_pseudo_orbit(f, delta, len, seed)?.points);
    }
    Err(Error::Domain("give the input with --points, --orbit or --gen-delta".into()))
}

fn shadow_body<S: CliSystem>(
    f: &S,
    input: Option<&[S::Point]>,
    rep: &crate::shadowing::ShadowingReport<S::Point>,
) -> Value {
    json!({
        "input": input.map(|p| f.points_json(p)),
        "report": {
            "epsilon": rep.epsilon,
            "delta": rep.delta,
            "verdict": rep.verdict,
            "witness": rep.witness.as_ref().map(|w| f.points_json(w)),
            "counterexample": rep.counterexample.as_ref().map(|w| f.points_json(w)),
            "nodes": rep.nodes,
        }
    })
}

fn shadow_one<S: CliSystem>(ctx: &mut Ctx, f: &S, input: &PointsArgs, eps: f64) -> Result<(i32, Value)> {
    let pts = read_points(ctx, f, input)?;
    let rep = decide_finite_shadowing(f, &pts, eps)?;
    Ok((exit_for(rep.verdict.is_positive()), shadow_body(f, Some(&pts), &rep)))
}

fn scan_csv(
    manifest: &RunManifest,
    f: &Relation,
    eps_grid: &[f64],
    delta_grid: &[f64],
    star: bool,
    limits: PropertyLimits,
) -> String {
    let mut out = format!(
        "# manifest: {}\n",
        serde_json::to_string(&round_floats(serde_json::to_value(manifest).expect("manifest serializes")))
            .expect("manifest serializes")
    );
    if star {
        out.push_str("eps,delta_star\n");
        let rows: Vec<String> = eps_grid
            .par_iter()
            .map(|&e| match delta_star(f, e, limits) {
                Ok(d) => format!("{},{}\n", fmt_float(e), fmt_float(d)),
                Err(err) => format!("{},skipped ({})\n", fmt_float(e), csv_note(&err)),
            })
            .collect();
        out.extend(rows);
    } else {
        out.push_str("eps,delta,verdict\n");
        let cells: Vec<(f64, f64)> = eps_grid.iter().flat_map(|&e| delta_grid.iter().map(move |&d| (e, d))).collect();
        let rows: Vec<String> = cells
            .par_iter()
            .map(|&(e, d)| {
                let verdict = match decide_shadowing_property(f, e, d, limits) {
                    Ok(r) if r.verdict == Verdict::PropertyHolds => "holds".to_string(),
                    Ok(_) => "fails".to_string(),
                    Err(err) => format!("skipped ({})", csv_note(&err)),
                };
                format!("{},{},{}\n", fmt_float(e), fmt_float(d), verdict)
            })
            .collect();
        out.extend(rows);
    }
    out
}

fn csv_note(e: &Error) -> String {
    e.to_string().replace([',', '\n'], ";")
}

#[derive(Clone, Copy)]
struct LiftArgs {
    mode: LiftMode,
    delta: Option<f64>,
    eps: Option<f64>,
    depth: Option<usize>,
}

fn lifted_json<S: CliSystem>(f: &S, pts: &[TruncatedOrbitPoint<S::Point>]) -> Value {
    Value::Array(pts.iter().map(|u| f.points_json(&u.prefix)).collect())
}

fn report_json(r: &LiftReport) -> Value {
    serde_json::to_value(r).expect("lift reports serialize")
}

fn lift_cmd<S: CliSystem>(ctx: &mut Ctx, f: &S, input: &PointsArgs, a: LiftArgs) -> Result<(i32, Value)> {
    let pts = read_points(ctx, f, input)?;
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Error::Domain(format!("mode needs --{name}")));
    let input_json = f.points_json(&pts);
    match a.mode {
        LiftMode::Shift => {
            let delta = need(a.delta, "delta")?;
            let (lifted, report) = lift_pseudo_orbit(f, &pts, delta, a.depth)?;
            let mut code = exit_for(report.satisfied);
            let shadow = match a.eps {
                None => Value::Null,
                Some(eps) => match shadow_in_shift(f, &lifted, eps)? {
                    None => {
                        code = 2;
                        json!({ "epsilon": eps, "verdict": Verdict::NotShadowed })
                    }
                    Some((y, worst)) => {
                        let down = transfer_shadowing_down(f, &y.points, &pts, eps)?;
                        json!({
                            "epsilon": eps,
                            "verdict": Verdict::Shadowed,
                            "max_rho": worst,
                            "shift_witness": f.points_json(&y.points),
                            "base_witness": f.points_json(&down.points),
                            "base_max_distance": down.points.iter().zip(&pts).map(|(&a, &b)| f.dist(a, b)).fold(0.0, f64::max),
                        })
                    }
                },
            };
            Ok((
                code,
                json!({ "mode": "shift", "input": input_json, "lifted": lifted_json(f, &lifted), "report": report_json(&report), "shadow": shadow }),
            ))
        }
        LiftMode::Inv => {
            let delta = need(a.delta, "delta")?;
            let (lifted, report) = lift_inv(f, &pts, delta, a.depth)?;
            Ok((
                exit_for(report.satisfied),
                json!({ "mode": "inv", "input": input_json, "lifted": lifted_json(f, &lifted), "report": report_json(&report) }),
            ))
        }
        LiftMode::InverseShadow => {
            let eps = need(a.eps, "eps")?;
            let delta = match (a.delta, f.as_relation()) {
                (Some(d), _) => d,
                (None, Some(r)) => delta_star(r, eps, PropertyLimits::default())?,
                (None, None) => return Err(Error::Domain("mode needs --delta on interval systems".into())),
            };
            if !(delta > 0.0) {
                return Err(Error::Precondition(format!("no δ witnesses {eps}-shadowing")));
            }
            let rep = shadow_inverse(f, &pts, eps, delta)?;
            Ok((
                exit_for(rep.verdict.is_positive()),
                json!({
                    "mode": "inverse-shadow",
                    "input": input_json,
                    "report": {
                        "epsilon": rep.epsilon,
                        "delta": rep.delta,
                        "delta1": rep.delta1,
                        "verdict": rep.verdict,
                        "witness": rep.witness.as_ref().map(|w| f.points_json(w)),
                        "max_distance": rep.max_distance,
                    }
                }),
            ))
        }
        LiftMode::Nstep => {
            let eps = need(a.eps, "eps")?;
            let depth = a.depth.ok_or_else(|| Error::Domain("mode needs --depth".into()))?;
            let rep = nstep_criterion(f, &pts, eps, depth)?;
            let holds = rep.condition && rep.chain_bounds && rep.variant_a && rep.variant_b && rep.variant_c;
            Ok((
                exit_for(holds),
                json!({
                    "mode": "nstep",
                    "input": input_json,
                    "input_slack": max_slack(f, &pts),
                    "report": {
                        "epsilon": rep.epsilon,
                        "depth": rep.depth,
                        "chain": rep.chain,
                        "chained": f.points_json(&rep.chained),
                        "max_gap": rep.max_gap,
                        "condition": rep.condition,
                        "chain_bounds": rep.chain_bounds,
                        "variant_a": rep.variant_a,
                        "variant_b": rep.variant_b,
                        "variant_c": rep.variant_c,
                    }
                }),
            ))
        }
    }
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest round-trip text of `x` after rounding to 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    let r = round_sig(x);
    if r.is_finite() && r == r.trunc() && r.abs() < 1e15 {
        format!("{r:.1}")
    } else {
        format!("{r}")
    }
}

/// Rounds every non-integer JSON number to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}
