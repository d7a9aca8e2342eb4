use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dioph_core::group::parse_decimal;
use dioph_core::{Complex64, GaussianRational};
use serde::{Serialize, Serializer};

#[derive(Parser, Debug)]
#[command(
    name = "dioph",
    version,
    about = "Diophantine properties of the affine group generated by x and a unit translation"
)]
pub struct Cli {
    /// Seed for every randomised step (root-finder starting points).
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate the word ball W_l and report d_l at x.
    Ball(BallArgs),
    /// Table of d_l and the exponents beta_l for l = 1..lmax.
    Beta(BetaArgs),
    /// Enumerate or count the polynomial family P_l.
    Family(FamilyArgs),
    /// Large-root and Mahler checks over P_l.
    Jensen(JensenArgs),
    /// Classify P_l by disk-coverability of sublevel sets.
    Cover(CoverArgs),
    /// Tail of the Hausdorff-measure series.
    Tail(TailArgs),
    /// Scan d_l over a rectangle of parameters.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Jsonl,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Shorthand for --format json.
    #[arg(long, conflicts_with_all = ["format", "csv", "jsonl"])]
    pub json: bool,
    /// Shorthand for --format csv.
    #[arg(long, conflicts_with_all = ["format", "jsonl"])]
    pub csv: bool,
    /// Shorthand for --format jsonl.
    #[arg(long, conflicts_with = "format")]
    pub jsonl: bool,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    pub fn format(&self) -> Format {
        match (self.format, self.csv, self.jsonl) {
            (Some(f), _, _) => f,
            (None, true, _) => Format::Csv,
            (None, _, true) => Format::Jsonl,
            _ => Format::Json,
        }
    }
}

/// A complex parameter given as `RE,IM` (or `RE`), kept both as the f64
/// pair and as the exact decimal value.
#[derive(Clone, Debug)]
pub struct Point {
    pub text: String,
    pub value: Complex64,
    pub exact: GaussianRational,
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

pub fn parse_point(s: &str) -> Result<Point, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let part = |t: &str| -> Result<(f64, _), String> {
        let f: f64 = t
            .trim()
            .parse()
            .map_err(|_| format!("`{t}` is not a number (expected RE,IM)"))?;
        let q = parse_decimal(t).map_err(|e| e.to_string())?;
        Ok((f, q))
    };
    let (rf, rq) = part(re)?;
    let (imf, iq) = part(im)?;
    Ok(Point {
        text: s.to_string(),
        value: Complex64::new(rf, imf),
        exact: num_complex::Complex::new(rq, iq),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

pub fn parse_rect(s: &str) -> Result<Rect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x0, y0, x1, y1] if x0 < x1 && y0 <= y1 => Ok(Rect { x0, y0, x1, y1 }),
        [_, _, _, _] => Err("need x0 < x1 and y0 <= y1".into()),
        _ => Err("expected four numbers x0,y0,x1,y1".into()),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct List(pub Vec<f64>);

pub fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_open_unit(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if r > 0.0 && r < 1.0 {
        Ok(r)
    } else {
        Err(format!("must lie in (0, 1), got {r}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite and positive, got {v}"))
    }
}

fn parse_base(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 1.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite and > 1, got {v}"))
    }
}

#[derive(Args, Debug, Serialize)]
pub struct BallArgs {
    /// Word length.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=14))]
    pub l: u32,
    /// Parameter x as RE,IM with |x| > 1.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub x: Point,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct BetaArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=14))]
    pub lmax: u32,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub x: Point,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FamilyArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
    pub l: u32,
    /// Print counts and bounds only.
    #[arg(long)]
    pub count_only: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct JensenArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5), default_value_t = 3)]
    pub l: u32,
    /// Roots beyond 1 + r/2 count as large.
    #[arg(long, value_parser = parse_positive, default_value_t = 0.5)]
    pub r: f64,
    /// Constant in `#large roots <= C_r (log max|a_i| + 1)`; theoretical value when omitted.
    #[arg(long = "c-r", value_parser = parse_positive)]
    pub c_r: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CoverArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6))]
    pub l: u32,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, value_parser = parse_open_unit, default_value_t = 0.5)]
    pub r: f64,
    /// Disk radius exponent: disks of radius 2^(-a l/k).
    #[arg(long, value_parser = parse_base, default_value_t = 4.0)]
    pub a: f64,
    /// Sublevel base A; derived from B when omitted.
    #[arg(long = "A", value_parser = parse_base, conflicts_with = "ln_a")]
    pub big_a: Option<f64>,
    /// Natural log of A, for values beyond f64 range.
    #[arg(long = "ln-A", value_parser = parse_positive)]
    pub ln_a: Option<f64>,
    /// Region-smallness base B; default (2/r)^4 e^(20 C_r).
    #[arg(long = "B", value_parser = parse_base, conflicts_with = "ln_b")]
    pub big_b: Option<f64>,
    #[arg(long = "ln-B", value_parser = parse_positive)]
    pub ln_b: Option<f64>,
    /// Lattice step for sublevel sets; a quarter of the disk radius when omitted.
    #[arg(long, value_parser = parse_positive)]
    pub resolution: Option<f64>,
    /// Also check coefficient separation inside each region class.
    #[arg(long)]
    pub separation: bool,
    /// Polar samples per side when testing region smallness.
    #[arg(long, default_value_t = 6)]
    pub samples: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct TailArgs {
    #[arg(long, value_parser = parse_positive)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_positive)]
    pub a: f64,
    /// First l of the tail.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Last l summed term by term; the rest is bounded in closed form.
    #[arg(long)]
    pub lmax: u32,
    /// Constant in the count bound C 100^(l/(k+1)).
    #[arg(long = "C", value_parser = parse_positive, default_value_t = 64.0)]
    pub big_c: f64,
    /// Allow 2^(alpha a) <= 100 (the remainder is then infinite).
    #[arg(long)]
    pub uncertified: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Parameter rectangle x0,y0,x1,y1.
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    pub rect: Rect,
    #[arg(long, value_parser = parse_positive)]
    pub step: f64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
    pub l: u32,
    /// Base of the inequality d_l >= A^(-l).
    #[arg(long = "A", value_parser = parse_base)]
    pub big_a: f64,
    /// Margin thresholds for box counting (JSON output only).
    #[arg(long, value_parser = parse_list)]
    pub thresholds: Option<List>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}
