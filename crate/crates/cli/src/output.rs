use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use dioph_core::covering::{CoveringParams, REGION_C};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Format, OutputArgs};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Constants of the covering argument in force for a run.
#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub r: f64,
    pub a: f64,
    #[serde(rename = "ln_A")]
    pub ln_a: f64,
    /// `null` when `A` overflows f64.
    #[serde(rename = "A")]
    pub big_a: Option<f64>,
    #[serde(rename = "ln_B")]
    pub ln_b: f64,
    #[serde(rename = "B")]
    pub big_b: Option<f64>,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub region_c: f64,
}

impl Constants {
    pub fn from_params(p: &CoveringParams) -> Self {
        let finite = |ln: f64| Some(ln.exp()).filter(|v| v.is_finite());
        Constants {
            r: p.r,
            a: p.a,
            ln_a: p.base_a.ln,
            big_a: finite(p.base_a.ln),
            ln_b: p.base_b.ln,
            big_b: finite(p.base_b.ln),
            c_r: p.c_r,
            c: p.c_inclusion,
            big_c: p.big_c,
            region_c: REGION_C,
        }
    }

    pub fn defaults() -> Self {
        Self::from_params(&CoveringParams::defaults(dioph_core::covering::DEFAULT_R).expect("default r is valid"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputSpec {
    pub format: Format,
    pub path: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub parameters: Value,
    pub seed: u64,
    pub output: OutputSpec,
    pub constants: Constants,
}

impl RunConfig {
    pub fn new(
        command: &'static str,
        parameters: &impl Serialize,
        seed: u64,
        out: &OutputArgs,
        constants: Constants,
    ) -> Result<Self> {
        Ok(RunConfig {
            command,
            parameters: serde_json::to_value(parameters)?,
            seed,
            output: OutputSpec {
                format: out.format(),
                path: out.out.as_ref().map(|p| p.display().to_string()),
            },
            constants,
        })
    }

    pub fn require(&self, allowed: &[Format]) -> Result<()> {
        if !allowed.contains(&self.output.format) {
            let names: Vec<String> = allowed.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
            bail!(
                "--format: `{}` does not support {:?}; choose one of {}",
                self.command,
                self.output.format,
                names.join(", ")
            );
        }
        Ok(())
    }

    /// `# key=value` lines: version, command, seed, parameters, constants.
    fn header_lines(&self) -> Result<Vec<String>> {
        let mut lines = vec![
            format!("# version={VERSION}"),
            format!("# command={}", self.command),
            format!("# seed={}", self.seed),
        ];
        if let Value::Object(m) = &self.parameters {
            for (k, v) in m {
                lines.push(format!("# {k}={}", scalar_text(v)));
            }
        }
        if let Value::Object(m) = serde_json::to_value(&self.constants)? {
            for (k, v) in m {
                lines.push(format!("# const.{k}={}", scalar_text(&v)));
            }
        }
        Ok(lines)
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    config: &'a RunConfig,
    version: &'static str,
    results: R,
}

pub fn json_document(cfg: &RunConfig, results: impl Serialize) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Envelope {
        config: cfg,
        version: VERSION,
        results,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Header object on the first line, then one record per line.
pub fn jsonl_document<R: Serialize>(cfg: &RunConfig, summary: impl Serialize, records: &[R]) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec(&Envelope {
        config: cfg,
        version: VERSION,
        results: summary,
    })?;
    bytes.push(b'\n');
    for r in records {
        serde_json::to_writer(&mut bytes, r)?;
        bytes.push(b'\n');
    }
    Ok(bytes)
}

pub fn csv_document(cfg: &RunConfig, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    for line in cfg.header_lines()? {
        bytes.extend_from_slice(line.as_bytes());
        bytes.push(b'\n');
    }
    let mut w = csv::Writer::from_writer(bytes);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
}

pub fn emit(out: &OutputArgs, bytes: &[u8]) -> Result<()> {
    match &out.out {
        Some(path) => write_file(path, bytes),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("--out: cannot write {}", path.display()))
}
