//! CSV ingestion, result serialization, run manifests, and configuration
//! files for the command-line tools.
//!
//! All CSV output is comma-separated UTF-8 with a header row and LF line
//! endings; floating-point values carry 17 significant digits so a
//! write/read round trip reproduces every f64 bit-exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{ExperimentConfig, GenModel, RejectionTable, SampleStatistic};
use crate::processes::{CoeffKind, ErrorSpec, MemoryKind, ProcessConfig, SeriesPair};
use crate::stat_tests::TestOutcome;

/// Serialize an f64 with 17 significant digits (lossless round trip).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A user-supplied dataset of (index, x, y) rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub index: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Read a dataset CSV: header row required, then rows of
/// `(index, x, y)` decimal text with strictly increasing index and no
/// missing values. Optional natural-log transforms are applied on ingest.
pub fn read_dataset(path: &Path, log_x: bool, log_y: bool) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut index = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 3 {
            return Err(Error::Data(format!(
                "{}: row {} has {} fields, need (index, x, y)",
                path.display(),
                line + 2,
                record.len()
            )));
        }
        let parse = |field: &str, name: &str| -> Result<f64> {
            if field.is_empty() {
                return Err(Error::Data(format!(
                    "{}: missing {name} value in row {}",
                    path.display(),
                    line + 2
                )));
            }
            field.parse::<f64>().map_err(|_| {
                Error::Data(format!(
                    "{}: cannot parse {name}='{field}' in row {}",
                    path.display(),
                    line + 2
                ))
            })
        };
        let idx = parse(&record[0], "index")?;
        let xv = parse(&record[1], "x")?;
        let yv = parse(&record[2], "y")?;
        if !idx.is_finite() || !xv.is_finite() || !yv.is_finite() {
            return Err(Error::Data(format!(
                "{}: non-finite value in row {}",
                path.display(),
                line + 2
            )));
        }
        if let Some(&prev) = index.last() {
            if idx <= prev {
                return Err(Error::Data(format!(
                    "{}: index must be strictly increasing (row {})",
                    path.display(),
                    line + 2
                )));
            }
        }
        index.push(idx);
        x.push(if log_x { xv.ln() } else { xv });
        y.push(if log_y { yv.ln() } else { yv });
    }
    if x.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    if (log_x && x.iter().any(|v| !v.is_finite())) || (log_y && y.iter().any(|v| !v.is_finite())) {
        return Err(Error::Data(format!(
            "{}: log transform of a non-positive value",
            path.display()
        )));
    }
    Ok(Dataset { index, x, y })
}

/// Write a simulated series as `k,x,y,u` rows.
pub fn write_series_csv(path: &Path, series: &SeriesPair) -> Result<()> {
    let mut out = String::from("k,x,y,u\n");
    let zeros;
    let u = match &series.u {
        Some(u) => u,
        None => {
            zeros = vec![0.0; series.len()];
            &zeros
        }
    };
    for k in 0..series.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            k + 1,
            fmt_f64(series.x[k]),
            fmt_f64(series.y[k]),
            fmt_f64(u[k])
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read back a series written by [`write_series_csv`].
pub fn read_series_csv(path: &Path) -> Result<SeriesPair> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut u = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 4 {
            return Err(Error::Data(format!(
                "{}: series rows need (k, x, y, u)",
                path.display()
            )));
        }
        let f = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::Data(format!("{}: bad float '{s}'", path.display())))
        };
        x.push(f(&record[1])?);
        y.push(f(&record[2])?);
        u.push(f(&record[3])?);
    }
    Ok(SeriesPair { x, y, u: Some(u) })
}

/// Everything needed to reproduce a command run bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    pub created_utc: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            created_utc: chrono::Utc::now().to_rfc3339(),
        }
    }

    /// Write next to an output file as `<output>.manifest.json`.
    pub fn write_for(&self, output: &Path) -> Result<()> {
        let mut path = output.as_os_str().to_owned();
        path.push(".manifest.json");
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Data(format!("manifest serialization: {e}")))?;
        fs::write(Path::new(&path), body)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let body = fs::read_to_string(path)?;
        serde_json::from_str(&body).map_err(|e| Error::Data(format!("manifest parse: {e}")))
    }
}

/// `simulate` configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub process: ProcessSection,
    pub model: ModelSection,
}

/// `[process]` section of a simulate config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    pub memory: MemoryKind,
    pub d: f64,
    #[serde(default)]
    pub lambda: f64,
    pub r: f64,
    pub sigma: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default)]
    pub coeffs: CoeffKind,
    pub seed: u64,
    pub errors: ErrorSpec,
}

fn default_trunc() -> usize {
    1000
}

fn default_n() -> usize {
    500
}

impl ProcessSection {
    pub fn to_config(&self, seed_override: Option<u64>) -> ProcessConfig {
        ProcessConfig {
            kind: self.memory,
            d: self.d,
            lambda: self.lambda,
            r: self.r,
            error_spec: self.errors,
            sigma: self.sigma,
            n: self.n,
            trunc: self.trunc,
            coeffs: self.coeffs,
            seed: seed_override.unwrap_or(self.seed),
        }
    }
}

/// `[model]` section of a simulate config: a generating-model id plus its
/// trend parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    #[serde(flatten)]
    pub gen: GenModel,
    #[serde(default)]
    pub theta: Vec<f64>,
}

pub fn read_simulate_config(path: &Path) -> Result<SimulateConfig> {
    let body = fs::read_to_string(path)?;
    toml::from_str(&body).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// `mc` suite configuration file: a list of `[[cell]]` tables and optional
/// `[[dump]]` tables for raw statistic samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub cell: Vec<ExperimentConfig>,
    #[serde(default)]
    pub dump: Vec<DumpConfig>,
}

/// A raw statistic-sample dump request inside an `mc` suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpConfig {
    pub label: String,
    pub stat: SampleStatistic,
    pub process: crate::montecarlo::ProcessTemplate,
    pub gen_model: GenModel,
    #[serde(default)]
    pub gen_theta: Vec<f64>,
    pub hypothesis: crate::models::ModelFamily,
    pub reps: usize,
    pub base_seed: u64,
}

pub fn read_suite_config(path: &Path) -> Result<SuiteConfig> {
    let body = fs::read_to_string(path)?;
    toml::from_str(&body).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Write a p-value-versus-block-size curve; failed blocks leave the p-value
/// field empty (a gap).
pub fn write_curve_csv(path: &Path, curve: &[(usize, Option<f64>)]) -> Result<()> {
    let mut out = String::from("b,pvalue\n");
    for (b, p) in curve {
        match p {
            Some(p) => out.push_str(&format!("{b},{}\n", fmt_f64(*p))),
            None => out.push_str(&format!("{b},\n")),
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write a bandwidth-selection curve as `(h, score, excluded)` rows.
pub fn write_bandwidth_curve_csv(path: &Path, curve: &[(f64, f64, usize)]) -> Result<()> {
    let mut out = String::from("h,lcv,excluded\n");
    for (h, score, excluded) in curve {
        out.push_str(&format!("{},{},{excluded}\n", fmt_f64(*h), fmt_f64(*score)));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write a rejection table as CSV (header row always present).
pub fn write_rejection_csv(path: &Path, table: &RejectionTable) -> Result<()> {
    let mut out = String::from("label,test,memory,d,r,column,rate,attempted,failed\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.label,
            row.test,
            match row.memory {
                MemoryKind::Lm => "lm",
                MemoryKind::Slm => "slm",
            },
            row.d,
            row.r,
            row.column,
            fmt_f64(row.rate),
            row.attempted,
            row.failed
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write statistic samples as `(label, rep, value)` rows.
pub fn write_samples_csv(path: &Path, blocks: &[(String, Vec<f64>)]) -> Result<()> {
    let mut out = String::from("label,rep,value\n");
    for (label, values) in blocks {
        for (rep, v) in values.iter().enumerate() {
            out.push_str(&format!("{label},{rep},{}\n", fmt_f64(*v)));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Append test outcomes as JSON lines.
pub fn write_jsonl(path: &Path, outcomes: &[TestOutcome]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for outcome in outcomes {
        let line = serde_json::to_string(outcome)
            .map_err(|e| Error::Data(format!("outcome serialization: {e}")))?;
        writeln!(file, "{line}")?;
    }
    Ok(())
}
