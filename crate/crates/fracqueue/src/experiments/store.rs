//! Append-only experiment store: one self-describing JSON record per line,
//! plus fixed-column CSV summaries for plotting.
//!
//! Records round-trip losslessly: parsing a line into `ExperimentRecord` and
//! re-serializing reproduces the original bytes (field order is fixed by the
//! type, floats print in shortest round-trip form). Timestamps live in a
//! separate `meta` object so determinism checks can ignore them.

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pickands::{ConstantEstimate, EtaSpec, Functional, PickandsLimit};
use crate::storage::TailProbs;

use super::{BrownianRecord, LemmaRecord, PiterbargRecord, SandwichRecord};

pub const SCHEMA_VERSION: u32 = 1;

/// Wall-clock metadata, excluded from determinism comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub timestamp_unix_s: f64,
    pub wall_time_s: f64,
}

impl RunMeta {
    pub fn now(wall_time_s: f64) -> Self {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        RunMeta {
            timestamp_unix_s: ts,
            wall_time_s,
        }
    }
}

/// Ratio summary attached to plain tail runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSet {
    pub ratio_inf: f64,
    pub ratio_inf_stderr: f64,
    pub ratio_sup: f64,
    pub ratio_sup_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailRunRecord {
    pub tails: TailProbs,
    pub ratios: RatioSet,
    /// Asymptotic prediction for P(Q(0) > u) when a Pickands constant was
    /// available for the model.
    pub eq1_prediction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRecord {
    pub eta: EtaSpec,
    pub phi: Functional,
    pub estimate: ConstantEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsLimitRecord {
    pub hurst: f64,
    pub limit: PickandsLimit,
}

/// One persisted experiment result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ExperimentResult {
    TailRun(TailRunRecord),
    PickandsLemma(LemmaRecord),
    StrongPiterbarg(PiterbargRecord),
    BrownianCounterexample(BrownianRecord),
    IntegralSandwich(SandwichRecord),
    PickandsConstant(ConstantRecord),
    PickandsLimit(PickandsLimitRecord),
}

impl ExperimentResult {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentResult::TailRun(_) => "tail_run",
            ExperimentResult::PickandsLemma(_) => "pickands_lemma",
            ExperimentResult::StrongPiterbarg(_) => "strong_piterbarg",
            ExperimentResult::BrownianCounterexample(_) => "brownian_counterexample",
            ExperimentResult::IntegralSandwich(_) => "integral_sandwich",
            ExperimentResult::PickandsConstant(_) => "pickands_constant",
            ExperimentResult::PickandsLimit(_) => "pickands_limit",
        }
    }
}

/// Envelope: schema version, seed, payload, wall-clock metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema: u32,
    pub seed: u64,
    #[serde(flatten)]
    pub result: ExperimentResult,
    pub meta: RunMeta,
}

impl ExperimentRecord {
    pub fn new(seed: u64, result: ExperimentResult, wall_time_s: f64) -> Self {
        ExperimentRecord {
            schema: SCHEMA_VERSION,
            seed,
            result,
            meta: RunMeta::now(wall_time_s),
        }
    }

    /// Copy with zeroed metadata, for determinism comparisons.
    pub fn without_meta(&self) -> Self {
        let mut r = self.clone();
        r.meta = RunMeta {
            timestamp_unix_s: 0.0,
            wall_time_s: 0.0,
        };
        r
    }
}

/// Append-only JSON-lines store, single writer / many readers.
pub struct Store {
    path: PathBuf,
}

impl Store {
    pub fn new(path: impl AsRef<Path>) -> Self {
        Store {
            path: path.as_ref().to_path_buf(),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &ExperimentRecord) -> Result<()> {
        if let Some(dir) = self.path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let line = serde_json::to_string(record)?;
        writeln!(f, "{line}")?;
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<ExperimentRecord>> {
        let f = std::fs::File::open(&self.path)?;
        let mut out = Vec::new();
        for line in BufReader::new(f).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(serde_json::from_str(&line)?);
        }
        Ok(out)
    }
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// Summary table rows with the fixed column order
/// u, T, p_inf, se, p_zero, se, p_sup, se, ratio_inf, ratio_sup, eq1_prediction.
pub fn write_summary_csv<W: std::io::Write>(records: &[ExperimentRecord], mut w: W) -> Result<()> {
    writeln!(
        w,
        "u,T,p_inf,se,p_zero,se,p_sup,se,ratio_inf,ratio_sup,eq1_prediction"
    )?;
    for rec in records {
        match &rec.result {
            ExperimentResult::TailRun(r) => {
                let f = &r.tails.fine;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    fmt(r.tails.cfg.level),
                    fmt(r.tails.effective_window),
                    fmt(f.p_inf.p_hat),
                    fmt(f.p_inf.stderr),
                    fmt(f.p_zero.p_hat),
                    fmt(f.p_zero.stderr),
                    fmt(f.p_sup.p_hat),
                    fmt(f.p_sup.stderr),
                    fmt(r.ratios.ratio_inf),
                    fmt(r.ratios.ratio_sup),
                    r.eq1_prediction.map(fmt).unwrap_or_default(),
                )?;
            }
            ExperimentResult::StrongPiterbarg(r) => {
                for e in &r.entries {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        fmt(e.u),
                        fmt(e.window_effective),
                        fmt(e.fine.p_inf),
                        fmt(e.fine.p_inf_stderr),
                        fmt(e.fine.p_zero),
                        fmt(e.fine.p_zero_stderr),
                        fmt(e.fine.p_sup),
                        fmt(e.fine.p_sup_stderr),
                        fmt(e.ratio_inf),
                        fmt(e.ratio_sup),
                        fmt(e.eq1_prediction),
                    )?;
                }
            }
            ExperimentResult::BrownianCounterexample(r) => {
                for e in &r.entries {
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{},{},{},{},{}",
                        fmt(r.u),
                        fmt(e.s),
                        fmt(e.fine.p_inf),
                        fmt(e.fine.p_inf_stderr),
                        fmt(e.fine.p_zero),
                        fmt(e.fine.p_zero_stderr),
                        fmt(e.fine.p_sup),
                        fmt(e.fine.p_sup_stderr),
                        fmt(e.ratio_inf),
                        fmt(e.ratio_sup),
                        fmt(f64::NAN),
                    )?;
                }
            }
            ExperimentResult::IntegralSandwich(r) => {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    fmt(r.u),
                    fmt(r.window),
                    fmt(r.p_inf),
                    fmt(r.p_inf_stderr),
                    fmt(r.p_integral),
                    fmt(r.p_integral_stderr),
                    fmt(r.p_sup),
                    fmt(r.p_sup_stderr),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                )?;
            }
            ExperimentResult::PickandsLemma(_)
            | ExperimentResult::PickandsConstant(_)
            | ExperimentResult::PickandsLimit(_) => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{LemmaEntry, LemmaRecord};

    fn sample_record() -> ExperimentRecord {
        ExperimentRecord::new(
            42,
            ExperimentResult::PickandsLemma(LemmaRecord {
                s: 1.0,
                points_per_unit: 256,
                n_reps: 1000,
                constant: 2.7201411061872922,
                entries: vec![LemmaEntry {
                    u: 3.0,
                    p_hat: 0.0034,
                    stderr: 0.0001,
                    target: 0.003672,
                    ratio: 0.926,
                    ratio_stderr: 0.027,
                }],
            }),
            1.25,
        )
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let rec = sample_record();
        let line1 = serde_json::to_string(&rec).unwrap();
        let parsed: ExperimentRecord = serde_json::from_str(&line1).unwrap();
        let line2 = serde_json::to_string(&parsed).unwrap();
        assert_eq!(line1, line2);
        assert_eq!(rec, parsed);
    }

    #[test]
    fn store_appends_and_reads() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::new(dir.path().join("records.jsonl"));
        let a = sample_record();
        store.append(&a).unwrap();
        store.append(&a).unwrap();
        let all = store.read_all().unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0], a);
        // byte-identical re-serialization of what was read
        let raw = std::fs::read_to_string(store.path()).unwrap();
        let mut re = String::new();
        for r in &all {
            re.push_str(&serde_json::to_string(r).unwrap());
            re.push('\n');
        }
        assert_eq!(raw, re);
    }

    #[test]
    fn meta_stripping_for_determinism() {
        let a = sample_record();
        std::thread::sleep(std::time::Duration::from_millis(5));
        let mut b = sample_record();
        b.meta.wall_time_s = 9.0;
        assert_ne!(a, b);
        assert_eq!(a.without_meta(), b.without_meta());
    }

    #[test]
    fn summary_has_fixed_header() {
        let mut buf = Vec::new();
        write_summary_csv(&[sample_record()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "u,T,p_inf,se,p_zero,se,p_sup,se,ratio_inf,ratio_sup,eq1_prediction\n"
        ));
        // lemma records do not contribute tail rows
        assert_eq!(text.lines().count(), 1);
    }
}
