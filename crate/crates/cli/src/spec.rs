//! Parsers for the small specification strings used on the command line and
//! in config files: shapes, deadline schedules, weight policies, and the
//! flat `key = value` config format.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use toad_core::policy::{CommitTiming, ConstantPolicy, FixedWeights, ThresholdPolicy};
use toad_core::{Deadline, DeadlineSchedule, ShapeFunction};

use crate::io;

/// `identity`, `harmonic:<t_max>` (or bare `harmonic` for the run horizon),
/// or `nu:<path>` with a CSV of `x,prob` rows.
pub fn parse_shape(spec: &str, horizon: usize, base: &Path) -> Result<ShapeFunction> {
    match spec {
        "identity" => Ok(ShapeFunction::identity()),
        "harmonic" => Ok(ShapeFunction::harmonic(horizon)?),
        other => {
            if let Some(arg) = other.strip_prefix("harmonic:") {
                let t_max: usize =
                    arg.parse().with_context(|| format!("bad harmonic horizon {arg:?}"))?;
                return Ok(ShapeFunction::harmonic(t_max)?);
            }
            if let Some(path) = other.strip_prefix("nu:") {
                let points = io::load_support(&resolve(base, path))?;
                return Ok(ShapeFunction::from_support(&points)?);
            }
            bail!("unknown shape spec {other:?} (expected identity | harmonic:<n> | nu:<path>)")
        }
    }
}

/// `batch:<n>`, `file:<path>` (CSV with a `deadline` column), `open`, or
/// `immediate`.
pub fn parse_deadlines(spec: &str, base: &Path) -> Result<DeadlineSchedule> {
    match spec {
        "open" => Ok(DeadlineSchedule::open()),
        "immediate" => Ok(DeadlineSchedule::immediate()),
        other => {
            if let Some(arg) = other.strip_prefix("batch:") {
                let n: usize = arg.parse().with_context(|| format!("bad batch size {arg:?}"))?;
                return Ok(DeadlineSchedule::batch(n)?);
            }
            if let Some(path) = other.strip_prefix("file:") {
                let deadlines = io::load_deadline_file(&resolve(base, path))?;
                return Ok(DeadlineSchedule::from_deadlines(deadlines)?);
            }
            bail!(
                "unknown deadline spec {other:?} (expected batch:<n> | file:<path> | open | immediate)"
            )
        }
    }
}

/// `const` (budget spread evenly over the horizon), `const:<w>`, or
/// `file:<path>` with `index,weight` rows. `just_in_time` commits each
/// weight at the last admissible stage instead of upfront.
pub fn parse_policy(
    spec: &str,
    horizon: usize,
    just_in_time: bool,
    base: &Path,
) -> Result<Box<dyn ThresholdPolicy>> {
    let timing = if just_in_time { CommitTiming::JustInTime } else { CommitTiming::Upfront };
    match spec {
        "const" => Ok(Box::new(ConstantPolicy::spread(horizon)?.with_timing(timing))),
        other => {
            if let Some(arg) = other.strip_prefix("const:") {
                let w: f64 = arg.parse().with_context(|| format!("bad weight {arg:?}"))?;
                return Ok(Box::new(ConstantPolicy::new(w)?.with_timing(timing)));
            }
            if let Some(path) = other.strip_prefix("file:") {
                let weights = io::load_weights(&resolve(base, path))?;
                return Ok(Box::new(FixedWeights::new(weights)?));
            }
            bail!("unknown weight spec {other:?} (expected const | const:<w> | file:<path>)")
        }
    }
}

/// Raw weight sequence for the LOND baselines.
pub fn parse_weight_sequence(spec: &str, horizon: usize, base: &Path) -> Result<Vec<f64>> {
    match spec {
        "const" => Ok(vec![1.0 / horizon.max(1) as f64; horizon]),
        other => {
            if let Some(arg) = other.strip_prefix("const:") {
                let w: f64 = arg.parse().with_context(|| format!("bad weight {arg:?}"))?;
                return Ok(vec![w; horizon]);
            }
            if let Some(path) = other.strip_prefix("file:") {
                return io::load_weights(&resolve(base, path));
            }
            bail!("unknown weight spec {other:?}")
        }
    }
}

/// Deadlines of every index up to `horizon` under a schedule.
pub fn schedule_deadlines(schedule: &DeadlineSchedule, horizon: usize) -> Vec<Deadline> {
    (1..=horizon).map(|i| schedule.deadline(i)).collect()
}

/// Flat config files: one `key = value` per line, `#` comments. Values read
/// here serve as defaults; explicit command-line flags win.
pub fn load_config(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut map = HashMap::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", line_no + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve(base: &Path, path: &str) -> PathBuf {
    let candidate = Path::new(path);
    if candidate.is_absolute() {
        candidate.to_path_buf()
    } else {
        base.join(candidate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_specs_parse() {
        let base = Path::new(".");
        assert!(parse_shape("identity", 10, base).unwrap().is_identity());
        let h = parse_shape("harmonic:3", 10, base).unwrap();
        assert!((h.at_rank(3) - 18.0 / 11.0).abs() < 1e-12);
        let h = parse_shape("harmonic", 3, base).unwrap();
        assert!((h.at_rank(3) - 18.0 / 11.0).abs() < 1e-12);
        assert!(parse_shape("triangle", 10, base).is_err());
    }

    #[test]
    fn deadline_specs_parse() {
        let base = Path::new(".");
        let batch = parse_deadlines("batch:100", base).unwrap();
        assert_eq!(batch.deadline(101), Deadline::At(200));
        assert_eq!(parse_deadlines("open", base).unwrap().deadline(5), Deadline::Never);
        assert!(parse_deadlines("batch:zero", base).is_err());
        assert!(parse_deadlines("sometimes", base).is_err());
    }

    #[test]
    fn config_files_parse_key_values() {
        let dir = std::env::temp_dir().join("toad-spec-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nalpha = 0.1\nproc = toad # trailing\n\n").unwrap();
        let map = load_config(&path).unwrap();
        assert_eq!(map.get("alpha").map(String::as_str), Some("0.1"));
        assert_eq!(map.get("proc").map(String::as_str), Some("toad"));
    }
}
