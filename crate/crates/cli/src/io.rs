//! CSV formats: hypothesis streams, deadline files, shape supports, weight
//! files, decision-trace exports, and campaign summaries.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use toad_core::metrics::CampaignSummary;
use toad_core::{Deadline, HypothesisStream};

/// A stream file plus the optional columns it carried.
pub struct LoadedStream {
    pub stream: HypothesisStream,
    pub deadlines: Option<Vec<Deadline>>,
}

/// Reads `index,p_value[,is_null][,deadline]`. Indices must run 1..=n in
/// order; `deadline` accepts an integer stage or `inf` for open.
pub fn load_stream(path: &Path) -> Result<LoadedStream> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open stream file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let index_col = col("index").ok_or_else(|| anyhow!("missing `index` column"))?;
    let p_col = col("p_value").ok_or_else(|| anyhow!("missing `p_value` column"))?;
    let null_col = col("is_null");
    let deadline_col = col("deadline");

    let mut p_values = Vec::new();
    let mut mask = Vec::new();
    let mut deadlines = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let expected = row + 1;
        let index: usize = field(&record, index_col, "index")?;
        if index != expected {
            bail!("row {expected}: index {index} out of order");
        }
        p_values.push(field::<f64>(&record, p_col, "p_value")?);
        if let Some(c) = null_col {
            mask.push(parse_bool(record.get(c).unwrap_or_default(), expected)?);
        }
        if let Some(c) = deadline_col {
            deadlines.push(parse_deadline(record.get(c).unwrap_or_default(), expected)?);
        }
    }

    let stream = if null_col.is_some() {
        HypothesisStream::with_truth_mask(p_values, mask)?
    } else {
        HypothesisStream::new(p_values)?
    };
    Ok(LoadedStream { stream, deadlines: deadline_col.map(|_| deadlines) })
}

/// Reads `index,deadline` (or any file with those columns).
pub fn load_deadline_file(path: &Path) -> Result<Vec<Deadline>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open deadline file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let index_col = headers
        .iter()
        .position(|h| h == "index")
        .ok_or_else(|| anyhow!("missing `index` column"))?;
    let deadline_col = headers
        .iter()
        .position(|h| h == "deadline")
        .ok_or_else(|| anyhow!("missing `deadline` column"))?;
    let mut deadlines = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let expected = row + 1;
        let index: usize = field(&record, index_col, "index")?;
        if index != expected {
            bail!("row {expected}: index {index} out of order");
        }
        deadlines.push(parse_deadline(record.get(deadline_col).unwrap_or_default(), expected)?);
    }
    Ok(deadlines)
}

/// Reads `x,prob` support points for a discrete shape distribution.
pub fn load_support(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open shape file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let x_col = headers.iter().position(|h| h == "x").ok_or_else(|| anyhow!("missing `x`"))?;
    let prob_col =
        headers.iter().position(|h| h == "prob").ok_or_else(|| anyhow!("missing `prob`"))?;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        points.push((field(&record, x_col, "x")?, field(&record, prob_col, "prob")?));
    }
    Ok(points)
}

/// Reads `index,weight`, indices 1..=n in order.
pub fn load_weights(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open weight file {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let index_col =
        headers.iter().position(|h| h == "index").ok_or_else(|| anyhow!("missing `index`"))?;
    let weight_col =
        headers.iter().position(|h| h == "weight").ok_or_else(|| anyhow!("missing `weight`"))?;
    let mut weights = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let expected = row + 1;
        let index: usize = field(&record, index_col, "index")?;
        if index != expected {
            bail!("row {expected}: index {index} out of order");
        }
        weights.push(field(&record, weight_col, "weight")?);
    }
    Ok(weights)
}

/// One exported trace row.
pub struct TraceRow {
    pub index: usize,
    pub rejected_at: Option<usize>,
    pub deadline: Deadline,
    pub weight: Option<f64>,
    pub p_value: f64,
}

/// Writes `stage,index,rejected_at_stage,deadline,weight,p_value`.
pub fn write_trace(out: &mut dyn Write, rows: &[TraceRow]) -> Result<()> {
    writeln!(out, "stage,index,rejected_at_stage,deadline,weight,p_value")?;
    for row in rows {
        let rejected = row.rejected_at.map(|s| s.to_string()).unwrap_or_default();
        let deadline = match row.deadline {
            Deadline::At(d) => d.to_string(),
            Deadline::Never => "inf".to_string(),
        };
        let weight = row.weight.map(|w| w.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.index, row.index, rejected, deadline, weight, row.p_value
        )?;
    }
    Ok(())
}

/// One row of the campaign summary (the data behind the power/FDR figures).
pub struct SummaryRow {
    pub method: String,
    pub rho: f64,
    pub n_batch: usize,
    pub pi1: f64,
    pub summary: CampaignSummary,
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("method,rho,n_batch,pi1,mean_power,se_power,mean_fdr,se_fdr,iterations\n");
    for row in rows {
        let s = &row.summary;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.method,
            row.rho,
            row.n_batch,
            row.pi1,
            s.mean_power,
            s.se_power,
            s.mean_fdr,
            s.se_fdr,
            s.iterations
        ));
    }
    out
}

/// Writes `index,z,p,is_null` debugging dumps of one simulated trial.
pub fn write_trial_dump(
    out: &mut dyn Write,
    z: &[f64],
    stream: &HypothesisStream,
) -> Result<()> {
    writeln!(out, "index,z,p,is_null")?;
    let mask = stream.truth_mask();
    for i in 1..=stream.len() {
        let is_null = mask.map(|m| usize::from(m[i - 1]).to_string()).unwrap_or_default();
        writeln!(out, "{},{},{},{}", i, z[i - 1], stream.p_value(i), is_null)?;
    }
    Ok(())
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut file =
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(contents.as_bytes())?;
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, col: usize, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record.get(col).ok_or_else(|| anyhow!("missing `{name}` field"))?;
    raw.trim()
        .parse()
        .map_err(|e| anyhow!("cannot parse `{name}` value {raw:?}: {e}"))
}

fn parse_bool(raw: &str, row: usize) -> Result<bool> {
    match raw.trim() {
        "1" | "true" | "TRUE" | "True" => Ok(true),
        "0" | "false" | "FALSE" | "False" => Ok(false),
        other => bail!("row {row}: cannot parse `is_null` value {other:?}"),
    }
}

fn parse_deadline(raw: &str, row: usize) -> Result<Deadline> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("inf") {
        return Ok(Deadline::Never);
    }
    let stage: usize =
        trimmed.parse().map_err(|e| anyhow!("row {row}: bad deadline {trimmed:?}: {e}"))?;
    Ok(Deadline::At(stage))
}
