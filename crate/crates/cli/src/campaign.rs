//! Monte Carlo campaign runner: a grid of simulation cells crossed with a
//! set of procedures, parallel over trials, deterministic given the seed.
//!
//! Each trial's stream is generated once and every requested method runs on
//! it, so cross-method comparisons (power orderings, the dominance audit)
//! are paired. Trials draw from independent, seed-derived RNG streams keyed
//! by `(cell, trial)`, and aggregation folds in trial order, so the output
//! is byte-identical for any worker count.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use toad_core::baselines::{self, BatchLayout};
use toad_core::engine::{run, BatchRejectionStop, EngineConfig};
use toad_core::metrics::{self, CampaignSummary, TrialMetrics};
use toad_core::policy::{CommitTiming, ConstantPolicy};
use toad_core::simgen::{self, SimConfig};
use toad_core::{DeadlineSchedule, Mode, ShapeFunction};

use crate::io::SummaryRow;

/// Shape used by a TOAD campaign method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeChoice {
    Identity,
    Harmonic,
}

/// One procedure in a campaign.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodKind {
    Toad {
        shape: ShapeChoice,
        mode: Mode,
        /// Stop after the first batch with at least this many rejections
        /// (weights then commit just in time rather than upfront).
        stop_threshold: Option<usize>,
    },
    Lond,
    NaiveBh,
    BatchBh,
    BatchBhPrds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSpec {
    pub name: String,
    pub kind: MethodKind,
}

impl MethodSpec {
    fn toad(name: &str, shape: ShapeChoice, mode: Mode, stop_threshold: Option<usize>) -> Self {
        Self { name: name.to_string(), kind: MethodKind::Toad { shape, mode, stop_threshold } }
    }

    /// Whether the method's FDR column reports the decaying-memory statistic.
    pub fn reports_recent_fdr(&self) -> bool {
        matches!(self.kind, MethodKind::Toad { mode: Mode::Recent, .. })
    }
}

/// Parses a comma-separated method list: `toad`, `toad_harmonic`,
/// `toad_recent`, `toad_stop:<k>`, `lond`, `naive_bh`, `batch_bh`,
/// `batch_prds` (alias `batch_bh_prds`).
pub fn parse_methods(list: &str) -> Result<Vec<MethodSpec>> {
    let mut methods = Vec::new();
    for raw in list.split(',') {
        let name = raw.trim();
        if name.is_empty() {
            continue;
        }
        let spec = match name {
            "toad" => MethodSpec::toad("toad", ShapeChoice::Identity, Mode::Standard, None),
            "toad_harmonic" => {
                MethodSpec::toad("toad_harmonic", ShapeChoice::Harmonic, Mode::Standard, None)
            }
            "toad_recent" => {
                MethodSpec::toad("toad_recent", ShapeChoice::Identity, Mode::Recent, None)
            }
            "lond" => MethodSpec { name: "lond".into(), kind: MethodKind::Lond },
            "naive_bh" => MethodSpec { name: "naive_bh".into(), kind: MethodKind::NaiveBh },
            "batch_bh" => MethodSpec { name: "batch_bh".into(), kind: MethodKind::BatchBh },
            "batch_prds" | "batch_bh_prds" => {
                MethodSpec { name: "batch_prds".into(), kind: MethodKind::BatchBhPrds }
            }
            other => {
                if let Some(arg) = other.strip_prefix("toad_stop:") {
                    let k: usize =
                        arg.parse().map_err(|e| anyhow!("bad stop threshold {arg:?}: {e}"))?;
                    MethodSpec::toad(other, ShapeChoice::Identity, Mode::Standard, Some(k))
                } else {
                    bail!("unknown method {other:?}");
                }
            }
        };
        methods.push(spec);
    }
    if methods.is_empty() {
        bail!("no methods selected");
    }
    Ok(methods)
}

#[derive(Debug, Clone)]
pub struct CampaignOptions {
    pub alpha: f64,
    pub seed: u64,
    pub jobs: usize,
    pub methods: Vec<MethodSpec>,
}

/// Aggregates of one grid cell.
pub struct CellResult {
    pub config: SimConfig,
    /// One `(method name, summary)` per requested method, in method order.
    pub summaries: Vec<(String, CampaignSummary)>,
    /// Trials where the batch-PRDS rejections escaped the TOAD rejections;
    /// present when both methods ran.
    pub dominance_violations: Option<usize>,
}

pub struct CampaignResult {
    pub cells: Vec<CellResult>,
    pub methods: Vec<MethodSpec>,
    /// Cells that failed, as `(config, reason)`; the rest of the campaign
    /// still runs.
    pub failures: Vec<(SimConfig, String)>,
    pub elapsed: Duration,
}

impl CampaignResult {
    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        let mut rows = Vec::new();
        for cell in &self.cells {
            for (method, summary) in &cell.summaries {
                rows.push(SummaryRow {
                    method: method.clone(),
                    rho: cell.config.rho,
                    n_batch: cell.config.n_batch,
                    pi1: cell.config.pi1,
                    summary: *summary,
                });
            }
        }
        rows
    }

    pub fn summary_csv(&self) -> String {
        crate::io::summary_csv(&self.summary_rows())
    }

    /// Per-cell dominance audit (`rho,n_batch,pi1,iterations,dominance_violations`)
    /// when the audit ran.
    pub fn audit_csv(&self) -> Option<String> {
        if self.cells.iter().all(|c| c.dominance_violations.is_none()) {
            return None;
        }
        let mut out = String::from("rho,n_batch,pi1,iterations,dominance_violations\n");
        for cell in &self.cells {
            if let Some(v) = cell.dominance_violations {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    cell.config.rho, cell.config.n_batch, cell.config.pi1, cell.config.iterations, v
                ));
            }
        }
        Some(out)
    }

    pub fn total_dominance_violations(&self) -> Option<usize> {
        self.cells.iter().filter_map(|c| c.dominance_violations).reduce(|a, b| a + b)
    }

    pub fn cell(&self, rho: f64, n_batch: usize, pi1: f64) -> Option<&CellResult> {
        self.cells.iter().find(|c| {
            c.config.rho == rho && c.config.n_batch == n_batch && c.config.pi1 == pi1
        })
    }
}

impl CellResult {
    pub fn summary(&self, method: &str) -> Option<&CampaignSummary> {
        self.summaries.iter().find(|(name, _)| name == method).map(|(_, s)| s)
    }
}

struct TrialOutcome {
    per_method: Vec<TrialMetrics>,
    dominance_ok: Option<bool>,
}

/// Runs `grid x methods`, parallel over trials within each cell.
pub fn run_campaign(grid: &[SimConfig], options: &CampaignOptions) -> Result<CampaignResult> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.jobs)
        .build()
        .map_err(|e| anyhow!("cannot build worker pool: {e}"))?;

    let audit = options.methods.iter().any(|m| m.name == "toad")
        && options.methods.iter().any(|m| m.kind == MethodKind::BatchBhPrds);

    let mut cells = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for (cell_index, cell) in grid.iter().enumerate() {
        match run_cell(cell, cell_index, options, audit, &pool) {
            Ok(result) => cells.push(result),
            // A failed cell is reported but never aborts the campaign.
            Err(e) => failures.push((cell.clone(), e.to_string())),
        }
    }
    Ok(CampaignResult {
        cells,
        methods: options.methods.clone(),
        failures,
        elapsed: started.elapsed(),
    })
}

fn run_cell(
    cell: &SimConfig,
    cell_index: usize,
    options: &CampaignOptions,
    audit: bool,
    pool: &rayon::ThreadPool,
) -> Result<CellResult> {
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..cell.iterations)
            .into_par_iter()
            .map(|trial| run_trial(cell, cell_index, trial, options, audit))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut summaries = Vec::with_capacity(options.methods.len());
    for (m, method) in options.methods.iter().enumerate() {
        let trials: Vec<TrialMetrics> = outcomes.iter().map(|o| o.per_method[m]).collect();
        let summary = if method.reports_recent_fdr() {
            metrics::aggregate_recent(&trials)?
        } else {
            metrics::aggregate(&trials)?
        };
        summaries.push((method.name.clone(), summary));
    }
    let dominance_violations =
        audit.then(|| outcomes.iter().filter(|o| o.dominance_ok == Some(false)).count());
    Ok(CellResult { config: cell.clone(), summaries, dominance_violations })
}

fn run_trial(
    cell: &SimConfig,
    cell_index: usize,
    trial: usize,
    options: &CampaignOptions,
    audit: bool,
) -> Result<TrialOutcome> {
    let mut config = cell.clone();
    config.seed = options.seed;
    // Independent RNG stream per (cell, trial): order- and thread-invariant.
    let stream_id = ((cell_index as u64) << 32) | trial as u64;
    let stream = simgen::gen_trial(&config, stream_id)?;
    let mask = stream.truth_mask().expect("simulated streams carry truth masks").to_vec();

    let t_max = cell.t_max;
    let deadlines = DeadlineSchedule::batch(cell.n_batch)?;
    let layout = BatchLayout::regular(cell.n_batch, t_max)?;
    let gamma = vec![1.0 / layout.count() as f64; layout.count()];

    let mut per_method = Vec::with_capacity(options.methods.len());
    let mut toad_rejections: Option<BTreeSet<usize>> = None;
    let mut prds_rejections: Option<BTreeSet<usize>> = None;

    for method in &options.methods {
        let trace = match &method.kind {
            MethodKind::Toad { shape, mode, stop_threshold } => {
                let beta = match shape {
                    ShapeChoice::Identity => ShapeFunction::identity(),
                    ShapeChoice::Harmonic => ShapeFunction::harmonic(t_max)?,
                };
                let policy = match mode {
                    // Decaying memory recycles the budget within each window.
                    Mode::Recent => ConstantPolicy::new(1.0 / cell.n_batch as f64)?,
                    Mode::Standard => ConstantPolicy::spread(t_max)?,
                };
                let policy = if stop_threshold.is_some() {
                    policy.with_timing(CommitTiming::JustInTime)
                } else {
                    policy
                };
                let mut engine_config = EngineConfig::new(
                    options.alpha,
                    beta,
                    Box::new(policy),
                    deadlines.clone(),
                )
                .with_mode(*mode);
                if let Some(k) = stop_threshold {
                    engine_config = engine_config
                        .with_stop(Box::new(BatchRejectionStop::new(cell.n_batch, *k)));
                }
                run(engine_config, &stream)?
            }
            MethodKind::Lond => {
                let weights = vec![1.0 / t_max as f64; t_max];
                baselines::lond(stream.p_values(), &weights, options.alpha)?
            }
            MethodKind::NaiveBh => baselines::naive_bh(stream.p_values(), &layout, options.alpha)?,
            MethodKind::BatchBh => {
                baselines::batch_bh(stream.p_values(), &layout, options.alpha, &gamma)?
            }
            MethodKind::BatchBhPrds => {
                baselines::batch_bh_prds(stream.p_values(), &layout, options.alpha, &gamma)?
            }
        };

        if audit {
            if method.name == "toad" {
                toad_rejections = Some(trace.final_rejections());
            } else if method.kind == MethodKind::BatchBhPrds {
                prds_rejections = Some(trace.final_rejections());
            }
        }
        per_method.push(TrialMetrics::from_trace(&trace, &mask, &deadlines)?);
    }

    let dominance_ok = match (&toad_rejections, &prds_rejections) {
        (Some(ours), Some(theirs)) => Some(theirs.is_subset(ours)),
        _ => None,
    };
    Ok(TrialOutcome { per_method, dominance_ok })
}
