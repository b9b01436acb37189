//! Didactic scenarios with fixed data and annotated traces.

use std::io::Write;

use anyhow::{bail, Result};
use toad_core::engine::{BatchRejectionStop, EngineConfig, ToadEngine};
use toad_core::policy::{CommitTiming, ConstantPolicy};
use toad_core::reorder::{reorder_scenario, ReorderPolicy};
use toad_core::{DeadlineSchedule, Mode, ShapeFunction};

pub const SCENARIOS: [&str; 3] = ["reorder-table1", "stop-early", "recent-mode"];

pub fn run_scenario(name: &str, out: &mut dyn Write) -> Result<()> {
    match name {
        "reorder-table1" => reorder_table(out),
        "stop-early" => stop_early(out),
        "recent-mode" => recent_mode(out),
        other => bail!("unknown scenario {other:?} (expected one of {SCENARIOS:?})"),
    }
}

/// Three base hypotheses, the last two in adaptive order: the five-stage
/// duplicated layout with both weight options, each exercised on a stream.
fn reorder_table(out: &mut dyn Write) -> Result<()> {
    let layout = reorder_scenario(3, &[2, 3])?;
    writeln!(out, "scenario: adaptive reordering via duplicated stages")?;
    writeln!(out, "stage  hypothesis  option-1  option-2")?;
    for (pos, &hyp) in layout.stage_hypothesis.iter().enumerate() {
        writeln!(
            out,
            "{:<6} H~{}         {:<8.4}  {:<8.4}",
            pos + 1,
            hyp,
            layout.options[0][pos],
            layout.options[1][pos]
        )?;
    }
    writeln!(out, "the option is chosen at the end of stage 1, after P_1 is seen")?;

    for (label, p1) in [("option 1 (small P_1)", 0.02), ("option 2 (large P_1)", 0.9)] {
        let policy = ReorderPolicy::new(&layout, |first| usize::from(first > 0.1));
        let config = EngineConfig::new(
            0.2,
            ShapeFunction::identity(),
            Box::new(policy),
            DeadlineSchedule::open(),
        );
        let mut engine = ToadEngine::new(config, layout.stages())?;
        let p = [p1, 0.03, 0.04, 0.05, 0.06];
        writeln!(out, "\n{label}: p-values {p:?}")?;
        for &value in &p {
            let report = engine.step(value)?;
            let weight = engine.committed_weight(report.stage).unwrap_or(0.0);
            writeln!(
                out,
                "stage {}: A={:.4} S_t={} newly rejected {:?}",
                report.stage, weight, report.step_up_rank, report.newly_rejected
            )?;
        }
        let weights: Vec<f64> =
            (1..=layout.stages()).map(|i| engine.committed_weight(i).unwrap_or(0.0)).collect();
        writeln!(out, "weights applied: {weights:?}")?;
    }
    Ok(())
}

/// Adaptive stopping: constant just-in-time weights, batches of four, stop
/// after the first batch with two rejections. The run continues to the
/// horizon with zero weights.
fn stop_early(out: &mut dyn Write) -> Result<()> {
    let horizon = 12;
    let policy = ConstantPolicy::spread(horizon)?.with_timing(CommitTiming::JustInTime);
    let config = EngineConfig::new(
        0.3,
        ShapeFunction::identity(),
        Box::new(policy),
        DeadlineSchedule::batch(4)?,
    )
    .with_stop(Box::new(BatchRejectionStop::new(4, 2)));
    let mut engine = ToadEngine::new(config, horizon)?;

    let p = [0.001, 0.002, 0.9, 0.9, 0.001, 0.001, 0.001, 0.001, 0.001, 0.001, 0.001, 0.001];
    writeln!(out, "scenario: stop after the first batch with >= 2 rejections")?;
    writeln!(out, "batches of 4, alpha 0.3, A_i = 1/12 committed just in time")?;
    for &value in &p {
        let report = engine.step(value)?;
        let weight = engine.committed_weight(report.stage).unwrap_or(0.0);
        let marker = if report.stopped { "  <- stopped: A_t = 0 afterwards" } else { "" };
        writeln!(
            out,
            "stage {:>2}: p={:<6} A={:.4} S_t={} rejected {:?}{}",
            report.stage, value, weight, report.step_up_rank, report.newly_rejected, marker
        )?;
    }
    writeln!(
        out,
        "stopped after stage {:?}; run still completed all {} stages",
        engine.stopped_after(),
        engine.stage()
    )?;
    writeln!(out, "final rejections: {:?}", engine.trace().final_rejections())?;
    Ok(())
}

/// Decaying memory: frozen rejections are replaced by the empty set, expired
/// rejections are forgotten, and the per-window budget lets weights recycle.
fn recent_mode(out: &mut dyn Write) -> Result<()> {
    let horizon = 9;
    let policy = ConstantPolicy::new(1.0 / 3.0)?;
    let config = EngineConfig::new(
        0.15,
        ShapeFunction::identity(),
        Box::new(policy),
        DeadlineSchedule::batch(3)?,
    )
    .with_mode(Mode::Recent);
    let mut engine = ToadEngine::new(config, horizon)?;

    let p = [0.01, 0.9, 0.9, 0.02, 0.03, 0.9, 0.9, 0.9, 0.004];
    writeln!(out, "scenario: decaying memory (R_old replaced by the empty set)")?;
    writeln!(out, "batches of 3, A_i = 1/3 every stage: the global budget sum is 3,")?;
    writeln!(out, "but each active window sums to 1, so expired weight is recycled")?;
    for &value in &p {
        let report = engine.step(value)?;
        writeln!(
            out,
            "stage {}: p={:<6} S_t={} rejected {:?} forgotten {:?}",
            report.stage, value, report.step_up_rank, report.newly_rejected, report.removed
        )?;
    }
    writeln!(out, "active rejections at the horizon: {:?}", engine.trace().final_rejections())?;
    Ok(())
}
