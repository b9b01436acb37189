//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `--nocapture` to see them).
//!
//! The shared desk-scale campaign uses the default seed 0, fixed a priori;
//! derived campaigns (harmonic, decaying memory, adaptive stopping) reuse
//! the same seed, so every trial stream is identical across variants and
//! comparisons are paired.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toad_cli::campaign::{self, CampaignOptions, CampaignResult};
use toad_core::baselines;
use toad_core::engine::{run, EngineConfig, ToadEngine};
use toad_core::metrics;
use toad_core::policy::{ConstantPolicy, FixedWeights, ThresholdPolicy};
use toad_core::simgen::{self, Scale};
use toad_core::trace::StageDelta;
use toad_core::{Deadline, DeadlineSchedule, DecisionTrace, HypothesisStream, ShapeFunction};

const ALPHA: f64 = 0.05;
const SEED: u64 = 0;

fn desk_campaign(methods: &str, jobs: usize) -> CampaignResult {
    let grid = simgen::param_grid(Scale::Desk, SEED);
    let options = CampaignOptions {
        alpha: ALPHA,
        seed: SEED,
        jobs,
        methods: campaign::parse_methods(methods).expect("method list"),
    };
    campaign::run_campaign(&grid, &options).expect("campaign run")
}

static MAIN: LazyLock<CampaignResult> =
    LazyLock::new(|| desk_campaign("toad,batch_bh,batch_prds,naive_bh", 8));
static MAIN_SERIAL: LazyLock<CampaignResult> =
    LazyLock::new(|| desk_campaign("toad,batch_bh,batch_prds,naive_bh", 1));
static HARMONIC: LazyLock<CampaignResult> = LazyLock::new(|| desk_campaign("toad_harmonic", 2));
static RECENT: LazyLock<CampaignResult> = LazyLock::new(|| desk_campaign("toad_recent", 2));
static STOPPED: LazyLock<CampaignResult> = LazyLock::new(|| desk_campaign("toad_stop:5", 2));

fn stage_sets(trace: &DecisionTrace) -> Vec<BTreeSet<usize>> {
    let mut sets = Vec::new();
    trace.for_each_stage(|_, set| sets.push(set.clone()));
    sets
}

/// Criterion 1: with one all-active batch, spread weights, and the identity
/// shape, the final TOAD rejection set equals classical BH exactly.
#[test]
fn c01_bh_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut checked = 0usize;
    for case in 0..1000 {
        let n = rng.random_range(1..=50usize);
        let alpha = 0.02 + 0.28 * rng.random::<f64>();
        let p: Vec<f64> = (0..n)
            .map(|_| {
                let u = rng.random::<f64>();
                match case % 4 {
                    0 | 1 => u,       // uniform
                    2 => u * u,       // skewed toward 0 (Beta(1/2, 1))
                    _ => u * u * u,   // more heavily skewed
                }
            })
            .collect();

        let config = EngineConfig::new(
            alpha,
            ShapeFunction::identity(),
            Box::new(ConstantPolicy::spread(n).unwrap()),
            DeadlineSchedule::batch(n).unwrap(),
        );
        let stream = HypothesisStream::new(p.clone()).unwrap();
        let ours = run(config, &stream).unwrap().final_rejections();
        let classical: BTreeSet<usize> =
            baselines::bh(&p, alpha).unwrap().into_iter().collect();
        assert_eq!(ours, classical, "case {case}: n = {n}, alpha = {alpha}");
        checked += 1;
    }
    println!("ACCEPTANCE C1 (BH equivalence): PASS - {checked}/1000 instances matched exactly");
}

/// Criterion 2: with immediate deadlines and the identity shape, the whole
/// per-stage trace equals the LOND rule exactly.
#[test]
fn c02_lond_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for case in 0..1000 {
        let n = rng.random_range(1..=60usize);
        let alpha = 0.02 + 0.28 * rng.random::<f64>();
        let raw: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.1 { 0.0 } else { rng.random::<f64>() })
            .collect();
        let total: f64 = raw.iter().sum::<f64>().max(1e-12);
        let scale = rng.random::<f64>().max(0.2) / total;
        let weights: Vec<f64> = raw.iter().map(|w| w * scale).collect();
        let p: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

        let config = EngineConfig::new(
            alpha,
            ShapeFunction::identity(),
            Box::new(FixedWeights::new(weights.clone()).unwrap()),
            DeadlineSchedule::immediate(),
        );
        let stream = HypothesisStream::new(p.clone()).unwrap();
        let ours = run(config, &stream).unwrap();
        let reference = baselines::lond(&p, &weights, alpha).unwrap();
        assert_eq!(stage_sets(&ours), stage_sets(&reference), "case {case}");
    }
    println!("ACCEPTANCE C2 (LOND equivalence): PASS - 1000/1000 traces matched exactly");
}

/// Adaptive test policy: weights depend deterministically on the readable
/// masked prefix, commit stages are random in 0..index.
struct RandomAdaptive {
    base: Vec<f64>,
    commit: Vec<usize>,
}

impl RandomAdaptive {
    fn new(rng: &mut ChaCha8Rng, horizon: usize) -> Self {
        let raw: Vec<f64> = (0..horizon)
            .map(|_| if rng.random::<f64>() < 0.15 { 0.0 } else { rng.random::<f64>() })
            .collect();
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        let scale = rng.random::<f64>().max(0.2) / total;
        Self {
            base: raw.iter().map(|w| w * scale).collect(),
            commit: (1..=horizon)
                .map(|i| if i == 1 { 0 } else { rng.random_range(0..i) })
                .collect(),
        }
    }
}

impl ThresholdPolicy for RandomAdaptive {
    fn commit_stage(&self, index: usize) -> usize {
        self.commit[index - 1]
    }
    fn weight(&self, index: usize, observed: &[f64]) -> f64 {
        let mut acc = 0.0f64;
        for (k, &e) in observed.iter().enumerate() {
            acc += e.abs() * (0.61 * (k + index) as f64).sin().abs();
        }
        self.base[index - 1] * (0.5 + 0.5 * acc.fract())
    }
}

fn random_schedule(rng: &mut ChaCha8Rng, horizon: usize, span: usize) -> DeadlineSchedule {
    let deadlines = (1..=horizon)
        .map(|i| {
            if span >= horizon && rng.random::<f64>() < 0.1 {
                Deadline::Never
            } else {
                Deadline::At(i + rng.random_range(0..span))
            }
        })
        .collect();
    DeadlineSchedule::from_deadlines(deadlines).unwrap()
}

fn random_shape(rng: &mut ChaCha8Rng, horizon: usize) -> ShapeFunction {
    match rng.random_range(0..3u8) {
        0 => ShapeFunction::identity(),
        1 => ShapeFunction::harmonic(horizon.max(1)).unwrap(),
        _ => {
            let n = rng.random_range(1..5usize);
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = raw.iter().sum();
            let points: Vec<(f64, f64)> = raw
                .iter()
                .enumerate()
                .map(|(k, &w)| (0.4 + 1.3 * k as f64 + rng.random::<f64>(), w / total))
                .collect();
            ShapeFunction::from_support(&points).unwrap()
        }
    }
}

/// Criterion 3: monotonicity and the no-late-update law over 10^4 randomized
/// configurations with random deadlines and adaptive commit stages.
#[test]
fn c03_monotonicity_and_no_late_updates() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..10_000 {
        let horizon = rng.random_range(1..=24usize);
        let schedule = random_schedule(&mut rng, horizon, horizon.max(2));
        let beta = random_shape(&mut rng, horizon);
        let alpha = 0.02 + 0.4 * rng.random::<f64>();
        let policy = RandomAdaptive::new(&mut rng, horizon);
        let p: Vec<f64> = (0..horizon).map(|_| rng.random::<f64>()).collect();

        let config = EngineConfig::new(alpha, beta, Box::new(policy), schedule.clone());
        let stream = HypothesisStream::new(p).unwrap();
        let trace = run(config, &stream).unwrap();
        trace.check_monotone().unwrap_or_else(|e| panic!("case {case}: {e}"));
        trace
            .check_no_late_updates(&schedule)
            .unwrap_or_else(|e| panic!("case {case}: {e}"));
    }
    println!(
        "ACCEPTANCE C3 (monotonicity + no late updates): PASS - 10000/10000 configurations"
    );
}

/// Criterion 4: subset-enumeration maximality oracle. At each stage of each
/// instance, the rejection set must be the unique largest self-consistent
/// set that freezes expired decisions, with windows of at most 12.
#[test]
fn c04_maximality_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut stages_checked = 0usize;
    for case in 0..1000 {
        let horizon = rng.random_range(1..=18usize);
        // d_i in [i, i+11] caps every active window at 12.
        let schedule = random_schedule(&mut rng, horizon, 12.min(horizon + 1));
        let beta = random_shape(&mut rng, horizon);
        let alpha = 0.05 + 0.4 * rng.random::<f64>();
        let raw: Vec<f64> = (0..horizon)
            .map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() })
            .collect();
        let total: f64 = raw.iter().sum::<f64>().max(1e-9);
        let weights: Vec<f64> = raw.iter().map(|w| w * 0.9 / total).collect();
        let p: Vec<f64> = (0..horizon)
            .map(|_| if rng.random::<f64>() < 0.3 { rng.random::<f64>() * 0.1 } else { rng.random::<f64>() })
            .collect();

        let config = EngineConfig::new(
            alpha,
            beta.clone(),
            Box::new(FixedWeights::new(weights.clone()).unwrap()),
            schedule.clone(),
        );
        let stream = HypothesisStream::new(p.clone()).unwrap();
        let trace = run(config, &stream).unwrap();

        let stats: Vec<f64> = (0..horizon)
            .map(|i| if weights[i] > 0.0 { p[i] / weights[i] } else { f64::INFINITY })
            .collect();

        let mut previous: BTreeSet<usize> = BTreeSet::new();
        for stage in 1..=horizon {
            let active = schedule.active_set(stage);
            assert!(active.len() <= 12, "window grew past the oracle bound");
            let frozen: Vec<usize> =
                previous.iter().copied().filter(|i| !active.contains(i)).collect();
            let frozen_max_stat =
                frozen.iter().map(|&i| stats[i - 1]).fold(f64::NEG_INFINITY, f64::max);

            // Enumerate every subset of the active window.
            let m = active.len();
            let mut subset_max = vec![f64::NEG_INFINITY; 1usize << m];
            #[allow(clippy::needless_range_loop)] // masks index the DP table
            for mask in 1..(1usize << m) {
                let low = mask.trailing_zeros() as usize;
                subset_max[mask] =
                    subset_max[mask & (mask - 1)].max(stats[active[low] - 1]);
            }
            let mut best_mask = 0usize;
            let mut best_size = frozen.len();
            let mut ties = 1usize; // the empty subset (frozen alone) is feasible
            for (mask, &mask_max) in subset_max.iter().enumerate().skip(1) {
                let size = frozen.len() + mask.count_ones() as usize;
                let bound = alpha * beta.at_rank(size.max(1));
                if mask_max <= bound && frozen_max_stat <= bound {
                    use std::cmp::Ordering;
                    match size.cmp(&best_size) {
                        Ordering::Greater => {
                            best_size = size;
                            best_mask = mask;
                            ties = 1;
                        }
                        Ordering::Equal => ties += 1,
                        Ordering::Less => {}
                    }
                }
            }
            let mut oracle: BTreeSet<usize> = frozen.iter().copied().collect();
            for (pos, &index) in active.iter().enumerate() {
                if best_mask >> pos & 1 == 1 {
                    oracle.insert(index);
                }
            }
            assert!(
                best_size == frozen.len() || ties == 1,
                "case {case} stage {stage}: maximal set not unique"
            );

            let engine_set = trace.rejection_set_at(stage).unwrap();
            assert_eq!(engine_set, oracle, "case {case} stage {stage}");
            previous = engine_set;
            stages_checked += 1;
        }
    }
    println!(
        "ACCEPTANCE C4 (maximality oracle): PASS - 1000 instances, {stages_checked} stages enumerated"
    );
}

/// Criterion 5: on every desk-campaign trial, the batch-PRDS rejections are
/// contained in TOAD's.
#[test]
fn c05_dominance() {
    let main = &*MAIN;
    let mut audited_cells = 0usize;
    for cell in &main.cells {
        let violations = cell
            .dominance_violations
            .expect("dominance audit runs when toad and batch_prds are both present");
        assert_eq!(
            violations, 0,
            "dominance violated in cell rho={} n_batch={} pi1={}",
            cell.config.rho, cell.config.n_batch, cell.config.pi1
        );
        audited_cells += 1;
    }
    println!(
        "ACCEPTANCE C5 (dominance): PASS - 0 violations over {audited_cells} cells x 200 trials"
    );
}

/// Criterion 6: TOAD with the identity shape controls FDR in every desk cell
/// (positive dependence regime), within the stated runtime budget.
#[test]
fn c06_fdr_control_identity() {
    let main = &*MAIN;
    let mut worst = f64::NEG_INFINITY;
    for cell in &main.cells {
        let s = cell.summary("toad").expect("toad summary");
        let bound = ALPHA + 3.0 * s.se_fdr;
        assert!(
            s.mean_fdr <= bound,
            "cell rho={} n_batch={} pi1={}: FDR {} > {}",
            cell.config.rho,
            cell.config.n_batch,
            cell.config.pi1,
            s.mean_fdr,
            bound
        );
        worst = worst.max(s.mean_fdr - bound);
    }
    let elapsed = main.elapsed.as_secs_f64();
    assert!(elapsed < 300.0, "campaign took {elapsed:.1}s, over the 5 minute budget");
    println!(
        "ACCEPTANCE C6 (FDR control, identity shape): PASS - all 12 cells within alpha + 3 SE \
         (worst margin {worst:.4}), campaign ran in {elapsed:.1}s"
    );
}

/// Criterion 7: the harmonic shape also controls FDR, at strictly lower
/// power than the identity shape (paired streams).
#[test]
fn c07_fdr_control_harmonic() {
    let main = &*MAIN;
    let harmonic = &*HARMONIC;
    for cell in &harmonic.cells {
        let s = cell.summary("toad_harmonic").expect("harmonic summary");
        let bound = ALPHA + 3.0 * s.se_fdr;
        assert!(
            s.mean_fdr <= bound,
            "cell rho={} n_batch={} pi1={}: FDR {} > {}",
            cell.config.rho,
            cell.config.n_batch,
            cell.config.pi1,
            s.mean_fdr,
            bound
        );
        let identity = main
            .cell(cell.config.rho, cell.config.n_batch, cell.config.pi1)
            .and_then(|c| c.summary("toad"))
            .expect("paired identity cell");
        assert!(
            s.mean_power < identity.mean_power,
            "cell rho={} n_batch={} pi1={}: harmonic power {} not below identity {}",
            cell.config.rho,
            cell.config.n_batch,
            cell.config.pi1,
            s.mean_power,
            identity.mean_power
        );
    }
    println!(
        "ACCEPTANCE C7 (FDR control, harmonic shape): PASS - all cells within alpha + 3 SE and \
         strictly below identity power"
    );
}

/// Criterion 8: desk-scale power ordering at rho = 0:
/// batch_bh >= toad >= batch_prds and toad >= naive_bh, within two combined
/// standard errors.
#[test]
fn c08_power_ordering() {
    let main = &*MAIN;
    let combined = |a: f64, b: f64| (a * a + b * b).sqrt();
    let mut cells = 0usize;
    for cell in main.cells.iter().filter(|c| c.config.rho == 0.0) {
        let toad = cell.summary("toad").unwrap();
        let bbh = cell.summary("batch_bh").unwrap();
        let prds = cell.summary("batch_prds").unwrap();
        let naive = cell.summary("naive_bh").unwrap();
        let label = format!("n_batch={} pi1={}", cell.config.n_batch, cell.config.pi1);

        let slack = 2.0 * combined(bbh.se_power, toad.se_power);
        assert!(
            bbh.mean_power >= toad.mean_power - slack,
            "{label}: batch_bh {} vs toad {} (slack {slack})",
            bbh.mean_power,
            toad.mean_power
        );
        let slack = 2.0 * combined(toad.se_power, prds.se_power);
        assert!(
            toad.mean_power >= prds.mean_power - slack,
            "{label}: toad {} vs batch_prds {}",
            toad.mean_power,
            prds.mean_power
        );
        let slack = 2.0 * combined(toad.se_power, naive.se_power);
        assert!(
            toad.mean_power >= naive.mean_power - slack,
            "{label}: toad {} vs naive_bh {}",
            toad.mean_power,
            naive.mean_power
        );
        cells += 1;
    }
    println!(
        "ACCEPTANCE C8 (power ordering at rho = 0): PASS - batch_bh >= toad >= batch_prds and \
         toad >= naive_bh in all {cells} cells (2 combined SEs)"
    );
}

/// Criterion 9: with within-batch correlation, batch_bh inflates FDR past
/// alpha + 2 SE in at least one cell while TOAD stays within alpha + 3 SE
/// in all of them.
#[test]
fn c09_correlated_inflation() {
    let main = &*MAIN;
    let mut inflated = Vec::new();
    for cell in main.cells.iter().filter(|c| c.config.rho == 0.5) {
        let toad = cell.summary("toad").unwrap();
        assert!(
            toad.mean_fdr <= ALPHA + 3.0 * toad.se_fdr,
            "toad exceeded its bound at n_batch={} pi1={}",
            cell.config.n_batch,
            cell.config.pi1
        );
        let bbh = cell.summary("batch_bh").unwrap();
        if bbh.mean_fdr > ALPHA + 2.0 * bbh.se_fdr {
            inflated.push(format!(
                "n_batch={} pi1={} FDR {:.3}",
                cell.config.n_batch, cell.config.pi1, bbh.mean_fdr
            ));
        }
    }
    assert!(
        !inflated.is_empty(),
        "no rho = 0.5 cell showed batch_bh FDR above alpha + 2 SE"
    );
    println!(
        "ACCEPTANCE C9 (inflation under correlation): PASS - batch_bh above alpha + 2 SE in \
         {} of 6 cells ({}), toad within alpha + 3 SE everywhere",
        inflated.len(),
        inflated.join("; ")
    );
}

/// Criterion 10: the harmonic shape matches its closed form to 1e-12, and
/// random discrete shapes match Monte Carlo estimates of E[X 1(X <= r)].
#[test]
fn c10_shape_correctness() {
    let beta = ShapeFunction::harmonic(3).unwrap();
    for r in 1..=3usize {
        let expected = r as f64 * 6.0 / 11.0;
        assert!(
            (beta.at_rank(r) - expected).abs() <= 1e-12,
            "harmonic(3) at {r}: {} vs {expected}",
            beta.at_rank(r)
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for case in 0..3 {
        let n = rng.random_range(2..6usize);
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let points: Vec<(f64, f64)> = raw
            .iter()
            .enumerate()
            .map(|(k, &w)| (0.5 + k as f64 + rng.random::<f64>(), w / total))
            .collect();
        let shape = ShapeFunction::from_support(&points).unwrap();
        let support = shape.points().unwrap();

        for r in [0.8, 1.7, 3.2, 10.0] {
            // Inverse-CDF sampling from nu, 10^5 draws.
            let samples = 100_000usize;
            let mut values = Vec::with_capacity(samples);
            for _ in 0..samples {
                let mut u = rng.random::<f64>();
                let mut x = support.last().unwrap().0;
                for &(point, prob) in &support {
                    if u < prob {
                        x = point;
                        break;
                    }
                    u -= prob;
                }
                values.push(if x <= r { x } else { 0.0 });
            }
            let (mc, se) = metrics::mean_and_se(&values).unwrap();
            let exact = shape.evaluate(r).unwrap();
            assert!(
                (mc - exact).abs() <= 4.0 * se.max(1e-9),
                "case {case} r={r}: MC {mc} vs exact {exact} (se {se})"
            );
        }
    }
    println!(
        "ACCEPTANCE C10 (shape correctness): PASS - harmonic(3) exact to 1e-12, 3 random shapes \
         within 4 SE of Monte Carlo at 1e5 samples"
    );
}

/// Criterion 11: fdp_recent equals fdp when nothing has expired, and the
/// decaying-memory campaign with recycled weights controls FDR_recent.
#[test]
fn c11_decaying_memory() {
    // Property part: open deadlines never expire anything.
    let mut rng = ChaCha8Rng::seed_from_u64(1111);
    let open = DeadlineSchedule::open();
    for _ in 0..2000 {
        let stages = rng.random_range(1..=20usize);
        let mut trace = DecisionTrace::new();
        let mut rejected: BTreeSet<usize> = BTreeSet::new();
        for stage in 1..=stages {
            let mut added = Vec::new();
            for i in 1..=stage {
                if !rejected.contains(&i) && rng.random::<f64>() < 0.1 {
                    rejected.insert(i);
                    added.push(i);
                }
            }
            trace.push_stage(StageDelta { added, removed: vec![], step_up_rank: 0 });
        }
        let mask: Vec<bool> = (0..stages).map(|_| rng.random::<bool>()).collect();
        for stage in 1..=stages {
            let a = metrics::fdp(&trace, &mask, stage).unwrap();
            let b = metrics::fdp_recent(&trace, &mask, &open, stage).unwrap();
            assert_eq!(a, b);
        }
    }

    // Campaign part: per-window budget sum_{i in C_t} A_i = 1, recycled.
    let recent = &*RECENT;
    for cell in &recent.cells {
        let s = cell.summary("toad_recent").expect("recent summary");
        let bound = ALPHA + 3.0 * s.se_fdr;
        assert!(
            s.mean_fdr <= bound,
            "cell rho={} n_batch={} pi1={}: FDR_recent {} > {}",
            cell.config.rho,
            cell.config.n_batch,
            cell.config.pi1,
            s.mean_fdr,
            bound
        );
    }
    println!(
        "ACCEPTANCE C11 (decaying memory): PASS - fdp_recent == fdp on 2000 unexpired traces; \
         FDR_recent within alpha + 3 SE in all 12 recycled-weight cells"
    );
}

/// Criterion 12: adaptive stopping after the first batch with >= 5
/// rejections (weights committed just in time) still controls final FDR.
#[test]
fn c12_adaptive_stopping() {
    let stopped = &*STOPPED;
    for cell in &stopped.cells {
        let s = cell.summary("toad_stop:5").expect("stop summary");
        let bound = ALPHA + 3.0 * s.se_fdr;
        assert!(
            s.mean_fdr <= bound,
            "cell rho={} n_batch={} pi1={}: FDR {} > {}",
            cell.config.rho,
            cell.config.n_batch,
            cell.config.pi1,
            s.mean_fdr,
            bound
        );
    }
    println!(
        "ACCEPTANCE C12 (adaptive stopping): PASS - final-stage FDR within alpha + 3 SE in all \
         12 cells"
    );
}

/// Criterion 13: identical seeds produce byte-identical campaign CSVs
/// regardless of the worker count.
#[test]
fn c13_determinism_and_parallel_invariance() {
    let parallel = &*MAIN;
    let serial = &*MAIN_SERIAL;
    assert_eq!(parallel.summary_csv(), serial.summary_csv(), "summary CSVs differ across jobs");
    assert_eq!(parallel.audit_csv(), serial.audit_csv(), "audit CSVs differ across jobs");
    println!(
        "ACCEPTANCE C13 (determinism): PASS - byte-identical summary and audit CSVs at jobs=1 \
         and jobs=8"
    );
}

/// The engine example stream from the stopping scenario also double-checks
/// that a stopped run keeps producing well-formed trace stages.
#[test]
fn stopped_runs_reach_the_declared_horizon() {
    let policy = ConstantPolicy::spread(12)
        .unwrap()
        .with_timing(toad_core::policy::CommitTiming::JustInTime);
    let config = EngineConfig::new(
        0.3,
        ShapeFunction::identity(),
        Box::new(policy),
        DeadlineSchedule::batch(4).unwrap(),
    )
    .with_stop(Box::new(toad_core::engine::BatchRejectionStop::new(4, 2)));
    let mut engine = ToadEngine::new(config, 12).unwrap();
    for p in [0.001, 0.002, 0.9, 0.9, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01] {
        engine.step(p).unwrap();
    }
    assert_eq!(engine.stage(), 12);
    assert_eq!(engine.stopped_after(), Some(4));
    assert_eq!(engine.trace().final_rejections(), BTreeSet::from([1, 2]));
}
