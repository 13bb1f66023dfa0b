//! Timing harness for [`generate_pose_with`].
//!
//! Each scenario is solved once up front and its status checked against the
//! declared one, so a table row always describes the outcome class it claims
//! to. Only the solve call sits inside the timer.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::RobotSpec;
use crate::posegen::{generate_pose_with, ConstraintSet, PoseConfig, Status};

/// A constraint set together with the status it is expected to produce.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub constraints: ConstraintSet,
    pub expected: Status,
}

impl Scenario {
    pub fn new(label: impl Into<String>, constraints: ConstraintSet, expected: Status) -> Self {
        Self { label: label.into(), constraints, expected }
    }
}

/// Wall-clock statistics of one scenario, in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingStats {
    pub label: String,
    pub mean: f64,
    pub std_dev: f64,
    /// Median over batch means; equals `mean` when batching is off.
    pub median_of_batches: f64,
    pub n: usize,
}

impl TimingStats {
    /// Summarizes raw samples. `batch` groups consecutive samples for the
    /// median-of-batches figure; `0` or `1` disables grouping.
    pub fn from_samples(label: impl Into<String>, samples: &[f64], batch: usize) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InvalidInput("timing needs at least one sample".into()));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        // population deviation so that a single sample reports 0
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n as f64;
        let median_of_batches = if batch > 1 {
            let mut means: Vec<f64> = samples
                .chunks(batch)
                .map(|c| c.iter().sum::<f64>() / c.len() as f64)
                .collect();
            means.sort_by(f64::total_cmp);
            let k = means.len();
            if k % 2 == 1 {
                means[k / 2]
            } else {
                0.5 * (means[k / 2 - 1] + means[k / 2])
            }
        } else {
            mean
        };
        Ok(Self { label: label.into(), mean, std_dev: var.sqrt(), median_of_batches, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub n: usize,
    pub warmup: usize,
    /// Samples per batch for [`TimingStats::median_of_batches`].
    pub batch: usize,
    /// Logical core to pin the calling thread to before timing.
    pub pin_core: Option<usize>,
    pub pose: PoseConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { n: 10_000, warmup: 200, batch: 100, pin_core: Some(0), pose: PoseConfig::default() }
    }
}

/// Pins the calling thread to one logical core. Returns false where that is
/// unsupported or refused.
pub fn pin_to_core(core: usize) -> bool {
    #[cfg(target_os = "linux")]
    {
        // SAFETY: cpu_set_t is plain data; the libc macros only touch the set we own.
        unsafe {
            let mut set: libc::cpu_set_t = std::mem::zeroed();
            libc::CPU_ZERO(&mut set);
            libc::CPU_SET(core, &mut set);
            libc::sched_setaffinity(0, std::mem::size_of::<libc::cpu_set_t>(), &set) == 0
        }
    }
    #[cfg(not(target_os = "linux"))]
    {
        let _ = core;
        false
    }
}

/// Checks that the scenario solves to its declared status.
pub fn verify_scenario(spec: &RobotSpec, scenario: &Scenario, cfg: &PoseConfig) -> Result<()> {
    let got = generate_pose_with(spec, &scenario.constraints, cfg)?.report.status;
    if got != scenario.expected {
        return Err(Error::Config(format!(
            "scenario `{}` solved as {got}, expected {}",
            scenario.label, scenario.expected
        )));
    }
    Ok(())
}

/// Times `cfg.n` solves of every scenario after `cfg.warmup` discarded runs.
pub fn bench(spec: &RobotSpec, scenarios: &[Scenario], cfg: &BenchConfig) -> Result<Vec<TimingStats>> {
    if cfg.n == 0 {
        return Err(Error::InvalidInput("bench needs n >= 1".into()));
    }
    for sc in scenarios {
        verify_scenario(spec, sc, &cfg.pose)?;
    }
    if let Some(core) = cfg.pin_core {
        pin_to_core(core);
    }
    let mut out = Vec::with_capacity(scenarios.len());
    let mut samples = Vec::with_capacity(cfg.n);
    for sc in scenarios {
        for _ in 0..cfg.warmup {
            std::hint::black_box(generate_pose_with(spec, &sc.constraints, &cfg.pose)?);
        }
        samples.clear();
        for _ in 0..cfg.n {
            let start = Instant::now();
            let sol = generate_pose_with(spec, std::hint::black_box(&sc.constraints), &cfg.pose);
            let dt = start.elapsed();
            std::hint::black_box(sol?);
            samples.push(dt.as_secs_f64() * 1e6);
        }
        out.push(TimingStats::from_samples(sc.label.clone(), &samples, cfg.batch)?);
    }
    Ok(out)
}
