//! Step-count scaling runs of a single in-process instance.
//!
//! Peak resident memory comes from `VmHWM` in `/proc/self/status`; the
//! high-water mark is reset through `/proc/self/clear_refs` before each run
//! where the kernel allows it. Elsewhere memory is reported as unknown.

use std::fmt;
use std::fs;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::behavioral;
use crate::config::BenchConfig;
use crate::cosim::{instantiate, CoSimSchedule, CosimError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub steps: u64,
    #[serde(serialize_with = "as_secs")]
    pub wall: Duration,
    pub peak_rss_kib: Option<u64>,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub model: String,
    pub step: String,
    pub rows: Vec<BenchRow>,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {} at step {} s", self.model, self.step)?;
        writeln!(f, "steps, wall_ms, peak_rss_kib")?;
        for r in &self.rows {
            let mem = r.peak_rss_kib.map_or_else(|| "n/a".to_string(), |k| k.to_string());
            writeln!(f, "{}, {:.3}, {mem}", r.steps, r.wall.as_secs_f64() * 1e3)?;
        }
        Ok(())
    }
}

fn status_kib(key: &str) -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with(key))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Peak resident set size of this process, KiB.
pub fn peak_rss_kib() -> Option<u64> {
    status_kib("VmHWM:")
}

/// Resets the peak to the current resident size. Returns false when unsupported.
pub fn reset_peak_rss() -> bool {
    fs::write("/proc/self/clear_refs", "5").is_ok()
}

/// Runs `steps` scheduled steps of one fresh instance of `model`.
pub fn run_once(model: &str, step: crate::time::RationalTime, steps: u64) -> Result<BenchRow, CosimError> {
    let backend = behavioral::backend(model).ok_or_else(|| CosimError::UnknownInstance(model.to_string()))?;
    let schedule = CoSimSchedule::new(step * steps).instance(model, backend, step);
    reset_peak_rss();
    let start = Instant::now();
    let mut network = instantiate(schedule)?;
    let stats = network.run_with(|row| {
        std::hint::black_box(row);
    })?;
    let wall = start.elapsed();
    debug_assert_eq!(stats.steps[model], steps);
    Ok(BenchRow { steps, wall, peak_rss_kib: peak_rss_kib() })
}

pub fn run(config: &BenchConfig) -> Result<BenchReport, CosimError> {
    // Warm-up so the first measured run does not pay for lazy initialization.
    run_once(&config.model, config.step, 10)?;
    let mut rows = Vec::with_capacity(config.steps.len());
    for &n in &config.steps {
        let mut best = run_once(&config.model, config.step, n)?;
        for _ in 1..config.repeats.max(1) {
            let row = run_once(&config.model, config.step, n)?;
            best.wall = best.wall.min(row.wall);
            best.peak_rss_kib = best.peak_rss_kib.max(row.peak_rss_kib);
        }
        rows.push(best);
    }
    Ok(BenchReport { model: config.model.clone(), step: config.step.to_string(), rows })
}
