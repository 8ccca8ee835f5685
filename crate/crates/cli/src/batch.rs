//! Parallel resistance sweeps.
//!
//! Every `(C, mode)` pair is an independent run. Workers pull jobs from a
//! shared counter and the table is assembled afterwards, so the result does
//! not depend on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use mecpath_core::sim::{self, Comparison, RunSummary, ScenarioConfig, SweepResult, SweepRow};

use crate::error::CliError;

pub fn parallel_sweep(
    base: &ScenarioConfig,
    c_values: &[f64],
    cmp: Comparison,
    threads: usize,
) -> Result<SweepResult, CliError> {
    sim::validate_sweep(base, c_values)?;
    let jobs: Vec<ScenarioConfig> = c_values
        .iter()
        .flat_map(|&c| {
            [cmp.conventional, cmp.proposed].map(|m| base.clone().with_resistance(c).with_mode(m))
        })
        .collect();

    let next = AtomicUsize::new(0);
    let workers = threads.clamp(1, jobs.len());
    let mut done: Vec<(usize, RunSummary)> = thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(cfg) = jobs.get(i) else { break };
                        local.push((i, sim::run_with(cfg, |_| {})));
                    }
                    local
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("sweep worker panicked")).map(|(i, r)| r.map(|s| (i, s))).collect::<Result<_, _>>()
    })?;
    done.sort_by_key(|(i, _)| *i);

    let rows = done
        .chunks_exact(2)
        .zip(c_values)
        .map(|(pair, &c)| SweepRow::from_runs(c, base.controller.nominal_resistance, &pair[0].1, &pair[1].1))
        .collect();
    Ok(SweepResult::from_rows(rows))
}

pub fn default_threads() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}
