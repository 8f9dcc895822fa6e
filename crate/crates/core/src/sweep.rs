//! Closed-form Reynolds surfaces and multi-seed batch runs.

use crate::config::SimConfig;
use crate::engine::{run, SeriesBundle};
use crate::error::{Error, Result};
use crate::physics::reynolds_closed_form;

/// Which input runs along the x axis of a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// x is the market speed `v_T`; the spread is held fixed.
    Speed,
    /// x is the spread `l`; the market speed is held fixed.
    Spread,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    pub kind: SurfaceKind,
    pub x_axis: Vec<f64>,
    /// Collision probabilities.
    pub y_axis: Vec<f64>,
    /// `values[i][j]` is evaluated at `(x_axis[j], y_axis[i])`.
    pub values: Vec<Vec<f64>>,
    /// The held-constant input: the spread for `Speed`, the speed for `Spread`.
    pub fixed: f64,
}

impl SurfaceGrid {
    /// Largest value with its `(row, column)`; ties keep the first.
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let mut best: Option<(usize, usize, f64)> = None;
        for (i, row) in self.values.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((i, j, v));
                }
            }
        }
        best
    }
}

/// `N_R` over market speed × collision probability at fixed spread.
pub fn surface_speed(speeds: &[f64], probabilities: &[f64], spread: f64) -> Result<SurfaceGrid> {
    let values = tabulate(speeds, probabilities, |v, p| {
        reynolds_closed_form(v, spread, p)
    })?;
    Ok(SurfaceGrid {
        kind: SurfaceKind::Speed,
        x_axis: speeds.to_vec(),
        y_axis: probabilities.to_vec(),
        values,
        fixed: spread,
    })
}

/// `N_R` over spread × collision probability at fixed market speed.
pub fn surface_spread(spreads: &[f64], probabilities: &[f64], speed: f64) -> Result<SurfaceGrid> {
    let values = tabulate(spreads, probabilities, |l, p| {
        reynolds_closed_form(speed, l, p)
    })?;
    Ok(SurfaceGrid {
        kind: SurfaceKind::Spread,
        x_axis: spreads.to_vec(),
        y_axis: probabilities.to_vec(),
        values,
        fixed: speed,
    })
}

fn tabulate(xs: &[f64], ps: &[f64], f: impl Fn(f64, f64) -> Result<f64>) -> Result<Vec<Vec<f64>>> {
    if let Some(&p) = ps.iter().find(|&&p| !(0.0..1.0).contains(&p)) {
        return Err(Error::CollisionProbabilityTooHigh(p));
    }
    ps.iter()
        .map(|&p| xs.iter().map(|&x| f(x, p)).collect())
        .collect()
}

/// Inclusive range `start, start + step, …` up to `end` (with a half-step
/// tolerance so decimal steps land on the end point).
pub fn linspace_step(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0, "step must be positive");
    let n = ((end - start) / step + 0.5).floor() as i64;
    (0..=n.max(-1)).map(|k| start + k as f64 * step).collect()
}

/// Speed axis `[-5, 5]` in steps of 0.25.
pub fn default_speed_axis() -> Vec<f64> {
    linspace_step(-5.0, 5.0, 0.25)
}

/// Spread axis `1..=20`.
pub fn default_spread_axis() -> Vec<f64> {
    (1..=20).map(f64::from).collect()
}

/// Probability axis `[0, 0.99]` in steps of 0.01.
pub fn default_probability_axis() -> Vec<f64> {
    (0..=99).map(|k| k as f64 / 100.0).collect()
}

/// Values swept by [`batch_runs`]; each config is the base with one
/// (probability, spread) pair substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub collision_probabilities: Vec<f64>,
    pub spreads: Vec<i64>,
}

impl ParamGrid {
    pub fn configs(&self, base: &SimConfig) -> Vec<SimConfig> {
        let mut out = Vec::with_capacity(self.collision_probabilities.len() * self.spreads.len());
        for &p in &self.collision_probabilities {
            for &spread in &self.spreads {
                out.push(SimConfig {
                    collision_probability: p,
                    initial_spread: spread,
                    ..base.clone()
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub final_smoothed_mu: f64,
    pub final_smoothed_reynolds: f64,
    pub max_raw_reynolds: f64,
    pub return_variance: f64,
    /// Laminar, transitional, turbulent tick counts.
    pub regimes: [usize; 3],
}

impl From<&SeriesBundle> for RunSummary {
    fn from(b: &SeriesBundle) -> Self {
        RunSummary {
            final_smoothed_mu: b.final_smoothed_mu(),
            final_smoothed_reynolds: b.final_smoothed_reynolds(),
            max_raw_reynolds: b.max_raw_reynolds(),
            return_variance: b.return_variance(),
            regimes: b.regime_counts(),
        }
    }
}

#[derive(Debug)]
pub struct BatchCell {
    pub config: SimConfig,
    pub summary: Result<RunSummary>,
}

/// One summary per (config, seed), configs outermost. A failing cell records
/// its error and the batch carries on.
pub fn batch_runs(base: &SimConfig, grid: &ParamGrid, seeds: &[u64]) -> Result<Vec<BatchCell>> {
    let configs = grid.configs(base);
    if configs.is_empty() || seeds.is_empty() {
        return Err(Error::invalid(
            "grid",
            "batch grid and seed list must be nonempty",
        ));
    }
    let cells = configs
        .iter()
        .flat_map(|c| {
            seeds
                .iter()
                .map(move |&seed| SimConfig { seed, ..c.clone() })
        })
        .collect::<Vec<_>>();

    let summaries: Vec<Result<RunSummary>> = std::thread::scope(|scope| {
        let handles: Vec<_> = cells
            .chunks(chunk_len(cells.len()))
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|c| run(c).map(|b| RunSummary::from(&b)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("batch worker panicked"))
            .collect()
    });

    Ok(cells
        .into_iter()
        .zip(summaries)
        .map(|(config, summary)| BatchCell { config, summary })
        .collect())
}

fn chunk_len(total: usize) -> usize {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    total.div_ceil(workers).max(1)
}
