//! Discrete-time loop: sample an agent, apply it to the book, read out the
//! physics, and post-process the viscosity and Reynolds series.

use crate::agents::{AgentSampler, GENERATOR};
use crate::book::OrderBook;
use crate::config::SimConfig;
use crate::error::Result;
use crate::physics::{
    classify_flow, collision_ratio, fluid_density, obstacle_density, reynolds_closed_form,
    reynolds_tick, viscosity, FlowRegime, Viscosity,
};

/// Physics readout for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: usize,
    /// Quotes after the step.
    pub bid: i64,
    pub ask: i64,
    pub mid: f64,
    /// Simple mid-price return over the step.
    pub ret: f64,
    /// Mid-price change `v_T`.
    pub price_change: f64,
    /// Spread before the step, the travel length `l`.
    pub spread: i64,
    pub traded_volume: f64,
    pub rho_obstacle: f64,
    pub rho_fluid: f64,
    pub mu: Viscosity,
    /// Realized collision ratio of the interaction.
    pub p_hat: f64,
    /// `v_T²·l·P/(1−P)` at the configured collision probability.
    pub reynolds: f64,
    /// The same form evaluated with the realized ratio `p_hat`; only ever
    /// 0 or `+∞` under capped fills.
    pub reynolds_realized: f64,
    /// Regime of `reynolds`.
    pub regime: FlowRegime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub config: SimConfig,
    pub generator: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBundle {
    pub ticks: Vec<TickRecord>,
    pub smoothed_mu: Vec<f64>,
    pub smoothed_reynolds: Vec<f64>,
    pub final_book: OrderBook,
    pub metadata: RunMetadata,
}

impl SeriesBundle {
    pub fn final_smoothed_mu(&self) -> f64 {
        self.smoothed_mu.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_smoothed_reynolds(&self) -> f64 {
        self.smoothed_reynolds.last().copied().unwrap_or(f64::NAN)
    }

    pub fn max_raw_reynolds(&self) -> f64 {
        self.ticks.iter().map(|t| t.reynolds).fold(0.0, f64::max)
    }

    /// Population variance of the per-step returns.
    pub fn return_variance(&self) -> f64 {
        let n = self.ticks.len() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let mean = self.ticks.iter().map(|t| t.ret).sum::<f64>() / n;
        self.ticks
            .iter()
            .map(|t| (t.ret - mean).powi(2))
            .sum::<f64>()
            / n
    }

    /// Counts of laminar, transitional and turbulent ticks.
    pub fn regime_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for t in &self.ticks {
            counts[match t.regime {
                FlowRegime::Laminar => 0,
                FlowRegime::Transitional => 1,
                FlowRegime::Turbulent => 2,
            }] += 1;
        }
        counts
    }
}

pub fn init_book(config: &SimConfig) -> Result<OrderBook> {
    OrderBook::new(
        config.initial_bid,
        config.initial_spread,
        config.mass,
        config.smoothing_length,
    )
}

/// A single run in progress. The book can be inspected between steps.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SimConfig,
    book: OrderBook,
    sampler: AgentSampler,
    t: usize,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let book = init_book(&config)?;
        let sampler = AgentSampler::new(
            config.collision_probability,
            config.mass,
            config.smoothing_length,
            config.seed,
        )?;
        Ok(Simulation {
            config,
            book,
            sampler,
            t: 0,
        })
    }

    pub fn book(&self) -> &OrderBook {
        &self.book
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn step(&mut self) -> Result<TickRecord> {
        let agent = self.sampler.sample(&self.book);
        let mid_before = self.book.mid();
        let obstacle = self.book.best(agent.side.opposite());
        let outcome = self.book.apply_order(&agent)?;

        let p_hat = collision_ratio(&outcome)?;
        let reynolds = configured_reynolds(
            outcome.price_change,
            outcome.spread_before,
            self.config.collision_probability,
        );
        let record = TickRecord {
            t: self.t,
            bid: self.book.bid(),
            ask: self.book.ask(),
            mid: self.book.mid(),
            ret: self.book.mid() / mid_before - 1.0,
            price_change: outcome.price_change,
            spread: outcome.spread_before,
            traded_volume: outcome.traded_volume,
            rho_obstacle: obstacle_density(
                obstacle.size,
                obstacle.price as f64,
                outcome.traded_volume,
            ),
            rho_fluid: fluid_density(agent.size, agent.price as f64, outcome.traded_volume),
            mu: viscosity(&outcome),
            p_hat,
            reynolds,
            reynolds_realized: reynolds_tick(&outcome)?,
            regime: classify_flow(reynolds),
        };
        self.t += 1;
        Ok(record)
    }

    /// Remaining steps, then smoothing.
    pub fn finish(self) -> Result<SeriesBundle> {
        self.finish_with(|_, _| {})
    }

    /// Like [`Simulation::finish`], handing each record and the book after
    /// that step to `observe`.
    pub fn finish_with<F>(mut self, mut observe: F) -> Result<SeriesBundle>
    where
        F: FnMut(&TickRecord, &OrderBook),
    {
        let mut ticks = Vec::with_capacity(self.config.steps.saturating_sub(self.t));
        while self.t < self.config.steps {
            let record = self.step()?;
            observe(&record, &self.book);
            ticks.push(record);
        }
        Ok(assemble(self.config, ticks, self.book))
    }
}

fn configured_reynolds(speed: f64, spread: i64, probability: f64) -> f64 {
    if speed == 0.0 {
        0.0
    } else if probability >= 1.0 {
        f64::INFINITY
    } else {
        reynolds_closed_form(speed, spread as f64, probability)
            .expect("probability below 1 and spread positive")
    }
}

fn assemble(config: SimConfig, ticks: Vec<TickRecord>, final_book: OrderBook) -> SeriesBundle {
    let raw_mu: Vec<f64> = ticks.iter().map(|t| t.mu.value()).collect();
    let raw_re: Vec<f64> = ticks.iter().map(|t| t.reynolds).collect();
    SeriesBundle {
        smoothed_mu: smooth_viscosity(&raw_mu, config.viscosity_clamp, config.smoothing_window),
        smoothed_reynolds: smooth_series(&raw_re, config.smoothing_window),
        ticks,
        final_book,
        metadata: RunMetadata {
            config,
            generator: GENERATOR,
            version: env!("CARGO_PKG_VERSION"),
        },
    }
}

/// Runs `config.steps` steps from a fresh book.
pub fn run(config: &SimConfig) -> Result<SeriesBundle> {
    Simulation::new(config.clone())?.finish()
}

/// Clamp infinities, normalize finite values by their maximum, then apply a
/// trailing moving average.
///
/// Clamped entries stay at `clamp` and do not take part in the maximum. When
/// the finite maximum is zero the finite entries stay at zero.
pub fn smooth_viscosity(raw: &[f64], clamp: f64, window: usize) -> Vec<f64> {
    let max = raw
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    let normalized: Vec<f64> = raw
        .iter()
        .map(|&v| match max {
            _ if !v.is_finite() => clamp,
            Some(m) if m > 0.0 => v / m,
            _ => 0.0,
        })
        .collect();
    smooth_series(&normalized, window)
}

/// Trailing moving average; the first `window − 1` points average over the
/// history available so far.
pub fn smooth_series(raw: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    (0..raw.len())
        .map(|i| {
            let start = (i + 1).saturating_sub(window);
            let slice = &raw[start..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}
