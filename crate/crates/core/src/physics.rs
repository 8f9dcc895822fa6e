//! Pure formulas: the Gaussian smoothing kernel, density and viscosity
//! analogs, the collision ratio and both Reynolds-number forms.
//!
//! Extended reals are plain `f64` values where `f64::INFINITY` is a
//! legitimate result (no trade gives infinite density and viscosity).

use std::f64::consts::PI;
use std::fmt;

use crate::book::InteractionOutcome;
use crate::error::{Error, Result};

/// Lower Reynolds bound of the transitional band.
pub const LAMINAR_UPPER: f64 = 2300.0;
/// Upper Reynolds bound of the transitional band.
pub const TURBULENT_LOWER: f64 = 2900.0;

/// False for NaN, zero, negatives and infinities.
pub(crate) fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// Gaussian smoothing kernel `W(r; h) = exp(-r²/h²) / (h³ π^{3/2})`.
pub fn kernel_weight(r: f64, h: f64) -> Result<f64> {
    if !positive_finite(h) {
        return Err(Error::invalid(
            "smoothing_length",
            format!("must be positive, got {h}"),
        ));
    }
    Ok(kernel_unchecked(r, h))
}

#[inline]
fn kernel_unchecked(r: f64, h: f64) -> f64 {
    (-(r * r) / (h * h)).exp() / (h.powi(3) * PI.powf(1.5))
}

/// Kernel-reconstructed size at `price`, anchored at the bid and ask.
///
/// Callers guarantee `h > 0`; `m = 0` degenerates to zero.
pub fn size_at(price: i64, anchors: (i64, i64), m: f64, h: f64) -> f64 {
    let (bid, ask) = anchors;
    m * (kernel_unchecked((price - bid) as f64, h) + kernel_unchecked((price - ask) as f64, h))
}

/// `S·P / V`, infinite when nothing traded.
pub fn obstacle_density(size: f64, price: f64, traded: f64) -> f64 {
    density(size * price, traded)
}

/// `S_order·P_order / V`, infinite when nothing traded.
pub fn fluid_density(size: f64, price: f64, traded: f64) -> f64 {
    density(size * price, traded)
}

fn density(notional: f64, traded: f64) -> f64 {
    if traded == 0.0 {
        f64::INFINITY
    } else {
        notional / traded
    }
}

/// Market viscosity analog, finite and nonnegative or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Viscosity(f64);

impl Viscosity {
    pub const INFINITE: Viscosity = Viscosity(f64::INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl fmt::Display for Viscosity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Notional imbalance per unit of traded momentum.
///
/// The magnitude is taken so buy- and sell-led interactions are comparable:
/// a buy that overshoots the ask level moves the price up while the notional
/// difference is negative.
pub fn viscosity(outcome: &InteractionOutcome) -> Viscosity {
    let momentum = outcome.traded_volume * outcome.price_change;
    if momentum == 0.0 {
        return Viscosity::INFINITE;
    }
    let imbalance = outcome.obstacle_notional - outcome.order_notional;
    Viscosity((imbalance / momentum).abs())
}

/// Realized collision ratio: order notional over the opposite best notional,
/// clamped to `[0, 1]`. Passive interactions give 0.
pub fn collision_ratio(outcome: &InteractionOutcome) -> Result<f64> {
    if !positive_finite(outcome.obstacle_notional) {
        return Err(Error::DegenerateBook);
    }
    if !outcome.collision {
        return Ok(0.0);
    }
    Ok((outcome.order_notional / outcome.obstacle_notional).clamp(0.0, 1.0))
}

/// Reynolds number from the realized notionals of one interaction.
///
/// Evaluated as `ratio·v²·l / (1 − ratio)`, which diverges at a perfect
/// collision.
pub fn reynolds_tick(outcome: &InteractionOutcome) -> Result<f64> {
    let ratio = collision_ratio(outcome)?;
    let speed = outcome.price_change;
    if speed == 0.0 || ratio == 0.0 {
        return Ok(0.0);
    }
    if ratio >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let travel = outcome.spread_before as f64;
    Ok(ratio * speed * speed * travel / (1.0 - ratio))
}

/// `v²·l·P/(1−P)`: squared market speed times spread times the odds of a
/// collision.
pub fn reynolds_closed_form(speed: f64, travel: f64, probability: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&probability) {
        return Err(Error::CollisionProbabilityTooHigh(probability));
    }
    if !positive_finite(travel) {
        return Err(Error::invalid(
            "spread",
            format!("must be positive, got {travel}"),
        ));
    }
    Ok(speed * speed * travel * odds(probability))
}

/// Odds in favour of a collision, `P/(1−P)`; infinite at `P = 1`.
pub fn odds(probability: f64) -> f64 {
    if probability >= 1.0 {
        f64::INFINITY
    } else {
        probability / (1.0 - probability)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowRegime {
    Laminar,
    Transitional,
    Turbulent,
}

impl FlowRegime {
    pub fn label(self) -> &'static str {
        match self {
            FlowRegime::Laminar => "laminar",
            FlowRegime::Transitional => "transitional",
            FlowRegime::Turbulent => "turbulent",
        }
    }
}

impl fmt::Display for FlowRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Both threshold values themselves are transitional.
pub fn classify_flow(reynolds: f64) -> FlowRegime {
    if reynolds < LAMINAR_UPPER {
        FlowRegime::Laminar
    } else if reynolds > TURBULENT_LOWER {
        FlowRegime::Turbulent
    } else {
        FlowRegime::Transitional
    }
}
