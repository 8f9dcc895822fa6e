//! Seeded sampler for the incoming agent at each step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::book::{FluidAgent, OrderBook, Side, BOOK_DEPTH};
use crate::error::{Error, Result};
use crate::physics::{positive_finite, size_at};

/// Identity of the generator behind [`AgentSampler`], recorded in outputs.
pub const GENERATOR: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

#[derive(Debug, Clone)]
pub struct AgentSampler {
    collision_probability: f64,
    mass: f64,
    smoothing_length: f64,
    rng: ChaCha8Rng,
}

impl AgentSampler {
    pub fn new(
        collision_probability: f64,
        mass: f64,
        smoothing_length: f64,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&collision_probability) {
            return Err(Error::invalid(
                "collision_probability",
                "must lie in [0, 1]",
            ));
        }
        if !positive_finite(mass) {
            return Err(Error::invalid("mass", "must be positive"));
        }
        if !positive_finite(smoothing_length) {
            return Err(Error::invalid("smoothing_length", "must be positive"));
        }
        Ok(AgentSampler {
            collision_probability,
            mass,
            smoothing_length,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn collision_probability(&self) -> f64 {
        self.collision_probability
    }

    /// Buy or sell with equal probability.
    pub fn sample_side(&mut self) -> Side {
        if self.rng.gen_bool(0.5) {
            Side::Buy
        } else {
            Side::Sell
        }
    }

    /// The opposite best quote with the collision probability, otherwise one
    /// of the ten own-side levels uniformly, `(1 − P)/10` each.
    pub fn sample_price(&mut self, book: &OrderBook, side: Side) -> i64 {
        let u: f64 = self.rng.gen();
        if u < self.collision_probability {
            book.collision_price(side)
        } else {
            let k = self.rng.gen_range(0..BOOK_DEPTH);
            book.levels(side)[k].price
        }
    }

    /// Kernel size at `price` anchored on the current quotes. No randomness.
    pub fn sample_size(&self, price: i64, book: &OrderBook) -> f64 {
        size_at(price, book.anchors(), self.mass, self.smoothing_length).max(f64::MIN_POSITIVE)
    }

    pub fn sample(&mut self, book: &OrderBook) -> FluidAgent {
        let side = self.sample_side();
        let price = self.sample_price(book, side);
        let size = self.sample_size(price, book);
        FluidAgent { side, price, size }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn book() -> OrderBook {
        OrderBook::new(3681, 1, 2000.0, 10.0).unwrap()
    }

    fn three_sigma(p: f64, n: usize) -> f64 {
        3.0 * (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn side_is_fair() {
        let mut s = AgentSampler::new(0.5, 2000.0, 10.0, 11).unwrap();
        let n = 10_000;
        let buys = (0..n).filter(|_| s.sample_side() == Side::Buy).count();
        let frac = buys as f64 / n as f64;
        assert!((frac - 0.5).abs() <= three_sigma(0.5, n), "{frac}");
    }

    #[test]
    fn same_seed_same_sequence() {
        let b = book();
        let mut a = AgentSampler::new(0.7, 2000.0, 10.0, 42).unwrap();
        let mut c = AgentSampler::new(0.7, 2000.0, 10.0, 42).unwrap();
        for _ in 0..500 {
            assert_eq!(a.sample(&b), c.sample(&b));
        }
    }

    #[test]
    fn strong_collision_buys_hit_the_ask() {
        let b = book();
        let mut s = AgentSampler::new(0.99, 2000.0, 10.0, 5).unwrap();
        let n = 10_000;
        let hits = (0..n)
            .filter(|_| s.sample_price(&b, Side::Buy) == b.ask())
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.99).abs() <= three_sigma(0.99, n), "{frac}");
    }

    #[test]
    fn weak_collision_sells_hit_the_bid() {
        let b = book();
        let mut s = AgentSampler::new(0.15, 2000.0, 10.0, 6).unwrap();
        let n = 10_000;
        let hits = (0..n)
            .filter(|_| s.sample_price(&b, Side::Sell) == b.bid())
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.15).abs() <= three_sigma(0.15, n), "{frac}");
    }

    #[test]
    fn zero_probability_never_collides() {
        let b = book();
        let mut s = AgentSampler::new(0.0, 2000.0, 10.0, 7).unwrap();
        let n = 10_000;
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for _ in 0..n {
            *counts.entry(s.sample_price(&b, Side::Buy)).or_default() += 1;
        }
        assert!(!counts.contains_key(&b.ask()));
        assert_eq!(counts.len(), 10);
        for (_, c) in counts {
            let f = c as f64 / n as f64;
            assert!((f - 0.1).abs() <= three_sigma(0.1, n), "{f}");
        }
    }

    #[test]
    fn sizes_follow_the_kernel() {
        let b = book();
        let s = AgentSampler::new(0.5, 2000.0, 10.0, 0).unwrap();
        assert!((s.sample_size(3681, &b) - 0.7148).abs() < 1e-4);
        assert_eq!(s.sample_size(3681, &b), s.sample_size(3682, &b));
        let mut prev = s.sample_size(3681, &b);
        for p in (3660..3681).rev() {
            let cur = s.sample_size(p, &b);
            assert!(cur <= prev && cur > 0.0);
            prev = cur;
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(AgentSampler::new(1.2, 2000.0, 10.0, 0).is_err());
        assert!(AgentSampler::new(-0.1, 2000.0, 10.0, 0).is_err());
    }
}
