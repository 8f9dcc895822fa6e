//! Ten-level limit order book acting as the obstacle set for incoming agents.

use std::fmt;

use crate::error::{Error, Result};
use crate::physics::{positive_finite, size_at};

/// Levels kept on each side between steps.
pub const BOOK_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    fn index(self) -> usize {
        match self {
            Side::Buy => 0,
            Side::Sell => 1,
        }
    }

    /// Price step pointing away from the touch on this side.
    fn outward(self) -> i64 {
        match self {
            Side::Buy => -1,
            Side::Sell => 1,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceLevel {
    pub price: i64,
    pub size: f64,
}

/// One incoming agent: `[side, price, size]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidAgent {
    pub side: Side,
    pub price: i64,
    pub size: f64,
}

/// What happened when one agent met the book.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionOutcome {
    /// Volume exchanged with the opposite best level.
    pub traded_volume: f64,
    /// Mid-price change caused by the interaction.
    pub price_change: f64,
    /// Spread in ticks before the interaction.
    pub spread_before: i64,
    /// Size times price of the opposite best level before the interaction.
    pub obstacle_notional: f64,
    /// Size times price of the incoming agent.
    pub order_notional: f64,
    pub collision: bool,
}

/// Running per-side account of every size change applied to the book.
///
/// Side-indexed arrays use `[buy, sell]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VolumeLedger {
    pub initial: [f64; 2],
    pub passive_added: [f64; 2],
    pub residual_added: [f64; 2],
    pub traded: [f64; 2],
    pub regenerated: [f64; 2],
    pub truncated: [f64; 2],
}

impl VolumeLedger {
    /// Resting size implied by the recorded flows.
    pub fn expected_total(&self, side: Side) -> f64 {
        let i = side.index();
        self.initial[i] + self.passive_added[i] + self.residual_added[i] + self.regenerated[i]
            - self.traded[i]
            - self.truncated[i]
    }

    /// True when the ledger matches the book on both sides up to round-off.
    pub fn reconciles(&self, book: &OrderBook) -> bool {
        [Side::Buy, Side::Sell].into_iter().all(|side| {
            let actual = book.total_size(side);
            let expected = self.expected_total(side);
            let i = side.index();
            let scale = self.initial[i]
                + self.passive_added[i]
                + self.residual_added[i]
                + self.regenerated[i]
                + self.traded[i]
                + self.truncated[i];
            (actual - expected).abs() <= 1e-9 * scale.max(f64::MIN_POSITIVE)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderBook {
    /// Descending prices, best bid first.
    buys: Vec<PriceLevel>,
    /// Ascending prices, best ask first.
    sells: Vec<PriceLevel>,
    mass: f64,
    smoothing_length: f64,
    ledger: VolumeLedger,
}

impl OrderBook {
    /// Builds the initial book: ten contiguous levels per side starting at
    /// `bid` and `bid + spread`, sized by the kernel anchored at both quotes.
    pub fn new(bid: i64, spread: i64, mass: f64, smoothing_length: f64) -> Result<Self> {
        if bid < 1 {
            return Err(Error::invalid(
                "initial_bid",
                format!("must be at least 1, got {bid}"),
            ));
        }
        if spread < 1 {
            return Err(Error::invalid(
                "initial_spread",
                format!("must be at least 1, got {spread}"),
            ));
        }
        if !positive_finite(mass) {
            return Err(Error::invalid(
                "mass",
                format!("must be positive, got {mass}"),
            ));
        }
        if !positive_finite(smoothing_length) {
            return Err(Error::invalid(
                "smoothing_length",
                format!("must be positive, got {smoothing_length}"),
            ));
        }
        let ask = bid + spread;
        let anchors = (bid, ask);
        let level = |price| PriceLevel {
            price,
            size: kernel_size(price, anchors, mass, smoothing_length),
        };
        let buys: Vec<_> = (0..BOOK_DEPTH as i64).map(|k| level(bid - k)).collect();
        let sells: Vec<_> = (0..BOOK_DEPTH as i64).map(|k| level(ask + k)).collect();
        let mut book = OrderBook {
            buys,
            sells,
            mass,
            smoothing_length,
            ledger: VolumeLedger::default(),
        };
        book.ledger.initial = [book.total_size(Side::Buy), book.total_size(Side::Sell)];
        Ok(book)
    }

    pub fn bid(&self) -> i64 {
        self.buys[0].price
    }

    pub fn ask(&self) -> i64 {
        self.sells[0].price
    }

    pub fn spread(&self) -> i64 {
        self.ask() - self.bid()
    }

    pub fn mid(&self) -> f64 {
        (self.bid() + self.ask()) as f64 / 2.0
    }

    pub fn anchors(&self) -> (i64, i64) {
        (self.bid(), self.ask())
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn smoothing_length(&self) -> f64 {
        self.smoothing_length
    }

    pub fn levels(&self, side: Side) -> &[PriceLevel] {
        match side {
            Side::Buy => &self.buys,
            Side::Sell => &self.sells,
        }
    }

    fn levels_mut(&mut self, side: Side) -> &mut Vec<PriceLevel> {
        match side {
            Side::Buy => &mut self.buys,
            Side::Sell => &mut self.sells,
        }
    }

    pub fn best(&self, side: Side) -> PriceLevel {
        self.levels(side)[0]
    }

    pub fn total_size(&self, side: Side) -> f64 {
        self.levels(side).iter().map(|l| l.size).sum()
    }

    pub fn ledger(&self) -> &VolumeLedger {
        &self.ledger
    }

    /// Price an agent on `side` must hit to trade.
    pub fn collision_price(&self, side: Side) -> i64 {
        self.best(side.opposite()).price
    }

    /// Whether `price` is in the sample space of an agent on `side`:
    /// any own-side level or the opposite best quote.
    pub fn is_admissible(&self, side: Side, price: i64) -> bool {
        price == self.collision_price(side) || self.levels(side).iter().any(|l| l.price == price)
    }

    /// Applies one agent to the book.
    ///
    /// An agent at the opposite best quote trades up to that level's size;
    /// a full fill removes the level and regenerates one at the far end, and
    /// any unfilled remainder rests at the traded price as the new own-side
    /// best. Any other admissible price rests passively on the agent's side.
    pub fn apply_order(&mut self, agent: &FluidAgent) -> Result<InteractionOutcome> {
        if !positive_finite(agent.size) {
            return Err(Error::NonPositiveSize(agent.size));
        }
        if !self.is_admissible(agent.side, agent.price) {
            return Err(Error::InadmissiblePrice {
                side: agent.side,
                price: agent.price,
            });
        }

        let opposite = agent.side.opposite();
        let obstacle = self.best(opposite);
        let mid_before = self.mid();
        let spread_before = self.spread();
        let order_notional = agent.size * agent.price as f64;
        let obstacle_notional = obstacle.size * obstacle.price as f64;

        if agent.price != obstacle.price {
            let own = agent.side;
            let level = self
                .levels_mut(own)
                .iter_mut()
                .find(|l| l.price == agent.price)
                .expect("admissibility checked above");
            level.size += agent.size;
            self.ledger.passive_added[own.index()] += agent.size;
            return Ok(InteractionOutcome {
                traded_volume: 0.0,
                price_change: 0.0,
                spread_before,
                obstacle_notional,
                order_notional,
                collision: false,
            });
        }

        let traded = agent.size.min(obstacle.size);
        self.ledger.traded[opposite.index()] += traded;
        if agent.size >= obstacle.size {
            self.levels_mut(opposite).remove(0);
            let residual = agent.size - traded;
            if residual > 0.0 {
                self.rest_residual(agent.side, agent.price, residual);
            }
            self.regenerate_levels(opposite);
        } else {
            self.levels_mut(opposite)[0].size -= traded;
        }

        Ok(InteractionOutcome {
            traded_volume: traded,
            price_change: self.mid() - mid_before,
            spread_before,
            obstacle_notional,
            order_notional,
            collision: true,
        })
    }

    fn rest_residual(&mut self, side: Side, price: i64, size: f64) {
        let levels = self.levels_mut(side);
        levels.insert(0, PriceLevel { price, size });
        let dropped = if levels.len() > BOOK_DEPTH {
            levels.pop().map_or(0.0, |l| l.size)
        } else {
            0.0
        };
        self.ledger.residual_added[side.index()] += size;
        self.ledger.truncated[side.index()] += dropped;
    }

    /// Refills `side` back to [`BOOK_DEPTH`] levels by appending one level a
    /// tick beyond the current farthest price, sized against the current
    /// bid/ask anchors.
    pub fn regenerate_levels(&mut self, side: Side) {
        let anchors = self.anchors();
        let (mass, h) = (self.mass, self.smoothing_length);
        let mut added = 0.0;
        let levels = self.levels_mut(side);
        while levels.len() < BOOK_DEPTH {
            let far = levels.last().expect("a side never empties").price + side.outward();
            let size = kernel_size(far, anchors, mass, h);
            levels.push(PriceLevel { price: far, size });
            added += size;
        }
        self.ledger.regenerated[side.index()] += added;
    }

    /// Checks the between-step shape of the book.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for side in [Side::Buy, Side::Sell] {
            let levels = self.levels(side);
            if levels.len() != BOOK_DEPTH {
                return Err(format!("{side} side holds {} levels", levels.len()));
            }
            if let Some(l) = levels.iter().find(|l| !positive_finite(l.size)) {
                return Err(format!("{side} level {} has size {}", l.price, l.size));
            }
            let ordered = levels.windows(2).all(|w| match side {
                Side::Buy => w[0].price > w[1].price,
                Side::Sell => w[0].price < w[1].price,
            });
            if !ordered {
                return Err(format!("{side} levels out of order"));
            }
        }
        if self.bid() >= self.ask() {
            return Err(format!(
                "crossed book: bid {} ask {}",
                self.bid(),
                self.ask()
            ));
        }
        Ok(())
    }
}

/// Kernel size, floored at the smallest positive double so far tails that
/// underflow still leave a valid level.
fn kernel_size(price: i64, anchors: (i64, i64), mass: f64, h: f64) -> f64 {
    size_at(price, anchors, mass, h).max(f64::MIN_POSITIVE)
}
