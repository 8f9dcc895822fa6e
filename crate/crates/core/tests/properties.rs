use proptest::prelude::*;

use market_flow::book::{FluidAgent, OrderBook, Side};
use market_flow::engine::run;
use market_flow::physics::{collision_ratio, reynolds_closed_form, reynolds_tick};
use market_flow::sweep::{batch_runs, ParamGrid, RunSummary};
use market_flow::{AgentSampler, InteractionOutcome, SimConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn book_stays_valid_and_ledger_reconciles(
        p in 0.0f64..=1.0,
        spread in 1i64..30,
        seed in any::<u64>(),
        steps in 1usize..400,
    ) {
        let mut book = OrderBook::new(3681, spread, 2000.0, 10.0).unwrap();
        let mut sampler = AgentSampler::new(p, 2000.0, 10.0, seed).unwrap();
        for _ in 0..steps {
            let agent = sampler.sample(&book);
            book.apply_order(&agent).unwrap();
            prop_assert_eq!(book.check_invariants(), Ok(()));
            prop_assert!(book.ledger().reconciles(&book));
        }
    }

    #[test]
    fn passive_orders_leave_quotes_alone(
        seed in any::<u64>(),
        level in 0usize..10,
        buy in any::<bool>(),
        size in 1e-6f64..10.0,
    ) {
        let mut book = OrderBook::new(3681, 3, 2000.0, 10.0).unwrap();
        let mut sampler = AgentSampler::new(0.9, 2000.0, 10.0, seed).unwrap();
        for _ in 0..50 {
            let agent = sampler.sample(&book);
            book.apply_order(&agent).unwrap();
        }
        let side = if buy { Side::Buy } else { Side::Sell };
        let price = book.levels(side)[level].price;
        let quotes = (book.bid(), book.ask(), book.spread());
        let out = book.apply_order(&FluidAgent { side, price, size }).unwrap();
        prop_assert!(!out.collision);
        prop_assert_eq!((book.bid(), book.ask(), book.spread()), quotes);
    }

    #[test]
    fn fills_never_exceed_order_or_level(seed in any::<u64>(), p in 0.5f64..=1.0) {
        let mut book = OrderBook::new(3681, 1, 2000.0, 10.0).unwrap();
        let mut sampler = AgentSampler::new(p, 2000.0, 10.0, seed).unwrap();
        for _ in 0..200 {
            let agent = sampler.sample(&book);
            let opposite = book.levels(agent.side.opposite());
            let (level, next) = (opposite[0], opposite[1]);
            let out = book.apply_order(&agent).unwrap();
            prop_assert!(out.traded_volume <= agent.size.min(level.size));
            if !out.collision {
                prop_assert_eq!(out.traded_volume, 0.0);
                prop_assert_eq!(out.price_change, 0.0);
            }
            if out.collision && agent.size == level.size {
                let gap = (next.price - level.price).abs() as f64;
                prop_assert_eq!(out.price_change.abs(), gap / 2.0);
            }
        }
    }

    #[test]
    fn realized_reynolds_matches_closed_form(
        obstacle in 1e-3f64..1e4,
        ratio in 1e-6f64..0.999_999,
        speed in -20.0f64..20.0,
        spread in 1i64..100,
    ) {
        let outcome = InteractionOutcome {
            traded_volume: obstacle * ratio / 100.0,
            price_change: speed,
            spread_before: spread,
            obstacle_notional: obstacle,
            order_notional: obstacle * ratio,
            collision: true,
        };
        let p_hat = collision_ratio(&outcome).unwrap();
        let tick = reynolds_tick(&outcome).unwrap();
        let closed = reynolds_closed_form(speed, spread as f64, p_hat).unwrap();
        prop_assert!((tick - closed).abs() <= 1e-12 * closed.abs().max(f64::MIN_POSITIVE));
    }
}

#[test]
fn exact_full_fills_move_mid_by_half_the_gap() {
    let mut book = OrderBook::new(3681, 1, 2000.0, 10.0).unwrap();
    for k in 0..40 {
        let side = if k % 3 == 0 { Side::Sell } else { Side::Buy };
        let opposite = book.levels(side.opposite());
        let (level, next) = (opposite[0], opposite[1]);
        let out = book
            .apply_order(&FluidAgent {
                side,
                price: level.price,
                size: level.size,
            })
            .unwrap();
        assert_eq!(
            out.price_change.abs(),
            (next.price - level.price).abs() as f64 / 2.0
        );
        assert_eq!(out.price_change.abs(), 0.5);
    }
}

#[test]
fn batch_matches_independent_runs() {
    let base = SimConfig {
        steps: 120,
        ..SimConfig::default()
    };
    let grid = ParamGrid {
        collision_probabilities: vec![0.15, 0.99],
        spreads: vec![1, 20],
    };
    let seeds = [3, 1, 4, 1, 5];
    let cells = batch_runs(&base, &grid, &seeds).unwrap();
    assert_eq!(cells.len(), 20);
    for cell in &cells {
        let direct = RunSummary::from(&run(&cell.config).unwrap());
        assert_eq!(cell.summary.as_ref().unwrap(), &direct);
    }
    let again = batch_runs(&base, &grid, &seeds).unwrap();
    for (a, b) in cells.iter().zip(&again) {
        assert_eq!(a.config, b.config);
        assert_eq!(a.summary.as_ref().unwrap(), b.summary.as_ref().unwrap());
    }
}
