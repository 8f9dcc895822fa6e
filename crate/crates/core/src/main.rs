use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use market_flow::agents::GENERATOR;
use market_flow::io::{
    parse_config, render_grid_svg, render_series_svg, write_batch_csv, write_grid_csv,
    write_series_csv, ConfigOverrides,
};
use market_flow::sweep::{
    batch_runs, default_probability_axis, default_speed_axis, default_spread_axis, surface_speed,
    surface_spread, ParamGrid,
};
use market_flow::{run, Result, SimConfig};

#[derive(Parser)]
#[command(
    name = "market-flow",
    version,
    about = "Order-book viscosity and Reynolds-number simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its per-step series.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Run every (probability, spread) pair over a range of seeds.
    Batch {
        #[command(flatten)]
        common: Common,
        /// Collision probabilities to sweep (comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = [0.15, 0.99])]
        probabilities: Vec<f64>,
        /// Initial spreads to sweep (comma separated).
        #[arg(long, value_delimiter = ',')]
        spreads: Vec<i64>,
        /// Number of consecutive seeds, starting at --seed.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
    },
    /// Tabulate the closed-form Reynolds surface.
    Surface {
        #[arg(long, value_enum, default_value_t = SurfaceArg::Speed)]
        kind: SurfaceArg,
        /// Spread held fixed on the speed surface.
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
        /// Market speed held fixed on the spread surface.
        #[arg(long, default_value_t = 0.5)]
        speed: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Speed,
    Spread,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    collision_probability: Option<f64>,
    #[arg(long)]
    spread: Option<i64>,
    #[arg(long)]
    bid: Option<i64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    smoothing_length: Option<f64>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    svg: bool,
}

impl Common {
    fn load(&self) -> Result<SimConfig> {
        let overrides = ConfigOverrides {
            initial_bid: self.bid,
            initial_spread: self.spread,
            mass: self.mass,
            smoothing_length: self.smoothing_length,
            collision_probability: self.collision_probability,
            steps: self.steps,
            seed: self.seed,
            smoothing_window: self.window,
        };
        parse_config(self.config.as_deref(), &overrides)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common } => {
            let config = common.load()?;
            let bundle = run(&config)?;
            let stem = format!(
                "series_p{}_l{}_s{}",
                config.collision_probability, config.initial_spread, config.seed
            );
            let csv = common.out.join(format!("{stem}.csv"));
            write_series_csv(&bundle, &csv)?;
            println!("{}", csv.display());
            if common.svg {
                let svg = common.out.join(format!("{stem}.svg"));
                render_series_svg(&bundle, &svg)?;
                println!("{}", svg.display());
            }
        }
        Command::Batch {
            common,
            probabilities,
            spreads,
            seeds,
        } => {
            let base = common.load()?;
            let spreads = if spreads.is_empty() {
                vec![base.initial_spread]
            } else {
                spreads
            };
            let grid = ParamGrid {
                collision_probabilities: probabilities,
                spreads,
            };
            let seed_list: Vec<u64> = (0..seeds).map(|k| base.seed.wrapping_add(k)).collect();
            let cells = batch_runs(&base, &grid, &seed_list)?;
            let failed = cells.iter().filter(|c| c.summary.is_err()).count();
            let path = common.out.join("batch.csv");
            write_batch_csv(&base, &cells, GENERATOR, &path)?;
            println!("{}", path.display());
            if failed > 0 {
                eprintln!(
                    "{failed} of {} cells failed; see the error column",
                    cells.len()
                );
            }
        }
        Command::Surface {
            kind,
            spread,
            speed,
            out,
            svg,
        } => {
            let probabilities = default_probability_axis();
            let (grid, name) = match kind {
                SurfaceArg::Speed => (
                    surface_speed(&default_speed_axis(), &probabilities, spread)?,
                    "surface_speed",
                ),
                SurfaceArg::Spread => (
                    surface_spread(&default_spread_axis(), &probabilities, speed)?,
                    "surface_spread",
                ),
            };
            let csv = out.join(format!("{name}.csv"));
            write_grid_csv(&grid, &csv)?;
            println!("{}", csv.display());
            if svg {
                let path = out.join(format!("{name}.svg"));
                render_grid_svg(&grid, &path)?;
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
