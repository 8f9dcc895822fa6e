use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::config::{SimConfig, KEYS};
use crate::engine::SeriesBundle;
use crate::error::Result;
use crate::sweep::{BatchCell, SurfaceGrid, SurfaceKind};

pub const SERIES_COLUMNS: [&str; 15] = [
    "t",
    "bid",
    "ask",
    "mid",
    "return",
    "v_T",
    "l",
    "V",
    "p_hat",
    "mu_raw",
    "mu_smoothed",
    "reynolds_raw",
    "reynolds_smoothed",
    "regime",
    "reynolds_realized",
];

/// Six decimals, `inf` for positive infinity, no negative zero.
pub fn format_value(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == 0.0 {
        "0.000000".to_string()
    } else {
        format!("{x:.6}")
    }
}

fn tool_line() -> String {
    format!(
        "# {} {}\n",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    )
}

fn config_header(out: &mut String, config: &SimConfig, generator: &str) {
    out.push_str(&tool_line());
    let _ = writeln!(out, "# generator: {generator}");
    for (key, value) in config.entries() {
        let _ = writeln!(out, "# {key} = {value}");
    }
}

/// Recovers the run configuration from a series CSV header.
pub fn config_from_header(text: &str) -> Result<SimConfig> {
    let lines: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim())
        .filter(|l| {
            l.split_once('=')
                .is_some_and(|(k, _)| KEYS.contains(&k.trim()))
        })
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        });
    SimConfig::parse(&lines)
}

pub fn series_csv(bundle: &SeriesBundle) -> String {
    let mut out = String::new();
    config_header(&mut out, &bundle.metadata.config, bundle.metadata.generator);
    out.push_str(&SERIES_COLUMNS.join(","));
    out.push('\n');
    for ((tick, mu_s), re_s) in bundle
        .ticks
        .iter()
        .zip(&bundle.smoothed_mu)
        .zip(&bundle.smoothed_reynolds)
    {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            tick.t,
            tick.bid,
            tick.ask,
            format_value(tick.mid),
            format_value(tick.ret),
            format_value(tick.price_change),
            tick.spread,
            format_value(tick.traded_volume),
            format_value(tick.p_hat),
            format_value(tick.mu.value()),
            format_value(*mu_s),
            format_value(tick.reynolds),
            format_value(*re_s),
            tick.regime,
            format_value(tick.reynolds_realized),
        );
    }
    out
}

pub fn write_series_csv(bundle: &SeriesBundle, path: &Path) -> Result<()> {
    write_atomic(path, &series_csv(bundle))
}

/// Long format: one `(x, P, N_R)` row per grid cell, rows grouped by `P`.
pub fn grid_csv(grid: &SurfaceGrid) -> String {
    let mut out = tool_line();
    let (x_name, fixed_name) = match grid.kind {
        SurfaceKind::Speed => ("v_T", "l"),
        SurfaceKind::Spread => ("l", "v_T"),
    };
    let _ = writeln!(out, "# {fixed_name} = {}", grid.fixed);
    let _ = writeln!(out, "{x_name},P,N_R");
    for (row, &p) in grid.values.iter().zip(&grid.y_axis) {
        for (&v, &x) in row.iter().zip(&grid.x_axis) {
            let _ = writeln!(
                out,
                "{},{},{}",
                format_value(x),
                format_value(p),
                format_value(v)
            );
        }
    }
    out
}

pub fn write_grid_csv(grid: &SurfaceGrid, path: &Path) -> Result<()> {
    write_atomic(path, &grid_csv(grid))
}

pub fn batch_csv(base: &SimConfig, cells: &[BatchCell], generator: &str) -> String {
    let mut out = String::new();
    config_header(&mut out, base, generator);
    out.push_str(
        "collision_probability,initial_spread,seed,final_mu_smoothed,final_reynolds_smoothed,\
         max_reynolds_raw,return_variance,laminar,transitional,turbulent,error\n",
    );
    for cell in cells {
        let c = &cell.config;
        let _ = write!(
            out,
            "{},{},{},",
            c.collision_probability, c.initial_spread, c.seed
        );
        match &cell.summary {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.6e},{},{},{},",
                    format_value(s.final_smoothed_mu),
                    format_value(s.final_smoothed_reynolds),
                    format_value(s.max_raw_reynolds),
                    s.return_variance,
                    s.regimes[0],
                    s.regimes[1],
                    s.regimes[2],
                );
            }
            Err(e) => {
                let msg = e.to_string().replace([',', '\n'], ";");
                let _ = writeln!(out, ",,,,,,,{msg}");
            }
        }
    }
    out
}

pub fn write_batch_csv(
    base: &SimConfig,
    cells: &[BatchCell],
    generator: &str,
    path: &Path,
) -> Result<()> {
    write_atomic(path, &batch_csv(base, cells, generator))
}
