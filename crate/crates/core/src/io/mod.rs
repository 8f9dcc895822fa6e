//! File formats: config files with flag overrides, CSV series and grids,
//! and SVG figures. Every file is written atomically.

mod csv;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

pub use csv::{
    batch_csv, config_from_header, format_value, grid_csv, series_csv, write_batch_csv,
    write_grid_csv, write_series_csv, SERIES_COLUMNS,
};
pub use svg::{grid_svg, render_grid_svg, render_series_svg, series_svg, SERIES_PANELS};

use crate::config::SimConfig;
use crate::error::{Error, Result};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub initial_bid: Option<i64>,
    pub initial_spread: Option<i64>,
    pub mass: Option<f64>,
    pub smoothing_length: Option<f64>,
    pub collision_probability: Option<f64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub smoothing_window: Option<usize>,
}

impl ConfigOverrides {
    pub fn apply(&self, config: &mut SimConfig) {
        macro_rules! over {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { config.$field = v; })*
            };
        }
        over!(
            initial_bid,
            initial_spread,
            mass,
            smoothing_length,
            collision_probability,
            steps,
            seed,
            smoothing_window
        );
    }
}

/// Defaults, then the file (if any), then the flags; validated last.
pub fn parse_config(path: Option<&Path>, overrides: &ConfigOverrides) -> Result<SimConfig> {
    let mut config = SimConfig::default();
    if let Some(path) = path {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        config.apply_text(&text)?;
    }
    overrides.apply(&mut config);
    config.validate()?;
    Ok(config)
}

/// Writes to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let tmp = temp_sibling(path);
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
    })
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}
