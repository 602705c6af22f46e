//! Process-wide numerical settings.
//!
//! Defaults can be overridden once per process through the environment:
//! `LOWDEG_TOL` (absolute comparison tolerance), `LOWDEG_DENSE_CAP`
//! (largest dense matrix dimension) and `LOWDEG_ENUM_CAP` (largest number of
//! grid points enumerated exhaustively).

use std::sync::OnceLock;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_DENSE_CAP: usize = 4096;
pub const DEFAULT_ENUM_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tolerance: f64,
    pub dense_cap: usize,
    pub enumeration_cap: u128,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            dense_cap: DEFAULT_DENSE_CAP,
            enumeration_cap: DEFAULT_ENUM_CAP,
        }
    }
}

impl Settings {
    pub fn from_env() -> Self {
        let mut s = Self::default();
        if let Some(v) = read_env::<f64>("LOWDEG_TOL") {
            s.tolerance = v;
        }
        if let Some(v) = read_env::<usize>("LOWDEG_DENSE_CAP") {
            s.dense_cap = v;
        }
        if let Some(v) = read_env::<u128>("LOWDEG_ENUM_CAP") {
            s.enumeration_cap = v;
        }
        s
    }
}

fn read_env<T: std::str::FromStr>(key: &str) -> Option<T> {
    std::env::var(key).ok().and_then(|v| v.trim().parse().ok())
}

static SETTINGS: OnceLock<Settings> = OnceLock::new();

pub fn settings() -> &'static Settings {
    SETTINGS.get_or_init(Settings::from_env)
}

pub fn tolerance() -> f64 {
    settings().tolerance
}

pub fn dense_cap() -> usize {
    settings().dense_cap
}

pub fn enumeration_cap() -> u128 {
    settings().enumeration_cap
}
