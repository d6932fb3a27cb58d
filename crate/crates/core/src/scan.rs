//! Tables of one measure over a range of n, for plotting elsewhere.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{MeasureOptions, MeasureSet, Provenance, MOMENTUM_KEYS, POSITION_KEYS, PRODUCTS};
use crate::model::QuantumState;
use crate::oracle::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub n: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesScan {
    pub measure: String,
    #[serde(rename = "Z")]
    pub z: f64,
    pub points: Vec<ScanPoint>,
}

/// Every name accepted by [`scan`], in kebab-case. Snake-case spellings
/// and the `-position`/`-momentum` suffixes for `-x`/`-p` are accepted too.
pub fn measure_names() -> Vec<String> {
    let mut names: Vec<String> = std::iter::once("energy")
        .chain(POSITION_KEYS)
        .chain(MOMENTUM_KEYS)
        .chain(PRODUCTS.iter().map(|p| p.0))
        .map(|k| k.replace('_', "-"))
        .collect();
    names.sort();
    names
}

/// Maps a user-supplied measure name to its [`MeasureSet`] key.
pub fn canonical_name(name: &str) -> Option<String> {
    let mut key = name.trim().to_ascii_lowercase().replace('-', "_");
    if let Some(stem) = key.strip_suffix("_position") {
        key = format!("{stem}_x");
    } else if let Some(stem) = key.strip_suffix("_momentum") {
        key = format!("{stem}_p");
    }
    let known = key == "energy"
        || POSITION_KEYS.contains(&key.as_str())
        || MOMENTUM_KEYS.contains(&key.as_str())
        || PRODUCTS.iter().any(|p| p.0 == key);
    known.then_some(key)
}

/// Values of `measure` for n = n_lo, n_lo + step, …, ≤ n_hi. Entries with
/// no closed form for a given n are computed with `oracle`.
pub fn scan(measure: &str, n_lo: u32, n_hi: u32, step: u32, z: f64, oracle: &Oracle) -> Result<SeriesScan> {
    let key = canonical_name(measure).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown measure '{measure}'; valid names: {}",
            measure_names().join(", ")
        ))
    })?;
    if n_lo == 0 || n_lo > n_hi || step == 0 {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_lo <= n_hi and step >= 1, got {n_lo}..{n_hi} step {step}"
        )));
    }
    let mut points = Vec::new();
    for n in (n_lo..=n_hi).step_by(step as usize) {
        let state = QuantumState::new(n, z)?;
        let closed = MeasureSet::closed_only(state);
        let value = if key == "energy" {
            closed.energy
        } else if closed.provenance.get(&key) == Some(&Provenance::ClosedForm) {
            closed.get(&key).expect("present with provenance")
        } else {
            MeasureSet::compute(state, MeasureOptions::default(), oracle)
                .get(&key)
                .expect("full set has every key")
        };
        points.push(ScanPoint { n, value });
    }
    Ok(SeriesScan {
        measure: key,
        z,
        points,
    })
}
