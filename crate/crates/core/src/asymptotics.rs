//! Rydberg-regime study of the position Shannon entropy: quadrature values
//! set against the large-n asymptotes S ≈ log(2πn²/(Ze²)) and
//! E1 ≈ 2n²(3n − log n − log 2π).

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{e1_asymptotic, shannon_rydberg_asymptotic};
use crate::model::QuantumState;
use crate::oracle::{Oracle, LARGE_N};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub n: u32,
    #[serde(rename = "Z")]
    pub z: f64,
    pub s_numeric: f64,
    pub s_error_estimate: f64,
    /// |S − S'| where S' comes from the refined oracle.
    pub s_stability: f64,
    pub s_asymptotic: f64,
    pub shannon_length_asymptotic: f64,
    pub difference: f64,
    /// |difference| / |S_numeric|.
    pub relative_error: f64,
    pub e1_numeric: f64,
    pub e1_asymptotic: f64,
    /// E1/(2n²) − 3n + log n + log 2π.
    pub residual: f64,
    pub converged: bool,
}

/// E1/(2n²) − 3n + log n + log 2π, the part of E1 the asymptote leaves out.
pub fn e1_residual(n: u32, e1: f64) -> f64 {
    let nf = f64::from(n);
    e1 / (2.0 * nf * nf) - 3.0 * nf + nf.ln() + (2.0 * PI).ln()
}

/// One row per n (each n >= 2). States with n >= 40 get four times the
/// oracle budget.
pub fn rydberg_study(ns: &[u32], z: f64, oracle: &Oracle) -> Result<Vec<AsymptoticRow>> {
    if let Some(bad) = ns.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!(
            "asymptotic study needs n >= 2, got {bad}; the ground state has a closed form"
        )));
    }
    ns.iter()
        .map(|&n| {
            let state = QuantumState::new(n, z)?;
            let o = if n >= LARGE_N {
                oracle.with_budget(oracle.budget.saturating_mul(4))
            } else {
                *oracle
            };
            let s = o.shannon_position(state);
            let refined = o.refined().shannon_position(state);
            let asym = shannon_rydberg_asymptotic(state);
            let difference = s.entropy.value - asym.entropy;
            Ok(AsymptoticRow {
                n,
                z,
                s_numeric: s.entropy.value,
                s_error_estimate: s.entropy.error_estimate,
                s_stability: (s.entropy.value - refined.entropy.value).abs(),
                s_asymptotic: asym.entropy,
                shannon_length_asymptotic: asym.length,
                difference,
                relative_error: (difference / s.entropy.value).abs(),
                e1_numeric: s.e1,
                e1_asymptotic: e1_asymptotic(n),
                residual: e1_residual(n, s.e1),
                converged: s.entropy.converged,
            })
        })
        .collect()
}

/// True when `values` are strictly decreasing in magnitude.
pub fn strictly_decreasing_magnitude(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1].abs() < w[0].abs())
}
