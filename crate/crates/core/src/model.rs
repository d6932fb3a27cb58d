//! Eigenstates of the half-line Coulomb Hamiltonian −½ d²/dx² − Z/x
//! (infinite wall for x < 0), in atomic units.
//!
//! Position quantities use the scaled variable z = 2Zx/n. Wavefunctions
//! are real; the global phase plays no role in any density functional.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::specfun::{laguerre_pair_unchecked, laguerre_zeros, LaguerreParams};

/// An eigenstate labelled by principal quantum number `n >= 1` and
/// potential strength `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumState {
    n: u32,
    #[serde(rename = "Z")]
    z: f64,
}

impl QuantumState {
    pub fn new(n: u32, z: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidState("n must be >= 1".into()));
        }
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidState(format!("Z must be finite and > 0, got {z}")));
        }
        Ok(Self { n, z })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Potential strength Z.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub(crate) fn nf(&self) -> f64 {
        f64::from(self.n)
    }

    /// z_n = 2Zx/n.
    pub fn scaled(&self, x: f64) -> f64 {
        2.0 * self.z * x / self.nf()
    }

    /// Inverse of [`QuantumState::scaled`].
    pub fn unscaled(&self, t: f64) -> f64 {
        t * self.nf() / (2.0 * self.z)
    }

    fn laguerre_params(&self) -> LaguerreParams {
        LaguerreParams::new(self.n as usize - 1, 1.0).expect("alpha = 1 is valid")
    }

    /// Interior nodes of ψ_n (n − 1 of them), in x.
    pub fn nodes(&self) -> Vec<f64> {
        laguerre_zeros(self.laguerre_params())
            .expect("zeros of L_{n-1}^(1) are always bracketed")
            .into_iter()
            .map(|t| self.unscaled(t))
            .collect()
    }

    fn norm(&self) -> f64 {
        (self.z / self.nf().powi(3)).sqrt()
    }
}

/// E_n = −Z²/(2n²).
pub fn energy(state: QuantumState) -> f64 {
    -state.z * state.z / (2.0 * state.nf() * state.nf())
}

/// ψ_n(x) = (Z/n³)^{1/2} z e^{−z/2} L_{n−1}^(1)(z), z = 2Zx/n.
pub fn psi(state: QuantumState, x: f64) -> f64 {
    let z = state.scaled(x);
    let (l, _) = laguerre_pair_unchecked(state.n as usize - 1, 1.0, z);
    state.norm() * z * (-0.5 * z).exp() * l
}

/// dψ_n/dx.
pub fn psi_derivative(state: QuantumState, x: f64) -> f64 {
    let z = state.scaled(x);
    let k = state.n as usize - 1;
    let (l, _) = laguerre_pair_unchecked(k, 1.0, z);
    // d/dz L_k^(1) = −L_{k−1}^(2)
    let dl = if k == 0 {
        0.0
    } else {
        -laguerre_pair_unchecked(k - 1, 2.0, z).0
    };
    let dz_dx = 2.0 * state.z / state.nf();
    state.norm() * (-0.5 * z).exp() * ((1.0 - 0.5 * z) * l + z * dl) * dz_dx
}

/// Position density ρ_n(x) = ψ_n(x)².
pub fn rho(state: QuantumState, x: f64) -> f64 {
    let v = psi(state, x);
    v * v
}

/// dρ_n/dx = 2 ψ ψ'.
pub fn rho_derivative(state: QuantumState, x: f64) -> f64 {
    2.0 * psi(state, x) * psi_derivative(state, x)
}

/// Momentum density γ_n(p) = (2n/πZ) / ((np/Z)² + 1)².
pub fn momentum_density(state: QuantumState, p: f64) -> f64 {
    let t = state.nf() * p / state.z;
    let d = t * t + 1.0;
    2.0 * state.nf() / (PI * state.z) / (d * d)
}

/// dγ_n/dp.
pub fn momentum_density_derivative(state: QuantumState, p: f64) -> f64 {
    let a = state.nf() / state.z;
    let t = a * p;
    let d = t * t + 1.0;
    -8.0 * state.nf() / (PI * state.z) * a * t / (d * d * d)
}

/// Momentum wavefunction φ_n(p) = (2n/πZ)^{1/2} e^{−2in·arctan(np/Z)} / ((np/Z)² + 1).
pub fn phi(state: QuantumState, p: f64) -> Complex64 {
    let t = state.nf() * p / state.z;
    let amplitude = (2.0 * state.nf() / (PI * state.z)).sqrt() / (t * t + 1.0);
    Complex64::from_polar(amplitude, -2.0 * state.nf() * t.atan())
}
