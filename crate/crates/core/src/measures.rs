//! Closed-form spreading and information measures of the half-line
//! Coulomb states, and the [`MeasureSet`] record that gathers them.
//!
//! Rényi lengths use the shifted order convention: the functions taking a
//! parameter `q > 0` return the length of order `q + 1`, i.e.
//! `W_{q+1}^{-1/q}`. With `q = 1` that is the Onicescu length.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI, SQRT_2};

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::model::{energy, QuantumState};
use crate::oracle::Oracle;
use crate::specfun::{binomial_general, digamma_pos, ln_gamma_pos, trigamma_pos, EULER_GAMMA};

/// Δlog|p|, the same for every state.
pub fn log_abs_p_spread() -> f64 {
    (PI * PI / 4.0 - 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentMethod {
    Closed,
    Oracle,
}

/// ⟨x^k⟩ for real `k > −3`.
///
/// The closed form is the finite sum
/// n^{k−2}/(2^{k+1} Z^k) Σ_{i=0}^{n−1} C(k+1, n−i−1)² Γ(k+i+3)/i!,
/// valid for every real k in range (integer k use exact factorial ratios).
pub fn x_moment(state: QuantumState, k: f64, method: MomentMethod) -> Result<f64> {
    if !(k.is_finite() && k > -3.0) {
        return Err(domain("x_moment", k, "k > -3"));
    }
    match method {
        MomentMethod::Closed => Ok(x_moment_closed(state, k)),
        MomentMethod::Oracle => {
            let r = Oracle::default().position_moment(state, k)?;
            if r.converged {
                Ok(r.value)
            } else {
                Err(Error::NotConverged {
                    quantity: format!("<x^{k}>"),
                    value: r.value,
                    error_estimate: r.error_estimate,
                })
            }
        }
    }
}

fn x_moment_closed(state: QuantumState, k: f64) -> f64 {
    let n = state.n() as usize;
    let integer = k.fract() == 0.0;
    let mut sum = 0.0;
    for i in 0..n {
        let b = binomial_general(k + 1.0, (n - i - 1) as u32);
        if b == 0.0 {
            continue;
        }
        let ratio = if integer {
            // Γ(k+i+3)/i! = (i+1)(i+2)…(i+k+2)
            (1..=(k as i64 + 2)).fold(1.0, |acc, j| acc * (i as f64 + j as f64))
        } else {
            (ln_gamma_pos(k + i as f64 + 3.0) - ln_gamma_pos(i as f64 + 1.0)).exp()
        };
        sum += b * b * ratio;
    }
    let nf = state.nf();
    nf.powf(k - 2.0) / (2f64.powf(k + 1.0) * state.z().powf(k)) * sum
}

/// Heisenberg measure (Δx)_n = (n/2Z)√(n² + 2), the standard deviation
/// that ⟨x⟩ = 3n²/(2Z) and ⟨x²⟩ = n²(5n² + 1)/(2Z²) imply.
pub fn delta_x(state: QuantumState) -> f64 {
    let n = state.nf();
    n / (2.0 * state.z()) * (n * n + 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogMoments {
    pub mean: f64,
    pub second: f64,
}

impl LogMoments {
    pub fn spread(&self) -> f64 {
        (self.second - self.mean * self.mean).sqrt()
    }
}

// Σ_{i=0}^{n−3} (i+2)(i+1) / ((n−i−2)²(n−i−1)²); empty for n ≤ 2.
fn log_correction_sum(n: u32) -> f64 {
    if n <= 2 {
        return 0.0;
    }
    let n = f64::from(n);
    (0..(n as usize - 2))
        .map(|i| {
            let i = i as f64;
            let a = n - i - 2.0;
            let b = n - i - 1.0;
            (i + 2.0) * (i + 1.0) / (a * a * b * b)
        })
        .sum()
}

/// ⟨log x⟩ and ⟨(log x)²⟩.
pub fn log_x_moments(state: QuantumState) -> LogMoments {
    let n = state.nf();
    let a = (E * n / (2.0 * state.z())).ln();
    let psi = digamma_pos(n + 1.0);
    let mean = a - 0.5 / n + psi;
    let second = a * a + psi * (psi + 2.0 * a - 1.0 / n) - a / n
        + trigamma_pos(n + 1.0)
        + log_correction_sum(state.n()) / (n * n);
    LogMoments { mean, second }
}

/// Logarithmic uncertainty (Δlog x)_n; independent of Z.
///
/// Equal to √(ψ'(n+1) + S_n/n² − 1/(4n²)), which is what the two log
/// moments above give after the Z-dependent terms cancel.
pub fn delta_log_x(state: QuantumState) -> f64 {
    let n = state.nf();
    (trigamma_pos(n + 1.0) + log_correction_sum(state.n()) / (n * n) - 0.25 / (n * n)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumMoments {
    pub p2: f64,
    pub abs_p: f64,
    pub delta_p: f64,
    pub delta_abs_p: f64,
}

/// ⟨p²⟩, ⟨|p|⟩, Δp and Δ|p|. Odd moments vanish identically.
pub fn p_moments(state: QuantumState) -> MomentumMoments {
    let s = state.z() / state.nf();
    MomentumMoments {
        p2: s * s,
        abs_p: 2.0 * s / PI,
        delta_p: s,
        delta_abs_p: s * (1.0 - 4.0 / (PI * PI)).sqrt(),
    }
}

/// ⟨log|p|⟩ and ⟨(log|p|)²⟩.
pub fn log_abs_p_moments(state: QuantumState) -> LogMoments {
    let l = (state.nf() / state.z()).ln();
    LogMoments {
        mean: -(1.0 + l),
        second: PI * PI / 4.0 + l * (2.0 + l),
    }
}

/// Δlog|p| = √(π²/4 − 1) for every state.
pub fn delta_log_abs_p(_state: QuantumState) -> f64 {
    log_abs_p_spread()
}

/// Δx·Δp = √(n² + 2)/2.
pub fn heisenberg_product(state: QuantumState) -> f64 {
    let n = state.nf();
    0.5 * (n * n + 2.0).sqrt()
}

/// Δlog x · Δlog|p|.
pub fn log_uncertainty_product(state: QuantumState) -> f64 {
    delta_log_x(state) * log_abs_p_spread()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fisher {
    pub info: f64,
    pub length: f64,
}

/// F[ρ_n] = 4Z²/n², δx = n/(2Z).
pub fn fisher_position(state: QuantumState) -> Fisher {
    let n = state.nf();
    let z = state.z();
    Fisher {
        info: 4.0 * z * z / (n * n),
        length: n / (2.0 * z),
    }
}

/// F[γ_n] = 2n²/Z², δp = Z/(√2 n).
pub fn fisher_momentum(state: QuantumState) -> Fisher {
    let n = state.nf();
    let z = state.z();
    Fisher {
        info: 2.0 * n * n / (z * z),
        length: z / (SQRT_2 * n),
    }
}

/// W_q[ρ_1] = (Z^{q−1}/2) Γ(2q+1)/q^{2q+1}.
pub fn entropic_moment_gs_position(q: f64, z: f64) -> Result<f64> {
    check_q(q, "entropic_moment_gs_position")?;
    check_z(z)?;
    Ok(ln_entropic_moment_gs_position(q, z).exp())
}

fn ln_entropic_moment_gs_position(q: f64, z: f64) -> f64 {
    (q - 1.0) * z.ln() - 2f64.ln() + ln_gamma_pos(2.0 * q + 1.0) - (2.0 * q + 1.0) * q.ln()
}

/// Ground-state Rényi length of order `q + 1`:
/// ((q+1)^{2+3/q}/Z) (2/Γ(2q+3))^{1/q}.
pub fn renyi_length_gs_position(q: f64, z: f64) -> Result<f64> {
    check_q(q, "renyi_length_gs_position")?;
    check_z(z)?;
    let ln = (2.0 + 3.0 / q) * (q + 1.0).ln() - z.ln() + (2f64.ln() - ln_gamma_pos(2.0 * q + 3.0)) / q;
    Ok(ln.exp())
}

/// L^O[ρ_1] = 8/(3Z).
pub fn onicescu_gs_position(z: f64) -> f64 {
    8.0 / (3.0 * z)
}

/// W_q[γ_n] for real `q > 1/4`, through
/// (2/π)^q (n/Z)^{q−1} √π Γ(2q − 1/2)/Γ(2q).
pub fn entropic_moment_momentum(state: QuantumState, q: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.25) {
        return Err(domain("entropic_moment_momentum", q, "q > 1/4"));
    }
    Ok(ln_entropic_moment_momentum(state, q).exp())
}

fn ln_entropic_moment_momentum(state: QuantumState, q: f64) -> f64 {
    q * (2.0 / PI).ln() + (q - 1.0) * (state.nf() / state.z()).ln() + 0.5 * PI.ln()
        + ln_gamma_pos(2.0 * q - 0.5)
        - ln_gamma_pos(2.0 * q)
}

/// Integer-order form (n/(8πZ))^{q−1} C(4q−3, 2q−1).
pub fn entropic_moment_momentum_binomial(state: QuantumState, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(domain("entropic_moment_momentum_binomial", 0.0, "q >= 1"));
    }
    let qf = f64::from(q);
    let base = state.nf() / (8.0 * PI * state.z());
    Ok(base.powi(q as i32 - 1) * binomial_general(4.0 * qf - 3.0, 2 * q - 1))
}

/// Momentum Rényi length of order `q + 1`, (8πZ/n) C(4q+1, 2q+1)^{−1/q},
/// evaluated through Γ functions so that `q` may be any positive real.
pub fn renyi_length_momentum(state: QuantumState, q: f64) -> Result<f64> {
    check_q(q, "renyi_length_momentum")?;
    Ok((-ln_entropic_moment_momentum(state, q + 1.0) / q).exp())
}

/// L^O[γ_n] = 4πZ/(5n).
pub fn onicescu_momentum(state: QuantumState) -> f64 {
    4.0 * PI * state.z() / (5.0 * state.nf())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Shannon {
    pub entropy: f64,
    pub length: f64,
}

impl Shannon {
    fn from_entropy(entropy: f64) -> Self {
        Self {
            entropy,
            length: entropy.exp(),
        }
    }
}

/// S[γ_n] = 2(log 4 − 1) + log(πZ/2n), H[γ_n] = 8πZ/(n e²).
pub fn shannon_momentum(state: QuantumState) -> Shannon {
    Shannon {
        entropy: 2.0 * (4f64.ln() - 1.0) + (PI * state.z() / (2.0 * state.nf())).ln(),
        length: 8.0 * PI * state.z() / (state.nf() * E * E),
    }
}

/// S[ρ_1] = 2γ − log Z, H[ρ_1] = e^{2γ}/Z.
pub fn shannon_gs_position(z: f64) -> Result<Shannon> {
    check_z(z)?;
    Ok(Shannon {
        entropy: 2.0 * EULER_GAMMA - z.ln(),
        length: (2.0 * EULER_GAMMA).exp() / z,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShannonComponents {
    pub i1: f64,
    pub i2: f64,
}

/// I1 = ∫ t ω_1 [L_{n−1}^(1)]² = 2n² and
/// I2 = ∫ t² e^{−t} log(t² e^{−t}) [L_{n−1}^(1)]² = 4n² + 4n²ψ(n+1) − 6n³ − 2n.
pub fn shannon_components_position(n: u32) -> Result<ShannonComponents> {
    if n == 0 {
        return Err(Error::InvalidState("n must be >= 1".into()));
    }
    let nf = f64::from(n);
    Ok(ShannonComponents {
        i1: 2.0 * nf * nf,
        i2: 4.0 * nf * nf + 4.0 * nf * nf * digamma_pos(nf + 1.0) - 6.0 * nf.powi(3) - 2.0 * nf,
    })
}

/// S[ρ_n] = −(log(Z/n³) I1 + I2 + E1)/(2n²) for a given E1.
pub fn shannon_position_from_e1(state: QuantumState, e1: f64) -> f64 {
    let c = shannon_components_position(state.n()).expect("state has n >= 1");
    let n = state.nf();
    -((state.z() / n.powi(3)).ln() * c.i1 + c.i2 + e1) / (2.0 * n * n)
}

/// E1 recovered from a Shannon entropy value (inverse of
/// [`shannon_position_from_e1`]).
pub fn e1_from_shannon_position(state: QuantumState, entropy: f64) -> f64 {
    let c = shannon_components_position(state.n()).expect("state has n >= 1");
    let n = state.nf();
    -2.0 * n * n * entropy - (state.z() / n.powi(3)).ln() * c.i1 - c.i2
}

/// Large-n estimate E1 ≈ 2n²(3n − log n − log 2π).
pub fn e1_asymptotic(n: u32) -> f64 {
    let n = f64::from(n);
    2.0 * n * n * (3.0 * n - n.ln() - (2.0 * PI).ln())
}

/// Rydberg-state Shannon entropy log(2πn²/(Ze²)) and length 2πn²/(Ze²).
pub fn shannon_rydberg_asymptotic(state: QuantumState) -> Shannon {
    let n = state.nf();
    let length = 2.0 * PI * n * n / (state.z() * E * E);
    Shannon {
        entropy: length.ln(),
        length,
    }
}

/// One relation between |E_n| and a spreading measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub name: &'static str,
    pub expression: &'static str,
    /// What the expression is compared against.
    pub target: f64,
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRelations {
    pub abs_energy: f64,
    pub checks: Vec<RelationCheck>,
}

impl EnergyRelations {
    pub fn check(&self, name: &str) -> Option<&RelationCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Relations between |E_n| and the spreading lengths.
///
/// The first group holds for every state and is derived from the closed
/// forms in this module. The `variant_*` entries are alternative
/// factorings that circulate in print; they are evaluated and flagged,
/// and generally do not hold.
pub fn energy_relations(state: QuantumState) -> EnergyRelations {
    let abs_e = energy(state).abs();
    let dp = p_moments(state).delta_p;
    let fp = fisher_momentum(state).length;
    let fx = fisher_position(state).length;
    let lo = onicescu_momentum(state);
    let h = shannon_momentum(state).length;
    let check = |name, expression, target: f64, value: f64| RelationCheck {
        name,
        expression,
        target,
        value,
        holds: (value - target).abs() <= 1e-12 * target.abs(),
    };
    EnergyRelations {
        abs_energy: abs_e,
        checks: vec![
            check("half_delta_p_squared", "|E| = (Δp)²/2", abs_e, 0.5 * dp * dp),
            check("fisher_length_p_squared", "|E| = (δp)²", abs_e, fp * fp),
            check(
                "onicescu_p",
                "|E| = (5 L^O[γ]/(4π))²/2",
                abs_e,
                0.5 * (5.0 * lo / (4.0 * PI)).powi(2),
            ),
            check(
                "shannon_length_p",
                "|E| = (e² H[γ]/(8π))²/2",
                abs_e,
                0.5 * (E * E * h / (8.0 * PI)).powi(2),
            ),
            check(
                "fisher_length_x",
                "δx = (8|E|)^(-1/2)",
                fx,
                (8.0 * abs_e).powf(-0.5),
            ),
            check(
                "variant_half_fisher_length_p_squared",
                "|E| = (δp)²/2",
                abs_e,
                0.5 * fp * fp,
            ),
            check(
                "variant_onicescu_p",
                "|E| = (8π)² (L^O[γ])²/2",
                abs_e,
                0.5 * (8.0 * PI).powi(2) * lo * lo,
            ),
            check(
                "variant_shannon_length_p",
                "|E| = (e²/(8π))² H[γ]/2",
                abs_e,
                0.5 * (E * E / (8.0 * PI)).powi(2) * h,
            ),
            check(
                "variant_fisher_length_x",
                "δx = (8|E|)^(1/2)",
                fx,
                (8.0 * abs_e).sqrt(),
            ),
        ],
    }
}

fn check_q(q: f64, function: &'static str) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(domain(function, q, "q > 0"));
    }
    Ok(())
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::InvalidState(format!("Z must be finite and > 0, got {z}")));
    }
    Ok(())
}

/// Where a MeasureSet entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Numeric,
    Asymptotic,
}

/// Uncertainty products and the two factors each one multiplies.
pub const PRODUCTS: [(&str, &str, &str); 5] = [
    ("heisenberg", "delta_x", "delta_p"),
    ("logarithmic", "delta_log_x", "delta_log_abs_p"),
    ("fisher", "fisher_length_x", "fisher_length_p"),
    ("onicescu", "onicescu_x", "onicescu_p"),
    ("shannon", "shannon_length_x", "shannon_length_p"),
];

/// Position-space keys of a [`MeasureSet`].
pub const POSITION_KEYS: [&str; 14] = [
    "delta_log_x",
    "delta_x",
    "entropic_moment_2_x",
    "fisher_info_x",
    "fisher_length_x",
    "log_x_mean",
    "log_x_sq",
    "onicescu_x",
    "shannon_entropy_x",
    "shannon_length_x",
    "x_inv",
    "x_inv_sq",
    "x_mean",
    "x_sq",
];

/// Momentum-space keys of a [`MeasureSet`].
pub const MOMENTUM_KEYS: [&str; 13] = [
    "abs_p_mean",
    "delta_abs_p",
    "delta_log_abs_p",
    "delta_p",
    "entropic_moment_2_p",
    "fisher_info_p",
    "fisher_length_p",
    "log_abs_p_mean",
    "log_abs_p_sq",
    "onicescu_p",
    "p_sq",
    "shannon_entropy_p",
    "shannon_length_p",
];

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeasureOptions {
    /// Attach oracle values for every entry the oracle can compute.
    pub numeric: bool,
    /// Use the Rydberg asymptote for the position Shannon entropy when
    /// n >= 2 instead of quadrature.
    pub asymptotic: bool,
}

/// All measures of one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureSet {
    pub state: QuantumState,
    pub energy: f64,
    pub position: BTreeMap<String, f64>,
    pub momentum: BTreeMap<String, f64>,
    pub products: BTreeMap<String, f64>,
    pub provenance: BTreeMap<String, Provenance>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub numeric: BTreeMap<String, f64>,
    /// Oracle integrals that did not reach their tolerance.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unconverged: Vec<String>,
}

impl MeasureSet {
    /// Closed-form entries only. Position Shannon and W_2 entries (and the
    /// products using them) are present only for the ground state.
    pub fn closed_only(state: QuantumState) -> Self {
        let mut set = MeasureSet {
            state,
            energy: energy(state),
            position: BTreeMap::new(),
            momentum: BTreeMap::new(),
            products: BTreeMap::new(),
            provenance: BTreeMap::new(),
            numeric: BTreeMap::new(),
            unconverged: Vec::new(),
        };
        let closed = Provenance::ClosedForm;

        set.put_x("x_mean", x_moment_closed(state, 1.0), closed);
        set.put_x("x_sq", x_moment_closed(state, 2.0), closed);
        set.put_x("x_inv", x_moment_closed(state, -1.0), closed);
        set.put_x("x_inv_sq", x_moment_closed(state, -2.0), closed);
        set.put_x("delta_x", delta_x(state), closed);
        let lx = log_x_moments(state);
        set.put_x("log_x_mean", lx.mean, closed);
        set.put_x("log_x_sq", lx.second, closed);
        set.put_x("delta_log_x", delta_log_x(state), closed);
        let fx = fisher_position(state);
        set.put_x("fisher_info_x", fx.info, closed);
        set.put_x("fisher_length_x", fx.length, closed);
        if state.n() == 1 {
            let w2 = entropic_moment_gs_position(2.0, state.z()).expect("valid order");
            set.put_x("entropic_moment_2_x", w2, closed);
            set.put_x("onicescu_x", onicescu_gs_position(state.z()), closed);
            let s = shannon_gs_position(state.z()).expect("valid Z");
            set.put_x("shannon_entropy_x", s.entropy, closed);
            set.put_x("shannon_length_x", s.length, closed);
        }

        let pm = p_moments(state);
        set.put_p("p_sq", pm.p2, closed);
        set.put_p("abs_p_mean", pm.abs_p, closed);
        set.put_p("delta_p", pm.delta_p, closed);
        set.put_p("delta_abs_p", pm.delta_abs_p, closed);
        let lp = log_abs_p_moments(state);
        set.put_p("log_abs_p_mean", lp.mean, closed);
        set.put_p("log_abs_p_sq", lp.second, closed);
        set.put_p("delta_log_abs_p", delta_log_abs_p(state), closed);
        let fp = fisher_momentum(state);
        set.put_p("fisher_info_p", fp.info, closed);
        set.put_p("fisher_length_p", fp.length, closed);
        let w2p = entropic_moment_momentum(state, 2.0).expect("valid order");
        set.put_p("entropic_moment_2_p", w2p, closed);
        set.put_p("onicescu_p", onicescu_momentum(state), closed);
        let sp = shannon_momentum(state);
        set.put_p("shannon_entropy_p", sp.entropy, closed);
        set.put_p("shannon_length_p", sp.length, closed);

        set.refresh_products();
        set
    }

    /// Full set: closed forms plus quadrature (or asymptotic) values for
    /// the entries that have no closed form.
    pub fn compute(state: QuantumState, options: MeasureOptions, oracle: &Oracle) -> Self {
        let mut set = Self::closed_only(state);
        if state.n() >= 2 {
            let w2 = oracle.entropic_moment_position(state, 2.0).expect("q = 2 is in range");
            set.track(&w2, "entropic_moment_2_x");
            set.put_x("entropic_moment_2_x", w2.value, Provenance::Numeric);
            set.put_x("onicescu_x", 1.0 / w2.value, Provenance::Numeric);
            if options.asymptotic {
                let s = shannon_rydberg_asymptotic(state);
                set.put_x("shannon_entropy_x", s.entropy, Provenance::Asymptotic);
                set.put_x("shannon_length_x", s.length, Provenance::Asymptotic);
            } else {
                let s = oracle.shannon_position(state);
                set.track(&s.entropy, "shannon_entropy_x");
                let sh = Shannon::from_entropy(s.entropy.value);
                set.put_x("shannon_entropy_x", sh.entropy, Provenance::Numeric);
                set.put_x("shannon_length_x", sh.length, Provenance::Numeric);
            }
            set.refresh_products();
        }
        if options.numeric {
            for (name, r) in oracle.numeric_entries(state) {
                if !r.converged {
                    set.unconverged.push(name.clone());
                }
                set.numeric.insert(name, r.value);
            }
        }
        set
    }

    /// Looks a key up in position, momentum and products.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.position
            .get(name)
            .or_else(|| self.momentum.get(name))
            .or_else(|| self.products.get(name))
            .copied()
    }

    /// Overwrites an existing position or momentum entry and recomputes the
    /// products. Returns false if the key is unknown.
    pub fn set_factor(&mut self, name: &str, value: f64) -> bool {
        let slot = self
            .position
            .get_mut(name)
            .or_else(|| self.momentum.get_mut(name));
        match slot {
            Some(v) => {
                *v = value;
                self.refresh_products();
                true
            }
            None => false,
        }
    }

    fn put_x(&mut self, name: &str, value: f64, p: Provenance) {
        self.position.insert(name.to_string(), value);
        self.provenance.insert(name.to_string(), p);
    }

    fn put_p(&mut self, name: &str, value: f64, p: Provenance) {
        self.momentum.insert(name.to_string(), value);
        self.provenance.insert(name.to_string(), p);
    }

    fn track(&mut self, r: &crate::quadrature::IntegralResult, name: &str) {
        if !r.converged {
            self.unconverged.push(name.to_string());
        }
    }

    fn refresh_products(&mut self) {
        for (product, a, b) in PRODUCTS {
            if let (Some(x), Some(y)) = (self.get(a), self.get(b)) {
                self.products.insert(product.to_string(), x * y);
                let prov = match (self.provenance[a], self.provenance[b]) {
                    (Provenance::ClosedForm, Provenance::ClosedForm) => Provenance::ClosedForm,
                    (Provenance::Asymptotic, _) | (_, Provenance::Asymptotic) => Provenance::Asymptotic,
                    _ => Provenance::Numeric,
                };
                self.provenance.insert(product.to_string(), prov);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn st(n: u32, z: f64) -> QuantumState {
        QuantumState::new(n, z).unwrap()
    }

    #[test]
    fn power_moment_examples() {
        let c = MomentMethod::Closed;
        assert_relative_eq!(x_moment(st(1, 1.0), 1.0, c).unwrap(), 1.5, max_relative = 1e-15);
        assert_relative_eq!(x_moment(st(2, 1.0), 2.0, c).unwrap(), 42.0, max_relative = 1e-15);
        assert_relative_eq!(x_moment(st(2, 1.0), -1.0, c).unwrap(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(x_moment(st(1, 1.0), 0.0, c).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(x_moment(st(4, 2.0), -2.0, c).unwrap(), 0.125, max_relative = 1e-15);
        assert!(x_moment(st(1, 1.0), -3.0, c).is_err());
        assert!(x_moment(st(1, 1.0), f64::NAN, c).is_err());
    }

    #[test]
    fn low_order_moments_match_named_forms() {
        for n in 1..=15u32 {
            for z in [0.5, 1.0, 3.0] {
                let s = st(n, z);
                let nf = f64::from(n);
                let c = MomentMethod::Closed;
                assert_relative_eq!(x_moment(s, 1.0, c).unwrap(), 1.5 * nf * nf / z, max_relative = 1e-13);
                assert_relative_eq!(
                    x_moment(s, 2.0, c).unwrap(),
                    nf * nf * (5.0 * nf * nf + 1.0) / (2.0 * z * z),
                    max_relative = 1e-13
                );
                assert_relative_eq!(x_moment(s, -1.0, c).unwrap(), z / (nf * nf), max_relative = 1e-13);
                assert_relative_eq!(x_moment(s, -2.0, c).unwrap(), 2.0 * z * z / nf.powi(3), max_relative = 1e-13);
                assert_relative_eq!(x_moment(s, 0.0, c).unwrap(), 1.0, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn delta_x_examples() {
        assert_relative_eq!(delta_x(st(1, 1.0)), 0.75f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(delta_x(st(2, 1.0)), 6f64.sqrt(), max_relative = 1e-15);
        let s = st(6, 0.8);
        let m1 = x_moment(s, 1.0, MomentMethod::Closed).unwrap();
        let m2 = x_moment(s, 2.0, MomentMethod::Closed).unwrap();
        assert_relative_eq!(delta_x(s), (m2 - m1 * m1).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn log_x_ground_state() {
        let m = log_x_moments(st(1, 1.0));
        assert_relative_eq!(m.mean, 1.5 - 2f64.ln() - EULER_GAMMA, max_relative = 1e-14);
        let m = log_x_moments(st(1, E / 2.0));
        assert_relative_eq!(m.mean, 0.5 - EULER_GAMMA, max_relative = 1e-13);
    }

    #[test]
    fn delta_log_x_values() {
        // Var(log x) for n = 1 is ψ'(3) = π²/6 − 5/4
        let want = (PI * PI / 6.0 - 1.25).sqrt();
        assert_relative_eq!(delta_log_x(st(1, 1.0)), want, max_relative = 1e-13);
        assert_eq!(delta_log_x(st(1, 1.0)), delta_log_x(st(1, 17.0)));
        // consistency with the moments for several n and Z
        for n in 1..=12u32 {
            for z in [0.5, 1.0, 7.0] {
                let s = st(n, z);
                assert_relative_eq!(delta_log_x(s), log_x_moments(s).spread(), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn momentum_moment_examples() {
        assert_eq!(p_moments(st(1, 1.0)).delta_p, 1.0);
        assert_relative_eq!(p_moments(st(2, 1.0)).abs_p, 1.0 / PI, max_relative = 1e-15);
        let m = p_moments(st(3, 2.0));
        assert_relative_eq!(m.delta_p, m.p2.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.delta_abs_p, (m.p2 - m.abs_p * m.abs_p).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn log_p_examples() {
        assert_relative_eq!(log_abs_p_moments(st(1, 1.0)).mean, -1.0, max_relative = 1e-15);
        for (n, z) in [(1, 1.0), (3, 0.5), (9, 4.0)] {
            let s = st(n, z);
            assert_relative_eq!(log_abs_p_moments(s).spread(), log_abs_p_spread(), max_relative = 1e-12);
        }
        assert_relative_eq!(log_abs_p_spread(), 1.211_363_322_984_619_5, max_relative = 1e-15);
    }

    #[test]
    fn heisenberg_examples() {
        assert_relative_eq!(heisenberg_product(st(1, 1.0)), 0.75f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(heisenberg_product(st(3, 1.0)), 0.5 * 11f64.sqrt(), max_relative = 1e-15);
        for n in 1..=20 {
            let s = st(n, 2.5);
            assert!(heisenberg_product(s) >= 0.5);
            assert_relative_eq!(heisenberg_product(s), delta_x(s) * p_moments(s).delta_p, max_relative = 1e-12);
        }
    }

    #[test]
    fn log_product_ground_state() {
        let want = (PI * PI / 6.0 - 1.25).sqrt() * (PI * PI / 4.0 - 1.0).sqrt();
        for z in [0.5, 1.0, 2.0, 10.0] {
            assert_relative_eq!(log_uncertainty_product(st(1, z)), want, max_relative = 1e-13);
        }
        assert_relative_eq!(want, 0.761_266_500_135_213_6, max_relative = 1e-12);
    }

    #[test]
    fn fisher_examples() {
        let f = fisher_position(st(1, 1.0));
        assert_eq!((f.info, f.length), (4.0, 0.5));
        assert_eq!(fisher_position(st(3, 2.0)).length, 0.75);
        let f = fisher_momentum(st(1, 1.0));
        assert_eq!(f.info, 2.0);
        assert_relative_eq!(f.length, 1.0 / SQRT_2, max_relative = 1e-15);
        for n in 1..=20 {
            for z in [0.5, 1.0, 2.0, 10.0] {
                let s = st(n, z);
                let fx = fisher_position(s).length;
                let fp = fisher_momentum(s).length;
                assert_relative_eq!(fx * fp, 1.0 / (2.0 * SQRT_2), max_relative = 1e-12);
                assert_relative_eq!(fx, delta_x(s) / (2.0 * heisenberg_product(s)), max_relative = 1e-12);
                assert_relative_eq!(fp / p_moments(s).delta_p, 1.0 / SQRT_2, max_relative = 1e-15);
                // n − 1 interior nodes: δx = (nodes + 1)/(2Z)
                assert_relative_eq!(fx, (f64::from(n - 1) + 1.0) / (2.0 * z), max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn ground_state_entropic_moments() {
        assert_relative_eq!(entropic_moment_gs_position(1.0, 3.3).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(entropic_moment_gs_position(2.0, 1.0).unwrap(), 0.375, max_relative = 1e-14);
        assert!(entropic_moment_gs_position(0.0, 1.0).is_err());
        assert!(entropic_moment_gs_position(-1.0, 1.0).is_err());
    }

    #[test]
    fn ground_state_renyi_lengths() {
        assert_relative_eq!(renyi_length_gs_position(1.0, 1.0).unwrap(), 8.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(renyi_length_gs_position(1.0, 2.0).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        for q in [0.3, 1.0, 1.7, 4.0] {
            let w = entropic_moment_gs_position(q + 1.0, 1.3).unwrap();
            assert_relative_eq!(
                renyi_length_gs_position(q, 1.3).unwrap(),
                w.powf(-1.0 / q),
                max_relative = 1e-12
            );
        }
        assert!(renyi_length_gs_position(0.0, 1.0).is_err());
    }

    #[test]
    fn momentum_entropic_moments() {
        assert_relative_eq!(entropic_moment_momentum(st(4, 0.3), 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(
            entropic_moment_momentum(st(1, 1.0), 2.0).unwrap(),
            5.0 / (4.0 * PI),
            max_relative = 1e-14
        );
        for q in 1..=6u32 {
            let s = st(3, 1.7);
            assert_relative_eq!(
                entropic_moment_momentum(s, f64::from(q)).unwrap(),
                entropic_moment_momentum_binomial(s, q).unwrap(),
                max_relative = 1e-13
            );
        }
        assert!(entropic_moment_momentum(st(1, 1.0), 0.25).is_err());
    }

    #[test]
    fn momentum_renyi_lengths() {
        assert_relative_eq!(renyi_length_momentum(st(1, 1.0), 1.0).unwrap(), 4.0 * PI / 5.0, max_relative = 1e-14);
        assert_relative_eq!(renyi_length_momentum(st(5, 1.0), 1.0).unwrap(), 4.0 * PI / 25.0, max_relative = 1e-14);
        for n in 1..=6 {
            let s = st(n, 0.9);
            let near_shannon = renyi_length_momentum(s, 1e-4).unwrap();
            let h = shannon_momentum(s).length;
            assert!((near_shannon / h - 1.0).abs() < 1e-3);
            // the printed binomial at integer q
            for q in 1..=4u32 {
                let qf = f64::from(q);
                let b = binomial_general(4.0 * qf + 1.0, 2 * q + 1);
                let want = 8.0 * PI * s.z() / s.nf() * b.powf(-1.0 / qf);
                assert_relative_eq!(renyi_length_momentum(s, qf).unwrap(), want, max_relative = 1e-13);
            }
        }
        assert!(renyi_length_momentum(st(1, 1.0), 0.0).is_err());
    }

    #[test]
    fn shannon_closed_forms() {
        assert_relative_eq!(shannon_momentum(st(1, 1.0)).length, 8.0 * PI / (E * E), max_relative = 1e-14);
        assert_relative_eq!(shannon_momentum(st(2, 1.0)).length, 4.0 * PI / (E * E), max_relative = 1e-14);
        let s = shannon_momentum(st(4, 3.0));
        assert_relative_eq!(s.entropy.exp(), s.length, max_relative = 1e-14);

        let g = shannon_gs_position(1.0).unwrap();
        assert_relative_eq!(g.length, (2.0 * EULER_GAMMA).exp(), max_relative = 1e-15);
        let g = shannon_gs_position((2.0 * EULER_GAMMA).exp()).unwrap();
        assert!(g.entropy.abs() < 1e-15);
        assert_relative_eq!(g.length, 1.0, max_relative = 1e-15);
        assert!(shannon_gs_position(0.0).is_err());
    }

    #[test]
    fn shannon_components() {
        let c = shannon_components_position(1).unwrap();
        assert_eq!(c.i1, 2.0);
        assert_relative_eq!(c.i2, -4.0 * EULER_GAMMA, max_relative = 1e-14);
        assert_eq!(shannon_components_position(2).unwrap().i1, 8.0);
        // with E1 = 0 the ground-state entropy comes back
        for z in [0.5, 1.0, 2.0] {
            let s = st(1, z);
            assert_relative_eq!(
                shannon_position_from_e1(s, 0.0),
                2.0 * EULER_GAMMA - z.ln(),
                epsilon = 1e-14
            );
        }
        assert!(shannon_components_position(0).is_err());
    }

    #[test]
    fn rydberg_asymptote() {
        let a = shannon_rydberg_asymptotic(st(10, 1.0));
        assert_relative_eq!(a.length, 200.0 * PI / (E * E), max_relative = 1e-14);
        let ratio = shannon_rydberg_asymptotic(st(2000, 1.0)).length / delta_x(st(2000, 1.0));
        assert!((ratio - 4.0 * PI / (E * E)).abs() < 1e-5);
        // the asymptotic entropy is the E1 asymptote pushed through the
        // exact entropy identity, up to log n − ψ(n+1) → 0
        let s = st(400, 1.0);
        let via_e1 = shannon_position_from_e1(s, e1_asymptotic(400));
        assert!((via_e1 - shannon_rydberg_asymptotic(s).entropy).abs() < 1e-2);
    }

    #[test]
    fn energy_relation_checks() {
        let r = energy_relations(st(1, 1.0));
        assert_eq!(r.abs_energy, 0.5);
        assert_relative_eq!(r.check("half_delta_p_squared").unwrap().value, 0.5, max_relative = 1e-15);
        assert_relative_eq!(r.check("fisher_length_p_squared").unwrap().value, 0.5, max_relative = 1e-15);
        let r2 = energy_relations(st(2, 1.0));
        assert_relative_eq!(r2.check("fisher_length_x").unwrap().value, 1.0, max_relative = 1e-15);
        for n in 1..=10 {
            for z in [0.5, 2.0] {
                let r = energy_relations(st(n, z));
                for c in &r.checks {
                    if !c.name.starts_with("variant_") {
                        assert!(c.holds, "{} fails at n={n} z={z}", c.name);
                    }
                }
                assert!(!r.check("variant_onicescu_p").unwrap().holds);
                assert!(!r.check("variant_shannon_length_p").unwrap().holds);
                assert!(!r.check("variant_half_fisher_length_p_squared").unwrap().holds);
            }
        }
    }

    #[test]
    fn closed_set_contents() {
        let set = MeasureSet::closed_only(st(1, 1.0));
        assert_relative_eq!(set.products["heisenberg"], 0.75f64.sqrt(), max_relative = 1e-15);
        assert_eq!(set.position.len(), POSITION_KEYS.len());
        assert_eq!(set.momentum.len(), MOMENTUM_KEYS.len());
        assert_eq!(set.products.len(), PRODUCTS.len());
        assert!(set.provenance.values().all(|p| *p == Provenance::ClosedForm));
        assert_relative_eq!(
            set.products["shannon"],
            8.0 * PI * (2.0 * (EULER_GAMMA - 1.0)).exp(),
            max_relative = 1e-13
        );

        let set = MeasureSet::closed_only(st(3, 1.0));
        assert!(!set.position.contains_key("shannon_entropy_x"));
        assert!(!set.products.contains_key("shannon"));
    }

    proptest! {
        #[test]
        fn product_entries_factorize(n in 1u32..30, z in 0.1f64..20.0) {
            let set = MeasureSet::closed_only(st(n, z));
            for (name, a, b) in PRODUCTS {
                if let Some(p) = set.products.get(name) {
                    let f = set.get(a).unwrap() * set.get(b).unwrap();
                    prop_assert!((p - f).abs() <= 1e-12 * f.abs());
                }
            }
            for key in ["delta_x", "delta_p", "fisher_length_x", "fisher_length_p", "onicescu_p", "shannon_length_p", "delta_log_x", "delta_log_abs_p"] {
                prop_assert!(set.get(key).unwrap() > 0.0);
            }
        }

        #[test]
        fn z_independent_quantities(n in 1u32..25, z in 0.1f64..20.0) {
            let a = MeasureSet::closed_only(st(n, z));
            let b = MeasureSet::closed_only(st(n, 1.0));
            for key in ["heisenberg", "logarithmic", "fisher", "delta_log_x", "delta_log_abs_p"] {
                let (x, y) = (a.get(key).unwrap(), b.get(key).unwrap());
                prop_assert!((x - y).abs() <= 1e-10 * y.abs(), "{key}: {x} vs {y}");
            }
        }
    }
}
