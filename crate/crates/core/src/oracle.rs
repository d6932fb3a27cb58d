//! Quadrature oracle: every measure recomputed directly from the densities,
//! independently of the closed forms, plus [`ComparisonReport`]s that set
//! the two side by side.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::measures::{
    e1_from_shannon_position, log_abs_p_spread, shannon_components_position, x_moment,
    MeasureSet, MomentMethod, Provenance,
};
use crate::model::{
    momentum_density, momentum_density_derivative, psi_derivative, rho, rho_derivative,
    QuantumState,
};
use crate::quadrature::{Adaptive, IntegralResult, Tolerance, DEFAULT_BUDGET};
use crate::specfun::{laguerre_pair_unchecked, laguerre_zeros, LaguerreParams};

/// Half-width of the band around each zero of ψ (in the scaled variable
/// z = 2Zx/n) inside which the Fisher integrand is evaluated as 4ψ'².
pub const FISHER_GUARD: f64 = 1e-8;

/// Quadrature settings shared by every oracle integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Oracle {
    pub tol: Tolerance,
    pub budget: usize,
    pub initial_panels: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            tol: Tolerance {
                abs: 1e-14,
                rel: 1e-12,
            },
            budget: DEFAULT_BUDGET,
            initial_panels: 1,
        }
    }
}

/// Momentum-space functional evaluated by [`Oracle::momentum_measure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentumQuantity {
    /// ⟨p^k⟩ for even k ≥ 0.
    Moment { k: u32 },
    /// ⟨|p|^k⟩ for −1 < k < 3.
    AbsMoment { k: f64 },
    /// W_q[γ] = ∫ γ^q for q > 1/4.
    Entropic { q: f64 },
    /// −∫ γ log γ.
    Shannon,
    /// ∫ γ'²/γ.
    Fisher,
    /// ⟨(log|p|)^m⟩.
    LogMoment { m: u32 },
}

/// Position Shannon entropy by quadrature and the E1 it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShannonPosition {
    pub entropy: IntegralResult,
    pub e1: f64,
}

impl Oracle {
    pub fn new(tol: Tolerance) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Twice the initial panels and budget and a tenth of the relative
    /// tolerance. The absolute floor is kept, since it already sits near
    /// the rounding level of the panel sums.
    pub fn refined(&self) -> Self {
        Self {
            tol: Tolerance {
                abs: self.tol.abs,
                rel: self.tol.rel / 10.0,
            },
            budget: self.budget.saturating_mul(2),
            initial_panels: self.initial_panels * 2,
        }
    }

    fn solver(&self) -> Adaptive {
        Adaptive::new(self.tol)
            .with_budget(self.budget)
            .with_initial_panels(self.initial_panels)
    }

    /// ∫_0^∞ f(x) dx with splits at the nodes of ψ_n.
    fn position_integral<F: Fn(f64) -> f64>(&self, state: QuantumState, f: F) -> IntegralResult {
        let cut = state.unscaled(4.0 * state.nf() + 10.0);
        self.solver().semi_infinite(f, &state.nodes(), Some(cut))
    }

    /// Same integral after x = u^a, which flattens algebraic singularities
    /// at the origin.
    fn position_integral_mapped<F: Fn(f64) -> f64>(
        &self,
        state: QuantumState,
        a: f64,
        f: F,
    ) -> IntegralResult {
        let cut = state.unscaled(4.0 * state.nf() + 10.0).powf(1.0 / a);
        let nodes: Vec<f64> = state.nodes().into_iter().map(|x| x.powf(1.0 / a)).collect();
        let g = |u: f64| {
            let x = u.powf(a);
            f(x) * a * u.powf(a - 1.0)
        };
        self.solver().semi_infinite(g, &nodes, Some(cut))
    }

    /// ∫_0^∞ f(t) dt in the scaled variable, split at the zeros of L_{n−1}^(1).
    fn scaled_integral<F: Fn(f64) -> f64>(&self, n: u32, f: F) -> IntegralResult {
        let zeros = laguerre_zeros(laguerre_params(n)).expect("zeros of L_{n-1}^(1) are bracketed");
        self.solver()
            .semi_infinite(f, &zeros, Some(4.0 * f64::from(n) + 10.0))
    }

    /// ⟨x^k⟩ = ∫ x^k ρ_n for real k > −3.
    pub fn position_moment(&self, state: QuantumState, k: f64) -> Result<IntegralResult> {
        if !(k.is_finite() && k > -3.0) {
            return Err(domain("position_moment", k, "k > -3"));
        }
        if k < -2.0 {
            let a = (1.0 / (k + 3.0)).ceil().max(2.0);
            return Ok(self.position_integral_mapped(state, a, |x| x.powf(k) * rho(state, x)));
        }
        Ok(self.position_integral(state, |x| x.powf(k) * rho(state, x)))
    }

    /// ⟨(log x)^m⟩.
    pub fn log_moment_position(&self, state: QuantumState, m: u32) -> IntegralResult {
        self.position_integral(state, |x| x.ln().powi(m as i32) * rho(state, x))
    }

    /// W_q[ρ_n] = ∫ ρ_n^q for q > 0.
    pub fn entropic_moment_position(&self, state: QuantumState, q: f64) -> Result<IntegralResult> {
        if !(q.is_finite() && q > 0.0) {
            return Err(domain("entropic_moment_position", q, "q > 0"));
        }
        Ok(self.position_integral(state, |x| rho(state, x).powf(q)))
    }

    /// S[ρ_n] = −∫ ρ log ρ (taken as 0 where ρ vanishes) and
    /// E1 = −2n²S − log(Z/n³) I1 − I2.
    pub fn shannon_position(&self, state: QuantumState) -> ShannonPosition {
        let entropy = self.position_integral(state, |x| {
            let r = rho(state, x);
            if r > 0.0 {
                -r * r.ln()
            } else {
                0.0
            }
        });
        ShannonPosition {
            entropy,
            e1: e1_from_shannon_position(state, entropy.value),
        }
    }

    /// E1 = ∫ t² e^{−t} [L_{n−1}^(1)]² log [L_{n−1}^(1)]² dt, directly.
    pub fn e1_direct(&self, n: u32) -> Result<IntegralResult> {
        let k = check_n(n)?;
        Ok(self.scaled_integral(n, |t| {
            let l = laguerre_pair_unchecked(k, 1.0, t).0;
            let l2 = l * l;
            if l2 > 0.0 {
                t * t * (-t).exp() * l2 * l2.ln()
            } else {
                0.0
            }
        }))
    }

    /// I1 and I2 by quadrature.
    pub fn shannon_components(&self, n: u32) -> Result<(IntegralResult, IntegralResult)> {
        let k = check_n(n)?;
        let weight = |t: f64| {
            let l = laguerre_pair_unchecked(k, 1.0, t).0;
            t * t * (-t).exp() * l * l
        };
        let i1 = self.scaled_integral(n, weight);
        let i2 = self.scaled_integral(n, |t| weight(t) * (2.0 * t.ln() - t));
        Ok((i1, i2))
    }

    /// F[ρ_n] = ∫ ρ'²/ρ, switching to 4ψ'² within [`FISHER_GUARD`] of a
    /// zero of ψ.
    pub fn fisher_position(&self, state: QuantumState) -> IntegralResult {
        let mut zeros = vec![0.0];
        zeros.extend(laguerre_zeros(laguerre_params(state.n())).expect("bracketed zeros"));
        self.position_integral(state, |x| {
            let t = state.scaled(x);
            let i = zeros.partition_point(|z| *z < t);
            let near = |j: usize| zeros.get(j).is_some_and(|z| (t - z).abs() < FISHER_GUARD);
            let r = rho(state, x);
            if near(i) || (i > 0 && near(i - 1)) || r == 0.0 {
                let d = psi_derivative(state, x);
                4.0 * d * d
            } else {
                let d = rho_derivative(state, x);
                d * d / r
            }
        })
    }

    /// Momentum-space functional over the whole real line.
    pub fn momentum_measure(&self, state: QuantumState, which: MomentumQuantity) -> Result<IntegralResult> {
        let f = momentum_integrand(state, which)?;
        Ok(self.solver().real_line(f, state.z() / state.nf()))
    }

    /// Same functional as twice the integral over p > 0 (every integrand
    /// here is even).
    pub fn momentum_measure_half_line(
        &self,
        state: QuantumState,
        which: MomentumQuantity,
    ) -> Result<IntegralResult> {
        let f = momentum_integrand(state, which)?;
        let r = self.solver().half_line_algebraic(f, state.z() / state.nf());
        Ok(IntegralResult {
            value: 2.0 * r.value,
            error_estimate: 2.0 * r.error_estimate,
            ..r
        })
    }

    /// Oracle values for the [`MeasureSet`] keys that are plain integrals
    /// of a density.
    pub fn numeric_entries(&self, state: QuantumState) -> Vec<(String, IntegralResult)> {
        let moment = |k: f64| self.position_moment(state, k).expect("k in range");
        let mom = |w| self.momentum_measure(state, w).expect("parameter in range");
        vec![
            ("x_mean".into(), moment(1.0)),
            ("x_sq".into(), moment(2.0)),
            ("x_inv".into(), moment(-1.0)),
            ("x_inv_sq".into(), moment(-2.0)),
            ("log_x_mean".into(), self.log_moment_position(state, 1)),
            ("log_x_sq".into(), self.log_moment_position(state, 2)),
            ("fisher_info_x".into(), self.fisher_position(state)),
            (
                "entropic_moment_2_x".into(),
                self.entropic_moment_position(state, 2.0).expect("q in range"),
            ),
            ("shannon_entropy_x".into(), self.shannon_position(state).entropy),
            ("p_sq".into(), mom(MomentumQuantity::Moment { k: 2 })),
            ("abs_p_mean".into(), mom(MomentumQuantity::AbsMoment { k: 1.0 })),
            ("log_abs_p_mean".into(), mom(MomentumQuantity::LogMoment { m: 1 })),
            ("log_abs_p_sq".into(), mom(MomentumQuantity::LogMoment { m: 2 })),
            ("fisher_info_p".into(), mom(MomentumQuantity::Fisher)),
            ("entropic_moment_2_p".into(), mom(MomentumQuantity::Entropic { q: 2.0 })),
            ("shannon_entropy_p".into(), mom(MomentumQuantity::Shannon)),
        ]
    }
}

fn laguerre_params(n: u32) -> LaguerreParams {
    LaguerreParams::new(n as usize - 1, 1.0).expect("alpha = 1 is valid")
}

fn check_n(n: u32) -> Result<usize> {
    if n == 0 {
        return Err(crate::error::Error::InvalidState("n must be >= 1".into()));
    }
    Ok(n as usize - 1)
}

fn momentum_integrand(state: QuantumState, which: MomentumQuantity) -> Result<Box<dyn Fn(f64) -> f64>> {
    let g = move |p: f64| momentum_density(state, p);
    Ok(match which {
        MomentumQuantity::Moment { k } => {
            if k % 2 == 1 || k >= 3 {
                return Err(domain("momentum_measure", f64::from(k), "k in {0, 2}"));
            }
            Box::new(move |p| p.powi(k as i32) * g(p))
        }
        MomentumQuantity::AbsMoment { k } => {
            if !(k > -1.0 && k < 3.0) {
                return Err(domain("momentum_measure", k, "-1 < k < 3"));
            }
            Box::new(move |p| p.abs().powf(k) * g(p))
        }
        MomentumQuantity::Entropic { q } => {
            if !(q.is_finite() && q > 0.25) {
                return Err(domain("momentum_measure", q, "q > 1/4"));
            }
            Box::new(move |p| g(p).powf(q))
        }
        MomentumQuantity::Shannon => Box::new(move |p| {
            let v = g(p);
            if v > 0.0 {
                -v * v.ln()
            } else {
                0.0
            }
        }),
        MomentumQuantity::Fisher => Box::new(move |p| {
            let d = momentum_density_derivative(state, p);
            let v = g(p);
            if v > 0.0 {
                d * d / v
            } else {
                0.0
            }
        }),
        MomentumQuantity::LogMoment { m } => Box::new(move |p| p.abs().ln().powi(m as i32) * g(p)),
    })
}

/// Integrand class of a comparison row; selects the default tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// Power and entropic-moment integrals.
    Polynomial,
    /// Integrals involving a logarithm.
    Log,
    /// Integrals of a ratio such as ρ'²/ρ.
    Ratio,
    /// Algebraic identities between closed forms.
    Identity,
}

/// Comparison tolerances per kernel class, with per-row overrides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub polynomial: f64,
    pub log_kernel: f64,
    pub ratio_kernel: f64,
    pub identity: f64,
    /// Log-kernel tolerance used when n >= [`LARGE_N`].
    pub large_n_log_kernel: f64,
    pub overrides: BTreeMap<String, f64>,
}

/// Principal quantum number from which the relaxed log-kernel tolerance
/// and a larger budget apply.
pub const LARGE_N: u32 = 40;

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            polynomial: 1e-9,
            log_kernel: 1e-6,
            ratio_kernel: 1e-6,
            identity: 1e-12,
            large_n_log_kernel: 1e-5,
            overrides: BTreeMap::new(),
        }
    }
}

impl Tolerances {
    pub fn with_override(mut self, name: &str, tol: f64) -> Self {
        self.overrides.insert(name.to_string(), tol);
        self
    }

    /// Tolerance applied to a row.
    pub fn for_row(&self, name: &str, kernel: Kernel, n: u32) -> f64 {
        if let Some(t) = self.overrides.get(name) {
            return *t;
        }
        match kernel {
            Kernel::Polynomial => self.polynomial,
            Kernel::Log if n >= LARGE_N => self.large_n_log_kernel,
            Kernel::Log => self.log_kernel,
            Kernel::Ratio => self.ratio_kernel,
            Kernel::Identity => self.identity,
        }
    }
}

/// One closed-form versus quadrature comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub name: String,
    pub kernel: Kernel,
    /// Absent when the quantity has no closed form for this state.
    pub closed: Option<f64>,
    pub numeric: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub pass: bool,
    pub converged: bool,
}

impl ComparisonRow {
    /// `rel_err` is `abs_err / |closed|`, or `abs_err` when `closed` is 0.
    /// A row passes when its integral converged and either error is within
    /// `tol`; rows without a closed form pass on convergence alone.
    pub fn new(name: &str, kernel: Kernel, closed: Option<f64>, numeric: f64, converged: bool, tol: f64) -> Self {
        let (abs_err, rel_err, within) = match closed {
            Some(c) => {
                let abs_err = (numeric - c).abs();
                let rel_err = if c == 0.0 { abs_err } else { abs_err / c.abs() };
                (abs_err, rel_err, abs_err <= tol || rel_err <= tol)
            }
            None => (0.0, 0.0, true),
        };
        Self {
            name: name.to_string(),
            kernel,
            closed,
            numeric,
            abs_err,
            rel_err,
            tol,
            pass: converged && within,
            converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub state: QuantumState,
    /// Sorted by name.
    pub rows: Vec<ComparisonRow>,
    pub overall_pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn row(&self, name: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Compares the closed-form [`MeasureSet`] of `state` with the oracle.
pub fn verify(state: QuantumState, tolerances: &Tolerances, oracle: &Oracle) -> ComparisonReport {
    verify_against(state, &MeasureSet::closed_only(state), tolerances, oracle)
}

/// Same as [`verify`] but with the closed-form side taken from `set`, so
/// that a tampered set can be checked.
pub fn verify_against(
    state: QuantumState,
    set: &MeasureSet,
    tolerances: &Tolerances,
    oracle: &Oracle,
) -> ComparisonReport {
    let n = state.n();
    let mut notes = Vec::new();
    let oracle = if n >= LARGE_N {
        notes.push(format!(
            "n >= {LARGE_N}: log-kernel tolerance relaxed to {:e}, quadrature budget x4",
            tolerances.large_n_log_kernel
        ));
        oracle.with_budget(oracle.budget.saturating_mul(4))
    } else {
        *oracle
    };

    let closed = |key: &str| -> Option<f64> {
        match set.provenance.get(key) {
            Some(Provenance::ClosedForm) => set.get(key),
            _ => None,
        }
    };
    let mut rows = Vec::new();
    let mut push = |name: &str, kernel: Kernel, closed: Option<f64>, numeric: f64, converged: bool| {
        let tol = tolerances.for_row(name, kernel, n);
        rows.push(ComparisonRow::new(name, kernel, closed, numeric, converged, tol));
    };

    // position power moments
    let mut moments = BTreeMap::new();
    for k in -2..=3i32 {
        let r = oracle.position_moment(state, f64::from(k)).expect("k > -3");
        let c = x_moment(state, f64::from(k), MomentMethod::Closed).expect("k > -3");
        let name = if k < 0 {
            format!("x_moment_m{}", -k)
        } else {
            format!("x_moment_{k}")
        };
        push(&name, Kernel::Polynomial, Some(c), r.value, r.converged);
        moments.insert(k, r);
    }
    for (key, k) in [("x_inv_sq", -2), ("x_inv", -1), ("x_mean", 1), ("x_sq", 2)] {
        let r = moments[&k];
        push(key, Kernel::Polynomial, closed(key), r.value, r.converged);
    }
    let (m1, m2) = (moments[&1], moments[&2]);
    push(
        "delta_x",
        Kernel::Polynomial,
        closed("delta_x"),
        (m2.value - m1.value * m1.value).sqrt(),
        m1.converged && m2.converged,
    );
    let norm = moments[&0];
    push("normalization_x", Kernel::Polynomial, Some(1.0), norm.value, norm.converged);

    // position logarithmic moments
    let l1 = oracle.log_moment_position(state, 1);
    let l2 = oracle.log_moment_position(state, 2);
    push("log_x_mean", Kernel::Log, closed("log_x_mean"), l1.value, l1.converged);
    push("log_x_sq", Kernel::Log, closed("log_x_sq"), l2.value, l2.converged);
    push(
        "delta_log_x",
        Kernel::Log,
        closed("delta_log_x"),
        (l2.value - l1.value * l1.value).sqrt(),
        l1.converged && l2.converged,
    );

    let fx = oracle.fisher_position(state);
    push("fisher_info_x", Kernel::Ratio, closed("fisher_info_x"), fx.value, fx.converged);

    let w2 = oracle.entropic_moment_position(state, 2.0).expect("q = 2");
    push(
        "entropic_moment_2_x",
        Kernel::Polynomial,
        closed("entropic_moment_2_x"),
        w2.value,
        w2.converged,
    );

    let sx = oracle.shannon_position(state);
    push(
        "shannon_entropy_x",
        Kernel::Log,
        closed("shannon_entropy_x"),
        sx.entropy.value,
        sx.entropy.converged,
    );
    push(
        "e1",
        Kernel::Log,
        (n == 1).then_some(0.0),
        sx.e1,
        sx.entropy.converged,
    );
    let comps = shannon_components_position(n).expect("n >= 1");
    let (i1, i2) = oracle.shannon_components(n).expect("n >= 1");
    push("shannon_i1", Kernel::Polynomial, Some(comps.i1), i1.value, i1.converged);
    push("shannon_i2", Kernel::Log, Some(comps.i2), i2.value, i2.converged);

    // momentum space
    let mom = |w| oracle.momentum_measure(state, w).expect("parameter in range");
    let p0 = mom(MomentumQuantity::Moment { k: 0 });
    push("normalization_p", Kernel::Polynomial, Some(1.0), p0.value, p0.converged);
    let p2 = mom(MomentumQuantity::Moment { k: 2 });
    push("p_sq", Kernel::Polynomial, closed("p_sq"), p2.value, p2.converged);
    push("delta_p", Kernel::Polynomial, closed("delta_p"), p2.value.sqrt(), p2.converged);
    let pa = mom(MomentumQuantity::AbsMoment { k: 1.0 });
    push("abs_p_mean", Kernel::Polynomial, closed("abs_p_mean"), pa.value, pa.converged);
    push(
        "delta_abs_p",
        Kernel::Polynomial,
        closed("delta_abs_p"),
        (p2.value - pa.value * pa.value).sqrt(),
        p2.converged && pa.converged,
    );
    let lp1 = mom(MomentumQuantity::LogMoment { m: 1 });
    let lp2 = mom(MomentumQuantity::LogMoment { m: 2 });
    push("log_abs_p_mean", Kernel::Log, closed("log_abs_p_mean"), lp1.value, lp1.converged);
    push("log_abs_p_sq", Kernel::Log, closed("log_abs_p_sq"), lp2.value, lp2.converged);
    push(
        "delta_log_abs_p",
        Kernel::Log,
        closed("delta_log_abs_p"),
        (lp2.value - lp1.value * lp1.value).sqrt(),
        lp1.converged && lp2.converged,
    );
    let fp = mom(MomentumQuantity::Fisher);
    push("fisher_info_p", Kernel::Ratio, closed("fisher_info_p"), fp.value, fp.converged);
    let sp = mom(MomentumQuantity::Shannon);
    push("shannon_entropy_p", Kernel::Log, closed("shannon_entropy_p"), sp.value, sp.converged);
    for (name, q) in [
        ("entropic_moment_0_6_p", 0.6),
        ("entropic_moment_1_5_p", 1.5),
        ("entropic_moment_2_p", 2.0),
    ] {
        let r = mom(MomentumQuantity::Entropic { q });
        let c = if name == "entropic_moment_2_p" {
            closed(name)
        } else {
            crate::measures::entropic_moment_momentum(state, q).ok()
        };
        push(name, Kernel::Polynomial, c, r.value, r.converged);
    }

    // uncertainty products: the set's product against the known identity
    let nf = state.nf();
    let identities = [
        ("heisenberg", Some(0.5 * (nf * nf + 2.0).sqrt())),
        (
            "logarithmic",
            Some(crate::measures::delta_log_x(state) * log_abs_p_spread()),
        ),
        ("fisher", Some(0.125f64.sqrt())),
        ("onicescu", (n == 1).then_some(32.0 * std::f64::consts::PI / 15.0)),
        (
            "shannon",
            (n == 1).then(|| {
                8.0 * std::f64::consts::PI * (2.0 * (crate::specfun::EULER_GAMMA - 1.0)).exp()
            }),
        ),
    ];
    for (name, identity) in identities {
        if let Some(v) = set.products.get(name) {
            push(name, Kernel::Identity, identity, *v, true);
        }
    }

    rows.sort_by(|a, b| a.name.cmp(&b.name));
    let overall_pass = rows.iter().all(|r| r.pass);
    ComparisonReport {
        state,
        rows,
        overall_pass,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{
        entropic_moment_gs_position, fisher_momentum, fisher_position as fisher_closed,
        shannon_momentum,
    };
    use crate::specfun::EULER_GAMMA;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn st(n: u32, z: f64) -> QuantumState {
        QuantumState::new(n, z).unwrap()
    }

    #[test]
    fn position_moment_examples() {
        let o = Oracle::default();
        let r = o.position_moment(st(1, 1.0), 2.0).unwrap();
        assert!(r.converged);
        assert_relative_eq!(r.value, 3.0, max_relative = 1e-10);
        assert_relative_eq!(o.position_moment(st(1, 1.0), 0.0).unwrap().value, 1.0, max_relative = 1e-10);
        assert_relative_eq!(o.position_moment(st(4, 2.0), -2.0).unwrap().value, 0.125, max_relative = 1e-10);
        assert!(o.position_moment(st(1, 1.0), -3.0).is_err());
    }

    #[test]
    fn fractional_moment_near_lower_limit() {
        let o = Oracle::default();
        for (n, k) in [(1u32, -2.9), (3, -2.5), (2, 0.5), (5, 1.7)] {
            let s = st(n, 1.4);
            let r = o.position_moment(s, k).unwrap();
            assert!(r.converged, "n={n} k={k}");
            let c = x_moment(s, k, MomentMethod::Closed).unwrap();
            assert_relative_eq!(r.value, c, max_relative = 1e-9);
        }
    }

    #[test]
    fn entropic_moment_position_examples() {
        let o = Oracle::default();
        let r = o.entropic_moment_position(st(1, 1.0), 2.0).unwrap();
        assert_relative_eq!(r.value, 0.375, max_relative = 1e-10);
        for q in [0.5, 1.5, 3.0] {
            let r = o.entropic_moment_position(st(1, 2.5), q).unwrap();
            let c = entropic_moment_gs_position(q, 2.5).unwrap();
            assert_relative_eq!(r.value, c, max_relative = 1e-9);
        }
        let r = o.entropic_moment_position(st(6, 0.7), 1.0).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
        assert!(o.entropic_moment_position(st(1, 1.0), 0.0).is_err());
    }

    #[test]
    fn shannon_position_examples() {
        let o = Oracle::default();
        let s = o.shannon_position(st(1, 1.0));
        assert_relative_eq!(s.entropy.value, 2.0 * EULER_GAMMA, max_relative = 1e-10);
        assert!(s.e1.abs() < 1e-8);
        let s = o.shannon_position(st(1, 2.0));
        assert_relative_eq!(s.entropy.value, 2.0 * EULER_GAMMA - 2f64.ln(), max_relative = 1e-9);
    }

    #[test]
    fn recovered_e1_matches_direct_quadrature() {
        let o = Oracle::default();
        for n in [1u32, 2, 3, 6, 10] {
            let direct = o.e1_direct(n).unwrap();
            assert!(direct.converged);
            for z in [0.5, 3.0] {
                let s = o.shannon_position(st(n, z));
                assert!((s.e1 - direct.value).abs() <= 1e-8 * direct.value.abs().max(1.0), "n={n}");
            }
        }
    }

    #[test]
    fn shannon_components_by_quadrature() {
        let o = Oracle::default();
        for n in 1..=10u32 {
            let (i1, i2) = o.shannon_components(n).unwrap();
            let c = shannon_components_position(n).unwrap();
            assert_relative_eq!(i1.value, c.i1, max_relative = 1e-10);
            assert_relative_eq!(i2.value, c.i2, max_relative = 1e-9);
        }
    }

    #[test]
    fn fisher_position_examples() {
        let o = Oracle::default();
        assert_relative_eq!(o.fisher_position(st(1, 1.0)).value, 4.0, max_relative = 1e-8);
        assert_relative_eq!(o.fisher_position(st(5, 1.0)).value, 0.16, max_relative = 1e-8);
        for n in [2u32, 4, 9] {
            let s = st(n, 1.9);
            let f = o.fisher_position(s).value;
            assert_relative_eq!(f, fisher_closed(s).info, max_relative = 1e-8);
            // integration by parts: F[ρ] = 4⟨p²⟩
            let p2 = o.momentum_measure(s, MomentumQuantity::Moment { k: 2 }).unwrap().value;
            assert_relative_eq!(f, 4.0 * p2, max_relative = 1e-6);
        }
    }

    #[test]
    fn momentum_examples() {
        let o = Oracle::default();
        let s = st(1, 1.0);
        let f = o.momentum_measure(s, MomentumQuantity::Fisher).unwrap();
        assert_relative_eq!(f.value, 2.0, max_relative = 1e-9);
        let h = o.momentum_measure(s, MomentumQuantity::Shannon).unwrap();
        assert_relative_eq!(h.value, 1.224_171_4, max_relative = 1e-7);
        assert_relative_eq!(h.value, shannon_momentum(s).entropy, max_relative = 1e-10);
        let w = o.momentum_measure(s, MomentumQuantity::Entropic { q: 2.0 }).unwrap();
        assert_relative_eq!(w.value, 5.0 / (4.0 * PI), max_relative = 1e-10);
        let s = st(7, 2.2);
        let f = o.momentum_measure(s, MomentumQuantity::Fisher).unwrap();
        assert_relative_eq!(f.value, fisher_momentum(s).info, max_relative = 1e-9);
    }

    #[test]
    fn momentum_parameter_ranges() {
        let o = Oracle::default();
        let s = st(2, 1.0);
        assert!(o.momentum_measure(s, MomentumQuantity::Moment { k: 1 }).is_err());
        assert!(o.momentum_measure(s, MomentumQuantity::Moment { k: 4 }).is_err());
        assert!(o.momentum_measure(s, MomentumQuantity::AbsMoment { k: 3.0 }).is_err());
        assert!(o.momentum_measure(s, MomentumQuantity::Entropic { q: 0.25 }).is_err());
    }

    #[test]
    fn comparison_row_rules() {
        let r = ComparisonRow::new("a", Kernel::Polynomial, Some(2.0), 2.0 + 1e-10, true, 1e-9);
        assert!(r.pass);
        assert_relative_eq!(r.rel_err, 0.5e-10, max_relative = 1e-5);
        let r = ComparisonRow::new("a", Kernel::Polynomial, Some(0.0), 1e-12, true, 1e-9);
        assert_eq!(r.rel_err, r.abs_err);
        assert!(r.pass);
        let r = ComparisonRow::new("a", Kernel::Polynomial, Some(1.0), 1.1, true, 1e-9);
        assert!(!r.pass);
        let r = ComparisonRow::new("a", Kernel::Polynomial, None, 0.3, true, 1e-9);
        assert!(r.pass);
        let r = ComparisonRow::new("a", Kernel::Polynomial, Some(1.0), 1.0, false, 1e-9);
        assert!(!r.pass);
    }

    #[test]
    fn verify_ground_state_and_excited_state() {
        let tol = Tolerances::default();
        let o = Oracle::default();
        for (n, z) in [(1u32, 1.0), (7, 0.5)] {
            let report = verify(st(n, z), &tol, &o);
            let bad: Vec<_> = report.failures().map(|r| r.name.clone()).collect();
            assert!(report.overall_pass, "n={n} Z={z}: {bad:?}");
            let names: Vec<_> = report.rows.iter().map(|r| r.name.as_str()).collect();
            let mut sorted = names.clone();
            sorted.sort_unstable();
            assert_eq!(names, sorted);
        }
        let report = verify(st(3, 1.0), &tol, &o);
        assert!(report.row("entropic_moment_2_x").unwrap().closed.is_none());
        assert!(report.row("e1").unwrap().closed.is_none());
    }

    #[test]
    fn corrupted_delta_x_is_detected() {
        let s = st(2, 1.0);
        let mut set = MeasureSet::closed_only(s);
        let dx = set.get("delta_x").unwrap();
        assert!(set.set_factor("delta_x", dx * 1.01));
        let report = verify_against(s, &set, &Tolerances::default(), &Oracle::default());
        assert!(!report.overall_pass);
        assert!(!report.row("delta_x").unwrap().pass);
        assert!(!report.row("heisenberg").unwrap().pass);
    }

    #[test]
    fn identity_override_still_passes() {
        let tol = Tolerances::default().with_override("heisenberg", 1e-15);
        let report = verify(st(1, 1.0), &tol, &Oracle::default());
        assert!(report.overall_pass);
        assert_eq!(report.row("heisenberg").unwrap().tol, 1e-15);
    }

    #[test]
    fn starved_budget_fails_rows() {
        let o = Oracle::default().with_budget(100);
        let report = verify(st(3, 1.0), &Tolerances::default(), &o);
        assert!(!report.overall_pass);
        assert!(report.rows.iter().any(|r| !r.converged));
    }
}
