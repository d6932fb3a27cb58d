//! Integration engines: fixed Gauss rules and an adaptive Gauss–Kronrod
//! driver for finite intervals, the half-line and the whole real line.
//!
//! The adaptive driver never evaluates the integrand at a panel endpoint,
//! so integrands with removable singularities at breakpoints (for example
//! `ρ log ρ` at a node of ρ) need no special casing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{laguerre_derivative, laguerre_zeros, ln_gamma_pos, LaguerreParams};

/// Default cap on integrand evaluations for one adaptive integral.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    GaussLaguerre { alpha: f64 },
    GaussLegendre,
}

/// Immutable node/weight table.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: RuleKind,
    exactness_degree: usize,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    /// Highest monomial degree integrated exactly against the rule's weight.
    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i f(x_i). The weight function is implied by the rule kind.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `m`-point Gauss–Laguerre rule for the weight x^α e^{−x} on [0, ∞).
///
/// Nodes are the zeros of L_m^(α); weights follow from
/// w_i = Γ(m+α+1) / (m! x_i [L_m^(α)'(x_i)]²), evaluated in log space.
pub fn gauss_laguerre_rule(m: usize, alpha: f64) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidArgument("a rule needs at least one node".into()));
    }
    let params = LaguerreParams::new(m, alpha)?;
    let nodes = laguerre_zeros(params)?;
    let log_norm = ln_gamma_pos(m as f64 + alpha + 1.0) - ln_gamma_pos(m as f64 + 1.0);
    let weights = nodes
        .iter()
        .map(|&x| {
            let d = laguerre_derivative(params, x).abs();
            (log_norm - x.ln() - 2.0 * d.ln()).exp()
        })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLaguerre { alpha },
        exactness_degree: 2 * m - 1,
    })
}

/// `m`-point Gauss–Legendre rule on [−1, 1] (Newton iteration on P_m).
pub fn gauss_legendre_rule(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::InvalidArgument("a rule needs at least one node".into()));
    }
    let mf = m as f64;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: RuleKind::GaussLegendre,
        exactness_degree: 2 * m - 1,
    })
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl IntegralResult {
    fn combine(self, other: IntegralResult) -> IntegralResult {
        IntegralResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }
}

/// Accept when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    /// Same number used as both bounds.
    pub fn both(tol: f64) -> Self {
        Self { abs: tol, rel: tol }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Adaptive Gauss–Kronrod (7/15) driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub tol: Tolerance,
    /// Maximum number of integrand evaluations.
    pub budget: usize,
    /// Each initial segment is split into this many equal panels before
    /// adaptation starts.
    pub initial_panels: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            tol: Tolerance::both(1e-10),
            budget: DEFAULT_BUDGET,
            initial_panels: 1,
        }
    }
}

impl Adaptive {
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

    pub fn with_initial_panels(mut self, panels: usize) -> Self {
        self.initial_panels = panels.max(1);
        self
    }

    /// ∫_a^b f with forced splits at `breakpoints` (those outside (a, b) are
    /// ignored).
    pub fn finite<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, breakpoints: &[f64]) -> IntegralResult {
        let edges = segment_edges(a, b, breakpoints);
        self.run(&f, &edges, self.tol, self.budget)
    }

    /// ∫_0^∞ f for integrands with an exponentially decaying tail.
    ///
    /// [0, T] is integrated with forced splits at every breakpoint, where
    /// `T` is the larger of `truncation` and the last breakpoint. Panels
    /// [T, 2T], [2T, 4T], … are then added until one contributes less than
    /// a tenth of the accuracy target; that last panel's size is carried in
    /// the error estimate as a bound for the remainder.
    pub fn semi_infinite<F: Fn(f64) -> f64>(
        &self,
        f: F,
        breakpoints: &[f64],
        truncation: Option<f64>,
    ) -> IntegralResult {
        let last_bp = breakpoints
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > 0.0)
            .fold(0.0, f64::max);
        let mut t = truncation.unwrap_or(0.0).max(last_bp * 1.25).max(1.0);
        let edges = segment_edges(0.0, t, breakpoints);
        // half the error allowance goes to [0, T], the rest to the tail
        let head_tol = Tolerance {
            abs: self.tol.abs / 2.0,
            rel: self.tol.rel / 2.0,
        };
        let mut total = self.run(&f, &edges, head_tol, self.budget);

        for _ in 0..64 {
            let remaining = self.budget.saturating_sub(total.evaluations);
            let target = self.tol.target(total.value) / 10.0;
            let panel_tol = Tolerance::absolute(target / 10.0);
            let panel = self.run(&f, &[t, 2.0 * t], panel_tol, remaining);
            let small = panel.value.abs() + panel.error_estimate <= target;
            total = total.combine(panel);
            t *= 2.0;
            if small {
                total.error_estimate += panel.value.abs();
                total.converged &= total.error_estimate <= self.tol.target(total.value);
                return total;
            }
            if total.evaluations >= self.budget {
                break;
            }
        }
        total.converged = false;
        total
    }

    /// ∫_{−∞}^{∞} f for integrands decaying at least like |p|^{−2}.
    ///
    /// Uses p = scale·tan θ on (−π/2, π/2) with a forced split at θ = 0.
    pub fn real_line<F: Fn(f64) -> f64>(&self, f: F, scale: f64) -> IntegralResult {
        let g = tan_substitution(&f, scale);
        self.run(&g, &[-FRAC_PI_2, 0.0, FRAC_PI_2], self.tol, self.budget)
    }

    /// ∫_0^∞ f through the same tangent map as [`Adaptive::real_line`].
    pub fn half_line_algebraic<F: Fn(f64) -> f64>(&self, f: F, scale: f64) -> IntegralResult {
        let g = tan_substitution(&f, scale);
        self.run(&g, &[0.0, FRAC_PI_2], self.tol, self.budget)
    }

    fn run<F: Fn(f64) -> f64>(&self, f: &F, edges: &[f64], tol: Tolerance, budget: usize) -> IntegralResult {
        let mut heap = BinaryHeap::new();
        let mut settled: Vec<Panel> = Vec::new();
        let mut evaluations = 0usize;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = self.initial_panels;
            for i in 0..n {
                let lo = a + (b - a) * i as f64 / n as f64;
                let hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
                if hi > lo {
                    heap.push(Panel::evaluate(f, lo, hi));
                    evaluations += KRONROD_POINTS;
                }
            }
        }

        let mut iteration = 0usize;
        let (mut value, mut error) = totals(&heap, &settled);
        loop {
            if error <= tol.target(value) {
                // confirm with a fresh sum before declaring success
                let (v, e) = totals(&heap, &settled);
                value = v;
                error = e;
                if error <= tol.target(value) {
                    return IntegralResult {
                        value,
                        error_estimate: error,
                        evaluations,
                        converged: true,
                    };
                }
            }
            let Some(worst) = heap.pop() else { break };
            if evaluations + 2 * KRONROD_POINTS > budget {
                heap.push(worst);
                break;
            }
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e-14 * mid.abs().max(1e-300) {
                settled.push(worst);
                continue;
            }
            let left = Panel::evaluate(f, worst.a, mid);
            let right = Panel::evaluate(f, mid, worst.b);
            evaluations += 2 * KRONROD_POINTS;
            value += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
            iteration += 1;
            if iteration.is_multiple_of(64) {
                let (v, e) = totals(&heap, &settled);
                value = v;
                error = e;
            }
        }
        let (value, error) = totals(&heap, &settled);
        IntegralResult {
            value,
            error_estimate: error,
            evaluations,
            converged: error <= tol.target(value),
        }
    }
}

/// ∫_0^∞ f with breakpoints and default settings at the given tolerance.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> IntegralResult {
    Adaptive::new(Tolerance::both(tol)).semi_infinite(f, breakpoints, None)
}

/// ∫_{−∞}^{∞} f with default settings at the given tolerance.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, scale: f64, tol: f64) -> IntegralResult {
    Adaptive::new(Tolerance::both(tol)).real_line(f, scale)
}

fn tan_substitution<F: Fn(f64) -> f64>(f: &F, scale: f64) -> impl Fn(f64) -> f64 + '_ {
    move |theta: f64| {
        let c = theta.cos();
        if c == 0.0 {
            return 0.0;
        }
        let v = f(scale * theta.tan()) * scale / (c * c);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }
}

fn segment_edges(a: f64, b: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    inner.dedup();
    edges.extend(inner);
    edges.push(b);
    edges
}

fn totals(heap: &BinaryHeap<Panel>, settled: &[Panel]) -> (f64, f64) {
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut error = 0.0;
    for p in heap.iter().chain(settled) {
        // Neumaier summation over panel values
        let t = value + p.value;
        if value.abs() >= p.value.abs() {
            comp += (value - t) + p.value;
        } else {
            comp += (p.value - t) + value;
        }
        value = t;
        error += p.error;
    }
    (value + comp, error)
}

const KRONROD_POINTS: usize = 15;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// 7-point Gauss weights, at XGK[1], XGK[3], XGK[5] and the centre
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl Panel {
    fn evaluate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let f_center = f(center);
        let mut kronrod = f_center * WGK[7];
        let mut gauss = f_center * WG[3];
        let mut abs_sum = kronrod.abs();
        let mut values = [(0.0, 0.0); 7];
        for (j, slot) in values.iter_mut().enumerate() {
            let dx = half * XGK[j];
            let f1 = f(center - dx);
            let f2 = f(center + dx);
            *slot = (f1, f2);
            kronrod += WGK[j] * (f1 + f2);
            abs_sum += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kronrod;
        let mut asc = WGK[7] * (f_center - mean).abs();
        for (j, (f1, f2)) in values.iter().enumerate() {
            asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let value = kronrod * half;
        let res_abs = abs_sum * half.abs();
        let res_asc = asc * half.abs();
        let mut error = ((kronrod - gauss) * half).abs();
        if res_asc != 0.0 && error != 0.0 {
            error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
        }
        if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            error = error.max(50.0 * f64::EPSILON * res_abs);
        }
        if !value.is_finite() || !error.is_finite() {
            error = f64::INFINITY;
        }
        Panel { a, b, value, error }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}
