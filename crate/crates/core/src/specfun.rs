//! Special functions: log-gamma, digamma, trigamma, generalized binomials
//! and generalized Laguerre polynomials (values, derivatives, zeros).
//!
//! Everything here is double precision and free of global state.

use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Below this the Laguerre recurrence is evaluated plainly; above it each
/// step uses a compensated `a*b - c*d`.
const COMPENSATED_DEGREE: usize = 50;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain("ln_gamma", x, "x > 0"));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x >= 10.0 {
        return stirling_ln_gamma(x);
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum away from its poles.
        return lanczos_ln_gamma(x + 1.0) - x.ln();
    }
    lanczos_ln_gamma(x)
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * t.ln() - t + sum.ln()
}

fn stirling_ln_gamma(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Bernoulli terms B_{2k} / (2k (2k-1) x^{2k-1})
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0))))));
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + series
}

/// Gamma function for `x > 0`, via `exp(ln_gamma)`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

/// Digamma ψ(x) = Γ'(x)/Γ(x) for `x > 0`.
///
/// The argument is shifted upward past 10 with ψ(x) = ψ(x+1) − 1/x and the
/// asymptotic series is applied there.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain("digamma", x, "x > 0"));
    }
    Ok(digamma_pos(x))
}

pub(crate) fn digamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32_760.0 - inv2 / 12.0))))));
    acc + x.ln() - 0.5 / x - tail
}

/// Trigamma ψ'(x) for `x > 0`, same shift-then-series scheme as [`digamma`].
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(domain("trigamma", x, "x > 0"));
    }
    Ok(trigamma_pos(x))
}

pub(crate) fn trigamma_pos(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0
                - inv2
                    * (1.0 / 30.0
                        - inv2
                            * (1.0 / 42.0
                                - inv2
                                    * (1.0 / 30.0
                                        - inv2
                                            * (5.0 / 66.0
                                                - inv2 * (691.0 / 2730.0 - inv2 * 7.0 / 6.0))))));
    acc + series
}

/// Generalized binomial coefficient `a choose k` for real `a`:
/// ∏_{j=1..k} (a − j + 1)/j.
///
/// Vanishes exactly when `a` is a nonnegative integer smaller than `k`,
/// since one factor of the product is then exactly zero.
pub fn binomial_general(a: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for j in 1..=k {
        let j = f64::from(j);
        acc *= (a - j + 1.0) / j;
    }
    acc
}

/// Degree and weight exponent of a generalized Laguerre polynomial L_k^(α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    degree: usize,
    alpha: f64,
}

impl LaguerreParams {
    pub fn new(degree: usize, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > -1.0) {
            return Err(Error::InvalidLaguerre(format!(
                "alpha must be finite and > -1, got {alpha}"
            )));
        }
        Ok(Self { degree, alpha })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// L_k^(α)(x) by forward three-term recurrence.
///
/// Defined for every real `x`, although only `x >= 0` is meaningful for the
/// weight ω_α.
pub fn laguerre(params: LaguerreParams, x: f64) -> f64 {
    laguerre_pair_unchecked(params.degree, params.alpha, x).0
}

/// d/dx L_k^(α)(x) = −L_{k−1}^(α+1)(x), zero for k = 0.
pub fn laguerre_derivative(params: LaguerreParams, x: f64) -> f64 {
    if params.degree == 0 {
        return 0.0;
    }
    -laguerre_pair_unchecked(params.degree - 1, params.alpha + 1.0, x).0
}

/// Value and derivative together.
pub fn laguerre_with_derivative(params: LaguerreParams, x: f64) -> (f64, f64) {
    (laguerre(params, x), laguerre_derivative(params, x))
}

/// Returns `(L_k, L_{k-1})`; `L_{-1}` is taken as 0.
pub(crate) fn laguerre_pair_unchecked(degree: usize, alpha: f64, x: f64) -> (f64, f64) {
    if degree == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + alpha - x;
    for k in 1..degree {
        let kf = k as f64;
        let b = 2.0 * kf + alpha + 1.0 - x;
        let c = kf + alpha;
        let numer = if k > COMPENSATED_DEGREE {
            diff_of_products(b, curr, c, prev)
        } else {
            b * curr - c * prev
        };
        let next = numer / (kf + 1.0);
        prev = curr;
        curr = next;
    }
    (curr, prev)
}

/// `a*b - c*d` with the rounding error of `c*d` folded back in.
#[inline]
fn diff_of_products(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = c * d;
    let err = (-c).mul_add(d, w);
    a.mul_add(b, -w) + err
}

/// All zeros of L_k^(α), strictly increasing.
///
/// Sign changes are located on a grid over (0, 4k + 2α + 2] whose spacing
/// grows like √x, matching the zero density near the origin; each bracket
/// is then bisected to machine precision and given one Newton polish.
pub fn laguerre_zeros(params: LaguerreParams) -> Result<Vec<f64>> {
    let k = params.degree;
    if k == 0 {
        return Ok(Vec::new());
    }
    let upper = 4.0 * k as f64 + 2.0 * params.alpha + 2.0;
    let mut cells = 8 * k;
    let mut brackets = sign_change_brackets(params, upper, cells);
    let mut attempts = 0;
    while brackets.len() < k && attempts < 8 {
        cells *= 2;
        attempts += 1;
        brackets = sign_change_brackets(params, upper, cells);
    }
    if brackets.len() != k {
        return Err(Error::ZeroSearch {
            degree: k,
            found: brackets.len(),
        });
    }
    Ok(brackets
        .into_iter()
        .map(|(lo, hi)| refine_zero(params, lo, hi))
        .collect())
}

fn sign_change_brackets(params: LaguerreParams, upper: f64, cells: usize) -> Vec<(f64, f64)> {
    let point = |i: usize| {
        let s = i as f64 / cells as f64;
        upper * s * s
    };
    let mut out = Vec::with_capacity(params.degree);
    let mut x_prev = 0.0;
    let mut v_prev = laguerre(params, 0.0);
    for i in 1..=cells {
        let x = point(i);
        let v = laguerre(params, x);
        if v == 0.0 {
            out.push((x, x));
            // step past the exact zero so it is not counted twice
            x_prev = x;
            v_prev = laguerre(params, point(i) + f64::EPSILON * x.max(1.0));
            continue;
        }
        if v_prev.signum() != v.signum() && v_prev != 0.0 {
            out.push((x_prev, x));
        }
        x_prev = x;
        v_prev = v;
    }
    out
}

fn refine_zero(params: LaguerreParams, mut lo: f64, mut hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let mut f_lo = laguerre(params, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = laguerre(params, mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    let (f, df) = laguerre_with_derivative(params, z);
    if df != 0.0 {
        let polished = z - f / df;
        if polished >= lo && polished <= hi && laguerre(params, polished).abs() <= f.abs() {
            return polished;
        }
    }
    z
}
