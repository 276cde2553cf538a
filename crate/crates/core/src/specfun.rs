//! Jacobi polynomials and the radial wavefunction in the variable
//! `s = sinh²(αr)`.
//!
//! The wavefunction is
//!
//! ```text
//! R(r) = N · s^{1/4+ζ} (1+s)^{1/4−γ} P_n^{(2ζ, −2γ)}(1 + 2s)
//! ```
//!
//! so the polynomial is always evaluated at `x = 1 + 2s ≥ 1`, outside the
//! classical orthogonality interval, and with a negative second parameter.

use crate::error::{Error, Result};
use crate::model::State;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobiParams {
    pub n: u32,
    pub a: f64,
    pub b: f64,
    pub x: f64,
}

/// P_n^{(a,b)}(x) by the three-term recurrence in the degree.
pub fn jacobi(jp: &JacobiParams) -> Result<f64> {
    let v = jacobi_value(jp.n, jp.a, jp.b, jp.x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::JacobiOverflow {
            degree: jp.n,
            x: jp.x,
        })
    }
}

/// Unchecked evaluation; may return a non-finite value on overflow.
pub fn jacobi_value(n: u32, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let ab = a + b;
    let p1 = 0.5 * (a - b) + (1.0 + 0.5 * ab) * x;
    if n == 1 {
        return p1;
    }
    if recurrence_degenerate(n, ab) {
        return jacobi_explicit(n, a, b, x);
    }
    let (mut prev, mut cur) = (1.0, p1);
    for k in 2..=n {
        let k = f64::from(k);
        let c = 2.0 * k + ab;
        let denom = 2.0 * k * (k + ab) * (c - 2.0);
        let lin = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b);
        let back = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
        let next = (lin * cur - back * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

// The recurrence divides by (k + a + b)(2k + a + b − 2); these vanish for
// isolated parameter values (e.g. integral λ at α = 1).
fn recurrence_degenerate(n: u32, ab: f64) -> bool {
    (2..=n).any(|k| {
        let k = f64::from(k);
        (k + ab).abs() < 1e-8 || (2.0 * k + ab - 2.0).abs() < 1e-8
    })
}

/// Σ_j C(n+a, n−j) C(n+b, j) ((x−1)/2)^j ((x+1)/2)^{n−j}, with generalized
/// binomial coefficients. Free of parameter-dependent denominators.
fn jacobi_explicit(n: u32, a: f64, b: f64, x: f64) -> f64 {
    let nf = f64::from(n);
    let lo = 0.5 * (x - 1.0);
    let hi = 0.5 * (x + 1.0);
    (0..=n)
        .map(|j| {
            binomial(nf + a, n - j)
                * binomial(nf + b, j)
                * lo.powi(j as i32)
                * hi.powi((n - j) as i32)
        })
        .sum()
}

fn binomial(z: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (z - f64::from(i)) / f64::from(i + 1))
}

/// `order`-th derivative in x:
/// d^k/dx^k P_n^{(a,b)} = (n+a+b+1)_k / 2^k · P_{n−k}^{(a+k, b+k)}.
pub fn jacobi_derivative(n: u32, a: f64, b: f64, x: f64, order: u32) -> f64 {
    if order > n {
        return 0.0;
    }
    let base = f64::from(n) + a + b + 1.0;
    let factor = (0..order).fold(1.0, |acc, i| acc * (base + f64::from(i)) * 0.5);
    let k = f64::from(order);
    factor * jacobi_value(n - order, a + k, b + k, x)
}

/// Polynomial weight s^{2ζ}(1+s)^{−2γ}[P_n(1+2s)]².
pub fn polynomial_weight(state: &State, s: f64) -> f64 {
    let (a, b) = state.jacobi_params();
    let p = jacobi_value(state.quantum.n, a, b, 1.0 + 2.0 * s);
    s.powf(a) * (1.0 + s).powf(b) * p * p
}

/// Unnormalized radial probability weight in s:
/// (arcsinh√s)² · s^{2ζ}(1+s)^{−2γ} · P_n² / (2α³).
///
/// This is r²R²dr/N² written in the s variable; 4πN² times its integral over
/// [0, 1] is one.
pub fn density_weight_s(state: &State, s: f64) -> f64 {
    let alpha = state.params.alpha;
    let arc = s.sqrt().asinh();
    arc * arc * polynomial_weight(state, s) / (2.0 * alpha * alpha * alpha)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavefunction {
    pub state: State,
    /// Normalization constant N (> 0).
    pub norm: f64,
}

impl Wavefunction {
    pub fn new(state: State, norm: f64) -> Result<Self> {
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "norm",
                value: norm,
            });
        }
        Ok(Self { state, norm })
    }

    fn exponents(&self) -> (f64, f64) {
        let d = &self.state.derived;
        (0.25 + d.zeta, 0.25 - d.gamma)
    }

    /// R/N as a function of s.
    pub fn shape_s(&self, s: f64) -> f64 {
        let (ea, eb) = self.exponents();
        let (a, b) = self.state.jacobi_params();
        s.powf(ea) * (1.0 + s).powf(eb) * jacobi_value(self.state.quantum.n, a, b, 1.0 + 2.0 * s)
    }

    pub fn value_at_r(&self, r: f64) -> f64 {
        let sh = (self.state.params.alpha * r).sinh();
        self.norm * self.shape_s(sh * sh)
    }

    /// d²R/dr² evaluated analytically through the chain rule in s.
    pub fn second_derivative_r(&self, r: f64) -> f64 {
        let sh = (self.state.params.alpha * r).sinh();
        let s = sh * sh;
        let (ea, eb) = self.exponents();
        let envelope = s.powf(ea) * (1.0 + s).powf(eb);
        self.norm * envelope * self.laplacian_factor(s).1
    }

    /// Returns `(P, Q)` with R = N·g·P and d²R/dr² = N·g·Q, where
    /// g = s^{1/4+ζ}(1+s)^{1/4−γ} and P is the Jacobi factor at 1 + 2s.
    pub fn laplacian_factor(&self, s: f64) -> (f64, f64) {
        let (ea, eb) = self.exponents();
        let (a, b) = self.state.jacobi_params();
        let n = self.state.quantum.n;
        let alpha2 = self.state.params.alpha * self.state.params.alpha;
        let x = 1.0 + 2.0 * s;

        let p = jacobi_value(n, a, b, x);
        let dp = jacobi_derivative(n, a, b, x, 1);
        let d2p = jacobi_derivative(n, a, b, x, 2);

        // g'/g and s(1+s)·g''/g in closed form.
        let log_d = ea / s + eb / (1.0 + s);
        let curv =
            ea * (ea - 1.0) * (1.0 + s) / s + 2.0 * ea * eb + eb * (eb - 1.0) * s / (1.0 + s);
        let s_log_d = ea * (1.0 + s) + eb * s;

        // R'' = 4α² s(1+s) f_ss + 2α²(1+2s) f_s, with d/ds = 2 d/dx on P.
        let q = 4.0 * alpha2 * (curv * p + 4.0 * s_log_d * dp + 4.0 * s * (1.0 + s) * d2p)
            + 2.0 * alpha2 * x * (log_d * p + 2.0 * dp);
        (p, q)
    }
}

/// N · s^{1/4+ζ}(1+s)^{1/4−γ} P_n^{(2ζ,−2γ)}(1+2s) at s = sinh²(αr).
pub fn radial_wavefunction(w: &Wavefunction, r: f64) -> f64 {
    w.value_at_r(r)
}
