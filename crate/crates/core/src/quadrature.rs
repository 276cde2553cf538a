//! Globally adaptive Gauss-Legendre quadrature on finite intervals.
//!
//! Every panel is integrated twice, once with the full rule and once as two
//! half panels; the difference is the panel's error estimate and the half-panel
//! sum is its value. The panel with the largest estimate is bisected until the
//! total estimate meets `rel_tol·|value| + abs_tol`. Nodes are interior, so an
//! integrand is never sampled at an endpoint.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussLegendreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendreRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Plain rule on [a, b], no error estimate.
    pub fn apply<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// Nodes and weights on [−1, 1] by Newton iteration on P_order.
pub fn gauss_legendre_rule(order: usize) -> Result<GaussLegendreRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            deriv = dp;
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        if dp.is_finite() {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    Ok(GaussLegendreRule { nodes, weights })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadratureConfig {
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            order: 32,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_panels: 2000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Integrator {
    rule: GaussLegendreRule,
    config: QuadratureConfig,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

impl Integrator {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        if !(config.rel_tol >= 0.0 && config.abs_tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: config.rel_tol.min(config.abs_tol),
            });
        }
        Ok(Self {
            rule: gauss_legendre_rule(config.order)?,
            config,
        })
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.config
    }

    fn panel<F: FnMut(f64) -> f64>(
        &self,
        f: &mut F,
        a: f64,
        b: f64,
        evals: &mut usize,
    ) -> Result<Panel> {
        let mut bad = None;
        let mut g = |x: f64| {
            let y = f(x);
            if !y.is_finite() && bad.is_none() {
                bad = Some(x);
            }
            y
        };
        let m = 0.5 * (a + b);
        let coarse = self.rule.apply(&mut g, a, b);
        let fine = self.rule.apply(&mut g, a, m) + self.rule.apply(&mut g, m, b);
        *evals += 3 * self.rule.order();
        if let Some(x) = bad {
            return Err(Error::NonFiniteIntegrand { x });
        }
        Ok(Panel {
            a,
            b,
            value: fine,
            error: (fine - coarse).abs(),
        })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Result<QuadratureResult> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        let mut evaluations = 0;
        let mut heap = BinaryHeap::new();
        heap.push(self.panel(&mut f, a, b, &mut evaluations)?);
        loop {
            let (value, error) = totals(&heap);
            if error <= self.config.rel_tol * value.abs() + self.config.abs_tol {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: error,
                    evaluations,
                });
            }
            if heap.len() >= self.config.max_panels {
                return Err(Error::NoConvergence {
                    panels: heap.len(),
                    value,
                    error,
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let m = 0.5 * (worst.a + worst.b);
            if !(worst.a < m && m < worst.b) {
                // Panel width hit machine resolution.
                return Err(Error::NoConvergence {
                    panels: heap.len() + 1,
                    value,
                    error,
                });
            }
            heap.push(self.panel(&mut f, worst.a, m, &mut evaluations)?);
            heap.push(self.panel(&mut f, m, worst.b, &mut evaluations)?);
        }
    }
}

// Summed in order of left endpoint so the result does not depend on the
// refinement history.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// One-shot integration with default order and panel budget.
pub fn integrate<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    Integrator::new(QuadratureConfig {
        rel_tol,
        ..QuadratureConfig::default()
    })?
    .integrate(f, a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_rules() {
        let r1 = gauss_legendre_rule(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_legendre_rule(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r2.nodes[0] + x).abs() < 1e-15 && (r2.nodes[1] - x).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-14 && (r2.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rule_shape() {
        for order in [3, 7, 32, 64, 127, 512] {
            let r = gauss_legendre_rule(order).unwrap();
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "order {order}: {sum}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for i in 0..order {
                assert_eq!(r.nodes[i], -r.nodes[order - 1 - i]);
            }
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
        assert!(matches!(
            gauss_legendre_rule(0),
            Err(Error::UnsupportedOrder(0))
        ));
        assert!(matches!(
            gauss_legendre_rule(513),
            Err(Error::UnsupportedOrder(513))
        ));
    }

    #[test]
    fn monomial_exactness() {
        for order in [1usize, 2, 5, 16, 32] {
            let r = gauss_legendre_rule(order).unwrap();
            for deg in 0..(2 * order) as i32 {
                let got = r.apply(|x| x.powi(deg), 0.0, 1.0);
                let want = 1.0 / f64::from(deg + 1);
                assert!(
                    ((got - want) / want).abs() < 1e-12,
                    "order {order} deg {deg}"
                );
            }
        }
    }

    #[test]
    fn basic_integrals() {
        let one = integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert!((one.value - 1.0).abs() < 1e-15);
        assert!(one.evaluations >= 1);
        let root = integrate(f64::sqrt, 0.0, 1.0, 1e-12).unwrap();
        assert!((root.value - 2.0 / 3.0).abs() < 1e-12);
        assert!(root.error_estimate <= 1e-12 * root.value + 1e-14);
    }

    #[test]
    fn arcsinh_square_class() {
        // Reference 0.2093893097815 from a 10⁶-interval composite Simpson sum.
        let n = 1_000_000;
        let h = 1.0 / n as f64;
        let f = |s: f64| s.sqrt().asinh().powi(2) / 2.0;
        let mut simpson = f(0.0) + f(1.0);
        for i in 1..n {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        simpson *= h / 3.0;
        let q = integrate(f, 0.0, 1.0, 1e-12).unwrap();
        assert!(((q.value - simpson) / simpson).abs() < 1e-10);
        assert!((q.value - 0.2093893097815).abs() < 1e-12);
    }

    #[test]
    fn errors_reported() {
        assert!(matches!(
            integrate(|x| x, 1.0, 0.0, 1e-10),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-10),
            Err(Error::NonFiniteIntegrand { .. }) | Err(Error::NoConvergence { .. })
        ));
        let tight = Integrator::new(QuadratureConfig {
            order: 2,
            rel_tol: 1e-15,
            abs_tol: 0.0,
            max_panels: 4,
        })
        .unwrap();
        assert!(matches!(
            tight.integrate(|x| x.sin() * 40.0f64.mul_add(x, 1.0).cos(), 0.0, 1.0),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn additivity() {
        let f = |s: f64| s.powf(0.5) * (1.0 + s).powf(-3.0) * s.sqrt().asinh().powi(2);
        let whole = integrate(f, 0.0, 1.0, 1e-12).unwrap();
        for c in [0.25, 0.5, 0.9] {
            let left = integrate(f, 0.0, c, 1e-12).unwrap();
            let right = integrate(f, c, 1.0, 1e-12).unwrap();
            let tol = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-15;
            assert!((left.value + right.value - whole.value).abs() <= tol);
        }
    }

    #[test]
    fn refinement_never_worsens() {
        type Case = (fn(f64) -> f64, f64);
        let cases: [Case; 3] = [
            (f64::sqrt, 2.0 / 3.0),
            (|x: f64| x.powf(1.5), 0.4),
            (|x: f64| (3.0 * x).exp(), ((3.0f64).exp() - 1.0) / 3.0),
        ];
        for (f, exact) in cases {
            let mut prev = f64::INFINITY;
            for k in 2..12 {
                let tol = 10f64.powi(-k);
                let err = (integrate(f, 0.0, 1.0, tol).unwrap().value - exact).abs();
                assert!(err <= prev.max(1e-15), "tol {tol}: {err} > {prev}");
                prev = err;
            }
        }
    }

    #[test]
    fn deterministic() {
        let f = |s: f64| s.powf(0.5) / (1.0 + s).powf(7.0);
        let a = integrate(f, 0.0, 1.0, 1e-11).unwrap();
        let b = integrate(f, 0.0, 1.0, 1e-11).unwrap();
        assert_eq!(a, b);
    }
}
