//! Physical inputs, quantum numbers and the derived exponents of the
//! tanh² well
//!
//! ```text
//! V(r) = ħ²α²λ(λ+1)/(2μ) · tanh²(αr)
//! ```
//!
//! The derived quantities are
//!
//! ```text
//! Λ = α²ℓ(ℓ+1)    β = α²λ(λ+1)    γ = √(1/16 + β/4)    ζ = √(1/16 + Λ/4)
//! ```
//!
//! together with the centrifugal approximation constant `d0` that enters the
//! energy through the `4·d0·Λ` term.

use serde::Serialize;

use crate::error::{Error, Result};

/// Centrifugal approximation constant used when none is supplied.
pub const DEFAULT_D0: f64 = 1.0 / 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialParams {
    /// Depth parameter λ (dimensionless).
    pub lambda: f64,
    /// Range parameter α (inverse length).
    pub alpha: f64,
    pub hbar: f64,
    /// Particle mass μ.
    pub mu: f64,
}

impl PotentialParams {
    pub fn new(lambda: f64, alpha: f64, hbar: f64, mu: f64) -> Result<Self> {
        let p = Self {
            lambda,
            alpha,
            hbar,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    /// Units of the published tables: ħ = 2μ = 1.
    pub fn table_units(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, alpha, 1.0, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("hbar", self.hbar),
            ("mu", self.mu),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter { name, value });
            }
        }
        Ok(())
    }

    /// ħ²/(2μ), the energy scale of the kinetic term.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mu)
    }

    /// Height of the asymptote, ħ²α²λ(λ+1)/(2μ).
    pub fn well_height(&self) -> f64 {
        self.energy_scale() * self.alpha * self.alpha * self.lambda * (self.lambda + 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > l {
            return Err(Error::MagneticOutOfRange { m, l });
        }
        Ok(Self { n, l, m })
    }

    /// State with m = 0.
    pub fn nl(n: u32, l: u32) -> Self {
        Self { n, l, m: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Λ = α²ℓ(ℓ+1).
    pub centrifugal: f64,
    /// β = α²λ(λ+1).
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
    pub d0: f64,
}

pub fn derive_params(p: &PotentialParams, q: &QuantumNumbers, d0: f64) -> Result<DerivedParams> {
    p.validate()?;
    if !d0.is_finite() {
        return Err(Error::InvalidParameter {
            name: "d0",
            value: d0,
        });
    }
    let a2 = p.alpha * p.alpha;
    let l = f64::from(q.l);
    let centrifugal = a2 * l * (l + 1.0);
    let beta = a2 * p.lambda * (p.lambda + 1.0);
    Ok(DerivedParams {
        centrifugal,
        beta,
        gamma: (1.0 / 16.0 + beta / 4.0).sqrt(),
        zeta: (1.0 / 16.0 + centrifugal / 4.0).sqrt(),
        d0,
    })
}

pub fn potential_value(p: &PotentialParams, r: f64) -> f64 {
    let t = (p.alpha * r).tanh();
    p.well_height() * t * t
}

/// Largest integer strictly below λ, i.e. `⌈λ⌉ − 1`. Equals `⌊λ⌋` for
/// non-integral λ.
pub fn max_bound_state(p: &PotentialParams) -> u32 {
    (p.lambda.ceil() - 1.0).max(0.0) as u32
}

/// A fully specified bound state: inputs, labels and derived exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct State {
    pub params: PotentialParams,
    pub quantum: QuantumNumbers,
    pub derived: DerivedParams,
}

impl State {
    /// Fails with [`Error::NotBound`] when `n` exceeds [`max_bound_state`].
    pub fn new(params: PotentialParams, quantum: QuantumNumbers, d0: f64) -> Result<Self> {
        let quantum = QuantumNumbers::new(quantum.n, quantum.l, quantum.m)?;
        let derived = derive_params(&params, &quantum, d0)?;
        let max = max_bound_state(&params);
        if quantum.n > max {
            return Err(Error::NotBound {
                n: quantum.n,
                lambda: params.lambda,
                max,
            });
        }
        Ok(Self {
            params,
            quantum,
            derived,
        })
    }

    /// Table units (ħ = 2μ = 1), m = 0 and the default `d0`.
    pub fn table(lambda: f64, alpha: f64, n: u32, l: u32) -> Result<Self> {
        Self::new(
            PotentialParams::table_units(lambda, alpha)?,
            QuantumNumbers::nl(n, l),
            DEFAULT_D0,
        )
    }

    pub fn with_d0(mut self, d0: f64) -> Self {
        self.derived.d0 = d0;
        self
    }

    /// Jacobi parameters (2ζ, −2γ) of the polynomial factor.
    pub fn jacobi_params(&self) -> (f64, f64) {
        (2.0 * self.derived.zeta, -2.0 * self.derived.gamma)
    }

    /// Upper end of the radial domain, r = arcsinh(1)/α (s = 1).
    pub fn r_max(&self) -> f64 {
        1.0f64.asinh() / self.params.alpha
    }
}
