//! The p-bit update rule and per-device variability.
//!
//! A device `i` carries an intensity `λᵢ`, an offset `δᵢ` and a timing
//! deviation `νᵢ`. The timing deviation is discretised into an integer update
//! period measured in sub-steps: `periodᵢ = max(1, round(t_res·(1 + νᵢ)))`.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{Purpose, TrialKey};

pub const DEFAULT_T_RES: u32 = 10;

/// Spreads of the three variability parameters plus the sub-step resolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariabilityConfig {
    pub sigma_lambda: f64,
    pub sigma_delta: f64,
    pub sigma_nu: f64,
    pub t_res: u32,
}

impl Default for VariabilityConfig {
    fn default() -> Self {
        Self {
            sigma_lambda: 0.0,
            sigma_delta: 0.0,
            sigma_nu: 0.0,
            t_res: DEFAULT_T_RES,
        }
    }
}

impl VariabilityConfig {
    pub fn new(sigma_lambda: f64, sigma_delta: f64, sigma_nu: f64, t_res: u32) -> Result<Self> {
        let cfg = Self {
            sigma_lambda,
            sigma_delta,
            sigma_nu,
            t_res,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_lambda", self.sigma_lambda),
            ("sigma_delta", self.sigma_delta),
            ("sigma_nu", self.sigma_nu),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.t_res == 0 {
            return Err(Error::invalid("t_res must be >= 1"));
        }
        Ok(())
    }
}

/// One realisation of device parameters for `n` p-bits.
#[derive(Clone, Debug, PartialEq)]
pub struct VariabilityProfile {
    pub lambda: Vec<f64>,
    pub delta: Vec<f64>,
    pub period: Vec<u32>,
}

impl VariabilityProfile {
    /// Variability-free devices: `λ ≡ 1`, `δ ≡ 0`, `period ≡ t_res`.
    pub fn ideal(n: usize, t_res: u32) -> Self {
        Self {
            lambda: vec![1.0; n],
            delta: vec![0.0; n],
            period: vec![t_res.max(1); n],
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.lambda.len() != n || self.delta.len() != n || self.period.len() != n {
            return Err(Error::invalid(format!(
                "variability profile sized ({}, {}, {}) for {n} p-bits",
                self.lambda.len(),
                self.delta.len(),
                self.period.len()
            )));
        }
        if self.period.contains(&0) {
            return Err(Error::invalid("update periods must be >= 1"));
        }
        Ok(())
    }
}

/// `max(1, round(t_res·(1 + ν)))`, saturating at `u32::MAX`.
pub fn period_from_timing(t_res: u32, nu: f64) -> u32 {
    let p = (f64::from(t_res) * (1.0 + nu)).round();
    if p.is_nan() || p < 1.0 {
        1
    } else if p >= f64::from(u32::MAX) {
        u32::MAX
    } else {
        p as u32
    }
}

/// Draws `λᵢ ~ N(1, σ_λ²)`, `δᵢ ~ N(0, σ_δ²)`, `νᵢ ~ N(0, σ_ν²)` for each p-bit.
///
/// Each value comes from its own `(purpose, p-bit)` stream under `key`, so the
/// profile depends only on the key, never on call order. Negative `λ` draws
/// are kept as-is.
pub fn sample_variability(config: &VariabilityConfig, n: usize, key: TrialKey) -> Result<VariabilityProfile> {
    config.validate()?;
    if n == 0 {
        return Err(Error::invalid("cannot sample variability for zero p-bits"));
    }
    let normal = |mean: f64, sd: f64| Normal::new(mean, sd).map_err(|e| Error::invalid(e.to_string()));
    let intensity = normal(1.0, config.sigma_lambda)?;
    let offset = normal(0.0, config.sigma_delta)?;
    let timing = normal(0.0, config.sigma_nu)?;

    let lambda = (0..n)
        .map(|i| intensity.sample(&mut key.stream(Purpose::Intensity, i, 0)))
        .collect();
    let delta = (0..n)
        .map(|i| offset.sample(&mut key.stream(Purpose::Offset, i, 0)))
        .collect();
    let period = (0..n)
        .map(|i| {
            let nu = timing.sample(&mut key.stream(Purpose::Timing, i, 0));
            period_from_timing(config.t_res, nu)
        })
        .collect();
    Ok(VariabilityProfile { lambda, delta, period })
}

/// `sgn(r + tanh(λ·(input + δ)))` with `sgn(0) = +1`.
#[inline]
pub fn pbit_update(input: f64, r: f64, lambda: f64, delta: f64) -> i8 {
    if r + (lambda * (input + delta)).tanh() >= 0.0 {
        1
    } else {
        -1
    }
}
