//! Domain types: medium response, velocities, pulse parameters, and the
//! nondimensionalization connecting raw parameters to the (α, τ) plane.
//!
//! Canonical units throughout the sweeps: `σ₀ = 1`, `v_bc = 1`.  In these
//! units (α, τ) and the velocity ratios are the only free knobs.

use crate::error::{Error, Result};
use crate::numerics;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Nonlocality kernel h̃(k) of the medium, normalized so ∫|h̃|²dk = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseFunction {
    /// h̃(k) = (σ/π)^{1/4} e^{-k²σ²/2}
    Gaussian { sigma: f64 },
    /// Sampled kernel; values are real and even in k (h real and symmetric).
    Tabulated {
        k_samples: Vec<f64>,
        h_tilde_values: Vec<f64>,
        sigma_effective: f64,
    },
}

impl ResponseFunction {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!(
                "nonlocality sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self::Gaussian { sigma })
    }

    /// Build a tabulated kernel.  Samples are sorted and symmetrized
    /// (values averaged between ±k) so h̃ stays real and even.
    pub fn tabulated(k_samples: &[f64], values: &[f64], sigma_effective: f64) -> Result<Self> {
        if k_samples.len() != values.len() || k_samples.len() < 4 {
            return Err(Error::Domain(
                "tabulated kernel needs at least 4 matching samples".into(),
            ));
        }
        if !(sigma_effective > 0.0) {
            return Err(Error::Domain("sigma_effective must be positive".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tabulated kernel values".into()));
        }
        let mut pairs: Vec<(f64, f64)> = k_samples
            .iter()
            .zip(values)
            .map(|(&k, &v)| (k.abs(), v))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // merge duplicate |k| entries by averaging (even-symmetry enforcement)
        let mut ks = Vec::with_capacity(pairs.len());
        let mut vs = Vec::with_capacity(pairs.len());
        for (k, v) in pairs {
            match ks.last() {
                Some(&last) if (k - last as f64).abs() < 1e-12 * (1.0 + k) => {
                    let n = vs.len();
                    vs[n - 1] = 0.5 * (vs[n - 1] + v);
                }
                _ => {
                    ks.push(k);
                    vs.push(v);
                }
            }
        }
        Ok(Self::Tabulated {
            k_samples: ks,
            h_tilde_values: vs,
            sigma_effective,
        })
    }

    /// Nonlocality length scale (exact for Gaussian, nominal for tabulated).
    pub fn sigma(&self) -> f64 {
        match self {
            Self::Gaussian { sigma } => *sigma,
            Self::Tabulated { sigma_effective, .. } => *sigma_effective,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Self::Gaussian { .. })
    }
}

/// h̃(k): Gaussian closed form, or cubic interpolation on |k| for the
/// tabulated variant.
pub fn h_tilde(response: &ResponseFunction, k: f64) -> Result<f64> {
    match response {
        ResponseFunction::Gaussian { sigma } => {
            Ok((sigma / PI).powf(0.25) * (-k * k * sigma * sigma / 2.0).exp())
        }
        ResponseFunction::Tabulated {
            k_samples,
            h_tilde_values,
            ..
        } => {
            let ka = k.abs();
            let n = k_samples.len();
            if ka > k_samples[n - 1] {
                return Err(Error::Domain(format!(
                    "k = {k} outside tabulated kernel range [-{0}, {0}]",
                    k_samples[n - 1]
                )));
            }
            // 4-point Lagrange cubic on the bracketing samples
            let j = match k_samples.binary_search_by(|x| x.total_cmp(&ka)) {
                Ok(j) => return Ok(h_tilde_values[j]),
                Err(j) => j,
            };
            let lo = j.saturating_sub(2).min(n - 4);
            let xs = &k_samples[lo..lo + 4];
            let ys = &h_tilde_values[lo..lo + 4];
            let mut acc = 0.0;
            for i in 0..4 {
                let mut l = ys[i];
                for m in 0..4 {
                    if m != i {
                        l *= (ka - xs[m]) / (xs[i] - xs[m]);
                    }
                }
                acc += l;
            }
            Ok(acc)
        }
    }
}

/// Group velocities of the three pulses.  Convention: the b photon starts
/// behind the c photon and must catch up, so `v_b > v_c` strictly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocities {
    pub v_a: f64,
    pub v_b: f64,
    pub v_c: f64,
}

impl Velocities {
    pub fn new(v_a: f64, v_b: f64, v_c: f64) -> Result<Self> {
        if ![v_a, v_b, v_c].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("velocities".into()));
        }
        if !(v_b > v_c) {
            return Err(Error::DegenerateVelocities(format!(
                "need v_b > v_c so the pulses pass through each other, got v_b = {v_b}, v_c = {v_c}"
            )));
        }
        Ok(Self { v_a, v_b, v_c })
    }

    /// v_a = v_b = 2, v_c = 1 in canonical units (the equal-speed special case).
    pub fn equal_ab() -> Self {
        Self { v_a: 2.0, v_b: 2.0, v_c: 1.0 }
    }

    /// v_b = 1.1 v_c, v_a = 2 v_b, scaled so v_bc = 1.
    pub fn fig2() -> Self {
        Self { v_a: 22.0, v_b: 11.0, v_c: 10.0 }
    }

    pub fn v_ab(&self) -> f64 {
        self.v_a - self.v_b
    }
    pub fn v_ac(&self) -> f64 {
        self.v_a - self.v_c
    }
    pub fn v_bc(&self) -> f64 {
        self.v_b - self.v_c
    }
}

/// Raw (dimensional) description of medium and pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    pub response: ResponseFunction,
    pub velocities: Velocities,
    /// Coupling strength ε ≥ 0 (1-D field normalization).
    pub epsilon: f64,
    /// Initial pulse width σ₀.
    pub sigma0: f64,
    /// Initial b–c separation z₀ (b starts at −z₀).
    pub z0: f64,
    /// Medium length L, if the feasibility heuristics are wanted.
    #[serde(default)]
    pub medium_length: Option<f64>,
}

impl PhysicalConfig {
    pub fn new(
        response: ResponseFunction,
        velocities: Velocities,
        epsilon: f64,
        sigma0: f64,
        z0: f64,
        medium_length: Option<f64>,
    ) -> Result<Self> {
        let cfg = Self {
            response,
            velocities,
            epsilon,
            sigma0,
            z0,
            medium_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Re-check invariants (useful after deserialization).
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::Domain(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        if !(self.sigma0 > 0.0) {
            return Err(Error::Domain(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        let sigma = self.response.sigma();
        if !(sigma > 0.0) {
            return Err(Error::Domain("nonlocality sigma must be positive".into()));
        }
        if self.z0 < 5.0 * (self.sigma0 + sigma) {
            return Err(Error::Domain(format!(
                "pulses must start disjoint: z0 = {} < 5 (sigma0 + sigma) = {}",
                self.z0,
                5.0 * (self.sigma0 + sigma)
            )));
        }
        Velocities::new(self.velocities.v_a, self.velocities.v_b, self.velocities.v_c)?;
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.response.sigma()
    }
}

/// The coordinates of the sweeps: α, τ, and the two velocity ratios that
/// survive nondimensionalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// α = v_ac·v_bc/(ε²σ²); reduces to v_bc²/(ε²σ²) when v_a = v_b.
    pub alpha: f64,
    /// τ = σ/σ₀.
    pub tau: f64,
    /// v_ab / v_ac.
    pub vel_ratio_ab_ac: f64,
    /// v_b / v_a.
    pub vel_ratio_b_a: f64,
}

impl DimensionlessParams {
    pub fn new(alpha: f64, tau: f64, vel_ratio_ab_ac: f64, vel_ratio_b_a: f64) -> Result<Self> {
        if !(alpha > 0.0) || !(tau > 0.0) {
            return Err(Error::Domain(format!(
                "alpha and tau must be positive, got alpha = {alpha}, tau = {tau}"
            )));
        }
        Ok(Self {
            alpha,
            tau,
            vel_ratio_ab_ac,
            vel_ratio_b_a,
        })
    }

    /// (α, τ) point in the v_a = v_b configuration.
    pub fn equal_ab(alpha: f64, tau: f64) -> Result<Self> {
        Self::new(alpha, tau, 0.0, 1.0)
    }

    /// (α, τ) point with the v_b = 1.1 v_c, v_a = 2 v_b velocity set.
    pub fn fig2(alpha: f64, tau: f64) -> Result<Self> {
        let v = Velocities::fig2();
        Self::new(alpha, tau, v.v_ab() / v.v_ac(), v.v_b / v.v_a)
    }
}

/// Unit convention used to rebuild a physical configuration from (α, τ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub sigma0: f64,
    pub v_bc: f64,
}

impl Scaling {
    /// σ₀ = 1, v_bc = 1.
    pub fn canonical() -> Self {
        Self { sigma0: 1.0, v_bc: 1.0 }
    }
}

/// Map raw parameters to (α, τ) and the velocity ratios.
pub fn dimensionless_from_physical(config: &PhysicalConfig) -> Result<DimensionlessParams> {
    let v = &config.velocities;
    if v.v_bc() == 0.0 {
        return Err(Error::DegenerateVelocities(
            "v_b = v_c nullifies the interaction (the pulses never pass through each other)"
                .into(),
        ));
    }
    let sigma = config.sigma();
    let e2 = config.epsilon * config.epsilon;
    if e2 == 0.0 {
        return Err(Error::Domain(
            "epsilon = 0 maps to alpha = infinity; handle the free case directly".into(),
        ));
    }
    DimensionlessParams::new(
        v.v_ac() * v.v_bc() / (e2 * sigma * sigma),
        sigma / config.sigma0,
        v.v_ab() / v.v_ac(),
        v.v_b / v.v_a,
    )
}

/// Inverse map under a unit convention; round-trips with
/// [`dimensionless_from_physical`].
pub fn physical_from_dimensionless(
    params: &DimensionlessParams,
    scaling: Scaling,
) -> Result<PhysicalConfig> {
    let r1 = params.vel_ratio_ab_ac;
    let r2 = params.vel_ratio_b_a;
    let vbc = scaling.v_bc;
    let velocities = if r1.abs() < 1e-14 {
        // v_a = v_b; absolute offset is immaterial, fix v_c = v_bc
        Velocities::new(2.0 * vbc, 2.0 * vbc, vbc)?
    } else {
        if (1.0 - r2).abs() < 1e-14 || (1.0 - r1).abs() < 1e-14 {
            return Err(Error::Domain(format!(
                "inconsistent velocity ratios: v_ab/v_ac = {r1} with v_b/v_a = {r2}"
            )));
        }
        let v_a = r1 * vbc / ((1.0 - r2) * (1.0 - r1));
        let v_b = r2 * v_a;
        let v_c = v_b - vbc;
        let v = Velocities::new(v_a, v_b, v_c)?;
        // cross-check the requested ratios are actually achievable
        if (v.v_ab() / v.v_ac() - r1).abs() > 1e-10 * (1.0 + r1.abs()) {
            return Err(Error::Domain(format!(
                "inconsistent velocity ratio set ({r1}, {r2})"
            )));
        }
        v
    };
    let sigma = params.tau * scaling.sigma0;
    let epsilon = (velocities.v_ac() * velocities.v_bc() / (params.alpha * sigma * sigma)).sqrt();
    let z0 = 8.0 * (scaling.sigma0 + sigma); // initial overlap < 1e-13
    PhysicalConfig::new(
        ResponseFunction::Gaussian { sigma },
        velocities,
        epsilon,
        scaling.sigma0,
        z0,
        None,
    )
}

/// ξ_bc(k_b, k_c, 0): factorizable Gaussian pair, b centered at −z₀.
pub fn initial_spectrum(config: &PhysicalConfig, k_b: f64, k_c: f64) -> Complex64 {
    let s0 = config.sigma0;
    let env = (s0 / PI.sqrt()) * (-(k_b * k_b + k_c * k_c) * s0 * s0 / 2.0).exp();
    Complex64::from_polar(env, k_b * config.z0)
}

/// Two-photon joint spectral amplitude: analytic Gaussian product form or
/// a discretized grid.
#[derive(Debug, Clone, PartialEq)]
pub enum JointSpectrum {
    /// The factorizable Gaussian initial state of a [`PhysicalConfig`].
    Gaussian { sigma0: f64, z0: f64 },
    /// Row-major samples on a uniform (k_b, k_c) grid.
    Grid {
        k_axis: Vec<f64>,
        values: Vec<Complex64>,
    },
}

impl JointSpectrum {
    pub fn from_config(config: &PhysicalConfig) -> Self {
        Self::Gaussian {
            sigma0: config.sigma0,
            z0: config.z0,
        }
    }

    pub fn amplitude(&self, k_b: f64, k_c: f64) -> Complex64 {
        match self {
            Self::Gaussian { sigma0, z0 } => {
                let env =
                    (sigma0 / PI.sqrt()) * (-(k_b * k_b + k_c * k_c) * sigma0 * sigma0 / 2.0).exp();
                Complex64::from_polar(env, k_b * z0)
            }
            Self::Grid { k_axis, values } => {
                // nearest-node lookup; the grid variant exists for states
                // that only ever live on the dynamics grid
                let idx = |k: f64| -> usize {
                    let n = k_axis.len();
                    let dk = k_axis[1] - k_axis[0];
                    (((k - k_axis[0]) / dk).round().max(0.0) as usize).min(n - 1)
                };
                values[idx(k_b) * k_axis.len() + idx(k_c)]
            }
        }
    }

    /// L² norm over the plane, by quadrature (Gaussian) or discrete sum (grid).
    pub fn norm(&self) -> Result<f64> {
        match self {
            Self::Gaussian { sigma0, .. } => {
                let r = 8.0 / sigma0;
                let spec = numerics::QuadratureSpec::new(r, 32, 1e-11)?;
                let v = numerics::integrate_2d(
                    |kb, kc| {
                        let a = self.amplitude(kb, kc);
                        Complex64::new(a.norm_sqr(), 0.0)
                    },
                    &spec,
                )?;
                Ok(v.re)
            }
            Self::Grid { k_axis, values } => {
                let dk = k_axis[1] - k_axis[0];
                Ok(values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dk * dk)
            }
        }
    }
}
