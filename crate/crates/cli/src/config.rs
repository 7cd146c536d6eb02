//! JSON run configuration and its fully-resolved, hashable form.
//!
//! The file schema mirrors the library types: `alpha_values`/`tau_values`
//! and velocity ratios resolve into [`DimensionlessParams`] points, `grid`
//! mirrors [`KGrid`], `quadrature` mirrors [`QuadratureSpec`].  Unknown
//! keys are rejected so a typo cannot silently fall back to a default.

use anyhow::{bail, Context, Result};
use phasegate::dynamics::KGrid;
use phasegate::model::{DimensionlessParams, Velocities};
use phasegate::numerics::QuadratureSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// Velocity selection: a named preset or explicit dimensionless ratios.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum VelocitySpec {
    Preset(String),
    Ratios {
        vel_ratio_ab_ac: f64,
        vel_ratio_b_a: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub k_max: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadSpec {
    pub truncation_radius: f64,
    pub nodes_per_axis: usize,
    pub target_rel_tol: f64,
}

/// The on-disk JSON schema.  Every field is optional; missing fields fall
/// back to the preset (if any) and then to the built-in defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tau_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities: Option<VelocitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_cap: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&raw)
            .with_context(|| format!("parsing config {}", path.display()))
    }
}

/// The figure presets pin 16x16 log-spaced grids over alpha in [0.1, 100]
/// and tau in [0.01, 1].
pub fn preset_alpha_values() -> Vec<f64> {
    (0..16).map(|i| 0.1 * 10f64.powf(3.0 * i as f64 / 15.0)).collect()
}

pub fn preset_tau_values() -> Vec<f64> {
    (0..16).map(|j| 0.01 * 10f64.powf(2.0 * j as f64 / 15.0)).collect()
}

/// Everything a run needs, after merging preset, file, and defaults.
/// Serialized verbatim into the CSV header comment and hashed, so a result
/// file always carries the exact configuration that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub preset: String,
    pub method: String,
    pub alpha_values: Vec<f64>,
    pub tau_values: Vec<f64>,
    pub vel_ratio_ab_ac: f64,
    pub vel_ratio_b_a: f64,
    pub grid: GridSpec,
    /// `None` selects the per-tau adaptive default.
    pub quadrature: Option<QuadSpec>,
    pub dt_max: f64,
    pub t_cap: Option<f64>,
}

impl ResolvedConfig {
    pub fn resolve(
        preset: Option<&str>,
        file: Option<&FileConfig>,
        method: &str,
    ) -> Result<Self> {
        let (preset_name, preset_ratios) = match preset {
            None => ("custom", None),
            Some("fig1") => ("fig1", Some((0.0, 1.0))),
            Some("fig2") => {
                let v = Velocities::fig2();
                ("fig2", Some((v.v_ab() / v.v_ac(), v.v_b / v.v_a)))
            }
            Some(other) => bail!("unknown preset {other:?} (expected fig1 or fig2)"),
        };

        let empty = FileConfig::default();
        let file = file.unwrap_or(&empty);

        let alpha_values = if file.alpha_values.is_empty() {
            if preset.is_none() {
                bail!("no alpha_values: pass --preset or a config file with alpha_values");
            }
            preset_alpha_values()
        } else {
            file.alpha_values.clone()
        };
        let tau_values = if file.tau_values.is_empty() {
            if preset.is_none() {
                bail!("no tau_values: pass --preset or a config file with tau_values");
            }
            preset_tau_values()
        } else {
            file.tau_values.clone()
        };
        if !alpha_values.iter().chain(&tau_values).all(|v| *v > 0.0) {
            bail!("alpha_values and tau_values must all be positive");
        }

        let (vel_ratio_ab_ac, vel_ratio_b_a) = match (&file.velocities, preset_ratios) {
            (Some(VelocitySpec::Preset(name)), _) => match name.as_str() {
                "equal_ab" => (0.0, 1.0),
                "fig2" => {
                    let v = Velocities::fig2();
                    (v.v_ab() / v.v_ac(), v.v_b / v.v_a)
                }
                other => bail!("unknown velocity preset {other:?}"),
            },
            (
                Some(VelocitySpec::Ratios {
                    vel_ratio_ab_ac,
                    vel_ratio_b_a,
                }),
                _,
            ) => (*vel_ratio_ab_ac, *vel_ratio_b_a),
            (None, Some(ratios)) => ratios,
            (None, None) => (0.0, 1.0),
        };

        let grid = file.grid.unwrap_or(GridSpec { n: 129, k_max: 8.0 });
        KGrid::new(grid.n, grid.k_max).map_err(|e| anyhow::anyhow!("{e}"))?;
        if let Some(q) = &file.quadrature {
            QuadratureSpec::new(q.truncation_radius, q.nodes_per_axis, q.target_rel_tol)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
        }

        Ok(Self {
            preset: preset_name.to_string(),
            method: method.to_string(),
            alpha_values,
            tau_values,
            vel_ratio_ab_ac,
            vel_ratio_b_a,
            grid,
            quadrature: file.quadrature,
            dt_max: file.dt_max.unwrap_or(0.01),
            t_cap: file.t_cap,
        })
    }

    pub fn params_at(&self, alpha: f64, tau: f64) -> Result<DimensionlessParams> {
        DimensionlessParams::new(alpha, tau, self.vel_ratio_ab_ac, self.vel_ratio_b_a)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn kgrid(&self) -> KGrid {
        KGrid::new(self.grid.n, self.grid.k_max).expect("validated at resolve time")
    }

    pub fn quadrature_for(&self, tau: f64) -> QuadratureSpec {
        match &self.quadrature {
            Some(q) => QuadratureSpec::new(q.truncation_radius, q.nodes_per_axis, q.target_rel_tol)
                .expect("validated at resolve time"),
            None => QuadratureSpec::for_tau(tau),
        }
    }

    /// Canonical JSON form (serde field order is fixed, so this is
    /// byte-stable for a given config) and its SHA-256 hash.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn hash_bytes(&self) -> [u8; 32] {
        Sha256::digest(self.canonical_json().as_bytes()).into()
    }
}
