//! Adiabatic-elimination solution in the strong-damping regime `ατ ≪ 1`:
//! a third, independent estimate of the output state, obtained in the time
//! domain by slaving the `a` amplitude to the instantaneous `bc` drive.
//!
//! The chain is: eliminate the memory kernel at rate `γ = 2πε²σ/v_bc`
//! (valid when the kernel width `σ/v_bc` is short), integrate the driven
//! `ξ_a` equation to the resolvent form with denominator
//! `γ + i(k_a v_ac − k v_bc)`, and in the limit `γ → ∞` drop the detuning
//! to get the purely algebraic strong-damping amplitude.  Feeding that back
//! into the `bc` equation gives the closed-form interaction-frame output
//! `[1 − 2 e^{−(k_b²+k_c²)σ²}] ξ_bc(k_b,k_c,0)`, which tends to the perfect
//! sign flip `−ξ_bc` as `σ/σ₀ → 0`.

use crate::error::{Error, Result};
use crate::model::{dimensionless_from_physical, h_tilde, initial_spectrum, PhysicalConfig};
use crate::numerics::integrate_1d_complex;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Elimination rate and the dimensionless indicators that control whether
/// the adiabatic picture applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticParams {
    /// Damping rate `γ = 2πε²σ/v_bc` of the intermediate `a` amplitude.
    pub gamma: f64,
    /// `ατ`; the elimination is controlled when this is small.
    pub alpha_tau: f64,
    /// `σ/σ₀`; the sign flip is exact only as this goes to zero.
    pub tau: f64,
}

impl AdiabaticParams {
    pub fn from_config(config: &PhysicalConfig) -> Result<Self> {
        let gamma = gamma_rate(config);
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "adiabatic elimination needs gamma > 0, got {gamma}"
            )));
        }
        let dimensionless = dimensionless_from_physical(config)?;
        Ok(Self {
            gamma,
            alpha_tau: dimensionless.alpha * dimensionless.tau,
            tau: dimensionless.tau,
        })
    }

    /// `ατ < 0.1`: the resolvent denominator is dominated by `γ`.
    pub fn strongly_damped(&self) -> bool {
        self.alpha_tau < 0.1
    }

    /// `τ < 0.2`: the response is narrow enough for the `−ξ₀` limit.
    pub fn narrow_response(&self) -> bool {
        self.tau < 0.2
    }

    pub fn in_validity_regime(&self) -> bool {
        self.strongly_damped() && self.narrow_response()
    }
}

/// Decay rate of the intermediate `a` photon, `γ = 2πε²σ/v_bc`.
pub fn gamma_rate(config: &PhysicalConfig) -> f64 {
    2.0 * PI * config.epsilon * config.epsilon * config.sigma() / config.velocities.v_bc()
}

/// Which closure of the eliminated equation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdiabaticMode {
    /// Resolvent form: k-integral with denominator `γ + i(k_a v_ac − k v_bc)`.
    Full,
    /// `γ → ∞` limit: algebraic prefactor `−i v_bc/(√(2π) ε σ)`.
    StrongDamping,
}

/// An adiabatic `ξ_a` estimate plus its applicability caveat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiAEstimate {
    pub value: Complex64,
    /// Set when [`AdiabaticMode::StrongDamping`] was requested but `γ` does
    /// not dominate the detuning range `|k_a v_ac − k v_bc|` on the support
    /// of the initial spectrum.
    pub validity_warning: bool,
}

/// Self-converging oscillatory quadrature: double the node count until two
/// successive Gauss–Legendre evaluations agree.
fn integrate_adaptive<F>(f: F, radius: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut n = 128usize;
    let mut prev = integrate_1d_complex(&f, -radius, radius, n);
    let mut diff = f64::INFINITY;
    while n < 16_384 {
        n *= 2;
        let next = integrate_1d_complex(&f, -radius, radius, n);
        diff = (next - prev).norm();
        if diff <= 1e-12 + 1e-10 * next.norm() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureAccuracy {
        best: prev,
        residual: diff,
    })
}

/// Intermediate-photon spectrum `ξ_a(k_a, t)` from the adiabatic
/// elimination, lab frame.
///
/// `Full` evaluates
/// `−iε√(2π) e^{−i k_a v_c t} ∫dk h̃(k) h̃(k_a−k) e^{−i k v_bc t}
///  ξ_bc(k, k_a−k, 0) / [γ + i(k_a v_ac − k v_bc)]`,
/// `StrongDamping` replaces the denominator by `γ`.  The transient
/// `∝ e^{−(i k_a v_a + γ)t}` is dropped unconditionally; the initial
/// separation `z₀` guaranteed by the configuration makes it negligible.
pub fn xi_a_adiabatic(
    k_a: f64,
    t: f64,
    config: &PhysicalConfig,
    mode: AdiabaticMode,
) -> Result<XiAEstimate> {
    if !config.response.is_gaussian() {
        return Err(Error::Domain(
            "adiabatic closed form needs the Gaussian response".into(),
        ));
    }
    if config.epsilon == 0.0 {
        // exact no-interaction limit: the ε prefactor wins over the γ → 0
        // resolvent, so the a field never grows
        return Ok(XiAEstimate {
            value: Complex64::new(0.0, 0.0),
            validity_warning: false,
        });
    }
    let params = AdiabaticParams::from_config(config)?;
    let gamma = params.gamma;
    let v = &config.velocities;
    let (v_ac, v_bc, v_c) = (v.v_ac(), v.v_bc(), v.v_c);
    let sigma = config.sigma();
    let radius = 8.0 * (1.0 / config.sigma0).max(1.0 / sigma) + k_a.abs();
    // γ must dominate the detuning wherever the initial spectrum lives
    let detuning_span = (k_a * v_ac).abs() + 6.0 / config.sigma0 * v_bc.abs();
    let validity_warning =
        mode == AdiabaticMode::StrongDamping && gamma < 10.0 * detuning_span;
    let integrand = |k: f64| -> Complex64 {
        let kernel = match (h_tilde(&config.response, k), h_tilde(&config.response, k_a - k)) {
            (Ok(a), Ok(b)) => a * b,
            _ => return Complex64::new(0.0, 0.0),
        };
        let drive = Complex64::from_polar(1.0, -k * v_bc * t)
            * initial_spectrum(config, k, k_a - k);
        let resolvent = match mode {
            AdiabaticMode::Full => {
                Complex64::new(gamma, k_a * v_ac - k * v_bc).inv()
            }
            AdiabaticMode::StrongDamping => Complex64::new(1.0 / gamma, 0.0),
        };
        kernel * drive * resolvent
    };
    let integral = integrate_adaptive(integrand, radius)?;
    let prefactor = Complex64::new(0.0, -1.0)
        * config.epsilon
        * (2.0 * PI).sqrt()
        * Complex64::from_polar(1.0, -k_a * v_c * t);
    Ok(XiAEstimate {
        value: prefactor * integral,
        validity_warning,
    })
}

/// Long-time interaction-frame output of the adiabatic chain:
/// `[1 − 2 e^{−(k_b²+k_c²)σ²}] ξ_bc(k_b, k_c, 0)`.
///
/// The exponent is negative: the back-substituted delta-function term is
/// `−(2π/σ)|h̃(k_b)|²|h̃(k_c)|² ξ₀ = −2e^{−(k_b²+k_c²)σ²} ξ₀`, and only the
/// decaying factor reproduces the `−ξ₀` limit as `σ → 0`.  (A positive
/// exponent grows without bound off the response band and violates the
/// unitarity bound `|factor| ≤ 1`; see the regression test below.)
pub fn final_bc_adiabatic(k_b: f64, k_c: f64, config: &PhysicalConfig) -> Complex64 {
    final_bc_factor(k_b, k_c, config.sigma()) * initial_spectrum(config, k_b, k_c)
}

/// The scalar mode-wise factor of [`final_bc_adiabatic`].
pub fn final_bc_factor(k_b: f64, k_c: f64, sigma: f64) -> f64 {
    1.0 - 2.0 * (-(k_b * k_b + k_c * k_c) * sigma * sigma).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::complex_fidelity_equal_ab;
    use crate::dynamics::{evolve, JointState, KGrid, Sector};
    use crate::model::{
        initial_spectrum, physical_from_dimensionless, DimensionlessParams, ResponseFunction,
        Scaling, Velocities,
    };
    use crate::numerics::{integrate_2d, QuadratureSpec};
    use approx::assert_relative_eq;

    fn canonical_equal_ab(alpha: f64, tau: f64) -> PhysicalConfig {
        physical_from_dimensionless(
            &DimensionlessParams::equal_ab(alpha, tau).unwrap(),
            Scaling::canonical(),
        )
        .unwrap()
    }

    #[test]
    fn gamma_rate_plug_in() {
        // ε² = 100, σ = 0.1, v_bc = 1 → γ = 20π
        let cfg = canonical_equal_ab(1.0, 0.1);
        assert_relative_eq!(gamma_rate(&cfg), 20.0 * PI, max_relative = 1e-12);
        // γ ∝ σ at fixed ε
        let mut wider = cfg.clone();
        wider.response = ResponseFunction::gaussian(0.3).unwrap();
        assert_relative_eq!(gamma_rate(&wider) / gamma_rate(&cfg), 3.0, max_relative = 1e-12);
    }

    #[test]
    fn validity_flags() {
        let p = AdiabaticParams::from_config(&canonical_equal_ab(0.5, 0.1)).unwrap();
        assert!(p.strongly_damped() && p.narrow_response() && p.in_validity_regime());
        let p = AdiabaticParams::from_config(&canonical_equal_ab(10.0, 0.1)).unwrap();
        assert!(!p.strongly_damped());
        let p = AdiabaticParams::from_config(&canonical_equal_ab(0.1, 0.5)).unwrap();
        assert!(!p.narrow_response());
    }

    #[test]
    fn xi_a_vanishes_before_overlap() {
        // b starts 20 envelope widths behind c: at t = 0 the drive phase
        // e^{ik z₀} is 20 standard deviations off-stationary
        let cfg = PhysicalConfig::new(
            ResponseFunction::gaussian(0.1).unwrap(),
            Velocities::equal_ab(),
            10.0,
            1.0,
            20.0,
            None,
        )
        .unwrap();
        for mode in [AdiabaticMode::Full, AdiabaticMode::StrongDamping] {
            let est = xi_a_adiabatic(0.5, 0.0, &cfg, mode).unwrap();
            assert!(
                est.value.norm() < 1e-10,
                "{mode:?}: |xi_a| = {} before overlap",
                est.value.norm()
            );
        }
    }

    #[test]
    fn strong_damping_matches_full_resolvent_deep_in_regime() {
        // ατ = 0.01 → γ = 200π dominates every detuning on the support
        let cfg = canonical_equal_ab(1.0, 0.01);
        let t = cfg.z0 / cfg.velocities.v_bc();
        let full = xi_a_adiabatic(0.7, t, &cfg, AdiabaticMode::Full).unwrap();
        let strong = xi_a_adiabatic(0.7, t, &cfg, AdiabaticMode::StrongDamping).unwrap();
        assert!(!strong.validity_warning);
        let rel = (full.value - strong.value).norm() / full.value.norm();
        assert!(rel < 0.05, "modes differ by {rel}");
    }

    #[test]
    fn strong_damping_error_shrinks_with_gamma() {
        // Fixed kernel, γ doubled twice by scaling ε: the relative gap to
        // the full resolvent must fall at least 0.6× per doubling.
        let k_a = 0.7;
        let mut errors = Vec::new();
        for eps2 in [200.0, 400.0, 800.0] {
            let cfg = PhysicalConfig::new(
                ResponseFunction::gaussian(0.05).unwrap(),
                Velocities::equal_ab(),
                f64::sqrt(eps2),
                1.0,
                8.4,
                None,
            )
            .unwrap();
            let t = cfg.z0 / cfg.velocities.v_bc();
            let full = xi_a_adiabatic(k_a, t, &cfg, AdiabaticMode::Full).unwrap();
            let strong = xi_a_adiabatic(k_a, t, &cfg, AdiabaticMode::StrongDamping).unwrap();
            errors.push((full.value - strong.value).norm() / full.value.norm());
        }
        assert!(errors[1] <= 0.6 * errors[0], "{errors:?}");
        assert!(errors[2] <= 0.6 * errors[1], "{errors:?}");
    }

    #[test]
    fn strong_damping_warns_when_gamma_is_weak() {
        let cfg = PhysicalConfig::new(
            ResponseFunction::gaussian(0.1).unwrap(),
            Velocities::equal_ab(),
            0.5, // γ = π/20: far below the detuning span
            1.0,
            8.8,
            None,
        )
        .unwrap();
        let est = xi_a_adiabatic(0.5, 4.0, &cfg, AdiabaticMode::StrongDamping).unwrap();
        assert!(est.validity_warning);
        let est = xi_a_adiabatic(0.5, 4.0, &cfg, AdiabaticMode::Full).unwrap();
        assert!(!est.validity_warning);
    }

    #[test]
    fn matches_direct_dynamics_deep_in_regime() {
        // Full-propagator oracle at ατ = 0.01: a single total-momentum
        // sector K = k_a of the direct integration, on a grid wide enough
        // to contain the whole response band, against the resolvent form.
        let cfg = canonical_equal_ab(0.2, 0.05); // ε² = 2000, γ = 200π
        let k_a = 0.7;
        let grid = KGrid::new(641, 80.0).unwrap();
        let n = grid.n;
        let dk = grid.dk();
        // place K exactly on a grid anti-diagonal: K = -2 k_max + s·dk
        let s = ((k_a + 2.0 * grid.k_max) / dk).round() as usize;
        let total_k = -2.0 * grid.k_max + s as f64 * dk;
        let i_min = s.saturating_sub(n - 1);
        let bc = (i_min..=s.min(n - 1))
            .map(|i| initial_spectrum(&cfg, grid.axis(i), total_k - grid.axis(i)) * dk)
            .collect();
        let state = JointState {
            grid,
            time: 0.0,
            sectors: vec![Sector {
                index: s,
                total_k,
                a: Complex64::new(0.0, 0.0),
                bc,
                i_min,
            }],
        };
        let t = cfg.z0 / cfg.velocities.v_bc(); // mid-collision
        let (out, _) = evolve(&state, &cfg, t, 0.01).unwrap();
        let numeric = out.sectors[0].a.norm() / dk.sqrt();
        let adiabatic = xi_a_adiabatic(total_k, t, &cfg, AdiabaticMode::Full)
            .unwrap()
            .value
            .norm();
        assert_relative_eq!(numeric, adiabatic, max_relative = 0.1);
        assert!(adiabatic > 1e-3, "test must probe a non-trivial amplitude");
    }

    #[test]
    fn final_bc_trivial_points() {
        let cfg = canonical_equal_ab(1.0, 0.1);
        // k = 0: factor 1 − 2 = −1 exactly
        let out = final_bc_adiabatic(0.0, 0.0, &cfg);
        let init = initial_spectrum(&cfg, 0.0, 0.0);
        assert_eq!(out, -init);
        // σ → 0 at fixed k: factor → −1 pointwise
        assert_relative_eq!(final_bc_factor(3.0, -2.0, 1e-9), -1.0, epsilon = 1e-12);
        // large k: factor → +1 (mode outside the response band untouched)
        assert_relative_eq!(final_bc_factor(60.0, 0.0, 0.5), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn final_bc_overlap_matches_frequency_domain_fidelity() {
        // ⟨ξ₀|output⟩ closes to 1 − 2σ₀²/(σ₀²+σ²) = (τ²−1)/(τ²+1)
        let tau = 0.05;
        let cfg = canonical_equal_ab(1.0, tau);
        let spec = QuadratureSpec::for_tau(tau);
        let overlap = integrate_2d(
            |kb, kc| {
                initial_spectrum(&cfg, kb, kc).conj() * final_bc_adiabatic(kb, kc, &cfg)
            },
            &spec,
        )
        .unwrap();
        assert!(overlap.im.abs() < 1e-8);
        assert_relative_eq!(
            overlap.re,
            (tau * tau - 1.0) / (tau * tau + 1.0),
            epsilon = 1e-8
        );
        let exact =
            complex_fidelity_equal_ab(&DimensionlessParams::equal_ab(1.0, tau).unwrap(), &spec)
                .unwrap();
        assert!(
            (overlap.re - exact.overlap.re).abs() < 0.05,
            "adiabatic overlap {} vs exact {}",
            overlap.re,
            exact.overlap.re
        );
    }

    #[test]
    fn positive_exponent_variant_is_unphysical() {
        // The factor multiplies each interaction-frame mode, so unitarity
        // demands |factor| ≤ 1.  The decaying-exponent form obeys the bound
        // everywhere; the growing-exponent misprint violates it on the
        // response band and diverges off it.
        let sigma = 0.1;
        let mut worst = 0.0f64;
        for i in 0..=60 {
            let k = -15.0 + 0.5 * i as f64;
            let correct = final_bc_factor(k, 0.0, sigma);
            assert!(correct.abs() <= 1.0, "correct factor {correct} at k = {k}");
            let misprint = 1.0 - 2.0 * (k * k * sigma * sigma).exp();
            worst = worst.max(misprint.abs());
        }
        assert!(worst > 10.0, "misprint stays bounded ({worst}): regression lost");
    }

    #[test]
    fn gamma_consistent_with_fitted_decay_when_markovian() {
        // A bare a(K=0) amplitude decays at the golden-rule rate 2γ when
        // γ·2σ/v_bc ≪ 1 (here 0.06, a ~5% pole correction).
        let cfg = canonical_equal_ab(210.0, 0.1); // ε² ≈ 0.476, γ ≈ 0.299
        let gamma = gamma_rate(&cfg);
        assert!(2.0 * gamma * cfg.sigma() / cfg.velocities.v_bc() < 0.07);
        let grid = KGrid::new(241, 30.0).unwrap();
        let n = grid.n;
        let state = JointState {
            grid,
            time: 0.0,
            sectors: vec![Sector {
                index: n - 1,
                total_k: 0.0,
                a: Complex64::new(1.0, 0.0),
                bc: vec![Complex64::new(0.0, 0.0); n],
                i_min: 0,
            }],
        };
        let (_, diag) = evolve(&state, &cfg, 12.0, 0.01).unwrap();
        let fitted = crate::dynamics::a_population_series(&diag).unwrap();
        assert_relative_eq!(fitted / 2.0, gamma, max_relative = 0.1);
    }
}
