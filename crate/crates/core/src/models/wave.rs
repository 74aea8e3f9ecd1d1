//! Wave field on the square (0,π)² with constant speed c, excited by an
//! impulsive modal source and sampled on the bottom edge.
//!
//! With a source f(x,t) = δ(t) Σ g_m φ_m(x) over the Neumann eigenfunctions
//! φ_m(x) = γ_{m₁m₂} cos(m₁x₁)cos(m₂x₂), λ_m = m₁² + m₂², the solution
//! restricted to the edge x₂ = 0 is
//!
//! ```text
//! u(x₁, 0, t) = Σ_m u_m(t, c) γ_{m₁m₂} cos(m₁x₁)
//! u_m(t, c)   = c g_m sin(c√λ_m t)/√λ_m     (λ_m > 0)
//!             = c² g_m t                     (λ_m = 0, the limit)
//! ```
//!
//! Observations of u at fixed time alias speeds: mode (0, 2j) driven at c = 1
//! is indistinguishable from mode (0, j) at c = 2, which is what makes the
//! speed non-identifiable from this data.

use super::{ForwardModel, ModelError};
use std::f64::consts::{PI, SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceMode {
    pub m1: u32,
    pub m2: u32,
    pub amplitude: f64,
}

/// Finite modal expansion of the impulsive source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub modes: Vec<SourceMode>,
}

impl SourceSpec {
    pub fn new(modes: Vec<SourceMode>) -> Self {
        assert!(modes.iter().all(|m| m.amplitude.is_finite()), "source amplitudes must be finite");
        SourceSpec { modes }
    }

    /// Two-mode source tuned so the edge field at t = 1 is identical for
    /// c = 1 and c = 2: mode (0,1) with g₁ = sin2/2 − sin4 and mode (0,2)
    /// with g₂ = 2sin2 − sin1 satisfy g₁sin1 + g₂sin2/2 = 2g₁sin2 + g₂sin4.
    pub fn aliasing_preset() -> Self {
        let g1 = (2.0f64).sin() / 2.0 - (4.0f64).sin();
        let g2 = 2.0 * (2.0f64).sin() - (1.0f64).sin();
        SourceSpec::new(vec![
            SourceMode { m1: 0, m2: 1, amplitude: g1 },
            SourceMode { m1: 0, m2: 2, amplitude: g2 },
        ])
    }

    pub fn max_mode_index(&self) -> u32 {
        self.modes.iter().map(|m| m.m1.max(m.m2)).max().unwrap_or(0)
    }
}

impl Default for SourceSpec {
    /// Single impulse on mode (0, 2) with unit amplitude.
    fn default() -> Self {
        SourceSpec::new(vec![SourceMode { m1: 0, m2: 2, amplitude: 1.0 }])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveMediumModel {
    /// x₁ sensor coordinates on the edge x₂ = 0, each strictly inside (0, π).
    pub sensor_positions: Vec<f64>,
    pub observation_time: f64,
    /// Modes with m₁ or m₂ above this are dropped from the series.
    pub truncation: u32,
    pub source: SourceSpec,
}

impl WaveMediumModel {
    pub const DEFAULT_TRUNCATION: u32 = 16;

    pub fn new(
        sensor_positions: Vec<f64>,
        observation_time: f64,
        truncation: u32,
        source: SourceSpec,
    ) -> Self {
        assert!(!sensor_positions.is_empty(), "need at least one sensor");
        assert!(
            sensor_positions.iter().all(|&x| 0.0 < x && x < PI),
            "sensor positions must lie strictly inside (0, pi)"
        );
        assert!(
            observation_time > 0.0 && observation_time.is_finite(),
            "observation time must be positive"
        );
        assert!(truncation >= 1, "truncation must be at least 1");
        WaveMediumModel { sensor_positions, observation_time, truncation, source }
    }

    /// Ten sensors at x₁ = (i+1)/10 − 1/20 for i = 1..10, observed at t = 1.
    pub fn default_sensors() -> Vec<f64> {
        (1..=10).map(|i| (i as f64 + 1.0) / 10.0 - 0.05).collect()
    }
}

impl Default for WaveMediumModel {
    fn default() -> Self {
        WaveMediumModel::new(
            WaveMediumModel::default_sensors(),
            1.0,
            WaveMediumModel::DEFAULT_TRUNCATION,
            SourceSpec::default(),
        )
    }
}

fn gamma_coeff(m1: u32, m2: u32) -> f64 {
    match (m1 == 0, m2 == 0) {
        (true, true) => 1.0 / PI,
        (false, false) => 2.0 / PI,
        _ => SQRT_2 / PI,
    }
}

/// Edge field at every sensor for wave speed `c`.
pub fn wave_field(model: &WaveMediumModel, c: f64) -> Vec<f64> {
    let t = model.observation_time;
    model
        .sensor_positions
        .iter()
        .map(|&x1| {
            let mut u = 0.0;
            for mode in &model.source.modes {
                if mode.m1 > model.truncation || mode.m2 > model.truncation {
                    continue;
                }
                let lambda =
                    (mode.m1 as f64) * (mode.m1 as f64) + (mode.m2 as f64) * (mode.m2 as f64);
                let um = if lambda > 0.0 {
                    let sqrt_l = lambda.sqrt();
                    c * mode.amplitude * (c * sqrt_l * t).sin() / sqrt_l
                } else {
                    c * c * mode.amplitude * t
                };
                u += um * gamma_coeff(mode.m1, mode.m2) * ((mode.m1 as f64) * x1).cos();
            }
            u
        })
        .collect()
}

impl ForwardModel for WaveMediumModel {
    fn parameter_dim(&self) -> usize {
        1
    }

    fn observable_len(&self) -> usize {
        self.sensor_positions.len()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        if !x[0].is_finite() {
            return Err(ModelError::Domain(format!("wave speed must be finite, got {}", x[0])));
        }
        Ok(wave_field(self, x[0]))
    }

    fn name(&self) -> &'static str {
        "wave-medium"
    }
}
