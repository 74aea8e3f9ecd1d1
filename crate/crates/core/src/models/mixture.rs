//! Synthetic 1-D Gaussian-mixture target for exercising the sampler and the
//! local estimators without any physics.
//!
//! The "forward value" is F(x) = ln B − ln Σᵢ wᵢ φ(x; μᵢ, sᵢ²) with
//! B = Σᵢ wᵢ/(sᵢ√(2π)) an upper bound of the mixture density, so F ≥ 0.
//! Pair it with datum y = 0, residual exponent 1 and σ² = 1/2 and the
//! induced posterior exp(−|y − F(x)|) = exp(−F(x)) is exactly the mixture
//! density restricted to the prior box, up to normalization. Mode locations
//! and conditional means of the target are then known in closed form.

use super::{ForwardModel, ModelError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixtureModel {
    pub components: Vec<MixtureComponent>,
}

impl GaussianMixtureModel {
    pub fn new(components: Vec<MixtureComponent>) -> Self {
        assert!(!components.is_empty(), "mixture needs at least one component");
        for c in &components {
            assert!(c.weight > 0.0 && c.weight.is_finite(), "weights must be positive");
            assert!(c.sd > 0.0 && c.sd.is_finite(), "standard deviations must be positive");
            assert!(c.mean.is_finite(), "means must be finite");
        }
        GaussianMixtureModel { components }
    }

    /// Mixture density Σᵢ wᵢ φ(x; μᵢ, sᵢ²) (weights need not sum to one).
    pub fn density(&self, x: f64) -> f64 {
        self.log_density(x).exp()
    }

    fn log_density(&self, x: f64) -> f64 {
        log_sum_exp(self.components.iter().map(|c| {
            let z = (x - c.mean) / c.sd;
            c.weight.ln() - (c.sd * (std::f64::consts::TAU).sqrt()).ln() - 0.5 * z * z
        }))
    }

    fn log_bound(&self) -> f64 {
        log_sum_exp(
            self.components
                .iter()
                .map(|c| c.weight.ln() - (c.sd * (std::f64::consts::TAU).sqrt()).ln()),
        )
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

impl ForwardModel for GaussianMixtureModel {
    fn parameter_dim(&self) -> usize {
        1
    }

    fn observable_len(&self) -> usize {
        1
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        if !x[0].is_finite() {
            return Err(ModelError::Domain(format!("parameter must be finite, got {}", x[0])));
        }
        Ok(vec![self.log_bound() - self.log_density(x[0])])
    }

    fn name(&self) -> &'static str {
        "gaussian-mixture"
    }
}
