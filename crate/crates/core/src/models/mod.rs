//! Forward models mapping parameters to observations, plus synthetic-data
//! generation.
//!
//! Every model is deterministic; randomness only enters through
//! [`synthesize_data`], which is itself reproducible from its seed.

mod mixture;
mod point_source;
mod stekloff;
mod wave;

pub use mixture::{GaussianMixtureModel, MixtureComponent};
pub use point_source::{point_source_field, PointSourceModel};
pub use stekloff::{stekloff_closest, stekloff_eigenvalues, StekloffEigenvalue, StekloffModel};
pub use wave::{wave_field, SourceMode, SourceSpec, WaveMediumModel};

use crate::specfun::SpecFunError;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter has dimension {got}, model expects {want}")]
    Dimension { want: usize, got: usize },
    #[error("parameter outside model domain: {0}")]
    Domain(String),
    /// The guard against near-Dirichlet arguments where the eigenvalue
    /// expression J_m'(x)/J_m(x) blows up.
    #[error("near-Dirichlet argument: |J_{order}({argument})| below guard {guard:e}")]
    NearDirichlet { order: u32, argument: f64, guard: f64 },
    #[error("evaluation point coincides with the receiver")]
    SourceAtReceiver,
    #[error("invalid observation: {0}")]
    Observation(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// A parameter-to-observation map. Complex observables are flattened to
/// interleaved (re, im) pairs so the sampler only ever sees real vectors.
pub trait ForwardModel: Send + Sync {
    fn parameter_dim(&self) -> usize;
    fn observable_len(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError>;

    /// Scalar diagnostic at a parameter value, for models where a single
    /// number summarizes the fit (the Stekloff model reports the retained
    /// eigenvalue). `None` when the model has no such summary.
    fn scalar_check(&self, _x: &[f64]) -> Option<Result<f64, ModelError>> {
        None
    }

    fn name(&self) -> &'static str;

    fn check_dim(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.parameter_dim() {
            return Err(ModelError::Dimension { want: self.parameter_dim(), got: x.len() });
        }
        Ok(())
    }
}

/// Observed data: a real vector (complex data interleaved as (re, im)) and
/// the per-component noise scale assumed by the likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
    pub noise_sigma: f64,
}

impl Observation {
    pub fn new(values: Vec<f64>, noise_sigma: f64) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(ModelError::Observation("empty observation".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::Observation("non-finite observation value".into()));
        }
        if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
            return Err(ModelError::Observation(format!(
                "noise_sigma must be positive and finite, got {noise_sigma}"
            )));
        }
        Ok(Observation { values, noise_sigma })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// How synthetic noise perturbs a clean forward value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseKind {
    /// y * (1 + level * xi), xi ~ N(0, 1)
    GaussianRelative,
    /// y * (1 + level * xi), xi ~ U(-1, 1)
    UniformRelative,
    /// y + level * xi, xi ~ N(0, 1)
    GaussianAbsolute,
}

/// One standard-normal draw via Box-Muller. Kept explicit (rather than a
/// distributions crate) so the byte-for-byte reproducibility of synthetic
/// data depends only on the ChaCha stream.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]: keeps ln finite
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Evaluate the model at `true_param` and perturb each component with the
/// requested noise. Deterministic: a fixed seed gives bit-identical output.
///
/// The returned `noise_sigma` records the absolute scale the synthesis used
/// (`level * max|y|` for relative kinds, `level` for absolute); noiseless
/// synthesis (level = 0) falls back to 1.0 so the field stays positive.
pub fn synthesize_data(
    model: &dyn ForwardModel,
    true_param: &[f64],
    kind: NoiseKind,
    level: f64,
    seed: u64,
) -> Result<Observation, ModelError> {
    if !level.is_finite() || level < 0.0 {
        return Err(ModelError::Domain(format!("noise level must be >= 0, got {level}")));
    }
    let clean = model.evaluate(true_param)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = clean
        .iter()
        .map(|&y| match kind {
            NoiseKind::GaussianRelative => y * (1.0 + level * standard_normal(&mut rng)),
            NoiseKind::UniformRelative => y * (1.0 + level * rng.gen_range(-1.0..1.0)),
            NoiseKind::GaussianAbsolute => y + level * standard_normal(&mut rng),
        })
        .collect();
    let max_abs = clean.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let scale = match kind {
        NoiseKind::GaussianRelative | NoiseKind::UniformRelative => level * max_abs,
        NoiseKind::GaussianAbsolute => level,
    };
    let sigma = if scale > 0.0 { scale } else { 1.0 };
    Observation::new(values, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(Vec<f64>);
    impl ForwardModel for Constant {
        fn parameter_dim(&self) -> usize {
            1
        }
        fn observable_len(&self) -> usize {
            self.0.len()
        }
        fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
            self.check_dim(x)?;
            Ok(self.0.clone())
        }
        fn name(&self) -> &'static str {
            "constant"
        }
    }

    #[test]
    fn zero_level_reproduces_forward_values_exactly() {
        let m = Constant(vec![1.5, -2.25, 0.0]);
        for kind in
            [NoiseKind::GaussianRelative, NoiseKind::UniformRelative, NoiseKind::GaussianAbsolute]
        {
            let obs = synthesize_data(&m, &[0.0], kind, 0.0, 99).unwrap();
            assert_eq!(obs.values, vec![1.5, -2.25, 0.0]);
        }
    }

    #[test]
    fn same_seed_is_bit_identical_and_seeds_differ() {
        let m = Constant(vec![1.0, 2.0, 3.0, 4.0]);
        let a = synthesize_data(&m, &[0.0], NoiseKind::GaussianRelative, 0.05, 7).unwrap();
        let b = synthesize_data(&m, &[0.0], NoiseKind::GaussianRelative, 0.05, 7).unwrap();
        let c = synthesize_data(&m, &[0.0], NoiseKind::GaussianRelative, 0.05, 8).unwrap();
        assert_eq!(a.values, b.values);
        assert_ne!(a.values, c.values);
        assert!(a.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn relative_noise_scales_with_value() {
        // A zero component stays exactly zero under relative noise.
        let m = Constant(vec![0.0, 10.0]);
        let obs = synthesize_data(&m, &[0.0], NoiseKind::UniformRelative, 0.05, 3).unwrap();
        assert_eq!(obs.values[0], 0.0);
        assert!((obs.values[1] - 10.0).abs() <= 0.5 + 1e-12);
        assert_ne!(obs.values[1], 10.0);
    }

    #[test]
    fn absolute_noise_shifts_zero_values() {
        let m = Constant(vec![0.0]);
        let obs = synthesize_data(&m, &[0.0], NoiseKind::GaussianAbsolute, 0.1, 5).unwrap();
        assert_ne!(obs.values[0], 0.0);
        assert_eq!(obs.noise_sigma, 0.1);
    }

    #[test]
    fn negative_level_rejected() {
        let m = Constant(vec![1.0]);
        assert!(synthesize_data(&m, &[0.0], NoiseKind::GaussianRelative, -0.1, 0).is_err());
    }

    #[test]
    fn observation_validation() {
        assert!(Observation::new(vec![], 1.0).is_err());
        assert!(Observation::new(vec![1.0], 0.0).is_err());
        assert!(Observation::new(vec![f64::NAN], 1.0).is_err());
        assert!(Observation::new(vec![0.62], 0.05).is_ok());
    }

    #[test]
    fn standard_normal_moments_are_sane() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let n = 200_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = standard_normal(&mut rng);
            s += z;
            s2 += z * z;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
