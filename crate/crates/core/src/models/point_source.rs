//! Time-harmonic point source in the plane observed at a single receiver.
//!
//! The field of a point source at z measured at x₀ is the outgoing
//! fundamental solution `u = (i/4) H₀⁽¹⁾(k|x₀ − z|)`. It depends on z only
//! through the distance |x₀ − z|, so every source on a circle around the
//! receiver produces the same datum — the inverse problem's solution set is
//! a curve, not a point.

use super::{ForwardModel, ModelError};
use crate::specfun::{hankel1_0, ComplexValue};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSourceModel {
    pub receiver: [f64; 2],
    pub wavenumber: f64,
}

impl PointSourceModel {
    pub fn new(receiver: [f64; 2], wavenumber: f64) -> Self {
        assert!(receiver.iter().all(|v| v.is_finite()), "receiver coordinates must be finite");
        assert!(wavenumber > 0.0 && wavenumber.is_finite(), "wavenumber must be positive");
        PointSourceModel { receiver, wavenumber }
    }
}

/// Field of a source at `z` evaluated at the model's receiver.
pub fn point_source_field(
    model: &PointSourceModel,
    z: [f64; 2],
) -> Result<ComplexValue, ModelError> {
    let dx = model.receiver[0] - z[0];
    let dy = model.receiver[1] - z[1];
    let r = (dx * dx + dy * dy).sqrt();
    if r == 0.0 {
        return Err(ModelError::SourceAtReceiver);
    }
    Ok(hankel1_0(model.wavenumber * r)?.mul_i_scaled(0.25))
}

impl ForwardModel for PointSourceModel {
    fn parameter_dim(&self) -> usize {
        2
    }

    /// One complex value, stored as (re, im).
    fn observable_len(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        let u = point_source_field(self, [x[0], x[1]])?;
        Ok(vec![u.re, u.im])
    }

    fn name(&self) -> &'static str {
        "point-source"
    }
}
