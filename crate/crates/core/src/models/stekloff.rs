//! Stekloff eigenvalues of the unit disk with constant index of refraction.
//!
//! Separating variables in `Δw + k²n w = 0` on the unit disk with the
//! boundary condition `∂w/∂ν + λw = 0` gives one eigenvalue per angular
//! order m:
//!
//! ```text
//! λ_m = -k√n · J_m'(k√n) / J_m(k√n),   m = 0, 1, 2, ...
//! ```
//!
//! The forward map retains the eigenvalue closest to a configured target,
//! which is what makes the inverse problem multimodal: different orders take
//! the same value at different indices n.

use super::{ForwardModel, ModelError};
use crate::specfun::bessel_j_array;

#[derive(Debug, Clone)]
pub struct StekloffModel {
    pub wavenumber: f64,
    /// Target the closest-eigenvalue selection aims for.
    pub target_eigenvalue: f64,
    /// Largest angular order included in the spectrum.
    pub max_order: u32,
    /// Treat |J_m(k√n)| < guard·|k√n·J_m'(k√n)| as a Dirichlet eigenvalue of
    /// the disk, i.e. reject once |λ_m| would exceed 1/guard. The comparison
    /// is relative to J_m' because at small arguments J_m and J_m' are both
    /// tiny while their ratio — the eigenvalue — is benign.
    pub dirichlet_guard: f64,
}

impl StekloffModel {
    pub const DEFAULT_MAX_ORDER: u32 = 25;
    pub const DEFAULT_DIRICHLET_GUARD: f64 = 1e-12;

    pub fn new(wavenumber: f64, target_eigenvalue: f64) -> Self {
        assert!(wavenumber > 0.0 && wavenumber.is_finite(), "wavenumber must be positive");
        StekloffModel {
            wavenumber,
            target_eigenvalue,
            max_order: Self::DEFAULT_MAX_ORDER,
            dirichlet_guard: Self::DEFAULT_DIRICHLET_GUARD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StekloffEigenvalue {
    pub order: u32,
    pub value: f64,
    /// 1 for order 0, 2 for order ≥ 1 (cos/sin angular pairs).
    pub multiplicity: u32,
}

/// All eigenvalues for orders 0..=max_order at index of refraction `n`.
pub fn stekloff_eigenvalues(
    model: &StekloffModel,
    n: f64,
) -> Result<Vec<StekloffEigenvalue>, ModelError> {
    assert!(model.max_order >= 1, "max_order must be at least 1");
    if !n.is_finite() || n <= 0.0 {
        return Err(ModelError::Domain(format!("index of refraction must be positive, got {n}")));
    }
    let x = model.wavenumber * n.sqrt();
    let j = bessel_j_array(model.max_order, x)?;
    let mut out = Vec::with_capacity(model.max_order as usize + 1);
    for m in 0..=model.max_order {
        let jm = j[m as usize];
        // J_0' = -J_1; J_m' = J_{m-1} - (m/x) J_m for m >= 1.
        let jprime = if m == 0 { -j[1] } else { j[m as usize - 1] - (m as f64 / x) * jm };
        if jm.abs() < model.dirichlet_guard * (x * jprime).abs() {
            return Err(ModelError::NearDirichlet {
                order: m,
                argument: x,
                guard: model.dirichlet_guard,
            });
        }
        out.push(StekloffEigenvalue {
            order: m,
            value: -x * jprime / jm,
            multiplicity: if m == 0 { 1 } else { 2 },
        });
    }
    Ok(out)
}

/// The eigenvalue closest to the model's target; ties go to the smaller λ.
pub fn stekloff_closest(model: &StekloffModel, n: f64) -> Result<StekloffEigenvalue, ModelError> {
    let evs = stekloff_eigenvalues(model, n)?;
    Ok(closest_to(&evs, model.target_eigenvalue))
}

fn closest_to(evs: &[StekloffEigenvalue], target: f64) -> StekloffEigenvalue {
    let mut best = evs[0];
    for ev in &evs[1..] {
        let d = (ev.value - target).abs();
        let best_d = (best.value - target).abs();
        if d < best_d || (d == best_d && ev.value < best.value) {
            best = *ev;
        }
    }
    best
}

impl ForwardModel for StekloffModel {
    fn parameter_dim(&self) -> usize {
        1
    }

    fn observable_len(&self) -> usize {
        1
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        Ok(vec![stekloff_closest(self, x[0])?.value])
    }

    fn scalar_check(&self, x: &[f64]) -> Option<Result<f64, ModelError>> {
        Some(self.evaluate(x).map(|v| v[0]))
    }

    fn name(&self) -> &'static str {
        "stekloff"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_j;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    // First positive zero of J_0.
    const J0_ZERO_1: f64 = 2.404825557695773;

    #[test]
    fn order_zero_eigenvalue_at_unit_index() {
        let m = StekloffModel::new(1.0, 0.62);
        let evs = stekloff_eigenvalues(&m, 1.0).unwrap();
        assert_eq!(evs.len(), 26);
        assert_eq!(evs[0].order, 0);
        // lambda_0 = -x J_0'(x)/J_0(x) = J_1(1)/J_0(1) at x = 1.
        let expect = bessel_j(1, 1.0).unwrap() / bessel_j(0, 1.0).unwrap();
        assert_relative_eq!(evs[0].value, expect, max_relative = 1e-14);
        assert_abs_diff_eq!(evs[0].value, 0.5751, epsilon = 5e-5);
    }

    #[test]
    fn near_dirichlet_index_is_rejected() {
        let m = StekloffModel::new(1.0, 0.62);
        // k sqrt(n) lands on the first zero of J_0.
        let n = J0_ZERO_1 * J0_ZERO_1;
        match stekloff_eigenvalues(&m, n) {
            Err(ModelError::NearDirichlet { order: 0, .. }) => {}
            other => panic!("expected near-Dirichlet rejection, got {other:?}"),
        }
    }

    #[test]
    fn multiplicities_and_orders() {
        let m = StekloffModel::new(1.0, 0.62);
        let evs = stekloff_eigenvalues(&m, 2.5).unwrap();
        for (i, ev) in evs.iter().enumerate() {
            assert_eq!(ev.order as usize, i);
            assert_eq!(ev.multiplicity, if i == 0 { 1 } else { 2 });
        }
        // High orders well below their first Bessel zero must not trip the
        // Dirichlet guard: J_m and J_m' are both tiny there but the
        // eigenvalue stays near -m.
        let last = evs.last().unwrap();
        assert!(last.value.is_finite());
        assert_abs_diff_eq!(last.value, -25.0, epsilon = 0.2);
    }

    #[test]
    fn closest_tie_prefers_smaller_value() {
        let evs = [
            StekloffEigenvalue { order: 0, value: 3.0, multiplicity: 1 },
            StekloffEigenvalue { order: 1, value: 1.0, multiplicity: 2 },
        ];
        // Both are at distance 1 from the target.
        assert_eq!(closest_to(&evs, 2.0).value, 1.0);
    }

    #[test]
    fn closest_returns_exact_member_at_zero_distance() {
        let mut m = StekloffModel::new(1.0, 0.62);
        let evs = stekloff_eigenvalues(&m, 2.5).unwrap();
        m.target_eigenvalue = evs[3].value;
        let got = stekloff_closest(&m, 2.5).unwrap();
        assert_eq!(got.order, 3);
        assert_eq!(got.value, evs[3].value);
    }

    #[test]
    fn closest_near_first_reference_index() {
        let m = StekloffModel::new(1.0, 0.62);
        let ev = stekloff_closest(&m, 1.075).unwrap();
        assert_eq!(ev.order, 0);
        assert_abs_diff_eq!(ev.value, 0.625, epsilon = 5e-3);
    }

    #[test]
    fn closest_switches_order_across_the_box() {
        let m = StekloffModel::new(1.0, 0.62);
        // Near n = 5 the order-0 branch has run off towards the Dirichlet
        // blow-up and order 1 carries the near-target eigenvalue.
        assert_eq!(stekloff_closest(&m, 5.0).unwrap().order, 1);
    }

    #[test]
    fn rejects_nonpositive_index_and_bad_dimension() {
        let m = StekloffModel::new(1.0, 0.62);
        assert!(matches!(stekloff_eigenvalues(&m, 0.0), Err(ModelError::Domain(_))));
        assert!(matches!(stekloff_eigenvalues(&m, -1.0), Err(ModelError::Domain(_))));
        assert!(matches!(m.evaluate(&[1.0, 2.0]), Err(ModelError::Dimension { want: 1, got: 2 })));
    }

    #[test]
    fn scalar_check_matches_evaluate() {
        let m = StekloffModel::new(1.0, 0.62);
        let v = m.evaluate(&[1.5]).unwrap()[0];
        assert_eq!(m.scalar_check(&[1.5]).unwrap().unwrap(), v);
    }
}
