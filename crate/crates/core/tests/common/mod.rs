//! Shared independent oracles for the integration tests. Everything here is
//! deliberately written from the underlying ODEs/definitions, not from the
//! library's own formulas, so agreement is evidence rather than tautology.

#![allow(dead_code)]

/// Stekloff eigenvalue by shooting: integrate the order-m radial equation
/// y'' + y'/r + (k²n − m²/r²) y = 0 outward from r = eps with a Frobenius
/// start y ≈ r^m (1 + a₁r² + a₂r⁴), then return λ = −y'(1)/y(1).
pub fn stekloff_shooting_lambda(k: f64, n: f64, m: u32, eps: f64, step: f64) -> f64 {
    let q = k * k * n;
    let mf = m as f64;
    let a1 = -q / (4.0 * (mf + 1.0));
    let a2 = q * q / (32.0 * (mf + 1.0) * (mf + 2.0));
    let r0 = eps;
    let mut y = r0.powi(m as i32) * (1.0 + a1 * r0 * r0 + a2 * r0.powi(4));
    let mut v = mf * r0.powi(m as i32 - 1) * (1.0 + a1 * r0 * r0 + a2 * r0.powi(4))
        + r0.powi(m as i32) * (2.0 * a1 * r0 + 4.0 * a2 * r0.powi(3));
    let n_steps = ((1.0 - eps) / step).ceil() as usize;
    let h = (1.0 - eps) / n_steps as f64;
    let f = |r: f64, y: f64, v: f64| -> (f64, f64) { (v, -v / r - (q - mf * mf / (r * r)) * y) };
    let mut r = r0;
    for _ in 0..n_steps {
        let (k1y, k1v) = f(r, y, v);
        let (k2y, k2v) = f(r + 0.5 * h, y + 0.5 * h * k1y, v + 0.5 * h * k1v);
        let (k3y, k3v) = f(r + 0.5 * h, y + 0.5 * h * k2y, v + 0.5 * h * k2v);
        let (k4y, k4v) = f(r + h, y + h * k3y, v + h * k3v);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
    }
    -v / y
}

/// Modal amplitude by time stepping: u'' = −c²λu, u(0) = 0, u'(0) = c²g
/// (the impulse hands the mode its initial velocity), RK4 to time t.
pub fn wave_mode_ode_oracle(c: f64, lambda: f64, g: f64, t: f64, n_steps: usize) -> f64 {
    let h = t / n_steps as f64;
    let (mut u, mut v) = (0.0f64, c * c * g);
    let f = |u: f64, v: f64| -> (f64, f64) { (v, -c * c * lambda * u) };
    for _ in 0..n_steps {
        let (k1u, k1v) = f(u, v);
        let (k2u, k2v) = f(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = f(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = f(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    u
}

/// Composite Simpson quadrature on [a, b].
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Monte-Carlo standard error of the mean via batch means: split into
/// ⌊√N⌋ batches so autocorrelation within a chain is absorbed into the
/// batch-mean variance.
pub fn batch_means_se(samples: &[f64]) -> f64 {
    let n = samples.len();
    assert!(n >= 16, "too few samples for batch means");
    let b = (n as f64).sqrt().floor() as usize;
    let len = n / b;
    let means: Vec<f64> =
        (0..b).map(|i| samples[i * len..(i + 1) * len].iter().sum::<f64>() / len as f64).collect();
    let grand = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (b as f64 - 1.0);
    (var / b as f64).sqrt()
}

/// Mean and variance of a normal N(mu, sigma²) truncated to [a, b],
/// via the standard closed forms.
pub fn truncated_normal_moments(mu: f64, sigma: f64, a: f64, b: f64) -> (f64, f64) {
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};
    let std = Normal::new(0.0, 1.0).unwrap();
    let alpha = (a - mu) / sigma;
    let beta = (b - mu) / sigma;
    let z = std.cdf(beta) - std.cdf(alpha);
    let mean = mu + sigma * (std.pdf(alpha) - std.pdf(beta)) / z;
    let var = sigma
        * sigma
        * (1.0 + (alpha * std.pdf(alpha) - beta * std.pdf(beta)) / z
            - ((std.pdf(alpha) - std.pdf(beta)) / z).powi(2));
    (mean, var)
}
