//! Standard normal CDF via the Abramowitz–Stegun 7.1.26 rational
//! approximation of erf. Absolute error of erf is below 1.5e−7, so Φ is
//! accurate to 7.5e−8 — far below the statistical resolution of any test in
//! this crate (KS distances live around 1e−2).

/// erf for x ≥ 0; callers handle the sign.
fn erf_nonneg(x: f64) -> f64 {
    const P: f64 = 0.327_591_1;
    const A1: f64 = 0.254_829_592;
    const A2: f64 = -0.284_496_736;
    const A3: f64 = 1.421_413_741;
    const A4: f64 = -1.453_152_027;
    const A5: f64 = 1.061_405_429;
    let t = 1.0 / (1.0 + P * x);
    let poly = ((((A5 * t + A4) * t + A3) * t + A2) * t + A1) * t;
    1.0 - poly * (-x * x).exp()
}

pub fn erf(x: f64) -> f64 {
    if x == 0.0 {
        // 7.1.26 leaves a ~1e-9 residue at the origin; pin the exact value so
        // Φ keeps its odd symmetry bit-for-bit.
        0.0
    } else if x < 0.0 {
        -erf_nonneg(-x)
    } else {
        erf_nonneg(x)
    }
}

/// Φ(z) = P(N(0,1) ≤ z). Odd symmetry around 0 holds exactly by
/// construction.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}
