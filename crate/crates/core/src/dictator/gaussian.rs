use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// `Pr[g₁ ≤ Φ⁻¹(a), g₂ ≤ Φ⁻¹(b)]` for standard Gaussians with correlation `σ`.
///
/// Uses `Φ(h)Φ(k) + (1/2π)∫₀^σ exp(−(h² − 2rhk + k²)/(2(1−r²)))/√(1−r²) dr`
/// integrated by adaptive Simpson.
pub fn gamma_rho(sigma: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(Error::Domain(format!("correlation {sigma} outside [0, 1)")));
    }
    for (name, m) in [("a", a), ("b", b)] {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::Domain(format!("{name} = {m} outside (0, 1)")));
        }
    }
    let normal = Normal::standard();
    let (h, k) = (normal.inverse_cdf(a), normal.inverse_cdf(b));
    let density = |r: f64| {
        let q = 1.0 - r * r;
        (-(h * h - 2.0 * r * h * k + k * k) / (2.0 * q)).exp() / q.sqrt()
    };
    let integral = adaptive_simpson(&density, 0.0, sigma, 1e-12, 50);
    Ok((a * b + integral / (2.0 * std::f64::consts::PI)).clamp(0.0, a.min(b)))
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
