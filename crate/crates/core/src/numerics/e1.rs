use crate::error::{Error, Result};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
///
/// Power series for `x <= 1`, Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain("E1 requires a finite x > 0"));
    }
    if x <= 1.0 {
        Ok(series(x))
    } else {
        Ok(continued_fraction(x))
    }
}

fn series(x: f64) -> f64 {
    // E1(x) = -γ - ln x - Σ_{k>=1} (-x)^k / (k k!)
    let mut term = 1.0;
    let mut acc = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        acc += contrib;
        if contrib.abs() < 1e-18 * acc.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - acc
}

fn continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}

/// Principal branch of `E1(z)` for `Re z > 0`.
pub fn exp_integral_e1_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain("complex E1 requires Re z > 0"));
    }
    if z.norm() <= 2.0 {
        Ok(complex_series(z))
    } else {
        Ok(complex_continued_fraction(z))
    }
}

fn complex_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / kf;
        let contrib = term / kf;
        acc += contrib;
        if contrib.norm() < 1e-18 * acc.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - acc
}

fn complex_continued_fraction(z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut b = z + 1.0;
    // 1/tiny written out: complex division would square the tiny value
    let mut c = Complex64::new(1e300, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = one / (d * an + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}
