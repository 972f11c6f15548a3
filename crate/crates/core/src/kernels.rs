//! Points of the disc and circle, and diagonal reproducing kernels
//! `K(z, w) = Σ c_n (z w̄)^n`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::ComplexCompensatedSum;

/// A point `z` with `|z| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitDiscPoint(Complex64);

impl UnitDiscPoint {
    pub const ORIGIN: UnitDiscPoint = UnitDiscPoint(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::try_from_complex(Complex64::new(re, im))
    }

    pub fn try_from_complex(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("disc point must be finite"));
        }
        if z.norm_sqr() >= 1.0 {
            return Err(Error::Domain("disc point must satisfy |z| < 1"));
        }
        Ok(Self(z))
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain("disc point radius must lie in [0, 1)"));
        }
        Self::try_from_complex(Complex64::from_polar(r, theta))
    }

    /// Real point `x ∈ (-1, 1)`.
    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn to_complex(&self) -> Complex64 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    pub fn arg(&self) -> f64 {
        self.0.arg()
    }

    /// Radial projection `z/|z|`; the origin projects to `1`.
    pub fn direction(&self) -> CirclePoint {
        if self.0.norm_sqr() == 0.0 {
            CirclePoint::new(0.0)
        } else {
            CirclePoint::new(self.0.arg())
        }
    }
}

/// A point `e^{iθ}` of the unit circle, stored by angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    theta: f64,
}

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        let mut t = theta - TAU * libm::floor(theta / TAU);
        if t >= TAU {
            t = 0.0;
        }
        Self { theta: t }
    }

    pub fn one() -> Self {
        Self { theta: 0.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.theta.cos(), self.theta.sin())
    }

    /// `|e^{iθ} - e^{iφ}| = 2 |sin((θ - φ)/2)|`, accurate for nearby angles.
    pub fn chord(&self, other: &CirclePoint) -> f64 {
        2.0 * (0.5 * (self.theta - other.theta)).sin().abs()
    }

    /// `|ζ - z|` for a disc point.
    pub fn distance_to(&self, z: &UnitDiscPoint) -> f64 {
        (self.to_complex() - z.to_complex()).norm()
    }
}

/// The kernel families the crate knows about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFamily {
    /// `c_n = 1/(n+1)`, `K = (1/x) log(1/(1-x))`.
    Dirichlet,
    /// `c_n = 1`, `K = 1/(1-x)`.
    Hardy,
    /// `K_a = 1/(1 - a x - (1-a) x²)`, `a ∈ [0, 1)`.
    AppendixA { a: f64 },
    /// Weighted Dirichlet space with norm `‖f‖²_{H²} + ∫|f'|²(1-|z|²)^s dA`.
    WeightedDs { s: f64 },
}

/// A diagonal kernel together with its series truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalKernel {
    family: KernelFamily,
    series_tol: f64,
    max_terms: usize,
}

const DIRICHLET_SERIES_SWITCH: f64 = 1e-3;
pub const DEFAULT_SERIES_TOL: f64 = 1e-17;
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

impl DiagonalKernel {
    pub fn new(family: KernelFamily) -> Result<Self> {
        match family {
            KernelFamily::AppendixA { a } if !(0.0..1.0).contains(&a) => {
                return Err(Error::InvalidInput("appendix kernel needs a in [0, 1)"));
            }
            KernelFamily::WeightedDs { s } if !(s > 0.0 && s < 1.0) => {
                return Err(Error::InvalidInput("weighted Dirichlet kernel needs s in (0, 1)"));
            }
            _ => {}
        }
        Ok(Self { family, series_tol: DEFAULT_SERIES_TOL, max_terms: DEFAULT_MAX_TERMS })
    }

    pub fn dirichlet() -> Self {
        Self { family: KernelFamily::Dirichlet, series_tol: DEFAULT_SERIES_TOL, max_terms: DEFAULT_MAX_TERMS }
    }

    pub fn hardy() -> Self {
        Self { family: KernelFamily::Hardy, series_tol: DEFAULT_SERIES_TOL, max_terms: DEFAULT_MAX_TERMS }
    }

    pub fn appendix_a(a: f64) -> Result<Self> {
        Self::new(KernelFamily::AppendixA { a })
    }

    pub fn weighted_ds(s: f64) -> Result<Self> {
        Self::new(KernelFamily::WeightedDs { s })
    }

    pub fn with_truncation(mut self, series_tol: f64, max_terms: usize) -> Self {
        self.series_tol = series_tol;
        self.max_terms = max_terms;
        self
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// `c_n`. The weighted Dirichlet coefficient goes through log-Gamma.
    pub fn coefficient(&self, n: usize) -> f64 {
        match self.family {
            KernelFamily::Dirichlet => 1.0 / (n as f64 + 1.0),
            KernelFamily::Hardy => 1.0,
            KernelFamily::AppendixA { .. } => {
                let mut it = self.coefficient_iter();
                it.nth(n).unwrap_or(0.0)
            }
            KernelFamily::WeightedDs { s } => {
                if n == 0 {
                    1.0
                } else {
                    let nf = n as f64;
                    let log_beta = libm::lgamma(nf) + libm::lgamma(s + 1.0) - libm::lgamma(nf + s + 1.0);
                    1.0 / (1.0 + nf * nf * log_beta.exp())
                }
            }
        }
    }

    /// `c_0, ..., c_N`.
    pub fn coefficients(&self, n_max: usize) -> Vec<f64> {
        self.coefficient_iter().take(n_max + 1).collect()
    }

    /// `1/c_n`: the squared norm of `z^n`.
    pub fn monomial_norm_sqr(&self, n: usize) -> f64 {
        1.0 / self.coefficient(n)
    }

    fn coefficient_iter(&self) -> Coefficients {
        Coefficients { family: self.family, n: 0, prev: 0.0, prev2: 0.0, beta: 0.0 }
    }

    /// Uniform bound on the tail coefficients following `c_n`.
    fn tail_coefficient_bound(&self, c_n: f64) -> f64 {
        match self.family {
            // not monotone, but bounded by one
            KernelFamily::AppendixA { .. } => 1.0,
            _ => c_n,
        }
    }

    /// `K(z, w)`.
    pub fn eval(&self, z: &UnitDiscPoint, w: &UnitDiscPoint) -> Result<Complex64> {
        self.eval_product(z.to_complex() * w.to_complex().conj())
    }

    /// `K(ζ, w)` with `ζ` on the circle; the product `ζ w̄` has modulus `|w| < 1`.
    pub fn boundary_eval(&self, zeta: &CirclePoint, w: &UnitDiscPoint) -> Result<Complex64> {
        self.eval_product(zeta.to_complex() * w.to_complex().conj())
    }

    /// Kernel value as a function of `x = z w̄`, `|x| < 1`.
    pub fn eval_product(&self, x: Complex64) -> Result<Complex64> {
        if !(x.norm_sqr() < 1.0) {
            return Err(Error::Domain("kernel argument must satisfy |z w̄| < 1"));
        }
        let one = Complex64::new(1.0, 0.0);
        match self.family {
            KernelFamily::Dirichlet => {
                if x.norm() < DIRICHLET_SERIES_SWITCH {
                    self.series(x)
                } else {
                    Ok(-(one - x).ln() / x)
                }
            }
            KernelFamily::Hardy => Ok(one / (one - x)),
            KernelFamily::AppendixA { a } => Ok(one / (one - x * a - x * x * (1.0 - a))),
            KernelFamily::WeightedDs { .. } => self.series(x),
        }
    }

    /// Truncated power series `Σ c_n x^n`.
    pub fn series(&self, x: Complex64) -> Result<Complex64> {
        let rho = x.norm();
        if rho >= 1.0 {
            return Err(Error::Domain("kernel argument must satisfy |z w̄| < 1"));
        }
        let mut sum = ComplexCompensatedSum::new();
        let mut power = Complex64::new(1.0, 0.0);
        let mut power_abs = 1.0;
        for (n, c) in self.coefficient_iter().enumerate() {
            if n > self.max_terms {
                return Err(Error::Truncation(self.max_terms));
            }
            sum.add(power * c);
            power *= x;
            power_abs *= rho;
            let tail = self.tail_coefficient_bound(c) * power_abs / (1.0 - rho);
            if tail < self.series_tol * sum.value().norm().max(1e-300) {
                break;
            }
        }
        Ok(sum.value())
    }

    /// `∂_z^i ∂_{w̄}^j K(z, w)`.
    pub fn deriv(&self, i: usize, j: usize, z: &UnitDiscPoint, w: &UnitDiscPoint) -> Result<Complex64> {
        self.deriv_raw(i, j, z.to_complex(), w.to_complex())
    }

    /// `∂_{w̄}^j K(ζ, w)` with `ζ` on the circle: the representer of
    /// `f ↦ f^{(j)}(w)` evaluated at a boundary point.
    pub fn boundary_deriv(&self, j: usize, zeta: &CirclePoint, w: &UnitDiscPoint) -> Result<Complex64> {
        if j == 0 {
            return self.boundary_eval(zeta, w);
        }
        self.deriv_raw(0, j, zeta.to_complex(), w.to_complex())
    }

    /// Series for mixed derivatives; `|z|·|w| < 1` is all that is required.
    pub(crate) fn deriv_raw(&self, i: usize, j: usize, z: Complex64, w: Complex64) -> Result<Complex64> {
        if i == 0 && j == 0 {
            return self.eval_product(z * w.conj());
        }
        let zr = z.norm();
        let wr = w.norm();
        let rho = zr * wr;
        if !(rho < 1.0) {
            return Err(Error::Domain("kernel argument must satisfy |z w̄| < 1"));
        }
        let wc = w.conj();
        let n0 = i.max(j);
        let mut ff_i = falling_factorial(n0, i);
        let mut ff_j = falling_factorial(n0, j);
        let mut zp = z.powi((n0 - i) as i32);
        let mut wp = wc.powi((n0 - j) as i32);
        let mut zp_abs = zr.powi((n0 - i) as i32);
        let mut wp_abs = wr.powi((n0 - j) as i32);
        if n0 == i {
            zp = Complex64::new(1.0, 0.0);
            zp_abs = 1.0;
        }
        if n0 == j {
            wp = Complex64::new(1.0, 0.0);
            wp_abs = 1.0;
        }
        let mut sum = ComplexCompensatedSum::new();
        for (n, c) in self.coefficient_iter().enumerate().skip(n0) {
            if n > self.max_terms {
                return Err(Error::Truncation(self.max_terms));
            }
            sum.add(zp * wp * (c * ff_i * ff_j));
            if rho == 0.0 {
                break;
            }
            // advance to n + 1
            let n1 = (n + 1) as f64;
            ff_i *= n1 / (n1 - i as f64);
            ff_j *= n1 / (n1 - j as f64);
            zp *= z;
            wp *= wc;
            zp_abs *= zr;
            wp_abs *= wr;
            let next = self.tail_coefficient_bound(c) * ff_i * ff_j * zp_abs * wp_abs;
            let q = ((n1 + 1.0) / (n1 + 1.0 - i as f64)) * ((n1 + 1.0) / (n1 + 1.0 - j as f64)) * rho;
            if q < 1.0 {
                let tail = next / (1.0 - q);
                if tail < self.series_tol * sum.value().norm().max(1e-300) {
                    break;
                }
            }
        }
        Ok(sum.value())
    }
}

fn falling_factorial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, m| acc * (n - m) as f64)
}

struct Coefficients {
    family: KernelFamily,
    n: usize,
    prev: f64,
    prev2: f64,
    beta: f64,
}

impl Iterator for Coefficients {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.n;
        let c = match self.family {
            KernelFamily::Dirichlet => 1.0 / (n as f64 + 1.0),
            KernelFamily::Hardy => 1.0,
            KernelFamily::AppendixA { a } => match n {
                0 => 1.0,
                1 => a,
                _ => a * self.prev + (1.0 - a) * self.prev2,
            },
            KernelFamily::WeightedDs { s } => {
                if n == 0 {
                    1.0
                } else {
                    // B(n, s+1), advanced by B(n+1, s+1) = B(n, s+1) n/(n+s+1)
                    self.beta = if n == 1 {
                        1.0 / (s + 1.0)
                    } else {
                        let m = (n - 1) as f64;
                        self.beta * m / (m + s + 1.0)
                    };
                    let nf = n as f64;
                    1.0 / (1.0 + nf * nf * self.beta)
                }
            }
        };
        self.prev2 = self.prev;
        self.prev = c;
        self.n += 1;
        Some(c)
    }
}
