//! Extremal theory for the one-atom singular inner function
//! `S_a(z) = exp(−a(1+z)/(1−z))`: the constant `A`, `γ(S_a H² ∩ D)`, the
//! extremal function, Blaschke approximants and the weighted-space bound.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gramian::{gamma_extremal, ConstraintSet};
use crate::kernels::{CirclePoint, DiagonalKernel, UnitDiscPoint};
use crate::numerics::{exp_integral_e1, exp_integral_e1_complex, integrate_breakpoints, integrate_disc_at_vertex, integrate_interval, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AMethod {
    /// Quadrature of `h(t) = e^{−a(1+t)/(1−t)}/(1−t)` and `t h(t)`.
    DirectIntegral,
    /// `1 − A = (e^{−2a} − 2a E1(2a)) / E1(2a)`.
    E1Substitution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicExtremalResult {
    pub a: f64,
    pub big_a: f64,
    /// `1 − A`, carried separately because it is the small quantity for tiny `a`.
    pub one_minus_big_a: f64,
    pub gamma: f64,
    pub one_minus_gamma: f64,
    pub method: AMethod,
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain("atom mass a must be positive and finite"));
    }
    Ok(())
}

fn tight() -> QuadratureSpec {
    QuadratureSpec::default().with_tolerances(1e-300, 1e-14)
}

/// `1 − A` by direct quadrature, in the variable `u = 1 − t`:
/// `∫₀¹ e^{−a(2−u)/u} du / ∫₀¹ e^{−a(2−u)/u} u^{−1} du`.
fn one_minus_a_direct(a: f64) -> Result<f64> {
    // below u_min the integrands are smaller than e^{−700}
    let u_min = (2.0 * a / 700.0).min(0.5);
    let mut breaks: Vec<f64> = Vec::new();
    let mut u = 1.0;
    while u > u_min {
        breaks.push(u);
        u *= 0.5;
    }
    breaks.push(u_min);
    breaks.reverse();
    breaks.dedup();
    let weight = |u: f64| (-a * (2.0 - u) / u).exp();
    let num = integrate_breakpoints(weight, &breaks, &tight())?.value;
    let den = integrate_breakpoints(|u: f64| weight(u) / u, &breaks, &tight())?.value;
    Ok(num / den)
}

fn one_minus_a_e1(a: f64) -> Result<f64> {
    let e1 = exp_integral_e1(2.0 * a)?;
    Ok(((-2.0 * a).exp() - 2.0 * a * e1) / e1)
}

/// `A = ∫₀¹ t h / ∫₀¹ h` and `γ = √A e^{−a}`.
pub fn compute_a(a: f64, method: AMethod) -> Result<AtomicExtremalResult> {
    check_a(a)?;
    let oma = match method {
        AMethod::DirectIntegral => one_minus_a_direct(a)?,
        AMethod::E1Substitution => one_minus_a_e1(a)?,
    };
    if !(oma > 0.0 && oma < 1.0) {
        return Err(Error::NonFinite("1 - A outside (0, 1)"));
    }
    let big_a = 1.0 - oma;
    // 1 − √(1 − x) e^{−a}, without cancellation for small x and a
    let one_minus_gamma = -(0.5 * (-oma).ln_1p() - a).exp_m1();
    Ok(AtomicExtremalResult { a, big_a, one_minus_big_a: oma, gamma: 1.0 - one_minus_gamma, one_minus_gamma, method })
}

/// `γ(S_a H² ∩ D) = √A e^{−a}`.
pub fn gamma_atomic(a: f64) -> Result<f64> {
    Ok(compute_a(a, AMethod::E1Substitution)?.gamma)
}

/// `1 − γ(S_a H² ∩ D)`, accurate for small `a`.
pub fn one_minus_gamma_atomic(a: f64) -> Result<f64> {
    Ok(compute_a(a, AMethod::E1Substitution)?.one_minus_gamma)
}

/// `h(t) = e^{−a(1+t)/(1−t)} / (1−t)`.
pub fn h_limit(a: f64, t: f64) -> f64 {
    (-a * (1.0 + t) / (1.0 - t)).exp() / (1.0 - t)
}

/// The extremal function `φ` of `S_a H² ∩ D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicExtremal {
    pub a: f64,
    pub big_a: f64,
    quad: QuadratureSpec,
}

impl AtomicExtremal {
    pub fn new(a: f64) -> Result<Self> {
        let r = compute_a(a, AMethod::E1Substitution)?;
        Ok(Self { a, big_a: r.big_a, quad: QuadratureSpec::default().with_tolerances(1e-14, 1e-12) })
    }

    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.big_a.sqrt() * (-self.a).exp()
    }

    fn singular(&self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (-(one + w) / (one - w) * self.a).exp()
    }

    /// `(zφ)'(w) = A^{−1/2} (A − w)/(1 − w) · e^{−a(1+w)/(1−w)}`.
    fn d(&self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (Complex64::new(self.big_a, 0.0) - w) / (one - w) * self.singular(w) / self.big_a.sqrt()
    }

    /// [`Self::d`] at `w = 1 − δ`, evaluated from `δ` without cancellation.
    fn d_at_offset(&self, delta: Complex64) -> Complex64 {
        let two = Complex64::new(2.0, 0.0);
        let s = (-(two - delta) / delta * self.a).exp();
        (delta - (1.0 - self.big_a)) / delta * s / self.big_a.sqrt()
    }

    /// Derivative of [`Self::d`].
    fn d_prime(&self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let q = one - w;
        let bracket = (self.big_a - 1.0) / (q * q) - (Complex64::new(self.big_a, 0.0) - w) * (2.0 * self.a) / (q * q * q);
        bracket * self.singular(w) / self.big_a.sqrt()
    }

    pub fn derivative_eval(&self, z: &UnitDiscPoint) -> Complex64 {
        self.d(z.to_complex())
    }

    /// `φ(z) = ∫₀¹ (wφ)'(tz) dt`.
    pub fn eval(&self, z: &UnitDiscPoint) -> Result<Complex64> {
        let z = z.to_complex();
        Ok(integrate_interval(|t| self.d(z * t), 0.0, 1.0, &self.quad)?.value)
    }

    /// `φ'(z) = ∫₀¹ t (wφ)''(tz) dt`.
    pub fn derivative_of_phi(&self, z: &UnitDiscPoint) -> Result<Complex64> {
        let z = z.to_complex();
        Ok(integrate_interval(|t| self.d_prime(z * t) * t, 0.0, 1.0, &self.quad)?.value)
    }

    /// Primitive of `(zφ)'` in the variable `u = (1+w)/(1−w)`, up to the factor `A^{−1/2}`:
    /// `(A−1) G1(u) + 2 G2(u)` with `G1 = −e^a E1(a(u+1))`, `G2 = −e^{−au}/(u+1) − a G1`.
    fn primitive_u(&self, u: Complex64) -> Result<Complex64> {
        let a = self.a;
        let g1 = -exp_integral_e1_complex((u + 1.0) * a)? * a.exp();
        let g2 = -(-u * a).exp() / (u + 1.0) - g1 * a;
        Ok(g1 * (self.big_a - 1.0) + g2 * 2.0)
    }

    /// `φ(z)` in closed form through the complex exponential integral.
    /// Falls back to quadrature for `|z| < 0.1`, where the closed form cancels.
    pub fn eval_closed(&self, z: &UnitDiscPoint) -> Result<Complex64> {
        if z.norm() < 0.1 {
            return self.eval(z);
        }
        let w = z.to_complex();
        let one = Complex64::new(1.0, 0.0);
        let u = (one + w) / (one - w);
        let diff = self.primitive_u(u)? - self.primitive_u(one)?;
        Ok(diff / (w * self.big_a.sqrt()))
    }

    /// `φ'(z) = ((zφ)'(z) − φ(z))/z` from the closed form, quadrature near the origin.
    pub fn derivative_of_phi_closed(&self, z: &UnitDiscPoint) -> Result<Complex64> {
        if z.norm() < 0.1 {
            return self.derivative_of_phi(z);
        }
        Ok((self.d(z.to_complex()) - self.eval_closed(z)?) / z.to_complex())
    }

    /// `‖φ‖²_D = Σ (n+1)|φ̂_n|² = ∫_D |(zφ)'(z)|² dA` (normalized area):
    /// the coefficients of `(zφ)'` are `(n+1)φ̂_n` and `∫|z^n|² dA = 1/(n+1)`.
    pub fn dirichlet_norm_sq(&self, disc: &QuadratureSpec) -> Result<f64> {
        let r = integrate_disc_at_vertex(|v| self.d_at_offset(v.offset).norm_sqr(), CirclePoint::one(), disc)?;
        Ok(r.value)
    }
}

/// `(zφ)'(z)` for the atom of mass `a` at `1`.
pub fn extremal_derivative_eval(a: f64, z: &UnitDiscPoint) -> Result<Complex64> {
    Ok(AtomicExtremal::new(a)?.derivative_eval(z))
}

/// `φ(z)` by radial quadrature of the closed-form derivative.
pub fn extremal_eval_atomic(a: f64, z: &UnitDiscPoint) -> Result<Complex64> {
    AtomicExtremal::new(a)?.eval(z)
}

/// Data for `B_n(z) = ((r − z)/(1 − rz))^n`, `r = 1 − a/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlaschkeApproximant {
    pub n: usize,
    pub r: f64,
    pub big_a_n: f64,
    pub gamma_n: f64,
}

/// `h_n(t) = r^{n−1}/(1 − r²t) · ((1 − t)/(1 − r²t))^{n−1}`.
pub fn h_n(a: f64, n: usize, t: f64) -> f64 {
    let r = 1.0 - a / n as f64;
    let q = 1.0 - r * r * t;
    r.powi(n as i32 - 1) / q * ((1.0 - t) / q).powi(n as i32 - 1)
}

/// `A_n = r ∫ t h_n / ∫ h_n` and `γ_n = √(A_n r^{2n−1})`.
pub fn gamma_blaschke_approx(a: f64, n: usize) -> Result<BlaschkeApproximant> {
    check_a(a)?;
    if n == 0 {
        return Err(Error::InvalidInput("approximant index n must be at least 1"));
    }
    if a >= n as f64 {
        return Err(Error::Domain("approximants need r = 1 - a/n > 0"));
    }
    let r = 1.0 - a / n as f64;
    let mut breaks: Vec<f64> = (0..48).map(|j| 1.0 - libm::ldexp(1.0, -j)).collect();
    breaks.push(1.0);
    let den = integrate_breakpoints(|t| h_n(a, n, t), &breaks, &tight())?.value;
    let num = integrate_breakpoints(|t| t * h_n(a, n, t), &breaks, &tight())?.value;
    let big_a_n = r * num / den;
    let gamma_n = (big_a_n * r.powi(2 * n as i32 - 1)).sqrt();
    Ok(BlaschkeApproximant { n, r, big_a_n, gamma_n })
}

/// Largest `n` for which the Gramian route is offered.
pub const BLASCHKE_GRAMIAN_MAX_N: usize = 5;

/// `γ` for a zero of multiplicity `n` at `r = 1 − a/n` in the Dirichlet space,
/// through the derivative Gramian.
pub fn gamma_blaschke_gramian(a: f64, n: usize) -> Result<f64> {
    check_a(a)?;
    if n == 0 || n > BLASCHKE_GRAMIAN_MAX_N {
        return Err(Error::InvalidInput("Gramian cross-check is limited to 1 <= n <= 5"));
    }
    if a >= n as f64 {
        return Err(Error::Domain("approximants need r = 1 - a/n > 0"));
    }
    let r = 1.0 - a / n as f64;
    let set = ConstraintSet::multiple_zero(UnitDiscPoint::real(r)?, n)?;
    Ok(gamma_extremal(&DiagonalKernel::dirichlet(), &set)?.gamma)
}

/// Lower bound `γ_s ≥ e^{−a}/‖f‖_s` from `f(z) = S_a(z)(1 − z)/(1 − rz)`, `r = 1 − a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCertificate {
    pub a: f64,
    pub s: f64,
    pub r: f64,
    pub hardy_norm_sq: f64,
    pub area_integral: f64,
    pub norm_sq: f64,
    pub bound: f64,
}

impl WeightedCertificate {
    /// `(1 − bound)/a^s`.
    pub fn scaled_defect(&self) -> f64 {
        (1.0 - self.bound) / self.a.powf(self.s)
    }
}

pub fn gamma_weighted_lower(a: f64, s: f64, disc: &QuadratureSpec) -> Result<WeightedCertificate> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain("weighted certificate needs a in (0, 1)"));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain("weighted certificate needs s in (0, 1)"));
    }
    let r = 1.0 - a;
    let one = Complex64::new(1.0, 0.0);
    // boundary: |S| = 1, so ‖f‖²_{H²} = (1/2π)∫ |1 − ζ|²/|1 − rζ|² dθ, peaked at θ = 0 on scale a
    let mut breaks: Vec<f64> = Vec::new();
    let mut t = PI;
    while t > a * 1e-3 {
        breaks.push(t);
        t *= 0.5;
    }
    breaks.push(0.0);
    breaks.reverse();
    let half = integrate_breakpoints(
        |theta: f64| {
            let zeta = Complex64::from_polar(1.0, theta);
            (one - zeta).norm_sqr() / (one - zeta * r).norm_sqr()
        },
        &breaks,
        &tight(),
    )?
    .value;
    // the integrand is even in θ
    let hardy_norm_sq = half / PI;
    let area = integrate_disc_at_vertex(
        |v| {
            // 1 − z = δ and 1 − rz = a + rδ
            let delta = v.offset;
            let q = delta * r + a;
            let s_val = (-(Complex64::new(2.0, 0.0) - delta) / delta * a).exp();
            let fp = s_val * (-(2.0 * a) / (delta * q) + (r - 1.0) / (q * q));
            fp.norm_sqr() * v.depth.powf(s)
        },
        CirclePoint::one(),
        disc,
    )?;
    let norm_sq = hardy_norm_sq + area.value;
    let bound = (-a).exp() / norm_sq.sqrt();
    Ok(WeightedCertificate { a, s, r, hardy_norm_sq, area_integral: area.value, norm_sq, bound })
}
