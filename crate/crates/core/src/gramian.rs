//! Extremal problem `γ = sup{ Re f(0) : ‖f‖ ≤ 1, f vanishes on the constraints }`
//! solved through the Gramian of the constraint functionals, plus a
//! polynomial brute-force oracle.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{CirclePoint, DiagonalKernel, UnitDiscPoint};
use crate::linalg::{orthonormal_basis, project_out, pseudo_inverse, vector_norm, HermitianMatrix};

/// `f^{(order)}(point) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraint {
    pub point: UnitDiscPoint,
    pub order: usize,
}

/// A finite list of vanishing conditions. A zero of multiplicity `m` at `p` is
/// written as orders `0..m` at `p`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintSet {
    entries: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn new(entries: Vec<Constraint>) -> Result<Self> {
        let mut set = Self { entries: Vec::with_capacity(entries.len()) };
        for c in entries {
            set.push(c.point, c.order)?;
        }
        Ok(set)
    }

    /// Simple zeros at the given points.
    pub fn zeros(points: &[UnitDiscPoint]) -> Result<Self> {
        Self::new(points.iter().map(|&point| Constraint { point, order: 0 }).collect())
    }

    /// A zero of multiplicity `m` at `p`.
    pub fn multiple_zero(p: UnitDiscPoint, m: usize) -> Result<Self> {
        Self::new((0..m).map(|order| Constraint { point: p, order }).collect())
    }

    pub fn push(&mut self, point: UnitDiscPoint, order: usize) -> Result<()> {
        if order == 0 && point.norm_sqr() == 0.0 {
            return Err(Error::InvalidInput("a zero at the origin forces gamma = 0"));
        }
        if self.entries.iter().any(|c| c.order == order && c.point == point) {
            return Err(Error::InvalidInput("duplicate (point, order) constraint"));
        }
        self.entries.push(Constraint { point, order });
        Ok(())
    }

    pub fn entries(&self) -> &[Constraint] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `⟨1, g_i⟩ = (d/dz)^{order_i} 1` at the point: one for order zero, else zero.
    fn rhs(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .map(|c| Complex64::new(if c.order == 0 { 1.0 } else { 0.0 }, 0.0))
            .collect()
    }
}

/// Where to evaluate an extremal function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalPoint {
    Disc(UnitDiscPoint),
    Boundary(CirclePoint),
}

impl From<UnitDiscPoint> for EvalPoint {
    fn from(z: UnitDiscPoint) -> Self {
        EvalPoint::Disc(z)
    }
}

impl From<CirclePoint> for EvalPoint {
    fn from(z: CirclePoint) -> Self {
        EvalPoint::Boundary(z)
    }
}

impl EvalPoint {
    fn to_complex(self) -> Complex64 {
        match self {
            EvalPoint::Disc(z) => z.to_complex(),
            EvalPoint::Boundary(z) => z.to_complex(),
        }
    }
}

pub const PINV_CUTOFF: f64 = 1e-12;
pub const ILL_CONDITIONED: f64 = 1e12;
const NEGATIVITY_TOL: f64 = 1e-8;
const CLAMP_TOL: f64 = 1e-12;

/// Result of the Gramian solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaCertificate {
    pub kernel: DiagonalKernel,
    pub constraints: ConstraintSet,
    pub gamma: f64,
    /// `1 − Re⟨M e, e⟩` after clamping.
    pub gamma_sq: f64,
    /// `L_ij = ⟨g_j, g_i⟩` with `g_i` the representer of constraint `i`.
    pub gram: HermitianMatrix,
    /// `c = M e`; the projection of `1` onto the constraint span is `Σ c_j g_j`.
    pub coeffs: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
    pub rank: usize,
    pub condition_estimate: f64,
    /// Condition estimate exceeded `1e12`; the value is still returned.
    pub ill_conditioned: bool,
}

/// `L_ij = ∂^{k_i} ∂̄^{k_j} K(p_i, p_j)`.
pub fn build_gramian(kernel: &DiagonalKernel, constraints: &ConstraintSet) -> Result<HermitianMatrix> {
    if constraints.is_empty() {
        return Err(Error::InvalidInput("constraint set is empty"));
    }
    let e = constraints.entries();
    HermitianMatrix::from_upper(e.len(), |i, j| kernel.deriv(e[i].order, e[j].order, &e[i].point, &e[j].point))
}

pub fn gamma_extremal(kernel: &DiagonalKernel, constraints: &ConstraintSet) -> Result<GammaCertificate> {
    let gram = build_gramian(kernel, constraints)?;
    let pinv = pseudo_inverse(&gram, PINV_CUTOFF)?;
    let rhs = constraints.rhs();
    let coeffs = pinv.matrix.mul_vec(&rhs);
    let mee: f64 = coeffs.iter().zip(&rhs).map(|(c, e)| (c * e.conj()).re).sum();
    let raw = 1.0 - mee;
    if !raw.is_finite() {
        return Err(Error::NonFinite("gamma"));
    }
    if raw < -NEGATIVITY_TOL {
        return Err(Error::NumericalNegativity(raw));
    }
    let gamma_sq = if raw < 0.0 {
        0.0
    } else if raw > 1.0 {
        if raw > 1.0 + CLAMP_TOL {
            return Err(Error::NumericalNegativity(1.0 - raw));
        }
        1.0
    } else {
        raw
    };
    Ok(GammaCertificate {
        kernel: *kernel,
        constraints: constraints.clone(),
        gamma: gamma_sq.sqrt(),
        gamma_sq,
        gram,
        coeffs,
        rhs,
        rank: pinv.rank,
        condition_estimate: pinv.condition_estimate,
        ill_conditioned: !(pinv.condition_estimate <= ILL_CONDITIONED),
    })
}

/// Closed 2×2 formula for two simple zeros.
pub fn gamma_two_point(kernel: &DiagonalKernel, p: &UnitDiscPoint, q: &UnitDiscPoint) -> Result<f64> {
    let kpp = kernel.eval(p, p)?.re;
    let kqq = kernel.eval(q, q)?.re;
    let kqp = kernel.eval(q, p)?;
    let det = kpp * kqq - kqp.norm_sqr();
    if !(det >= 1e-14 * kpp * kqq) {
        return Err(Error::DegenerateGramian(det));
    }
    let form = (kpp + kqq - 2.0 * kqp.re) / det;
    let g2 = 1.0 - form;
    if g2 < -NEGATIVITY_TOL {
        return Err(Error::NumericalNegativity(g2));
    }
    Ok(g2.max(0.0).sqrt())
}

impl GammaCertificate {
    /// `(P_N 1)(z) = Σ c_j g_j(z)`.
    fn projection_at(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, con) in self.coeffs.iter().zip(self.constraints.entries()) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc += c * self.kernel.deriv_raw(0, con.order, z, con.point.to_complex())?;
        }
        Ok(acc)
    }

    /// `‖φ‖² = (1 − 2 Re Σ c_i e_i + c* L c) / γ²`; equals one for an exact solve.
    pub fn extremal_norm_sq(&self) -> Result<f64> {
        if self.gamma == 0.0 {
            return Err(Error::DegenerateExtremal);
        }
        let ce: f64 = self.coeffs.iter().zip(&self.rhs).map(|(c, e)| (c * e.conj()).re).sum();
        let clc = self.gram.quadratic_form(&self.coeffs);
        Ok((1.0 - 2.0 * ce + clc) / self.gamma_sq)
    }
}

/// `φ(z) = (1 − (P_N 1)(z)) / γ`, the normalized extremal function; `φ(0) = γ`.
pub fn extremal_eval(cert: &GammaCertificate, z: impl Into<EvalPoint>) -> Result<Complex64> {
    if cert.gamma == 0.0 {
        return Err(Error::DegenerateExtremal);
    }
    let z = z.into().to_complex();
    let p = cert.projection_at(z)?;
    Ok((Complex64::new(1.0, 0.0) - p) / cert.gamma)
}

/// Brute-force `γ` over polynomials of degree `≤ degree`.
///
/// In the weighted coordinates `b_n = â_n / √c_n` the norm is Euclidean,
/// `f(0) = b_0`, and each constraint is `⟨b, v⟩ = 0`. The answer is the
/// distance from `e_0` to the span of the `v`.
pub fn gamma_bruteforce_poly(kernel: &DiagonalKernel, constraints: &ConstraintSet, degree: usize) -> Result<f64> {
    if degree < constraints.len() {
        return Err(Error::InfeasibleConstraints(degree));
    }
    let coeffs = kernel.coefficients(degree);
    let sqrt_c: Vec<f64> = coeffs.iter().map(|c| c.sqrt()).collect();
    let rows: Vec<Vec<Complex64>> = constraints
        .entries()
        .iter()
        .map(|con| {
            let p = con.point.to_complex();
            let k = con.order;
            let mut v = vec![Complex64::new(0.0, 0.0); degree + 1];
            let mut power = Complex64::new(1.0, 0.0);
            let mut ff = (1..=k).fold(1.0, |acc, m| acc * m as f64);
            for n in k..=degree {
                if n > k {
                    let nf = n as f64;
                    ff *= nf / (nf - k as f64);
                    power *= p;
                }
                v[n] = (power * (sqrt_c[n] * ff)).conj();
            }
            v
        })
        .collect();
    let basis = orthonormal_basis(&rows, 1e-12);
    let mut e0 = vec![Complex64::new(0.0, 0.0); degree + 1];
    e0[0] = Complex64::new(1.0, 0.0);
    let r = project_out(&basis, &e0);
    Ok(vector_norm(&r).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use core::f64::consts::TAU;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(x: f64) -> UnitDiscPoint {
        UnitDiscPoint::real(x).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, rmax: f64) -> UnitDiscPoint {
        let r = rmax * rng.gen_range(0.05f64..1.0).sqrt();
        UnitDiscPoint::from_polar(r, rng.gen::<f64>() * TAU).unwrap()
    }

    #[test]
    fn constraint_validation() {
        assert!(ConstraintSet::zeros(&[UnitDiscPoint::ORIGIN]).is_err());
        assert!(ConstraintSet::zeros(&[real(0.5), real(0.5)]).is_err());
        assert!(ConstraintSet::new(vec![Constraint { point: UnitDiscPoint::ORIGIN, order: 1 }]).is_ok());
        assert!(build_gramian(&DiagonalKernel::hardy(), &ConstraintSet::default()).is_err());
    }

    #[test]
    fn one_by_one_gramian() {
        let k = DiagonalKernel::dirichlet();
        let z = UnitDiscPoint::new(0.2, 0.4).unwrap();
        let l = build_gramian(&k, &ConstraintSet::zeros(&[z]).unwrap()).unwrap();
        assert_eq!(l.dim(), 1);
        assert!((l.get(0, 0) - k.eval(&z, &z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn hardy_two_points_is_blaschke_value() {
        let k = DiagonalKernel::hardy();
        let cert = gamma_extremal(&k, &ConstraintSet::zeros(&[real(0.5), real(0.7)]).unwrap()).unwrap();
        assert!((cert.gamma - 0.35).abs() < 1e-12);
        assert!((gamma_two_point(&k, &real(0.3), &real(0.6)).unwrap() - 0.18).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_single_point() {
        let r: f64 = 0.6;
        let cert = gamma_extremal(&DiagonalKernel::dirichlet(), &ConstraintSet::zeros(&[real(r)]).unwrap()).unwrap();
        let exact = 1.0 - r * r / (1.0 / (1.0 - r * r)).ln();
        assert!((cert.gamma_sq - exact).abs() < 1e-13);
    }

    #[test]
    fn appendix_symmetric_pair() {
        let a = 0.01;
        let r: f64 = 0.5;
        let k = DiagonalKernel::appendix_a(a).unwrap();
        let cert = gamma_extremal(&k, &ConstraintSet::zeros(&[real(-r), real(r)]).unwrap()).unwrap();
        let f = 1.0 - (1.0 - a) * r.powi(4);
        let g = a * r * r;
        assert!((1.0 - cert.gamma_sq - (f * f - g * g) / f).abs() < 1e-13);
    }

    #[test]
    fn even_kernel_is_rank_deficient() {
        let k = DiagonalKernel::appendix_a(0.0).unwrap();
        let cert = gamma_extremal(&k, &ConstraintSet::zeros(&[real(-0.4), real(0.4)]).unwrap()).unwrap();
        assert_eq!(cert.rank, 1);
        assert!(cert.ill_conditioned);
        // same as a single zero of the even kernel: γ² = 1 − 1/K(r,r) = r⁴
        assert!((cert.gamma - 0.16).abs() < 1e-12);
        assert!(matches!(gamma_two_point(&k, &real(-0.4), &real(0.4)), Err(Error::DegenerateGramian(_))));
        assert!(gamma_two_point(&k, &real(0.4), &real(0.4)).is_err());
    }

    #[test]
    fn certificate_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for k in [DiagonalKernel::dirichlet(), DiagonalKernel::appendix_a(0.3).unwrap(), DiagonalKernel::weighted_ds(0.5).unwrap()] {
            for _ in 0..10 {
                let pts: Vec<_> = (0..3).map(|_| random_point(&mut rng, 0.8)).collect();
                let set = ConstraintSet::zeros(&pts).unwrap();
                let cert = gamma_extremal(&k, &set).unwrap();
                let phi0 = extremal_eval(&cert, UnitDiscPoint::ORIGIN).unwrap();
                assert!((phi0 - cert.gamma).norm() < 1e-12);
                for p in &pts {
                    assert!(extremal_eval(&cert, *p).unwrap().norm() < 1e-10);
                }
                assert!((cert.extremal_norm_sq().unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hardy_extremal_is_blaschke_product() {
        let k = DiagonalKernel::hardy();
        let cert = gamma_extremal(&k, &ConstraintSet::zeros(&[real(0.5), real(0.7)]).unwrap()).unwrap();
        for j in 0..20 {
            let z = UnitDiscPoint::from_polar(0.9 * (j as f64 + 0.5) / 20.0, 0.7 * j as f64).unwrap().to_complex();
            let b = (0.5 - z) / (1.0 - 0.5 * z) * ((0.7 - z) / (1.0 - 0.7 * z));
            let phi = extremal_eval(&cert, UnitDiscPoint::try_from_complex(z).unwrap()).unwrap();
            assert!((phi - b).norm() < 1e-10);
        }
        // boundary values are unimodular
        let phi = extremal_eval(&cert, CirclePoint::new(1.0)).unwrap();
        assert!((phi.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn multiplicity_constraints_hardy() {
        // Hardy extremal for a zero of order m at r is the Blaschke factor to the m-th power
        let k = DiagonalKernel::hardy();
        for m in 1..5 {
            let cert = gamma_extremal(&k, &ConstraintSet::multiple_zero(real(0.6), m).unwrap()).unwrap();
            assert!((cert.gamma - 0.6f64.powi(m as i32)).abs() < 1e-10, "m={m}");
        }
    }

    #[test]
    fn derivative_at_origin_allowed() {
        // f'(0) = 0 in H²: the optimum is f = 1
        let set = ConstraintSet::new(vec![Constraint { point: UnitDiscPoint::ORIGIN, order: 1 }]).unwrap();
        let cert = gamma_extremal(&DiagonalKernel::hardy(), &set).unwrap();
        assert!((cert.gamma - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gram_is_positive_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for k in [DiagonalKernel::dirichlet(), DiagonalKernel::hardy(), DiagonalKernel::appendix_a(0.2).unwrap(), DiagonalKernel::weighted_ds(0.3).unwrap()] {
            let pts: Vec<_> = (0..8).map(|_| random_point(&mut rng, 0.95)).collect();
            let l = build_gramian(&k, &ConstraintSet::zeros(&pts).unwrap()).unwrap();
            let w = hermitian_eigenvalues(&l).unwrap();
            assert!(w[0] >= -1e-10 * w[w.len() - 1]);
        }
    }

    #[test]
    fn bruteforce_examples() {
        let h = DiagonalKernel::hardy();
        let one = ConstraintSet::zeros(&[real(0.5)]).unwrap();
        assert!((gamma_bruteforce_poly(&h, &one, 50).unwrap() - 0.5).abs() < 1e-10);
        let d = DiagonalKernel::dirichlet();
        let two = ConstraintSet::zeros(&[real(0.3), real(0.5)]).unwrap();
        let g = gamma_extremal(&d, &two).unwrap().gamma;
        assert!((gamma_bruteforce_poly(&d, &two, 200).unwrap() - g).abs() < 1e-8);
        assert!(gamma_bruteforce_poly(&d, &two, 2).unwrap() <= g + 1e-12);
        assert_eq!(gamma_bruteforce_poly(&d, &two, 1), Err(Error::InfeasibleConstraints(1)));
    }

    #[test]
    fn two_point_matches_general_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for k in [DiagonalKernel::dirichlet(), DiagonalKernel::appendix_a(0.01).unwrap()] {
            for _ in 0..20 {
                let p = random_point(&mut rng, 0.9);
                let q = random_point(&mut rng, 0.9);
                if let Ok(g) = gamma_two_point(&k, &p, &q) {
                    let cert = gamma_extremal(&k, &ConstraintSet::zeros(&[p, q]).unwrap()).unwrap();
                    assert!((g - cert.gamma).abs() < 1e-12, "{} {}", g - cert.gamma, cert.condition_estimate);
                }
            }
        }
    }
}
