//! Inner functions built from finitely many zeros and atoms, their local
//! Dirichlet integrals, Carleson's norm formula and Poisson integrals.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{CirclePoint, UnitDiscPoint};
use crate::numerics::{integrate_breakpoints, integrate_graded, GradedIntegral, QuadratureSpec};

/// A point mass `mass · δ_λ` on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub lambda: CirclePoint,
    pub mass: f64,
}

/// `μ = Σ a_n δ_{λ_n}` with finitely many distinct atoms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, at) in atoms.iter().enumerate() {
            if !(at.mass > 0.0 && at.mass.is_finite()) {
                return Err(Error::InvalidInput("atom masses must be positive and finite"));
            }
            if atoms[..i].iter().any(|b| b.lambda == at.lambda) {
                return Err(Error::InvalidInput("atom locations must be distinct"));
            }
        }
        Ok(Self { atoms })
    }

    /// `a · δ_{e^{iθ}}`.
    pub fn single(theta: f64, mass: f64) -> Result<Self> {
        Self::new(alloc::vec![Atom { lambda: CirclePoint::new(theta), mass }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Atom angles in increasing order.
    fn sorted_angles(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.atoms.iter().map(|a| a.lambda.theta()).collect();
        t.sort_by(|x, y| x.total_cmp(y));
        t
    }
}

/// `I = B · S_μ` with `B(z) = z^k Π (|z_n|/z_n)(z_n − z)/(1 − z̄_n z)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InnerSpec {
    blaschke_zeros: Vec<UnitDiscPoint>,
    zero_order_at_origin: usize,
    singular: AtomicMeasure,
}

impl InnerSpec {
    /// Zeros equal to the origin are counted into the `z^k` factor.
    pub fn new(zeros: Vec<UnitDiscPoint>, zero_order_at_origin: usize, singular: AtomicMeasure) -> Self {
        let mut k = zero_order_at_origin;
        let mut nonzero = Vec::with_capacity(zeros.len());
        for z in zeros {
            if z.norm_sqr() == 0.0 {
                k += 1;
            } else {
                nonzero.push(z);
            }
        }
        Self { blaschke_zeros: nonzero, zero_order_at_origin: k, singular }
    }

    pub fn blaschke(zeros: Vec<UnitDiscPoint>) -> Self {
        Self::new(zeros, 0, AtomicMeasure::default())
    }

    pub fn singular(measure: AtomicMeasure) -> Self {
        Self::new(Vec::new(), 0, measure)
    }

    pub fn zeros(&self) -> &[UnitDiscPoint] {
        &self.blaschke_zeros
    }

    pub fn zero_order_at_origin(&self) -> usize {
        self.zero_order_at_origin
    }

    pub fn measure(&self) -> &AtomicMeasure {
        &self.singular
    }

    /// `Σ (1 − |z_n|)`, counting zeros at the origin.
    pub fn blaschke_sum(&self) -> f64 {
        self.zero_order_at_origin as f64 + self.blaschke_zeros.iter().map(|z| 1.0 - z.norm()).sum::<f64>()
    }

    /// Factors and their derivatives at `z`, used by [`inner_eval`] and [`inner_deriv`].
    fn factors(&self, z: Complex64) -> Vec<(Complex64, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.blaschke_zeros.len() + self.zero_order_at_origin + 1);
        for _ in 0..self.zero_order_at_origin {
            out.push((z, one));
        }
        for zn in &self.blaschke_zeros {
            let w = zn.to_complex();
            let unimod = w.conj() / w.norm();
            let den = one - w.conj() * z;
            // d/dz (w − z)/(1 − w̄ z) = (|w|² − 1)/(1 − w̄ z)²
            out.push((unimod * (w - z) / den, unimod * (w.norm_sqr() - 1.0) / (den * den)));
        }
        if !self.singular.is_empty() {
            let mut exponent = Complex64::new(0.0, 0.0);
            let mut dexp = Complex64::new(0.0, 0.0);
            for at in self.singular.atoms() {
                let l = at.lambda.to_complex();
                exponent -= (l + z) / (l - z) * at.mass;
                dexp -= l * 2.0 * at.mass / ((l - z) * (l - z));
            }
            let s = exponent.exp();
            out.push((s, s * dexp));
        }
        out
    }
}

/// `I(z)`.
pub fn inner_eval(spec: &InnerSpec, z: &UnitDiscPoint) -> Complex64 {
    spec.factors(z.to_complex()).iter().fold(Complex64::new(1.0, 0.0), |acc, (f, _)| acc * f)
}

/// `I'(z)` by the product rule (no division by factor values).
pub fn inner_deriv(spec: &InnerSpec, z: &UnitDiscPoint) -> Complex64 {
    let f = spec.factors(z.to_complex());
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..f.len() {
        let mut term = f[i].1;
        for (j, fj) in f.iter().enumerate() {
            if j != i {
                term *= fj.0;
            }
        }
        total += term;
    }
    total
}

/// Local Dirichlet integral of `I` at `ζ`:
/// `k + Σ (1 − |z_n|²)/|ζ − z_n|² + Σ 2 a_j / |ζ − λ_j|²`, `+∞` at an atom.
pub fn local_dirichlet(spec: &InnerSpec, zeta: &CirclePoint) -> f64 {
    let mut total = spec.zero_order_at_origin as f64;
    for z in &spec.blaschke_zeros {
        let d = zeta.distance_to(z);
        total += (1.0 - z.norm_sqr()) / (d * d);
    }
    total + singular_local_dirichlet(&spec.singular, zeta)
}

fn singular_local_dirichlet(mu: &AtomicMeasure, zeta: &CirclePoint) -> f64 {
    let mut total = 0.0;
    for at in mu.atoms() {
        let d = zeta.chord(&at.lambda);
        if d == 0.0 {
            return f64::INFINITY;
        }
        total += 2.0 * at.mass / (d * d);
    }
    total
}

/// `(1/2π) ∫ F(e^{iθ}) dθ` when `F` may be singular at the atom angles of `mu`
/// and sharply peaked near the arguments of `peaks`.
///
/// Arcs between consecutive atoms are integrated with dyadic grading toward
/// both ends; a geometric growth of the graded contributions is reported as
/// `+∞`.
pub fn circle_mean_with_atoms<F: FnMut(CirclePoint) -> f64>(
    mut f: F,
    mu: &AtomicMeasure,
    peaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let atoms = mu.sorted_angles();
    let mut interior: Vec<f64> = peaks.iter().map(|t| CirclePoint::new(*t).theta()).collect();
    let mut g = |t: f64| f(CirclePoint::new(t));
    if atoms.is_empty() {
        interior.push(0.0);
        interior.push(TAU);
        interior.sort_by(|x, y| x.total_cmp(y));
        interior.dedup();
        let r = integrate_breakpoints(&mut g, &interior, spec)?;
        return Ok(r.value / TAU);
    }
    let mut total = 0.0;
    for (i, &start) in atoms.iter().enumerate() {
        let end = if i + 1 < atoms.len() { atoms[i + 1] } else { atoms[0] + TAU };
        // interior peaks inside this arc split it into extra sub-arcs
        let mut cuts: Vec<f64> = Vec::new();
        for &p in &interior {
            for shift in [0.0, TAU] {
                let q = p + shift;
                if q > start && q < end {
                    cuts.push(q);
                }
            }
        }
        cuts.sort_by(|x, y| x.total_cmp(y));
        cuts.dedup();
        let mut nodes = alloc::vec![start];
        nodes.extend(cuts);
        nodes.push(end);
        let last = nodes.len() - 2;
        for (j, w) in nodes.windows(2).enumerate() {
            match integrate_graded(&mut g, w[0], w[1], j == 0, j == last, spec)? {
                GradedIntegral::Finite(r) => total += r.value,
                GradedIntegral::Divergent => return Ok(f64::INFINITY),
            }
        }
    }
    Ok(total / TAU)
}

/// Carleson's formula `‖I f‖² = (1/2π)∫ D_ζ(I)|f(ζ)|² dθ + ‖f‖²`.
/// `f_norm_sq` is the Dirichlet norm of `f`, supplied by the caller.
pub fn carleson_norm_sq<F: FnMut(CirclePoint) -> Complex64>(
    spec: &InnerSpec,
    mut f_boundary: F,
    f_norm_sq: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(f_norm_sq >= 0.0) {
        return Err(Error::InvalidInput("f_norm_sq must be nonnegative"));
    }
    let peaks: Vec<f64> = spec.blaschke_zeros.iter().map(|z| z.arg()).collect();
    let boundary = circle_mean_with_atoms(
        |zeta| {
            let fz = f_boundary(zeta).norm_sqr();
            if fz == 0.0 {
                return 0.0;
            }
            fz * local_dirichlet(spec, &zeta)
        },
        &spec.singular,
        &peaks,
        quad,
    )?;
    Ok(boundary + f_norm_sq)
}

/// `P_w(ζ) = (1 − |w|²)/|ζ − w|²`.
pub fn poisson_kernel(w: &UnitDiscPoint, zeta: &CirclePoint) -> f64 {
    let d = zeta.distance_to(w);
    (1.0 - w.norm_sqr()) / (d * d)
}

/// `P[F](w) = (1/2π) ∫ P_w(ζ) F(ζ) dθ`, adaptive Gauss–Legendre with a
/// breakpoint at `arg w`.
pub fn poisson_integral<F: FnMut(CirclePoint) -> f64>(mut f: F, w: &UnitDiscPoint, quad: &QuadratureSpec) -> Result<f64> {
    let center = if w.norm_sqr() == 0.0 { 0.0 } else { w.arg() };
    let breaks = [center, center + TAU];
    let r = integrate_breakpoints(
        |t| {
            let zeta = CirclePoint::new(t);
            poisson_kernel(w, &zeta) * f(zeta)
        },
        &breaks,
        quad,
    )?;
    Ok(r.value / TAU)
}

/// `sup_ζ |ζ − λ| / |ζ − z| = 2|λ − z| / (1 − |z|²)`.
pub fn poisson_sup_ratio(lambda: &CirclePoint, z: &UnitDiscPoint) -> f64 {
    2.0 * (lambda.to_complex() - z.to_complex()).norm() / (1.0 - z.norm_sqr())
}

/// Frostman shift `(I(z) − a)/(1 − ā I(z))`.
pub fn frostman_shift_eval(spec: &InnerSpec, a: &UnitDiscPoint, z: &UnitDiscPoint) -> Complex64 {
    let i = inner_eval(spec, z);
    let a = a.to_complex();
    (i - a) / (Complex64::new(1.0, 0.0) - a.conj() * i)
}

/// `V_μ(ζ) = Σ a_j / |ζ − λ_j|²`, `+∞` at an atom.
pub fn v_mu(mu: &AtomicMeasure, zeta: &CirclePoint) -> f64 {
    0.5 * singular_local_dirichlet(mu, zeta)
}

/// `∫ log⁺ V_μ(ζ) |dζ|` over the circle (arclength, total `2π`).
pub fn log_plus_v_integral(mu: &AtomicMeasure, quad: &QuadratureSpec) -> Result<f64> {
    if mu.is_empty() {
        return Ok(0.0);
    }
    let mean = circle_mean_with_atoms(|zeta| v_mu(mu, &zeta).ln().max(0.0), mu, &[], quad)?;
    if mean.is_infinite() {
        return Err(Error::NonConvergence { panels: 0, error_estimate: f64::INFINITY });
    }
    Ok(TAU * mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_circle;
    use core::f64::consts::PI;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn random_spec(rng: &mut ChaCha8Rng) -> InnerSpec {
        let zeros = (0..rng.gen_range(0..4))
            .map(|_| UnitDiscPoint::from_polar(rng.gen_range(0.05..0.95), rng.gen::<f64>() * TAU).unwrap())
            .collect();
        let atoms = (0..rng.gen_range(0..3))
            .map(|j| Atom { lambda: CirclePoint::new(j as f64 * 2.0 + rng.gen::<f64>()), mass: rng.gen_range(0.1..2.0) })
            .collect();
        InnerSpec::new(zeros, rng.gen_range(0..2), AtomicMeasure::new(atoms).unwrap())
    }

    #[test]
    fn measure_validation() {
        assert!(AtomicMeasure::single(0.0, 0.0).is_err());
        assert!(AtomicMeasure::new(alloc::vec![
            Atom { lambda: CirclePoint::new(1.0), mass: 1.0 },
            Atom { lambda: CirclePoint::new(1.0), mass: 2.0 }
        ])
        .is_err());
    }

    #[test]
    fn eval_examples() {
        let r = 0.4;
        let b = InnerSpec::blaschke(alloc::vec![UnitDiscPoint::real(r).unwrap()]);
        assert!((inner_eval(&b, &UnitDiscPoint::ORIGIN) - r).norm() < 1e-15);
        let s = InnerSpec::singular(AtomicMeasure::single(0.0, 0.7).unwrap());
        assert!((inner_eval(&s, &UnitDiscPoint::ORIGIN) - (-0.7f64).exp()).norm() < 1e-15);
        // zero at the origin folds into z^k
        let z = InnerSpec::blaschke(alloc::vec![UnitDiscPoint::ORIGIN]);
        assert_eq!(z.zero_order_at_origin(), 1);
        let p = UnitDiscPoint::new(0.3, 0.1).unwrap();
        assert!((inner_eval(&z, &p) - p.to_complex()).norm() < 1e-16);
    }

    #[test]
    fn bounded_by_one_and_vanishing_at_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let spec = random_spec(&mut rng);
            for _ in 0..100 {
                let z = UnitDiscPoint::from_polar(rng.gen::<f64>().sqrt() * 0.999, rng.gen::<f64>() * TAU).unwrap();
                assert!(inner_eval(&spec, &z).norm() <= 1.0 + 1e-15);
                let a = UnitDiscPoint::from_polar(0.5 * rng.gen::<f64>(), rng.gen::<f64>() * TAU).unwrap();
                assert!(frostman_shift_eval(&spec, &a, &z).norm() < 1.0 + 1e-15);
            }
            for z in spec.zeros() {
                assert!(inner_eval(&spec, z).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let spec = random_spec(&mut rng);
            let z = UnitDiscPoint::from_polar(0.6 * rng.gen::<f64>(), rng.gen::<f64>() * TAU).unwrap();
            let h = 1e-6;
            let zp = UnitDiscPoint::try_from_complex(z.to_complex() + h).unwrap();
            let zm = UnitDiscPoint::try_from_complex(z.to_complex() - h).unwrap();
            let fd = (inner_eval(&spec, &zp) - inner_eval(&spec, &zm)) / (2.0 * h);
            let d = inner_deriv(&spec, &z);
            assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0));
        }
    }

    #[test]
    fn frostman_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let spec = random_spec(&mut rng);
        let z = UnitDiscPoint::new(0.2, -0.3).unwrap();
        assert_eq!(frostman_shift_eval(&spec, &UnitDiscPoint::ORIGIN, &z), inner_eval(&spec, &z));
        let a = 0.8;
        let a0 = 0.3;
        let s = InnerSpec::singular(AtomicMeasure::single(0.0, a).unwrap());
        let v = frostman_shift_eval(&s, &UnitDiscPoint::real(a0).unwrap(), &UnitDiscPoint::ORIGIN);
        let e = (-a).exp();
        assert!((v.re - (e - a0) / (1.0 - a0 * e)).abs() < 1e-15);
    }

    #[test]
    fn local_dirichlet_examples() {
        let z = InnerSpec::new(alloc::vec![], 1, AtomicMeasure::default());
        assert_eq!(local_dirichlet(&z, &CirclePoint::new(2.0)), 1.0);
        let a = 0.3;
        let s = InnerSpec::singular(AtomicMeasure::single(0.5, a).unwrap());
        let zeta = CirclePoint::new(2.0);
        let d = zeta.chord(&CirclePoint::new(0.5));
        assert!((local_dirichlet(&s, &zeta) - 2.0 * a / (d * d)).abs() < 1e-15);
        assert!(local_dirichlet(&s, &CirclePoint::new(0.5)).is_infinite());
        // additivity
        let b = UnitDiscPoint::new(0.1, 0.6).unwrap();
        let both = InnerSpec::new(alloc::vec![b], 1, AtomicMeasure::single(0.5, a).unwrap());
        let parts = local_dirichlet(&InnerSpec::blaschke(alloc::vec![b]), &zeta) + local_dirichlet(&z, &zeta) + local_dirichlet(&s, &zeta);
        assert!((local_dirichlet(&both, &zeta) - parts).abs() < 1e-14 * parts);
    }

    #[test]
    fn carleson_examples() {
        let z = InnerSpec::new(alloc::vec![], 1, AtomicMeasure::default());
        let v = carleson_norm_sq(&z, |_| Complex64::new(1.0, 0.0), 1.0, &quad()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let s = InnerSpec::singular(AtomicMeasure::single(0.0, 0.5).unwrap());
        let v = carleson_norm_sq(&s, |_| Complex64::new(1.0, 0.0), 1.0, &quad()).unwrap();
        assert!(v.is_infinite());
        // f = 1 − z has Dirichlet norm 1 + 2 = 3; boundary term is 2a
        let a = 0.5;
        let s = InnerSpec::singular(AtomicMeasure::single(0.0, a).unwrap());
        let v = carleson_norm_sq(&s, |zeta| Complex64::new(1.0, 0.0) - zeta.to_complex(), 3.0, &quad()).unwrap();
        assert!((v - (3.0 + 2.0 * a)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn carleson_for_blaschke_factor_times_one() {
        // ‖B‖²_D for a single Blaschke factor equals 1 + (1 − |w|²)/(1 − |w|²)·... = 2:
        // the boundary mean of the Poisson kernel is one, plus ‖1‖² = 1.
        let w = UnitDiscPoint::new(0.5, 0.6).unwrap();
        let b = InnerSpec::blaschke(alloc::vec![w]);
        let v = carleson_norm_sq(&b, |_| Complex64::new(1.0, 0.0), 1.0, &quad()).unwrap();
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn poisson_examples() {
        let w = UnitDiscPoint::new(0.3, -0.7).unwrap();
        assert!((poisson_integral(|_| 1.0, &w, &quad()).unwrap() - 1.0).abs() < 1e-12);
        let v = poisson_integral(|z| (Complex64::new(1.0, 0.0) - z.to_complex()).norm_sqr(), &UnitDiscPoint::ORIGIN, &quad()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        // harmonic extension of Re ζ² is Re w²
        let v = poisson_integral(|z| (z.to_complex() * z.to_complex()).re, &w, &quad()).unwrap();
        assert!((v - (w.to_complex() * w.to_complex()).re).abs() < 1e-12);
    }

    #[test]
    fn poisson_sup_examples() {
        assert_eq!(poisson_sup_ratio(&CirclePoint::new(1.3), &UnitDiscPoint::ORIGIN), 2.0);
        let r = 0.6;
        let v = poisson_sup_ratio(&CirclePoint::one(), &UnitDiscPoint::real(r).unwrap());
        assert!((v - 2.0 / (1.0 + r)).abs() < 1e-15);
        let lambda = CirclePoint::new(0.4);
        let z = UnitDiscPoint::new(0.5, 0.4).unwrap();
        let formula = poisson_sup_ratio(&lambda, &z);
        let n = 10_000;
        let mut best: f64 = 0.0;
        for k in 0..n {
            let zeta = CirclePoint::new(TAU * k as f64 / n as f64);
            best = best.max(zeta.chord(&lambda) / zeta.distance_to(&z));
        }
        assert!(best <= formula + 1e-12);
        assert!(formula - best < 1e-4);
    }

    #[test]
    fn v_mu_examples() {
        let mu = AtomicMeasure::single(0.0, 1.0).unwrap();
        assert!((v_mu(&mu, &CirclePoint::new(PI)) - 0.25).abs() < 1e-15);
        assert!(v_mu(&mu, &CirclePoint::one()).is_infinite());
        for a in [1e-3, 0.5, 5.0] {
            let mu = AtomicMeasure::single(1.0, a).unwrap();
            let coarse = log_plus_v_integral(&mu, &quad().with_tolerances(1e-8, 1e-8)).unwrap();
            let fine = log_plus_v_integral(&mu, &quad().with_tolerances(1e-11, 1e-11)).unwrap();
            assert!(coarse.is_finite() && coarse > 0.0);
            assert!((coarse - fine).abs() < 1e-7 * fine.max(1.0), "{a}: {coarse} {fine}");
        }
    }

    #[test]
    fn circle_mean_without_atoms_matches_trapezoid() {
        let f = |z: CirclePoint| 1.0 / (1.2 - z.to_complex().re);
        let a = circle_mean_with_atoms(f, &AtomicMeasure::default(), &[0.0], &quad()).unwrap();
        let b = integrate_circle(f, 512);
        assert!((a - b).abs() < 1e-11);
    }
}
