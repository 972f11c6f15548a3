//! The two-point problem for the kernel `K_a(z,w) = 1/(1 − a z w̄ − (1−a)(z w̄)²)`.
//!
//! `γ_a(t)` is the extremal value for the zero set `{−r, t}`. For `a = 0` every
//! function in the space is even, so `γ_0(t) = r²t²` for `t ≠ r` and jumps to
//! `r²` at `t = r`. For small `a > 0` the curve still dips just right of `r`:
//! moving a zero toward the circle can lower `γ`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gramian::{gamma_extremal, ConstraintSet};
use crate::kernels::{DiagonalKernel, UnitDiscPoint};

/// Parameters of the explicit curve in [`figure_formula`].
pub const FIGURE_A: f64 = 0.01;
pub const FIGURE_R: f64 = 0.5;

/// Smallest drop accepted by [`nonmonotonicity_witness`].
pub const WITNESS_MIN_DROP: f64 = 1e-6;

fn check_params(a: f64, r: f64, t: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::InvalidInput("a must lie in [0, 1)"));
    }
    if !(r > 0.0 && r < 1.0) || !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidInput("r and t must lie in (0, 1)"));
    }
    Ok(())
}

/// `γ_a(t)` from the Gramian of `K_a` at `{−r, t}`.
pub fn appendix_gamma(a: f64, r: f64, t: f64) -> Result<f64> {
    check_params(a, r, t)?;
    let kernel = DiagonalKernel::appendix_a(a)?;
    let zeros = [UnitDiscPoint::real(-r)?, UnitDiscPoint::real(t)?];
    Ok(gamma_extremal(&kernel, &ConstraintSet::zeros(&zeros)?)?.gamma)
}

/// `F(a) = 1 − (1−a)r⁴` and `G(a) = a r²`.
pub fn f_g(a: f64, r: f64) -> (f64, f64) {
    let r2 = r * r;
    (1.0 - (1.0 - a) * r2 * r2, a * r2)
}

/// `γ_a(r)` from `1 − γ_a(r)² = (F² − G²)/F`.
pub fn gamma_at_r_closed(a: f64, r: f64) -> Result<f64> {
    check_params(a, r, r)?;
    let (f, g) = f_g(a, r);
    let one_minus = (f * f - g * g) / f;
    Ok((1.0 - one_minus).max(0.0).sqrt())
}

/// Explicit curve for `a = 0.01`, `r = 0.5`:
/// `t·√(3881196t⁴ − 4038012t³ + 1089495t² − 40788t + 158812) / (40·√(39501t² − 39600t + 10300))`.
pub fn figure_formula(t: f64) -> Result<f64> {
    let num = (((3_881_196.0 * t - 4_038_012.0) * t + 1_089_495.0) * t - 40_788.0) * t + 158_812.0;
    let den = (39_501.0 * t - 39_600.0) * t + 10_300.0;
    if num < 0.0 || den <= 0.0 {
        return Err(Error::Domain("figure formula radicand is negative"));
    }
    Ok(t * num.sqrt() / (40.0 * den.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixCurve {
    pub a: f64,
    pub r: f64,
    /// `(t, γ_a(t))`.
    pub samples: Vec<(f64, f64)>,
}

impl AppendixCurve {
    pub fn sample(a: f64, r: f64, ts: &[f64]) -> Result<Self> {
        let samples = ts.iter().map(|&t| Ok((t, appendix_gamma(a, r, t)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { a, r, samples })
    }

    /// `n` equispaced nodes on `[lo, hi]`.
    pub fn grid(a: f64, r: f64, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(lo < hi) {
            return Err(Error::InvalidInput("need n >= 2 and lo < hi"));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let ts: Vec<f64> = (0..n).map(|k| if k + 1 == n { hi } else { lo + h * k as f64 }).collect();
        Self::sample(a, r, &ts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityWitness {
    pub t1: f64,
    pub t2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl MonotonicityWitness {
    pub fn drop(&self) -> f64 {
        self.gamma1 - self.gamma2
    }
}

const SCAN_NODES: usize = 400;

fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> Result<(f64, f64)> {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Finds `t1 < t2` with `γ_a(t1) > γ_a(t2) + 1e-6`.
///
/// A scan over `(0, 1)` that includes `t = r` picks the largest drop after a
/// running maximum; both ends are then polished by golden-section search
/// inside their grid cells, keeping a polished value only if it widens the
/// drop.
pub fn nonmonotonicity_witness(a: f64, r: f64) -> Result<MonotonicityWitness> {
    check_params(a, r, r)?;
    let h = 1.0 / SCAN_NODES as f64;
    let mut ts: Vec<f64> = (1..SCAN_NODES).map(|k| k as f64 * h).collect();
    ts.push(r);
    ts.sort_by(|x, y| x.total_cmp(y));
    ts.dedup();
    let gs = ts.iter().map(|&t| appendix_gamma(a, r, t)).collect::<Result<Vec<_>>>()?;

    let mut best: Option<(usize, usize)> = None;
    let mut best_drop = 0.0;
    let mut arg_max = 0;
    for j in 1..ts.len() {
        if gs[j - 1] > gs[arg_max] {
            arg_max = j - 1;
        }
        let d = gs[arg_max] - gs[j];
        if d > best_drop {
            best_drop = d;
            best = Some((arg_max, j));
        }
    }
    let (i, j) = best.ok_or(Error::NotFound)?;
    let mut w = MonotonicityWitness { t1: ts[i], t2: ts[j], gamma1: gs[i], gamma2: gs[j] };

    let lo1 = if i > 0 { ts[i - 1] } else { 0.5 * ts[i] };
    let hi1 = ts[i + 1].min(w.t2);
    let (t1, g1) = golden(|t| appendix_gamma(a, r, t).map(|g| -g), lo1, hi1, 60)?;
    if -g1 > w.gamma1 && t1 < w.t2 {
        w.t1 = t1;
        w.gamma1 = -g1;
    }
    let lo2 = ts[j - 1].max(w.t1);
    let hi2 = if j + 1 < ts.len() { ts[j + 1] } else { 0.5 * (1.0 + ts[j]) };
    let (t2, g2) = golden(|t| appendix_gamma(a, r, t), lo2, hi2, 60)?;
    if g2 < w.gamma2 && t2 > w.t1 {
        w.t2 = t2;
        w.gamma2 = g2;
    }
    if w.drop() <= WITNESS_MIN_DROP {
        return Err(Error::NotFound);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gramian::gamma_two_point;

    #[test]
    fn even_kernel_values() {
        let r = 0.5;
        for t in [0.2, 0.7, 0.9] {
            assert!((appendix_gamma(0.0, r, t).unwrap() - r * r * t * t).abs() < 1e-12);
        }
        assert!((appendix_gamma(0.0, r, r).unwrap() - r * r).abs() < 1e-12);
    }

    #[test]
    fn even_kernel_matches_hardy_on_squares() {
        let hardy = DiagonalKernel::hardy();
        for (r, t) in [(0.5, 0.3), (0.4, 0.8), (0.7, 0.2)] {
            let h = gamma_two_point(
                &hardy,
                &UnitDiscPoint::real(r * r).unwrap(),
                &UnitDiscPoint::real(t * t).unwrap(),
            )
            .unwrap();
            assert!((appendix_gamma(0.0, r, t).unwrap() - h).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_at_r() {
        for (a, r) in [(0.01, 0.5), (0.1, 0.3), (0.5, 0.7)] {
            let g = appendix_gamma(a, r, r).unwrap();
            let (f, gg) = f_g(a, r);
            assert!(((1.0 - g * g) - (f * f - gg * gg) / f).abs() < 1e-12);
            assert!((g - gamma_at_r_closed(a, r).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn figure_formula_matches_gramian() {
        for t in [0.2, 0.5, 0.8] {
            let f = figure_formula(t).unwrap();
            assert!((f - appendix_gamma(FIGURE_A, FIGURE_R, t).unwrap()).abs() < 1e-9, "{t}");
        }
        assert_eq!(figure_formula(0.0).unwrap(), 0.0);
    }

    #[test]
    fn witness_for_small_a() {
        let w = nonmonotonicity_witness(0.01, 0.5).unwrap();
        assert!(w.t1 < w.t2 && (w.t1 - 0.5).abs() < 0.05, "{w:?}");
        assert!(w.drop() > 1e-4);
        let w0 = nonmonotonicity_witness(0.0, 0.5).unwrap();
        assert_eq!(w0.t1, 0.5);
        assert!((w0.gamma1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn witness_absent_for_large_a() {
        assert_eq!(nonmonotonicity_witness(0.9, 0.5), Err(Error::NotFound));
    }

    #[test]
    fn limit_as_a_vanishes() {
        let r = 0.5;
        for t in [0.3, 0.5, 0.7] {
            let g0 = appendix_gamma(0.0, r, t).unwrap();
            let errs: Vec<f64> =
                [1e-2, 1e-4, 1e-6].iter().map(|&a| (appendix_gamma(a, r, t).unwrap() - g0).abs()).collect();
            assert!(errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 1e-4, "{t}: {errs:?}");
        }
    }

    #[test]
    fn curve_in_unit_interval() {
        let c = AppendixCurve::grid(0.01, 0.5, 0.05, 0.95, 181).unwrap();
        assert_eq!(c.samples.len(), 181);
        assert!(c.samples.iter().all(|&(_, g)| (0.0..=1.0).contains(&g)));
    }
}
