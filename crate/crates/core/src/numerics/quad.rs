use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::gauss::GaussLegendre;
use crate::error::{Error, Result};
use crate::kernels::{CirclePoint, UnitDiscPoint};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    GaussLegendre,
    PeriodicTrapezoid,
}

/// Quadrature configuration. `max_panels` bounds adaptive refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::GaussLegendre,
            panels: 4,
            nodes_per_panel: 15,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_panels: 8192,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_nodes(mut self, nodes_per_panel: usize) -> Self {
        self.nodes_per_panel = nodes_per_panel;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 1 {
            return Err(Error::InvalidInput("quadrature needs at least one panel"));
        }
        if self.nodes_per_panel < 2 {
            return Err(Error::InvalidInput("quadrature needs at least two nodes per panel"));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive"));
        }
        if self.max_panels < self.panels {
            return Err(Error::InvalidInput("max_panels is below the initial panel count"));
        }
        Ok(())
    }

    fn tolerance(&self, total: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * total)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub panels_used: usize,
}

/// Outcome of an integral with endpoint singularities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradedIntegral<T> {
    Finite(IntegralResult<T>),
    Divergent,
}

impl<T: Copy> GradedIntegral<T> {
    pub fn finite(&self) -> Option<IntegralResult<T>> {
        match self {
            GradedIntegral::Finite(r) => Some(*r),
            GradedIntegral::Divergent => None,
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    left: T,
    right: T,
    err: f64,
    seq: usize,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // worst error first, then oldest panel first
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn gl_sum<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, gl: &GaussLegendre, a: f64, b: f64) -> Result<T> {
    let mut acc = T::zero();
    for (x, w) in gl.mapped(a, b) {
        let v = f(x);
        if !v.finite() {
            return Err(Error::NonFinite("integrand"));
        }
        acc = acc + v * w;
    }
    Ok(acc)
}

fn make_panel<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    whole: T,
    seq: usize,
) -> Result<Panel<T>> {
    let m = 0.5 * (a + b);
    let left = gl_sum(f, gl, a, m)?;
    let right = gl_sum(f, gl, m, b)?;
    let err = (whole - (left + right)).magnitude();
    Ok(Panel { a, b, left, right, err, seq })
}

/// Globally adaptive composite Gauss–Legendre over `[a, b]`.
///
/// Panels are bisected worst-first; a panel's error estimate is the
/// difference between its one-panel and two-half-panel values.
pub fn integrate_interval<T: QuadValue, F: FnMut(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("integration interval must satisfy a < b"));
    }
    match spec.method {
        QuadratureMethod::GaussLegendre => {
            let n = spec.panels;
            let breaks: Vec<f64> = (0..=n)
                .map(|i| if i == n { b } else { a + (b - a) * (i as f64) / (n as f64) })
                .collect();
            integrate_breakpoints(f, &breaks, spec)
        }
        QuadratureMethod::PeriodicTrapezoid => trapezoid_doubling(f, a, b, spec),
    }
}

/// Adaptive Gauss–Legendre starting from the panels delimited by `breaks`.
pub fn integrate_breakpoints<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("breakpoints must be strictly increasing"));
    }
    let gl = GaussLegendre::new(spec.nodes_per_panel);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<T>> = Vec::new();
    let mut seq = 0usize;
    let mut total = T::zero();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let whole = gl_sum(&mut f, &gl, w[0], w[1])?;
        let p = make_panel(&mut f, &gl, w[0], w[1], whole, seq)?;
        seq += 1;
        total = total + p.left + p.right;
        total_err += p.err;
        heap.push(p);
    }
    let mut count = heap.len();
    let mut iter = 0usize;
    while total_err > spec.tolerance(total.magnitude()) {
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergence { panels: count, error_estimate: total_err });
        };
        let m = 0.5 * (worst.a + worst.b);
        if !(worst.a < m && m < worst.b) {
            frozen.push(worst);
            continue;
        }
        if count + 1 > spec.max_panels {
            return Err(Error::NonConvergence { panels: count, error_estimate: total_err });
        }
        let l = make_panel(&mut f, &gl, worst.a, m, worst.left, seq)?;
        let r = make_panel(&mut f, &gl, m, worst.b, worst.right, seq + 1)?;
        seq += 2;
        count += 1;
        total = total - (worst.left + worst.right) + l.left + l.right + r.left + r.right;
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
        iter += 1;
        if iter.is_multiple_of(128) {
            let (t, e) = resum(heap.iter().chain(frozen.iter()));
            total = t;
            total_err = e;
        }
    }
    let mut all: Vec<Panel<T>> = heap.into_vec();
    all.append(&mut frozen);
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (value, error_estimate) = resum(all.iter());
    Ok(IntegralResult { value, error_estimate, panels_used: all.len() })
}

fn resum<'a, T: QuadValue + 'a>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, f64) {
    let mut v = T::zero();
    let mut e = 0.0;
    for p in panels {
        v = v + p.left + p.right;
        e += p.err;
    }
    (v, e)
}

fn trapezoid_doubling<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    let mut n = spec.panels * spec.nodes_per_panel;
    let limit = spec.max_panels * spec.nodes_per_panel;
    let mut eval = |n: usize| -> Result<T> {
        let h = (b - a) / n as f64;
        let mut acc = (f(a) + f(b)) * 0.5;
        for k in 1..n {
            acc = acc + f(a + h * k as f64);
        }
        if !acc.finite() {
            return Err(Error::NonFinite("integrand"));
        }
        Ok(acc * h)
    };
    let mut prev = eval(n)?;
    loop {
        let next_n = 2 * n;
        if next_n > limit {
            return Err(Error::NonConvergence { panels: n, error_estimate: f64::INFINITY });
        }
        let next = eval(next_n)?;
        let err = (next - prev).magnitude();
        n = next_n;
        if err <= spec.tolerance(next.magnitude()) {
            return Ok(IntegralResult { value: next, error_estimate: err, panels_used: n });
        }
        prev = next;
    }
}

const GRADED_MAX_LEVELS: usize = 400;
const DIVERGENCE_RATIO: f64 = 0.97;
const DIVERGENCE_RUN: usize = 8;

/// Integral over `[a, b]` with possible non-integrable or integrable
/// singularities at the flagged endpoints.
///
/// Each singular end is approached through dyadic panels. If the per-level
/// contributions stop shrinking (ratio ≥ 0.97 for eight consecutive levels)
/// the integral is reported as divergent; once they fall below tolerance the
/// geometric tail is added to the error estimate.
pub fn integrate_graded<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    left_singular: bool,
    right_singular: bool,
    spec: &QuadratureSpec,
) -> Result<GradedIntegral<T>> {
    spec.validate()?;
    if !(a < b) {
        return Err(Error::InvalidInput("integration interval must satisfy a < b"));
    }
    if !left_singular && !right_singular {
        return integrate_interval(f, a, b, spec).map(GradedIntegral::Finite);
    }
    let split = if left_singular && right_singular { 0.5 * (a + b) } else if left_singular { b } else { a };
    let mut value = T::zero();
    let mut err = 0.0;
    let mut panels = 0;
    if left_singular {
        match graded_side(&mut f, a, split, 1.0, spec)? {
            GradedIntegral::Finite(r) => {
                value = value + r.value;
                err += r.error_estimate;
                panels += r.panels_used;
            }
            GradedIntegral::Divergent => return Ok(GradedIntegral::Divergent),
        }
    }
    if right_singular {
        match graded_side(&mut f, b, split, -1.0, spec)? {
            GradedIntegral::Finite(r) => {
                value = value + r.value;
                err += r.error_estimate;
                panels += r.panels_used;
            }
            GradedIntegral::Divergent => return Ok(GradedIntegral::Divergent),
        }
    }
    Ok(GradedIntegral::Finite(IntegralResult { value, error_estimate: err, panels_used: panels }))
}

/// Integrates from the regular point `far` toward the singular point `sing`.
/// `dir` is +1 if `sing < far`.
fn graded_side<T: QuadValue, F: FnMut(f64) -> T>(
    f: &mut F,
    sing: f64,
    far: f64,
    dir: f64,
    spec: &QuadratureSpec,
) -> Result<GradedIntegral<T>> {
    let len = (far - sing).abs();
    let mut value = T::zero();
    let mut err = 0.0;
    let mut panels = 0;
    let mut prev_mag = f64::NAN;
    let mut growth_run = 0usize;
    let mut width = len;
    let mut last_ratio = 1.0;
    let mut last_value = T::zero();
    // integrands may vanish identically away from the singular point
    let mut seen_nonzero = false;
    for level in 0..GRADED_MAX_LEVELS {
        let inner = width * 0.5;
        let p_near = sing + dir * inner;
        let p_far = sing + dir * width;
        // below a few hundred ulps of `sing` the abscissae are too coarse to resolve
        if p_near == sing || p_near == p_far || inner < 256.0 * f64::EPSILON * sing.abs() {
            // resolution exhausted: the remaining sliver is below one ulp
            if growth_run >= DIVERGENCE_RUN / 2 {
                return Ok(GradedIntegral::Divergent);
            }
            // geometric extrapolation of the unresolved sliver
            let tail = if last_ratio < 1.0 { prev_mag * last_ratio / (1.0 - last_ratio) } else { prev_mag };
            let tail_value = if last_ratio < 1.0 { last_value * (last_ratio / (1.0 - last_ratio)) } else { T::zero() };
            return Ok(GradedIntegral::Finite(IntegralResult {
                value: value + tail_value,
                error_estimate: err + 0.1 * tail,
                panels_used: panels,
            }));
        }
        let (lo, hi) = if dir > 0.0 { (p_near, p_far) } else { (p_far, p_near) };
        let level_spec = QuadratureSpec { panels: 1, ..*spec };
        let r = integrate_interval(&mut *f, lo, hi, &level_spec)?;
        value = value + r.value;
        err += r.error_estimate;
        panels += r.panels_used;
        let mag = r.value.magnitude();
        let first_nonzero = !seen_nonzero && mag > 0.0;
        seen_nonzero |= mag > 0.0;
        if level > 0 && seen_nonzero && !first_nonzero {
            if mag >= DIVERGENCE_RATIO * prev_mag && mag > 0.0 {
                growth_run += 1;
                if growth_run >= DIVERGENCE_RUN {
                    return Ok(GradedIntegral::Divergent);
                }
            } else {
                growth_run = 0;
            }
            let ratio = if prev_mag > 0.0 { mag / prev_mag } else { 0.0 };
            last_ratio = ratio;
            if level >= 4 && ratio < 0.9 && mag <= 0.1 * spec.tolerance(value.magnitude()) {
                let tail = mag * ratio / (1.0 - ratio);
                return Ok(GradedIntegral::Finite(IntegralResult {
                    value,
                    error_estimate: err + tail,
                    panels_used: panels,
                }));
            }
        }
        prev_mag = mag;
        last_value = r.value;
        width = inner;
    }
    if !seen_nonzero {
        return Ok(GradedIntegral::Finite(IntegralResult { value, error_estimate: err, panels_used: panels }));
    }
    Err(Error::NonConvergence { panels, error_estimate: prev_mag })
}

/// Periodic trapezoid value of `(1/2π) ∫ F(e^{iθ}) dθ` on `n_nodes` equispaced angles.
pub fn integrate_circle<F: FnMut(CirclePoint) -> f64>(f: F, n_nodes: usize) -> f64 {
    integrate_circle_offset(f, n_nodes, 0.0)
}

/// As [`integrate_circle`] with nodes at `offset + 2πk/n`.
pub fn integrate_circle_offset<F: FnMut(CirclePoint) -> f64>(mut f: F, n_nodes: usize, offset: f64) -> f64 {
    let n = n_nodes.max(1);
    let h = TAU / n as f64;
    let mut acc = super::CompensatedSum::new();
    for k in 0..n {
        acc.add(f(CirclePoint::new(offset + h * k as f64)));
    }
    acc.value() / n as f64
}

/// Tensor-product value of `∫_D g dA` with `A(D) = 1`.
///
/// Radial direction: composite Gauss–Legendre on panels graded dyadically
/// toward `|z| = 1`. Angular direction: periodic trapezoid.
pub fn integrate_disc<F: FnMut(UnitDiscPoint) -> f64>(
    mut g: F,
    radial_nodes: usize,
    angular_nodes: usize,
) -> Result<f64> {
    if radial_nodes < 16 || angular_nodes < 16 {
        return Err(Error::InvalidInput("disc quadrature needs at least 16 nodes per direction"));
    }
    // dyadic levels stop well before 1 - 2^{-j} rounds to 1
    let panels = (radial_nodes / 16).clamp(1, 40);
    let per_panel = radial_nodes / panels;
    let gl = GaussLegendre::new(per_panel);
    let mut breaks = Vec::with_capacity(panels + 1);
    breaks.push(0.0);
    for j in 1..panels {
        breaks.push(1.0 - libm::ldexp(1.0, -(j as i32)));
    }
    breaks.push(1.0);
    let h = TAU / angular_nodes as f64;
    let mut total = super::CompensatedSum::new();
    for w in breaks.windows(2) {
        for (r, wr) in gl.mapped(w[0], w[1]) {
            let mut ring = super::CompensatedSum::new();
            for k in 0..angular_nodes {
                let z = UnitDiscPoint::from_polar(r, h * k as f64)?;
                let v = g(z);
                if !v.is_finite() {
                    return Err(Error::NonFinite("disc integrand"));
                }
                ring.add(v);
            }
            total.add(wr * 2.0 * r * ring.value() / angular_nodes as f64);
        }
    }
    Ok(total.value())
}

const VERTEX_LEVELS: i32 = 36;

/// A quadrature node of [`integrate_disc_at_vertex`], with the quantities that
/// lose precision when recomputed from `z` near the vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexSample {
    pub point: UnitDiscPoint,
    /// `λ − z`, exact in the vertex coordinates.
    pub offset: Complex64,
    /// `1 − |z|²`, exact in the vertex coordinates.
    pub depth: f64,
}

/// `∫_D g dA` (normalized area) for integrands concentrated at a boundary
/// point `λ`.
///
/// Uses polar coordinates centred at the vertex, `z = λ(1 - ρ e^{iψ})` with
/// `|ψ| < π/2` and `0 < ρ < 2 cos ψ`, and iterated adaptive Gauss–Legendre
/// with dyadic grading toward `ρ = 0` and `ψ = ±π/2`.
pub fn integrate_disc_at_vertex<F: FnMut(&VertexSample) -> f64>(
    mut g: F,
    vertex: CirclePoint,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<f64>> {
    spec.validate()?;
    let lambda = vertex.to_complex();
    let mut outer_breaks = Vec::with_capacity(2 * VERTEX_LEVELS as usize + 2);
    outer_breaks.push(-FRAC_PI_2);
    for j in (1..VERTEX_LEVELS).rev() {
        outer_breaks.push(-FRAC_PI_2 * (1.0 - libm::ldexp(1.0, -j)));
    }
    outer_breaks.push(0.0);
    for j in 1..VERTEX_LEVELS {
        outer_breaks.push(FRAC_PI_2 * (1.0 - libm::ldexp(1.0, -j)));
    }
    outer_breaks.push(FRAC_PI_2);
    let mut inner_err: f64 = 0.0;
    let mut failure: Option<Error> = None;
    // inner errors act as noise for the outer rule, so resolve them more tightly
    let inner_spec = spec.with_tolerances((spec.abs_tol * 1e-3).max(1e-300), (spec.rel_tol * 1e-3).max(1e-15));
    let outer = integrate_breakpoints(
        |psi: f64| {
            if failure.is_some() {
                return 0.0;
            }
            let c = psi.cos();
            let reach = 2.0 * c;
            if !(reach > 0.0) {
                return 0.0;
            }
            let dir = Complex64::new(psi.cos(), psi.sin());
            let mut breaks = Vec::with_capacity(VERTEX_LEVELS as usize + 2);
            breaks.push(0.0);
            for j in (1..VERTEX_LEVELS).rev() {
                breaks.push(reach * libm::ldexp(1.0, -j));
            }
            breaks.push(reach);
            let inner = integrate_breakpoints(
                |rho: f64| {
                    let offset = lambda * dir * rho;
                    let depth = rho * (reach - rho);
                    if !(depth > 0.0) {
                        return 0.0;
                    }
                    match UnitDiscPoint::try_from_complex(lambda - offset) {
                        Ok(point) => g(&VertexSample { point, offset, depth }) * rho,
                        Err(_) => 0.0,
                    }
                },
                &breaks,
                &inner_spec,
            );
            match inner {
                Ok(r) => {
                    inner_err = inner_err.max(r.error_estimate);
                    r.value / PI
                }
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &outer_breaks,
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let mut r = outer?;
    r.error_estimate += inner_err;
    Ok(r)
}
