//! Zero-set certificates: Stolz-angle cluster decompositions, the push-out
//! refinement of cluster weights, condition sums, Carleson-set diagnostics and
//! the push-out comparison of extremal values.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gramian::{extremal_eval, gamma_extremal, ConstraintSet};
use crate::inner::{circle_mean_with_atoms, poisson_integral, Atom, AtomicMeasure};
use crate::kernels::{CirclePoint, DiagonalKernel, UnitDiscPoint};
use crate::numerics::{CompensatedSum, QuadratureSpec};

/// `Ω_K(λ) = {z : |λ − z| ≤ K(1 − |z|)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StolzAngle {
    vertex: CirclePoint,
    aperture: f64,
}

impl StolzAngle {
    pub fn new(vertex: CirclePoint, aperture: f64) -> Result<Self> {
        if !(aperture > 1.0) || !aperture.is_finite() {
            return Err(Error::InvalidInput("Stolz aperture must exceed 1"));
        }
        Ok(Self { vertex, aperture })
    }

    pub fn vertex(&self) -> CirclePoint {
        self.vertex
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }
}

pub fn stolz_contains(angle: &StolzAngle, z: &UnitDiscPoint) -> bool {
    angle.vertex.distance_to(z) <= angle.aperture * (1.0 - z.norm())
}

/// `2 Σ |λ − z|² / (1 − |z|²)`.
pub fn cluster_weight(points: &[UnitDiscPoint], vertex: &CirclePoint) -> f64 {
    let mut acc = CompensatedSum::new();
    for z in points {
        let d = vertex.distance_to(z);
        acc.add(2.0 * d * d / one_minus_abs_sq(z));
    }
    acc.value()
}

fn one_minus_abs_sq(z: &UnitDiscPoint) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `1/ln(1 + 1/a)`, zero at `a = 0`.
pub fn condition_term(a: f64) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    1.0 / (1.0 / a).ln_1p()
}

/// `g(r) = |1 − r e^{it}|² / (1 − r²)`.
pub fn g_value(r: f64, t: f64) -> f64 {
    let d = Complex64::new(1.0, 0.0) - Complex64::from_polar(r, t);
    d.norm_sqr() / ((1.0 - r) * (1.0 + r))
}

/// Minimiser and minimum of `g` over `r ∈ [0, 1)`: `r* = cos t/(1 + |sin t|)`
/// and `g(r*) = |sin t|` for `|t| < π/2`; otherwise `g` is minimal at `r = 0`
/// with value 1.
pub fn min_g(t: f64) -> (f64, f64) {
    let t = wrap_angle(t);
    if t.abs() < FRAC_PI_2 {
        let s = t.sin().abs();
        (t.cos() / (1.0 + s), s)
    } else {
        (0.0, 1.0)
    }
}

fn wrap_angle(t: f64) -> f64 {
    let w = t - TAU * ((t + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Refined weight `Σ_{n∉M} 2 g(|z_n|) + Σ_{n∈M} 2|sin t_n|` after rotating
/// the vertex to 1, where `M` collects points beyond the minimiser of `g`.
pub fn pushout_weights(points: &[UnitDiscPoint], vertex: &CirclePoint) -> f64 {
    let rot = vertex.to_complex().conj();
    let mut acc = CompensatedSum::new();
    for z in points {
        let w = z.to_complex() * rot;
        let r = z.norm();
        let t = w.im.atan2(w.re);
        let in_m = t.abs() < FRAC_PI_2 && r > t.cos() / (1.0 + t.sin().abs());
        if in_m {
            acc.add(2.0 * t.sin().abs());
        } else {
            let d = vertex.distance_to(z);
            acc.add(2.0 * d * d / one_minus_abs_sq(z));
        }
    }
    acc.value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub points: Vec<UnitDiscPoint>,
    pub vertex: CirclePoint,
}

/// Points grouped into clusters, each with a boundary vertex `λ_k` and weight
/// `a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterDecomposition {
    clusters: Vec<Cluster>,
    weights: Vec<f64>,
    condition_sum: f64,
}

impl ClusterDecomposition {
    pub fn new(clusters: Vec<Cluster>) -> Self {
        let weights: Vec<f64> = clusters.iter().map(|c| cluster_weight(&c.points, &c.vertex)).collect();
        let mut acc = CompensatedSum::new();
        for &a in &weights {
            acc.add(condition_term(a));
        }
        Self { clusters, weights, condition_sum: acc.value() }
    }

    /// Every point in its own cluster, with the vertex at its radial projection.
    pub fn singletons(points: &[UnitDiscPoint]) -> Self {
        Self::new(points.iter().map(|z| Cluster { points: alloc::vec![*z], vertex: z.direction() }).collect())
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn condition_sum(&self) -> f64 {
        self.condition_sum
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.clusters.iter().map(|c| c.points.len()).sum()
    }

    /// True when the clusters hold exactly the multiset `points` (bitwise).
    pub fn partitions(&self, points: &[UnitDiscPoint]) -> bool {
        let key = |z: &UnitDiscPoint| (z.re().to_bits(), z.im().to_bits());
        let mut a: Vec<(u64, u64)> = points.iter().map(key).collect();
        let mut b: Vec<(u64, u64)> = self.clusters.iter().flat_map(|c| c.points.iter().map(key)).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport {
    /// `max_ζ (Σ_z (1−|z|²)/|ζ−z|² − Σ_k 2a_k/|ζ−λ_k|²)` over the grid.
    pub max_violation: f64,
    /// Largest right-hand side seen on the grid.
    pub scale: f64,
    pub n_grid: usize,
}

impl DominationReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.max_violation <= rel_tol * self.scale
    }
}

/// Grid check of `Σ_{z} (1−|z|²)/|ζ−z|² ≤ Σ_k 2a_k/|ζ−λ_k|²`.
///
/// Nodes are `θ_0 + (j + ½)·2π/n` with `θ_0` the first vertex angle; a node
/// that lands exactly on another vertex is skipped (the right side is `+∞`).
pub fn domination_check(decomp: &ClusterDecomposition, n_grid: usize) -> DominationReport {
    let n = n_grid.max(1);
    if decomp.is_empty() {
        return DominationReport { max_violation: 0.0, scale: 0.0, n_grid: n };
    }
    let theta0 = decomp.clusters[0].vertex.theta();
    let h = TAU / n as f64;
    let mut max_violation = f64::NEG_INFINITY;
    let mut scale: f64 = 0.0;
    for j in 0..n {
        let zeta = CirclePoint::new(theta0 + (j as f64 + 0.5) * h);
        let mut rhs = CompensatedSum::new();
        let mut on_vertex = false;
        for (c, &a) in decomp.clusters.iter().zip(&decomp.weights) {
            let d = zeta.chord(&c.vertex);
            if d == 0.0 {
                on_vertex = true;
                break;
            }
            rhs.add(2.0 * a / (d * d));
        }
        if on_vertex {
            continue;
        }
        let mut lhs = CompensatedSum::new();
        for c in &decomp.clusters {
            for z in &c.points {
                let d = zeta.distance_to(z);
                lhs.add(one_minus_abs_sq(z) / (d * d));
            }
        }
        let rhs = rhs.value();
        scale = scale.max(rhs);
        max_violation = max_violation.max(lhs.value() - rhs);
    }
    if max_violation == f64::NEG_INFINITY {
        max_violation = 0.0;
    }
    DominationReport { max_violation, scale, n_grid: n }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRow {
    pub vertex: CirclePoint,
    pub size: usize,
    pub weight: f64,
    pub term: f64,
    pub pushout_weight: f64,
    pub pushout_term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompCertificate {
    pub condition_sum: f64,
    pub pushout_condition_sum: f64,
    pub per_cluster: Vec<ClusterRow>,
    pub domination: DominationReport,
    pub dominated: bool,
}

/// Relative slack used by [`decomp_certificate`] for the domination flag.
pub const DOMINATION_REL_TOL: f64 = 1e-10;

pub fn decomp_certificate(decomp: &ClusterDecomposition, n_grid: usize) -> DecompCertificate {
    let mut per_cluster = Vec::with_capacity(decomp.len());
    let mut refined = CompensatedSum::new();
    for (c, &a) in decomp.clusters.iter().zip(&decomp.weights) {
        let pw = pushout_weights(&c.points, &c.vertex);
        let pt = condition_term(pw);
        refined.add(pt);
        per_cluster.push(ClusterRow {
            vertex: c.vertex,
            size: c.points.len(),
            weight: a,
            term: condition_term(a),
            pushout_weight: pw,
            pushout_term: pt,
        });
    }
    let domination = domination_check(decomp, n_grid);
    DecompCertificate {
        condition_sum: decomp.condition_sum,
        pushout_condition_sum: refined.value(),
        per_cluster,
        domination,
        dominated: domination.holds(DOMINATION_REL_TOL),
    }
}

fn mean_direction(points: &[UnitDiscPoint]) -> CirclePoint {
    let mut s = Complex64::new(0.0, 0.0);
    for z in points {
        s += z.direction().to_complex();
    }
    if s.norm() <= 1e-12 * points.len() as f64 {
        return points[0].direction();
    }
    CirclePoint::new(s.im.atan2(s.re))
}

/// Agglomerative clustering by boundary direction.
///
/// Starting from singletons, the two clusters with the closest mean
/// directions are merged repeatedly. Every level with at most `max_clusters`
/// clusters is scored, and so is the singleton level; the decomposition with
/// the smallest condition sum wins.
pub fn greedy_partition(points: &[UnitDiscPoint], max_clusters: usize) -> ClusterDecomposition {
    if points.is_empty() {
        return ClusterDecomposition::new(Vec::new());
    }
    let mut groups: Vec<Vec<UnitDiscPoint>> = points.iter().map(|z| alloc::vec![*z]).collect();
    let build = |groups: &[Vec<UnitDiscPoint>]| {
        ClusterDecomposition::new(
            groups.iter().map(|g| Cluster { points: g.clone(), vertex: mean_direction(g) }).collect(),
        )
    };
    let mut best = build(&groups);
    while groups.len() > 1 {
        let dirs: Vec<CirclePoint> = groups.iter().map(|g| mean_direction(g)).collect();
        let mut pair = (0, 1);
        let mut closest = f64::INFINITY;
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let d = dirs[i].chord(&dirs[j]);
                if d < closest {
                    closest = d;
                    pair = (i, j);
                }
            }
        }
        let merged = groups.remove(pair.1);
        groups[pair.0].extend(merged);
        if groups.len() <= max_clusters {
            let cand = build(&groups);
            if cand.condition_sum < best.condition_sum {
                best = cand;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSums {
    /// `Σ (1 − r_n)`, or `Σ a_n` for masses.
    pub linear_sum: f64,
    pub condition_sum: f64,
    pub partial_condition: Vec<f64>,
    pub terms: Vec<f64>,
}

fn accumulate(terms: Vec<f64>, linear: f64) -> SeriesSums {
    let mut acc = CompensatedSum::new();
    let mut partial = Vec::with_capacity(terms.len());
    for &t in &terms {
        acc.add(t);
        partial.push(acc.value());
    }
    SeriesSums { linear_sum: linear, condition_sum: acc.value(), partial_condition: partial, terms }
}

/// `Σ(1 − r_n)` and `Σ 1/ln(1/(1 − r_n))` for moduli `r_n ∈ (0, 1)`.
pub fn shapiro_shields_sums(moduli: &[f64]) -> Result<SeriesSums> {
    for &r in moduli {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidInput("moduli must lie in (0, 1)"));
        }
    }
    let gaps: Vec<f64> = moduli.iter().map(|r| 1.0 - r).collect();
    shapiro_shields_sums_from_gaps(&gaps)
}

/// As [`shapiro_shields_sums`] with `δ_n = 1 − r_n` given directly, so that
/// moduli closer to 1 than `f64` can hold are still representable.
pub fn shapiro_shields_sums_from_gaps(gaps: &[f64]) -> Result<SeriesSums> {
    for &d in gaps {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidInput("gaps 1 - r must lie in (0, 1)"));
        }
    }
    let logs: Vec<f64> = gaps.iter().map(|d| -d.ln()).collect();
    shapiro_shields_sums_from_log_gaps(&logs)
}

/// As [`shapiro_shields_sums`] with `L_n = ln(1/(1 − r_n)) > 0` given, for
/// sequences such as `1 − e^{−n²}` whose gaps underflow.
pub fn shapiro_shields_sums_from_log_gaps(logs: &[f64]) -> Result<SeriesSums> {
    let mut linear = CompensatedSum::new();
    let mut terms = Vec::with_capacity(logs.len());
    for &l in logs {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::InvalidInput("ln(1/(1 - r)) must be positive and finite"));
        }
        linear.add((-l).exp());
        terms.push(1.0 / l);
    }
    Ok(accumulate(terms, linear.value()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicSums {
    pub sums: SeriesSums,
    /// `Σ a_n^s` when an exponent was given.
    pub weighted_sum: Option<f64>,
}

/// `Σ 1/ln(1 + 1/a_n)` and optionally `Σ a_n^s`.
pub fn atomic_condition_sums(masses: &[f64], s: Option<f64>) -> Result<AtomicSums> {
    if let Some(s) = s {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidInput("s must lie in (0, 1)"));
        }
    }
    let mut linear = CompensatedSum::new();
    let mut weighted = CompensatedSum::new();
    let mut terms = Vec::with_capacity(masses.len());
    for &a in masses {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput("masses must be positive and finite"));
        }
        linear.add(a);
        terms.push(condition_term(a));
        if let Some(s) = s {
            weighted.add(a.powf(s));
        }
    }
    Ok(AtomicSums { sums: accumulate(terms, linear.value()), weighted_sum: s.map(|_| weighted.value()) })
}

/// As [`atomic_condition_sums`] with `ℓ_n = ln(1/a_n)` given, so that masses
/// below the `f64` range keep their exact condition terms.
pub fn atomic_condition_sums_from_logs(log_inv_masses: &[f64], s: Option<f64>) -> Result<AtomicSums> {
    if let Some(s) = s {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidInput("s must lie in (0, 1)"));
        }
    }
    let mut linear = CompensatedSum::new();
    let mut weighted = CompensatedSum::new();
    let mut terms = Vec::with_capacity(log_inv_masses.len());
    for &l in log_inv_masses {
        if !l.is_finite() {
            return Err(Error::InvalidInput("ln(1/a) must be finite"));
        }
        linear.add((-l).exp());
        // ln(1 + e^ℓ) = max(ℓ, 0) + ln(1 + e^{-|ℓ|})
        terms.push(1.0 / (l.max(0.0) + (-l.abs()).exp().ln_1p()));
        if let Some(s) = s {
            weighted.add((-s * l).exp());
        }
    }
    Ok(AtomicSums { sums: accumulate(terms, linear.value()), weighted_sum: s.map(|_| weighted.value()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductCriterion {
    /// `Σ (1 − γ_n)`.
    pub defect_sum: f64,
    pub product: f64,
    /// `1 − Σ(1 − γ_n)` when positive; a lower bound for `Π γ_n`.
    pub product_lower_bound: Option<f64>,
    pub partial_defects: Vec<f64>,
}

pub fn infinite_product_criterion(gammas: &[f64]) -> Result<ProductCriterion> {
    let mut acc = CompensatedSum::new();
    let mut partial = Vec::with_capacity(gammas.len());
    let mut log_prod = 0.0;
    for &g in gammas {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::InvalidInput("gamma values must lie in (0, 1]"));
        }
        acc.add(1.0 - g);
        partial.push(acc.value());
        log_prod += g.ln();
    }
    let defect_sum = acc.value();
    let bound = 1.0 - defect_sum;
    Ok(ProductCriterion {
        defect_sum,
        product: log_prod.exp(),
        product_lower_bound: if bound > 0.0 { Some(bound) } else { None },
        partial_defects: partial,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// `ε_n = θ_n − θ_{n+1}`.
    pub gaps: Vec<f64>,
    /// `Σ ε_n ln(1/ε_n)`.
    pub raw: f64,
    /// `Σ (ε_n/2π) ln(2π/ε_n)`.
    pub normalized: f64,
}

fn entropy_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    for x in xs {
        acc.add(-x * x.ln());
    }
    acc.value()
}

/// Gap entropy of a strictly decreasing positive sequence of angles.
pub fn carleson_entropy(thetas: &[f64]) -> Result<EntropyReport> {
    for &t in thetas {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::MalformedSequence("angles must be positive and finite"));
        }
    }
    if thetas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::MalformedSequence("angles must be strictly decreasing"));
    }
    let gaps: Vec<f64> = thetas.windows(2).map(|w| w[0] - w[1]).collect();
    let raw = entropy_sum(gaps.iter().copied());
    let normalized = entropy_sum(gaps.iter().map(|e| e / TAU));
    Ok(EntropyReport { gaps, raw, normalized })
}

/// `∫ log(1/dist(ζ, E)) |dζ|` with chordal distance, integrated with dyadic
/// grading toward every point of `E`.
pub fn carleson_logdist_integral(set: &[CirclePoint], quad: &QuadratureSpec) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::InvalidInput("E must be nonempty"));
    }
    let atoms = set.iter().map(|p| Atom { lambda: *p, mass: 1.0 }).collect();
    let mu = AtomicMeasure::new(atoms)?;
    let mean = circle_mean_with_atoms(
        |zeta| {
            let d = set.iter().map(|p| zeta.chord(p)).fold(f64::INFINITY, f64::min);
            -d.ln()
        },
        &mu,
        &[],
        quad,
    )?;
    Ok(TAU * mean)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessWitness {
    /// Input after sorting into strictly decreasing order.
    pub thetas: Vec<f64>,
    /// `δ_n = (θ_n − θ_{n+1})/2π`.
    pub deltas: Vec<f64>,
    /// `w_n = (1 − δ_n) e^{iτ_n}`, `τ_n = θ_n/2π`.
    pub points: Vec<UnitDiscPoint>,
    /// Set when the input had to be reordered or contained repeats.
    pub reordered: bool,
    /// `|1 − w_n| ≤ 2τ_n ≤ |1 − e^{iθ_n}|` for every `n`.
    pub chain_holds: bool,
    /// `Σ δ_n ln(1/δ_n)`.
    pub delta_entropy: f64,
}

pub fn uniqueness_witness(thetas: &[f64]) -> Result<UniquenessWitness> {
    for &t in thetas {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::MalformedSequence("angles must lie in (0, 1)"));
        }
    }
    let mut sorted = thetas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.dedup();
    let reordered = sorted.as_slice() != thetas;
    if sorted.len() < 2 {
        return Err(Error::MalformedSequence("need at least two distinct angles"));
    }
    let mut deltas = Vec::with_capacity(sorted.len() - 1);
    let mut points = Vec::with_capacity(sorted.len() - 1);
    let mut chain_holds = true;
    for w in sorted.windows(2) {
        let delta = (w[0] - w[1]) / TAU;
        let tau = w[0] / TAU;
        let p = UnitDiscPoint::from_polar(1.0 - delta, tau)?;
        let lhs = (Complex64::new(1.0, 0.0) - p.to_complex()).norm();
        let chord = 2.0 * (0.5 * w[0]).sin();
        chain_holds &= lhs <= 2.0 * tau * (1.0 + 4.0 * f64::EPSILON) && 2.0 * tau <= chord;
        deltas.push(delta);
        points.push(p);
    }
    let delta_entropy = entropy_sum(deltas.iter().copied());
    Ok(UniquenessWitness { thetas: sorted, deltas, points, reordered, chain_holds, delta_entropy })
}

/// Slack for [`pushout_gamma_compare`].
pub const PUSHOUT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PushoutComparison {
    pub gamma_z: f64,
    pub gamma_w: f64,
    pub pushed: Vec<UnitDiscPoint>,
    /// `γ(W) ≥ γ(Z) − 1e-10`.
    pub ok: bool,
}

/// Compares `γ(Z)` with `γ(W)` for `W = {s_n e^{i arg z_n}}`.
pub fn pushout_gamma_compare(
    points: &[UnitDiscPoint],
    radii: &[f64],
    kernel: &DiagonalKernel,
) -> Result<PushoutComparison> {
    if points.len() != radii.len() {
        return Err(Error::InvalidInput("one radius per point is required"));
    }
    let mut pushed = Vec::with_capacity(points.len());
    for (z, &s) in points.iter().zip(radii) {
        if !(s >= z.norm() && s < 1.0) {
            return Err(Error::InvalidInput("radii must satisfy |z_n| <= s_n < 1"));
        }
        if z.norm_sqr() == 0.0 {
            return Err(Error::InvalidInput("points must be nonzero"));
        }
        pushed.push(UnitDiscPoint::from_polar(s, z.arg())?);
    }
    let gamma_z = gamma_extremal(kernel, &ConstraintSet::zeros(points)?)?.gamma;
    let gamma_w = gamma_extremal(kernel, &ConstraintSet::zeros(&pushed)?)?.gamma;
    Ok(PushoutComparison { gamma_z, gamma_w, pushed, ok: gamma_w >= gamma_z - PUSHOUT_TOL })
}

/// Slack for [`extremal_poisson_check`].
pub const POISSON_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonCheck {
    /// `P[|φ|²](s e^{it})`.
    pub lhs: f64,
    /// `P[|φ|²](r e^{it}) + (1 − r/s)`.
    pub rhs: f64,
    pub ok: bool,
}

/// Checks `P[|φ|²](s e^{it}) ≤ P[|φ|²](r e^{it}) + (1 − r/s)` for the
/// Dirichlet extremal function of the zero set `Z`.
pub fn extremal_poisson_check(
    points: &[UnitDiscPoint],
    r: f64,
    s: f64,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<PoissonCheck> {
    if !(r > 0.0 && r <= s && s < 1.0) {
        return Err(Error::InvalidInput("need 0 < r <= s < 1"));
    }
    let cert = gamma_extremal(&DiagonalKernel::dirichlet(), &ConstraintSet::zeros(points)?)?;
    let mut failure = None;
    let mut phi_sq = |zeta: CirclePoint| match extremal_eval(&cert, zeta) {
        Ok(v) => v.norm_sqr(),
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    let at_s = poisson_integral(&mut phi_sq, &UnitDiscPoint::from_polar(s, t)?, quad)?;
    let at_r = poisson_integral(&mut phi_sq, &UnitDiscPoint::from_polar(r, t)?, quad)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = at_r + (1.0 - r / s);
    Ok(PoissonCheck { lhs: at_s, rhs, ok: at_s <= rhs + POISSON_SLACK })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(r: f64, t: f64) -> UnitDiscPoint {
        UnitDiscPoint::from_polar(r, t).unwrap()
    }

    #[test]
    fn stolz_membership() {
        let ang = StolzAngle::new(CirclePoint::one(), 1.5).unwrap();
        assert!(stolz_contains(&ang, &UnitDiscPoint::ORIGIN));
        for r in [0.1, 0.5, 0.99, 0.999999] {
            assert!(stolz_contains(&ang, &p(r, 0.0)));
        }
        assert!(!stolz_contains(&ang, &UnitDiscPoint::new(0.0, 0.9).unwrap()));
        assert!(StolzAngle::new(CirclePoint::one(), 1.0).is_err());
    }

    #[test]
    fn weight_of_radial_point() {
        for r in [0.2, 0.7, 0.99] {
            let w = cluster_weight(&[p(r, 1.0)], &CirclePoint::new(1.0));
            assert!((w - 2.0 * (1.0 - r) / (1.0 + r)).abs() < 1e-14);
            assert!(w >= 1.0 - r - 1e-15 && w <= 3.0 * (1.0 - r));
        }
        assert_eq!(cluster_weight(&[], &CirclePoint::one()), 0.0);
    }

    #[test]
    fn weight_bounded_inside_stolz_angle() {
        let k: f64 = 3.0;
        let ang = StolzAngle::new(CirclePoint::one(), k).unwrap();
        let pts: Vec<_> =
            (1..40).map(|n| p(1.0 - 1.0 / (n * n) as f64, 1.0 / (n * n) as f64)).filter(|z| stolz_contains(&ang, z)).collect();
        assert!(pts.len() > 10);
        let w = cluster_weight(&pts, &CirclePoint::one());
        let bound: f64 = pts.iter().map(|z| 2.0 * k * k * (1.0 - z.norm())).sum();
        assert!(w <= bound);
    }

    #[test]
    fn min_g_matches_grid() {
        for t in [0.1, 0.5, 1.0] {
            let (rs, gmin) = min_g(t);
            assert!((g_value(rs, t) - gmin).abs() < 1e-14);
            let grid = (0..10_000).map(|k| g_value(k as f64 / 10_000.0, t)).fold(f64::INFINITY, f64::min);
            assert!(grid >= gmin - 1e-14 && grid - gmin < 1e-4, "{t}: {grid} vs {gmin}");
        }
        assert_eq!(min_g(2.0), (0.0, 1.0));
    }

    #[test]
    fn pushout_refinement_examples() {
        let z = p(0.9, core::f64::consts::FRAC_PI_4);
        let w = pushout_weights(&[z], &CirclePoint::one());
        assert!((w - 2.0 * core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        let radial = p(0.8, 0.3);
        let v = CirclePoint::new(0.3);
        assert!((pushout_weights(&[radial], &v) - cluster_weight(&[radial], &v)).abs() < 1e-15);
    }

    #[test]
    fn domination_single_point() {
        let d = ClusterDecomposition::singletons(&[p(0.6, 2.0)]);
        let rep = domination_check(&d, 4096);
        assert!(rep.holds(1e-10), "{rep:?}");
        let empty = domination_check(&ClusterDecomposition::new(vec![]), 64);
        assert_eq!(empty.max_violation, 0.0);
    }

    #[test]
    fn condition_sum_for_one_cluster() {
        let pts = [p(0.5, 0.0), p(0.9, 0.05), p(0.99, -0.003)];
        let d = ClusterDecomposition::new(vec![Cluster { points: pts.to_vec(), vertex: CirclePoint::one() }]);
        let a = cluster_weight(&pts, &CirclePoint::one());
        assert!((d.condition_sum() - 1.0 / (1.0 + 1.0 / a).ln()).abs() < 1e-15);
        assert!(d.partitions(&pts));
        let cert = decomp_certificate(&d, 1024);
        assert!(cert.dominated);
        assert!(cert.pushout_condition_sum <= cert.condition_sum + 1e-15);
        assert!(condition_term(1e-300) < 1e-2 && condition_term(0.0) == 0.0);
    }

    #[test]
    fn greedy_prefers_fewer_clusters_on_a_radius() {
        let pts: Vec<_> = (1..8).map(|n| p(1.0 - 0.5f64.powi(n), 0.7)).collect();
        let d = greedy_partition(&pts, 4);
        assert_eq!(d.len(), 1);
        assert!(d.partitions(&pts));
    }

    #[test]
    fn greedy_splits_antipodal_families() {
        let mut pts: Vec<_> = (1..6).map(|n| p(1.0 - 0.3f64.powi(n), 0.0)).collect();
        pts.extend((1..6).map(|n| p(1.0 - 0.3f64.powi(n), PI)));
        let d = greedy_partition(&pts, 4);
        assert_eq!(d.len(), 2);
        let one = ClusterDecomposition::new(vec![Cluster { points: pts.clone(), vertex: CirclePoint::one() }]);
        assert!(d.condition_sum() < one.condition_sum());
        assert!(d.condition_sum() <= ClusterDecomposition::singletons(&pts).condition_sum());
    }

    #[test]
    fn shapiro_shields_closed_terms() {
        let logs: Vec<f64> = (1..=50).map(|n| (n * n) as f64).collect();
        let s = shapiro_shields_sums_from_log_gaps(&logs).unwrap();
        let gaps: Vec<f64> = (1..=20).map(|n| (-((n * n) as f64)).exp()).collect();
        let g = shapiro_shields_sums_from_gaps(&gaps).unwrap();
        for (a, b) in g.terms.iter().zip(&s.terms) {
            assert!((a - b).abs() < 1e-15);
        }
        for (n, t) in s.terms.iter().enumerate() {
            let n = (n + 1) as f64;
            assert!((t - 1.0 / (n * n)).abs() < 1e-15);
        }
        let r = 0.75;
        let single = shapiro_shields_sums(&[r]).unwrap();
        assert!((single.condition_sum - 1.0 / (1.0 / (1.0 - r)).ln()).abs() < 1e-15);
        assert!(shapiro_shields_sums(&[1.0]).is_err());
    }

    #[test]
    fn atomic_sums() {
        let m: Vec<f64> = (1..=20).map(|n| 1.0 / (n * n) as f64).collect();
        let s = atomic_condition_sums(&m, Some(0.5)).unwrap();
        let h: f64 = (1..=20).map(|n| 1.0 / n as f64).sum();
        assert!((s.weighted_sum.unwrap() - h).abs() < 1e-13);
        let one = atomic_condition_sums(&[0.3], None).unwrap();
        assert!((one.sums.condition_sum - 1.0 / (1.0 + 1.0 / 0.3f64).ln()).abs() < 1e-15);
        assert!(one.weighted_sum.is_none());
        assert!(atomic_condition_sums(&[0.0], None).is_err());
        let logs: Vec<f64> = m.iter().map(|a| -a.ln()).collect();
        let l = atomic_condition_sums_from_logs(&logs, Some(0.5)).unwrap();
        for (a, b) in l.sums.terms.iter().zip(&s.sums.terms) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((l.weighted_sum.unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn product_bound() {
        let r = infinite_product_criterion(&[1.0, 1.0]).unwrap();
        assert_eq!(r.defect_sum, 0.0);
        let g = [0.9, 0.95, 0.99, 0.999];
        let r = infinite_product_criterion(&g).unwrap();
        assert!(r.product >= r.product_lower_bound.unwrap());
        assert!((r.product - g.iter().product::<f64>()).abs() < 1e-15);
        assert!(infinite_product_criterion(&[0.0]).is_err());
    }

    #[test]
    fn entropy_dyadic() {
        let th: Vec<f64> = (1..=40).map(|n| 0.5f64.powi(n)).collect();
        let e = carleson_entropy(&th).unwrap();
        let expect: f64 = (1..40).map(|n| 0.5f64.powi(n + 1) * (n + 1) as f64 * core::f64::consts::LN_2).sum();
        assert!((e.raw - expect).abs() < 1e-14);
        let two = carleson_entropy(&[0.5, 0.25]).unwrap();
        assert!((two.raw - 0.25 * 4f64.ln()).abs() < 1e-15);
        assert!(carleson_entropy(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn witness_matches_entropy() {
        let th: Vec<f64> = (1..=30).map(|n| 0.5f64.powi(n)).collect();
        let w = uniqueness_witness(&th).unwrap();
        assert!(!w.reordered && w.chain_holds);
        assert_eq!(w.delta_entropy, carleson_entropy(&th).unwrap().normalized);
        let shuffled = [0.25, 0.5, 0.25, 0.125];
        let w = uniqueness_witness(&shuffled).unwrap();
        assert!(w.reordered);
        assert_eq!(w.thetas, vec![0.5, 0.25, 0.125]);
        assert!(matches!(uniqueness_witness(&[0.5, 1.5]), Err(Error::MalformedSequence(_))));
    }

    #[test]
    fn logdist_grows_with_larger_set() {
        let q = QuadratureSpec::default().with_tolerances(1e-10, 1e-9);
        let one = carleson_logdist_integral(&[CirclePoint::one()], &q).unwrap();
        // ∫_0^{2π} -ln(2 sin(θ/2)) dθ = 0
        assert!(one.abs() < 1e-8, "{one}");
        let many: Vec<_> = (0..256).map(|k| CirclePoint::new(TAU * k as f64 / 256.0)).collect();
        let v = carleson_logdist_integral(&many, &q).unwrap();
        assert!(v > one);
    }

    #[test]
    fn pushout_identity_and_dirichlet_increase() {
        let k = DiagonalKernel::dirichlet();
        let z = [p(0.5, 0.3), p(0.6, 2.0)];
        let same = pushout_gamma_compare(&z, &[0.5, 0.6], &k).unwrap();
        assert!((same.gamma_w - same.gamma_z).abs() < 1e-15);
        let out = pushout_gamma_compare(&z, &[0.7, 0.9], &k).unwrap();
        assert!(out.ok && out.gamma_w > out.gamma_z);
    }

    #[test]
    fn appendix_kernel_breaks_pushout() {
        let k = DiagonalKernel::appendix_a(0.01).unwrap();
        let z = [p(0.5, PI), p(0.5, 0.0)];
        let c = pushout_gamma_compare(&z, &[0.5, 0.55], &k).unwrap();
        assert!(!c.ok, "{c:?}");
    }

    #[test]
    fn poisson_inequality_single_zero() {
        let q = QuadratureSpec::default();
        let c = extremal_poisson_check(&[p(0.5, 0.0)], 0.3, 0.9, 0.0, &q).unwrap();
        assert!(c.ok, "{c:?}");
        let eq = extremal_poisson_check(&[p(0.5, 1.0)], 0.4, 0.4, 2.0, &q).unwrap();
        assert!((eq.lhs - eq.rhs).abs() < 1e-12);
    }
}
