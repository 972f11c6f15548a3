use std::fs;
use std::path::Path;

use anyhow::anyhow;
use dext_core::appendix::{appendix_gamma, figure_formula, nonmonotonicity_witness, FIGURE_A, FIGURE_R};
use dext_core::atomic::{compute_a, AMethod};
use dext_core::conditions::{
    atomic_condition_sums, carleson_entropy, decomp_certificate, greedy_partition, infinite_product_criterion,
    shapiro_shields_sums, uniqueness_witness, ClusterDecomposition, SeriesSums,
};
use dext_core::gramian::{extremal_eval, gamma_extremal, EvalPoint};
use dext_core::inner::{carleson_norm_sq, log_plus_v_integral, InnerSpec};
use dext_core::numerics::QuadratureSpec;
use dext_core::{CirclePoint, Complex64, Error, UnitDiscPoint};
use serde::Serialize;

use crate::input::{parse_constraints, parse_measure, parse_partition, parse_points, KernelSpec, PointRecord};
use crate::report::{key_values, num, svg_plot, Format, Series, Table};
use crate::{Failure, KernelArgs, Outcome};

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numeric(e.into()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct SampleRow {
    theta: f64,
    radius: f64,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct GammaReport {
    kernel: KernelSpec,
    constraints: Vec<PointRecord>,
    gamma: f64,
    gamma_sq: f64,
    rank: usize,
    condition_estimate: f64,
    ill_conditioned: bool,
    samples: Vec<SampleRow>,
}

pub fn gamma(kernel: &KernelArgs, points: &str, samples: usize, radius: f64, fmt: Format) -> Result<Outcome, Failure> {
    let spec = KernelSpec::parse(&kernel.kernel, kernel.a, kernel.s)?;
    let k = spec.build()?;
    let set = parse_constraints(points)?;
    if !(radius > 0.0 && radius <= 1.0) {
        return Err(anyhow!("--sample-radius must lie in (0, 1]").into());
    }
    let cert = gamma_extremal(&k, &set)?;
    let mut rows = Vec::with_capacity(samples);
    for j in 0..samples {
        let theta = std::f64::consts::TAU * j as f64 / samples as f64;
        let at = if radius == 1.0 {
            EvalPoint::Boundary(CirclePoint::new(theta))
        } else {
            EvalPoint::Disc(UnitDiscPoint::from_polar(radius, theta)?)
        };
        let v = extremal_eval(&cert, at)?;
        rows.push(SampleRow { theta, radius, re: v.re, im: v.im, abs: v.norm() });
    }
    let report = GammaReport {
        kernel: spec,
        constraints: set
            .entries()
            .iter()
            .map(|c| PointRecord::Cartesian { re: c.point.re(), im: c.point.im(), order: c.order })
            .collect(),
        gamma: cert.gamma,
        gamma_sq: cert.gamma_sq,
        rank: cert.rank,
        condition_estimate: cert.condition_estimate,
        ill_conditioned: cert.ill_conditioned,
        samples: rows,
    };
    let mut table = Table::new(&["theta", "radius", "re", "im", "abs"]);
    for r in &report.samples {
        table.push(vec![num(r.theta), num(r.radius), num(r.re), num(r.im), num(r.abs)]);
    }
    let text = match fmt {
        Format::Json => to_json(&report)?,
        Format::Csv if samples > 0 => table.to_csv(),
        Format::Csv => {
            let mut t = Table::new(&["gamma", "gamma_sq", "rank", "condition_estimate", "ill_conditioned"]);
            t.push(vec![
                num(report.gamma),
                num(report.gamma_sq),
                report.rank.to_string(),
                num(report.condition_estimate),
                report.ill_conditioned.to_string(),
            ]);
            t.to_csv()
        }
        Format::Table => {
            let mut s = key_values(&[
                ("gamma", num(report.gamma)),
                ("gamma_sq", num(report.gamma_sq)),
                ("rank", report.rank.to_string()),
                ("condition_estimate", num(report.condition_estimate)),
                ("ill_conditioned", report.ill_conditioned.to_string()),
            ]);
            if samples > 0 {
                s.push('\n');
                s.push_str(&table.to_text());
            }
            s
        }
    };
    Ok(Outcome::ok(text))
}

#[derive(Serialize)]
struct AtomicRow {
    a: f64,
    big_a: f64,
    big_a_direct: f64,
    method_gap: f64,
    gamma: f64,
    one_minus_gamma: f64,
    scaled_defect: f64,
}

pub fn atomic(masses: &[f64], fmt: Format) -> Result<Outcome, Failure> {
    let mut rows = Vec::with_capacity(masses.len());
    for &a in masses {
        let e = compute_a(a, AMethod::E1Substitution)?;
        let d = compute_a(a, AMethod::DirectIntegral)?;
        rows.push(AtomicRow {
            a,
            big_a: e.big_a,
            big_a_direct: d.big_a,
            method_gap: (e.big_a - d.big_a).abs(),
            gamma: e.gamma,
            one_minus_gamma: e.one_minus_gamma,
            scaled_defect: e.one_minus_gamma * 2.0 * (1.0 / a).ln(),
        });
    }
    let mut t = Table::new(&["a", "A", "A_direct", "method_gap", "gamma", "one_minus_gamma", "one_minus_gamma_x_2ln_inv_a"]);
    for r in &rows {
        t.push(vec![
            num(r.a),
            num(r.big_a),
            num(r.big_a_direct),
            num(r.method_gap),
            num(r.gamma),
            num(r.one_minus_gamma),
            num(r.scaled_defect),
        ]);
    }
    Ok(Outcome::ok(match fmt {
        Format::Json => to_json(&rows)?,
        Format::Csv => t.to_csv(),
        Format::Table => t.to_text(),
    }))
}

#[derive(Serialize)]
struct ClusterOut {
    vertex: f64,
    points: Vec<PointRecord>,
    a_k: f64,
    term: f64,
    pushout_a_k: f64,
    pushout_term: f64,
}

#[derive(Serialize)]
struct CertifyReport {
    clusters: Vec<ClusterOut>,
    condition_sum: f64,
    pushout_condition_sum: f64,
    domination_margin: f64,
    domination_scale: f64,
    dominated: bool,
    grid: usize,
}

pub fn certify(
    points: Option<&str>,
    partition: Option<&str>,
    max_clusters: usize,
    grid: usize,
    fmt: Format,
) -> Result<Outcome, Failure> {
    if grid == 0 {
        return Err(anyhow!("--grid must be positive").into());
    }
    let decomp = match (points, partition) {
        (_, Some(p)) => ClusterDecomposition::new(parse_partition(p)?),
        (Some(p), None) => {
            let pts = parse_points(p)?;
            if pts.is_empty() {
                return Err(anyhow!("at least one point is required").into());
            }
            greedy_partition(&pts, max_clusters.max(1))
        }
        (None, None) => unreachable!("clap requires one input"),
    };
    let cert = decomp_certificate(&decomp, grid);
    let report = CertifyReport {
        clusters: decomp
            .clusters()
            .iter()
            .zip(&cert.per_cluster)
            .map(|(c, row)| ClusterOut {
                vertex: c.vertex.theta(),
                points: c.points.iter().map(PointRecord::from_point).collect(),
                a_k: row.weight,
                term: row.term,
                pushout_a_k: row.pushout_weight,
                pushout_term: row.pushout_term,
            })
            .collect(),
        condition_sum: cert.condition_sum,
        pushout_condition_sum: cert.pushout_condition_sum,
        domination_margin: cert.domination.max_violation,
        domination_scale: cert.domination.scale,
        dominated: cert.dominated,
        grid,
    };
    let mut t = Table::new(&["cluster", "vertex", "size", "a_k", "term", "pushout_a_k", "pushout_term"]);
    for (i, c) in report.clusters.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            num(c.vertex),
            c.points.len().to_string(),
            num(c.a_k),
            num(c.term),
            num(c.pushout_a_k),
            num(c.pushout_term),
        ]);
    }
    let text = match fmt {
        Format::Json => to_json(&report)?,
        Format::Csv => t.to_csv(),
        Format::Table => {
            let mut s = t.to_text();
            s.push('\n');
            s.push_str(&key_values(&[
                ("condition_sum", num(report.condition_sum)),
                ("pushout_condition_sum", num(report.pushout_condition_sum)),
                ("domination_margin", num(report.domination_margin)),
                ("domination_scale", num(report.domination_scale)),
                ("dominated", report.dominated.to_string()),
            ]));
            s
        }
    };
    Ok(Outcome { text, properties_hold: report.dominated })
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    gamma_gramian: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_formula: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    discontinuity: Option<bool>,
}

#[derive(Serialize)]
struct WitnessOut {
    t1: f64,
    t2: f64,
    gamma1: f64,
    gamma2: f64,
}

#[derive(Serialize)]
struct AppendixReport {
    a: f64,
    r: f64,
    max_abs_diff: Option<f64>,
    witness: Option<WitnessOut>,
    curve: Vec<CurveRow>,
}

pub fn appendix(
    a: f64,
    r: f64,
    grid: usize,
    t_min: f64,
    t_max: f64,
    plot: Option<&Path>,
    fmt: Format,
) -> Result<Outcome, Failure> {
    if grid < 2 || !(t_min > 0.0 && t_min < t_max && t_max < 1.0) {
        return Err(anyhow!("need --grid >= 2 and 0 < t-min < t-max < 1").into());
    }
    let with_formula = a == FIGURE_A && r == FIGURE_R;
    let even = a == 0.0;
    let h = (t_max - t_min) / (grid - 1) as f64;
    let mut ts: Vec<f64> = (0..grid).map(|k| if k + 1 == grid { t_max } else { t_min + h * k as f64 }).collect();
    if even && r >= t_min && r <= t_max && !ts.contains(&r) {
        ts.push(r);
        ts.sort_by(|x, y| x.total_cmp(y));
    }
    let mut curve = Vec::with_capacity(ts.len());
    let mut max_diff: f64 = 0.0;
    for &t in &ts {
        let g = appendix_gamma(a, r, t)?;
        let f = if with_formula { Some(figure_formula(t)?) } else { None };
        if let Some(f) = f {
            max_diff = max_diff.max((g - f).abs());
        }
        curve.push(CurveRow {
            t,
            gamma_gramian: g,
            gamma_formula: f,
            abs_diff: f.map(|f| (g - f).abs()),
            discontinuity: even.then_some(t == r),
        });
    }
    let witness = match nonmonotonicity_witness(a, r) {
        Ok(w) => Some(WitnessOut { t1: w.t1, t2: w.t2, gamma1: w.gamma1, gamma2: w.gamma2 }),
        Err(Error::NotFound) => None,
        Err(e) => return Err(e.into()),
    };
    let report = AppendixReport { a, r, max_abs_diff: with_formula.then_some(max_diff), witness, curve };

    if let Some(path) = plot {
        fs::write(path, appendix_svg(&report)).map_err(|e| anyhow!("writing {}: {e}", path.display()))?;
    }

    let mut headers = vec!["t", "gamma_gramian"];
    if with_formula {
        headers.extend(["gamma_formula", "abs_diff"]);
    }
    if even {
        headers.push("discontinuity");
    }
    let mut t = Table::new(&headers);
    for c in &report.curve {
        let mut row = vec![num(c.t), num(c.gamma_gramian)];
        if let (Some(f), Some(d)) = (c.gamma_formula, c.abs_diff) {
            row.extend([num(f), num(d)]);
        }
        if let Some(d) = c.discontinuity {
            row.push(u8::from(d).to_string());
        }
        t.push(row);
    }
    let mut summary = Vec::new();
    if let Some(d) = report.max_abs_diff {
        summary.push(("max_abs_diff", num(d)));
    }
    match &report.witness {
        Some(w) => {
            summary.push(("witness_t1", num(w.t1)));
            summary.push(("witness_t2", num(w.t2)));
            summary.push(("witness_drop", num(w.gamma1 - w.gamma2)));
        }
        None => summary.push(("witness", "none".to_string())),
    }
    let text = match fmt {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            eprint!("{}", key_values(&summary));
            t.to_csv()
        }
        Format::Table => {
            let mut s = t.to_text();
            s.push('\n');
            s.push_str(&key_values(&summary));
            s
        }
    };
    Ok(Outcome::ok(text))
}

fn appendix_svg(report: &AppendixReport) -> String {
    let mut segments = vec![Vec::new()];
    let mut markers = Vec::new();
    for c in &report.curve {
        if c.discontinuity == Some(true) {
            markers.push((c.t, c.gamma_gramian));
            segments.push(Vec::new());
            continue;
        }
        segments.last_mut().unwrap().push((c.t, c.gamma_gramian));
    }
    segments.retain(|s| !s.is_empty());
    let mut series =
        vec![Series { label: "gramian".into(), segments, color: "#1f4e9c", dashed: false, markers }];
    if report.max_abs_diff.is_some() {
        series.push(Series {
            label: "explicit formula".into(),
            segments: vec![report.curve.iter().filter_map(|c| c.gamma_formula.map(|f| (c.t, f))).collect()],
            color: "#c0392b",
            dashed: true,
            markers: Vec::new(),
        });
    }
    svg_plot(&format!("gamma_a(t), a = {}, r = {}", report.a, report.r), "t", "gamma", &series)
}

#[derive(Serialize)]
struct InnerReport {
    blaschke_sum: f64,
    origin_order: usize,
    total_mass: f64,
    dirichlet_norm_sq: f64,
    log_plus_v_integral: Option<f64>,
}

pub fn inner(points: Option<&str>, measure: Option<&str>, origin_order: usize, fmt: Format) -> Result<Outcome, Failure> {
    let zeros = points.map(parse_points).transpose()?.unwrap_or_default();
    let mu = measure.map(parse_measure).transpose()?.unwrap_or_default();
    let spec = InnerSpec::new(zeros, origin_order, mu.clone());
    let quad = QuadratureSpec::default();
    let norm = carleson_norm_sq(&spec, |_| Complex64::new(1.0, 0.0), 1.0, &quad)?;
    let report = InnerReport {
        blaschke_sum: spec.blaschke_sum(),
        origin_order: spec.zero_order_at_origin(),
        total_mass: mu.total_mass(),
        dirichlet_norm_sq: norm,
        log_plus_v_integral: if mu.is_empty() { None } else { Some(log_plus_v_integral(&mu, &quad)?) },
    };
    let mut pairs = vec![
        ("blaschke_sum", num(report.blaschke_sum)),
        ("origin_order", report.origin_order.to_string()),
        ("total_mass", num(report.total_mass)),
        ("dirichlet_norm_sq", num(report.dirichlet_norm_sq)),
    ];
    if let Some(v) = report.log_plus_v_integral {
        pairs.push(("log_plus_v_integral", num(v)));
    }
    Ok(Outcome::ok(match fmt {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut t = Table::new(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
            t.push(pairs.iter().map(|p| p.1.clone()).collect());
            t.to_csv()
        }
        Format::Table => key_values(&pairs),
    }))
}

#[derive(Serialize)]
struct SumsReport {
    kind: &'static str,
    totals: Vec<(&'static str, f64)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

fn series_rows(inputs: &[f64], s: &SeriesSums) -> Vec<Vec<f64>> {
    inputs
        .iter()
        .zip(&s.terms)
        .zip(&s.partial_condition)
        .enumerate()
        .map(|(i, ((x, t), p))| vec![(i + 1) as f64, *x, *t, *p])
        .collect()
}

pub fn sums(
    moduli: Option<Vec<f64>>,
    masses: Option<Vec<f64>>,
    s: Option<f64>,
    thetas: Option<Vec<f64>>,
    gammas: Option<Vec<f64>>,
    fmt: Format,
) -> Result<Outcome, Failure> {
    let report = if let Some(m) = moduli {
        let r = shapiro_shields_sums(&m)?;
        SumsReport {
            kind: "shapiro_shields",
            totals: vec![("blaschke_sum", r.linear_sum), ("condition_sum", r.condition_sum)],
            columns: vec!["n", "r", "term", "partial_sum"],
            rows: series_rows(&m, &r),
        }
    } else if let Some(m) = masses {
        let r = atomic_condition_sums(&m, s)?;
        let mut totals = vec![("total_mass", r.sums.linear_sum), ("condition_sum", r.sums.condition_sum)];
        if let Some(w) = r.weighted_sum {
            totals.push(("weighted_sum", w));
        }
        SumsReport {
            kind: "atomic",
            totals,
            columns: vec!["n", "a", "term", "partial_sum"],
            rows: series_rows(&m, &r.sums),
        }
    } else if let Some(th) = thetas {
        let w = uniqueness_witness(&th)?;
        let e = carleson_entropy(&w.thetas)?;
        let rows = w
            .deltas
            .iter()
            .zip(&w.points)
            .zip(&e.gaps)
            .enumerate()
            .map(|(i, ((d, p), g))| vec![(i + 1) as f64, w.thetas[i], *g, *d, p.re(), p.im()])
            .collect();
        if w.reordered {
            eprintln!("warning: angles were sorted into decreasing order and repeats removed");
        }
        SumsReport {
            kind: "entropy",
            totals: vec![
                ("entropy_raw", e.raw),
                ("entropy_normalized", e.normalized),
                ("witness_delta_entropy", w.delta_entropy),
                ("witness_chain_holds", f64::from(u8::from(w.chain_holds))),
            ],
            columns: vec!["n", "theta", "gap", "delta", "w_re", "w_im"],
            rows,
        }
    } else if let Some(g) = gammas {
        let p = infinite_product_criterion(&g)?;
        let mut totals = vec![("defect_sum", p.defect_sum), ("product", p.product)];
        if let Some(b) = p.product_lower_bound {
            totals.push(("product_lower_bound", b));
        }
        SumsReport {
            kind: "product",
            totals,
            columns: vec!["n", "gamma", "partial_defect"],
            rows: g.iter().zip(&p.partial_defects).enumerate().map(|(i, (x, d))| vec![(i + 1) as f64, *x, *d]).collect(),
        }
    } else {
        unreachable!("clap requires one sequence flag")
    };
    let mut t = Table::new(&report.columns);
    for r in &report.rows {
        t.push(r.iter().map(|x| num(*x)).collect());
    }
    Ok(Outcome::ok(match fmt {
        Format::Json => to_json(&report)?,
        Format::Csv => t.to_csv(),
        Format::Table => {
            let mut s = t.to_text();
            s.push('\n');
            s.push_str(&key_values(&report.totals.iter().map(|(k, v)| (*k, num(*v))).collect::<Vec<_>>()));
            s
        }
    }))
}
