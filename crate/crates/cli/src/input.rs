//! Parsing of kernels, point sets, measures and partitions from flags, inline
//! JSON or files.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use dext_core::conditions::Cluster;
use dext_core::gramian::{Constraint, ConstraintSet};
use dext_core::inner::{Atom, AtomicMeasure};
use dext_core::{CirclePoint, DiagonalKernel, KernelFamily, UnitDiscPoint};
use serde::{Deserialize, Serialize};

/// Reads `arg` as inline JSON when it starts with `[` or `{`, otherwise as a path.
pub fn json_source(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
}

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    Dirichlet,
    Hardy,
    AppendixA { a: f64 },
    WeightedDs { s: f64 },
}

impl KernelSpec {
    /// `name` is a family name (parameters from `a`/`s`) or a JSON object.
    pub fn parse(name: &str, a: Option<f64>, s: Option<f64>) -> Result<Self> {
        if name.trim_start().starts_with('{') {
            return serde_json::from_str(name).context("kernel JSON");
        }
        Ok(match name {
            "dirichlet" => KernelSpec::Dirichlet,
            "hardy" => KernelSpec::Hardy,
            "appendix_a" | "appendix-a" => KernelSpec::AppendixA { a: a.ok_or_else(|| anyhow!("--a is required for appendix_a"))? },
            "weighted_ds" | "weighted-ds" => KernelSpec::WeightedDs { s: s.ok_or_else(|| anyhow!("--s is required for weighted_ds"))? },
            other => bail!("unknown kernel family `{other}`"),
        })
    }

    pub fn build(&self) -> Result<DiagonalKernel> {
        let family = match *self {
            KernelSpec::Dirichlet => KernelFamily::Dirichlet,
            KernelSpec::Hardy => KernelFamily::Hardy,
            KernelSpec::AppendixA { a } => KernelFamily::AppendixA { a },
            KernelSpec::WeightedDs { s } => KernelFamily::WeightedDs { s },
        };
        DiagonalKernel::new(family).map_err(|e| anyhow!("{e}"))
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, KernelSpec::Dirichlet)
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum PointRecord {
    Polar {
        r: f64,
        theta: f64,
        #[serde(default)]
        order: usize,
    },
    Cartesian {
        re: f64,
        im: f64,
        #[serde(default)]
        order: usize,
    },
}

impl PointRecord {
    pub fn point(&self) -> Result<UnitDiscPoint> {
        let p = match *self {
            PointRecord::Polar { r, theta, .. } => UnitDiscPoint::from_polar(r, theta),
            PointRecord::Cartesian { re, im, .. } => UnitDiscPoint::new(re, im),
        };
        p.map_err(|e| anyhow!("{e}"))
    }

    pub fn order(&self) -> usize {
        match *self {
            PointRecord::Polar { order, .. } | PointRecord::Cartesian { order, .. } => order,
        }
    }

    pub fn from_point(z: &UnitDiscPoint) -> Self {
        PointRecord::Cartesian { re: z.re(), im: z.im(), order: 0 }
    }
}

pub fn parse_records(arg: &str) -> Result<Vec<PointRecord>> {
    let text = json_source(arg)?;
    serde_json::from_str(&text).context("point list: expected [{\"r\":..,\"theta\":..}] or [{\"re\":..,\"im\":..}]")
}

pub fn parse_points(arg: &str) -> Result<Vec<UnitDiscPoint>> {
    let recs = parse_records(arg)?;
    if recs.iter().any(|r| r.order() != 0) {
        bail!("derivative orders are not accepted here");
    }
    recs.iter().map(PointRecord::point).collect()
}

pub fn parse_constraints(arg: &str) -> Result<ConstraintSet> {
    let recs = parse_records(arg)?;
    if recs.is_empty() {
        bail!("at least one point is required");
    }
    let entries = recs.iter().map(|r| Ok(Constraint { point: r.point()?, order: r.order() })).collect::<Result<Vec<_>>>()?;
    ConstraintSet::new(entries).map_err(|e| anyhow!("{e}"))
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
pub struct AtomRecord {
    pub theta: f64,
    pub mass: f64,
}

pub fn parse_measure(arg: &str) -> Result<AtomicMeasure> {
    let recs: Vec<AtomRecord> = serde_json::from_str(&json_source(arg)?).context("measure: expected [{\"theta\":..,\"mass\":..}]")?;
    AtomicMeasure::new(recs.iter().map(|a| Atom { lambda: CirclePoint::new(a.theta), mass: a.mass }).collect())
        .map_err(|e| anyhow!("{e}"))
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct ClusterRecord {
    pub vertex: f64,
    pub points: Vec<PointRecord>,
}

pub fn parse_partition(arg: &str) -> Result<Vec<Cluster>> {
    let recs: Vec<ClusterRecord> =
        serde_json::from_str(&json_source(arg)?).context("partition: expected [{\"vertex\":..,\"points\":[..]}]")?;
    recs.iter()
        .map(|c| {
            Ok(Cluster {
                vertex: CirclePoint::new(c.vertex),
                points: c.points.iter().map(PointRecord::point).collect::<Result<Vec<_>>>()?,
            })
        })
        .collect()
}
