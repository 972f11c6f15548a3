use std::f64::consts::TAU;

use dext_core::conditions::{
    cluster_weight, condition_term, domination_check, pushout_weights, Cluster, ClusterDecomposition,
};
use dext_core::gramian::{gamma_extremal, ConstraintSet};
use dext_core::inner::{inner_eval, AtomicMeasure, InnerSpec};
use dext_core::{CirclePoint, DiagonalKernel, UnitDiscPoint};
use proptest::prelude::*;

fn disc_point(rmax: f64) -> impl Strategy<Value = UnitDiscPoint> {
    annulus_point(0.05, rmax)
}

fn annulus_point(rmin: f64, rmax: f64) -> impl Strategy<Value = UnitDiscPoint> {
    (rmin..rmax, 0.0..TAU).prop_map(|(r, t)| UnitDiscPoint::from_polar(r, t).unwrap())
}

fn separated(points: &[UnitDiscPoint], sep: f64) -> bool {
    points.iter().enumerate().all(|(i, z)| points[..i].iter().all(|w| (z.to_complex() - w.to_complex()).norm() > sep))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_decreases_when_a_zero_is_added(pts in prop::collection::vec(disc_point(0.85), 1..4), extra in disc_point(0.85)) {
        let mut all = pts.clone();
        all.push(extra);
        prop_assume!(separated(&all, 0.05));
        let k = DiagonalKernel::dirichlet();
        let g0 = gamma_extremal(&k, &ConstraintSet::zeros(&pts).unwrap()).unwrap().gamma;
        let g1 = gamma_extremal(&k, &ConstraintSet::zeros(&all).unwrap()).unwrap().gamma;
        prop_assert!(g1 <= g0 + 1e-12);
        prop_assert!(g1 > 0.0 && g0 <= 1.0);
    }

    // γ² = 1 − ⟨L⁺e, e⟩ loses about eps·cond/γ absolutely, so keep γ away from 0
    #[test]
    fn hardy_gamma_is_product_of_moduli(pts in prop::collection::vec(annulus_point(0.2, 0.9), 1..5)) {
        prop_assume!(separated(&pts, 0.05));
        let g = gamma_extremal(&DiagonalKernel::hardy(), &ConstraintSet::zeros(&pts).unwrap()).unwrap().gamma;
        let prod: f64 = pts.iter().map(|z| z.norm()).product();
        prop_assert!((g - prod).abs() < 1e-10);
    }

    #[test]
    fn hardy_gamma_dominates_dirichlet(pts in prop::collection::vec(disc_point(0.85), 1..4)) {
        prop_assume!(separated(&pts, 0.05));
        let set = ConstraintSet::zeros(&pts).unwrap();
        let d = gamma_extremal(&DiagonalKernel::dirichlet(), &set).unwrap().gamma;
        let h = gamma_extremal(&DiagonalKernel::hardy(), &set).unwrap().gamma;
        prop_assert!(d <= h + 1e-12);
    }

    #[test]
    fn inner_functions_are_bounded(
        zeros in prop::collection::vec(disc_point(0.95), 0..4),
        theta in 0.0..TAU,
        mass in 0.01f64..3.0,
        z in disc_point(0.999),
    ) {
        let spec = InnerSpec::new(zeros, 0, AtomicMeasure::single(theta, mass).unwrap());
        prop_assert!(inner_eval(&spec, &z).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn pushout_weight_never_exceeds_cluster_weight(pts in prop::collection::vec(disc_point(0.999), 1..8), v in 0.0..TAU) {
        let vertex = CirclePoint::new(v);
        prop_assert!(pushout_weights(&pts, &vertex) <= cluster_weight(&pts, &vertex) + 1e-12);
    }

    #[test]
    fn any_partition_is_dominated(pts in prop::collection::vec(disc_point(0.99), 1..10), vs in prop::collection::vec(0.0..TAU, 1..4), labels in prop::collection::vec(0usize..4, 10)) {
        let mut groups: Vec<Vec<UnitDiscPoint>> = vec![Vec::new(); vs.len()];
        for (i, z) in pts.iter().enumerate() {
            groups[labels[i] % vs.len()].push(*z);
        }
        let clusters = groups.into_iter().zip(&vs).map(|(points, &v)| Cluster { points, vertex: CirclePoint::new(v) }).collect();
        let d = ClusterDecomposition::new(clusters);
        prop_assert!(d.partitions(&pts));
        let rep = domination_check(&d, 2048);
        prop_assert!(rep.holds(1e-10), "{rep:?}");
    }

    #[test]
    fn condition_term_is_increasing(a in 1e-12f64..10.0, f in 1.0f64..100.0) {
        prop_assert!(condition_term(a) <= condition_term(a * f));
    }
}
