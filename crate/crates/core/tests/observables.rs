mod common;

use std::collections::BTreeMap;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use respa_md::experiment::run_points;
use respa_md::observables::{
    energy_deviation_histogram, energy_deviation_histograms, pressure_virial, rdf, rvite, speedup, Histogram,
    ObservableSeries, RdfAccumulator,
};
use respa_md::{ContainerKind, ForceEngine, ForceField, ScenarioConfig, Vec3};

#[test]
fn ideal_gas_rdf_is_flat() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let frames: Vec<_> = (0..40).map(|_| random_system(&mut rng, 1000, Vec3::splat(10.0), true, 0.0)).collect();
    let g = rdf(&frames, 5.0, 25).unwrap();
    for (r, v) in g {
        assert!((v - 1.0).abs() <= 0.1, "g({r}) = {v}");
    }
}

#[test]
fn rdf_normalisation_matches_hand_count() {
    // two particles 1.05 apart in a 10^3 box: one ordered pair each way
    let sys = respa_md::ParticleSystem::new(vec![Vec3::splat(1.0), Vec3::new(2.05, 1.0, 1.0)], Vec3::splat(10.0), true, 1.0)
        .unwrap();
    let g = rdf(&[sys], 5.0, 50).unwrap();
    let shell = 4.0 / 3.0 * std::f64::consts::PI * (1.1f64.powi(3) - 1.0f64.powi(3));
    let expected = 2.0 / (2.0 * (2.0 / 1000.0) * shell);
    assert!(rel(g[10].1, expected) < 1e-12);
    assert_eq!(g.iter().filter(|(_, v)| *v > 0.0).count(), 1);
}

#[test]
fn rdf_rejects_long_range() {
    let sys = respa_md::ParticleSystem::new(vec![Vec3::splat(1.0)], Vec3::new(10.0, 10.0, 6.0), true, 1.0).unwrap();
    let mut acc = RdfAccumulator::new(3.5, 10).unwrap();
    assert!(acc.add_frame(&sys).is_err());
    assert_eq!(RdfAccumulator::default_r_max(&sys), 3.0);
}

#[test]
fn ideal_gas_pressure_is_rho_t() {
    let mut c = ScenarioConfig::toy(0.0);
    c.particle_count = 343;
    c.box_size = Vec3::splat(8.0);
    c.periodic = true;
    c.container = ContainerKind::LinkedCells;
    c.force_field = ForceField::new(0.0, 1.0, 0.0, 2.5).unwrap();
    c.iterations = 200;
    c.equilibration_steps = 100;
    c.sampling.sample_every = 10;
    let r = run_points(&c, &[(0.0, 1)], &mut |_| {}).unwrap();
    let p = r.points[0].mean_pressure.unwrap();
    let expected = 343.0 / 512.0 * c.temperature;
    assert!((p - expected).abs() / expected <= 0.05, "P = {p}, rho T = {expected}");
}

#[test]
fn pressure_from_virial_of_a_dimer() {
    let mut sys =
        respa_md::ParticleSystem::new(vec![Vec3::splat(3.0), Vec3::new(4.0, 3.0, 3.0)], Vec3::splat(8.0), true, 1.0).unwrap();
    let sums = ForceEngine::new(ForceField::reduced(0.0, 2.5), ContainerKind::LinkedCells).evaluate_all(&mut sys).unwrap();
    // r = sigma: r F = 24 (2 - 1) = 24
    assert!(rel(sums.pair.virial, 24.0) < 1e-12);
    let p = pressure_virial(0.5, &sys, sums.pair.virial, sums.triplet.virial);
    assert!(rel(p, 2.0 * 0.5 / 512.0 + 24.0 / (3.0 * 512.0)) < 1e-12);
}

#[test]
fn rvite_of_constant_series_is_zero() {
    let s = ObservableSeries::from_parts((0..100).map(|i| i * 12).collect(), vec![-312.25; 100]).unwrap();
    assert_eq!(rvite(&s, 3.7).unwrap(), 0.0);
}

#[test]
fn rvite_hand_computed() {
    let s = ObservableSeries::from_parts(vec![0, 1, 2, 3], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    // mean 2.5, mean |dev| 1, K = 2
    assert_eq!(rvite(&s, 2.0).unwrap(), 0.5);
}

#[test]
fn deviation_histograms_share_bins_and_keep_counts() {
    let reference = ObservableSeries::from_parts((0..50).map(|i| i * 6).collect(), (0..50).map(|i| -100.0 - i as f64 * 1e-3).collect())
        .unwrap();
    let s2 = ObservableSeries::from_parts(
        (0..50).map(|i| i * 6).collect(),
        reference.values().iter().enumerate().map(|(i, v)| v * (1.0 + 1e-6 * (i % 7) as f64)).collect(),
    )
    .unwrap();
    let s12 = ObservableSeries::from_parts(
        (0..25).map(|i| i * 12).collect(),
        (0..25).map(|i| reference.values()[2 * i] * (1.0 - 2e-6 * (i % 3) as f64)).collect(),
    )
    .unwrap();
    let hs = energy_deviation_histograms(&[&s2, &s12], &reference, 50).unwrap();
    assert_eq!(hs[0].edges, hs[1].edges);
    assert_eq!(hs[0].bins(), 50);
    assert_eq!(hs[0].total(), 50);
    assert_eq!(hs[1].total(), 25);
    let own = energy_deviation_histogram(&reference, &reference, 50).unwrap();
    assert_eq!(own.counts[own.bin_of(0.0).unwrap()], 50);
}

#[test]
fn histogram_bins_are_half_open_except_last() {
    let mut h = Histogram::uniform(0.0, 1.0, 4).unwrap();
    assert_eq!(h.bin_of(0.25), Some(1));
    assert_eq!(h.bin_of(1.0), Some(3));
    assert!(!h.insert(1.5));
    assert!(h.insert(0.0));
    assert_eq!(h.total(), 1);
}

#[test]
fn speedup_from_timings() {
    let sp = speedup(&BTreeMap::from([(1, 100.0), (2, 55.0)])).unwrap();
    assert_eq!(sp[&1], 1.0);
    assert!((sp[&2] - 1.818).abs() < 1e-3);
}
