use std::path::PathBuf;

use respa_md::model::build_initial_system;
use respa_md::scenario::{parse_scenario, parse_scenario_str, ScenarioError};
use respa_md::{ContainerKind, Vec3};

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

#[test]
fn toy_file() {
    let p = parse_scenario(bundled("toy.scn")).unwrap();
    assert_eq!(p.base.particle_count, 675);
    assert_eq!(p.base.box_size, Vec3::splat(10.0));
    assert_eq!(p.base.iterations, 24000);
    assert_eq!(p.base.dt, 0.001);
    assert_eq!(p.base.container, ContainerKind::DirectSum);
    assert_eq!(p.s_values(), vec![1, 2, 3, 4, 6, 12]);
    let nus = p.nu_values();
    assert_eq!(nus.len(), 20);
    assert_eq!((nus[0], nus[19]), (0.05, 1.0));
}

#[test]
fn aluminium_file() {
    let p = parse_scenario(bundled("aluminium.scn")).unwrap();
    assert_eq!(p.base.dt, 0.00304);
    assert_eq!(p.base.force_field.nu, 0.3095);
    assert_eq!(p.base.temperature, 1.1);
    assert_eq!(p.base.box_size, Vec3::splat(20.0));
    assert_eq!(p.base.particle_count, 4995);
    assert_eq!(p.base.iterations, 24000);
    assert!(p.base.periodic);
}

#[test]
fn every_bundled_file_parses_and_builds() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "scn") {
            let plan = parse_scenario(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let sys = build_initial_system(&plan.base).unwrap();
            assert_eq!(sys.len(), plan.base.particle_count);
            count += 1;
        }
    }
    assert!(count >= 2);
}

#[test]
fn same_seed_same_initial_state() {
    let p = parse_scenario(bundled("toy_desk.scn")).unwrap();
    let a = build_initial_system(&p.base).unwrap();
    let b = build_initial_system(&p.base).unwrap();
    assert_eq!(a, b);
    let mut other = p.base.clone();
    other.seed += 1;
    assert_ne!(build_initial_system(&other).unwrap().velocities, a.velocities);
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(parse_scenario(bundled("nope.scn")), Err(ScenarioError::Io { .. })));
}

#[test]
fn indivisible_sweep_is_rejected() {
    let e = parse_scenario_str("[integration]\niterations = 100\n[sweep]\nstep_size_factors = 1,12\n").unwrap_err();
    assert!(matches!(e, ScenarioError::Invalid(_)), "{e}");
}

#[test]
fn unknown_key_reports_line() {
    let e = parse_scenario_str("# c\n[system]\nparticles = 10\ncolour = red\n").unwrap_err();
    assert!(matches!(e, ScenarioError::Parse { line: 4, .. }), "{e}");
}
