use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respa-md")).args(args).output().unwrap()
}

fn scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const TINY: &str = "particles = 8\nbox = 3\ntemperature = 0.5\nnu = 0.4\ndt = 0.002\niterations = 24\nequilibration = 10\nstep_size_factors = 1,2\nnu_sweep = 0.2, 0.4\nsample_every = 2\n";

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn run_writes_the_documented_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = scenario(tmp.path(), "tiny.scn", &format!("{TINY}step_size_factor = 2\n"));
    let out = tmp.path().join("out");
    let o = bin(&["run", scn.to_str().unwrap(), "--output", out.to_str().unwrap(), "--threads", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    assert_eq!(header(&out.join("summary.csv")), "nu,s,status,rvite,mean_energy,mean_pressure,wall_seconds,speedup,rvite_warning");
    assert_eq!(header(&out.join("energy_deviation.csv")), "nu,s,bin_lo,bin_hi,count,fraction");
    assert_eq!(header(&out.join("pressure_histogram.csv")), "nu,s,bin_lo,bin_hi,count,fraction");
    for s in [1, 2] {
        let d = out.join(format!("nu0.4_s{s}"));
        assert_eq!(header(&d.join("energies.csv")), "iteration,kinetic,pot_2b,pot_3b,total");
        assert_eq!(header(&d.join("pressure.csv")), "iteration,P");
        assert_eq!(header(&d.join("rdf.csv")), "r,g");
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().skip(1).all(|l| l.split(',').nth(2) == Some("ok")));
}

#[test]
fn sweep_covers_the_grid_and_compare_adds_rdf_table() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = scenario(tmp.path(), "tiny.scn", &format!("{}periodic = true\ncontainer = linked_cells\nrdf_every = 4\n", TINY.replace("box = 3", "box = 6")));
    let out = tmp.path().join("sweep");
    assert!(bin(&["sweep", scn.to_str().unwrap(), "--output", out.to_str().unwrap()]).status.success());
    let rows = std::fs::read_to_string(out.join("summary.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows, 4);

    let cmp = tmp.path().join("cmp");
    assert!(bin(&["compare", scn.to_str().unwrap(), "--output", cmp.to_str().unwrap()]).status.success());
    assert_eq!(header(&cmp.join("rdf_compare.csv")), "r,g_pure_2b,g_nu0.4_s1,g_nu0.4_s2");
    assert!(std::fs::read_to_string(cmp.join("rdf_compare.csv")).unwrap().lines().count() > 1);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = out.to_str().unwrap();

    let bad = scenario(tmp.path(), "bad.scn", "particles = 8\niterations = 10\nstep_size_factors = 1,3\n");
    assert_eq!(bin(&["run", bad.to_str().unwrap(), "--output", o]).status.code(), Some(1));
    let unknown = scenario(tmp.path(), "unknown.scn", "colour = red\n");
    assert_eq!(bin(&["run", unknown.to_str().unwrap(), "--output", o]).status.code(), Some(1));

    let blowup = scenario(tmp.path(), "blowup.scn", &TINY.replace("dt = 0.002", "dt = 1e300"));
    assert_eq!(bin(&["run", blowup.to_str().unwrap(), "--output", o]).status.code(), Some(2));

    let missing = tmp.path().join("missing.scn");
    assert_eq!(bin(&["run", missing.to_str().unwrap(), "--output", o]).status.code(), Some(3));
    let good = scenario(tmp.path(), "tiny.scn", TINY);
    let file = scenario(tmp.path(), "not_a_dir", "");
    assert_eq!(bin(&["run", good.to_str().unwrap(), "--output", file.join("x").to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn seed_flag_changes_the_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let scn = scenario(tmp.path(), "tiny.scn", TINY);
    let energies = |seed: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let o = bin(&["run", scn.to_str().unwrap(), "--seed", seed, "--threads", "1", "--output", out.to_str().unwrap()]);
        assert!(o.status.success());
        std::fs::read(out.join("nu0.4_s1").join("energies.csv")).unwrap()
    };
    assert_eq!(energies("7", "a"), energies("7", "b"));
    assert_ne!(energies("7", "a"), energies("8", "c"));
}

#[test]
fn check_passes() {
    let o = bin(&["check"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(stdout.lines().count() >= 3);
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn output_key_in_scenario_is_used() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from_file");
    let scn = scenario(tmp.path(), "tiny.scn", &format!("{TINY}output = {}\n", target.display()));
    assert!(bin(&["run", scn.to_str().unwrap()]).status.success());
    assert!(target.join("summary.csv").exists());
}
