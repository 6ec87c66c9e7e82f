//! Runs scenario grids and writes their CSV outputs.
//!
//! Layout of an output directory:
//!
//! ```text
//! summary.csv               nu,s,status,rvite,mean_energy,mean_pressure,wall_seconds,speedup,rvite_warning
//! energy_deviation.csv      nu,s,bin_lo,bin_hi,count,fraction
//! pressure_histogram.csv    nu,s,bin_lo,bin_hi,count,fraction
//! rdf_compare.csv           r,<one g column per run>          (compare only)
//! nu<ν>_s<s>/energies.csv   iteration,kinetic,pot_2b,pot_3b,total
//! nu<ν>_s<s>/pressure.csv   iteration,P
//! nu<ν>_s<s>/rdf.csv        r,g                               (empty for open boxes)
//! ```
//!
//! Floats are written in shortest round-trip form. Empty fields mean "not
//! available" (failed run, or no s = 1 reference for speedup).

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::containers::{ForceEngine, InteractionSums};
use crate::error::Error;
use crate::integrators::{equilibrate, respa_run, EquilibrationReport, Observer, RespaSchedule};
use crate::model::{build_initial_system, ContainerKind, ParticleSystem, ScenarioConfig};
use crate::observables::{
    energy_deviation_histograms, pressure, rvite, total_energy, EnergyBreakdown, Histogram, ObservableSeries,
    RdfAccumulator,
};
use crate::scenario::ExperimentPlan;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Io { path: path.to_path_buf(), source: e.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    Ok,
    Failed(String),
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RunStatus::Ok)
    }
}

/// Everything measured at one (ν, s) grid point.
#[derive(Clone, Debug)]
pub struct PointResult {
    pub nu: f64,
    pub s: usize,
    pub status: RunStatus,
    pub energies: Vec<(usize, EnergyBreakdown)>,
    pub pressures: ObservableSeries,
    pub rdf: Vec<(f64, f64)>,
    pub rvite: Option<f64>,
    pub mean_energy: Option<f64>,
    pub mean_pressure: Option<f64>,
    pub wall_seconds: f64,
    pub speedup: Option<f64>,
    /// RVITE from a cutoff container mixes in cutoff noise.
    pub rvite_warning: bool,
    pub equilibration: Option<EquilibrationReport>,
}

impl PointResult {
    fn new(nu: f64, s: usize, container: ContainerKind) -> Self {
        PointResult {
            nu,
            s,
            status: RunStatus::Ok,
            energies: Vec::new(),
            pressures: ObservableSeries::new(),
            rdf: Vec::new(),
            rvite: None,
            mean_energy: None,
            mean_pressure: None,
            wall_seconds: 0.0,
            speedup: None,
            rvite_warning: container == ContainerKind::LinkedCells,
            equilibration: None,
        }
    }

    pub fn total_energy_series(&self) -> ObservableSeries {
        ObservableSeries::from_parts(
            self.energies.iter().map(|(i, _)| *i).collect(),
            self.energies.iter().map(|(_, e)| e.total).collect(),
        )
        .expect("observer records increasing iterations")
    }

    pub fn dir_name(&self) -> String {
        format!("nu{}_s{}", self.nu, self.s)
    }
}

struct Recorder {
    energies: Vec<(usize, EnergyBreakdown)>,
    pressures: ObservableSeries,
    rdf: Option<RdfAccumulator>,
    rdf_every: usize,
    next_rdf: usize,
    rdf_error: Option<Error>,
}

impl Observer for Recorder {
    fn observe(&mut self, iteration: usize, system: &ParticleSystem, sums: &InteractionSums) {
        self.energies.push((iteration, total_energy(system, sums)));
        // strictly increasing by construction
        let _ = self.pressures.push(iteration, pressure(system, sums));
        if let Some(acc) = self.rdf.as_mut() {
            if iteration >= self.next_rdf {
                if let Err(e) = acc.add_frame(system) {
                    self.rdf_error.get_or_insert(e);
                }
                while self.next_rdf <= iteration {
                    self.next_rdf += self.rdf_every;
                }
            }
        }
    }
}

/// Builds the shared initial state for `config` and equilibrates it with
/// velocity rescaling. Equilibration is skipped when `T = 0` or no steps are
/// configured.
pub fn prepare_system(config: &ScenarioConfig) -> Result<(ParticleSystem, Option<EquilibrationReport>), Error> {
    config.validate()?;
    let mut system = build_initial_system(config)?;
    if config.equilibration_steps == 0 || config.temperature == 0.0 {
        return Ok((system, None));
    }
    let mut engine = ForceEngine::new(config.force_field, config.container);
    let report = equilibrate(
        &mut system,
        &mut engine,
        config.dt,
        config.equilibration_steps,
        config.temperature,
        config.sampling.rescale_interval,
    )?;
    Ok((system, Some(report)))
}

/// Measurement run of `config` starting from `initial`. Blow-ups are
/// recorded in the result, not returned as errors.
pub fn run_point(config: &ScenarioConfig, initial: &ParticleSystem) -> PointResult {
    let nu = config.force_field.nu;
    let s = config.step_size_factor;
    let mut result = PointResult::new(nu, s, config.container);
    let sampling = &config.sampling;

    let rdf = if initial.periodic {
        let r_max = sampling.rdf_r_max.unwrap_or_else(|| RdfAccumulator::default_r_max(initial));
        match RdfAccumulator::new(r_max, sampling.rdf_bins) {
            Ok(acc) => Some(acc),
            Err(e) => {
                result.status = RunStatus::Failed(e.to_string());
                return result;
            }
        }
    } else {
        None
    };
    let mut recorder = Recorder {
        energies: Vec::new(),
        pressures: ObservableSeries::new(),
        rdf,
        rdf_every: sampling.rdf_every,
        next_rdf: 0,
        rdf_error: None,
    };

    let outcome = RespaSchedule::new(config.dt, s, config.iterations).and_then(|schedule| {
        let mut system = initial.clone();
        let mut engine = ForceEngine::new(config.force_field, config.container);
        let start = Instant::now();
        let r = respa_run(&mut system, &mut engine, &schedule, sampling.sample_every, &mut recorder);
        result.wall_seconds = start.elapsed().as_secs_f64();
        r
    });

    result.energies = recorder.energies;
    result.pressures = recorder.pressures;
    if let Some(acc) = recorder.rdf.filter(|a| a.frames() > 0) {
        result.rdf = acc.finish();
    }
    if let Err(e) = outcome.and(recorder.rdf_error.map_or(Ok(()), Err)) {
        result.status = RunStatus::Failed(e.to_string());
        return result;
    }

    let n = result.energies.len() as f64;
    if n > 0.0 {
        let mean_kinetic = result.energies.iter().map(|(_, e)| e.kinetic).sum::<f64>() / n;
        let series = result.total_energy_series();
        result.mean_energy = series.mean();
        result.rvite = rvite(&series, mean_kinetic).ok();
        result.mean_pressure = result.pressures.mean();
    }
    result
}

/// Results of a grid, in execution order.
#[derive(Clone, Debug, Default)]
pub struct ExperimentReport {
    pub points: Vec<PointResult>,
}

impl ExperimentReport {
    pub fn point(&self, nu: f64, s: usize) -> Option<&PointResult> {
        self.points.iter().find(|p| p.nu == nu && p.s == s)
    }

    pub fn all_failed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(|p| !p.status.is_ok())
    }

    fn fill_speedups(&mut self) {
        let base: BTreeMap<u64, f64> = self
            .points
            .iter()
            .filter(|p| p.s == 1 && p.status.is_ok())
            .map(|p| (p.nu.to_bits(), p.wall_seconds))
            .collect();
        for p in self.points.iter_mut().filter(|p| p.status.is_ok()) {
            if let Some(t1) = base.get(&p.nu.to_bits()) {
                p.speedup = Some(t1 / p.wall_seconds);
            }
        }
    }
}

/// Runs the listed `(ν, s)` points sequentially. Each distinct ν is
/// equilibrated once from the seeded initial state; all its s runs start
/// from that same equilibrated state.
pub fn run_points(
    base: &ScenarioConfig,
    points: &[(f64, usize)],
    progress: &mut dyn FnMut(&PointResult),
) -> Result<ExperimentReport, Error> {
    base.validate()?;
    let mut report = ExperimentReport::default();
    let mut prepared: Option<(f64, Result<(ParticleSystem, Option<EquilibrationReport>), Error>)> = None;
    for &(nu, s) in points {
        let mut config = base.clone();
        config.force_field.nu = nu;
        config.step_size_factor = s;
        config.validate()?;
        if prepared.as_ref().is_none_or(|(p, _)| p.to_bits() != nu.to_bits()) {
            prepared = Some((nu, prepare_system(&config)));
        }
        let result = match &prepared.as_ref().unwrap().1 {
            Ok((system, eq)) => {
                let mut r = run_point(&config, system);
                r.equilibration = eq.clone();
                r
            }
            Err(e) => {
                let mut r = PointResult::new(nu, s, config.container);
                r.status = RunStatus::Failed(format!("equilibration: {e}"));
                r
            }
        };
        progress(&result);
        report.points.push(result);
    }
    report.fill_speedups();
    Ok(report)
}

/// Full ν × s grid of a plan.
pub fn sweep_points(plan: &ExperimentPlan) -> Vec<(f64, usize)> {
    let ss = plan.s_values();
    plan.nu_values().into_iter().flat_map(|nu| ss.iter().map(move |&s| (nu, s))).collect()
}

/// The plan's base point, plus s = 1 when the reference toggle is on.
pub fn single_points(plan: &ExperimentPlan) -> Vec<(f64, usize)> {
    let nu = plan.base.force_field.nu;
    let mut ss = vec![plan.base.step_size_factor];
    if plan.reference && plan.base.step_size_factor != 1 {
        ss.insert(0, 1);
    }
    ss.into_iter().map(|s| (nu, s)).collect()
}

/// A pure two-body run (ν = 0, s = 1) followed by the plan's ν at every s.
pub fn compare_points(plan: &ExperimentPlan) -> Vec<(f64, usize)> {
    let nu = plan.base.force_field.nu;
    let mut pts = vec![(0.0, 1)];
    pts.extend(plan.s_values().into_iter().map(|s| (nu, s)));
    pts
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv<R: IntoIterator<Item = Vec<String>>>(path: &Path, header: &[&str], rows: R) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn histogram_rows(nu: f64, s: usize, h: &Histogram) -> Vec<Vec<String>> {
    let fr = h.fractions();
    (0..h.bins())
        .map(|b| {
            vec![
                nu.to_string(),
                s.to_string(),
                h.edges[b].to_string(),
                h.edges[b + 1].to_string(),
                h.counts[b].to_string(),
                fr[b].to_string(),
            ]
        })
        .collect()
}

/// One set of histograms per ν, built by `build` from that ν's runs.
fn grouped_histograms(
    report: &ExperimentReport,
    build: impl Fn(&[&PointResult]) -> Option<Vec<Histogram>>,
) -> Vec<Vec<String>> {
    let mut nus: Vec<f64> = Vec::new();
    for p in &report.points {
        if !nus.iter().any(|n| n.to_bits() == p.nu.to_bits()) {
            nus.push(p.nu);
        }
    }
    let mut rows = Vec::new();
    for nu in nus {
        let group: Vec<&PointResult> =
            report.points.iter().filter(|p| p.nu.to_bits() == nu.to_bits() && p.status.is_ok()).collect();
        if let Some(hists) = build(&group) {
            for (p, h) in group.iter().zip(&hists) {
                rows.extend(histogram_rows(nu, p.s, h));
            }
        }
    }
    rows
}

/// Writes all CSV outputs of `report` under `dir`.
pub fn write_report(report: &ExperimentReport, config: &ScenarioConfig, dir: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for p in &report.points {
        let sub = dir.join(p.dir_name());
        fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        write_csv(
            &sub.join("energies.csv"),
            &["iteration", "kinetic", "pot_2b", "pot_3b", "total"],
            p.energies.iter().map(|(i, e)| {
                vec![
                    i.to_string(),
                    e.kinetic.to_string(),
                    e.potential_2b.to_string(),
                    e.potential_3b.to_string(),
                    e.total.to_string(),
                ]
            }),
        )?;
        write_csv(
            &sub.join("pressure.csv"),
            &["iteration", "P"],
            p.pressures.iterations().iter().zip(p.pressures.values()).map(|(i, v)| vec![i.to_string(), v.to_string()]),
        )?;
        write_csv(&sub.join("rdf.csv"), &["r", "g"], p.rdf.iter().map(|(r, g)| vec![r.to_string(), g.to_string()]))?;
    }

    write_csv(
        &dir.join("summary.csv"),
        &["nu", "s", "status", "rvite", "mean_energy", "mean_pressure", "wall_seconds", "speedup", "rvite_warning"],
        report.points.iter().map(|p| {
            let status = match &p.status {
                RunStatus::Ok => "ok".to_string(),
                RunStatus::Failed(m) => format!("failed: {m}"),
            };
            vec![
                p.nu.to_string(),
                p.s.to_string(),
                status,
                fmt_opt(p.rvite),
                fmt_opt(p.mean_energy),
                fmt_opt(p.mean_pressure),
                p.wall_seconds.to_string(),
                fmt_opt(p.speedup),
                p.rvite_warning.to_string(),
            ]
        }),
    )?;

    let hist_header = ["nu", "s", "bin_lo", "bin_hi", "count", "fraction"];
    let energy_bins = config.sampling.energy_bins;
    let rows = grouped_histograms(report, |group| {
        let reference = group.iter().find(|p| p.s == 1)?.total_energy_series();
        let series: Vec<ObservableSeries> = group.iter().map(|p| p.total_energy_series()).collect();
        let refs: Vec<&ObservableSeries> = series.iter().collect();
        energy_deviation_histograms(&refs, &reference, energy_bins).ok()
    });
    write_csv(&dir.join("energy_deviation.csv"), &hist_header, rows)?;

    let pressure_bins = config.sampling.pressure_bins;
    let rows = grouped_histograms(report, |group| {
        let all: Vec<f64> = group.iter().flat_map(|p| p.pressures.values().iter().cloned()).collect();
        let template = Histogram::from_values(&all, pressure_bins).ok()?;
        Some(
            group
                .iter()
                .map(|p| {
                    let mut h = Histogram { edges: template.edges.clone(), counts: vec![0; pressure_bins] };
                    p.pressures.values().iter().for_each(|&v| {
                        h.insert(v);
                    });
                    h
                })
                .collect(),
        )
    });
    write_csv(&dir.join("pressure_histogram.csv"), &hist_header, rows)?;
    Ok(())
}

/// Writes `rdf_compare.csv`: one `g` column per successful run that produced
/// an RDF, labelled `g_pure_2b` for ν = 0 and `g_nu<ν>_s<s>` otherwise.
pub fn write_rdf_comparison(report: &ExperimentReport, dir: &Path) -> Result<(), ExperimentError> {
    let runs: Vec<&PointResult> = report.points.iter().filter(|p| p.status.is_ok() && !p.rdf.is_empty()).collect();
    let labels: Vec<String> = runs
        .iter()
        .map(|p| if p.nu == 0.0 { "g_pure_2b".to_string() } else { format!("g_nu{}_s{}", p.nu, p.s) })
        .collect();
    let mut header = vec!["r"];
    header.extend(labels.iter().map(String::as_str));
    let bins = runs.first().map_or(0, |p| p.rdf.len());
    let rows = (0..bins).map(|b| {
        let mut row = vec![runs[0].rdf[b].0.to_string()];
        row.extend(runs.iter().map(|p| p.rdf[b].1.to_string()));
        row
    });
    write_csv(&dir.join("rdf_compare.csv"), &header, rows)
}

/// Largest per-bin difference between two RDFs on the same bins.
pub fn max_rdf_difference(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.1 - y.1).abs()).fold(0.0, f64::max)
}
