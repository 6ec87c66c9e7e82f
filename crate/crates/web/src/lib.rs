//! Browser demo bindings: potential curves, an r-RESPA energy trace and an
//! RVITE scan over step-size factors for a small open cluster.

use respa_md::integrators::{equilibrate, respa_run, RespaSchedule};
use respa_md::model::build_initial_system;
use respa_md::observables::{rvite, total_energy, ObservableSeries};
use respa_md::potentials::{atm_energy, lj_energy};
use respa_md::{ContainerKind, ForceEngine, ForceField, InteractionSums, ParticleSystem, ScenarioConfig, Vec3};
use wasm_bindgen::prelude::*;

/// Step-size factors offered by the scan.
pub const SCAN_FACTORS: [usize; 6] = [1, 2, 3, 4, 6, 12];

const DENSITY: f64 = 0.675;
const EQUILIBRATION: usize = 200;

/// Flattened `[r, u_lj, u_atm]` rows, `u_atm` for an equilateral triangle
/// of side `r`.
pub fn curves(nu: f64, r_min: f64, r_max: f64, samples: usize) -> respa_md::Result<Vec<f64>> {
    let ff = ForceField::reduced(nu, r_max.max(1.0) * 2.0);
    ff.validate()?;
    if !(r_min > 0.0 && r_max > r_min) || samples < 2 {
        return Err(respa_md::Error::InvalidConfig("need 0 < r_min < r_max and at least 2 samples".into()));
    }
    let mut out = Vec::with_capacity(3 * samples);
    for n in 0..samples {
        let r = r_min + (r_max - r_min) * n as f64 / (samples - 1) as f64;
        let tri = atm_energy(Vec3::ZERO, Vec3::new(r, 0.0, 0.0), Vec3::new(0.5 * r, 0.75f64.sqrt() * r, 0.0), &ff, None)?;
        out.extend([r, lj_energy(r, &ff)?, tri]);
    }
    Ok(out)
}

/// Equilibrated cluster of `particles` atoms at the toy density.
pub fn prepare(particles: usize, nu: f64, seed: u64) -> respa_md::Result<(ScenarioConfig, ParticleSystem)> {
    let mut c = ScenarioConfig::toy(nu);
    c.particle_count = particles;
    c.box_size = Vec3::splat((particles as f64 / DENSITY).cbrt());
    c.seed = seed;
    c.validate()?;
    let mut sys = build_initial_system(&c)?;
    let mut engine = ForceEngine::new(c.force_field, ContainerKind::DirectSum);
    equilibrate(&mut sys, &mut engine, c.dt, EQUILIBRATION, c.temperature, 10)?;
    Ok((c, sys))
}

/// Total energy after every outer step and the run's RVITE.
pub fn trace(config: &ScenarioConfig, start: &ParticleSystem, s: usize, iterations: usize) -> respa_md::Result<(Vec<f64>, f64)> {
    let mut sys = start.clone();
    let mut engine = ForceEngine::new(config.force_field, ContainerKind::DirectSum);
    let mut series = ObservableSeries::new();
    let mut kinetic = 0.0;
    let mut err = None;
    let mut obs = |it: usize, sys: &ParticleSystem, sums: &InteractionSums| {
        let e = total_energy(sys, sums);
        kinetic += e.kinetic;
        if let Err(x) = series.push(it, e.total) {
            err.get_or_insert(x);
        }
    };
    respa_run(&mut sys, &mut engine, &RespaSchedule::new(config.dt, s, iterations)?, s, &mut obs)?;
    if let Some(e) = err {
        return Err(e);
    }
    let r = rvite(&series, kinetic / series.len().max(1) as f64)?;
    Ok((series.values().to_vec(), r))
}

fn js(e: respa_md::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = potentialCurves)]
pub fn potential_curves(nu: f64, r_min: f64, r_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    curves(nu, r_min, r_max, samples).map_err(js)
}

#[wasm_bindgen]
pub struct Cluster {
    config: ScenarioConfig,
    start: ParticleSystem,
}

#[wasm_bindgen]
impl Cluster {
    #[wasm_bindgen(constructor)]
    pub fn new(particles: usize, nu: f64, seed: u32) -> Result<Cluster, JsError> {
        let (config, start) = prepare(particles, nu, seed.into()).map_err(js)?;
        Ok(Cluster { config, start })
    }

    /// Energy after each outer step; the RVITE is appended as the last value.
    #[wasm_bindgen(js_name = energyTrace)]
    pub fn energy_trace(&self, s: usize, iterations: usize) -> Result<Vec<f64>, JsError> {
        let (mut e, r) = trace(&self.config, &self.start, s, iterations).map_err(js)?;
        e.push(r);
        Ok(e)
    }

    /// RVITE for each of `scanFactors()`.
    #[wasm_bindgen(js_name = rviteScan)]
    pub fn rvite_scan(&self, iterations: usize) -> Result<Vec<f64>, JsError> {
        SCAN_FACTORS.iter().map(|&s| trace(&self.config, &self.start, s, iterations).map(|t| t.1).map_err(js)).collect()
    }
}

#[wasm_bindgen(js_name = scanFactors)]
pub fn scan_factors() -> Vec<u32> {
    SCAN_FACTORS.iter().map(|&s| s as u32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_lj_minimum() {
        let c = curves(0.5, 0.9, 2.5, 161).unwrap();
        let (rmin, _) = c.chunks(3).map(|r| (r[0], r[1])).fold((0.0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
        assert!((rmin - 2f64.powf(1.0 / 6.0)).abs() < 0.01);
        // equilateral: ν (1 + 3/8) / r⁹
        assert!((c[2] - 0.5 * 1.375 / 0.9f64.powi(9)).abs() < 1e-12);
        assert!(curves(0.5, 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn trace_reports_outer_steps() {
        let (c, sys) = prepare(20, 0.5, 1).unwrap();
        let (e, r) = trace(&c, &sys, 3, 60).unwrap();
        assert_eq!(e.len(), 21);
        assert!(r > 0.0 && r < 1e-2);
    }
}
