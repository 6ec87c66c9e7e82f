//! Time integration: velocity Störmer-Verlet, single-loop r-RESPA with the
//! three-body force on the slow time scale, and a velocity-rescaling
//! equilibration phase.

use crate::containers::{ForceClasses, ForceEngine, InteractionSums};
use crate::error::{Error, Result};
use crate::model::ParticleSystem;
use crate::vec3::Vec3;

/// Base time step, step-size factor `s` and iteration count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RespaSchedule {
    pub dt: f64,
    pub step_size_factor: usize,
    pub num_iterations: usize,
}

impl RespaSchedule {
    pub fn new(dt: f64, step_size_factor: usize, num_iterations: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig("dt must be > 0".into()));
        }
        if step_size_factor == 0 {
            return Err(Error::InvalidConfig("step-size factor must be >= 1".into()));
        }
        if !num_iterations.is_multiple_of(step_size_factor) {
            return Err(Error::InvalidConfig(format!(
                "iterations ({num_iterations}) must be a multiple of the step-size factor ({step_size_factor})"
            )));
        }
        Ok(RespaSchedule { dt, step_size_factor, num_iterations })
    }
}

/// Sampling callback, invoked with the iteration index of the current state,
/// the system and the latest pass scalars.
pub trait Observer {
    fn observe(&mut self, iteration: usize, system: &ParticleSystem, sums: &InteractionSums);
}

impl<F> Observer for F
where
    F: FnMut(usize, &ParticleSystem, &InteractionSums),
{
    fn observe(&mut self, iteration: usize, system: &ParticleSystem, sums: &InteractionSums) {
        self(iteration, system, sums)
    }
}

/// An observer that ignores everything.
pub struct NoObserver;

impl Observer for NoObserver {
    fn observe(&mut self, _: usize, _: &ParticleSystem, _: &InteractionSums) {}
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Observation stride for a run: states are only complete at multiples of
/// `s`, so the requested interval is rounded up to `lcm(sample_every, s)`.
/// A zero interval disables sampling.
pub fn sampling_stride(sample_every: usize, step_size_factor: usize) -> usize {
    lcm(sample_every, step_size_factor.max(1))
}

fn check_finite(system: &ParticleSystem, iteration: usize) -> Result<()> {
    let ok = system.positions.iter().all(|p| p.is_finite()) && system.velocities.iter().all(|v| v.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::NonFinite { iteration })
    }
}

fn sample_due(n: usize, stride: usize) -> bool {
    stride != 0 && n.is_multiple_of(stride)
}

/// r-RESPA with the two-body force on the base step `δt` and the three-body
/// force on `s·δt`.
///
/// Per iteration `i` (state `x^i, v^i`):
/// 1. if `i mod s == 0`: `v += (δt·s)/(2m) · F3(x^i)`
/// 2. `x^{i+1} = x^i + δt·v + δt²/(2m) · F2(x^i)` (wrapped when periodic)
/// 3. `v^{i+1} = v + δt/(2m) · (F2(x^i) + F2(x^{i+1}))`
/// 4. if `(i+1) mod s == 0`: recompute `F3(x^{i+1})` and
///    `v^{i+1} += (δt·s)/(2m) · F3(x^{i+1})`
///
/// Forces are computed on entry. The observer sees iteration 0 and every
/// iteration divisible by `sampling_stride(sample_every, s)`.
pub fn respa_run(
    system: &mut ParticleSystem,
    engine: &mut ForceEngine,
    schedule: &RespaSchedule,
    sample_every: usize,
    observer: &mut dyn Observer,
) -> Result<InteractionSums> {
    let RespaSchedule { dt, step_size_factor: s, num_iterations } = *schedule;
    if s == 0 || num_iterations % s != 0 {
        return Err(Error::InvalidConfig("iterations must be a multiple of the step-size factor".into()));
    }
    let stride = sampling_stride(sample_every, s);
    let m = system.mass;
    let slow_kick = dt * s as f64 / (2.0 * m);
    let half_kick = dt / (2.0 * m);
    let drift_force = dt * dt / (2.0 * m);

    let mut sums = engine.evaluate_all(system)?;
    if sample_due(0, stride) {
        observer.observe(0, system, &sums);
    }
    let mut f2_old = vec![Vec3::ZERO; system.len()];

    for i in 0..num_iterations {
        if i % s == 0 {
            for (v, f) in system.velocities.iter_mut().zip(&system.forces_3b) {
                *v += *f * slow_kick;
            }
        }
        for ((x, v), f) in system.positions.iter_mut().zip(&system.velocities).zip(&system.forces_2b) {
            *x += *v * dt + *f * drift_force;
        }
        if system.periodic {
            system.wrap_positions();
        }
        check_finite(system, i + 1)?;

        f2_old.copy_from_slice(&system.forces_2b);
        let (pair, _) = engine.evaluate(system, ForceClasses::TwoBody)?;
        sums.pair = pair.unwrap_or_default();
        for ((v, fo), fnew) in system.velocities.iter_mut().zip(&f2_old).zip(&system.forces_2b) {
            *v += (*fo + *fnew) * half_kick;
        }

        if (i + 1) % s == 0 {
            let (_, triplet) = engine.evaluate(system, ForceClasses::ThreeBody)?;
            sums.triplet = triplet.unwrap_or_default();
            for (v, f) in system.velocities.iter_mut().zip(&system.forces_3b) {
                *v += *f * slow_kick;
            }
        }
        check_finite(system, i + 1)?;

        if sample_due(i + 1, stride) {
            observer.observe(i + 1, system, &sums);
        }
    }
    Ok(sums)
}

/// One velocity Störmer-Verlet step with the combined force. `old` is scratch
/// space of length N.
fn verlet_step(
    system: &mut ParticleSystem,
    engine: &mut ForceEngine,
    dt: f64,
    old: &mut [Vec3],
    iteration: usize,
) -> Result<InteractionSums> {
    let m = system.mass;
    let half_kick = dt / (2.0 * m);
    let drift_force = dt * dt / (2.0 * m);
    for ((o, a), b) in old.iter_mut().zip(&system.forces_2b).zip(&system.forces_3b) {
        *o = *a + *b;
    }
    for ((x, v), f) in system.positions.iter_mut().zip(&system.velocities).zip(old.iter()) {
        *x += *v * dt + *f * drift_force;
    }
    if system.periodic {
        system.wrap_positions();
    }
    check_finite(system, iteration)?;
    let sums = engine.evaluate_all(system)?;
    for (((v, o), a), b) in system
        .velocities
        .iter_mut()
        .zip(old.iter())
        .zip(&system.forces_2b)
        .zip(&system.forces_3b)
    {
        *v += (*o + (*a + *b)) * half_kick;
    }
    check_finite(system, iteration)?;
    Ok(sums)
}

/// Plain velocity Störmer-Verlet with `F2 + F3` recomputed every step.
pub fn verlet_run(
    system: &mut ParticleSystem,
    engine: &mut ForceEngine,
    dt: f64,
    num_iterations: usize,
    sample_every: usize,
    observer: &mut dyn Observer,
) -> Result<InteractionSums> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig("dt must be > 0".into()));
    }
    let mut sums = engine.evaluate_all(system)?;
    if sample_due(0, sample_every) {
        observer.observe(0, system, &sums);
    }
    let mut old = vec![Vec3::ZERO; system.len()];
    for i in 0..num_iterations {
        sums = verlet_step(system, engine, dt, &mut old, i + 1)?;
        if sample_due(i + 1, sample_every) {
            observer.observe(i + 1, system, &sums);
        }
    }
    Ok(sums)
}

/// Equipartition temperature `(2/3) K / N`.
pub fn temperature(system: &ParticleSystem) -> f64 {
    2.0 / 3.0 * system.kinetic_energy() / system.len() as f64
}

/// Scales all velocities by `sqrt(target / T)` and returns the factor. A
/// system at rest is left alone (factor 1).
pub fn rescale_velocities(system: &mut ParticleSystem, target: f64) -> f64 {
    let t = temperature(system);
    if t <= 0.0 {
        return 1.0;
    }
    let factor = (target / t).sqrt();
    for v in &mut system.velocities {
        *v *= factor;
    }
    factor
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquilibrationReport {
    /// Every rescale factor applied, in order.
    pub rescale_factors: Vec<f64>,
    /// Mean temperature over the last 10% of the window, measured before
    /// each rescale.
    pub final_temperature: f64,
    /// `final_temperature` within 2% of the target.
    pub converged: bool,
}

/// Relative temperature tolerance for a successful equilibration.
pub const EQUILIBRATION_TOLERANCE: f64 = 0.02;

/// Verlet with velocity rescaling towards `target` every `rescale_interval`
/// steps. A miss of the 2% tolerance is reported, not raised.
pub fn equilibrate(
    system: &mut ParticleSystem,
    engine: &mut ForceEngine,
    dt: f64,
    steps: usize,
    target: f64,
    rescale_interval: usize,
) -> Result<EquilibrationReport> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidConfig("equilibration target temperature must be > 0".into()));
    }
    if rescale_interval == 0 {
        return Err(Error::InvalidConfig("rescale interval must be >= 1".into()));
    }
    if steps == 0 {
        let t = temperature(system);
        return Ok(EquilibrationReport {
            rescale_factors: Vec::new(),
            final_temperature: t,
            converged: (t - target).abs() <= EQUILIBRATION_TOLERANCE * target,
        });
    }
    let window_start = steps - steps.div_ceil(10);
    let mut window_sum = 0.0;
    let mut window_len = 0usize;
    let mut factors = Vec::new();

    engine.evaluate_all(system)?;
    let mut old = vec![Vec3::ZERO; system.len()];
    for step in 0..steps {
        verlet_step(system, engine, dt, &mut old, step + 1)?;
        if step >= window_start {
            window_sum += temperature(system);
            window_len += 1;
        }
        if (step + 1) % rescale_interval == 0 {
            factors.push(rescale_velocities(system, target));
        }
    }
    let final_temperature = window_sum / window_len as f64;
    Ok(EquilibrationReport {
        rescale_factors: factors,
        final_temperature,
        converged: (final_temperature - target).abs() <= EQUILIBRATION_TOLERANCE * target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ContainerKind, ForceField};

    fn free_particle() -> ParticleSystem {
        let mut s = ParticleSystem::new(vec![Vec3::splat(1.0)], Vec3::splat(10.0), false, 1.0).unwrap();
        s.velocities[0] = Vec3::new(1.0, 0.0, 0.0);
        s
    }

    #[test]
    fn schedule_requires_divisibility() {
        assert!(RespaSchedule::new(0.001, 12, 100).is_err());
        assert!(RespaSchedule::new(0.001, 12, 120).is_ok());
        assert!(RespaSchedule::new(0.0, 1, 10).is_err());
    }

    #[test]
    fn ballistic_motion() {
        let mut s = free_particle();
        let mut e = ForceEngine::new(ForceField::reduced(0.5, 2.5), ContainerKind::DirectSum);
        let sched = RespaSchedule::new(0.01, 4, 100).unwrap();
        respa_run(&mut s, &mut e, &sched, 0, &mut NoObserver).unwrap();
        assert!((s.positions[0] - Vec3::new(2.0, 1.0, 1.0)).max_abs() < 1e-12);
    }

    #[test]
    fn zero_iterations_change_nothing() {
        let mut s = free_particle();
        let before = s.clone();
        let mut e = ForceEngine::new(ForceField::reduced(0.5, 2.5), ContainerKind::DirectSum);
        verlet_run(&mut s, &mut e, 0.01, 0, 0, &mut NoObserver).unwrap();
        assert_eq!(s.positions, before.positions);
        assert_eq!(s.velocities, before.velocities);
        let report = equilibrate(&mut s, &mut e, 0.01, 0, 1.0, 10).unwrap();
        assert!(report.rescale_factors.is_empty());
        assert_eq!(s.velocities, before.velocities);
    }

    #[test]
    fn rescale_arithmetic() {
        let mut s = ParticleSystem::new(vec![Vec3::ZERO, Vec3::splat(2.0)], Vec3::splat(10.0), false, 1.0).unwrap();
        s.velocities = vec![Vec3::new(1.0, -2.0, 0.5), Vec3::new(-1.0, 2.0, -0.5)];
        let target = temperature(&s) / 4.0;
        let v0 = s.velocities.clone();
        let f = rescale_velocities(&mut s, target);
        assert!((f - 0.5).abs() < 1e-15);
        for (a, b) in s.velocities.iter().zip(&v0) {
            assert!((*a - *b * 0.5).max_abs() < 1e-15);
        }
    }

    #[test]
    fn observer_stride_respects_full_steps() {
        assert_eq!(sampling_stride(100, 12), 300);
        assert_eq!(sampling_stride(12, 6), 12);
        assert_eq!(sampling_stride(0, 3), 0);
        let mut s = free_particle();
        let mut e = ForceEngine::new(ForceField::reduced(0.0, 2.5), ContainerKind::DirectSum);
        let sched = RespaSchedule::new(0.01, 4, 24).unwrap();
        let mut seen = Vec::new();
        respa_run(&mut s, &mut e, &sched, 6, &mut |i: usize, _: &ParticleSystem, _: &InteractionSums| seen.push(i))
            .unwrap();
        assert_eq!(seen, vec![0, 12, 24]);
    }

    #[test]
    fn blow_up_is_reported() {
        let mut s = free_particle();
        s.velocities[0] = Vec3::new(f64::INFINITY, 0.0, 0.0);
        let mut e = ForceEngine::new(ForceField::reduced(0.0, 2.5), ContainerKind::DirectSum);
        let sched = RespaSchedule::new(0.01, 1, 10).unwrap();
        assert_eq!(respa_run(&mut s, &mut e, &sched, 0, &mut NoObserver), Err(Error::NonFinite { iteration: 1 }));
    }
}
