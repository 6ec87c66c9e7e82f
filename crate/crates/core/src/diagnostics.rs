//! Self-checks on small random systems: analytic forces against finite
//! differences, linked cells against brute-force loops, and the s = 1
//! r-RESPA path against plain Verlet.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::containers::ForceEngine;
use crate::error::Result;
use crate::integrators::{respa_run, verlet_run, NoObserver, RespaSchedule};
use crate::model::{init_velocities, minimum_image, ContainerKind, ForceField, ParticleSystem};
use crate::potentials::{atm_energy, atm_forces, lj_energy, lj_force, within_cutoff_pair, within_cutoff_triplet};
use crate::vec3::Vec3;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Uniform random positions with a minimum pair separation.
pub fn random_system(
    n: usize,
    box_size: Vec3,
    periodic: bool,
    min_separation: f64,
    rng: &mut impl Rng,
) -> Result<ParticleSystem> {
    let mut pos: Vec<Vec3> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while pos.len() < n {
        attempts += 1;
        if attempts > 1000 * n + 1000 {
            return Err(crate::Error::InvalidConfig(format!(
                "could not place {n} particles {min_separation} apart in the box"
            )));
        }
        let p = Vec3::new(
            rng.random::<f64>() * box_size.x,
            rng.random::<f64>() * box_size.y,
            rng.random::<f64>() * box_size.z,
        );
        if pos.iter().all(|q| minimum_image(p - *q, box_size, periodic).norm() >= min_separation) {
            pos.push(p);
        }
    }
    ParticleSystem::new(pos, box_size, periodic, 1.0)
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

fn central_difference(f: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

fn check_finite_differences(rng: &mut ChaCha8Rng, samples: usize) -> Result<CheckOutcome> {
    let ff = ForceField::reduced(0.7, 2.5);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut worst_sum: f64 = 0.0;
    let random_at = |rng: &mut ChaCha8Rng| {
        let r = rng.random_range(0.8..2.5);
        let dir = Vec3::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        dir * (r / dir.norm().max(1e-12))
    };
    for _ in 0..samples {
        let d = random_at(rng);
        let f = lj_force(d, &ff)?;
        for a in 0..3 {
            let shift = |x: f64| {
                let mut e = d.to_array();
                e[a] = x;
                lj_energy(Vec3::from(e).norm(), &ff)
            };
            worst = worst.max(rel_err(f[a], -central_difference(shift, d[a], h)?));
        }

        let xj = random_at(rng);
        let xk = random_at(rng);
        if (xj - xk).norm() < 0.8 {
            continue;
        }
        let xs = [Vec3::ZERO, xj, xk];
        let f = atm_forces(xs[0], xs[1], xs[2], &ff, None)?;
        let fs = [f.f_i, f.f_j, f.f_k];
        worst_sum = worst_sum.max(f.sum().max_abs());
        for p in 0..3 {
            for a in 0..3 {
                let shift = |x: f64| {
                    let mut m = xs;
                    let mut e = m[p].to_array();
                    e[a] = x;
                    m[p] = Vec3::from(e);
                    atm_energy(m[0], m[1], m[2], &ff, None)
                };
                let g = central_difference(shift, xs[p][a], h)?;
                // tiny components carry absolute, not relative, rounding error
                let scale = fs[p].norm().max(1e-3);
                worst = worst.max((fs[p][a] + g).abs() / scale);
            }
        }
    }
    Ok(CheckOutcome {
        name: "finite differences",
        passed: worst <= 1e-6 && worst_sum <= 1e-12,
        detail: format!("max relative force error {worst:.2e}, max |sum F| {worst_sum:.2e}"),
    })
}

fn brute_forces(system: &ParticleSystem, ff: &ForceField) -> Result<(Vec<Vec3>, f64)> {
    let n = system.len();
    let rc = ff.cutoff;
    let bx = system.periodic.then_some(system.box_size);
    let x = &system.positions;
    let mut f = vec![Vec3::ZERO; n];
    let mut u = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            if within_cutoff_pair(x[i], x[j], rc, bx) {
                let fij = lj_force(system.displacement(i, j), ff)?;
                f[i] += fij;
                f[j] -= fij;
                u += lj_energy(system.displacement(i, j).norm(), ff)?;
            }
            for k in j + 1..n {
                if within_cutoff_triplet(x[i], x[j], x[k], rc, bx) {
                    let t = atm_forces(x[i], x[j], x[k], ff, bx)?;
                    f[i] += t.f_i;
                    f[j] += t.f_j;
                    f[k] += t.f_k;
                    u += atm_energy(x[i], x[j], x[k], ff, bx)?;
                }
            }
        }
    }
    Ok((f, u))
}

fn check_linked_cells(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let ff = ForceField::reduced(0.5, 2.5);
    let mut worst_f: f64 = 0.0;
    let mut worst_u: f64 = 0.0;
    for _ in 0..3 {
        let edge = rng.random_range(7.5..9.0);
        let n = rng.random_range(20..60);
        let mut sys = random_system(n, Vec3::splat(edge), true, 0.85, rng)?;
        let (bf, bu) = brute_forces(&sys, &ff)?;
        let sums = ForceEngine::new(ff, ContainerKind::LinkedCells).evaluate_all(&mut sys)?;
        for i in 0..n {
            worst_f = worst_f.max((sys.forces_2b[i] + sys.forces_3b[i] - bf[i]).max_abs());
        }
        worst_u = worst_u.max(rel_err(sums.pair.potential + sums.triplet.potential, bu));
    }
    Ok(CheckOutcome {
        name: "linked cells vs brute force",
        passed: worst_f <= 1e-9 && worst_u <= 1e-10,
        detail: format!("max force difference {worst_f:.2e}, potential relative difference {worst_u:.2e}"),
    })
}

fn check_respa_identity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let ff = ForceField::reduced(0.5, 2.5);
    let mut start = random_system(12, Vec3::splat(4.0), false, 1.0, rng)?;
    init_velocities(&mut start, 0.5, rng.random())?;
    let steps = 200;
    let mut a = start.clone();
    let mut b = start;
    let mut engine = ForceEngine::new(ff, ContainerKind::DirectSum);
    respa_run(&mut a, &mut engine, &RespaSchedule::new(0.001, 1, steps)?, 0, &mut NoObserver)?;
    verlet_run(&mut b, &mut engine, 0.001, steps, 0, &mut NoObserver)?;
    let worst = a
        .positions
        .iter()
        .zip(&b.positions)
        .chain(a.velocities.iter().zip(&b.velocities))
        .map(|(p, q)| (*p - *q).max_abs())
        .fold(0.0, f64::max);
    Ok(CheckOutcome {
        name: "r-RESPA s=1 vs Verlet",
        passed: worst <= 1e-12,
        detail: format!("max component difference {worst:.2e} after {steps} steps"),
    })
}

/// Runs every check. Errors inside a check mark it failed.
pub fn run_checks(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let checks: [(&'static str, &dyn Fn(&mut ChaCha8Rng) -> Result<CheckOutcome>); 3] = [
        ("finite differences", &|r| check_finite_differences(r, 200)),
        ("linked cells vs brute force", &check_linked_cells),
        ("r-RESPA s=1 vs Verlet", &check_respa_identity),
    ];
    for (name, check) in checks {
        out.push(check(&mut rng).unwrap_or_else(|e| CheckOutcome { name, passed: false, detail: e.to_string() }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_checks(7) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn random_system_respects_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_system(30, Vec3::splat(6.0), true, 1.0, &mut rng).unwrap();
        for i in 0..30 {
            for j in i + 1..30 {
                assert!(s.displacement(i, j).norm() >= 1.0);
            }
        }
        assert!(random_system(1000, Vec3::splat(2.0), false, 1.0, &mut rng).is_err());
    }
}
