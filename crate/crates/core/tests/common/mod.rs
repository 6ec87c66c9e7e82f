#![allow(dead_code)]

use rand::Rng;
use respa_md::potentials::{atm_forces, lj_force};
use respa_md::{ForceField, ParticleSystem, Vec3};

pub fn lj_energy_ref(r: f64, eps: f64, sigma: f64) -> f64 {
    let sr6 = (sigma / r).powi(6);
    4.0 * eps * (sr6 * sr6 - sr6)
}

/// Textbook ATM form with the interior angles of the triangle.
pub fn atm_energy_ref(a: Vec3, b: Vec3, c: Vec3, nu: f64) -> f64 {
    let (ab, ac, bc) = (b - a, c - a, c - b);
    let (rab, rac, rbc) = (ab.norm(), ac.norm(), bc.norm());
    let cos_a = ab.dot(ac) / (rab * rac);
    let cos_b = (a - b).dot(bc) / (rab * rbc);
    let cos_c = (a - c).dot(b - c) / (rac * rbc);
    nu * (1.0 + 3.0 * cos_a * cos_b * cos_c) / (rab * rac * rbc).powi(3)
}

pub fn min_image_ref(mut d: Vec3, box_size: Vec3) -> Vec3 {
    for (x, l) in [(&mut d.x, box_size.x), (&mut d.y, box_size.y), (&mut d.z, box_size.z)] {
        while *x > 0.5 * l {
            *x -= l;
        }
        while *x < -0.5 * l {
            *x += l;
        }
    }
    d
}

pub fn separation(sys: &ParticleSystem, i: usize, j: usize) -> Vec3 {
    let d = sys.positions[i] - sys.positions[j];
    if sys.periodic {
        min_image_ref(d, sys.box_size)
    } else {
        d
    }
}

/// Five-point central difference of `f` at `x`.
pub fn derivative(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

pub fn with_component(v: Vec3, axis: usize, value: f64) -> Vec3 {
    let mut a = v.to_array();
    a[axis] = value;
    Vec3::from(a)
}

/// `-∇_p E` by finite differences, for each of the points in `xs`.
pub fn numeric_forces<const N: usize>(xs: [Vec3; N], energy: impl Fn(&[Vec3; N]) -> f64) -> [Vec3; N] {
    let h = 1e-4;
    let mut out = [Vec3::ZERO; N];
    for p in 0..N {
        let mut g = [0.0; 3];
        for (axis, gv) in g.iter_mut().enumerate() {
            *gv = -derivative(
                |x| {
                    let mut m = xs;
                    m[p] = with_component(m[p], axis, x);
                    energy(&m)
                },
                xs[p][axis],
                h,
            );
        }
        out[p] = Vec3::from(g);
    }
    out
}

pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v * (1.0 / n);
        }
    }
}

pub fn random_positions(rng: &mut impl Rng, n: usize, box_size: Vec3, periodic: bool, min_sep: f64) -> Vec<Vec3> {
    let mut pos: Vec<Vec3> = Vec::new();
    while pos.len() < n {
        let p = Vec3::new(
            rng.random_range(0.0..box_size.x),
            rng.random_range(0.0..box_size.y),
            rng.random_range(0.0..box_size.z),
        );
        let ok = pos.iter().all(|q| {
            let d = p - *q;
            let d = if periodic { min_image_ref(d, box_size) } else { d };
            d.norm() >= min_sep
        });
        if ok {
            pos.push(p);
        }
    }
    pos
}

pub fn random_system(rng: &mut impl Rng, n: usize, box_size: Vec3, periodic: bool, min_sep: f64) -> ParticleSystem {
    ParticleSystem::new(random_positions(rng, n, box_size, periodic, min_sep), box_size, periodic, 1.0).unwrap()
}

pub struct BruteForce {
    pub forces: Vec<Vec3>,
    pub energy: f64,
    pub count: usize,
}

/// Pairs within `cutoff` (all pairs when `None`).
pub fn brute_pairs(sys: &ParticleSystem, ff: &ForceField, cutoff: Option<f64>) -> BruteForce {
    let n = sys.len();
    let mut out = BruteForce { forces: vec![Vec3::ZERO; n], energy: 0.0, count: 0 };
    for i in 0..n {
        for j in i + 1..n {
            let d = separation(sys, i, j);
            if cutoff.is_some_and(|rc| d.norm() > rc) {
                continue;
            }
            let f = lj_force(d, ff).unwrap();
            out.forces[i] += f;
            out.forces[j] -= f;
            out.energy += lj_energy_ref(d.norm(), ff.epsilon, ff.sigma);
            out.count += 1;
        }
    }
    out
}

/// Triplets whose three sides are all within `cutoff` (all when `None`).
/// Periodic partners are the images nearest to `i`.
pub fn brute_triplets(sys: &ParticleSystem, ff: &ForceField, cutoff: Option<f64>) -> BruteForce {
    let n = sys.len();
    let mut out = BruteForce { forces: vec![Vec3::ZERO; n], energy: 0.0, count: 0 };
    let bx = sys.periodic.then_some(sys.box_size);
    for i in 0..n {
        for j in i + 1..n {
            let dij = separation(sys, j, i);
            if cutoff.is_some_and(|rc| dij.norm() > rc) {
                continue;
            }
            for k in j + 1..n {
                let dik = separation(sys, k, i);
                // j-k side between the images nearest to i
                let djk = dik - dij;
                if cutoff.is_some_and(|rc| dik.norm() > rc || djk.norm() > rc) {
                    continue;
                }
                let x = sys.positions[i];
                let t = atm_forces(x, sys.positions[j], sys.positions[k], ff, bx).unwrap();
                out.forces[i] += t.f_i;
                out.forces[j] += t.f_j;
                out.forces[k] += t.f_k;
                out.energy += atm_energy_ref(x, x + dij, x + dik, ff.nu);
                out.count += 1;
            }
        }
    }
    out
}

pub fn max_component_diff(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).max_abs()).fold(0.0, f64::max)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
