//! Lennard-Jones 12-6 and Axilrod-Teller-Muto kernels.
//!
//! The ATM term is evaluated from the three squared side lengths
//! `A = r_ij²`, `B = r_ik²`, `C = r_jk²` alone. With `u = A + B - C`,
//! `v = A + C - B`, `w = B + C - A` the cosine product is
//! `cos θ_i cos θ_j cos θ_k = u v w / (8 A B C)`, so
//!
//! ```text
//! φ₃ = ν [ (ABC)^(-3/2) + 3/8 · u v w · (ABC)^(-5/2) ]
//! ```
//!
//! and forces follow from the chain rule through the three squared distances.
//! No trigonometry is involved.

use crate::error::{Error, Result};
use crate::model::{minimum_image, ForceField};
use crate::vec3::Vec3;

/// Separations below this are treated as a collision.
pub const MIN_DISTANCE: f64 = 1e-10;
const MIN_DISTANCE2: f64 = MIN_DISTANCE * MIN_DISTANCE;

/// Forces on the three members of a triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletForces {
    pub f_i: Vec3,
    pub f_j: Vec3,
    pub f_k: Vec3,
}

impl TripletForces {
    pub fn sum(&self) -> Vec3 {
        self.f_i + self.f_j + self.f_k
    }
}

#[inline]
fn coincident(r2: f64) -> Error {
    Error::CoincidentParticles { distance: r2.sqrt(), indices: None }
}

/// `4ε[(σ/r)¹² − (σ/r)⁶]`.
pub fn lj_energy(r: f64, ff: &ForceField) -> Result<f64> {
    if !(r >= MIN_DISTANCE) {
        return Err(coincident(r * r));
    }
    let s2 = ff.sigma * ff.sigma / (r * r);
    let s6 = s2 * s2 * s2;
    Ok(4.0 * ff.epsilon * (s6 * s6 - s6))
}

/// Force on particle `i` for `disp_ij = x_i - x_j`.
pub fn lj_force(disp_ij: Vec3, ff: &ForceField) -> Result<Vec3> {
    lj_pair(disp_ij, ff).map(|p| p.force)
}

/// Energy, force on `i` and virial `r_ij · F_ij` of one LJ pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTerm {
    pub energy: f64,
    pub force: Vec3,
    pub virial: f64,
}

#[inline]
pub fn lj_pair(disp_ij: Vec3, ff: &ForceField) -> Result<PairTerm> {
    let r2 = disp_ij.norm2();
    if !(r2 >= MIN_DISTANCE2) {
        return Err(coincident(r2));
    }
    let s2 = ff.sigma * ff.sigma / r2;
    let s6 = s2 * s2 * s2;
    let s12 = s6 * s6;
    let energy = 4.0 * ff.epsilon * (s12 - s6);
    // r · F
    let virial = 24.0 * ff.epsilon * (2.0 * s12 - s6);
    Ok(PairTerm { energy, force: disp_ij * (virial / r2), virial })
}

/// Energy, forces and virial `Σ x·f` of one ATM triplet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripletTerm {
    pub energy: f64,
    pub forces: TripletForces,
    pub virial: f64,
}

/// Derivatives of φ₃ with respect to the squared side lengths.
#[derive(Clone, Copy, Debug)]
pub(crate) struct AtmScalars {
    pub energy: f64,
    pub d_a: f64,
    pub d_b: f64,
    pub d_c: f64,
}

/// ATM energy and its partial derivatives for squared sides `a = r_ij²`,
/// `b = r_ik²`, `c = r_jk²`.
#[inline(always)]
pub(crate) fn atm_scalars(a: f64, b: f64, c: f64, nu: f64) -> AtmScalars {
    let u = a + b - c;
    let v = a + c - b;
    let w = b + c - a;
    let p = u * v * w;
    let q = a * b * c;
    let inv_q = 1.0 / q;
    let q32 = inv_q * inv_q.sqrt();
    let q52 = q32 * inv_q;
    let energy = nu * (q32 + 0.375 * p * q52);

    // 1/a = bc/q, one division for everything
    let inv_a = b * c * inv_q;
    let inv_b = a * c * inv_q;
    let inv_c = a * b * inv_q;
    let vw = v * w;
    let uw = u * w;
    let uv = u * v;
    let p_a = vw + uw - uv;
    let p_b = vw - uw + uv;
    let p_c = -vw + uw + uv;
    let d_a = nu * (-1.5 * q32 * inv_a + 0.375 * q52 * (p_a - 2.5 * p * inv_a));
    let d_b = nu * (-1.5 * q32 * inv_b + 0.375 * q52 * (p_b - 2.5 * p * inv_b));
    let d_c = nu * (-1.5 * q32 * inv_c + 0.375 * q52 * (p_c - 2.5 * p * inv_c));
    AtmScalars { energy, d_a, d_b, d_c }
}

/// ATM triplet from displacements `to_j = x_j - x_i` and `to_k = x_k - x_i`.
/// The j–k side is taken as `to_k - to_j`.
#[inline(always)]
pub fn atm_triplet(to_j: Vec3, to_k: Vec3, nu: f64) -> Result<TripletTerm> {
    let j_to_k = to_k - to_j;
    let a = to_j.norm2();
    let b = to_k.norm2();
    let c = j_to_k.norm2();
    if !(a >= MIN_DISTANCE2) {
        return Err(coincident(a));
    }
    if !(b >= MIN_DISTANCE2) {
        return Err(coincident(b));
    }
    if !(c >= MIN_DISTANCE2) {
        return Err(coincident(c));
    }
    let s = atm_scalars(a, b, c, nu);
    let f_i = to_j * (2.0 * s.d_a) + to_k * (2.0 * s.d_b);
    let f_j = to_j * (-2.0 * s.d_a) + j_to_k * (2.0 * s.d_c);
    let f_k = to_k * (-2.0 * s.d_b) - j_to_k * (2.0 * s.d_c);
    let virial = -2.0 * (a * s.d_a + b * s.d_b + c * s.d_c);
    Ok(TripletTerm { energy: s.energy, forces: TripletForces { f_i, f_j, f_k }, virial })
}

/// Displacements from `x_i` to `x_j` and `x_k` (nearest image when a box is
/// given). Periodic triplets are assembled around `x_i`.
#[inline]
fn triplet_displacements(x_i: Vec3, x_j: Vec3, x_k: Vec3, periodic_box: Option<Vec3>) -> (Vec3, Vec3) {
    match periodic_box {
        Some(b) => (minimum_image(x_j - x_i, b, true), minimum_image(x_k - x_i, b, true)),
        None => (x_j - x_i, x_k - x_i),
    }
}

/// `ν [1 + 3 cos θ_i cos θ_j cos θ_k] / (r_ij r_ik r_jk)³`.
///
/// `periodic_box` selects nearest-image distances.
pub fn atm_energy(x_i: Vec3, x_j: Vec3, x_k: Vec3, ff: &ForceField, periodic_box: Option<Vec3>) -> Result<f64> {
    let (to_j, to_k) = triplet_displacements(x_i, x_j, x_k, periodic_box);
    atm_triplet(to_j, to_k, ff.nu).map(|t| t.energy)
}

pub fn atm_forces(
    x_i: Vec3,
    x_j: Vec3,
    x_k: Vec3,
    ff: &ForceField,
    periodic_box: Option<Vec3>,
) -> Result<TripletForces> {
    let (to_j, to_k) = triplet_displacements(x_i, x_j, x_k, periodic_box);
    atm_triplet(to_j, to_k, ff.nu).map(|t| t.forces)
}

/// `r_ij <= r_c` (inclusive).
pub fn within_cutoff_pair(x_i: Vec3, x_j: Vec3, r_c: f64, periodic_box: Option<Vec3>) -> bool {
    let d = match periodic_box {
        Some(b) => minimum_image(x_i - x_j, b, true),
        None => x_i - x_j,
    };
    d.norm2() <= r_c * r_c
}

/// All three sides of the triplet are within `r_c`. Under periodic
/// boundaries `j` and `k` are taken as the nearest images of `i` and the
/// `j`-`k` side is measured between those images, so the triangle is one
/// geometric object.
pub fn within_cutoff_triplet(x_i: Vec3, x_j: Vec3, x_k: Vec3, r_c: f64, periodic_box: Option<Vec3>) -> bool {
    let (to_j, to_k) = triplet_displacements(x_i, x_j, x_k, periodic_box);
    let rc2 = r_c * r_c;
    to_j.norm2() <= rc2 && to_k.norm2() <= rc2 && (to_k - to_j).norm2() <= rc2
}
