//! Direct summation over all distinct pairs and triplets, no cutoff.
//!
//! Newton's third law is used: every interaction is evaluated once and
//! applied to all members. Work is split into a fixed number of contiguous
//! ranges of the outermost index, balanced by interaction count. Each range
//! owns a private force buffer; buffers and scalars are merged in range order,
//! so the result does not depend on how many threads run the ranges.

use std::ops::Range;

use super::PassSums;
use crate::error::{Error, Result};
use crate::model::{ForceField, ParticleSystem};
use crate::par;
use crate::potentials::{atm_triplet, lj_pair};
use crate::vec3::Vec3;

const MAX_CHUNKS: usize = 32;

/// Splits `0..n` into at most `MAX_CHUNKS` contiguous ranges of roughly equal
/// total `weight`.
fn balanced_ranges(n: usize, weight: impl Fn(usize) -> f64) -> Vec<Range<usize>> {
    let total: f64 = (0..n).map(&weight).sum();
    let chunks = MAX_CHUNKS.min(n.max(1));
    let target = total / chunks as f64;
    let mut out = Vec::with_capacity(chunks);
    let mut start = 0;
    let mut acc = 0.0;
    for i in 0..n {
        acc += weight(i);
        if acc >= target && out.len() + 1 < chunks {
            out.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < n || out.is_empty() {
        out.push(start..n);
    }
    out
}

fn merge(n: usize, parts: Vec<Result<(Vec<Vec3>, PassSums)>>, forces: &mut [Vec3]) -> Result<PassSums> {
    debug_assert_eq!(forces.len(), n);
    let mut sums = PassSums::default();
    for part in parts {
        let (buf, s) = part?;
        for (f, b) in forces.iter_mut().zip(&buf) {
            *f += *b;
        }
        sums += s;
    }
    Ok(sums)
}

fn reject_periodic(system: &ParticleSystem) -> Result<()> {
    if system.periodic {
        Err(Error::PeriodicDirectSum)
    } else {
        Ok(())
    }
}

fn tag(err: Error, i: usize, j: usize) -> Error {
    match err {
        Error::CoincidentParticles { distance, .. } => Error::CoincidentParticles { distance, indices: Some((i, j)) },
        other => other,
    }
}

/// LJ forces over every pair `i < j`, added into `forces`.
pub fn direct_sum_pairs(system: &ParticleSystem, ff: &ForceField, forces: &mut [Vec3]) -> Result<PassSums> {
    reject_periodic(system)?;
    let n = system.len();
    let pos = &system.positions;
    let ranges = balanced_ranges(n, |i| (n - 1 - i) as f64);
    let parts = par::map_indexed(ranges.len(), |c| {
        let mut buf = vec![Vec3::ZERO; n];
        let mut sums = PassSums::default();
        for i in ranges[c].clone() {
            let xi = pos[i];
            let mut fi = Vec3::ZERO;
            for j in i + 1..n {
                let t = lj_pair(xi - pos[j], ff).map_err(|e| tag(e, i, j))?;
                fi += t.force;
                buf[j] -= t.force;
                sums.potential += t.energy;
                sums.virial += t.virial;
                sums.visits += 1;
            }
            buf[i] += fi;
        }
        Ok((buf, sums))
    });
    merge(n, parts, forces)
}

/// ATM forces over every triplet `i < j < k`, added into `forces`.
pub fn direct_sum_triplets(system: &ParticleSystem, ff: &ForceField, forces: &mut [Vec3]) -> Result<PassSums> {
    reject_periodic(system)?;
    let n = system.len();
    let pos = &system.positions;
    let ranges = balanced_ranges(n, |i| {
        let m = (n - 1 - i) as f64;
        m * (m - 1.0) * 0.5
    });
    let nu = ff.nu;
    let parts = par::map_indexed(ranges.len(), |c| {
        let mut buf = vec![Vec3::ZERO; n];
        let mut sums = PassSums::default();
        for i in ranges[c].clone() {
            let xi = pos[i];
            let mut fi = Vec3::ZERO;
            for j in i + 1..n {
                let to_j = pos[j] - xi;
                let mut fj = Vec3::ZERO;
                for k in j + 1..n {
                    let t = atm_triplet(to_j, pos[k] - xi, nu).map_err(|e| tag(e, i, j))?;
                    fi += t.forces.f_i;
                    fj += t.forces.f_j;
                    buf[k] += t.forces.f_k;
                    sums.potential += t.energy;
                    sums.virial += t.virial;
                    sums.visits += 1;
                }
                buf[j] += fj;
            }
            buf[i] += fi;
        }
        Ok((buf, sums))
    });
    merge(n, parts, forces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cluster(n: usize) -> ParticleSystem {
        let pos = (0..n)
            .map(|i| Vec3::new(i as f64 * 1.1, (i % 2) as f64 * 0.9, (i % 3) as f64 * 0.7))
            .collect();
        ParticleSystem::new(pos, Vec3::splat(10.0), false, 1.0).unwrap()
    }

    #[test]
    fn visit_counts_are_binomial() {
        let s = cluster(4);
        let ff = ForceField::reduced(1.0, 2.5);
        let mut f = vec![Vec3::ZERO; 4];
        assert_eq!(direct_sum_pairs(&s, &ff, &mut f).unwrap().visits, 6);
        assert_eq!(direct_sum_triplets(&s, &ff, &mut f).unwrap().visits, 4);
    }

    #[test]
    fn two_body_action_reaction() {
        let s = cluster(2);
        let mut f = vec![Vec3::ZERO; 2];
        direct_sum_pairs(&s, &ForceField::reduced(0.0, 2.5), &mut f).unwrap();
        assert_eq!(f[0] + f[1], Vec3::ZERO);
    }

    #[test]
    fn periodic_is_rejected() {
        let mut s = cluster(3);
        s.periodic = true;
        let mut f = vec![Vec3::ZERO; 3];
        let ff = ForceField::reduced(1.0, 2.5);
        assert_eq!(direct_sum_pairs(&s, &ff, &mut f), Err(Error::PeriodicDirectSum));
        assert_eq!(direct_sum_triplets(&s, &ff, &mut f), Err(Error::PeriodicDirectSum));
    }

    #[test]
    fn ranges_cover_everything_once() {
        for n in [1, 2, 5, 31, 32, 33, 200] {
            let r = balanced_ranges(n, |i| ((n - i) * (n - i)) as f64);
            assert_eq!(r.first().unwrap().start, 0);
            assert_eq!(r.last().unwrap().end, n);
            for w in r.windows(2) {
                assert_eq!(w[0].end, w[1].start);
            }
            assert!(r.len() <= MAX_CHUNKS);
        }
    }
}
