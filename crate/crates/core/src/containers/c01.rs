//! C01 linked-cells traversals.
//!
//! Every cell acts once as the base cell and computes forces only for its own
//! particles, against partners from the surrounding cells. No force is ever
//! written to a particle outside the base cell, so base cells are processed
//! independently without locks; the price is that each pair is evaluated
//! twice and each triplet three times (once per member).

use super::cells::CellGrid;
use super::offsets::{pair_offsets, triplet_offsets, CellOffset, TripletOffsetPattern};
use super::PassSums;
use crate::error::{Error, Result};
use crate::model::{minimum_image, ForceField, ParticleSystem};
use crate::par;
use crate::potentials::{atm_triplet, lj_pair};
use crate::vec3::Vec3;

/// Offset lists for one grid geometry. Depends only on reach, cell size and
/// cutoff, never on particle data.
#[derive(Clone, Debug, PartialEq)]
pub struct C01Plan {
    pub pair_offsets: Vec<CellOffset>,
    pub triplet_patterns: Vec<TripletOffsetPattern>,
    /// `triplet_patterns` as positions in `pair_offsets`.
    pattern_slots: Vec<(usize, usize)>,
}

impl C01Plan {
    pub fn new(grid: &CellGrid) -> Self {
        let pair = pair_offsets(grid.reach, grid.cell_size, grid.cutoff);
        let patterns = triplet_offsets(grid.reach, grid.cell_size, grid.cutoff);
        let slot = |o: CellOffset| pair.iter().position(|&p| p == o).expect("pattern offset in pair list");
        let pattern_slots = patterns.iter().map(|p| (slot(p.c1), slot(p.c2))).collect();
        C01Plan { pair_offsets: pair, triplet_patterns: patterns, pattern_slots }
    }

    /// True if this plan was generated for the grid's geometry.
    pub fn matches(&self, grid: &CellGrid) -> bool {
        self.pair_offsets == pair_offsets(grid.reach, grid.cell_size, grid.cutoff)
    }
}

/// Forces on the particles of one base cell plus its share of the scalars.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTask {
    pub cell: usize,
    /// Aligned with `grid.cell_particles[cell]`.
    pub forces: Vec<Vec3>,
    pub sums: PassSums,
}

impl CellTask {
    /// Adds the task's forces to the owning particles' entries.
    pub fn scatter(&self, grid: &CellGrid, forces: &mut [Vec3]) {
        for (&i, f) in grid.cell_particles[self.cell].iter().zip(&self.forces) {
            forces[i] += *f;
        }
    }
}

fn with_indices(err: Error, i: usize, j: usize) -> Error {
    match err {
        Error::CoincidentParticles { distance, .. } => Error::CoincidentParticles { distance, indices: Some((i, j)) },
        other => other,
    }
}

fn resolve_neighbors(grid: &CellGrid, plan: &C01Plan, cell: usize) -> Vec<Option<usize>> {
    plan.pair_offsets.iter().map(|&o| grid.neighbor(cell, o)).collect()
}

/// Calls `visit(slot, i, j, disp_ij)` for every within-cutoff partner `j` of
/// each particle `i` of the base cell (`slot` is `i`'s position in the cell).
pub fn for_each_cell_pair<F>(grid: &CellGrid, system: &ParticleSystem, plan: &C01Plan, cell: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, usize, usize, Vec3) -> Result<()>,
{
    let rc2 = grid.cutoff * grid.cutoff;
    let pos = &system.positions;
    let neighbors = resolve_neighbors(grid, plan, cell);
    for (slot, &i) in grid.cell_particles[cell].iter().enumerate() {
        let xi = pos[i];
        for nb in neighbors.iter().flatten() {
            for &j in &grid.cell_particles[*nb] {
                if j == i {
                    continue;
                }
                let d = minimum_image(xi - pos[j], system.box_size, system.periodic);
                if d.norm2() <= rc2 {
                    visit(slot, i, j, d)?;
                }
            }
        }
    }
    Ok(())
}

/// Calls `visit(slot, i, j, k, to_j, to_k)` for every within-cutoff triplet
/// with `i` in the base cell, where `to_j = x_j - x_i` and `to_k = x_k - x_i`.
///
/// Partners are drawn from the pattern cells `(c1, c2)`: `j` from `c1`, `k`
/// from `c2`, with `j < k` when `c1 == c2` and `i` itself skipped.
pub fn for_each_cell_triplet<F>(
    grid: &CellGrid,
    system: &ParticleSystem,
    plan: &C01Plan,
    cell: usize,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(usize, usize, usize, usize, Vec3, Vec3) -> Result<()>,
{
    let rc2 = grid.cutoff * grid.cutoff;
    let pos = &system.positions;
    let neighbors = resolve_neighbors(grid, plan, cell);
    // within-cutoff partners of the current base particle, per offset
    let mut partners: Vec<Vec<(usize, Vec3)>> = vec![Vec::new(); neighbors.len()];

    for (slot, &i) in grid.cell_particles[cell].iter().enumerate() {
        let xi = pos[i];
        for (list, nb) in partners.iter_mut().zip(&neighbors) {
            list.clear();
            if let Some(nb) = nb {
                for &j in &grid.cell_particles[*nb] {
                    if j == i {
                        continue;
                    }
                    let d = minimum_image(pos[j] - xi, system.box_size, system.periodic);
                    if d.norm2() <= rc2 {
                        list.push((j, d));
                    }
                }
            }
        }

        for &(s1, s2) in &plan.pattern_slots {
            let first = &partners[s1];
            if s1 == s2 {
                for (a, &(j, to_j)) in first.iter().enumerate() {
                    for &(k, to_k) in &first[a + 1..] {
                        if (to_k - to_j).norm2() <= rc2 {
                            visit(slot, i, j, k, to_j, to_k)?;
                        }
                    }
                }
            } else {
                for &(j, to_j) in first {
                    for &(k, to_k) in &partners[s2] {
                        if (to_k - to_j).norm2() <= rc2 {
                            visit(slot, i, j, k, to_j, to_k)?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Pair work of one base cell.
pub fn pair_cell_task(grid: &CellGrid, system: &ParticleSystem, ff: &ForceField, plan: &C01Plan, cell: usize) -> Result<CellTask> {
    let mut forces = vec![Vec3::ZERO; grid.cell_particles[cell].len()];
    let mut sums = PassSums::default();
    for_each_cell_pair(grid, system, plan, cell, |slot, i, j, d| {
        let t = lj_pair(d, ff).map_err(|e| with_indices(e, i, j))?;
        forces[slot] += t.force;
        sums.potential += 0.5 * t.energy;
        sums.virial += 0.5 * t.virial;
        sums.visits += 1;
        Ok(())
    })?;
    Ok(CellTask { cell, forces, sums })
}

/// Triplet work of one base cell.
pub fn triplet_cell_task(
    grid: &CellGrid,
    system: &ParticleSystem,
    ff: &ForceField,
    plan: &C01Plan,
    cell: usize,
) -> Result<CellTask> {
    let mut forces = vec![Vec3::ZERO; grid.cell_particles[cell].len()];
    let mut sums = PassSums::default();
    let third = 1.0 / 3.0;
    for_each_cell_triplet(grid, system, plan, cell, |slot, i, j, _k, to_j, to_k| {
        let t = atm_triplet(to_j, to_k, ff.nu).map_err(|e| with_indices(e, i, j))?;
        forces[slot] += t.forces.f_i;
        sums.potential += third * t.energy;
        sums.virial += third * t.virial;
        sums.visits += 1;
        Ok(())
    })?;
    Ok(CellTask { cell, forces, sums })
}

/// Runs `task` for every base cell in parallel, then scatters forces and
/// reduces scalars in ascending cell order.
fn run_cells<T>(grid: &CellGrid, forces: &mut [Vec3], task: T) -> Result<PassSums>
where
    T: Fn(usize) -> Result<CellTask> + Sync + Send,
{
    let results = par::map_indexed(grid.num_cells(), |c| {
        if grid.cell_particles[c].is_empty() {
            Ok(None)
        } else {
            task(c).map(Some)
        }
    });
    let mut sums = PassSums::default();
    for r in results {
        if let Some(t) = r? {
            t.scatter(grid, forces);
            sums += t.sums;
        }
    }
    Ok(sums)
}

/// LJ forces on every particle, added into `forces` (zeroed by the caller).
pub fn c01_pair_pass(
    grid: &CellGrid,
    system: &ParticleSystem,
    ff: &ForceField,
    plan: &C01Plan,
    forces: &mut [Vec3],
) -> Result<PassSums> {
    run_cells(grid, forces, |c| pair_cell_task(grid, system, ff, plan, c))
}

/// ATM forces on every particle, added into `forces` (zeroed by the caller).
pub fn c01_triplet_pass(
    grid: &CellGrid,
    system: &ParticleSystem,
    ff: &ForceField,
    plan: &C01Plan,
    forces: &mut [Vec3],
) -> Result<PassSums> {
    run_cells(grid, forces, |c| triplet_cell_task(grid, system, ff, plan, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(positions: Vec<Vec3>, edge: f64, periodic: bool) -> ParticleSystem {
        ParticleSystem::new(positions, Vec3::splat(edge), periodic, 1.0).unwrap()
    }

    #[test]
    fn lj_minimum_pair() {
        let r = 2f64.powf(1.0 / 6.0);
        let s = sys(vec![Vec3::splat(1.0), Vec3::new(1.0 + r, 1.0, 1.0)], 10.0, true);
        let grid = CellGrid::build(&s, 2.5).unwrap();
        let plan = C01Plan::new(&grid);
        let mut f = vec![Vec3::ZERO; 2];
        let sums = c01_pair_pass(&grid, &s, &ForceField::reduced(0.0, 2.5), &plan, &mut f).unwrap();
        assert!(f[0].max_abs() < 1e-12 && f[1].max_abs() < 1e-12);
        assert!((sums.potential + 1.0).abs() < 1e-12);
        assert_eq!(sums.visits, 2);
    }

    #[test]
    fn single_particle_is_inert() {
        let s = sys(vec![Vec3::splat(4.0)], 10.0, true);
        let grid = CellGrid::build(&s, 2.5).unwrap();
        let plan = C01Plan::new(&grid);
        let mut f = vec![Vec3::ZERO; 1];
        let ff = ForceField::reduced(1.0, 2.5);
        assert_eq!(c01_pair_pass(&grid, &s, &ff, &plan, &mut f).unwrap(), PassSums::default());
        assert_eq!(c01_triplet_pass(&grid, &s, &ff, &plan, &mut f).unwrap(), PassSums::default());
        assert_eq!(f[0], Vec3::ZERO);
    }

    #[test]
    fn equilateral_triplet_in_one_cell() {
        let r = 1.2;
        let o = Vec3::new(0.6, 0.6, 0.6);
        let pts = vec![
            o,
            o + Vec3::new(r, 0.0, 0.0),
            o + Vec3::new(0.5 * r, 0.5 * 3f64.sqrt() * r, 0.0),
        ];
        let s = sys(pts.clone(), 10.0, true);
        let grid = CellGrid::build(&s, 2.5).unwrap();
        let plan = C01Plan::new(&grid);
        let ff = ForceField::reduced(0.8, 2.5);
        let mut f = vec![Vec3::ZERO; 3];
        let sums = c01_triplet_pass(&grid, &s, &ff, &plan, &mut f).unwrap();
        assert!((sums.potential - 1.375 * 0.8 / r.powi(9)).abs() < 1e-12);
        assert_eq!(sums.visits, 3);
        let exact = crate::potentials::atm_forces(pts[0], pts[1], pts[2], &ff, None).unwrap();
        for (a, b) in f.iter().zip([exact.f_i, exact.f_j, exact.f_k]) {
            assert!((*a - b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn offsets_do_not_depend_on_particles() {
        let a = sys(vec![Vec3::splat(1.0)], 10.0, true);
        let b = sys(vec![Vec3::splat(7.0), Vec3::splat(3.0)], 10.0, true);
        let pa = C01Plan::new(&CellGrid::build(&a, 2.5).unwrap());
        let pb = C01Plan::new(&CellGrid::build(&b, 2.5).unwrap());
        assert_eq!(pa, pb);
    }
}
