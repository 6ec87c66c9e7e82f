use crate::error::{Error, Result};
use crate::model::ParticleSystem;
use crate::vec3::Vec3;

/// Linked-cells decomposition of the box.
#[derive(Clone, Debug, PartialEq)]
pub struct CellGrid {
    pub cells_per_dim: [usize; 3],
    pub cell_size: Vec3,
    /// Cell layers per dimension covered by the cutoff.
    pub reach: [usize; 3],
    pub cutoff: f64,
    pub periodic: bool,
    /// Particle indices per cell, ascending within each cell.
    pub cell_particles: Vec<Vec<usize>>,
    pub particle_cell: Vec<usize>,
}

impl CellGrid {
    /// Cells at least `r_c` wide (`floor(box / r_c)` per dimension). Periodic
    /// boxes narrower than three cutoffs get finer cells so that the
    /// `2·reach + 1` neighbour layers stay distinct.
    pub fn build(system: &ParticleSystem, cutoff: f64) -> Result<Self> {
        Self::build_with_subdivision(system, cutoff, 1)
    }

    /// Cells roughly `r_c / subdivision` wide, giving an interaction reach of
    /// about `subdivision` layers.
    pub fn build_with_subdivision(system: &ParticleSystem, cutoff: f64, subdivision: usize) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidConfig("cutoff must be > 0".into()));
        }
        if subdivision == 0 {
            return Err(Error::InvalidConfig("cell subdivision must be >= 1".into()));
        }
        let b = system.box_size;
        let edges = [b.x, b.y, b.z];
        let mut cells_per_dim = [1usize; 3];
        let mut size = [0.0; 3];
        let mut reach = [1usize; 3];
        for d in 0..3 {
            if system.periodic && edges[d] <= 2.0 * cutoff {
                return Err(Error::GridTooSmall { dim: d, edge: edges[d], cutoff });
            }
            let mut n = ((edges[d] * subdivision as f64 / cutoff).floor() as usize).max(1);
            loop {
                let cs = edges[d] / n as f64;
                let r = layers(cutoff, cs);
                // periodic offsets -r..=r must land in distinct cells
                if !system.periodic || n > 2 * r {
                    cells_per_dim[d] = n;
                    size[d] = cs;
                    reach[d] = r;
                    break;
                }
                n += 1;
            }
        }

        let total = cells_per_dim.iter().product();
        let mut cell_particles = vec![Vec::new(); total];
        let mut particle_cell = Vec::with_capacity(system.len());
        for (i, p) in system.positions.iter().enumerate() {
            let c = cell_of(*p, size, cells_per_dim);
            let idx = linear(c, cells_per_dim);
            cell_particles[idx].push(i);
            particle_cell.push(idx);
        }

        Ok(CellGrid {
            cells_per_dim,
            cell_size: Vec3::from(size),
            reach,
            cutoff,
            periodic: system.periodic,
            cell_particles,
            particle_cell,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cell_particles.len()
    }

    /// Largest per-dimension reach.
    pub fn interaction_reach(&self) -> usize {
        *self.reach.iter().max().unwrap()
    }

    pub fn coords(&self, cell: usize) -> [usize; 3] {
        let [nx, ny, _] = self.cells_per_dim;
        [cell % nx, (cell / nx) % ny, cell / (nx * ny)]
    }

    /// Cell at `offset` from `cell`: wrapped when periodic, `None` outside a
    /// non-periodic grid.
    pub fn neighbor(&self, cell: usize, offset: [i32; 3]) -> Option<usize> {
        let c = self.coords(cell);
        let mut out = [0usize; 3];
        for d in 0..3 {
            let n = self.cells_per_dim[d] as i64;
            let x = c[d] as i64 + offset[d] as i64;
            out[d] = if self.periodic {
                x.rem_euclid(n) as usize
            } else if x < 0 || x >= n {
                return None;
            } else {
                x as usize
            };
        }
        Some(linear(out, self.cells_per_dim))
    }
}

/// Clamped cell coordinates. Clamping keeps particles that left a
/// non-periodic box in the boundary layer; it never increases the cell
/// distance between two particles, so no interaction is lost.
#[inline]
/// Cell layers needed to cover `cutoff` with cells of width `cs`.
fn layers(cutoff: f64, cs: f64) -> usize {
    let mut r = (cutoff / cs).ceil().max(1.0) as usize;
    if r > 1 && (r - 1) as f64 * cs >= cutoff {
        r -= 1;
    }
    r
}

fn cell_of(p: Vec3, size: [f64; 3], n: [usize; 3]) -> [usize; 3] {
    let mut c = [0usize; 3];
    for d in 0..3 {
        let x = (p[d] / size[d]).floor();
        c[d] = if x <= 0.0 || x.is_nan() {
            0
        } else {
            (x as usize).min(n[d] - 1)
        };
    }
    c
}

#[inline]
fn linear(c: [usize; 3], n: [usize; 3]) -> usize {
    c[0] + n[0] * (c[1] + n[1] * c[2])
}
