//! Cell offset lists for the C01 traversals.

use super::cells::CellGrid;
use crate::vec3::Vec3;

pub type CellOffset = [i32; 3];

/// Two partner cells relative to a base cell, with `c1 <= c2`
/// lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TripletOffsetPattern {
    pub c1: CellOffset,
    pub c2: CellOffset,
}

/// Distance between the closest points of two cells whose integer offsets
/// differ by `delta`. Zero for identical or touching cells.
pub fn min_cell_distance(delta: CellOffset, cell_size: Vec3) -> f64 {
    let mut d2 = 0.0;
    for d in 0..3 {
        let gap = (delta[d].unsigned_abs() as f64 - 1.0).max(0.0) * cell_size[d];
        d2 += gap * gap;
    }
    d2.sqrt()
}

fn within(delta: CellOffset, cell_size: Vec3, cutoff: f64) -> bool {
    min_cell_distance(delta, cell_size) <= cutoff
}

/// Every offset in the reach cube, in lexicographic order.
pub fn offset_cube(reach: [usize; 3]) -> Vec<CellOffset> {
    let r = reach.map(|x| x as i32);
    let mut out = Vec::new();
    for x in -r[0]..=r[0] {
        for y in -r[1]..=r[1] {
            for z in -r[2]..=r[2] {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Partner cells for the pair traversal, the base cell included.
pub fn pair_offsets(reach: [usize; 3], cell_size: Vec3, cutoff: f64) -> Vec<CellOffset> {
    offset_cube(reach)
        .into_iter()
        .filter(|&o| within(o, cell_size, cutoff))
        .collect()
}

/// All valid triplet patterns: `c1 <= c2`, and base↔c1, base↔c2 and c1↔c2
/// are each within the cutoff by closest-point cell distance.
pub fn triplet_offsets(reach: [usize; 3], cell_size: Vec3, cutoff: f64) -> Vec<TripletOffsetPattern> {
    let candidates = pair_offsets(reach, cell_size, cutoff);
    let mut out = Vec::new();
    for (a, &c1) in candidates.iter().enumerate() {
        for &c2 in &candidates[a..] {
            let delta = [c2[0] - c1[0], c2[1] - c1[1], c2[2] - c1[2]];
            if within(delta, cell_size, cutoff) {
                out.push(TripletOffsetPattern { c1, c2 });
            }
        }
    }
    out
}

pub fn generate_triplet_offsets(grid: &CellGrid) -> Vec<TripletOffsetPattern> {
    triplet_offsets(grid.reach, grid.cell_size, grid.cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_distance() {
        let cs = Vec3::splat(2.5);
        assert_eq!(min_cell_distance([0, 0, 0], cs), 0.0);
        assert_eq!(min_cell_distance([1, -1, 1], cs), 0.0);
        assert_eq!(min_cell_distance([2, 0, 0], cs), 2.5);
        assert!((min_cell_distance([2, 2, 0], cs) - 2.5 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn base_only_pattern_is_present() {
        let pats = triplet_offsets([1, 1, 1], Vec3::splat(2.5), 2.5);
        assert!(pats.contains(&TripletOffsetPattern { c1: [0, 0, 0], c2: [0, 0, 0] }));
    }

    #[test]
    fn opposite_corners_are_excluded() {
        // both within reach of the base, but two cells apart from each other
        let cs = Vec3::splat(2.5);
        let pats = triplet_offsets([1, 1, 1], cs, 2.4);
        assert!(!pats.contains(&TripletOffsetPattern { c1: [-1, 0, 0], c2: [1, 0, 0] }));
        assert!(pats.contains(&TripletOffsetPattern { c1: [-1, 0, 0], c2: [0, 1, 0] }));
    }

    #[test]
    fn ordering_invariant() {
        for pat in triplet_offsets([2, 2, 2], Vec3::splat(1.25), 2.5) {
            assert!(pat.c1 <= pat.c2);
        }
    }
}
