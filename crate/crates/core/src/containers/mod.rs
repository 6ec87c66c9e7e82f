//! Interaction enumeration: direct summation and linked cells.

pub mod c01;
pub mod cells;
pub mod direct;
pub mod offsets;

use std::ops::{Add, AddAssign};

pub use c01::{c01_pair_pass, c01_triplet_pass, for_each_cell_pair, for_each_cell_triplet, C01Plan, CellTask};
pub use cells::CellGrid;
pub use direct::{direct_sum_pairs, direct_sum_triplets};
pub use offsets::{generate_triplet_offsets, min_cell_distance, TripletOffsetPattern};

use crate::error::Result;
use crate::model::{ContainerKind, ForceField, ParticleSystem};
use crate::vec3::Vec3;

/// Scalar results of one force pass.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PassSums {
    pub potential: f64,
    /// `Σ r·F` over the pass's interactions.
    pub virial: f64,
    /// Kernel evaluations performed.
    pub visits: u64,
}

impl Add for PassSums {
    type Output = PassSums;
    fn add(self, o: PassSums) -> PassSums {
        PassSums {
            potential: self.potential + o.potential,
            virial: self.virial + o.virial,
            visits: self.visits + o.visits,
        }
    }
}

impl AddAssign for PassSums {
    fn add_assign(&mut self, o: PassSums) {
        *self = *self + o;
    }
}

/// Latest two-body and three-body pass results.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InteractionSums {
    pub pair: PassSums,
    pub triplet: PassSums,
}

/// Which force classes to recompute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForceClasses {
    TwoBody,
    ThreeBody,
    Both,
}

impl ForceClasses {
    fn pairs(self) -> bool {
        matches!(self, ForceClasses::TwoBody | ForceClasses::Both)
    }
    fn triplets(self) -> bool {
        matches!(self, ForceClasses::ThreeBody | ForceClasses::Both)
    }
}

/// Computes forces for a force field with the chosen container, caching the
/// linked-cells offset plan between evaluations.
#[derive(Clone, Debug)]
pub struct ForceEngine {
    pub force_field: ForceField,
    pub container: ContainerKind,
    subdivision: usize,
    plan: Option<C01Plan>,
}

impl ForceEngine {
    pub fn new(force_field: ForceField, container: ContainerKind) -> Self {
        ForceEngine { force_field, container, subdivision: 1, plan: None }
    }

    /// Linked cells of width about `r_c / subdivision`.
    pub fn with_subdivision(mut self, subdivision: usize) -> Self {
        self.subdivision = subdivision.max(1);
        self.plan = None;
        self
    }

    /// Recomputes the requested force classes, overwriting `forces_2b` /
    /// `forces_3b`. Classes not requested are left untouched and reported as
    /// `None`.
    pub fn evaluate(
        &mut self,
        system: &mut ParticleSystem,
        classes: ForceClasses,
    ) -> Result<(Option<PassSums>, Option<PassSums>)> {
        let ff = self.force_field;
        let mut f2 = std::mem::take(&mut system.forces_2b);
        let mut f3 = std::mem::take(&mut system.forces_3b);
        let result = self.evaluate_into(system, &ff, classes, &mut f2, &mut f3);
        system.forces_2b = f2;
        system.forces_3b = f3;
        result
    }

    fn evaluate_into(
        &mut self,
        system: &ParticleSystem,
        ff: &ForceField,
        classes: ForceClasses,
        f2: &mut [Vec3],
        f3: &mut [Vec3],
    ) -> Result<(Option<PassSums>, Option<PassSums>)> {
        if classes.pairs() {
            f2.iter_mut().for_each(|f| *f = Vec3::ZERO);
        }
        if classes.triplets() {
            f3.iter_mut().for_each(|f| *f = Vec3::ZERO);
        }
        // ν = 0: three-body forces vanish identically
        let run_triplets = classes.triplets() && !ff.is_two_body_only();

        match self.container {
            ContainerKind::DirectSum => {
                let pair = if classes.pairs() { Some(direct_sum_pairs(system, ff, f2)?) } else { None };
                let triplet = if run_triplets {
                    Some(direct_sum_triplets(system, ff, f3)?)
                } else if classes.triplets() {
                    reject_periodic_direct(system)?;
                    Some(PassSums::default())
                } else {
                    None
                };
                Ok((pair, triplet))
            }
            ContainerKind::LinkedCells => {
                let grid = CellGrid::build_with_subdivision(system, ff.cutoff, self.subdivision)?;
                let plan = match self.plan.take() {
                    Some(p) if p.matches(&grid) => p,
                    _ => C01Plan::new(&grid),
                };
                let pair = if classes.pairs() { Some(c01_pair_pass(&grid, system, ff, &plan, f2)?) } else { None };
                let triplet = if run_triplets {
                    Some(c01_triplet_pass(&grid, system, ff, &plan, f3)?)
                } else if classes.triplets() {
                    Some(PassSums::default())
                } else {
                    None
                };
                self.plan = Some(plan);
                Ok((pair, triplet))
            }
        }
    }

    /// Both force classes at the current positions.
    pub fn evaluate_all(&mut self, system: &mut ParticleSystem) -> Result<InteractionSums> {
        let (pair, triplet) = self.evaluate(system, ForceClasses::Both)?;
        Ok(InteractionSums { pair: pair.unwrap_or_default(), triplet: triplet.unwrap_or_default() })
    }
}

fn reject_periodic_direct(system: &ParticleSystem) -> Result<()> {
    if system.periodic {
        Err(crate::error::Error::PeriodicDirectSum)
    } else {
        Ok(())
    }
}
