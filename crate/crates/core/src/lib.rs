//! Molecular dynamics in reduced Lennard-Jones units with Lennard-Jones pair
//! forces, Axilrod-Teller-Muto triplet forces and a multiple-time-step
//! (r-RESPA) integrator that updates the triplet forces every `s` steps.
//!
//! ```
//! use respa_md::{ContainerKind, ForceEngine, ForceField, ParticleSystem, Vec3};
//!
//! let mut sys = ParticleSystem::new(
//!     vec![Vec3::new(1.0, 1.0, 1.0), Vec3::new(2.0, 1.0, 1.0), Vec3::new(1.5, 1.8, 1.0)],
//!     Vec3::splat(5.0),
//!     false,
//!     1.0,
//! )
//! .unwrap();
//! let mut engine = ForceEngine::new(ForceField::reduced(0.5, 2.5), ContainerKind::DirectSum);
//! let sums = engine.evaluate_all(&mut sys).unwrap();
//! assert_eq!(sums.triplet.visits, 1);
//! ```

pub mod containers;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod integrators;
pub mod model;
pub mod observables;
pub mod potentials;
pub mod scenario;
pub mod vec3;

mod par;

pub use containers::{ForceClasses, ForceEngine, InteractionSums, PassSums};
pub use error::{Error, Result};
pub use integrators::{equilibrate, respa_run, verlet_run, Observer, RespaSchedule};
pub use model::{ContainerKind, ForceField, ParticleSystem, SamplingConfig, ScenarioConfig};
pub use vec3::Vec3;
pub use scenario::{parse_scenario, ExperimentPlan};
