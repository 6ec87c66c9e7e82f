//! Domain types and system construction.
//!
//! Everything is in reduced units: lengths in σ, energies in ε, masses in m.
//! A typical Lennard-Jones mapping to physical units is
//!
//! | quantity    | reduced | physical                 |
//! |-------------|---------|--------------------------|
//! | length      | 1       | σ                        |
//! | energy      | 1       | ε                        |
//! | time        | 1       | σ·sqrt(m/ε)              |
//! | temperature | 1       | ε/k_B                    |
//! | ATM ν       | 1       | ε·σ⁹                     |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Lennard-Jones + Axilrod-Teller-Muto parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForceField {
    pub epsilon: f64,
    pub sigma: f64,
    pub nu: f64,
    /// Interaction cutoff. Ignored by direct summation.
    pub cutoff: f64,
}

impl ForceField {
    pub fn new(epsilon: f64, sigma: f64, nu: f64, cutoff: f64) -> Result<Self> {
        let ff = ForceField { epsilon, sigma, nu, cutoff };
        ff.validate()?;
        Ok(ff)
    }

    /// ε = σ = 1 with the given ATM strength and cutoff.
    pub fn reduced(nu: f64, cutoff: f64) -> Self {
        ForceField { epsilon: 1.0, sigma: 1.0, nu, cutoff }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.epsilon, self.sigma, self.nu, self.cutoff]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidConfig("force field parameters must be finite".into()));
        }
        // epsilon = 0 is allowed: it gives the non-interacting reference gas.
        if self.epsilon < 0.0 {
            return Err(Error::InvalidConfig("epsilon must be >= 0".into()));
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidConfig("sigma must be > 0".into()));
        }
        if self.nu < 0.0 {
            return Err(Error::InvalidConfig("nu must be >= 0".into()));
        }
        if self.cutoff <= 0.0 {
            return Err(Error::InvalidConfig("cutoff must be > 0".into()));
        }
        Ok(())
    }

    /// True when the three-body term vanishes identically.
    pub fn is_two_body_only(&self) -> bool {
        self.nu == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContainerKind {
    DirectSum,
    LinkedCells,
}

impl ContainerKind {
    pub fn name(self) -> &'static str {
        match self {
            ContainerKind::DirectSum => "direct_sum",
            ContainerKind::LinkedCells => "linked_cells",
        }
    }
}

impl std::str::FromStr for ContainerKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "direct_sum" => Ok(ContainerKind::DirectSum),
            "linked_cells" => Ok(ContainerKind::LinkedCells),
            other => Err(format!("unknown container '{other}' (expected direct_sum or linked_cells)")),
        }
    }
}

/// How often observables are recorded during a measurement run.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingConfig {
    /// Energy/pressure sampling interval in iterations. Samples are only
    /// taken at full r-RESPA steps, so the effective stride for a run with
    /// step-size factor `s` is `lcm(sample_every, s)`.
    pub sample_every: usize,
    /// RDF frame interval in iterations.
    pub rdf_every: usize,
    pub rdf_bins: usize,
    /// Defaults to half the smallest box edge.
    pub rdf_r_max: Option<f64>,
    pub energy_bins: usize,
    pub pressure_bins: usize,
    /// Thermostat interval during equilibration.
    pub rescale_interval: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            sample_every: 12,
            rdf_every: 100,
            rdf_bins: 200,
            rdf_r_max: None,
            energy_bins: 50,
            pressure_bins: 20,
            rescale_interval: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub particle_count: usize,
    pub box_size: Vec3,
    pub periodic: bool,
    pub mass: f64,
    pub dt: f64,
    pub iterations: usize,
    pub step_size_factor: usize,
    pub force_field: ForceField,
    pub temperature: f64,
    pub equilibration_steps: usize,
    pub seed: u64,
    pub container: ContainerKind,
    pub sampling: SamplingConfig,
}

impl ScenarioConfig {
    /// Reduced-units toy setup: 675 particles in a 10³ box for 24000 steps
    /// of δt = 0.001, direct summation.
    pub fn toy(nu: f64) -> Self {
        ScenarioConfig {
            particle_count: 675,
            box_size: Vec3::splat(10.0),
            periodic: false,
            mass: 1.0,
            dt: 0.001,
            iterations: 24000,
            step_size_factor: 1,
            force_field: ForceField::reduced(nu, 2.5),
            temperature: 1.1,
            equilibration_steps: 2000,
            seed: 42,
            container: ContainerKind::DirectSum,
            sampling: SamplingConfig::default(),
        }
    }

    /// Aluminium parameter set in reduced units (4995 atoms, 20³ box,
    /// δt = 0.00304, ν = 0.3095, T = 1.1).
    pub fn aluminium() -> Self {
        ScenarioConfig {
            particle_count: 4995,
            box_size: Vec3::splat(20.0),
            periodic: true,
            mass: 1.0,
            dt: 0.00304,
            iterations: 24000,
            step_size_factor: 1,
            force_field: ForceField::reduced(0.3095, 2.5),
            temperature: 1.1,
            equilibration_steps: 2000,
            seed: 42,
            container: ContainerKind::LinkedCells,
            sampling: SamplingConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.particle_count == 0 {
            return bad("particle_count must be >= 1");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be > 0");
        }
        if self.step_size_factor == 0 {
            return bad("step_size_factor must be >= 1");
        }
        if !self.iterations.is_multiple_of(self.step_size_factor) {
            return Err(Error::InvalidConfig(format!(
                "iterations ({}) must be a multiple of the step-size factor ({})",
                self.iterations, self.step_size_factor
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return bad("mass must be > 0");
        }
        let b = self.box_size;
        if !(b.is_finite() && b.x > 0.0 && b.y > 0.0 && b.z > 0.0) {
            return bad("box edges must be positive");
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return bad("temperature must be >= 0");
        }
        if self.periodic && self.container == ContainerKind::DirectSum {
            return Err(Error::PeriodicDirectSum);
        }
        let s = &self.sampling;
        if s.sample_every == 0 || s.rdf_every == 0 || s.rescale_interval == 0 {
            return bad("sampling intervals must be >= 1");
        }
        if s.rdf_bins == 0 || s.energy_bins == 0 || s.pressure_bins == 0 {
            return bad("bin counts must be >= 1");
        }
        self.force_field.validate()
    }
}

/// Particle state. All per-particle vectors share one length.
#[derive(Clone, Debug, PartialEq)]
pub struct ParticleSystem {
    pub positions: Vec<Vec3>,
    pub velocities: Vec<Vec3>,
    pub forces_2b: Vec<Vec3>,
    pub forces_3b: Vec<Vec3>,
    pub mass: f64,
    pub box_size: Vec3,
    pub periodic: bool,
}

impl ParticleSystem {
    /// Particles at rest at the given positions. Periodic positions are wrapped
    /// into the box.
    pub fn new(positions: Vec<Vec3>, box_size: Vec3, periodic: bool, mass: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidConfig("a system needs at least one particle".into()));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidConfig("mass must be > 0".into()));
        }
        if !(box_size.is_finite() && box_size.x > 0.0 && box_size.y > 0.0 && box_size.z > 0.0) {
            return Err(Error::InvalidConfig("box edges must be positive".into()));
        }
        if positions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidConfig("positions must be finite".into()));
        }
        let n = positions.len();
        let mut sys = ParticleSystem {
            positions,
            velocities: vec![Vec3::ZERO; n],
            forces_2b: vec![Vec3::ZERO; n],
            forces_3b: vec![Vec3::ZERO; n],
            mass,
            box_size,
            periodic,
        };
        if periodic {
            sys.wrap_positions();
        }
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.box_size.product()
    }

    /// `x_i - x_j`, using the nearest periodic image when periodic.
    #[inline]
    pub fn displacement(&self, i: usize, j: usize) -> Vec3 {
        minimum_image(self.positions[i] - self.positions[j], self.box_size, self.periodic)
    }

    pub fn wrap_positions(&mut self) {
        let b = self.box_size;
        for p in &mut self.positions {
            *p = wrap_into_box(*p, b);
        }
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * self.velocities.iter().map(|v| v.norm2()).sum::<f64>()
    }

    pub fn total_momentum(&self) -> Vec3 {
        self.velocities.iter().sum::<Vec3>() * self.mass
    }

    pub fn clear_forces(&mut self) {
        self.forces_2b.iter_mut().for_each(|f| *f = Vec3::ZERO);
        self.forces_3b.iter_mut().for_each(|f| *f = Vec3::ZERO);
    }
}

/// Nearest-image version of a displacement.
#[inline]
pub fn minimum_image(d: Vec3, box_size: Vec3, periodic: bool) -> Vec3 {
    if !periodic {
        return d;
    }
    Vec3::new(
        d.x - box_size.x * (d.x / box_size.x).round(),
        d.y - box_size.y * (d.y / box_size.y).round(),
        d.z - box_size.z * (d.z / box_size.z).round(),
    )
}

#[inline]
fn wrap_component(x: f64, l: f64) -> f64 {
    let w = x - l * (x / l).floor();
    // floor can leave w == l for tiny negative x
    if w >= l || w < 0.0 {
        0.0
    } else {
        w
    }
}

/// Maps a position into `[0, box)` per component.
#[inline]
pub fn wrap_into_box(p: Vec3, box_size: Vec3) -> Vec3 {
    Vec3::new(
        wrap_component(p.x, box_size.x),
        wrap_component(p.y, box_size.y),
        wrap_component(p.z, box_size.z),
    )
}

/// Smallest lattice spacing accepted by [`build_lattice_system`], in units of σ.
pub const MIN_LATTICE_SPACING: f64 = 0.5;

/// Places `particle_count` particles on a simple cubic lattice spanning the
/// box. Sites are at cell centres, `(index + 0.5) * spacing`; when the lattice
/// has more sites than particles the occupied sites are spread evenly over the
/// site list. Velocities and forces start at zero.
pub fn build_lattice_system(config: &ScenarioConfig) -> Result<ParticleSystem> {
    let n = config.particle_count;
    if n == 0 {
        return Err(Error::InvalidConfig("particle_count must be >= 1".into()));
    }
    let b = config.box_size;
    if !(b.is_finite() && b.x > 0.0 && b.y > 0.0 && b.z > 0.0) {
        return Err(Error::InvalidConfig("box edges must be positive".into()));
    }
    let min_spacing = MIN_LATTICE_SPACING * config.force_field.sigma;
    let dims = lattice_dims(n, b, min_spacing).ok_or(Error::LatticeCapacity {
        particles: n,
        min_spacing,
    })?;
    let spacing = Vec3::new(b.x / dims[0] as f64, b.y / dims[1] as f64, b.z / dims[2] as f64);
    let sites = dims[0] * dims[1] * dims[2];

    let positions = (0..n)
        .map(|m| {
            // evenly spread occupied sites; exact identity when sites == n
            let site = ((m as u128 * sites as u128) / n as u128) as usize;
            let ix = site % dims[0];
            let iy = (site / dims[0]) % dims[1];
            let iz = site / (dims[0] * dims[1]);
            Vec3::new(
                (ix as f64 + 0.5) * spacing.x,
                (iy as f64 + 0.5) * spacing.y,
                (iz as f64 + 0.5) * spacing.z,
            )
        })
        .collect();
    ParticleSystem::new(positions, b, config.periodic, config.mass)
}

/// Sites per dimension: the coarsest lattice with at least `n` sites whose
/// spacing stays >= `min_spacing` in every dimension.
fn lattice_dims(n: usize, b: Vec3, min_spacing: f64) -> Option<[usize; 3]> {
    let edges = [b.x, b.y, b.z];
    let max_dims = edges.map(|l| (l / min_spacing).floor() as usize);
    if max_dims.contains(&0) {
        return None;
    }
    let capacity = max_dims.iter().map(|&d| d as u128).product::<u128>();
    if capacity < n as u128 {
        return None;
    }
    let mut a = (b.product() / n as f64).cbrt();
    loop {
        let dims = [0, 1, 2].map(|d| ((edges[d] / a).floor() as usize).clamp(1, max_dims[d]));
        if dims.iter().map(|&d| d as u128).product::<u128>() >= n as u128 {
            return Some(dims);
        }
        a *= 0.995;
    }
}

/// Draws Maxwell-Boltzmann velocities at temperature `temperature` from a
/// seeded generator, removes the centre-of-mass drift and scales the result
/// to exactly `temperature`.
pub fn init_velocities(system: &mut ParticleSystem, temperature: f64, seed: u64) -> Result<()> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidConfig("temperature must be >= 0".into()));
    }
    if temperature == 0.0 {
        system.velocities.iter_mut().for_each(|v| *v = Vec3::ZERO);
        return Ok(());
    }
    let std_dev = (temperature / system.mass).sqrt();
    let normal = Normal::new(0.0, std_dev).expect("finite positive std dev");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in &mut system.velocities {
        *v = Vec3::new(normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng));
    }
    remove_drift(system);
    // hit the target exactly rather than up to sampling noise
    let t = 2.0 / 3.0 * system.kinetic_energy() / system.len() as f64;
    if t > 0.0 {
        let factor = (temperature / t).sqrt();
        system.velocities.iter_mut().for_each(|v| *v *= factor);
    }
    Ok(())
}

/// Shifts all velocities so that the total momentum vanishes.
pub fn remove_drift(system: &mut ParticleSystem) {
    let n = system.len() as f64;
    let mean = system.velocities.iter().sum::<Vec3>() / n;
    for v in &mut system.velocities {
        *v -= mean;
    }
}

/// Lattice system with velocities at the configured temperature.
pub fn build_initial_system(config: &ScenarioConfig) -> Result<ParticleSystem> {
    let mut sys = build_lattice_system(config)?;
    init_velocities(&mut sys, config.temperature, config.seed)?;
    Ok(sys)
}
