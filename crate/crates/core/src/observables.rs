//! Measurements: energies, RVITE, energy-deviation histograms, radial
//! distribution function, virial pressure and speedup.

use std::collections::BTreeMap;

use crate::containers::InteractionSums;
use crate::error::{Error, Result};
use crate::integrators::lcm;
use crate::model::ParticleSystem;
use crate::par;

pub use crate::integrators::temperature;

fn obs_err(msg: impl Into<String>) -> Error {
    Error::Observable(msg.into())
}

/// Scalar values indexed by strictly increasing iteration numbers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservableSeries {
    iterations: Vec<usize>,
    values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(iterations: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if iterations.len() != values.len() {
            return Err(obs_err("iteration and value sequences differ in length"));
        }
        if iterations.windows(2).any(|w| w[0] >= w[1]) {
            return Err(obs_err("iteration indices must be strictly increasing"));
        }
        Ok(ObservableSeries { iterations, values })
    }

    pub fn push(&mut self, iteration: usize, value: f64) -> Result<()> {
        if let Some(&last) = self.iterations.last() {
            if iteration <= last {
                return Err(obs_err(format!("iteration {iteration} does not follow {last}")));
            }
        }
        self.iterations.push(iteration);
        self.values.push(value);
        Ok(())
    }

    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.values.is_empty() {
            None
        } else {
            Some(self.values.iter().sum::<f64>() / self.values.len() as f64)
        }
    }

    /// Constant spacing between samples (1 for a single sample).
    pub fn stride(&self) -> Result<usize> {
        match self.iterations.len() {
            0 => Err(obs_err("empty series")),
            1 => Ok(1),
            _ => {
                let s = self.iterations[1] - self.iterations[0];
                if self.iterations.windows(2).all(|w| w[1] - w[0] == s) {
                    Ok(s)
                } else {
                    Err(obs_err("series is not sampled at a constant stride"))
                }
            }
        }
    }

    /// Samples whose iteration is a multiple of `stride`.
    pub fn restricted_to(&self, stride: usize) -> ObservableSeries {
        let (iterations, values) = self
            .iterations
            .iter()
            .zip(&self.values)
            .filter(|(i, _)| **i % stride == 0)
            .map(|(i, v)| (*i, *v))
            .unzip();
        ObservableSeries { iterations, values }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential_2b: f64,
    pub potential_3b: f64,
    pub total: f64,
}

/// Kinetic plus the potentials of the latest force passes.
pub fn total_energy(system: &ParticleSystem, sums: &InteractionSums) -> EnergyBreakdown {
    let kinetic = system.kinetic_energy();
    let potential_2b = sums.pair.potential;
    let potential_3b = sums.triplet.potential;
    EnergyBreakdown { kinetic, potential_2b, potential_3b, total: kinetic + potential_2b + potential_3b }
}

/// Relative variation in true energy: `(1/(K·J)) Σ |e(i) − ē|`.
pub fn rvite(energy: &ObservableSeries, mean_kinetic: f64) -> Result<f64> {
    if energy.is_empty() {
        return Err(obs_err("RVITE needs at least one energy sample"));
    }
    if !(mean_kinetic > 0.0) {
        return Err(obs_err("RVITE needs a positive mean kinetic energy"));
    }
    let j = energy.len() as f64;
    let mean = energy.values().iter().sum::<f64>() / j;
    let abs_dev: f64 = energy.values().iter().map(|e| (e - mean).abs()).sum();
    Ok(abs_dev / (mean_kinetic * j))
}

/// Equal-width histogram.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// `bins` equal bins over `[lo, hi]`. A degenerate range is widened
    /// symmetrically so the single value sits inside a bin.
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(obs_err("histogram needs at least one bin"));
        }
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(obs_err(format!("invalid histogram range [{lo}, {hi}]")));
        }
        let (lo, hi) = if hi > lo {
            (lo, hi)
        } else {
            let pad = 1e-12 * lo.abs().max(1.0);
            (lo - pad, hi + pad)
        };
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..=bins).map(|b| lo + width * b as f64).collect();
        edges[bins] = hi;
        Ok(Histogram { edges, counts: vec![0; bins] })
    }

    /// Histogram spanning the min–max range of `values`.
    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(obs_err("no values to histogram"));
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut h = Histogram::uniform(lo, hi, bins)?;
        for &v in values {
            h.insert(v);
        }
        Ok(h)
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_of(&self, x: f64) -> Option<usize> {
        let lo = self.edges[0];
        let hi = *self.edges.last().unwrap();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let b = ((x - lo) / (hi - lo) * self.bins() as f64).floor() as usize;
        Some(b.min(self.bins() - 1))
    }

    /// Counts `x`; values outside the range are dropped and reported.
    pub fn insert(&mut self, x: f64) -> bool {
        match self.bin_of(x) {
            Some(b) => {
                self.counts[b] += 1;
                true
            }
            None => false,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Counts normalised to sum to one.
    pub fn fractions(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Pointwise relative deviation `(e_s(i) − e_ref(i)) / |e_ref(i)|` on the
/// iterations common to both series' strides.
pub fn relative_deviations(series: &ObservableSeries, reference: &ObservableSeries) -> Result<ObservableSeries> {
    let common = lcm(series.stride()?, reference.stride()?);
    let a = series.restricted_to(common);
    let b = reference.restricted_to(common);
    if a.iterations() != b.iterations() || a.is_empty() {
        return Err(obs_err(format!(
            "series cannot be aligned: strides {} and {} give different sample sets",
            series.stride()?,
            reference.stride()?
        )));
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(e, r)| (e - r) / r.abs())
        .collect();
    ObservableSeries::from_parts(a.iterations, values)
}

/// Energy deviations of several runs from a reference run, histogrammed over
/// one shared min–max range with `bins` bins.
pub fn energy_deviation_histograms(
    series: &[&ObservableSeries],
    reference: &ObservableSeries,
    bins: usize,
) -> Result<Vec<Histogram>> {
    let devs = series
        .iter()
        .map(|s| relative_deviations(s, reference))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<f64> = devs.iter().flat_map(|d| d.values().iter().cloned()).collect();
    if all.is_empty() {
        return Err(obs_err("no samples to compare"));
    }
    let template = Histogram::from_values(&all, bins)?;
    Ok(devs
        .iter()
        .map(|d| {
            let mut h = Histogram { edges: template.edges.clone(), counts: vec![0; bins] };
            for &v in d.values() {
                h.insert(v);
            }
            h
        })
        .collect())
}

/// Default bin count of energy-deviation histograms.
pub const ENERGY_HISTOGRAM_BINS: usize = 50;
/// Default bin count of pressure histograms.
pub const PRESSURE_HISTOGRAM_BINS: usize = 20;

pub fn energy_deviation_histogram(
    series: &ObservableSeries,
    reference: &ObservableSeries,
    bins: usize,
) -> Result<Histogram> {
    Ok(energy_deviation_histograms(&[series], reference, bins)?.remove(0))
}

/// Radial distribution function accumulated over frames of a periodic system.
#[derive(Clone, Debug, PartialEq)]
pub struct RdfAccumulator {
    r_max: f64,
    counts: Vec<u64>,
    frames: usize,
    /// Σ over frames of N·ρ (ρ = N/V).
    norm: f64,
}

impl RdfAccumulator {
    pub fn new(r_max: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(r_max > 0.0 && r_max.is_finite()) {
            return Err(obs_err("RDF needs r_max > 0 and at least one bin"));
        }
        Ok(RdfAccumulator { r_max, counts: vec![0; bins], frames: 0, norm: 0.0 })
    }

    /// Half the smallest box edge.
    pub fn default_r_max(system: &ParticleSystem) -> f64 {
        0.5 * system.box_size.min_component()
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn add_frame(&mut self, system: &ParticleSystem) -> Result<()> {
        if !system.periodic {
            return Err(obs_err("RDF requires a periodic system"));
        }
        if self.r_max > Self::default_r_max(system) * (1.0 + 1e-12) {
            return Err(obs_err(format!(
                "r_max {} exceeds half the smallest box edge {}",
                self.r_max,
                Self::default_r_max(system)
            )));
        }
        let n = system.len();
        let bins = self.counts.len();
        let scale = bins as f64 / self.r_max;
        let r_max2 = self.r_max * self.r_max;
        let chunks = 16.min(n);
        let partial = par::map_indexed(chunks, |c| {
            let mut local = vec![0u64; bins];
            for i in (c..n).step_by(chunks) {
                for j in i + 1..n {
                    let r2 = system.displacement(i, j).norm2();
                    if r2 < r_max2 {
                        let b = ((r2.sqrt() * scale) as usize).min(bins - 1);
                        local[b] += 2;
                    }
                }
            }
            local
        });
        for local in partial {
            for (a, b) in self.counts.iter_mut().zip(local) {
                *a += b;
            }
        }
        self.frames += 1;
        let nf = n as f64;
        self.norm += nf * nf / system.volume();
        Ok(())
    }

    /// `(r, g(r))` at bin centres.
    pub fn finish(&self) -> Vec<(f64, f64)> {
        let bins = self.counts.len();
        let dr = self.r_max / bins as f64;
        (0..bins)
            .map(|b| {
                let lo = b as f64 * dr;
                let hi = lo + dr;
                let shell = 4.0 / 3.0 * std::f64::consts::PI * (hi.powi(3) - lo.powi(3));
                let g = if self.norm > 0.0 { self.counts[b] as f64 / (self.norm * shell) } else { 0.0 };
                (lo + 0.5 * dr, g)
            })
            .collect()
    }
}

/// RDF over a set of snapshots.
pub fn rdf(samples: &[ParticleSystem], r_max: f64, bins: usize) -> Result<Vec<(f64, f64)>> {
    let mut acc = RdfAccumulator::new(r_max, bins)?;
    for s in samples {
        acc.add_frame(s)?;
    }
    Ok(acc.finish())
}

/// `P = N·T/V + (W₂ + W₃)/(3V)`.
pub fn pressure_virial(temperature: f64, system: &ParticleSystem, pair_virial: f64, triplet_virial: f64) -> f64 {
    let v = system.volume();
    system.len() as f64 * temperature / v + (pair_virial + triplet_virial) / (3.0 * v)
}

/// Instantaneous pressure of a state with its pass scalars.
pub fn pressure(system: &ParticleSystem, sums: &InteractionSums) -> f64 {
    pressure_virial(temperature(system), system, sums.pair.virial, sums.triplet.virial)
}

/// `time(1) / time(s)` for every step-size factor.
pub fn speedup(timings: &BTreeMap<usize, f64>) -> Result<BTreeMap<usize, f64>> {
    let base = *timings.get(&1).ok_or_else(|| obs_err("speedup needs a timing for s = 1"))?;
    Ok(timings.iter().map(|(&s, &t)| (s, base / t)).collect())
}
