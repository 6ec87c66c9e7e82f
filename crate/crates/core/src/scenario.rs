//! Scenario files: line-oriented `key = value` text with optional sections.
//!
//! ```text
//! # toy run
//! [system]
//! particles = 675
//! box = 10 10 10
//! [force_field]
//! nu = 0.3
//! [sweep]
//! step_size_factors = 1,2,3
//! ```
//!
//! Sections are `[system]`, `[force_field]`, `[integration]`, `[sweep]` and
//! `[sampling]`. Keys before the first section header may come from any
//! section; keys inside a section must belong to it.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::error::Error;
use crate::model::ScenarioConfig;
use crate::vec3::Vec3;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] Error),
}

/// A base configuration plus the ν × s grid to run it on.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub base: ScenarioConfig,
    pub nu_sweep: Option<Vec<f64>>,
    pub step_size_factors: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
    /// Add an s = 1 run to the grid when the sweep lacks one.
    pub reference: bool,
}

impl ExperimentPlan {
    pub fn new(base: ScenarioConfig) -> Self {
        ExperimentPlan { base, nu_sweep: None, step_size_factors: None, output: None, reference: true }
    }

    /// ν values to run, in file order.
    pub fn nu_values(&self) -> Vec<f64> {
        self.nu_sweep.clone().unwrap_or_else(|| vec![self.base.force_field.nu])
    }

    /// Step-size factors to run, ascending and deduplicated.
    pub fn s_values(&self) -> Vec<usize> {
        let mut s = self.step_size_factors.clone().unwrap_or_else(|| vec![self.base.step_size_factor]);
        if self.reference {
            s.push(1);
        }
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.base.validate()?;
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if let Some(nus) = &self.nu_sweep {
            if nus.is_empty() {
                return bad("nu_sweep must not be empty".into());
            }
            for &nu in nus {
                if !(nu >= 0.0 && nu.is_finite()) {
                    return bad(format!("nu_sweep value {nu} must be finite and >= 0"));
                }
            }
        }
        if let Some(ss) = &self.step_size_factors {
            if ss.is_empty() {
                return bad("step_size_factors must not be empty".into());
            }
        }
        for s in self.s_values() {
            if s == 0 {
                return bad("step-size factors must be >= 1".into());
            }
            if !self.base.iterations.is_multiple_of(s) {
                return bad(format!(
                    "iterations ({}) must be a multiple of every step-size factor, {} does not divide it",
                    self.base.iterations, s
                ));
            }
        }
        Ok(())
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("system", &["particles", "box", "periodic", "mass", "temperature", "seed", "container"]),
    ("force_field", &["epsilon", "sigma", "nu", "cutoff"]),
    ("integration", &["dt", "iterations", "step_size_factor", "equilibration"]),
    ("sweep", &["step_size_factors", "nu_sweep", "reference", "output"]),
    (
        "sampling",
        &["sample_every", "rdf_every", "rdf_bins", "rdf_r_max", "energy_bins", "pressure_bins", "rescale_interval"],
    ),
];

fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS.iter().find(|(_, keys)| keys.contains(&key)).map(|(s, _)| *s)
}

/// Reads and validates a scenario file.
pub fn parse_scenario(path: impl AsRef<Path>) -> Result<ExperimentPlan, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    parse_scenario_str(&text)
}

/// Parses scenario text. Unspecified keys take the toy-scenario defaults.
pub fn parse_scenario_str(text: &str) -> Result<ExperimentPlan, ScenarioError> {
    let mut plan = ExperimentPlan::new(ScenarioConfig::toy(0.0));
    let mut section: Option<&str> = None;
    let mut seen: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| ScenarioError::Parse { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(format!("malformed section header `{content}`")))?;
            let name = name.trim();
            match SECTIONS.iter().find(|(s, _)| *s == name) {
                Some((s, _)) => section = Some(s),
                None => return Err(err(format!("unknown section `[{name}]`"))),
            }
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let home = section_of(key).ok_or_else(|| err(format!("unknown key `{key}`")))?;
        if let Some(current) = section {
            if current != home {
                return Err(err(format!("key `{key}` belongs in [{home}], not [{current}]")));
            }
        }
        if seen.iter().any(|k| k == key) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        if value.is_empty() {
            return Err(err(format!("missing value for `{key}`")));
        }
        apply(&mut plan, key, value).map_err(err)?;
    }

    plan.validate()?;
    Ok(plan)
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("`{key}`: cannot parse `{value}`"))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| num(key, t))
        .collect()
}

fn flag(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{key}`: expected true or false, found `{value}`")),
    }
}

fn apply(plan: &mut ExperimentPlan, key: &str, value: &str) -> Result<(), String> {
    let c = &mut plan.base;
    match key {
        "particles" => c.particle_count = num(key, value)?,
        "box" => {
            let edges: Vec<f64> = list(key, value)?;
            c.box_size = match edges[..] {
                [l] => Vec3::splat(l),
                [x, y, z] => Vec3::new(x, y, z),
                _ => return Err("`box`: expected one edge or three edges".into()),
            };
        }
        "periodic" => c.periodic = flag(key, value)?,
        "mass" => c.mass = num(key, value)?,
        "temperature" => c.temperature = num(key, value)?,
        "seed" => c.seed = num(key, value)?,
        "container" => c.container = value.parse()?,
        "epsilon" => c.force_field.epsilon = num(key, value)?,
        "sigma" => c.force_field.sigma = num(key, value)?,
        "nu" => c.force_field.nu = num(key, value)?,
        "cutoff" => c.force_field.cutoff = num(key, value)?,
        "dt" => c.dt = num(key, value)?,
        "iterations" => c.iterations = num(key, value)?,
        "step_size_factor" => c.step_size_factor = num(key, value)?,
        "equilibration" => c.equilibration_steps = num(key, value)?,
        "sample_every" => c.sampling.sample_every = num(key, value)?,
        "rdf_every" => c.sampling.rdf_every = num(key, value)?,
        "rdf_bins" => c.sampling.rdf_bins = num(key, value)?,
        "rdf_r_max" => c.sampling.rdf_r_max = Some(num(key, value)?),
        "energy_bins" => c.sampling.energy_bins = num(key, value)?,
        "pressure_bins" => c.sampling.pressure_bins = num(key, value)?,
        "rescale_interval" => c.sampling.rescale_interval = num(key, value)?,
        "step_size_factors" => plan.step_size_factors = Some(list(key, value)?),
        "nu_sweep" => plan.nu_sweep = Some(list(key, value)?),
        "reference" => plan.reference = flag(key, value)?,
        "output" => plan.output = Some(PathBuf::from(value)),
        _ => unreachable!("key table and parser out of sync: {key}"),
    }
    Ok(())
}

impl FromStr for ExperimentPlan {
    type Err = ScenarioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scenario_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: ScenarioError) -> usize {
        match e {
            ScenarioError::Parse { line, .. } => line,
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn flat_and_sectioned() {
        let p = parse_scenario_str("particles = 8\nbox = 6\n[force_field]\nnu=0.5 # comment\n").unwrap();
        assert_eq!(p.base.particle_count, 8);
        assert_eq!(p.base.box_size, Vec3::splat(6.0));
        assert_eq!(p.base.force_field.nu, 0.5);
        assert_eq!(p.nu_values(), vec![0.5]);
        assert_eq!(p.s_values(), vec![1]);
    }

    #[test]
    fn unknown_key_has_line() {
        assert_eq!(line_of(parse_scenario_str("particles=8\n\nbogus=1\n").unwrap_err()), 3);
        assert_eq!(line_of(parse_scenario_str("[sampling]\nnu=0.1\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_scenario_str("[nope]\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_scenario_str("dt=0.1\ndt=0.2\n").unwrap_err()), 2);
        assert_eq!(line_of(parse_scenario_str("dt 0.1\n").unwrap_err()), 1);
        assert_eq!(line_of(parse_scenario_str("box=1 2\n").unwrap_err()), 1);
    }

    #[test]
    fn divisibility_is_checked() {
        let e = parse_scenario_str("iterations=100\nstep_size_factors=1,12\n").unwrap_err();
        assert!(matches!(e, ScenarioError::Invalid(Error::InvalidConfig(ref m)) if m.contains("12")), "{e}");
    }

    #[test]
    fn reference_adds_s1() {
        let p = parse_scenario_str("iterations=120\nstep_size_factors=12,3\n").unwrap();
        assert_eq!(p.s_values(), vec![1, 3, 12]);
        let p = parse_scenario_str("iterations=120\nstep_size_factors=12,3\nreference=false\n").unwrap();
        assert_eq!(p.s_values(), vec![3, 12]);
    }

    #[test]
    fn periodic_direct_sum_rejected() {
        assert!(parse_scenario_str("periodic=true\ncontainer=direct_sum\n").is_err());
        assert!(parse_scenario_str("periodic=true\ncontainer=linked_cells\n").is_ok());
    }
}
