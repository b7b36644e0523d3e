//! The declarative run configuration (TOML).
//!
//! ```toml
//! output_dir = "out"
//!
//! [objective]
//! name = "branin"
//! dims = 2
//!
//! [acquisition]
//! kind = "ucb"
//! gamma = 2.0
//!
//! [pso]
//! omega = 0.8
//!
//! [experiment]
//! iterations = 30
//! seeds = [1, 2, 3]
//! methods = ["pso_bo", "local_bo", "random_search"]
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use swarmbo::acquisition::AcquisitionSpec;
use swarmbo::bench::{Experiment, LocalAscentParams, MethodSpec, ObjectiveSpec, DEFAULT_GRID_CAP};
use swarmbo::gp::HyperFitOptions;
use swarmbo::pso::PsoParams;
use swarmbo::space::DimensionSpec;
use swarmbo::{BoConfig64, SearchSpace64};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    PsoBo,
    LocalBo,
    RandomSearch,
    GridSearch,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_dim: Option<usize>,
    pub cap: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points_per_dim: None, cap: DEFAULT_GRID_CAP }
    }
}

fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}

fn default_methods() -> Vec<MethodName> {
    vec![MethodName::PsoBo, MethodName::LocalBo, MethodName::RandomSearch]
}

fn default_omegas() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub init_count: usize,
    pub iterations: usize,
    /// Seed of a single run.
    pub seed: Option<u64>,
    /// Seeds of a comparison or sweep.
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodName>,
    pub omegas: Vec<f64>,
    pub local_bo: LocalAscentParams,
    pub grid: GridConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            init_count: 5,
            iterations: 30,
            seed: None,
            seeds: default_seeds(),
            methods: default_methods(),
            omegas: default_omegas(),
            local_bo: LocalAscentParams::default(),
            grid: GridConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub objective: ObjectiveSpec,
    /// Replaces the objective's canonical domain.
    #[serde(default)]
    pub space: Option<Vec<DimensionSpec<f64>>>,
    #[serde(default)]
    pub acquisition: AcquisitionSpec<f64>,
    /// Swarm that maximizes the acquisition function.
    #[serde(default)]
    pub pso: PsoParams<f64>,
    #[serde(default)]
    pub gp: HyperFitOptions<f64>,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn search_space(&self) -> Result<SearchSpace64, CliError> {
        let config = |m: String| CliError::Config(m);
        self.objective.validate().map_err(|e| config(format!("objective: {e}")))?;
        match &self.space {
            None => self.objective.space().map_err(|e| config(format!("objective: {e}"))),
            Some(dims) => {
                let space = SearchSpace64::new(dims.clone()).map_err(|e| config(format!("space: {e}")))?;
                if space.len() != self.objective.dims {
                    return Err(config(format!(
                        "space: {} dimensions given but objective.dims = {}",
                        space.len(),
                        self.objective.dims
                    )));
                }
                Ok(space)
            }
        }
    }

    fn check_sections(&self) -> Result<(), CliError> {
        self.acquisition.validate().map_err(|e| CliError::Config(format!("acquisition: {e}")))?;
        self.pso.validate().map_err(|e| CliError::Config(format!("pso: {e}")))?;
        self.gp.validate().map_err(|e| CliError::Config(format!("gp: {e}")))?;
        let exp = &self.experiment;
        if exp.init_count < 1 {
            return Err(CliError::Config("experiment.init_count must be at least 1".into()));
        }
        if exp.iterations < 1 {
            return Err(CliError::Config("experiment.iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn bo_config(&self, seed: u64) -> Result<BoConfig64, CliError> {
        self.check_sections()?;
        Ok(BoConfig64 {
            space: self.search_space()?,
            acquisition: self.acquisition.clone(),
            pso: self.pso.clone(),
            gp: self.gp.clone(),
            init_count: self.experiment.init_count,
            iterations: self.experiment.iterations,
            seed,
        })
    }

    pub fn experiment(&self, seeds: Vec<u64>) -> Result<Experiment<f64>, CliError> {
        self.check_sections()?;
        if seeds.len() < 2 {
            return Err(CliError::Config("experiment.seeds must list at least two seeds".into()));
        }
        Ok(Experiment {
            objective: self.objective.clone(),
            space: self.search_space()?,
            acquisition: self.acquisition.clone(),
            gp: self.gp.clone(),
            init_count: self.experiment.init_count,
            iterations: self.experiment.iterations,
            seeds,
            grid_cap: self.experiment.grid.cap,
        })
    }

    pub fn methods(&self) -> Result<Vec<MethodSpec<f64>>, CliError> {
        let names = &self.experiment.methods;
        if names.len() < 2 {
            return Err(CliError::Config("experiment.methods must name at least two methods to compare".into()));
        }
        Ok(names
            .iter()
            .map(|m| match m {
                MethodName::PsoBo => MethodSpec::PsoBo(self.pso.clone()),
                MethodName::LocalBo => MethodSpec::LocalBo(self.experiment.local_bo.clone()),
                MethodName::RandomSearch => MethodSpec::RandomSearch,
                MethodName::GridSearch => {
                    MethodSpec::GridSearch { points_per_dim: self.experiment.grid.points_per_dim }
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = RunConfig::parse("[objective]\nname = \"sphere\"\ndims = 2\n").unwrap();
        assert!(c.objective.negate);
        assert_eq!(c.experiment.seeds.len(), 10);
        assert_eq!(c.experiment.omegas.len(), 9);
        assert_eq!(c.search_space().unwrap().len(), 2);
        assert_eq!(c.bo_config(3).unwrap().budget(), 35);
    }

    #[test]
    fn unknown_key_is_named_with_line() {
        let text = "[objective]\nname = \"sphere\"\ndims = 2\n\n[acquisition]\ngamna = 1.0\n";
        let CliError::Config(msg) = RunConfig::parse(text).unwrap_err() else { panic!() };
        assert!(msg.contains("gamna"), "{msg}");
        assert!(msg.contains("line 6"), "{msg}");
    }

    #[test]
    fn nested_sections_and_space_override() {
        let text = r#"
output_dir = "x"
[objective]
name = "sphere"
dims = 2
[[space]]
name = "a"
type = "real"
lower = -1.0
upper = 1.0
[[space]]
name = "k"
type = "integer"
lower = 0
upper = 4
[gp]
noise_var = 1e-4
[gp.pso]
max_iters = 20
[experiment]
methods = ["pso_bo", "grid_search"]
[experiment.grid]
points_per_dim = 4
[experiment.local_bo]
restarts = 3
"#;
        let c = RunConfig::parse(text).unwrap();
        let space = c.search_space().unwrap();
        assert!(space.has_integer_dims());
        assert_eq!(c.gp.noise_var, Some(1e-4));
        assert_eq!(c.gp.pso.max_iters, 20);
        assert_eq!(c.methods().unwrap().len(), 2);
        assert_eq!(c.experiment.local_bo.restarts, 3);
    }

    #[test]
    fn semantic_errors_name_the_section() {
        let c = RunConfig::parse("[objective]\nname = \"branin\"\ndims = 3\n").unwrap();
        let CliError::Config(msg) = c.search_space().unwrap_err() else { panic!() };
        assert!(msg.starts_with("objective"), "{msg}");
        let c = RunConfig::parse("[objective]\nname = \"sphere\"\ndims = 1\n[pso]\nomega = 1.2\n").unwrap();
        let CliError::Config(msg) = c.bo_config(0).unwrap_err() else { panic!() };
        assert!(msg.starts_with("pso"), "{msg}");
        let c = RunConfig::parse("[objective]\nname = \"sphere\"\ndims = 1\n[experiment]\nmethods = [\"pso_bo\"]\n")
            .unwrap();
        assert!(c.methods().is_err());
    }
}
