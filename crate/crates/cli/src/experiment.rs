use std::path::{Path, PathBuf};

use num_complex::Complex64;
use zenopure::engine::{BipartiteSystem, DensityMatrix, ProbeState, ProjectedPropagator, CONDITION_I_EPSILON};
use zenopure::linalg::ComplexVector;
use zenopure::oscillator::{tuned_tau, FrequencyBranch, OscillatorError, OscillatorModel, OscillatorParams};

use crate::config::{Branch, ExperimentConfig, ExplicitConfig, ModelConfig, OscillatorConfig, TauSpec, TunedTau};
use crate::matrix_file::read_matrix;
use crate::CliError;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    /// Replaces both Fock cutoffs of the oscillator model.
    pub cutoff: Option<usize>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
}

/// A system given by matrix files, ready to run.
#[derive(Debug, Clone)]
pub struct ExplicitModel {
    /// Present when the config names a Hamiltonian rather than `V` itself.
    pub system: Option<(BipartiteSystem, ProbeState)>,
    pub propagator: ProjectedPropagator,
    pub initial_state: DensityMatrix,
    pub target: Option<ComplexVector>,
}

#[derive(Debug, Clone)]
pub enum Model {
    /// Parameters are validated up front; building the truncated operators
    /// can still fail (e.g. a probe that does not fit the cutoff), and
    /// `compare` reports that failure instead of aborting.
    Oscillator {
        params: OscillatorParams,
        built: Result<OscillatorModel, OscillatorError>,
    },
    Explicit(ExplicitModel),
}

/// A validated config with overrides applied and all files loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: Model,
}

impl Experiment {
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let config = ExperimentConfig::load(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_config(config, &base, overrides)
    }

    /// `base_dir` anchors relative matrix-file paths.
    pub fn from_config(mut config: ExperimentConfig, base_dir: &Path, overrides: Overrides) -> Result<Self, CliError> {
        if let Some(steps) = overrides.steps {
            config.n_steps = steps;
        }
        if let Some(seed) = overrides.seed {
            config.seed = Some(seed);
        }
        if let Some(cutoff) = overrides.cutoff {
            match &mut config.model {
                ModelConfig::Oscillator(o) => {
                    o.n_max_a = cutoff;
                    o.n_max_b = cutoff;
                }
                ModelConfig::ExplicitMatrix(_) => {
                    return Err(CliError::Config("--cutoff applies to the oscillator model only".into()))
                }
            }
        }
        config.validate()?;
        let model = match &config.model {
            ModelConfig::Oscillator(o) => {
                let params = oscillator_params(o, config.tau)?;
                params.validate()?;
                Model::Oscillator {
                    params,
                    built: OscillatorModel::new(params),
                }
            }
            ModelConfig::ExplicitMatrix(e) => Model::Explicit(explicit_model(e, config.tau, base_dir)?),
        };
        Ok(Self { config, model })
    }

    pub fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(0)
    }

    pub fn epsilon(&self) -> f64 {
        self.config.epsilon.unwrap_or(CONDITION_I_EPSILON)
    }

    pub fn propagator(&self) -> Result<ProjectedPropagator, CliError> {
        match &self.model {
            Model::Oscillator { built, .. } => Ok(unwrap_built(built)?.propagator()?),
            Model::Explicit(e) => Ok(e.propagator.clone()),
        }
    }

    pub fn initial_state(&self) -> Result<&DensityMatrix, CliError> {
        match &self.model {
            Model::Oscillator { built, .. } => Ok(&unwrap_built(built)?.initial_state),
            Model::Explicit(e) => Ok(&e.initial_state),
        }
    }

    /// The Hamiltonian and probe, when the model has them.
    pub fn system(&self) -> Result<Option<(&BipartiteSystem, &ProbeState)>, CliError> {
        match &self.model {
            Model::Oscillator { built, .. } => {
                let m = unwrap_built(built)?;
                Ok(Some((&m.system, &m.probe)))
            }
            Model::Explicit(e) => Ok(e.system.as_ref().map(|(s, p)| (s, p))),
        }
    }
}

pub fn unwrap_built(built: &Result<OscillatorModel, OscillatorError>) -> Result<&OscillatorModel, CliError> {
    built.as_ref().map_err(|e| e.clone().into())
}

/// The reference purification run: `Ω = ω = 1`, `g = 0.2`, `α = 0.5`,
/// `β = 1`, `τ = 2π/Ω₊`.
pub fn figure1_config(cutoff: usize, n_steps: usize) -> ExperimentConfig {
    let p = OscillatorParams::figure1(cutoff);
    ExperimentConfig {
        n_steps,
        tau: Some(TauSpec::Tuned {
            tuned: TunedTau { m: 1, branch: Branch::Plus },
        }),
        outputs: Vec::new(),
        seed: None,
        epsilon: None,
        zeno: None,
        model: ModelConfig::Oscillator(OscillatorConfig {
            big_omega: p.big_omega,
            omega: p.omega,
            g: p.g,
            alpha: [p.alpha.re, p.alpha.im],
            beta: p.beta,
            n_max_a: cutoff,
            n_max_b: cutoff,
        }),
    }
}

fn oscillator_params(o: &OscillatorConfig, tau: Option<TauSpec>) -> Result<OscillatorParams, CliError> {
    let mut p = OscillatorParams {
        big_omega: o.big_omega,
        omega: o.omega,
        g: o.g,
        alpha: Complex64::new(o.alpha[0], o.alpha[1]),
        beta: o.beta,
        tau: 0.0,
        n_max_a: o.n_max_a,
        n_max_b: o.n_max_b,
    };
    p.tau = match tau {
        Some(TauSpec::Value(t)) => t,
        Some(TauSpec::Tuned { tuned }) => {
            let branch = match tuned.branch {
                Branch::Plus => FrequencyBranch::Plus,
                Branch::Minus => FrequencyBranch::Minus,
            };
            tuned_tau(&p, tuned.m, branch)?
        }
        None => return Err(CliError::Config("the oscillator model needs tau".into())),
    };
    Ok(p)
}

fn complex_vector(pairs: &[[f64; 2]]) -> Result<ComplexVector, CliError> {
    Ok(ComplexVector::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())?)
}

fn resolve(base: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        base.join(file)
    }
}

fn explicit_model(e: &ExplicitConfig, tau: Option<TauSpec>, base: &Path) -> Result<ExplicitModel, CliError> {
    let tau = match tau {
        Some(TauSpec::Value(t)) => t,
        _ => 0.0,
    };
    let (system, propagator) = match (&e.hamiltonian, &e.propagator) {
        (Some(h), None) => {
            let file = read_matrix(&resolve(base, h))?;
            let system = BipartiteSystem::new(file.dim_a, file.dim_b, file.matrix)?;
            let probe_pairs = e.probe.as_deref().unwrap_or_default();
            if probe_pairs.len() != file.dim_a {
                return Err(CliError::Config(format!(
                    "probe has {} amplitudes, the hamiltonian has dim_a = {}",
                    probe_pairs.len(),
                    file.dim_a
                )));
            }
            let probe = ProbeState::new(complex_vector(probe_pairs)?)?;
            let v = zenopure::engine::build_projected_propagator(&system, &probe, tau)?;
            (Some((system, probe)), v)
        }
        (None, Some(v)) => {
            let file = read_matrix(&resolve(base, v))?;
            if file.dim_a != 1 {
                return Err(CliError::Config(format!(
                    "a propagator file acts on B alone; its header must read \"1 dim_b\", found dim_a = {}",
                    file.dim_a
                )));
            }
            (None, ProjectedPropagator::new(file.matrix, tau)?)
        }
        _ => return Err(CliError::Config("exactly one of hamiltonian or propagator must be given".into())),
    };
    let dim_b = propagator.dim();
    if e.initial_populations.len() != dim_b {
        return Err(CliError::Config(format!(
            "initial_populations has {} entries, B has dimension {dim_b}",
            e.initial_populations.len()
        )));
    }
    let initial_state = DensityMatrix::from_populations(&e.initial_populations)?;
    let target = match &e.target {
        Some(t) if t.len() != dim_b => {
            return Err(CliError::Config(format!("target has {} amplitudes, B has dimension {dim_b}", t.len())))
        }
        Some(t) => Some(complex_vector(t)?),
        None => None,
    };
    Ok(ExplicitModel {
        system,
        propagator,
        initial_state,
        target,
    })
}
