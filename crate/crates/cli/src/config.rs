use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use pauli_probe::channel::ChannelSpec;
use pauli_probe::field::FactorGraph;
use pauli_probe::sim::NoiseModel;
use pauli_probe::PauliChannel;

use crate::exit::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    EstimateGroup,
    EstimateSubset,
    Tree,
    Factored,
}

/// Mode-specific settings; each mode reads only the fields it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskOptions {
    /// Prepared stabilizer group (simulate) or the group to reconstruct
    /// (estimate-group), as comma separated generators.
    pub group: Option<String>,
    /// Measured group for simulate; defaults to `group`.
    pub meas: Option<String>,
    /// Target Paulis for estimate-subset; defaults to all weight-1 Paulis.
    pub paulis: Option<String>,
    /// Factor graph JSON for factored mode; defaults to a chain.
    pub graph: Option<PathBuf>,
    /// Sequence length for simulate.
    pub m: u64,
    /// Shots per experiment; overrides the computed value where one exists.
    pub shots: Option<u64>,
    /// Probes per block and level in tree mode.
    pub u: usize,
    /// Candidates kept per block in tree mode.
    pub top: usize,
    /// Constant of the c-weak and c-stable checks.
    pub c: f64,
}

impl Default for TaskOptions {
    fn default() -> Self {
        TaskOptions {
            group: None,
            meas: None,
            paulis: None,
            graph: None,
            m: 0,
            shots: None,
            u: 64,
            top: 4,
            c: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub channel: PathBuf,
    #[serde(default)]
    pub spam: Option<PathBuf>,
    pub epsilon: f64,
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub force: bool,
    #[serde(default)]
    pub task: TaskOptions,
}

/// Command line flags; anything given here overrides `--config`.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// JSON file holding an experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Channel spec JSON for the gate noise.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// JSON with `prep` and `meas` channel specs; ideal SPAM when absent.
    #[arg(long)]
    pub spam: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; falls back to PAULI_PROBE_THREADS, then the core count.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run even when the assumption checks fail.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub meas: Option<String>,
    #[arg(long)]
    pub paulis: Option<String>,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub u: Option<usize>,
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
}

fn set<T: Serialize>(obj: &mut Map<String, Value>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        obj.insert(key.into(), serde_json::to_value(v).expect("plain value"));
    }
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut root = match &self.config {
            Some(p) => {
                let text = read(p)?;
                serde_json::from_str::<Value>(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Map::new()),
        };
        let obj = root
            .as_object_mut()
            .ok_or_else(|| CliError::config("config must be a JSON object"))?;
        set(obj, "mode", &self.mode);
        set(obj, "channel", &self.channel);
        set(obj, "spam", &self.spam);
        set(obj, "epsilon", &self.epsilon);
        set(obj, "delta", &self.delta);
        set(obj, "seed", &self.seed);
        set(obj, "workers", &self.workers);
        set(obj, "out", &self.out);
        if self.force {
            obj.insert("force".into(), Value::Bool(true));
        }
        let task = obj
            .entry("task")
            .or_insert_with(|| Value::Object(Map::new()))
            .as_object_mut()
            .ok_or_else(|| CliError::config("task must be a JSON object"))?;
        set(task, "group", &self.group);
        set(task, "meas", &self.meas);
        set(task, "paulis", &self.paulis);
        set(task, "graph", &self.graph);
        set(task, "m", &self.m);
        set(task, "shots", &self.shots);
        set(task, "u", &self.u);
        set(task, "top", &self.top);
        set(task, "c", &self.c);
        let cfg: ExperimentConfig = serde_json::from_value(root).map_err(|e| CliError::config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }
}

pub fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::config(format!("{}: {e}", p.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpamSpec {
    prep: ChannelSpec,
    meas: ChannelSpec,
}

/// Parsed inputs of a config.
pub struct Loaded {
    pub model: NoiseModel,
    pub graph: Option<FactorGraph>,
    /// Hex digest of the config and the contents of every file it names.
    pub config_hash: String,
}

impl ExperimentConfig {
    pub fn check(&self) -> Result<(), CliError> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(CliError::config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("delta", self.delta)?;
        if self.task.c <= 0.0 || self.task.c > 1.0 {
            return Err(CliError::config(format!("c must lie in (0, 1], got {}", self.task.c)));
        }
        if self.workers == Some(0) {
            return Err(CliError::config("workers must be at least 1"));
        }
        if self.task.shots == Some(0) {
            return Err(CliError::config("shots must be at least 1"));
        }
        if self.task.u == 0 || self.task.top == 0 {
            return Err(CliError::config("u and top must be at least 1"));
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.workers
            .or_else(|| std::env::var("PAULI_PROBE_THREADS").ok()?.parse().ok())
            .filter(|&w| w > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn load(&self) -> Result<Loaded, CliError> {
        let channel_text = read(&self.channel)?;
        let gate = ChannelSpec::from_json(&channel_text)
            .map_err(|e| CliError::config(format!("{}: {e}", self.channel.display())))?;
        let n = gate.num_qubits();
        let (spam_text, model) = match &self.spam {
            Some(p) => {
                let text = read(p)?;
                let spec: SpamSpec =
                    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
                let build = |s: &ChannelSpec| -> Result<PauliChannel, CliError> {
                    s.build().map_err(|e| CliError::config(format!("{}: {e}", p.display())))
                };
                let model = NoiseModel::new(gate, build(&spec.prep)?, build(&spec.meas)?)
                    .map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
                (text, model)
            }
            None => (String::new(), NoiseModel::ideal_spam(gate)),
        };
        let (graph_text, graph) = match (&self.task.graph, self.mode) {
            (Some(p), Mode::Factored) => {
                let text = read(p)?;
                let g = FactorGraph::from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", p.display())))?;
                if g.num_vars() != n {
                    return Err(CliError::config(format!(
                        "factor graph has {} variables, channel has {n} qubits",
                        g.num_vars()
                    )));
                }
                (text, Some(g))
            }
            (None, Mode::Factored) => (
                String::new(),
                Some(FactorGraph::chain(n).map_err(|e| CliError::config(e.to_string()))?),
            ),
            _ => (String::new(), None),
        };

        // workers and the output location do not change results
        let mut hashed = self.clone();
        hashed.workers = None;
        hashed.out = None;
        hashed.channel = PathBuf::new();
        hashed.spam = None;
        hashed.task.graph = None;
        let mut h = Sha256::new();
        for part in [
            serde_json::to_string(&hashed).expect("serializable"),
            channel_text,
            spam_text,
            graph_text,
        ] {
            h.update((part.len() as u64).to_le_bytes());
            h.update(part.as_bytes());
        }
        let config_hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(Loaded {
            model,
            graph,
            config_hash,
        })
    }
}
