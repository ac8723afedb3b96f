use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use pauli_probe::channel::{check_assumptions, AssumptionReport, MarginalDistribution};
use pauli_probe::estimate::{
    estimate_subset_with, reconstruct_group, select_top_s, shots_for_group, tree_reconstruction, RatioConfig,
    SampleBudget, SubsetConfig, TreeConfig, DEFAULT_KAPPA_HINT,
};
use pauli_probe::field::{canonical_estimator_pipeline, FieldDump, PipelineConfig};
use pauli_probe::pauli::{parse_list, Pauli1, PauliString, SyndromeVector};
use pauli_probe::sim::rng::aux_rng;
use pauli_probe::sim::{exact_likelihood, CbSampler, ExactSampler, FrameMode, FrameSampler, NoiseModel, SimulatedSampler};
use pauli_probe::{PauliGroup, StabilizerGroup};

use crate::config::{ExperimentConfig, Loaded, Mode};
use crate::exit::CliError;
use crate::record::Recorder;

/// Simulated shots per experiment in simulate mode when none are given.
const DEFAULT_SHOTS: u64 = 10_000;
/// Largest group whose SPAM coefficients are all checked.
const SPAM_CHECK_RANK: usize = 12;

#[derive(Serialize)]
pub struct Provenance {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub config_hash: String,
}

fn provenance(loaded: &Loaded) -> Provenance {
    Provenance {
        toolkit: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: loaded.config_hash.clone(),
    }
}

fn paulis(n: usize, s: &str) -> Result<Vec<PauliString>, CliError> {
    let ps = parse_list(s)?;
    if let Some(p) = ps.iter().find(|p| p.num_qubits() != n) {
        return Err(CliError::config(format!("{p} does not act on {n} qubits")));
    }
    Ok(ps)
}

fn stabilizer(n: usize, s: Option<&str>) -> Result<StabilizerGroup, CliError> {
    let gens = match s {
        Some(s) => paulis(n, s)?,
        None => (0..n).map(|q| PauliString::single(n, q, Pauli1::Z)).collect(),
    };
    Ok(StabilizerGroup::new(n, gens)?)
}

fn weight_one(n: usize) -> Vec<PauliString> {
    (0..n)
        .flat_map(|q| [Pauli1::X, Pauli1::Y, Pauli1::Z].map(|p| PauliString::single(n, q, p)))
        .collect()
}

fn target_group(cfg: &ExperimentConfig, n: usize) -> Result<PauliGroup, CliError> {
    match &cfg.task.group {
        Some(s) => Ok(PauliGroup::span(n, &paulis(n, s)?)?),
        None => Ok(PauliGroup::full(n)),
    }
}

/// SPAM coefficients `A_h` over the Paulis a mode relies on.
fn spam_values(cfg: &ExperimentConfig, model: &NoiseModel) -> Result<Vec<f64>, CliError> {
    let n = model.num_qubits();
    let hs: Vec<PauliString> = match cfg.mode {
        Mode::Simulate => {
            let g = stabilizer(n, cfg.task.group.as_deref())?;
            if g.rank() <= SPAM_CHECK_RANK {
                g.as_group().enumerate()?
            } else {
                g.generators().to_vec()
            }
        }
        Mode::EstimateGroup => {
            let g = target_group(cfg, n)?;
            if g.rank() <= SPAM_CHECK_RANK {
                g.enumerate()?
            } else {
                g.generators().to_vec()
            }
        }
        _ => weight_one(n),
    };
    Ok(hs
        .iter()
        .map(|h| model.prep.eigenvalue(h) * model.meas.eigenvalue(h) * model.gate.eigenvalue(h))
        .collect())
}

pub fn assumptions(cfg: &ExperimentConfig, model: &NoiseModel) -> Result<AssumptionReport, CliError> {
    Ok(check_assumptions(&model.gate, &spam_values(cfg, model)?, cfg.task.c))
}

fn assumption_error(r: &AssumptionReport) -> CliError {
    CliError::assumption(format!(
        "assumption check failed (c = {}, c-weak {}, c-stable {}, min eigenvalue {:.6}); pass --force to run anyway",
        r.c, r.c_weak, r.c_stable, r.min_eigenvalue
    ))
}

/// Labels the classes of `A_G` by Paulis on the support of `G` when `G` is
/// the full group there, otherwise by syndrome strings.
fn marginal_entries(m: &MarginalDistribution) -> Vec<(String, f64)> {
    let g = &m.group;
    let n = g.num_qubits();
    let k = g.rank();
    let support: Vec<usize> = (0..n)
        .filter(|&q| g.generators().iter().any(|p| p.get(q) != Pauli1::I))
        .collect();
    if k == 2 * support.len() && support.len() <= 6 {
        let mut out: Vec<(String, f64)> = (0..1usize << k)
            .map(|i| {
                let e = PauliString::embed(&PauliString::from_dense_index(support.len(), i), &support, n);
                (e.to_string(), m.prob(&e))
            })
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    } else {
        m.probs
            .iter()
            .enumerate()
            .map(|(s, &p)| (SyndromeVector::from_index(k, s).to_string(), p))
            .collect()
    }
}

/// Per-Pauli report entries keyed by label: `r_hat`, `p_hat`, `m_used` and
/// `flags`, whichever the mode produces.
#[derive(Default)]
struct Estimates(BTreeMap<String, serde_json::Map<String, Value>>);

impl Estimates {
    fn set(&mut self, pauli: String, key: &str, v: Value) {
        self.0.entry(pauli).or_default().insert(key.to_string(), v);
    }

    fn into_value(self) -> Value {
        json!(self.0)
    }
}

/// Output of one estimator run.
pub struct Outcome {
    pub result: Value,
    pub budget: SampleBudget,
}

fn simulate(cfg: &ExperimentConfig, model: &NoiseModel, sampler: &SimulatedSampler) -> Result<Outcome, CliError> {
    let n = model.num_qubits();
    let prep = stabilizer(n, cfg.task.group.as_deref())?;
    let meas = match &cfg.task.meas {
        Some(s) => stabilizer(n, Some(s))?,
        None => prep.clone(),
    };
    let shots = cfg.task.shots.unwrap_or(DEFAULT_SHOTS);
    let m = cfg.task.m;
    let hist = sampler.histogram(&prep, &meas, m, shots, 0)?;
    let k = meas.rank();
    let counts: BTreeMap<String, u64> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| (SyndromeVector::from_index(k, s).to_string(), c))
        .collect();
    let exact: BTreeMap<String, f64> = exact_likelihood(&prep, &meas, m, model)?
        .into_iter()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .map(|(s, p)| (SyndromeVector::from_index(k, s).to_string(), p))
        .collect();
    let gens = |g: &StabilizerGroup| g.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>();
    Ok(Outcome {
        result: json!({
            "prep": gens(&prep),
            "meas": gens(&meas),
            "m": m,
            "shots": shots,
            "histogram": counts,
            "exact": exact,
        }),
        budget: SampleBudget {
            t: shots,
            kappa: vec![m],
            rounds: 1,
            reference_rounds: 0,
            total_measurements: shots,
        },
    })
}

/// Runs an estimating mode against any sampler.
pub fn estimate(cfg: &ExperimentConfig, loaded: &Loaded, sampler: &dyn CbSampler) -> Result<Outcome, CliError> {
    let n = loaded.model.num_qubits();
    let mut rng = aux_rng(cfg.seed, 1);
    match cfg.mode {
        Mode::Simulate => unreachable!("simulate does not estimate"),
        Mode::EstimateGroup => {
            let g = target_group(cfg, n)?;
            let x_size = (1usize << g.rank().min(63)) - 1;
            let t = match cfg.task.shots {
                Some(t) => t,
                None => shots_for_group(cfg.epsilon, cfg.delta, x_size, DEFAULT_KAPPA_HINT)?,
            };
            let rec = reconstruct_group(&g, &RatioConfig::new(t), sampler)?;
            let mut est = Estimates::default();
            let p: Vec<Value> = marginal_entries(&rec.marginal)
                .into_iter()
                .map(|(k, v)| {
                    est.set(k.clone(), "p_hat", json!(v));
                    json!({"pauli": k, "p_hat": v})
                })
                .collect();
            let r: Vec<Value> = rec
                .ratio
                .estimates
                .iter()
                .map(|e| {
                    let k = e.pauli.to_string();
                    est.set(k.clone(), "r_hat", json!(e.r_hat));
                    est.set(k.clone(), "m_used", json!(e.m_used));
                    est.set(k.clone(), "flags", json!(e.flags));
                    json!({"pauli": k, "r_hat": e.r_hat, "m": e.m_used, "flags": e.flags})
                })
                .collect();
            Ok(Outcome {
                result: json!({
                    "group": g.generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    "p_hat": p,
                    "r_hat": r,
                    "r_hat_inf": rec.diagnostics.r_hat_inf,
                    "cover_size": rec.diagnostics.cover_size,
                    "estimates": est.into_value(),
                }),
                budget: rec.diagnostics.budget,
            })
        }
        Mode::EstimateSubset => {
            let e_set = match &cfg.task.paulis {
                Some(s) => paulis(n, s)?,
                None => weight_one(n),
            };
            let est = estimate_subset_with(&e_set, &SubsetConfig::new(cfg.epsilon, cfg.delta), sampler, &mut rng)?;
            let mut map = Estimates::default();
            let p: Vec<Value> = est
                .entries
                .iter()
                .map(|e| {
                    map.set(e.pauli.to_string(), "p_hat", json!(e.p_hat));
                    json!({"pauli": e.pauli.to_string(), "p_hat": e.p_hat})
                })
                .collect();
            Ok(Outcome {
                result: json!({
                    "p_hat": p,
                    "probes": est.x_sample_size,
                    "t": est.t,
                    "mean_r_hat": est.mean_r_hat(),
                    "estimates": map.into_value(),
                }),
                budget: est.budget,
            })
        }
        Mode::Tree => {
            let t = match cfg.task.shots {
                Some(t) => t,
                None => shots_for_group(cfg.epsilon, cfg.delta, cfg.task.u, DEFAULT_KAPPA_HINT)?,
            };
            let tcfg = TreeConfig {
                u: cfg.task.u,
                ratio: RatioConfig::new(t),
            };
            let top = cfg.task.top;
            let out = tree_reconstruction(n, &tcfg, &|p| select_top_s(p, top), sampler, &mut rng)?;
            let mut est = Estimates::default();
            let p: Vec<Value> = out
                .p
                .iter()
                .map(|(e, v)| {
                    est.set(e.to_string(), "p_hat", json!(v));
                    json!({"pauli": e.to_string(), "p_hat": v})
                })
                .collect();
            Ok(Outcome {
                result: json!({"p_hat": p, "levels": out.levels, "t": t, "estimates": est.into_value()}),
                budget: out.budget,
            })
        }
        Mode::Factored => {
            let graph = loaded.graph.as_ref().expect("factored mode loads a graph");
            let mut pcfg = PipelineConfig::new(cfg.epsilon, cfg.delta);
            pcfg.normalizer = true;
            let out = canonical_estimator_pipeline(graph, &pcfg, sampler, &mut rng)?;
            let dump = FieldDump::from(&out);
            Ok(Outcome {
                result: json!({
                    "factors": graph.factors(),
                    "field": dump,
                    "batches": out.batches,
                    "t": out.t,
                }),
                budget: out.budget,
            })
        }
    }
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), CliError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, v)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let out_dir = cfg
        .out
        .as_ref()
        .ok_or_else(|| CliError::config("an output directory (--out) is required"))?;
    let loaded = cfg.load()?;
    let report = assumptions(cfg, &loaded.model)?;
    if !report.passed() {
        if !cfg.force {
            return Err(assumption_error(&report));
        }
        log::warn!("assumption check failed, continuing because of --force");
    }
    let workers = cfg.workers();
    log::info!("mode {:?} on {} qubits with {workers} workers", cfg.mode, loaded.model.num_qubits());
    let sim = SimulatedSampler::new(loaded.model.clone(), cfg.seed, workers)?.recording();
    let started = Instant::now();
    let (outcome, rows) = if cfg.mode == Mode::Simulate {
        (simulate(cfg, &loaded.model, &sim)?, Vec::new())
    } else {
        let rec = Recorder::new(&sim);
        let o = estimate(cfg, &loaded, &rec)?;
        (o, rec.rows())
    };
    log::info!("finished in {:.2?}", started.elapsed());
    let counted = sim.measurements();
    if outcome.budget.total_measurements != counted {
        return Err(CliError::config(format!(
            "internal accounting mismatch: budget {} vs counter {counted}",
            outcome.budget.total_measurements
        )));
    }

    fs::create_dir_all(out_dir)?;
    let prov = provenance(&loaded);
    write_json(
        &out_dir.join("report.json"),
        &json!({
            "provenance": prov,
            "mode": cfg.mode,
            "num_qubits": loaded.model.num_qubits(),
            "epsilon": cfg.epsilon,
            "delta": cfg.delta,
            "seed": cfg.seed,
            "assumptions": report,
            "result": outcome.result,
            "budget": outcome.budget,
            "total_measurements": counted,
        }),
    )?;
    write_json(
        &out_dir.join("budget.json"),
        &json!({
            "provenance": prov,
            "budget": outcome.budget,
            "instrumented_measurements": counted,
        }),
    )?;
    let mut w = csv::Writer::from_path(out_dir.join("decay.csv"))?;
    if rows.is_empty() {
        w.write_record(["pauli", "m", "v_hat", "t", "group_id"])?;
    }
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut f = BufWriter::new(File::create(out_dir.join("experiments.jsonl"))?);
    for r in sim.take_records() {
        serde_json::to_writer(&mut f, &r)?;
        f.write_all(b"\n")?;
    }
    f.flush()?;
    Ok(())
}

/// Measured single-thread shot rate at the longest sequence length of the
/// predicted budget.
fn shots_per_second(cfg: &ExperimentConfig, model: &NoiseModel, m: u64) -> Result<f64, CliError> {
    let n = model.num_qubits();
    let g = match cfg.mode {
        Mode::Simulate => stabilizer(n, cfg.task.group.as_deref())?,
        _ => stabilizer(n, None)?,
    };
    let frame = FrameSampler::new(model, &g, &g, m, FrameMode::Collapsed)?;
    let mut rng = aux_rng(cfg.seed, 2);
    let mut acc = PauliString::identity(n);
    let start = Instant::now();
    let mut shots = 0u32;
    while shots < 4096 && (shots < 16 || start.elapsed().as_secs_f64() < 0.5) {
        frame.sample_into(&mut rng, &mut acc);
        shots += 1;
    }
    Ok(f64::from(shots) / start.elapsed().as_secs_f64().max(1e-9))
}

/// Dry run: the budget comes from running the estimator on exact V values.
pub fn validate(cfg: &ExperimentConfig) -> Result<Value, CliError> {
    let loaded = cfg.load()?;
    let report = assumptions(cfg, &loaded.model)?;
    let budget = if cfg.mode == Mode::Simulate {
        let shots = cfg.task.shots.unwrap_or(DEFAULT_SHOTS);
        SampleBudget {
            t: shots,
            kappa: vec![cfg.task.m],
            rounds: 1,
            reference_rounds: 0,
            total_measurements: shots,
        }
    } else {
        let exact = ExactSampler::new(loaded.model.clone());
        let b = estimate(cfg, &loaded, &exact)?.budget;
        debug_assert_eq!(b.total_measurements, exact.measurements());
        b
    };
    let m_max = budget.kappa.iter().copied().max().unwrap_or(1);
    let workers = cfg.workers();
    let rate = shots_per_second(cfg, &loaded.model, m_max)?;
    let summary = json!({
        "provenance": provenance(&loaded),
        "mode": cfg.mode,
        "num_qubits": loaded.model.num_qubits(),
        "t": budget.t,
        "kappa_size": budget.kappa.len(),
        "rounds": budget.rounds,
        "reference_rounds": budget.reference_rounds,
        "total_measurements": budget.total_measurements,
        "budget": budget,
        "workers": workers,
        "predicted_runtime_secs": budget.total_measurements as f64 / (rate * workers as f64),
        "assumptions": report,
    });
    if !report.passed() && !cfg.force {
        println!("{}", serde_json::to_string_pretty(&summary)?);
        return Err(assumption_error(&report));
    }
    Ok(summary)
}
