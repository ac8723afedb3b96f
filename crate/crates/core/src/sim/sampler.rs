use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{FrameMode, FrameSampler};
use super::rng::{stream_rng, SHOTS_PER_CHUNK};
use super::NoiseModel;
use crate::error::{Error, Result};
use crate::pauli::{fwht, PauliString, StabilizerGroup};

/// Largest measured group for which outcomes are histogrammed.
const HISTOGRAM_MAX_RANK: usize = 16;

/// One call of the estimator V: `t` shots of length-m experiments
/// preparing and measuring `group`, averaging `(-1)^{<x, z>}` for each x.
#[derive(Clone, Copy, Debug)]
pub struct VRequest<'a> {
    pub group: &'a StabilizerGroup,
    pub paulis: &'a [PauliString],
    pub m: u64,
    pub shots: u64,
    /// Identifies the experiment for stream derivation; callers keep it
    /// unique within a run.
    pub experiment: u64,
}

/// Source of CB data for the estimators.
pub trait CbSampler: Sync {
    fn estimate_v(&self, req: &VRequest<'_>) -> Result<Vec<f64>>;

    /// Shots consumed so far.
    fn measurements(&self) -> u64;
}

fn check_members(req: &VRequest<'_>) -> Result<Vec<usize>> {
    req.paulis
        .iter()
        .map(|x| {
            if req.group.rank() <= 63 {
                req.group.coordinate_index(x)
            } else {
                req.group.contains(x).then_some(0)
            }
            .ok_or_else(|| Error::NotInGroup(x.to_string()))
        })
        .collect()
}

/// Returns the predicted mean of V exactly, with no sampling noise.
pub struct ExactSampler {
    pub model: NoiseModel,
    counter: AtomicU64,
}

impl ExactSampler {
    pub fn new(model: NoiseModel) -> Self {
        ExactSampler {
            model,
            counter: AtomicU64::new(0),
        }
    }
}

impl CbSampler for ExactSampler {
    fn estimate_v(&self, req: &VRequest<'_>) -> Result<Vec<f64>> {
        check_members(req)?;
        self.counter.fetch_add(req.shots, Ordering::Relaxed);
        let e = i32::try_from(req.m).unwrap_or(i32::MAX);
        Ok(req
            .paulis
            .iter()
            .map(|x| self.model.spam_coefficient(req.group, x) * self.model.gate.eigenvalue(x).powi(e))
            .collect())
    }

    fn measurements(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}

/// Raw record of one simulated experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: u64,
    pub prep: Vec<PauliString>,
    pub meas: Vec<PauliString>,
    pub m: u64,
    pub t: u64,
    /// Outcome counts keyed by syndrome bit strings; absent for groups too
    /// large to histogram.
    pub histogram: Option<BTreeMap<String, u64>>,
}

/// Pauli-frame simulation of CB experiments.
pub struct SimulatedSampler {
    model: NoiseModel,
    seed: u64,
    mode: FrameMode,
    pool: rayon::ThreadPool,
    counter: AtomicU64,
    records: Option<Mutex<Vec<ExperimentRecord>>>,
}

impl SimulatedSampler {
    pub fn new(model: NoiseModel, seed: u64, workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        Ok(SimulatedSampler {
            model,
            seed,
            mode: FrameMode::Collapsed,
            pool,
            counter: AtomicU64::new(0),
            records: None,
        })
    }

    pub fn with_mode(mut self, mode: FrameMode) -> Self {
        self.mode = mode;
        self
    }

    /// Keep an [`ExperimentRecord`] for every call.
    pub fn recording(mut self) -> Self {
        self.records = Some(Mutex::new(Vec::new()));
        self
    }

    pub fn model(&self) -> &NoiseModel {
        &self.model
    }

    /// Recorded experiments sorted by experiment id.
    pub fn take_records(&self) -> Vec<ExperimentRecord> {
        let mut out = self
            .records
            .as_ref()
            .map(|r| std::mem::take(&mut *r.lock().unwrap()))
            .unwrap_or_default();
        out.sort_by_key(|r| r.experiment);
        out
    }

    /// Outcome counts over packed syndromes of `meas`.
    pub fn histogram(
        &self,
        prep: &StabilizerGroup,
        meas: &StabilizerGroup,
        m: u64,
        shots: u64,
        experiment: u64,
    ) -> Result<Vec<u64>> {
        let k = meas.rank();
        if k > HISTOGRAM_MAX_RANK {
            return Err(Error::CapExceeded {
                what: "measured generators for a histogram",
                value: k,
                cap: HISTOGRAM_MAX_RANK,
            });
        }
        let frame = FrameSampler::new(&self.model, prep, meas, m, self.mode)?;
        let chunks = shots.div_ceil(SHOTS_PER_CHUNK);
        let hist = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream_rng(self.seed, experiment, c);
                    let mut acc = PauliString::identity(frame.num_qubits());
                    let mut h = vec![0u64; 1 << k];
                    let todo = SHOTS_PER_CHUNK.min(shots - c * SHOTS_PER_CHUNK);
                    for _ in 0..todo {
                        frame.sample_into(&mut rng, &mut acc);
                        h[meas.syndrome_index(&acc)] += 1;
                    }
                    h
                })
                .reduce(
                    || vec![0u64; 1 << k],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        });
        self.counter.fetch_add(shots, Ordering::Relaxed);
        if let Some(r) = &self.records {
            let histogram = hist
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| (crate::pauli::SyndromeVector::from_index(k, s).to_string(), c))
                .collect();
            r.lock().unwrap().push(ExperimentRecord {
                experiment,
                prep: prep.generators().to_vec(),
                meas: meas.generators().to_vec(),
                m,
                t: shots,
                histogram: Some(histogram),
            });
        }
        Ok(hist)
    }

    /// Signed sums `sum_shots (-1)^{<x, E>}` computed shot by shot.
    fn direct_sums(&self, req: &VRequest<'_>) -> Result<Vec<i64>> {
        let frame = FrameSampler::new(&self.model, req.group, req.group, req.m, self.mode)?;
        let chunks = req.shots.div_ceil(SHOTS_PER_CHUNK);
        let len = req.paulis.len();
        let sums = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream_rng(self.seed, req.experiment, c);
                    let mut acc = PauliString::identity(frame.num_qubits());
                    let mut s = vec![0i64; len];
                    let todo = SHOTS_PER_CHUNK.min(req.shots - c * SHOTS_PER_CHUNK);
                    for _ in 0..todo {
                        frame.sample_into(&mut rng, &mut acc);
                        for (x, slot) in req.paulis.iter().zip(s.iter_mut()) {
                            *slot += if x.symplectic(&acc) { -1 } else { 1 };
                        }
                    }
                    s
                })
                .reduce(
                    || vec![0i64; len],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                        a
                    },
                )
        });
        self.counter.fetch_add(req.shots, Ordering::Relaxed);
        if let Some(r) = &self.records {
            r.lock().unwrap().push(ExperimentRecord {
                experiment: req.experiment,
                prep: req.group.generators().to_vec(),
                meas: req.group.generators().to_vec(),
                m: req.m,
                t: req.shots,
                histogram: None,
            });
        }
        Ok(sums)
    }
}

impl CbSampler for SimulatedSampler {
    fn estimate_v(&self, req: &VRequest<'_>) -> Result<Vec<f64>> {
        if req.shots == 0 {
            return Err(Error::InvalidParameter("V needs at least one shot".into()));
        }
        let coords = check_members(req)?;
        let t = req.shots as f64;
        if req.group.rank() <= HISTOGRAM_MAX_RANK {
            let hist = self.histogram(req.group, req.group, req.m, req.shots, req.experiment)?;
            // (-1)^{<x, z>} = (-1)^{c(x) . s(z)}, so one transform gives every x
            let mut w: Vec<i64> = hist.into_iter().map(|c| c as i64).collect();
            fwht(&mut w);
            Ok(coords.iter().map(|&c| w[c] as f64 / t).collect())
        } else {
            Ok(self.direct_sums(req)?.into_iter().map(|s| s as f64 / t).collect())
        }
    }

    fn measurements(&self) -> u64 {
        self.counter.load(Ordering::Relaxed)
    }
}
