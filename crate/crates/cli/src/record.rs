use std::collections::BTreeMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use pauli_probe::sim::{CbSampler, VRequest};
use pauli_probe::Result;

/// One row of `decay.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub pauli: String,
    pub m: u64,
    pub v_hat: f64,
    pub t: u64,
    pub group_id: usize,
}

struct Call {
    experiment: u64,
    group: String,
    paulis: Vec<String>,
    m: u64,
    t: u64,
    v: Vec<f64>,
}

/// Passes requests through and keeps every returned V.
pub struct Recorder<'a> {
    inner: &'a dyn CbSampler,
    calls: Mutex<Vec<Call>>,
}

impl<'a> Recorder<'a> {
    pub fn new(inner: &'a dyn CbSampler) -> Self {
        Recorder {
            inner,
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Rows ordered by group and length. Groups are numbered by first
    /// appearance in (m, experiment id) order, so the table does not depend
    /// on scheduling.
    pub fn rows(&self) -> Vec<DecayRow> {
        let mut calls = std::mem::take(&mut *self.calls.lock().unwrap());
        calls.sort_by_key(|c| (c.m, c.experiment));
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut rows = Vec::new();
        for c in calls {
            let next = ids.len();
            let group_id = *ids.entry(c.group).or_insert(next);
            rows.extend(c.paulis.into_iter().zip(c.v).map(|(pauli, v_hat)| DecayRow {
                pauli,
                m: c.m,
                v_hat,
                t: c.t,
                group_id,
            }));
        }
        rows.sort_by_key(|r| (r.group_id, r.m));
        rows
    }
}

impl CbSampler for Recorder<'_> {
    fn estimate_v(&self, req: &VRequest<'_>) -> Result<Vec<f64>> {
        let v = self.inner.estimate_v(req)?;
        let group = req
            .group
            .generators()
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join(",");
        self.calls.lock().unwrap().push(Call {
            experiment: req.experiment,
            group,
            paulis: req.paulis.iter().map(|p| p.to_string()).collect(),
            m: req.m,
            t: req.shots,
            v: v.clone(),
        });
        Ok(v)
    }

    fn measurements(&self) -> u64 {
        self.inner.measurements()
    }
}
