//! Ratio estimator: per-group decay with a doubling sequence length.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::budget::SampleBudget;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, StabilizerCovering};
use crate::sim::rng::mix;
use crate::sim::{CbSampler, VRequest};

pub const DEFAULT_M_CAP: u64 = 1 << 20;
pub const DEFAULT_R_FLOOR: f64 = 1e-9;

/// How the doubling sequence is scheduled across groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Each group stops as soon as all of its elements are assigned.
    PerGroup,
    /// Groups advance together and all run the same set of lengths, so the
    /// round count is exactly `|kappa|` per group. Estimates are identical
    /// to `PerGroup`; only extra rounds are spent.
    SharedKappa,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioConfig {
    pub shots: u64,
    pub m_cap: u64,
    pub r_floor: f64,
    pub schedule: Schedule,
    /// Mixed into every experiment id so distinct calls use distinct
    /// streams.
    pub experiment_base: u64,
}

impl RatioConfig {
    pub fn new(shots: u64) -> Self {
        RatioConfig {
            shots,
            m_cap: DEFAULT_M_CAP,
            r_floor: DEFAULT_R_FLOOR,
            schedule: Schedule::PerGroup,
            experiment_base: 0,
        }
    }

    pub fn schedule(mut self, s: Schedule) -> Self {
        self.schedule = s;
        self
    }

    pub fn experiment_base(mut self, b: u64) -> Self {
        self.experiment_base = b;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioFlags {
    pub converged: bool,
    pub clipped_negative: bool,
    pub m_capped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub pauli: PauliString,
    pub r_hat: f64,
    pub m_used: u64,
    pub group_id: Option<usize>,
    pub flags: RatioFlags,
}

/// One V value, for decay-curve output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub pauli: PauliString,
    pub m: u64,
    pub v_hat: f64,
    pub t: u64,
    pub group_id: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioOutput {
    /// One entry per distinct input Pauli, in first-appearance order.
    pub estimates: Vec<RatioEstimate>,
    pub budget: SampleBudget,
    pub trace: Vec<DecayPoint>,
}

impl RatioOutput {
    pub fn index(&self) -> HashMap<PauliString, &RatioEstimate> {
        self.estimates.iter().map(|e| (e.pauli.clone(), e)).collect()
    }

    pub fn r_hat(&self, p: &PauliString) -> Option<f64> {
        self.estimates.iter().find(|e| &e.pauli == p).map(|e| e.r_hat)
    }
}

struct GroupState {
    group_id: usize,
    members: Vec<usize>,
    paulis: Vec<PauliString>,
    v: Vec<f64>,
    kappa: Vec<u64>,
}

/// Estimates `r_x = 1 - f_x` for every `x` in `xs`.
///
/// Each group of the cover claims the elements of `xs` it contains that no
/// earlier group claimed. A reference value is taken at `m = 0`, then `m`
/// doubles until the decay drops below a third of the reference.
pub fn ratio(
    cover: &StabilizerCovering,
    xs: &[PauliString],
    cfg: &RatioConfig,
    sampler: &dyn CbSampler,
) -> Result<RatioOutput> {
    if cfg.shots == 0 {
        return Err(Error::InvalidParameter("ratio needs t >= 1".into()));
    }
    let mut estimates: Vec<RatioEstimate> = Vec::new();
    let mut seen: HashMap<PauliString, usize> = HashMap::new();
    for x in xs {
        if seen.contains_key(x) {
            continue;
        }
        seen.insert(x.clone(), estimates.len());
        estimates.push(RatioEstimate {
            pauli: x.clone(),
            r_hat: f64::NAN,
            m_used: 0,
            group_id: None,
            flags: RatioFlags::default(),
        });
    }

    let mut groups: Vec<GroupState> = Vec::new();
    let mut claimed = vec![false; estimates.len()];
    for (gid, g) in cover.groups.iter().enumerate() {
        let mut members = Vec::new();
        for (i, e) in estimates.iter().enumerate() {
            if !claimed[i] && !e.pauli.is_identity() && g.contains(&e.pauli) {
                claimed[i] = true;
                members.push(i);
            }
        }
        if !members.is_empty() {
            let paulis = members.iter().map(|&i| estimates[i].pauli.clone()).collect();
            groups.push(GroupState {
                group_id: gid,
                members,
                paulis,
                v: Vec::new(),
                kappa: Vec::new(),
            });
        }
    }
    for (i, e) in estimates.iter_mut().enumerate() {
        if e.pauli.is_identity() {
            // trace preservation fixes f_I = 1
            e.r_hat = 0.0;
            e.flags.converged = true;
        } else if !claimed[i] {
            return Err(Error::NotCovered(e.pauli.to_string()));
        }
    }

    let start = sampler.measurements();
    let mut trace = Vec::new();
    let run = |st: &GroupState, m: u64, trace: &mut Vec<DecayPoint>| -> Result<Vec<f64>> {
        let req = VRequest {
            group: &cover.groups[st.group_id],
            paulis: &st.paulis,
            m,
            shots: cfg.shots,
            experiment: mix(&[cfg.experiment_base, st.group_id as u64, m]),
        };
        let v = sampler.estimate_v(&req)?;
        trace.extend(st.paulis.iter().zip(&v).map(|(p, &v_hat)| DecayPoint {
            pauli: p.clone(),
            m,
            v_hat,
            t: cfg.shots,
            group_id: st.group_id,
        }));
        Ok(v)
    };

    for st in groups.iter_mut() {
        st.v = run(st, 0, &mut trace)?;
    }

    let pending = |st: &GroupState, est: &[RatioEstimate]| st.members.iter().any(|&i| est[i].r_hat.is_nan());
    let mut m = 1u64;
    match cfg.schedule {
        Schedule::PerGroup => {
            for st in groups.iter_mut() {
                let mut m = 1u64;
                while m <= cfg.m_cap && pending(st, &estimates) {
                    let w = run(st, m, &mut trace)?;
                    st.kappa.push(m);
                    assign(st, &w, m, &mut estimates);
                    m *= 2;
                }
            }
        }
        Schedule::SharedKappa => {
            while m <= cfg.m_cap && groups.iter().any(|st| pending(st, &estimates)) {
                for st in groups.iter_mut() {
                    let w = run(st, m, &mut trace)?;
                    st.kappa.push(m);
                    assign(st, &w, m, &mut estimates);
                }
                m *= 2;
            }
        }
    }

    for st in &groups {
        for &i in &st.members {
            let e = &mut estimates[i];
            e.group_id = Some(st.group_id);
            if e.r_hat.is_nan() {
                e.r_hat = cfg.r_floor;
                e.m_used = cfg.m_cap;
                e.flags.m_capped = true;
                log::debug!("{} reached the sequence-length cap", e.pauli);
            }
        }
    }

    let mut kappa: Vec<u64> = groups.iter().flat_map(|g| g.kappa.iter().copied()).collect();
    kappa.sort_unstable();
    kappa.dedup();
    let budget = SampleBudget {
        t: cfg.shots,
        kappa,
        rounds: groups.iter().map(|g| g.kappa.len() as u64).sum(),
        reference_rounds: groups.len() as u64,
        total_measurements: sampler.measurements() - start,
    };
    debug_assert_eq!(
        budget.total_measurements,
        budget.t * (budget.rounds + budget.reference_rounds)
    );
    Ok(RatioOutput {
        estimates,
        budget,
        trace,
    })
}

fn assign(st: &GroupState, w: &[f64], m: u64, estimates: &mut [RatioEstimate]) {
    for (j, &i) in st.members.iter().enumerate() {
        let e = &mut estimates[i];
        if !e.r_hat.is_nan() {
            continue;
        }
        let (v, w) = (st.v[j], w[j]);
        // compare the quotient itself so the accepted value is <= 1/3 after rounding
        let ratio = w / v;
        if w > 0.0 && v > 0.0 && ratio <= 1.0 / 3.0 {
            debug_assert!(ratio > 0.0);
            e.r_hat = 1.0 - ratio.powf(1.0 / m as f64);
            e.m_used = m;
            e.flags.converged = true;
        } else if w <= 0.0 || v <= 0.0 {
            e.r_hat = 1.0;
            e.m_used = m;
            e.flags.clipped_negative = true;
        }
    }
}
