//! Fixed models shared by the golden generator and the golden test.

#![allow(dead_code)]

use pauli_probe::channel::{sparse_from_labels, PauliChannel};
use pauli_probe::oracle::{pauli_twirl, rotation, KrausPair, OracleModel};
use pauli_probe::sim::NoiseModel;
use pauli_probe::StabilizerGroup;

pub struct Case {
    pub name: &'static str,
    pub g: StabilizerGroup,
    pub h: StabilizerGroup,
    pub m: u64,
    pub oracle: OracleModel,
}

impl Case {
    /// Same model with the gate replaced by its Pauli twirl.
    pub fn twirled(&self) -> NoiseModel {
        let rates = pauli_twirl(&self.oracle.gate).unwrap();
        let gate = PauliChannel::dense(self.oracle.gate.num_qubits(), rates).unwrap();
        NoiseModel::new(gate, self.oracle.prep.clone(), self.oracle.meas.clone()).unwrap()
    }
}

fn stab(s: &str) -> StabilizerGroup {
    StabilizerGroup::parse(s).unwrap()
}

fn pauli_gate(ch: &PauliChannel) -> KrausPair {
    KrausPair::from_pauli_channel(ch).unwrap()
}

pub fn cases() -> Vec<Case> {
    let x_rot = KrausPair::unitary(rotation(0.3, [1.0, 0.0, 0.0])).unwrap();
    let tilted = {
        let r = rotation(0.2, [0.6, 0.0, 0.8]);
        let u = nalgebra::DMatrix::identity(2, 2).kronecker(&r);
        KrausPair::unitary(u)
            .unwrap()
            .then(&pauli_gate(&PauliChannel::depolarizing_product(2, 0.03).unwrap()))
    };
    let dep2 = PauliChannel::depolarizing_product(2, 0.05).unwrap();
    let mut out = Vec::new();
    for m in 0..=3 {
        out.push(Case {
            name: ["x_rotation_m0", "x_rotation_m1", "x_rotation_m2", "x_rotation_m3"][m as usize],
            g: stab("Z"),
            h: stab("Z"),
            m,
            oracle: OracleModel {
                gate: x_rot.clone(),
                prep: PauliChannel::identity(1),
                meas: PauliChannel::identity(1),
            },
        });
    }
    out.push(Case {
        name: "bell_pair_spam",
        g: stab("ZZ, XX"),
        h: stab("ZZ"),
        m: 2,
        oracle: OracleModel {
            gate: pauli_gate(&dep2),
            prep: sparse_from_labels(2, &[("II", 0.98), ("XI", 0.02)]).unwrap(),
            meas: sparse_from_labels(2, &[("II", 0.99), ("IY", 0.01)]).unwrap(),
        },
    });
    out.push(Case {
        name: "unprepared_basis",
        g: stab("ZI, IZ"),
        h: stab("XI"),
        m: 1,
        oracle: OracleModel {
            gate: pauli_gate(&dep2),
            prep: PauliChannel::identity(2),
            meas: PauliChannel::identity(2),
        },
    });
    out.push(Case {
        name: "tilted_rotation_then_depolarizing",
        g: stab("ZI, IX"),
        h: stab("ZI, IX"),
        m: 3,
        oracle: OracleModel {
            gate: tilted,
            prep: sparse_from_labels(2, &[("II", 0.97), ("ZX", 0.03)]).unwrap(),
            meas: PauliChannel::depolarizing_product(2, 0.02).unwrap(),
        },
    });
    out
}
