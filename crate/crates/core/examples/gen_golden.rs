//! Regenerates `tests/golden/cb_distributions.json` from the dense matrix
//! oracle: `cargo run -p pauli-probe --example gen_golden`.

#[path = "../tests/golden/cases.rs"]
mod cases;

use std::collections::BTreeMap;

use pauli_probe::oracle::brute_force_cb_distribution;

fn main() {
    let golden: BTreeMap<&str, Vec<f64>> = cases::cases()
        .iter()
        .map(|c| (c.name, brute_force_cb_distribution(&c.g, &c.h, c.m, &c.oracle).unwrap()))
        .collect();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/cb_distributions.json");
    std::fs::write(path, serde_json::to_string_pretty(&golden).unwrap() + "\n").unwrap();
    println!("wrote {} distributions to {path}", golden.len());
}
