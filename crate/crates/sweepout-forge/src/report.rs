//! Versioned JSON run reports, input digests and OFF geometry export.
//!
//! Reports are deterministic: re-running on identical inputs yields an
//! identical document except for the timing block. Rationals are rendered
//! as "p/q" strings and reals with 12 significant digits.

use crate::rat::to_f64;
use crate::sweepout::bundle::FiberRecord;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io;
use std::path::Path;

pub const SCHEMA: &str = "report.v1";

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    /// Input path -> SHA-256 digest of its bytes.
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    /// Wall-clock milliseconds; excluded from determinism guarantees.
    pub timing_ms: u128,
}

impl RunReport {
    pub fn new(subcommand: &str, inputs: BTreeMap<String, String>, results: Value) -> Self {
        RunReport {
            schema: SCHEMA,
            tool: "sweepout-forge",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            inputs,
            results,
            timing_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> io::Result<String> {
    Ok(sha256_hex(&std::fs::read(path)?))
}

/// A real with 12 significant digits.
pub fn real12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    format!("{x:.11e}")
}

/// OFF document of a fiber: its distinct edge endpoints as vertices (the
/// first three chart coordinates, padded with zeros) and each edge as a
/// 2-vertex face.
pub fn fiber_off(rec: &FiberRecord) -> String {
    let mut verts: Vec<Vec<crate::rat::Rat>> = Vec::new();
    let mut index = BTreeMap::new();
    let mut edges = Vec::new();
    for e in &rec.edges {
        let mut pair = Vec::new();
        for v in e.cell.vertices() {
            let p = v.point();
            let next = verts.len();
            let id = *index.entry(p.clone()).or_insert(next);
            if id == verts.len() {
                verts.push(p);
            }
            pair.push(id);
        }
        if pair.len() == 2 {
            edges.push((pair[0], pair[1]));
        }
    }
    let mut out = String::from("OFF\n");
    out.push_str(&format!("{} {} {}\n", verts.len(), edges.len(), edges.len()));
    for v in &verts {
        let mut coords: Vec<String> = v
            .iter()
            .take(3)
            .map(|&c| real12(to_f64(c)))
            .collect();
        while coords.len() < 3 {
            coords.push(real12(0.0));
        }
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    for (a, b) in &edges {
        out.push_str(&format!("2 {a} {b}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn reals_carry_twelve_digits() {
        assert_eq!(real12(0.0), "0.00000000000");
        assert_eq!(real12(1.0), "1.00000000000e0");
        assert_eq!(real12(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn center_fiber_off_has_cube_skeleton_shape() {
        use crate::lattice::cell::CubicalCell;
        use crate::rat::rat_int;
        use crate::sweepout::bundle::{build_bundle, fiber, BuildOptions};
        use crate::sweepout::input::unit_cube_filling;
        let bundle = build_bundle(&unit_cube_filling(2), &BuildOptions::default()).unwrap();
        let center = CubicalCell::vertex(0, &[rat_int(0); 3]);
        let rec = fiber(&bundle, 0, &center).unwrap();
        let off = fiber_off(&rec);
        assert!(off.starts_with("OFF\n8 12 12\n"));
    }
}
