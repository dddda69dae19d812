//! CSV and JSON artifact encoding.
//!
//! Numbers are written as `{:.16e}` (17 significant digits, round-trips every
//! `f64`), lines end in `\n`, and JSON objects have sorted keys, so equal
//! results give byte-identical files.

use std::fmt::Write as _;

use randers_core::causality::ChronoSlice;
use randers_core::geodesics::Curve;
use randers_core::{GridDomain, OneFormField, RiemannianMetricField, ScalarField};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn header(out: &mut String, cols: impl IntoIterator<Item = String>) {
    let cols: Vec<String> = cols.into_iter().collect();
    out.push_str(&cols.join(","));
    out.push('\n');
}

fn row(out: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&num(v));
    }
    out.push('\n');
}

fn coord_names(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

/// `s, x1..xn, v1..vn`.
pub fn curve_csv(c: &Curve) -> Vec<u8> {
    let n = c.dim();
    let mut out = String::new();
    header(&mut out, std::iter::once("s".to_string()).chain(coord_names("x", n)).chain(coord_names("v", n)));
    for k in 0..c.len() {
        row(&mut out, std::iter::once(c.params[k]).chain(c.points[k].iter().copied()).chain(c.velocities[k].iter().copied()));
    }
    out.into_bytes()
}

/// `s, x1..xn, t` for a lifted curve.
pub fn lift_csv(c: &Curve, t: &[f64]) -> Vec<u8> {
    let n = c.dim();
    let mut out = String::new();
    header(&mut out, std::iter::once("s".to_string()).chain(coord_names("x", n)).chain(["t".to_string()]));
    for k in 0..c.len() {
        row(&mut out, std::iter::once(c.params[k]).chain(c.points[k].iter().copied()).chain([t[k]]));
    }
    out.into_bytes()
}

/// One row per node: coordinates then `column`.
pub fn grid_csv(dom: &GridDomain, column: &str, values: impl Fn(usize) -> Option<f64>) -> Vec<u8> {
    let n = dom.dim();
    let mut out = String::new();
    header(&mut out, coord_names("x", n).chain([column.to_string()]));
    for i in 0..dom.node_count() {
        if let Some(v) = values(i) {
            row(&mut out, dom.node_point(i).into_iter().chain([v]));
        }
    }
    out.into_bytes()
}

pub fn mask_csv(dom: &GridDomain, mask: &[bool]) -> Vec<u8> {
    grid_csv(dom, "inside", |i| Some(if mask[i] { 1.0 } else { 0.0 }))
}

pub fn slice_csv(dom: &GridDomain, s: &ChronoSlice) -> Vec<u8> {
    mask_csv(dom, &s.mask)
}

pub fn domain_json(dom: &GridDomain) -> Value {
    let axes: Vec<Value> = dom
        .axes()
        .iter()
        .map(|a| json!({"min": a.min, "max": a.max, "nodes": a.nodes, "periodic": a.periodic}))
        .collect();
    json!({ "axes": axes })
}

pub fn expr_string(f: &ScalarField) -> String {
    f.ast().to_string()
}

/// Component map in the config's `"name[i][j]"` key convention.
pub fn tensor_json(out: &mut Map<String, Value>, name: &str, g: &RiemannianMetricField) {
    let n = g.dim();
    for i in 0..n {
        for j in i..n {
            out.insert(format!("{name}[{i}][{j}]"), Value::String(expr_string(g.component(i, j))));
        }
    }
}

pub fn covector_json(out: &mut Map<String, Value>, name: &str, w: &OneFormField) {
    for i in 0..w.dim() {
        out.insert(format!("{name}[{i}]"), Value::String(expr_string(w.component(i))));
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
