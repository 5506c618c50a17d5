//! JSON and JSONL records.
//!
//! Polynomials are little-endian coefficient lists, rational functions are
//! `{"num": [..], "den": [..]}`, matrices are lists of rows.

use std::io::{BufRead, Write};

use serde_json::{json, Value};

use crate::blocklu::{BlockLU, CorrelatedPair};
use crate::error::{Error, Result};
use crate::latmod::{MatK, MatR, PartialLattice};
use crate::scalars::{Fq, LaurentJet, Poly, RatFun};

pub fn poly_json(p: &Poly) -> Value {
    json!(p.coeffs())
}

pub fn ratfun_json(x: &RatFun) -> Value {
    json!({ "num": x.num().coeffs(), "den": x.den().coeffs() })
}

pub fn matr_json(m: &MatR) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(poly_json).collect()))
            .collect(),
    )
}

pub fn matk_json(m: &MatK) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(ratfun_json).collect()))
            .collect(),
    )
}

pub fn jet_json(j: &LaurentJet) -> Value {
    json!({
        "leading_exponent": j.leading_exponent(),
        "coefficients": j.coefficients(),
        "precision": j.precision(),
    })
}

pub fn lattice_json(l: &PartialLattice) -> Value {
    json!({
        "q": l.field().q(),
        "D": l.ambient_dim(),
        "d": l.rank(),
        "basis": matr_json(l.basis()),
        "covol_exp": l.covol_exp(),
    })
}

pub fn block_lu_json(lu: &BlockLU) -> Value {
    json!({
        "q": lu.g_bar.field().q(),
        "d": lu.d,
        "n": lu.n,
        "level": lu.level,
        "ell": lu.ell,
        "u_minus": matk_json(&lu.u_minus),
        "g_bar": matk_json(&lu.g_bar),
        "g_under": matk_json(&lu.g_under),
        "z": matk_json(&lu.z),
        "u_plus": matk_json(&lu.u_plus),
    })
}

pub fn correlated_pair_json(c: &CorrelatedPair) -> Value {
    json!({
        "q": c.lat_d.1.field().q(),
        "lat_d": { "m": c.lat_d.0, "basis": matr_json(&c.lat_d.1) },
        "lat_n": { "m": c.lat_n.0, "basis": matr_json(&c.lat_n.1) },
        "det_jet": jet_json(&c.det_jet),
    })
}

fn bad(what: &str) -> Error {
    Error::Parse(format!("bad JSON record: {what}"))
}

fn poly_from(f: Fq, v: &Value) -> Result<Poly> {
    let arr = v
        .as_array()
        .ok_or_else(|| bad("polynomial must be a list"))?;
    let coeffs = arr
        .iter()
        .map(|c| {
            c.as_u64()
                .filter(|&c| c < f.q() as u64)
                .map(|c| c as u8)
                .ok_or_else(|| bad("coefficient out of range"))
        })
        .collect::<Result<Vec<u8>>>()?;
    Ok(Poly::new(f, coeffs))
}

pub fn matr_from_json(f: Fq, v: &Value) -> Result<MatR> {
    let rows = v
        .as_array()
        .ok_or_else(|| bad("matrix must be a list of rows"))?;
    let cols = rows
        .first()
        .and_then(|r| r.as_array())
        .map(|r| r.len())
        .ok_or_else(|| bad("empty matrix"))?;
    let mut data = Vec::with_capacity(rows.len() * cols);
    for r in rows {
        let r = r
            .as_array()
            .filter(|r| r.len() == cols)
            .ok_or_else(|| bad("ragged matrix"))?;
        for e in r {
            data.push(poly_from(f, e)?);
        }
    }
    Ok(MatR::from_vec(f, rows.len(), cols, data))
}

/// Parse a lattice record; the basis is re-canonicalized and the stated
/// dimensions and covolume exponent must agree with it.
pub fn lattice_from_json(v: &Value) -> Result<PartialLattice> {
    let get = |k: &str| v.get(k).and_then(|x| x.as_u64()).ok_or_else(|| bad(k));
    let f = Fq::new(get("q")? as u32)?;
    let basis = matr_from_json(f, v.get("basis").ok_or_else(|| bad("basis"))?)?;
    let l = PartialLattice::new(&basis)?;
    if l.ambient_dim() as u64 != get("D")? || l.rank() as u64 != get("d")? {
        return Err(bad("dimensions disagree with basis"));
    }
    if let Some(e) = v.get("covol_exp") {
        if e.as_i64() != Some(l.covol_exp()) {
            return Err(bad("covol_exp disagrees with basis"));
        }
    }
    Ok(l)
}

pub fn write_jsonl<W: Write>(mut w: W, records: impl IntoIterator<Item = Value>) -> Result<()> {
    for r in records {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

pub fn read_lattices<R: BufRead>(r: R) -> Result<Vec<PartialLattice>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| Error::Parse(e.to_string()))?;
        out.push(lattice_from_json(&v)?);
    }
    Ok(out)
}
