//! JSON encoding shared by the CLI, examples, and certificate files.
//!
//! A complex matrix is an array of rows; each entry is a two-element array
//! [re, im] of doubles, e.g. I₂ = [[[1,0],[0,0]],[[0,0],[1,0]]]. Theory
//! specs, conversion certificates, and solver debug dumps are plain JSON
//! objects built from that encoding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::convert::{ChoiMatrix, ConversionCertificate, Verdict, Witness};
use crate::error::{Error, Result};
use crate::hermitian::{DensityMatrix, HermitianMatrix};
use crate::rdm::RdmVerdict;
use crate::sdp::SdpProblem;
use crate::theory::TheorySpec;

pub fn matrix_to_json(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|j| {
                Value::Array(
                    (0..m.ncols()).map(|k| json!([m[(j, k)].re, m[(j, k)].im])).collect(),
                )
            })
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<DMatrix<Complex64>> {
    let rows = v.as_array().ok_or_else(|| bad("matrix must be an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(bad("empty matrix"));
    }
    let mut out = DMatrix::zeros(n, 0);
    for (j, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| bad("matrix row must be an array"))?;
        if j == 0 {
            out = DMatrix::zeros(n, row.len());
        }
        if row.len() != out.ncols() {
            return Err(bad("ragged matrix rows"));
        }
        for (k, entry) in row.iter().enumerate() {
            let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                bad("matrix entry must be a two-element [re, im] array")
            })?;
            let re = pair[0].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            let im = pair[1].as_f64().ok_or_else(|| bad("non-numeric entry"))?;
            out[(j, k)] = Complex64::new(re, im);
        }
    }
    Ok(out)
}

fn bad(msg: &str) -> Error {
    Error::InvalidInput(msg.to_string())
}

pub fn hermitian_to_json(m: &HermitianMatrix) -> Value {
    matrix_to_json(m.raw())
}

pub fn hermitian_from_json(v: &Value) -> Result<HermitianMatrix> {
    HermitianMatrix::new(matrix_from_json(v)?)
}

pub fn density_from_json(v: &Value) -> Result<DensityMatrix> {
    DensityMatrix::new(hermitian_from_json(v)?)
}

pub fn theory_spec_to_json(spec: &TheorySpec) -> Value {
    match spec {
        TheorySpec::Gibbs { gamma } => {
            json!({"type": "gibbs", "gamma": hermitian_to_json(gamma.matrix())})
        }
        TheorySpec::Coherence { dim } => json!({"type": "coherence", "dim": dim}),
        TheorySpec::RealQm { dim } => json!({"type": "real", "dim": dim}),
        TheorySpec::GroupTwirl { unitaries } => json!({
            "type": "twirl",
            "unitaries": unitaries.iter().map(matrix_to_json).collect::<Vec<_>>(),
        }),
        TheorySpec::Custom { generators } => json!({
            "type": "custom",
            "generators": generators
                .iter()
                .map(|g| hermitian_to_json(g.matrix()))
                .collect::<Vec<_>>(),
        }),
    }
}

pub fn theory_spec_from_json(v: &Value) -> Result<TheorySpec> {
    let kind = v
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("theory spec needs a string \"type\" field"))?;
    let dim_field = || {
        v.get("dim")
            .and_then(Value::as_u64)
            .map(|d| d as usize)
            .ok_or_else(|| bad("theory spec needs an integer \"dim\""))
    };
    match kind {
        "gibbs" => {
            let gamma = v.get("gamma").ok_or_else(|| bad("gibbs spec needs \"gamma\""))?;
            Ok(TheorySpec::Gibbs { gamma: density_from_json(gamma)? })
        }
        "coherence" => Ok(TheorySpec::Coherence { dim: dim_field()? }),
        "real" => Ok(TheorySpec::RealQm { dim: dim_field()? }),
        "twirl" => {
            let us = v
                .get("unitaries")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("twirl spec needs \"unitaries\""))?;
            Ok(TheorySpec::GroupTwirl {
                unitaries: us.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?,
            })
        }
        "custom" => {
            let gs = v
                .get("generators")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("custom spec needs \"generators\""))?;
            Ok(TheorySpec::Custom {
                generators: gs.iter().map(density_from_json).collect::<Result<Vec<_>>>()?,
            })
        }
        other => Err(bad(&format!("unknown theory type {other:?}"))),
    }
}

pub fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "Feasible",
        Verdict::Infeasible => "Infeasible",
        Verdict::Boundary => "Boundary",
    }
}

pub fn certificate_to_json(cert: &ConversionCertificate) -> Value {
    let mut obj = Map::new();
    obj.insert("verdict".into(), json!(verdict_str(cert.verdict)));
    obj.insert("w_value".into(), json!(cert.w_value));
    if let Some(choi) = &cert.choi {
        obj.insert("choi".into(), hermitian_to_json(&choi.matrix));
        obj.insert("dims".into(), json!([choi.dims.0, choi.dims.1]));
    }
    if let Some(w) = &cert.witness {
        obj.insert(
            "witness".into(),
            json!({
                "N": hermitian_to_json(&w.n),
                "Y": hermitian_to_json(&w.y),
                "tau": hermitian_to_json(&w.tau),
                "margin": w.margin,
            }),
        );
    }
    Value::Object(obj)
}

/// Certificate payload parsed back from JSON; dims are required alongside
/// the Choi block so the matrix can be validated.
pub struct ParsedCertificate {
    pub verdict: Verdict,
    pub choi: Option<ChoiMatrix>,
    pub witness: Option<Witness>,
    pub w_value: f64,
}

pub fn certificate_from_json(v: &Value) -> Result<ParsedCertificate> {
    let verdict = match v.get("verdict").and_then(Value::as_str) {
        Some("Feasible") => Verdict::Feasible,
        Some("Infeasible") => Verdict::Infeasible,
        Some("Boundary") => Verdict::Boundary,
        _ => return Err(bad("certificate needs a verdict of Feasible|Infeasible|Boundary")),
    };
    let w_value = v
        .get("w_value")
        .and_then(Value::as_f64)
        .ok_or_else(|| bad("certificate needs a numeric w_value"))?;
    let choi = match v.get("choi") {
        Some(m) => {
            let dims = v
                .get("dims")
                .and_then(Value::as_array)
                .filter(|d| d.len() == 2)
                .ok_or_else(|| bad("certificate with a choi block needs \"dims\": [d_out, d_in]"))?;
            let d_out = dims[0].as_u64().ok_or_else(|| bad("bad dims"))? as usize;
            let d_in = dims[1].as_u64().ok_or_else(|| bad("bad dims"))? as usize;
            Some(ChoiMatrix::new((d_out, d_in), hermitian_from_json(m)?)?)
        }
        None => None,
    };
    let witness = match v.get("witness") {
        Some(w) => {
            let get = |key: &str| {
                w.get(key).ok_or_else(|| bad(&format!("witness block needs {key:?}")))
            };
            Some(Witness {
                n: hermitian_from_json(get("N")?)?,
                y: hermitian_from_json(get("Y")?)?,
                tau: hermitian_from_json(get("tau")?)?,
                margin: get("margin")?
                    .as_f64()
                    .ok_or_else(|| bad("witness margin must be numeric"))?,
            })
        }
        None => None,
    };
    Ok(ParsedCertificate { verdict, choi, witness, w_value })
}

pub fn hmin_record_json(hmin: f64, method: &str, heuristic: bool) -> Value {
    json!({
        "hmin": hmin,
        "two_pow_neg_hmin": (-hmin).exp2(),
        "method": method,
        "heuristic": heuristic,
    })
}

pub fn rdm_verdict_to_json(v: &RdmVerdict) -> Value {
    let mut obj = Map::new();
    obj.insert("exists".into(), json!(v.exists));
    obj.insert("unital".into(), json!(v.unital));
    if let Some(choi) = &v.delta_choi {
        obj.insert("delta_choi".into(), hermitian_to_json(&choi.matrix));
    }
    if let Some((vec, eig)) = &v.negativity_witness {
        obj.insert(
            "witness".into(),
            json!({
                "eigenvalue": eig,
                "eigenvector": vec.iter().map(|c| json!([c.re, c.im])).collect::<Vec<_>>(),
            }),
        );
    }
    if let Some(f) = &v.farkas {
        obj.insert(
            "witness".into(),
            json!({
                "coefficients": f.coefficients,
                "matrix": hermitian_to_json(&f.witness_matrix),
                "margin": f.margin,
            }),
        );
    }
    Value::Object(obj)
}

/// Debug dump of a linear-matrix feasibility/optimization problem for
/// replay: {dim, C, constraints: [{A, b}]}.
pub fn sdp_problem_to_json(p: &SdpProblem) -> Value {
    json!({
        "dim": p.variable_dim,
        "C": hermitian_to_json(&p.objective),
        "constraints": p
            .constraints
            .iter()
            .map(|(a, b)| json!({"A": hermitian_to_json(a), "b": b}))
            .collect::<Vec<_>>(),
    })
}
