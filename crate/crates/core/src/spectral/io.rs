//! JSON model documents.
//!
//! ```json
//! {
//!   "space": "sphere:2",
//!   "m": 2,
//!   "coeffs": [[[1, 0], [0, 1]], [[0.5, 0], [0, 0.5]]],
//!   "tail": {"c": 0.1, "r": 0.5},
//!   "temporal": {"variant": "ma1", "parameters": {"phi": [[0.5, 0.1], [0, 0.3]]}}
//! }
//! ```
//!
//! Matrices are row-major, either nested rows or a flat list of `m²` numbers.
//! `tail` and `temporal` are optional; without `temporal` the model is
//! spatial. Temporal variants: `pure_spatial`; `separable` with parameters
//! `{"kind": "ar1", "phi": φ}` or `{"kind": "exponential", "theta": θ}`;
//! `ma1` with `{"phi": Φ}`; `lag_table` with `{"lags": [..], "coeffs": [[..], ..]}`
//! giving one coefficient list per nonzero lag.

use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::{
    CovarianceSeries, LagTable, Model, ScalarCorrelation, SpatialModel, SpatioTemporalModel, TailEnvelope,
    TemporalKernel,
};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::spaces::SpaceParams;

fn perr(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| perr(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(path, "expected an object"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(path, format!("expected a number, found {v}")))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| perr(path, "expected an array"))
}

fn parse_matrix(v: &Value, m: usize, path: &str) -> Result<Mat> {
    let items = as_array(v, path)?;
    let mut data = Vec::with_capacity(m * m);
    if items.first().is_some_and(Value::is_array) {
        if items.len() != m {
            return Err(perr(path, format!("matrix has {} rows, expected {m}", items.len())));
        }
        for (i, row) in items.iter().enumerate() {
            let rpath = format!("{path}[{i}]");
            let row = as_array(row, &rpath)?;
            if row.len() != m {
                return Err(perr(&rpath, format!("row has {} entries, expected {m}", row.len())));
            }
            for (j, x) in row.iter().enumerate() {
                data.push(as_f64(x, &format!("{rpath}[{j}]"))?);
            }
        }
    } else {
        if items.len() != m * m {
            return Err(perr(path, format!("flat matrix has {} entries, expected {}", items.len(), m * m)));
        }
        for (j, x) in items.iter().enumerate() {
            data.push(as_f64(x, &format!("{path}[{j}]"))?);
        }
    }
    Ok(Mat::from_row_slice(m, m, &data))
}

fn parse_matrix_list(v: &Value, m: usize, path: &str) -> Result<Vec<Mat>> {
    let items = as_array(v, path)?;
    if items.is_empty() {
        return Err(perr(path, "needs at least one matrix"));
    }
    items
        .iter()
        .enumerate()
        .map(|(n, x)| parse_matrix(x, m, &format!("{path}[{n}]")))
        .collect()
}

fn parse_kernel(v: &Value, m: usize, degrees: usize) -> Result<TemporalKernel> {
    let obj = as_object(v, "temporal")?;
    let variant = field(obj, "variant", "temporal")?
        .as_str()
        .ok_or_else(|| perr("temporal.variant", "expected a string"))?;
    let params = obj.get("parameters").cloned().unwrap_or(Value::Object(Map::new()));
    let pobj = as_object(&params, "temporal.parameters")?;
    let ppath = "temporal.parameters";
    let config = |loc: &str, e: Error| perr(join(ppath, loc), e.to_string());
    Ok(match variant {
        "pure_spatial" => TemporalKernel::PureSpatial,
        "separable" | "separable_scalar" => {
            let kind = field(pobj, "kind", ppath)?
                .as_str()
                .ok_or_else(|| perr(join(ppath, "kind"), "expected a string"))?;
            let corr = match kind.to_ascii_lowercase().as_str() {
                "ar1" => {
                    let phi = as_f64(field(pobj, "phi", ppath)?, &join(ppath, "phi"))?;
                    ScalarCorrelation::ar1(phi).map_err(|e| config("phi", e))?
                }
                "exponential" => {
                    let theta = as_f64(field(pobj, "theta", ppath)?, &join(ppath, "theta"))?;
                    ScalarCorrelation::exponential(theta).map_err(|e| config("theta", e))?
                }
                other => return Err(perr(join(ppath, "kind"), format!("unknown correlation '{other}'"))),
            };
            TemporalKernel::Separable(corr)
        }
        "ma1" | "vector_ma1" => {
            TemporalKernel::VectorMa1 { phi: parse_matrix(field(pobj, "phi", ppath)?, m, &join(ppath, "phi"))? }
        }
        "lag_table" => {
            let lpath = join(ppath, "lags");
            let lags = as_array(field(pobj, "lags", ppath)?, &lpath)?
                .iter()
                .enumerate()
                .map(|(i, x)| x.as_i64().ok_or_else(|| perr(format!("{lpath}[{i}]"), "expected an integer lag")))
                .collect::<Result<Vec<i64>>>()?;
            let cpath = join(ppath, "coeffs");
            let per_lag = as_array(field(pobj, "coeffs", ppath)?, &cpath)?;
            let mut coeffs = Vec::with_capacity(per_lag.len());
            for (k, list) in per_lag.iter().enumerate() {
                let kpath = format!("{cpath}[{k}]");
                let mats = parse_matrix_list(list, m, &kpath)?;
                if mats.len() != degrees {
                    return Err(perr(kpath, format!("{} degrees listed, expected {degrees}", mats.len())));
                }
                coeffs.push(mats);
            }
            TemporalKernel::LagTable(LagTable::new(lags, coeffs).map_err(|e| perr(ppath, e.to_string()))?)
        }
        other => return Err(perr("temporal.variant", format!("unknown variant '{other}'"))),
    })
}

/// Parses a model document. Syntax errors carry line and column; structural
/// errors carry the path of the offending field.
pub fn parse_model(text: &str) -> Result<Model> {
    let doc: Value = serde_json::from_str(text)
        .map_err(|e| perr(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let obj = as_object(&doc, "document")?;
    let space_str = field(obj, "space", "")?.as_str().ok_or_else(|| perr("space", "expected a string"))?;
    let space: SpaceParams = space_str.parse().map_err(|e: Error| perr("space", e.to_string()))?;
    let m = field(obj, "m", "")?.as_u64().filter(|&m| m > 0).ok_or_else(|| perr("m", "expected a positive integer"))?
        as usize;
    let coeffs = parse_matrix_list(field(obj, "coeffs", "")?, m, "coeffs")?;
    let tail = match obj.get("tail") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let tobj = as_object(t, "tail")?;
            let c = as_f64(field(tobj, "c", "tail")?, "tail.c")?;
            let r = as_f64(field(tobj, "r", "tail")?, "tail.r")?;
            Some(TailEnvelope::new(c, r).map_err(|e| perr("tail", e.to_string()))?)
        }
    };
    match obj.get("temporal") {
        None | Some(Value::Null) => {
            Ok(Model::Spatial(SpatialModel::new(space, coeffs, tail).map_err(|e| perr("coeffs", e.to_string()))?))
        }
        Some(t) => {
            let kernel = parse_kernel(t, m, coeffs.len())?;
            let model = SpatioTemporalModel::new(space, coeffs, kernel, tail).map_err(|e| perr("temporal", e.to_string()))?;
            Ok(Model::SpatioTemporal(model))
        }
    }
}

/// Reads and parses a model file.
pub fn read_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse_model(&text)
}

fn matrix_json(b: &Mat) -> Value {
    Value::Array(
        (0..b.nrows())
            .map(|i| Value::Array((0..b.ncols()).map(|j| json!(b[(i, j)])).collect()))
            .collect(),
    )
}

fn list_json(bs: &[Mat]) -> Value {
    Value::Array(bs.iter().map(matrix_json).collect())
}

/// The document form of a model; [`parse_model`] inverts it exactly.
pub fn model_to_json(model: &Model) -> Value {
    let mut obj = Map::new();
    obj.insert("space".into(), json!(model.space().designation()));
    obj.insert("m".into(), json!(model.dim()));
    if let Some(t) = model.tail() {
        obj.insert("tail".into(), json!({"c": t.c(), "r": t.r()}));
    }
    match model {
        Model::Spatial(s) => {
            obj.insert("coeffs".into(), list_json(s.coeffs()));
        }
        Model::SpatioTemporal(s) => {
            obj.insert("coeffs".into(), list_json(s.base()));
            let parameters = match s.kernel() {
                TemporalKernel::PureSpatial => json!({}),
                TemporalKernel::Separable(corr) => serde_json::to_value(corr).expect("plain data serialises"),
                TemporalKernel::VectorMa1 { phi } => json!({"phi": matrix_json(phi)}),
                TemporalKernel::LagTable(t) => json!({
                    "lags": t.lags(),
                    "coeffs": t.coeffs().iter().map(|l| list_json(l)).collect::<Vec<_>>(),
                }),
            };
            obj.insert("temporal".into(), json!({"variant": s.kernel().name(), "parameters": parameters}));
        }
    }
    Value::Object(obj)
}

pub fn model_to_string(model: &Model) -> String {
    serde_json::to_string_pretty(&model_to_json(model)).expect("plain data serialises")
}

/// Hex SHA-256 of the compact document form (keys sorted).
pub fn model_hash(model: &Model) -> String {
    let text = serde_json::to_string(&model_to_json(model)).expect("plain data serialises");
    hex::encode(Sha256::digest(text.as_bytes()))
}
