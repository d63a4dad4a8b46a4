//! Model files: `{"d", "N", "class", "filling", "V", "A"}`, where `V` and `A`
//! map signed harmonic indices (as strings) to `N×N` arrays of `[re, im]`.

use crate::canonical;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use topoband_core::models::{BulkModel, FourierMatrix, SymClass};
use topoband_core::numerics::ComplexMatrix;
use topoband_core::C64;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error(transparent)]
    Model(#[from] topoband_core::Error),
}

type Harmonics = BTreeMap<String, Vec<Vec<[f64; 2]>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    d: Option<usize>,
    #[serde(rename = "N")]
    n: Option<usize>,
    class: Option<String>,
    filling: Option<usize>,
    #[serde(rename = "V")]
    v: Option<Harmonics>,
    #[serde(rename = "A")]
    a: Option<Harmonics>,
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> LoadError {
    LoadError::Schema { field: field.into(), message: message.into() }
}

fn required<T>(x: Option<T>, field: &str) -> Result<T, LoadError> {
    x.ok_or_else(|| schema(field, "missing"))
}

/// Parser errors from serde come with a byte position; the field path is
/// tracked alongside.
pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, LoadError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        LoadError::Parse { line: inner.line(), column: inner.column(), field, message: inner.to_string() }
    })?;
    de.end().map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        field: ".".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

fn fourier(name: &str, h: Harmonics, n: usize) -> Result<FourierMatrix, LoadError> {
    let mut out = FourierMatrix::zero(n);
    let mut seen = BTreeMap::new();
    for (key, rows) in h {
        let m: i32 = key.trim().parse().map_err(|_| schema(format!("{name}.{key}"), "harmonic key is not an integer"))?;
        if seen.insert(m, ()).is_some() {
            return Err(schema(format!("{name}.{key}"), "duplicate harmonic"));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(schema(format!("{name}.{key}"), format!("expected a {n}×{n} matrix")));
        }
        let c = ComplexMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
        if c.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(schema(format!("{name}.{key}"), "non-finite entry"));
        }
        out.set(m, c);
    }
    Ok(out)
}

pub fn parse_model(text: &str) -> Result<BulkModel, LoadError> {
    let raw: RawModel = parse_json(text)?;
    let d = required(raw.d, "d")?;
    let n = required(raw.n, "N")?;
    let class = required(raw.class, "class")?;
    let filling = required(raw.filling, "filling")?;
    let v = required(raw.v, "V")?;
    let a = required(raw.a, "A")?;
    if d != 1 && d != 2 {
        return Err(schema("d", format!("must be 1 or 2, got {d}")));
    }
    if n == 0 {
        return Err(schema("N", "must be positive"));
    }
    let class = SymClass::parse(&class).ok_or_else(|| schema("class", format!("unknown class {class:?}")))?;
    if filling == 0 || filling >= n {
        return Err(schema("filling", format!("must lie in 1..{n}")));
    }
    let v = fourier("V", v, n)?;
    let a = fourier("A", a, n)?;
    Ok(BulkModel::new(d, v, a, class, filling)?)
}

pub fn load_model(path: &Path) -> Result<BulkModel, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    parse_model(&text)
}

struct HarmonicsOut<'a>(&'a FourierMatrix);

impl Serialize for HarmonicsOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = self.0.size();
        let mut map = s.serialize_map(None)?;
        for (m, c) in self.0.harmonics() {
            let rows: Vec<Vec<[f64; 2]>> =
                (0..n).map(|i| (0..n).map(|j| [c[(i, j)].re, c[(i, j)].im]).collect()).collect();
            map.serialize_entry(&m.to_string(), &rows)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct ModelOut<'a> {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    class: &'static str,
    filling: usize,
    #[serde(rename = "V")]
    v: HarmonicsOut<'a>,
    #[serde(rename = "A")]
    a: HarmonicsOut<'a>,
}

pub fn model_to_json(model: &BulkModel) -> String {
    canonical::to_string(&ModelOut {
        d: model.dim(),
        n: model.bands(),
        class: model.class().name(),
        filling: model.filling(),
        v: HarmonicsOut(model.v()),
        a: HarmonicsOut(model.a()),
    })
}
