//! Sweep files name one of the bundled families and the values of its free
//! parameter:
//!
//! ```json
//! {"family": "ssh", "v": 1.0, "values": [0.5, 1.5]}
//! ```
//!
//! `qwz` and `bhz` sweep the mass `m`; `ssh` sweeps `w` at fixed `v`;
//! `harper` sweeps `mu` at fixed `a`.

use crate::model_file::{parse_json, LoadError};
use serde::Deserialize;
use std::path::Path;
use topoband_core::models::{bhz, harper, qwz, ssh, BulkModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Qwz,
    Bhz,
    Ssh,
    Harper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub kind: FamilyKind,
    /// The fixed second parameter (`v` for SSH, `a` for Harper).
    pub fixed: f64,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    family: Option<String>,
    values: Option<Vec<f64>>,
    v: Option<f64>,
    a: Option<f64>,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Qwz => "qwz",
            FamilyKind::Bhz => "bhz",
            FamilyKind::Ssh => "ssh",
            FamilyKind::Harper => "harper",
        }
    }

    pub fn model(&self, p: f64) -> BulkModel {
        match self.kind {
            FamilyKind::Qwz => qwz(p),
            FamilyKind::Bhz => bhz(p),
            FamilyKind::Ssh => ssh(self.fixed, p),
            FamilyKind::Harper => harper(self.fixed, p),
        }
    }
}

fn schema(field: &str, message: &str) -> LoadError {
    LoadError::Schema { field: field.into(), message: message.into() }
}

pub fn parse_family(text: &str) -> Result<Family, LoadError> {
    let raw: RawFamily = parse_json(text)?;
    let name = raw.family.ok_or_else(|| schema("family", "missing"))?;
    let values = raw.values.ok_or_else(|| schema("values", "missing"))?;
    let (kind, fixed) = match name.as_str() {
        "qwz" => (FamilyKind::Qwz, None),
        "bhz" => (FamilyKind::Bhz, None),
        "ssh" => (FamilyKind::Ssh, Some(raw.v.ok_or_else(|| schema("v", "missing for ssh"))?)),
        "harper" => (FamilyKind::Harper, Some(raw.a.ok_or_else(|| schema("a", "missing for harper"))?)),
        _ => return Err(schema("family", "expected qwz, bhz, ssh or harper")),
    };
    let unused = match kind {
        FamilyKind::Ssh => raw.a.map(|_| "a"),
        FamilyKind::Harper => raw.v.map(|_| "v"),
        _ => raw.v.map(|_| "v").or(raw.a.map(|_| "a")),
    };
    if let Some(f) = unused {
        return Err(schema(f, "not a parameter of this family"));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(schema("values", "non-finite value"));
    }
    Ok(Family { kind, fixed: fixed.unwrap_or(0.0), values })
}

pub fn load_family(path: &Path) -> Result<Family, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    parse_family(&text)
}
