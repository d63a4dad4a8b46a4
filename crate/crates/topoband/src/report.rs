//! Serializable views of results. Field order here is the order on disk.

use serde::Serialize;
use topoband_core::bulk::{InvariantResult, SpecialPoint, CALIBRATION_TAG};
use topoband_core::correspondence::{CorrespondenceReport, MethodValue, Options, SweepTable};
use topoband_core::edge_invariants::{Crossing, SLOPE_TOL};
use topoband_core::edge_spectrum::{EdgeSpectrum, IncipienceReport, BAND_EDGE_MARGIN, EDGE_WEIGHT, ON_CIRCLE};
use topoband_core::models::{BulkModel, GapReport, GAP_THRESHOLD};

pub const PREIMAGE_REFINE_TOL: f64 = 1e-10;
pub const STRIP_TRUNCATION: f64 = 1e-8;

#[derive(Serialize)]
pub struct Grids {
    pub k2: usize,
    pub flux: usize,
    pub preimage: usize,
    pub gap: usize,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub gap_threshold: f64,
    pub on_circle: f64,
    pub band_edge_margin: f64,
    pub edge_weight: f64,
    pub slope: f64,
    pub strip_truncation: f64,
    pub preimage_refine: f64,
}

#[derive(Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub calibration: &'static str,
    pub grids: Grids,
    pub strip_length: Option<usize>,
    pub tolerances: Tolerances,
}

impl Metadata {
    pub fn new(opts: &Options, strip_length: Option<usize>) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            calibration: CALIBRATION_TAG,
            grids: Grids { k2: opts.k2_grid, flux: opts.flux_grid, preimage: opts.preimage_grid, gap: opts.gap_grid },
            strip_length,
            tolerances: Tolerances {
                gap_threshold: GAP_THRESHOLD,
                on_circle: ON_CIRCLE,
                band_edge_margin: BAND_EDGE_MARGIN,
                edge_weight: EDGE_WEIGHT,
                slope: SLOPE_TOL,
                strip_truncation: STRIP_TRUNCATION,
                preimage_refine: PREIMAGE_REFINE_TOL,
            },
        }
    }
}

#[derive(Serialize)]
pub struct ModelSummary {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub class: &'static str,
    pub filling: usize,
}

impl From<&BulkModel> for ModelSummary {
    fn from(m: &BulkModel) -> Self {
        ModelSummary { d: m.dim(), n: m.bands(), class: m.class().name(), filling: m.filling() }
    }
}

#[derive(Serialize)]
pub struct PointOut {
    pub kind: &'static str,
    pub k: [f64; 2],
    pub sign: i32,
    pub detail: f64,
}

impl PointOut {
    fn new(kind: &'static str, p: &SpecialPoint) -> Self {
        PointOut { kind, k: p.k, sign: p.sign, detail: p.detail }
    }
}

#[derive(Serialize)]
pub struct InvariantOut {
    pub method: &'static str,
    pub value: i32,
    pub grid: usize,
    pub residual: f64,
    pub points: Vec<PointOut>,
}

impl From<&InvariantResult> for InvariantOut {
    fn from(r: &InvariantResult) -> Self {
        let kind = r.method.name();
        InvariantOut {
            method: kind,
            value: r.value,
            grid: r.grid,
            residual: r.residual,
            points: r.points.iter().map(|p| PointOut::new(kind, p)).collect(),
        }
    }
}

impl InvariantOut {
    pub fn incipience(r: &IncipienceReport, grid: usize) -> Self {
        InvariantOut {
            method: "incipience",
            value: r.value,
            grid,
            residual: 0.0,
            points: r
                .points
                .iter()
                .map(|p| PointOut { kind: "incipience", k: p.k, sign: p.sign, detail: p.im_delta_plus })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct InvariantFile {
    pub meta: Metadata,
    pub model: ModelSummary,
    pub result: InvariantOut,
}

#[derive(Serialize)]
pub struct GapOut {
    pub min_gap: f64,
    pub k_min: [f64; 2],
    pub lower_max: f64,
    pub upper_min: f64,
    pub center: f64,
    pub grid: usize,
}

impl From<&GapReport> for GapOut {
    fn from(g: &GapReport) -> Self {
        GapOut {
            min_gap: g.min_gap,
            k_min: g.k_min,
            lower_max: g.lower_max,
            upper_min: g.upper_min,
            center: g.center,
            grid: g.grid,
        }
    }
}

#[derive(Serialize)]
pub struct ValueOut {
    pub method: &'static str,
    pub value: i32,
}

fn values(v: &[MethodValue]) -> Vec<ValueOut> {
    v.iter().map(|m| ValueOut { method: m.method, value: m.value }).collect()
}

#[derive(Serialize)]
pub struct CrossingOut {
    pub k2: f64,
    pub branch: usize,
    pub slope_sign: i32,
    pub slope: f64,
}

impl From<&Crossing> for CrossingOut {
    fn from(c: &Crossing) -> Self {
        CrossingOut { k2: c.k2, branch: c.branch, slope_sign: c.slope_sign, slope: c.slope }
    }
}

#[derive(Serialize)]
pub struct IncipienceOut {
    pub k: [f64; 2],
    pub sign: i32,
    pub im_delta_plus: f64,
    pub im_delta_minus: f64,
}

#[derive(Serialize)]
pub struct VerifyOut {
    pub class: &'static str,
    pub equal: bool,
    pub bulk: Vec<ValueOut>,
    pub edge: Vec<ValueOut>,
    pub gap: GapOut,
    pub strip_length: Option<usize>,
    pub xi: f64,
    pub k2_grid: usize,
    pub fermi: Option<f64>,
    pub crossings: Vec<CrossingOut>,
    pub incipience: Vec<IncipienceOut>,
    pub special_points: Vec<PointOut>,
    pub notes: Vec<String>,
}

impl From<&CorrespondenceReport> for VerifyOut {
    fn from(r: &CorrespondenceReport) -> Self {
        VerifyOut {
            class: r.class.name(),
            equal: r.equal,
            bulk: values(&r.bulk),
            edge: values(&r.edge),
            gap: (&r.gap).into(),
            strip_length: r.strip_length,
            xi: r.xi,
            k2_grid: r.k2_grid,
            fermi: r.fermi,
            crossings: r.crossings.iter().map(CrossingOut::from).collect(),
            incipience: r
                .incipience
                .iter()
                .map(|p| IncipienceOut {
                    k: p.k,
                    sign: p.sign,
                    im_delta_plus: p.im_delta_plus,
                    im_delta_minus: p.im_delta_minus,
                })
                .collect(),
            special_points: r.special_points.iter().map(|(kind, p)| PointOut::new(kind, p)).collect(),
            notes: r.notes.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct VerifyFile {
    pub meta: Metadata,
    pub model: ModelSummary,
    pub report: VerifyOut,
}

#[derive(Serialize)]
pub struct EdgePointOut {
    pub k2: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub weight: f64,
    #[serde(rename = "virtual")]
    pub is_virtual: bool,
}

#[derive(Serialize)]
pub struct BranchOut {
    pub side: &'static str,
    pub periodic: bool,
    pub points: Vec<EdgePointOut>,
}

/// One in-gap strip eigenvalue; `side` is `left`, `right` or `bulk`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct EdgeRow {
    pub k2: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub side: String,
    pub weight: f64,
}

pub fn edge_rows(spec: &EdgeSpectrum) -> Vec<EdgeRow> {
    let mut rows = Vec::new();
    for s in &spec.slices {
        for &(e, wl, wr) in &s.states {
            let (side, weight) = if wl >= EDGE_WEIGHT {
                ("left", wl)
            } else if wr >= EDGE_WEIGHT {
                ("right", wr)
            } else {
                ("bulk", wl.max(wr))
            };
            rows.push(EdgeRow { k2: s.k2, energy: e, side: side.into(), weight });
        }
    }
    rows
}

#[derive(Serialize)]
pub struct EdgeFile {
    pub meta: Metadata,
    pub model: ModelSummary,
    pub xi: f64,
    pub states: Vec<EdgeRow>,
    pub branches: Vec<BranchOut>,
}

impl EdgeFile {
    pub fn new(meta: Metadata, model: ModelSummary, spec: &EdgeSpectrum) -> Self {
        let branches = spec
            .branches
            .iter()
            .map(|b| BranchOut {
                side: b.side.name(),
                periodic: b.periodic,
                points: b
                    .points
                    .iter()
                    .map(|p| EdgePointOut { k2: p.k2, energy: p.energy, weight: p.weight, is_virtual: p.is_virtual })
                    .collect(),
            })
            .collect();
        EdgeFile { meta, model, xi: spec.xi, states: edge_rows(spec), branches }
    }
}

#[derive(Serialize)]
pub struct SweepRowOut {
    pub parameter: f64,
    pub status: &'static str,
    pub bulk: Vec<ValueOut>,
    pub edge: Vec<ValueOut>,
    pub message: String,
}

#[derive(Serialize)]
pub struct SweepFile {
    pub meta: Metadata,
    pub family: String,
    pub equal: usize,
    pub unequal: usize,
    pub gapless: usize,
    pub errors: usize,
    pub rows: Vec<SweepRowOut>,
}

pub fn sweep_rows(t: &SweepTable) -> Vec<SweepRowOut> {
    t.rows
        .iter()
        .map(|row| match &row.result {
            Ok(r) => SweepRowOut {
                parameter: row.parameter,
                status: if r.equal { "equal" } else { "unequal" },
                bulk: values(&r.bulk),
                edge: values(&r.edge),
                message: r.notes.join("; "),
            },
            Err(e) => SweepRowOut {
                parameter: row.parameter,
                status: if e.name() == "Gapless" { "gapless" } else { "error" },
                bulk: Vec::new(),
                edge: Vec::new(),
                message: e.to_string(),
            },
        })
        .collect()
}

/// `method=value` pairs joined by `;`, for CSV cells.
pub fn join_values(v: &[ValueOut]) -> String {
    v.iter().map(|m| format!("{}={}", m.method, m.value)).collect::<Vec<_>>().join(";")
}
