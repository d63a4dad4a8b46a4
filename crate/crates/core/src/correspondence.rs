//! Bulk-edge correspondence checks per symmetry class, and parameter sweeps.

use crate::bulk::{
    chern_fh, chern_great_circle, chern_north_preimage, km_dirac, winding_chiral, Method, SpecialPoint,
};
use crate::clifford::{dirac_decompose, DiracModel};
use crate::edge_invariants::{
    chiral_zero_count, crossings_vs_band_edge, km_edge, left_crossings, Crossing, FiducialLine,
};
use crate::edge_spectrum::{
    check_strip_length, default_strip_length, incipience_points_singular, singular_hopping_defect, strip_edge_branches,
    EdgeSpectrum, IncipiencePoint,
};
use crate::exec::ParMap;
use crate::models::{gap_report, BulkModel, GapReport, SymClass};
use crate::{Error, Result};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub k2_grid: usize,
    pub flux_grid: usize,
    pub preimage_grid: usize,
    pub gap_grid: usize,
    /// Strip length; chosen from the analytic decay length when `None`.
    pub strip_length: Option<usize>,
    /// Constant Fermi level for edge crossings; mid-gap when `None`.
    pub fermi: Option<f64>,
}

impl Default for Options {
    fn default() -> Self {
        Options { k2_grid: 721, flux_grid: 48, preimage_grid: 64, gap_grid: 48, strip_length: None, fermi: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodValue {
    pub method: &'static str,
    pub value: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport {
    pub class: SymClass,
    pub bulk: Vec<MethodValue>,
    pub edge: Vec<MethodValue>,
    pub equal: bool,
    pub gap: GapReport,
    pub strip_length: Option<usize>,
    pub xi: f64,
    pub k2_grid: usize,
    pub fermi: Option<f64>,
    pub crossings: Vec<Crossing>,
    pub incipience: Vec<IncipiencePoint>,
    pub special_points: Vec<(&'static str, SpecialPoint)>,
    /// Methods that were not applicable or were skipped, with the reason.
    pub notes: Vec<String>,
}

fn all_equal(bulk: &[MethodValue], edge: &[MethodValue]) -> bool {
    let Some(first) = bulk.first().or(edge.first()) else {
        return false;
    };
    bulk.iter().chain(edge).all(|m| m.value == first.value) && !bulk.is_empty() && !edge.is_empty()
}

/// Pure-sign `M(k₂) = d_e(0, k₂) d_e(π, k₂)` on `[0, π]`; its number of sign
/// changes mod 2.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityReport {
    pub value: i32,
    pub zeros: Vec<f64>,
}

pub fn m_parity(dirac: &DiracModel, grid: usize) -> Result<ParityReport> {
    let e = dirac.even_index().ok_or(Error::MalformedModel("M(k2) parity needs exactly one active TREI gamma".into()))?;
    let s = dirac.scale();
    let m = |k2: f64| dirac.h([0.0, k2])[e] * dirac.h([PI, k2])[e];
    let grid = grid.max(16);
    let (m0, m1) = (m(0.0), m(PI));
    if m0.abs() < 1e-10 * s * s || m1.abs() < 1e-10 * s * s {
        return Err(Error::EndpointZero);
    }
    let mut zeros = Vec::new();
    let dk = PI / grid as f64;
    let mut prev = m0;
    for j in 1..=grid {
        let k = j as f64 * dk;
        let cur = m(k);
        if cur == 0.0 && j < grid && (prev > 0.0) == (m(k + dk) > 0.0) {
            // touches zero on a node without changing sign
            return Err(Error::UnresolvedSignChange { k2: k });
        }
        if (cur >= 0.0) != (prev >= 0.0) {
            // secant refinement within the cell
            let (mut a, mut b, mut fa, mut fb) = (k - dk, k, prev, cur);
            for _ in 0..60 {
                let c = b - fb * (b - a) / (fb - fa);
                let fc = m(c);
                if fc == 0.0 || (b - a).abs() < 1e-14 {
                    a = c;
                    b = c;
                    break;
                }
                if (fc >= 0.0) == (fa >= 0.0) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                    fb = fc;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        prev = cur;
    }
    let value = (zeros.len() % 2) as i32;
    // the count parity is fixed by the endpoint signs
    debug_assert_eq!(value == 1, (m0 > 0.0) != (m1 > 0.0));
    Ok(ParityReport { value, zeros })
}

fn dirac_of(model: &BulkModel) -> Option<DiracModel> {
    dirac_decompose(model).ok().filter(|d| d.require_traceless().is_ok())
}

/// Mid-gap fiducial: constant when the bands do not overlap in energy,
/// otherwise through the local gap centres of the strip slices.
fn mid_gap(spec: &EdgeSpectrum, gap: &GapReport, fermi: Option<f64>, shift: f64) -> Result<FiducialLine> {
    if let Some(e) = fermi {
        return Ok(FiducialLine::Constant(e));
    }
    if gap.indirect_gap() > 0.0 {
        return Ok(FiducialLine::Constant(gap.center + shift * gap.indirect_gap()));
    }
    FiducialLine::piecewise(spec.slices.iter().map(|s| (s.k2, 0.5 * (s.lo + s.hi) + shift * (s.hi - s.lo))).collect())
}

fn strip<P: ParMap>(model: &BulkModel, opts: &Options, exec: &P) -> Result<EdgeSpectrum> {
    let (n_auto, xi) = default_strip_length(model)?;
    let n = opts.strip_length.unwrap_or(n_auto);
    check_strip_length(n, xi)?;
    let mut spec = strip_edge_branches(model, n, opts.k2_grid, exec)?;
    spec.xi = xi;
    Ok(spec)
}

pub fn verify<P: ParMap>(model: &BulkModel, opts: &Options, exec: &P) -> Result<CorrespondenceReport> {
    let gap = gap_report(model, opts.gap_grid)?;
    let mut r = CorrespondenceReport {
        class: model.class(),
        bulk: Vec::new(),
        edge: Vec::new(),
        equal: false,
        gap: gap.clone(),
        strip_length: None,
        xi: f64::NAN,
        k2_grid: if model.dim() == 1 { 1 } else { opts.k2_grid },
        fermi: None,
        crossings: Vec::new(),
        incipience: Vec::new(),
        special_points: Vec::new(),
        notes: Vec::new(),
    };
    let push = |v: &mut Vec<MethodValue>, m: &'static str, x: i32| v.push(MethodValue { method: m, value: x });
    match model.class() {
        SymClass::AIII => {
            if model.dim() != 1 || model.bands() != 2 {
                return Err(Error::ClassMismatch { expected: "AIII with d = 1 and two bands", found: "AIII" });
            }
            push(&mut r.bulk, Method::Winding.name(), winding_chiral(model)?.value);
            let (n_auto, xi) = default_strip_length(model)?;
            let n = opts.strip_length.unwrap_or(n_auto);
            check_strip_length(n, xi)?;
            r.strip_length = Some(n);
            r.xi = xi;
            push(&mut r.edge, "chiral-zero-modes", chiral_zero_count(model, n)?.value);
        }
        SymClass::A => {
            if model.dim() != 2 {
                return Err(Error::ClassMismatch { expected: "A with d = 2", found: "A with d = 1" });
            }
            push(&mut r.bulk, Method::LatticeFlux.name(), chern_fh(model, opts.flux_grid)?.value);
            let dirac = if model.bands() == 2 { dirac_of(model) } else { None };
            if let Some(d) = &dirac {
                let np = chern_north_preimage(d, opts.preimage_grid, 1e-10)?;
                r.special_points.extend(np.points.iter().map(|p| ("north-preimage", *p)));
                push(&mut r.bulk, Method::NorthPreimage.name(), np.value);
                match chern_great_circle(d, opts.k2_grid) {
                    Ok(gc) => {
                        r.special_points.extend(gc.points.iter().map(|p| ("great-circle", *p)));
                        push(&mut r.bulk, Method::GreatCircle.name(), gc.value);
                    }
                    Err(e @ (Error::TangentCrossing { .. } | Error::DegenerateEllipse { .. })) => {
                        r.notes.push(format!("great-circle skipped: {e}"));
                    }
                    Err(e) => return Err(e),
                }
            } else {
                r.notes.push("preimage and great-circle methods need a two-band Dirac model".into());
            }
            let singular = model.bands() == 2 && singular_hopping_defect(model) <= 1e-12 * model.scale();
            if singular {
                let inc = incipience_points_singular(model, opts.preimage_grid)?;
                push(&mut r.bulk, Method::Incipience.name(), inc.value);
                r.incipience = inc.points;
            }
            let spec = strip(model, opts, exec)?;
            r.strip_length = Some(spec.n);
            r.xi = spec.xi;
            let fid = mid_gap(&spec, &gap, opts.fermi, 0.0)?;
            if let FiducialLine::Constant(e) = fid {
                r.fermi = Some(e);
            }
            let c = left_crossings(&spec, &fid, model.scale())?;
            push(&mut r.edge, "edge-crossings", c.value);
            r.crossings = c.crossings;
            if singular {
                push(&mut r.edge, "band-edge-crossings", crossings_vs_band_edge(model, &spec)?.value);
            }
        }
        SymClass::AII => {
            let d = dirac_of(model).ok_or(Error::NotDirac { residual: f64::NAN })?;
            let km = km_dirac(&d)?;
            r.special_points.extend(km.points.iter().map(|p| ("trim", *p)));
            push(&mut r.bulk, Method::DiracSign.name(), km.value);
            match m_parity(&d, 1024) {
                Ok(p) => push(&mut r.bulk, "m-parity", p.value),
                Err(Error::MalformedModel(msg)) => r.notes.push(format!("m-parity skipped: {msg}")),
                Err(e) => return Err(e),
            }
            let spec = strip(model, opts, exec)?;
            r.strip_length = Some(spec.n);
            r.xi = spec.xi;
            // offset from mid-gap so the fiducial avoids edge Kramers points
            let fid = mid_gap(&spec, &gap, opts.fermi, 0.1)?;
            if let FiducialLine::Constant(e) = fid {
                r.fermi = Some(e);
            }
            let c = left_crossings(&spec, &fid, model.scale())?;
            push(&mut r.edge, "edge-kramers-crossings", km_edge(c.unsigned() as i32)?);
            r.crossings = c.crossings;
        }
    }
    r.equal = all_equal(&r.bulk, &r.edge);
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub parameter: f64,
    pub result: core::result::Result<CorrespondenceReport, Error>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub equal: usize,
    pub unequal: usize,
    pub gapless: usize,
    pub errors: usize,
}

/// One report per parameter value. Rows run through `exec`; strip slices
/// inside a row run sequentially.
pub fn sweep<P, F>(family: F, params: &[f64], opts: &Options, exec: &P) -> SweepTable
where
    P: ParMap,
    F: Fn(f64) -> Result<BulkModel> + Sync + Send,
{
    let results = exec.map_indexed(params.len(), |i| {
        let p = params[i];
        let res = family(p).and_then(|m| verify(&m, opts, &crate::exec::Sequential));
        SweepRow { parameter: p, result: res }
    });
    let mut t = SweepTable { rows: results, equal: 0, unequal: 0, gapless: 0, errors: 0 };
    for row in &t.rows {
        match &row.result {
            Ok(r) if r.equal => t.equal += 1,
            Ok(_) => t.unequal += 1,
            Err(Error::Gapless { .. }) => t.gapless += 1,
            Err(_) => t.errors += 1,
        }
    }
    t
}

/// Default parameter grids of the bundled families: QWZ over seven masses
/// avoiding the gap closings at `|m| ∈ {0, 2}`.
pub fn qwz_sweep_masses() -> Vec<f64> {
    vec![-3.0, -1.5, -1.0, -0.5, 0.5, 1.0, 3.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::models::{bhz, qwz, ssh};

    #[test]
    fn ssh_correspondence() {
        let r = verify(&ssh(0.5, 1.0), &Options::default(), &Sequential).unwrap();
        assert!(r.equal);
        assert_eq!(r.bulk[0].value, -1);
        let r = verify(&ssh(1.5, 1.0), &Options::default(), &Sequential).unwrap();
        assert!(r.equal);
        assert_eq!(r.bulk[0].value, 0);
    }

    #[test]
    fn qwz_table() {
        for (m, c) in [(-3.0, 0), (-1.0, -1), (1.0, 1), (3.0, 0)] {
            let r = verify(&qwz(m), &Options::default(), &Sequential).unwrap();
            assert!(r.equal, "{r:?}");
            assert_eq!(r.bulk.len(), 3);
            assert_eq!(r.bulk[0].value, c);
            assert_eq!(r.fermi, Some(0.0));
        }
    }

    #[test]
    fn bhz_parity() {
        for (m, km) in [(1.0, 1), (3.0, 0), (-1.0, 1)] {
            let d = dirac_decompose(&bhz(m)).unwrap();
            let p = m_parity(&d, 256).unwrap();
            assert_eq!(p.value, km, "m = {m}");
            if m == 1.0 {
                assert_eq!(p.zeros.len(), 1);
                assert!((p.zeros[0] - PI / 2.0).abs() < 1e-10);
            }
        }
        let r = verify(&bhz(1.0), &Options::default(), &Sequential).unwrap();
        assert!(r.equal, "{r:?}");
        assert_eq!(r.bulk[0].value, 1);
    }

    #[test]
    fn sweep_marks_gapless() {
        let opts = Options { k2_grid: 181, ..Options::default() };
        let t = sweep(|m| Ok(qwz(m)), &[1.0, 2.0], &opts, &Sequential);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.equal, 1);
        assert_eq!(t.gapless, 1);
        let empty = sweep(|m| Ok(qwz(m)), &[], &opts, &Sequential);
        assert!(empty.rows.is_empty());
    }
}
