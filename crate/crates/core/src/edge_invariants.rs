//! Edge indices from tracked branches and strip spectra.

use crate::edge_spectrum::{build_strip, strip_states, EdgeBranch, EdgeSpectrum, Side};
use crate::models::{chirality_operator, BulkModel, SymClass};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::TAU;
#[allow(unused_imports)]
use num_traits::Float;

/// Slopes of `E♯ - E_F` below this (relative to the energy scale) count as
/// tangent.
pub const SLOPE_TOL: f64 = 1e-6;

/// Reference energy `E_F(k₂)`, periodic in `k₂`.
#[derive(Clone, Debug, PartialEq)]
pub enum FiducialLine {
    Constant(f64),
    /// Nodes `(k₂, E)` sorted by `k₂` in `[0, 2π)`, linearly interpolated
    /// with wrap-around.
    Piecewise(Vec<(f64, f64)>),
}

impl FiducialLine {
    pub fn piecewise(mut nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::MalformedModel("fiducial line needs at least one node".into()));
        }
        for n in nodes.iter_mut() {
            n.0 -= TAU * (n.0 / TAU).floor();
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(FiducialLine::Piecewise(nodes))
    }

    pub fn eval(&self, k2: f64) -> f64 {
        match self {
            FiducialLine::Constant(e) => *e,
            FiducialLine::Piecewise(nodes) => {
                let k = k2 - TAU * (k2 / TAU).floor();
                let n = nodes.len();
                let j = nodes.partition_point(|p| p.0 <= k);
                let (a, b) = if j == 0 {
                    let (ka, ea) = nodes[n - 1];
                    ((ka - TAU, ea), nodes[0])
                } else if j == n {
                    let (kb, eb) = nodes[0];
                    (nodes[n - 1], (kb + TAU, eb))
                } else {
                    (nodes[j - 1], nodes[j])
                };
                if b.0 == a.0 {
                    return a.1;
                }
                a.1 + (b.1 - a.1) * (k - a.0) / (b.0 - a.0)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Crossing {
    pub k2: f64,
    pub branch: usize,
    /// Sign of `d(E♯ - E_F)/dk₂`.
    pub slope_sign: i32,
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossingSet {
    pub crossings: Vec<Crossing>,
    /// `-Σ slope signs`.
    pub value: i32,
}

impl CrossingSet {
    pub fn unsigned(&self) -> usize {
        self.crossings.len()
    }
}

/// Crossings of the branches with the fiducial line, located by sign change
/// of `E♯ - E_F` (zero counts as positive) and linear interpolation; the
/// slope is taken on the interpolating segment at the crossing.
pub fn signed_crossings(branches: &[&EdgeBranch], fiducial: &FiducialLine, scale: f64) -> Result<CrossingSet> {
    let mut crossings = Vec::new();
    for (bi, b) in branches.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = b.points.iter().map(|p| (p.k2, p.energy - fiducial.eval(p.k2))).collect();
        if b.periodic {
            let first = pts[0];
            pts.push((first.0 + TAU, first.1));
        }
        for w in pts.windows(2) {
            let ((k0, g0), (k1, g1)) = (w[0], w[1]);
            if (g0 >= 0.0) == (g1 >= 0.0) {
                continue;
            }
            let t = g0 / (g0 - g1);
            let k2 = k0 + t * (k1 - k0);
            let slope = (g1 - g0) / (k1 - k0);
            if slope.abs() < SLOPE_TOL * scale {
                return Err(Error::TangentCrossing { k2 });
            }
            crossings.push(Crossing { k2: k2 - TAU * (k2 / TAU).floor(), branch: bi, slope_sign: if slope > 0.0 { 1 } else { -1 }, slope });
        }
    }
    let value = -crossings.iter().map(|c| c.slope_sign).sum::<i32>();
    Ok(CrossingSet { crossings, value })
}

/// Left-edge crossings of a strip spectrum.
pub fn left_crossings(spectrum: &EdgeSpectrum, fiducial: &FiducialLine, scale: f64) -> Result<CrossingSet> {
    let left: Vec<&EdgeBranch> = spectrum.side(Side::Left).collect();
    signed_crossings(&left, fiducial, scale)
}

/// Zero modes at the left end of a chiral strip, signed by chirality.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroModeCount {
    pub value: i32,
    pub chiralities: Vec<f64>,
    pub n: usize,
}

pub fn chiral_zero_count(model: &BulkModel, n: usize) -> Result<ZeroModeCount> {
    if model.class() != SymClass::AIII || model.dim() != 1 {
        return Err(Error::ClassMismatch { expected: "AIII", found: model.class().name() });
    }
    let nb = model.bands();
    let tol = 1e-8 * model.scale();
    let strip = build_strip(model, n, 0.0);
    let pi = chirality_operator(nb);
    let mut chiralities = Vec::new();
    for s in strip_states(&strip, -tol, tol)? {
        if s.side() != Some(Side::Left) {
            continue;
        }
        let mut c = 0.0;
        for (t, z) in s.vector.iter().enumerate() {
            c += pi[(t % nb, t % nb)].re * z.norm_sqr();
        }
        let total: f64 = s.vector.iter().map(C64::norm_sqr).sum();
        let c = c / total;
        if c.abs() < 1.0 - 1e-6 {
            return Err(Error::MixedChirality { chirality: c });
        }
        chiralities.push(c);
    }
    let value = chiralities.iter().map(|&c| if c > 0.0 { 1 } else { -1 }).sum();
    Ok(ZeroModeCount { value, chiralities, n })
}

/// `(count/2) mod 2` from the number of edge crossings of a Kramers pair.
pub fn km_edge(count: i32) -> Result<i32> {
    if count % 2 != 0 {
        return Err(Error::OddCount { count });
    }
    Ok((count.abs() / 2) % 2)
}

/// `E_F(k₂) = E_l,sup(k₂) + ε` on the slice grid, `ε = 1e-4` times the
/// smallest local gap.
pub fn band_edge_fiducial(spectrum: &EdgeSpectrum) -> Result<(FiducialLine, f64)> {
    let gap = spectrum.slices.iter().map(|s| s.hi - s.lo).fold(f64::INFINITY, f64::min);
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::Gapless { gap: gap.max(0.0), k: [f64::NAN, f64::NAN] });
    }
    let eps = 1e-4 * gap;
    let nodes = spectrum.slices.iter().map(|s| (s.k2, s.lo + eps)).collect();
    Ok((FiducialLine::piecewise(nodes)?, eps))
}

/// Signed left-edge crossings with a fiducial hugging the top of the lower
/// band.
pub fn crossings_vs_band_edge(model: &BulkModel, spectrum: &EdgeSpectrum) -> Result<CrossingSet> {
    let defect = crate::edge_spectrum::singular_hopping_defect(model);
    if model.bands() != 2 || defect > 1e-12 * model.scale() {
        return Err(Error::NotSingularHopping { magnitude: defect });
    }
    let (fid, _) = band_edge_fiducial(spectrum)?;
    left_crossings(spectrum, &fid, model.scale())
}
