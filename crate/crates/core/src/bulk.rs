//! Bulk indices: chiral winding, Chern number (lattice flux, north-pole
//! preimages, great-circle crossings) and the Kane-Mele sign formula for
//! Dirac models.

use crate::clifford::{classify_trei, gamma, DiracModel, GammaIndex, Parity};
use crate::ellipse::{build_frame, EllipseFrame};
use crate::models::{chirality_operator, BulkModel, SymClass};
use crate::numerics::{eig_hermitian, pfaffian, sign, ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

/// Orientation constants turning a raw signed preimage count or
/// great-circle count into the lattice-flux Chern number of the occupied
/// band. Fixed on QWZ at `m = 1`; see the calibration test.
pub const PREIMAGE_ORIENTATION: i32 = -1;
pub const GREAT_CIRCLE_ORIENTATION: i32 = -1;
/// Recorded in every output so the sign conventions can be audited.
pub const CALIBRATION_TAG: &str = "chern=lattice-flux(occupied); preimage=-1; great-circle=-1; edge=-sum(slope)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Winding,
    LatticeFlux,
    NorthPreimage,
    GreatCircle,
    DiracSign,
    Incipience,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Winding => "winding",
            Method::LatticeFlux => "lattice-flux",
            Method::NorthPreimage => "north-preimage",
            Method::GreatCircle => "great-circle",
            Method::DiracSign => "dirac-sign",
            Method::Incipience => "incipience",
        }
    }
}

/// A located momentum (preimage, crossing, TRIM) with its sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpecialPoint {
    pub k: [f64; 2],
    pub sign: i32,
    /// Jacobian, perpendicular slope or `d_e`, depending on the method.
    pub detail: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantResult {
    /// Integer index, or 0/1 for ℤ₂.
    pub value: i32,
    pub method: Method,
    pub grid: usize,
    /// Method-specific residual (deviation from an integer, Newton residual).
    pub residual: f64,
    pub points: Vec<SpecialPoint>,
}

/// `{0, π}^d`.
pub fn trim_set(d: usize) -> Vec<[f64; 2]> {
    if d == 1 {
        vec![[0.0, 0.0], [PI, 0.0]]
    } else {
        vec![[0.0, 0.0], [PI, 0.0], [0.0, PI], [PI, PI]]
    }
}

fn require_class(model: &BulkModel, class: SymClass) -> Result<()> {
    if model.class() != class {
        return Err(Error::ClassMismatch { expected: class.name(), found: model.class().name() });
    }
    Ok(())
}

/// Off-diagonal block `T(k) = H₂₁(k)` of a two-band chiral model, as
/// `(t₀, α, β)` with `T = t₀ + α e^{-ik} + β e^{ik}`.
fn chiral_block(model: &BulkModel) -> (C64, C64, C64) {
    let v = model.v_at(0.0);
    let a = model.a_at(0.0);
    (v[(1, 0)], a[(1, 0)], a[(0, 1)].conj())
}

/// Winding of `k ↦ T(k)` (counterclockwise positive), by an arg sum and by
/// the orientation and origin enclosure of the ellipse `T` traces.
pub fn winding_chiral(model: &BulkModel) -> Result<InvariantResult> {
    require_class(model, SymClass::AIII)?;
    if model.dim() != 1 || model.bands() != 2 {
        return Err(Error::MalformedModel("winding needs a one-dimensional two-band model".into()));
    }
    let pi = chirality_operator(2);
    let scale = model.scale();
    for k in [0.0, 1.3, 2.9, 4.4] {
        let h = model.h([k, 0.0]);
        let dev = (&(&pi * &h) + &(&h * &pi)).max_abs();
        if dev > 1e-12 * scale {
            return Err(Error::ClassMismatch { expected: "chiral", found: "not chiral" });
        }
    }
    let (t0, al, be) = chiral_block(model);
    let t = |k: f64| t0 + al * C64::from_polar(1.0, -k) + be * C64::from_polar(1.0, k);
    let grid = 2048;
    let mut total = 0.0;
    let mut prev = t(0.0);
    for j in 1..=grid {
        let k = j as f64 * TAU / grid as f64;
        let z = t(k);
        if z.norm() < 1e-8 {
            return Err(Error::GapClosed { k });
        }
        total += (z / prev).arg();
        prev = z;
    }
    let arg_sum = (total / TAU).round() as i32;
    let residual = (total / TAU - arg_sum as f64).abs();
    // T = h₁ + i h₂ with h = b⁰ + b e^{-ik} + conj(b) e^{ik}
    let b0 = [t0.re, t0.im];
    let b = [(al + be.conj()) * 0.5, (al - be.conj()) * C64::new(0.0, -0.5)];
    let ellipse = match build_frame(&b0, &b) {
        Err(Error::ZeroHopping) => 0,
        Err(e) => return Err(e),
        Ok(frame) if frame.segment || !frame.encloses_origin()? => 0,
        Ok(_) => EllipseFrame::planar_orientation(&b),
    };
    if ellipse != arg_sum {
        return Err(Error::MethodDisagreement { first: arg_sum, second: ellipse });
    }
    Ok(InvariantResult { value: arg_sum, method: Method::Winding, grid, residual, points: Vec::new() })
}

fn occupied(h: &ComplexMatrix, filling: usize) -> Result<(Vec<Vec<C64>>, f64)> {
    let e = eig_hermitian(h)?;
    let gap = e.values[filling] - e.values[filling - 1];
    Ok(((0..filling).map(|j| e.vector(j)).collect(), gap))
}

fn link(a: &[Vec<C64>], b: &[Vec<C64>]) -> Result<C64> {
    let f = a.len();
    let m = ComplexMatrix::from_fn(f, f, |i, j| a[i].iter().zip(&b[j]).map(|(x, y)| x.conj() * y).sum());
    m.det()
}

/// Finest mesh [`chern_fh`] refines to before giving up.
pub const MAX_FLUX_GRID: usize = 1536;

/// Lattice Berry flux of the occupied projector on a `grid × grid` mesh,
/// doubled until two successive meshes agree. The reported grid is the
/// coarser of the agreeing pair.
pub fn chern_fh(model: &BulkModel, grid: usize) -> Result<InvariantResult> {
    if model.dim() != 2 {
        return Err(Error::MalformedModel("Chern number needs d = 2".into()));
    }
    if grid < 24 {
        return Err(Error::MalformedModel(format!("flux grid {grid} is below 24")));
    }
    let mut g = grid;
    let (mut value, mut residual) = flux_sum(model, g)?;
    while 2 * g <= MAX_FLUX_GRID {
        let (fine, fine_res) = flux_sum(model, 2 * g)?;
        if fine == value {
            return Ok(InvariantResult { value, method: Method::LatticeFlux, grid: g, residual, points: Vec::new() });
        }
        g *= 2;
        value = fine;
        residual = fine_res;
    }
    Err(Error::DidNotConverge { what: "lattice flux under grid doubling" })
}

fn flux_sum(model: &BulkModel, grid: usize) -> Result<(i32, f64)> {
    let f = model.filling();
    let dk = TAU / grid as f64;
    let mut states = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let k = [i as f64 * dk, j as f64 * dk];
            let (s, gap) = occupied(&model.h(k), f)?;
            if gap < crate::models::GAP_THRESHOLD {
                return Err(Error::Gapless { gap, k });
            }
            states.push(s);
        }
    }
    let at = |i: usize, j: usize| &states[(i % grid) * grid + (j % grid)];
    let mut total = 0.0;
    for i in 0..grid {
        for j in 0..grid {
            let u1 = link(at(i, j), at(i + 1, j))?;
            let u2 = link(at(i + 1, j), at(i + 1, j + 1))?;
            let u3 = link(at(i + 1, j + 1), at(i, j + 1))?;
            let u4 = link(at(i, j + 1), at(i, j))?;
            total += (u1 * u2 * u3 * u4).arg();
        }
    }
    let c = total / TAU;
    let value = c.round() as i32;
    Ok((value, (c - value as f64).abs()))
}

fn require_two_band(dirac: &DiracModel) -> Result<()> {
    if dirac.bands() != 2 || dirac.m() != 3 {
        return Err(Error::MalformedModel("method needs a two-band Dirac model".into()));
    }
    dirac.require_traceless()
}

/// A zero of `(h₁, h₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preimage {
    pub k: [f64; 2],
    /// `∂₁h₁∂₂h₂ - ∂₁h₂∂₂h₁`.
    pub jacobian: f64,
    pub h3: f64,
    pub residual: f64,
}

fn wrap(x: f64) -> f64 {
    x - TAU * (x / TAU).floor()
}

fn periodic_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = |x: f64, y: f64| {
        let t = wrap(x - y);
        t.min(TAU - t)
    };
    d(a[0], b[0]).hypot(d(a[1], b[1]))
}

struct ZeroFinder<'a> {
    dirac: &'a DiracModel,
    tol: f64,
    found: Vec<Preimage>,
}

impl ZeroFinder<'_> {
    fn z(&self, k: [f64; 2]) -> C64 {
        let h = self.dirac.h(k);
        C64::new(h[0], h[1])
    }

    /// Winding of `h₁ + i h₂` around the cell, or `None` when an edge step
    /// turns by more than one radian (resolution too coarse). A vanishing
    /// sample with a singular Jacobian is a degenerate zero.
    fn winding(&self, x0: f64, y0: f64, s: f64) -> Result<Option<i32>> {
        let per = 6;
        let mut pts = Vec::with_capacity(4 * per + 1);
        let corners = [[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]];
        for c in 0..4 {
            let (a, b) = (corners[c], corners[(c + 1) % 4]);
            for t in 0..per {
                let u = t as f64 / per as f64;
                pts.push(self.z([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]));
            }
        }
        pts.push(pts[0]);
        for (t, z) in pts.iter().enumerate() {
            if z.norm() <= self.tol {
                let c = corners[(t / per) % 4];
                let (d1, d2) = self.dirac.dh(c);
                let jac = d1[0] * d2[1] - d1[1] * d2[0];
                let scale = self.dirac.scale();
                if jac.abs() < 1e-8 * scale * scale {
                    return Err(Error::DegenerateZero { k: c, jacobian: jac });
                }
                return Ok(None);
            }
        }
        let mut total = 0.0;
        for w in pts.windows(2) {
            let d = (w[1] / w[0]).arg();
            if d.abs() > 1.0 {
                return Ok(None);
            }
            total += d;
        }
        Ok(Some((total / TAU).round() as i32))
    }

    fn newton(&self, start: [f64; 2], x0: f64, y0: f64, s: f64) -> Option<Preimage> {
        let mut k = start;
        let margin = 0.1 * s;
        for _ in 0..60 {
            let h = self.dirac.h(k);
            let (d1, d2) = self.dirac.dh(k);
            let res = h[0].hypot(h[1]);
            let jac = d1[0] * d2[1] - d1[1] * d2[0];
            if res <= self.tol {
                return Some(Preimage { k: [wrap(k[0]), wrap(k[1])], jacobian: jac, h3: h[2], residual: res });
            }
            if jac == 0.0 {
                return None;
            }
            k[0] -= (d2[1] * h[0] - d2[0] * h[1]) / jac;
            k[1] -= (-d1[1] * h[0] + d1[0] * h[1]) / jac;
            if k[0] < x0 - margin || k[0] > x0 + s + margin || k[1] < y0 - margin || k[1] > y0 + s + margin {
                return None;
            }
        }
        None
    }

    fn scan(&mut self, x0: f64, y0: f64, s: f64, depth: usize) -> Result<()> {
        let w = self.winding(x0, y0, s)?;
        if w == Some(0) {
            return Ok(());
        }
        if depth < 10 && w.is_none_or(|w| w.abs() > 1) {
            return self.split(x0, y0, s, depth);
        }
        let c = [x0 + 0.5 * s, y0 + 0.5 * s];
        let p = match self.newton(c, x0, y0, s) {
            Some(p) => p,
            None if depth < 10 => return self.split(x0, y0, s, depth),
            // a nearby zero outside the cell (or a strongly anisotropic one)
            // spoils the winding at the finest level; accept whatever Newton
            // reaches within one top-level cell, duplicates are merged
            None => {
                let r = s * (1u32 << depth) as f64;
                self.newton(c, x0 - r, y0 - r, s + 2.0 * r)
                    .ok_or(Error::DidNotConverge { what: "Newton refinement of a preimage" })?
            }
        };
        if !self.found.iter().any(|q| periodic_distance(q.k, p.k) < 1e-7) {
            self.found.push(p);
        }
        Ok(())
    }

    fn split(&mut self, x0: f64, y0: f64, s: f64, depth: usize) -> Result<()> {
        let h = 0.5 * s;
        for (dx, dy) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
            self.scan(x0 + dx, y0 + dy, h, depth + 1)?;
        }
        Ok(())
    }
}

/// All zeros of `(h₁, h₂)` on the torus: cell windings on an offset
/// `grid × grid` mesh, adaptive refinement, Newton to `tol`.
pub fn h_parallel_zeros(dirac: &DiracModel, grid: usize, tol: f64) -> Result<Vec<Preimage>> {
    require_two_band(dirac)?;
    let grid = grid.max(8);
    let s = TAU / grid as f64;
    let (o1, o2) = (0.371_043 * s, 0.213_77 * s);
    let mut finder = ZeroFinder { dirac, tol: tol.max(TOL_FLOOR), found: Vec::new() };
    for i in 0..grid {
        for j in 0..grid {
            finder.scan(o1 + i as f64 * s, o2 + j as f64 * s, s, 0)?;
        }
    }
    let mut out = finder.found;
    out.sort_by(|a, b| a.k[0].total_cmp(&b.k[0]).then(a.k[1].total_cmp(&b.k[1])));
    Ok(out)
}

/// Zeros of `(h₁, h₂)` with `h₃ > 0`, checked to be regular.
pub fn north_preimages(dirac: &DiracModel, grid: usize, tol: f64) -> Result<Vec<Preimage>> {
    let scale = dirac.scale();
    let mut out = Vec::new();
    for p in h_parallel_zeros(dirac, grid, tol)? {
        if p.h3 > 0.0 {
            if p.jacobian.abs() < 1e-8 * scale * scale {
                return Err(Error::DegenerateZero { k: p.k, jacobian: p.jacobian });
            }
            out.push(p);
        }
    }
    Ok(out)
}

/// Signed count of north-pole preimages of `ĥ`, times
/// [`PREIMAGE_ORIENTATION`].
pub fn chern_north_preimage(dirac: &DiracModel, grid: usize, refine_tol: f64) -> Result<InvariantResult> {
    let pts = north_preimages(dirac, grid, refine_tol * dirac.scale())?;
    let points: Vec<SpecialPoint> =
        pts.iter().map(|p| SpecialPoint { k: p.k, sign: sign(p.jacobian), detail: p.jacobian }).collect();
    let raw: i32 = points.iter().map(|p| p.sign).sum();
    let residual = pts.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(InvariantResult { value: PREIMAGE_ORIENTATION * raw, method: Method::NorthPreimage, grid, residual, points })
}

/// `b⁰ · n̂` with `n̂ = (bʳ × bⁱ)/‖bʳ × bⁱ‖`: the signed edge energy
/// `τ‖b⁰⊥‖` of a two-band Dirac model.
pub fn perpendicular_offset(dirac: &DiracModel, k2: f64) -> Result<f64> {
    let (b0, b) = dirac.coeffs_at(k2);
    let (r, i): (Vec<f64>, Vec<f64>) = b.iter().map(|z| (z.re, z.im)).unzip();
    let n = [r[1] * i[2] - r[2] * i[1], r[2] * i[0] - r[0] * i[2], r[0] * i[1] - r[1] * i[0]];
    let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if nn < 1e-12 * bn {
        return Err(Error::DegenerateEllipse { k2 });
    }
    Ok((b0[0] * n[0] + b0[1] * n[1] + b0[2] * n[2]) / nn)
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if b - a < 1e-13 {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Signed count of `k₂` where `b⁰⊥` passes through zero while the ellipse
/// encloses the origin (`+1` for `τ: -1 → +1`), times
/// [`GREAT_CIRCLE_ORIENTATION`].
pub fn chern_great_circle(dirac: &DiracModel, grid: usize) -> Result<InvariantResult> {
    require_two_band(dirac)?;
    let grid = grid.max(16);
    let dk = TAU / grid as f64;
    let scale = dirac.scale();
    let f = |k2: f64| perpendicular_offset(dirac, k2);
    let encl = |k2: f64| -> Result<f64> {
        let (b0, b) = dirac.coeffs_at(k2);
        build_frame(&b0, &b)?.enclosure_measure()
    };
    let vals: Vec<f64> = (0..=grid).map(|j| f(j as f64 * dk)).collect::<Result<_>>()?;
    let mut points = Vec::new();
    for j in 0..grid {
        let (a, b) = (vals[j], vals[j + 1]);
        let (ka, kb) = (j as f64 * dk, (j + 1) as f64 * dk);
        if (a > 0.0) != (b > 0.0) {
            if a == 0.0 && j > 0 {
                continue; // counted in the previous cell
            }
            let root = bisect(&f, ka, kb, a)?;
            if encl(root)? < 1.0 {
                let s = if b > a { 1 } else { -1 };
                points.push(SpecialPoint { k: [f64::NAN, root], sign: s, detail: (b - a) / dk });
            }
        }
    }
    // |b⁰·n̂| dipping to zero at a grid point without changing sign
    for j in 0..grid {
        let (m, a, c) = (vals[(j + grid - 1) % grid], vals[j], vals[j + 1]);
        let same = (m > 0.0) == (a > 0.0) && (a > 0.0) == (c > 0.0);
        if !same || a.abs() > m.abs() || a.abs() > c.abs() || a.abs() > 1e-3 * scale {
            continue;
        }
        let g = |k: f64| f(k).map(|x| x.abs());
        let (mut lo, mut hi) = ((j as f64 - 1.0) * dk, (j as f64 + 1.0) * dk);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - phi * (hi - lo);
            let x2 = lo + phi * (hi - lo);
            if g(x1)? < g(x2)? {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        let km = 0.5 * (lo + hi);
        if f(km)?.abs() < 1e-9 * scale && encl(km)? < 1.0 {
            return Err(Error::TangentCrossing { k2: km });
        }
    }
    let raw: i32 = points.iter().map(|p| p.sign).sum();
    Ok(InvariantResult { value: GREAT_CIRCLE_ORIENTATION * raw, method: Method::GreatCircle, grid, residual: 0.0, points })
}

/// Largest violation of `h_j(-k) = ±h_j(k)` with the sign set by TREI
/// membership, relative to the scale.
pub fn tri_deviation(dirac: &DiracModel) -> Result<f64> {
    let par: Vec<Parity> = dirac.gammas().iter().map(|&g| classify_trei(g)).collect::<Result<_>>()?;
    let mut dev: f64 = 0.0;
    for i in 0..7 {
        for j in 0..7 {
            let k = [0.31 + i as f64 * 0.93, 0.17 + j as f64 * 0.89];
            let (hp, hm) = (dirac.h(k), dirac.h([-k[0], -k[1]]));
            for (t, p) in par.iter().enumerate() {
                let d = match p {
                    Parity::Even => hp[t] - hm[t],
                    _ => hp[t] + hm[t],
                };
                dev = dev.max(d.abs());
            }
        }
    }
    Ok(dev / dirac.scale())
}

/// ℤ₂ index: 0 if more than one TREI gamma is active, otherwise the parity
/// of the number of TRIM where the single even coefficient `d_e` is
/// negative.
pub fn km_dirac(dirac: &DiracModel) -> Result<InvariantResult> {
    if dirac.bands() != 4 {
        return Err(Error::MalformedModel("Kane-Mele index needs a four-band model".into()));
    }
    dirac.require_traceless()?;
    let dev = tri_deviation(dirac)?;
    if dev > 1e-10 {
        return Err(Error::NotTri { deviation: dev });
    }
    let mut points = Vec::new();
    let value = match (dirac.trei_count(), dirac.even_index()) {
        (0, _) => return Err(Error::GapClosedAtTrim { k: [0.0, 0.0] }),
        (_, None) => 0,
        (_, Some(e)) => {
            let mut neg = 0;
            for k in trim_set(2) {
                let d = dirac.h(k)[e];
                if d.abs() < 1e-10 * dirac.scale() {
                    return Err(Error::GapClosedAtTrim { k });
                }
                if d < 0.0 {
                    neg += 1;
                }
                points.push(SpecialPoint { k, sign: sign(d), detail: d });
            }
            neg % 2
        }
    };
    Ok(InvariantResult { value, method: Method::DiracSign, grid: 4, residual: dev, points })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WMatrix {
    pub w: ComplexMatrix,
    /// Basis dependent; only `|Pf|` is meaningful at a single point.
    pub pfaffian: C64,
    /// `‖w + wᵀ‖_max`.
    pub antisymmetry: f64,
    /// Splitting of the occupied Kramers pair.
    pub splitting: f64,
}

/// Deterministic orthonormal basis of the span of `vs`: project the unit
/// axes, keep the longest remainder each round, fix the phase so the
/// largest component is real positive.
fn canonical_basis(vs: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = vs[0].len();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let project = |x: &mut Vec<C64>, on: &[Vec<C64>]| {
        let mut out = vec![C64::zero(); x.len()];
        for v in on {
            let c: C64 = v.iter().zip(x.iter()).map(|(a, b)| a.conj() * b).sum();
            for (o, a) in out.iter_mut().zip(v) {
                *o += a * c;
            }
        }
        *x = out;
    };
    let mut used = vec![false; n];
    while basis.len() < vs.len() {
        let mut best: Option<(f64, usize, Vec<C64>)> = None;
        for i in (0..n).filter(|&i| !used[i]) {
            let mut x = vec![C64::zero(); n];
            x[i] = C64::new(1.0, 0.0);
            project(&mut x, vs);
            for b in &basis {
                let c: C64 = b.iter().zip(&x).map(|(a, y)| a.conj() * y).sum();
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= bi * c;
                }
            }
            let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if best.as_ref().is_none_or(|(m, _, _)| nrm > m + 1e-12) {
                best = Some((nrm, i, x));
            }
        }
        let (nrm, i, mut x) = best.expect("enough axes");
        used[i] = true;
        let big = (0..n).fold(0, |m, t| if x[t].norm() > x[m].norm() + 1e-12 { t } else { m });
        let phase = x[big].conj() / (x[big].norm() * nrm);
        for z in x.iter_mut() {
            *z *= phase;
        }
        basis.push(x);
    }
    basis
}

/// `w_ij = ⟨ψ_i | Θ ψ_j⟩` with `Θ = Γ₀₂ ∘ conjugation` on the occupied
/// Kramers pair at a TRIM.
pub fn w_matrix_at_trim(model: &BulkModel, k: [f64; 2]) -> Result<WMatrix> {
    if model.bands() != 4 || model.filling() != 2 {
        return Err(Error::MalformedModel("w matrix needs four bands at filling 2".into()));
    }
    let on_trim = |x: f64| x.abs() < 1e-12 || (x - PI).abs() < 1e-12;
    if !on_trim(k[0]) || !on_trim(k[1]) {
        return Err(Error::MalformedModel("w matrix is defined only at TRIM".into()));
    }
    let e = eig_hermitian(&model.h(k))?;
    let scale = model.scale();
    let splitting = e.values[1] - e.values[0];
    if splitting > 1e-8 * scale || e.values[2] - e.values[1] < crate::models::GAP_THRESHOLD {
        return Err(Error::DegeneracyMismatch { splitting });
    }
    let psi = canonical_basis(&[e.vector(0), e.vector(1)]);
    let g = gamma(GammaIndex::Kron(0, 2))?;
    let theta: Vec<Vec<C64>> = psi.iter().map(|v| g.matvec(&v.iter().map(|z| z.conj()).collect::<Vec<_>>())).collect();
    let w = ComplexMatrix::from_fn(2, 2, |i, j| psi[i].iter().zip(&theta[j]).map(|(a, b)| a.conj() * b).sum());
    let antisymmetry = (&w + &w.transpose()).max_abs();
    if antisymmetry > 1e-10 {
        return Err(Error::NotAntisymmetric { deviation: antisymmetry });
    }
    let pf = pfaffian(&w)?;
    if (pf.norm() - 1.0).abs() > 1e-8 {
        return Err(Error::NotTri { deviation: (pf.norm() - 1.0).abs() });
    }
    Ok(WMatrix { w, pfaffian: pf, antisymmetry, splitting })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{dirac_decompose, TrigPoly};
    use crate::models::{bhz, harper, qwz, ssh, FourierMatrix};

    fn constant_h3() -> BulkModel {
        let v = FourierMatrix::constant(crate::models::pauli(3));
        BulkModel::new(2, v, FourierMatrix::zero(2), SymClass::A, 1).unwrap()
    }

    #[test]
    fn calibration_on_qwz() {
        // the raw preimage and great-circle counts for QWZ m = 1 are -1; the
        // lattice flux of the occupied band is +1
        let m = qwz(1.0);
        let d = dirac_decompose(&m).unwrap();
        let fh = chern_fh(&m, 24).unwrap().value;
        assert_eq!(fh, 1);
        let raw: i32 = north_preimages(&d, 48, 1e-12).unwrap().iter().map(|p| sign(p.jacobian)).sum();
        assert_eq!(PREIMAGE_ORIENTATION * raw, fh);
        let gc = chern_great_circle(&d, 720).unwrap();
        assert_eq!(gc.value, fh);
        assert_eq!(gc.points.len(), 1);
        assert!((gc.points[0].k[1] - PI).abs() < 1e-9);
    }

    #[test]
    fn qwz_preimages() {
        // h₁ = sin k₁ and h₂ = sin k₂ vanish at the four TRIM; h₃ = m + cos k₁ + cos k₂
        let d = dirac_decompose(&qwz(1.0)).unwrap();
        let all = h_parallel_zeros(&d, 32, 1e-12).unwrap();
        assert_eq!(all.len(), 4);
        let north = north_preimages(&d, 32, 1e-12).unwrap();
        assert_eq!(north.len(), 3);
        let signs: Vec<i32> = north.iter().map(|p| sign(p.jacobian)).collect();
        assert_eq!(signs.iter().sum::<i32>(), -1);
        assert_eq!(signs.iter().filter(|&&s| s == 1).count(), 1);
    }

    #[test]
    fn chern_table() {
        for (m, c) in [(-3.0, 0), (-1.0, -1), (1.0, 1), (3.0, 0)] {
            let model = qwz(m);
            let d = dirac_decompose(&model).unwrap();
            assert_eq!(chern_fh(&model, 24).unwrap().value, c, "m = {m}");
            assert_eq!(chern_fh(&model, 48).unwrap().value, c);
            assert_eq!(chern_north_preimage(&d, 48, 1e-12).unwrap().value, c);
            assert_eq!(chern_great_circle(&d, 721).unwrap().value, c);
        }
        let flat = constant_h3();
        assert_eq!(chern_fh(&flat, 24).unwrap().value, 0);
        let d = dirac_decompose(&flat).unwrap();
        assert!(matches!(north_preimages(&d, 24, 1e-12), Err(Error::DegenerateZero { .. })));
        assert_eq!(chern_great_circle(&d, 100).map(|r| r.value).unwrap_or(0), 0);
    }

    #[test]
    fn harper_flux() {
        assert_eq!(chern_fh(&harper(1.0, 0.0), 32).unwrap().value, -1);
        let d = dirac_decompose(&harper(1.0, 0.0)).unwrap();
        assert_eq!(chern_north_preimage(&d, 48, 1e-12).unwrap().value, -1);
    }

    #[test]
    fn ssh_winding() {
        assert_eq!(winding_chiral(&ssh(0.0, 1.0)).unwrap().value, -1);
        assert_eq!(winding_chiral(&ssh(0.5, 1.0)).unwrap().value, -1);
        assert_eq!(winding_chiral(&ssh(1.5, 1.0)).unwrap().value, 0);
        assert_eq!(winding_chiral(&ssh(1.0, 0.0)).unwrap().value, 0);
        assert!(matches!(winding_chiral(&ssh(1.0, 1.0)), Err(Error::GapClosed { .. })));
    }

    #[test]
    fn winding_reparametrization() {
        // T(k) = t₀ + α e^{-ik} + β e^{ik}; swapping α and β is k → -k
        let build = |t0: C64, al: C64, be: C64| {
            let s = crate::models::sigma_minus();
            let v = &s.adjoint().scale(t0.conj()) + &s.scale(t0);
            let a = &s.scale(al) + &s.adjoint().scale(be.conj());
            BulkModel::new(
                1,
                FourierMatrix::constant(v),
                FourierMatrix::constant(a),
                SymClass::AIII,
                1,
            )
            .unwrap()
        };
        let (t0, al, be) = (C64::new(0.2, 0.1), C64::new(0.3, -0.9), C64::new(0.15, 0.2));
        let w = winding_chiral(&build(t0, al, be)).unwrap().value;
        assert_ne!(w, 0);
        assert_eq!(winding_chiral(&build(t0, be, al)).unwrap().value, -w);
        assert_eq!(winding_chiral(&build(t0 * 3.0, al * 3.0, be * 3.0)).unwrap().value, w);
    }

    #[test]
    fn kane_mele_bhz() {
        for (m, km) in [(-3.0, 0), (-1.0, 1), (1.0, 1), (3.0, 0), (0.5, 1), (-1.5, 1)] {
            let d = dirac_decompose(&bhz(m)).unwrap();
            assert_eq!(km_dirac(&d).unwrap().value, km, "m = {m}");
        }
        let d = dirac_decompose(&bhz(2.0)).unwrap();
        assert!(matches!(km_dirac(&d), Err(Error::GapClosedAtTrim { .. })));
    }

    #[test]
    fn km_two_even_gammas_is_trivial() {
        let g = vec![GammaIndex::Kron(3, 0), GammaIndex::Kron(1, 0), GammaIndex::Kron(2, 0)];
        let mut b0 = vec![TrigPoly::constant(C64::new(0.7, 0.0)), TrigPoly::constant(C64::new(0.4, 0.0)), TrigPoly::default()];
        b0[2] = TrigPoly::default();
        let b = vec![
            TrigPoly::constant(C64::new(0.5, 0.0)),
            TrigPoly::default(),
            TrigPoly::constant(C64::new(0.0, 0.5)),
        ];
        let d = DiracModel::new(g, b0, b).unwrap();
        assert_eq!(km_dirac(&d).unwrap().value, 0);
    }

    #[test]
    fn w_matrix_bhz() {
        let model = bhz(1.0);
        for k in trim_set(2) {
            let w = w_matrix_at_trim(&model, k).unwrap();
            assert!(w.antisymmetry <= 1e-10);
            assert!((w.pfaffian.norm() - 1.0).abs() <= 1e-8);
        }
        assert!(w_matrix_at_trim(&model, [0.3, 0.0]).is_err());
    }

    #[test]
    fn w_matrix_single_gamma() {
        // H = -Γ₃₀ at every k: occupied space is the +1 eigenspace of Γ₃₀
        let v = FourierMatrix::constant(gamma(GammaIndex::Kron(3, 0)).unwrap().scale_re(-1.0));
        let model = BulkModel::new(2, v, FourierMatrix::zero(4), SymClass::AII, 2).unwrap();
        let w = w_matrix_at_trim(&model, [PI, 0.0]).unwrap();
        assert!(w.antisymmetry <= 1e-12);
        assert!((w.pfaffian.norm() - 1.0).abs() <= 1e-12);
    }
}
