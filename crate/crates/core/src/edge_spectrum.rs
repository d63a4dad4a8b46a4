//! Edge spectra two ways: Dirichlet strips (the edge Hamiltonian truncated to
//! `n` sites) and the complex-momentum method for Dirac models, where edge
//! states `u λ^x` solve a quartic in `λ`.

#[allow(unused_imports)]
use num_traits::Float;
use crate::clifford::DiracModel;
use crate::ellipse::{build_frame, EllipseFrame};
use crate::exec::ParMap;
use crate::models::BulkModel;
use crate::numerics::{poly_roots, smallest_singular_value, BlockTridiag, ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_traits::Zero;

/// Localization weight required for an edge state.
pub const EDGE_WEIGHT: f64 = 0.9;
/// `|λ|` within this of 1 counts as on the unit circle.
pub const ON_CIRCLE: f64 = 1e-8;
/// Strip eigenvalues this close to a band edge (relative to the model scale)
/// are not reported as in-gap.
pub const BAND_EDGE_MARGIN: f64 = 1e-9;
/// Minimum and maximum strip lengths chosen automatically.
pub const MIN_STRIP: usize = 60;
pub const MAX_STRIP: usize = 4000;

pub fn build_strip(model: &BulkModel, n: usize, k2: f64) -> BlockTridiag {
    BlockTridiag::new(n.max(1), model.v_at(k2), model.a_at(k2)).expect("V(k2) is Hermitian for a valid model")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StripState {
    pub energy: f64,
    /// Weight in the first and last `⌈n/4⌉` sites.
    pub left: f64,
    pub right: f64,
    pub vector: Vec<C64>,
}

impl StripState {
    pub fn side(&self) -> Option<Side> {
        if self.left >= EDGE_WEIGHT {
            Some(Side::Left)
        } else if self.right >= EDGE_WEIGHT {
            Some(Side::Right)
        } else {
            None
        }
    }
}

fn end_weights(v: &[C64], sites: usize, nb: usize) -> (f64, f64) {
    let q = sites.div_ceil(4);
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let left: f64 = v[..q * nb].iter().map(|z| z.norm_sqr()).sum();
    let right: f64 = v[(sites - q) * nb..].iter().map(|z| z.norm_sqr()).sum();
    (left / total, right / total)
}

fn small_projection(xs: &[Vec<C64>], range: core::ops::Range<usize>) -> ComplexMatrix {
    let c = xs.len();
    let mut m = ComplexMatrix::zeros(c, c);
    for i in 0..c {
        for j in i..c {
            let s: C64 = range.clone().map(|t| xs[i][t].conj() * xs[j][t]).sum();
            m[(i, j)] = s;
            m[(j, i)] = s.conj();
        }
    }
    m
}

fn combine(xs: &[Vec<C64>], coeffs: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::zero(); xs[0].len()];
    for (x, &c) in xs.iter().zip(coeffs) {
        for (o, &z) in out.iter_mut().zip(x) {
            *o += z * c;
        }
    }
    out
}

/// Rayleigh-Ritz of the strip Hamiltonian on an orthonormal set.
fn ritz(strip: &BlockTridiag, xs: Vec<Vec<C64>>) -> Result<Vec<(f64, Vec<C64>)>> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let hx: Vec<Vec<C64>> = xs.iter().map(|x| strip.matvec(x)).collect();
    let c = xs.len();
    let mut m = ComplexMatrix::zeros(c, c);
    for i in 0..c {
        for j in i..c {
            let s: C64 = xs[i].iter().zip(&hx[j]).map(|(a, b)| a.conj() * b).sum();
            m[(i, j)] = s;
            m[(j, i)] = s.conj();
        }
        let d = m[(i, i)].re;
        m[(i, i)] = C64::new(d, 0.0);
    }
    let e = crate::numerics::eig_hermitian(&m)?;
    Ok((0..c).map(|k| (e.values[k], combine(&xs, &e.vector(k)))).collect())
}

/// Eigenpairs of the strip with energy in `[lo, hi)`. Near-degenerate groups
/// (states at opposite ends hybridize only at the truncation level) are
/// rotated so each state is as localized as possible on one end.
pub fn strip_states(strip: &BlockTridiag, lo: f64, hi: f64) -> Result<Vec<StripState>> {
    let n = strip.sites();
    let nb = strip.block_size();
    let q = n.div_ceil(4);
    let mut out = Vec::new();
    for cl in strip.window(lo, hi)? {
        let pairs: Vec<(f64, Vec<C64>)> = if cl.values.len() == 1 {
            vec![(cl.values[0], cl.vectors[0].clone())]
        } else {
            let xs = cl.vectors;
            let pl = crate::numerics::eig_hermitian(&small_projection(&xs, 0..q * nb))?;
            let mut left = Vec::new();
            let mut rest = Vec::new();
            for k in 0..xs.len() {
                let v = combine(&xs, &pl.vector(k));
                if pl.values[k] > 0.5 {
                    left.push(v);
                } else {
                    rest.push(v);
                }
            }
            let mut right = Vec::new();
            let mut middle = Vec::new();
            if !rest.is_empty() {
                let pr = crate::numerics::eig_hermitian(&small_projection(&rest, (n - q) * nb..n * nb))?;
                for k in 0..rest.len() {
                    let v = combine(&rest, &pr.vector(k));
                    if pr.values[k] > 0.5 {
                        right.push(v);
                    } else {
                        middle.push(v);
                    }
                }
            }
            let mut all = ritz(strip, left)?;
            all.extend(ritz(strip, right)?);
            all.extend(ritz(strip, middle)?);
            all
        };
        for (energy, vector) in pairs {
            let (left, right) = end_weights(&vector, n, nb);
            out.push(StripState { energy, left, right, vector });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// In-gap strip states at one `k₂`, without eigenvectors.
#[derive(Clone, Debug, PartialEq)]
pub struct StripSlice {
    pub k2: f64,
    /// Band edges `sup E_filling`, `inf E_{filling+1}` over `k₁`.
    pub lo: f64,
    pub hi: f64,
    pub states: Vec<(f64, f64, f64)>,
}

pub fn strip_slice(model: &BulkModel, n: usize, k2: f64) -> Result<StripSlice> {
    let (lo, hi) = model.band_edges_at(k2, 64)?;
    // eigenvalues on the band edges belong to the continuum (flat bands put
    // whole families of localized states there)
    let margin = BAND_EDGE_MARGIN * model.scale().max(TOL_FLOOR);
    let mut states = Vec::new();
    if hi - lo > 2.0 * margin {
        for s in strip_states(&build_strip(model, n, k2), lo + margin, hi - margin)? {
            states.push((s.energy, s.left, s.right));
        }
    }
    Ok(StripSlice { k2, lo, hi, states })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgePoint {
    pub k2: f64,
    pub energy: f64,
    pub weight: f64,
    /// Synthetic endpoint on the band edge where the branch meets the bulk.
    pub is_virtual: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeBranch {
    pub side: Side,
    /// Ordered by increasing `k₂` (which may run past `2π` after wrapping).
    pub points: Vec<EdgePoint>,
    /// Closed loop around the whole circle.
    pub periodic: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSpectrum {
    pub n: usize,
    pub grid: usize,
    pub slices: Vec<StripSlice>,
    pub branches: Vec<EdgeBranch>,
    pub xi: f64,
}

impl EdgeSpectrum {
    pub fn side(&self, side: Side) -> impl Iterator<Item = &EdgeBranch> {
        self.branches.iter().filter(move |b| b.side == side)
    }
}

struct Open {
    idx: Vec<usize>,
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl Open {
    fn predict(&self) -> f64 {
        let m = self.energies.len();
        if m >= 2 {
            2.0 * self.energies[m - 1] - self.energies[m - 2]
        } else {
            self.energies[m - 1]
        }
    }
}

/// Links the in-gap states of one side across a periodic `k₂` grid by
/// nearest-prediction matching; a jump above `bound` ends a branch.
pub fn track_branches(slices: &[StripSlice], side: Side, bound: f64, scale: f64) -> Result<Vec<EdgeBranch>> {
    let g = slices.len();
    if g == 0 {
        return Ok(Vec::new());
    }
    let pick = |s: &StripSlice| -> Vec<(f64, f64)> {
        s.states
            .iter()
            .filter_map(|&(e, l, r)| {
                let w = if side == Side::Left { l } else { r };
                (w >= EDGE_WEIGHT && (side == Side::Left || l < EDGE_WEIGHT)).then_some((e, w))
            })
            .collect()
    };
    // start where the states of this side are best separated, so no branch
    // is born at a degeneracy (Kramers points sit on grid nodes)
    let spacing = |s: &StripSlice| {
        let mut e: Vec<f64> = pick(s).iter().map(|p| p.0).collect();
        e.sort_by(f64::total_cmp);
        e.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    };
    let mut j0 = 0;
    let mut best = spacing(&slices[0]);
    for (j, s) in slices.iter().enumerate().skip(1) {
        let sp = spacing(s);
        if sp > best {
            j0 = j;
            best = sp;
        }
    }
    let rs: Vec<StripSlice> = (0..g)
        .map(|i| {
            let mut s = slices[(j0 + i) % g].clone();
            if j0 + i >= g {
                s.k2 += TAU;
            }
            s
        })
        .collect();
    let mut open: Vec<Open> = Vec::new();
    let mut done: Vec<Open> = Vec::new();
    for j in 0..g {
        let pts = pick(&rs[j]);
        let mut cand: Vec<(f64, usize, usize)> = Vec::new();
        for (bi, b) in open.iter().enumerate() {
            let pred = b.predict();
            let mut near: Vec<(f64, usize)> = pts
                .iter()
                .enumerate()
                .filter(|(_, p)| (p.0 - pred).abs() <= bound)
                .map(|(pi, p)| ((p.0 - pred).abs(), pi))
                .collect();
            near.sort_by(|a, b| a.0.total_cmp(&b.0));
            if near.len() >= 2 {
                let (d1, p1) = near[0];
                let (d2, p2) = near[1];
                if d2 - d1 < 1e-3 * bound && (pts[p1].0 - pts[p2].0).abs() > 1e-6 * scale {
                    return Err(Error::TrackingAmbiguity { k2: rs[j].k2, energy: pred });
                }
            }
            cand.extend(near.into_iter().map(|(d, pi)| (d, bi, pi)));
        }
        cand.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut used_b = vec![false; open.len()];
        let mut used_p = vec![false; pts.len()];
        for (_, bi, pi) in cand {
            if used_b[bi] || used_p[pi] {
                continue;
            }
            used_b[bi] = true;
            used_p[pi] = true;
            open[bi].idx.push(j);
            open[bi].energies.push(pts[pi].0);
            open[bi].weights.push(pts[pi].1);
        }
        let mut still = Vec::new();
        for (bi, b) in open.into_iter().enumerate() {
            if used_b[bi] {
                still.push(b);
            } else {
                done.push(b);
            }
        }
        for (pi, p) in pts.iter().enumerate() {
            if !used_p[pi] {
                still.push(Open { idx: vec![j], energies: vec![p.0], weights: vec![p.1] });
            }
        }
        open = still;
    }
    // join branches across k₂ = 2π
    let mut starts: Vec<Open> = Vec::new();
    let mut rest: Vec<Open> = Vec::new();
    for b in done.into_iter().chain(open) {
        if b.idx[0] == 0 {
            starts.push(b);
        } else {
            rest.push(b);
        }
    }
    let mut ends: Vec<usize> = (0..rest.len()).filter(|&i| *rest[i].idx.last().unwrap() == g - 1).collect();
    let mut closed: Vec<(Open, bool)> = Vec::new();
    // loops made of a single branch spanning the grid
    starts.retain(|b| {
        if *b.idx.last().unwrap() == g - 1 && b.idx.len() == g {
            let pred = b.predict();
            if (b.energies[0] - pred).abs() <= bound {
                closed.push((Open { idx: b.idx.clone(), energies: b.energies.clone(), weights: b.weights.clone() }, true));
                return false;
            }
        }
        true
    });
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    let mut candidates: Vec<usize> = ends.clone();
    // a branch that starts at 0 and also ends at g-1 can be followed by
    // another start branch
    candidates.extend((0..starts.len()).filter(|&s| *starts[s].idx.last().unwrap() == g - 1).map(|s| usize::MAX - s));
    for &e in &candidates {
        let tail = if e > usize::MAX / 2 { &starts[usize::MAX - e] } else { &rest[e] };
        let pred = tail.predict();
        for (si, s) in starts.iter().enumerate() {
            if e == usize::MAX - si {
                continue;
            }
            let d = (s.energies[0] - pred).abs();
            if d <= bound {
                pairs.push((d, e, si));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut used_e: Vec<usize> = Vec::new();
    let mut used_s: Vec<usize> = Vec::new();
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (_, e, s) in pairs {
        if used_e.contains(&e) || used_s.contains(&s) {
            continue;
        }
        used_e.push(e);
        used_s.push(s);
        links.push((e, s));
    }
    // follow chains: tail (rest or start) -> start
    let mut taken_s = vec![false; starts.len()];
    let mut result: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, bool)> = Vec::new();
    let to_pts = |b: &Open, shift: f64| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (
            b.idx.iter().map(|&i| rs[i].k2 + shift).collect(),
            b.energies.clone(),
            b.weights.clone(),
        )
    };
    ends.sort_unstable();
    for &e in &ends {
        let (mut ks, mut es, mut ws) = to_pts(&rest[e], 0.0);
        let mut cur = e;
        let mut shift = TAU;
        while let Some(&(_, s)) = links.iter().find(|(t, _)| *t == cur) {
            if taken_s[s] {
                break;
            }
            taken_s[s] = true;
            let (a, b, c) = to_pts(&starts[s], shift);
            ks.extend(a);
            es.extend(b);
            ws.extend(c);
            if *starts[s].idx.last().unwrap() != g - 1 {
                break;
            }
            shift += TAU;
            cur = usize::MAX - s;
        }
        result.push((ks, es, ws, false));
    }
    for (i, b) in rest.iter().enumerate() {
        if !ends.contains(&i) {
            let (a, bb, c) = to_pts(b, 0.0);
            result.push((a, bb, c, false));
        }
    }
    for (s, b) in starts.iter().enumerate() {
        if !taken_s[s] {
            let (a, bb, c) = to_pts(b, 0.0);
            result.push((a, bb, c, false));
        }
    }
    for (b, periodic) in closed {
        let (a, bb, c) = to_pts(&b, 0.0);
        result.push((a, bb, c, periodic));
    }
    let dk = TAU / g as f64;
    let grid_index = |k: f64| (((k - TAU * (k / TAU).floor()) / dk).round() as usize) % g;
    let mut branches = Vec::new();
    for (ks, es, ws, periodic) in result {
        let mut points: Vec<EdgePoint> = ks
            .iter()
            .zip(&es)
            .zip(&ws)
            .map(|((&k2, &energy), &weight)| EdgePoint { k2, energy, weight, is_virtual: false })
            .collect();
        if !periodic {
            let edge_point = |k2: f64, e: f64| {
                let s = &slices[grid_index(k2)];
                let energy = if (e - s.lo).abs() <= (s.hi - e).abs() { s.lo } else { s.hi };
                EdgePoint { k2, energy, weight: 0.0, is_virtual: true }
            };
            let first = points[0];
            let last = *points.last().unwrap();
            points.insert(0, edge_point(first.k2 - dk, first.energy));
            points.push(edge_point(last.k2 + dk, last.energy));
        }
        branches.push(EdgeBranch { side, points, periodic });
    }
    branches.sort_by(|a, b| a.points[0].k2.total_cmp(&b.points[0].k2));
    Ok(branches)
}

/// Strip spectrum on a periodic `grid`-point `k₂` mesh (a single slice for
/// `d = 1`) and the tracked left and right edge branches.
pub fn strip_edge_branches<P: ParMap>(model: &BulkModel, n: usize, grid: usize, exec: &P) -> Result<EdgeSpectrum> {
    let grid = if model.dim() == 1 { 1 } else { grid.max(8) };
    let dk = TAU / grid as f64;
    let slices: Vec<Result<StripSlice>> = exec.map_indexed(grid, |j| strip_slice(model, n, j as f64 * dk));
    let slices: Vec<StripSlice> = slices.into_iter().collect::<Result<_>>()?;
    let scale = model.scale();
    let bound = (5.0 * model.lipschitz_k2() * dk).max(1e-9 * scale);
    let mut branches = Vec::new();
    if model.dim() == 2 {
        branches.extend(track_branches(&slices, Side::Left, bound, scale)?);
        branches.extend(track_branches(&slices, Side::Right, bound, scale)?);
    }
    Ok(EdgeSpectrum { n, grid, slices, branches, xi: f64::NAN })
}

/// `(c₀..c₄)` with `λ² [Σⱼ ηⱼ(λ)² - E²] = Σₖ cₖ λᵏ`.
pub fn edge_quartic(b0: &[f64], b: &[C64], e: f64) -> [C64; 5] {
    let mut c = [C64::zero(); 5];
    for (&x, &y) in b0.iter().zip(b) {
        c[0] += y * y;
        c[1] += y * x * 2.0;
        c[2] += C64::new(x * x + 2.0 * y.norm_sqr(), 0.0);
        c[3] += y.conj() * x * 2.0;
        c[4] += y.conj() * y.conj();
    }
    c[2] -= e * e;
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRoots {
    /// Finite roots, exact zeros included.
    pub roots: Vec<C64>,
    pub at_infinity: usize,
    pub inside: Vec<C64>,
    pub on_circle: usize,
    /// Distance of the multiset from its image under `λ ↦ 1/conj(λ)`.
    pub pairing_residual: f64,
}

/// Greedy matching of every root with the image of another; zeros must
/// match roots at infinity one for one.
pub fn pairing_residual(roots: &[C64], at_infinity: usize) -> f64 {
    let zeros = roots.iter().filter(|z| z.is_zero()).count();
    if zeros != at_infinity {
        return f64::INFINITY;
    }
    let nz: Vec<C64> = roots.iter().copied().filter(|z| !z.is_zero()).collect();
    let mut used = vec![false; nz.len()];
    let mut worst: f64 = 0.0;
    for r in &nz {
        let t = r.conj().inv();
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, s) in nz.iter().enumerate() {
            if !used[i] {
                let d = (s - t).norm() / t.norm().max(1.0);
                if d < best.0 {
                    best = (d, i);
                }
            }
        }
        if best.1 == usize::MAX {
            return f64::INFINITY;
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

pub fn edge_lambda_roots(b0: &[f64], b: &[C64], e: f64) -> Result<LambdaRoots> {
    let bn = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let b0n = b0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if bn < 1e-12 * (b0n + 2.0 * bn).max(TOL_FLOOR) {
        return Err(Error::ZeroHopping);
    }
    let mut c = edge_quartic(b0, b, e);
    // |c₀| = |c₄| and |c₁| = |c₃|: deflate both ends together so that roots
    // at infinity pair with exact zeros
    let cmax = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    for k in [4usize, 3] {
        if c[k].norm() < 1e-12 * cmax && c[4 - k].norm() < 1e-12 * cmax.max(TOL_FLOOR) * 1e3 {
            c[k] = C64::zero();
            c[4 - k] = C64::zero();
        } else {
            break;
        }
    }
    let pr = poly_roots(&c)?;
    let roots = pr.finite;
    let inside: Vec<C64> = roots.iter().copied().filter(|z| z.norm() < 1.0 - ON_CIRCLE).collect();
    let on_circle = roots.iter().filter(|z| (z.norm() - 1.0).abs() <= ON_CIRCLE).count();
    let pairing_residual = pairing_residual(&roots, pr.at_infinity);
    Ok(LambdaRoots { roots, at_infinity: pr.at_infinity, inside, on_circle, pairing_residual })
}

/// `λ M(λ) = Σⱼ (bⱼ + b⁰ⱼ λ + conj(bⱼ) λ²) Γⱼ - E λ`.
fn lambda_matrix(dirac: &DiracModel, b0: &[f64], b: &[C64], e: f64, lambda: C64) -> ComplexMatrix {
    let n = dirac.bands();
    let mut m = ComplexMatrix::identity(n).scale(-lambda * e);
    for j in 0..dirac.m() {
        let p = b[j] + lambda * (b0[j] + b[j].conj() * lambda);
        m.axpy(p, dirac.gamma_matrix(j));
    }
    m
}

/// Normalized smallest singular value of `[λ₁M(λ₁); λ₂M(λ₂)]`: zero iff the
/// two decaying solutions share a null vector, so that a combination meets
/// the Dirichlet condition.
pub fn shared_null_residual(dirac: &DiracModel, k2: f64, e: f64, l1: C64, l2: C64) -> Result<f64> {
    let (b0, b) = dirac.coeffs_at(k2);
    let n = dirac.bands();
    let m1 = lambda_matrix(dirac, &b0, &b, e, l1);
    let m2 = lambda_matrix(dirac, &b0, &b, e, l2);
    let (s1, s2) = (m1.norm_fro().max(TOL_FLOOR), m2.norm_fro().max(TOL_FLOOR));
    let stacked = ComplexMatrix::from_fn(2 * n, n, |i, j| if i < n { m1[(i, j)] / s1 } else { m2[(i - n, j)] / s2 });
    smallest_singular_value(&stacked)
}

/// Whether a decaying solution at energy `e` satisfies the boundary
/// condition: exactly two roots inside the unit circle and a shared null
/// vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCheck {
    pub roots: LambdaRoots,
    pub null_residual: Option<f64>,
    pub exists: bool,
}

pub fn check_edge_energy(dirac: &DiracModel, k2: f64, e: f64) -> Result<EdgeCheck> {
    let (b0, b) = dirac.coeffs_at(k2);
    let roots = edge_lambda_roots(&b0, &b, e)?;
    let mut null_residual = None;
    if roots.inside.len() == 2 && roots.on_circle == 0 {
        null_residual = Some(shared_null_residual(dirac, k2, e, roots.inside[0], roots.inside[1])?);
    }
    let exists = null_residual.is_some_and(|r| r < 1e-8);
    Ok(EdgeCheck { roots, null_residual, exists })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeStates {
    pub exists: bool,
    /// `τ‖b⁰⊥‖` for two bands, `±‖b⁰⊥‖` for four.
    pub energies: Vec<f64>,
    pub tau: i32,
    pub b0_perp_norm: f64,
    pub segment: bool,
    pub frame: EllipseFrame,
}

/// Analytic left-edge states of a Dirac model at `k₂`: they exist iff the
/// ellipse encloses the origin of its plane.
pub fn dirac_edge_states(dirac: &DiracModel, k2: f64) -> Result<EdgeStates> {
    dirac.require_traceless()?;
    let (b0, b) = dirac.coeffs_at(k2);
    let frame = build_frame(&b0, &b)?;
    let exists = !frame.segment && frame.encloses_origin()?;
    let r = frame.b0_perp_norm;
    let energies = if !exists {
        Vec::new()
    } else if dirac.bands() == 2 {
        vec![frame.tau as f64 * r]
    } else if r == 0.0 {
        vec![0.0]
    } else {
        vec![-r, r]
    };
    Ok(EdgeStates { exists, energies, tau: frame.tau, b0_perp_norm: r, segment: frame.segment, frame })
}

/// `-1/ln|λ|` for the slowest-decaying root inside the circle at energy `e`;
/// 0 when every inside root is exactly zero.
pub fn decay_length(dirac: &DiracModel, k2: f64, e: f64) -> Result<Option<f64>> {
    let (b0, b) = dirac.coeffs_at(k2);
    let roots = edge_lambda_roots(&b0, &b, e)?;
    let big = roots.inside.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if roots.inside.is_empty() {
        return Ok(None);
    }
    Ok(Some(if big == 0.0 { 0.0 } else { -1.0 / big.ln() }))
}

/// Largest analytic decay length of edge states whose energy sits in the
/// central half of the local gap, over `samples` values of `k₂`.
pub fn max_decay_length(model: &BulkModel, dirac: &DiracModel, samples: usize) -> Result<f64> {
    let count = if model.dim() == 1 { 1 } else { samples.max(1) };
    let mut xi: f64 = 0.0;
    for j in 0..count {
        let k2 = (j as f64 + 0.5) * TAU / count as f64;
        let k2 = if model.dim() == 1 { 0.0 } else { k2 };
        let st = match dirac_edge_states(dirac, k2) {
            Ok(s) => s,
            Err(Error::ZeroHopping) => continue,
            Err(e) => return Err(e),
        };
        if !st.exists {
            continue;
        }
        let (lo, hi) = model.band_edges_at(k2, 64)?;
        let quarter = 0.25 * (hi - lo);
        for &e in &st.energies {
            if e > lo + quarter && e < hi - quarter {
                if let Some(x) = decay_length(dirac, k2, e)? {
                    xi = xi.max(x);
                }
            }
        }
    }
    Ok(xi)
}

/// `max(60, ⌈20 ξ⌉)` capped at [`MAX_STRIP`], with `ξ` from
/// [`max_decay_length`]; `None` for models without a Dirac form.
pub fn default_strip_length(model: &BulkModel) -> Result<(usize, f64)> {
    let dirac = match crate::clifford::dirac_decompose(model) {
        Ok(d) if d.require_traceless().is_ok() => d,
        _ => return Ok((MIN_STRIP, f64::NAN)),
    };
    let xi = max_decay_length(model, &dirac, 48)?;
    let n = ((20.0 * xi).ceil() as usize).clamp(MIN_STRIP, MAX_STRIP);
    Ok((n, xi))
}

/// A posteriori truncation check: `e^{-n/ξ} < 1e-8`.
pub fn check_strip_length(n: usize, xi: f64) -> Result<()> {
    if xi.is_finite() && xi > 0.0 && (-(n as f64) / xi).exp() >= 1e-8 {
        Err(Error::StripTooShort { n, xi })
    } else {
        Ok(())
    }
}

/// A north-pole preimage seen from the edge: the point where a left-edge
/// branch leaves the top of the lower band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncipiencePoint {
    pub k: [f64; 2],
    /// `sgn(∂₁h₁∂₂h₂ - ∂₁h₂∂₂h₁)`.
    pub sign: i32,
    /// `Im δ₁` of the solution of `h₁ = i h₂` at `k₂ ± δ₂`.
    pub im_delta_plus: f64,
    pub im_delta_minus: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IncipienceReport {
    pub points: Vec<IncipiencePoint>,
    /// `PREIMAGE_ORIENTATION · Σ sign`, comparable with the Chern number.
    pub value: i32,
    pub unsigned: usize,
}

/// Largest entry of the second column of `A` over all harmonics.
pub fn singular_hopping_defect(model: &BulkModel) -> f64 {
    let mut m: f64 = 0.0;
    for (_, a) in model.a().harmonics() {
        for i in 0..a.rows() {
            m = m.max(a[(i, 1)].norm());
        }
    }
    m
}

/// `δ₁` solving `h₁ - i h₂ = 0` at `(k₁ + δ₁, k₂)` with `k₁` continued into
/// the complex plane, by Newton from `start`.
fn decay_shift(dirac: &DiracModel, k1: f64, k2: f64, start: C64) -> Option<C64> {
    let (b0, b) = dirac.coeffs_at(k2);
    let mut d = start;
    for _ in 0..50 {
        let z = C64::new(0.0, -1.0) * (C64::new(k1, 0.0) + d);
        let (em, ep) = (z.exp(), (-z).exp());
        let h = |j: usize| b0[j] + b[j] * em + b[j].conj() * ep;
        let dh = |j: usize| (b[j] * em - b[j].conj() * ep) * C64::new(0.0, -1.0);
        let f = h(0) - C64::new(0.0, 1.0) * h(1);
        let fp = dh(0) - C64::new(0.0, 1.0) * dh(1);
        if f.norm() < 1e-14 * dirac.scale() {
            return Some(d);
        }
        if fp.is_zero() {
            return None;
        }
        d -= f / fp;
    }
    None
}

/// Signed north-pole preimages of a two-band model whose hopping has a
/// vanishing second column, each checked against the decay condition
/// `Im δ₁ > 0` on the correct side.
pub fn incipience_points_singular(model: &BulkModel, grid: usize) -> Result<IncipienceReport> {
    let defect = singular_hopping_defect(model);
    if model.bands() != 2 || defect > 1e-12 * model.scale() {
        return Err(Error::NotSingularHopping { magnitude: defect });
    }
    let dirac = crate::clifford::dirac_decompose(model)?;
    let scale = dirac.scale();
    let pre = crate::bulk::h_parallel_zeros(&dirac, grid, 1e-10 * scale)?;
    let mut points = Vec::new();
    for p in pre.into_iter().filter(|p| p.h3 > 0.0) {
        if p.jacobian.abs() < 1e-8 * scale * scale {
            return Err(Error::DegenerateJacobian { k: p.k });
        }
        let (d1, d2) = dirac.dh(p.k);
        let sign = crate::numerics::sign(p.jacobian);
        let delta2 = 1e-4;
        let lin = |s: f64| {
            // linearized h₁ - i h₂ = 0
            let num = C64::new(d2[0], -d2[1]) * s * delta2;
            -num / C64::new(d1[0], -d1[1])
        };
        let solve = |s: f64| {
            decay_shift(&dirac, p.k[0], p.k[1] + s * delta2, lin(s))
                .ok_or(Error::DidNotConverge { what: "decay condition at an incipience point" })
        };
        let (plus, minus) = (solve(1.0)?.im, solve(-1.0)?.im);
        // decaying (Im δ₁ > 0) exactly on the side sgn(δ₂) = sgn(J)
        if crate::numerics::sign(plus) != sign || crate::numerics::sign(minus) != -sign {
            return Err(Error::DegenerateJacobian { k: p.k });
        }
        points.push(IncipiencePoint { k: p.k, sign, im_delta_plus: plus, im_delta_minus: minus });
    }
    let raw: i32 = points.iter().map(|p| p.sign).sum();
    Ok(IncipienceReport { value: crate::bulk::PREIMAGE_ORIENTATION * raw, unsigned: points.len(), points })
}
