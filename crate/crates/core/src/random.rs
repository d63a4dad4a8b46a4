//! Random gapped nearest-neighbor models for property tests and sweeps.
//! Coefficients are uniform in `[-1, 1]`, rescaled so the bound on the
//! spectral radius is at most 4, and rejected when the gap is below
//! [`GAP_FLOOR`].

use crate::clifford::{classify_trei, gamma, traceless_gammas, DiracModel, GammaIndex, Parity, TrigPoly};
use crate::models::{gap_report, pauli, sigma_minus, BulkModel, FourierMatrix, SymClass};
use crate::numerics::ComplexMatrix;
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use rand::seq::IndexedRandom;
use rand::Rng;

pub const GAP_FLOOR: f64 = 0.05;
pub const RADIUS_CAP: f64 = 4.0;
const MAX_TRIES: usize = 10_000;

fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

fn cunit<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(unit(rng), unit(rng))
}

/// A cheap coarse screen, then a fine one: narrow gap minima slip through
/// coarse meshes.
fn gapped(model: &BulkModel, grid: usize) -> bool {
    let ok = |g: usize| gap_report(model, g).is_ok_and(|r| r.min_gap >= GAP_FLOOR);
    let fine = if model.dim() == 1 { grid } else { 4 * grid };
    ok(grid) && (fine == grid || ok(fine))
}

fn retry<T>(mut f: impl FnMut() -> Option<T>) -> Result<T> {
    for _ in 0..MAX_TRIES {
        if let Some(x) = f() {
            return Ok(x);
        }
    }
    Err(Error::DidNotConverge { what: "rejection sampling of a gapped model" })
}

/// Two-band chiral chain with `T(k) = t₀ + α e^{-ik} + β e^{ik}`.
pub fn chiral_1d<R: Rng + ?Sized>(rng: &mut R) -> Result<BulkModel> {
    retry(|| {
        let (mut t0, mut al, mut be) = (cunit(rng), cunit(rng), cunit(rng));
        let bound = t0.norm() + al.norm() + be.norm();
        if bound > RADIUS_CAP {
            let s = RADIUS_CAP / bound;
            t0 *= s;
            al *= s;
            be *= s;
        }
        let sm = sigma_minus();
        let sp = sm.adjoint();
        let v = &sm.scale(t0) + &sp.scale(t0.conj());
        let a = &sm.scale(al) + &sp.scale(be.conj());
        let m = BulkModel::new(1, FourierMatrix::constant(v), FourierMatrix::constant(a), SymClass::AIII, 1).ok()?;
        gapped(&m, 256).then_some(m)
    })
}

/// Real-valued trig polynomial `c₀ + c₁ e^{ik₂} + conj(c₁) e^{-ik₂}`, with the
/// parity under `k₂ → -k₂` optionally fixed.
fn real_poly<R: Rng + ?Sized>(rng: &mut R, parity: Option<Parity>) -> TrigPoly {
    let mut p = TrigPoly::default();
    let c1 = match parity {
        None => cunit(rng) * 0.5,
        Some(Parity::Even) => C64::new(0.5 * unit(rng), 0.0),
        Some(_) => C64::new(0.0, 0.5 * unit(rng)),
    };
    if parity != Some(Parity::Odd) {
        p.add(0, C64::new(unit(rng), 0.0));
    }
    p.add(1, c1);
    p.add(-1, c1.conj());
    p
}

/// Hopping coefficient `Σ_{m=-1..1} β_m e^{imk₂}`; `Even` makes every `β_m`
/// real, `Odd` purely imaginary (the TRI constraints for even and odd
/// components).
fn hop_poly<R: Rng + ?Sized>(rng: &mut R, parity: Option<Parity>) -> TrigPoly {
    let mut p = TrigPoly::default();
    for m in -1..=1 {
        let z = match parity {
            None => cunit(rng),
            Some(Parity::Even) => C64::new(unit(rng), 0.0),
            Some(_) => C64::new(0.0, unit(rng)),
        };
        p.add(m, z * 0.5);
    }
    p
}

fn capped(gammas: Vec<GammaIndex>, mut b0: Vec<TrigPoly>, mut b: Vec<TrigPoly>) -> Result<DiracModel> {
    let d = DiracModel::new(gammas.clone(), b0.clone(), b.clone())?;
    let s = d.scale();
    if s <= RADIUS_CAP {
        return Ok(d);
    }
    let f = C64::new(RADIUS_CAP / s, 0.0);
    for p in b0.iter_mut().chain(b.iter_mut()) {
        let mut q = TrigPoly::default();
        for (m, x) in p.coefficients() {
            q.add(m, x * f);
        }
        *p = q;
    }
    DiracModel::new(gammas, b0, b)
}

/// Two-band Dirac model, all three Paulis, harmonics `-1..1` in `k₂`.
pub fn dirac_2band<R: Rng + ?Sized>(rng: &mut R) -> Result<DiracModel> {
    let g = traceless_gammas(2)?;
    retry(|| {
        let b0 = (0..3).map(|_| real_poly(rng, None)).collect();
        let b = (0..3).map(|_| hop_poly(rng, None)).collect();
        let d = capped(g.clone(), b0, b).ok()?;
        let m = d.to_bulk(SymClass::A, 1).ok()?;
        gapped(&m, 48).then_some(d)
    })
}

/// Two-band model whose hopping `A(k₂) = c(k₂) σ⁻` has a vanishing second
/// column.
pub fn singular_2band<R: Rng + ?Sized>(rng: &mut R) -> Result<BulkModel> {
    retry(|| {
        let mut v = FourierMatrix::zero(2);
        for j in 1..=3u8 {
            let p = real_poly(rng, None);
            for (m, x) in p.coefficients() {
                v.add(m, &pauli(j).scale(x));
            }
        }
        let mut a = FourierMatrix::zero(2);
        for m in -1..=1 {
            a.add(m, &sigma_minus().scale(cunit(rng)));
        }
        let bound = v.norm_bound() + 2.0 * a.norm_bound();
        if bound > 2.0 * RADIUS_CAP {
            // Frobenius norms overestimate the spectral radius by up to √2
            let s = 2.0 * RADIUS_CAP / bound;
            v = scale_fourier(&v, s);
            a = scale_fourier(&a, s);
        }
        let m = BulkModel::new(2, v, a, SymClass::A, 1).ok()?;
        gapped(&m, 48).then_some(m)
    })
}

fn scale_fourier(f: &FourierMatrix, s: f64) -> FourierMatrix {
    let mut out = FourierMatrix::zero(f.size());
    for (m, c) in f.harmonics() {
        out.add(m, &c.scale_re(s));
    }
    out
}

/// All maximal sets of mutually anticommuting traceless 4×4 gammas with
/// exactly one TREI member.
pub fn single_trei_clifford_sets() -> Vec<Vec<GammaIndex>> {
    let all = traceless_gammas(4).expect("four bands");
    let mats: Vec<ComplexMatrix> = all.iter().map(|&g| gamma(g).expect("valid")).collect();
    let anti = |i: usize, j: usize| mats[i].anticommutator(&mats[j]).max_abs() < 1e-12;
    let even = |i: usize| classify_trei(all[i]) == Ok(Parity::Even);
    let mut out = Vec::new();
    let n = all.len();
    // anticommuting sets in 4×4 have at most five members
    fn extend(
        cur: &mut Vec<usize>,
        start: usize,
        n: usize,
        anti: &dyn Fn(usize, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == 5 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if cur.iter().all(|&j| anti(i, j)) {
                cur.push(i);
                extend(cur, i + 1, n, anti, out);
                cur.pop();
            }
        }
    }
    let mut sets = Vec::new();
    extend(&mut Vec::new(), 0, n, &anti, &mut sets);
    for s in sets {
        if s.iter().filter(|&&i| even(i)).count() == 1 {
            out.push(s.iter().map(|&i| all[i]).collect());
        }
    }
    out
}

/// Time-reversal-invariant four-band Dirac model on a Clifford set with one
/// TREI gamma: even coefficients on it, odd ones on three or four others.
pub fn tri_dirac_4band<R: Rng + ?Sized>(rng: &mut R) -> Result<DiracModel> {
    let sets = single_trei_clifford_sets();
    retry(|| {
        let set = sets.choose(rng)?;
        let mut g = set.clone();
        if rng.random_bool(0.5) {
            // drop one odd member
            let odd: Vec<usize> = (0..g.len()).filter(|&i| classify_trei(g[i]) != Ok(Parity::Even)).collect();
            g.remove(*odd.choose(rng)?);
        }
        let par: Vec<Parity> = g.iter().map(|&x| classify_trei(x).unwrap_or(Parity::Na)).collect();
        let b0 = par.iter().map(|&p| real_poly(rng, Some(p))).collect();
        let b = par.iter().map(|&p| hop_poly(rng, Some(p))).collect();
        let d = capped(g, b0, b).ok()?;
        let m = d.to_bulk(SymClass::AII, 2).ok()?;
        gapped(&m, 32).then_some(d)
    })
}

/// Seeds for reproducible batches: `(seed, index)` → stream.
pub fn stream_seed(seed: u64, index: u64) -> [u8; 32] {
    let mut out = [0u8; 32];
    out[..8].copy_from_slice(&seed.to_le_bytes());
    out[8..16].copy_from_slice(&index.to_le_bytes());
    out[16..24].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    out
}
