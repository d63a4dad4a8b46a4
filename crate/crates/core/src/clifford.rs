//! Gamma matrices `σᵢ` (2 bands) and `Γᵢⱼ = σᵢ ⊗ σⱼ` (4 bands), and the
//! decomposition `H(k) = h₀(k) 𝟙 + Σⱼ hⱼ(k) Γⱼ` of nearest-neighbor models
//! with `hⱼ(k) = b⁰ⱼ(k₂) + 2 Re{bⱼ(k₂) e^{-ik₁}}`.

#[allow(unused_imports)]
use num_traits::Float;
use crate::models::{pauli, BulkModel, FourierMatrix, SymClass};
use crate::numerics::{ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GammaIndex {
    /// `σᵢ`, `i ∈ 1..=3`.
    Pauli(u8),
    /// `σᵢ ⊗ σⱼ`, `i, j ∈ 0..=3`.
    Kron(u8, u8),
}

impl GammaIndex {
    pub fn bands(self) -> usize {
        match self {
            GammaIndex::Pauli(_) => 2,
            GammaIndex::Kron(..) => 4,
        }
    }

    fn valid(self) -> bool {
        match self {
            GammaIndex::Pauli(i) => (1..=3).contains(&i),
            GammaIndex::Kron(i, j) => i <= 3 && j <= 3,
        }
    }
}

impl core::fmt::Display for GammaIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GammaIndex::Pauli(i) => write!(f, "s{i}"),
            GammaIndex::Kron(i, j) => write!(f, "G{i}{j}"),
        }
    }
}

/// Behavior of a coefficient under `k → -k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Na,
}

/// Gammas whose coefficients are even under `Θ = Γ₀₂ ∘ conjugation`.
pub const TREI: [(u8, u8); 6] = [(2, 1), (2, 2), (2, 3), (0, 0), (1, 0), (3, 0)];

pub fn gamma(idx: GammaIndex) -> Result<ComplexMatrix> {
    if !idx.valid() {
        return Err(Error::BadIndex);
    }
    Ok(match idx {
        GammaIndex::Pauli(i) => pauli(i),
        GammaIndex::Kron(i, j) => pauli(i).kron(&pauli(j)),
    })
}

pub fn classify_trei(idx: GammaIndex) -> Result<Parity> {
    match idx {
        GammaIndex::Kron(i, j) if idx.valid() => {
            Ok(if TREI.contains(&(i, j)) { Parity::Even } else { Parity::Odd })
        }
        _ => Err(Error::BadIndex),
    }
}

/// The traceless gammas for `n` bands.
pub fn traceless_gammas(n: usize) -> Result<Vec<GammaIndex>> {
    match n {
        2 => Ok((1..=3).map(GammaIndex::Pauli).collect()),
        4 => Ok((0..4u8)
            .flat_map(|i| (0..4u8).map(move |j| GammaIndex::Kron(i, j)))
            .filter(|&g| g != GammaIndex::Kron(0, 0))
            .collect()),
        _ => Err(Error::UnsupportedDimension { dim: n }),
    }
}

/// Scalar trigonometric polynomial `Σ_m c_m e^{i m k₂}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    c: BTreeMap<i32, C64>,
}

impl TrigPoly {
    pub fn constant(x: C64) -> Self {
        let mut p = TrigPoly::default();
        p.add(0, x);
        p
    }

    pub fn add(&mut self, m: i32, x: C64) {
        *self.c.entry(m).or_insert(C64::zero()) += x;
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.c.iter().map(|(&m, &x)| (m, x))
    }

    pub fn eval(&self, k2: f64) -> C64 {
        self.c.iter().map(|(&m, &x)| x * C64::from_polar(1.0, m as f64 * k2)).sum()
    }

    pub fn deriv(&self, k2: f64) -> C64 {
        self.c.iter().map(|(&m, &x)| x * C64::new(0.0, m as f64) * C64::from_polar(1.0, m as f64 * k2)).sum()
    }

    pub fn norm_bound(&self) -> f64 {
        self.c.values().map(|x| x.norm()).sum()
    }

    /// `Σ |m| |c_m|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.c.iter().map(|(&m, x)| m.unsigned_abs() as f64 * x.norm()).sum()
    }

    /// Drops coefficients of magnitude at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.c.retain(|_, x| x.norm() > tol);
    }
}

/// `H(k) = h₀(k) 𝟙 + Σⱼ hⱼ(k) Γⱼ` with pairwise anticommuting `Γⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracModel {
    bands: usize,
    gammas: Vec<GammaIndex>,
    mats: Vec<ComplexMatrix>,
    b0: Vec<TrigPoly>,
    b: Vec<TrigPoly>,
    id_b0: TrigPoly,
    id_b: TrigPoly,
}

impl DiracModel {
    /// `b0[j]` must be real-valued (`c_{-m} = conj(c_m)`).
    pub fn new(gammas: Vec<GammaIndex>, b0: Vec<TrigPoly>, b: Vec<TrigPoly>) -> Result<Self> {
        if gammas.is_empty() || b0.len() != gammas.len() || b.len() != gammas.len() {
            return Err(Error::ShapeMismatch { what: "gamma set and coefficient vectors" });
        }
        let bands = gammas[0].bands();
        let mut mats = Vec::with_capacity(gammas.len());
        for &g in &gammas {
            if g.bands() != bands || g == GammaIndex::Kron(0, 0) {
                return Err(Error::BadIndex);
            }
            mats.push(gamma(g)?);
        }
        let id = ComplexMatrix::identity(bands);
        for i in 0..mats.len() {
            for j in 0..mats.len() {
                let target = if i == j { id.scale_re(2.0) } else { ComplexMatrix::zeros(bands, bands) };
                let r = (&mats[i].anticommutator(&mats[j]) - &target).max_abs();
                if r > 1e-12 {
                    return Err(Error::NotDirac { residual: r });
                }
            }
        }
        for p in &b0 {
            for (m, x) in p.coefficients() {
                let partner = p.c.get(&-m).copied().unwrap_or(C64::zero());
                if (partner - x.conj()).norm() > 1e-12 * p.norm_bound().max(TOL_FLOOR) {
                    return Err(Error::MalformedModel("b0 component is not real-valued".into()));
                }
            }
        }
        Ok(DiracModel { bands, gammas, mats, b0, b, id_b0: TrigPoly::default(), id_b: TrigPoly::default() })
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    /// Number of active gammas.
    pub fn m(&self) -> usize {
        self.gammas.len()
    }

    pub fn gammas(&self) -> &[GammaIndex] {
        &self.gammas
    }

    pub fn gamma_matrix(&self, j: usize) -> &ComplexMatrix {
        &self.mats[j]
    }

    pub fn b0_poly(&self, j: usize) -> &TrigPoly {
        &self.b0[j]
    }

    pub fn b_poly(&self, j: usize) -> &TrigPoly {
        &self.b[j]
    }

    /// Position of the single active TREI gamma, if exactly one exists.
    pub fn even_index(&self) -> Option<usize> {
        let even: Vec<usize> = (0..self.m())
            .filter(|&j| classify_trei(self.gammas[j]) == Ok(Parity::Even))
            .collect();
        if even.len() == 1 {
            Some(even[0])
        } else {
            None
        }
    }

    /// Number of active TREI gammas.
    pub fn trei_count(&self) -> usize {
        (0..self.m()).filter(|&j| classify_trei(self.gammas[j]) == Ok(Parity::Even)).count()
    }

    /// `(b⁰(k₂), b(k₂))`.
    pub fn coeffs_at(&self, k2: f64) -> (Vec<f64>, Vec<C64>) {
        (self.b0.iter().map(|p| p.eval(k2).re).collect(), self.b.iter().map(|p| p.eval(k2)).collect())
    }

    /// `(∂b⁰/∂k₂, ∂b/∂k₂)`.
    pub fn coeffs_deriv_at(&self, k2: f64) -> (Vec<f64>, Vec<C64>) {
        (self.b0.iter().map(|p| p.deriv(k2).re).collect(), self.b.iter().map(|p| p.deriv(k2)).collect())
    }

    /// `h(k)`.
    pub fn h(&self, k: [f64; 2]) -> Vec<f64> {
        let (b0, b) = self.coeffs_at(k[1]);
        let p = C64::from_polar(1.0, -k[0]);
        b0.iter().zip(&b).map(|(&x, &y)| x + 2.0 * (y * p).re).collect()
    }

    /// `(∂₁h, ∂₂h)`.
    pub fn dh(&self, k: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
        let (_, b) = self.coeffs_at(k[1]);
        let (db0, db) = self.coeffs_deriv_at(k[1]);
        let p = C64::from_polar(1.0, -k[0]);
        let d1 = b.iter().map(|&y| 2.0 * (y * p).im).collect();
        let d2 = db0.iter().zip(&db).map(|(&x, &y)| x + 2.0 * (y * p).re).collect();
        (d1, d2)
    }

    pub fn h0(&self, k: [f64; 2]) -> f64 {
        self.id_b0.eval(k[1]).re + 2.0 * (self.id_b.eval(k[1]) * C64::from_polar(1.0, -k[0])).re
    }

    /// Bound on `|h₀|` over the torus.
    pub fn identity_magnitude(&self) -> f64 {
        self.id_b0.norm_bound() + 2.0 * self.id_b.norm_bound()
    }

    /// Bound on `‖h‖`.
    pub fn scale(&self) -> f64 {
        let s: f64 = self.b0.iter().zip(&self.b).map(|(p, q)| p.norm_bound() + 2.0 * q.norm_bound()).sum();
        s.max(TOL_FLOOR)
    }

    /// Fails with `NonzeroTracePart` unless `h₀ ≡ 0`.
    pub fn require_traceless(&self) -> Result<()> {
        let mag = self.identity_magnitude();
        if mag > 1e-12 * self.scale() {
            Err(Error::NonzeroTracePart { magnitude: mag })
        } else {
            Ok(())
        }
    }

    pub fn matrix(&self, k: [f64; 2]) -> ComplexMatrix {
        let h = self.h(k);
        let mut out = ComplexMatrix::identity(self.bands).scale_re(self.h0(k));
        for (x, g) in h.iter().zip(&self.mats) {
            out.axpy(C64::new(*x, 0.0), g);
        }
        out
    }

    pub fn to_bulk(&self, class: SymClass, filling: usize) -> Result<BulkModel> {
        let n = self.bands;
        let mut v = FourierMatrix::zero(n);
        let mut a = FourierMatrix::zero(n);
        let id = ComplexMatrix::identity(n);
        let put = |f: &mut FourierMatrix, p: &TrigPoly, g: &ComplexMatrix| {
            for (m, x) in p.coefficients() {
                f.add(m, &g.scale(x));
            }
        };
        for j in 0..self.m() {
            put(&mut v, &self.b0[j], &self.mats[j]);
            put(&mut a, &self.b[j], &self.mats[j]);
        }
        put(&mut v, &self.id_b0, &id);
        put(&mut a, &self.id_b, &id);
        BulkModel::new(2, v, a, class, filling)
    }
}

fn component(f: &FourierMatrix, g: &ComplexMatrix, n: usize) -> TrigPoly {
    let mut p = TrigPoly::default();
    for (m, c) in f.harmonics() {
        p.add(m, (c * g).trace() / n as f64);
    }
    p
}

/// Extracts `b⁰ⱼ = Tr[V Γⱼ]/N`, `bⱼ = Tr[A Γⱼ]/N` harmonic by harmonic. The
/// active set is grown greedily from the largest component among the
/// pairwise anticommuting gammas; two-band models always use all three Pauli
/// matrices.
pub fn dirac_decompose(model: &BulkModel) -> Result<DiracModel> {
    let n = model.bands();
    let candidates = traceless_gammas(n)?;
    let scale = model.scale();
    let tol = 1e-13 * scale;
    let mut comps = Vec::new();
    for &g in &candidates {
        let mat = gamma(g)?;
        let mut b0 = component(model.v(), &mat, n);
        let mut b = component(model.a(), &mat, n);
        b0.prune(tol);
        b.prune(tol);
        let weight = b0.norm_bound() + 2.0 * b.norm_bound();
        comps.push((g, mat, b0, b, weight));
    }
    let mut chosen: Vec<usize> = Vec::new();
    if n == 2 {
        chosen = (0..3).collect();
    } else {
        let mut order: Vec<usize> = (0..comps.len()).filter(|&i| comps[i].4 > 1e-12 * scale).collect();
        order.sort_by(|&x, &y| comps[y].4.total_cmp(&comps[x].4).then(x.cmp(&y)));
        for i in order {
            if chosen.iter().all(|&j| comps[i].1.anticommutator(&comps[j].1).max_abs() < 1e-12) {
                chosen.push(i);
            }
        }
        chosen.sort_unstable();
        if chosen.is_empty() {
            chosen.push(candidates.iter().position(|&g| g == GammaIndex::Kron(3, 0)).expect("present"));
        }
    }
    let mut gammas = Vec::new();
    let mut b0s = Vec::new();
    let mut bs = Vec::new();
    for &i in &chosen {
        gammas.push(comps[i].0);
        b0s.push(comps[i].2.clone());
        bs.push(comps[i].3.clone());
    }
    let mut dm = DiracModel::new(gammas, b0s, bs)?;
    let id = ComplexMatrix::identity(n);
    dm.id_b0 = component(model.v(), &id, n);
    dm.id_b = component(model.a(), &id, n);
    dm.id_b0.prune(tol);
    dm.id_b.prune(tol);
    let mut residual: f64 = 0.0;
    let g = 7;
    for i in 0..g {
        for j in 0..g {
            let k = [0.21 + i as f64 * TAU / g as f64, 0.13 + j as f64 * TAU / g as f64];
            residual = residual.max((&model.h(k) - &dm.matrix(k)).max_abs());
        }
    }
    if residual > 1e-10 * scale {
        return Err(Error::NotDirac { residual });
    }
    Ok(dm)
}
