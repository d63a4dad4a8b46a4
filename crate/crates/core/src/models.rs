//! Nearest-neighbor tight-binding models, Bloch Hamiltonians, symmetry
//! checks and gap reports.

#[allow(unused_imports)]
use num_traits::Float;
use crate::clifford::{classify_trei, gamma, GammaIndex, Parity};
use crate::numerics::{eigvals_hermitian, ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use num_traits::Zero;

/// Gap below which a model counts as gapless.
pub const GAP_THRESHOLD: f64 = 1e-6;

/// Matrix-valued trigonometric polynomial `Σ_m C_m e^{i m k₂}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierMatrix {
    n: usize,
    harmonics: BTreeMap<i32, ComplexMatrix>,
}

impl FourierMatrix {
    pub fn zero(n: usize) -> Self {
        FourierMatrix { n, harmonics: BTreeMap::new() }
    }

    pub fn constant(c: ComplexMatrix) -> Self {
        let mut f = Self::zero(c.rows());
        f.set(0, c);
        f
    }

    pub fn from_harmonics(n: usize, items: impl IntoIterator<Item = (i32, ComplexMatrix)>) -> Result<Self> {
        let mut f = Self::zero(n);
        for (m, c) in items {
            if c.rows() != n || c.cols() != n {
                return Err(Error::MalformedModel(format!("harmonic {m} is {}x{}, expected {n}x{n}", c.rows(), c.cols())));
            }
            f.add(m, &c);
        }
        Ok(f)
    }

    /// Replaces the coefficient of harmonic `m`.
    pub fn set(&mut self, m: i32, c: ComplexMatrix) {
        assert_eq!((c.rows(), c.cols()), (self.n, self.n));
        self.harmonics.insert(m, c);
    }

    /// Adds `c` to the coefficient of harmonic `m`.
    pub fn add(&mut self, m: i32, c: &ComplexMatrix) {
        let n = self.n;
        self.harmonics
            .entry(m)
            .or_insert_with(|| ComplexMatrix::zeros(n, n))
            .axpy(C64::new(1.0, 0.0), c);
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: i32) -> Option<&ComplexMatrix> {
        self.harmonics.get(&m)
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (i32, &ComplexMatrix)> {
        self.harmonics.iter().map(|(&m, c)| (m, c))
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics.iter().all(|(&m, c)| m == 0 || c.max_abs() == 0.0)
    }

    pub fn max_abs_harmonic(&self) -> i32 {
        self.harmonics.keys().map(|m| m.abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, k2: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for (&m, c) in &self.harmonics {
            out.axpy(C64::from_polar(1.0, m as f64 * k2), c);
        }
        out
    }

    /// `d/dk₂` of [`eval`](Self::eval).
    pub fn deriv(&self, k2: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for (&m, c) in &self.harmonics {
            out.axpy(C64::new(0.0, m as f64) * C64::from_polar(1.0, m as f64 * k2), c);
        }
        out
    }

    /// `Σ_m ‖C_m‖_F`, a bound on the sup norm.
    pub fn norm_bound(&self) -> f64 {
        self.harmonics.values().map(|c| c.norm_fro()).sum()
    }

    /// `Σ_m |m| ‖C_m‖_F`, a Lipschitz bound in `k₂`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.harmonics.iter().map(|(&m, c)| m.unsigned_abs() as f64 * c.norm_fro()).sum()
    }

    /// Largest entry of `C_{-m} - C_m†` over all harmonics.
    pub fn hermitian_deviation(&self) -> f64 {
        let zero = ComplexMatrix::zeros(self.n, self.n);
        let mut dev: f64 = 0.0;
        for (&m, c) in &self.harmonics {
            let other = self.harmonics.get(&-m).unwrap_or(&zero);
            dev = dev.max((other - &c.adjoint()).max_abs());
        }
        dev
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymClass {
    A,
    AIII,
    AII,
}

impl SymClass {
    pub fn name(self) -> &'static str {
        match self {
            SymClass::A => "A",
            SymClass::AIII => "AIII",
            SymClass::AII => "AII",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" => Some(SymClass::A),
            "AIII" => Some(SymClass::AIII),
            "AII" => Some(SymClass::AII),
            _ => None,
        }
    }
}

/// `H(k) = V(k₂) + A(k₂) e^{-ik₁} + A(k₂)† e^{ik₁}`. For `d = 1` both `V` and
/// `A` are constant and `k₂` is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct BulkModel {
    d: usize,
    n: usize,
    v: FourierMatrix,
    a: FourierMatrix,
    class: SymClass,
    filling: usize,
}

impl BulkModel {
    pub fn new(d: usize, v: FourierMatrix, a: FourierMatrix, class: SymClass, filling: usize) -> Result<Self> {
        let n = v.size();
        let bad = |msg: alloc::string::String| Err(Error::MalformedModel(msg));
        if d != 1 && d != 2 {
            return bad(format!("d must be 1 or 2, got {d}"));
        }
        if n < 2 {
            return bad(format!("need at least 2 bands, got {n}"));
        }
        if a.size() != n {
            return bad(format!("V is {n}-band but A is {}-band", a.size()));
        }
        if filling == 0 || filling >= n {
            return bad(format!("filling {filling} outside 1..{n}"));
        }
        if d == 1 && !(v.is_constant() && a.is_constant()) {
            return bad("d = 1 models cannot depend on k2".into());
        }
        let scale = (v.norm_bound() + a.norm_bound()).max(TOL_FLOOR);
        let dev = v.hermitian_deviation();
        if dev > 1e-12 * scale {
            return bad(format!("V is not Hermitian-valued (deviation {dev:e})"));
        }
        match class {
            SymClass::AIII if n % 2 != 0 => return bad(format!("class AIII needs an even band count, got {n}")),
            SymClass::AII if n != 4 || filling != 2 => {
                return bad(format!("class AII needs 4 bands at filling 2, got {n} at {filling}"))
            }
            _ => {}
        }
        Ok(BulkModel { d, n, v, a, class, filling })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bands(&self) -> usize {
        self.n
    }

    pub fn class(&self) -> SymClass {
        self.class
    }

    pub fn filling(&self) -> usize {
        self.filling
    }

    pub fn v(&self) -> &FourierMatrix {
        &self.v
    }

    pub fn a(&self) -> &FourierMatrix {
        &self.a
    }

    /// Energy scale `Σ‖V_m‖ + 2Σ‖A_m‖`, a bound on `‖H(k)‖`.
    pub fn scale(&self) -> f64 {
        (self.v.norm_bound() + 2.0 * self.a.norm_bound()).max(TOL_FLOOR)
    }

    /// Bound on `‖∂H/∂k₂‖`.
    pub fn lipschitz_k2(&self) -> f64 {
        self.v.lipschitz_bound() + 2.0 * self.a.lipschitz_bound()
    }

    pub fn v_at(&self, k2: f64) -> ComplexMatrix {
        self.v.eval(k2)
    }

    pub fn a_at(&self, k2: f64) -> ComplexMatrix {
        self.a.eval(k2)
    }

    fn assemble(v: &ComplexMatrix, a: &ComplexMatrix, k1: f64) -> ComplexMatrix {
        let mut h = v.clone();
        let p = C64::from_polar(1.0, -k1);
        h.axpy(p, a);
        h.axpy(p.conj(), &a.adjoint());
        h
    }

    /// Bloch Hamiltonian at `k = (k₁, k₂)`.
    pub fn h(&self, k: [f64; 2]) -> ComplexMatrix {
        let k2 = if self.d == 1 { 0.0 } else { k[1] };
        Self::assemble(&self.v.eval(k2), &self.a.eval(k2), k[0])
    }

    /// `(∂H/∂k₁, ∂H/∂k₂)`.
    pub fn dh(&self, k: [f64; 2]) -> (ComplexMatrix, ComplexMatrix) {
        let k2 = if self.d == 1 { 0.0 } else { k[1] };
        let a = self.a.eval(k2);
        let p = C64::from_polar(1.0, -k[0]);
        let mut d1 = ComplexMatrix::zeros(self.n, self.n);
        d1.axpy(C64::new(0.0, -1.0) * p, &a);
        d1.axpy(C64::new(0.0, 1.0) * p.conj(), &a.adjoint());
        let d2 = if self.d == 1 {
            ComplexMatrix::zeros(self.n, self.n)
        } else {
            Self::assemble(&self.v.deriv(k2), &self.a.deriv(k2), k[0])
        };
        (d1, d2)
    }

    pub fn band_energies(&self, k: [f64; 2]) -> Result<Vec<f64>> {
        eigvals_hermitian(&self.h(k))
    }

    /// Direct gap `E_{filling+1} - E_{filling}` at `k`.
    pub fn direct_gap(&self, k: [f64; 2]) -> Result<f64> {
        let e = self.band_energies(k)?;
        Ok(e[self.filling] - e[self.filling - 1])
    }

    /// `(sup_{k₁} E_filling, inf_{k₁} E_{filling+1})` at fixed `k₂`, from a
    /// `samples`-point scan refined by golden-section search.
    pub fn band_edges_at(&self, k2: f64, samples: usize) -> Result<(f64, f64)> {
        let f = self.filling;
        let samples = samples.max(8);
        let dk = TAU / samples as f64;
        let mut lo = (f64::NEG_INFINITY, 0.0);
        let mut hi = (f64::INFINITY, 0.0);
        for j in 0..samples {
            let k1 = j as f64 * dk;
            let e = self.band_energies([k1, k2])?;
            if e[f - 1] > lo.0 {
                lo = (e[f - 1], k1);
            }
            if e[f] < hi.0 {
                hi = (e[f], k1);
            }
        }
        let top = golden_max(|k1| self.band_energies([k1, k2]).map(|e| e[f - 1]), lo.1 - dk, lo.1 + dk)?;
        let bottom = golden_max(|k1| self.band_energies([k1, k2]).map(|e| -e[f]), hi.1 - dk, hi.1 + dk)?;
        Ok((top.max(lo.0), (-bottom).min(hi.0)))
    }
}

/// Maximum of `f` on `[a, b]` by golden-section search (about 1e-10 in the
/// argument).
fn golden_max(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > 1e-10 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(f1.max(f2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    /// Minimum direct gap over the grid (after refinement).
    pub min_gap: f64,
    /// Where `min_gap` was found.
    pub k_min: [f64; 2],
    /// Highest occupied and lowest unoccupied energy over the grid.
    pub lower_max: f64,
    pub upper_min: f64,
    /// Middle of the global gap, or of the direct gap at `k_min` when the
    /// bands overlap in energy.
    pub center: f64,
    pub grid: usize,
}

impl GapReport {
    /// `upper_min - lower_max`; negative when the bands overlap in energy.
    pub fn indirect_gap(&self) -> f64 {
        self.upper_min - self.lower_max
    }
}

/// Scans the gap on a `grid^d` mesh, refines the minimum with one Newton
/// step, and fails with `Gapless` below [`GAP_THRESHOLD`].
pub fn gap_report(model: &BulkModel, grid: usize) -> Result<GapReport> {
    if grid < 16 {
        return Err(Error::MalformedModel(format!("gap grid {grid} is below 16")));
    }
    let f = model.filling();
    let n2 = if model.dim() == 1 { 1 } else { grid };
    let dk = TAU / grid as f64;
    let mut min_gap = f64::INFINITY;
    let mut k_min = [0.0, 0.0];
    let mut lower_max = f64::NEG_INFINITY;
    let mut upper_min = f64::INFINITY;
    for i in 0..grid {
        for j in 0..n2 {
            let k = [i as f64 * dk, j as f64 * dk];
            let e = model.band_energies(k)?;
            let g = e[f] - e[f - 1];
            if g < min_gap {
                min_gap = g;
                k_min = k;
            }
            lower_max = lower_max.max(e[f - 1]);
            upper_min = upper_min.min(e[f]);
        }
    }
    // one Newton step on the gap function from finite differences
    let h = 1e-4;
    let gap = |k: [f64; 2]| model.direct_gap(k);
    let dims = model.dim();
    let mut grad = [0.0; 2];
    let mut hess = [[0.0; 2]; 2];
    let g0 = gap(k_min)?;
    for a in 0..dims {
        let mut kp = k_min;
        let mut km = k_min;
        kp[a] += h;
        km[a] -= h;
        let (gp, gm) = (gap(kp)?, gap(km)?);
        grad[a] = (gp - gm) / (2.0 * h);
        hess[a][a] = (gp - 2.0 * g0 + gm) / (h * h);
    }
    if dims == 2 {
        let e = |s1: f64, s2: f64| gap([k_min[0] + s1 * h, k_min[1] + s2 * h]);
        hess[0][1] = (e(1.0, 1.0)? - e(1.0, -1.0)? - e(-1.0, 1.0)? + e(-1.0, -1.0)?) / (4.0 * h * h);
        hess[1][0] = hess[0][1];
    }
    let step = if dims == 1 {
        if hess[0][0] > 0.0 {
            Some([-grad[0] / hess[0][0], 0.0])
        } else {
            None
        }
    } else {
        let det = hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0];
        if det > 0.0 && hess[0][0] > 0.0 {
            Some([
                -(hess[1][1] * grad[0] - hess[0][1] * grad[1]) / det,
                -(hess[0][0] * grad[1] - hess[1][0] * grad[0]) / det,
            ])
        } else {
            None
        }
    };
    if let Some(s) = step {
        if s[0].abs() <= dk && s[1].abs() <= dk {
            let k = [k_min[0] + s[0], k_min[1] + s[1]];
            let g = gap(k)?;
            if g < min_gap {
                min_gap = g;
                k_min = k;
            }
        }
    }
    if min_gap < GAP_THRESHOLD {
        return Err(Error::Gapless { gap: min_gap.max(0.0), k: k_min });
    }
    let center = if upper_min > lower_max {
        0.5 * (upper_min + lower_max)
    } else {
        let e = model.band_energies(k_min)?;
        0.5 * (e[f] + e[f - 1])
    };
    Ok(GapReport { min_gap, k_min, lower_max, upper_min, center, grid })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub hermitian: bool,
    pub chiral: bool,
    pub tri: bool,
    /// Parity of every nonzero component `d_{i,j}` under `k → -k` (4-band
    /// models only).
    pub parity_table: Option<Vec<(GammaIndex, Parity)>>,
    /// Every nonvanishing component has the parity its TREI membership
    /// predicts. Meaningful only when `tri` holds.
    pub parity_matches_trei: bool,
}

fn sample_grid(model: &BulkModel) -> Vec<[f64; 2]> {
    let n = 9;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..if model.dim() == 1 { 1 } else { n } {
            out.push([0.37 + i as f64 * TAU / n as f64, 0.11 + j as f64 * TAU / n as f64]);
        }
    }
    out.extend_from_slice(&[[0.0, 0.0], [PI, 0.0], [0.0, PI], [PI, PI]]);
    out
}

/// Chirality operator `diag(1, .., 1, -1, .., -1)`.
pub fn chirality_operator(n: usize) -> ComplexMatrix {
    let vals: Vec<f64> = (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect();
    ComplexMatrix::diag(&vals)
}

/// `Θ H Θ⁻¹` for `Θ = Γ₀₂ ∘ conjugation`.
pub fn time_reverse(h: &ComplexMatrix) -> ComplexMatrix {
    let g = gamma(GammaIndex::Kron(0, 2)).expect("valid index");
    &(&g * &h.conj()) * &g
}

pub fn check_symmetries(model: &BulkModel) -> SymmetryReport {
    let pts = sample_grid(model);
    let scale = model.scale();
    let n = model.bands();
    let hermitian = pts.iter().all(|&k| model.h(k).is_hermitian(1e-12));
    let chiral = n % 2 == 0 && {
        let pi = chirality_operator(n);
        pts.iter().all(|&k| pi.anticommutator(&model.h(k)).max_abs() <= 1e-10 * scale)
    };
    let neg = |k: [f64; 2]| [-k[0], -k[1]];
    let tri = n == 4 && pts.iter().all(|&k| (&model.h(neg(k)) - &time_reverse(&model.h(k))).max_abs() <= 1e-10 * scale);
    let mut parity_table = None;
    let mut parity_matches_trei = false;
    if n == 4 {
        let mut table = Vec::new();
        let mut ok = true;
        for i in 0..4u8 {
            for j in 0..4u8 {
                let idx = GammaIndex::Kron(i, j);
                let g = gamma(idx).expect("valid index");
                let comp = |k: [f64; 2]| (&model.h(k) * &g).trace() / 4.0;
                let mut even = true;
                let mut odd = true;
                let mut nonzero = false;
                for &k in &pts {
                    let (p, m) = (comp(k), comp(neg(k)));
                    nonzero |= p.norm() > 1e-10 * scale;
                    even &= (p - m).norm() <= 1e-10 * scale;
                    odd &= (p + m).norm() <= 1e-10 * scale;
                }
                let parity = if !nonzero {
                    Parity::Na
                } else if even {
                    Parity::Even
                } else if odd {
                    Parity::Odd
                } else {
                    Parity::Na
                };
                if nonzero {
                    ok &= parity == classify_trei(idx).unwrap_or(Parity::Na);
                }
                table.push((idx, parity));
            }
        }
        parity_table = Some(table);
        parity_matches_trei = ok;
    }
    SymmetryReport { hermitian, chiral, tri, parity_table, parity_matches_trei }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrices `σ₀..σ₃`.
pub fn pauli(i: u8) -> ComplexMatrix {
    let (o, z) = (c(1.0, 0.0), C64::zero());
    match i {
        0 => ComplexMatrix::from_rows(&[&[o, z], &[z, o]]),
        1 => ComplexMatrix::from_rows(&[&[z, o], &[o, z]]),
        2 => ComplexMatrix::from_rows(&[&[z, c(0.0, -1.0)], &[c(0.0, 1.0), z]]),
        3 => ComplexMatrix::from_rows(&[&[o, z], &[z, -o]]),
        _ => panic!("pauli index {i}"),
    }
}

/// `σ⁻ = [[0, 0], [1, 0]]`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0])
}

/// Harmonic coefficients of `cos k₂ · M` and `sin k₂ · M`.
fn cos_k2(m: &ComplexMatrix) -> [(i32, ComplexMatrix); 2] {
    [(1, m.scale_re(0.5)), (-1, m.scale_re(0.5))]
}

fn sin_k2(m: &ComplexMatrix) -> [(i32, ComplexMatrix); 2] {
    [(1, m.scale(c(0.0, -0.5))), (-1, m.scale(c(0.0, 0.5)))]
}

/// SSH chain: `V = v σ₁`, `A = w σ⁻`, so the lower-left block of `H(k)` is
/// `T(k) = v + w e^{-ik}`.
pub fn ssh(v: f64, w: f64) -> BulkModel {
    BulkModel::new(
        1,
        FourierMatrix::constant(pauli(1).scale_re(v)),
        FourierMatrix::constant(sigma_minus().scale_re(w)),
        SymClass::AIII,
        1,
    )
    .expect("valid preset")
}

/// Qi-Wu-Zhang: `V = sin k₂ σ₂ + (m + cos k₂) σ₃`, `A = (σ₃ + iσ₁)/2`,
/// i.e. `h = (sin k₁, sin k₂, m + cos k₁ + cos k₂)`.
pub fn qwz(m: f64) -> BulkModel {
    let mut v = FourierMatrix::constant(pauli(3).scale_re(m));
    for (h, x) in sin_k2(&pauli(2)).into_iter().chain(cos_k2(&pauli(3))) {
        v.add(h, &x);
    }
    let mut a = pauli(3).scale_re(0.5);
    a.axpy(c(0.0, 0.5), &pauli(1));
    BulkModel::new(2, v, FourierMatrix::constant(a), SymClass::A, 1).expect("valid preset")
}

/// BHZ-like 4-band model with `d₃₀ = m + cos k₁ + cos k₂` on the even
/// gamma `Γ₃₀` and `sin k₁ Γ₁₁ + sin k₂ Γ₁₂` on odd ones.
pub fn bhz(m: f64) -> BulkModel {
    let g = |i, j| gamma(GammaIndex::Kron(i, j)).expect("valid index");
    let mut v = FourierMatrix::constant(g(3, 0).scale_re(m));
    for (h, x) in cos_k2(&g(3, 0)).into_iter().chain(sin_k2(&g(1, 2))) {
        v.add(h, &x);
    }
    let mut a = g(3, 0).scale_re(0.5);
    a.axpy(c(0.0, 0.5), &g(1, 1));
    BulkModel::new(2, v, FourierMatrix::constant(a), SymClass::AII, 2).expect("valid preset")
}

/// Two-band model with singular hopping `A = σ⁻` (second column zero) and
/// `V = (a + cos k₂) σ₁ + sin k₂ σ₂ + (μ + sin k₂) σ₃`.
pub fn harper(a: f64, mu: f64) -> BulkModel {
    let mut v = FourierMatrix::constant(&pauli(1).scale_re(a) + &pauli(3).scale_re(mu));
    for (h, x) in cos_k2(&pauli(1)).into_iter().chain(sin_k2(&pauli(2))).chain(sin_k2(&pauli(3))) {
        v.add(h, &x);
    }
    BulkModel::new(2, v, FourierMatrix::constant(sigma_minus()), SymClass::A, 1).expect("valid preset")
}
