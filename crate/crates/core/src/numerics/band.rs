//! Hermitian block-tridiagonal Toeplitz matrices (strip Hamiltonians) and
//! an eigen-solver for the part of the spectrum inside an energy window:
//! Sturm counts from a block LDL† factorization, bisection, then block
//! inverse iteration with a pivoted band LU and Rayleigh-Ritz.

#[allow(unused_imports)]
use num_traits::Float;
use super::{dot, eig_hermitian, norm, orthonormalize, ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// `n` diagonal blocks `diag`, `lower` on the block subdiagonal `(x, x-1)`
/// and `lower†` on the superdiagonal.
#[derive(Clone, Debug)]
pub struct BlockTridiag {
    n: usize,
    nb: usize,
    diag: ComplexMatrix,
    lower: ComplexMatrix,
}

/// Eigenpairs from one group of (nearly) degenerate eigenvalues.
#[derive(Clone, Debug)]
pub struct Cluster {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
    /// Largest `‖Hv - θv‖` over the group.
    pub residual: f64,
}

impl BlockTridiag {
    pub fn new(n: usize, diag: ComplexMatrix, lower: ComplexMatrix) -> Result<Self> {
        let nb = diag.rows();
        if !diag.is_square() || lower.rows() != nb || lower.cols() != nb || n == 0 {
            return Err(Error::ShapeMismatch { what: "block tridiagonal blocks" });
        }
        if !diag.is_hermitian(1e-10) {
            return Err(Error::NotHermitian { deviation: diag.hermitian_deviation() });
        }
        Ok(BlockTridiag { n, nb, diag, lower })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.nb
    }

    pub fn dim(&self) -> usize {
        self.n * self.nb
    }

    pub fn diag_block(&self) -> &ComplexMatrix {
        &self.diag
    }

    pub fn lower_block(&self) -> &ComplexMatrix {
        &self.lower
    }

    /// Bound on the spectral radius.
    pub fn scale(&self) -> f64 {
        (self.diag.norm_fro() + 2.0 * self.lower.norm_fro()).max(TOL_FLOOR)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let nb = self.nb;
        let (bi, bj) = (i / nb, j / nb);
        if bi == bj {
            self.diag[(i % nb, j % nb)]
        } else if bi == bj + 1 {
            self.lower[(i % nb, j % nb)]
        } else if bj == bi + 1 {
            self.lower[(j % nb, i % nb)].conj()
        } else {
            C64::zero()
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.entry(i, j))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let nb = self.nb;
        let mut out = vec![C64::zero(); self.dim()];
        for x in 0..self.n {
            for a in 0..nb {
                let mut s = C64::zero();
                for b in 0..nb {
                    s += self.diag[(a, b)] * v[x * nb + b];
                    if x > 0 {
                        s += self.lower[(a, b)] * v[(x - 1) * nb + b];
                    }
                    if x + 1 < self.n {
                        s += self.lower[(b, a)].conj() * v[(x + 1) * nb + b];
                    }
                }
                out[x * nb + a] = s;
            }
        }
        out
    }

    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia of
    /// the block LDL† factorization of `H - sigma`).
    pub fn count_below(&self, sigma: f64) -> Result<usize> {
        let nb = self.nb;
        let pivmin = 1e-15 * self.scale();
        let mut count = 0;
        let mut d = self.diag.clone();
        let adj = self.lower.adjoint();
        for x in 0..self.n {
            if x > 0 {
                // d currently holds D_{x-1}^{-1}
                let t = &(&self.lower * &d) * &adj;
                let mut next = self.diag.clone();
                next.axpy(C64::new(-1.0, 0.0), &t);
                d = next;
            }
            for i in 0..nb {
                d[(i, i)] -= sigma;
            }
            for i in 0..nb {
                for j in 0..i {
                    let z = (d[(i, j)] + d[(j, i)].conj()) * 0.5;
                    d[(i, j)] = z;
                    d[(j, i)] = z.conj();
                }
                let r = d[(i, i)].re;
                d[(i, i)] = C64::new(r, 0.0);
            }
            let e = eig_hermitian(&d)?;
            let mut inv = ComplexMatrix::zeros(nb, nb);
            for (k, &mu0) in e.values.iter().enumerate() {
                let mu = if mu0.abs() < pivmin { -pivmin } else { mu0 };
                if mu < 0.0 {
                    count += 1;
                }
                let u = e.vector(k);
                for i in 0..nb {
                    for j in 0..nb {
                        inv[(i, j)] += u[i] * u[j].conj() / mu;
                    }
                }
            }
            d = inv;
        }
        Ok(count)
    }

    /// All eigenpairs with eigenvalue in `[lo, hi)`, grouped into clusters of
    /// eigenvalues closer than `1e-6` of the matrix scale.
    pub fn window(&self, lo: f64, hi: f64) -> Result<Vec<Cluster>> {
        if !(hi > lo) {
            return Ok(Vec::new());
        }
        let scale = self.scale();
        let c_lo = self.count_below(lo)?;
        let c_hi = self.count_below(hi)?;
        if c_hi <= c_lo {
            return Ok(Vec::new());
        }
        let m = c_hi - c_lo;
        let mut lower = vec![lo; m];
        let mut upper = vec![hi; m];
        let tol = 1e-11 * scale;
        for j in 0..m {
            let mut guard = 0;
            while upper[j] - lower[j] > tol && guard < 200 {
                guard += 1;
                let mid = 0.5 * (lower[j] + upper[j]);
                let c = self.count_below(mid)?.saturating_sub(c_lo).min(m);
                for t in 0..m {
                    if t < c {
                        upper[t] = upper[t].min(mid);
                    } else {
                        lower[t] = lower[t].max(mid);
                    }
                }
            }
        }
        let approx: Vec<f64> = (0..m).map(|j| 0.5 * (lower[j] + upper[j])).collect();
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for j in 1..=m {
            if j == m || approx[j] - approx[j - 1] > 1e-6 * scale {
                groups.push((start, j));
                start = j;
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for (gi, &(a, b)) in groups.iter().enumerate() {
            let mu = approx[a..b].iter().sum::<f64>() / (b - a) as f64;
            out.push(self.inverse_iteration(mu, b - a, gi as u64)?);
        }
        Ok(out)
    }

    fn inverse_iteration(&self, mu: f64, size: usize, seed: u64) -> Result<Cluster> {
        let dim = self.dim();
        let scale = self.scale();
        let kl = 2 * self.nb - 1;
        let lu = BandLu::factor(dim, kl, kl, scale, |i, j| {
            let e = self.entry(i, j);
            if i == j {
                e - mu
            } else {
                e
            }
        });
        let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (seed.wrapping_mul(0xBF58_476D_1CE4_E5B9)) ^ dim as u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut xs: Vec<Vec<C64>> = (0..size).map(|_| (0..dim).map(|_| C64::new(next(), next())).collect()).collect();
        orthonormalize(&mut xs);
        let mut best: Option<Cluster> = None;
        for it in 0..40 {
            for x in xs.iter_mut() {
                *x = lu.solve(x);
            }
            if !orthonormalize(&mut xs) {
                for x in xs.iter_mut() {
                    for z in x.iter_mut() {
                        *z += C64::new(next(), next()) * 1e-3;
                    }
                }
                orthonormalize(&mut xs);
                continue;
            }
            if it < 1 {
                continue;
            }
            let cl = rayleigh_ritz(self, &xs)?;
            let done = cl.residual <= 1e-12 * scale;
            let better = best.as_ref().map_or(true, |b| cl.residual < b.residual);
            if better {
                best = Some(cl);
            }
            if done {
                break;
            }
        }
        best.ok_or(Error::DidNotConverge { what: "inverse iteration" })
    }
}

/// Rayleigh-Ritz on an orthonormal basis of an (approximately) invariant
/// subspace.
fn rayleigh_ritz(h: &BlockTridiag, basis: &[Vec<C64>]) -> Result<Cluster> {
    let c = basis.len();
    let hx: Vec<Vec<C64>> = basis.iter().map(|x| h.matvec(x)).collect();
    let mut small = ComplexMatrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            small[(i, j)] = dot(&basis[i], &hx[j]);
        }
    }
    for i in 0..c {
        for j in 0..i {
            let z = (small[(i, j)] + small[(j, i)].conj()) * 0.5;
            small[(i, j)] = z;
            small[(j, i)] = z.conj();
        }
        small[(i, i)] = C64::new(small[(i, i)].re, 0.0);
    }
    let e = eig_hermitian(&small)?;
    let dim = h.dim();
    let mut vectors = Vec::with_capacity(c);
    let mut residual: f64 = 0.0;
    for k in 0..c {
        let y = e.vector(k);
        let mut v = vec![C64::zero(); dim];
        let mut hv = vec![C64::zero(); dim];
        for (j, &yj) in y.iter().enumerate() {
            for t in 0..dim {
                v[t] += basis[j][t] * yj;
                hv[t] += hx[j][t] * yj;
            }
        }
        let theta = e.values[k];
        let r: Vec<C64> = hv.iter().zip(&v).map(|(a, b)| a - b * theta).collect();
        residual = residual.max(norm(&r));
        vectors.push(v);
    }
    Ok(Cluster { values: e.values, vectors, residual })
}

/// LU factorization with partial pivoting of a complex band matrix with
/// `kl` sub- and `ku` superdiagonals. Storage is column-major band form with
/// room for the `kl` extra superdiagonals created by pivoting.
#[derive(Clone, Debug)]
pub struct BandLu {
    dim: usize,
    kl: usize,
    ku: usize,
    ld: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn at(&self, i: usize, j: usize) -> usize {
        j * self.ld + (self.kl + self.ku + i - j)
    }

    /// Factors the matrix with entries `get(i, j)` (only entries inside the
    /// band are queried). Exactly zero pivots are replaced by `1e-15 * scale`.
    pub fn factor(dim: usize, kl: usize, ku: usize, scale: f64, get: impl Fn(usize, usize) -> C64) -> Self {
        let ld = 2 * kl + ku + 1;
        let mut lu = BandLu { dim, kl, ku, ld, ab: vec![C64::zero(); ld * dim], piv: vec![0; dim] };
        for j in 0..dim {
            let i0 = j.saturating_sub(ku);
            let i1 = (j + kl).min(dim - 1);
            for i in i0..=i1 {
                let k = lu.at(i, j);
                lu.ab[k] = get(i, j);
            }
        }
        let pivmin = 1e-15 * scale.max(TOL_FLOOR);
        let ue = kl + ku;
        for j in 0..dim {
            let last = (j + kl).min(dim - 1);
            let mut p = j;
            let mut best = lu.ab[lu.at(j, j)].norm();
            for i in j + 1..=last {
                let v = lu.ab[lu.at(i, j)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            lu.piv[j] = p;
            let cmax = (j + ue).min(dim - 1);
            if p != j {
                for c in j..=cmax {
                    let (a, b) = (lu.at(j, c), lu.at(p, c));
                    lu.ab.swap(a, b);
                }
            }
            let djj = lu.at(j, j);
            if lu.ab[djj].norm() == 0.0 {
                lu.ab[djj] = C64::new(pivmin, 0.0);
            }
            let pivot = lu.ab[djj];
            for i in j + 1..=last {
                let li = lu.at(i, j);
                let l = lu.ab[li] / pivot;
                lu.ab[li] = l;
                if l.is_zero() {
                    continue;
                }
                for c in j + 1..=cmax {
                    let src = lu.ab[lu.at(j, c)];
                    let dst = lu.at(i, c);
                    lu.ab[dst] -= l * src;
                }
            }
        }
        lu
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        let mut x = b.to_vec();
        for j in 0..n {
            let p = self.piv[j];
            if p != j {
                x.swap(j, p);
            }
            let xj = x[j];
            for i in j + 1..=(j + self.kl).min(n - 1) {
                x[i] -= self.ab[self.at(i, j)] * xj;
            }
        }
        let ue = self.kl + self.ku;
        for j in (0..n).rev() {
            let mut s = x[j];
            for c in j + 1..=(j + ue).min(n - 1) {
                s -= self.ab[self.at(j, c)] * x[c];
            }
            x[j] = s / self.ab[self.at(j, j)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eigvals_hermitian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_blocks(nb: usize, rng: &mut ChaCha8Rng) -> (ComplexMatrix, ComplexMatrix) {
        let mut v = ComplexMatrix::zeros(nb, nb);
        for i in 0..nb {
            v[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                v[(i, j)] = z;
                v[(j, i)] = z.conj();
            }
        }
        let a = ComplexMatrix::from_fn(nb, nb, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (v, a)
    }

    #[test]
    fn band_lu_solves_dense_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for &nb in &[1usize, 2, 4] {
            let (v, a) = random_blocks(nb, &mut rng);
            let h = BlockTridiag::new(13, v, a).unwrap();
            let dense = h.to_dense();
            let b: Vec<C64> = (0..h.dim()).map(|_| C64::new(rng.random_range(-1.0..1.0), 0.3)).collect();
            let kl = 2 * nb - 1;
            let lu = BandLu::factor(h.dim(), kl, kl, h.scale(), |i, j| h.entry(i, j));
            let x = lu.solve(&b);
            let r = dense.matvec(&x);
            let err: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "nb {nb}: {err}");
        }
    }

    #[test]
    fn sturm_counts_match_dense_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for &nb in &[2usize, 4] {
            for _ in 0..10 {
                let (v, a) = random_blocks(nb, &mut rng);
                let h = BlockTridiag::new(17, v, a).unwrap();
                let ev = eigvals_hermitian(&h.to_dense()).unwrap();
                for _ in 0..20 {
                    let s = rng.random_range(-4.0..4.0);
                    let expect = ev.iter().filter(|&&e| e < s).count();
                    assert_eq!(h.count_below(s).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn window_matches_dense_eigenpairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &nb in &[2usize, 4] {
            for _ in 0..6 {
                let (v, a) = random_blocks(nb, &mut rng);
                let h = BlockTridiag::new(25, v, a).unwrap();
                let dense = h.to_dense();
                let ev = eigvals_hermitian(&dense).unwrap();
                let (lo, hi) = (-0.4, 0.5);
                let expect: Vec<f64> = ev.iter().copied().filter(|e| *e >= lo && *e < hi).collect();
                let got: Vec<Cluster> = h.window(lo, hi).unwrap();
                let vals: Vec<f64> = got.iter().flat_map(|c| c.values.clone()).collect();
                assert_eq!(vals.len(), expect.len());
                for (x, y) in vals.iter().zip(&expect) {
                    assert!((x - y).abs() < 1e-10);
                }
                for c in &got {
                    assert!(c.residual < 1e-10 * h.scale());
                    for (vv, &th) in c.vectors.iter().zip(&c.values) {
                        let r = dense.matvec(vv);
                        let res: f64 = r.iter().zip(vv).map(|(p, q)| (p - q * th).norm_sqr()).sum::<f64>().sqrt();
                        assert!(res < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn window_resolves_exact_degeneracy() {
        // two decoupled copies of a chain: every eigenvalue doubly degenerate
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (v1, a1) = random_blocks(1, &mut rng);
        let v = v1.kron(&ComplexMatrix::identity(2));
        let a = a1.kron(&ComplexMatrix::identity(2));
        let h = BlockTridiag::new(20, v, a).unwrap();
        let clusters = h.window(-10.0, 10.0).unwrap();
        assert_eq!(clusters.len(), 20);
        for c in &clusters {
            assert_eq!(c.values.len(), 2);
            assert!(c.residual < 1e-9);
            let g = dot(&c.vectors[0], &c.vectors[1]);
            assert!(g.norm() < 1e-10);
        }
    }
}
