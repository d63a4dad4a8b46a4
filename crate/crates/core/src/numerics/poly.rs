#[allow(unused_imports)]
use num_traits::Float;
use super::TOL_FLOOR;
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Roots of a polynomial given by ascending coefficients. Leading
/// coefficients below `1e-12 * max|c|` are deflated and each one becomes a
/// root at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRoots {
    pub finite: Vec<C64>,
    pub at_infinity: usize,
    /// Magnitude of the leading coefficient that was kept.
    pub leading: f64,
}

impl PolyRoots {
    pub fn degree(&self) -> usize {
        self.finite.len() + self.at_infinity
    }
}

pub fn poly_eval(c: &[C64], x: C64) -> C64 {
    c.iter().rev().fold(C64::zero(), |acc, &a| acc * x + a)
}

fn poly_deriv_eval(c: &[C64], x: C64) -> C64 {
    let mut acc = C64::zero();
    for (k, &a) in c.iter().enumerate().skip(1).rev() {
        acc = acc * x + a * k as f64;
    }
    acc
}

pub fn poly_roots(c: &[C64]) -> Result<PolyRoots> {
    let cmax = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if cmax == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    let mut deg = c.len() - 1;
    let mut at_infinity = 0;
    while deg > 0 && c[deg].norm() < 1e-12 * cmax {
        deg -= 1;
        at_infinity += 1;
    }
    let mut finite = Vec::with_capacity(deg);
    // exact zero roots
    let mut low = 0;
    while low < deg && c[low].is_zero() {
        finite.push(C64::zero());
        low += 1;
    }
    let p = &c[low..=deg];
    let d = p.len() - 1;
    match d {
        0 => {}
        1 => finite.push(-p[0] / p[1]),
        _ => {
            let mut h = companion(p);
            balance(&mut h, d);
            let ev = hessenberg_eigenvalues(&mut h, d)?;
            for z in ev {
                finite.push(polish(p, z));
            }
        }
    }
    finite.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(PolyRoots { finite, at_infinity, leading: c[deg].norm() })
}

/// Upper Hessenberg companion matrix of the monic normalization, stored
/// row-major `d x d`.
fn companion(p: &[C64]) -> Vec<C64> {
    let d = p.len() - 1;
    let lead = p[d];
    let mut h = vec![C64::zero(); d * d];
    for j in 0..d {
        h[j] = -p[d - 1 - j] / lead;
    }
    for i in 1..d {
        h[i * d + i - 1] = C64::new(1.0, 0.0);
    }
    h
}

/// Diagonal similarity scaling by powers of two until the 2-norms of each
/// row and column (diagonal excluded) are comparable.
fn balance(h: &mut [C64], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    for _pass in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j * n + i].norm_sqr();
                    r += h[i * n + j].norm_sqr();
                }
            }
            let (mut c, r) = (c.sqrt(), r.sqrt());
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    h[i * n + j] /= f;
                    h[j * n + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR
/// with Wilkinson shifts and deflation.
fn hessenberg_eigenvalues(h: &mut [C64], n: usize) -> Result<Vec<C64>> {
    let idx = |i: usize, j: usize| i * n + j;
    let mut out = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0;
    while hi > 0 {
        if hi == 1 {
            out.push(h[idx(0, 0)]);
            break;
        }
        // find active block [l, hi)
        let mut l = hi - 1;
        while l > 0 {
            let s = h[idx(l - 1, l - 1)].norm() + h[idx(l, l)].norm();
            if h[idx(l, l - 1)].norm() <= f64::EPSILON * s.max(TOL_FLOOR) {
                h[idx(l, l - 1)] = C64::zero();
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            out.push(h[idx(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 200 {
            return Err(Error::DidNotConverge { what: "companion QR" });
        }
        let m = hi - 1;
        let a = h[idx(m - 1, m - 1)];
        let b = h[idx(m - 1, m)];
        let c = h[idx(m, m - 1)];
        let d = h[idx(m, m)];
        let mu = if iter % 11 == 10 {
            // exceptional shift
            d + C64::new(h[idx(m, m - 1)].norm(), 0.0) * 0.75
        } else {
            let tr = (a + d) * 0.5;
            let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
            let e1 = tr + disc;
            let e2 = tr - disc;
            if (e1 - d).norm() < (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // QR step on the active block using Givens rotations
        for i in l..hi {
            h[idx(i, i)] -= mu;
        }
        let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - l);
        for k in l..hi - 1 {
            let x = h[idx(k, k)];
            let y = h[idx(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 { (1.0, C64::zero()) } else if x.norm() == 0.0 {
                (0.0, (y / r).conj())
            } else {
                let cs = x.norm() / r;
                let sn = (x / x.norm()) * y.conj() / r;
                (cs, sn)
            };
            // rows k, k+1: G = [[cs, sn], [-conj(sn), cs]]
            for j in k..n {
                let u = h[idx(k, j)];
                let v = h[idx(k + 1, j)];
                h[idx(k, j)] = u * cs + sn * v;
                h[idx(k + 1, j)] = -sn.conj() * u + v * cs;
            }
            rots.push((cs, sn));
        }
        for (r, k) in (l..hi - 1).enumerate() {
            let (cs, sn) = rots[r];
            // columns k, k+1 times G†
            for i in 0..=(k + 1).min(hi - 1) {
                let u = h[idx(i, k)];
                let v = h[idx(i, k + 1)];
                h[idx(i, k)] = u * cs + v * sn.conj();
                h[idx(i, k + 1)] = -u * sn + v * cs;
            }
        }
        for i in l..hi {
            h[idx(i, i)] += mu;
        }
    }
    Ok(out)
}

fn polish(p: &[C64], mut z: C64) -> C64 {
    let scale = |x: C64| p.iter().enumerate().map(|(k, a)| a.norm() * x.norm().powi(k as i32)).sum::<f64>();
    let mut best = z;
    let mut best_res = poly_eval(p, z).norm() / scale(z).max(TOL_FLOOR);
    for _ in 0..6 {
        let f = poly_eval(p, z);
        let df = poly_deriv_eval(p, z);
        if df.norm() == 0.0 {
            break;
        }
        z -= f / df;
        let res = poly_eval(p, z).norm() / scale(z).max(TOL_FLOOR);
        if res < best_res {
            best = z;
            best_res = res;
        } else {
            break;
        }
        if res <= f64::EPSILON {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel_residual(c: &[C64], z: C64) -> f64 {
        let s: f64 = c.iter().enumerate().map(|(k, a)| a.norm() * z.norm().powi(k as i32)).sum();
        poly_eval(c, z).norm() / s
    }

    #[test]
    fn spec_examples() {
        let r = poly_roots(&[re(-1.0), re(0.0), re(1.0)]).unwrap();
        assert_eq!(r.at_infinity, 0);
        let mut xs: Vec<f64> = r.finite.iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + 1.0).abs() < 1e-14 && (xs[1] - 1.0).abs() < 1e-14);

        let r = poly_roots(&[re(0.0), re(0.0), re(1.0)]).unwrap();
        assert_eq!(r.finite, vec![C64::zero(), C64::zero()]);

        // 4λ² - E²λ² with E = 1, padded to degree four
        let r = poly_roots(&[re(0.0), re(0.0), re(3.0), re(0.0), re(0.0)]).unwrap();
        assert_eq!(r.finite, vec![C64::zero(), C64::zero()]);
        assert_eq!(r.at_infinity, 2);

        assert_eq!(poly_roots(&[re(0.0); 3]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn vieta_on_random_quartics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let roots: Vec<C64> = (0..4)
                .map(|_| C64::from_polar(rng.random_range(0.05..5.0), rng.random_range(0.0..6.283)))
                .collect();
            let lead = C64::new(rng.random_range(0.2..2.0), rng.random_range(-1.0..1.0));
            // expand lead * Π (x - r)
            let mut c = vec![lead];
            for &r in &roots {
                let mut next = vec![C64::zero(); c.len() + 1];
                for (k, &a) in c.iter().enumerate() {
                    next[k + 1] += a;
                    next[k] -= a * r;
                }
                c = next;
            }
            let got = poly_roots(&c).unwrap();
            assert_eq!(got.finite.len(), 4);
            let cmax = c.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let sum: C64 = got.finite.iter().sum();
            let prod: C64 = got.finite.iter().product();
            assert!((sum + c[3] / c[4]).norm() <= 1e-8 * (c[3] / c[4]).norm().max(1.0));
            assert!((prod - c[0] / c[4]).norm() <= 1e-8 * (c[0] / c[4]).norm().max(1.0));
            for &z in &got.finite {
                assert!(rel_residual(&c, z) <= 1e-12, "residual");
                assert!(poly_eval(&c, z).norm() <= 1e-8 * cmax * z.norm().max(1.0).powi(4));
            }
        }
    }

    #[test]
    fn deflation_reports_infinity() {
        let r = poly_roots(&[re(1.0), re(-3.0), re(2.0), re(1e-14)]).unwrap();
        assert_eq!(r.at_infinity, 1);
        assert_eq!(r.degree(), 3);
        let mut xs: Vec<f64> = r.finite.iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] - 0.5).abs() < 1e-12 && (xs[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clustered_and_wide_roots() {
        // (x - 1e-3)(x - 1e3)(x^2 + 1)
        let c = [re(1.0), re(-1000.001), re(1.0), re(-1000.001), re(1.0)];
        let r = poly_roots(&c).unwrap();
        assert_eq!(r.finite.len(), 4);
        for z in &r.finite {
            assert!(rel_residual(&c, *z) < 1e-12);
        }
    }
}
