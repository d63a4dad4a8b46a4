#[allow(unused_imports)]
use num_traits::Float;
use super::{ComplexMatrix, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.col(j)
    }
}

const JACOBI_MAX_DIM: usize = 8;

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch { what: "eigensolver needs a square matrix" });
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-10 * m.max_abs().max(TOL_FLOOR) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    check_hermitian(m)?;
    if m.rows() <= JACOBI_MAX_DIM {
        jacobi(m)
    } else {
        householder_ql(m, true)
    }
}

pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    if m.rows() <= JACOBI_MAX_DIM {
        Ok(jacobi(m)?.values)
    } else {
        Ok(householder_ql(m, false)?.values)
    }
}

fn sorted(values: Vec<f64>, vectors: ComplexMatrix) -> Eigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let vals = order.iter().map(|&i| values[i]).collect();
    let vecs = if vectors.cols() == n {
        ComplexMatrix::from_fn(vectors.rows(), n, |i, j| vectors[(i, order[j])])
    } else {
        vectors
    };
    Eigen { values: vals, vectors: vecs }
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of `a_pq`
/// and then applies the real symmetric rotation.
fn jacobi(m: &ComplexMatrix) -> Result<Eigen> {
    let n = m.rows();
    let mut a = m.clone();
    for i in 0..n {
        for j in 0..i {
            // symmetrize so later updates stay exactly Hermitian
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm_fro().max(TOL_FLOOR);
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-16 * scale {
            let values = (0..n).map(|i| a[(i, i)].re).collect();
            return Ok(sorted(values, v));
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // phase d_q = e^{-i arg a_pq}
                let dq = (apq / r).conj();
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    let sg = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sg / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // columns: A <- A J, with J_pp=c, J_pq=s, J_qp=-s d_q, J_qq=c d_q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * dq * s;
                    a[(k, q)] = akp * s + akq * dq * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * dq * s;
                    v[(k, q)] = vkp * s + vkq * dq * c;
                }
                // rows: A <- J† A
                let dqc = dq.conj();
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * dqc * s;
                    a[(q, k)] = apk * s + aqk * dqc * c;
                }
                a[(p, q)] = C64::zero();
                a[(q, p)] = C64::zero();
                a[(p, p)] = C64::new(app - t * r, 0.0);
                a[(q, q)] = C64::new(aqq + t * r, 0.0);
            }
        }
    }
    Err(Error::DidNotConverge { what: "Jacobi eigensolver" })
}

/// Householder reduction to Hermitian tridiagonal form, a diagonal phase
/// transform to a real symmetric tridiagonal, then implicit QL.
fn householder_ql(m: &ComplexMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = m.rows();
    let mut a = m.clone();
    let mut q = if want_vectors { ComplexMatrix::identity(n) } else { ComplexMatrix::zeros(0, 0) };
    let mut v = vec![C64::zero(); n];
    let mut p = vec![C64::zero(); n];
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in 0..n {
            v[i] = C64::zero();
        }
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vn = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for i in k + 1..n {
            v[i] /= vn;
        }
        // H = I - 2 v v†, A <- H A H on rows/cols k..n
        // p = A v
        for i in k..n {
            let mut s = C64::zero();
            for j in k + 1..n {
                s += a[(i, j)] * v[j];
            }
            p[i] = s;
        }
        let kk: C64 = (k + 1..n).map(|i| v[i].conj() * p[i]).sum();
        // w = p - K v ; A <- A - 2 v w† - 2 w v†
        for i in k..n {
            p[i] -= kk * v[i];
        }
        for i in k..n {
            for j in k..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                a[(i, j)] -= upd * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = C64::zero();
            a[(k, i)] = C64::zero();
        }
        if want_vectors {
            // Q <- Q H
            for r in 0..n {
                let s: C64 = (k + 1..n).map(|j| q[(r, j)] * v[j]).sum();
                for j in k + 1..n {
                    let vj = v[j].conj();
                    q[(r, j)] -= s * vj * 2.0;
                }
            }
        }
    }
    // real symmetric tridiagonal via D† T D with d_{k+1} = d_k phase(T_{k+1,k})
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut phases = vec![C64::new(1.0, 0.0); n];
    for k in 0..n {
        d[k] = a[(k, k)].re;
        if k + 1 < n {
            let t = a[(k + 1, k)];
            let r = t.norm();
            e[k] = r;
            phases[k + 1] = if r > 0.0 { phases[k] * (t / r) } else { phases[k] };
        }
    }
    let mut z = if want_vectors { vec![0.0; n * n] } else { Vec::new() };
    if want_vectors {
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
    }
    tql2(&mut d, &mut e, &mut z, n, want_vectors)?;
    if !want_vectors {
        let mut vals = d;
        vals.sort_by(|x, y| x.total_cmp(y));
        return Ok(Eigen { values: vals, vectors: ComplexMatrix::zeros(0, 0) });
    }
    // eigenvectors of A: Q D Z; z is stored transposed (row = eigenvector)
    let mut qd = q;
    for r in 0..n {
        for j in 0..n {
            qd[(r, j)] *= phases[j];
        }
    }
    let mut vecs = ComplexMatrix::zeros(n, n);
    for col in 0..n {
        let zc = &z[col * n..(col + 1) * n];
        for r in 0..n {
            let mut s = C64::zero();
            let row = qd.row(r);
            for j in 0..n {
                s += row[j] * zc[j];
            }
            vecs[(r, col)] = s;
        }
    }
    Ok(sorted(d, vecs))
}

/// Implicit QL on a real symmetric tridiagonal matrix with diagonal `d` and
/// subdiagonal `e` (`e[i]` couples `i` and `i+1`, `e[n-1]` unused).
/// `z` holds eigenvector rows and is rotated along.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize, vectors: bool) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::DidNotConverge { what: "tridiagonal QL" });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if vectors {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for k in 0..n {
                        let f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in 0..i {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn check(m: &ComplexMatrix) {
        let e = eig_hermitian(m).unwrap();
        let n = m.rows();
        let norm = m.norm_fro();
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let mut recon = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let vj = e.vector(j);
            let mv = m.matvec(&vj);
            let res: f64 = mv.iter().zip(&vj).map(|(a, b)| (a - b * e.values[j]).norm_sqr()).sum::<f64>().sqrt();
            assert!(res <= 1e-10 * norm, "residual {res} at dim {n}");
            for r in 0..n {
                for c in 0..n {
                    recon[(r, c)] += vj[r] * vj[c].conj() * e.values[j];
                }
            }
        }
        assert!((&recon - m).norm_fro() <= 1e-9 * norm);
        let g = &e.vectors.adjoint() * &e.vectors;
        assert!((&g - &ComplexMatrix::identity(n)).max_abs() <= 1e-10);
    }

    #[test]
    fn spec_examples() {
        let e = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = eig_hermitian(&ComplexMatrix::diag(&[1.0, -1.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        // h = (1, 2, 2): h1 σ1 + h2 σ2 + h3 σ3
        let i = C64::i();
        let one = C64::new(1.0, 0.0);
        let m = ComplexMatrix::from_rows(&[&[one * 2.0, one - i * 2.0], &[one + i * 2.0, -one * 2.0]]);
        let e = eig_hermitian(&m).unwrap();
        assert!((e.values[0] + 3.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn not_hermitian_rejected() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn reconstruction_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(dim, count) in &[(2, 300), (4, 300), (8, 250), (64, 140), (400, 10)] {
            for _ in 0..count {
                check(&random_hermitian(dim, &mut rng));
            }
        }
    }

    #[test]
    fn degenerate_and_diagonal_inputs() {
        check(&ComplexMatrix::identity(20));
        check(&ComplexMatrix::diag(&(0..30).map(|i| (i % 3) as f64).collect::<Vec<_>>()));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(12, &mut rng);
        // block copy: exact twofold degeneracy
        check(&a.kron(&ComplexMatrix::identity(2)));
    }

    #[test]
    fn eigenvalues_only_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(33, &mut rng);
        let a = eigvals_hermitian(&m).unwrap();
        let b = eig_hermitian(&m).unwrap().values;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
