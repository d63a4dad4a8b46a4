//! Geometry of `h(k₁) = b⁰ + 2bʳ cos k₁ + 2bⁱ sin k₁` at fixed `k₂`: an
//! ellipse in the plane of `bʳ = Re b`, `bⁱ = Im b`, offset by `b⁰`.

#[allow(unused_imports)]
use num_traits::Float;
use crate::numerics::{sign, TOL_FLOOR};
use crate::{Error, Result, C64};
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[derive(Clone, Debug, PartialEq)]
pub struct EllipseFrame {
    pub e_r: Vec<f64>,
    /// Undefined for segments.
    pub e_i: Option<Vec<f64>>,
    /// `ê^i`, flipped for three components when `τ = -1`.
    pub e_v: Option<Vec<f64>>,
    /// Unit `b⁰⊥`; undefined when `b⁰⊥` vanishes.
    pub e_perp: Option<Vec<f64>>,
    pub b0_par: Vec<f64>,
    pub b0_perp: Vec<f64>,
    pub b0_perp_norm: f64,
    /// `(ê^r × ê^i)·ê^⊥` for three components, otherwise 0.
    pub tau: i32,
    pub segment: bool,
    /// `Σ bⱼ² ≈ 0`: the quartic loses its outer coefficients.
    pub circle: bool,
    /// `bʳ ≈ 0`, so `ê^r` was taken along `bⁱ`.
    pub swapped: bool,
    /// `bʳ`, `bⁱ` and `b⁰∥` in the `(ê^r, ê^i)` coordinates.
    pub br_plane: [f64; 2],
    pub bi_plane: [f64; 2],
    pub c_plane: [f64; 2],
    pub scale: f64,
}

fn dotr(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normr(a: &[f64]) -> f64 {
    dotr(a, a).sqrt()
}

fn unit(a: &[f64]) -> Vec<f64> {
    let n = normr(a);
    a.iter().map(|x| x / n).collect()
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn build_frame(b0: &[f64], b: &[C64]) -> Result<EllipseFrame> {
    let m = b0.len();
    if b.len() != m || m == 0 {
        return Err(Error::ShapeMismatch { what: "b0 and b lengths" });
    }
    let br: Vec<f64> = b.iter().map(|z| z.re).collect();
    let bi: Vec<f64> = b.iter().map(|z| z.im).collect();
    let bnorm = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = (normr(b0) + 2.0 * bnorm).max(TOL_FLOOR);
    if bnorm < 1e-12 * scale {
        return Err(Error::ZeroHopping);
    }
    let (nr, ni) = (normr(&br), normr(&bi));
    let gram = nr * nr * ni * ni - dotr(&br, &bi).powi(2);
    let segment = gram < 1e-12 * bnorm.powi(4);
    let bsq: C64 = b.iter().map(|z| z * z).sum();
    let circle = bsq.norm() < 1e-12 * bnorm * bnorm;
    let swapped = nr < 1e-12 * bnorm;
    let e_r = if swapped { unit(&bi) } else { unit(&br) };
    let e_i = if segment {
        None
    } else {
        let p = dotr(&bi, &e_r);
        let w: Vec<f64> = bi.iter().zip(&e_r).map(|(x, e)| x - p * e).collect();
        Some(unit(&w))
    };
    let mut b0_par: Vec<f64> = e_r.iter().map(|e| dotr(b0, &e_r) * e).collect();
    if let Some(ei) = &e_i {
        let p = dotr(b0, ei);
        for (x, e) in b0_par.iter_mut().zip(ei) {
            *x += p * e;
        }
    }
    let b0_perp: Vec<f64> = b0.iter().zip(&b0_par).map(|(x, y)| x - y).collect();
    let b0_perp_norm = normr(&b0_perp);
    let e_perp = if b0_perp_norm > 1e-12 * scale { Some(unit(&b0_perp)) } else { None };
    let tau = match (&e_i, &e_perp) {
        (Some(ei), Some(ep)) if m == 3 && !swapped => sign(dotr(&cross(&e_r, ei), ep)),
        _ => 0,
    };
    let e_v = e_i.as_ref().map(|ei| if tau == -1 { ei.iter().map(|x| -x).collect() } else { ei.clone() });
    let coords = |v: &[f64]| [dotr(v, &e_r), e_i.as_ref().map_or(0.0, |ei| dotr(v, ei))];
    Ok(EllipseFrame {
        br_plane: coords(&br),
        bi_plane: coords(&bi),
        c_plane: coords(b0),
        e_r,
        e_i,
        e_v,
        e_perp,
        b0_par,
        b0_perp,
        b0_perp_norm,
        tau,
        segment,
        circle,
        swapped,
        scale,
    })
}

impl EllipseFrame {
    /// `|u|²` where `2 [bʳ bⁱ] u = -b⁰∥` in plane coordinates; the origin
    /// is enclosed iff this is below 1.
    pub fn enclosure_measure(&self) -> Result<f64> {
        if self.segment {
            return Err(Error::DegenerateEllipse { k2: f64::NAN });
        }
        let [r1, r2] = self.br_plane;
        let [i1, i2] = self.bi_plane;
        let [c1, c2] = self.c_plane;
        let det = 2.0 * (r1 * i2 - r2 * i1);
        let u1 = (-c1 * i2 + c2 * i1) / det;
        let u2 = (-r1 * c2 + r2 * c1) / det;
        Ok(u1 * u1 + u2 * u2)
    }

    pub fn encloses_origin(&self) -> Result<bool> {
        Ok(self.enclosure_measure()? < 1.0)
    }

    /// Sense of rotation of `h∥(k₁)` in the first two components (for
    /// two-component models): +1 counterclockwise.
    pub fn planar_orientation(b: &[C64]) -> i32 {
        if b.len() < 2 {
            return 0;
        }
        sign(b[0].re * b[1].im - b[1].re * b[0].im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaPair {
    pub plus: C64,
    pub minus: C64,
}

/// `ηⱼ(λ) = b⁰ⱼ + bⱼ/λ + conj(bⱼ) λ`.
pub fn eta_components(b0: &[f64], b: &[C64], lambda: C64) -> Result<Vec<C64>> {
    if lambda.norm() == 0.0 {
        return Err(Error::LambdaZero);
    }
    let inv = lambda.inv();
    Ok(b0.iter().zip(b).map(|(&x, &y)| x + y * inv + y.conj() * lambda).collect())
}

fn project(eta: &[C64], e: &[f64]) -> C64 {
    eta.iter().zip(e).map(|(z, x)| z * x).sum()
}

/// `η^± = η^r ∓ i η^v`.
pub fn eta_pm(frame: &EllipseFrame, b0: &[f64], b: &[C64], lambda: C64) -> Result<EtaPair> {
    let eta = eta_components(b0, b, lambda)?;
    let er = project(&eta, &frame.e_r);
    let ev = frame.e_v.as_ref().map_or(C64::new(0.0, 0.0), |e| project(&eta, e));
    let i = C64::new(0.0, 1.0);
    Ok(EtaPair { plus: er - i * ev, minus: er + i * ev })
}

/// Coefficients of the quadratics `λ η^±(λ)`, ascending.
pub fn eta_pm_polys(frame: &EllipseFrame, b0: &[f64], b: &[C64]) -> [[C64; 3]; 2] {
    let zero = C64::new(0.0, 0.0);
    let ev = frame.e_v.clone().unwrap_or_else(|| alloc::vec![0.0; b0.len()]);
    let i = C64::new(0.0, 1.0);
    let mut out = [[zero; 3]; 2];
    for (s, poly) in [1.0, -1.0].into_iter().zip(out.iter_mut()) {
        for j in 0..b0.len() {
            let w = C64::new(frame.e_r[j], 0.0) - i * s * ev[j];
            poly[0] += b[j] * w;
            poly[1] += w * b0[j];
            poly[2] += b[j].conj() * w;
        }
    }
    out
}

/// Zeros of `λ η^±(λ)` inside the unit circle, by the winding of each
/// quadratic over a 1024-point circle.
pub fn eta_zero_counts(frame: &EllipseFrame, b0: &[f64], b: &[C64]) -> [usize; 2] {
    let polys = eta_pm_polys(frame, b0, b);
    let pts = 1024;
    let mut out = [0; 2];
    for (slot, p) in out.iter_mut().zip(&polys) {
        let eval = |t: f64| {
            let z = C64::from_polar(1.0, t);
            p[0] + z * (p[1] + z * p[2])
        };
        let mut total = 0.0;
        let mut prev = eval(0.0);
        for s in 1..=pts {
            let cur = eval(TAU * s as f64 / pts as f64);
            total += (cur / prev).arg();
            prev = cur;
        }
        *slot = (total / TAU).round().max(0.0) as usize;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn frame_for_qwz_like_coefficients() {
        // b = (1/2, -i/2, 0): bⁱ points along -e₂, so ê^i = -e₂ and τ = -1
        let f = build_frame(&[0.0, 0.0, 1.0], &[c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.0)]).unwrap();
        assert_eq!(f.e_r, [1.0, 0.0, 0.0]);
        assert_eq!(f.e_i.clone().unwrap(), [0.0, -1.0, 0.0]);
        assert_eq!(f.e_perp.clone().unwrap(), [0.0, 0.0, 1.0]);
        assert!((f.b0_perp_norm - 1.0).abs() < 1e-15);
        assert_eq!(f.tau, -1);
        assert_eq!(f.e_v.unwrap(), [0.0, 1.0, 0.0]);
        // with bⁱ along +e₂ the orientation flips
        let g = build_frame(&[0.0, 0.0, 1.0], &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.0)]).unwrap();
        assert_eq!(g.tau, 1);
        assert!(g.circle && f.circle);
    }

    #[test]
    fn segment_and_zero_hopping() {
        let f = build_frame(&[0.0; 3], &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(f.segment && f.tau == 0);
        let g = build_frame(&[0.0, 1.0, 0.0], &[c(0.3, 0.0), c(0.0, 0.0), c(0.4, 0.0)]).unwrap();
        assert!(g.segment && g.tau == 0);
        assert!(matches!(g.encloses_origin(), Err(Error::DegenerateEllipse { .. })));
        assert_eq!(build_frame(&[1.0, 0.0, 0.0], &[c(0.0, 0.0); 3]), Err(Error::ZeroHopping));
    }

    #[test]
    fn enclosure_examples() {
        let b = [c(0.3, 0.1), c(-0.2, 0.4), c(0.1, 0.0)];
        assert!(build_frame(&[0.0; 3], &b).unwrap().encloses_origin().unwrap());
        let bn: f64 = b.iter().map(|z| z.norm()).sum();
        let far = [3.0 * bn, 0.0, 0.0];
        let f = build_frame(&far, &b).unwrap();
        assert!(!f.encloses_origin().unwrap());
        // QWZ m = 1 at k₂ = 3π/4: b = (i/2, 0, 1/2), b⁰ = (0, sin k₂, 1 + cos k₂)
        let k2 = 0.75 * core::f64::consts::PI;
        let f = build_frame(&[0.0, f64::sin(k2), 1.0 + f64::cos(k2)], &[c(0.0, 0.5), c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let center = 1.0 + f64::cos(k2);
        assert_eq!(f.encloses_origin().unwrap(), center.abs() < 1.0);
        assert!(f.encloses_origin().unwrap());
    }

    fn point_in_ellipse_brute(f: &EllipseFrame) -> bool {
        // winding of the sampled planar curve around the origin
        let n = 4096;
        let p = |t: f64| {
            let x = f.c_plane[0] + 2.0 * (f.br_plane[0] * f64::cos(t) + f.bi_plane[0] * f64::sin(t));
            let y = f.c_plane[1] + 2.0 * (f.br_plane[1] * f64::cos(t) + f.bi_plane[1] * f64::sin(t));
            f64::atan2(y, x)
        };
        let mut total = 0.0;
        let mut prev = p(0.0);
        for s in 1..=n {
            let cur = p(TAU * s as f64 / n as f64);
            let mut d = cur - prev;
            if d > core::f64::consts::PI {
                d -= TAU;
            }
            if d < -core::f64::consts::PI {
                d += TAU;
            }
            total += d;
            prev = cur;
        }
        (total / TAU).round() != 0.0
    }

    fn random_coeffs(rng: &mut ChaCha8Rng, m: usize) -> (Vec<f64>, Vec<C64>) {
        let b0 = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b = (0..m).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        (b0, b)
    }

    #[test]
    fn random_frames_decompose_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = [2, 3, 5][rng.random_range(0..3)];
            let (b0, b) = random_coeffs(&mut rng, m);
            let f = build_frame(&b0, &b).unwrap();
            if let Some(ep) = &f.e_perp {
                assert!(dotr(&f.b0_par, ep).abs() < 1e-12);
            }
            let lhs = dotr(&f.b0_par, &f.b0_par) + f.b0_perp_norm.powi(2);
            assert!((lhs - dotr(&b0, &b0)).abs() < 1e-10);
            for (j, x) in b0.iter().enumerate() {
                assert!((f.b0_par[j] + f.b0_perp[j] - x).abs() < 1e-15);
            }
            let ei = f.e_i.clone().unwrap();
            assert!(dotr(&f.e_r, &ei).abs() < 1e-10);
            if let Ok(enc) = f.encloses_origin() {
                if (f.enclosure_measure().unwrap() - 1.0).abs() > 1e-6 {
                    assert_eq!(enc, point_in_ellipse_brute(&f));
                }
            }
        }
    }

    #[test]
    fn enclosure_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..300 {
            let (b0, b) = random_coeffs(&mut rng, 3);
            // random rotation from three Givens factors
            let mut q = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            for (p, r) in [(0, 1), (1, 2), (0, 2)] {
                let t: f64 = rng.random_range(0.0..TAU);
                let (s, co) = t.sin_cos();
                for row in q.iter_mut() {
                    let (x, y) = (row[p], row[r]);
                    row[p] = co * x - s * y;
                    row[r] = s * x + co * y;
                }
            }
            let rot0: Vec<f64> = (0..3).map(|i| (0..3).map(|j| q[i][j] * b0[j]).sum()).collect();
            let rotb: Vec<C64> = (0..3).map(|i| (0..3).map(|j| b[j] * q[i][j]).sum()).collect();
            let f = build_frame(&b0, &b).unwrap();
            let g = build_frame(&rot0, &rotb).unwrap();
            let (x, y) = (f.enclosure_measure().unwrap(), g.enclosure_measure().unwrap());
            assert!((x - y).abs() < 1e-10 * x.max(1.0));
            let det = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) - q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0])
                + q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
            assert!(det > 0.0);
            assert_eq!(f.tau, g.tau);
        }
    }

    #[test]
    fn eta_for_centered_circle() {
        let b0 = [0.0; 3];
        let b = [c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)];
        let f = build_frame(&b0, &b).unwrap();
        for lam in [c(0.3, 0.2), c(-1.5, 0.7), c(0.0, 2.0)] {
            let e = eta_pm(&f, &b0, &b, lam).unwrap();
            assert!((e.plus - c(2.0, 0.0) / lam).norm() < 1e-14);
            assert!((e.minus - lam * 2.0).norm() < 1e-14);
        }
        assert_eq!(eta_pm(&f, &b0, &b, c(0.0, 0.0)), Err(Error::LambdaZero));
    }

    #[test]
    fn eta_matches_h_on_unit_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let (b0, b) = random_coeffs(&mut rng, 3);
            let f = build_frame(&b0, &b).unwrap();
            let ev = f.e_v.clone().unwrap();
            for k in [0.0, 0.4, 2.0, 5.1] {
                let lam = C64::from_polar(1.0, k);
                let h: Vec<f64> = b0.iter().zip(&b).map(|(x, y)| x + 2.0 * (y * C64::from_polar(1.0, -k)).re).collect();
                let e = eta_pm(&f, &b0, &b, lam).unwrap();
                let (hr, hv) = (dotr(&h, &f.e_r), dotr(&h, &ev));
                assert!((e.plus - c(hr, -hv)).norm() < 1e-12);
                assert!((e.minus - e.plus.conj()).norm() < 1e-12);
                let hh = dotr(&h, &h);
                assert!(((e.plus * e.minus).re - (hh - f.b0_perp_norm.powi(2))).abs() < 1e-10);
            }
            let at_one = eta_pm(&f, &b0, &b, c(1.0, 0.0)).unwrap();
            let h0: Vec<f64> = b0.iter().zip(&b).map(|(x, y)| x + 2.0 * y.re).collect();
            assert!((at_one.plus.re - dotr(&h0, &f.e_r)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_counts_decide_enclosure() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..500 {
            let (b0, b) = random_coeffs(&mut rng, 3);
            let f = build_frame(&b0, &b).unwrap();
            let mu = f.enclosure_measure().unwrap();
            if (mu - 1.0).abs() < 1e-3 {
                continue;
            }
            let [p, m] = eta_zero_counts(&f, &b0, &b);
            let exactly_one = (p == 2) != (m == 2);
            assert_eq!(exactly_one, mu < 1.0, "counts {p} {m} measure {mu}");
        }
    }
}
