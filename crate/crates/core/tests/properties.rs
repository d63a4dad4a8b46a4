use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topoband_core::bulk::{chern_fh, chern_great_circle, chern_north_preimage, km_dirac, winding_chiral};
use topoband_core::correspondence::m_parity;
use topoband_core::edge_invariants::{left_crossings, FiducialLine};
use topoband_core::edge_spectrum::{edge_lambda_roots, strip_edge_branches};
use topoband_core::ellipse::{build_frame, eta_zero_counts};
use topoband_core::exec::Sequential;
use topoband_core::models::{bhz, gap_report, qwz, ssh};
use topoband_core::numerics::{eigvals_hermitian, smallest_singular_value, ComplexMatrix};
use topoband_core::random::{dirac_2band, stream_seed, tri_dirac_4band};
use topoband_core::{Error, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_seed(seed, 0))
}

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn coeffs() -> impl Strategy<Value = (Vec<f64>, Vec<C64>)> {
    (prop::collection::vec(-2.0..2.0f64, 3), prop::collection::vec(complex(), 3))
}

/// Edge crossings of a strip spectrum at a constant Fermi level.
fn crossings_at(model: &topoband_core::models::BulkModel, n: usize, levels: &[f64]) -> Vec<(i32, usize)> {
    let spec = strip_edge_branches(model, n, 361, &Sequential).unwrap();
    levels
        .iter()
        .map(|&e| {
            let c = left_crossings(&spec, &FiducialLine::Constant(e), model.scale()).unwrap();
            (c.value, c.unsigned())
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smallest_singular_value_matches_gram_spectrum(
        rows in 2usize..7,
        extra in 0usize..3,
        entries in prop::collection::vec(complex(), 64),
    ) {
        let cols = rows.saturating_sub(extra).max(1);
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j]);
        let gram = &m.adjoint() * &m;
        let lam = eigvals_hermitian(&gram).unwrap()[0].max(0.0);
        let s = smallest_singular_value(&m).unwrap();
        let scale = gram.max_abs().max(1.0);
        prop_assert!((s * s - lam).abs() <= 1e-10 * scale, "sigma^2 {} vs {}", s * s, lam);
    }

    #[test]
    fn lambda_roots_pair_under_inversion((b0, b) in coeffs(), e in -3.0..3.0f64) {
        let r = edge_lambda_roots(&b0, &b, e).unwrap();
        // pairs on or near the unit circle are ill-conditioned
        prop_assume!(r.roots.iter().all(|z| (z.norm() - 1.0).abs() > 1e-3));
        prop_assert!(r.pairing_residual <= 1e-9, "residual {}", r.pairing_residual);
        prop_assert_eq!(r.roots.len() + r.at_infinity, 4);
    }

    #[test]
    fn enclosure_iff_one_eta_has_both_zeros((b0, b) in coeffs()) {
        let f = build_frame(&b0, &b).unwrap();
        prop_assume!(!f.segment);
        let mu = f.enclosure_measure().unwrap();
        prop_assume!((mu - 1.0).abs() > 1e-3);
        let [p, m] = eta_zero_counts(&f, &b0, &b);
        prop_assert_eq!((p == 2) != (m == 2), f.encloses_origin().unwrap());
    }

    #[test]
    fn ssh_winding_is_scale_invariant(v in 0.05..3.0f64, w in 0.05..3.0f64, c in 0.1..10.0f64) {
        prop_assume!((v - w).abs() > 0.05);
        let a = winding_chiral(&ssh(v, w)).unwrap().value;
        let b = winding_chiral(&ssh(c * v, c * w)).unwrap().value;
        prop_assert_eq!(a, if w > v { -1 } else { 0 });
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chern_methods_agree(seed in any::<u64>()) {
        let d = dirac_2band(&mut rng(seed)).unwrap();
        let m = d.to_bulk(topoband_core::models::SymClass::A, 1).unwrap();
        let fh = chern_fh(&m, 48).unwrap().value;
        prop_assert_eq!(chern_north_preimage(&d, 64, 1e-10).unwrap().value, fh);
        match chern_great_circle(&d, 64) {
            Ok(r) => prop_assert_eq!(r.value, fh),
            Err(Error::TangentCrossing { .. } | Error::DegenerateEllipse { .. }) => {}
            Err(e) => prop_assert!(false, "great circle: {e}"),
        }
    }

    #[test]
    fn parity_count_equals_kane_mele(seed in any::<u64>()) {
        let d = tri_dirac_4band(&mut rng(seed)).unwrap();
        prop_assert_eq!(m_parity(&d, 1024).unwrap().value, km_dirac(&d).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn chern_edge_index_is_fiducial_independent(m in 0.3..1.7f64, neg in any::<bool>(), t in 0.1..0.8f64) {
        let m = if neg { -m } else { m };
        let model = qwz(m);
        let g = gap_report(&model, 48).unwrap();
        let half = 0.5 * (g.upper_min - g.lower_max);
        let levels = [g.center - t * half, g.center + t * half];
        let got = crossings_at(&model, 60, &levels);
        prop_assert_eq!(got[0].0, got[1].0);
        prop_assert_eq!(got[0].0, chern_fh(&model, 48).unwrap().value);
    }

    #[test]
    fn kramers_crossings_come_in_pairs(m in 0.3..1.7f64, t in 0.05..0.8f64, above in any::<bool>()) {
        // offset the level off E = 0, where the Kramers pair touches
        let model = bhz(m);
        let g = gap_report(&model, 48).unwrap();
        let level = g.center + t * 0.5 * (g.upper_min - g.lower_max) * if above { 1.0 } else { -1.0 };
        let got = crossings_at(&model, 60, &[level]);
        prop_assert_eq!(got[0].1 % 2, 0);
        prop_assert_eq!(got[0].0, 0);
    }
}
