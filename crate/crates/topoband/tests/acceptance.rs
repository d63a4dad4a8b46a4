//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero on any FAIL.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::Instant;
use topoband::par::Rayon;
use topoband_core::bulk::{
    chern_fh, chern_great_circle, chern_north_preimage, km_dirac, w_matrix_at_trim, winding_chiral,
};
use topoband_core::clifford::{dirac_decompose, gamma, traceless_gammas, GammaIndex};
use topoband_core::correspondence::{m_parity, verify, Options};
use topoband_core::edge_invariants::{chiral_zero_count, crossings_vs_band_edge, left_crossings, FiducialLine};
use topoband_core::edge_spectrum::{
    build_strip, check_strip_length, decay_length, default_strip_length, dirac_edge_states, edge_lambda_roots,
    incipience_points_singular, strip_edge_branches, strip_states, Side,
};
use topoband_core::exec::ParMap;
use topoband_core::models::{bhz, qwz, SymClass};
use topoband_core::numerics::{eigvals_hermitian, ComplexMatrix};
use topoband_core::random::{chiral_1d, dirac_2band, singular_2band, stream_seed, tri_dirac_4band};
use topoband_core::Error;

fn rng(seed: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_seed(seed, i))
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn criterion1(exec: &Rayon) -> Outcome {
    let t = Instant::now();
    let results = exec.map_indexed(500, |i| -> Result<(i32, i32), Error> {
        let m = chiral_1d(&mut rng(1, i as u64))?;
        let w = winding_chiral(&m)?.value;
        let (n, xi) = default_strip_length(&m)?;
        check_strip_length(n, xi)?;
        Ok((w, chiral_zero_count(&m, n)?.value))
    });
    let secs = t.elapsed().as_secs_f64();
    let agree = results.iter().filter(|r| matches!(r, Ok((a, b)) if a == b)).count();
    let nonzero = results.iter().filter(|r| matches!(r, Ok((a, _)) if *a != 0)).count();
    let first_bad = results.iter().enumerate().find(|(_, r)| !matches!(r, Ok((a, b)) if a == b));
    let mut detail = format!("{agree}/500 winding = zero-mode count ({nonzero} nontrivial), {secs:.1} s (limit 60 s)");
    if let Some((i, r)) = first_bad {
        detail += &format!("; first mismatch #{i}: {r:?}");
    }
    outcome(agree == 500 && secs < 60.0, detail)
}

fn criterion2(exec: &Rayon) -> Outcome {
    let t = Instant::now();
    let results = exec.map_indexed(100, |i| -> Result<(i32, i32, Option<i32>), Error> {
        let d = dirac_2band(&mut rng(2, i as u64))?;
        let fh = chern_fh(&d.to_bulk(SymClass::A, 1)?, 48)?.value;
        let np = chern_north_preimage(&d, 64, 1e-10)?.value;
        let gc = match chern_great_circle(&d, 721) {
            Ok(r) => Some(r.value),
            Err(Error::TangentCrossing { .. } | Error::DegenerateEllipse { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok((fh, np, gc))
    });
    let secs = t.elapsed().as_secs_f64();
    let mut pre = 0;
    let mut gc_valid = 0;
    let mut gc_agree = 0;
    let mut errors = Vec::new();
    let mut values = [0usize; 3];
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok((fh, np, gc)) => {
                pre += (fh == np) as usize;
                if fh.abs() <= 1 {
                    values[(fh + 1) as usize] += 1;
                }
                if let Some(g) = gc {
                    gc_valid += 1;
                    gc_agree += (g == fh) as usize;
                }
            }
            Err(e) => errors.push(format!("#{i}: {e}")),
        }
    }
    let detail = format!(
        "FHS = preimage {pre}/100, FHS = great-circle {gc_agree}/{gc_valid} transversal, C=-1/0/+1: {}/{}/{}, {secs:.1} s (limit 120 s){}",
        values[0],
        values[1],
        values[2],
        if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
    );
    outcome(pre == 100 && gc_agree == gc_valid && gc_valid > 0 && secs < 120.0, detail)
}

fn criterion3(exec: &Rayon) -> Outcome {
    let c = match chern_fh(&qwz(-1.0), 48) {
        Ok(r) => r.value,
        Err(e) => return outcome(false, format!("oracle failed: {e}")),
    };
    let mut rows = Vec::new();
    let mut ok = c.abs() == 1;
    for (m, expect) in [(-3.0, 0), (-1.0, c), (1.0, -c), (3.0, 0)] {
        let model = qwz(m);
        let bulk = chern_fh(&model, 48).map(|r| r.value);
        let edge = strip_edge_branches(&model, 60, 721, exec)
            .and_then(|s| left_crossings(&s, &FiducialLine::Constant(0.0), model.scale()))
            .map(|c| c.value);
        ok &= bulk == Ok(expect) && edge == Ok(expect);
        rows.push(format!("m={m}: chern {bulk:?} edge {edge:?} expected {expect}"));
    }
    outcome(ok, format!("c = {c}; {}", rows.join("; ")))
}

fn criterion4() -> Outcome {
    let model = qwz(1.0);
    let d = dirac_decompose(&model).expect("QWZ is Dirac");
    let n = 120;
    // candidate k2 with an analytic left-edge state decaying faster than n/10
    let mut cands = Vec::new();
    for j in 0..2000 {
        let k2 = TAU * (j as f64 + 0.5) / 2000.0;
        let es = dirac_edge_states(&d, k2).expect("edge states");
        if !es.exists {
            continue;
        }
        let e = es.energies[0];
        if let Ok(Some(xi)) = decay_length(&d, k2, e) {
            if xi < n as f64 / 10.0 {
                cands.push((k2, e, xi));
            }
        }
    }
    if cands.len() < 50 {
        return outcome(false, format!("only {} admissible k2 points", cands.len()));
    }
    let picks: Vec<_> = (0..50).map(|i| cands[i * cands.len() / 50]).collect();
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for &(k2, e, _) in &picks {
        let (lo, hi) = model.band_edges_at(k2, 64).expect("bands");
        let states = strip_states(&build_strip(&model, n, k2), lo, hi).expect("strip");
        let best = states
            .iter()
            .filter(|s| s.side() == Some(Side::Left))
            .map(|s| (s.energy - e).abs())
            .fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            worst = worst.max(best);
        } else {
            missing += 1;
        }
    }
    let xi_max = picks.iter().map(|p| p.2).fold(0.0, f64::max);
    outcome(
        missing == 0 && worst <= 1e-6,
        format!("50 points (max xi {xi_max:.2}, n = {n}): max |E_strip - tau|b0perp|| = {worst:.2e} (tol 1e-6), {missing} unmatched"),
    )
}

fn criterion5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut with_inf = 0;
    let mut failures = Vec::new();
    for i in 0..200u64 {
        let mut r = rng(5, i);
        // one draw in five uses singular hopping, whose quartic loses both
        // extreme coefficients: roots at 0 paired with roots at infinity
        let d = if i % 5 == 4 {
            singular_2band(&mut r).and_then(|m| dirac_decompose(&m))
        } else {
            dirac_2band(&mut r)
        };
        let d = match d {
            Ok(d) => d,
            Err(e) => {
                failures.push(format!("#{i}: {e}"));
                continue;
            }
        };
        let k2 = r.random_range(0.0..TAU);
        let s = d.scale();
        let e = r.random_range(-s..s);
        let (b0, b) = d.coeffs_at(k2);
        match edge_lambda_roots(&b0, &b, e) {
            Ok(roots) => {
                if roots.at_infinity > 0 {
                    with_inf += 1;
                }
                worst = worst.max(roots.pairing_residual);
            }
            Err(e) => failures.push(format!("#{i}: {e}")),
        }
    }
    outcome(
        failures.is_empty() && worst <= 1e-9 && with_inf > 0,
        format!(
            "200 draws ({with_inf} with roots at infinity): max pairing residual {worst:.2e} (tol 1e-9){}",
            if failures.is_empty() { String::new() } else { format!("; failures: {}", failures.join(", ")) }
        ),
    )
}

fn criterion6(exec: &Rayon) -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for m in [-3.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 3.0] {
        let model = bhz(m);
        let d = dirac_decompose(&model).expect("BHZ is Dirac");
        let km = km_dirac(&d).map(|r| r.value);
        let mp = m_parity(&d, 1024).map(|r| r.value);
        let edge = verify(&model, &Options::default(), exec).map(|r| {
            (r.edge.iter().find(|v| v.method == "edge-kramers-crossings").map(|v| v.value), r.equal)
        });
        let row_ok = km.is_ok() && km == mp && matches!(edge, Ok((Some(e), true)) if Ok(e) == km);
        ok &= row_ok;
        rows.push(format!("m={m}: {:?}/{:?}/{:?}", km.ok(), mp.ok(), edge.as_ref().ok().and_then(|e| e.0)));
    }
    for m in [-2.0, 0.0, 2.0] {
        let r = verify(&bhz(m), &Options::default(), exec);
        let rejected = matches!(r, Err(Error::Gapless { .. }));
        ok &= rejected;
        rows.push(format!("m={m}: {}", if rejected { "Gapless".to_string() } else { format!("{r:?}") }));
    }
    outcome(ok, format!("km_dirac/m_parity/km_edge: {}", rows.join("; ")))
}

/// Every maximal set of mutually anticommuting traceless gammas.
fn anticommuting_sets(n: usize) -> Vec<Vec<GammaIndex>> {
    let all = traceless_gammas(n).expect("gammas");
    let mats: Vec<ComplexMatrix> = all.iter().map(|&g| gamma(g).unwrap()).collect();
    let anti = |i: usize, j: usize| mats[i].anticommutator(&mats[j]).max_abs() < 0.5;
    let size = if n == 2 { 3 } else { 5 };
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((cur, start)) = stack.pop() {
        if cur.len() == size {
            out.push(cur.iter().map(|&i| all[i]).collect());
            continue;
        }
        for i in start..all.len() {
            if cur.iter().all(|&j| anti(i, j)) {
                let mut next = cur.clone();
                next.push(i);
                stack.push((next, i + 1));
            }
        }
    }
    out
}

fn criterion7() -> Outcome {
    let mut sets = anticommuting_sets(2);
    let four = anticommuting_sets(4);
    let n4 = four.len();
    sets.extend(four);
    let mut alg: f64 = 0.0;
    for s in &sets {
        for (a, &ga) in s.iter().enumerate() {
            for (b, &gb) in s.iter().enumerate() {
                let (x, y) = (gamma(ga).unwrap(), gamma(gb).unwrap());
                let mut target = ComplexMatrix::zeros(x.rows(), x.rows());
                if a == b {
                    target = ComplexMatrix::identity(x.rows()).scale_re(2.0);
                }
                alg = alg.max((&x.anticommutator(&y) - &target).max_abs());
            }
        }
    }
    let mut spec: f64 = 0.0;
    let mut evals = 0;
    for i in 0..100u64 {
        let mut r = rng(7, i);
        let d = if i % 2 == 0 { dirac_2band(&mut r) } else { tri_dirac_4band(&mut r) };
        let d = d.expect("random Dirac model");
        for _ in 0..100 {
            let k = [r.random_range(0.0..TAU), r.random_range(0.0..TAU)];
            let h = d.h(k);
            let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
            let ev = eigvals_hermitian(&d.matrix(k)).expect("eigenvalues");
            let half = ev.len() / 2;
            for (j, e) in ev.iter().enumerate() {
                let want = if j < half { -norm } else { norm };
                spec = spec.max((e - want).abs());
            }
            evals += 1;
        }
    }
    outcome(
        alg <= 1e-12 && spec <= 1e-10 && evals == 10_000,
        format!(
            "{} gamma sets (3 Paulis + {n4} four-band): max |{{G_i,G_j}} - 2 delta_ij| = {alg:.1e} (tol 1e-12); {evals} spectra: max |E - (+-|h|)| = {spec:.1e} (tol 1e-10)",
            sets.len()
        ),
    )
}

fn criterion8(exec: &Rayon) -> Outcome {
    let results = exec.map_indexed(100, |i| -> Result<(f64, f64), Error> {
        let d = tri_dirac_4band(&mut rng(8, i as u64))?;
        let m = d.to_bulk(SymClass::AII, 2)?;
        let mut anti: f64 = 0.0;
        let mut pf: f64 = 0.0;
        for k in [[0.0, 0.0], [PI, 0.0], [0.0, PI], [PI, PI]] {
            let w = w_matrix_at_trim(&m, k)?;
            anti = anti.max(w.antisymmetry);
            pf = pf.max((w.pfaffian.norm() - 1.0).abs());
        }
        Ok((anti, pf))
    });
    let mut anti: f64 = 0.0;
    let mut pf: f64 = 0.0;
    let mut errors = Vec::new();
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok((a, p)) => {
                anti = anti.max(*a);
                pf = pf.max(*p);
            }
            Err(e) => errors.push(format!("#{i}: {e}")),
        }
    }
    outcome(
        errors.is_empty() && anti <= 1e-10 && pf <= 1e-8,
        format!(
            "400 TRIM evaluations: max |w + w^T| = {anti:.1e} (tol 1e-10), max ||Pf w| - 1| = {pf:.1e} (tol 1e-8){}",
            if errors.is_empty() { String::new() } else { format!("; errors: {}", errors.join(", ")) }
        ),
    )
}

fn criterion9(exec: &Rayon) -> Outcome {
    let results = exec.map_indexed(25, |i| -> Result<(i32, i32, i32), Error> {
        let m = singular_2band(&mut rng(9, i as u64))?;
        let inc = incipience_points_singular(&m, 64)?.value;
        let (n, xi) = default_strip_length(&m)?;
        check_strip_length(n, xi)?;
        let spec = strip_edge_branches(&m, n, 721, &topoband_core::exec::Sequential)?;
        let be = crossings_vs_band_edge(&m, &spec)?.value;
        Ok((inc, be, chern_fh(&m, 48)?.value))
    });
    let agree = results.iter().filter(|r| matches!(r, Ok((a, b, c)) if a == b && b == c)).count();
    let nonzero = results.iter().filter(|r| matches!(r, Ok((_, _, c)) if *c != 0)).count();
    let bad: Vec<String> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| !matches!(r, Ok((a, b, c)) if a == b && b == c))
        .map(|(i, r)| format!("#{i}: {r:?}"))
        .collect();
    outcome(
        agree == 25,
        format!(
            "{agree}/25 incipience = band-edge crossings = FHS ({nonzero} nontrivial){}",
            if bad.is_empty() { String::new() } else { format!("; mismatches: {}", bad.join(", ")) }
        ),
    )
}

fn main() {
    // `cargo test -- --list` and filters from the harness are ignored
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let exec = Rayon::from_env();
    let checks: [(&str, &dyn Fn() -> Outcome); 9] = [
        ("chiral correspondence sweep", &|| criterion1(&exec)),
        ("Chern three-way agreement", &|| criterion2(&exec)),
        ("QWZ calibration table", &|| criterion3(&exec)),
        ("edge-spectrum cross-validation", &criterion4),
        ("lambda-root pairing", &criterion5),
        ("Kane-Mele correspondence", &|| criterion6(&exec)),
        ("algebra suite", &criterion7),
        ("w-matrix diagnostics", &|| criterion8(&exec)),
        ("singular-hopping route", &|| criterion9(&exec)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failed += !o.pass as usize;
        println!(
            "{} criterion {}: {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
