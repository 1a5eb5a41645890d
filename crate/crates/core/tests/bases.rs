use std::f64::consts::PI;

use gaussinv::hermite_complex::{
    analyze_c, dbar_matrix, eval_ito, eval_ito_closed_form, eval_normalized as eps, mixed_matrix, synthesize_c,
    ComplexCoeffs,
};
use gaussinv::hermite_real::{analyze, derivative_matrix, eval_hermite, normalized_table, synthesize, RealCoeffs};
use gaussinv::quadrature::{build_rule_1d, build_rule_2d};
use gaussinv::sampling::{random_complex, random_real, trial_rng};
use num_complex::Complex64;
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

fn binom(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[test]
fn real_gram_is_identity() {
    for n in [0, 5, 20, 40] {
        for q in [n + 1, n + 7] {
            let rule = build_rule_1d(q).unwrap();
            let tables: Vec<Vec<f64>> = rule.nodes().iter().map(|&x| normalized_table(n, x)).collect();
            for i in 0..=n {
                for j in 0..=n {
                    let g: f64 = tables
                        .iter()
                        .zip(rule.weights())
                        .map(|(t, w)| w * t[i] * t[j])
                        .sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-10, "N={n} Q={q} ({i},{j}) {g}");
                }
            }
        }
    }
}

#[test]
fn raw_hermite_norms() {
    // ∫ H_n² e^{-x²} = 2ⁿ n! √π
    let rule = build_rule_1d(30).unwrap();
    for n in 0..=25 {
        let s = rule.integrate_fn(|x| eval_hermite(n, x).unwrap().powi(2));
        let want = 2f64.powi(n as i32) * factorial(n) * PI.sqrt();
        assert!((s / want - 1.0).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn complex_gram_is_identity() {
    let d = 8;
    let rule = build_rule_2d(2 * d + 2).unwrap();
    let idx: Vec<(usize, usize)> = (0..=d).flat_map(|m| (0..=d).map(move |n| (m, n))).collect();
    let tables: Vec<Vec<Complex64>> = rule
        .nodes()
        .iter()
        .map(|&z| gaussinv::hermite_complex::normalized_table(d, d, z))
        .collect();
    for (a, &(m1, n1)) in idx.iter().enumerate() {
        for (b, &(m2, n2)) in idx.iter().enumerate() {
            let g: Complex64 = tables
                .iter()
                .zip(rule.weights())
                .map(|(t, w)| t[a].conj() * t[b] * w)
                .sum();
            let want = if a == b { 1.0 } else { 0.0 };
            assert!((g - want).norm() < 1e-9, "({m1},{n1})·({m2},{n2}) = {g}");
        }
    }
}

#[test]
fn ito_closed_form_matches_recurrence() {
    let pts = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, -0.5),
        Complex64::new(-2.2, 1.7),
        Complex64::new(0.3, 3.9),
        Complex64::from_polar(4.0, 2.0),
    ];
    for m in 0..=20 {
        for n in 0..=20 {
            for &z in &pts {
                let a = eval_ito(m, n, z).unwrap();
                let b = eval_ito_closed_form(m, n, z).unwrap();
                // the alternating sum cannot beat rounding on its largest term
                let terms: f64 = (0..=m.min(n))
                    .map(|j| factorial(j) * binom(m, j) * binom(n, j) * z.norm().powi((m + n - 2 * j) as i32))
                    .sum();
                let scale = a.norm().max(terms);
                assert!((a - b).norm() <= 1e-10 * scale, "m={m} n={n} z={z} {a} {b}");
            }
        }
    }
}

#[test]
fn ito_examples() {
    let z = Complex64::new(0.7, -1.3);
    assert!((eval_ito(0, 1, z).unwrap() - z.conj()).norm() < 1e-15);
    assert!((eval_ito(1, 1, z).unwrap() - (z * z.conj() - 1.0)).norm() < 1e-15);
    assert_eq!(eval_ito(0, 0, z).unwrap(), Complex64::new(1.0, 0.0));
    assert!((eps(1, 1, Complex64::new(0.0, 0.0)) + 1.0 / PI.sqrt()).norm() < 1e-15);
    assert!(eval_ito(61, 0, z).is_err());
}

/// `∂̄ = ½(∂_x + i∂_y)`, `∂ = ½(∂_x - i∂_y)` by centered differences.
fn wirtinger(f: impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> (Complex64, Complex64) {
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let iy = Complex64::new(0.0, h);
    let dy = (f(z + iy) - f(z - iy)) / (2.0 * h);
    let i = Complex64::new(0.0, 1.0);
    ((dx - i * dy) * 0.5, (dx + i * dy) * 0.5)
}

#[test]
fn ito_derivative_identities() {
    let pts = [Complex64::new(0.4, -0.9), Complex64::new(-1.1, 0.2), Complex64::new(0.0, 1.5)];
    for m in 0..=10 {
        for n in 0..=10 {
            for &z in &pts {
                let (d, dbar) = wirtinger(|w| eval_ito(m, n, w).unwrap(), z, 1e-5);
                let want_dbar = if n > 0 { eval_ito(m, n - 1, z).unwrap() * n as f64 } else { Complex64::new(0.0, 0.0) };
                let want_d = if m > 0 { eval_ito(m - 1, n, z).unwrap() * m as f64 } else { Complex64::new(0.0, 0.0) };
                let scale = 1.0 + (factorial(m) * factorial(n)).sqrt();
                assert!((dbar - want_dbar).norm() < 1e-6 * scale, "∂̄ m={m} n={n}");
                assert!((d - want_d).norm() < 1e-6 * scale, "∂ m={m} n={n}");
            }
        }
    }
}

#[test]
fn real_derivative_matches_finite_differences() {
    let rule = build_rule_1d(60).unwrap();
    let d = derivative_matrix(1, 20).unwrap();
    for seed in 0..10 {
        let c = random_real(&mut trial_rng(seed, 0), 20);
        let dc = d.apply(&c).unwrap();
        let h = 1e-5;
        for &x in rule.nodes().iter().filter(|x| x.abs() <= 4.0) {
            let fd = (synthesize(&c, &[x + h])[0] - synthesize(&c, &[x - h])[0]) / (2.0 * h);
            let exact = synthesize(&dc, &[x])[0];
            assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "seed={seed} x={x}");
        }
    }
}

#[test]
fn lowering_floors() {
    for k in 1..=6 {
        let sv = derivative_matrix(k, 30).unwrap().singular_values();
        let floor = (2f64.powi(k as i32) * factorial(k)).sqrt();
        let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((min - floor).abs() < 1e-12 * floor, "k={k}");
        for (j, s) in sv.iter().enumerate() {
            let n = j + k;
            let want = (2f64.powi(k as i32) * factorial(n) / factorial(n - k)).sqrt();
            assert!((s - want).abs() < 1e-12 * want);
        }
    }
    for k in 1..=4 {
        let a = dbar_matrix(k, 12).unwrap().singular_values();
        assert!((a[0] - factorial(k).sqrt()).abs() < 1e-12 * a[0], "k={k}");
        let b = mixed_matrix(k, 12).unwrap().singular_values();
        assert!((b[0] - factorial(k)).abs() < 1e-12 * b[0], "k={k}");
    }
}

#[test]
fn lowering_examples() {
    let d = dbar_matrix(2, 4).unwrap();
    let img = d.apply(&ComplexCoeffs::unit(4, 0, 2)).unwrap();
    assert!((img.get(0, 0) - 2f64.sqrt()).norm() < 1e-15);
    let m = mixed_matrix(1, 4).unwrap();
    let img = m.apply(&ComplexCoeffs::unit(4, 2, 1)).unwrap();
    assert!((img.get(1, 0) - 2f64.sqrt()).norm() < 1e-15);
    let img = m.apply(&ComplexCoeffs::unit(4, 0, 3)).unwrap();
    assert_eq!(img.norm_sq(), 0.0);
}

#[test]
fn analyze_examples_complex() {
    let d = 4;
    let rule = build_rule_2d(2 * d + 2).unwrap();
    let s: Vec<Complex64> = rule.nodes().iter().map(|&z| eps(2, 1, z)).collect();
    let c = analyze_c(&s, &rule, d).unwrap();
    for m in 0..=d {
        for n in 0..=d {
            let want = if (m, n) == (2, 1) { 1.0 } else { 0.0 };
            assert!((c.get(m, n) - want).norm() < 1e-9);
        }
    }
    assert!(analyze_c(&s, &build_rule_2d(9).unwrap(), d).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn real_round_trip(seed in any::<u64>(), n in 0usize..30) {
        let rule = build_rule_1d(n + 1).unwrap();
        let c = random_real(&mut trial_rng(seed, 0), n);
        let back = analyze(&synthesize(&c, rule.nodes()), &rule, n).unwrap();
        for (a, b) in c.as_slice().iter().zip(back.as_slice()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let vals = synthesize(&c, rule.nodes());
        let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
        prop_assert!((rule.integrate(&sq).unwrap() - c.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn complex_round_trip(seed in any::<u64>(), n in 0usize..8) {
        let rule = build_rule_2d(2 * n + 2).unwrap();
        let c = random_complex(&mut trial_rng(seed, 1), n);
        let vals = synthesize_c(&c, rule.nodes());
        let back = analyze_c(&vals, &rule, n).unwrap();
        for (a, b) in c.as_slice().iter().zip(back.as_slice()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
        let sq: f64 = vals.iter().zip(rule.weights()).map(|(v, w)| v.norm_sqr() * w).sum();
        prop_assert!((sq - c.norm_sq()).abs() < 1e-9);
    }

    #[test]
    fn analyze_exact_for_low_degree_polynomials(q in 4usize..30, seed in any::<u64>()) {
        // a polynomial of degree ≤ 2Q-1-N is recovered exactly in its first N+1 modes
        let n = q / 2;
        let p = (2 * q - 1 - n).min(n);
        let c = random_real(&mut trial_rng(seed, 2), p);
        let rule = build_rule_1d(q).unwrap();
        let back = analyze(&synthesize(&c, rule.nodes()), &rule, n).unwrap();
        prop_assert!((back.norm_sq() - c.norm_sq()).abs() < 1e-10);
    }

    #[test]
    fn derivative_composes(k1 in 1usize..4, k2 in 1usize..4, seed in any::<u64>()) {
        let n = 20;
        let c = random_real(&mut trial_rng(seed, 3), n);
        let once = derivative_matrix(k1 + k2, n).unwrap().apply(&c).unwrap();
        let a = derivative_matrix(k1, n).unwrap().apply(&c).unwrap();
        let twice = derivative_matrix(k2, n - k1).unwrap().apply(&a).unwrap();
        for (x, y) in once.as_slice().iter().zip(twice.as_slice()) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + x.abs()));
        }
        let _ = RealCoeffs::zeros(0);
    }
}
