use gaussinv::hermite_complex::ComplexCoeffs;
use gaussinv::hermite_real::RealCoeffs;
use gaussinv::operator::{
    apply, build_right_inverse, commutator_certificate, estimate_op_norm, solve_min_norm, Coeffs, Family,
    OperatorSpec, BOUND_SLACK, EQUALITY_TOL,
};
use gaussinv::sampling::{random_complex, random_real, trial_rng};
use num_complex::Complex64;
use proptest::prelude::*;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Unit-α constant computed from the shift weights at the chain head.
fn floor_constant(family: Family) -> f64 {
    let k = family.order();
    match family {
        Family::RealLaplacian | Family::RealDeriv(_) => 1.0 / (2f64.powi(k as i32) * factorial(k)),
        Family::AntiHolo(_) => 1.0 / factorial(k),
        Family::MixedDiag(_) => 1.0 / factorial(k).powi(2),
    }
}

fn unit_input(family: Family) -> Coeffs {
    if family.is_complex() {
        ComplexCoeffs::unit(0, 0, 0).into()
    } else {
        RealCoeffs::unit(0, 0).into()
    }
}

fn families() -> Vec<Family> {
    let mut out = vec![Family::RealLaplacian];
    out.extend((1..=4).map(Family::RealDeriv));
    out.extend((1..=4).map(Family::AntiHolo));
    out.extend((1..=4).map(Family::MixedDiag));
    out
}

fn random_input(family: Family, seed: u64, stream: u64, band: usize) -> Coeffs {
    let mut rng = trial_rng(seed, stream);
    if family.is_complex() {
        random_complex(&mut rng, band).into()
    } else {
        random_real(&mut rng, band).into()
    }
}

#[test]
fn equality_pins_at_unit_alpha() {
    let cases: Vec<Family> = std::iter::once(Family::RealLaplacian)
        .chain((1..=6).map(Family::RealDeriv))
        .chain((1..=4).map(Family::AntiHolo))
        .chain((1..=4).map(Family::MixedDiag))
        .collect();
    for family in cases {
        let spec = OperatorSpec::real(family, 1.0, 0.0).unwrap();
        let degree = if family.is_complex() { 12 } else { 24 };
        let r = solve_min_norm(&spec, &unit_input(family), degree).unwrap();
        let ratio = r.ratio_sq.unwrap();
        assert!((ratio - floor_constant(family)).abs() <= EQUALITY_TOL, "{family:?}");
        assert!((ratio - r.bound_sq).abs() <= EQUALITY_TOL, "{family:?}");
    }
}

#[test]
fn laplacian_is_second_derivative() {
    let f = random_input(Family::RealDeriv(2), 5, 0, 10);
    let a = solve_min_norm(&OperatorSpec::real(Family::RealLaplacian, 1.3, -0.7).unwrap(), &f, 30).unwrap();
    let b = solve_min_norm(&OperatorSpec::real(Family::RealDeriv(2), 1.3, -0.7).unwrap(), &f, 30).unwrap();
    assert_eq!(a.solution, b.solution);
}

#[test]
fn commutator_identity_all_families() {
    for family in families() {
        for (alpha, c) in [
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            (Complex64::new(2.5, 0.0), Complex64::new(-3.0, 0.0)),
        ] {
            let spec = OperatorSpec::new(family, alpha, c).unwrap();
            let degree = if family.is_complex() { 10 } else { 40 };
            let cert = commutator_certificate(&spec, degree).unwrap();
            assert!(cert.max_rel_error <= 1e-10, "{family:?} {}", cert.max_rel_error);
            assert!(cert.min_d >= 1.0 / floor_constant(family) * (1.0 - 1e-14), "{family:?}");
        }
    }
    let spec = OperatorSpec::new(Family::AntiHolo(2), Complex64::new(0.6, -1.2), Complex64::new(2.0, 1.0)).unwrap();
    assert!(commutator_certificate(&spec, 9).unwrap().holds(1e-10));
}

#[test]
fn diagonal_operator_norms() {
    for family in families() {
        let spec = OperatorSpec::real(family, 1.0, 0.0).unwrap();
        let degree = if family.is_complex() { 12 } else { 40 };
        let t = build_right_inverse(&spec, degree).unwrap();
        let est = estimate_op_norm(&t, degree - 4 * family.order().min(2), 5, 9).unwrap();
        let want = floor_constant(family).sqrt();
        assert!((est.exact - want).abs() <= 1e-10, "{family:?}");
        assert!(est.candidates[0].satisfied);
    }
}

#[test]
fn right_inverse_matches_solve() {
    let spec = OperatorSpec::new(Family::MixedDiag(2), Complex64::new(1.0, 1.0), Complex64::new(0.5, -2.0)).unwrap();
    let t = build_right_inverse(&spec, 14).unwrap();
    let f = random_input(spec.family(), 1, 0, 6);
    let direct = solve_min_norm(&spec, &f, 14).unwrap();
    let via_t = t.apply(&f.scaled(spec.alpha()).unwrap()).unwrap();
    let (a, b) = (direct.solution.as_complex().unwrap(), via_t.as_complex().unwrap());
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        assert!((x - y).norm() <= 1e-12);
    }
}

#[test]
fn operator_hypotheses() {
    assert!(OperatorSpec::real(Family::RealDeriv(1), 0.5, 0.0).is_err());
    assert!(OperatorSpec::new(Family::AntiHolo(1), Complex64::new(0.6, 0.6), Complex64::new(0.0, 0.0)).is_err());
    assert!(OperatorSpec::new(Family::AntiHolo(1), Complex64::new(0.8, 0.6), Complex64::new(0.0, 0.0)).is_ok());
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::RealLaplacian),
        (1usize..=4).prop_map(Family::RealDeriv),
        (1usize..=3).prop_map(Family::AntiHolo),
        (1usize..=3).prop_map(Family::MixedDiag),
    ]
}

fn spec_strategy() -> impl Strategy<Value = OperatorSpec> {
    (family_strategy(), 1.0f64..3.0, 0.0f64..std::f64::consts::TAU, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(f, r, th, cr, ci)| {
        if f.is_complex() {
            OperatorSpec::new(f, Complex64::from_polar(r, th), Complex64::new(cr, ci)).unwrap()
        } else {
            let sign = if th < std::f64::consts::PI { 1.0 } else { -1.0 };
            OperatorSpec::real(f, sign * r, cr).unwrap()
        }
    })
}

fn sizes(family: Family) -> (usize, usize) {
    if family.is_complex() {
        (8, 16)
    } else {
        (24, 96)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn zero_c_bound_is_exact(family in family_strategy(), alpha in 1.0f64..3.0, seed in any::<u64>()) {
        let spec = OperatorSpec::real(family, alpha, 0.0).unwrap();
        let (band, degree) = sizes(family);
        let f = random_input(family, seed, 0, band);
        let r = solve_min_norm(&spec, &f, degree).unwrap();
        prop_assert!(r.ratio_sq.unwrap() <= floor_constant(family) * (1.0 + 1e-12));
    }

    #[test]
    fn bound_holds_for_any_c(spec in spec_strategy(), seed in any::<u64>()) {
        let (band, degree) = sizes(spec.family());
        let f = random_input(spec.family(), seed, 1, band);
        let r = solve_min_norm(&spec, &f, degree).unwrap();
        prop_assert!(r.satisfied);
        prop_assert!(r.ratio_sq.unwrap() <= r.bound_sq + BOUND_SLACK);
        prop_assert!(r.residual_ok(), "residual {}", r.residual_norm);
        prop_assert!(r.residual_norm <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn equality_is_alpha_independent(family in family_strategy(), r in 1.0f64..5.0, th in 0.0f64..std::f64::consts::TAU) {
        let alpha = if family.is_complex() { Complex64::from_polar(r, th) } else { Complex64::new(r, 0.0) };
        let spec = OperatorSpec::new(family, alpha, Complex64::new(0.0, 0.0)).unwrap();
        let res = solve_min_norm(&spec, &unit_input(family), 12).unwrap();
        prop_assert!((res.ratio_sq.unwrap() - spec.bound_sq() / alpha.norm_sqr()).abs() <= EQUALITY_TOL);
    }

    #[test]
    fn right_inverse_is_linear(spec in spec_strategy(), seed in any::<u64>(), s in -3.0f64..3.0) {
        let (band, degree) = sizes(spec.family());
        let t = build_right_inverse(&spec, degree).unwrap();
        let g1 = random_input(spec.family(), seed, 2, band);
        let g2 = random_input(spec.family(), seed, 3, band);
        let sum = add(&g1, &g2);
        let lhs = t.apply(&sum).unwrap();
        let rhs = add(&t.apply(&g1).unwrap(), &t.apply(&g2).unwrap());
        prop_assert!(distance(&lhs, &rhs) <= 1e-10);
        let scale = Complex64::new(s, 0.0);
        let a = t.apply(&g1.scaled(scale).unwrap()).unwrap();
        let b = t.apply(&g1).unwrap().scaled(scale).unwrap();
        prop_assert!(distance(&a, &b) <= 1e-10);
    }

    #[test]
    fn right_inverse_is_a_right_inverse(spec in spec_strategy(), seed in any::<u64>()) {
        let (band, degree) = sizes(spec.family());
        let t = build_right_inverse(&spec, degree).unwrap();
        let g = random_input(spec.family(), seed, 4, band);
        let back = apply(&spec, &t.apply(&g).unwrap()).unwrap();
        prop_assert!(distance(&back, &g) <= 1e-8);
    }

    #[test]
    fn truncation_is_stable(spec in spec_strategy(), seed in any::<u64>()) {
        let family = spec.family();
        let (band, degree) = if family.is_complex() { (6, 64) } else { (24, 48) };
        let f = random_input(family, seed, 5, band);
        let a = solve_min_norm(&spec, &f, degree).unwrap().ratio_sq.unwrap();
        let b = solve_min_norm(&spec, &f, 2 * degree).unwrap().ratio_sq.unwrap();
        prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

fn add(a: &Coeffs, b: &Coeffs) -> Coeffs {
    match (a, b) {
        (Coeffs::Real(x), Coeffs::Real(y)) => {
            let n = x.degree().max(y.degree());
            let v = (0..=n).map(|i| x.get(i) + y.get(i)).collect();
            RealCoeffs::from_vec(v).unwrap().into()
        }
        (Coeffs::Complex(x), Coeffs::Complex(y)) => {
            let (xm, xn) = x.shape();
            let (ym, yn) = y.shape();
            let mut out = ComplexCoeffs::zeros_rect(xm.max(ym), xn.max(yn));
            let (om, on) = out.shape();
            for m in 0..=om {
                for n in 0..=on {
                    out.set(m, n, x.get(m, n) + y.get(m, n));
                }
            }
            out.into()
        }
        _ => panic!("field mismatch"),
    }
}

fn distance(a: &Coeffs, b: &Coeffs) -> f64 {
    let neg = b.scaled(Complex64::new(-1.0, 0.0)).unwrap();
    add(a, &neg).norm_sq().sqrt()
}

fn flatten(c: &Coeffs, shape: (usize, usize)) -> Vec<Complex64> {
    match c {
        Coeffs::Real(r) => r.resized(shape.0).as_slice().iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        Coeffs::Complex(z) => z.resized(shape.0, shape.1).as_slice().to_vec(),
    }
}

fn image_shape(c: &Coeffs) -> (usize, usize) {
    match c {
        Coeffs::Real(r) => (r.degree(), 0),
        Coeffs::Complex(z) => z.shape(),
    }
}

/// Dense pseudo-inverse of the truncated operator as an independent oracle.
fn dense_check(spec: OperatorSpec, degree: usize, band: usize, seed: u64) {
    use nalgebra::{DMatrix, DVector};
    let family = spec.family();
    let units: Vec<Coeffs> = if family.is_complex() {
        (0..=degree)
            .flat_map(|m| (0..=degree).map(move |n| ComplexCoeffs::unit(degree, m, n).into()))
            .collect()
    } else {
        (0..=degree).map(|n| RealCoeffs::unit(degree, n).into()).collect()
    };
    let images: Vec<Coeffs> = units.iter().map(|u| apply(&spec, u).unwrap()).collect();
    let shape = image_shape(&images[0]);
    let cols: Vec<Vec<Complex64>> = images.iter().map(|c| flatten(c, shape)).collect();
    let a = DMatrix::from_fn(cols[0].len(), cols.len(), |i, j| cols[j][i]);
    let pinv = a.clone().pseudo_inverse(1e-13).unwrap();
    let f = random_input(family, seed, 6, band);
    let rhs = DVector::from_vec(flatten(&f.scaled(spec.alpha()).unwrap(), shape));
    let oracle = &pinv * &rhs;
    let ours = solve_min_norm(&spec, &f, degree).unwrap().solution;
    let ours = flatten(&ours, if family.is_complex() { (degree, degree) } else { (degree, 0) });
    let scale = oracle.norm().max(1.0);
    for (x, y) in ours.iter().zip(oracle.iter()) {
        assert!((x - y).norm() <= 1e-9 * scale, "{family:?}: {x} vs {y}");
    }
    // the solution is orthogonal to the kernel: it lies in the row space
    let back = &a.adjoint() * (&a * a.adjoint()).lu().solve(&(&a * DVector::from_vec(ours.clone()))).unwrap();
    let diff: f64 = back.iter().zip(&ours).map(|(p, q)| (p - q).norm_sqr()).sum();
    assert!(diff.sqrt() <= 1e-9 * scale, "{family:?}");
}

#[test]
fn minimal_norm_matches_dense_pseudo_inverse() {
    dense_check(OperatorSpec::real(Family::RealDeriv(2), 1.5, 0.8).unwrap(), 24, 12, 11);
    dense_check(OperatorSpec::real(Family::RealLaplacian, -2.0, -1.0).unwrap(), 20, 10, 12);
    let z = |a: f64, b: f64| Complex64::new(a, b);
    dense_check(OperatorSpec::new(Family::AntiHolo(2), z(1.0, 0.5), z(-0.7, 1.2)).unwrap(), 7, 4, 13);
    dense_check(OperatorSpec::new(Family::MixedDiag(1), z(0.0, 1.1), z(2.0, 0.0)).unwrap(), 7, 4, 14);
}
