use cohomlab::closedform::{apply_operator, l2_norms, QuadSpec, C64};
use cohomlab::cohom::{build_counterexample, map_residual, solve_map, CounterexamplePair, TwistProblem, Variant};
use cohomlab::grid::{fd_derivative, resonance_scan_vars, GridAxis, GridFunction};
use cohomlab::models::roots::all_roots;
use cohomlab::models::{generators, group_action, GeneratorId, ModelKind, ModelSpec, OneParamElement};
use cohomlab::weyl::scalar::{gq, q};
use cohomlab::weyl::{var_set, OperatorPoly, Scalar, VarSet, WeylMonomial};
use cohomlab::Error;
use proptest::prelude::*;

fn vars() -> VarSet {
    var_set(&["x", "y"])
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-3i64..=3, -3i64..=3, -2i64..=2)
        .prop_map(|(re, im, nu)| &Scalar::constant(gq(q(re), q(im))) + &Scalar::nu().scale(&gq(q(nu), q(0))))
}

fn operator() -> impl Strategy<Value = OperatorPoly> {
    let term = (
        prop::collection::vec(-2i32..=2, 2),
        prop::collection::vec(0u32..=2, 2),
        scalar(),
    );
    prop::collection::vec(term, 1..=6).prop_map(|terms| {
        let vs = vars();
        let mut op = OperatorPoly::zero(&vs);
        for (mult, deriv, c) in terms {
            op = &op + &OperatorPoly::monomial(&vs, WeylMonomial { mult, deriv }, c);
        }
        op
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_bilinear_and_associative(a in operator(), b in operator(), c in operator()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn commutator_is_antisymmetric_and_jacobi(a in operator(), b in operator(), c in operator()) {
        prop_assert_eq!(a.commutator(&b), -&b.commutator(&a));
        let jacobi = &(&a.commutator(&b.commutator(&c)) + &b.commutator(&c.commutator(&a)))
            + &c.commutator(&a.commutator(&b));
        prop_assert!(jacobi.is_zero());
    }
}

fn pair() -> CounterexamplePair {
    build_counterexample(3, 2, 3, 8.0, 1.0, Variant::Twist).unwrap()
}

fn word(gens: &[(GeneratorId, OperatorPoly)], idx: &[usize]) -> OperatorPoly {
    let vs = gens[0].1.vars().clone();
    idx.iter()
        .fold(OperatorPoly::one(&vs), |acc, &k| &acc * &gens[k % gens.len()].1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_words_stay_in_the_family(idx in prop::collection::vec(0usize..64, 1..=4)) {
        let p = pair();
        let gens = generators(&p.model).unwrap();
        let out = apply_operator(&word(&gens, &idx), &p.g).unwrap();
        let pt = [0.9, 1.1];
        prop_assert!(out.evaluate(&pt, p.nu).unwrap().is_finite());
    }

    #[test]
    fn apply_is_linear(idx in prop::collection::vec(0usize..64, 1..=3), re in -3i64..=3, im in -3i64..=3) {
        let p = pair();
        let gens = generators(&p.model).unwrap();
        let op = word(&gens, &idx);
        let c = Scalar::constant(gq(q(re), q(im)));
        let sum = p.g.try_add(&p.f.scale(&c)).unwrap();
        let lhs = apply_operator(&op, &sum).unwrap();
        let rhs = apply_operator(&op, &p.g).unwrap().try_add(&apply_operator(&op, &p.f).unwrap().scale(&c)).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn apply_respects_composition(a in 0usize..64, b in 0usize..64) {
        let p = pair();
        let gens = generators(&p.model).unwrap();
        let (ga, gb) = (&gens[a % gens.len()].1, &gens[b % gens.len()].1);
        let lhs = apply_operator(&(ga * gb), &p.g).unwrap();
        let rhs = apply_operator(ga, &apply_operator(gb, &p.g).unwrap()).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().is_zero());
    }
}

// For skew-adjoint Z, 2 Re⟨Zf, f⟩ = ‖f + Zf‖² − ‖f‖² − ‖Zf‖² vanishes.
#[test]
fn generators_are_skew_adjoint_on_the_family() {
    let p = pair();
    let dom = p.domain();
    let quad = QuadSpec {
        panels_per_unit_frequency: 1.0,
        ..QuadSpec::default()
    };
    for (id, z) in generators(&p.model).unwrap() {
        let zf = apply_operator(&z, &p.g).unwrap();
        let both = p.g.try_add(&zf).unwrap();
        let n = l2_norms(&[&p.g, &zf, &both], &dom, p.nu, &quad).unwrap();
        let defect = (n[2] * n[2] - n[0] * n[0] - n[1] * n[1]).abs() / (n[0] * n[1]);
        assert!(defect < 1e-5, "{id}: {defect}");
    }
}

#[test]
fn lambda_rescaling_covariance() {
    for (n, j, i) in [(2, 1, 2), (3, 2, 3)] {
        let base = build_counterexample(n, j, i, 16.0, 1.0, Variant::Twist).unwrap();
        for lambda in [0.5, 2.0, 3.7] {
            let scaled = build_counterexample(n, j, i, 16.0, lambda, Variant::Twist).unwrap();
            let wi = base.vars().iter().position(|v| v == "w").unwrap();
            for k in 0..50 {
                let mut pt: Vec<f64> = (0..base.vars().len())
                    .map(|m| 0.78 + 0.5 * ((k * 7 + m * 13) % 50) as f64 / 49.0)
                    .collect();
                let unit = base.f.evaluate(&pt, base.nu).unwrap();
                let g_unit = base.g.evaluate(&pt, base.nu).unwrap();
                pt[wi] *= lambda;
                let f = scaled.f.evaluate(&pt, scaled.nu).unwrap();
                let g = scaled.g.evaluate(&pt, scaled.nu).unwrap();
                assert!(
                    (g - g_unit).norm() < 1e-10 * (1.0 + g_unit.norm()),
                    "g λ={lambda} {pt:?}"
                );
                assert!(
                    (f * lambda - unit).norm() < 1e-10 * (1.0 + unit.norm()),
                    "f λ={lambda} {pt:?}"
                );
            }
        }
    }
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (u * u - 1.0)).exp()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // solve_map succeeds exactly when the scan finds g vanishing on the resonance curves
    #[test]
    fn map_obstruction_dichotomy(leak in prop_oneof![Just(0.0), 0.05f64..1.0], cx in 1.8f64..2.2) {
        let prob = TwistProblem::map(ModelSpec::new(ModelKind::Sl2R2Fourier).with_t(1.5), 1, 2, 1.0);
        let axes = vec![GridAxis::new("x", 0.5, 3.5, 481), GridAxis::new("y", 0.5, 3.5, 481)];
        let g = GridFunction::sample(axes, |p| {
            let b = bump((p[0] - cx) / 1.2) * bump((p[1] - 2.0) / 1.2);
            (C64::new(0.0, -p[0] * p[1]).exp() - 1.0) * b + leak * b
        })
        .unwrap();
        let scan = resonance_scan_vars(&g, 1.0, Some("x"), "y").unwrap();
        let clean = scan.max_abs <= 1e-8 * g.max_abs();
        prop_assert_eq!(clean, leak == 0.0);
        match solve_map(&g, &prob) {
            Ok(f) => {
                prop_assert!(clean);
                prop_assert!(map_residual(&g, &f, &prob).unwrap() < 1e-8);
            }
            Err(Error::ResonanceObstruction { .. }) => prop_assert!(!clean),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn fd_is_linear(a in -3.0f64..3.0, order in 1u32..=4) {
        let axes = || vec![GridAxis::new("x", -1.0, 1.0, 41)];
        let f = GridFunction::sample(axes(), |p| C64::new(p[0].sin(), p[0] * p[0])).unwrap();
        let h = GridFunction::sample(axes(), |p| C64::new((2.0 * p[0]).exp(), 0.0)).unwrap();
        let lhs = fd_derivative(&f.scale(C64::new(a, 0.0)).try_add(&h).unwrap(), "x", order).unwrap();
        let rhs = fd_derivative(&f, "x", order).unwrap().scale(C64::new(a, 0.0)).try_add(&fd_derivative(&h, "x", order).unwrap()).unwrap();
        let scale = lhs.max_abs().max(1.0);
        for (u, v) in lhs.values().iter().zip(rhs.values()) {
            prop_assert!((u - v).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn group_action_inverse(s in -0.4f64..0.4, pick in 0usize..4) {
        let gen = [GeneratorId::Diag(1), GeneratorId::Unip(2, 1), GeneratorId::Unip(3, 2), GeneratorId::Unip(3, 1)][pick];
        let axes = vec![GridAxis::new("x1", -6.0, 6.0, 129), GridAxis::new("x2", -6.0, 6.0, 129)];
        let f = GridFunction::sample(axes, |p| C64::new((-(p[0] * p[0] + p[1] * p[1])).exp(), 0.0)).unwrap();
        let model = ModelSpec::ind_p(3).with_t(1.0);
        let fwd = group_action(&model, OneParamElement { generator: gen, s }, &f).unwrap();
        let back = group_action(&model, OneParamElement { generator: gen, s: -s }, &fwd.f).unwrap();
        let err = back.f.try_sub(&f).unwrap().l2_norm(None) / f.l2_norm(None);
        prop_assert!(err < 1e-4, "{} {}", gen, err);
    }
}

#[test]
fn grid_l2_norm_converges_under_refinement() {
    let norm = |n: usize| {
        let axes = vec![GridAxis::new("x", -1.0, 1.0, n), GridAxis::new("y", -1.0, 1.0, n)];
        GridFunction::sample(axes, |p| C64::new(bump(p[0]) * bump(p[1]), 0.0))
            .unwrap()
            .l2_norm(None)
    };
    let (a, b) = (norm(201), norm(401));
    assert!((a - b).abs() / b < 1e-6, "{a} {b}");
}

#[test]
fn root_system_size() {
    for n in 2..=5 {
        assert_eq!(all_roots(n).len(), n * (n - 1));
    }
}
