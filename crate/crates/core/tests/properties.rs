mod common;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use roter::chart::parse_chart_file;
use roter::classify::{fit_linear_combination, FitStatus, Tolerances, Verdict};
use roter::curvature::{curvature_package, CurvaturePackage};
use roter::expr::{evaluate_jet, evaluate_value, format_expression, parse_expression, ParamMap, ParseContext};
use roter::tensor::{contract_first_last, kn_product};

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parser_never_panics(src in "[ -~]{0,40}") {
        let ctx = ParseContext::with_dim(3).with_parameters(["a"]);
        if let Err(e) = parse_expression(&src, &ctx) {
            prop_assert!(e.offset <= src.len());
        }
    }

    #[test]
    fn parser_handles_token_soup(tokens in prop::collection::vec(
        prop::sample::select(vec!["x1", "x2", "a", "2", "0.5", "+", "-", "*", "/", "^", "(", ")", "exp", "sin", "log", "1e3"]), 0..30)
    ) {
        let src = tokens.join(" ");
        let ctx = ParseContext::with_dim(3).with_parameters(["a"]);
        if let Ok(e) = parse_expression(&src, &ctx) {
            let again = parse_expression(&format_expression(&e), &ctx).unwrap();
            prop_assert_eq!(again, e);
        }
    }

    #[test]
    fn jet_value_matches_plain_evaluation(
        template in 0usize..4,
        c in prop::collection::vec(-1.0..1.0f64, 4),
        x in prop::collection::vec(-0.5..0.5f64, 3),
    ) {
        let e = parse_expression(&common::smooth_function(template, &c), &ParseContext::with_dim(3)).unwrap();
        let params = ParamMap::new();
        let v = evaluate_value(&e, &x, &params).unwrap();
        let j = evaluate_jet(&e, &x, &params).unwrap();
        prop_assert!((v - j.value()).abs() <= 1e-14 * v.abs().max(1.0));
    }

    #[test]
    fn chart_text_roundtrip_preserves_curvature(spec in common::chart_spec()) {
        let chart = spec.chart();
        let back = parse_chart_file(&chart.to_chart_text()).unwrap();
        let a = curvature_package(&chart, &spec.point).unwrap();
        let b = curvature_package(&back, &spec.point).unwrap();
        prop_assert_eq!(a.r.data(), b.r.data());
    }

    #[test]
    fn ricci_is_contraction_of_riemann(spec in common::chart_spec()) {
        let pkg = curvature_package(&spec.chart(), &spec.point).unwrap();
        let s = contract_first_last(&pkg.r, &pkg.g_inv).unwrap();
        prop_assert!(s.max_abs_diff(&pkg.s) <= 1e-12 * pkg.r.max_abs().max(1.0) * pkg.g_inv.max_abs());
    }

    #[test]
    fn synthetic_roter_form_is_recovered(
        g in (3usize..=5).prop_flat_map(common::metric),
        coef in prop::collection::vec(-2.0..2.0f64, 3),
    ) {
        // A Roter form built from an arbitrary symmetric A fits exactly against g∧g, g∧A, A∧A.
        let dim = g.dim();
        let a = common::sym_from(dim, &(0..dim * dim).map(|k| ((k * 7 % 11) as f64 - 5.0) / 5.0).collect::<Vec<_>>());
        let basis = [kn_product(&g, &g).unwrap(), kn_product(&g, &a).unwrap(), kn_product(&a, &a).unwrap()];
        let r = basis.iter().zip(&coef).fold(basis[0].scale(0.0), |acc, (b, c)| acc.axpy(*c, b));
        let pkg = CurvaturePackage::from_algebraic(g.clone(), r.clone()).unwrap();
        let fit = fit_linear_combination(&pkg.r, &[&basis[0], &basis[1], &basis[2]], &Tolerances::default()).unwrap();
        prop_assume!(fit.status == FitStatus::Determinate && r.norm() > 1e-6);
        prop_assert_eq!(fit.membership, Verdict::Holds);
        for (got, want) in fit.coefficients.iter().zip(&coef) {
            prop_assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0));
        }
    }
}

#[test]
fn report_floats_roundtrip_through_json() {
    let mut rng = proptest::test_runner::TestRunner::deterministic();
    let strat = prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO;
    for _ in 0..500 {
        let v = strat.new_tree(&mut rng).unwrap().current();
        let text = format!("{v:.16e}");
        let back: f64 = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_bits(), v.to_bits(), "{text}");
    }
}
