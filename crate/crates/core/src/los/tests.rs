use crate::fixtures;
use crate::frame::{filters, Filter};
use crate::scan::ScanParams;
use crate::sheaf::lift_structure;

use super::*;

fn small() -> ScanParams {
    ScanParams { depth: 2, max_params: 1, term_depth: 2 }
}

#[test]
fn quotient_of_fix_rc_by_up_u() {
    let m = lift_structure(&fixtures::fix_rc()).unwrap();
    let f = Filter::principal(m.frame().clone(), 1).unwrap();
    let q = filter_quotient(&m, &f).unwrap();
    // c1 ~ cu (they agree on u), c0 in its own class
    assert_eq!(q.reps.len(), 2);
    let c1 = m.carrier().element_by_name("c1").unwrap();
    let cu = m.carrier().element_by_name("cu").unwrap();
    let c0 = m.carrier().element_by_name("c0").unwrap();
    assert_eq!(q.class_of[c1], q.class_of[cu]);
    assert_ne!(q.class_of[c0], q.class_of[c1]);
    // Gamma has one element and R holds there
    assert_eq!(q.gamma.size(), 1);
    let phi = crate::logic::parse_formula("R(c)", m.language()).unwrap();
    assert!(q.gamma.models(&phi).unwrap());
}

#[test]
fn quotient_by_top_filter_is_identity_on_separated() {
    let m = lift_structure(&fixtures::fix_rc()).unwrap();
    let f = Filter::principal(m.frame().clone(), m.frame().top()).unwrap();
    let q = filter_quotient(&m, &f).unwrap();
    // delta-equality classes: separated, so classes are singletons
    assert_eq!(q.reps.len(), m.carrier().len());
    // global classes = global elements
    assert_eq!(q.gamma.size(), m.carrier().global_elements().len());
}

#[test]
fn quotient_by_improper_filter_rejected() {
    let m = fixtures::fix_neg();
    let f = Filter::principal(m.frame().clone(), m.frame().bottom()).unwrap();
    assert_eq!(filter_quotient(&m, &f).unwrap_err(), LosError::ImproperFilter);
}

#[test]
fn gamma_matches_section_quotients() {
    for s in [fixtures::fix_rc(), fixtures::fix_fam()] {
        let m = lift_structure(&s).unwrap();
        for f in filters(s.frame()).into_iter().filter(|f| f.proper) {
            verify_gamma_matches_sections(&s, &m, &f).unwrap();
        }
    }
}

#[test]
fn up_u_is_generic_on_fix_rc() {
    let m = lift_structure(&fixtures::fix_rc()).unwrap();
    let f = Filter::principal(m.frame().clone(), 1).unwrap();
    let report = is_generic(&m, &f, small()).unwrap();
    assert!(report.generic, "{report:?}");
}

#[test]
fn top_filter_fails_genericity_on_fix_neg() {
    let m = fixtures::fix_neg();
    let frame = m.frame().clone();
    let f = Filter::principal(frame.clone(), frame.top()).unwrap();
    let report = is_generic(&m, &f, small()).unwrap();
    assert!(!report.generic);
    let failure = report.dichotomy_failure.expect("dichotomy must fail");
    // || R(c)^G || = a and || ~R(c)^G || = b, neither in up(1)
    assert_eq!(failure.value, "a");
    assert_eq!(failure.negated_value, "b");
}

#[test]
fn top_filter_fails_atomic_dichotomy_on_fix_rc() {
    // both paper clauses hold for up:1 on the restriction chain (translated
    // values over global parameters are regular), but the untranslated
    // atomic dichotomy fails at R(c1) = u — and with it the transfer
    // biconditional would fail, so the filter must not count as generic
    let m = lift_structure(&fixtures::fix_rc()).unwrap();
    let frame = m.frame().clone();
    let f = Filter::principal(frame.clone(), frame.top()).unwrap();
    let report = is_generic(&m, &f, small()).unwrap();
    assert!(!report.generic);
    assert!(report.dichotomy_failure.is_none(), "{report:?}");
    let atomic = report.atomic_failure.expect("atomic dichotomy must fail");
    assert_eq!(atomic.value, "u");
    assert_eq!(atomic.negated_value, "0");
    // contrapositive pairing: the transfer check indeed fails for it
    let summary = los_check(&m, &f, small(), false, |_| {}).unwrap();
    assert!(!summary.pass());
}

#[test]
fn maximal_filters_are_generic_on_fixtures() {
    let models = [
        lift_structure(&fixtures::fix_rc()).unwrap(),
        lift_structure(&fixtures::fix_fam()).unwrap(),
        fixtures::fix_neg(),
    ];
    for m in &models {
        for f in filters(m.frame()).into_iter().filter(|f| f.maximal) {
            let report = is_generic(m, &f, small()).unwrap();
            assert!(report.generic, "maximal filter not generic: {report:?}");
        }
    }
}

#[test]
fn los_passes_on_generic_filter() {
    let m = lift_structure(&fixtures::fix_rc()).unwrap();
    let f = Filter::principal(m.frame().clone(), 1).unwrap();
    let summary = los_check(&m, &f, small(), false, |row| {
        panic!("unexpected failing row: {row:?}");
    })
    .unwrap();
    assert!(summary.pass());
    assert!(summary.checked > 0);
}

#[test]
fn los_fails_on_non_generic_filter_with_documented_row() {
    let m = fixtures::fix_neg();
    let frame = m.frame().clone();
    let f = Filter::principal(frame.clone(), frame.top()).unwrap();
    let mut rows = Vec::new();
    let summary = los_check(&m, &f, small(), false, |row| rows.push(row.clone())).unwrap();
    assert!(!summary.pass());
    // the documented failure: Gamma |= ~R([c]) but ||(~R(c))^G|| = b not in f
    let row = rows
        .iter()
        .find(|r| r.formula == "~R(c)" && !r.pass)
        .unwrap_or_else(|| panic!("missing ~R(c) failure among {rows:?}"));
    assert!(row.gamma_sat);
    assert_eq!(row.forcing_value, "b");
    assert!(!row.in_filter);
    // and the theorem's contrapositive: the filter is not generic
    assert!(!is_generic(&m, &f, small()).unwrap().generic);
}

#[test]
fn los_rows_reevaluate_individually() {
    // every reported row matches a direct forcing evaluation
    let m = fixtures::fix_neg();
    let frame = m.frame().clone();
    let f = Filter::principal(frame.clone(), frame.top()).unwrap();
    let mut rows = Vec::new();
    los_check(&m, &f, small(), true, |row| rows.push(row.clone())).unwrap();
    let q = filter_quotient(&m, &f).unwrap();
    for row in rows.iter().take(40) {
        let phi = crate::logic::parse_formula_with_params(
            &row.formula,
            m.language(),
            m.carrier().names(),
        )
        .unwrap();
        let g = crate::logic::godel_translate(&phi);
        let v = crate::hmodel::forcing_value(
            &m,
            &g,
            &crate::logic::Context::empty(),
            &[],
            crate::hmodel::EvalPath::Recursion,
        )
        .unwrap();
        assert_eq!(frame.name(v.value), row.forcing_value, "row {row:?}");
        assert_eq!(f.contains(v.value), row.in_filter);
        let gamma_phi = crate::logic::parse_formula_with_params(
            &row.formula,
            m.language(),
            q.gamma.universe(),
        )
        .unwrap();
        // carrier names and class names differ; map m -> [m]
        let _ = gamma_phi;
    }
}

#[test]
fn characterization_holds_on_fixtures() {
    let models = [
        lift_structure(&fixtures::fix_rc()).unwrap(),
        fixtures::fix_neg(),
    ];
    for m in &models {
        let report = characterization_check(m, small()).unwrap();
        assert!(report.all_pass(), "characterization failed: variant={:?}", report.variant.failures);
        assert!(!report.spectrum_pairs.is_empty());
        for row in &report.d_covers {
            assert!(row.covered, "{row:?}");
        }
    }
}

#[test]
fn characterization_on_f2_frame() {
    // the two-element frame has a single maximal filter; everything holds
    let f2 = fixtures::f2_arc();
    let carrier = Arc::new(
        crate::hset::HSet::new(f2, vec!["m".into()], vec![vec![1]]).unwrap(),
    );
    let m = crate::hmodel::HStructure::new(
        fixtures::lang_rc(),
        carrier,
        std::collections::BTreeMap::from([(
            "c".to_string(),
            crate::hmodel::FunctionSpec::Map(vec![0]),
        )]),
        std::collections::BTreeMap::from([("R".to_string(), vec![1])]),
    )
    .unwrap();
    let report = characterization_check(&m, small()).unwrap();
    assert!(report.all_pass());
    assert_eq!(report.spectrum_pairs.len(), 1);
    assert_eq!(report.spectrum_pairs[0].0, "up:1");
}

use std::sync::Arc;

#[test]
fn classical_ultraproduct_of_fix_fam() {
    let factors = [fixtures::point_structure(true), fixtures::point_structure(false)];
    let report = classical_ultraproduct(&["x", "y"], &factors, 0, small()).unwrap();
    assert!(report.pass(), "failures: {:?}", report.failures);
    // R(c) holds in the ultraproduct at x
    let phi = crate::logic::parse_formula("R(c)", factors[0].language()).unwrap();
    assert!(report.ultraproduct.models(&phi).unwrap());
    // and fails at y
    let report_y = classical_ultraproduct(&["x", "y"], &factors, 1, small()).unwrap();
    assert!(report_y.pass());
    assert!(!report_y.ultraproduct.models(&phi).unwrap());
}

#[test]
fn classical_ultraproduct_three_point_family() {
    let factors = [
        fixtures::cyclic_structure(2, &[0]),
        fixtures::cyclic_structure(3, &[1, 2]),
        fixtures::cyclic_structure(1, &[]),
    ];
    for at in 0..3 {
        let report = classical_ultraproduct(
            &["x", "y", "z"],
            &factors,
            at,
            ScanParams { depth: 2, max_params: 1, term_depth: 2 },
        )
        .unwrap();
        assert!(report.pass(), "at {at}: {:?}", report.failures);
    }
}

#[test]
fn empty_factor_rejected() {
    let lang = crate::logic::Language::new().with_relation("R", 1).unwrap();
    let empty = FiniteStructure::new(
        lang.clone(),
        vec![],
        std::collections::BTreeMap::new(),
        std::collections::BTreeMap::from([("R".to_string(), vec![])]),
    )
    .unwrap();
    let nonempty = FiniteStructure::new(
        lang,
        vec!["a".into()],
        std::collections::BTreeMap::new(),
        std::collections::BTreeMap::from([("R".to_string(), vec![true])]),
    )
    .unwrap();
    let err = classical_ultraproduct(&["x", "y"], &[empty, nonempty], 1, small()).unwrap_err();
    assert_eq!(err, LosError::EmptyFactorWithoutConstant);
}
