use std::collections::BTreeMap;
use std::sync::Arc;

use crate::fixtures;
use crate::hset::HSet;
use crate::logic::{parse_formula_with_params, Context, Language};
use crate::scan::{ForcingScan, ScanParams};

use super::forcing::{cat_relation, forcing_relation, forcing_value, EvalPath};
use super::*;

fn lang_rc() -> Language {
    Language::new()
        .with_function("c", 0)
        .unwrap()
        .with_relation("R", 1)
        .unwrap()
}

/// The one-element structure over B4 with R of value a and c global.
fn fix_neg() -> HStructure {
    let b4 = fixtures::b4_arc();
    let carrier = Arc::new(HSet::new(b4, vec!["m".into()], vec![vec![3]]).unwrap());
    HStructure::new(
        lang_rc(),
        carrier,
        BTreeMap::from([("c".to_string(), FunctionSpec::Map(vec![0]))]),
        BTreeMap::from([("R".to_string(), vec![1])]),
    )
    .unwrap()
}

/// A hand-built complete structure over S3 shaped like a chain of
/// restrictions, with R holding on the middle section only.
fn chain_s3() -> HStructure {
    let s3 = fixtures::s3_arc();
    let carrier = Arc::new(
        HSet::new(
            s3,
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 0]],
        )
        .unwrap(),
    );
    HStructure::new(
        lang_rc(),
        carrier,
        BTreeMap::from([("c".to_string(), FunctionSpec::Map(vec![0]))]),
        // R(x) = u, R(y) = u, R(z) = 0: strict
        BTreeMap::from([("R".to_string(), vec![1, 1, 0])]),
    )
    .unwrap()
}

#[test]
fn validation_rejects_non_strict_relation() {
    let b4 = fixtures::b4_arc();
    let carrier = Arc::new(HSet::new(b4, vec!["m".into()], vec![vec![1]]).unwrap());
    // R(m) = 1 strictly above the extent a
    let lang = Language::new().with_relation("R", 1).unwrap();
    let err = HStructure::new(
        lang,
        carrier,
        BTreeMap::new(),
        BTreeMap::from([("R".to_string(), vec![3])]),
    )
    .unwrap_err();
    match err {
        ModelError::NotStrict { symbol, .. } => assert_eq!(symbol, "R"),
        other => panic!("expected NotStrict, got {other:?}"),
    }
}

#[test]
fn constant_requires_global_element() {
    let b4 = fixtures::b4_arc();
    let carrier = Arc::new(HSet::new(b4, vec!["m".into()], vec![vec![1]]).unwrap());
    let err = HStructure::new(
        lang_rc(),
        carrier,
        BTreeMap::from([("c".to_string(), FunctionSpec::Map(vec![0]))]),
        BTreeMap::from([("R".to_string(), vec![1])]),
    )
    .unwrap_err();
    assert_eq!(err, ModelError::AssumptionFailed { symbol: "c".into() });
}

#[test]
fn assumption_failure_detected() {
    // unary operation over B4 on carrier {w, y, z} with delta(w)=1,
    // delta(y)=a, delta(z)=b and all off-diagonal values 0; the table
    // forces f(w)~y over a and f(w)~z over b, but no single image works.
    let b4 = fixtures::b4_arc();
    let carrier = Arc::new(
        HSet::new(
            b4,
            vec!["w".into(), "y".into(), "z".into()],
            vec![vec![3, 0, 0], vec![0, 1, 0], vec![0, 0, 2]],
        )
        .unwrap(),
    );
    let lang = Language::new().with_function("f", 1).unwrap();
    // rows: f at w: (w, y, z) -> (0, a, b); at y: (0, a, 0); at z: (0, 0, b)
    let table = vec![0, 1, 2, 0, 1, 0, 0, 0, 2];
    let err = HStructure::new(
        lang,
        carrier,
        BTreeMap::from([("f".to_string(), FunctionSpec::Table(table))]),
        BTreeMap::new(),
    )
    .unwrap_err();
    assert_eq!(err, ModelError::AssumptionFailed { symbol: "f".into() });
}

#[test]
fn fix_neg_forcing_values() {
    let m = fix_neg();
    let lang = lang_rc();
    let params: Vec<String> = vec!["m".into()];
    let f = |text: &str| parse_formula_with_params(text, &lang, &params).unwrap();
    let ctx = Context::empty();
    let frame = m.frame().clone();

    let r = forcing_value(&m, &f("R(c)"), &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(r.value), "a");
    // ||R(c)^G|| = ~~a = a over B4
    let g = crate::logic::godel_translate(&f("R(c)"));
    let gv = forcing_value(&m, &g, &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(gv.value), "a");
    // || ~R(c)^G || = ~a = b
    let ng = Formula::not(g);
    let ngv = forcing_value(&m, &ng, &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(ngv.value), "b");
}

#[test]
fn chain_s3_forcing_values() {
    let m = chain_s3();
    let lang = lang_rc();
    let params: Vec<String> = m.carrier().names().to_vec();
    let f = |text: &str| parse_formula_with_params(text, &lang, &params).unwrap();
    let ctx = Context::empty();
    let frame = m.frame().clone();

    // || R(x) || = u while || ~~R(x) || = 1
    let r = forcing_value(&m, &f("R(x)"), &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(r.value), "u");
    let nn = forcing_value(&m, &f("~~R(x)"), &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(nn.value), "1");
    // || R(x) | ~R(x) || = u, although Gamma(1, M) decides it classically
    let lem = forcing_value(&m, &f("R(x) | ~R(x)"), &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(lem.value), "u");
    // || exists v. v = v || = join of extents = 1
    let ex = forcing_value(&m, &f("exists v. v = v"), &ctx, &[], EvalPath::Recursion).unwrap();
    assert_eq!(frame.name(ex.value), "1");
}

#[test]
fn forcing_value_bound_and_context_extension() {
    let m = chain_s3();
    let lang = lang_rc();
    let phi = crate::logic::parse_formula("R(v)", &lang).unwrap();
    let ctx1 = Context::of(&["v"]);
    let ctx2 = Context::of(&["v", "w"]);
    let frame = m.frame().clone();
    for a in 0..m.carrier().len() {
        let v1 = forcing_value(&m, &phi, &ctx1, &[a], EvalPath::Recursion).unwrap().value;
        assert!(frame.leq(v1, m.carrier().extent(a)), "forcing value exceeds extent");
        for b in 0..m.carrier().len() {
            let v2 = forcing_value(&m, &phi, &ctx2, &[a, b], EvalPath::Recursion)
                .unwrap()
                .value;
            assert_eq!(v2, frame.meet(v1, m.carrier().extent(b)));
        }
    }
}

#[test]
fn both_paths_agree_on_samples() {
    let m = chain_s3();
    let lang = lang_rc();
    let texts = [
        "R(v)",
        "~R(v)",
        "R(v) | ~R(v)",
        "exists w. R(w)",
        "forall w. R(w)",
        "exists w. v = w",
        "forall w. (v = w -> R(w))",
        "R(c) -> R(v)",
    ];
    let ctx = Context::of(&["v"]);
    for text in texts {
        let phi = crate::logic::parse_formula(text, &lang).unwrap();
        let rec = forcing_relation(&m, &phi, &ctx, EvalPath::Recursion).unwrap();
        let cat = forcing_relation(&m, &phi, &ctx, EvalPath::Categorical).unwrap();
        assert_eq!(rec, cat, "paths disagree on {text}");
    }
}

#[test]
fn scan_matches_single_evaluation() {
    let m = chain_s3();
    let params = ScanParams { depth: 2, max_params: 1, term_depth: 2 };
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(&m, &space);
    for ctx in 0..=1usize {
        scan.for_each(ctx, 2, |node| {
            let phi = space.formula(node.id, node.node);
            let vars: Vec<String> = (0..ctx).map(|i| format!("v{i}")).collect();
            let ctx_obj = Context::new(vars).unwrap();
            let rec = forcing_relation(&m, &phi, &ctx_obj, EvalPath::Recursion).unwrap();
            assert_eq!(node.rec, rec.as_slice(), "recursion mismatch on {phi}");
            let cat = forcing_relation(&m, &phi, &ctx_obj, EvalPath::Categorical).unwrap();
            assert_eq!(node.cat, cat.as_slice(), "categorical mismatch on {phi}");
            let god = forcing_relation(
                &m,
                &crate::logic::godel_translate(&phi),
                &ctx_obj,
                EvalPath::Recursion,
            )
            .unwrap();
            assert_eq!(node.god, god.as_slice(), "godel mismatch on {phi}");
        });
    }
}

#[test]
fn scan_image_route_matches_adjoint_route() {
    // the single-formula categorical path uses the image factorization for
    // exists; the scan uses the left adjoint; they must agree
    let m = chain_s3();
    let lang = lang_rc();
    let phi = crate::logic::parse_formula("exists w. R(w) & v = w", &lang).unwrap();
    let ctx = Context::of(&["v"]);
    let rel = cat_relation(&m, &phi, ctx.vars()).unwrap();
    let rec = forcing_relation(&m, &phi, &ctx, EvalPath::Recursion).unwrap();
    assert_eq!(rel.values(), rec.as_slice());
}

#[test]
fn gamma_structures() {
    let m = chain_s3();
    let frame = m.frame().clone();
    let top = frame.top();
    // Gamma(1, M) = {x} with R failing (R(x) = u != 1)
    let g1 = m.gamma_structure(top).unwrap();
    assert_eq!(g1.universe(), &["x".to_string()]);
    let phi = crate::logic::parse_formula("R(c)", m.language()).unwrap();
    assert!(!g1.models(&phi).unwrap());
    // classically Gamma satisfies R(c) | ~R(c) although the forcing value is u
    let lem = crate::logic::parse_formula("R(c) | ~R(c)", m.language()).unwrap();
    assert!(g1.models(&lem).unwrap());

    // Gamma(u, M) = {y} with R holding (R(y) = u = extent); the constant
    // restricts to y
    let gu = m.gamma_structure(1).unwrap();
    assert_eq!(gu.universe(), &["y".to_string()]);
    assert!(gu.models(&phi).unwrap());
}

#[test]
fn max_principle_on_complete_structure() {
    let m = chain_s3();
    let params = ScanParams { depth: 2, max_params: 1, term_depth: 2 };
    let full = max_principle_full(&m, params);
    assert!(full.holds(), "failures: {:?}", full.failures);
    let variant = max_principle_variant(&m, params);
    assert!(variant.holds());
    let mixing = mixing_check(&m, 3);
    assert!(mixing.holds());
}

/// Two partial elements over B4 with no amalgamation: `R` holds on each
/// piece but no single element witnesses the existential up to double
/// negation.
fn partial_pair_b4() -> HStructure {
    let b4 = fixtures::b4_arc();
    let carrier = Arc::new(
        HSet::new(b4, vec!["y".into(), "z".into()], vec![vec![1, 0], vec![0, 2]]).unwrap(),
    );
    let lang = Language::new().with_relation("R", 1).unwrap();
    HStructure::new(
        lang,
        carrier,
        BTreeMap::new(),
        BTreeMap::from([("R".to_string(), vec![1, 2])]),
    )
    .unwrap()
}

#[test]
fn incomplete_structure_fails_full_max_principle() {
    let m = partial_pair_b4();
    let params = ScanParams { depth: 2, max_params: 0, term_depth: 2 };
    // || exists v R(v) || = a | b = 1, but every instance is capped by its
    // extent, so no witness reaches the join even after double negation
    let full = max_principle_full(&m, params);
    assert!(!full.holds());
    assert!(full
        .failures
        .iter()
        .any(|row| row.formula == "R(v0)" && m.frame().name(row.exists_value) == "1"));
    // the finite-witness-family variant still holds (the whole carrier
    // attains the join exactly)
    let variant = max_principle_variant(&m, params);
    assert!(variant.holds(), "{:?}", variant.failures);
    // and the mixing property fails: the antichain {a, b} admits no mix
    let mixing = mixing_check(&m, 2);
    assert!(!mixing.holds());
    // the characterization conditions still hold at this bound: both
    // maximal filters are generic and transfer along them
    let ch = crate::los::characterization_check(
        &m,
        ScanParams { depth: 2, max_params: 1, term_depth: 2 },
    )
    .unwrap();
    assert!(ch.all_pass());
}

#[test]
fn gamma_witness_independence_is_surfaced() {
    let m = chain_s3();
    // the constant has a unique witness here
    let alts = m.alternate_witnesses("c");
    assert_eq!(alts, vec![vec![0]]);
}

#[test]
fn witness_dependence_of_gamma_is_detected() {
    // two indistinguishable global elements and two constants: picking the
    // same element for both makes `c = d` hold in the section structure,
    // picking different ones refutes it, so the choice is observable
    let s3 = fixtures::s3_arc();
    let carrier = Arc::new(
        HSet::new(s3.clone(), vec!["a".into(), "b".into()], vec![vec![2, 2], vec![2, 2]])
            .unwrap(),
    );
    let lang = Language::new()
        .with_function("c", 0)
        .unwrap()
        .with_function("d", 0)
        .unwrap();
    let m = HStructure::new(
        lang,
        carrier,
        BTreeMap::from([
            ("c".to_string(), FunctionSpec::Table(vec![2, 2])),
            ("d".to_string(), FunctionSpec::Table(vec![2, 2])),
        ]),
        BTreeMap::new(),
    )
    .unwrap();
    assert!(m.gamma_depends_on_witness(2).unwrap());
    // a separated structure has a unique witness, so no dependence
    let m = chain_s3();
    assert!(!m.gamma_depends_on_witness(2).unwrap());
}

#[test]
fn gamma_of_fix_fam_top_is_the_product() {
    let m = crate::sheaf::lift_structure(&fixtures::fix_fam()).unwrap();
    let gamma = m.gamma_structure(m.frame().top()).unwrap();
    let product = crate::logic::FiniteStructure::product(&[
        &fixtures::point_structure(true),
        &fixtures::point_structure(false),
    ])
    .unwrap();
    assert!(gamma.find_isomorphism(&product).is_some());
}

#[test]
fn stored_witness_is_lexicographically_least() {
    // a non-separated carrier: two indistinguishable global elements, so
    // the constant admits two witnesses; the stored one is the least
    let s3 = fixtures::s3_arc();
    let carrier = Arc::new(
        HSet::new(
            s3,
            vec!["a".into(), "b".into()],
            vec![vec![2, 2], vec![2, 2]],
        )
        .unwrap(),
    );
    let lang = Language::new().with_function("c", 0).unwrap();
    // full table form: force the search
    let m = HStructure::new(
        lang,
        carrier,
        BTreeMap::from([("c".to_string(), FunctionSpec::Table(vec![2, 2]))]),
        BTreeMap::new(),
    )
    .unwrap();
    assert_eq!(m.function("c").witness, vec![0]);
    assert_eq!(m.alternate_witnesses("c"), vec![vec![0], vec![1]]);
}

use crate::logic::Formula;
