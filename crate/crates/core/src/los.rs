//! Filter quotients of Heyting-valued structures and the transfer checks:
//! genericity of filters, the Łoś-style biconditional between satisfaction
//! in the quotient's global sections and filter membership of translated
//! forcing values, the maximal-filter characterization with its
//! regular-algebra evidence, and the classical ultraproduct oracle.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::frame::{Elem, Filter, QuotientFrame, RegularAlgebra};
use crate::hmodel::{max_principle_variant, HStructure, MaxPrincipleReport, ModelError};
use crate::logic::{FiniteStructure, LogicError};
use crate::scan::{ForcingScan, ScanParams, TarskiScan};
use crate::sheaf::{SheafError, SheafStructure};
use crate::util::{rank, tuples};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LosError {
    #[error("improper filter (contains bottom) where a proper filter is required")]
    ImproperFilter,
    #[error("a factor has an empty universe and no constant can pick a global section")]
    EmptyFactorWithoutConstant,
    #[error("index {0} is out of range for the family")]
    BadIndex(usize),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("{0}")]
    Sheaf(#[from] SheafError),
    #[error("{0}")]
    Frame(#[from] crate::frame::FrameError),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

/// The filter quotient of a Heyting-valued structure: element classes under
/// the filter equivalence, the quotient frame as the new truth-value
/// object, descended interpretations, and the ordinary structure of global
/// classes.
#[derive(Debug, Clone)]
pub struct QuotientStructure {
    pub filter: Filter,
    pub quotient_frame: QuotientFrame,
    /// carrier index -> class id
    pub class_of: Vec<usize>,
    /// class id -> least representative carrier index
    pub reps: Vec<usize>,
    /// class ids whose extent class is the quotient top, ascending
    pub global_classes: Vec<usize>,
    /// the ordinary structure of global classes
    pub gamma: FiniteStructure,
    /// class id -> index into the gamma universe (global classes only)
    pub class_to_gamma: Vec<Option<usize>>,
}

/// `a ~ b` when `(delta(a) | delta(b)) => delta(a, b)` lies in the filter.
fn related(m: &HStructure, f: &Filter, a: usize, b: usize) -> bool {
    let frame = m.frame();
    let carrier = m.carrier();
    f.contains(frame.implies(
        frame.join(carrier.extent(a), carrier.extent(b)),
        carrier.alpha(a, b),
    ))
}

pub fn filter_quotient(m: &HStructure, f: &Filter) -> Result<QuotientStructure, LosError> {
    if !f.proper {
        return Err(LosError::ImproperFilter);
    }
    let frame = m.frame().clone();
    let carrier = m.carrier().clone();
    let size = carrier.len();

    // the relation is an equivalence; transitivity is a theorem of the
    // frame laws, asserted here over the whole carrier
    for a in 0..size {
        assert!(related(m, f, a, a), "filter relation must be reflexive");
        for b in 0..size {
            assert_eq!(related(m, f, a, b), related(m, f, b, a));
            for c in 0..size {
                if related(m, f, a, b) && related(m, f, b, c) {
                    assert!(related(m, f, a, c), "filter relation must be transitive");
                }
            }
        }
    }

    let mut class_of = vec![usize::MAX; size];
    let mut reps: Vec<usize> = Vec::new();
    for a in 0..size {
        match reps.iter().position(|&r| related(m, f, r, a)) {
            Some(c) => class_of[a] = c,
            None => {
                class_of[a] = reps.len();
                reps.push(a);
            }
        }
    }
    let quotient_frame = QuotientFrame::new(frame.clone(), f.clone())?;

    // well-definedness of the descended data under representative swaps
    for a in 0..size {
        for a2 in 0..size {
            if class_of[a] != class_of[a2] {
                continue;
            }
            for b in 0..size {
                assert_eq!(
                    quotient_frame.project(carrier.alpha(a, b)),
                    quotient_frame.project(carrier.alpha(a2, b)),
                    "quotient valuation depends on the representative"
                );
            }
        }
    }
    for (name, arity) in m.language().relations() {
        let interp = m.relation(name);
        for t in tuples(size, arity) {
            for (pos, &orig) in t.iter().enumerate() {
                for swap in 0..size {
                    if class_of[swap] != class_of[orig] {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2[pos] = swap;
                    assert_eq!(
                        quotient_frame.project(interp.values[rank(&t, size)]),
                        quotient_frame.project(interp.values[rank(&t2, size)]),
                        "quotient relation {name} depends on the representative"
                    );
                }
            }
        }
    }
    for (name, arity) in m.language().functions() {
        let interp = m.function(name);
        for t in tuples(size, arity) {
            for (pos, &orig) in t.iter().enumerate() {
                for swap in 0..size {
                    if class_of[swap] != class_of[orig] {
                        continue;
                    }
                    let mut t2 = t.clone();
                    t2[pos] = swap;
                    let img = interp.witness[rank(&t, size)];
                    let img2 = interp.witness[rank(&t2, size)];
                    assert!(
                        related(m, f, img, img2),
                        "descended witness of {name} depends on the representative"
                    );
                }
            }
        }
    }

    // global classes: the extent class is the quotient top
    let global_classes: Vec<usize> = (0..reps.len())
        .filter(|&c| f.contains(carrier.extent(reps[c])))
        .collect();
    let class_to_gamma: Vec<Option<usize>> = (0..reps.len())
        .map(|c| global_classes.iter().position(|&g| g == c))
        .collect();
    let universe: Vec<String> = global_classes
        .iter()
        .map(|&c| format!("[{}]", carrier.name(reps[c])))
        .collect();
    let gsize = global_classes.len();
    let mut functions = BTreeMap::new();
    for (name, arity) in m.language().functions() {
        let interp = m.function(name);
        let mut table = Vec::new();
        for t in tuples(gsize, arity) {
            let carrier_tuple: Vec<usize> =
                t.iter().map(|&g| reps[global_classes[g]]).collect();
            let image = interp.witness[rank(&carrier_tuple, size)];
            let image_gamma = class_to_gamma[class_of[image]]
                .expect("witness image of a global tuple is global");
            table.push(image_gamma);
        }
        functions.insert(name.to_string(), table);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in m.language().relations() {
        let interp = m.relation(name);
        let mut table = Vec::new();
        for t in tuples(gsize, arity) {
            let carrier_tuple: Vec<usize> =
                t.iter().map(|&g| reps[global_classes[g]]).collect();
            table.push(f.contains(interp.values[rank(&carrier_tuple, size)]));
        }
        relations.insert(name.to_string(), table);
    }
    let gamma = FiniteStructure::new(m.language().clone(), universe, functions, relations)?;
    Ok(QuotientStructure {
        filter: f.clone(),
        quotient_frame,
        class_of,
        reps,
        global_classes,
        gamma,
        class_to_gamma,
    })
}

/// For a sheaf-derived structure, the canonical map identifies the section
/// quotient with the global classes of the filter quotient, matching all
/// interpretations. Returns an error message on any mismatch.
pub fn verify_gamma_matches_sections(
    s: &SheafStructure,
    m: &HStructure,
    f: &Filter,
) -> Result<(), String> {
    let q = filter_quotient(m, f).map_err(|e| e.to_string())?;
    let sections = crate::sheaf::sections_quotient(s, f).map_err(|e| e.to_string())?;
    let p = s.presheaf();
    let g = f.generator();
    // canonical map: a section over the generator -> the class of its
    // carrier element
    let mut to_class = Vec::new();
    for sec in 0..p.section_count(g) {
        let idx = p.theta_index(g, sec);
        let class = q.class_of[idx];
        let gamma_idx = q.class_to_gamma[class]
            .ok_or_else(|| format!("section {sec} over the generator maps to a non-global class"))?;
        to_class.push(gamma_idx);
    }
    // bijective
    {
        let mut seen = vec![false; q.gamma.size()];
        for &g_idx in &to_class {
            if seen[g_idx] {
                return Err("canonical map is not injective".into());
            }
            seen[g_idx] = true;
        }
        if seen.iter().any(|&s| !s) {
            return Err("canonical map is not surjective onto the global classes".into());
        }
    }
    // interpretations match along the map
    for (name, arity) in s.language().functions() {
        for t in tuples(sections.size(), arity) {
            let lhs = to_class[sections.apply(name, &t)];
            let mapped: Vec<usize> = t.iter().map(|&i| to_class[i]).collect();
            let rhs = q.gamma.apply(name, &mapped);
            if lhs != rhs {
                return Err(format!("function {name} differs along the canonical map"));
            }
        }
    }
    for (name, arity) in s.language().relations() {
        for t in tuples(sections.size(), arity) {
            let lhs = sections.holds(name, &t);
            let mapped: Vec<usize> = t.iter().map(|&i| to_class[i]).collect();
            let rhs = q.gamma.holds(name, &mapped);
            if lhs != rhs {
                return Err(format!("relation {name} differs along the canonical map"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// genericity
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GenericFailure {
    pub formula: String,
    pub params: Vec<String>,
    /// the offending value and its negation value, by frame element name
    pub value: String,
    pub negated_value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GenericReport {
    pub depth: usize,
    pub generic: bool,
    pub checked: usize,
    pub dichotomy_failure: Option<GenericFailure>,
    /// untranslated dichotomy on atomic instances; the transfer theorem's
    /// atomic base case needs it, and maximal filters satisfy it for free
    pub atomic_failure: Option<GenericFailure>,
    pub witness_failure: Option<GenericFailure>,
}

/// Bounded genericity: the translated dichotomy for every closed instance
/// of an enumerated formula of depth at most `params.depth` (with at most
/// `params.max_params` distinct parameters), the untranslated dichotomy on
/// atomic instances, and the existential witness condition for quantified
/// formulas within the same depth bound.
///
/// The atomic clause is a deliberate strengthening: without it a filter can
/// satisfy both translated clauses while the transfer biconditional fails
/// on an atomic formula whose value is dense but not contained in the
/// filter (the translated value collapses to the double negation). On a
/// maximal filter the clause is automatic.
pub fn is_generic(m: &HStructure, f: &Filter, params: ScanParams) -> Result<GenericReport, LosError> {
    if !f.proper {
        return Err(LosError::ImproperFilter);
    }
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(m, &space);
    let frame = m.frame().clone();
    let mut checked = 0usize;
    let mut dichotomy_failure: Option<GenericFailure> = None;
    let mut atomic_failure: Option<GenericFailure> = None;
    for ctx in 0..=params.max_params {
        if dichotomy_failure.is_some() || atomic_failure.is_some() {
            break;
        }
        let f_tuples = scan.filter_tuples(ctx, f);
        scan.for_each(ctx, params.depth, |node| {
            if dichotomy_failure.is_some() || atomic_failure.is_some() {
                return;
            }
            let atomic = node.id.depth == 1;
            for &t in &f_tuples {
                checked += 1;
                let g = node.god[t];
                let neg = scan.neg_at(ctx, t, g);
                if !f.contains(g) && !f.contains(neg) {
                    dichotomy_failure = Some(GenericFailure {
                        formula: space.formula(node.id, node.node).to_string(),
                        params: tuple_names(m, ctx, t),
                        value: frame.name(g).to_string(),
                        negated_value: frame.name(neg).to_string(),
                    });
                    return;
                }
                if atomic {
                    let plain = node.rec[t];
                    let plain_neg = scan.neg_at(ctx, t, plain);
                    if !f.contains(plain) && !f.contains(plain_neg) {
                        atomic_failure = Some(GenericFailure {
                            formula: space.formula(node.id, node.node).to_string(),
                            params: tuple_names(m, ctx, t),
                            value: frame.name(plain).to_string(),
                            negated_value: frame.name(plain_neg).to_string(),
                        });
                        return;
                    }
                }
            }
        });
    }
    let mut witness_failure: Option<GenericFailure> = None;
    if dichotomy_failure.is_none() && atomic_failure.is_none() {
        let size = m.carrier().len();
        for ctx in 0..=params.max_params {
            if witness_failure.is_some() {
                break;
            }
            let f_tuples = scan.filter_tuples(ctx, f);
            let body_depth = space.materialized_depth(ctx + 1).min(params.depth - 1);
            scan.for_each(ctx + 1, body_depth, |body| {
                if witness_failure.is_some() {
                    return;
                }
                for &t in &f_tuples {
                    checked += 1;
                    let slice = scan.body_slice(body.god, t);
                    let exists_value = frame.join_all(slice.iter().copied());
                    if f.contains(exists_value) {
                        // witness search in ascending carrier order
                        let witness = (0..size).find(|&b| f.contains(slice[b]));
                        if witness.is_none() {
                            witness_failure = Some(GenericFailure {
                                formula: format!(
                                    "exists v{}. {}",
                                    ctx,
                                    space.formula(body.id, body.node)
                                ),
                                params: tuple_names(m, ctx, t),
                                value: frame.name(exists_value).to_string(),
                                negated_value: String::new(),
                            });
                            return;
                        }
                    }
                }
            });
        }
    }
    Ok(GenericReport {
        depth: params.depth,
        generic: dichotomy_failure.is_none()
            && atomic_failure.is_none()
            && witness_failure.is_none(),
        checked,
        dichotomy_failure,
        atomic_failure,
        witness_failure,
    })
}

// ---------------------------------------------------------------------
// the main transfer check
// ---------------------------------------------------------------------

/// One comparison row: classical satisfaction in the global sections of the
/// quotient against filter membership of the translated forcing value.
#[derive(Debug, Clone, Serialize)]
pub struct LosRow {
    pub formula: String,
    pub params: Vec<String>,
    pub gamma_sat: bool,
    pub forcing_value: String,
    pub in_filter: bool,
    pub pass: bool,
    /// set when the untranslated corollary comparison applies (Boolean
    /// frame or a forall-free formula)
    pub corollary_pass: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LosSummary {
    pub depth: usize,
    pub checked: usize,
    pub failed: usize,
    pub corollary_checked: usize,
    pub corollary_failed: usize,
}

impl LosSummary {
    pub fn pass(&self) -> bool {
        self.failed == 0 && self.corollary_failed == 0
    }
}

/// Runs the transfer comparison for every enumerated formula and every
/// parameter tuple whose extent lies in the filter, streaming rows to the
/// callback. When `emit_passes` is false only failing rows are emitted.
pub fn los_check(
    m: &HStructure,
    f: &Filter,
    params: ScanParams,
    emit_passes: bool,
    mut on_row: impl FnMut(&LosRow),
) -> Result<LosSummary, LosError> {
    if !f.proper {
        return Err(LosError::ImproperFilter);
    }
    let q = filter_quotient(m, f)?;
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(m, &space);
    let tarski = TarskiScan::build(&q.gamma, &space);
    let frame = m.frame().clone();
    let boolean = frame.is_boolean();
    let size = m.carrier().len();
    let gsize = q.gamma.size();
    let mut summary = LosSummary {
        depth: params.depth,
        checked: 0,
        failed: 0,
        corollary_checked: 0,
        corollary_failed: 0,
    };
    for ctx in 0..=params.max_params {
        let f_tuples = scan.filter_tuples(ctx, f);
        if f_tuples.is_empty() {
            continue;
        }
        // map each filter tuple to its tuple of global classes
        let gamma_rank: Vec<usize> = f_tuples
            .iter()
            .map(|&t| {
                let tuple = if ctx == 0 {
                    Vec::new()
                } else {
                    tuples(size, ctx)[t].clone()
                };
                let mapped: Vec<usize> = tuple
                    .iter()
                    .map(|&a| {
                        q.class_to_gamma[q.class_of[a]]
                            .expect("components of a filter tuple are global")
                    })
                    .collect();
                rank(&mapped, gsize)
            })
            .collect();
        scan.for_each(ctx, params.depth, |node| {
            let sat = tarski.node_values(ctx, node.node);
            for (pos, &t) in f_tuples.iter().enumerate() {
                summary.checked += 1;
                let gamma_sat = sat[gamma_rank[pos]];
                let value = node.god[t];
                let in_filter = f.contains(value);
                let pass = gamma_sat == in_filter;
                let corollary_applies = boolean || node.forall_free;
                let corollary_pass = if corollary_applies {
                    summary.corollary_checked += 1;
                    let plain_in = f.contains(node.rec[t]);
                    Some(gamma_sat == plain_in)
                } else {
                    None
                };
                if !pass {
                    summary.failed += 1;
                }
                if corollary_pass == Some(false) {
                    summary.corollary_failed += 1;
                }
                if !pass || corollary_pass == Some(false) || emit_passes {
                    on_row(&LosRow {
                        formula: space.formula(node.id, node.node).to_string(),
                        params: tuple_names(m, ctx, t),
                        gamma_sat,
                        forcing_value: frame.name(value).to_string(),
                        in_filter,
                        pass,
                        corollary_pass,
                    });
                }
            }
        });
    }
    Ok(summary)
}

// ---------------------------------------------------------------------
// the characterization of maximal-filter transfer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DCoverRow {
    /// regularized value of the translated existential
    pub exists_value: String,
    /// regularized witness instance values
    pub witness_values: Vec<String>,
    pub covered: bool,
}

#[derive(Debug, Clone)]
pub struct CharReport {
    pub variant: MaxPrincipleReport,
    pub generic_per_maximal: Vec<(String, GenericReport)>,
    pub los_per_maximal: Vec<(String, LosSummary)>,
    pub d_covers: Vec<DCoverRow>,
    /// maximal filter generators paired with the matching ultrafilter
    /// generators on the regular algebra
    pub spectrum_pairs: Vec<(String, String)>,
}

impl CharReport {
    pub fn all_pass(&self) -> bool {
        self.variant.holds()
            && self.generic_per_maximal.iter().all(|(_, g)| g.generic)
            && self.los_per_maximal.iter().all(|(_, s)| s.pass())
            && self.d_covers.iter().all(|row| row.covered)
    }
}

/// Verifies the three equivalent conditions at the given bound: the variant
/// maximum principle, genericity of every maximal filter, and the transfer
/// biconditional for every maximal filter; and attaches the regular-algebra
/// evidence (ultrafilter correspondence and finite basic-set covers for
/// each nonzero translated existential).
pub fn characterization_check(m: &HStructure, params: ScanParams) -> Result<CharReport, LosError> {
    let frame = m.frame().clone();
    let variant = max_principle_variant(m, params);
    let reg = RegularAlgebra::new(frame.clone());
    let spectrum_pairs: Vec<(String, String)> = reg
        .maximal_filters()
        .iter()
        .zip(reg.ultrafilters().iter())
        .map(|(mf, uf)| {
            (
                format!("up:{}", frame.name(mf.generator())),
                format!("up:{}", reg.algebra().name(uf.generator())),
            )
        })
        .collect();
    let mut generic_per_maximal = Vec::new();
    let mut los_per_maximal = Vec::new();
    for mf in reg.maximal_filters() {
        let label = format!("up:{}", frame.name(mf.generator()));
        generic_per_maximal.push((label.clone(), is_generic(m, mf, params)?));
        let summary = los_check(m, mf, params, false, |_| {})?;
        los_per_maximal.push((label, summary));
    }

    // basic-set covers: for each translated existential with nonzero value,
    // the witness instances cover its spectrum
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(m, &space);
    let size = m.carrier().len();
    let mut seen = std::collections::BTreeSet::new();
    let mut d_covers = Vec::new();
    for ctx in 0..=params.max_params {
        let body_depth = space.materialized_depth(ctx + 1).min(params.depth - 1);
        scan.for_each(ctx + 1, body_depth, |body| {
            let parent_count = scan.extent(ctx).len();
            for t in 0..parent_count {
                let exists_g = scan.exists_godel_from_body(ctx, body.god)[t];
                if exists_g == frame.bottom() {
                    continue;
                }
                let reg_exists = frame.neg(frame.neg(exists_g));
                let slice = scan.body_slice(body.god, t);
                let mut witness_values: Vec<Elem> =
                    (0..size).map(|b| frame.neg(frame.neg(slice[b]))).collect();
                witness_values.sort_unstable();
                witness_values.dedup();
                let key = (reg_exists, witness_values.clone());
                if !seen.insert(key) {
                    continue;
                }
                let target = reg.d_set(reg_exists);
                let mut union: Vec<usize> = witness_values
                    .iter()
                    .flat_map(|&w| reg.d_set(w))
                    .collect();
                union.sort_unstable();
                union.dedup();
                let covered = target.iter().all(|i| union.contains(i));
                d_covers.push(DCoverRow {
                    exists_value: frame.name(reg_exists).to_string(),
                    witness_values: witness_values
                        .iter()
                        .map(|&w| frame.name(w).to_string())
                        .collect(),
                    covered,
                });
            }
        });
    }
    Ok(CharReport { variant, generic_per_maximal, los_per_maximal, d_covers, spectrum_pairs })
}

// ---------------------------------------------------------------------
// the classical ultraproduct oracle
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct UltraReport {
    /// the quotient of the product by the principal ultrafilter
    pub ultraproduct: FiniteStructure,
    pub iso_to_factor: bool,
    pub iso_to_section_quotient: bool,
    pub iso_to_gamma: bool,
    pub checked: usize,
    pub failures: Vec<(String, Vec<String>)>,
}

impl UltraReport {
    pub fn pass(&self) -> bool {
        self.iso_to_factor
            && self.iso_to_section_quotient
            && self.iso_to_gamma
            && self.failures.is_empty()
    }
}

/// Builds the classical ultraproduct of a finite family along the principal
/// ultrafilter at `at`, compares it with the section quotient and the
/// quotient structure's global sections, and checks the classical
/// biconditional against the distinguished factor for every enumerated
/// formula.
pub fn classical_ultraproduct(
    index_names: &[&str],
    factors: &[FiniteStructure],
    at: usize,
    params: ScanParams,
) -> Result<UltraReport, LosError> {
    if at >= factors.len() {
        return Err(LosError::BadIndex(at));
    }
    if factors.iter().any(|f| f.size() == 0) {
        return Err(LosError::EmptyFactorWithoutConstant);
    }
    let language = factors[at].language().clone();

    // the quotient of the product by agreement on the ultrafilter: with a
    // principal ultrafilter this is agreement at the distinguished point
    let product = FiniteStructure::product(&factors.iter().collect::<Vec<_>>())?;
    let psize = product.size();
    let index_tuples = crate::util::mixed_tuples(
        &factors.iter().map(|f| f.size()).collect::<Vec<_>>(),
    );
    let mut class_of = vec![usize::MAX; psize];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..psize {
        match reps
            .iter()
            .position(|&r| index_tuples[r][at] == index_tuples[i][at])
        {
            Some(c) => class_of[i] = c,
            None => {
                class_of[i] = reps.len();
                reps.push(i);
            }
        }
    }
    let universe: Vec<String> = reps
        .iter()
        .map(|&r| format!("[{}]", product.element_name(r)))
        .collect();
    let mut functions = BTreeMap::new();
    for (name, arity) in language.functions() {
        let mut table = Vec::new();
        for t in tuples(reps.len(), arity) {
            let prod_tuple: Vec<usize> = t.iter().map(|&c| reps[c]).collect();
            table.push(class_of[product.apply(name, &prod_tuple)]);
        }
        functions.insert(name.to_string(), table);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in language.relations() {
        let mut table = Vec::new();
        for t in tuples(reps.len(), arity) {
            // {x : M_x |= R(a_x)} in the ultrafilter <=> holds at `at`
            let factor_tuple: Vec<usize> =
                t.iter().map(|&c| index_tuples[reps[c]][at]).collect();
            table.push(factors[at].holds(name, &factor_tuple));
        }
        relations.insert(name.to_string(), table);
    }
    let ultraproduct = FiniteStructure::new(language.clone(), universe, functions, relations)?;

    // sheaf route
    let family = crate::sheaf::discrete_family(index_names, factors)?;
    let frame = family.frame().clone();
    let point_elem = frame.elem_by_name(&format!("{{{}}}", index_names[at]))?;
    let uf = Filter::principal(frame.clone(), point_elem)?;
    let section_quotient = crate::sheaf::sections_quotient(&family, &uf)?;
    let m = crate::sheaf::lift_structure(&family)?;
    let q = filter_quotient(&m, &uf)?;
    let iso_to_factor = ultraproduct.find_isomorphism(&factors[at]).is_some();
    let iso_to_section_quotient =
        ultraproduct.find_isomorphism(&section_quotient).is_some();
    let iso_to_gamma = ultraproduct.find_isomorphism(&q.gamma).is_some();

    // elementary agreement with the distinguished factor: the classical
    // biconditional for every enumerated formula and parameter tuple
    let space = params.space_for(&language);
    let up_scan = TarskiScan::build(&ultraproduct, &space);
    let factor_scan = TarskiScan::build(&factors[at], &space);
    let usize_up = ultraproduct.size();
    // class -> factor element at the distinguished point
    let to_factor: Vec<usize> = reps.iter().map(|&r| index_tuples[r][at]).collect();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for ctx in 0..=params.max_params {
        up_scan.for_each(ctx, params.depth, |node| {
            let factor_sat = factor_scan.node_values(ctx, node.node);
            for (t_idx, t) in tuples(usize_up, ctx).iter().enumerate() {
                checked += 1;
                let mapped: Vec<usize> = t.iter().map(|&c| to_factor[c]).collect();
                let rhs = factor_sat[rank(&mapped, factors[at].size())];
                if node.sat[t_idx] != rhs {
                    failures.push((
                        space.formula(node.id, node.node).to_string(),
                        t.iter().map(|&c| ultraproduct.element_name(c).to_string()).collect(),
                    ));
                }
            }
        });
    }
    Ok(UltraReport {
        ultraproduct,
        iso_to_factor,
        iso_to_section_quotient,
        iso_to_gamma,
        checked,
        failures,
    })
}

fn tuple_names(m: &HStructure, ctx: usize, t: usize) -> Vec<String> {
    if ctx == 0 {
        return Vec::new();
    }
    let size = m.carrier().len();
    tuples(size, ctx)[t]
        .iter()
        .map(|&a| m.carrier().name(a).to_string())
        .collect()
}

#[cfg(test)]
mod tests;
