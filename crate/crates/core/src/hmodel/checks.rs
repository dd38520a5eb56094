//! Maximum-principle checks (full and finite-witness-family variants) and
//! the mixing property, scanned over the bounded formula space.

use crate::frame::Elem;
use crate::scan::{ForcingScan, ScanParams};

use super::HStructure;

/// One failing or succeeding instance of a maximum-principle scan.
#[derive(Debug, Clone)]
pub struct MaxPrincipleRow {
    pub formula: String,
    pub params: Vec<String>,
    pub exists_value: Elem,
    /// witnesses found (carrier names); empty when the check failed
    pub witnesses: Vec<String>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct MaxPrincipleReport {
    pub mode: &'static str,
    pub depth: usize,
    pub checked: usize,
    pub failures: Vec<MaxPrincipleRow>,
}

impl MaxPrincipleReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Full maximum principle: for every body `phi(.., v)` and parameter tuple,
/// some witness `b` satisfies
/// `||phi(b)|| <= ||exists v phi|| <= ||~~phi(b)||`.
pub fn max_principle_full(m: &HStructure, params: ScanParams) -> MaxPrincipleReport {
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(m, &space);
    let frame = m.frame().clone();
    let size = m.carrier().len();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for parent_ctx in 0..=params.max_params {
        let body_depth = space.materialized_depth(parent_ctx + 1).min(params.depth - 1);
        scan.for_each(parent_ctx + 1, body_depth, |body| {
            let parent_count = scan.extent(parent_ctx).len();
            for t in 0..parent_count {
                checked += 1;
                let slice = scan.body_slice(body.rec, t);
                let exists_value = frame.join_all(slice.iter().copied());
                let witness = (0..size).find(|&b| {
                    let inst = slice[b];
                    // first inequality holds by construction of the join
                    let ext = frame.meet(scan.extent(parent_ctx)[t], m.carrier().extent(b));
                    let nn = frame.meet(
                        ext,
                        frame.implies(frame.meet(ext, frame.implies(inst, frame.bottom())), frame.bottom()),
                    );
                    frame.leq(exists_value, nn)
                });
                if witness.is_none() {
                    failures.push(MaxPrincipleRow {
                        formula: space.formula(body.id, body.node).to_string(),
                        params: tuple_names(m, parent_ctx, t),
                        exists_value,
                        witnesses: Vec::new(),
                        pass: false,
                    });
                }
            }
        });
    }
    MaxPrincipleReport { mode: "full", depth: params.depth, checked, failures }
}

/// Variant maximum principle: a finite witness family `b_1..b_r` with
/// `join_i ||phi^G(b_i)|| <= ||exists v phi^G|| <= ~~ join_i ||phi^G(b_i)||`.
/// Returns the witness list found for each instance (the whole carrier
/// always works at finite scale; smaller lists are preferred).
pub fn max_principle_variant(m: &HStructure, params: ScanParams) -> MaxPrincipleReport {
    let space = params.space_for(m.language());
    let scan = ForcingScan::build(m, &space);
    let frame = m.frame().clone();
    let size = m.carrier().len();
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for parent_ctx in 0..=params.max_params {
        let body_depth = space.materialized_depth(parent_ctx + 1).min(params.depth - 1);
        scan.for_each(parent_ctx + 1, body_depth, |body| {
            let parent_count = scan.extent(parent_ctx).len();
            for t in 0..parent_count {
                checked += 1;
                let slice = scan.body_slice(body.god, t);
                let exists_value = frame.join_all(slice.iter().copied());
                // prefer a single witness, then fall back to the carrier
                let single = (0..size).find(|&b| {
                    let v = slice[b];
                    frame.leq(exists_value, frame.neg(frame.neg(v)))
                });
                let witnesses: Vec<usize> = match single {
                    Some(b) => vec![b],
                    None => (0..size).collect(),
                };
                let join: Elem =
                    frame.join_all(witnesses.iter().map(|&b| slice[b]));
                let ok = frame.leq(join, exists_value)
                    && frame.leq(exists_value, frame.neg(frame.neg(join)));
                if !ok {
                    failures.push(MaxPrincipleRow {
                        formula: space.formula(body.id, body.node).to_string(),
                        params: tuple_names(m, parent_ctx, t),
                        exists_value,
                        witnesses: Vec::new(),
                        pass: false,
                    });
                }
            }
        });
    }
    MaxPrincipleReport { mode: "variant", depth: params.depth, checked, failures }
}

#[derive(Debug, Clone)]
pub struct MixingFailure {
    pub antichain: Vec<String>,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct MixingReport {
    pub checked: usize,
    pub failures: Vec<MixingFailure>,
}

impl MixingReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Mixing property: for every antichain `U_1..U_k` (pairwise disjoint,
/// nonzero) and elements `a_i` with `U_i <= extent(a_i)`, some `a`
/// satisfies `U_i <= alpha(a, a_i)` for all `i`.
pub fn mixing_check(m: &HStructure, max_antichain: usize) -> MixingReport {
    let frame = m.frame().clone();
    let carrier = m.carrier().clone();
    let nonzero: Vec<Elem> = frame.elements().filter(|&u| u != frame.bottom()).collect();
    let mut antichains: Vec<Vec<Elem>> = vec![Vec::new()];
    for &u in &nonzero {
        let mut extended = Vec::new();
        for chain in &antichains {
            if chain.len() < max_antichain
                && chain.iter().all(|&v| frame.meet(u, v) == frame.bottom())
                && chain.iter().all(|&v| v < u)
            {
                let mut c2 = chain.clone();
                c2.push(u);
                extended.push(c2);
            }
        }
        antichains.extend(extended);
    }
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for chain in antichains.iter().filter(|c| !c.is_empty()) {
        // all assignments of elements whose extents dominate the pieces
        let choices: Vec<Vec<usize>> = chain
            .iter()
            .map(|&u| {
                carrier
                    .elements()
                    .filter(|&a| frame.leq(u, carrier.extent(a)))
                    .collect()
            })
            .collect();
        for assignment in crate::util::mixed_tuples(
            &choices.iter().map(|c| c.len()).collect::<Vec<_>>(),
        ) {
            let elements: Vec<usize> =
                assignment.iter().enumerate().map(|(i, &j)| choices[i][j]).collect();
            checked += 1;
            let found = carrier.elements().any(|a| {
                chain
                    .iter()
                    .zip(elements.iter())
                    .all(|(&u, &ai)| frame.leq(u, carrier.alpha(a, ai)))
            });
            if !found {
                failures.push(MixingFailure {
                    antichain: chain.iter().map(|&u| frame.name(u).to_string()).collect(),
                    elements: elements
                        .iter()
                        .map(|&a| carrier.name(a).to_string())
                        .collect(),
                });
            }
        }
    }
    MixingReport { checked, failures }
}

fn tuple_names(m: &HStructure, ctx: usize, t: usize) -> Vec<String> {
    let size = m.carrier().len();
    if ctx == 0 {
        return Vec::new();
    }
    crate::util::tuples(size, ctx)[t]
        .iter()
        .map(|&a| m.carrier().name(a).to_string())
        .collect()
}
