//! Forcing values along two independent paths.
//!
//! The recursion path computes the inductive clauses directly on value
//! vectors over tuple spaces; term morphisms are evaluated both as tables
//! and through the stored representing maps, and the two are asserted
//! equal. The categorical path builds the interpretation of a
//! formula-in-context as a subobject of the carrier power, reusing the
//! generic finite-limit, image and adjoint machinery, and reads the value
//! off the strict relation. Parameters are handled by extending the context
//! and instantiating, so non-global elements are valid parameters.

use std::sync::Arc;

use crate::frame::Elem;
use crate::hset::{
    equalizer, forall_along, from_mono, image_factorization, pullback_sub, HMorphism, HSet,
    StrictRelation,
};
use crate::logic::{Context, Formula, Term};
use crate::util::rank;

use super::{HStructure, ModelError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    Recursion,
    Categorical,
}

#[derive(Debug, Clone)]
pub struct ForcingReport {
    pub formula: String,
    pub params: Vec<String>,
    pub value: Elem,
    pub value_name: String,
    /// per-subformula values at the given parameters, for subformulas whose
    /// context is the root context (quantified bodies are aggregated)
    pub trace: Vec<(String, Elem)>,
    pub path: EvalPath,
}

/// The forcing value of `phi` at explicit arguments for its context.
/// Parameters embedded in the formula are lifted into extra context slots.
pub fn forcing_value(
    m: &HStructure,
    phi: &Formula,
    ctx: &Context,
    args: &[usize],
    path: EvalPath,
) -> Result<ForcingReport, ModelError> {
    if args.len() != ctx.len() {
        return Err(ModelError::ContextMismatch(format!(
            "{} arguments for a context of length {}",
            args.len(),
            ctx.len()
        )));
    }
    for &a in args {
        if a >= m.carrier().len() {
            return Err(ModelError::UnknownParameter(format!("#{a}")));
        }
    }
    let (phi2, ctx2, args2, fresh) = lift_params(m, phi, ctx, args)?;
    ctx2.suits(&phi2)?;
    let root = rank(&args2, m.carrier().len());
    let (value, trace) = match path {
        EvalPath::Recursion => {
            let mut trace = Vec::new();
            let vals = rec_vector(m, &phi2, ctx2.vars(), Some(root), &mut trace, &fresh)?;
            (vals[root], trace)
        }
        EvalPath::Categorical => {
            let rel = cat_relation(m, &phi2, ctx2.vars())?;
            (rel.at(root), Vec::new())
        }
    };
    let carrier_names = m.carrier().names();
    Ok(ForcingReport {
        formula: format!("{}", phi.display_with(carrier_names)),
        params: args.iter().map(|&a| carrier_names[a].clone()).collect(),
        value,
        value_name: m.frame().name(value).to_string(),
        trace,
        path,
    })
}

/// The full forcing vector of a formula-in-context over all argument
/// tuples (the strict relation interpreting the formula).
pub fn forcing_relation(
    m: &HStructure,
    phi: &Formula,
    ctx: &Context,
    path: EvalPath,
) -> Result<Vec<Elem>, ModelError> {
    ctx.suits(phi)?;
    match path {
        EvalPath::Recursion => {
            let mut trace = Vec::new();
            rec_vector(m, phi, ctx.vars(), None, &mut trace, &[])
        }
        EvalPath::Categorical => Ok(cat_relation(m, phi, ctx.vars())?.values().to_vec()),
    }
}

/// Replaces `Term::Param(i)` by fresh context variables appended at the
/// end, returning the rewritten formula, extended context and arguments.
fn lift_params(
    m: &HStructure,
    phi: &Formula,
    ctx: &Context,
    args: &[usize],
) -> Result<(Formula, Context, Vec<usize>, Vec<(String, usize)>), ModelError> {
    let mut params = Vec::new();
    collect_params(phi, &mut params);
    params.sort_unstable();
    params.dedup();
    for &p in &params {
        if p >= m.carrier().len() {
            return Err(ModelError::UnknownParameter(format!("#{p}")));
        }
    }
    let mut fresh = Vec::new();
    let mut phi2 = phi.clone();
    let mut vars = ctx.vars().to_vec();
    let mut args2 = args.to_vec();
    for (k, &p) in params.iter().enumerate() {
        let mut name = format!("_p{k}");
        while vars.contains(&name) {
            name.push('_');
        }
        phi2 = subst_param(&phi2, p, &name);
        vars.push(name.clone());
        args2.push(p);
        fresh.push((name, p));
    }
    let ctx2 = Context::new(vars)?;
    Ok((phi2, ctx2, args2, fresh))
}

fn collect_params(phi: &Formula, out: &mut Vec<usize>) {
    fn term(t: &Term, out: &mut Vec<usize>) {
        match t {
            Term::Param(i) => out.push(*i),
            Term::App(_, args) => args.iter().for_each(|a| term(a, out)),
            Term::Var(_) => {}
        }
    }
    match phi {
        Formula::True | Formula::False => {}
        Formula::Rel(_, args) => args.iter().for_each(|t| term(t, out)),
        Formula::Eq(s, t) => {
            term(s, out);
            term(t, out);
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
            collect_params(l, out);
            collect_params(r, out);
        }
        Formula::Forall(_, b) | Formula::Exists(_, b) => collect_params(b, out),
    }
}

fn subst_param(phi: &Formula, param: usize, var: &str) -> Formula {
    fn term(t: &Term, param: usize, var: &str) -> Term {
        match t {
            Term::Param(i) if *i == param => Term::Var(var.to_string()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| term(a, param, var)).collect())
            }
            _ => t.clone(),
        }
    }
    match phi {
        Formula::True | Formula::False => phi.clone(),
        Formula::Rel(r, args) => {
            Formula::Rel(r.clone(), args.iter().map(|t| term(t, param, var)).collect())
        }
        Formula::Eq(s, t) => Formula::Eq(term(s, param, var), term(t, param, var)),
        Formula::And(l, r) => Formula::and(subst_param(l, param, var), subst_param(r, param, var)),
        Formula::Or(l, r) => Formula::or(subst_param(l, param, var), subst_param(r, param, var)),
        Formula::Implies(l, r) => {
            Formula::implies(subst_param(l, param, var), subst_param(r, param, var))
        }
        Formula::Forall(v, b) => Formula::Forall(v.clone(), Box::new(subst_param(b, param, var))),
        Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(subst_param(b, param, var))),
    }
}

/// Restores lifted parameters for display in traces.
fn unlift(phi: &Formula, fresh: &[(String, usize)]) -> Formula {
    let mut out = phi.clone();
    for (name, p) in fresh {
        out = subst_var_to_param(&out, name, *p);
    }
    out
}

fn subst_var_to_param(phi: &Formula, var: &str, param: usize) -> Formula {
    fn term(t: &Term, var: &str, param: usize) -> Term {
        match t {
            Term::Var(v) if v == var => Term::Param(param),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| term(a, var, param)).collect())
            }
            _ => t.clone(),
        }
    }
    match phi {
        Formula::True | Formula::False => phi.clone(),
        Formula::Rel(r, args) => {
            Formula::Rel(r.clone(), args.iter().map(|t| term(t, var, param)).collect())
        }
        Formula::Eq(s, t) => Formula::Eq(term(s, var, param), term(t, var, param)),
        Formula::And(l, r) => Formula::and(
            subst_var_to_param(l, var, param),
            subst_var_to_param(r, var, param),
        ),
        Formula::Or(l, r) => Formula::or(
            subst_var_to_param(l, var, param),
            subst_var_to_param(r, var, param),
        ),
        Formula::Implies(l, r) => Formula::implies(
            subst_var_to_param(l, var, param),
            subst_var_to_param(r, var, param),
        ),
        Formula::Forall(v, b) => {
            Formula::Forall(v.clone(), Box::new(subst_var_to_param(b, var, param)))
        }
        Formula::Exists(v, b) => {
            Formula::Exists(v.clone(), Box::new(subst_var_to_param(b, var, param)))
        }
    }
}

/// Extent of a context tuple: the meet of component extents (top for the
/// empty tuple).
fn tuple_extent(m: &HStructure, ctx_len: usize) -> Vec<Elem> {
    let size = m.carrier().len();
    let frame = m.frame();
    let count = size.checked_pow(ctx_len as u32).unwrap_or(1);
    if ctx_len == 0 {
        return vec![frame.top()];
    }
    let mut out = Vec::with_capacity(count);
    for t in crate::util::tuples(size, ctx_len) {
        out.push(frame.meet_all(t.iter().map(|&a| m.carrier().extent(a))));
    }
    out
}

// ---------------------------------------------------------------------
// recursion path
// ---------------------------------------------------------------------

/// Term table over (tuple, target): the interpretation of a term-in-context
/// as a morphism table, computed by the inductive composite formula and
/// cross-checked against the representing-map route.
pub(crate) fn term_table(
    m: &HStructure,
    term: &Term,
    ctx_vars: &[String],
) -> Result<Vec<Elem>, ModelError> {
    let size = m.carrier().len();
    let frame = m.frame();
    let n = ctx_vars.len();
    let count = size.checked_pow(n as u32).unwrap_or(1);
    let extents = tuple_extent(m, n);
    let table = match term {
        Term::Var(v) => {
            let pos = ctx_vars
                .iter()
                .rposition(|w| w == v)
                .ok_or_else(|| ModelError::ContextMismatch(format!("unbound variable {v}")))?;
            let mut table = vec![0; count * size];
            for (t_idx, t) in crate::util::tuples(size, n).iter().enumerate() {
                for b in 0..size {
                    table[t_idx * size + b] =
                        frame.meet(extents[t_idx], m.carrier().alpha(t[pos], b));
                }
            }
            table
        }
        Term::Param(_) => {
            return Err(ModelError::ContextMismatch(
                "parameters must be lifted into the context before evaluation".into(),
            ))
        }
        Term::App(f, args) => {
            let interp = m.function(f);
            let arg_tables: Vec<Vec<Elem>> = args
                .iter()
                .map(|a| term_table(m, a, ctx_vars))
                .collect::<Result<_, _>>()?;
            let arity = interp.arity;
            let arg_tuples = crate::util::tuples(size, arity);
            let mut table = vec![0; count * size];
            for t_idx in 0..count {
                for b in 0..size {
                    // join over intermediate tuples of the tupling meet
                    let mut acc = frame.bottom();
                    for (bt_idx, bt) in arg_tuples.iter().enumerate() {
                        let mut meet = if arity == 0 { extents[t_idx] } else { frame.top() };
                        for (i, &bi) in bt.iter().enumerate() {
                            meet = frame.meet(meet, arg_tables[i][t_idx * size + bi]);
                        }
                        acc = frame.join(acc, frame.meet(meet, interp.table[bt_idx * size + b]));
                    }
                    table[t_idx * size + b] = acc;
                }
            }
            table
        }
    };
    // representing-map route: the syntactic composite of witnesses is a
    // representing map of the term morphism; the derived table must agree
    if count > 0 {
        if let Some(witness) = term_witness(m, term, ctx_vars)? {
            for t_idx in 0..count {
                for b in 0..size {
                    let via_map =
                        frame.meet(extents[t_idx], m.carrier().alpha(witness[t_idx], b));
                    assert_eq!(
                        table[t_idx * size + b],
                        via_map,
                        "term table and representing-map route disagree for {term}"
                    );
                }
            }
        }
    }
    Ok(table)
}

/// The syntactic representing map of a term: witnesses composed over
/// projections. Returns the image tuple per context tuple.
fn term_witness(
    m: &HStructure,
    term: &Term,
    ctx_vars: &[String],
) -> Result<Option<Vec<usize>>, ModelError> {
    let size = m.carrier().len();
    let n = ctx_vars.len();
    let count = size.checked_pow(n as u32).unwrap_or(1);
    match term {
        Term::Var(v) => {
            let pos = ctx_vars
                .iter()
                .rposition(|w| w == v)
                .ok_or_else(|| ModelError::ContextMismatch(format!("unbound variable {v}")))?;
            Ok(Some(
                crate::util::tuples(size, n).iter().map(|t| t[pos]).collect(),
            ))
        }
        Term::Param(_) => Err(ModelError::ContextMismatch(
            "parameters must be lifted into the context before evaluation".into(),
        )),
        Term::App(f, args) => {
            let interp = m.function(f);
            let mut arg_witnesses = Vec::new();
            for a in args {
                match term_witness(m, a, ctx_vars)? {
                    Some(w) => arg_witnesses.push(w),
                    None => return Ok(None),
                }
            }
            let mut out = Vec::with_capacity(count);
            for t_idx in 0..count {
                let image_tuple: Vec<usize> =
                    arg_witnesses.iter().map(|w| w[t_idx]).collect();
                out.push(interp.witness[rank(&image_tuple, size)]);
            }
            Ok(Some(out))
        }
    }
}

/// The inductive forcing clauses on value vectors. `trace_rank` points at
/// the tuple whose per-subformula values are collected.
fn rec_vector(
    m: &HStructure,
    phi: &Formula,
    ctx_vars: &[String],
    trace_rank: Option<usize>,
    trace: &mut Vec<(String, Elem)>,
    fresh: &[(String, usize)],
) -> Result<Vec<Elem>, ModelError> {
    let size = m.carrier().len();
    let frame = m.frame().clone();
    let n = ctx_vars.len();
    let count = size.checked_pow(n as u32).unwrap_or(1);
    let extents = tuple_extent(m, n);
    let vals: Vec<Elem> = match phi {
        Formula::True => extents.clone(),
        Formula::False => vec![frame.bottom(); count],
        Formula::Rel(r, args) => {
            let interp = m.relation(r).clone();
            let arg_tables: Vec<Vec<Elem>> = args
                .iter()
                .map(|a| term_table(m, a, ctx_vars))
                .collect::<Result<_, _>>()?;
            let arity = interp.arity;
            let arg_tuples = crate::util::tuples(size, arity);
            (0..count)
                .map(|t_idx| {
                    let mut acc = frame.bottom();
                    for (bt_idx, bt) in arg_tuples.iter().enumerate() {
                        let mut meet = if arity == 0 { extents[t_idx] } else { frame.top() };
                        for (i, &bi) in bt.iter().enumerate() {
                            meet = frame.meet(meet, arg_tables[i][t_idx * size + bi]);
                        }
                        acc = frame.join(acc, frame.meet(meet, interp.values[bt_idx]));
                    }
                    acc
                })
                .collect()
        }
        Formula::Eq(s, t) => {
            let st = term_table(m, s, ctx_vars)?;
            let tt = term_table(m, t, ctx_vars)?;
            (0..count)
                .map(|t_idx| {
                    let mut acc = frame.bottom();
                    for b in 0..size {
                        for c in 0..size {
                            acc = frame.join(
                                acc,
                                frame.meet(
                                    frame.meet(st[t_idx * size + b], tt[t_idx * size + c]),
                                    m.carrier().alpha(b, c),
                                ),
                            );
                        }
                    }
                    acc
                })
                .collect()
        }
        Formula::And(l, r) => {
            let lv = rec_vector(m, l, ctx_vars, trace_rank, trace, fresh)?;
            let rv = rec_vector(m, r, ctx_vars, trace_rank, trace, fresh)?;
            lv.iter().zip(rv.iter()).map(|(&x, &y)| frame.meet(x, y)).collect()
        }
        Formula::Or(l, r) => {
            let lv = rec_vector(m, l, ctx_vars, trace_rank, trace, fresh)?;
            let rv = rec_vector(m, r, ctx_vars, trace_rank, trace, fresh)?;
            lv.iter().zip(rv.iter()).map(|(&x, &y)| frame.join(x, y)).collect()
        }
        Formula::Implies(l, r) => {
            let lv = rec_vector(m, l, ctx_vars, trace_rank, trace, fresh)?;
            let rv = rec_vector(m, r, ctx_vars, trace_rank, trace, fresh)?;
            (0..count)
                .map(|i| frame.meet(extents[i], frame.implies(lv[i], rv[i])))
                .collect()
        }
        Formula::Forall(v, body) => {
            let mut inner_vars = ctx_vars.to_vec();
            inner_vars.push(v.clone());
            let bv = rec_vector(m, body, &inner_vars, None, trace, fresh)?;
            (0..count)
                .map(|t_idx| {
                    let mut acc = extents[t_idx];
                    for b in 0..size {
                        acc = frame.meet(
                            acc,
                            frame.implies(m.carrier().extent(b), bv[t_idx * size + b]),
                        );
                    }
                    acc
                })
                .collect()
        }
        Formula::Exists(v, body) => {
            let mut inner_vars = ctx_vars.to_vec();
            inner_vars.push(v.clone());
            let bv = rec_vector(m, body, &inner_vars, None, trace, fresh)?;
            (0..count)
                .map(|t_idx| {
                    frame.join_all((0..size).map(|b| bv[t_idx * size + b]))
                })
                .collect()
        }
    };
    if let Some(r) = trace_rank {
        let shown = unlift(phi, fresh);
        trace.push((format!("{}", shown.display_with(m.carrier().names())), vals[r]));
    }
    Ok(vals)
}

// ---------------------------------------------------------------------
// categorical path
// ---------------------------------------------------------------------

/// Term interpretation as a morphism, built from projections, tupling and
/// the stored function morphisms through the generic machinery.
pub(crate) fn term_morphism(
    m: &HStructure,
    term: &Term,
    ctx_vars: &[String],
) -> Result<HMorphism, ModelError> {
    let power = m.carrier().power(ctx_vars.len());
    match term {
        Term::Var(v) => {
            let pos = ctx_vars
                .iter()
                .rposition(|w| w == v)
                .ok_or_else(|| ModelError::ContextMismatch(format!("unbound variable {v}")))?;
            let size = m.carrier().len();
            let map: Vec<usize> = crate::util::tuples(size, ctx_vars.len())
                .iter()
                .map(|t| t[pos])
                .collect();
            Ok(HMorphism::from_map(power, m.carrier().clone(), &map)?)
        }
        Term::Param(_) => Err(ModelError::ContextMismatch(
            "parameters must be lifted into the context before evaluation".into(),
        )),
        Term::App(f, args) => {
            let arg_morphisms: Vec<HMorphism> = args
                .iter()
                .map(|a| term_morphism(m, a, ctx_vars))
                .collect::<Result<_, _>>()?;
            let tupled = tupling(m, &power, &arg_morphisms)?;
            Ok(tupled.compose(&m.function_morphism(f))?)
        }
    }
}

/// The mediating morphism into a power induced by component morphisms:
/// `(t, b-tuple) -> meet_i phi_i(t, b_i)`.
fn tupling(
    m: &HStructure,
    dom: &Arc<HSet>,
    components: &[HMorphism],
) -> Result<HMorphism, ModelError> {
    let frame = m.frame();
    let size = m.carrier().len();
    let arity = components.len();
    let cod = m.carrier().power(arity);
    let mut table = vec![0; dom.len() * cod.len()];
    for t in dom.elements() {
        for (bt_idx, bt) in crate::util::tuples(size, arity).iter().enumerate() {
            let mut meet = dom.extent(t);
            for (i, &bi) in bt.iter().enumerate() {
                meet = frame.meet(meet, components[i].at(t, bi));
            }
            table[t * cod.len() + bt_idx] = meet;
        }
    }
    Ok(HMorphism::new(dom.clone(), cod, table)?)
}

/// The projection `M^(n+1) -> M^n` dropping the last coordinate,
/// represented by the coordinate map.
fn projection(m: &HStructure, n: usize) -> Result<HMorphism, ModelError> {
    let size = m.carrier().len();
    let dom = m.carrier().power(n + 1);
    let cod = m.carrier().power(n);
    let map: Vec<usize> = crate::util::tuples(size, n + 1)
        .iter()
        .map(|t| rank(&t[..n], size))
        .collect();
    Ok(HMorphism::from_map(dom, cod, &map)?)
}

/// Builds the subobject interpreting a formula-in-context through the
/// generic categorical operations.
pub(crate) fn cat_relation(
    m: &HStructure,
    phi: &Formula,
    ctx_vars: &[String],
) -> Result<StrictRelation, ModelError> {
    let power = m.carrier().power(ctx_vars.len());
    Ok(match phi {
        Formula::True => StrictRelation::top(power),
        Formula::False => StrictRelation::bottom(power),
        Formula::Rel(r, args) => {
            let arg_morphisms: Vec<HMorphism> = args
                .iter()
                .map(|a| term_morphism(m, a, ctx_vars))
                .collect::<Result<_, _>>()?;
            let tupled = tupling(m, &power, &arg_morphisms)?;
            pullback_sub(&tupled, &m.relation_strict(r))
        }
        Formula::Eq(s, t) => {
            let sm = term_morphism(m, s, ctx_vars)?;
            let tm = term_morphism(m, t, ctx_vars)?;
            let (_, incl) = equalizer(&sm, &tm)?;
            from_mono(&incl)
        }
        Formula::And(l, r) => {
            cat_relation(m, l, ctx_vars)?.meet(&cat_relation(m, r, ctx_vars)?)
        }
        Formula::Or(l, r) => cat_relation(m, l, ctx_vars)?.join(&cat_relation(m, r, ctx_vars)?),
        Formula::Implies(l, r) => {
            cat_relation(m, l, ctx_vars)?.implies(&cat_relation(m, r, ctx_vars)?)
        }
        Formula::Exists(v, body) => {
            let mut inner_vars = ctx_vars.to_vec();
            inner_vars.push(v.clone());
            let tau = cat_relation(m, body, &inner_vars)?;
            // the image of the composite (subobject of M^(n+1)) -> M^n
            let (_, mono) = tau.to_mono();
            let pi = projection(m, ctx_vars.len())?;
            let composite = mono.compose(&pi)?;
            let (_, _, image_mono) = image_factorization(&composite)?;
            from_mono(&image_mono)
        }
        Formula::Forall(v, body) => {
            let mut inner_vars = ctx_vars.to_vec();
            inner_vars.push(v.clone());
            let tau = cat_relation(m, body, &inner_vars)?;
            let pi = projection(m, ctx_vars.len())?;
            forall_along(&pi, &tau)
        }
    })
}
