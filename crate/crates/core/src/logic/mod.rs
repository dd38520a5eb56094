//! Single-sorted first-order syntax: languages, terms, formulas-in-context,
//! a text parser, the double-negation (Gödel) translation, and classical
//! Tarski evaluation over finite structures.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub(crate) mod enumerate;
mod parse;
mod random;
mod structure;

pub use enumerate::{BinOp, FormulaSpace, Node, NodeId, Quantifier, SpaceParams, TermShape};
pub use parse::{parse_formula, parse_formula_in_context, parse_formula_with_params, parse_term};
pub use random::{random_formula, random_term};
pub use structure::FiniteStructure;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("arity error at column {col}: {symbol} expects {expected} arguments, got {got}")]
    Arity { col: usize, symbol: String, expected: usize, got: usize },
    #[error("unknown symbol `{name}` at column {col}")]
    UnknownSymbol { name: String, col: usize },
    #[error("duplicate context variable `{0}`")]
    DuplicateContextVariable(String),
    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(String),
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("free variable `{0}` is not in the context")]
    FreeVariableNotInContext(String),
    #[error("{0}")]
    Structure(String),
}

/// Function and relation symbols with arities. Symbol names are unique
/// across both sorts; arity-0 functions are constants.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Language {
    functions: BTreeMap<String, usize>,
    relations: BTreeMap<String, usize>,
}

impl Language {
    pub fn new() -> Language {
        Language::default()
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Language, LogicError> {
        if self.functions.contains_key(name) || self.relations.contains_key(name) {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        self.functions.insert(name.to_string(), arity);
        Ok(self)
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Language, LogicError> {
        if self.functions.contains_key(name) || self.relations.contains_key(name) {
            return Err(LogicError::DuplicateSymbol(name.to_string()));
        }
        self.relations.insert(name.to_string(), arity);
        Ok(self)
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations.get(name).copied()
    }

    /// Function symbols in deterministic (name) order.
    pub fn functions(&self) -> impl Iterator<Item = (&str, usize)> {
        self.functions.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.relations.iter().map(|(n, &a)| (n.as_str(), a))
    }

    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.functions
            .iter()
            .filter(|(_, &a)| a == 0)
            .map(|(n, _)| n.as_str())
    }

    pub fn has_constant(&self) -> bool {
        self.constants().next().is_some()
    }
}

/// Terms over a language, with parameters as direct carrier references so
/// that enumerated formulas cannot alias on names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
    Param(usize),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::App(name.to_string(), Vec::new())
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|t| t.free_vars(out)),
            Term::Param(_) => {}
        }
    }

    pub fn substitute(&self, var: &str, replacement: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => replacement.clone(),
            Term::Var(_) | Term::Param(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|t| t.substitute(var, replacement)).collect(),
            ),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Param(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }
}

/// First-order formulas. Negation is sugar for `phi -> false` and is kept
/// that way in the AST; the printer writes it back as `~`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn not(phi: Formula) -> Formula {
        Formula::Implies(Box::new(phi), Box::new(Formula::False))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn is_not(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(lhs, rhs) if **rhs == Formula::False => Some(lhs),
            _ => None,
        }
    }

    pub fn free_vars(&self, out: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Rel(_, args) => args.iter().for_each(|t| t.free_vars(out)),
            Formula::Eq(s, t) => {
                s.free_vars(out);
                t.free_vars(out);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.free_vars(out);
                r.free_vars(out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let mut inner = Vec::new();
                body.free_vars(&mut inner);
                for w in inner {
                    if w != *v && !out.contains(&w) {
                        out.push(w);
                    }
                }
            }
        }
    }

    /// Substitutes a term for a free variable (capture is impossible in the
    /// uses here: replacements are closed terms).
    pub fn substitute(&self, var: &str, replacement: &Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Rel(r, args) => Formula::Rel(
                r.clone(),
                args.iter().map(|t| t.substitute(var, replacement)).collect(),
            ),
            Formula::Eq(s, t) => {
                Formula::Eq(s.substitute(var, replacement), t.substitute(var, replacement))
            }
            Formula::And(l, r) => {
                Formula::and(l.substitute(var, replacement), r.substitute(var, replacement))
            }
            Formula::Or(l, r) => {
                Formula::or(l.substitute(var, replacement), r.substitute(var, replacement))
            }
            Formula::Implies(l, r) => {
                Formula::implies(l.substitute(var, replacement), r.substitute(var, replacement))
            }
            Formula::Forall(v, body) if v != var => {
                Formula::Forall(v.clone(), Box::new(body.substitute(var, replacement)))
            }
            Formula::Exists(v, body) if v != var => {
                Formula::Exists(v.clone(), Box::new(body.substitute(var, replacement)))
            }
            Formula::Forall(..) | Formula::Exists(..) => self.clone(),
        }
    }

    /// AST depth with atoms at depth 1; `~phi` is `phi -> false`, so each
    /// negation adds a level.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                1 + l.depth().max(r.depth())
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.depth(),
        }
    }

    /// Renames bound variables to the canonical `v0, v1, ...` sequence in
    /// traversal order, past the given number of context variables.
    pub fn alpha_normalize(&self, ctx_len: usize) -> Formula {
        fn go(f: &Formula, next: &mut usize, renaming: &BTreeMap<String, String>) -> Formula {
            match f {
                Formula::True | Formula::False => f.clone(),
                Formula::Rel(r, args) => Formula::Rel(
                    r.clone(),
                    args.iter().map(|t| rename_term(t, renaming)).collect(),
                ),
                Formula::Eq(s, t) => {
                    Formula::Eq(rename_term(s, renaming), rename_term(t, renaming))
                }
                Formula::And(l, r) => Formula::and(go(l, next, renaming), go(r, next, renaming)),
                Formula::Or(l, r) => Formula::or(go(l, next, renaming), go(r, next, renaming)),
                Formula::Implies(l, r) => {
                    Formula::implies(go(l, next, renaming), go(r, next, renaming))
                }
                Formula::Forall(v, body) | Formula::Exists(v, body) => {
                    let fresh = format!("v{}", *next);
                    *next += 1;
                    let mut inner = renaming.clone();
                    inner.insert(v.clone(), fresh.clone());
                    let new_body = go(body, next, &inner);
                    match f {
                        Formula::Forall(..) => Formula::Forall(fresh, Box::new(new_body)),
                        _ => Formula::Exists(fresh, Box::new(new_body)),
                    }
                }
            }
        }
        fn rename_term(t: &Term, renaming: &BTreeMap<String, String>) -> Term {
            match t {
                Term::Var(v) => match renaming.get(v) {
                    Some(w) => Term::Var(w.clone()),
                    None => t.clone(),
                },
                Term::App(f, args) => Term::App(
                    f.clone(),
                    args.iter().map(|a| rename_term(a, renaming)).collect(),
                ),
                Term::Param(_) => t.clone(),
            }
        }
        go(self, &mut ctx_len.clone(), &BTreeMap::new())
    }

    pub fn alpha_eq(&self, other: &Formula, ctx_len: usize) -> bool {
        self.alpha_normalize(ctx_len) == other.alpha_normalize(ctx_len)
    }

    /// True when the formula contains no `|` and no `exists` (the shape of
    /// every translated formula).
    pub fn is_or_and_exists_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => true,
            Formula::Or(..) | Formula::Exists(..) => false,
            Formula::And(l, r) | Formula::Implies(l, r) => {
                l.is_or_and_exists_free() && r.is_or_and_exists_free()
            }
            Formula::Forall(_, body) => body.is_or_and_exists_free(),
        }
    }

    pub fn is_forall_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => true,
            Formula::Forall(..) => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.is_forall_free() && r.is_forall_free()
            }
            Formula::Exists(_, body) => body.is_forall_free(),
        }
    }

    /// Rendering with parameter names taken from a carrier.
    pub fn display_with<'a>(&'a self, params: &'a [String]) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, params: Some(params) }
    }
}

/// The double-negation translation, clause by clause: atoms other than
/// `false` become doubly negated, disjunction and the existential quantifier
/// are rewritten through negation, everything else is transported.
pub fn godel_translate(phi: &Formula) -> Formula {
    match phi {
        Formula::False => Formula::False,
        Formula::True | Formula::Rel(..) | Formula::Eq(..) => {
            Formula::not(Formula::not(phi.clone()))
        }
        Formula::And(l, r) => Formula::and(godel_translate(l), godel_translate(r)),
        Formula::Or(l, r) => Formula::not(Formula::and(
            Formula::not(godel_translate(l)),
            Formula::not(godel_translate(r)),
        )),
        Formula::Implies(l, r) => Formula::implies(godel_translate(l), godel_translate(r)),
        Formula::Forall(v, body) => Formula::Forall(v.clone(), Box::new(godel_translate(body))),
        Formula::Exists(v, body) => Formula::not(Formula::Forall(
            v.clone(),
            Box::new(Formula::not(godel_translate(body))),
        )),
    }
}

/// An ordered list of distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context(Vec<String>);

impl Context {
    pub fn new(vars: Vec<String>) -> Result<Context, LogicError> {
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(LogicError::DuplicateContextVariable(v.clone()));
            }
        }
        Ok(Context(vars))
    }

    pub fn empty() -> Context {
        Context(Vec::new())
    }

    pub fn of(vars: &[&str]) -> Context {
        Context::new(vars.iter().map(|v| v.to_string()).collect()).unwrap()
    }

    pub fn vars(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, var: &str) -> Option<usize> {
        self.0.iter().position(|v| v == var)
    }

    pub fn extended(&self, var: &str) -> Context {
        let mut vars = self.0.clone();
        vars.push(var.to_string());
        Context(vars)
    }

    /// Checks that the context is suitable for the formula: it contains all
    /// free variables.
    pub fn suits(&self, phi: &Formula) -> Result<(), LogicError> {
        let mut free = Vec::new();
        phi.free_vars(&mut free);
        for v in free {
            if self.position(&v).is_none() {
                return Err(LogicError::FreeVariableNotInContext(v));
            }
        }
        Ok(())
    }
}

/// A formula together with a suitable context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaInContext {
    pub context: Context,
    pub formula: Formula,
}

impl FormulaInContext {
    pub fn new(context: Context, formula: Formula) -> Result<FormulaInContext, LogicError> {
        context.suits(&formula)?;
        Ok(FormulaInContext { context, formula })
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    params: Option<&'a [String]>,
}

// Precedence levels for printing, mirroring the grammar: 0 formula (incl.
// quantifiers), 1 implication, 2 disjunction, 3 conjunction, 4 unary/atoms.
fn fmt_formula(
    f: &Formula,
    params: Option<&[String]>,
    level: u8,
    out: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let own = match f {
        Formula::Forall(..) | Formula::Exists(..) => 0,
        Formula::Implies(..) if f.is_not().is_none() => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    };
    let needs_parens = own < level;
    if needs_parens {
        write!(out, "(")?;
    }
    match f {
        Formula::True => write!(out, "true")?,
        Formula::False => write!(out, "false")?,
        Formula::Rel(r, args) => {
            write!(out, "{r}")?;
            if !args.is_empty() {
                write!(out, "(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    fmt_term(t, params, out)?;
                }
                write!(out, ")")?;
            }
        }
        Formula::Eq(s, t) => {
            fmt_term(s, params, out)?;
            write!(out, " = ")?;
            fmt_term(t, params, out)?;
        }
        Formula::And(l, r) => {
            fmt_formula(l, params, 3, out)?;
            write!(out, " & ")?;
            fmt_formula(r, params, 4, out)?;
        }
        Formula::Or(l, r) => {
            fmt_formula(l, params, 2, out)?;
            write!(out, " | ")?;
            fmt_formula(r, params, 3, out)?;
        }
        Formula::Implies(..) => {
            if let Some(inner) = f.is_not() {
                write!(out, "~")?;
                fmt_formula(inner, params, 4, out)?;
            } else if let Formula::Implies(l, r) = f {
                fmt_formula(l, params, 2, out)?;
                write!(out, " -> ")?;
                fmt_formula(r, params, 1, out)?;
            }
        }
        Formula::Forall(v, body) => {
            write!(out, "forall {v}. ")?;
            fmt_formula(body, params, 0, out)?;
        }
        Formula::Exists(v, body) => {
            write!(out, "exists {v}. ")?;
            fmt_formula(body, params, 0, out)?;
        }
    }
    if needs_parens {
        write!(out, ")")?;
    }
    Ok(())
}

fn fmt_term(t: &Term, params: Option<&[String]>, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(v) => write!(out, "{v}"),
        Term::App(f, args) => {
            write!(out, "{f}")?;
            if !args.is_empty() {
                write!(out, "(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    fmt_term(a, params, out)?;
                }
                write!(out, ")")?;
            }
            Ok(())
        }
        Term::Param(i) => match params {
            Some(names) => write!(out, "{}", names[*i]),
            None => write!(out, "#{i}"),
        },
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, None, 0, out)
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self.formula, self.params, 0, out)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, None, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang_rc() -> Language {
        Language::new()
            .with_function("c", 0)
            .unwrap()
            .with_relation("R", 1)
            .unwrap()
    }

    #[test]
    fn godel_atomic() {
        let phi = Formula::Rel("R".into(), vec![Term::constant("c")]);
        let g = godel_translate(&phi);
        assert_eq!(g, Formula::not(Formula::not(phi)));
    }

    #[test]
    fn godel_or_and_exists() {
        let p = Formula::Rel("R".into(), vec![Term::Var("v".into())]);
        let q = Formula::Rel("R".into(), vec![Term::constant("c")]);
        let or = Formula::or(p.clone(), q.clone());
        let got = godel_translate(&or);
        let want = Formula::not(Formula::and(
            Formula::not(godel_translate(&p)),
            Formula::not(godel_translate(&q)),
        ));
        assert_eq!(got, want);

        let ex = Formula::exists("v", p.clone());
        let got = godel_translate(&ex);
        let want = Formula::not(Formula::forall("v", Formula::not(godel_translate(&p))));
        assert_eq!(got, want);
        assert!(got.is_or_and_exists_free());
    }

    #[test]
    fn godel_of_negation_is_negated_translation() {
        let p = Formula::Rel("R".into(), vec![Term::constant("c")]);
        let not_p = Formula::not(p.clone());
        assert_eq!(godel_translate(&not_p), Formula::not(godel_translate(&p)));
    }

    #[test]
    fn depth_counts() {
        let p = Formula::Rel("R".into(), vec![Term::constant("c")]);
        assert_eq!(p.depth(), 1);
        assert_eq!(Formula::not(p.clone()).depth(), 2);
        assert_eq!(Formula::not(Formula::not(p.clone())).depth(), 3);
        assert_eq!(Formula::or(p.clone(), Formula::not(p.clone())).depth(), 3);
        assert_eq!(Formula::exists("v", Formula::Eq(Term::Var("v".into()), Term::Var("v".into()))).depth(), 2);
    }

    #[test]
    fn context_rejects_duplicates() {
        let err = Context::new(vec!["v".into(), "v".into()]).unwrap_err();
        assert_eq!(err, LogicError::DuplicateContextVariable("v".into()));
    }

    #[test]
    fn alpha_normalization() {
        let f = Formula::forall(
            "x",
            Formula::exists("y", Formula::Eq(Term::Var("x".into()), Term::Var("y".into()))),
        );
        let g = Formula::forall(
            "a",
            Formula::exists("b", Formula::Eq(Term::Var("a".into()), Term::Var("b".into()))),
        );
        assert!(f.alpha_eq(&g, 0));
        let _ = lang_rc();
    }
}
