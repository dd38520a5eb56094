//! Seeded random formulas for round-trip and soundness corpora.

use crate::rng::SplitMix64;

use super::{Formula, Language, Term};

pub fn random_term(
    lang: &Language,
    ctx: &[String],
    depth: usize,
    rng: &mut SplitMix64,
) -> Term {
    let constants: Vec<&str> = lang.constants().collect();
    let leaf_choices = ctx.len() + constants.len();
    let compound: Vec<(&str, usize)> = lang.functions().filter(|(_, a)| *a > 0).collect();
    if depth <= 1 || compound.is_empty() || leaf_choices == 0 || rng.chance(1, 2) {
        if leaf_choices == 0 {
            // no leaves available: fall back to a unary application chain is
            // impossible too, so this language cannot build closed terms
            panic!("language without constants needs context variables for terms");
        }
        let pick = rng.below(leaf_choices);
        return if pick < ctx.len() {
            Term::Var(ctx[pick].clone())
        } else {
            Term::constant(constants[pick - ctx.len()])
        };
    }
    let (name, arity) = compound[rng.below(compound.len())];
    let args = (0..arity).map(|_| random_term(lang, ctx, depth - 1, rng)).collect();
    Term::App(name.to_string(), args)
}

/// A random formula of exactly bounded depth over the given context, with
/// quantifiers introducing fresh variables.
pub fn random_formula(
    lang: &Language,
    ctx: &[String],
    depth: usize,
    rng: &mut SplitMix64,
) -> Formula {
    if depth <= 1 {
        let relations: Vec<(&str, usize)> = lang.relations().collect();
        let n_choices = relations.len() + 3;
        return match rng.below(n_choices) {
            0 => Formula::True,
            1 => Formula::False,
            2 => Formula::Eq(
                random_term(lang, ctx, 2, rng),
                random_term(lang, ctx, 2, rng),
            ),
            k => {
                let (name, arity) = relations[k - 3];
                let args = (0..arity).map(|_| random_term(lang, ctx, 2, rng)).collect();
                Formula::Rel(name.to_string(), args)
            }
        };
    }
    match rng.below(6) {
        0 => Formula::and(
            random_formula(lang, ctx, depth - 1, rng),
            random_formula(lang, ctx, depth - 1, rng),
        ),
        1 => Formula::or(
            random_formula(lang, ctx, depth - 1, rng),
            random_formula(lang, ctx, depth - 1, rng),
        ),
        2 => Formula::implies(
            random_formula(lang, ctx, depth - 1, rng),
            random_formula(lang, ctx, depth - 1, rng),
        ),
        3 => Formula::not(random_formula(lang, ctx, depth - 1, rng)),
        q => {
            let var = format!("q{}", ctx.len());
            let mut inner = ctx.to_vec();
            inner.push(var.clone());
            let body = random_formula(lang, &inner, depth - 1, rng);
            if q == 4 {
                Formula::Forall(var, Box::new(body))
            } else {
                Formula::Exists(var, Box::new(body))
            }
        }
    }
}
