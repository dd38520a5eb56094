//! Deterministic, layered enumeration of formulas-in-context.
//!
//! Formulas are organized by (context length, AST depth) into layers; a node
//! in a layer refers to its children in lower layers, so scans can evaluate
//! whole layers bottom-up and reuse child values. Depth counts atoms as 1;
//! each connective or quantifier adds one level (`~phi` is `phi -> false`,
//! so a negation adds a level too).
//!
//! The order within a layer is fixed: `true`, `false`, relation atoms (by
//! symbol name, then argument term indices), equalities (by term index
//! pairs), then binary nodes (`&`, `|`, `->`, each by left then right child
//! id), then quantified nodes (`forall` before `exists`, by body index).
//! Terms are enumerated by depth, then function symbol name, then argument
//! indices; context variables come before constants.
//!
//! Layers up to `max_depth - 1` are materialized; the top layer of each
//! context is streamed on demand to keep the exhaustive depth-3 spaces out
//! of memory.

use super::{Formula, Language, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Or,
    Implies,
}

/// A term over a context: a context variable by position, or a function
/// symbol applied to earlier terms of the same context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermShape {
    Var(usize),
    App(String, Vec<usize>),
}

/// Identifies a materialized node: context length, depth layer, index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId {
    pub ctx: usize,
    pub depth: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    /// Relation symbol (by name) applied to term indices of this context.
    Rel(String, Vec<usize>),
    Eq(usize, usize),
    Bin(BinOp, NodeId, NodeId),
    /// Quantifier over the next context variable; body lives at ctx + 1.
    Quant(Quantifier, NodeId),
}

#[derive(Debug, Clone)]
pub struct SpaceParams {
    pub language: Language,
    /// Maximum context length of root formulas (free-variable slots).
    pub base_ctx: usize,
    /// Maximum AST depth of root formulas.
    pub max_depth: usize,
    /// Maximum term depth inside atoms.
    pub term_depth: usize,
}

/// The enumeration space: terms and materialized node layers per context.
pub struct FormulaSpace {
    params: SpaceParams,
    /// terms[ctx] = all term shapes over that context, with their depths
    terms: Vec<Vec<(TermShape, usize)>>,
    /// layers[ctx][d-1] = nodes of depth exactly d (materialized for
    /// d <= max_depth - 1; the top layer is streamed)
    layers: Vec<Vec<Vec<Node>>>,
}

impl FormulaSpace {
    pub fn build(params: SpaceParams) -> FormulaSpace {
        assert!(params.max_depth >= 1);
        let max_ctx = params.base_ctx + params.max_depth;
        let mut terms = Vec::new();
        for ctx in 0..=max_ctx {
            terms.push(enumerate_terms(&params.language, ctx, params.term_depth));
        }
        let mut space = FormulaSpace { params, terms, layers: vec![Vec::new(); max_ctx + 1] };
        // Build layers from the deepest context down: a quantified node at
        // (ctx, d) points at a body in (ctx + 1, d - 1), which must exist
        // before the layer is streamed.
        for ctx in (0..=max_ctx).rev() {
            let depth_here = space.materialized_depth(ctx);
            for d in 1..=depth_here {
                let mut layer = Vec::new();
                space.stream_layer(ctx, d, |_, node| layer.push(node.clone()));
                space.layers[ctx].push(layer);
            }
        }
        space
    }

    pub fn params(&self) -> &SpaceParams {
        &self.params
    }

    /// Depth up to which layers are materialized for a context.
    pub fn materialized_depth(&self, ctx: usize) -> usize {
        if ctx > self.params.base_ctx + self.params.max_depth {
            return 0;
        }
        let extra = ctx.saturating_sub(self.params.base_ctx);
        let reachable = (self.params.max_depth - 1).saturating_sub(extra.saturating_sub(1));
        if ctx <= self.params.base_ctx {
            self.params.max_depth - 1
        } else {
            reachable
        }
    }

    pub fn terms(&self, ctx: usize) -> &[(TermShape, usize)] {
        &self.terms[ctx]
    }

    pub fn layer(&self, ctx: usize, depth: usize) -> &[Node] {
        &self.layers[ctx][depth - 1]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.layers[id.ctx][id.depth - 1][id.index]
    }

    /// Streams the nodes of depth exactly `depth` for a context, in the
    /// deterministic enumeration order. Works for materialized layers and
    /// for the streamed top layer alike; children always point into
    /// materialized layers.
    pub fn stream_layer(&self, ctx: usize, depth: usize, mut f: impl FnMut(NodeId, &Node)) {
        let mut index = 0usize;
        let mut emit = |node: Node, f: &mut dyn FnMut(NodeId, &Node)| {
            f(NodeId { ctx, depth, index }, &node);
            index += 1;
        };
        if depth == 1 {
            emit(Node::True, &mut f);
            emit(Node::False, &mut f);
            let nterms = self.terms[ctx].len();
            for (rel, arity) in self.params.language.relations() {
                for args in index_tuples(nterms, arity) {
                    emit(Node::Rel(rel.to_string(), args), &mut f);
                }
            }
            for s in 0..nterms {
                for t in 0..nterms {
                    emit(Node::Eq(s, t), &mut f);
                }
            }
            return;
        }
        // binary nodes over children with max depth = depth - 1
        let child_count: Vec<usize> = (1..depth).map(|d| self.layer(ctx, d).len()).collect();
        for op in [BinOp::And, BinOp::Or, BinOp::Implies] {
            for dl in 1..depth {
                for il in 0..child_count[dl - 1] {
                    for dr in 1..depth {
                        if dl.max(dr) != depth - 1 {
                            continue;
                        }
                        for ir in 0..child_count[dr - 1] {
                            emit(
                                Node::Bin(
                                    op,
                                    NodeId { ctx, depth: dl, index: il },
                                    NodeId { ctx, depth: dr, index: ir },
                                ),
                                &mut f,
                            );
                        }
                    }
                }
            }
        }
        if self.materialized_depth(ctx + 1) >= depth - 1 {
            for q in [Quantifier::Forall, Quantifier::Exists] {
                for ib in 0..self.layer(ctx + 1, depth - 1).len() {
                    emit(
                        Node::Quant(q, NodeId { ctx: ctx + 1, depth: depth - 1, index: ib }),
                        &mut f,
                    );
                }
            }
        }
    }

    /// Number of nodes in a (possibly streamed) layer.
    pub fn layer_len(&self, ctx: usize, depth: usize) -> usize {
        if depth <= self.materialized_depth(ctx) {
            return self.layer(ctx, depth).len();
        }
        let mut n = 0;
        self.stream_layer(ctx, depth, |_, _| n += 1);
        n
    }

    /// Reconstructs the term AST for a term index of a context. Context
    /// variables are named `v0, v1, ...`.
    pub fn term_ast(&self, ctx: usize, index: usize) -> Term {
        match &self.terms[ctx][index].0 {
            TermShape::Var(i) => Term::Var(format!("v{i}")),
            TermShape::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|&a| self.term_ast(ctx, a)).collect(),
            ),
        }
    }

    /// Reconstructs the formula AST for a node.
    pub fn formula(&self, id: NodeId, node: &Node) -> Formula {
        match node {
            Node::True => Formula::True,
            Node::False => Formula::False,
            Node::Rel(r, args) => Formula::Rel(
                r.clone(),
                args.iter().map(|&a| self.term_ast(id.ctx, a)).collect(),
            ),
            Node::Eq(s, t) => Formula::Eq(self.term_ast(id.ctx, *s), self.term_ast(id.ctx, *t)),
            Node::Bin(op, l, r) => {
                let lf = self.formula(*l, self.node(*l));
                let rf = self.formula(*r, self.node(*r));
                match op {
                    BinOp::And => Formula::and(lf, rf),
                    BinOp::Or => Formula::or(lf, rf),
                    BinOp::Implies => Formula::implies(lf, rf),
                }
            }
            Node::Quant(q, body) => {
                let bf = self.formula(*body, self.node(*body));
                let var = format!("v{}", id.ctx);
                match q {
                    Quantifier::Forall => Formula::Forall(var, Box::new(bf)),
                    Quantifier::Exists => Formula::Exists(var, Box::new(bf)),
                }
            }
        }
    }
}

fn enumerate_terms(lang: &Language, ctx: usize, term_depth: usize) -> Vec<(TermShape, usize)> {
    let mut terms: Vec<(TermShape, usize)> = Vec::new();
    for v in 0..ctx {
        terms.push((TermShape::Var(v), 1));
    }
    for (name, arity) in lang.functions() {
        if arity == 0 {
            terms.push((TermShape::App(name.to_string(), Vec::new()), 1));
        }
    }
    for depth in 2..=term_depth {
        let existing = terms.len();
        for (name, arity) in lang.functions() {
            if arity == 0 {
                continue;
            }
            for args in index_tuples(existing, arity) {
                let max_child = args.iter().map(|&a| terms[a].1).max().unwrap_or(0);
                if max_child == depth - 1 {
                    terms.push((TermShape::App(name.to_string(), args), depth));
                }
            }
        }
    }
    terms
}

/// All tuples of indices below `n`, row-major (last coordinate fastest).
pub(crate) fn index_tuples(n: usize, arity: usize) -> Vec<Vec<usize>> {
    crate::util::tuples(n, arity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Language;

    fn lang_rc() -> Language {
        Language::new()
            .with_function("c", 0)
            .unwrap()
            .with_relation("R", 1)
            .unwrap()
    }

    fn space(base_ctx: usize, depth: usize) -> FormulaSpace {
        FormulaSpace::build(SpaceParams {
            language: lang_rc(),
            base_ctx,
            max_depth: depth,
            term_depth: 2,
        })
    }

    #[test]
    fn atom_counts() {
        let s = space(2, 3);
        // ctx 0: terms {c}: true, false, R(c), c=c
        assert_eq!(s.layer_len(0, 1), 4);
        // ctx 1: terms {v0, c}: 2 + 2 rel + 4 eq
        assert_eq!(s.layer_len(1, 1), 8);
        // ctx 2: terms {v0, v1, c}: 2 + 3 + 9
        assert_eq!(s.layer_len(2, 1), 14);
    }

    #[test]
    fn depth2_counts() {
        let s = space(2, 3);
        // ctx 0: 3 * 4^2 binaries + 2 * 8 quantified
        assert_eq!(s.layer_len(0, 2), 48 + 16);
        // ctx 2: 3 * 14^2 + 2 * 22
        assert_eq!(s.layer_len(2, 2), 588 + 44);
    }

    #[test]
    fn formulas_have_declared_depth() {
        let s = space(1, 3);
        for depth in 1..=3 {
            let mut checked = 0;
            s.stream_layer(0, depth, |id, node| {
                if checked < 200 {
                    let f = s.formula(id, node);
                    assert_eq!(f.depth(), depth, "node {:?}", node);
                    checked += 1;
                }
            });
        }
    }

    #[test]
    fn streaming_matches_materialized() {
        let s = space(2, 3);
        let mut streamed = Vec::new();
        s.stream_layer(1, 2, |_, node| streamed.push(node.clone()));
        assert_eq!(streamed.as_slice(), s.layer(1, 2));
    }

    #[test]
    fn term_enumeration_with_unary_function() {
        let lang = Language::new()
            .with_function("c", 0)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_relation("R", 1)
            .unwrap();
        let s = FormulaSpace::build(SpaceParams {
            language: lang,
            base_ctx: 1,
            max_depth: 2,
            term_depth: 2,
        });
        // ctx 1 depth <= 2 terms: v0, c, f(v0), f(c)
        let shapes: Vec<&TermShape> = s.terms(1).iter().map(|(t, _)| t).collect();
        assert_eq!(shapes.len(), 4);
        assert_eq!(s.term_ast(1, 2).to_string(), "f(v0)");
        assert_eq!(s.term_ast(1, 3).to_string(), "f(c)");
    }
}
