//! Layered evaluation of whole formula spaces.
//!
//! Scans evaluate every enumerated formula bottom-up, caching the value
//! vectors of materialized layers and streaming the top layer, so the
//! exhaustive depth-bounded suites touch each subformula once. Three value
//! families are maintained for a Heyting-valued structure — the recursion
//! path, the categorical path (through the generic subobject machinery),
//! and the values of the double-negation translation — plus classical
//! truth vectors for an ordinary structure.

use std::sync::Arc;

use crate::frame::{Elem, Filter};
use crate::hmodel::HStructure;
use crate::hset::{exists_along, forall_along, pullback_sub, HMorphism, HSet, StrictRelation};
use crate::logic::{
    FiniteStructure, FormulaSpace, Node, NodeId, Quantifier, SpaceParams, TermShape,
};
use crate::util::{rank, tuples};

/// Bounds of a scan: formula depth, parameter slots (context length of root
/// formulas), and term depth.
#[derive(Debug, Clone, Copy)]
pub struct ScanParams {
    pub depth: usize,
    pub max_params: usize,
    pub term_depth: usize,
}

impl Default for ScanParams {
    fn default() -> ScanParams {
        ScanParams { depth: 3, max_params: 2, term_depth: 2 }
    }
}

impl ScanParams {
    pub fn space_for(&self, language: &crate::logic::Language) -> FormulaSpace {
        FormulaSpace::build(SpaceParams {
            language: language.clone(),
            base_ctx: self.max_params,
            max_depth: self.depth,
            term_depth: self.term_depth,
        })
    }
}

/// Values of one node during a scan.
pub struct ScanNode<'a> {
    pub id: NodeId,
    pub node: &'a Node,
    /// recursion-path forcing vector over the context tuple space
    pub rec: &'a [Elem],
    /// categorical-path vector (strict relation values)
    pub cat: &'a [Elem],
    /// forcing vector of the double-negation translation
    pub god: &'a [Elem],
    pub forall_free: bool,
}

pub struct ForcingScan<'m> {
    pub m: &'m HStructure,
    pub space: &'m FormulaSpace,
    size: usize,
    extents: Vec<Vec<Elem>>,
    term_tables: Vec<Vec<Vec<Elem>>>,
    powers: Vec<Arc<HSet>>,
    projections: Vec<HMorphism>,
    rec: Vec<Vec<Vec<Vec<Elem>>>>,
    cat: Vec<Vec<Vec<StrictRelation>>>,
    god: Vec<Vec<Vec<Vec<Elem>>>>,
    forall_free: Vec<Vec<Vec<bool>>>,
}

impl<'m> ForcingScan<'m> {
    pub fn build(m: &'m HStructure, space: &'m FormulaSpace) -> ForcingScan<'m> {
        let size = m.carrier().len();
        let max_ctx = space.params().base_ctx + space.params().max_depth;
        let frame = m.frame().clone();
        let mut extents = Vec::new();
        let mut powers = Vec::new();
        for ctx in 0..=max_ctx {
            let ext: Vec<Elem> = if ctx == 0 {
                vec![frame.top()]
            } else {
                tuples(size, ctx)
                    .iter()
                    .map(|t| frame.meet_all(t.iter().map(|&a| m.carrier().extent(a))))
                    .collect()
            };
            extents.push(ext);
            powers.push(m.carrier().power(ctx));
        }
        let mut projections = Vec::new();
        for ctx in 0..max_ctx {
            let map: Vec<usize> =
                tuples(size, ctx + 1).iter().map(|t| rank(&t[..ctx], size)).collect();
            projections.push(
                HMorphism::from_map(powers[ctx + 1].clone(), powers[ctx].clone(), &map)
                    .expect("coordinate projection represents a morphism"),
            );
        }
        let mut term_tables = Vec::new();
        for ctx in 0..=max_ctx {
            let mut per_term = Vec::new();
            for idx in 0..space.terms(ctx).len() {
                per_term.push(term_table_for(m, space, ctx, idx, &per_term, &extents[ctx]));
            }
            term_tables.push(per_term);
        }
        let mut scan = ForcingScan {
            m,
            space,
            size,
            extents,
            term_tables,
            powers,
            projections,
            rec: vec![Vec::new(); max_ctx + 1],
            cat: vec![Vec::new(); max_ctx + 1],
            god: vec![Vec::new(); max_ctx + 1],
            forall_free: vec![Vec::new(); max_ctx + 1],
        };
        for ctx in (0..=max_ctx).rev() {
            for depth in 1..=space.materialized_depth(ctx) {
                let mut rec_layer = Vec::new();
                let mut cat_layer = Vec::new();
                let mut god_layer = Vec::new();
                let mut ff_layer = Vec::new();
                for node in space.layer(ctx, depth) {
                    let (r, c, g, ff) = scan.compute(ctx, node);
                    rec_layer.push(r);
                    cat_layer.push(c);
                    god_layer.push(g);
                    ff_layer.push(ff);
                }
                scan.rec[ctx].push(rec_layer);
                scan.cat[ctx].push(cat_layer);
                scan.god[ctx].push(god_layer);
                scan.forall_free[ctx].push(ff_layer);
            }
        }
        scan
    }

    pub fn extent(&self, ctx: usize) -> &[Elem] {
        &self.extents[ctx]
    }

    pub fn carrier_size(&self) -> usize {
        self.size
    }

    /// Tuples of the context whose component extents all lie in the filter
    /// (equivalently, whose tuple extent lies in the filter).
    pub fn filter_tuples(&self, ctx: usize, filter: &Filter) -> Vec<usize> {
        (0..self.extents[ctx].len())
            .filter(|&t| filter.contains(self.extents[ctx][t]))
            .collect()
    }

    fn neg_vec(&self, ctx: usize, v: &[Elem]) -> Vec<Elem> {
        let frame = self.m.frame();
        v.iter()
            .enumerate()
            .map(|(t, &x)| frame.meet(self.extents[ctx][t], frame.implies(x, frame.bottom())))
            .collect()
    }

    fn forall_clause(&self, ctx: usize, body: &[Elem]) -> Vec<Elem> {
        let frame = self.m.frame();
        let size = self.size;
        self.extents[ctx]
            .iter()
            .enumerate()
            .map(|(t, &ext)| {
                let mut acc = ext;
                for b in 0..size {
                    acc = frame.meet(
                        acc,
                        frame.implies(self.m.carrier().extent(b), body[t * size + b]),
                    );
                }
                acc
            })
            .collect()
    }

    fn exists_clause(&self, ctx: usize, body: &[Elem]) -> Vec<Elem> {
        let frame = self.m.frame();
        let size = self.size;
        (0..self.extents[ctx].len())
            .map(|t| frame.join_all((0..size).map(|b| body[t * size + b])))
            .collect()
    }

    fn atom_rec(&self, ctx: usize, node: &Node) -> Vec<Elem> {
        let frame = self.m.frame();
        let size = self.size;
        let count = self.extents[ctx].len();
        match node {
            Node::True => self.extents[ctx].clone(),
            Node::False => vec![frame.bottom(); count],
            Node::Rel(r, args) => {
                let interp = self.m.relation(r);
                let arg_tuples = tuples(size, interp.arity);
                (0..count)
                    .map(|t| {
                        let mut acc = frame.bottom();
                        for (bt_idx, bt) in arg_tuples.iter().enumerate() {
                            let mut meet = if interp.arity == 0 {
                                self.extents[ctx][t]
                            } else {
                                frame.top()
                            };
                            for (i, &bi) in bt.iter().enumerate() {
                                meet = frame
                                    .meet(meet, self.term_tables[ctx][args[i]][t * size + bi]);
                            }
                            acc = frame.join(acc, frame.meet(meet, interp.values[bt_idx]));
                        }
                        acc
                    })
                    .collect()
            }
            Node::Eq(s, t_term) => {
                let st = &self.term_tables[ctx][*s];
                let tt = &self.term_tables[ctx][*t_term];
                (0..count)
                    .map(|t| {
                        let mut acc = frame.bottom();
                        for b in 0..size {
                            for c in 0..size {
                                acc = frame.join(
                                    acc,
                                    frame.meet(
                                        frame.meet(st[t * size + b], tt[t * size + c]),
                                        self.m.carrier().alpha(b, c),
                                    ),
                                );
                            }
                        }
                        acc
                    })
                    .collect()
            }
            _ => unreachable!("atom_rec called on a non-atom"),
        }
    }

    fn atom_cat(&self, ctx: usize, node: &Node) -> StrictRelation {
        let power = self.powers[ctx].clone();
        match node {
            Node::True => StrictRelation::top(power),
            Node::False => StrictRelation::bottom(power),
            Node::Rel(r, args) => {
                let components: Vec<HMorphism> = args
                    .iter()
                    .map(|&a| self.term_morphism(ctx, a))
                    .collect();
                let tupled = self.tupling(ctx, &components);
                pullback_sub(&tupled, &self.m.relation_strict(r))
            }
            Node::Eq(s, t) => {
                let sm = self.term_morphism(ctx, *s);
                let tm = self.term_morphism(ctx, *t);
                let (_, incl) = crate::hset::equalizer(&sm, &tm).expect("same dom/cod");
                crate::hset::from_mono(&incl)
            }
            _ => unreachable!("atom_cat called on a non-atom"),
        }
    }

    fn term_morphism(&self, ctx: usize, term_idx: usize) -> HMorphism {
        HMorphism::new_unchecked(
            self.powers[ctx].clone(),
            self.m.carrier().clone(),
            self.term_tables[ctx][term_idx].clone(),
        )
    }

    fn tupling(&self, ctx: usize, components: &[HMorphism]) -> HMorphism {
        let frame = self.m.frame();
        let size = self.size;
        let arity = components.len();
        let dom = self.powers[ctx].clone();
        let cod = self.m.carrier().power(arity);
        let mut table = vec![0; dom.len() * cod.len()];
        for t in dom.elements() {
            for (bt_idx, bt) in tuples(size, arity).iter().enumerate() {
                let mut meet = dom.extent(t);
                for (i, &bi) in bt.iter().enumerate() {
                    meet = frame.meet(meet, components[i].at(t, bi));
                }
                table[t * cod.len() + bt_idx] = meet;
            }
        }
        HMorphism::new_unchecked(dom, cod, table)
    }

    /// Computes all value families of one node, reading children from the
    /// caches.
    fn compute(&self, ctx: usize, node: &Node) -> (Vec<Elem>, StrictRelation, Vec<Elem>, bool) {
        let frame = self.m.frame();
        match node {
            Node::True | Node::False | Node::Rel(..) | Node::Eq(..) => {
                let rec = self.atom_rec(ctx, node);
                let cat = self.atom_cat(ctx, node);
                let god = if matches!(node, Node::False) {
                    rec.clone()
                } else {
                    self.neg_vec(ctx, &self.neg_vec(ctx, &rec))
                };
                (rec, cat, god, true)
            }
            Node::Bin(op, l, r) => {
                let (lr, lc, lg, lff) = self.cached(*l);
                let (rr, rc, rg, rff) = self.cached(*r);
                use crate::logic::BinOp;
                let rec: Vec<Elem> = match op {
                    BinOp::And => {
                        lr.iter().zip(rr.iter()).map(|(&x, &y)| frame.meet(x, y)).collect()
                    }
                    BinOp::Or => {
                        lr.iter().zip(rr.iter()).map(|(&x, &y)| frame.join(x, y)).collect()
                    }
                    BinOp::Implies => lr
                        .iter()
                        .zip(rr.iter())
                        .enumerate()
                        .map(|(t, (&x, &y))| {
                            frame.meet(self.extents[ctx][t], frame.implies(x, y))
                        })
                        .collect(),
                };
                let cat = match op {
                    BinOp::And => lc.meet(rc),
                    BinOp::Or => lc.join(rc),
                    BinOp::Implies => lc.implies(rc),
                };
                let god: Vec<Elem> = match op {
                    BinOp::And => {
                        lg.iter().zip(rg.iter()).map(|(&x, &y)| frame.meet(x, y)).collect()
                    }
                    BinOp::Or => {
                        let nl = self.neg_vec(ctx, lg);
                        let nr = self.neg_vec(ctx, rg);
                        let both: Vec<Elem> =
                            nl.iter().zip(nr.iter()).map(|(&x, &y)| frame.meet(x, y)).collect();
                        self.neg_vec(ctx, &both)
                    }
                    BinOp::Implies => lg
                        .iter()
                        .zip(rg.iter())
                        .enumerate()
                        .map(|(t, (&x, &y))| {
                            frame.meet(self.extents[ctx][t], frame.implies(x, y))
                        })
                        .collect(),
                };
                (rec, cat, god, lff && rff)
            }
            Node::Quant(q, body) => {
                let (br, bc, bg, bff) = self.cached(*body);
                match q {
                    Quantifier::Forall => {
                        let rec = self.forall_clause(ctx, br);
                        let cat = forall_along(&self.projections[ctx], bc);
                        let god = self.forall_clause(ctx, bg);
                        (rec, cat, god, false)
                    }
                    Quantifier::Exists => {
                        let rec = self.exists_clause(ctx, br);
                        let cat = exists_along(&self.projections[ctx], bc);
                        // (exists v phi)^G = ~ forall v ~ phi^G
                        let inner = self.neg_vec(ctx + 1, bg);
                        let god = self.neg_vec(ctx, &self.forall_clause(ctx, &inner));
                        (rec, cat, god, bff)
                    }
                }
            }
        }
    }

    fn cached(&self, id: NodeId) -> (&Vec<Elem>, &StrictRelation, &Vec<Elem>, bool) {
        (
            &self.rec[id.ctx][id.depth - 1][id.index],
            &self.cat[id.ctx][id.depth - 1][id.index],
            &self.god[id.ctx][id.depth - 1][id.index],
            self.forall_free[id.ctx][id.depth - 1][id.index],
        )
    }

    /// Visits every node of the given context up to the given depth,
    /// materialized layers first, streaming the rest.
    pub fn for_each(&self, ctx: usize, max_depth: usize, mut f: impl FnMut(&ScanNode<'_>)) {
        let cached_depth = self.space.materialized_depth(ctx).min(max_depth);
        for depth in 1..=cached_depth {
            for (index, node) in self.space.layer(ctx, depth).iter().enumerate() {
                let id = NodeId { ctx, depth, index };
                f(&ScanNode {
                    id,
                    node,
                    rec: &self.rec[ctx][depth - 1][index],
                    cat: self.cat[ctx][depth - 1][index].values(),
                    god: &self.god[ctx][depth - 1][index],
                    forall_free: self.forall_free[ctx][depth - 1][index],
                });
            }
        }
        for depth in (cached_depth + 1)..=max_depth {
            self.space.stream_layer(ctx, depth, |id, node| {
                let (rec, cat, god, forall_free) = self.compute(ctx, node);
                f(&ScanNode { id, node, rec: &rec, cat: cat.values(), god: &god, forall_free });
            });
        }
    }

    /// The extent vector of the body axis: for a node over ctx+1, slice
    /// index arithmetic is `parent_rank * size + witness`.
    pub fn body_slice<'a>(&self, body: &'a [Elem], parent_rank: usize) -> &'a [Elem] {
        &body[parent_rank * self.size..(parent_rank + 1) * self.size]
    }

    /// `|| ~ phi ||` at one tuple, from the value of `phi` there.
    pub fn neg_at(&self, ctx: usize, t: usize, value: Elem) -> Elem {
        let frame = self.m.frame();
        frame.meet(self.extents[ctx][t], frame.implies(value, frame.bottom()))
    }

    /// The value of `(exists v phi)^G = ~ forall v ~ phi^G` at each parent
    /// tuple, from the translated body vector.
    pub fn exists_godel_from_body(&self, parent_ctx: usize, god_body: &[Elem]) -> Vec<Elem> {
        let inner = self.neg_vec(parent_ctx + 1, god_body);
        self.neg_vec(parent_ctx, &self.forall_clause(parent_ctx, &inner))
    }

    /// The value of `exists v phi^G` (translation inside, quantifier
    /// outside) at each parent tuple.
    pub fn exists_of_godel_body(&self, parent_ctx: usize, god_body: &[Elem]) -> Vec<Elem> {
        self.exists_clause(parent_ctx, god_body)
    }
}

fn term_table_for(
    m: &HStructure,
    space: &FormulaSpace,
    ctx: usize,
    idx: usize,
    earlier: &[Vec<Elem>],
    extents: &[Elem],
) -> Vec<Elem> {
    let size = m.carrier().len();
    let frame = m.frame();
    let count = extents.len();
    match &space.terms(ctx)[idx].0 {
        TermShape::Var(pos) => {
            let pos = *pos;
            let mut table = vec![0; count * size];
            for (t_idx, t) in tuples(size, ctx).iter().enumerate() {
                for b in 0..size {
                    table[t_idx * size + b] = frame.meet(extents[t_idx], m.carrier().alpha(t[pos], b));
                }
            }
            table
        }
        TermShape::App(f, args) => {
            let interp = m.function(f);
            let arity = interp.arity;
            let arg_tuples = tuples(size, arity);
            let mut table = vec![0; count * size];
            for t_idx in 0..count {
                for b in 0..size {
                    let mut acc = frame.bottom();
                    for (bt_idx, bt) in arg_tuples.iter().enumerate() {
                        let mut meet = if arity == 0 { extents[t_idx] } else { frame.top() };
                        for (i, &bi) in bt.iter().enumerate() {
                            meet = frame.meet(meet, earlier[args[i]][t_idx * size + bi]);
                        }
                        acc = frame.join(acc, frame.meet(meet, interp.table[bt_idx * size + b]));
                    }
                    table[t_idx * size + b] = acc;
                }
            }
            table
        }
    }
}

// ---------------------------------------------------------------------
// classical side
// ---------------------------------------------------------------------

pub struct TarskiNode<'a> {
    pub id: NodeId,
    pub node: &'a Node,
    /// satisfaction per tuple of the context over the universe
    pub sat: &'a [bool],
}

pub struct TarskiScan<'s> {
    pub structure: &'s FiniteStructure,
    pub space: &'s FormulaSpace,
    size: usize,
    term_vals: Vec<Vec<Vec<usize>>>,
    layers: Vec<Vec<Vec<Vec<bool>>>>,
}

impl<'s> TarskiScan<'s> {
    pub fn build(structure: &'s FiniteStructure, space: &'s FormulaSpace) -> TarskiScan<'s> {
        let size = structure.size();
        let max_ctx = space.params().base_ctx + space.params().max_depth;
        let mut term_vals = Vec::new();
        for ctx in 0..=max_ctx {
            let mut per_term: Vec<Vec<usize>> = Vec::new();
            for (shape, _) in space.terms(ctx) {
                let vals: Vec<usize> = tuples(size, ctx)
                    .iter()
                    .map(|t| match shape {
                        TermShape::Var(pos) => t[*pos],
                        TermShape::App(f, args) => {
                            let arg_vals: Vec<usize> = args
                                .iter()
                                .map(|&a| per_term[a][rank(t, size)])
                                .collect();
                            structure.apply(f, &arg_vals)
                        }
                    })
                    .collect();
                per_term.push(vals);
            }
            term_vals.push(per_term);
        }
        let mut scan = TarskiScan {
            structure,
            space,
            size,
            term_vals,
            layers: vec![Vec::new(); max_ctx + 1],
        };
        for ctx in (0..=max_ctx).rev() {
            for depth in 1..=space.materialized_depth(ctx) {
                let mut layer = Vec::new();
                for node in space.layer(ctx, depth) {
                    layer.push(scan.compute(ctx, node));
                }
                scan.layers[ctx].push(layer);
            }
        }
        scan
    }

    fn tuple_count(&self, ctx: usize) -> usize {
        if ctx == 0 {
            1
        } else {
            self.size.checked_pow(ctx as u32).unwrap_or(0)
        }
    }

    fn compute(&self, ctx: usize, node: &Node) -> Vec<bool> {
        let count = self.tuple_count(ctx);
        match node {
            Node::True => vec![true; count],
            Node::False => vec![false; count],
            Node::Rel(r, args) => (0..count)
                .map(|t| {
                    let vals: Vec<usize> =
                        args.iter().map(|&a| self.term_vals[ctx][a][t]).collect();
                    self.structure.holds(r, &vals)
                })
                .collect(),
            Node::Eq(s, t_term) => (0..count)
                .map(|t| self.term_vals[ctx][*s][t] == self.term_vals[ctx][*t_term][t])
                .collect(),
            Node::Bin(op, l, r) => {
                let lv = &self.layers[l.ctx][l.depth - 1][l.index];
                let rv = &self.layers[r.ctx][r.depth - 1][r.index];
                use crate::logic::BinOp;
                lv.iter()
                    .zip(rv.iter())
                    .map(|(&x, &y)| match op {
                        BinOp::And => x && y,
                        BinOp::Or => x || y,
                        BinOp::Implies => !x || y,
                    })
                    .collect()
            }
            Node::Quant(q, body) => {
                let bv = &self.layers[body.ctx][body.depth - 1][body.index];
                (0..count)
                    .map(|t| match q {
                        Quantifier::Forall => (0..self.size).all(|b| bv[t * self.size + b]),
                        Quantifier::Exists => (0..self.size).any(|b| bv[t * self.size + b]),
                    })
                    .collect()
            }
        }
    }

    /// Values of one node, whether materialized or streamed; children must
    /// be materialized (true for every enumerated node).
    pub fn node_values(&self, ctx: usize, node: &Node) -> Vec<bool> {
        self.compute(ctx, node)
    }

    pub fn for_each(&self, ctx: usize, max_depth: usize, mut f: impl FnMut(&TarskiNode<'_>)) {
        let cached_depth = self.space.materialized_depth(ctx).min(max_depth);
        for depth in 1..=cached_depth {
            for (index, node) in self.space.layer(ctx, depth).iter().enumerate() {
                let id = NodeId { ctx, depth, index };
                f(&TarskiNode { id, node, sat: &self.layers[ctx][depth - 1][index] });
            }
        }
        for depth in (cached_depth + 1)..=max_depth {
            self.space.stream_layer(ctx, depth, |id, node| {
                let sat = self.compute(ctx, node);
                f(&TarskiNode { id, node, sat: &sat });
            });
        }
    }
}
