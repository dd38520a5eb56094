//! Finite frames (complete Heyting algebras) with exact derived tables.
//!
//! A frame is stored as a validated partial order on dense element ids
//! together with precomputed meet/join/implication tables. All operations
//! are total lookups after construction, so frames can be shared read-only.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Dense id of a frame element.
pub type Elem = usize;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FrameError {
    #[error("not a partial order: {reason} (witness: {witness})")]
    NotPartialOrder { reason: String, witness: String },
    #[error("not a lattice: {kind} of {a} and {b} does not exist")]
    NotLattice { kind: String, a: String, b: String },
    #[error("not distributive: {a} & ({b} | {c}) != ({a} & {b}) | ({a} & {c})")]
    NotDistributive { a: String, b: String, c: String },
    #[error("not a topology: {reason} (witness: {witness})")]
    NotTopology { reason: String, witness: String },
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("not a frame homomorphism: {0}")]
    NotFrameHom(String),
    #[error("filter is not {0}: {1}")]
    NotFilter(String, String),
    #[error("improper filter (contains bottom) where a proper filter is required")]
    ImproperFilter,
}

/// A finite frame: a partial order in which every subset has a meet and a
/// join and the (finitary) distributive law holds, with the Heyting
/// implication derived from the order.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    names: Vec<String>,
    // all tables flattened row-major: index a * n + b
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    imp: Vec<Elem>,
    bottom: Elem,
    top: Elem,
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame({})", self.names.join(", "))
    }
}

impl Frame {
    /// Builds and validates a frame from an explicit order relation.
    /// `leq[a][b]` means `a <= b`. Rejects non-orders, non-lattices and
    /// non-distributive lattices, naming a witness.
    pub fn from_order(names: Vec<String>, leq_rows: Vec<Vec<bool>>) -> Result<Frame, FrameError> {
        let n = names.len();
        if n == 0 {
            return Err(FrameError::NotLattice {
                kind: "top".into(),
                a: "(empty)".into(),
                b: "(empty)".into(),
            });
        }
        {
            let mut seen = BTreeSet::new();
            for name in &names {
                if !seen.insert(name.clone()) {
                    return Err(FrameError::NotPartialOrder {
                        reason: "duplicate element name".into(),
                        witness: name.clone(),
                    });
                }
            }
        }
        if leq_rows.len() != n || leq_rows.iter().any(|r| r.len() != n) {
            return Err(FrameError::NotPartialOrder {
                reason: "order matrix is not square over the elements".into(),
                witness: format!("{} elements", n),
            });
        }
        let mut leq = vec![false; n * n];
        for (a, row) in leq_rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                leq[a * n + b] = v;
            }
        }
        let le = |a: Elem, b: Elem| leq[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                return Err(FrameError::NotPartialOrder {
                    reason: "not reflexive".into(),
                    witness: names[a].clone(),
                });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return Err(FrameError::NotPartialOrder {
                        reason: "not antisymmetric".into(),
                        witness: format!("{}, {}", names[a], names[b]),
                    });
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return Err(FrameError::NotPartialOrder {
                            reason: "not transitive".into(),
                            witness: format!("{}, {}, {}", names[a], names[b], names[c]),
                        });
                    }
                }
            }
        }

        // Pairwise meets and joins must exist (greatest lower / least upper bound).
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<Elem> = (0..n).filter(|&c| le(c, a) && le(c, b)).collect();
                match lower.iter().copied().find(|&m| lower.iter().all(|&c| le(c, m))) {
                    Some(m) => meet[a * n + b] = m,
                    None => {
                        return Err(FrameError::NotLattice {
                            kind: "meet".into(),
                            a: names[a].clone(),
                            b: names[b].clone(),
                        })
                    }
                }
                let upper: Vec<Elem> = (0..n).filter(|&c| le(a, c) && le(b, c)).collect();
                match upper.iter().copied().find(|&j| upper.iter().all(|&c| le(j, c))) {
                    Some(j) => join[a * n + b] = j,
                    None => {
                        return Err(FrameError::NotLattice {
                            kind: "join".into(),
                            a: names[a].clone(),
                            b: names[b].clone(),
                        })
                    }
                }
            }
        }
        let mut bottom = 0;
        let mut top = 0;
        for a in 1..n {
            bottom = meet[bottom * n + a];
            top = join[top * n + a];
        }

        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = meet[a * n + join[b * n + c]];
                    let rhs = join[meet[a * n + b] * n + meet[a * n + c]];
                    if lhs != rhs {
                        return Err(FrameError::NotDistributive {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            c: names[c].clone(),
                        });
                    }
                }
            }
        }

        // implies(a, c) = join of { b : a & b <= c }; a finite distributive
        // lattice makes this join the maximum of the set.
        let mut imp = vec![0usize; n * n];
        for a in 0..n {
            for c in 0..n {
                let mut acc = bottom;
                for b in 0..n {
                    if le(meet[a * n + b], c) {
                        acc = join[acc * n + b];
                    }
                }
                imp[a * n + c] = acc;
            }
        }

        let frame = Frame { names, leq, meet, join, imp, bottom, top };
        // Adjunction a & b <= c  <=>  b <= (a => c); implied by
        // distributivity but cheap enough to assert on every build.
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let lhs = frame.leq(frame.meet(a, b), c);
                    let rhs = frame.leq(b, frame.implies(a, c));
                    assert_eq!(lhs, rhs, "heyting adjunction failed at ({a},{b},{c})");
                }
            }
        }
        if n <= 10 {
            frame.check_infinitary_distributivity_exhaustive();
        } else {
            frame.check_infinitary_distributivity_sampled(0x9e3779b97f4a7c15);
        }
        Ok(frame)
    }

    /// Builds the open-set frame of a finite topology. `opens` are sets of
    /// point indices; the family must contain the empty and full sets and be
    /// closed under intersections and unions.
    pub fn from_topology(
        points: Vec<String>,
        opens: Vec<Vec<usize>>,
    ) -> Result<Frame, FrameError> {
        let npts = points.len();
        let mut family: Vec<BTreeSet<usize>> = Vec::new();
        for open in &opens {
            let set: BTreeSet<usize> = open.iter().copied().collect();
            if let Some(&p) = set.iter().find(|&&p| p >= npts) {
                return Err(FrameError::NotTopology {
                    reason: "open set uses an unknown point index".into(),
                    witness: p.to_string(),
                });
            }
            if !family.contains(&set) {
                family.push(set);
            }
        }
        let empty = BTreeSet::new();
        let full: BTreeSet<usize> = (0..npts).collect();
        if !family.contains(&empty) {
            return Err(FrameError::NotTopology {
                reason: "the empty set is not open".into(),
                witness: "{}".into(),
            });
        }
        if !family.contains(&full) {
            return Err(FrameError::NotTopology {
                reason: "the full point set is not open".into(),
                witness: set_name(&full, &points),
            });
        }
        for x in &family {
            for y in &family {
                let inter: BTreeSet<usize> = x.intersection(y).copied().collect();
                if !family.contains(&inter) {
                    return Err(FrameError::NotTopology {
                        reason: "not closed under intersection".into(),
                        witness: format!("{} and {}", set_name(x, &points), set_name(y, &points)),
                    });
                }
                let uni: BTreeSet<usize> = x.union(y).copied().collect();
                if !family.contains(&uni) {
                    return Err(FrameError::NotTopology {
                        reason: "not closed under union".into(),
                        witness: format!("{} and {}", set_name(x, &points), set_name(y, &points)),
                    });
                }
            }
        }
        // Canonical element order: by size, then lexicographically.
        family.sort_by(|x, y| {
            (x.len(), x.iter().collect::<Vec<_>>()).cmp(&(y.len(), y.iter().collect::<Vec<_>>()))
        });
        let names: Vec<String> = family.iter().map(|s| set_name(s, &points)).collect();
        let n = family.len();
        let mut leq_rows = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                leq_rows[a][b] = family[a].is_subset(&family[b]);
            }
        }
        Frame::from_order(names, leq_rows)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid frame has at least one element
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.len()
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn elem_by_name(&self, name: &str) -> Result<Elem, FrameError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FrameError::UnknownElement(name.to_string()))
    }

    pub fn check_elem(&self, a: Elem) -> Result<Elem, FrameError> {
        if a < self.len() {
            Ok(a)
        } else {
            Err(FrameError::UnknownElement(format!("#{a}")))
        }
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.len() + b]
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.len() + b]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.len() + b]
    }

    /// Heyting implication, the right adjoint of meet.
    #[inline]
    pub fn implies(&self, a: Elem, b: Elem) -> Elem {
        self.imp[a * self.len() + b]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.implies(a, self.bottom)
    }

    /// `(a => b) & (b => a)`.
    #[inline]
    pub fn iff(&self, a: Elem, b: Elem) -> Elem {
        self.meet(self.implies(a, b), self.implies(b, a))
    }

    pub fn is_regular(&self, a: Elem) -> bool {
        self.neg(self.neg(a)) == a
    }

    #[inline]
    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    #[inline]
    pub fn top(&self) -> Elem {
        self.top
    }

    /// Join over an arbitrary (finite) subset; the empty join is bottom.
    pub fn join_all<I: IntoIterator<Item = Elem>>(&self, iter: I) -> Elem {
        iter.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Meet over an arbitrary (finite) subset; the empty meet is top.
    pub fn meet_all<I: IntoIterator<Item = Elem>>(&self, iter: I) -> Elem {
        iter.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn atoms(&self) -> Vec<Elem> {
        self.elements()
            .filter(|&a| {
                a != self.bottom
                    && self
                        .elements()
                        .all(|b| !(self.leq(b, a) && b != a && b != self.bottom))
            })
            .collect()
    }

    /// A frame is Boolean when every element has a complement.
    pub fn is_boolean(&self) -> bool {
        self.elements()
            .all(|a| self.join(a, self.neg(a)) == self.top)
    }

    fn check_subset_distributivity(&self, a: Elem, subset: &[Elem]) {
        let j = self.join_all(subset.iter().copied());
        let lhs = self.meet(a, j);
        let rhs = self.join_all(subset.iter().map(|&s| self.meet(a, s)));
        assert_eq!(
            lhs, rhs,
            "infinitary distributive law failed at a={} over subset {:?}",
            self.names[a], subset
        );
    }

    fn check_infinitary_distributivity_exhaustive(&self) {
        let n = self.len();
        for mask in 0u32..(1u32 << n) {
            let subset: Vec<Elem> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            for a in 0..n {
                self.check_subset_distributivity(a, &subset);
            }
        }
    }

    fn check_infinitary_distributivity_sampled(&self, seed: u64) {
        let n = self.len();
        let mut rng = crate::rng::SplitMix64::new(seed);
        for _ in 0..4096 {
            let subset: Vec<Elem> = (0..n).filter(|_| rng.next_u64() & 1 == 1).collect();
            let a = (rng.next_u64() as usize) % n;
            self.check_subset_distributivity(a, &subset);
        }
    }
}

fn set_name(set: &BTreeSet<usize>, points: &[String]) -> String {
    let inner: Vec<&str> = set.iter().map(|&p| points[p].as_str()).collect();
    format!("{{{}}}", inner.join(","))
}

/// A frame homomorphism: a map preserving finite meets (including top) and
/// arbitrary joins (including bottom). On finite frames the binary cases
/// together with the bounds suffice.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameHom {
    source: Arc<Frame>,
    target: Arc<Frame>,
    table: Vec<Elem>,
}

impl FrameHom {
    pub fn new(
        source: Arc<Frame>,
        target: Arc<Frame>,
        table: Vec<Elem>,
    ) -> Result<FrameHom, FrameError> {
        if table.len() != source.len() {
            return Err(FrameError::NotFrameHom(format!(
                "table has {} entries for {} elements",
                table.len(),
                source.len()
            )));
        }
        for &v in &table {
            target.check_elem(v)?;
        }
        if table[source.top()] != target.top() {
            return Err(FrameError::NotFrameHom("top not preserved".into()));
        }
        if table[source.bottom()] != target.bottom() {
            return Err(FrameError::NotFrameHom("bottom not preserved".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if table[source.meet(a, b)] != target.meet(table[a], table[b]) {
                    return Err(FrameError::NotFrameHom(format!(
                        "meet({}, {}) not preserved",
                        source.name(a),
                        source.name(b)
                    )));
                }
                if table[source.join(a, b)] != target.join(table[a], table[b]) {
                    return Err(FrameError::NotFrameHom(format!(
                        "join({}, {}) not preserved",
                        source.name(a),
                        source.name(b)
                    )));
                }
            }
        }
        Ok(FrameHom { source, target, table })
    }

    pub fn identity(frame: Arc<Frame>) -> FrameHom {
        let table = frame.elements().collect();
        FrameHom { source: frame.clone(), target: frame, table }
    }

    pub fn source(&self) -> &Arc<Frame> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Frame> {
        &self.target
    }

    pub fn apply(&self, a: Elem) -> Elem {
        self.table[a]
    }

    /// The right adjoint `k(b) = join { a : h(a) <= b }`. The adjunction
    /// `h(a) <= b <=> a <= k(b)` is asserted pointwise.
    pub fn right_adjoint(&self) -> Vec<Elem> {
        let k: Vec<Elem> = self
            .target
            .elements()
            .map(|b| {
                self.source.join_all(
                    self.source
                        .elements()
                        .filter(|&a| self.target.leq(self.table[a], b)),
                )
            })
            .collect();
        for a in self.source.elements() {
            for b in self.target.elements() {
                assert_eq!(
                    self.target.leq(self.table[a], b),
                    self.source.leq(a, k[b]),
                    "adjoint adjunction failed at ({a},{b})"
                );
            }
        }
        k
    }
}

/// A filter on a finite frame, stored by its principal generator. Built
/// either principally or from an explicit member set, which is validated
/// and canonicalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    frame: Arc<Frame>,
    generator: Elem,
    pub proper: bool,
    pub maximal: bool,
    pub prime: bool,
}

impl Filter {
    pub fn principal(frame: Arc<Frame>, generator: Elem) -> Result<Filter, FrameError> {
        frame.check_elem(generator)?;
        let proper = generator != frame.bottom();
        let maximal = proper && frame.atoms().contains(&generator);
        let prime = proper
            && frame.elements().all(|u| {
                frame.elements().all(|v| {
                    !frame.leq(generator, frame.join(u, v))
                        || frame.leq(generator, u)
                        || frame.leq(generator, v)
                })
            });
        Ok(Filter { frame, generator, proper, maximal, prime })
    }

    /// Accepts an explicit member set, checks the filter laws (nonempty,
    /// upward closed, closed under meet), and canonicalizes to the principal
    /// form.
    pub fn from_members(frame: Arc<Frame>, members: &[Elem]) -> Result<Filter, FrameError> {
        if members.is_empty() {
            return Err(FrameError::NotFilter(
                "nonempty".into(),
                "no members given".into(),
            ));
        }
        for &m in members {
            frame.check_elem(m)?;
        }
        let set: BTreeSet<Elem> = members.iter().copied().collect();
        for &u in &set {
            for v in frame.elements() {
                if frame.leq(u, v) && !set.contains(&v) {
                    return Err(FrameError::NotFilter(
                        "upward closed".into(),
                        format!("{} <= {} but {} is missing", frame.name(u), frame.name(v), frame.name(v)),
                    ));
                }
            }
            for &v in &set {
                if !set.contains(&frame.meet(u, v)) {
                    return Err(FrameError::NotFilter(
                        "closed under meet".into(),
                        format!("{} & {}", frame.name(u), frame.name(v)),
                    ));
                }
            }
        }
        let generator = frame.meet_all(set.iter().copied());
        Filter::principal(frame, generator)
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn contains(&self, u: Elem) -> bool {
        self.frame.leq(self.generator, u)
    }

    pub fn members(&self) -> Vec<Elem> {
        self.frame.elements().filter(|&u| self.contains(u)).collect()
    }
}

/// Enumerates all filters of a finite frame as principal up-sets, in
/// ascending generator order, with the proper/maximal/prime classification.
pub fn filters(frame: &Arc<Frame>) -> Vec<Filter> {
    frame
        .elements()
        .map(|g| Filter::principal(frame.clone(), g).expect("generator is a valid element"))
        .collect()
}

/// The quotient Heyting algebra of a frame by a proper filter. Classes are
/// `U ~ V  <=>  (U <=> V) in filter`; on a finite frame the quotient is
/// again a frame.
#[derive(Debug, Clone)]
pub struct QuotientFrame {
    base: Arc<Frame>,
    filter: Filter,
    quotient: Arc<Frame>,
    class_of: Vec<usize>,
    reps: Vec<Elem>,
}

impl QuotientFrame {
    pub fn new(base: Arc<Frame>, filter: Filter) -> Result<QuotientFrame, FrameError> {
        if !filter.proper {
            return Err(FrameError::ImproperFilter);
        }
        let n = base.len();
        let mut class_of = vec![usize::MAX; n];
        let mut reps: Vec<Elem> = Vec::new();
        for u in base.elements() {
            let found = reps
                .iter()
                .position(|&r| filter.contains(base.iff(u, r)));
            match found {
                Some(c) => class_of[u] = c,
                None => {
                    class_of[u] = reps.len();
                    reps.push(u);
                }
            }
        }
        let m = reps.len();
        let names: Vec<String> = reps.iter().map(|&r| format!("[{}]", base.name(r))).collect();
        let mut leq_rows = vec![vec![false; m]; m];
        for (i, &u) in reps.iter().enumerate() {
            for (j, &v) in reps.iter().enumerate() {
                leq_rows[i][j] = filter.contains(base.implies(u, v));
            }
        }
        // Class order must not depend on the chosen representatives.
        for u in base.elements() {
            for v in base.elements() {
                let via_classes = leq_rows[class_of[u]][class_of[v]];
                let direct = filter.contains(base.implies(u, v));
                assert_eq!(via_classes, direct, "quotient order ill-defined at ({u},{v})");
            }
        }
        let quotient = Arc::new(Frame::from_order(names, leq_rows)?);
        let q = QuotientFrame { base, filter, quotient, class_of, reps };
        q.assert_projection_is_heyting();
        Ok(q)
    }

    fn assert_projection_is_heyting(&self) {
        let b = &self.base;
        let q = &self.quotient;
        for u in b.elements() {
            for v in b.elements() {
                assert_eq!(
                    self.project(b.meet(u, v)),
                    q.meet(self.project(u), self.project(v)),
                    "projection does not preserve meet"
                );
                assert_eq!(
                    self.project(b.join(u, v)),
                    q.join(self.project(u), self.project(v)),
                    "projection does not preserve join"
                );
                assert_eq!(
                    self.project(b.implies(u, v)),
                    q.implies(self.project(u), self.project(v)),
                    "projection does not preserve implication"
                );
            }
        }
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.base
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    /// The quotient as a frame in its own right.
    pub fn quotient(&self) -> &Arc<Frame> {
        &self.quotient
    }

    pub fn project(&self, u: Elem) -> Elem {
        self.class_of[u]
    }

    pub fn representative(&self, class: Elem) -> Elem {
        self.reps[class]
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }
}

/// The Boolean algebra of regular elements (`not not U = U`) of a frame,
/// with meets inherited and joins regularized, plus the correspondence
/// between maximal filters of the frame and ultrafilters of the algebra.
#[derive(Debug, Clone)]
pub struct RegularAlgebra {
    base: Arc<Frame>,
    carrier: Vec<Elem>,
    algebra: Arc<Frame>,
    /// maximal filters of the base frame, ascending generator order
    maximal_filters: Vec<Filter>,
    /// for each maximal filter, the matching ultrafilter of the algebra
    ultrafilters: Vec<Filter>,
}

impl RegularAlgebra {
    pub fn new(base: Arc<Frame>) -> RegularAlgebra {
        let carrier: Vec<Elem> = base.elements().filter(|&u| base.is_regular(u)).collect();
        let m = carrier.len();
        let names: Vec<String> = carrier.iter().map(|&u| base.name(u).to_string()).collect();
        let mut leq_rows = vec![vec![false; m]; m];
        for i in 0..m {
            for j in 0..m {
                leq_rows[i][j] = base.leq(carrier[i], carrier[j]);
            }
        }
        let algebra =
            Arc::new(Frame::from_order(names, leq_rows).expect("regular elements form a lattice"));

        // Boolean laws: complement is negation, join is the regularized join.
        for (i, &u) in carrier.iter().enumerate() {
            let neg = base.neg(u);
            let ni = carrier
                .iter()
                .position(|&v| v == neg)
                .expect("negation of a regular element is regular");
            assert_eq!(algebra.meet(i, ni), algebra.bottom(), "u & ~u != 0");
            assert_eq!(algebra.join(i, ni), algebra.top(), "~~(u | ~u) != 1");
            for (j, &v) in carrier.iter().enumerate() {
                assert_eq!(
                    carrier[algebra.meet(i, j)],
                    base.meet(u, v),
                    "regular meet differs from base meet"
                );
                assert_eq!(
                    carrier[algebra.join(i, j)],
                    base.neg(base.neg(base.join(u, v))),
                    "regular join is not the regularized base join"
                );
            }
        }
        assert!(algebra.is_boolean(), "regular elements do not form a Boolean algebra");

        let maximal_filters: Vec<Filter> = filters(&base).into_iter().filter(|f| f.maximal).collect();
        let all_ultra: Vec<Filter> = filters(&algebra).into_iter().filter(|f| f.maximal).collect();
        let mut ultrafilters = Vec::new();
        for mf in &maximal_filters {
            let image: Vec<Elem> = (0..m).filter(|&i| mf.contains(carrier[i])).collect();
            let uf = Filter::from_members(algebra.clone(), &image)
                .expect("image of a maximal filter is a filter on the regular algebra");
            assert!(uf.maximal, "image of a maximal filter is not an ultrafilter");
            ultrafilters.push(uf);
        }
        // The correspondence is a bijection onto the ultrafilters.
        assert_eq!(ultrafilters.len(), all_ultra.len(), "maximal filter count mismatch");
        for uf in &all_ultra {
            assert_eq!(
                ultrafilters.iter().filter(|g| g.generator() == uf.generator()).count(),
                1,
                "ultrafilter correspondence is not bijective"
            );
        }

        RegularAlgebra { base, carrier, algebra, maximal_filters, ultrafilters }
    }

    pub fn base(&self) -> &Arc<Frame> {
        &self.base
    }

    /// Regular elements, as ids of the base frame, ascending.
    pub fn carrier(&self) -> &[Elem] {
        &self.carrier
    }

    pub fn algebra(&self) -> &Arc<Frame> {
        &self.algebra
    }

    pub fn maximal_filters(&self) -> &[Filter] {
        &self.maximal_filters
    }

    pub fn ultrafilters(&self) -> &[Filter] {
        &self.ultrafilters
    }

    /// Index of a base element in the regular carrier, if it is regular.
    pub fn index_of(&self, u: Elem) -> Option<usize> {
        self.carrier.iter().position(|&v| v == u)
    }

    /// The basic set `D(U)`: indices (into `maximal_filters`) of the maximal
    /// filters whose image on the regular algebra contains `U`.
    pub fn d_set(&self, u: Elem) -> Vec<usize> {
        assert!(self.base.is_regular(u), "D(U) is defined for regular U");
        self.maximal_filters
            .iter()
            .enumerate()
            .filter(|(_, mf)| mf.contains(u))
            .map(|(i, _)| i)
            .collect()
    }
}
