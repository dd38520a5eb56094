//! Heyting-valued sets and their morphisms at finite scale: validation,
//! composition, mono/epi/iso classification, representing maps, singletons
//! and completion, finite limits, subobject lattices with change-of-base
//! adjoints, the subobject classifier, and power objects.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frame::{Elem, Frame};

mod higher;
mod limits;
mod subobject;

pub use higher::{classifier, characteristic, power_object, power_transpose, power_untranspose, sub_from_characteristic, Classifier, PowerObject};
pub use limits::{enumerate_morphisms, equalizer, product, pullback, terminal, verify_equalizer, verify_product, verify_pullback, verify_terminal};
pub use subobject::{exists_along, forall_along, from_mono, image_factorization, pullback_sub, pullback_sub_meet_form, StrictRelation, SubobjectLattice};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HSetError {
    #[error("symmetry fails at ({a}, {b})")]
    Symmetry { a: String, b: String },
    #[error("transitivity fails at ({a}, {b}, {c})")]
    Transitivity { a: String, b: String, c: String },
    #[error("morphism law fails: {0}")]
    NotMorphism(String),
    #[error("objects live over different frames")]
    FrameMismatch,
    #[error("domain/codomain mismatch")]
    ObjectMismatch,
    #[error("strictness fails at ({a}, {b})")]
    NotStrict { a: String, b: String },
    #[error("search space too large: {what} has {size} candidates (bound {bound})")]
    SizeGuard { what: String, size: usize, bound: usize },
    #[error("frame: {0}")]
    Frame(#[from] crate::frame::FrameError),
}

/// Enumeration budget for brute-force searches (singleton tables, Hom sets,
/// representing maps). The default keeps everything desk-scale.
#[derive(Debug, Clone, Copy)]
pub struct SizeGuard {
    pub max_candidates: usize,
}

impl Default for SizeGuard {
    fn default() -> SizeGuard {
        SizeGuard { max_candidates: 4_000_000 }
    }
}

impl SizeGuard {
    pub fn check(&self, what: &str, base: usize, exp: usize) -> Result<usize, HSetError> {
        let mut size: usize = 1;
        for _ in 0..exp {
            size = size.checked_mul(base).unwrap_or(usize::MAX);
            if size > self.max_candidates {
                return Err(HSetError::SizeGuard {
                    what: what.to_string(),
                    size,
                    bound: self.max_candidates,
                });
            }
        }
        Ok(size)
    }
}

/// A carrier with a frame-valued partial equivalence `alpha`. The diagonal
/// `alpha(a, a)` is the extent of `a`; elements of extent 1 are global.
#[derive(Clone, PartialEq, Eq)]
pub struct HSet {
    frame: Arc<Frame>,
    names: Vec<String>,
    alpha: Vec<Elem>, // |carrier|^2, row-major
}

impl fmt::Debug for HSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HSet({})", self.names.join(", "))
    }
}

/// Outcome of the completeness scan, with witnesses for each failing clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessReport {
    pub separated: bool,
    pub separation_witness: Option<(usize, usize)>,
    /// element and sub-extent with no restriction
    pub missing_restriction: Option<(usize, Elem)>,
    /// a pairwise-compatible family with no supremum
    pub missing_amalgamation: Option<Vec<usize>>,
}

impl CompletenessReport {
    pub fn complete(&self) -> bool {
        self.separated && self.missing_restriction.is_none() && self.missing_amalgamation.is_none()
    }
}

impl HSet {
    pub fn new(
        frame: Arc<Frame>,
        names: Vec<String>,
        alpha_rows: Vec<Vec<Elem>>,
    ) -> Result<HSet, HSetError> {
        let violations = Self::violations(&frame, &names, &alpha_rows);
        if let Some(first) = violations.into_iter().next() {
            return Err(first);
        }
        let m = names.len();
        let mut alpha = vec![0; m * m];
        for (a, row) in alpha_rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                alpha[a * m + b] = v;
            }
        }
        Ok(HSet { frame, names, alpha })
    }

    /// Constructor for valuations that are valid by construction (derived
    /// objects of limits and subobjects), skipping the cubic law scan.
    pub(crate) fn new_unchecked(frame: Arc<Frame>, names: Vec<String>, alpha: Vec<Elem>) -> HSet {
        debug_assert_eq!(alpha.len(), names.len() * names.len());
        HSet { frame, names, alpha }
    }

    /// Full law check, reporting every violation with witnesses.
    pub fn violations(frame: &Arc<Frame>, names: &[String], alpha_rows: &[Vec<Elem>]) -> Vec<HSetError> {
        let m = names.len();
        let mut out = Vec::new();
        if alpha_rows.len() != m || alpha_rows.iter().any(|r| r.len() != m) {
            out.push(HSetError::NotMorphism(format!(
                "valuation table is not {m} x {m}"
            )));
            return out;
        }
        for row in alpha_rows {
            for &v in row {
                if frame.check_elem(v).is_err() {
                    out.push(HSetError::Frame(crate::frame::FrameError::UnknownElement(
                        format!("#{v}"),
                    )));
                    return out;
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                if alpha_rows[a][b] != alpha_rows[b][a] {
                    out.push(HSetError::Symmetry { a: names[a].clone(), b: names[b].clone() });
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let lhs = frame.meet(alpha_rows[a][b], alpha_rows[b][c]);
                    if !frame.leq(lhs, alpha_rows[a][c]) {
                        out.push(HSetError::Transitivity {
                            a: names[a].clone(),
                            b: names[b].clone(),
                            c: names[c].clone(),
                        });
                    }
                }
            }
        }
        out
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.len()
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    #[inline]
    pub fn alpha(&self, a: usize, b: usize) -> Elem {
        self.alpha[a * self.len() + b]
    }

    #[inline]
    pub fn extent(&self, a: usize) -> Elem {
        self.alpha(a, a)
    }

    pub fn global_elements(&self) -> Vec<usize> {
        self.elements()
            .filter(|&a| self.extent(a) == self.frame.top())
            .collect()
    }

    /// `b` is below `a` when `alpha(a, b) = alpha(b)`: `b` behaves as the
    /// restriction of `a` to its own extent.
    pub fn below(&self, b: usize, a: usize) -> bool {
        self.alpha(a, b) == self.extent(b)
    }

    /// The restriction of `a` to `u <= extent(a)`, when it exists and is
    /// unique.
    pub fn restrict(&self, a: usize, u: Elem) -> Option<usize> {
        let mut found = None;
        for b in self.elements() {
            if self.below(b, a) && self.extent(b) == u {
                if found.is_some() {
                    return None; // ambiguous in a non-separated carrier
                }
                found = Some(b);
            }
        }
        found
    }

    pub fn is_separated(&self) -> bool {
        self.separation_witness().is_none()
    }

    pub fn separation_witness(&self) -> Option<(usize, usize)> {
        for a in self.elements() {
            for b in self.elements() {
                if a != b
                    && self.alpha(a, b) == self.extent(a)
                    && self.alpha(a, b) == self.extent(b)
                {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Completeness scan per the definition: separatedness, existence of
    /// restrictions, and suprema of pairwise-compatible families (including
    /// the empty family, whose supremum is an extent-0 element).
    pub fn completeness(&self) -> CompletenessReport {
        let separation_witness = self.separation_witness();
        let mut missing_restriction = None;
        'outer: for a in self.elements() {
            for u in self.frame.elements() {
                if self.frame.leq(u, self.extent(a))
                    && !self.elements().any(|b| self.below(b, a) && self.extent(b) == u)
                {
                    missing_restriction = Some((a, u));
                    break 'outer;
                }
            }
        }
        let mut missing_amalgamation = None;
        let m = self.len();
        if m <= 16 {
            'families: for mask in 0u32..(1u32 << m) {
                let family: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
                let compatible = family.iter().all(|&i| {
                    family.iter().all(|&j| {
                        self.alpha(i, j) == self.frame.meet(self.extent(i), self.extent(j))
                    })
                });
                if !compatible {
                    continue;
                }
                // least upper bound with respect to `below`
                let uppers: Vec<usize> = self
                    .elements()
                    .filter(|&s| family.iter().all(|&i| self.below(i, s)))
                    .collect();
                let has_sup = uppers.iter().any(|&s| uppers.iter().all(|&t| self.below(s, t)));
                if !has_sup {
                    missing_amalgamation = Some(family);
                    break 'families;
                }
            }
        }
        CompletenessReport {
            separated: separation_witness.is_none(),
            separation_witness,
            missing_restriction,
            missing_amalgamation,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.completeness().complete()
    }

    /// The terminal object: one element of extent 1.
    pub fn terminal(frame: Arc<Frame>) -> HSet {
        let top = frame.top();
        HSet { frame, names: vec!["*".into()], alpha: vec![top] }
    }

    /// Product valuation: pointwise meet over components. Element names are
    /// the component name tuples; the empty product is the terminal object.
    pub fn product_of(factors: &[&HSet]) -> Result<HSet, HSetError> {
        if factors.is_empty() {
            panic!("product_of needs the frame for the empty product; use HSet::terminal");
        }
        let frame = factors[0].frame.clone();
        for f in factors {
            if f.frame != frame {
                return Err(HSetError::FrameMismatch);
            }
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let tuples = mixed_tuples(&sizes);
        let names: Vec<String> = tuples
            .iter()
            .map(|t| {
                let inner: Vec<&str> =
                    t.iter().enumerate().map(|(i, &x)| factors[i].name(x)).collect();
                format!("({})", inner.join(","))
            })
            .collect();
        let n = tuples.len();
        let mut alpha = vec![0; n * n];
        for (i, t) in tuples.iter().enumerate() {
            for (j, s) in tuples.iter().enumerate() {
                alpha[i * n + j] = frame.meet_all(
                    t.iter().zip(s.iter()).enumerate().map(|(k, (&x, &y))| factors[k].alpha(x, y)),
                );
            }
        }
        Ok(HSet { frame, names, alpha })
    }

    /// The n-th power with the componentwise-meet valuation. The 0-th power
    /// is the terminal object.
    pub fn power(self: &Arc<HSet>, n: usize) -> Arc<HSet> {
        if n == 0 {
            return Arc::new(HSet::terminal(self.frame.clone()));
        }
        if n == 1 {
            return self.clone();
        }
        let factors: Vec<&HSet> = (0..n).map(|_| self.as_ref()).collect();
        Arc::new(HSet::product_of(&factors).expect("same frame"))
    }

    /// Enumerates all singleton tables on this carrier: maps bounded by the
    /// laws of a singleton. Deterministic lexicographic order.
    pub fn singletons(&self, guard: &SizeGuard) -> Result<Vec<Vec<Elem>>, HSetError> {
        let m = self.len();
        let nf = self.frame.len();
        guard.check("singleton tables", nf, m)?;
        let mut out = Vec::new();
        let mut table = vec![0usize; m];
        loop {
            if self.is_singleton_table(&table) {
                out.push(table.clone());
            }
            // odometer over frame elements, last coordinate fastest
            let mut i = m;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                table[i] += 1;
                if table[i] < nf {
                    break;
                }
                table[i] = 0;
            }
            if m == 0 {
                return Ok(out);
            }
        }
    }

    pub fn is_strict_table(&self, table: &[Elem]) -> bool {
        let m = self.len();
        (0..m).all(|a| {
            self.frame.leq(table[a], self.extent(a))
                && (0..m).all(|b| {
                    self.frame
                        .leq(self.frame.meet(table[a], self.alpha(a, b)), table[b])
                })
        })
    }

    pub fn is_singleton_table(&self, table: &[Elem]) -> bool {
        let m = self.len();
        self.is_strict_table(table)
            && (0..m).all(|a| {
                (0..m).all(|b| {
                    self.frame
                        .leq(self.frame.meet(table[a], table[b]), self.alpha(a, b))
                })
            })
    }
}

pub(crate) use crate::util::mixed_tuples;

/// A morphism of Heyting-valued sets: a frame-valued table on dom x cod
/// subject to the bimodule, single-valuedness and totality laws. Tables are
/// the canonical form; representing maps are derived views.
#[derive(Clone, PartialEq)]
pub struct HMorphism {
    dom: Arc<HSet>,
    cod: Arc<HSet>,
    table: Vec<Elem>, // |dom| * |cod|
}

impl fmt::Debug for HMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HMorphism({:?} -> {:?})", self.dom, self.cod)
    }
}

/// Classification of a morphism, with every map that represents it (the
/// search is exhaustive over carrier maps, size-guarded).
#[derive(Debug, Clone)]
pub struct MorphismClass {
    pub mono: bool,
    pub epi: bool,
    pub iso: bool,
    pub representing_maps: Vec<Vec<usize>>,
}

impl HMorphism {
    pub fn new(dom: Arc<HSet>, cod: Arc<HSet>, table: Vec<Elem>) -> Result<HMorphism, HSetError> {
        if dom.frame() != cod.frame() {
            return Err(HSetError::FrameMismatch);
        }
        let (m, n) = (dom.len(), cod.len());
        if table.len() != m * n {
            return Err(HSetError::NotMorphism(format!(
                "table has {} entries for a {m} x {n} morphism",
                table.len()
            )));
        }
        let frame = dom.frame();
        for &v in &table {
            frame.check_elem(v)?;
        }
        let phi = |a: usize, b: usize| table[a * n + b];
        for a in 0..m {
            for b in 0..n {
                for a2 in 0..m {
                    for b2 in 0..n {
                        let lhs =
                            frame.meet(frame.meet(dom.alpha(a, a2), phi(a, b)), cod.alpha(b, b2));
                        if !frame.leq(lhs, phi(a2, b2)) {
                            return Err(HSetError::NotMorphism(format!(
                                "bimodule law fails at ({}, {}, {}, {})",
                                dom.name(a),
                                dom.name(a2),
                                cod.name(b),
                                cod.name(b2)
                            )));
                        }
                    }
                }
            }
        }
        for a in 0..m {
            for b in 0..n {
                for b2 in 0..n {
                    if !frame.leq(frame.meet(phi(a, b), phi(a, b2)), cod.alpha(b, b2)) {
                        return Err(HSetError::NotMorphism(format!(
                            "single-valuedness fails at ({}, {}, {})",
                            dom.name(a),
                            cod.name(b),
                            cod.name(b2)
                        )));
                    }
                }
            }
        }
        for a in 0..m {
            let total = frame.join_all((0..n).map(|b| phi(a, b)));
            if total != dom.extent(a) {
                return Err(HSetError::NotMorphism(format!(
                    "totality fails at {}: join of row is {}, extent is {}",
                    dom.name(a),
                    frame.name(total),
                    frame.name(dom.extent(a))
                )));
            }
        }
        Ok(HMorphism { dom, cod, table })
    }

    pub fn identity(object: Arc<HSet>) -> HMorphism {
        let m = object.len();
        let mut table = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = object.alpha(a, b);
            }
        }
        HMorphism { dom: object.clone(), cod: object, table }
    }

    pub fn dom(&self) -> &Arc<HSet> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<HSet> {
        &self.cod
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> Elem {
        self.table[a * self.cod.len() + b]
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    /// `(psi . phi)(a, c) = join_b phi(a, b) & psi(b, c)`; the result is
    /// revalidated.
    pub fn compose(&self, then: &HMorphism) -> Result<HMorphism, HSetError> {
        if self.cod.frame() != then.dom.frame() {
            return Err(HSetError::FrameMismatch);
        }
        if self.cod != then.dom {
            return Err(HSetError::ObjectMismatch);
        }
        let frame = self.dom.frame();
        let (m, k, n) = (self.dom.len(), self.cod.len(), then.cod.len());
        let mut table = vec![0; m * n];
        for a in 0..m {
            for c in 0..n {
                table[a * n + c] =
                    frame.join_all((0..k).map(|b| frame.meet(self.at(a, b), then.at(b, c))));
            }
        }
        HMorphism::new(self.dom.clone(), then.cod.clone(), table)
    }

    pub fn is_mono(&self) -> bool {
        let frame = self.dom.frame();
        self.dom.elements().all(|a| {
            self.dom.elements().all(|a2| {
                self.cod.elements().all(|b| {
                    frame.leq(frame.meet(self.at(a, b), self.at(a2, b)), self.dom.alpha(a, a2))
                })
            })
        })
    }

    pub fn is_epi(&self) -> bool {
        let frame = self.dom.frame();
        self.cod.elements().all(|b| {
            frame.join_all(self.dom.elements().map(|a| self.at(a, b))) == self.cod.extent(b)
        })
    }

    /// The category is balanced: iso = mono + epi, with the inverse given by
    /// the transpose table.
    pub fn inverse(&self) -> Option<HMorphism> {
        if !(self.is_mono() && self.is_epi()) {
            return None;
        }
        let (m, n) = (self.dom.len(), self.cod.len());
        let mut table = vec![0; n * m];
        for b in 0..n {
            for a in 0..m {
                table[b * m + a] = self.at(a, b);
            }
        }
        Some(
            HMorphism::new(self.cod.clone(), self.dom.clone(), table)
                .expect("transpose of an iso is a morphism"),
        )
    }

    /// Does the map `h : dom -> cod` represent this morphism?
    /// (`phi(a, b) <= beta(h a, b)` for all entries.)
    pub fn is_represented_by(&self, h: &[usize]) -> bool {
        let frame = self.dom.frame();
        self.dom.elements().all(|a| {
            self.cod
                .elements()
                .all(|b| frame.leq(self.at(a, b), self.cod.alpha(h[a], b)))
        })
    }

    /// Every map representing this morphism, in lexicographic order.
    pub fn representing_maps(&self, guard: &SizeGuard) -> Result<Vec<Vec<usize>>, HSetError> {
        let (m, n) = (self.dom.len(), self.cod.len());
        if m == 0 {
            return Ok(vec![Vec::new()]);
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        guard.check("representing maps", n, m)?;
        // per-element candidates keep the search tame
        let frame = self.dom.frame();
        let candidates: Vec<Vec<usize>> = (0..m)
            .map(|a| {
                (0..n)
                    .filter(|&h| {
                        (0..n).all(|b| frame.leq(self.at(a, b), self.cod.alpha(h, b)))
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; m];
        fn go(
            a: usize,
            m: usize,
            candidates: &[Vec<usize>],
            pick: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if a == m {
                out.push(pick.clone());
                return;
            }
            for &h in &candidates[a] {
                pick[a] = h;
                go(a + 1, m, candidates, pick, out);
            }
        }
        go(0, m, &candidates, &mut pick, &mut out);
        Ok(out)
    }

    pub fn classify(&self, guard: &SizeGuard) -> Result<MorphismClass, HSetError> {
        let mono = self.is_mono();
        let epi = self.is_epi();
        Ok(MorphismClass {
            mono,
            epi,
            iso: mono && epi,
            representing_maps: self.representing_maps(guard)?,
        })
    }

    /// Builds the morphism represented by a map, when the map qualifies
    /// (`alpha(a, a') <= beta(h a, h a')`); the table is
    /// `alpha(a) & beta(h a, b)`. The qualification check suffices for all
    /// three morphism laws, so the table is not re-validated.
    pub fn from_map(dom: Arc<HSet>, cod: Arc<HSet>, h: &[usize]) -> Result<HMorphism, HSetError> {
        if dom.frame() != cod.frame() {
            return Err(HSetError::FrameMismatch);
        }
        let frame = dom.frame().clone();
        for a in dom.elements() {
            for a2 in dom.elements() {
                if !frame.leq(dom.alpha(a, a2), cod.alpha(h[a], h[a2])) {
                    return Err(HSetError::NotMorphism(format!(
                        "map does not represent a morphism: alpha({}, {}) is not below beta(h{}, h{})",
                        dom.name(a),
                        dom.name(a2),
                        dom.name(a),
                        dom.name(a2)
                    )));
                }
            }
        }
        let n = cod.len();
        let mut table = vec![0; dom.len() * n];
        for a in dom.elements() {
            for b in cod.elements() {
                table[a * n + b] = frame.meet(dom.extent(a), cod.alpha(h[a], b));
            }
        }
        Ok(HMorphism { dom, cod, table })
    }

    /// Table constructor for morphisms that are valid by construction
    /// (tuplings of validated morphisms, term interpretations in scans).
    pub(crate) fn new_unchecked(dom: Arc<HSet>, cod: Arc<HSet>, table: Vec<Elem>) -> HMorphism {
        debug_assert_eq!(table.len(), dom.len() * cod.len());
        HMorphism { dom, cod, table }
    }

    /// Pointwise order on tables (used by the one-sided equality criterion).
    pub fn pointwise_leq(&self, other: &HMorphism) -> bool {
        let frame = self.dom.frame();
        self.table
            .iter()
            .zip(other.table.iter())
            .all(|(&x, &y)| frame.leq(x, y))
    }
}

/// The completion of a Heyting-valued set: carrier of all singletons, with
/// the canonical isomorphism pair.
#[derive(Debug, Clone)]
pub struct Completion {
    pub completed: Arc<HSet>,
    /// the iso represented by the table (a, sigma) -> sigma(a)
    pub to: HMorphism,
    pub from: HMorphism,
    /// the singleton tables, in enumeration order (carrier order of
    /// `completed`)
    pub singletons: Vec<Vec<Elem>>,
}

/// Builds the completion. Singleton names record their value rows.
pub fn completion(object: &Arc<HSet>, guard: &SizeGuard) -> Result<Completion, HSetError> {
    let frame = object.frame().clone();
    let singletons = object.singletons(guard)?;
    let k = singletons.len();
    let names: Vec<String> = singletons
        .iter()
        .map(|s| {
            let inner: Vec<String> = object
                .elements()
                .map(|a| format!("{}:{}", object.name(a), frame.name(s[a])))
                .collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let mut alpha = vec![0; k * k];
    for (i, s) in singletons.iter().enumerate() {
        for (j, t) in singletons.iter().enumerate() {
            alpha[i * k + j] =
                frame.join_all(object.elements().map(|a| frame.meet(s[a], t[a])));
        }
    }
    let completed = Arc::new(HSet { frame: frame.clone(), names, alpha });
    let mut to_table = vec![0; object.len() * k];
    for a in object.elements() {
        for (i, s) in singletons.iter().enumerate() {
            to_table[a * k + i] = s[a];
        }
    }
    let to = HMorphism::new(object.clone(), completed.clone(), to_table)?;
    let mut from_table = vec![0; k * object.len()];
    for (i, s) in singletons.iter().enumerate() {
        for a in object.elements() {
            from_table[i * object.len() + a] = s[a];
        }
    }
    let from = HMorphism::new(completed.clone(), object.clone(), from_table)?;
    // the pair is a mutually inverse iso
    debug_assert!(to.is_mono() && to.is_epi());
    debug_assert_eq!(to.compose(&from).unwrap(), HMorphism::identity(object.clone()));
    Ok(Completion { completed, to, from, singletons })
}

#[cfg(test)]
mod tests;
