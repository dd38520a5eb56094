//! Presheaves and sheaves on a finite frame, the functor into
//! Heyting-valued sets, sheaves of structures and their lifting to
//! Heyting-valued structures, section structures, presheaf filter
//! quotients, and generators for discrete families and bounded Boolean
//! powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frame::{Elem, Frame};
use crate::hset::{HMorphism, HSet, HSetError};
use crate::logic::LogicError;

mod structures;

pub use structures::{
    boolean_power, discrete_family, lift_structure, section_structure, sections_quotient,
    sections_quotient_colimit, SheafStructure,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SheafError {
    #[error("restriction map missing for {upper} > {lower}")]
    MissingRestriction { upper: String, lower: String },
    #[error("not functorial: restricting from {upper} via {mid} to {lower} differs at section {section}")]
    NotFunctorial { upper: String, mid: String, lower: String, section: String },
    #[error("restriction map for {upper} > {lower} is not a map into the lower sections")]
    BadRestriction { upper: String, lower: String },
    #[error("structure data: {0}")]
    BadStructure(String),
    #[error("improper filter (contains bottom) where a proper filter is required")]
    ImproperFilter,
    #[error("the frame is not a Boolean algebra")]
    NotBoolean,
    #[error("{0}")]
    Frame(#[from] crate::frame::FrameError),
    #[error("{0}")]
    HSet(#[from] HSetError),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

/// A presheaf on a finite frame: per-element section sets and restriction
/// maps for every strictly comparable pair, validated functorial.
#[derive(Clone, PartialEq, Eq)]
pub struct Presheaf {
    frame: Arc<Frame>,
    sections: Vec<Vec<String>>,
    /// (upper, lower) -> index map, for every pair lower < upper
    restrictions: BTreeMap<(Elem, Elem), Vec<usize>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<usize> = self.sections.iter().map(|s| s.len()).collect();
        write!(f, "Presheaf(sections {:?})", sizes)
    }
}

/// Verdict of the separatedness/gluing scan, with witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafReport {
    /// element, cover, and two sections agreeing on the cover
    pub separation_failure: Option<(Elem, Vec<Elem>, usize, usize)>,
    /// element and cover with a compatible family admitting no amalgamation
    pub gluing_failure: Option<(Elem, Vec<Elem>)>,
}

impl SheafReport {
    pub fn separated(&self) -> bool {
        self.separation_failure.is_none()
    }

    pub fn is_sheaf(&self) -> bool {
        self.separation_failure.is_none() && self.gluing_failure.is_none()
    }
}

impl Presheaf {
    pub fn new(
        frame: Arc<Frame>,
        sections: Vec<Vec<String>>,
        restrictions: BTreeMap<(Elem, Elem), Vec<usize>>,
    ) -> Result<Presheaf, SheafError> {
        if sections.len() != frame.len() {
            return Err(SheafError::BadStructure(format!(
                "{} section sets for {} frame elements",
                sections.len(),
                frame.len()
            )));
        }
        for (u, secs) in sections.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            for s in secs {
                if !seen.insert(s) {
                    return Err(SheafError::BadStructure(format!(
                        "duplicate section name {s} at {}",
                        frame.name(u)
                    )));
                }
            }
        }
        for u in frame.elements() {
            for w in frame.elements() {
                if w != u && frame.leq(w, u) {
                    let map = restrictions.get(&(u, w)).ok_or_else(|| {
                        SheafError::MissingRestriction {
                            upper: frame.name(u).to_string(),
                            lower: frame.name(w).to_string(),
                        }
                    })?;
                    if map.len() != sections[u].len()
                        || map.iter().any(|&i| i >= sections[w].len())
                    {
                        return Err(SheafError::BadRestriction {
                            upper: frame.name(u).to_string(),
                            lower: frame.name(w).to_string(),
                        });
                    }
                }
            }
        }
        let p = Presheaf { frame, sections, restrictions };
        p.check_functorial()?;
        Ok(p)
    }

    fn check_functorial(&self) -> Result<(), SheafError> {
        let frame = &self.frame;
        for u in frame.elements() {
            for v in frame.elements() {
                for w in frame.elements() {
                    if v != u && frame.leq(v, u) && w != v && frame.leq(w, v) {
                        for s in 0..self.sections[u].len() {
                            let via = self.restrict(v, w, self.restrict(u, v, s));
                            let direct = self.restrict(u, w, s);
                            if via != direct {
                                return Err(SheafError::NotFunctorial {
                                    upper: frame.name(u).to_string(),
                                    mid: frame.name(v).to_string(),
                                    lower: frame.name(w).to_string(),
                                    section: self.sections[u][s].clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn sections(&self, u: Elem) -> &[String] {
        &self.sections[u]
    }

    pub fn section_count(&self, u: Elem) -> usize {
        self.sections[u].len()
    }

    /// Restriction of section `s` of `u` to `w <= u` (identity when equal).
    pub fn restrict(&self, u: Elem, w: Elem, s: usize) -> usize {
        if u == w {
            return s;
        }
        self.restrictions[&(u, w)][s]
    }

    /// All covers of `u`: antichains of elements below `u` whose join is
    /// `u`, deduplicated; the empty cover of bottom is included.
    pub fn covers(&self, u: Elem) -> Vec<Vec<Elem>> {
        covers_of(&self.frame, u)
    }

    /// Separatedness and gluing, checked over every cover of every element.
    pub fn sheaf_report(&self) -> SheafReport {
        let frame = &self.frame;
        let mut separation_failure = None;
        let mut gluing_failure = None;
        'outer: for u in frame.elements() {
            for cover in self.covers(u) {
                // separatedness: sections agreeing on the cover are equal
                for a in 0..self.section_count(u) {
                    for b in (a + 1)..self.section_count(u) {
                        if cover.iter().all(|&w| self.restrict(u, w, a) == self.restrict(u, w, b))
                        {
                            separation_failure = Some((u, cover.clone(), a, b));
                            break 'outer;
                        }
                    }
                }
            }
        }
        'outer2: for u in frame.elements() {
            for cover in self.covers(u) {
                let sizes: Vec<usize> = cover.iter().map(|&w| self.section_count(w)).collect();
                'family: for family in crate::util::mixed_tuples(&sizes) {
                    // compatibility on pairwise meets
                    for (i, &wi) in cover.iter().enumerate() {
                        for (j, &wj) in cover.iter().enumerate() {
                            if i < j {
                                let meet = frame.meet(wi, wj);
                                if self.restrict(wi, meet, family[i])
                                    != self.restrict(wj, meet, family[j])
                                {
                                    continue 'family;
                                }
                            }
                        }
                    }
                    let glue_count = (0..self.section_count(u))
                        .filter(|&s| {
                            cover
                                .iter()
                                .enumerate()
                                .all(|(i, &w)| self.restrict(u, w, s) == family[i])
                        })
                        .count();
                    if glue_count != 1 {
                        gluing_failure = Some((u, cover.clone()));
                        break 'outer2;
                    }
                }
            }
        }
        SheafReport { separation_failure, gluing_failure }
    }

    pub fn is_sheaf(&self) -> bool {
        self.sheaf_report().is_sheaf()
    }

    /// Carrier index of a section in the disjoint union underlying the
    /// associated Heyting-valued set.
    pub fn theta_index(&self, u: Elem, s: usize) -> usize {
        let mut offset = 0;
        for v in 0..u {
            offset += self.sections[v].len();
        }
        offset + s
    }

    /// Inverse of `theta_index`.
    pub fn theta_unindex(&self, mut idx: usize) -> (Elem, usize) {
        for u in self.frame.elements() {
            if idx < self.sections[u].len() {
                return (u, idx);
            }
            idx -= self.sections[u].len();
        }
        panic!("theta index out of range");
    }

    /// The largest element below both extents on which two sections agree:
    /// the valuation of the associated Heyting-valued set.
    pub fn delta(&self, (u, s): (Elem, usize), (v, t): (Elem, usize)) -> Elem {
        let frame = &self.frame;
        frame.join_all(frame.elements().filter(|&w| {
            frame.leq(w, frame.meet(u, v))
                && self.restrict(u, w, s) == self.restrict(v, w, t)
        }))
    }

    /// The associated Heyting-valued set on the disjoint union of all
    /// sections. Section names are kept when globally unique, otherwise
    /// qualified as `name@element`.
    pub fn theta(&self) -> Arc<HSet> {
        let frame = self.frame.clone();
        let mut names = Vec::new();
        {
            let mut all: Vec<&String> = Vec::new();
            for u in frame.elements() {
                all.extend(self.sections[u].iter());
            }
            let unique = {
                let mut seen = std::collections::BTreeSet::new();
                all.iter().all(|n| seen.insert(n.as_str()))
            };
            for u in frame.elements() {
                for s in &self.sections[u] {
                    if unique {
                        names.push(s.clone());
                    } else {
                        names.push(format!("{}@{}", s, frame.name(u)));
                    }
                }
            }
        }
        let n = names.len();
        let mut rows = vec![vec![0; n]; n];
        for i in 0..n {
            let (u, s) = self.theta_unindex(i);
            for j in 0..n {
                let (v, t) = self.theta_unindex(j);
                rows[i][j] = self.delta((u, s), (v, t));
            }
        }
        Arc::new(HSet::new(frame, names, rows).expect("theta valuation satisfies the laws"))
    }

    /// The pointwise n-th power presheaf: sections are n-tuples,
    /// restrictions act componentwise.
    pub fn power(&self, n: usize) -> Presheaf {
        let frame = self.frame.clone();
        let mut sections = Vec::new();
        let mut tuple_indices: Vec<Vec<Vec<usize>>> = Vec::new();
        for u in frame.elements() {
            let tuples = crate::util::tuples(self.section_count(u), n);
            sections.push(
                tuples
                    .iter()
                    .map(|t| {
                        let inner: Vec<&str> =
                            t.iter().map(|&s| self.sections[u][s].as_str()).collect();
                        format!("({})", inner.join(","))
                    })
                    .collect(),
            );
            tuple_indices.push(tuples);
        }
        let mut restrictions = BTreeMap::new();
        for u in frame.elements() {
            for w in frame.elements() {
                if w != u && frame.leq(w, u) {
                    let map = tuple_indices[u]
                        .iter()
                        .map(|t| {
                            let restricted: Vec<usize> =
                                t.iter().map(|&s| self.restrict(u, w, s)).collect();
                            crate::util::rank(&restricted, self.section_count(w))
                        })
                        .collect();
                    restrictions.insert((u, w), map);
                }
            }
        }
        Presheaf { frame, sections, restrictions }
    }
}

/// Covers of `u` as antichains of lower bounds joining to `u`. The empty
/// antichain covers bottom.
pub fn covers_of(frame: &Arc<Frame>, u: Elem) -> Vec<Vec<Elem>> {
    let below: Vec<Elem> = frame.elements().filter(|&w| frame.leq(w, u)).collect();
    let mut out = Vec::new();
    let k = below.len();
    assert!(k <= 20, "cover enumeration needs a small frame");
    for mask in 0u32..(1u32 << k) {
        let family: Vec<Elem> =
            below.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &w)| w).collect();
        if frame.join_all(family.iter().copied()) != u {
            continue;
        }
        let antichain = family
            .iter()
            .all(|&a| family.iter().all(|&b| a == b || !frame.leq(a, b)));
        if antichain {
            out.push(family);
        }
    }
    out
}

/// A natural transformation between presheaves over one frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatTrans {
    pub dom: Arc<Presheaf>,
    pub cod: Arc<Presheaf>,
    /// per frame element, a map dom sections -> cod sections
    pub maps: Vec<Vec<usize>>,
}

impl NatTrans {
    pub fn new(
        dom: Arc<Presheaf>,
        cod: Arc<Presheaf>,
        maps: Vec<Vec<usize>>,
    ) -> Result<NatTrans, SheafError> {
        if dom.frame() != cod.frame() {
            return Err(SheafError::BadStructure("different frames".into()));
        }
        let frame = dom.frame().clone();
        if maps.len() != frame.len() {
            return Err(SheafError::BadStructure("one map per frame element required".into()));
        }
        for u in frame.elements() {
            if maps[u].len() != dom.section_count(u)
                || maps[u].iter().any(|&i| i >= cod.section_count(u))
            {
                return Err(SheafError::BadStructure(format!(
                    "component at {} is not a map between the section sets",
                    frame.name(u)
                )));
            }
        }
        // naturality
        for u in frame.elements() {
            for w in frame.elements() {
                if w != u && frame.leq(w, u) {
                    for s in 0..dom.section_count(u) {
                        let down_then_map = maps[w][dom.restrict(u, w, s)];
                        let map_then_down = cod.restrict(u, w, maps[u][s]);
                        if down_then_map != map_then_down {
                            return Err(SheafError::BadStructure(format!(
                                "not natural at {} > {} on section {}",
                                frame.name(u),
                                frame.name(w),
                                dom.sections(u)[s]
                            )));
                        }
                    }
                }
            }
        }
        Ok(NatTrans { dom, cod, maps })
    }

    /// The morphism of Heyting-valued sets represented by the induced map
    /// of carriers.
    pub fn theta(&self) -> Result<HMorphism, SheafError> {
        let dom_set = self.dom.theta();
        let cod_set = self.cod.theta();
        let map: Vec<usize> = (0..dom_set.len())
            .map(|i| {
                let (u, s) = self.dom.theta_unindex(i);
                self.cod.theta_index(u, self.maps[u][s])
            })
            .collect();
        Ok(HMorphism::from_map(dom_set, cod_set, &map)?)
    }
}

/// Verifies that the canonical map from the power presheaf realizes the
/// product of Heyting-valued sets: the two explicit iso conditions for an
/// extent-preserving map. Positive arities only — the nullary canonical
/// map collapses extents and is not of this representable form.
pub fn verify_theta_preserves_product(p: &Presheaf, n: usize) -> Result<(), String> {
    assert!(n >= 1, "the extent-preserving criterion applies to positive arities");
    let frame = p.frame().clone();
    let power = p.power(n);
    let theta_pn = power.theta();
    let theta_p = p.theta();
    let prod = theta_p.power(n);
    // h sends a tuple-section over u to the tuple of its components
    let size = theta_p.len();
    let h: Vec<usize> = (0..theta_pn.len())
        .map(|i| {
            let (u, s) = power.theta_unindex(i);
            let tuple = crate::util::tuples(p.section_count(u), n);
            let components: Vec<usize> =
                tuple[s].iter().map(|&c| p.theta_index(u, c)).collect();
            crate::util::rank(&components, size)
        })
        .collect();
    for i in 0..theta_pn.len() {
        if theta_pn.extent(i) != prod.extent(h[i]) {
            return Err(format!("extent not preserved at {}", theta_pn.name(i)));
        }
        for j in 0..theta_pn.len() {
            if theta_pn.alpha(i, j) != prod.alpha(h[i], h[j]) {
                return Err(format!(
                    "valuation differs at ({}, {})",
                    theta_pn.name(i),
                    theta_pn.name(j)
                ));
            }
        }
    }
    for b in 0..prod.len() {
        let covered = frame.join_all((0..theta_pn.len()).map(|i| prod.alpha(h[i], b)));
        if covered != prod.extent(b) {
            return Err(format!("image does not cover {}", prod.name(b)));
        }
    }
    Ok(())
}

/// Kripke–Joyal sheaf semantics over the frame site: the forcing relation
/// `U ||- phi(args)` for a tuple of sections over `U`, computed by the
/// cover clauses (disjunction and the existential quantifier range over
/// covers of `U`; implication and the universal quantifier range over all
/// elements below `U`). For a sheaf of structures this is an independent
/// route to the same values as the forcing recursion: `U ||- phi(a)` holds
/// exactly when the forcing value of the lifted structure at the sections
/// is all of `U`.
pub fn kripke_joyal(
    s: &SheafStructure,
    phi: &crate::logic::Formula,
    ctx: &[String],
    u: Elem,
    args: &[usize],
) -> Result<bool, SheafError> {
    use crate::logic::{Formula, Term};
    let p = s.presheaf();
    let frame = p.frame().clone();
    assert_eq!(ctx.len(), args.len(), "one section per context variable");

    fn term_at(
        s: &SheafStructure,
        term: &Term,
        ctx: &[String],
        u: Elem,
        args: &[usize],
    ) -> Result<usize, SheafError> {
        match term {
            Term::Var(v) => {
                let pos = ctx
                    .iter()
                    .rposition(|w| w == v)
                    .ok_or_else(|| SheafError::BadStructure(format!("unbound variable {v}")))?;
                Ok(args[pos])
            }
            Term::Param(_) => Err(SheafError::BadStructure(
                "parameters are not meaningful in section semantics".into(),
            )),
            Term::App(f, sub) => {
                let values: Vec<usize> = sub
                    .iter()
                    .map(|t| term_at(s, t, ctx, u, args))
                    .collect::<Result<_, _>>()?;
                let table = s.function_at(f, u);
                Ok(table[crate::util::rank(&values, s.presheaf().section_count(u))])
            }
        }
    }

    Ok(match phi {
        Formula::True => true,
        Formula::False => u == frame.bottom(),
        Formula::Rel(r, terms) => {
            let values: Vec<usize> = terms
                .iter()
                .map(|t| term_at(s, t, ctx, u, args))
                .collect::<Result<_, _>>()?;
            s.relation_at(r, u)[crate::util::rank(&values, p.section_count(u))]
        }
        Formula::Eq(lhs, rhs) => {
            term_at(s, lhs, ctx, u, args)? == term_at(s, rhs, ctx, u, args)?
        }
        Formula::And(l, r) => {
            kripke_joyal(s, l, ctx, u, args)? && kripke_joyal(s, r, ctx, u, args)?
        }
        Formula::Or(l, r) => {
            // some cover decides each piece one way or the other
            'covers: for cover in covers_of(&frame, u) {
                for &w in &cover {
                    let down: Vec<usize> = args.iter().map(|&a| p.restrict(u, w, a)).collect();
                    if !kripke_joyal(s, l, ctx, w, &down)?
                        && !kripke_joyal(s, r, ctx, w, &down)?
                    {
                        continue 'covers;
                    }
                }
                return Ok(true);
            }
            false
        }
        Formula::Implies(l, r) => {
            for w in frame.elements().filter(|&w| frame.leq(w, u)) {
                let down: Vec<usize> = args.iter().map(|&a| p.restrict(u, w, a)).collect();
                if kripke_joyal(s, l, ctx, w, &down)? && !kripke_joyal(s, r, ctx, w, &down)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(v, body) => {
            let mut inner = ctx.to_vec();
            inner.push(v.clone());
            'covers: for cover in covers_of(&frame, u) {
                for &w in &cover {
                    let down: Vec<usize> = args.iter().map(|&a| p.restrict(u, w, a)).collect();
                    let witnessed = (0..p.section_count(w)).any(|b| {
                        let mut with_b = down.clone();
                        with_b.push(b);
                        kripke_joyal(s, body, &inner, w, &with_b).unwrap_or(false)
                    });
                    if !witnessed {
                        continue 'covers;
                    }
                }
                return Ok(true);
            }
            false
        }
        Formula::Forall(v, body) => {
            let mut inner = ctx.to_vec();
            inner.push(v.clone());
            for w in frame.elements().filter(|&w| frame.leq(w, u)) {
                let down: Vec<usize> = args.iter().map(|&a| p.restrict(u, w, a)).collect();
                for b in 0..p.section_count(w) {
                    let mut with_b = down.clone();
                    with_b.push(b);
                    if !kripke_joyal(s, body, &inner, w, &with_b)? {
                        return Ok(false);
                    }
                }
            }
            true
        }
    })
}
