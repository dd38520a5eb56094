//! Sheaves of structures: interpretations of a language by natural function
//! maps and subsheaf relations, their lifting to Heyting-valued structures,
//! section structures, filter quotients, and the discrete-family and
//! bounded-Boolean-power generators.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::frame::{Elem, Filter, Frame};
use crate::hmodel::{FunctionSpec, HStructure};
use crate::logic::{FiniteStructure, Language};
use crate::util::{mixed_tuples, rank, tuples};

use super::{Presheaf, SheafError};

/// A sheaf of structures: a presheaf with, for every function symbol, a
/// natural family of maps `P(U)^n -> P(U)` and, for every relation symbol,
/// a subpresheaf of the power that is itself a sheaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafStructure {
    presheaf: Arc<Presheaf>,
    language: Language,
    /// per symbol, per frame element: flat table over argument-tuple ranks
    functions: BTreeMap<String, Vec<Vec<usize>>>,
    /// per symbol, per frame element: membership over argument-tuple ranks
    relations: BTreeMap<String, Vec<Vec<bool>>>,
    /// warnings emitted by generators (informational)
    pub warnings: Vec<String>,
}

impl SheafStructure {
    pub fn new(
        presheaf: Arc<Presheaf>,
        language: Language,
        functions: BTreeMap<String, Vec<Vec<usize>>>,
        relations: BTreeMap<String, Vec<Vec<bool>>>,
    ) -> Result<SheafStructure, SheafError> {
        let frame = presheaf.frame().clone();
        for (name, arity) in language.functions() {
            let per_elem = functions
                .get(name)
                .ok_or_else(|| SheafError::BadStructure(format!("missing function {name}")))?;
            if per_elem.len() != frame.len() {
                return Err(SheafError::BadStructure(format!(
                    "function {name}: one table per frame element required"
                )));
            }
            for u in frame.elements() {
                let count = presheaf.section_count(u).pow(arity as u32);
                if per_elem[u].len() != count
                    || per_elem[u].iter().any(|&i| i >= presheaf.section_count(u))
                {
                    return Err(SheafError::BadStructure(format!(
                        "function {name}: bad table at {}",
                        frame.name(u)
                    )));
                }
            }
            // naturality: f(a)|_W = f(a|_W)
            for u in frame.elements() {
                for w in frame.elements() {
                    if w != u && frame.leq(w, u) {
                        for (t_idx, t) in
                            tuples(presheaf.section_count(u), arity).iter().enumerate()
                        {
                            let image_down = presheaf.restrict(u, w, per_elem[u][t_idx]);
                            let down: Vec<usize> =
                                t.iter().map(|&s| presheaf.restrict(u, w, s)).collect();
                            let down_image =
                                per_elem[w][rank(&down, presheaf.section_count(w))];
                            if image_down != down_image {
                                return Err(SheafError::BadStructure(format!(
                                    "function {name} does not commute with restriction {} > {}",
                                    frame.name(u),
                                    frame.name(w)
                                )));
                            }
                        }
                    }
                }
            }
        }
        for (name, arity) in language.relations() {
            let per_elem = relations
                .get(name)
                .ok_or_else(|| SheafError::BadStructure(format!("missing relation {name}")))?;
            if per_elem.len() != frame.len() {
                return Err(SheafError::BadStructure(format!(
                    "relation {name}: one table per frame element required"
                )));
            }
            for u in frame.elements() {
                let count = presheaf.section_count(u).pow(arity as u32);
                if per_elem[u].len() != count {
                    return Err(SheafError::BadStructure(format!(
                        "relation {name}: bad table at {}",
                        frame.name(u)
                    )));
                }
            }
            // closed under restriction
            for u in frame.elements() {
                for w in frame.elements() {
                    if w != u && frame.leq(w, u) {
                        for (t_idx, t) in
                            tuples(presheaf.section_count(u), arity).iter().enumerate()
                        {
                            if per_elem[u][t_idx] {
                                let down: Vec<usize> =
                                    t.iter().map(|&s| presheaf.restrict(u, w, s)).collect();
                                if !per_elem[w][rank(&down, presheaf.section_count(w))] {
                                    return Err(SheafError::BadStructure(format!(
                                        "relation {name} not closed under restriction {} > {}",
                                        frame.name(u),
                                        frame.name(w)
                                    )));
                                }
                            }
                        }
                    }
                }
            }
            // the subpresheaf is a sheaf: compatible member families glue
            // inside the relation (when the underlying presheaf glues)
            for u in frame.elements() {
                for cover in presheaf.covers(u) {
                    let sizes: Vec<usize> =
                        cover.iter().map(|&w| presheaf.section_count(w).pow(arity as u32)).collect();
                    'family: for family in mixed_tuples(&sizes) {
                        // all members of the relation and pairwise compatible
                        for (i, &w) in cover.iter().enumerate() {
                            if !per_elem[w][family[i]] {
                                continue 'family;
                            }
                            let ti = &tuples(presheaf.section_count(w), arity)[family[i]];
                            for (j, &wj) in cover.iter().enumerate() {
                                if j <= i {
                                    continue;
                                }
                                let tj =
                                    &tuples(presheaf.section_count(wj), arity)[family[j]];
                                let meet = frame.meet(w, wj);
                                let ti_down: Vec<usize> =
                                    ti.iter().map(|&s| presheaf.restrict(w, meet, s)).collect();
                                let tj_down: Vec<usize> =
                                    tj.iter().map(|&s| presheaf.restrict(wj, meet, s)).collect();
                                if ti_down != tj_down {
                                    continue 'family;
                                }
                            }
                        }
                        // find the glue in P(u)^n and require membership
                        let glue = tuples(presheaf.section_count(u), arity)
                            .iter()
                            .enumerate()
                            .find(|(_, t)| {
                                cover.iter().enumerate().all(|(i, &w)| {
                                    let down: Vec<usize> =
                                        t.iter().map(|&s| presheaf.restrict(u, w, s)).collect();
                                    rank(&down, presheaf.section_count(w)) == family[i]
                                })
                            })
                            .map(|(idx, _)| idx);
                        if let Some(glue_idx) = glue {
                            if !per_elem[u][glue_idx] {
                                return Err(SheafError::BadStructure(format!(
                                    "relation {name} is not a subsheaf: a compatible family over {} glues outside it",
                                    frame.name(u)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(SheafStructure { presheaf, language, functions, relations, warnings: Vec::new() })
    }

    pub fn presheaf(&self) -> &Arc<Presheaf> {
        &self.presheaf
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn frame(&self) -> &Arc<Frame> {
        self.presheaf.frame()
    }

    pub fn function_at(&self, name: &str, u: Elem) -> &[usize] {
        &self.functions[name][u]
    }

    pub fn relation_at(&self, name: &str, u: Elem) -> &[bool] {
        &self.relations[name][u]
    }
}

/// Lifts a sheaf of structures to a Heyting-valued structure on the
/// associated Heyting-valued set: functions through the restriction-then-
/// apply representing map, relations through the largest-open membership
/// join. The representability assumption holds by construction.
pub fn lift_structure(s: &SheafStructure) -> Result<HStructure, SheafError> {
    let p = s.presheaf();
    let frame = p.frame().clone();
    let carrier = p.theta();
    let size = carrier.len();
    let mut functions = BTreeMap::new();
    for (name, arity) in s.language().functions() {
        // witness: restrict the tuple to its extent, then apply
        let mut witness = Vec::new();
        for t in tuples(size, arity) {
            let parts: Vec<(Elem, usize)> = t.iter().map(|&i| p.theta_unindex(i)).collect();
            let ext = frame.meet_all(parts.iter().map(|&(u, _)| u));
            let restricted: Vec<usize> =
                parts.iter().map(|&(u, sec)| p.restrict(u, ext, sec)).collect();
            let image = s.function_at(name, ext)[rank(&restricted, p.section_count(ext))];
            witness.push(p.theta_index(ext, image));
        }
        functions.insert(name.to_string(), FunctionSpec::Map(witness));
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in s.language().relations() {
        let mut values = Vec::new();
        for t in tuples(size, arity) {
            let parts: Vec<(Elem, usize)> = t.iter().map(|&i| p.theta_unindex(i)).collect();
            let ext = frame.meet_all(parts.iter().map(|&(u, _)| u));
            let value = frame.join_all(frame.elements().filter(|&w| {
                if !frame.leq(w, ext) {
                    return false;
                }
                let down: Vec<usize> =
                    parts.iter().map(|&(u, sec)| p.restrict(u, w, sec)).collect();
                s.relation_at(name, w)[rank(&down, p.section_count(w))]
            }));
            values.push(value);
        }
        relations.insert(name.to_string(), values);
    }
    HStructure::new(s.language().clone(), carrier, functions, relations)
        .map_err(|e| SheafError::BadStructure(e.to_string()))
}

/// The ordinary structure of sections over a fixed element.
pub fn section_structure(s: &SheafStructure, u: Elem) -> Result<FiniteStructure, SheafError> {
    let p = s.presheaf();
    let universe: Vec<String> = p.sections(u).to_vec();
    let mut functions = BTreeMap::new();
    for (name, _) in s.language().functions() {
        functions.insert(name.to_string(), s.functions[name][u].clone());
    }
    let mut relations = BTreeMap::new();
    for (name, _) in s.language().relations() {
        relations.insert(name.to_string(), s.relations[name][u].clone());
    }
    Ok(FiniteStructure::new(s.language().clone(), universe, functions, relations)?)
}

/// The filter quotient of the section structures, computed at the
/// principal generator (on a finite frame the colimit collapses there),
/// with the quotient relation semantics: `R` holds when some filter
/// element below the sections' domain puts the restriction in `R`.
pub fn sections_quotient(s: &SheafStructure, f: &Filter) -> Result<FiniteStructure, SheafError> {
    if !f.proper {
        return Err(SheafError::ImproperFilter);
    }
    let g = f.generator();
    // at the generator, membership in R over any filter element collapses
    // to membership at the generator (restriction closure upward fails,
    // downward holds), so the section structure is the quotient
    section_structure(s, g)
}

/// The general colimit construction of the filter quotient: classes of
/// sections over filter elements under agreement on a smaller filter
/// element. Retained as an independent route; isomorphic to the
/// generator-based quotient.
pub fn sections_quotient_colimit(
    s: &SheafStructure,
    f: &Filter,
) -> Result<FiniteStructure, SheafError> {
    if !f.proper {
        return Err(SheafError::ImproperFilter);
    }
    let p = s.presheaf();
    let frame = p.frame().clone();
    let members: Vec<Elem> = f.members();
    // disjoint union of sections over filter elements
    let mut items: Vec<(Elem, usize)> = Vec::new();
    for &u in &members {
        for sec in 0..p.section_count(u) {
            items.push((u, sec));
        }
    }
    let equivalent = |&(u, a): &(Elem, usize), &(v, b): &(Elem, usize)| {
        members.iter().any(|&w| {
            frame.leq(w, frame.meet(u, v))
                && p.restrict(u, w, a) == p.restrict(v, w, b)
        })
    };
    let mut class_of: Vec<usize> = Vec::new();
    let mut reps: Vec<(Elem, usize)> = Vec::new();
    for item in &items {
        match reps.iter().position(|r| equivalent(r, item)) {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(reps.len());
                reps.push(*item);
            }
        }
    }
    let universe: Vec<String> = reps
        .iter()
        .map(|&(u, sec)| format!("[{}@{}]", p.sections(u)[sec], frame.name(u)))
        .collect();
    let g = f.generator();
    // interpretations through representatives restricted to the generator
    let to_generator =
        |&(u, sec): &(Elem, usize)| -> usize { p.restrict(u, g, sec) };
    let mut functions = BTreeMap::new();
    for (name, arity) in s.language().functions() {
        let mut table = Vec::new();
        for t in tuples(reps.len(), arity) {
            let gen_tuple: Vec<usize> = t.iter().map(|&i| to_generator(&reps[i])).collect();
            let image = s.function_at(name, g)[rank(&gen_tuple, p.section_count(g))];
            let class = reps
                .iter()
                .position(|r| equivalent(r, &(g, image)))
                .expect("image section over the generator belongs to some class");
            table.push(class);
        }
        functions.insert(name.to_string(), table);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in s.language().relations() {
        let mut table = Vec::new();
        for t in tuples(reps.len(), arity) {
            let holds = members.iter().any(|&w| {
                let down: Vec<usize> = t
                    .iter()
                    .map(|&i| {
                        let (u, sec) = reps[i];
                        if frame.leq(w, u) {
                            Some(p.restrict(u, w, sec))
                        } else {
                            None
                        }
                    })
                    .collect::<Option<Vec<usize>>>()
                    .unwrap_or_default();
                down.len() == arity
                    && s.relation_at(name, w)[rank(&down, p.section_count(w))]
            });
            table.push(holds);
        }
        relations.insert(name.to_string(), table);
    }
    Ok(FiniteStructure::new(s.language().clone(), universe, functions, relations)?)
}

/// A discrete family of ordinary structures as a sheaf of structures on the
/// powerset frame of the index set: sections over a subset are tuples of
/// factor elements, restrictions are projections.
pub fn discrete_family(
    index_names: &[&str],
    factors: &[FiniteStructure],
) -> Result<SheafStructure, SheafError> {
    if index_names.len() != factors.len() {
        return Err(SheafError::BadStructure("one factor per index point required".into()));
    }
    let language = match factors.first() {
        Some(f) => f.language().clone(),
        None => Language::new(),
    };
    for f in factors {
        if f.language() != &language {
            return Err(SheafError::BadStructure("factors over different languages".into()));
        }
    }
    let n = index_names.len();
    let opens: Vec<Vec<usize>> = (0..(1u32 << n))
        .map(|mask| (0..n).filter(|&p| mask & (1 << p) != 0).collect())
        .collect();
    let frame = Arc::new(Frame::from_topology(
        index_names.iter().map(|s| s.to_string()).collect(),
        opens,
    )?);
    // frame elements are the subsets in the canonical topology order
    // (by size, then lexicographically); rebuild that order here
    let elem_points: Vec<Vec<usize>> = {
        let mut subsets: Vec<Vec<usize>> = (0..(1u32 << n))
            .map(|mask| (0..n).filter(|&p| mask & (1 << p) != 0).collect())
            .collect();
        subsets.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
        subsets
    };
    debug_assert!(frame
        .elements()
        .all(|u| frame.name(u).matches(',').count() + usize::from(!elem_points[u].is_empty())
            == elem_points[u].len()));
    let mut warnings = Vec::new();
    if factors.iter().any(|f| f.size() == 0) && !language.has_constant() {
        warnings.push(
            "a factor has an empty universe and the language has no constant; \
             quotients along ultrafilters will not represent the classical ultraproduct"
                .to_string(),
        );
    }
    // sections over U: tuples of factor elements indexed by the points of U
    let mut sections = Vec::new();
    let mut point_tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    for u in frame.elements() {
        let sizes: Vec<usize> = elem_points[u].iter().map(|&x| factors[x].size()).collect();
        let tuples_u = mixed_tuples(&sizes);
        sections.push(
            tuples_u
                .iter()
                .map(|t| {
                    let inner: Vec<&str> = t
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| factors[elem_points[u][i]].element_name(e))
                        .collect();
                    format!("({})", inner.join(","))
                })
                .collect::<Vec<String>>(),
        );
        point_tuples.push(tuples_u);
    }
    let mut restrictions = BTreeMap::new();
    for u in frame.elements() {
        for w in frame.elements() {
            if w != u && frame.leq(w, u) {
                let positions: Vec<usize> = elem_points[w]
                    .iter()
                    .map(|x| elem_points[u].iter().position(|y| y == x).unwrap())
                    .collect();
                let sizes_w: Vec<usize> =
                    elem_points[w].iter().map(|&x| factors[x].size()).collect();
                let map: Vec<usize> = point_tuples[u]
                    .iter()
                    .map(|t| {
                        let projected: Vec<usize> = positions.iter().map(|&i| t[i]).collect();
                        mixed_rank(&projected, &sizes_w)
                    })
                    .collect();
                restrictions.insert((u, w), map);
            }
        }
    }
    let presheaf = Arc::new(Presheaf::new(frame.clone(), sections, restrictions)?);
    let mut functions = BTreeMap::new();
    for (name, arity) in language.functions() {
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let count = presheaf.section_count(u).pow(arity as u32);
            let mut table = Vec::with_capacity(count);
            for args in tuples(presheaf.section_count(u), arity) {
                let image: Vec<usize> = elem_points[u]
                    .iter()
                    .enumerate()
                    .map(|(pos, &x)| {
                        let comp_args: Vec<usize> =
                            args.iter().map(|&a| point_tuples[u][a][pos]).collect();
                        factors[x].apply(name, &comp_args)
                    })
                    .collect();
                table.push(
                    point_tuples[u]
                        .iter()
                        .position(|t| *t == image)
                        .expect("pointwise image is a section"),
                );
            }
            per_elem.push(table);
        }
        functions.insert(name.to_string(), per_elem);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in language.relations() {
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let mut table = Vec::new();
            for args in tuples(presheaf.section_count(u), arity) {
                let holds = elem_points[u].iter().enumerate().all(|(pos, &x)| {
                    let comp_args: Vec<usize> =
                        args.iter().map(|&a| point_tuples[u][a][pos]).collect();
                    factors[x].holds(name, &comp_args)
                });
                table.push(holds);
            }
            per_elem.push(table);
        }
        relations.insert(name.to_string(), per_elem);
    }
    let mut out = SheafStructure::new(presheaf, language, functions, relations)?;
    out.warnings = warnings;
    Ok(out)
}

fn mixed_rank(tuple: &[usize], sizes: &[usize]) -> usize {
    tuple.iter().zip(sizes.iter()).fold(0, |acc, (&x, &s)| acc * s + x)
}

/// The bounded Boolean power of a structure over a finite Boolean frame:
/// sections over `U` are functions from the atoms below `U` to the
/// structure (locally constant maps on the finite Stone space), with
/// pointwise interpretations.
pub fn boolean_power(
    frame: &Arc<Frame>,
    m: &FiniteStructure,
) -> Result<SheafStructure, SheafError> {
    if !frame.is_boolean() {
        return Err(SheafError::NotBoolean);
    }
    let atoms = frame.atoms();
    let atoms_below: Vec<Vec<usize>> = frame
        .elements()
        .map(|u| {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, &a)| frame.leq(a, u))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut warnings = Vec::new();
    if m.size() == 0 && !m.language().has_constant() {
        warnings.push("the base structure has an empty universe".to_string());
    }
    let mut sections = Vec::new();
    let mut point_tuples: Vec<Vec<Vec<usize>>> = Vec::new();
    for u in frame.elements() {
        let k = atoms_below[u].len();
        let tuples_u = tuples(m.size(), k);
        sections.push(
            tuples_u
                .iter()
                .map(|t| {
                    let inner: Vec<String> = t
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| {
                            format!(
                                "{}:{}",
                                frame.name(atoms[atoms_below[u][i]]),
                                m.element_name(e)
                            )
                        })
                        .collect();
                    format!("[{}]", inner.join(","))
                })
                .collect::<Vec<String>>(),
        );
        point_tuples.push(tuples_u);
    }
    let mut restrictions = BTreeMap::new();
    for u in frame.elements() {
        for w in frame.elements() {
            if w != u && frame.leq(w, u) {
                let positions: Vec<usize> = atoms_below[w]
                    .iter()
                    .map(|x| atoms_below[u].iter().position(|y| y == x).unwrap())
                    .collect();
                let map: Vec<usize> = point_tuples[u]
                    .iter()
                    .map(|t| {
                        let projected: Vec<usize> = positions.iter().map(|&i| t[i]).collect();
                        rank(&projected, m.size())
                    })
                    .collect();
                restrictions.insert((u, w), map);
            }
        }
    }
    let presheaf = Arc::new(Presheaf::new(frame.clone(), sections, restrictions)?);
    let language = m.language().clone();
    let mut functions = BTreeMap::new();
    for (name, arity) in language.functions() {
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let mut table = Vec::new();
            for args in tuples(presheaf.section_count(u), arity) {
                let image: Vec<usize> = (0..atoms_below[u].len())
                    .map(|pos| {
                        let comp_args: Vec<usize> =
                            args.iter().map(|&a| point_tuples[u][a][pos]).collect();
                        m.apply(name, &comp_args)
                    })
                    .collect();
                table.push(rank(&image, m.size()));
            }
            per_elem.push(table);
        }
        functions.insert(name.to_string(), per_elem);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in language.relations() {
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let mut table = Vec::new();
            for args in tuples(presheaf.section_count(u), arity) {
                let holds = (0..atoms_below[u].len()).all(|pos| {
                    let comp_args: Vec<usize> =
                        args.iter().map(|&a| point_tuples[u][a][pos]).collect();
                    m.holds(name, &comp_args)
                });
                table.push(holds);
            }
            per_elem.push(table);
        }
        relations.insert(name.to_string(), per_elem);
    }
    let mut out = SheafStructure::new(presheaf, language, functions, relations)?;
    out.warnings = warnings;
    Ok(out)
}
