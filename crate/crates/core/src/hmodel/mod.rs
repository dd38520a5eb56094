//! Heyting-valued structures: carriers with function-symbol morphisms and
//! relation strict-relations, validated together with the representability
//! assumption that every function interpretation is represented by an
//! extent-preserving map. Forcing values are computed along two independent
//! paths (the inductive recursion and the categorical subobject read-out).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::frame::{Elem, Frame};
use crate::hset::{HMorphism, HSet, HSetError, StrictRelation};
use crate::logic::{Language, LogicError};

mod checks;
mod forcing;

pub use checks::{max_principle_full, max_principle_variant, mixing_check, MaxPrincipleReport, MaxPrincipleRow, MixingFailure, MixingReport};
pub use forcing::{forcing_relation, forcing_value, EvalPath, ForcingReport};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("relation {symbol}: not strict ({detail})")]
    NotStrict { symbol: String, detail: String },
    #[error("function {symbol}: not a morphism ({detail})")]
    NotMorphism { symbol: String, detail: String },
    #[error("function {symbol}: no extent-preserving representing map exists")]
    AssumptionFailed { symbol: String },
    #[error("function {symbol}: witness image has no restriction into the section")]
    WitnessNotClosed { symbol: String },
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("interpretation missing for symbol {0}")]
    MissingSymbol(String),
    #[error("{0}")]
    HSet(#[from] HSetError),
    #[error("{0}")]
    Logic(#[from] LogicError),
    #[error("{0}")]
    Frame(#[from] crate::frame::FrameError),
}

/// Function interpretation: the canonical morphism table over
/// `carrier^arity x carrier`, plus the stored representability witness (the
/// lexicographically least extent-preserving representing map).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionInterp {
    pub arity: usize,
    pub table: Vec<Elem>,
    pub witness: Vec<usize>,
}

/// Relation interpretation: a strict relation over `carrier^arity`, stored
/// as a flat value vector in tuple-rank order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationInterp {
    pub arity: usize,
    pub values: Vec<Elem>,
}

/// Input form of a function interpretation.
#[derive(Debug, Clone)]
pub enum FunctionSpec {
    /// Full morphism table over `carrier^arity x carrier`.
    Table(Vec<Elem>),
    /// An extent-preserving representing map `carrier^arity -> carrier`.
    Map(Vec<usize>),
}

#[derive(Clone)]
pub struct HStructure {
    language: Language,
    carrier: Arc<HSet>,
    functions: BTreeMap<String, FunctionInterp>,
    relations: BTreeMap<String, RelationInterp>,
}

impl fmt::Debug for HStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HStructure(|M| = {}, language {:?})", self.carrier.len(), self.language)
    }
}

impl HStructure {
    /// Validates morphism laws, strictness, and the representability
    /// assumption. Function interpretations may be given as tables (a
    /// witness map is searched) or as maps (the table is derived).
    pub fn new(
        language: Language,
        carrier: Arc<HSet>,
        functions: BTreeMap<String, FunctionSpec>,
        relations: BTreeMap<String, Vec<Elem>>,
    ) -> Result<HStructure, ModelError> {
        let mut fn_interps = BTreeMap::new();
        for (name, arity) in language.functions() {
            let spec = functions
                .get(name)
                .ok_or_else(|| ModelError::MissingSymbol(name.to_string()))?;
            let power = carrier.power(arity);
            let interp = match spec {
                FunctionSpec::Table(table) => {
                    let morphism =
                        HMorphism::new(power.clone(), carrier.clone(), table.clone()).map_err(
                            |e| ModelError::NotMorphism { symbol: name.to_string(), detail: e.to_string() },
                        )?;
                    let witness = search_witness(&morphism).ok_or(ModelError::AssumptionFailed {
                        symbol: name.to_string(),
                    })?;
                    FunctionInterp { arity, table: table.clone(), witness }
                }
                FunctionSpec::Map(map) => {
                    let table = table_from_witness(&power, &carrier, map, name)?;
                    // revalidate as a morphism
                    HMorphism::new(power.clone(), carrier.clone(), table.clone()).map_err(|e| {
                        ModelError::NotMorphism { symbol: name.to_string(), detail: e.to_string() }
                    })?;
                    FunctionInterp { arity, table, witness: map.clone() }
                }
            };
            fn_interps.insert(name.to_string(), interp);
        }
        let mut rel_interps = BTreeMap::new();
        for (name, arity) in language.relations() {
            let values = relations
                .get(name)
                .ok_or_else(|| ModelError::MissingSymbol(name.to_string()))?;
            let power = carrier.power(arity);
            StrictRelation::new(power, values.clone()).map_err(|e| ModelError::NotStrict {
                symbol: name.to_string(),
                detail: e.to_string(),
            })?;
            rel_interps.insert(name.to_string(), RelationInterp { arity, values: values.clone() });
        }
        Ok(HStructure { language, carrier, functions: fn_interps, relations: rel_interps })
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn carrier(&self) -> &Arc<HSet> {
        &self.carrier
    }

    pub fn frame(&self) -> &Arc<Frame> {
        self.carrier.frame()
    }

    pub fn function(&self, name: &str) -> &FunctionInterp {
        &self.functions[name]
    }

    pub fn relation(&self, name: &str) -> &RelationInterp {
        &self.relations[name]
    }

    pub fn function_morphism(&self, name: &str) -> HMorphism {
        let interp = &self.functions[name];
        HMorphism::new(
            self.carrier.power(interp.arity),
            self.carrier.clone(),
            interp.table.clone(),
        )
        .expect("stored table was validated")
    }

    pub fn relation_strict(&self, name: &str) -> StrictRelation {
        let interp = &self.relations[name];
        StrictRelation::new(self.carrier.power(interp.arity), interp.values.clone())
            .expect("stored values were validated")
    }

    /// The ordinary structure of elements with extent exactly `u`:
    /// functions restrict the stored witness maps (for positive arity the
    /// image extent is `u` by the representability assumption; constants
    /// are restricted to `u` when the carrier provides the restriction),
    /// and `R` holds when its forcing value is exactly `u`.
    pub fn gamma_structure(&self, u: Elem) -> Result<crate::logic::FiniteStructure, ModelError> {
        let members: Vec<usize> =
            self.carrier.elements().filter(|&a| self.carrier.extent(a) == u).collect();
        let universe: Vec<String> =
            members.iter().map(|&a| self.carrier.name(a).to_string()).collect();
        let m = self.carrier.len();
        let index_of: BTreeMap<usize, usize> =
            members.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut functions = BTreeMap::new();
        for (name, arity) in self.language.functions() {
            let interp = &self.functions[name];
            let mut table = Vec::new();
            for tuple in crate::util::tuples(members.len(), arity) {
                let carrier_tuple: Vec<usize> = tuple.iter().map(|&i| members[i]).collect();
                let mut image = interp.witness[crate::util::rank(&carrier_tuple, m)];
                if self.carrier.extent(image) != u {
                    // a constant (extent 1) enters a smaller section by
                    // restriction, when the carrier has one
                    image = self.carrier.restrict(image, u).ok_or_else(|| {
                        ModelError::WitnessNotClosed { symbol: name.to_string() }
                    })?;
                }
                let gamma_idx = index_of.get(&image).copied().ok_or_else(|| {
                    ModelError::WitnessNotClosed { symbol: name.to_string() }
                })?;
                table.push(gamma_idx);
            }
            functions.insert(name.to_string(), table);
        }
        let mut relations = BTreeMap::new();
        for (name, arity) in self.language.relations() {
            let interp = &self.relations[name];
            let mut table = Vec::new();
            for tuple in crate::util::tuples(members.len(), arity) {
                let carrier_tuple: Vec<usize> = tuple.iter().map(|&i| members[i]).collect();
                table.push(interp.values[crate::util::rank(&carrier_tuple, m)] == u);
            }
            relations.insert(name.to_string(), table);
        }
        Ok(crate::logic::FiniteStructure::new(
            self.language.clone(),
            universe,
            functions,
            relations,
        )?)
    }

    /// Witness maps other than the stored one that also satisfy the
    /// representability conditions (used to surface the dependence of
    /// `gamma_structure` on the choice).
    pub fn alternate_witnesses(&self, name: &str) -> Vec<Vec<usize>> {
        let morphism = self.function_morphism(name);
        all_witnesses(&morphism)
    }

    /// Surfaces whether the section structure at `u` depends on the choice
    /// of representing maps: rebuilds it with every admissible witness for
    /// each function symbol in turn and compares up to isomorphism.
    /// Non-separated carriers can genuinely differ here; the structure
    /// stores the lexicographically least witness either way.
    pub fn gamma_depends_on_witness(&self, u: Elem) -> Result<bool, ModelError> {
        let baseline = self.gamma_structure(u)?;
        for (name, _) in self.language.functions() {
            for witness in self.alternate_witnesses(name) {
                if witness == self.functions[name].witness {
                    continue;
                }
                let mut variant = self.clone();
                variant
                    .functions
                    .get_mut(name)
                    .expect("known symbol")
                    .witness = witness;
                match variant.gamma_structure(u) {
                    Ok(gamma) => {
                        if baseline.find_isomorphism(&gamma).is_none() {
                            return Ok(true);
                        }
                    }
                    // a witness whose images do not restrict into the
                    // section also makes the choice observable
                    Err(ModelError::WitnessNotClosed { .. }) => return Ok(true),
                    Err(other) => return Err(other),
                }
            }
        }
        Ok(false)
    }
}

/// A seeded random Heyting-valued structure over a relational language:
/// random extents and pairwise values repaired to a valid valuation by
/// transitive closure, and random relation values repaired to strictness.
/// Used by the soundness suites.
pub fn random_structure(
    frame: &Arc<Frame>,
    language: &Language,
    carrier_size: usize,
    rng: &mut crate::rng::SplitMix64,
) -> HStructure {
    assert!(
        language.functions().next().is_none(),
        "random structures support relational languages only"
    );
    let n = frame.len();
    let mut alpha = vec![vec![0usize; carrier_size]; carrier_size];
    for a in 0..carrier_size {
        alpha[a][a] = rng.below(n);
    }
    for a in 0..carrier_size {
        for b in 0..a {
            let bound = frame.meet(alpha[a][a], alpha[b][b]);
            // a random element below the extent meet
            let candidates: Vec<Elem> =
                frame.elements().filter(|&u| frame.leq(u, bound)).collect();
            let v = candidates[rng.below(candidates.len())];
            alpha[a][b] = v;
            alpha[b][a] = v;
        }
    }
    // transitive closure: join in compositions until stable
    loop {
        let mut changed = false;
        for a in 0..carrier_size {
            for b in 0..carrier_size {
                for c in 0..carrier_size {
                    let through = frame.meet(alpha[a][b], alpha[b][c]);
                    let joined = frame.join(alpha[a][c], through);
                    if joined != alpha[a][c] {
                        alpha[a][c] = joined;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let names: Vec<String> = (0..carrier_size).map(|i| format!("m{i}")).collect();
    let carrier = Arc::new(
        HSet::new(frame.clone(), names, alpha).expect("closure yields a valid valuation"),
    );
    let mut relations = BTreeMap::new();
    for (rel, arity) in language.relations() {
        let power = carrier.power(arity);
        let mut values: Vec<Elem> = power
            .elements()
            .map(|t| {
                let candidates: Vec<Elem> = frame
                    .elements()
                    .filter(|&u| frame.leq(u, power.extent(t)))
                    .collect();
                candidates[rng.below(candidates.len())]
            })
            .collect();
        // strictness closure
        loop {
            let mut changed = false;
            for t in power.elements() {
                for t2 in power.elements() {
                    let through = frame.meet(values[t], power.alpha(t, t2));
                    let joined = frame.join(values[t2], through);
                    if joined != values[t2] {
                        values[t2] = joined;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        relations.insert(rel.to_string(), values);
    }
    HStructure::new(language.clone(), carrier, BTreeMap::new(), relations)
        .expect("repaired data is a valid structure")
}

/// Derives the canonical table of a morphism represented by an
/// extent-preserving map: `phi(t, b) = delta(h t, b)`.
fn table_from_witness(
    power: &Arc<HSet>,
    carrier: &Arc<HSet>,
    map: &[usize],
    symbol: &str,
) -> Result<Vec<Elem>, ModelError> {
    if map.len() != power.len() {
        return Err(ModelError::NotMorphism {
            symbol: symbol.to_string(),
            detail: format!("witness map has {} entries for {} tuples", map.len(), power.len()),
        });
    }
    let frame = carrier.frame();
    for t in power.elements() {
        if map[t] >= carrier.len() {
            return Err(ModelError::NotMorphism {
                symbol: symbol.to_string(),
                detail: format!("witness map value {} out of range", map[t]),
            });
        }
        if carrier.extent(map[t]) != power.extent(t) {
            return Err(ModelError::AssumptionFailed { symbol: symbol.to_string() });
        }
        for t2 in power.elements() {
            if !frame.leq(power.alpha(t, t2), carrier.alpha(map[t], map[t2])) {
                return Err(ModelError::AssumptionFailed { symbol: symbol.to_string() });
            }
        }
    }
    let n = carrier.len();
    let mut table = vec![0; power.len() * n];
    for t in power.elements() {
        for b in 0..n {
            table[t * n + b] = carrier.alpha(map[t], b);
        }
    }
    Ok(table)
}

/// Searches for the lexicographically least extent-preserving representing
/// map of a morphism, by per-tuple candidate lists and backtracking.
fn search_witness(morphism: &HMorphism) -> Option<Vec<usize>> {
    let mut found = None;
    witness_search(morphism, Some(&mut |w: &[usize]| {
        found = Some(w.to_vec());
        false // stop at the first (lexicographically least) witness
    }));
    found
}

fn all_witnesses(morphism: &HMorphism) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    witness_search(morphism, Some(&mut |w: &[usize]| {
        out.push(w.to_vec());
        true
    }));
    out
}

fn witness_search(morphism: &HMorphism, mut callback: Option<&mut dyn FnMut(&[usize]) -> bool>) {
    let dom = morphism.dom();
    let cod = morphism.cod();
    let frame = dom.frame();
    let candidates: Vec<Vec<usize>> = dom
        .elements()
        .map(|t| {
            cod.elements()
                .filter(|&h| {
                    cod.extent(h) == dom.extent(t)
                        && cod.elements().all(|b| frame.leq(morphism.at(t, b), cod.alpha(h, b)))
                })
                .collect()
        })
        .collect();
    let mut pick: Vec<usize> = Vec::new();
    fn go(
        t: usize,
        dom: &HSet,
        cod: &HSet,
        candidates: &[Vec<usize>],
        pick: &mut Vec<usize>,
        callback: &mut Option<&mut dyn FnMut(&[usize]) -> bool>,
        keep_going: &mut bool,
    ) {
        if !*keep_going {
            return;
        }
        if t == candidates.len() {
            if let Some(cb) = callback {
                if !cb(pick) {
                    *keep_going = false;
                }
            }
            return;
        }
        let frame = dom.frame();
        for &h in &candidates[t] {
            let consistent = (0..t).all(|s| frame.leq(dom.alpha(s, t), cod.alpha(pick[s], h)));
            if consistent {
                pick.push(h);
                go(t + 1, dom, cod, candidates, pick, callback, keep_going);
                pick.pop();
                if !*keep_going {
                    return;
                }
            }
        }
    }
    let mut keep_going = true;
    go(0, dom, cod, &candidates, &mut pick, &mut callback, &mut keep_going);
}

#[cfg(test)]
mod tests;
