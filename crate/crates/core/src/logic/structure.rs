//! Ordinary finite first-order structures and classical Tarski evaluation.
//! These serve as the independent oracle for every transfer check.

use std::collections::BTreeMap;

use super::{Formula, Language, LogicError, Term};

/// A finite structure: a universe of named elements, total function tables
/// and relation tables, both flattened over argument tuples in row-major
/// order (last coordinate fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    language: Language,
    universe: Vec<String>,
    functions: BTreeMap<String, Vec<usize>>,
    relations: BTreeMap<String, Vec<bool>>,
}

pub(crate) use crate::util::{rank, tuples};

impl FiniteStructure {
    pub fn new(
        language: Language,
        universe: Vec<String>,
        functions: BTreeMap<String, Vec<usize>>,
        relations: BTreeMap<String, Vec<bool>>,
    ) -> Result<FiniteStructure, LogicError> {
        let m = universe.len();
        for (name, arity) in language.functions() {
            let table = functions
                .get(name)
                .ok_or_else(|| LogicError::Structure(format!("missing function table for {name}")))?;
            let want = m.checked_pow(arity as u32).unwrap_or(0);
            if table.len() != want {
                return Err(LogicError::Structure(format!(
                    "function {name} table has {} entries, expected {want}",
                    table.len()
                )));
            }
            if let Some(&bad) = table.iter().find(|&&v| v >= m) {
                return Err(LogicError::Structure(format!(
                    "function {name} maps outside the universe (index {bad})"
                )));
            }
            if m == 0 && arity == 0 {
                return Err(LogicError::Structure(format!(
                    "constant {name} cannot be interpreted in an empty universe"
                )));
            }
        }
        for (name, arity) in language.relations() {
            let table = relations
                .get(name)
                .ok_or_else(|| LogicError::Structure(format!("missing relation table for {name}")))?;
            let want = m.checked_pow(arity as u32).unwrap_or(0);
            if table.len() != want {
                return Err(LogicError::Structure(format!(
                    "relation {name} table has {} entries, expected {want}",
                    table.len()
                )));
            }
        }
        for extra in functions.keys() {
            if language.function_arity(extra).is_none() {
                return Err(LogicError::Structure(format!("undeclared function {extra}")));
            }
        }
        for extra in relations.keys() {
            if language.relation_arity(extra).is_none() {
                return Err(LogicError::Structure(format!("undeclared relation {extra}")));
            }
        }
        Ok(FiniteStructure { language, universe, functions, relations })
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn element_name(&self, i: usize) -> &str {
        &self.universe[i]
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.universe.iter().position(|n| n == name)
    }

    pub fn apply(&self, f: &str, args: &[usize]) -> usize {
        self.functions[f][rank(args, self.size())]
    }

    pub fn holds(&self, r: &str, args: &[usize]) -> bool {
        self.relations[r][rank(args, self.size())]
    }

    pub fn function_table(&self, f: &str) -> &[usize] {
        &self.functions[f]
    }

    pub fn relation_table(&self, r: &str) -> &[bool] {
        &self.relations[r]
    }

    pub fn term_value(
        &self,
        term: &Term,
        assignment: &BTreeMap<String, usize>,
    ) -> Result<usize, LogicError> {
        match term {
            Term::Var(v) => assignment
                .get(v)
                .copied()
                .ok_or_else(|| LogicError::UnassignedVariable(v.clone())),
            Term::Param(i) => Ok(*i),
            Term::App(f, args) => {
                let vals: Vec<usize> = args
                    .iter()
                    .map(|t| self.term_value(t, assignment))
                    .collect::<Result<_, _>>()?;
                Ok(self.apply(f, &vals))
            }
        }
    }

    /// Classical satisfaction by structural recursion; quantifiers range
    /// over the (finite, possibly empty) universe.
    pub fn satisfies(
        &self,
        phi: &Formula,
        assignment: &BTreeMap<String, usize>,
    ) -> Result<bool, LogicError> {
        Ok(match phi {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(s, t) => self.term_value(s, assignment)? == self.term_value(t, assignment)?,
            Formula::Rel(r, args) => {
                let vals: Vec<usize> = args
                    .iter()
                    .map(|t| self.term_value(t, assignment))
                    .collect::<Result<_, _>>()?;
                self.holds(r, &vals)
            }
            Formula::And(l, r) => {
                self.satisfies(l, assignment)? && self.satisfies(r, assignment)?
            }
            Formula::Or(l, r) => self.satisfies(l, assignment)? || self.satisfies(r, assignment)?,
            Formula::Implies(l, r) => {
                !self.satisfies(l, assignment)? || self.satisfies(r, assignment)?
            }
            Formula::Forall(v, body) => {
                let mut inner = assignment.clone();
                (0..self.size()).try_fold(true, |acc, b| {
                    inner.insert(v.clone(), b);
                    Ok::<bool, LogicError>(acc && self.satisfies(body, &inner)?)
                })?
            }
            Formula::Exists(v, body) => {
                let mut inner = assignment.clone();
                (0..self.size()).try_fold(false, |acc, b| {
                    inner.insert(v.clone(), b);
                    Ok::<bool, LogicError>(acc || self.satisfies(body, &inner)?)
                })?
            }
        })
    }

    /// Satisfaction of a sentence (no free variables).
    pub fn models(&self, phi: &Formula) -> Result<bool, LogicError> {
        self.satisfies(phi, &BTreeMap::new())
    }

    /// The product structure of a family: universe of tuples, pointwise
    /// functions, relations holding when they hold in every factor. The
    /// empty product is the one-point structure.
    pub fn product(factors: &[&FiniteStructure]) -> Result<FiniteStructure, LogicError> {
        let language = match factors.first() {
            Some(f) => f.language.clone(),
            None => Language::new(),
        };
        for f in factors {
            if f.language != language {
                return Err(LogicError::Structure("factors over different languages".into()));
            }
        }
        let sizes: Vec<usize> = factors.iter().map(|f| f.size()).collect();
        let mut index_tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for &s in &sizes {
            let mut next = Vec::new();
            for t in &index_tuples {
                for x in 0..s {
                    let mut t2 = t.clone();
                    t2.push(x);
                    next.push(t2);
                }
            }
            index_tuples = next;
        }
        let universe: Vec<String> = index_tuples
            .iter()
            .map(|t| {
                let inner: Vec<&str> = t
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| factors[i].element_name(x))
                    .collect();
                format!("({})", inner.join(","))
            })
            .collect();
        let m = universe.len();
        let mut functions = BTreeMap::new();
        for (name, arity) in language.functions() {
            let mut table = Vec::new();
            for args in tuples(m, arity) {
                let mut result = Vec::with_capacity(factors.len());
                for (i, f) in factors.iter().enumerate() {
                    let comp_args: Vec<usize> =
                        args.iter().map(|&a| index_tuples[a][i]).collect();
                    result.push(f.apply(name, &comp_args));
                }
                let pos = index_tuples
                    .iter()
                    .position(|t| *t == result)
                    .expect("componentwise image is a tuple");
                table.push(pos);
            }
            functions.insert(name.to_string(), table);
        }
        let mut relations = BTreeMap::new();
        for (name, arity) in language.relations() {
            let mut table = Vec::new();
            for args in tuples(m, arity) {
                let holds = factors.iter().enumerate().all(|(i, f)| {
                    let comp_args: Vec<usize> =
                        args.iter().map(|&a| index_tuples[a][i]).collect();
                    f.holds(name, &comp_args)
                });
                table.push(holds);
            }
            relations.insert(name.to_string(), table);
        }
        FiniteStructure::new(language, universe, functions, relations)
    }

    /// Searches for an isomorphism onto `other`; returns the mapping of
    /// universe indices if one exists. Brute force over bijections, meant
    /// for desk-scale universes.
    pub fn find_isomorphism(&self, other: &FiniteStructure) -> Option<Vec<usize>> {
        if self.language != other.language || self.size() != other.size() {
            return None;
        }
        let m = self.size();
        let mut perm: Vec<usize> = (0..m).collect();
        loop {
            if self.is_isomorphism_to(other, &perm) {
                return Some(perm);
            }
            if !next_permutation(&mut perm) {
                return None;
            }
        }
    }

    fn is_isomorphism_to(&self, other: &FiniteStructure, map: &[usize]) -> bool {
        for (name, arity) in self.language.functions() {
            for args in tuples(self.size(), arity) {
                let mapped: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                if map[self.apply(name, &args)] != other.apply(name, &mapped) {
                    return false;
                }
            }
        }
        for (name, arity) in self.language.relations() {
            for args in tuples(self.size(), arity) {
                let mapped: Vec<usize> = args.iter().map(|&a| map[a]).collect();
                if self.holds(name, &args) != other.holds(name, &mapped) {
                    return false;
                }
            }
        }
        true
    }
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
