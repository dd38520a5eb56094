//! JSON fixture formats and their loaders.
//!
//! Frames come as an order matrix (`{"elements", "leq"}`) or a finite
//! topology (`{"points", "opens"}`). Other documents reference a frame
//! either inline or as a relative path string, resolved by the caller.
//! All element references are by display name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;
use thiserror::Error;

use crate::frame::{Filter, Frame};
use crate::hmodel::{FunctionSpec, HStructure};
use crate::hset::HSet;
use crate::logic::{FiniteStructure, Language};
use crate::sheaf::{Presheaf, SheafStructure};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unknown name `{0}` in {1}")]
    UnknownName(String, String),
    #[error("cannot resolve reference `{0}`: {1}")]
    Unresolved(String, String),
    #[error("{0}")]
    Frame(#[from] crate::frame::FrameError),
    #[error("{0}")]
    HSet(#[from] crate::hset::HSetError),
    #[error("{0}")]
    Sheaf(#[from] crate::sheaf::SheafError),
    #[error("{0}")]
    Model(#[from] crate::hmodel::ModelError),
    #[error("{0}")]
    Logic(#[from] crate::logic::LogicError),
}

/// Resolves a path-style reference to a parsed JSON document.
pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<serde_json::Value, String>;

/// A resolver for self-contained documents: any reference is an error.
pub fn no_refs(path: &str) -> Result<serde_json::Value, String> {
    Err(format!("references are not allowed here: {path}"))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FrameDoc {
    Order { elements: Vec<String>, leq: Vec<Vec<bool>> },
    Topology { points: Vec<String>, opens: Vec<Vec<usize>> },
}

pub fn parse_frame(value: &serde_json::Value) -> Result<Frame, JsonError> {
    let doc: FrameDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("frame: {e}")))?;
    Ok(match doc {
        FrameDoc::Order { elements, leq } => Frame::from_order(elements, leq)?,
        FrameDoc::Topology { points, opens } => Frame::from_topology(points, opens)?,
    })
}

fn resolve_frame(value: &serde_json::Value, resolver: Resolver<'_>) -> Result<Frame, JsonError> {
    if let Some(path) = value.as_str() {
        let doc = resolver(path).map_err(|e| JsonError::Unresolved(path.to_string(), e))?;
        return parse_frame(&doc);
    }
    parse_frame(value)
}

#[derive(Debug, Deserialize)]
struct LanguageDoc {
    #[serde(default)]
    functions: BTreeMap<String, usize>,
    #[serde(default)]
    relations: BTreeMap<String, usize>,
}

pub fn parse_language(value: &serde_json::Value) -> Result<Language, JsonError> {
    let doc: LanguageDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("language: {e}")))?;
    let mut lang = Language::new();
    for (name, arity) in doc.functions {
        lang = lang.with_function(&name, arity)?;
    }
    for (name, arity) in doc.relations {
        lang = lang.with_relation(&name, arity)?;
    }
    Ok(lang)
}

#[derive(Debug, Deserialize)]
struct FiniteStructureDoc {
    universe: Vec<String>,
    #[serde(default)]
    functions: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<bool>>,
}

pub fn parse_finite_structure(
    value: &serde_json::Value,
    lang: &Language,
) -> Result<FiniteStructure, JsonError> {
    let doc: FiniteStructureDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("structure: {e}")))?;
    let index = |name: &str| {
        doc.universe
            .iter()
            .position(|u| u == name)
            .ok_or_else(|| JsonError::UnknownName(name.to_string(), "universe".into()))
    };
    let mut functions = BTreeMap::new();
    for (name, table) in &doc.functions {
        let resolved: Vec<usize> =
            table.iter().map(|n| index(n)).collect::<Result<_, _>>()?;
        functions.insert(name.clone(), resolved);
    }
    Ok(FiniteStructure::new(lang.clone(), doc.universe.clone(), functions, doc.relations.clone())?)
}

#[derive(Debug, Deserialize)]
struct HSetDoc {
    frame: serde_json::Value,
    carrier: Vec<String>,
    alpha: Vec<Vec<String>>,
}

pub fn parse_hset(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<Arc<HSet>, JsonError> {
    let doc: HSetDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("hset: {e}")))?;
    let frame = Arc::new(resolve_frame(&doc.frame, resolver)?);
    let alpha = doc
        .alpha
        .iter()
        .map(|row| row.iter().map(|n| frame.elem_by_name(n)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Arc::new(HSet::new(frame, doc.carrier, alpha)?))
}

#[derive(Debug, Deserialize)]
struct HMorphismDoc {
    dom: serde_json::Value,
    cod: serde_json::Value,
    table: Vec<Vec<String>>,
}

pub fn parse_hmorphism(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<crate::hset::HMorphism, JsonError> {
    let doc: HMorphismDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("hmorphism: {e}")))?;
    let dom = parse_hset(&doc.dom, resolver)?;
    let cod = parse_hset(&doc.cod, resolver)?;
    let frame = dom.frame().clone();
    let mut table = Vec::new();
    for row in &doc.table {
        for cell in row {
            table.push(frame.elem_by_name(cell)?);
        }
    }
    Ok(crate::hset::HMorphism::new(dom, cod, table)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FunctionEntryDoc {
    /// arity 0: the image section name
    Constant(String),
    /// arity >= 1: explicit graph rows
    Rows(Vec<FunctionRowDoc>),
}

#[derive(Debug, Deserialize)]
struct FunctionRowDoc {
    args: Vec<String>,
    value: String,
}

#[derive(Debug, Deserialize)]
struct PresheafDoc {
    frame: serde_json::Value,
    sections: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    restrictions: BTreeMap<String, BTreeMap<String, String>>,
}

/// Parses a bare presheaf document (no structure data).
pub fn parse_presheaf(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<Presheaf, JsonError> {
    let doc: PresheafDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("presheaf: {e}")))?;
    let frame = Arc::new(resolve_frame(&doc.frame, resolver)?);
    let mut sections: Vec<Vec<String>> = vec![Vec::new(); frame.len()];
    for (elem_name, secs) in &doc.sections {
        sections[frame.elem_by_name(elem_name)?] = secs.clone();
    }
    let section_index = |u: usize, name: &str| {
        sections[u].iter().position(|s| s == name).ok_or_else(|| {
            JsonError::UnknownName(name.to_string(), format!("sections of {}", frame.name(u)))
        })
    };
    let mut restrictions = BTreeMap::new();
    for (key, map) in &doc.restrictions {
        let (upper_name, lower_name) = key
            .split_once('>')
            .ok_or_else(|| JsonError::Malformed(format!("restriction key `{key}`")))?;
        let upper = frame.elem_by_name(upper_name.trim())?;
        let lower = frame.elem_by_name(lower_name.trim())?;
        let mut table = vec![usize::MAX; sections[upper].len()];
        for (from, to) in map {
            table[section_index(upper, from)?] = section_index(lower, to)?;
        }
        if table.iter().any(|&i| i == usize::MAX) {
            return Err(JsonError::Malformed(format!("restriction {key} is not total")));
        }
        restrictions.insert((upper, lower), table);
    }
    Ok(Presheaf::new(frame, sections, restrictions)?)
}

#[derive(Debug, Deserialize)]
struct SheafStructureDoc {
    language: serde_json::Value,
    #[serde(default)]
    functions: BTreeMap<String, BTreeMap<String, FunctionEntryDoc>>,
    #[serde(default)]
    relations: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

pub fn parse_sheaf_structure(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<SheafStructure, JsonError> {
    let presheaf = Arc::new(parse_presheaf(value, resolver)?);
    let doc: SheafStructureDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("sheaf structure: {e}")))?;
    let frame = presheaf.frame().clone();
    let language = parse_language(&doc.language)?;
    let sections: Vec<Vec<String>> =
        frame.elements().map(|u| presheaf.sections(u).to_vec()).collect();
    let section_index = |u: usize, name: &str| {
        sections[u]
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| {
                JsonError::UnknownName(name.to_string(), format!("sections of {}", frame.name(u)))
            })
    };
    let mut functions = BTreeMap::new();
    for (name, arity) in language.functions() {
        let per_elem_doc = doc
            .functions
            .get(name)
            .ok_or_else(|| JsonError::Malformed(format!("missing function {name}")))?;
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let entry = per_elem_doc.get(frame.name(u)).ok_or_else(|| {
                JsonError::Malformed(format!("function {name}: missing entry at {}", frame.name(u)))
            })?;
            let count = sections[u].len().pow(arity as u32);
            let mut table = vec![usize::MAX; count];
            match entry {
                FunctionEntryDoc::Constant(target) => {
                    if arity != 0 {
                        return Err(JsonError::Malformed(format!(
                            "function {name} has arity {arity} but a constant entry"
                        )));
                    }
                    table[0] = section_index(u, target)?;
                }
                FunctionEntryDoc::Rows(rows) => {
                    for row in rows {
                        let args: Vec<usize> = row
                            .args
                            .iter()
                            .map(|a| section_index(u, a))
                            .collect::<Result<_, _>>()?;
                        if args.len() != arity {
                            return Err(JsonError::Malformed(format!(
                                "function {name}: row arity mismatch at {}",
                                frame.name(u)
                            )));
                        }
                        table[crate::util::rank(&args, sections[u].len())] =
                            section_index(u, &row.value)?;
                    }
                }
            }
            if table.iter().any(|&i| i == usize::MAX) {
                return Err(JsonError::Malformed(format!(
                    "function {name} is not total at {}",
                    frame.name(u)
                )));
            }
            per_elem.push(table);
        }
        functions.insert(name.to_string(), per_elem);
    }
    let mut relations = BTreeMap::new();
    for (name, arity) in language.relations() {
        let per_elem_doc = doc
            .relations
            .get(name)
            .ok_or_else(|| JsonError::Malformed(format!("missing relation {name}")))?;
        let mut per_elem = Vec::new();
        for u in frame.elements() {
            let tuples = per_elem_doc.get(frame.name(u)).ok_or_else(|| {
                JsonError::Malformed(format!("relation {name}: missing entry at {}", frame.name(u)))
            })?;
            let count = sections[u].len().pow(arity as u32);
            let mut table = vec![false; count];
            for tuple in tuples {
                let args: Vec<usize> = tuple
                    .iter()
                    .map(|a| section_index(u, a))
                    .collect::<Result<_, _>>()?;
                if args.len() != arity {
                    return Err(JsonError::Malformed(format!(
                        "relation {name}: tuple arity mismatch at {}",
                        frame.name(u)
                    )));
                }
                table[crate::util::rank(&args, sections[u].len())] = true;
            }
            per_elem.push(table);
        }
        relations.insert(name.to_string(), per_elem);
    }
    Ok(SheafStructure::new(presheaf, language, functions, relations)?)
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FunctionSpecDoc {
    Map { map: Vec<String> },
    Table { table: Vec<Vec<String>> },
}

#[derive(Debug, Deserialize)]
struct HStructureDoc {
    frame: serde_json::Value,
    language: serde_json::Value,
    carrier: Vec<String>,
    delta: Vec<Vec<String>>,
    #[serde(default)]
    functions: BTreeMap<String, FunctionSpecDoc>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<String>>,
}

pub fn parse_hstructure(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<HStructure, JsonError> {
    let doc: HStructureDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("hstructure: {e}")))?;
    let frame = Arc::new(resolve_frame(&doc.frame, resolver)?);
    let language = parse_language(&doc.language)?;
    let delta = doc
        .delta
        .iter()
        .map(|row| row.iter().map(|n| frame.elem_by_name(n)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let carrier = Arc::new(HSet::new(frame.clone(), doc.carrier.clone(), delta)?);
    let carrier_index = |name: &str| {
        carrier
            .element_by_name(name)
            .ok_or_else(|| JsonError::UnknownName(name.to_string(), "carrier".into()))
    };
    let mut functions = BTreeMap::new();
    for (name, spec) in &doc.functions {
        let resolved = match spec {
            FunctionSpecDoc::Map { map } => FunctionSpec::Map(
                map.iter().map(|n| carrier_index(n)).collect::<Result<_, _>>()?,
            ),
            FunctionSpecDoc::Table { table } => {
                let mut flat = Vec::new();
                for row in table {
                    for cell in row {
                        flat.push(frame.elem_by_name(cell)?);
                    }
                }
                FunctionSpec::Table(flat)
            }
        };
        functions.insert(name.clone(), resolved);
    }
    let mut relations = BTreeMap::new();
    for (name, values) in &doc.relations {
        let resolved: Vec<usize> =
            values.iter().map(|n| frame.elem_by_name(n)).collect::<Result<_, _>>()?;
        relations.insert(name.clone(), resolved);
    }
    Ok(HStructure::new(language, carrier, functions, relations)?)
}

/// A model file is either a sheaf of structures (with `sections`) or a
/// Heyting-valued structure (with `delta`). Returns the lifted structure
/// and the sheaf when one was given.
pub fn parse_model(
    value: &serde_json::Value,
    resolver: Resolver<'_>,
) -> Result<(HStructure, Option<SheafStructure>), JsonError> {
    let obj = value
        .as_object()
        .ok_or_else(|| JsonError::Malformed("model file must be an object".into()))?;
    if obj.contains_key("sections") {
        let sheaf = parse_sheaf_structure(value, resolver)?;
        let lifted = crate::sheaf::lift_structure(&sheaf)?;
        Ok((lifted, Some(sheaf)))
    } else if obj.contains_key("delta") {
        Ok((parse_hstructure(value, resolver)?, None))
    } else {
        Err(JsonError::Malformed(
            "model file must contain `sections` (sheaf) or `delta` (structure)".into(),
        ))
    }
}

#[derive(Debug, Deserialize)]
struct FamilyDoc {
    language: serde_json::Value,
    index: Vec<String>,
    factors: BTreeMap<String, serde_json::Value>,
}

pub fn parse_family(
    value: &serde_json::Value,
) -> Result<(Vec<String>, Vec<FiniteStructure>), JsonError> {
    let doc: FamilyDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("family: {e}")))?;
    let lang = parse_language(&doc.language)?;
    let mut factors = Vec::new();
    for name in &doc.index {
        let factor_doc = doc
            .factors
            .get(name)
            .ok_or_else(|| JsonError::UnknownName(name.clone(), "factors".into()))?;
        factors.push(parse_finite_structure(factor_doc, &lang)?);
    }
    Ok((doc.index, factors))
}

/// Filter syntax: `up:<element>` for a principal filter, or a comma list of
/// member element names.
pub fn parse_filter(frame: &Arc<Frame>, text: &str) -> Result<Filter, JsonError> {
    if let Some(gen_name) = text.strip_prefix("up:") {
        let generator = frame.elem_by_name(gen_name.trim())?;
        return Ok(Filter::principal(frame.clone(), generator)?);
    }
    let members: Vec<usize> = text
        .split(',')
        .map(|n| frame.elem_by_name(n.trim()))
        .collect::<Result<_, _>>()?;
    Ok(Filter::from_members(frame.clone(), &members)?)
}

#[derive(Debug, Deserialize)]
pub struct SequentDoc {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(default)]
    pub context: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct SequentsDoc {
    language: serde_json::Value,
    sequents: Vec<SequentDoc>,
}

/// Parses the curated sequent list: a language and named
/// `lhs |- rhs` pairs with optional contexts.
pub fn parse_sequents(
    value: &serde_json::Value,
) -> Result<(Language, Vec<SequentDoc>), JsonError> {
    let doc: SequentsDoc = serde_json::from_value(value.clone())
        .map_err(|e| JsonError::Malformed(format!("sequents: {e}")))?;
    Ok((parse_language(&doc.language)?, doc.sequents))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_docs() {
        let order = serde_json::json!({
            "elements": ["0", "1"],
            "leq": [[true, true], [false, true]],
        });
        let f = parse_frame(&order).unwrap();
        assert_eq!(f.len(), 2);
        let topo = serde_json::json!({"points": ["p"], "opens": [[], [0]]});
        let f = parse_frame(&topo).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.name(1), "{p}");
    }

    #[test]
    fn hset_and_hmorphism_docs() {
        let hset = serde_json::json!({
            "frame": {"elements": ["0", "u", "1"],
                      "leq": [[true, true, true], [false, true, true], [false, false, true]]},
            "carrier": ["x", "y"],
            "alpha": [["1", "u"], ["u", "u"]],
        });
        let a = parse_hset(&hset, &no_refs).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.extent(1), 1);
        let hmor = serde_json::json!({
            "dom": hset, "cod": hset,
            "table": [["1", "u"], ["u", "u"]],
        });
        let phi = parse_hmorphism(&hmor, &no_refs).unwrap();
        assert!(phi.is_mono() && phi.is_epi());
    }

    #[test]
    fn filter_syntax() {
        let s3 = crate::fixtures::s3_arc();
        let f = parse_filter(&s3, "up:u").unwrap();
        assert_eq!(f.generator(), 1);
        let f = parse_filter(&s3, "u, 1").unwrap();
        assert_eq!(f.generator(), 1);
        assert!(parse_filter(&s3, "up:zzz").is_err());
        assert!(parse_filter(&s3, "1,u,0").is_ok());
    }
}
