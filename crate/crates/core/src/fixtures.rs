//! Canonical small instances used across the test suites and shipped as
//! JSON data files under `fixtures/`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::frame::Frame;
use crate::hmodel::{FunctionSpec, HStructure};
use crate::hset::HSet;
use crate::logic::{FiniteStructure, Language};
use crate::sheaf::{discrete_family, Presheaf, SheafStructure};

fn chain(names: &[&str]) -> Frame {
    let n = names.len();
    let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
    Frame::from_order(names.iter().map(|s| s.to_string()).collect(), leq).unwrap()
}

/// The two-element frame {0, 1}.
pub fn f2() -> Frame {
    chain(&["0", "1"])
}

/// The three-chain 0 < u < 1: the open-set frame of Sierpinski space.
pub fn s3() -> Frame {
    chain(&["0", "u", "1"])
}

/// The four-chain 0 < a < b < 1.
pub fn chain4() -> Frame {
    chain(&["0", "a", "b", "1"])
}

/// The four-element Boolean algebra {0, a, b, 1} with atoms a, b.
pub fn b4() -> Frame {
    let names: Vec<String> = ["0", "a", "b", "1"].iter().map(|s| s.to_string()).collect();
    let mut leq = vec![vec![false; 4]; 4];
    for i in 0..4 {
        leq[i][i] = true;
        leq[0][i] = true;
        leq[i][3] = true;
    }
    Frame::from_order(names, leq).unwrap()
}

/// All topologies on the given points, each as a frame, in a deterministic
/// order. Exponential in the number of points; meant for point counts <= 3.
pub fn all_topologies(points: &[&str]) -> Vec<Frame> {
    let n = points.len();
    assert!(n <= 4, "topology enumeration is meant for tiny point sets");
    let subsets: Vec<u32> = (0..(1u32 << n)).collect();
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    // families of subsets, encoded as bitmasks over the subset list
    for fam in 0u64..(1u64 << subsets.len()) {
        let opens: Vec<u32> = subsets
            .iter()
            .copied()
            .filter(|&s| fam & (1u64 << s) != 0)
            .collect();
        if !opens.contains(&0) || !opens.contains(&full) {
            continue;
        }
        let closed = opens.iter().all(|&x| {
            opens
                .iter()
                .all(|&y| opens.contains(&(x & y)) && opens.contains(&(x | y)))
        });
        if !closed {
            continue;
        }
        let open_sets: Vec<Vec<usize>> = opens
            .iter()
            .map(|&s| (0..n).filter(|&p| s & (1 << p) != 0).collect())
            .collect();
        out.push(
            Frame::from_topology(points.iter().map(|p| p.to_string()).collect(), open_sets)
                .expect("enumerated family is a topology"),
        );
    }
    out
}

pub fn s3_arc() -> Arc<Frame> {
    Arc::new(s3())
}

pub fn f2_arc() -> Arc<Frame> {
    Arc::new(f2())
}

pub fn b4_arc() -> Arc<Frame> {
    Arc::new(b4())
}

/// Language {constant c, unary R} shared by the canonical fixtures.
pub fn lang_rc() -> Language {
    Language::new()
        .with_function("c", 0)
        .unwrap()
        .with_relation("R", 1)
        .unwrap()
}

/// The restriction-chain sheaf of structures over the Sierpinski frame:
/// single sections c1 > cu > c0; R holds at u and 0 but not at 1, so the
/// forcing value of R at the global section is u.
pub fn fix_rc() -> SheafStructure {
    let frame = s3_arc();
    let sections = vec![vec!["c0".to_string()], vec!["cu".to_string()], vec!["c1".to_string()]];
    let restrictions = BTreeMap::from([
        ((1usize, 0usize), vec![0usize]),
        ((2, 0), vec![0]),
        ((2, 1), vec![0]),
    ]);
    let presheaf = Arc::new(Presheaf::new(frame, sections, restrictions).unwrap());
    let functions = BTreeMap::from([("c".to_string(), vec![vec![0], vec![0], vec![0]])]);
    let relations =
        BTreeMap::from([("R".to_string(), vec![vec![true], vec![true], vec![false]])]);
    SheafStructure::new(presheaf, lang_rc(), functions, relations).unwrap()
}

/// One-element structure over {c, R}: `R(c)` holds or fails.
pub fn point_structure(r_holds: bool) -> FiniteStructure {
    FiniteStructure::new(
        lang_rc(),
        vec!["m".into()],
        BTreeMap::from([("c".to_string(), vec![0])]),
        BTreeMap::from([("R".to_string(), vec![r_holds])]),
    )
    .unwrap()
}

/// The discrete two-point family with `R(c)` holding at x and failing at y,
/// as a sheaf of structures on the powerset frame of {x, y}.
pub fn fix_fam() -> SheafStructure {
    discrete_family(&["x", "y"], &[point_structure(true), point_structure(false)]).unwrap()
}

/// A Heyting-valued structure over B4 witnessing a filter that fails
/// genericity: one global element with `R` of value a, so neither
/// `||R(c)^G|| = a` nor `||~R(c)^G|| = b` lies in the top filter.
pub fn fix_neg() -> HStructure {
    let carrier = Arc::new(HSet::new(b4_arc(), vec!["m".into()], vec![vec![3]]).unwrap());
    HStructure::new(
        lang_rc(),
        carrier,
        BTreeMap::from([("c".to_string(), FunctionSpec::Map(vec![0]))]),
        BTreeMap::from([("R".to_string(), vec![1])]),
    )
    .unwrap()
}

/// Language {c, f unary, R unary} for the richer ultraproduct families.
pub fn lang_cfr() -> Language {
    Language::new()
        .with_function("c", 0)
        .unwrap()
        .with_function("f", 1)
        .unwrap()
        .with_relation("R", 1)
        .unwrap()
}

/// A structure over {c, f, R} with the universe `0..size`, `c = 0`,
/// `f` the successor modulo the size, and `R` holding on a given set.
pub fn cyclic_structure(size: usize, r_holds: &[usize]) -> FiniteStructure {
    let universe: Vec<String> = (0..size).map(|i| format!("e{i}")).collect();
    FiniteStructure::new(
        lang_cfr(),
        universe,
        BTreeMap::from([
            ("c".to_string(), vec![0]),
            ("f".to_string(), (0..size).map(|i| (i + 1) % size).collect()),
        ]),
        BTreeMap::from([("R".to_string(), (0..size).map(|i| r_holds.contains(&i)).collect())]),
    )
    .unwrap()
}

/// A structure over the function-free {c, R} with the universe `0..size`,
/// `c = 0`, and `R` holding on a given set. The lean language keeps the
/// exhaustive depth-3 formula space desk-scale.
pub fn flat_structure(size: usize, r_holds: &[usize]) -> FiniteStructure {
    let universe: Vec<String> = (0..size).map(|i| format!("e{i}")).collect();
    FiniteStructure::new(
        lang_rc(),
        universe,
        BTreeMap::from([("c".to_string(), vec![0])]),
        BTreeMap::from([("R".to_string(), (0..size).map(|i| r_holds.contains(&i)).collect())]),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_counts() {
        assert_eq!(all_topologies(&[]).len(), 1);
        assert_eq!(all_topologies(&["p"]).len(), 1);
        assert_eq!(all_topologies(&["p", "q"]).len(), 4);
        assert_eq!(all_topologies(&["p", "q", "r"]).len(), 29);
    }
}
