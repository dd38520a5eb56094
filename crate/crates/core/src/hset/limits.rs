//! Finite limits: terminal object, finite products with canonical
//! projections, equalizers and pullbacks, plus opt-in exhaustive
//! universal-property verification against every competing cone.

use std::sync::Arc;

use crate::frame::Frame;

use super::{mixed_tuples, HMorphism, HSet, HSetError, SizeGuard};

pub fn terminal(frame: Arc<Frame>) -> Arc<HSet> {
    Arc::new(HSet::terminal(frame))
}

/// Finite product with canonical projections. The empty product is the
/// terminal object (and has no projections).
pub fn product(
    frame: &Arc<Frame>,
    factors: &[Arc<HSet>],
) -> Result<(Arc<HSet>, Vec<HMorphism>), HSetError> {
    if factors.is_empty() {
        return Ok((terminal(frame.clone()), Vec::new()));
    }
    let refs: Vec<&HSet> = factors.iter().map(|f| f.as_ref()).collect();
    let prod = Arc::new(HSet::product_of(&refs)?);
    let sizes: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let tuples = mixed_tuples(&sizes);
    let mut legs = Vec::new();
    for (i, factor) in factors.iter().enumerate() {
        let n = factor.len();
        let mut table = vec![0; prod.len() * n];
        for (t_idx, t) in tuples.iter().enumerate() {
            for b in 0..n {
                // projection represented by the map t -> t_i
                table[t_idx * n + b] = frame.meet(prod.extent(t_idx), factor.alpha(t[i], b));
            }
        }
        legs.push(HMorphism::new(prod.clone(), factor.clone(), table)?);
    }
    Ok((prod, legs))
}

/// Equalizer of a parallel pair: the domain re-valued by
/// `delta(a, a') = alpha(a, a') & join_b phi(a, b) & psi(a, b)`, with the
/// identity-map inclusion.
pub fn equalizer(
    phi: &HMorphism,
    psi: &HMorphism,
) -> Result<(Arc<HSet>, HMorphism), HSetError> {
    if phi.dom() != psi.dom() || phi.cod() != psi.cod() {
        return Err(HSetError::ObjectMismatch);
    }
    let a_set = phi.dom();
    let frame = a_set.frame().clone();
    let m = a_set.len();
    let agree: Vec<_> = (0..m)
        .map(|a| {
            frame.join_all(
                phi.cod()
                    .elements()
                    .map(|b| frame.meet(phi.at(a, b), psi.at(a, b))),
            )
        })
        .collect();
    let mut alpha = vec![0; m * m];
    for a in 0..m {
        for a2 in 0..m {
            alpha[a * m + a2] = frame.meet(a_set.alpha(a, a2), frame.meet(agree[a], agree[a2]));
        }
    }
    let eq = Arc::new(HSet::new_unchecked(frame.clone(), a_set.names().to_vec(), alpha));
    let mut table = vec![0; m * m];
    for a in 0..m {
        for b in 0..m {
            table[a * m + b] = frame.meet(eq.extent(a), a_set.alpha(a, b));
        }
    }
    let incl = HMorphism::new_unchecked(eq.clone(), a_set.clone(), table);
    Ok((eq, incl))
}

/// Pullback of a cospan `phi : A -> C <- B : psi`, with its two projections.
pub fn pullback(
    phi: &HMorphism,
    psi: &HMorphism,
) -> Result<(Arc<HSet>, HMorphism, HMorphism), HSetError> {
    if phi.cod() != psi.cod() {
        return Err(HSetError::ObjectMismatch);
    }
    let (a_set, b_set) = (phi.dom(), psi.dom());
    let frame = a_set.frame().clone();
    let (m, n) = (a_set.len(), b_set.len());
    let names: Vec<String> = mixed_tuples(&[m, n])
        .iter()
        .map(|t| format!("({},{})", a_set.name(t[0]), b_set.name(t[1])))
        .collect();
    let pair = |i: usize| (i / n, i % n);
    let k = m * n;
    // delta((a,b),(a',b')) = alpha(a,a') & beta(b,b') & join_c phi(a,c) & psi(b,c)
    let glue: Vec<_> = (0..k)
        .map(|i| {
            let (a, b) = pair(i);
            frame.join_all(
                phi.cod()
                    .elements()
                    .map(|c| frame.meet(phi.at(a, c), psi.at(b, c))),
            )
        })
        .collect();
    let mut rows = vec![vec![0; k]; k];
    for i in 0..k {
        let (a, b) = pair(i);
        for j in 0..k {
            let (a2, b2) = pair(j);
            rows[i][j] = frame.meet(
                frame.meet(a_set.alpha(a, a2), b_set.alpha(b, b2)),
                glue[i],
            );
        }
    }
    let pb = Arc::new(HSet::new(frame.clone(), names, rows)?);
    let mut to_a = vec![0; k * m];
    let mut to_b = vec![0; k * n];
    for i in 0..k {
        let (a, b) = pair(i);
        for x in 0..m {
            to_a[i * m + x] = frame.meet(pb.extent(i), a_set.alpha(a, x));
        }
        for y in 0..n {
            to_b[i * n + y] = frame.meet(pb.extent(i), b_set.alpha(b, y));
        }
    }
    let pa = HMorphism::new(pb.clone(), a_set.clone(), to_a)?;
    let pbm = HMorphism::new(pb.clone(), b_set.clone(), to_b)?;
    Ok((pb, pa, pbm))
}

/// Brute-force enumeration of every morphism between two objects, in
/// lexicographic table order. Exponential; guarded.
pub fn enumerate_morphisms(
    dom: &Arc<HSet>,
    cod: &Arc<HSet>,
    guard: &SizeGuard,
) -> Result<Vec<HMorphism>, HSetError> {
    if dom.frame() != cod.frame() {
        return Err(HSetError::FrameMismatch);
    }
    let cells = dom.len() * cod.len();
    let nf = dom.frame().len();
    guard.check("morphism tables", nf, cells)?;
    let mut out = Vec::new();
    let mut table = vec![0usize; cells];
    loop {
        if let Ok(m) = HMorphism::new(dom.clone(), cod.clone(), table.clone()) {
            out.push(m);
        }
        let mut i = cells;
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
    }
}

/// Exhaustive terminal check: exactly one morphism from each test object.
pub fn verify_terminal(
    term: &Arc<HSet>,
    test_objects: &[Arc<HSet>],
    guard: &SizeGuard,
) -> Result<(), HSetError> {
    for c in test_objects {
        let homs = enumerate_morphisms(c, term, guard)?;
        if homs.len() != 1 {
            return Err(HSetError::NotMorphism(format!(
                "terminal object admits {} morphisms from {:?}",
                homs.len(),
                c
            )));
        }
    }
    Ok(())
}

/// Exhaustive universal-property check for a product: every cone factors
/// through the projections uniquely.
pub fn verify_product(
    prod: &Arc<HSet>,
    legs: &[HMorphism],
    test_objects: &[Arc<HSet>],
    guard: &SizeGuard,
) -> Result<(), HSetError> {
    for c in test_objects {
        let cone_sides: Vec<Vec<HMorphism>> = legs
            .iter()
            .map(|leg| enumerate_morphisms(c, leg.cod(), guard))
            .collect::<Result<_, _>>()?;
        let mediators = enumerate_morphisms(c, prod, guard)?;
        for cone in cartesian(&cone_sides) {
            let matching: Vec<&HMorphism> = mediators
                .iter()
                .filter(|m| {
                    legs.iter()
                        .zip(cone.iter())
                        .all(|(leg, side)| m.compose(leg).ok().as_ref() == Some(*side))
                })
                .collect();
            if matching.len() != 1 {
                return Err(HSetError::NotMorphism(format!(
                    "product universal property: {} mediators for a cone from {:?}",
                    matching.len(),
                    c
                )));
            }
        }
    }
    Ok(())
}

/// Exhaustive universal-property check for an equalizer.
pub fn verify_equalizer(
    eq: &Arc<HSet>,
    incl: &HMorphism,
    phi: &HMorphism,
    psi: &HMorphism,
    test_objects: &[Arc<HSet>],
    guard: &SizeGuard,
) -> Result<(), HSetError> {
    for c in test_objects {
        for g in enumerate_morphisms(c, phi.dom(), guard)? {
            if g.compose(phi)? != g.compose(psi)? {
                continue;
            }
            let mediators: Vec<HMorphism> = enumerate_morphisms(c, eq, guard)?
                .into_iter()
                .filter(|m| m.compose(incl).ok().as_ref() == Some(&g))
                .collect();
            if mediators.len() != 1 {
                return Err(HSetError::NotMorphism(format!(
                    "equalizer universal property: {} mediators from {:?}",
                    mediators.len(),
                    c
                )));
            }
        }
    }
    Ok(())
}

/// Exhaustive universal-property check for a pullback square.
pub fn verify_pullback(
    pb: &Arc<HSet>,
    pa: &HMorphism,
    pbm: &HMorphism,
    phi: &HMorphism,
    psi: &HMorphism,
    test_objects: &[Arc<HSet>],
    guard: &SizeGuard,
) -> Result<(), HSetError> {
    for c in test_objects {
        for f in enumerate_morphisms(c, phi.dom(), guard)? {
            for g in enumerate_morphisms(c, psi.dom(), guard)? {
                if f.compose(phi)? != g.compose(psi)? {
                    continue;
                }
                let mediators: Vec<HMorphism> = enumerate_morphisms(c, pb, guard)?
                    .into_iter()
                    .filter(|m| {
                        m.compose(pa).ok().as_ref() == Some(&f)
                            && m.compose(pbm).ok().as_ref() == Some(&g)
                    })
                    .collect();
                if mediators.len() != 1 {
                    return Err(HSetError::NotMorphism(format!(
                        "pullback universal property: {} mediators from {:?}",
                        mediators.len(),
                        c
                    )));
                }
            }
        }
    }
    Ok(())
}

fn cartesian<'a>(lists: &'a [Vec<HMorphism>]) -> Vec<Vec<&'a HMorphism>> {
    let mut out: Vec<Vec<&HMorphism>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::new();
        for combo in &out {
            for item in list {
                let mut c2 = combo.clone();
                c2.push(item);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}
