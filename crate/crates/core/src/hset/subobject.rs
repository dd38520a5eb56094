//! Strict relations and the subobject lattice of a Heyting-valued set,
//! including the mono/strict-relation round trips, image factorization, the
//! frame operations, and the change-of-base adjoint triple.

use std::sync::Arc;

use crate::frame::Elem;

use super::{HMorphism, HSet, HSetError, SizeGuard};

/// A strict relation on a carrier: a frame-valued predicate compatible with
/// the valuation and bounded by extents. Represents a subobject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictRelation {
    base: Arc<HSet>,
    values: Vec<Elem>,
}

impl StrictRelation {
    pub fn new(base: Arc<HSet>, values: Vec<Elem>) -> Result<StrictRelation, HSetError> {
        if values.len() != base.len() {
            return Err(HSetError::NotStrict {
                a: format!("{} values", values.len()),
                b: format!("{} elements", base.len()),
            });
        }
        let frame = base.frame();
        for a in base.elements() {
            if !frame.leq(values[a], base.extent(a)) {
                return Err(HSetError::NotStrict {
                    a: base.name(a).to_string(),
                    b: base.name(a).to_string(),
                });
            }
            for b in base.elements() {
                if !frame.leq(frame.meet(values[a], base.alpha(a, b)), values[b]) {
                    return Err(HSetError::NotStrict {
                        a: base.name(a).to_string(),
                        b: base.name(b).to_string(),
                    });
                }
            }
        }
        Ok(StrictRelation { base, values })
    }

    pub fn base(&self) -> &Arc<HSet> {
        &self.base
    }

    #[inline]
    pub fn at(&self, a: usize) -> Elem {
        self.values[a]
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    /// The top subobject: the extent map.
    pub fn top(base: Arc<HSet>) -> StrictRelation {
        let values = base.elements().map(|a| base.extent(a)).collect();
        StrictRelation { base, values }
    }

    pub fn bottom(base: Arc<HSet>) -> StrictRelation {
        let zero = base.frame().bottom();
        let values = vec![zero; base.len()];
        StrictRelation { base, values }
    }

    pub fn leq(&self, other: &StrictRelation) -> bool {
        let frame = self.base.frame();
        self.values
            .iter()
            .zip(other.values.iter())
            .all(|(&x, &y)| frame.leq(x, y))
    }

    pub fn meet(&self, other: &StrictRelation) -> StrictRelation {
        let frame = self.base.frame();
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&x, &y)| frame.meet(x, y))
            .collect();
        StrictRelation { base: self.base.clone(), values }
    }

    pub fn join(&self, other: &StrictRelation) -> StrictRelation {
        let frame = self.base.frame();
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(&x, &y)| frame.join(x, y))
            .collect();
        StrictRelation { base: self.base.clone(), values }
    }

    /// Heyting implication in the subobject lattice:
    /// `(sigma => tau)(a) = alpha(a) & (sigma(a) => tau(a))`.
    pub fn implies(&self, other: &StrictRelation) -> StrictRelation {
        let frame = self.base.frame();
        let values = self
            .base
            .elements()
            .map(|a| frame.meet(self.base.extent(a), frame.implies(self.values[a], other.values[a])))
            .collect();
        StrictRelation { base: self.base.clone(), values }
    }

    pub fn neg(&self) -> StrictRelation {
        self.implies(&StrictRelation::bottom(self.base.clone()))
    }

    /// Is this strict relation a singleton (also satisfies
    /// `sigma(a) & sigma(a') <= alpha(a, a')`)?
    pub fn is_singleton(&self) -> bool {
        self.base.is_singleton_table(&self.values)
    }

    /// The subobject as an object: `(A, alpha_sigma)` with
    /// `alpha_sigma(a, a') = sigma(a) & alpha(a, a')`, and the identity-map
    /// mono into the base.
    pub fn to_mono(&self) -> (Arc<HSet>, HMorphism) {
        let frame = self.base.frame().clone();
        let m = self.base.len();
        let mut rows = vec![vec![0; m]; m];
        for a in 0..m {
            for b in 0..m {
                rows[a][b] = frame.meet(self.values[a], self.base.alpha(a, b));
            }
        }
        let object = Arc::new(
            HSet::new(frame.clone(), self.base.names().to_vec(), rows)
                .expect("alpha_sigma is a valuation"),
        );
        let mut table = vec![0; m * m];
        for a in 0..m {
            for b in 0..m {
                table[a * m + b] = frame.meet(object.extent(a), self.base.alpha(a, b));
            }
        }
        let mono = HMorphism::new(object.clone(), self.base.clone(), table)
            .expect("identity map represents the inclusion");
        (object, mono)
    }

    /// Enumerates every strict relation of a base, in lexicographic value
    /// order. Exponential in the carrier; guarded.
    pub fn all(base: &Arc<HSet>, guard: &SizeGuard) -> Result<Vec<StrictRelation>, HSetError> {
        let m = base.len();
        let nf = base.frame().len();
        guard.check("strict relations", nf, m)?;
        let mut out = Vec::new();
        let mut values = vec![0usize; m];
        loop {
            if base.is_strict_table(&values) {
                out.push(StrictRelation { base: base.clone(), values: values.clone() });
            }
            let mut i = m;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                values[i] += 1;
                if values[i] < nf {
                    break;
                }
                values[i] = 0;
            }
        }
    }
}

/// The subobject lattice of an object, fully enumerated. Exposes the frame
/// operations and the distributive-law check used by the law suites.
#[derive(Debug, Clone)]
pub struct SubobjectLattice {
    pub base: Arc<HSet>,
    pub relations: Vec<StrictRelation>,
}

impl SubobjectLattice {
    pub fn enumerate(base: &Arc<HSet>, guard: &SizeGuard) -> Result<SubobjectLattice, HSetError> {
        Ok(SubobjectLattice { base: base.clone(), relations: StrictRelation::all(base, guard)? })
    }

    /// `sigma & (join_i tau_i) = join_i (sigma & tau_i)` over the whole
    /// lattice, pairwise-join version.
    pub fn check_distributivity(&self) -> Result<(), String> {
        for s in &self.relations {
            for t in &self.relations {
                for u in &self.relations {
                    let lhs = s.meet(&t.join(u));
                    let rhs = s.meet(t).join(&s.meet(u));
                    if lhs != rhs {
                        return Err(format!(
                            "distributivity fails at {:?}, {:?}, {:?}",
                            s.values(),
                            t.values(),
                            u.values()
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `rho_phi(a) = join_b phi(b, a)` for any morphism into the base; for a
/// mono this inverts `to_mono`.
pub fn from_mono(phi: &HMorphism) -> StrictRelation {
    let base = phi.cod().clone();
    let frame = base.frame();
    let values = base
        .elements()
        .map(|a| frame.join_all(phi.dom().elements().map(|b| phi.at(b, a))))
        .collect();
    StrictRelation { base, values }
}

/// Image factorization of an arbitrary morphism: an epi onto
/// `(A, alpha_rho)` followed by the inclusion mono.
pub fn image_factorization(
    phi: &HMorphism,
) -> Result<(Arc<HSet>, HMorphism, HMorphism), HSetError> {
    let rho = from_mono(phi);
    let (image, mono) = rho.to_mono();
    let epi = HMorphism::new(phi.dom().clone(), image.clone(), phi.table().to_vec())?;
    debug_assert!(epi.is_epi());
    debug_assert!(mono.is_mono());
    debug_assert_eq!(&epi.compose(&mono)?, phi);
    Ok((image, epi, mono))
}

/// Pullback of subobjects along `phi : (B, beta) -> (A, alpha)` — the join
/// form `(phi* sigma)(b) = join_a phi(b, a) & sigma(a)`.
pub fn pullback_sub(phi: &HMorphism, sigma: &StrictRelation) -> StrictRelation {
    assert_eq!(phi.cod(), sigma.base(), "sigma must live on the codomain");
    let frame = phi.dom().frame();
    let values = phi
        .dom()
        .elements()
        .map(|b| {
            frame.join_all(
                phi.cod()
                    .elements()
                    .map(|a| frame.meet(phi.at(b, a), sigma.at(a))),
            )
        })
        .collect();
    StrictRelation { base: phi.dom().clone(), values }
}

/// The equivalent meet form
/// `beta(b) & meet_a [phi(b, a) => sigma(a)]`, kept as an independent route.
pub fn pullback_sub_meet_form(phi: &HMorphism, sigma: &StrictRelation) -> StrictRelation {
    assert_eq!(phi.cod(), sigma.base());
    let frame = phi.dom().frame();
    let values = phi
        .dom()
        .elements()
        .map(|b| {
            let body = frame.meet_all(
                phi.cod()
                    .elements()
                    .map(|a| frame.implies(phi.at(b, a), sigma.at(a))),
            );
            frame.meet(phi.dom().extent(b), body)
        })
        .collect();
    StrictRelation { base: phi.dom().clone(), values }
}

/// Left adjoint of pullback: `(exists_phi tau)(a) = join_b phi(b, a) & tau(b)`.
pub fn exists_along(phi: &HMorphism, tau: &StrictRelation) -> StrictRelation {
    assert_eq!(phi.dom(), tau.base(), "tau must live on the domain");
    let frame = phi.dom().frame();
    let values = phi
        .cod()
        .elements()
        .map(|a| {
            frame.join_all(
                phi.dom()
                    .elements()
                    .map(|b| frame.meet(phi.at(b, a), tau.at(b))),
            )
        })
        .collect();
    StrictRelation { base: phi.cod().clone(), values }
}

/// Right adjoint of pullback:
/// `(forall_phi tau)(a) = alpha(a) & meet_b [phi(b, a) => tau(b)]`.
pub fn forall_along(phi: &HMorphism, tau: &StrictRelation) -> StrictRelation {
    assert_eq!(phi.dom(), tau.base(), "tau must live on the domain");
    let frame = phi.dom().frame();
    let values = phi
        .cod()
        .elements()
        .map(|a| {
            let body = frame.meet_all(
                phi.dom()
                    .elements()
                    .map(|b| frame.implies(phi.at(b, a), tau.at(b))),
            );
            frame.meet(phi.cod().extent(a), body)
        })
        .collect();
    StrictRelation { base: phi.cod().clone(), values }
}
