//! Higher-order structure: the subobject classifier and power objects.

use std::sync::Arc;

use crate::frame::Frame;

use super::{pullback_sub, HMorphism, HSet, HSetError, SizeGuard, StrictRelation};

/// The subobject classifier: `Omega = (O(X), U <-> V)` with the truth arrow
/// `t : 1 -> Omega`, `t(*, U) = U`.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub omega: Arc<HSet>,
    pub point: Arc<HSet>,
    pub truth: HMorphism,
}

pub fn classifier(frame: &Arc<Frame>) -> Classifier {
    let n = frame.len();
    let names: Vec<String> = frame.elements().map(|u| frame.name(u).to_string()).collect();
    let mut rows = vec![vec![0; n]; n];
    for u in 0..n {
        for v in 0..n {
            rows[u][v] = frame.iff(u, v);
        }
    }
    let omega = Arc::new(HSet::new(frame.clone(), names, rows).expect("iff is a valuation"));
    let point = Arc::new(HSet::terminal(frame.clone()));
    let table: Vec<_> = frame.elements().collect();
    let truth = HMorphism::new(point.clone(), omega.clone(), table)
        .expect("truth values form a morphism from the point");
    Classifier { omega, point, truth }
}

/// The characteristic morphism of a strict relation:
/// `chi(a, U) = alpha(a) & (U <-> sigma(a))`.
pub fn characteristic(cls: &Classifier, sigma: &StrictRelation) -> HMorphism {
    let base = sigma.base().clone();
    let frame = base.frame().clone();
    let n = frame.len();
    let mut table = vec![0; base.len() * n];
    for a in base.elements() {
        for u in frame.elements() {
            table[a * n + u] = frame.meet(base.extent(a), frame.iff(u, sigma.at(a)));
        }
    }
    HMorphism::new(base, cls.omega.clone(), table)
        .expect("characteristic table is a morphism")
}

/// Recovers the strict relation classified by `chi : A -> Omega` as the
/// pullback of the truth arrow: `sigma(a) = join_U chi(a, U) & U`.
pub fn sub_from_characteristic(chi: &HMorphism) -> StrictRelation {
    let frame = chi.dom().frame().clone();
    // the truth arrow corresponds to the identity strict relation on Omega
    let id_values: Vec<_> = frame.elements().collect();
    let id_rel = StrictRelation::new(chi.cod().clone(), id_values)
        .expect("identity is strict on Omega");
    pullback_sub(chi, &id_rel)
}

/// The power object `P(A)`: carrier of all strict relations with the
/// valuation `meet_a (sigma(a) <-> tau(a))`.
#[derive(Debug, Clone)]
pub struct PowerObject {
    pub object: Arc<HSet>,
    pub relations: Vec<StrictRelation>,
}

pub fn power_object(base: &Arc<HSet>, guard: &SizeGuard) -> Result<PowerObject, HSetError> {
    let frame = base.frame().clone();
    let relations = StrictRelation::all(base, guard)?;
    let k = relations.len();
    let names: Vec<String> = relations
        .iter()
        .map(|r| {
            let inner: Vec<String> = base
                .elements()
                .map(|a| format!("{}:{}", base.name(a), frame.name(r.at(a))))
                .collect();
            format!("{{{}}}", inner.join(","))
        })
        .collect();
    let mut rows = vec![vec![0; k]; k];
    for (i, s) in relations.iter().enumerate() {
        for (j, t) in relations.iter().enumerate() {
            rows[i][j] =
                frame.meet_all(base.elements().map(|a| frame.iff(s.at(a), t.at(a))));
        }
    }
    let object = Arc::new(HSet::new(frame, names, rows)?);
    Ok(PowerObject { object, relations })
}

/// Transposes a morphism `phi : B -> P(A)` to a strict relation on
/// `B x A`: `theta(b, a) = join_tau phi(b, tau) & tau(a)`.
pub fn power_transpose(
    phi: &HMorphism,
    power: &PowerObject,
    product_ba: &Arc<HSet>,
) -> Result<StrictRelation, HSetError> {
    let b_set = phi.dom();
    let a_set = power.relations.first().map(|r| r.base().clone());
    let frame = b_set.frame().clone();
    let a_len = match &a_set {
        Some(a) => a.len(),
        None => {
            return StrictRelation::new(product_ba.clone(), vec![frame.bottom(); product_ba.len()])
        }
    };
    let mut values = vec![0; product_ba.len()];
    for b in b_set.elements() {
        for a in 0..a_len {
            let idx = b * a_len + a;
            values[idx] = frame.join_all(
                power
                    .relations
                    .iter()
                    .enumerate()
                    .map(|(t_idx, tau)| frame.meet(phi.at(b, t_idx), tau.at(a))),
            );
        }
    }
    StrictRelation::new(product_ba.clone(), values)
}

/// The inverse transpose: a strict relation `theta` on `B x A` becomes the
/// morphism `phi(b, tau) = beta(b) & meet_a (theta(b, a) <-> tau(a))`.
pub fn power_untranspose(
    theta: &StrictRelation,
    b_set: &Arc<HSet>,
    power: &PowerObject,
) -> Result<HMorphism, HSetError> {
    let frame = b_set.frame().clone();
    let a_len = match power.relations.first() {
        Some(r) => r.base().len(),
        None => 0,
    };
    let k = power.relations.len();
    let mut table = vec![0; b_set.len() * k];
    for b in b_set.elements() {
        for (t_idx, tau) in power.relations.iter().enumerate() {
            let body = frame.meet_all(
                (0..a_len).map(|a| frame.iff(theta.at(b * a_len + a), tau.at(a))),
            );
            table[b * k + t_idx] = frame.meet(b_set.extent(b), body);
        }
    }
    HMorphism::new(b_set.clone(), power.object.clone(), table)
}
