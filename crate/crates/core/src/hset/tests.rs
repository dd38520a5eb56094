use std::sync::Arc;

use crate::fixtures;
use crate::frame::Frame;

use super::*;

fn s3() -> Arc<Frame> {
    fixtures::s3_arc()
}

fn b4() -> Arc<Frame> {
    fixtures::b4_arc()
}

/// Single element of extent u over S3: valid, separated, not complete.
fn single_u() -> Arc<HSet> {
    Arc::new(HSet::new(s3(), vec!["a".into()], vec![vec![1]]).unwrap())
}

/// Two partially-equal elements over S3: extents 1 and u, agreeing on u.
fn pair_s3() -> Arc<HSet> {
    Arc::new(
        HSet::new(
            s3(),
            vec!["x".into(), "y".into()],
            vec![vec![2, 1], vec![1, 1]],
        )
        .unwrap(),
    )
}

/// Two disjoint elements over B4 with extents a and b.
fn pair_b4() -> Arc<HSet> {
    Arc::new(
        HSet::new(
            b4(),
            vec!["y".into(), "z".into()],
            vec![vec![1, 0], vec![0, 2]],
        )
        .unwrap(),
    )
}

#[test]
fn validation_reports_witnesses() {
    let asym = HSet::new(
        s3(),
        vec!["a".into(), "b".into()],
        vec![vec![2, 1], vec![0, 2]],
    );
    match asym.unwrap_err() {
        HSetError::Symmetry { .. } => {}
        other => panic!("expected symmetry violation, got {other:?}"),
    }
    // transitivity: alpha(a,b)=1, alpha(b,c)=1 but alpha(a,c)=0 over S3
    let intrans = HSet::new(
        s3(),
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![2, 2, 0], vec![2, 2, 2], vec![0, 2, 2]],
    );
    match intrans.unwrap_err() {
        HSetError::Transitivity { .. } => {}
        other => panic!("expected transitivity violation, got {other:?}"),
    }
}

#[test]
fn single_u_is_separated_not_complete() {
    let a = single_u();
    assert!(a.is_separated());
    let report = a.completeness();
    assert!(!report.complete());
    // no restriction of a to 0
    assert_eq!(report.missing_restriction, Some((0, 0)));
}

#[test]
fn compose_with_identity() {
    let a = pair_s3();
    let id = HMorphism::identity(a.clone());
    assert_eq!(id.compose(&id).unwrap(), id);
    let (_, mono) = StrictRelation::new(a.clone(), vec![1, 1]).unwrap().to_mono();
    assert_eq!(mono.compose(&id).unwrap(), mono);
}

#[test]
fn associativity_on_seeded_triples() {
    let guard = SizeGuard::default();
    let a = single_u();
    let b = pair_s3();
    let homs_ab = enumerate_morphisms(&a, &b, &guard).unwrap();
    let homs_bb = enumerate_morphisms(&b, &b, &guard).unwrap();
    let mut rng = crate::rng::SplitMix64::new(7);
    for _ in 0..20 {
        let f = &homs_ab[rng.below(homs_ab.len())];
        let g = &homs_bb[rng.below(homs_bb.len())];
        let h = &homs_bb[rng.below(homs_bb.len())];
        let left = f.compose(g).unwrap().compose(h).unwrap();
        let right = f.compose(&g.compose(h).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn identity_is_iso_represented_by_identity_map() {
    let a = pair_s3();
    let id = HMorphism::identity(a.clone());
    let class = id.classify(&SizeGuard::default()).unwrap();
    assert!(class.mono && class.epi && class.iso);
    assert!(class.representing_maps.contains(&vec![0, 1]));
}

#[test]
fn strict_inclusion_is_mono_not_epi() {
    let a = pair_s3();
    // sigma strictly below the extent relation: u at both elements
    let sigma = StrictRelation::new(a.clone(), vec![1, 1]).unwrap();
    let (_, mono) = sigma.to_mono();
    assert!(mono.is_mono());
    assert!(!mono.is_epi()); // the epi criterion fails at x, whose extent is 1
}

#[test]
fn mono_epi_is_iso_with_inverse() {
    let a = pair_s3();
    let id = HMorphism::identity(a.clone());
    let inv = id.inverse().expect("identity is iso");
    assert_eq!(inv.compose(&id).unwrap(), id);
}

#[test]
fn map_representation_composes() {
    // composite of map-represented morphisms equals the representation of
    // the composed maps
    let a = pair_s3();
    let collapse = HMorphism::from_map(a.clone(), a.clone(), &[0, 0]).unwrap();
    let id_map = HMorphism::from_map(a.clone(), a.clone(), &[0, 1]).unwrap();
    let composite = collapse.compose(&id_map).unwrap();
    let direct = HMorphism::from_map(a.clone(), a, &[0, 0]).unwrap();
    assert_eq!(composite, direct);
}

#[test]
fn classification_agrees_with_categorical_definitions() {
    // mono: the kernel-pair projections coincide; epi: right cancellation
    // against the subobject classifier (which separates subobjects)
    let guard = SizeGuard::default();
    let a = single_u();
    let b = pair_s3();
    let cls = classifier(a.frame());
    let omega_homs = enumerate_morphisms(&b, &cls.omega, &guard).unwrap();
    for phi in enumerate_morphisms(&a, &b, &guard).unwrap() {
        let (_, p1, p2) = pullback(&phi, &phi).unwrap();
        assert_eq!(phi.is_mono(), p1 == p2, "mono criterion mismatch");
        let epi_by_cancellation = omega_homs.iter().all(|g| {
            omega_homs.iter().all(|h| {
                phi.compose(g).unwrap() != phi.compose(h).unwrap() || g == h
            })
        });
        assert_eq!(phi.is_epi(), epi_by_cancellation, "epi criterion mismatch");
    }
}

#[test]
fn one_sided_equality_criterion() {
    let guard = SizeGuard::default();
    for pair in [(single_u(), pair_s3()), (pair_s3(), pair_s3())] {
        let homs = enumerate_morphisms(&pair.0, &pair.1, &guard).unwrap();
        for f in &homs {
            for g in &homs {
                if f.pointwise_leq(g) {
                    assert_eq!(f, g, "pointwise <= must force equality");
                }
            }
        }
    }
}

#[test]
fn completion_of_single_u_has_two_elements() {
    let a = single_u();
    let c = completion(&a, &SizeGuard::default()).unwrap();
    // singleton values on a: 0 and u
    assert_eq!(c.completed.len(), 2);
    assert!(c.completed.is_complete());
    assert!(c.to.is_mono() && c.to.is_epi());
}

/// Chain of restrictions over S3: extents 1, u, 0 — a complete object.
fn triple_s3() -> Arc<HSet> {
    Arc::new(
        HSet::new(
            s3(),
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![2, 1, 0], vec![1, 1, 0], vec![0, 0, 0]],
        )
        .unwrap(),
    )
}

#[test]
fn completion_of_complete_object_is_bijective() {
    let a = triple_s3();
    assert!(a.is_complete());
    let c = completion(&a, &SizeGuard::default()).unwrap();
    assert_eq!(c.completed.len(), a.len());
    // the bijection is a -> sigma_a = alpha(a, -)
    for x in a.elements() {
        let sigma_x: Vec<_> = a.elements().map(|y| a.alpha(x, y)).collect();
        assert!(c.singletons.contains(&sigma_x));
    }
}

#[test]
fn completion_of_empty_carrier() {
    let empty = Arc::new(HSet::new(s3(), vec![], vec![]).unwrap());
    let c = completion(&empty, &SizeGuard::default()).unwrap();
    assert_eq!(c.completed.len(), 1);
    assert_eq!(c.completed.extent(0), 0);
}

#[test]
fn empty_product_is_terminal() {
    let frame = s3();
    let (term, legs) = product(&frame, &[]).unwrap();
    assert_eq!(term.len(), 1);
    assert_eq!(term.extent(0), frame.top());
    assert!(legs.is_empty());
}

#[test]
fn binary_product_valuation_is_pairwise_meet() {
    let a = pair_s3();
    let frame = s3();
    let (prod, legs) = product(&frame, &[a.clone(), a.clone()]).unwrap();
    assert_eq!(prod.len(), 4);
    assert_eq!(legs.len(), 2);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    assert_eq!(
                        prod.alpha(i * 2 + j, k * 2 + l),
                        frame.meet(a.alpha(i, k), a.alpha(j, l))
                    );
                }
            }
        }
    }
}

#[test]
fn pullback_of_identity_pair_recovers_alpha() {
    let a = pair_s3();
    let id = HMorphism::identity(a.clone());
    let (pb, _, _) = pullback(&id, &id).unwrap();
    // extent of (a, a') collapses to alpha(a, a'):
    // alpha(a) & alpha(a') & join_c alpha(a, c) & alpha(a', c) = alpha(a, a')
    for i in 0..a.len() {
        for j in 0..a.len() {
            assert_eq!(pb.extent(i * a.len() + j), a.alpha(i, j));
        }
    }
}

#[test]
fn universal_properties_on_small_objects() {
    let guard = SizeGuard::default();
    let frame = s3();
    let a = single_u();
    let b = pair_s3();
    let tests = vec![a.clone(), b.clone(), terminal(frame.clone())];

    let (term, _) = product(&frame, &[]).unwrap();
    verify_terminal(&term, &tests, &guard).unwrap();

    let (prod, legs) = product(&frame, &[a.clone(), a.clone()]).unwrap();
    verify_product(&prod, &legs, &tests, &guard).unwrap();

    let homs = enumerate_morphisms(&a, &b, &guard).unwrap();
    let phi = &homs[0];
    let psi = &homs[homs.len() - 1];
    let (eq, incl) = equalizer(phi, psi).unwrap();
    verify_equalizer(&eq, &incl, phi, psi, &tests, &guard).unwrap();

    let id_b = HMorphism::identity(b.clone());
    let (pb, pa, pbm) = pullback(&id_b, &id_b).unwrap();
    verify_pullback(&pb, &pa, &pbm, &id_b, &id_b, &tests, &guard).unwrap();
}

#[test]
fn subobject_round_trips() {
    let guard = SizeGuard::default();
    let a = pair_s3();
    // the top strict relation (the extent map) is the identity subobject
    let (top_obj, top_mono) = StrictRelation::top(a.clone()).to_mono();
    assert_eq!(top_obj.as_ref(), a.as_ref());
    assert_eq!(top_mono, HMorphism::identity(a.clone()));
    for sigma in StrictRelation::all(&a, &guard).unwrap() {
        let (_, mono) = sigma.to_mono();
        let rho = from_mono(&mono);
        assert_eq!(rho, sigma, "rho of iota must recover sigma");
    }
    // iota of rho is isomorphic to the original mono as a subobject
    let sigma = StrictRelation::new(a.clone(), vec![1, 1]).unwrap();
    let (sub, mono) = sigma.to_mono();
    let rho = from_mono(&mono);
    let (sub2, mono2) = rho.to_mono();
    assert_eq!(sub.names(), sub2.names());
    assert_eq!(mono.table(), mono2.table());
}

#[test]
fn subobject_heyting_ops() {
    // singleton carrier, alpha(a) = 1 over S3, sigma(a) = u, tau(a) = 0:
    // (sigma => tau)(a) = 1 & (u => 0) = 0
    let a = Arc::new(HSet::new(s3(), vec!["a".into()], vec![vec![2]]).unwrap());
    let sigma = StrictRelation::new(a.clone(), vec![1]).unwrap();
    let tau = StrictRelation::new(a.clone(), vec![0]).unwrap();
    assert_eq!(sigma.implies(&tau).at(0), 0);
    assert_eq!(StrictRelation::top(a.clone()).at(0), 2);
    assert_eq!(StrictRelation::bottom(a).at(0), 0);
}

#[test]
fn image_factorization_of_a_morphism() {
    let a = single_u();
    let b = pair_s3();
    let guard = SizeGuard::default();
    for phi in enumerate_morphisms(&a, &b, &guard).unwrap() {
        let (_, epi, mono) = image_factorization(&phi).unwrap();
        assert!(epi.is_epi());
        assert!(mono.is_mono());
        assert_eq!(epi.compose(&mono).unwrap(), phi);
    }
}

#[test]
fn change_of_base_identity_is_identity() {
    let a = pair_s3();
    let id = HMorphism::identity(a.clone());
    for sigma in StrictRelation::all(&a, &SizeGuard::default()).unwrap() {
        assert_eq!(pullback_sub(&id, &sigma), sigma);
        assert_eq!(exists_along(&id, &sigma), sigma);
        assert_eq!(forall_along(&id, &sigma), sigma);
    }
}

#[test]
fn pullback_join_and_meet_forms_agree() {
    let guard = SizeGuard::default();
    let a = single_u();
    let b = pair_s3();
    for phi in enumerate_morphisms(&b, &a, &guard).unwrap() {
        for sigma in StrictRelation::all(&a, &guard).unwrap() {
            assert_eq!(
                pullback_sub(&phi, &sigma),
                pullback_sub_meet_form(&phi, &sigma),
                "join and meet forms of the pullback must agree"
            );
        }
    }
}

#[test]
fn adjoint_triple_on_b4_pairs() {
    let guard = SizeGuard::default();
    let b = pair_b4();
    let a = Arc::new(
        HSet::new(
            b4(),
            vec!["p".into(), "q".into()],
            vec![vec![3, 0], vec![0, 3]],
        )
        .unwrap(),
    );
    for phi in enumerate_morphisms(&b, &a, &guard).unwrap() {
        let sigmas = StrictRelation::all(&a, &guard).unwrap();
        let taus = StrictRelation::all(&b, &guard).unwrap();
        for sigma in &sigmas {
            for tau in &taus {
                // exists_phi tau <= sigma  <=>  tau <= phi* sigma
                assert_eq!(
                    exists_along(&phi, tau).leq(sigma),
                    tau.leq(&pullback_sub(&phi, sigma))
                );
                // phi* sigma <= tau  <=>  sigma <= forall_phi tau
                assert_eq!(
                    pullback_sub(&phi, sigma).leq(tau),
                    sigma.leq(&forall_along(&phi, tau))
                );
            }
        }
    }
}

#[test]
fn pullback_functor_is_frame_hom() {
    let guard = SizeGuard::default();
    let a = single_u();
    let b = pair_s3();
    for phi in enumerate_morphisms(&b, &a, &guard).unwrap() {
        let sigmas = StrictRelation::all(&a, &guard).unwrap();
        let top_a = StrictRelation::top(a.clone());
        let top_b = StrictRelation::top(b.clone());
        assert_eq!(pullback_sub(&phi, &top_a), top_b);
        for s in &sigmas {
            for t in &sigmas {
                assert_eq!(
                    pullback_sub(&phi, &s.meet(t)),
                    pullback_sub(&phi, s).meet(&pullback_sub(&phi, t))
                );
                assert_eq!(
                    pullback_sub(&phi, &s.join(t)),
                    pullback_sub(&phi, s).join(&pullback_sub(&phi, t))
                );
            }
        }
    }
}

#[test]
fn subobject_lattice_distributivity() {
    let lattice = SubobjectLattice::enumerate(&pair_s3(), &SizeGuard::default()).unwrap();
    lattice.check_distributivity().unwrap();
}

#[test]
fn classifier_round_trips() {
    let frame = s3();
    let cls = classifier(&frame);
    let a = pair_s3();
    for sigma in StrictRelation::all(&a, &SizeGuard::default()).unwrap() {
        let chi = characteristic(&cls, &sigma);
        let back = sub_from_characteristic(&chi);
        assert_eq!(back, sigma, "classifier round trip must recover sigma");
    }
    // the other direction, on every morphism A -> Omega of a tiny object
    let single = single_u();
    for chi in enumerate_morphisms(&single, &cls.omega, &SizeGuard::default()).unwrap() {
        let sigma = sub_from_characteristic(&chi);
        let chi2 = characteristic(&cls, &sigma);
        assert_eq!(chi2, chi, "characteristic of the pullback must recover chi");
    }
}

#[test]
fn characteristic_of_top_formula() {
    let frame = s3();
    let cls = classifier(&frame);
    let a = pair_s3();
    let top = StrictRelation::top(a.clone());
    let chi = characteristic(&cls, &top);
    for x in a.elements() {
        for u in frame.elements() {
            assert_eq!(chi.at(x, u), frame.meet(a.extent(x), frame.iff(u, a.extent(x))));
        }
    }
}

#[test]
fn power_object_of_point_is_omega() {
    let frame = s3();
    let guard = SizeGuard::default();
    let point = terminal(frame.clone());
    let p = power_object(&point, &guard).unwrap();
    // strict relations on the point are exactly the frame elements
    assert_eq!(p.object.len(), frame.len());
    let cls = classifier(&frame);
    for (i, rel) in p.relations.iter().enumerate() {
        let u = rel.at(0);
        for (j, rel2) in p.relations.iter().enumerate() {
            let v = rel2.at(0);
            assert_eq!(p.object.alpha(i, j), cls.omega.alpha(u, v));
        }
    }
}

#[test]
fn power_object_transpose_bijection() {
    let guard = SizeGuard::default();
    let frame = s3();
    let a = single_u();
    let b = Arc::new(HSet::new(frame.clone(), vec!["b".into()], vec![vec![2]]).unwrap());
    let power = power_object(&a, &guard).unwrap();
    let (prod_ba, _) = product(&frame, &[b.clone(), a.clone()]).unwrap();

    // theta -> phi -> theta for every strict relation on B x A
    for theta in StrictRelation::all(&prod_ba, &guard).unwrap() {
        let phi = power_untranspose(&theta, &b, &power).unwrap();
        let theta2 = power_transpose(&phi, &power, &prod_ba).unwrap();
        assert_eq!(theta2, theta);
    }
    // phi -> theta -> phi for every morphism B -> P(A)
    for phi in enumerate_morphisms(&b, &power.object, &guard).unwrap() {
        let theta = power_transpose(&phi, &power, &prod_ba).unwrap();
        let phi2 = power_untranspose(&theta, &b, &power).unwrap();
        assert_eq!(phi2, phi);
    }
}

#[test]
fn power_valuation_dominates_completion_valuation() {
    // alpha-tilde <= alpha-bar on singletons, strictly when the singleton
    // is sigma_a for a non-global a
    let a = single_u();
    let guard = SizeGuard::default();
    let c = completion(&a, &guard).unwrap();
    let power = power_object(&a, &guard).unwrap();
    let frame = a.frame();
    for (i, s) in c.singletons.iter().enumerate() {
        for (j, t) in c.singletons.iter().enumerate() {
            let tilde = c.completed.alpha(i, j);
            // singletons are strict relations, so they index into the power
            // object, whose valuation is alpha-bar
            let pi = power.relations.iter().position(|r| r.values() == s.as_slice()).unwrap();
            let pj = power.relations.iter().position(|r| r.values() == t.as_slice()).unwrap();
            let bar = power.object.alpha(pi, pj);
            assert!(frame.leq(tilde, bar));
        }
    }
    // sigma_a for the non-global a of extent u: tilde = u, bar = 1
    let sigma_a: Vec<_> = a.elements().map(|x| a.alpha(0, x)).collect();
    let i = c.singletons.iter().position(|s| *s == sigma_a).unwrap();
    let pi = power.relations.iter().position(|r| r.values() == sigma_a.as_slice()).unwrap();
    let tilde = c.completed.alpha(i, i);
    let bar = power.object.alpha(pi, pi);
    assert_eq!(frame.name(tilde), "u");
    assert_eq!(bar, frame.top());
}

#[test]
fn size_guard_rejects_large_enumerations() {
    let guard = SizeGuard { max_candidates: 5 };
    let a = pair_s3();
    match StrictRelation::all(&a, &guard) {
        Err(HSetError::SizeGuard { .. }) => {}
        other => panic!("expected size guard error, got {other:?}"),
    }
}
