mod common;

use std::collections::BTreeMap;

use common::{all_subgroups, class_inner_product, groups_up_to, involutions, test_fields};
use iwalambda::characters::*;
use iwalambda::groups::{subgroup_generated, FiniteAbelianGroup, GroupElement};
use iwalambda::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ELLS: [u64; 5] = [3, 5, 7, 11, 13];

fn coprime_ells(g: &FiniteAbelianGroup) -> impl Iterator<Item = u64> + '_ {
    ELLS.into_iter().filter(|&l| g.order() % l != 0)
}

/// Orbits of `χ ↦ χ^ℓ` found by repeated exponentiation on coefficient vectors.
fn brute_orbit_degrees(g: &FiniteAbelianGroup, ell: u64) -> Vec<usize> {
    let mut left: Vec<AbsChar> = all_abs_chars(g).collect();
    let mut degrees = Vec::new();
    while let Some(chi) = left.pop() {
        let mut orbit = vec![chi.clone()];
        let mut c: Vec<u64> = chi.0.clone();
        loop {
            c = c
                .iter()
                .zip(g.invariant_factors())
                .map(|(&x, &d)| x * ell % d)
                .collect();
            if c == chi.0 {
                break;
            }
            orbit.push(AbsChar(c.clone()));
        }
        left.retain(|x| !orbit.contains(x));
        degrees.push(orbit.len());
    }
    degrees.sort();
    degrees
}

#[test]
fn orbit_degrees_match_brute_force() {
    for g in groups_up_to(24) {
        for ell in coprime_ells(&g) {
            let mut degrees: Vec<usize> =
                all_ladic_chars(&g, ell, None).unwrap().iter().map(LadicChar::degree).collect();
            degrees.sort();
            assert_eq!(degrees, brute_orbit_degrees(&g, ell), "{:?}, ℓ = {ell}", g.invariant_factors());
            assert_eq!(degrees.iter().sum::<usize>() as u64, g.order());
        }
    }
}

#[test]
fn orbit_reps_are_least_and_parity_constant() {
    for g in groups_up_to(16) {
        for ell in coprime_ells(&g) {
            for tau in involutions(&g) {
                for phi in all_ladic_chars(&g, ell, Some(&tau)).unwrap() {
                    assert_eq!(phi.rep, *phi.orbit.iter().min().unwrap());
                    let parity = phi.parity.unwrap();
                    for chi in &phi.orbit {
                        assert_eq!(parity_at(&g, chi, &tau).unwrap(), parity);
                    }
                }
            }
        }
    }
}

#[test]
fn value_at_is_a_homomorphism() {
    for g in groups_up_to(16) {
        let e = g.exponent();
        for chi in all_abs_chars(&g) {
            assert_eq!(chi.value_at(&g, &g.identity()), 0);
            for a in g.elements() {
                for b in g.elements() {
                    let lhs = chi.value_at(&g, &g.add(&a, &b));
                    assert_eq!(lhs, (chi.value_at(&g, &a) + chi.value_at(&g, &b)) % e);
                }
            }
        }
    }
}

#[test]
fn frobenius_reciprocity_on_all_subgroups() {
    for g in groups_up_to(16) {
        for ell in coprime_ells(&g).take(2) {
            let chars = all_ladic_chars(&g, ell, None).unwrap();
            for d in all_subgroups(&g) {
                let ind = induce_trivial(&g, &d).unwrap();
                let index = (g.order() / d.order()) as i64;
                let class_fn = |x: &GroupElement| if d.contains(x) { index } else { 0 };
                for phi in &chars {
                    let v = phi.as_virtual(&g);
                    let expected = if phi.rep.is_trivial_on(&g, &d) { phi.degree() as i64 } else { 0 };
                    assert_eq!(inner_product(&ind, &v).unwrap(), expected);
                    assert_eq!(class_inner_product(&g, &class_fn, &v), expected);
                }
            }
        }
    }
}

#[test]
fn restriction_counts_fibers() {
    for g in groups_up_to(16) {
        let reg = VirtualChar::regular(&g);
        for d in all_subgroups(&g) {
            let small = d.structure().unwrap().source;
            let index = (g.order() / d.order()) as i64;
            assert_eq!(restrict(&reg, &d).unwrap(), VirtualChar::regular(&small).scale(index));
            assert_eq!(restrict(&VirtualChar::one(&g), &d).unwrap(), VirtualChar::one(&small));
        }
        let full = subgroup_generated(&g, &g.elements().collect::<Vec<_>>()).unwrap();
        let small = full.structure().unwrap().source;
        assert_eq!(small.order(), g.order());
    }
}

#[test]
fn restriction_agrees_with_values() {
    // A restricted character takes the same values on the subgroup.
    for g in groups_up_to(12) {
        for d in all_subgroups(&g) {
            let emb = d.structure().unwrap();
            let small = &emb.source;
            for chi in all_abs_chars(&g) {
                let r = restrict(&VirtualChar::single(&g, &chi, 1), &d).unwrap();
                let (psi, m) = r.terms().next().unwrap();
                assert_eq!(m, 1);
                for x in small.elements() {
                    let lhs = psi.value_at(small, &x) * (g.exponent() / small.exponent().max(1));
                    assert_eq!(lhs % g.exponent(), chi.value_at(&g, &emb.apply(&x)));
                }
            }
        }
    }
}

#[test]
fn mirror_laws_on_test_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for field in test_fields() {
        let g = field.delta();
        let ell = field.ell();
        let omega = VirtualChar::single(g, field.omega().unwrap(), 1);
        let one = VirtualChar::one(g);
        assert_eq!(mirror(&one, &field).unwrap(), omega);
        assert_eq!(mirror(&omega, &field).unwrap(), one);
        for _ in 0..20 {
            let x = common::random_stable_char(&mut rng, g, ell);
            let star = mirror(&x, &field).unwrap();
            assert!(star.is_frobenius_stable(ell));
            assert_eq!(mirror(&star, &field).unwrap(), x);
        }
        for phi in all_ladic_chars(g, ell, Some(field.tau_bar())).unwrap() {
            let star = mirror(&phi.as_virtual(g), &field).unwrap();
            let (re, im) = parity_split(&star, field.tau_bar()).unwrap();
            match phi.parity.unwrap() {
                Parity::Real => assert!(re.is_zero() && im == star),
                Parity::Imaginary => assert!(im.is_zero() && re == star),
            }
        }
    }
}

#[test]
fn teichmuller_examples() {
    let k3 = iwalambda::FieldSpec::cyclotomic(3, 3).unwrap();
    let w = teichmuller(&k3).unwrap();
    assert_eq!((w.degree(), w.parity), (1, Some(Parity::Imaginary)));
    assert_ne!(w.rep, AbsChar::trivial(k3.delta()));

    // Kernel of ω on Q(ζ_15) is the image of {a ≡ 1 mod 3}.
    let k15 = iwalambda::FieldSpec::cyclotomic(3, 15).unwrap();
    let w = teichmuller(&k15).unwrap();
    for a in common::units_mod(15) {
        let v = common::char_value_on_residue(&k15, &w.rep, a as i64);
        assert_eq!(v == 0, a % 3 == 1);
    }
    let real = iwalambda::FieldSpec::new(3, 15, &[-1]).unwrap();
    assert!(matches!(teichmuller(&real), Err(Error::MissingRootsOfUnity)));
    for field in test_fields() {
        let w = teichmuller(&field).unwrap();
        assert_eq!(w.parity, Some(Parity::Imaginary));
        assert_eq!(w.degree(), 1);
    }
}

#[test]
fn parity_census() {
    // σ₋₁ on (Z/15)* splits the 8 characters 4 + 4.
    let k = iwalambda::FieldSpec::cyclotomic(3, 15).unwrap();
    let (re, im) = parity_split(&VirtualChar::regular(k.delta()), k.tau_bar()).unwrap();
    let mut census: BTreeMap<u64, i64> = BTreeMap::new();
    for chi in all_abs_chars(k.delta()) {
        *census.entry(chi.value_at(k.delta(), k.tau_bar())).or_default() += 1;
    }
    assert_eq!(census.values().copied().collect::<Vec<_>>(), vec![4, 4]);
    assert_eq!((re.degree(), im.degree()), (4, 4));
}

fn arb_group() -> impl Strategy<Value = FiniteAbelianGroup> {
    prop::sample::select(groups_up_to(40))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parity_split_is_direct(g in arb_group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taus = involutions(&g);
        let tau = &taus[(seed % taus.len() as u64) as usize];
        for ell in coprime_ells(&g).take(1) {
            let x = common::random_stable_char(&mut rng, &g, ell);
            let (re, im) = parity_split(&x, tau).unwrap();
            prop_assert_eq!(inner_product(&re, &im).unwrap(), 0);
            prop_assert_eq!(&(&re + &im), &x);
        }
    }

    #[test]
    fn contragredient_is_involution(g in arb_group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ell in coprime_ells(&g).take(1) {
            let x = common::random_stable_char(&mut rng, &g, ell);
            let y = contragredient(&x);
            prop_assert!(y.is_frobenius_stable(ell));
            prop_assert_eq!(contragredient(&y), x);
        }
    }

    #[test]
    fn ladic_components_roundtrip(g in arb_group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for ell in coprime_ells(&g).take(1) {
            let chars = all_ladic_chars(&g, ell, None).unwrap();
            let x = common::random_stable_char(&mut rng, &g, ell);
            let mut rebuilt = VirtualChar::zero(&g);
            for (phi, m) in x.ladic_components(&chars, ell).unwrap() {
                rebuilt = &rebuilt + &phi.as_virtual(&g).scale(m);
            }
            prop_assert_eq!(rebuilt, x);
        }
    }
}

#[test]
fn unstable_character_rejected() {
    let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
    let x = VirtualChar::single(&g, &AbsChar(vec![0, 1]), 1);
    assert!(!x.is_frobenius_stable(3));
    let chars = all_ladic_chars(&g, 3, None).unwrap();
    assert_eq!(x.ladic_components(&chars, 3), Err(Error::NotFrobeniusStable(3)));
}
