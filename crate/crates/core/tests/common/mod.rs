//! Fixtures, random generators and brute-force oracles shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use iwalambda::arith::{gcd, is_prime, IntMatrix};
use iwalambda::asymptotics::ElementaryModuleSpec;
use iwalambda::characters::{all_abs_chars, AbsChar, VirtualChar};
use iwalambda::cohomology::FiniteGammaModule;
use iwalambda::groups::{subgroup_generated, unit_group, FiniteAbelianGroup, GroupElement, Subgroup};
use iwalambda::splitting::FieldSpec;
use rand::seq::SliceRandom;
use rand::Rng;

pub const PRIME_POOL: [u64; 6] = [2, 5, 7, 13, 17, 53];

/// Residues `x (mod m)` with `gcd(x, m) = 1`.
pub fn units_mod(m: u64) -> Vec<u64> {
    (1..m).filter(|&x| gcd(x, m) == 1).collect()
}

/// Multiplicative closure of `gens` in `(Z/m)*`.
pub fn residue_subgroup(m: u64, gens: &[u64]) -> BTreeSet<u64> {
    let mut set = BTreeSet::from([1 % m]);
    let mut frontier = vec![1 % m];
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = x * g % m;
            if set.insert(y) {
                frontier.push(y);
            }
        }
    }
    set
}

/// Every subgroup `H ≤ (Z/m)*` with `H ≡ 1 (mod ℓ)` and `ℓ ∤ [(Z/m)*:H]`,
/// given by generators, each subgroup once.
pub fn admissible_subgroups(ell: u64, m: u64) -> Vec<Vec<u64>> {
    let units = units_mod(m);
    let phi = units.len() as u64;
    let candidates: Vec<u64> = units.iter().copied().filter(|x| x % ell == 1).collect();
    let mut seen: BTreeSet<BTreeSet<u64>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u64>> = vec![vec![]];
    seen.insert(residue_subgroup(m, &[]));
    while let Some(gens) = stack.pop() {
        let h = residue_subgroup(m, &gens);
        if (phi / h.len() as u64) % ell != 0 {
            out.push(gens.clone());
        }
        for &c in &candidates {
            if h.contains(&c) {
                continue;
            }
            let mut more = gens.clone();
            more.push(c);
            if seen.insert(residue_subgroup(m, &more)) {
                stack.push(more);
            }
        }
    }
    out.sort();
    out
}

/// Conductor of the fixed field of `H ≤ (Z/m)*`.
pub fn conductor(m: u64, h_gens: &[u64]) -> u64 {
    let h = residue_subgroup(m, h_gens);
    (1..=m)
        .filter(|d| m % d == 0)
        .find(|&d| units_mod(m).iter().all(|&x| x % d != 1 % d || h.contains(&x)))
        .unwrap_or(m)
}

fn signed(gens: &[u64]) -> Vec<i64> {
    gens.iter().map(|&g| g as i64).collect()
}

/// Admissible fields of conductor `m` for each `m` in `conductors`.
pub fn fields_with_conductors(ell: u64, conductors: &[u64]) -> Vec<FieldSpec> {
    let mut out = Vec::new();
    for &m in conductors {
        for gens in admissible_subgroups(ell, m) {
            if conductor(m, &gens) == m {
                out.push(FieldSpec::new(ell, m, &signed(&gens)).expect("admissible field"));
            }
        }
    }
    out
}

/// The fixed list of valid fields used across the tests.
pub fn test_fields() -> Vec<FieldSpec> {
    let spec: [(u64, u64, &[i64]); 9] = [
        (3, 3, &[]),
        (3, 15, &[]),
        (3, 33, &[]),
        (3, 21, &[16]),
        (3, 39, &[16]),
        (3, 9, &[4]),
        (5, 5, &[]),
        (5, 15, &[]),
        (5, 35, &[]),
    ];
    spec.iter()
        .map(|&(ell, m, h)| FieldSpec::new(ell, m, h).expect("test field"))
        .collect()
}

/// All subsets of `pool` with at most `max_len` elements.
pub fn subsets(pool: &[u64], max_len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &p in pool {
        let extended: Vec<Vec<u64>> = out
            .iter()
            .filter(|s| s.len() < max_len)
            .map(|s| {
                let mut t = s.clone();
                t.push(p);
                t
            })
            .collect();
        out.extend(extended);
    }
    out
}

pub fn primes_below(bound: u64) -> Vec<u64> {
    (2..bound).filter(|&p| is_prime(p)).collect()
}

/// Every subgroup of `g`, found by adjoining one element at a time.
pub fn all_subgroups(g: &FiniteAbelianGroup) -> Vec<Subgroup> {
    let mut seen: BTreeSet<Vec<GroupElement>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack = vec![subgroup_generated(g, &[]).unwrap()];
    seen.insert(stack[0].elements.clone());
    while let Some(h) = stack.pop() {
        for x in g.elements() {
            if h.contains(&x) {
                continue;
            }
            let mut gens = h.generators.clone();
            gens.push(x);
            let k = subgroup_generated(g, &gens).unwrap();
            if seen.insert(k.elements.clone()) {
                stack.push(k);
            }
        }
        out.push(h);
    }
    out
}

/// Every finite abelian group of order at most `max_order`, by invariant factors.
pub fn groups_up_to(max_order: u64) -> Vec<FiniteAbelianGroup> {
    fn extend(prefix: Vec<u64>, order: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(prefix.clone());
        let last = prefix.last().copied();
        for d in 2..=max / order {
            if last.is_none_or(|l| d % l == 0) {
                let mut next = prefix.clone();
                next.push(d);
                extend(next, order * d, max, out);
            }
        }
    }
    let mut lists = Vec::new();
    extend(vec![], 1, max_order, &mut lists);
    lists.into_iter().map(|f| FiniteAbelianGroup::new(f).unwrap()).collect()
}

/// Involutions of `g`, identity included.
pub fn involutions(g: &FiniteAbelianGroup) -> Vec<GroupElement> {
    g.elements().filter(|x| g.is_identity(&g.scale(x, 2))).collect()
}

/// A random Frobenius-stable virtual character.
pub fn random_stable_char<R: Rng>(rng: &mut R, g: &FiniteAbelianGroup, ell: u64) -> VirtualChar {
    let mut x = VirtualChar::zero(g);
    let mut done = BTreeSet::new();
    for chi in all_abs_chars(g) {
        if done.contains(&chi) {
            continue;
        }
        let m: i64 = rng.gen_range(-3..=3);
        let mut c = chi.clone();
        loop {
            done.insert(c.clone());
            x.add_to(&c, m);
            c = c.power(g, ell as i64);
            if c == chi {
                break;
            }
        }
    }
    x
}

/// Integer polynomials modulo the `e`-th cyclotomic polynomial.
pub mod cyclotomic {
    /// Exact division of `a` by the monic `b`.
    fn div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut rem = a.to_vec();
        let db = b.len() - 1;
        let mut q = vec![0i64; a.len() - db];
        for i in (0..q.len()).rev() {
            let c = rem[i + db];
            q[i] = c;
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
        assert!(rem.iter().all(|&r| r == 0), "inexact division");
        q
    }

    /// `Φ_e`, constant term first.
    pub fn phi(e: u64) -> Vec<i64> {
        let mut num = vec![0i64; e as usize + 1];
        num[0] = -1;
        num[e as usize] = 1;
        for d in (1..e).filter(|d| e % d == 0) {
            num = div_exact(&num, &phi(d));
        }
        num
    }

    /// Reduce `Σ c_k x^k` modulo `Φ_e`.
    pub fn reduce(mut coeffs: Vec<i64>, e: u64) -> Vec<i64> {
        let p = phi(e);
        let d = p.len() - 1;
        for top in (d..coeffs.len()).rev() {
            let c = coeffs[top];
            if c != 0 {
                for (j, &pj) in p.iter().enumerate() {
                    coeffs[top - d + j] -= c * pj;
                }
            }
        }
        coeffs.truncate(d);
        coeffs
    }
}

/// `⟨f, x⟩` for a class function `f: Δ → Z` and a virtual character `x`,
/// evaluated in `Z[ζ_e]` from root-of-unity exponent counts.
pub fn class_inner_product(g: &FiniteAbelianGroup, f: &dyn Fn(&GroupElement) -> i64, x: &VirtualChar) -> i64 {
    let e = g.exponent();
    let mut counts = vec![0i64; e as usize];
    for elem in g.elements() {
        let fv = f(&elem);
        if fv == 0 {
            continue;
        }
        for (chi, mult) in x.terms() {
            let v = chi.value_at(g, &elem);
            counts[((e - v) % e) as usize] += fv * mult;
        }
    }
    let reduced = cyclotomic::reduce(counts, e);
    assert!(reduced[1..].iter().all(|&c| c == 0), "inner product not rational: {reduced:?}");
    let total = reduced.first().copied().unwrap_or(0);
    assert_eq!(total % g.order() as i64, 0);
    total / g.order() as i64
}

/// Random distinguished polynomial of degree `1..=3`, constant term first.
pub fn random_distinguished<R: Rng>(rng: &mut R, ell: u64) -> Vec<i64> {
    let deg = rng.gen_range(1..=3);
    let mut f: Vec<i64> = (0..deg).map(|_| ell as i64 * rng.gen_range(-3..=3)).collect();
    f.push(1);
    f
}

pub fn random_module_spec<R: Rng>(rng: &mut R) -> ElementaryModuleSpec {
    let ell = *[3u64, 5].choose(rng).unwrap();
    let rho = rng.gen_range(0..=1);
    let polys = (0..rng.gen_range(0..=2)).map(|_| random_distinguished(rng, ell)).collect();
    let mus = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=2)).collect();
    ElementaryModuleSpec::new(ell, rho, polys, mus).unwrap()
}

/// One indecomposable-ish block: `(cyclic orders, σ on them)`.
fn random_block<R: Rng>(rng: &mut R, n: u64, budget: u64) -> Option<(Vec<u64>, Vec<Vec<i64>>)> {
    if budget < 2 {
        return None;
    }
    for _ in 0..20 {
        match rng.gen_range(0..3) {
            0 => {
                let d = rng.gen_range(2..=budget.min(16));
                let units: Vec<u64> = (1..d)
                    .filter(|&u| gcd(u, d) == 1 && iwalambda::arith::pow_mod(u, n, d) == 1)
                    .collect();
                let u = *units.choose(rng)?;
                return Some((vec![d], vec![vec![u as i64]]));
            }
            1 => {
                let d = rng.gen_range(2..=4u64);
                if d.pow(n as u32) > budget {
                    continue;
                }
                let k = n as usize;
                let sigma = (0..k)
                    .map(|i| (0..k).map(|j| i64::from((j + 1) % k == i)).collect())
                    .collect();
                return Some((vec![d; k], sigma));
            }
            _ => {
                let divisors: Vec<u64> = (2..=n).filter(|d| n % d == 0 && d * d <= budget).collect();
                let Some(&d) = divisors.choose(rng) else { continue };
                return Some((vec![d, d], vec![vec![1, 1], vec![0, 1]]));
            }
        }
    }
    None
}

/// Random `C_n`-module of order at most `max_order`, `n ∈ {2, 3, 4}`.
pub fn random_gamma_module<R: Rng>(rng: &mut R, max_order: u64) -> FiniteGammaModule {
    let n = rng.gen_range(2..=4u64);
    let mut orders: Vec<u64> = Vec::new();
    let mut blocks: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut size = 1u64;
    let target = rng.gen_range(1..=3);
    while blocks.len() < target {
        let Some((o, s)) = random_block(rng, n, max_order / size) else { break };
        size *= o.iter().product::<u64>();
        orders.extend(o);
        blocks.push(s);
    }
    if orders.is_empty() {
        orders.push(2);
        blocks.push(vec![vec![1]]);
    }
    let k = orders.len();
    let mut sigma = IntMatrix::zeros(k, k);
    let mut offset = 0;
    for b in &blocks {
        for (i, row) in b.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                sigma[(offset + i, offset + j)] = v.into();
            }
        }
        offset += b.len();
    }
    FiniteGammaModule::from_cyclic_blocks(&orders, &sigma, n).expect("valid random module")
}

/// Δ-character `χ` as a class function on residues, for kernel checks.
pub fn char_value_on_residue(field: &FieldSpec, chi: &AbsChar, a: i64) -> u64 {
    chi.value_at(field.delta(), &field.frobenius_of(a).unwrap())
}

/// `(Z/m)*` order check helper.
pub fn unit_group_order(m: u64) -> u64 {
    unit_group(m).unwrap().group.order()
}
