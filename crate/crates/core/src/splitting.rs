//! Abelian fields `K ⊂ Q(ζ_m)` and the arithmetic of primes in `K` and in
//! the cyclotomic `Z_ℓ`-tower above it.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;

use crate::arith::{self, crt, is_prime, mult_order, pow_mod, valuation};
use crate::characters::{induce_trivial, AbsChar, VirtualChar};
use crate::error::{Error, Result};
use crate::groups::{
    quotient, subgroup_generated, unit_group, FiniteAbelianGroup, GroupElement, GroupHom,
    Subgroup, UnitGroupModM,
};

/// `K` = fixed field of `H ≤ (Z/m)*`, with `Δ = Gal(K/Q) = (Z/m)*/H`.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    ell: u64,
    m: u64,
    h_gens: Vec<u64>,
    units: UnitGroupModM,
    delta: FiniteAbelianGroup,
    projection: GroupHom,
    tau_bar: GroupElement,
    contains_mu_ell: bool,
    degree_prime_to_ell: bool,
    omega: Option<AbsChar>,
}

impl FieldSpec {
    /// Builds the field data. Fields with `ℓ | [K:Q]` or without `μ_ℓ` are
    /// accepted here and rejected by [`FieldSpec::require_valid`].
    pub fn new(ell: u64, m: u64, h_gens: &[i64]) -> Result<Self> {
        if ell == 2 || !is_prime(ell) {
            return Err(Error::InvalidField(format!("ℓ = {ell} is not an odd prime")));
        }
        if m % ell != 0 {
            return Err(Error::InvalidField(format!("ℓ = {ell} does not divide m = {m}")));
        }
        let units = unit_group(m)?;
        let mut h_res = Vec::with_capacity(h_gens.len());
        let mut h_elems = Vec::with_capacity(h_gens.len());
        for &h in h_gens {
            let g = units.dlog(h).map_err(|_| {
                Error::InvalidField(format!("subgroup generator {h} is not a unit mod {m}"))
            })?;
            h_res.push(h.rem_euclid(m as i64) as u64);
            h_elems.push(g);
        }
        let h = subgroup_generated(&units.group, &h_elems)?;
        let (delta, projection) = quotient(&units.group, &h)?;
        let tau_bar = projection.apply(&units.dlog(-1)?);
        let contains_mu_ell = h_res.iter().all(|&r| r % ell == 1);
        let degree_prime_to_ell = delta.order() % ell != 0;
        let mut field = FieldSpec {
            ell,
            m,
            h_gens: h_res,
            units,
            delta,
            projection,
            tau_bar,
            contains_mu_ell,
            degree_prime_to_ell,
            omega: None,
        };
        if contains_mu_ell {
            field.omega = Some(field.find_omega()?);
        }
        Ok(field)
    }

    /// `K = Q(ζ_m)`.
    pub fn cyclotomic(ell: u64, m: u64) -> Result<Self> {
        Self::new(ell, m, &[])
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn subgroup_gens(&self) -> &[u64] {
        &self.h_gens
    }

    pub fn delta(&self) -> &FiniteAbelianGroup {
        &self.delta
    }

    pub fn tau_bar(&self) -> &GroupElement {
        &self.tau_bar
    }

    pub fn contains_mu_ell(&self) -> bool {
        self.contains_mu_ell
    }

    pub fn degree_prime_to_ell(&self) -> bool {
        self.degree_prime_to_ell
    }

    pub fn degree(&self) -> u64 {
        self.delta.order()
    }

    /// Image in `Δ` of the residue class `a`.
    pub fn frobenius_of(&self, a: i64) -> Result<GroupElement> {
        Ok(self.projection.apply(&self.units.dlog(a)?))
    }

    /// Fails unless `ℓ ∤ [K:Q]` and `μ_ℓ ⊂ K`.
    pub fn require_valid(&self) -> Result<()> {
        if !self.degree_prime_to_ell {
            return Err(Error::EllDividesOrder { ell: self.ell, order: self.delta.order() });
        }
        if !self.contains_mu_ell {
            return Err(Error::MissingRootsOfUnity);
        }
        Ok(())
    }

    /// The Teichmüller character as an absolute character of `Δ`.
    pub fn omega(&self) -> Result<&AbsChar> {
        self.omega.as_ref().ok_or(Error::MissingRootsOfUnity)
    }

    /// `σ_a ↦ a mod ℓ`, read through a fixed primitive root of `(Z/ℓ)*`.
    fn find_omega(&self) -> Result<AbsChar> {
        let ell = self.ell;
        let e = self.delta.exponent();
        if e % (ell - 1) != 0 {
            return Err(Error::MissingRootsOfUnity);
        }
        let step = e / (ell - 1);
        let root = arith::primitive_root_prime_power(ell, 1);
        let mut log = vec![0u64; ell as usize];
        let mut x = 1u64;
        for k in 0..ell - 1 {
            log[x as usize] = k;
            x = x * root % ell;
        }
        let gens: Vec<(GroupElement, u64)> = (0..self.units.group.rank())
            .map(|i| {
                let mut c = vec![0i64; self.units.group.rank()];
                c[i] = 1;
                let g = self.units.group.element(&c);
                let target = log[(self.units.residue_of(&g) % ell) as usize] * step % e;
                (self.projection.apply(&g), target)
            })
            .collect();
        crate::characters::all_abs_chars(&self.delta)
            .find(|chi| gens.iter().all(|(g, v)| chi.value_at(&self.delta, g) == *v))
            .ok_or(Error::MissingRootsOfUnity)
    }
}

/// Decomposition data of a prime `p` in `K` and in the cyclotomic tower.
#[derive(Clone, Debug)]
pub struct PrimeLocalData {
    pub p: u64,
    pub decomposition: Subgroup,
    pub inertia: Subgroup,
    /// Image of the CRT lift `σ ≡ p (mod m′)`, `σ ≡ 1 (mod p^a)`.
    pub frobenius: GroupElement,
    pub n_p: u32,
    pub weight: u64,
}

pub fn decomposition_data(field: &FieldSpec, p: u64) -> Result<PrimeLocalData> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let m = field.m;
    let mut pa = 1u64;
    while m % (pa * p) == 0 {
        pa *= p;
    }
    let m_prime = m / pa;

    let mut inertia_gens = Vec::new();
    if pa > 1 {
        for u in (1..pa).filter(|u| u % p != 0) {
            let x = crt(&[1, u as i64], &[m_prime, pa])?;
            inertia_gens.push(field.frobenius_of(x as i64)?);
        }
    }
    let inertia = subgroup_generated(&field.delta, &inertia_gens)?;
    let sigma = crt(&[(p % m_prime) as i64, 1], &[m_prime, pa])?;
    let frobenius = field.frobenius_of(sigma as i64)?;
    let mut dgens = inertia.generators.clone();
    dgens.push(frobenius.clone());
    let decomposition = subgroup_generated(&field.delta, &dgens)?;

    let n_p = if p == field.ell { 0 } else { splitting_exponent(field.ell, p)? };
    Ok(PrimeLocalData {
        p,
        decomposition,
        inertia,
        frobenius,
        n_p,
        weight: field.ell.pow(n_p),
    })
}

fn check_odd_prime(ell: u64) -> Result<()> {
    if ell == 2 || !is_prime(ell) {
        Err(Error::NotPrime(ell))
    } else {
        Ok(())
    }
}

/// `v_ℓ(p^{ℓ−1} − 1) − 1`: `ℓ^{n_p}` places of the tower lie above `p`.
pub fn splitting_exponent(ell: u64, p: u64) -> Result<u32> {
    check_odd_prime(ell)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == ell {
        return Err(Error::WildPrime);
    }
    let x = num_traits::pow(BigInt::from(p), (ell - 1) as usize) - BigInt::one();
    Ok(valuation(&x, ell)? - 1)
}

pub const ORACLE_MAX_LEVEL: u32 = 8;

/// Counts places above `p` level by level and returns the exponent at which
/// the count stops growing.
pub fn splitting_exponent_oracle(ell: u64, p: u64, n_max: u32) -> Result<u32> {
    check_odd_prime(ell)?;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == ell {
        return Err(Error::WildPrime);
    }
    if n_max > ORACLE_MAX_LEVEL {
        return Err(Error::OracleScaleExceeded(format!(
            "n_max = {n_max} exceeds {ORACLE_MAX_LEVEL}"
        )));
    }
    let mut prev = 0u32;
    for n in 0..=n_max {
        let modulus = ell.pow(n + 1);
        // Gal(Q_n/Q) is the ℓ-part of (Z/ℓ^{n+1})*; p^{ℓ−1} is the image of p there.
        let frob = pow_mod(p, ell - 1, modulus);
        let decomp = mult_order(frob as i64, modulus)?;
        let places = ell.pow(n) / decomp;
        let mut exp = 0u32;
        while ell.pow(exp) < places {
            exp += 1;
        }
        if n > 0 && exp == prev {
            return Ok(exp);
        }
        prev = exp;
    }
    Err(Error::IncreaseNMax(n_max))
}

/// Checks primality and distinctness.
pub fn check_prime_set(primes: &[u64]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !seen.insert(p) {
            return Err(Error::DuplicatePrime(p));
        }
    }
    Ok(())
}

/// Checks a prime set and that it avoids `ℓ`.
pub fn check_tame_set(ell: u64, primes: &[u64]) -> Result<()> {
    check_prime_set(primes)?;
    if primes.contains(&ell) {
        return Err(Error::WildPrimeInTameSet(ell));
    }
    Ok(())
}

/// `ℓ^{n_p}·Ind_{Δ_p}^Δ 1`, weight 1 for `p = ℓ`.
pub fn chi_p(field: &FieldSpec, p: u64) -> Result<VirtualChar> {
    let data = decomposition_data(field, p)?;
    Ok(induce_trivial(&field.delta, &data.decomposition)?.scale(data.weight as i64))
}

pub fn chi_s(field: &FieldSpec, primes: &[u64]) -> Result<VirtualChar> {
    check_prime_set(primes)?;
    let mut acc = VirtualChar::zero(&field.delta);
    for &p in primes {
        acc = &acc + &chi_p(field, p)?;
    }
    Ok(acc)
}
