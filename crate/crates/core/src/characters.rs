//! Characters of a finite abelian group `Δ`.
//!
//! An absolutely irreducible character is stored by its coefficient vector
//! against the invariant-factor basis: `χ(g) = Σ c_i·g_i·(e/d_i)` in `Z/e`,
//! read as the exponent of a fixed primitive `e`-th root of unity. Values
//! never leave `Z/e`, so equality is decidable and nothing is rounded.
//!
//! ℓ-adic irreducible characters are the orbits of `χ ↦ χ^ℓ`. Virtual
//! characters keep one integer multiplicity per absolute character (dense,
//! indexed like group elements) and are Frobenius-stable when multiplicities
//! are constant on every orbit.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::groups::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::splitting::FieldSpec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbsChar(pub Vec<u64>);

impl AbsChar {
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        AbsChar(vec![0; group.rank()])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    /// Value at `g` as an element of `Z/e`, `e` the group exponent.
    pub fn value_at(&self, group: &FiniteAbelianGroup, g: &GroupElement) -> u64 {
        let e = group.exponent() as u128;
        let v = self
            .0
            .iter()
            .zip(g.coords())
            .zip(group.invariant_factors())
            .map(|((&c, &x), &d)| c as u128 * x as u128 % d as u128 * (e / d as u128))
            .sum::<u128>();
        (v % e) as u64
    }

    pub fn is_trivial_on(&self, group: &FiniteAbelianGroup, sub: &Subgroup) -> bool {
        sub.generators.iter().all(|g| self.value_at(group, g) == 0)
    }

    fn as_element(&self) -> GroupElement {
        GroupElement(self.0.clone())
    }

    /// Product of characters (sum of coefficient vectors).
    pub fn mul(&self, group: &FiniteAbelianGroup, other: &AbsChar) -> AbsChar {
        AbsChar(group.add(&self.as_element(), &other.as_element()).0)
    }

    pub fn inverse(&self, group: &FiniteAbelianGroup) -> AbsChar {
        AbsChar(group.neg(&self.as_element()).0)
    }

    /// `χ ↦ χ^k`.
    pub fn power(&self, group: &FiniteAbelianGroup, k: i64) -> AbsChar {
        AbsChar(group.scale(&self.as_element(), k).0)
    }

    pub fn index(&self, group: &FiniteAbelianGroup) -> usize {
        group.index_of(&self.as_element())
    }
}

impl fmt::Display for AbsChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn abs_char_at(group: &FiniteAbelianGroup, idx: usize) -> AbsChar {
    AbsChar(group.element_at(idx).0)
}

pub fn all_abs_chars(group: &FiniteAbelianGroup) -> impl Iterator<Item = AbsChar> + '_ {
    (0..group.order() as usize).map(move |i| abs_char_at(group, i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Real,
    Imaginary,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::Real => "real",
            Parity::Imaginary => "imaginary",
        }
    }
}

/// Parity of a character at an involution `τ̄`.
pub fn parity_at(group: &FiniteAbelianGroup, chi: &AbsChar, tau_bar: &GroupElement) -> Result<Parity> {
    let e = group.exponent();
    match chi.value_at(group, tau_bar) {
        0 => Ok(Parity::Real),
        v if 2 * v == e => Ok(Parity::Imaginary),
        _ => Err(Error::TauBarNotInvolution),
    }
}

/// An ℓ-adic irreducible character: a Frobenius orbit of absolute characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadicChar {
    /// Lexicographically least member of the orbit.
    pub rep: AbsChar,
    /// Orbit members, sorted.
    pub orbit: Vec<AbsChar>,
    pub parity: Option<Parity>,
}

impl LadicChar {
    pub fn degree(&self) -> usize {
        self.orbit.len()
    }

    pub fn as_virtual(&self, group: &FiniteAbelianGroup) -> VirtualChar {
        let mut v = VirtualChar::zero(group);
        for chi in &self.orbit {
            v.mults[chi.index(group)] = 1;
        }
        v
    }
}

fn check_ell_coprime(group: &FiniteAbelianGroup, ell: u64) -> Result<()> {
    if group.order() % ell == 0 {
        Err(Error::EllDividesOrder { ell, order: group.order() })
    } else {
        Ok(())
    }
}

fn check_involution(group: &FiniteAbelianGroup, tau_bar: &GroupElement) -> Result<()> {
    group.check(tau_bar)?;
    if group.is_identity(&group.scale(tau_bar, 2)) {
        Ok(())
    } else {
        Err(Error::TauBarNotInvolution)
    }
}

/// Orbit of `chi` under `χ ↦ χ^ℓ`, sorted.
pub fn frobenius_orbit(group: &FiniteAbelianGroup, chi: &AbsChar, ell: u64) -> Vec<AbsChar> {
    let mut orbit = vec![chi.clone()];
    let mut next = chi.power(group, ell as i64);
    while &next != chi {
        orbit.push(next.clone());
        next = next.power(group, ell as i64);
    }
    orbit.sort();
    orbit
}

/// All ℓ-adic irreducible characters of `group`, ordered by representative.
pub fn all_ladic_chars(
    group: &FiniteAbelianGroup,
    ell: u64,
    tau_bar: Option<&GroupElement>,
) -> Result<Vec<LadicChar>> {
    check_ell_coprime(group, ell)?;
    if let Some(t) = tau_bar {
        check_involution(group, t)?;
    }
    let n = group.order() as usize;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    // Enumeration is lexicographic, so the first unseen member is the rep.
    for idx in 0..n {
        if seen[idx] {
            continue;
        }
        let rep = abs_char_at(group, idx);
        let orbit = frobenius_orbit(group, &rep, ell);
        for chi in &orbit {
            seen[chi.index(group)] = true;
        }
        let parity = tau_bar.map(|t| parity_at(group, &rep, t)).transpose()?;
        out.push(LadicChar { rep, orbit, parity });
    }
    Ok(out)
}

/// Integer combination of absolute characters.
#[derive(Clone, PartialEq, Eq)]
pub struct VirtualChar {
    group: FiniteAbelianGroup,
    mults: Vec<i64>,
}

impl VirtualChar {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        VirtualChar { group: group.clone(), mults: vec![0; group.order() as usize] }
    }

    /// The unit character `𝟙`.
    pub fn one(group: &FiniteAbelianGroup) -> Self {
        Self::single(group, &AbsChar::trivial(group), 1)
    }

    pub fn single(group: &FiniteAbelianGroup, chi: &AbsChar, mult: i64) -> Self {
        let mut v = Self::zero(group);
        v.mults[chi.index(group)] = mult;
        v
    }

    /// Every absolute character once.
    pub fn regular(group: &FiniteAbelianGroup) -> Self {
        VirtualChar { group: group.clone(), mults: vec![1; group.order() as usize] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn multiplicity(&self, chi: &AbsChar) -> i64 {
        self.mults[chi.index(&self.group)]
    }

    pub fn add_to(&mut self, chi: &AbsChar, delta: i64) {
        let i = chi.index(&self.group);
        self.mults[i] += delta;
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (AbsChar, i64)> + '_ {
        self.mults
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| (abs_char_at(&self.group, i), m))
    }

    pub fn is_zero(&self) -> bool {
        self.mults.iter().all(|&m| m == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.mults.iter().all(|&m| m >= 0)
    }

    /// Sum of multiplicities, i.e. the degree of the virtual character.
    pub fn degree(&self) -> i64 {
        self.mults.iter().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        VirtualChar { group: self.group.clone(), mults: self.mults.iter().map(|m| m * k).collect() }
    }

    pub fn checked_add(&self, other: &VirtualChar) -> Result<VirtualChar> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let mults = self.mults.iter().zip(&other.mults).map(|(a, b)| a + b).collect();
        Ok(VirtualChar { group: self.group.clone(), mults })
    }

    pub fn is_frobenius_stable(&self, ell: u64) -> bool {
        all_abs_chars(&self.group).all(|chi| {
            self.multiplicity(&chi) == self.multiplicity(&chi.power(&self.group, ell as i64))
        })
    }

    pub fn check_frobenius_stable(&self, ell: u64) -> Result<()> {
        if self.is_frobenius_stable(ell) {
            Ok(())
        } else {
            Err(Error::NotFrobeniusStable(ell))
        }
    }

    /// Coordinates against the ℓ-adic irreducibles `chars` (which must
    /// partition the absolute characters). Zero coefficients are dropped.
    pub fn ladic_components<'a>(
        &self,
        chars: &'a [LadicChar],
        ell: u64,
    ) -> Result<Vec<(&'a LadicChar, i64)>> {
        self.check_frobenius_stable(ell)?;
        Ok(chars
            .iter()
            .map(|phi| (phi, self.multiplicity(&phi.rep)))
            .filter(|(_, m)| *m != 0)
            .collect())
    }
}

impl Add for &VirtualChar {
    type Output = VirtualChar;
    fn add(self, rhs: &VirtualChar) -> VirtualChar {
        self.checked_add(rhs).expect("virtual characters on different groups")
    }
}

impl Sub for &VirtualChar {
    type Output = VirtualChar;
    fn sub(self, rhs: &VirtualChar) -> VirtualChar {
        self.checked_add(&-rhs).expect("virtual characters on different groups")
    }
}

impl Neg for &VirtualChar {
    type Output = VirtualChar;
    fn neg(self) -> VirtualChar {
        self.scale(-1)
    }
}

impl fmt::Debug for VirtualChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms().map(|(c, m)| format!("{m}·{c}")).collect();
        if terms.is_empty() {
            write!(f, "VirtualChar(0)")
        } else {
            write!(f, "VirtualChar({})", terms.join(" + "))
        }
    }
}

/// `Σ_χ a(χ)·b(χ)` over absolute characters.
pub fn inner_product(a: &VirtualChar, b: &VirtualChar) -> Result<i64> {
    if a.group != b.group {
        return Err(Error::GroupMismatch);
    }
    Ok(a.mults.iter().zip(&b.mults).map(|(x, y)| x * y).sum())
}

/// `Ind_D^Δ 1_D`: every absolute character trivial on `D`, once.
pub fn induce_trivial(group: &FiniteAbelianGroup, d: &Subgroup) -> Result<VirtualChar> {
    if &d.parent != group {
        return Err(Error::GroupMismatch);
    }
    let mut v = VirtualChar::zero(group);
    for (i, chi) in all_abs_chars(group).enumerate() {
        if chi.is_trivial_on(group, d) {
            v.mults[i] = 1;
        }
    }
    Ok(v)
}

/// `χ ↦ χ^{-1}` on every term.
pub fn contragredient(x: &VirtualChar) -> VirtualChar {
    let g = &x.group;
    let mut out = VirtualChar::zero(g);
    for (chi, m) in x.terms() {
        out.add_to(&chi.inverse(g), m);
    }
    out
}

/// The Teichmüller character: the action of `Δ` on `μ_ℓ`.
pub fn teichmuller(field: &FieldSpec) -> Result<LadicChar> {
    let omega = field.omega()?.clone();
    let delta = field.delta();
    let orbit = frobenius_orbit(delta, &omega, field.ell());
    debug_assert_eq!(orbit.len(), 1);
    let parity = Some(parity_at(delta, &omega, field.tau_bar())?);
    Ok(LadicChar { rep: omega, orbit, parity })
}

/// `χ ↦ ω·χ^{-1}` on every absolute term, for an explicit `ω`.
pub fn mirror_by(x: &VirtualChar, omega: &AbsChar) -> VirtualChar {
    let g = &x.group;
    let mut out = VirtualChar::zero(g);
    for (chi, m) in x.terms() {
        out.add_to(&omega.mul(g, &chi.inverse(g)), m);
    }
    out
}

/// The mirror involution `χ ↦ χ* = ω χ^{-1}` of `field`.
pub fn mirror(x: &VirtualChar, field: &FieldSpec) -> Result<VirtualChar> {
    field.require_valid()?;
    if x.group() != field.delta() {
        return Err(Error::GroupMismatch);
    }
    Ok(mirror_by(x, field.omega()?))
}

/// `x = x⊕ + x⊖` by the value of each term at `τ̄`.
pub fn parity_split(x: &VirtualChar, tau_bar: &GroupElement) -> Result<(VirtualChar, VirtualChar)> {
    let g = &x.group;
    check_involution(g, tau_bar)?;
    let mut real = VirtualChar::zero(g);
    let mut imag = VirtualChar::zero(g);
    for (chi, m) in x.terms() {
        match parity_at(g, &chi, tau_bar)? {
            Parity::Real => real.add_to(&chi, m),
            Parity::Imaginary => imag.add_to(&chi, m),
        }
    }
    Ok((real, imag))
}

/// Restriction to a subgroup, expressed on the subgroup's own
/// invariant-factor form (the `source` of [`Subgroup::structure`]).
pub fn restrict(x: &VirtualChar, sub: &Subgroup) -> Result<VirtualChar> {
    if &sub.parent != x.group() {
        return Err(Error::GroupMismatch);
    }
    let emb = sub.structure()?;
    let parent = x.group();
    let small = &emb.source;
    let e = parent.exponent();
    let mut out = VirtualChar::zero(small);
    for (chi, m) in x.terms() {
        // χ(ι(f_i)) has order dividing d'_i, i.e. it is a multiple of e/d'_i.
        let coeffs = emb
            .images
            .iter()
            .zip(small.invariant_factors())
            .map(|(img, &d)| chi.value_at(parent, img) / (e / d))
            .collect();
        out.add_to(&AbsChar(coeffs), m);
    }
    Ok(out)
}
