//! Defect characters and λ-shift predictions.
//!
//! The absolute invariants `λ_L^{∅,±}` are not computable from the field
//! data alone, so λ-values are affine expressions: integer combinations of
//! four formal base symbols plus a computed virtual character.

use std::collections::BTreeMap;
use std::fmt;

use crate::characters::{
    all_ladic_chars, mirror, parity_split, LadicChar, Parity, VirtualChar,
};
use crate::error::{Error, Result};
use crate::groups::FiniteAbelianGroup;
use crate::splitting::{
    check_prime_set, check_tame_set, chi_s, decomposition_data, FieldSpec, PrimeLocalData,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseSymbol {
    /// `λ_L^{∅⊕}`
    Real,
    /// `λ_L^{∅⊖}`
    Imaginary,
    MirrorReal,
    MirrorImaginary,
}

impl BaseSymbol {
    pub fn mirror(self) -> Self {
        match self {
            BaseSymbol::Real => BaseSymbol::MirrorReal,
            BaseSymbol::Imaginary => BaseSymbol::MirrorImaginary,
            BaseSymbol::MirrorReal => BaseSymbol::Real,
            BaseSymbol::MirrorImaginary => BaseSymbol::Imaginary,
        }
    }

    pub fn parity(self) -> Parity {
        match self {
            BaseSymbol::Real | BaseSymbol::MirrorImaginary => Parity::Real,
            BaseSymbol::Imaginary | BaseSymbol::MirrorReal => Parity::Imaginary,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BaseSymbol::Real => "lambda_L+",
            BaseSymbol::Imaginary => "lambda_L-",
            BaseSymbol::MirrorReal => "mirror(lambda_L+)",
            BaseSymbol::MirrorImaginary => "mirror(lambda_L-)",
        }
    }
}

/// `Σ c_B·B + shift`.
#[derive(Clone, PartialEq, Eq)]
pub struct LambdaExpr {
    base: BTreeMap<BaseSymbol, i64>,
    pub shift: VirtualChar,
}

impl LambdaExpr {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        LambdaExpr { base: BTreeMap::new(), shift: VirtualChar::zero(group) }
    }

    pub fn new(base: &[(BaseSymbol, i64)], shift: VirtualChar) -> Self {
        let mut e = LambdaExpr { base: BTreeMap::new(), shift };
        for &(b, c) in base {
            e.add_base(b, c);
        }
        e
    }

    fn add_base(&mut self, b: BaseSymbol, c: i64) {
        let entry = self.base.entry(b).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.base.remove(&b);
        }
    }

    /// The λ_L^∅ = λ_L^{∅⊕} + λ_L^{∅⊖} expression with zero shift.
    pub fn base_lambda(group: &FiniteAbelianGroup) -> Self {
        Self::new(&[(BaseSymbol::Real, 1), (BaseSymbol::Imaginary, 1)], VirtualChar::zero(group))
    }

    /// Nonzero base coefficients in symbol order.
    pub fn base_terms(&self) -> impl Iterator<Item = (BaseSymbol, i64)> + '_ {
        self.base.iter().map(|(&b, &c)| (b, c))
    }

    pub fn base_coefficient(&self, b: BaseSymbol) -> i64 {
        self.base.get(&b).copied().unwrap_or(0)
    }

    pub fn plus(&self, other: &LambdaExpr) -> LambdaExpr {
        let mut out = self.clone();
        for (b, c) in other.base_terms() {
            out.add_base(b, c);
        }
        out.shift = &out.shift + &other.shift;
        out
    }

    pub fn plus_char(&self, x: &VirtualChar) -> LambdaExpr {
        LambdaExpr { base: self.base.clone(), shift: &self.shift + x }
    }

    pub fn minus_char(&self, x: &VirtualChar) -> LambdaExpr {
        LambdaExpr { base: self.base.clone(), shift: &self.shift - x }
    }

    /// Termwise mirror.
    pub fn mirror(&self, field: &FieldSpec) -> Result<LambdaExpr> {
        let mut out = LambdaExpr { base: BTreeMap::new(), shift: mirror(&self.shift, field)? };
        for (b, c) in self.base_terms() {
            out.add_base(b.mirror(), c);
        }
        Ok(out)
    }
}

impl fmt::Debug for LambdaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> =
            self.base_terms().map(|(b, c)| format!("{c}·{}", b.label())).collect();
        write!(f, "LambdaExpr[{}] + {:?}", terms.join(" + "), self.shift)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    /// `ℓ ∈ S`, `T = ∅`.
    Special,
    /// `ℓ ∈ T`.
    Torsion,
    /// `ℓ ∈ S`, `T ≠ ∅`.
    WildMirror,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::Special => "SPECIAL",
            CaseTag::Torsion => "TORSION",
            CaseTag::WildMirror => "WILD_MIRROR",
        }
    }
}

fn local_data(field: &FieldSpec, primes: &[u64]) -> Result<Vec<PrimeLocalData>> {
    primes.iter().map(|&p| decomposition_data(field, p)).collect()
}

fn imaginary_chars(field: &FieldSpec) -> Result<Vec<LadicChar>> {
    Ok(all_ladic_chars(field.delta(), field.ell(), Some(field.tau_bar()))?
        .into_iter()
        .filter(|phi| phi.parity == Some(Parity::Imaginary))
        .collect())
}

fn s_phi_from<'a>(
    field: &FieldSpec,
    data: &'a [PrimeLocalData],
    phi: &LadicChar,
) -> Vec<&'a PrimeLocalData> {
    data.iter()
        .filter(|d| phi.rep.is_trivial_on(field.delta(), &d.decomposition))
        .collect()
}

/// Primes `p ∈ S` with `φ(Δ_p) = 1`, in the order given.
pub fn s_phi(field: &FieldSpec, primes: &[u64], phi: &LadicChar) -> Result<Vec<u64>> {
    check_tame_set(field.ell(), primes)?;
    let data = local_data(field, primes)?;
    Ok(s_phi_from(field, &data, phi).into_iter().map(|d| d.p).collect())
}

/// Per imaginary `φ` with `S_φ ≠ ∅`: `(φ, Σ_{S_φ} ℓ^{n_p}, ℓ^{max n_p})`.
fn imaginary_weights(field: &FieldSpec, primes: &[u64]) -> Result<Vec<(LadicChar, i64, i64)>> {
    field.require_valid()?;
    check_tame_set(field.ell(), primes)?;
    let data = local_data(field, primes)?;
    let mut out = Vec::new();
    for phi in imaginary_chars(field)? {
        let sp = s_phi_from(field, &data, &phi);
        if sp.is_empty() {
            continue;
        }
        let total: i64 = sp.iter().map(|d| d.weight as i64).sum();
        let top = sp.iter().map(|d| d.weight as i64).max().unwrap_or(0);
        out.push((phi, total, top));
    }
    Ok(out)
}

/// `Σ^⊖_{φ, S_φ ≠ ∅} ℓ^{max_{p∈S_φ} n_p}·φ`.
pub fn defect_character(field: &FieldSpec, primes: &[u64]) -> Result<VirtualChar> {
    let delta = field.delta();
    let mut acc = VirtualChar::zero(delta);
    for (phi, _, top) in imaginary_weights(field, primes)? {
        acc = &acc + &phi.as_virtual(delta).scale(top);
    }
    Ok(acc)
}

pub const DEFECT_ORACLE_MAX_LEVEL: u32 = 4;

/// Counts characters of `Δ × Z/ℓ^{n₀}` trivial on some level-`n₀`
/// decomposition group `G_p`, grouped by their restriction to `Δ`.
pub fn defect_oracle(field: &FieldSpec, primes: &[u64]) -> Result<VirtualChar> {
    field.require_valid()?;
    check_tame_set(field.ell(), primes)?;
    let delta = field.delta();
    let data = local_data(field, primes)?;
    let n0 = data.iter().map(|d| d.n_p).max().unwrap_or(0);
    if n0 > DEFECT_ORACLE_MAX_LEVEL {
        return Err(Error::OracleScaleExceeded(format!(
            "defect oracle level {n0} exceeds {DEFECT_ORACLE_MAX_LEVEL}"
        )));
    }
    let ell = field.ell();
    let tower = ell.pow(n0);
    let mut orders: Vec<u64> = delta.invariant_factors().to_vec();
    orders.push(tower);
    let pres = FiniteAbelianGroup::from_cyclic(&orders)?;
    let big = &pres.group;
    let k = delta.rank();
    let lift = |coords: &[u64], j: u64| {
        let mut v: Vec<i64> = coords.iter().map(|&c| c as i64).collect();
        v.push(j as i64);
        pres.map(&v)
    };

    let mut gp_gens = Vec::new();
    for d in &data {
        let mut gens: Vec<_> = d.inertia.generators.iter().map(|g| lift(g.coords(), 0)).collect();
        gens.push(lift(d.frobenius.coords(), d.weight % tower));
        gp_gens.push(gens);
    }
    let delta_basis: Vec<_> = (0..k)
        .map(|i| {
            let mut c = vec![0u64; k];
            c[i] = 1;
            lift(&c, 0)
        })
        .collect();

    let big_e = big.exponent();
    let mut result = VirtualChar::zero(delta);
    for theta in crate::characters::all_abs_chars(big) {
        let hit = gp_gens
            .iter()
            .any(|gens| gens.iter().all(|g| theta.value_at(big, g) == 0));
        if !hit {
            continue;
        }
        let chi = crate::characters::AbsChar(
            delta_basis
                .iter()
                .zip(delta.invariant_factors())
                .map(|(b, &d)| theta.value_at(big, b) * d / big_e)
                .collect(),
        );
        if crate::characters::parity_at(delta, &chi, field.tau_bar())? == Parity::Imaginary {
            result.add_to(&chi, 1);
        }
    }
    Ok(result)
}

/// `λ_T^{S⊕}` for `T ⊇ L` and tame `S`.
pub fn lambda_shift_real(field: &FieldSpec, primes: &[u64]) -> Result<LambdaExpr> {
    let delta = field.delta();
    let mut shift = VirtualChar::zero(delta);
    for (phi, total, top) in imaginary_weights(field, primes)? {
        if total != top {
            shift = &shift + &mirror(&phi.as_virtual(delta), field)?.scale(total - top);
        }
    }
    Ok(LambdaExpr::new(&[(BaseSymbol::Real, 1)], shift))
}

/// `λ_T^{S⊖} = λ_L^{∅⊖} + (χ_S^⊕ − 1)*` for `T ⊇ L` and tame `S`. At
/// `S = ∅` the formula is evaluated literally, giving shift `−ω`.
pub fn lambda_shift_imaginary(field: &FieldSpec, primes: &[u64]) -> Result<LambdaExpr> {
    field.require_valid()?;
    check_tame_set(field.ell(), primes)?;
    let delta = field.delta();
    let (real, _) = parity_split(&chi_s(field, primes)?, field.tau_bar())?;
    let shift = mirror(&(&real - &VirtualChar::one(delta)), field)?;
    Ok(LambdaExpr::new(&[(BaseSymbol::Imaginary, 1)], shift))
}

/// `λ_T^S = (λ_L^∅ + (χ_S − 1))*` for `S ∋ ℓ`.
pub fn lambda_wild(field: &FieldSpec, primes: &[u64]) -> Result<LambdaExpr> {
    field.require_valid()?;
    check_prime_set(primes)?;
    if !primes.contains(&field.ell()) {
        return Err(Error::WildCaseRequiresEll);
    }
    let delta = field.delta();
    let inner = LambdaExpr::base_lambda(delta)
        .plus_char(&chi_s(field, primes)?)
        .minus_char(&VirtualChar::one(delta));
    inner.mirror(field)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kappa {
    pub case: CaseTag,
    pub value: VirtualChar,
}

fn check_reflection_sets(field: &FieldSpec, s: &[u64], t: &[u64]) -> Result<()> {
    check_prime_set(s)?;
    check_prime_set(t)?;
    if let Some(p) = s.iter().find(|p| t.contains(p)) {
        return Err(Error::ReflectionHypotheses(format!("{p} lies in both S and T")));
    }
    let ell = field.ell();
    if !s.contains(&ell) && !t.contains(&ell) {
        return Err(Error::ReflectionHypotheses(format!("ℓ = {ell} lies in neither S nor T")));
    }
    Ok(())
}

/// `κ_T^S`, resolved by case.
pub fn kappa(field: &FieldSpec, s: &[u64], t: &[u64]) -> Result<Kappa> {
    field.require_valid()?;
    check_reflection_sets(field, s, t)?;
    let delta = field.delta();
    if t.contains(&field.ell()) {
        Ok(Kappa { case: CaseTag::Torsion, value: VirtualChar::zero(delta) })
    } else if t.is_empty() {
        Ok(Kappa { case: CaseTag::Special, value: -&VirtualChar::one(delta) })
    } else {
        Ok(Kappa { case: CaseTag::WildMirror, value: defect_character(field, t)? })
    }
}

/// `λ_S^T` when the subscript set `S` contains `ℓ` and `T` is tame.
fn lambda_with_wild_subscript(field: &FieldSpec, t: &[u64]) -> Result<LambdaExpr> {
    if t.is_empty() {
        // λ_S^∅ = λ_L^∅ by convention.
        return Ok(LambdaExpr::base_lambda(field.delta()));
    }
    Ok(lambda_shift_real(field, t)?.plus(&lambda_shift_imaginary(field, t)?))
}

/// Both sides of `λ_S^T − κ_S^T + (χ_S − 1) = (λ_T^S − κ_T^S + (χ_T − 1))*`.
#[derive(Clone, Debug)]
pub struct ReflectionReport {
    /// Case of `κ_T^S`.
    pub case: CaseTag,
    pub kappa_st: VirtualChar,
    pub kappa_ts: VirtualChar,
    pub lhs: LambdaExpr,
    pub rhs: LambdaExpr,
    pub holds: bool,
}

pub fn reflection_check(field: &FieldSpec, s: &[u64], t: &[u64]) -> Result<ReflectionReport> {
    field.require_valid()?;
    check_reflection_sets(field, s, t)?;
    let delta = field.delta();
    let one = VirtualChar::one(delta);
    let ell = field.ell();

    // λ with superscript `sup` and subscript `sub`.
    let lambda = |sup: &[u64], sub: &[u64]| -> Result<LambdaExpr> {
        if sup.contains(&ell) {
            lambda_wild(field, sup)
        } else {
            debug_assert!(sub.contains(&ell));
            lambda_with_wild_subscript(field, sup)
        }
    };
    let k_st = kappa(field, s, t)?;
    let k_ts = kappa(field, t, s)?;

    let lhs = lambda(t, s)?
        .minus_char(&k_ts.value)
        .plus_char(&(&chi_s(field, s)? - &one));
    let rhs = lambda(s, t)?
        .minus_char(&k_st.value)
        .plus_char(&(&chi_s(field, t)? - &one))
        .mirror(field)?;
    let holds = lhs == rhs;
    Ok(ReflectionReport {
        case: k_st.case,
        kappa_st: k_st.value,
        kappa_ts: k_ts.value,
        lhs,
        rhs,
        holds,
    })
}

/// λ-shift of `Q_∞` for `Q(ζ_ℓ)` from congruences alone.
pub fn imo_lambda(ell: u64, primes: &[u64]) -> Result<u64> {
    if ell == 2 || !crate::arith::is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    check_tame_set(ell, primes)?;
    let weights: Vec<u64> = primes
        .iter()
        .filter(|&&p| p % ell == 1)
        .map(|&p| crate::splitting::splitting_exponent(ell, p).map(|n| ell.pow(n)))
        .collect::<Result<_>>()?;
    match weights.iter().max() {
        None => Ok(0),
        Some(&top) => Ok(weights.iter().sum::<u64>() - top),
    }
}
