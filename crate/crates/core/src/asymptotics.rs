//! Finite-level orders of elementary Λ-modules, `Λ = Z_ℓ[[T]]`.
//!
//! For `X = Λ^ρ ⊕ ⊕Λ/(f_i) ⊕ ⊕Λ/(ℓ^{m_j})`, `x(n)` is the ℓ-valuation of the
//! order of `X/ω_n X` modulo `ℓ^{n+k}`, with `ω_n = (1+T)^{ℓⁿ} − 1`. The
//! parameters `(ρ, μ, λ)` are recovered from `x(n) = ρnℓⁿ + μℓⁿ + λn + ν`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, smith_normal_form, valuation, IntMatrix};
use crate::error::{Error, Result};

/// Largest `ℓⁿ` accepted by [`level_order`].
pub const LEVEL_MAX_SIZE: u64 = 1_000_000;
/// Largest `ℓⁿ` accepted by [`level_order_lattice`].
pub const LATTICE_MAX_SIZE: u64 = 125;

/// Coefficients of `(1+T)^{ℓⁿ} − 1`, constant term first.
pub fn omega_poly(ell: u64, n: u32) -> Vec<BigInt> {
    let size = ell.pow(n) as usize;
    let mut coeffs = Vec::with_capacity(size + 1);
    let mut binom = BigInt::one();
    coeffs.push(BigInt::zero());
    for i in 1..=size {
        binom = binom * BigInt::from(size - i + 1) / BigInt::from(i);
        coeffs.push(binom.clone());
    }
    coeffs
}

/// `Λ^ρ ⊕ ⊕Λ/(f_i) ⊕ ⊕Λ/(ℓ^{m_j})` with distinguished `f_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryModuleSpec {
    ell: u64,
    rho: u32,
    /// Constant term first, leading coefficient 1.
    polys: Vec<Vec<i64>>,
    mus: Vec<u32>,
}

impl ElementaryModuleSpec {
    pub fn new(ell: u64, rho: u32, polys: Vec<Vec<i64>>, mus: Vec<u32>) -> Result<Self> {
        if ell == 2 || !is_prime(ell) {
            return Err(Error::NotPrime(ell));
        }
        for f in &polys {
            if f.len() < 2 {
                return Err(Error::NotDistinguished(format!("{f:?} has degree < 1")));
            }
            if f.last() != Some(&1) {
                return Err(Error::NotDistinguished(format!("{f:?} is not monic")));
            }
            if f[..f.len() - 1].iter().any(|c| c.rem_euclid(ell as i64) != 0) {
                return Err(Error::NotDistinguished(format!(
                    "{f:?} has a lower coefficient prime to {ell}"
                )));
            }
        }
        if mus.contains(&0) {
            return Err(Error::InvalidModule("μ exponents must be positive".into()));
        }
        Ok(ElementaryModuleSpec { ell, rho, polys, mus })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn rho(&self) -> u32 {
        self.rho
    }

    pub fn polys(&self) -> &[Vec<i64>] {
        &self.polys
    }

    pub fn mus(&self) -> &[u32] {
        &self.mus
    }

    pub fn lambda(&self) -> u64 {
        self.polys.iter().map(|f| (f.len() - 1) as u64).sum()
    }

    pub fn mu(&self) -> u64 {
        self.mus.iter().map(|&m| m as u64).sum()
    }
}

fn reduce_mod(m: &mut IntMatrix, q: &BigInt) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let r = m[(i, j)].mod_floor(q);
            m[(i, j)] = r;
        }
    }
}

fn mul_mod(a: &IntMatrix, b: &IntMatrix, q: &BigInt) -> IntMatrix {
    let mut c = a * b;
    reduce_mod(&mut c, q);
    c
}

fn companion(f: &[i64]) -> IntMatrix {
    let d = f.len() - 1;
    let mut c = IntMatrix::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            c[(i + 1, i)] = BigInt::one();
        }
        c[(i, d - 1)] = BigInt::from(-f[i]);
    }
    c
}

/// ℓ-valuation of `|coker [a | q·I]|` for `q = ℓ^e`.
fn capped_cokernel_valuation(a: &IntMatrix, ell: u64, q: &BigInt) -> u64 {
    let rows = a.rows();
    let mut qi = IntMatrix::zeros(rows, rows);
    for i in 0..rows {
        qi[(i, i)] = q.clone();
    }
    smith_normal_form(&a.hconcat(&qi))
        .iter()
        .map(|d| valuation(d, ell).expect("full-rank relation lattice") as u64)
        .sum()
}

fn check_level(ell: u64, n: u32, limit: u64) -> Result<u64> {
    match ell.checked_pow(n) {
        Some(size) if size <= limit => Ok(size),
        _ => Err(Error::ScaleExceeded(format!("{ell}^{n} exceeds {limit}"))),
    }
}

/// `x(n)` with exponent `ℓⁿ`.
pub fn level_order(spec: &ElementaryModuleSpec, n: u32) -> Result<u64> {
    level_order_with_offset(spec, n, 0)
}

/// `x(n)` with exponent `ℓ^{n+k}`, from `ω_n` evaluated at companion matrices.
pub fn level_order_with_offset(spec: &ElementaryModuleSpec, n: u32, k: u32) -> Result<u64> {
    let ell = spec.ell;
    let size = check_level(ell, n, LEVEL_MAX_SIZE)?;
    let cap = (n + k) as u64;
    let q = num_traits::pow(BigInt::from(ell), (n + k) as usize);
    let mut x = spec.rho as u64 * cap * size;
    x += spec.mus.iter().map(|&m| size * cap.min(m as u64)).sum::<u64>();
    for f in &spec.polys {
        let d = f.len() - 1;
        let mut base = companion(f);
        for i in 0..d {
            base[(i, i)] += 1;
        }
        reduce_mod(&mut base, &q);
        for _ in 0..n {
            // (I + C)^{ℓ^{j+1}} = ((I + C)^{ℓ^j})^ℓ
            let mut p = IntMatrix::identity(d);
            for _ in 0..ell {
                p = mul_mod(&p, &base, &q);
            }
            base = p;
        }
        let mut acc = base;
        for i in 0..d {
            acc[(i, i)] -= 1;
        }
        x += capped_cokernel_valuation(&acc, ell, &q);
    }
    Ok(x)
}

/// `T^j·f` reduced modulo the monic `ω`, as a vector of length `deg ω`.
fn mul_by_poly_mod(f: &[i64], omega: &[BigInt], j: usize, q: &BigInt) -> Vec<BigInt> {
    let dim = omega.len() - 1;
    let mut v = vec![BigInt::zero(); dim + f.len() + j];
    for (i, &c) in f.iter().enumerate() {
        v[i + j] = BigInt::from(c);
    }
    for top in (dim..v.len()).rev() {
        let lead = std::mem::take(&mut v[top]);
        if lead.is_zero() {
            continue;
        }
        for (i, w) in omega[..dim].iter().enumerate() {
            let t = &lead * w;
            v[top - dim + i] -= t;
        }
    }
    v.truncate(dim);
    v.into_iter().map(|c| c.mod_floor(q)).collect()
}

/// `x(n)` from relation lattices in the monomial basis of `Z[T]/(ω_n)`.
pub fn level_order_lattice(spec: &ElementaryModuleSpec, n: u32, k: u32) -> Result<u64> {
    let ell = spec.ell;
    let size = check_level(ell, n, LATTICE_MAX_SIZE)? as usize;
    let q = num_traits::pow(BigInt::from(ell), (n + k) as usize);
    let omega = omega_poly(ell, n);
    let scalar = |c: &BigInt| {
        let mut m = IntMatrix::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = c.clone();
        }
        m
    };
    let mut x = spec.rho as u64 * capped_cokernel_valuation(&IntMatrix::zeros(size, 0), ell, &q);
    for &m in &spec.mus {
        let rel = scalar(&num_traits::pow(BigInt::from(ell), m as usize));
        x += capped_cokernel_valuation(&rel, ell, &q);
    }
    for f in &spec.polys {
        let cols: Vec<Vec<BigInt>> = (0..size).map(|j| mul_by_poly_mod(f, &omega, j, &q)).collect();
        x += capped_cokernel_valuation(&IntMatrix::from_columns(size, &cols), ell, &q);
    }
    Ok(x)
}

/// `x(n)` on consecutive levels `start, start+1, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelOrderTable {
    pub ell: u64,
    pub start: u32,
    pub values: Vec<u64>,
}

impl LevelOrderTable {
    pub fn new(ell: u64, start: u32, values: Vec<u64>) -> Self {
        LevelOrderTable { ell, start, values }
    }

    pub fn compute(spec: &ElementaryModuleSpec, levels: std::ops::RangeInclusive<u32>, k: u32) -> Result<Self> {
        let start = *levels.start();
        let values = levels.map(|n| level_order_with_offset(spec, n, k)).collect::<Result<_>>()?;
        Ok(LevelOrderTable { ell: spec.ell, start, values })
    }

    /// Levels `0..=n` with `n` large enough for every summand to have
    /// reached its asymptotic regime plus the stability window.
    pub fn for_fit(spec: &ElementaryModuleSpec, k: u32) -> Result<Self> {
        Self::compute(spec, 0..=fit_depth(spec), k)
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i as u32, v))
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Top level used by [`LevelOrderTable::for_fit`].
pub fn fit_depth(spec: &ElementaryModuleSpec) -> u32 {
    let max_m = spec.mus.iter().copied().max().unwrap_or(0);
    max_m.max(3) + 4
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FittedParameters {
    pub rho: u64,
    pub mu: u64,
    pub lambda: u64,
    pub nu: i64,
}

impl FittedParameters {
    /// `x(n) − (ρnℓⁿ + μℓⁿ + λn)`.
    pub fn residual(&self, ell: u64, n: u32, x: u64) -> i128 {
        let size = ell.pow(n) as i128;
        x as i128
            - (self.rho as i128 * n as i128 * size + self.mu as i128 * size + self.lambda as i128 * n as i128)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitOutcome {
    Stable(FittedParameters),
    NotYetStable,
}

fn basis_row(ell: u64, n: u32) -> [BigRational; 4] {
    let size = BigInt::from(ell).pow(n);
    let n_big = BigInt::from(n);
    [
        BigRational::from_integer(&n_big * &size),
        BigRational::from_integer(size),
        BigRational::from_integer(n_big),
        BigRational::one(),
    ]
}

/// Exact Gaussian elimination on a 4×4 system.
fn solve4(mut a: Vec<[BigRational; 4]>, mut b: Vec<BigRational>) -> Option<[BigRational; 4]> {
    for col in 0..4 {
        let pivot = (col..4).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &a[col][col];
            for c in col..4 {
                let t = &factor * &a[col][c];
                a[r][c] -= t;
            }
            let t = &factor * &b[col];
            b[r] -= t;
        }
    }
    Some([0, 1, 2, 3].map(|i| &b[i] / &a[i][i]))
}

/// Fits on the last four levels and confirms on the level before them.
pub fn fit_parameters(table: &LevelOrderTable) -> Result<FitOutcome> {
    let len = table.values.len();
    if len < 4 {
        return Err(Error::InsufficientLevels(format!("{len} levels given")));
    }
    let ell = table.ell;
    let last: Vec<(u32, u64)> = table.levels().skip(len - 4).collect();
    let rows = last.iter().map(|&(n, _)| basis_row(ell, n)).collect();
    let rhs = last.iter().map(|&(_, x)| BigRational::from_integer(BigInt::from(x))).collect();
    let Some(sol) = solve4(rows, rhs) else {
        return Ok(FitOutcome::NotYetStable);
    };
    if sol.iter().any(|r| !r.is_integer()) || sol[..3].iter().any(|r| r.is_negative()) {
        return Ok(FitOutcome::NotYetStable);
    }
    let ints: Vec<BigInt> = sol.iter().map(|r| r.to_integer()).collect();
    let (Some(rho), Some(mu), Some(lambda), Some(nu)) =
        (ints[0].to_u64(), ints[1].to_u64(), ints[2].to_u64(), ints[3].to_i64())
    else {
        return Ok(FitOutcome::NotYetStable);
    };
    let fit = FittedParameters { rho, mu, lambda, nu };
    if len < 5 {
        return Ok(FitOutcome::NotYetStable);
    }
    let (n, x) = table.levels().nth(len - 5).expect("len ≥ 5");
    if fit.residual(ell, n, x) != nu as i128 {
        return Ok(FitOutcome::NotYetStable);
    }
    Ok(FitOutcome::Stable(fit))
}
