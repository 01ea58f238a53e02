//! Exact integer utilities: ℓ-adic valuations, multiplicative orders, CRT
//! and Smith normal form over arbitrary-precision integers.

mod matrix;
mod snf;

pub use matrix::IntMatrix;
pub use snf::{smith_decomposition, smith_normal_form, SmithDecomposition};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Largest `k` with `ell^k | x`.
pub fn valuation(x: &BigInt, ell: u64) -> Result<u32> {
    if x.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let ell = BigInt::from(ell);
    let mut x = x.abs();
    let mut k = 0;
    loop {
        let (q, r) = x.div_rem(&ell);
        if !r.is_zero() {
            return Ok(k);
        }
        x = q;
        k += 1;
    }
}

/// Valuation with `0` read as infinitely divisible, capped at `cap`.
pub fn capped_valuation(x: &BigInt, ell: u64, cap: u32) -> u32 {
    if x.is_zero() {
        cap
    } else {
        valuation(x, ell).map_or(cap, |v| v.min(cap))
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, as `(p, e)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m = m as u128;
    let mut b = base as u128 % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Least `k ≥ 1` with `a^k ≡ 1 (mod m)`.
pub fn mult_order(a: i64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidGroup(format!("modulus {m} must be at least 2")));
    }
    let r = a.rem_euclid(m as i64) as u64;
    if gcd(r, m) != 1 {
        return Err(Error::NotAUnit { a, m });
    }
    // Shrink the exponent of (Z/m)* prime by prime.
    let mut order = euler_phi(m);
    for (q, _) in factorize(order) {
        while order % q == 0 && pow_mod(r, order / q, m) == 1 {
            order /= q;
        }
    }
    Ok(order)
}

/// Solve `x ≡ r_i (mod m_i)` for pairwise coprime moduli; returns `x` in `[0, Π m_i)`.
pub fn crt(residues: &[i64], moduli: &[u64]) -> Result<u64> {
    assert_eq!(residues.len(), moduli.len(), "residue/modulus length mismatch");
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (&r, &mi) in residues.iter().zip(moduli) {
        let mi_big = BigInt::from(mi);
        let g = m.extended_gcd(&mi_big);
        if !g.gcd.is_one() {
            return Err(Error::InvalidGroup(format!("CRT moduli not coprime: {mi}")));
        }
        // x + m·t ≡ r (mod mi)  =>  t ≡ (r - x)·m^{-1}
        let t = ((BigInt::from(r) - &x) * &g.x).mod_floor(&mi_big);
        x += &m * t;
        m *= mi_big;
        x = x.mod_floor(&m);
    }
    Ok(u64::try_from(x).expect("CRT result fits the product of u64 moduli"))
}

/// Smallest primitive root modulo `p^a` for an odd prime `p`.
pub fn primitive_root_prime_power(p: u64, a: u32) -> u64 {
    debug_assert!(p > 2 && is_prime(p));
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    let mut g = 2;
    while !factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1) {
        g += 1;
    }
    if a >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}
