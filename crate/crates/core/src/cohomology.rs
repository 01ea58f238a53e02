//! Ambiguous class counts and Tate cohomology of finite cyclic-group modules.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::arith::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};
use crate::groups::{quotient, subgroup_generated, FiniteAbelianGroup, GroupElement, Subgroup};

/// ℓ-valuations of the quantities in the ambiguous class number formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguousInput {
    /// `v_ℓ |Cl_K^S|`
    pub h: u64,
    /// `v_ℓ e_p(L/K)` for the primes `p ∉ S`.
    pub ram: Vec<u64>,
    /// `v_ℓ [L:K]`
    pub deg: u64,
    /// `v_ℓ (E_K^S : E_K^S ∩ N(R_L))`
    pub unit_index: u64,
}

/// `v_ℓ |(Cl_L^S)^Γ| = h + Σ ram − deg − unit_index`.
pub fn ambiguous_valuation(input: &AmbiguousInput) -> Result<u64> {
    let total = input.h as i64 + input.ram.iter().map(|&r| r as i64).sum::<i64>()
        - input.deg as i64
        - input.unit_index as i64;
    u64::try_from(total).map_err(|_| Error::InconsistentAmbiguousData(total))
}

/// A finite abelian group with an automorphism `σ` of order dividing `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGammaModule {
    module: FiniteAbelianGroup,
    /// Column `j` is `σ(e_j)` in invariant-factor coordinates.
    sigma: IntMatrix,
    order_n: u64,
}

/// Largest module handled by the enumeration oracles.
pub const ENUMERATION_MAX_ORDER: u64 = 4096;

impl FiniteGammaModule {
    pub fn new(module: FiniteAbelianGroup, sigma: IntMatrix, order_n: u64) -> Result<Self> {
        let r = module.rank();
        if sigma.rows() != r || sigma.cols() != r {
            return Err(Error::InvalidModule(format!(
                "σ is {}×{}, module has rank {r}",
                sigma.rows(),
                sigma.cols()
            )));
        }
        if order_n == 0 {
            return Err(Error::InvalidModule("group order must be positive".into()));
        }
        let d = module.invariant_factors();
        for j in 0..r {
            for i in 0..r {
                if !(&sigma[(i, j)] * BigInt::from(d[j])).is_multiple_of(&BigInt::from(d[i])) {
                    return Err(Error::InvalidModule(format!(
                        "σ(e_{j}) does not respect the relation of order {}",
                        d[j]
                    )));
                }
            }
        }
        let mut m = FiniteGammaModule { module, sigma, order_n };
        m.sigma = m.reduced(&m.sigma);
        let power = m.power(&m.sigma, order_n);
        if power != m.reduced(&IntMatrix::identity(r)) {
            return Err(Error::InvalidModule(format!("σ^{order_n} is not the identity")));
        }
        Ok(m)
    }

    /// `Z/n_1 × … × Z/n_k` with `σ` given on the cyclic coordinates.
    pub fn from_cyclic_blocks(orders: &[u64], sigma: &IntMatrix, order_n: u64) -> Result<Self> {
        let k = orders.len();
        if sigma.rows() != k || sigma.cols() != k {
            return Err(Error::InvalidModule("σ does not match the cyclic factors".into()));
        }
        for j in 0..k {
            for i in 0..k {
                if !(&sigma[(i, j)] * BigInt::from(orders[j])).is_multiple_of(&BigInt::from(orders[i]))
                {
                    return Err(Error::InvalidModule(format!(
                        "σ(e_{j}) does not respect the relation of order {}",
                        orders[j]
                    )));
                }
            }
        }
        let pres = FiniteAbelianGroup::from_cyclic(orders)?;
        let cols: Vec<Vec<BigInt>> = pres
            .generator_lifts
            .iter()
            .map(|lift| {
                let image: Vec<i64> = sigma
                    .mul_vec(lift)
                    .iter()
                    .zip(orders)
                    .map(|(x, &n)| x.mod_floor(&BigInt::from(n)).to_i64().expect("small"))
                    .collect();
                pres.map(&image).0.into_iter().map(BigInt::from).collect()
            })
            .collect();
        let r = pres.group.rank();
        Self::new(pres.group, IntMatrix::from_columns(r, &cols), order_n)
    }

    pub fn module(&self) -> &FiniteAbelianGroup {
        &self.module
    }

    pub fn sigma(&self) -> &IntMatrix {
        &self.sigma
    }

    pub fn order_n(&self) -> u64 {
        self.order_n
    }

    /// Row `i` reduced modulo the `i`-th invariant factor.
    fn reduced(&self, a: &IntMatrix) -> IntMatrix {
        let mut out = a.clone();
        for (i, &d) in self.module.invariant_factors().iter().enumerate() {
            let d = BigInt::from(d);
            for j in 0..a.cols() {
                out[(i, j)] = a[(i, j)].mod_floor(&d);
            }
        }
        out
    }

    fn power(&self, a: &IntMatrix, mut exp: u64) -> IntMatrix {
        let mut base = a.clone();
        let mut acc = self.reduced(&IntMatrix::identity(a.rows()));
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.reduced(&(&acc * &base));
            }
            base = self.reduced(&(&base * &base));
            exp >>= 1;
        }
        acc
    }

    pub fn apply(&self, a: &IntMatrix, x: &GroupElement) -> GroupElement {
        let v: Vec<BigInt> = x.coords().iter().map(|&c| BigInt::from(c)).collect();
        self.module.element_from_big(&a.mul_vec(&v))
    }

    pub fn act(&self, x: &GroupElement) -> GroupElement {
        self.apply(&self.sigma, x)
    }

    /// `σ − 1`
    pub fn augmentation(&self) -> IntMatrix {
        let mut a = self.sigma.clone();
        for i in 0..a.rows() {
            a[(i, i)] -= 1;
        }
        self.reduced(&a)
    }

    /// `Σ_{i<n} σ^i`
    pub fn norm(&self) -> IntMatrix {
        let r = self.module.rank();
        let mut acc = IntMatrix::zeros(r, r);
        let mut p = IntMatrix::identity(r);
        for _ in 0..self.order_n {
            for i in 0..r {
                for j in 0..r {
                    acc[(i, j)] += &p[(i, j)];
                }
            }
            p = self.reduced(&(&p * &self.sigma));
        }
        self.reduced(&acc)
    }

    /// `|ker a|` for an endomorphism, as `|coker [a | diag(d)]|`.
    fn kernel_order(&self, a: &IntMatrix) -> u64 {
        let d: Vec<i64> = self.module.invariant_factors().iter().map(|&x| x as i64).collect();
        let rel = a.hconcat(&IntMatrix::diagonal(&d));
        smith_normal_form(&rel)
            .iter()
            .fold(BigInt::one(), |acc, x| acc * x)
            .to_u64()
            .expect("kernel order bounded by the module order")
    }

    /// Smallest σ-stable submodule containing `gens`.
    pub fn stable_closure(&self, gens: &[GroupElement]) -> Result<Subgroup> {
        let mut sub = subgroup_generated(&self.module, gens)?;
        loop {
            let mut more = sub.generators.clone();
            more.extend(sub.generators.iter().map(|g| self.act(g)));
            let next = subgroup_generated(&self.module, &more)?;
            if next.order() == sub.order() {
                return Ok(sub);
            }
            sub = next;
        }
    }

    /// `N` with the restricted action, for a σ-stable `N`.
    pub fn submodule(&self, sub: &Subgroup) -> Result<FiniteGammaModule> {
        self.check_stable(sub)?;
        let emb = sub.structure()?;
        let lookup: HashMap<GroupElement, GroupElement> =
            emb.source.elements().map(|x| (emb.apply(&x), x)).collect();
        let cols = emb
            .images
            .iter()
            .map(|g| {
                lookup[&self.act(g)].0.iter().map(|&c| BigInt::from(c)).collect()
            })
            .collect::<Vec<Vec<BigInt>>>();
        Self::new(emb.source.clone(), IntMatrix::from_columns(emb.source.rank(), &cols), self.order_n)
    }

    /// `M/N` with the induced action, for a σ-stable `N`.
    pub fn quotient_module(&self, sub: &Subgroup) -> Result<FiniteGammaModule> {
        self.check_stable(sub)?;
        let (q, proj) = quotient(&self.module, sub)?;
        let mut lifts: HashMap<GroupElement, GroupElement> = HashMap::new();
        for x in self.module.elements() {
            lifts.entry(proj.apply(&x)).or_insert(x);
        }
        let r = q.rank();
        let cols = (0..r)
            .map(|i| {
                let mut c = vec![0i64; r];
                c[i] = 1;
                let lift = &lifts[&q.element(&c)];
                proj.apply(&self.act(lift)).0.iter().map(|&c| BigInt::from(c)).collect()
            })
            .collect::<Vec<Vec<BigInt>>>();
        Self::new(q, IntMatrix::from_columns(r, &cols), self.order_n)
    }

    fn check_stable(&self, sub: &Subgroup) -> Result<()> {
        if sub.parent != self.module {
            return Err(Error::GroupMismatch);
        }
        if sub.generators.iter().all(|g| sub.contains(&self.act(g))) {
            Ok(())
        } else {
            Err(Error::InvalidModule("submodule is not σ-stable".into()))
        }
    }
}

/// `|ker N / im(σ − 1)|`.
pub fn tate_h1(m: &FiniteGammaModule) -> u64 {
    let ker_norm = m.kernel_order(&m.norm());
    let ker_aug = m.kernel_order(&m.augmentation());
    // |im(σ − 1)| = |M| / |ker(σ − 1)|
    ker_norm * ker_aug / m.module.order()
}

/// `|ker(σ − 1) / im N|`.
pub fn tate_h0(m: &FiniteGammaModule) -> u64 {
    let ker_norm = m.kernel_order(&m.norm());
    let ker_aug = m.kernel_order(&m.augmentation());
    ker_aug * ker_norm / m.module.order()
}

pub fn herbrand_quotient(m: &FiniteGammaModule) -> BigRational {
    BigRational::new(BigInt::from(tate_h0(m)), BigInt::from(tate_h1(m)))
}

struct Census {
    ker_norm: usize,
    ker_aug: usize,
    im_norm: usize,
    im_aug: usize,
}

fn census(m: &FiniteGammaModule) -> Result<Census> {
    if m.module.order() > ENUMERATION_MAX_ORDER {
        return Err(Error::OracleScaleExceeded(format!(
            "module of order {} exceeds {ENUMERATION_MAX_ORDER}",
            m.module.order()
        )));
    }
    let g = &m.module;
    let mut ker_norm = 0;
    let mut ker_aug = 0;
    let mut im_norm = BTreeSet::new();
    let mut im_aug = BTreeSet::new();
    for x in g.elements() {
        let mut orbit_sum = g.identity();
        let mut y = x.clone();
        for _ in 0..m.order_n {
            orbit_sum = g.add(&orbit_sum, &y);
            y = m.act(&y);
        }
        let diff = g.add(&m.act(&x), &g.neg(&x));
        ker_norm += usize::from(g.is_identity(&orbit_sum));
        ker_aug += usize::from(g.is_identity(&diff));
        im_norm.insert(orbit_sum);
        im_aug.insert(diff);
    }
    Ok(Census { ker_norm, ker_aug, im_norm: im_norm.len(), im_aug: im_aug.len() })
}

/// `|H¹|` by listing every element.
pub fn tate_h1_enumerated(m: &FiniteGammaModule) -> Result<u64> {
    let c = census(m)?;
    Ok((c.ker_norm / c.im_aug) as u64)
}

/// `|Ĥ⁰|` by listing every element.
pub fn tate_h0_enumerated(m: &FiniteGammaModule) -> Result<u64> {
    let c = census(m)?;
    Ok((c.ker_aug / c.im_norm) as u64)
}

impl FiniteGammaModule {
    /// Trivial action of `C_n` on `Z/d`.
    pub fn trivial_cyclic(d: u64, n: u64) -> Result<Self> {
        Self::from_cyclic_blocks(&[d], &IntMatrix::identity(1), n)
    }

    /// `C_n` acting on `Z/d` by multiplication with `u`.
    pub fn scalar_cyclic(d: u64, u: i64, n: u64) -> Result<Self> {
        Self::from_cyclic_blocks(&[d], &IntMatrix::from_rows(&[vec![u]]), n)
    }
}

impl std::fmt::Display for FiniteGammaModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "C_{} acting on {:?}", self.order_n, self.module.invariant_factors())
    }
}
