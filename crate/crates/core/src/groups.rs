//! Finite abelian groups in invariant-factor form, their subgroups and
//! quotients, and the unit groups `(Z/m)*` that realize `Gal(Q(ζ_m)/Q)`.
//!
//! Elements are coordinate vectors against the invariant-factor basis.
//! Enumeration order is lexicographic on coordinates, which doubles as the
//! mixed-radix index used by dense tables elsewhere in the crate.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, smith_decomposition, IntMatrix};
use crate::error::{Error, Result};

/// Upper bound on the conductor accepted by [`unit_group`].
pub const MAX_CONDUCTOR: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

impl FiniteAbelianGroup {
    /// Invariant factors `d_1 | d_2 | … | d_k`, each at least 2.
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        if let Some(&d) = factors.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidGroup(format!("invariant factor {d} < 2")));
        }
        if let Some(w) = factors.windows(2).find(|w| w[1] % w[0] != 0) {
            return Err(Error::InvalidGroup(format!("{} does not divide {}", w[0], w[1])));
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Reduce an arbitrary integer coordinate vector into the group.
    pub fn element(&self, coords: &[i64]) -> GroupElement {
        assert_eq!(coords.len(), self.rank(), "coordinate length mismatch");
        GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        )
    }

    pub fn element_from_big(&self, coords: &[BigInt]) -> GroupElement {
        assert_eq!(coords.len(), self.rank(), "coordinate length mismatch");
        GroupElement(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(c, &d)| c.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                .collect(),
        )
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.0.len() == self.rank() && g.0.iter().zip(&self.factors).all(|(&c, &d)| c < d) {
            Ok(())
        } else {
            Err(Error::InvalidElement(g.0.clone()))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&self.factors).map(|(&x, &d)| (d - x) % d).collect())
    }

    pub fn scale(&self, a: &GroupElement, k: i64) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &d)| ((x as i128 * k as i128).rem_euclid(d as i128)) as u64)
                .collect(),
        )
    }

    pub fn is_identity(&self, a: &GroupElement) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.0.iter()
            .zip(&self.factors)
            .fold(1, |acc, (&x, &d)| acc.lcm(&(d / x.gcd(&d))))
    }

    /// Mixed-radix index; agrees with the lexicographic order of [`Self::elements`].
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut coords = vec![0; self.rank()];
        for (c, &d) in coords.iter_mut().zip(&self.factors).rev() {
            *c = (idx % d as usize) as u64;
            idx /= d as usize;
        }
        GroupElement(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// Normalize `Z/n_1 × … × Z/n_k` (any orders ≥ 1) to invariant-factor form.
    pub fn from_cyclic(orders: &[u64]) -> Result<Presentation> {
        Presentation::cokernel(&IntMatrix::diagonal(
            &orders.iter().map(|&n| n as i64).collect::<Vec<_>>(),
        ))
    }
}

/// An explicit isomorphism `Z^k / (column span of relations) ≅ group`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub group: FiniteAbelianGroup,
    /// Image of the standard basis vector `e_j` of `Z^k`.
    pub basis_images: Vec<GroupElement>,
    /// A preimage in `Z^k` of each invariant-factor generator.
    pub generator_lifts: Vec<Vec<BigInt>>,
}

impl Presentation {
    /// Cokernel of an integer relation matrix; it must be finite.
    pub fn cokernel(relations: &IntMatrix) -> Result<Self> {
        let k = relations.rows();
        let dec = smith_decomposition(relations);
        let mut divisors: Vec<BigInt> = dec.divisors.clone();
        divisors.resize(k, BigInt::zero());
        if divisors.iter().any(Zero::is_zero) {
            return Err(Error::InvalidGroup("relation lattice has infinite cokernel".into()));
        }
        let kept: Vec<usize> = (0..k).filter(|&i| !divisors[i].is_one()).collect();
        let factors: Vec<u64> = kept
            .iter()
            .map(|&i| {
                divisors[i]
                    .to_u64()
                    .ok_or_else(|| Error::InvalidGroup("group order too large".into()))
            })
            .collect::<Result<_>>()?;
        let group = FiniteAbelianGroup::new(factors)?;
        let basis_images = (0..k)
            .map(|j| {
                let col: Vec<BigInt> = kept.iter().map(|&i| dec.p[(i, j)].clone()).collect();
                group.element_from_big(&col)
            })
            .collect();
        let generator_lifts = kept.iter().map(|&i| dec.p_inv.column(i)).collect();
        Ok(Presentation { group, basis_images, generator_lifts })
    }

    /// Image of an integer vector of `Z^k`.
    pub fn map(&self, v: &[i64]) -> GroupElement {
        v.iter().zip(&self.basis_images).fold(self.group.identity(), |acc, (&c, img)| {
            self.group.add(&acc, &self.group.scale(img, c))
        })
    }
}

/// A homomorphism given by the images of the source's invariant-factor generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub images: Vec<GroupElement>,
}

impl GroupHom {
    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        g.0.iter().zip(&self.images).fold(self.target.identity(), |acc, (&c, img)| {
            self.target.add(&acc, &self.target.scale(img, c as i64))
        })
    }
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub parent: FiniteAbelianGroup,
    pub generators: Vec<GroupElement>,
    /// All elements, sorted lexicographically.
    pub elements: Vec<GroupElement>,
}

impl Subgroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    /// Invariant-factor form of the subgroup together with its inclusion
    /// into the parent.
    pub fn structure(&self) -> Result<GroupHom> {
        let parent = &self.parent;
        let k = parent.rank();
        let r = self.generators.len();
        if r == 0 {
            return Ok(GroupHom {
                source: FiniteAbelianGroup::trivial(),
                target: parent.clone(),
                images: Vec::new(),
            });
        }
        // Kernel of Z^r ⊕ Z^k → Z^k, (x, y) ↦ Σ x_j g_j + diag(d) y.
        let mut m = IntMatrix::zeros(k, r + k);
        for (j, g) in self.generators.iter().enumerate() {
            for i in 0..k {
                m[(i, j)] = BigInt::from(g.0[i]);
            }
        }
        for (i, &d) in parent.invariant_factors().iter().enumerate() {
            m[(i, r + i)] = BigInt::from(d);
        }
        let dec = smith_decomposition(&m);
        let rank = dec.rank();
        let kernel_cols: Vec<Vec<BigInt>> = (rank..r + k)
            .map(|j| dec.q.column(j)[..r].to_vec())
            .collect();
        let relations = IntMatrix::from_columns(r, &kernel_cols);
        let pres = Presentation::cokernel(&relations)?;
        let images = pres
            .generator_lifts
            .iter()
            .map(|lift| {
                let coords: Vec<BigInt> = (0..k)
                    .map(|i| {
                        lift.iter()
                            .zip(&self.generators)
                            .map(|(c, g)| c * BigInt::from(g.0[i]))
                            .sum()
                    })
                    .collect();
                parent.element_from_big(&coords)
            })
            .collect();
        Ok(GroupHom { source: pres.group, target: parent.clone(), images })
    }
}

/// Smallest subgroup containing `gens`, elements in canonical order.
pub fn subgroup_generated(g: &FiniteAbelianGroup, gens: &[GroupElement]) -> Result<Subgroup> {
    for x in gens {
        g.check(x)?;
    }
    let gens: Vec<GroupElement> = gens.iter().filter(|x| !g.is_identity(x)).cloned().collect();
    let mut seen: HashSet<GroupElement> = HashSet::new();
    let mut frontier = vec![g.identity()];
    seen.insert(g.identity());
    while let Some(x) = frontier.pop() {
        for s in &gens {
            let y = g.add(&x, s);
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    let mut elements: Vec<GroupElement> = seen.into_iter().collect();
    elements.sort();
    Ok(Subgroup { parent: g.clone(), generators: gens, elements })
}

/// `G/H` in invariant-factor form and the projection `G → G/H`.
pub fn quotient(g: &FiniteAbelianGroup, h: &Subgroup) -> Result<(FiniteAbelianGroup, GroupHom)> {
    if &h.parent != g {
        return Err(Error::GroupMismatch);
    }
    let k = g.rank();
    let mut rel = IntMatrix::zeros(k, k + h.generators.len());
    for (i, &d) in g.invariant_factors().iter().enumerate() {
        rel[(i, i)] = BigInt::from(d);
    }
    for (j, x) in h.generators.iter().enumerate() {
        for i in 0..k {
            rel[(i, k + j)] = BigInt::from(x.0[i]);
        }
    }
    let pres = Presentation::cokernel(&rel)?;
    let proj = GroupHom {
        source: g.clone(),
        target: pres.group.clone(),
        images: pres.basis_images.clone(),
    };
    Ok((pres.group, proj))
}

/// `(Z/m)*` with explicit discrete logarithm and residue tables.
#[derive(Clone, Debug)]
pub struct UnitGroupModM {
    pub m: u64,
    pub group: FiniteAbelianGroup,
    residues: Vec<u64>,
    dlog: Vec<Option<u32>>,
}

impl UnitGroupModM {
    pub fn residue_of(&self, g: &GroupElement) -> u64 {
        self.residues[self.group.index_of(g)]
    }

    pub fn dlog(&self, a: i64) -> Result<GroupElement> {
        let r = a.rem_euclid(self.m as i64) as usize;
        self.dlog[r]
            .map(|idx| self.group.element_at(idx as usize))
            .ok_or(Error::NotAUnit { a, m: self.m })
    }
}

/// Build `(Z/m)*` from its CRT decomposition over prime powers.
pub fn unit_group(m: u64) -> Result<UnitGroupModM> {
    if !(2..=MAX_CONDUCTOR).contains(&m) {
        return Err(Error::ConductorTooLarge(m));
    }
    let parts = arith::factorize(m);
    let moduli: Vec<u64> = parts.iter().map(|&(p, a)| p.pow(a)).collect();
    // Cyclic components: (order, residue mod m of the generator).
    let mut cyclic: Vec<(u64, u64)> = Vec::new();
    for (idx, &(p, a)) in parts.iter().enumerate() {
        let pa = moduli[idx];
        let local_gens: Vec<(u64, i64)> = match (p, a) {
            (2, 1) => vec![],
            (2, 2) => vec![(2, -1)],
            (2, _) => vec![(2, -1), (pa / 4, 5)],
            _ => vec![(pa / p * (p - 1), arith::primitive_root_prime_power(p, a) as i64)],
        };
        for (order, local) in local_gens {
            let residues: Vec<i64> =
                (0..parts.len()).map(|j| if j == idx { local } else { 1 }).collect();
            cyclic.push((order, arith::crt(&residues, &moduli)?));
        }
    }
    let orders: Vec<u64> = cyclic.iter().map(|c| c.0).collect();
    let pres = FiniteAbelianGroup::from_cyclic(&orders)?;
    let group = pres.group.clone();

    let n = group.order() as usize;
    let mut residues = vec![0u64; n];
    let mut dlog = vec![None; m as usize];
    // Walk the product of cyclic components in mixed radix, updating the
    // residue and the group element incrementally.
    let mut counter = vec![0u64; cyclic.len()];
    let mut residue = 1 % m;
    let mut elem = group.identity();
    for _ in 0..n {
        let idx = group.index_of(&elem);
        residues[idx] = residue;
        dlog[residue as usize] = Some(idx as u32);
        for (j, &(order, gen)) in cyclic.iter().enumerate() {
            counter[j] += 1;
            residue = (residue as u128 * gen as u128 % m as u128) as u64;
            elem = group.add(&elem, &pres.basis_images[j]);
            if counter[j] < order {
                break;
            }
            counter[j] = 0;
            // gen^order = 1 and order·image = 0, so wrapping needs no correction.
        }
    }
    Ok(UnitGroupModM { m, group, residues, dlog })
}
