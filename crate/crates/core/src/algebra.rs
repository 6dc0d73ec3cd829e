//! Elements of the chromatic algebra in the partition basis.
//!
//! Products follow the stacking convention: in `x * y` the diagram of `x` is
//! placed on top of the diagram of `y`.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::beta;
use crate::error::{Error, Result};
use crate::ncpartition::{enumerate_basis_capped, Partition};
use crate::qscalar::RationalFunction;
use crate::rewrite::normalize;

/// Orientation tag written into every serialized element and table.
pub const CONVENTION: &str = "first-factor-on-top";

pub const DEFAULT_MAX_TABLE_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    n: usize,
    terms: BTreeMap<Partition, RationalFunction>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::basis(Partition::identity(n))
    }

    pub fn basis(p: Partition) -> Self {
        let n = p.order();
        Self { n, terms: BTreeMap::from([(p, RationalFunction::one())]) }
    }

    /// Sums the given terms; every partition must have order `n`.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Partition, RationalFunction)>) -> Result<Self> {
        let mut out = Self::zero(n);
        for (p, c) in terms {
            if p.order() != n {
                return Err(Error::OrderMismatch(n, p.order()));
            }
            out.add_term(p, &c);
        }
        Ok(out)
    }

    pub(crate) fn add_term(&mut self, p: Partition, c: &RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get() + c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Partition, RationalFunction> {
        &self.terms
    }

    pub fn coeff(&self, p: &Partition) -> RationalFunction {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&RationalFunction::from_int(-1))
    }

    pub fn scale(&self, s: &RationalFunction) -> Self {
        if s.is_zero() {
            return Self::zero(self.n);
        }
        Self { n: self.n, terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect() }
    }

    /// Product with `self` on top, without a cache.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with(other, basis_product)
    }

    pub fn mul_cached(&self, other: &Self, cache: &ProductCache) -> Result<Self> {
        self.mul_with(other, |p, q| cache.basis_product(p, q))
    }

    fn mul_with(&self, other: &Self, mut product: impl FnMut(&Partition, &Partition) -> Result<Self>) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                let ab = a * b;
                for (r, c) in &product(p, q)?.terms {
                    out.add_term(r.clone(), &(&ab * c));
                }
            }
        }
        Ok(out)
    }

    /// Coefficients evaluated at `Q = q0`.
    pub fn eval_at(&self, q0: &BigRational) -> Result<BTreeMap<Partition, BigRational>> {
        let mut out = BTreeMap::new();
        for (p, c) in &self.terms {
            let x = c.eval(q0)?;
            if x != BigRational::default() {
                out.insert(p.clone(), x);
            }
        }
        Ok(out)
    }
}

/// `p * q` for basis partitions: normal form of the stacked basis diagrams.
pub fn basis_product(p: &Partition, q: &Partition) -> Result<AlgebraElement> {
    if p.order() != q.order() {
        return Err(Error::OrderMismatch(p.order(), q.order()));
    }
    normalize(&beta(p).stack(&beta(q))?)
}

/// Memoized basis products, safe to share between threads.
#[derive(Debug, Default)]
pub struct ProductCache {
    products: RwLock<HashMap<(Partition, Partition), AlgebraElement>>,
}

impl ProductCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn basis_product(&self, p: &Partition, q: &Partition) -> Result<AlgebraElement> {
        let key = (p.clone(), q.clone());
        if let Some(hit) = self.products.read().expect("cache lock poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let product = basis_product(p, q)?;
        self.products.write().expect("cache lock poisoned").insert(key, product.clone());
        Ok(product)
    }

    pub fn len(&self) -> usize {
        self.products.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn elem_add(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.add(b)
}

pub fn elem_scale(s: &RationalFunction, a: &AlgebraElement) -> AlgebraElement {
    a.scale(s)
}

pub fn elem_mul(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.mul(b)
}

pub fn identity_element(n: usize) -> AlgebraElement {
    AlgebraElement::identity(n)
}

/// All products of basis pairs, row-major over the canonical basis order.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    basis: Vec<Partition>,
    products: Vec<AlgebraElement>,
}

impl StructureTable {
    pub fn order(&self) -> usize {
        self.basis[0].order()
    }

    pub fn basis(&self) -> &[Partition] {
        &self.basis
    }

    pub fn product(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.products[i * self.basis.len() + j]
    }

    /// Nonzero `(p, q, r, coeff)` entries in deterministic order.
    pub fn triples(&self) -> impl Iterator<Item = (&Partition, &Partition, &Partition, &RationalFunction)> + '_ {
        let k = self.basis.len();
        self.products.iter().enumerate().flat_map(move |(idx, prod)| {
            let (p, q) = (&self.basis[idx / k], &self.basis[idx % k]);
            prod.terms().iter().map(move |(r, c)| (p, q, r, c))
        })
    }
}

/// Tabulates every basis product for order `n`, using up to `parallelism`
/// worker threads.
pub fn structure_constants(n: usize, cap: usize, parallelism: usize) -> Result<StructureTable> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let basis = enumerate_basis_capped(n, cap)?;
    let pairs: Vec<(usize, usize)> = (0..basis.len()).flat_map(|i| (0..basis.len()).map(move |j| (i, j))).collect();
    let compute = |&(i, j): &(usize, usize)| basis_product(&basis[i], &basis[j]);
    let products: Result<Vec<_>> = if parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        pool.install(|| pairs.par_iter().map(compute).collect())
    } else {
        pairs.iter().map(compute).collect()
    };
    Ok(StructureTable { basis, products: products? })
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    blocks: Vec<Vec<usize>>,
    coeff: RationalFunction,
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    n: usize,
    convention: String,
    terms: Vec<TermRepr>,
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElementRepr {
            n: self.n,
            convention: CONVENTION.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(p, c)| TermRepr { blocks: p.blocks().to_vec(), coeff: c.clone() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ElementRepr::deserialize(deserializer)?;
        if repr.convention != CONVENTION {
            return Err(D::Error::custom(format!("unsupported convention {:?}", repr.convention)));
        }
        let mut out = AlgebraElement::zero(repr.n);
        for t in repr.terms {
            let p = Partition::new(repr.n, t.blocks).map_err(D::Error::custom)?;
            if out.terms.contains_key(&p) {
                return Err(D::Error::custom(format!("duplicate term {:?}", p.blocks())));
            }
            out.add_term(p, &t.coeff);
        }
        Ok(out)
    }
}
