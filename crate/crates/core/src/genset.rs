//! The generators `e_{i,j}^n` and the constructive decomposition of basis
//! elements into polynomials in them.
//!
//! The recursion works on the partition `p` of a basis diagram:
//!
//! * An isolated block `L` covering nothing occupies positions `i..=j` of one
//!   side. Merging it with the block `M` next to it gives `p'`, and stacking
//!   `e_{i,j}` on that side of `p'` yields `p` with `k = j - i + 1` parallel
//!   edges between the vertices of `L` and `M`. Expanding the multi-edge,
//!   `e * p' = c_k p' + (-1)^k p`.
//! * With only crossing blocks, the leftmost block `L` has `a` top and `b`
//!   bottom points. If `a == b`, `p = e_{1,a} * (a strands | rest)`.
//!   Otherwise `L` is split into `min(a, b)` strands with the surplus points
//!   handed to the next block, and the same multi-edge identity with
//!   `k = |a - b|` relates it to `p` and to `p'` (`L` and its neighbour merged).
//!
//! Each recursive call lowers `(order, isolated blocks, blocks)`
//! lexicographically.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, ProductCache};
use crate::diagram::generator_partition;
use crate::error::{Error, Result};
use crate::ncpartition::{boundary_index, boundary_label, BlockKind, Partition, Side};
use crate::qscalar::RationalFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorSymbol {
    i: usize,
    j: usize,
    n: usize,
}

impl GeneratorSymbol {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        generator_partition(i, j, n)?;
        Ok(Self { i, j, n })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn partition(&self) -> Partition {
        generator_partition(self.i, self.j, self.n).expect("validated on construction")
    }

    fn shifted(self, left: usize, n: usize) -> Self {
        Self { i: self.i + left, j: self.j + left, n }
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e[{},{}]", self.i, self.j)
    }
}

/// `E_n`: all `e_{i,j}^n`, ordered by `(i, j)`.
pub fn generators(n: usize) -> Vec<GeneratorSymbol> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| GeneratorSymbol { i, j, n })).collect()
}

pub type Word = Vec<GeneratorSymbol>;

/// Linear combination of generator words; the empty word is the identity
/// and the first symbol of a word is the top factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorExpression {
    n: usize,
    terms: BTreeMap<Word, RationalFunction>,
}

impl GeneratorExpression {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::word(n, Vec::new())
    }

    fn word(n: usize, word: Word) -> Self {
        Self { n, terms: BTreeMap::from([(word, RationalFunction::one())]) }
    }

    pub fn symbol(s: GeneratorSymbol) -> Self {
        Self::word(s.n, vec![s])
    }

    pub fn new(n: usize, terms: impl IntoIterator<Item = (RationalFunction, Word)>) -> Result<Self> {
        let mut out = Self::zero(n);
        for (c, w) in terms {
            if let Some(s) = w.iter().find(|s| s.n != n) {
                return Err(Error::OrderMismatch(n, s.n));
            }
            out.add_term(w, &c);
        }
        Ok(out)
    }

    fn add_term(&mut self, w: Word, c: &RationalFunction) {
        if c.is_zero() {
            return;
        }
        let sum = self.terms.get(&w).map_or_else(|| c.clone(), |old| old + c);
        if sum.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Word, RationalFunction> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::OrderMismatch(self.n, other.n));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &RationalFunction) -> Self {
        let mut out = Self::zero(self.n);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &(c * s));
        }
        out
    }

    /// `s * self`, with `s` on top.
    pub fn mul_symbol_left(&self, s: GeneratorSymbol) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (std::iter::once(s).chain(w.iter().copied()).collect(), c.clone())).collect(),
        }
    }

    /// `self * s`, with `s` below.
    pub fn mul_symbol_right(&self, s: GeneratorSymbol) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.iter().copied().chain(std::iter::once(s)).collect(), c.clone())).collect(),
        }
    }

    /// Image under `x -> (left strands | x | strands)` into order `n`.
    pub fn embed(&self, n: usize, left: usize) -> Result<Self> {
        if left + self.n > n {
            return Err(Error::OutOfRange { what: "embedding order", value: n, lo: left + self.n, hi: usize::MAX });
        }
        Ok(Self {
            n,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.iter().map(|s| s.shifted(left, n)).collect(), c.clone()))
                .collect(),
        })
    }

    /// True when every coefficient lies in `Z[Q]`.
    pub fn has_integer_polynomial_coeffs(&self) -> bool {
        self.terms.values().all(RationalFunction::is_integer_polynomial)
    }
}

impl fmt::Display for GeneratorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if w.is_empty() {
                write!(f, "*1")?;
            }
            for s in w {
                write!(f, "*{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ExprTermRepr {
    coeff: RationalFunction,
    word: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct ExprRepr {
    n: usize,
    terms: Vec<ExprTermRepr>,
}

impl Serialize for GeneratorExpression {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ExprRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| ExprTermRepr { coeff: c.clone(), word: w.iter().map(|s| (s.i, s.j)).collect() })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GeneratorExpression {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ExprRepr::deserialize(deserializer)?;
        let n = repr.n;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                let word = t.word.iter().map(|&(i, j)| GeneratorSymbol::new(i, j, n)).collect::<Result<Word>>()?;
                Ok((t.coeff, word))
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        GeneratorExpression::new(n, terms).map_err(D::Error::custom)
    }
}

/// `c_k` with `c_0 = 0` and `c_k = (Q - 1)^{k-1} - c_{k-1}`: the coefficient
/// of the contracted diagram when `k` parallel inner edges are expanded.
pub fn multi_edge_coefficient(k: usize) -> RationalFunction {
    let qm1 = RationalFunction::q_minus_one();
    let mut c = RationalFunction::zero();
    let mut power = RationalFunction::one();
    for _ in 1..=k {
        c = &power - &c;
        power = &power * &qm1;
    }
    c
}

fn sign(k: usize) -> RationalFunction {
    RationalFunction::from_int(if k.is_multiple_of(2) { 1 } else { -1 })
}

/// `(-1)^k (lifted - c_k * merged)`: solves `lifted = c_k merged + (-1)^k p` for `p`.
fn solve_multi_edge(k: usize, lifted: &GeneratorExpression, merged: &GeneratorExpression) -> Result<GeneratorExpression> {
    let c = multi_edge_coefficient(k);
    Ok(lifted.add(&merged.scale(&-c))?.scale(&sign(k)))
}

type Metric = (usize, usize, usize);

fn metric(p: &Partition) -> Metric {
    (p.order(), p.isolated_count(), p.blocks().len())
}

/// Memoizing decomposition of basis elements.
#[derive(Debug, Default)]
pub struct Decomposer {
    memo: HashMap<Partition, GeneratorExpression>,
}

impl Decomposer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decompose_basis(&mut self, p: &Partition) -> Result<GeneratorExpression> {
        self.decompose_below(p, None)
    }

    pub fn decompose_element(&mut self, x: &AlgebraElement) -> Result<GeneratorExpression> {
        let mut out = GeneratorExpression::zero(x.order());
        for (p, c) in x.terms() {
            out = out.add(&self.decompose_basis(p)?.scale(c))?;
        }
        Ok(out)
    }

    fn decompose_below(&mut self, p: &Partition, parent: Option<Metric>) -> Result<GeneratorExpression> {
        if let Some(parent) = parent {
            if metric(p) >= parent {
                return Err(Error::Internal(format!(
                    "decomposition metric did not decrease: {:?} -> {:?}",
                    parent,
                    metric(p)
                )));
            }
        }
        if let Some(hit) = self.memo.get(p) {
            return Ok(hit.clone());
        }
        let expr = self.decompose_step(p)?;
        self.memo.insert(p.clone(), expr.clone());
        Ok(expr)
    }

    fn decompose_step(&mut self, p: &Partition) -> Result<GeneratorExpression> {
        let n = p.order();
        if p.is_identity() {
            return Ok(GeneratorExpression::identity(n));
        }
        if p.blocks().len() == 1 {
            return Ok(GeneratorExpression::symbol(GeneratorSymbol::new(1, n, n)?));
        }
        let here = Some(metric(p));
        if p.isolated_count() > 0 {
            let (l, side, i, j) = choose_isolated(p)?;
            let m = face_neighbour(p, side, i, j)?;
            let merged = p.merge_blocks(l, m)?;
            let sub = self.decompose_below(&merged, here)?;
            let e = GeneratorSymbol::new(i, j, n)?;
            let lifted = match side {
                Side::Top => sub.mul_symbol_left(e),
                Side::Bottom => sub.mul_symbol_right(e),
            };
            return solve_multi_edge(j - i + 1, &lifted, &sub);
        }

        let l = p.block_index_of(1).expect("label 1 is covered");
        let block = &p.blocks()[l];
        let a = p.positions(block, Side::Top);
        let b = p.positions(block, Side::Bottom);
        let (na, nb) = (a.len(), b.len());
        if a != (1..=na).collect::<Vec<_>>() || b != (1..=nb).collect::<Vec<_>>() {
            return Err(Error::Internal(format!("leftmost crossing block {block:?} is not left-aligned")));
        }
        if na == nb {
            let rest = p.restrict(na + 1, n - na)?;
            let tail = self.decompose_below(&rest, here)?.embed(n, na)?;
            return Ok(if na == 1 { tail } else { tail.mul_symbol_left(GeneratorSymbol::new(1, na, n)?) });
        }

        let (wide, narrow, wide_side) = if na > nb { (na, nb, Side::Top) } else { (nb, na, Side::Bottom) };
        let narrow_side = if wide_side == Side::Top { Side::Bottom } else { Side::Top };
        let m = p
            .block_index_of(boundary_label(narrow_side, narrow + 1, n)?)
            .expect("label is covered");
        let merged = p.merge_blocks(l, m)?;

        // L becomes `narrow` strands; its surplus points on the wide side join M.
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (idx, blk) in p.blocks().iter().enumerate() {
            if idx == l {
                continue;
            }
            let mut blk = blk.clone();
            if idx == m {
                for pos in narrow + 1..=wide {
                    blk.push(boundary_label(wide_side, pos, n)?);
                }
            }
            blocks.push(blk);
        }
        for pos in 1..=narrow {
            blocks.push(vec![pos, 2 * n + 1 - pos]);
        }
        let split = Partition::new(n, blocks)?;
        let rest = split.restrict(narrow + 1, n - narrow)?;
        let split_expr = self.decompose_below(&rest, here)?.embed(n, narrow)?;
        let merged_expr = self.decompose_below(&merged, here)?;
        let e = GeneratorSymbol::new(1, wide, n)?;
        let lifted = match wide_side {
            Side::Top => split_expr.mul_symbol_left(e),
            Side::Bottom => split_expr.mul_symbol_right(e),
        };
        solve_multi_edge(wide - narrow, &lifted, &merged_expr)
    }
}

/// The isolated block covering nothing with the smallest left position, top
/// side first on ties. Returns `(block index, side, i, j)`.
fn choose_isolated(p: &Partition) -> Result<(usize, Side, usize, usize)> {
    let mut best: Option<(usize, Side, usize, usize)> = None;
    for (idx, block) in p.blocks().iter().enumerate() {
        let side = match p.kind_of(idx) {
            BlockKind::TopIsolated => Side::Top,
            BlockKind::BottomIsolated => Side::Bottom,
            BlockKind::Crossing => continue,
        };
        let covers_some = p
            .blocks()
            .iter()
            .enumerate()
            .filter(|&(other, _)| other != idx && p.kind_of(other) == p.kind_of(idx))
            .map(|(_, other)| p.covers(block, other))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .any(|c| c);
        if covers_some {
            continue;
        }
        let pos = p.positions(block, side);
        let (i, j) = (pos[0], *pos.last().unwrap());
        if j - i + 1 != pos.len() {
            return Err(Error::Internal(format!("uncovering isolated block {block:?} is not consecutive")));
        }
        let key = (i, side != Side::Top);
        if best.is_none_or(|(_, s, bi, _)| key < (bi, s != Side::Top)) {
            best = Some((idx, side, i, j));
        }
    }
    best.ok_or_else(|| Error::Internal("isolated blocks present but each covers another".into()))
}

/// Block sharing a face with positions `i..=j` of `side`: the left neighbour
/// on the same side, else the right one, else (the block spans the whole
/// side) the block at position 1 of the opposite side.
fn face_neighbour(p: &Partition, side: Side, i: usize, j: usize) -> Result<usize> {
    let n = p.order();
    let label = if i > 1 {
        boundary_label(side, i - 1, n)?
    } else if j < n {
        boundary_label(side, j + 1, n)?
    } else {
        let other = if side == Side::Top { Side::Bottom } else { Side::Top };
        boundary_label(other, 1, n)?
    };
    debug_assert!(boundary_index(label, n).is_ok());
    Ok(p.block_index_of(label).expect("label is covered"))
}

pub fn decompose_basis(p: &Partition) -> Result<GeneratorExpression> {
    Decomposer::new().decompose_basis(p)
}

pub fn decompose_element(x: &AlgebraElement) -> Result<GeneratorExpression> {
    Decomposer::new().decompose_element(x)
}

/// Interprets an expression in the algebra.
pub fn evaluate(expr: &GeneratorExpression) -> Result<AlgebraElement> {
    evaluate_cached(expr, &ProductCache::new())
}

pub fn evaluate_cached(expr: &GeneratorExpression, cache: &ProductCache) -> Result<AlgebraElement> {
    let n = expr.order();
    let mut out = AlgebraElement::zero(n);
    for (word, c) in expr.terms() {
        let mut acc = AlgebraElement::identity(n);
        for s in word {
            acc = acc.mul_cached(&AlgebraElement::basis(s.partition()), cache)?;
        }
        out = out.add(&acc.scale(c))?;
    }
    Ok(out)
}
