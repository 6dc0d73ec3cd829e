//! Reference evaluators that share no code with the library's rewriting and
//! stacking: their own graph type, integer polynomials for coefficients, and
//! their own partition extraction.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use chromalg::diagram::{Diagram, Endpoint};
use chromalg::{AlgebraElement, Partition, Polynomial, RationalFunction};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Blocks = Vec<Vec<usize>>;
/// Integer polynomial in `Q`, ascending coefficients, no trailing zeros.
pub type Poly = Vec<i64>;
pub type Elem = BTreeMap<Blocks, Poly>;

pub fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

pub fn padd(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn pmul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

pub fn pneg(a: &Poly) -> Poly {
    a.iter().map(|c| -c).collect()
}

pub fn qm1() -> Poly {
    vec![-1, 1]
}

pub fn elem_insert(e: &mut Elem, blocks: Blocks, c: &Poly) {
    let sum = padd(e.get(&blocks).unwrap_or(&Vec::new()), c);
    if sum.is_empty() {
        e.remove(&blocks);
    } else {
        e.insert(blocks, sum);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    B(usize),
    V(usize),
}

#[derive(Debug, Clone)]
pub struct Graph {
    pub n: usize,
    pub verts: Vec<usize>,
    pub edges: Vec<(Node, Node)>,
}

impl Graph {
    fn degree(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| usize::from(a == Node::V(v)) + usize::from(b == Node::V(v))).sum()
    }

    fn without_vertex(&self, v: usize) -> Graph {
        Graph {
            n: self.n,
            verts: self.verts.iter().copied().filter(|&w| w != v).collect(),
            edges: self.edges.iter().copied().filter(|&(a, b)| a != Node::V(v) && b != Node::V(v)).collect(),
        }
    }

    fn without_edge(&self, i: usize) -> Graph {
        let mut g = self.clone();
        g.edges.remove(i);
        g
    }

    fn fresh(&self) -> usize {
        self.verts.iter().max().map_or(0, |m| m + 1)
    }
}

pub fn from_diagram(d: &Diagram) -> Graph {
    let node = |e: Endpoint| match e {
        Endpoint::Boundary(l) => Node::B(l),
        Endpoint::Inner(v) => Node::V(v),
    };
    Graph { n: d.order(), verts: d.vertices().iter().copied().collect(), edges: d.edges().iter().map(|&(a, b)| (node(a), node(b))).collect() }
}

/// One vertex per block, including 2-blocks.
pub fn basis_graph(blocks: &Blocks, n: usize) -> Graph {
    let mut edges = Vec::new();
    for (v, b) in blocks.iter().enumerate() {
        edges.extend(b.iter().map(|&l| (Node::V(v), Node::B(l))));
    }
    Graph { n, verts: (0..blocks.len()).collect(), edges }
}

/// `top` stacked on `bottom`; glued points become vertices.
pub fn stack_graphs(top: &Graph, bottom: &Graph) -> Graph {
    let n = top.n;
    assert_eq!(n, bottom.n);
    let shift = top.fresh();
    let glue = shift + bottom.fresh();
    let up = |x: Node| match x {
        Node::B(l) if l <= n => Node::V(glue + l),
        other => other,
    };
    let down = |x: Node| match x {
        Node::V(v) => Node::V(v + shift),
        Node::B(l) if l > n => Node::V(glue + (2 * n + 1 - l)),
        other => other,
    };
    let mut verts: Vec<usize> = top.verts.clone();
    verts.extend(bottom.verts.iter().map(|v| v + shift));
    verts.extend((1..=n).map(|p| glue + p));
    let mut edges: Vec<(Node, Node)> = top.edges.iter().map(|&(a, b)| (up(a), up(b))).collect();
    edges.extend(bottom.edges.iter().map(|&(a, b)| (down(a), down(b))));
    Graph { n, verts, edges }
}

fn find(parent: &mut HashMap<Node, Node>, x: Node) -> Node {
    let p = *parent.entry(x).or_insert(x);
    if p == x {
        x
    } else {
        let r = find(parent, p);
        parent.insert(x, r);
        r
    }
}

/// Boundary connectivity of a graph whose vertices have all been resolved.
fn boundary_blocks(n: usize, edges: &[(Node, Node)]) -> Blocks {
    let mut parent = HashMap::new();
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent.insert(ra, rb);
    }
    let mut groups: BTreeMap<Node, Vec<usize>> = BTreeMap::new();
    for l in 1..=2 * n {
        let r = find(&mut parent, Node::B(l));
        groups.entry(r).or_default().push(l);
    }
    let mut blocks: Blocks = groups.into_values().collect();
    blocks.sort();
    blocks
}

enum Move {
    Drop(usize),
    Kill,
    Circle(usize),
    Smooth(usize),
    Loop(usize),
    Split(usize),
}

/// Applies the relations in uniformly random order until none applies.
pub fn eval_random<R: Rng>(g: &Graph, rng: &mut R) -> Elem {
    let mut out = Elem::new();
    let mut work = vec![(vec![1i64], g.clone())];
    while let Some((c, g)) = work.pop() {
        let mut moves = Vec::new();
        for &v in &g.verts {
            match g.degree(v) {
                0 => moves.push(Move::Drop(v)),
                1 => moves.push(Move::Kill),
                2 => {
                    let inc: Vec<_> = g.edges.iter().filter(|&&(a, b)| a == Node::V(v) || b == Node::V(v)).collect();
                    moves.push(if inc.len() == 1 { Move::Circle(v) } else { Move::Smooth(v) });
                }
                _ => {}
            }
        }
        for (i, &(a, b)) in g.edges.iter().enumerate() {
            if let (Node::V(_), Node::V(_)) = (a, b) {
                moves.push(if a == b { Move::Loop(i) } else { Move::Split(i) });
            }
        }
        let Some(m) = moves.choose(rng) else {
            let blocks = boundary_blocks(g.n, &g.edges);
            elem_insert(&mut out, blocks, &c);
            continue;
        };
        match *m {
            Move::Drop(v) => work.push((c, g.without_vertex(v))),
            Move::Kill => {}
            Move::Circle(v) => work.push((pmul(&c, &qm1()), g.without_vertex(v))),
            Move::Smooth(v) => {
                let ends: Vec<Node> = g
                    .edges
                    .iter()
                    .filter_map(|&(a, b)| {
                        if a == Node::V(v) {
                            Some(b)
                        } else if b == Node::V(v) {
                            Some(a)
                        } else {
                            None
                        }
                    })
                    .collect();
                let mut h = g.without_vertex(v);
                h.edges.push((ends[0], ends[1]));
                work.push((c, h));
            }
            Move::Loop(i) => work.push((pmul(&c, &qm1()), g.without_edge(i))),
            Move::Split(i) => {
                let (Node::V(x), Node::V(y)) = g.edges[i] else { unreachable!() };
                let del = g.without_edge(i);
                let mut con = del.clone();
                con.verts.retain(|&w| w != y);
                for e in &mut con.edges {
                    if e.0 == Node::V(y) {
                        e.0 = Node::V(x);
                    }
                    if e.1 == Node::V(y) {
                        e.1 = Node::V(x);
                    }
                }
                work.push((c.clone(), con));
                work.push((pneg(&c), del));
            }
        }
    }
    out
}

/// Full subset expansion over inner edges: each subset `A` contributes
/// `(-1)^{|E \ A|} Q^{nullity(A)}` times the diagram with the components of
/// `A` collapsed to single vertices.
pub fn eval_state_sum(g: &Graph) -> Elem {
    let inner: Vec<(usize, usize)> = g
        .edges
        .iter()
        .filter_map(|&(a, b)| match (a, b) {
            (Node::V(x), Node::V(y)) => Some((x, y)),
            _ => None,
        })
        .collect();
    let legs: Vec<(Node, Node)> =
        g.edges.iter().copied().filter(|&(a, b)| !matches!((a, b), (Node::V(_), Node::V(_)))).collect();
    assert!(inner.len() <= 20, "state sum over {} edges", inner.len());
    let mut out = Elem::new();
    'subsets: for mask in 0u64..(1 << inner.len()) {
        let mut parent: HashMap<Node, Node> = HashMap::new();
        let mut nullity = 0;
        for (k, &(x, y)) in inner.iter().enumerate() {
            if mask >> k & 1 == 1 {
                let (rx, ry) = (find(&mut parent, Node::V(x)), find(&mut parent, Node::V(y)));
                if rx == ry {
                    nullity += 1;
                } else {
                    parent.insert(rx, ry);
                }
            }
        }
        let mut leg_count: HashMap<Node, usize> = HashMap::new();
        for &(a, b) in &legs {
            for x in [a, b] {
                if let Node::V(v) = x {
                    *leg_count.entry(find(&mut parent, Node::V(v))).or_default() += 1;
                }
            }
        }
        for &v in &g.verts {
            let r = find(&mut parent, Node::V(v));
            if leg_count.get(&r) == Some(&1) {
                continue 'subsets;
            }
        }
        let collapsed: Vec<(Node, Node)> = legs
            .iter()
            .map(|&(a, b)| {
                let m = |x: Node| if let Node::V(_) = x { find(&mut parent.clone(), x) } else { x };
                (m(a), m(b))
            })
            .collect();
        let deleted = inner.len() - mask.count_ones() as usize;
        let mut c = vec![if deleted.is_multiple_of(2) { 1 } else { -1 }];
        for _ in 0..nullity {
            c = pmul(&c, &vec![0, 1]);
        }
        elem_insert(&mut out, boundary_blocks(g.n, &collapsed), &c);
    }
    out
}

pub fn poly_to_rf(p: &Poly) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::from_i64s(p))
}

pub fn rf_to_poly(c: &RationalFunction) -> Poly {
    assert!(c.is_integer_polynomial(), "{c} is not an integer polynomial");
    trim(c.numer().coeffs().iter().map(|x| x.to_integer().to_i64().expect("fits in i64")).collect())
}

pub fn lib_to_elem(x: &AlgebraElement) -> Elem {
    x.terms().iter().map(|(p, c)| (p.blocks().to_vec(), rf_to_poly(c))).collect()
}

pub fn elem_to_lib(n: usize, e: &Elem) -> AlgebraElement {
    AlgebraElement::from_terms(n, e.iter().map(|(b, c)| (Partition::new(n, b.clone()).unwrap(), poly_to_rf(c)))).unwrap()
}

/// Products of basis elements computed by `eval_random`, memoized.
pub struct NaiveAlgebra {
    pub n: usize,
    cache: HashMap<(Blocks, Blocks), Elem>,
    rng: ChaCha8Rng,
}

impl NaiveAlgebra {
    pub fn new(n: usize, seed: u64) -> Self {
        Self { n, cache: HashMap::new(), rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn basis_product(&mut self, p: &Blocks, q: &Blocks) -> Elem {
        if let Some(hit) = self.cache.get(&(p.clone(), q.clone())) {
            return hit.clone();
        }
        let g = stack_graphs(&basis_graph(p, self.n), &basis_graph(q, self.n));
        let r = eval_random(&g, &mut self.rng);
        self.cache.insert((p.clone(), q.clone()), r.clone());
        r
    }

    pub fn mul(&mut self, x: &Elem, y: &Elem) -> Elem {
        let mut out = Elem::new();
        for (p, a) in x {
            for (q, b) in y {
                let ab = pmul(a, b);
                for (r, c) in self.basis_product(p, q) {
                    elem_insert(&mut out, r, &pmul(&ab, &c));
                }
            }
        }
        out
    }
}

pub fn identity_blocks(n: usize) -> Blocks {
    (1..=n).map(|j| vec![j, 2 * n + 1 - j]).collect()
}

/// Blocks of `e_{i,j}^n`, built without the library.
pub fn generator_blocks(i: usize, j: usize, n: usize) -> Blocks {
    let mut blocks: Blocks = Vec::new();
    let mut big: Vec<usize> = (i..=j).chain((i..=j).map(|p| 2 * n + 1 - p)).collect();
    big.sort();
    blocks.push(big);
    for p in (1..i).chain(j + 1..=n) {
        blocks.push(vec![p, 2 * n + 1 - p]);
    }
    blocks.sort();
    blocks
}

pub type Word = Vec<(usize, usize)>;

/// Row-reduced span of generator-word images over `Q(Q)`.
pub struct SpanOracle {
    pub n: usize,
    index: BTreeMap<Blocks, usize>,
    rows: Vec<(usize, Vec<RationalFunction>, BTreeMap<Word, RationalFunction>)>,
    pub max_word_len: usize,
}

impl SpanOracle {
    /// Breadth-first search over words of length at most `2n`, keeping words
    /// whose images are independent of those already kept.
    pub fn build(n: usize, basis: &[Blocks], naive: &mut NaiveAlgebra) -> Self {
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let mut me = Self { n, index, rows: Vec::new(), max_word_len: 0 };
        let gens: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let id: Elem = [(identity_blocks(n), vec![1])].into();
        let mut frontier: Vec<(Word, Elem)> = Vec::new();
        if me.insert(Vec::new(), &id) {
            frontier.push((Vec::new(), id));
        }
        for len in 1..=2 * n {
            let mut next = Vec::new();
            for (w, img) in &frontier {
                for &(i, j) in &gens {
                    let g: Elem = [(generator_blocks(i, j, n), vec![1])].into();
                    let img2 = naive.mul(img, &g);
                    let mut w2 = w.clone();
                    w2.push((i, j));
                    if me.insert(w2.clone(), &img2) {
                        me.max_word_len = len;
                        next.push((w2, img2));
                    }
                }
            }
            frontier = next;
            if me.rank() == basis.len() {
                break;
            }
        }
        me
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn vector(&self, e: &Elem) -> Vec<RationalFunction> {
        let mut v = vec![RationalFunction::zero(); self.index.len()];
        for (b, c) in e {
            v[self.index[b]] = poly_to_rf(c);
        }
        v
    }

    fn reduce(&self, mut v: Vec<RationalFunction>, mut comb: BTreeMap<Word, RationalFunction>) -> (Vec<RationalFunction>, BTreeMap<Word, RationalFunction>) {
        for (pivot, row, rc) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x - &(&f * r);
            }
            for (w, c) in rc {
                let cur = comb.remove(w).unwrap_or_else(RationalFunction::zero);
                let next = &cur - &(&f * c);
                if !next.is_zero() {
                    comb.insert(w.clone(), next);
                }
            }
        }
        (v, comb)
    }

    fn insert(&mut self, w: Word, img: &Elem) -> bool {
        let (v, comb) = self.reduce(self.vector(img), [(w, RationalFunction::one())].into());
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[pivot].inv().unwrap();
        let v: Vec<_> = v.iter().map(|x| x * &inv).collect();
        let comb: BTreeMap<Word, RationalFunction> = comb.into_iter().map(|(w, c)| (w, &c * &inv)).collect();
        // Keep earlier rows reduced against the new pivot.
        for (_, row, rc) in &mut self.rows {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                *x = &*x - &(&f * r);
            }
            let mut merged: BTreeMap<Word, RationalFunction> = rc.clone();
            for (w, c) in &comb {
                let cur = merged.remove(w).unwrap_or_else(RationalFunction::zero);
                let next = &cur - &(&f * c);
                if !next.is_zero() {
                    merged.insert(w.clone(), next);
                }
            }
            *rc = merged;
        }
        self.rows.push((pivot, v, comb));
        true
    }

    /// Word combination whose image is `target`, if it lies in the span.
    pub fn solve(&self, target: &Elem) -> Option<BTreeMap<Word, RationalFunction>> {
        let (v, comb) = self.reduce(self.vector(target), BTreeMap::new());
        if v.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(comb.into_iter().map(|(w, c)| (w, -c)).collect())
    }
}

/// Image of a word combination under the naive product.
pub fn naive_eval_words(n: usize, comb: &BTreeMap<Word, RationalFunction>, naive: &mut NaiveAlgebra) -> AlgebraElement {
    let mut out = AlgebraElement::zero(n);
    for (w, c) in comb {
        let mut img: Elem = [(identity_blocks(n), vec![1])].into();
        for &(i, j) in w {
            img = naive.mul(&img, &[(generator_blocks(i, j, n), vec![1])].into());
        }
        out = out.add(&elem_to_lib(n, &img).scale(c)).unwrap();
    }
    out
}

/// Two vertices with legs `{1, 4}` and `{2, 3}` in order 2, joined by `k`
/// parallel edges.
pub fn multi_edge_gadget(k: usize) -> Diagram {
    let (b, v) = (Endpoint::Boundary, Endpoint::Inner);
    let mut edges = vec![(b(1), v(0)), (b(4), v(0)), (b(2), v(1)), (b(3), v(1))];
    edges.extend(std::iter::repeat_n((v(0), v(1)), k));
    Diagram::new(2, [0, 1].into(), edges).unwrap()
}

/// Every set partition of `1..=m` as restricted growth strings.
pub fn all_set_partitions(m: usize) -> Vec<Blocks> {
    fn go(i: usize, m: usize, rgs: &mut Vec<usize>, out: &mut Vec<Blocks>) {
        if i == m {
            let k = rgs.iter().max().map_or(0, |x| x + 1);
            let mut blocks = vec![Vec::new(); k];
            for (l, &b) in rgs.iter().enumerate() {
                blocks[b].push(l + 1);
            }
            blocks.sort();
            out.push(blocks);
            return;
        }
        let k = rgs.iter().max().map_or(0, |x| x + 1);
        for b in 0..=k {
            rgs.push(b);
            go(i + 1, m, rgs, out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, &mut Vec::new(), &mut out);
    out
}

/// Set partitions of `1..=2n` without singletons and without a crossing pair.
pub fn brute_force_basis(n: usize) -> Vec<Blocks> {
    let crossing = |a: &[usize], b: &[usize]| {
        a.iter().any(|&x| a.iter().any(|&y| x < y && b.iter().any(|&u| x < u && u < y) && b.iter().any(|&u| u < x || u > y)))
    };
    let mut out: Vec<Blocks> = all_set_partitions(2 * n)
        .into_iter()
        .filter(|p| p.iter().all(|b| b.len() >= 2))
        .filter(|p| p.iter().enumerate().all(|(i, a)| p[i + 1..].iter().all(|b| !crossing(a, b))))
        .collect();
    out.sort();
    out
}
