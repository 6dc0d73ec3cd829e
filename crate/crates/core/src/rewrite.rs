//! Normal forms: reduces any diagram to its expansion in the partition basis
//! by exhaustively applying the chromatic relations.
//!
//! Rules, with the scalar each contributes:
//!
//! * contraction/deletion of a non-loop inner edge `e`: `G = G/e - G\e`
//! * removal of an inner loop: factor `Q - 1`
//! * smoothing a 2-valent inner vertex into one edge: factor `1`
//! * a 1-valent inner vertex kills the term
//! * an isolated inner vertex is dropped: factor `1`
//! * a 2-valent vertex whose only edge is its own loop is a closed curve:
//!   dropped with factor `Q - 1`
//!
//! Every step lowers `#inner edges + #inner vertices` (or kills the term), so
//! reduction terminates. A surviving term has no inner edges and only
//! vertices of valency three or more, and is read off as a partition.

use std::collections::BTreeSet;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::diagram::{sorted_edge, Diagram, Edge, Endpoint};
use crate::error::{Error, Result};
use crate::qscalar::RationalFunction;

/// A formal linear combination of diagrams of one order.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCombination {
    n: usize,
    terms: Vec<(RationalFunction, Diagram)>,
}

impl RawCombination {
    pub fn new(n: usize, terms: Vec<(RationalFunction, Diagram)>) -> Result<Self> {
        if let Some((_, d)) = terms.iter().find(|(_, d)| d.order() != n) {
            return Err(Error::OrderMismatch(n, d.order()));
        }
        Ok(Self { n, terms })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(RationalFunction, Diagram)] {
        &self.terms
    }
}

/// One applicable rewrite at a given moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Redex {
    /// Relation (1) on the edge at this index.
    ContractDelete(usize),
    /// Relation (2) on the loop at this index.
    Loop(usize),
    Smooth(usize),
    Pendant(usize),
    Isolated(usize),
    ClosedCurve(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<Edge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<usize>,
    /// Terms still pending after this step.
    pub terms: usize,
}

enum Order<'a> {
    Canonical,
    Random(&'a mut dyn RngCore),
}

/// Configurable reduction: canonical or randomized rule selection, with an
/// optional step trace.
pub struct Normalizer<'a> {
    order: Order<'a>,
    trace: Option<Vec<TraceStep>>,
}

impl Default for Normalizer<'_> {
    fn default() -> Self {
        Self::canonical()
    }
}

impl<'a> Normalizer<'a> {
    /// Fixed priority: 1-valent kill, isolated vertex, loop, smoothing, then
    /// contraction/deletion of the smallest inner edge.
    pub fn canonical() -> Self {
        Self { order: Order::Canonical, trace: None }
    }

    /// Picks uniformly among all applicable redexes at every step.
    pub fn randomized(rng: &'a mut dyn RngCore) -> Self {
        Self { order: Order::Random(rng), trace: None }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Vec<TraceStep> {
        self.trace.take().unwrap_or_default()
    }

    pub fn normalize(&mut self, d: &Diagram) -> Result<AlgebraElement> {
        self.normalize_terms(d.order(), vec![(RationalFunction::one(), d.clone())])
    }

    pub fn normalize_combination(&mut self, c: &RawCombination) -> Result<AlgebraElement> {
        self.normalize_terms(c.n, c.terms.iter().filter(|(s, _)| !s.is_zero()).cloned().collect())
    }

    fn normalize_terms(&mut self, n: usize, mut stack: Vec<(RationalFunction, Diagram)>) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(n);
        while let Some((coeff, mut d)) = stack.pop() {
            let redexes = redexes(&d);
            if redexes.is_empty() {
                let p = d.alpha().map_err(|e| match e {
                    Error::NonPlanar(_) => e,
                    other => Error::Internal(format!("irreducible term is not a basis diagram: {other}")),
                })?;
                out.add_term(p, &coeff);
                continue;
            }
            let pick = match &mut self.order {
                Order::Canonical => canonical_pick(&redexes),
                Order::Random(rng) => redexes[rng.gen_range(0..redexes.len())],
            };
            let (rule, edge, vertex) = match pick {
                Redex::Pendant(v) => ("4", None, Some(v)),
                Redex::Isolated(v) => {
                    d.vertices.remove(&v);
                    stack.push((coeff, d));
                    ("isolated", None, Some(v))
                }
                Redex::ClosedCurve(v) => {
                    let e = d.edges.iter().position(|&(a, b)| a == Endpoint::Inner(v) && b == a).unwrap();
                    d.edges.remove(e);
                    d.vertices.remove(&v);
                    stack.push((&coeff * &RationalFunction::q_minus_one(), d));
                    ("closed-curve", None, Some(v))
                }
                Redex::Loop(i) => {
                    let e = d.edges.remove(i);
                    stack.push((&coeff * &RationalFunction::q_minus_one(), d));
                    ("2", Some(e), None)
                }
                Redex::Smooth(v) => {
                    d = smooth(&d, v);
                    stack.push((coeff, d));
                    ("3", None, Some(v))
                }
                Redex::ContractDelete(i) => {
                    let e = d.edges[i];
                    let deleted = delete_edge_at(&d, i);
                    let contracted = contract_edge_at(&d, i);
                    stack.push((-&coeff, deleted));
                    stack.push((coeff, contracted));
                    ("1", Some(e), None)
                }
            };
            if let Some(trace) = &mut self.trace {
                trace.push(TraceStep { rule, edge, vertex, terms: stack.len() });
            }
        }
        Ok(out)
    }
}

fn canonical_pick(redexes: &[Redex]) -> Redex {
    let rank = |r: &Redex| match r {
        Redex::Pendant(_) => 0,
        Redex::Isolated(_) => 1,
        Redex::Loop(_) => 2,
        Redex::ClosedCurve(_) => 3,
        Redex::Smooth(_) => 4,
        Redex::ContractDelete(_) => 5,
    };
    // `redexes` lists vertices and edges in ascending order, so the first of
    // the best rank is the smallest.
    *redexes.iter().min_by_key(|r| rank(r)).expect("nonempty")
}

/// Every rewrite applicable to `d`, vertex rules by ascending id and edge
/// rules by ascending edge position.
pub fn redexes(d: &Diagram) -> Vec<Redex> {
    let mut out = Vec::new();
    for &v in &d.vertices {
        let ep = Endpoint::Inner(v);
        let incident: Vec<&Edge> = d.edges.iter().filter(|&&(a, b)| a == ep || b == ep).collect();
        let valency: usize = incident.iter().map(|&&(a, b)| usize::from(a == ep) + usize::from(b == ep)).sum();
        match valency {
            0 => out.push(Redex::Isolated(v)),
            1 => out.push(Redex::Pendant(v)),
            2 if incident.len() == 1 => out.push(Redex::ClosedCurve(v)),
            2 => out.push(Redex::Smooth(v)),
            _ => {}
        }
    }
    for (i, &(a, b)) in d.edges.iter().enumerate() {
        if a.is_inner() && b.is_inner() {
            out.push(if a == b { Redex::Loop(i) } else { Redex::ContractDelete(i) });
        }
    }
    out
}

fn delete_edge_at(d: &Diagram, i: usize) -> Diagram {
    let mut out = d.clone();
    out.edges.remove(i);
    out
}

pub(crate) fn contract_edge_at(d: &Diagram, i: usize) -> Diagram {
    let (a, b) = d.edges[i];
    let (keep, gone) = match (a, b) {
        (Endpoint::Inner(x), Endpoint::Inner(y)) if x != y => (x, y),
        _ => panic!("contraction needs a non-loop inner edge"),
    };
    let map = |ep: Endpoint| if ep == Endpoint::Inner(gone) { Endpoint::Inner(keep) } else { ep };
    let mut vertices = d.vertices.clone();
    vertices.remove(&gone);
    let edges = d
        .edges
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &(x, y))| (map(x), map(y)))
        .collect();
    Diagram::from_parts_unchecked(d.n, vertices, edges)
}

pub(crate) fn smooth(d: &Diagram, v: usize) -> Diagram {
    let ep = Endpoint::Inner(v);
    let mut ends = Vec::new();
    let mut edges = Vec::new();
    for &(a, b) in &d.edges {
        if a == ep {
            ends.push(b);
        } else if b == ep {
            ends.push(a);
        } else {
            edges.push((a, b));
        }
    }
    debug_assert_eq!(ends.len(), 2);
    edges.push(sorted_edge(ends[0], ends[1]));
    let mut vertices: BTreeSet<usize> = d.vertices.clone();
    vertices.remove(&v);
    Diagram::from_parts_unchecked(d.n, vertices, edges)
}

fn inner_edge_index(d: &Diagram, e: Edge) -> Result<usize> {
    let e = sorted_edge(e.0, e.1);
    if !(e.0.is_inner() && e.1.is_inner()) || e.0 == e.1 {
        return Err(Error::Misuse(format!("{e:?} is not a non-loop inner edge")));
    }
    d.edges.iter().position(|&x| x == e).ok_or_else(|| Error::Misuse(format!("edge {e:?} not in diagram")))
}

/// `G/e` for a non-loop inner edge (one copy when parallel edges exist).
pub fn contract(d: &Diagram, e: Edge) -> Result<Diagram> {
    Ok(contract_edge_at(d, inner_edge_index(d, e)?))
}

/// `G \ e` for a non-loop inner edge.
pub fn delete(d: &Diagram, e: Edge) -> Result<Diagram> {
    Ok(delete_edge_at(d, inner_edge_index(d, e)?))
}

/// Canonical normal form of `d`.
pub fn normalize(d: &Diagram) -> Result<AlgebraElement> {
    Normalizer::canonical().normalize(d)
}

pub fn normalize_combination(c: &RawCombination) -> Result<AlgebraElement> {
    Normalizer::canonical().normalize_combination(c)
}

/// Normal form reached with uniformly random rule selection.
pub fn normalize_randomized(d: &Diagram, rng: &mut dyn RngCore) -> Result<AlgebraElement> {
    Normalizer::randomized(rng).normalize(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{beta, identity_diagram};
    use crate::ncpartition::{enumerate_basis, Partition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn b(l: usize) -> Endpoint {
        Endpoint::Boundary(l)
    }
    fn v(id: usize) -> Endpoint {
        Endpoint::Inner(id)
    }
    fn part(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::new(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }
    fn qm1() -> RationalFunction {
        RationalFunction::q_minus_one()
    }

    /// Strand 1 carries `u` (with a loop, joined to `v`); strand 2 carries
    /// `v` and a 2-valent vertex `c` below it.
    fn reduction_example() -> Diagram {
        Diagram::new(
            2,
            [0, 1, 2].into(),
            vec![(b(1), v(0)), (v(0), b(4)), (v(0), v(0)), (v(0), v(1)), (b(2), v(2)), (v(2), v(1)), (v(1), b(3))],
        )
        .unwrap()
    }

    #[test]
    fn worked_reduction() {
        let got = normalize(&reduction_example()).unwrap();
        let expected = AlgebraElement::from_terms(2, [(Partition::full(2), qm1()), (Partition::identity(2), -qm1())]).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn identity_is_already_normal() {
        for n in 1..=4 {
            assert_eq!(normalize(&identity_diagram(n)).unwrap(), AlgebraElement::identity(n));
        }
    }

    #[test]
    fn pendant_vertex_annihilates() {
        let d = Diagram::new(1, [0, 1].into(), vec![(b(1), v(0)), (v(0), b(2)), (v(0), v(1))]).unwrap();
        assert!(normalize(&d).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert!(normalize_randomized(&d, &mut rng).unwrap().is_zero());
        }
    }

    #[test]
    fn closed_loop_between_cups() {
        let cups = beta(&part(2, &[&[1, 2], &[3, 4]]));
        let got = normalize(&cups.stack(&cups).unwrap()).unwrap();
        assert_eq!(got, AlgebraElement::from_terms(2, [(part(2, &[&[1, 2], &[3, 4]]), qm1())]).unwrap());
    }

    #[test]
    fn basis_diagrams_are_fixed_points() {
        for n in 1..=5 {
            for p in enumerate_basis(n).unwrap() {
                assert_eq!(normalize(&beta(&p)).unwrap(), AlgebraElement::basis(p));
            }
        }
    }

    #[test]
    fn isolated_vertex_and_closed_curve_scalars() {
        let mut d = identity_diagram(1);
        d.vertices.insert(5);
        assert_eq!(normalize(&d).unwrap(), AlgebraElement::identity(1));

        let with_curve = Diagram::new(1, [0].into(), vec![(b(1), b(2)), (v(0), v(0))]).unwrap();
        let mut norm = Normalizer::canonical().with_trace();
        let got = norm.normalize(&with_curve).unwrap();
        assert_eq!(got, AlgebraElement::identity(1).scale(&qm1()));
        let rules: Vec<_> = norm.take_trace().iter().map(|s| s.rule).collect();
        assert_eq!(rules, vec!["2", "isolated"]);

        // A lone 2-valent vertex on a loop is the closed-curve redex.
        assert_eq!(redexes(&with_curve), vec![Redex::ClosedCurve(0), Redex::Loop(1)]);
    }

    #[test]
    fn nonplanar_input_is_rejected() {
        let d = Diagram::new(2, BTreeSet::new(), vec![(b(1), b(3)), (b(2), b(4))]).unwrap();
        assert!(matches!(normalize(&d), Err(Error::NonPlanar(_))));
    }

    #[test]
    fn contraction_and_deletion() {
        let d = reduction_example();
        let c = contract(&d, (v(1), v(0))).unwrap();
        assert_eq!(c.vertices().len(), 2);
        assert_eq!(c.valency(0), 6);
        let del = delete(&d, (v(0), v(1))).unwrap();
        assert_eq!(del.edges().len(), 6);
        assert!(contract(&d, (v(0), v(0))).is_err());
        assert!(delete(&d, (b(1), v(0))).is_err());
    }

    #[test]
    fn combination_is_linear() {
        let d = reduction_example();
        let two = RationalFunction::from_int(2);
        let c = RawCombination::new(2, vec![(two.clone(), d.clone()), (RationalFunction::one(), identity_diagram(2))]).unwrap();
        let expected = normalize(&d).unwrap().scale(&two).add(&AlgebraElement::identity(2)).unwrap();
        assert_eq!(normalize_combination(&c).unwrap(), expected);
        assert!(normalize_combination(&RawCombination::new(2, vec![]).unwrap()).unwrap().is_zero());
        assert!(RawCombination::new(3, vec![(two, d)]).is_err());
    }

    #[test]
    fn trace_serializes() {
        let mut norm = Normalizer::canonical().with_trace();
        norm.normalize(&reduction_example()).unwrap();
        let trace = norm.take_trace();
        assert_eq!(trace[0].rule, "2");
        let line = serde_json::to_string(&trace[0]).unwrap();
        assert_eq!(line, r#"{"rule":"2","edge":[{"v":0},{"v":0}],"terms":1}"#);
        assert!(trace.iter().any(|s| s.rule == "1"));
    }
}
