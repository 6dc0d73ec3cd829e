//! Random planar diagrams for the randomized suites.
//!
//! Samples start from a vertical stack of basis and generator diagrams (planar
//! by construction), have their glue vertices smoothed away, and are then
//! perturbed by moves that keep a planar drawing: subdividing an edge,
//! doubling an inner edge, adding a loop, contracting an inner edge.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::diagram::{beta, generator_diagram, Diagram, Endpoint};
use crate::error::{Error, Result};
use crate::ncpartition::enumerate_basis;
use crate::rewrite::{contract_edge_at, redexes, smooth, Redex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleLimits {
    pub max_vertices: usize,
    pub max_inner_edges: usize,
}

impl Default for SampleLimits {
    fn default() -> Self {
        Self { max_vertices: 6, max_inner_edges: 8 }
    }
}

impl SampleLimits {
    fn admits(&self, d: &Diagram) -> bool {
        d.vertices.len() <= self.max_vertices && d.inner_edge_count() <= self.max_inner_edges
    }
}

const MAX_ATTEMPTS: usize = 10_000;

fn random_factor<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Diagram> {
    if n >= 2 && rng.gen_bool(0.5) {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        generator_diagram(i, j, n)
    } else {
        let basis = enumerate_basis(n)?;
        Ok(beta(basis.choose(rng).expect("basis is nonempty")))
    }
}

fn smooth_all(mut d: Diagram) -> Diagram {
    while let Some(v) = redexes(&d).into_iter().find_map(|r| match r {
        Redex::Smooth(v) => Some(v),
        _ => None,
    }) {
        d = smooth(&d, v);
    }
    d
}

fn fresh_id(d: &Diagram) -> usize {
    d.vertices.iter().next_back().map_or(0, |v| v + 1)
}

fn inner_non_loops(d: &Diagram) -> Vec<usize> {
    (0..d.edges.len())
        .filter(|&i| {
            let (a, b) = d.edges[i];
            a.is_inner() && b.is_inner() && a != b
        })
        .collect()
}

/// Inserts a 2-valent vertex into edge `i`; returns the new vertex.
fn subdivide(d: &Diagram, i: usize) -> (Diagram, usize) {
    let (a, b) = d.edges[i];
    let w = fresh_id(d);
    let mut vertices = d.vertices.clone();
    vertices.insert(w);
    let mut edges = d.edges.clone();
    edges.remove(i);
    edges.push((a, Endpoint::Inner(w)));
    edges.push((Endpoint::Inner(w), b));
    (Diagram::from_parts_unchecked(d.n, vertices, edges), w)
}

fn with_edge(d: &Diagram, e: (Endpoint, Endpoint)) -> Diagram {
    let mut edges = d.edges.clone();
    edges.push(e);
    Diagram::from_parts_unchecked(d.n, d.vertices.clone(), edges)
}

fn mutate<R: Rng + ?Sized>(rng: &mut R, d: &Diagram) -> Option<Diagram> {
    let inner: Vec<usize> = d.vertices.iter().copied().collect();
    let candidates = inner_non_loops(d);
    match rng.gen_range(0..4) {
        0 if !d.edges.is_empty() => Some(subdivide(d, rng.gen_range(0..d.edges.len())).0),
        1 if !candidates.is_empty() => Some(with_edge(d, d.edges[*candidates.choose(rng)?])),
        2 if !inner.is_empty() => {
            let v = Endpoint::Inner(*inner.choose(rng)?);
            Some(with_edge(d, (v, v)))
        }
        3 if !candidates.is_empty() => Some(contract_edge_at(d, *candidates.choose(rng)?)),
        _ => None,
    }
}

/// A random planar diagram of order `n` within `limits`.
pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, n: usize, limits: SampleLimits) -> Result<Diagram> {
    for _ in 0..MAX_ATTEMPTS {
        let factors = rng.gen_range(1..=3);
        let mut d = random_factor(rng, n)?;
        for _ in 1..factors {
            d = d.stack(&random_factor(rng, n)?)?;
        }
        d = smooth_all(d);
        if !limits.admits(&d) {
            continue;
        }
        for _ in 0..rng.gen_range(0..=4) {
            if let Some(next) = mutate(rng, &d) {
                if limits.admits(&next) {
                    d = next;
                }
            }
        }
        return Ok(d.compact_ids());
    }
    Err(Error::Internal(format!("no diagram of order {n} found within {limits:?}")))
}

/// A random planar diagram with an added 1-valent inner vertex.
pub fn random_with_pendant<R: Rng + ?Sized>(rng: &mut R, n: usize, limits: SampleLimits) -> Result<Diagram> {
    if limits.max_vertices < 2 || limits.max_inner_edges < 1 {
        return Err(Error::Precondition("limits leave no room for a pendant".into()));
    }
    let inner = SampleLimits { max_vertices: limits.max_vertices - 2, max_inner_edges: limits.max_inner_edges - 1 };
    let d = random_diagram(rng, n, inner)?;
    let (d, v) = if d.vertices.is_empty() || rng.gen_bool(0.25) {
        subdivide(&d, rng.gen_range(0..d.edges.len()))
    } else {
        let vs: Vec<usize> = d.vertices.iter().copied().collect();
        let v = *vs.choose(rng).expect("nonempty");
        (d, v)
    };
    let w = fresh_id(&d);
    let mut vertices = d.vertices.clone();
    vertices.insert(w);
    let mut edges = d.edges.clone();
    edges.push((Endpoint::Inner(v), Endpoint::Inner(w)));
    Ok(Diagram::from_parts_unchecked(d.n, vertices, edges).compact_ids())
}
