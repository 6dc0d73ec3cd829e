//! Chromatic diagrams as abstract multigraphs with `2n` boundary legs.
//!
//! No planar embedding is stored. Inner vertex ids are opaque; diagrams that
//! have no inner edges are compared through their labelled adjacency matrix.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ncpartition::{boundary_label, Partition, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Endpoint {
    #[serde(rename = "b")]
    Boundary(usize),
    #[serde(rename = "v")]
    Inner(usize),
}

impl Endpoint {
    pub fn is_inner(self) -> bool {
        matches!(self, Endpoint::Inner(_))
    }

    pub fn inner_id(self) -> Option<usize> {
        match self {
            Endpoint::Inner(v) => Some(v),
            Endpoint::Boundary(_) => None,
        }
    }
}

pub type Edge = (Endpoint, Endpoint);

pub(crate) fn sorted_edge(a: Endpoint, b: Endpoint) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// An `n`-th order chromatic diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagram {
    pub(crate) n: usize,
    pub(crate) vertices: BTreeSet<usize>,
    pub(crate) edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct DiagramRepr {
    n: usize,
    vertices: Vec<usize>,
    edges: Vec<Edge>,
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = DiagramRepr::deserialize(deserializer)?;
        let vertices: BTreeSet<usize> = repr.vertices.iter().copied().collect();
        if vertices.len() != repr.vertices.len() {
            return Err(serde::de::Error::custom("duplicate vertex id"));
        }
        Diagram::new(repr.n, vertices, repr.edges).map_err(serde::de::Error::custom)
    }
}

impl Diagram {
    pub fn new(n: usize, vertices: BTreeSet<usize>, edges: Vec<Edge>) -> Result<Self> {
        let mut d = Self { n, vertices, edges };
        d.validate()?;
        d.edges = d.edges.iter().map(|&(a, b)| sorted_edge(a, b)).collect();
        d.edges.sort_unstable();
        Ok(d)
    }

    pub(crate) fn from_parts_unchecked(n: usize, vertices: BTreeSet<usize>, mut edges: Vec<Edge>) -> Self {
        for e in &mut edges {
            *e = sorted_edge(e.0, e.1);
        }
        edges.sort_unstable();
        Self { n, vertices, edges }
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidDiagram("order must be positive".into()));
        }
        let mut incidence = vec![0usize; 2 * n + 1];
        for &(a, b) in &self.edges {
            if a == b && !a.is_inner() {
                return Err(Error::InvalidDiagram(format!("loop at boundary point {a:?}")));
            }
            for ep in [a, b] {
                match ep {
                    Endpoint::Boundary(l) if l >= 1 && l <= 2 * n => incidence[l] += 1,
                    Endpoint::Boundary(l) => {
                        return Err(Error::InvalidDiagram(format!("boundary label {l} outside 1..={}", 2 * n)))
                    }
                    Endpoint::Inner(v) if !self.vertices.contains(&v) => {
                        return Err(Error::InvalidDiagram(format!("edge references unknown vertex {v}")))
                    }
                    Endpoint::Inner(_) => {}
                }
            }
        }
        if let Some(l) = (1..=2 * n).find(|&l| incidence[l] != 1) {
            return Err(Error::InvalidDiagram(format!(
                "boundary point {l} has incidence {}, expected 1",
                incidence[l]
            )));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Valency of an inner vertex; a loop counts twice.
    pub fn valency(&self, v: usize) -> usize {
        let ep = Endpoint::Inner(v);
        self.edges.iter().map(|&(a, b)| usize::from(a == ep) + usize::from(b == ep)).sum()
    }

    pub fn inner_edge_count(&self) -> usize {
        self.edges.iter().filter(|(a, b)| a.is_inner() && b.is_inner()).count()
    }

    fn check_basis_shaped(&self) -> Result<()> {
        if let Some(e) = self.edges.iter().find(|(a, b)| a.is_inner() && b.is_inner()) {
            return Err(Error::Precondition(format!("inner edge {e:?} present")));
        }
        if let Some(&v) = self.vertices.iter().find(|&&v| self.valency(v) < 3) {
            return Err(Error::Precondition(format!(
                "inner vertex {v} has valency {} < 3",
                self.valency(v)
            )));
        }
        Ok(())
    }

    /// The partition of boundary points by connected component. Requires no
    /// inner edges and every inner vertex of valency at least three.
    pub fn alpha(&self) -> Result<Partition> {
        self.check_basis_shaped()?;
        let n = self.n;
        let mut by_vertex: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut blocks = Vec::new();
        for &(a, b) in &self.edges {
            match (a, b) {
                (Endpoint::Boundary(x), Endpoint::Boundary(y)) => blocks.push(vec![x, y]),
                (Endpoint::Boundary(x), Endpoint::Inner(v)) | (Endpoint::Inner(v), Endpoint::Boundary(x)) => {
                    by_vertex.entry(v).or_default().push(x)
                }
                _ => unreachable!("inner edges rejected above"),
            }
        }
        blocks.extend(by_vertex.into_values());
        let raw = blocks.clone();
        Partition::new(n, blocks).map_err(|err| match err {
            Error::InvalidPartition(_) => Error::NonPlanar(raw),
            other => other,
        })
    }

    /// Labelled adjacency matrix: boundary points first, then inner vertices
    /// ordered by the smallest boundary label they touch.
    pub fn adjacency_matrix(&self) -> Result<AdjacencyMatrix> {
        self.alpha()?;
        let n = self.n;
        let mut first_label: Vec<(usize, usize)> = self
            .vertices
            .iter()
            .map(|&v| {
                let min = self
                    .edges
                    .iter()
                    .filter_map(|&(a, b)| match (a, b) {
                        (Endpoint::Boundary(x), Endpoint::Inner(w)) | (Endpoint::Inner(w), Endpoint::Boundary(x))
                            if w == v =>
                        {
                            Some(x)
                        }
                        _ => None,
                    })
                    .min()
                    .expect("valency >= 3 vertex touches the boundary");
                (min, v)
            })
            .collect();
        first_label.sort_unstable();
        let index: BTreeMap<usize, usize> =
            first_label.iter().enumerate().map(|(i, &(_, v))| (v, 2 * n + i)).collect();
        let size = 2 * n + first_label.len();
        let mut entries = vec![vec![0u32; size]; size];
        let slot = |ep: Endpoint| match ep {
            Endpoint::Boundary(l) => l - 1,
            Endpoint::Inner(v) => index[&v],
        };
        for &(a, b) in &self.edges {
            let (i, j) = (slot(a), slot(b));
            entries[i][j] += 1;
            if i != j {
                entries[j][i] += 1;
            }
        }
        Ok(AdjacencyMatrix { size, entries })
    }

    /// Equality of isotopy classes for diagrams without inner edges.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        Ok(self.n == other.n && self.adjacency_matrix()? == other.adjacency_matrix()?)
    }

    /// Stacks `self` on top of `below`. Each glued boundary pair becomes a
    /// fresh 2-valent inner vertex; no relation is applied.
    pub fn stack(&self, below: &Self) -> Result<Self> {
        if self.n != below.n {
            return Err(Error::OrderMismatch(self.n, below.n));
        }
        let n = self.n;
        let top_ids: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let base = top_ids.len();
        let bottom_ids: BTreeMap<usize, usize> =
            below.vertices.iter().enumerate().map(|(i, &v)| (v, base + i)).collect();
        let glue_base = base + bottom_ids.len();
        // Glue vertex for position p is `glue_base + p - 1`.
        let map_top = |ep: Endpoint| match ep {
            Endpoint::Inner(v) => Endpoint::Inner(top_ids[&v]),
            Endpoint::Boundary(l) if l <= n => Endpoint::Inner(glue_base + l - 1),
            b => b,
        };
        let map_bottom = |ep: Endpoint| match ep {
            Endpoint::Inner(v) => Endpoint::Inner(bottom_ids[&v]),
            Endpoint::Boundary(l) if l > n => Endpoint::Inner(glue_base + (2 * n - l)),
            b => b,
        };
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| (map_top(a), map_top(b)))
            .chain(below.edges.iter().map(|&(a, b)| (map_bottom(a), map_bottom(b))))
            .collect();
        let vertices = (0..glue_base + n).collect();
        Ok(Self::from_parts_unchecked(n, vertices, edges))
    }

    /// Relabels inner vertices as `0..k` in ascending id order.
    pub fn compact_ids(&self) -> Self {
        let ids: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let map = |ep: Endpoint| match ep {
            Endpoint::Inner(v) => Endpoint::Inner(ids[&v]),
            b => b,
        };
        Self::from_parts_unchecked(
            self.n,
            (0..ids.len()).collect(),
            self.edges.iter().map(|&(a, b)| (map(a), map(b))).collect(),
        )
    }
}

/// Square matrix of edge multiplicities under the boundary-first labelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    size: usize,
    entries: Vec<Vec<u32>>,
}

impl AdjacencyMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry at 1-based labels `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.entries
    }
}

/// The basis diagram of a partition: one inner vertex per block of three or
/// more points, a plain strand per 2-block.
pub fn beta(p: &Partition) -> Diagram {
    let mut vertices = BTreeSet::new();
    let mut edges = Vec::new();
    for block in p.blocks() {
        if let [x, y] = block[..] {
            edges.push((Endpoint::Boundary(x), Endpoint::Boundary(y)));
        } else {
            let v = vertices.len();
            vertices.insert(v);
            edges.extend(block.iter().map(|&l| (Endpoint::Boundary(l), Endpoint::Inner(v))));
        }
    }
    Diagram::from_parts_unchecked(p.order(), vertices, edges)
}

pub fn alpha(d: &Diagram) -> Result<Partition> {
    d.alpha()
}

pub fn identity_diagram(n: usize) -> Diagram {
    beta(&Partition::identity(n))
}

/// Partition of `e_{i,j}^n`: positions `i..=j` on both sides in one block,
/// vertical strands elsewhere.
pub fn generator_partition(i: usize, j: usize, n: usize) -> Result<Partition> {
    if i < 1 || j > n || i >= j {
        return Err(Error::OutOfRange { what: "generator index", value: if i < 1 || i >= j { i } else { j }, lo: 1, hi: n });
    }
    let mut hub = Vec::new();
    let mut blocks = Vec::new();
    for pos in 1..=n {
        let pair = [boundary_label(Side::Bottom, pos, n)?, boundary_label(Side::Top, pos, n)?];
        if (i..=j).contains(&pos) {
            hub.extend(pair);
        } else {
            blocks.push(pair.to_vec());
        }
    }
    blocks.push(hub);
    Partition::new(n, blocks)
}

pub fn generator_diagram(i: usize, j: usize, n: usize) -> Result<Diagram> {
    Ok(beta(&generator_partition(i, j, n)?))
}

pub fn stack(top: &Diagram, bottom: &Diagram) -> Result<Diagram> {
    top.stack(bottom)
}
