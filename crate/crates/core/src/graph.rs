//! Finite multigraphs, cellular maps between them, and the basic
//! predicates (immersion, core) used throughout the crate.
//!
//! Every edge is stored once with a canonical orientation. Traversal
//! direction lives in [`SignedEdge`]. An edge-end at a vertex (a *germ*) is
//! also written as a `SignedEdge`: `e` forward is the germ leaving `src(e)`,
//! `e` backward is the germ leaving `dst(e)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "fwd")]
    Forward,
    #[serde(rename = "bwd")]
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    /// Composition of directions: going `other` along an edge mapped with `self`.
    pub fn compose(self, other: Direction) -> Self {
        if self == other {
            Direction::Forward
        } else {
            Direction::Backward
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Backward => -1,
        }
    }
}

/// An edge together with a direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignedEdge {
    pub edge: EdgeId,
    pub dir: Direction,
}

impl SignedEdge {
    pub fn new(edge: EdgeId, dir: Direction) -> Self {
        SignedEdge { edge, dir }
    }

    pub fn forward(edge: EdgeId) -> Self {
        SignedEdge::new(edge, Direction::Forward)
    }

    pub fn backward(edge: EdgeId) -> Self {
        SignedEdge::new(edge, Direction::Backward)
    }

    pub fn reversed(self) -> Self {
        SignedEdge::new(self.edge, self.dir.flip())
    }

    pub fn is_forward(self) -> bool {
        self.dir == Direction::Forward
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub src: VertexId,
    pub dst: VertexId,
}

/// A finite directed multigraph. Loops and parallel edges are allowed.
///
/// The fields are public to the crate only; outside code goes through
/// [`Graph::add_vertex`]/[`Graph::add_edge`] (checked) or
/// [`Graph::from_parts`] (unchecked, see [`Graph::validate`]).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    pub(crate) vertices: BTreeSet<VertexId>,
    pub(crate) edges: BTreeMap<EdgeId, Edge>,
    // Vertex ids that appeared more than once in the raw input.
    pub(crate) duplicate_vertices: Vec<VertexId>,
    pub(crate) duplicate_edges: Vec<EdgeId>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    id: EdgeId,
    src: VertexId,
    dst: VertexId,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeRepr>,
}

impl From<GraphRepr> for Graph {
    fn from(r: GraphRepr) -> Self {
        Graph::from_parts(
            r.vertices,
            r.edges.into_iter().map(|e| (e.id, e.src, e.dst)),
        )
    }
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            vertices: g.vertices.iter().copied().collect(),
            edges: g
                .edges
                .iter()
                .map(|(&id, e)| EdgeRepr { id, src: e.src, dst: e.dst })
                .collect(),
        }
    }
}

/// One problem found by [`Graph::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    MissingSource { edge: EdgeId, vertex: VertexId },
    MissingTarget { edge: EdgeId, vertex: VertexId },
    DuplicateVertex(VertexId),
    DuplicateEdge(EdgeId),
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::MissingSource { edge, vertex } => {
                write!(f, "edge {edge} has missing source {vertex}")
            }
            GraphViolation::MissingTarget { edge, vertex } => {
                write!(f, "edge {edge} has missing target {vertex}")
            }
            GraphViolation::DuplicateVertex(v) => write!(f, "duplicate vertex id {v}"),
            GraphViolation::DuplicateEdge(e) => write!(f, "duplicate edge id {e}"),
        }
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Builds a graph without checking incidence. Duplicate ids are kept
    /// out of the maps but remembered so that [`Graph::validate`] reports
    /// them.
    pub fn from_parts(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    ) -> Self {
        let mut g = Graph::new();
        for v in vertices {
            if !g.vertices.insert(v) {
                g.duplicate_vertices.push(v);
            }
        }
        for (id, src, dst) in edges {
            if g.edges.insert(id, Edge { src, dst }).is_some() {
                g.duplicate_edges.push(id);
            }
        }
        g
    }

    /// The rose with one vertex `v0` and `rank` loops `e0..e{rank-1}`.
    /// Letter `a` names `e0`, `b` names `e1`, and so on.
    pub fn rose(rank: u32) -> Self {
        Graph::from_parts([VertexId(0)], (0..rank).map(|i| (EdgeId(i), VertexId(0), VertexId(0))))
    }

    /// A cycle of `n ≥ 1` edges, `e_i: v_i → v_{i+1 mod n}`.
    pub fn cycle(n: u32) -> Self {
        Graph::from_parts(
            (0..n).map(VertexId),
            (0..n).map(|i| (EdgeId(i), VertexId(i), VertexId((i + 1) % n))),
        )
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<()> {
        if !self.vertices.insert(v) {
            return Err(Error::InvalidGraph(format!("duplicate vertex {v}")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, id: EdgeId, src: VertexId, dst: VertexId) -> Result<()> {
        if !self.vertices.contains(&src) {
            return Err(Error::UnknownVertex(src));
        }
        if !self.vertices.contains(&dst) {
            return Err(Error::UnknownVertex(dst));
        }
        if self.edges.contains_key(&id) {
            return Err(Error::InvalidGraph(format!("duplicate edge {id}")));
        }
        self.edges.insert(id, Edge { src, dst });
        Ok(())
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.iter().next_back().map_or(0, |v| v.0 + 1))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, Edge)> + '_ {
        self.edges.iter().map(|(&id, &e)| (id, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.edges.is_empty()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edge(&self, id: EdgeId) -> Result<Edge> {
        self.edges.get(&id).copied().ok_or(Error::UnknownEdge(id))
    }

    /// Vertex where a signed edge starts.
    pub fn tail(&self, s: SignedEdge) -> Result<VertexId> {
        let e = self.edge(s.edge)?;
        Ok(if s.is_forward() { e.src } else { e.dst })
    }

    /// Vertex where a signed edge ends.
    pub fn head(&self, s: SignedEdge) -> Result<VertexId> {
        self.tail(s.reversed())
    }

    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut report: Vec<GraphViolation> = self
            .duplicate_vertices
            .iter()
            .map(|&v| GraphViolation::DuplicateVertex(v))
            .collect();
        report.extend(self.duplicate_edges.iter().map(|&e| GraphViolation::DuplicateEdge(e)));
        for (&id, e) in &self.edges {
            if !self.vertices.contains(&e.src) {
                report.push(GraphViolation::MissingSource { edge: id, vertex: e.src });
            }
            if !self.vertices.contains(&e.dst) {
                report.push(GraphViolation::MissingTarget { edge: id, vertex: e.dst });
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidGraph(v.to_string())),
        }
    }

    pub fn euler_characteristic(&self) -> Result<i64> {
        self.ensure_valid()?;
        Ok(self.vertices.len() as i64 - self.edges.len() as i64)
    }

    /// `1 - χ`, the rank of π₁ for a connected graph.
    pub fn rank(&self) -> Result<i64> {
        Ok(1 - self.euler_characteristic()?)
    }

    /// Number of edge-ends at `v`; a loop counts twice.
    pub fn valence(&self, v: VertexId) -> Result<usize> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(self
            .edges
            .values()
            .map(|e| usize::from(e.src == v) + usize::from(e.dst == v))
            .sum())
    }

    /// Germs leaving each vertex, in (edge id, direction) order.
    pub fn germs(&self) -> BTreeMap<VertexId, Vec<SignedEdge>> {
        let mut out: BTreeMap<VertexId, Vec<SignedEdge>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (&id, e) in &self.edges {
            out.entry(e.src).or_default().push(SignedEdge::forward(id));
            out.entry(e.dst).or_default().push(SignedEdge::backward(id));
        }
        out
    }

    fn valences(&self) -> BTreeMap<VertexId, usize> {
        self.germs().into_iter().map(|(v, g)| (v, g.len())).collect()
    }

    /// No vertex of valence ≤ 1. A lone vertex (and the empty graph) counts
    /// as core.
    pub fn is_core(&self) -> bool {
        if self.edges.is_empty() && self.vertices.len() <= 1 {
            return true;
        }
        self.valences().values().all(|&k| k >= 2)
    }

    /// Repeatedly deletes valence-1 vertices with their edge. Isolated
    /// vertices are dropped too, except that the last remaining vertex is
    /// always kept, so a tree trims down to one vertex. Ids are preserved.
    pub fn core(&self) -> Graph {
        let mut g = self.clone();
        g.duplicate_vertices.clear();
        g.duplicate_edges.clear();
        loop {
            let germs = g.germs();
            let leaf = germs.iter().find(|(_, gs)| gs.len() == 1).map(|(&v, gs)| (v, gs[0].edge));
            if let Some((v, e)) = leaf {
                g.edges.remove(&e);
                g.vertices.remove(&v);
                continue;
            }
            let isolated = germs.iter().find(|(_, gs)| gs.is_empty()).map(|(&v, _)| v);
            match isolated {
                Some(v) if g.vertices.len() > 1 => {
                    g.vertices.remove(&v);
                }
                _ => return g,
            }
        }
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices.iter().next() {
            None => true,
            Some(&start) => self.reachable_from(start, &self.germs()).len() == self.vertices.len(),
        }
    }

    fn reachable_from(&self, start: VertexId, germs: &BTreeMap<VertexId, Vec<SignedEdge>>) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &s in &germs[&v] {
                let w = self.head(s).expect("germ of a valid graph");
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Vertex sets of connected components, ordered by least vertex id.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let germs = self.germs();
        let mut left = self.vertices.clone();
        let mut out = Vec::new();
        while let Some(&v) = left.iter().next() {
            let comp = self.reachable_from(v, &germs);
            for w in &comp {
                left.remove(w);
            }
            out.push(comp);
        }
        out
    }

    /// The subgraph on `keep`, with every edge whose ends both lie in `keep`.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> Graph {
        Graph::from_parts(
            keep.iter().copied(),
            self.edges
                .iter()
                .filter(|(_, e)| keep.contains(&e.src) && keep.contains(&e.dst))
                .map(|(&id, e)| (id, e.src, e.dst)),
        )
    }

    /// Breadth-first spanning tree from the least vertex, scanning incident
    /// edges in id order.
    pub fn spanning_tree(&self) -> Result<BTreeSet<EdgeId>> {
        self.ensure_valid()?;
        let Some(&root) = self.vertices.iter().next() else {
            return Err(Error::EmptyGraph);
        };
        let germs = self.germs();
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        let mut tree = BTreeSet::new();
        while let Some(v) = queue.pop_front() {
            let mut incident = germs[&v].clone();
            incident.sort_by_key(|s| s.edge);
            for s in incident {
                let w = self.head(s)?;
                if seen.insert(w) {
                    tree.insert(s.edge);
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != self.vertices.len() {
            return Err(Error::Disconnected);
        }
        Ok(tree)
    }

    /// True when the graph is a single embedded cycle.
    pub fn is_circle(&self) -> bool {
        !self.edges.is_empty()
            && self.vertices.len() == self.edges.len()
            && self.is_connected()
            && self.valences().values().all(|&k| k == 2)
    }

    /// Relabels vertices and edges to `0..n` in id order; returns the new
    /// graph and the old-to-new maps.
    pub fn compacted(&self) -> (Graph, BTreeMap<VertexId, VertexId>, BTreeMap<EdgeId, EdgeId>) {
        let vmap: BTreeMap<_, _> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, VertexId(i as u32))).collect();
        let emap: BTreeMap<_, _> =
            self.edges.keys().enumerate().map(|(i, &e)| (e, EdgeId(i as u32))).collect();
        let g = Graph::from_parts(
            vmap.values().copied(),
            self.edges.iter().map(|(id, e)| (emap[id], vmap[&e.src], vmap[&e.dst])),
        );
        (g, vmap, emap)
    }
}

/// A cellular map of graphs: vertices to vertices, edges to signed edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMorphism {
    pub domain: Graph,
    pub codomain: Graph,
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub edge_map: BTreeMap<EdgeId, SignedEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    Domain(GraphViolation),
    Codomain(GraphViolation),
    UnmappedVertex(VertexId),
    UnmappedEdge(EdgeId),
    BadVertexImage { vertex: VertexId, image: VertexId },
    BadEdgeImage { edge: EdgeId, image: EdgeId },
    Incidence { edge: EdgeId },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Domain(v) => write!(f, "domain: {v}"),
            MorphismViolation::Codomain(v) => write!(f, "codomain: {v}"),
            MorphismViolation::UnmappedVertex(v) => write!(f, "vertex {v} is unmapped"),
            MorphismViolation::UnmappedEdge(e) => write!(f, "edge {e} is unmapped"),
            MorphismViolation::BadVertexImage { vertex, image } => {
                write!(f, "vertex {vertex} maps to missing {image}")
            }
            MorphismViolation::BadEdgeImage { edge, image } => {
                write!(f, "edge {edge} maps to missing {image}")
            }
            MorphismViolation::Incidence { edge } => {
                write!(f, "edge {edge} does not commute with incidence")
            }
        }
    }
}

impl GraphMorphism {
    pub fn identity(g: &Graph) -> Self {
        GraphMorphism {
            domain: g.clone(),
            codomain: g.clone(),
            vertex_map: g.vertices().map(|v| (v, v)).collect(),
            edge_map: g.edge_ids().map(|e| (e, SignedEdge::forward(e))).collect(),
        }
    }

    /// The inclusion of a subgraph (same ids) into `ambient`.
    pub fn inclusion(sub: &Graph, ambient: &Graph) -> Self {
        GraphMorphism {
            domain: sub.clone(),
            codomain: ambient.clone(),
            vertex_map: sub.vertices().map(|v| (v, v)).collect(),
            edge_map: sub.edge_ids().map(|e| (e, SignedEdge::forward(e))).collect(),
        }
    }

    pub fn validate(&self) -> Vec<MorphismViolation> {
        let mut report: Vec<MorphismViolation> =
            self.domain.validate().into_iter().map(MorphismViolation::Domain).collect();
        report.extend(self.codomain.validate().into_iter().map(MorphismViolation::Codomain));
        for v in self.domain.vertices() {
            match self.vertex_map.get(&v) {
                None => report.push(MorphismViolation::UnmappedVertex(v)),
                Some(&w) if !self.codomain.has_vertex(w) => {
                    report.push(MorphismViolation::BadVertexImage { vertex: v, image: w })
                }
                Some(_) => {}
            }
        }
        for (id, e) in self.domain.edges() {
            let Some(&img) = self.edge_map.get(&id) else {
                report.push(MorphismViolation::UnmappedEdge(id));
                continue;
            };
            let (Ok(t), Ok(h)) = (self.codomain.tail(img), self.codomain.head(img)) else {
                report.push(MorphismViolation::BadEdgeImage { edge: id, image: img.edge });
                continue;
            };
            if self.vertex_map.get(&e.src) != Some(&t) || self.vertex_map.get(&e.dst) != Some(&h) {
                report.push(MorphismViolation::Incidence { edge: id });
            }
        }
        report
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidMorphism(v.to_string())),
        }
    }

    pub fn map_vertex(&self, v: VertexId) -> Result<VertexId> {
        self.vertex_map.get(&v).copied().ok_or(Error::UnknownVertex(v))
    }

    /// Image of a signed edge (or germ).
    pub fn map_signed(&self, s: SignedEdge) -> Result<SignedEdge> {
        let img = self.edge_map.get(&s.edge).copied().ok_or(Error::UnknownEdge(s.edge))?;
        Ok(SignedEdge::new(img.edge, img.dir.compose(s.dir)))
    }

    /// Locally injective: at every vertex, distinct germs have distinct images.
    pub fn is_immersion(&self) -> Result<bool> {
        self.ensure_valid()?;
        for germs in self.domain.germs().values() {
            let mut images = BTreeSet::new();
            for &g in germs {
                if !images.insert(self.map_signed(g)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn compose(&self, after: &GraphMorphism) -> Result<GraphMorphism> {
        let vertex_map = self
            .vertex_map
            .iter()
            .map(|(&v, &w)| Ok((v, after.map_vertex(w)?)))
            .collect::<Result<_>>()?;
        let edge_map = self
            .edge_map
            .iter()
            .map(|(&e, &s)| Ok((e, after.map_signed(s)?)))
            .collect::<Result<_>>()?;
        Ok(GraphMorphism {
            domain: self.domain.clone(),
            codomain: after.codomain.clone(),
            vertex_map,
            edge_map,
        })
    }

    /// Restriction to a subgraph of the domain (ids preserved).
    pub fn restrict(&self, sub: &Graph) -> GraphMorphism {
        GraphMorphism {
            domain: sub.clone(),
            codomain: self.codomain.clone(),
            vertex_map: sub.vertices().filter_map(|v| Some((v, *self.vertex_map.get(&v)?))).collect(),
            edge_map: sub.edge_ids().filter_map(|e| Some((e, *self.edge_map.get(&e)?))).collect(),
        }
    }
}
