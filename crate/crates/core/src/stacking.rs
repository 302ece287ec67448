//! Stackings of immersed circles.
//!
//! An embedding of 𝕊 into Γ×ℝ over Λ is recorded combinatorially: for
//! every edge of Γ a bottom-to-top order of the traversals of that edge,
//! and for every vertex a bottom-to-top order of the points of 𝕊 over it.
//! Arcs over one edge are disjoint, so their vertical order is constant
//! along the edge and must agree with the order of their endpoints at both
//! ends. Those orders, subject to that compatibility, are the stacking.
//!
//! Existence for primitive loops is constructive: restrict to the image,
//! pick a homomorphism H₁ → ℤ killing the loop, lift the loop to the
//! infinite cyclic cover, recurse, and push the stacking down by ordering
//! lexicographically on (level in the cover, order upstairs).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};
use crate::pullback::{is_reducible, LoopPullback};
use crate::word::{Loop, MultiLoop};

/// A traversal or point of 𝕊: (circle index, position).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PosRef(pub usize, pub usize);

impl PosRef {
    pub fn circle(self) -> usize {
        self.0
    }

    pub fn pos(self) -> usize {
        self.1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stacking {
    pub subject: MultiLoop,
    /// Bottom to top, traversals of each edge.
    pub edge_orders: BTreeMap<EdgeId, Vec<PosRef>>,
    /// Bottom to top, points over each vertex.
    pub vertex_orders: BTreeMap<VertexId, Vec<PosRef>>,
}

/// Wire form: `{"edge_orders":{edge:[refs]},"vertex_orders":{vertex:[refs]}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackingOrders {
    pub edge_orders: BTreeMap<EdgeId, Vec<PosRef>>,
    pub vertex_orders: BTreeMap<VertexId, Vec<PosRef>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StackingViolation {
    Subject(String),
    EdgeOrderNotPermutation(EdgeId),
    VertexOrderNotPermutation(VertexId),
    UnknownEdge(EdgeId),
    UnknownVertex(VertexId),
    /// The two refs are ordered one way over the edge and the other way
    /// over `vertex` at the given end.
    Incompatible { edge: EdgeId, vertex: VertexId, lower: PosRef, upper: PosRef },
}

impl fmt::Display for StackingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StackingViolation::Subject(s) => write!(f, "subject: {s}"),
            StackingViolation::EdgeOrderNotPermutation(e) => {
                write!(f, "order on {e} is not a permutation of its traversals")
            }
            StackingViolation::VertexOrderNotPermutation(v) => {
                write!(f, "order on {v} is not a permutation of its points")
            }
            StackingViolation::UnknownEdge(e) => write!(f, "order given for unknown edge {e}"),
            StackingViolation::UnknownVertex(v) => write!(f, "order given for unknown vertex {v}"),
            StackingViolation::Incompatible { edge, vertex, lower, upper } => write!(
                f,
                "{lower:?} below {upper:?} on {edge} but not at its end over {vertex}"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "above")]
    Above,
    #[serde(rename = "below")]
    Below,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cell {
    /// The point at a position (start of that traversal).
    Point(usize),
    /// The open edge traversed at a position.
    Traversal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentKind {
    Circle,
    OpenArc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleComponent {
    pub circle: usize,
    pub kind: ComponentKind,
    /// Cells in the direction of the circle.
    pub cells: Vec<Cell>,
}

/// The part of 𝕊 seen from one side: tops (or bottoms) of every order,
/// split into maximal connected runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisibleSet {
    pub side: Side,
    pub points: BTreeSet<(usize, Cell)>,
    pub components: Vec<VisibleComponent>,
}

impl VisibleSet {
    pub fn open_arcs(&self) -> usize {
        self.components.iter().filter(|c| c.kind == ComponentKind::OpenArc).count()
    }

    pub fn contains_circle(&self) -> bool {
        self.components.iter().any(|c| c.kind == ComponentKind::Circle)
    }

    pub fn meets_circle(&self, j: usize) -> bool {
        self.components.iter().any(|c| c.circle == j)
    }
}

impl Stacking {
    /// One entry per traversal in circle order, and per point.
    fn expected_sets(&self) -> (BTreeMap<EdgeId, BTreeSet<PosRef>>, BTreeMap<VertexId, BTreeSet<PosRef>>) {
        let mut edges: BTreeMap<EdgeId, BTreeSet<PosRef>> = BTreeMap::new();
        let mut verts: BTreeMap<VertexId, BTreeSet<PosRef>> = BTreeMap::new();
        for (j, l) in self.subject.loops.iter().enumerate() {
            for (i, s) in l.path.iter().enumerate() {
                edges.entry(s.edge).or_default().insert(PosRef(j, i));
                verts.entry(self.subject.point(j, i)).or_default().insert(PosRef(j, i));
            }
        }
        (edges, verts)
    }

    pub fn validate(&self) -> Vec<StackingViolation> {
        let mut report = Vec::new();
        if let Err(e) = self.subject.graph.ensure_valid() {
            return vec![StackingViolation::Subject(e.to_string())];
        }
        for l in &self.subject.loops {
            if let Err(e) = l.validate(&self.subject.graph) {
                return vec![StackingViolation::Subject(e.to_string())];
            }
        }
        let (edges, verts) = self.expected_sets();
        let g = &self.subject.graph;
        for e in self.edge_orders.keys().filter(|e| g.edge(**e).is_err()) {
            report.push(StackingViolation::UnknownEdge(*e));
        }
        for v in self.vertex_orders.keys().filter(|v| !g.has_vertex(**v)) {
            report.push(StackingViolation::UnknownVertex(*v));
        }
        let empty = Vec::new();
        for e in g.edge_ids() {
            let order = self.edge_orders.get(&e).unwrap_or(&empty);
            let as_set: BTreeSet<_> = order.iter().copied().collect();
            if as_set.len() != order.len() || Some(&as_set) != edges.get(&e).or(Some(&BTreeSet::new())) {
                report.push(StackingViolation::EdgeOrderNotPermutation(e));
            }
        }
        for v in g.vertices() {
            let order = self.vertex_orders.get(&v).unwrap_or(&empty);
            let as_set: BTreeSet<_> = order.iter().copied().collect();
            if as_set.len() != order.len() || Some(&as_set) != verts.get(&v).or(Some(&BTreeSet::new())) {
                report.push(StackingViolation::VertexOrderNotPermutation(v));
            }
        }
        if !report.is_empty() {
            return report;
        }

        let vertex_rank = rank_map(&self.vertex_orders);
        for (&e, order) in &self.edge_orders {
            let ed = g.edge(e).expect("checked");
            // endpoint of each traversal at the source end and at the target end
            for (at_src, vertex) in [(true, ed.src), (false, ed.dst)] {
                let end_rank = |r: PosRef| {
                    let s = self.subject.loops[r.0].path[r.1];
                    let n = self.subject.loops[r.0].len();
                    let starts_here = s.is_forward() == at_src;
                    let point = if starts_here { r } else { PosRef(r.0, (r.1 + 1) % n) };
                    vertex_rank[&point]
                };
                for pair in order.windows(2) {
                    if end_rank(pair[0]) >= end_rank(pair[1]) {
                        report.push(StackingViolation::Incompatible {
                            edge: e,
                            vertex,
                            lower: pair[0],
                            upper: pair[1],
                        });
                    }
                }
            }
        }
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidStacking(v.to_string())),
        }
    }

    pub fn orders(&self) -> StackingOrders {
        StackingOrders { edge_orders: self.edge_orders.clone(), vertex_orders: self.vertex_orders.clone() }
    }

    pub fn from_orders(subject: MultiLoop, orders: StackingOrders) -> Stacking {
        Stacking { subject, edge_orders: orders.edge_orders, vertex_orders: orders.vertex_orders }
    }

    pub fn visible_set(&self, side: Side) -> Result<VisibleSet> {
        self.ensure_valid()?;
        let pick = |o: &Vec<PosRef>| match side {
            Side::Above => o.last().copied(),
            Side::Below => o.first().copied(),
        };
        let mut points = BTreeSet::new();
        for r in self.edge_orders.values().filter_map(pick) {
            points.insert((r.0, Cell::Traversal(r.1)));
        }
        for r in self.vertex_orders.values().filter_map(pick) {
            points.insert((r.0, Cell::Point(r.1)));
        }

        let mut components = Vec::new();
        for (j, l) in self.subject.loops.iter().enumerate() {
            let n = l.len();
            let cell = |k: usize| if k.is_multiple_of(2) { Cell::Point(k / 2) } else { Cell::Traversal(k / 2) };
            let inside = |k: usize| points.contains(&(j, cell(k % (2 * n))));
            let Some(gap) = (0..2 * n).find(|&k| !inside(k)) else {
                components.push(VisibleComponent {
                    circle: j,
                    kind: ComponentKind::Circle,
                    cells: (0..2 * n).map(cell).collect(),
                });
                continue;
            };
            let mut run: Vec<Cell> = Vec::new();
            for k in gap + 1..=gap + 2 * n {
                if inside(k) {
                    run.push(cell(k % (2 * n)));
                } else if !run.is_empty() {
                    components.push(open_arc(j, std::mem::take(&mut run)));
                }
            }
        }
        Ok(VisibleSet { side, points, components })
    }

    pub fn count_open_arcs(&self, side: Side) -> Result<usize> {
        Ok(self.visible_set(side)?.open_arcs())
    }

    /// Both visible sets meet every circle.
    pub fn is_good(&self) -> Result<bool> {
        let above = self.visible_set(Side::Above)?;
        let below = self.visible_set(Side::Below)?;
        Ok((0..self.subject.loops.len()).all(|j| above.meets_circle(j) && below.meets_circle(j)))
    }

    pub fn reducibility_link(&self) -> Result<ReducibilityLink> {
        let above = self.visible_set(Side::Above)?;
        let below = self.visible_set(Side::Below)?;
        let shared_edge = above
            .points
            .intersection(&below.points)
            .any(|(_, c)| matches!(c, Cell::Traversal(_)));
        let counts = self.subject.traversal_counts();
        let traversed_once = counts.values().any(|&k| k == 1);
        let surjective = self.subject.is_surjective();
        let reducible = is_reducible(&self.subject).reducible;
        let good = self.is_good()?;
        let visible_circle = above.contains_circle() || below.contains_circle();
        Ok(ReducibilityLink {
            surjective,
            shared_edge,
            traversed_once,
            reducible,
            good,
            visible_circle,
        })
    }
}

fn open_arc(circle: usize, cells: Vec<Cell>) -> VisibleComponent {
    assert!(
        matches!(cells.first(), Some(Cell::Traversal(_))) && matches!(cells.last(), Some(Cell::Traversal(_))),
        "visible runs of a valid stacking are open"
    );
    VisibleComponent { circle, kind: ComponentKind::OpenArc, cells }
}

/// Both sides of the two reducibility statements for one stacking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibilityLink {
    pub surjective: bool,
    /// Some edge traversal is both a top and a bottom.
    pub shared_edge: bool,
    /// Some edge is traversed exactly once.
    pub traversed_once: bool,
    /// Some edge of the ambient graph is traversed at most once.
    pub reducible: bool,
    pub good: bool,
    /// A full circle is visible from above or below.
    pub visible_circle: bool,
}

impl ReducibilityLink {
    /// `shared_edge ⇔ traversed_once`.
    pub fn equivalence_holds(&self) -> bool {
        self.shared_edge == self.traversed_once
    }

    /// `good ∧ visible_circle ⇒ reducible`.
    pub fn implication_holds(&self) -> bool {
        !(self.good && self.visible_circle) || self.reducible
    }
}

fn rank_map<K>(orders: &BTreeMap<K, Vec<PosRef>>) -> BTreeMap<PosRef, usize> {
    orders.values().flat_map(|o| o.iter().enumerate().map(|(k, &r)| (r, k))).collect()
}

/// Pulls a stacking of Λ: 𝕊 → Γ back to the circles of the pullback along
/// `rho`. Orders upstairs are induced from the orders of the σ-images.
pub fn pullback_stacking(s: &Stacking, rho: &GraphMorphism, pb: &LoopPullback) -> Result<Stacking> {
    if rho.codomain != s.subject.graph || pb.circles.graph != rho.domain {
        return Err(Error::CodomainMismatch);
    }
    if pb.base_lengths.len() != s.subject.loops.len() {
        return Err(Error::MalformedPullback("pullback of a different subject".into()));
    }
    let edge_rank = rank_map(&s.edge_orders);
    let vertex_rank = rank_map(&s.vertex_orders);

    let sub = &pb.circles;
    let mut edges: BTreeMap<EdgeId, Vec<(usize, PosRef)>> = BTreeMap::new();
    let mut verts: BTreeMap<VertexId, Vec<(usize, PosRef)>> = BTreeMap::new();
    for (j, (l, lift)) in sub.loops.iter().zip(&pb.lifts).enumerate() {
        for (k, step) in l.path.iter().enumerate() {
            let below = PosRef(lift.base_loop, lift.base_positions[k]);
            let e_rank = *edge_rank
                .get(&below)
                .ok_or_else(|| Error::MalformedPullback(format!("{below:?} is not stacked")))?;
            let v_rank = *vertex_rank
                .get(&below)
                .ok_or_else(|| Error::MalformedPullback(format!("{below:?} is not stacked")))?;
            edges.entry(step.edge).or_default().push((e_rank, PosRef(j, k)));
            verts.entry(sub.point(j, k)).or_default().push((v_rank, PosRef(j, k)));
        }
    }
    fn sorted<K: Ord>(m: BTreeMap<K, Vec<(usize, PosRef)>>) -> Result<BTreeMap<K, Vec<PosRef>>> {
        m.into_iter()
            .map(|(k, mut v)| {
                v.sort();
                if v.windows(2).any(|p| p[0].0 == p[1].0) {
                    return Err(Error::MalformedPullback("two lifts share a σ-image".into()));
                }
                Ok((k, v.into_iter().map(|(_, r)| r).collect()))
            })
            .collect()
    }
    let out = Stacking { subject: sub.clone(), edge_orders: sorted(edges)?, vertex_orders: sorted(verts)? };
    let problems = out.validate();
    assert!(problems.is_empty(), "pulled-back stacking is invalid: {problems:?}");
    if s.is_good()? {
        assert!(out.is_good()?, "goodness is inherited by pullbacks");
    }
    Ok(out)
}

/// A homomorphism H₁(Γ) → ℤ given by integer weights on edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocycle {
    pub weights: BTreeMap<EdgeId, i64>,
}

impl Cocycle {
    pub fn weight(&self, e: EdgeId) -> i64 {
        self.weights.get(&e).copied().unwrap_or(0)
    }

    pub fn step(&self, s: SignedEdge) -> i64 {
        self.weight(s.edge) * s.dir.sign()
    }

    /// φ of the loop: Σ of signed weights along it.
    pub fn evaluate(&self, l: &Loop) -> i64 {
        l.path.iter().map(|&s| self.step(s)).sum()
    }
}

/// Chooses a primitive nonzero cocycle vanishing on the deterministic
/// spanning tree and killing the class of `l`.
///
/// With `v` the signed counts of `l` on the non-tree edges (in id order):
/// if `v = 0` the weight is 1 on the first non-tree edge; otherwise, for
/// the first pair of indices `i < j` with `(v_i, v_j) ≠ 0`, the weights are
/// `v_j/d` and `-v_i/d` with `d = gcd(v_i, v_j)`, signed so the first
/// nonzero weight is positive.
pub fn select_cocycle(g: &Graph, l: &Loop) -> Result<Cocycle> {
    let rank = g.rank()?;
    if rank < 2 {
        return Err(Error::RankTooSmall(rank));
    }
    l.validate(g)?;
    if !MultiLoop::single(g.clone(), l.clone())?.is_surjective() {
        return Err(Error::InvalidLoop("loop does not cover the graph".into()));
    }
    let tree = g.spanning_tree()?;
    let non_tree: Vec<EdgeId> = g.edge_ids().filter(|e| !tree.contains(e)).collect();
    let counts = l.signed_counts();
    let v: Vec<i64> = non_tree.iter().map(|e| counts.get(e).copied().unwrap_or(0)).collect();

    let mut z = vec![0i64; v.len()];
    let pair = (0..v.len())
        .flat_map(|i| (i + 1..v.len()).map(move |j| (i, j)))
        .find(|&(i, j)| v[i] != 0 || v[j] != 0);
    match pair {
        None => z[0] = 1,
        Some((i, j)) => {
            let d = v[i].gcd(&v[j]);
            z[i] = v[j] / d;
            z[j] = -v[i] / d;
            if z.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
                z.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    let mut weights: BTreeMap<EdgeId, i64> = g.edge_ids().map(|e| (e, 0)).collect();
    for (e, w) in non_tree.iter().zip(z) {
        weights.insert(*e, w);
    }
    let c = Cocycle { weights };
    debug_assert_eq!(c.evaluate(l), 0);
    Ok(c)
}

/// The finite part of the infinite cyclic cover visited by the lift of a
/// loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicLift {
    /// Level of the point at each position; `levels[0] = 0`.
    pub levels: Vec<i64>,
    pub graph: Graph,
    pub projection: GraphMorphism,
    pub lifted: Loop,
    /// Level of the source end of the edge at each step.
    pub start_levels: Vec<i64>,
    /// Vertex of the cover at each position.
    pub points: Vec<VertexId>,
}

/// Lifts `l` to the infinite cyclic cover of `g` defined by `z`, keeping
/// only the cells the lift visits. Cover cells are (cell, level) pairs; the
/// edge `(e, k)` runs from `(src e, k)` to `(dst e, k + z(e))`.
pub fn lift_to_cyclic_cover(g: &Graph, l: &Loop, z: &Cocycle) -> Result<CyclicLift> {
    l.validate(g)?;
    let n = l.len();
    let mut levels = Vec::with_capacity(n + 1);
    levels.push(0i64);
    for &s in &l.path {
        levels.push(levels.last().unwrap() + z.step(s));
    }
    let total = levels.pop().unwrap();
    if total != 0 {
        return Err(Error::NonzeroLevel(total));
    }
    if l.path.iter().all(|s| z.weight(s.edge) == 0) {
        return Err(Error::TrivialCover);
    }

    let start_levels: Vec<i64> = (0..n)
        .map(|i| if l.path[i].is_forward() { levels[i] } else { levels[(i + 1) % n] })
        .collect();
    let cover_points: Vec<(VertexId, i64)> = (0..n).map(|i| (l.point(g, i), levels[i])).collect();
    let cover_edges: Vec<(EdgeId, i64)> = (0..n).map(|i| (l.path[i].edge, start_levels[i])).collect();

    let vertex_ids: BTreeMap<(VertexId, i64), VertexId> = cover_points
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(k, c)| (c, VertexId(k as u32)))
        .collect();
    let edge_ids: BTreeMap<(EdgeId, i64), EdgeId> = cover_edges
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(k, c)| (c, EdgeId(k as u32)))
        .collect();

    let mut graph = Graph::from_parts(vertex_ids.values().copied(), []);
    let mut edge_map = BTreeMap::new();
    for (&(e, k), &id) in &edge_ids {
        let ed = g.edge(e)?;
        graph.add_edge(id, vertex_ids[&(ed.src, k)], vertex_ids[&(ed.dst, k + z.weight(e))])?;
        edge_map.insert(id, SignedEdge::forward(e));
    }
    let projection = GraphMorphism {
        domain: graph.clone(),
        codomain: g.clone(),
        vertex_map: vertex_ids.iter().map(|(&(v, _), &id)| (id, v)).collect(),
        edge_map,
    };
    let lifted = Loop::new((0..n).map(|i| SignedEdge::new(edge_ids[&cover_edges[i]], l.path[i].dir)).collect());
    let points = cover_points.iter().map(|c| vertex_ids[c]).collect();

    lifted.validate(&graph).expect("lift of an immersed loop is an immersed loop");
    assert!(projection.is_immersion()?, "cover projection is an immersion");
    if graph.num_edges() + graph.num_vertices() <= g.num_edges() + g.num_vertices() {
        // the projection is an isomorphism: z is a coboundary on the image
        return Err(Error::TrivialCover);
    }
    Ok(CyclicLift { levels, graph, projection, lifted, start_levels, points })
}

/// One floor of the tower built by [`construct_stacking`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerStage {
    /// Image of the loop at this floor.
    pub graph: Graph,
    pub path: Loop,
    pub edge_count: usize,
    pub vertex_count: usize,
    /// Absent on the top floor, where the image is a circle.
    pub cocycle: Option<Cocycle>,
    pub levels: Option<Vec<i64>>,
    pub lifted: Option<Loop>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerTrace {
    pub stages: Vec<TowerStage>,
}

impl TowerTrace {
    /// Number of cyclic covers taken.
    pub fn depth(&self) -> usize {
        self.stages.len().saturating_sub(1)
    }
}

/// Builds a stacking of a primitive immersed loop by cyclic tower lifting.
pub fn construct_stacking(g: &Graph, l: &Loop) -> Result<(Stacking, TowerTrace)> {
    g.ensure_valid()?;
    l.validate(g)?;
    if !l.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let subject = MultiLoop::single(g.clone(), l.clone())?;
    let n = l.len();

    let mut stages: Vec<TowerStage> = Vec::new();
    let mut lifts: Vec<CyclicLift> = Vec::new();
    let (mut graph, _) = subject.image_subgraph();
    let mut path = l.clone();
    loop {
        assert!(path.is_primitive(), "lifts of a primitive loop are primitive");
        let edge_count = graph.num_edges();
        let vertex_count = graph.num_vertices();
        assert!(edge_count <= n, "image of a loop has at most |w| edges");
        if let Some(prev) = stages.last() {
            assert!(edge_count >= prev.edge_count, "edge count never drops up the tower");
            assert!(vertex_count >= prev.vertex_count, "vertex count never drops up the tower");
            assert!(
                edge_count + vertex_count > prev.edge_count + prev.vertex_count,
                "cell count increases up the tower"
            );
        }
        if graph.is_circle() {
            assert_eq!(path.len(), edge_count, "a primitive loop covers its circle image once");
            stages.push(TowerStage { graph, path, edge_count, vertex_count, cocycle: None, levels: None, lifted: None });
            break;
        }
        let z = select_cocycle(&graph, &path)?;
        assert_eq!(z.evaluate(&path), 0);
        let lift = lift_to_cyclic_cover(&graph, &path, &z)?;
        let next_graph = lift.graph.clone();
        let next_path = lift.lifted.clone();
        stages.push(TowerStage {
            graph,
            path,
            edge_count,
            vertex_count,
            cocycle: Some(z),
            levels: Some(lift.levels.clone()),
            lifted: Some(lift.lifted.clone()),
        });
        lifts.push(lift);
        graph = next_graph;
        path = next_path;
    }
    assert!(stages.len() <= n + 1);

    // Ranks on the top floor are all zero; each floor down sorts by
    // (level, rank upstairs).
    let mut trav_rank = vec![0usize; n];
    let mut point_rank = vec![0usize; n];
    for (stage, lift) in stages.iter().zip(&lifts).rev() {
        // ((level, rank upstairs), position)
        type Keyed = Vec<((i64, usize), usize)>;
        let mut by_edge: BTreeMap<EdgeId, Keyed> = BTreeMap::new();
        let mut by_vertex: BTreeMap<VertexId, Keyed> = BTreeMap::new();
        for i in 0..n {
            by_edge.entry(stage.path.path[i].edge).or_default().push(((lift.start_levels[i], trav_rank[i]), i));
            by_vertex.entry(stage.path.point(&stage.graph, i)).or_default().push(((lift.levels[i], point_rank[i]), i));
        }
        for group in by_edge.values_mut().chain(by_vertex.values_mut()) {
            group.sort();
            assert!(group.windows(2).all(|p| p[0].0 != p[1].0), "keys are distinct");
        }
        for group in by_edge.values() {
            for (k, &(_, i)) in group.iter().enumerate() {
                trav_rank[i] = k;
            }
        }
        for group in by_vertex.values() {
            for (k, &(_, i)) in group.iter().enumerate() {
                point_rank[i] = k;
            }
        }
    }

    let mut edge_orders: BTreeMap<EdgeId, Vec<PosRef>> = BTreeMap::new();
    let mut vertex_orders: BTreeMap<VertexId, Vec<PosRef>> = BTreeMap::new();
    for i in 0..n {
        let slot = edge_orders.entry(l.path[i].edge).or_default();
        slot.resize(slot.len().max(trav_rank[i] + 1), PosRef(usize::MAX, usize::MAX));
        slot[trav_rank[i]] = PosRef(0, i);
        let slot = vertex_orders.entry(l.point(g, i)).or_default();
        slot.resize(slot.len().max(point_rank[i] + 1), PosRef(usize::MAX, usize::MAX));
        slot[point_rank[i]] = PosRef(0, i);
    }
    let stacking = Stacking { subject, edge_orders, vertex_orders };
    let problems = stacking.validate();
    assert!(problems.is_empty(), "constructed stacking is invalid: {problems:?}");
    assert!(stacking.is_good()?, "a stacking of one circle is good");
    Ok((stacking, TowerTrace { stages }))
}

/// The stacking of `count` parallel copies of `l` (a loop covering a circle
/// graph once), copy `j` at height `j`.
pub fn parallel_copies(g: &Graph, l: &Loop, count: usize) -> Result<Stacking> {
    let subject = MultiLoop::new(g.clone(), vec![l.clone(); count])?;
    let mut edge_orders: BTreeMap<EdgeId, Vec<PosRef>> = BTreeMap::new();
    let mut vertex_orders: BTreeMap<VertexId, Vec<PosRef>> = BTreeMap::new();
    for j in 0..count {
        for i in 0..l.len() {
            edge_orders.entry(l.path[i].edge).or_default().push(PosRef(j, i));
            vertex_orders.entry(l.point(g, i)).or_default().push(PosRef(j, i));
        }
    }
    Ok(Stacking { subject, edge_orders, vertex_orders })
}
