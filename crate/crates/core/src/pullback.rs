//! Fiber products of graph maps and the circular part of the pullback of
//! an immersed loop along an immersion.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};
use crate::word::{Loop, MultiLoop};

/// The fiber product of two maps to a common graph, with both projections
/// and the pair of cells behind every cell of the total graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberProduct {
    pub total: Graph,
    pub proj_left: GraphMorphism,
    pub proj_right: GraphMorphism,
    pub vertex_pairs: BTreeMap<VertexId, (VertexId, VertexId)>,
    pub edge_pairs: BTreeMap<EdgeId, (EdgeId, EdgeId)>,
}

/// Pullback of two immersions. Vertices are the pairs with equal image;
/// edges are the pairs with equal image edge, oriented along the left
/// factor (the right factor edge is reversed when the two images run in
/// opposite directions). Ids are assigned in lexicographic pair order.
pub fn fiber_product(f1: &GraphMorphism, f2: &GraphMorphism) -> Result<FiberProduct> {
    if f1.codomain != f2.codomain {
        return Err(Error::CodomainMismatch);
    }
    if !f1.is_immersion()? || !f2.is_immersion()? {
        return Err(Error::NotImmersion);
    }

    let mut right_over: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (&y, &img) in &f2.vertex_map {
        right_over.entry(img).or_default().push(y);
    }
    let mut right_edges_over: BTreeMap<EdgeId, Vec<(EdgeId, SignedEdge)>> = BTreeMap::new();
    for (&e, &img) in &f2.edge_map {
        right_edges_over.entry(img.edge).or_default().push((e, img));
    }

    let mut vertex_ids: BTreeMap<(VertexId, VertexId), VertexId> = BTreeMap::new();
    for (&x, img) in &f1.vertex_map {
        for &y in right_over.get(img).map(Vec::as_slice).unwrap_or(&[]) {
            vertex_ids.insert((x, y), VertexId(vertex_ids.len() as u32));
        }
    }

    let mut total = Graph::from_parts(vertex_ids.values().copied(), []);
    let mut edge_pairs = BTreeMap::new();
    let mut left_map = BTreeMap::new();
    let mut right_map = BTreeMap::new();
    for (&e1, &img1) in &f1.edge_map {
        let ed1 = f1.domain.edge(e1)?;
        for &(e2, img2) in right_edges_over.get(&img1.edge).map(Vec::as_slice).unwrap_or(&[]) {
            let ed2 = f2.domain.edge(e2)?;
            let along = img1.dir == img2.dir;
            let (y_src, y_dst) = if along { (ed2.src, ed2.dst) } else { (ed2.dst, ed2.src) };
            let id = EdgeId(edge_pairs.len() as u32);
            total.add_edge(id, vertex_ids[&(ed1.src, y_src)], vertex_ids[&(ed1.dst, y_dst)])?;
            edge_pairs.insert(id, (e1, e2));
            left_map.insert(id, SignedEdge::forward(e1));
            right_map.insert(id, if along { SignedEdge::forward(e2) } else { SignedEdge::backward(e2) });
        }
    }

    let vertex_pairs: BTreeMap<_, _> = vertex_ids.iter().map(|(&p, &id)| (id, p)).collect();
    let proj_left = GraphMorphism {
        domain: total.clone(),
        codomain: f1.domain.clone(),
        vertex_map: vertex_pairs.iter().map(|(&id, &(x, _))| (id, x)).collect(),
        edge_map: left_map,
    };
    let proj_right = GraphMorphism {
        domain: total.clone(),
        codomain: f2.domain.clone(),
        vertex_map: vertex_pairs.iter().map(|(&id, &(_, y))| (id, y)).collect(),
        edge_map: right_map,
    };
    assert!(proj_left.is_immersion()?, "left projection of a pullback of immersions");
    assert!(proj_right.is_immersion()?, "right projection of a pullback of immersions");
    Ok(FiberProduct { total, proj_left, proj_right, vertex_pairs, edge_pairs })
}

/// The disjoint union of subdivided circles, one per loop, mapped onto the
/// loops. Loop `j` position `i` is vertex/edge `offset_j + i`, and edge
/// `offset_j + i` runs from position `i` to `i + 1`.
pub fn circle_map(subject: &MultiLoop) -> GraphMorphism {
    let mut domain = Graph::new();
    let mut vertex_map = BTreeMap::new();
    let mut edge_map = BTreeMap::new();
    let mut offset = 0u32;
    for l in &subject.loops {
        let n = l.len() as u32;
        for i in 0..n {
            domain.add_vertex(VertexId(offset + i)).expect("fresh id");
            vertex_map.insert(VertexId(offset + i), l.point(&subject.graph, i as usize));
        }
        for i in 0..n {
            domain
                .add_edge(EdgeId(offset + i), VertexId(offset + i), VertexId(offset + (i + 1) % n))
                .expect("fresh id");
            edge_map.insert(EdgeId(offset + i), l.path[i as usize]);
        }
        offset += n;
    }
    GraphMorphism { domain, codomain: subject.graph.clone(), vertex_map, edge_map }
}

/// One circular component of the pullback, as a loop in the pulled-back
/// graph together with the covering data over the base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleLift {
    /// Index of the base loop this circle covers.
    pub base_loop: usize,
    /// `base_positions[k]` is the base position under step `k`.
    pub base_positions: Vec<usize>,
    pub degree: usize,
}

/// The pullback of `subject` along `rho`, with circles extracted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopPullback {
    pub product: FiberProduct,
    /// The circular components as loops in `rho`'s domain.
    pub circles: MultiLoop,
    pub lifts: Vec<CircleLift>,
    /// Non-circular components (arcs and isolated points).
    pub segments: usize,
    pub base_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleSummary {
    pub length: usize,
    pub degree: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub circles: Vec<CircleSummary>,
    pub segments: usize,
    pub deg_sigma: usize,
}

impl LoopPullback {
    /// Number of preimages of a base point: Σ circle length / |w| over the
    /// circles. Zero when there are no circles.
    pub fn covering_degree(&self) -> usize {
        self.lifts.iter().map(|c| c.degree).sum()
    }

    pub fn report(&self) -> PullbackReport {
        PullbackReport {
            circles: self
                .circles
                .loops
                .iter()
                .zip(&self.lifts)
                .map(|(l, c)| CircleSummary { length: l.len(), degree: c.degree })
                .collect(),
            segments: self.segments,
            deg_sigma: self.covering_degree(),
        }
    }
}

/// Pulls the loops of `subject` (in `rho`'s codomain) back along the
/// immersion `rho`, keeping the circular components. Each circle is
/// anchored at the least total vertex over position 0 of its base loop and
/// runs in the direction of the base loop.
pub fn pullback_loops(rho: &GraphMorphism, subject: &MultiLoop) -> Result<LoopPullback> {
    if rho.codomain != subject.graph {
        return Err(Error::CodomainMismatch);
    }
    let circles_in = circle_map(subject);
    let product = fiber_product(&circles_in, rho)?;
    let total = &product.total;

    let base_of: Vec<(usize, usize)> = subject
        .loops
        .iter()
        .enumerate()
        .flat_map(|(j, l)| (0..l.len()).map(move |i| (j, i)))
        .collect();
    let base_lengths: Vec<usize> = subject.loops.iter().map(Loop::len).collect();

    // outgoing total edge at each total vertex, keyed by circle edge
    let mut out_edge: BTreeMap<(VertexId, EdgeId), EdgeId> = BTreeMap::new();
    for (id, e) in total.edges() {
        let (c, _) = product.edge_pairs[&id];
        let prev = out_edge.insert((e.src, c), id);
        assert!(prev.is_none(), "projection to the circles is an immersion");
    }

    let germs = total.germs();
    let mut loops = Vec::new();
    let mut lifts = Vec::new();
    let mut segments = 0;
    for comp in total.components() {
        let is_circle = comp.iter().all(|v| germs[v].len() == 2);
        if !is_circle {
            segments += 1;
            continue;
        }
        let start = *comp
            .iter()
            .find(|v| base_of[product.vertex_pairs[v].0 .0 as usize].1 == 0)
            .expect("a circle covers its base loop");
        let (base_loop, _) = base_of[product.vertex_pairs[&start].0 .0 as usize];
        let mut path = Vec::new();
        let mut positions = Vec::new();
        let mut at = start;
        loop {
            let c = product.vertex_pairs[&at].0;
            let (_, pos) = base_of[c.0 as usize];
            let t = out_edge[&(at, EdgeId(c.0))];
            path.push(product.proj_right.edge_map[&t]);
            positions.push(pos);
            at = total.edge(t)?.dst;
            if at == start {
                break;
            }
        }
        assert_eq!(path.len() % base_lengths[base_loop], 0, "circle length is a multiple of |w|");
        let degree = path.len() / base_lengths[base_loop];
        loops.push(Loop::new(path));
        lifts.push(CircleLift { base_loop, base_positions: positions, degree });
    }
    let circles = MultiLoop::new(rho.domain.clone(), loops)?;
    Ok(LoopPullback { product, circles, lifts, segments, base_lengths })
}

/// Pullback of a single immersed loop `w` in `rho`'s codomain.
pub fn pullback_loop(rho: &GraphMorphism, w: &Loop) -> Result<LoopPullback> {
    pullback_loops(rho, &MultiLoop::single(rho.codomain.clone(), w.clone())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reducibility {
    pub reducible: bool,
    /// A least-traversed edge (ties to the least id), when it is
    /// traversed at most once.
    pub witness: Option<(EdgeId, usize)>,
}

/// Reducible: some edge of the ambient graph is traversed at most once.
pub fn is_reducible(l: &MultiLoop) -> Reducibility {
    let witness = l
        .traversal_counts()
        .into_iter()
        .filter(|&(_, k)| k <= 1)
        .min_by_key(|&(e, k)| (k, e));
    Reducibility { reducible: witness.is_some(), witness }
}

/// Edges traversed exactly once, the free faces of a 2-complex.
pub fn edges_traversed_once(l: &MultiLoop) -> BTreeSet<EdgeId> {
    l.traversal_counts().into_iter().filter(|&(_, k)| k == 1).map(|(e, _)| e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fold::fold_words;

    fn rose_loop(word: &str, rank: u32) -> Loop {
        Loop::from_word(&Graph::rose(rank), word).unwrap()
    }

    fn a_squared_b() -> GraphMorphism {
        fold_words(2, &["aa", "b"], true).unwrap().immersion
    }

    fn b_loop() -> GraphMorphism {
        fold_words(2, &["b"], true).unwrap().immersion
    }

    #[test]
    fn identity_pullback_has_a_diagonal() {
        let id = GraphMorphism::identity(&Graph::rose(2));
        let p = fiber_product(&id, &id).unwrap();
        assert_eq!(p.total, Graph::rose(2));
        assert!(p.edge_pairs.values().all(|(x, y)| x == y));
    }

    #[test]
    fn square_against_a() {
        let w = rose_loop("a", 2);
        let p = pullback_loop(&a_squared_b(), &w).unwrap();
        assert_eq!(p.product.total.num_vertices(), 2);
        assert_eq!(p.product.total.num_edges(), 2);
        assert!(p.product.total.is_circle());
        assert_eq!(p.circles.loops.len(), 1);
        assert_eq!(p.circles.loops[0].len(), 2);
        assert_eq!(p.covering_degree(), 2);
        assert_eq!(p.segments, 0);
        let r = is_reducible(&p.circles);
        assert!(r.reducible);
        assert_eq!(r.witness, Some((EdgeId(2), 0)));
    }

    #[test]
    fn disjoint_images() {
        let a = fold_words(2, &["a"], true).unwrap().immersion;
        let p = fiber_product(&a, &b_loop()).unwrap();
        assert_eq!(p.total.num_edges(), 0);
        let q = pullback_loop(&b_loop(), &rose_loop("a", 2)).unwrap();
        assert!(q.circles.loops.is_empty());
        assert_eq!(q.covering_degree(), 0);
        // one isolated point over the base vertex
        assert_eq!(q.segments, 1);
    }

    #[test]
    fn identity_circle_has_degree_one() {
        let id = GraphMorphism::identity(&Graph::rose(2));
        let p = pullback_loop(&id, &rose_loop("aabbb", 2)).unwrap();
        assert_eq!(p.circles.loops, vec![rose_loop("aabbb", 2)]);
        assert_eq!(p.covering_degree(), 1);
        assert_eq!(p.lifts[0].base_positions, vec![0, 1, 2, 3, 4]);
        assert_eq!(
            serde_json::to_value(p.report()).unwrap(),
            serde_json::json!({"circles": [{"length": 5, "degree": 1}], "segments": 0, "deg_sigma": 1})
        );
    }

    #[test]
    fn reducibility_examples() {
        let rose = Graph::rose(2);
        let ml = |w: &str| MultiLoop::single(rose.clone(), rose_loop(w, 2)).unwrap();
        assert!(!is_reducible(&ml("aabbb")).reducible);
        assert_eq!(is_reducible(&ml("ab")).witness, Some((EdgeId(0), 1)));
    }

    #[test]
    fn mismatched_codomains() {
        let id2 = GraphMorphism::identity(&Graph::rose(2));
        let id3 = GraphMorphism::identity(&Graph::rose(3));
        assert_eq!(fiber_product(&id2, &id3), Err(Error::CodomainMismatch));
    }

    #[test]
    fn non_immersion_input() {
        let squash = GraphMorphism {
            domain: Graph::rose(2),
            codomain: Graph::rose(1),
            vertex_map: BTreeMap::from([(VertexId(0), VertexId(0))]),
            edge_map: BTreeMap::from([
                (EdgeId(0), SignedEdge::forward(EdgeId(0))),
                (EdgeId(1), SignedEdge::forward(EdgeId(0))),
            ]),
        };
        let id = GraphMorphism::identity(&Graph::rose(1));
        assert_eq!(fiber_product(&squash, &id), Err(Error::NotImmersion));
    }
}
