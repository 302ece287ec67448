//! Independent oracles shared by the integration tests. Nothing here calls
//! the library routine it is used to check.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use wcycles::pullback::FiberProduct;
use wcycles::stacking::{PosRef, Stacking};
use wcycles::{Direction, EdgeId, Graph, GraphMorphism, Loop, MultiLoop, SignedEdge, VertexId};

/// Cells of the fiber product as pairs: vertex pairs, and for every edge
/// pair its endpoints written as vertex pairs.
pub type PairEdge = ((EdgeId, EdgeId), (VertexId, VertexId), (VertexId, VertexId));

#[derive(Debug, PartialEq, Eq)]
pub struct PairCells {
    pub vertices: BTreeSet<(VertexId, VertexId)>,
    pub edges: BTreeSet<PairEdge>,
}

/// Every pair of cells with the same image. An edge pair is parametrized
/// along the left edge; its endpoints are read off the two factors.
pub fn brute_fiber_product(f1: &GraphMorphism, f2: &GraphMorphism) -> PairCells {
    let mut vertices = BTreeSet::new();
    for v1 in f1.domain.vertices() {
        for v2 in f2.domain.vertices() {
            if f1.vertex_map[&v1] == f2.vertex_map[&v2] {
                vertices.insert((v1, v2));
            }
        }
    }
    let mut edges = BTreeSet::new();
    for (e1, d1) in f1.domain.edges() {
        for (e2, d2) in f2.domain.edges() {
            let (s1, s2) = (f1.edge_map[&e1], f2.edge_map[&e2]);
            if s1.edge != s2.edge {
                continue;
            }
            let (a2, b2) = if s1.dir == s2.dir { (d2.src, d2.dst) } else { (d2.dst, d2.src) };
            edges.insert(((e1, e2), (d1.src, a2), (d1.dst, b2)));
        }
    }
    PairCells { vertices, edges }
}

pub fn pair_cells(p: &FiberProduct) -> PairCells {
    let vertices = p.vertex_pairs.values().copied().collect();
    let edges = p
        .total
        .edges()
        .map(|(id, e)| (p.edge_pairs[&id], p.vertex_pairs[&e.src], p.vertex_pairs[&e.dst]))
        .collect();
    PairCells { vertices, edges }
}

/// A sequence is a proper power iff some nontrivial rotation fixes it.
pub fn rotation_primitive<T: PartialEq>(w: &[T]) -> bool {
    let n = w.len();
    n > 0 && (1..n).all(|k| (0..n).any(|i| w[i] != w[(i + k) % n]))
}

/// Restricted growth strings of length `n` over at most `k` symbols:
/// each symbol's first occurrence comes after every smaller symbol's.
pub fn restricted_growth_strings(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn go(buf: &mut Vec<usize>, n: usize, k: usize, used: usize, visit: &mut dyn FnMut(&[usize])) {
        if buf.len() == n {
            visit(buf);
            return;
        }
        for s in 0..(used + 1).min(k) {
            buf.push(s);
            go(buf, n, k, used.max(s + 1), visit);
            buf.pop();
        }
    }
    go(&mut Vec::with_capacity(n), n, k, 0, &mut visit);
}

/// Signed letters a, A, b, B, … of the given rank.
pub fn letters(rank: u32) -> Vec<SignedEdge> {
    (0..rank)
        .flat_map(|i| [SignedEdge::forward(EdgeId(i)), SignedEdge::backward(EdgeId(i))])
        .collect()
}

/// All words of length `n` over `rank` generators, odometer order.
pub fn all_words(rank: u32, n: usize, mut visit: impl FnMut(&[SignedEdge])) {
    let alphabet = letters(rank);
    let mut idx = vec![0usize; n];
    let mut buf: Vec<SignedEdge> = vec![alphabet[0]; n];
    loop {
        visit(&buf);
        let mut k = 0;
        loop {
            if k == n {
                return;
            }
            idx[k] += 1;
            if idx[k] < alphabet.len() {
                buf[k] = alphabet[idx[k]];
                break;
            }
            idx[k] = 0;
            buf[k] = alphabet[0];
            k += 1;
        }
    }
}

pub fn cyclically_reduced(w: &[SignedEdge]) -> bool {
    let n = w.len();
    n > 0 && (0..n).all(|i| w[(i + 1) % n] != w[i].reversed())
}

fn permutations(items: &[PosRef]) -> Vec<Vec<PosRef>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Every valid stacking of a single loop. Vertex orders range over all
/// permutations; the order on an edge is then forced by the order of its
/// traversals' source-end points, and compatibility at the other end is
/// left to `validate`.
pub fn all_valid_stackings(g: &Graph, l: &Loop) -> Vec<Stacking> {
    let n = l.len();
    let point = |i: usize| {
        let s = l.path[i % n];
        let e = g.edge(s.edge).unwrap();
        if s.dir == Direction::Forward { e.src } else { e.dst }
    };
    let mut over: BTreeMap<VertexId, Vec<PosRef>> = BTreeMap::new();
    for i in 0..n {
        over.entry(point(i)).or_default().push(PosRef(0, i));
    }
    let choices: Vec<(VertexId, Vec<Vec<PosRef>>)> =
        over.iter().map(|(&v, pts)| (v, permutations(pts))).collect();

    let subject = MultiLoop::new(g.clone(), vec![l.clone()]).unwrap();
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let vertex_orders: BTreeMap<VertexId, Vec<PosRef>> =
            choices.iter().zip(&pick).map(|((v, perms), &k)| (*v, perms[k].clone())).collect();
        let height = |r: PosRef| {
            let v = point(r.1);
            vertex_orders[&v].iter().position(|&x| x == r).unwrap()
        };
        let mut edge_orders: BTreeMap<EdgeId, Vec<PosRef>> = BTreeMap::new();
        for i in 0..n {
            edge_orders.entry(l.path[i].edge).or_default().push(PosRef(0, i));
        }
        for trav in edge_orders.values_mut() {
            trav.sort_by_key(|&PosRef(_, i)| {
                let src_point = if l.path[i].dir == Direction::Forward { i } else { (i + 1) % n };
                height(PosRef(0, src_point))
            });
        }
        let s = Stacking { subject: subject.clone(), edge_orders, vertex_orders };
        if s.is_valid() {
            out.push(s);
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return out;
            }
            pick[k] += 1;
            if pick[k] < choices[k].1.len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// −χ of the subgraph a loop traverses, counted directly.
pub fn neg_chi_of_image(g: &Graph, l: &Loop) -> i64 {
    let edges: BTreeSet<EdgeId> = l.path.iter().map(|s| s.edge).collect();
    let mut verts = BTreeSet::new();
    for e in &edges {
        let ed = g.edge(*e).unwrap();
        verts.insert(ed.src);
        verts.insert(ed.dst);
    }
    edges.len() as i64 - verts.len() as i64
}

/// Freely reduced random word of length `1..=max_len`.
pub fn random_reduced(rng: &mut impl Rng, rank: u32, max_len: usize) -> Vec<SignedEdge> {
    let alphabet = letters(rank);
    let len = rng.gen_range(1..=max_len);
    let mut w: Vec<SignedEdge> = Vec::new();
    while w.len() < len {
        let s = alphabet[rng.gen_range(0..alphabet.len())];
        if w.last() != Some(&s.reversed()) {
            w.push(s);
        }
    }
    w
}

/// Edge path from `a` to `b` along a breadth-first tree.
pub fn tree_path(g: &Graph, a: VertexId, b: VertexId) -> Vec<SignedEdge> {
    let mut germs: BTreeMap<VertexId, Vec<SignedEdge>> = BTreeMap::new();
    for (id, e) in g.edges() {
        germs.entry(e.src).or_default().push(SignedEdge::forward(id));
        germs.entry(e.dst).or_default().push(SignedEdge::backward(id));
    }
    let mut came: BTreeMap<VertexId, SignedEdge> = BTreeMap::new();
    let mut seen = BTreeSet::from([a]);
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &s in germs.get(&v).into_iter().flatten() {
            let w = g.head(s).unwrap();
            if seen.insert(w) {
                came.insert(w, s);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut at = b;
    while at != a {
        let s = came[&at];
        path.push(s);
        at = g.tail(s).unwrap();
    }
    path.reverse();
    path
}

/// The immersion of a subdivided circle reading `w`: vertex `i` is the
/// point at position `i`, edge `i` runs from `i` to `i + 1`.
pub fn circle_reading(g: &Graph, w: &Loop) -> GraphMorphism {
    let n = w.len() as u32;
    let domain = Graph::from_parts(
        (0..n).map(VertexId),
        (0..n).map(|i| (EdgeId(i), VertexId(i), VertexId((i + 1) % n))),
    );
    GraphMorphism {
        domain,
        codomain: g.clone(),
        vertex_map: (0..n).map(|i| (VertexId(i), g.tail(w.path[i as usize]).unwrap())).collect(),
        edge_map: (0..n).map(|i| (EdgeId(i), w.path[i as usize])).collect(),
    }
}

/// Pullback numbers computed from the brute-force cell pairs.
#[derive(Debug, PartialEq, Eq)]
pub struct BruteNumbers {
    pub deg_sigma: usize,
    pub circles: usize,
    /// Some edge of Γ′ is covered at most once by the circles.
    pub reducible: bool,
}

pub fn brute_pullback_numbers(rho: &GraphMorphism, w: &Loop) -> BruteNumbers {
    let cells = brute_fiber_product(&circle_reading(&rho.codomain, w), rho);
    let verts: Vec<_> = cells.vertices.iter().copied().collect();
    let index: BTreeMap<_, _> = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut valence = vec![0usize; verts.len()];
    for (_, a, b) in &cells.edges {
        let (i, j) = (index[a], index[b]);
        valence[i] += 1;
        valence[j] += 1;
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        parent[ri] = rj;
    }
    let mut bad_root = BTreeSet::new();
    for (k, &val) in valence.iter().enumerate() {
        if val != 2 {
            bad_root.insert(find(&mut parent, k));
        }
    }
    let mut circle_roots = BTreeSet::new();
    let mut deg_sigma = 0;
    for (k, v) in verts.iter().enumerate() {
        let r = find(&mut parent, k);
        if !bad_root.contains(&r) {
            circle_roots.insert(r);
            if v.0 == VertexId(0) {
                deg_sigma += 1;
            }
        }
    }
    let mut cover: BTreeMap<EdgeId, usize> = rho.domain.edge_ids().map(|e| (e, 0)).collect();
    for ((_, e2), a, _) in &cells.edges {
        if !bad_root.contains(&find(&mut parent, index[a])) {
            *cover.get_mut(e2).unwrap() += 1;
        }
    }
    BruteNumbers {
        deg_sigma,
        circles: circle_roots.len(),
        reducible: circle_roots.is_empty() || cover.values().any(|&k| k <= 1),
    }
}
