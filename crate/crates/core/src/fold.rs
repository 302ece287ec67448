//! Stallings folding: from generating closed paths to a graph immersion
//! representing the subgroup they generate.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};
use crate::word::{free_reduce, Word};

/// Output of [`fold`]. `basepoint` is `None` when trimming to the core
/// removed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folded {
    pub immersion: GraphMorphism,
    pub basepoint: Option<VertexId>,
}

// Working state: union-find on vertices; every live edge carries the base
// edge it maps to, oriented so the label is traversed forward.
struct Folder {
    parent: Vec<u32>,
    edges: Vec<Option<(u32, u32, EdgeId)>>,
}

impl Folder {
    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi as usize] = lo;
        }
    }

    fn new_vertex(&mut self) -> u32 {
        self.parent.push(self.parent.len() as u32);
        self.parent.len() as u32 - 1
    }

    fn add_step(&mut self, from: u32, to: u32, label: SignedEdge) {
        let e = if label.is_forward() { (from, to, label.edge) } else { (to, from, label.edge) };
        self.edges.push(Some(e));
    }

    /// First colliding pair of germs in (vertex, label, end) order.
    fn next_fold(&mut self) -> Option<(usize, usize)> {
        let mut seen: BTreeMap<(u32, EdgeId, bool), Vec<usize>> = BTreeMap::new();
        for i in 0..self.edges.len() {
            if let Some((s, t, label)) = self.edges[i] {
                let (s, t) = (self.find(s), self.find(t));
                self.edges[i] = Some((s, t, label));
                seen.entry((s, label, true)).or_default().push(i);
                seen.entry((t, label, false)).or_default().push(i);
            }
        }
        seen.into_values().find(|v| v.len() >= 2).map(|v| (v[0], v[1]))
    }

    fn run(&mut self) {
        while let Some((keep, drop)) = self.next_fold() {
            let (s1, t1, _) = self.edges[keep].expect("live");
            let (s2, t2, _) = self.edges[drop].expect("live");
            self.edges[drop] = None;
            self.union(s1, s2);
            self.union(t1, t2);
        }
    }
}

/// Folds the wedge of the given closed paths at `basepoint` of `base` into
/// an immersion. Paths are freely reduced first; paths that reduce to the
/// empty path contribute nothing. With no generators the result is the
/// single basepoint. With `trim_to_core` the result is replaced by its core
/// (ids are renumbered compactly either way).
pub fn fold(
    base: &Graph,
    basepoint: VertexId,
    words: &[Vec<SignedEdge>],
    trim_to_core: bool,
) -> Result<Folded> {
    base.ensure_valid()?;
    if !base.has_vertex(basepoint) {
        return Err(Error::UnknownVertex(basepoint));
    }
    let mut folder = Folder { parent: vec![0], edges: Vec::new() };
    for word in words {
        let mut at = basepoint;
        for &s in word {
            if base.tail(s)? != at {
                return Err(Error::OpenPath);
            }
            at = base.head(s)?;
        }
        if at != basepoint {
            return Err(Error::OpenPath);
        }
        let reduced = free_reduce(word);
        let n = reduced.len();
        let mut prev = 0;
        for (i, &s) in reduced.iter().enumerate() {
            let next = if i + 1 == n { 0 } else { folder.new_vertex() };
            folder.add_step(prev, next, s);
            prev = next;
        }
    }
    folder.run();

    let mut vertex_base: BTreeMap<u32, VertexId> = BTreeMap::new();
    vertex_base.insert(folder.find(0), basepoint);
    let mut raw_edges = Vec::new();
    for i in 0..folder.edges.len() {
        if let Some((s, t, label)) = folder.edges[i] {
            let (s, t) = (folder.find(s), folder.find(t));
            let ed = base.edge(label)?;
            vertex_base.insert(s, ed.src);
            vertex_base.insert(t, ed.dst);
            raw_edges.push((s, t, label));
        }
    }
    let mut domain = Graph::from_parts(
        vertex_base.keys().map(|&v| VertexId(v)),
        raw_edges.iter().enumerate().map(|(i, &(s, t, _))| (EdgeId(i as u32), VertexId(s), VertexId(t))),
    );
    let mut basepoint_id = Some(VertexId(folder.find(0)));
    if trim_to_core {
        domain = domain.core();
        basepoint_id = basepoint_id.filter(|b| domain.has_vertex(*b));
    }
    let (compact, vmap, emap) = domain.compacted();
    let vertex_map = vmap.iter().map(|(old, &new)| (new, vertex_base[&old.0])).collect();
    let edge_map = emap
        .iter()
        .map(|(old, &new)| (new, SignedEdge::forward(raw_edges[old.0 as usize].2)))
        .collect();
    let immersion = GraphMorphism { domain: compact, codomain: base.clone(), vertex_map, edge_map };
    debug_assert!(immersion.validate().is_empty());
    assert!(immersion.is_immersion()?, "folding produced a non-immersion");
    Ok(Folded { immersion, basepoint: basepoint_id.map(|b| vmap[&b]) })
}

/// Folds letter-string words over the rose of the given rank at its vertex.
pub fn fold_words(rank: u32, words: &[&str], trim_to_core: bool) -> Result<Folded> {
    let paths = words
        .iter()
        .map(|w| Word::parse_for_rank(w, rank).map(|w| w.0))
        .collect::<Result<Vec<_>>>()?;
    fold(&Graph::rose(rank), VertexId(0), &paths, trim_to_core)
}
