//! Words over a rose, immersed loops, and unions of loops.
//!
//! Letter syntax: `a`..`z` name the loops `e0`..`e25` of a rose, read
//! forward. An uppercase letter, or a letter followed by `'` or `⁻¹`, is
//! the inverse. Whitespace is ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Direction, EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};

/// A word in the free group on the loops of a rose.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<SignedEdge>);

impl Word {
    pub fn parse(s: &str) -> Result<Word> {
        let err = |reason: &str| Error::WordParse { word: s.to_string(), reason: reason.to_string() };
        let mut letters: Vec<SignedEdge> = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                c if c.is_whitespace() => {}
                'a'..='z' => letters.push(SignedEdge::forward(EdgeId(c as u32 - 'a' as u32))),
                'A'..='Z' => letters.push(SignedEdge::backward(EdgeId(c as u32 - 'A' as u32))),
                '\'' => {
                    let last = letters.last_mut().ok_or_else(|| err("inverse mark with no letter"))?;
                    *last = last.reversed();
                }
                '⁻' => {
                    if chars.next() != Some('¹') {
                        return Err(err("expected ¹ after ⁻"));
                    }
                    let last = letters.last_mut().ok_or_else(|| err("inverse mark with no letter"))?;
                    *last = last.reversed();
                }
                _ => return Err(err(&format!("unexpected character {c:?}"))),
            }
        }
        Ok(Word(letters))
    }

    /// Parses and checks every letter names a loop of the rank-`rank` rose.
    pub fn parse_for_rank(s: &str, rank: u32) -> Result<Word> {
        let w = Word::parse(s)?;
        if let Some(bad) = w.0.iter().find(|l| l.edge.0 >= rank) {
            return Err(Error::WordParse {
                word: s.to_string(),
                reason: format!("unknown letter {} for rank {rank}", letter_char(*bad)),
            });
        }
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|s| s.reversed()).collect())
    }

    pub fn free_reduce(&self) -> Word {
        Word(free_reduce(&self.0))
    }

    pub fn cyclic_reduce(&self) -> Word {
        Word(cyclic_reduce(&self.0))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.0)
    }

    /// Abelianization: signed letter counts per generator.
    pub fn exponent_sums(&self, rank: u32) -> Vec<i64> {
        let mut v = vec![0; rank as usize];
        for l in &self.0 {
            v[l.edge.0 as usize] += l.dir.sign();
        }
        v
    }
}

fn letter_char(s: SignedEdge) -> char {
    let base = if s.is_forward() { b'a' } else { b'A' };
    if s.edge.0 < 26 {
        (base + s.edge.0 as u8) as char
    } else {
        '?'
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            if l.edge.0 < 26 {
                write!(f, "{}", letter_char(l))?;
            } else {
                let mark = if l.is_forward() { "" } else { "'" };
                write!(f, "[{}{mark}]", l.edge)?;
            }
        }
        Ok(())
    }
}

/// Letter-string form of `word`, cyclically reduced and rotated to its
/// least rotation.
pub fn cyclic_reduce_str(word: &str) -> Result<String> {
    Ok(Word::parse(word)?.cyclic_reduce().to_string())
}

pub fn free_reduce(path: &[SignedEdge]) -> Vec<SignedEdge> {
    let mut out: Vec<SignedEdge> = Vec::with_capacity(path.len());
    for &s in path {
        if out.last() == Some(&s.reversed()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Free and cyclic reduction followed by rotation to the least rotation.
pub fn cyclic_reduce(path: &[SignedEdge]) -> Vec<SignedEdge> {
    let reduced = free_reduce(path);
    let mut lo = 0;
    let mut hi = reduced.len();
    while hi - lo >= 2 && reduced[lo] == reduced[hi - 1].reversed() {
        lo += 1;
        hi -= 1;
    }
    least_rotation(&reduced[lo..hi])
}

pub fn least_rotation(path: &[SignedEdge]) -> Vec<SignedEdge> {
    let n = path.len();
    let best = (0..n)
        .min_by(|&i, &j| (0..n).map(|k| path[(i + k) % n]).cmp((0..n).map(|k| path[(j + k) % n])))
        .unwrap_or(0);
    path.iter().cycle().skip(best).take(n).copied().collect()
}

pub fn is_cyclically_reduced(path: &[SignedEdge]) -> bool {
    let n = path.len();
    (0..n).all(|i| path[(i + 1) % n] != path[i].reversed())
}

/// Smallest `p` dividing `n` with `path[i] == path[(i + p) % n]` for all `i`.
pub fn minimal_period(path: &[SignedEdge]) -> usize {
    let n = path.len();
    if n == 0 {
        return 0;
    }
    // prefix function of the sequence
    let mut fail = vec![0usize; n];
    for i in 1..n {
        let mut k = fail[i - 1];
        while k > 0 && path[i] != path[k] {
            k = fail[k - 1];
        }
        if path[i] == path[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let p = n - fail[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

/// Not a proper power: the cyclic sequence has no period shorter than
/// its length.
pub fn is_primitive_path(path: &[SignedEdge]) -> bool {
    !path.is_empty() && minimal_period(path) == path.len()
}

/// A closed edge path without backtracking, i.e. an immersion S¹ → Γ.
/// Position `i` is the traversal of `path[i]`; the point at position `i`
/// is the vertex where that traversal starts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Loop {
    pub path: Vec<SignedEdge>,
}

impl Loop {
    pub fn new(path: Vec<SignedEdge>) -> Self {
        Loop { path }
    }

    /// Strict: the word must already be cyclically reduced.
    pub fn from_word(base: &Graph, word: &str) -> Result<Loop> {
        let rank = base.num_edges() as u32;
        let w = Word::parse_for_rank(word, rank)?;
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::NotCyclicallyReduced(word.to_string()));
        }
        let l = Loop::new(w.0);
        l.validate(base)?;
        Ok(l)
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = self.path.len();
        if n == 0 {
            return Err(Error::InvalidLoop("empty path".into()));
        }
        for i in 0..n {
            let (s, t) = (self.path[i], self.path[(i + 1) % n]);
            if g.head(s)? != g.tail(t)? {
                return Err(Error::InvalidLoop(format!("steps {i} and {} do not compose", (i + 1) % n)));
            }
            if t == s.reversed() {
                return Err(Error::InvalidLoop(format!("backtracking at step {}", (i + 1) % n)));
            }
        }
        Ok(())
    }

    pub fn is_primitive(&self) -> bool {
        is_primitive_path(&self.path)
    }

    pub fn point(&self, g: &Graph, pos: usize) -> VertexId {
        g.tail(self.path[pos]).expect("loop validated against its graph")
    }

    /// Signed traversal counts per edge.
    pub fn signed_counts(&self) -> BTreeMap<EdgeId, i64> {
        let mut out = BTreeMap::new();
        for s in &self.path {
            *out.entry(s.edge).or_insert(0) += s.dir.sign();
        }
        out
    }

    /// Image under a graph map.
    pub fn push_forward(&self, m: &GraphMorphism) -> Result<Loop> {
        Ok(Loop::new(self.path.iter().map(|&s| m.map_signed(s)).collect::<Result<_>>()?))
    }

    pub fn reversed(&self) -> Loop {
        Loop::new(self.path.iter().rev().map(|s| s.reversed()).collect())
    }

    pub fn rotated(&self, k: usize) -> Loop {
        let n = self.path.len();
        Loop::new((0..n).map(|i| self.path[(i + k) % n]).collect())
    }
}

/// A disjoint union of immersed circles in one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiLoop {
    pub graph: Graph,
    pub loops: Vec<Loop>,
}

impl MultiLoop {
    pub fn new(graph: Graph, loops: Vec<Loop>) -> Result<Self> {
        graph.ensure_valid()?;
        for l in &loops {
            l.validate(&graph)?;
        }
        Ok(MultiLoop { graph, loops })
    }

    pub fn single(graph: Graph, l: Loop) -> Result<Self> {
        MultiLoop::new(graph, vec![l])
    }

    pub fn empty(graph: Graph) -> Self {
        MultiLoop { graph, loops: Vec::new() }
    }

    pub fn point(&self, j: usize, pos: usize) -> VertexId {
        self.loops[j].point(&self.graph, pos)
    }

    /// Total traversals per edge, direction ignored. Every edge of the
    /// ambient graph is present, untraversed ones with 0.
    pub fn traversal_counts(&self) -> BTreeMap<EdgeId, usize> {
        let mut out: BTreeMap<EdgeId, usize> = self.graph.edge_ids().map(|e| (e, 0)).collect();
        for s in self.loops.iter().flat_map(|l| &l.path) {
            *out.entry(s.edge).or_insert(0) += 1;
        }
        out
    }

    /// The subgraph of traversed edges and visited vertices, with its
    /// inclusion into the ambient graph.
    pub fn image_subgraph(&self) -> (Graph, GraphMorphism) {
        let mut vertices = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for l in &self.loops {
            for &s in &l.path {
                edges.insert(s.edge);
                vertices.insert(self.graph.tail(s).expect("validated"));
            }
        }
        let sub = Graph::from_parts(
            vertices,
            edges.into_iter().map(|e| {
                let ed = self.graph.edge(e).expect("validated");
                (e, ed.src, ed.dst)
            }),
        );
        if self.loops.len() == 1 {
            assert!(sub.is_core(), "image of an immersed loop must be core");
        }
        let inc = GraphMorphism::inclusion(&sub, &self.graph);
        (sub, inc)
    }

    pub fn is_surjective(&self) -> bool {
        let (img, _) = self.image_subgraph();
        img.num_edges() == self.graph.num_edges() && img.num_vertices() == self.graph.num_vertices()
    }

    /// Same loops, viewed in a supergraph or subgraph with the same ids.
    pub fn with_graph(&self, graph: Graph) -> Result<MultiLoop> {
        MultiLoop::new(graph, self.loops.clone())
    }
}

/// Unit direction helper for constructing paths by hand in tests and
/// examples: `+3` is `e3` forward, `-3` is `e3` backward.
pub fn path_from_signed(steps: &[i32]) -> Vec<SignedEdge> {
    steps
        .iter()
        .map(|&k| {
            let dir = if k >= 0 { Direction::Forward } else { Direction::Backward };
            SignedEdge::new(EdgeId(k.unsigned_abs()), dir)
        })
        .collect()
}
