//! Seeded random instances and the batch runner behind `wcycles harness`.
//!
//! Every instance gets its own seed drawn from the run seed, so a summary
//! is a pure function of `(seed, count, bounds)`.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fold::fold;
use crate::graph::{Direction, EdgeId, Graph, GraphMorphism, SignedEdge, VertexId};
use crate::pullback::pullback_loop;
use crate::stacking::{construct_stacking, pullback_stacking, Side};
use crate::theorems::{
    npi_check, relator_lifts, replay_certificate, verify_main_theorem, wcycles_check, Branch, OneRelatorComplex,
    Verdict,
};
use crate::word::{Loop, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_word_len: usize,
    pub max_gen_len: usize,
    pub max_gens: usize,
    pub min_rank: u32,
    pub max_rank: u32,
    /// One instance in this many uses a subdivided rose as base; 0 never.
    pub subdivide_one_in: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_word_len: 20, max_gen_len: 12, max_gens: 4, min_rank: 2, max_rank: 4, subdivide_one_in: 8 }
    }
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        if self.max_word_len == 0 || self.max_gen_len == 0 || self.max_gens == 0 {
            return Err(Error::Usage("bounds must be positive".into()));
        }
        if self.min_rank < 2 || self.min_rank > self.max_rank {
            return Err(Error::Usage("rank range must satisfy 2 ≤ min ≤ max".into()));
        }
        Ok(())
    }
}

fn random_letter(rng: &mut impl Rng, rank: u32) -> SignedEdge {
    let dir = if rng.gen() { Direction::Forward } else { Direction::Backward };
    SignedEdge::new(EdgeId(rng.gen_range(0..rank)), dir)
}

/// A uniformly chosen length in `1..=max_len`, then a freely reduced word
/// of that length over the rose of `rank`.
pub fn random_reduced_word(rng: &mut impl Rng, rank: u32, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let mut out: Vec<SignedEdge> = Vec::with_capacity(len);
    while out.len() < len {
        let s = random_letter(rng, rank);
        if out.last() != Some(&s.reversed()) {
            out.push(s);
        }
    }
    Word(out)
}

/// Rejection sampling: cyclically reduced words of length `1..=max_len`,
/// proper powers thrown away.
pub fn random_primitive_word(rng: &mut impl Rng, rank: u32, max_len: usize) -> Word {
    loop {
        let w = random_reduced_word(rng, rank, max_len);
        if w.is_cyclically_reduced() && crate::word::is_primitive_path(&w.0) {
            return w;
        }
    }
}

/// The rose of `rank` with every petal cut into `k` edges. Petal `i` is
/// `e{ik} … e{ik+k-1}` and passes through `v{1+i(k-1)} … v{i(k-1)+k-1}`.
pub fn subdivided_rose(rank: u32, k: u32) -> Graph {
    assert!(k >= 1);
    let inner = |i: u32, t: u32| VertexId(1 + i * (k - 1) + t);
    let mut edges = Vec::new();
    for i in 0..rank {
        for t in 0..k {
            let src = if t == 0 { VertexId(0) } else { inner(i, t - 1) };
            let dst = if t == k - 1 { VertexId(0) } else { inner(i, t) };
            edges.push((EdgeId(i * k + t), src, dst));
        }
    }
    Graph::from_parts((0..1 + rank * (k - 1)).map(VertexId), edges)
}

/// A word over the rose as a path in [`subdivided_rose`].
pub fn subdivide_path(word: &[SignedEdge], k: u32) -> Vec<SignedEdge> {
    word.iter()
        .flat_map(|s| {
            let i = s.edge.0;
            let steps: Vec<_> = (0..k).map(|t| SignedEdge::new(EdgeId(i * k + t), s.dir)).collect();
            match s.dir {
                Direction::Forward => steps,
                Direction::Backward => steps.into_iter().rev().collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: usize,
    pub seed: u64,
    pub rank: u32,
    /// Edges per petal of the base; 1 for a plain rose.
    pub subdivision: u32,
    pub base: Graph,
    pub relator: Word,
    pub w: Loop,
    pub generators: Vec<Word>,
    pub rho: GraphMorphism,
}

pub fn generate_instance(id: usize, seed: u64, bounds: &Bounds) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.gen_range(bounds.min_rank..=bounds.max_rank);
    let subdivision = if bounds.subdivide_one_in > 0 && rng.gen_range(0..bounds.subdivide_one_in) == 0 {
        rng.gen_range(2..=3)
    } else {
        1
    };
    let base = subdivided_rose(rank, subdivision);
    let relator = random_primitive_word(&mut rng, rank, bounds.max_word_len);
    let ngens = rng.gen_range(1..=bounds.max_gens);
    let generators: Vec<Word> = (0..ngens).map(|_| random_reduced_word(&mut rng, rank, bounds.max_gen_len)).collect();
    let paths: Vec<_> = generators.iter().map(|g| subdivide_path(&g.0, subdivision)).collect();
    let rho = fold(&base, VertexId(0), &paths, true)?.immersion;
    let w = Loop::new(subdivide_path(&relator.0, subdivision));
    Ok(Instance { id, seed, rank, subdivision, base, relator, w, generators, rho })
}

/// Per-instance seeds, in order, for a run seed.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackingCheck {
    pub word_len: usize,
    pub depth: usize,
    pub edge_counts: Vec<usize>,
    pub vertex_counts: Vec<usize>,
    pub neg_chi_image: i64,
    pub arcs_above: usize,
    pub arcs_below: usize,
    pub good: bool,
    pub pullback_circles: usize,
    pub pullback_good: bool,
}

impl StackingCheck {
    /// Edge count goes up at every stage of the tower.
    pub fn edges_strictly_increase(&self) -> bool {
        self.edge_counts.windows(2).all(|p| p[1] > p[0])
    }

    /// Edge and vertex counts never drop and their sum goes up.
    pub fn cells_increase(&self) -> bool {
        let c = |k: usize| (self.edge_counts[k], self.vertex_counts[k]);
        (1..self.edge_counts.len()).all(|k| {
            let ((e0, v0), (e1, v1)) = (c(k - 1), c(k));
            e1 >= e0 && v1 >= v0 && e1 + v1 > e0 + v0
        })
    }

    pub fn pass(&self) -> bool {
        self.good
            && self.arcs_above as i64 == self.neg_chi_image
            && self.arcs_below as i64 == self.neg_chi_image
            && self.depth <= self.word_len
            && self.cells_increase()
            && self.pullback_good
    }
}

/// Builds the stacking of `w` in `g`, checks the arc counts, and pulls it
/// back along `rho` (when given).
pub fn check_stacking(g: &Graph, w: &Loop, rho: Option<&GraphMorphism>) -> Result<StackingCheck> {
    let (s, trace) = construct_stacking(g, w)?;
    let (image, _) = s.subject.image_subgraph();
    let neg_chi_image = -image.euler_characteristic()?;
    let good = s.is_good()?;
    let (mut pullback_circles, mut pullback_good) = (0, true);
    if let Some(rho) = rho {
        let pb = pullback_loop(rho, w)?;
        let up = pullback_stacking(&s, rho, &pb)?;
        pullback_circles = up.subject.loops.len();
        pullback_good = up.is_valid() && (!good || up.is_good()?);
    }
    Ok(StackingCheck {
        word_len: w.len(),
        depth: trace.depth(),
        edge_counts: trace.stages.iter().map(|t| t.edge_count).collect(),
        vertex_counts: trace.stages.iter().map(|t| t.vertex_count).collect(),
        neg_chi_image,
        arcs_above: s.count_open_arcs(Side::Above)?,
        arcs_below: s.count_open_arcs(Side::Below)?,
        good,
        pullback_circles,
        pullback_good,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpiOutcome {
    pub faces: usize,
    pub chi: i64,
    pub trivial_pi1: bool,
    pub replayed: bool,
    pub pass: bool,
}

/// Attaches every degree-one lift of the relator and checks the complex.
pub fn check_npi(rho: &GraphMorphism, w: &Loop) -> Result<NpiOutcome> {
    let y = OneRelatorComplex { graph: rho.domain.clone(), attachments: relator_lifts(rho, w)? };
    check_complex(&y, rho, w)
}

pub fn check_complex(y: &OneRelatorComplex, rho: &GraphMorphism, w: &Loop) -> Result<NpiOutcome> {
    let v = npi_check(y, rho, w)?;
    let replayed = replay_certificate(&v.certificate) == Ok((v.chi, v.trivial_pi1));
    Ok(NpiOutcome {
        faces: y.attachments.len(),
        chi: v.chi,
        trivial_pi1: v.trivial_pi1,
        replayed,
        pass: v.pass && replayed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub id: usize,
    pub seed: u64,
    pub rank: u32,
    pub subdivision: u32,
    pub relator: String,
    pub generators: Vec<String>,
    pub main: Option<Verdict>,
    pub wcycles: Option<Verdict>,
    pub stacking: Option<StackingCheck>,
    pub npi: Option<NpiOutcome>,
    pub failures: Vec<String>,
}

impl InstanceReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn guarded<T>(what: &str, failures: &mut Vec<String>, f: impl FnOnce() -> Result<T>) -> Option<T> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Some(v),
        Ok(Err(e)) => {
            failures.push(format!("{what}: {e}"));
            None
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            failures.push(format!("{what}: panic: {msg}"));
            None
        }
    }
}

pub fn run_instance(inst: &Instance) -> InstanceReport {
    let mut failures = Vec::new();
    let name = format!("#{}", inst.id);
    let main = guarded("degree bound", &mut failures, || verify_main_theorem(&name, &inst.rho, &inst.w));
    let wcycles = guarded("wcycles", &mut failures, || wcycles_check(&name, &inst.rho, &inst.w));
    let stacking = guarded("stacking", &mut failures, || check_stacking(&inst.base, &inst.w, Some(&inst.rho)));
    let npi = guarded("npi", &mut failures, || check_npi(&inst.rho, &inst.w));
    for (label, v) in [("degree bound", &main), ("wcycles", &wcycles)] {
        if let Some(v) = v {
            if !v.pass || !v.is_consistent() {
                failures.push(format!("{label} violated: {v:?}"));
            }
        }
    }
    if let Some(s) = &stacking {
        if !s.pass() {
            failures.push(format!("stacking invariant failed: {s:?}"));
        }
    }
    if let Some(n) = &npi {
        if !n.pass {
            failures.push(format!("npi failed: {n:?}"));
        }
    }
    InstanceReport {
        id: inst.id,
        seed: inst.seed,
        rank: inst.rank,
        subdivision: inst.subdivision,
        relator: inst.relator.to_string(),
        generators: inst.generators.iter().map(Word::to_string).collect(),
        main,
        wcycles,
        stacking,
        npi,
        failures,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCounts {
    pub vacuous: usize,
    pub reducible: usize,
    pub bound_holds: usize,
    pub violated: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub count: usize,
    pub bounds: Bounds,
    pub passed: usize,
    pub failed: usize,
    pub branches: BranchCounts,
    pub wcycles_passed: usize,
    pub stacking_passed: usize,
    pub npi_passed: usize,
    pub subdivided: usize,
    pub max_depth: usize,
    /// Towers where some stage keeps the edge count of the one below.
    pub edge_count_stalls: usize,
    pub failures: Vec<String>,
}

pub fn run_harness(seed: u64, count: usize, bounds: &Bounds) -> Result<(Summary, Vec<InstanceReport>)> {
    if count == 0 {
        return Err(Error::Usage("instance count must be at least 1".into()));
    }
    bounds.validate()?;
    let mut reports = Vec::with_capacity(count);
    for (id, s) in instance_seeds(seed, count).into_iter().enumerate() {
        let inst = generate_instance(id, s, bounds)?;
        reports.push(run_instance(&inst));
    }
    let mut summary = Summary {
        seed,
        count,
        bounds: *bounds,
        passed: 0,
        failed: 0,
        branches: BranchCounts::default(),
        wcycles_passed: 0,
        stacking_passed: 0,
        npi_passed: 0,
        subdivided: 0,
        max_depth: 0,
        edge_count_stalls: 0,
        failures: Vec::new(),
    };
    for r in &reports {
        if r.pass() {
            summary.passed += 1;
        } else {
            summary.failed += 1;
            summary.failures.extend(r.failures.iter().map(|f| format!("#{} (seed {}): {f}", r.id, r.seed)));
        }
        if let Some(v) = &r.main {
            let b = &mut summary.branches;
            *match v.branch {
                Branch::Vacuous => &mut b.vacuous,
                Branch::Reducible => &mut b.reducible,
                Branch::BoundHolds => &mut b.bound_holds,
                Branch::Violated => &mut b.violated,
            } += 1;
        }
        summary.wcycles_passed += usize::from(r.wcycles.as_ref().is_some_and(|v| v.pass));
        summary.npi_passed += usize::from(r.npi.as_ref().is_some_and(|n| n.pass));
        summary.subdivided += usize::from(r.subdivision > 1);
        if let Some(s) = &r.stacking {
            summary.stacking_passed += usize::from(s.pass());
            summary.max_depth = summary.max_depth.max(s.depth);
            summary.edge_count_stalls += usize::from(!s.edges_strictly_increase());
        }
    }
    Ok((summary, reports))
}

/// A connected finite cover of the rose of `rank`: random permutations of
/// `degree` sheets, cut down to the component of sheet 0.
pub fn random_cover(rng: &mut impl Rng, rank: u32, degree: u32) -> Result<GraphMorphism> {
    use rand::seq::SliceRandom;
    let mut edges = Vec::new();
    for i in 0..rank {
        let mut perm: Vec<u32> = (0..degree).collect();
        perm.shuffle(rng);
        for k in 0..degree {
            edges.push((EdgeId(i * degree + k), VertexId(k), VertexId(perm[k as usize]), EdgeId(i)));
        }
    }
    let total = Graph::from_parts((0..degree).map(VertexId), edges.iter().map(|&(id, s, t, _)| (id, s, t)));
    let comp = total.components().into_iter().find(|c| c.contains(&VertexId(0))).expect("sheet 0 exists");
    let sub = total.induced_subgraph(&comp);
    let (g, vmap, emap) = sub.compacted();
    let rho = GraphMorphism {
        domain: g,
        codomain: Graph::rose(rank),
        vertex_map: vmap.values().map(|&v| (v, VertexId(0))).collect(),
        edge_map: emap.iter().map(|(old, &new)| (new, SignedEdge::forward(edges[old.0 as usize].3))).collect(),
    };
    debug_assert!(rho.is_immersion()?);
    Ok(rho)
}

/// A one-relator complex over the presentation complex of `⟨rose | w⟩`:
/// either a folded harness graph or a connected cover, with a random
/// nonempty subset of the relator's lifts attached when there are any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexInstance {
    pub seed: u64,
    pub w: Loop,
    pub rho: GraphMorphism,
    pub complex: OneRelatorComplex,
}

pub fn generate_complex(seed: u64, bounds: &Bounds) -> Result<ComplexInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rho, w) = if rng.gen() {
        let inst = generate_instance(0, rng.next_u64(), &Bounds { subdivide_one_in: 0, ..*bounds })?;
        (inst.rho, inst.w)
    } else {
        let rank = rng.gen_range(bounds.min_rank..=bounds.max_rank);
        let w = Loop::new(random_primitive_word(&mut rng, rank, bounds.max_word_len).0);
        let degree = rng.gen_range(1..=4);
        (random_cover(&mut rng, rank, degree)?, w)
    };
    let lifts = relator_lifts(&rho, &w)?;
    let attachments: Vec<Loop> = if lifts.is_empty() {
        lifts
    } else {
        let keep: Vec<bool> = loop {
            let k: Vec<bool> = lifts.iter().map(|_| rng.gen_bool(0.75)).collect();
            if k.iter().any(|&b| b) {
                break k;
            }
        };
        lifts.into_iter().zip(keep).filter(|(_, k)| *k).map(|(l, _)| l).collect()
    };
    let complex = OneRelatorComplex { graph: rho.domain.clone(), attachments };
    Ok(ComplexInstance { seed, w, rho, complex })
}
