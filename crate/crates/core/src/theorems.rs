//! Instance verifiers: the degree bound for pullbacks of primitive loops,
//! the bound on the number of circular components, nonpositive immersions
//! for complexes with one relator, and the genus bound for powers.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, GraphMorphism, VertexId};
use crate::pullback::{edges_traversed_once, is_reducible, pullback_loop, pullback_loops, LoopPullback};
use crate::word::{least_rotation, Loop, MultiLoop};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// 𝕊 is empty.
    Vacuous,
    /// Λ′ traverses some edge of Γ′ at most once.
    Reducible,
    /// The inequality was checked and holds.
    BoundHolds,
    /// The inequality was checked and fails. Never expected.
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    DegreeBound,
    Wcycles,
}

/// Outcome of one verifier on one instance, with every number it used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub instance: String,
    pub check: Check,
    pub branch: Branch,
    pub deg_sigma: usize,
    /// −χ(Γ′)
    pub neg_chi: i64,
    /// −χ of the image of Λ′, when 𝕊 is nonempty.
    pub neg_chi_image: Option<i64>,
    pub circles: usize,
    /// rank(Γ′) = 1 − χ(Γ′)
    pub rank: i64,
    pub witness_edge: Option<EdgeId>,
    pub degrees: Vec<usize>,
    pub pass: bool,
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        self.deg_sigma == self.degrees.iter().sum::<usize>()
            && self.circles == self.degrees.len()
            && self.rank == 1 + self.neg_chi
    }
}

/// Checks the hypotheses shared by the two loop verifiers and returns the
/// pullback.
fn checked_pullback(rho: &GraphMorphism, w: &Loop) -> Result<LoopPullback> {
    if !rho.is_immersion()? {
        return Err(Error::NotImmersion);
    }
    let g = &rho.domain;
    if g.num_vertices() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if !g.is_core() {
        return Err(Error::NotCore);
    }
    w.validate(&rho.codomain)?;
    if !w.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    pullback_loop(rho, w)
}

fn base_verdict(instance: &str, check: Check, rho: &GraphMorphism, pb: &LoopPullback) -> Verdict {
    let neg_chi = -rho.domain.euler_characteristic().expect("validated");
    Verdict {
        instance: instance.to_string(),
        check,
        branch: Branch::Vacuous,
        deg_sigma: pb.covering_degree(),
        neg_chi,
        neg_chi_image: None,
        circles: pb.circles.loops.len(),
        rank: 1 + neg_chi,
        witness_edge: None,
        degrees: pb.lifts.iter().map(|c| c.degree).collect(),
        pass: true,
    }
}

/// Either Λ′ is reducible or `deg σ ≤ −χ(image Λ′) ≤ −χ(Γ′)`.
pub fn verify_main_theorem(instance: &str, rho: &GraphMorphism, w: &Loop) -> Result<Verdict> {
    let pb = checked_pullback(rho, w)?;
    let mut v = base_verdict(instance, Check::DegreeBound, rho, &pb);
    if pb.circles.loops.is_empty() {
        return Ok(v);
    }
    let (image, _) = pb.circles.image_subgraph();
    let neg_chi_image = -image.euler_characteristic()?;
    v.neg_chi_image = Some(neg_chi_image);
    let red = is_reducible(&pb.circles);
    if red.reducible {
        v.branch = Branch::Reducible;
        v.witness_edge = red.witness.map(|(e, _)| e);
        return Ok(v);
    }
    let deg = v.deg_sigma as i64;
    let holds = deg <= neg_chi_image && neg_chi_image <= v.neg_chi;
    v.branch = if holds { Branch::BoundHolds } else { Branch::Violated };
    v.pass = holds;
    Ok(v)
}

/// The number of circles of 𝕊 is at most rank(Γ′).
pub fn wcycles_check(instance: &str, rho: &GraphMorphism, w: &Loop) -> Result<Verdict> {
    let pb = checked_pullback(rho, w)?;
    let mut v = base_verdict(instance, Check::Wcycles, rho, &pb);
    if pb.circles.loops.is_empty() {
        return Ok(v);
    }
    let holds = v.circles as i64 <= v.rank;
    v.branch = if holds { Branch::BoundHolds } else { Branch::Violated };
    v.pass = holds;
    Ok(v)
}

/// A 2-complex over the presentation complex of ⟨Γ | w⟩: its 1-skeleton
/// immerses by ρ and each 2-cell is attached along a lift of w.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneRelatorComplex {
    pub graph: Graph,
    pub attachments: Vec<Loop>,
}

fn cyclic_class(l: &Loop) -> Vec<crate::graph::SignedEdge> {
    least_rotation(&l.path).min(least_rotation(&l.reversed().path))
}

impl OneRelatorComplex {
    pub fn euler_characteristic(&self) -> Result<i64> {
        Ok(self.graph.euler_characteristic()? + self.attachments.len() as i64)
    }

    /// Each attachment must read `w` (up to rotation and inversion) through
    /// `rho`, and no two attachments may be the same cyclic path.
    pub fn validate(&self, rho: &GraphMorphism, w: &Loop) -> Result<()> {
        if rho.domain != self.graph {
            return Err(Error::MalformedComplex("ρ is not defined on the 1-skeleton".into()));
        }
        if !self.graph.is_connected() || self.graph.num_vertices() == 0 {
            return Err(Error::MalformedComplex("1-skeleton must be connected and nonempty".into()));
        }
        let target = cyclic_class(w);
        let mut seen = BTreeSet::new();
        for (k, a) in self.attachments.iter().enumerate() {
            a.validate(&self.graph)
                .map_err(|e| Error::MalformedComplex(format!("attachment {k}: {e}")))?;
            if cyclic_class(&a.push_forward(rho)?) != target {
                return Err(Error::MalformedComplex(format!("attachment {k} does not lie over w")));
            }
            if !seen.insert(cyclic_class(a)) {
                return Err(Error::MalformedComplex(format!("attachment {k} repeats an earlier one")));
            }
        }
        Ok(())
    }

    fn counts(&self) -> (usize, usize, usize) {
        (self.graph.num_vertices(), self.graph.num_edges(), self.attachments.len())
    }

    fn traversals(&self) -> MultiLoop {
        MultiLoop { graph: self.graph.clone(), loops: self.attachments.clone() }
    }
}

/// One node of an nonpositivity certificate. Every node records the cell
/// counts of the complex it speaks about and its claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub chi: i64,
    pub trivial_pi1: bool,
    pub step: Step,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    /// No 2-cells.
    Graph { tree: bool },
    /// Elementary collapse of a free edge with the 2-cell through it.
    Collapse { edge: EdgeId, attachment: usize, rest: Box<Certificate> },
    /// An edge no 2-cell uses. One part when removing it keeps the
    /// complex connected (π₁ gains a free ℤ factor), two when it splits
    /// the complex into a wedge-like union.
    DeleteEdge { edge: EdgeId, parts: Vec<Certificate> },
    /// Every edge carries at least two 2-cell traversals:
    /// `faces ≤ deg σ ≤ −χ(Γ′)`.
    Theorem { deg_sigma: usize, neg_chi_graph: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NpiVerdict {
    pub chi: i64,
    pub trivial_pi1: bool,
    pub certificate: Certificate,
    /// `χ ≤ 0`, or trivial π₁ certified by a full collapse.
    pub pass: bool,
}

/// Certifies `χ(Y) ≤ 0` or that Y collapses to a point.
pub fn npi_check(y: &OneRelatorComplex, rho: &GraphMorphism, w: &Loop) -> Result<NpiVerdict> {
    w.validate(&rho.codomain)?;
    if !w.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if !rho.is_immersion()? {
        return Err(Error::NotImmersion);
    }
    y.validate(rho, w)?;
    let certificate = certify(y, rho, w)?;
    let chi = y.euler_characteristic()?;
    assert_eq!(certificate.chi, chi, "certificate disagrees with V − E + F");
    let pass = certificate.trivial_pi1 || chi <= 0;
    Ok(NpiVerdict { chi, trivial_pi1: certificate.trivial_pi1, certificate, pass })
}

fn certify(y: &OneRelatorComplex, rho: &GraphMorphism, w: &Loop) -> Result<Certificate> {
    let (vertices, edges, faces) = y.counts();
    let node = |chi: i64, trivial_pi1: bool, step: Step| Certificate {
        vertices,
        edges,
        faces,
        chi,
        trivial_pi1,
        step,
    };

    if y.attachments.is_empty() {
        let chi = y.graph.euler_characteristic()?;
        let tree = chi == 1;
        return Ok(node(chi, tree, Step::Graph { tree }));
    }

    let traversals = y.traversals();
    if let Some(&edge) = edges_traversed_once(&traversals).iter().next() {
        let attachment = y
            .attachments
            .iter()
            .position(|a| a.path.iter().any(|s| s.edge == edge))
            .expect("a traversed edge has an attachment");
        let mut graph = y.graph.clone();
        graph.edges.remove(&edge);
        let mut attachments = y.attachments.clone();
        attachments.remove(attachment);
        let rest = OneRelatorComplex { graph, attachments };
        let sub_rho = rho.restrict(&rest.graph);
        let rest = certify(&rest, &sub_rho, w)?;
        return Ok(node(rest.chi, rest.trivial_pi1, Step::Collapse { edge, attachment, rest: Box::new(rest) }));
    }

    let counts = traversals.traversal_counts();
    if let Some((&edge, _)) = counts.iter().find(|(_, &k)| k == 0) {
        let mut graph = y.graph.clone();
        graph.edges.remove(&edge);
        let comps = graph.components();
        let mut parts = Vec::new();
        for comp in &comps {
            let sub = graph.induced_subgraph(comp);
            let attachments = y
                .attachments
                .iter()
                .filter(|a| comp.contains(&a.point(&y.graph, 0)))
                .cloned()
                .collect();
            let part = OneRelatorComplex { graph: sub, attachments };
            let sub_rho = rho.restrict(&part.graph);
            parts.push(certify(&part, &sub_rho, w)?);
        }
        let (chi, trivial) = match parts.as_slice() {
            [one] => (one.chi - 1, false),
            [a, b] => (a.chi + b.chi - 1, a.trivial_pi1 && b.trivial_pi1),
            _ => unreachable!("deleting one edge leaves one or two components"),
        };
        return Ok(node(chi, trivial, Step::DeleteEdge { edge, parts }));
    }

    // every edge is traversed at least twice by the 2-cells
    let pb = pullback_loop(rho, w)?;
    assert!(!is_reducible(&pb.circles).reducible, "𝕊 contains the attachments");
    let mut lifts: BTreeSet<Vec<_>> = BTreeSet::new();
    for (c, lift) in pb.circles.loops.iter().zip(&pb.lifts) {
        if lift.degree == 1 {
            lifts.insert(cyclic_class(c));
        }
    }
    assert!(
        y.attachments.iter().all(|a| lifts.contains(&cyclic_class(a))),
        "each attachment is a degree-one circle of the pullback"
    );
    let deg_sigma = pb.covering_degree();
    let neg_chi_graph = -y.graph.euler_characteristic()?;
    let chi = -neg_chi_graph + faces as i64;
    Ok(node(chi, false, Step::Theorem { deg_sigma, neg_chi_graph }))
}

/// Recomputes every claim of a certificate from its cell counts and the
/// accounting rule of each step. Returns `(χ, trivial π₁)` of the root.
pub fn replay_certificate(c: &Certificate) -> std::result::Result<(i64, bool), String> {
    let direct = c.vertices as i64 - c.edges as i64 + c.faces as i64;
    if direct != c.chi {
        return Err(format!("claimed χ {} but V − E + F = {direct}", c.chi));
    }
    let (chi, trivial) = match &c.step {
        Step::Graph { tree } => {
            if c.faces != 0 {
                return Err("graph step with 2-cells".into());
            }
            if *tree != (direct == 1) {
                return Err("tree flag disagrees with χ of a connected graph".into());
            }
            (direct, *tree)
        }
        Step::Collapse { rest, .. } => {
            if (rest.vertices, rest.edges + 1, rest.faces + 1) != (c.vertices, c.edges, c.faces) {
                return Err("collapse must remove one edge and one 2-cell".into());
            }
            replay_certificate(rest)?
        }
        Step::DeleteEdge { parts, .. } => {
            let replayed = parts.iter().map(replay_certificate).collect::<std::result::Result<Vec<_>, _>>()?;
            let v: usize = parts.iter().map(|p| p.vertices).sum();
            let e: usize = parts.iter().map(|p| p.edges).sum();
            let f: usize = parts.iter().map(|p| p.faces).sum();
            if (v, e + 1, f) != (c.vertices, c.edges, c.faces) {
                return Err("edge deletion must remove exactly one edge".into());
            }
            match replayed.as_slice() {
                [(x, _)] => (x - 1, false),
                [(x, tx), (y, ty)] => (x + y - 1, *tx && *ty),
                _ => return Err("edge deletion must leave one or two parts".into()),
            }
        }
        Step::Theorem { deg_sigma, neg_chi_graph } => {
            if *neg_chi_graph != c.edges as i64 - c.vertices as i64 {
                return Err("−χ(Γ′) does not match the cell counts".into());
            }
            if c.faces > *deg_sigma || *deg_sigma as i64 > *neg_chi_graph {
                return Err(format!(
                    "chain #2-cells {} ≤ deg σ {} ≤ −χ(Γ′) {} fails",
                    c.faces, deg_sigma, neg_chi_graph
                ));
            }
            (direct, false)
        }
    };
    if chi != c.chi || trivial != c.trivial_pi1 {
        return Err(format!("replayed (χ {chi}, trivial {trivial}) but claimed ({}, {})", c.chi, c.trivial_pi1));
    }
    if !trivial && chi > 0 {
        return Err("χ > 0 without a collapse to a point".into());
    }
    Ok((chi, trivial))
}

/// The lower bound on the genus of `w^m` for primitive `w`, with the
/// inequalities it comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusBound {
    pub power: u32,
    pub bound: Ratio<u32>,
    pub chain: Vec<String>,
}

pub fn genus_lower_bound(w: &Loop, m: u32) -> Result<GenusBound> {
    if !w.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    if m == 0 {
        return Err(Error::Usage("power must be positive".into()));
    }
    Ok(GenusBound {
        power: m,
        bound: Ratio::new(m, 2),
        chain: vec![
            format!("m = {m} ≤ −χ(Γ′) for an irreducible Γ′ carrying w^m"),
            "−χ(Γ′) ≤ −χ(Σ) = 2g − 1 for a once-holed genus-g surface Σ".into(),
            format!("g ≥ {}", Ratio::new(m, 2)),
        ],
    })
}

/// Degree-one circles of the pullback of `w` along `rho`: the lifts of the
/// relator, each read from position 0 of `w`.
pub fn relator_lifts(rho: &GraphMorphism, w: &Loop) -> Result<Vec<Loop>> {
    let pb = pullback_loops(rho, &MultiLoop::single(rho.codomain.clone(), w.clone())?)?;
    Ok(pb
        .circles
        .loops
        .into_iter()
        .zip(&pb.lifts)
        .filter(|(_, c)| c.degree == 1)
        .map(|(l, _)| l)
        .collect())
}

/// Vertices each attachment touches; used by callers assembling complexes.
pub fn attachment_support(y: &OneRelatorComplex) -> BTreeMap<usize, BTreeSet<VertexId>> {
    y.attachments
        .iter()
        .enumerate()
        .map(|(k, a)| (k, (0..a.len()).map(|i| a.point(&y.graph, i)).collect()))
        .collect()
}
