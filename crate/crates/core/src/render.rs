//! SVG pictures of stackings and Graphviz DOT for graphs and morphisms.

use std::fmt::Write as _;

use crate::graph::{Direction, Graph, GraphMorphism};
use crate::stacking::{PosRef, Stacking};
use crate::word::Word;

const SLOT: f64 = 160.0;
const COLUMN: f64 = 30.0;
const STEP: f64 = 22.0;
const MARGIN: f64 = 30.0;

/// Γ is laid out edge by edge in id order; each edge gets a slot with its
/// source column on the left and its target column on the right. Each
/// traversal is a horizontal arc at the height of its rank in the edge
/// order, joined to its endpoints at their ranks in the vertex orders.
/// Higher in an order is higher on the page.
pub fn stacking_svg(s: &Stacking) -> String {
    let g = &s.subject.graph;
    let tallest = s
        .edge_orders
        .values()
        .chain(s.vertex_orders.values())
        .map(Vec::len)
        .max()
        .unwrap_or(1)
        .max(1);
    let height = 2.0 * MARGIN + STEP * tallest as f64 + 20.0;
    let width = 2.0 * MARGIN + SLOT * g.num_edges().max(1) as f64;
    let baseline = height - MARGIN;
    let y = |rank: usize| baseline - STEP * (rank as f64 + 0.5);
    let vertex_rank = |v, r: PosRef| {
        s.vertex_orders[&v].iter().position(|&x| x == r).expect("valid stacking orders every point")
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(out, r#"<g font-family="monospace" font-size="11">"#);
    for (slot, (id, e)) in g.edges().enumerate() {
        let x0 = MARGIN + SLOT * slot as f64;
        let (left, right) = (x0 + COLUMN / 2.0, x0 + SLOT - COLUMN / 2.0);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{id}: {} → {}</text>"#,
            x0 + SLOT / 2.0,
            MARGIN - 10.0,
            e.src,
            e.dst
        );
        for (x, v) in [(left, e.src), (right, e.dst)] {
            let _ = writeln!(
                out,
                r##"<line class="column" x1="{x}" y1="{}" x2="{x}" y2="{baseline}" stroke="#bbb"/>"##,
                MARGIN
            );
            let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{v}</text>"#, baseline + 14.0);
        }
        let Some(order) = s.edge_orders.get(&id) else { continue };
        for (rank, &r) in order.iter().enumerate() {
            let PosRef(j, i) = r;
            let l = &s.subject.loops[j];
            let n = l.len();
            let (at_src, at_dst) = match l.path[i].dir {
                Direction::Forward => (PosRef(j, i), PosRef(j, (i + 1) % n)),
                Direction::Backward => (PosRef(j, (i + 1) % n), PosRef(j, i)),
            };
            let ya = y(rank);
            let (x1, x2) = (x0 + COLUMN, x0 + SLOT - COLUMN);
            let _ = writeln!(
                out,
                r##"<line class="arc" data-edge="{}" data-rank="{rank}" data-circle="{j}" data-pos="{i}" x1="{x1}" y1="{ya}" x2="{x2}" y2="{ya}" stroke="#1f5fa8" stroke-width="2"/>"##,
                id.0
            );
            for (xc, xe, v, p) in [(left, x1, e.src, at_src), (right, x2, e.dst, at_dst)] {
                let yv = y(vertex_rank(v, p));
                let _ = writeln!(
                    out,
                    r##"<line class="link" x1="{xc}" y1="{yv}" x2="{xe}" y2="{ya}" stroke="#1f5fa8"/>"##
                );
                let _ = writeln!(out, r#"<circle cx="{xc}" cy="{yv}" r="2.5"/>"#);
            }
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn graph_dot(g: &Graph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in g.vertices() {
        let _ = writeln!(out, "  {} [shape=circle];", quote(&v.to_string()));
    }
    for (id, e) in g.edges() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&e.src.to_string()),
            quote(&e.dst.to_string()),
            quote(&id.to_string())
        );
    }
    out.push_str("}\n");
    out
}

/// The domain of `m`, each edge labelled by its image. Images in a rose of
/// rank ≤ 26 are written as letters.
pub fn morphism_dot(m: &GraphMorphism, name: &str) -> String {
    let letters = m.codomain.num_vertices() == 1 && m.codomain.num_edges() <= 26;
    let mut out = format!("digraph {} {{\n", quote(name));
    for v in m.domain.vertices() {
        let label = match m.vertex_map.get(&v) {
            Some(w) => format!("{v} ↦ {w}"),
            None => v.to_string(),
        };
        let _ = writeln!(out, "  {} [shape=circle, label={}];", quote(&v.to_string()), quote(&label));
    }
    for (id, e) in m.domain.edges() {
        let image = match m.edge_map.get(&id) {
            Some(&s) if letters => Word(vec![s]).to_string(),
            Some(&s) => format!("{}{}", s.edge, if s.is_forward() { "" } else { "⁻¹" }),
            None => "?".into(),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&e.src.to_string()),
            quote(&e.dst.to_string()),
            quote(&format!("{id}: {image}"))
        );
    }
    out.push_str("}\n");
    out
}
