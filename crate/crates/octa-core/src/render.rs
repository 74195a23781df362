//! Output formats for graphs and matchings: SVG, DOT, and a JSON dump.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::graph::{face_position, Color, EdgeWeight, GraphWithOpenFaces};
use crate::matching::Matching;

const UNIT: i64 = 12; // pixels per quarter step

#[derive(Clone, Copy, Debug, Default)]
pub struct SvgOptions {
    pub show_labels: bool,
}

fn px(q: i64) -> i64 {
    q * UNIT
}

/// Walks a cyclic edge list into its vertex cycle.
fn face_vertex_cycle(g: &GraphWithOpenFaces, cycle: &[usize]) -> Vec<usize> {
    if cycle.is_empty() {
        return Vec::new();
    }
    if cycle.len() == 1 {
        let e = &g.edges[cycle[0]];
        return vec![e.v1, e.v2];
    }
    let mut out = Vec::with_capacity(cycle.len());
    for k in 0..cycle.len() {
        let e = &g.edges[cycle[k]];
        let next = &g.edges[cycle[(k + 1) % cycle.len()]];
        // The vertex shared with the next edge comes second.
        if e.v1 == next.v1 || e.v1 == next.v2 {
            out.push(e.v2);
        } else {
            out.push(e.v1);
        }
    }
    out
}

/// Renders the graph: closed faces shaded, open faces dashed, matching
/// edges bold when given.
pub fn graph_to_svg(
    g: &GraphWithOpenFaces,
    matching: Option<&Matching>,
    options: SvgOptions,
) -> String {
    let xs: Vec<i64> = g.vertices.iter().map(|v| v.pos.0).collect();
    let ys: Vec<i64> = g.vertices.iter().map(|v| v.pos.1).collect();
    let pad = 8;
    let min_x = px(xs.iter().min().copied().unwrap_or(0)) - pad * UNIT;
    let max_x = px(xs.iter().max().copied().unwrap_or(0)) + pad * UNIT;
    let min_y = px(ys.iter().min().copied().unwrap_or(0)) - pad * UNIT;
    let max_y = px(ys.iter().max().copied().unwrap_or(0)) + pad * UNIT;
    // SVG y grows downward; flip by rendering at (x, -y).
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        min_x,
        -max_y,
        max_x - min_x,
        max_y - min_y
    );
    let _ = writeln!(
        s,
        r#"  <g fill="none" stroke="black" stroke-linecap="round">"#
    );
    for (f, cycle, _) in g.faces().filter(|&(_, _, closed)| closed) {
        let verts = face_vertex_cycle(g, cycle);
        let points: Vec<String> = verts
            .iter()
            .map(|&v| format!("{},{}", px(g.vertices[v].pos.0), -px(g.vertices[v].pos.1)))
            .collect();
        let _ = writeln!(
            s,
            r##"    <polygon points="{}" fill="#d8e6f4" stroke="none"/>"##,
            points.join(" ")
        );
        if options.show_labels {
            let (cx, cy) = face_position(*f);
            let _ = writeln!(
                s,
                r##"    <text x="{}" y="{}" font-size="{}" fill="#456" stroke="none" text-anchor="middle">x[{},{}]</text>"##,
                px(cx),
                -px(cy),
                UNIT * 2,
                f.i,
                f.j
            );
        }
    }
    for (f, path, _) in g.faces().filter(|&(_, _, closed)| !closed) {
        let verts = face_vertex_cycle(g, path);
        let points: Vec<String> = verts
            .iter()
            .map(|&v| format!("{},{}", px(g.vertices[v].pos.0), -px(g.vertices[v].pos.1)))
            .collect();
        let _ = writeln!(
            s,
            r##"    <polyline points="{}" stroke="#888" stroke-dasharray="4 4"/>"##,
            points.join(" ")
        );
        if options.show_labels {
            let (cx, cy) = face_position(*f);
            let _ = writeln!(
                s,
                r##"    <text x="{}" y="{}" font-size="{}" fill="#999" stroke="none" text-anchor="middle">x[{},{}]</text>"##,
                px(cx),
                -px(cy),
                UNIT * 2,
                f.i,
                f.j
            );
        }
    }
    for (eid, e) in g.edges.iter().enumerate() {
        let p1 = g.vertices[e.v1].pos;
        let p2 = g.vertices[e.v2].pos;
        let in_matching = matching.is_some_and(|m| m.contains(eid));
        let width = if in_matching { UNIT } else { UNIT / 4 };
        let color = if in_matching { "#c0392b" } else { "black" };
        let _ = writeln!(
            s,
            r#"    <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}"/>"#,
            px(p1.0),
            -px(p1.1),
            px(p2.0),
            -px(p2.1),
            color,
            width
        );
        if options.show_labels {
            if let EdgeWeight::Weighted(label) = &e.weight {
                let _ = writeln!(
                    s,
                    r##"    <text x="{}" y="{}" font-size="{}" fill="#060" stroke="none" text-anchor="middle">{}</text>"##,
                    (px(p1.0) + px(p2.0)) / 2,
                    -(px(p1.1) + px(p2.1)) / 2,
                    UNIT * 3 / 2,
                    label
                );
            }
        }
    }
    for v in &g.vertices {
        let fill = match v.color {
            Color::Black => "black",
            Color::White => "white",
        };
        let _ = writeln!(
            s,
            r#"    <circle cx="{}" cy="{}" r="{}" fill="{}" stroke="black" stroke-width="{}"/>"#,
            px(v.pos.0),
            -px(v.pos.1),
            UNIT,
            fill,
            UNIT / 4
        );
    }
    let _ = writeln!(s, "  </g>");
    s.push_str("</svg>\n");
    s
}

/// DOT export for debugging; positions are pinned so `neato -n` reproduces
/// the embedding.
pub fn graph_to_dot(g: &GraphWithOpenFaces) -> String {
    let mut s = String::from("graph octa {\n  node [shape=point];\n");
    for (vid, v) in g.vertices.iter().enumerate() {
        let _ = writeln!(
            s,
            "  v{} [pos=\"{},{}!\", xlabel=\"{}\", style={}];",
            vid,
            v.pos.0,
            v.pos.1,
            v.key,
            if v.color == Color::Black { "filled" } else { "solid" }
        );
    }
    for e in &g.edges {
        match &e.weight {
            EdgeWeight::Weighted(label) => {
                let _ = writeln!(s, "  v{} -- v{} [label=\"{}\"];", e.v1, e.v2, label);
            }
            EdgeWeight::Unweighted => {
                let _ = writeln!(s, "  v{} -- v{} [style=dashed];", e.v1, e.v2);
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Full JSON dump: vertices with positions and colors, edges with labels,
/// faces with their ordered boundary lists.
pub fn graph_to_json(g: &GraphWithOpenFaces) -> Value {
    let vertices: Vec<Value> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(vid, v)| {
            json!({
                "id": vid,
                "key": v.key.to_string(),
                "pos": [v.pos.0, v.pos.1],
                "color": if v.color == Color::Black { "black" } else { "white" },
            })
        })
        .collect();
    let edges: Vec<Value> = g
        .edges
        .iter()
        .enumerate()
        .map(|(eid, e)| match &e.weight {
            EdgeWeight::Weighted(l) => json!({
                "id": eid,
                "v": [e.v1, e.v2],
                "kind": "weighted",
                "label": [l.kind.letter().to_string(), l.i, l.j],
            }),
            EdgeWeight::Unweighted => json!({
                "id": eid,
                "v": [e.v1, e.v2],
                "kind": "unweighted",
            }),
        })
        .collect();
    let closed: Vec<Value> = g
        .closed_faces
        .iter()
        .map(|(f, cyc)| json!({ "face": [f.i, f.j], "edges": cyc }))
        .collect();
    let open: Vec<Value> = g
        .open_faces
        .iter()
        .map(|(f, path)| json!({ "face": [f.i, f.j], "edges": path }))
        .collect();
    json!({
        "apex": [g.apex.n, g.apex.i, g.apex.j],
        "vertices": vertices,
        "edges": edges,
        "closed_faces": closed,
        "open_faces": open,
    })
}

/// Matchings as lists of edge ids, plus the weighted labels of each.
pub fn matchings_to_json(g: &GraphWithOpenFaces, ms: &[Matching]) -> Value {
    let list: Vec<Value> = ms
        .iter()
        .map(|m| {
            let labels: Vec<Value> = m
                .weighted_labels(g)
                .into_iter()
                .map(|l| json!([l.kind.letter().to_string(), l.i, l.j]))
                .collect();
            json!({ "edges": m.edges, "weighted_labels": labels })
        })
        .collect();
    json!({ "count": ms.len(), "matchings": list })
}

/// Sanity for emitted SVG: every tag closes and coordinates are finite.
pub fn svg_is_well_formed(svg: &str) -> bool {
    let opens = svg.matches("<svg").count();
    let closes = svg.matches("</svg>").count();
    let gs = svg.matches("<g").count();
    let gcloses = svg.matches("</g>").count();
    opens == 1 && closes == 1 && gs == gcloses && !svg.contains("NaN")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_subgraph;
    use crate::lattice::{HeightFunction, LatticePoint};
    use crate::matching::{enumerate_matchings, EnumerationLimits};

    #[test]
    fn svg_and_dot_render() {
        let g = build_subgraph(
            &HeightFunction::abs_sum(),
            LatticePoint::new(3, 1, 0).unwrap(),
        )
        .unwrap();
        let ms = enumerate_matchings(&g, EnumerationLimits::none()).unwrap();
        let svg = graph_to_svg(&g, Some(&ms[0]), SvgOptions { show_labels: true });
        assert!(svg_is_well_formed(&svg));
        assert!(svg.contains("polygon"));
        assert!(svg.contains("stroke-dasharray"));
        let dot = graph_to_dot(&g);
        assert!(dot.starts_with("graph octa {"));
        assert!(dot.trim_end().ends_with('}'));
        let js = graph_to_json(&g);
        assert_eq!(js["apex"], serde_json::json!([3, 1, 0]));
        let mj = matchings_to_json(&g, &ms);
        assert_eq!(mj["count"], serde_json::json!(4));
    }

    #[test]
    fn deterministic_output() {
        let g = build_subgraph(
            &HeightFunction::fortress(),
            LatticePoint::new(2, 0, 0).unwrap(),
        )
        .unwrap();
        let a = graph_to_svg(&g, None, SvgOptions::default());
        let b = graph_to_svg(&g, None, SvgOptions::default());
        assert_eq!(a, b);
        assert_eq!(graph_to_dot(&g), graph_to_dot(&g));
        assert_eq!(graph_to_json(&g), graph_to_json(&g));
    }
}
