//! Graphviz and TikZ renderings of diagrams with an optional web overlay.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::web::{Highlight, Web};
use crate::zx::{Diagram, NodeKind, SpiderColor};

const GREEN: &str = "#99dd99";
const RED: &str = "#ff8888";

fn check_web(d: &Diagram, web: Option<&Web>) -> Result<()> {
    match web {
        Some(w) if !w.belongs_to(d) => Err(Error::ForeignWeb(format!(
            "web over {} edges does not belong to this diagram",
            w.num_edges()
        ))),
        _ => Ok(()),
    }
}

fn edge_highlight(web: Option<&Web>, edge: usize) -> Highlight {
    web.map_or(Highlight::None, |w| w.highlight(edge))
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz `graph` with pinned positions; layers are offset diagonally.
pub fn to_dot(d: &Diagram, web: Option<&Web>) -> Result<String> {
    check_web(d, web)?;
    let mut out = String::from("graph zx {\n");
    out.push_str("  layout=neato;\n  node [fontsize=10, width=0.3, height=0.3, fixedsize=true];\n");
    for node in d.nodes() {
        let p = node.pos;
        let x = 2.0 * p.col as f64 + 0.9 * p.layer as f64;
        let y = 2.0 * p.row as f64 + 0.5 * p.layer as f64;
        let attrs = match &node.kind {
            NodeKind::Spider { color, phase } => {
                let fill = match color {
                    SpiderColor::Z => GREEN,
                    SpiderColor::X => RED,
                };
                format!(
                    "shape=circle, style=filled, fillcolor=\"{fill}\", label={}",
                    quote(phase.label())
                )
            }
            NodeKind::MeasureOut { check } => {
                format!("shape=point, xlabel={}", quote(check.as_str()))
            }
            NodeKind::BoundaryIn | NodeKind::BoundaryOut => "shape=point".to_owned(),
        };
        writeln!(
            out,
            "  {} [{attrs}, pos=\"{x:.2},{y:.2}!\"];",
            quote(node.id.as_str())
        )
        .unwrap();
    }
    for (k, edge) in d.edges().iter().enumerate() {
        let style = match edge_highlight(web, k) {
            Highlight::None => String::new(),
            Highlight::X => " [color=\"red:red\", penwidth=2]".into(),
            Highlight::Z => " [color=\"green:green\", penwidth=2]".into(),
            Highlight::Y => " [color=\"red:green\", penwidth=2]".into(),
        };
        writeln!(
            out,
            "  {} -- {}{style};",
            quote(edge.a.as_str()),
            quote(edge.b.as_str())
        )
        .unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}

/// Standalone `tikz-3dplot` document. Coordinates are
/// `(2 + 2 col, 2 + 2 row, 10 layer)`.
pub fn to_tikz(d: &Diagram, web: Option<&Web>) -> Result<String> {
    check_web(d, web)?;
    let mut out = String::new();
    out.push_str("\\documentclass[tikz]{standalone}\n");
    out.push_str("\\usepackage{tikz-3dplot}\n");
    out.push_str("\\definecolor{zx_green}{HTML}{99DD99}\n");
    out.push_str("\\definecolor{zx_red}{HTML}{FF8888}\n");
    out.push_str("\\begin{document}\n\\tdplotsetmaincoords{70}{120}\n");
    out.push_str("\\begin{tikzpicture}[tdplot_main_coords, scale=0.3,\n");
    out.push_str(
        "  z spider/.style={circle, draw, fill=zx_green, inner sep=1pt, minimum size=6pt},\n",
    );
    out.push_str(
        "  x spider/.style={circle, draw, fill=zx_red, inner sep=1pt, minimum size=6pt},\n",
    );
    out.push_str("  leg/.style={inner sep=0pt, minimum size=0pt}]\n");
    let name = |i: usize| format!("n{i}");
    for (i, node) in d.nodes().iter().enumerate() {
        let p = node.pos;
        let (style, label) = match &node.kind {
            NodeKind::Spider { color, phase } => (
                match color {
                    SpiderColor::Z => "z spider",
                    SpiderColor::X => "x spider",
                },
                phase.tex(),
            ),
            _ => ("leg", ""),
        };
        writeln!(
            out,
            "  \\node[{style}] ({}) at ({}, {}, {}) {{\\tiny {label}}}; % {}",
            name(i),
            2 + 2 * p.col,
            2 + 2 * p.row,
            10 * p.layer,
            node.id
        )
        .unwrap();
    }
    for k in 0..d.num_edges() {
        let (a, b) = d.endpoints(k);
        let draw = match edge_highlight(web, k) {
            Highlight::None => "draw=black".to_owned(),
            Highlight::X => "draw=zx_red, line width=2pt".to_owned(),
            Highlight::Z => "draw=zx_green, line width=2pt".to_owned(),
            Highlight::Y => {
                writeln!(
                    out,
                    "  \\draw[zx_red, line width=3pt] ({}) -- ({});",
                    name(a),
                    name(b)
                )
                .unwrap();
                "draw=zx_green, line width=1pt".to_owned()
            }
        };
        writeln!(out, "  \\draw[{draw}] ({}) -- ({});", name(a), name(b)).unwrap();
    }
    out.push_str("\\end{tikzpicture}\n\\end{document}\n");
    Ok(out)
}
