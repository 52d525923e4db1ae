//! Arc diagrams: vertices on a horizontal spine, edges as semicircles colored
//! by page.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::graph::Graph;
use crate::layout::LinearLayout;

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];
const GAP: f64 = 36.0;
const MARGIN: f64 = 24.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

impl FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "above" | "a" => Ok(Side::Above),
            "below" | "b" => Ok(Side::Below),
            _ => Err(format!("unknown side `{s}` (expected above or below)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SvgOptions {
    /// Side per page index. Pages without an entry alternate, starting above.
    pub sides: Vec<Side>,
}

impl SvgOptions {
    pub fn side(&self, page: usize) -> Side {
        self.sides.get(page).copied().unwrap_or(if page.is_multiple_of(2) {
            Side::Above
        } else {
            Side::Below
        })
    }

    /// Parses `above,below,...`.
    pub fn parse_sides(s: &str) -> Result<Self, String> {
        let sides = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()?;
        Ok(Self { sides })
    }
}

pub fn render_arc_diagram(g: &Graph, layout: &LinearLayout, opts: &SvgOptions) -> String {
    let sigma = layout.sigma();
    let n = layout.order.len();
    let x = |i: usize| MARGIN + GAP * i as f64;
    let mut reach = [0.0f64; 2];
    for (id, e) in g.edges() {
        let (Some(i), Some(j), Some(&p)) = (sigma.position(&e.source), sigma.position(&e.target), layout.assignment.get(id))
        else {
            continue;
        };
        let r = GAP * i.abs_diff(j) as f64 / 2.0;
        let slot = usize::from(opts.side(p) == Side::Below);
        reach[slot] = reach[slot].max(r);
    }
    let spine = MARGIN + reach[0] + 8.0;
    let width = 2.0 * MARGIN + GAP * n.saturating_sub(1) as f64;
    let height = spine + reach[1] + MARGIN + 16.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    out.push_str("<g fill=\"none\" stroke-width=\"1.5\">\n");
    for (id, e) in g.edges() {
        let (Some(i), Some(j), Some(&p)) = (sigma.position(&e.source), sigma.position(&e.target), layout.assignment.get(id))
        else {
            continue;
        };
        let (lo, hi) = (i.min(j), i.max(j));
        let r = GAP * (hi - lo) as f64 / 2.0;
        let sweep = u8::from(opts.side(p) == Side::Above);
        let _ = writeln!(
            out,
            "<path data-edge=\"{}\" data-page=\"{p}\" stroke=\"{}\" d=\"M {:.1} {spine:.1} A {r:.1} {r:.1} 0 0 {sweep} {:.1} {spine:.1}\"/>",
            xml(id.as_str()),
            PALETTE[p % PALETTE.len()],
            x(lo),
            x(hi)
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(
        out,
        "<line x1=\"{:.1}\" y1=\"{spine:.1}\" x2=\"{:.1}\" y2=\"{spine:.1}\" stroke=\"#999\"/>",
        x(0),
        x(n.saturating_sub(1))
    );
    for (i, v) in layout.order.iter().enumerate() {
        let _ = writeln!(
            out,
            "<circle data-vertex=\"{0}\" cx=\"{1:.1}\" cy=\"{spine:.1}\" r=\"4\" fill=\"#222\"/><text x=\"{1:.1}\" y=\"{2:.1}\" font-size=\"10\" text-anchor=\"middle\">{0}</text>",
            xml(v.as_str()),
            x(i),
            height - MARGIN / 2.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_path_per_edge_in_page_color() {
        let g = Graph::from_edges(&[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let layout = LinearLayout {
            order: vec!["a".into(), "b".into(), "c".into()],
            assignment: [("a-b".into(), 0), ("b-c".into(), 0), ("a-c".into(), 1)].into_iter().collect(),
        };
        let svg = render_arc_diagram(&g, &layout, &SvgOptions::default());
        assert_eq!(svg.matches("<path").count(), 3);
        assert_eq!(svg.matches(PALETTE[1]).count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);
        // Page 1 defaults to below: sweep flag 0.
        assert!(svg.contains("data-page=\"1\" stroke=\"#1f77b4\" d=\"M 24.0"));
        assert!(svg.contains(" 0 0 0 96.0"));
        let flipped = render_arc_diagram(&g, &layout, &SvgOptions::parse_sides("below,above").unwrap());
        assert!(flipped.contains(" 0 0 1 96.0"));
    }
}
