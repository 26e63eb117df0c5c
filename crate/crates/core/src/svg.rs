//! Minimal grayscale SVG drawings on a fixed 800x800 viewport.

use std::fmt::Write;

pub const SIZE: f64 = 800.0;
const MARGIN: f64 = 24.0;
const TITLE: f64 = 18.0;

#[derive(Clone, Debug)]
pub enum Layer {
    /// Dots with gray level in `[0, 1]` (0 black, 1 white).
    Points { pts: Vec<[f64; 2]>, gray: Vec<f64>, radius: f64 },
    Segments { segs: Vec<[[f64; 2]; 2]>, gray: f64 },
    Triangles { tris: Vec<[[f64; 2]; 3]>, gray: f64 },
}

#[derive(Clone, Debug)]
pub struct Panel {
    pub title: String,
    pub layers: Vec<Layer>,
}

impl Panel {
    pub fn new(title: impl Into<String>) -> Self {
        Panel {
            title: title.into(),
            layers: Vec::new(),
        }
    }

    pub fn layer(mut self, l: Layer) -> Self {
        self.layers.push(l);
        self
    }

    fn bbox(&self) -> Option<[f64; 4]> {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        let mut any = false;
        let mut add = |p: &[f64; 2]| {
            any = true;
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        };
        for l in &self.layers {
            match l {
                Layer::Points { pts, .. } => pts.iter().for_each(&mut add),
                Layer::Segments { segs, .. } => segs.iter().flatten().for_each(&mut add),
                Layer::Triangles { tris, .. } => tris.iter().flatten().for_each(&mut add),
            }
        }
        any.then_some(b)
    }
}

fn gray_hex(g: f64) -> String {
    let v = (g.clamp(0.0, 1.0) * 255.0).round() as u8;
    format!("#{v:02x}{v:02x}{v:02x}")
}

/// Panels stacked vertically, each scaled to fit its band with equal axis
/// scales and `y` pointing up.
pub fn render(panels: &[Panel]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let band = SIZE / panels.len().max(1) as f64;
    for (k, p) in panels.iter().enumerate() {
        let top = k as f64 * band;
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="14" fill="black">{}</text>"#,
            top + TITLE - 4.0,
            escape(&p.title)
        );
        let Some([x0, y0, x1, y1]) = p.bbox() else { continue };
        let (w, h) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
        let (bw, bh) = (SIZE - 2.0 * MARGIN, band - TITLE - MARGIN);
        let sc = (bw / w).min(bh / h);
        let ox = MARGIN + 0.5 * (bw - sc * w);
        let oy = top + TITLE + 0.5 * (bh - sc * h);
        let tx = |q: &[f64; 2]| (ox + sc * (q[0] - x0), oy + sc * (y1 - q[1]));
        for l in &p.layers {
            match l {
                Layer::Triangles { tris, gray } => {
                    let _ = writeln!(s, r#"<g fill="{}" stroke="none">"#, gray_hex(*gray));
                    for t in tris {
                        let pts: Vec<String> = t
                            .iter()
                            .map(|q| {
                                let (a, b) = tx(q);
                                format!("{a:.2},{b:.2}")
                            })
                            .collect();
                        let _ = writeln!(s, r#"<polygon points="{}"/>"#, pts.join(" "));
                    }
                    s.push_str("</g>\n");
                }
                Layer::Segments { segs, gray } => {
                    let _ = writeln!(s, r#"<g stroke="{}" stroke-width="1">"#, gray_hex(*gray));
                    for [a, b] in segs {
                        let ((x1, y1), (x2, y2)) = (tx(a), tx(b));
                        let _ = writeln!(s, r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}"/>"#);
                    }
                    s.push_str("</g>\n");
                }
                Layer::Points { pts, gray, radius } => {
                    s.push_str("<g stroke=\"none\">\n");
                    for (q, g) in pts.iter().zip(gray) {
                        let (a, b) = tx(q);
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{a:.2}" cy="{b:.2}" r="{radius:.2}" fill="{}"/>"#,
                            gray_hex(*g)
                        );
                    }
                    s.push_str("</g>\n");
                }
            }
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_layers() {
        let p = Panel::new("a < b")
            .layer(Layer::Triangles {
                tris: vec![[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]],
                gray: 0.8,
            })
            .layer(Layer::Segments {
                segs: vec![[[0.0, 0.0], [1.0, 0.0]]],
                gray: 0.0,
            })
            .layer(Layer::Points {
                pts: vec![[0.0, 0.0]],
                gray: vec![0.5],
                radius: 2.0,
            });
        let s = render(&[p, Panel::new("empty")]);
        assert!(s.contains("<polygon") && s.contains("<line") && s.contains("<circle"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains(r##"fill="#808080""##));
    }
}
