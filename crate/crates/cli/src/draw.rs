//! Figure panels for masks and complexes.

use mmfield::filtrations::Cell;
use mmfield::svg::{Layer, Panel};

pub fn xy(coords: &[Vec<f64>], i: usize) -> [f64; 2] {
    let c = &coords[i];
    [c[0], c.get(1).copied().unwrap_or(0.0)]
}

/// Members shaded by `intensity` (darker is larger, scaled to the maximum
/// over members); non-members as faint dots; `marks` as small black dots.
pub fn mask_panel(title: &str, coords: &[Vec<f64>], members: &[bool], intensity: Option<&[f64]>, marks: &[usize]) -> Panel {
    let top = intensity
        .map(|w| members.iter().zip(w).filter(|(m, _)| **m).map(|(_, v)| *v).fold(0.0, f64::max))
        .unwrap_or(0.0);
    let (mut bg, mut fg, mut shade) = (Vec::new(), Vec::new(), Vec::new());
    for (i, &m) in members.iter().enumerate() {
        if m {
            fg.push(xy(coords, i));
            let level = match intensity {
                Some(w) if top > 0.0 => w[i] / top,
                _ => 1.0,
            };
            shade.push(0.85 - 0.75 * level);
        } else {
            bg.push(xy(coords, i));
        }
    }
    let nbg = bg.len();
    Panel::new(title)
        .layer(Layer::Points {
            pts: bg,
            gray: vec![0.93; nbg],
            radius: 1.5,
        })
        .layer(Layer::Points {
            pts: fg,
            gray: shade,
            radius: 3.0,
        })
        .layer(Layer::Points {
            pts: marks.iter().map(|&i| xy(coords, i)).collect(),
            gray: vec![0.0; marks.len()],
            radius: 1.2,
        })
}

fn centroid(coords: &[Vec<f64>], set: &[usize]) -> [f64; 2] {
    let mut c = [0.0, 0.0];
    for &i in set {
        let p = xy(coords, i);
        c[0] += p[0] / set.len() as f64;
        c[1] += p[1] / set.len() as f64;
    }
    c
}

/// Edges and triangles of a complex; chain cells are drawn at the
/// centroids of their subsets, as in a barycentric subdivision.
pub fn complex_panel(title: &str, coords: &[Vec<f64>], cells: &[&Cell]) -> Panel {
    let (mut verts, mut segs, mut tris) = (Vec::new(), Vec::new(), Vec::new());
    for c in cells {
        let pts: Vec<[f64; 2]> = match c {
            Cell::Simplex(v) => v.iter().map(|&i| xy(coords, i)).collect(),
            Cell::Chain(ch) => ch.iter().map(|s| centroid(coords, s)).collect(),
        };
        match pts.len() {
            1 => verts.push(pts[0]),
            2 => segs.push([pts[0], pts[1]]),
            3 => tris.push([pts[0], pts[1], pts[2]]),
            _ => {}
        }
    }
    let nv = verts.len();
    Panel::new(title)
        .layer(Layer::Triangles { tris, gray: 0.82 })
        .layer(Layer::Segments { segs, gray: 0.25 })
        .layer(Layer::Points {
            pts: verts,
            gray: vec![0.0; nv],
            radius: 3.0,
        })
}
