//! Self-intersection scan for planar polylines.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Index of the first segment, `points[first]..points[first + 1]`.
    pub first: usize,
    pub second: usize,
    pub at: (f64, f64),
}

type Segment = (usize, (f64, f64), (f64, f64));

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper crossing of segments `pq` and `rs`; touching and collinear
/// overlap do not count.
fn crossing(p: (f64, f64), q: (f64, f64), r: (f64, f64), s: (f64, f64)) -> Option<(f64, f64)> {
    let d1 = orient(p, q, r);
    let d2 = orient(p, q, s);
    let d3 = orient(r, s, p);
    let d4 = orient(r, s, q);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        let u = d3 / (d3 - d4);
        Some((p.0 + u * (q.0 - p.0), p.1 + u * (q.1 - p.1)))
    } else {
        None
    }
}

/// All crossings between non-adjacent segments of the open polyline.
/// Segments with a non-finite endpoint are skipped.
pub fn self_intersections(points: &[(f64, f64)]) -> Vec<Crossing> {
    let finite = |p: &(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let segments: Vec<Segment> = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| finite(&w[0]) && finite(&w[1]))
        .map(|(i, w)| (i, w[0], w[1]))
        .collect();
    let bbox =
        |a: (f64, f64), b: (f64, f64)| (a.0.min(b.0), a.0.max(b.0), a.1.min(b.1), a.1.max(b.1));
    let boxes: Vec<_> = segments.iter().map(|&(_, a, b)| bbox(a, b)).collect();

    let mut out = Vec::new();
    for (m, &(i, p, q)) in segments.iter().enumerate() {
        let bi = boxes[m];
        for (n, &(j, r, s)) in segments.iter().enumerate().skip(m + 1) {
            if j == i + 1 {
                continue;
            }
            let bj = boxes[n];
            if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                continue;
            }
            if let Some(at) = crossing(p, q, r, s) {
                out.push(Crossing {
                    first: i,
                    second: j,
                    at,
                });
            }
        }
    }
    out
}
