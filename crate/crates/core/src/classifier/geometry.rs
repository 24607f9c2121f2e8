//! Closed axis-aligned rectangles and straight segments in `(ε′, ε″)` coordinates.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub real: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub real_min: f64,
    pub real_max: f64,
    pub loss_min: f64,
    pub loss_max: f64,
}

impl Rect {
    pub fn contains(&self, p: PlanePoint) -> bool {
        (self.real_min..=self.real_max).contains(&p.real)
            && (self.loss_min..=self.loss_max).contains(&p.loss)
    }

    /// Parameter range `[t0, t1] ⊆ [0, 1]` of the segment `a → b` lying in
    /// the rectangle (Liang–Barsky clipping), or `None` if they miss.
    pub fn clip(&self, a: PlanePoint, b: PlanePoint) -> Option<(f64, f64)> {
        let d_real = b.real - a.real;
        let d_loss = b.loss - a.loss;
        let edges = [
            (-d_real, a.real - self.real_min),
            (d_real, self.real_max - a.real),
            (-d_loss, a.loss - self.loss_min),
            (d_loss, self.loss_max - a.loss),
        ];
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in edges {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
                continue;
            }
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }

    pub fn intersects_segment(&self, a: PlanePoint, b: PlanePoint) -> bool {
        self.clip(a, b).is_some()
    }
}

/// Whether the segment `a → b` lies entirely inside the union of `rects`.
pub fn segment_covered<'a>(a: PlanePoint, b: PlanePoint, rects: impl IntoIterator<Item = &'a Rect>) -> bool {
    let mut spans: Vec<(f64, f64)> = rects.into_iter().filter_map(|r| r.clip(a, b)).collect();
    if spans.is_empty() {
        return false;
    }
    spans.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut reach = 0.0f64;
    for (start, end) in spans {
        if start > reach {
            return false;
        }
        reach = reach.max(end);
        if reach >= 1.0 {
            return true;
        }
    }
    false
}
