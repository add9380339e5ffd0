//! Concave piecewise-linear envelopes over option points `(x, y)`.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Vertex {
    pub x: f64,
    pub y: f64,
    pub option: usize,
}

/// Upper concave envelope of a finite point set; vertices have strictly
/// increasing `x`, each vertex is one of the input points.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Envelope {
    pub vertices: Vec<Vertex>,
}

/// Mixture of at most two options realizing an envelope point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mix {
    pub left: usize,
    pub right: usize,
    /// Weight on `right`.
    pub lambda: f64,
}

impl Envelope {
    /// Full upper hull over `[min x, max x]`.
    pub fn upper_hull(points: &[Vertex]) -> Self {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| {
            a.x.total_cmp(&b.x)
                .then(b.y.total_cmp(&a.y))
                .then(a.option.cmp(&b.option))
        });
        pts.dedup_by(|later, first| later.x == first.x);
        let mut hull: Vec<Vertex> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
                if cross >= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Envelope { vertices: hull }
    }

    /// `v -> max { y(q) : x(q) <= v }` over mixtures `q`: the upper hull cut
    /// at its highest vertex, constant to the right of it.
    pub fn monotone(points: &[Vertex]) -> Self {
        let mut env = Self::upper_hull(points);
        let peak = env.vertices.iter().enumerate().fold(0, |best, (i, v)| {
            if v.y > env.vertices[best].y {
                i
            } else {
                best
            }
        });
        env.vertices.truncate(peak + 1);
        env
    }

    pub fn x_min(&self) -> f64 {
        self.vertices[0].x
    }

    pub fn x_max(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].x
    }

    /// Index `j` of the segment `[x_j, x_{j+1})` containing `v`, or the last
    /// vertex when `v >= x_max`. Requires `v >= x_min`.
    fn segment(&self, v: f64) -> usize {
        let pp = self.vertices.partition_point(|p| p.x <= v);
        pp.saturating_sub(1)
    }

    /// Envelope value, extended as a constant beyond `x_max`.
    pub fn eval(&self, v: f64) -> f64 {
        let j = self.segment(v);
        let a = self.vertices[j];
        match self.vertices.get(j + 1) {
            Some(b) if v > a.x => a.y + (b.y - a.y) * ((v - a.x) / (b.x - a.x)),
            _ => a.y,
        }
    }

    pub fn slope(&self, j: usize) -> f64 {
        let (a, b) = (self.vertices[j], self.vertices[j + 1]);
        (b.y - a.y) / (b.x - a.x)
    }

    /// Slope immediately to the right of `v` (zero past `x_max`).
    pub fn slope_right(&self, v: f64) -> f64 {
        let j = self.segment(v);
        if j + 1 < self.vertices.len() {
            self.slope(j)
        } else {
            0.0
        }
    }

    pub fn mix_at(&self, v: f64) -> Mix {
        let j = self.segment(v);
        let a = self.vertices[j];
        match self.vertices.get(j + 1) {
            Some(b) if v > a.x => Mix {
                left: a.option,
                right: b.option,
                lambda: ((v - a.x) / (b.x - a.x)).clamp(0.0, 1.0),
            },
            _ => Mix {
                left: a.option,
                right: a.option,
                lambda: 0.0,
            },
        }
    }
}
