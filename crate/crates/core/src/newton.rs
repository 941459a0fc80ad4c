//! Newton polygons of two-variable toric max-log functions.
//!
//! The function `log max(|z|^a, |w|^b)` corresponds to the polyhedron
//! `conv{(a,0), (0,b)} + R_+^2`. Sums of such functions correspond to
//! Minkowski sums, and the Monge-Ampère mass at the origin equals twice the
//! covolume (area of the complement of the polyhedron in the quadrant).
//! Mixed masses follow by polarization.

/// Lower-left boundary chain from `(0, y_max)` to `(x_max, 0)`, sorted by
/// increasing x. An empty chain is the zero function.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    vertices: Vec<(f64, f64)>,
}

impl NewtonPolygon {
    pub fn zero() -> Self {
        NewtonPolygon { vertices: vec![(0.0, 0.0)] }
    }

    /// Polygon of `max(a log|z|, b log|w|)`.
    pub fn max_log(a: f64, b: f64) -> Self {
        NewtonPolygon { vertices: vec![(0.0, b), (a, 0.0)] }
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    fn edges(&self) -> Vec<(f64, f64)> {
        self.vertices
            .windows(2)
            .map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1))
            .filter(|(dx, dy)| *dx != 0.0 || *dy != 0.0)
            .collect()
    }

    pub fn minkowski_sum(&self, other: &Self) -> Self {
        let start = (0.0, self.vertices[0].1 + other.vertices[0].1);
        let mut edges = self.edges();
        edges.extend(other.edges());
        // Boundary of a convex region seen from the origin: slopes increase.
        edges.sort_by(|a, b| (a.1 / a.0).total_cmp(&(b.1 / b.0)));
        let mut vertices = vec![start];
        let mut cur = start;
        for (dx, dy) in edges {
            cur = (cur.0 + dx, cur.1 + dy);
            vertices.push(cur);
        }
        NewtonPolygon { vertices }
    }

    pub fn scaled(&self, t: f64) -> Self {
        NewtonPolygon {
            vertices: self.vertices.iter().map(|&(x, y)| (t * x, t * y)).collect(),
        }
    }

    /// Area between the coordinate axes and the chain.
    pub fn covolume(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
            .sum()
    }

    /// Monge-Ampère mass at the origin of the associated function.
    pub fn mass(&self) -> f64 {
        2.0 * self.covolume()
    }

    /// Mixed mass of the two associated functions.
    pub fn mixed_mass(&self, other: &Self) -> f64 {
        self.minkowski_sum(other).covolume() - self.covolume() - other.covolume()
    }

    /// Smallest `t` with `(t, t)` in the polyhedron; the complex singularity
    /// exponent at the origin is `1/t`.
    pub fn diagonal_threshold(&self) -> f64 {
        for w in self.vertices.windows(2) {
            let (p, q) = (w[0], w[1]);
            let (fp, fq) = (p.1 - p.0, q.1 - q.0);
            if fp >= 0.0 && fq <= 0.0 {
                if fp == fq {
                    return p.0;
                }
                let s = fp / (fp - fq);
                return p.0 + s * (q.0 - p.0);
            }
        }
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_of_single_max_log_is_product_of_weights() {
        assert!((NewtonPolygon::max_log(2.0, 3.0).mass() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_mass_of_max_logs() {
        let p = NewtonPolygon::max_log(1.0, 1.0);
        let q = NewtonPolygon::max_log(2.0, 1.0);
        assert!((p.mixed_mass(&q) - 1.0).abs() < 1e-14);
        // min(b, c) for weights (1, b) and (1, c)
        let a = NewtonPolygon::max_log(1.0, 0.25);
        let b = NewtonPolygon::max_log(1.0, 0.5);
        assert!((a.mixed_mass(&b) - 0.25).abs() < 1e-14);
        assert!((p.mixed_mass(&p) - p.mass()).abs() < 1e-14);
    }

    #[test]
    fn zero_polygon_is_neutral() {
        let p = NewtonPolygon::max_log(1.0, 2.0);
        assert_eq!(p.minkowski_sum(&NewtonPolygon::zero()).covolume(), p.covolume());
        assert_eq!(p.mixed_mass(&NewtonPolygon::zero()), 0.0);
    }

    #[test]
    fn diagonal_threshold_gives_toric_exponent() {
        // 1/t = 1/a + 1/b
        let t = NewtonPolygon::max_log(1.0, 2.0).diagonal_threshold();
        assert!((1.0 / t - 1.5).abs() < 1e-14);
    }
}
