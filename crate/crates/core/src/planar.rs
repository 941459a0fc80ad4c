//! Finite-difference Dirichlet and obstacle solves for the Laplacian on planar
//! domains, with Shortley–Weller stencils at curved boundaries and red–black
//! successive over-relaxation.

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{Error, Result};

const BISECTION_STEPS: usize = 60;
const MIN_THETA: f64 = 1e-6;
const COARSEST: usize = 32;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub omega: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Solve on successively halved grids first and prolong as a start.
    pub nested: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { omega: 1.5, tol: 1e-8, max_iter: 100_000, nested: true }
    }
}

impl SolverOptions {
    /// Over-relaxation factor minimizing the spectral radius on an `n × n` square.
    pub fn optimal_omega(n: usize) -> f64 {
        2.0 / (1.0 + (std::f64::consts::PI / n as f64).sin())
    }
}

/// Inner set of a condenser problem. The level function is negative inside.
pub enum InnerSet<'a> {
    None,
    Level(&'a (dyn Fn(Complex64) -> f64 + Sync)),
    /// A single node: the grid node nearest to the point.
    Point(Complex64),
}

/// `(N+1) × (N+1)` nodes `lo + (i h_x, j h_y)` over a domain's bounding box.
#[derive(Clone, Debug)]
pub struct NodeGrid {
    pub lo: [f64; 2],
    pub hx: f64,
    pub hy: f64,
    pub n: usize,
}

impl NodeGrid {
    pub fn over(domain: &Domain, n: usize) -> Self {
        let b = domain.bounding_box()[0];
        NodeGrid { lo: [b[0], b[2]], hx: (b[1] - b[0]) / n as f64, hy: (b[3] - b[2]) / n as f64, n }
    }

    pub fn len(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.n + 1) + i
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.lo[0] + i as f64 * self.hx, self.lo[1] + j as f64 * self.hy)
    }

    pub fn point_of(&self, idx: usize) -> Complex64 {
        self.point(idx % (self.n + 1), idx / (self.n + 1))
    }

    pub fn nearest(&self, z: Complex64) -> (usize, usize) {
        let clamp = |x: f64| x.round().clamp(0.0, self.n as f64) as usize;
        (clamp((z.re - self.lo[0]) / self.hx), clamp((z.im - self.lo[1]) / self.hy))
    }

    /// Bilinear interpolation of node data.
    pub fn interpolate(&self, u: &[f64], z: Complex64) -> f64 {
        let fx = ((z.re - self.lo[0]) / self.hx).clamp(0.0, self.n as f64);
        let fy = ((z.im - self.lo[1]) / self.hy).clamp(0.0, self.n as f64);
        let i = (fx.floor() as usize).min(self.n - 1);
        let j = (fy.floor() as usize).min(self.n - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |a: usize, b: usize| u[self.index(a, b)];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NodeKind {
    Exterior,
    Inner,
    Free,
}

#[derive(Clone, Debug)]
struct Stencil {
    idx: usize,
    color: u8,
    diag: f64,
    constant: f64,
    nbrs: [(usize, f64); 4],
    n_nbrs: usize,
    regular: bool,
}

impl Stencil {
    fn apply(&self, u: &[f64]) -> f64 {
        let mut s = self.constant;
        for &(j, c) in &self.nbrs[..self.n_nbrs] {
            s += c * u[j];
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct PlanarSolution {
    pub grid: NodeGrid,
    pub values: Vec<f64>,
    pub kinds: Vec<NodeKind>,
    pub iterations: usize,
    pub final_update: f64,
    /// Maximum of `−Δ_h u` over free nodes (the subharmonicity defect).
    pub laplacian_defect: f64,
    /// `Δ_h u` per node (0 off free regular nodes).
    pub laplacian: Vec<f64>,
    pub regular: Vec<bool>,
}

fn bisect<F: Fn(Complex64) -> f64>(f: F, inside: Complex64, outside: Complex64) -> f64 {
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..BISECTION_STEPS {
        let m = 0.5 * (a + b);
        if f(inside + (outside - inside) * m) <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub struct PlanarProblem<'a> {
    pub domain: &'a Domain,
    pub inner: InnerSet<'a>,
    pub inner_value: f64,
    pub boundary: &'a (dyn Fn(Complex64) -> f64 + Sync),
    /// Upper and lower bounds enforced after each update (obstacle problem).
    pub clamp: Option<(f64, f64)>,
}

impl PlanarProblem<'_> {
    pub fn classify(&self, grid: &NodeGrid) -> Vec<NodeKind> {
        let mut kinds = vec![NodeKind::Free; grid.len()];
        for j in 0..=grid.n {
            for i in 0..=grid.n {
                let z = grid.point(i, j);
                let idx = grid.index(i, j);
                kinds[idx] = if self.domain.level(&[z]) >= 0.0 {
                    NodeKind::Exterior
                } else if let InnerSet::Level(f) = &self.inner {
                    if f(z) <= 0.0 {
                        NodeKind::Inner
                    } else {
                        NodeKind::Free
                    }
                } else {
                    NodeKind::Free
                };
            }
        }
        if let InnerSet::Point(p) = self.inner {
            let (i, j) = grid.nearest(p);
            let idx = grid.index(i, j);
            if kinds[idx] == NodeKind::Free {
                kinds[idx] = NodeKind::Inner;
            }
        }
        kinds
    }

    fn stencils(&self, grid: &NodeGrid, kinds: &[NodeKind]) -> Vec<Stencil> {
        let dom = |z: Complex64| self.domain.level(&[z]);
        let mut out = Vec::new();
        for j in 0..=grid.n {
            for i in 0..=grid.n {
                let idx = grid.index(i, j);
                if kinds[idx] != NodeKind::Free {
                    continue;
                }
                let z = grid.point(i, j);
                let mut st = Stencil {
                    idx,
                    color: ((i + j) % 2) as u8,
                    diag: 0.0,
                    constant: 0.0,
                    nbrs: [(0, 0.0); 4],
                    n_nbrs: 0,
                    regular: true,
                };
                for (axis, h) in [(0usize, grid.hx), (1usize, grid.hy)] {
                    // (distance fraction, neighbor) for the minus and plus sides
                    let mut side = [(1.0, None::<usize>, 0.0); 2];
                    for (s, sign) in [(0usize, -1i64), (1usize, 1i64)] {
                        let (ni, nj) = if axis == 0 { (i as i64 + sign, j as i64) } else { (i as i64, j as i64 + sign) };
                        let in_range = ni >= 0 && nj >= 0 && ni <= grid.n as i64 && nj <= grid.n as i64;
                        let nz = if axis == 0 {
                            z + Complex64::new(sign as f64 * h, 0.0)
                        } else {
                            z + Complex64::new(0.0, sign as f64 * h)
                        };
                        let nidx = if in_range { Some(grid.index(ni as usize, nj as usize)) } else { None };
                        let nkind = nidx.map(|k| kinds[k]).unwrap_or(NodeKind::Exterior);
                        side[s] = match nkind {
                            NodeKind::Free => (1.0, nidx, 0.0),
                            NodeKind::Exterior => {
                                let t = bisect(dom, z, nz).max(MIN_THETA);
                                (t, None, (self.boundary)(z + (nz - z) * t))
                            }
                            NodeKind::Inner => match &self.inner {
                                InnerSet::Level(f) => {
                                    let t = bisect(|w| -f(w), z, nz).max(MIN_THETA);
                                    (t, None, self.inner_value)
                                }
                                _ => (1.0, None, self.inner_value),
                            },
                        };
                    }
                    let (tl, tr) = (side[0].0, side[1].0);
                    if tl < 1.0 || tr < 1.0 {
                        st.regular = false;
                    }
                    let (hl, hr) = (tl * h, tr * h);
                    let cl = 2.0 / (hl * (hl + hr));
                    let cr = 2.0 / (hr * (hl + hr));
                    for (c, (_, nb, val)) in [(cl, side[0]), (cr, side[1])] {
                        st.diag += c;
                        match nb {
                            Some(k) => {
                                st.nbrs[st.n_nbrs] = (k, c);
                                st.n_nbrs += 1;
                            }
                            None => st.constant += c * val,
                        }
                    }
                }
                out.push(st);
            }
        }
        out
    }

    fn initial(&self, grid: &NodeGrid, kinds: &[NodeKind]) -> Vec<f64> {
        (0..grid.len())
            .map(|k| match kinds[k] {
                NodeKind::Inner => self.inner_value,
                NodeKind::Exterior => (self.boundary)(grid.point_of(k)),
                NodeKind::Free => 0.0,
            })
            .collect()
    }

    pub fn solve(&self, n: usize, opts: &SolverOptions) -> Result<PlanarSolution> {
        if n < 8 {
            return Err(Error::Config(format!("planar resolution {n} is below 8")));
        }
        let grid = NodeGrid::over(self.domain, n);
        let kinds = self.classify(&grid);
        let stencils = self.stencils(&grid, &kinds);
        let mut u = self.initial(&grid, &kinds);
        if opts.nested && n / 2 >= COARSEST && n.is_multiple_of(2) {
            let coarse = self.solve(n / 2, opts)?;
            for (k, kind) in kinds.iter().enumerate() {
                if *kind == NodeKind::Free {
                    u[k] = coarse.grid.interpolate(&coarse.values, grid.point_of(k));
                }
            }
        }
        let mut iterations = 0;
        let mut update = f64::INFINITY;
        let colors: [Vec<&Stencil>; 2] =
            [stencils.iter().filter(|s| s.color == 0).collect(), stencils.iter().filter(|s| s.color == 1).collect()];
        while iterations < opts.max_iter {
            iterations += 1;
            update = 0.0;
            for color in &colors {
                for st in color {
                    let gs = st.apply(&u) / st.diag;
                    let mut v = (1.0 - opts.omega) * u[st.idx] + opts.omega * gs;
                    if let Some((lo, hi)) = self.clamp {
                        v = v.clamp(lo, hi);
                    }
                    update = f64::max(update, (v - u[st.idx]).abs());
                    u[st.idx] = v;
                }
            }
            if update < opts.tol {
                break;
            }
        }
        if !(update < opts.tol) {
            return Err(Error::Numerical {
                message: format!("relaxation did not converge in {} sweeps", opts.max_iter),
                residual: update,
            });
        }
        let mut laplacian = vec![0.0; grid.len()];
        let mut regular = vec![false; grid.len()];
        let mut defect: f64 = 0.0;
        for st in &stencils {
            let lap = st.apply(&u) - st.diag * u[st.idx];
            laplacian[st.idx] = lap;
            regular[st.idx] = st.regular;
            defect = defect.max(-lap * grid.hx * grid.hy);
        }
        Ok(PlanarSolution {
            grid,
            values: u,
            kinds,
            iterations,
            final_update: update,
            laplacian_defect: defect,
            laplacian,
            regular,
        })
    }
}

impl PlanarSolution {
    /// `(1/2π) Σ Δ_h u · h_x h_y` over nodes within `radius` of `center`;
    /// equals the discrete flux through the boundary of that node set.
    pub fn laplacian_mass(&self, center: Complex64, radius: f64) -> f64 {
        let g = &self.grid;
        let mut terms = Vec::new();
        for j in 0..=g.n {
            for i in 0..=g.n {
                let idx = g.index(i, j);
                if (g.point(i, j) - center).norm() <= radius && self.kinds[idx] != NodeKind::Exterior {
                    terms.push(self.discrete_laplacian(i, j) * g.hx * g.hy);
                }
            }
        }
        crate::quad::pairwise_sum(&terms) / (2.0 * std::f64::consts::PI)
    }

    /// Plain five-point Laplacian at a node with four in-grid neighbors.
    pub fn discrete_laplacian(&self, i: usize, j: usize) -> f64 {
        let g = &self.grid;
        if i == 0 || j == 0 || i == g.n || j == g.n {
            return 0.0;
        }
        let u = |a: usize, b: usize| self.values[g.index(a, b)];
        (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) / (g.hx * g.hx)
            + (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) / (g.hy * g.hy)
    }

    pub fn value_at(&self, z: Complex64) -> f64 {
        self.grid.interpolate(&self.values, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_boundary_data_is_reproduced() {
        let d = Domain::unit_disc();
        let g = |z: Complex64| z.re * z.re - z.im * z.im + 0.5 * z.im;
        let p = PlanarProblem { domain: &d, inner: InnerSet::None, inner_value: 0.0, boundary: &g, clamp: None };
        let opts = SolverOptions { omega: SolverOptions::optimal_omega(64), tol: 1e-12, ..Default::default() };
        let sol = p.solve(64, &opts).unwrap();
        for z in [Complex64::new(0.3, 0.2), Complex64::new(-0.5, 0.6), Complex64::new(0.0, 0.0)] {
            assert!((sol.value_at(z) - g(z)).abs() < 2e-3, "{z}");
        }
    }

    #[test]
    fn annulus_condenser_matches_log_profile() {
        let d = Domain::unit_disc();
        let e = |z: Complex64| z.norm() - 0.5;
        let zero = |_: Complex64| 0.0;
        let p = PlanarProblem {
            domain: &d,
            inner: InnerSet::Level(&e),
            inner_value: -1.0,
            boundary: &zero,
            clamp: Some((-1.0, 0.0)),
        };
        let sol = p.solve(128, &SolverOptions::default()).unwrap();
        let z = Complex64::new(0.7, 0.0);
        let want = 0.7f64.ln() / 2f64.ln();
        assert!((sol.value_at(z) - want).abs() < 5e-3);
        let cap = sol.laplacian_mass(Complex64::new(0.0, 0.0), 0.75);
        assert!((cap - 1.0 / 2f64.ln()).abs() < 0.02 / 2f64.ln(), "{cap}");
    }
}
