//! Quadrature, summation and quasi-random sampling helpers.

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};

const PAIRWISE_LEAF: usize = 64;
const PAR_CHUNK: usize = 1 << 14;

/// Pairwise (cascade) summation; deterministic for a fixed input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sum of `f(i)` for `i < len`, parallel over fixed chunks with a
/// deterministic combination order.
pub fn par_indexed_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partial: Vec<f64> = (0..len.div_ceil(PAR_CHUNK))
        .into_par_iter()
        .map(|c| {
            let lo = c * PAR_CHUNK;
            let hi = (lo + PAR_CHUNK).min(len);
            let vals: Vec<f64> = (lo..hi).map(&f).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&partial)
}

/// Gauss–Legendre nodes and weights for a composite rule over consecutive
/// breakpoints, with `panels_per_unit` panels per unit length (at least one
/// per interval) and `order` nodes per panel.
pub fn composite_gl_nodes(breaks: &[f64], panels_per_unit: f64, order: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(order).map_err(|e| Error::Config(format!("Gauss-Legendre order: {e}")))?;
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let panels = ((b - a) * panels_per_unit).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, wt) in rule.as_node_weight_pairs() {
                out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * wt));
            }
        }
    }
    Ok(out)
}

/// Sorted, deduplicated breakpoints clipped to `[lo, hi]`, endpoints included.
pub fn breakpoints(lo: f64, hi: f64, interior: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = interior.into_iter().filter(|t| *t > lo && *t < hi && t.is_finite()).collect();
    v.push(lo);
    v.push(hi);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    v
}

/// `∫_a^b f` by double-exponential quadrature; `b` may be `+inf`.
pub fn integrate_de<F>(f: F, a: f64, b: f64, abs_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    if b.is_infinite() {
        // t = a + u/(1-u) maps [0,1) onto [a, inf)
        let g = |u: f64| {
            if u >= 1.0 {
                return 0.0;
            }
            let d = 1.0 - u;
            let v = f(a + u / d) / (d * d);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let out = quadrature::double_exponential::integrate(g, 0.0, 1.0, abs_tol);
        (out.integral, out.error_estimate)
    } else {
        let out = quadrature::double_exponential::integrate(f, a, b, abs_tol);
        (out.integral, out.error_estimate)
    }
}

/// Owen-scrambled Sobol points in `[0,1)^dim`.
///
/// The underlying sequence holds 2^16 points per seed; longer runs are made
/// of independently scrambled blocks.
pub struct QuasiRandom {
    dim: usize,
    seed: u32,
}

pub const SOBOL_BLOCK: usize = 1 << 16;

impl QuasiRandom {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 || dim as u32 >= sobol_burley::NUM_DIMENSIONS {
            return Err(Error::Config(format!("quasi-random dimension {dim} unsupported")));
        }
        let seed = (seed ^ (seed >> 32)) as u32;
        Ok(QuasiRandom { dim, seed })
    }

    pub fn point(&self, index: usize, out: &mut [f64]) {
        let block = (index / SOBOL_BLOCK) as u32;
        let i = (index % SOBOL_BLOCK) as u32;
        let seed = self.seed.wrapping_add(block.wrapping_mul(0x9e37_79b9));
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = sobol_burley::sample(i, d as u32, seed) as f64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(par_indexed_sum(100_000, |i| i as f64), 4_999_950_000.0);
    }

    #[test]
    fn composite_rule_is_exact_for_polynomials() {
        let nodes = composite_gl_nodes(&breakpoints(0.0, 3.0, [1.3]), 2.0, 4).unwrap();
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(5)).sum();
        assert!((s - 3f64.powi(6) / 6.0).abs() < 1e-10);
    }

    #[test]
    fn de_handles_half_line() {
        let (v, _) = integrate_de(|t| (-t).exp(), 0.0, f64::INFINITY, 1e-12);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quasi_random_points_are_deterministic_and_fill_the_cube() {
        let q = QuasiRandom::new(2, 7).unwrap();
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        q.point(70_000, &mut a);
        q.point(70_000, &mut b);
        assert_eq!(a, b);
        let n = 1 << 12;
        let mut inside = 0usize;
        for i in 0..n {
            q.point(i, &mut a);
            assert!(a.iter().all(|x| (0.0..1.0).contains(x)));
            if a[0] * a[0] + a[1] * a[1] < 1.0 {
                inside += 1;
            }
        }
        let est = 4.0 * inside as f64 / n as f64;
        assert!((est - std::f64::consts::PI).abs() < 0.01, "{est}");
    }
}
