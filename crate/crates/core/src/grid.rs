//! Uniform grids over domains in C^n (n ≤ 2), finite-difference Monge-Ampère
//! densities, sublevel volumes and truncated integrals of `e^{−2φ}`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{factorial, Domain, DomainKind};
use crate::error::{Error, Result};
use crate::model::{Family, PshModel, Symmetry};
use crate::quad::{breakpoints, composite_gl_nodes, pairwise_sum, par_indexed_sum, QuasiRandom, SOBOL_BLOCK};

pub const MIN_RESOLUTION: usize = 8;
const MAX_GRID_DIM: usize = 2;
const DIVERGENCE_RATIO: f64 = 0.97;

/// Node values `max(φ, −M)` on a cell-centered grid over the bounding box of
/// a domain, padded by one node on every side so that stencils never leave
/// the array. Indices below refer to the padded layout.
#[derive(Clone, Debug)]
pub struct GridField {
    domain: Domain,
    resolution: usize,
    truncation: f64,
    lo: Vec<f64>,
    h: Vec<f64>,
    values: Vec<f64>,
    cell_fraction: Vec<f64>,
    poles: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug)]
pub struct DensityField {
    /// Density per node (padded layout); 0 outside the mask.
    pub density: Vec<f64>,
    pub mask: Vec<bool>,
    /// `∫` of the clipped negative part, in the same units as the mass.
    pub clipped_mass: f64,
    pub max_clipped_density: f64,
}

fn real_axes(domain: &Domain) -> Vec<[f64; 2]> {
    domain.bounding_box().iter().flat_map(|b| [[b[0], b[1]], [b[2], b[3]]]).collect()
}

/// Fraction of the axis-aligned cell `[c − h/2, c + h/2]` that lies in a disc.
fn disc_cell_fraction(center: Complex64, radius: f64, c: [f64; 2], h: [f64; 2]) -> f64 {
    const SUB: usize = 16;
    let d = Complex64::new(c[0], c[1]) - center;
    let half_diag = 0.5 * h[0].hypot(h[1]);
    let lvl = d.norm() - radius;
    if lvl <= -half_diag {
        return 1.0;
    }
    if lvl >= half_diag {
        return 0.0;
    }
    let mut hits = 0usize;
    for i in 0..SUB {
        for j in 0..SUB {
            let x = d.re + h[0] * ((i as f64 + 0.5) / SUB as f64 - 0.5);
            let y = d.im + h[1] * ((j as f64 + 0.5) / SUB as f64 - 0.5);
            if x * x + y * y <= radius * radius {
                hits += 1;
            }
        }
    }
    hits as f64 / (SUB * SUB) as f64
}

/// Fraction of a cell (given by its center and widths) inside the domain.
fn cell_fraction(domain: &Domain, z: &[Complex64], h: &[f64]) -> f64 {
    match domain.kind {
        DomainKind::Polydisc | DomainKind::PlanarDisc => (0..domain.dim())
            .map(|j| {
                let r = if domain.kind == DomainKind::Polydisc { domain.radii[j] } else { domain.radii[0] };
                disc_cell_fraction(domain.center[j], r, [z[j].re, z[j].im], [h[2 * j], h[2 * j + 1]])
            })
            .product(),
        DomainKind::PlanarRectangle => {
            let w = z[0] - domain.center[0];
            let ox = (domain.radii[0] - (w.re.abs() - 0.5 * h[0])).clamp(0.0, h[0]) / h[0];
            let oy = (domain.radii[1] - (w.im.abs() - 0.5 * h[1])).clamp(0.0, h[1]) / h[1];
            ox * oy
        }
        DomainKind::Ball => {
            if domain.dim() == 1 {
                return disc_cell_fraction(domain.center[0], domain.radii[0], [z[0].re, z[0].im], [h[0], h[1]]);
            }
            let half_diag = 0.5 * h.iter().map(|x| x * x).sum::<f64>().sqrt();
            let lvl = domain.level(z);
            if lvl <= -half_diag {
                return 1.0;
            }
            if lvl >= half_diag {
                return 0.0;
            }
            const SUB: usize = 4;
            let dims = h.len();
            let total = SUB.pow(dims as u32);
            let mut hits = 0usize;
            let mut p = z.to_vec();
            for k in 0..total {
                let mut rem = k;
                for (a, ha) in h.iter().enumerate() {
                    let off = ha * (((rem % SUB) as f64 + 0.5) / SUB as f64 - 0.5);
                    rem /= SUB;
                    let j = a / 2;
                    if a % 2 == 0 {
                        p[j].re = z[j].re + off;
                    } else {
                        p[j].im = z[j].im + off;
                    }
                }
                if domain.level(&p) <= 0.0 {
                    hits += 1;
                }
            }
            hits as f64 / total as f64
        }
    }
}

impl GridField {
    /// Samples `max(φ, −M)` for a catalog model. The domain must lie in the
    /// model's reference domain; stencil nodes just outside use the natural
    /// extension of the model's formula.
    pub fn build(model: &PshModel, domain: &Domain, resolution: usize, truncation: f64) -> Result<Self> {
        if model.dimension() != domain.dim() {
            return Err(Error::Config(format!(
                "model dimension {} does not match domain dimension {}",
                model.dimension(),
                domain.dim()
            )));
        }
        let poles = model.closed_form_ma_mass().atoms.into_iter().map(|a| a.location).collect();
        let mut field = Self::from_fn(domain, resolution, truncation, |z| model.evaluate_unchecked(z))?;
        field.poles = poles;
        Ok(field)
    }

    /// Grid of `max(f, −M)` for an arbitrary function; used for test fields
    /// such as `|z|²` or pluriharmonic perturbations.
    pub fn from_fn<F>(domain: &Domain, resolution: usize, truncation: f64, f: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        domain.validate()?;
        if resolution < MIN_RESOLUTION {
            return Err(Error::Config(format!("resolution {resolution} is below {MIN_RESOLUTION}")));
        }
        if domain.dim() > MAX_GRID_DIM {
            return Err(Error::Unsupported(format!("grids are limited to n <= {MAX_GRID_DIM}")));
        }
        if !(truncation > 0.0) {
            return Err(Error::Config("truncation level must be positive".into()));
        }
        let axes = real_axes(domain);
        let lo: Vec<f64> = axes.iter().map(|a| a[0]).collect();
        let h: Vec<f64> = axes.iter().map(|a| (a[1] - a[0]) / resolution as f64).collect();
        let mut field = GridField {
            domain: domain.clone(),
            resolution,
            truncation,
            lo,
            h,
            values: vec![],
            cell_fraction: vec![],
            poles: vec![],
        };
        let total = field.padded_len();
        let computed: Vec<(f64, f64)> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let z = field.node_point(idx);
                let v = f(&z).max(-truncation);
                let frac = if field.is_pad(idx) { 0.0 } else { cell_fraction(domain, &z, &field.h) };
                (v, frac)
            })
            .collect();
        field.values = computed.iter().map(|p| p.0).collect();
        field.cell_fraction = computed.iter().map(|p| p.1).collect();
        Ok(field)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    /// Grid spacing per real axis, ordered `(x_1, y_1, x_2, y_2)`.
    pub fn spacing(&self) -> &[f64] {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_fractions(&self) -> &[f64] {
        &self.cell_fraction
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.iter().product()
    }

    fn side(&self) -> usize {
        self.resolution + 2
    }

    fn real_dims(&self) -> usize {
        self.h.len()
    }

    pub fn padded_len(&self) -> usize {
        self.side().pow(self.real_dims() as u32)
    }

    fn axis_indices(&self, idx: usize) -> [usize; 2 * MAX_GRID_DIM] {
        let mut out = [0; 2 * MAX_GRID_DIM];
        let mut rem = idx;
        for o in out.iter_mut().take(self.real_dims()) {
            *o = rem % self.side();
            rem /= self.side();
        }
        out
    }

    fn stride(&self, axis: usize) -> usize {
        self.side().pow(axis as u32)
    }

    fn is_pad(&self, idx: usize) -> bool {
        let ix = self.axis_indices(idx);
        ix[..self.real_dims()].iter().any(|&i| i == 0 || i == self.side() - 1)
    }

    pub fn node_point(&self, idx: usize) -> Vec<Complex64> {
        let ix = self.axis_indices(idx);
        let coord = |a: usize| self.lo[a] + (ix[a] as f64 - 0.5) * self.h[a];
        (0..self.real_dims() / 2).map(|j| Complex64::new(coord(2 * j), coord(2 * j + 1))).collect()
    }

    /// Whether the node lies strictly inside the domain.
    pub fn is_inside(&self, idx: usize) -> bool {
        !self.is_pad(idx) && self.domain.contains_strictly(&self.node_point(idx))
    }

    /// Pointwise `(2^n n!/π^n) det(u_{jk̄})` by central differences, with
    /// negative determinants clipped to 0.
    pub fn ma_density(&self) -> DensityField {
        let n = self.real_dims() / 2;
        let norm = 2f64.powi(n as i32) * factorial(n) / PI.powi(n as i32);
        let cell = self.cell_volume();
        let per_node: Vec<(f64, f64)> = (0..self.padded_len())
            .into_par_iter()
            .map(|idx| {
                if self.cell_fraction[idx] == 0.0 {
                    return (0.0, 0.0);
                }
                let d = norm * self.hessian_det(idx);
                if d >= 0.0 {
                    (d, 0.0)
                } else {
                    (0.0, -d)
                }
            })
            .collect();
        let mask: Vec<bool> = self.cell_fraction.iter().map(|f| *f > 0.0).collect();
        let clipped: Vec<f64> =
            per_node.iter().zip(&self.cell_fraction).map(|((_, c), f)| c * f * cell).collect();
        DensityField {
            density: per_node.iter().map(|p| p.0).collect(),
            mask,
            clipped_mass: pairwise_sum(&clipped),
            max_clipped_density: per_node.iter().map(|p| p.1).fold(0.0, f64::max),
        }
    }

    fn second(&self, idx: usize, a: usize, b: usize) -> f64 {
        let v = &self.values;
        let (sa, sb) = (self.stride(a), self.stride(b));
        if a == b {
            (v[idx + sa] - 2.0 * v[idx] + v[idx - sa]) / (self.h[a] * self.h[a])
        } else {
            (v[idx + sa + sb] - v[idx + sa - sb] - v[idx - sa + sb] + v[idx - sa - sb]) / (4.0 * self.h[a] * self.h[b])
        }
    }

    /// `u_{jk̄} = ¼[(u_{x_j x_k} + u_{y_j y_k}) + i(u_{x_j y_k} − u_{y_j x_k})]`.
    fn complex_hessian(&self, idx: usize, j: usize, k: usize) -> Complex64 {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        let re = self.second(idx, xj, xk) + self.second(idx, yj, yk);
        let im = if j == k { 0.0 } else { self.second(idx, xj, yk) - self.second(idx, yj, xk) };
        0.25 * Complex64::new(re, im)
    }

    fn hessian_det(&self, idx: usize) -> f64 {
        match self.real_dims() / 2 {
            1 => self.complex_hessian(idx, 0, 0).re,
            _ => {
                let a = self.complex_hessian(idx, 0, 0).re;
                let d = self.complex_hessian(idx, 1, 1).re;
                let b = self.complex_hessian(idx, 0, 1);
                a * d - b.norm_sqr()
            }
        }
    }

    /// Riemann sum of the density over cells in the domain, skipping cells
    /// whose centers are within `exclusion_radius` of a declared pole.
    pub fn total_mass(&self, exclusion_radius: f64) -> MassEstimate {
        let dens = self.ma_density();
        let cell = self.cell_volume();
        let mass = par_indexed_sum(self.padded_len(), |idx| {
            if !dens.mask[idx] || self.near_pole(idx, exclusion_radius) {
                return 0.0;
            }
            dens.density[idx] * self.cell_fraction[idx] * cell
        });
        MassEstimate {
            mass,
            clipped_mass: dens.clipped_mass,
            resolution: self.resolution,
            exclusion_radius,
        }
    }

    fn near_pole(&self, idx: usize, radius: f64) -> bool {
        if radius <= 0.0 || self.poles.is_empty() {
            return false;
        }
        let z = self.node_point(idx);
        self.poles.iter().any(|p| {
            let d2: f64 = z.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum();
            d2.sqrt() <= radius
        })
    }

    /// Node-by-node dump of the unpadded grid: real coordinates then value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let axes = ["x1", "y1", "x2", "y2"];
        let header: Vec<&str> = axes[..self.real_dims()].to_vec();
        writeln!(w, "{},value,inside", header.join(","))?;
        for idx in 0..self.padded_len() {
            if self.is_pad(idx) {
                continue;
            }
            let z = self.node_point(idx);
            let coords: Vec<String> = z.iter().flat_map(|c| [c.re, c.im]).map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{},{:.16e},{}", coords.join(","), self.values[idx], u8::from(self.is_inside(idx)))?;
        }
        Ok(())
    }

    /// Little-endian f64 records `(coordinates…, value)` for unpadded nodes.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        for idx in 0..self.padded_len() {
            if self.is_pad(idx) {
                continue;
            }
            for c in self.node_point(idx) {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
            w.write_all(&self.values[idx].to_le_bytes())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MassEstimate {
    pub mass: f64,
    pub clipped_mass: f64,
    pub resolution: usize,
    pub exclusion_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    QuasiRandom,
    GridCells,
}

#[derive(Clone, Debug)]
pub struct VolumeOptions {
    pub method: VolumeMethod,
    /// Grid resolution for [`VolumeMethod::GridCells`].
    pub resolution: usize,
    pub seed: u64,
    /// Overrides the automatic sample count when set.
    pub samples: Option<usize>,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions { method: VolumeMethod::QuasiRandom, resolution: 128, seed: 0, samples: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub method: VolumeMethod,
    pub samples: usize,
    pub hits: usize,
    pub seed: u64,
}

pub const MIN_VOLUME_SAMPLES: usize = 100_000;
pub const MAX_VOLUME_SAMPLES: usize = 10_000_000;

/// Sample count `max(10^5, 100/p)` capped at `10^7`, where `p` is the
/// expected fraction of hits.
pub fn volume_sample_count(expected_fraction: f64) -> usize {
    if !(expected_fraction > 0.0) {
        return MAX_VOLUME_SAMPLES;
    }
    let want = (100.0 / expected_fraction).ceil();
    if want >= MAX_VOLUME_SAMPLES as f64 {
        MAX_VOLUME_SAMPLES
    } else {
        (want as usize).max(MIN_VOLUME_SAMPLES)
    }
}

/// Maps a point of the unit cube onto the domain; returns the point and
/// whether it landed inside. Discs are parametrized area-preservingly.
struct DomainSampler<'a> {
    domain: &'a Domain,
    boxes: Vec<[f64; 4]>,
}

impl<'a> DomainSampler<'a> {
    fn new(domain: &'a Domain) -> Self {
        DomainSampler { domain, boxes: domain.bounding_box() }
    }

    fn polar(&self) -> bool {
        matches!(self.domain.kind, DomainKind::Polydisc | DomainKind::PlanarDisc)
            || (self.domain.kind == DomainKind::Ball && self.domain.dim() == 1)
    }

    /// Measure of the sampled region.
    fn measure(&self) -> f64 {
        if self.polar() {
            self.domain.volume()
        } else {
            self.boxes.iter().map(|b| (b[1] - b[0]) * (b[3] - b[2])).product()
        }
    }

    fn map(&self, u: &[f64], z: &mut [Complex64]) -> bool {
        if self.polar() {
            for (j, zj) in z.iter_mut().enumerate() {
                let r = if self.domain.kind == DomainKind::Polydisc { self.domain.radii[j] } else { self.domain.radii[0] };
                *zj = self.domain.center[j] + Complex64::from_polar(r * u[2 * j].sqrt(), 2.0 * PI * u[2 * j + 1]);
            }
            true
        } else {
            for (j, zj) in z.iter_mut().enumerate() {
                let b = self.boxes[j];
                *zj = Complex64::new(b[0] + (b[1] - b[0]) * u[2 * j], b[2] + (b[3] - b[2]) * u[2 * j + 1]);
            }
            self.domain.contains(z, 0.0)
        }
    }
}

/// The first `count` quasi-random points of the domain (rejection-free for
/// discs and polydiscs).
pub fn domain_samples(domain: &Domain, count: usize, seed: u64) -> Result<Vec<Vec<Complex64>>> {
    let sampler = DomainSampler::new(domain);
    let qr = QuasiRandom::new(2 * domain.dim(), seed)?;
    let mut u = vec![0.0; 2 * domain.dim()];
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count && i < 64 * count {
        qr.point(i, &mut u);
        let mut z = vec![Complex64::new(0.0, 0.0); domain.dim()];
        if sampler.map(&u, &mut z) {
            out.push(z);
        }
        i += 1;
    }
    Ok(out)
}

/// Lebesgue volume of `{φ ≤ −s}` in the domain.
pub fn sublevel_volume(model: &PshModel, domain: &Domain, s: f64, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    if !(s > 0.0) {
        return Err(Error::Config("sublevel depth s must be positive".into()));
    }
    if model.dimension() != domain.dim() {
        return Err(Error::Config("model and domain dimensions differ".into()));
    }
    domain.validate()?;
    match opts.method {
        VolumeMethod::GridCells => {
            let field = GridField::build(model, domain, opts.resolution, s + 1.0)?;
            let cell = field.cell_volume();
            let vol = par_indexed_sum(field.padded_len(), |idx| {
                if field.values[idx] <= -s {
                    field.cell_fraction[idx] * cell
                } else {
                    0.0
                }
            });
            let cells = field.cell_fraction.iter().filter(|f| **f > 0.0).count();
            let hits = (0..field.padded_len())
                .filter(|&i| field.cell_fraction[i] > 0.0 && field.values[i] <= -s)
                .count();
            Ok(VolumeEstimate { volume: vol, method: VolumeMethod::GridCells, samples: cells, hits, seed: opts.seed })
        }
        VolumeMethod::QuasiRandom => {
            let sampler = DomainSampler::new(domain);
            let qr = QuasiRandom::new(2 * domain.dim(), opts.seed)?;
            let count_hits = |n: usize| -> usize {
                (0..n.div_ceil(SOBOL_BLOCK))
                    .into_par_iter()
                    .map(|b| {
                        let mut u = vec![0.0; 2 * domain.dim()];
                        let mut z = vec![Complex64::new(0.0, 0.0); domain.dim()];
                        let mut hits = 0usize;
                        for i in b * SOBOL_BLOCK..((b + 1) * SOBOL_BLOCK).min(n) {
                            qr.point(i, &mut u);
                            if sampler.map(&u, &mut z) && model.evaluate_unchecked(&z) <= -s {
                                hits += 1;
                            }
                        }
                        hits
                    })
                    .sum()
            };
            let samples = match opts.samples {
                Some(n) => n,
                None => {
                    let expected = match model.closed_form_sublevel_volume(s) {
                        Some(v) if model.reference_domain() == *domain => v / sampler.measure(),
                        _ => count_hits(SOBOL_BLOCK) as f64 / SOBOL_BLOCK as f64,
                    };
                    volume_sample_count(expected)
                }
            };
            let hits = count_hits(samples);
            Ok(VolumeEstimate {
                volume: sampler.measure() * hits as f64 / samples as f64,
                method: VolumeMethod::QuasiRandom,
                samples,
                hits,
                seed: opts.seed,
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    /// One-dimensional reduction in `t = −log|z|` over a centered ball.
    Radial,
    /// Product reduction in `t_j = −log|z_j|` over the unit polydisc.
    Toric,
    /// Cell sum on a Cartesian grid.
    Cartesian,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpIntegralSeries {
    /// `(M, ∫ e^{−2 max(φ, −M)})` in schedule order.
    pub values: Vec<(f64, f64)>,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    pub diverges: bool,
    /// Increment per unit `M` over the last step.
    pub growth_rate: f64,
    /// Geometric extrapolation of the limit; `None` when divergent.
    pub limit: Option<f64>,
    pub method: IntegralMethod,
    pub nodes: usize,
}

/// Axis breakpoints in `t = −log r` where the truncation or the model
/// itself has a kink.
fn log_kinks(model: &PshModel, m: f64) -> Vec<f64> {
    match model.family() {
        Family::RadialLog { weight, .. } => vec![m / weight],
        Family::ToricMaxLog { weights } => weights.iter().map(|a| m / a).collect(),
        Family::TruncatedLog { weight, depth } => vec![m.min(*depth) / weight, depth / weight],
        Family::ProductMaxLog { z_weight, zeta_weight } => vec![m / z_weight, m / zeta_weight],
        Family::SmoothRadial { scale } => {
            // c(e^{−2t} − 1) = −M
            if m < *scale {
                vec![-0.5 * (1.0 - m / scale).ln()]
            } else {
                vec![]
            }
        }
        Family::SeriesMaxLog { .. } | Family::Constant { .. } => vec![],
    }
}

/// Smallest rate `a` with `φ ≥ −a·Σt_j`-type growth, used to size the log box.
fn log_rate(model: &PshModel) -> f64 {
    match model.family() {
        Family::RadialLog { weight, .. } => *weight,
        Family::ToricMaxLog { weights } => weights.iter().cloned().fold(f64::INFINITY, f64::min),
        Family::TruncatedLog { weight, .. } => *weight,
        Family::ProductMaxLog { z_weight, zeta_weight } => z_weight.min(*zeta_weight),
        Family::SeriesMaxLog { terms, scale } => scale * (*terms as f64).powi(-4),
        _ => 1.0,
    }
}

fn is_centered_unit(domain: &Domain, kind: DomainKind) -> bool {
    domain.kind == kind
        && domain.center.iter().all(|c| c.norm() == 0.0)
        && domain.radii.iter().all(|r| *r == 1.0)
}

/// Chooses the integration route for `(model, domain)`.
pub fn integral_method(model: &PshModel, domain: &Domain) -> IntegralMethod {
    let n = domain.dim();
    let ball_like = is_centered_unit(domain, DomainKind::Ball)
        || is_centered_unit(domain, DomainKind::PlanarDisc)
        || (n == 1 && is_centered_unit(domain, DomainKind::Polydisc));
    match model.symmetry() {
        Symmetry::Radial if ball_like => IntegralMethod::Radial,
        Symmetry::Radial | Symmetry::Toric if is_centered_unit(domain, DomainKind::Polydisc) => IntegralMethod::Toric,
        _ => IntegralMethod::Cartesian,
    }
}

/// `∫_Ω e^{−2 max(φ, −M)} dV` for each truncation level `M` (increasing),
/// with a geometric-decay test on the increments.
///
/// `resolution` sets panels per unit log-length for the reduced routes and
/// cells per axis for the Cartesian route.
pub fn exp_neg2_integral(
    model: &PshModel,
    domain: &Domain,
    truncations: &[f64],
    resolution: usize,
) -> Result<ExpIntegralSeries> {
    if truncations.is_empty() || truncations.windows(2).any(|w| !(w[1] > w[0])) || !(truncations[0] > 0.0) {
        return Err(Error::Config("truncations must be positive and strictly increasing".into()));
    }
    if model.dimension() != domain.dim() {
        return Err(Error::Config("model and domain dimensions differ".into()));
    }
    let method = integral_method(model, domain);
    let (values, nodes) = match method {
        IntegralMethod::Radial => radial_integrals(model, truncations, resolution)?,
        IntegralMethod::Toric => toric_integrals(model, truncations, resolution)?,
        IntegralMethod::Cartesian => cartesian_integrals(model, domain, truncations, resolution)?,
    };
    let series: Vec<(f64, f64)> = truncations.iter().cloned().zip(values).collect();
    Ok(analyze_truncation_series(series, method, nodes))
}

fn radial_integrals(model: &PshModel, ms: &[f64], resolution: usize) -> Result<(Vec<f64>, usize)> {
    let n = model.dimension();
    let weight_const = 2.0 * PI.powi(n as i32) / factorial(n - 1);
    let two_n = 2.0 * n as f64;
    let phi = |t: f64| {
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        z[0] = Complex64::new((-t).exp(), 0.0);
        model.evaluate_unchecked(&z)
    };
    let mut kinks: Vec<f64> = ms.iter().flat_map(|m| log_kinks(model, *m)).collect();
    let last = kinks.iter().cloned().fold(0.0, f64::max);
    let t_max = (last + 5.0).max(40.0);
    kinks.push(last);
    let nodes = composite_gl_nodes(&breakpoints(0.0, t_max, kinks), (resolution as f64 / 8.0).max(1.0), 8)?;
    let phis: Vec<(f64, f64)> = nodes.iter().map(|(t, w)| (phi(*t), w * weight_const * (-two_n * t).exp())).collect();
    let phi_end = phi(t_max);
    let out = ms
        .iter()
        .map(|&m| {
            let terms: Vec<f64> = phis.iter().map(|(p, w)| w * (-2.0 * p.max(-m)).exp()).collect();
            // constant beyond t_max: ∫_{t_max}^∞ e^{−2ψ} c e^{−2nt} dt
            let tail = (-2.0 * phi_end.max(-m)).exp() * weight_const * (-two_n * t_max).exp() / two_n;
            pairwise_sum(&terms) + tail
        })
        .collect();
    Ok((out, nodes.len()))
}

fn toric_integrals(model: &PshModel, ms: &[f64], resolution: usize) -> Result<(Vec<f64>, usize)> {
    let n = model.dimension();
    let m_max = ms[ms.len() - 1];
    let t_max = m_max * (1.0f64).max(1.0 / log_rate(model)) + 20.0;
    let kinks: Vec<f64> = ms.iter().flat_map(|m| log_kinks(model, *m)).collect();
    let nodes = composite_gl_nodes(&breakpoints(0.0, t_max, kinks), (resolution as f64 / 32.0).max(0.5), 6)?;
    let axis: Vec<(f64, f64)> = nodes.iter().map(|(t, w)| (*t, w * 2.0 * PI * (-2.0 * t).exp())).collect();
    let k = axis.len();
    let total = k.pow(n as u32);
    let point = |idx: usize| -> (f64, f64) {
        let mut rem = idx;
        let mut w = 1.0;
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        for zj in z.iter_mut() {
            let (t, wt) = axis[rem % k];
            rem /= k;
            w *= wt;
            *zj = Complex64::new((-t).exp(), 0.0);
        }
        (model.evaluate_unchecked(&z), w)
    };
    let samples: Vec<(f64, f64)> = (0..total).into_par_iter().map(point).collect();
    let out = ms
        .iter()
        .map(|&m| par_indexed_sum(total, |i| samples[i].1 * (-2.0 * samples[i].0.max(-m)).exp()))
        .collect();
    Ok((out, total))
}

fn cartesian_integrals(model: &PshModel, domain: &Domain, ms: &[f64], resolution: usize) -> Result<(Vec<f64>, usize)> {
    let m_max = ms[ms.len() - 1];
    let field = GridField::build(model, domain, resolution, m_max)?;
    let cell = field.cell_volume();
    let out = ms
        .iter()
        .map(|&m| {
            par_indexed_sum(field.padded_len(), |i| {
                let f = field.cell_fraction[i];
                if f == 0.0 {
                    0.0
                } else {
                    f * cell * (-2.0 * field.values[i].max(-m)).exp()
                }
            })
        })
        .collect();
    let cells = field.cell_fraction.iter().filter(|f| **f > 0.0).count();
    Ok((out, cells))
}

/// Increment analysis of a truncation series: geometric decay means
/// convergence (with extrapolated limit), ratios near 1 mean divergence.
pub fn analyze_truncation_series(values: Vec<(f64, f64)>, method: IntegralMethod, nodes: usize) -> ExpIntegralSeries {
    let increments: Vec<f64> = values.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let ratios: Vec<f64> = increments
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
        .collect();
    let last_value = values.last().map(|v| v.1).unwrap_or(0.0);
    let negligible = increments.last().is_none_or(|d| *d <= 1e-13 * last_value.abs());
    let last_ratio = ratios.last().cloned().unwrap_or(0.0);
    let diverges = !negligible && last_ratio >= DIVERGENCE_RATIO;
    let growth_rate = match (values.len(), increments.last()) {
        (l, Some(d)) if l >= 2 => d / (values[l - 1].0 - values[l - 2].0),
        _ => 0.0,
    };
    let limit = if diverges {
        None
    } else if negligible {
        Some(last_value)
    } else {
        let d = increments[increments.len() - 1];
        Some(last_value + d * last_ratio / (1.0 - last_ratio))
    };
    ExpIntegralSeries { values, increments, ratios, diverges, growth_rate, limit, method, nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn small_resolution_is_rejected() {
        let m = PshModel::constant(1, 0.0).unwrap();
        assert!(matches!(GridField::build(&m, &Domain::unit_disc(), 4, 1.0), Err(Error::Config(_))));
    }

    #[test]
    fn truncation_applies_at_nodes() {
        let m = PshModel::radial_log(1, 1.0).unwrap();
        let f = GridField::build(&m, &Domain::unit_disc(), 64, 3.0).unwrap();
        assert!(f.values().iter().all(|v| *v >= -3.0));
        let zero = GridField::build(&PshModel::constant(2, 0.0).unwrap(), &Domain::unit_polydisc(2), 8, 1.0).unwrap();
        assert!(zero.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn density_of_squared_norm() {
        let f = GridField::from_fn(&Domain::unit_disc(), 32, 10.0, |z| z[0].norm_sqr()).unwrap();
        let d = f.ma_density();
        for (i, m) in d.mask.iter().enumerate() {
            if *m {
                assert!((d.density[i] - 2.0 / PI).abs() < 1e-9);
            }
        }
        let f2 = GridField::from_fn(&Domain::unit_polydisc(2), 12, 10.0, |z| z[0].norm_sqr() + z[1].norm_sqr()).unwrap();
        let d2 = f2.ma_density();
        let i = d2.mask.iter().position(|m| *m).unwrap();
        assert!((d2.density[i] - 8.0 / (PI * PI)).abs() < 1e-8);
        assert!((f2.total_mass(0.0).mass - 8.0).abs() < 0.05);
    }

    #[test]
    fn pluriharmonic_field_has_no_mass() {
        let f = GridField::from_fn(&Domain::unit_disc(), 64, 10.0, |z| z[0].re).unwrap();
        assert!(f.total_mass(0.0).mass.abs() < 1e-8);
    }

    #[test]
    fn smooth_radial_mass() {
        let m = PshModel::smooth_radial(1, 1.0).unwrap();
        let f = GridField::build(&m, &Domain::unit_ball(1), 256, 10.0).unwrap();
        assert!((f.total_mass(0.0).mass - 2.0).abs() < 0.04);
    }

    #[test]
    fn truncated_log_mass_on_its_circle() {
        let m = PshModel::truncated_log(1, 1.0, 1.0).unwrap();
        let f = GridField::build(&m, &Domain::unit_disc(), 256, 10.0).unwrap();
        let est = f.total_mass(0.0);
        assert!((est.mass - 1.0).abs() < 0.03, "{est:?}");
    }

    #[test]
    fn sublevel_volume_of_radial_log() {
        let m = PshModel::radial_log(1, 1.0).unwrap();
        let v = sublevel_volume(&m, &Domain::unit_disc(), 1.0, &VolumeOptions::default()).unwrap();
        let want = PI * (-2.0f64).exp();
        assert!((v.volume - want).abs() < 0.01 * want, "{v:?}");
        assert!(v.samples >= MIN_VOLUME_SAMPLES);
    }

    #[test]
    fn sublevel_volume_of_toric_model() {
        let m = PshModel::toric_max_log(vec![1.0, 1.0]).unwrap();
        let v = sublevel_volume(&m, &Domain::unit_polydisc(2), 1.0, &VolumeOptions::default()).unwrap();
        let want = PI * PI * (-4.0f64).exp();
        assert!((v.volume - want).abs() < 0.01 * want, "{v:?}");
    }

    #[test]
    fn sublevel_volume_below_truncation_depth_is_zero() {
        let m = PshModel::truncated_log(1, 1.0, 2.0).unwrap();
        let v = sublevel_volume(&m, &Domain::unit_disc(), 2.5, &VolumeOptions::default()).unwrap();
        assert_eq!(v.volume, 0.0);
        let opts = VolumeOptions { method: VolumeMethod::GridCells, ..VolumeOptions::default() };
        assert_eq!(sublevel_volume(&m, &Domain::unit_disc(), 2.5, &opts).unwrap().volume, 0.0);
    }

    #[test]
    fn grid_cell_volume_fallback() {
        let m = PshModel::radial_log(1, 1.0).unwrap();
        let opts = VolumeOptions { method: VolumeMethod::GridCells, resolution: 256, ..VolumeOptions::default() };
        let v = sublevel_volume(&m, &Domain::unit_disc(), 1.0, &opts).unwrap();
        let want = PI * (-2.0f64).exp();
        assert!((v.volume - want).abs() < 0.01 * want, "{v:?}");
    }

    fn schedule() -> Vec<f64> {
        (1..=12).map(|k| 5.0 * k as f64).collect()
    }

    #[test]
    fn exp_integral_converges_for_subcritical_weight() {
        let m = PshModel::radial_log(1, 0.5).unwrap();
        let s = exp_neg2_integral(&m, &Domain::unit_disc(), &schedule(), 64).unwrap();
        assert_eq!(s.method, IntegralMethod::Radial);
        assert!(!s.diverges);
        assert!((s.limit.unwrap() - 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn exp_integral_of_zero_model_is_the_volume() {
        let m = PshModel::constant(2, 0.0).unwrap();
        let s = exp_neg2_integral(&m, &Domain::unit_polydisc(2), &[1.0, 2.0, 3.0], 64).unwrap();
        for (_, v) in &s.values {
            assert!((v - PI * PI).abs() < 1e-9, "{v}");
        }
        assert!(!s.diverges);
    }

    #[test]
    fn exp_integral_grows_affinely_at_the_critical_weight() {
        let m = PshModel::radial_log(1, 1.0).unwrap();
        let s = exp_neg2_integral(&m, &Domain::unit_disc(), &schedule(), 64).unwrap();
        assert!(s.diverges);
        assert!((s.growth_rate - 2.0 * PI).abs() < 1e-6 * 2.0 * PI);
        assert!(s.values.windows(2).all(|w| w[1].1 >= w[0].1));
    }

    #[test]
    fn toric_route_matches_closed_form() {
        for mu in [0.5, 1.0, 1.5] {
            let m = PshModel::toric_max_log(vec![mu, mu]).unwrap();
            let s = exp_neg2_integral(&m, &Domain::unit_polydisc(2), &schedule(), 64).unwrap();
            assert_eq!(s.method, IntegralMethod::Toric);
            let want = m.closed_form_exp_integral().unwrap();
            let got = s.limit.unwrap();
            assert!((got - want).abs() < 0.01 * want, "mu={mu}: {got} vs {want}");
        }
    }

    #[test]
    fn cartesian_route_is_monotone() {
        let m = PshModel::new(1, Family::RadialLog { weight: 0.5, pole: vec![c(0.3, 0.1)] }).unwrap();
        let s = exp_neg2_integral(&m, &Domain::unit_ball(1), &[1.0, 2.0, 4.0], 64).unwrap();
        assert_eq!(s.method, IntegralMethod::Cartesian);
        assert!(s.values.windows(2).all(|w| w[1].1 >= w[0].1));
    }
}
