//! Relative extremal functions and Monge-Ampère capacities of condensers
//! `(E, Ω)`, plus the one-variable quantities: logarithmic capacity, and the
//! Pólya and Alexander–Taylor inequalities.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{factorial, Domain, DomainKind};
use crate::error::{Error, Result};
use crate::grid::domain_samples;
use crate::model::{DiffusePiece, Family, ModelSpec, PshModel, Symmetry};
use crate::planar::{InnerSet, NodeKind, PlanarProblem, PlanarSolution, SolverOptions};
use crate::report::VerdictReport;

const MEMBERSHIP_TOL: f64 = 1e-12;
const ADMISSIBILITY_SAMPLES: usize = 4096;
const SLAB_DELTAS: [f64; 3] = [1.0, 0.1, 0.01];

/// The set `E` of a condenser.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    /// Closed Euclidean ball.
    Ball { center: Vec<Complex64>, radius: f64 },
    /// Closed polydisc `∏ {|z_j − c_j| ≤ r_j}`; the center defaults to 0.
    Subpolydisc {
        #[serde(default)]
        center: Option<Vec<Complex64>>,
        radii: Vec<f64>,
    },
    /// `{φ ≤ −s}` for a catalog model.
    Sublevel { model: ModelSpec, s: f64 },
    /// Toric set `{z : Σ_j a_kj log|z_j| ≤ b_k for all k}` with `a_kj ≥ 0`.
    ToricProfile { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Point { location: Vec<Complex64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CondenserSpec {
    pub domain: Domain,
    pub set: SetSpec,
}

impl CondenserSpec {
    pub fn new(domain: Domain, set: SetSpec) -> Self {
        CondenserSpec { domain, set }
    }

    /// `rD` (n = 1) or `rD^n` inside the unit polydisc.
    pub fn centered_subpolydisc(n: usize, r: f64) -> Self {
        CondenserSpec::new(Domain::unit_polydisc(n), SetSpec::Subpolydisc { center: None, radii: vec![r; n] })
    }

    /// `{|z − c| ≤ r}` in a planar domain.
    pub fn planar_disc(domain: Domain, center: Complex64, r: f64) -> Self {
        CondenserSpec::new(domain, SetSpec::Ball { center: vec![center], radius: r })
    }
}

enum ResolvedSet {
    Ball { center: Vec<Complex64>, radius: f64 },
    Polydisc { center: Vec<Complex64>, radii: Vec<f64> },
    Sublevel { model: PshModel, s: f64 },
    Profile { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    Point(Vec<Complex64>),
}

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn is_zero(z: &[Complex64]) -> bool {
    z.iter().all(|w| w.norm() == 0.0)
}

impl ResolvedSet {
    fn from_spec(set: &SetSpec, n: usize) -> Result<Self> {
        let dim_err = || Error::Config(format!("set dimension does not match the domain (n = {n})"));
        Ok(match set {
            SetSpec::Ball { center, radius } => {
                if center.len() != n {
                    return Err(dim_err());
                }
                if !(*radius > 0.0) {
                    return Err(Error::Config("ball radius must be positive".into()));
                }
                ResolvedSet::Ball { center: center.clone(), radius: *radius }
            }
            SetSpec::Subpolydisc { center, radii } => {
                let center = center.clone().unwrap_or_else(|| zeros(n));
                if center.len() != n || radii.len() != n {
                    return Err(dim_err());
                }
                if !radii.iter().all(|r| *r > 0.0) {
                    return Err(Error::Config("polydisc radii must be positive".into()));
                }
                ResolvedSet::Polydisc { center, radii: radii.clone() }
            }
            SetSpec::Sublevel { model, s } => {
                let model = PshModel::from_spec(model)?;
                if model.dimension() != n {
                    return Err(dim_err());
                }
                if !(*s > 0.0) {
                    return Err(Error::Config("sublevel depth must be positive".into()));
                }
                ResolvedSet::Sublevel { model, s: *s }
            }
            SetSpec::ToricProfile { normals, offsets } => {
                if normals.len() != offsets.len() || normals.iter().any(|a| a.len() != n) || normals.is_empty() {
                    return Err(Error::Config("toric profile needs one offset per normal of length n".into()));
                }
                if normals.iter().flatten().any(|a| *a < 0.0) {
                    return Err(Error::Config("toric profile normals must be nonnegative".into()));
                }
                ResolvedSet::Profile { normals: normals.clone(), offsets: offsets.clone() }
            }
            SetSpec::Point { location } => {
                if location.len() != n {
                    return Err(dim_err());
                }
                ResolvedSet::Point(location.clone())
            }
        })
    }

    /// Closed membership with absolute slack `tol`.
    fn contains(&self, z: &[Complex64], tol: f64) -> bool {
        match self {
            ResolvedSet::Ball { center, radius } => {
                let d2: f64 = z.iter().zip(center).map(|(a, b)| (a - b).norm_sqr()).sum();
                d2.sqrt() <= radius + tol
            }
            ResolvedSet::Polydisc { center, radii } => {
                z.iter().zip(center).zip(radii).all(|((a, c), r)| (a - c).norm() <= r + tol)
            }
            ResolvedSet::Sublevel { model, s } => model.evaluate_unchecked(z) <= -s + tol,
            ResolvedSet::Profile { normals, offsets } => {
                let ell: Vec<f64> = z.iter().map(|w| w.norm().ln()).collect();
                normals.iter().zip(offsets).all(|(a, b)| {
                    let v: f64 = a.iter().zip(&ell).map(|(x, l)| if *x == 0.0 { 0.0 } else { x * l }).sum();
                    v <= b + tol
                })
            }
            ResolvedSet::Point(p) => {
                let d2: f64 = z.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum();
                d2.sqrt() <= tol
            }
        }
    }

    /// Whether the set is invariant under coordinate rotations about 0.
    fn is_toric(&self) -> bool {
        match self {
            ResolvedSet::Ball { center, .. } | ResolvedSet::Polydisc { center, .. } => is_zero(center),
            ResolvedSet::Sublevel { model, .. } => match model.family() {
                Family::RadialLog { pole, .. } => is_zero(pole),
                _ => matches!(model.symmetry(), Symmetry::Radial | Symmetry::Toric),
            },
            ResolvedSet::Profile { .. } => true,
            ResolvedSet::Point(p) => is_zero(p),
        }
    }

    /// Exact radii when the set is a centered polydisc.
    fn as_subpolydisc(&self, n: usize) -> Option<Vec<f64>> {
        match self {
            ResolvedSet::Polydisc { center, radii } if is_zero(center) => Some(radii.clone()),
            ResolvedSet::Ball { center, radius } if n == 1 && is_zero(center) => Some(vec![*radius]),
            ResolvedSet::Sublevel { model, s } => match model.family() {
                Family::ToricMaxLog { weights } => Some(weights.iter().map(|a| (-s / a).exp()).collect()),
                Family::TruncatedLog { weight, depth } if s <= depth => Some(vec![(-s / weight).exp(); n]),
                Family::ProductMaxLog { z_weight, zeta_weight } => {
                    let mut r = vec![(-s / z_weight).exp(); n - 1];
                    r.push((-s / zeta_weight).exp());
                    Some(r)
                }
                Family::RadialLog { weight, pole } if n == 1 && is_zero(pole) => Some(vec![(-s / weight).exp()]),
                _ => None,
            },
            _ => None,
        }
    }

    /// Planar level function, negative inside.
    fn planar_level(&self) -> Box<dyn Fn(Complex64) -> f64 + Sync + '_> {
        match self {
            ResolvedSet::Ball { center, radius } => Box::new(move |z| (z - center[0]).norm() - radius),
            ResolvedSet::Polydisc { center, radii } => Box::new(move |z| (z - center[0]).norm() - radii[0]),
            ResolvedSet::Sublevel { model, s } => Box::new(move |z| model.evaluate_unchecked(&[z]) + s),
            ResolvedSet::Profile { normals, offsets } => Box::new(move |z| {
                let l = z.norm().ln();
                normals.iter().zip(offsets).map(|(a, b)| a[0] * l - b).fold(f64::NEG_INFINITY, f64::max)
            }),
            ResolvedSet::Point(p) => Box::new(move |z| (z - p[0]).norm()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityRoute {
    Planar,
    ToricClosedForm,
    ToricEnvelope,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Residuals {
    /// `max u⁺`.
    pub max_positive: f64,
    /// `max (u + 1)` over `E`.
    pub max_on_set: f64,
    /// Largest negative part of the discrete Laplacian (planar) or of the
    /// convexity defect (toric), in mass units.
    pub subharmonic_defect: f64,
}

/// Convex envelope in log coordinates: `F(ℓ) = max(−1, max_i ⟨v_i, ℓ⟩)`.
#[derive(Clone, Debug, Serialize)]
pub struct ToricEnvelope {
    pub vertices: Vec<Vec<f64>>,
    /// Truncation `ℓ_j ≥ −L` of the log box.
    pub log_box: f64,
    pub boundary_points: usize,
}

impl ToricEnvelope {
    pub fn value(&self, ell: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.iter().zip(ell).map(|(a, b)| a * b).sum::<f64>())
            .fold(-1.0, f64::max)
    }

    /// Value of the extremal function at `z` in the unit polydisc.
    pub fn extremal_value(&self, z: &[Complex64]) -> f64 {
        let ell: Vec<f64> = z.iter().map(|w| w.norm().ln()).collect();
        self.value(&ell)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalSolution {
    pub route: CapacityRoute,
    /// `+inf` when the capacity is infinite (see `infinite`).
    pub capacity: f64,
    pub certified_lower_bound: f64,
    pub residuals: Residuals,
    pub infinite: bool,
    /// Monge-Ampère mass of the log-coordinate envelope (0 for slab sets).
    pub envelope_mass: f64,
    /// `(δ, ∫_E (dd^c v_δ)^n)` for explicit competitors when `infinite`.
    pub lower_bracket: Vec<(f64, f64)>,
    pub resolution: usize,
    pub iterations: usize,
    pub flux_radius: Option<f64>,
    #[serde(skip)]
    pub planar: Option<PlanarSolution>,
    #[serde(skip)]
    pub envelope: Option<ToricEnvelope>,
}

fn circumscribed_radius(domain: &Domain, c: Complex64) -> f64 {
    match domain.kind {
        DomainKind::PlanarRectangle => {
            let d = c - domain.center[0];
            (d.re.abs() + domain.radii[0]).hypot(d.im.abs() + domain.radii[1])
        }
        _ => (c - domain.center[0]).norm() + domain.radii[0],
    }
}

/// Shortest distance from `c` to `{level > 0}` along 64 rays (0 if `c` is outside).
fn inscribed_radius(level: &dyn Fn(Complex64) -> f64, c: Complex64, max_r: f64) -> f64 {
    if level(c) > 0.0 {
        return 0.0;
    }
    let mut best = max_r;
    for k in 0..64 {
        let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 64.0);
        let mut t = 0.0;
        let step = max_r / 256.0;
        while t < max_r && level(c + dir * (t + step)) <= 0.0 {
            t += step;
        }
        let (mut a, mut b) = (t, (t + step).min(max_r));
        for _ in 0..50 {
            let m = 0.5 * (a + b);
            if level(c + dir * m) <= 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        best = best.min(a);
    }
    best * (1.0 - 1e-9)
}

/// Planar relative extremal function by the projected relaxation solve on a
/// `resolution × resolution` node grid; capacity is the discrete Laplacian
/// mass over a disc separating `E` from `∂Ω`.
pub fn extremal_function_planar(spec: &CondenserSpec, resolution: usize, tol: f64) -> Result<ExtremalSolution> {
    extremal_function_planar_with(spec, resolution, &SolverOptions { tol, ..SolverOptions::default() })
}

pub fn extremal_function_planar_with(
    spec: &CondenserSpec,
    resolution: usize,
    opts: &SolverOptions,
) -> Result<ExtremalSolution> {
    let domain = &spec.domain;
    domain.validate()?;
    if !domain.is_planar() {
        return Err(Error::Unsupported("planar solver needs a planar domain".into()));
    }
    let set = ResolvedSet::from_spec(&spec.set, 1)?;
    let level = set.planar_level();
    let zero = |_: Complex64| 0.0;
    let inner = match &set {
        ResolvedSet::Point(p) => InnerSet::Point(p[0]),
        _ => InnerSet::Level(level.as_ref()),
    };
    let problem = PlanarProblem { domain, inner, inner_value: -1.0, boundary: &zero, clamp: Some((-1.0, 0.0)) };

    let grid = crate::planar::NodeGrid::over(domain, resolution);
    let kinds = problem.classify(&grid);
    let inner_nodes: Vec<usize> = (0..grid.len()).filter(|&k| kinds[k] == NodeKind::Inner).collect();
    if !kinds.contains(&NodeKind::Free) {
        return Err(Error::DegenerateCondenser("E fills the domain".into()));
    }
    if inner_nodes.is_empty() {
        return Err(Error::Config("E contains no grid node at this resolution".into()));
    }
    let h = grid.hx.max(grid.hy);
    let touches = inner_nodes.iter().any(|&k| domain.level(&[grid.point_of(k)]) > -1.5 * h);
    if touches {
        return Err(Error::DegenerateCondenser("E touches the boundary of the domain".into()));
    }

    let n_in = inner_nodes.len() as f64;
    let c = inner_nodes.iter().map(|&k| grid.point_of(k)).sum::<Complex64>() / n_in;
    let r_e = inner_nodes.iter().map(|&k| (grid.point_of(k) - c).norm()).fold(0.0, f64::max) + h;
    let r_dom = -domain.level(&[c]);
    if r_e + 2.0 * h >= r_dom - 2.0 * h {
        return Err(Error::Unsupported("no circle separates E from the boundary at this resolution".into()));
    }
    let flux_radius = 0.5 * (r_e + r_dom);

    let sol = problem.solve(resolution, opts)?;
    let capacity = sol.laplacian_mass(c, flux_radius);

    let max_positive = sol.values.iter().cloned().fold(0.0, f64::max);
    let max_on_set = inner_nodes.iter().map(|&k| sol.values[k] + 1.0).fold(0.0, f64::max);
    let residuals = Residuals { max_positive, max_on_set, subharmonic_defect: sol.laplacian_defect };

    let certified_lower_bound = match &set {
        ResolvedSet::Point(_) => 0.0,
        ResolvedSet::Ball { center, radius } => {
            1.0 / (circumscribed_radius(domain, center[0]) / radius).ln()
        }
        _ => {
            let rho = inscribed_radius(level.as_ref(), c, r_dom);
            if rho > 0.0 {
                1.0 / (circumscribed_radius(domain, c) / rho).ln()
            } else {
                0.0
            }
        }
    };
    Ok(ExtremalSolution {
        route: CapacityRoute::Planar,
        capacity,
        certified_lower_bound,
        residuals,
        infinite: false,
        envelope_mass: capacity,
        lower_bracket: vec![],
        resolution,
        iterations: sol.iterations,
        flux_radius: Some(flux_radius),
        planar: Some(sol),
        envelope: None,
    })
}

fn is_unit_polydisc(d: &Domain) -> bool {
    d.kind == DomainKind::Polydisc && is_zero(&d.center) && d.radii.iter().all(|r| *r == 1.0)
        || (d.dim() == 1
            && matches!(d.kind, DomainKind::PlanarDisc | DomainKind::Ball)
            && is_zero(&d.center)
            && d.radii[0] == 1.0)
}

fn toric_solution(capacity: f64, lower: f64, envelope: ToricEnvelope, route: CapacityRoute, res: usize) -> ExtremalSolution {
    ExtremalSolution {
        route,
        capacity,
        certified_lower_bound: lower,
        residuals: Residuals::default(),
        infinite: false,
        envelope_mass: capacity,
        lower_bracket: vec![],
        resolution: res,
        iterations: 0,
        flux_radius: None,
        planar: None,
        envelope: Some(envelope),
    }
}

/// Slab sets `{|z_j| ≤ r_j for j ∈ J}` (other coordinates unrestricted):
/// capacity is infinite; competitors `max(log|z_j|/λ_j (j ∈ J), log|z_k|/δ (k ∉ J), −1)`
/// put mass `∏ λ_j^{-1} δ^{−(n−|J|)}` on a torus inside `E`.
fn slab_solution(lambdas: &[Option<f64>], log_box: f64, res: usize) -> ExtremalSolution {
    let n = lambdas.len();
    let bracket: Vec<(f64, f64)> = SLAB_DELTAS
        .iter()
        .map(|&d| (d, lambdas.iter().map(|l| 1.0 / l.unwrap_or(d)).product()))
        .collect();
    let vertices = lambdas
        .iter()
        .enumerate()
        .filter_map(|(j, l)| {
            l.map(|l| {
                let mut v = vec![0.0; n];
                v[j] = 1.0 / l;
                v
            })
        })
        .collect();
    ExtremalSolution {
        route: CapacityRoute::ToricEnvelope,
        capacity: f64::INFINITY,
        certified_lower_bound: bracket.last().map(|b| b.1).unwrap_or(0.0),
        residuals: Residuals::default(),
        infinite: true,
        envelope_mass: 0.0,
        lower_bracket: bracket,
        resolution: res,
        iterations: 0,
        flux_radius: None,
        planar: None,
        envelope: Some(ToricEnvelope { vertices, log_box, boundary_points: 0 }),
    }
}

/// Extremal function of a toric condenser in the unit polydisc via its convex
/// envelope in log coordinates; capacity is `n!` times the Alexandrov mass.
pub fn toric_extremal(spec: &CondenserSpec, log_resolution: usize) -> Result<ExtremalSolution> {
    let n = spec.domain.dim();
    if !is_unit_polydisc(&spec.domain) {
        return Err(Error::Unsupported("toric route needs the unit polydisc".into()));
    }
    let set = ResolvedSet::from_spec(&spec.set, n)?;
    if !set.is_toric() {
        return Err(Error::Unsupported("set E is not toric".into()));
    }
    if let ResolvedSet::Point(_) = set {
        let env = ToricEnvelope { vertices: vec![], log_box: f64::INFINITY, boundary_points: 1 };
        return Ok(toric_solution(0.0, 0.0, env, CapacityRoute::ToricClosedForm, log_resolution));
    }
    if let Some(radii) = set.as_subpolydisc(n) {
        if radii.iter().all(|r| *r >= 1.0) {
            return Err(Error::DegenerateCondenser("E is the whole polydisc".into()));
        }
        let lambdas: Vec<Option<f64>> = radii.iter().map(|r| if *r < 1.0 { Some(-r.ln()) } else { None }).collect();
        let log_box = lambdas.iter().flatten().fold(10.0f64, |a, l| a.max(3.0 * l));
        if lambdas.iter().any(|l| l.is_none()) {
            return Ok(slab_solution(&lambdas, log_box, log_resolution));
        }
        let cap: f64 = lambdas.iter().map(|l| 1.0 / l.unwrap()).product();
        let vertices = lambdas
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let mut v = vec![0.0; n];
                v[j] = 1.0 / l.unwrap();
                v
            })
            .collect();
        let env = ToricEnvelope { vertices, log_box, boundary_points: 1 };
        return Ok(toric_solution(cap, cap, env, CapacityRoute::ToricClosedForm, log_resolution));
    }
    if n > 2 {
        return Err(Error::Unsupported("sampled toric envelopes are limited to n <= 2".into()));
    }
    if log_resolution < 8 {
        return Err(Error::Config("log resolution must be at least 8".into()));
    }
    let in_log_set = |ell: &[f64]| {
        let z: Vec<Complex64> = ell.iter().map(|l| Complex64::new(l.exp(), 0.0)).collect();
        set.contains(&z, MEMBERSHIP_TOL)
    };
    // diagonal depth of E sets the log box
    let diag = |t: f64| in_log_set(&vec![-t; n]);
    if diag(0.0) {
        return Err(Error::DegenerateCondenser("E is the whole polydisc".into()));
    }
    let mut t_hi = 1.0;
    while !diag(t_hi) {
        t_hi *= 2.0;
        if t_hi > 1e6 {
            return Err(Error::Config("E has empty interior in log coordinates".into()));
        }
    }
    let log_box = (3.0 * t_hi).max(10.0);

    // Largest ℓ_last with (ℓ_rest, ℓ_last) ∈ log E, returning an inside point.
    let sup_along = |fixed: &[f64], axis: usize| -> Option<f64> {
        let at = |t: f64| {
            let mut e = fixed.to_vec();
            e.insert(axis, t);
            in_log_set(&e)
        };
        if at(0.0) {
            return Some(0.0);
        }
        if !at(-log_box) {
            return None;
        }
        let (mut a, mut b) = (-log_box, 0.0);
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if at(m) {
                a = m;
            } else {
                b = m;
            }
        }
        Some(a)
    };

    let mut points: Vec<Vec<f64>> = Vec::new();
    if n == 1 {
        if let Some(t) = sup_along(&[], 0) {
            points.push(vec![t]);
        }
    } else {
        for i in 0..=log_resolution {
            let a = -log_box + log_box * i as f64 / log_resolution as f64;
            for axis in 0..2 {
                if let Some(t) = sup_along(&[a], axis) {
                    let mut p = vec![a];
                    p.insert(axis, t);
                    points.push(p);
                }
            }
        }
        // rays from the origin pick up corners between grid lines
        for k in 1..log_resolution {
            let theta = 0.5 * PI * k as f64 / log_resolution as f64;
            let dir = [-theta.cos(), -theta.sin()];
            let at = |t: f64| in_log_set(&[t * dir[0], t * dir[1]]);
            let t_max = log_box / dir[0].abs().max(dir[1].abs());
            if !at(t_max) {
                continue;
            }
            let (mut a, mut b) = (t_max, 0.0);
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                if at(m) {
                    a = m;
                } else {
                    b = m;
                }
            }
            points.push(vec![a * dir[0], a * dir[1]]);
        }
    }
    if points.is_empty() {
        return Err(Error::Config("E has no points in the log box".into()));
    }
    let touching: Vec<bool> = (0..n).map(|j| points.iter().any(|p| p[j] == 0.0)).collect();
    if touching.iter().any(|t| *t) {
        // `E` reaches the face |z_j| = 1: slab in the remaining coordinates.
        let lambdas: Vec<Option<f64>> = (0..n)
            .map(|j| {
                if touching[j] {
                    None
                } else {
                    Some(-points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max))
                }
            })
            .collect();
        return Ok(slab_solution(&lambdas, log_box, log_resolution));
    }

    let (cap, vertices) = if n == 1 {
        let t = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        (-1.0 / t, vec![vec![-1.0 / t]])
    } else {
        let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
        let (area, verts) = support_region_area(&pts);
        (factorial(2) * area, verts.into_iter().map(|v| v.to_vec()).collect())
    };
    let env = ToricEnvelope { vertices, log_box, boundary_points: points.len() };
    let max_on_set = points.iter().map(|q| env.value(q) + 1.0).fold(0.0, f64::max);
    let mut sol = toric_solution(cap, cap, env, CapacityRoute::ToricEnvelope, log_resolution);
    sol.residuals.max_on_set = max_on_set;
    Ok(sol)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Area of `{p ≥ 0 : max_k ⟨p, q_k⟩ ≥ −1}` for points `q_k` in the open
/// negative quadrant, and the vertices of the complementary convex set
/// `{p ≥ 0 : max_k ⟨p, q_k⟩ ≤ −1}`.
pub fn support_region_area(points: &[[f64; 2]]) -> (f64, Vec<[f64; 2]>) {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
    // Pareto front: x decreasing, y strictly increasing
    let mut front: Vec<[f64; 2]> = Vec::new();
    for p in pts {
        if front.last().is_none_or(|l| p[1] > l[1]) {
            front.push(p);
        }
    }
    // upper-right convex chain
    let mut chain: Vec<[f64; 2]> = Vec::new();
    for p in front {
        while chain.len() >= 2 && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0 {
            chain.pop();
        }
        chain.push(p);
    }
    let first = chain[0];
    let last = chain[chain.len() - 1];
    let mut verts = vec![[-1.0 / first[0], 0.0]];
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        let det = a[0] * b[1] - a[1] * b[0];
        // ⟨p, a⟩ = −1 and ⟨p, b⟩ = −1
        verts.push([(-b[1] + a[1]) / det, (-a[0] + b[0]) / det]);
    }
    verts.push([0.0, -1.0 / last[1]]);
    let mut area = 0.0;
    let mut prev = [0.0, 0.0];
    for v in verts.iter().chain(std::iter::once(&[0.0, 0.0])) {
        area += prev[0] * v[1] - prev[1] * v[0];
        prev = *v;
    }
    (0.5 * area.abs(), verts)
}

/// `∫_E (dd^c v)^n` for an admissible catalog candidate `v` (−1 ≤ v ≤ 0 on
/// Ω, checked on a quasi-random sample and at the candidate's poles).
pub fn capacity_lower_bound(spec: &CondenserSpec, candidate: &PshModel) -> Result<f64> {
    let n = spec.domain.dim();
    if candidate.dimension() != n {
        return Err(Error::Config("candidate dimension differs from the domain".into()));
    }
    let set = ResolvedSet::from_spec(&spec.set, n)?;
    let reference = candidate.reference_domain();
    let mass = candidate.closed_form_ma_mass();
    let mut probes = domain_samples(&spec.domain, ADMISSIBILITY_SAMPLES, 0x5eed)?;
    probes.extend(mass.atoms.iter().map(|a| a.location.clone()));
    for z in &probes {
        if !reference.contains(z, MEMBERSHIP_TOL) {
            return Err(Error::Inadmissible("domain is not contained in the candidate's domain".into()));
        }
        let v = candidate.evaluate_unchecked(z);
        if !(v >= -1.0 - 1e-9) || v > 1e-9 {
            return Err(Error::Inadmissible(format!("candidate takes the value {v} at {z:?}")));
        }
    }
    let mut total = 0.0;
    for a in &mass.atoms {
        if set.contains(&a.location, MEMBERSHIP_TOL) {
            total += a.mass;
        }
    }
    for piece in &mass.diffuse {
        total += piece.mass() * diffuse_fraction_in(&set, piece, n)?;
    }
    Ok(total)
}

fn diffuse_fraction_in(set: &ResolvedSet, piece: &DiffusePiece, n: usize) -> Result<f64> {
    match piece {
        DiffusePiece::Torus { radii, .. } => {
            let per_axis: usize = if n == 1 { 1024 } else { 64 };
            let total = per_axis.pow(n as u32);
            let mut hits = 0usize;
            let mut z = zeros(n);
            for k in 0..total {
                let mut rem = k;
                for (j, zj) in z.iter_mut().enumerate() {
                    let a = 2.0 * PI * (rem % per_axis) as f64 / per_axis as f64;
                    rem /= per_axis;
                    *zj = Complex64::from_polar(radii[j], a);
                }
                if set.contains(&z, MEMBERSHIP_TOL) {
                    hits += 1;
                }
            }
            Ok(hits as f64 / total as f64)
        }
        DiffusePiece::UniformBall { radius, .. } => {
            let ball = Domain { kind: DomainKind::Ball, center: zeros(n), radii: vec![*radius] };
            let pts = domain_samples(&ball, 1 << 16, 0xba11)?;
            let hits = pts.iter().filter(|z| set.contains(z, MEMBERSHIP_TOL)).count();
            Ok(hits as f64 / pts.len() as f64)
        }
    }
}

/// Planar compact sets with known or computable logarithmic capacity.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanarCompact {
    Disc { center: Complex64, radius: f64 },
    Segment { a: Complex64, b: Complex64 },
    Point { at: Complex64 },
    DiscUnion { discs: Vec<(Complex64, f64)> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogCapacityMethod {
    ClosedForm,
    ChargeSimulation,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogCapacity {
    pub value: f64,
    pub method: LogCapacityMethod,
    /// `(k, d_k)` approximate Fekete transfinite diameters.
    pub transfinite: Vec<(usize, f64)>,
    pub transfinite_monotone: bool,
    /// Largest deviation of the equilibrium potential from its constant on `K`.
    pub potential_residual: f64,
}

pub const MAX_FEKETE_ORDER: usize = 12;

impl PlanarCompact {
    fn validate(&self) -> Result<()> {
        match self {
            PlanarCompact::Disc { radius, .. } if !(*radius > 0.0) => {
                Err(Error::Config("disc radius must be positive".into()))
            }
            PlanarCompact::Segment { a, b } if a == b => Err(Error::Config("segment endpoints coincide".into())),
            PlanarCompact::DiscUnion { discs } if discs.is_empty() || discs.iter().any(|d| !(d.1 > 0.0)) => {
                Err(Error::Config("disc union needs discs of positive radius".into()))
            }
            _ => Ok(()),
        }
    }

    fn discs(&self) -> Vec<(Complex64, f64)> {
        match self {
            PlanarCompact::Disc { center, radius } => vec![(*center, *radius)],
            PlanarCompact::DiscUnion { discs } => discs.clone(),
            _ => vec![],
        }
    }

    fn max_modulus(&self) -> f64 {
        match self {
            PlanarCompact::Segment { a, b } => a.norm().max(b.norm()),
            PlanarCompact::Point { at } => at.norm(),
            _ => self.discs().iter().map(|(c, r)| c.norm() + r).fold(0.0, f64::max),
        }
    }

    /// Lebesgue area; disc unions must be pairwise disjoint.
    pub fn area(&self) -> Result<f64> {
        match self {
            PlanarCompact::Segment { .. } | PlanarCompact::Point { .. } => Ok(0.0),
            _ => {
                let d = self.discs();
                for i in 0..d.len() {
                    for j in i + 1..d.len() {
                        if (d[i].0 - d[j].0).norm() < d[i].1 + d[j].1 {
                            return Err(Error::Unsupported("area of overlapping discs".into()));
                        }
                    }
                }
                Ok(d.iter().map(|(_, r)| PI * r * r).sum())
            }
        }
    }

    /// Points on the outer boundary, used as Fekete candidates.
    fn boundary_samples(&self, per_piece: usize) -> Vec<Complex64> {
        match self {
            PlanarCompact::Segment { a, b } => (0..per_piece)
                .map(|k| {
                    let t = 0.5 - 0.5 * (PI * k as f64 / (per_piece - 1) as f64).cos();
                    a + (b - a) * t
                })
                .collect(),
            PlanarCompact::Point { at } => vec![*at],
            _ => {
                let d = self.discs();
                let mut out = Vec::new();
                for (i, (c, r)) in d.iter().enumerate() {
                    for k in 0..per_piece {
                        let z = c + Complex64::from_polar(*r, 2.0 * PI * k as f64 / per_piece as f64);
                        let covered = d.iter().enumerate().any(|(j, (c2, r2))| j != i && (z - c2).norm() < *r2);
                        if !covered {
                            out.push(z);
                        }
                    }
                }
                out
            }
        }
    }
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = ((z - a) * d.conj()).re / d.norm_sqr();
    (z - (a + d * t.clamp(0.0, 1.0))).norm()
}

/// Equilibrium potential of a disc union by charge simulation:
/// `U(z) = Σ q_i log|z − y_i|`, `Σ q_i = 1`, `U = V` on the boundary.
struct ChargeSimulation {
    charges: Vec<(Complex64, f64)>,
    robin: f64,
    residual: f64,
}

impl ChargeSimulation {
    fn solve(discs: &[(Complex64, f64)]) -> Result<Self> {
        const CHARGES: usize = 48;
        const COLLOCATION: usize = 96;
        const CHARGE_RADIUS: f64 = 0.6;
        let covered = |z: Complex64, skip: usize| {
            discs.iter().enumerate().any(|(j, (c, r))| j != skip && (z - c).norm() < *r)
        };
        let mut sources = Vec::new();
        let mut colloc = Vec::new();
        let mut checks = Vec::new();
        for (i, (c, r)) in discs.iter().enumerate() {
            for k in 0..CHARGES {
                sources.push(c + Complex64::from_polar(CHARGE_RADIUS * r, 2.0 * PI * (k as f64 + 0.5) / CHARGES as f64));
            }
            for k in 0..COLLOCATION {
                let z = c + Complex64::from_polar(*r, 2.0 * PI * k as f64 / COLLOCATION as f64);
                if !covered(z, i) {
                    colloc.push(z);
                }
                let w = c + Complex64::from_polar(*r, 2.0 * PI * (k as f64 + 0.5) / COLLOCATION as f64);
                if !covered(w, i) {
                    checks.push(w);
                }
            }
        }
        let (m, ns) = (colloc.len(), sources.len());
        let mut a = DMatrix::<f64>::zeros(m + 1, ns + 1);
        let mut rhs = DVector::<f64>::zeros(m + 1);
        for (row, x) in colloc.iter().enumerate() {
            for (col, y) in sources.iter().enumerate() {
                a[(row, col)] = (x - y).norm().ln();
            }
            a[(row, ns)] = -1.0;
        }
        for col in 0..ns {
            a[(m, col)] = 1.0;
        }
        rhs[m] = 1.0;
        let svd = a.svd(true, true);
        let sol = svd
            .solve(&rhs, 1e-13)
            .map_err(|e| Error::Numerical { message: format!("charge simulation: {e}"), residual: f64::NAN })?;
        let charges: Vec<(Complex64, f64)> = sources.iter().cloned().zip(sol.iter().cloned()).collect();
        let robin = sol[ns];
        let mut sim = ChargeSimulation { charges, robin, residual: 0.0 };
        sim.residual = checks.iter().map(|z| (sim.potential(*z) - robin).abs()).fold(0.0, f64::max);
        Ok(sim)
    }

    fn potential(&self, z: Complex64) -> f64 {
        self.charges.iter().map(|(y, q)| q * (z - y).norm().ln()).sum()
    }

    /// Green function of the complement with pole at infinity.
    fn green(&self, z: Complex64) -> f64 {
        (self.potential(z) - self.robin).max(0.0)
    }
}

/// Approximate Fekete points of order `k` among candidates (greedy start,
/// then single-point exchange); returns `d_k`.
fn transfinite_diameter(candidates: &[Complex64], k: usize) -> f64 {
    if candidates.len() < k {
        return 0.0;
    }
    let logd = |a: Complex64, b: Complex64| (a - b).norm().max(1e-300).ln();
    let mut chosen: Vec<usize> = vec![0];
    // start from the candidate farthest from the first
    let far = (0..candidates.len()).max_by(|&i, &j| {
        (candidates[i] - candidates[0]).norm().total_cmp(&(candidates[j] - candidates[0]).norm())
    });
    chosen.push(far.unwrap_or(1));
    while chosen.len() < k {
        let next = (0..candidates.len())
            .filter(|i| !chosen.contains(i))
            .max_by(|&i, &j| {
                let si: f64 = chosen.iter().map(|&c| logd(candidates[i], candidates[c])).sum();
                let sj: f64 = chosen.iter().map(|&c| logd(candidates[j], candidates[c])).sum();
                si.total_cmp(&sj)
            })
            .expect("enough candidates");
        chosen.push(next);
    }
    for _ in 0..50 {
        let mut improved = false;
        for slot in 0..k {
            let others: Vec<usize> = chosen.iter().enumerate().filter(|(s, _)| *s != slot).map(|(_, c)| *c).collect();
            let score = |i: usize| -> f64 { others.iter().map(|&c| logd(candidates[i], candidates[c])).sum() };
            let current = score(chosen[slot]);
            let (best_i, best) = (0..candidates.len())
                .filter(|i| !others.contains(i))
                .map(|i| (i, score(i)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("candidates remain");
            if best > current + 1e-13 {
                chosen[slot] = best_i;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let mut s = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            s += logd(candidates[chosen[i]], candidates[chosen[j]]);
        }
    }
    (2.0 * s / (k * (k - 1)) as f64).exp()
}

/// Logarithmic capacity `c(K)`: closed forms for discs, segments and points;
/// charge simulation for disc unions. Fekete diameters of orders 2..=12 are
/// reported as diagnostics.
pub fn logarithmic_capacity(k: &PlanarCompact) -> Result<LogCapacity> {
    k.validate()?;
    let candidates = k.boundary_samples(360);
    let transfinite: Vec<(usize, f64)> = if let PlanarCompact::Point { .. } = k {
        vec![]
    } else {
        (2..=MAX_FEKETE_ORDER).map(|ord| (ord, transfinite_diameter(&candidates, ord))).collect()
    };
    let transfinite_monotone = transfinite.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-9));
    let (value, method, residual) = match k {
        PlanarCompact::Disc { radius, .. } => (*radius, LogCapacityMethod::ClosedForm, 0.0),
        PlanarCompact::Segment { a, b } => ((b - a).norm() / 4.0, LogCapacityMethod::ClosedForm, 0.0),
        PlanarCompact::Point { .. } => (0.0, LogCapacityMethod::ClosedForm, 0.0),
        PlanarCompact::DiscUnion { discs } => {
            let sim = ChargeSimulation::solve(discs)?;
            (sim.robin.exp(), LogCapacityMethod::ChargeSimulation, sim.residual)
        }
    };
    Ok(LogCapacity { value, method, transfinite, transfinite_monotone, potential_residual: residual })
}

/// Pólya's inequality `area(K) ≤ π c(K)²`.
pub fn polya_check(k: &PlanarCompact) -> Result<VerdictReport> {
    let cap = logarithmic_capacity(k)?;
    let area = k.area()?;
    let tol = if cap.method == LogCapacityMethod::ClosedForm { 0.0 } else { 1e-6 };
    Ok(VerdictReport::inequality("polya-at", &format!("polya:{}", shape_label(k)), area, PI * cap.value * cap.value, tol)
        .with("log_capacity", cap.value)
        .with("potential_residual", cap.potential_residual))
}

fn shape_label(k: &PlanarCompact) -> String {
    match k {
        PlanarCompact::Disc { center, radius } => format!("disc(c={center},r={radius})"),
        PlanarCompact::Segment { a, b } => format!("segment({a},{b})"),
        PlanarCompact::Point { at } => format!("point({at})"),
        PlanarCompact::DiscUnion { discs } => format!("disc-union(n={})", discs.len()),
    }
}

/// `M_K = sup_{|z|=1} V_K` with `V_K` the Green function of `C \ K` with pole at ∞.
pub fn alexander_taylor_sup(k: &PlanarCompact) -> Result<f64> {
    k.validate()?;
    let green: Box<dyn Fn(Complex64) -> f64> = match k {
        PlanarCompact::Point { .. } => return Ok(f64::INFINITY),
        PlanarCompact::Disc { center, radius } => {
            return Ok(((1.0 + center.norm()) / radius).ln());
        }
        PlanarCompact::Segment { a, b } => {
            let (a, b) = (*a, *b);
            Box::new(move |z| {
                let w = (2.0 * z - (a + b)) / (b - a);
                let s = (w * w - 1.0).sqrt();
                (w + s).norm().max((w - s).norm()).ln()
            })
        }
        PlanarCompact::DiscUnion { discs } => {
            let sim = ChargeSimulation::solve(discs)?;
            Box::new(move |z| sim.green(z))
        }
    };
    const SAMPLES: usize = 4096;
    let on_circle = |t: f64| green(Complex64::from_polar(1.0, t));
    let step = 2.0 * PI / SAMPLES as f64;
    let (best_k, _) = (0..SAMPLES)
        .map(|i| (i, on_circle(i as f64 * step)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("samples");
    // golden-section refinement around the best sample
    let (mut lo, mut hi) = ((best_k as f64 - 1.0) * step, (best_k as f64 + 1.0) * step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if on_circle(x1) < on_circle(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    Ok(on_circle(0.5 * (lo + hi)).max(on_circle(best_k as f64 * step)))
}

/// `Cap(K, D)` from the planar solver.
pub fn planar_capacity_of_compact(k: &PlanarCompact, resolution: usize) -> Result<ExtremalSolution> {
    match k {
        PlanarCompact::Disc { center, radius } => {
            extremal_function_planar(&CondenserSpec::planar_disc(Domain::unit_disc(), *center, *radius), resolution, 1e-8)
        }
        PlanarCompact::Point { at } => extremal_function_planar(
            &CondenserSpec::new(Domain::unit_disc(), SetSpec::Point { location: vec![*at] }),
            resolution,
            1e-8,
        ),
        _ => {
            let domain = Domain::unit_disc();
            let level = move |z: Complex64| match k {
                PlanarCompact::Segment { a, b } => segment_distance(z, *a, *b) - 1e-12,
                _ => k.discs().iter().map(|(c, r)| (z - c).norm() - r).fold(f64::INFINITY, f64::min),
            };
            let zero = |_: Complex64| 0.0;
            let problem = PlanarProblem {
                domain: &domain,
                inner: InnerSet::Level(&level),
                inner_value: -1.0,
                boundary: &zero,
                clamp: Some((-1.0, 0.0)),
            };
            let grid = crate::planar::NodeGrid::over(&domain, resolution);
            let kinds = problem.classify(&grid);
            let inner: Vec<usize> = (0..grid.len()).filter(|&i| kinds[i] == NodeKind::Inner).collect();
            if inner.is_empty() {
                return Err(Error::Unsupported("compact set contains no grid node".into()));
            }
            let h = grid.hx;
            let far = inner.iter().map(|&i| grid.point_of(i).norm()).fold(0.0, f64::max) + h;
            if far + 4.0 * h >= 1.0 {
                return Err(Error::DegenerateCondenser("compact set too close to the unit circle".into()));
            }
            let sol = problem.solve(resolution, &SolverOptions::default())?;
            let radius = 0.5 * (far + 1.0);
            let capacity = sol.laplacian_mass(Complex64::new(0.0, 0.0), radius);
            Ok(ExtremalSolution {
                route: CapacityRoute::Planar,
                capacity,
                certified_lower_bound: 0.0,
                residuals: Residuals {
                    max_positive: sol.values.iter().cloned().fold(0.0, f64::max),
                    max_on_set: 0.0,
                    subharmonic_defect: sol.laplacian_defect,
                },
                infinite: false,
                envelope_mass: capacity,
                lower_bracket: vec![],
                resolution,
                iterations: sol.iterations,
                flux_radius: Some(radius),
                planar: Some(sol),
                envelope: None,
            })
        }
    }
}

/// Both one-variable inequalities: `M_K^{-1} ≤ Cap(K, D)` and
/// `c(K) ≤ 2 exp(−M_K)`, for `K ⊂ {|z| ≤ 0.9}`.
pub fn alexander_taylor_check(k: &PlanarCompact, resolution: usize, tol: f64) -> Result<Vec<VerdictReport>> {
    if k.max_modulus() > 0.9 + 1e-12 {
        return Err(Error::Domain("K must lie in the disc of radius 0.9".into()));
    }
    let label = shape_label(k);
    let m_k = alexander_taylor_sup(k)?;
    let c = logarithmic_capacity(k)?.value;
    if m_k.is_infinite() {
        return Ok(vec![
            VerdictReport::skip("polya-at", &format!("at-cap:{label}"), "polar set: M_K = +inf, Cap(K, D) = 0")
                .with("vacuous", true),
            VerdictReport::inequality("polya-at", &format!("at-c:{label}"), c, 0.0, 0.0).with("m_k", m_k),
        ]);
    }
    let cap = planar_capacity_of_compact(k, resolution)?;
    let first = VerdictReport::inequality("polya-at", &format!("at-cap:{label}"), 1.0 / m_k, cap.capacity, tol)
        .with("m_k", m_k)
        .with("cap_k_d", cap.capacity)
        .with("product_m_cap", m_k * cap.capacity)
        .with("resolution", resolution);
    let second = VerdictReport::inequality("polya-at", &format!("at-c:{label}"), c, 2.0 * (-m_k).exp(), 1e-12)
        .with("m_k", m_k)
        .with("ratio", c / (2.0 * (-m_k).exp()));
    Ok(vec![first, second])
}

/// Is `x` in `E` (closed)? Exposed for diagnostics and tests.
pub fn set_contains(spec: &CondenserSpec, z: &[Complex64]) -> Result<bool> {
    Ok(ResolvedSet::from_spec(&spec.set, spec.domain.dim())?.contains(z, MEMBERSHIP_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn planar_disc_capacity() {
        let spec = CondenserSpec::planar_disc(Domain::unit_disc(), c(0.0, 0.0), 0.5);
        let sol = extremal_function_planar(&spec, 128, 1e-8).unwrap();
        let want = 1.0 / 2f64.ln();
        assert!((sol.capacity - want).abs() < 0.03 * want, "{}", sol.capacity);
        assert!((sol.certified_lower_bound - want).abs() < 1e-12);
        assert!(sol.residuals.max_positive <= 1e-12);
    }

    #[test]
    fn whole_domain_is_degenerate() {
        let spec = CondenserSpec::planar_disc(Domain::unit_disc(), c(0.0, 0.0), 1.5);
        assert!(matches!(extremal_function_planar(&spec, 64, 1e-8), Err(Error::DegenerateCondenser(_))));
        let spec = CondenserSpec::centered_subpolydisc(2, 1.0);
        assert!(matches!(toric_extremal(&spec, 64), Err(Error::DegenerateCondenser(_))));
    }

    #[test]
    fn single_node_capacity_is_small() {
        let spec = CondenserSpec::new(Domain::unit_disc(), SetSpec::Point { location: vec![c(0.0, 0.0)] });
        let sol = extremal_function_planar(&spec, 128, 1e-8).unwrap();
        assert!(sol.capacity > 0.0 && sol.capacity <= 0.3, "{}", sol.capacity);
        assert_eq!(sol.certified_lower_bound, 0.0);
    }

    #[test]
    fn toric_subpolydisc_closed_form() {
        let sol = toric_extremal(&CondenserSpec::centered_subpolydisc(2, 0.3), 64).unwrap();
        let want = (1.0 / 0.3f64).ln().powi(-2);
        assert!((sol.capacity - want).abs() < 1e-14);
        let env = sol.envelope.unwrap();
        let z = [c(0.1, 0.0), c(0.5, 0.0)];
        let expect = (0.5f64.ln() / (1.0 / 0.3f64).ln()).max(-1.0);
        assert!((env.extremal_value(&z) - expect).abs() < 1e-14);
    }

    #[test]
    fn toric_sampled_route_matches_the_profile_form() {
        // {log|z1| ≤ log r, log|z2| ≤ log r} given as a profile
        let r: f64 = 0.3;
        let spec = CondenserSpec::new(
            Domain::unit_polydisc(2),
            SetSpec::ToricProfile { normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]], offsets: vec![r.ln(), r.ln()] },
        );
        let sol = toric_extremal(&spec, 64).unwrap();
        let want = (1.0 / r).ln().powi(-2);
        assert!((sol.capacity - want).abs() < 1e-9 * want, "{} vs {want}", sol.capacity);
        assert!(sol.certified_lower_bound <= sol.capacity);
    }

    #[test]
    fn toric_ball_lies_between_inscribed_and_circumscribed_polydiscs() {
        let model = PshModel::radial_log(2, 1.0).unwrap();
        let spec = CondenserSpec::new(Domain::unit_polydisc(2), SetSpec::Sublevel { model: model.to_spec(), s: 1.0 });
        let sol = toric_extremal(&spec, 128).unwrap();
        let r_out: f64 = (-1.0f64).exp();
        let r_in = r_out / 2f64.sqrt();
        let lo = (1.0 / r_in).ln().powi(-2);
        let hi = (1.0 / r_out).ln().powi(-2);
        assert!(sol.capacity > lo && sol.capacity < hi, "{lo} < {} < {hi}", sol.capacity);
    }

    #[test]
    fn slab_reports_infinite_capacity() {
        let spec = CondenserSpec::new(
            Domain::unit_polydisc(2),
            SetSpec::Subpolydisc { center: None, radii: vec![0.5, 1.0] },
        );
        let sol = toric_extremal(&spec, 64).unwrap();
        assert!(sol.infinite && sol.capacity.is_infinite());
        assert_eq!(sol.envelope_mass, 0.0);
        assert!(sol.lower_bracket.windows(2).all(|w| w[1].1 > w[0].1));
        let profile = CondenserSpec::new(
            Domain::unit_polydisc(2),
            SetSpec::ToricProfile { normals: vec![vec![1.0, 0.0]], offsets: vec![0.5f64.ln()] },
        );
        assert!(toric_extremal(&profile, 64).unwrap().infinite);
    }

    #[test]
    fn candidate_bounds() {
        let r: f64 = 0.4;
        let spec = CondenserSpec::planar_disc(Domain::unit_disc(), c(0.0, 0.0), r);
        let lam = (1.0 / r).ln();
        let cand = PshModel::truncated_log(1, 1.0 / lam, 1.0).unwrap();
        let lb = capacity_lower_bound(&spec, &cand).unwrap();
        assert!((lb - 1.0 / lam).abs() < 1e-12, "{lb}");
        assert_eq!(capacity_lower_bound(&spec, &PshModel::constant(1, 0.0).unwrap()).unwrap(), 0.0);
        assert_eq!(capacity_lower_bound(&spec, &PshModel::constant(1, -1.0).unwrap()).unwrap(), 0.0);
        let bad = PshModel::radial_log(1, 1.0).unwrap();
        assert!(matches!(capacity_lower_bound(&spec, &bad), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn log_capacity_closed_forms() {
        let d = logarithmic_capacity(&PlanarCompact::Disc { center: c(0.2, 0.0), radius: 0.3 }).unwrap();
        assert_eq!(d.value, 0.3);
        assert!(d.transfinite_monotone, "{:?}", d.transfinite);
        assert!(d.transfinite.iter().all(|(_, v)| *v >= 0.3 - 1e-9));
        let s = logarithmic_capacity(&PlanarCompact::Segment { a: c(-1.0, 0.0), b: c(1.0, 0.0) }).unwrap();
        assert_eq!(s.value, 0.5);
        let last = s.transfinite.last().unwrap().1;
        assert!(last > 0.5 && last < 0.7, "{last}");
        assert!(s.transfinite_monotone);
        assert_eq!(logarithmic_capacity(&PlanarCompact::Point { at: c(0.0, 0.0) }).unwrap().value, 0.0);
    }

    #[test]
    fn charge_simulation_recovers_a_single_disc() {
        let u = PlanarCompact::DiscUnion { discs: vec![(c(0.1, 0.2), 0.35)] };
        let v = logarithmic_capacity(&u).unwrap();
        assert!((v.value - 0.35).abs() < 1e-10, "{}", v.value);
    }

    #[test]
    fn two_discs_need_capacity_above_sqrt2_r() {
        let r = 0.2;
        let u = PlanarCompact::DiscUnion { discs: vec![(c(-0.5, 0.0), r), (c(0.5, 0.0), r)] };
        let v = logarithmic_capacity(&u).unwrap();
        assert!(v.value >= 2f64.sqrt() * r, "{}", v.value);
        assert!(v.potential_residual < 1e-8);
        // d_k decreases towards c(K) from above
        assert!(v.transfinite.last().unwrap().1 >= v.value);
        assert!(polya_check(&u).unwrap().passed());
    }

    #[test]
    fn polya_equality_for_discs() {
        let r = polya_check(&PlanarCompact::Disc { center: c(0.0, 0.0), radius: 0.7 }).unwrap();
        assert_eq!(r.margin, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn segment_green_sup() {
        let a = 0.5;
        let m = alexander_taylor_sup(&PlanarCompact::Segment { a: c(-a, 0.0), b: c(a, 0.0) }).unwrap();
        assert!((m - (1.0f64 / a).asinh()).abs() < 1e-9, "{m}");
    }

    #[test]
    fn alexander_taylor_on_a_disc() {
        let k = PlanarCompact::Disc { center: c(0.0, 0.0), radius: 0.5 };
        let reports = alexander_taylor_check(&k, 128, 0.03).unwrap();
        assert!(reports.iter().all(|r| r.passed()));
        let r = reports[1].diagnostics.get("ratio").cloned();
        assert_eq!(r, Some(crate::report::Diag::Num(0.5)));
        let p = alexander_taylor_check(&PlanarCompact::Point { at: c(0.1, 0.0) }, 64, 0.03).unwrap();
        assert!(matches!(p[0].verdict, crate::report::Verdict::Skip(_)));
    }
}
