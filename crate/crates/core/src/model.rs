//! Explicit plurisubharmonic model families with closed-form Monge-Ampère data.
//!
//! Every model is non-positive on its reference domain. The normalization is
//! `dd^c = (i/π) ∂∂̄`, so that `(dd^c log|z|)^n` is the unit Dirac mass at 0.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{factorial, Domain};
use crate::error::{Error, Result};
use crate::newton::NewtonPolygon;

const BOUNDARY_SLACK: f64 = 1e-12;

/// Family tag, as used in the JSON model specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyKind {
    RadialLog,
    ToricMaxLog,
    TruncatedLog,
    SeriesMaxLog,
    SmoothRadial,
    ProductMaxLog,
    Constant,
}

/// Family-specific parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `μ log|Φ_a(z)|` on the unit ball, where `Φ_a` is the ball automorphism
    /// exchanging `a` and 0 (so `μ log|z|` when the pole is the origin).
    RadialLog { weight: f64, pole: Vec<Complex64> },
    /// `max_j a_j log|z_j|` on the unit polydisc.
    ToricMaxLog { weights: Vec<f64> },
    /// `max(μ log‖z‖_∞, −M)` on the unit polydisc.
    TruncatedLog { weight: f64, depth: f64 },
    /// `λ Σ_{k=1}^{K} max(log|z|, k^{-4} log|ζ|)` on the bidisc.
    SeriesMaxLog { terms: usize, scale: f64 },
    /// `c (|z|² − 1)` on the unit ball.
    SmoothRadial { scale: f64 },
    /// `max(a log‖z‖_∞, b log|ζ|)` on `D^{m} × D`, `ζ` the last coordinate.
    ProductMaxLog { z_weight: f64, zeta_weight: f64 },
    /// A constant `v ≤ 0` on the unit polydisc.
    Constant { value: f64 },
}

/// How a model depends on its variables; drives the choice of quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Function of the Euclidean norm `|z|`.
    Radial,
    /// Function of `(|z_1|, …, |z_n|)`.
    Toric,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PshModel {
    dimension: usize,
    family: Family,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub location: Vec<Complex64>,
    pub mass: f64,
}

/// Diffuse parts of a Monge-Ampère measure that the catalog knows exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum DiffusePiece {
    /// Rotation-invariant probability on `{|z_j| = radii_j}` times `mass`.
    Torus { radii: Vec<f64>, mass: f64 },
    /// Constant density on the centered ball of the given radius.
    UniformBall { radius: f64, mass: f64 },
}

impl DiffusePiece {
    pub fn mass(&self) -> f64 {
        match self {
            DiffusePiece::Torus { mass, .. } | DiffusePiece::UniformBall { mass, .. } => *mass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureSummary {
    pub total_mass: f64,
    pub atoms: Vec<Atom>,
    pub has_diffuse_part: bool,
    pub diffuse: Vec<DiffusePiece>,
}

impl MeasureSummary {
    fn empty() -> Self {
        MeasureSummary { total_mass: 0.0, atoms: vec![], has_diffuse_part: false, diffuse: vec![] }
    }

    fn atom(location: Vec<Complex64>, mass: f64) -> Self {
        MeasureSummary {
            total_mass: mass,
            atoms: vec![Atom { location, mass }],
            has_diffuse_part: false,
            diffuse: vec![],
        }
    }

    fn diffuse(piece: DiffusePiece) -> Self {
        MeasureSummary {
            total_mass: piece.mass(),
            atoms: vec![],
            has_diffuse_part: true,
            diffuse: vec![piece],
        }
    }
}

/// JSON form `{"family": "...", "dimension": n, "params": {...}}`.
///
/// Parameters per family:
/// - `RadialLog`: `weight`, optional `pole` as a list of `[re, im]`
/// - `ToricMaxLog`: `weights` (one per coordinate)
/// - `TruncatedLog`: `weight`, `depth`
/// - `SeriesMaxLog`: `terms`, optional `scale` (default 1); dimension 2
/// - `SmoothRadial`: `scale`
/// - `ProductMaxLog`: `z_weight`, `zeta_weight`; dimension ≥ 2
/// - `Constant`: `value`
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: FamilyKind,
    pub dimension: usize,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

fn zero_point(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn sup_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm()).fold(0.0, f64::max)
}

fn euclid_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()
}

fn is_origin(z: &[Complex64]) -> bool {
    z.iter().all(|w| w.norm() <= 1e-12)
}

/// `max` that treats `-inf` correctly and never produces NaN from `-inf * 0`.
fn scaled_log(weight: f64, r: f64) -> f64 {
    if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        weight * r.ln()
    }
}

impl PshModel {
    pub fn new(dimension: usize, family: Family) -> Result<Self> {
        let m = PshModel { dimension, family };
        m.validate()?;
        Ok(m)
    }

    pub fn radial_log(n: usize, weight: f64) -> Result<Self> {
        Self::new(n, Family::RadialLog { weight, pole: zero_point(n) })
    }

    pub fn toric_max_log(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights.len(), Family::ToricMaxLog { weights })
    }

    pub fn truncated_log(n: usize, weight: f64, depth: f64) -> Result<Self> {
        Self::new(n, Family::TruncatedLog { weight, depth })
    }

    pub fn series_max_log(terms: usize) -> Result<Self> {
        Self::new(2, Family::SeriesMaxLog { terms, scale: 1.0 })
    }

    pub fn smooth_radial(n: usize, scale: f64) -> Result<Self> {
        Self::new(n, Family::SmoothRadial { scale })
    }

    /// `max(a log‖z‖_∞, b log|ζ|)` with `z ∈ D^{n-1}`.
    pub fn product_max_log(n: usize, z_weight: f64, zeta_weight: f64) -> Result<Self> {
        Self::new(n, Family::ProductMaxLog { z_weight, zeta_weight })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, Family::Constant { value })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn kind(&self) -> FamilyKind {
        match self.family {
            Family::RadialLog { .. } => FamilyKind::RadialLog,
            Family::ToricMaxLog { .. } => FamilyKind::ToricMaxLog,
            Family::TruncatedLog { .. } => FamilyKind::TruncatedLog,
            Family::SeriesMaxLog { .. } => FamilyKind::SeriesMaxLog,
            Family::SmoothRadial { .. } => FamilyKind::SmoothRadial,
            Family::ProductMaxLog { .. } => FamilyKind::ProductMaxLog,
            Family::Constant { .. } => FamilyKind::Constant,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dimension;
        let bad = |msg: &str| Err(Error::InvalidModel(msg.to_string()));
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if n == 0 {
            return bad("dimension must be at least 1");
        }
        match &self.family {
            Family::RadialLog { weight, pole } => {
                if !pos(*weight) {
                    return bad("weight must be positive");
                }
                if pole.len() != n || euclid_norm(pole) >= 1.0 {
                    return bad("pole must lie strictly inside the unit ball");
                }
            }
            Family::ToricMaxLog { weights } => {
                if weights.len() != n || !weights.iter().all(|w| pos(*w)) {
                    return bad("toric weights must be positive, one per coordinate");
                }
            }
            Family::TruncatedLog { weight, depth } => {
                if !pos(*weight) || !pos(*depth) {
                    return bad("weight and truncation depth must be positive");
                }
            }
            Family::SeriesMaxLog { terms, scale } => {
                if n != 2 || *terms < 1 || !pos(*scale) {
                    return bad("series model lives on the bidisc with K >= 1 terms");
                }
            }
            Family::SmoothRadial { scale } => {
                if !pos(*scale) {
                    return bad("scale must be positive");
                }
            }
            Family::ProductMaxLog { z_weight, zeta_weight } => {
                if n < 2 || !pos(*z_weight) || !pos(*zeta_weight) {
                    return bad("product model needs dimension >= 2 and positive weights");
                }
            }
            Family::Constant { value } => {
                if !(*value <= 0.0) || !value.is_finite() {
                    return bad("constant must be finite and non-positive");
                }
            }
        }
        Ok(())
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let n = spec.dimension;
        let p = &spec.params;
        let num = |key: &str| -> Result<f64> {
            p.get(key)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| Error::Config(format!("{:?}: missing numeric param '{key}'", spec.family)))
        };
        let family = match spec.family {
            FamilyKind::RadialLog => {
                let pole = match p.get("pole") {
                    None => zero_point(n),
                    Some(v) => {
                        let pairs: Vec<[f64; 2]> = serde_json::from_value(v.clone())?;
                        pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
                    }
                };
                Family::RadialLog { weight: num("weight")?, pole }
            }
            FamilyKind::ToricMaxLog => {
                let weights: Vec<f64> = serde_json::from_value(
                    p.get("weights").cloned().ok_or_else(|| Error::Config("missing 'weights'".into()))?,
                )?;
                Family::ToricMaxLog { weights }
            }
            FamilyKind::TruncatedLog => Family::TruncatedLog { weight: num("weight")?, depth: num("depth")? },
            FamilyKind::SeriesMaxLog => Family::SeriesMaxLog {
                terms: num("terms")? as usize,
                scale: p.get("scale").and_then(|v| v.as_f64()).unwrap_or(1.0),
            },
            FamilyKind::SmoothRadial => Family::SmoothRadial { scale: num("scale")? },
            FamilyKind::ProductMaxLog => Family::ProductMaxLog {
                z_weight: num("z_weight")?,
                zeta_weight: num("zeta_weight")?,
            },
            FamilyKind::Constant => Family::Constant { value: num("value")? },
        };
        Self::new(n, family)
    }

    pub fn to_spec(&self) -> ModelSpec {
        use serde_json::json;
        let params = match &self.family {
            Family::RadialLog { weight, pole } => json!({
                "weight": weight,
                "pole": pole.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            }),
            Family::ToricMaxLog { weights } => json!({ "weights": weights }),
            Family::TruncatedLog { weight, depth } => json!({ "weight": weight, "depth": depth }),
            Family::SeriesMaxLog { terms, scale } => json!({ "terms": terms, "scale": scale }),
            Family::SmoothRadial { scale } => json!({ "scale": scale }),
            Family::ProductMaxLog { z_weight, zeta_weight } => {
                json!({ "z_weight": z_weight, "zeta_weight": zeta_weight })
            }
            Family::Constant { value } => json!({ "value": value }),
        };
        ModelSpec {
            family: self.kind(),
            dimension: self.dimension,
            params: params.as_object().cloned().unwrap_or_default(),
        }
    }

    /// `t · φ`, for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        let family = match &self.family {
            Family::RadialLog { weight, pole } => Family::RadialLog { weight: t * weight, pole: pole.clone() },
            Family::ToricMaxLog { weights } => {
                Family::ToricMaxLog { weights: weights.iter().map(|w| t * w).collect() }
            }
            Family::TruncatedLog { weight, depth } => Family::TruncatedLog { weight: t * weight, depth: t * depth },
            Family::SeriesMaxLog { terms, scale } => Family::SeriesMaxLog { terms: *terms, scale: t * scale },
            Family::SmoothRadial { scale } => Family::SmoothRadial { scale: t * scale },
            Family::ProductMaxLog { z_weight, zeta_weight } => Family::ProductMaxLog {
                z_weight: t * z_weight,
                zeta_weight: t * zeta_weight,
            },
            Family::Constant { value } => Family::Constant { value: t * value },
        };
        Self::new(self.dimension, family)
    }

    pub fn reference_domain(&self) -> Domain {
        match self.family {
            Family::RadialLog { .. } | Family::SmoothRadial { .. } => Domain::unit_ball(self.dimension),
            _ => Domain::unit_polydisc(self.dimension),
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        match &self.family {
            Family::RadialLog { pole, .. } if !is_origin(pole) => Symmetry::General,
            Family::RadialLog { .. } | Family::SmoothRadial { .. } | Family::Constant { .. } => Symmetry::Radial,
            _ if self.dimension == 1 => Symmetry::Radial,
            _ => Symmetry::Toric,
        }
    }

    /// Whether slices `z ↦ φ(z, ζ)` (ζ the last coordinate) are functions of
    /// a norm of `z`, so that product-domain slice formulas apply.
    pub fn has_radial_slices(&self) -> bool {
        if self.dimension < 2 {
            return false;
        }
        match &self.family {
            Family::SeriesMaxLog { .. } | Family::ProductMaxLog { .. } | Family::Constant { .. } => true,
            Family::TruncatedLog { .. } => true,
            Family::ToricMaxLog { weights } => weights[..self.dimension - 1].windows(2).all(|w| w[0] == w[1]),
            _ => false,
        }
    }

    /// Value at `z`; `-inf` only at declared poles.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<f64> {
        if z.len() != self.dimension {
            return Err(Error::Domain(format!(
                "expected a point in C^{}, got C^{}",
                self.dimension,
                z.len()
            )));
        }
        let dom = self.reference_domain();
        if !dom.contains(z, BOUNDARY_SLACK) {
            return Err(Error::Domain(format!("{z:?} is outside the reference domain")));
        }
        // rounding on the boundary can push logs of norms slightly above 0
        Ok(self.evaluate_unchecked(z).min(0.0))
    }

    /// Evaluation of the defining formula without the domain check. Outside
    /// the reference domain this is the natural extension (possibly positive),
    /// which finite-difference stencils rely on.
    pub fn evaluate_unchecked(&self, z: &[Complex64]) -> f64 {
        match &self.family {
            Family::RadialLog { weight, pole } => {
                if is_origin(pole) {
                    scaled_log(*weight, euclid_norm(z))
                } else {
                    let a2: f64 = pole.iter().map(|a| a.norm_sqr()).sum();
                    let z2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
                    let inner: Complex64 = z.iter().zip(pole).map(|(w, a)| w * a.conj()).sum();
                    let q = 1.0 - (1.0 - a2) * (1.0 - z2) / (Complex64::new(1.0, 0.0) - inner).norm_sqr();
                    scaled_log(*weight, q.max(0.0).sqrt())
                }
            }
            Family::ToricMaxLog { weights } => weights
                .iter()
                .zip(z)
                .map(|(a, w)| scaled_log(*a, w.norm()))
                .fold(f64::NEG_INFINITY, f64::max),
            Family::TruncatedLog { weight, depth } => scaled_log(*weight, sup_norm(z)).max(-depth),
            Family::SeriesMaxLog { terms, scale } => {
                let lz = z[0].norm().ln();
                let lzeta = z[1].norm().ln();
                let s: f64 = (1..=*terms)
                    .map(|k| {
                        let b = (k as f64).powi(-4);
                        lz.max(if lzeta == f64::NEG_INFINITY { lzeta } else { b * lzeta })
                    })
                    .sum();
                scale * s
            }
            Family::SmoothRadial { scale } => scale * (z.iter().map(|w| w.norm_sqr()).sum::<f64>() - 1.0),
            Family::ProductMaxLog { z_weight, zeta_weight } => {
                let m = self.dimension - 1;
                scaled_log(*z_weight, sup_norm(&z[..m])).max(scaled_log(*zeta_weight, z[m].norm()))
            }
            Family::Constant { value } => *value,
        }
    }

    /// Newton polygon at the origin for two-variable toric max-log models.
    pub fn newton_polygon(&self) -> Option<NewtonPolygon> {
        if self.dimension != 2 {
            return None;
        }
        match &self.family {
            Family::ToricMaxLog { weights } => Some(NewtonPolygon::max_log(weights[0], weights[1])),
            Family::ProductMaxLog { z_weight, zeta_weight } => Some(NewtonPolygon::max_log(*z_weight, *zeta_weight)),
            Family::RadialLog { weight, pole } if is_origin(pole) => {
                // log|z| and log max|z_j| share the same Newton polygon.
                Some(NewtonPolygon::max_log(*weight, *weight))
            }
            Family::SeriesMaxLog { terms, scale } => {
                let mut p = NewtonPolygon::zero();
                for k in 1..=*terms {
                    p = p.minkowski_sum(&NewtonPolygon::max_log(1.0, (k as f64).powi(-4)));
                }
                Some(p.scaled(*scale))
            }
            Family::Constant { .. } => Some(NewtonPolygon::zero()),
            _ => None,
        }
    }

    /// Exact Monge-Ampère measure on the reference domain.
    pub fn closed_form_ma_mass(&self) -> MeasureSummary {
        let n = self.dimension;
        let origin = zero_point(n);
        match &self.family {
            Family::RadialLog { weight, pole } => MeasureSummary::atom(pole.clone(), weight.powi(n as i32)),
            Family::ToricMaxLog { weights } => MeasureSummary::atom(origin, weights.iter().product()),
            Family::TruncatedLog { weight, depth } => MeasureSummary::diffuse(DiffusePiece::Torus {
                radii: vec![(-depth / weight).exp(); n],
                mass: weight.powi(n as i32),
            }),
            Family::SeriesMaxLog { terms, scale } => {
                let m: f64 = (1..=*terms).map(|k| (2 * k - 1) as f64 * (k as f64).powi(-4)).sum();
                MeasureSummary::atom(origin, scale * scale * m)
            }
            Family::SmoothRadial { scale } => MeasureSummary::diffuse(DiffusePiece::UniformBall {
                radius: 1.0,
                mass: (2.0 * scale).powi(n as i32),
            }),
            Family::ProductMaxLog { z_weight, zeta_weight } => {
                MeasureSummary::atom(origin, z_weight.powi(n as i32 - 1) * zeta_weight)
            }
            Family::Constant { .. } => MeasureSummary::empty(),
        }
    }

    /// Mass of the single atom, when the measure is one atom.
    pub fn atom_mass(&self) -> Option<(Vec<Complex64>, f64)> {
        let m = self.closed_form_ma_mass();
        match (m.atoms.as_slice(), m.has_diffuse_part) {
            ([a], false) => Some((a.location.clone(), a.mass)),
            _ => None,
        }
    }

    /// Exact volume of `{φ ≤ −s}` in the reference domain, when known.
    pub fn closed_form_sublevel_volume(&self, s: f64) -> Option<f64> {
        if !(s > 0.0) {
            return None;
        }
        let n = self.dimension;
        let ni = n as i32;
        match &self.family {
            Family::RadialLog { weight, pole } => {
                let r = (-s / weight).exp();
                if is_origin(pole) {
                    Some(PI.powi(ni) / factorial(n) * r.powi(2 * ni))
                } else if n == 1 {
                    // Möbius preimage of the disc of radius r is a disc.
                    let a2 = pole[0].norm_sqr();
                    let rho = r * (1.0 - a2) / (1.0 - a2 * r * r);
                    Some(PI * rho * rho)
                } else {
                    None
                }
            }
            Family::ToricMaxLog { weights } => {
                Some(PI.powi(ni) * weights.iter().map(|a| (-2.0 * s / a).exp()).product::<f64>())
            }
            Family::TruncatedLog { weight, depth } => {
                if s > *depth {
                    Some(0.0)
                } else {
                    Some(PI.powi(ni) * (-2.0 * n as f64 * s / weight).exp())
                }
            }
            Family::SeriesMaxLog { .. } => None,
            Family::SmoothRadial { scale } => {
                if s >= *scale {
                    Some(0.0)
                } else {
                    Some(PI.powi(ni) / factorial(n) * (1.0 - s / scale).powi(ni))
                }
            }
            Family::ProductMaxLog { z_weight, zeta_weight } => Some(
                PI.powi(ni) * (-2.0 * (n - 1) as f64 * s / z_weight).exp() * (-2.0 * s / zeta_weight).exp(),
            ),
            Family::Constant { value } => Some(if *value <= -s { PI.powi(ni) } else { 0.0 }),
        }
    }

    /// Lelong number at `a`.
    pub fn lelong_number(&self, a: &[Complex64]) -> Result<f64> {
        if a.len() != self.dimension || !self.reference_domain().contains_strictly(a) {
            return Err(Error::Domain(format!("{a:?} is not an interior point")));
        }
        let at_origin = is_origin(a);
        Ok(match &self.family {
            Family::RadialLog { weight, pole } => {
                let d: f64 = a.iter().zip(pole).map(|(x, p)| (x - p).norm_sqr()).sum();
                if d.sqrt() <= 1e-12 {
                    *weight
                } else {
                    0.0
                }
            }
            Family::ToricMaxLog { weights } if at_origin => weights.iter().cloned().fold(f64::INFINITY, f64::min),
            Family::SeriesMaxLog { terms, scale } if at_origin => {
                scale * (1..=*terms).map(|k| (k as f64).powi(-4)).sum::<f64>()
            }
            Family::ProductMaxLog { z_weight, zeta_weight } if at_origin => z_weight.min(*zeta_weight),
            _ => 0.0,
        })
    }

    /// Complex singularity exponent `c_a(φ)`; `+inf` where φ is bounded.
    pub fn singularity_exponent(&self, a: &[Complex64]) -> Result<f64> {
        if self.lelong_number(a)? == 0.0 {
            return Ok(f64::INFINITY);
        }
        let n = self.dimension as f64;
        Ok(match &self.family {
            Family::RadialLog { weight, .. } => n / weight,
            Family::ToricMaxLog { weights } => weights.iter().map(|w| 1.0 / w).sum(),
            Family::ProductMaxLog { z_weight, zeta_weight } => (n - 1.0) / z_weight + 1.0 / zeta_weight,
            Family::SeriesMaxLog { .. } => {
                1.0 / self.newton_polygon().expect("series model is two-dimensional").diagonal_threshold()
            }
            _ => f64::INFINITY,
        })
    }

    /// Exact `∫ e^{−2φ} dV` over the reference domain: `Some(+inf)` when
    /// divergent, `None` when no closed form is tabulated.
    pub fn closed_form_exp_integral(&self) -> Option<f64> {
        let n = self.dimension;
        let nf = n as f64;
        let pin = PI.powi(n as i32);
        match &self.family {
            Family::RadialLog { weight, pole } if is_origin(pole) => {
                if *weight >= nf {
                    Some(f64::INFINITY)
                } else {
                    Some(pin / (factorial(n - 1) * (nf - weight)))
                }
            }
            Family::ToricMaxLog { weights } => toric_exp_integral(weights),
            Family::ProductMaxLog { z_weight, zeta_weight } => {
                let mut w = vec![*z_weight; n - 1];
                w.push(*zeta_weight);
                toric_exp_integral(&w)
            }
            Family::TruncatedLog { weight, depth } => {
                // 1-D reduction in ρ = ‖z‖_∞, whose law on D^n has density 2nπ^n ρ^{2n-1}.
                let rho = (-depth / weight).exp();
                let inner = rho.powi(2 * n as i32) * (2.0 * depth).exp() / (2.0 * nf);
                let outer = if (nf - weight).abs() < 1e-14 {
                    depth / weight
                } else {
                    (1.0 - rho.powf(2.0 * nf - 2.0 * weight)) / (2.0 * nf - 2.0 * weight)
                };
                Some(2.0 * nf * pin * (inner + outer))
            }
            Family::SmoothRadial { scale } => {
                let x = 2.0 * scale;
                let mut partial = 0.0;
                let mut term = 1.0;
                for k in 0..n {
                    if k > 0 {
                        term *= x / k as f64;
                    }
                    partial += term;
                }
                // e^{2c} π^n γ(n, 2c) / ((n-1)! (2c)^n)
                Some(pin * (x.exp() - partial) / x.powi(n as i32))
            }
            Family::Constant { value } => Some(pin * (-2.0 * value).exp()),
            _ => None,
        }
    }
}

/// `∫_{D^n} e^{−2 max_j a_j log|z_j|} = π^n S/(S−1)`, `S = Σ 1/a_j`.
fn toric_exp_integral(weights: &[f64]) -> Option<f64> {
    let s: f64 = weights.iter().map(|a| 1.0 / a).sum();
    let pin = PI.powi(weights.len() as i32);
    if s <= 1.0 {
        Some(f64::INFINITY)
    } else {
        Some(pin * s / (s - 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let m = PshModel::radial_log(1, 1.0).unwrap();
        assert_eq!(m.evaluate(&[c(0.0, 0.0)]).unwrap(), f64::NEG_INFINITY);
        let t = PshModel::toric_max_log(vec![1.0, 1.0]).unwrap();
        let e = std::f64::consts::E;
        let v = t.evaluate(&[c(1.0 / e, 0.0), c(1.0 / (e * e), 0.0)]).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        let s = PshModel::new(2, Family::SeriesMaxLog { terms: 2, scale: 1.0 }).unwrap();
        assert_eq!(s.evaluate(&[c(1.0, 0.0), c(0.4, 0.0)]).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_outside_domain_is_an_error() {
        let m = PshModel::radial_log(2, 1.0).unwrap();
        assert!(matches!(m.evaluate(&[c(0.9, 0.0), c(0.9, 0.0)]), Err(Error::Domain(_))));
        assert!(m.evaluate(&[c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn off_center_pole_is_nonpositive_and_singular_at_the_pole() {
        let a = vec![c(0.3, -0.2), c(0.1, 0.0)];
        let m = PshModel::new(2, Family::RadialLog { weight: 1.5, pole: a.clone() }).unwrap();
        assert_eq!(m.evaluate(&a).unwrap(), f64::NEG_INFINITY);
        for z in [[c(0.0, 0.0), c(0.5, 0.5)], [c(-0.7, 0.0), c(0.0, 0.1)]] {
            assert!(m.evaluate(&z).unwrap() <= 0.0);
        }
        assert_eq!(m.lelong_number(&a).unwrap(), 1.5);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(PshModel::radial_log(1, 0.0).is_err());
        assert!(PshModel::toric_max_log(vec![1.0, -1.0]).is_err());
        assert!(PshModel::truncated_log(1, 1.0, 0.0).is_err());
        assert!(PshModel::new(1, Family::RadialLog { weight: 1.0, pole: vec![c(1.0, 0.0)] }).is_err());
        assert!(PshModel::constant(1, 0.5).is_err());
    }

    #[test]
    fn ma_masses() {
        let m = PshModel::radial_log(3, 0.5).unwrap().closed_form_ma_mass();
        assert_eq!(m.total_mass, 0.125);
        assert_eq!(m.atoms.len(), 1);
        let t = PshModel::toric_max_log(vec![2.0, 3.0]).unwrap().closed_form_ma_mass();
        assert_eq!(t.total_mass, 6.0);
        let s = PshModel::smooth_radial(1, 1.0).unwrap().closed_form_ma_mass();
        assert_eq!(s.total_mass, 2.0);
        assert!(s.has_diffuse_part && s.atoms.is_empty());
    }

    #[test]
    fn series_mass_matches_newton_covolume() {
        for k in [1usize, 2, 5, 50] {
            let m = PshModel::new(2, Family::SeriesMaxLog { terms: k, scale: 1.0 }).unwrap();
            let closed = m.closed_form_ma_mass().total_mass;
            let newton = m.newton_polygon().unwrap().mass();
            assert!((closed - newton).abs() < 1e-12 * closed, "K={k}: {closed} vs {newton}");
        }
    }

    #[test]
    fn sublevel_volumes() {
        let r = PshModel::radial_log(2, 1.0).unwrap();
        let want = PI * PI / 2.0 * (-4.0f64).exp();
        assert!((r.closed_form_sublevel_volume(1.0).unwrap() - want).abs() < 1e-15);
        let t = PshModel::toric_max_log(vec![1.0, 2.0]).unwrap();
        let want = PI * PI * (-2.0f64).exp() * (-1.0f64).exp();
        assert!((t.closed_form_sublevel_volume(1.0).unwrap() - want).abs() < 1e-15);
        let tr = PshModel::truncated_log(1, 1.0, 2.0).unwrap();
        assert_eq!(tr.closed_form_sublevel_volume(2.5), Some(0.0));
        assert_eq!(PshModel::series_max_log(3).unwrap().closed_form_sublevel_volume(1.0), None);
    }

    #[test]
    fn lelong_numbers() {
        let o = [c(0.0, 0.0), c(0.0, 0.0)];
        let t = PshModel::toric_max_log(vec![1.0, 2.0]).unwrap();
        assert_eq!(t.lelong_number(&o).unwrap(), 1.0);
        assert_eq!(t.lelong_number(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap(), 0.0);
        assert_eq!(PshModel::radial_log(2, 0.7).unwrap().lelong_number(&o).unwrap(), 0.7);
    }

    #[test]
    fn singularity_exponents() {
        let o = [c(0.0, 0.0), c(0.0, 0.0)];
        let t = PshModel::toric_max_log(vec![1.0, 2.0]).unwrap();
        assert!((t.singularity_exponent(&o).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(PshModel::radial_log(2, 0.5).unwrap().singularity_exponent(&o).unwrap(), 4.0);
    }

    #[test]
    fn exp_integrals() {
        let r = PshModel::radial_log(1, 0.5).unwrap();
        assert!((r.closed_form_exp_integral().unwrap() - 2.0 * PI).abs() < 1e-14);
        assert_eq!(PshModel::radial_log(2, 2.0).unwrap().closed_form_exp_integral(), Some(f64::INFINITY));
        let z = PshModel::constant(2, 0.0).unwrap();
        assert!((z.closed_form_exp_integral().unwrap() - PI * PI).abs() < 1e-14);
        // toric in one variable agrees with the radial formula
        let t = PshModel::toric_max_log(vec![0.5]).unwrap();
        assert!((t.closed_form_exp_integral().unwrap() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn truncated_exp_integral_is_consistent_with_its_limit() {
        // M -> inf recovers the toric value with equal weights
        let m = PshModel::truncated_log(2, 1.0, 40.0).unwrap();
        let t = PshModel::toric_max_log(vec![1.0, 1.0]).unwrap();
        let (a, b) = (m.closed_form_exp_integral().unwrap(), t.closed_form_exp_integral().unwrap());
        assert!((a - b).abs() < 1e-9 * b, "{a} vs {b}");
    }

    #[test]
    fn spec_round_trip() {
        let m = PshModel::toric_max_log(vec![1.0, 2.5]).unwrap();
        let json = serde_json::to_string(&m.to_spec()).unwrap();
        let back = PshModel::from_spec(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn scaling_multiplies_values() {
        let m = PshModel::truncated_log(2, 0.7, 1.3).unwrap();
        let s = m.scaled(3.0).unwrap();
        let z = [c(0.2, 0.1), c(-0.3, 0.0)];
        assert!((s.evaluate(&z).unwrap() - 3.0 * m.evaluate(&z).unwrap()).abs() < 1e-14);
    }
}
