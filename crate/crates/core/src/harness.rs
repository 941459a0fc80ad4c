//! Verification suites: each binds catalog oracles, numerical routes and
//! bound evaluators into a deterministic list of verdicts.

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    constant_a, constant_c, constant_c_recurrence, critical_bound, i_n_check, integrability_bound,
    singularity_exponent_bounds, slice_cap_bound, vol_cap_bound, volume_bound, BoundInput, SliceExponent,
};
use crate::capacity::{
    alexander_taylor_check, capacity_lower_bound, extremal_function_planar, polya_check, toric_extremal,
    CondenserSpec, PlanarCompact, SetSpec,
};
use crate::domain::{factorial, Domain, DomainKind};
use crate::error::{Error, Result};
use crate::green::{laplace_mass_identity, mixed_energy, mixed_mass_identity, partial_energy, SliceEnergy};
use crate::grid::{exp_neg2_integral, sublevel_volume, VolumeOptions};
use crate::model::{Family, ModelSpec, PshModel};
use crate::quad::integrate_de;
use crate::report::{VerdictReport, SCHEMA_VERSION};

/// Suite names in registry order.
pub const SUITES: [&str; 14] = [
    "constants",
    "thm-4.1",
    "cor-4.2",
    "thm-5.1",
    "cor-5.3",
    "thm-5.4",
    "thm-5.5",
    "lemma-2.2",
    "thm-3.1",
    "thm-3.3",
    "prop-6.1",
    "prop-6.2",
    "prop-6.3",
    "polya-at",
];

/// Operations each suite exercises.
pub const COVERAGE: [(&str, &[&str]); 14] = [
    ("constants", &["bounds::constant_c", "bounds::constant_a"]),
    ("thm-4.1", &["model_catalog::closed_form_sublevel_volume", "grid_field::sublevel_volume", "bounds::volume_bound"]),
    ("cor-4.2", &["model_catalog::closed_form_sublevel_volume", "bounds::volume_bound"]),
    ("thm-5.1", &["grid_field::exp_neg2_integral", "bounds::integrability_bound", "bounds::i_n_check"]),
    ("cor-5.3", &["grid_field::exp_neg2_integral", "bounds::integrability_bound"]),
    ("thm-5.4", &["bounds::critical_bound"]),
    ("thm-5.5", &["grid_field::exp_neg2_integral", "model_catalog::closed_form_exp_integral"]),
    ("lemma-2.2", &["envelope_capacity::extremal_function_planar", "envelope_capacity::toric_extremal", "envelope_capacity::capacity_lower_bound"]),
    ("thm-3.1", &["green_slice::slice_energy_direct", "green_slice::slice_energy_green", "green_slice::laplace_mass_identity"]),
    ("thm-3.3", &["green_slice::mixed_energy"]),
    ("prop-6.1", &["envelope_capacity::toric_extremal", "bounds::vol_cap_bound"]),
    ("prop-6.2", &["envelope_capacity::toric_extremal", "bounds::slice_cap_bound"]),
    ("prop-6.3", &["model_catalog::lelong_number", "model_catalog::singularity_exponent", "bounds::singularity_exponent_bounds"]),
    ("polya-at", &["envelope_capacity::logarithmic_capacity", "envelope_capacity::polya_check", "envelope_capacity::alexander_taylor_check"]),
];

const fn registry_matches_coverage() -> bool {
    let mut i = 0;
    while i < SUITES.len() {
        let (a, b) = (SUITES[i].as_bytes(), COVERAGE[i].0.as_bytes());
        if a.len() != b.len() || COVERAGE[i].1.is_empty() {
            return false;
        }
        let mut j = 0;
        while j < a.len() {
            if a[j] != b[j] {
                return false;
            }
            j += 1;
        }
        i += 1;
    }
    true
}

const _: () = assert!(registry_matches_coverage(), "suite registry and coverage list disagree");

fn default_resolutions() -> Vec<usize> {
    vec![256]
}

fn default_truncations() -> Vec<f64> {
    vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
}

fn default_rel_tol() -> f64 {
    0.05
}

fn default_abs_tol() -> f64 {
    1e-12
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

/// A suite run. Empty `models` selects the suite's default model set.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub suite: String,
    #[serde(default)]
    pub models: Vec<ModelSpec>,
    #[serde(default)]
    pub domain: Option<Domain>,
    #[serde(default = "default_resolutions")]
    pub resolutions: Vec<usize>,
    #[serde(default = "default_truncations")]
    pub truncations: Vec<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_suite(suite: &str) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            models: vec![],
            domain: None,
            resolutions: default_resolutions(),
            truncations: default_truncations(),
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            samples: None,
            seed: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!("unsupported schema_version {}", self.schema_version)));
        }
        if self.suite != "all" && !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::Config(format!("unknown suite '{}'", self.suite)));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.resolutions.is_empty() || self.resolutions.iter().any(|r| *r < 8) {
            return Err(Error::Config("resolutions must be nonempty and at least 8".into()));
        }
        if let Some(d) = &self.domain {
            d.validate()?;
        }
        Ok(())
    }

    fn resolution(&self) -> usize {
        self.resolutions[0]
    }

    fn models_or(&self, defaults: Vec<PshModel>) -> Result<Vec<PshModel>> {
        if self.models.is_empty() {
            Ok(defaults)
        } else {
            self.models.iter().map(PshModel::from_spec).collect()
        }
    }
}

/// Caps the global worker pool at `PPLAB_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("PPLAB_THREADS") {
        let n: usize = v.parse().map_err(|_| Error::Config(format!("PPLAB_THREADS='{v}' is not a count")))?;
        if n == 0 {
            return Err(Error::Config("PPLAB_THREADS must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one suite (or all, in registry order).
pub fn run_suite(config: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    config.validate()?;
    if config.suite == "all" {
        let parts: Vec<Result<Vec<VerdictReport>>> = SUITES
            .par_iter()
            .map(|s| {
                let mut c = config.clone();
                c.suite = (*s).into();
                run_one(&c)
            })
            .collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        return Ok(out);
    }
    run_one(config)
}

fn run_one(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    match c.suite.as_str() {
        "constants" => suite_constants(),
        "thm-4.1" => suite_volume(c, false),
        "cor-4.2" => suite_volume(c, true),
        "thm-5.1" => suite_integrability(c),
        "cor-5.3" => suite_boundary_integrability(c),
        "thm-5.4" => suite_critical(c),
        "thm-5.5" => suite_local_integrability(c),
        "lemma-2.2" => suite_capacity(c),
        "thm-3.1" => suite_slice_energy(c),
        "thm-3.3" => suite_mixed(c),
        "prop-6.1" => suite_vol_cap(c),
        "prop-6.2" => suite_slice_cap(c),
        "prop-6.3" => suite_singularity(c),
        "polya-at" => suite_polya_at(c),
        other => Err(Error::Config(format!("unknown suite '{other}'"))),
    }
}

/// Compact, deterministic label for case ids.
pub fn model_label(m: &PshModel) -> String {
    let spec = m.to_spec();
    let params = serde_json::to_string(&spec.params).unwrap_or_default();
    let kind = serde_json::to_value(spec.family).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    format!("{kind}/n={}{params}", spec.dimension)
}

/// `μ` with `μ^n` the total Monge-Ampère mass.
pub fn mass_root(m: &PshModel) -> f64 {
    m.closed_form_ma_mass().total_mass.powf(1.0 / m.dimension() as f64)
}

fn suite_constants() -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    for n in 1..=8 {
        let (c, r) = (constant_c(n)?, constant_c_recurrence(n)?);
        out.push(
            VerdictReport::check("constants", &format!("c_{n}:closed-form=recurrence"), c == r)
                .with("closed_form", c.to_string())
                .with("recurrence", r.to_string())
                .with("value", c.value()),
        );
    }
    for (name, got, want) in [
        ("c_1=4pi", constant_c(1)?, "4*pi"),
        ("a_1=4pi", constant_a(1)?, "4*pi"),
        ("a_2=64pi^2", constant_a(2)?, "64*pi^2"),
    ] {
        out.push(VerdictReport::check("constants", name, got.to_string() == want).with("exact", got.to_string()));
    }
    Ok(out)
}

fn s_schedule() -> Vec<f64> {
    (1..=10).map(|k| 0.5 * k as f64).collect()
}

fn volume_defaults() -> Result<Vec<PshModel>> {
    let mut v = Vec::new();
    for mu in [0.5, 1.0, 2.0] {
        v.push(PshModel::toric_max_log(vec![mu, mu])?);
    }
    v.push(PshModel::radial_log(2, 1.0)?);
    Ok(v)
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn suite_volume(c: &ExperimentConfig, diameter_form: bool) -> Result<Vec<VerdictReport>> {
    let suite = if diameter_form { "cor-4.2" } else { "thm-4.1" };
    let mut out = Vec::new();
    for m in c.models_or(volume_defaults()?)? {
        let n = m.dimension();
        let domain = c.domain.clone().unwrap_or_else(|| m.reference_domain());
        let mu = mass_root(&m);
        let label = model_label(&m);
        let mut log_v = Vec::new();
        let schedule = s_schedule();
        for &s in &schedule {
            let input = BoundInput::new(n, mu, s, domain.diameter())?;
            let bound = volume_bound(&input, diameter_form)?;
            let exact = if domain == m.reference_domain() { m.closed_form_sublevel_volume(s) } else { None };
            let (computed, tol, source) = match exact {
                Some(v) => (v, 0.0, "closed_form"),
                None => {
                    let opts = VolumeOptions { seed: c.seed, samples: c.samples, ..VolumeOptions::default() };
                    (sublevel_volume(&m, &domain, s, &opts)?.volume, c.rel_tol, "quasi_random")
                }
            };
            log_v.push(computed.ln());
            out.push(
                VerdictReport::inequality(suite, &format!("{label}:s={s}"), computed, bound.value, tol)
                    .with("source", source)
                    .with("mu", mu)
                    .with("diameter", domain.diameter())
                    .with("zero_mass_convention", bound.convention),
            );
        }
        let s = 1.0;
        let opts = VolumeOptions { seed: c.seed, samples: c.samples, ..VolumeOptions::default() };
        let est = sublevel_volume(&m, &domain, s, &opts)?;
        let bound = volume_bound(&BoundInput::new(n, mu, s, domain.diameter())?, diameter_form)?;
        out.push(
            VerdictReport::inequality(suite, &format!("{label}:s={s}:measured"), est.volume, bound.value, c.rel_tol)
                .with("samples", est.samples)
                .with("hits", est.hits)
                .with("seed", est.seed),
        );
        let rate_attained = match m.family() {
            Family::ToricMaxLog { weights } => weights.windows(2).all(|w| w[0] == w[1]),
            Family::RadialLog { pole, .. } => pole.iter().all(|p| p.norm() == 0.0),
            _ => false,
        };
        if !diameter_form && rate_attained && log_v.iter().all(|v| v.is_finite()) {
            let slope = fitted_slope(&schedule, &log_v);
            let want = -2.0 * n as f64 / mu;
            out.push(VerdictReport::equality(suite, &format!("{label}:log-volume-slope"), slope, want, 1e-3));
        }
    }
    Ok(out)
}

fn integrability_defaults() -> Result<Vec<PshModel>> {
    let mut v = Vec::new();
    for mu in [0.25, 0.5, 0.9] {
        v.push(PshModel::radial_log(1, mu)?);
    }
    for mu in [0.5, 1.0, 1.5] {
        v.push(PshModel::toric_max_log(vec![mu, mu])?);
    }
    Ok(v)
}

fn exp_integral_limit(c: &ExperimentConfig, m: &PshModel, domain: &Domain) -> Result<(f64, bool)> {
    let series = exp_neg2_integral(m, domain, &c.truncations, c.resolution())?;
    Ok(match series.limit {
        Some(l) => (l, false),
        None => (f64::INFINITY, true),
    })
}

fn suite_integrability(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    for m in c.models_or(integrability_defaults()?)? {
        let n = m.dimension();
        let domain = c.domain.clone().unwrap_or_else(|| m.reference_domain());
        let mu = mass_root(&m);
        let label = model_label(&m);
        let (value, diverges) = exp_integral_limit(c, &m, &domain)?;
        if let (Some(exact), true) = (m.closed_form_exp_integral(), domain == m.reference_domain()) {
            out.push(
                VerdictReport::equality("thm-5.1", &format!("{label}:quadrature=closed-form"), value, exact, 0.01)
                    .with("diverges", diverges),
            );
        }
        let input = BoundInput::new(n, mu, 1.0, domain.diameter())?;
        if domain.kind == DomainKind::Polydisc || (n == 1 && domain.kind == DomainKind::PlanarDisc) {
            let b = integrability_bound(&input, false, 0.0)?;
            out.push(
                VerdictReport::inequality("thm-5.1", &format!("{label}:polydisc-form"), value, b.value, c.rel_tol)
                    .with("mu", mu),
            );
        }
        let b = integrability_bound(&input, true, 0.0)?;
        out.push(
            VerdictReport::inequality("thm-5.1", &format!("{label}:diameter-form"), value, b.value, c.rel_tol)
                .with("mu", mu)
                .with("diameter", domain.diameter()),
        );
    }
    for (n, mu) in [(1, 0.5), (2, 1.0), (3, 1.5)] {
        let chk = i_n_check(n, mu)?;
        out.push(
            VerdictReport::inequality("thm-5.1", &format!("i_n:n={n}:mu={mu}"), chk.value, chk.bound, 1e-9)
                .with("error_estimate", chk.error_estimate),
        );
    }
    Ok(out)
}

fn suite_boundary_integrability(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let defaults = vec![PshModel::toric_max_log(vec![1.0, 1.0])?, PshModel::radial_log(1, 0.5)?];
    for m in c.models_or(defaults)? {
        let domain = c.domain.clone().unwrap_or_else(|| m.reference_domain());
        let (value, _) = exp_integral_limit(c, &m, &domain)?;
        let input = BoundInput::new(m.dimension(), mass_root(&m), 1.0, domain.diameter())?;
        let label = model_label(&m);
        let plain = integrability_bound(&input, true, 0.0)?.value;
        for big_m in [0.0, 0.5, 1.0] {
            let b = integrability_bound(&input, true, big_m)?;
            out.push(
                VerdictReport::inequality("cor-5.3", &format!("{label}:M={big_m}"), value, b.value, c.rel_tol)
                    .with("ratio_to_m0_bound", b.value / plain),
            );
        }
    }
    Ok(out)
}

/// `∫_B e^{−2φ}/(1 − φ)^λ` over the unit ball for `φ = w log|z|`.
pub fn critical_integral(m: &PshModel, lambda: f64) -> Result<(f64, f64)> {
    let n = m.dimension();
    let w = match m.family() {
        Family::RadialLog { weight, pole } if pole.iter().all(|p| p.norm() == 0.0) => *weight,
        _ => return Err(Error::Unsupported("critical integral needs a radial log pole at the origin".into())),
    };
    let nf = n as f64;
    if w > nf || (w == nf && lambda <= 1.0) {
        return Ok((f64::INFINITY, 0.0));
    }
    let area = 2.0 * PI.powi(n as i32) / factorial(n - 1);
    // |z| = e^{−t}, 1 − φ = 1 + wt = e^x
    let f = |x: f64| {
        let t = x.exp_m1() / w;
        (2.0 * (w - nf) * t + (1.0 - lambda) * x).exp() / w
    };
    let (v, e) = integrate_de(f, 0.0, f64::INFINITY, 1e-13);
    Ok((area * v, area * e))
}

fn suite_critical(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let defaults = vec![PshModel::radial_log(1, 1.0)?, PshModel::radial_log(2, 2.0)?];
    for m in c.models_or(defaults)? {
        let n = m.dimension();
        let nf = n as f64;
        let ball = if n == 1 { Domain::unit_disc() } else { Domain::unit_ball(n) };
        let label = model_label(&m);
        for lambda in [nf + 0.5, nf + 1.0, nf + 2.0] {
            let (value, err) = critical_integral(&m, lambda)?;
            let bound = critical_bound(n, lambda, ball.volume(), ball.diameter())?;
            out.push(
                VerdictReport::inequality("thm-5.4", &format!("{label}:lambda={lambda}"), value, bound, c.rel_tol)
                    .with("error_estimate", err)
                    .with("finite", value.is_finite()),
            );
            if let Family::RadialLog { weight, .. } = m.family() {
                if *weight == nf {
                    let exact = 2.0 * PI.powi(n as i32) / factorial(n - 1) / (nf * (lambda - 1.0));
                    out.push(VerdictReport::equality(
                        "thm-5.4",
                        &format!("{label}:lambda={lambda}:closed-form"),
                        value,
                        exact,
                        1e-8,
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn suite_local_integrability(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let mut defaults = Vec::new();
    for n in [1usize, 2] {
        for eps in [0.1, 0.5, 0.0] {
            defaults.push(PshModel::radial_log(n, n as f64 - eps)?);
        }
    }
    for m in c.models_or(defaults)? {
        let n = m.dimension();
        let domain = c.domain.clone().unwrap_or_else(|| m.reference_domain());
        let series = exp_neg2_integral(&m, &domain, &c.truncations, c.resolution())?;
        let label = model_label(&m);
        let exact = m.closed_form_exp_integral();
        match exact {
            Some(v) if v.is_infinite() => {
                out.push(
                    VerdictReport::check("thm-5.5", &format!("{label}:divergence-flag"), series.diverges)
                        .with("last_ratio", series.ratios.last().cloned().unwrap_or(f64::NAN)),
                );
                if let Family::RadialLog { .. } = m.family() {
                    let rate = 2.0 * PI.powi(n as i32) / factorial(n);
                    out.push(VerdictReport::equality(
                        "thm-5.5",
                        &format!("{label}:growth-slope"),
                        series.growth_rate,
                        rate,
                        0.1,
                    ));
                }
            }
            _ => {
                let limit = series.limit.unwrap_or(f64::INFINITY);
                out.push(
                    VerdictReport::check("thm-5.5", &format!("{label}:converges"), !series.diverges && limit.is_finite())
                        .with("last_ratio", series.ratios.last().cloned().unwrap_or(f64::NAN))
                        .with("limit", limit),
                );
                if let Some(v) = exact {
                    out.push(VerdictReport::equality("thm-5.5", &format!("{label}:limit"), limit, v, 0.01));
                }
            }
        }
    }
    Ok(out)
}

/// `∫ (−v) (dd^c v)^n` from the catalog measure.
pub fn catalog_energy(m: &PshModel) -> Result<f64> {
    let mass = m.closed_form_ma_mass();
    let mut e = 0.0;
    for a in &mass.atoms {
        e += a.mass * -m.evaluate_unchecked(&a.location);
    }
    for piece in &mass.diffuse {
        match piece {
            crate::model::DiffusePiece::Torus { radii, mass } => {
                let z: Vec<Complex64> = radii.iter().map(|r| Complex64::new(*r, 0.0)).collect();
                e += mass * -m.evaluate_unchecked(&z);
            }
            crate::model::DiffusePiece::UniformBall { .. } => {
                return Err(Error::Unsupported("energy of a ball-supported measure".into()));
            }
        }
    }
    Ok(e)
}

fn suite_capacity(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let res = c.resolution();
    let planar: Vec<Result<VerdictReport>> = [0.1, 0.3, 0.5]
        .par_iter()
        .map(|&r: &f64| {
            let spec = CondenserSpec::planar_disc(Domain::unit_disc(), Complex64::new(0.0, 0.0), r);
            let sol = extremal_function_planar(&spec, res, 1e-8)?;
            let want = 1.0 / (1.0 / r).ln();
            Ok(VerdictReport::equality("lemma-2.2", &format!("cap-planar:r={r}"), sol.capacity, want, 0.03)
                .with("resolution", res)
                .with("iterations", sol.iterations)
                .with("certified_lower_bound", sol.certified_lower_bound)
                .with("subharmonic_defect", sol.residuals.subharmonic_defect))
        })
        .collect();
    for r in planar {
        out.push(r?);
    }
    for r in [0.1f64, 0.3, 0.5] {
        let want = (1.0 / r).ln().powi(-2);
        let closed = toric_extremal(&CondenserSpec::centered_subpolydisc(2, r), 128)?;
        out.push(VerdictReport::equality("lemma-2.2", &format!("cap-toric:r={r}"), closed.capacity, want, 0.02));
        let profile = CondenserSpec::new(
            Domain::unit_polydisc(2),
            SetSpec::ToricProfile { normals: vec![vec![1.0, 0.0], vec![0.0, 1.0]], offsets: vec![r.ln(), r.ln()] },
        );
        let sampled = toric_extremal(&profile, 128)?;
        out.push(
            VerdictReport::equality("lemma-2.2", &format!("cap-toric-sampled:r={r}"), sampled.capacity, want, 0.02)
                .with("boundary_points", sampled.envelope.as_ref().map(|e| e.boundary_points).unwrap_or(0)),
        );
    }
    let defaults = vec![PshModel::truncated_log(1, 1.0, 1.0)?, PshModel::truncated_log(2, 1.0, 1.0)?];
    for m in c.models_or(defaults)? {
        let n = m.dimension();
        let energy = catalog_energy(&m)?;
        let label = model_label(&m);
        for s in [0.25, 0.5, 0.75] {
            let set = SetSpec::Sublevel { model: m.to_spec(), s };
            let spec = CondenserSpec::new(m.reference_domain(), set);
            let (cap, route) = if n == 1 {
                let planar = CondenserSpec::new(Domain::unit_disc(), spec.set.clone());
                (extremal_function_planar(&planar, res, 1e-8)?.capacity, "planar")
            } else {
                (toric_extremal(&spec, 128)?.capacity, "toric")
            };
            let lhs = s.powi(n as i32 + 1) * cap;
            out.push(
                VerdictReport::inequality("lemma-2.2", &format!("{label}:s={s}"), lhs, energy, c.rel_tol)
                    .with("capacity", cap)
                    .with("route", route),
            );
            let lower = capacity_lower_bound(&spec, &m.scaled(1.0 / energy.max(1.0))?);
            if let Ok(lb) = lower {
                out.push(
                    VerdictReport::inequality("lemma-2.2", &format!("{label}:s={s}:candidate<=cap"), lb, cap, c.rel_tol)
                        .with("candidate_mass_in_e", lb),
                );
            }
        }
    }
    Ok(out)
}

/// Fixed sample of ten nonzero `ζ` in the disc.
pub fn zeta_sample() -> Vec<Complex64> {
    (0..10)
        .map(|k| Complex64::from_polar(0.08 + 0.085 * k as f64, 0.7 + 2.0 * PI * k as f64 * 0.382))
        .collect()
}

fn energy_report(case: &str, e: &crate::green::PartialEnergy, tol: f64) -> VerdictReport {
    match (e.direct, e.green) {
        (SliceEnergy::Singular, SliceEnergy::Singular) => {
            VerdictReport::skip("thm-3.1", case, "singular slice: energy is -inf at a pole of the model")
        }
        (d, g) => VerdictReport::equality("thm-3.1", case, d.value(), g.value(), tol)
            .with("direct", d.value())
            .with("green", g.value()),
    }
}

fn suite_slice_energy(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let defaults: Vec<PshModel> =
        [1.0, 2.0, 3.0].iter().map(|k| PshModel::product_max_log(2, 1.0, *k)).collect::<Result<_>>()?;
    let cells = 201;
    for m in c.models_or(defaults)? {
        let label = model_label(&m);
        let mut zetas = zeta_sample();
        zetas.push(Complex64::new(0.0, 0.0));
        for z in zetas {
            let e = partial_energy(&m, z)?;
            out.push(energy_report(&format!("{label}:zeta={z}"), &e, 0.02));
        }
        out.push(laplace_mass_identity(&m, cells, 0.02)?);
    }
    let series = PshModel::series_max_log(50)?;
    for r in [0.3, 0.6] {
        let z = Complex64::new(r, 0.0);
        let e = partial_energy(&series, z)?;
        out.push(energy_report(&format!("{}:zeta={z}", model_label(&series)), &e, 0.05));
    }
    Ok(out)
}

fn suite_mixed(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let a = PshModel::product_max_log(2, 1.0, 1.0)?;
    let b = PshModel::product_max_log(2, 2.0, 1.0)?;
    let zero = PshModel::constant(2, 0.0)?;
    let z = Complex64::new(0.5, 0.0);
    let mut out = Vec::new();
    let diag = mixed_energy(&a, &a, z)?;
    out.push(VerdictReport::equality("thm-3.3", "diagonal:zeta=0.5", diag.direct.value(), 0.5f64.ln(), 1e-9));
    let m = mixed_energy(&a, &b, z)?;
    out.push(
        VerdictReport::equality("thm-3.3", "pair:direct=green:zeta=0.5", m.direct.value(), m.green.value(), 1e-9)
            .with("mixed_mass", m.mixed_mass),
    );
    out.push(mixed_mass_identity(&a, &b, 201, c.rel_tol.min(0.03))?);
    let zf = mixed_energy(&a, &zero, z)?;
    out.push(VerdictReport::check("thm-3.3", "zero-factor", zf.direct == SliceEnergy::Finite(0.0)));
    Ok(out)
}

fn suite_vol_cap(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    let delta = 8f64.sqrt();
    for k in 1..=9 {
        let r = 0.1 * k as f64;
        let cap = toric_extremal(&CondenserSpec::centered_subpolydisc(2, r), 128)?.capacity;
        let volume = PI * PI * r.powi(4);
        let bound = vol_cap_bound(2, cap, delta)?;
        out.push(
            VerdictReport::inequality("prop-6.1", &format!("r={r:.1}"), volume, bound.value, 0.0).with("capacity", cap),
        );
    }
    for s in [1.0f64, 2.0, 3.0, 4.0] {
        let mu = 1.0;
        let a = vol_cap_bound(2, (mu / s).powi(2), delta)?.value;
        let b = volume_bound(&BoundInput::new(2, mu, s, delta)?, true)?.value;
        out.push(VerdictReport::equality("prop-6.1", &format!("substitution:s={s}"), a, b, 4.0 * f64::EPSILON));
    }
    let _ = c;
    Ok(out)
}

fn suite_slice_cap(_c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    for r1 in [0.2f64, 0.5] {
        for r2 in [0.2f64, 0.5] {
            let spec = CondenserSpec::new(
                Domain::unit_polydisc(2),
                SetSpec::Subpolydisc { center: None, radii: vec![r1, r2] },
            );
            let cap = toric_extremal(&spec, 128)?.capacity;
            let slice_cap = 1.0 / (1.0 / r1).ln();
            for p in [0.5, 1.0, 2.0] {
                let lhs = PI * r2 * r2 * slice_cap.powf(p);
                let stated = slice_cap_bound(1, p, cap, 2.0, SliceExponent::Stated)?;
                let proof = slice_cap_bound(1, p, cap, 2.0, SliceExponent::ProofLine)?;
                out.push(
                    VerdictReport::inequality("prop-6.2", &format!("r1={r1}:r2={r2}:p={p}"), lhs, stated, 0.0)
                        .with("cap_bidisc", cap)
                        .with("proof_line_bound", proof)
                        .with("proof_line_holds", lhs <= proof),
                );
            }
        }
    }
    Ok(out)
}

fn singularity_defaults() -> Result<Vec<PshModel>> {
    Ok(vec![
        PshModel::radial_log(1, 0.5)?,
        PshModel::radial_log(2, 1.5)?,
        PshModel::toric_max_log(vec![1.0, 2.0])?,
        PshModel::toric_max_log(vec![1.0, 1.0])?,
        PshModel::product_max_log(2, 1.0, 3.0)?,
        PshModel::series_max_log(5)?,
        PshModel::new(1, Family::RadialLog { weight: 0.7, pole: vec![Complex64::new(0.3, 0.0)] })?,
    ])
}

fn suite_singularity(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let mut out = Vec::new();
    for m in c.models_or(singularity_defaults()?)? {
        let label = model_label(&m);
        let Some((at, mass)) = m.atom_mass() else {
            out.push(VerdictReport::skip("prop-6.3", &label, "not a single-atom model"));
            continue;
        };
        let n = m.dimension();
        let nu = m.lelong_number(&at)?;
        let mu_a = mass.powf(1.0 / n as f64);
        let (lo, hi) = singularity_exponent_bounds(nu, mu_a, n)?;
        let ca = m.singularity_exponent(&at)?;
        out.push(
            VerdictReport::inequality("prop-6.3", &format!("{label}:lower<=c_a"), lo, ca, 1e-12)
                .with("lelong", nu)
                .with("mu_a", mu_a),
        );
        out.push(VerdictReport::inequality("prop-6.3", &format!("{label}:c_a<=upper"), ca, hi, 1e-12));
    }
    Ok(out)
}

/// Shapes used by the one-variable suite.
pub fn planar_shapes() -> Vec<PlanarCompact> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    vec![
        PlanarCompact::Disc { center: c(0.0, 0.0), radius: 0.2 },
        PlanarCompact::Disc { center: c(0.0, 0.0), radius: 0.5 },
        PlanarCompact::Disc { center: c(0.2, -0.1), radius: 0.3 },
        PlanarCompact::Segment { a: c(-0.5, 0.0), b: c(0.5, 0.0) },
        PlanarCompact::DiscUnion { discs: vec![(c(-0.45, 0.0), 0.2), (c(0.45, 0.0), 0.2)] },
        PlanarCompact::Point { at: c(0.1, 0.2) },
    ]
}

fn suite_polya_at(c: &ExperimentConfig) -> Result<Vec<VerdictReport>> {
    let res = c.resolution();
    let shapes = planar_shapes();
    let parts: Vec<Result<Vec<VerdictReport>>> = shapes
        .par_iter()
        .map(|k| {
            let mut out = Vec::new();
            if !matches!(k, PlanarCompact::Point { .. }) {
                out.push(polya_check(k)?);
            }
            let at = alexander_taylor_check(k, res, 0.03)?;
            if let PlanarCompact::Disc { center, .. } = k {
                if center.norm() == 0.0 {
                    if let (Some(crate::report::Diag::Num(m)), Some(crate::report::Diag::Num(cap))) =
                        (at[0].diagnostics.get("m_k"), at[0].diagnostics.get("cap_k_d"))
                    {
                        out.push(VerdictReport::equality(
                            "polya-at",
                            &format!("{}:m*cap=1", at[0].case_id),
                            m * cap,
                            1.0,
                            0.03,
                        ));
                    }
                }
            }
            out.extend(at);
            Ok(out)
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_config_error() {
        let c = ExperimentConfig::for_suite("thm-9.9");
        assert!(matches!(run_suite(&c), Err(Error::Config(_))));
    }

    #[test]
    fn config_round_trips_and_rejects_bad_tolerances() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"schema_version": 1, "suite": "constants"}"#).unwrap();
        assert_eq!(c.resolutions, vec![256]);
        let mut bad = c.clone();
        bad.rel_tol = 0.0;
        assert!(bad.validate().is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"suite": "constants", "bogus": 1}"#).is_err());
    }

    #[test]
    fn constants_suite_passes() {
        let r = run_suite(&ExperimentConfig::for_suite("constants")).unwrap();
        assert!(r.iter().all(|x| x.passed()));
        assert!(r.iter().any(|x| x.case_id == "c_1=4pi"));
    }

    #[test]
    fn singular_slice_is_skipped() {
        let r = run_suite(&ExperimentConfig::for_suite("thm-3.1")).unwrap();
        let at_zero: Vec<_> = r.iter().filter(|x| x.case_id.ends_with("zeta=0+0i")).collect();
        assert_eq!(at_zero.len(), 3);
        assert!(at_zero.iter().all(|x| matches!(x.verdict, crate::report::Verdict::Skip(_))));
        assert!(r.iter().all(|x| x.passed()), "{:?}", r.iter().filter(|x| !x.passed()).collect::<Vec<_>>());
    }

    #[test]
    fn volume_suite_with_radial_model() {
        let mut c = ExperimentConfig::for_suite("thm-4.1");
        c.models = vec![PshModel::radial_log(2, 1.0).unwrap().to_spec()];
        let r = run_suite(&c).unwrap();
        assert!(r.iter().all(|x| x.passed()));
    }
}
