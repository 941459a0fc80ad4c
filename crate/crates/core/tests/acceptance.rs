//! Acceptance criteria 1-11. Prints one PASS/FAIL line per criterion.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use pplab::bounds::{volume_bound, BoundInput};
use pplab::capacity::{extremal_function_planar, CondenserSpec};
use pplab::grid::exp_neg2_integral;
use pplab::harness::{run_suite, ExperimentConfig};
use pplab::report::{render, ReportFormat, Verdict, VerdictReport};
use pplab::{Domain, PshModel, Result};

struct Outcome {
    ok: bool,
    detail: String,
}

fn suite(name: &str, models: Vec<PshModel>) -> Result<Vec<VerdictReport>> {
    let mut c = ExperimentConfig::for_suite(name);
    c.models = models.iter().map(|m| m.to_spec()).collect();
    run_suite(&c)
}

fn all_pass(reports: &[VerdictReport]) -> Outcome {
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.case_id.as_str()).collect();
    let skipped = reports.iter().filter(|r| matches!(r.verdict, Verdict::Skip(_))).count();
    Outcome {
        ok: failed.is_empty() && !reports.is_empty(),
        detail: format!("{} cases, {} skipped, failed: {:?}", reports.len(), skipped, failed),
    }
}

fn c1() -> Result<Outcome> {
    Ok(all_pass(&suite("constants", vec![])?))
}

fn c2() -> Result<Outcome> {
    let models = [0.5, 1.0, 2.0].iter().map(|&mu| PshModel::toric_max_log(vec![mu, mu])).collect::<Result<_>>()?;
    let r = suite("thm-4.1", models)?;
    let slopes = r.iter().filter(|x| x.case_id.ends_with("log-volume-slope")).count();
    let mut o = all_pass(&r);
    o.ok &= slopes == 3;
    o.detail += &format!(", slope fits: {slopes}");
    Ok(o)
}

fn c3() -> Result<Outcome> {
    let r: Vec<_> = suite("thm-5.1", vec![])?.into_iter().filter(|x| !x.case_id.starts_with("i_n:")).collect();
    let quad = r.iter().filter(|x| x.case_id.ends_with("quadrature=closed-form")).count();
    let mut o = all_pass(&r);
    o.ok &= quad == 6;
    Ok(o)
}

fn c4() -> Result<Outcome> {
    let r = suite("thm-5.4", vec![])?;
    let mut o = all_pass(&r);
    o.ok &= r.iter().all(|x| x.computed.is_finite());
    Ok(o)
}

fn c5() -> Result<Outcome> {
    let mut r = suite("thm-5.5", vec![])?;
    let divergent = r.iter().filter(|x| x.case_id.ends_with("divergence-flag")).count();
    r.extend(suite("prop-6.3", vec![])?);
    let mut o = all_pass(&r);
    o.ok &= divergent == 2;
    Ok(o)
}

fn c6() -> Result<Outcome> {
    Ok(all_pass(&suite("lemma-2.2", vec![])?))
}

fn c7() -> Result<Outcome> {
    let r = suite("thm-3.1", vec![])?;
    let compared = r.iter().filter(|x| matches!(x.verdict, Verdict::Pass) && x.case_id.contains("zeta=")).count();
    let mut o = all_pass(&r);
    o.ok &= compared == 32;
    o.detail += &format!(", nonsingular comparisons: {compared}");
    Ok(o)
}

fn c8() -> Result<Outcome> {
    Ok(all_pass(&suite("prop-6.1", vec![])?))
}

fn c9() -> Result<Outcome> {
    let r = suite("prop-6.2", vec![])?;
    let proof_ok = r
        .iter()
        .filter(|x| matches!(x.diagnostics.get("proof_line_holds"), Some(pplab::report::Diag::Flag(true))))
        .count();
    let mut o = all_pass(&r);
    o.detail += &format!(", proof-line constant suffices in {proof_ok}/{} cases", r.len());
    Ok(o)
}

fn c10() -> Result<Outcome> {
    let r = suite("polya-at", vec![])?;
    let disc_margins_zero = r
        .iter()
        .filter(|x| x.case_id.starts_with("polya:disc("))
        .all(|x| x.margin == 0.0);
    let mut o = all_pass(&r);
    o.ok &= disc_margins_zero;
    o.detail += &format!(", disc Polya margins exactly 0: {disc_margins_zero}");
    Ok(o)
}

fn c11() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut homogeneous = true;
    for n in 1..=3 {
        for mu2 in 1..=6 {
            for s2 in 1..=10 {
                let (mu, s) = (0.5 * mu2 as f64, 0.5 * s2 as f64);
                let base = volume_bound(&BoundInput::new(n, mu, s, 2.0)?, false)?.value;
                for t in [2.0, 7.0, 100.0] {
                    let scaled = volume_bound(&BoundInput::new(n, t * mu, t * s, 2.0)?, false)?.value;
                    homogeneous &= scaled.to_bits() == base.to_bits();
                }
            }
        }
    }
    ok &= homogeneous;
    notes.push(format!("homogeneity exact: {homogeneous}"));

    let mut monotone = true;
    for mu in [0.5, 1.0, 2.0] {
        let sweep: Vec<f64> = (1..=100)
            .map(|k| volume_bound(&BoundInput::new(2, mu, 0.05 * k as f64, 2.0).unwrap(), false).unwrap().value)
            .collect();
        monotone &= sweep.windows(2).all(|w| w[1] < w[0]);
    }
    ok &= monotone;
    notes.push(format!("volume bound decreasing: {monotone}"));

    let origin = Complex64::new(0.0, 0.0);
    let cap = |big_r: f64, r: f64| -> Result<f64> {
        let spec = CondenserSpec::planar_disc(Domain::disc(origin, big_r), origin, r);
        Ok(extremal_function_planar(&spec, 128, 1e-8)?.capacity)
    };
    let in_e: Vec<f64> = [0.1, 0.2, 0.3, 0.4].iter().map(|&r| cap(1.0, r)).collect::<Result<_>>()?;
    let in_omega: Vec<f64> = [1.0, 1.5, 2.0].iter().map(|&big_r| cap(big_r, 0.3)).collect::<Result<_>>()?;
    let cap_mono = in_e.windows(2).all(|w| w[1] > w[0]) && in_omega.windows(2).all(|w| w[1] < w[0]);
    ok &= cap_mono;
    notes.push(format!("capacity monotone in E, anti-monotone in domain: {cap_mono}"));

    let mut exp_mono = true;
    for m in [PshModel::radial_log(1, 0.5)?, PshModel::radial_log(1, 1.0)?, PshModel::toric_max_log(vec![1.0, 1.0])?] {
        let schedule: Vec<f64> = (1..=12).map(|k| 2.5 * k as f64).collect();
        let series = exp_neg2_integral(&m, &m.reference_domain(), &schedule, 256)?;
        exp_mono &= series.values.windows(2).all(|w| w[1].1 >= w[0].1);
    }
    ok &= exp_mono;
    notes.push(format!("exp-integral nondecreasing in M: {exp_mono}"));

    let mut cfg = ExperimentConfig::for_suite("thm-4.1");
    cfg.seed = 17;
    let first = render(&run_suite(&cfg)?, ReportFormat::Json, cfg.seed)?;
    let second = render(&run_suite(&cfg)?, ReportFormat::Json, cfg.seed)?;
    let csv = render(&run_suite(&cfg)?, ReportFormat::Csv, cfg.seed)? == render(&run_suite(&cfg)?, ReportFormat::Csv, cfg.seed)?;
    let deterministic = first == second && csv;
    ok &= deterministic;
    notes.push(format!("report determinism: {deterministic}"));

    Ok(Outcome { ok, detail: notes.join(", ") })
}

type Criterion = (u32, &'static str, f64, fn() -> Result<Outcome>);

const CRITERIA: [Criterion; 11] = [
    (1, "exact constants", 1.0, c1),
    (2, "toric sublevel volumes and rate", 5.0, c2),
    (3, "exponential integrability", 60.0, c3),
    (4, "critical integrability", 60.0, c4),
    (5, "local integrability and singularity exponents", 30.0, c5),
    (6, "capacity routes and sublevel capacity", 120.0, c6),
    (7, "slice energy representation", 60.0, c7),
    (8, "volume-capacity bound", 5.0, c8),
    (9, "slice capacity bound", 10.0, c9),
    (10, "one-variable ingredients", 30.0, c10),
    (11, "property suites", f64::INFINITY, c11),
];

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for (k, title, budget, run) in CRITERIA {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (ok, detail) = match outcome {
            Ok(o) => (o.ok && secs < budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if ok { "PASS" } else { "FAIL" };
        let line = format!("{tag} criterion {k}: {title} ({secs:.2} s, budget {budget} s) {detail}\n");
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(k);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
