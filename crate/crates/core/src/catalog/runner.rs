//! Runs a [`Scenario`] end to end and collects a [`Report`].

use std::sync::Arc;
use std::time::Instant;

use super::csv::{emit_grid_csv, emit_phi_csv};
use super::domains::{ambient_complement, build_domain, BuiltDomain};
use super::families::make_family;
use super::report::Report;
use super::scenario::{Scenario, Task};
use crate::conditions::{
    check_a0_table, check_a1_omega_table, check_a1_table, check_a2, estimate_adec, estimate_ainc,
    exponent_range_table, sample_balls, A2Inputs,
};
use crate::error::{Error, Result};
use crate::extension::{estimate_phi_infinity, extend, ExtensionConfig};
use crate::geometry::{
    chain_count_bound, chain_points, default_c_impl, distance, quasiconvexity_constant, shortest_path,
};
use crate::phi_core::axioms::{check_weak_phi, WeakPhiOptions};
use crate::phi_core::inverse::inverse_table;
use crate::phi_core::phi::{Envelope, SharedPhi};
use crate::phi_core::report::{ConditionId, ConditionReport, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid};

struct Clock {
    start: Instant,
    marks: Vec<(String, f64)>,
}

impl Clock {
    fn new() -> Self {
        Clock {
            start: Instant::now(),
            marks: Vec::new(),
        }
    }

    fn mark(&mut self, what: &str) {
        let now = Instant::now();
        self.marks.push((what.to_string(), (now - self.start).as_secs_f64()));
        self.start = now;
    }
}

fn lattice_meta(built: &BuiltDomain, grid: &TGrid) -> Vec<(String, String)> {
    let d = &built.domain;
    vec![
        ("domain".into(), built.spec.to_string()),
        ("domain.points".into(), d.len().to_string()),
        ("domain.dim".into(), d.dim().to_string()),
        ("domain.bounded".into(), d.is_bounded().to_string()),
        ("domain.hat_points".into(), d.hat().len().to_string()),
        ("domain.resolution".into(), d.cloud().resolution().to_string()),
        ("grid.nodes".into(), grid.len().to_string()),
        ("grid.t_min".into(), grid.min().to_string()),
        ("grid.t_max".into(), grid.max().to_string()),
    ]
}

/// `φ_∞` used by the checks: the lower envelope over the cloud for a
/// bounded domain, the far-field envelope otherwise.
fn phi_infinity(phi: &SharedPhi, built: &BuiltDomain, far_fraction: f64) -> Result<SharedPhi> {
    let d = &built.domain;
    if d.is_bounded() {
        Ok(Arc::new(Envelope::new(
            phi.clone(),
            d.cloud().clone(),
            format!("min over cloud of {}", phi.label()),
        )))
    } else {
        Ok(Arc::new(estimate_phi_infinity(phi, d, far_fraction)?))
    }
}

/// Runs `scenario` and writes any CSV it asks for. The report is returned
/// whatever the verdict; errors are configuration or structural problems.
pub fn run_scenario(scenario: &Scenario) -> Result<Report> {
    let mut clock = Clock::new();
    let grid = scenario.grid.build()?;
    let built = build_domain(&scenario.domain, &scenario.domain_options)?;
    let phi = make_family(&scenario.family, built.domain.dim())?;
    clock.mark("setup");
    let mut report = Report {
        task: scenario.task.to_string(),
        scenario: scenario.to_text(),
        seed: scenario.seed(),
        lattice: lattice_meta(&built, &grid),
        ..Report::default()
    };
    match scenario.task {
        Task::Check => run_checks(scenario, &phi, &built, &grid, &mut report, &mut clock)?,
        Task::Report => run_tables(scenario, &phi, &built, &grid, &mut report, &mut clock)?,
        Task::Extend => run_extend(scenario, phi, &built, &grid, &mut report, &mut clock)?,
        Task::Chain => run_chain(scenario, &built, &grid, &mut report)?,
    }
    clock.mark("finish");
    report.timing = clock.marks;
    Ok(report)
}

fn run_checks(
    scenario: &Scenario,
    phi: &SharedPhi,
    built: &BuiltDomain,
    grid: &TGrid,
    report: &mut Report,
    clock: &mut Clock,
) -> Result<()> {
    let opts = &scenario.checks;
    let d = &built.domain;
    let cloud = d.cloud();
    report.checks.push((
        "weak_phi".into(),
        check_weak_phi(phi.as_ref(), grid, cloud, &WeakPhiOptions::default()),
    ));
    let inverse = inverse_table(phi.as_ref(), cloud, grid, opts.tol)?;
    clock.mark("inverse");
    let a0 = check_a0_table(&inverse);
    let beta0 = a0.constant.value();
    report.checks.push(("A0".into(), a0));
    let upper = inverse.restrict_grid(grid.one_index()..grid.len())?;
    let balls = sample_balls(cloud, opts.ball_budget, opts.seed);
    report.checks.push(("A1".into(), check_a1_table(&upper, &balls, opts)));
    report.checks.push(("A1_Omega".into(), check_a1_omega_table(&upper, opts)));
    clock.mark("A1");

    let phi_inf = phi_infinity(phi, built, scenario.extend.far_fraction)?;
    let mut a2_inputs = A2Inputs::new(phi_inf).with_beta2(scenario.extend.beta2);
    if beta0 > 0.0 {
        a2_inputs = a2_inputs.with_value_threshold(beta0);
    }
    let a2 = check_a2(phi.as_ref(), d, &a2_inputs, grid, opts)?;
    report.values.push(("A2.h_sup".into(), a2.h_sup.to_string()));
    report.values.push(("A2.h_l1".into(), a2.h_l1.to_string()));
    report.checks.push(("A2".into(), a2.report));
    clock.mark("A2");

    let table = SampledFunction::tabulate(phi.as_ref(), cloud, grid)?;
    if let Some(p) = phi.declared_ainc() {
        report.checks.push(("aInc".into(), estimate_ainc(&table, p, opts.a_cap)?));
    }
    if let Some(q) = phi.declared_adec() {
        report.checks.push(("aDec".into(), estimate_adec(&table, q, opts.a_cap)?));
    }
    let range = exponent_range_table(&table, opts.a_cap)?;
    report.values.push(("exponents.p_sup".into(), range.p_sup.to_string()));
    report.values.push(("exponents.q_inf".into(), range.q_inf.to_string()));
    if d.edges().is_some() {
        let qc = quasiconvexity_constant(d, scenario.pair_budget, opts.seed)?;
        report.values.push(("quasiconvexity.k_hat".into(), qc.k_hat.to_string()));
        report.values.push(("quasiconvexity.pairs".into(), qc.pairs_sampled.to_string()));
    }
    clock.mark("growth");
    if let Some(path) = &scenario.out.csv {
        emit_grid_csv(&table, path)?;
    }
    Ok(())
}

/// `report`: tables and summary values of `φ` and `φ⁻¹`, no verdicts.
fn run_tables(
    scenario: &Scenario,
    phi: &SharedPhi,
    built: &BuiltDomain,
    grid: &TGrid,
    report: &mut Report,
    clock: &mut Clock,
) -> Result<()> {
    let cloud = built.domain.cloud();
    let inverse = inverse_table(phi.as_ref(), cloud, grid, scenario.checks.tol)?;
    clock.mark("inverse");
    let at_one = inverse.at_one();
    let lo = at_one.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = at_one.iter().cloned().fold(0.0, f64::max);
    report.values.push(("phi.label".into(), phi.label()));
    report.values.push(("phi.declared_ainc".into(), format!("{:?}", phi.declared_ainc())));
    report.values.push(("phi.declared_adec".into(), format!("{:?}", phi.declared_adec())));
    report.values.push(("inverse_at_one.min".into(), lo.to_string()));
    report.values.push(("inverse_at_one.max".into(), hi.to_string()));
    let table = SampledFunction::tabulate(phi.as_ref(), cloud, grid)?;
    let range = exponent_range_table(&table, scenario.checks.a_cap)?;
    report.values.push(("exponents.p_sup".into(), range.p_sup.to_string()));
    report.values.push(("exponents.q_inf".into(), range.q_inf.to_string()));
    if let Some(path) = &scenario.out.csv {
        emit_grid_csv(&inverse, path)?;
    }
    Ok(())
}

fn run_extend(
    scenario: &Scenario,
    phi: SharedPhi,
    built: &BuiltDomain,
    grid: &TGrid,
    report: &mut Report,
    clock: &mut Clock,
) -> Result<()> {
    let e = &scenario.extend;
    let complement = ambient_complement(built, e.ambient_points, e.ambient_margin)?;
    let config = ExtensionConfig {
        grid: grid.clone(),
        checks: scenario.checks.clone(),
        p: e.p,
        q: e.q,
        beta2: e.beta2,
        far_fraction: e.far_fraction,
        l_max: e.l_max,
        ..ExtensionConfig::default()
    };
    report.lattice.push(("ambient.complement_points".into(), complement.len().to_string()));
    match extend(phi, &built.domain, &complement, &config) {
        Ok(ext) => {
            clock.mark("extend");
            for r in &ext.input_reports {
                report.checks.push((format!("input.{}", r.condition), r.clone()));
            }
            report.values.push(("extension.beta0".into(), ext.inputs.beta0.to_string()));
            report.values.push(("extension.beta".into(), ext.inputs.beta.to_string()));
            report.values.push(("extension.p".into(), ext.inputs.p.to_string()));
            report.values.push((
                "extension.q".into(),
                ext.inputs.q.map_or("none".to_string(), |q| q.to_string()),
            ));
            if let Some(path) = &scenario.out.csv {
                emit_phi_csv(ext.psi.as_ref(), &ext.inputs.ambient, grid, path)?;
            }
            report.certificate = Some(ext.certificate);
        }
        Err(Error::Refused(r)) => {
            clock.mark("refused");
            report.refusal = Some(*r);
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn nearest(cloud: &crate::geometry::PointCloud, x: &[f64]) -> usize {
    (0..cloud.len())
        .min_by(|&a, &b| distance(cloud.point(a), x).total_cmp(&distance(cloud.point(b), x)))
        .expect("cloud is non-empty")
}

fn run_chain(scenario: &Scenario, built: &BuiltDomain, grid: &TGrid, report: &mut Report) -> Result<()> {
    let spec = scenario.chain.as_ref().expect("validated: chain task has endpoints");
    let d = &built.domain;
    if spec.from.len() != d.dim() {
        return Err(Error::Config(format!(
            "chain endpoints have dimension {}, domain has {}",
            spec.from.len(),
            d.dim()
        )));
    }
    let cloud = d.cloud();
    let (i, j) = (nearest(cloud, &spec.from), nearest(cloud, &spec.to));
    let path = shortest_path(d, i, j)?;
    let n = d.dim();
    let chain = chain_points(&path, spec.t, n)?;
    let qc = quasiconvexity_constant(d, scenario.pair_budget, scenario.seed())?;
    let c_impl = default_c_impl(n);
    let dxy = cloud.distance(i, j);
    let bound = chain_count_bound(qc.k_hat, dxy, spec.t, n, c_impl);
    let verified = chain.verify();
    let holds = verified.is_ok() && (chain.k as f64) <= bound;
    for (k, v) in [
        ("chain.from_index", i.to_string()),
        ("chain.to_index", j.to_string()),
        ("chain.distance", dxy.to_string()),
        ("chain.path_length", chain.path_length.to_string()),
        ("chain.k", chain.k.to_string()),
        ("chain.spacing", chain.spacing.to_string()),
        ("chain.c_impl", c_impl.to_string()),
        ("quasiconvexity.k_hat", qc.k_hat.to_string()),
    ] {
        report.values.push((k.into(), v));
    }
    let mut r = ConditionReport::new(ConditionId::Chain, holds, ExtReal::clamped(bound), Lattice::new(chain.points.len(), grid))
        .with_detail(format!("k = {} balls against the bound {bound:.6}", chain.k));
    if let Err(why) = &verified {
        r = r.note(format!("chain invalid: {why}"));
    }
    if !holds {
        r = r.with_witness(Some(
            Witness::new(vec![spec.from.clone(), spec.to.clone()], vec![spec.t]).with_inequality(
                bound,
                chain.k as f64,
                bound,
            ),
        ));
    }
    report.checks.push(("chain".into(), r));
    Ok(())
}
