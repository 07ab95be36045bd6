use phiext::catalog::{
    emit_report, make_family, parse_scenario, read_grid_csv, run_scenario, FamilySpec, Field, ReportFormat,
};
use phiext::conditions::{estimate_adec, estimate_ainc};
use phiext::geometry::PointCloud;
use phiext::{ConditionId, SampledFunction, TGrid};

fn scenario(text: &str) -> phiext::catalog::Scenario {
    parse_scenario(text).unwrap()
}

fn check(report: &phiext::catalog::Report, id: &str) -> bool {
    report
        .checks
        .iter()
        .find(|(k, _)| k == id)
        .unwrap_or_else(|| panic!("no check {id}"))
        .1
        .holds
}

const JUMP_CHECK: &str = "\
task=check
family=variable_exponent
family.p=jump(low=1.5,high=3,axis=0,at=0.5)
domain=square(side=1,points=128)
domain.seam=0.5
grid.min=1e-3
grid.count=241
seed=1
";

fn a1_omega_beta(report: &phiext::catalog::Report) -> f64 {
    let (_, r) = report.checks.iter().find(|(k, _)| k == "A1_Omega").unwrap();
    r.detail
        .split_whitespace()
        .nth(2)
        .and_then(|v| v.parse().ok())
        .expect("detail starts with `beta = <value>`")
}

#[test]
fn jump_exponent_beta_collapses_with_t_max() {
    let short = run_scenario(&scenario(&format!("{JUMP_CHECK}grid.max=1e2\n"))).unwrap();
    let long = run_scenario(&scenario(&format!("{JUMP_CHECK}grid.max=1e6\n"))).unwrap();
    // phi^-1 ratio across the seam is t^{1/3 - 2/3}
    let (b_short, b_long) = (a1_omega_beta(&short), a1_omega_beta(&long));
    assert!((b_short / 1e2f64.powf(-1.0 / 3.0) - 1.0).abs() < 1e-3, "{b_short}");
    assert!((b_long / 1e6f64.powf(-1.0 / 3.0) - 1.0).abs() < 1e-3, "{b_long}");
    assert!(!check(&long, "A1_Omega"));
    assert!(!long.verdict());
    let (_, r) = long.checks.iter().find(|(k, _)| k == "A1_Omega").unwrap();
    assert!(r.witness.as_ref().unwrap().violation() > 1.0);
}

#[test]
fn log_holder_exponent_passes_a1() {
    let text = "\
task=check
family=variable_exponent
family.p=lipschitz_bump(base=1.5,height=1,center=[0.5,0.5],radius=0.4)
domain=square(side=1,points=256)
grid.min=1e-4
grid.max=1e4
grid.count=161
seed=2
";
    let report = run_scenario(&scenario(text)).unwrap();
    for id in ["weak_phi", "A0", "A1", "A1_Omega", "A2"] {
        assert!(check(&report, id), "{id}");
    }
}

#[test]
fn double_phase_growth_constants_at_most_two() {
    let a = Field::parse("lipschitz_bump(center=[0,1.5],height=2,radius=1)").unwrap();
    let phi = make_family(&FamilySpec::DoublePhase { p: 2.0, q: 3.5, a }, 2).unwrap();
    let cloud = PointCloud::from_points(2, &[[0.0, 1.0], [0.0, 1.5], [1.5, 0.0], [1.2, 1.2]]).unwrap();
    let grid = TGrid::geometric(1e-6, 1e6, 241).unwrap();
    let table = SampledFunction::tabulate(phi.as_ref(), &cloud, &grid).unwrap();
    let inc = estimate_ainc(&table, 2.0, 10.0).unwrap();
    let dec = estimate_adec(&table, 3.5, 10.0).unwrap();
    assert!(inc.holds && inc.constant.value() <= 2.0);
    assert!(dec.holds && dec.constant.value() <= 2.0);
}

#[test]
fn extend_refuses_jump_family_with_checkable_witness() {
    let text = "\
task=extend
family=variable_exponent
family.p=jump(low=1.5,high=3,axis=0,at=0.5)
domain=square(side=1,points=128)
domain.seam=0.5
grid.min=1e-6
grid.max=1e6
grid.count=601
ambient.points=32
seed=1
";
    let report = run_scenario(&scenario(text)).unwrap();
    let refusal = report.refusal.as_ref().expect("refused");
    assert_eq!(refusal.condition, ConditionId::A1Omega);
    assert!(report.certificate.is_none());
    assert!(!report.verdict());
    let w = refusal.witness.as_ref().unwrap();
    assert_eq!(w.points.len(), 2);
    assert!(w.violation() > 1.0 + phiext::SLACK);
}

#[test]
fn extension_on_unbounded_rays() {
    let text = "\
task=extend
family=variable_exponent
family.p=radial(base=2,amplitude=0.5)
domain=rays(rays=4,reach=50,points=96)
grid.min=1e-3
grid.max=1e3
grid.count=121
ambient.points=64
seed=4
";
    let report = run_scenario(&scenario(text)).unwrap();
    assert!(report.refusal.is_none(), "{:?}", report.refusal.as_ref().map(|r| &r.detail));
    let cert = report.certificate.as_ref().unwrap();
    let failed: Vec<&str> = cert.failures().map(|c| c.id.as_str()).collect();
    assert!(cert.overall, "failed: {failed:?}");
    assert!(report.verdict());
}

#[test]
fn extension_psi_csv_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("psi.csv");
    let text = format!(
        "\
task=extend
family=double_phase
family.p=2
family.q=3
family.a=lipschitz_bump(center=[1,1],height=0.5,radius=0.5)
domain=l_shape(points=96)
grid.min=1e-3
grid.max=1e3
grid.count=121
ambient.points=48
seed=5
out.csv={}
",
        csv.display()
    );
    let sc = scenario(&text);
    let report = run_scenario(&sc).unwrap();
    let cert = report.certificate.as_ref().unwrap();
    assert!(cert.overall);
    for id in ["A0", "A1", "A1_Omega", "A2", "aDec", "weak_phi", "equivalence"] {
        assert!(cert.get(id).unwrap().holds, "{id}");
    }
    let psi = read_grid_csv(&csv).unwrap();
    assert_eq!(psi.n_points(), 96 + 48);
    assert_eq!(psi.grid().len(), 121);
    let human = emit_report(&report, ReportFormat::Human);
    let machine = emit_report(&report, ReportFormat::Machine);
    assert!(human.contains("certificate (overall: yes)"));
    assert!(machine.contains("[certificate]"));
    // the echo alone reproduces the report
    let again = run_scenario(&scenario(&report.scenario)).unwrap();
    assert_eq!(emit_report(&again, ReportFormat::Machine), machine);
}

#[test]
fn chain_task_on_corridor() {
    let text = "\
task=chain
family=power
family.p=2
domain=corridor(width=0.2,points=600)
chain.from=[0.2,0.2]
chain.to=[2.8,0.8]
chain.t=100
seed=6
";
    let report = run_scenario(&scenario(text)).unwrap();
    assert!(check(&report, "chain"));
    let k_hat: f64 = report
        .values
        .iter()
        .find(|(k, _)| k == "quasiconvexity.k_hat")
        .unwrap()
        .1
        .parse()
        .unwrap();
    assert!(k_hat >= 1.0);
}

#[test]
fn report_task_tabulates_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("inv.csv");
    let text = format!(
        "task=report\nfamily=power\nfamily.p=4\ndomain=interval(points=5)\ngrid.min=1e-4\ngrid.max=1e4\ngrid.count=9\nout.csv={}\n",
        csv.display()
    );
    let report = run_scenario(&scenario(&text)).unwrap();
    assert!(report.checks.is_empty());
    let inv = read_grid_csv(&csv).unwrap();
    for (j, &tau) in inv.grid().samples().iter().enumerate() {
        assert!((inv.value(0, j) / tau.powf(0.25) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn missing_domain_file_names_the_path() {
    let text = "task=check\nfamily=power\nfamily.p=2\ndomain=file(path=/no/such/domain.txt)\n";
    let err = run_scenario(&scenario(text)).unwrap_err();
    assert!(err.to_string().contains("/no/such/domain.txt"), "{err}");
}
