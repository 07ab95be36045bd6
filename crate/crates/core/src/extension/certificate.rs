use rayon::prelude::*;

use crate::conditions::{
    check_a0_table, check_a1_omega_table, check_a1_table, check_a2, estimate_adec, estimate_ainc, sample_balls,
    A2Inputs,
};
use crate::error::Result;
use crate::geometry::{PointCloud, SpatialDomain};
use crate::phi_core::axioms::{check_weak_phi, equivalence_constant, WeakPhiOptions};
use crate::phi_core::inverse::invert;
use crate::phi_core::report::{ConditionId, ConditionReport, Coverage, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid};

use super::build::{FFormula, FParts};
use super::psi::SampledPsi;
use super::regularize::dec_weight;
use super::{ExtensionConfig, ExtensionInputs};

/// One named property with its verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Claim {
    pub id: String,
    pub report: ConditionReport,
}

impl Claim {
    fn new(id: &str, report: ConditionReport) -> Self {
        Claim { id: id.to_string(), report }
    }
}

/// Every property the construction promises, verified on the sampled data.
///
/// `overall` is the conjunction of `claims_f`, `claims_g` and `psi_checks`.
/// `invariants` holds the quantitative side-bounds of the construction
/// (seam, sandwich, restriction bounds); they are reported but do not enter
/// `overall`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionCertificate {
    pub claims_f: Vec<Claim>,
    pub claims_g: Vec<Claim>,
    pub psi_checks: Vec<Claim>,
    pub invariants: Vec<Claim>,
    pub overall: bool,
    pub notes: Vec<String>,
}

impl ExtensionCertificate {
    pub fn get(&self, id: &str) -> Option<&ConditionReport> {
        self.all().find(|c| c.id == id).map(|c| &c.report)
    }

    /// Claims that enter `overall`, in order.
    pub fn claims(&self) -> impl Iterator<Item = &Claim> {
        self.claims_f.iter().chain(&self.claims_g).chain(&self.psi_checks)
    }

    pub fn all(&self) -> impl Iterator<Item = &Claim> {
        self.claims().chain(&self.invariants)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims().filter(|c| !c.report.holds)
    }
}

fn lattice(table: &SampledFunction) -> Lattice {
    Lattice::new(table.n_points(), table.grid())
}

/// First `(point, node, lhs, rhs)` where `check(point, node)` returns a
/// violated `lhs ≤ rhs`.
fn scan<F>(nodes: std::ops::Range<usize>, points: std::ops::Range<usize>, check: F) -> Option<(usize, usize, f64, f64)>
where
    F: Fn(usize, usize) -> Option<(f64, f64)> + Sync,
{
    points.into_par_iter().find_map_first(|i| {
        nodes.clone().find_map(|j| check(i, j).map(|(lhs, rhs)| (i, j, lhs, rhs)))
    })
}

/// Report for a pointwise inequality family: holds iff `scan` found nothing.
fn inequality_report(
    id: ConditionId,
    table: &SampledFunction,
    hit: Option<(usize, usize, f64, f64)>,
    constant: f64,
    detail: String,
) -> ConditionReport {
    let t = table.grid().samples();
    match hit {
        None => ConditionReport::new(id, true, ExtReal::clamped(constant), lattice(table)).with_detail(detail),
        Some((i, j, lhs, rhs)) => ConditionReport::new(id, false, ExtReal::clamped(constant), lattice(table))
            .with_witness(Some(Witness::at(table.points(), &[i], vec![t[j]]).with_inequality(constant, lhs, rhs)))
            .with_detail(detail),
    }
}

fn above(v: f64, slack: f64) -> f64 {
    v * (1.0 + slack)
}

/// Values strictly inside `(0, ∞)` at every grid node, with the sentinels
/// `0` at `t = 0` and `∞` at `t = ∞`.
fn zero_infty(table: &SampledFunction) -> ConditionReport {
    let n = table.n_points();
    let hit = scan(0..table.grid().len(), 0..n, |i, j| {
        let v = table.value(i, j);
        if v > 0.0 && v.is_finite() {
            None
        } else if v <= 0.0 {
            Some((f64::MIN_POSITIVE, v))
        } else {
            Some((v, f64::MAX))
        }
    });
    let sentinels = table.value_at_zero() == 0.0 && table.value_at_infinity() == f64::INFINITY;
    let mut r = inequality_report(
        ConditionId::InverseAxioms,
        table,
        hit,
        1.0,
        "values in (0, inf) on the grid; 0 at t = 0 and inf at t = inf".into(),
    );
    if !sentinels {
        r.holds = false;
        r = r.note("endpoint sentinels wrong");
    }
    r
}

/// Every row non-decreasing up to `slack`.
fn increasing(table: &SampledFunction, slack: f64) -> ConditionReport {
    let m = table.grid().len();
    let hit = scan(1..m, 0..table.n_points(), |i, j| {
        let (a, b) = (table.value(i, j - 1), table.value(i, j));
        (a > above(b, slack)).then_some((a, b))
    });
    inequality_report(ConditionId::InverseAxioms, table, hit, 1.0, "non-decreasing in t".into())
}

/// `g(t)/t^{1/p} ≤ g(s)/s^{1/p}` for consecutive nodes `s < t`, no slack.
/// Consecutive nodes suffice because the relation is transitive.
fn exact_dec(table: &SampledFunction, p: f64) -> ConditionReport {
    let t = table.grid().samples();
    let w: Vec<f64> = t.iter().map(|&s| dec_weight(s, p)).collect();
    let hit = scan(1..t.len(), 0..table.n_points(), |i, j| {
        let (a, b) = (table.value(i, j) / w[j], table.value(i, j - 1) / w[j - 1]);
        (a > b).then_some((a, b))
    });
    inequality_report(
        ConditionId::ADec,
        table,
        hit,
        1.0,
        format!("exact (Dec)_{{1/p}} with p = {p}, consecutive nodes, zero slack"),
    )
}

/// Two-sided bound `lo·a ≤ b ≤ a/lo` between tables on the first rows of
/// `b`, at nodes `nodes`.
fn claim6_bounds(
    phi_inverse: &SampledFunction,
    f: &SampledFunction,
    beta: f64,
    nodes: std::ops::Range<usize>,
    slack: f64,
) -> ConditionReport {
    let hit = scan(nodes, 0..phi_inverse.n_points(), |i, j| {
        let (v, fv) = (phi_inverse.value(i, j), f.value(i, j));
        if beta * v > above(fv, slack) {
            Some((beta * v, fv))
        } else if fv > above(v / beta, slack) {
            Some((fv, v / beta))
        } else {
            None
        }
    });
    inequality_report(
        ConditionId::Equivalence,
        f,
        hit,
        1.0 / beta,
        format!("beta phi^-1 <= f <= phi^-1 / beta on the domain for t > 1, beta = {beta:.6e}"),
    )
}

/// Per-point max of `max(a/b, b/a)` over the domain rows and all nodes.
fn ratio_constant(a: &SampledFunction, b: &SampledFunction, rows: usize) -> (f64, usize, usize) {
    let m = a.grid().len();
    let mut best = (1.0, 0, 0);
    for i in 0..rows {
        for j in 0..m {
            let (x, y) = (a.value(i, j), b.value(i, j));
            let r = if x == y { 1.0 } else { (x / y).max(y / x) };
            let r = if r.is_nan() { f64::INFINITY } else { r };
            if r > best.0 {
                best = (r, i, j);
            }
        }
    }
    best
}

/// `C ≤ bound` where `C = max(a/b, b/a)` on the domain rows.
fn comparability(a: &SampledFunction, b: &SampledFunction, rows: usize, bound: f64, slack: f64, what: &str) -> ConditionReport {
    let (c, i, j) = ratio_constant(a, b, rows);
    let holds = c <= above(bound, slack);
    let t = a.grid().samples();
    let mut r = ConditionReport::new(ConditionId::Equivalence, holds, ExtReal::clamped(c), Lattice::new(rows, a.grid()))
        .with_detail(format!("{what}: C = {c:.6e}, bound {bound:.6e}"));
    if !holds {
        r = r.with_witness(Some(
            Witness::at(a.points(), &[i], vec![t[j]]).with_inequality(bound, c, bound),
        ));
    }
    r
}

fn vacuous(id: ConditionId, table: &SampledFunction, detail: &str) -> ConditionReport {
    ConditionReport::new(id, true, ExtReal::ONE, lattice(table))
        .with_coverage(Coverage::Vacuous)
        .with_detail(detail)
}

fn upper(table: &SampledFunction) -> Result<SampledFunction> {
    let g = table.grid();
    table.restrict_grid(g.one_index()..g.len())
}

fn lower(table: &SampledFunction) -> Result<SampledFunction> {
    table.restrict_grid(0..table.grid().one_index() + 1)
}

/// `f` at `t(1 − δ)` from the defining formula against the table at `t`,
/// on a stride of nodes and points.
fn left_continuity(
    inputs: &ExtensionInputs,
    parts: &FParts,
    f: &SampledFunction,
    config: &ExtensionConfig,
) -> Result<ConditionReport> {
    let t = f.grid().samples();
    let m = t.len();
    let k = config.left_continuity_nodes.clamp(1, m);
    let stride = (m / k).max(1);
    let npts = f.n_points();
    let sample: Vec<usize> = (0..npts).step_by((npts / 64).max(1)).collect();
    let formula = FFormula {
        inputs,
        envelope: &parts.envelope.envelope,
        tol: config.checks.tol,
    };
    let delta = config.left_continuity_delta;
    let tol = config.left_continuity_tol;
    let mut worst = (0.0f64, 0, 0, 0.0, 0.0);
    for j in (0..m).step_by(stride) {
        let below = formula.eval_many(&sample, t[j] * (1.0 - delta))?;
        for (&x, &v) in sample.iter().zip(&below) {
            let at = f.value(x, j);
            let gap = (at - v).abs() / at;
            if gap > worst.0 {
                worst = (gap, x, j, v, at);
            }
        }
    }
    let holds = worst.0 <= tol;
    let mut r = ConditionReport::new(ConditionId::InverseAxioms, holds, ExtReal::clamped(worst.0), lattice(f))
        .with_coverage(Coverage::GridOnly)
        .with_detail(format!(
            "left limit at t(1 - {delta:e}) within relative {tol:e} of the table on {} nodes x {} points; worst gap {:.3e}",
            m.div_ceil(stride),
            sample.len(),
            worst.0
        ))
        .note("measurability in x: vacuous on finite samples");
    if !holds {
        let (_, x, j, v, at) = worst;
        r = r.with_witness(Some(
            Witness::at(f.points(), &[x], vec![t[j] * (1.0 - delta), t[j]]).with_inequality(1.0 + tol, v.max(at), v.min(at)),
        ));
    }
    Ok(r)
}

/// `ψ⁻¹` over the ambient cloud at grid nodes `t ≥ 1`, by the shared
/// bisection kernel.
fn psi_inverse_upper(psi: &SampledPsi, grid: &TGrid, tol: f64) -> Result<SampledFunction> {
    let cloud = psi.g().points();
    let nodes = &grid.samples()[grid.one_index()..];
    let rows: Vec<Vec<f64>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let x = cloud.point(i);
            let mut hint = 1.0;
            nodes
                .iter()
                .map(|&tau| {
                    let r = invert(&|s| psi.eval_row(i, s), x, tau, tol, hint)?;
                    if r > 0.0 && r.is_finite() {
                        hint = r;
                    }
                    Ok(r)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    SampledFunction::new(cloud.clone(), TGrid::from_samples(nodes.to_vec())?, rows.concat())
}

/// Nodes of `grid` inside `[max_x g(x, t_min), min_x g(x, t_max)]` over the
/// first `rows` points: the `t`-range on which `ψ = g⁻¹` is read off the
/// table rather than extrapolated. Falls back to `grid` when that range
/// misses 1 or has fewer than two nodes.
fn data_grid(psi: &SampledPsi, rows: usize, grid: &TGrid) -> TGrid {
    let g = psi.g();
    let last = g.grid().len() - 1;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for i in 0..rows.min(g.n_points()) {
        let row = g.row(i);
        lo = lo.max(row[0]);
        hi = hi.min(row[last]);
    }
    let nodes: Vec<f64> = grid.samples().iter().copied().filter(|&t| t >= lo && t <= hi).collect();
    if lo > 1.0 || hi < 1.0 || nodes.len() < 2 {
        return grid.clone();
    }
    TGrid::from_samples(nodes).unwrap_or_else(|_| grid.clone())
}

fn subsample(cloud: &PointCloud, k: usize) -> PointCloud {
    if cloud.len() <= k {
        return cloud.clone();
    }
    let step = cloud.len() as f64 / k as f64;
    let idx: Vec<usize> = (0..k).map(|i| (i as f64 * step) as usize).collect();
    cloud.subset(&idx)
}

pub(crate) fn certify(
    inputs: &ExtensionInputs,
    parts: &FParts,
    f: &SampledFunction,
    g: &SampledFunction,
    psi: &SampledPsi,
    config: &ExtensionConfig,
    mut notes: Vec<String>,
) -> Result<ExtensionCertificate> {
    let opts = &config.checks;
    let slack = opts.slack;
    let grid = f.grid();
    let t = grid.samples();
    let m = t.len();
    let one = grid.one_index();
    let p = inputs.p;
    let n_omega = inputs.domain.len();
    let beta = inputs.beta;
    let beta0 = inputs.beta0;
    let ambient_balls = sample_balls(&inputs.ambient, opts.ball_budget, opts.seed);

    let (f_side, psi_checks) = rayon::join(
        || -> Result<_> {
            let f2 = estimate_adec(&lower(f)?, 1.0 / p, opts.a_cap)?;
            let a_f2 = f2.constant.value();
            let f6 = claim6_bounds(&parts.phi_inverse, f, beta, one + 1..m, slack);
            let f6 = {
                let bound = (1.0 / beta).max(1.0 / (beta0 * beta0));
                let c = comparability(f, &parts.phi_inverse, n_omega, bound, slack, "f against phi^-1");
                c.and_also(&f6)
            };
            let f8 = match inputs.q {
                Some(q) => estimate_ainc(f, 1.0 / q, opts.a_cap)?,
                None => vacuous(ConditionId::AInc, f, "no (aDec)_q exponent to transport"),
            };
            let l_f8 = f8.constant.value();
            let claims = vec![
                Claim::new("f1_zero_infty", zero_infty(f)),
                Claim::new("f2_aDec_small_t", f2),
                Claim::new("f3_A0", check_a0_table(f)),
                Claim::new("f4_increasing", increasing(f, slack)),
                Claim::new("f5_left_cont_measurable", left_continuity(inputs, parts, f, config)?),
                Claim::new("f6_restriction_equiv", f6),
                Claim::new("f7_A1", check_a1_table(&upper(f)?, &ambient_balls, opts)),
                Claim::new("f8_aInc_dual", f8),
            ];
            Ok((claims, a_f2, l_f8))
        },
        || psi_claims(inputs, psi, config, &ambient_balls),
    );
    let (claims_f, a_f2, l_f8) = f_side?;
    let psi_checks = psi_checks?;

    let a_d = estimate_adec(&parts.phi_inverse, 1.0 / p, f64::INFINITY)?.constant.value();
    let claims_g = {
        let g_omega_bound = (1.0 / beta).max(a_d / beta.min(beta0 * beta0));
        let lower_bound = beta0.powi(3) / a_f2;
        let hit = scan(one + 1..m, 0..g.n_points(), |i, j| {
            let v = g.value(i, j);
            (v < lower_bound * (1.0 - slack)).then_some((lower_bound, v))
        });
        let g_floor = inequality_report(
            ConditionId::InverseAxioms,
            g,
            hit,
            lower_bound,
            format!("g >= beta0^3 / a = {lower_bound:.6e} for t > 1 (a = {a_f2:.4} from f's (aDec)_{{1/p}} on [0, 1])"),
        );
        let g_inc = increasing(g, slack);
        let g_inc = match inputs.q {
            Some(q) => {
                let r = estimate_ainc(g, 1.0 / q, opts.a_cap)?;
                let c = r.constant.value();
                let ok = r.holds && c <= 2.0 * l_f8 * (1.0 + slack);
                let mut r = r.with_detail(format!("(aInc)_{{1/q}} constant {c:.6} against 2 L = {:.6}", 2.0 * l_f8));
                r.holds = ok;
                r.and_also(&g_inc)
            }
            None => g_inc,
        };
        vec![
            Claim::new(
                "g_measurable",
                vacuous(ConditionId::InverseAxioms, g, "measurability in x: vacuous on finite samples"),
            ),
            Claim::new("g_Dec", exact_dec(g, p)),
            Claim::new(
                "g_restriction_equiv",
                comparability(g, &parts.phi_inverse, n_omega, g_omega_bound, slack, "g against phi^-1"),
            ),
            Claim::new("g_A1", check_a1_table(&upper(g)?, &ambient_balls, opts)),
            Claim::new("g_zero_infty", zero_infty(g).and_also(&g_floor)),
            Claim::new("g_increasing_aInc", g_inc),
        ]
    };

    let invariants = invariants(inputs, parts, f, g, a_f2, slack)?;
    let overall = claims_f
        .iter()
        .chain(&claims_g)
        .chain(&psi_checks)
        .all(|c| c.report.holds);
    notes.push(format!("ambient cloud: {} points ({} in the domain)", inputs.ambient.len(), n_omega));
    Ok(ExtensionCertificate {
        claims_f,
        claims_g,
        psi_checks,
        invariants,
        overall,
        notes,
    })
}

fn psi_claims(
    inputs: &ExtensionInputs,
    psi: &SampledPsi,
    config: &ExtensionConfig,
    balls: &[crate::geometry::Ball],
) -> Result<Vec<Claim>> {
    let opts = &config.checks;
    let grid = psi.g().grid();
    let ambient = &inputs.ambient;
    let psi_dyn: &dyn crate::PhiFunction = psi;
    let mut claims = vec![Claim::new(
        "weak_phi",
        check_weak_phi(psi_dyn, grid, ambient, &WeakPhiOptions::default()),
    )];
    let inv = psi_inverse_upper(psi, grid, opts.tol)?;
    claims.push(Claim::new("A0", check_a0_table(&inv)));
    claims.push(Claim::new("A1", check_a1_table(&inv, balls, opts)));
    claims.push(Claim::new("A1_Omega", check_a1_omega_table(&inv, opts)));

    let ambient_domain = SpatialDomain::new(ambient.clone(), inputs.domain.is_bounded())?;
    let b02 = inputs.beta0 * inputs.beta0;
    let a2_inputs = A2Inputs::new(inputs.a2.phi_infinity.clone())
        .with_beta2(b02 * inputs.a2.beta2)
        .with_s_threshold(inputs.a2.s_threshold)
        .with_value_threshold(inputs.beta0);
    let a2 = check_a2(psi_dyn, &ambient_domain, &a2_inputs, grid, opts)?;
    claims.push(Claim::new(
        "A2",
        a2.report.note(format!("beta2 = beta0^2 * {} = {:.6e}", inputs.a2.beta2, b02 * inputs.a2.beta2)),
    ));

    if let Some(q) = inputs.q {
        let table = SampledFunction::tabulate(psi_dyn, ambient, grid)?;
        claims.push(Claim::new("aDec", estimate_adec(&table, q, opts.a_cap)?));
    }

    let sample = subsample(inputs.domain.cloud(), config.equivalence_points);
    let eq_grid = data_grid(psi, inputs.domain.len(), grid);
    let eq = equivalence_constant(inputs.phi.as_ref(), psi_dyn, &eq_grid, &sample, config.l_max)?;
    claims.push(Claim::new(
        "equivalence",
        eq.note(format!("1/beta = {:.6}, 1/beta0^2 = {:.6}", 1.0 / inputs.beta, 1.0 / b02))
            .note(format!(
                "t restricted to the tabulated range of g: [{:.3e}, {:.3e}]",
                eq_grid.min(),
                eq_grid.max()
            )),
    ));
    Ok(claims)
}

fn invariants(
    inputs: &ExtensionInputs,
    parts: &FParts,
    f: &SampledFunction,
    g: &SampledFunction,
    a_f2: f64,
    slack: f64,
) -> Result<Vec<Claim>> {
    let grid = f.grid();
    let t = grid.samples();
    let m = t.len();
    let one = grid.one_index();
    let beta0 = inputs.beta0;
    let n = f.n_points();
    let n_omega = inputs.domain.len();
    let p = inputs.p;

    let seam = {
        let hit = scan(one..m, 0..n, |i, j| {
            let v = f.value(i, j);
            if j == one {
                (v > above(beta0, slack)).then_some((v, beta0))
            } else {
                (beta0 > above(v, slack)).then_some((beta0, v))
            }
        });
        inequality_report(
            ConditionId::A0,
            f,
            hit,
            beta0,
            format!("f(x, 1) <= beta0 <= f(x, t) for t > 1, beta0 = {beta0:.6e}"),
        )
    };

    let sandwich = {
        let hit = scan(one + 1..m, 0..n, |i, j| {
            let (v, fv) = (g.value(i, j), f.value(i, j));
            let cap = dec_weight(t[j], p) * fv;
            if beta0 > above(v, slack) {
                Some((beta0, v))
            } else if v > above(cap, slack) {
                Some((v, cap))
            } else {
                None
            }
        });
        inequality_report(
            ConditionId::InverseAxioms,
            g,
            hit,
            beta0,
            format!("beta0 <= g(x, t) <= t^(1/p) f(x, t) for t > 1, beta0 = {beta0:.6e}"),
        )
    };

    let claim6 = claim6_bounds(&parts.phi_inverse, f, inputs.beta, one + 1..m, slack);

    let off_domain = {
        let inf = &parts.infinity_inverse;
        let b02 = beta0 * beta0;
        let hit = scan(0..one + 1, n_omega..n, |i, j| {
            let (v, target) = (g.value(i, j), b02 * inf.value(0, j));
            if v > above(target, slack) {
                Some((v, target))
            } else if target > above(a_f2 * v, slack) {
                Some((target, a_f2 * v))
            } else {
                None
            }
        });
        inequality_report(
            ConditionId::Equivalence,
            g,
            hit,
            a_f2,
            format!("off the domain, g(x, t) / (beta0^2 phi_inf^-1(t)) in [1/{a_f2:.4}, 1] for t <= 1"),
        )
    };

    Ok(vec![
        Claim::new("seam", seam),
        Claim::new("g_sandwich", sandwich),
        Claim::new("claim6_bounds", claim6),
        Claim::new("off_domain_small_t", off_domain),
        Claim::new("g_exact_dec", exact_dec(g, p)),
    ])
}
