use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::phi_core::phi::PhiFunction;
use crate::phi_core::report::{ConditionId, ConditionReport, Lattice, Witness};
use crate::{ExtReal, SampledFunction, TGrid, SLACK};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Direction {
    Inc,
    Dec,
}

/// Sharpest pair of one scan: `ln a` and where it occurred.
#[derive(Clone, Copy, Debug)]
struct Scan {
    log_a: f64,
    at: Option<(usize, usize, usize)>,
}

fn log_value(v: f64) -> f64 {
    if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        v.ln()
    }
}

/// One O(N) sweep of a row of `ln g` values.
///
/// Inc: `max_{s<t} L_s − L_t` via a running prefix maximum.
/// Dec: `max_{s<t} L_t − L_s` via a running prefix minimum.
/// Here `L = ln g − e ln t`; `0/0` and `∞/∞` count as ratio 1.
fn scan_row(
    lnv: &[f64],
    lnt: &[f64],
    e: f64,
    dir: Direction,
    point: usize,
    x: &[f64],
) -> Result<Scan> {
    let mut best = Scan {
        log_a: 0.0,
        at: None,
    };
    match dir {
        Direction::Inc => {
            let (mut pm, mut pm_at) = (f64::NEG_INFINITY, 0);
            for j in 0..lnv.len() {
                let l = if lnv[j].is_finite() { lnv[j] - e * lnt[j] } else { lnv[j] };
                if l == f64::NEG_INFINITY {
                    if pm > f64::NEG_INFINITY {
                        return Err(Error::Structural(format!(
                            "zero denominator at x = {x:?}, t = {} after a positive value",
                            lnt[j].exp()
                        )));
                    }
                } else if l.is_finite() {
                    let d = if pm == f64::INFINITY { f64::INFINITY } else { pm - l };
                    if pm > f64::NEG_INFINITY && d > best.log_a {
                        best = Scan {
                            log_a: d,
                            at: Some((point, pm_at, j)),
                        };
                    }
                }
                if l > pm {
                    pm = l;
                    pm_at = j;
                }
            }
        }
        Direction::Dec => {
            let (mut pm, mut pm_at) = (f64::INFINITY, 0);
            for j in 0..lnv.len() {
                let l = if lnv[j].is_finite() { lnv[j] - e * lnt[j] } else { lnv[j] };
                if l == f64::INFINITY {
                    if pm < f64::INFINITY {
                        best = Scan {
                            log_a: f64::INFINITY,
                            at: Some((point, pm_at, j)),
                        };
                        return Ok(best);
                    }
                } else if l.is_finite() {
                    if pm == f64::NEG_INFINITY {
                        return Err(Error::Structural(format!(
                            "zero denominator at x = {x:?}, t = {} before a positive value",
                            lnt[pm_at].exp()
                        )));
                    }
                    if pm < f64::INFINITY && l - pm > best.log_a {
                        best = Scan {
                            log_a: l - pm,
                            at: Some((point, pm_at, j)),
                        };
                    }
                }
                if l < pm {
                    pm = l;
                    pm_at = j;
                }
            }
        }
    }
    Ok(best)
}

/// `ln` of every table value plus `ln t` of the grid.
struct LogTable<'a> {
    table: &'a SampledFunction,
    lnv: Vec<f64>,
    lnt: Vec<f64>,
}

impl<'a> LogTable<'a> {
    fn new(table: &'a SampledFunction) -> Self {
        LogTable {
            table,
            lnv: table.values().iter().map(|&v| log_value(v)).collect(),
            lnt: table.grid().samples().iter().map(|t| t.ln()).collect(),
        }
    }

    fn scan(&self, e: f64, dir: Direction) -> Result<Scan> {
        let m = self.lnt.len();
        let scans: Vec<Result<Scan>> = (0..self.table.n_points())
            .into_par_iter()
            .map(|i| {
                scan_row(
                    &self.lnv[i * m..(i + 1) * m],
                    &self.lnt,
                    e,
                    dir,
                    i,
                    self.table.points().point(i),
                )
            })
            .collect();
        let mut best = Scan {
            log_a: 0.0,
            at: None,
        };
        for s in scans {
            let s = s?;
            if s.log_a > best.log_a {
                best = s;
            }
        }
        Ok(best)
    }
}

fn report(
    table: &SampledFunction,
    e: f64,
    dir: Direction,
    scan: Scan,
    a_cap: f64,
) -> ConditionReport {
    let a = scan.log_a.exp();
    let holds = a <= a_cap * (1.0 + SLACK);
    let (id, name) = match dir {
        Direction::Inc => (ConditionId::AInc, "aInc"),
        Direction::Dec => (ConditionId::ADec, "aDec"),
    };
    let lattice = Lattice::new(table.n_points(), table.grid());
    let witness = scan.at.map(|(i, s, t)| {
        let grid = table.grid().samples();
        // the inequality g(s)/s^e ≤ a g(t)/t^e (Inc) or its mirror, divided
        // through by its right-hand side's g-factor
        let tested = if holds { a } else { a_cap };
        Witness::at(table.points(), &[i], vec![grid[s], grid[t]]).with_inequality(tested, a, tested)
    });
    ConditionReport::new(id, holds, ExtReal::clamped(a), lattice)
        .with_witness(witness)
        .with_detail(format!("({name})_{e} constant {a:.6e} against cap {a_cap}"))
}

fn check_exponent(e: f64) -> Result<()> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::Config(format!("growth exponent {e} must be positive and finite")));
    }
    Ok(())
}

/// (aInc)_p constant `a = max_{s<t} [g(s)/s^p] / [g(t)/t^p]` per point,
/// maximised over the table. Holds iff `a ≤ a_cap`.
pub fn estimate_ainc(table: &SampledFunction, p: f64, a_cap: f64) -> Result<ConditionReport> {
    check_exponent(p)?;
    let lt = LogTable::new(table);
    Ok(report(table, p, Direction::Inc, lt.scan(p, Direction::Inc)?, a_cap))
}

/// (aDec)_q constant `a = max_{s<t} [g(t)/t^q] / [g(s)/s^q]`.
pub fn estimate_adec(table: &SampledFunction, q: f64, a_cap: f64) -> Result<ConditionReport> {
    check_exponent(q)?;
    let lt = LogTable::new(table);
    Ok(report(table, q, Direction::Dec, lt.scan(q, Direction::Dec)?, a_cap))
}

pub fn estimate_ainc_phi(
    phi: &dyn PhiFunction,
    grid: &TGrid,
    points: &PointCloud,
    p: f64,
    a_cap: f64,
) -> Result<ConditionReport> {
    estimate_ainc(&SampledFunction::tabulate(phi, points, grid)?, p, a_cap)
}

pub fn estimate_adec_phi(
    phi: &dyn PhiFunction,
    grid: &TGrid,
    points: &PointCloud,
    q: f64,
    a_cap: f64,
) -> Result<ConditionReport> {
    estimate_adec(&SampledFunction::tabulate(phi, points, grid)?, q, a_cap)
}

/// Largest (aInc) exponent and smallest (aDec) exponent with constant at
/// most `a_cap`. Infinite bounds mean the search range `[0, 1024]` was
/// exhausted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentRange {
    pub p_sup: f64,
    pub q_inf: f64,
    pub a_cap: f64,
}

const EXPONENT_CEIL: f64 = 1024.0;

pub fn exponent_range(
    phi: &dyn PhiFunction,
    grid: &TGrid,
    points: &PointCloud,
    a_cap: f64,
) -> Result<ExponentRange> {
    exponent_range_table(&SampledFunction::tabulate(phi, points, grid)?, a_cap)
}

pub fn exponent_range_table(table: &SampledFunction, a_cap: f64) -> Result<ExponentRange> {
    if !(a_cap >= 1.0) {
        return Err(Error::Config(format!("a_cap = {a_cap} must be at least 1")));
    }
    let lt = LogTable::new(table);
    let cap = a_cap.ln() + SLACK;
    let inc_ok = |p: f64| lt.scan(p, Direction::Inc).map(|s| s.log_a <= cap);
    let dec_ok = |q: f64| lt.scan(q, Direction::Dec).map(|s| s.log_a <= cap);

    // the (aInc) constant grows with p, the (aDec) constant shrinks with q
    let p_sup = if !inc_ok(0.0)? {
        0.0
    } else {
        let mut hi = 1.0;
        while hi < EXPONENT_CEIL && inc_ok(hi)? {
            hi *= 2.0;
        }
        if inc_ok(hi)? {
            f64::INFINITY
        } else {
            let mut lo = hi / 2.0;
            if hi == 1.0 {
                lo = 0.0;
            }
            bisect(lo, hi, |p| inc_ok(p))?
        }
    };
    let q_inf = if dec_ok(0.0)? {
        0.0
    } else {
        let mut hi = 1.0;
        while hi < EXPONENT_CEIL && !dec_ok(hi)? {
            hi *= 2.0;
        }
        if !dec_ok(hi)? {
            f64::INFINITY
        } else {
            let lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
            // invariant: !ok(lo), ok(hi); return the passing end
            let mut lo = lo;
            let mut hi = hi;
            while hi - lo > 1e-9 * hi.max(1.0) {
                let mid = 0.5 * (lo + hi);
                if dec_ok(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        }
    };
    Ok(ExponentRange { p_sup, q_inf, a_cap })
}

/// Largest point of `[lo, hi]` where `ok` holds, given `ok(lo)` and `!ok(hi)`.
fn bisect(mut lo: f64, mut hi: f64, ok: impl Fn(f64) -> Result<bool>) -> Result<f64> {
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(f: impl Fn(f64) -> f64, grid: &TGrid) -> SampledFunction {
        let values = grid.samples().iter().map(|&t| f(t)).collect();
        SampledFunction::new(PointCloud::from_points(1, &[[0.0]]).unwrap(), grid.clone(), values)
            .unwrap()
    }

    #[test]
    fn exact_power() {
        let g = TGrid::default();
        let t2 = table(|t| t * t, &g);
        let r = estimate_ainc(&t2, 2.0, 10.0).unwrap();
        assert!(r.holds);
        assert!((r.constant.value() - 1.0).abs() < 1e-12);
        assert!((estimate_adec(&t2, 2.0, 10.0).unwrap().constant.value() - 1.0).abs() < 1e-12);
        let bad = estimate_adec(&t2, 1.0, 10.0).unwrap();
        assert!(!bad.holds);
        assert!(bad.witness.unwrap().violation() > 1.0 + SLACK);
    }

    #[test]
    fn linear_plus_quadratic() {
        let g = TGrid::default();
        let r = estimate_ainc(&table(|t| t * t + t, &g), 1.0, 10.0).unwrap();
        assert!((r.constant.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_after_positive_is_structural() {
        let g = TGrid::geometric(0.1, 10.0, 5).unwrap();
        let t = table(|t| if t > 1.0 { 0.0 } else { t }, &g);
        assert!(matches!(estimate_ainc(&t, 1.0, 10.0), Err(Error::Structural(_))));
    }

    #[test]
    fn leading_zeros_are_fine_for_inc() {
        let g = TGrid::geometric(0.1, 10.0, 9).unwrap();
        let t = table(|t| if t < 1.0 { 0.0 } else { t }, &g);
        assert!(estimate_ainc(&t, 1.0, 10.0).unwrap().holds);
    }

    #[test]
    fn power_range() {
        let g = TGrid::default();
        let r = exponent_range_table(&table(|t| t * t, &g), 1.0).unwrap();
        assert!((r.p_sup - 2.0).abs() < 1e-6 && (r.q_inf - 2.0).abs() < 1e-6, "{r:?}");
    }
}
