//! Reports: everything a run produced, plus the scenario echo that
//! reproduces it.

use std::fmt::Write as _;

use super::scenario::ReportFormat;
use crate::extension::ExtensionCertificate;
use crate::phi_core::report::{ConditionReport, Witness};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub task: String,
    /// Canonical scenario text.
    pub scenario: String,
    pub seed: u64,
    /// Lattice and domain metadata.
    pub lattice: Vec<(String, String)>,
    /// Condition verdicts, in run order.
    pub checks: Vec<(String, ConditionReport)>,
    /// Scalar results that are not verdicts.
    pub values: Vec<(String, String)>,
    pub certificate: Option<ExtensionCertificate>,
    /// The failing input check when an extension was refused.
    pub refusal: Option<ConditionReport>,
    /// Wall-clock seconds per phase. Not part of the emitted text, which
    /// must be identical across runs.
    pub timing: Vec<(String, f64)>,
}

impl Report {
    /// `true` when every check, the certificate and the absence of a
    /// refusal say so.
    pub fn verdict(&self) -> bool {
        self.refusal.is_none()
            && self.checks.iter().all(|(_, r)| r.holds)
            && self.certificate.as_ref().is_none_or(|c| c.overall)
    }

    /// `(id, report)` of every failed item.
    pub fn failures(&self) -> Vec<(String, &ConditionReport)> {
        let mut out: Vec<(String, &ConditionReport)> = Vec::new();
        if let Some(r) = &self.refusal {
            out.push(("refusal".into(), r));
        }
        for (id, r) in &self.checks {
            if !r.holds {
                out.push((id.clone(), r));
            }
        }
        if let Some(c) = &self.certificate {
            for claim in c.failures() {
                out.push((claim.id.clone(), &claim.report));
            }
        }
        out
    }

    fn is_empty(&self) -> bool {
        self.checks.is_empty() && self.values.is_empty() && self.certificate.is_none() && self.refusal.is_none()
    }
}

fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn points(w: &Witness) -> String {
    w.points.iter().map(|p| vector(p)).collect::<Vec<_>>().join(";")
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}

fn machine_block(out: &mut String, header: &str, r: &ConditionReport) {
    let _ = writeln!(out, "[{header}]");
    let _ = writeln!(out, "condition={}", r.condition);
    let _ = writeln!(out, "holds={}", r.holds);
    let _ = writeln!(out, "constant={}", r.constant);
    let _ = writeln!(out, "coverage={}", r.coverage);
    let _ = writeln!(
        out,
        "lattice={}x{} t=[{},{}]",
        r.lattice.points, r.lattice.grid_len, r.lattice.t_min, r.lattice.t_max
    );
    let _ = writeln!(out, "detail={}", one_line(&r.detail));
    for n in &r.notes {
        let _ = writeln!(out, "note={}", one_line(n));
    }
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "witness.points={}", points(w));
        let _ = writeln!(out, "witness.t={}", vector(&w.t));
        if let Some(b) = &w.ball {
            let _ = writeln!(out, "witness.ball={} r={}", vector(&b.center), b.radius);
        }
        let _ = writeln!(out, "witness.tested_constant={}", w.tested_constant);
        let _ = writeln!(out, "witness.lhs={}", w.lhs);
        let _ = writeln!(out, "witness.rhs={}", w.rhs);
        let _ = writeln!(out, "witness.violation={}", w.violation());
    }
}

fn emit_machine(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[report]");
    let _ = writeln!(out, "task={}", r.task);
    let _ = writeln!(out, "verdict={}", if r.verdict() { "holds" } else { "fails" });
    let _ = writeln!(out, "seed={}", r.seed);
    let _ = writeln!(out, "[scenario]");
    out.push_str(&r.scenario);
    if !r.lattice.is_empty() {
        let _ = writeln!(out, "[lattice]");
        for (k, v) in &r.lattice {
            let _ = writeln!(out, "{k}={v}");
        }
    }
    if r.is_empty() {
        return out;
    }
    if !r.values.is_empty() {
        let _ = writeln!(out, "[values]");
        for (k, v) in &r.values {
            let _ = writeln!(out, "{k}={v}");
        }
    }
    for (id, c) in &r.checks {
        machine_block(&mut out, &format!("check {id}"), c);
    }
    if let Some(c) = &r.refusal {
        machine_block(&mut out, "refusal", c);
    }
    if let Some(cert) = &r.certificate {
        let _ = writeln!(out, "[certificate]");
        let _ = writeln!(out, "overall={}", cert.overall);
        for n in &cert.notes {
            let _ = writeln!(out, "note={}", one_line(n));
        }
        for (group, claims) in [("f", &cert.claims_f), ("g", &cert.claims_g), ("psi", &cert.psi_checks)] {
            for c in claims {
                machine_block(&mut out, &format!("claim {group}.{}", c.id), &c.report);
            }
        }
        for c in &cert.invariants {
            machine_block(&mut out, &format!("invariant {}", c.id), &c.report);
        }
    }
    let failures = r.failures();
    if !failures.is_empty() {
        let _ = writeln!(out, "[failures]");
        for (id, _) in failures {
            let _ = writeln!(out, "failure={id}");
        }
    }
    out
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn human_row(out: &mut String, id: &str, r: &ConditionReport) {
    let _ = writeln!(
        out,
        "  {:<26} {:<5} {:<13} {:<9} {}",
        id,
        yes(r.holds),
        format!("{:.6e}", r.constant.value()),
        r.coverage.to_string(),
        one_line(&r.detail)
    );
}

fn human_witness(out: &mut String, id: &str, r: &ConditionReport) {
    let _ = writeln!(out, "  {id}: {} ({})", r.condition, one_line(&r.detail));
    match &r.witness {
        Some(w) => {
            let _ = writeln!(out, "    at x = {}", points(w));
            let _ = writeln!(out, "    t = {}", vector(&w.t));
            if let Some(b) = &w.ball {
                let _ = writeln!(out, "    ball center {} radius {}", vector(&b.center), b.radius);
            }
            let _ = writeln!(
                out,
                "    constant {:e}: lhs {:e} > rhs {:e} (ratio {:e})",
                w.tested_constant,
                w.lhs,
                w.rhs,
                w.violation()
            );
        }
        None => {
            let _ = writeln!(out, "    no witness");
        }
    }
}

fn emit_human(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "phiext report: {} (verdict: {})",
        r.task,
        if r.verdict() { "holds" } else { "FAILS" }
    );
    let _ = writeln!(out, "seed: {}", r.seed);
    let _ = writeln!(out);
    let _ = writeln!(out, "scenario");
    for l in r.scenario.lines() {
        let _ = writeln!(out, "  {l}");
    }
    if !r.lattice.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "lattice");
        for (k, v) in &r.lattice {
            let _ = writeln!(out, "  {k:<26} {v}");
        }
    }
    if r.is_empty() {
        return out;
    }
    if !r.values.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "values");
        for (k, v) in &r.values {
            let _ = writeln!(out, "  {k:<26} {v}");
        }
    }
    let header = |out: &mut String, title: &str| {
        let _ = writeln!(out);
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "  {:<26} {:<5} {:<13} {:<9} detail", "id", "holds", "constant", "coverage");
    };
    if !r.checks.is_empty() {
        header(&mut out, "checks");
        for (id, c) in &r.checks {
            human_row(&mut out, id, c);
        }
    }
    if let Some(c) = &r.refusal {
        let _ = writeln!(out);
        let _ = writeln!(out, "extension refused");
        human_row(&mut out, "input", c);
    }
    if let Some(cert) = &r.certificate {
        header(&mut out, &format!("certificate (overall: {})", yes(cert.overall)));
        for c in cert.claims() {
            human_row(&mut out, &c.id, &c.report);
        }
        header(&mut out, "invariants");
        for c in &cert.invariants {
            human_row(&mut out, &c.id, &c.report);
        }
        if !cert.notes.is_empty() {
            let _ = writeln!(out);
            let _ = writeln!(out, "notes");
            for n in &cert.notes {
                let _ = writeln!(out, "  {}", one_line(n));
            }
        }
    }
    let failures = r.failures();
    if !failures.is_empty() {
        let _ = writeln!(out);
        let _ = writeln!(out, "failures");
        for (id, c) in failures {
            human_witness(&mut out, &id, c);
        }
    }
    out
}

/// Deterministic text of `report`.
pub fn emit_report(report: &Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Human => emit_human(report),
        ReportFormat::Machine => emit_machine(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{Claim, ExtensionCertificate};
    use crate::phi_core::report::{ConditionId, Lattice};
    use crate::{ExtReal, TGrid};

    fn base() -> Report {
        Report {
            task: "check".into(),
            scenario: "task=check\n".into(),
            ..Report::default()
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let text = emit_report(&base(), ReportFormat::Machine);
        assert_eq!(text, "[report]\ntask=check\nverdict=holds\nseed=0\n[scenario]\ntask=check\n");
        let human = emit_report(&base(), ReportFormat::Human);
        assert!(!human.contains("checks"));
    }

    #[test]
    fn failed_claim_is_listed_with_witness() {
        let grid = TGrid::geometric(0.1, 10.0, 5).unwrap();
        let ok = ConditionReport::new(ConditionId::A0, true, ExtReal::ONE, Lattice::new(1, &grid));
        let bad = ConditionReport::new(ConditionId::A1, false, ExtReal::ZERO, Lattice::new(1, &grid)).with_witness(Some(
            Witness::new(vec![vec![0.5, 0.25]], vec![4.0]).with_inequality(0.5, 3.0, 1.0),
        ));
        let mut r = base();
        r.certificate = Some(ExtensionCertificate {
            claims_f: vec![Claim {
                id: "f3_A0".into(),
                report: ok,
            }],
            claims_g: vec![Claim {
                id: "g_A1".into(),
                report: bad,
            }],
            psi_checks: vec![],
            invariants: vec![],
            overall: false,
            notes: vec![],
        });
        assert!(!r.verdict());
        let m = emit_report(&r, ReportFormat::Machine);
        assert!(m.contains("[failures]\nfailure=g_A1\n"), "{m}");
        assert!(m.contains("witness.points=[0.5,0.25]"));
        let h = emit_report(&r, ReportFormat::Human);
        let tail = &h[h.find("failures").unwrap()..];
        assert!(tail.contains("g_A1") && tail.contains("[0.5,0.25]") && tail.contains("lhs 3e0"), "{tail}");
    }
}
