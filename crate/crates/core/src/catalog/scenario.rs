//! Scenario files: UTF-8 `key=value` lines, `#` comments.
//!
//! ```text
//! task=extend
//! family=double_phase
//! family.p=2
//! family.q=3
//! family.a=lipschitz_bump(base=0,height=0.1,center=[0,0],radius=1)
//! domain=annulus(r0=1,r1=2,points=2048)
//! grid.min=1e-6
//! grid.max=1e6
//! grid.count=1201
//! out.report=report.txt
//! ```
//!
//! [`Scenario::to_text`] writes every setting explicitly, defaults
//! included, so a report's echo reproduces the run on its own.

use std::collections::BTreeMap;
use std::fmt;

use super::domains::{DomainOptions, DomainSpec};
use super::families::FamilySpec;
use super::fields::Field;
use super::syntax::{format_vector, parse_number, parse_vector};
use crate::conditions::CheckOptions;
use crate::error::{Error, Result};
use crate::TGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Check,
    Extend,
    Chain,
    Report,
}

impl Task {
    pub fn parse(s: &str) -> std::result::Result<Task, String> {
        match s {
            "check" => Ok(Task::Check),
            "extend" => Ok(Task::Extend),
            "chain" => Ok(Task::Chain),
            "report" => Ok(Task::Report),
            other => Err(format!("unknown task `{other}`")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Check => "check",
            Task::Extend => "extend",
            Task::Chain => "chain",
            Task::Report => "report",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Human,
    Machine,
}

impl ReportFormat {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        match s {
            "human" => Ok(ReportFormat::Human),
            "machine" => Ok(ReportFormat::Machine),
            other => Err(format!("unknown report format `{other}`")),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Human => "human",
            ReportFormat::Machine => "machine",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: TGrid::DEFAULT_MIN,
            max: TGrid::DEFAULT_MAX,
            count: TGrid::DEFAULT_COUNT,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<TGrid> {
        TGrid::geometric(self.min, self.max, self.count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendSettings {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub beta2: f64,
    pub far_fraction: f64,
    pub l_max: f64,
    pub ambient_points: usize,
    pub ambient_margin: f64,
}

impl Default for ExtendSettings {
    fn default() -> Self {
        ExtendSettings {
            p: None,
            q: None,
            beta2: 1.0,
            far_fraction: 0.1,
            l_max: 1e3,
            ambient_points: 1024,
            ambient_margin: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub report: Option<String>,
    pub csv: Option<String>,
    pub format: ReportFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            report: None,
            csv: None,
            format: ReportFormat::Human,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub task: Task,
    pub family: FamilySpec,
    pub domain: DomainSpec,
    pub domain_options: DomainOptions,
    pub grid: GridSpec,
    /// `checks.seed` mirrors the scenario seed.
    pub checks: CheckOptions,
    /// Pairs sampled by the quasi-convexity estimate.
    pub pair_budget: usize,
    pub extend: ExtendSettings,
    pub chain: Option<ChainSpec>,
    pub out: OutputSpec,
}

impl Scenario {
    pub fn seed(&self) -> u64 {
        self.checks.seed
    }
}

const KEYS: &[&str] = &[
    "task",
    "family",
    "family.p",
    "family.q",
    "family.a",
    "family.w",
    "family.path",
    "domain",
    "domain.seam",
    "domain.knn",
    "domain.hat_stride",
    "grid.min",
    "grid.max",
    "grid.count",
    "seed",
    "checks.tol",
    "checks.slack",
    "checks.a_cap",
    "checks.ball_budget",
    "checks.drift_tol",
    "checks.pairs",
    "extend.p",
    "extend.q",
    "extend.beta2",
    "extend.far_fraction",
    "extend.l_max",
    "ambient.points",
    "ambient.margin",
    "chain.from",
    "chain.to",
    "chain.t",
    "out.report",
    "out.csv",
    "out.format",
];

/// `key → (line, value)`.
type Pairs = BTreeMap<String, (usize, String)>;

fn split_lines(text: &str) -> Result<Pairs> {
    let mut pairs = Pairs::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected key=value, found `{l}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::Parse {
                line,
                message: format!("unknown key `{k}`"),
            });
        }
        if let Some((first, _)) = pairs.get(k) {
            return Err(Error::Parse {
                line,
                message: format!("key `{k}` already set on line {first}"),
            });
        }
        pairs.insert(k.to_string(), (line, v.to_string()));
    }
    Ok(pairs)
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    parse_scenario_with(text, &[])
}

/// Like [`parse_scenario`], with `key=value` overrides applied on top
/// (reported as line 0 on error).
pub fn parse_scenario_with(text: &str, overrides: &[(String, String)]) -> Result<Scenario> {
    let mut pairs = split_lines(text)?;
    for (k, v) in overrides {
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Parse {
                line: 0,
                message: format!("unknown key `{k}` in override"),
            });
        }
        pairs.insert(k.clone(), (0, v.clone()));
    }
    Builder { pairs }.build()
}

struct Builder {
    pairs: Pairs,
}

impl Builder {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.pairs.remove(key)
    }

    fn with<T>(&mut self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => f(&v).map(Some).map_err(|m| Error::Parse {
                line,
                message: format!("{key}: {m}"),
            }),
        }
    }

    fn required<T>(&mut self, key: &str, f: impl FnOnce(&str) -> std::result::Result<T, String>) -> Result<T> {
        self.with(key, f)?.ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing required key `{key}`"),
        })
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        self.with(key, parse_number)
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        self.with(key, |v| v.parse::<usize>().map_err(|_| format!("`{v}` is not a count")))
    }

    fn build(mut self) -> Result<Scenario> {
        let task = self.required("task", Task::parse)?;
        let family_line = self.pairs.get("family").map_or(0, |(l, _)| *l);
        let family_id = self.required("family", |v| Ok(v.to_string()))?;
        let family = match family_id.as_str() {
            "power" => FamilySpec::Power {
                p: self.number("family.p")?.unwrap_or(2.0),
            },
            "variable_exponent" => FamilySpec::VariableExponent {
                p: self.required("family.p", Field::parse)?,
            },
            "double_phase" => FamilySpec::DoublePhase {
                p: self.number("family.p")?.unwrap_or(2.0),
                q: self.number("family.q")?.unwrap_or(3.0),
                a: self.with("family.a", Field::parse)?.unwrap_or(Field::Constant(1.0)),
            },
            "llogl" => FamilySpec::LLogL,
            "weighted_power" => FamilySpec::WeightedPower {
                p: self.number("family.p")?.unwrap_or(2.0),
                w: self.with("family.w", Field::parse)?.unwrap_or(Field::Constant(1.0)),
            },
            "table" => FamilySpec::Table {
                path: self.required("family.path", |v| Ok(v.to_string()))?,
            },
            other => {
                return Err(Error::Parse {
                    line: family_line,
                    message: format!("unknown family `{other}`"),
                })
            }
        };
        for key in ["family.p", "family.q", "family.a", "family.w", "family.path"] {
            if let Some((line, _)) = self.pairs.get(key) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("`{key}` does not apply to family `{family_id}`"),
                });
            }
        }
        if let Err(e) = family.validate() {
            return Err(Error::Parse {
                line: family_line,
                message: e.to_string(),
            });
        }

        let domain = self.required("domain", DomainSpec::parse)?;
        let mut domain_options = DomainOptions::default();
        domain_options.seam = self.number("domain.seam")?;
        if let Some(k) = self.count("domain.knn")? {
            domain_options.knn = k;
        }
        if let Some(s) = self.count("domain.hat_stride")? {
            domain_options.hat_stride = s.max(1);
        }

        let mut grid = GridSpec::default();
        if let Some(v) = self.number("grid.min")? {
            grid.min = v;
        }
        if let Some(v) = self.number("grid.max")? {
            grid.max = v;
        }
        if let Some(v) = self.count("grid.count")? {
            grid.count = v;
        }
        grid.build().map_err(|e| Error::Parse {
            line: 0,
            message: format!("grid: {e}"),
        })?;

        let mut checks = CheckOptions::default();
        if let Some(s) = self.with("seed", |v| v.parse::<u64>().map_err(|_| format!("`{v}` is not a seed")))? {
            checks.seed = s;
        }
        if let Some(v) = self.number("checks.tol")? {
            checks.tol = v;
        }
        if let Some(v) = self.number("checks.slack")? {
            checks.slack = v;
        }
        if let Some(v) = self.number("checks.a_cap")? {
            checks.a_cap = v;
        }
        if let Some(v) = self.count("checks.ball_budget")? {
            checks.ball_budget = v;
        }
        if let Some(v) = self.number("checks.drift_tol")? {
            checks.drift_tol = v;
        }
        let pair_budget = self.count("checks.pairs")?.unwrap_or(64);

        let mut extend = ExtendSettings::default();
        extend.p = self.number("extend.p")?;
        extend.q = self.number("extend.q")?;
        if let Some(v) = self.number("extend.beta2")? {
            extend.beta2 = v;
        }
        if let Some(v) = self.number("extend.far_fraction")? {
            extend.far_fraction = v;
        }
        if let Some(v) = self.number("extend.l_max")? {
            extend.l_max = v;
        }
        if let Some(v) = self.count("ambient.points")? {
            extend.ambient_points = v;
        }
        if let Some(v) = self.number("ambient.margin")? {
            extend.ambient_margin = v;
        }

        let from = self.with("chain.from", parse_vector)?;
        let to = self.with("chain.to", parse_vector)?;
        let t = self.number("chain.t")?;
        let chain = match (from, to, t) {
            (Some(from), Some(to), Some(t)) => Some(ChainSpec { from, to, t }),
            (None, None, None) => None,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    message: "chain.from, chain.to and chain.t go together".into(),
                })
            }
        };
        if task == Task::Chain && chain.is_none() {
            return Err(Error::Parse {
                line: 0,
                message: "task=chain needs chain.from, chain.to and chain.t".into(),
            });
        }

        let out = OutputSpec {
            report: self.with("out.report", |v| Ok(v.to_string()))?,
            csv: self.with("out.csv", |v| Ok(v.to_string()))?,
            format: self.with("out.format", ReportFormat::parse)?.unwrap_or(ReportFormat::Human),
        };
        debug_assert!(self.pairs.is_empty(), "unconsumed keys: {:?}", self.pairs.keys());

        let scenario = Scenario {
            task,
            family,
            domain,
            domain_options,
            grid,
            checks,
            pair_budget,
            extend,
            chain,
            out,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| {
            Err(Error::Parse {
                line: 0,
                message: m.to_string(),
            })
        };
        let c = &self.checks;
        if !(c.tol > 0.0) || !(c.slack >= 0.0) || !(c.a_cap >= 1.0) || !(0.0..1.0).contains(&c.drift_tol) {
            return bad("checks: need tol > 0, slack >= 0, a_cap >= 1, 0 <= drift_tol < 1");
        }
        let e = &self.extend;
        if let Some(p) = e.p {
            if !(p >= 1.0) {
                return bad("extend.p must be >= 1");
            }
        }
        if !(e.beta2 > 0.0 && e.beta2 <= 1.0) {
            return bad("extend.beta2 must lie in (0, 1]");
        }
        if !(e.far_fraction > 0.0 && e.far_fraction < 1.0) {
            return bad("extend.far_fraction must lie in (0, 1)");
        }
        if !(e.l_max >= 1.0) || !(e.ambient_margin > 0.0) {
            return bad("extend.l_max must be >= 1 and ambient.margin > 0");
        }
        if let Some(ch) = &self.chain {
            if ch.from.len() != ch.to.len() || !(ch.t > 0.0) {
                return bad("chain: endpoints of equal dimension and t > 0 required");
            }
        }
        Ok(())
    }

    /// Canonical text; parses back to an equal scenario.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| lines.push((k.to_string(), v));
        put("task", self.task.to_string());
        put("family", self.family.id().to_string());
        match &self.family {
            FamilySpec::Power { p } => put("family.p", p.to_string()),
            FamilySpec::VariableExponent { p } => put("family.p", p.to_string()),
            FamilySpec::DoublePhase { p, q, a } => {
                put("family.p", p.to_string());
                put("family.q", q.to_string());
                put("family.a", a.to_string());
            }
            FamilySpec::LLogL => {}
            FamilySpec::WeightedPower { p, w } => {
                put("family.p", p.to_string());
                put("family.w", w.to_string());
            }
            FamilySpec::Table { path } => put("family.path", path.clone()),
        }
        put("domain", self.domain.to_string());
        if let Some(s) = self.domain_options.seam {
            put("domain.seam", s.to_string());
        }
        put("domain.knn", self.domain_options.knn.to_string());
        put("domain.hat_stride", self.domain_options.hat_stride.to_string());
        put("grid.min", self.grid.min.to_string());
        put("grid.max", self.grid.max.to_string());
        put("grid.count", self.grid.count.to_string());
        put("seed", self.checks.seed.to_string());
        put("checks.tol", self.checks.tol.to_string());
        put("checks.slack", self.checks.slack.to_string());
        put("checks.a_cap", self.checks.a_cap.to_string());
        put("checks.ball_budget", self.checks.ball_budget.to_string());
        put("checks.drift_tol", self.checks.drift_tol.to_string());
        put("checks.pairs", self.pair_budget.to_string());
        if let Some(p) = self.extend.p {
            put("extend.p", p.to_string());
        }
        if let Some(q) = self.extend.q {
            put("extend.q", q.to_string());
        }
        put("extend.beta2", self.extend.beta2.to_string());
        put("extend.far_fraction", self.extend.far_fraction.to_string());
        put("extend.l_max", self.extend.l_max.to_string());
        put("ambient.points", self.extend.ambient_points.to_string());
        put("ambient.margin", self.extend.ambient_margin.to_string());
        if let Some(c) = &self.chain {
            put("chain.from", format_vector(&c.from));
            put("chain.to", format_vector(&c.to));
            put("chain.t", c.t.to_string());
        }
        if let Some(r) = &self.out.report {
            put("out.report", r.clone());
        }
        if let Some(c) = &self.out.csv {
            put("out.csv", c.clone());
        }
        put("out.format", self.out.format.as_str().to_string());
        lines.into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
