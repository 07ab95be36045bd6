//! Built-in families and domains, scenario files, reports, grid CSV and
//! the scenario runner behind the CLI.

mod csv;
mod domains;
mod families;
mod fields;
mod report;
mod runner;
mod scenario;
mod syntax;

pub use self::csv::{emit_grid_csv, emit_phi_csv, parse_grid_csv, read_grid_csv, write_grid_csv, TablePhi};
pub use domains::{
    ambient_complement, build_domain, parse_domain_file, read_domain_file, BuiltDomain, DomainOptions, DomainSpec,
};
pub use families::{make_family, Family, FamilySpec};
pub use fields::Field;
pub use report::{emit_report, Report};
pub use runner::run_scenario;
pub use scenario::{
    parse_scenario, parse_scenario_with, ChainSpec, ExtendSettings, GridSpec, OutputSpec, ReportFormat, Scenario,
    Task,
};
pub use syntax::Term;
