//! Grid CSV: header `x_1,..,x_n,t,value`, one row per (point, node),
//! point-major. `∞` is written `inf`; numbers use Rust's shortest
//! round-trip formatting, so reading a file back is bit-exact.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::phi_core::phi::PhiFunction;
use crate::{SampledFunction, TGrid};

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            line: 0,
            message: format!("{}: {other:?}", path.display()),
        },
    }
}

pub fn write_grid_csv<W: Write>(table: &SampledFunction, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let n = table.points().dim();
    let mut header: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    header.push("t".into());
    header.push("value".into());
    w.write_record(&header)?;
    let t = table.grid().samples();
    for (i, x) in table.points().iter().enumerate() {
        for (j, &s) in t.iter().enumerate() {
            let mut rec: Vec<String> = x.iter().map(|c| c.to_string()).collect();
            rec.push(s.to_string());
            rec.push(table.value(i, j).to_string());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `table` to `path`.
pub fn emit_grid_csv(table: &SampledFunction, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_grid_csv(table, std::io::BufWriter::new(file)).map_err(|e| csv_error(path, e))
}

/// Tabulates `phi` on `points × grid` and writes it to `path`.
pub fn emit_phi_csv(phi: &dyn PhiFunction, points: &PointCloud, grid: &TGrid, path: impl AsRef<Path>) -> Result<()> {
    emit_grid_csv(&SampledFunction::tabulate(phi, points, grid)?, path)
}

/// Parses grid CSV text. Every point must carry the same increasing list
/// of `t` values.
pub fn parse_grid_csv<R: Read>(input: R) -> Result<SampledFunction> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let cols = header.len();
    if cols < 3 || &header[cols - 2] != "t" || &header[cols - 1] != "value" {
        return Err(Error::Parse {
            line: 1,
            message: "header must be x_1,..,x_n,t,value".into(),
        });
    }
    let n = cols - 2;
    let mut points = PointCloud::new(n);
    let mut nodes: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    let mut current: Option<Vec<f64>> = None;
    let mut k = 0usize;
    for (row, rec) in r.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let nums = rec
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{s}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != cols {
            return Err(Error::Parse {
                line,
                message: format!("expected {cols} fields, found {}", nums.len()),
            });
        }
        let (x, t, v) = (&nums[..n], nums[n], nums[n + 1]);
        if current.as_deref() != Some(x) {
            if current.is_some() && k != nodes.len() {
                return Err(Error::Parse {
                    line,
                    message: "point has fewer t values than the first point".into(),
                });
            }
            points.try_push(x)?;
            current = Some(x.to_vec());
            k = 0;
        }
        if points.len() == 1 {
            nodes.push(t);
        } else if k >= nodes.len() || nodes[k] != t {
            return Err(Error::Parse {
                line,
                message: format!("t = {t} does not match the first point's t values"),
            });
        }
        values.push(v);
        k += 1;
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    if k != nodes.len() {
        return Err(Error::Parse {
            line: 0,
            message: "last point has fewer t values than the first point".into(),
        });
    }
    SampledFunction::new(points, TGrid::from_samples(nodes)?, values)
}

pub fn read_grid_csv(path: impl AsRef<Path>) -> Result<SampledFunction> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_grid_csv(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// A user-supplied table used as a Φ-function.
///
/// At grid nodes the stored value is returned exactly. Between nodes the
/// value is interpolated linearly in `t`; below the first node it falls
/// linearly to `0`, above the last it grows linearly, so a table satisfying
/// (aInc)₁ on the grid keeps it. Points not in the table use the nearest
/// table point.
#[derive(Debug, Clone)]
pub struct TablePhi {
    table: SampledFunction,
    index: HashMap<Vec<u64>, usize>,
    label: String,
}

impl TablePhi {
    pub fn new(table: SampledFunction, label: impl Into<String>) -> Self {
        let index = table
            .points()
            .iter()
            .enumerate()
            .map(|(i, x)| (bits(x), i))
            .collect();
        TablePhi {
            table,
            index,
            label: label.into(),
        }
    }

    pub fn table(&self) -> &SampledFunction {
        &self.table
    }

    fn row_of(&self, x: &[f64]) -> usize {
        if let Some(&i) = self.index.get(&bits(x)) {
            return i;
        }
        let pts = self.table.points();
        (0..pts.len())
            .min_by(|&a, &b| {
                crate::geometry::distance(pts.point(a), x).total_cmp(&crate::geometry::distance(pts.point(b), x))
            })
            .expect("table has points")
    }
}

fn bits(x: &[f64]) -> Vec<u64> {
    x.iter().map(|c| if *c == 0.0 { 0 } else { c.to_bits() }).collect()
}

impl PhiFunction for TablePhi {
    fn dimension(&self) -> usize {
        self.table.points().dim()
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        let row = self.table.row(self.row_of(x));
        let s = self.table.grid().samples();
        let j = s.partition_point(|&v| v < t);
        if j < s.len() && s[j] == t {
            return row[j];
        }
        if j == 0 {
            return row[0] * t / s[0];
        }
        if j == s.len() {
            let last = s.len() - 1;
            return row[last] * t / s[last];
        }
        let w = (t - s[j - 1]) / (s[j] - s[j - 1]);
        if row[j] == f64::INFINITY {
            return if w > 0.0 { f64::INFINITY } else { row[j - 1] };
        }
        row[j - 1] + w * (row[j] - row[j - 1])
    }

    fn is_spatial(&self) -> bool {
        self.table.n_points() > 1
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}
