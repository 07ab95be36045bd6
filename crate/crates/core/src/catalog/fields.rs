//! Closed-form coefficient and exponent fields `x ↦ a(x)`.

use std::fmt;

use super::syntax::{format_vector, parse_number, Term};
use crate::geometry::distance;

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Constant(f64),
    /// `clamp(offset + slope · x, min, max)`.
    Affine {
        offset: f64,
        slope: Vec<f64>,
        min: f64,
        max: f64,
    },
    /// `base + height · max(0, 1 − |x − center| / radius)`.
    LipschitzBump {
        base: f64,
        height: f64,
        center: Vec<f64>,
        radius: f64,
    },
    /// `low` where `x[axis] < at`, `high` elsewhere.
    Jump {
        low: f64,
        high: f64,
        axis: usize,
        at: f64,
    },
    /// `base + amplitude / (1 + |x|)`.
    Radial { base: f64, amplitude: f64 },
    /// `base + amplitude · sin(frequency · |x|)`.
    Oscillating {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl Field {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Field::Constant(c) => *c,
            Field::Affine { offset, slope, min, max } => {
                let v = offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                v.clamp(*min, *max)
            }
            Field::LipschitzBump {
                base,
                height,
                center,
                radius,
            } => base + height * (1.0 - distance(x, center) / radius).max(0.0),
            Field::Jump { low, high, axis, at } => {
                if x[*axis] < *at {
                    *low
                } else {
                    *high
                }
            }
            Field::Radial { base, amplitude } => base + amplitude / (1.0 + norm(x)),
            Field::Oscillating {
                base,
                amplitude,
                frequency,
            } => base + amplitude * (frequency * norm(x)).sin(),
        }
    }

    /// Analytic `(inf, sup)` over all of ℝⁿ.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Field::Constant(c) => (*c, *c),
            Field::Affine { slope, offset, min, max } => {
                if slope.iter().all(|&s| s == 0.0) {
                    let v = offset.clamp(*min, *max);
                    (v, v)
                } else {
                    (*min, *max)
                }
            }
            Field::LipschitzBump { base, height, .. } => {
                let top = base + height;
                (base.min(top), base.max(top))
            }
            Field::Jump { low, high, .. } => (low.min(*high), low.max(*high)),
            Field::Radial { base, amplitude } => {
                let top = base + amplitude;
                (base.min(top), base.max(top))
            }
            Field::Oscillating { base, amplitude, .. } => (base - amplitude.abs(), base + amplitude.abs()),
        }
    }

    pub fn is_constant(&self) -> bool {
        let (lo, hi) = self.bounds();
        lo == hi
    }

    /// Parses a plain number or one of `constant(value=)`,
    /// `affine(offset=, slope=[..], min=, max=)`,
    /// `lipschitz_bump(base=, height=, center=[..], radius=)`,
    /// `jump(low=, high=, axis=, at=)`, `radial(base=, amplitude=)`,
    /// `oscillating(base=, amplitude=, frequency=)`.
    ///
    /// Vector arguments are required; their length is checked against the
    /// domain by [`Field::check_dim`].
    pub fn parse(text: &str) -> Result<Field, String> {
        if let Ok(v) = parse_number(text) {
            return Ok(Field::Constant(v));
        }
        let t = Term::parse(text)?;
        let field = match t.name.as_str() {
            "constant" => {
                t.only(&["value"])?;
                Field::Constant(t.required("value")?)
            }
            "affine" => {
                t.only(&["offset", "slope", "min", "max"])?;
                Field::Affine {
                    offset: t.number_or("offset", 0.0)?,
                    slope: t.vector("slope")?.ok_or("`affine` needs `slope`")?,
                    min: t.number_or("min", f64::NEG_INFINITY)?,
                    max: t.number_or("max", f64::INFINITY)?,
                }
            }
            "lipschitz_bump" => {
                t.only(&["base", "height", "center", "radius"])?;
                Field::LipschitzBump {
                    base: t.number_or("base", 0.0)?,
                    height: t.required("height")?,
                    center: t.vector("center")?.ok_or("`lipschitz_bump` needs `center`")?,
                    radius: t.number_or("radius", 1.0)?,
                }
            }
            "jump" => {
                t.only(&["low", "high", "axis", "at"])?;
                Field::Jump {
                    low: t.required("low")?,
                    high: t.required("high")?,
                    axis: t.count_or("axis", 0)?,
                    at: t.number_or("at", 0.0)?,
                }
            }
            "radial" => {
                t.only(&["base", "amplitude"])?;
                Field::Radial {
                    base: t.required("base")?,
                    amplitude: t.required("amplitude")?,
                }
            }
            "oscillating" => {
                t.only(&["base", "amplitude", "frequency"])?;
                Field::Oscillating {
                    base: t.required("base")?,
                    amplitude: t.required("amplitude")?,
                    frequency: t.number_or("frequency", 1.0)?,
                }
            }
            other => return Err(format!("unknown field `{other}`")),
        };
        let (lo, hi) = field.bounds();
        if !lo.is_finite() || !hi.is_finite() {
            return Err("field must be bounded (give affine min and max)".into());
        }
        if let Field::LipschitzBump { radius, .. } = &field {
            if !(*radius > 0.0) {
                return Err("bump radius must be positive".into());
            }
        }
        if let Field::Affine { min, max, .. } = &field {
            if min > max {
                return Err("affine min exceeds max".into());
            }
        }
        Ok(field)
    }

    /// Checks vector lengths and axes against the dimension `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<(), String> {
        match self {
            Field::Affine { slope, .. } => {
                if slope.len() != dim {
                    return Err(format!("affine slope has {} entries, dimension is {dim}", slope.len()));
                }
            }
            Field::LipschitzBump { center, .. } if center.len() != dim => {
                return Err(format!("bump center has {} entries, dimension is {dim}", center.len()));
            }
            Field::Jump { axis, .. } if *axis >= dim => {
                return Err(format!("jump axis {axis} out of range for dimension {dim}"));
            }
            _ => {}
        }
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(c) => write!(f, "{c}"),
            Field::Affine { offset, slope, min, max } => write!(
                f,
                "affine(offset={offset},slope={},min={min},max={max})",
                format_vector(slope)
            ),
            Field::LipschitzBump {
                base,
                height,
                center,
                radius,
            } => write!(
                f,
                "lipschitz_bump(base={base},height={height},center={},radius={radius})",
                format_vector(center)
            ),
            Field::Jump { low, high, axis, at } => write!(f, "jump(low={low},high={high},axis={axis},at={at})"),
            Field::Radial { base, amplitude } => write!(f, "radial(base={base},amplitude={amplitude})"),
            Field::Oscillating {
                base,
                amplitude,
                frequency,
            } => write!(f, "oscillating(base={base},amplitude={amplitude},frequency={frequency})"),
        }
    }
}
