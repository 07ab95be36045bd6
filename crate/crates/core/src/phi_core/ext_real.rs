use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

/// A value in `[0, ∞]`.
///
/// Backed by an `f64` that is never negative and never NaN; `f64::INFINITY`
/// is the distinguished value ∞.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps `v`, returning `None` for negative or NaN input.
    pub fn new(v: f64) -> Option<Self> {
        (v >= 0.0).then_some(ExtReal(v))
    }

    /// Wraps `v`, clamping tiny negative round-off to zero.
    ///
    /// Panics on NaN and on values below `-1e-12`.
    pub fn clamped(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtReal from NaN");
        assert!(v >= -1e-12, "ExtReal from negative value {v}");
        ExtReal(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    /// `factor · self` for a finite positive factor; `factor · ∞ = ∞`.
    pub fn scale(self, factor: f64) -> Self {
        debug_assert!(factor.is_finite() && factor > 0.0);
        ExtReal(self.0 * factor)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: Self) -> Self {
        ExtReal(self.0 + rhs.0)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;

    /// Panics on `0 · ∞`, which the constructions here never form.
    fn mul(self, rhs: Self) -> Self {
        let v = self.0 * rhs.0;
        assert!(!v.is_nan(), "0 * inf is undefined");
        ExtReal(v)
    }
}

impl From<ExtReal> for f64 {
    fn from(v: ExtReal) -> f64 {
        v.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
