//! Integer values extended with an explicit unbounded marker.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// An integer that may be unbounded.
///
/// Merge distances between components that never join inside the clamped grid
/// are `Unbounded`, and any loss term touching such a distance makes the whole
/// interleaving bound infinite. `Unbounded` absorbs addition and subtraction;
/// multiplication by zero yields zero so that one-hot matrix products stay
/// meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Fin(i64),
    Unbounded,
}

impl Value {
    pub const ZERO: Value = Value::Fin(0);

    pub fn is_zero(self) -> bool {
        self == Value::Fin(0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Value::Fin(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Value::Fin(x) => Some(x),
            Value::Unbounded => None,
        }
    }

    /// Ceiling of half the value; `Unbounded` stays `Unbounded`.
    pub fn ceil_half(self) -> Value {
        match self {
            Value::Fin(x) => Value::Fin(x.div_euclid(2) + x.rem_euclid(2)),
            Value::Unbounded => Value::Unbounded,
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Value) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `Unbounded` compares greater than every finite value.
impl Ord for Value {
    fn cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Fin(a), Value::Fin(b)) => a.cmp(b),
            (Value::Fin(_), Value::Unbounded) => Ordering::Less,
            (Value::Unbounded, Value::Fin(_)) => Ordering::Greater,
            (Value::Unbounded, Value::Unbounded) => Ordering::Equal,
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Fin(a), Value::Fin(b)) => Value::Fin(a + b),
            _ => Value::Unbounded,
        }
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Fin(a), Value::Fin(b)) => Value::Fin(a - b),
            _ => Value::Unbounded,
        }
    }
}

impl Mul for Value {
    type Output = Value;
    fn mul(self, rhs: Value) -> Value {
        match (self, rhs) {
            (Value::Fin(a), Value::Fin(b)) => Value::Fin(a * b),
            (Value::Unbounded, Value::Fin(0)) | (Value::Fin(0), Value::Unbounded) => Value::Fin(0),
            _ => Value::Unbounded,
        }
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Fin(a) => Value::Fin(-a),
            Value::Unbounded => Value::Unbounded,
        }
    }
}

impl From<i64> for Value {
    fn from(x: i64) -> Value {
        Value::Fin(x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Fin(x) => write!(f, "{x}"),
            Value::Unbounded => write!(f, "inf"),
        }
    }
}
