//! Tropical semiring weights: plus is min, times is addition over costs.

use std::fmt;
use std::ops::Add;

/// A cost in the tropical semiring. `Weight::zero()` (+infinity) annihilates,
/// `Weight::one()` (0.0) is the multiplicative identity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Weight(pub f64);

impl Weight {
    pub const fn new(cost: f64) -> Self {
        Weight(cost)
    }

    /// Additive identity: +infinity (no path).
    pub const fn zero() -> Self {
        Weight(f64::INFINITY)
    }

    /// Multiplicative identity: cost 0.
    pub const fn one() -> Self {
        Weight(0.0)
    }

    pub fn is_zero(self) -> bool {
        self.0.is_infinite() && self.0 > 0.0
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Semiring plus: min of the two costs.
    pub fn plus(self, other: Weight) -> Weight {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    /// Semiring times: sum of the two costs; zero annihilates.
    pub fn times(self, other: Weight) -> Weight {
        if self.is_zero() || other.is_zero() {
            Weight::zero()
        } else {
            Weight(self.0 + other.0)
        }
    }

    pub fn approx_eq(self, other: Weight, tol: f64) -> bool {
        if self.is_zero() && other.is_zero() {
            return true;
        }
        (self.0 - other.0).abs() <= tol
    }
}

impl Add for Weight {
    type Output = Weight;
    fn add(self, rhs: Weight) -> Weight {
        self.times(rhs)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}
