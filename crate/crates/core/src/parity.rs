//! ℤ₂-grading helpers.

use serde::{Deserialize, Serialize};

/// Parity of a homogeneous object.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bool(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }
}

impl std::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bool(self.is_odd() ^ rhs.is_odd())
    }
}

/// `(-1)^(a·b)` for parities given as bits; true means the sign is negative.
#[inline]
pub fn sign_odd(a: u8, b: u8) -> bool {
    (a & b & 1) == 1
}
