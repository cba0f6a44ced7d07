//! Energy values with a distinguished infinity.
//!
//! Every solver in this crate works over non-negative integers extended with
//! `+∞`, where `∞` stands for "objective not achievable". Keeping `∞` as its
//! own variant means `∞ + c = ∞` holds structurally and nothing can overflow
//! into a bogus finite value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative integer cost, or `∞`.
///
/// The derived order places every finite value below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Cost {
    Finite(u32),
    #[default]
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(0);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Infinite => None,
        }
    }

    /// `max(0, self - other)`; `∞ - ∞` is treated as `∞` because an
    /// unachievable outcome never becomes acceptable by comparison.
    pub fn saturating_sub(self, other: Cost) -> Cost {
        match (self, other) {
            (Cost::Infinite, _) => Cost::Infinite,
            (Cost::Finite(_), Cost::Infinite) => Cost::ZERO,
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a.saturating_sub(b)),
        }
    }

    /// Caps values strictly above `bound` to `∞`.
    pub fn within(self, bound: u32) -> Cost {
        match self {
            Cost::Finite(v) if v <= bound => self,
            _ => Cost::Infinite,
        }
    }
}

impl From<u32> for Cost {
    fn from(v: u32) -> Self {
        Cost::Finite(v)
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => match a.checked_add(b) {
                Some(s) => Cost::Finite(s),
                None => Cost::Infinite,
            },
            _ => Cost::Infinite,
        }
    }
}

impl Add<u32> for Cost {
    type Output = Cost;

    fn add(self, rhs: u32) -> Cost {
        self + Cost::Finite(rhs)
    }
}

impl PartialEq<u32> for Cost {
    fn eq(&self, other: &u32) -> bool {
        *self == Cost::Finite(*other)
    }
}

impl PartialOrd<u32> for Cost {
    fn partial_cmp(&self, other: &u32) -> Option<Ordering> {
        Some(self.cmp(&Cost::Finite(*other)))
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a JSON number, or the string "inf".
impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(v) => serializer.serialize_u32(*v),
            Cost::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(u32),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Cost::Finite(v)),
            Repr::Text(s) if s == "inf" || s == "∞" => Ok(Cost::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a non-negative integer or \"inf\", got {s:?}"
            ))),
        }
    }
}
