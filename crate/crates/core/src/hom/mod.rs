//! Exact homomorphism, injective, surjective and subgraph counting, plus
//! spasm enumeration and the spasm-based subgraph-count inversion.

mod bitset;
mod count;
mod spasm;
pub mod walks;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use count::{
    count_aut, count_hom, count_hom_rooted, count_hom_rooted_all, count_hom_rooted_with,
    count_hom_with, count_inj, count_inj_with, count_onto, count_onto_with, count_sub, count_surj,
    count_surj_with,
};
pub use spasm::{
    p3_interval, spasm, spasm_lower_bound_check, spasm_with_cap, sub_via_spasm, Spasm, SpasmMember,
};

/// Default search-node budget for one counting call.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Default vertex cap for spasm enumeration.
pub const DEFAULT_SPASM_CAP: usize = 10;

#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Maximum number of search nodes before giving up with
    /// [`Error::WorkLimit`].
    pub budget: u64,
    /// Count each connected component of the pattern separately and
    /// multiply (homomorphism counts only).
    pub split_components: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: DEFAULT_BUDGET,
            split_components: true,
        }
    }
}

/// An exact, nonnegative count. Serializes as a decimal string.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HomCount(pub(crate) BigUint);

impl HomCount {
    pub fn new(value: BigUint) -> Self {
        HomCount(value)
    }

    pub fn zero() -> Self {
        HomCount(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Exact division; an inexact quotient means a counting bug.
    pub fn checked_div(&self, by: &HomCount) -> Result<HomCount> {
        if by.is_zero() || !(&self.0 % &by.0).is_zero() {
            return Err(Error::InexactDivision(format!("{} / {}", self.0, by.0)));
        }
        Ok(HomCount(&self.0 / &by.0))
    }
}

impl From<u64> for HomCount {
    fn from(v: u64) -> Self {
        HomCount(BigUint::from(v))
    }
}

impl PartialEq<u64> for HomCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for HomCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for HomCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomCount({})", self.0)
    }
}

impl Serialize for HomCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

impl<'de> Deserialize<'de> for HomCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigUint>()
            .map(HomCount)
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_as_decimal_string() {
        let big = HomCount(BigUint::from(u64::MAX) * 10u32);
        let json = serde_json::to_string(&big).unwrap();
        assert_eq!(json, "\"184467440737095516150\"");
        let back: HomCount = serde_json::from_str(&json).unwrap();
        assert_eq!(back, big);
    }

    #[test]
    fn exact_division() {
        assert_eq!(
            HomCount::from(12).checked_div(&HomCount::from(4)).unwrap(),
            3
        );
        assert!(matches!(
            HomCount::from(7).checked_div(&HomCount::from(2)),
            Err(Error::InexactDivision(_))
        ));
    }
}
