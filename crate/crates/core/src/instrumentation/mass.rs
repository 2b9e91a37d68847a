use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Signed amount of nodes in fixed point with 12 fractional bits.
///
/// Clear mass is fractional by nature, but the accounting identity
/// `clear + light + extra = count` must hold exactly. With at most 2^40
/// nodes every value fits in 52 bits, so the raw integer and its `f64` image
/// are both exact and sums of them never round.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeMass(i64);

impl NodeMass {
    pub const FRACTION_BITS: u32 = 12;
    pub const ONE: NodeMass = NodeMass(1 << Self::FRACTION_BITS);
    pub const ZERO: NodeMass = NodeMass(0);

    pub fn from_nodes(count: u64) -> Self {
        NodeMass((count as i64) << Self::FRACTION_BITS)
    }

    /// Nearest representable mass.
    pub fn from_f64(nodes: f64) -> Self {
        NodeMass((nodes * Self::ONE.0 as f64).round() as i64)
    }

    pub fn raw(self) -> i64 {
        self.0
    }

    pub fn nodes(self) -> f64 {
        self.0 as f64 / Self::ONE.0 as f64
    }

    pub fn abs(self) -> Self {
        NodeMass(self.0.abs())
    }

    /// Whole nodes, rounded toward negative infinity.
    pub fn floor_nodes(self) -> i64 {
        self.0 >> Self::FRACTION_BITS
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl Add for NodeMass {
    type Output = NodeMass;
    fn add(self, rhs: NodeMass) -> NodeMass {
        NodeMass(self.0 + rhs.0)
    }
}

impl AddAssign for NodeMass {
    fn add_assign(&mut self, rhs: NodeMass) {
        self.0 += rhs.0;
    }
}

impl Sub for NodeMass {
    type Output = NodeMass;
    fn sub(self, rhs: NodeMass) -> NodeMass {
        NodeMass(self.0 - rhs.0)
    }
}

impl Neg for NodeMass {
    type Output = NodeMass;
    fn neg(self) -> NodeMass {
        NodeMass(-self.0)
    }
}

impl fmt::Display for NodeMass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.nodes())
    }
}
