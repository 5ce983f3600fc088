use serde::{Deserialize, Serialize};

/// Largest total Hilbert-space dimension any routine will build.
pub const MAX_DIM: usize = 64;

/// Numerical thresholds shared by every module.
///
/// The first four are the user-tunable core; the rest are the fixed
/// thresholds individual checks are specified against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    /// Eigenvalues in `[-psd_floor, 0)` are treated as zero.
    pub psd_floor: f64,
    pub rank: f64,
    pub equality: f64,
    pub unitarity: f64,
    pub channel: f64,
    pub product: f64,
    pub tr_residual: f64,
    pub angle: f64,
    pub singular: f64,
    pub probability: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            psd_floor: 1e-10,
            rank: 1e-10,
            equality: 1e-10,
            unitarity: 1e-10,
            channel: 1e-9,
            product: 1e-9,
            tr_residual: 1e-8,
            angle: 1e-8,
            singular: 1e-9,
            probability: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn with_equality(mut self, eq: f64) -> Self {
        self.equality = eq;
        self
    }

    pub fn with_rank(mut self, rank: f64) -> Self {
        self.rank = rank;
        self
    }
}
