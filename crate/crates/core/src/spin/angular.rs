use super::operator::OperatorMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Angular-momentum quantum number, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpinQuantum {
    twice: u32,
}

impl SpinQuantum {
    pub const fn from_twice(twice: u32) -> Self {
        Self { twice }
    }

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "angular momentum {j} is not a non-negative half-integer"
            )));
        }
        Ok(Self { twice: twice.round() as u32 })
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }

    /// Projections in basis order `m = j, j−1, …, −j`.
    pub fn projections(self) -> Vec<f64> {
        let j = self.value();
        (0..self.dim()).map(|i| j - i as f64).collect()
    }
}

impl TryFrom<f64> for SpinQuantum {
    type Error = Error;
    fn try_from(j: f64) -> Result<Self> {
        Self::new(j)
    }
}

impl From<SpinQuantum> for f64 {
    fn from(s: SpinQuantum) -> f64 {
        s.value()
    }
}

#[derive(Debug, Clone)]
pub struct AngularMomentumOps {
    pub jx: OperatorMatrix,
    pub jy: OperatorMatrix,
    pub jz: OperatorMatrix,
    pub jplus: OperatorMatrix,
    pub jminus: OperatorMatrix,
}

/// Spin matrices in the `|j, m⟩` basis ordered `m = j … −j`.
pub fn angular_momentum_ops(j: SpinQuantum) -> AngularMomentumOps {
    let n = j.dim();
    let m = j.projections();
    let x = j.casimir();
    let jz = OperatorMatrix::diagonal(&m);
    // J+|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits one row above |m⟩
    let jplus = OperatorMatrix::from_real_fn(n, |r, c| {
        if c >= 1 && r == c - 1 {
            (x - m[c] * (m[c] + 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    });
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale(0.5);
    let jy = (&jplus - &jminus).scale_c(C64::new(0.0, -0.5));
    AngularMomentumOps { jx, jy, jz, jplus, jminus }
}
