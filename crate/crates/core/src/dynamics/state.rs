use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C64;

pub type Ket = Vector4<C64>;
pub type Density = Matrix4<C64>;

const NORM_TOL: f64 = 1e-9;

/// Nuclear qudit state in the basis `|+3/2⟩, |+1/2⟩, |−1/2⟩, |−3/2⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum QuditState {
    Pure(Ket),
    Mixed(Density),
}

impl QuditState {
    pub fn basis(index: usize) -> Self {
        assert!(index < 4, "qudit index out of range");
        let mut v = Ket::zeros();
        v[index] = C64::new(1.0, 0.0);
        Self::Pure(v)
    }

    pub fn pure(amplitudes: [C64; 4]) -> Result<Self> {
        let s = Self::Pure(Ket::from_column_slice(&amplitudes));
        s.validate()?;
        Ok(s)
    }

    pub fn mixed(rho: Density) -> Result<Self> {
        let s = Self::Mixed(rho);
        s.validate()?;
        Ok(s)
    }

    /// Equal superposition `½(1, 1, 1, 1)`.
    pub fn uniform() -> Self {
        Self::Pure(Ket::from_element(C64::new(0.5, 0.0)))
    }

    pub fn populations(&self) -> [f64; 4] {
        match self {
            Self::Pure(v) => [0, 1, 2, 3].map(|i| v[i].norm_sqr()),
            Self::Mixed(r) => [0, 1, 2, 3].map(|i| r[(i, i)].re),
        }
    }

    pub fn density(&self) -> Density {
        match self {
            Self::Pure(v) => v * v.adjoint(),
            Self::Mixed(r) => *r,
        }
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Pure(v) => {
                let n = v.norm_squared();
                if (n - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidInput(format!("state norm {n} differs from 1")));
                }
            }
            Self::Mixed(r) => {
                let tr = r.trace();
                if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
                    return Err(Error::InvalidInput(format!("density-matrix trace {tr} differs from 1")));
                }
                let herm = (r - r.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if herm > NORM_TOL {
                    return Err(Error::InvalidInput(format!("density matrix not Hermitian ({herm:e})")));
                }
                let min_eig = r.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                if min_eig < -NORM_TOL {
                    return Err(Error::InvalidInput(format!("density matrix not positive (eigenvalue {min_eig:e})")));
                }
            }
        }
        Ok(())
    }

    /// `|⟨self|other⟩|²` for pure states, `Tr(ρσ)` otherwise.
    pub fn overlap(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Pure(a), Self::Pure(b)) => a.dotc(b).norm_sqr(),
            _ => (self.density() * other.density()).trace().re,
        }
    }

    /// Largest entry-wise distance between density matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.density() - other.density()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}
