use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Sub};

/// Basis label of a product state |J_z, m_I⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisLabel {
    pub jz: f64,
    pub m_i: f64,
}

/// Dense complex square matrix with optional product-basis labels.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    data: DMatrix<C64>,
    basis: Option<Vec<BasisLabel>>,
}

impl OperatorMatrix {
    pub fn from_matrix(data: DMatrix<C64>) -> Self {
        assert!(data.is_square(), "operator matrix must be square");
        Self { data, basis: None }
    }

    pub fn from_real_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_matrix(DMatrix::from_fn(dim, dim, |r, c| C64::new(f(r, c), 0.0)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_real_fn(n, |r, c| if r == c { values[r] } else { 0.0 })
    }

    pub fn with_basis(mut self, basis: Vec<BasisLabel>) -> Self {
        assert_eq!(basis.len(), self.dim(), "basis length must equal dimension");
        self.basis = Some(basis);
        self
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn basis(&self) -> Option<&[BasisLabel]> {
        self.basis.as_deref()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            basis: self.basis.clone(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
            basis: self.basis.clone(),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
            basis: self.basis.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = DMatrix::identity(self.dim(), self.dim());
        for _ in 0..n {
            out = &out * &self.data;
        }
        Self::from_matrix(out)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self::from_matrix(&self.data * &other.data - &other.data * &self.data)
    }

    /// Kronecker product `self ⊗ other`; index = i_self * dim(other) + i_other.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix(self.data.kronecker(&other.data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |H − H†|`.
    pub fn hermitian_error(&self) -> f64 {
        let d = &self.data - self.data.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |U†U − 1|`.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.data.adjoint() * &self.data - DMatrix::<C64>::identity(self.dim(), self.dim());
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
    /// Column `k` of the returned matrix is the eigenvector of eigenvalue `k`.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        // symmetrize so round-off in the input cannot leak into the solver
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigh().0
    }

    /// `exp(−i·2π·H·t)` for Hermitian `H` in frequency units and `t` in matching inverse units.
    pub fn propagator(&self, t: f64) -> Self {
        let (vals, vecs) = self.eigh();
        let phases = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            if r == c {
                C64::from_polar(1.0, -std::f64::consts::TAU * vals[r] * t)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Self::from_matrix(&vecs * phases * vecs.adjoint())
    }
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data + &rhs.data,
            basis: self.basis.clone().or_else(|| rhs.basis.clone()),
        }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data - &rhs.data,
            basis: self.basis.clone().or_else(|| rhs.basis.clone()),
        }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data * &rhs.data,
            basis: self.basis.clone().or_else(|| rhs.basis.clone()),
        }
    }
}
