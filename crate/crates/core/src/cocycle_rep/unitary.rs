use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ErgoError, Result};

/// Tolerance for `U·U* = I`.
pub const UNITARY_TOL: f64 = 1e-10;

/// An `N × N` unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(DMatrix<Complex64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(ErgoError::invalid("unitary matrix must be square and nonempty"));
        }
        let defect = unitarity_defect(&m);
        if !(defect <= UNITARY_TOL) {
            return Err(ErgoError::invalid(format!(
                "matrix is not unitary (max |UU* - I| = {defect:.3e})"
            )));
        }
        Ok(Self(m))
    }

    /// Builds from row-major entries.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<Self> {
        ErgoError::check_dim(n * n, entries.len())?;
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// The 1×1 matrix `[z]`, `|z| = 1`.
    pub fn scalar(z: Complex64) -> Result<Self> {
        Self::new(DMatrix::from_element(1, 1, z))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `out = U v`.
    #[inline]
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        for (r, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, x) in v.iter().enumerate().take(n) {
                acc += self.0[(r, c)] * x;
            }
            *o = acc;
        }
    }

    /// Frobenius distance `‖A − B‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.0 - &other.0).norm()
    }

    pub fn power(&self, mut n: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        result
    }
}

/// Largest entry of `|U U* − I|`.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let eye: DMatrix<Complex64> = DMatrix::identity(n, n);
    (prod - eye).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
