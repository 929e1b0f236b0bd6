//! Linear operators on complex vectors, as seen by the solver.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// An `m x N` complex linear map with its conjugate transpose.
pub trait LinearOperator<T: Real> {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `out = A z`.
    fn apply_into(&self, z: &[Complex<T>], out: &mut [Complex<T>]);

    /// `out = A^* w`.
    fn adjoint_into(&self, w: &[Complex<T>], out: &mut [Complex<T>]);

    fn apply(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        check_len(self.cols(), z.len())?;
        let mut out = vec![Complex::default(); self.rows()];
        self.apply_into(z, &mut out);
        Ok(out)
    }

    fn adjoint(&self, w: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        check_len(self.rows(), w.len())?;
        let mut out = vec![Complex::default(); self.cols()];
        self.adjoint_into(w, &mut out);
        Ok(out)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[T]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Long-format CSV: `row,col,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                s.push_str(&format!("{i},{j},{:e},{:e}\n", z.re.to_f64_lossy(), z.im.to_f64_lossy()));
            }
        }
        s
    }
}

impl<T: Real> LinearOperator<T> for DenseMatrix<T> {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn apply_into(&self, z: &[Complex<T>], out: &mut [Complex<T>]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = row.iter().zip(z).fold(Complex::default(), |acc, (a, x)| acc + *a * *x);
        }
    }

    fn adjoint_into(&self, w: &[Complex<T>], out: &mut [Complex<T>]) {
        out.iter_mut().for_each(|o| *o = Complex::default());
        for (wi, row) in w.iter().zip(self.data.chunks_exact(self.cols)) {
            for (o, a) in out.iter_mut().zip(row) {
                *o = *o + a.conj() * *wi;
            }
        }
    }
}
