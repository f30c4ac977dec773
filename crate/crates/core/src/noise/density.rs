use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng as _, RngCore};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_WIRES: usize = 4;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

pub(crate) fn check_wires(n: usize) -> Result<usize> {
    if n > MAX_WIRES {
        return Err(Error::SizeLimit(format!("{n} wires (max {MAX_WIRES})")));
    }
    Ok(1 << n)
}

/// Density operator on `n ≤ 4` wires.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(n: usize, m: CMatrix) -> Result<Self> {
        let dim = check_wires(n)?;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: m.nrows(),
            });
        }
        let herm = hermitian_error(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidArgument(format!("not Hermitian (error {herm:e})")));
        }
        let tr = (m.trace() - Complex64::new(1.0, 0.0)).norm();
        if tr > TRACE_TOL {
            return Err(Error::InvalidArgument(format!("trace differs from 1 by {tr:e}")));
        }
        let low = min_eigenvalue(&m);
        if low < -PSD_TOL {
            return Err(Error::InvalidArgument(format!("negative eigenvalue {low:e}")));
        }
        Ok(DensityMatrix { n, m })
    }

    /// `|ψ⟩⟨ψ|` for a normalised copy of `psi`.
    pub fn pure(n: usize, psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        DensityMatrix::new(n, &v * v.adjoint())
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = check_wires(n)?;
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        DensityMatrix::new(n, m)
    }

    /// Full-rank random state `G G† / tr(G G†)` with uniform complex entries.
    pub fn random<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let dim = check_wires(n)?;
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
        });
        let mut m = &g * g.adjoint();
        let tr = m.trace();
        m /= tr;
        // Symmetrise away rounding so the strict Hermitian check holds.
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        DensityMatrix::new(n, m)
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }
}

pub fn hermitian_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Function from n-bit strings to labels. Index `s` of the table is the
/// string whose wire `k` (0-based) is bit `n - 1 - k` of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeakageFunction {
    n: usize,
    table: Vec<usize>,
}

impl LeakageFunction {
    pub fn new(n: usize, table: Vec<usize>) -> Result<Self> {
        let dim = check_wires(n)?;
        if table.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: table.len(),
            });
        }
        Ok(LeakageFunction { n, table })
    }

    pub fn identity(n: usize) -> Result<Self> {
        LeakageFunction::new(n, (0..1 << n).collect())
    }

    pub fn constant(n: usize) -> Result<Self> {
        LeakageFunction::new(n, vec![0; 1 << n])
    }

    pub fn parity(n: usize) -> Result<Self> {
        LeakageFunction::new(n, (0..1usize << n).map(|s| s.count_ones() as usize % 2).collect())
    }

    /// Uniform random table with labels in `0..alphabet`.
    pub fn random<R: RngCore + ?Sized>(n: usize, alphabet: usize, rng: &mut R) -> Result<Self> {
        let dim = check_wires(n)?;
        if alphabet == 0 {
            return Err(Error::InvalidArgument("empty alphabet".into()));
        }
        LeakageFunction::new(n, (0..dim).map(|_| rng.random_range(0..alphabet)).collect())
    }

    /// Every table on `n` wires with labels in `0..alphabet`.
    pub fn all(n: usize, alphabet: usize) -> Result<Vec<Self>> {
        let dim = check_wires(n)?;
        let count = (alphabet as u64).checked_pow(dim as u32).filter(|&c| c <= 1 << 20);
        let count = count.ok_or_else(|| Error::SizeLimit(format!("{alphabet}^{dim} tables")))?;
        (0..count)
            .map(|mut k| {
                let table = (0..dim)
                    .map(|_| {
                        let v = (k % alphabet as u64) as usize;
                        k /= alphabet as u64;
                        v
                    })
                    .collect();
                LeakageFunction::new(n, table)
            })
            .collect()
    }

    pub fn wires(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Labels relabelled densely to `0..d`, in order of first appearance in
    /// the sorted image.
    pub fn dense_table(&self) -> (Vec<usize>, usize) {
        let mut image = self.table.clone();
        image.sort_unstable();
        image.dedup();
        let dense = self
            .table
            .iter()
            .map(|v| image.binary_search(v).expect("in image"))
            .collect();
        (dense, image.len())
    }

    /// Size of the realized image.
    pub fn alphabet(&self) -> usize {
        self.dense_table().1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_states() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        assert!(DensityMatrix::new(1, m.clone()).is_err());
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        assert!(DensityMatrix::new(1, m.clone()).is_ok());
        m[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(DensityMatrix::new(1, m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.0, -1.0);
        // Hermitian, unit trace, eigenvalues 1.5 and -0.5.
        assert!(DensityMatrix::new(1, m).is_err());
        assert!(DensityMatrix::basis(5, 0).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = crate::rng::stream(3, 0);
        for n in 1..=4 {
            let rho = DensityMatrix::random(n, &mut rng).unwrap();
            assert_eq!(rho.dim(), 1 << n);
        }
    }

    #[test]
    fn function_enumeration_and_image() {
        assert_eq!(LeakageFunction::all(1, 4).unwrap().len(), 16);
        assert_eq!(LeakageFunction::all(2, 4).unwrap().len(), 256);
        let l = LeakageFunction::new(2, vec![3, 1, 3, 7]).unwrap();
        assert_eq!(l.dense_table(), (vec![1, 0, 1, 2], 3));
        assert!(LeakageFunction::new(2, vec![0; 3]).is_err());
    }
}
