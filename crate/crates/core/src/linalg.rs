//! Dense Hermitian eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::hilbert::{DenseOperator, StateVector};

/// Eigenpairs of a Hermitian operator, eigenvalues ascending; column `k` of
/// `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigen {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `|⟨ref|v_k⟩|²` summed over the given reference vectors, per eigenvector.
    pub fn weights(&self, refs: &[StateVector]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let col = self.vectors.column(k);
                refs.iter().map(|r| r.dotc(&col).norm_sqr()).sum()
            })
            .collect()
    }
}

/// Diagonalizes a Hermitian operator. Purely real matrices take the real
/// symmetric path.
pub fn eigh(op: &DenseOperator) -> Eigen {
    let (values, vectors) = if op.is_real() {
        let re = op.matrix().map(|z| z.re);
        let e = SymmetricEigen::new(re);
        (
            e.eigenvalues,
            e.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let e = SymmetricEigen::new(op.matrix().clone());
        (e.eigenvalues, e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let n = values.len();
    let sorted_values = DVector::from_iterator(n, order.iter().map(|&k| values[k]));
    let mut sorted_vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    Eigen {
        values: sorted_values,
        vectors: sorted_vectors,
    }
}

/// Ascending eigenvalues only.
pub fn eigvalsh(op: &DenseOperator) -> Vec<f64> {
    let mut v: Vec<f64> = if op.is_real() {
        SymmetricEigen::new(op.matrix().map(|z| z.re))
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        SymmetricEigen::new(op.matrix().clone())
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    v.sort_by(f64::total_cmp);
    v
}
