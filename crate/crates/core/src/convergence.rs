//! Fock-cutoff convergence rule: a reported quantity must move by less than
//! `rel_tol` (relative) when `n_max` is doubled.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub check: bool,
    pub rel_tol: f64,
}

impl Default for Convergence {
    fn default() -> Self {
        Self {
            check: true,
            rel_tol: 1e-3,
        }
    }
}

impl Convergence {
    pub fn disabled() -> Self {
        Self {
            check: false,
            ..Self::default()
        }
    }

    /// Compares values at `n_max` and `2 n_max`. `floor` is the magnitude
    /// below which changes are measured absolutely (quantities near zero).
    pub fn compare(
        &self,
        quantity: &str,
        n_max: usize,
        coarse: f64,
        fine: f64,
        floor: f64,
    ) -> Result<()> {
        let change = relative_change(coarse, fine, floor);
        if change < self.rel_tol {
            Ok(())
        } else {
            Err(Error::Convergence {
                quantity: quantity.to_string(),
                change,
                n_max,
            })
        }
    }
}

pub fn relative_change(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floors_small_values() {
        assert_eq!(relative_change(1e-12, 2e-12, 1.0), 1e-12);
        assert!((relative_change(100.0, 100.05, 1.0) - 0.05 / 100.05).abs() < 1e-15);
        let c = Convergence::default();
        assert!(c.compare("x", 10, 1.0, 1.0005, 1.0).is_ok());
        assert!(matches!(
            c.compare("x", 10, 1.0, 1.01, 1.0),
            Err(Error::Convergence { n_max: 10, .. })
        ));
    }
}
