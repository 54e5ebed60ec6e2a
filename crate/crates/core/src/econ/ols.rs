//! Ordinary least squares via singular value decomposition.

use nalgebra::{DMatrix, DVector};

use super::EconError;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub fitted: DVector<f64>,
}

/// Least-squares fit of `y` on `x`. Errors on rank deficiency, listing the
/// column names loading on the null space.
pub fn ols_fit(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<OlsFit, EconError> {
    assert_eq!(x.nrows(), y.len(), "row count mismatch");
    assert_eq!(x.ncols(), names.len(), "name count mismatch");
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * x.nrows().max(x.ncols()) as f64;
    if svd.singular_values.iter().any(|&s| s <= tol) {
        let vt = svd.v_t.as_ref().expect("v_t requested");
        let mut collinear = Vec::new();
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s <= tol {
                let dir = vt.row(k);
                let peak = dir.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
                for (j, &v) in dir.iter().enumerate() {
                    if v.abs() > 0.3 * peak && !collinear.contains(&names[j]) {
                        collinear.push(names[j].clone());
                    }
                }
            }
        }
        return Err(EconError::RankDeficient(collinear));
    }
    let beta = svd.solve(y, tol).expect("u/v_t requested");
    let fitted = x * &beta;
    let residuals = y - &fitted;
    Ok(OlsFit { beta, residuals, fitted })
}
