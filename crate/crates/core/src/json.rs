//! Complex matrices as nested `[re, im]` arrays.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Rounds to a fixed number of significant digits so that reports are
/// byte-stable across platforms.
pub fn fixed_precision(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.12e}").parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = CMat::from_fn(3, 2, |i, j| Complex64::new(0.1 * i as f64, -(j as f64) / 3.0));
        let back = matrix_from_json(&matrix_to_json(&m)).unwrap();
        assert_eq!(back, m);
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        let parsed: JsonMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(matrix_from_json(&parsed).unwrap(), m);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![[0.0, 0.0]], vec![]];
        assert!(matrix_from_json(&rows).is_err());
    }
}
