//! Dense complex linear algebra helpers.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. The SVD wrappers here return
//! singular values sorted in descending order with a fixed phase convention:
//! each right singular vector is rotated so its largest-magnitude entry is
//! real and positive, and the paired left singular vector receives the same
//! rotation so that `A v = σ u` still holds.

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Thin SVD `A = U Σ V^H` with `p = min(rows, cols)` triplets.
#[derive(Debug, Clone)]
pub struct SortedSvd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0))
}

pub fn identity(rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest absolute entry of `a - b`; shapes must agree.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Unit-modulus factor that makes the largest-magnitude entry of `col` real
/// positive. Ties go to the lowest index. Zero columns get factor 1.
fn phase_fix(col: nalgebra::DVectorView<'_, Complex64>) -> Complex64 {
    let mut best = Complex64::new(0.0, 0.0);
    let mut best_mag = 0.0;
    for z in col.iter() {
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = *z;
        }
    }
    if best_mag == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        best.conj() / best_mag
    }
}

/// Rotates every column of `m` by [`phase_fix`].
pub fn normalize_column_phases(m: &mut ComplexMatrix) {
    for j in 0..m.ncols() {
        let f = phase_fix(m.column(j));
        scale_column(m, j, f);
    }
}

fn scale_column(m: &mut ComplexMatrix, j: usize, f: Complex64) {
    for z in m.column_mut(j).iter_mut() {
        *z *= f;
    }
}

fn check_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} contains non-finite entries")))
    }
}

/// Thin SVD with descending singular values and normalized phases.
pub fn svd(m: &ComplexMatrix) -> Result<SortedSvd> {
    check_finite(m, "SVD input")?;
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return Ok(SortedSvd {
            u: zeros(rows, 0),
            singular_values: Vec::new(),
            v: zeros(cols, 0),
        });
    }
    let dec = SVD::new(m.clone(), true, true);
    let mut u = dec.u.expect("u requested");
    let mut v = dec.v_t.expect("v requested").adjoint();
    let singular_values: Vec<f64> = dec.singular_values.iter().copied().collect();
    for j in 0..p {
        let f = phase_fix(v.column(j));
        scale_column(&mut v, j, f);
        scale_column(&mut u, j, f);
    }
    Ok(SortedSvd {
        u,
        singular_values,
        v,
    })
}

/// Full right singular basis of `m` (cols × cols) together with all `cols`
/// singular values in descending order, padded with zeros when `rows < cols`.
///
/// Wide inputs are padded with zero rows to a square matrix first; this leaves
/// the right singular vectors unchanged and adds exact zero singular values.
pub fn full_right_singular(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_finite(m, "SVD input")?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let square;
    let work = if rows < cols {
        let mut padded = zeros(cols, cols);
        padded.rows_mut(0, rows).copy_from(m);
        square = padded;
        &square
    } else {
        m
    };
    let dec = SVD::new(work.clone(), false, true);
    let mut v = dec.v_t.expect("v requested").adjoint();
    normalize_column_phases(&mut v);
    Ok((dec.singular_values.iter().copied().collect(), v))
}

/// Row-concatenation of blocks that all have `cols` columns.
pub fn stack_rows(blocks: &[&ComplexMatrix], cols: usize) -> Result<ComplexMatrix> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        if b.ncols() != cols {
            return Err(Error::InvalidDimension(format!(
                "cannot stack a {}x{} block into {} columns",
                b.nrows(),
                b.ncols(),
                cols
            )));
        }
        out.rows_mut(at, b.nrows()).copy_from(*b);
        at += b.nrows();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        for &(r, c) in &[(3, 5), (5, 3), (4, 4), (1, 6)] {
            let a = random(r, c, (r * 10 + c) as u64);
            let s = svd(&a).unwrap();
            assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
            let sigma = DMatrix::from_fn(s.singular_values.len(), s.singular_values.len(), |i, j| {
                if i == j {
                    Complex64::new(s.singular_values[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let back = &s.u * sigma * s.v.adjoint();
            assert!(max_abs_diff(&a, &back) < 1e-12);
        }
    }

    #[test]
    fn svd_phase_convention_holds() {
        let a = random(4, 6, 7);
        let s = svd(&a).unwrap();
        for j in 0..s.v.ncols() {
            let col = s.v.column(j);
            let top = col
                .iter()
                .max_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap())
                .unwrap();
            assert!(top.im.abs() < 1e-14 && top.re > 0.0);
        }
    }

    #[test]
    fn full_right_basis_spans_null_space_of_wide_matrix() {
        let a = random(3, 5, 11);
        let (sv, v) = full_right_singular(&a).unwrap();
        assert_eq!(sv.len(), 5);
        assert_eq!(v.shape(), (5, 5));
        let gram = v.adjoint() * &v;
        assert!(max_abs_diff(&gram, &identity(5, 5)) < 1e-12);
        let null = v.columns(3, 2).into_owned();
        assert!(frobenius_norm(&(&a * null)) < 1e-12);
        assert!(sv[3].abs() < 1e-14 && sv[4].abs() < 1e-14);
    }

    #[test]
    fn stack_rejects_mismatched_columns() {
        let a = zeros(2, 3);
        let b = zeros(2, 4);
        assert!(matches!(
            stack_rows(&[&a, &b], 3),
            Err(Error::InvalidDimension(_))
        ));
        assert_eq!(stack_rows(&[], 3).unwrap().shape(), (0, 3));
    }

    #[test]
    fn svd_rejects_nan() {
        let mut a = zeros(2, 2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(svd(&a).is_err());
    }
}
