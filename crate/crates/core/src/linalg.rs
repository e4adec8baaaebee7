//! Dense linear-algebra helpers shared by assembly and the half-space solver.
//!
//! Every rank decision goes through [`rank_tolerance`]: a singular value is
//! treated as zero when it does not exceed `max(rows, cols) * eps * sigma_max`.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Threshold below which a singular value counts as zero.
pub fn rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Singular values, sorted descending.
pub fn singular_values(x: &Matrix) -> Vector {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Vector::zeros(0);
    }
    SVD::new(x.clone(), false, false).singular_values
}

pub fn numerical_rank(x: &Matrix) -> usize {
    let sv = singular_values(x);
    if sv.is_empty() {
        return 0;
    }
    let tol = rank_tolerance(x.nrows(), x.ncols(), sv[0]);
    sv.iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis of `Null(x)`, one column per null direction.
pub fn null_space(x: &Matrix) -> Matrix {
    let (rows, cols) = x.shape();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if rows == 0 {
        return Matrix::identity(cols, cols);
    }
    // Pad to at least square so that the SVD returns a full right basis.
    let padded = if rows < cols {
        let mut p = Matrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(x);
        p
    } else {
        x.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv = &svd.singular_values;
    let tol = rank_tolerance(rows, cols, sv[0]);
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let mut basis = v_t.rows(rank, cols - rank).transpose();
    fix_column_signs(&mut basis);
    basis
}

/// Orthonormal basis of the column space of `x`.
pub fn range_basis(x: &Matrix) -> Matrix {
    let (rows, cols) = x.shape();
    if rows == 0 || cols == 0 {
        return Matrix::zeros(rows, 0);
    }
    let svd = SVD::new(x.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv = &svd.singular_values;
    let tol = rank_tolerance(rows, cols, sv[0]);
    let rank = sv.iter().filter(|&&s| s > tol).count();
    let mut basis = u.columns(0, rank).into_owned();
    fix_column_signs(&mut basis);
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(basis)` in `R^dim`.
pub fn orthogonal_complement(basis: &Matrix, dim: usize) -> Matrix {
    if basis.ncols() == 0 {
        return Matrix::identity(dim, dim);
    }
    null_space(&basis.transpose())
}

/// Makes the first significant entry of every column positive.
pub fn fix_column_signs(m: &mut Matrix) {
    for mut col in m.column_iter_mut() {
        let scale = col.amax();
        if scale == 0.0 {
            continue;
        }
        if let Some(first) = col.iter().find(|v| v.abs() > 1e-8 * scale) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

pub fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(x: &Matrix) -> Vector {
    if x.nrows() == 0 {
        return Vector::zeros(0);
    }
    let sym = (x + x.transpose()) * 0.5;
    let mut vals: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Vector::from_vec(vals)
}

/// Spectral 2-norm.
pub fn norm2(x: &Matrix) -> f64 {
    singular_values(x).iter().copied().next().unwrap_or(0.0)
}

/// Writes `m` as a header line `rows cols` followed by one line per row,
/// entries space-separated with 17 significant digits.
pub fn write_matrix<W: Write>(mut out: W, m: &Matrix) -> std::io::Result<()> {
    writeln!(out, "{} {}", m.nrows(), m.ncols())?;
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads the format produced by [`write_matrix`].
pub fn read_matrix<R: BufRead>(input: R) -> Result<Matrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("header: {e}")))?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse(format!("header must be `rows cols`, got {header:?}")));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        for tok in line.split_whitespace() {
            data.push(
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("entry {tok:?}: {e}")))?,
            );
        }
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(Matrix::from_row_slice(rows, cols, &data))
}
