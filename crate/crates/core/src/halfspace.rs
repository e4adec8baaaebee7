//! Closed-form solution of the half-space problem
//!
//! ```text
//!     A w'(y) = -Q w(y),   y >= 0,   w(+inf) = 0,
//! ```
//!
//! with `A = [[0, M], [M^T, 0]]` and `Q = diag(Q_e, Q_o)` symmetric positive
//! semi-definite.
//!
//! The state space is split by an orthogonal basis `[V1, V2, V3]`:
//!
//! * `G` spans `Null(Q)`, `X` spans `Null(G^T A G)` and `V1 = G X`;
//! * `V2` spans `A G`, and `V2^T w` vanishes identically;
//! * `V3` completes the basis; on it the system reduces to
//!   `A33 (V3^T w)' = -Q33 (V3^T w)` with `Q33` positive definite, which decays
//!   along the `n_+` positive generalized eigenvalues of `(A33, Q33)`;
//! * `V1^T w` follows algebraically from `V3^T w`.
//!
//! All factors are built block-wise on the even/odd split so that
//! `G = diag(G_e, G_o)`, `X = diag(X_e, X_o)` and likewise for `V1..V3`.

use std::sync::Arc;

use nalgebra::{Cholesky, SymmetricEigen, SVD, LU};

use crate::assembly::MomentSystem;
use crate::error::{invalid, Error, Result};
use crate::linalg::{
    block_diag, fix_column_signs, null_space, numerical_rank, orthogonal_complement,
    range_basis, rank_tolerance, Matrix, Vector,
};

/// Dimensions produced by the decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Counts {
    pub m: usize,
    pub n: usize,
    /// `dim Null(Q_e)`
    pub p1: usize,
    /// `dim Null(Q_o)`
    pub p2: usize,
    pub r1: usize,
    pub r2: usize,
    /// `rank(G_e^T M G_o)`
    pub c: usize,
    pub n_plus: usize,
}

impl Counts {
    pub fn p(&self) -> usize {
        self.p1 + self.p2
    }

    pub fn r(&self) -> usize {
        self.r1 + self.r2
    }
}

/// Decaying modes of the pencil `(A33, Q33)`.
#[derive(Clone, Debug)]
pub struct GeneralizedModes {
    /// Lower Cholesky factor of `Q33`.
    pub l: Matrix,
    /// Orthonormal eigenvectors of `L^-1 A33 L^-T` for positive eigenvalues.
    pub r_plus: Matrix,
    /// `L^-T R_+`
    pub t_plus: Matrix,
    /// Positive eigenvalues, descending.
    pub lambda_plus: Vector,
}

/// Solves `Q33^-1 A33 T = T Lambda` for the positive part of the spectrum.
pub fn generalized_modes(a33: &Matrix, q33: &Matrix) -> Result<GeneralizedModes> {
    let k = a33.nrows();
    if a33.shape() != (k, k) || q33.shape() != (k, k) {
        return Err(invalid("A33 and Q33 must be square of the same size"));
    }
    if k == 0 {
        return Ok(GeneralizedModes {
            l: Matrix::zeros(0, 0),
            r_plus: Matrix::zeros(0, 0),
            t_plus: Matrix::zeros(0, 0),
            lambda_plus: Vector::zeros(0),
        });
    }
    let sym_q = (q33 + q33.transpose()) * 0.5;
    let l = Cholesky::new(sym_q)
        .ok_or_else(|| Error::Inconsistency("Q33 is not positive definite".into()))?
        .l();
    let lower_solve = |rhs: &Matrix| {
        l.solve_lower_triangular(rhs)
            .expect("Cholesky factor has a positive diagonal")
    };
    let half = lower_solve(a33);
    let whitened = lower_solve(&half.transpose());
    let whitened = (&whitened + whitened.transpose()) * 0.5;

    let eig = SymmetricEigen::new(whitened);
    let scale = eig.eigenvalues.amax();
    let tol = rank_tolerance(k, k, scale);
    let mut positive: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol)
        .map(|(i, &v)| (v, i))
        .collect();
    positive.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut r_plus = Matrix::zeros(k, positive.len());
    for (col, &(_, i)) in positive.iter().enumerate() {
        r_plus.set_column(col, &eig.eigenvectors.column(i));
    }
    fix_column_signs(&mut r_plus);
    let t_plus = l
        .transpose()
        .solve_upper_triangular(&r_plus)
        .expect("Cholesky factor has a positive diagonal");
    let lambda_plus = Vector::from_iterator(positive.len(), positive.iter().map(|p| p.0));
    Ok(GeneralizedModes {
        l,
        r_plus,
        t_plus,
        lambda_plus,
    })
}

/// Inertia of `[[0, D], [D^T, 0]]` as (zero, positive, negative) counts.
pub fn signature_counts(d: &Matrix) -> (usize, usize, usize) {
    let rank = numerical_rank(d);
    (d.nrows() + d.ncols() - 2 * rank, rank, rank)
}

/// Every factor of the simultaneous reduction.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub counts: Counts,
    pub g: Matrix,
    pub g_even: Matrix,
    pub g_odd: Matrix,
    pub x: Matrix,
    pub x_even: Matrix,
    pub x_odd: Matrix,
    pub v1: Matrix,
    pub v2: Matrix,
    pub v3: Matrix,
    /// `A G X`
    pub u2: Matrix,
    /// `U2^T A V1`
    pub a21: Matrix,
    pub a33: Matrix,
    pub q33: Matrix,
    pub modes: GeneralizedModes,
    /// `V3 T_+`
    pub c_v3: Matrix,
    /// `-A21^-1 U2^T A V3 T_+`
    pub c_v1_direct: Matrix,
    /// `A21^-1 U2^T Q V3 T_+ Lambda_+`
    pub c_v1_integral: Matrix,
    /// `V1 (c_v1_direct + c_v1_integral) + V3 T_+`: maps the decaying
    /// amplitudes to the full state.
    pub state_modes: Matrix,
}

impl Decomposition {
    pub fn t_plus(&self) -> &Matrix {
        &self.modes.t_plus
    }

    pub fn lambda_plus(&self) -> &Vector {
        &self.modes.lambda_plus
    }

    pub fn n_plus(&self) -> usize {
        self.counts.n_plus
    }

    /// Largest decay length, or 0 with no decaying modes.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_plus().iter().copied().fold(0.0, f64::max)
    }

    /// Coefficients of `V1^T w` in terms of the decaying amplitudes.
    pub fn v1_coefficients(&self) -> Matrix {
        &self.c_v1_direct + &self.c_v1_integral
    }
}

pub fn decompose(system: &MomentSystem) -> Result<Decomposition> {
    let (m, n) = (system.m(), system.n());
    let mb = system.m_block();
    let g_even = null_space(&system.q_even());
    let g_odd = null_space(&system.q_odd());
    let (p1, p2) = (g_even.ncols(), g_odd.ncols());

    let coupling = g_even.transpose() * mb * &g_odd;
    let c = numerical_rank(&coupling);
    let x_even = null_space(&coupling.transpose());
    let x_odd = null_space(&coupling);
    let (r1, r2) = (x_even.ncols(), x_odd.ncols());
    if r1 + c != p1 || r2 + c != p2 {
        return Err(Error::Inconsistency(format!(
            "null-space split p1={p1}, p2={p2}, r1={r1}, r2={r2}, c={c}"
        )));
    }

    let y1 = &g_even * &x_even;
    let z1 = &g_odd * &x_odd;
    let y2 = range_basis(&(mb * &g_odd));
    let z2 = range_basis(&(mb.transpose() * &g_even));
    if y2.ncols() != p2 || z2.ncols() != p1 {
        return Err(Error::Inconsistency(format!(
            "rank(A G) = {} but p = {}",
            y2.ncols() + z2.ncols(),
            p1 + p2
        )));
    }
    let y3 = orthogonal_complement(&hstack(&y1, &y2), m);
    let z3 = orthogonal_complement(&hstack(&z1, &z2), n);
    if y3.ncols() + r1 + p2 != m || z3.ncols() + r2 + p1 != n {
        return Err(Error::Inconsistency(
            "[V1, V2] is not column orthogonal at the rank tolerance".into(),
        ));
    }

    let g = block_diag(&g_even, &g_odd);
    let x = block_diag(&x_even, &x_odd);
    let v1 = block_diag(&y1, &z1);
    let v2 = block_diag(&y2, &z2);
    let v3 = block_diag(&y3, &z3);

    let a = system.a();
    let q = system.q();
    let u2 = a * &g * &x;
    let a21 = u2.transpose() * a * &v1;
    let r = r1 + r2;
    if numerical_rank(&a21) != r {
        return Err(Error::Inconsistency(format!("A21 is not of rank {r}")));
    }
    let a33 = v3.transpose() * a * &v3;
    let q33 = v3.transpose() * q * &v3;
    let modes = generalized_modes(&a33, &q33)?;

    let p = p1 + p2;
    let expected = n as isize - ((p + r) / 2) as isize;
    if (p + r) % 2 != 0 || modes.lambda_plus.len() as isize != expected {
        return Err(Error::Inconsistency(format!(
            "{} positive modes, expected n - (p + r)/2 = {expected}",
            modes.lambda_plus.len()
        )));
    }
    let n_plus = modes.lambda_plus.len();

    let c_v3 = &v3 * &modes.t_plus;
    let (c_v1_direct, c_v1_integral) = if r == 0 {
        (Matrix::zeros(0, n_plus), Matrix::zeros(0, n_plus))
    } else {
        let lu = LU::new(a21.clone());
        let direct = -lu
            .solve(&(u2.transpose() * a * &c_v3))
            .ok_or_else(|| Error::Inconsistency("A21 is singular".into()))?;
        let scaled = &c_v3 * Matrix::from_diagonal(&modes.lambda_plus);
        let integral = lu
            .solve(&(u2.transpose() * q * scaled))
            .ok_or_else(|| Error::Inconsistency("A21 is singular".into()))?;
        (direct, integral)
    };
    let state_modes = &v1 * (&c_v1_direct + &c_v1_integral) + &c_v3;

    Ok(Decomposition {
        counts: Counts {
            m,
            n,
            p1,
            p2,
            r1,
            r2,
            c,
            n_plus,
        },
        g,
        g_even,
        g_odd,
        x,
        x_even,
        x_odd,
        v1,
        v2,
        v3,
        u2,
        a21,
        a33,
        q33,
        modes,
        c_v3,
        c_v1_direct,
        c_v1_integral,
        state_modes,
    })
}

fn hstack(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Relative residual accepted by [`solve_halfspace`].
pub const BOUNDARY_RESIDUAL_TOL: f64 = 1e-9;

/// Solves `B V3 T_+ z0 = g` for the decaying amplitudes.
pub fn solve_halfspace(dec: &Decomposition, b: &Matrix, g: &Vector) -> Result<Vector> {
    let size = dec.counts.m + dec.counts.n;
    if b.ncols() != size || b.nrows() != g.len() {
        return Err(invalid(format!(
            "boundary operator is {}x{}, data has length {}, state size {size}",
            b.nrows(),
            b.ncols(),
            g.len()
        )));
    }
    let k = b * &dec.c_v3;
    least_squares_unique(&k, g)
}

/// Unique solution of `k x = rhs`, or an error when `k` is column-rank
/// deficient or `rhs` is outside its range.
pub(crate) fn least_squares_unique(k: &Matrix, rhs: &Vector) -> Result<Vector> {
    let g_norm = rhs.norm();
    let tolerance = BOUNDARY_RESIDUAL_TOL * g_norm;
    if k.ncols() == 0 {
        return if g_norm <= tolerance {
            Ok(Vector::zeros(0))
        } else {
            Err(Error::InconsistentData {
                residual: g_norm,
                tolerance,
            })
        };
    }
    let svd = SVD::new(k.clone(), true, true);
    let sv = &svd.singular_values;
    let cutoff = rank_tolerance(k.nrows(), k.ncols(), sv[0]);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    if rank < k.ncols() {
        return Err(Error::IllPosedBoundary(format!(
            "boundary operator has rank {rank}, needs {}",
            k.ncols()
        )));
    }
    let x = svd
        .solve(rhs, cutoff)
        .map_err(|e| Error::Inconsistency(e.to_string()))?;
    let residual = (k * &x - rhs).norm();
    if residual > tolerance {
        return Err(Error::InconsistentData {
            residual,
            tolerance,
        });
    }
    Ok(x)
}

/// The solved layer: decaying amplitudes `z(0)` plus the free boundary
/// components determined together with them.
#[derive(Clone, Debug)]
pub struct LayerSolution {
    dec: Arc<Decomposition>,
    z0: Vector,
    slip: Vector,
}

impl LayerSolution {
    pub fn new(dec: Arc<Decomposition>, z0: Vector, slip: Vector) -> Result<Self> {
        if z0.len() != dec.n_plus() {
            return Err(invalid(format!(
                "z0 has length {}, expected {}",
                z0.len(),
                dec.n_plus()
            )));
        }
        Ok(Self { dec, z0, slip })
    }

    pub fn decomposition(&self) -> &Decomposition {
        &self.dec
    }

    pub fn z0(&self) -> &Vector {
        &self.z0
    }

    /// Solved components `G_e^T f_e`.
    pub fn slip(&self) -> &Vector {
        &self.slip
    }

    fn amplitudes(&self, y: f64) -> Result<Vector> {
        if y.is_nan() || y < 0.0 {
            return Err(invalid(format!("evaluation point must be >= 0, got {y}")));
        }
        let lam = self.dec.lambda_plus();
        Ok(Vector::from_iterator(
            self.z0.len(),
            self.z0.iter().zip(lam.iter()).map(|(z, l)| z * (-y / l).exp()),
        ))
    }

    /// `w(y)`.
    pub fn evaluate(&self, y: f64) -> Result<Vector> {
        Ok(&self.dec.state_modes * self.amplitudes(y)?)
    }

    /// `w'(y)`, differentiated analytically.
    pub fn derivative(&self, y: f64) -> Result<Vector> {
        let mut e = self.amplitudes(y)?;
        for (v, l) in e.iter_mut().zip(self.dec.lambda_plus().iter()) {
            *v /= -l;
        }
        Ok(&self.dec.state_modes * e)
    }

    /// `V3^T w(y) = T_+ exp(-y / Lambda_+) z0`.
    pub fn v3_component(&self, y: f64) -> Result<Vector> {
        Ok(self.dec.t_plus() * self.amplitudes(y)?)
    }

    /// `V1^T w(y)`.
    pub fn v1_component(&self, y: f64) -> Result<Vector> {
        Ok(self.dec.v1_coefficients() * self.amplitudes(y)?)
    }
}

/// Free-function form of [`LayerSolution::evaluate`].
pub fn evaluate_solution(sol: &LayerSolution, y: f64) -> Result<Vector> {
    sol.evaluate(y)
}
