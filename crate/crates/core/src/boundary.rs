//! Maxwell-type wall conditions for the half-space system.
//!
//! Every supported condition has the abstract form
//!
//! ```text
//!     K_o (w_o(0) + f_o) + b(chi) K_e (w_e(0) + f_e) = 0      (n rows)
//! ```
//!
//! * [`BcKind::NewMaxwell`]: `K_e = M^T`, `K_o = H = M^T S^-1 M`;
//! * [`BcKind::Grad`]: `K_e = E S`, `K_o = E M`, with `E` selecting the first
//!   `n` rows;
//! * [`build_custom_bc`]: `K_e = M^T` with a caller-supplied SPD `H`.
//!
//! The components of `f_e` inside `span(G_e)` are unknown and solved jointly
//! with the decaying amplitudes `z(0)`.

use std::sync::Arc;

use nalgebra::Cholesky;

use crate::assembly::MomentSystem;
use crate::error::{invalid, Error, Result};
use crate::halfspace::{least_squares_unique, solve_halfspace, Decomposition, LayerSolution};
use crate::linalg::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BcKind {
    NewMaxwell,
    Grad,
}

impl BcKind {
    pub fn name(&self) -> &'static str {
        match self {
            BcKind::NewMaxwell => "new",
            BcKind::Grad => "grad",
        }
    }
}

/// `b(chi) = 2 chi / (2 - chi) / sqrt(2 pi)`.
pub fn b_chi(chi: f64) -> f64 {
    2.0 * chi / (2.0 - chi) / (2.0 * std::f64::consts::PI).sqrt()
}

#[derive(Clone, Debug)]
pub struct BoundarySpec {
    pub chi: f64,
    /// Even data; only the part orthogonal to `G_e` is used as given.
    pub f_e: Vector,
    pub f_o: Vector,
    pub kind: BcKind,
}

impl BoundarySpec {
    pub fn new(chi: f64, f_e: Vector, f_o: Vector, kind: BcKind) -> Self {
        Self { chi, f_e, f_o, kind }
    }
}

/// Linear system for `[G_e^T f_e + X_e X_e^T G_e^T w_e(0); z(0)]`.
#[derive(Clone, Debug)]
pub struct BoundarySystem {
    pub lhs: Matrix,
    pub rhs: Vector,
    pub b: f64,
    pub k_even: Matrix,
    pub k_odd: Matrix,
    dec: Arc<Decomposition>,
    f_e_given: Vector,
    f_o: Vector,
}

impl BoundarySystem {
    pub fn decomposition(&self) -> &Arc<Decomposition> {
        &self.dec
    }

    /// `[b K_e, K_o]`
    pub fn operator(&self) -> Matrix {
        let (n, m) = self.k_even.shape();
        let mut out = Matrix::zeros(n, m + self.k_odd.ncols());
        out.columns_mut(0, m).copy_from(&(&self.k_even * self.b));
        out.columns_mut(m, self.k_odd.ncols()).copy_from(&self.k_odd);
        out
    }

    /// `K_o (w_o + f_o) + b K_e (w_e + f_e)` for a state `w(0)` and full `f_e`.
    pub fn residual(&self, w0: &Vector, f_e: &Vector) -> Vector {
        let m = self.k_even.ncols();
        let n = self.k_odd.ncols();
        let we = w0.rows(0, m) + f_e;
        let wo = w0.rows(m, n) + &self.f_o;
        &self.k_odd * wo + &self.k_even * we * self.b
    }
}

/// Result of [`solve_boundary`].
#[derive(Clone, Debug)]
pub struct BoundarySolution {
    pub layer: LayerSolution,
    /// Full even boundary data with the solved `G_e` components filled in.
    pub f_e: Vector,
}

impl BoundarySolution {
    pub fn slip(&self) -> &Vector {
        self.layer.slip()
    }

    pub fn z0(&self) -> &Vector {
        self.layer.z0()
    }
}

fn check_chi(chi: f64) -> Result<()> {
    if chi > 0.0 && chi <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("chi must lie in (0, 1], got {chi}")))
    }
}

fn check_data(system: &MomentSystem, spec: &BoundarySpec) -> Result<()> {
    if spec.f_e.len() != system.m() || spec.f_o.len() != system.n() {
        return Err(invalid(format!(
            "boundary data has lengths ({}, {}), expected ({}, {})",
            spec.f_e.len(),
            spec.f_o.len(),
            system.m(),
            system.n()
        )));
    }
    if spec.f_e.iter().chain(spec.f_o.iter()).any(|v| !v.is_finite()) {
        return Err(invalid("boundary data must be finite"));
    }
    Ok(())
}

/// `H = M^T S^-1 M`.
pub fn maxwell_h(system: &MomentSystem) -> Result<Matrix> {
    let chol = Cholesky::new(system.s().clone())
        .ok_or_else(|| Error::Inconsistency("S is not positive definite".into()))?;
    let mb = system.m_block();
    let h = mb.transpose() * chol.solve(mb);
    Ok((&h + h.transpose()) * 0.5)
}

pub fn build_new_bc(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    spec: &BoundarySpec,
) -> Result<BoundarySystem> {
    if spec.kind != BcKind::NewMaxwell {
        return Err(invalid("build_new_bc needs a NewMaxwell spec"));
    }
    let h = maxwell_h(system)?;
    assemble(system, dec, spec, system.m_block().transpose(), h)
}

pub fn build_grad_bc(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    spec: &BoundarySpec,
) -> Result<BoundarySystem> {
    if spec.kind != BcKind::Grad {
        return Err(invalid("build_grad_bc needs a Grad spec"));
    }
    let n = system.n();
    let k_even = system.s().rows(0, n).into_owned();
    let k_odd = system.m_block().rows(0, n).into_owned();
    assemble(system, dec, spec, k_even, k_odd)
}

/// New-type condition with `M^T S^-1 M` replaced by any SPD `h`.
pub fn build_custom_bc(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    spec: &BoundarySpec,
    h: &Matrix,
) -> Result<BoundarySystem> {
    let n = system.n();
    if h.shape() != (n, n) {
        return Err(invalid(format!("H must be {n}x{n}")));
    }
    if (h - h.transpose()).amax() > 1e-12 * h.amax().max(1.0) || Cholesky::new(h.clone()).is_none()
    {
        return Err(invalid("H must be symmetric positive definite"));
    }
    assemble(system, dec, spec, system.m_block().transpose(), h.clone())
}

/// Dispatches on `spec.kind`.
pub fn build_bc(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    spec: &BoundarySpec,
) -> Result<BoundarySystem> {
    match spec.kind {
        BcKind::NewMaxwell => build_new_bc(system, dec, spec),
        BcKind::Grad => build_grad_bc(system, dec, spec),
    }
}

fn assemble(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    spec: &BoundarySpec,
    k_even: Matrix,
    k_odd: Matrix,
) -> Result<BoundarySystem> {
    check_chi(spec.chi)?;
    check_data(system, spec)?;
    let counts = dec.counts;
    if counts.m != system.m() || counts.n != system.n() {
        return Err(invalid("decomposition does not belong to this system"));
    }
    if counts.r2 != 0 {
        return Err(Error::UnsupportedConfiguration(format!(
            "boundary solve needs r2 = 0, found r2 = {}",
            counts.r2
        )));
    }
    let b = b_chi(spec.chi);
    let ge = &dec.g_even;
    let f_e_given = &spec.f_e - ge * (ge.transpose() * &spec.f_e);

    let n = system.n();
    let p1 = counts.p1;
    let n_plus = counts.n_plus;
    let mut op = Matrix::zeros(n, system.size());
    op.columns_mut(0, system.m()).copy_from(&(&k_even * b));
    op.columns_mut(system.m(), n).copy_from(&k_odd);

    let mut lhs = Matrix::zeros(n, p1 + n_plus);
    lhs.columns_mut(0, p1).copy_from(&(&k_even * ge * b));
    lhs.columns_mut(p1, n_plus).copy_from(&(&op * &dec.c_v3));
    let rhs = -(&k_odd * &spec.f_o) - &k_even * &f_e_given * b;

    Ok(BoundarySystem {
        lhs,
        rhs,
        b,
        k_even,
        k_odd,
        dec: Arc::clone(dec),
        f_e_given,
        f_o: spec.f_o.clone(),
    })
}

pub fn solve_boundary(bsys: &BoundarySystem) -> Result<BoundarySolution> {
    let dec = &bsys.dec;
    let p1 = dec.counts.p1;
    let n_plus = dec.counts.n_plus;
    if bsys.rhs.iter().all(|v| *v == 0.0) {
        let layer = LayerSolution::new(Arc::clone(dec), Vector::zeros(n_plus), Vector::zeros(p1))?;
        return Ok(BoundarySolution {
            layer,
            f_e: bsys.f_e_given.clone(),
        });
    }
    let x = least_squares_unique(&bsys.lhs, &bsys.rhs)?;
    let shifted = x.rows(0, p1).into_owned();
    let z0 = x.rows(p1, n_plus).into_owned();
    // The unknown absorbs G_e X_e (V1^T w)(0); remove it to get G_e^T f_e.
    let r1 = dec.counts.r1;
    let a0 = dec.v1_coefficients().rows(0, r1) * &z0;
    let slip = shifted - &dec.x_even * a0;
    let f_e = &bsys.f_e_given + &dec.g_even * &slip;
    let layer = LayerSolution::new(Arc::clone(dec), z0, slip)?;
    Ok(BoundarySolution { layer, f_e })
}

/// Specular-type wall (`b = 0`): solves `K_o (w_o(0) + f_o) = 0` for `z(0)`
/// alone, requiring `-K_o f_o` to lie in the range of `K_o (V3 T_+)_o`.
pub fn solve_without_slip(
    system: &MomentSystem,
    dec: &Arc<Decomposition>,
    kind: BcKind,
    f_o: &Vector,
) -> Result<LayerSolution> {
    if f_o.len() != system.n() {
        return Err(invalid(format!("f_o must have length {}", system.n())));
    }
    let n = system.n();
    let k_odd = match kind {
        BcKind::NewMaxwell => maxwell_h(system)?,
        BcKind::Grad => system.m_block().rows(0, n).into_owned(),
    };
    let mut op = Matrix::zeros(n, system.size());
    op.columns_mut(system.m(), n).copy_from(&k_odd);
    let z0 = solve_halfspace(dec, &op, &-(&k_odd * f_o))?;
    LayerSolution::new(Arc::clone(dec), z0, Vector::zeros(dec.counts.p1))
}

/// One-dimensional wall moments `J_0..=J_m_max` of a shifted, heated
/// Maxwellian: `J_0 = 1`, `J_1 = u_w`,
/// `J_k = ((theta_w - 1) sqrt(k-1) J_{k-2} + u_w J_{k-1}) / sqrt(k)`.
pub fn wall_maxwellian_moments(m_max: usize, u_w: f64, theta_w: f64) -> Result<Vec<f64>> {
    if theta_w.is_nan() || theta_w <= 0.0 || !u_w.is_finite() || !theta_w.is_finite() {
        return Err(invalid(format!("wall temperature must be positive, got {theta_w}")));
    }
    let mut j = Vec::with_capacity(m_max + 1);
    j.push(1.0);
    if m_max >= 1 {
        j.push(u_w);
    }
    for k in 2..=m_max {
        let kf = k as f64;
        let next = ((theta_w - 1.0) * (kf - 1.0).sqrt() * j[k - 2] + u_w * j[k - 1]) / kf.sqrt();
        j.push(next);
    }
    Ok(j)
}
