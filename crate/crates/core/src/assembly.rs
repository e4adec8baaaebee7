//! Assembly of the transport matrix `A`, the collision matrix `Q` and the
//! half-range flux matrix `S` on a reduced index set.
//!
//! Entries follow from the three-term recursion of the orthonormal Hermite
//! polynomials; `S` uses the closed form of the one-dimensional half-range
//! integral, which is separable across the tangential components.

use nalgebra::Cholesky;

use crate::error::{invalid, Error, Result};
use crate::index::{validate_c1, IndexSet, MultiIndex};
use crate::linalg::{numerical_rank, symmetric_eigenvalues, Matrix};

/// Values `z_k = phi_k(0)` of the orthonormal Hermite functions at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteZeroTable {
    values: Vec<f64>,
}

impl HermiteZeroTable {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// `z_0 = 1`, `z_1 = 0`, `z_{k+1} = -sqrt(k) z_{k-1} / sqrt(k+1)`.
pub fn hermite_zero_values(max_order: usize) -> HermiteZeroTable {
    let mut values = Vec::with_capacity(max_order + 1);
    values.push(1.0);
    if max_order >= 1 {
        values.push(0.0);
    }
    for k in 1..max_order {
        let kf = k as f64;
        values.push(-kf.sqrt() * values[k - 1] / (kf + 1.0).sqrt());
    }
    HermiteZeroTable { values }
}

/// One-dimensional half-range flux entry for even orders `a`, `b`.
pub fn halfflux_1d(a: usize, b: usize, z: &HermiteZeroTable) -> f64 {
    let d = a as f64 - b as f64;
    (a + b + 1) as f64 / (1.0 - d * d) * z.get(a) * z.get(b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CollisionModel {
    Bgk,
    Shakhov { prandtl: f64 },
}

impl CollisionModel {
    pub fn prandtl(&self) -> f64 {
        match *self {
            CollisionModel::Bgk => 1.0,
            CollisionModel::Shakhov { prandtl } => prandtl,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CollisionModel::Bgk => "bgk",
            CollisionModel::Shakhov { .. } => "shakhov",
        }
    }
}

/// Where the collision matrix of a [`MomentSystem`] came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CollisionSource {
    Model(CollisionModel),
    /// Supplied directly, e.g. moments of a linearized Boltzmann operator.
    UserSupplied,
}

/// `A[a,b] = sqrt(a_2)` for `b = a - e_2`, `sqrt(a_2 + 1)` for `b = a + e_2`.
///
/// Returns the full matrix and its even-by-odd block `M`.
pub fn assemble_transport(set: &IndexSet) -> Result<(Matrix, Matrix)> {
    require_c1(set)?;
    let size = set.len();
    let mut a = Matrix::zeros(size, size);
    for (row, alpha) in set.iter().enumerate() {
        let k = alpha.normal();
        if k > 0 {
            if let Some(col) = set.position(&alpha.with_normal(k - 1)) {
                a[(row, col)] = f64::from(k).sqrt();
            }
        }
        if let Some(col) = set.position(&alpha.with_normal(k + 1)) {
            a[(row, col)] = f64::from(k + 1).sqrt();
        }
    }
    let m_block = a.view((0, set.m()), (set.m(), set.n())).into_owned();
    Ok((a, m_block))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ShakhovRole {
    /// `2 e_i`
    Energy(usize),
    /// `e_i + 2 e_j`
    HeatFlux(usize, usize),
    Other,
}

fn shakhov_role(alpha: &MultiIndex) -> ShakhovRole {
    let c = alpha.components();
    match alpha.norm() {
        2 => match c.iter().position(|&x| x == 2) {
            Some(i) => ShakhovRole::Energy(i),
            None => ShakhovRole::Other,
        },
        3 => {
            if let Some(i) = c.iter().position(|&x| x == 3) {
                ShakhovRole::HeatFlux(i, i)
            } else {
                match (c.iter().position(|&x| x == 1), c.iter().position(|&x| x == 2)) {
                    (Some(i), Some(j)) => ShakhovRole::HeatFlux(i, j),
                    _ => ShakhovRole::Other,
                }
            }
        }
        _ => ShakhovRole::Other,
    }
}

/// Linearized Shakhov collision matrix restricted to `set`. `Pr = 1` is BGK.
pub fn assemble_collision_shakhov(set: &IndexSet, prandtl: f64) -> Result<Matrix> {
    require_c1(set)?;
    if !(prandtl > 0.0 && prandtl.is_finite()) {
        return Err(invalid(format!("Prandtl number must be positive, got {prandtl}")));
    }
    let dim = set.dim() as f64;
    let kd = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let size = set.len();
    let mut q = Matrix::zeros(size, size);
    let roles: Vec<ShakhovRole> = set.iter().map(shakhov_role).collect();
    for (row, alpha) in set.iter().enumerate() {
        match roles[row] {
            ShakhovRole::Energy(i) => {
                for (col, role) in roles.iter().enumerate() {
                    if let ShakhovRole::Energy(j) = *role {
                        q[(row, col)] = kd(i, j) - 1.0 / dim;
                    }
                }
            }
            ShakhovRole::HeatFlux(i, j) => {
                for (col, role) in roles.iter().enumerate() {
                    if let ShakhovRole::HeatFlux(i2, k) = *role {
                        if i2 == i {
                            q[(row, col)] = kd(j, k)
                                - (1.0 - prandtl) / 5.0
                                    * (1.0 + 2.0 * kd(i, j)).sqrt()
                                    * (1.0 + 2.0 * kd(i, k)).sqrt();
                        }
                    }
                }
            }
            ShakhovRole::Other => {
                if alpha.norm() >= 2 {
                    q[(row, row)] = 1.0;
                }
            }
        }
    }
    Ok(q)
}

/// Half-range flux matrix on the even part of `set`.
pub fn assemble_halfflux(set: &IndexSet) -> Result<Matrix> {
    require_c1(set)?;
    let even = set.even_part();
    let z = hermite_zero_values(set.order() as usize + 1);
    let mut s = Matrix::zeros(even.len(), even.len());
    for (i, a) in even.iter().enumerate() {
        for (j, b) in even.iter().enumerate() {
            if a.same_chain(b) {
                s[(i, j)] = halfflux_1d(a.normal() as usize, b.normal() as usize, &z);
            }
        }
    }
    Ok(s)
}

/// An assembled half-space system `A w' = -Q w` together with `S`.
#[derive(Clone, Debug)]
pub struct MomentSystem {
    index_set: IndexSet,
    a: Matrix,
    m_block: Matrix,
    q: Matrix,
    s: Matrix,
    source: CollisionSource,
}

impl MomentSystem {
    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    /// Even-by-odd block of `A`.
    pub fn m_block(&self) -> &Matrix {
        &self.m_block
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn q_even(&self) -> Matrix {
        let m = self.m();
        self.q.view((0, 0), (m, m)).into_owned()
    }

    pub fn q_odd(&self) -> Matrix {
        let (m, n) = (self.m(), self.n());
        self.q.view((m, m), (n, n)).into_owned()
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    pub fn source(&self) -> CollisionSource {
        self.source
    }

    pub fn m(&self) -> usize {
        self.index_set.m()
    }

    pub fn n(&self) -> usize {
        self.index_set.n()
    }

    pub fn size(&self) -> usize {
        self.index_set.len()
    }

    /// Builds a system with a caller-supplied collision matrix. The matrix is
    /// subjected to the same structural checks as the built-in models.
    pub fn with_collision_matrix(set: IndexSet, q: Matrix) -> Result<Self> {
        if q.shape() != (set.len(), set.len()) {
            return Err(invalid(format!(
                "collision matrix is {}x{}, index set has {} members",
                q.nrows(),
                q.ncols(),
                set.len()
            )));
        }
        Self::build(set, q, CollisionSource::UserSupplied)
    }

    fn build(set: IndexSet, q: Matrix, source: CollisionSource) -> Result<Self> {
        let (a, m_block) = assemble_transport(&set)?;
        let s = assemble_halfflux(&set)?;
        let sys = Self {
            index_set: set,
            a,
            m_block,
            q,
            s,
            source,
        };
        sys.verify()?;
        Ok(sys)
    }

    fn verify(&self) -> Result<()> {
        let (m, n) = (self.m(), self.n());
        if m < n {
            return Err(Error::Assembly {
                clause: "m >= n",
                detail: format!("m = {m}, n = {n}"),
            });
        }
        let rank = numerical_rank(&self.m_block);
        if rank != n {
            return Err(Error::Assembly {
                clause: "rank(M) = n",
                detail: format!("rank {rank}, n = {n}"),
            });
        }
        let q = &self.q;
        let asym = (q - q.transpose()).amax();
        if asym > 1e-14 * q.amax().max(1.0) {
            return Err(Error::Assembly {
                clause: "Q symmetric",
                detail: format!("max |Q - Q^T| = {asym:e}"),
            });
        }
        let coupling = q.view((0, m), (m, n)).amax();
        if coupling != 0.0 {
            return Err(Error::Assembly {
                clause: "Q block diagonal",
                detail: format!("even-odd coupling {coupling:e}"),
            });
        }
        let lowest = symmetric_eigenvalues(q).iter().copied().fold(f64::INFINITY, f64::min);
        if lowest < -1e-12 {
            return Err(Error::Assembly {
                clause: "Q positive semi-definite",
                detail: format!("smallest eigenvalue {lowest:e}"),
            });
        }
        // With rank(M) = n only even vectors can lie in Null(A), so the
        // intersection reduces to Null(M^T) and Null(Q_e).
        let mut stacked = Matrix::zeros(n + m, m);
        stacked.view_mut((0, 0), (n, m)).copy_from(&self.m_block.transpose());
        stacked.view_mut((n, 0), (m, m)).copy_from(&self.q_even());
        let rank = numerical_rank(&stacked);
        if rank != m {
            return Err(Error::Assembly {
                clause: "Null(A) and Null(Q) intersect trivially",
                detail: format!("intersection has dimension {}", m - rank),
            });
        }
        if Cholesky::new(self.s.clone()).is_none() {
            return Err(Error::Assembly {
                clause: "S positive definite",
                detail: "Cholesky factorization failed".into(),
            });
        }
        Ok(())
    }
}

pub fn assemble_system(set: &IndexSet, model: CollisionModel) -> Result<MomentSystem> {
    let q = assemble_collision_shakhov(set, model.prandtl())?;
    MomentSystem::build(set.clone(), q, CollisionSource::Model(model))
}

fn require_c1(set: &IndexSet) -> Result<()> {
    if validate_c1(set) {
        Ok(())
    } else {
        Err(invalid("index set violates the wall-normal closure condition (C1)"))
    }
}
