//! Fixtures shared by the benchmarks.

use knudsen_core::{assemble_system, CollisionModel, MomentSystem, ProblemKind, Result};

/// Orders used across the benchmark groups.
pub const ORDERS: [u32; 3] = [20, 80, 160];

pub fn system(kind: ProblemKind, order: u32) -> Result<MomentSystem> {
    assemble_system(&kind.index_set(order)?, CollisionModel::Bgk)
}
