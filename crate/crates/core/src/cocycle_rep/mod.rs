//! Compact fiber groups, their unitary representations, continuous cocycles
//! and cocycle-twisted Koopman averages.
//!
//! Conventions:
//!
//! - the cocycle equation reads `γ(g₁ + g₂, x) = γ(g₂, x) · γ(g₁, g₂·x)`, so for
//!   ℕ the value `γ(n, x)` is the ordered product `γ(1, x) γ(1, φx) ⋯ γ(1, φⁿ⁻¹x)`;
//! - matrix elements are `π_ij(ω) = ⟨π(ω) e_i, e_j⟩ = π(ω)[j, i]` with the inner
//!   product linear in its first argument; indices are 0-based.

mod cocycle;
mod gram_schmidt;
mod group;
mod representation;
mod table_format;
mod unitary;

pub use cocycle::{cocycle_check, cocycle_eval, twisted_average, Cocycle, CocycleKind};
pub use gram_schmidt::pointwise_gram_schmidt;
pub use group::{FiberGroup, FiniteGroup, GroupElement, GroupTag};
pub use representation::{matrix_element, schur_check, MatrixElement, Representation};
pub use table_format::{parse_group_table, write_group_table};
pub use unitary::{unitarity_defect, UnitaryMatrix};
