//! Lifted operators. Each operator is a pure function from parfactors (or a
//! model) to parfactors, paired with an applicability check.

pub mod counting;
pub mod inversion;
pub mod joint;
pub mod multiply;
pub mod prv;
pub mod split;

pub use counting::{count_convert, drop_free_logvar, just_different_count_convert, sum_out_counting};
pub use inversion::{group_inversion, group_inversion_counting, inversion_group, sum_out_inversion};
pub use joint::{joint_convert, relabel, AtomClass};
pub use multiply::{find_alignment, lifted_multiply, Alignment};
pub use prv::{compare, Prv, Relation};
pub use split::{absorb_evidence, shatter, simplify, split};
