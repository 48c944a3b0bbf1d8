//! Minimal dense numerics: vectors/matrices, seeded initialization, the Adam
//! optimizer, a finite-difference gradient oracle, and the binary tensor
//! container used by checkpoints.

pub mod adam;
pub mod container;
pub mod gradcheck;
pub mod rng;
pub mod tensor;

pub use adam::{AdamHyper, AdamState};
pub use gradcheck::{finite_diff_grad, rel_err};
pub use tensor::{
    add, add_assign, affine, hadamard, matvec, matvec_t, outer_add, scale, seeded_init, Tensor1,
    Tensor2,
};
