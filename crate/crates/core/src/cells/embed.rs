//! Learned token embedding. The vocabulary is the node set plus one
//! reserved GO token (id = vocab - 1) that is never fed or emitted; it only
//! keeps the checkpoint format stable.

use crate::error::{Error, Result};
use crate::ndmath::{Tensor1, Tensor2};

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub table: Tensor2, // (vocab, d_emb)
}

impl Embedding {
    pub fn new(table: Tensor2) -> Self {
        Embedding { table }
    }

    pub fn vocab(&self) -> usize {
        self.table.rows()
    }

    pub fn dim(&self) -> usize {
        self.table.cols()
    }

    /// Row copy for a token id.
    pub fn embed(&self, id: usize) -> Result<Tensor1> {
        if id >= self.vocab() {
            return Err(Error::Domain(format!(
                "token id {id} out of range for vocabulary {}",
                self.vocab()
            )));
        }
        Tensor1::from_vec(self.table.row(id).to_vec())
    }

    /// Accumulate an upstream gradient into the matching row of `acc`.
    pub fn embed_backward(id: usize, grad: &Tensor1, acc: &mut Tensor2) -> Result<()> {
        if id >= acc.rows() {
            return Err(Error::Domain(format!(
                "token id {id} out of range for vocabulary {}",
                acc.rows()
            )));
        }
        assert_eq!(grad.len(), acc.cols(), "embedding gradient width mismatch");
        for (slot, g) in acc.row_mut(id).iter_mut().zip(grad.as_slice()) {
            *slot += g;
        }
        Ok(())
    }
}
