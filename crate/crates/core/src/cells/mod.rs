//! Recurrent cells and the node embedding, with exact hand-derived backward
//! passes. Gradients are accumulated into mirror structures of the same
//! shape as the parameters; every backward pass is checked against central
//! finite differences in the test suites.

pub mod embed;
pub mod gru;
pub mod lstm;
pub mod rnn;

pub use embed::Embedding;
pub use gru::{gru_backward, gru_step, GruCache, GruParams};
pub use lstm::{lstm_backward, lstm_step, LstmCache, LstmParams};
pub use rnn::{rnn_backward, rnn_step, rnn_step_smoothed, RnnCache, RnnDecoderParams};

use crate::ndmath::Tensor1;

/// Numerically stable logistic function, branch-split at 0.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn map1(x: &Tensor1, f: impl Fn(f64) -> f64) -> Tensor1 {
    let mut out = x.clone();
    for v in out.as_mut_slice() {
        *v = f(*v);
    }
    out
}

/// One (input map, recurrent map, bias) triple — the repeating unit of
/// every gate equation.
#[derive(Debug, Clone, PartialEq)]
pub struct GateParams {
    pub input: crate::ndmath::Tensor2,
    pub recurrent: crate::ndmath::Tensor2,
    pub bias: Tensor1,
}

impl GateParams {
    pub fn zeros(d_h: usize, d_in: usize) -> Self {
        GateParams {
            input: crate::ndmath::Tensor2::zeros(d_h, d_in),
            recurrent: crate::ndmath::Tensor2::zeros(d_h, d_h),
            bias: Tensor1::zeros(d_h),
        }
    }

    pub fn zero_out(&mut self) {
        self.input.fill(0.0);
        self.recurrent.fill(0.0);
        self.bias.fill(0.0);
    }

    /// Pre-activation `input x + recurrent h + bias`.
    pub fn preact(&self, x: &Tensor1, h: &Tensor1) -> Tensor1 {
        let mut a = crate::ndmath::affine(&self.input, x, &self.bias);
        let rec = crate::ndmath::matvec(&self.recurrent, h);
        crate::ndmath::add_assign(&mut a, &rec);
        a
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logistic_is_stable_and_correct() {
        assert_eq!(logistic(0.0), 0.5);
        assert!((logistic(1.0) - 1.0 / (1.0 + (-1.0f64).exp())).abs() < 1e-16);
        assert_eq!(logistic(1000.0), 1.0);
        assert_eq!(logistic(-1000.0), 0.0);
        assert!(logistic(-1000.0) >= 0.0);
        // symmetry
        for x in [-3.0, -0.7, 0.3, 2.5] {
            assert!((logistic(x) + logistic(-x) - 1.0).abs() < 1e-15);
        }
    }
}
