//! LSTM cell:
//!
//! ```text
//! i = logistic(A_i x + B_i h + b_i)      input gate
//! j = tanh    (A_j x + B_j h + b_j)      candidate
//! f = logistic(A_f x + B_f h + b_f)      forget gate
//! o = logistic(A_o x + B_o h + b_o)      output gate
//! c' = f (.) c + i (.) j
//! h' = o (.) tanh(c')
//! ```

use super::{logistic, map1, GateParams};
use crate::ndmath::{hadamard, matvec_t, outer_add, Tensor1};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub gate_i: GateParams,
    pub gate_j: GateParams,
    pub gate_f: GateParams,
    pub gate_o: GateParams,
}

impl LstmParams {
    pub fn zeros(d_h: usize, d_in: usize) -> Self {
        LstmParams {
            gate_i: GateParams::zeros(d_h, d_in),
            gate_j: GateParams::zeros(d_h, d_in),
            gate_f: GateParams::zeros(d_h, d_in),
            gate_o: GateParams::zeros(d_h, d_in),
        }
    }

    pub fn zero_out(&mut self) {
        self.gate_i.zero_out();
        self.gate_j.zero_out();
        self.gate_f.zero_out();
        self.gate_o.zero_out();
    }

    pub fn hidden_size(&self) -> usize {
        self.gate_i.bias.len()
    }
}

/// Forward intermediates needed by the backward pass.
#[derive(Debug, Clone)]
pub struct LstmCache {
    x: Tensor1,
    h_prev: Tensor1,
    c_prev: Tensor1,
    i: Tensor1,
    j: Tensor1,
    f: Tensor1,
    o: Tensor1,
    tanh_c_new: Tensor1,
}

pub fn lstm_step(
    x: &Tensor1,
    h: &Tensor1,
    c: &Tensor1,
    p: &LstmParams,
) -> (Tensor1, Tensor1, LstmCache) {
    assert_eq!(h.len(), p.hidden_size(), "lstm_step: hidden shape mismatch");
    assert_eq!(c.len(), p.hidden_size(), "lstm_step: cell shape mismatch");
    let i = map1(&p.gate_i.preact(x, h), logistic);
    let j = map1(&p.gate_j.preact(x, h), f64::tanh);
    let f = map1(&p.gate_f.preact(x, h), logistic);
    let o = map1(&p.gate_o.preact(x, h), logistic);
    let mut c_new = hadamard(&f, c);
    let ij = hadamard(&i, &j);
    crate::ndmath::add_assign(&mut c_new, &ij);
    let tanh_c_new = map1(&c_new, f64::tanh);
    let h_new = hadamard(&o, &tanh_c_new);
    let cache = LstmCache {
        x: x.clone(),
        h_prev: h.clone(),
        c_prev: c.clone(),
        i,
        j,
        f,
        o,
        tanh_c_new,
    };
    (h_new, c_new, cache)
}

/// Exact gradients of one step. `dh`/`dc` are the upstream gradients with
/// respect to the step's outputs; parameter gradients accumulate into
/// `grads`; returns (dx, dh_prev, dc_prev).
pub fn lstm_backward(
    p: &LstmParams,
    cache: &LstmCache,
    dh: &Tensor1,
    dc: &Tensor1,
    grads: &mut LstmParams,
) -> (Tensor1, Tensor1, Tensor1) {
    let d = p.hidden_size();
    assert_eq!(dh.len(), d, "lstm_backward: dh shape mismatch");
    assert_eq!(dc.len(), d, "lstm_backward: dc shape mismatch");

    // through h' = o . tanh(c') and c' = f . c + i . j
    let mut do_pre = Tensor1::zeros(d);
    let mut dc_total = Tensor1::zeros(d);
    for k in 0..d {
        let tc = cache.tanh_c_new[k];
        let o = cache.o[k];
        do_pre[k] = dh[k] * tc * o * (1.0 - o);
        dc_total[k] = dc[k] + dh[k] * o * (1.0 - tc * tc);
    }
    let mut di_pre = Tensor1::zeros(d);
    let mut dj_pre = Tensor1::zeros(d);
    let mut df_pre = Tensor1::zeros(d);
    let mut dc_prev = Tensor1::zeros(d);
    for k in 0..d {
        let (i, j, f) = (cache.i[k], cache.j[k], cache.f[k]);
        di_pre[k] = dc_total[k] * j * i * (1.0 - i);
        dj_pre[k] = dc_total[k] * i * (1.0 - j * j);
        df_pre[k] = dc_total[k] * cache.c_prev[k] * f * (1.0 - f);
        dc_prev[k] = dc_total[k] * f;
    }

    let mut dx = Tensor1::zeros(cache.x.len());
    let mut dh_prev = Tensor1::zeros(d);
    for (gate, gg, d_pre) in [
        (&p.gate_i, &mut grads.gate_i, &di_pre),
        (&p.gate_j, &mut grads.gate_j, &dj_pre),
        (&p.gate_f, &mut grads.gate_f, &df_pre),
        (&p.gate_o, &mut grads.gate_o, &do_pre),
    ] {
        outer_add(&mut gg.input, d_pre, &cache.x);
        outer_add(&mut gg.recurrent, d_pre, &cache.h_prev);
        crate::ndmath::add_assign(&mut gg.bias, d_pre);
        crate::ndmath::add_assign(&mut dx, &matvec_t(&gate.input, d_pre));
        crate::ndmath::add_assign(&mut dh_prev, &matvec_t(&gate.recurrent, d_pre));
    }
    (dx, dh_prev, dc_prev)
}
