//! GRU cell:
//!
//! ```text
//! z  = logistic(A_z x + B_z h + b_z)          update gate
//! r  = logistic(A_r x + B_r h + b_r)          reset gate
//! ht = tanh    (A_h x + B_h (r (.) h) + b_h)  candidate
//! h' = z (.) h + (1 - z) (.) ht
//! ```

use super::{logistic, map1, GateParams};
use crate::ndmath::{add_assign, affine, hadamard, matvec, matvec_t, outer_add, Tensor1};

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub gate_z: GateParams,
    pub gate_r: GateParams,
    pub cand_h: GateParams,
}

impl GruParams {
    pub fn zeros(d_h: usize, d_in: usize) -> Self {
        GruParams {
            gate_z: GateParams::zeros(d_h, d_in),
            gate_r: GateParams::zeros(d_h, d_in),
            cand_h: GateParams::zeros(d_h, d_in),
        }
    }

    pub fn zero_out(&mut self) {
        self.gate_z.zero_out();
        self.gate_r.zero_out();
        self.cand_h.zero_out();
    }

    pub fn hidden_size(&self) -> usize {
        self.gate_z.bias.len()
    }
}

#[derive(Debug, Clone)]
pub struct GruCache {
    x: Tensor1,
    h_prev: Tensor1,
    z: Tensor1,
    r: Tensor1,
    rh: Tensor1, // r (.) h_prev
    h_tilde: Tensor1,
}

pub fn gru_step(x: &Tensor1, h: &Tensor1, p: &GruParams) -> (Tensor1, GruCache) {
    assert_eq!(h.len(), p.hidden_size(), "gru_step: hidden shape mismatch");
    let z = map1(&p.gate_z.preact(x, h), logistic);
    let r = map1(&p.gate_r.preact(x, h), logistic);
    let rh = hadamard(&r, h);
    let mut cand_pre = affine(&p.cand_h.input, x, &p.cand_h.bias);
    add_assign(&mut cand_pre, &matvec(&p.cand_h.recurrent, &rh));
    let h_tilde = map1(&cand_pre, f64::tanh);
    let mut h_new = Tensor1::zeros(h.len());
    for k in 0..h.len() {
        h_new[k] = z[k] * h[k] + (1.0 - z[k]) * h_tilde[k];
    }
    let cache = GruCache { x: x.clone(), h_prev: h.clone(), z, r, rh, h_tilde };
    (h_new, cache)
}

/// Exact gradients of one step; parameter gradients accumulate into `grads`;
/// returns (dx, dh_prev).
pub fn gru_backward(
    p: &GruParams,
    cache: &GruCache,
    dh: &Tensor1,
    grads: &mut GruParams,
) -> (Tensor1, Tensor1) {
    let d = p.hidden_size();
    assert_eq!(dh.len(), d, "gru_backward: dh shape mismatch");

    let mut dz_pre = Tensor1::zeros(d);
    let mut dht_pre = Tensor1::zeros(d);
    for k in 0..d {
        let z = cache.z[k];
        let ht = cache.h_tilde[k];
        dz_pre[k] = dh[k] * (cache.h_prev[k] - ht) * z * (1.0 - z);
        dht_pre[k] = dh[k] * (1.0 - z) * (1.0 - ht * ht);
    }
    // through the reset-gated recurrent term B_h (r (.) h_prev)
    let drh = matvec_t(&p.cand_h.recurrent, &dht_pre);
    let mut dr_pre = Tensor1::zeros(d);
    for k in 0..d {
        let r = cache.r[k];
        dr_pre[k] = drh[k] * cache.h_prev[k] * r * (1.0 - r);
    }

    outer_add(&mut grads.gate_z.input, &dz_pre, &cache.x);
    outer_add(&mut grads.gate_z.recurrent, &dz_pre, &cache.h_prev);
    add_assign(&mut grads.gate_z.bias, &dz_pre);
    outer_add(&mut grads.gate_r.input, &dr_pre, &cache.x);
    outer_add(&mut grads.gate_r.recurrent, &dr_pre, &cache.h_prev);
    add_assign(&mut grads.gate_r.bias, &dr_pre);
    outer_add(&mut grads.cand_h.input, &dht_pre, &cache.x);
    outer_add(&mut grads.cand_h.recurrent, &dht_pre, &cache.rh);
    add_assign(&mut grads.cand_h.bias, &dht_pre);

    let mut dx = matvec_t(&p.gate_z.input, &dz_pre);
    add_assign(&mut dx, &matvec_t(&p.gate_r.input, &dr_pre));
    add_assign(&mut dx, &matvec_t(&p.cand_h.input, &dht_pre));

    let mut dh_prev = matvec_t(&p.gate_z.recurrent, &dz_pre);
    add_assign(&mut dh_prev, &matvec_t(&p.gate_r.recurrent, &dr_pre));
    for k in 0..d {
        dh_prev[k] += dh[k] * cache.z[k] + drh[k] * cache.r[k];
    }
    (dx, dh_prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::tests_support::{random_gate, random_t1};
    use crate::ndmath::rng::det_rng;

    fn random_params(rng: &mut crate::ndmath::rng::DetRng, d_h: usize, d_in: usize) -> GruParams {
        GruParams {
            gate_z: random_gate(rng, d_h, d_in),
            gate_r: random_gate(rng, d_h, d_in),
            cand_h: random_gate(rng, d_h, d_in),
        }
    }

    #[test]
    fn all_zero_inputs_and_params_give_zero_state() {
        let p = GruParams::zeros(4, 3);
        let (h, _) = gru_step(&Tensor1::zeros(3), &Tensor1::zeros(4), &p);
        assert!(h.as_slice().iter().all(|&v| v == 0.0));
    }

    // Saturated update gate: b_z = 30 makes the step a pure copy.
    #[test]
    fn saturated_update_gate_copies_hidden_state() {
        let mut rng = det_rng(41);
        let mut p = random_params(&mut rng, 5, 4);
        p.gate_z.bias.fill(30.0);
        let x = random_t1(&mut rng, 4);
        let h = random_t1(&mut rng, 5);
        let (h_new, _) = gru_step(&x, &h, &p);
        for k in 0..5 {
            assert!((h_new[k] - h[k]).abs() <= 1e-10, "component {k}");
        }
    }

    #[test]
    fn step_matches_scalar_transcription() {
        let mut rng = det_rng(42);
        for _ in 0..10 {
            let (d_h, d_in) = (6, 5);
            let p = random_params(&mut rng, d_h, d_in);
            let x = random_t1(&mut rng, d_in);
            let h = random_t1(&mut rng, d_h);
            let (h_new, _) = gru_step(&x, &h, &p);
            for k in 0..d_h {
                let pre = |g: &GateParams, hvec: &Tensor1| {
                    let mut a = g.bias[k];
                    for t in 0..d_in {
                        a += g.input.at(k, t) * x[t];
                    }
                    for t in 0..d_h {
                        a += g.recurrent.at(k, t) * hvec[t];
                    }
                    a
                };
                let z = logistic(pre(&p.gate_z, &h));
                let r_all: Vec<f64> = (0..d_h)
                    .map(|kk| {
                        let mut a = p.gate_r.bias[kk];
                        for t in 0..d_in {
                            a += p.gate_r.input.at(kk, t) * x[t];
                        }
                        for t in 0..d_h {
                            a += p.gate_r.recurrent.at(kk, t) * h[t];
                        }
                        logistic(a)
                    })
                    .collect();
                let rh = Tensor1::from_vec(
                    (0..d_h).map(|kk| r_all[kk] * h[kk]).collect(),
                )
                .unwrap();
                let ht = pre(&p.cand_h, &rh).tanh();
                let expected = z * h[k] + (1.0 - z) * ht;
                assert!(
                    (h_new[k] - expected).abs() <= 1e-14 * expected.abs().max(1.0),
                    "component {k}"
                );
            }
        }
    }

    #[test]
    fn zero_upstream_gradient_gives_zero_gradients() {
        let mut rng = det_rng(43);
        let p = random_params(&mut rng, 4, 3);
        let (_, cache) = gru_step(&random_t1(&mut rng, 3), &random_t1(&mut rng, 4), &p);
        let mut grads = GruParams::zeros(4, 3);
        let (dx, dh) = gru_backward(&p, &cache, &Tensor1::zeros(4), &mut grads);
        assert!(dx.as_slice().iter().all(|&v| v == 0.0));
        assert!(dh.as_slice().iter().all(|&v| v == 0.0));
        assert!(grads.cand_h.recurrent.as_slice().iter().all(|&v| v == 0.0));
    }

    // Convex combination: |h| <= 1 elementwise implies |h'| <= 1.
    #[test]
    fn state_stays_in_unit_box() {
        let mut rng = det_rng(44);
        for _ in 0..200 {
            let p = random_params(&mut rng, 3, 3);
            let x = random_t1(&mut rng, 3);
            let h = random_t1(&mut rng, 3); // components in [-1, 1)
            let (h_new, _) = gru_step(&x, &h, &p);
            for k in 0..3 {
                assert!(h_new[k].abs() <= 1.0 + 1e-15);
            }
        }
    }
}
