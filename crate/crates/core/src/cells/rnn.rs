//! Vanilla RNN decoder with a log-softmax head:
//!
//! ```text
//! h' = tanh(A x + B h + b)
//! y  = logsoftmax(C h' + c)
//! ```
//!
//! The smoothed variant scales the pre-activation inside tanh by
//! 1/sqrt(1 + (pi/2) sigma^2) and replaces the log-softmax by
//! kappa * logits - logsumexp(logits); with kappa = 1 and scale = 1 it is
//! exactly the plain step.

use crate::ndmath::{add_assign, affine, matvec, matvec_t, outer_add, Tensor1, Tensor2};

#[derive(Debug, Clone, PartialEq)]
pub struct RnnDecoderParams {
    pub input: Tensor2,     // (d_h, d_in)
    pub recurrent: Tensor2, // (d_h, d_h)
    pub bias: Tensor1,      // (d_h)
    pub output: Tensor2,    // (vocab, d_h)
    pub output_bias: Tensor1, // (vocab)
}

impl RnnDecoderParams {
    pub fn zeros(d_h: usize, d_in: usize, vocab: usize) -> Self {
        RnnDecoderParams {
            input: Tensor2::zeros(d_h, d_in),
            recurrent: Tensor2::zeros(d_h, d_h),
            bias: Tensor1::zeros(d_h),
            output: Tensor2::zeros(vocab, d_h),
            output_bias: Tensor1::zeros(vocab),
        }
    }

    pub fn zero_out(&mut self) {
        self.input.fill(0.0);
        self.recurrent.fill(0.0);
        self.bias.fill(0.0);
        self.output.fill(0.0);
        self.output_bias.fill(0.0);
    }

    pub fn hidden_size(&self) -> usize {
        self.bias.len()
    }

    pub fn vocab(&self) -> usize {
        self.output_bias.len()
    }
}

#[derive(Debug, Clone)]
pub struct RnnCache {
    x: Tensor1,
    h_prev: Tensor1,
    h_new: Tensor1,
    softmax: Tensor1,
    kappa: f64,
    tanh_scale: f64,
}

/// Plain decoder step; `y` holds log-probabilities (logsumexp(y) = 0).
pub fn rnn_step(x: &Tensor1, h: &Tensor1, p: &RnnDecoderParams) -> (Tensor1, Tensor1, RnnCache) {
    rnn_step_smoothed(x, h, p, 1.0, 1.0)
}

/// Decoder step with a diffused output head (`kappa`) and optionally a
/// diffused recurrence tanh (`tanh_scale` >= 1).
pub fn rnn_step_smoothed(
    x: &Tensor1,
    h: &Tensor1,
    p: &RnnDecoderParams,
    kappa: f64,
    tanh_scale: f64,
) -> (Tensor1, Tensor1, RnnCache) {
    assert_eq!(h.len(), p.hidden_size(), "rnn_step: hidden shape mismatch");
    let mut pre = affine(&p.input, x, &p.bias);
    add_assign(&mut pre, &matvec(&p.recurrent, h));
    let mut h_new = pre;
    for v in h_new.as_mut_slice() {
        *v = (*v / tanh_scale).tanh();
    }

    let logits = affine(&p.output, &h_new, &p.output_bias);
    // stable logsumexp with max subtraction
    let max = logits
        .as_slice()
        .iter()
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut sum = 0.0;
    let mut softmax = Tensor1::zeros(logits.len());
    for (k, &l) in logits.as_slice().iter().enumerate() {
        let e = (l - max).exp();
        softmax[k] = e;
        sum += e;
    }
    let lse = max + sum.ln();
    for v in softmax.as_mut_slice() {
        *v /= sum;
    }
    let mut y = Tensor1::zeros(logits.len());
    for k in 0..logits.len() {
        y[k] = kappa * logits[k] - lse;
    }
    let cache = RnnCache {
        x: x.clone(),
        h_prev: h.clone(),
        h_new: h_new.clone(),
        softmax,
        kappa,
        tanh_scale,
    };
    (h_new, y, cache)
}

/// Exact gradients of one step. `dy` is the upstream gradient on the
/// log-probability vector, `dh_next` the gradient flowing back into `h'`
/// from the following step; parameter gradients accumulate into `grads`;
/// returns (dx, dh_prev).
pub fn rnn_backward(
    p: &RnnDecoderParams,
    cache: &RnnCache,
    dy: &Tensor1,
    dh_next: &Tensor1,
    grads: &mut RnnDecoderParams,
) -> (Tensor1, Tensor1) {
    assert_eq!(dy.len(), p.vocab(), "rnn_backward: dy shape mismatch");
    assert_eq!(dh_next.len(), p.hidden_size(), "rnn_backward: dh shape mismatch");

    // y_k = kappa l_k - lse(l):  dl_m = kappa dy_m - softmax_m * sum(dy)
    let sum_dy: f64 = dy.as_slice().iter().sum();
    let mut dlogits = Tensor1::zeros(p.vocab());
    for k in 0..p.vocab() {
        dlogits[k] = cache.kappa * dy[k] - cache.softmax[k] * sum_dy;
    }

    outer_add(&mut grads.output, &dlogits, &cache.h_new);
    add_assign(&mut grads.output_bias, &dlogits);

    let mut dh_total = matvec_t(&p.output, &dlogits);
    add_assign(&mut dh_total, dh_next);

    // through h' = tanh(pre / scale)
    let mut da = Tensor1::zeros(p.hidden_size());
    for k in 0..p.hidden_size() {
        let hk = cache.h_new[k];
        da[k] = dh_total[k] * (1.0 - hk * hk) / cache.tanh_scale;
    }

    outer_add(&mut grads.input, &da, &cache.x);
    outer_add(&mut grads.recurrent, &da, &cache.h_prev);
    add_assign(&mut grads.bias, &da);

    let dx = matvec_t(&p.input, &da);
    let dh_prev = matvec_t(&p.recurrent, &da);
    (dx, dh_prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::tests_support::{random_t1, random_t2};
    use crate::ndmath::rng::det_rng;

    fn random_params(
        rng: &mut crate::ndmath::rng::DetRng,
        d_h: usize,
        d_in: usize,
        vocab: usize,
    ) -> RnnDecoderParams {
        RnnDecoderParams {
            input: random_t2(rng, d_h, d_in),
            recurrent: random_t2(rng, d_h, d_h),
            bias: random_t1(rng, d_h),
            output: random_t2(rng, vocab, d_h),
            output_bias: random_t1(rng, vocab),
        }
    }

    #[test]
    fn zero_output_head_is_uniform() {
        let mut rng = det_rng(51);
        let mut p = random_params(&mut rng, 4, 3, 7);
        p.output.fill(0.0);
        p.output_bias.fill(0.0);
        let (_, y, _) = rnn_step(&random_t1(&mut rng, 3), &random_t1(&mut rng, 4), &p);
        let expected = -(7.0f64).ln();
        for k in 0..7 {
            assert!((y[k] - expected).abs() <= 1e-15);
        }
    }

    #[test]
    fn log_probabilities_normalize() {
        let mut rng = det_rng(52);
        for _ in 0..50 {
            let p = random_params(&mut rng, 5, 4, 9);
            let (_, y, _) = rnn_step(&random_t1(&mut rng, 4), &random_t1(&mut rng, 5), &p);
            let sum_exp: f64 = y.as_slice().iter().map(|v| v.exp()).sum();
            assert!((sum_exp - 1.0).abs() <= 1e-12, "sum exp(y) = {sum_exp}");
        }
    }

    #[test]
    fn shifting_logits_by_a_constant_leaves_y_unchanged() {
        let mut rng = det_rng(53);
        let p = random_params(&mut rng, 4, 3, 6);
        let x = random_t1(&mut rng, 3);
        let h = random_t1(&mut rng, 4);
        let (_, y1, _) = rnn_step(&x, &h, &p);
        let mut shifted = p.clone();
        for v in shifted.output_bias.as_mut_slice() {
            *v += 7.25;
        }
        let (_, y2, _) = rnn_step(&x, &h, &shifted);
        for k in 0..6 {
            assert!((y1[k] - y2[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn step_matches_scalar_transcription() {
        let mut rng = det_rng(54);
        for _ in 0..10 {
            let (d_h, d_in, vocab) = (5, 4, 8);
            let p = random_params(&mut rng, d_h, d_in, vocab);
            let x = random_t1(&mut rng, d_in);
            let h = random_t1(&mut rng, d_h);
            let (h_new, y, _) = rnn_step(&x, &h, &p);

            let mut h_scalar = vec![0.0; d_h];
            for k in 0..d_h {
                let mut a = p.bias[k];
                for t in 0..d_in {
                    a += p.input.at(k, t) * x[t];
                }
                for t in 0..d_h {
                    a += p.recurrent.at(k, t) * h[t];
                }
                h_scalar[k] = a.tanh();
                assert!((h_new[k] - h_scalar[k]).abs() <= 1e-14 * h_scalar[k].abs().max(1.0));
            }
            let logits: Vec<f64> = (0..vocab)
                .map(|k| {
                    let mut a = p.output_bias[k];
                    for t in 0..d_h {
                        a += p.output.at(k, t) * h_scalar[t];
                    }
                    a
                })
                .collect();
            let lse = {
                let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                m + logits.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
            };
            for k in 0..vocab {
                let expected = logits[k] - lse;
                assert!((y[k] - expected).abs() <= 1e-14 * expected.abs().max(1.0));
            }
        }
    }

    // d nll / d logits = softmax - one_hot(target)
    #[test]
    fn nll_gradient_matches_closed_form() {
        let mut rng = det_rng(55);
        let (d_h, d_in, vocab) = (4, 3, 6);
        let p = random_params(&mut rng, d_h, d_in, vocab);
        let x = random_t1(&mut rng, d_in);
        let h = random_t1(&mut rng, d_h);
        let (_, _, cache) = rnn_step(&x, &h, &p);
        let target = 2usize;
        let mut dy = Tensor1::zeros(vocab);
        dy[target] = -1.0; // d(-y[target])/dy
        let mut grads = RnnDecoderParams::zeros(d_h, d_in, vocab);
        rnn_backward(&p, &cache, &dy, &Tensor1::zeros(d_h), &mut grads);
        // recover dlogits from the output-bias gradient (db_out = dlogits)
        for k in 0..vocab {
            let expected = cache.softmax[k] - if k == target { 1.0 } else { 0.0 };
            assert!(
                (grads.output_bias[k] - expected).abs() <= 1e-14,
                "component {k}"
            );
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = det_rng(56);
        let p = random_params(&mut rng, 4, 3, 6);
        let (_, _, cache) = rnn_step(&random_t1(&mut rng, 3), &random_t1(&mut rng, 4), &p);
        let mut grads = RnnDecoderParams::zeros(4, 3, 6);
        let (dx, dh) = rnn_backward(&p, &cache, &Tensor1::zeros(6), &Tensor1::zeros(4), &mut grads);
        assert!(dx.as_slice().iter().all(|&v| v == 0.0));
        assert!(dh.as_slice().iter().all(|&v| v == 0.0));
        assert!(grads.output.as_slice().iter().all(|&v| v == 0.0));
    }
}
