//! Adam optimizer over a fixed list of parameter slots.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone)]
struct Slot {
    m: Vec<f64>,
    v: Vec<f64>,
}

/// First/second moment estimates for every registered parameter, plus the
/// shared step counter. `t` is 1 for the first update.
#[derive(Debug, Clone)]
pub struct AdamState {
    hyper: AdamHyper,
    t: u64,
    slots: Vec<Slot>,
}

impl AdamState {
    pub fn new(hyper: AdamHyper, slot_sizes: &[usize]) -> Self {
        let slots = slot_sizes
            .iter()
            .map(|&n| Slot { m: vec![0.0; n], v: vec![0.0; n] })
            .collect();
        AdamState { hyper, t: 0, slots }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn hyper(&self) -> AdamHyper {
        self.hyper
    }

    /// One bias-corrected update across all slots. `params`, `grads`, and
    /// `names` must align with the slot list. If any gradient is non-finite
    /// the whole update is rejected and no state is touched.
    pub fn step(
        &mut self,
        params: &mut [&mut [f64]],
        grads: &[&[f64]],
        names: &[&str],
    ) -> Result<()> {
        assert_eq!(params.len(), self.slots.len(), "adam: slot count mismatch");
        assert_eq!(grads.len(), self.slots.len(), "adam: grad count mismatch");
        for (k, g) in grads.iter().enumerate() {
            assert_eq!(g.len(), self.slots[k].m.len(), "adam: slot {k} size mismatch");
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteGrad { param: names.get(k).unwrap_or(&"?").to_string() });
            }
        }
        self.t += 1;
        let t = self.t as i32;
        let h = self.hyper;
        let bc1 = 1.0 - h.beta1.powi(t);
        let bc2 = 1.0 - h.beta2.powi(t);
        for ((slot, p), g) in self.slots.iter_mut().zip(params.iter_mut()).zip(grads.iter()) {
            for i in 0..g.len() {
                let gi = g[i];
                slot.m[i] = h.beta1 * slot.m[i] + (1.0 - h.beta1) * gi;
                slot.v[i] = h.beta2 * slot.v[i] + (1.0 - h.beta2) * gi * gi;
                let m_hat = slot.m[i] / bc1;
                let v_hat = slot.v[i] / bc2;
                p[i] -= h.learning_rate * m_hat / (v_hat.sqrt() + h.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndmath::rng::det_rng;
    use rand::Rng;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut st = AdamState::new(AdamHyper::default(), &[3]);
        let mut p = vec![1.0, -2.0, 0.5];
        let orig = p.clone();
        st.step(&mut [&mut p], &[&[0.0, 0.0, 0.0]], &["w"]).unwrap();
        assert_eq!(p, orig);
    }

    // Hand-computed closed form: m_hat = 1, v_hat = 1, step = -lr/(1+eps).
    #[test]
    fn scalar_first_step_matches_closed_form() {
        let mut st = AdamState::new(AdamHyper::default(), &[1]);
        let mut p = vec![0.0];
        st.step(&mut [&mut p], &[&[1.0]], &["theta"]).unwrap();
        let expected = -1e-3 / (1.0 + 1e-8);
        assert!(
            (p[0] - expected).abs() <= 1e-9 * expected.abs(),
            "got {} want {}",
            p[0],
            expected
        );
        assert_eq!(st.step_count(), 1);
    }

    #[test]
    fn identical_inputs_give_identical_outputs() {
        let run = || {
            let mut st = AdamState::new(AdamHyper::default(), &[4]);
            let mut p = vec![0.1, 0.2, 0.3, 0.4];
            for _ in 0..10 {
                st.step(&mut [&mut p], &[&[0.5, -0.25, 1.0, -1.0]], &["w"]).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn non_finite_gradient_is_rejected_naming_the_parameter() {
        let mut st = AdamState::new(AdamHyper::default(), &[2, 2]);
        let mut a = vec![0.0, 0.0];
        let mut b = vec![0.0, 0.0];
        let err = st
            .step(&mut [&mut a, &mut b], &[&[0.0, 0.0], &[f64::NAN, 0.0]], &["first", "second"])
            .unwrap_err();
        match err {
            crate::error::Error::NonFiniteGrad { param } => assert_eq!(param, "second"),
            other => panic!("unexpected error {other:?}"),
        }
        // rejected update must not advance the counter or move parameters
        assert_eq!(st.step_count(), 0);
        assert_eq!(a, vec![0.0, 0.0]);
    }

    // First-step magnitude bound |dtheta| <= lr * 1.001 whenever g != 0.
    #[test]
    fn first_step_magnitude_is_bounded() {
        let mut rng = det_rng(11);
        for _ in 0..200 {
            let g: f64 = rng.random::<f64>() * 200.0 - 100.0;
            if g == 0.0 {
                continue;
            }
            let mut st = AdamState::new(AdamHyper::default(), &[1]);
            let mut p = vec![0.0];
            st.step(&mut [&mut p], &[&[g]], &["w"]).unwrap();
            assert!(p[0].abs() <= 1e-3 * 1.001, "step {} for g {}", p[0], g);
        }
    }
}
