use serde::{Deserialize, Serialize};

/// First-order update rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Adam { beta1: f64, beta2: f64, eps: f64 },
    GradientDescent,
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Running optimizer state for a flat parameter vector.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    rule: Optimizer,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl OptimizerState {
    pub fn new(rule: Optimizer, n_params: usize) -> Self {
        Self {
            rule,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], learning_rate: f64) {
        debug_assert_eq!(params.len(), grad.len());
        match self.rule {
            Optimizer::GradientDescent => {
                params
                    .iter_mut()
                    .zip(grad)
                    .for_each(|(p, g)| *p -= learning_rate * g);
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                self.t += 1;
                let c1 = 1.0 - beta1.powi(self.t);
                let c2 = 1.0 - beta2.powi(self.t);
                for i in 0..params.len() {
                    let g = grad[i];
                    self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
                    self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
                    let m_hat = self.m[i] / c1;
                    let v_hat = self.v[i] / c2;
                    params[i] -= learning_rate * m_hat / (v_hat.sqrt() + eps);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adam_first_step_is_learning_rate_sized() {
        let mut st = OptimizerState::new(Optimizer::default(), 2);
        let mut p = vec![1.0, -1.0];
        st.step(&mut p, &[0.3, -2.0], 0.1);
        assert!((p[0] - 0.9).abs() < 1e-6);
        assert!((p[1] + 0.9).abs() < 1e-6);
    }

    #[test]
    fn gradient_descent_minimizes_quadratic() {
        let mut st = OptimizerState::new(Optimizer::GradientDescent, 1);
        let mut p = vec![4.0];
        for _ in 0..200 {
            let g = [2.0 * p[0]];
            st.step(&mut p, &g, 0.1);
        }
        assert!(p[0].abs() < 1e-10);
    }
}
