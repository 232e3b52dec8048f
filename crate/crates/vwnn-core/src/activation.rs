//! Elementwise activation functions and their derivatives.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActivationKind {
    ReLU,
    Tanh,
    Linear,
    Sigmoid,
}

impl ActivationKind {
    #[inline]
    pub fn apply_scalar(self, x: f64) -> f64 {
        match self {
            ActivationKind::ReLU => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Linear => x,
            ActivationKind::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative evaluated at the pre-activation `x`. ReLU'(0) is taken as 0.
    #[inline]
    pub fn derivative_scalar(self, x: f64) -> f64 {
        match self {
            ActivationKind::ReLU => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            ActivationKind::Linear => 1.0,
            ActivationKind::Sigmoid => {
                let s = 1.0 / (1.0 + (-x).exp());
                s * (1.0 - s)
            }
        }
    }

    pub fn apply(self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&x| self.apply_scalar(x)).collect()
    }

    pub fn derivative(self, v: &[f64]) -> Vec<f64> {
        v.iter().map(|&x| self.derivative_scalar(x)).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::ReLU => "relu",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Linear => "linear",
            ActivationKind::Sigmoid => "sigmoid",
        }
    }
}
