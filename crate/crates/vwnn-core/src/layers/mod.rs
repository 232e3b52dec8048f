//! Layer types: standard dense, variable-weight, and variable-bias.
//!
//! A dense layer applies stationary weights. The variable-weight layer first
//! predicts its weight matrix from its own input through a stationary rank-3
//! tensor (squashed by `f1`, Tanh by default, which also keeps every predicted
//! weight inside (-1, 1)), then applies the predicted matrix to that same
//! input. The variable-bias layer is the cheap variant: static weights, with
//! only the bias vector predicted per input through a linear map.
//!
//! All backward passes are exact gradients of the scalar `<dy, y>`
//! composition and are validated against central finite differences in the
//! test suite.

mod dense;
mod var_bias;
mod var_weight;

pub use dense::DenseParams;
pub use var_bias::VarBiasParams;
pub use var_weight::VarWeightParams;

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};

/// Description of one layer: enough to materialize, count, and serialize
/// parameters. The predictor input of the dynamic layers is the layer's own
/// input, so `n_p == n_in` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayerSpec {
    Dense {
        n_in: usize,
        n_out: usize,
        activation: ActivationKind,
    },
    VarWeight {
        n_in: usize,
        n_out: usize,
        /// Squashing for the predicted weights; Tanh or Linear.
        f1: ActivationKind,
    },
    VarBias {
        n_in: usize,
        n_out: usize,
    },
}

impl LayerSpec {
    pub fn n_in(&self) -> usize {
        match *self {
            LayerSpec::Dense { n_in, .. }
            | LayerSpec::VarWeight { n_in, .. }
            | LayerSpec::VarBias { n_in, .. } => n_in,
        }
    }

    pub fn n_out(&self) -> usize {
        match *self {
            LayerSpec::Dense { n_out, .. }
            | LayerSpec::VarWeight { n_out, .. }
            | LayerSpec::VarBias { n_out, .. } => n_out,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::VarWeight { .. } => "var-weight",
            LayerSpec::VarBias { .. } => "var-bias",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_in() == 0 || self.n_out() == 0 {
            return Err(Error::Argument(format!(
                "{} layer extents must be positive, got {}->{}",
                self.kind_name(),
                self.n_in(),
                self.n_out()
            )));
        }
        if let LayerSpec::VarWeight { f1, .. } = self {
            if !matches!(f1, ActivationKind::Tanh | ActivationKind::Linear) {
                return Err(Error::Argument(format!(
                    "var-weight f1 must be tanh or linear, got {}",
                    f1.name()
                )));
            }
        }
        Ok(())
    }

    /// Number of trainable scalars this layer materializes.
    pub fn param_count(&self) -> usize {
        match *self {
            LayerSpec::Dense { n_in, n_out, .. } => n_in * n_out + n_out,
            // rank-3 predictor tensor + prediction bias matrix + output bias
            LayerSpec::VarWeight { n_in, n_out, .. } => {
                let n_p = n_in;
                n_in * n_out * n_p + n_in * n_out + n_out
            }
            // static weights + bias predictor matrix + predictor bias
            LayerSpec::VarBias { n_in, n_out } => {
                let n_p = n_in;
                n_in * n_out + n_p * n_out + n_out
            }
        }
    }

    /// Materializes parameters. Weight-like fields draw Glorot-style uniform
    /// values from `rng`; bias-like fields start at zero. The rank-3 tensor
    /// gets an extra 0.1 factor so the initial predictions sit in Tanh's
    /// near-linear region.
    pub fn init(&self, rng: &mut RngStream) -> Result<LayerParams> {
        self.validate()?;
        let (n_in, n_out) = (self.n_in(), self.n_out());
        match *self {
            LayerSpec::Dense { activation, .. } => {
                let bound = (6.0 / (n_in + n_out) as f64).sqrt();
                let weights =
                    Tensor::new(&[n_in, n_out], rng.uniform(-bound, bound, n_in * n_out)?)?;
                Ok(LayerParams::Dense(DenseParams::new(
                    weights,
                    Tensor::zeros(&[n_out]),
                    activation,
                )?))
            }
            LayerSpec::VarWeight { f1, .. } => {
                let n_p = n_in;
                let bound = (6.0 / (n_p + n_in * n_out) as f64).sqrt();
                let mut raw = rng.uniform(-bound, bound, n_in * n_out * n_p)?;
                for w in &mut raw {
                    *w *= 0.1;
                }
                Ok(LayerParams::VarWeight(VarWeightParams::new(
                    Tensor::new(&[n_in, n_out, n_p], raw)?,
                    Tensor::zeros(&[n_in, n_out]),
                    Tensor::zeros(&[n_out]),
                    f1,
                )?))
            }
            LayerSpec::VarBias { .. } => {
                let n_p = n_in;
                let w_bound = (6.0 / (n_in + n_out) as f64).sqrt();
                let weights =
                    Tensor::new(&[n_in, n_out], rng.uniform(-w_bound, w_bound, n_in * n_out)?)?;
                let u_bound = (6.0 / (n_p + n_out) as f64).sqrt();
                let bias_pred_weights =
                    Tensor::new(&[n_p, n_out], rng.uniform(-u_bound, u_bound, n_p * n_out)?)?;
                Ok(LayerParams::VarBias(VarBiasParams::new(
                    weights,
                    bias_pred_weights,
                    Tensor::zeros(&[n_out]),
                )?))
            }
        }
    }
}

/// Materialized stationary parameters of one layer.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerParams {
    Dense(DenseParams),
    VarWeight(VarWeightParams),
    VarBias(VarBiasParams),
}

impl LayerParams {
    pub fn spec(&self) -> LayerSpec {
        match self {
            LayerParams::Dense(p) => LayerSpec::Dense {
                n_in: p.n_in(),
                n_out: p.n_out(),
                activation: p.activation,
            },
            LayerParams::VarWeight(p) => LayerSpec::VarWeight {
                n_in: p.n_in(),
                n_out: p.n_out(),
                f1: p.f1,
            },
            LayerParams::VarBias(p) => LayerSpec::VarBias {
                n_in: p.n_in(),
                n_out: p.n_out(),
            },
        }
    }

    pub fn n_in(&self) -> usize {
        self.spec().n_in()
    }

    pub fn n_out(&self) -> usize {
        self.spec().n_out()
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Parameter tensors in their fixed serialization order.
    pub fn tensors(&self) -> Vec<&Tensor> {
        match self {
            LayerParams::Dense(p) => vec![&p.weights, &p.bias],
            LayerParams::VarWeight(p) => vec![&p.weight_tensor, &p.pred_bias, &p.out_bias],
            LayerParams::VarBias(p) => {
                vec![&p.weights, &p.bias_pred_weights, &p.bias_pred_bias]
            }
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            LayerParams::Dense(p) => vec![&mut p.weights, &mut p.bias],
            LayerParams::VarWeight(p) => {
                vec![&mut p.weight_tensor, &mut p.pred_bias, &mut p.out_bias]
            }
            LayerParams::VarBias(p) => vec![
                &mut p.weights,
                &mut p.bias_pred_weights,
                &mut p.bias_pred_bias,
            ],
        }
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        match self {
            LayerParams::Dense(p) => p.forward(input),
            LayerParams::VarWeight(p) => p.forward(input),
            LayerParams::VarBias(p) => p.forward(input),
        }
    }

    /// Backpropagates `dy` through the layer, returning the gradient with
    /// respect to the input and to every parameter.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        dy: &[f64],
    ) -> Result<(Vec<f64>, LayerGradients)> {
        match (self, cache) {
            (LayerParams::Dense(p), ForwardCache::Dense { .. }) => p.backward(cache, dy),
            (LayerParams::VarWeight(p), ForwardCache::VarWeight { .. }) => p.backward(cache, dy),
            (LayerParams::VarBias(p), ForwardCache::VarBias { .. }) => p.backward(cache, dy),
            _ => Err(Error::ContractViolation(format!(
                "cache kind does not match {} layer",
                self.spec().kind_name()
            ))),
        }
    }

    pub fn gradients_zeros(&self) -> LayerGradients {
        LayerGradients {
            tensors: self
                .tensors()
                .iter()
                .map(|t| Tensor::zeros(t.shape()))
                .collect(),
        }
    }
}

/// Per-sample forward state retained for the backward pass.
#[derive(Debug, Clone)]
pub enum ForwardCache {
    Dense {
        input: Vec<f64>,
        /// Pre-activation `z`.
        pre: Vec<f64>,
    },
    VarWeight {
        input: Vec<f64>,
        /// Pre-activation of the weight prediction (before `f1`).
        pred_pre: Tensor,
        /// The realized per-input weight matrix `W_v`.
        predicted: Tensor,
        pre: Vec<f64>,
    },
    VarBias {
        input: Vec<f64>,
        /// The realized per-input bias `b_v`.
        predicted_bias: Vec<f64>,
        pre: Vec<f64>,
    },
}

impl ForwardCache {
    /// The per-input weight matrix a variable-weight cache carries.
    pub fn predicted_weights(&self) -> Option<&Tensor> {
        match self {
            ForwardCache::VarWeight { predicted, .. } => Some(predicted),
            _ => None,
        }
    }

    pub fn predicted_bias(&self) -> Option<&[f64]> {
        match self {
            ForwardCache::VarBias { predicted_bias, .. } => Some(predicted_bias),
            _ => None,
        }
    }
}

/// Gradients for one layer; tensor list is shape-identical to the
/// corresponding `LayerParams::tensors()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradients {
    tensors: Vec<Tensor>,
}

impl LayerGradients {
    pub(crate) fn from_tensors(tensors: Vec<Tensor>) -> Self {
        LayerGradients { tensors }
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn add_assign(&mut self, other: &LayerGradients) {
        debug_assert_eq!(self.tensors.len(), other.tensors.len());
        for (a, b) in self.tensors.iter_mut().zip(&other.tensors) {
            for (x, y) in a.data_mut().iter_mut().zip(b.data()) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for t in &mut self.tensors {
            for x in t.data_mut() {
                *x *= factor;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.tensors
            .iter()
            .flat_map(|t| t.data())
            .fold(0.0_f64, |m, &x| m.max(x.abs()))
    }
}

pub(crate) fn check_input_len(op: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::dimension(
            op,
            format!("input of length {expected}"),
            format!("length {got}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_count_closed_forms() {
        let dense = LayerSpec::Dense {
            n_in: 16,
            n_out: 16,
            activation: ActivationKind::ReLU,
        };
        assert_eq!(dense.param_count(), 272);

        let vw = LayerSpec::VarWeight {
            n_in: 16,
            n_out: 16,
            f1: ActivationKind::Tanh,
        };
        assert_eq!(vw.param_count(), 4368);

        let vb = LayerSpec::VarBias { n_in: 8, n_out: 8 };
        assert_eq!(vb.param_count(), 136);
    }

    #[test]
    fn param_count_matches_materialized_scalars() {
        let mut rng = RngStream::new(11, "count");
        for spec in [
            LayerSpec::Dense {
                n_in: 3,
                n_out: 5,
                activation: ActivationKind::Tanh,
            },
            LayerSpec::VarWeight {
                n_in: 4,
                n_out: 2,
                f1: ActivationKind::Tanh,
            },
            LayerSpec::VarBias { n_in: 5, n_out: 3 },
        ] {
            let params = spec.init(&mut rng).unwrap();
            assert_eq!(params.param_count(), spec.param_count());
        }
    }

    #[test]
    fn init_is_deterministic_per_stream() {
        let spec = LayerSpec::VarWeight {
            n_in: 4,
            n_out: 3,
            f1: ActivationKind::Tanh,
        };
        let a = spec.init(&mut RngStream::new(5, "layer-0")).unwrap();
        let b = spec.init(&mut RngStream::new(5, "layer-0")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_zeroes_every_bias_field() {
        let mut rng = RngStream::new(2, "bias");
        let dense = LayerSpec::Dense {
            n_in: 4,
            n_out: 4,
            activation: ActivationKind::ReLU,
        }
        .init(&mut rng)
        .unwrap();
        if let LayerParams::Dense(p) = &dense {
            assert!(p.bias.data().iter().all(|&x| x == 0.0));
        }
        let vw = LayerSpec::VarWeight {
            n_in: 4,
            n_out: 4,
            f1: ActivationKind::Tanh,
        }
        .init(&mut rng)
        .unwrap();
        if let LayerParams::VarWeight(p) = &vw {
            assert!(p.pred_bias.data().iter().all(|&x| x == 0.0));
            assert!(p.out_bias.data().iter().all(|&x| x == 0.0));
        }
        let vb = LayerSpec::VarBias { n_in: 4, n_out: 4 }
            .init(&mut rng)
            .unwrap();
        if let LayerParams::VarBias(p) = &vb {
            assert!(p.bias_pred_bias.data().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn dense_init_respects_glorot_bound() {
        let mut rng = RngStream::new(3, "glorot");
        let params = LayerSpec::Dense {
            n_in: 16,
            n_out: 16,
            activation: ActivationKind::ReLU,
        }
        .init(&mut rng)
        .unwrap();
        let bound = (6.0 / 32.0_f64).sqrt();
        if let LayerParams::Dense(p) = &params {
            assert!(p.weights.data().iter().all(|w| w.abs() < bound));
        }
    }

    #[test]
    fn mismatched_cache_kind_is_a_contract_violation() {
        let mut rng = RngStream::new(1, "x");
        let dense = LayerSpec::Dense {
            n_in: 2,
            n_out: 2,
            activation: ActivationKind::ReLU,
        }
        .init(&mut rng)
        .unwrap();
        let vb = LayerSpec::VarBias { n_in: 2, n_out: 2 }
            .init(&mut rng)
            .unwrap();
        let (_, vb_cache) = vb.forward(&[0.1, 0.2]).unwrap();
        let err = dense.backward(&vb_cache, &[1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn zero_extent_spec_is_rejected() {
        let spec = LayerSpec::Dense {
            n_in: 0,
            n_out: 2,
            activation: ActivationKind::ReLU,
        };
        assert!(spec.init(&mut RngStream::new(0, "z")).is_err());
    }
}
