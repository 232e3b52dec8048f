//! Variable-bias layer.
//!
//! The cheap dynamic variant: weights stay stationary and only the bias is
//! predicted per input, `b_v[j] = sum_m p[m] * U[m][j] + d[j]` with a linear
//! prediction activation, followed by `y[j] = relu(sum_k p[k] * W[k][j] +
//! b_v[j])`. Parameter cost grows linearly in the input width instead of
//! quadratically.

use super::{check_input_len, ForwardCache, LayerGradients};
use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct VarBiasParams {
    /// Static data-path weights, `n_in x n_out`.
    pub weights: Tensor,
    /// Bias predictor, `n_p x n_out` with `n_p == n_in`.
    pub bias_pred_weights: Tensor,
    /// Bias of the bias predictor, `n_out`.
    pub bias_pred_bias: Tensor,
}

impl VarBiasParams {
    pub fn new(
        weights: Tensor,
        bias_pred_weights: Tensor,
        bias_pred_bias: Tensor,
    ) -> Result<Self> {
        if weights.rank() != 2 {
            return Err(Error::dimension(
                "VarBiasParams::new",
                "rank-2 weights",
                format!("{:?}", weights.shape()),
            ));
        }
        let (n_in, n_out) = (weights.shape()[0], weights.shape()[1]);
        if bias_pred_weights.shape() != [n_in, n_out] || bias_pred_bias.shape() != [n_out] {
            return Err(Error::dimension(
                "VarBiasParams::new",
                format!("bias predictor [{n_in}x{n_out}] with bias [{n_out}]"),
                format!(
                    "{:?} with {:?}",
                    bias_pred_weights.shape(),
                    bias_pred_bias.shape()
                ),
            ));
        }
        Ok(VarBiasParams {
            weights,
            bias_pred_weights,
            bias_pred_bias,
        })
    }

    pub fn n_in(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn n_out(&self) -> usize {
        self.weights.shape()[1]
    }

    /// Output activation; fixed.
    pub fn out_activation(&self) -> ActivationKind {
        ActivationKind::ReLU
    }

    pub fn forward(&self, p: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        check_input_len("vb_forward", self.n_in(), p.len())?;
        // b_v = U^T p + d, with a linear prediction activation
        let mut predicted_bias = self.bias_pred_weights.matvec_t(p)?;
        for (b, d) in predicted_bias.iter_mut().zip(self.bias_pred_bias.data()) {
            *b += d;
        }
        let mut pre = self.weights.matvec_t(p)?;
        for (z, b) in pre.iter_mut().zip(&predicted_bias) {
            *z += b;
        }
        let y = ActivationKind::ReLU.apply(&pre);
        Ok((
            y,
            ForwardCache::VarBias {
                input: p.to_vec(),
                predicted_bias,
                pre,
            },
        ))
    }

    pub fn backward(&self, cache: &ForwardCache, dy: &[f64]) -> Result<(Vec<f64>, LayerGradients)> {
        let (input, predicted_bias, pre) = match cache {
            ForwardCache::VarBias {
                input,
                predicted_bias,
                pre,
            } => (input, predicted_bias, pre),
            _ => unreachable!("kind checked by LayerParams::backward"),
        };
        let (n_in, n_out) = (self.n_in(), self.n_out());
        if input.len() != n_in || pre.len() != n_out || predicted_bias.len() != n_out {
            return Err(Error::ContractViolation(
                "var-bias cache does not match params shapes".to_string(),
            ));
        }
        check_input_len("vb_backward", n_out, dy.len())?;

        let dz: Vec<f64> = dy
            .iter()
            .zip(pre)
            .map(|(g, &z)| g * ActivationKind::ReLU.derivative_scalar(z))
            .collect();

        // b_v enters z additively, and its own prediction is linear in p, so
        // dz flows unchanged into d and scaled by p into U.
        let mut d_weights = Tensor::zeros(&[n_in, n_out]);
        let mut d_pred_weights = Tensor::zeros(&[n_in, n_out]);
        {
            let dw = d_weights.data_mut();
            let du = d_pred_weights.data_mut();
            for (k, &pk) in input.iter().enumerate() {
                for (j, &g) in dz.iter().enumerate() {
                    dw[k * n_out + j] = pk * g;
                    du[k * n_out + j] = pk * g;
                }
            }
        }
        let d_pred_bias = Tensor::from_vec(dz.clone());

        // dp sums the static path and the bias-prediction path
        let mut dp = self.weights.matvec(&dz)?;
        let via_pred = self.bias_pred_weights.matvec(&dz)?;
        for (g, extra) in dp.iter_mut().zip(via_pred) {
            *g += extra;
        }

        Ok((
            dp,
            LayerGradients::from_tensors(vec![d_weights, d_pred_weights, d_pred_bias]),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::DenseParams;
    use crate::rng::RngStream;

    fn random_params(n: usize, rng: &mut RngStream) -> VarBiasParams {
        VarBiasParams::new(
            Tensor::new(&[n, n], rng.uniform(-1.0, 1.0, n * n).unwrap()).unwrap(),
            Tensor::new(&[n, n], rng.uniform(-1.0, 1.0, n * n).unwrap()).unwrap(),
            Tensor::new(&[n], rng.uniform(-0.5, 0.5, n).unwrap()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_predictor_reduces_to_dense_forward_and_backward() {
        let mut rng = RngStream::new(30, "vb-reduction");
        let n = 3;
        let weights = Tensor::new(&[n, n], rng.uniform(-1.0, 1.0, n * n).unwrap()).unwrap();
        let bias = Tensor::new(&[n], rng.uniform(-0.5, 0.5, n).unwrap()).unwrap();
        let vb = VarBiasParams::new(weights.clone(), Tensor::zeros(&[n, n]), bias.clone()).unwrap();
        let dense = DenseParams::new(weights, bias, ActivationKind::ReLU).unwrap();

        let p = [0.4, -0.8, 0.15];
        let dy = [1.0, -0.5, 0.25];
        let (y_vb, cache_vb) = vb.forward(&p).unwrap();
        let (y_d, cache_d) = dense.forward(&p).unwrap();
        for (a, b) in y_vb.iter().zip(&y_d) {
            assert!((a - b).abs() < 1e-12);
        }
        let (dp_vb, grads_vb) = vb.backward(&cache_vb, &dy).unwrap();
        let (dp_d, grads_d) = dense.backward(&cache_d, &dy).unwrap();
        for (a, b) in dp_vb.iter().zip(&dp_d) {
            assert!((a - b).abs() < 1e-12);
        }
        // static-weight gradient and bias gradient line up with dense
        for (a, b) in grads_vb.tensors()[0]
            .data()
            .iter()
            .zip(grads_d.tensors()[0].data())
        {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in grads_vb.tensors()[2]
            .data()
            .iter()
            .zip(grads_d.tensors()[1].data())
        {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_outputs_relu_of_predictor_bias() {
        let mut rng = RngStream::new(31, "vb-zero");
        let mut params = random_params(3, &mut rng);
        params.bias_pred_bias = Tensor::from_vec(vec![0.7, -0.2, 0.0]);
        let (y, cache) = params.forward(&[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(y, vec![0.7, 0.0, 0.0]);
        assert_eq!(cache.predicted_bias().unwrap(), &[0.7, -0.2, 0.0]);
    }

    #[test]
    fn forward_matches_scalar_transcription() {
        let mut rng = RngStream::new(42, "vb-fwd");
        let params = random_params(2, &mut rng);
        let p = [0.9, -0.3];
        let (y, _) = params.forward(&p).unwrap();
        for j in 0..2 {
            let mut bv = params.bias_pred_bias.data()[j];
            for (m, &pm) in p.iter().enumerate() {
                bv += pm * params.bias_pred_weights.at2(m, j);
            }
            let mut z = bv;
            for (k, &pk) in p.iter().enumerate() {
                z += pk * params.weights.at2(k, j);
            }
            let expect = if z > 0.0 { z } else { 0.0 };
            assert!((y[j] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_cotangent_gives_zero_gradients() {
        let mut rng = RngStream::new(33, "vb-dy");
        let params = random_params(2, &mut rng);
        let (_, cache) = params.forward(&[0.5, 0.5]).unwrap();
        let (dp, grads) = params.backward(&cache, &[0.0, 0.0]).unwrap();
        assert!(dp.iter().all(|&g| g == 0.0));
        assert_eq!(grads.max_abs(), 0.0);
    }

    #[test]
    fn mismatched_shapes_rejected_at_construction() {
        let w = Tensor::zeros(&[3, 2]);
        let u = Tensor::zeros(&[2, 2]);
        let d = Tensor::zeros(&[2]);
        assert!(VarBiasParams::new(w, u, d).is_err());
    }
}
