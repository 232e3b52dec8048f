//! Standard dense layer: `y = act(W^T x + b)`.

use super::{check_input_len, ForwardCache, LayerGradients};
use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    /// `n_in x n_out`, indexed `[input][output]`.
    pub weights: Tensor,
    /// `n_out`.
    pub bias: Tensor,
    pub activation: ActivationKind,
}

impl DenseParams {
    pub fn new(weights: Tensor, bias: Tensor, activation: ActivationKind) -> Result<Self> {
        if weights.rank() != 2 || bias.rank() != 1 || weights.shape()[1] != bias.shape()[0] {
            return Err(Error::dimension(
                "DenseParams::new",
                "weights [n_in x n_out] with bias [n_out]",
                format!("weights {:?}, bias {:?}", weights.shape(), bias.shape()),
            ));
        }
        Ok(DenseParams {
            weights,
            bias,
            activation,
        })
    }

    pub fn n_in(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn n_out(&self) -> usize {
        self.weights.shape()[1]
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        check_input_len("dense_forward", self.n_in(), x.len())?;
        let mut pre = self.weights.matvec_t(x)?;
        for (z, b) in pre.iter_mut().zip(self.bias.data()) {
            *z += b;
        }
        let y = self.activation.apply(&pre);
        Ok((
            y,
            ForwardCache::Dense {
                input: x.to_vec(),
                pre,
            },
        ))
    }

    pub fn backward(&self, cache: &ForwardCache, dy: &[f64]) -> Result<(Vec<f64>, LayerGradients)> {
        let (input, pre) = match cache {
            ForwardCache::Dense { input, pre } => (input, pre),
            _ => unreachable!("kind checked by LayerParams::backward"),
        };
        if input.len() != self.n_in() || pre.len() != self.n_out() {
            return Err(Error::ContractViolation(format!(
                "dense cache shaped {}->{} does not match params {}->{}",
                input.len(),
                pre.len(),
                self.n_in(),
                self.n_out()
            )));
        }
        check_input_len("dense_backward", self.n_out(), dy.len())?;

        // dz = dy ⊙ act'(pre)
        let dz: Vec<f64> = dy
            .iter()
            .zip(pre)
            .map(|(g, &z)| g * self.activation.derivative_scalar(z))
            .collect();

        let mut d_weights = Tensor::zeros(self.weights.shape());
        {
            let n_out = self.n_out();
            let dw = d_weights.data_mut();
            for (k, &xk) in input.iter().enumerate() {
                let row = &mut dw[k * n_out..(k + 1) * n_out];
                for (slot, g) in row.iter_mut().zip(&dz) {
                    *slot = xk * g;
                }
            }
        }
        let d_bias = Tensor::from_vec(dz.clone());
        let dx = self.weights.matvec(&dz)?;
        Ok((
            dx,
            LayerGradients::from_tensors(vec![d_weights, d_bias]),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu_dense(weights: Vec<f64>, n_in: usize, n_out: usize, bias: Vec<f64>) -> DenseParams {
        DenseParams::new(
            Tensor::new(&[n_in, n_out], weights).unwrap(),
            Tensor::from_vec(bias),
            ActivationKind::ReLU,
        )
        .unwrap()
    }

    #[test]
    fn identity_on_nonnegative_input() {
        let layer = relu_dense(vec![1.0, 0.0, 0.0, 1.0], 2, 2, vec![0.0, 0.0]);
        let (y, _) = layer.forward(&[1.0, 2.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn zero_weights_pass_bias_through_relu() {
        let layer = relu_dense(vec![0.0; 4], 2, 2, vec![-1.0, 3.0]);
        let (y, _) = layer.forward(&[5.0, -9.0]).unwrap();
        assert_eq!(y, vec![0.0, 3.0]);
    }

    #[test]
    fn hand_computed_forward() {
        // weights [[1,0],[1,1]], bias (0.5, -5), x = (1,1) -> (2.5, 0)
        let layer = relu_dense(vec![1.0, 0.0, 1.0, 1.0], 2, 2, vec![0.5, -5.0]);
        let (y, _) = layer.forward(&[1.0, 1.0]).unwrap();
        assert_eq!(y, vec![2.5, 0.0]);
    }

    #[test]
    fn forward_rejects_wrong_input_len() {
        let layer = relu_dense(vec![0.0; 4], 2, 2, vec![0.0, 0.0]);
        assert!(matches!(
            layer.forward(&[1.0]).unwrap_err(),
            Error::Dimension { .. }
        ));
    }

    #[test]
    fn zero_cotangent_gives_zero_gradients() {
        let layer = relu_dense(vec![0.3, -0.2, 0.4, 0.9], 2, 2, vec![0.1, 0.2]);
        let (_, cache) = layer.forward(&[0.5, -0.7]).unwrap();
        let (dx, grads) = layer.backward(&cache, &[0.0, 0.0]).unwrap();
        assert!(dx.iter().all(|&g| g == 0.0));
        assert_eq!(grads.max_abs(), 0.0);
    }

    #[test]
    fn linear_activation_weight_gradient_is_outer_product() {
        let layer = DenseParams::new(
            Tensor::new(&[2, 3], vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap(),
            Tensor::zeros(&[3]),
            ActivationKind::Linear,
        )
        .unwrap();
        let x = [1.5, -2.0];
        let dy = [0.3, -0.1, 0.7];
        let (_, cache) = layer.forward(&x).unwrap();
        let (_, grads) = layer.backward(&cache, &dy).unwrap();
        let dw = &grads.tensors()[0];
        for (k, &xk) in x.iter().enumerate() {
            for (j, &g) in dy.iter().enumerate() {
                assert!((dw.at2(k, j) - xk * g).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stale_cache_is_rejected() {
        let small = relu_dense(vec![0.0; 4], 2, 2, vec![0.0, 0.0]);
        let big = relu_dense(vec![0.0; 9], 3, 3, vec![0.0; 3]);
        let (_, cache) = big.forward(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            small.backward(&cache, &[1.0, 1.0]).unwrap_err(),
            Error::ContractViolation(_)
        ));
    }
}
