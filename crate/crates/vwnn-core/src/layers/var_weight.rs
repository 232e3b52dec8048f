//! Variable-weight layer.
//!
//! The weight matrix is not stationary: for each input `p` the layer first
//! predicts `W_v[k][j] = f1(sum_m T[k][j][m] * p[m] + B[k][j])` from its
//! stationary rank-3 tensor `T` and prediction bias `B`, then produces
//! `y[j] = f2(sum_k p[k] * W_v[k][j] + c[j])`. The same vector `p` feeds both
//! the prediction path and the data path.
//!
//! The backward pass therefore accumulates two contributions into `dp`: the
//! direct data path through the realized `W_v`, and the prediction path
//! through `f1'` and the tensor.

use super::{check_input_len, ForwardCache, LayerGradients};
use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct VarWeightParams {
    /// Stationary prediction tensor, `n_in x n_out x n_p`, indexed
    /// `[input k][output j][predictor m]`.
    pub weight_tensor: Tensor,
    /// Prediction bias, `n_in x n_out`.
    pub pred_bias: Tensor,
    /// Output bias, `n_out`.
    pub out_bias: Tensor,
    /// Squashing applied to the predicted weights (Tanh or Linear). With
    /// Tanh, every realized weight lies strictly inside (-1, 1).
    pub f1: ActivationKind,
    /// Output activation.
    pub f2: ActivationKind,
}

impl VarWeightParams {
    pub fn new(
        weight_tensor: Tensor,
        pred_bias: Tensor,
        out_bias: Tensor,
        f1: ActivationKind,
    ) -> Result<Self> {
        if weight_tensor.rank() != 3 {
            return Err(Error::dimension(
                "VarWeightParams::new",
                "rank-3 weight tensor",
                format!("{:?}", weight_tensor.shape()),
            ));
        }
        let (n_in, n_out, n_p) = (
            weight_tensor.shape()[0],
            weight_tensor.shape()[1],
            weight_tensor.shape()[2],
        );
        if n_p != n_in {
            return Err(Error::dimension(
                "VarWeightParams::new",
                "predictor extent equal to the input extent",
                format!("n_in={n_in}, n_p={n_p}"),
            ));
        }
        if pred_bias.shape() != [n_in, n_out] || out_bias.shape() != [n_out] {
            return Err(Error::dimension(
                "VarWeightParams::new",
                format!("pred_bias [{n_in}x{n_out}], out_bias [{n_out}]"),
                format!(
                    "pred_bias {:?}, out_bias {:?}",
                    pred_bias.shape(),
                    out_bias.shape()
                ),
            ));
        }
        if !matches!(f1, ActivationKind::Tanh | ActivationKind::Linear) {
            return Err(Error::Argument(format!(
                "f1 must be tanh or linear, got {}",
                f1.name()
            )));
        }
        Ok(VarWeightParams {
            weight_tensor,
            pred_bias,
            out_bias,
            f1,
            f2: ActivationKind::ReLU,
        })
    }

    pub fn n_in(&self) -> usize {
        self.weight_tensor.shape()[0]
    }

    pub fn n_out(&self) -> usize {
        self.weight_tensor.shape()[1]
    }

    pub fn n_p(&self) -> usize {
        self.weight_tensor.shape()[2]
    }

    /// Realizes the per-input weight matrix `W_v` for predictor input `p`.
    pub fn predict_weights(&self, p: &[f64]) -> Result<Tensor> {
        Ok(self.predict_pre(p)?.1)
    }

    /// Returns both the prediction pre-activation and `W_v = f1(pre)`.
    fn predict_pre(&self, p: &[f64]) -> Result<(Tensor, Tensor)> {
        check_input_len("vw_predict_weights", self.n_p(), p.len())?;
        let mut pred_pre = self.weight_tensor.contract3(p)?;
        for (s, b) in pred_pre.data_mut().iter_mut().zip(self.pred_bias.data()) {
            *s += b;
        }
        let predicted = Tensor::new(
            pred_pre.shape(),
            pred_pre.data().iter().map(|&s| self.f1.apply_scalar(s)).collect(),
        )?;
        Ok((pred_pre, predicted))
    }

    pub fn forward(&self, p: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        check_input_len("vw_forward", self.n_in(), p.len())?;
        let (pred_pre, predicted) = self.predict_pre(p)?;
        let mut pre = predicted.matvec_t(p)?;
        for (z, b) in pre.iter_mut().zip(self.out_bias.data()) {
            *z += b;
        }
        let y = self.f2.apply(&pre);
        Ok((
            y,
            ForwardCache::VarWeight {
                input: p.to_vec(),
                pred_pre,
                predicted,
                pre,
            },
        ))
    }

    pub fn backward(&self, cache: &ForwardCache, dy: &[f64]) -> Result<(Vec<f64>, LayerGradients)> {
        let (input, pred_pre, predicted, pre) = match cache {
            ForwardCache::VarWeight {
                input,
                pred_pre,
                predicted,
                pre,
            } => (input, pred_pre, predicted, pre),
            _ => unreachable!("kind checked by LayerParams::backward"),
        };
        let (n_in, n_out, n_p) = (self.n_in(), self.n_out(), self.n_p());
        if input.len() != n_in
            || pre.len() != n_out
            || pred_pre.shape() != [n_in, n_out]
            || predicted.shape() != [n_in, n_out]
        {
            return Err(Error::ContractViolation(
                "var-weight cache does not match params shapes".to_string(),
            ));
        }
        check_input_len("vw_backward", n_out, dy.len())?;

        // dz = dy ⊙ f2'(pre)
        let dz: Vec<f64> = dy
            .iter()
            .zip(pre)
            .map(|(g, &z)| g * self.f2.derivative_scalar(z))
            .collect();

        let d_out_bias = Tensor::from_vec(dz.clone());

        // direct data path: dp_direct[k] = sum_j W_v[k][j] * dz[j]
        let mut dp = predicted.matvec(&dz)?;

        // prediction path: ds[k][j] = p[k] * dz[j] * f1'(pred_pre[k][j])
        let mut d_pred_bias = Tensor::zeros(&[n_in, n_out]);
        let mut d_tensor = Tensor::zeros(&[n_in, n_out, n_p]);
        {
            let ds = d_pred_bias.data_mut();
            for k in 0..n_in {
                let pk = input[k];
                for (j, &g) in dz.iter().enumerate() {
                    ds[k * n_out + j] =
                        pk * g * self.f1.derivative_scalar(pred_pre.at2(k, j));
                }
            }
        }
        {
            let dt = d_tensor.data_mut();
            let t = self.weight_tensor.data();
            let ds = d_pred_bias.data();
            for kj in 0..n_in * n_out {
                let s = ds[kj];
                if s == 0.0 {
                    continue;
                }
                let base = kj * n_p;
                for m in 0..n_p {
                    // dT[k][j][m] = ds[k][j] * p[m]
                    dt[base + m] = s * input[m];
                    // dp_pred[m] += ds[k][j] * T[k][j][m]
                    dp[m] += s * t[base + m];
                }
            }
        }

        Ok((
            dp,
            LayerGradients::from_tensors(vec![d_tensor, d_pred_bias, d_out_bias]),
        ))
    }
}
