//! Networks: ordered layer stacks with a sigmoid probability head.
//!
//! Three presets are built in. `nn` is a plain two-hidden-layer baseline;
//! `vw` swaps the second hidden layer for a variable-weight layer; `vb` is
//! the parameter-lean variant, a narrower stack around a variable-bias layer
//! that comes in at roughly half the baseline's parameter count.

pub mod gradcheck;
pub mod io;
pub mod train;

pub use gradcheck::gradcheck;
pub use train::{train, TrainConfig, TrainHistory};

use crate::activation::ActivationKind;
use crate::error::{Error, Result};
use crate::layers::{ForwardCache, LayerGradients, LayerParams, LayerSpec};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};

/// Input width of the questionnaire presets.
pub const INPUT_DIM: usize = 16;

/// Names accepted by [`NetworkSpec::preset`].
pub const PRESET_NAMES: [&str; 3] = ["nn", "vw", "vb"];

/// Binary decision; the threshold is 0.5 with ties resolved to Positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn from_probability(p: f64) -> Label {
        if p >= 0.5 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            Label::Positive => 1,
            Label::Negative => 0,
        }
    }

    pub fn from_bit(bit: u8) -> Label {
        if bit == 1 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Positive => "Positive",
            Label::Negative => "Negative",
        }
    }
}

/// Ordered layer descriptions plus the fixed input width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub name: String,
    pub input_dim: usize,
    pub layers: Vec<LayerSpec>,
}

impl NetworkSpec {
    /// Validates dimension chaining and the sigmoid scalar head.
    pub fn new(name: &str, input_dim: usize, layers: Vec<LayerSpec>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Argument("network needs at least one layer".into()));
        }
        let mut expected_in = input_dim;
        for layer in &layers {
            layer.validate()?;
            if layer.n_in() != expected_in {
                return Err(Error::dimension(
                    "NetworkSpec::new",
                    format!("layer input {expected_in}"),
                    format!("{}", layer.n_in()),
                ));
            }
            expected_in = layer.n_out();
        }
        match layers.last() {
            Some(LayerSpec::Dense {
                n_out: 1,
                activation: ActivationKind::Sigmoid,
                ..
            }) => {}
            _ => {
                return Err(Error::Argument(
                    "final layer must be a dense sigmoid head with one output".into(),
                ))
            }
        }
        Ok(NetworkSpec {
            name: name.to_string(),
            input_dim,
            layers,
        })
    }

    /// The three benchmark architectures.
    pub fn preset(name: &str) -> Result<NetworkSpec> {
        let layers = match name {
            "nn" => vec![
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 16,
                    activation: ActivationKind::ReLU,
                },
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 16,
                    activation: ActivationKind::ReLU,
                },
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 1,
                    activation: ActivationKind::Sigmoid,
                },
            ],
            "vw" => vec![
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 16,
                    activation: ActivationKind::ReLU,
                },
                LayerSpec::VarWeight {
                    n_in: 16,
                    n_out: 16,
                    f1: ActivationKind::Tanh,
                },
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 1,
                    activation: ActivationKind::Sigmoid,
                },
            ],
            "vb" => vec![
                LayerSpec::Dense {
                    n_in: 16,
                    n_out: 8,
                    activation: ActivationKind::ReLU,
                },
                LayerSpec::VarBias { n_in: 8, n_out: 8 },
                LayerSpec::Dense {
                    n_in: 8,
                    n_out: 1,
                    activation: ActivationKind::Sigmoid,
                },
            ],
            other => {
                return Err(Error::Argument(format!(
                    "unknown architecture '{other}'; valid names: {}",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        NetworkSpec::new(name, INPUT_DIM, layers)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerSpec::param_count).sum()
    }

    /// Materializes a network; each layer draws from its own labeled stream,
    /// so inits do not depend on layer evaluation order.
    pub fn init(&self, seed: u64) -> Result<Network> {
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, spec)| spec.init(&mut RngStream::new(seed, &format!("init-layer-{i}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Network {
            spec: self.clone(),
            layers,
        })
    }
}

/// A spec plus materialized parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub spec: NetworkSpec,
    pub layers: Vec<LayerParams>,
}

impl Network {
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(LayerParams::param_count).sum()
    }

    /// Probability of the positive class.
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward_cached(x)?.0)
    }

    /// Forward pass retaining per-layer caches for backpropagation.
    pub fn forward_cached(&self, x: &[f64]) -> Result<(f64, Vec<ForwardCache>)> {
        if x.len() != self.spec.input_dim {
            return Err(Error::dimension(
                "Network::forward",
                format!("input of length {}", self.spec.input_dim),
                format!("length {}", x.len()),
            ));
        }
        let mut caches = Vec::with_capacity(self.layers.len());
        let mut activ = x.to_vec();
        for layer in &self.layers {
            let (next, cache) = layer.forward(&activ)?;
            caches.push(cache);
            activ = next;
        }
        debug_assert_eq!(activ.len(), 1);
        Ok((activ[0], caches))
    }

    /// Backpropagates the scalar cotangent `d_loss_d_p` through every layer.
    /// Returns the input gradient and per-layer parameter gradients (in layer
    /// order).
    pub fn backward(
        &self,
        caches: &[ForwardCache],
        d_loss_d_p: f64,
    ) -> Result<(Vec<f64>, Vec<LayerGradients>)> {
        if caches.len() != self.layers.len() {
            return Err(Error::ContractViolation(format!(
                "{} caches for {} layers",
                caches.len(),
                self.layers.len()
            )));
        }
        let mut dy = vec![d_loss_d_p];
        let mut grads_rev = Vec::with_capacity(self.layers.len());
        for (layer, cache) in self.layers.iter().zip(caches).rev() {
            let (dx, grads) = layer.backward(cache, &dy)?;
            grads_rev.push(grads);
            dy = dx;
        }
        grads_rev.reverse();
        Ok((dy, grads_rev))
    }

    pub fn predict(&self, x: &[f64]) -> Result<(Label, f64)> {
        let p = self.forward(x)?;
        Ok((Label::from_probability(p), p))
    }
}

/// Probability floor/ceiling applied before the logs in the loss.
pub const PROB_CLAMP: f64 = 1e-12;

/// Binary cross-entropy of a predicted probability against a 0/1 target.
/// Returns `(loss, d_loss/d_p)`, both evaluated at the clamped probability.
pub fn bce_loss(p: f64, y: f64) -> (f64, f64) {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let loss = -(y * p.ln() + (1.0 - y) * (1.0 - p).ln());
    let grad = -y / p + (1.0 - y) / (1.0 - p);
    (loss, grad)
}
