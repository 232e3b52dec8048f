//! Dense row-major tensors of `f64`, rank 1 to 3.
//!
//! This is deliberately minimal: the whole problem fits in a 500x16 matrix,
//! so there is no striding, broadcasting, or BLAS. Shapes are explicit and
//! every operation validates conformance up front.

use crate::error::{Error, Result};

/// A dense 1-D/2-D/3-D array of `f64` with row-major flat storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn shape_str(shape: &[usize]) -> String {
    let dims: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
    format!("[{}]", dims.join("x"))
}

impl Tensor {
    /// Builds a tensor from an explicit shape and flat row-major data.
    pub fn new(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::Argument(format!(
                "tensor rank must be 1..=3, got {}",
                shape.len()
            )));
        }
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::Argument(format!(
                "tensor extents must be positive, got {}",
                shape_str(shape)
            )));
        }
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(Error::dimension(
                "Tensor::new",
                format!("{} elements for shape {}", expected, shape_str(shape)),
                format!("{} elements", data.len()),
            ));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let len: usize = shape.iter().product();
        Tensor::new(shape, vec![0.0; len]).expect("zeros: shape validated by product")
    }

    pub fn from_vec(data: Vec<f64>) -> Self {
        let n = data.len();
        Tensor::new(&[n], data).expect("from_vec: shape matches data by construction")
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    #[inline]
    pub fn at2(&self, i: usize, j: usize) -> f64 {
        debug_assert_eq!(self.rank(), 2);
        self.data[i * self.shape[1] + j]
    }

    #[inline]
    pub fn at3(&self, i: usize, j: usize, k: usize) -> f64 {
        debug_assert_eq!(self.rank(), 3);
        self.data[(i * self.shape[1] + j) * self.shape[2] + k]
    }

    fn expect_rank(&self, op: &'static str, rank: usize) -> Result<()> {
        if self.rank() != rank {
            return Err(Error::dimension(
                op,
                format!("rank-{} tensor", rank),
                shape_str(&self.shape),
            ));
        }
        Ok(())
    }

    /// Matrix-vector product: `out[i] = sum_j self[i][j] * v[j]`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.expect_rank("matvec", 2)?;
        let (rows, cols) = (self.shape[0], self.shape[1]);
        if v.len() != cols {
            return Err(Error::dimension(
                "matvec",
                format!("vector of length {} for matrix {}", cols, shape_str(&self.shape)),
                format!("vector of length {}", v.len()),
            ));
        }
        let mut out = vec![0.0; rows];
        for i in 0..rows {
            let row = &self.data[i * cols..(i + 1) * cols];
            let mut acc = 0.0;
            for (m, x) in row.iter().zip(v) {
                acc += m * x;
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Transposed matrix-vector product: `out[j] = sum_i self[i][j] * v[i]`.
    ///
    /// Dense layers store weights as `n_in x n_out`, so the data path is a
    /// product against the transpose.
    pub fn matvec_t(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.expect_rank("matvec_t", 2)?;
        let (rows, cols) = (self.shape[0], self.shape[1]);
        if v.len() != rows {
            return Err(Error::dimension(
                "matvec_t",
                format!("vector of length {} for matrix {}", rows, shape_str(&self.shape)),
                format!("vector of length {}", v.len()),
            ));
        }
        let mut out = vec![0.0; cols];
        for i in 0..rows {
            let row = &self.data[i * cols..(i + 1) * cols];
            let vi = v[i];
            for (o, m) in out.iter_mut().zip(row) {
                *o += m * vi;
            }
        }
        Ok(out)
    }

    /// Contracts the last axis of a rank-3 tensor with a vector:
    /// `out[a][b] = sum_m self[a][b][m] * p[m]`.
    pub fn contract3(&self, p: &[f64]) -> Result<Tensor> {
        self.expect_rank("contract3", 3)?;
        let (a, b, c) = (self.shape[0], self.shape[1], self.shape[2]);
        if p.len() != c {
            return Err(Error::dimension(
                "contract3",
                format!("vector of length {} for tensor {}", c, shape_str(&self.shape)),
                format!("vector of length {}", p.len()),
            ));
        }
        let mut out = vec![0.0; a * b];
        for (slot, chunk) in out.iter_mut().zip(self.data.chunks_exact(c)) {
            let mut acc = 0.0;
            for (t, x) in chunk.iter().zip(p) {
                acc += t * x;
            }
            *slot = acc;
        }
        Tensor::new(&[a, b], out)
    }
}
