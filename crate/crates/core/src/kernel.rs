//! RBF kernel and Gram-matrix access for the rank solver.

use crate::data::{squared_distance, Dataset};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Past this size the full Gram matrix is not materialized; kernel rows are
/// recomputed on demand instead.
const GRAM_CACHE_LIMIT: usize = 4000;

/// RBF kernel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub sigma: f64,
}

impl KernelConfig {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param("sigma", "must be positive and finite"));
        }
        Ok(KernelConfig { sigma })
    }
}

/// k(x, y) = exp(-||x - y||^2 / sigma^2).
pub fn rbf_kernel(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    KernelConfig::new(sigma)?;
    Ok(rbf_unchecked(x, y, 1.0 / (sigma * sigma)))
}

#[inline]
pub(crate) fn rbf_unchecked(x: &[f64], y: &[f64], inv_sigma_sq: f64) -> f64 {
    (-squared_distance(x, y) * inv_sigma_sq).exp()
}

/// Point-kernel Gram matrix over a training set.
///
/// Fully cached for n <= 4000; larger sets recompute entries from the point
/// coordinates on every access.
pub struct Gram<'a> {
    data: &'a Dataset,
    inv_sigma_sq: f64,
    cache: Option<Vec<f64>>,
}

impl<'a> Gram<'a> {
    pub fn new(data: &'a Dataset, kernel: KernelConfig) -> Self {
        let n = data.n();
        let inv_sigma_sq = 1.0 / (kernel.sigma * kernel.sigma);
        let cache = (n <= GRAM_CACHE_LIMIT).then(|| {
            let mut m = vec![0.0f64; n * n];
            for i in 0..n {
                m[i * n + i] = 1.0;
                for j in 0..i {
                    let v = rbf_unchecked(data.point(i), data.point(j), inv_sigma_sq);
                    m[i * n + j] = v;
                    m[j * n + i] = v;
                }
            }
            m
        });
        Gram {
            data,
            inv_sigma_sq,
            cache,
        }
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        match &self.cache {
            Some(m) => m[i * self.data.n() + j],
            None => rbf_unchecked(self.data.point(i), self.data.point(j), self.inv_sigma_sq),
        }
    }

    /// out[t] += scale * (k(x_i, x_t) - k(x_j, x_t)) for every t.
    pub fn accumulate_row_diff(&self, i: usize, j: usize, scale: f64, out: &mut [f64]) {
        let n = self.data.n();
        debug_assert_eq!(out.len(), n);
        match &self.cache {
            Some(m) => {
                let ri = &m[i * n..(i + 1) * n];
                let rj = &m[j * n..(j + 1) * n];
                for t in 0..n {
                    out[t] += scale * (ri[t] - rj[t]);
                }
            }
            None => {
                let xi = self.data.point(i);
                let xj = self.data.point(j);
                for t in 0..n {
                    let xt = self.data.point(t);
                    out[t] += scale
                        * (rbf_unchecked(xi, xt, self.inv_sigma_sq)
                            - rbf_unchecked(xj, xt, self.inv_sigma_sq));
                }
            }
        }
    }
}
