use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SUM_TOLERANCE: f64 = 1e-12;

/// Finitely supported coefficient sequence `α_i`, `i = offset, offset+1, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub offset: i64,
    pub coeffs: Vec<f64>,
}

impl Filter {
    pub fn new(offset: i64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidFilter("filter has no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFilter("non-finite coefficient".into()));
        }
        Ok(Filter { offset, coeffs })
    }

    /// The delta filter `δ`.
    pub fn delta() -> Self {
        Filter { offset: 0, coeffs: vec![1.0] }
    }

    /// Four-point interpolatory mask `(−1, 0, 9, 16, 9, 0, −1)/16` on `−3..=3`.
    pub fn four_point() -> Self {
        Filter { offset: -3, coeffs: vec![-1.0 / 16.0, 0.0, 9.0 / 16.0, 1.0, 9.0 / 16.0, 0.0, -1.0 / 16.0] }
    }

    /// Haar upscaling mask `α_0 = α_1 = 1`: `(Sc)_{2k} = (Sc)_{2k+1} = c_k`.
    pub fn haar_upscale() -> Self {
        Filter { offset: 0, coeffs: vec![1.0, 1.0] }
    }

    /// Haar decimation mask `β_0 = β_1 = ½`.
    pub fn haar_downscale() -> Self {
        Filter { offset: 0, coeffs: vec![0.5, 0.5] }
    }

    /// Average-interpolating mask `(−1, 1, 8, 8, 1, −1)/8` on `−2..=3`.
    ///
    /// `(Sc)_{2k} = c_k − (c_{k+1} − c_{k−1})/8`,
    /// `(Sc)_{2k+1} = c_k + (c_{k+1} − c_{k−1})/8`.
    pub fn average_interpolating() -> Self {
        Filter { offset: -2, coeffs: vec![-0.125, 0.125, 1.0, 1.0, 0.125, -0.125] }
    }

    /// Coefficient at index `i` (zero outside the support).
    pub fn coeff(&self, i: i64) -> f64 {
        let j = i - self.offset;
        if j < 0 {
            0.0
        } else {
            self.coeffs.get(j as usize).copied().unwrap_or(0.0)
        }
    }

    /// Inclusive index range of the support.
    pub fn support(&self) -> (i64, i64) {
        (self.offset, self.offset + self.coeffs.len() as i64 - 1)
    }

    fn parity_sum(&self, parity: i64) -> f64 {
        let (lo, hi) = self.support();
        (lo..=hi).filter(|i| i.rem_euclid(2) == parity).map(|i| self.coeff(i)).sum()
    }

    /// Even- and odd-indexed coefficients each sum to 1 (constants are reproduced).
    pub fn validate_upscale(&self) -> Result<()> {
        for parity in [0, 1] {
            let sum = self.parity_sum(parity);
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                let name = if parity == 0 { "even" } else { "odd" };
                return Err(Error::InvalidFilter(format!("{name} coefficients sum to {sum}, expected 1")));
            }
        }
        Ok(())
    }

    /// Coefficients sum to 1.
    pub fn validate_downscale(&self) -> Result<()> {
        let sum: f64 = self.coeffs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidFilter(format!("coefficients sum to {sum}, expected 1")));
        }
        Ok(())
    }

    /// Even sub-mask is `δ`, so `(Sc)_{2k} = c_k`.
    pub fn validate_interpolating(&self) -> Result<()> {
        self.validate_upscale()?;
        let (lo, hi) = self.support();
        for i in (lo..=hi).filter(|i| i.rem_euclid(2) == 0) {
            let expected = if i == 0 { 1.0 } else { 0.0 };
            if (self.coeff(i) - expected).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidFilter(format!("mask is not interpolating at index {i}")));
            }
        }
        Ok(())
    }

    /// Mirror image `α_{−i}`.
    pub fn reversed(&self) -> Filter {
        let (_, hi) = self.support();
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Filter { offset: -hi, coeffs }
    }

    /// Drops zero coefficients at both ends.
    pub fn trimmed(&self) -> Filter {
        let first = self.coeffs.iter().position(|&c| c != 0.0);
        let last = self.coeffs.iter().rposition(|&c| c != 0.0);
        match (first, last) {
            (Some(a), Some(b)) => Filter { offset: self.offset + a as i64, coeffs: self.coeffs[a..=b].to_vec() },
            _ => Filter::delta(),
        }
    }
}
