//! Time-series container and tail slicing.
//!
//! Everything downstream is index based. An optional origin/step pair can be
//! carried along for reporting but never enters a computation.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Informational sampling grid of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub origin: f64,
    pub step: f64,
}

/// An ordered, non-empty sequence of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    timing: Option<Timing>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("series"));
        }
        ensure_finite(&values, "series")?;
        Ok(Self {
            values,
            timing: None,
        })
    }

    pub fn with_timing(mut self, timing: Timing) -> Self {
        self.timing = Some(timing);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn timing(&self) -> Option<Timing> {
        self.timing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The first `len` observations as a new series.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.values.len() {
            return Err(Error::Sizing {
                required: len.max(1),
                actual: self.values.len(),
            });
        }
        Ok(Self {
            values: self.values[..len].to_vec(),
            timing: self.timing,
        })
    }
}

/// One of the `n` equal-length windows cut from the end of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    /// 1 = oldest, n = newest.
    pub index: usize,
    pub values: Vec<f64>,
    /// Observation right after the slice, if known.
    pub next_actual: Option<f64>,
}

impl Slice {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Cuts the last `count * len` observations into `count` contiguous slices,
/// ordered oldest to newest.
///
/// Slice `j < count` gets the first value of slice `j + 1` as its next
/// actual; the newest slice gets `held_out` (the value following the series,
/// when the caller knows it).
pub fn partition_slices(
    series: &TimeSeries,
    len: usize,
    count: usize,
    held_out: Option<f64>,
) -> Result<Vec<Slice>> {
    if len == 0 {
        return Err(crate::error::invalid("slice_len", "must be positive"));
    }
    if count == 0 {
        return Err(crate::error::invalid("slice_count", "must be positive"));
    }
    let required = len
        .checked_mul(count)
        .ok_or_else(|| crate::error::invalid("slice_count", "slice_len * slice_count overflows"))?;
    let values = series.values();
    if values.len() < required {
        return Err(Error::Sizing {
            required,
            actual: values.len(),
        });
    }
    let start = values.len() - required;
    let slices = (0..count)
        .map(|j| {
            let lo = start + j * len;
            let hi = lo + len;
            let next_actual = if j + 1 < count {
                Some(values[hi])
            } else {
                held_out
            };
            Slice {
                index: j + 1,
                values: values[lo..hi].to_vec(),
                next_actual,
            }
        })
        .collect();
    Ok(slices)
}
