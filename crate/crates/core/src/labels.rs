//! Label spaces and zero-padded (transformed) labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InputError;

/// Labels `0..size`, with `lambda = ceil(log2 size)` bits per label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct LabelSpace {
    size: u64,
    lambda: usize,
}

impl LabelSpace {
    pub fn new(size: u64) -> Result<Self, InputError> {
        if size < 2 {
            return Err(InputError::LabelSpaceTooSmall(size));
        }
        // ceil(log2 size) == bit length of size - 1
        let lambda = (u64::BITS - (size - 1).leading_zeros()) as usize;
        Ok(LabelSpace { size, lambda })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn check(&self, label: u64) -> Result<(), InputError> {
        if label >= self.size {
            return Err(InputError::LabelOutOfRange {
                label,
                size: self.size,
            });
        }
        Ok(())
    }

    pub fn transform(&self, label: u64) -> Result<TransformedLabel, InputError> {
        transform(label, *self)
    }
}

impl TryFrom<u64> for LabelSpace {
    type Error = InputError;
    fn try_from(size: u64) -> Result<Self, Self::Error> {
        LabelSpace::new(size)
    }
}

impl From<LabelSpace> for u64 {
    fn from(space: LabelSpace) -> u64 {
        space.size
    }
}

/// Binary representation of a label left-padded with zeroes to `lambda`
/// bits. Bit 1 is the most significant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransformedLabel {
    bits: Vec<bool>,
}

impl TransformedLabel {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Bit `c_i` for `1 <= i <= lambda`.
    pub fn bit(&self, i: usize) -> bool {
        assert!(
            (1..=self.bits.len()).contains(&i),
            "bit index {i} outside 1..={}",
            self.bits.len()
        );
        self.bits[i - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for TransformedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for TransformedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({self})")
    }
}

pub fn transform(label: u64, space: LabelSpace) -> Result<TransformedLabel, InputError> {
    space.check(label)?;
    let lambda = space.lambda();
    let bits = (0..lambda)
        .rev()
        .map(|shift| (label >> shift) & 1 == 1)
        .collect();
    Ok(TransformedLabel { bits })
}

/// Smallest 1-based index at which the two labels differ.
pub fn first_differing_index(
    a: &TransformedLabel,
    b: &TransformedLabel,
) -> Result<usize, InputError> {
    if a.len() != b.len() {
        return Err(InputError::LengthMismatch(a.len(), b.len()));
    }
    a.bits
        .iter()
        .zip(&b.bits)
        .position(|(x, y)| x != y)
        .map(|p| p + 1)
        .ok_or_else(|| InputError::EqualLabels(value_of(a)))
}

fn value_of(t: &TransformedLabel) -> u64 {
    t.bits.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
}
