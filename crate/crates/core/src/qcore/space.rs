use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical kind of a subsystem; fixes its local dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SubsystemKind {
    /// Basis order: index 0 is spin up, index 1 is spin down.
    SpinHalf,
    /// Fock levels `0..=max_occupancy`.
    OpticalMode { max_occupancy: usize },
    /// One basis state per box.
    Position { box_count: usize },
}

impl SubsystemKind {
    pub fn dimension(&self) -> usize {
        match *self {
            SubsystemKind::SpinHalf => 2,
            SubsystemKind::OpticalMode { max_occupancy } => max_occupancy + 1,
            SubsystemKind::Position { box_count } => box_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    #[serde(flatten)]
    pub kind: SubsystemKind,
}

impl Subsystem {
    pub fn new(label: impl Into<String>, kind: SubsystemKind) -> Self {
        Subsystem { label: label.into(), kind }
    }

    pub fn spin(label: impl Into<String>) -> Self {
        Self::new(label, SubsystemKind::SpinHalf)
    }

    pub fn mode(label: impl Into<String>, max_occupancy: usize) -> Self {
        Self::new(label, SubsystemKind::OpticalMode { max_occupancy })
    }

    pub fn position(label: impl Into<String>, box_count: usize) -> Self {
        Self::new(label, SubsystemKind::Position { box_count })
    }

    pub fn dimension(&self) -> usize {
        self.kind.dimension()
    }
}

/// Ordered tensor product of subsystems.
///
/// Basis indices are mixed-radix numbers over the subsystem dimensions with
/// the last subsystem varying fastest. Every module and file format uses this
/// ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Subsystem>", into = "Vec<Subsystem>")]
pub struct CompositeSpace {
    subsystems: Vec<Subsystem>,
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl CompositeSpace {
    pub fn new(subsystems: Vec<Subsystem>) -> Result<Self> {
        if subsystems.is_empty() {
            return Err(Error::validation("composite space needs at least one subsystem"));
        }
        for (i, s) in subsystems.iter().enumerate() {
            if s.dimension() == 0 {
                return Err(Error::validation(format!("subsystem '{}' has dimension 0", s.label)));
            }
            if subsystems[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::structural(format!("duplicate subsystem label '{}'", s.label)));
            }
        }
        let dims: Vec<usize> = subsystems.iter().map(Subsystem::dimension).collect();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1]
                .checked_mul(dims[k + 1])
                .ok_or_else(|| Error::Capacity("space dimension overflows usize".into()))?;
        }
        let total = strides[0]
            .checked_mul(dims[0])
            .ok_or_else(|| Error::Capacity("space dimension overflows usize".into()))?;
        Ok(CompositeSpace { subsystems, dims, strides, total })
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn total_dimension(&self) -> usize {
        self.total
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn require_index(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::structural(format!("no subsystem labelled '{label}'")))
    }

    /// Mixed-radix digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }

    /// Digit of subsystem `k` in basis index `index`.
    #[inline]
    pub fn digit(&self, index: usize, k: usize) -> usize {
        (index / self.strides[k]) % self.dims[k]
    }

    pub fn index(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::structural(format!(
                "expected {} digits, got {}",
                self.dims.len(),
                digits.len()
            )));
        }
        let mut idx = 0;
        for (k, (&d, &n)) in digits.iter().zip(&self.dims).enumerate() {
            if d >= n {
                return Err(Error::structural(format!(
                    "digit {d} out of range for subsystem '{}' of dimension {n}",
                    self.subsystems[k].label
                )));
            }
            idx += d * self.strides[k];
        }
        Ok(idx)
    }

    /// Concatenation `self ⊗ other`; labels must be disjoint.
    pub fn tensor(&self, other: &CompositeSpace) -> Result<CompositeSpace> {
        if let Some(s) = other.subsystems.iter().find(|s| self.index_of(&s.label).is_some()) {
            return Err(Error::structural(format!("label collision on '{}'", s.label)));
        }
        let mut subs = self.subsystems.clone();
        subs.extend(other.subsystems.iter().cloned());
        CompositeSpace::new(subs)
    }
}

impl TryFrom<Vec<Subsystem>> for CompositeSpace {
    type Error = Error;

    fn try_from(value: Vec<Subsystem>) -> Result<Self> {
        CompositeSpace::new(value)
    }
}

impl From<CompositeSpace> for Vec<Subsystem> {
    fn from(value: CompositeSpace) -> Self {
        value.subsystems
    }
}
