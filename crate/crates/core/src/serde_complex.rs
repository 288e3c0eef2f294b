//! `{"re": .., "im": ..}` representation of complex numbers.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<ReIm> for Complex64 {
    fn from(z: ReIm) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

/// For `#[serde(with = "...")]` on `BTreeMap<String, Complex64>`.
pub mod map {
    use super::*;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Complex64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k, ReIm::from(*v))))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Complex64>, D::Error> {
        let raw = BTreeMap::<String, ReIm>::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.into())).collect())
    }
}

/// For `#[serde(with = "...")]` on `Vec<Complex64>`.
pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| ReIm::from(*z)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<ReIm>::deserialize(d)?.into_iter().map(Complex64::from).collect())
    }
}
