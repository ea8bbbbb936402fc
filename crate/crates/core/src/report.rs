//! JSON plumbing shared by the report types.

use serde::{Serialize, Serializer};

/// Top-level envelope carrying the report format version.
#[derive(Serialize)]
pub struct Versioned<T: Serialize> {
    pub version: u32,
    #[serde(flatten)]
    pub inner: T,
}

impl<T: Serialize> Versioned<T> {
    pub fn new(inner: T) -> Self {
        Self { version: 1, inner }
    }
}

/// Extended reals: finite values as numbers, `±∞` as `"inf"`/`"-inf"`.
pub mod ext_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

pub mod ext_real_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    struct Ext(f64);

    impl Serialize for Ext {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::ext_real::serialize(&self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&Ext(*x))?;
        }
        seq.end()
    }
}

/// Row-major serialization of a dense matrix.
pub mod matrix_rows {
    use super::*;
    use nalgebra::DMatrix;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        crate::linalg::to_rows(m).serialize(s)
    }
}

/// Serializes any report with the version envelope, compactly.
pub fn to_json<T: Serialize>(report: &T) -> String {
    serde_json::to_string(&Versioned::new(report)).expect("reports serialize")
}
