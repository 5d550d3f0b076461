//! JSON documents for matrices, states and maps.
//!
//! Reals are written by `serde_json` with the shortest representation that
//! parses back to the same double, so a dump/load cycle is bit-exact.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumMap;
use crate::error::{Error, Result};
use crate::states::DensityMatrix;
use crate::tensor::{ComplexMatrix, DimProfile};

/// `{"rows", "cols", "dims", "data": [[re, im], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

impl MatrixDoc {
    pub fn new(m: &ComplexMatrix, dims: &DimProfile) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            dims: dims.dims().to_vec(),
            data: m.data().to_vec(),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_vec(self.rows, self.cols, self.data.clone())
    }

    pub fn dim_profile(&self) -> Result<DimProfile> {
        DimProfile::new(self.dims.clone())
    }
}

/// Matrix document of the Choi matrix plus `{"d_in", "d_out", "label"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDoc {
    #[serde(flatten)]
    pub choi: MatrixDoc,
    pub d_in: usize,
    pub d_out: usize,
    pub label: Option<String>,
}

impl MapDoc {
    pub fn new(map: &QuantumMap) -> Self {
        Self {
            choi: MatrixDoc::new(map.choi(), &map.dims()),
            d_in: map.d_in(),
            d_out: map.d_out(),
            label: map.label().map(str::to_string),
        }
    }

    pub fn to_map(&self) -> Result<QuantumMap> {
        if self.choi.dims != [self.d_in, self.d_out] {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match d_in = {}, d_out = {}",
                self.choi.dims, self.d_in, self.d_out
            )));
        }
        QuantumMap::from_choi(self.d_in, self.d_out, self.choi.matrix()?, self.label.clone())
    }
}

pub fn to_json<T: Serialize>(value: &T, pretty: bool) -> Result<String> {
    Ok(if pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    })
}

pub fn map_to_json(map: &QuantumMap, pretty: bool) -> Result<String> {
    to_json(&MapDoc::new(map), pretty)
}

pub fn map_from_json(text: &str) -> Result<QuantumMap> {
    serde_json::from_str::<MapDoc>(text)?.to_map()
}

pub fn state_to_json(rho: &DensityMatrix, pretty: bool) -> Result<String> {
    to_json(&MatrixDoc::new(rho.matrix(), rho.dims()), pretty)
}

pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text)?;
    DensityMatrix::new(doc.matrix()?, doc.dim_profile()?)
}
