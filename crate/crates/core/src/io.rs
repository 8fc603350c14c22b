//! State files and moment tables.
//!
//! A state file is JSON:
//!
//! ```json
//! { "sectors": [ { "two_S": 3, "weight": 1.0, "form": "diag", "data": [0.25, 0, 0.75, 0] } ],
//!   "metadata": { "objective": 0.625 } }
//! ```
//!
//! Forms and their `data`:
//! - `matrix`: rows of `[re, im]` pairs, row-major, `m` descending
//! - `diag`: probabilities, `m` descending
//! - `pure`: amplitudes as `[re, im]` pairs, `m` descending
//! - `fock`: `{ "two_m": int }`
//! - `coherent`: `{ "theta": float, "phi": float }`

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angmom::HalfInt;
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::report::fmt_f64;
use crate::states::{PolarizationState, SpinSector};
use crate::stokes::MomentSample;
use crate::CMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub sectors: Vec<SectorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Map<String, serde_json::Value>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorEntry {
    #[serde(rename = "two_S")]
    pub two_s: i32,
    #[serde(default = "unit_weight")]
    pub weight: f64,
    #[serde(flatten)]
    pub data: SectorData,
}

fn unit_weight() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "data", rename_all = "lowercase")]
pub enum SectorData {
    Matrix(Vec<Vec<[f64; 2]>>),
    Diag(Vec<f64>),
    Pure(Vec<[f64; 2]>),
    Fock { two_m: i32 },
    Coherent { theta: f64, phi: f64 },
}

impl SectorEntry {
    /// Matrix-form entry for an arbitrary sector.
    pub fn from_sector(weight: f64, sector: &SpinSector) -> Self {
        let m = sector.matrix();
        let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        Self { two_s: sector.spin().twice(), weight, data: SectorData::Matrix(rows) }
    }

    /// Builds the sector, checking shape and validity against `tol`.
    pub fn to_sector(&self, tol: f64) -> Result<SpinSector> {
        let spin = HalfInt::spin(self.two_s)?;
        let d = spin.dim();
        let sector = match &self.data {
            SectorData::Matrix(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::Parse(format!("matrix for two_S = {} must be {d}×{d}", self.two_s)));
                }
                let m = CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
                SpinSector::new_unchecked(spin, m)?
            }
            SectorData::Diag(p) => SpinSector::diagonal(spin, p)?,
            SectorData::Pure(a) => {
                let amps: Vec<Complex64> = a.iter().map(|z| Complex64::new(z[0], z[1])).collect();
                SpinSector::pure(spin, &amps)?
            }
            SectorData::Fock { two_m } => SpinSector::fock(spin, HalfInt::from_twice(*two_m))?,
            SectorData::Coherent { theta, phi } => SpinSector::coherent(spin, Direction::new(*theta, *phi)?),
        };
        let report = sector.validate(tol);
        if !report.passed() {
            return Err(Error::Validation(format!("sector two_S = {}: {}", self.two_s, report.failures.join("; "))));
        }
        Ok(sector)
    }
}

impl StateFile {
    pub fn single(entry: SectorEntry) -> Self {
        Self { sectors: vec![entry], metadata: None }
    }

    /// Matrix-form file for every shell of `state`.
    pub fn from_state(state: &PolarizationState) -> Self {
        Self { sectors: state.shells().iter().map(|(w, s)| SectorEntry::from_sector(*w, s)).collect(), metadata: None }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.get_or_insert_with(Default::default).insert(key.to_string(), value.into());
        self
    }

    pub fn to_state(&self, tol: f64) -> Result<PolarizationState> {
        let shells = self.sectors.iter().map(|e| Ok((e.weight, e.to_sector(tol)?))).collect::<Result<Vec<_>>>()?;
        PolarizationState::assemble(shells)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state file serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| with_path(e, path))?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub(crate) fn with_path(e: std::io::Error, path: &Path) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

/// Writes `theta,phi,ell,value` rows.
pub fn write_moments<W: Write>(samples: &[MomentSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "ell", "value"])?;
    for s in samples {
        w.write_record([fmt_f64(s.direction.theta), fmt_f64(s.direction.phi), s.ell.to_string(), fmt_f64(s.value)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_moments<R: Read>(input: R) -> Result<Vec<MomentSample>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers()?.clone();
    let want = ["theta", "phi", "ell", "value"];
    if headers.len() != 4 || headers.iter().zip(want).any(|(h, w)| h != w) {
        return Err(Error::Parse(format!("moments header must be theta,phi,ell,value, got {:?}", headers)));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|e| Error::Parse(format!("moments row {}: {e}", line + 1)))
        };
        let ell = rec[2].parse::<u32>().map_err(|e| Error::Parse(format!("moments row {}: ell: {e}", line + 1)))?;
        out.push(MomentSample { direction: Direction::new(num(0)?, num(1)?)?, ell, value: num(3)? });
    }
    if out.is_empty() {
        return Err(Error::Parse("moments file has no rows".into()));
    }
    Ok(out)
}
