//! Time-series CSV and binary restart snapshots.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::integrate::{ObserverSeries, Sample};
use super::DynamicsError;
use crate::algebra::{LatticeBox, State};

/// State at time `t`. On disk: `u64` half-width and `f64` time (16 bytes,
/// little endian), then `2L+1` complex doubles as `(re, im)` in site order.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub state: State,
}

pub fn write_snapshot(w: &mut impl Write, s: &Snapshot) -> std::io::Result<()> {
    w.write_all(&(s.state.lattice().half_width() as u64).to_le_bytes())?;
    w.write_all(&s.t.to_le_bytes())?;
    for z in s.state.as_slice() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot(r: &mut impl Read) -> Result<Snapshot, DynamicsError> {
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let half = u64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let t = f64::from_le_bytes(b8);
    let half = u32::try_from(half).map_err(|_| DynamicsError::InvalidParameter(format!("half-width {half}")))?;
    let lattice = LatticeBox::new(half).map_err(|e| DynamicsError::InvalidParameter(e.to_string()))?;
    let mut amps = Vec::with_capacity(lattice.len());
    for _ in 0..lattice.len() {
        r.read_exact(&mut b8)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        amps.push(Complex64::new(re, f64::from_le_bytes(b8)));
    }
    let state = State::from_vec(lattice, amps).map_err(|e| DynamicsError::InvalidParameter(e.to_string()))?;
    Ok(Snapshot { t, state })
}

/// Header `t,norm,energy,m_j0,m_j0n,edge_mass,flux`.
pub fn write_series_csv(path: &Path, series: &ObserverSeries) -> Result<(), DynamicsError> {
    let mut w = csv::Writer::from_path(path)?;
    for s in &series.samples {
        w.serialize(s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_csv(path: &Path) -> Result<ObserverSeries, DynamicsError> {
    let mut r = csv::Reader::from_path(path)?;
    let samples = r.deserialize::<Sample>().collect::<Result<Vec<_>, _>>()?;
    Ok(ObserverSeries { samples })
}
