//! Text and binary exports. All floating-point text uses a fixed scientific
//! format so reruns of the same computation emit identical bytes.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::state::StateVector;

/// Two-column `time value` table.
pub fn write_two_column<W: Write>(w: &mut W, series: &TimeSeries) -> Result<()> {
    for (&t, &v) in series.grid.times().iter().zip(&series.values) {
        writeln!(w, "{:.12e} {:.12e}", t, v)?;
    }
    Ok(())
}

/// Long-format `index value time` table for heat-map style observables.
pub fn write_long_map<W: Write>(w: &mut W, time: f64, values: &[f64]) -> Result<()> {
    for (i, &v) in values.iter().enumerate() {
        writeln!(w, "{} {:.12e} {:.12e}", i, v, time)?;
    }
    Ok(())
}

/// One-column eigenvalue table.
pub fn write_eigenvalues<W: Write>(w: &mut W, eigenvalues: &[f64]) -> Result<()> {
    for &e in eigenvalues {
        writeln!(w, "{:.12e}", e)?;
    }
    Ok(())
}

/// Binary state blob: little-endian `u64` dimension, `f64` time, then
/// interleaved re/im amplitude pairs.
pub fn write_state_blob<W: Write>(w: &mut W, state: &StateVector, time: f64) -> Result<()> {
    w.write_all(&(state.dim() as u64).to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    for z in &state.amp {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    Ok(())
}

/// Read back a state blob written by [`write_state_blob`].
pub fn read_state_blob<R: Read>(r: &mut R) -> Result<(StateVector, f64)> {
    let mut u = [0u8; 8];
    r.read_exact(&mut u)?;
    let dim = u64::from_le_bytes(u) as usize;
    r.read_exact(&mut u)?;
    let time = f64::from_le_bytes(u);
    let mut amp = Vec::with_capacity(dim);
    for _ in 0..dim {
        r.read_exact(&mut u)?;
        let re = f64::from_le_bytes(u);
        r.read_exact(&mut u)?;
        let im = f64::from_le_bytes(u);
        amp.push(Complex64::new(re, im));
    }
    Ok((StateVector::new(amp), time))
}

/// Parse a two-column table back into (times, values); used by tests and the
/// determinism checks.
pub fn parse_two_column(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        let t = it
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or(Error::EmptyCollection)?;
        let v = it
            .next()
            .and_then(|s| s.parse::<f64>().ok())
            .ok_or(Error::EmptyCollection)?;
        times.push(t);
        values.push(v);
    }
    Ok((times, values))
}
