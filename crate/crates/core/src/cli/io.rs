//! CSV formats: trajectories, sample sets and kernel tables.

use std::io::{BufRead, Write};

use crate::domain::{OrderedConfig, Trajectory};
use crate::equilibrium::{inverse_bessel_kernel_scaled, KernelGrid};
use crate::error::{Error, Result};

/// Writes `t,x1,…,xN` rows with 17 significant digits.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    traj.validate()?;
    let n = traj.dim();
    let header: Vec<String> = std::iter::once("t".to_string()).chain((1..=n).map(|i| format!("x{i}"))).collect();
    writeln!(out, "{}", header.join(","))?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        write!(out, "{t:.16e}")?;
        for v in s.values() {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads a file written by [`write_trajectory_csv`] back into times and states.
pub fn read_trajectory_csv<R: BufRead>(input: R) -> Result<(Vec<f64>, Vec<OrderedConfig>)> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::EmptySample)??;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.iter().skip(1).enumerate().any(|(i, c)| *c != format!("x{}", i + 1)) {
        return Err(Error::InvalidConfig(format!("bad trajectory header `{header}`")));
    }
    let (mut times, mut states) = (vec![], vec![]);
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::InvalidConfig(format!("line {}: {e}", row + 2)))?;
        if vals.len() != cols.len() {
            return Err(Error::DimensionMismatch(cols.len(), vals.len()));
        }
        times.push(vals[0]);
        states.push(OrderedConfig::new(vals[1..].to_vec())?);
    }
    Ok((times, states))
}

/// Writes one sample per row under the header `prefix1,…,prefixK`.
pub fn write_samples_csv<W: Write>(samples: &[OrderedConfig], prefix: &str, mut out: W) -> Result<()> {
    let k = samples.first().map_or(0, OrderedConfig::len);
    let header: Vec<String> = (1..=k).map(|i| format!("{prefix}{i}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for s in samples {
        let row: Vec<String> = s.values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Writes `x,y,value` rows of the inverse Bessel kernel over `grid × grid`
/// in row-major order.
pub fn emit_kernel_table<W: Write>(eta: f64, grid: &[f64], out: W) -> Result<()> {
    emit_kernel_table_scaled(eta, grid, 8.0, out)
}

/// [`emit_kernel_table`] with the scale constant `c` as a parameter.
pub fn emit_kernel_table_scaled<W: Write>(eta: f64, grid: &[f64], c: f64, out: W) -> Result<()> {
    if !(eta > -1.0) {
        return Err(Error::Parameter(format!("eta = {eta} must be > -1")));
    }
    let table = KernelGrid::tabulate(grid.to_vec(), |x, y| inverse_bessel_kernel_scaled(eta, x, y, c))?;
    table.write_csv(out)?;
    Ok(())
}
