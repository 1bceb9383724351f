use std::io::{Read, Write};

use super::{GridFunction, RadialGrid};
use crate::error::{Error, Result};

/// Writes `r,value` rows with 17 significant digits.
pub fn write_csv<W: Write>(u: &GridFunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "value"])?;
    for (r, v) in u.grid().nodes().iter().zip(u.values()) {
        w.write_record([format!("{r:.16e}"), format!("{v:.16e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `r,value` rows written by [`write_csv`]; the nodes become the grid.
pub fn read_csv<R: Read>(input: R, dim: usize) -> Result<GridFunction> {
    let mut rd = csv::Reader::from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "value" {
        return Err(Error::Io(format!("expected header 'r,value', got '{}'", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let parse = |k: usize| -> Result<f64> {
            rec.get(k)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Io(format!("bad number in row {}", line + 2)))
        };
        nodes.push(parse(0)?);
        values.push(parse(1)?);
    }
    let grid = RadialGrid::from_nodes(dim, nodes)?;
    GridFunction::new(grid, values)
}
