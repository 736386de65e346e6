use std::io::{Read, Write};

use crate::error::{McrtError, Result};
use crate::laplace::Embedding;
use crate::walk::TrialOutcome;

/// `vertex,value` rows (1-based vertices, as in edge lists), with `x,y`
/// appended when an embedding is given.
pub fn write_harmonic_csv<W: Write>(values: &[f64], embedding: Option<&Embedding>, w: W) -> Result<()> {
    if embedding.is_some_and(|e| e.coords.len() != values.len()) {
        return Err(McrtError::domain("embedding does not match the value vector"));
    }
    let mut out = csv::Writer::from_writer(w);
    match embedding {
        Some(_) => out.write_record(["vertex", "value", "x", "y"])?,
        None => out.write_record(["vertex", "value"])?,
    }
    for (v, value) in values.iter().enumerate() {
        let mut row = vec![(v + 1).to_string(), value.to_string()];
        if let Some(e) = embedding {
            row.push(e.coords[v][0].to_string());
            row.push(e.coords[v][1].to_string());
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// `vertex,x,y,pinned` rows, 1-based.
pub fn write_embedding_csv<W: Write>(embedding: &Embedding, w: W) -> Result<()> {
    let mut pinned = vec![false; embedding.coords.len()];
    for &v in &embedding.pinned {
        pinned[v] = true;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["vertex", "x", "y", "pinned"])?;
    for (v, c) in embedding.coords.iter().enumerate() {
        out.write_record([(v + 1).to_string(), c[0].to_string(), c[1].to_string(), u8::from(pinned[v]).to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a numeric vertex table with rows in 1-based vertex order; returns
/// the header and one row of values per vertex.
pub fn read_field_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| McrtError::Parse(format!("row {k}: not a number: {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if row.first() != Some(&((k + 1) as f64)) {
            return Err(McrtError::Parse(format!("row {k} is out of vertex order")));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// `trial,outcome,steps` rows.
pub fn write_trial_log<W: Write>(outcomes: &[TrialOutcome], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for o in outcomes {
        out.serialize(o)?;
    }
    out.flush()?;
    Ok(())
}
