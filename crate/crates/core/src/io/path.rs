use std::io::{BufRead, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{McrtError, Result};
use crate::path::{PathKind, PathPair};

pub const PATH_MAGIC: &[u8; 8] = b"MCRTPATH";
pub const PATH_VERSION: u32 = 1;

fn kind_code(kind: PathKind) -> u8 {
    match kind {
        PathKind::Brownian => 0,
        PathKind::Lattice => 1,
    }
}

/// Little-endian column format: magic, version, kind, the five header
/// scalars, sample count, then the `L` column followed by the `R` column.
pub fn write_path_binary<W: Write>(path: &PathPair, mut w: W) -> Result<()> {
    w.write_all(PATH_MAGIC)?;
    w.write_u32::<LittleEndian>(PATH_VERSION)?;
    w.write_u8(kind_code(path.kind))?;
    for x in [path.gamma, path.correlation, path.mesh, path.horizon] {
        w.write_f64::<LittleEndian>(x)?;
    }
    w.write_u64::<LittleEndian>(path.seed)?;
    w.write_u64::<LittleEndian>(path.left.len() as u64)?;
    for &x in path.left.iter().chain(&path.right) {
        w.write_f64::<LittleEndian>(x)?;
    }
    Ok(())
}

pub fn read_path_binary<R: Read>(mut r: R) -> Result<PathPair> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != PATH_MAGIC {
        return Err(McrtError::Parse("not a path file".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != PATH_VERSION {
        return Err(McrtError::Parse(format!("unsupported path format version {version}")));
    }
    let kind = match r.read_u8()? {
        0 => PathKind::Brownian,
        1 => PathKind::Lattice,
        k => return Err(McrtError::Parse(format!("unknown path kind {k}"))),
    };
    let gamma = r.read_f64::<LittleEndian>()?;
    let correlation = r.read_f64::<LittleEndian>()?;
    let mesh = r.read_f64::<LittleEndian>()?;
    let horizon = r.read_f64::<LittleEndian>()?;
    let seed = r.read_u64::<LittleEndian>()?;
    let len = r.read_u64::<LittleEndian>()? as usize;
    let mut column = |len| -> Result<Vec<f64>> {
        let mut v = vec![0.0; len];
        r.read_f64_into::<LittleEndian>(&mut v)?;
        Ok(v)
    };
    let left = column(len)?;
    let right = column(len)?;
    Ok(PathPair {
        gamma,
        correlation,
        mesh,
        horizon,
        seed,
        kind,
        left,
        right,
    })
}

/// CSV with `# key=value` header lines followed by `time,L,R` rows.
pub fn write_path_csv<W: Write>(path: &PathPair, mut w: W) -> Result<()> {
    let kind = match path.kind {
        PathKind::Brownian => "brownian",
        PathKind::Lattice => "lattice",
    };
    writeln!(w, "# gamma={}", path.gamma)?;
    writeln!(w, "# correlation={}", path.correlation)?;
    writeln!(w, "# mesh={}", path.mesh)?;
    writeln!(w, "# horizon={}", path.horizon)?;
    writeln!(w, "# seed={}", path.seed)?;
    writeln!(w, "# kind={kind}")?;
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["time", "L", "R"])?;
    for k in 0..path.len() {
        out.write_record([path.time(k).to_string(), path.left[k].to_string(), path.right[k].to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_path_csv<R: BufRead>(r: R) -> Result<PathPair> {
    let mut header = std::collections::BTreeMap::new();
    let mut body = String::new();
    for line in r.lines() {
        let line = line?;
        match line.strip_prefix('#') {
            Some(rest) => {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    header.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            None => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }
    let get = |k: &str| -> Result<&String> {
        header.get(k).ok_or_else(|| McrtError::Parse(format!("missing header field {k}")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?.parse().map_err(|_| McrtError::Parse(format!("bad header value for {k}")))
    };
    let kind = match get("kind")?.as_str() {
        "brownian" => PathKind::Brownian,
        "lattice" => PathKind::Lattice,
        other => return Err(McrtError::Parse(format!("unknown path kind {other:?}"))),
    };
    let seed = get("seed")?.parse().map_err(|_| McrtError::Parse("bad seed".into()))?;
    let mut rows = csv::Reader::from_reader(body.as_bytes());
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for rec in rows.deserialize() {
        let (_t, l, r): (f64, f64, f64) = rec?;
        left.push(l);
        right.push(r);
    }
    Ok(PathPair {
        gamma: num("gamma")?,
        correlation: num("correlation")?,
        mesh: num("mesh")?,
        horizon: num("horizon")?,
        seed,
        kind,
        left,
        right,
    })
}
