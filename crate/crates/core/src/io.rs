//! Trajectory files.
//!
//! JSON Lines holds one `{"points": [[a, b], ...]}` object per line. CSV
//! holds `traj_id,idx,a,b` rows and is picked by a `.csv` extension.
//! Coordinates are written with 17 significant digits.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::geometry::Location;
use crate::trajectory::Trajectory;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Data { path: PathBuf, line: usize, msg: String },
}

impl FileError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        FileError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn data(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        FileError::Data {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Csv,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::JsonLines,
        }
    }
}

/// `x` with 17 significant digits, trailing zeros dropped, in the style of
/// C's `%.17g`.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    points: Vec<Vec<f64>>,
}

pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory<f64>>, FileError> {
    let file = File::open(path).map_err(|e| FileError::io(path, e))?;
    match Format::from_path(path) {
        Format::JsonLines => read_jsonl(path, BufReader::new(file)),
        Format::Csv => read_csv(path, file),
    }
}

fn read_jsonl<R: BufRead>(path: &Path, reader: R) -> Result<Vec<Trajectory<f64>>, FileError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| FileError::io(path, e))?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record =
            serde_json::from_str(&line).map_err(|e| FileError::data(path, lineno, e.to_string()))?;
        let mut points = Vec::with_capacity(rec.points.len());
        for (j, p) in rec.points.iter().enumerate() {
            if p.len() != 2 {
                return Err(FileError::data(
                    path,
                    lineno,
                    format!("point {j} has {} coordinates, expected 2", p.len()),
                ));
            }
            points.push(Location::new(p[0], p[1]));
        }
        out.push(Trajectory::new(points).map_err(|e| FileError::data(path, lineno, e.to_string()))?);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct CsvRow {
    traj_id: u64,
    idx: usize,
    a: f64,
    b: f64,
}

fn read_csv(path: &Path, file: File) -> Result<Vec<Trajectory<f64>>, FileError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    // Trajectories keep the order in which their ids first appear.
    let mut order: Vec<u64> = Vec::new();
    let mut rows: BTreeMap<u64, Vec<(usize, Location<f64>, usize)>> = BTreeMap::new();
    for (i, rec) in reader.deserialize::<CsvRow>().enumerate() {
        let lineno = i + 2;
        let row = rec.map_err(|e| FileError::data(path, lineno, e.to_string()))?;
        let entry = rows.entry(row.traj_id).or_insert_with(|| {
            order.push(row.traj_id);
            Vec::new()
        });
        entry.push((row.idx, Location::new(row.a, row.b), lineno));
    }
    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let mut pts = rows.remove(&id).expect("id recorded");
        pts.sort_by_key(|p| p.0);
        for (want, &(idx, _, lineno)) in pts.iter().enumerate() {
            if idx != want {
                return Err(FileError::data(
                    path,
                    lineno,
                    format!("trajectory {id}: expected idx {want}, found {idx}"),
                ));
            }
        }
        let first_line = pts[0].2;
        out.push(
            Trajectory::new(pts.into_iter().map(|p| p.1).collect())
                .map_err(|e| FileError::data(path, first_line, e.to_string()))?,
        );
    }
    Ok(out)
}

/// Every location of every record, in file order.
pub fn read_points(path: &Path) -> Result<Vec<Location<f64>>, FileError> {
    Ok(read_trajectories(path)?
        .into_iter()
        .flat_map(Trajectory::into_points)
        .collect())
}

pub fn write_trajectories(path: &Path, trajs: &[Trajectory<f64>]) -> Result<(), FileError> {
    let text = match Format::from_path(path) {
        Format::JsonLines => to_jsonl(trajs),
        Format::Csv => to_csv(trajs),
    };
    let file = File::create(path).map_err(|e| FileError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| FileError::io(path, e))
}

pub fn to_jsonl(trajs: &[Trajectory<f64>]) -> String {
    let mut out = String::new();
    for t in trajs {
        out.push_str("{\"points\":[");
        for (i, p) in t.points().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            out.push_str(&format_f64(p.a));
            out.push(',');
            out.push_str(&format_f64(p.b));
            out.push(']');
        }
        out.push_str("]}\n");
    }
    out
}

pub fn to_csv(trajs: &[Trajectory<f64>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["traj_id", "idx", "a", "b"]).expect("in-memory write");
    for (id, t) in trajs.iter().enumerate() {
        for (idx, p) in t.points().iter().enumerate() {
            w.write_record([
                id.to_string(),
                idx.to_string(),
                format_f64(p.a),
                format_f64(p.b),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| FileError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| FileError::io(path, e))
}
