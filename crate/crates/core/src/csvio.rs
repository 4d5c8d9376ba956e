//! CSV dialect shared by every file the crate reads or writes: comma
//! separated, header row, and `# key=value` metadata lines before the header.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::arprocess::Series;
use crate::kolmogorov::Band;
use crate::metrics::Cdf;
use crate::{Error, Result};

pub type Metadata = Vec<(String, String)>;

pub struct CsvTable {
    pub metadata: Metadata,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| fmt_f64(*v)));
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn read_from<R: BufRead>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        let metadata = text
            .lines()
            .filter_map(|l| l.trim_start().strip_prefix('#'))
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = rdr.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            rows.push(rec.map_err(csv_err)?.iter().map(String::from).collect());
        }
        Ok(Self { metadata, header, rows })
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("malformed CSV: {other:?}")),
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// A series as read from disk, with the presample length if the file recorded one.
pub struct SeriesFile {
    pub values: Vec<f64>,
    pub presample_len: Option<usize>,
    pub metadata: Metadata,
}

impl SeriesFile {
    /// Splits into a [`Series`] of order `p`. Without a recorded presample
    /// the first `p` values are relabeled as presample. Returns whether the
    /// relabeling happened.
    pub fn into_series(self, p: usize) -> Result<(Series, bool)> {
        match self.presample_len {
            Some(k) if k >= p => {
                if self.values.len() <= k {
                    return Err(Error::TooShort { needed: k + 1, available: self.values.len() });
                }
                Ok((Series::new(self.values[..k].to_vec(), self.values[k..].to_vec())?, false))
            }
            _ => Ok((Series::from_observations(&self.values, p)?, true)),
        }
    }
}

pub fn series_table(series: &Series, extra: &[(&str, String)]) -> CsvTable {
    let mut t = CsvTable::new(&["x"]).meta("presample_len", series.presample.len());
    for (k, v) in extra {
        t = t.meta(k, v);
    }
    for v in series.values() {
        t.push([fmt_f64(v)]);
    }
    t
}

pub fn read_series(path: &Path) -> Result<SeriesFile> {
    let t = CsvTable::read_file(path)?;
    let col = t.column("x").unwrap_or(0);
    let values = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let cell = r.get(col).map(String::as_str).unwrap_or("");
            cell.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("row {}: '{cell}' is not a finite number", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let presample_len = match t.get_meta("presample_len") {
        Some(s) => Some(
            s.parse()
                .map_err(|_| Error::InvalidArgument(format!("bad presample_len '{s}'")))?,
        ),
        None => None,
    };
    Ok(SeriesFile { values, presample_len, metadata: t.metadata })
}

/// `(z, lower, center, upper)` rows.
pub fn band_table<C: Cdf>(band: &Band<C>, grid: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["z", "lower", "center", "upper"])
        .meta("level", fmt_f64(band.level))
        .meta("halfwidth", fmt_f64(band.halfwidth));
    for &z in grid {
        let (lo, c, hi) = band.at(z);
        t.push_floats(&[z, lo, c, hi]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let s = Series::new(vec![0.25], vec![1.0, -2.5e-7, 3.0]).unwrap();
        let mut buf = Vec::new();
        series_table(&s, &[("seed", "7".into())]).write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# presample_len=1\n# seed=7\nx\n0.25\n"));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        std::fs::write(&path, &buf).unwrap();
        let f = read_series(&path).unwrap();
        assert_eq!(f.presample_len, Some(1));
        let (back, relabeled) = f.into_series(1).unwrap();
        assert!(!relabeled);
        assert_eq!(back, s);
    }

    #[test]
    fn missing_presample_relabels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("raw.csv");
        std::fs::write(&path, "x\n1\n2\n3\n4\n").unwrap();
        let (s, relabeled) = read_series(&path).unwrap().into_series(2).unwrap();
        assert!(relabeled);
        assert_eq!(s.presample, vec![1.0, 2.0]);
        assert_eq!(s.body, vec![3.0, 4.0]);
    }

    #[test]
    fn bad_cells_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x\n1\nabc\n").unwrap();
        assert!(read_series(&path).is_err());
    }
}
