//! Dense row-major matrices, cluster labels, and their CSV encodings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};

/// N×D dataset of finite reals; row `n` is point `x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    rows: usize,
    dim: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Rejects empty shapes and
    /// non-finite entries.
    pub fn new(values: Vec<f64>, rows: usize, dim: usize) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::EmptyDataset(format!("shape {rows}x{dim}")));
        }
        if values.len() != rows * dim {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: rows * dim,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i / dim,
                column: i % dim,
            });
        }
        Ok(Self { values, rows, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), dim)
    }

    /// One-dimensional dataset.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), values.len(), 1)
    }

    pub fn n(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Rows selected by `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, indices.len(), self.dim)
    }

    /// Per-coordinate (min, max).
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = self.row(0).to_vec();
        let mut hi = lo.clone();
        for r in self.rows() {
            for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(r) {
                *l = l.min(v);
                *h = h.max(v);
            }
        }
        (lo, hi)
    }

    /// Length of the bounding-box diagonal.
    pub fn diagonal(&self) -> f64 {
        let (lo, hi) = self.bounds();
        lo.iter()
            .zip(&hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for r in self.rows() {
            for (a, &v) in m.iter_mut().zip(r) {
                *a += v;
            }
        }
        let n = self.rows as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }
}

/// K×D matrix of cluster representatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    values: Vec<f64>,
    k: usize,
    dim: usize,
}

impl Centroids {
    pub fn new(values: Vec<f64>, k: usize, dim: usize) -> Result<Self> {
        if k == 0 || dim == 0 {
            return Err(invalid("centroids", format!("shape {k}x{dim}")));
        }
        if values.len() != k * dim {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: k * dim,
            });
        }
        Ok(Self { values, k, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            let r = r.as_ref();
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(values, rows.len(), dim)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_vecs(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Largest Euclidean displacement between corresponding rows.
    pub fn max_displacement(&self, other: &Centroids) -> f64 {
        self.rows()
            .zip(other.rows())
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max)
    }

    /// Views the centroids as a dataset (e.g. for CSV output).
    pub fn to_data(&self) -> Result<DataMatrix> {
        DataMatrix::new(self.values.clone(), self.k, self.dim)
    }
}

/// Hard assignment of N points to K clusters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labels {
    assignment: Vec<usize>,
    k_count: usize,
}

impl Labels {
    pub fn new(assignment: Vec<usize>, k_count: usize) -> Result<Self> {
        if let Some(&label) = assignment.iter().find(|&&l| l >= k_count) {
            return Err(Error::LabelOutOfRange { label, k_count });
        }
        Ok(Self {
            assignment,
            k_count,
        })
    }

    /// Labels with `k_count` = 1 + the largest label (0 for an empty vector).
    pub fn from_vec(assignment: Vec<usize>) -> Self {
        let k_count = assignment.iter().max().map_or(0, |m| m + 1);
        Self {
            assignment,
            k_count,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn k_count(&self) -> usize {
        self.k_count
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assignment
    }

    pub fn get(&self, n: usize) -> usize {
        self.assignment[n]
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k_count];
        for &l in &self.assignment {
            sizes[l] += 1;
        }
        sizes
    }

    /// Point indices of each cluster, in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k_count];
        for (n, &l) in self.assignment.iter().enumerate() {
            members[l].push(n);
        }
        members
    }
}

#[inline]
pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Reads a comma-separated numeric matrix.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<DataMatrix> {
    let path = path.as_ref();
    let mut reader = csv_reader(path, has_header)?;
    let mut values = Vec::new();
    let mut dim = None;
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let expected = *dim.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line,
                expected,
                got: record.len(),
            });
        }
        for (j, field) in record.iter().enumerate() {
            let v = parse_finite(field).map_err(|message| Error::Parse {
                path: path.to_path_buf(),
                line,
                column: j + 1,
                message,
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyDataset(format!(
            "{} contains no data rows",
            path.display()
        )));
    }
    DataMatrix::new(values, rows, dim.unwrap_or(0))
}

/// Writes one row per line with shortest round-trip float formatting.
pub fn save_csv(data: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_file(path, |w| {
        for r in data.rows() {
            for (j, v) in r.iter().enumerate() {
                if j > 0 {
                    w.write_all(b",")?;
                }
                w.write_all(format_f64(*v).as_bytes())?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    })
}

/// Reads one non-negative integer label per line.
pub fn load_labels(path: impl AsRef<Path>) -> Result<Labels> {
    let path = path.as_ref();
    let mut reader = csv_reader(path, false)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 1 {
            return Err(Error::RaggedRow {
                path: path.to_path_buf(),
                line,
                expected: 1,
                got: record.len(),
            });
        }
        let label = record[0]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line,
                column: 1,
                message: format!("invalid label {:?}: {e}", &record[0]),
            })?;
        out.push(label);
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "{} contains no labels",
            path.display()
        )));
    }
    Ok(Labels::from_vec(out))
}

pub fn save_labels(labels: &Labels, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), |w| {
        for l in labels.as_slice() {
            writeln!(w, "{l}")?;
        }
        Ok(())
    })
}

/// Shortest decimal text that parses back to exactly `v`.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn parse_finite(field: &str) -> std::result::Result<f64, String> {
    let field = field.trim();
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(format!("non-finite value {field:?}")),
        Err(_) => Err(format!("cannot parse {field:?} as a number")),
    }
}

fn csv_reader(path: &Path, has_header: bool) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        path: path.to_path_buf(),
        line,
        column: 0,
        message: e.to_string(),
    }
}

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    body(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_simple_matrix() {
        let f = write_tmp("0,0\n1,1\n");
        let d = load_csv(f.path(), false).unwrap();
        assert_eq!((d.n(), d.dim()), (2, 2));
        assert_eq!(d.as_slice(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn header_is_skipped() {
        let f = write_tmp("a,b\n0.5,2\n");
        let d = load_csv(f.path(), true).unwrap();
        assert_eq!(d.as_slice(), &[0.5, 2.0]);
    }

    #[test]
    fn bad_field_reports_row_and_column() {
        let f = write_tmp("1,x\n");
        match load_csv(f.path(), false).unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 2)),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let f = write_tmp("1,2\n3\n");
        assert!(matches!(
            load_csv(f.path(), false),
            Err(Error::RaggedRow {
                line: 2,
                expected: 2,
                got: 1,
                ..
            })
        ));
    }

    #[test]
    fn empty_file_rejected() {
        let f = write_tmp("");
        assert!(matches!(
            load_csv(f.path(), false),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn nan_field_rejected() {
        let f = write_tmp("1,NaN\n");
        assert!(matches!(
            load_csv(f.path(), false),
            Err(Error::Parse { column: 2, .. })
        ));
    }

    #[test]
    fn save_half() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        save_csv(&DataMatrix::from_column(&[0.5]).unwrap(), &p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "0.5\n");
    }

    #[test]
    fn empty_matrix_cannot_exist() {
        assert!(matches!(
            DataMatrix::new(vec![], 0, 3),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn missing_file_names_path() {
        let e = load_csv("/nonexistent/data.csv", false).unwrap_err();
        assert!(e.to_string().contains("/nonexistent/data.csv"));
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.csv");
        let l = Labels::new(vec![0, 2, 1, 1], 3).unwrap();
        save_labels(&l, &p).unwrap();
        assert_eq!(load_labels(&p).unwrap(), l);
    }

    #[test]
    fn labels_out_of_range() {
        assert!(Labels::new(vec![0, 3], 3).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            rows in 1usize..6,
            dim in 1usize..4,
            seed in proptest::collection::vec(
                prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), -1e6..1e6f64],
                24,
            ),
        ) {
            let values: Vec<f64> = seed.iter().cycle().take(rows * dim).copied().collect();
            let d = DataMatrix::new(values, rows, dim).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.csv");
            save_csv(&d, &p).unwrap();
            let back = load_csv(&p, false).unwrap();
            prop_assert_eq!(back.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                            d.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
        }
    }
}
