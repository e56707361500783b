use crate::error::{Error, Result};
use std::io::{Read, Write};

/// Samples of a path in `R^d`, linearly interpolated between breakpoints.
///
/// With `time_augmented` the effective path is `(t, X_t)` in `R^{d+1}` and letter 0 is the clock.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePath {
    times: Vec<f64>,
    dim: usize,
    values: Vec<f64>,
    time_augmented: bool,
}

impl PiecewisePath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>, time_augmented: bool) -> Result<Self> {
        let dim = values.first().map_or(0, |v| v.len());
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidArgument("ragged path values".into()));
        }
        Self::from_flat(times, dim, values.concat(), time_augmented)
    }

    /// `values` holds `times.len()` rows of `dim` entries.
    pub fn from_flat(times: Vec<f64>, dim: usize, values: Vec<f64>, time_augmented: bool) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyPath);
        }
        if values.len() != times.len() * dim {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} samples of dimension {dim}",
                values.len(),
                times.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("path".into()));
        }
        if let Some(k) = (1..times.len()).find(|&k| times[k] <= times[k - 1]) {
            return Err(Error::TimeRegression { current: times[k - 1], next: times[k] });
        }
        if dim == 0 && !time_augmented {
            return Err(Error::InvalidArgument("path has no components".into()));
        }
        Ok(PiecewisePath { times, dim, values, time_augmented })
    }

    /// Samples `f` on a uniform grid of `n + 1` points over `[t0, t1]`.
    pub fn sample(t0: f64, t1: f64, n: usize, dim: usize, f: impl Fn(f64) -> Vec<f64>, time_augmented: bool) -> Result<Self> {
        let times: Vec<f64> = (0..=n).map(|k| t0 + (t1 - t0) * k as f64 / n as f64).collect();
        let values: Vec<f64> = times.iter().flat_map(|&t| f(t)).collect();
        Self::from_flat(times, dim, values, time_augmented)
    }

    pub fn with_time_augmentation(mut self, on: bool) -> Self {
        self.time_augmented = on;
        self
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("nonempty")
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_augmented(&self) -> bool {
        self.time_augmented
    }

    /// Alphabet size of the effective path.
    pub fn width(&self) -> usize {
        self.dim + usize::from(self.time_augmented)
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn flat_values(&self) -> &[f64] {
        &self.values
    }

    /// Effective increment over segment `k` (from sample `k` to `k + 1`), clock first if augmented.
    pub fn increment_into(&self, k: usize, out: &mut [f64]) {
        let off = usize::from(self.time_augmented);
        if self.time_augmented {
            out[0] = self.times[k + 1] - self.times[k];
        }
        let (a, b) = (self.value(k), self.value(k + 1));
        for i in 0..self.dim {
            out[off + i] = b[i] - a[i];
        }
    }

    pub fn increment(&self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.width()];
        self.increment_into(k, &mut v);
        v
    }

    /// Effective slope over segment `k`.
    pub fn slope(&self, k: usize) -> Vec<f64> {
        let dt = self.times[k + 1] - self.times[k];
        self.increment(k).into_iter().map(|v| v / dt).collect()
    }

    /// Samples with `t0 <= t <= t1`.
    pub fn restrict(&self, t0: f64, t1: f64) -> Result<Self> {
        let idx: Vec<usize> = (0..self.len()).filter(|&k| self.times[k] >= t0 && self.times[k] <= t1).collect();
        let times = idx.iter().map(|&k| self.times[k]).collect();
        let values = idx.iter().flat_map(|&k| self.value(k).to_vec()).collect();
        Self::from_flat(times, self.dim, values, self.time_augmented)
    }

    /// All breakpoints moved by `h`.
    pub fn shifted(&self, h: f64) -> Self {
        let mut p = self.clone();
        p.times.iter_mut().for_each(|t| *t += h);
        p
    }

    /// Index of the breakpoint equal to `t`.
    pub fn breakpoint(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|&s| s == t)
    }

    /// Reads a `t,x1,...,xd` CSV.
    pub fn read_csv<R: Read>(input: R, time_augmented: bool) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.is_empty() || &headers[0] != "t" {
            return Err(Error::Parse("path CSV must start with a 't' column".into()));
        }
        let dim = headers.len() - 1;
        let (mut times, mut values) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| Error::Parse(format!("number \"{field}\"")))?;
                if j == 0 {
                    times.push(v);
                } else {
                    values.push(v);
                }
            }
        }
        Self::from_flat(times, dim, values, time_augmented)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        wtr.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![format!("{:.16e}", self.times[k])];
            row.extend(self.value(k).iter().map(|v| format!("{v:.16e}")));
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
