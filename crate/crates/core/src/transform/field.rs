use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples of a scalar on the uniform nodes `x_i = i L/(nx-1)`, `y_j = j h/(ny-1)`.
///
/// Storage is row-major with rows of constant `y`: the value at `(x_i, y_j)`
/// sits at index `j * nx + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    nx: usize,
    ny: usize,
    length: f64,
    height: f64,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(nx: usize, ny: usize, length: f64, height: f64, values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::invariant(format!(
                "grid needs at least 2x2 nodes, got {nx}x{ny}"
            )));
        }
        if !(length > 0.0 && height > 0.0 && length.is_finite() && height.is_finite()) {
            return Err(Error::invariant(format!(
                "extents must be positive, got L = {length}, h = {height}"
            )));
        }
        if values.len() != nx * ny {
            return Err(Error::invariant(format!(
                "expected {} samples, got {}",
                nx * ny,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invariant(format!("non-finite sample at index {k}")));
        }
        Ok(ScalarField {
            nx,
            ny,
            length,
            height,
            values,
        })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(nx: usize, ny: usize, length: f64, height: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let dx = length / (nx.max(2) - 1) as f64;
        let dy = height / (ny.max(2) - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(i as f64 * dx, j as f64 * dy));
            }
        }
        Self::new(nx, ny, length, height, values)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn dx(&self) -> f64 {
        self.length / (self.nx - 1) as f64
    }
    pub fn dy(&self) -> f64 {
        self.height / (self.ny - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.length
        } else {
            i as f64 * self.dx()
        }
    }
    pub fn y(&self, j: usize) -> f64 {
        if j == self.ny - 1 {
            self.height
        } else {
            j as f64 * self.dy()
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.length == other.length && self.height == other.height
    }

    pub(crate) fn require_same_grid(&self, other: &ScalarField) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::invariant(format!(
                "grid mismatch: {}x{} on [0,{}]x[0,{}] vs {}x{} on [0,{}]x[0,{}]",
                self.nx, self.ny, self.length, self.height, other.nx, other.ny, other.length, other.height
            )))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        ScalarField::new(
            self.nx,
            self.ny,
            self.length,
            self.height,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    pub(crate) fn contains(&self, x: f64, y: f64) -> bool {
        let tol_x = 1e-12 * self.length;
        let tol_y = 1e-12 * self.height;
        (-tol_x..=self.length + tol_x).contains(&x) && (-tol_y..=self.height + tol_y).contains(&y)
    }

    /// Cell index and fractional offset of `t` on a uniform axis with `n` nodes.
    pub(crate) fn locate(t: f64, extent: f64, n: usize) -> (usize, f64) {
        let pos = (t / extent).clamp(0.0, 1.0) * (n - 1) as f64;
        let k = (pos.floor() as usize).min(n - 2);
        (k, pos - k as f64)
    }

    /// Bilinear interpolation at `(x, y)`.
    pub fn sample(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::domain(format!(
                "point ({x}, {y}) lies outside [0,{}]x[0,{}]",
                self.length, self.height
            )));
        }
        let (i, tx) = Self::locate(x, self.length, self.nx);
        let (j, ty) = Self::locate(y, self.height, self.ny);
        let v00 = self.get(i, j);
        let v10 = self.get(i + 1, j);
        let v01 = self.get(i, j + 1);
        let v11 = self.get(i + 1, j + 1);
        Ok((1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11))
    }

    /// Writes the fixture format: a `nx,ny,L,h` header line, the four numbers,
    /// then one line per row of constant `y`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(writer);
        w.write_record(["nx", "ny", "L", "h"])?;
        w.write_record([
            self.nx.to_string(),
            self.ny.to_string(),
            self.length.to_string(),
            self.height.to_string(),
        ])?;
        for row in self.values.chunks(self.nx) {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut records = r.records();
        let header = records.next().ok_or(Error::Parse {
            line: 1,
            message: "empty field file".into(),
        })??;
        if header.iter().collect::<Vec<_>>() != ["nx", "ny", "L", "h"] {
            return Err(Error::Parse {
                line: 1,
                message: "expected header nx,ny,L,h".into(),
            });
        }
        let dims = records.next().ok_or(Error::Parse {
            line: 2,
            message: "missing grid dimensions".into(),
        })??;
        let parse_err = |line: usize, what: &str| Error::Parse {
            line,
            message: format!("cannot parse {what}"),
        };
        if dims.len() != 4 {
            return Err(parse_err(2, "grid dimensions"));
        }
        let nx: usize = dims[0].parse().map_err(|_| parse_err(2, "nx"))?;
        let ny: usize = dims[1].parse().map_err(|_| parse_err(2, "ny"))?;
        let length: f64 = dims[2].parse().map_err(|_| parse_err(2, "L"))?;
        let height: f64 = dims[3].parse().map_err(|_| parse_err(2, "h"))?;
        let mut values = Vec::with_capacity(nx.saturating_mul(ny));
        for (k, rec) in records.enumerate() {
            let line = k + 3;
            let rec = rec?;
            if rec.len() != nx {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {nx} values, got {}", rec.len()),
                });
            }
            for v in rec.iter() {
                values.push(v.parse::<f64>().map_err(|_| parse_err(line, "sample"))?);
            }
        }
        Self::new(nx, ny, length, height, values)
    }
}
