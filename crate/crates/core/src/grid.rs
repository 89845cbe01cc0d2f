//! Uniform periodic grids and complex fields on them.
//!
//! Fields are stored as `(ny, nx)` arrays: row `j` is the line `y = y_j`.
//! Points are `x_i = -X + i dx` with `dx = 2X / nx`, so the grid covers
//! `[-X, X)` and wraps periodically.

use std::io::{Read, Write};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;

/// Largest density `|psi|^2` tolerated on the outermost grid ring of a
/// normalized field.
pub const BOUNDARY_DENSITY_LIMIT: f64 = 1e-8;

pub const LPGF_MAGIC: &[u8; 4] = b"LPGF";
pub const LPGF_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_extent: f64,
    pub y_extent: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, x_extent: f64, y_extent: f64) -> Result<Self> {
        let g = GridSpec {
            nx,
            ny,
            x_extent,
            y_extent,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn square(n: usize, extent: f64) -> Result<Self> {
        Self::new(n, n, extent, extent)
    }

    /// 256 x 256 points spanning `+-8` magnetic lengths.
    pub fn default_for(params: &PhysicalParams) -> Self {
        let e = 8.0 * params.magnetic_length();
        GridSpec {
            nx: 256,
            ny: 256,
            x_extent: e,
            y_extent: e,
        }
    }

    /// Half-width needed for `D(alpha)|n>`: `(|alpha| + sqrt(2n + 1) + 4) sqrt(2 hbar / M omega)`.
    pub fn recommended_extent(n: usize, alpha_abs: f64, params: &PhysicalParams) -> f64 {
        (alpha_abs + (2.0 * n as f64 + 1.0).sqrt() + 4.0) * params.orbit_scale()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be a power of two >= 4, got {n}"
                )));
            }
        }
        for (name, e) in [("x_extent", self.x_extent), ("y_extent", self.y_extent)] {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {e}"
                )));
            }
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_extent / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.y_extent / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_extent + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.y_extent + j as f64 * self.dy()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub values: Array2<C64>,
    pub grid: GridSpec,
}

impl GridField {
    pub fn zeros(grid: GridSpec) -> Self {
        GridField {
            values: Array2::zeros((grid.ny, grid.nx)),
            grid,
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> C64) -> Self {
        let values = Array2::from_shape_fn((grid.ny, grid.nx), |(j, i)| f(grid.x(i), grid.y(j)));
        GridField { values, grid }
    }

    /// Trapezoidal (periodic) quadrature of `|psi|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    /// `<self|other>` by quadrature.
    pub fn inner(&self, other: &GridField) -> Result<C64> {
        if self.values.dim() != other.values.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        let s: C64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.cell_area())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::EmptySpec);
        }
        self.values.mapv_inplace(|z| z / n);
        Ok(self)
    }

    /// `(<x>, <y>)` by quadrature, divided by the norm.
    pub fn center(&self) -> (f64, f64) {
        let (mut sx, mut sy, mut s) = (0.0, 0.0, 0.0);
        for ((j, i), z) in self.values.indexed_iter() {
            let d = z.norm_sqr();
            sx += d * self.grid.x(i);
            sy += d * self.grid.y(j);
            s += d;
        }
        (sx / s, sy / s)
    }

    /// Largest `|psi|^2` on the outermost ring of grid points.
    pub fn boundary_density(&self) -> f64 {
        let (ny, nx) = self.values.dim();
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m
                .max(self.values[[0, i]].norm_sqr())
                .max(self.values[[ny - 1, i]].norm_sqr());
        }
        for j in 0..ny {
            m = m
                .max(self.values[[j, 0]].norm_sqr())
                .max(self.values[[j, nx - 1]].norm_sqr());
        }
        m
    }

    /// Fails when the boundary density exceeds `limit` times the field norm.
    pub fn check_boundary(&self, limit: f64) -> Result<()> {
        let scale = self.norm_sqr().max(f64::MIN_POSITIVE);
        let density = self.boundary_density() / scale;
        if density > limit {
            return Err(Error::BoundaryViolation { density, limit });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &GridField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `x,y,density` rows for plotting.
    pub fn write_density_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,density")?;
        for ((j, i), z) in self.values.indexed_iter() {
            writeln!(
                out,
                "{},{},{}",
                self.grid.x(i),
                self.grid.y(j),
                z.norm_sqr()
            )?;
        }
        Ok(())
    }

    /// Binary dump: `LPGF`, version, `nx`, `ny` (u32), extents (f64), then
    /// `nx * ny` complex values as little-endian `(re, im)` f64 pairs, row-major.
    pub fn write_lpgf<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(LPGF_MAGIC)?;
        out.write_all(&LPGF_VERSION.to_le_bytes())?;
        out.write_all(&(self.grid.nx as u32).to_le_bytes())?;
        out.write_all(&(self.grid.ny as u32).to_le_bytes())?;
        out.write_all(&self.grid.x_extent.to_le_bytes())?;
        out.write_all(&self.grid.y_extent.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.values.len() * 16);
        for z in self.values.iter() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        out.write_all(&buf)
    }

    pub fn read_lpgf<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != LPGF_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let mut u = [0u8; 4];
        let mut f = [0u8; 8];
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut u)?;
            Ok(u32::from_le_bytes(u))
        };
        let version = read_u32(&mut input)?;
        if version != LPGF_VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let nx = read_u32(&mut input)? as usize;
        let ny = read_u32(&mut input)? as usize;
        input.read_exact(&mut f)?;
        let x_extent = f64::from_le_bytes(f);
        input.read_exact(&mut f)?;
        let y_extent = f64::from_le_bytes(f);
        let grid =
            GridSpec::new(nx, ny, x_extent, y_extent).map_err(|e| Error::Format(e.to_string()))?;
        let mut raw = vec![0u8; nx * ny * 16];
        input.read_exact(&mut raw)?;
        let vals: Vec<C64> = raw
            .chunks_exact(16)
            .map(|c| {
                C64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        let values =
            Array2::from_shape_vec((ny, nx), vals).map_err(|e| Error::Format(e.to_string()))?;
        Ok(GridField { values, grid })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(GridSpec::new(100, 128, 8.0, 8.0).is_err());
        assert!(GridSpec::new(128, 128, 0.0, 8.0).is_err());
    }

    #[test]
    fn gaussian_quadrature() {
        let g = GridSpec::square(128, 8.0).unwrap();
        let f = GridField::from_fn(g, |x, y| C64::new((-(x * x + y * y) / 4.0).exp(), 0.0));
        // int exp(-r^2/2) dx dy = 2 pi
        assert!((f.norm_sqr() - std::f64::consts::TAU).abs() < 1e-12);
    }

    #[test]
    fn lpgf_header_layout() {
        let g = GridSpec::new(4, 8, 1.5, 2.0).unwrap();
        let f = GridField::from_fn(g, C64::new);
        let mut buf = Vec::new();
        f.write_lpgf(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"LPGF");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 4);
        assert_eq!(u32::from_le_bytes(buf[12..16].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(buf[16..24].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(buf[24..32].try_into().unwrap()), 2.0);
        assert_eq!(buf.len(), 32 + 4 * 8 * 16);
        // first value is (x_0, y_0) = (-1.5, -2.0), second is x_1 on the same row
        assert_eq!(f64::from_le_bytes(buf[32..40].try_into().unwrap()), -1.5);
        assert_eq!(f64::from_le_bytes(buf[40..48].try_into().unwrap()), -2.0);
        assert_eq!(f64::from_le_bytes(buf[48..56].try_into().unwrap()), -0.75);
    }

    #[test]
    fn lpgf_rejects_garbage() {
        assert!(GridField::read_lpgf(&b"NOPE0000"[..]).is_err());
        assert!(GridField::read_lpgf(&b"LPGF"[..]).is_err());
    }

    proptest! {
        #[test]
        fn lpgf_roundtrip(seed in 0u64..1000, lx in 0.5f64..20.0, ly in 0.5f64..20.0) {
            let g = GridSpec::new(8, 4, lx, ly).unwrap();
            let s = seed as f64;
            let f = GridField::from_fn(g, |x, y| C64::new((x * s).sin(), y * s - 1.0));
            let mut buf = Vec::new();
            f.write_lpgf(&mut buf).unwrap();
            let back = GridField::read_lpgf(&buf[..]).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
