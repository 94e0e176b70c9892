//! Target unitaries for frequency-bin qudits.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix stored row-major. Entry `(i, j)` maps input bin `j`
/// to output bin `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl TransferMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("matrix dimension must be >= 2, got {dim}")));
        }
        Ok(Self {
            dim,
            entries: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from rows; every entry must be finite.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Domain(format!("non-finite entry at ({i}, {j})")));
                }
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[Complex64]) {
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&v| v * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `Σ |a_ij - b_ij|^2`.
    pub fn distance_sqr(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest deviation of `M M†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.matmul(&self.adjoint()).expect("same dimension");
        let id = Self::identity(self.dim).expect("dim >= 2");
        prod.max_abs_diff(&id).expect("same dimension")
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other,
            });
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for TransferMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for TransferMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

/// Largest dimension accepted by [`chrestenson`].
pub const MAX_CHRESTENSON_DIM: usize = 16;

/// Normalized DFT matrix with entry `(k, m) = e^{i2πkm/D} / √D`.
pub fn chrestenson(dim: usize) -> Result<TransferMatrix> {
    if !(2..=MAX_CHRESTENSON_DIM).contains(&dim) {
        return Err(Error::Domain(format!(
            "Chrestenson dimension must lie in [2, {MAX_CHRESTENSON_DIM}], got {dim}"
        )));
    }
    let mut m = TransferMatrix::zeros(dim)?;
    let norm = 1.0 / (dim as f64).sqrt();
    for k in 0..dim {
        for j in 0..dim {
            // reduce km mod D first so the angle stays exact for row/column 0
            let e = (k * j) % dim;
            m[(k, j)] = Complex64::from_polar(norm, 2.0 * PI * e as f64 / dim as f64);
        }
    }
    Ok(m)
}

/// Named single-qudit targets.
///
/// `X` shifts bin `k` to `k + 1 mod D`; `Z`, `S` and `T` are diagonal with
/// phases `e^{i2πk/D}`, `e^{iπk/D}` and `e^{iπk/(2D)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateName {
    X,
    Z,
    S,
    T,
    Identity,
    Chrestenson,
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(GateName::X),
            "z" => Ok(GateName::Z),
            "s" => Ok(GateName::S),
            "t" => Ok(GateName::T),
            "identity" | "i" => Ok(GateName::Identity),
            "chrestenson" | "dft" => Ok(GateName::Chrestenson),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateName::X => "X",
            GateName::Z => "Z",
            GateName::S => "S",
            GateName::T => "T",
            GateName::Identity => "identity",
            GateName::Chrestenson => "chrestenson",
        };
        f.write_str(s)
    }
}

pub fn named_target(name: GateName, dim: usize) -> Result<TransferMatrix> {
    let diagonal = |phase: &dyn Fn(usize) -> f64| -> Result<TransferMatrix> {
        let mut m = TransferMatrix::zeros(dim)?;
        for k in 0..dim {
            m[(k, k)] = Complex64::from_polar(1.0, phase(k));
        }
        Ok(m)
    };
    let d = dim as f64;
    match name {
        GateName::Identity => TransferMatrix::identity(dim),
        GateName::X => {
            let mut m = TransferMatrix::zeros(dim)?;
            for k in 0..dim {
                m[((k + 1) % dim, k)] = ONE;
            }
            Ok(m)
        }
        GateName::Z => diagonal(&|k| 2.0 * PI * k as f64 / d),
        GateName::S => diagonal(&|k| PI * k as f64 / d),
        GateName::T => diagonal(&|k| PI * k as f64 / (2.0 * d)),
        GateName::Chrestenson => chrestenson(dim),
    }
}

/// Parses a gate by name, accepting `C<D>` shorthand such as `C4`.
pub fn parse_target(name: &str, dim: usize) -> Result<TransferMatrix> {
    if let Some(rest) = name.strip_prefix(['C', 'c']) {
        if let Ok(d) = rest.parse::<usize>() {
            if d != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: d,
                });
            }
            return chrestenson(d);
        }
    }
    named_target(name.parse()?, dim)
}
