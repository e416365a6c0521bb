//! Base manifolds N of the cone and their coclosed spectra.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::specfun;
use crate::zetacont::{self, Eigen, EigenSource, HeatCoefficients, HeatRemainder, SpectrumStream, ZetaOrder};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaseError {
    #[error("base eigenvalues must exceed 1, cf. scaling assumption (smallest is {min})")]
    ScalingViolation { min: f64 },
    #[error("degenerate lattice: basis vectors are linearly dependent")]
    DegenerateLattice,
    #[error("lattice needs {expected} basis vectors of length {expected}")]
    LatticeShape { expected: usize },
    #[error("Betti numbers {betti:?} violate Poincare duality b_k = b_(n-k)")]
    Duality { betti: Vec<u64> },
    #[error("base manifold must be orientable")]
    NotOrientable,
    #[error("degree {k} out of range 0..={max}")]
    DegreeOutOfRange { k: usize, max: usize },
    #[error("no coclosed spectrum supplied for degree {0}")]
    MissingDegree(usize),
    #[error("spectrum file schema error: {0}")]
    Schema(String),
    #[error("cannot read spectrum file: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, BaseError>;

/// Nonzero coclosed spectrum of one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSpectrum {
    pub k: usize,
    pub stream: SpectrumStream,
    pub heat: HeatCoefficients,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseManifold {
    pub id: String,
    pub n: usize,
    pub betti: Vec<u64>,
    pub scale: f64,
    pub orientable: bool,
    degrees: Vec<DegreeSpectrum>,
}

/// Shifted frequencies `nu = sqrt(eta + (k + 1/2 - n/2)^2)` of one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct NuSet {
    pub k: usize,
    pub alpha: f64,
    pub stream: SpectrumStream,
    /// heat coefficients of the unshifted eta spectrum
    pub heat: HeatCoefficients,
}

impl NuSet {
    pub fn min_nu(&self) -> f64 {
        self.stream.min_value().unwrap_or(f64::NAN)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}

impl BaseManifold {
    /// Circle of length 2 pi / c.
    pub fn circle(c: f64) -> Result<Self> {
        let b = Self::circle_unchecked(c);
        b.validate()?;
        Ok(b)
    }

    /// Circle without the scaling check, for the boundary case c = 1.
    pub fn circle_unchecked(c: f64) -> Self {
        let stream = SpectrumStream::new(EigenSource::SquaredProgression { step: c, mult: 2 }, 0.0, ZetaOrder::Linear);
        let heat = HeatCoefficients::new(1, vec![PI.sqrt() / c, -1.0], HeatRemainder::Exponential);
        Self {
            id: "s1".into(),
            n: 1,
            betti: vec![1, 1],
            scale: c,
            orientable: true,
            degrees: vec![DegreeSpectrum { k: 0, stream, heat }],
        }
    }

    /// Flat 2-torus R^2 / lattice with metric scaled by c^-2.
    pub fn torus2(c: f64, lattice: [[f64; 2]; 2]) -> Result<Self> {
        Self::torus(c, lattice.iter().map(|v| v.to_vec()).collect())
    }

    /// Square torus of side 2 pi / c.
    pub fn square_torus2(c: f64) -> Result<Self> {
        Self::torus2(c, [[2.0 * PI, 0.0], [0.0, 2.0 * PI]])
    }

    /// Flat n-torus R^n / lattice with metric scaled by c^-2.
    pub fn torus(c: f64, basis: Vec<Vec<f64>>) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|v| v.len() != n) {
            return Err(BaseError::LatticeShape { expected: n.max(1) });
        }
        let det = zetacont::determinant(&basis);
        if !(det.abs() > 1e-12) || zetacont::dual_basis(&basis).is_none() {
            return Err(BaseError::DegenerateLattice);
        }
        let vol = det.abs() / c.powi(n as i32);
        let lead = vol / (4.0 * PI).powf(n as f64 / 2.0);
        let degrees = (0..n)
            .map(|k| {
                let m = binomial(n - 1, k);
                let mut coeffs = vec![0.0; n + 1];
                coeffs[0] = m as f64 * lead;
                coeffs[n] = -(m as f64);
                DegreeSpectrum {
                    k,
                    stream: SpectrumStream::new(
                        EigenSource::Lattice { basis: basis.clone(), scale: c, mult: m },
                        0.0,
                        ZetaOrder::Linear,
                    ),
                    heat: HeatCoefficients::new(n, coeffs, HeatRemainder::Exponential),
                }
            })
            .collect();
        let b = Self {
            id: format!("torus{n}"),
            n,
            betti: (0..=n).map(|k| binomial(n, k)).collect(),
            scale: c,
            orientable: true,
            degrees,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BaseError::Io(e.to_string()))?;
        let mut b = Self::from_json(&text)?;
        b.id = format!("custom:{}", path.display());
        Ok(b)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpectrumFile = serde_json::from_str(text).map_err(|e| BaseError::Schema(e.to_string()))?;
        file.into_base()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn degree(&self, k: usize) -> Result<&DegreeSpectrum> {
        if k >= self.n {
            return Err(BaseError::DegreeOutOfRange { k, max: self.n.saturating_sub(1) });
        }
        self.degrees.iter().find(|d| d.k == k).ok_or(BaseError::MissingDegree(k))
    }

    pub fn coclosed_spectrum(&self, k: usize) -> Result<&SpectrumStream> {
        Ok(&self.degree(k)?.stream)
    }

    pub fn heat(&self, k: usize) -> Result<&HeatCoefficients> {
        Ok(&self.degree(k)?.heat)
    }

    pub fn alpha(&self, k: usize) -> f64 {
        (self.n as f64 - 1.0) / 2.0 - k as f64
    }

    pub fn nu_set(&self, k: usize) -> Result<NuSet> {
        let d = self.degree(k)?;
        let a = k as f64 + 0.5 - self.n as f64 / 2.0;
        let mut stream = d.stream.clone();
        stream.shift += a * a;
        stream.order = ZetaOrder::Root;
        Ok(NuSet { k, alpha: self.alpha(k), stream, heat: d.heat.clone() })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.orientable {
            return Err(BaseError::NotOrientable);
        }
        let n = self.n;
        if self.betti.len() != n + 1 || (0..=n).any(|k| self.betti[k] != self.betti[n - k]) {
            return Err(BaseError::Duality { betti: self.betti.clone() });
        }
        for d in &self.degrees {
            let min = d.stream.min_eigenvalue().unwrap_or(f64::NAN);
            // values within rounding of 1 count as the boundary case
            if !(min > 1.0 + 1e-12) {
                return Err(BaseError::ScalingViolation { min });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumFile {
    dim: usize,
    betti: Vec<u64>,
    scale: f64,
    degrees: Vec<DegreeEntry>,
    #[serde(default)]
    #[allow(dead_code)]
    truncation_note: Option<String>,
    #[serde(default = "default_true")]
    orientable: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DegreeEntry {
    k: usize,
    eigenvalues: Vec<EigenEntry>,
    heat_coeffs: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EigenEntry {
    value: f64,
    mult: u64,
}

impl SpectrumFile {
    fn into_base(self) -> Result<BaseManifold> {
        if self.dim == 0 {
            return Err(BaseError::Schema("dim must be positive".into()));
        }
        if !(self.scale > 0.0) {
            return Err(BaseError::Schema("scale must be positive".into()));
        }
        let mut degrees = Vec::new();
        for d in self.degrees {
            if d.k >= self.dim {
                return Err(BaseError::Schema(format!("degree {} out of range for dim {}", d.k, self.dim)));
            }
            if degrees.iter().any(|x: &DegreeSpectrum| x.k == d.k) {
                return Err(BaseError::Schema(format!("degree {} listed twice", d.k)));
            }
            if d.eigenvalues.is_empty() {
                return Err(BaseError::Schema(format!("degree {}: no eigenvalues", d.k)));
            }
            if d.eigenvalues.iter().any(|e| e.mult == 0 || !e.value.is_finite()) {
                return Err(BaseError::Schema(format!("degree {}: multiplicities must be positive", d.k)));
            }
            if d.eigenvalues.windows(2).any(|w| w[1].value <= w[0].value) {
                return Err(BaseError::Schema(format!("degree {}: eigenvalues must be strictly increasing", d.k)));
            }
            if d.heat_coeffs.is_empty() {
                return Err(BaseError::Schema(format!("degree {}: heat_coeffs must not be empty", d.k)));
            }
            let list = d.eigenvalues.iter().map(|e| Eigen { value: e.value, mult: e.mult }).collect();
            degrees.push(DegreeSpectrum {
                k: d.k,
                stream: SpectrumStream::new(EigenSource::Explicit(list), 0.0, ZetaOrder::Linear),
                heat: HeatCoefficients::truncated(self.dim, d.heat_coeffs),
            });
        }
        let b = BaseManifold {
            id: "custom".into(),
            n: self.dim,
            betti: self.betti,
            scale: self.scale,
            orientable: self.orientable,
            degrees,
        };
        b.validate()?;
        Ok(b)
    }
}

/// Number of eigenvalues (with multiplicity) up to `lambda`.
pub fn counting_function(stream: &SpectrumStream, lambda: f64) -> u64 {
    stream.eigenvalues_upto(lambda).iter().map(|e| e.mult).sum()
}

/// Leading Weyl term of the counting function from the heat coefficients.
pub fn weyl_estimate(heat: &HeatCoefficients, lambda: f64) -> f64 {
    let a = heat.dim as f64 / 2.0;
    heat.coeffs[0] * lambda.powf(a) / specfun::gamma(a + 1.0).unwrap_or(f64::NAN)
}
