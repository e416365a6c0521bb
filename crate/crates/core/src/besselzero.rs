//! Positive zeros of J_nu, J'_nu and of the mixed combination a J_nu(z) + z J'_nu(z).

use std::f64::consts::PI;

use thiserror::Error;

use crate::specfun::{self, SpecFunError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZeroKind {
    /// zeros of J_nu
    Dirichlet,
    /// zeros of J'_nu (z = 0 excluded)
    Neumann,
    /// zeros of a J_nu(z) + z J'_nu(z); `f64::INFINITY` is the Dirichlet alias
    Mixed(f64),
}

impl ZeroKind {
    fn normalized(self) -> Self {
        match self {
            ZeroKind::Mixed(a) if a == f64::INFINITY => ZeroKind::Dirichlet,
            k => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BesselZeroError {
    #[error("Bessel order must be finite and >= 0, got {0}")]
    InvalidOrder(f64),
    #[error("mixed parameter alpha = {alpha} needs alpha^2 < nu^2 (nu = {nu}) for real simple zeros")]
    InvalidAlpha { alpha: f64, nu: f64 },
    #[error("zero count must be positive")]
    EmptyRequest,
    #[error("root refinement failed near zero #{index}")]
    Convergence { index: usize },
    #[error(transparent)]
    Special(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, BesselZeroError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRequest {
    pub nu: f64,
    pub kind: ZeroKind,
    pub count: usize,
}

impl ZeroRequest {
    pub fn new(nu: f64, kind: ZeroKind, count: usize) -> Self {
        Self { nu, kind, count }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return Err(BesselZeroError::InvalidOrder(self.nu));
        }
        if self.count == 0 {
            return Err(BesselZeroError::EmptyRequest);
        }
        if let ZeroKind::Mixed(a) = self.kind.normalized() {
            if a.is_nan() || a * a >= self.nu * self.nu {
                return Err(BesselZeroError::InvalidAlpha { alpha: a, nu: self.nu });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    pub zeros: Vec<f64>,
    /// |f(z_i)|
    pub residuals: Vec<f64>,
    /// f'(z_i)
    pub slopes: Vec<f64>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }
}

/// f and f' for the requested kind.
pub fn eval_kind(nu: f64, kind: ZeroKind, x: f64) -> Result<(f64, f64)> {
    let (j, jp) = specfun::bessel_j_pair(nu, x)?;
    let jpp = -jp / x - (1.0 - nu * nu / (x * x)) * j;
    Ok(match kind.normalized() {
        ZeroKind::Dirichlet => (j, jp),
        ZeroKind::Neumann => (jp, jpp),
        ZeroKind::Mixed(a) => (a * j + x * jp, a * jp - (x - nu * nu / x) * j),
    })
}

/// McMahon-type asymptotic estimate of the i-th zero (i >= 1).
pub fn mcmahon_guess(nu: f64, kind: ZeroKind, i: usize) -> f64 {
    let m = 4.0 * nu * nu;
    match kind.normalized() {
        ZeroKind::Dirichlet => {
            let b = (i as f64 + 0.5 * nu - 0.25) * PI;
            b - (m - 1.0) / (8.0 * b) - 4.0 * (m - 1.0) * (7.0 * m - 31.0) / (3.0 * (8.0 * b).powi(3))
        }
        ZeroKind::Neumann => {
            // for nu = 0 the zero at the origin is not counted
            let idx = if nu == 0.0 { i + 1 } else { i } as f64;
            let b = (idx + 0.5 * nu - 0.75) * PI;
            b - (m + 3.0) / (8.0 * b) - 4.0 * (7.0 * m * m + 82.0 * m - 9.0) / (3.0 * (8.0 * b).powi(3))
        }
        ZeroKind::Mixed(a) => {
            let b = (i as f64 + 0.5 * nu - 0.75) * PI;
            let c = a - (m + 3.0) / 8.0;
            // b + c/b, softened so the sequence stays increasing for small b
            b + c * b / (b * b + c.abs())
        }
    }
}

fn refine(nu: f64, kind: ZeroKind, mut lo: f64, mut hi: f64, seed: f64, index: usize) -> Result<(f64, f64, f64)> {
    let (mut flo, _) = eval_kind(nu, kind, lo)?;
    let (fhi, _) = eval_kind(nu, kind, hi)?;
    if flo == 0.0 {
        let (_, d) = eval_kind(nu, kind, lo)?;
        return Ok((lo, 0.0, d));
    }
    if fhi == 0.0 {
        let (_, d) = eval_kind(nu, kind, hi)?;
        return Ok((hi, 0.0, d));
    }
    if flo.signum() == fhi.signum() {
        return Err(BesselZeroError::Convergence { index });
    }
    let mut x = if seed > lo && seed < hi { seed } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (f, d) = eval_kind(nu, kind, x)?;
        if f == 0.0 {
            return Ok((x, 0.0, d));
        }
        if f.signum() == flo.signum() {
            lo = x;
            flo = f;
        } else {
            hi = x;
        }
        let newton = x - f / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - x).abs();
        x = next;
        if step <= 1e-14 * x || hi - lo <= 1e-15 * x {
            let (f, d) = eval_kind(nu, kind, x)?;
            return Ok((x, f.abs(), d));
        }
    }
    Err(BesselZeroError::Convergence { index })
}

// first `count` zeros of J_nu
fn dirichlet_zeros(nu: f64, count: usize) -> Result<ZeroList> {
    let kind = ZeroKind::Dirichlet;
    let mut out = ZeroList { zeros: Vec::with_capacity(count), residuals: Vec::new(), slopes: Vec::new() };
    // no zeros of J_nu below nu
    let mut x = nu.max(0.5);
    let step = 0.5;
    let (mut fx, _) = eval_kind(nu, kind, x)?;
    while out.zeros.len() < count {
        let i = out.zeros.len() + 1;
        let n = out.zeros.len();
        if n >= 2 {
            let pred = 2.0 * out.zeros[n - 1] - out.zeros[n - 2];
            let a = pred - 0.4;
            let b = pred + 0.4;
            let (fa, _) = eval_kind(nu, kind, a)?;
            let (fb, _) = eval_kind(nu, kind, b)?;
            if fa.signum() != fb.signum() && a > out.zeros[n - 1] {
                let (z, r, d) = refine(nu, kind, a, b, mcmahon_guess(nu, kind, i), i)?;
                out.zeros.push(z);
                out.residuals.push(r);
                out.slopes.push(d);
                x = b;
                fx = fb;
                continue;
            }
        }
        let (xn, fxn) = {
            let xn = x + step;
            (xn, eval_kind(nu, kind, xn)?.0)
        };
        if fx.signum() != fxn.signum() || fxn == 0.0 {
            let (z, r, d) = refine(nu, kind, x, xn, mcmahon_guess(nu, kind, i), i)?;
            out.zeros.push(z);
            out.residuals.push(r);
            out.slopes.push(d);
        }
        x = xn;
        fx = fxn;
    }
    Ok(out)
}

// zeros of a J + z J' bracketed by consecutive zeros of J_nu; requires a + nu > 0
fn interlaced_zeros(nu: f64, kind: ZeroKind, count: usize) -> Result<ZeroList> {
    let dz = dirichlet_zeros(nu, count + 1)?;
    let mut out = ZeroList { zeros: Vec::with_capacity(count), residuals: Vec::new(), slopes: Vec::new() };
    let neumann_origin = matches!(kind, ZeroKind::Neumann) && nu == 0.0;
    for i in 0..count {
        let (lo, hi) = if neumann_origin {
            (dz.zeros[i], dz.zeros[i + 1])
        } else if i == 0 {
            // f ~ (a + nu) J_nu near the origin; step in until it is resolvable
            let mut lo = dz.zeros[0] * 1e-3;
            while eval_kind(nu, kind, lo)?.0 == 0.0 {
                lo *= 2.0;
            }
            (lo, dz.zeros[0])
        } else {
            (dz.zeros[i - 1], dz.zeros[i])
        };
        let (z, r, d) = refine(nu, kind, lo, hi, mcmahon_guess(nu, kind, i + 1), i + 1)?;
        out.zeros.push(z);
        out.residuals.push(r);
        out.slopes.push(d);
    }
    Ok(out)
}

/// First `count` positive zeros.
pub fn zeros(req: ZeroRequest) -> Result<ZeroList> {
    req.validate()?;
    compute(req.nu, req.kind.normalized(), req.count)
}

/// Zeros of a J_nu + z J'_nu for any a > -nu, including the boundary a^2 >= nu^2.
///
/// The shift identity a J_nu + z J'_nu = z J_{nu-1} at a = nu lives here.
pub fn zeros_mixed_extended(nu: f64, alpha: f64, count: usize) -> Result<ZeroList> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(BesselZeroError::InvalidOrder(nu));
    }
    if count == 0 {
        return Err(BesselZeroError::EmptyRequest);
    }
    if alpha == f64::INFINITY {
        return dirichlet_zeros(nu, count);
    }
    if !(alpha + nu > 0.0) {
        return Err(BesselZeroError::InvalidAlpha { alpha, nu });
    }
    interlaced_zeros(nu, ZeroKind::Mixed(alpha), count)
}

fn compute(nu: f64, kind: ZeroKind, count: usize) -> Result<ZeroList> {
    match kind {
        ZeroKind::Dirichlet => dirichlet_zeros(nu, count),
        k => interlaced_zeros(nu, k, count),
    }
}
