//! The radial model operator L_nu(alpha) = -d^2/dx^2 + (nu^2 - 1/4)/x^2 on (0, 1].
//!
//! At x = 1 the boundary condition is Dirichlet (alpha = infinity) or
//! `(alpha - 1/2)^{-1} f'(1) + f(1) = 0`, so the spectrum is the squared positive
//! zeros of `alpha J_nu(z) + z J'_nu(z)`.

use std::f64::consts::LN_2;

use serde::Serialize;
use thiserror::Error;

use crate::basemanifold::BaseManifold;
use crate::besselzero::{self, BesselZeroError, ZeroKind, ZeroRequest};
use crate::specfun::{self, SpecFunError, LN_2PI};
use crate::zetacont::{self, ZeroAsymptotics, ZetaError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("model operator needs nu >= 0 (Dirichlet) or nu > 1 (mixed), got nu = {0}")]
    InvalidOrder(f64),
    #[error("mixed boundary parameter alpha = {alpha} needs alpha^2 < nu^2 = {nu2}")]
    InvalidAlpha { alpha: f64, nu2: f64 },
    #[error("determinant is singular for alpha + nu = 0")]
    Singular,
    #[error("numeric determinant needs tol >= 1e-8, got {0:e}")]
    Tolerance(f64),
    #[error(transparent)]
    Zeros(#[from] BesselZeroError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Special(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOperator {
    pub nu: f64,
    /// `f64::INFINITY` for Dirichlet
    pub alpha: f64,
    extended: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetSource {
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantValue {
    pub log_det: f64,
    pub source: DetSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl ModelOperator {
    pub fn new(nu: f64, alpha: f64) -> Result<Self> {
        let op = Self { nu, alpha, extended: false };
        op.validate()?;
        Ok(op)
    }

    pub fn dirichlet(nu: f64) -> Result<Self> {
        Self::new(nu, f64::INFINITY)
    }

    /// Mixed operator that only needs alpha + nu > 0, e.g. L_{nu+1}(nu+1).
    pub fn boundary(nu: f64, alpha: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(ModelError::InvalidOrder(nu));
        }
        if !(alpha + nu > 0.0) {
            return Err(ModelError::InvalidAlpha { alpha, nu2: nu * nu });
        }
        Ok(Self { nu, alpha, extended: true })
    }

    pub fn is_dirichlet(&self) -> bool {
        self.alpha == f64::INFINITY
    }

    fn validate(&self) -> Result<()> {
        let nu = self.nu;
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(ModelError::InvalidOrder(nu));
        }
        if self.is_dirichlet() {
            return Ok(());
        }
        if nu <= 1.0 {
            return Err(ModelError::InvalidOrder(nu));
        }
        if self.alpha.is_nan() || self.alpha * self.alpha >= nu * nu {
            return Err(ModelError::InvalidAlpha { alpha: self.alpha, nu2: nu * nu });
        }
        Ok(())
    }

    /// Square roots of the first `count` eigenvalues.
    pub fn frequencies(&self, count: usize) -> Result<Vec<f64>> {
        let list = if self.extended {
            besselzero::zeros_mixed_extended(self.nu, self.alpha, count)?
        } else {
            let kind = if self.is_dirichlet() { ZeroKind::Dirichlet } else { ZeroKind::Mixed(self.alpha) };
            besselzero::zeros(ZeroRequest::new(self.nu, kind, count))?
        };
        Ok(list.zeros)
    }

    /// First `count` eigenvalues mu^2.
    pub fn spectrum(&self, count: usize) -> Result<Vec<f64>> {
        Ok(self.frequencies(count)?.into_iter().map(|m| m * m).collect())
    }

    /// log det from the Bessel product formula.
    pub fn det_closed(&self) -> Result<DeterminantValue> {
        let nu = self.nu;
        let base = 0.5 * LN_2PI - nu * LN_2 - specfun::ln_gamma(1.0 + nu)?;
        let log_det = if self.is_dirichlet() {
            base
        } else {
            let s = self.alpha + nu;
            if s == 0.0 {
                return Err(ModelError::Singular);
            }
            base + s.abs().ln()
        };
        Ok(DeterminantValue { log_det, source: DetSource::ClosedForm, error_estimate: None })
    }

    /// log det = -zeta'(0) from 2000 Bessel zeros and their index asymptotics.
    pub fn det_numeric(&self, tol: f64) -> Result<DeterminantValue> {
        if !(tol >= 1e-8) {
            return Err(ModelError::Tolerance(tol));
        }
        let count = if tol >= 1e-6 { 500 } else { 2000 };
        let mu = self.frequencies(count)?;
        let asym = ZeroAsymptotics::bessel(self.nu, if self.is_dirichlet() { None } else { Some(self.alpha) });
        let data = zetacont::zeta_data_zero_list(&mu, asym, &[], tol)?;
        Ok(DeterminantValue {
            log_det: -data.deriv0,
            source: DetSource::Numeric,
            error_estimate: Some(data.error_estimate),
        })
    }
}

/// T(L_{k+1/2}(infinity)) = log 2 - sum_{l=0}^{k} log(2l+1).
pub fn t_half_integer(k: u32) -> f64 {
    LN_2 - (0..=k).map(|l| (2.0 * l as f64 + 1.0).ln()).sum::<f64>()
}

/// Contribution of the harmonic forms on the base, closed form by parity of dim M.
pub fn harmonic_contribution(base: &BaseManifold) -> f64 {
    let n = base.n;
    let b = |k: usize| base.betti.get(k).copied().unwrap_or(0) as f64;
    let sign = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let ln_odd = |j: usize| (2.0 * j as f64 + 1.0).ln();
    if (n + 1) % 2 == 1 {
        let mut s = 0.5 * LN_2 * base.euler_characteristic() as f64;
        for k in 0..n / 2 {
            let inner: f64 = (0..n / 2 - k).map(ln_odd).sum();
            s -= sign(k) * b(k) * inner;
            s -= 0.5 * sign(k) * b(k) * ((n - 2 * k + 1) as f64).ln();
        }
        s
    } else {
        (0..=(n - 1) / 2).map(|k| 0.5 * sign(k) * b(k) * ((n - 2 * k + 1) as f64).ln()).sum()
    }
}

/// Same quantity from the determinants: 1/2 sum_k (-1)^k b_k T(L_{|k-(n-1)/2|}(infinity)).
pub fn harmonic_contribution_from_determinants(base: &BaseManifold) -> Result<f64> {
    let n = base.n as f64;
    let mut s = 0.0;
    for (k, &bk) in base.betti.iter().enumerate() {
        let nu = (k as f64 - (n - 1.0) / 2.0).abs();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s += 0.5 * sign * bk as f64 * ModelOperator::dirichlet(nu)?.det_closed()?.log_det;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_dirichlet_spectrum() {
        let op = ModelOperator::dirichlet(0.5).unwrap();
        let s = op.spectrum(3).unwrap();
        for (k, v) in s.iter().enumerate() {
            let want = ((k + 1) as f64 * PI).powi(2);
            assert!((v - want).abs() < 1e-11 * want);
        }
    }

    #[test]
    fn neumann_realization_at_alpha_zero() {
        let op = ModelOperator::new(2.0, 0.0).unwrap();
        let s = op.frequencies(3).unwrap();
        // zeros of J'_2
        let want = [3.054_236_928_227_140, 6.706_133_194_158_46, 9.969_467_823_087_596];
        for (g, w) in s.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{g} {w}");
        }
        assert!(op.spectrum(50).unwrap().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn validation() {
        assert!(matches!(ModelOperator::new(0.8, 0.1), Err(ModelError::InvalidOrder(_))));
        assert!(matches!(ModelOperator::new(2.0, 2.0), Err(ModelError::InvalidAlpha { .. })));
        assert!(ModelOperator::boundary(2.0, 2.0).is_ok());
        assert!(ModelOperator::boundary(1.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_values() {
        let d = ModelOperator::dirichlet(0.5).unwrap().det_closed().unwrap();
        assert!((d.log_det - LN_2).abs() < 1e-14);
        let m = ModelOperator::new(1.5, 0.0).unwrap().det_closed().unwrap().log_det;
        let want = 0.5 * LN_2PI + 1.5f64.ln() - 1.5 * LN_2 - specfun::ln_gamma(2.5).unwrap();
        assert!((m - want).abs() < 1e-14);
    }

    #[test]
    fn shifted_boundary_relation_on_grid() {
        for nu in [1.5, 2.0, 2.5, 4.0, 7.25] {
            let t_inf = ModelOperator::dirichlet(nu).unwrap().det_closed().unwrap().log_det;
            for alpha in [-1.0, -0.5, 0.0, 0.3, 1.0] {
                let t = ModelOperator::new(nu, alpha).unwrap().det_closed().unwrap().log_det;
                assert!((t_inf - (t - (alpha + nu).ln())).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn half_integer_chain() {
        assert!((t_half_integer(0) - LN_2).abs() < 1e-15);
        assert!((t_half_integer(1) - (LN_2 - 3f64.ln())).abs() < 1e-15);
        // T(L_{nu+1}) = T(L_nu) - log(2 nu + 2), started at nu = 1/2
        let mut t = ModelOperator::dirichlet(0.5).unwrap().det_closed().unwrap().log_det;
        for k in 1..8u32 {
            let nu = k as f64 - 0.5;
            t -= (2.0 * nu + 2.0).ln();
            assert!((t - t_half_integer(k)).abs() < 1e-13);
            let direct = ModelOperator::dirichlet(k as f64 + 0.5).unwrap().det_closed().unwrap().log_det;
            assert!((direct - t_half_integer(k)).abs() < 1e-12);
        }
    }

    #[test]
    fn numeric_half_order() {
        let d = ModelOperator::dirichlet(0.5).unwrap().det_numeric(1e-8).unwrap();
        assert_eq!(d.source, DetSource::Numeric);
        assert!((d.log_det - LN_2).abs() < 1e-8);
    }

    #[test]
    fn numeric_matches_closed_spot_checks() {
        for (nu, alpha) in [(2.5, 1.0), (3.0, f64::INFINITY)] {
            let op = ModelOperator::new(nu, alpha).unwrap();
            let n = op.det_numeric(1e-8).unwrap();
            let c = op.det_closed().unwrap();
            assert!((n.log_det - c.log_det).abs() < 1e-7, "nu={nu} alpha={alpha}: {} vs {}", n.log_det, c.log_det);
        }
    }

    #[test]
    fn bessel_product_identity() {
        for (nu, alpha) in [(1.5, 0.0), (2.5, 1.0), (4.0, -1.0)] {
            let op = ModelOperator::new(nu, alpha).unwrap();
            let j = op.frequencies(200).unwrap();
            for z in [0.5, 1.0, 2.0] {
                let lhs = specfun::ln_bessel_i(nu, z).unwrap() + (alpha + z * specfun::bessel_i_ratio(nu, z).unwrap()).ln();
                let mut rhs = nu * (z / 2.0).ln() - specfun::ln_gamma(nu).unwrap() + (1.0 + alpha / nu).ln();
                rhs += j.iter().map(|m| (z * z / (m * m)).ln_1p()).sum::<f64>();
                // remaining factors lie in [1, exp(z^2 sum_{i>200} j_i^-2)]
                let bound = z * z / (PI * (j[199] - PI));
                let gap = lhs - rhs;
                assert!(gap >= -1e-12 && gap <= bound, "nu={nu} z={z} gap={gap} bound={bound}");
            }
        }
    }

    #[test]
    fn harmonic_closed_forms() {
        let c = BaseManifold::circle(2.0).unwrap();
        assert_eq!(harmonic_contribution(&c), 0.5 * LN_2);
        let t = BaseManifold::square_torus2(2.0).unwrap();
        assert!((harmonic_contribution(&t) + 0.5 * 3f64.ln()).abs() < 1e-15);
        for b in [c, t] {
            let raw = harmonic_contribution_from_determinants(&b).unwrap();
            assert!((raw - harmonic_contribution(&b)).abs() < 1e-13);
        }
        let t3 = BaseManifold::torus(2.0, vec![vec![2.0 * PI, 0.0, 0.0], vec![0.0, 2.0 * PI, 0.0], vec![0.0, 0.0, 2.0 * PI]]).unwrap();
        let raw = harmonic_contribution_from_determinants(&t3).unwrap();
        assert!((raw - harmonic_contribution(&t3)).abs() < 1e-13);
    }

    #[test]
    fn harmonic_vanishes_without_cohomology() {
        let mut b = BaseManifold::circle(2.0).unwrap();
        b.betti = vec![0, 0];
        assert_eq!(harmonic_contribution(&b), 0.0);
    }
}
