//! Ray-Singer torsion of the cone (0, 1] x N with metric dx^2 + x^2 g_N.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};

use serde::Serialize;
use thiserror::Error;

use crate::basemanifold::{BaseError, BaseManifold};
use crate::besselzero::{self, BesselZeroError, ZeroKind, ZeroRequest};
use crate::exactpoly::{self, rat, rat_to_f64, ExactPolyError, Rational, RationalPolynomial};
use crate::modelops;
use crate::specfun::{self, SpecFunError, EULER_GAMMA, LN_2PI};
use crate::zetacont::{self, Descriptor, ZeroAsymptotics, ZetaError, ZetaFunctionData};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TorsionError {
    #[error("this formula needs a base of dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cone needs radius R > 0 and angle parameter nu >= 1 (got R = {radius}, nu = {nu})")]
    InvalidCone { radius: f64, nu: f64 },
    #[error("degree {k} is outside the range 0..={max} used by the torsion formula")]
    DegreeOutOfRange { k: usize, max: usize },
    #[error(transparent)]
    Base(#[from] BaseError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Poly(#[from] ExactPolyError),
    #[error(transparent)]
    Zeros(#[from] BesselZeroError),
    #[error(transparent)]
    Special(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, TorsionError>;

/// Parity of dim M = n + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of_base(n: usize) -> Self {
        if (n + 1) % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeTerm {
    pub zeta_k_prime0: f64,
    /// (-1)^k / 2, times delta_k in even parity
    pub weight: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorsionBreakdown {
    pub log_torsion: f64,
    pub harmonic_term: f64,
    pub per_degree: BTreeMap<usize, DegreeTerm>,
    pub parity: Parity,
    pub base: String,
    pub scale: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionOptions {
    pub tol: f64,
    /// delta_k at the middle degree k = (n-1)/2 of an even-dimensional cone
    pub middle_weight: f64,
}

impl Default for TorsionOptions {
    fn default() -> Self {
        Self { tol: 1e-8, middle_weight: 0.5 }
    }
}

/// alpha_k = (n-1)/2 - k as an exact rational.
pub fn alpha_exact(n: usize, k: usize) -> Rational {
    rat(n as i64 - 1 - 2 * k as i64, 2)
}

/// Degrees entering the torsion formula.
pub fn degree_range(n: usize) -> std::ops::Range<usize> {
    match Parity::of_base(n) {
        Parity::Odd => 0..n / 2,
        Parity::Even => 0..(n - 1) / 2 + 1,
    }
}

/// Zeta data of F_k with shifts +-alpha_k, exact when F_k is an arithmetic progression.
pub fn degree_zeta_data(base: &BaseManifold, k: usize, tol: f64) -> Result<ZetaFunctionData> {
    let nu = base.nu_set(k)?;
    let alphas = if nu.alpha == 0.0 { vec![0.0] } else { vec![nu.alpha, -nu.alpha] };
    let data = match nu.stream.descriptor() {
        Descriptor::ArithmeticProgression { .. } => zetacont::zeta_data_exact(&nu.stream, &alphas)?,
        _ => zetacont::zeta_data_numeric(&nu.stream, &nu.heat, &alphas, tol)?,
    };
    Ok(data)
}

fn shifted(data: &ZetaFunctionData, alpha: f64) -> f64 {
    data.shifted(alpha).unwrap_or(f64::NAN)
}

/// zeta_k'(0) assembled from the base zeta data and the exact D_r, M_r coefficients.
pub fn zeta_k_prime0_from_data(n: usize, k: usize, data: &ZetaFunctionData) -> Result<f64> {
    let table = exactpoly::olver_table();
    let a = alpha_exact(n, k);
    let neg_a = -a.clone();
    let af = rat_to_f64(&a);
    let parity = Parity::of_base(n);
    let mut total = match parity {
        Parity::Odd => shifted(data, af) - shifted(data, -af),
        Parity::Even => shifted(data, af) + shifted(data, -af),
    };
    for i in 1..=n {
        let res = data.residue(i);
        if res == 0.0 {
            continue;
        }
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        let ai = af.powi(i as i32);
        let bi = (-af).powi(i as i32);
        let comb = match parity {
            Parity::Odd => ai - bi,
            Parity::Even => ai + bi,
        };
        total += sign * comb / i as f64 * res * (0.5 * EULER_GAMMA + specfun::digamma(i as f64)?);
        let x = table.coeffs_x(i)?;
        let z = table.coeffs_z(i)?;
        let mut s = 0.0;
        for b in 0..=i {
            let zm = rat_to_f64(&z[b].eval(&neg_a));
            let zp = rat_to_f64(&z[b].eval(&a));
            let c = match parity {
                Parity::Odd => zm - zp,
                Parity::Even => 2.0 * rat_to_f64(&x[b]) - zm - zp,
            };
            s += c * specfun::digamma(b as f64 + i as f64 / 2.0)?;
        }
        total += 0.5 * res * s;
    }
    Ok(total)
}

pub fn zeta_k_prime0(base: &BaseManifold, k: usize, tol: f64) -> Result<(f64, f64)> {
    let range = degree_range(base.n);
    if !range.contains(&k) {
        return Err(TorsionError::DegreeOutOfRange { k, max: range.end.saturating_sub(1) });
    }
    let data = degree_zeta_data(base, k, tol)?;
    Ok((zeta_k_prime0_from_data(base.n, k, &data)?, data.error_estimate))
}

pub fn log_torsion(base: &BaseManifold) -> Result<TorsionBreakdown> {
    log_torsion_with(base, TorsionOptions::default())
}

pub fn log_torsion_with(base: &BaseManifold, opts: TorsionOptions) -> Result<TorsionBreakdown> {
    let n = base.n;
    let parity = Parity::of_base(n);
    let harmonic_term = modelops::harmonic_contribution(base);
    let mut per_degree = BTreeMap::new();
    let mut total = harmonic_term;
    let mut err = 0.0;
    for k in degree_range(n) {
        let (z, e) = zeta_k_prime0(base, k, opts.tol)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let delta = if parity == Parity::Even && 2 * k + 1 == n { opts.middle_weight } else { 1.0 };
        let weight = 0.5 * sign * delta;
        total += weight * z;
        err += weight.abs() * e;
        per_degree.insert(k, DegreeTerm { zeta_k_prime0: z, weight, error_estimate: e });
    }
    Ok(TorsionBreakdown {
        log_torsion: total,
        harmonic_term,
        per_degree,
        parity,
        base: base.id.clone(),
        scale: base.scale,
        error_estimate: err,
    })
}

fn require_dim(base: &BaseManifold, n: usize) -> Result<()> {
    if base.n != n {
        return Err(TorsionError::DimensionMismatch { expected: n, got: base.n });
    }
    Ok(())
}

/// log T for a two-dimensional cone: 1/2 b_0 log 2 + 1/2 zeta'(0) - 1/4 Res zeta(1).
pub fn corollary_2d(base: &BaseManifold) -> Result<f64> {
    require_dim(base, 1)?;
    let d = degree_zeta_data(base, 0, 1e-10)?;
    Ok(corollary_2d_from(base.betti[0] as f64, d.deriv0, d.residue(1)))
}

pub fn corollary_2d_from(b0: f64, deriv0: f64, res1: f64) -> f64 {
    0.5 * b0 * LN_2 + 0.5 * deriv0 - 0.25 * res1
}

/// Inputs of the three-dimensional formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeDimData {
    pub chi: f64,
    pub b0: f64,
    pub shifted_plus: f64,
    pub shifted_minus: f64,
    pub res1: f64,
    pub res2: f64,
}

impl ThreeDimData {
    pub fn from_base(base: &BaseManifold, tol: f64) -> Result<(Self, f64)> {
        require_dim(base, 2)?;
        let d = degree_zeta_data(base, 0, tol)?;
        Ok((
            Self {
                chi: base.euler_characteristic() as f64,
                b0: base.betti[0] as f64,
                shifted_plus: shifted(&d, 0.5),
                shifted_minus: shifted(&d, -0.5),
                res1: d.residue(1),
                res2: d.residue(2),
            },
            d.error_estimate,
        ))
    }

    /// Final form; the Res zeta(2) weight is the value the exact M_2 coefficients produce.
    pub fn final_form(&self) -> f64 {
        0.5 * LN_2 * self.chi - 0.5 * 3f64.ln() * self.b0 + 0.5 * self.shifted_plus - 0.5 * self.shifted_minus
            + 0.5 * LN_2 * self.res1
            + self.res2 / 8.0
    }

    /// Same value before the gamma terms cancel.
    pub fn pre_cancellation_form(&self) -> f64 {
        0.5 * LN_2 * self.chi - 0.5 * 3f64.ln() * self.b0 + 0.5 * self.shifted_plus - 0.5 * self.shifted_minus
            - 0.25 * EULER_GAMMA * self.res1
            + 0.25 * (self.res1 * (EULER_GAMMA + 2.0 * LN_2) + 0.5 * self.res2)
    }
}

pub fn corollary_3d(base: &BaseManifold, tol: f64) -> Result<f64> {
    Ok(ThreeDimData::from_base(base, tol)?.0.final_form())
}

/// Exact coefficient of Res zeta(2) in the three-dimensional torsion, from M_2.
pub fn res2_coefficient_3d() -> Result<Rational> {
    // weight 1/2, times 1/2 sum_b (z_{2,b}(-1/2) - z_{2,b}(1/2)) psi(b+1); the gamma parts cancel
    // since the z-differences sum to zero, leaving harmonic numbers H_b
    let z = exactpoly::olver_table().coeffs_z(2)?;
    let a = rat(1, 2);
    let harmonic = [rat(0, 1), rat(1, 1), rat(3, 2)];
    let mut gamma_part = rat(0, 1);
    let mut s = rat(0, 1);
    for b in 0..=2 {
        let dz = z[b].eval(&-a.clone()) - z[b].eval(&a);
        gamma_part += dz.clone();
        s += dz * harmonic[b].clone();
    }
    debug_assert_eq!(gamma_part, rat(0, 1));
    Ok(rat(1, 4) * s)
}

/// Coefficient of PP zeta(r) once the shifted-zeta expansion and the f_r Mellin terms are combined.
pub fn pp_coefficient(r: usize, parity: Parity) -> Result<RationalPolynomial> {
    let table = exactpoly::olver_table();
    let x = table.coeffs_x(r)?;
    let z = table.coeffs_z(r)?;
    let neg = |p: &RationalPolynomial| {
        let c = p.coeffs().iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() }).collect();
        RationalPolynomial::from_coeffs('a', c)
    };
    // from the relation to unshifted data: (-1)^{r+1} (a^r -+ (-a)^r) / r
    let from_shift = match parity {
        Parity::Odd => exactpoly::alpha_power_term(r, -1),
        Parity::Even => exactpoly::alpha_power_term(r, 1),
    };
    let mut from_f = RationalPolynomial::zero('a');
    for b in 0..=r {
        let term = match parity {
            Parity::Odd => &neg(&z[b]) - &z[b],
            Parity::Even => {
                let two_x = RationalPolynomial::constant('a', rat(2, 1) * x[b].clone());
                &(&two_x - &neg(&z[b])) - &z[b]
            }
        };
        from_f = &from_f + &term;
    }
    Ok(&from_shift + &from_f)
}

// ---------------------------------------------------------------- cone over S^1

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeOverS1Config {
    pub radius: f64,
    pub nu_angle: f64,
}

impl ConeOverS1Config {
    pub fn new(radius: f64, nu_angle: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && nu_angle >= 1.0 && nu_angle.is_finite()) {
            return Err(TorsionError::InvalidCone { radius, nu: nu_angle });
        }
        Ok(Self { radius, nu_angle })
    }
}

/// 2 log T = -log(pi R^2) + log nu - 1/nu.
pub fn theorem_main(cfg: ConeOverS1Config) -> f64 {
    let r = cfg.radius;
    let nu = cfg.nu_angle;
    0.5 * (-(PI * r * r).ln() + nu.ln() - 1.0 / nu)
}

/// K(R) = -1/2 log 2 pi - 3/2 log R + log 2.
pub fn lemma_first_summand(radius: f64) -> f64 {
    -0.5 * LN_2PI - 1.5 * radius.ln() + LN_2
}

/// zeta'(0) of {(j_{1,k}/R)^2} from `count` zeros; returns (value, error estimate).
pub fn lemma_first_summand_numeric(radius: f64, count: usize, tol: f64) -> Result<(f64, f64)> {
    let zeros = besselzero::zeros(ZeroRequest::new(1.0, ZeroKind::Dirichlet, count))?;
    let mu: Vec<f64> = zeros.zeros.iter().map(|j| j / radius).collect();
    let asym = ZeroAsymptotics::bessel(1.0, None).scaled(radius);
    let d = zetacont::zeta_data_zero_list(&mu, asym, &[], tol)?;
    Ok((d.deriv0, d.error_estimate))
}

/// z(0) = nu/24 + 1/(24 nu) - 1/8.
pub fn z_at_zero(nu_angle: f64) -> f64 {
    nu_angle / 24.0 + 1.0 / (24.0 * nu_angle) - 0.125
}

/// Evaluators for the objects of the small- and large-lambda analysis. They check the
/// closed forms and are not used when computing the torsion.
pub mod derivation {
    use nalgebra::{DMatrix, DVector};

    use super::{Parity, Result};
    use crate::exactpoly;
    use crate::specfun;

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct SpectralParameter {
        pub lambda: f64,
    }

    impl SpectralParameter {
        pub fn new(lambda: f64) -> Option<Self> {
            (lambda < 0.0 && lambda.is_finite()).then_some(Self { lambda })
        }

        pub fn z(&self) -> f64 {
            (-self.lambda).sqrt()
        }

        pub fn t(&self) -> f64 {
            1.0 / (1.0 - self.lambda).sqrt()
        }
    }

    fn alpha(n: usize, k: usize) -> f64 {
        (n as f64 - 1.0) / 2.0 - k as f64
    }

    /// t^k_nu(lambda), written with the ratio I'/I so that large nu z stays finite.
    pub fn t_nu_k(nu: f64, k: usize, n: usize, sp: SpectralParameter) -> Result<f64> {
        let a = alpha(n, k);
        let x = nu * sp.z();
        let w = x * specfun::bessel_i_ratio(nu, x)?;
        Ok(match Parity::of_base(n) {
            Parity::Odd => -(a + w).ln() + (-a + w).ln() + (a / nu).ln_1p() - (-a / nu).ln_1p(),
            Parity::Even => -(a + w).ln() - (-a + w).ln() + (a / nu).ln_1p() + (-a / nu).ln_1p() + 2.0 * nu.ln(),
        })
    }

    pub fn f_r(r: usize, k: usize, n: usize, sp: SpectralParameter) -> Result<f64> {
        let table = exactpoly::olver_table();
        let a = alpha(n, k);
        let t = sp.t();
        let m = table.m(r)?;
        let mm = m.eval_f64(t, -a);
        let mp = m.eval_f64(t, a);
        let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
        let ar = a.powi(r as i32);
        let br = (-a).powi(r as i32);
        Ok(match Parity::of_base(n) {
            Parity::Odd => mm - mp + sign * (ar - br) / r as f64,
            Parity::Even => -mm - mp + 2.0 * table.d(r)?.eval_f64(t) + sign * (ar + br) / r as f64,
        })
    }

    /// p_nu = t_nu - sum_{r <= n} f_r / nu^r.
    pub fn p_nu(nu: f64, k: usize, n: usize, sp: SpectralParameter) -> Result<f64> {
        let mut p = t_nu_k(nu, k, n, sp)?;
        for r in 1..=n {
            p -= f_r(r, k, n, sp)? / nu.powi(r as i32);
        }
        Ok(p)
    }

    /// Predicted large-lambda coefficients (a, b) of p_nu ~ a log(-lambda) + b.
    pub fn ab_expected(nu: f64, k: usize, n: usize) -> (f64, f64) {
        let a = alpha(n, k);
        let mut s = 0.0;
        let odd = Parity::of_base(n) == Parity::Odd;
        for r in 1..=n {
            let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
            let comb = if odd { a.powi(r as i32) - (-a).powi(r as i32) } else { a.powi(r as i32) + (-a).powi(r as i32) };
            s += sign * comb / (r as f64 * nu.powi(r as i32));
        }
        if odd {
            (0.0, (a / nu).ln_1p() - (-a / nu).ln_1p() - s)
        } else {
            (-1.0, (a / nu).ln_1p() + (-a / nu).ln_1p() - s)
        }
    }

    /// Least-squares fit of p = a log(-l) + b + c1 (-l)^{-1/2} + c2 (-l)^{-1} over [l_min, l_max] (negative).
    pub fn fit_ab(nu: f64, k: usize, n: usize, l_min: f64, l_max: f64, samples: usize) -> Result<(f64, f64)> {
        let (lo, hi) = ((-l_max).ln(), (-l_min).ln());
        let mut rows = Vec::with_capacity(samples * 4);
        let mut y = Vec::with_capacity(samples);
        for j in 0..samples {
            let u = lo + (hi - lo) * j as f64 / (samples - 1) as f64;
            let l = -u.exp();
            let sp = SpectralParameter { lambda: l };
            y.push(p_nu(nu, k, n, sp)?);
            rows.extend([u, 1.0, (-l).powf(-0.5), 1.0 / (-l)]);
        }
        let a = DMatrix::from_row_slice(samples, 4, &rows);
        let sol = a
            .svd(true, true)
            .solve(&DVector::from_vec(y), 1e-15)
            .map_err(|_| specfun::SpecFunError::NoConvergence { func: "fit_ab", arg: nu })?;
        Ok((sol[0], sol[1]))
    }
}
