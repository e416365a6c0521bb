//! Spectral zeta continuation.
//!
//! Streams carry heat-operator eigenvalues `lambda` with multiplicities. The zeta
//! function of a stream is `sum lambda^{-s}` ([`ZetaOrder::Linear`]) or
//! `sum lambda^{-s/2}` ([`ZetaOrder::Root`]); the values raised to `-s` are the
//! stream *values* `v`.
//!
//! Two numerical engines are provided:
//!
//! * [`zeta_data_numeric`] splits the Mellin transform of the heat trace at `t = 1`.
//!   Large `t` is an incomplete-gamma sum over eigenvalues, small `t` uses the
//!   supplied heat coefficients and integrates the empirical remainder.
//! * [`zeta_data_zero_list`] handles explicit Bessel-zero lists whose index
//!   asymptotics `mu_i ~ omega (i + delta) + c1 / (omega (i + delta))` are known.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::specfun::{self, NeumaierSum, SpecFunError, EULER_GAMMA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("insufficient spectrum: estimated error {estimate:e} exceeds tolerance {tol:e}")]
    InsufficientSpectrum { estimate: f64, tol: f64 },
    #[error("inconsistent heat coefficients: {0}")]
    InconsistentHeat(String),
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("shift {alpha} too large: it must stay below the smallest value {min_value}")]
    ShiftTooLarge { alpha: f64, min_value: f64 },
    #[error("shifted derivative paths disagree: relation {relation}, direct {direct}")]
    ShiftMismatch { relation: f64, direct: f64 },
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error(transparent)]
    Special(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, ZetaError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigen {
    pub value: f64,
    pub mult: u64,
}

/// Sort and merge values equal to within 1e-12 (relative), summing multiplicities.
pub fn merge_ties(mut list: Vec<Eigen>) -> Vec<Eigen> {
    list.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Eigen> = Vec::with_capacity(list.len());
    for e in list {
        match out.last_mut() {
            Some(last) if (e.value - last.value).abs() <= 1e-12 * last.value.abs().max(1.0) => {
                last.mult += e.mult
            }
            _ => out.push(e),
        }
    }
    out
}

/// Generator of heat-operator eigenvalues (before shift).
#[derive(Debug, Clone, PartialEq)]
pub enum EigenSource {
    /// `(step k)^2`, k >= 1
    SquaredProgression { step: f64, mult: u64 },
    /// `(2 pi scale)^2 |xi|^2` for nonzero xi in the dual of the lattice spanned by `basis`
    Lattice { basis: Vec<Vec<f64>>, scale: f64, mult: u64 },
    /// sorted, finite
    Explicit(Vec<Eigen>),
}

impl EigenSource {
    fn upto(&self, lambda_max: f64) -> Vec<Eigen> {
        match self {
            EigenSource::SquaredProgression { step, mult } => {
                let kmax = (lambda_max.sqrt() / step).floor() as u64;
                (1..=kmax)
                    .map(|k| {
                        let v = step * k as f64;
                        Eigen { value: v * v, mult: *mult }
                    })
                    .collect()
            }
            EigenSource::Lattice { basis, scale, mult } => lattice_upto(basis, *scale, *mult, lambda_max),
            EigenSource::Explicit(list) => list.iter().copied().take_while(|e| e.value <= lambda_max).collect(),
        }
    }

    fn is_finite_list(&self) -> bool {
        matches!(self, EigenSource::Explicit(_))
    }

    fn last_value(&self) -> Option<f64> {
        match self {
            EigenSource::Explicit(list) => list.last().map(|e| e.value),
            _ => None,
        }
    }

    fn min_value(&self) -> Option<f64> {
        self.upto_first()
    }

    fn upto_first(&self) -> Option<f64> {
        match self {
            EigenSource::SquaredProgression { step, .. } => Some(step * step),
            EigenSource::Lattice { basis, scale, mult } => {
                let mut cap = 1.0;
                loop {
                    let l = lattice_upto(basis, *scale, *mult, cap);
                    if let Some(e) = l.first() {
                        return Some(e.value);
                    }
                    cap *= 4.0;
                }
            }
            EigenSource::Explicit(list) => list.first().map(|e| e.value),
        }
    }
}

fn to_matrix(basis: &[Vec<f64>]) -> DMatrix<f64> {
    let n = basis.len();
    DMatrix::from_fn(n, n, |i, j| basis[i].get(j).copied().unwrap_or(0.0))
}

/// Dual basis: rows of the inverse transpose.
pub fn dual_basis(basis: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let inv = to_matrix(basis).try_inverse()?;
    let n = basis.len();
    Some((0..n).map(|i| (0..n).map(|j| inv[(j, i)]).collect()).collect())
}

pub fn determinant(basis: &[Vec<f64>]) -> f64 {
    to_matrix(basis).determinant()
}

fn lattice_upto(basis: &[Vec<f64>], scale: f64, mult: u64, lambda_max: f64) -> Vec<Eigen> {
    let n = basis.len();
    let Some(dual) = dual_basis(basis) else {
        return Vec::new();
    };
    let f = 2.0 * PI * scale;
    let rmax = lambda_max.sqrt() / f;
    // |m_i| <= |xi| |a_i|
    let bounds: Vec<i64> = basis
        .iter()
        .map(|a| (rmax * a.iter().map(|x| x * x).sum::<f64>().sqrt()).floor() as i64)
        .collect();
    let mut out = Vec::new();
    let mut m: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if m.iter().any(|&x| x != 0) {
            let mut norm2 = 0.0;
            for d in 0..n {
                let c: f64 = (0..n).map(|i| m[i] as f64 * dual[i][d]).sum();
                norm2 += c * c;
            }
            let eta = f * f * norm2;
            if eta <= lambda_max * (1.0 + 1e-12) {
                out.push(Eigen { value: eta, mult });
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == n {
                return merge_ties(out);
            }
            if m[i] < bounds[i] {
                m[i] += 1;
                break;
            }
            m[i] = -bounds[i];
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaOrder {
    /// zeta(s) = sum lambda^{-s}
    Linear,
    /// zeta(s) = sum lambda^{-s/2}
    Root,
}

impl ZetaOrder {
    fn q(self) -> f64 {
        match self {
            ZetaOrder::Linear => 1.0,
            ZetaOrder::Root => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Descriptor {
    /// values c k, k >= 1, multiplicity m
    ArithmeticProgression { step: f64, mult: u64 },
    LatticeWithShift { shift: f64 },
    ExplicitList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumStream {
    pub source: EigenSource,
    /// added to every eigenvalue of `source`
    pub shift: f64,
    pub order: ZetaOrder,
}

impl SpectrumStream {
    /// Values `c k` with multiplicity `m`.
    pub fn progression(step: f64, mult: u64) -> Self {
        Self { source: EigenSource::SquaredProgression { step, mult }, shift: 0.0, order: ZetaOrder::Root }
    }

    pub fn new(source: EigenSource, shift: f64, order: ZetaOrder) -> Self {
        Self { source, shift, order }
    }

    pub fn explicit(list: Vec<Eigen>, order: ZetaOrder) -> Self {
        Self { source: EigenSource::Explicit(merge_ties(list)), shift: 0.0, order }
    }

    pub fn descriptor(&self) -> Descriptor {
        match (&self.source, self.order) {
            (EigenSource::SquaredProgression { step, mult }, ZetaOrder::Root) if self.shift == 0.0 => {
                Descriptor::ArithmeticProgression { step: *step, mult: *mult }
            }
            (EigenSource::Lattice { .. }, _) => Descriptor::LatticeWithShift { shift: self.shift },
            _ => Descriptor::ExplicitList,
        }
    }

    /// Heat-operator eigenvalues (shift included) up to `lambda_max`.
    pub fn eigenvalues_upto(&self, lambda_max: f64) -> Vec<Eigen> {
        let mut v = self.source.upto(lambda_max - self.shift);
        for e in &mut v {
            e.value += self.shift;
        }
        v
    }

    /// Zeta values (`lambda` or `sqrt(lambda)`) up to `vmax`.
    pub fn values_upto(&self, vmax: f64) -> Vec<Eigen> {
        let lmax = match self.order {
            ZetaOrder::Linear => vmax,
            ZetaOrder::Root => vmax * vmax,
        };
        let mut v = self.eigenvalues_upto(lmax);
        if self.order == ZetaOrder::Root {
            for e in &mut v {
                e.value = e.value.sqrt();
            }
        }
        v
    }

    pub fn min_eigenvalue(&self) -> Option<f64> {
        self.source.min_value().map(|m| m + self.shift)
    }

    pub fn min_value(&self) -> Option<f64> {
        self.min_eigenvalue().map(|l| match self.order {
            ZetaOrder::Linear => l,
            ZetaOrder::Root => l.sqrt(),
        })
    }

    fn validate(&self) -> Result<()> {
        if let EigenSource::Explicit(list) = &self.source {
            if list.is_empty() {
                return Err(ZetaError::InvalidSpectrum("empty eigenvalue list".into()));
            }
            if list.windows(2).any(|w| w[1].value <= w[0].value) {
                return Err(ZetaError::InvalidSpectrum("eigenvalues must be strictly increasing".into()));
            }
        }
        match self.min_eigenvalue() {
            Some(m) if m > 0.0 => Ok(()),
            _ => Err(ZetaError::InvalidSpectrum("eigenvalues must be positive".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatRemainder {
    /// remainder decays faster than any power of t
    Exponential,
    /// remainder is O(t^{(j - dim)/2}) with j = the given order
    Power(usize),
}

/// Small-t expansion `sum_j c_j t^{(j - dim)/2}` of the heat trace of the unshifted source.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatCoefficients {
    pub dim: usize,
    pub coeffs: Vec<f64>,
    pub remainder: HeatRemainder,
}

impl HeatCoefficients {
    pub fn new(dim: usize, coeffs: Vec<f64>, remainder: HeatRemainder) -> Self {
        Self { dim, coeffs, remainder }
    }

    /// Supplied coefficients only; the remainder is one order beyond the last one.
    pub fn truncated(dim: usize, coeffs: Vec<f64>) -> Self {
        let j = coeffs.len();
        Self { dim, coeffs, remainder: HeatRemainder::Power(j) }
    }

    pub fn exponent(&self, j: usize) -> f64 {
        (j as f64 - self.dim as f64) / 2.0
    }

    /// Exponent of the remainder; a nominal 1/2-step beyond the last term for exponential.
    fn remainder_exponent(&self) -> f64 {
        match self.remainder {
            HeatRemainder::Power(j) => self.exponent(j),
            HeatRemainder::Exponential => self.exponent(self.coeffs.len()).max(0.5) + 4.0,
        }
    }

    /// Counting-function estimate N(lambda) from the leading term.
    pub fn weyl_count(&self, lambda: f64) -> f64 {
        let p = self.exponent(0);
        if p >= 0.0 {
            return 0.0;
        }
        let a = -p;
        self.coeffs[0] * lambda.powf(a) / specfun::gamma(a + 1.0).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaFunctionData {
    pub deriv0: f64,
    /// keyed by the shift written as a decimal string
    pub deriv0_shifted: BTreeMap<String, f64>,
    pub residues: BTreeMap<usize, f64>,
    pub pp: BTreeMap<usize, f64>,
    pub error_estimate: f64,
    #[serde(skip)]
    pub value0: f64,
}

pub fn alpha_key(alpha: f64) -> String {
    // -0 and 0 share a key
    format!("{}", if alpha == 0.0 { 0.0 } else { alpha })
}

impl ZetaFunctionData {
    pub fn shifted(&self, alpha: f64) -> Option<f64> {
        self.deriv0_shifted.get(&alpha_key(alpha)).copied()
    }

    pub fn residue(&self, i: usize) -> f64 {
        self.residues.get(&i).copied().unwrap_or(0.0)
    }
}

// ---------------------------------------------------------------- exact path

/// Closed form for a progression stream `{c k, mult m}` through Riemann/Hurwitz zeta.
pub fn zeta_data_exact(stream: &SpectrumStream, alphas: &[f64]) -> Result<ZetaFunctionData> {
    let Descriptor::ArithmeticProgression { step: c, mult } = stream.descriptor() else {
        return Err(ZetaError::DescriptorMismatch("stream is not an arithmetic progression".into()));
    };
    let m = mult as f64;
    let lc = c.ln();
    let deriv0 = m * (specfun::hurwitz_zeta_prime0(1.0)? + 0.5 * lc);
    let mut shifted = BTreeMap::new();
    for &a in alphas {
        if a.abs() >= c {
            return Err(ZetaError::ShiftTooLarge { alpha: a, min_value: c });
        }
        // sum m (c k + a)^{-s} = m c^{-s} zeta_H(s, 1 + a/c)
        let h = 1.0 + a / c;
        let v = m * (specfun::hurwitz_zeta_prime0(h)? - lc * specfun::hurwitz_zeta(0.0, h)?);
        shifted.insert(alpha_key(a), v);
    }
    let mut residues = BTreeMap::new();
    let mut pp = BTreeMap::new();
    residues.insert(1, m / c);
    pp.insert(1, m / c * (EULER_GAMMA - lc));
    Ok(ZetaFunctionData {
        deriv0,
        deriv0_shifted: shifted,
        residues,
        pp,
        error_estimate: 0.0,
        value0: -0.5 * m,
    })
}

// ---------------------------------------------------------------- quadrature

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for GK_X[1], GK_X[3], GK_X[5], GK_X[7]
const G7_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Node {
    u: f64,
    wk: f64,
    wg: f64,
}

fn gk_grid(a: f64, b: f64, width: f64) -> Vec<Node> {
    let panels = ((b - a) / width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * 15);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (k, &x) in GK_X.iter().enumerate() {
            let wg = if k % 2 == 1 { G7_W[k / 2] } else { 0.0 };
            if x == 0.0 {
                out.push(Node { u: c, wk: GK_W[k] * half, wg: wg * half });
            } else {
                out.push(Node { u: c - half * x, wk: GK_W[k] * half, wg: wg * half });
                out.push(Node { u: c + half * x, wk: GK_W[k] * half, wg: wg * half });
            }
        }
    }
    out
}

// ---------------------------------------------------------------- Mellin engine

/// Mellin-split representation of Z(w) = sum_lambda m lambda^{-w}.
struct MellinEngine {
    heat: HeatCoefficients,
    shift: f64,
    eigen: Vec<Eigen>,
    t_lo: f64,
    r_lo: f64,
    p_rem: f64,
    nodes: Vec<(Node, f64)>,
    /// uncertainty of the empirical remainder from the smooth tail model
    tail_err: f64,
}

fn heat_sum(eigen: &[Eigen], t: f64, cutoff: f64) -> f64 {
    let mut s = NeumaierSum::new();
    for e in eigen {
        if e.value * t > cutoff {
            break;
        }
        s.add(e.mult as f64 * (-e.value * t).exp());
    }
    s.value()
}

impl MellinEngine {
    /// smooth model e^{-shift t} sum c_j t^{p_j}
    fn smooth(&self, t: f64) -> f64 {
        let e = (-self.shift * t).exp();
        let mut s = NeumaierSum::new();
        for (j, c) in self.heat.coeffs.iter().enumerate() {
            if *c != 0.0 {
                s.add(c * t.powf(self.heat.exponent(j)));
            }
        }
        e * s.value()
    }

    /// part of the trace above the eigenvalue cut, from the smooth model
    fn tail(&self, t: f64, lambda_cut: f64) -> Result<f64> {
        let x = (lambda_cut - self.shift) * t;
        let mut s = NeumaierSum::new();
        for (j, c) in self.heat.coeffs.iter().enumerate() {
            let p = self.heat.exponent(j);
            if *c == 0.0 || p >= 0.0 {
                continue;
            }
            s.add(c * t.powf(p) * specfun::upper_gamma(-p, x)? / specfun::gamma(-p)?);
        }
        Ok((-self.shift * t).exp() * s.value())
    }

    fn build(heat: &HeatCoefficients, shift: f64, eigen: Vec<Eigen>, lambda_cut: f64, t_lo: f64) -> Result<Self> {
        let mut eng = MellinEngine {
            heat: heat.clone(),
            shift,
            eigen,
            t_lo,
            r_lo: 0.0,
            p_rem: heat.remainder_exponent(),
            nodes: Vec::new(),
            tail_err: 0.0,
        };
        let cutoff = 46.0;
        let remainder = |eng: &MellinEngine, t: f64| -> Result<(f64, f64)> {
            let mut th = heat_sum(&eng.eigen, t, cutoff);
            let mut tl = 0.0;
            if lambda_cut * t < cutoff + 1.0 {
                tl = eng.tail(t, lambda_cut)?;
                th += tl;
            }
            Ok((th - eng.smooth(t), tl))
        };
        let (r_lo, tl_lo) = remainder(&eng, t_lo)?;
        eng.r_lo = r_lo;
        eng.tail_err = 0.05 * tl_lo.abs();
        let grid = gk_grid(t_lo.ln(), 0.0, 0.25);
        let mut nodes = Vec::with_capacity(grid.len());
        for n in grid {
            let t = n.u.exp();
            let (r, _) = remainder(&eng, t)?;
            nodes.push((n, r));
        }
        eng.nodes = nodes;
        Ok(eng)
    }

    fn remainder_at(&self, t: f64, lambda_cut: f64) -> Result<f64> {
        let mut th = heat_sum(&self.eigen, t, 46.0);
        if lambda_cut * t < 47.0 {
            th += self.tail(t, lambda_cut)?;
        }
        Ok(th - self.smooth(t))
    }

    /// coefficient of each pole term: list of (P, coefficient) for 1/(w + P)
    fn pole_terms(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let a2 = self.shift;
        for (j, &c) in self.heat.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let p = self.heat.exponent(j);
            let mut coef = c;
            for l in 0..200 {
                if l > 0 {
                    coef *= -a2 / l as f64;
                }
                if coef == 0.0 || (l > 2 && coef.abs() < 1e-20 * c.abs()) {
                    break;
                }
                out.push((p + l as f64, coef));
            }
        }
        out
    }

    /// (regular part of F at w, pole coefficient at w, error estimate)
    fn f_at(&self, w: f64) -> Result<(f64, f64, f64)> {
        if w + self.p_rem <= 0.0 {
            return Err(ZetaError::InconsistentHeat(format!(
                "heat expansion too short to continue to w = {w}"
            )));
        }
        let mut reg = NeumaierSum::new();
        let mut pole = 0.0;
        for (p, c) in self.pole_terms() {
            if (w + p).abs() < 1e-12 {
                pole += c;
            } else {
                reg.add(c / (w + p));
            }
        }
        // remainder integral on [t_lo, 1] in u = ln t
        let mut gk = NeumaierSum::new();
        let mut g7 = NeumaierSum::new();
        for (n, r) in &self.nodes {
            let f = (w * n.u).exp() * r;
            gk.add(n.wk * f);
            g7.add(n.wg * f);
        }
        reg.add(gk.value());
        let quad_err = (gk.value() - g7.value()).abs();
        // below t_lo
        let extrap = self.r_lo * self.t_lo.powf(w) / (w + self.p_rem);
        reg.add(extrap);
        // large t
        let mut large = NeumaierSum::new();
        for e in &self.eigen {
            if e.value > 80.0 {
                break;
            }
            let g = specfun::upper_gamma(w, e.value)?;
            large.add(e.mult as f64 * (-w * e.value.ln()).exp() * g);
        }
        reg.add(large.value());
        let err = quad_err + extrap.abs() + self.tail_err * self.t_lo.powf(w).max(1.0) / (w + 0.5).max(0.5);
        Ok((reg.value(), pole, err))
    }
}

/// Values at the poles and regular points needed by the torsion formulas.
#[derive(Debug, Clone)]
struct MellinResult {
    value0: f64,
    deriv0: f64,
    deriv0_err: f64,
    /// zeta(i) data: (residue, pp, err)
    at_int: BTreeMap<usize, (f64, f64, f64)>,
}

fn mellin_evaluate(eng: &MellinEngine, q: f64, ints: &[usize]) -> Result<MellinResult> {
    let (f0, d0, e0) = eng.f_at(0.0)?;
    let deriv0 = (f0 + EULER_GAMMA * d0) / q;
    let mut at_int = BTreeMap::new();
    for &i in ints {
        let w = i as f64 / q;
        let (fr, d, e) = eng.f_at(w)?;
        let g = specfun::gamma(w)?;
        if d != 0.0 {
            let res = q * d / g;
            let pp = (fr - d * specfun::digamma(w)?) / g;
            at_int.insert(i, (res, pp, e / g));
        } else {
            at_int.insert(i, (0.0, fr / g, e / g));
        }
    }
    Ok(MellinResult { value0: d0, deriv0, deriv0_err: e0 / q, at_int })
}

/// Picks an eigenvalue cut so that the empirical remainder is negligible at t_lo.
fn build_engine(stream: &SpectrumStream, heat: &HeatCoefficients, tol: f64) -> Result<MellinEngine> {
    const CUT: f64 = 40.0;
    const MAX_EIGEN: usize = 4_000_000;
    let shift = stream.shift;
    let mut t_lo: f64 = 0.2;
    let finite = stream.source.is_finite_list();
    let mut history: Vec<f64> = Vec::new();
    loop {
        let mut lambda_max = CUT / t_lo + shift;
        if let Some(last) = stream.source.last_value() {
            let last = last + shift;
            if lambda_max > last {
                lambda_max = last;
                t_lo = (CUT / (last - shift).max(1e-300)).min(1.0);
            }
        }
        let mut eigen = stream.eigenvalues_upto(lambda_max);
        if eigen.is_empty() {
            return Err(ZetaError::InsufficientSpectrum { estimate: f64::INFINITY, tol });
        }
        // cut halfway to the next eigenvalue
        let next = stream.eigenvalues_upto(lambda_max * 1.2 + 1.0);
        let lambda_cut = match next.get(eigen.len()) {
            Some(e) => 0.5 * (eigen.last().unwrap().value + e.value),
            None => {
                let n = eigen.len();
                let gap = if n >= 2 { eigen[n - 1].value - eigen[n - 2].value } else { 1.0 };
                eigen[n - 1].value + 0.5 * gap
            }
        };
        eigen.truncate(eigen.len());
        let probe = MellinEngine {
            heat: heat.clone(),
            shift,
            eigen: eigen.clone(),
            t_lo,
            r_lo: 0.0,
            p_rem: heat.remainder_exponent(),
            nodes: Vec::new(),
            tail_err: 0.0,
        };
        let r = probe.remainder_at(t_lo, lambda_cut)?.abs();
        history.push(r);
        let small = r <= 1e-3 * tol;
        let exhausted = finite && stream.source.last_value().is_some_and(|l| l + shift <= lambda_max)
            || eigen.len() > MAX_EIGEN
            || t_lo < 1e-9;
        if small || exhausted {
            let n = history.len();
            // a supplied heat expansion that does not match the stream shows up as a
            // remainder that grows toward t = 0
            if !small && n >= 3 && history[n - 1] >= 0.9 * history[n - 2] && history[n - 2] >= 0.9 * history[n - 3] {
                return Err(ZetaError::InconsistentHeat(format!(
                    "heat remainder {:e} does not decay toward t = 0",
                    history[n - 1]
                )));
            }
            if !small && exhausted && r > 1e-3 {
                let lead = probe.smooth(t_lo).abs().max(1.0);
                if r / lead > 1e-3 {
                    return Err(ZetaError::InconsistentHeat(format!(
                        "relative heat remainder {:e} at t = {t_lo:e}",
                        r / lead
                    )));
                }
            }
            return MellinEngine::build(heat, shift, eigen, lambda_cut, t_lo);
        }
        if finite && stream.source.last_value().is_some_and(|l| l + shift <= lambda_max) {
            return MellinEngine::build(heat, shift, eigen, lambda_cut, t_lo);
        }
        t_lo *= 0.5;
    }
}

/// sum_{v > vcut} m v^{-j} from the smooth eigenvalue density
fn weyl_power_tail(heat: &HeatCoefficients, order: ZetaOrder, lambda_cut: f64, j: f64) -> f64 {
    let q = order.q();
    let mut s = 0.0;
    for (k, &c) in heat.coeffs.iter().enumerate() {
        let p = heat.exponent(k);
        if c == 0.0 || p >= 0.0 {
            continue;
        }
        // density c lambda^{-p-1} / Gamma(-p)
        let e = j / q + p;
        if e <= 0.0 {
            return f64::INFINITY;
        }
        s += c / specfun::gamma(-p).unwrap_or(f64::NAN) * lambda_cut.powf(-e) / e;
    }
    s
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Both evaluations of zeta'(0, alpha) for a numeric stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedValue {
    pub relation: f64,
    pub direct: f64,
    pub error_estimate: f64,
}

impl ShiftedValue {
    pub fn value(&self) -> f64 {
        self.relation
    }
}

struct NumericContext {
    stream: SpectrumStream,
    heat: HeatCoefficients,
    base: MellinResult,
    /// values (v, m) used for direct sums
    direct: Vec<Eigen>,
    direct_cut: f64,
    j_mellin: usize,
}

impl NumericContext {
    fn new(stream: &SpectrumStream, heat: &HeatCoefficients, tol: f64) -> Result<Self> {
        stream.validate()?;
        let eng = build_engine(stream, heat, tol)?;
        let q = stream.order.q();
        let n = heat.dim;
        let j_mellin = n + 8;
        let ints: Vec<usize> = (1..=j_mellin).collect();
        let base = mellin_evaluate(&eng, q, &ints)?;
        // direct-sum list: at least as far as the heat list, and further for cheap sources
        let lam_heat = eng.eigen.last().map(|e| e.value).unwrap_or(1.0);
        let lam_direct = match &stream.source {
            EigenSource::Explicit(_) => f64::INFINITY,
            _ => lam_heat.max(match n {
                0 | 1 => 1e8,
                2 => 2e5,
                _ => 2e4,
            }),
        };
        let lambda_list = if lam_direct.is_finite() {
            stream.eigenvalues_upto(lam_direct)
        } else {
            stream.eigenvalues_upto(f64::MAX)
        };
        let direct_cut = match lambda_list.last() {
            Some(e) if lam_direct.is_finite() => lam_direct.max(e.value),
            Some(e) => e.value,
            None => 1.0,
        };
        let direct = lambda_list
            .into_iter()
            .map(|e| Eigen { value: if q == 2.0 { e.value.sqrt() } else { e.value }, mult: e.mult })
            .collect();
        Ok(Self { stream: stream.clone(), heat: heat.clone(), base, direct, direct_cut, j_mellin })
    }

    fn direct_power_sum(&self, j: usize) -> (f64, f64) {
        let mut s = NeumaierSum::new();
        for e in self.direct.iter().rev() {
            s.add(e.mult as f64 * e.value.powi(-(j as i32)));
        }
        let tail = weyl_power_tail(&self.heat, self.stream.order, self.direct_cut, j as f64);
        (s.value() + tail, 0.2 * tail.abs())
    }

    /// zeta'(0, alpha) = zeta'(0) + sum_j (-1)^j a^j / j (PP_j + H_{j-1} Res_j)
    fn shifted(&self, alpha: f64) -> Result<ShiftedValue> {
        let vmin = self.direct.first().map(|e| e.value).unwrap_or(f64::INFINITY);
        if alpha.abs() >= vmin {
            return Err(ZetaError::ShiftTooLarge { alpha, min_value: vmin });
        }
        if alpha == 0.0 {
            return Ok(ShiftedValue { relation: self.base.deriv0, direct: self.base.deriv0, error_estimate: self.base.deriv0_err });
        }
        let term = |j: usize, res: f64, pp: f64| -> f64 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * alpha.powi(j as i32) / j as f64 * (pp + harmonic(j - 1) * res)
        };
        // relation path: Mellin data up to j_mellin, direct power sums beyond
        let mut rel = NeumaierSum::new();
        rel.add(self.base.deriv0);
        let mut err = self.base.deriv0_err;
        for j in 1..=self.j_mellin {
            let (res, pp, e) = self.base.at_int[&j];
            rel.add(term(j, res, pp));
            err += alpha.abs().powi(j as i32) / j as f64 * e;
        }
        let ratio = alpha.abs() / vmin;
        let mut j = self.j_mellin + 1;
        loop {
            let (z, e) = self.direct_power_sum(j);
            let t = term(j, 0.0, z);
            rel.add(t);
            err += alpha.abs().powi(j as i32) / j as f64 * e;
            if t.abs() < 1e-18 || ratio.powi(j as i32) < 1e-18 || j > 4000 {
                break;
            }
            j += 1;
        }
        // direct path: truncate at jd and sum the Taylor remainder of -log(1 + a/v) explicitly
        let jd = self.heat.dim + 3;
        let mut dir = NeumaierSum::new();
        dir.add(self.base.deriv0);
        for j in 1..=jd {
            let (res, pp, _) = self.base.at_int[&j];
            dir.add(term(j, res, pp));
        }
        let mut k = NeumaierSum::new();
        for e in self.direct.iter().rev() {
            let x = alpha / e.value;
            // -log(1+x) - sum_{r<=jd} (-1)^r x^r / r = -sum_{r>jd} (-1)^{r+1} x^r / r
            let mut poly = 0.0;
            let mut xp = 1.0;
            for r in 1..=jd {
                xp *= x;
                poly += if r % 2 == 0 { xp } else { -xp } / r as f64;
            }
            k.add(e.mult as f64 * (-x.ln_1p() - poly));
        }
        dir.add(k.value());
        // tail of the explicit sum: leading term (-1)^{jd+1} a^{jd+1}/(jd+1) sum v^{-jd-1}
        let jt = jd + 1;
        let tail = weyl_power_tail(&self.heat, self.stream.order, self.direct_cut, jt as f64);
        let sign = if jt % 2 == 0 { 1.0 } else { -1.0 };
        dir.add(sign * alpha.powi(jt as i32) / jt as f64 * tail);
        let dir_err = 0.2 * (alpha.powi(jt as i32) / jt as f64 * tail).abs();
        let relation = rel.value();
        let direct = dir.value();
        let error_estimate = err + dir_err + (relation - direct).abs();
        Ok(ShiftedValue { relation, direct, error_estimate })
    }
}

/// Numerical continuation of a streamed spectrum.
pub fn zeta_data_numeric(
    stream: &SpectrumStream,
    heat: &HeatCoefficients,
    alphas: &[f64],
    target_tol: f64,
) -> Result<ZetaFunctionData> {
    let ctx = NumericContext::new(stream, heat, target_tol)?;
    let n = heat.dim.max(1);
    let mut residues = BTreeMap::new();
    let mut pp = BTreeMap::new();
    let mut err = ctx.base.deriv0_err;
    for i in 1..=n {
        let (r, p, e) = ctx.base.at_int[&i];
        residues.insert(i, r);
        pp.insert(i, p);
        err = err.max(e);
    }
    let mut shifted = BTreeMap::new();
    for &a in alphas {
        let sv = ctx.shifted(a)?;
        if (sv.relation - sv.direct).abs() > 10.0 * (sv.error_estimate - (sv.relation - sv.direct).abs()) + 1e-10 {
            return Err(ZetaError::ShiftMismatch { relation: sv.relation, direct: sv.direct });
        }
        err = err.max(sv.error_estimate);
        shifted.insert(alpha_key(a), sv.value());
    }
    let err = err.max(1e-15);
    if err > target_tol {
        return Err(ZetaError::InsufficientSpectrum { estimate: err, tol: target_tol });
    }
    Ok(ZetaFunctionData {
        deriv0: ctx.base.deriv0,
        deriv0_shifted: shifted,
        residues,
        pp,
        error_estimate: err,
        value0: ctx.base.value0,
    })
}

/// zeta'(0, alpha) by both the binomial relation and the direct Taylor-remainder sum.
pub fn shifted_from_base(
    stream: &SpectrumStream,
    heat: &HeatCoefficients,
    alpha: f64,
    target_tol: f64,
) -> Result<ShiftedValue> {
    if stream.descriptor() != Descriptor::ExplicitList {
        if let Descriptor::ArithmeticProgression { step, .. } = stream.descriptor() {
            if alpha.abs() >= step {
                return Err(ZetaError::ShiftTooLarge { alpha, min_value: step });
            }
            let exact = zeta_data_exact(stream, &[alpha])?;
            let numeric = NumericContext::new(stream, heat, target_tol)?.shifted(alpha)?;
            let v = exact.shifted(alpha).unwrap_or(f64::NAN);
            return Ok(ShiftedValue {
                relation: numeric.relation,
                direct: v,
                error_estimate: numeric.error_estimate + (numeric.relation - v).abs(),
            });
        }
    }
    let ctx = NumericContext::new(stream, heat, target_tol)?;
    let sv = ctx.shifted(alpha)?;
    if (sv.relation - sv.direct).abs() > target_tol.max(sv.error_estimate - (sv.relation - sv.direct).abs()) {
        return Err(ZetaError::ShiftMismatch { relation: sv.relation, direct: sv.direct });
    }
    Ok(sv)
}

// ---------------------------------------------------------------- zero-list engine

/// Index asymptotics of a Bessel-type zero sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroAsymptotics {
    /// spacing, pi / R for zeros scaled by 1/R
    pub omega: f64,
    /// index offset: beta_i = omega (i + delta)
    pub delta: f64,
    /// mu_i = beta_i + c1 / beta_i + O(beta^-3)
    pub c1: f64,
}

impl ZeroAsymptotics {
    /// Asymptotics of the zeros of a J_nu + z J'_nu (`None` = Dirichlet).
    pub fn bessel(nu: f64, alpha: Option<f64>) -> Self {
        let m = 4.0 * nu * nu;
        match alpha {
            None => Self { omega: PI, delta: 0.5 * nu - 0.25, c1: -(m - 1.0) / 8.0 },
            Some(a) => Self { omega: PI, delta: 0.5 * nu - 0.75, c1: a - (m + 3.0) / 8.0 },
        }
    }

    /// Zeros divided by `r`.
    pub fn scaled(self, r: f64) -> Self {
        Self { omega: self.omega / r, delta: self.delta, c1: self.c1 / (r * r) }
    }
}

/// Continuation of `zeta(s) = sum mu_i^{-2s}` for an explicit increasing list of `mu_i`.
///
/// Shifts act on the eigenvalues: `zeta(s, a) = sum (mu_i^2 + a)^{-s}`.
pub fn zeta_data_zero_list(
    mu: &[f64],
    asym: ZeroAsymptotics,
    alphas: &[f64],
    target_tol: f64,
) -> Result<ZetaFunctionData> {
    let n = mu.len();
    if n < 20 {
        return Err(ZetaError::InsufficientSpectrum { estimate: f64::INFINITY, tol: target_tol });
    }
    if mu.windows(2).any(|w| w[1] <= w[0]) || mu[0] <= 0.0 {
        return Err(ZetaError::InvalidSpectrum("zeros must be positive and increasing".into()));
    }
    let om = asym.omega;
    // align the index offset with the data
    let shift = (mu[n - 1] / om - n as f64 - asym.delta).round();
    let delta = asym.delta + shift;
    if 1.0 + delta <= 0.0 {
        return Err(ZetaError::DescriptorMismatch("index offset out of range".into()));
    }
    let beta = |i: usize| om * (i as f64 + delta);
    let c1 = asym.c1;
    // empirical next coefficient: mu - beta - c1/beta ~ c3 / beta^3
    let fit = |i: usize| (mu[i - 1] - beta(i) - c1 / beta(i)) * beta(i).powi(3);
    let c3 = fit(n);
    let c3_half = fit(n / 2);
    let mut logs = NeumaierSum::new();
    for i in (1..=n).rev() {
        logs.add((mu[i - 1] / beta(i)).ln());
    }
    let a = n as f64 + 1.0 + delta;
    let z2 = specfun::hurwitz_zeta(2.0, a)?;
    let z4 = specfun::hurwitz_zeta(4.0, a)?;
    let tail = c1 * z2 / (om * om) + (c3 - 0.5 * c1 * c1) * z4 / om.powi(4);
    let tail_err = (c3 - c3_half).abs() * z4 / om.powi(4) + (c1 * c1 + c3.abs()).powi(2) * specfun::hurwitz_zeta(6.0, a)? / om.powi(6);
    let h0 = 0.5 - (1.0 + delta);
    let dh0 = specfun::hurwitz_zeta_prime0(1.0 + delta)?;
    let sum_logs = logs.value() + tail;
    let deriv0 = -2.0 * om.ln() * h0 + 2.0 * dh0 - 2.0 * sum_logs;
    let rounding = 4e-16 * n as f64;
    let mut err = 2.0 * (tail_err + rounding);

    // zeta(1) = sum mu^{-2}, regular
    let mut z1 = NeumaierSum::new();
    for i in (1..=n).rev() {
        z1.add(mu[i - 1].powi(-2));
    }
    // tail: mu^-2 = beta^-2 (1 - 2 c1 / beta^2 + ...)
    z1.add(z2 / (om * om) - 2.0 * c1 * z4 / om.powi(4));
    let mut residues = BTreeMap::new();
    let mut pp = BTreeMap::new();
    residues.insert(1, 0.0);
    pp.insert(1, z1.value());

    let mut shifted = BTreeMap::new();
    for &al in alphas {
        let lmin = mu[0] * mu[0];
        if -al >= lmin {
            return Err(ZetaError::ShiftTooLarge { alpha: al, min_value: lmin });
        }
        let mut s = NeumaierSum::new();
        for i in (1..=n).rev() {
            s.add((al / (mu[i - 1] * mu[i - 1])).ln_1p());
        }
        // tail: log(1 + a/mu^2) ~ a/beta^2 - (2 a c1 + a^2/2)/beta^4
        s.add(al * z2 / (om * om) - (2.0 * al * c1 + 0.5 * al * al) * z4 / om.powi(4));
        let e = (al.abs() * (c1.abs() + al.abs()).powi(2)) * specfun::hurwitz_zeta(6.0, a)? / om.powi(6);
        err = err.max(e);
        shifted.insert(alpha_key(al), deriv0 - s.value());
    }
    if err > target_tol {
        return Err(ZetaError::InsufficientSpectrum { estimate: err, tol: target_tol });
    }
    Ok(ZetaFunctionData {
        deriv0,
        deriv0_shifted: shifted,
        residues,
        pp,
        error_estimate: err,
        value0: h0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::LN_2PI;

    fn pi_squares(n: usize) -> SpectrumStream {
        SpectrumStream::new(EigenSource::SquaredProgression { step: PI, mult: 1 }, 0.0, ZetaOrder::Linear)
            .with_limit(n)
    }

    impl SpectrumStream {
        fn with_limit(self, n: usize) -> Self {
            let list = self.eigenvalues_upto(f64::MAX.min(((n as f64 + 0.5) * PI).powi(2)));
            SpectrumStream { source: EigenSource::Explicit(list), ..self }
        }
    }

    fn dirichlet_heat() -> HeatCoefficients {
        HeatCoefficients::new(1, vec![0.5 / PI.sqrt(), -0.5], HeatRemainder::Exponential)
    }

    #[test]
    fn exact_progression_values() {
        let s = SpectrumStream::progression(1.0, 2);
        let d = zeta_data_exact(&s, &[0.0, 0.5]).unwrap();
        assert!((d.deriv0 + LN_2PI).abs() < 1e-13);
        assert!((d.residue(1) - 2.0).abs() < 1e-15);
        assert_eq!(d.shifted(0.0), Some(d.deriv0));
        assert_eq!(d.error_estimate, 0.0);
        let one = zeta_data_exact(&SpectrumStream::progression(1.0, 1), &[0.5]).unwrap();
        let want = specfun::ln_gamma(1.5).unwrap() - 0.5 * LN_2PI;
        assert!((one.shifted(0.5).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn exact_rejects_non_progression() {
        let s = pi_squares(100);
        assert!(matches!(zeta_data_exact(&s, &[]), Err(ZetaError::DescriptorMismatch(_))));
    }

    #[test]
    fn dirichlet_interval_determinant() {
        let d = zeta_data_numeric(&pi_squares(2000), &dirichlet_heat(), &[], 1e-9).unwrap();
        assert!((-d.deriv0 - std::f64::consts::LN_2).abs() < 1e-10, "{}", d.deriv0);
        assert!(d.deriv0_shifted.is_empty());
        assert!(d.residue(1).abs() < 1e-8);
        assert!((d.value0 + 0.5).abs() < 1e-14);
    }

    #[test]
    fn numeric_matches_exact_for_progression() {
        for (c, m) in [(1.0, 2u64), (1.5, 2), (3.0, 1)] {
            let s = SpectrumStream::progression(c, m);
            let heat = HeatCoefficients::new(
                1,
                vec![m as f64 * PI.sqrt() / (2.0 * c), -(m as f64) / 2.0],
                HeatRemainder::Exponential,
            );
            let alphas = [0.0, 0.5, -0.5];
            let num = zeta_data_numeric(&s, &heat, &alphas, 1e-9).unwrap();
            let ex = zeta_data_exact(&s, &alphas).unwrap();
            assert!((num.deriv0 - ex.deriv0).abs() < 1e-9, "c={c}");
            assert!((num.residue(1) - ex.residue(1)).abs() < 1e-9);
            assert!((num.pp[&1] - ex.pp[&1]).abs() < 1e-9);
            for a in alphas {
                assert!((num.shifted(a).unwrap() - ex.shifted(a).unwrap()).abs() < 1e-9, "c={c} a={a}");
            }
        }
    }

    #[test]
    fn shifted_progression_both_paths() {
        let s = SpectrumStream::progression(1.0, 1);
        let heat = HeatCoefficients::new(1, vec![PI.sqrt() / 2.0, -0.5], HeatRemainder::Exponential);
        let sv = shifted_from_base(&s, &heat, 0.5, 1e-9).unwrap();
        let want = specfun::ln_gamma(1.5).unwrap() - 0.5 * LN_2PI;
        assert!((sv.relation - want).abs() < 1e-9);
        assert!((sv.direct - want).abs() < 1e-12);
        assert!(matches!(shifted_from_base(&s, &heat, 1.0, 1e-9), Err(ZetaError::ShiftTooLarge { .. })));
    }

    #[test]
    fn square_torus_pole_structure() {
        // square torus of side pi: eigenvalues 4 (p^2 + q^2), volume pi^2
        let basis = vec![vec![PI, 0.0], vec![0.0, PI]];
        let src = EigenSource::Lattice { basis, scale: 1.0, mult: 1 };
        let vol = PI * PI;
        let heat = HeatCoefficients::new(2, vec![vol / (4.0 * PI), 0.0, -1.0], HeatRemainder::Exponential);
        let s = SpectrumStream::new(src, 0.25, ZetaOrder::Root);
        let d = zeta_data_numeric(&s, &heat, &[0.5, -0.5], 1e-9).unwrap();
        assert!(d.residue(1).abs() < 1e-8);
        assert!((d.residue(2) - vol / (2.0 * PI)).abs() < 1e-9);
        assert!((d.value0 - (-vol * 0.25 / (4.0 * PI) - 1.0)).abs() < 1e-10);
        let sv = shifted_from_base(&s, &heat, 0.5, 1e-8).unwrap();
        assert!((sv.relation - sv.direct).abs() < 1e-8, "{sv:?}");
    }

    #[test]
    fn lattice_enumeration_matches_brute_force() {
        let basis = vec![vec![2.0 * PI, 0.0], vec![0.0, 2.0 * PI]];
        let got = lattice_upto(&basis, 1.0, 1, 50.0);
        let mut want = Vec::new();
        for p in -10i64..=10 {
            for q in -10i64..=10 {
                let v = (p * p + q * q) as f64;
                if v > 0.0 && v <= 50.0 {
                    want.push(Eigen { value: v, mult: 1 });
                }
            }
        }
        let want = merge_ties(want);
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            assert!((a.value - b.value).abs() < 1e-12);
            assert_eq!(a.mult, b.mult);
        }
        assert!((got[0].value - 1.0).abs() < 1e-14 && got[0].mult == 4);
    }

    #[test]
    fn inconsistent_heat_is_reported() {
        let bad = HeatCoefficients::new(1, vec![0.7 / PI.sqrt(), -0.5], HeatRemainder::Exponential);
        let r = zeta_data_numeric(&pi_squares(3000), &bad, &[], 1e-8);
        assert!(matches!(r, Err(ZetaError::InconsistentHeat(_))), "{r:?}");
    }

    #[test]
    fn short_spectrum_is_insufficient() {
        let heat = HeatCoefficients::truncated(1, vec![0.5 / PI.sqrt(), -0.5]);
        let r = zeta_data_numeric(&pi_squares(3), &heat, &[], 1e-10);
        assert!(r.is_err());
    }

    #[test]
    fn doubling_spectrum_stays_within_estimate() {
        let heat = HeatCoefficients::truncated(1, vec![0.5 / PI.sqrt(), -0.5]);
        let a = zeta_data_numeric(&pi_squares(500), &heat, &[], 1e-6).unwrap();
        let b = zeta_data_numeric(&pi_squares(1000), &heat, &[], 1e-6).unwrap();
        assert!((a.deriv0 - b.deriv0).abs() <= a.error_estimate);
        assert!((a.pp[&1] - b.pp[&1]).abs() <= a.error_estimate);
    }

    #[test]
    fn zero_list_engine_half_order() {
        let mu: Vec<f64> = (1..=2000).map(|i| i as f64 * PI).collect();
        let d = zeta_data_zero_list(&mu, ZeroAsymptotics::bessel(0.5, None), &[], 1e-9).unwrap();
        assert!((-d.deriv0 - std::f64::consts::LN_2).abs() < 1e-12);
        assert!((d.pp[&1] - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn tie_merging() {
        let l = merge_ties(vec![
            Eigen { value: 2.0, mult: 1 },
            Eigen { value: 1.0, mult: 2 },
            Eigen { value: 2.0 + 1e-14, mult: 3 },
        ]);
        assert_eq!(l, vec![Eigen { value: 1.0, mult: 2 }, Eigen { value: 2.0, mult: 4 }]);
    }

    #[test]
    fn dual_basis_is_inverse_transpose() {
        let a = vec![vec![2.0, 1.0], vec![0.5, 3.0]];
        let d = dual_basis(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let dot: f64 = (0..2).map(|k| a[i][k] * d[j][k]).sum();
                assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((determinant(&a) - 5.5).abs() < 1e-14);
    }
}
