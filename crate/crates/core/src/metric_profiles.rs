//! The one-parameter profiles `A(mu)`, `B` of the G-invariant Kähler metrics
//! on the moduli space, for the L2 and Fubini-Study families.
//!
//! All evaluations return Taylor jets in `mu`, so `A'`, `A''`, ... come from
//! one code path. The L2 profile is `0/0` at `mu = 1`; there it switches to
//! a Taylor series in `eps = mu - 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, Jet2};
use crate::real::Real;

/// Below this `eps = mu - 1` the L2 profile uses its Taylor series.
pub const SERIES_THRESHOLD: f64 = 0.05;

/// Taylor coefficients of `(mu^4 - 4 mu^2 ln mu - 1)/(mu^2 - 1)^2` in
/// `eps = mu - 1`, exact rationals `(num, den)`, through `eps^13`.
pub const L2_SERIES: [(i64, i64); 14] = [
    (0, 1),
    (2, 3),
    (-1, 3),
    (2, 15),
    (-1, 30),
    (-1, 105),
    (1, 42),
    (-8, 315),
    (1, 45),
    (-62, 3465),
    (16, 1155),
    (-95, 9009),
    (131, 16380),
    (-61, 10010),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MetricKind {
    L2,
    FS,
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricKind::L2 => f.write_str("l2"),
            MetricKind::FS => f.write_str("fs"),
        }
    }
}

/// Dimension `k` of the target `CP^k` and the holomorphic sectional
/// curvatures: `c1` of the domain sphere, `c2` of the target, `c` of the
/// ambient `CP^{2k+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub k: u32,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(k: u32, c1: f64, c2: f64, c: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::precondition(format!("k = {k}: results hold for k >= 2 only")));
        }
        for (name, v) in [("c1", c1), ("c2", c2), ("c", c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::precondition(format!("{name} = {v} must be a positive real")));
            }
        }
        Ok(ModelParams { k, c1, c2, c })
    }

    /// The normalization `c1 = c2 = c = 4`.
    pub fn standard(k: u32) -> Result<Self> {
        Self::new(k, 4.0, 4.0, 4.0)
    }
}

/// A metric family together with its constant `B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricFamily {
    kind: MetricKind,
    params: ModelParams,
    b: f64,
}

impl MetricFamily {
    pub fn new(kind: MetricKind, params: ModelParams) -> Self {
        let b = match kind {
            MetricKind::L2 => 8.0 * std::f64::consts::PI / (params.c1 * params.c2),
            MetricKind::FS => 2.0 / params.c,
        };
        MetricFamily { kind, params, b }
    }

    pub fn l2(params: ModelParams) -> Self {
        Self::new(MetricKind::L2, params)
    }

    pub fn fs(params: ModelParams) -> Self {
        Self::new(MetricKind::FS, params)
    }

    /// The Fubini-Study family sharing this family's parameters.
    pub fn fs_reference(&self) -> Self {
        Self::fs(self.params)
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub(crate) fn b_in<T: Real>(&self) -> T {
        match self.kind {
            MetricKind::L2 => T::from_f64(8.0) * T::pi() / (T::from_f64(self.params.c1) * T::from_f64(self.params.c2)),
            MetricKind::FS => T::from_f64(2.0) / T::from_f64(self.params.c),
        }
    }
}

/// A point on the orbit-space half line `[1, inf)`, with the two ends as
/// explicit limit tokens.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MuPoint {
    /// The exceptional orbit `mu = 1` (evaluated as a limit).
    One,
    Finite(f64),
    /// `mu -> inf` (evaluated as a limit).
    Infinity,
}

impl MuPoint {
    /// Validate a raw value: `1.0` becomes [`MuPoint::One`]; `+inf` is
    /// rejected (use [`MuPoint::Infinity`] explicitly).
    pub fn checked(mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain(format!("mu = {mu} is not finite; use the Infinity token")));
        }
        if mu < 1.0 {
            return Err(Error::domain(format!("mu = {mu} < 1")));
        }
        Ok(if mu == 1.0 { MuPoint::One } else { MuPoint::Finite(mu) })
    }

    pub(crate) fn interior(self) -> Result<f64> {
        match self {
            MuPoint::Finite(mu) if mu > 1.0 && mu.is_finite() => Ok(mu),
            MuPoint::Finite(mu) => Err(Error::domain(format!("mu = {mu} must satisfy 1 < mu < inf"))),
            MuPoint::One => Err(Error::domain("operation undefined on the exceptional orbit mu = 1")),
            MuPoint::Infinity => Err(Error::domain("operation needs a finite mu")),
        }
    }

    pub(crate) fn validated(self) -> Result<Self> {
        match self {
            MuPoint::Finite(mu) => MuPoint::checked(mu),
            p => Ok(p),
        }
    }
}

/// Evaluation point in a given scalar backend.
#[derive(Clone, Copy, Debug)]
pub enum Point<T> {
    One,
    At(T),
    Infinity,
}

impl Point<f64> {
    pub fn from_mu(mu: MuPoint) -> Result<Self> {
        Ok(match mu.validated()? {
            MuPoint::One => Point::One,
            MuPoint::Finite(x) => Point::At(x),
            MuPoint::Infinity => Point::Infinity,
        })
    }
}

/// `A` and the half gap `B - A/2` as jets in `mu`. The half gap is computed
/// from its own closed form where `A` is close to `2B`.
#[derive(Clone, Copy, Debug)]
pub struct ProfileJets<T> {
    pub a: Jet<T>,
    pub half_gap: Jet<T>,
    pub b: T,
}

impl<T: Real> ProfileJets<T> {
    /// `A3 = B + A/2`.
    pub fn a3(&self) -> Jet<T> {
        self.a.scale(T::from_f64(0.5)).add_scalar(self.b)
    }

    /// `A4 = B - A/2`.
    pub fn a4(&self) -> Jet<T> {
        self.half_gap
    }

    /// `B^2 - A^2/4 = A3 * A4`.
    pub fn b2_minus_a2_over_4(&self) -> Jet<T> {
        self.a3() * self.a4()
    }
}

/// Jets of the profile of `family` at `point`, to the given order.
pub fn profile_jets<T: Real>(family: &MetricFamily, point: Point<T>, order: usize) -> Result<ProfileJets<T>> {
    let b = family.b_in::<T>();
    let two = T::from_f64(2.0);
    let (eps0, mu0) = match point {
        Point::Infinity => {
            return Ok(ProfileJets { a: Jet::constant(two * b, order), half_gap: Jet::constant(T::zero(), order), b })
        }
        Point::One => (T::zero(), T::one()),
        Point::At(mu) => {
            if !(1.0..f64::INFINITY).contains(&mu.to_f64()) {
                return Err(Error::domain(format!("mu = {:?} outside [1, inf)", mu.to_f64())));
            }
            (mu - T::one(), mu)
        }
    };
    let near_one = eps0.to_f64() < 1.0;
    Ok(match family.kind() {
        MetricKind::L2 => {
            let scale = two * b;
            let (a, half_gap) = if eps0.to_f64() < SERIES_THRESHOLD {
                let a = l2_series_jet(Jet::variable(eps0, order)).scale(scale);
                (a, a.scale(-T::from_f64(0.5)).add_scalar(b))
            } else if near_one {
                let e = Jet::variable(eps0, order);
                // mu^4 - 1 = e (4 + 6e + 4e^2 + e^3), mu^2 = (1 + e)^2
                let poly = e.polynomial(&[T::from_f64(4.0), T::from_f64(6.0), T::from_f64(4.0), T::one()]);
                let mu2 = (e + T::one()).powi(2);
                let num = e * poly - mu2 * e.ln_1p().scale(T::from_f64(4.0));
                let den = (e * (e + two)).powi(2);
                let a = (num / den).scale(scale);
                (a, a.scale(-T::from_f64(0.5)).add_scalar(b))
            } else {
                let m = Jet::variable(mu0, order);
                let w2 = m.recip().powi(2);
                let lm = m.ln();
                let den = (-w2 + T::one()).powi(2);
                let num = -(w2 * lm).scale(T::from_f64(4.0)) - w2 * w2 + T::one();
                let a = (num / den).scale(scale);
                // B - A/2 = 2B w^2 (2 ln mu - 1 + w^2) / (1 - w^2)^2
                let gap = (w2 * (lm.scale(two) + w2 - T::one()) / den).scale(scale);
                (a, gap)
            };
            ProfileJets { a, half_gap, b }
        }
        MetricKind::FS => {
            let four_over_c = T::from_f64(4.0) / T::from_f64(family.params().c);
            let (r, inv) = fs_shape(point, order)?;
            ProfileJets { a: r.scale(four_over_c), half_gap: inv.scale(four_over_c), b }
        }
    })
}

/// `r = (mu^2 - 1)/(mu^2 + 1)` and `1/(mu^2 + 1)` as jets, in forms without
/// cancellation at either end. Undefined at infinity.
pub(crate) fn fs_shape<T: Real>(point: Point<T>, order: usize) -> Result<(Jet<T>, Jet<T>)> {
    let two = T::from_f64(2.0);
    let mu0 = match point {
        Point::One => T::one(),
        Point::At(mu) => mu,
        Point::Infinity => return Err(Error::domain("shape jets need a finite mu")),
    };
    let eps0 = mu0 - T::one();
    Ok(if eps0.to_f64() < 1.0 {
        let e = Jet::variable(eps0, order);
        let mu2p1 = e.polynomial(&[two, two, T::one()]);
        ((e * (e + two)) / mu2p1, mu2p1.recip())
    } else {
        let m = Jet::variable(mu0, order);
        let w2 = m.recip().powi(2);
        let d = w2 + T::one();
        ((-w2 + T::one()) / d, w2 / d)
    })
}

fn l2_series_jet<T: Real>(eps: Jet<T>) -> Jet<T> {
    let coeffs: Vec<T> = L2_SERIES.iter().map(|&(n, d)| T::from_i64(n) / T::from_i64(d)).collect();
    eps.polynomial(&coeffs)
}

/// The L2 profile from its Taylor series in `eps = mu - 1` (value only),
/// without the `16 pi / (c1 c2)` prefactor.
pub fn l2_series_normalized<T: Real>(eps: T) -> T {
    l2_series_jet(Jet::variable(eps, 0)).value()
}

/// `(mu^4 - 4 mu^2 ln mu - 1)/(mu^2 - 1)^2` exactly as written, no
/// rearrangement. Use with [`crate::real::Ext`] near `mu = 1`.
pub fn l2_literal_normalized<T: Real>(mu: T) -> T {
    let mu2 = mu * mu;
    let num = mu2 * mu2 - T::from_f64(4.0) * mu2 * mu.ln() - T::one();
    let den = (mu2 - T::one()) * (mu2 - T::one());
    num / den
}

fn require_kind(family: &MetricFamily, kind: MetricKind) -> Result<()> {
    if family.kind() != kind {
        return Err(Error::precondition(format!("expected the {kind} family, got {}", family.kind())));
    }
    Ok(())
}

fn profile_jet2(family: &MetricFamily, mu: MuPoint) -> Result<Jet2> {
    let p = profile_jets::<f64>(family, Point::from_mu(mu)?, 2)?;
    Ok(p.a.to_jet2())
}

/// `A_L2(mu)` with its first two derivatives.
pub fn a_l2(family: &MetricFamily, mu: MuPoint) -> Result<Jet2> {
    require_kind(family, MetricKind::L2)?;
    profile_jet2(family, mu)
}

/// `A_FS(mu)` with its first two derivatives.
pub fn a_fs(family: &MetricFamily, mu: MuPoint) -> Result<Jet2> {
    require_kind(family, MetricKind::FS)?;
    profile_jet2(family, mu)
}

/// `A(mu)` for either family.
pub fn a_profile(family: &MetricFamily, mu: MuPoint) -> Result<Jet2> {
    profile_jet2(family, mu)
}

/// The five metric coefficients `A0 .. A4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl Coefficients {
    /// The Kähler pattern: `c0 = s'/(4 mu)`, `c1 = c2 = s (mu^2-1)/(mu^2+1)`,
    /// `c3 = t + s/2`, `c4 = t - s/2` for a profile `s` and constant `t`.
    pub(crate) fn from_pattern(mu: f64, s: f64, ds: f64, t: f64, t_minus_half_s: f64) -> Self {
        let r = (mu * mu - 1.0) / (mu * mu + 1.0);
        let a1 = s * r;
        Coefficients { a0: ds / (4.0 * mu), a1, a2: a1, a3: t + 0.5 * s, a4: t_minus_half_s }
    }
}

/// `A0 .. A4` at an interior point `1 < mu < inf`.
pub fn coefficients(family: &MetricFamily, mu: MuPoint) -> Result<Coefficients> {
    let x = mu.validated()?.interior()?;
    let p = profile_jets::<f64>(family, Point::At(x), 1)?;
    Ok(Coefficients::from_pattern(x, p.a.value(), p.a.derivative(1), p.b, p.half_gap.value()))
}

/// Volume density `V(mu) = A^2 (B^2 - A^2/4)^(k-1) A' / sqrt 2` as a jet.
pub fn volume_density_jet<T: Real>(family: &MetricFamily, point: Point<T>, order: usize) -> Result<Jet<T>> {
    let p = profile_jets(family, point, order + 1)?;
    let da = p.a.differentiate();
    let v = p.a.powi(2) * p.b2_minus_a2_over_4().powi(family.k() - 1) * da;
    Ok(v.scale(T::from_f64(2.0).sqrt().recip()))
}

/// Volume density `V(mu)`.
pub fn volume_density(family: &MetricFamily, mu: MuPoint) -> Result<f64> {
    Ok(volume_density_jet::<f64>(family, Point::from_mu(mu)?, 0)?.value())
}
