//! Total volume and Einstein-Hilbert action: exact closed forms in
//! `q pi^p 2^(r/2)` arithmetic and the same quantities by quadrature over
//! the orbit space.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, int, SymSum, SymValue};
use crate::metric_profiles::{profile_jets, volume_density_jet, MetricFamily, MetricKind, MuPoint, Point};
use crate::quadrature::{integrate, integrate_improper, QuadratureOptions, QuadratureResult};
use crate::ricci::{ricci_jets, scalar_curvature_at};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    Closed,
    Quadrature,
}

/// A volume or action: exact, or a quadrature estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum ActionValue {
    Exact(SymValue),
    Numeric(QuadratureResult),
}

impl ActionValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ActionValue::Exact(v) => v.to_f64(),
            ActionValue::Numeric(r) => r.value,
        }
    }

    pub fn exact(&self) -> Option<&SymValue> {
        match self {
            ActionValue::Exact(v) => Some(v),
            ActionValue::Numeric(_) => None,
        }
    }
}

fn fact(n: u32) -> BigRational {
    BigRational::from_integer(factorial(n as u64))
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::precondition(format!("k = {k}: need k >= 2")));
    }
    Ok(())
}

/// Volume of the principal orbit `G/K`: `pi^(2k+1) / (sqrt 2 (k-1)! k!)`.
pub fn vol_gk(k: u32) -> Result<SymValue> {
    check_k(k)?;
    Ok(SymValue::new((fact(k - 1) * fact(k)).recip(), 2 * k as i32 + 1, -1))
}

/// `B` as an exact constant, from the exact binary values of the curvatures.
pub fn b_exact(family: &MetricFamily) -> Result<SymValue> {
    let p = family.params();
    Ok(match family.kind() {
        MetricKind::L2 => {
            let c12 = SymValue::from_f64(p.c1)? * SymValue::from_f64(p.c2)?;
            SymValue::integer(8) * SymValue::pi() * c12.recip().expect("c1 c2 > 0")
        }
        MetricKind::FS => SymValue::integer(2) * SymValue::from_f64(p.c)?.recip().expect("c > 0"),
    })
}

/// `(2 B pi)^(2k+1) / (2k+1)!`.
pub fn total_volume_closed(family: &MetricFamily) -> Result<SymValue> {
    let k = family.k();
    let two_b_pi = SymValue::integer(2) * b_exact(family)? * SymValue::pi();
    let num = two_b_pi.powi(2 * k as i32 + 1).expect("B > 0");
    Ok(num * SymValue::rational(fact(2 * k + 1).recip()))
}

/// `Vol(G/K) int_1^inf V(mu) dmu`.
pub fn total_volume_quadrature(family: &MetricFamily, opts: QuadratureOptions) -> Result<QuadratureResult> {
    let r = integrate_improper(
        |mu| volume_density_jet::<f64>(family, Point::At(mu), 0).map(|v| v.value()).unwrap_or(f64::NAN),
        opts,
    )?;
    Ok(scale_result(r, vol_gk(family.k())?.to_f64()))
}

fn scale_result(r: QuadratureResult, s: f64) -> QuadratureResult {
    QuadratureResult { value: r.value * s, error_estimate: r.error_estimate * s.abs(), evaluations: r.evaluations }
}

pub fn total_volume(family: &MetricFamily, mode: Mode, opts: QuadratureOptions) -> Result<ActionValue> {
    Ok(match mode {
        Mode::Closed => ActionValue::Exact(total_volume_closed(family)?),
        Mode::Quadrature => ActionValue::Numeric(total_volume_quadrature(family, opts)?),
    })
}

/// Closed Einstein-Hilbert action. L2: `2^(2k+2) pi^(2k+1) (k+1) B^(2k) / (2k)!`;
/// FS: `c (k+1)(4k+2) Vol` since the metric is Einstein.
pub fn eh_action_closed(family: &MetricFamily) -> Result<SymValue> {
    let k = family.k();
    let kp1 = SymValue::integer(k as i64 + 1);
    match family.kind() {
        MetricKind::L2 => {
            let b = b_exact(family)?.powi(2 * k as i32).expect("B > 0");
            let pre = SymValue::new(
                BigRational::from_integer(BigInt::one() << (2 * k + 2)) / fact(2 * k),
                2 * k as i32 + 1,
                0,
            );
            Ok(pre * kp1 * b)
        }
        MetricKind::FS => {
            let lambda = SymValue::from_f64(family.params().c)? * kp1;
            Ok(lambda * SymValue::integer(4 * k as i64 + 2) * total_volume_closed(family)?)
        }
    }
}

/// The action obtained by integrating `kappa V` by parts with the scalar
/// curvature of [`crate::ricci::scalar_curvature`]:
/// `2^(2k+3) pi^(2k+1) (k+1) B^(2k) / (2k)!`. The boundary term
/// `A^2 C (B^2 - A^2/4)^(k-1)` vanishes at both ends for both families, so
/// this holds for each; on FS it reproduces `c (k+1)(4k+2) Vol`. It is
/// twice [`eh_action_closed`] on L2.
pub fn eh_action_by_parts(family: &MetricFamily) -> Result<SymValue> {
    let k = family.k();
    let b = b_exact(family)?.powi(2 * k as i32).expect("B > 0");
    let pre = SymValue::new(BigRational::from_integer(BigInt::one() << (2 * k + 3)) / fact(2 * k), 2 * k as i32 + 1, 0);
    Ok(pre * SymValue::integer(k as i64 + 1) * b)
}

/// `kappa(mu) V(mu)`, the integrand of the action.
pub fn action_density(family: &MetricFamily, mu: f64) -> Result<f64> {
    let v = volume_density_jet::<f64>(family, Point::At(mu), 0)?.value();
    Ok(scalar_curvature_at::<f64>(family, Point::At(mu))? * v)
}

/// `Vol(G/K) int_1^inf kappa V dmu`.
pub fn eh_action_quadrature(family: &MetricFamily, opts: QuadratureOptions) -> Result<QuadratureResult> {
    let r = integrate_improper(|mu| action_density(family, mu).unwrap_or(f64::NAN), opts)?;
    Ok(scale_result(r, vol_gk(family.k())?.to_f64()))
}

pub fn eh_action(family: &MetricFamily, mode: Mode, opts: QuadratureOptions) -> Result<ActionValue> {
    Ok(match mode {
        Mode::Closed => ActionValue::Exact(eh_action_closed(family)?),
        Mode::Quadrature => ActionValue::Numeric(eh_action_quadrature(family, opts)?),
    })
}

/// `int_0^1 t^2 (1 - t^2)^(k-2) dt = 2^(2k-2) (k-2)! k! / (2k)!`.
pub fn beta_integral(k: u32) -> Result<BigRational> {
    check_k(k)?;
    let two = BigRational::from_integer(BigInt::one() << (2 * k - 2));
    Ok(two * fact(k - 2) * fact(k) / fact(2 * k))
}

/// The same integral by adaptive quadrature.
pub fn beta_quadrature(k: u32, opts: QuadratureOptions) -> Result<QuadratureResult> {
    check_k(k)?;
    integrate(|t| t * t * (1.0 - t * t).powi(k as i32 - 2), 0.0, 1.0, opts)
}

/// The action reassembled from the change of variables `t` along the
/// orbit space: `Vol(G/K) 16 sqrt 2 (k^2 - 1) B^(2k) beta(k)`.
pub fn action_via_beta(family: &MetricFamily) -> Result<SymValue> {
    let k = family.k();
    let b = b_exact(family)?.powi(2 * k as i32).expect("B > 0");
    let lead = SymValue::new(int(16) * int((k * k - 1) as i64), 0, 1);
    Ok(vol_gk(k)? * lead * b * SymValue::rational(beta_integral(k)?))
}

/// Conjectured volume and action of the degree-`n` map space from a genus
/// `g` surface of area `vol_sigma` into `CP^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaptistaValues {
    pub m: u64,
    pub vol: SymSum,
    pub h: SymSum,
}

pub fn baptista(n: u32, k: u32, genus: u32, vol_sigma: &SymValue) -> Result<BaptistaValues> {
    if n < 1 || k < 1 {
        return Err(Error::precondition(format!("n = {n}, k = {k}: need n, k >= 1")));
    }
    if 2 * genus > n {
        return Err(Error::precondition(format!("genus {genus} > n/2 = {n}/2: formula not claimed there")));
    }
    let (n, k, g) = (n as i64, k as i64, genus as i64);
    let m = (k + 1) * (n + 1 - g) + g - 1;
    let kp1_g = SymValue::integer(k + 1).powi(g as i32).expect("nonzero");
    let pv = SymValue::pi() * vol_sigma.clone();
    let pow = |e: i64| pv.powi(e as i32).ok_or_else(|| Error::domain("vol_sigma must be non-zero"));
    let vol = kp1_g.clone() * pow(m)? * SymValue::rational(fact(m as u32).recip());
    let h = SymValue::integer(2)
        * SymValue::pi()
        * kp1_g
        * SymValue::integer(m - 2 * g + 1)
        * pow(m - 1)?
        * SymValue::rational(fact((m - 1) as u32).recip());
    Ok(BaptistaValues { m: m as u64, vol: vol.into(), h: h.into() })
}

/// `A^2 C (B^2 - A^2/4)^(k-1)`, the boundary term of the integration by
/// parts behind the closed action.
pub fn boundary_term(family: &MetricFamily, mu: MuPoint) -> Result<f64> {
    let point = match mu.validated()? {
        MuPoint::One => return Ok(0.0),
        // A -> 2B with C bounded and B^2 - A^2/4 -> 0
        MuPoint::Infinity => return Ok(0.0),
        MuPoint::Finite(x) => Point::At(x),
    };
    let p = profile_jets::<f64>(family, point, 0)?;
    let c = ricci_jets::<f64>(family, point)?.c.value();
    let a = p.a.value();
    Ok(a * a * c * p.b2_minus_a2_over_4().value().powi(family.k() as i32 - 1))
}

/// Relative size of `x` against an exact value, in floating point.
pub fn relative_error(x: f64, exact: &SymValue) -> f64 {
    let e = exact.to_f64();
    ((x - e) / e).abs()
}

/// Exact rational to `f64`, for reports.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
