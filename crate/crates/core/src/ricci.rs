//! Ricci data of the invariant Kähler metrics: the density ratio `F`
//! against Fubini-Study, the Ricci profile `C(mu)` and constant `D`, the
//! metric and Ricci forms on the `(4k+2)`-dimensional tangent space, and
//! the scalar curvature by closed formula and by trace.

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{Jet, Jet2, WORKING_ORDER};
use crate::lie_structure::{killing_coefficients, mu_generator_coords, BasisSet};
use crate::metric_profiles::{
    fs_shape, profile_jets, Coefficients, MetricFamily, MetricKind, MuPoint, Point, ProfileJets,
};
use crate::real::Real;

/// Above this size `C(1)` is not rounding noise and the `mu = 1` limit is
/// refused rather than forced.
const EXCEPTIONAL_ORBIT_SLACK: f64 = 1e-10;

/// Largest finite `mu` for Ricci quantities: beyond it the third
/// derivative of `A` underflows `f64`.
pub const MU_RICCI_MAX: f64 = 1e40;

/// Jets of everything the Ricci computation needs at one point.
#[derive(Clone, Copy, Debug)]
pub struct RicciJets<T> {
    pub profile: ProfileJets<T>,
    /// `ln F`.
    pub f: Jet<T>,
    /// `f' = F'/F`.
    pub df: Jet<T>,
    pub c: Jet<T>,
    /// `4(k+1) - C`, formed without cancellation at large `mu`.
    pub gap: Jet<T>,
    pub d: T,
}

impl<T: Real> RicciJets<T> {
    /// `D - C/2`.
    pub fn c4(&self) -> Jet<T> {
        self.gap.scale(T::from_f64(0.5))
    }
}

/// Ricci jets at a finite point (or the exceptional orbit).
pub fn ricci_jets<T: Real>(family: &MetricFamily, point: Point<T>) -> Result<RicciJets<T>> {
    let order = WORKING_ORDER;
    let mu0 = match point {
        Point::One => T::one(),
        Point::At(mu) if mu.to_f64() <= MU_RICCI_MAX => mu,
        Point::At(mu) => {
            return Err(Error::domain(format!("mu = {:e} beyond {MU_RICCI_MAX:e}; use the limit", mu.to_f64())))
        }
        Point::Infinity => return Err(Error::domain("Ricci jets need a finite mu")),
    };
    let k = family.k();
    let kp1 = T::from_i64(k as i64 + 1);
    let profile = profile_jets(family, point, order)?;
    let (r, inv) = fs_shape(point, order)?;
    let mu = Jet::variable(mu0, order);
    let f = match family.kind() {
        MetricKind::FS => Jet::constant(T::zero(), order - 1),
        MetricKind::L2 => {
            let fs = profile_jets(&family.fs_reference(), point, order)?;
            let ratio_a = profile.a.div_removable(&fs.a);
            let ratio_p = profile.b2_minus_a2_over_4() / fs.b2_minus_a2_over_4();
            let ratio_da = profile.a.differentiate() / fs.a.differentiate();
            ratio_a.ln().scale(T::from_f64(2.0)) + ratio_p.ln().scale(T::from_i64(k as i64 - 1)) + ratio_da.ln()
        }
    };
    let df = f.differentiate();
    let two_mu_df = (mu * df).scale(T::from_f64(2.0));
    let mut c = r.scale(T::from_f64(4.0) * kp1) - two_mu_df;
    let gap = inv.scale(T::from_f64(8.0) * kp1) + two_mu_df;
    if matches!(point, Point::One) {
        // Kähler profiles vanish on the exceptional orbit; what remains is
        // rounding in f'(1).
        let c0 = c.value().to_f64();
        if c0.abs() > EXCEPTIONAL_ORBIT_SLACK {
            return Err(Error::Singular(format!("C(1) = {c0} does not vanish")));
        }
        c = c.add_scalar(-c.value());
    }
    Ok(RicciJets { profile, f, df, c, gap, d: T::from_f64(2.0) * kp1 })
}

fn interior_f64(mu: MuPoint) -> Result<f64> {
    mu.validated()?.interior()
}

/// `F = V / V_FS` with derivatives, for `1 < mu < inf`.
pub fn density_ratio_f(family: &MetricFamily, mu: MuPoint) -> Result<Jet2> {
    let x = interior_f64(mu)?;
    if family.kind() == MetricKind::FS {
        return Ok(Jet2::constant(1.0));
    }
    let rj = ricci_jets::<f64>(family, Point::At(x))?;
    let v = rj.f.value().exp();
    let (d1, d2) = (rj.f.derivative(1), rj.f.derivative(2));
    Ok(Jet2 { value: v, d1: v * d1, d2: v * (d2 + d1 * d1) })
}

/// `f' = F'/F`.
pub fn log_deriv_f(family: &MetricFamily, mu: MuPoint) -> Result<f64> {
    let x = interior_f64(mu)?;
    if family.kind() == MetricKind::FS {
        return Ok(0.0);
    }
    Ok(ricci_jets::<f64>(family, Point::At(x))?.df.value())
}

/// The Ricci profile `C(mu)` and constant `D = 2(k+1)` of a family.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RicciProfile {
    family: MetricFamily,
    pub d: f64,
}

pub fn ricci_profile(family: &MetricFamily) -> RicciProfile {
    RicciProfile { family: *family, d: 2.0 * (family.k() as f64 + 1.0) }
}

impl RicciProfile {
    /// `C(mu)` with derivatives; the end points are limits.
    pub fn c(&self, mu: MuPoint) -> Result<Jet2> {
        match mu.validated()? {
            MuPoint::Infinity => Ok(Jet2::constant(2.0 * self.d)),
            MuPoint::One => Ok(ricci_jets::<f64>(&self.family, Point::One)?.c.to_jet2()),
            MuPoint::Finite(x) => Ok(ricci_jets::<f64>(&self.family, Point::At(x))?.c.to_jet2()),
        }
    }

    /// `C0 .. C4` in the pattern of the metric coefficients.
    pub fn coefficients(&self, mu: MuPoint) -> Result<Coefficients> {
        let x = interior_f64(mu)?;
        let rj = ricci_jets::<f64>(&self.family, Point::At(x))?;
        Ok(Coefficients::from_pattern(x, rj.c.value(), rj.c.derivative(1), rj.d, rj.c4().value()))
    }
}

/// `C0 .. C4` at `1 < mu < inf`.
pub fn ricci_coefficients(family: &MetricFamily, mu: MuPoint) -> Result<Coefficients> {
    ricci_profile(family).coefficients(mu)
}

/// A real symmetric bilinear form in the frame
/// `{d/dmu, Y0, Y1..Y4, Yhat_1..Yhat_2k-2, Ycheck_1..Ycheck_2k-2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricForm {
    entries: DMatrix<f64>,
}

impl SymmetricForm {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension(format!("{}x{} form", entries.nrows(), entries.ncols())));
        }
        Ok(SymmetricForm { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries == self.entries.transpose()
    }

    /// `P^T S P`: the same form expressed in the frame `P`'s columns.
    pub fn congruence(&self, p: &DMatrix<f64>) -> Result<Self> {
        if p.nrows() != self.dim() || !p.is_square() {
            return Err(Error::Dimension("congruence matrix does not match the form".into()));
        }
        let m = p.transpose() * &self.entries * p;
        Ok(SymmetricForm { entries: (&m + m.transpose()) * 0.5 })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).amax()
    }
}

/// Lay out a form with the Kähler coefficient pattern `c`.
///
/// The `Y1..Y4` block is built from the `p_mu` and `p~_mu` pieces: with
/// `T` the generator coordinates, the block is
/// `T^-T diag(c1 G_mu, c2 G~_mu) T^-1`, `G` the inner-product Grams.
fn assemble(mu: f64, k: u32, c: &Coefficients) -> Result<SymmetricForm> {
    let n = 4 * k as usize + 2;
    let mut m = DMatrix::zeros(n, n);
    m[(0, 0)] = c.a0;
    m[(1, 1)] = 8.0 * mu * mu * c.a0;
    let rows = mu_generator_coords(mu);
    let t = DMatrix::from_fn(4, 4, |i, j| rows[j][i]);
    let gram = |a: usize, b: usize| (0..4).map(|l| rows[a][l] * rows[b][l]).sum::<f64>();
    let mut inner_block = DMatrix::zeros(4, 4);
    for (off, coef) in [(0usize, c.a1), (2usize, c.a2)] {
        for i in 0..2 {
            for j in 0..2 {
                inner_block[(off + i, off + j)] = coef * gram(off + i, off + j);
            }
        }
    }
    let t_inv = t.try_inverse().ok_or_else(|| Error::Singular(format!("p_mu and p~_mu degenerate at mu = {mu}")))?;
    let block = t_inv.transpose() * inner_block * &t_inv;
    for i in 0..4 {
        for j in 0..4 {
            // symmetrize away the rounding of the two inverses
            m[(2 + i, 2 + j)] = 0.5 * (block[(i, j)] + block[(j, i)]);
        }
    }
    let side = 2 * (k as usize - 1);
    for i in 0..side {
        m[(6 + i, 6 + i)] = c.a3;
        m[(6 + side + i, 6 + side + i)] = c.a4;
    }
    SymmetricForm::new(m)
}

/// The metric `gamma_mu` at `1 < mu < inf`.
pub fn assemble_metric_form(family: &MetricFamily, mu: MuPoint) -> Result<SymmetricForm> {
    let x = interior_f64(mu)?;
    assemble(x, family.k(), &crate::metric_profiles::coefficients(family, MuPoint::Finite(x))?)
}

/// The Ricci form `rho_mu` at `1 < mu < inf`.
pub fn assemble_ricci_form(family: &MetricFamily, mu: MuPoint) -> Result<SymmetricForm> {
    assemble_ricci_form_perturbed(family, mu, 0.0)
}

/// `rho_mu` with `C` and `C'` scaled by `1 + eps`; `D` is left alone. A
/// sensitivity probe for the trace oracle.
pub fn assemble_ricci_form_perturbed(family: &MetricFamily, mu: MuPoint, eps: f64) -> Result<SymmetricForm> {
    let x = interior_f64(mu)?;
    let rj = ricci_jets::<f64>(family, Point::At(x))?;
    let s = 1.0 + eps;
    let c = rj.c.value() * s;
    let c4 = if eps == 0.0 { rj.c4().value() } else { rj.d - 0.5 * c };
    let coeffs = Coefficients::from_pattern(x, c, rj.c.derivative(1) * s, rj.d, c4);
    assemble(x, family.k(), &coeffs)
}

/// `tr(gamma^-1 rho)`, via a Cholesky factor of `gamma`.
pub fn scalar_from_trace(gamma: &SymmetricForm, rho: &SymmetricForm) -> Result<f64> {
    if gamma.dim() != rho.dim() {
        return Err(Error::Dimension(format!("gamma is {0}x{0}, rho is {1}x{1}", gamma.dim(), rho.dim())));
    }
    let chol =
        gamma.entries.clone().cholesky().ok_or_else(|| Error::Singular("gamma is not positive definite".into()))?;
    Ok(chol.solve(&rho.entries).trace())
}

/// Closed formula for the scalar curvature,
/// `2[2C/A + C'/A'] + 2(k-1)[(4(k+1)+C)/(2B+A) + (4(k+1)-C)/(2B-A)]`.
pub fn scalar_curvature_at<T: Real>(family: &MetricFamily, point: Point<T>) -> Result<T> {
    let rj = ricci_jets(family, point)?;
    let p = &rj.profile;
    let two = T::from_f64(2.0);
    let c_over_a = rj.c.div_removable(&p.a).value();
    let dc_over_da = rj.c.differentiate().value() / p.a.differentiate().value();
    let four_kp1 = two * rj.d;
    let plus = (four_kp1 + rj.c.value()) / (two * p.b + p.a.value());
    let minus = rj.gap.value() / (two * p.half_gap.value());
    let km1 = T::from_i64(family.k() as i64 - 1);
    Ok(two * (two * c_over_a + dc_over_da) + two * km1 * (plus + minus))
}

/// Scalar curvature `kappa(mu)`, including both end points where they exist.
/// On the L2 family `kappa` grows without bound as `mu -> inf`.
pub fn scalar_curvature(family: &MetricFamily, mu: MuPoint) -> Result<f64> {
    let k = family.k() as f64;
    match (mu.validated()?, family.kind()) {
        // C = c(k+1) A identically: every ratio in the formula is c(k+1).
        (MuPoint::Infinity, MetricKind::FS) => Ok(family.params().c * (k + 1.0) * (4.0 * k + 2.0)),
        (MuPoint::Infinity, MetricKind::L2) => {
            Err(Error::Divergent("the L2 scalar curvature grows like k mu^2 / (K ln^2 mu)".into()))
        }
        (MuPoint::One, _) => scalar_curvature_at::<f64>(family, Point::One),
        (MuPoint::Finite(x), _) => scalar_curvature_at::<f64>(family, Point::At(x)),
    }
}

/// `C` and `D` rebuilt from the Fubini-Study Einstein data and the
/// Killing-field brackets: `C = C_FS + (beta^ - beta') f'`,
/// `D = D_FS + (beta^ + beta') f'/2`. `mu` enters exactly.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KillingRoute {
    pub beta_hat: f64,
    pub beta_check: f64,
    pub c: f64,
    pub d: f64,
}

pub fn ricci_via_killing_brackets(family: &MetricFamily, basis: &BasisSet, mu: MuPoint) -> Result<KillingRoute> {
    let x = interior_f64(mu)?;
    let exact_mu = BigRational::from_float(x).ok_or_else(|| Error::domain("mu has no exact value"))?;
    let (bh, bc) = killing_coefficients(basis, &exact_mu)?;
    let (bh, bc) = (bh.to_f64(), bc.to_f64());
    let kp1 = family.k() as f64 + 1.0;
    let r = (x * x - 1.0) / (x * x + 1.0);
    let df = log_deriv_f(family, MuPoint::Finite(x))?;
    Ok(KillingRoute {
        beta_hat: bh,
        beta_check: bc,
        c: 4.0 * kp1 * r + (bh - bc) * df,
        d: 2.0 * kp1 + 0.5 * (bh + bc) * df,
    })
}
