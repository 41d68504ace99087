//! The self-check suite behind `lumpgeom verify`.

use num_rational::BigRational;
use serde::Serialize;

use crate::actions::{
    action_via_beta, baptista, beta_integral, beta_quadrature, boundary_term, eh_action_by_parts, eh_action_closed,
    eh_action_quadrature, rational_to_f64, relative_error, total_volume_closed, total_volume_quadrature,
};
use crate::error::Result;
use crate::exact::{rat, Cx, QSqrt2, SymSum, SymValue};
use crate::lie_structure::{
    adk_invariance_check, bracket, build_basis, from_coords, inner, j_apply, project_p, PCoords, TangentVector,
    ADK_TOLERANCE,
};
use crate::metric_profiles::{a_profile, profile_jets, volume_density_jet, MetricFamily, MetricKind, MuPoint, Point};
use crate::quadrature::QuadratureOptions;
use crate::real::{Ext, Real};
use crate::ricci::{
    assemble_metric_form, assemble_ricci_form, assemble_ricci_form_perturbed, density_ratio_f, ricci_jets,
    ricci_profile, ricci_via_killing_brackets, scalar_curvature, scalar_from_trace,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn within(name: &str, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, passed: measured <= tolerance, error: None }
    }

    fn exact(name: &str, holds: bool) -> Self {
        Check { name: name.into(), measured: if holds { 0.0 } else { 1.0 }, tolerance: 0.0, passed: holds, error: None }
    }

    fn failed(name: &str, err: &crate::Error) -> Self {
        Check {
            name: name.into(),
            measured: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub family: MetricFamily,
    pub mu_min: f64,
    pub mu_max: f64,
    pub steps: usize,
    pub tol: f64,
    /// Relative perturbation of `C` in the Ricci form fed to the trace.
    pub perturb: f64,
}

/// `steps` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..steps).map(|i| if i + 1 == steps { hi } else { lo * (r * i as f64 / (steps - 1) as f64).exp() }).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn run(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, &e))
}

pub fn run_suite(cfg: &SuiteConfig) -> Vec<Check> {
    let fam = cfg.family;
    let k = fam.k();
    let fs = fam.fs_reference();
    let grid = log_grid(cfg.mu_min, cfg.mu_max, cfg.steps);
    let qopts = QuadratureOptions::relative(cfg.tol);
    let mut out = Vec::new();

    out.push(run("lie: p basis orthonormal", || {
        let b = build_basis(k as usize)?;
        let pb = b.p_basis();
        let mut ok = true;
        for (i, x) in pb.iter().enumerate() {
            for (j, y) in pb.iter().enumerate() {
                ok &= inner(x, y)? == if i == j { QSqrt2::one() } else { QSqrt2::zero() };
            }
        }
        Ok(Check::exact("lie: p basis orthonormal", ok))
    }));
    out.push(run("lie: P_p[Yhat1,Yhat2] = -Y0/sqrt2, P_p[Ycheck1,Ycheck2] = +Y0/sqrt2", || {
        let b = build_basis(k as usize)?;
        let half = b.y0.scale_real(&QSqrt2::inv_sqrt2());
        let ph = project_p(&bracket(&b.yhat[0], &b.yhat[1])?, &b)?;
        let pc = project_p(&bracket(&b.ycheck[0], &b.ycheck[1])?, &b)?;
        Ok(Check::exact(
            "lie: P_p[Yhat1,Yhat2] = -Y0/sqrt2, P_p[Ycheck1,Ycheck2] = +Y0/sqrt2",
            ph == half.scale(&Cx::from_i64(-1)) && pc == half,
        ))
    }));
    out.push(run("lie: J^2 = -1", || {
        let b = build_basis(k as usize)?;
        let mut ok = true;
        for (i, m) in [1.5, 2.0, 7.25, 1e3].iter().enumerate() {
            let mu = BigRational::from_float(*m).expect("finite");
            let g = |a: i64, c: i64| Cx::gaussian(rat(a, 3), rat(c + i as i64, 5));
            let c = PCoords {
                lambda: QSqrt2::new(rat(1, 7), rat(2, 3)),
                x: g(1, -2),
                y: g(-4, 1),
                u: (0..k as i64 - 1).map(|j| g(j, 2)).collect(),
                v: (0..k as i64 - 1).map(|j| g(3, -j)).collect(),
            };
            let t = TangentVector { dmu: QSqrt2::new(rat(-2, 9), rat(1, 4)), p: from_coords(&c, &mu, k as usize)? };
            let jj = j_apply(&j_apply(&t, &b, &mu)?, &b, &mu)?;
            ok &= jj.dmu == -&t.dmu && jj.p == t.p.scale(&Cx::from_i64(-1));
        }
        Ok(Check::exact("lie: J^2 = -1", ok))
    }));
    out.push(run("lie: Ad(K) preserves the invariant subspaces", || {
        let r = adk_invariance_check(k as usize, 8, 0x5eed)?;
        Ok(Check::within("lie: Ad(K) preserves the invariant subspaces", r.max_residual, ADK_TOLERANCE))
    }));
    out.push(run("ricci: C from Killing brackets", || {
        let b = build_basis(k as usize)?;
        let mut worst = 0.0f64;
        for &mu in &grid {
            let kr = ricci_via_killing_brackets(&fam, &b, MuPoint::Finite(mu))?;
            let c = ricci_profile(&fam).c(MuPoint::Finite(mu))?.value;
            worst = worst.max((kr.c - c).abs() / c.abs().max(1.0)).max(rel(kr.d, ricci_profile(&fam).d));
        }
        Ok(Check::within("ricci: C from Killing brackets", worst, 1e-12))
    }));
    out.push(run("jets: derivatives vs finite differences", || {
        Ok(Check::within("jets: derivatives vs finite differences", jet_fd_error(&fam, &grid)?, 1e-6))
    }));
    out.push(run("ricci: kappa vs trace(gamma^-1 rho)", || {
        let mut worst = 0.0f64;
        for &mu in &grid {
            let p = MuPoint::Finite(mu);
            let g = assemble_metric_form(&fam, p)?;
            let r = if cfg.perturb == 0.0 {
                assemble_ricci_form(&fam, p)?
            } else {
                assemble_ricci_form_perturbed(&fam, p, cfg.perturb)?
            };
            worst = worst.max(rel(scalar_from_trace(&g, &r)?, scalar_curvature(&fam, p)?));
        }
        Ok(Check::within("ricci: kappa vs trace(gamma^-1 rho)", worst, 1e-8))
    }));
    out.push(run("ricci: Fubini-Study is Einstein", || {
        let lambda = fs.params().c * (k as f64 + 1.0);
        let mut worst = 0.0f64;
        for &mu in &grid {
            let p = MuPoint::Finite(mu);
            let diff =
                (assemble_ricci_form(&fs, p)?.entries() - assemble_metric_form(&fs, p)?.entries() * lambda).amax();
            worst = worst.max(diff).max(rel(scalar_curvature(&fs, p)?, lambda * (4.0 * k as f64 + 2.0)));
        }
        Ok(Check::within("ricci: Fubini-Study is Einstein", worst, 1e-10))
    }));
    out.push(run("limits: A(1e4) -> 2B", || {
        let a = a_profile(&fam, MuPoint::Finite(1e4))?.value;
        Ok(Check::within("limits: A(1e4) -> 2B", (a / (2.0 * fam.b()) - 1.0).abs(), 1e-6))
    }));
    out.push(run("limits: (4(k+1) - C) ln mu / 2k -> 1", || {
        // on L2, 4(k+1) - C decays like 2k / ln mu; FS has the gap 8(k+1)/(mu^2+1)
        let law = |mu: f64| -> Result<f64> {
            let gap = ricci_jets::<f64>(&fam, Point::At(mu))?.gap.value();
            Ok(match fam.kind() {
                MetricKind::L2 => gap * mu.ln() / (2.0 * k as f64),
                MetricKind::FS => gap * (mu * mu + 1.0) / (8.0 * (k as f64 + 1.0)),
            })
        };
        let (near, far) = (law(1e8)?, law(1e16)?);
        let measured = if (far - 1.0).abs() <= (near - 1.0).abs() { (far - 1.0).abs() } else { f64::INFINITY };
        Ok(Check::within("limits: (4(k+1) - C) ln mu / 2k -> 1", measured, 0.05))
    }));
    out.push(run("limits: boundary term vanishes", || {
        let b1 = boundary_term(&fam, MuPoint::Finite(1.0 + 1e-4))?.abs();
        let b2 = boundary_term(&fam, MuPoint::Finite(1e8))?.abs();
        Ok(Check::within("limits: boundary term vanishes", b1.max(b2), 1e-6))
    }));
    out.push(run("actions: volume quadrature vs closed form", || {
        let q = total_volume_quadrature(&fam, qopts)?;
        Ok(Check::within(
            "actions: volume quadrature vs closed form",
            relative_error(q.value, &total_volume_closed(&fam)?),
            1e-6,
        ))
    }));
    out.push(run("actions: action quadrature vs integration by parts", || {
        let q = eh_action_quadrature(&fam, qopts)?;
        Ok(Check::within(
            "actions: action quadrature vs integration by parts",
            relative_error(q.value, &eh_action_by_parts(&fam)?),
            1e-6,
        ))
    }));
    out.push(run("actions: FS action by parts equals Einstein identity", || {
        Ok(Check::exact(
            "actions: FS action by parts equals Einstein identity",
            eh_action_by_parts(&fs)? == eh_action_closed(&fs)?,
        ))
    }));
    out.push(run("actions: change of variables", || {
        // the substitution is specific to the L2 profile
        let l2 = match fam.kind() {
            MetricKind::L2 => fam,
            MetricKind::FS => MetricFamily::l2(crate::metric_profiles::ModelParams::standard(k)?),
        };
        Ok(Check::exact("actions: change of variables", action_via_beta(&l2)? == eh_action_closed(&l2)?))
    }));
    out.push(run("actions: conjectured formulas at n=1, g=0", || {
        let pi = SymValue::pi();
        let mut ok = true;
        for kk in 2..=10 {
            let f = MetricFamily::l2(crate::metric_profiles::ModelParams::standard(kk)?);
            let b = baptista(1, kk, 0, &pi)?;
            let neg = SymValue::integer(-1);
            ok &= (&b.h + &SymSum::from(eh_action_closed(&f)? * neg.clone())).is_zero();
            ok &= (&b.vol + &SymSum::from(total_volume_closed(&f)? * neg)).is_zero();
        }
        Ok(Check::exact("actions: conjectured formulas at n=1, g=0", ok))
    }));
    out.push(run("actions: beta integral vs quadrature", || {
        let mut worst = 0.0f64;
        for kk in 2..=8 {
            let q = beta_quadrature(kk, QuadratureOptions::relative(1e-12))?;
            worst = worst.max(rel(q.value, rational_to_f64(&beta_integral(kk)?)));
        }
        Ok(Check::within("actions: beta integral vs quadrature", worst, 1e-10))
    }));
    out
}

/// Worst relative error of the jet derivative channels of `A`, `V`, `C`
/// and `F` against central differences of their values in extended
/// precision (`h = 1e-5 mu`). Derivatives passing near zero are measured
/// against `|value| / mu^n`.
pub fn jet_fd_error(fam: &MetricFamily, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    let central = |f: &dyn Fn(Ext) -> Result<Ext>, mu: f64| -> Result<(f64, f64)> {
        let m = Ext::from_f64(mu);
        let h = Ext::from_f64(1e-5 * mu);
        let (fp, f0, fm) = (f(m + h)?, f(m)?, f(m - h)?);
        Ok((((fp - fm) / (h * Ext::from_f64(2.0))).to_f64(), ((fp - f0 * Ext::from_f64(2.0) + fm) / (h * h)).to_f64()))
    };
    for &mu in grid {
        let p = MuPoint::Finite(mu);
        let a: &dyn Fn(Ext) -> Result<Ext> = &|x| Ok(profile_jets(fam, Point::At(x), 0)?.a.value());
        let v: &dyn Fn(Ext) -> Result<Ext> = &|x| Ok(volume_density_jet(fam, Point::At(x), 0)?.value());
        let c: &dyn Fn(Ext) -> Result<Ext> = &|x| Ok(ricci_jets(fam, Point::At(x))?.c.value());
        let big_f: &dyn Fn(Ext) -> Result<Ext> = &|x| Ok(ricci_jets(fam, Point::At(x))?.f.value().exp());
        let channels = [
            (a_profile(fam, p)?, a),
            (volume_density_jet::<f64>(fam, Point::At(mu), 2)?.to_jet2(), v),
            (ricci_profile(fam).c(p)?, c),
            (density_ratio_f(fam, p)?, big_f),
        ];
        for (jet, value) in channels {
            let (d1, d2) = central(value, mu)?;
            for (n, got, want) in [(1, jet.d1, d1), (2, jet.d2, d2)] {
                let scale = want.abs().max(jet.value.abs() / mu.powi(n));
                let e = if scale == 0.0 { (got - want).abs() } else { (got - want).abs() / scale };
                worst = worst.max(e);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_profiles::ModelParams;

    fn cfg(kind: MetricKind, perturb: f64) -> SuiteConfig {
        SuiteConfig {
            family: MetricFamily::new(kind, ModelParams::standard(2).unwrap()),
            mu_min: 1.01,
            mu_max: 1e3,
            steps: 12,
            tol: 1e-10,
            perturb,
        }
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1.01, 1e3, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1.01);
        assert_eq!(g[4], 1e3);
        assert_eq!(log_grid(2.0, 8.0, 2), vec![2.0, 8.0]);
    }

    #[test]
    fn default_suites_pass() {
        for kind in [MetricKind::L2, MetricKind::FS] {
            for c in run_suite(&cfg(kind, 0.0)) {
                assert!(c.passed, "{kind:?}: {c:?}");
            }
        }
    }

    #[test]
    fn perturbation_trips_the_trace_check() {
        let checks = run_suite(&cfg(MetricKind::L2, 1e-3));
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert_eq!(failed, vec!["ricci: kappa vs trace(gamma^-1 rho)"]);
    }
}
