//! Exit criteria. Each test prints one `PASS`/`FAIL` line, then asserts.

use std::time::{Duration, Instant};

use lumpgeom::actions::{
    baptista, beta_integral, beta_quadrature, boundary_term, eh_action_closed, eh_action_quadrature, rational_to_f64,
    total_volume_closed, total_volume_quadrature,
};
use lumpgeom::exact::{factorial, Cx, QSqrt2, SymSum, SymValue};
use lumpgeom::lie_structure::{bracket, build_basis, inner, j_apply, project_p, PCoords, TangentVector};
use lumpgeom::metric_profiles::{
    a_profile, profile_jets, volume_density_jet, MetricFamily, MetricKind, ModelParams, MuPoint, Point,
};
use lumpgeom::quadrature::QuadratureOptions;
use lumpgeom::real::{Ext, Real};
use lumpgeom::ricci::{
    assemble_metric_form, assemble_ricci_form, density_ratio_f, ricci_jets, ricci_profile, scalar_curvature,
    scalar_from_trace,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Channel<'a> = (&'a str, lumpgeom::jet::Jet2, Box<dyn Fn(Ext) -> Ext + 'a>);

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    println!("{} criterion {id} ({title}): {detail}", if pass { "PASS" } else { "FAIL" });
}

fn family(kind: MetricKind, k: u32) -> MetricFamily {
    MetricFamily::new(kind, ModelParams::standard(k).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `n` points, log-spaced, in `(lo, hi]`.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (1..=n).map(|i| if i == n { hi } else { lo * (r * i as f64 / n as f64).exp() }).collect()
}

fn pi_power(q: (i64, i64), p: i32) -> SymValue {
    SymValue::new(BigRational::new(BigInt::from(q.0), BigInt::from(q.1)), p, 0)
}

#[test]
fn criterion_1_einstein_hilbert_action() {
    let tol = QuadratureOptions::default();
    let l2 = family(MetricKind::L2, 2);
    let closed = eh_action_closed(&l2).unwrap();
    let exact_ok = closed == pi_power((1, 2), 9);
    let mut lines = vec![format!("closed = {closed}")];
    let mut pass = exact_ok;
    for k in 2..=6 {
        let f = family(MetricKind::L2, k);
        let t0 = Instant::now();
        let closed = eh_action_closed(&f).unwrap().to_f64();
        let q = eh_action_quadrature(&f, tol);
        let dt = t0.elapsed();
        match q {
            Ok(q) => {
                let e = rel(q.value, closed);
                let ok = dt <= Duration::from_secs(10) && (k != 2 || e <= 1e-6);
                pass &= ok;
                lines.push(format!("k={k}: rel {e:.1e} in {:.2}s", dt.as_secs_f64()));
            }
            Err(err) => {
                pass = false;
                lines.push(format!("k={k}: {err}"));
            }
        }
    }
    report(1, "Einstein-Hilbert action", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_2_total_volume() {
    let l2 = family(MetricKind::L2, 2);
    let closed = total_volume_closed(&l2).unwrap();
    let exact_ok = closed == pi_power((1, 120), 10);
    let q = total_volume_quadrature(&l2, QuadratureOptions::default()).unwrap();
    let e = rel(q.value, closed.to_f64());
    let mut fs_ok = true;
    for k in 2..=6u32 {
        let n = 2 * k + 1;
        let cp = SymValue::new(BigRational::new(BigInt::from(1), factorial(n as u64)), n as i32, 0);
        fs_ok &= total_volume_closed(&family(MetricKind::FS, k)).unwrap() == cp;
    }
    let pass = exact_ok && e <= 1e-6 && fs_ok;
    report(
        2,
        "total volume",
        pass,
        &format!("closed = {closed}, quadrature rel {e:.1e}, FS = CP^(2k+1) volume for k=2..6: {fs_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_conjectured_formulas() {
    let pi = SymValue::pi();
    let mut pass = true;
    for k in 2..=10 {
        let f = family(MetricKind::L2, k);
        let b = baptista(1, k, 0, &pi).unwrap();
        let dh = &b.h + &SymSum::from(eh_action_closed(&f).unwrap() * SymValue::integer(-1));
        let dv = &b.vol + &SymSum::from(total_volume_closed(&f).unwrap() * SymValue::integer(-1));
        pass &= dh.is_zero() && dv.is_zero();
    }
    report(3, "conjectured volume and action", pass, "exact differences over k=2..10 all zero");
    assert!(pass);
}

#[test]
fn criterion_4_scalar_curvature_trace_oracle() {
    let mut worst = 0.0f64;
    for kind in [MetricKind::L2, MetricKind::FS] {
        for k in 2..=4 {
            let f = family(kind, k);
            for mu in log_grid(1.01, 1e3, 50) {
                let p = MuPoint::Finite(mu);
                let g = assemble_metric_form(&f, p).unwrap();
                let r = assemble_ricci_form(&f, p).unwrap();
                let t = scalar_from_trace(&g, &r).unwrap();
                let c = scalar_curvature(&f, p).unwrap();
                worst = worst.max(rel(t, c));
            }
        }
    }
    let pass = worst <= 1e-8;
    report(4, "scalar curvature vs trace", pass, &format!("max rel {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_5_einstein_reference() {
    let (mut max_norm, mut max_kappa) = (0.0f64, 0.0f64);
    for k in 2..=4 {
        let f = family(MetricKind::FS, k);
        let lambda = f.params().c * (k as f64 + 1.0);
        for mu in log_grid(1.01, 1e3, 50) {
            let p = MuPoint::Finite(mu);
            let g = assemble_metric_form(&f, p).unwrap();
            let r = assemble_ricci_form(&f, p).unwrap();
            max_norm = max_norm.max((r.entries() - g.entries() * lambda).amax());
            max_kappa = max_kappa.max(rel(scalar_curvature(&f, p).unwrap(), lambda * (4.0 * k as f64 + 2.0)));
        }
    }
    let pass = max_norm <= 1e-10 && max_kappa <= 1e-10;
    report(
        5,
        "Kähler-Einstein reference",
        pass,
        &format!("max |rho - c(k+1) gamma| {max_norm:.1e}, kappa rel {max_kappa:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_exact_algebra_identities() {
    let mut lines = Vec::new();
    let mut pass = true;
    for k in 2..=4usize {
        let b = build_basis(k).unwrap();
        let pb = b.p_basis();
        let ortho = pb.iter().enumerate().all(|(i, x)| {
            pb.iter()
                .enumerate()
                .all(|(j, y)| inner(x, y).unwrap() == if i == j { QSqrt2::one() } else { QSqrt2::zero() })
        });
        let half = b.y0.scale_real(&QSqrt2::inv_sqrt2());
        let neg_half = half.scale(&Cx::from_i64(-1));
        let ph = project_p(&bracket(&b.yhat[0], &b.yhat[1]).unwrap(), &b).unwrap();
        let pc = project_p(&bracket(&b.ycheck[0], &b.ycheck[1]).unwrap(), &b).unwrap();
        let hat_ok = ph == half;
        let check_ok = pc == neg_half;
        let describe = |x: &lumpgeom::lie_structure::AlgebraElement| {
            if *x == half {
                "+Y0/sqrt2"
            } else if *x == neg_half {
                "-Y0/sqrt2"
            } else {
                "other"
            }
        };

        let mut rng = ChaCha8Rng::seed_from_u64(600 + k as u64);
        let mut j_ok = true;
        for _ in 0..8 {
            let mu = BigRational::from_float(rng.gen_range(1.0f64..50.0) + 1e-3).unwrap();
            let mut g = || {
                Cx::gaussian(
                    BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=7))),
                    BigRational::new(BigInt::from(rng.gen_range(-9i64..=9)), BigInt::from(rng.gen_range(1i64..=7))),
                )
            };
            let c = PCoords {
                lambda: QSqrt2::new(g().re.a, g().im.a),
                x: g(),
                y: g(),
                u: (0..k - 1).map(|_| g()).collect(),
                v: (0..k - 1).map(|_| g()).collect(),
            };
            let t = TangentVector { dmu: g().re, p: lumpgeom::lie_structure::from_coords(&c, &mu, k).unwrap() };
            let jj = j_apply(&j_apply(&t, &b, &mu).unwrap(), &b, &mu).unwrap();
            j_ok &= jj.dmu == -&t.dmu && jj.p == t.p.scale(&Cx::from_i64(-1));
        }
        pass &= ortho && hat_ok && check_ok && j_ok;
        lines.push(format!(
            "k={k}: orthonormal {ortho}, P[Yhat1,Yhat2] = {} (want +Y0/sqrt2), P[Ycheck1,Ycheck2] = {} (want -Y0/sqrt2), J^2 = -1 {j_ok}",
            describe(&ph),
            describe(&pc)
        ));
    }
    report(6, "exact algebra identities", pass, &lines.join("; "));
    assert!(pass);
}

#[test]
fn criterion_7_limits() {
    let mut lines = Vec::new();
    let mut pass = true;
    for k in 2..=4 {
        let f = family(MetricKind::L2, k);
        let a = a_profile(&f, MuPoint::Finite(1e4)).unwrap().value;
        let ea = (a / (2.0 * f.b()) - 1.0).abs();
        let c = ricci_profile(&f).c(MuPoint::Finite(1e4)).unwrap().value;
        let ec = (c / (4.0 * (k as f64 + 1.0)) - 1.0).abs();
        let b1 = boundary_term(&f, MuPoint::Finite(1.0 + 1e-4)).unwrap();
        let b2 = boundary_term(&f, MuPoint::Finite(1e4)).unwrap();
        let ok = ea <= 1e-6 && ec <= 1e-6 && b1.abs() <= 1e-6 && b2.abs() <= 1e-6;
        pass &= ok;
        lines.push(format!(
            "k={k}: |A/2B-1| {ea:.1e}, |C/4(k+1)-1| {ec:.1e}, boundary {b1:.1e} at 1+1e-4, {b2:.1e} at 1e4"
        ));
    }
    report(7, "limits", pass, &lines.join("; "));
    assert!(pass);
}

/// Central differences in extended precision, `h = 1e-5 mu`.
fn central(f: impl Fn(Ext) -> Ext, mu: f64) -> (f64, f64) {
    let m = Ext::from_f64(mu);
    let h = Ext::from_f64(1e-5 * mu);
    let (fp, f0, fm) = (f(m + h), f(m), f(m - h));
    let d1 = (fp - fm) / (h * Ext::from_f64(2.0));
    let d2 = (fp - f0 * Ext::from_f64(2.0) + fm) / (h * h);
    (d1.to_f64(), d2.to_f64())
}

/// Relative error of a derivative channel. Where the derivative passes
/// near zero, the natural size `|value| / mu^n` of an `n`-th derivative is
/// the yardstick.
fn channel_err(jet: f64, fd: f64, value: f64, mu: f64, n: i32) -> f64 {
    let scale = fd.abs().max(value.abs() / mu.powi(n));
    if scale == 0.0 {
        return (jet - fd).abs();
    }
    (jet - fd).abs() / scale
}

#[test]
fn criterion_8_derivative_integrity() {
    let mut worst: (f64, String) = (0.0, String::new());
    let mut note = |e: f64, what: String| {
        if e > worst.0 || worst.1.is_empty() {
            worst = (e, what);
        }
    };
    for kind in [MetricKind::L2, MetricKind::FS] {
        for k in 2..=3 {
            let f = family(kind, k);
            let rp = ricci_profile(&f);
            for mu in log_grid(1.01, 1e3, 40) {
                let p = MuPoint::Finite(mu);
                let channels: [Channel; 4] = [
                    (
                        "A",
                        a_profile(&f, p).unwrap(),
                        Box::new(|x| profile_jets(&f, Point::At(x), 0).unwrap().a.value()),
                    ),
                    (
                        "V",
                        {
                            let j = volume_density_jet::<f64>(&f, Point::At(mu), 2).unwrap();
                            j.to_jet2()
                        },
                        Box::new(|x| volume_density_jet(&f, Point::At(x), 0).unwrap().value()),
                    ),
                    ("C", rp.c(p).unwrap(), Box::new(|x| ricci_jets(&f, Point::At(x)).unwrap().c.value())),
                    (
                        "F",
                        density_ratio_f(&f, p).unwrap(),
                        Box::new(|x| ricci_jets(&f, Point::At(x)).unwrap().f.value().exp()),
                    ),
                ];
                for (name, jet, value) in channels {
                    let (d1, d2) = central(value, mu);
                    note(channel_err(jet.d1, d1, jet.value, mu, 1), format!("{kind:?} k={k} {name}' at {mu:.3}"));
                    note(channel_err(jet.d2, d2, jet.value, mu, 2), format!("{kind:?} k={k} {name}'' at {mu:.3}"));
                }
            }
        }
    }
    let mut beta_worst = 0.0f64;
    for k in 2..=8 {
        let exact = rational_to_f64(&beta_integral(k).unwrap());
        let q = beta_quadrature(k, QuadratureOptions::relative(1e-12)).unwrap();
        beta_worst = beta_worst.max(rel(q.value, exact));
    }
    let pass = worst.0 <= 1e-6 && beta_worst <= 1e-10;
    report(
        8,
        "derivative integrity",
        pass,
        &format!("worst jet channel rel {:.1e} ({}), beta rel {beta_worst:.1e}", worst.0, worst.1),
    );
    assert!(pass);
}
