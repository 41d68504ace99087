use lumpgeom::exact::{Cx, SymValue};
use lumpgeom::lie_structure::{bracket, build_basis, AlgebraElement, BasisSet};
use lumpgeom::metric_profiles::{MetricFamily, MetricKind, ModelParams, MuPoint};
use lumpgeom::ricci::{assemble_metric_form, assemble_ricci_form, scalar_from_trace};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

fn basis() -> &'static BasisSet {
    static B: OnceLock<BasisSet> = OnceLock::new();
    B.get_or_init(|| build_basis(2).unwrap())
}

/// A combination of the algebra basis with small Gaussian-integer weights.
fn element(weights: &[(i64, i64)]) -> AlgebraElement {
    let b = basis();
    let gens: Vec<&AlgebraElement> = b.p_basis().into_iter().chain(b.kbasis.iter()).collect();
    let mut acc = AlgebraElement::zero(2);
    for (g, &(re, im)) in gens.iter().zip(weights) {
        let w = Cx::gaussian(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()));
        acc = acc.add(&g.scale(&w)).unwrap();
    }
    acc
}

fn weights() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-3i64..=3, -3i64..=3), 24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bracket_is_antisymmetric(x in weights(), y in weights()) {
        let (x, y) = (element(&x), element(&y));
        let sum = bracket(&x, &y).unwrap().add(&bracket(&y, &x).unwrap()).unwrap();
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn bracket_satisfies_jacobi(x in weights(), y in weights(), z in weights()) {
        let (x, y, z) = (element(&x), element(&y), element(&z));
        let t1 = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
        let t2 = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
        let t3 = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
        prop_assert!(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero());
    }

    #[test]
    fn bracket_of_real_combinations_stays_in_the_algebra(x in weights(), y in weights()) {
        let real = |w: Vec<(i64, i64)>| element(&w.into_iter().map(|(re, _)| (re, 0)).collect::<Vec<_>>());
        let b = bracket(&real(x), &real(y)).unwrap();
        prop_assert!(b.is_anti_hermitian());
    }

    #[test]
    fn sym_value_is_monotone_in_q(
        a in -10_000i64..10_000, b in -10_000i64..10_000, d in 1i64..500, p in -3i32..12, r in 0i32..2,
    ) {
        prop_assume!(a < b);
        let v = |n: i64| SymValue::new(BigRational::new(BigInt::from(n), BigInt::from(d)), p, r).to_f64();
        prop_assert!(v(a) < v(b));
    }

    #[test]
    fn trace_is_congruence_invariant(
        mu in 1.001f64..1e4,
        fs in any::<bool>(),
        k in 2u32..5,
        noise in prop::collection::vec(-0.3f64..0.3, 18 * 18),
    ) {
        let kind = if fs { MetricKind::FS } else { MetricKind::L2 };
        let fam = MetricFamily::new(kind, ModelParams::standard(k).unwrap());
        let p = MuPoint::Finite(mu);
        let (g, r) = (assemble_metric_form(&fam, p).unwrap(), assemble_ricci_form(&fam, p).unwrap());
        let n = g.dim();
        let frame = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { noise[i * 18 + j] / n as f64 });
        let sv = g.entries().singular_values();
        let cond = sv.max() / sv.min();
        let before = scalar_from_trace(&g, &r).unwrap();
        let after = scalar_from_trace(&g.congruence(&frame).unwrap(), &r.congruence(&frame).unwrap()).unwrap();
        // both sides solve against gamma, so agreement is limited by its conditioning
        let tol = 1e-13 * cond.max(1.0);
        prop_assert!(((after - before) / before).abs() < tol, "{before} vs {after}, cond {cond:e}");
    }
}
