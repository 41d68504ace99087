//! Exact matrix model of `g = u(k+1) + u(2)` with the invariant inner
//! product `<(M1,m1),(M2,m2)> = -1/2 (tr M1 M2 + tr m1 m2)`, the isotropy
//! algebra `k`, its complement `p` and the almost complex structure.
//!
//! Entries live in `Q(sqrt 2)(i)`, so every identity here is checked with
//! zero tolerance. Matrix indices are 0-based in code; docs use the 1-based
//! `E_ab` convention.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, rat, Cx, QSqrt2};

/// Square matrix over `Q(sqrt 2)(i)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    e: Vec<Cx>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix { n, e: vec![Cx::zero(); n * n] }
    }

    /// `E_ab` with 1-based indices.
    pub fn unit(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n);
        m.e[(a - 1) * n + (b - 1)] = Cx::one();
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry `(a, b)`, 1-based.
    pub fn at(&self, a: usize, b: usize) -> &Cx {
        &self.e[(a - 1) * self.n + (b - 1)]
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::Dimension(format!("{0}x{0} vs {1}x{1}", self.n, o.n)));
        }
        Ok(())
    }

    fn zip(&self, o: &Self, f: impl Fn(&Cx, &Cx) -> Cx) -> Self {
        ExactMatrix { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn scale(&self, s: &Cx) -> Self {
        ExactMatrix { n: self.n, e: self.e.iter().map(|x| x * s).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = &self.e[i * n + l];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.e[l * n + j];
                    if !b.is_zero() {
                        out.e[i * n + j] = &out.e[i * n + j] + &(a * b);
                    }
                }
            }
        }
        out
    }

    fn trace_of_product(&self, o: &Self) -> Cx {
        let n = self.n;
        let mut t = Cx::zero();
        for i in 0..n {
            for l in 0..n {
                let (a, b) = (&self.e[i * n + l], &o.e[l * n + i]);
                if !a.is_zero() && !b.is_zero() {
                    t = &t + &(a * b);
                }
            }
        }
        t
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.e[j * n + i] = self.e[i * n + j].conj();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Cx::is_zero)
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.e[i * self.n + j].to_c64())
    }
}

/// An element `(M, m)` of `u(k+1) + u(2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub big: ExactMatrix,
    pub small: ExactMatrix,
}

impl AlgebraElement {
    pub fn zero(k: usize) -> Self {
        AlgebraElement { big: ExactMatrix::zeros(k + 1), small: ExactMatrix::zeros(2) }
    }

    pub fn new(big: ExactMatrix, small: ExactMatrix) -> Result<Self> {
        if small.dim() != 2 || big.dim() < 2 {
            return Err(Error::Dimension(format!(
                "blocks {}x{} and {}x{}",
                big.dim(),
                big.dim(),
                small.dim(),
                small.dim()
            )));
        }
        Ok(AlgebraElement { big, small })
    }

    /// `k` for an element of `u(k+1) + u(2)`.
    pub fn k(&self) -> usize {
        self.big.dim() - 1
    }

    fn check(&self, o: &Self) -> Result<()> {
        self.big.check(&o.big)?;
        self.small.check(&o.small)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(AlgebraElement { big: self.big.zip(&o.big, |a, b| a + b), small: self.small.zip(&o.small, |a, b| a + b) })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(AlgebraElement { big: self.big.zip(&o.big, |a, b| a - b), small: self.small.zip(&o.small, |a, b| a - b) })
    }

    pub fn scale(&self, s: &Cx) -> Self {
        AlgebraElement { big: self.big.scale(s), small: self.small.scale(s) }
    }

    pub fn scale_real(&self, s: &QSqrt2) -> Self {
        self.scale(&Cx::real(s.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.big.is_zero() && self.small.is_zero()
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.big.adjoint() == self.big.scale(&Cx::from_i64(-1))
            && self.small.adjoint() == self.small.scale(&Cx::from_i64(-1))
    }

    pub fn to_c64(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        (self.big.to_c64(), self.small.to_c64())
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, m) in [("E", &self.big), ("e", &self.small)] {
            for a in 1..=m.dim() {
                for b in 1..=m.dim() {
                    let x = m.at(a, b);
                    if !x.is_zero() {
                        if !first {
                            f.write_str(" + ")?;
                        }
                        first = false;
                        write!(f, "[{x}]{name}{a}{b}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `<a, b> = -1/2 (tr M1 M2 + tr m1 m2)`. Real on anti-Hermitian pairs;
/// for general complex entries the real part is returned.
pub fn inner(a: &AlgebraElement, b: &AlgebraElement) -> Result<QSqrt2> {
    a.check(b)?;
    let t = &a.big.trace_of_product(&b.big) + &a.small.trace_of_product(&b.small);
    Ok(t.re.scale(&rat(-1, 2)))
}

/// `[(M1,m1),(M2,m2)] = ([M1,M2],[m1,m2])`.
pub fn bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check(b)?;
    let comm = |x: &ExactMatrix, y: &ExactMatrix| x.mul(y).zip(&y.mul(x), |p, q| p - q);
    Ok(AlgebraElement { big: comm(&a.big, &b.big), small: comm(&a.small, &b.small) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SubspaceTag {
    P0,
    PMu,
    PMuTilde,
    PHat,
    PCheck,
    KIso,
}

/// Orthonormal basis of `p` in frame order `Y0, Y1..Y4, Yhat_1.., Ycheck_1..`,
/// plus an orthonormal basis of the isotropy algebra.
#[derive(Clone, Debug)]
pub struct BasisSet {
    pub k: usize,
    pub y0: AlgebraElement,
    pub y: [AlgebraElement; 4],
    pub yhat: Vec<AlgebraElement>,
    pub ycheck: Vec<AlgebraElement>,
    pub kbasis: Vec<AlgebraElement>,
}

fn pair(k: usize, big: ExactMatrix, small: ExactMatrix) -> AlgebraElement {
    debug_assert_eq!(big.dim(), k + 1);
    AlgebraElement { big, small }
}

fn e_big(k: usize, a: usize, b: usize) -> ExactMatrix {
    ExactMatrix::unit(k + 1, a, b)
}

fn e_small(a: usize, b: usize) -> ExactMatrix {
    ExactMatrix::unit(2, a, b)
}

fn lin(terms: &[(i64, &ExactMatrix)]) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(terms[0].1.dim());
    for (c, m) in terms {
        out = out.zip(&m.scale(&Cx::from_i64(*c)), |a, b| a + b);
    }
    out
}

/// The basis of `p` and `k` for `u(k+1) + u(2)`.
pub fn build_basis(k: usize) -> Result<BasisSet> {
    if k < 2 {
        return Err(Error::precondition(format!("k = {k}: the basis needs k >= 2")));
    }
    let i = Cx::i();
    let z_big = ExactMatrix::zeros(k + 1);
    let z_small = ExactMatrix::zeros(2);
    let i_over_sqrt2 = Cx::imag(QSqrt2::inv_sqrt2());

    let y0 = pair(
        k,
        lin(&[(1, &e_big(k, 1, 1)), (-1, &e_big(k, 2, 2))]).scale(&i_over_sqrt2),
        lin(&[(-1, &e_small(1, 1)), (1, &e_small(2, 2))]).scale(&i_over_sqrt2),
    );
    let y = [
        pair(k, lin(&[(1, &e_big(k, 1, 2)), (-1, &e_big(k, 2, 1))]), z_small.clone()),
        pair(k, lin(&[(1, &e_big(k, 1, 2)), (1, &e_big(k, 2, 1))]).scale(&i), z_small.clone()),
        pair(k, z_big.clone(), lin(&[(-1, &e_small(1, 2)), (1, &e_small(2, 1))])),
        pair(k, z_big.clone(), lin(&[(1, &e_small(1, 2)), (1, &e_small(2, 1))]).scale(&i)),
    ];
    let side = |row: usize| -> Vec<AlgebraElement> {
        (1..k)
            .flat_map(|j| {
                let c = j + 2;
                [
                    pair(k, lin(&[(-1, &e_big(k, row, c)), (1, &e_big(k, c, row))]), z_small.clone()),
                    pair(k, lin(&[(1, &e_big(k, row, c)), (1, &e_big(k, c, row))]).scale(&i), z_small.clone()),
                ]
            })
            .collect()
    };
    let yhat = side(1);
    let ycheck = side(2);

    // Isotropy algebra: the three phase directions and u(k-1) in the
    // lower-right block.
    let mut kbasis = vec![
        pair(k, e_big(k, 1, 1).scale(&i), e_small(1, 1).scale(&i)),
        pair(k, e_big(k, 2, 2).scale(&i), e_small(2, 2).scale(&i)),
        pair(
            k,
            lin(&[(-1, &e_big(k, 1, 1)), (-1, &e_big(k, 2, 2))]).scale(&i_over_sqrt2),
            lin(&[(1, &e_small(1, 1)), (1, &e_small(2, 2))]).scale(&i_over_sqrt2),
        ),
    ];
    let i_sqrt2 = Cx::imag(QSqrt2::sqrt2());
    for a in 3..=k + 1 {
        kbasis.push(pair(k, e_big(k, a, a).scale(&i_sqrt2), z_small.clone()));
        for b in a + 1..=k + 1 {
            kbasis.push(pair(k, lin(&[(1, &e_big(k, a, b)), (-1, &e_big(k, b, a))]), z_small.clone()));
            kbasis.push(pair(k, lin(&[(1, &e_big(k, a, b)), (1, &e_big(k, b, a))]).scale(&i), z_small.clone()));
        }
    }
    Ok(BasisSet { k, y0, y, yhat, ycheck, kbasis })
}

impl BasisSet {
    /// The `4k+1` elements of the `p` basis in frame order.
    pub fn p_basis(&self) -> Vec<&AlgebraElement> {
        std::iter::once(&self.y0).chain(self.y.iter()).chain(&self.yhat).chain(&self.ycheck).collect()
    }

    pub fn dim_p(&self) -> usize {
        4 * self.k + 1
    }

    pub fn dim_k(&self) -> usize {
        self.kbasis.len()
    }

    /// Real generators of each invariant subspace at parameter `mu`; `p_mu`
    /// and `p~_mu` move with `mu`, the rest are fixed.
    pub fn subspace_generators(&self, mu: &BigRational) -> Vec<(SubspaceTag, AlgebraElement)> {
        let m = QSqrt2::rational(mu.clone());
        let [y1, y2, y3, y4] = &self.y;
        let comb = |a: &AlgebraElement, sa: &QSqrt2, b: &AlgebraElement, sb: &QSqrt2| {
            a.scale_real(sa).add(&b.scale_real(sb)).expect("same algebra")
        };
        let one = QSqrt2::one();
        let neg_m = -&m;
        let mut out = vec![(SubspaceTag::P0, self.y0.clone())];
        out.push((SubspaceTag::PMu, comb(y1, &one, y3, &neg_m)));
        out.push((SubspaceTag::PMu, comb(y2, &one, y4, &m)));
        out.push((SubspaceTag::PMuTilde, comb(y1, &neg_m, y3, &one)));
        out.push((SubspaceTag::PMuTilde, comb(y2, &m, y4, &one)));
        out.extend(self.yhat.iter().map(|e| (SubspaceTag::PHat, e.clone())));
        out.extend(self.ycheck.iter().map(|e| (SubspaceTag::PCheck, e.clone())));
        out.extend(self.kbasis.iter().map(|e| (SubspaceTag::KIso, e.clone())));
        out
    }
}

/// Coordinates of `p_mu` and `p~_mu` generators against `Y1..Y4` (rows).
pub fn mu_generator_coords(mu: f64) -> [[f64; 4]; 4] {
    [[1.0, 0.0, -mu, 0.0], [0.0, 1.0, 0.0, mu], [-mu, 0.0, 1.0, 0.0], [0.0, mu, 0.0, 1.0]]
}

/// Orthogonal projection onto `p`.
pub fn project_p(x: &AlgebraElement, basis: &BasisSet) -> Result<AlgebraElement> {
    project_onto(x, basis.p_basis().into_iter(), basis.k)
}

/// Orthogonal projection onto `k`.
pub fn project_k(x: &AlgebraElement, basis: &BasisSet) -> Result<AlgebraElement> {
    project_onto(x, basis.kbasis.iter(), basis.k)
}

fn project_onto<'a>(
    x: &AlgebraElement,
    onb: impl Iterator<Item = &'a AlgebraElement>,
    k: usize,
) -> Result<AlgebraElement> {
    let mut out = AlgebraElement::zero(k);
    for e in onb {
        let c = inner(x, e)?;
        if !c.is_zero() {
            out = out.add(&e.scale_real(&c))?;
        }
    }
    Ok(out)
}

/// A tangent vector `a d/dmu + X` with `X` in `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentVector {
    pub dmu: QSqrt2,
    pub p: AlgebraElement,
}

/// `p`-coordinates `(lambda, x, y, u, v)`: `X = lambda diag(i,-i,..; -i,i)
/// + p_mu(x) + p~_mu(y) + p^(u) + p'(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCoords {
    pub lambda: QSqrt2,
    pub x: Cx,
    pub y: Cx,
    pub u: Vec<Cx>,
    pub v: Vec<Cx>,
}

fn check_mu(mu: &BigRational) -> Result<()> {
    if *mu <= int(1) {
        return Err(Error::domain(format!("mu = {mu} must exceed 1")));
    }
    Ok(())
}

/// Build the `p` element with the given coordinates.
pub fn from_coords(c: &PCoords, mu: &BigRational, k: usize) -> Result<AlgebraElement> {
    if c.u.len() != k - 1 || c.v.len() != k - 1 {
        return Err(Error::Dimension(format!("u, v must have length {}", k - 1)));
    }
    let m = Cx::real(QSqrt2::rational(mu.clone()));
    let mut big = ExactMatrix::zeros(k + 1);
    let mut small = ExactMatrix::zeros(2);
    let n = k + 1;
    let set = |mat: &mut ExactMatrix, a: usize, b: usize, v: Cx| {
        let idx = (a - 1) * mat.n + (b - 1);
        mat.e[idx] = &mat.e[idx] + &v;
    };
    let il = Cx::imag(c.lambda.clone());
    set(&mut big, 1, 1, il.clone());
    set(&mut big, 2, 2, -&il);
    set(&mut small, 1, 1, -&il);
    set(&mut small, 2, 2, il);
    // p_mu: (x E12 - conj(x) E21, mu x e12 - mu conj(x) e21)
    set(&mut big, 1, 2, c.x.clone());
    set(&mut big, 2, 1, -&c.x.conj());
    set(&mut small, 1, 2, &m * &c.x);
    set(&mut small, 2, 1, -&(&m * &c.x.conj()));
    // p~_mu: (-mu conj(y) E12 + mu y E21, -conj(y) e12 + y e21)
    set(&mut big, 1, 2, -&(&m * &c.y.conj()));
    set(&mut big, 2, 1, &m * &c.y);
    set(&mut small, 1, 2, -&c.y.conj());
    set(&mut small, 2, 1, c.y.clone());
    for (j, (u, v)) in c.u.iter().zip(&c.v).enumerate() {
        let r = j + 3;
        set(&mut big, r, 1, u.clone());
        set(&mut big, 1, r, -&u.conj());
        set(&mut big, r, 2, v.clone());
        set(&mut big, 2, r, -&v.conj());
    }
    debug_assert_eq!(big.n, n);
    Ok(AlgebraElement { big, small })
}

/// Inverse of [`from_coords`] for an element of `p`.
pub fn to_coords(x: &AlgebraElement, basis: &BasisSet, mu: &BigRational) -> Result<PCoords> {
    check_mu(mu)?;
    let k = basis.k;
    let lambda = &inner(x, &basis.y0)? * &QSqrt2::inv_sqrt2();
    let m = Cx::real(QSqrt2::rational(mu.clone()));
    let a = x.big.at(1, 2);
    let b = x.small.at(1, 2);
    let den = QSqrt2::rational(int(1) - mu * mu).recip().expect("mu > 1");
    let xc = (a - &(&m * b)).scale(&den);
    let ybar = &(&m * &xc) - b;
    let u = (3..=k + 1).map(|r| x.big.at(r, 1).clone()).collect();
    let v = (3..=k + 1).map(|r| x.big.at(r, 2).clone()).collect();
    Ok(PCoords { lambda, x: xc, y: ybar.conj(), u, v })
}

/// `J(lambda, x, y, u, v) = 4 mu lambda d/dmu + (0, ix, iy, iu, iv)`.
pub fn j_action(c: &PCoords, mu: &BigRational, k: usize) -> Result<TangentVector> {
    check_mu(mu)?;
    let i = Cx::i();
    let rotated = PCoords {
        lambda: QSqrt2::zero(),
        x: &i * &c.x,
        y: &i * &c.y,
        u: c.u.iter().map(|z| &i * z).collect(),
        v: c.v.iter().map(|z| &i * z).collect(),
    };
    let dmu = c.lambda.scale(&(int(4) * mu));
    Ok(TangentVector { dmu, p: from_coords(&rotated, mu, k)? })
}

/// `J` on a full tangent vector; `J(d/dmu) = -Y0/(2 sqrt 2 mu)`, which is
/// the choice making `J^2 = -1` given the action on `p`.
pub fn j_apply(t: &TangentVector, basis: &BasisSet, mu: &BigRational) -> Result<TangentVector> {
    let mut out = j_action(&to_coords(&t.p, basis, mu)?, mu, basis.k)?;
    if !t.dmu.is_zero() {
        // -Y0/(2 sqrt 2 mu) = lambda diag(..) with lambda = -1/(4 mu)
        let s = QSqrt2::rational(-(int(4) * mu).recip());
        let xi0 = from_coords(
            &PCoords {
                lambda: &s * &t.dmu,
                x: Cx::zero(),
                y: Cx::zero(),
                u: vec![Cx::zero(); basis.k - 1],
                v: vec![Cx::zero(); basis.k - 1],
            },
            mu,
            basis.k,
        )?;
        out.p = out.p.add(&xi0)?;
    }
    Ok(out)
}

/// The Killing-field coefficients `(beta^, beta')` of `d dbar f` on the
/// `Yhat` and `Ycheck` sectors: `beta = 1/2 eta0(-P_p[Y_1, Y_2])` with
/// `eta0(Y0) = -2 sqrt 2 mu` and `eta0` vanishing on the rest of `p`.
pub fn killing_coefficients(basis: &BasisSet, mu: &BigRational) -> Result<(QSqrt2, QSqrt2)> {
    check_mu(mu)?;
    let eta0 = QSqrt2::new(int(0), -(int(2) * mu));
    let beta = |a: &AlgebraElement, b: &AlgebraElement| -> Result<QSqrt2> {
        let proj = project_p(&bracket(a, b)?, basis)?;
        let c = inner(&proj, &basis.y0)?;
        Ok((&(-&c) * &eta0).scale(&rat(1, 2)))
    };
    Ok((beta(&basis.yhat[0], &basis.yhat[1])?, beta(&basis.ycheck[0], &basis.ycheck[1])?))
}

/// Outcome of [`adk_invariance_check`].
#[derive(Clone, Debug, Serialize)]
pub struct AdkReport {
    pub samples: usize,
    pub max_residual: f64,
    pub worst: Option<SubspaceTag>,
    pub passed: bool,
}

pub const ADK_TOLERANCE: f64 = 1e-12;

/// Conjugate every invariant subspace by sampled isotropy elements
/// `exp(Z)`, `Z` a random element of `k`, and measure how far the images
/// leave the subspace.
pub fn adk_invariance_check(k: usize, samples: usize, seed: u64) -> Result<AdkReport> {
    if samples == 0 {
        return Err(Error::precondition("need at least one sample"));
    }
    let basis = build_basis(k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = BigRational::from_float(rng.gen_range(1.1..10.0)).expect("finite");
    let gens = basis.subspace_generators(&mu);
    let gens_f: Vec<_> = gens.iter().map(|(t, e)| (*t, e.to_c64())).collect();
    let mut max_residual = 0.0f64;
    let mut worst = None;
    for s in 0..samples {
        let (g_big, g_small) = if s == 0 {
            (DMatrix::identity(k + 1, k + 1), DMatrix::identity(2, 2))
        } else {
            let mut z = (DMatrix::zeros(k + 1, k + 1), DMatrix::zeros(2, 2));
            for e in &basis.kbasis {
                let c = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
                let (b, sm) = e.to_c64();
                z.0 += b * c;
                z.1 += sm * c;
            }
            (z.0.exp(), z.1.exp())
        };
        let (gi_big, gi_small) = (g_big.adjoint(), g_small.adjoint());
        for tag in [
            SubspaceTag::P0,
            SubspaceTag::PMu,
            SubspaceTag::PMuTilde,
            SubspaceTag::PHat,
            SubspaceTag::PCheck,
            SubspaceTag::KIso,
        ] {
            let span: Vec<&(DMatrix<Complex64>, DMatrix<Complex64>)> =
                gens_f.iter().filter(|(t, _)| *t == tag).map(|(_, e)| e).collect();
            let onb = gram_schmidt(&span);
            for (b, sm) in &span {
                let img = (&g_big * b * &gi_big, &g_small * sm * &gi_small);
                let mut res = img.clone();
                for q in &onb {
                    let c = inner_c64(&img, q);
                    res.0 -= &q.0 * Complex64::new(c, 0.0);
                    res.1 -= &q.1 * Complex64::new(c, 0.0);
                }
                let r = inner_c64(&res, &res).max(0.0).sqrt();
                if r > max_residual {
                    max_residual = r;
                    worst = Some(tag);
                }
            }
        }
    }
    Ok(AdkReport { samples, max_residual, worst, passed: max_residual <= ADK_TOLERANCE })
}

type CPair = (DMatrix<Complex64>, DMatrix<Complex64>);

fn inner_c64(a: &CPair, b: &CPair) -> f64 {
    -0.5 * ((&a.0 * &b.0).trace() + (&a.1 * &b.1).trace()).re
}

fn gram_schmidt(span: &[&CPair]) -> Vec<CPair> {
    let mut out: Vec<CPair> = Vec::new();
    for v in span {
        let mut w = (*v).clone();
        for q in &out {
            let c = Complex64::new(inner_c64(&w, q), 0.0);
            w.0 -= &q.0 * c;
            w.1 -= &q.1 * c;
        }
        let n = inner_c64(&w, &w).sqrt();
        if n > 1e-14 {
            let s = Complex64::new(1.0 / n, 0.0);
            out.push((w.0 * s, w.1 * s));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y0_unit_and_y1_y2_orthogonal() {
        let b = build_basis(2).unwrap();
        assert_eq!(inner(&b.y0, &b.y0).unwrap(), QSqrt2::one());
        assert_eq!(inner(&b.y[0], &b.y[1]).unwrap(), QSqrt2::zero());
    }

    #[test]
    fn dimensions() {
        for k in 2..=5 {
            let b = build_basis(k).unwrap();
            assert_eq!(b.p_basis().len(), 4 * k + 1);
            assert_eq!(b.dim_p() + b.dim_k(), (k + 1) * (k + 1) + 4);
        }
        assert!(matches!(build_basis(1), Err(Error::Precondition(_))));
    }

    #[test]
    fn full_basis_orthonormal_and_anti_hermitian() {
        for k in 2..=4 {
            let b = build_basis(k).unwrap();
            let all: Vec<&AlgebraElement> = b.p_basis().into_iter().chain(b.kbasis.iter()).collect();
            for (i, x) in all.iter().enumerate() {
                assert!(x.is_anti_hermitian());
                for (j, y) in all.iter().enumerate() {
                    let expected = if i == j { QSqrt2::one() } else { QSqrt2::zero() };
                    assert_eq!(inner(x, y).unwrap(), expected, "k={k} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn yhat_bracket() {
        let b = build_basis(2).unwrap();
        let br = bracket(&b.yhat[0], &b.yhat[1]).unwrap();
        let expected = AlgebraElement {
            big: lin(&[(2, &e_big(2, 1, 1)), (-2, &e_big(2, 3, 3))]).scale(&-&Cx::i()),
            small: ExactMatrix::zeros(2),
        };
        assert_eq!(br, expected);
    }

    #[test]
    fn projection_sign_of_yhat_and_ycheck_brackets() {
        let b = build_basis(3).unwrap();
        let ph = project_p(&bracket(&b.yhat[0], &b.yhat[1]).unwrap(), &b).unwrap();
        let pc = project_p(&bracket(&b.ycheck[0], &b.ycheck[1]).unwrap(), &b).unwrap();
        let y0s = b.y0.scale_real(&QSqrt2::inv_sqrt2());
        assert_eq!(ph, y0s.scale(&Cx::from_i64(-1)));
        assert_eq!(pc, y0s);
    }

    #[test]
    fn isotropy_example_lies_in_k() {
        let k = 2;
        let b = build_basis(k).unwrap();
        let half_i = Cx::gaussian(int(0), rat(1, 2));
        let x = AlgebraElement {
            big: lin(&[(3, &e_big(k, 1, 1)), (1, &e_big(k, 2, 2)), (-2, &e_big(k, 3, 3))]).scale(&half_i),
            small: lin(&[(1, &e_small(1, 1)), (-1, &e_small(2, 2))]).scale(&half_i),
        };
        assert!(project_p(&x, &b).unwrap().is_zero());
        assert_eq!(project_k(&x, &b).unwrap(), x);
    }

    #[test]
    fn projections_fix_basis_elements() {
        let b = build_basis(3).unwrap();
        assert_eq!(project_p(&b.y[0], &b).unwrap(), b.y[0]);
        for e in &b.kbasis {
            assert!(project_p(e, &b).unwrap().is_zero());
        }
    }

    #[test]
    fn dimension_mismatch() {
        let a = build_basis(2).unwrap();
        let c = build_basis(3).unwrap();
        assert!(matches!(inner(&a.y0, &c.y0), Err(Error::Dimension(_))));
        assert!(matches!(bracket(&a.y0, &c.y0), Err(Error::Dimension(_))));
    }

    #[test]
    fn coords_roundtrip_and_j_squared() {
        let k = 3;
        let b = build_basis(k).unwrap();
        let mu = rat(7, 3);
        let g = |re: i64, im: i64| Cx::gaussian(int(re), int(im));
        let c = PCoords {
            lambda: QSqrt2::new(rat(1, 2), rat(-1, 3)),
            x: g(2, -1),
            y: g(-3, 5),
            u: vec![g(1, 1), g(0, -2)],
            v: vec![g(4, 0), g(-1, 3)],
        };
        let x = from_coords(&c, &mu, k).unwrap();
        assert!(x.is_anti_hermitian());
        assert!(project_k(&x, &b).unwrap().is_zero());
        assert_eq!(to_coords(&x, &b, &mu).unwrap(), c);
        let t = TangentVector { dmu: QSqrt2::new(rat(5, 4), int(1)), p: x };
        let jj = j_apply(&j_apply(&t, &b, &mu).unwrap(), &b, &mu).unwrap();
        assert_eq!(jj.dmu, -&t.dmu);
        assert_eq!(jj.p, t.p.scale(&Cx::from_i64(-1)));
    }

    #[test]
    fn j_on_xi0_and_pmu() {
        let k = 2;
        let b = build_basis(k).unwrap();
        let mu = rat(3, 1);
        // xi0 = -Y0/(2 sqrt 2 mu)
        let s = QSqrt2::new(int(0), -(int(1) / (int(4) * &mu)));
        let xi0 = TangentVector { dmu: QSqrt2::zero(), p: b.y0.scale_real(&s) };
        let j = j_apply(&xi0, &b, &mu).unwrap();
        assert_eq!(j.dmu, QSqrt2::from_i64(-1));
        assert!(j.p.is_zero());
        let c = PCoords {
            lambda: QSqrt2::zero(),
            x: Cx::gaussian(rat(2, 3), int(0)),
            y: Cx::zero(),
            u: vec![Cx::zero()],
            v: vec![Cx::zero()],
        };
        let out = j_action(&c, &mu, k).unwrap();
        let ic = PCoords { x: &Cx::i() * &c.x, ..c.clone() };
        assert_eq!(out.p, from_coords(&ic, &mu, k).unwrap());
        assert!(out.dmu.is_zero());
        assert!(j_action(&c, &int(1), k).is_err());
    }

    #[test]
    fn mu_generators_match_subspace_definitions() {
        let b = build_basis(2).unwrap();
        let mu = rat(5, 2);
        let gens = b.subspace_generators(&mu);
        let one = Cx::one();
        let i = Cx::i();
        let z = Cx::zero();
        let zc = || vec![Cx::zero()];
        let expect = [
            PCoords { lambda: QSqrt2::zero(), x: one.clone(), y: z.clone(), u: zc(), v: zc() },
            PCoords { lambda: QSqrt2::zero(), x: i.clone(), y: z.clone(), u: zc(), v: zc() },
            PCoords { lambda: QSqrt2::zero(), x: z.clone(), y: one, u: zc(), v: zc() },
            PCoords { lambda: QSqrt2::zero(), x: z, y: i, u: zc(), v: zc() },
        ];
        for (g, c) in gens[1..5].iter().zip(&expect) {
            assert_eq!(g.1, from_coords(c, &mu, 2).unwrap());
        }
        let coords = mu_generator_coords(2.5);
        for (row, g) in coords.iter().zip(&gens[1..5]) {
            for (j, y) in b.y.iter().enumerate() {
                assert_eq!(inner(&g.1, y).unwrap().to_f64(), row[j]);
            }
        }
    }

    #[test]
    fn killing_coefficients_are_minus_and_plus_mu() {
        let b = build_basis(2).unwrap();
        let mu = rat(9, 4);
        let (bh, bc) = killing_coefficients(&b, &mu).unwrap();
        assert_eq!(bh, QSqrt2::rational(-mu.clone()));
        assert_eq!(bc, QSqrt2::rational(mu));
    }

    #[test]
    fn adk_invariance() {
        for k in 2..=4 {
            let r = adk_invariance_check(k, 6, 17 + k as u64).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let id = adk_invariance_check(2, 1, 0).unwrap();
        assert!(id.max_residual < 1e-14);
        assert!(adk_invariance_check(2, 0, 0).is_err());
    }
}
