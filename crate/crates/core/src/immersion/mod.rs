//! Parametric immersions of complex charts into C^N and their first and
//! second order invariants: frames, the position decomposition f = f^perp +
//! f^top, second fundamental form, shape operators, relative nullity, first
//! normal space, and the structural identity checks.

pub mod jet;
pub mod poly;
pub mod spec_io;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex_linalg::{
    complex_span, invert, orthogonal_complement, real_kernel, CSubspace, CVector,
};
use crate::error::{Error, Result};
use crate::scalar::{r, Real};

pub use jet::{chart_c_to_r, chart_j, chart_r_to_c, fd_jet, ChartMap, FdConfig, Jet};
pub use poly::{Poly, Term};

/// Open polydisc chart domain: per-variable center, common radius.
#[derive(Clone, Debug)]
pub struct PolyDisc<T: Real> {
    pub center: Vec<Complex<T>>,
    pub radius: T,
}

impl<T: Real> PolyDisc<T> {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Membership with a small slack factor so finite-difference probes near
    /// the boundary stay legal.
    pub fn contains(&self, w: &[Complex<T>]) -> bool {
        if w.len() != self.center.len() {
            return false;
        }
        let bound = self.radius * r::<T>(1.1);
        w.iter()
            .zip(self.center.iter())
            .all(|(x, c)| (*x - *c).norm_sqr().sqrt() <= bound)
    }

    /// Deterministic sample set: a tensor grid plus seeded uniform points,
    /// all within 0.75 of the radius.
    pub fn samples(&self, budget: usize, seed: u64) -> Vec<Vec<Complex<T>>> {
        let m = self.dim();
        let reach = self.radius * r::<T>(0.75);
        let mut k = 1usize;
        while (k + 1).pow(2 * m as u32) <= budget {
            k += 1;
        }
        let mut points = Vec::new();
        let coords: Vec<T> = (0..k)
            .map(|i| {
                if k == 1 {
                    T::zero()
                } else {
                    let t = r::<T>(i as f64 / (k - 1) as f64);
                    (t + t - T::one()) * reach
                }
            })
            .collect();
        let total = k.pow(2 * m as u32);
        for idx in 0..total {
            let mut rem = idx;
            let mut w = Vec::with_capacity(m);
            for j in 0..m {
                let re = coords[rem % k];
                rem /= k;
                let im = coords[rem % k];
                rem /= k;
                w.push(self.center[j] + Complex::new(re, im));
            }
            points.push(w);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while points.len() < budget {
            let w = (0..m)
                .map(|j| {
                    let re = r::<T>(rng.gen_range(-1.0..1.0)) * reach;
                    let im = r::<T>(rng.gen_range(-1.0..1.0)) * reach;
                    self.center[j] + Complex::new(re, im)
                })
                .collect();
            points.push(w);
        }
        points
    }

    /// Square grid over the first variable only (g x g real/imaginary steps),
    /// other variables held at the center.
    pub fn square_grid(&self, g: usize) -> Vec<Vec<Complex<T>>> {
        let reach = self.radius * r::<T>(0.75);
        let coord = |i: usize| -> T {
            if g == 1 {
                T::zero()
            } else {
                let t = r::<T>(i as f64 / (g - 1) as f64);
                (t + t - T::one()) * reach
            }
        };
        let mut points = Vec::with_capacity(g * g);
        for iy in 0..g {
            for ix in 0..g {
                let mut w = self.center.clone();
                w[0] += Complex::new(coord(ix), coord(iy));
                points.push(w);
            }
        }
        points
    }
}

/// A closed-form polynomial map from a complex chart into C^N. When
/// `conjugate_output` is set the evaluated map is the complex conjugate of
/// the polynomial core (an anti-holomorphic map); the translation is added
/// after evaluation.
#[derive(Clone, Debug)]
pub struct ParametricImmersion<T: Real> {
    pub name: String,
    pub domain: PolyDisc<T>,
    pub components: Vec<Poly<T>>,
    pub conjugate_output: bool,
    pub translation: CVector<T>,
}

impl<T: Real> ParametricImmersion<T> {
    pub fn new(
        name: impl Into<String>,
        domain: PolyDisc<T>,
        components: Vec<Poly<T>>,
        conjugate_output: bool,
        translation: CVector<T>,
    ) -> Self {
        let m = domain.dim();
        for p in &components {
            assert_eq!(p.nvars, m, "component arity mismatch");
        }
        assert_eq!(translation.dim(), components.len());
        Self {
            name: name.into(),
            domain,
            components,
            conjugate_output,
            translation,
        }
    }

    /// Equivalent immersion with the translation folded into the constant
    /// terms of the polynomial core.
    pub fn with_translation_folded(&self) -> Self {
        let mut components = self.components.clone();
        for (i, p) in components.iter_mut().enumerate() {
            let t = self.translation.component(i);
            let c = if self.conjugate_output { t.conj() } else { t };
            if c != Complex::new(T::zero(), T::zero()) {
                p.terms.push(Term {
                    coeff: c,
                    powers: vec![0; p.nvars],
                });
            }
        }
        Self {
            name: self.name.clone(),
            domain: self.domain.clone(),
            components,
            conjugate_output: self.conjugate_output,
            translation: CVector::zeros(self.components.len()),
        }
    }

    fn eval_core(&self, w: &[Complex<T>]) -> CVector<T> {
        CVector::new(self.components.iter().map(|p| p.eval(w)).collect())
    }

    /// Exact jet via coefficient manipulation of the polynomial core.
    pub fn exact_jet(&self, w: &[Complex<T>]) -> Result<Jet<T>> {
        if !self.domain.contains(w) {
            return Err(Error::OutOfDomain);
        }
        let m = self.domain.dim();
        let n = self.components.len();
        let i_unit = Complex::new(T::zero(), T::one());

        // first Wirtinger derivatives of the core
        let dp: Vec<CVector<T>> = (0..m)
            .map(|k| CVector::new(self.components.iter().map(|p| p.diff(k).eval(w)).collect()))
            .collect();
        // second Wirtinger derivatives
        let mut d2p = vec![vec![CVector::zeros(n); m]; m];
        for j in 0..m {
            for k in j..m {
                let v = CVector::new(
                    self.components
                        .iter()
                        .map(|p| p.diff(j).diff(k).eval(w))
                        .collect(),
                );
                d2p[j][k] = v.clone();
                d2p[k][j] = v;
            }
        }

        // real-coordinate blocks of the (holomorphic) core
        let mut d1 = Vec::with_capacity(2 * m);
        for k in 0..m {
            d1.push(dp[k].clone()); // d/dx_k
        }
        for k in 0..m {
            d1.push(dp[k].scaled(i_unit)); // d/dy_k
        }
        let mut d2 = vec![vec![CVector::zeros(n); 2 * m]; 2 * m];
        for j in 0..m {
            for k in 0..m {
                d2[j][k] = d2p[j][k].clone(); // x_j x_k
                d2[j][m + k] = d2p[j][k].scaled(i_unit); // x_j y_k
                d2[m + j][k] = d2p[j][k].scaled(i_unit); // y_j x_k
                d2[m + j][m + k] = d2p[j][k].neg(); // y_j y_k
            }
        }

        let mut value = self.eval_core(w);
        if self.conjugate_output {
            value = value.conj();
            for v in d1.iter_mut() {
                *v = v.conj();
            }
            for row in d2.iter_mut() {
                for v in row.iter_mut() {
                    *v = v.conj();
                }
            }
        }
        value = value.add(&self.translation);

        Ok(Jet {
            point: w.to_vec(),
            value,
            d1,
            d2,
        })
    }

    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .map(|p| p.degree())
            .max()
            .unwrap_or(0)
    }
}

impl<T: Real> ChartMap<T> for ParametricImmersion<T> {
    fn domain_dim(&self) -> usize {
        self.domain.dim()
    }

    fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, w: &[Complex<T>]) -> Result<CVector<T>> {
        if !self.domain.contains(w) {
            return Err(Error::OutOfDomain);
        }
        let mut v = self.eval_core(w);
        if self.conjugate_output {
            v = v.conj();
        }
        Ok(v.add(&self.translation))
    }

    fn chart_scale(&self) -> T {
        self.domain.radius
    }

    fn jet(&self, w: &[Complex<T>]) -> Result<Jet<T>> {
        self.exact_jet(w)
    }

    fn jet_d1(&self, w: &[Complex<T>]) -> Result<Jet<T>> {
        self.exact_jet(w)
    }
}

/// Chart map defined by a closure; jets come from finite differences.
pub struct FnMap<T: Real, F>
where
    F: Fn(&[Complex<T>]) -> Result<CVector<T>>,
{
    pub domain_dim: usize,
    pub ambient_dim: usize,
    pub scale: T,
    pub f: F,
}

impl<T: Real, F> ChartMap<T> for FnMap<T, F>
where
    F: Fn(&[Complex<T>]) -> Result<CVector<T>>,
{
    fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    fn eval(&self, w: &[Complex<T>]) -> Result<CVector<T>> {
        (self.f)(w)
    }

    fn chart_scale(&self) -> T {
        self.scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolomorphyClass {
    Holomorphic,
    AntiHolomorphic,
    Neither,
}

impl std::fmt::Display for HolomorphyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Holomorphic => write!(f, "holomorphic"),
            Self::AntiHolomorphic => write!(f, "anti-holomorphic"),
            Self::Neither => write!(f, "neither"),
        }
    }
}

/// Classifies a map by the smaller of the two Cauchy-Riemann residuals,
/// maximized over the samples. `Neither` when both exceed 1e-6.
pub fn classify_holomorphy<T: Real, M: ChartMap<T> + ?Sized>(
    map: &M,
    samples: &[Vec<Complex<T>>],
) -> Result<(HolomorphyClass, T)> {
    assert!(!samples.is_empty());
    let m = map.domain_dim();
    let mut res_holo = T::zero();
    let mut res_anti = T::zero();
    for w in samples {
        let jet = map.jet_d1(w)?;
        let scale = {
            let s = jet.d1_scale();
            if s > T::one() {
                s
            } else {
                T::one()
            }
        };
        for k in 0..m {
            // holomorphic: d/dy = i d/dx, anti-holomorphic: d/dy = -i d/dx
            let h = jet.dy(k).sub(&jet.dx(k).j()).norm() / scale;
            let a = jet.dy(k).add(&jet.dx(k).j()).norm() / scale;
            if h > res_holo {
                res_holo = h;
            }
            if a > res_anti {
                res_anti = a;
            }
        }
    }
    let cut = r::<T>(1e-6);
    if res_holo <= res_anti && res_holo <= cut {
        Ok((HolomorphyClass::Holomorphic, res_holo))
    } else if res_anti < res_holo && res_anti <= cut {
        Ok((HolomorphyClass::AntiHolomorphic, res_anti))
    } else {
        let best = if res_holo < res_anti {
            res_holo
        } else {
            res_anti
        };
        Ok((HolomorphyClass::Neither, best))
    }
}

/// Tangent/normal split and position decomposition at a point.
#[derive(Clone, Debug)]
pub struct FrameData<T: Real> {
    pub tangent: CSubspace<T>,
    pub normal: CSubspace<T>,
    pub f_perp: CVector<T>,
    pub f_top: CVector<T>,
    pub position_tangent: bool,
}

/// Builds the frame from a jet: tangent is the complex span of the Jacobian
/// columns, normal its complement, and the position vector splits against
/// that decomposition.
pub fn frame<T: Real>(jet: &Jet<T>) -> Result<FrameData<T>> {
    let m = jet.domain_dim();
    let tol = r::<T>(1e-9);
    let tangent = complex_span(&jet.d1, tol);
    if tangent.complex_dim() != m {
        return Err(Error::NotImmersedAtPoint {
            rank: tangent.complex_dim(),
            expected: m,
        });
    }
    let normal = orthogonal_complement(&tangent, tol);
    let f_perp = normal.project(&jet.value)?;
    let f_top = jet.value.sub(&f_perp);
    let position_tangent = f_perp.norm() <= r::<T>(1e-9) * (T::one() + jet.value.norm());
    Ok(FrameData {
        tangent,
        normal,
        f_perp,
        f_top,
        position_tangent,
    })
}

/// Normal-valued second fundamental form in real chart coordinates, together
/// with the pullback metric needed for shape operators.
#[derive(Clone, Debug)]
pub struct SecondFundamentalForm<T: Real> {
    pub m: usize,
    /// alpha[a][b], values in the normal subspace; indices over 2m real
    /// chart directions.
    pub alpha: Vec<Vec<CVector<T>>>,
    /// Pullback Gram matrix of the chart coordinate vectors.
    pub gram: DMatrix<T>,
    pub frame: FrameData<T>,
    pub d1: Vec<CVector<T>>,
}

pub fn second_fundamental<T: Real>(
    jet: &Jet<T>,
    frame: &FrameData<T>,
) -> Result<SecondFundamentalForm<T>> {
    let m = jet.domain_dim();
    let two_m = 2 * m;
    assert!(!jet.d2.is_empty(), "second-order jet required");
    let mut alpha = vec![vec![CVector::zeros(jet.ambient_dim()); two_m]; two_m];
    for a in 0..two_m {
        for b in a..two_m {
            let v = frame.normal.project(jet.second(a, b))?;
            alpha[a][b] = v.clone();
            alpha[b][a] = v;
        }
    }
    let gram = DMatrix::from_fn(two_m, two_m, |a, b| jet.d1[a].re_dot(&jet.d1[b]));
    Ok(SecondFundamentalForm {
        m,
        alpha,
        gram,
        frame: frame.clone(),
        d1: jet.d1.clone(),
    })
}

impl<T: Real> SecondFundamentalForm<T> {
    /// Bilinear matrix B_delta[a][b] = <alpha(e_a, e_b), delta>.
    pub fn shape_bilinear(&self, delta: &CVector<T>) -> DMatrix<T> {
        let two_m = 2 * self.m;
        DMatrix::from_fn(two_m, two_m, |a, b| self.alpha[a][b].re_dot(delta))
    }

    /// Shape operator A_delta = G^{-1} B_delta in chart coordinates.
    pub fn shape_operator(&self, delta: &CVector<T>) -> DMatrix<T> {
        let b = self.shape_bilinear(delta);
        self.gram
            .clone()
            .lu()
            .solve(&b)
            .expect("pullback metric is positive definite at an immersed point")
    }

    /// Chart coordinates of an ambient tangent vector (pullback solve).
    pub fn tangent_coords(&self, v: &CVector<T>) -> DVector<T> {
        let two_m = 2 * self.m;
        let rhs = DVector::from_fn(two_m, |a, _| self.d1[a].re_dot(v));
        self.gram
            .clone()
            .lu()
            .solve(&rhs)
            .expect("pullback metric is positive definite at an immersed point")
    }

    /// alpha applied to two real chart vectors.
    pub fn alpha_apply(&self, x: &DVector<T>, y: &DVector<T>) -> CVector<T> {
        let two_m = 2 * self.m;
        let mut acc = CVector::zeros(self.alpha[0][0].dim());
        for a in 0..two_m {
            if x[a] == T::zero() {
                continue;
            }
            for b in 0..two_m {
                let c = x[a] * y[b];
                if c != T::zero() {
                    acc = acc.add(&self.alpha[a][b].scaled_re(c));
                }
            }
        }
        acc
    }

    /// Largest entry norm; the natural scale for nullity residuals.
    pub fn alpha_scale(&self) -> T {
        self.alpha
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Relative nullity data: the complex kernel of the second fundamental form
/// in chart coordinates.
#[derive(Clone, Debug)]
pub struct NullityData<T: Real> {
    /// Complex subspace of the chart coordinate space C^m.
    pub delta: CSubspace<T>,
    pub nu: usize,
    /// Worst annihilation residual of the kernel directions, relative to the
    /// size of alpha.
    pub residual: T,
    /// Whether the real kernel was J-invariant (it must be, for holomorphic
    /// or anti-holomorphic immersions).
    pub j_invariant: bool,
}

pub fn relative_nullity<T: Real>(
    sff: &SecondFundamentalForm<T>,
    atol: T,
    rtol: T,
) -> NullityData<T> {
    let m = sff.m;
    let two_m = 2 * m;
    let n_amb = sff.alpha[0][0].dim();
    // rows: (b, ambient real coordinate), cols: a
    let mut mat = DMatrix::zeros(two_m * 2 * n_amb, two_m);
    for b in 0..two_m {
        for a in 0..two_m {
            let rc = sff.alpha[a][b].real_coords();
            for k in 0..2 * n_amb {
                mat[(b * 2 * n_amb + k, a)] = rc[k];
            }
        }
    }
    let kernel = real_kernel(&mat, atol, rtol);
    let complex_kernel: Vec<CVector<T>> = kernel
        .iter()
        .map(|v| CVector::new(chart_r_to_c(v)))
        .collect();
    let delta = if complex_kernel.is_empty() {
        CSubspace::zero(m)
    } else {
        complex_span(&complex_kernel, r(1e-8))
    };
    let nu = delta.complex_dim();
    let j_invariant = kernel.len() == 2 * nu;

    let scale = {
        let s = sff.alpha_scale();
        if s > T::one() {
            s
        } else {
            T::one()
        }
    };
    let mut residual = T::zero();
    for k in 0..nu {
        let d = delta.basis_vector(k);
        let x = chart_c_to_r(&d.iter().copied().collect::<Vec<_>>());
        for b in 0..two_m {
            let mut e_b = DVector::zeros(two_m);
            e_b[b] = T::one();
            let res = sff.alpha_apply(&x, &e_b).norm() / scale;
            if res > residual {
                residual = res;
            }
        }
    }
    NullityData {
        delta,
        nu,
        residual,
        j_invariant,
    }
}

/// First normal space: complex span of the image of alpha. Also computed as
/// the complement of { delta : A_delta = 0 } within the normal subspace; the
/// returned flag records whether the two routes agree.
pub fn first_normal<T: Real>(
    sff: &SecondFundamentalForm<T>,
    atol: T,
    rtol: T,
) -> (CSubspace<T>, bool) {
    let two_m = 2 * sff.m;
    let mut values = Vec::new();
    for a in 0..two_m {
        for b in a..two_m {
            values.push(sff.alpha[a][b].clone());
        }
    }
    let n1 = complex_span(&values, r(1e-8));

    // second route: kernel of delta -> B_delta over the normal bundle
    let q = sff.frame.normal.complex_dim();
    let consistent = if q == 0 {
        n1.complex_dim() == 0
    } else {
        let mut mat = DMatrix::zeros(two_m * two_m, 2 * q);
        for j in 0..q {
            let nj = sff.frame.normal.basis_vector(j);
            let inj = nj.j();
            for a in 0..two_m {
                for b in 0..two_m {
                    mat[(a * two_m + b, j)] = sff.alpha[a][b].re_dot(&nj);
                    mat[(a * two_m + b, q + j)] = sff.alpha[a][b].re_dot(&inj);
                }
            }
        }
        let kernel = real_kernel(&mat, atol, rtol);
        let kernel_vectors: Vec<CVector<T>> = kernel
            .iter()
            .map(|v| {
                let mut acc = CVector::zeros(sff.frame.normal.ambient_dim());
                for j in 0..q {
                    let nj = sff.frame.normal.basis_vector(j);
                    acc = acc.add(&nj.scaled_re(v[j]));
                    acc = acc.add(&nj.j().scaled_re(v[q + j]));
                }
                acc
            })
            .collect();
        let zero_space = if kernel_vectors.is_empty() {
            CSubspace::zero(sff.frame.normal.ambient_dim())
        } else {
            complex_span(&kernel_vectors, r(1e-8))
        };
        // complement of the zero-shape directions within the normal bundle
        let mut candidates = Vec::new();
        for j in 0..q {
            let nj = sff.frame.normal.basis_vector(j);
            let p = zero_space.project(&nj).expect("ambient dims agree");
            candidates.push(nj.sub(&p));
        }
        let n1_alt = complex_span(&candidates, r(1e-7));
        n1_alt.complex_dim() == n1.complex_dim() && n1_alt.subspace_distance(&n1) <= r(1e-6)
    };
    (n1, consistent)
}

/// Residuals of the structural identities tying df^perp, the shape operator,
/// and the inverted normal component g = i(f^perp).
#[derive(Clone, Debug)]
pub struct StructuralReport<T: Real> {
    /// Tangent part of d f^perp vs -A_{f^perp}.
    pub res_shape: T,
    /// Normal part of d f^perp vs -alpha(., f^top).
    pub res_alpha: T,
    /// Chain rule for dg vs finite differences of g.
    pub res_chain: T,
    /// dg J + J dg + 2 ||g||^2 J Pi_{g^perp} alpha(., f^top); collapses to the
    /// anti-holomorphy of g in codimension one.
    pub res_antiholo: T,
    pub codimension: usize,
}

impl<T: Real> StructuralReport<T> {
    pub fn max_residual(&self) -> T {
        [
            self.res_shape,
            self.res_alpha,
            self.res_chain,
            self.res_antiholo,
        ]
        .into_iter()
        .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

pub fn verify_structural_identities<T: Real, M: ChartMap<T> + ?Sized>(
    map: &M,
    w: &[Complex<T>],
) -> Result<StructuralReport<T>> {
    let (class, res) = classify_holomorphy(map, &[w.to_vec()])?;
    if class != HolomorphyClass::Holomorphic {
        return Err(Error::WrongHolomorphyClass {
            expected: HolomorphyClass::Holomorphic.to_string(),
            found: format!("{class} (residual {:?})", res),
        });
    }
    let jet = map.jet(w)?;
    let fr = frame(&jet)?;
    if fr.position_tangent {
        return Err(Error::PositionTangent);
    }
    let sff = second_fundamental(&jet, &fr)?;
    let m = map.domain_dim();
    let two_m = 2 * m;
    let n = map.ambient_dim();

    // finite differences of the basis-free maps w -> f^perp(w), w -> g(w)
    let f_perp_map = FnMap {
        domain_dim: m,
        ambient_dim: n,
        scale: map.chart_scale(),
        f: |p: &[Complex<T>]| {
            let jp = map.jet_d1(p)?;
            Ok(frame(&jp)?.f_perp)
        },
    };
    let dfp = fd_jet(&f_perp_map, w, FdConfig::first_order_only())?;
    let g_map = FnMap {
        domain_dim: m,
        ambient_dim: n,
        scale: map.chart_scale(),
        f: |p: &[Complex<T>]| {
            let jp = map.jet_d1(p)?;
            invert(&frame(&jp)?.f_perp)
        },
    };
    let dg = fd_jet(&g_map, w, FdConfig::first_order_only())?;

    let a_fp = sff.shape_operator(&fr.f_perp);
    let c_top = sff.tangent_coords(&fr.f_top);
    let g = invert(&fr.f_perp)?;
    let g_span = complex_span(&[g.clone()], r(1e-12));
    let g_norm_sq = g.norm_sq();

    let rel = |num: T, a: &CVector<T>, b: &CVector<T>| -> T {
        let s = T::one() + a.norm() + b.norm();
        num / s
    };

    let mut res_shape = T::zero();
    let mut res_alpha = T::zero();
    let mut res_chain = T::zero();
    let mut res_antiholo = T::zero();

    for a in 0..two_m {
        let dfp_a = &dfp.d1[a];
        let t_part = fr.tangent.project(dfp_a)?;
        let n_part = dfp_a.sub(&t_part);

        // (a) tangent part of d f^perp = -A_{f^perp}
        let expected_t = jet.apply_d1(&a_fp.column(a).into_owned()).neg();
        let ra = rel(t_part.sub(&expected_t).norm(), &t_part, &expected_t);
        if ra > res_shape {
            res_shape = ra;
        }

        // (b) normal part of d f^perp = -alpha(., f^top)
        let mut e_a = DVector::zeros(two_m);
        e_a[a] = T::one();
        let expected_n = sff.alpha_apply(&e_a, &c_top).neg();
        let rb = rel(n_part.sub(&expected_n).norm(), &n_part, &expected_n);
        if rb > res_alpha {
            res_alpha = rb;
        }

        // (c) chain rule: dg = ||f^perp||^{-2} R_{f^perp} d f^perp
        let chain = crate::complex_linalg::reflect(&fr.f_perp, dfp_a)?
            .scaled_re(T::one() / fr.f_perp.norm_sq());
        let rc = rel(dg.d1[a].sub(&chain).norm(), &dg.d1[a], &chain);
        if rc > res_chain {
            res_chain = rc;
        }

        // (d) dg J + J dg = -2 ||g||^2 J Pi_{g^perp} alpha(., f^top)
        let j_ea = chart_j(&e_a);
        let lhs = dg.apply_d1(&j_ea).add(&dg.d1[a].j());
        let a_ft = sff.alpha_apply(&e_a, &c_top);
        let pi = a_ft.sub(&g_span.project(&a_ft)?);
        let rhs = pi.j().scaled_re(-(g_norm_sq + g_norm_sq));
        let rd = rel(lhs.sub(&rhs).norm(), &lhs, &rhs);
        if rd > res_antiholo {
            res_antiholo = rd;
        }
    }

    Ok(StructuralReport {
        res_shape,
        res_alpha,
        res_chain,
        res_antiholo,
        codimension: n - m,
    })
}
