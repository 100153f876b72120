//! The Gauss parametrization machinery: fibers of the bundle L over an
//! anti-holomorphic base, the assembled hypersurface map, singular-set and
//! shape-operator predictions, base recovery, roundtrip verification, and
//! cylinder detection for curve bases.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::complex_linalg::{complex_span, invert, orthogonal_complement, CSubspace, CVector};
use crate::error::{Error, Result};
use crate::immersion::{
    chart_c_to_r, classify_holomorphy, fd_jet, first_normal, frame, relative_nullity,
    second_fundamental, ChartMap, FdConfig, FnMap, HolomorphyClass, SecondFundamentalForm,
};
use crate::scalar::{r, Real};

/// Default absolute singular-value cutoff for rank decisions.
pub const DEFAULT_ATOL: f64 = 1e-10;
/// Default relative singular-value cutoff for rank decisions.
pub const DEFAULT_RTOL: f64 = 1e-8;

/// Everything the parametrization needs at one base point: the vertex
/// i(f_perp), an orthonormal complex basis of L = span{f_perp}^perp inside
/// the normal space, and the vectors entering the isomorphism P.
#[derive(Clone, Debug)]
pub struct GaussFiber<T: Real> {
    pub base_point: Vec<Complex<T>>,
    /// i(f_perp) at the base point.
    pub vertex: CVector<T>,
    /// Orthonormal complex basis of L.
    pub l_basis: CSubspace<T>,
    /// Base value f(w).
    pub f_hat: CVector<T>,
    /// Normal component of the base position vector.
    pub f_hat_perp: CVector<T>,
}

impl<T: Real> GaussFiber<T> {
    pub fn nu(&self) -> usize {
        self.l_basis.complex_dim()
    }

    /// The parametrized point vertex + sum c_k b_k.
    pub fn point(&self, coefficients: &[Complex<T>]) -> CVector<T> {
        let mut acc = self.vertex.clone();
        for (k, c) in coefficients.iter().enumerate() {
            acc = acc.add(&self.l_basis.basis_vector(k).scaled(*c));
        }
        acc
    }
}

/// A point of the total space of L: base point plus fiber coordinates in the
/// (deterministic) L basis.
#[derive(Clone, Debug)]
pub struct FiberPoint<T: Real> {
    pub base_point: Vec<Complex<T>>,
    pub coefficients: Vec<Complex<T>>,
}

/// Builds the Gauss fiber at a base point. The base must be anti-holomorphic,
/// never position-tangent and nullity-free there.
pub fn gauss_bundle<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    w: &[Complex<T>],
) -> Result<GaussFiber<T>> {
    let jet = base.jet(w)?;
    let fr = frame(&jet)?;
    if fr.position_tangent {
        return Err(Error::PositionTangent);
    }
    let (class, res) = classify_holomorphy(base, &[w.to_vec()])?;
    if class != HolomorphyClass::AntiHolomorphic {
        return Err(Error::WrongHolomorphyClass {
            expected: HolomorphyClass::AntiHolomorphic.to_string(),
            found: format!("{class} (residual {:?})", res),
        });
    }
    let sff = second_fundamental(&jet, &fr)?;
    // A totally geodesic base always has full nullity; detect it by scale
    // before the rank machinery so finite-difference noise cannot mask it.
    let d1_scale = jet.d1_scale();
    if sff.alpha_scale() <= r::<T>(1e-7) * (T::one() + d1_scale * d1_scale) {
        return Err(Error::NonzeroBaseNullity {
            nu: base.domain_dim(),
        });
    }
    let nd = relative_nullity(&sff, r(DEFAULT_ATOL), r(DEFAULT_RTOL));
    if nd.nu > 0 {
        return Err(Error::NonzeroBaseNullity { nu: nd.nu });
    }
    let vertex = invert(&fr.f_perp)?;
    let mut spanning = jet.d1.clone();
    spanning.push(fr.f_perp.clone());
    let filled = complex_span(&spanning, r(1e-9));
    let l_basis = orthogonal_complement(&filled, r(1e-9));
    Ok(GaussFiber {
        base_point: w.to_vec(),
        vertex,
        l_basis,
        f_hat: jet.value.clone(),
        f_hat_perp: fr.f_perp,
    })
}

/// Evaluates the parametrization at a fiber point.
pub fn parametrize<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    xi: &FiberPoint<T>,
) -> Result<CVector<T>> {
    let fiber = gauss_bundle(base, &xi.base_point)?;
    Ok(fiber.point(&xi.coefficients))
}

/// The kernel constraints cutting out L(w): a vector lies in L exactly when
/// it is Hermitian-orthogonal to the d/dx tangent vectors and to the position
/// value. For an anti-holomorphic base these constraints have holomorphic
/// coefficients in w, so L is a holomorphic subbundle.
fn l_constraints<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    w: &[Complex<T>],
) -> Result<DMatrix<Complex<T>>> {
    let jet = base.jet_d1(w)?;
    let m = base.domain_dim();
    let n = base.ambient_dim();
    let mut cols = DMatrix::zeros(n, m + 1);
    for k in 0..m {
        cols.set_column(k, jet.dx(k).as_dvector());
    }
    cols.set_column(m, jet.value.as_dvector());
    Ok(cols)
}

/// The fiber of L at a base point carrying a holomorphic frame: the frame
/// solves the (holomorphically varying) kernel constraints and reduces to the
/// orthonormal reference basis at the reference point.
#[derive(Clone, Debug)]
pub struct FramedFiber<T: Real> {
    pub fiber: GaussFiber<T>,
    /// Holomorphic section of the affine bundle vertex + L; agrees with the
    /// pointwise vertex at the reference point and differs from it only by a
    /// vector in L elsewhere.
    pub section: CVector<T>,
    pub frame: Vec<CVector<T>>,
}

impl<T: Real> FramedFiber<T> {
    pub fn point(&self, coefficients: &[Complex<T>]) -> CVector<T> {
        let mut acc = self.section.clone();
        for (k, c) in coefficients.iter().enumerate() {
            acc = acc.add(&self.frame[k].scaled(*c));
        }
        acc
    }
}

/// The parametrization as a chart map on (w, c): m base coordinates followed
/// by nu fiber coordinates. The fiber frame is the holomorphic continuation
/// of the reference fiber basis, so the assembled map is holomorphic in all
/// coordinates and finite differences through it are meaningful.
pub struct AssembledMap<'a, T: Real, M: ChartMap<T> + ?Sized> {
    pub base: &'a M,
    pub reference: GaussFiber<T>,
    /// Constraint columns at the reference point, kept fixed so the frame
    /// solve stays holomorphic in w.
    anchor: DMatrix<Complex<T>>,
    base_dim: usize,
}

impl<'a, T: Real, M: ChartMap<T> + ?Sized> AssembledMap<'a, T, M> {
    pub fn new(base: &'a M, reference_point: &[Complex<T>]) -> Result<Self> {
        let reference = gauss_bundle(base, reference_point)?;
        let anchor = l_constraints(base, reference_point)?;
        Ok(Self {
            base,
            reference,
            anchor,
            base_dim: base.domain_dim(),
        })
    }

    pub fn fiber_dim(&self) -> usize {
        self.reference.nu()
    }

    /// Gauss fiber with the holomorphic frame continued from the reference
    /// basis: frame_k(w) = b_k - V (M(w) V)^{-1} M(w) b_k where M(w) is the
    /// constraint matrix and V its adjoint anchor at the reference point.
    pub fn fiber_at(&self, w: &[Complex<T>]) -> Result<FramedFiber<T>> {
        let fiber = gauss_bundle(self.base, w)?;
        let cols = l_constraints(self.base, w)?;
        let m_w = cols.adjoint();
        let square = &m_w * &self.anchor;
        let lu = square.lu();
        let mut frame = Vec::with_capacity(self.reference.nu());
        for k in 0..self.reference.nu() {
            let b = self.reference.l_basis.basis_vector(k);
            let rhs = &m_w * b.as_dvector();
            let coeff = lu.solve(&rhs).ok_or(Error::SingularFiberPoint)?;
            let correction = &self.anchor * coeff;
            frame.push(CVector::from_dvector(b.as_dvector() - correction));
        }
        // holomorphic vertex section: the unique solution of the constraints
        // <dx_k, y> = 0, <f, y> = 1 lying in the anchor column space
        let m_base = self.base.domain_dim();
        let mut rhs =
            nalgebra::DVector::from_element(m_base + 1, Complex::new(T::zero(), T::zero()));
        rhs[m_base] = Complex::new(T::one(), T::zero());
        let coeff = lu.solve(&rhs).ok_or(Error::SingularFiberPoint)?;
        let section = CVector::from_dvector(&self.anchor * coeff);
        Ok(FramedFiber {
            fiber,
            section,
            frame,
        })
    }

    pub fn split<'b>(&self, wc: &'b [Complex<T>]) -> (&'b [Complex<T>], &'b [Complex<T>]) {
        wc.split_at(self.base_dim)
    }
}

impl<'a, T: Real, M: ChartMap<T> + ?Sized> ChartMap<T> for AssembledMap<'a, T, M> {
    fn domain_dim(&self) -> usize {
        self.base_dim + self.fiber_dim()
    }

    fn ambient_dim(&self) -> usize {
        self.reference.vertex.dim()
    }

    fn eval(&self, wc: &[Complex<T>]) -> Result<CVector<T>> {
        let (w, c) = self.split(wc);
        let fiber = self.fiber_at(w)?;
        Ok(fiber.point(c))
    }

    fn chart_scale(&self) -> T {
        self.base.chart_scale()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularStatus {
    Regular,
    Singular,
    Indeterminate,
}

impl std::fmt::Display for SingularStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Regular => write!(f, "regular"),
            Self::Singular => write!(f, "singular"),
            Self::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Verdict on the invertibility of the base shape operator in the direction
/// vertex + xi. Points whose smallest singular value falls within a factor 10
/// of the zero threshold are reported indeterminate rather than forced.
#[derive(Clone, Debug)]
pub struct SingularVerdict<T: Real> {
    pub status: SingularStatus,
    pub det_value: T,
    pub min_singular_value: T,
    pub threshold: T,
}

/// Singularity of the shape operator of `sff` in the ambient direction `eta`.
pub fn shape_singularity<T: Real>(
    sff: &SecondFundamentalForm<T>,
    eta: &CVector<T>,
    atol: T,
    rtol: T,
) -> SingularVerdict<T> {
    let a = sff.shape_operator(eta);
    let det_value = a.determinant();
    let svd = a.svd(false, false);
    let mut min_sv = r::<T>(f64::INFINITY);
    let mut max_sv = T::zero();
    for s in svd.singular_values.iter() {
        if *s < min_sv {
            min_sv = *s;
        }
        if *s > max_sv {
            max_sv = *s;
        }
    }
    let threshold = if atol > rtol * max_sv {
        atol
    } else {
        rtol * max_sv
    };
    let ten = r::<T>(10.0);
    let status = if min_sv > threshold * ten {
        SingularStatus::Regular
    } else if min_sv < threshold / ten {
        SingularStatus::Singular
    } else {
        SingularStatus::Indeterminate
    };
    SingularVerdict {
        status,
        det_value,
        min_singular_value: min_sv,
        threshold,
    }
}

/// Predicts whether the parametrization is singular at a fiber point from the
/// base data alone.
pub fn singular_test<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    xi: &FiberPoint<T>,
    atol: T,
    rtol: T,
) -> Result<SingularVerdict<T>> {
    let fiber = gauss_bundle(base, &xi.base_point)?;
    let jet = base.jet(&xi.base_point)?;
    let fr = frame(&jet)?;
    let sff = second_fundamental(&jet, &fr)?;
    let eta = fiber.point(&xi.coefficients);
    Ok(shape_singularity(&sff, &eta, atol, rtol))
}

/// The isomorphism P(Z) = Z - <Z, f> i(f_perp) - <Z, Jf> J i(f_perp), mapping
/// base tangent vectors onto the complement of the ruling directions in the
/// tangent space of the parametrized hypersurface.
pub fn p_map<T: Real>(z: &CVector<T>, fiber: &GaussFiber<T>) -> CVector<T> {
    let v = &fiber.vertex;
    z.sub(&v.scaled_re(z.re_dot(&fiber.f_hat)))
        .sub(&v.j().scaled_re(z.re_dot(&fiber.f_hat.j())))
}

/// Closed-form prediction of the hypersurface shape operator in the ambient
/// normal direction f_hat, expressed in the basis { P(df e_a) } of the
/// complement of the ruling directions.
#[derive(Clone, Debug)]
pub struct ShapePrediction<T: Real> {
    /// Matrix of the predicted operator in `basis` coordinates: the inverse
    /// of the base shape operator in direction vertex + xi, scaled by
    /// |f_perp|^2 / |f_hat|^2 to land in the f_hat direction convention.
    pub matrix: DMatrix<T>,
    /// Ambient vectors P(df e_a), a over the 2m real base directions.
    pub basis: Vec<CVector<T>>,
    pub eta: CVector<T>,
    pub f_hat: CVector<T>,
    pub f_hat_perp: CVector<T>,
}

pub fn shape_from_base<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    xi: &FiberPoint<T>,
    atol: T,
    rtol: T,
) -> Result<ShapePrediction<T>> {
    let fiber = gauss_bundle(base, &xi.base_point)?;
    let jet = base.jet(&xi.base_point)?;
    let fr = frame(&jet)?;
    let sff = second_fundamental(&jet, &fr)?;
    let eta = fiber.point(&xi.coefficients);
    let verdict = shape_singularity(&sff, &eta, atol, rtol);
    if verdict.status != SingularStatus::Regular {
        return Err(Error::SingularFiberPoint);
    }
    let a_eta = sff.shape_operator(&eta);
    let scale = fiber.f_hat_perp.norm_sq() / fiber.f_hat.norm_sq();
    let matrix = a_eta.try_inverse().ok_or(Error::SingularFiberPoint)? * scale;
    let basis = jet.d1.iter().map(|z| p_map(z, &fiber)).collect();
    Ok(ShapePrediction {
        matrix,
        basis,
        eta,
        f_hat: fiber.f_hat.clone(),
        f_hat_perp: fiber.f_hat_perp.clone(),
    })
}

/// Worst relative deviation between the predicted shape operator and the one
/// computed directly from second derivatives of the assembled map, both taken
/// in the direction f_perp of the base position vector.
pub fn shape_match_residual<T: Real, M: ChartMap<T> + ?Sized>(
    assembled: &AssembledMap<'_, T, M>,
    xi: &FiberPoint<T>,
    atol: T,
    rtol: T,
) -> Result<T> {
    let pred = shape_from_base(assembled.base, xi, atol, rtol)?;
    // express the fiber point (given in the pointwise orthonormal basis) in
    // the assembled map's section + holomorphic-frame coordinates, so the
    // oracle differentiates at the same hypersurface point
    let framed = assembled.fiber_at(&xi.base_point)?;
    let target = framed.fiber.point(&xi.coefficients);
    let diff = target.sub(&framed.section);
    let nu = framed.frame.len();
    let gram = DMatrix::from_fn(nu, nu, |i, j| framed.frame[i].herm_dot(&framed.frame[j]));
    let rhs = nalgebra::DVector::from_fn(nu, |i, _| framed.frame[i].herm_dot(&diff));
    let coords = gram.lu().solve(&rhs).ok_or(Error::SingularFiberPoint)?;
    let mut wc = xi.base_point.clone();
    wc.extend(coords.iter().copied());
    let jet = assembled.jet(&wc)?;
    let fr = frame(&jet)?;
    let sff = second_fundamental(&jet, &fr)?;
    let oracle_op = sff.shape_operator(&pred.f_hat);
    let mut worst = T::zero();
    for (a, pa) in pred.basis.iter().enumerate() {
        let coords = sff.tangent_coords(pa);
        let oracle_img = jet.apply_d1(&(&oracle_op * coords));
        let mut pred_img = CVector::zeros(pa.dim());
        for (b, pb) in pred.basis.iter().enumerate() {
            pred_img = pred_img.add(&pb.scaled_re(pred.matrix[(b, a)]));
        }
        let rel = oracle_img.sub(&pred_img).norm() / (T::one() + pred_img.norm());
        if rel > worst {
            worst = rel;
        }
    }
    Ok(worst)
}

/// Result of recovering the anti-holomorphic base value g = i(f_perp) from a
/// hypersurface, with its diagnostic residuals.
#[derive(Clone, Debug)]
pub struct RecoverReport<T: Real> {
    pub g: CVector<T>,
    /// Unit, phase-normalized direction of f_perp: the Gauss-map value.
    pub gauss_direction: CVector<T>,
    pub nu: usize,
    /// Anti-holomorphy residual of g.
    pub res_antiholo: T,
    /// Worst norm of dg applied to a relative-nullity direction.
    pub res_delta: T,
    /// Anti-holomorphy residual of the projectivized Gauss map in its best
    /// affine chart.
    pub res_gauss: T,
}

pub fn recover_base<T: Real, M: ChartMap<T> + ?Sized>(
    f: &M,
    w: &[Complex<T>],
    atol: T,
    rtol: T,
) -> Result<RecoverReport<T>> {
    let m = f.domain_dim();
    let n = f.ambient_dim();
    if n != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: m + 1,
            got: n,
        });
    }
    let jet = f.jet(w)?;
    let fr = frame(&jet)?;
    if fr.position_tangent {
        return Err(Error::PositionTangent);
    }
    let (class, res) = classify_holomorphy(f, &[w.to_vec()])?;
    if class != HolomorphyClass::Holomorphic {
        return Err(Error::WrongHolomorphyClass {
            expected: HolomorphyClass::Holomorphic.to_string(),
            found: format!("{class} (residual {:?})", res),
        });
    }
    let sff = second_fundamental(&jet, &fr)?;
    let nd = relative_nullity(&sff, atol, rtol);
    let g = invert(&fr.f_perp)?;

    // g and its projectivized chart representative, differentiated by finite
    // differences of the composed evaluator. A slightly larger step than the
    // default keeps nested-evaluation noise out of the derivative.
    let cfg = FdConfig {
        step1: 3e-3,
        step2: 3e-3,
        fourth_order: true,
        with_second: false,
    };
    let g_map = FnMap {
        domain_dim: m,
        ambient_dim: n,
        scale: f.chart_scale(),
        f: |p: &[Complex<T>]| invert(&frame(&f.jet_d1(p)?)?.f_perp),
    };
    let dg = fd_jet(&g_map, w, cfg)?;
    let scale = {
        let s = dg.d1_scale();
        if s > T::one() {
            s
        } else {
            T::one()
        }
    };
    let mut res_antiholo = T::zero();
    for k in 0..m {
        let a = dg.dy(k).add(&dg.dx(k).j()).norm() / scale;
        if a > res_antiholo {
            res_antiholo = a;
        }
    }
    let mut res_delta = T::zero();
    for k in 0..nd.nu {
        let d = nd.delta.basis_vector(k);
        let chart = chart_c_to_r(&d.iter().copied().collect::<Vec<_>>());
        let v = dg.apply_d1(&chart).norm() / scale;
        if v > res_delta {
            res_delta = v;
        }
    }

    // chart representative of the Gauss map: g divided by its largest
    // coordinate at w (quotients preserve the anti-holomorphy class)
    let mut k_star = 0;
    let mut best = T::zero();
    for (k, c) in g.iter().enumerate() {
        let mag = c.norm_sqr();
        if mag > best {
            best = mag;
            k_star = k;
        }
    }
    let n_map = FnMap {
        domain_dim: m,
        ambient_dim: n,
        scale: f.chart_scale(),
        f: |p: &[Complex<T>]| {
            let gv = invert(&frame(&f.jet_d1(p)?)?.f_perp)?;
            let d = gv.component(k_star);
            if d.norm_sqr().sqrt() <= r(1e-14) {
                return Err(Error::ChartUndefined { index: k_star });
            }
            Ok(gv.scaled(d.inv()))
        },
    };
    let dn = fd_jet(&n_map, w, cfg)?;
    let n_scale = {
        let s = dn.d1_scale();
        if s > T::one() {
            s
        } else {
            T::one()
        }
    };
    let mut res_gauss = T::zero();
    for k in 0..m {
        let a = dn.dy(k).add(&dn.dx(k).j()).norm() / n_scale;
        if a > res_gauss {
            res_gauss = a;
        }
    }

    let gauss_direction = fr
        .f_perp
        .scaled_re(T::one() / fr.f_perp.norm())
        .phase_normalized();
    Ok(RecoverReport {
        g,
        gauss_direction,
        nu: nd.nu,
        res_antiholo,
        res_delta,
        res_gauss,
    })
}

/// Per-sample outcome of the roundtrip verification.
#[derive(Clone, Debug)]
pub struct RoundtripRecord<T: Real> {
    pub w: Vec<Complex<T>>,
    pub status: std::result::Result<(), String>,
    pub nu: Option<usize>,
    /// Distance from f(x) - vertex to the recovered fiber L.
    pub distance: T,
    /// Shape operator of the recovered base in the vertex direction is
    /// nonsingular.
    pub cor_nonsingular: Option<bool>,
    /// L is orthogonal to the first normal space of the recovered base.
    pub cor_l_in_n1perp: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct RoundtripReport<T: Real> {
    pub records: Vec<RoundtripRecord<T>>,
    pub max_distance: T,
    pub all_ok: bool,
}

/// Recovers the base on a transversal slice through each sample and verifies
/// that the sample point lies on the parametrization rebuilt from it. Also
/// evaluates the completeness diagnostics (vertex-direction shape operator
/// nonsingular, L orthogonal to the first normal space) as booleans.
pub fn verify_roundtrip<T: Real, M: ChartMap<T> + ?Sized>(
    f: &M,
    samples: &[Vec<Complex<T>>],
    tol: T,
    atol: T,
    rtol: T,
) -> RoundtripReport<T> {
    let mut records = Vec::with_capacity(samples.len());
    let mut max_distance = T::zero();
    let mut all_ok = true;
    for w in samples {
        match roundtrip_at(f, w, atol, rtol) {
            Ok(rec) => {
                if rec.distance > max_distance {
                    max_distance = rec.distance;
                }
                if rec.distance > tol {
                    all_ok = false;
                }
                records.push(rec);
            }
            Err(e) => {
                all_ok = false;
                records.push(RoundtripRecord {
                    w: w.clone(),
                    status: Err(e.to_string()),
                    nu: None,
                    distance: r(f64::NAN),
                    cor_nonsingular: None,
                    cor_l_in_n1perp: None,
                });
            }
        }
    }
    RoundtripReport {
        records,
        max_distance,
        all_ok,
    }
}

fn roundtrip_at<T: Real, M: ChartMap<T> + ?Sized>(
    f: &M,
    w: &[Complex<T>],
    atol: T,
    rtol: T,
) -> Result<RoundtripRecord<T>> {
    let m = f.domain_dim();
    let jet = f.jet(w)?;
    let fr = frame(&jet)?;
    if fr.position_tangent {
        return Err(Error::PositionTangent);
    }
    let sff = second_fundamental(&jet, &fr)?;
    let nd = relative_nullity(&sff, atol, rtol);
    let nu = nd.nu;

    // transversal slice through w: complex directions orthogonal to the
    // nullity distribution in chart coordinates
    let slice = orthogonal_complement(&nd.delta, r(1e-9));
    let slice_dirs: Vec<Vec<Complex<T>>> = slice
        .basis_vectors()
        .iter()
        .map(|v| v.iter().copied().collect())
        .collect();
    let base_dim = slice_dirs.len();
    debug_assert_eq!(base_dim, m - nu);

    let w_owned = w.to_vec();
    let base_map = FnMap {
        domain_dim: base_dim,
        ambient_dim: f.ambient_dim(),
        scale: f.chart_scale(),
        f: |u: &[Complex<T>]| {
            let mut p = w_owned.clone();
            for (j, uj) in u.iter().enumerate() {
                for (k, d) in slice_dirs[j].iter().enumerate() {
                    p[k] += *uj * *d;
                }
            }
            invert(&frame(&f.jet_d1(&p)?)?.f_perp)
        },
    };
    let cfg = FdConfig {
        step1: 1e-3,
        step2: 1e-2,
        fourth_order: true,
        with_second: true,
    };
    let origin = vec![Complex::new(T::zero(), T::zero()); base_dim];
    let mut bjet = fd_jet(&base_map, &origin, cfg)?;
    // the recovered base is anti-holomorphic in exact arithmetic; snap the
    // differential onto that subspace so finite-difference noise cannot
    // inflate its complex rank
    let scale = {
        let s = bjet.d1_scale();
        if s > T::one() {
            s
        } else {
            T::one()
        }
    };
    for k in 0..base_dim {
        let res = bjet.dy(k).add(&bjet.dx(k).j()).norm() / scale;
        if res <= r(1e-5) {
            let dx = bjet.dx(k).add(&bjet.dy(k).j()).scaled_re(r(0.5));
            bjet.d1[base_dim + k] = dx.j().neg();
            bjet.d1[k] = dx;
        }
    }
    let bfr = frame(&bjet)?;
    if bfr.position_tangent {
        return Err(Error::PositionTangent);
    }
    let vertex = invert(&bfr.f_perp)?;
    let mut spanning = bjet.d1.clone();
    spanning.push(bfr.f_perp.clone());
    let l = orthogonal_complement(&complex_span(&spanning, r(1e-7)), r(1e-7));
    let diff = jet.value.sub(&vertex);
    let distance = if l.complex_dim() == 0 {
        diff.norm()
    } else {
        l.residual(&diff)
    };

    // completeness diagnostics on the recovered base
    let bsff = second_fundamental(&bjet, &bfr)?;
    let verdict = shape_singularity(&bsff, &vertex, r(1e-6), r(1e-6));
    let nonsingular = verdict.status == SingularStatus::Regular;
    let (n1, _) = first_normal(&bsff, r(1e-6), r(1e-6));
    let mut overlap = T::zero();
    for i in 0..l.complex_dim() {
        let li = l.basis_vector(i);
        for j in 0..n1.complex_dim() {
            let h = li.herm_dot(&n1.basis_vector(j)).norm_sqr().sqrt();
            if h > overlap {
                overlap = h;
            }
        }
    }
    Ok(RoundtripRecord {
        w: w.to_vec(),
        status: Ok(()),
        nu: Some(nu),
        distance,
        cor_nonsingular: Some(nonsingular),
        cor_l_in_n1perp: Some(overlap <= r(1e-6)),
    })
}

/// Outcome of the cylinder-mechanism check for curve bases.
#[derive(Clone, Debug)]
pub struct CylinderReport<T: Real> {
    pub is_cylinder: bool,
    /// The fixed complex 2-plane containing the curve data, when detected.
    pub plane: Option<CSubspace<T>>,
    /// True when the base is totally geodesic on the samples, which makes the
    /// verdict vacuous.
    pub degenerate: bool,
    pub span_dim: usize,
}

/// A curve base produces a cylinder exactly when its first normal spaces and
/// inverted position components stay inside one fixed complex 2-plane across
/// the samples.
pub fn cylinder_detect<T: Real, M: ChartMap<T> + ?Sized>(
    base: &M,
    samples: &[Vec<Complex<T>>],
    tol: T,
) -> Result<CylinderReport<T>> {
    if base.domain_dim() != 1 {
        return Err(Error::WrongBaseDimension {
            got: base.domain_dim(),
        });
    }
    let mut collected: Vec<CVector<T>> = Vec::new();
    let mut max_alpha = T::zero();
    for w in samples {
        let jet = base.jet(w)?;
        let fr = frame(&jet)?;
        let sff = second_fundamental(&jet, &fr)?;
        let s = sff.alpha_scale();
        if s > max_alpha {
            max_alpha = s;
        }
        for row in &sff.alpha {
            for v in row {
                collected.push(v.clone());
            }
        }
        collected.push(fr.f_perp.clone());
    }
    let degenerate = max_alpha <= r::<T>(1e-9);
    let span = complex_span(&collected, tol);
    let span_dim = span.complex_dim();
    let is_cylinder = span_dim <= 2;
    Ok(CylinderReport {
        plane: if is_cylinder { Some(span) } else { None },
        is_cylinder,
        degenerate,
        span_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::make_example;

    fn cpx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn cubic_fiber_golden_values() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let w = [cpx(1.0, 0.0)];
        let fiber = gauss_bundle(&base, &w).unwrap();
        let vertex = CVector::from_reals(&[4.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0]);
        assert!(fiber.vertex.sub(&vertex).norm() < 1e-12);
        assert_eq!(fiber.nu(), 1);
        let s6 = 6.0_f64.sqrt();
        let l0 = CVector::from_reals(&[1.0 / s6, -2.0 / s6, 1.0 / s6]);
        assert!(fiber.l_basis.basis_vector(0).sub(&l0).norm() < 1e-12);
        // <vertex, f_hat> = 1
        assert!((fiber.vertex.re_dot(&fiber.f_hat) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parametrize_golden_and_normality() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let w = vec![cpx(1.0, 0.0)];
        let at = |c: Complex<f64>| {
            parametrize(
                &base,
                &FiberPoint {
                    base_point: w.clone(),
                    coefficients: vec![c],
                },
            )
            .unwrap()
        };
        let v0 = at(cpx(0.0, 0.0));
        assert!(
            v0.sub(&CVector::from_reals(&[4.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0]))
                .norm()
                < 1e-12
        );
        let s6 = 6.0_f64.sqrt();
        let v1 = at(cpx(1.0, 0.0));
        let expected = CVector::from_reals(&[
            4.0 / 3.0 + 1.0 / s6,
            1.0 / 3.0 - 2.0 / s6,
            -2.0 / 3.0 + 1.0 / s6,
        ]);
        assert!(v1.sub(&expected).norm() < 1e-12);
        // <f(xi), f_hat(w)> = 1 for random coefficients
        let fiber = gauss_bundle(&base, &w).unwrap();
        for c in [cpx(0.3, -0.2), cpx(2.0, 1.5), cpx(-0.7, 0.1)] {
            let v = at(c);
            assert!((v.re_dot(&fiber.f_hat) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bundle_rejects_bad_bases() {
        // position tangent
        let plane = make_example::<f64>("plane").unwrap();
        let w = plane.domain.center.clone();
        assert!(matches!(
            gauss_bundle(&plane, &w),
            Err(Error::PositionTangent)
        ));
        // wrong class
        let cyl = make_example::<f64>("cylinder").unwrap();
        let w = cyl.domain.center.clone();
        assert!(matches!(
            gauss_bundle(&cyl, &w),
            Err(Error::WrongHolomorphyClass { .. })
        ));
    }

    #[test]
    fn fiber_dimension_arithmetic() {
        for (name, expected) in [
            ("cubic_curve", 1usize),
            ("plane_curve_embedded", 1),
            ("projective_cubic_lift", 2),
        ] {
            let base = make_example::<f64>(name).unwrap();
            let w = base.domain.center.clone();
            let fiber = gauss_bundle(&base, &w).unwrap();
            assert_eq!(fiber.nu(), expected, "{name}");
        }
    }

    #[test]
    fn assembled_map_is_holomorphic_with_expected_nullity() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let assembled = AssembledMap::new(&base, &base.domain.center.clone()).unwrap();
        assert_eq!(assembled.fiber_dim(), 1);
        let samples: Vec<Vec<Complex<f64>>> = base
            .domain
            .samples(6, 3)
            .into_iter()
            .zip([0.1, -0.2, 0.3, 0.25, -0.15, 0.05])
            .map(|(mut w, c)| {
                w.push(cpx(c, 0.4 * c));
                w
            })
            .collect();
        let (class, res) = classify_holomorphy(&assembled, &samples).unwrap();
        assert_eq!(class, HolomorphyClass::Holomorphic);
        assert!(res <= 1e-7, "residual {res}");
        for wc in &samples {
            let jet = assembled.jet(wc).unwrap();
            let fr = frame(&jet).unwrap();
            let sff = second_fundamental(&jet, &fr).unwrap();
            let nd = relative_nullity(&sff, 1e-7, 5e-7);
            assert_eq!(nd.nu, 1, "at {wc:?}");
            // ruling directions are the fiber coordinates
            let mut fiber_dir = CVector::zeros(2);
            let mut data = fiber_dir.as_dvector().clone();
            data[1] = cpx(1.0, 0.0);
            fiber_dir = CVector::from_dvector(data);
            assert!(nd.delta.residual(&fiber_dir) < 1e-6);
        }
    }

    #[test]
    fn singular_verdict_and_rank_agree() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let w = vec![cpx(1.0, 0.0)];
        let regular = FiberPoint {
            base_point: w.clone(),
            coefficients: vec![cpx(3.0, 2.0)],
        };
        let verdict = singular_test(&base, &regular, 1e-10, 1e-8).unwrap();
        assert_eq!(verdict.status, SingularStatus::Regular);

        // solve for the coefficient that kills the shape operator along the
        // fiber: the bilinear form entries are affine in (Re c, Im c)
        let jet = base.jet(&w).unwrap();
        let fr = frame(&jet).unwrap();
        let sff = second_fundamental(&jet, &fr).unwrap();
        let fiber = gauss_bundle(&base, &w).unwrap();
        let b = fiber.l_basis.basis_vector(0);
        let entry = |eta: &CVector<f64>| {
            let m = sff.shape_bilinear(eta);
            (m[(0, 0)], m[(0, 1)])
        };
        let (p0, q0) = entry(&fiber.vertex);
        let (pr, qr) = entry(&b);
        let (pi, qi) = entry(&b.j());
        let det = pr * qi - pi * qr;
        assert!(det.abs() > 1e-12);
        let re = (-p0 * qi + q0 * pi) / det;
        let im = (-pr * q0 + p0 * qr) / det;
        let singular_pt = FiberPoint {
            base_point: w.clone(),
            coefficients: vec![cpx(re, im)],
        };
        let verdict = singular_test(&base, &singular_pt, 1e-10, 1e-8).unwrap();
        assert_eq!(verdict.status, SingularStatus::Singular);

        // rank of the assembled differential drops exactly there
        let assembled = AssembledMap::new(&base, &w).unwrap();
        let rank_at = |xi: &FiberPoint<f64>| {
            let mut wc = xi.base_point.clone();
            wc.extend_from_slice(&xi.coefficients);
            let jet = assembled.jet_d1(&wc).unwrap();
            crate::complex_linalg::numerical_complex_rank(&jet.d1, 1e-7, 1e-6).effective_rank
        };
        assert_eq!(rank_at(&regular), 2);
        assert!(rank_at(&singular_pt) < 2);
    }

    #[test]
    fn shape_prediction_matches_oracle() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let assembled = AssembledMap::new(&base, &base.domain.center.clone()).unwrap();
        for (wc, cc) in [
            (cpx(1.0, 0.0), cpx(0.0, 0.0)),
            (cpx(1.1, 0.1), cpx(0.2, -0.1)),
            (cpx(0.9, -0.2), cpx(-0.3, 0.15)),
        ] {
            let xi = FiberPoint {
                base_point: vec![wc],
                coefficients: vec![cc],
            };
            let res = shape_match_residual(&assembled, &xi, 1e-10, 1e-8).unwrap();
            assert!(res <= 1e-5, "residual {res} at {wc:?}, {cc:?}");
        }
    }

    #[test]
    fn shape_prediction_spectrum_is_symmetric() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let xi = FiberPoint {
            base_point: vec![cpx(1.0, 0.0)],
            coefficients: vec![cpx(0.4, 0.3)],
        };
        let pred = shape_from_base(&base, &xi, 1e-10, 1e-8).unwrap();
        // eigenvalues of the 2x2 block come in {lambda, -lambda} pairs, so
        // the trace vanishes
        assert!(pred.matrix.trace().abs() < 1e-9);
    }

    #[test]
    fn p_map_fixes_orthogonal_vectors() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let w = vec![cpx(1.0, 0.0)];
        let fiber = gauss_bundle(&base, &w).unwrap();
        // the L basis vector is Hermitian-orthogonal to f_hat, hence fixed
        let z = fiber.l_basis.basis_vector(0);
        assert!(p_map(&z, &fiber).sub(&z).norm() < 1e-12);
    }

    #[test]
    fn recover_base_from_assembled_map() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let assembled = AssembledMap::new(&base, &base.domain.center.clone()).unwrap();
        for (wc, cc) in [
            (cpx(1.0, 0.0), cpx(0.3, 0.2)),
            (cpx(1.2, 0.1), cpx(-0.2, 0.1)),
        ] {
            let rec = recover_base(&assembled, &[wc, cc], 1e-7, 5e-7).unwrap();
            let expected = base.eval(&[wc]).unwrap();
            assert!(
                rec.g.sub(&expected).norm() <= 1e-9,
                "g mismatch {}",
                rec.g.sub(&expected).norm()
            );
            assert!(rec.res_antiholo <= 1e-7);
            assert!(rec.res_delta <= 1e-8);
            assert!(rec.res_gauss <= 1e-7);
        }
    }

    #[test]
    fn recover_base_constant_along_cylinder_ruling() {
        let cyl = make_example::<f64>("cylinder").unwrap();
        let w = cyl.domain.center.clone();
        let rec = recover_base(&cyl, &w, 1e-10, 1e-8).unwrap();
        assert_eq!(rec.nu, 1);
        assert!(rec.res_delta <= 1e-9);
        assert!(rec.res_antiholo <= 1e-7);
    }

    #[test]
    fn roundtrip_on_assembled_and_cylinder() {
        let base = make_example::<f64>("cubic_curve").unwrap();
        let assembled = AssembledMap::new(&base, &base.domain.center.clone()).unwrap();
        let samples: Vec<Vec<Complex<f64>>> = base
            .domain
            .samples(4, 9)
            .into_iter()
            .zip([0.2, -0.1, 0.15, 0.05])
            .map(|(mut w, c)| {
                w.push(cpx(c, -c));
                w
            })
            .collect();
        let report = verify_roundtrip(&assembled, &samples, 1e-8, 1e-7, 5e-7);
        assert!(report.all_ok, "max distance {}", report.max_distance);

        let cyl = make_example::<f64>("cylinder").unwrap();
        let samples = cyl.domain.samples(5, 2);
        let report = verify_roundtrip(&cyl, &samples, 1e-8, 1e-10, 1e-8);
        assert!(report.all_ok, "max distance {}", report.max_distance);
        for rec in &report.records {
            assert_eq!(rec.cor_nonsingular, Some(true));
            assert_eq!(rec.cor_l_in_n1perp, Some(true));
        }
    }

    #[test]
    fn cylinder_detect_plane_curve_vs_full_curve() {
        let flat = make_example::<f64>("plane_curve_embedded").unwrap();
        let samples = flat.domain.samples(6, 4);
        let report = cylinder_detect(&flat, &samples, 1e-7).unwrap();
        assert!(report.is_cylinder);
        assert!(!report.degenerate);
        let plane = report.plane.unwrap();
        assert_eq!(plane.complex_dim(), 2);
        assert!(plane.residual(&CVector::from_reals(&[1.0, 0.0, 0.0])) < 1e-8);
        assert!(plane.residual(&CVector::from_reals(&[0.0, 1.0, 0.0])) < 1e-8);

        let full = make_example::<f64>("cubic_curve").unwrap();
        let samples = full.domain.samples(6, 4);
        let report = cylinder_detect(&full, &samples, 1e-7).unwrap();
        assert!(!report.is_cylinder);

        let not_curve = make_example::<f64>("cylinder").unwrap();
        assert!(matches!(
            cylinder_detect(&not_curve, &not_curve.domain.samples(3, 0), 1e-7),
            Err(Error::WrongBaseDimension { got: 2 })
        ));
    }
}
