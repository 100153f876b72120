//! Cones over immersions, projectivization to CP^N, and the CP^{n+1}
//! parametrization. Every second-order computation on projective space is
//! routed through the cone in one dimension higher, never through intrinsic
//! projective-space curvature formulas.

use num_complex::Complex;

use crate::complex_linalg::{
    complex_span, numerical_complex_rank, orthogonal_complement, CSubspace, CVector,
};
use crate::error::{Error, Result};
use crate::immersion::{
    frame, relative_nullity, second_fundamental, ChartMap, FnMap, ParametricImmersion, PolyDisc,
};
use crate::scalar::{r, Real};

/// A point of complex projective space, stored as a unit homogeneous vector
/// with the phase convention applied (first nonzero coordinate real
/// positive). Equality is modulo unit phase, measured by chordal distance.
#[derive(Clone, Debug)]
pub struct ProjectivePoint<T: Real> {
    pub homogeneous: CVector<T>,
}

impl<T: Real> ProjectivePoint<T> {
    /// Ambient projective dimension (one less than the homogeneous length).
    pub fn dimension(&self) -> usize {
        self.homogeneous.dim() - 1
    }
}

/// Projection C^N \ {0} -> CP^{N-1}: normalize and fix the phase so equal
/// projective points get byte-identical representatives.
pub fn projectivize<T: Real>(v: &CVector<T>) -> Result<ProjectivePoint<T>> {
    let n = v.norm();
    if n <= r(1e-14) {
        return Err(Error::ZeroVector {
            norm: n.to_f64().unwrap_or(0.0),
            threshold: 1e-14,
        });
    }
    Ok(ProjectivePoint {
        homogeneous: v.scaled_re(T::one() / n).phase_normalized(),
    })
}

/// Affine representative in the chart where the k-th homogeneous coordinate
/// equals one.
pub fn chart_lift<T: Real>(p: &ProjectivePoint<T>, k: usize) -> Result<CVector<T>> {
    let c = p.homogeneous.component(k);
    if c.norm_sqr().sqrt() <= r(1e-12) {
        return Err(Error::ChartUndefined { index: k });
    }
    Ok(p.homogeneous.scaled(c.inv()))
}

/// Chordal distance sqrt(1 - |<u,v>|^2) between unit homogeneous vectors;
/// zero exactly when the points agree modulo phase.
pub fn chordal_distance<T: Real>(p: &ProjectivePoint<T>, q: &ProjectivePoint<T>) -> T {
    // computed as the norm of q minus its projection onto p, which stays
    // accurate near zero where 1 - |<p,q>|^2 loses all precision
    let overlap = p.homogeneous.herm_dot(&q.homogeneous);
    q.homogeneous.sub(&p.homogeneous.scaled(overlap)).norm()
}

/// The cone (z, x) -> z f(x) over a polynomial immersion, assembled as a
/// polynomial immersion in one extra leading variable.
#[derive(Clone, Debug)]
pub struct ConeImmersion<T: Real> {
    pub base: ParametricImmersion<T>,
    pub map: ParametricImmersion<T>,
}

impl<T: Real> ChartMap<T> for ConeImmersion<T> {
    fn domain_dim(&self) -> usize {
        self.map.domain_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.map.ambient_dim()
    }
    fn chart_scale(&self) -> T {
        self.map.chart_scale()
    }
    fn eval(&self, w: &[Complex<T>]) -> Result<CVector<T>> {
        self.map.eval(w)
    }
    fn jet(&self, w: &[Complex<T>]) -> Result<crate::immersion::Jet<T>> {
        self.map.jet(w)
    }
    fn jet_d1(&self, w: &[Complex<T>]) -> Result<crate::immersion::Jet<T>> {
        self.map.jet_d1(w)
    }
}

/// Builds the cone over `imm`. The cone variable z comes first; its disc is
/// centered at 1 so the chart stays clear of z = 0.
pub fn cone<T: Real>(imm: &ParametricImmersion<T>) -> Result<ConeImmersion<T>> {
    // the cone degenerates where the base meets the origin; probe the domain
    // center and a seeded sample set
    let mut probes = imm.domain.samples(25, 0);
    probes.push(imm.domain.center.clone());
    let mut min_norm = T::max_value().unwrap();
    let mut max_norm = T::zero();
    for w in &probes {
        let n = imm.eval(w)?.norm();
        if n < min_norm {
            min_norm = n;
        }
        if n > max_norm {
            max_norm = n;
        }
    }
    if min_norm <= r::<T>(1e-9) * (T::one() + max_norm) {
        return Err(Error::OriginOnImage);
    }

    let folded = imm.with_translation_folded();
    let components = folded.components.iter().map(|p| p.cone_lift()).collect();
    let mut center = vec![Complex::new(T::one(), T::zero())];
    center.extend_from_slice(&imm.domain.center);
    let radius = if imm.domain.radius < r(0.45) {
        imm.domain.radius
    } else {
        r(0.45)
    };
    let map = ParametricImmersion::new(
        format!("{}_cone", imm.name),
        PolyDisc { center, radius },
        components,
        folded.conjugate_output,
        CVector::zeros(imm.ambient_dim()),
    );
    Ok(ConeImmersion {
        base: imm.clone(),
        map,
    })
}

/// Per-sample outcome of the nullity-shift verification.
#[derive(Clone, Debug)]
pub struct NullityShiftRecord<T: Real> {
    /// Sample in the cone chart: (z, x).
    pub w: Vec<Complex<T>>,
    pub status: std::result::Result<(), String>,
    pub nu_base: Option<usize>,
    pub nu_cone: Option<usize>,
    /// Residual of the cone position direction against the cone nullity
    /// distribution.
    pub position_residual: T,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct NullityShiftReport<T: Real> {
    pub records: Vec<NullityShiftRecord<T>>,
    pub all_ok: bool,
}

/// Checks, on cone-chart samples (z, x), that the cone's nullity index is
/// exactly one more than the base's at x and that the cone position
/// direction lies inside the cone's nullity distribution.
pub fn nullity_shift_check<T: Real>(
    cone: &ConeImmersion<T>,
    samples: &[Vec<Complex<T>>],
    atol: T,
    rtol: T,
) -> NullityShiftReport<T> {
    let mut records = Vec::with_capacity(samples.len());
    let mut all_ok = true;
    for w in samples {
        match nullity_shift_at(cone, w, atol, rtol) {
            Ok(rec) => {
                if !rec.ok {
                    all_ok = false;
                }
                records.push(rec);
            }
            Err(e) => {
                all_ok = false;
                records.push(NullityShiftRecord {
                    w: w.clone(),
                    status: Err(e.to_string()),
                    nu_base: None,
                    nu_cone: None,
                    position_residual: r(f64::NAN),
                    ok: false,
                });
            }
        }
    }
    NullityShiftReport { records, all_ok }
}

fn nullity_shift_at<T: Real>(
    cone: &ConeImmersion<T>,
    w: &[Complex<T>],
    atol: T,
    rtol: T,
) -> Result<NullityShiftRecord<T>> {
    let m = cone.base.domain_dim();
    if w.len() != m + 1 {
        return Err(Error::DimensionMismatch {
            expected: m + 1,
            got: w.len(),
        });
    }
    let cjet = cone.map.jet(w)?;
    let cfr = frame(&cjet)?;
    let csff = second_fundamental(&cjet, &cfr)?;
    let cnd = relative_nullity(&csff, atol, rtol);

    let bjet = cone.base.jet(&w[1..])?;
    let bfr = frame(&bjet)?;
    let bsff = second_fundamental(&bjet, &bfr)?;
    let bnd = relative_nullity(&bsff, atol, rtol);

    // the position vector of the cone equals its differential applied to the
    // chart direction (z, 0, ..., 0)
    let z = w[0];
    let mut pos = vec![Complex::new(T::zero(), T::zero()); m + 1];
    pos[0] = z / Complex::new(z.norm_sqr().sqrt(), T::zero());
    let pos_v = CVector::from_dvector(nalgebra::DVector::from_vec(pos));
    let position_residual = if cnd.delta.complex_dim() == 0 {
        T::one()
    } else {
        cnd.delta.residual(&pos_v)
    };

    let ok = cfr.position_tangent && cnd.nu == bnd.nu + 1 && position_residual <= r(1e-9);
    Ok(NullityShiftRecord {
        w: w.to_vec(),
        status: Ok(()),
        nu_base: Some(bnd.nu),
        nu_cone: Some(cnd.nu),
        position_residual,
        ok,
    })
}

/// The fiber of the projective parametrization at a base point: the normal
/// space of the cone over the lift, whose projectivization is the fiber of
/// projective points swept by the hypersurface.
#[derive(Clone, Debug)]
pub struct CpFiber<T: Real> {
    pub base_point: Vec<Complex<T>>,
    pub l_basis: CSubspace<T>,
}

impl<T: Real> CpFiber<T> {
    /// Complex dimension of the fiber minus one: the projective fiber dim.
    pub fn nu(&self) -> usize {
        self.l_basis.complex_dim() - 1
    }
    pub fn point(&self, coefficients: &[Complex<T>]) -> Result<CVector<T>> {
        if coefficients.len() != self.l_basis.complex_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.l_basis.complex_dim(),
                got: coefficients.len(),
            });
        }
        let mut v = CVector::zeros(self.l_basis.ambient_dim());
        for (k, c) in coefficients.iter().enumerate() {
            v = v.add(&self.l_basis.basis_vector(k).scaled(*c));
        }
        Ok(v)
    }
}

/// Builds the projective fiber at w from a never-zero anti-holomorphic lift:
/// the orthogonal complement of the cone tangent space at (1, w).
pub fn cp_fiber<T: Real>(lift: &ParametricImmersion<T>, w: &[Complex<T>]) -> Result<CpFiber<T>> {
    let cone_im = cone(lift)?;
    let mut cw = vec![Complex::new(T::one(), T::zero())];
    cw.extend_from_slice(w);
    let cjet = cone_im.map.jet(&cw)?;
    let cfr = frame(&cjet)?;
    let csff = second_fundamental(&cjet, &cfr)?;
    let cnd = relative_nullity(&csff, r(1e-10), r(1e-8));
    // the construction needs vanishing nullity of the projectivized base,
    // i.e. cone nullity exactly one
    if cnd.nu != 1 {
        return Err(Error::NonzeroBaseNullity {
            nu: cnd.nu.saturating_sub(1),
        });
    }
    let tangent = complex_span(&cjet.d1, r(1e-9));
    let l_basis = orthogonal_complement(&tangent, r(1e-9));
    Ok(CpFiber {
        base_point: w.to_vec(),
        l_basis,
    })
}

/// Evaluates the projective parametrization: the hypersurface point IS the
/// projectivized fiber vector.
pub fn cp_parametrize<T: Real>(
    lift: &ParametricImmersion<T>,
    w: &[Complex<T>],
    coefficients: &[Complex<T>],
) -> Result<ProjectivePoint<T>> {
    let fiber = cp_fiber(lift, w)?;
    projectivize(&fiber.point(coefficients)?)
}

/// Outcome of validating the projective route against the affine-chart
/// route.
#[derive(Clone, Debug)]
pub struct CpCrossCheck<T: Real> {
    pub cp: ProjectivePoint<T>,
    pub chart: ProjectivePoint<T>,
    pub chordal: T,
}

/// Affine-chart oracle for the projective parametrization. The lift is cut
/// with the hyperplane where its last coordinate is one, the flat-space
/// parametrization runs there with fiber coefficients `coefficients`, and
/// the homogeneous extension of that value must land on the projective
/// fiber.
pub fn cp_cross_check<T: Real>(
    lift: &ParametricImmersion<T>,
    w: &[Complex<T>],
    coefficients: &[Complex<T>],
) -> Result<CpCrossCheck<T>> {
    let n_amb = lift.ambient_dim();
    let k_last = n_amb - 1;
    let affine = FnMap {
        domain_dim: lift.domain_dim(),
        ambient_dim: n_amb - 1,
        scale: lift.chart_scale(),
        f: |p: &[Complex<T>]| {
            let v = lift.eval(p)?;
            let d = v.component(k_last);
            if d.norm_sqr().sqrt() <= r(1e-12) {
                return Err(Error::ChartUndefined { index: k_last });
            }
            // the flat-space base is the chart representative normalized so
            // the last homogeneous coordinate is minus one; only with that
            // sign does the assembled value extend to a normal vector of the
            // cone over the lift
            let neg_inv = -d.inv();
            Ok(CVector::new(
                (0..n_amb - 1).map(|i| v.component(i) * neg_inv).collect(),
            ))
        },
    };
    let flat = crate::gauss_param::gauss_bundle(&affine, w)?;
    let xi1 = flat.point(coefficients);
    // homogeneous extension of the affine value: the cone point (f1, 1)
    let mut coords: Vec<Complex<T>> = (0..n_amb - 1).map(|i| xi1.component(i)).collect();
    coords.push(Complex::new(T::one(), T::zero()));
    let v = CVector::new(coords);

    let fiber = cp_fiber(lift, w)?;
    let xi = fiber.l_basis.project(&v)?;
    let cp = projectivize(&xi)?;
    let chart = projectivize(&v)?;
    let chordal = chordal_distance(&cp, &chart);
    Ok(CpCrossCheck { cp, chart, chordal })
}

/// Detects totally geodesic projectivized immersions: the sampled
/// homogeneous vectors must lie in a proper complex linear subspace.
pub fn totally_geodesic_test<T: Real>(samples: &[CVector<T>], tol: T) -> bool {
    if samples.is_empty() {
        return true;
    }
    let rank = numerical_complex_rank(samples, tol, tol).effective_rank;
    rank < samples[0].dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::make_example;
    use crate::immersion::Poly;
    use crate::CVector64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cpx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn projectivize_normalizes_and_kills_phase() {
        let p = projectivize(&CVector64::from_reals(&[2.0, 0.0, 0.0])).unwrap();
        assert!((p.homogeneous.component(0) - cpx(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p.dimension(), 2);

        let v = CVector64::from_pairs(&[(1.0, 0.0), (2.0, 1.0), (3.0, 0.0)]);
        let lambda = Complex::from_polar(3.0, std::f64::consts::PI / 5.0);
        let q1 = projectivize(&v).unwrap();
        let q2 = projectivize(&v.scaled(lambda)).unwrap();
        assert!(chordal_distance(&q1, &q2) < 1e-13);

        // phase convention makes the representatives byte-identical too
        assert!(q1.homogeneous.sub(&q2.homogeneous).norm() < 1e-13);
    }

    #[test]
    fn chart_lift_inverts_projectivize() {
        let v = CVector64::from_pairs(&[(1.0, 0.0), (2.0, 1.0), (3.0, 0.0)]);
        let p = projectivize(&v).unwrap();
        let lifted = chart_lift(&p, 0).unwrap();
        assert!(lifted.sub(&v).norm() < 1e-13);
        let back = projectivize(&lifted).unwrap();
        assert!(chordal_distance(&back, &p) < 1e-13);

        let degenerate = projectivize(&CVector64::from_reals(&[1.0, 0.0])).unwrap();
        match chart_lift(&degenerate, 1) {
            Err(Error::ChartUndefined { index: 1 }) => {}
            other => panic!("expected ChartUndefined, got {other:?}"),
        }
    }

    #[test]
    fn zero_vector_has_no_projectivization() {
        match projectivize(&CVector64::zeros(3)) {
            Err(Error::ZeroVector { .. }) => {}
            other => panic!("expected ZeroVector, got {other:?}"),
        }
    }

    #[test]
    fn cone_shifts_nullity_by_one() {
        // base nullities 0 (full curve), 1 (cylinder in C^4) and 2 (plane)
        // must lift to cone nullities 1, 2 and 3
        let cases: Vec<(crate::immersion::ParametricImmersion<f64>, usize)> = vec![
            (crate::gallery::full_curve_c3(), 0usize),
            (crate::gallery::cylinder_c4(), 1),
            (make_example::<f64>("translated_plane").unwrap(), 2),
        ];
        for (base, nu_base) in cases {
            let name = base.name.clone();
            let c = cone(&base).unwrap();
            let samples = c.map.domain.samples(20, 5);
            let report = nullity_shift_check(&c, &samples, 1e-10, 1e-8);
            assert!(
                report.all_ok,
                "{name}: {:?}",
                report.records.iter().find(|r| !r.ok)
            );
            for rec in &report.records {
                assert_eq!(rec.nu_base, Some(nu_base), "{name}");
                assert_eq!(rec.nu_cone, Some(nu_base + 1), "{name}");
                assert!(rec.position_residual <= 1e-9, "{name}");
            }
        }
    }

    #[test]
    fn cone_rejects_base_through_origin() {
        let base = crate::immersion::ParametricImmersion::new(
            "through_origin",
            PolyDisc {
                center: vec![cpx(0.0, 0.0)],
                radius: 0.3,
            },
            vec![
                Poly::monomial(1, cpx(1.0, 0.0), 0, 1),
                Poly::monomial(1, cpx(1.0, 0.0), 0, 2),
            ],
            false,
            CVector64::zeros(2),
        );
        match cone(&base) {
            Err(Error::OriginOnImage) => {}
            other => panic!("expected OriginOnImage, got {other:?}"),
        }
    }

    #[test]
    fn projective_route_matches_affine_chart_route() {
        let lift = make_example::<f64>("projective_cubic_lift").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ws = lift.domain.samples(20, 9);
        let mut worst = 0.0f64;
        for w in &ws {
            let c = vec![cpx(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))];
            let check = cp_cross_check(&lift, w, &c).unwrap();
            if check.chordal > worst {
                worst = check.chordal;
            }
        }
        assert!(worst <= 1e-8, "worst chordal {worst:e}");
    }

    #[test]
    fn projective_fiber_has_expected_dimension() {
        let lift = make_example::<f64>("projective_cubic_lift").unwrap();
        let w = lift.domain.center.clone();
        let fiber = cp_fiber(&lift, &w).unwrap();
        // ambient C^4, cone dimension 2: fiber C^2, projective fiber CP^1
        assert_eq!(fiber.l_basis.complex_dim(), 2);
        assert_eq!(fiber.nu(), 1);
        let p = cp_parametrize(&lift, &w, &[cpx(1.0, 0.0), cpx(0.5, -0.5)]).unwrap();
        assert_eq!(p.dimension(), 3);
        // the parametrized point is orthogonal to the lift direction and to
        // the cone tangent, hence genuinely normal to the projectivized base
        let lv = lift.eval(&w).unwrap();
        let h = p.homogeneous.herm_dot(&lv).norm();
        assert!(h < 1e-10, "overlap with the lift {h:e}");
    }

    #[test]
    fn totally_geodesic_lift_is_rejected() {
        let lift = crate::immersion::ParametricImmersion::new(
            "linear_lift",
            PolyDisc {
                center: vec![cpx(0.5, 0.0)],
                radius: 0.3,
            },
            vec![
                Poly::monomial(1, cpx(1.0, 0.0), 0, 1),
                Poly::monomial(1, cpx(2.0, 0.0), 0, 1),
                Poly::constant(1, cpx(1.0, 0.0)),
                Poly::constant(1, cpx(1.0, 0.0)),
            ],
            true,
            CVector64::zeros(4),
        );
        match cp_fiber(&lift, &lift.domain.center.clone()) {
            Err(Error::NonzeroBaseNullity { .. }) => {}
            other => panic!("expected NonzeroBaseNullity, got {other:?}"),
        }
    }

    #[test]
    fn geodesic_detector_thresholds() {
        let lift = make_example::<f64>("projective_cubic_lift").unwrap();
        let cubic_samples: Vec<CVector64> = lift
            .domain
            .samples(10, 4)
            .iter()
            .map(|w| lift.eval(w).unwrap())
            .collect();
        assert!(!totally_geodesic_test(&cubic_samples, 1e-6));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let line: Vec<CVector64> = (0..10)
            .map(|_| {
                let t = cpx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                CVector64::from_pairs(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)])
                    .scaled(cpx(1.0, 0.0))
                    .add(
                        &CVector64::from_pairs(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 0.0)])
                            .scaled(t),
                    )
            })
            .collect();
        assert!(totally_geodesic_test(&line, 1e-6));

        let perturb = |eps: f64, seed: u64| -> Vec<CVector64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            line.iter()
                .map(|v| {
                    let noise: Vec<(f64, f64)> = (0..4)
                        .map(|_| {
                            (
                                eps * rng.gen_range(-1.0..1.0),
                                eps * rng.gen_range(-1.0..1.0),
                            )
                        })
                        .collect();
                    v.add(&CVector64::from_pairs(&noise))
                })
                .collect()
        };
        assert!(totally_geodesic_test(&perturb(1e-12, 7), 1e-6));
        assert!(!totally_geodesic_test(&perturb(1e-3, 7), 1e-6));
    }
}
