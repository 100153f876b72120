//! The pointwise transform f -> f* = i(f^perp) on nowhere-tangent,
//! nullity-free hypersurfaces. It swaps the holomorphic and anti-holomorphic
//! classes, satisfies (f*)* = f where both sides are defined, and is
//! conformal for curves; all three facts are verified numerically here.

use num_complex::Complex;

use crate::complex_linalg::invert;
use crate::error::{Error, Result};
use crate::immersion::{
    classify_holomorphy, frame, relative_nullity, second_fundamental, ChartMap, HolomorphyClass,
};
use crate::scalar::{r, Real};

/// Composed evaluator w -> i(f^perp(w)). The map is generally not
/// polynomial, so it is evaluated through the frame of the source jet and
/// differentiated by the chart-map finite-difference stencils.
pub struct StarMap<'a, T: Real, M: ChartMap<T> + ?Sized> {
    pub source: &'a M,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Real, M: ChartMap<T> + ?Sized> std::fmt::Debug for StarMap<'_, T, M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StarMap")
            .field("domain_dim", &self.source.domain_dim())
            .field("ambient_dim", &self.source.ambient_dim())
            .finish()
    }
}

impl<'a, T: Real, M: ChartMap<T> + ?Sized> StarMap<'a, T, M> {
    pub fn new(source: &'a M) -> Self {
        StarMap {
            source,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<T: Real, M: ChartMap<T> + ?Sized> ChartMap<T> for StarMap<'_, T, M> {
    fn domain_dim(&self) -> usize {
        self.source.domain_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.source.ambient_dim()
    }
    fn chart_scale(&self) -> T {
        self.source.chart_scale()
    }
    fn eval(&self, w: &[Complex<T>]) -> Result<crate::complex_linalg::CVector<T>> {
        let jet = self.source.jet_d1(w)?;
        let fr = frame(&jet)?;
        if fr.position_tangent {
            return Err(Error::PositionTangent);
        }
        invert(&fr.f_perp)
    }
}

/// Builds f* after checking, on the given samples, that f is never position
/// tangent, has a definite holomorphy class, and is nullity free.
pub fn star<'a, T: Real, M: ChartMap<T> + ?Sized>(
    imm: &'a M,
    samples: &[Vec<Complex<T>>],
) -> Result<StarMap<'a, T, M>> {
    for w in samples {
        let jet = imm.jet(w)?;
        let fr = frame(&jet)?;
        if fr.position_tangent {
            return Err(Error::PositionTangent);
        }
        let sff = second_fundamental(&jet, &fr)?;
        let nd = relative_nullity(&sff, r(1e-7), r(5e-7));
        if nd.nu > 0 {
            return Err(Error::NonzeroNullity { nu: nd.nu });
        }
    }
    let (class, _res) = classify_holomorphy(imm, samples)?;
    if class == HolomorphyClass::Neither {
        return Err(Error::WrongHolomorphyClass {
            expected: "holomorphic or anti-holomorphic".into(),
            found: class.to_string(),
        });
    }
    Ok(StarMap::new(imm))
}

/// Per-sample outcome of the double-transform verification.
#[derive(Clone, Debug)]
pub struct StarRecord<T: Real> {
    pub w: Vec<Complex<T>>,
    /// `‖(f*)*(w) - f(w)‖`, NaN when the sample is degenerate.
    pub deviation: T,
    /// True where f* fails to be an immersion (or is position tangent), so
    /// the double transform is undefined; such samples are excluded from the
    /// aggregate statistics, never silently dropped.
    pub degenerate: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug)]
pub struct StarReport<T: Real> {
    pub records: Vec<StarRecord<T>>,
    pub max_deviation: T,
    pub degenerate_count: usize,
    pub all_ok: bool,
}

/// Checks `(f*)*(w) = f(w)` pointwise on the samples.
pub fn verify_star_involution<T: Real, M: ChartMap<T> + ?Sized>(
    imm: &M,
    samples: &[Vec<Complex<T>>],
    tol: T,
) -> Result<StarReport<T>> {
    // the per-sample evaluation flags every point where f* or (f*)* is
    // undefined or non-immersive, so the strict constructor checks are not
    // repeated here
    let fs = StarMap::new(imm);
    let fss = StarMap::new(&fs);
    let mut records = Vec::with_capacity(samples.len());
    let mut max_deviation = T::zero();
    let mut degenerate_count = 0;
    let mut all_ok = true;
    for w in samples {
        match fss.eval(w) {
            Ok(back) => {
                let dev = back.sub(&imm.eval(w)?).norm();
                if dev > max_deviation {
                    max_deviation = dev;
                }
                if dev > tol {
                    all_ok = false;
                }
                records.push(StarRecord {
                    w: w.clone(),
                    deviation: dev,
                    degenerate: false,
                    detail: None,
                });
            }
            Err(e) => {
                degenerate_count += 1;
                records.push(StarRecord {
                    w: w.clone(),
                    deviation: r(f64::NAN),
                    degenerate: true,
                    detail: Some(e.to_string()),
                });
            }
        }
    }
    Ok(StarReport {
        records,
        max_deviation,
        degenerate_count,
        all_ok,
    })
}

/// Per-sample outcome of the conformality check for curves.
#[derive(Clone, Debug)]
pub struct ConformalityRecord<T: Real> {
    pub w: Vec<Complex<T>>,
    /// Mean of `‖df*(X)‖ / ‖df(X)‖` over the probed unit directions.
    pub ratio: T,
    /// Relative spread (max - min) / mean of the ratio across directions;
    /// zero spread is exactly direction independence, i.e. conformality.
    pub spread: T,
    pub degenerate: bool,
    pub detail: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ConformalityReport<T: Real> {
    pub records: Vec<ConformalityRecord<T>>,
    pub max_spread: T,
    pub degenerate_count: usize,
    pub all_ok: bool,
}

/// Number of unit directions probed per sample.
pub const CONFORMALITY_DIRECTIONS: usize = 8;

/// For a curve base, measures how much the stretch factor of df* relative to
/// df depends on the direction. Direction independence at every sample is
/// the numerical signature of conformality.
pub fn conformality_check<T: Real, M: ChartMap<T> + ?Sized>(
    imm: &M,
    samples: &[Vec<Complex<T>>],
    tol: T,
) -> Result<ConformalityReport<T>> {
    if imm.domain_dim() != 1 {
        return Err(Error::WrongBaseDimension {
            got: imm.domain_dim(),
        });
    }
    let fs = StarMap::new(imm);
    let mut records = Vec::with_capacity(samples.len());
    let mut max_spread = T::zero();
    let mut degenerate_count = 0;
    let mut all_ok = true;
    for w in samples {
        let djet = imm.jet_d1(w)?;
        let sjet = match fs.jet_d1(w) {
            Ok(j) => j,
            Err(e) => {
                degenerate_count += 1;
                records.push(ConformalityRecord {
                    w: w.clone(),
                    ratio: r(f64::NAN),
                    spread: r(f64::NAN),
                    degenerate: true,
                    detail: Some(e.to_string()),
                });
                continue;
            }
        };
        let star_scale = sjet.d1_scale();
        if star_scale <= r(1e-10) {
            // df* vanishes: f* is not an immersion here, so the ratio is
            // undefined and the sample is flagged instead of failing
            degenerate_count += 1;
            records.push(ConformalityRecord {
                w: w.clone(),
                ratio: r(f64::NAN),
                spread: r(f64::NAN),
                degenerate: true,
                detail: Some("df* vanishes at the sample".into()),
            });
            continue;
        }
        let mut min_ratio = T::max_value().unwrap();
        let mut max_ratio = T::zero();
        let mut sum = T::zero();
        for k in 0..CONFORMALITY_DIRECTIONS {
            let theta =
                r::<T>(std::f64::consts::PI) * r(k as f64) / r(CONFORMALITY_DIRECTIONS as f64);
            let x = nalgebra::DVector::from_vec(vec![theta.cos(), theta.sin()]);
            let num = sjet.apply_d1(&x).norm();
            let den = djet.apply_d1(&x).norm();
            let ratio = num / den;
            if ratio < min_ratio {
                min_ratio = ratio;
            }
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            sum += ratio;
        }
        let mean = sum / r(CONFORMALITY_DIRECTIONS as f64);
        let spread = (max_ratio - min_ratio) / mean;
        if spread > max_spread {
            max_spread = spread;
        }
        if spread > tol {
            all_ok = false;
        }
        records.push(ConformalityRecord {
            w: w.clone(),
            ratio: mean,
            spread,
            degenerate: false,
            detail: None,
        });
    }
    Ok(ConformalityReport {
        records,
        max_spread,
        degenerate_count,
        all_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{make_example, random_immersion};
    use crate::immersion::{ParametricImmersion, Poly, PolyDisc};
    use crate::CVector64;

    fn cpx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn parabola() -> ParametricImmersion<f64> {
        // (w, w^2 + 1): holomorphic, never position tangent near 0
        ParametricImmersion::new(
            "parabola",
            PolyDisc {
                center: vec![cpx(0.0, 0.0)],
                radius: 0.3,
            },
            vec![
                Poly::monomial(1, cpx(1.0, 0.0), 0, 1),
                Poly::new(
                    1,
                    vec![
                        crate::immersion::Term {
                            coeff: cpx(1.0, 0.0),
                            powers: vec![2],
                        },
                        crate::immersion::Term {
                            coeff: cpx(1.0, 0.0),
                            powers: vec![0],
                        },
                    ],
                ),
            ],
            false,
            CVector64::zeros(2),
        )
    }

    #[test]
    fn star_swaps_the_holomorphy_class() {
        let f = parabola();
        let samples = f.domain.samples(9, 3);
        let fs = star(&f, &samples).unwrap();
        let (class, res) = classify_holomorphy(&fs, &samples).unwrap();
        assert_eq!(class, HolomorphyClass::AntiHolomorphic, "residual {res:?}");
        assert!(res < 1e-7);

        // class swap needs effective codimension one; this fixture is a plane
        // curve inside a flat 2-plane of C^3
        let g = make_example::<f64>("plane_curve_embedded").unwrap();
        let gsamples = g.domain.samples(9, 3);
        let gs = star(&g, &gsamples).unwrap();
        let (gclass, gres) = classify_holomorphy(&gs, &gsamples).unwrap();
        assert_eq!(gclass, HolomorphyClass::Holomorphic, "residual {gres:?}");
    }

    #[test]
    fn star_rejects_tangent_and_nullity() {
        let plane = make_example::<f64>("plane").unwrap();
        let samples = plane.domain.samples(4, 1);
        match star(&plane, &samples) {
            Err(Error::PositionTangent) => {}
            other => panic!("expected PositionTangent, got {other:?}"),
        }
        let cyl = make_example::<f64>("cylinder").unwrap();
        let csamples = cyl.domain.samples(4, 1);
        match star(&cyl, &csamples) {
            Err(Error::NonzeroNullity { nu: 1 }) => {}
            other => panic!("expected NonzeroNullity, got {other:?}"),
        }
    }

    #[test]
    fn double_star_returns_to_the_source() {
        let f = parabola();
        let samples = f.domain.square_grid(17);
        let report = verify_star_involution(&f, &samples, 1e-8).unwrap();
        assert!(report.all_ok, "max deviation {:e}", report.max_deviation);
        assert_eq!(report.degenerate_count, 0);
        assert!(report.max_deviation <= 1e-8);
    }

    #[test]
    fn double_star_on_random_curve() {
        let f = random_immersion::<f64>(7, 3, 1, 2, HolomorphyClass::AntiHolomorphic).unwrap();
        let samples = f.domain.samples(16, 7);
        let report = verify_star_involution(&f, &samples, 1e-7).unwrap();
        assert!(
            report.records.iter().any(|r| !r.degenerate),
            "all samples degenerate"
        );
        assert!(report.all_ok, "max deviation {:e}", report.max_deviation);
    }

    #[test]
    fn constant_normal_makes_star_degenerate() {
        // (w, 1): f^perp is constant, so f* is a constant map; the double
        // transform must flag every sample as degenerate instead of erroring
        let f = ParametricImmersion::new(
            "line",
            PolyDisc {
                center: vec![cpx(0.2, 0.1)],
                radius: 0.2,
            },
            vec![
                Poly::monomial(1, cpx(1.0, 0.0), 0, 1),
                Poly::constant(1, cpx(1.0, 0.0)),
            ],
            false,
            CVector64::zeros(2),
        );
        let samples = f.domain.samples(5, 2);
        let report = verify_star_involution(&f, &samples, 1e-8).unwrap();
        assert_eq!(report.degenerate_count, samples.len());
    }

    #[test]
    fn curves_stretch_uniformly_in_every_direction() {
        let f = parabola();
        let samples = vec![
            vec![cpx(0.1, 0.05)],
            vec![cpx(-0.1, 0.1)],
            vec![cpx(0.0, 0.0)],
        ];
        let report = conformality_check(&f, &samples, 1e-6).unwrap();
        assert!(report.all_ok, "max spread {:e}", report.max_spread);
        assert_eq!(report.degenerate_count, 0);
        // the ratio itself varies from point to point
        let ratios: Vec<f64> = report.records.iter().map(|r| r.ratio).collect();
        assert!((ratios[0] - ratios[1]).abs() > 1e-6 || (ratios[0] - ratios[2]).abs() > 1e-6);
    }

    #[test]
    fn conformality_requires_a_curve() {
        let f = make_example::<f64>("graph_quadric").unwrap();
        let samples = f.domain.samples(3, 1);
        match conformality_check(&f, &samples, 1e-6) {
            Err(Error::WrongBaseDimension { got: 2 }) => {}
            other => panic!("expected WrongBaseDimension, got {other:?}"),
        }
    }
}
