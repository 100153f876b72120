//! Catalog of named fixtures plus seeded random generators. Every fixture
//! carries the invariant values the harness checks on construction.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex_linalg::CVector;
use crate::error::{Error, Result};
use crate::immersion::{
    frame, ChartMap, HolomorphyClass, ParametricImmersion, Poly, PolyDisc, Term,
};
use crate::scalar::{r, Real};

/// Expected invariants of a catalog fixture, verified by tests.
#[derive(Clone, Debug)]
pub struct FixtureExpectations {
    pub class: HolomorphyClass,
    pub nu: usize,
    pub position_tangent: bool,
    pub totally_geodesic: bool,
}

pub const CATALOG: [&str; 8] = [
    "plane",
    "translated_plane",
    "cubic_curve",
    "plane_curve_embedded",
    "cylinder",
    "graph_quadric",
    "cone_over_curve",
    "projective_cubic_lift",
];

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(r(re), r(im))
}

fn mono<T: Real>(m: usize, coeff: f64, var: usize, p: u32) -> Poly<T> {
    Poly::monomial(m, c(coeff, 0.0), var, p)
}

fn poly_sum<T: Real>(polys: Vec<Poly<T>>) -> Poly<T> {
    let nvars = polys[0].nvars;
    let mut terms = Vec::new();
    for p in polys {
        terms.extend(p.terms);
    }
    Poly::new(nvars, terms)
}

pub fn make_example<T: Real>(name: &str) -> Result<ParametricImmersion<T>> {
    match name {
        "plane" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(0.4, 0.1), c(0.3, -0.1)],
                radius: r(0.5),
            },
            vec![mono(2, 1.0, 0, 1), mono(2, 1.0, 1, 1), Poly::zero(2)],
            false,
            CVector::zeros(3),
        )),
        "translated_plane" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(0.4, 0.1), c(0.3, -0.1)],
                radius: r(0.5),
            },
            vec![mono(2, 1.0, 0, 1), mono(2, 1.0, 1, 1), Poly::zero(2)],
            false,
            CVector::from_reals(&[0.0, 0.0, 1.0]),
        )),
        "cubic_curve" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(1.0, 0.0)],
                radius: r(0.5),
            },
            vec![mono(1, 1.0, 0, 1), mono(1, 1.0, 0, 2), mono(1, 1.0, 0, 3)],
            true,
            CVector::zeros(3),
        )),
        "plane_curve_embedded" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(0.3, 0.0)],
                radius: r(0.4),
            },
            vec![
                mono(1, 1.0, 0, 1),
                poly_sum(vec![mono(1, 1.0, 0, 2), Poly::constant(1, c(1.0, 0.0))]),
                Poly::zero(1),
            ],
            true,
            CVector::zeros(3),
        )),
        "cylinder" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(0.3, 0.1), c(0.2, -0.1)],
                radius: r(0.4),
            },
            vec![mono(2, 1.0, 0, 1), mono(2, 1.0, 0, 2), mono(2, 1.0, 1, 1)],
            false,
            CVector::from_reals(&[0.0, 1.0, 0.0]),
        )),
        "graph_quadric" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(0.2, 0.1), c(0.1, -0.1)],
                radius: r(0.4),
            },
            vec![
                mono(2, 1.0, 0, 1),
                mono(2, 1.0, 1, 1),
                poly_sum(vec![mono(2, 1.0, 0, 2), mono(2, 1.0, 1, 2)]),
            ],
            false,
            CVector::from_reals(&[0.0, 0.0, 1.0]),
        )),
        "cone_over_curve" => {
            // cone over the never-tangent curve (x, x^2 + 1, 1); the affine
            // offset in the last coordinate keeps the cone genuinely full
            let base = vec![
                mono::<T>(1, 1.0, 0, 1),
                poly_sum(vec![mono(1, 1.0, 0, 2), Poly::constant(1, c(1.0, 0.0))]),
                Poly::constant(1, c(1.0, 0.0)),
            ];
            Ok(ParametricImmersion::new(
                name,
                PolyDisc {
                    center: vec![c(1.0, 0.0), c(0.3, 0.0)],
                    radius: r(0.35),
                },
                base.into_iter().map(|p| p.cone_lift()).collect(),
                false,
                CVector::zeros(3),
            ))
        }
        "projective_cubic_lift" => Ok(ParametricImmersion::new(
            name,
            PolyDisc {
                center: vec![c(1.0, 0.0)],
                radius: r(0.4),
            },
            vec![
                mono(1, 1.0, 0, 1),
                mono(1, 1.0, 0, 2),
                mono(1, 1.0, 0, 3),
                Poly::constant(1, c(1.0, 0.0)),
            ],
            true,
            CVector::zeros(4),
        )),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

pub fn expectations(name: &str) -> Result<FixtureExpectations> {
    let (class, nu, position_tangent, totally_geodesic) = match name {
        "plane" => (HolomorphyClass::Holomorphic, 2, true, true),
        "translated_plane" => (HolomorphyClass::Holomorphic, 2, false, true),
        "cubic_curve" => (HolomorphyClass::AntiHolomorphic, 0, false, false),
        "plane_curve_embedded" => (HolomorphyClass::AntiHolomorphic, 0, false, false),
        "cylinder" => (HolomorphyClass::Holomorphic, 1, false, false),
        "graph_quadric" => (HolomorphyClass::Holomorphic, 0, false, false),
        "cone_over_curve" => (HolomorphyClass::Holomorphic, 1, true, false),
        "projective_cubic_lift" => (HolomorphyClass::AntiHolomorphic, 0, false, false),
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    Ok(FixtureExpectations {
        class,
        nu,
        position_tangent,
        totally_geodesic,
    })
}

/// Non-catalog helper: the full curve (x, x^2 + 1, 1) in C^3. Its cone is a
/// genuinely full surface, so the cone nullity shift is non-degenerate.
pub fn full_curve_c3<T: Real>() -> ParametricImmersion<T> {
    ParametricImmersion::new(
        "full_curve_c3",
        PolyDisc {
            center: vec![c(1.0, 0.0)],
            radius: r(0.35),
        },
        vec![
            mono(1, 1.0, 0, 1),
            poly_sum(vec![mono(1, 1.0, 0, 2), Poly::constant(1, c(1.0, 0.0))]),
            Poly::constant(1, c(1.0, 0.0)),
        ],
        false,
        CVector::zeros(3),
    )
}

/// Non-catalog helper: the cylinder over that curve inside C^4 (nullity one,
/// cone of codimension one).
pub fn cylinder_c4<T: Real>() -> ParametricImmersion<T> {
    ParametricImmersion::new(
        "cylinder_c4",
        PolyDisc {
            center: vec![c(1.0, 0.0), c(0.2, -0.1)],
            radius: r(0.35),
        },
        vec![
            mono(2, 1.0, 0, 1),
            poly_sum(vec![mono(2, 1.0, 0, 2), Poly::constant(2, c(1.0, 0.0))]),
            mono(2, 1.0, 1, 1),
            Poly::constant(2, c(1.0, 0.0)),
        ],
        false,
        CVector::zeros(4),
    )
}

/// Deterministic random polynomial immersion: coefficients from a seeded
/// generator, resampled (bounded retries) until the map is immersed and
/// never position-tangent on a small test grid.
pub fn random_immersion<T: Real>(
    seed: u64,
    degree: u32,
    m: usize,
    n: usize,
    class: HolomorphyClass,
) -> Result<ParametricImmersion<T>> {
    assert!(m >= 1 && m < n && degree >= 1);
    assert!(class != HolomorphyClass::Neither);
    const RETRIES: usize = 32;

    // all multi-indices with 1 <= total degree <= degree
    let mut exps: Vec<Vec<u32>> = Vec::new();
    let mut stack = vec![vec![0u32; m]];
    while let Some(e) = stack.pop() {
        let total: u32 = e.iter().sum();
        if total > 0 && total <= degree && !exps.contains(&e) {
            exps.push(e.clone());
        }
        if total < degree {
            for k in 0..m {
                let mut e2 = e.clone();
                e2[k] += 1;
                if !stack.contains(&e2) {
                    stack.push(e2);
                }
            }
        }
    }
    exps.sort();
    let scale = 1.0 / exps.len() as f64;

    for attempt in 0..RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((attempt as u64) << 32));
        let mut components = Vec::with_capacity(n);
        for i in 0..n {
            let mut terms: Vec<Term<T>> = exps
                .iter()
                .map(|e| Term {
                    coeff: c(
                        rng.gen_range(-1.0..1.0) * scale,
                        rng.gen_range(-1.0..1.0) * scale,
                    ),
                    powers: e.clone(),
                })
                .collect();
            // a constant offset keeps the image away from the tangent locus
            terms.push(Term {
                coeff: c(
                    rng.gen_range(0.5..1.5) * if i % 2 == 0 { 1.0 } else { -1.0 },
                    rng.gen_range(-0.5..0.5),
                ),
                powers: vec![0; m],
            });
            components.push(Poly::new(m, terms));
        }
        let domain = PolyDisc {
            center: (0..m).map(|k| c(0.3 + 0.05 * k as f64, 0.0)).collect(),
            radius: r(0.3),
        };
        let imm = ParametricImmersion::new(
            format!("random_{seed}_{degree}_{m}_{n}"),
            domain,
            components,
            class == HolomorphyClass::AntiHolomorphic,
            CVector::zeros(n),
        );
        let grid = imm.domain.samples(3usize.pow(2 * m as u32), seed);
        let ok = grid.iter().all(|w| {
            imm.jet(w)
                .ok()
                .and_then(|jet| frame(&jet).ok())
                .map(|fr| !fr.position_tangent)
                .unwrap_or(false)
        });
        if ok {
            return Ok(imm);
        }
    }
    Err(Error::GenerationFailed { retries: RETRIES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::{classify_holomorphy, relative_nullity, second_fundamental};

    #[test]
    fn every_fixture_reproduces_its_expected_map() {
        for name in CATALOG {
            let imm = make_example::<f64>(name).unwrap();
            let exp = expectations(name).unwrap();
            let samples = imm.domain.samples(5, 11);
            let (class, _res) = classify_holomorphy(&imm, &samples).unwrap();
            assert_eq!(class, exp.class, "{name}: class");
            for w in &samples {
                let jet = imm.jet(w).unwrap();
                let fr = frame(&jet).unwrap();
                assert_eq!(fr.position_tangent, exp.position_tangent, "{name} at {w:?}");
                let sff = second_fundamental(&jet, &fr).unwrap();
                let nd = relative_nullity(&sff, 1e-10, 1e-8);
                assert_eq!(nd.nu, exp.nu, "{name}: nu at {w:?}");
                assert!(nd.j_invariant, "{name}: Delta J-invariance");
                if exp.totally_geodesic {
                    assert!(sff.alpha_scale() < 1e-12, "{name}: alpha = 0");
                }
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = random_immersion::<f64>(42, 2, 1, 3, HolomorphyClass::AntiHolomorphic).unwrap();
        let b = random_immersion::<f64>(42, 2, 1, 3, HolomorphyClass::AntiHolomorphic).unwrap();
        let sa = crate::immersion::spec_io::ImmersionSpec::from_immersion(&a);
        let sb = crate::immersion::spec_io::ImmersionSpec::from_immersion(&b);
        assert_eq!(
            serde_json::to_string(&sa).unwrap(),
            serde_json::to_string(&sb).unwrap()
        );
    }

    #[test]
    fn generator_respects_requested_class() {
        for seed in [1u64, 2, 3] {
            for class in [
                HolomorphyClass::Holomorphic,
                HolomorphyClass::AntiHolomorphic,
            ] {
                let imm = random_immersion::<f64>(seed, 2, 1, 3, class).unwrap();
                let samples = imm.domain.samples(4, seed);
                let (found, _) = classify_holomorphy(&imm, &samples).unwrap();
                assert_eq!(found, class);
            }
        }
    }
}
