//! Named verification suites and the analysis/parametrization drivers
//! behind the command-line interface. Everything here is deterministic for
//! a fixed seed, so reports are byte-identical across runs.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex_linalg::{invert, reflect, CVector};
use crate::error::{Error, Result};
use crate::gallery::{self, make_example};
use crate::gauss_param::{
    cylinder_detect, gauss_bundle, singular_test, verify_roundtrip, AssembledMap, SingularStatus,
};
use crate::immersion::{
    classify_holomorphy, fd_jet, frame, relative_nullity, second_fundamental,
    verify_structural_identities, ChartMap, FdConfig, HolomorphyClass, ParametricImmersion, Poly,
    PolyDisc, Term,
};
use crate::involution::{conformality_check, verify_star_involution};
use crate::projective::{
    chart_lift, chordal_distance, cone, cp_cross_check, nullity_shift_check, projectivize,
    totally_geodesic_test,
};
use crate::report::{finite, pair, Report, Residuals, SampleFlags, SampleRecord};

pub const SUITES: [&str; 7] = [
    "identities",
    "roundtrip",
    "star",
    "cone",
    "projective",
    "cylinder",
    "all",
];

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn check(checks: &mut Vec<Check>, name: &str, passed: bool, detail: String) {
    checks.push(Check {
        name: name.to_string(),
        passed,
        detail,
    });
}

pub fn run_suite(suite: &str, seed: u64) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    match suite {
        "identities" => suite_identities(seed, &mut checks),
        "roundtrip" => suite_roundtrip(seed, &mut checks),
        "star" => suite_star(seed, &mut checks),
        "cone" => suite_cone(seed, &mut checks),
        "projective" => suite_projective(seed, &mut checks),
        "cylinder" => suite_cylinder(seed, &mut checks),
        "all" => {
            suite_identities(seed, &mut checks);
            suite_roundtrip(seed, &mut checks);
            suite_star(seed, &mut checks);
            suite_cone(seed, &mut checks);
            suite_projective(seed, &mut checks);
            suite_cylinder(seed, &mut checks);
        }
        other => return Err(Error::UnknownFixture(format!("suite {other}"))),
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        suite: suite.to_string(),
        seed,
        checks,
        passed,
    })
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> CVector<f64> {
    loop {
        let v = CVector::new(
            (0..dim)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        if v.norm() > 1e-2 {
            return v;
        }
    }
}

fn suite_identities(seed: u64, checks: &mut Vec<Check>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let dim = 2 + (i % 3);
        let z = random_unit(&mut rng, dim);
        let v = random_unit(&mut rng, dim);
        let res_inv = invert(&invert(&z).unwrap()).unwrap().sub(&z).norm();
        let rv = reflect(&z, &v).unwrap();
        let res_iso = (rv.norm() - v.norm()).abs();
        let res_invol = reflect(&z, &rv).unwrap().sub(&v).norm();
        // J R_z = R_{Jz} J
        let res_j = reflect(&z, &v)
            .unwrap()
            .j()
            .sub(&reflect(&z.j(), &v.j()).unwrap())
            .norm();
        worst = worst.max(res_inv).max(res_iso).max(res_invol).max(res_j);
    }
    check(
        checks,
        "identities.algebra",
        worst <= 1e-13,
        format!("1000 instances, max residual {worst:e}"),
    );

    for name in ["translated_plane", "cylinder", "graph_quadric"] {
        let imm = make_example::<f64>(name).unwrap();
        let samples = imm.domain.samples(5, seed);
        let mut worst = 0.0f64;
        let mut failed = None;
        for w in &samples {
            match verify_structural_identities(&imm, w) {
                Ok(rep) => worst = worst.max(rep.max_residual()),
                Err(e) => failed = Some(e.to_string()),
            }
        }
        check(
            checks,
            &format!("identities.structural.{name}"),
            failed.is_none() && worst <= 1e-7,
            failed.unwrap_or_else(|| format!("max residual {worst:e}")),
        );
    }
}

fn suite_roundtrip(seed: u64, checks: &mut Vec<Check>) {
    // assembled parametrization from the cubic base
    let base = make_example::<f64>("cubic_curve").unwrap();
    let assembled = AssembledMap::new(&base, &base.domain.center.clone()).unwrap();
    let fiber_offsets = [0.2, -0.1, 0.15, 0.05];
    let samples: Vec<Vec<Complex<f64>>> = base
        .domain
        .samples(4, seed.wrapping_add(9))
        .into_iter()
        .zip(fiber_offsets)
        .map(|(mut w, c)| {
            w.push(Complex::new(c, -c));
            w
        })
        .collect();
    let rep = verify_roundtrip(&assembled, &samples, 1e-8, 1e-7, 5e-7);
    check(
        checks,
        "roundtrip.assembled_cubic",
        rep.all_ok,
        format!("max distance {:e}", rep.max_distance),
    );

    // direct polynomial hypersurface with nullity one
    let cyl = make_example::<f64>("cylinder").unwrap();
    let samples = cyl.domain.samples(5, seed.wrapping_add(2));
    let rep = verify_roundtrip(&cyl, &samples, 1e-8, 1e-10, 1e-8);
    let flags_ok = rep
        .records
        .iter()
        .all(|r| r.cor_nonsingular == Some(true) && r.cor_l_in_n1perp == Some(true));
    check(
        checks,
        "roundtrip.cylinder",
        rep.all_ok && flags_ok,
        format!(
            "max distance {:e}, completeness flags {flags_ok}",
            rep.max_distance
        ),
    );
}

/// The plane curve (w, w^2 + 1) in C^2, the canonical codimension-one star
/// example.
pub fn parabola_c2() -> ParametricImmersion<f64> {
    ParametricImmersion::new(
        "parabola_c2",
        PolyDisc {
            center: vec![Complex::new(0.0, 0.0)],
            radius: 0.3,
        },
        vec![
            Poly::monomial(1, Complex::new(1.0, 0.0), 0, 1),
            Poly::new(
                1,
                vec![
                    Term {
                        coeff: Complex::new(1.0, 0.0),
                        powers: vec![2],
                    },
                    Term {
                        coeff: Complex::new(1.0, 0.0),
                        powers: vec![0],
                    },
                ],
            ),
        ],
        false,
        CVector::zeros(2),
    )
}

fn suite_star(seed: u64, checks: &mut Vec<Check>) {
    let fixtures: Vec<(String, ParametricImmersion<f64>, f64)> = vec![
        ("parabola_c2".into(), parabola_c2(), 1e-8),
        (
            "plane_curve_embedded".into(),
            make_example::<f64>("plane_curve_embedded").unwrap(),
            1e-8,
        ),
    ];
    for (name, imm, tol) in &fixtures {
        let samples = imm.domain.samples(16, seed.wrapping_add(3));
        let rep = verify_star_involution(imm, &samples, *tol).unwrap();
        check(
            checks,
            &format!("star.involution.{name}"),
            rep.all_ok && rep.degenerate_count == 0,
            format!(
                "max deviation {:e}, degenerate {}",
                rep.max_deviation, rep.degenerate_count
            ),
        );
        let conf = conformality_check(imm, &samples, 1e-6).unwrap();
        check(
            checks,
            &format!("star.conformality.{name}"),
            conf.all_ok && conf.degenerate_count == 0,
            format!("max spread {:e}", conf.max_spread),
        );
    }
    for k in 1..=5u64 {
        let imm = gallery::random_immersion::<f64>(
            seed.wrapping_add(k),
            3,
            1,
            2,
            HolomorphyClass::AntiHolomorphic,
        )
        .unwrap();
        let samples = imm.domain.samples(12, seed.wrapping_add(k));
        let rep = verify_star_involution(&imm, &samples, 1e-7).unwrap();
        let conf = conformality_check(&imm, &samples, 1e-6).unwrap();
        let enough = rep.degenerate_count * 2 <= samples.len();
        check(
            checks,
            &format!("star.random_curve.{k}"),
            rep.all_ok && conf.all_ok && enough,
            format!(
                "max deviation {:e}, max spread {:e}, degenerate {}",
                rep.max_deviation, conf.max_spread, rep.degenerate_count
            ),
        );
    }
}

fn suite_cone(seed: u64, checks: &mut Vec<Check>) {
    let cases: Vec<(ParametricImmersion<f64>, usize)> = vec![
        (gallery::full_curve_c3(), 0),
        (gallery::cylinder_c4(), 1),
        (make_example::<f64>("translated_plane").unwrap(), 2),
    ];
    for (base, nu_base) in cases {
        let name = base.name.clone();
        let c = cone(&base).unwrap();
        let samples = c.map.domain.samples(10, seed.wrapping_add(5));
        let rep = nullity_shift_check(&c, &samples, 1e-10, 1e-8);
        let shift_ok = rep
            .records
            .iter()
            .all(|r| r.nu_base == Some(nu_base) && r.nu_cone == Some(nu_base + 1));
        check(
            checks,
            &format!("cone.nullity_shift.{name}"),
            rep.all_ok && shift_ok,
            format!("expected {nu_base} -> {}", nu_base + 1),
        );
    }
}

fn suite_projective(seed: u64, checks: &mut Vec<Check>) {
    let lift = make_example::<f64>("projective_cubic_lift").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9));
    let ws = lift.domain.samples(20, seed.wrapping_add(9));
    let mut worst = 0.0f64;
    let mut failed = None;
    for w in &ws {
        let c = vec![Complex::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        )];
        match cp_cross_check(&lift, w, &c) {
            Ok(cc) => worst = worst.max(cc.chordal),
            Err(e) => failed = Some(e.to_string()),
        }
    }
    check(
        checks,
        "projective.cp_vs_chart",
        failed.is_none() && worst <= 1e-8,
        failed.unwrap_or_else(|| format!("20 samples, worst chordal {worst:e}")),
    );

    let mut worst = 0.0f64;
    for i in 0..50 {
        let dim = 3 + (i % 3);
        let v = random_unit(&mut rng, dim);
        let p = projectivize(&v).unwrap();
        // lift in the chart of the largest coordinate to stay well defined
        let k = (0..dim)
            .max_by(|&a, &b| {
                p.homogeneous
                    .component(a)
                    .norm()
                    .partial_cmp(&p.homogeneous.component(b).norm())
                    .unwrap()
            })
            .unwrap();
        let back = projectivize(&chart_lift(&p, k).unwrap()).unwrap();
        worst = worst.max(chordal_distance(&back, &p));
    }
    check(
        checks,
        "projective.chart_roundtrip",
        worst <= 1e-13,
        format!("50 samples, worst chordal {worst:e}"),
    );

    let cubic_samples: Vec<CVector<f64>> = lift
        .domain
        .samples(10, seed.wrapping_add(4))
        .iter()
        .map(|w| lift.eval(w).unwrap())
        .collect();
    let full_detected = !totally_geodesic_test(&cubic_samples, 1e-6);
    let line: Vec<CVector<f64>> = (0..10)
        .map(|i| {
            let t = Complex::new(0.3 * i as f64 - 1.0, 0.1 * i as f64);
            CVector::from_reals(&[1.0, 0.0, 0.0, 0.0])
                .add(&CVector::from_reals(&[0.0, 1.0, 2.0, 0.0]).scaled(t))
        })
        .collect();
    let line_detected = totally_geodesic_test(&line, 1e-6);
    check(
        checks,
        "projective.geodesic_detector",
        full_detected && line_detected,
        format!("full curve flagged {full_detected}, linear lift flagged {line_detected}"),
    );
}

fn suite_cylinder(seed: u64, checks: &mut Vec<Check>) {
    let flat = make_example::<f64>("plane_curve_embedded").unwrap();
    let samples = flat.domain.samples(6, seed.wrapping_add(4));
    let rep = cylinder_detect(&flat, &samples, 1e-7).unwrap();
    let plane_ok = rep
        .plane
        .as_ref()
        .map(|p| {
            p.complex_dim() == 2
                && p.residual(&CVector::from_reals(&[1.0, 0.0, 0.0])) < 1e-8
                && p.residual(&CVector::from_reals(&[0.0, 1.0, 0.0])) < 1e-8
        })
        .unwrap_or(false);
    check(
        checks,
        "cylinder.plane_curve",
        rep.is_cylinder && !rep.degenerate && plane_ok,
        format!("span dim {}", rep.span_dim),
    );

    let full = make_example::<f64>("cubic_curve").unwrap();
    let samples = full.domain.samples(6, seed.wrapping_add(4));
    let rep = cylinder_detect(&full, &samples, 1e-7).unwrap();
    check(
        checks,
        "cylinder.full_curve",
        !rep.is_cylinder,
        format!("span dim {}", rep.span_dim),
    );
}

/// Oracle selection for `analyze`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    Exact,
    FiniteDifference,
    Both,
}

/// Pointwise analysis of an immersion: class, tangency, nullity and identity
/// residuals per sample. The boolean result is the exit condition: no
/// structural identity residual exceeded `identity_tol`.
pub fn run_analyze(
    imm: &ParametricImmersion<f64>,
    grid: usize,
    seed: u64,
    atol: f64,
    rtol: f64,
    identity_tol: f64,
    oracle: OracleMode,
) -> (Report, bool) {
    let samples = imm.domain.samples(grid * grid, seed);
    let (class, class_res) =
        classify_holomorphy(imm, &samples).unwrap_or((HolomorphyClass::Neither, f64::NAN));
    let mut records = Vec::with_capacity(samples.len());
    let mut ok = true;
    for w in &samples {
        let mut rec = SampleRecord {
            w: w.iter().map(|z| [z.re, z.im]).collect(),
            c: Vec::new(),
            status: "ok".into(),
            nu: None,
            residuals: Residuals {
                holo: finite(class_res),
                ..Residuals::default()
            },
            flags: SampleFlags::default(),
            value: None,
        };
        match analyze_point(imm, w, atol, rtol, class, oracle) {
            Ok((status, nu, normal, sff_match, value)) => {
                rec.status = status;
                rec.nu = Some(nu);
                rec.residuals.normal = normal.and_then(finite);
                rec.residuals.sff_match = sff_match.and_then(finite);
                rec.value = Some(value);
                if let Some(res) = rec.residuals.normal {
                    if res > identity_tol {
                        ok = false;
                    }
                }
            }
            Err(e) => {
                rec.status = format!("error: {e}");
                ok = false;
            }
        }
        records.push(rec);
    }
    (Report::new(imm.name.clone(), seed, records), ok)
}

#[allow(clippy::type_complexity)]
fn analyze_point(
    imm: &ParametricImmersion<f64>,
    w: &[Complex<f64>],
    atol: f64,
    rtol: f64,
    class: HolomorphyClass,
    oracle: OracleMode,
) -> Result<(String, usize, Option<f64>, Option<f64>, Vec<[f64; 2]>)> {
    let jet = imm.jet(w)?;
    let fr = frame(&jet)?;
    let sff = second_fundamental(&jet, &fr)?;
    let nd = relative_nullity(&sff, atol, rtol);
    let geodesic = sff.alpha_scale() <= 1e-9 * (1.0 + jet.d1_scale() * jet.d1_scale());
    let status = if geodesic {
        "totally_geodesic".to_string()
    } else {
        "ok".to_string()
    };
    // structural identities need the inverted normal component, which only
    // exists for non-tangent holomorphic samples
    let normal = if class == HolomorphyClass::Holomorphic && !fr.position_tangent {
        Some(verify_structural_identities(imm, w)?.max_residual())
    } else {
        None
    };
    let sff_match = if oracle != OracleMode::Exact {
        let fd = fd_jet(imm, w, FdConfig::default())?;
        let scale = jet.d1_scale().max(1.0);
        let mut worst = 0.0f64;
        for (a, b) in jet.d1.iter().zip(fd.d1.iter()) {
            worst = worst.max(a.sub(b).norm() / scale);
        }
        Some(worst)
    } else {
        None
    };
    let value: Vec<[f64; 2]> = jet.value.iter().map(|z| pair(z)).collect();
    Ok((status, nd.nu, normal, sff_match, value))
}

/// Evaluates the parametrization over a base grid crossed with a fixed small
/// set of fiber coefficients (always containing zero, so the vertex slice is
/// in every output). The boolean is false when no sample was regular.
pub fn run_parametrize(
    base: &ParametricImmersion<f64>,
    grid: usize,
    seed: u64,
    atol: f64,
    rtol: f64,
) -> Result<(Report, bool)> {
    let ws = if base.domain_dim() == 1 {
        base.domain.square_grid(grid)
    } else {
        base.domain.samples(grid * grid, seed)
    };
    let fiber_slices = [
        Complex::new(0.0, 0.0),
        Complex::new(0.3, 0.0),
        Complex::new(-0.2, 0.2),
    ];
    let mut records = Vec::new();
    let mut any_regular = false;
    let mut first_error: Option<Error> = None;
    for w in &ws {
        let fiber = match gauss_bundle(base, w) {
            Ok(f) => f,
            Err(e) => {
                records.push(SampleRecord {
                    w: w.iter().map(|z| [z.re, z.im]).collect(),
                    c: Vec::new(),
                    status: format!("error: {e}"),
                    nu: None,
                    residuals: Residuals::default(),
                    flags: SampleFlags::default(),
                    value: None,
                });
                if first_error.is_none() {
                    first_error = Some(e);
                }
                continue;
            }
        };
        let nu = fiber.nu();
        for slice in &fiber_slices {
            let coeffs = vec![*slice; nu];
            let value = fiber.point(&coeffs);
            let status = match singular_test(
                base,
                &crate::gauss_param::FiberPoint {
                    base_point: w.clone(),
                    coefficients: coeffs.clone(),
                },
                atol,
                rtol,
            ) {
                Ok(v) => match v.status {
                    SingularStatus::Regular => {
                        any_regular = true;
                        "regular".to_string()
                    }
                    SingularStatus::Singular => "singular".to_string(),
                    SingularStatus::Indeterminate => "indeterminate".to_string(),
                },
                Err(e) => format!("error: {e}"),
            };
            records.push(SampleRecord {
                w: w.iter().map(|z| [z.re, z.im]).collect(),
                c: coeffs.iter().map(|z| [z.re, z.im]).collect(),
                status,
                nu: Some(nu),
                residuals: Residuals::default(),
                flags: SampleFlags::default(),
                value: Some(value.iter().map(|z| pair(z)).collect()),
            });
        }
    }
    if !any_regular {
        if let Some(e) = first_error {
            return Err(e);
        }
    }
    Ok((
        Report::new(format!("{}_parametrized", base.name), seed, records),
        any_regular,
    ))
}
