//! JSON serialization of immersion specs.
//!
//! Format (field order fixed for golden-file stability):
//! `{ name, domain: { dim, center: [[re,im],..], radius },
//!    components: [[{ coeff: [re,im], powers: [e1,..,em] },..],..],
//!    conjugate_output, translation: [[re,im],..] }`

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{ParametricImmersion, Poly, PolyDisc, Term};
use crate::complex_linalg::CVector;
use crate::scalar::{r, Real};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: [f64; 2],
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dim: usize,
    pub center: Vec<[f64; 2]>,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImmersionSpec {
    pub name: String,
    pub domain: DomainSpec,
    pub components: Vec<Vec<TermSpec>>,
    pub conjugate_output: bool,
    pub translation: Vec<[f64; 2]>,
}

impl ImmersionSpec {
    pub fn from_immersion<T: Real>(imm: &ParametricImmersion<T>) -> Self
    where
        T: num_traits::ToPrimitive,
    {
        let to_pair = |c: &Complex<T>| -> [f64; 2] {
            [
                c.re.to_f64().unwrap_or(f64::NAN),
                c.im.to_f64().unwrap_or(f64::NAN),
            ]
        };
        Self {
            name: imm.name.clone(),
            domain: DomainSpec {
                dim: imm.domain.dim(),
                center: imm.domain.center.iter().map(to_pair).collect(),
                radius: imm.domain.radius.to_f64().unwrap_or(f64::NAN),
            },
            components: imm
                .components
                .iter()
                .map(|p| {
                    p.terms
                        .iter()
                        .map(|t| TermSpec {
                            coeff: to_pair(&t.coeff),
                            powers: t.powers.clone(),
                        })
                        .collect()
                })
                .collect(),
            conjugate_output: imm.conjugate_output,
            translation: imm.translation.iter().map(to_pair).collect(),
        }
    }

    pub fn to_immersion<T: Real>(&self) -> ParametricImmersion<T> {
        let from_pair = |p: &[f64; 2]| Complex::new(r::<T>(p[0]), r::<T>(p[1]));
        let m = self.domain.dim;
        let domain = PolyDisc {
            center: self.domain.center.iter().map(from_pair).collect(),
            radius: r(self.domain.radius),
        };
        let components = self
            .components
            .iter()
            .map(|terms| {
                Poly::new(
                    m,
                    terms
                        .iter()
                        .map(|t| Term {
                            coeff: from_pair(&t.coeff),
                            powers: t.powers.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        let translation = CVector::new(self.translation.iter().map(from_pair).collect());
        ParametricImmersion::new(
            self.name.clone(),
            domain,
            components,
            self.conjugate_output,
            translation,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersion::ChartMap;
    use num_complex::Complex64;

    #[test]
    fn roundtrip_preserves_evaluation() {
        let imm = crate::gallery::make_example::<f64>("cubic_curve").unwrap();
        let spec = ImmersionSpec::from_immersion(&imm);
        let json = serde_json::to_string_pretty(&spec).unwrap();
        let back: ImmersionSpec = serde_json::from_str(&json).unwrap();
        let imm2 = back.to_immersion::<f64>();
        let w = vec![Complex64::new(1.1, 0.2)];
        let a = imm.eval(&w).unwrap();
        let b = imm2.eval(&w).unwrap();
        assert!(a.sub(&b).norm() < 1e-15);
    }
}
