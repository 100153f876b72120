//! Multivariate complex polynomials used as the closed-form core of a
//! parametric immersion. Differentiation is exact coefficient manipulation.

use num_complex::Complex;

use crate::scalar::{r, Real};

#[derive(Clone, Debug)]
pub struct Term<T: Real> {
    pub coeff: Complex<T>,
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct Poly<T: Real> {
    pub nvars: usize,
    pub terms: Vec<Term<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(nvars: usize, terms: Vec<Term<T>>) -> Self {
        for t in &terms {
            assert_eq!(t.powers.len(), nvars, "term arity mismatch");
        }
        Self { nvars, terms }
    }

    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(nvars: usize, c: Complex<T>) -> Self {
        Self {
            nvars,
            terms: vec![Term {
                coeff: c,
                powers: vec![0; nvars],
            }],
        }
    }

    /// Monomial c * w_k^p.
    pub fn monomial(nvars: usize, c: Complex<T>, var: usize, p: u32) -> Self {
        let mut powers = vec![0; nvars];
        powers[var] = p;
        Self {
            nvars,
            terms: vec![Term { coeff: c, powers }],
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.powers.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, w: &[Complex<T>]) -> Complex<T> {
        debug_assert_eq!(w.len(), self.nvars);
        let mut acc = Complex::new(T::zero(), T::zero());
        for t in &self.terms {
            let mut m = t.coeff;
            for (x, &p) in w.iter().zip(t.powers.iter()) {
                for _ in 0..p {
                    m = m * *x;
                }
            }
            acc = acc + m;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Poly<T> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let p = t.powers[var];
            if p == 0 {
                continue;
            }
            let mut powers = t.powers.clone();
            powers[var] = p - 1;
            terms.push(Term {
                coeff: t.coeff * Complex::new(r::<T>(p as f64), T::zero()),
                powers,
            });
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    /// The polynomial z * p in one extra leading variable z; used by cones.
    pub fn cone_lift(&self) -> Poly<T> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut powers = Vec::with_capacity(self.nvars + 1);
                powers.push(1);
                powers.extend_from_slice(&t.powers);
                Term {
                    coeff: t.coeff,
                    powers,
                }
            })
            .collect();
        Poly {
            nvars: self.nvars + 1,
            terms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn eval_and_diff() {
        // p(w) = w^2 + 2w + 3
        let p = Poly::<f64>::new(
            1,
            vec![
                Term {
                    coeff: Complex64::new(1.0, 0.0),
                    powers: vec![2],
                },
                Term {
                    coeff: Complex64::new(2.0, 0.0),
                    powers: vec![1],
                },
                Term {
                    coeff: Complex64::new(3.0, 0.0),
                    powers: vec![0],
                },
            ],
        );
        let w = [Complex64::new(1.0, 1.0)];
        let v = p.eval(&w);
        // (1+i)^2 + 2(1+i) + 3 = 2i + 2 + 2i + 3 = 5 + 4i
        assert!((v - Complex64::new(5.0, 4.0)).norm() < 1e-15);
        let dp = p.diff(0);
        let dv = dp.eval(&w);
        // 2w + 2 = 4 + 2i
        assert!((dv - Complex64::new(4.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn cone_lift_multiplies_by_z() {
        let p = Poly::<f64>::monomial(1, Complex64::new(1.0, 0.0), 0, 2);
        let q = p.cone_lift();
        let v = q.eval(&[Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]);
        assert!((v - Complex64::new(18.0, 0.0)).norm() < 1e-15);
    }
}
