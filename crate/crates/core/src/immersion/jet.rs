//! First and second order jets of chart maps, with exact jets for
//! polynomial immersions and finite-difference jets for composed maps.
//!
//! A chart with m complex coordinates w_k = x_k + i y_k is indexed by 2m real
//! directions: index a < m is d/dx_a, index m + a is d/dy_a. Wirtinger blocks
//! are derived from the real ones.

use nalgebra::DVector;
use num_complex::Complex;

use crate::complex_linalg::CVector;
use crate::error::Result;
use crate::scalar::{r, Real};

/// Value, first and second real-coordinate derivatives at a chart point.
#[derive(Clone, Debug)]
pub struct Jet<T: Real> {
    pub point: Vec<Complex<T>>,
    pub value: CVector<T>,
    /// 2m ambient vectors: d/dx_0..d/dx_{m-1}, d/dy_0..d/dy_{m-1}.
    pub d1: Vec<CVector<T>>,
    /// Symmetric 2m x 2m table of second derivatives; empty when only the
    /// first-order jet was requested.
    pub d2: Vec<Vec<CVector<T>>>,
}

impl<T: Real> Jet<T> {
    pub fn domain_dim(&self) -> usize {
        self.point.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.value.dim()
    }

    pub fn dx(&self, k: usize) -> &CVector<T> {
        &self.d1[k]
    }

    pub fn dy(&self, k: usize) -> &CVector<T> {
        &self.d1[self.domain_dim() + k]
    }

    /// Wirtinger derivative: (d/dx - i d/dy) / 2.
    pub fn wirtinger_d(&self, k: usize) -> CVector<T> {
        self.dx(k).sub(&self.dy(k).j()).scaled_re(r(0.5))
    }

    /// Conjugate Wirtinger derivative: (d/dx + i d/dy) / 2.
    pub fn wirtinger_dbar(&self, k: usize) -> CVector<T> {
        self.dx(k).add(&self.dy(k).j()).scaled_re(r(0.5))
    }

    pub fn second(&self, a: usize, b: usize) -> &CVector<T> {
        &self.d2[a][b]
    }

    /// Differential applied to a real chart vector.
    pub fn apply_d1(&self, chart: &DVector<T>) -> CVector<T> {
        let mut acc = CVector::zeros(self.ambient_dim());
        for (a, d) in self.d1.iter().enumerate() {
            acc = acc.add(&d.scaled_re(chart[a]));
        }
        acc
    }

    /// Largest first-derivative norm; the natural scale for residuals.
    pub fn d1_scale(&self) -> T {
        self.d1
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

/// The chart complex structure J acting on real chart coordinates:
/// (x, y) -> (-y, x).
pub fn chart_j<T: Real>(chart: &DVector<T>) -> DVector<T> {
    let m = chart.len() / 2;
    DVector::from_fn(chart.len(), |i, _| {
        if i < m {
            -chart[m + i]
        } else {
            chart[i - m]
        }
    })
}

/// Real chart coordinates of a complex chart vector (blocked: re then im).
pub fn chart_c_to_r<T: Real>(v: &[Complex<T>]) -> DVector<T> {
    let m = v.len();
    DVector::from_fn(2 * m, |i, _| if i < m { v[i].re } else { v[i - m].im })
}

pub fn chart_r_to_c<T: Real>(v: &DVector<T>) -> Vec<Complex<T>> {
    let m = v.len() / 2;
    (0..m).map(|k| Complex::new(v[k], v[m + k])).collect()
}

/// Finite-difference configuration. Steps are relative to the map's chart
/// scale; fourth-order stencils keep second derivatives near 1e-10 accuracy.
#[derive(Clone, Copy, Debug)]
pub struct FdConfig {
    pub step1: f64,
    pub step2: f64,
    pub fourth_order: bool,
    pub with_second: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            step1: 1e-4,
            step2: 3e-3,
            fourth_order: true,
            with_second: true,
        }
    }
}

impl FdConfig {
    /// Plain second-order central differences at the given step; the
    /// independent oracle configuration.
    pub fn oracle(step: f64) -> Self {
        Self {
            step1: step,
            step2: step,
            fourth_order: false,
            with_second: true,
        }
    }

    pub fn first_order_only() -> Self {
        Self {
            with_second: false,
            ..Self::default()
        }
    }
}

/// A map from an m-complex-dimensional chart into C^N. Anything that can be
/// evaluated pointwise gets finite-difference jets for free; polynomial
/// immersions override `jet` with exact derivatives.
pub trait ChartMap<T: Real> {
    fn domain_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn eval(&self, w: &[Complex<T>]) -> Result<CVector<T>>;

    /// Length scale of the chart, used to size finite-difference steps.
    fn chart_scale(&self) -> T {
        T::one()
    }

    fn jet(&self, w: &[Complex<T>]) -> Result<Jet<T>> {
        fd_jet(self, w, FdConfig::default())
    }

    fn jet_d1(&self, w: &[Complex<T>]) -> Result<Jet<T>> {
        fd_jet(self, w, FdConfig::first_order_only())
    }
}

fn perturb<T: Real>(w: &[Complex<T>], dir: &DVector<T>, h: T) -> Vec<Complex<T>> {
    let m = w.len();
    (0..m)
        .map(|k| w[k] + Complex::new(dir[k] * h, dir[m + k] * h))
        .collect()
}

fn axis<T: Real>(m: usize, a: usize) -> DVector<T> {
    let mut v = DVector::zeros(2 * m);
    v[a] = T::one();
    v
}

/// Finite-difference jet of an arbitrary chart map.
pub fn fd_jet<T: Real, M: ChartMap<T> + ?Sized>(
    map: &M,
    w: &[Complex<T>],
    cfg: FdConfig,
) -> Result<Jet<T>> {
    let m = map.domain_dim();
    assert_eq!(w.len(), m);
    let scale = map.chart_scale();
    let h1 = r::<T>(cfg.step1) * scale;
    let h2 = r::<T>(cfg.step2) * scale;

    let value = map.eval(w)?;

    let d_along = |dir: &DVector<T>, h: T| -> Result<CVector<T>> {
        if cfg.fourth_order {
            let f_p2 = map.eval(&perturb(w, dir, h + h))?;
            let f_p1 = map.eval(&perturb(w, dir, h))?;
            let f_m1 = map.eval(&perturb(w, dir, -h))?;
            let f_m2 = map.eval(&perturb(w, dir, -(h + h)))?;
            let num = f_p1.sub(&f_m1).scaled_re(r(8.0)).sub(&f_p2).add(&f_m2);
            Ok(num.scaled_re(T::one() / (r::<T>(12.0) * h)))
        } else {
            let f_p1 = map.eval(&perturb(w, dir, h))?;
            let f_m1 = map.eval(&perturb(w, dir, -h))?;
            Ok(f_p1.sub(&f_m1).scaled_re(T::one() / (h + h)))
        }
    };

    let d2_along = |dir: &DVector<T>, h: T| -> Result<CVector<T>> {
        if cfg.fourth_order {
            let f_p2 = map.eval(&perturb(w, dir, h + h))?;
            let f_p1 = map.eval(&perturb(w, dir, h))?;
            let f_m1 = map.eval(&perturb(w, dir, -h))?;
            let f_m2 = map.eval(&perturb(w, dir, -(h + h)))?;
            let num = f_p1
                .add(&f_m1)
                .scaled_re(r(16.0))
                .sub(&f_p2)
                .sub(&f_m2)
                .sub(&value.scaled_re(r(30.0)));
            Ok(num.scaled_re(T::one() / (r::<T>(12.0) * h * h)))
        } else {
            let f_p1 = map.eval(&perturb(w, dir, h))?;
            let f_m1 = map.eval(&perturb(w, dir, -h))?;
            let num = f_p1.add(&f_m1).sub(&value.scaled_re(r(2.0)));
            Ok(num.scaled_re(T::one() / (h * h)))
        }
    };

    let mut d1 = Vec::with_capacity(2 * m);
    for a in 0..2 * m {
        d1.push(d_along(&axis(m, a), h1)?);
    }

    let mut d2 = Vec::new();
    if cfg.with_second {
        let n = value.dim();
        d2 = vec![vec![CVector::zeros(n); 2 * m]; 2 * m];
        for a in 0..2 * m {
            d2[a][a] = d2_along(&axis(m, a), h2)?;
        }
        for a in 0..2 * m {
            for b in (a + 1)..2 * m {
                // polarization: D_aD_b = (D^2_{a+b} - D^2_{a-b}) / 4
                let mut plus = axis::<T>(m, a);
                plus[b] += T::one();
                let mut minus = axis::<T>(m, a);
                minus[b] -= T::one();
                let dp = d2_along(&plus, h2)?;
                let dm = d2_along(&minus, h2)?;
                let mixed = dp.sub(&dm).scaled_re(r(0.25));
                d2[a][b] = mixed.clone();
                d2[b][a] = mixed;
            }
        }
    }

    Ok(Jet {
        point: w.to_vec(),
        value,
        d1,
        d2,
    })
}
