//! Complex linear algebra over C^N viewed as the real inner-product space
//! R^{2N} with complex structure J (multiplication by i).
//!
//! The inner product `<u,v>` used throughout is the *real* one, i.e. the real
//! part of the Hermitian product. With that convention `<Ju,Jv> = <u,v>`,
//! `<Ju,v> = -<u,Jv>`, and the inversion/reflection identities hold verbatim.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{r, Real};

/// A vector of C^N.
#[derive(Clone, Debug, PartialEq)]
pub struct CVector<T: Real> {
    data: DVector<Complex<T>>,
}

impl<T: Real> CVector<T> {
    pub fn new(components: Vec<Complex<T>>) -> Self {
        Self {
            data: DVector::from_vec(components),
        }
    }

    pub fn from_dvector(data: DVector<Complex<T>>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DVector::from_element(dim, Complex::new(T::zero(), T::zero())),
        }
    }

    /// Convenience constructor from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|&(re, im)| Complex::new(r(re), r(im)))
                .collect(),
        )
    }

    /// Real vector promoted to C^N.
    pub fn from_reals(xs: &[f64]) -> Self {
        Self::new(xs.iter().map(|&x| Complex::new(r(x), T::zero())).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_dvector(&self) -> &DVector<Complex<T>> {
        &self.data
    }

    pub fn component(&self, i: usize) -> Complex<T> {
        self.data[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex<T>> {
        self.data.iter()
    }

    /// Hermitian product, conjugate-linear in `self`, linear in `other`.
    pub fn herm_dot(&self, other: &Self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            acc = acc + a.conj() * *b;
        }
        acc
    }

    /// Real (Riemannian) inner product: the real part of the Hermitian one.
    pub fn re_dot(&self, other: &Self) -> T {
        self.herm_dot(other).re
    }

    pub fn norm_sq(&self) -> T {
        let mut acc = T::zero();
        for a in self.data.iter() {
            acc += a.norm_sqr();
        }
        acc
    }

    pub fn norm(&self) -> T {
        (self.norm_sq()).sqrt()
    }

    /// The complex structure: J v = i v.
    pub fn j(&self) -> Self {
        self.scaled(Complex::new(T::zero(), T::one()))
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.map(|c| c.conj()),
        }
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            data: self.data.map(|x| x * c),
        }
    }

    pub fn scaled_re(&self, s: T) -> Self {
        self.scaled(Complex::new(s, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            data: &self.data + &other.data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            data: &self.data - &other.data,
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled_re(-T::one())
    }

    /// Blocked real coordinates `[re_0..re_{N-1}, im_0..im_{N-1}]`.
    pub fn real_coords(&self) -> DVector<T> {
        let n = self.dim();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                self.data[i].re
            } else {
                self.data[i - n].im
            }
        })
    }

    pub fn from_real_coords(v: &DVector<T>) -> Self {
        let n = v.len() / 2;
        Self::new((0..n).map(|i| Complex::new(v[i], v[n + i])).collect())
    }

    /// Rotates by a unit phase so the first entry of modulus above
    /// `1e-9 * max modulus` becomes real and positive. Deterministic
    /// representative used by span bases and projective points.
    pub fn phase_normalized(&self) -> Self {
        let max_mod = self
            .data
            .iter()
            .map(|c| c.norm_sqr().sqrt())
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        if max_mod == T::zero() {
            return self.clone();
        }
        let cut = r::<T>(1e-9) * max_mod;
        for c in self.data.iter() {
            let m = (c.norm_sqr()).sqrt();
            if m > cut {
                let phase = Complex::new(c.re / m, -c.im / m);
                return self.scaled(phase);
            }
        }
        self.clone()
    }

    pub fn norm_f64(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::NAN)
    }
}

/// A complex subspace of C^N, stored as Hermitian-orthonormal basis columns.
/// As a real subspace of R^{2N} it is automatically J-invariant.
#[derive(Clone, Debug)]
pub struct CSubspace<T: Real> {
    basis: DMatrix<Complex<T>>,
    ambient_dim: usize,
}

impl<T: Real> CSubspace<T> {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient_dim, 0),
            ambient_dim,
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
            ambient_dim,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn complex_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis_vector(&self, k: usize) -> CVector<T> {
        CVector::from_dvector(self.basis.column(k).into_owned())
    }

    pub fn basis_vectors(&self) -> Vec<CVector<T>> {
        (0..self.complex_dim())
            .map(|k| self.basis_vector(k))
            .collect()
    }

    pub fn basis_matrix(&self) -> &DMatrix<Complex<T>> {
        &self.basis
    }

    /// Hermitian-orthogonal projection onto the subspace. For a J-invariant
    /// subspace this coincides with the real-orthogonal projection.
    pub fn project(&self, v: &CVector<T>) -> Result<CVector<T>> {
        if v.dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.dim(),
            });
        }
        let coeffs = self.basis.adjoint() * v.as_dvector();
        Ok(CVector::from_dvector(&self.basis * coeffs))
    }

    /// Distance from `v` to the subspace.
    pub fn residual(&self, v: &CVector<T>) -> T {
        match self.project(v) {
            Ok(p) => v.sub(&p).norm(),
            Err(_) => r(f64::NAN),
        }
    }

    /// Chordal-style distance between two subspaces of equal dimension:
    /// max over basis vectors of the distance to the other subspace.
    pub fn subspace_distance(&self, other: &CSubspace<T>) -> T {
        let mut worst = T::zero();
        for k in 0..self.complex_dim() {
            let d = other.residual(&self.basis_vector(k));
            if d > worst {
                worst = d;
            }
        }
        for k in 0..other.complex_dim() {
            let d = self.residual(&other.basis_vector(k));
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

impl<T: Real> CSubspace<T> {
    /// Wraps columns that are already Hermitian-orthonormal (e.g. a unitary
    /// re-mix of an existing basis) without re-running Gram-Schmidt.
    pub fn from_orthonormal_columns(basis: DMatrix<Complex<T>>) -> Self {
        let ambient_dim = basis.nrows();
        debug_assert!({
            let gram = basis.adjoint() * &basis;
            let id = DMatrix::<Complex<T>>::identity(gram.nrows(), gram.ncols());
            (gram - id).norm() < r(1e-8)
        });
        Self { basis, ambient_dim }
    }
}

/// Singular-value based rank diagnostics.
#[derive(Clone, Debug)]
pub struct RankReport<T: Real> {
    pub singular_values: Vec<T>,
    pub effective_rank: usize,
    pub gap_ratio: T,
}

/// Default degeneracy threshold for inversion/reflection, scaled by the
/// input magnitude.
pub fn degeneracy_threshold<T: Real>(scale: T) -> T {
    r::<T>(1e-12) * (T::one() + scale)
}

/// The inversion i(z) = z / ||z||^2.
pub fn invert<T: Real>(z: &CVector<T>) -> Result<CVector<T>> {
    let n = z.norm();
    let threshold = degeneracy_threshold(n);
    if n <= threshold {
        return Err(Error::ZeroVector {
            norm: n.to_f64().unwrap_or(0.0),
            threshold: threshold.to_f64().unwrap_or(0.0),
        });
    }
    Ok(z.scaled_re(T::one() / z.norm_sq()))
}

/// The reflection R_z v = v - 2 <v,z> i(z) in the z direction
/// (real inner product).
pub fn reflect<T: Real>(z: &CVector<T>, v: &CVector<T>) -> Result<CVector<T>> {
    let iz = invert(z)?;
    let c = r::<T>(2.0) * v.re_dot(z);
    Ok(v.sub(&iz.scaled_re(c)))
}

/// Hermitian-orthonormal basis of the complex span via modified Gram-Schmidt
/// with largest-remaining-norm pivoting. Columns are phase-normalized so the
/// output is a deterministic function of the input list.
///
/// `tol` is interpreted relative to the largest input norm (and absolutely
/// when all inputs are below 1).
pub fn complex_span<T: Real>(vectors: &[CVector<T>], tol: T) -> CSubspace<T> {
    if vectors.is_empty() {
        return CSubspace::zero(0);
    }
    let ambient = vectors[0].dim();
    let mut residuals: Vec<CVector<T>> = vectors.to_vec();
    let init_max = residuals
        .iter()
        .map(|v| v.norm())
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    let cutoff = tol
        * if init_max > T::one() {
            init_max
        } else {
            T::one()
        };

    let mut basis: Vec<CVector<T>> = Vec::new();
    loop {
        // largest remaining norm, lowest index on ties
        let mut best = T::zero();
        let mut best_idx = None;
        for (i, v) in residuals.iter().enumerate() {
            let n = v.norm();
            if n > best {
                best = n;
                best_idx = Some(i);
            }
        }
        let Some(idx) = best_idx else { break };
        if best <= cutoff {
            break;
        }
        let q = residuals[idx].scaled_re(T::one() / best).phase_normalized();
        for v in residuals.iter_mut() {
            let c = q.herm_dot(v);
            *v = v.sub(&q.scaled(c));
            // second MGS pass against the new direction
            let c2 = q.herm_dot(v);
            *v = v.sub(&q.scaled(c2));
        }
        basis.push(q);
        if basis.len() == ambient {
            break;
        }
    }

    if basis.is_empty() {
        return CSubspace::zero(ambient);
    }
    let cols: Vec<DVector<Complex<T>>> = basis.iter().map(|b| b.as_dvector().clone()).collect();
    CSubspace {
        basis: DMatrix::from_columns(&cols),
        ambient_dim: ambient,
    }
}

/// Orthogonal complement within the full ambient space.
pub fn orthogonal_complement<T: Real>(s: &CSubspace<T>, tol: T) -> CSubspace<T> {
    let n = s.ambient_dim();
    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = CVector::zeros(n);
        let mut data = e.as_dvector().clone();
        data[i] = Complex::new(T::one(), T::zero());
        e = CVector::from_dvector(data);
        let p = s.project(&e).expect("ambient dims agree");
        candidates.push(e.sub(&p));
    }
    let comp = complex_span(&candidates, tol);
    debug_assert_eq!(comp.complex_dim() + s.complex_dim(), n);
    comp
}

/// Numerical complex rank of the matrix with the given columns.
pub fn numerical_complex_rank<T: Real>(vectors: &[CVector<T>], atol: T, rtol: T) -> RankReport<T> {
    assert!(!vectors.is_empty(), "rank of an empty column list");
    let cols: Vec<DVector<Complex<T>>> = vectors.iter().map(|v| v.as_dvector().clone()).collect();
    let m = DMatrix::from_columns(&cols);
    let svd = m.svd(false, false);
    let mut sv: Vec<T> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    rank_from_singular_values(sv, atol, rtol)
}

/// Rank decision shared by the complex and real paths.
pub fn rank_from_singular_values<T: Real>(sv: Vec<T>, atol: T, rtol: T) -> RankReport<T> {
    let sigma_max = sv.first().copied().unwrap_or_else(T::zero);
    let threshold = if atol > rtol * sigma_max {
        atol
    } else {
        rtol * sigma_max
    };
    let effective_rank = sv.iter().filter(|&&s| s > threshold).count();
    let gap_ratio = if effective_rank == sv.len() {
        r::<T>(f64::INFINITY)
    } else if effective_rank == 0 {
        T::zero()
    } else {
        let denom = sv[effective_rank];
        if denom == T::zero() {
            r::<T>(f64::INFINITY)
        } else {
            sv[effective_rank - 1] / denom
        }
    };
    RankReport {
        singular_values: sv,
        effective_rank,
        gap_ratio,
    }
}

/// Null space of a real matrix (rows of V^T past the effective rank).
pub fn real_kernel<T: Real>(m: &DMatrix<T>, atol: T, rtol: T) -> Vec<DVector<T>> {
    let ncols = m.ncols();
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut pairs: Vec<(T, usize)> = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .map(|(i, s)| (s, i))
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite singular values"));
    let sv: Vec<T> = pairs.iter().map(|p| p.0).collect();
    let report = rank_from_singular_values(sv, atol, rtol);
    let mut kernel: Vec<DVector<T>> = pairs[report.effective_rank..]
        .iter()
        .map(|&(_, i)| v_t.row(i).transpose())
        .collect();
    // V^T is square only in the thin sense; complete missing directions when
    // the matrix has fewer rows than columns.
    let found = v_t.nrows();
    if found < ncols {
        // complement of the row space of v_t
        let rows: Vec<CVector<T>> = (0..found)
            .map(|i| {
                CVector::new(
                    v_t.row(i)
                        .iter()
                        .map(|&x| Complex::new(x, T::zero()))
                        .collect(),
                )
            })
            .collect();
        let span = complex_span(&rows, r(1e-12));
        let comp = orthogonal_complement(&span, r(1e-12));
        for k in 0..comp.complex_dim() {
            let b = comp.basis_vector(k);
            let re: DVector<T> = DVector::from_fn(ncols, |i, _| b.component(i).re);
            let im: DVector<T> = DVector::from_fn(ncols, |i, _| b.component(i).im);
            if re.norm() > r(0.5) {
                kernel.push(re.normalize());
            } else {
                kernel.push(im.normalize());
            }
        }
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type CV = CVector<f64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn invert_real_axis_scaling() {
        let z = CV::from_reals(&[0.0, 3.0]);
        let iz = invert(&z).unwrap();
        assert!(iz.sub(&CV::from_reals(&[0.0, 1.0 / 3.0])).norm() < 1e-15);
    }

    #[test]
    fn invert_norm_two() {
        let z = CV::from_pairs(&[(1.0, 1.0), (0.0, 0.0)]);
        let iz = invert(&z).unwrap();
        assert!(iz.sub(&CV::from_pairs(&[(0.5, 0.5), (0.0, 0.0)])).norm() < 1e-15);
    }

    #[test]
    fn invert_cubic_fixture_perp() {
        let z = CV::from_reals(&[4.0 / 7.0, 1.0 / 7.0, -2.0 / 7.0]);
        let iz = invert(&z).unwrap();
        let expected = CV::from_reals(&[4.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0]);
        assert!(iz.sub(&expected).norm() < 1e-14);
    }

    #[test]
    fn invert_rejects_zero() {
        let z = CV::zeros(3);
        assert!(matches!(invert(&z), Err(Error::ZeroVector { .. })));
    }

    #[test]
    fn reflect_own_direction() {
        let z = CV::from_reals(&[1.0, 2.0, 3.0]);
        let rz = reflect(&z, &z).unwrap();
        assert!(rz.add(&z).norm() < 1e-14);
    }

    #[test]
    fn reflect_fixes_orthogonal() {
        let z = CV::from_reals(&[1.0, 0.0]);
        let v = CV::from_reals(&[0.0, 5.0]);
        let rv = reflect(&z, &v).unwrap();
        assert!(rv.sub(&v).norm() < 1e-14);
    }

    #[test]
    fn span_collapses_complex_line() {
        let v1 = CV::from_pairs(&[(1.0, 0.0), (0.0, 0.0)]);
        let v2 = CV::from_pairs(&[(0.0, 1.0), (0.0, 0.0)]);
        let s = complex_span(&[v1, v2], 1e-10);
        assert_eq!(s.complex_dim(), 1);
    }

    #[test]
    fn span_is_j_invariant() {
        let v = CV::from_reals(&[1.0, 2.0, 3.0]);
        let s = complex_span(&[v.clone()], 1e-10);
        assert_eq!(s.complex_dim(), 1);
        assert!(s.residual(&v.j()) < 1e-14);
    }

    #[test]
    fn complement_of_two_vectors_in_c3() {
        let v1 = CV::from_reals(&[1.0, 2.0, 3.0]);
        let v2 = CV::from_reals(&[4.0, 1.0, -2.0]);
        let s = complex_span(&[v1, v2], 1e-10);
        let comp = orthogonal_complement(&s, 1e-10);
        assert_eq!(comp.complex_dim(), 1);
        // Solves the two Hermitian orthogonality conditions: (1,-2,1).
        let dir = CV::from_reals(&[1.0, -2.0, 1.0]);
        assert!(comp.residual(&dir) < 1e-13);
        // mutual orthogonality
        for i in 0..s.complex_dim() {
            for k in 0..comp.complex_dim() {
                let h = s.basis_vector(i).herm_dot(&comp.basis_vector(k));
                assert!(h.norm_sqr().sqrt() <= 1e-13);
            }
        }
    }

    #[test]
    fn complement_trivial_cases() {
        let e1 = CV::from_reals(&[1.0, 0.0]);
        let s = complex_span(&[e1], 1e-10);
        let comp = orthogonal_complement(&s, 1e-10);
        assert_eq!(comp.complex_dim(), 1);
        assert!(comp.residual(&CV::from_reals(&[0.0, 1.0])) < 1e-14);

        let zero = CSubspace::<f64>::zero(3);
        let full = orthogonal_complement(&zero, 1e-10);
        assert_eq!(full.complex_dim(), 3);
    }

    #[test]
    fn projection_examples() {
        let t = CV::from_reals(&[1.0, 2.0, 3.0]);
        let s = complex_span(&[t.clone()], 1e-10);
        let v = CV::from_reals(&[1.0, 1.0, 1.0]);
        let p = s.project(&v).unwrap();
        let expected = CV::from_reals(&[3.0 / 7.0, 6.0 / 7.0, 9.0 / 7.0]);
        assert!(p.sub(&expected).norm() < 1e-14);
        // idempotent
        let pp = s.project(&p).unwrap();
        assert!(pp.sub(&p).norm() < 1e-14);
        // member fixed, orthogonal killed
        assert!(s.project(&t).unwrap().sub(&t).norm() < 1e-14);
        let orth = CV::from_reals(&[1.0, -2.0, 1.0]);
        assert!(s.project(&orth).unwrap().norm() < 1e-14);
    }

    #[test]
    fn project_rejects_dim_mismatch() {
        let s = complex_span(&[CV::from_reals(&[1.0, 0.0])], 1e-10);
        let v = CV::from_reals(&[1.0, 0.0, 0.0]);
        assert!(matches!(
            s.project(&v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank_identity_and_dependent() {
        let e: Vec<CV> = (0..3)
            .map(|i| {
                let mut xs = vec![0.0; 3];
                xs[i] = 1.0;
                CV::from_reals(&xs)
            })
            .collect();
        let rep = numerical_complex_rank(&e, 1e-10, 1e-8);
        assert_eq!(rep.effective_rank, 3);
        assert!(rep.gap_ratio.is_infinite());

        let v1 = CV::from_reals(&[1.0, 2.0, 3.0]);
        let v2 = CV::from_reals(&[2.0, 4.0, 6.0]);
        let rep = numerical_complex_rank(&[v1, v2], 1e-10, 1e-8);
        assert_eq!(rep.effective_rank, 1);
    }

    #[test]
    fn reflection_commutes_with_j_seeded() {
        // J R_z = R_{Jz} J on 100 seeded random pairs
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let z = CV::new(
                (0..4)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            );
            let v = CV::new(
                (0..4)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect(),
            );
            if z.norm() < 1e-3 {
                continue;
            }
            let lhs = reflect(&z, &v).unwrap().j();
            let rhs = reflect(&z.j(), &v.j()).unwrap();
            assert!(lhs.sub(&rhs).norm() <= 1e-13);
        }
    }
}
