//! Bloch-vector parametrization of single-qudit and bipartite states.
//!
//! A single qudit is written `ρ = (1/d)(I + √(d(d-1)/2) ⟨n, λ⟩)` and a pair of
//! qudits as
//!
//! ```text
//! ρ = (1/d²) ( I⊗I + c ⟨x,λ⟩⊗I + c I⊗⟨y,λ⟩ + Σ_jk K_jk λ_j⊗λ_k ),   c = √(d(d-1)/2)
//! ```
//!
//! Positivity is never inferred from the Bloch data; it is always checked on
//! the reconstructed matrix.

use crate::error::{Error, Result, StateViolation};
use crate::linalg::{
    block, hermiticity_residual, identity, kron, min_eigenvalue, partial_transpose_second,
    trace_of_product, trace_out_first, trace_out_second, CMatrix, RMatrix, RVector,
};
use crate::scalar::{c_real, real, to_f64, Real};
use crate::su_algebra::{check_len, star, GellMannBasis, StructureTensors};

/// Real Bloch vector of a single qudit.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector<T: Real> {
    pub d: usize,
    pub n: RVector<T>,
}

impl<T: Real> BlochVector<T> {
    pub fn new(d: usize, n: RVector<T>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLevel(d));
        }
        check_len(n.len(), d * d - 1)?;
        Ok(Self { d, n })
    }

    pub fn zero(d: usize) -> Self {
        Self {
            d,
            n: RVector::zeros(d * d - 1),
        }
    }

    pub fn norm(&self) -> T {
        self.n.norm()
    }
}

/// A `d × d` Hermitian, unit-trace matrix.
///
/// Values built by [`DensityMatrix::new`] are also positive semidefinite.
/// [`bloch_to_density`] skips the positivity check because arbitrary Bloch
/// vectors need not describe states; call [`DensityMatrix::validate`] there.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    d: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        validate_density(&matrix)?;
        Ok(Self {
            d: matrix.nrows(),
            matrix,
        })
    }

    pub(crate) fn unchecked(matrix: CMatrix<T>) -> Self {
        Self {
            d: matrix.nrows(),
            matrix,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue(&self.matrix)
    }

    pub fn validate(&self) -> Result<()> {
        validate_density(&self.matrix).map_err(Error::from)
    }

    pub fn purity(&self) -> T {
        trace_of_product(&self.matrix, &self.matrix).re
    }
}

/// Checks squareness, hermiticity, unit trace and positivity, in that order.
pub fn validate_density<T: Real>(m: &CMatrix<T>) -> std::result::Result<(), StateViolation> {
    if m.nrows() != m.ncols() {
        return Err(StateViolation::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let herm = to_f64(hermiticity_residual(m));
    if herm > T::ORTHO_TOL {
        return Err(StateViolation::NotHermitian { residual: herm });
    }
    let tr = m.trace();
    if (to_f64(tr.re) - 1.0).abs() > T::ORTHO_TOL || to_f64(tr.im).abs() > T::ORTHO_TOL {
        return Err(StateViolation::TraceNotOne { trace: to_f64(tr.re) });
    }
    let min_ev = to_f64(min_eigenvalue(m));
    if min_ev < -T::PSD_TOL {
        return Err(StateViolation::NotPositive {
            min_eigenvalue: min_ev,
        });
    }
    Ok(())
}

/// `ρ = (1/d)(I + √(d(d-1)/2) ⟨n, λ⟩)`. Positivity is not checked.
pub fn bloch_to_density<T: Real>(n: &BlochVector<T>, basis: &GellMannBasis<T>) -> Result<DensityMatrix<T>> {
    if n.d != basis.d() {
        return Err(Error::LengthMismatch {
            expected: basis.d(),
            found: n.d,
        });
    }
    let d = basis.d();
    let mut m = basis.combination(&n.n)?.map(|z| z * basis.bloch_scale());
    for i in 0..d {
        m[(i, i)] += c_real(T::one());
    }
    let inv_d = real::<T>(1.0 / d as f64);
    Ok(DensityMatrix::unchecked(m.map(|z| z * inv_d)))
}

/// `n_j = d / √(2d(d-1)) · tr(ρ λ_j)`.
pub fn density_to_bloch<T: Real>(rho: &DensityMatrix<T>, basis: &GellMannBasis<T>) -> Result<BlochVector<T>> {
    rho.validate()?;
    if rho.d() != basis.d() {
        return Err(StateViolation::DimensionMismatch {
            expected: basis.d(),
            found: rho.d(),
        }
        .into());
    }
    Ok(BlochVector {
        d: basis.d(),
        n: bloch_coordinates(rho.matrix(), basis),
    })
}

fn bloch_coordinates<T: Real>(m: &CMatrix<T>, basis: &GellMannBasis<T>) -> RVector<T> {
    let scale = real::<T>(basis.d() as f64) / (real::<T>(2.0) * basis.bloch_scale());
    basis.traces_against(m) * scale
}

/// Pure-state test `⟨n,n⟩ = 1` and, for `d ≥ 3`, `n ⋆ n = n`.
pub fn purity_check<T: Real>(n: &BlochVector<T>, tensors: &StructureTensors<T>, tol: T) -> bool {
    if (n.n.norm_squared() - T::one()).abs() > tol {
        return false;
    }
    if n.d < 3 {
        return true;
    }
    match star(&n.n, &n.n, tensors) {
        Ok(s) => (s - &n.n).norm() <= tol,
        Err(_) => false,
    }
}

/// Out-sphere and in-sphere radii `(R_d, r_d)` of the single-qudit state space.
pub fn radii<T: Real>(d: usize) -> Result<(T, T)> {
    if d < 2 {
        return Err(Error::InvalidLevel(d));
    }
    let df = d as f64;
    let outer = real::<T>((df - 1.0) / (2.0 * df)).sqrt();
    let inner = T::one() / real::<T>(2.0 * df * (df - 1.0)).sqrt();
    Ok((outer, inner))
}

/// Radius `(d/2)√(d²-1)` of the Frobenius ball containing every correlation matrix.
pub fn correlation_ball_radius<T: Real>(d: usize) -> T {
    let df = d as f64;
    real::<T>(df / 2.0 * (df * df - 1.0).sqrt())
}

/// A state on `C^d ⊗ C^d` together with its Bloch data `(x, y, K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState<T: Real> {
    pub d: usize,
    pub x: RVector<T>,
    pub y: RVector<T>,
    pub k: RMatrix<T>,
    pub matrix: CMatrix<T>,
}

impl<T: Real> BipartiteState<T> {
    /// Conjugates by `a ⊗ b` and recomputes the Bloch data.
    pub fn local_unitary(&self, a: &CMatrix<T>, b: &CMatrix<T>, basis: &GellMannBasis<T>) -> Result<Self> {
        let u = kron(a, b);
        let m = &u * &self.matrix * u.adjoint();
        bipartite_decompose(&m, basis)
    }
}

fn assemble<T: Real>(
    x: &RVector<T>,
    y: &RVector<T>,
    k: &RMatrix<T>,
    basis: &GellMannBasis<T>,
) -> Result<CMatrix<T>> {
    let d = basis.d();
    let n = basis.dim();
    check_len(x.len(), n)?;
    check_len(y.len(), n)?;
    check_len(k.nrows(), n)?;
    check_len(k.ncols(), n)?;
    let c = basis.bloch_scale();
    let id = identity::<T>(d);
    let mut m = identity::<T>(d * d);
    m += kron(&basis.combination(x)?.map(|z| z * c), &id);
    m += kron(&id, &basis.combination(y)?.map(|z| z * c));
    for j in 0..n {
        let row = k.row(j).transpose();
        if row.iter().all(|&v| v == T::zero()) {
            continue;
        }
        m += kron(basis.generator(j), &basis.combination(&row)?);
    }
    let inv = real::<T>(1.0 / (d * d) as f64);
    Ok(m.map(|z| z * inv))
}

fn check_ball<T: Real>(k: &RMatrix<T>, d: usize) -> Result<()> {
    let norm = to_f64(k.norm());
    let bound = to_f64(correlation_ball_radius::<T>(d));
    if norm > bound + 1e-8 * bound.max(1.0) {
        return Err(StateViolation::OutsideCorrelationBall { norm, bound }.into());
    }
    Ok(())
}

/// Builds the density matrix for `(x, y, K)` and checks that it is a state.
pub fn bipartite_compose<T: Real>(
    x: &RVector<T>,
    y: &RVector<T>,
    k: &RMatrix<T>,
    basis: &GellMannBasis<T>,
) -> Result<BipartiteState<T>> {
    let matrix = assemble(x, y, k, basis)?;
    let min_ev = to_f64(min_eigenvalue(&matrix));
    if min_ev < -T::PSD_TOL {
        return Err(Error::NotAState {
            min_eigenvalue: min_ev,
        });
    }
    check_ball(k, basis.d())?;
    Ok(BipartiteState {
        d: basis.d(),
        x: x.clone(),
        y: y.clone(),
        k: k.clone(),
        matrix,
    })
}

/// Extracts `(x, y, K)` from a density matrix on `C^d ⊗ C^d`.
pub fn bipartite_decompose<T: Real>(rho: &CMatrix<T>, basis: &GellMannBasis<T>) -> Result<BipartiteState<T>> {
    let d = basis.d();
    validate_density(rho)?;
    if rho.nrows() != d * d {
        return Err(StateViolation::DimensionMismatch {
            expected: d * d,
            found: rho.nrows(),
        }
        .into());
    }
    let x = bloch_coordinates(&trace_out_second(rho, d), basis);
    let y = bloch_coordinates(&trace_out_first(rho, d), basis);

    // M_j = tr_A[ρ (λ_j ⊗ I)] = Σ_{a,a'} (λ_j)_{a'a} ρ_{(a·),(a'·)}, then K_jk ∝ tr(M_j λ_k).
    let n = basis.dim();
    let blocks: Vec<Vec<CMatrix<T>>> = (0..d)
        .map(|a| (0..d).map(|ap| block(rho, d, a, ap)).collect())
        .collect();
    let scale = real::<T>((d * d) as f64 / 4.0);
    let mut k = RMatrix::<T>::zeros(n, n);
    for j in 0..n {
        let g = basis.generator(j);
        let mut mj = CMatrix::<T>::zeros(d, d);
        for a in 0..d {
            for ap in 0..d {
                let w = g[(ap, a)];
                if w.re != T::zero() || w.im != T::zero() {
                    mj += blocks[a][ap].map(|z| z * w);
                }
            }
        }
        for kk in 0..n {
            k[(j, kk)] = trace_of_product(&mj, basis.generator(kk)).re * scale;
        }
    }
    check_ball(&k, d)?;
    Ok(BipartiteState {
        d,
        x,
        y,
        k,
        matrix: rho.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state obtained by tracing out `traced`.
pub fn partial_trace<T: Real>(rho: &CMatrix<T>, d: usize, traced: Subsystem) -> DensityMatrix<T> {
    let m = match traced {
        Subsystem::B => trace_out_second(rho, d),
        Subsystem::A => trace_out_first(rho, d),
    };
    DensityMatrix::unchecked(m)
}

/// Both marginals equal `I/d`, i.e. `‖x‖ ≤ tol` and `‖y‖ ≤ tol`.
pub fn is_locally_maximally_mixed<T: Real>(s: &BipartiteState<T>, tol: T) -> bool {
    s.x.norm() <= tol && s.y.norm() <= tol
}

/// Smallest eigenvalue of the partial transpose on subsystem B.
pub fn ppt_min_eigenvalue<T: Real>(rho: &CMatrix<T>, d: usize) -> T {
    min_eigenvalue(&partial_transpose_second(rho, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use nalgebra::Complex;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn bell() -> CMatrix<f64> {
        let mut m = CMatrix::<f64>::zeros(4, 4);
        for &(r, cc) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, cc)] = c(0.5);
        }
        m
    }

    #[test]
    fn center_and_north_pole() {
        for d in 2..=4 {
            let b = GellMannBasis::<f64>::new(d).unwrap();
            let rho = bloch_to_density(&BlochVector::zero(d), &b).unwrap();
            assert!(max_abs(&(rho.matrix() - identity::<f64>(d).map(|z| z / d as f64))) < 1e-15);
        }
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let n = BlochVector::new(2, RVector::from_vec(vec![0., 0., 1.])).unwrap();
        let rho = bloch_to_density(&n, &b).unwrap();
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.), c(0.)]));
        assert!(max_abs(&(rho.matrix() - want)) < 1e-15);
    }

    #[test]
    fn qubit_bloch_of_diagonal_state() {
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let rho = DensityMatrix::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.75), c(0.25)]))).unwrap();
        let n = density_to_bloch(&rho, &b).unwrap();
        assert!((n.n - RVector::from_vec(vec![0., 0., 0.5])).amax() < 1e-15);
    }

    #[test]
    fn pure_qutrit_has_unit_bloch_vector() {
        let b = GellMannBasis::<f64>::new(3).unwrap();
        let t = crate::su_algebra::structure_constants(&b);
        let mut m = CMatrix::<f64>::zeros(3, 3);
        m[(0, 0)] = c(1.0);
        let n = density_to_bloch(&DensityMatrix::new(m).unwrap(), &b).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-14);
        assert!(purity_check(&n, &t, 1e-10));
        assert!(!purity_check(&BlochVector::zero(3), &t, 1e-10));
    }

    #[test]
    fn qubit_purity_uses_norm_only() {
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let t = crate::su_algebra::structure_constants(&b);
        let n = BlochVector::new(2, RVector::from_vec(vec![0., 0., 1.])).unwrap();
        assert!(purity_check(&n, &t, 1e-12));
    }

    #[test]
    fn radius_values() {
        let (big, small) = radii::<f64>(2).unwrap();
        assert!((big - 0.5).abs() < 1e-15 && (small - 0.5).abs() < 1e-15);
        let (big, small) = radii::<f64>(3).unwrap();
        assert!((big - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((small - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        for d in 2..=9 {
            let (big, small) = radii::<f64>(d).unwrap();
            assert!((big / small - (d - 1) as f64).abs() < 1e-12);
        }
        assert!(radii::<f64>(1).is_err());
    }

    #[test]
    fn bell_state_bloch_data() {
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let s = bipartite_decompose(&bell(), &b).unwrap();
        assert!(s.x.amax() < 1e-15 && s.y.amax() < 1e-15);
        let want = RMatrix::from_diagonal(&RVector::from_vec(vec![1., -1., 1.]));
        assert!((&s.k - &want).amax() < 1e-15);
        let back = bipartite_compose(&s.x, &s.y, &want, &b).unwrap();
        assert!(max_abs(&(back.matrix - bell())) < 1e-15);
        assert!(is_locally_maximally_mixed(&s, 1e-12));
        // Frobenius ball saturated by the maximally entangled state.
        assert!((s.k.norm() - correlation_ball_radius::<f64>(2)).abs() < 1e-8);
    }

    #[test]
    fn maximally_mixed_composition() {
        let b = GellMannBasis::<f64>::new(3).unwrap();
        let z = RVector::<f64>::zeros(8);
        let s = bipartite_compose(&z, &z, &RMatrix::zeros(8, 8), &b).unwrap();
        assert!(max_abs(&(s.matrix - identity::<f64>(9).map(|v| v / 9.0))) < 1e-15);
    }

    #[test]
    fn compose_rejects_non_states() {
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let z = RVector::<f64>::zeros(3);
        let k = RMatrix::from_diagonal(&RVector::from_vec(vec![1., 1., 1.]));
        assert!(matches!(
            bipartite_compose(&z, &z, &k, &b),
            Err(Error::NotAState { .. })
        ));
    }

    #[test]
    fn marginals_of_bell_and_product() {
        for side in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&bell(), 2, side);
            assert!(max_abs(&(r.matrix() - identity::<f64>(2).map(|v| v / 2.0))) < 1e-15);
        }
        let mut ra = CMatrix::<f64>::zeros(2, 2);
        ra[(0, 0)] = c(1.0);
        let prod = kron(&ra, &identity::<f64>(2).map(|v| v / 2.0));
        let b = GellMannBasis::<f64>::new(2).unwrap();
        let s = bipartite_decompose(&prod, &b).unwrap();
        assert!(!is_locally_maximally_mixed(&s, 1e-8));
        assert!(max_abs(&(partial_trace(&prod, 2, Subsystem::B).into_matrix() - ra)) < 1e-15);
    }

    #[test]
    fn bell_partial_transpose() {
        assert!((ppt_min_eigenvalue(&bell(), 2) + 0.5).abs() < 1e-14);
    }

    #[test]
    fn validation_names_the_violated_invariant() {
        let m = CMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.2), c(-0.2)]));
        assert!(matches!(validate_density(&m), Err(StateViolation::NotPositive { .. })));
        let m = CMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.6), c(0.6)]));
        assert!(matches!(validate_density(&m), Err(StateViolation::TraceNotOne { .. })));
        let mut m = CMatrix::<f64>::identity(2, 2).map(|z| z * 0.5);
        m[(0, 1)] = c(0.1);
        assert!(matches!(validate_density(&m), Err(StateViolation::NotHermitian { .. })));
    }
}
