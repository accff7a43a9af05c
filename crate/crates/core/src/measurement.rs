//! Local rank-one projective measurements on subsystem A, their Bloch-space
//! representation, and the disturbance `S = ρ - P_A(ρ)` they induce.

use crate::error::{Error, Result};
use crate::linalg::{
    identity, kron, max_abs, orthogonality_residual, trace_of_product,
    unitarity_residual, CMatrix, RMatrix, RVector,
};
use crate::scalar::{real, to_f64, Real};
use crate::states::{bipartite_compose, BipartiteState};
use crate::su_algebra::{GellMannBasis, StructureTensors};

/// Orthonormal rank-one projectors `P_k = U |k⟩⟨k| U†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement<T: Real> {
    d: usize,
    unitary: CMatrix<T>,
    projectors: Vec<CMatrix<T>>,
}

impl<T: Real> ProjectiveMeasurement<T> {
    /// Projectors onto the standard basis.
    pub fn canonical(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLevel(d));
        }
        Ok(Self::build(identity(d)))
    }

    /// Projectors onto the columns of `u`.
    pub fn from_unitary(u: CMatrix<T>) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() < 2 {
            return Err(Error::InvalidLevel(u.nrows()));
        }
        let residual = to_f64(unitarity_residual(&u));
        if residual > T::ORTHO_TOL {
            return Err(Error::NonUnitaryInput { residual });
        }
        Ok(Self::build(u))
    }

    fn build(unitary: CMatrix<T>) -> Self {
        let d = unitary.nrows();
        let projectors = (0..d)
            .map(|k| {
                let col = unitary.column(k);
                col * col.adjoint()
            })
            .collect();
        Self {
            d,
            unitary,
            projectors,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    pub fn projectors(&self) -> &[CMatrix<T>] {
        &self.projectors
    }

    /// `P(σ) = Σ_k P_k σ P_k` on a single qudit.
    pub fn dephase(&self, sigma: &CMatrix<T>) -> CMatrix<T> {
        self.projectors
            .iter()
            .fold(CMatrix::<T>::zeros(self.d, self.d), |acc, p| acc + p * sigma * p)
    }

    /// Same measurement with its outcomes relabelled by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let u = CMatrix::<T>::from_fn(self.d, self.d, |r, c| self.unitary[(r, perm[c])]);
        Self::build(u)
    }
}

pub fn canonical_measurement<T: Real>(d: usize) -> Result<ProjectiveMeasurement<T>> {
    ProjectiveMeasurement::canonical(d)
}

pub fn measurement_from_unitary<T: Real>(u: &CMatrix<T>) -> Result<ProjectiveMeasurement<T>> {
    ProjectiveMeasurement::from_unitary(u.clone())
}

fn check_bipartite<T: Real>(rho: &CMatrix<T>, d: usize) -> Result<()> {
    if rho.nrows() != d * d || rho.ncols() != d * d {
        return Err(Error::LengthMismatch {
            expected: d * d,
            found: rho.nrows(),
        });
    }
    Ok(())
}

/// `P_A(ρ) = Σ_k (P_k ⊗ I) ρ (P_k ⊗ I)`.
pub fn apply_local_measurement<T: Real>(rho: &CMatrix<T>, m: &ProjectiveMeasurement<T>) -> Result<CMatrix<T>> {
    let d = m.d;
    check_bipartite(rho, d)?;
    let id = identity::<T>(d);
    Ok(m.projectors.iter().fold(CMatrix::<T>::zeros(d * d, d * d), |acc, p| {
        let pp = kron(p, &id);
        acc + &pp * rho * &pp
    }))
}

/// Action of the dephasing channel on Bloch coordinates, and its complement.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochProjector<T: Real> {
    pub d: usize,
    /// `P_jk = ½ Σ_m tr(λ_j P_m λ_k P_m)`.
    pub projector: RMatrix<T>,
    /// `M = I - P`.
    pub complement: RMatrix<T>,
}

pub fn bloch_projector<T: Real>(m: &ProjectiveMeasurement<T>, basis: &GellMannBasis<T>) -> BlochProjector<T> {
    let n = basis.dim();
    let half = real::<T>(0.5);
    let images: Vec<CMatrix<T>> = basis.generators().iter().map(|g| m.dephase(g)).collect();
    let projector = RMatrix::from_fn(n, n, |j, k| {
        trace_of_product(basis.generator(j), &images[k]).re * half
    });
    let complement = RMatrix::<T>::identity(n, n) - &projector;
    BlochProjector {
        d: basis.d(),
        projector,
        complement,
    }
}

/// `ρ - P_A(ρ)` computed from the density matrix.
pub fn disturbance_direct<T: Real>(rho: &CMatrix<T>, m: &ProjectiveMeasurement<T>) -> Result<CMatrix<T>> {
    Ok(rho - apply_local_measurement(rho, m)?)
}

/// `(1/d²)[c ⟨Mx, λ⟩ ⊗ I + Σ_k ⟨M K e_k, λ⟩ ⊗ λ_k]`.
pub fn disturbance_bloch<T: Real>(
    state: &BipartiteState<T>,
    projector: &BlochProjector<T>,
    basis: &GellMannBasis<T>,
) -> Result<CMatrix<T>> {
    let d = basis.d();
    let mx: RVector<T> = &projector.complement * &state.x;
    let mk: RMatrix<T> = &projector.complement * &state.k;
    let c = basis.bloch_scale();
    let mut s = kron(&basis.combination(&mx)?.map(|z| z * c), &identity(d));
    for k in 0..basis.dim() {
        let col = mk.column(k).into_owned();
        if col.iter().all(|&v| v == T::zero()) {
            continue;
        }
        s += kron(&basis.combination(&col)?, basis.generator(k));
    }
    let inv = real::<T>(1.0 / (d * d) as f64);
    Ok(s.map(|z| z * inv))
}

/// Disturbance `S(M) = ρ - P_A(ρ)`.
///
/// Both the direct and the Bloch-coordinate forms are evaluated; a
/// disagreement beyond the consistency tolerance is reported as an error.
pub fn disturbance<T: Real>(
    state: &BipartiteState<T>,
    m: &ProjectiveMeasurement<T>,
    basis: &GellMannBasis<T>,
) -> Result<CMatrix<T>> {
    if state.d != m.d || state.d != basis.d() {
        return Err(Error::LengthMismatch {
            expected: state.d,
            found: m.d,
        });
    }
    let direct = disturbance_direct(&state.matrix, m)?;
    let bloch = disturbance_bloch(state, &bloch_projector(m, basis), basis)?;
    let residual = to_f64(max_abs(&(&direct - &bloch)));
    if residual > T::CONSISTENCY_TOL {
        return Err(Error::InconsistentDisturbance { residual });
    }
    Ok(bloch)
}

/// `Q = S S*`; for Hermitian `S` this is `S²`.
pub fn q_matrix<T: Real>(s: &CMatrix<T>) -> CMatrix<T> {
    s * s.adjoint()
}

/// Closed-form `Q(M)` for the locally maximally mixed state with `K = t V₀`:
///
/// ```text
/// Q = (t²/d⁴) [ (4(d-1)/d) I⊗I + (2/d) I⊗Σ_k X_k λ_k + Σ_jk Y_jk λ_j⊗λ_k ]
/// X_k  = tr(M V₀ Δ_k V₀ᵀ)
/// Y_jk = tr(V₀ᵀ M Δ_j M V₀ Δ_k + V₀ᵀ M F_j M V₀ F_k)
/// ```
pub fn q_expansion_family_a<T: Real>(
    t: T,
    v0: &RMatrix<T>,
    m: &ProjectiveMeasurement<T>,
    tensors: &StructureTensors<T>,
    basis: &GellMannBasis<T>,
) -> Result<CMatrix<T>> {
    let d = basis.d();
    let n = basis.dim();
    if v0.nrows() != n || v0.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: v0.nrows(),
        });
    }
    let residual = to_f64(orthogonality_residual(v0));
    if residual > T::ORTHO_TOL {
        return Err(Error::NonOrthogonalInput { residual });
    }
    let zero = RVector::<T>::zeros(n);
    bipartite_compose(&zero, &zero, &v0.map(|v| v * t), basis)?;

    let mc = bloch_projector(m, basis).complement;
    let deltas: Vec<RMatrix<T>> = (0..n).map(|k| tensors.delta_matrix(k)).collect();
    let fs: Vec<RMatrix<T>> = (0..n).map(|k| tensors.f_matrix(k)).collect();
    let v0t = v0.transpose();

    let x: RVector<T> = RVector::from_fn(n, |k, _| (&mc * v0 * &deltas[k] * &v0t).trace());
    let left_d: Vec<RMatrix<T>> = deltas.iter().map(|dj| &v0t * &mc * dj * &mc * v0).collect();
    let left_f: Vec<RMatrix<T>> = fs.iter().map(|fj| &v0t * &mc * fj * &mc * v0).collect();
    // tr(A B) = Σ_ab A_ab B_ba
    let tr_prod = |a: &RMatrix<T>, b: &RMatrix<T>| a.component_mul(&b.transpose()).sum();
    let y = RMatrix::from_fn(n, n, |j, k| {
        tr_prod(&left_d[j], &deltas[k]) + tr_prod(&left_f[j], &fs[k])
    });

    let df = real::<T>(d as f64);
    let id = identity::<T>(d);
    let mut q = identity::<T>(d * d).map(|z| z * (real::<T>(4.0) * (df - T::one()) / df));
    q += kron(&id, &basis.combination(&x)?.map(|z| z * (real::<T>(2.0) / df)));
    for j in 0..n {
        let row = y.row(j).transpose();
        q += kron(basis.generator(j), &basis.combination(&row)?);
    }
    let scale = t * t / (df * df * df * df);
    Ok(q.map(|z| z * scale))
}
