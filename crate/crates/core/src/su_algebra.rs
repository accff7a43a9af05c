//! Generalized Gell-Mann generators of su(d), their structure constants, the
//! induced star and wedge products on `R^{d²-1}`, and the adjoint
//! representation of SU(d).
//!
//! Generators are enumerated in the conventional order: for every
//! `k = 2..=d` the symmetric/antisymmetric off-diagonal pairs that couple
//! level `k-1` to the levels below it come first, followed by the diagonal
//! generator at (one-based) index `k² - 1`. For `d = 2` this is
//! `σ₁, σ₂, σ₃`; for `d = 3` it is the usual `λ₁ … λ₈`.
//!
//! All indices in the Rust API are zero-based.

use std::collections::BTreeMap;


use crate::error::{Error, Result};
use crate::linalg::{trace_of_product, unitarity_residual, CMatrix, RMatrix, RVector};
use crate::scalar::{abs, c_real, cplx, real, to_f64, Real};

/// The `d² - 1` trace-orthogonal Hermitian generators of su(d).
#[derive(Debug, Clone, PartialEq)]
pub struct GellMannBasis<T: Real> {
    d: usize,
    generators: Vec<CMatrix<T>>,
}

impl<T: Real> GellMannBasis<T> {
    /// Builds the basis for `d` levels. Deterministic in `d`.
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidLevel(d));
        }
        let mut generators = Vec::with_capacity(d * d - 1);
        for k in 2..=d {
            let c = k - 1;
            for r in 0..c {
                let mut sym = CMatrix::<T>::zeros(d, d);
                sym[(r, c)] = c_real(T::one());
                sym[(c, r)] = c_real(T::one());
                generators.push(sym);

                let mut anti = CMatrix::<T>::zeros(d, d);
                anti[(r, c)] = cplx(T::zero(), -T::one());
                anti[(c, r)] = cplx(T::zero(), T::one());
                generators.push(anti);
            }
            let norm = real::<T>(2.0 / (c * (c + 1)) as f64).sqrt();
            let mut diag = CMatrix::<T>::zeros(d, d);
            for i in 0..c {
                diag[(i, i)] = c_real(norm);
            }
            diag[(c, c)] = c_real(-norm * real(c as f64));
            generators.push(diag);
        }
        Ok(Self { d, generators })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of generators, `d² - 1`.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMatrix<T>] {
        &self.generators
    }

    pub fn generator(&self, j: usize) -> &CMatrix<T> {
        &self.generators[j]
    }

    /// Zero-based position of the diagonal generator introduced at level `k`
    /// (`2 ≤ k ≤ d`), i.e. one-based index `k² - 1`.
    pub fn diagonal_index(k: usize) -> usize {
        k * k - 2
    }

    /// Whether `λ_j` is purely imaginary (and hence antisymmetric).
    pub fn is_antisymmetric(&self, j: usize) -> bool {
        self.generators[j].iter().any(|z| z.im != T::zero())
    }

    /// `√(d(d-1)/2)`, the scale between Bloch vectors and generator weights.
    pub fn bloch_scale(&self) -> T {
        real::<T>((self.d * (self.d - 1)) as f64 / 2.0).sqrt()
    }

    /// `⟨n, λ⟩ = Σ_j n_j λ_j`.
    pub fn combination(&self, n: &RVector<T>) -> Result<CMatrix<T>> {
        check_len(n.len(), self.dim())?;
        let mut out = CMatrix::<T>::zeros(self.d, self.d);
        for (g, &w) in self.generators.iter().zip(n.iter()) {
            if w != T::zero() {
                out += g.map(|z| z * w);
            }
        }
        Ok(out)
    }

    /// Real parts of `tr(m λ_j)` for every generator.
    pub fn traces_against(&self, m: &CMatrix<T>) -> RVector<T> {
        RVector::from_iterator(
            self.dim(),
            self.generators.iter().map(|g| trace_of_product(m, g).re),
        )
    }
}

/// Equivalent to [`GellMannBasis::new`].
pub fn generate_basis<T: Real>(d: usize) -> Result<GellMannBasis<T>> {
    GellMannBasis::new(d)
}

pub(crate) fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

/// Totally symmetric (`d_jkl`) and antisymmetric (`f_jkl`) structure constants.
///
/// Only nonzero triples are stored; every permutation of a triple is stored
/// explicitly so lookups never need to canonicalize indices.
#[derive(Debug, Clone)]
pub struct StructureTensors<T: Real> {
    d: usize,
    dim: usize,
    sym: BTreeMap<[usize; 3], T>,
    antisym: BTreeMap<[usize; 3], T>,
}

impl<T: Real> StructureTensors<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sym(&self, j: usize, k: usize, l: usize) -> T {
        self.sym.get(&[j, k, l]).copied().unwrap_or_else(T::zero)
    }

    pub fn antisym(&self, j: usize, k: usize, l: usize) -> T {
        self.antisym.get(&[j, k, l]).copied().unwrap_or_else(T::zero)
    }

    /// Nonzero `d_jkl` entries, all index orders included.
    pub fn sym_entries(&self) -> impl Iterator<Item = ([usize; 3], T)> + '_ {
        self.sym.iter().map(|(k, v)| (*k, *v))
    }

    /// Nonzero `f_jkl` entries, all index orders included.
    pub fn antisym_entries(&self) -> impl Iterator<Item = ([usize; 3], T)> + '_ {
        self.antisym.iter().map(|(k, v)| (*k, *v))
    }

    /// `(Δ_k)_jl = d_jkl`.
    pub fn delta_matrix(&self, k: usize) -> RMatrix<T> {
        RMatrix::from_fn(self.dim, self.dim, |j, l| self.sym(j, k, l))
    }

    /// `(F_k)_jl = f_jkl`.
    pub fn f_matrix(&self, k: usize) -> RMatrix<T> {
        RMatrix::from_fn(self.dim, self.dim, |j, l| self.antisym(j, k, l))
    }

    fn dense(map: &BTreeMap<[usize; 3], T>, n: usize) -> Vec<T> {
        let mut out = vec![T::zero(); n * n * n];
        for (&[j, k, l], &v) in map {
            out[(j * n + k) * n + l] = v;
        }
        out
    }
}

/// Computes `d_jkl = ¼ tr({λ_j, λ_k} λ_l)` and `f_jkl = (1/4i) tr([λ_j, λ_k] λ_l)`.
pub fn structure_constants<T: Real>(basis: &GellMannBasis<T>) -> StructureTensors<T> {
    let n = basis.dim();
    let cutoff = T::default_epsilon() * real(64.0);
    let quarter = real::<T>(0.25);
    let mut sym = BTreeMap::new();
    let mut antisym = BTreeMap::new();
    for j in 0..n {
        for k in 0..n {
            let prod = basis.generator(j) * basis.generator(k);
            let rev = basis.generator(k) * basis.generator(j);
            let anti = &prod + &rev;
            let comm = &prod - &rev;
            for l in 0..n {
                // Imaginary part of the first trace and real part of the
                // second vanish up to rounding.
                let dv = trace_of_product(&anti, basis.generator(l)).re * quarter;
                let fv = trace_of_product(&comm, basis.generator(l)).im * quarter;
                if abs(dv) > cutoff {
                    sym.insert([j, k, l], dv);
                }
                if abs(fv) > cutoff {
                    antisym.insert([j, k, l], fv);
                }
            }
        }
    }
    StructureTensors {
        d: basis.d(),
        dim: n,
        sym,
        antisym,
    }
}

/// Largest entry of `λ_j λ_k - (2/d) δ_jk I - Σ_l (d_jkl + i f_jkl) λ_l`.
pub fn closure_residual<T: Real>(basis: &GellMannBasis<T>, tensors: &StructureTensors<T>, j: usize, k: usize) -> T {
    let d = basis.d();
    let mut m = basis.generator(j) * basis.generator(k);
    if j == k {
        m -= crate::linalg::identity::<T>(d).map(|z| z * real::<T>(2.0 / d as f64));
    }
    for l in 0..basis.dim() {
        let w = cplx(tensors.sym(j, k, l), tensors.antisym(j, k, l));
        if w.re != T::zero() || w.im != T::zero() {
            m -= basis.generator(l).map(|z| z * w);
        }
    }
    crate::linalg::max_abs(&m)
}

fn product_prefactor<T: Real>(d: usize) -> Result<T> {
    if d <= 2 {
        return Err(Error::StarUndefined);
    }
    Ok(real::<T>((d * (d - 1)) as f64 / 2.0).sqrt() / real((d - 2) as f64))
}

fn contract<T: Real>(
    entries: impl Iterator<Item = ([usize; 3], T)>,
    n: &RVector<T>,
    m: &RVector<T>,
    dim: usize,
    scale: T,
) -> RVector<T> {
    let mut out = RVector::<T>::zeros(dim);
    for ([j, k, l], v) in entries {
        out[j] += v * n[k] * m[l];
    }
    out * scale
}

/// `(n ⋆ m)_j = √(d(d-1)/2) / (d-2) · Σ_kl d_jkl n_k m_l`. Undefined for `d = 2`.
pub fn star<T: Real>(
    n: &RVector<T>,
    m: &RVector<T>,
    tensors: &StructureTensors<T>,
) -> Result<RVector<T>> {
    let scale = product_prefactor::<T>(tensors.d)?;
    check_len(n.len(), tensors.dim)?;
    check_len(m.len(), tensors.dim)?;
    Ok(contract(tensors.sym_entries(), n, m, tensors.dim, scale))
}

/// `(n ∧ m)_j = √(d(d-1)/2) / (d-2) · Σ_kl f_jkl n_k m_l`. Undefined for `d = 2`.
pub fn wedge<T: Real>(
    n: &RVector<T>,
    m: &RVector<T>,
    tensors: &StructureTensors<T>,
) -> Result<RVector<T>> {
    let scale = product_prefactor::<T>(tensors.d)?;
    check_len(n.len(), tensors.dim)?;
    check_len(m.len(), tensors.dim)?;
    Ok(contract(tensors.antisym_entries(), n, m, tensors.dim, scale))
}

/// Orthogonal matrix `R(U)` of the adjoint action `λ_k ↦ U λ_k U†`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMatrix<T: Real> {
    pub d: usize,
    pub entries: RMatrix<T>,
}

/// `R_jk = ½ tr(λ_j U λ_k U†)`.
pub fn adjoint_rep<T: Real>(u: &CMatrix<T>, basis: &GellMannBasis<T>) -> Result<AdjointMatrix<T>> {
    let d = basis.d();
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: u.nrows(),
        });
    }
    let residual = unitarity_residual(u);
    if to_f64(residual) > T::ORTHO_TOL {
        return Err(Error::NonUnitaryInput {
            residual: to_f64(residual),
        });
    }
    let n = basis.dim();
    let half = real::<T>(0.5);
    let u_adj = u.adjoint();
    let conjugated: Vec<CMatrix<T>> = basis
        .generators()
        .iter()
        .map(|g| u * g * &u_adj)
        .collect();
    let entries = RMatrix::from_fn(n, n, |j, k| {
        trace_of_product(basis.generator(j), &conjugated[k]).re * half
    });
    Ok(AdjointMatrix { d, entries })
}

/// Max deviation of `Σ t_{abc} V_aj V_bk V_cl` from `t_jkl` over all triples.
fn transform_residual<T: Real>(dense: &[T], v: &RMatrix<T>, n: usize) -> T {
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    // Three successive mode products.
    let mut s1 = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let t = dense[idx(a, b, c)];
                if t == T::zero() {
                    continue;
                }
                for j in 0..n {
                    s1[idx(j, b, c)] += v[(a, j)] * t;
                }
            }
        }
    }
    let mut s2 = vec![T::zero(); n * n * n];
    for j in 0..n {
        for b in 0..n {
            for c in 0..n {
                let t = s1[idx(j, b, c)];
                for k in 0..n {
                    s2[idx(j, k, c)] += v[(b, k)] * t;
                }
            }
        }
    }
    let mut worst = T::zero();
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                let mut acc = T::zero();
                for c in 0..n {
                    acc += v[(c, l)] * s2[idx(j, k, c)];
                }
                worst = worst.max(abs(acc - dense[idx(j, k, l)]));
            }
        }
    }
    worst
}

fn check_square<T: Real>(v: &RMatrix<T>, n: usize) -> Result<()> {
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: if v.nrows() != n { v.nrows() } else { v.ncols() },
        });
    }
    Ok(())
}

/// Whether `V` leaves the symmetric tensor `d_jkl` invariant within `tol`.
///
/// Every element of `R(SU(d))` passes; a generic orthogonal matrix fails for
/// `d ≥ 3`. The transpose map (the diagonal `I₀` matrix) passes as well.
pub fn preserves_d_tensor<T: Real>(v: &RMatrix<T>, tensors: &StructureTensors<T>, tol: T) -> Result<bool> {
    check_square(v, tensors.dim)?;
    let dense = StructureTensors::dense(&tensors.sym, tensors.dim);
    Ok(transform_residual(&dense, v, tensors.dim) <= tol)
}

/// Whether `V` leaves the antisymmetric tensor `f_jkl` invariant within `tol`.
pub fn preserves_f_tensor<T: Real>(v: &RMatrix<T>, tensors: &StructureTensors<T>, tol: T) -> Result<bool> {
    check_square(v, tensors.dim)?;
    let dense = StructureTensors::dense(&tensors.antisym, tensors.dim);
    Ok(transform_residual(&dense, v, tensors.dim) <= tol)
}

/// Dimensions of SU(d), of its adjoint image, and of the full orthogonal group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupDims {
    pub su: usize,
    pub adjoint_image: usize,
    pub orthogonal: usize,
}

pub fn dims_table(d: usize) -> Result<GroupDims> {
    if d < 2 {
        return Err(Error::InvalidLevel(d));
    }
    let n = d * d - 1;
    Ok(GroupDims {
        su: n,
        adjoint_image: n,
        orthogonal: n * (n - 1) / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::ComplexField;
    use crate::linalg::{exp_i_hermitian, max_abs, orthogonality_residual};
    use nalgebra::Complex;

    fn basis(d: usize) -> GellMannBasis<f64> {
        GellMannBasis::new(d).unwrap()
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let b = basis(2);
        let c = |re, im| Complex::new(re, im);
        let s1 = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let s2 = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let s3 = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        assert_eq!(b.generators(), &[s1, s2, s3]);
    }

    #[test]
    fn basis_sizes_and_determinism() {
        assert_eq!(basis(5).dim(), 24);
        assert_eq!(basis(4), basis(4));
        assert!(matches!(GellMannBasis::<f64>::new(1), Err(Error::InvalidLevel(1))));
    }

    #[test]
    fn orthonormal_traceless_hermitian() {
        for d in 2..=8 {
            let b = basis(d);
            for (j, g) in b.generators().iter().enumerate() {
                assert!(max_abs(&(g - g.adjoint())) < 1e-15);
                assert!(g.trace().modulus() < 1e-12);
                for k in 0..b.dim() {
                    let t = trace_of_product(g, b.generator(k));
                    let want = if j == k { 2.0 } else { 0.0 };
                    assert!((t - Complex::new(want, 0.0)).modulus() < 1e-12, "d={d} j={j} k={k}");
                }
            }
        }
    }

    #[test]
    fn diagonal_generators_at_square_indices() {
        let b = basis(5);
        for k in 2..=5 {
            let g = b.generator(GellMannBasis::<f64>::diagonal_index(k));
            let off: f64 = (0..5)
                .flat_map(|r| (0..5).map(move |c| (r, c)))
                .filter(|(r, c)| r != c)
                .map(|(r, c)| g[(r, c)].modulus())
                .sum();
            assert_eq!(off, 0.0);
        }
    }

    #[test]
    fn qubit_structure_constants() {
        let t = structure_constants(&basis(2));
        assert_eq!(t.sym_entries().count(), 0);
        assert!((t.antisym(0, 1, 2) - 1.0).abs() < 1e-15);
        assert!((t.antisym(1, 0, 2) + 1.0).abs() < 1e-15);
        assert_eq!(t.antisym_entries().count(), 6);
    }

    #[test]
    fn algebra_closes() {
        for d in 2..=4 {
            let b = basis(d);
            let t = structure_constants(&b);
            for j in 0..b.dim() {
                for k in 0..b.dim() {
                    assert!(closure_residual(&b, &t, j, k) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn qutrit_spot_values() {
        let t = structure_constants(&basis(3));
        assert!((t.sym(0, 3, 5) - 0.5).abs() < 1e-12);
        assert!((t.sym(7, 7, 7) + 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((t.antisym(3, 4, 7) - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((t.antisym(0, 2, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_rejects_qubits() {
        let t = structure_constants(&basis(2));
        let n = RVector::from_vec(vec![0.0, 0.0, 1.0]);
        assert!(matches!(star(&n, &n, &t), Err(Error::StarUndefined)));
        assert!(matches!(wedge(&n, &n, &t), Err(Error::StarUndefined)));
    }

    #[test]
    fn star_of_zero_and_length_check() {
        let t = structure_constants(&basis(3));
        let z = RVector::<f64>::zeros(8);
        assert_eq!(star(&z, &z, &t).unwrap(), z);
        let short = RVector::<f64>::zeros(3);
        assert!(matches!(star(&short, &z, &t), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn wedge_of_first_two_axes() {
        // (e1 ∧ e2)_j = √3 f_j12: only f_312 = f_123 = 1 survives.
        let t = structure_constants(&basis(3));
        let mut e1 = RVector::<f64>::zeros(8);
        let mut e2 = RVector::<f64>::zeros(8);
        e1[0] = 1.0;
        e2[1] = 1.0;
        let w = wedge(&e1, &e2, &t).unwrap();
        let mut want = RVector::<f64>::zeros(8);
        want[2] = 3f64.sqrt();
        assert!((w - want).amax() < 1e-12);
    }

    #[test]
    fn adjoint_of_identity_and_z_rotation() {
        let b = basis(2);
        let r = adjoint_rep(&CMatrix::identity(2, 2), &b).unwrap();
        assert!((r.entries.clone() - RMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
        for &theta in &[0.3, 1.1, 2.5, -0.8] {
            let h = b.generator(2).map(|z| z * (theta / 2.0));
            let u = exp_i_hermitian(&h);
            let r = adjoint_rep(&u, &b).unwrap().entries;
            let (c, s) = (f64::cos(theta), f64::sin(theta));
            let want = RMatrix::from_row_slice(3, 3, &[c, s, 0., -s, c, 0., 0., 0., 1.]);
            assert!((r.clone() - want).amax() < 1e-12, "theta={theta}: {r}");
            assert!(orthogonality_residual(&r) < 1e-12);
        }
    }

    #[test]
    fn adjoint_rejects_non_unitary() {
        let b = basis(2);
        let m = CMatrix::<f64>::identity(2, 2) * Complex::new(1.1, 0.0);
        assert!(matches!(adjoint_rep(&m, &b), Err(Error::NonUnitaryInput { .. })));
    }

    #[test]
    fn d_tensor_sign_flip_and_identity() {
        let t = structure_constants(&basis(3));
        let id = RMatrix::<f64>::identity(8, 8);
        assert!(preserves_d_tensor(&id, &t, 1e-10).unwrap());
        assert!(!preserves_d_tensor(&(-id.clone()), &t, 1e-10).unwrap());
        assert!(preserves_f_tensor(&id, &t, 1e-10).unwrap());
        assert!(preserves_d_tensor(&RMatrix::<f64>::identity(3, 3), &t, 1e-10).is_err());
    }

    #[test]
    fn table_dims() {
        let rows: Vec<_> = (2..=4).map(|d| dims_table(d).unwrap()).collect();
        let tuples: Vec<_> = rows.iter().map(|g| (g.su, g.adjoint_image, g.orthogonal)).collect();
        assert_eq!(tuples, vec![(3, 3, 3), (8, 8, 28), (15, 15, 105)]);
        for d in 2..=10 {
            let g = dims_table(d).unwrap();
            assert_eq!(g.adjoint_image < g.orthogonal, d >= 3);
        }
        assert!(dims_table(1).is_err());
    }

    #[test]
    fn single_precision_basis() {
        let b = GellMannBasis::<f32>::new(3).unwrap();
        let t = structure_constants(&b);
        assert!((t.sym(0, 3, 5) - 0.5).abs() < 1e-6);
    }
}
