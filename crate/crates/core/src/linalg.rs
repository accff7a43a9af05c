//! Dense complex linear-algebra helpers used throughout the crate.

use nalgebra::{Complex, ComplexField, DMatrix, DVector};

use crate::scalar::{abs, c_real, cplx, real, Real};

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type RMatrix<T> = DMatrix<T>;
pub type RVector<T> = DVector<T>;

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn max_abs_real<T: Real>(m: &RMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(abs(x)))
}

/// `max |A - A^H|`.
pub fn hermiticity_residual<T: Real>(m: &CMatrix<T>) -> T {
    max_abs(&(m - m.adjoint()))
}

/// `(A + A^H) / 2`.
pub fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    (m + m.adjoint()).scale(real(0.5))
}

/// Eigenvalues of the Hermitian part of `m`, in ascending order.
pub fn hermitian_eigenvalues<T: Real>(m: &CMatrix<T>) -> RVector<T> {
    let mut ev = hermitian_part(m).symmetric_eigenvalues();
    ev.as_mut_slice()
        .sort_by(|a, b| a.partial_cmp(b).expect("NaN eigenvalue"));
    ev
}

/// Eigen-decomposition `(values, vectors)` of the Hermitian part of `m`.
pub fn hermitian_eigen<T: Real>(m: &CMatrix<T>) -> (RVector<T>, CMatrix<T>) {
    let e = hermitian_part(m).symmetric_eigen();
    (e.eigenvalues, e.eigenvectors)
}

pub fn min_eigenvalue<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_eigenvalues(m)[0]
}

/// Schatten 1-norm of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm_hermitian<T: Real>(m: &CMatrix<T>) -> T {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .fold(T::zero(), |acc, &x| acc + abs(x))
}

/// Squared Frobenius norm.
pub fn frobenius_sq<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    m.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_of_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Complex<T> {
    let n = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `max |U U^H - I|`.
pub fn unitarity_residual<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    if u.ncols() != n {
        return T::max_value().unwrap_or_else(T::one);
    }
    max_abs(&(u * u.adjoint() - CMatrix::<T>::identity(n, n)))
}

/// `max |V V^T - I|`.
pub fn orthogonality_residual<T: Real>(v: &RMatrix<T>) -> T {
    let n = v.nrows();
    if v.ncols() != n {
        return T::max_value().unwrap_or_else(T::one);
    }
    max_abs_real(&(v * v.transpose() - RMatrix::<T>::identity(n, n)))
}

/// `exp(i H)` for Hermitian `H`, computed through its eigenbasis so the result
/// is unitary to working precision.
pub fn exp_i_hermitian<T: Real>(h: &CMatrix<T>) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(h);
    let phases = CMatrix::<T>::from_diagonal(&vals.map(|x| cplx(x.cos(), x.sin())));
    &vecs * phases * vecs.adjoint()
}

pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

pub fn to_complex<T: Real>(m: &RMatrix<T>) -> CMatrix<T> {
    m.map(c_real)
}

pub fn real_part<T: Real>(m: &CMatrix<T>) -> RMatrix<T> {
    m.map(|z| z.re)
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::<T>::identity(n, n)
}

/// Traces out the second factor of a `d·d`-dimensional operator.
pub fn trace_out_second<T: Real>(m: &CMatrix<T>, d: usize) -> CMatrix<T> {
    CMatrix::<T>::from_fn(d, d, |a, b| {
        (0..d).fold(c_real(T::zero()), |acc, k| acc + m[(a * d + k, b * d + k)])
    })
}

/// Traces out the first factor of a `d·d`-dimensional operator.
pub fn trace_out_first<T: Real>(m: &CMatrix<T>, d: usize) -> CMatrix<T> {
    CMatrix::<T>::from_fn(d, d, |a, b| {
        (0..d).fold(c_real(T::zero()), |acc, k| acc + m[(k * d + a, k * d + b)])
    })
}

/// Transposes the second tensor factor: `|a b><a' b'| -> |a b'><a' b|`.
pub fn partial_transpose_second<T: Real>(m: &CMatrix<T>, d: usize) -> CMatrix<T> {
    let n = d * d;
    CMatrix::<T>::from_fn(n, n, |r, c| {
        let (a, b) = (r / d, r % d);
        let (ap, bp) = (c / d, c % d);
        m[(a * d + bp, ap * d + b)]
    })
}

/// Swap operator `F |a b> = |b a>` on `C^d ⊗ C^d`.
pub fn swap_operator<T: Real>(d: usize) -> CMatrix<T> {
    let n = d * d;
    let mut f = CMatrix::<T>::zeros(n, n);
    for a in 0..d {
        for b in 0..d {
            f[(b * d + a, a * d + b)] = c_real(T::one());
        }
    }
    f
}

/// Block `(a, b)` (the operator `<a| ρ |b>` on the second factor).
pub fn block<T: Real>(m: &CMatrix<T>, d: usize, a: usize, b: usize) -> CMatrix<T> {
    m.view((a * d, b * d), (d, d)).into_owned()
}
