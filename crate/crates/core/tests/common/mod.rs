#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trigmv::operator::MatrixOperator;
use trigmv::{BlockVector, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Column-major dense values with entries uniform on `[-1, 1]`.
pub fn random_dense(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n * n).map(|_| r.gen_range(-1.0..1.0)).collect()
}

pub fn random_real(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    MatrixOperator::dense(n, random_dense(r, n).into_iter().map(|x| x * scale).collect()).unwrap()
}

pub fn random_complex(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<Complex64> {
    let v = (0..n * n)
        .map(|_| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * scale)
        .collect();
    MatrixOperator::dense(n, v).unwrap()
}

pub fn random_upper(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    let mut v = random_dense(r, n);
    for j in 0..n {
        for i in j + 1..n {
            v[j * n + i] = 0.0;
        }
    }
    MatrixOperator::dense(n, v.into_iter().map(|x| x * scale).collect()).unwrap()
}

pub fn random_symmetric(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    let a = random_dense(r, n);
    let v = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            0.5 * (a[j * n + i] + a[i * n + j]) * scale
        })
        .collect();
    MatrixOperator::dense(n, v).unwrap()
}

pub fn random_block<T: Scalar>(r: &mut ChaCha8Rng, n: usize, q: usize) -> BlockVector<T> {
    BlockVector::from_fn(n, q, |_, _| {
        let z = if T::IS_COMPLEX {
            c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
        } else {
            c(r.gen_range(-1.0..1.0), 0.0)
        };
        T::from_complex(z).unwrap()
    })
}

/// Dense column-major product `a·b` of `n×n` matrices.
pub fn matmul<S: Scalar>(a: &[S], b: &[S], n: usize) -> Vec<S> {
    let mut out = vec![S::zero(); n * n];
    for j in 0..n {
        for k in 0..n {
            let bkj = b[j * n + k];
            for i in 0..n {
                out[j * n + i] += a[k * n + i] * bkj;
            }
        }
    }
    out
}

pub fn dense_one_norm<S: Scalar>(a: &[S], n: usize) -> f64 {
    (0..n)
        .map(|j| a[j * n..(j + 1) * n].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖A^p‖₁` by repeated dense multiplication.
pub fn power_norm<S: Scalar>(a: &MatrixOperator<S>, p: usize) -> f64 {
    let d = a.to_dense();
    let mut acc = d.clone();
    for _ in 1..p {
        acc = matmul(&acc, &d, a.n());
    }
    dense_one_norm(&acc, a.n())
}

pub fn rel(a: &BlockVector<Complex64>, b: &BlockVector<Complex64>) -> f64 {
    a.rel_diff(b)
}

fn complex_dmatrix(r: &mut ChaCha8Rng, n: usize) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(n, n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
}

fn from_dmatrix<S: Scalar>(m: &nalgebra::DMatrix<S>) -> MatrixOperator<S>
where
    S: nalgebra::Scalar,
{
    MatrixOperator::dense(m.nrows(), m.as_slice().to_vec()).unwrap()
}

/// `Q·R·Qᵀ` with `Q` orthogonal and `R` block diagonal of `[[a, b], [−b, a]]`
/// (and a trailing `1×1` block for odd `n`), entries of `R` on `[-scale, scale]`.
pub fn random_real_normal(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    let q = nalgebra::DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0)).qr().q();
    let mut rm = nalgebra::DMatrix::<f64>::zeros(n, n);
    let mut k = 0;
    while k < n {
        let a = scale * r.gen_range(-1.0..1.0);
        if k + 1 < n {
            let b = scale * r.gen_range(-1.0..1.0);
            rm[(k, k)] = a;
            rm[(k + 1, k + 1)] = a;
            rm[(k, k + 1)] = b;
            rm[(k + 1, k)] = -b;
            k += 2;
        } else {
            rm[(k, k)] = a;
            k += 1;
        }
    }
    from_dmatrix(&(&q * rm * q.transpose()))
}

/// `U·diag(λ)·Uᴴ` with `U` unitary and `|λ| <= scale`.
pub fn random_complex_normal(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<Complex64> {
    let u = complex_dmatrix(r, n).qr().q();
    let lam = nalgebra::DVector::from_fn(n, |_, _| {
        Complex64::from_polar(scale * r.gen_range(0.0f64..1.0).sqrt(), r.gen_range(0.0..std::f64::consts::TAU))
    });
    from_dmatrix(&(&u * nalgebra::DMatrix::from_diagonal(&lam) * u.adjoint()))
}

/// Real symmetric `Q·diag(λ)·Qᵀ` with `λ` uniform on `[-scale, scale]`.
pub fn random_real_symmetric_spectrum(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    let q = nalgebra::DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0)).qr().q();
    let lam = nalgebra::DVector::from_fn(n, |_, _| scale * r.gen_range(-1.0..1.0));
    from_dmatrix(&(&q * nalgebra::DMatrix::from_diagonal(&lam) * q.transpose()))
}

/// Nonnormal `V·diag(λ)·V⁻¹` with `V = I + E`, `‖E‖` small, so `V` stays well
/// conditioned.
pub fn random_real_diagonalizable(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<f64> {
    let e = 0.5 / (n as f64).sqrt();
    let v = nalgebra::DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + e * r.gen_range(-1.0..1.0));
    let lam = nalgebra::DVector::from_fn(n, |_, _| scale * r.gen_range(-1.0..1.0));
    let vi = v.clone().try_inverse().unwrap();
    from_dmatrix(&(&v * nalgebra::DMatrix::from_diagonal(&lam) * vi))
}

pub fn random_complex_diagonalizable(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<Complex64> {
    let e = 0.5 / (n as f64).sqrt();
    let v = complex_dmatrix(r, n).map(|z| z * e) + nalgebra::DMatrix::<Complex64>::identity(n, n);
    let lam = nalgebra::DVector::from_fn(n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * scale);
    let vi = v.clone().try_inverse().unwrap();
    from_dmatrix(&(&v * nalgebra::DMatrix::from_diagonal(&lam) * vi))
}

pub fn random_complex_upper(r: &mut ChaCha8Rng, n: usize, scale: f64) -> MatrixOperator<Complex64> {
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)) * scale;
        if i <= j { z } else { c(0.0, 0.0) }
    });
    from_dmatrix(&m)
}
