//! Dense reference values of `f(tA)` for small matrices, used as ground
//! truth in tests and benchmarks.
//!
//! Diagonalizable inputs with a well-conditioned eigenvector basis go
//! through a Schur decomposition; everything else through a scaled Taylor
//! series in double-word arithmetic followed by double-angle (or squaring)
//! steps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::block::BlockVector;
use crate::double_double::{Dd, DdComplex};
use crate::error::{Error, Result};
use crate::operator::MatrixOperator;
use crate::scalar::Scalar;
use crate::trig::TrigFn;

pub const MAX_ORACLE_DIM: usize = 64;
/// Largest accepted eigenvector condition number (1-norm).
pub const MAX_EIGVEC_COND: f64 = 1e6;
const TAYLOR_RADIUS: f64 = 0.25;
const TAYLOR_STOP: f64 = 1e-20;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Eigen,
    ScaledTaylor,
}

#[derive(Clone, Debug)]
pub struct DenseFunction {
    pub n: usize,
    /// Column-major `f(tA)`.
    pub values: Vec<Complex64>,
    pub method: OracleMethod,
    /// Self-reported relative accuracy in the 1-norm.
    pub accuracy: f64,
}

impl DenseFunction {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.n + i]
    }

    /// `f(tA)·B`.
    pub fn apply<T: Scalar>(&self, b: &BlockVector<T>) -> Result<BlockVector<Complex64>> {
        let n = self.n;
        if b.nrows() != n {
            return Err(Error::dims(format!("block has {} rows, oracle is {n}x{n}", b.nrows())));
        }
        let mut out = BlockVector::zeros(n, b.ncols());
        for c in 0..b.ncols() {
            let x = b.column(c);
            let y = out.column_mut(c);
            for (j, xj) in x.iter().enumerate() {
                let xj = xj.to_complex();
                for (i, yi) in y.iter_mut().enumerate() {
                    *yi += self.values[j * n + i] * xj;
                }
            }
        }
        Ok(out)
    }

    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| self.values[j * self.n..(j + 1) * self.n].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `f(tA)` for a column-major `n×n` matrix, preferring the eigen path.
pub fn dense_f(a: &[Complex64], n: usize, f: TrigFn, t: f64) -> Result<DenseFunction> {
    match dense_f_with(a, n, f, t, OracleMethod::Eigen) {
        Ok(r) => Ok(r),
        Err(Error::OracleUnavailable(_)) => dense_f_with(a, n, f, t, OracleMethod::ScaledTaylor),
        Err(e) => Err(e),
    }
}

pub fn dense_f_operator<S: Scalar>(a: &MatrixOperator<S>, f: TrigFn, t: f64) -> Result<DenseFunction> {
    check_dim(a.n())?;
    let dense: Vec<Complex64> = a.to_dense().into_iter().map(Scalar::to_complex).collect();
    dense_f(&dense, a.n(), f, t)
}

pub fn dense_f_with(a: &[Complex64], n: usize, f: TrigFn, t: f64, method: OracleMethod) -> Result<DenseFunction> {
    check_dim(n)?;
    if a.len() != n * n {
        return Err(Error::dims(format!("{} entries for a {n}x{n} matrix", a.len())));
    }
    if !t.is_finite() || a.iter().any(|z| !z.is_finite()) {
        return Err(Error::contract("oracle input must be finite"));
    }
    match method {
        OracleMethod::Eigen => eigen_path(a, n, f, t),
        OracleMethod::ScaledTaylor => taylor_path(a, n, f, t),
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n > MAX_ORACLE_DIM {
        return Err(Error::OracleUnavailable(format!(
            "dimension {n} exceeds {MAX_ORACLE_DIM}"
        )));
    }
    Ok(())
}

fn eigen_path(a: &[Complex64], n: usize, f: TrigFn, t: f64) -> Result<DenseFunction> {
    if n == 0 {
        return Ok(DenseFunction {
            n,
            values: Vec::new(),
            method: OracleMethod::Eigen,
            accuracy: 0.0,
        });
    }
    let m = DMatrix::from_column_slice(n, n, a);
    let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::OracleUnavailable("Schur iteration did not converge".into()))?;
    let (q, tri) = schur.unpack();
    let tnorm = (0..n)
        .map(|j| (0..n).map(|i| tri[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let small = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);

    // Eigenvectors of the triangular factor by back substitution.
    let mut x = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        let lambda = tri[(k, k)];
        x[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += tri[(i, j)] * x[(j, k)];
            }
            let mut d = tri[(i, i)] - lambda;
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            x[(i, k)] = -s / d;
        }
    }
    let mut v = &q * x;
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
    }
    let vinv = v
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::OracleUnavailable("eigenvector matrix is singular".into()))?;
    let norm1 = |m: &DMatrix<Complex64>| -> f64 {
        m.column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let cond = norm1(&v) * norm1(&vinv);
    if !(cond <= MAX_EIGVEC_COND) {
        return Err(Error::OracleUnavailable(format!(
            "eigenvector condition number {cond:.3e} too large"
        )));
    }
    let mut scaled = v.clone();
    for k in 0..n {
        let fk = f.eval(tri[(k, k)] * t);
        for i in 0..n {
            scaled[(i, k)] *= fk;
        }
    }
    let fm = scaled * vinv;
    Ok(DenseFunction {
        n,
        values: fm.as_slice().to_vec(),
        method: OracleMethod::Eigen,
        accuracy: cond * n as f64 * f64::EPSILON,
    })
}

#[derive(Clone)]
struct DdMat {
    n: usize,
    v: Vec<DdComplex>,
}

impl DdMat {
    fn identity(n: usize) -> DdMat {
        let mut v = vec![DdComplex::ZERO; n * n];
        for i in 0..n {
            v[i * n + i] = DdComplex::ONE;
        }
        DdMat { n, v }
    }

    fn zeros(n: usize) -> DdMat {
        DdMat {
            n,
            v: vec![DdComplex::ZERO; n * n],
        }
    }

    fn mul(&self, o: &DdMat) -> DdMat {
        let n = self.n;
        let mut out = DdMat::zeros(n);
        for j in 0..n {
            for k in 0..n {
                let b = o.v[j * n + k];
                if b == DdComplex::ZERO {
                    continue;
                }
                for i in 0..n {
                    out.v[j * n + i] += self.v[k * n + i] * b;
                }
            }
        }
        out
    }

    fn add(&self, o: &DdMat) -> DdMat {
        DdMat {
            n: self.n,
            v: self.v.iter().zip(&o.v).map(|(&a, &b)| a + b).collect(),
        }
    }

    fn sub(&self, o: &DdMat) -> DdMat {
        DdMat {
            n: self.n,
            v: self.v.iter().zip(&o.v).map(|(&a, &b)| a - b).collect(),
        }
    }

    fn scale(&self, s: Dd) -> DdMat {
        DdMat {
            n: self.n,
            v: self.v.iter().map(|&a| a.scale(s)).collect(),
        }
    }

    fn norm1(&self) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| self.v[j * n..(j + 1) * n].iter().map(|z| z.abs1()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

fn taylor_path(a: &[Complex64], n: usize, f: TrigFn, t: f64) -> Result<DenseFunction> {
    let td = Dd::from_f64(t);
    let x = DdMat {
        n,
        v: a.iter().map(|&z| DdComplex::from_c64(z).scale(td)).collect(),
    };
    let norm = x.norm1();
    let k = if norm > TAYLOR_RADIUS {
        (norm / TAYLOR_RADIUS).log2().ceil() as i32
    } else {
        0
    };
    let x = DdMat {
        n,
        v: x.v.iter().map(|z| DdComplex::new(z.re.ldexp(-k), z.im.ldexp(-k))).collect(),
    };

    // Series for e^X, or for the even/odd pair (cos, sin) / (cosh, sinh).
    let trig = matches!(f, TrigFn::Cos | TrigFn::Sin);
    let mut even = DdMat::identity(n);
    let mut odd = DdMat::zeros(n);
    let mut term = DdMat::identity(n);
    for j in 1..200usize {
        term = term.mul(&x).scale(Dd::from_f64(j as f64).recip());
        let negate = trig && (j / 2) % 2 == 1;
        let signed = if negate { term.scale(Dd::from_f64(-1.0)) } else { term.clone() };
        if j % 2 == 0 {
            even = even.add(&signed);
        } else {
            odd = odd.add(&signed);
        }
        let partial = even.norm1() + odd.norm1();
        if j >= 2 && term.norm1() < TAYLOR_STOP * partial {
            break;
        }
    }

    let two = Dd::from_f64(2.0);
    let mut growth: f64 = 1.0;
    let result = match f {
        TrigFn::Exp => {
            let mut e = even.add(&odd);
            for _ in 0..k {
                let before = e.norm1();
                e = e.mul(&e);
                growth = growth.max(before * before / e.norm1().max(f64::MIN_POSITIVE));
            }
            e
        }
        _ => {
            let (mut c, mut s) = (even, odd);
            for _ in 0..k {
                let cc = c.mul(&c);
                let ss = s.mul(&s);
                let sc = s.mul(&c).scale(two);
                c = if trig { cc.sub(&ss) } else { cc.add(&ss) };
                let scale = cc.norm1() + ss.norm1();
                growth = growth.max(scale / c.norm1().max(sc.norm1()).max(f64::MIN_POSITIVE));
                s = sc;
            }
            if matches!(f, TrigFn::Cos | TrigFn::Cosh) {
                c
            } else {
                s
            }
        }
    };
    let values: Vec<Complex64> = result.v.iter().map(|z| z.to_c64()).collect();
    if values.iter().any(|z| !z.is_finite()) {
        return Err(Error::OracleUnavailable("scaled Taylor overflowed".into()));
    }
    let amplification = growth * 2f64.powi(k);
    Ok(DenseFunction {
        n,
        values,
        method: OracleMethod::ScaledTaylor,
        accuracy: f64::EPSILON + (TAYLOR_STOP + n as f64 * 1e-31) * amplification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn assert_matrix(got: &DenseFunction, want: &[Complex64], tol: f64) {
        for (g, w) in got.values.iter().zip(want) {
            assert!((g - w).norm() <= tol, "{g} vs {w}");
        }
    }

    #[test]
    fn cosine_of_diagonal() {
        let a = [c(0.0), c(0.0), c(0.0), c(PI)];
        for m in [OracleMethod::Eigen, OracleMethod::ScaledTaylor] {
            let r = dense_f_with(&a, 2, TrigFn::Cos, 1.0, m).unwrap();
            assert_matrix(&r, &[c(1.0), c(0.0), c(0.0), c(-1.0)], 1e-14);
        }
    }

    #[test]
    fn cosine_of_rotation_generator() {
        // column-major [[0,1],[-1,0]]
        let a = [c(0.0), c(-1.0), c(1.0), c(0.0)];
        let ch = 1f64.cosh();
        for m in [OracleMethod::Eigen, OracleMethod::ScaledTaylor] {
            let r = dense_f_with(&a, 2, TrigFn::Cos, 1.0, m).unwrap();
            assert_matrix(&r, &[c(ch), c(0.0), c(0.0), c(ch)], 1e-14);
        }
    }

    #[test]
    fn sine_of_nilpotent_jordan_block() {
        let mut a = vec![c(0.0); 9];
        a[3] = c(1.0); // (0,1)
        a[7] = c(1.0); // (1,2)
        let r = dense_f(&a, 3, TrigFn::Sin, 1.0).unwrap();
        assert_eq!(r.method, OracleMethod::ScaledTaylor);
        assert_matrix(&r, &a, 1e-15);
    }

    #[test]
    fn paths_agree_on_normal_matrix() {
        let n = 6;
        let mut a = vec![c(0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let x = ((i * 7 + j * 3) % 5) as f64 * 0.4 - 0.8;
                a[j * n + i] += c(x);
                a[i * n + j] += c(x);
            }
        }
        for f in TrigFn::ALL {
            let e = dense_f_with(&a, n, f, 1.3, OracleMethod::Eigen).unwrap();
            let s = dense_f_with(&a, n, f, 1.3, OracleMethod::ScaledTaylor).unwrap();
            let diff = DenseFunction {
                n,
                values: e.values.iter().zip(&s.values).map(|(x, y)| x - y).collect(),
                method: OracleMethod::Eigen,
                accuracy: 0.0,
            };
            assert!(diff.one_norm() <= 1e-12 * s.one_norm(), "{f}");
        }
    }

    #[test]
    fn oversize_is_unavailable() {
        let a = vec![c(0.0); 65 * 65];
        assert!(matches!(dense_f(&a, 65, TrigFn::Exp, 1.0), Err(Error::OracleUnavailable(_))));
    }
}
