//! Exact reference actions for separable problems.
//!
//! When `A = A₁ ⊕ … ⊕ A₁` and `b = w ⊗ … ⊗ w`, the exponential factorizes:
//! `e^{τA}b = (e^{τA₁}w) ⊗ … ⊗ (e^{τA₁}w)`. The 1-D factor is symmetric,
//! so its action comes from a symmetric eigendecomposition at any size.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::harness::generators::SeparableFactor;
use crate::trig::TrigFn;

pub struct SeparableReference {
    lambda: Vec<f64>,
    vectors: DMatrix<f64>,
    /// `Vᵀw`.
    coeffs: Vec<f64>,
    dims: usize,
}

impl SeparableReference {
    pub fn new(factor: &SeparableFactor) -> Result<Self> {
        let n = factor.a1.n();
        if factor.w.len() != n {
            return Err(Error::dims("factor vector length differs from the factor size"));
        }
        let dense = DMatrix::from_column_slice(n, n, &factor.a1.to_dense());
        if (&dense - dense.transpose()).amax() > 0.0 {
            return Err(Error::contract("separable factor must be symmetric"));
        }
        let eig = SymmetricEigen::new(dense);
        let coeffs = (eig.eigenvectors.transpose() * DVector::from_column_slice(&factor.w))
            .iter()
            .copied()
            .collect();
        Ok(SeparableReference {
            lambda: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
            coeffs,
            dims: factor.dims,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len().pow(self.dims as u32)
    }

    /// `e^{τA}b`.
    pub fn exp_action(&self, tau: Complex64) -> Vec<Complex64> {
        let n = self.lambda.len();
        let scaled: Vec<Complex64> = self
            .lambda
            .iter()
            .zip(&self.coeffs)
            .map(|(&l, &c)| (tau * l).exp() * c)
            .collect();
        let u1: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|k| scaled[k] * self.vectors[(i, k)]).sum())
            .collect();
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..self.dims {
            out = u1.iter().flat_map(|&ui| out.iter().map(move |&o| o * ui)).collect();
        }
        out
    }

    /// `f(tA)b`.
    pub fn action(&self, f: TrigFn, t: f64) -> BlockVector<Complex64> {
        let e = |tau: Complex64| self.exp_action(tau);
        let i = Complex64::new(0.0, 1.0);
        let v = match f {
            TrigFn::Exp => e(Complex64::new(t, 0.0)),
            TrigFn::Cosh | TrigFn::Sinh => {
                let sign = if f == TrigFn::Cosh { 1.0 } else { -1.0 };
                let (p, m) = (e(Complex64::new(t, 0.0)), e(Complex64::new(-t, 0.0)));
                p.iter().zip(&m).map(|(a, b)| 0.5 * (a + sign * b)).collect()
            }
            TrigFn::Cos | TrigFn::Sin => {
                let (p, m) = (e(i * t), e(-i * t));
                if f == TrigFn::Cos {
                    p.iter().zip(&m).map(|(a, b)| 0.5 * (a + b)).collect()
                } else {
                    p.iter().zip(&m).map(|(a, b)| -0.5 * i * (a - b)).collect()
                }
            }
        };
        BlockVector::from_vec(v).expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::GeneratorSpec;
    use crate::oracle::dense_f_operator;

    #[test]
    fn matches_dense_oracle_on_small_grid() {
        let spec = GeneratorSpec::Laplace2d { n: 5 };
        let g = spec.generate().unwrap();
        let r = SeparableReference::new(&spec.separable_factor().unwrap()).unwrap();
        assert_eq!(r.dim(), 25);
        for f in TrigFn::ALL {
            let want = dense_f_operator(&g.op, f, 0.003).unwrap().apply(&g.rhs).unwrap();
            let got = r.action(f, 0.003);
            assert!(got.rel_diff(&want) < 1e-12, "{f}: {}", got.rel_diff(&want));
        }
    }

    #[test]
    fn schrodinger_factor_reproduces_generator() {
        let spec = GeneratorSpec::Schrodinger3dSplit { n: 4 };
        let g = spec.generate().unwrap();
        let r = SeparableReference::new(&spec.separable_factor().unwrap()).unwrap();
        let want = dense_f_operator(&g.op, TrigFn::Cos, 0.01).unwrap().apply(&g.rhs).unwrap();
        assert!(r.action(TrigFn::Cos, 0.01).rel_diff(&want) < 1e-12);
    }
}
