//! Test matrices and their canonical right-hand sides.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::operator::MatrixOperator;

pub const DEFAULT_GENERATOR_SEED: u64 = 20_240_101;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorSpec {
    /// Upper triangular, `-1` on the diagonal and `-alpha` above it.
    Triw { n: usize, alpha: f64 },
    /// Upper triangular with entries uniform on `[-0.5, 0.5]`.
    TriuUniform { n: usize, seed: u64 },
    /// Dirichlet second differences on `n` interior points of `[0, 1]`.
    Laplace1d { n: usize },
    /// Five-point Laplacian on an `n×n` interior grid of the unit square.
    Laplace2d { n: usize },
    /// `½(Δ − ½(x² + y² + z²))` on an `n³` interior grid of the unit cube;
    /// the factor `i` of the Schrödinger equation is left out.
    Schrodinger3dSplit { n: usize },
    /// Periodic central differences for `-∂ₓ` on `n` points.
    Transport1d { n: usize },
    /// Block diagonal of `[[0, ω], [−ω, 0]]` with `ω` uniform on `[0.5, 2]`.
    RotationBlock { blocks: usize, seed: u64 },
}

pub const GENERATOR_NAMES: [&str; 7] = [
    "triw",
    "triu-uniform",
    "laplace1d",
    "laplace2d",
    "schrodinger3d-split",
    "transport1d",
    "rotationblock",
];

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Triw { .. } => "triw",
            GeneratorSpec::TriuUniform { .. } => "triu-uniform",
            GeneratorSpec::Laplace1d { .. } => "laplace1d",
            GeneratorSpec::Laplace2d { .. } => "laplace2d",
            GeneratorSpec::Schrodinger3dSplit { .. } => "schrodinger3d-split",
            GeneratorSpec::Transport1d { .. } => "transport1d",
            GeneratorSpec::RotationBlock { .. } => "rotationblock",
        }
    }

    /// Operator dimension.
    pub fn dim(&self) -> Result<usize> {
        let n = match *self {
            GeneratorSpec::Triw { n, .. }
            | GeneratorSpec::TriuUniform { n, .. }
            | GeneratorSpec::Laplace1d { n }
            | GeneratorSpec::Transport1d { n } => Some(n),
            GeneratorSpec::Laplace2d { n } => n.checked_mul(n),
            GeneratorSpec::Schrodinger3dSplit { n } => n.checked_mul(n).and_then(|m| m.checked_mul(n)),
            GeneratorSpec::RotationBlock { blocks, .. } => blocks.checked_mul(2),
        };
        match n {
            Some(0) => Err(Error::contract("generator size must be positive")),
            Some(n) if n <= u32::MAX as usize => Ok(n),
            _ => Err(Error::contract("generator size overflows the index type")),
        }
    }

    pub fn generate(&self) -> Result<Generated> {
        let n = self.dim()?;
        let (op, rhs) = match *self {
            GeneratorSpec::Triw { n, alpha } => (triw(n, alpha)?, cos_index(n)),
            GeneratorSpec::TriuUniform { n, seed } => (triu_uniform(n, seed)?, cos_index(n)),
            GeneratorSpec::Laplace1d { n } => (laplace1d(n)?, cos_index(n)),
            GeneratorSpec::Laplace2d { n } => {
                let w = bump(n, 16.0);
                (laplace2d(n)?, kron_power(&w, 2))
            }
            GeneratorSpec::Schrodinger3dSplit { n } => {
                let w = bump(n, 16.0);
                (schrodinger3d(n)?, kron_power(&w, 3))
            }
            GeneratorSpec::Transport1d { n } => {
                let h = 1.0 / n as f64;
                let b = (0..n)
                    .map(|i| {
                        let x = i as f64 * h;
                        (-100.0 * (x - 0.5) * (x - 0.5)).exp()
                    })
                    .collect();
                (transport1d(n)?, b)
            }
            GeneratorSpec::RotationBlock { blocks, seed } => (rotation_block(blocks, seed)?, vec![1.0; 2 * blocks]),
        };
        debug_assert_eq!(op.n(), n);
        Ok(Generated {
            spec: *self,
            rhs: BlockVector::from_vec(rhs)?,
            op,
        })
    }

    /// The one-dimensional factor when the operator is a Kronecker sum
    /// `A₁ ⊕ … ⊕ A₁` and the right-hand side a Kronecker power `w ⊗ … ⊗ w`.
    pub fn separable_factor(&self) -> Option<SeparableFactor> {
        match *self {
            GeneratorSpec::Laplace2d { n } => Some(SeparableFactor {
                a1: laplace1d(n).ok()?,
                w: bump(n, 16.0),
                dims: 2,
            }),
            GeneratorSpec::Schrodinger3dSplit { n } => Some(SeparableFactor {
                a1: schrodinger1d(n).ok()?,
                w: bump(n, 16.0),
                dims: 3,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GeneratorSpec::Triw { n, alpha } => write!(f, "triw:{n}:{alpha}"),
            GeneratorSpec::TriuUniform { n, seed } => write!(f, "triu-uniform:{n}:{seed}"),
            GeneratorSpec::Laplace1d { n } => write!(f, "laplace1d:{n}"),
            GeneratorSpec::Laplace2d { n } => write!(f, "laplace2d:{n}"),
            GeneratorSpec::Schrodinger3dSplit { n } => write!(f, "schrodinger3d-split:{n}"),
            GeneratorSpec::Transport1d { n } => write!(f, "transport1d:{n}"),
            GeneratorSpec::RotationBlock { blocks, seed } => write!(f, "rotationblock:{blocks}:{seed}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// `name:size[:extra]`, where `extra` is `alpha` for triw and the seed
    /// for the random generators.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::Unsupported(format!("bad generator spec '{s}' (expected name:size[:extra])"));
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let size: usize = parts[1].parse().map_err(|_| bad())?;
        let seed = || -> Result<u64> {
            parts.get(2).map_or(Ok(DEFAULT_GENERATOR_SEED), |p| p.parse().map_err(|_| bad()))
        };
        let no_extra = || if parts.len() == 2 { Ok(()) } else { Err(bad()) };
        let spec = match parts[0] {
            "triw" => GeneratorSpec::Triw {
                n: size,
                alpha: parts.get(2).map_or(Ok(4.0), |p| p.parse().map_err(|_| bad()))?,
            },
            "triu-uniform" | "triu" => GeneratorSpec::TriuUniform { n: size, seed: seed()? },
            "laplace1d" => no_extra().map(|_| GeneratorSpec::Laplace1d { n: size })?,
            "laplace2d" => no_extra().map(|_| GeneratorSpec::Laplace2d { n: size })?,
            "schrodinger3d-split" => no_extra().map(|_| GeneratorSpec::Schrodinger3dSplit { n: size })?,
            "transport1d" => no_extra().map(|_| GeneratorSpec::Transport1d { n: size })?,
            "rotationblock" => GeneratorSpec::RotationBlock {
                blocks: size,
                seed: seed()?,
            },
            _ => return Err(bad()),
        };
        spec.dim()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub spec: GeneratorSpec,
    pub op: MatrixOperator<f64>,
    pub rhs: BlockVector<f64>,
}

/// A one-dimensional factor of a separable problem.
#[derive(Clone, Debug)]
pub struct SeparableFactor {
    pub a1: MatrixOperator<f64>,
    pub w: Vec<f64>,
    pub dims: usize,
}

/// `v_i = cos(i)`, `i = 1..n`.
pub fn cos_index(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64).cos()).collect()
}

/// `c·x²(1−x)²` at the interior points `x_i = i/(n+1)`.
fn bump(n: usize, c: f64) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    (1..=n)
        .map(|i| {
            let x = i as f64 * h;
            c * x * x * (1.0 - x) * (1.0 - x)
        })
        .collect()
}

/// `w ⊗ … ⊗ w` with the first index varying fastest.
pub fn kron_power(w: &[f64], dims: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..dims {
        out = w.iter().flat_map(|&wi| out.iter().map(move |&o| o * wi)).collect::<Vec<_>>();
    }
    out
}

pub fn triw(n: usize, alpha: f64) -> Result<MatrixOperator<f64>> {
    let mut t = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..j {
            t.push((i, j, -alpha));
        }
        t.push((j, j, -1.0));
    }
    MatrixOperator::from_triplets(n, &t)
}

pub fn triu_uniform(n: usize, seed: u64) -> Result<MatrixOperator<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for i in 0..=j {
            t.push((i, j, rng.gen_range(-0.5..=0.5)));
        }
    }
    MatrixOperator::from_triplets(n, &t)
}

pub fn laplace1d(n: usize) -> Result<MatrixOperator<f64>> {
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            t.push((i, i - 1, s));
        }
        t.push((i, i, -2.0 * s));
        if i + 1 < n {
            t.push((i, i + 1, s));
        }
    }
    MatrixOperator::from_triplets(n, &t)
}

fn stencil(n: usize, dims: usize, diag: impl Fn(&[usize]) -> f64, off: f64) -> Result<MatrixOperator<f64>> {
    let total = n.pow(dims as u32);
    let mut t = Vec::with_capacity(total * (2 * dims + 1));
    let mut idx = vec![0usize; dims];
    for k in 0..total {
        let mut r = k;
        for d in idx.iter_mut() {
            *d = r % n;
            r /= n;
        }
        let mut stride = 1;
        for &c in &idx {
            if c > 0 {
                t.push((k, k - stride, off));
            }
            if c + 1 < n {
                t.push((k, k + stride, off));
            }
            stride *= n;
        }
        t.push((k, k, diag(&idx)));
    }
    MatrixOperator::from_triplets(total, &t)
}

pub fn laplace2d(n: usize) -> Result<MatrixOperator<f64>> {
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    stencil(n, 2, |_| -4.0 * s, s)
}

fn schrodinger1d(n: usize) -> Result<MatrixOperator<f64>> {
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        let x = (i + 1) as f64 * h;
        if i > 0 {
            t.push((i, i - 1, 0.5 * s));
        }
        t.push((i, i, 0.5 * (-2.0 * s - 0.5 * x * x)));
        if i + 1 < n {
            t.push((i, i + 1, 0.5 * s));
        }
    }
    MatrixOperator::from_triplets(n, &t)
}

pub fn schrodinger3d(n: usize) -> Result<MatrixOperator<f64>> {
    let h = 1.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    stencil(
        n,
        3,
        |idx| {
            let r2: f64 = idx.iter().map(|&c| ((c + 1) as f64 * h).powi(2)).sum();
            0.5 * (-6.0 * s - 0.5 * r2)
        },
        0.5 * s,
    )
}

pub fn transport1d(n: usize) -> Result<MatrixOperator<f64>> {
    let h = 1.0 / n as f64;
    let c = 1.0 / (2.0 * h);
    let mut t = Vec::with_capacity(2 * n);
    for i in 0..n {
        t.push((i, (i + n - 1) % n, c));
        t.push((i, (i + 1) % n, -c));
    }
    MatrixOperator::from_triplets(n, &t)
}

pub fn rotation_block(blocks: usize, seed: u64) -> Result<MatrixOperator<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Vec::with_capacity(2 * blocks);
    for k in 0..blocks {
        let w: f64 = rng.gen_range(0.5..=2.0);
        t.push((2 * k, 2 * k + 1, w));
        t.push((2 * k + 1, 2 * k, -w));
    }
    MatrixOperator::from_triplets(2 * blocks, &t)
}
