//! Small dense square matrices over `Q(sqrt(d))`.
//!
//! Products convert both operands to a common-denominator integer form and
//! multiply in `i128` when the entry bounds allow it, falling back to
//! rational arithmetic otherwise. Either way the result is exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalars::QuadExtScalar;

/// Default bound on the dimension of any materialized matrix.
pub const DEFAULT_ORACLE_CAP: u64 = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<QuadExtScalar>,
}

/// `(x + y*sqrt(d)) / denom` entrywise, with `i128` numerators.
pub(crate) struct ScaledMatrix {
    pub dim: usize,
    pub d: u64,
    pub denom: BigInt,
    pub x: Vec<i128>,
    pub y: Vec<i128>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize, cap: u64) -> Result<Self> {
        if dim as u64 > cap {
            return Err(Error::OracleCapExceeded {
                dim: dim as u64,
                cap,
            });
        }
        Ok(DenseMatrix {
            dim,
            entries: vec![QuadExtScalar::zero(); dim * dim],
        })
    }

    pub fn identity(dim: usize, cap: u64) -> Result<Self> {
        let mut m = Self::zeros(dim, cap)?;
        for i in 0..dim {
            m.set(i, i, QuadExtScalar::one());
        }
        Ok(m)
    }

    pub fn from_fn(
        dim: usize,
        cap: u64,
        mut f: impl FnMut(usize, usize) -> QuadExtScalar,
    ) -> Result<Self> {
        let mut m = Self::zeros(dim, cap)?;
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = f(i, j);
            }
        }
        Ok(m)
    }

    /// 0/1 matrix of the given pairs.
    pub fn indicator(dim: usize, cap: u64, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Self::zeros(dim, cap)?;
        for (i, j) in pairs {
            m.set(i, j, QuadExtScalar::one());
        }
        Ok(m)
    }

    /// `P(g)` with `P_{u,v} = 1` iff `u^g = v`.
    pub fn permutation_matrix(g: &Permutation, cap: u64) -> Result<Self> {
        Self::indicator(g.degree(), cap, (0..g.degree()).map(|u| (u, g.apply(u))))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &QuadExtScalar {
        &self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: QuadExtScalar) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[QuadExtScalar] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(QuadExtScalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    pub fn is_all_ones(&self) -> bool {
        self.entries.iter().all(QuadExtScalar::is_one)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> QuadExtScalar {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix {
            dim: self.dim,
            entries,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, c: &QuadExtScalar) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.checked_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(DenseMatrix {
            dim: self.dim,
            entries,
        })
    }

    /// `P(g)^{-1} A P(g)`, i.e. entry `(u^g, v^g)` receives `A_{u,v}`.
    pub fn conjugate_by(&self, g: &Permutation) -> Self {
        let n = self.dim;
        let mut entries = vec![QuadExtScalar::zero(); n * n];
        for u in 0..n {
            let ug = g.apply(u);
            for v in 0..n {
                entries[ug * n + g.apply(v)] = self.entries[u * n + v].clone();
            }
        }
        DenseMatrix { dim: n, entries }
    }

    /// `A_{u^g, v^g} = A_{u,v}` for all `u`, `v`.
    pub fn is_invariant_under(&self, g: &Permutation) -> bool {
        let n = self.dim;
        (0..n).all(|u| {
            let ug = g.apply(u);
            (0..n).all(|v| self.entries[ug * n + g.apply(v)] == self.entries[u * n + v])
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DegreeMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn field(&self) -> Result<u64> {
        let mut d = 1;
        for e in &self.entries {
            let ed = e.discriminant();
            if ed != 1 {
                if d != 1 && d != ed {
                    return Err(Error::DiscriminantMismatch { left: d, right: ed });
                }
                d = ed;
            }
        }
        Ok(d)
    }

    pub(crate) fn to_scaled(&self) -> Result<Option<ScaledMatrix>> {
        let d = self.field()?;
        let mut denom = BigInt::one();
        for e in &self.entries {
            denom = denom.lcm(e.rational_part().denom());
            denom = denom.lcm(e.surd_part().denom());
        }
        let mut x = Vec::with_capacity(self.entries.len());
        let mut y = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let sx = e.rational_part().numer() * (&denom / e.rational_part().denom());
            let sy = e.surd_part().numer() * (&denom / e.surd_part().denom());
            match (sx.to_i128(), sy.to_i128()) {
                (Some(a), Some(b)) => {
                    x.push(a);
                    y.push(b);
                }
                _ => return Ok(None),
            }
        }
        Ok(Some(ScaledMatrix {
            dim: self.dim,
            d,
            denom,
            x,
            y,
        }))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let d = match (self.field()?, other.field()?) {
            (1, d) | (d, 1) => d,
            (l, r) if l == r => l,
            (l, r) => return Err(Error::DiscriminantMismatch { left: l, right: r }),
        };
        if let (Some(a), Some(b)) = (self.to_scaled()?, other.to_scaled()?) {
            if let Some(m) = scaled_product(&a, &b, d) {
                return Ok(m);
            }
        }
        self.mul_exact(other)
    }

    fn mul_exact(&self, other: &Self) -> Result<Self> {
        let n = self.dim;
        let mut entries = vec![QuadExtScalar::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        let t = a.checked_mul(b)?;
                        entries[i * n + j] += &t;
                    }
                }
            }
        }
        Ok(DenseMatrix { dim: n, entries })
    }
}

fn max_abs(v: &[i128]) -> u128 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

fn scaled_product(a: &ScaledMatrix, b: &ScaledMatrix, d: u64) -> Option<DenseMatrix> {
    let n = a.dim;
    let bound_a = max_abs(&a.x).max(max_abs(&a.y));
    let bound_b = max_abs(&b.x).max(max_abs(&b.y));
    // every accumulated sum is bounded by n * (1 + d) * |a| * |b|
    let limit = bound_a
        .checked_mul(bound_b)?
        .checked_mul(n as u128)?
        .checked_mul(d as u128 + 1)?;
    if limit > i128::MAX as u128 / 2 {
        return None;
    }
    let di = d as i128;
    let mut xx = vec![0i128; n * n];
    let mut yy = vec![0i128; n * n];
    for i in 0..n {
        for k in 0..n {
            let (ax, ay) = (a.x[i * n + k], a.y[i * n + k]);
            if ax == 0 && ay == 0 {
                continue;
            }
            let row = k * n;
            for j in 0..n {
                let (bx, by) = (b.x[row + j], b.y[row + j]);
                xx[i * n + j] += ax * bx + di * ay * by;
                yy[i * n + j] += ax * by + ay * bx;
            }
        }
    }
    let denom = &a.denom * &b.denom;
    let entries = xx
        .into_iter()
        .zip(yy)
        .map(|(x, y)| {
            let ra = BigRational::new(BigInt::from(x), denom.clone());
            let rb = BigRational::new(BigInt::from(y), denom.clone());
            if rb.is_zero() {
                QuadExtScalar::rational(ra)
            } else {
                QuadExtScalar::new(ra, rb, d).expect("field validated")
            }
        })
        .collect();
    Some(DenseMatrix { dim: n, entries })
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix[{}]", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
