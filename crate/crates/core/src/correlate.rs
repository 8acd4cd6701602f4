//! Invariant inner products `<Φ|B̃_k|Ψ>` for sparse product-basis vectors.
//!
//! The value is `sum_{m,n} conj(φ_m) ψ_n sum_{l in kG} prod_j (B_{l_j})_{m_j n_j}`,
//! evaluated per orbit member without forming any `M^N`-sized object.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localdata::LocalProjectorSet;
use crate::maporbits::{orbit_of_mapping, OrbitTable};
use crate::perm::PermutationGroup;
use crate::scalars::QuadExtScalar;

/// Involution applied to the coefficients of the bra.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Conjugation {
    /// Real fields: the bilinear form.
    #[default]
    Identity,
    /// `a + b√d -> a - b√d`.
    Galois,
}

impl Conjugation {
    fn apply(self, c: &QuadExtScalar) -> QuadExtScalar {
        match self {
            Conjugation::Identity => c.clone(),
            Conjugation::Galois => c.conjugate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductStateVector {
    positions: usize,
    local_degree: usize,
    /// Coefficient and 0-based local indices, one entry per tuple.
    terms: Vec<(QuadExtScalar, Vec<u32>)>,
}

impl ProductStateVector {
    pub fn new(
        positions: usize,
        local_degree: usize,
        terms: Vec<(QuadExtScalar, Vec<u32>)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for (_, t) in &terms {
            if t.len() != positions {
                return Err(Error::InvalidVector(format!(
                    "tuple of length {} for {positions} positions",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&i| i as usize >= local_degree) {
                return Err(Error::InvalidVector(format!(
                    "index {} outside 1..{local_degree}",
                    bad + 1
                )));
            }
            if !seen.insert(t.clone()) {
                return Err(Error::InvalidVector(format!("repeated tuple {}", one_based(t))));
            }
        }
        Ok(ProductStateVector {
            positions,
            local_degree,
            terms,
        })
    }

    pub fn terms(&self) -> &[(QuadExtScalar, Vec<u32>)] {
        &self.terms
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn local_degree(&self) -> usize {
        self.local_degree
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lines `coeff ; i1,...,iN` with 1-based indices; `#` starts a comment.
    pub fn parse(text: &str, positions: usize, local_degree: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| Error::InvalidVector(format!("line {}: {why}", n + 1));
            let (coeff, tuple) = line.split_once(';').ok_or_else(|| bad("expected `coeff ; i1,...,iN`"))?;
            let coeff: QuadExtScalar = coeff.trim().parse().map_err(|e| bad(&format!("{e}")))?;
            let tuple = tuple
                .split(',')
                .map(|t| match t.trim().parse::<u32>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(bad(&format!("bad index {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push((coeff, tuple));
        }
        Self::new(positions, local_degree, terms)
    }

    /// Sum of two vectors over the same space.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        for (c, t) in &other.terms {
            match terms.iter_mut().find(|(_, u)| u == t) {
                Some((d, _)) => *d = d.checked_add(c)?,
                None => terms.push((c.clone(), t.clone())),
            }
        }
        terms.retain(|(c, _)| !c.is_zero());
        Self::new(self.positions, self.local_degree, terms)
    }

    pub fn scale(&self, s: &QuadExtScalar) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|(c, t)| Ok((c.checked_mul(s)?, t.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductStateVector {
            terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
            ..self.clone()
        })
    }
}

fn one_based(t: &[u32]) -> String {
    t.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ProductStateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, t) in &self.terms {
            writeln!(f, "{c} ; {}", one_based(t))?;
        }
        Ok(())
    }
}

/// `<Φ|Ψ>` computed directly.
pub fn direct_inner_product(
    phi: &ProductStateVector,
    psi: &ProductStateVector,
    conjugation: Conjugation,
) -> Result<QuadExtScalar> {
    let mut total = QuadExtScalar::zero();
    for (a, s) in &phi.terms {
        for (b, t) in &psi.terms {
            if s == t {
                total = total.checked_add(&conjugation.apply(a).checked_mul(b)?)?;
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationRow {
    /// 1-based projector number.
    pub orbit: usize,
    pub dimension: u128,
    pub value: QuadExtScalar,
}

/// Evaluates inner products against the projectors of one orbit table.
pub struct Correlator<'a> {
    group: &'a PermutationGroup,
    table: &'a OrbitTable,
    local: &'a LocalProjectorSet,
    dims: Vec<u64>,
    pub conjugation: Conjugation,
}

impl<'a> Correlator<'a> {
    pub fn new(
        group: &'a PermutationGroup,
        table: &'a OrbitTable,
        local: &'a LocalProjectorSet,
    ) -> Result<Self> {
        if table.symbols() as usize != local.len() {
            return Err(Error::SymbolCountMismatch {
                table: table.symbols(),
                local: local.len(),
            });
        }
        Ok(Correlator {
            group,
            table,
            local,
            dims: local.dimensions()?,
            conjugation: Conjugation::Identity,
        })
    }

    fn check(&self, v: &ProductStateVector) -> Result<()> {
        let m = self.local.matrix(0).dim();
        if v.positions != self.table.positions() || v.local_degree != m {
            return Err(Error::InvalidVector(format!(
                "vector over {}^{} used with projectors over {}^{}",
                v.local_degree,
                v.positions,
                m,
                self.table.positions()
            )));
        }
        Ok(())
    }

    /// `<Φ|B̃_k|Ψ>` for the orbit with index `k` (0-based).
    pub fn inner_product(
        &self,
        phi: &ProductStateVector,
        psi: &ProductStateVector,
        k: usize,
    ) -> Result<QuadExtScalar> {
        self.check(phi)?;
        self.check(psi)?;
        let space = self.table.space();
        let members = orbit_of_mapping(self.group, space, self.table.get(k).representative).members;
        let members: Vec<Vec<u32>> = members.iter().map(|&c| space.decode(c)).collect();
        let symbols = self.local.len();
        let n = self.table.positions();
        let mut total = QuadExtScalar::zero();
        let mut factors = vec![QuadExtScalar::zero(); n * symbols];
        for (a, s) in &phi.terms {
            let a = self.conjugation.apply(a);
            for (b, t) in &psi.terms {
                for j in 0..n {
                    for sym in 0..symbols {
                        factors[j * symbols + sym] =
                            self.local.matrix(sym).get(s[j] as usize, t[j] as usize).clone();
                    }
                }
                let mut sum = QuadExtScalar::zero();
                for l in &members {
                    let mut prod = QuadExtScalar::one();
                    for (j, &sym) in l.iter().enumerate() {
                        let f = &factors[j * symbols + sym as usize];
                        if f.is_zero() {
                            prod = QuadExtScalar::zero();
                            break;
                        }
                        prod = prod.checked_mul(f)?;
                    }
                    sum = sum.checked_add(&prod)?;
                }
                if !sum.is_zero() {
                    total = total.checked_add(&a.checked_mul(b)?.checked_mul(&sum)?)?;
                }
            }
        }
        Ok(total)
    }

    /// One row per projector in canonical orbit order.
    pub fn correlation_table(
        &self,
        phi: &ProductStateVector,
        psi: &ProductStateVector,
    ) -> Result<Vec<CorrelationRow>> {
        (0..self.table.len())
            .into_par_iter()
            .map(|k| {
                let o = self.table.get(k);
                let mut dimension = o.size as u128;
                for d in self.table.space().decode(o.representative) {
                    dimension *= self.dims[d as usize] as u128;
                }
                Ok(CorrelationRow {
                    orbit: k + 1,
                    dimension,
                    value: self.inner_product(phi, psi, k)?,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localdata::compute_local_orbitals;
    use crate::maporbits::{enumerate_orbits, EnumerateOptions};

    struct Setup {
        group: PermutationGroup,
        table: OrbitTable,
        set: LocalProjectorSet,
    }

    fn setup(space: crate::perm::GroupSpec, local: crate::perm::GroupSpec, prj: crate::localdata::ProjectorFile) -> Setup {
        let group = space.group();
        let basis = compute_local_orbitals(&local.group());
        let set = LocalProjectorSet::from_file(&prj, &basis).unwrap();
        let table = enumerate_orbits(&group, set.len() as u32, &EnumerateOptions::default()).unwrap();
        Setup { group, table, set }
    }

    #[test]
    fn vector_file_round_trip_and_errors() {
        let v = ProductStateVector::parse("1/2 ; 1,2\n# c\n1/3*sqrt(5) ; 2,2\n", 2, 3).unwrap();
        assert_eq!(v.terms().len(), 2);
        assert_eq!(ProductStateVector::parse(&v.to_string(), 2, 3).unwrap(), v);
        assert!(ProductStateVector::parse("1 ; 1,2,3", 2, 3).is_err());
        assert!(ProductStateVector::parse("1 ; 1,4", 2, 3).is_err());
        assert!(ProductStateVector::parse("1 ; 1,0", 2, 3).is_err());
        assert!(ProductStateVector::parse("1 ; 1,1\n2 ; 1,1", 2, 3).is_err());
        assert!(ProductStateVector::parse("1 1,1", 2, 3).is_err());
    }

    #[test]
    fn basis_tuple_completeness() {
        let s = setup(fixtures::s2(), fixtures::s3(), fixtures::s3_projectors());
        let c = Correlator::new(&s.group, &s.table, &s.set).unwrap();
        let v = ProductStateVector::parse("1 ; 2,3", 2, 3).unwrap();
        let rows = c.correlation_table(&v, &v).unwrap();
        let sum = rows.iter().fold(QuadExtScalar::zero(), |a, r| &a + &r.value);
        assert!(sum.is_one());
        assert!(rows.iter().all(|r| r.value.is_nonnegative()));
    }

    #[test]
    fn trivial_orbit_on_octahedral_local() {
        let s = setup(fixtures::a5_icosahedron(), fixtures::s4_octahedron(), fixtures::s4_octahedron_projectors());
        let c = Correlator::new(&s.group, &s.table, &s.set).unwrap();
        let v = ProductStateVector::parse("1 ; 1,2,3,4,5,6,1,2,3,4,5,6", 12, 6).unwrap();
        let expected = QuadExtScalar::rational(num_rational::BigRational::new(1.into(), 6i64.pow(12).into()));
        assert_eq!(c.inner_product(&v, &v, 0).unwrap(), expected);
    }

    #[test]
    fn empty_vector_gives_zeros() {
        let s = setup(fixtures::s2(), fixtures::s2(), fixtures::s2_projectors());
        let c = Correlator::new(&s.group, &s.table, &s.set).unwrap();
        let empty = ProductStateVector::new(2, 2, vec![]).unwrap();
        let v = ProductStateVector::parse("1 ; 1,2", 2, 2).unwrap();
        assert!(c.correlation_table(&empty, &v).unwrap().iter().all(|r| r.value.is_zero()));
    }

    #[test]
    fn sesquilinearity_with_galois_conjugation() {
        let s = setup(fixtures::s2(), fixtures::a5_icosahedron(), fixtures::a5_icosahedron_projectors());
        let mut c = Correlator::new(&s.group, &s.table, &s.set).unwrap();
        c.conjugation = Conjugation::Galois;
        let phi = ProductStateVector::parse("1+1*sqrt(5) ; 1,2\n2 ; 3,7", 2, 12).unwrap();
        let psi = ProductStateVector::parse("1/2*sqrt(5) ; 2,1\n-1 ; 7,8", 2, 12).unwrap();
        let chi = ProductStateVector::parse("3 ; 1,1", 2, 12).unwrap();
        let a: QuadExtScalar = "2+1*sqrt(5)".parse().unwrap();
        for k in 0..s.table.len() {
            let lhs = c.inner_product(&phi.scale(&a).unwrap(), &psi.checked_add(&chi).unwrap(), k).unwrap();
            let rhs = &a.conjugate()
                * &(&c.inner_product(&phi, &psi, k).unwrap() + &c.inner_product(&phi, &chi, k).unwrap());
            assert_eq!(lhs, rhs);
        }
        let total = c
            .correlation_table(&phi, &psi)
            .unwrap()
            .into_iter()
            .fold(QuadExtScalar::zero(), |acc, r| &acc + &r.value);
        assert_eq!(total, direct_inner_product(&phi, &psi, Conjugation::Galois).unwrap());
    }

    #[test]
    fn mismatched_vector_is_rejected() {
        let s = setup(fixtures::s2(), fixtures::s2(), fixtures::s2_projectors());
        let c = Correlator::new(&s.group, &s.table, &s.set).unwrap();
        let v = ProductStateVector::parse("1 ; 1,2,1", 3, 2).unwrap();
        assert!(c.inner_product(&v, &v, 0).is_err());
    }
}
