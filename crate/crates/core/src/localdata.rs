//! Local orbitals, the local centralizer basis and local projector sets.
//!
//! The local group `F` acts diagonally on `V x V`. Its orbits (local
//! orbitals) give 0/1 matrices `A_1..A_R` spanning the centralizer ring of
//! the permutation representation of `F`. A local projector set is a list of
//! matrices `B_1..B_K` written over that basis.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::perm::PermutationGroup;
use crate::scalars::QuadExtScalar;

/// Local matrices are tiny; this only guards against nonsense input.
const LOCAL_CAP: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalOrbital {
    pub index: usize,
    /// Pairs in lexicographic order; the first is the smallest.
    pub pairs: Vec<(usize, usize)>,
    /// Number of pairs in each row.
    pub row_sums: Vec<usize>,
    pub is_diagonal: bool,
}

impl LocalOrbital {
    /// Common row sum, when every row has the same count.
    pub fn suborbit_length(&self) -> Option<usize> {
        let first = *self.row_sums.first()?;
        self.row_sums.iter().all(|&s| s == first).then_some(first)
    }

    pub fn representative(&self) -> (usize, usize) {
        self.pairs[0]
    }
}

#[derive(Clone, Debug)]
pub struct LocalCentralizerBasis {
    degree: usize,
    /// Orbital index of every pair `(u, v)`, stored at `u * degree + v`.
    labels: Vec<usize>,
    orbitals: Vec<LocalOrbital>,
    /// `c[i][j][k]` flattened; `A_i A_j = sum_k c_ij^k A_k`.
    structure: Vec<u64>,
    transitive: bool,
}

impl LocalCentralizerBasis {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.orbitals.len()
    }

    pub fn orbitals(&self) -> &[LocalOrbital] {
        &self.orbitals
    }

    pub fn label(&self, u: usize, v: usize) -> usize {
        self.labels[u * self.degree + v]
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u64 {
        let r = self.rank();
        self.structure[(i * r + j) * r + k]
    }

    /// Suborbit lengths `l_i`; fails for intransitive groups.
    pub fn suborbit_lengths(&self) -> Result<Vec<u64>> {
        if !self.transitive {
            return Err(Error::IntransitiveLocalGroup(self.degree));
        }
        Ok(self
            .orbitals
            .iter()
            .map(|o| o.suborbit_length().expect("constant rows for transitive groups") as u64)
            .collect())
    }

    /// `tr A_i`, the number of diagonal pairs in the orbital.
    pub fn traces(&self) -> Vec<u64> {
        self.orbitals
            .iter()
            .map(|o| o.pairs.iter().filter(|(u, v)| u == v).count() as u64)
            .collect()
    }

    pub fn matrix(&self, i: usize) -> DenseMatrix {
        DenseMatrix::indicator(self.degree, LOCAL_CAP, self.orbitals[i].pairs.iter().copied())
            .expect("local degree within cap")
    }

    /// `sum_i c_i A_i` as a dense matrix.
    pub fn combine(&self, coefficients: &[QuadExtScalar]) -> Result<DenseMatrix> {
        if coefficients.len() != self.rank() {
            return Err(Error::InvalidProjectors(format!(
                "expected {} coefficients, found {}",
                self.rank(),
                coefficients.len()
            )));
        }
        let m = self.degree;
        DenseMatrix::from_fn(m, LOCAL_CAP, |u, v| coefficients[self.label(u, v)].clone())
    }
}

/// Orbitals of `group` on `V x V`, diagonal orbitals first, then by smallest pair.
pub fn compute_local_orbitals(group: &PermutationGroup) -> LocalCentralizerBasis {
    let m = group.degree();
    let unset = usize::MAX;
    let mut raw = vec![unset; m * m];
    let mut found: Vec<Vec<(usize, usize)>> = Vec::new();
    for start in 0..m * m {
        if raw[start] != unset {
            continue;
        }
        let id = found.len();
        raw[start] = id;
        let mut members = vec![(start / m, start % m)];
        let mut k = 0;
        while k < members.len() {
            let (u, v) = members[k];
            for g in group.generators() {
                let (ug, vg) = (g.apply(u), g.apply(v));
                if raw[ug * m + vg] == unset {
                    raw[ug * m + vg] = id;
                    members.push((ug, vg));
                }
            }
            k += 1;
        }
        members.sort_unstable();
        found.push(members);
    }

    // discovery order is already by smallest pair; move diagonal orbitals up front
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by_key(|&i| {
        let diag = found[i][0].0 == found[i][0].1 || found[i].iter().any(|(u, v)| u == v);
        (!diag, found[i][0])
    });
    let mut renumber = vec![0; found.len()];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new;
    }
    let labels: Vec<usize> = raw.iter().map(|&l| renumber[l]).collect();
    let orbitals: Vec<LocalOrbital> = order
        .iter()
        .enumerate()
        .map(|(index, &old)| {
            let pairs = std::mem::take(&mut found[old]);
            let mut row_sums = vec![0; m];
            for &(u, _) in &pairs {
                row_sums[u] += 1;
            }
            let is_diagonal = pairs.iter().any(|(u, v)| u == v);
            LocalOrbital {
                index,
                pairs,
                row_sums,
                is_diagonal,
            }
        })
        .collect();

    let r = orbitals.len();
    let mut structure = vec![0u64; r * r * r];
    for (k, orb) in orbitals.iter().enumerate() {
        let (u, w) = orb.representative();
        for v in 0..m {
            let i = labels[u * m + v];
            let j = labels[v * m + w];
            structure[(i * r + j) * r + k] += 1;
        }
    }

    LocalCentralizerBasis {
        degree: m,
        labels,
        orbitals,
        structure,
        transitive: group.is_transitive(),
    }
}

/// Contents of a projector file, before binding to a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorFile {
    pub discriminant: u64,
    pub coefficients: Vec<Vec<QuadExtScalar>>,
    pub declared_dims: Vec<Option<u64>>,
}

impl FromStr for ProjectorFile {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut d = None;
        let mut k = None;
        let mut rows: Vec<(usize, Vec<QuadExtScalar>)> = Vec::new();
        let mut dims: Vec<(usize, u64)> = Vec::new();
        let index_of = |name: &str, lineno: usize| -> Result<usize> {
            name.strip_prefix('B')
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .map(|i| i - 1)
                .ok_or_else(|| Error::Parse(format!("line {lineno}: bad projector name {name:?}")))
        };
        for (n, line) in text.lines().enumerate() {
            let lineno = n + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {lineno}: expected `key = value`")))?;
            let key = key.trim();
            let value = value.trim();
            if key == "d" {
                d = Some(value.parse::<u64>().map_err(|_| {
                    Error::Parse(format!("line {lineno}: bad discriminant"))
                })?);
            } else if key == "K" {
                k = Some(value.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("line {lineno}: bad projector count"))
                })?);
            } else if let Some(name) = key.strip_prefix("dim ") {
                let i = index_of(name.trim(), lineno)?;
                let dim = value
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad dimension")))?;
                dims.push((i, dim));
            } else {
                let i = index_of(key, lineno)?;
                let coeffs = value
                    .split(',')
                    .map(|c| c.trim().parse::<QuadExtScalar>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
                rows.push((i, coeffs));
            }
        }
        let d = d.ok_or_else(|| Error::Parse("missing `d`".into()))?;
        if !crate::scalars::is_square_free(d) {
            return Err(Error::InvalidDiscriminant(d));
        }
        let k = k.ok_or_else(|| Error::Parse("missing `K`".into()))?;
        let mut coefficients = vec![None; k];
        for (i, row) in rows {
            if i >= k {
                return Err(Error::Parse(format!("B{} exceeds K = {k}", i + 1)));
            }
            if coefficients[i].replace(row).is_some() {
                return Err(Error::Parse(format!("B{} defined twice", i + 1)));
            }
            for c in coefficients[i].as_ref().unwrap() {
                if c.discriminant() != 1 && c.discriminant() != d {
                    return Err(Error::DiscriminantMismatch {
                        left: d,
                        right: c.discriminant(),
                    });
                }
            }
        }
        let coefficients = coefficients
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Parse(format!("B{} missing", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let mut declared_dims = vec![None; k];
        for (i, dim) in dims {
            if i >= k {
                return Err(Error::Parse(format!("dim B{} exceeds K = {k}", i + 1)));
            }
            declared_dims[i] = Some(dim);
        }
        Ok(ProjectorFile {
            discriminant: d,
            coefficients,
            declared_dims,
        })
    }
}

impl fmt::Display for ProjectorFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "d = {}", self.discriminant)?;
        writeln!(f, "K = {}", self.coefficients.len())?;
        for (i, row) in self.coefficients.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "B{} = {}", i + 1, cells.join(", "))?;
        }
        for (i, dim) in self.declared_dims.iter().enumerate() {
            if let Some(dim) = dim {
                writeln!(f, "dim B{} = {dim}", i + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LocalProjector {
    pub coefficients: Vec<QuadExtScalar>,
    pub matrix: DenseMatrix,
    pub declared_dim: Option<u64>,
    /// Dense form supplied by the caller, checked against `matrix`.
    pub provided_dense: Option<DenseMatrix>,
}

#[derive(Clone, Debug)]
pub struct LocalProjectorSet {
    discriminant: u64,
    projectors: Vec<LocalProjector>,
}

impl LocalProjectorSet {
    /// Binds A-basis coefficients to `basis`, rebuilding the dense matrices.
    pub fn from_file(file: &ProjectorFile, basis: &LocalCentralizerBasis) -> Result<Self> {
        if !basis.is_transitive() {
            return Err(Error::IntransitiveLocalGroup(basis.degree()));
        }
        let projectors = file
            .coefficients
            .iter()
            .zip(&file.declared_dims)
            .map(|(coeffs, dim)| {
                Ok(LocalProjector {
                    matrix: basis.combine(coeffs)?,
                    coefficients: coeffs.clone(),
                    declared_dim: *dim,
                    provided_dense: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalProjectorSet {
            discriminant: file.discriminant,
            projectors,
        })
    }

    /// Attaches explicit dense forms to be cross-checked by validation.
    pub fn with_dense(mut self, dense: Vec<DenseMatrix>) -> Result<Self> {
        if dense.len() != self.projectors.len() {
            return Err(Error::InvalidProjectors(format!(
                "{} dense matrices for {} projectors",
                dense.len(),
                self.projectors.len()
            )));
        }
        for (p, m) in self.projectors.iter_mut().zip(dense) {
            p.provided_dense = Some(m);
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn discriminant(&self) -> u64 {
        self.discriminant
    }

    pub fn projectors(&self) -> &[LocalProjector] {
        &self.projectors
    }

    pub fn matrix(&self, i: usize) -> &DenseMatrix {
        &self.projectors[i].matrix
    }

    pub fn matrices(&self) -> Vec<DenseMatrix> {
        self.projectors.iter().map(|p| p.matrix.clone()).collect()
    }

    /// Traces `d_i`, which must be positive integers.
    pub fn dimensions(&self) -> Result<Vec<u64>> {
        self.projectors
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let t = p.matrix.trace();
                t.to_integer()
                    .filter(|n| n.is_positive())
                    .and_then(|n| u64::try_from(n).ok())
                    .ok_or_else(|| {
                        Error::InvalidProjectors(format!("trace of B{} is {t}, not a positive integer", i + 1))
                    })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub(crate) fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "[{mark}] {}", c.name)?;
            } else {
                writeln!(f, "[{mark}] {}: {}", c.name, c.detail)?;
            }
        }
        Ok(())
    }
}

/// Checks that `set` is a complete family of orthogonal invariant idempotents.
pub fn validate_projectors(
    set: &LocalProjectorSet,
    basis: &LocalCentralizerBasis,
    group: &PermutationGroup,
) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    let m = basis.degree();
    let k = set.len();
    for (i, p) in set.projectors().iter().enumerate() {
        report.record(
            format!("B{} coefficient count", i + 1),
            p.coefficients.len() == basis.rank(),
            format!("{} for rank {}", p.coefficients.len(), basis.rank()),
        );
    }
    for i in 0..k {
        for j in 0..k {
            let prod = set.matrix(i).checked_mul(set.matrix(j))?;
            if i == j {
                report.record(
                    format!("B{0}*B{0} = B{0}", i + 1),
                    &prod == set.matrix(i),
                    "",
                );
            } else {
                report.record(
                    format!("B{}*B{} = 0", i + 1, j + 1),
                    prod.is_zero(),
                    "",
                );
            }
        }
    }
    let mut total = DenseMatrix::zeros(m, LOCAL_CAP)?;
    for p in set.projectors() {
        total = total.checked_add(&p.matrix)?;
    }
    report.record("sum of B_i = identity", total.is_identity(), "");
    for (i, p) in set.projectors().iter().enumerate() {
        for (g_index, g) in group.generators().iter().enumerate() {
            report.record(
                format!("B{} commutes with generator {}", i + 1, g_index + 1),
                p.matrix.is_invariant_under(g),
                g.to_string(),
            );
        }
    }
    let mut dim_sum = BigInt::from(0);
    for (i, p) in set.projectors().iter().enumerate() {
        let t = p.matrix.trace();
        let integral = t.to_integer().filter(|n| n.is_positive());
        report.record(
            format!("tr B{} is a positive integer", i + 1),
            integral.is_some(),
            t.to_string(),
        );
        if let Some(n) = &integral {
            dim_sum += n;
        }
        if let Some(declared) = p.declared_dim {
            report.record(
                format!("tr B{} = declared dim {declared}", i + 1),
                integral == Some(BigInt::from(declared)),
                t.to_string(),
            );
        }
        if let Some(dense) = &p.provided_dense {
            report.record(
                format!("B{} matches its dense form", i + 1),
                dense == &p.matrix,
                "",
            );
        }
    }
    report.record(
        "sum of dimensions = degree",
        dim_sum == BigInt::from(m),
        format!("{dim_sum} vs {m}"),
    );
    report.record(
        "K <= R",
        k <= basis.rank(),
        format!("K = {k}, R = {}", basis.rank()),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::perm::Permutation;

    #[test]
    fn octahedral_orbitals() {
        let b = compute_local_orbitals(&fixtures::s4_octahedron().group());
        assert_eq!(b.rank(), 3);
        assert_eq!(b.suborbit_lengths().unwrap(), vec![1, 4, 1]);
        assert!(b.matrix(0).is_identity());
        assert_eq!(b.traces(), vec![6, 0, 0]);
    }

    #[test]
    fn orbitals_partition_and_complete() {
        for spec in [fixtures::s4_octahedron(), fixtures::a5_icosahedron()] {
            let g = spec.group();
            let b = compute_local_orbitals(&g);
            let m = b.degree();
            let total: usize = b.orbitals().iter().map(|o| o.pairs.len()).sum();
            assert_eq!(total, m * m);
            let mut sum = DenseMatrix::zeros(m, 64).unwrap();
            for i in 0..b.rank() {
                sum = sum.checked_add(&b.matrix(i)).unwrap();
                for gen in g.generators() {
                    assert!(b.matrix(i).is_invariant_under(gen));
                }
                assert!(b.orbitals()[i].suborbit_length().is_some());
            }
            assert!(sum.is_all_ones());
            assert_eq!(
                b.suborbit_lengths().unwrap().iter().sum::<u64>(),
                m as u64
            );
        }
    }

    #[test]
    fn structure_constants_match_dense_products() {
        let b = compute_local_orbitals(&fixtures::a5_icosahedron().group());
        let r = b.rank();
        for i in 0..r {
            for j in 0..r {
                let prod = b.matrix(i).checked_mul(&b.matrix(j)).unwrap();
                let coeffs: Vec<QuadExtScalar> = (0..r)
                    .map(|k| QuadExtScalar::from_integer(b.structure_constant(i, j, k) as i64))
                    .collect();
                assert_eq!(prod, b.combine(&coeffs).unwrap());
            }
        }
    }

    #[test]
    fn trivial_group_gives_singletons() {
        let g = PermutationGroup::new(3, vec![]).unwrap();
        let b = compute_local_orbitals(&g);
        assert_eq!(b.rank(), 9);
        assert!(b.orbitals().iter().all(|o| o.pairs.len() == 1));
        assert!(b.orbitals()[..3].iter().all(|o| o.is_diagonal));
        assert!(b.suborbit_lengths().is_err());
        for o in b.orbitals() {
            assert!(o.row_sums.iter().all(|&s| s <= 1));
        }
    }

    #[test]
    fn octahedral_projectors_validate() {
        let spec = fixtures::s4_octahedron();
        let g = spec.group();
        let b = compute_local_orbitals(&g);
        let p = LocalProjectorSet::from_file(&fixtures::s4_octahedron_projectors(), &b).unwrap();
        let report = validate_projectors(&p, &b, &g).unwrap();
        assert!(report.is_ok(), "{report}");
        assert_eq!(p.dimensions().unwrap(), vec![1, 2, 3]);
    }

    #[test]
    fn perturbed_projector_fails_idempotency() {
        let spec = fixtures::s4_octahedron();
        let g = spec.group();
        let b = compute_local_orbitals(&g);
        let mut file = fixtures::s4_octahedron_projectors();
        // B3 = (A1 - A2)/2; use the prefactor 1/3 instead
        for c in file.coefficients[2].iter_mut() {
            *c = c.scale(&num_rational::BigRational::new(2.into(), 3.into()));
        }
        let p = LocalProjectorSet::from_file(&file, &b).unwrap();
        let report = validate_projectors(&p, &b, &g).unwrap();
        assert!(!report.is_ok());
        assert!(report.failures().any(|c| c.name == "B3*B3 = B3"));
    }

    #[test]
    fn dense_form_mismatch_is_reported() {
        let spec = fixtures::s4_octahedron();
        let g = spec.group();
        let b = compute_local_orbitals(&g);
        let p = LocalProjectorSet::from_file(&fixtures::s4_octahedron_projectors(), &b).unwrap();
        let wrong = vec![DenseMatrix::identity(6, 64).unwrap(); 3];
        let mut right = p.matrices();
        let ok = validate_projectors(&p.clone().with_dense(right.clone()).unwrap(), &b, &g).unwrap();
        assert!(ok.is_ok());
        right[0] = wrong[0].clone();
        let bad = validate_projectors(&p.with_dense(right).unwrap(), &b, &g).unwrap();
        assert!(bad.failures().any(|c| c.name == "B1 matches its dense form"));
    }

    #[test]
    fn intransitive_local_group_is_rejected() {
        let g = PermutationGroup::new(
            4,
            vec![Permutation::from_cycles(4, &[vec![0, 1]]).unwrap()],
        )
        .unwrap();
        let b = compute_local_orbitals(&g);
        let file: ProjectorFile = "d = 1\nK = 1\nB1 = 1\n".parse().unwrap();
        assert!(matches!(
            LocalProjectorSet::from_file(&file, &b),
            Err(Error::IntransitiveLocalGroup(4))
        ));
    }

    #[test]
    fn projector_file_round_trip_and_errors() {
        let file = fixtures::a5_icosahedron_projectors();
        let again: ProjectorFile = file.to_string().parse().unwrap();
        assert_eq!(file, again);
        assert!("K = 1\nB1 = 1\n".parse::<ProjectorFile>().is_err());
        assert!("d = 1\nK = 2\nB1 = 1\n".parse::<ProjectorFile>().is_err());
        assert!("d = 4\nK = 1\nB1 = 1\n".parse::<ProjectorFile>().is_err());
        assert!("d = 5\nK = 1\nB1 = 1*sqrt(2)\n".parse::<ProjectorFile>().is_err());
        assert!("d = 1\nK = 1\nB1 = 1\nB1 = 1\n".parse::<ProjectorFile>().is_err());
    }
}
