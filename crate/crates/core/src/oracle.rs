//! Brute-force ground truth for small wreath products.
//!
//! Points of `V^X` are coded base `M` with position 1 least significant, the
//! same convention as mapping codes. Everything here is dense and exact, and
//! bounded by an oracle cap on the number of points.

use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::dense::{DenseMatrix, ScaledMatrix, DEFAULT_ORACLE_CAP};
use crate::error::{Error, Result};
use crate::localdata::{
    compute_local_orbitals, CheckOutcome, LocalProjectorSet, ProjectorFile, ValidationReport,
};
use crate::maporbits::{burnside_count, enumerate_orbits, EnumerateOptions, MappingSpace};
use crate::perm::{enumerate_group, GroupSpec, Permutation, PermutationGroup, DEFAULT_ELEMENT_CAP};
use crate::scalars::QuadExtScalar;
use crate::tensorpoly::{Alphabet, OrbitPolynomial, ProductTable, TensorPolynomial};

pub use crate::wreathring::wreath_order_formula;

/// One generator of `F wr G` as a map on point codes.
#[derive(Clone, Debug)]
enum WreathGenerator {
    /// `f` acting on the digit at one coordinate.
    Base { f: Vec<u32>, coordinate: usize },
    /// `v'_{i^g} = v_i`.
    Complement { g: Vec<u32> },
}

struct WreathAction {
    local_degree: u64,
    positions: usize,
    points: u64,
    generators: Vec<WreathGenerator>,
}

impl WreathAction {
    fn new(local: &PermutationGroup, space: &PermutationGroup) -> Result<Self> {
        let m = local.degree() as u64;
        let n = space.degree();
        let points = (0..n)
            .try_fold(1u64, |acc, _| acc.checked_mul(m))
            .ok_or(Error::Overflow("wreath degree"))?;
        let mut generators = Vec::new();
        for orbit in space.point_orbits() {
            for f in local.generators() {
                generators.push(WreathGenerator::Base {
                    f: f.images().to_vec(),
                    coordinate: orbit[0],
                });
            }
        }
        for g in space.generators() {
            generators.push(WreathGenerator::Complement {
                g: g.images().to_vec(),
            });
        }
        Ok(WreathAction {
            local_degree: m,
            positions: n,
            points,
            generators,
        })
    }

    fn image(&self, gen: &WreathGenerator, point: u64) -> u64 {
        let m = self.local_degree;
        match gen {
            WreathGenerator::Base { f, coordinate } => {
                let p = m.pow(*coordinate as u32);
                let d = point / p % m;
                point - d * p + f[d as usize] as u64 * p
            }
            WreathGenerator::Complement { g } => {
                let mut code = point;
                let mut image = 0;
                for &target in g {
                    image += code % m * m.pow(target);
                    code /= m;
                }
                image
            }
        }
    }
}

/// Generators of `F wr G` on `V^X` as explicit permutations.
pub fn build_wreath_generators(
    local: &PermutationGroup,
    space: &PermutationGroup,
    cap: u64,
) -> Result<Vec<Permutation>> {
    let action = WreathAction::new(local, space)?;
    if action.points > cap {
        return Err(Error::OracleCapExceeded {
            dim: action.points,
            cap,
        });
    }
    action
        .generators
        .iter()
        .map(|gen| {
            let images = (0..action.points)
                .map(|p| action.image(gen, p) as u32)
                .collect();
            Permutation::from_images(images)
        })
        .collect()
}

/// Writes the wreath generators in the group file format without
/// materializing them; needs one bit per point.
pub fn emit_wreath_generators<W: Write>(
    mut w: W,
    local: &GroupSpec,
    space: &GroupSpec,
    memory_budget: u64,
) -> Result<usize> {
    let (lg, sg) = (local.group(), space.group());
    let action = WreathAction::new(&lg, &sg)?;
    let needed = action.points.div_ceil(8);
    if needed > memory_budget {
        return Err(Error::BudgetExceeded {
            symbols: action.local_degree as u32,
            positions: action.positions,
            budget: memory_budget,
        });
    }
    let mut g = lg.clone();
    let mut s = sg.clone();
    let order = match (g.enumerate(DEFAULT_ELEMENT_CAP), s.enumerate(DEFAULT_ELEMENT_CAP)) {
        (Ok(a), Ok(b)) => wreath_order_formula(a.len() as u64, action.positions, b.len() as u64),
        _ => "unknown".into(),
    };
    writeln!(w, "name = \"{}_wr_{}\"", local.name, space.name)?;
    writeln!(w, "points = {}", action.points)?;
    writeln!(w, "size = \"{order}\"")?;
    let mut seen = vec![0u64; action.points.div_ceil(64) as usize];
    for gen in &action.generators {
        seen.iter_mut().for_each(|x| *x = 0);
        let mut wrote = false;
        for start in 0..action.points {
            if seen[(start >> 6) as usize] >> (start & 63) & 1 == 1 {
                continue;
            }
            let mut next = action.image(gen, start);
            if next == start {
                continue;
            }
            write!(w, "({}", start + 1)?;
            seen[(start >> 6) as usize] |= 1 << (start & 63);
            while next != start {
                write!(w, ",{}", next + 1)?;
                seen[(next >> 6) as usize] |= 1 << (next & 63);
                next = action.image(gen, next);
            }
            write!(w, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(w, "()")?;
        }
        writeln!(w)?;
    }
    Ok(action.generators.len())
}

/// Orbits of a group on ordered pairs of points.
#[derive(Clone, Debug)]
pub struct PairOrbitals {
    degree: usize,
    /// Orbital index of `(u, v)` at `u * degree + v`, numbered by first pair.
    labels: Vec<u32>,
    count: usize,
}

impl PairOrbitals {
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn label(&self, u: usize, v: usize) -> usize {
        self.labels[u * self.degree + v] as usize
    }

    pub fn matrix(&self, i: usize, cap: u64) -> Result<DenseMatrix> {
        let n = self.degree;
        DenseMatrix::indicator(
            n,
            cap,
            (0..n * n)
                .filter(|&k| self.labels[k] as usize == i)
                .map(|k| (k / n, k % n)),
        )
    }

    /// Number of pairs in each row of orbital `i`.
    pub fn row_sums(&self, i: usize) -> Vec<usize> {
        let n = self.degree;
        (0..n)
            .map(|u| (0..n).filter(|&v| self.label(u, v) == i).count())
            .collect()
    }
}

/// Closes every pair under the generators.
pub fn pair_orbitals_bruteforce(generators: &[Permutation], degree: usize, cap: u64) -> Result<PairOrbitals> {
    if degree as u64 > cap {
        return Err(Error::OracleCapExceeded {
            dim: degree as u64,
            cap,
        });
    }
    let unset = u32::MAX;
    let mut labels = vec![unset; degree * degree];
    let mut count = 0u32;
    let mut stack = Vec::new();
    for start in 0..degree * degree {
        if labels[start] != unset {
            continue;
        }
        labels[start] = count;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (u, v) = (k / degree, k % degree);
            for g in generators {
                let image = g.apply(u) * degree + g.apply(v);
                if labels[image] == unset {
                    labels[image] = count;
                    stack.push(image);
                }
            }
        }
        count += 1;
    }
    Ok(PairOrbitals {
        degree,
        labels,
        count: count as usize,
    })
}

/// `sum_m c_m ⊗_j S_{m_j}` as a dense matrix on `M^N` points.
pub fn materialize(p: &TensorPolynomial, local: &[DenseMatrix], cap: u64) -> Result<DenseMatrix> {
    if local.len() != p.symbols() as usize {
        return Err(Error::AlphabetMismatch(format!(
            "{} local matrices for {} symbols",
            local.len(),
            p.symbols()
        )));
    }
    let m = local.first().map_or(1, |a| a.dim());
    let n = p.positions();
    let dim = (0..n)
        .try_fold(1u64, |acc, _| acc.checked_mul(m as u64))
        .filter(|&d| d <= cap)
        .ok_or(Error::OracleCapExceeded {
            dim: (m as u64).saturating_pow(n as u32),
            cap,
        })? as usize;
    let mut out = DenseMatrix::zeros(dim, cap)?;
    for (mono, c) in p.terms() {
        // Kronecker product built up from the most significant position.
        let mut block = vec![c.clone()];
        let mut size = 1;
        for &s in mono.symbols().iter().rev() {
            let a = &local[s as usize];
            let next_size = size * m;
            let mut next = vec![QuadExtScalar::zero(); next_size * next_size];
            for bu in 0..size {
                for bv in 0..size {
                    let b = &block[bu * size + bv];
                    if b.is_zero() {
                        continue;
                    }
                    for au in 0..m {
                        for av in 0..m {
                            let e = a.get(au, av);
                            if !e.is_zero() {
                                next[(bu * m + au) * next_size + bv * m + av] = b.checked_mul(e)?;
                            }
                        }
                    }
                }
            }
            block = next;
            size = next_size;
        }
        for (k, v) in block.into_iter().enumerate() {
            if !v.is_zero() {
                let (u, w) = (k / dim, k % dim);
                let cur = out.get(u, w).checked_add(&v)?;
                out.set(u, w, cur);
            }
        }
    }
    Ok(out)
}

/// `(1/|W|) sum_w χ(w) χ(w^{-1})` with `χ(w) = tr(P(w) B)`.
pub fn character_norm(elements: &[Permutation], b: &DenseMatrix) -> Result<QuadExtScalar> {
    if let Some(s) = b.to_scaled()? {
        if let Some(norm) = scaled_character_norm(elements, &s) {
            return norm;
        }
    }
    let n = b.dim();
    let mut total = QuadExtScalar::zero();
    for w in elements {
        let mut a = QuadExtScalar::zero();
        let mut c = QuadExtScalar::zero();
        for u in 0..n {
            let uw = w.apply(u);
            a = a.checked_add(b.get(uw, u))?;
            c = c.checked_add(b.get(u, uw))?;
        }
        total = total.checked_add(&a.checked_mul(&c)?)?;
    }
    total.checked_div(&QuadExtScalar::from(elements.len() as i64))
}

/// Integer fast path; `None` on overflow.
fn scaled_character_norm(elements: &[Permutation], s: &ScaledMatrix) -> Option<Result<QuadExtScalar>> {
    let n = s.dim;
    let d = s.d as i128;
    let mut sum_x: i128 = 0;
    let mut sum_y: i128 = 0;
    for w in elements {
        let (mut ax, mut ay, mut bx, mut by) = (0i128, 0i128, 0i128, 0i128);
        for u in 0..n {
            let uw = w.apply(u);
            ax = ax.checked_add(s.x[uw * n + u])?;
            ay = ay.checked_add(s.y[uw * n + u])?;
            bx = bx.checked_add(s.x[u * n + uw])?;
            by = by.checked_add(s.y[u * n + uw])?;
        }
        let x = ax.checked_mul(bx)?.checked_add(d.checked_mul(ay)?.checked_mul(by)?)?;
        let y = ax.checked_mul(by)?.checked_add(ay.checked_mul(bx)?)?;
        sum_x = sum_x.checked_add(x)?;
        sum_y = sum_y.checked_add(y)?;
    }
    let scale = &s.denom * &s.denom * BigInt::from(elements.len());
    Some(QuadExtScalar::new(
        BigRational::new(sum_x.into(), scale.clone()),
        BigRational::new(sum_y.into(), scale),
        s.d,
    ))
}

/// A small instance: local group `F` on `V`, position group `G` on `X`.
#[derive(Clone, Debug)]
pub struct OracleInstance {
    pub name: String,
    pub local: GroupSpec,
    pub space: GroupSpec,
    pub projectors: ProjectorFile,
}

/// The instances the verification suite runs by default.
pub fn standard_instances() -> Vec<OracleInstance> {
    use crate::fixtures as f;
    let make = |name: &str, local: GroupSpec, space: GroupSpec, prj: ProjectorFile| OracleInstance {
        name: name.into(),
        local,
        space,
        projectors: prj,
    };
    vec![
        make("S2 wr S2", f::s2(), f::s2(), f::s2_projectors()),
        make("S2 wr S3", f::s2(), f::s3(), f::s2_projectors()),
        make("S3 wr S2", f::s3(), f::s2(), f::s3_projectors()),
        make("S3 wr S3", f::s3(), f::s3(), f::s3_projectors()),
        make("S4(oct) wr S2", f::s4_octahedron(), f::s2(), f::s4_octahedron_projectors()),
        make("A5(ico) wr S2", f::a5_icosahedron(), f::s2(), f::a5_icosahedron_projectors()),
    ]
}

/// Dense objects of one instance, kept for callers that check further identities.
pub struct OracleData {
    pub degree: usize,
    pub generators: Vec<Permutation>,
    pub elements: Vec<Permutation>,
    pub basis: Vec<DenseMatrix>,
    pub projectors: Vec<DenseMatrix>,
    pub projector_polynomials: Vec<TensorPolynomial>,
    pub local_projectors: LocalProjectorSet,
    pub space: PermutationGroup,
    pub mapping_space: MappingSpace,
}

/// Builds every dense object of `instance` and checks it against the symbolic results.
pub fn verify_instance(instance: &OracleInstance, cap: u64) -> Result<(ValidationReport, OracleData)> {
    let mut report = ValidationReport::default();
    let local = enumerate_group(instance.local.points, &instance.local.generators, DEFAULT_ELEMENT_CAP)?;
    let space = enumerate_group(instance.space.points, &instance.space.generators, DEFAULT_ELEMENT_CAP)?;
    let local_basis = compute_local_orbitals(&local);
    let local_set = LocalProjectorSet::from_file(&instance.projectors, &local_basis)?;
    let generators = build_wreath_generators(&local, &space, cap)?;
    let degree = generators.first().map_or(1, |g| g.degree());
    let wreath = enumerate_group(degree, &generators, DEFAULT_ELEMENT_CAP)?;
    let elements = wreath.elements().unwrap().to_vec();

    let expected_order = local.order().unwrap().pow(space.degree() as u32) * space.order().unwrap();
    report.record(
        "wreath group order",
        elements.len() as u64 == expected_order,
        format!(
            "{} vs {}",
            elements.len(),
            wreath_order_formula(local.order().unwrap(), space.degree(), space.order().unwrap())
        ),
    );

    let a_table = enumerate_orbits(&space, local_basis.rank() as u32, &EnumerateOptions::default())?;
    let a_space = a_table.space().clone();
    let a_local: Vec<DenseMatrix> = (0..local_basis.rank()).map(|i| local_basis.matrix(i)).collect();
    let a_polys: Vec<TensorPolynomial> = a_table
        .orbits()
        .iter()
        .map(|o| {
            OrbitPolynomial {
                alphabet: Alphabet::A,
                representative: o.representative,
            }
            .expand(&space, &a_space)
        })
        .collect();
    let basis = a_polys
        .iter()
        .map(|p| materialize(p, &a_local, cap))
        .collect::<Result<Vec<_>>>()?;

    // orbital counts
    let orbitals = pair_orbitals_bruteforce(&generators, degree, cap)?;
    let burnside = burnside_count(&space, local_basis.rank() as u32)?;
    report.record(
        "pair orbitals = mapping orbits = orbit-counting lemma",
        orbitals.count() == a_table.len() && burnside == a_table.len().into(),
        format!("{} / {} / {}", orbitals.count(), a_table.len(), burnside),
    );

    // materialized basis against brute-force orbitals, as sets
    let mut matched = vec![false; orbitals.count()];
    let mut all_match = basis.len() == orbitals.count();
    for b in &basis {
        let first = (0..degree * degree).find(|&k| !b.get(k / degree, k % degree).is_zero());
        let Some(k) = first else {
            all_match = false;
            continue;
        };
        let label = orbitals.label(k / degree, k % degree);
        if matched[label] || *b != orbitals.matrix(label, cap)? {
            all_match = false;
        }
        matched[label] = true;
    }
    report.record("materialized basis = brute-force orbital matrices", all_match, "");

    // invariance and completeness of the basis
    let bad_invariance: Vec<String> = basis
        .iter()
        .enumerate()
        .flat_map(|(r, b)| {
            generators
                .iter()
                .enumerate()
                .filter(|(_, g)| !b.is_invariant_under(g))
                .map(move |(gi, _)| format!("A~{} under generator {}", r + 1, gi + 1))
        })
        .collect();
    report.record("basis invariance", bad_invariance.is_empty(), bad_invariance.join(", "));
    let mut total = DenseMatrix::zeros(degree, cap)?;
    for b in &basis {
        total = total.checked_add(b)?;
    }
    report.record("sum of basis = all-ones", total.is_all_ones(), "");

    // mixed-product law on a few basis pairs
    let table = ProductTable::from_structure_constants(&local_basis);
    let few = basis.len().min(4);
    let mut law_ok = true;
    for i in 0..few {
        for j in 0..few {
            let symbolic = materialize(&a_polys[i].multiply(&a_polys[j], &table)?, &a_local, cap)?;
            if symbolic != basis[i].checked_mul(&basis[j])? {
                law_ok = false;
            }
        }
    }
    report.record("mixed-product law", law_ok, format!("{} pairs", few * few));

    // projectors
    let b_table = enumerate_orbits(&space, local_set.len() as u32, &EnumerateOptions::default())?;
    let b_space = b_table.space().clone();
    let b_local = local_set.matrices();
    let dims = local_set.dimensions()?;
    let b_polys: Vec<TensorPolynomial> = b_table
        .orbits()
        .iter()
        .map(|o| {
            OrbitPolynomial {
                alphabet: Alphabet::B,
                representative: o.representative,
            }
            .expand(&space, &b_space)
        })
        .collect();
    let projectors = b_polys
        .iter()
        .map(|p| materialize(p, &b_local, cap))
        .collect::<Result<Vec<_>>>()?;

    let mut idem = Vec::new();
    let mut orth = Vec::new();
    for (i, p) in projectors.iter().enumerate() {
        for (j, q) in projectors.iter().enumerate() {
            let prod = p.checked_mul(q)?;
            if i == j && prod != *p {
                idem.push(format!("B~{}", i + 1));
            }
            if i != j && !prod.is_zero() {
                orth.push(format!("B~{} B~{}", i + 1, j + 1));
            }
        }
    }
    report.record("idempotency", idem.is_empty(), idem.join(", "));
    report.record("orthogonality", orth.is_empty(), orth.join(", "));
    let mut total = DenseMatrix::zeros(degree, cap)?;
    for p in &projectors {
        total = total.checked_add(p)?;
    }
    report.record("sum of projectors = identity", total.is_identity(), "");

    let bad_invariance: Vec<String> = projectors
        .iter()
        .enumerate()
        .flat_map(|(k, b)| {
            generators
                .iter()
                .enumerate()
                .filter(|(_, g)| !b.is_invariant_under(g))
                .map(move |(gi, _)| format!("B~{} under generator {}", k + 1, gi + 1))
        })
        .collect();
    report.record("projector invariance", bad_invariance.is_empty(), bad_invariance.join(", "));

    let mut norms = Vec::new();
    for p in &projectors {
        norms.push(character_norm(&elements, p)?);
    }
    let reducible: Vec<String> = norms
        .iter()
        .enumerate()
        .filter(|(_, n)| !n.is_one())
        .map(|(k, n)| format!("B~{} has norm {n}", k + 1))
        .collect();
    report.record(
        "irreducibility (character norm 1)",
        reducible.is_empty(),
        if reducible.is_empty() {
            format!("{} projectors, |W| = {}", norms.len(), elements.len())
        } else {
            reducible.join(", ")
        },
    );

    let mut trace_ok = true;
    for (p, dense) in b_polys.iter().zip(&projectors) {
        if p.trace(&dims)? != dense.trace() {
            trace_ok = false;
        }
    }
    report.record("projector dimension = dense trace", trace_ok, "");

    Ok((
        report,
        OracleData {
            degree,
            generators,
            elements,
            basis,
            projectors,
            projector_polynomials: b_polys,
            local_projectors: local_set,
            space,
            mapping_space: b_space,
        },
    ))
}

/// Runs every standard instance; the report names each check by instance.
pub fn verify_suite() -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for inst in standard_instances() {
        let (r, _) = verify_instance(&inst, DEFAULT_ORACLE_CAP)?;
        for c in r.checks {
            report.checks.push(CheckOutcome {
                name: format!("{}: {}", inst.name, c.name),
                ..c
            });
        }
    }
    Ok(report)
}

/// Distinct elements in a generated group, without storing them; for tests.
pub fn group_order_by_closure(generators: &[Permutation], degree: usize, cap: usize) -> Result<usize> {
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = vec![Permutation::identity(degree)];
    seen.insert(queue[0].images().to_vec());
    while let Some(x) = queue.pop() {
        for g in generators {
            let y = x.then(g);
            if seen.insert(y.images().to_vec()) {
                if seen.len() > cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                queue.push(y);
            }
        }
    }
    Ok(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::perm::parse_permutation;
    use num_traits::{One, Zero};

    fn inst(name: &str) -> OracleInstance {
        standard_instances().into_iter().find(|i| i.name == name).unwrap()
    }

    #[test]
    fn s2_wr_s2_generators() {
        let s2 = fixtures::s2().group();
        let gens = build_wreath_generators(&s2, &s2, 64).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[0].degree(), 4);
        assert_eq!(group_order_by_closure(&gens, 4, 100).unwrap(), 8);
        // base generator flips the first digit; complement swaps digits
        assert_eq!(gens[0], parse_permutation("(1,2)(3,4)", 4).unwrap());
        assert_eq!(gens[1], parse_permutation("(2,3)", 4).unwrap());
    }

    #[test]
    fn trivial_local_group_gives_coordinate_permutations() {
        let trivial = PermutationGroup::new(3, vec![]).unwrap();
        let s2 = fixtures::s2().group();
        let gens = build_wreath_generators(&trivial, &s2, 64).unwrap();
        assert_eq!(gens.len(), 1);
        assert_eq!(group_order_by_closure(&gens, 9, 100).unwrap(), 2);
    }

    #[test]
    fn cap_is_enforced() {
        let f = fixtures::s4_octahedron().group();
        let g = fixtures::a5_icosahedron().group();
        assert!(matches!(
            build_wreath_generators(&f, &g, DEFAULT_ORACLE_CAP),
            Err(Error::OracleCapExceeded { .. })
        ));
        assert_eq!(wreath_order_formula(24, 12, 60), "24^12*60");
    }

    #[test]
    fn emitted_generators_parse_back() {
        let mut buf = Vec::new();
        let n = emit_wreath_generators(&mut buf, &fixtures::s3(), &fixtures::s2(), 1 << 20).unwrap();
        assert_eq!(n, 3);
        let spec: GroupSpec = String::from_utf8(buf).unwrap().parse().unwrap();
        assert_eq!(spec.points, 9);
        assert_eq!(spec.size.as_deref(), Some("6^2*2"));
        let direct = build_wreath_generators(&fixtures::s3().group(), &fixtures::s2().group(), 64).unwrap();
        assert_eq!(spec.generators, direct);
        assert!(emit_wreath_generators(Vec::new(), &fixtures::s3(), &fixtures::s2(), 1).is_err());
    }

    #[test]
    fn pair_orbitals_examples() {
        let s2 = fixtures::s2().group();
        let gens = build_wreath_generators(&s2, &s2, 64).unwrap();
        assert_eq!(pair_orbitals_bruteforce(&gens, 4, 64).unwrap().count(), 3);

        let s3 = fixtures::s3().group();
        let gens = build_wreath_generators(&s3, &s2, 64).unwrap();
        let o = pair_orbitals_bruteforce(&gens, 9, 64).unwrap();
        assert_eq!(o.count(), 3);
        let mut sums: Vec<usize> = (0..3).map(|i| o.row_sums(i)[0]).collect();
        sums.sort_unstable();
        assert_eq!(sums, vec![1, 4, 4]);

        let o = pair_orbitals_bruteforce(&[], 4, 64).unwrap();
        assert_eq!(o.count(), 16);
    }

    #[test]
    fn materialize_examples() {
        let s2 = compute_local_orbitals(&fixtures::s2().group());
        let local: Vec<DenseMatrix> = (0..2).map(|i| s2.matrix(i)).collect();
        let id = TensorPolynomial::parse("A_1^{⊗2}", Alphabet::A, 2, 2).unwrap();
        assert!(materialize(&id, &local, 64).unwrap().is_identity());

        let oct = compute_local_orbitals(&fixtures::s4_octahedron().group());
        let set = LocalProjectorSet::from_file(&fixtures::s4_octahedron_projectors(), &oct).unwrap();
        let b1 = TensorPolynomial::parse("B_1", Alphabet::B, 3, 1).unwrap();
        let m = materialize(&b1, &set.matrices(), 64).unwrap();
        assert!(m.entries().iter().all(|e| *e == QuadExtScalar::from_ratio(1, 6)));
    }

    #[test]
    fn s2_wr_s2_suite() {
        let (report, data) = verify_instance(&inst("S2 wr S2"), 64).unwrap();
        assert!(report.is_ok(), "{report}");
        assert_eq!(data.elements.len(), 8);
        let norms: Vec<QuadExtScalar> = data
            .projectors
            .iter()
            .map(|p| character_norm(&data.elements, p).unwrap())
            .collect();
        assert_eq!(norms, vec![QuadExtScalar::one(); 3]);
    }

    #[test]
    fn s3_wr_s2_suite_and_merged_projector() {
        let (report, data) = verify_instance(&inst("S3 wr S2"), 64).unwrap();
        assert!(report.is_ok(), "{report}");
        assert_eq!(data.elements.len(), 72);
        let dims: Vec<QuadExtScalar> = data.projectors.iter().map(|p| p.trace()).collect();
        assert_eq!(dims, vec![1.into(), 4.into(), 4.into()]);
        let merged = data.projectors[1].checked_add(&data.projectors[2]).unwrap();
        assert_eq!(character_norm(&data.elements, &merged).unwrap(), 2.into());
    }

    #[test]
    fn broken_projector_is_caught() {
        let mut instance = inst("S2 wr S2");
        // swap in a non-idempotent local matrix
        instance.projectors = "d = 1\nK = 2\nB1 = 1/2, 1/2\nB2 = 1/2, 1/3\n".parse().unwrap();
        let (report, _) = verify_instance(&instance, 64).unwrap();
        assert!(!report.is_ok());
        assert!(report.failures().any(|c| c.name.contains("idempotency")));
    }

    #[test]
    fn exact_fallback_for_norms_agrees() {
        let (_, data) = verify_instance(&inst("S2 wr S3"), 64).unwrap();
        let p = &data.projectors[1];
        let big = p.scale(&QuadExtScalar::rational(BigRational::new(
            BigInt::one(),
            BigInt::from(10u64).pow(30),
        )))
        .unwrap();
        let expected = QuadExtScalar::rational(BigRational::new(
            BigInt::one(),
            BigInt::from(10u64).pow(60),
        ));
        assert_eq!(character_norm(&data.elements, &big).unwrap(), expected);
        assert!(BigRational::zero() < *expected.rational_part());
    }
}
