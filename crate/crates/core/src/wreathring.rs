//! Centralizer basis and irreducible projectors of `F wr G` on `V^X`.
//!
//! Basis elements are orbits of `G` on `{1..R}^N` read as sums of tensor
//! monomials in the local orbital matrices; projectors are orbits on
//! `{1..K}^N` read in the local projectors. Nothing of size `M^N` is ever
//! materialized: every statistic is a product over the representative's
//! digits times the orbit size.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localdata::{
    compute_local_orbitals, validate_projectors, CheckOutcome, LocalCentralizerBasis,
    LocalProjectorSet, ProjectorFile,
};
use crate::maporbits::{
    burnside_count, enumerate_orbits, EnumerateOptions, OrbitTable, DEFAULT_CODE_BUDGET,
};
use crate::perm::{GroupSpec, PermutationGroup, DEFAULT_ELEMENT_CAP};
use crate::scalars::QuadExtScalar;
use crate::tensorpoly::{Alphabet, OrbitPolynomial, ProductTable, RenderStyle, TensorPolynomial};

/// Serializes big integers as decimal strings.
pub(crate) mod big {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WreathBasisElement {
    pub index: usize,
    pub polynomial: OrbitPolynomial,
    pub orbit_size: u64,
    pub suborbit_length: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WreathProjector {
    pub index: usize,
    pub polynomial: OrbitPolynomial,
    pub orbit_size: u64,
    pub dimension: u128,
}

/// `size * prod_j weights[digit_j]` over the representative's digits.
fn weighted_size(table: &OrbitTable, rep: u64, size: u64, weights: &[u64]) -> Result<u128> {
    let r = table.symbols() as u64;
    let mut code = rep;
    let mut value = size as u128;
    for _ in 0..table.positions() {
        let w = weights[(code % r) as usize] as u128;
        value = value.checked_mul(w).ok_or(Error::Overflow("orbit weight"))?;
        code /= r;
    }
    Ok(value)
}

fn check_symbols(table: &OrbitTable, local: usize) -> Result<()> {
    if table.symbols() as usize != local {
        return Err(Error::SymbolCountMismatch {
            table: table.symbols(),
            local,
        });
    }
    Ok(())
}

/// `Σ_{q∈orbit} Π_j ℓ_{q_j}`; the digit multiset is constant on an orbit.
pub fn suborbit_length(table: &OrbitTable, orbit: usize, lengths: &[u64]) -> Result<u128> {
    let o = table.get(orbit);
    weighted_size(table, o.representative, o.size, lengths)
}

pub fn assemble_centralizer_basis(
    table: &OrbitTable,
    local: &LocalCentralizerBasis,
) -> Result<Vec<WreathBasisElement>> {
    check_symbols(table, local.rank())?;
    let lengths = local.suborbit_lengths()?;
    table
        .orbits()
        .par_iter()
        .enumerate()
        .map(|(index, o)| {
            Ok(WreathBasisElement {
                index,
                polynomial: OrbitPolynomial {
                    alphabet: Alphabet::A,
                    representative: o.representative,
                },
                orbit_size: o.size,
                suborbit_length: weighted_size(table, o.representative, o.size, &lengths)?,
            })
        })
        .collect()
}

pub fn assemble_projectors(
    table: &OrbitTable,
    local: &LocalProjectorSet,
) -> Result<Vec<WreathProjector>> {
    check_symbols(table, local.len())?;
    let dims = local.dimensions()?;
    table
        .orbits()
        .par_iter()
        .enumerate()
        .map(|(index, o)| {
            Ok(WreathProjector {
                index,
                polynomial: OrbitPolynomial {
                    alphabet: Alphabet::B,
                    representative: o.representative,
                },
                orbit_size: o.size,
                dimension: weighted_size(table, o.representative, o.size, &dims)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCount {
    #[serde(with = "big")]
    pub value: BigUint,
    pub multiplicity: u64,
}

/// Multiset statistics over one family of orbit objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStatistics {
    pub count: u64,
    /// `R^N` or `K^N`.
    pub monomials: u64,
    #[serde(with = "big")]
    pub burnside: BigUint,
    /// Ascending by value.
    pub values: Vec<ValueCount>,
    #[serde(with = "big")]
    pub checksum: BigUint,
    pub distinct: usize,
    #[serde(with = "big")]
    pub max: BigUint,
    /// Multiplicity of `max`.
    pub max_count: u64,
    /// Largest multiplicity of any value.
    pub max_multiplicity: u64,
}

impl OrbitStatistics {
    fn from_values(
        values: impl ParallelIterator<Item = u128>,
        monomials: u64,
        burnside: BigUint,
    ) -> Self {
        let counts = values
            .fold(BTreeMap::<u128, u64>::new, |mut m, v| {
                *m.entry(v).or_default() += 1;
                m
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (v, c) in b {
                    *a.entry(v).or_default() += c;
                }
                a
            });
        let count = counts.values().sum();
        let checksum = counts
            .iter()
            .map(|(&v, &c)| BigUint::from(v) * BigUint::from(c))
            .sum();
        let (max, max_count) = counts
            .iter()
            .next_back()
            .map(|(&v, &c)| (BigUint::from(v), c))
            .unwrap_or_default();
        let max_multiplicity = counts.values().copied().max().unwrap_or(0);
        OrbitStatistics {
            count,
            monomials,
            burnside,
            distinct: counts.len(),
            values: counts
                .into_iter()
                .map(|(v, c)| ValueCount {
                    value: v.into(),
                    multiplicity: c,
                })
                .collect(),
            checksum,
            max,
            max_count,
            max_multiplicity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInfo {
    pub name: String,
    pub points: usize,
    pub order: u64,
    pub generators: usize,
}

impl GroupInfo {
    fn new(spec: &GroupSpec, group: &PermutationGroup) -> Self {
        GroupInfo {
            name: spec.name.clone(),
            points: spec.points,
            order: group.order().unwrap_or(0),
            generators: spec.generators.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Formula {
    /// 1-based orbit number.
    pub index: usize,
    pub orbit_size: u64,
    #[serde(with = "big")]
    pub value: BigUint,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WreathReport {
    /// Group acting on the positions `X`.
    pub space: GroupInfo,
    /// Group acting on the local points `V`.
    pub local: GroupInfo,
    pub wreath_name: String,
    pub wreath_order: String,
    pub wreath_generators: usize,
    #[serde(with = "big")]
    pub representation_dimension: BigUint,
    pub local_rank: usize,
    pub local_lengths: Vec<u64>,
    pub local_dimensions: Option<Vec<u64>>,
    pub basis: Option<OrbitStatistics>,
    pub projectors: Option<OrbitStatistics>,
    pub multiplicity_free: Option<bool>,
    pub basis_formulas: Vec<Formula>,
    pub projector_formulas: Vec<Formula>,
    pub checks: Vec<CheckOutcome>,
    /// Wall-clock seconds per phase; not part of the deterministic output.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl WreathReport {
    pub fn checks_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub threads: usize,
    pub seed: u64,
    pub budget: u64,
    pub basis: bool,
    pub projectors: bool,
    /// All pairs among this many leading projectors are multiplied symbolically.
    pub head_pairs: usize,
    /// Additional seeded random pairs.
    pub random_pairs: usize,
    /// Random formulas shown between the first and last three.
    pub middle_samples: usize,
    pub style: RenderStyle,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            threads: 1,
            seed: 0,
            budget: DEFAULT_CODE_BUDGET,
            basis: true,
            projectors: true,
            head_pairs: 64,
            random_pairs: 10_000,
            middle_samples: 3,
            style: RenderStyle::Unicode,
        }
    }
}

pub fn wreath_order_formula(local_order: u64, positions: usize, space_order: u64) -> String {
    format!("{local_order}^{positions}*{space_order}")
}

/// Runs the full decomposition and collects every statistic.
pub fn build_report(
    space: &GroupSpec,
    local: &GroupSpec,
    projectors: Option<&ProjectorFile>,
    options: &PipelineOptions,
) -> Result<WreathReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .map_err(|e| Error::Parse(format!("thread pool: {e}")))?;
    pool.install(|| build_report_inner(space, local, projectors, options))
}

fn build_report_inner(
    space_spec: &GroupSpec,
    local_spec: &GroupSpec,
    projector_file: Option<&ProjectorFile>,
    options: &PipelineOptions,
) -> Result<WreathReport> {
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut Vec<(String, f64)>| {
        timings.push((name.to_string(), clock.elapsed().as_secs_f64()));
        clock = Instant::now();
    };

    let mut space = space_spec.group();
    space.enumerate(DEFAULT_ELEMENT_CAP)?;
    let mut local = local_spec.group();
    local.enumerate(DEFAULT_ELEMENT_CAP)?;
    let n = space.degree();
    let m = local.degree();
    let local_basis = compute_local_orbitals(&local);
    let lengths = local_basis.suborbit_lengths()?;
    let representation_dimension = BigUint::from(m).pow(n as u32);

    let mut checks = Vec::new();
    let local_set = match projector_file {
        Some(file) if options.projectors => {
            let set = LocalProjectorSet::from_file(file, &local_basis)?;
            let validation = validate_projectors(&set, &local_basis, &local)?;
            if !validation.is_ok() {
                let failed: Vec<String> = validation.failures().map(|c| c.name.clone()).collect();
                return Err(Error::InvalidProjectors(failed.join("; ")));
            }
            checks.push(CheckOutcome {
                name: "local projectors validated".into(),
                passed: true,
                detail: format!("{} checks", validation.checks.len()),
            });
            Some(set)
        }
        _ => None,
    };
    let local_dimensions = local_set.as_ref().map(|s| s.dimensions()).transpose()?;
    lap("local data", &mut timings);

    let enumerate = |symbols: usize| -> Result<OrbitTable> {
        let opts = EnumerateOptions {
            budget: options.budget,
            member_threshold: 0,
            threads: options.threads,
        };
        enumerate_orbits(&space, symbols as u32, &opts)
    };
    let gate = |table: &OrbitTable| -> Result<BigUint> {
        let expected = burnside_count(&space, table.symbols())?;
        if BigUint::from(table.len()) != expected {
            return Err(Error::OracleDisagreement {
                found: table.len() as u64,
                expected: expected.to_string(),
            });
        }
        Ok(expected)
    };
    let checksum_gate = |what: &str, stats: &OrbitStatistics| -> Result<()> {
        if stats.checksum != representation_dimension {
            return Err(Error::Checksum {
                what: what.into(),
                found: stats.checksum.to_string(),
                expected: representation_dimension.to_string(),
            });
        }
        Ok(())
    };

    let mut a_table = None;
    let mut basis_stats = None;
    let mut basis_formulas = Vec::new();
    if options.basis {
        let table = enumerate(local_basis.rank())?;
        let burnside = gate(&table)?;
        lap("basis orbits", &mut timings);
        let elements = assemble_centralizer_basis(&table, &local_basis)?;
        let stats = OrbitStatistics::from_values(
            elements.par_iter().map(|e| e.suborbit_length),
            table.total(),
            burnside,
        );
        checksum_gate("suborbit lengths", &stats)?;
        checks.push(CheckOutcome {
            name: "orbit sizes cover all A-monomials".into(),
            passed: table.size_sum() == table.total(),
            detail: format!("{} of {}", table.size_sum(), table.total()),
        });
        checks.push(basis_trace_check(&table, &space, &elements, &local_basis, options)?);
        basis_formulas = sample_formulas(
            &table,
            &space,
            Alphabet::A,
            |i| elements[i].suborbit_length,
            options,
        );
        basis_stats = Some(stats);
        a_table = Some(table);
        lap("basis statistics", &mut timings);
    }

    let mut projector_stats = None;
    let mut projector_formulas = Vec::new();
    if let Some(set) = &local_set {
        let table = match a_table {
            Some(t) if t.symbols() as usize == set.len() => t,
            _ => {
                let t = enumerate(set.len())?;
                lap("projector orbits", &mut timings);
                t
            }
        };
        let burnside = gate(&table)?;
        let elements = assemble_projectors(&table, set)?;
        let stats = OrbitStatistics::from_values(
            elements.par_iter().map(|e| e.dimension),
            table.total(),
            burnside,
        );
        checksum_gate("projector dimensions", &stats)?;
        checks.extend(projector_symbolic_checks(
            &table,
            &space,
            &elements,
            local_dimensions.as_deref().unwrap_or_default(),
            options,
        )?);
        projector_formulas =
            sample_formulas(&table, &space, Alphabet::B, |i| elements[i].dimension, options);
        projector_stats = Some(stats);
        lap("projector statistics", &mut timings);
    }

    let multiplicity_free = match (&basis_stats, &projector_stats, &local_set) {
        (Some(b), Some(p), Some(set)) => Some(set.len() == local_basis.rank() && b.count == p.count),
        _ => None,
    };

    Ok(WreathReport {
        space: GroupInfo::new(space_spec, &space),
        local: GroupInfo::new(local_spec, &local),
        wreath_name: format!("{}_wr_{}", local_spec.name, space_spec.name),
        wreath_generators: space.point_orbits().len() * local_spec.generators.len()
            + space_spec.generators.len(),
        wreath_order: wreath_order_formula(local.order().unwrap_or(0), n, space.order().unwrap_or(0)),
        representation_dimension,
        local_rank: local_basis.rank(),
        local_lengths: lengths,
        local_dimensions,
        basis: basis_stats,
        projectors: projector_stats,
        multiplicity_free,
        basis_formulas,
        projector_formulas,
        checks,
        timings,
    })
}

/// Orbit indices for display: first three, seeded middle sample, last three.
pub fn sample_indices(count: usize, middle: usize, seed: u64) -> Vec<usize> {
    if count <= 6 + middle {
        return (0..count).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, count - 6, middle)
        .into_iter()
        .map(|i| i + 3)
        .collect();
    picked.extend([0, 1, 2, count - 3, count - 2, count - 1]);
    picked.sort_unstable();
    picked
}

fn sample_formulas(
    table: &OrbitTable,
    group: &PermutationGroup,
    alphabet: Alphabet,
    value: impl Fn(usize) -> u128,
    options: &PipelineOptions,
) -> Vec<Formula> {
    sample_indices(table.len(), options.middle_samples, options.seed)
        .into_iter()
        .map(|i| {
            let o = table.get(i);
            let poly = OrbitPolynomial {
                alphabet,
                representative: o.representative,
            }
            .expand(group, table.space());
            Formula {
                index: i + 1,
                orbit_size: o.size,
                value: value(i).into(),
                text: poly.render(options.style),
            }
        })
        .collect()
}

/// Pairs checked symbolically: all pairs among the head, then seeded random pairs.
pub fn sampled_pairs(count: usize, head: usize, random: usize, seed: u64) -> Vec<(usize, usize)> {
    let h = head.min(count);
    let mut pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (i..h).map(move |j| (i, j))).collect();
    if count > h {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        for _ in 0..random {
            pairs.push((rng.gen_range(0..count), rng.gen_range(0..count)));
        }
    }
    pairs
}

fn projector_symbolic_checks(
    table: &OrbitTable,
    group: &PermutationGroup,
    projectors: &[WreathProjector],
    dims: &[u64],
    options: &PipelineOptions,
) -> Result<Vec<CheckOutcome>> {
    let pairs = sampled_pairs(projectors.len(), options.head_pairs, options.random_pairs, options.seed);
    let product = ProductTable::orthogonal_idempotents(table.symbols());
    let expand = |i: usize| projectors[i].polynomial.expand(group, table.space());
    let head: HashMap<usize, TensorPolynomial> = (0..options.head_pairs.min(projectors.len()))
        .into_par_iter()
        .map(|i| (i, expand(i)))
        .collect();
    let get = |i: usize| head.get(&i).cloned().unwrap_or_else(|| expand(i));

    let failures: Vec<String> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<String>> {
            let (p, q) = (get(i), get(j));
            let prod = p.multiply(&q, &product)?;
            let ok = if i == j { prod == p } else { prod.is_zero() };
            Ok((!ok).then(|| format!("B~{} * B~{}", i + 1, j + 1)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut touched: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    touched.sort_unstable();
    touched.dedup();
    let trace_failures: Vec<String> = touched
        .par_iter()
        .map(|&i| -> Result<Option<String>> {
            let t = get(i).trace(dims)?;
            let expected = QuadExtScalar::from(num_bigint::BigInt::from(projectors[i].dimension));
            Ok((t != expected).then(|| format!("tr B~{} = {t}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(vec![
        CheckOutcome {
            name: "symbolic idempotency and orthogonality".into(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                format!("{} pairs", pairs.len())
            } else {
                failures.join(", ")
            },
        },
        CheckOutcome {
            name: "projector dimension = symbolic trace".into(),
            passed: trace_failures.is_empty(),
            detail: if trace_failures.is_empty() {
                format!("{} projectors", touched.len())
            } else {
                trace_failures.join(", ")
            },
        },
    ])
}

/// `tr Ã_r` is `M^N` for the identity orbit and 0 otherwise.
fn basis_trace_check(
    table: &OrbitTable,
    group: &PermutationGroup,
    elements: &[WreathBasisElement],
    local: &LocalCentralizerBasis,
    options: &PipelineOptions,
) -> Result<CheckOutcome> {
    let traces = local.traces();
    let full = QuadExtScalar::from(num_bigint::BigInt::from(local.degree()).pow(table.positions() as u32));
    let sample = sample_indices(elements.len(), options.head_pairs, options.seed);
    let bad: Vec<String> = sample
        .par_iter()
        .map(|&i| -> Result<Option<String>> {
            let poly = elements[i].polynomial.expand(group, table.space());
            let t = poly.trace(&traces)?;
            let expected = if table.get(i).representative == 0 {
                full.clone()
            } else {
                QuadExtScalar::zero()
            };
            Ok((t != expected).then(|| format!("tr A~{} = {t}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(CheckOutcome {
        name: "basis symbolic trace".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{} elements", sample.len())
        } else {
            bad.join(", ")
        },
    })
}
