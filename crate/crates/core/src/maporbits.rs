//! Orbits of a position group `G` on the mapping space `{1..R}^N`.
//!
//! A mapping `r = (r_1, ..., r_N)` is encoded base `R` with position 1 least
//! significant (digits are 0-based internally). `g` acts by
//! `rg = (r_{1g}, ..., r_{Ng})`.
//!
//! The sequential enumerator scans codes in increasing order with a visited
//! bit array and closes each unvisited code under the generators, so the
//! first code of every orbit is its minimum. The parallel enumerator tests
//! each code for minimality against the full element list instead; both give
//! the same table.

use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{PermutationGroup, DEFAULT_ELEMENT_CAP};

/// Default limit on `R^N`: 2^34 codes, a 2 GiB visited array.
pub const DEFAULT_CODE_BUDGET: u64 = 1 << 34;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingSpace {
    symbols: u32,
    positions: usize,
    total: u64,
    powers: Vec<u64>,
}

impl MappingSpace {
    pub fn new(symbols: u32, positions: usize, budget: u64) -> Result<Self> {
        let exceeded = || Error::BudgetExceeded {
            symbols,
            positions,
            budget,
        };
        if symbols == 0 {
            return Err(Error::Parse("symbol count must be positive".into()));
        }
        let mut powers = Vec::with_capacity(positions);
        let mut total: u64 = 1;
        for _ in 0..positions {
            powers.push(total);
            total = total.checked_mul(symbols as u64).ok_or_else(exceeded)?;
        }
        if total > budget {
            return Err(exceeded());
        }
        Ok(MappingSpace {
            symbols,
            positions,
            total,
            powers,
        })
    }

    pub fn symbols(&self) -> u32 {
        self.symbols
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    /// `R^N`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Encodes 0-based digits.
    pub fn encode(&self, digits: &[u32]) -> u64 {
        digits
            .iter()
            .zip(&self.powers)
            .map(|(&d, &p)| d as u64 * p)
            .sum()
    }

    pub fn decode_into(&self, mut code: u64, digits: &mut [u32]) {
        let r = self.symbols as u64;
        for d in digits.iter_mut() {
            *d = (code % r) as u32;
            code /= r;
        }
    }

    pub fn decode(&self, code: u64) -> Vec<u32> {
        let mut digits = vec![0; self.positions];
        self.decode_into(code, &mut digits);
        digits
    }

    /// Code of `rg` given the decoded digits of `r` and the images of `g`.
    #[inline]
    fn act(&self, digits: &[u32], images: &[u32]) -> u64 {
        let mut code = 0;
        for (i, &p) in self.powers.iter().enumerate() {
            code += digits[images[i] as usize] as u64 * p;
        }
        code
    }

    pub fn apply(&self, code: u64, g: &crate::perm::Permutation) -> u64 {
        let digits = self.decode(code);
        self.act(&digits, g.images())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitEntry {
    /// Smallest code in the orbit.
    pub representative: u64,
    pub size: u64,
    /// Sorted members, kept only for orbits within the member threshold.
    pub members: Option<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTable {
    space: MappingSpace,
    orbits: Vec<OrbitEntry>,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub budget: u64,
    /// Orbits up to this size keep their member lists.
    pub member_threshold: u64,
    pub threads: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            budget: DEFAULT_CODE_BUDGET,
            member_threshold: 0,
            threads: 1,
        }
    }
}

struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    fn new(bits: u64) -> Self {
        BitSet {
            words: vec![0; bits.div_ceil(64) as usize],
        }
    }

    #[inline]
    fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }
}

/// Enumerates the `G`-orbits on `{1..R}^N`, `N` being the degree of `group`.
pub fn enumerate_orbits(
    group: &PermutationGroup,
    symbols: u32,
    options: &EnumerateOptions,
) -> Result<OrbitTable> {
    let space = MappingSpace::new(symbols, group.degree(), options.budget)?;
    if options.threads > 1 {
        if let Some(elements) = group.elements() {
            return Ok(enumerate_parallel(space, group, elements, options));
        }
        let mut g = group.clone();
        if g.enumerate(DEFAULT_ELEMENT_CAP).is_ok() {
            let elements = g.elements().unwrap().to_vec();
            return Ok(enumerate_parallel(space, &g, &elements, options));
        }
    }
    Ok(enumerate_sequential(space, group, options))
}

fn enumerate_sequential(
    space: MappingSpace,
    group: &PermutationGroup,
    options: &EnumerateOptions,
) -> OrbitTable {
    let gens: Vec<&[u32]> = group.generators().iter().map(|g| g.images()).collect();
    let mut visited = BitSet::new(space.total);
    let mut orbits = Vec::new();
    let mut digits = vec![0u32; space.positions];
    let mut stack: Vec<u64> = Vec::new();
    let mut members: Vec<u64> = Vec::new();
    for code in 0..space.total {
        if visited.get(code) {
            continue;
        }
        visited.set(code);
        stack.push(code);
        members.clear();
        while let Some(c) = stack.pop() {
            members.push(c);
            space.decode_into(c, &mut digits);
            for g in &gens {
                let image = space.act(&digits, g);
                if !visited.get(image) {
                    visited.set(image);
                    stack.push(image);
                }
            }
        }
        let size = members.len() as u64;
        let kept = (size <= options.member_threshold).then(|| {
            let mut m = members.clone();
            m.sort_unstable();
            m
        });
        orbits.push(OrbitEntry {
            representative: code,
            size,
            members: kept,
        });
    }
    OrbitTable { space, orbits }
}

fn enumerate_parallel(
    space: MappingSpace,
    group: &PermutationGroup,
    elements: &[crate::perm::Permutation],
    options: &EnumerateOptions,
) -> OrbitTable {
    let order = elements.len() as u64;
    let maps: Vec<&[u32]> = elements
        .iter()
        .filter(|g| !g.is_identity())
        .map(|g| g.images())
        .collect();
    let run = || -> Vec<OrbitEntry> {
        const CHUNK: u64 = 1 << 14;
        let chunks = space.total.div_ceil(CHUNK);
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|chunk| {
                let mut digits = vec![0u32; space.positions];
                let lo = chunk * CHUNK;
                let hi = (lo + CHUNK).min(space.total);
                let mut found = Vec::new();
                'codes: for code in lo..hi {
                    space.decode_into(code, &mut digits);
                    let mut stabilizer = 1u64;
                    for g in &maps {
                        let image = space.act(&digits, g);
                        if image < code {
                            continue 'codes;
                        }
                        if image == code {
                            stabilizer += 1;
                        }
                    }
                    found.push(OrbitEntry {
                        representative: code,
                        size: order / stabilizer,
                        members: None,
                    });
                }
                found
            })
            .collect()
    };
    let mut orbits = match rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads)
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    };
    for entry in orbits.iter_mut() {
        if entry.size <= options.member_threshold {
            entry.members = Some(orbit_of_mapping(group, &space, entry.representative).members);
        }
    }
    OrbitTable { space, orbits }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub representative: u64,
    pub members: Vec<u64>,
}

/// Closure of one code under the generators of `group`.
pub fn orbit_of_mapping(group: &PermutationGroup, space: &MappingSpace, code: u64) -> Orbit {
    let gens: Vec<&[u32]> = group.generators().iter().map(|g| g.images()).collect();
    let mut members = vec![code];
    let mut seen = std::collections::HashSet::from([code]);
    let mut digits = vec![0u32; space.positions];
    let mut k = 0;
    while k < members.len() {
        space.decode_into(members[k], &mut digits);
        for g in &gens {
            let image = space.act(&digits, g);
            if seen.insert(image) {
                members.push(image);
            }
        }
        k += 1;
    }
    members.sort_unstable();
    Orbit {
        representative: members[0],
        members,
    }
}

/// Orbit count from the orbit-counting lemma: `(1/|G|) sum_g R^{c(g)}`.
pub fn burnside_count(group: &PermutationGroup, symbols: u32) -> Result<BigUint> {
    let owned;
    let elements = match group.elements() {
        Some(e) => e,
        None => {
            let mut g = group.clone();
            g.enumerate(DEFAULT_ELEMENT_CAP)?;
            owned = g;
            owned.elements().unwrap()
        }
    };
    let base = BigUint::from(symbols);
    let sum: BigUint = elements
        .iter()
        .map(|g| base.pow(g.cycle_count() as u32))
        .sum();
    let (q, r) = sum.div_rem(&BigUint::from(elements.len()));
    if !r.is_zero() {
        return Err(Error::NonIntegralBurnside);
    }
    Ok(q)
}

impl OrbitTable {
    pub fn space(&self) -> &MappingSpace {
        &self.space
    }

    pub fn symbols(&self) -> u32 {
        self.space.symbols
    }

    pub fn positions(&self) -> usize {
        self.space.positions
    }

    pub fn total(&self) -> u64 {
        self.space.total
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbits(&self) -> &[OrbitEntry] {
        &self.orbits
    }

    pub fn get(&self, i: usize) -> &OrbitEntry {
        &self.orbits[i]
    }

    /// Index of the orbit containing `code`.
    pub fn find(&self, group: &PermutationGroup, code: u64) -> Option<usize> {
        let rep = orbit_of_mapping(group, &self.space, code).representative;
        self.orbits
            .binary_search_by_key(&rep, |o| o.representative)
            .ok()
    }

    /// Members of orbit `i`, recomputed when not stored.
    pub fn members(&self, group: &PermutationGroup, i: usize) -> Vec<u64> {
        match &self.orbits[i].members {
            Some(m) => m.clone(),
            None => orbit_of_mapping(group, &self.space, self.orbits[i].representative).members,
        }
    }

    /// Sum of all orbit sizes; equals `R^N` for a complete table.
    pub fn size_sum(&self) -> u64 {
        self.orbits.iter().map(|o| o.size).sum()
    }

    /// Text dump: a header line, then `representative size` per orbit.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# orbits symbols={} positions={} total={} count={}",
            self.space.symbols,
            self.space.positions,
            self.space.total,
            self.orbits.len()
        )?;
        for o in &self.orbits {
            writeln!(w, "{} {}", o.representative, o.size)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty orbit table".into()))??;
        let field = |key: &str| -> Result<u64> {
            header
                .split_whitespace()
                .find_map(|t| t.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("orbit table header lacks {key}")))
        };
        let symbols = field("symbols")?
            .to_u32()
            .ok_or_else(|| Error::Parse("symbol count too large".into()))?;
        let positions = field("positions")? as usize;
        let count = field("count")? as usize;
        let space = MappingSpace::new(symbols, positions, u64::MAX)?;
        let mut orbits = Vec::with_capacity(count);
        for line in lines {
            let line = line?;
            let mut it = line.split_whitespace();
            let parse = |t: Option<&str>| -> Result<u64> {
                t.and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad orbit line {line:?}")))
            };
            let representative = parse(it.next())?;
            let size = parse(it.next())?;
            orbits.push(OrbitEntry {
                representative,
                size,
                members: None,
            });
        }
        if orbits.len() != count {
            return Err(Error::Parse(format!(
                "orbit table declares {count} orbits, found {}",
                orbits.len()
            )));
        }
        Ok(OrbitTable { space, orbits })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::perm::{enumerate_group, parse_permutation, Permutation};
    use proptest::prelude::*;

    fn s2() -> PermutationGroup {
        PermutationGroup::new(2, vec![parse_permutation("(1,2)", 2).unwrap()]).unwrap()
    }

    fn a5() -> PermutationGroup {
        let g = fixtures::a5_icosahedron().group();
        enumerate_group(12, g.generators(), 100).unwrap()
    }

    #[test]
    fn encoding_is_position_one_least_significant() {
        let space = MappingSpace::new(3, 4, 1000).unwrap();
        assert_eq!(space.encode(&[1, 0, 0, 0]), 1);
        assert_eq!(space.encode(&[0, 1, 0, 0]), 3);
        for code in 0..space.total() {
            assert_eq!(space.encode(&space.decode(code)), code);
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            MappingSpace::new(4, 12, 1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(MappingSpace::new(2, 80, u64::MAX).is_err());
    }

    #[test]
    fn trivial_group_gives_singletons() {
        let g = PermutationGroup::new(3, vec![]).unwrap();
        let t = enumerate_orbits(&g, 3, &EnumerateOptions::default()).unwrap();
        assert_eq!(t.len(), 27);
        assert!(t.orbits().iter().all(|o| o.size == 1));
        assert_eq!(burnside_count(&g, 3).unwrap(), BigUint::from(27u32));
    }

    #[test]
    fn s2_on_two_points() {
        let opts = EnumerateOptions {
            member_threshold: 8,
            ..Default::default()
        };
        let t = enumerate_orbits(&s2(), 2, &opts).unwrap();
        // codes: (1,1)=0, (2,1)=1, (1,2)=2, (2,2)=3
        let got: Vec<(u64, u64)> = t.orbits().iter().map(|o| (o.representative, o.size)).collect();
        assert_eq!(got, vec![(0, 1), (1, 2), (3, 1)]);
        assert_eq!(t.get(1).members.as_deref(), Some(&[1u64, 2][..]));
        assert_eq!(burnside_count(&s2(), 2).unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn orbit_of_mapping_examples() {
        let space = MappingSpace::new(2, 2, 100).unwrap();
        let code = space.encode(&[0, 1]);
        let o = orbit_of_mapping(&s2(), &space, code);
        assert_eq!(o.members, vec![space.encode(&[1, 0]), code]);
        assert_eq!(o.representative, space.encode(&[1, 0]));

        let g = a5();
        let space = MappingSpace::new(3, 12, u64::MAX).unwrap();
        let constant = space.encode(&[2; 12]);
        assert_eq!(orbit_of_mapping(&g, &space, constant).members, vec![constant]);
        let mut digits = [1u32; 12];
        digits[4] = 0;
        let o = orbit_of_mapping(&g, &space, space.encode(&digits));
        assert_eq!(o.members.len(), 12);
    }

    #[test]
    fn a5_icosahedron_agrees_with_orbit_counting() {
        let g = a5();
        let t = enumerate_orbits(&g, 3, &EnumerateOptions::default()).unwrap();
        let burnside = burnside_count(&g, 3).unwrap();
        assert_eq!(BigUint::from(t.len()), burnside);
        assert_eq!(t.size_sum(), 3u64.pow(12));
        assert!(t.orbits().iter().all(|o| 60 % o.size == 0));
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = a5();
        let seq = enumerate_orbits(&g, 3, &EnumerateOptions::default()).unwrap();
        let par = enumerate_orbits(
            &g,
            3,
            &EnumerateOptions {
                threads: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn different_generating_set_same_table() {
        let g = a5();
        // add redundant generators and reorder
        let mut gens: Vec<Permutation> = g.generators().iter().rev().cloned().collect();
        gens.push(g.elements().unwrap()[17].clone());
        let h = PermutationGroup::new(12, gens).unwrap();
        let a = enumerate_orbits(&g, 2, &EnumerateOptions::default()).unwrap();
        let b = enumerate_orbits(&h, 2, &EnumerateOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_dump_round_trip() {
        let t = enumerate_orbits(&a5(), 2, &EnumerateOptions::default()).unwrap();
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        let back = OrbitTable::read_text(&buf[..]).unwrap();
        assert_eq!(back, t);
    }

    fn arb_group() -> impl Strategy<Value = PermutationGroup> {
        let perm = Just((0..5u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap());
        proptest::collection::vec(perm, 0..3)
            .prop_map(|gens| PermutationGroup::new(5, gens).unwrap())
    }

    proptest! {
        #[test]
        fn partition_lagrange_and_canonicity(g in arb_group(), r in 1u32..4) {
            let opts = EnumerateOptions { member_threshold: u64::MAX, ..Default::default() };
            let t = enumerate_orbits(&g, r, &opts).unwrap();
            let order = enumerate_group(5, g.generators(), 200).unwrap().order().unwrap();
            prop_assert_eq!(t.size_sum(), t.total());
            prop_assert_eq!(BigUint::from(t.len()), burnside_count(&g, r).unwrap());
            for (i, o) in t.orbits().iter().enumerate() {
                prop_assert_eq!(order % o.size, 0);
                let members = o.members.as_ref().unwrap();
                prop_assert_eq!(members[0], o.representative);
                for &m in members {
                    prop_assert_eq!(orbit_of_mapping(&g, t.space(), m).representative, o.representative);
                    prop_assert_eq!(t.find(&g, m), Some(i));
                }
            }
        }
    }
}
