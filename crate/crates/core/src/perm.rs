//! Permutations, permutation groups and the text group-file format.
//!
//! Points are 0-based internally. Cycle notation and group files are
//! 1-based. Products follow the right-action convention: `p * q` applies `p`
//! first, then `q`.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default cap on the number of elements materialized by [`enumerate_group`].
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, rejecting non-bijections.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {} out of range for degree {n}",
                    i + 1
                )));
            }
            if seen[i] {
                return Err(Error::InvalidPermutation(format!(
                    "point {} has two preimages",
                    i + 1
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} exceeds degree {degree}",
                        p + 1
                    )));
                }
                if used[p] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} repeated",
                        p + 1
                    )));
                }
                used[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()] as u32;
            }
        }
        Ok(Permutation { images })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in product");
        Permutation {
            images: self
                .images
                .iter()
                .map(|&p| other.images[p as usize])
                .collect(),
        }
    }

    /// Disjoint cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = self.apply(p);
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        let mut count = 0;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.apply(p);
            }
        }
        count
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.degree()];
        let mut order: u64 = 1;
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.apply(p);
                len += 1;
            }
            order = num_integer::lcm(order, len);
        }
        order
    }
}

impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, rhs: &Permutation) -> Permutation {
        self.then(rhs)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (k, p) in cycle.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}

/// Parses 1-based disjoint cycle notation such as `(1,3,5)(2,4,6)`.
pub fn parse_permutation(text: &str, degree: usize) -> Result<Permutation> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty permutation".into()));
    }
    let mut cycles = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let body_end = rest
            .strip_prefix('(')
            .and_then(|r| r.find(')'))
            .ok_or_else(|| Error::Parse(format!("malformed cycle notation: {text:?}")))?;
        let body = &rest[1..=body_end];
        rest = &rest[body_end + 2..];
        if body.is_empty() {
            continue;
        }
        let mut cycle = Vec::new();
        for tok in body.split(',') {
            let p: usize = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad point {tok:?} in {text:?}")))?;
            if p == 0 || p > degree {
                return Err(Error::InvalidPermutation(format!(
                    "point {p} out of range 1..={degree}"
                )));
            }
            cycle.push(p - 1);
        }
        cycles.push(cycle);
    }
    Permutation::from_cycles(degree, &cycles)
}

#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Option<Vec<Permutation>>,
    order: Option<u64>,
}

impl PermutationGroup {
    /// A group known only by its generators.
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        Ok(PermutationGroup {
            degree,
            generators,
            elements: None,
            order: None,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> Option<&[Permutation]> {
        self.elements.as_deref()
    }

    pub fn order(&self) -> Option<u64> {
        self.order
    }

    /// Materializes the elements in place, if not done already.
    pub fn enumerate(&mut self, cap: usize) -> Result<&[Permutation]> {
        if self.elements.is_none() {
            let elements = close(self.degree, &self.generators, cap)?;
            self.order = Some(elements.len() as u64);
            self.elements = Some(elements);
        }
        Ok(self.elements.as_deref().unwrap())
    }

    pub fn is_transitive(&self) -> bool {
        self.point_orbits().len() <= 1
    }

    /// Orbits of the group on points, each sorted, ordered by smallest point.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut orbits = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut k = 0;
            while k < orbit.len() {
                let p = orbit[k];
                for g in &self.generators {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        orbit.push(q);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }
}

/// Enumerates the group generated by `generators` on `degree` points.
pub fn enumerate_group(
    degree: usize,
    generators: &[Permutation],
    cap: usize,
) -> Result<PermutationGroup> {
    let mut group = PermutationGroup::new(degree, generators.to_vec())?;
    group.enumerate(cap)?;
    Ok(group)
}

fn close(degree: usize, generators: &[Permutation], cap: usize) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut index: HashSet<Vec<u32>> = HashSet::new();
    index.insert(id.images.clone());
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for g in generators {
            let h = elements[k].then(g);
            if index.contains(&h.images) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::GroupTooLarge { cap });
            }
            index.insert(h.images.clone());
            elements.push(h);
            queue.push_back(elements.len() - 1);
        }
    }
    Ok(elements)
}

/// Contents of a group file: metadata lines followed by one generator per line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub name: String,
    pub points: usize,
    pub comment: Option<String>,
    pub size: Option<String>,
    pub generators: Vec<Permutation>,
}

impl GroupSpec {
    pub fn group(&self) -> PermutationGroup {
        PermutationGroup::new(self.points, self.generators.clone())
            .expect("generators validated at parse time")
    }

    pub fn render(&self) -> String {
        let mut out = format!("name = \"{}\"\npoints = {}\n", self.name, self.points);
        if let Some(c) = &self.comment {
            out.push_str(&format!("comment = \"{c}\"\n"));
        }
        if let Some(s) = &self.size {
            out.push_str(&format!("size = \"{s}\"\n"));
        }
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

fn unquote(v: &str) -> String {
    let v = v.trim();
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
        .to_string()
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut name = None;
        let mut points = None;
        let mut comment = None;
        let mut size = None;
        let mut raw_gens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('(') {
                raw_gens.push((lineno + 1, line));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            match key.trim() {
                "name" => name = Some(unquote(value)),
                "points" => {
                    points = Some(unquote(value).parse::<usize>().map_err(|_| {
                        Error::Parse(format!("line {}: bad point count", lineno + 1))
                    })?)
                }
                "comment" => comment = Some(unquote(value)),
                "size" => size = Some(unquote(value)),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        let points = points.ok_or_else(|| Error::Parse("missing `points`".into()))?;
        if points == 0 {
            return Err(Error::Parse("`points` must be positive".into()));
        }
        let generators = raw_gens
            .into_iter()
            .map(|(lineno, g)| {
                parse_permutation(g, points)
                    .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSpec {
            name: name.unwrap_or_else(|| "unnamed".into()),
            points,
            comment,
            size,
            generators,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn parses_octahedral_generator() {
        let p = parse_permutation("(1,3,5)(2,4,6)", 6).unwrap();
        let images: Vec<usize> = (0..6).map(|i| p.apply(i) + 1).collect();
        assert_eq!(images, vec![3, 4, 5, 6, 1, 2]);
    }

    #[test]
    fn parses_identity_and_fixed_points() {
        assert!(parse_permutation("()", 6).unwrap().is_identity());
        let p = parse_permutation("(2,3,4,5,6)(8,9,10,11,12)", 12).unwrap();
        assert_eq!(p.apply(0), 0);
        assert_eq!(p.apply(6), 6);
    }

    #[test]
    fn rejects_bad_notation() {
        assert!(parse_permutation("(1,2", 3).is_err());
        assert!(parse_permutation("(1,2)(2,3)", 3).is_err());
        assert!(parse_permutation("(1,4)", 3).is_err());
        assert!(parse_permutation("(0,1)", 3).is_err());
        assert!(parse_permutation("1,2", 3).is_err());
        assert!(parse_permutation("(a,b)", 3).is_err());
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(Permutation::identity(12).cycle_count(), 12);
        let p = parse_permutation("(2,3,4,5,6)(8,9,10,11,12)", 12).unwrap();
        assert_eq!(p.cycle_count(), 4);
        let q = parse_permutation("(1,7)(2,8)(3,12)(4,11)(5,10)(6,9)", 12).unwrap();
        assert_eq!(q.cycle_count(), 6);
    }

    #[test]
    fn group_orders() {
        let s4 = fixtures::s4_octahedron().group();
        assert_eq!(
            enumerate_group(6, s4.generators(), DEFAULT_ELEMENT_CAP)
                .unwrap()
                .order(),
            Some(24)
        );
        let a5 = fixtures::a5_icosahedron().group();
        assert_eq!(
            enumerate_group(12, a5.generators(), DEFAULT_ELEMENT_CAP)
                .unwrap()
                .order(),
            Some(60)
        );
        assert_eq!(enumerate_group(5, &[], 10).unwrap().order(), Some(1));
    }

    #[test]
    fn closure_cap_is_enforced() {
        let a5 = fixtures::a5_icosahedron().group();
        assert!(matches!(
            enumerate_group(12, a5.generators(), 59),
            Err(Error::GroupTooLarge { cap: 59 })
        ));
    }

    #[test]
    fn group_file_round_trip() {
        let spec = fixtures::a5_icosahedron();
        let again: GroupSpec = spec.render().parse().unwrap();
        assert_eq!(spec, again);
        assert_eq!(spec.name, "A5_on_icosahedron");
        assert_eq!(spec.generators.len(), 3);
    }

    #[test]
    fn group_file_errors() {
        assert!("name = x\n(1,2)\n".parse::<GroupSpec>().is_err());
        assert!("points = 2\nbogus = 1\n".parse::<GroupSpec>().is_err());
        assert!("points = 2\n(1,3)\n".parse::<GroupSpec>().is_err());
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n as u32).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn conjugation_preserves_cycle_count(p in arb_perm(9), q in arb_perm(9)) {
            let conj = q.inverse().then(&p).then(&q);
            prop_assert_eq!(conj.cycle_count(), p.cycle_count());
        }

        #[test]
        fn inverse_and_associativity(p in arb_perm(8), q in arb_perm(8), r in arb_perm(8)) {
            prop_assert!(p.then(&p.inverse()).is_identity());
            prop_assert_eq!(p.then(&q).then(&r), p.then(&q.then(&r)));
        }

        #[test]
        fn render_parse_round_trip(p in arb_perm(10)) {
            let text = p.to_string();
            let back = parse_permutation(&text, 10).unwrap();
            prop_assert_eq!(back.to_string(), text);
            prop_assert_eq!(back, p);
        }

        #[test]
        fn closure_ignores_generator_order(p in arb_perm(6), q in arb_perm(6)) {
            let a = enumerate_group(6, &[p.clone(), q.clone()], 1000).unwrap();
            let b = enumerate_group(6, &[q, p], 1000).unwrap();
            prop_assert_eq!(a.order(), b.order());
            prop_assert_eq!(720 % a.order().unwrap(), 0);
            let mut ea = a.elements().unwrap().to_vec();
            let mut eb = b.elements().unwrap().to_vec();
            ea.sort();
            eb.sort();
            prop_assert_eq!(ea, eb);
        }
    }
}
