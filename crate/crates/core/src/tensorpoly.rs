//! Formal sums of `N`-fold tensor monomials over a local symbol alphabet.
//!
//! Symbols are stored 0-based and printed 1-based. Terms are kept in a
//! `BTreeMap`, so iteration and rendering follow lexicographic order of the
//! symbol sequence.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::localdata::LocalCentralizerBasis;
use crate::maporbits::{orbit_of_mapping, MappingSpace};
use crate::perm::PermutationGroup;
use crate::scalars::QuadExtScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    /// Local orbital matrices `A_i`.
    A,
    /// Local projectors `B_i`.
    B,
}

impl Alphabet {
    pub fn letter(self) -> char {
        match self {
            Alphabet::A => 'A',
            Alphabet::B => 'B',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RenderStyle {
    /// `A_1^{⊗5}⊗A_2`
    #[default]
    Unicode,
    /// `A_{1}^{\otimes 5}\otimes A_{2}`
    Latex,
    /// `A_1^5(x)A_2`
    Ascii,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorMonomial(Vec<u32>);

impl TensorMonomial {
    pub fn new(symbols: Vec<u32>) -> Self {
        TensorMonomial(symbols)
    }

    pub fn symbols(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self ⊗ other`.
    pub fn tensor(&self, other: &TensorMonomial) -> TensorMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TensorMonomial(v)
    }

    pub fn render(&self, alphabet: Alphabet, style: RenderStyle) -> String {
        let letter = alphabet.letter();
        let mut out = String::new();
        let mut i = 0;
        while i < self.0.len() {
            let s = self.0[i];
            let mut run = 1;
            while i + run < self.0.len() && self.0[i + run] == s {
                run += 1;
            }
            if i > 0 {
                out.push_str(match style {
                    RenderStyle::Unicode => "⊗",
                    RenderStyle::Latex => "\\otimes ",
                    RenderStyle::Ascii => "(x)",
                });
            }
            let sym = s + 1;
            match (style, run) {
                (RenderStyle::Latex, 1) => out.push_str(&format!("{letter}_{{{sym}}}")),
                (RenderStyle::Latex, k) => {
                    out.push_str(&format!("{letter}_{{{sym}}}^{{\\otimes {k}}}"))
                }
                (_, 1) => out.push_str(&format!("{letter}_{sym}")),
                (RenderStyle::Unicode, k) => out.push_str(&format!("{letter}_{sym}^{{⊗{k}}}")),
                (RenderStyle::Ascii, k) => out.push_str(&format!("{letter}_{sym}^{k}")),
            }
            i += run;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorPolynomial {
    alphabet: Alphabet,
    symbols: u32,
    positions: usize,
    terms: BTreeMap<TensorMonomial, QuadExtScalar>,
}

/// Local multiplication rule for one alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductTable {
    /// `B_i B_j = δ_ij B_i`.
    OrthogonalIdempotents { symbols: u32 },
    /// `A_i A_j = sum_k c_ij^k A_k`, flattened as `(i * R + j) * R + k`.
    StructureConstants { symbols: u32, constants: Vec<u64> },
}

impl ProductTable {
    pub fn orthogonal_idempotents(symbols: u32) -> Self {
        ProductTable::OrthogonalIdempotents { symbols }
    }

    pub fn from_structure_constants(basis: &LocalCentralizerBasis) -> Self {
        let r = basis.rank();
        let mut constants = Vec::with_capacity(r * r * r);
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    constants.push(basis.structure_constant(i, j, k));
                }
            }
        }
        ProductTable::StructureConstants {
            symbols: r as u32,
            constants,
        }
    }

    pub fn symbols(&self) -> u32 {
        match self {
            ProductTable::OrthogonalIdempotents { symbols }
            | ProductTable::StructureConstants { symbols, .. } => *symbols,
        }
    }

    /// Nonzero `(k, c_ij^k)` for one factor pair.
    fn factor(&self, i: u32, j: u32) -> Vec<(u32, u64)> {
        match self {
            ProductTable::OrthogonalIdempotents { .. } => {
                if i == j {
                    vec![(i, 1)]
                } else {
                    Vec::new()
                }
            }
            ProductTable::StructureConstants { symbols, constants } => {
                let r = *symbols as usize;
                let base = (i as usize * r + j as usize) * r;
                constants[base..base + r]
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(k, &c)| (k as u32, c))
                    .collect()
            }
        }
    }
}

impl TensorPolynomial {
    pub fn zero(alphabet: Alphabet, symbols: u32, positions: usize) -> Self {
        TensorPolynomial {
            alphabet,
            symbols,
            positions,
            terms: BTreeMap::new(),
        }
    }

    /// A single monomial with coefficient 1.
    pub fn monomial(alphabet: Alphabet, symbols: u32, monomial: TensorMonomial) -> Result<Self> {
        let mut p = Self::zero(alphabet, symbols, monomial.len());
        p.add_term(monomial, QuadExtScalar::one())?;
        Ok(p)
    }

    /// Sum of the monomials encoded by `codes`, each with coefficient 1.
    pub fn from_codes(
        alphabet: Alphabet,
        space: &MappingSpace,
        codes: impl IntoIterator<Item = u64>,
    ) -> Self {
        let mut p = Self::zero(alphabet, space.symbols(), space.positions());
        for code in codes {
            p.terms
                .insert(TensorMonomial(space.decode(code)), QuadExtScalar::one());
        }
        p
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> u32 {
        self.symbols
    }

    pub fn positions(&self) -> usize {
        self.positions
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorMonomial, &QuadExtScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &TensorMonomial) -> Option<&QuadExtScalar> {
        self.terms.get(m)
    }

    /// Adds `c * m`, dropping the term if it cancels.
    pub fn add_term(&mut self, m: TensorMonomial, c: QuadExtScalar) -> Result<()> {
        if m.len() != self.positions {
            return Err(Error::DegreeMismatch {
                expected: self.positions,
                found: m.len(),
            });
        }
        if let Some(&bad) = m.0.iter().find(|&&s| s >= self.symbols) {
            return Err(Error::AlphabetMismatch(format!(
                "symbol {} outside 1..{}",
                bad + 1,
                self.symbols
            )));
        }
        add_into(&mut self.terms, m, c)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet || self.symbols != other.symbols {
            return Err(Error::AlphabetMismatch(format!(
                "{}[{}] vs {}[{}]",
                self.alphabet.letter(),
                self.symbols,
                other.alphabet.letter(),
                other.symbols
            )));
        }
        if self.positions != other.positions {
            return Err(Error::DegreeMismatch {
                expected: self.positions,
                found: other.positions,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_into(&mut out.terms, m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &QuadExtScalar) -> Result<Self> {
        let mut out = Self::zero(self.alphabet, self.symbols, self.positions);
        for (m, v) in &self.terms {
            add_into(&mut out.terms, m.clone(), v.checked_mul(c)?)?;
        }
        Ok(out)
    }

    /// Factorwise product, expanded through `table`.
    pub fn multiply(&self, other: &Self, table: &ProductTable) -> Result<Self> {
        self.check_compatible(other)?;
        if table.symbols() != self.symbols {
            return Err(Error::AlphabetMismatch(format!(
                "product table has {} symbols, polynomial {}",
                table.symbols(),
                self.symbols
            )));
        }
        let mut out = Self::zero(self.alphabet, self.symbols, self.positions);
        if let ProductTable::OrthogonalIdempotents { .. } = table {
            let (small, large) = if self.len() <= other.len() {
                (self, other)
            } else {
                (other, self)
            };
            for (m, c) in &small.terms {
                if let Some(c2) = large.terms.get(m) {
                    add_into(&mut out.terms, m.clone(), c.checked_mul(c2)?)?;
                }
            }
            return Ok(out);
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let coeff = c1.checked_mul(c2)?;
                let mut partial: Vec<(Vec<u32>, BigInt)> = vec![(Vec::new(), BigInt::from(1))];
                for (&i, &j) in m1.0.iter().zip(&m2.0) {
                    let options = table.factor(i, j);
                    if options.is_empty() {
                        partial.clear();
                        break;
                    }
                    partial = partial
                        .into_iter()
                        .flat_map(|(seq, n)| {
                            options.iter().map(move |&(k, c)| {
                                let mut s = seq.clone();
                                s.push(k);
                                (s, &n * BigInt::from(c))
                            })
                        })
                        .collect();
                }
                for (seq, n) in partial {
                    let c = coeff.scale(&BigRational::from_integer(n));
                    add_into(&mut out.terms, TensorMonomial(seq), c)?;
                }
            }
        }
        Ok(out)
    }

    /// `sum_m c_m prod_j tr(S_{m_j})` given the local traces of every symbol.
    pub fn trace(&self, local_traces: &[u64]) -> Result<QuadExtScalar> {
        if local_traces.len() != self.symbols as usize {
            return Err(Error::AlphabetMismatch(format!(
                "{} traces for {} symbols",
                local_traces.len(),
                self.symbols
            )));
        }
        let mut total = QuadExtScalar::zero();
        for (m, c) in &self.terms {
            let prod: BigInt = m.0.iter().map(|&s| BigInt::from(local_traces[s as usize])).product();
            total = total.checked_add(&c.scale(&BigRational::from_integer(prod)))?;
        }
        Ok(total)
    }

    pub fn render(&self, style: RenderStyle) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let body = m.render(self.alphabet, style);
                if c.is_one() {
                    body
                } else {
                    format!("[{c}]{body}")
                }
            })
            .collect();
        parts.join(" + ")
    }

    /// Parses any of the rendered styles.
    pub fn parse(text: &str, alphabet: Alphabet, symbols: u32, positions: usize) -> Result<Self> {
        let mut p = Self::zero(alphabet, symbols, positions);
        let text = text.trim();
        if text == "0" {
            return Ok(p);
        }
        for term in text.split(" + ") {
            let term = term.trim();
            let (coeff, body) = match term.strip_prefix('[') {
                Some(rest) => {
                    let (c, body) = rest
                        .split_once(']')
                        .ok_or_else(|| Error::Parse(format!("unclosed coefficient in {term:?}")))?;
                    (c.parse::<QuadExtScalar>()?, body)
                }
                None => (QuadExtScalar::one(), term),
            };
            let m = parse_monomial(body, alphabet)?;
            p.add_term(m, coeff)?;
        }
        Ok(p)
    }
}

fn add_into(
    terms: &mut BTreeMap<TensorMonomial, QuadExtScalar>,
    m: TensorMonomial,
    c: QuadExtScalar,
) -> Result<()> {
    if c.is_zero() {
        return Ok(());
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().checked_add(&c)?;
            if sum.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = sum;
            }
        }
    }
    Ok(())
}

fn parse_monomial(body: &str, alphabet: Alphabet) -> Result<TensorMonomial> {
    let bad = || Error::Parse(format!("bad tensor monomial {body:?}"));
    let flat: String = body
        .replace("\\otimes", "⊗")
        .replace("(x)", "⊗")
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
        .collect();
    let flat = flat.replace("^⊗", "^");
    let mut seq = Vec::new();
    for factor in flat.split('⊗') {
        let rest = factor
            .strip_prefix(alphabet.letter())
            .and_then(|r| r.strip_prefix('_'))
            .ok_or_else(bad)?;
        let (sym, power) = match rest.split_once('^') {
            Some((s, k)) => (s, k.parse::<usize>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let sym: u32 = sym.parse().map_err(|_| bad())?;
        if sym == 0 || power == 0 {
            return Err(bad());
        }
        seq.extend(std::iter::repeat_n(sym - 1, power));
    }
    Ok(TensorMonomial(seq))
}

impl fmt::Display for TensorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(RenderStyle::Unicode))
    }
}

/// An orbit-generated polynomial kept as its representative code; the
/// monomials are the orbit members, each with coefficient 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitPolynomial {
    pub alphabet: Alphabet,
    pub representative: u64,
}

impl OrbitPolynomial {
    pub fn expand(&self, group: &PermutationGroup, space: &MappingSpace) -> TensorPolynomial {
        let orbit = orbit_of_mapping(group, space, self.representative);
        TensorPolynomial::from_codes(self.alphabet, space, orbit.members)
    }

    /// The representative monomial alone.
    pub fn leading(&self, space: &MappingSpace) -> TensorMonomial {
        TensorMonomial(space.decode(self.representative))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localdata::compute_local_orbitals;
    use crate::perm::parse_permutation;
    use proptest::prelude::*;

    fn mono(one_based: &[u32]) -> TensorMonomial {
        TensorMonomial(one_based.iter().map(|s| s - 1).collect())
    }

    #[test]
    fn render_examples() {
        assert_eq!(mono(&[1; 12]).render(Alphabet::A, RenderStyle::Unicode), "A_1^{⊗12}");
        let m = mono(&[1, 1, 1, 1, 1, 2, 1, 1, 2, 1, 1, 1]);
        assert_eq!(
            m.render(Alphabet::A, RenderStyle::Unicode),
            "A_1^{⊗5}⊗A_2⊗A_1^{⊗2}⊗A_2⊗A_1^{⊗3}"
        );
        assert_eq!(
            m.render(Alphabet::A, RenderStyle::Latex),
            "A_{1}^{\\otimes 5}\\otimes A_{2}\\otimes A_{1}^{\\otimes 2}\\otimes A_{2}\\otimes A_{1}^{\\otimes 3}"
        );
        assert_eq!(m.render(Alphabet::A, RenderStyle::Ascii), "A_1^5(x)A_2(x)A_1^2(x)A_2(x)A_1^3");
        assert_eq!(mono(&[2]).render(Alphabet::A, RenderStyle::Unicode), "A_2");
        assert_eq!(TensorPolynomial::zero(Alphabet::B, 2, 3).render(RenderStyle::Ascii), "0");
    }

    #[test]
    fn render_polynomial_with_coefficients() {
        let mut p = TensorPolynomial::zero(Alphabet::B, 2, 2);
        p.add_term(mono(&[2, 1]), QuadExtScalar::one()).unwrap();
        p.add_term(mono(&[1, 2]), "1/2*sqrt(5)".parse().unwrap()).unwrap();
        assert_eq!(p.render(RenderStyle::Unicode), "[1/2*sqrt(5)]B_1⊗B_2 + B_2⊗B_1");
        for style in [RenderStyle::Unicode, RenderStyle::Latex, RenderStyle::Ascii] {
            let back = TensorPolynomial::parse(&p.render(style), Alphabet::B, 2, 2).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(TensorPolynomial::parse("A_3", Alphabet::A, 2, 1).is_err());
        assert!(TensorPolynomial::parse("B_1", Alphabet::A, 2, 1).is_err());
        assert!(TensorPolynomial::parse("A_1⊗A_1", Alphabet::A, 2, 1).is_err());
        assert!(TensorPolynomial::parse("[1/2A_1", Alphabet::A, 2, 1).is_err());
        assert!(TensorPolynomial::parse("A_0", Alphabet::A, 2, 1).is_err());
    }

    fn s2_space() -> (PermutationGroup, MappingSpace) {
        let g = PermutationGroup::new(2, vec![parse_permutation("(1,2)", 2).unwrap()]).unwrap();
        (g, MappingSpace::new(2, 2, 100).unwrap())
    }

    #[test]
    fn orbit_polynomials_are_orthogonal_idempotents() {
        let (g, space) = s2_space();
        let table = ProductTable::orthogonal_idempotents(2);
        let polys: Vec<TensorPolynomial> = [0u64, 1, 3]
            .iter()
            .map(|&r| OrbitPolynomial { alphabet: Alphabet::B, representative: r }.expand(&g, &space))
            .collect();
        assert_eq!(polys[1].render(RenderStyle::Unicode), "B_1⊗B_2 + B_2⊗B_1");
        for (i, p) in polys.iter().enumerate() {
            for (j, q) in polys.iter().enumerate() {
                let prod = p.multiply(q, &table).unwrap();
                if i == j {
                    assert_eq!(&prod, p);
                } else {
                    assert!(prod.is_zero());
                }
            }
        }
        let traces: Vec<QuadExtScalar> = polys.iter().map(|p| p.trace(&[1, 1]).unwrap()).collect();
        assert_eq!(traces, vec![1.into(), 2.into(), 1.into()]);
        assert!(TensorPolynomial::zero(Alphabet::B, 2, 2).trace(&[1, 1]).unwrap().is_zero());
    }

    #[test]
    fn trivial_component_trace() {
        let p = TensorPolynomial::monomial(Alphabet::B, 3, mono(&[1; 12])).unwrap();
        assert_eq!(p.trace(&[1, 2, 3]).unwrap(), 1.into());
    }

    #[test]
    fn identity_orbital_is_unit() {
        let basis = compute_local_orbitals(&fixtures::s4_octahedron().group());
        let table = ProductTable::from_structure_constants(&basis);
        let one = TensorPolynomial::monomial(Alphabet::A, 3, mono(&[1, 1, 1])).unwrap();
        let mut p = TensorPolynomial::zero(Alphabet::A, 3, 3);
        p.add_term(mono(&[2, 3, 1]), 2.into()).unwrap();
        p.add_term(mono(&[3, 3, 2]), QuadExtScalar::one()).unwrap();
        assert_eq!(one.multiply(&p, &table).unwrap(), p);
        assert_eq!(p.multiply(&one, &table).unwrap(), p);
    }

    #[test]
    fn structure_constant_expansion() {
        // octahedron: A_2 A_2 = 4 A_1 + 2 A_2 + 4 A_3
        let basis = compute_local_orbitals(&fixtures::s4_octahedron().group());
        let table = ProductTable::from_structure_constants(&basis);
        let a2 = TensorPolynomial::monomial(Alphabet::A, 3, mono(&[2])).unwrap();
        assert_eq!(
            a2.multiply(&a2, &table).unwrap().render(RenderStyle::Ascii),
            "[4]A_1 + [2]A_2 + [4]A_3"
        );
        let a22 = TensorPolynomial::monomial(Alphabet::A, 3, mono(&[2, 3])).unwrap();
        let sq = a22.multiply(&a22, &table).unwrap();
        // A_3 A_3 = A_1
        assert_eq!(sq.render(RenderStyle::Ascii), "[4]A_1^2 + [2]A_2(x)A_1 + [4]A_3(x)A_1");
    }

    #[test]
    fn mismatches_are_errors() {
        let a = TensorPolynomial::zero(Alphabet::A, 2, 2);
        let b = TensorPolynomial::zero(Alphabet::B, 2, 2);
        let c = TensorPolynomial::zero(Alphabet::A, 2, 3);
        let t = ProductTable::orthogonal_idempotents(2);
        assert!(matches!(a.multiply(&b, &t), Err(Error::AlphabetMismatch(_))));
        assert!(a.multiply(&c, &t).is_err());
        assert!(a.multiply(&a, &ProductTable::orthogonal_idempotents(3)).is_err());
        assert!(a.trace(&[1]).is_err());
    }

    fn arb_poly(symbols: u32, positions: usize) -> impl Strategy<Value = TensorPolynomial> {
        let term = (
            proptest::collection::vec(0..symbols, positions),
            -3i64..4,
            -2i64..3,
        );
        proptest::collection::vec(term, 0..5).prop_map(move |terms| {
            let mut p = TensorPolynomial::zero(Alphabet::A, symbols, positions);
            for (m, a, b) in terms {
                let c = QuadExtScalar::new(
                    BigRational::from_integer(a.into()),
                    BigRational::new(b.into(), 3.into()),
                    5,
                )
                .unwrap();
                p.add_term(TensorMonomial(m), c).unwrap();
            }
            p
        })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(p in arb_poly(4, 3)) {
            for style in [RenderStyle::Unicode, RenderStyle::Latex, RenderStyle::Ascii] {
                let back = TensorPolynomial::parse(&p.render(style), Alphabet::A, 4, 3).unwrap();
                prop_assert_eq!(&back, &p);
            }
        }

        #[test]
        fn multiply_is_bilinear_and_associative(
            p in arb_poly(3, 2), q in arb_poly(3, 2), r in arb_poly(3, 2)
        ) {
            let basis = compute_local_orbitals(&fixtures::s4_octahedron().group());
            let t = ProductTable::from_structure_constants(&basis);
            let left = p.checked_add(&q).unwrap().multiply(&r, &t).unwrap();
            let right = p.multiply(&r, &t).unwrap().checked_add(&q.multiply(&r, &t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let a = p.multiply(&q, &t).unwrap().multiply(&r, &t).unwrap();
            let b = p.multiply(&q.multiply(&r, &t).unwrap(), &t).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn concatenation_is_associative(
            a in proptest::collection::vec(0u32..4, 0..4),
            b in proptest::collection::vec(0u32..4, 0..4),
            c in proptest::collection::vec(0u32..4, 0..4),
        ) {
            let (a, b, c) = (TensorMonomial(a), TensorMonomial(b), TensorMonomial(c));
            prop_assert_eq!(a.tensor(&b).tensor(&c), a.tensor(&b.tensor(&c)));
        }
    }
}
