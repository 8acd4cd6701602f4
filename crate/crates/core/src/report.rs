//! Report emission: plain text, LaTeX and structured JSON, plus comparison
//! against a file of reference figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::tensorpoly::{Alphabet, RenderStyle, TensorPolynomial};
use crate::wreathring::{Formula, OrbitStatistics, WreathReport};

/// Reference figures, one `key = value` per line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceData {
    pub entries: BTreeMap<String, String>,
}

impl FromStr for ReferenceData {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("reference line {}: expected `key = value`", n + 1)))?;
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ReferenceData { entries })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub key: String,
    pub reference: String,
    /// `None` when the report does not contain the figure.
    pub computed: Option<String>,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.computed.as_deref() == Some(self.reference.as_str())
    }
}

fn computed_value(report: &WreathReport, key: &str) -> Option<String> {
    let b = report.basis.as_ref();
    let p = report.projectors.as_ref();
    Some(match key {
        "dimension" => report.representation_dimension.to_string(),
        "rank" => b?.count.to_string(),
        "distinct_lengths" => b?.distinct.to_string(),
        "length_checksum" => b?.checksum.to_string(),
        "max_length" => b?.max.to_string(),
        "max_length_multiplicity" => b?.max_multiplicity.to_string(),
        "multiplicity_free" => report.multiplicity_free?.to_string(),
        "components" => p?.count.to_string(),
        "distinct_dimensions" => p?.distinct.to_string(),
        "dimension_checksum" => p?.checksum.to_string(),
        "max_dimension" => p?.max.to_string(),
        "max_dimension_multiplicity" => p?.max_multiplicity.to_string(),
        "monomials" => b.or(p)?.monomials.to_string(),
        _ => return None,
    })
}

pub fn compare(report: &WreathReport, reference: &ReferenceData) -> Vec<ComparisonRow> {
    reference
        .entries
        .iter()
        .map(|(k, v)| ComparisonRow {
            key: k.clone(),
            reference: v.clone(),
            computed: computed_value(report, k),
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct RenderOptions<'a> {
    pub timing: bool,
    pub reference: Option<&'a ReferenceData>,
}

/// `2176782336` -> `2 176 782 336`.
pub fn group_digits(n: &BigUint, sep: &str) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push_str(sep);
        }
        out.push(c);
    }
    out
}

fn multiset_text(stats: &OrbitStatistics) -> String {
    stats
        .values
        .iter()
        .map(|v| {
            if v.multiplicity == 1 {
                v.value.to_string()
            } else {
                format!("{}^{}", v.value, v.multiplicity)
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn multiset_latex(stats: &OrbitStatistics) -> String {
    stats
        .values
        .iter()
        .map(|v| {
            if v.multiplicity == 1 {
                v.value.to_string()
            } else {
                format!("{}^{{{}}}", v.value, v.multiplicity)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

/// Wraps a comma list into lines of at most `width` characters.
fn wrap(list: &str, width: usize, indent: &str) -> String {
    let mut out = String::new();
    let mut line = String::new();
    for item in list.split(", ") {
        if !line.is_empty() && line.len() + item.len() + 2 > width {
            out.push_str(indent);
            out.push_str(&line);
            out.push_str(",\n");
            line.clear();
        }
        if !line.is_empty() {
            line.push_str(", ");
        }
        line.push_str(item);
    }
    out.push_str(indent);
    out.push_str(&line);
    out.push('\n');
    out
}

fn formula_lines(out: &mut String, formulas: &[Formula], letter: &str, total: u64) {
    let mut prev = 0;
    for f in formulas {
        if f.index > prev + 1 {
            out.push_str("  ⋮\n");
        }
        let _ = writeln!(out, "  {letter}~{} = {}", f.index, f.text);
        prev = f.index;
    }
    if (prev as u64) < total {
        out.push_str("  ⋮\n");
    }
}

pub fn render_text(report: &WreathReport, options: &RenderOptions) -> String {
    let mut out = String::new();
    let group = |out: &mut String, title: &str, g: &crate::wreathring::GroupInfo| {
        let _ = writeln!(out, "{title}:");
        let _ = writeln!(out, "  Name = \"{}\"", g.name);
        let _ = writeln!(out, "  Number of points = {}", g.points);
        let _ = writeln!(out, "  Size = \"{}\"", g.order);
        let _ = writeln!(out, "  Number of generators = {}", g.generators);
    };
    out.push_str("== Part 1: groups ==\n");
    group(&mut out, "Space G(X) group", &report.space);
    group(&mut out, "Local F(V) group", &report.local);
    let _ = writeln!(out, "  Local rank = {}", report.local_rank);
    let _ = writeln!(
        out,
        "  Local suborbit lengths = {}",
        report.local_lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
    );
    if let Some(d) = &report.local_dimensions {
        let _ = writeln!(
            out,
            "  Local irreducible dimensions = {}",
            d.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
        );
    }

    out.push_str("\n== Part 2: wreath product ==\n");
    out.push_str("Whole F(V).wr.G(X) group:\n");
    let _ = writeln!(out, "  Name = \"{}\"", report.wreath_name);
    let _ = writeln!(out, "  Number of points V^X = {}", report.representation_dimension);
    let _ = writeln!(out, "  Size = \"{}\"", report.wreath_order);
    let _ = writeln!(out, "  Number of generators = {}", report.wreath_generators);

    out.push_str("\n== Part 3: header ==\n");
    let _ = writeln!(out, "Wreath product {} wr {}", report.local.name, report.space.name);
    let _ = writeln!(
        out,
        "Representation dimension: {}",
        group_digits(&report.representation_dimension, " ")
    );

    if let Some(b) = &report.basis {
        out.push_str("\n== Part 4: centralizer ring ==\n");
        let _ = writeln!(out, "Rank: {}", b.count);
        let _ = writeln!(out, "Orbit-counting lemma: {}", b.burnside);
        let _ = writeln!(out, "Number of different suborbit lengths: {}", b.distinct);
        out.push_str("Wreath suborbit lengths:\n");
        out.push_str(&wrap(&multiset_text(b), 96, "  "));
        let _ = writeln!(
            out,
            "Checksum = {}  Maximum multiplicity = {}",
            b.checksum, b.max_multiplicity
        );
        let _ = writeln!(out, "Maximum suborbit length = {} (multiplicity {})", b.max, b.max_count);
        out.push_str("Wreath invariant basis forms:\n");
        formula_lines(&mut out, &report.basis_formulas, "A", b.count);
    }

    if let Some(p) = &report.projectors {
        out.push_str("\n== Part 5: irreducible projectors ==\n");
        match report.multiplicity_free {
            Some(true) => out.push_str("Wreath product decomposition is multiplicity free\n"),
            Some(false) => out.push_str("Wreath product decomposition has nontrivial multiplicities\n"),
            None => {}
        }
        let _ = writeln!(out, "Number of irreducible components: {}", p.count);
        let _ = writeln!(out, "Orbit-counting lemma: {}", p.burnside);
        let _ = writeln!(out, "Number of different dimensions: {}", p.distinct);
        out.push_str("Irreducible dimensions:\n");
        out.push_str(&wrap(&multiset_text(p), 96, "  "));
        let _ = writeln!(
            out,
            "Checksum = {}  Maximum number of equal dimensions = {}",
            p.checksum, p.max_multiplicity
        );
        let _ = writeln!(out, "Maximum dimension = {} (multiplicity {})", p.max, p.max_count);
        out.push_str("Wreath irreducible projectors:\n");
        formula_lines(&mut out, &report.projector_formulas, "B", p.count);
    }

    if let Some(stats) = report.basis.as_ref().or(report.projectors.as_ref()) {
        let _ = writeln!(out, "\nMaximum number of tensor monomials: {}", stats.monomials);
    }
    if !report.checks.is_empty() {
        out.push_str("\nChecks:\n");
        for c in &report.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "  [{mark}] {}: {}", c.name, c.detail);
        }
    }
    if let Some(reference) = options.reference {
        out.push_str("\nComparison with reference figures:\n");
        for row in compare(report, reference) {
            let mark = if row.matches() { "MATCH" } else { "DIFFER" };
            let _ = writeln!(
                out,
                "  {:<28} reference {:<16} computed {:<16} {mark}",
                row.key,
                row.reference,
                row.computed.as_deref().unwrap_or("-")
            );
        }
    }
    if options.timing {
        out.push('\n');
        let mut total = 0.0;
        for (phase, secs) in &report.timings {
            let _ = writeln!(out, "Time ({phase}): {secs:.2} sec");
            total += secs;
        }
        let _ = writeln!(out, "Time: {total:.2} sec");
    }
    out
}

fn latex_escape(s: &str) -> String {
    s.replace('\\', "\\textbackslash{}").replace('_', "\\_").replace('&', "\\&").replace('%', "\\%").replace('#', "\\#")
}

fn latex_formula(f: &Formula, alphabet: Alphabet, symbols: usize, positions: usize) -> String {
    match TensorPolynomial::parse(&f.text, alphabet, symbols as u32, positions) {
        Ok(p) => p.render(RenderStyle::Latex).replace(" + ", "+"),
        Err(_) => format!("\\text{{{}}}", latex_escape(&f.text)),
    }
}

fn latex_block(out: &mut String, formulas: &[Formula], alphabet: Alphabet, symbols: usize, positions: usize, total: u64) {
    let letter = alphabet.letter();
    out.push_str("\\begin{align*}\n");
    let mut prev = 0;
    for f in formulas {
        if f.index > prev + 1 {
            out.push_str("\\vdots~&\\\\\n");
        }
        let _ = writeln!(
            out,
            "\\widetilde{{{letter}}}_{{{}}}=&{}\\\\",
            f.index,
            latex_formula(f, alphabet, symbols, positions)
        );
        prev = f.index;
    }
    if (prev as u64) < total {
        out.push_str("\\vdots~&\\\\\n");
    }
    out.push_str("\\end{align*}\n");
}

pub fn render_latex(report: &WreathReport, options: &RenderOptions) -> String {
    let mut out = String::new();
    let n = report.space.points;
    let _ = writeln!(
        out,
        "\\textbf{{Wreath product}} $\\mathrm{{{}}}\\wr\\mathrm{{{}}}$\\\\",
        latex_escape(&report.local.name),
        latex_escape(&report.space.name)
    );
    let _ = writeln!(
        out,
        "Representation dimension: ${}$\\\\",
        group_digits(&report.representation_dimension, "\\,")
    );
    let _ = writeln!(out, "Wreath group order: ${}$\\\\", report.wreath_order);
    if let Some(b) = &report.basis {
        let _ = writeln!(out, "Rank: ${}$\\\\", b.count);
        let _ = writeln!(out, "Number of different suborbit lengths: ${}$\\\\", b.distinct);
        let _ = writeln!(out, "Wreath suborbit lengths: ${}$\\\\", multiset_latex(b));
        let _ = writeln!(
            out,
            "Checksum $= {}$ Maximum multiplicity $= {}$\\\\",
            b.checksum, b.max_multiplicity
        );
        latex_block(&mut out, &report.basis_formulas, Alphabet::A, report.local_rank, n, b.count);
    }
    if let Some(p) = &report.projectors {
        if report.multiplicity_free == Some(true) {
            out.push_str("Wreath product decomposition is multiplicity free\\\\\n");
        }
        let _ = writeln!(out, "Number of irreducible components: ${}$\\\\", p.count);
        let _ = writeln!(out, "Number of different dimensions: ${}$\\\\", p.distinct);
        let _ = writeln!(out, "Irreducible dimensions: ${}$\\\\", multiset_latex(p));
        let _ = writeln!(
            out,
            "Checksum $= {}$ Maximum number of equal dimensions $= {}$\\\\",
            p.checksum, p.max_multiplicity
        );
        let k = report.local_dimensions.as_ref().map_or(0, |d| d.len());
        latex_block(&mut out, &report.projector_formulas, Alphabet::B, k, n, p.count);
    }
    if let Some(stats) = report.basis.as_ref().or(report.projectors.as_ref()) {
        let _ = writeln!(out, "Maximum number of tensor monomials: ${}$\\\\", stats.monomials);
    }
    if let Some(reference) = options.reference {
        out.push_str("\\begin{tabular}{llll}\nquantity & reference & computed & \\\\\n");
        for row in compare(report, reference) {
            let _ = writeln!(
                out,
                "{} & {} & {} & {}\\\\",
                latex_escape(&row.key),
                row.reference,
                row.computed.as_deref().unwrap_or("-"),
                if row.matches() { "MATCH" } else { "DIFFER" }
            );
        }
        out.push_str("\\end{tabular}\n");
    }
    if options.timing {
        let total: f64 = report.timings.iter().map(|(_, s)| s).sum();
        let _ = writeln!(out, "Time: {total:.2} sec\\\\");
    }
    out
}

pub fn render_structured(report: &WreathReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_structured(text: &str) -> Result<WreathReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("structured report: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::wreathring::{build_report, PipelineOptions};

    fn s2_s2() -> WreathReport {
        build_report(
            &fixtures::s2(),
            &fixtures::s2(),
            Some(&fixtures::s2_projectors()),
            &PipelineOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn digit_grouping() {
        assert_eq!(group_digits(&BigUint::from(2_176_782_336u64), " "), "2 176 782 336");
        assert_eq!(group_digits(&BigUint::from(12u32), " "), "12");
        assert_eq!(group_digits(&BigUint::from(123_456u32), "\\,"), "123\\,456");
    }

    #[test]
    fn text_report_layout() {
        let text = render_text(&s2_s2(), &RenderOptions::default());
        for needle in [
            "Number of points V^X = 4",
            "Size = \"2^2*2\"",
            "Representation dimension: 4",
            "Rank: 3",
            "Wreath suborbit lengths:\n  1^2, 2\n",
            "Checksum = 4  Maximum multiplicity = 2",
            "A~1 = A_1^{⊗2}",
            "Wreath product decomposition is multiplicity free",
            "B~2 = B_1⊗B_2 + B_2⊗B_1",
            "Maximum number of tensor monomials: 4",
        ] {
            assert!(text.contains(needle), "missing {needle:?} in\n{text}");
        }
        assert!(!text.contains("Time"));
        assert!(render_text(&s2_s2(), &RenderOptions { timing: true, reference: None }).contains("Time:"));
    }

    #[test]
    fn latex_report_renders_formulas() {
        let tex = render_latex(&s2_s2(), &RenderOptions::default());
        assert!(tex.contains("\\widetilde{B}_{2}=&B_{1}\\otimes B_{2}+B_{2}\\otimes B_{1}\\\\"), "{tex}");
        assert!(tex.contains("Representation dimension: $4$"));
    }

    #[test]
    fn structured_round_trip() {
        let r = s2_s2();
        let back = parse_structured(&render_structured(&r)).unwrap();
        assert_eq!(back.basis, r.basis);
        assert_eq!(back.projectors, r.projectors);
        assert_eq!(back.representation_dimension, r.representation_dimension);
        assert!(render_structured(&r).contains("\"checksum\": \"4\""));
    }

    #[test]
    fn reference_comparison() {
        let reference: ReferenceData = "# c\ndimension = 4\nrank = 5\nunknown = 1\n".parse().unwrap();
        let rows = compare(&s2_s2(), &reference);
        let by_key: BTreeMap<&str, &ComparisonRow> = rows.iter().map(|r| (r.key.as_str(), r)).collect();
        assert!(by_key["dimension"].matches());
        assert!(!by_key["rank"].matches());
        assert!(by_key["unknown"].computed.is_none());
        let text = render_text(&s2_s2(), &RenderOptions { timing: false, reference: Some(&reference) });
        assert!(text.contains("MATCH"));
        assert!(text.contains("DIFFER"));
        assert!("no equals".parse::<ReferenceData>().is_err());
        for (name, _) in [("s4-octahedron-wr-a5-icosahedron", 0), ("a5-icosahedron-wr-a5-icosahedron", 0)] {
            let r: ReferenceData = fixtures::reference_text(name).unwrap().parse().unwrap();
            assert!(r.entries.contains_key("dimension"));
        }
    }
}
