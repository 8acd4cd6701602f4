//! Built-in groups, local projector sets and reference statistics.
//!
//! The same files ship under `crates/core/data/` and can be passed to the CLI
//! directly, or addressed as `builtin:<name>`.

use crate::error::{Error, Result};
use crate::localdata::ProjectorFile;
use crate::perm::GroupSpec;

const A5_ICOSAHEDRON: &str = include_str!("../data/groups/a5_icosahedron.grp");
const S4_OCTAHEDRON: &str = include_str!("../data/groups/s4_octahedron.grp");
const S2_NATURAL: &str = include_str!("../data/groups/s2_natural.grp");
const S3_NATURAL: &str = include_str!("../data/groups/s3_natural.grp");

const A5_ICOSAHEDRON_PRJ: &str = include_str!("../data/projectors/a5_icosahedron.prj");
const S4_OCTAHEDRON_PRJ: &str = include_str!("../data/projectors/s4_octahedron.prj");
const S2_NATURAL_PRJ: &str = include_str!("../data/projectors/s2_natural.prj");
const S3_NATURAL_PRJ: &str = include_str!("../data/projectors/s3_natural.prj");

const REF_S4_A5: &str =
    include_str!("../data/reference/s4_octahedron_wr_a5_icosahedron.ref");
const REF_A5_A5: &str =
    include_str!("../data/reference/a5_icosahedron_wr_a5_icosahedron.ref");

const GROUPS: &[(&str, &str)] = &[
    ("a5-icosahedron", A5_ICOSAHEDRON),
    ("s4-octahedron", S4_OCTAHEDRON),
    ("s2", S2_NATURAL),
    ("s3", S3_NATURAL),
];

const PROJECTORS: &[(&str, &str)] = &[
    ("a5-icosahedron", A5_ICOSAHEDRON_PRJ),
    ("s4-octahedron", S4_OCTAHEDRON_PRJ),
    ("s2", S2_NATURAL_PRJ),
    ("s3", S3_NATURAL_PRJ),
];

const REFERENCES: &[(&str, &str)] = &[
    ("s4-octahedron-wr-a5-icosahedron", REF_S4_A5),
    ("a5-icosahedron-wr-a5-icosahedron", REF_A5_A5),
];

fn lookup<'a>(table: &[(&str, &'a str)], kind: &str, name: &str) -> Result<&'a str> {
    table
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let known: Vec<&str> = table.iter().map(|(n, _)| *n).collect();
            Error::Parse(format!("unknown builtin {kind} {name:?}; known: {}", known.join(", ")))
        })
}

pub fn group_text(name: &str) -> Result<&'static str> {
    lookup(GROUPS, "group", name)
}

pub fn projector_text(name: &str) -> Result<&'static str> {
    lookup(PROJECTORS, "projector set", name)
}

pub fn reference_text(name: &str) -> Result<&'static str> {
    lookup(REFERENCES, "reference", name)
}

pub fn group(name: &str) -> Result<GroupSpec> {
    group_text(name)?.parse()
}

pub fn projectors(name: &str) -> Result<ProjectorFile> {
    projector_text(name)?.parse()
}

pub fn a5_icosahedron() -> GroupSpec {
    A5_ICOSAHEDRON.parse().expect("builtin group parses")
}

pub fn s4_octahedron() -> GroupSpec {
    S4_OCTAHEDRON.parse().expect("builtin group parses")
}

pub fn s2() -> GroupSpec {
    S2_NATURAL.parse().expect("builtin group parses")
}

pub fn s3() -> GroupSpec {
    S3_NATURAL.parse().expect("builtin group parses")
}

pub fn a5_icosahedron_projectors() -> ProjectorFile {
    A5_ICOSAHEDRON_PRJ.parse().expect("builtin projectors parse")
}

pub fn s4_octahedron_projectors() -> ProjectorFile {
    S4_OCTAHEDRON_PRJ.parse().expect("builtin projectors parse")
}

pub fn s2_projectors() -> ProjectorFile {
    S2_NATURAL_PRJ.parse().expect("builtin projectors parse")
}

pub fn s3_projectors() -> ProjectorFile {
    S3_NATURAL_PRJ.parse().expect("builtin projectors parse")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_parses() {
        for (name, _) in GROUPS {
            group(name).unwrap();
        }
        for (name, _) in PROJECTORS {
            projectors(name).unwrap();
        }
        for (name, _) in REFERENCES {
            reference_text(name).unwrap();
        }
        assert!(group("nope").is_err());
    }
}
