//! Built-in classes: the formal data of the linear systems attached to the
//! Painlevé equations, in stripped form (trivial tame blocks at finite
//! points omitted). `PIII2`, `PIII1`, `PIII0` are the three flavours of the
//! third equation, numbered by how degenerate they are.

use crate::parse::{build, parse};
use wildrep_core::{Flavor, GlobalClass};

pub struct CatalogEntry {
    pub name: &'static str,
    pub source: &'static str,
}

// Sources are in the printer's canonical form: entries sorted, eigenvalue
// tokens spelled out, multiplicities implied by the block sizes.
pub const CATALOG: [CatalogEntry; 8] = [
    CatalogEntry {
        name: "PI",
        source: "class PI {\n  at inf: <x^(5/2)> {t1:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PII",
        source: "class PII {\n  at inf: <0> {t1:[1]}, <x^(3)> {t2:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PIII2",
        source: "class PIII2 {\n  at inf: <x> {t1:[1]}, <2*x> {t2:[1]};\n  at 0: <x> {t3:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PIII1",
        source: "class PIII1 {\n  at inf: <x^(1/2)> {t1:[1]};\n  at 0: <x> {t2:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PIII0",
        source: "class PIII0 {\n  at inf: <x^(1/2)> {t1:[1]};\n  at 0: <x^(1/2)> {t2:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PIV",
        source: "class PIV {\n  at inf: <x^(2)> {t1:[1]}, <2*x^(2)> {t2:[1]};\n  at 0: <0> {t3:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PV",
        source: "class PV {\n  at inf: <x> {t1:[1]}, <2*x> {t2:[1]};\n  at 0: <0> {t3:[1]};\n  at 1: <0> {t4:[1]};\n}\n",
    },
    CatalogEntry {
        name: "PVI",
        source: "class PVI {\n  at inf: <0> {t1:[1]; t2:[1]};\n  at 0: <0> {t3:[1]};\n  at 1: <0> {t4:[1]};\n  at 2: <0> {t5:[1]};\n}\n",
    },
];

pub fn names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

/// Looks a class up by name, ignoring case.
pub fn get(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// Parses and builds one catalog source.
pub fn class(entry: &CatalogEntry) -> GlobalClass {
    let ast = parse(entry.source).expect("catalog source is well formed");
    build(&ast, Flavor::Modified).expect("catalog source is valid")
}
