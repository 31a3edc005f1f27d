//! Position permutations in cycle notation, orbit development of base
//! codewords, and the bundled base-codeword tables.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use crate::bounds::{known_value, z_cap};
use crate::code::{type_census, verify_code, Code, CodeParams, Codeword, TypeCensus, VerificationReport};
use crate::construct::{check_property_a, check_property_b};
use crate::error::{Error, Result};
use crate::io::{parse_code_file, CodeFile};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Permutation {
    pub fn identity(n: u32) -> Self {
        Permutation { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x as usize >= n {
                return Err(Error::PointOutOfRange { point: x as u64, n: n as u32 });
            }
            if seen[x as usize] {
                return Err(Error::InvalidParams(format!("{x} is the image of two points")));
            }
            seen[x as usize] = true;
        }
        Ok(Permutation { images })
    }

    /// `x -> x + shift mod n`.
    pub fn shift(n: u32, shift: u32) -> Self {
        Permutation { images: (0..n).map(|x| (x + shift) % n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Disjoint cycles of length at least 2, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.images.len()];
        let mut out = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = start as u32;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cyc.push(x);
                x = self.images[x as usize];
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Smallest `k >= 1` with `pi^k = id`.
    pub fn order(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| {
            let l = c.len() as u64;
            acc / gcd(acc, l) * l
        })
    }

    pub fn apply_word(&self, u: &Codeword) -> Codeword {
        u.map_positions(|p| self.apply(p))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Parses `(a b c)(d e)...`; unlisted points are fixed, singletons allowed.
pub fn parse_cycles(text: &str, n: u32) -> Result<Permutation> {
    let perr = |msg: String| Error::Parse { line: 1, msg };
    let mut images: Vec<u32> = (0..n).collect();
    let mut used = vec![false; n as usize];
    let mut rest = text.trim();
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| perr(format!("expected `(` at `{rest}`")))?;
        let close = inner.find(')').ok_or_else(|| perr("unclosed cycle".into()))?;
        let body = &inner[..close];
        rest = inner[close + 1..].trim_start();
        let mut cyc = Vec::new();
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let x: u64 = tok.parse().map_err(|_| perr(format!("bad point `{tok}`")))?;
            if x >= n as u64 {
                return Err(Error::PointOutOfRange { point: x, n });
            }
            let x = x as u32;
            if used[x as usize] {
                return Err(Error::OverlappingCycles(x));
            }
            used[x as usize] = true;
            cyc.push(x);
        }
        for i in 0..cyc.len() {
            images[cyc[i] as usize] = cyc[(i + 1) % cyc.len()];
        }
    }
    Ok(Permutation { images })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseBlockSet {
    pub params: CodeParams,
    pub bases: Vec<Codeword>,
    pub perm: Permutation,
    /// Caps each orbit at this many images.
    pub repeat: Option<usize>,
}

impl BaseBlockSet {
    pub fn new(params: CodeParams, bases: Vec<Codeword>, perm: Permutation) -> Result<Self> {
        if perm.len() != params.n as usize {
            return Err(Error::InvalidParams(format!("permutation on {} points for n={}", perm.len(), params.n)));
        }
        for b in &bases {
            if b.weight() != params.w {
                return Err(Error::WeightMismatch(b.weight(), params.w));
            }
            if let Some(p) = b.max_position().filter(|&p| p >= params.n) {
                return Err(Error::PointOutOfRange { point: p as u64, n: params.n });
            }
        }
        Ok(BaseBlockSet { params, bases, perm, repeat: None })
    }
}

/// Images of `base` under the cyclic group generated by `perm`.
pub fn orbit(base: &Codeword, perm: &Permutation) -> Vec<Codeword> {
    let mut out = vec![base.clone()];
    let mut cur = perm.apply_word(base);
    while &cur != base {
        out.push(cur.clone());
        cur = perm.apply_word(&cur);
    }
    out
}

/// Union of all orbits, deduplicated, in order of first appearance.
pub fn develop(b: &BaseBlockSet) -> Code {
    let mut seen = BTreeSet::new();
    let mut words = Vec::new();
    for base in &b.bases {
        let mut orb = orbit(base, &b.perm);
        if let Some(cap) = b.repeat {
            orb.truncate(cap);
        }
        for u in orb {
            if seen.insert(u.clone()) {
                words.push(u);
            }
        }
    }
    Code::new(b.params, words)
}

/// Develops a parsed base-block file; files without `perm` are taken as full codes.
pub fn develop_file(f: &CodeFile) -> Result<Code> {
    match &f.perm {
        Some(text) => {
            let perm = parse_cycles(text, f.code.params.n)?;
            Ok(develop(&BaseBlockSet::new(f.code.params, f.code.words.clone(), perm)?))
        }
        None => {
            let mut seen = BTreeSet::new();
            let words = f.code.words.iter().filter(|u| seen.insert((*u).clone())).cloned().collect();
            Ok(Code::new(f.code.params, words))
        }
    }
}

/// Bundled base-codeword tables: `(id, contents)`.
pub const TABLES: &[(&str, &str)] = &[
    ("n5", include_str!("../data/tables/n5.txt")),
    ("n6", include_str!("../data/tables/n6.txt")),
    ("n7", include_str!("../data/tables/n7.txt")),
    ("n8", include_str!("../data/tables/n8.txt")),
    ("n9", include_str!("../data/tables/n9.txt")),
    ("n10", include_str!("../data/tables/n10.txt")),
    ("n11", include_str!("../data/tables/n11.txt")),
    ("n12", include_str!("../data/tables/n12.txt")),
    ("eg13", include_str!("../data/tables/eg13.txt")),
    ("eg26", include_str!("../data/tables/eg26.txt")),
    ("eg36", include_str!("../data/tables/eg36.txt")),
    ("tab-15", include_str!("../data/tables/tab-15.txt")),
    ("tab-16", include_str!("../data/tables/tab-16.txt")),
    ("tab-19", include_str!("../data/tables/tab-19.txt")),
    ("tab-21", include_str!("../data/tables/tab-21.txt")),
    ("tab-22", include_str!("../data/tables/tab-22.txt")),
    ("tab-23", include_str!("../data/tables/tab-23.txt")),
    ("tab-25", include_str!("../data/tables/tab-25.txt")),
    ("tab-26", include_str!("../data/tables/tab-26.txt")),
    ("tab-27", include_str!("../data/tables/tab-27.txt")),
    ("tab-29", include_str!("../data/tables/tab-29.txt")),
    ("tab-30", include_str!("../data/tables/tab-30.txt")),
    ("tab-31", include_str!("../data/tables/tab-31.txt")),
    ("tab-32", include_str!("../data/tables/tab-32.txt")),
    ("tab-33", include_str!("../data/tables/tab-33.txt")),
    ("tab-34", include_str!("../data/tables/tab-34.txt")),
    ("tab-38", include_str!("../data/tables/tab-38.txt")),
    ("tab-39", include_str!("../data/tables/tab-39.txt")),
    ("tab-40", include_str!("../data/tables/tab-40.txt")),
    ("tab-41", include_str!("../data/tables/tab-41.txt")),
    ("tab-45", include_str!("../data/tables/tab-45.txt")),
    ("tab-48", include_str!("../data/tables/tab-48.txt")),
    ("tab-50", include_str!("../data/tables/tab-50.txt")),
    ("tab-51", include_str!("../data/tables/tab-51.txt")),
    ("tab-53", include_str!("../data/tables/tab-53.txt")),
    ("tab-57", include_str!("../data/tables/tab-57.txt")),
    ("tab-62", include_str!("../data/tables/tab-62.txt")),
    ("tab-63", include_str!("../data/tables/tab-63.txt")),
    ("tab-65", include_str!("../data/tables/tab-65.txt")),
    ("tab-74", include_str!("../data/tables/tab-74.txt")),
    ("tab-77", include_str!("../data/tables/tab-77.txt")),
    ("tab-86", include_str!("../data/tables/tab-86.txt")),
    ("tab-87", include_str!("../data/tables/tab-87.txt")),
    ("tab-89", include_str!("../data/tables/tab-89.txt")),
    ("tab-93", include_str!("../data/tables/tab-93.txt")),
    ("tab-98", include_str!("../data/tables/tab-98.txt")),
    ("tab-99", include_str!("../data/tables/tab-99.txt")),
    ("tab-101", include_str!("../data/tables/tab-101.txt")),
    ("tab-111", include_str!("../data/tables/tab-111.txt")),
    ("tab-113", include_str!("../data/tables/tab-113.txt")),
    ("tab-123", include_str!("../data/tables/tab-123.txt")),
];

/// Rows kept exactly as printed that do not develop to a valid code.
pub const ERRATA_TABLES: &[(&str, &str)] = &[("tab-20", include_str!("../data/tables/errata/tab-20.txt"))];

/// Text of a table, from the override directory when it has one.
pub fn table_text(id: &str) -> Result<String> {
    table_text_in(id, crate::designs::catalog_dir().as_deref())
}

pub fn table_text_in(id: &str, dir: Option<&Path>) -> Result<String> {
    if let Some(dir) = dir {
        for sub in ["tables", "tables/errata"] {
            let p = dir.join(sub).join(format!("{id}.txt"));
            if p.exists() {
                return Ok(std::fs::read_to_string(p)?);
            }
        }
    }
    TABLES
        .iter()
        .chain(ERRATA_TABLES)
        .find(|e| e.0 == id)
        .map(|e| e.1.to_string())
        .ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// Length-`n` bundled table id, preferring worked examples over plain rows.
pub fn table_for_length(n: u32) -> Option<&'static str> {
    let key = |id: &str| -> Option<u32> {
        let s = id.trim_start_matches("tab-").trim_start_matches("eg").trim_start_matches('n');
        s.parse().ok()
    };
    let mut hits: Vec<&str> = TABLES.iter().map(|e| e.0).filter(|id| key(id) == Some(n)).collect();
    hits.sort_by_key(|id| !id.starts_with("eg"));
    hits.first().copied()
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub id: String,
    pub code: Code,
    pub report: VerificationReport,
    pub census: TypeCensus,
    pub property_a: bool,
    pub property_b: bool,
}

/// Develops a bundled table and checks validity, size, census, z cap and
/// declared properties. Failing rows are reported, never repaired.
pub fn verify_table(id: &str) -> Result<TableReport> {
    verify_table_text(id, &table_text(id)?)
}

pub fn verify_table_text(id: &str, text: &str) -> Result<TableReport> {
    let mismatch = |detail: String| Error::TableMismatch { id: id.to_string(), detail };
    let f = parse_code_file(text).map_err(|e| mismatch(e.to_string()))?;
    let code = develop_file(&f).map_err(|e| mismatch(e.to_string()))?;
    let report = verify_code(&code);
    if !report.is_valid() {
        let first = report.distance_violations.first().copied();
        return Err(mismatch(format!(
            "developed code invalid: {} short pairs (first {:?}), {} length violations",
            report.short_pairs,
            first,
            report.length_violations.len()
        )));
    }
    let expect = f.expect.clone().unwrap_or_default();
    let p = code.params;
    if let Some(size) = expect.size {
        if size != code.len() {
            return Err(mismatch(format!("size {} but expected {size}", code.len())));
        }
    }
    if p.q == 3 && p.w == 4 && p.d == 6 {
        let kv = known_value(&p);
        let ledger = kv.lower_value().unwrap_or(kv.upper_value());
        if code.len() as u128 != ledger {
            return Err(mismatch(format!("size {} but the known value is {kv}", code.len())));
        }
    }
    let census = type_census(&code);
    if let Some(c) = expect.census {
        if census.xyz() != c {
            return Err(mismatch(format!("census {:?} but expected {c:?}", census.xyz())));
        }
    }
    let (_, _, z) = census.xyz();
    if p.q == 3 && p.w == 4 && p.d == 6 && code.len() as u64 == crate::bounds::u_bound(p.n as u64) && z as u64 > z_cap(p.n as u64) {
        return Err(mismatch(format!("{z} words of type 2^2 exceed the cap {}", z_cap(p.n as u64))));
    }
    let property_a = p.w == 4 && check_property_a(&code);
    let property_b = p.w == 4 && check_property_b(&code);
    if expect.property_a && !property_a {
        return Err(mismatch("property A claimed but fails".into()));
    }
    if expect.property_b && !property_b {
        return Err(mismatch("property B claimed but fails".into()));
    }
    Ok(TableReport { id: id.to_string(), code, report, census, property_a, property_b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_parsing() {
        let p = parse_cycles("(0 1 2 3)", 4).unwrap();
        assert_eq!(p.order(), 4);
        assert_eq!(p.to_string(), "(0 1 2 3)");
        assert!(matches!(parse_cycles("(0 1)(1 2)", 3), Err(Error::OverlappingCycles(1))));
        assert!(matches!(parse_cycles("(0 9)", 4), Err(Error::PointOutOfRange { point: 9, n: 4 })));
        assert!(matches!(parse_cycles("(0 1", 4), Err(Error::Parse { .. })));
        assert!(matches!(parse_cycles("0 1", 4), Err(Error::Parse { .. })));
        assert_eq!(parse_cycles("(0 1)(2)(3)", 4).unwrap(), parse_cycles("(0 1)", 4).unwrap());
    }

    #[test]
    fn eg26_automorphism_order() {
        let text = parse_code_file(&table_text("eg26").unwrap()).unwrap().perm.unwrap();
        assert_eq!(parse_cycles(&text, 26).unwrap().order(), 4);
    }

    #[test]
    fn seven_shifts() {
        let p = CodeParams::ternary(7, 4, 6);
        let base = Codeword::new(vec![(0, 2), (1, 1), (3, 1)]).unwrap();
        let b = BaseBlockSet::new(p, vec![base], Permutation::shift(7, 1)).unwrap();
        let code = develop(&b);
        assert_eq!(code.len(), 7);
        assert!(verify_code(&code).is_valid());
    }

    #[test]
    fn short_orbits() {
        let text = parse_code_file(&table_text("eg26").unwrap()).unwrap().perm.unwrap();
        let perm = parse_cycles(&text, 26).unwrap();
        let w = Codeword::new(vec![(24, 2), (25, 2)]).unwrap();
        assert_eq!(orbit(&w, &perm).len(), 1);
        let w = Codeword::binary(&[2, 11, 20, 29]);
        assert_eq!(orbit(&w, &Permutation::shift(36, 6)).len(), 3);
    }

    #[test]
    fn table_lookup() {
        assert_eq!(table_for_length(26), Some("eg26"));
        assert_eq!(table_for_length(29), Some("tab-29"));
        assert_eq!(table_for_length(7), Some("n7"));
        assert_eq!(table_for_length(42), None);
        assert!(matches!(verify_table("nope"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn errata_row_is_reported() {
        assert!(matches!(verify_table("tab-20"), Err(Error::TableMismatch { .. })));
    }
}
