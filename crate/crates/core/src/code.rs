//! Codewords, codes and the l1 metric.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::designs::SetSystem;
use crate::error::{Error, Result};
use crate::par::{self, Strategy};

/// Sparse constant-weight vector: `(position, value)` pairs sorted by position,
/// values always positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Codeword {
    entries: Vec<(u32, u32)>,
}

impl Codeword {
    pub fn new(mut entries: Vec<(u32, u32)>) -> Result<Self> {
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParams(format!("position {} repeated", w[0].0)));
            }
        }
        if let Some(&(p, _)) = entries.iter().find(|e| e.1 == 0) {
            return Err(Error::InvalidParams(format!("zero stored at position {p}")));
        }
        Ok(Codeword { entries })
    }

    /// Caller guarantees sorted distinct positions and nonzero values.
    pub(crate) fn from_sorted(entries: Vec<(u32, u32)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|e| e.1 > 0));
        Codeword { entries }
    }

    /// Word with value 1 on every listed position.
    pub fn binary(points: &[u32]) -> Self {
        let mut e: Vec<(u32, u32)> = points.iter().map(|&p| (p, 1)).collect();
        e.sort_unstable();
        e.dedup();
        Codeword { entries: e }
    }

    pub fn from_dense(v: &[u32]) -> Self {
        let entries = v
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, &x)| (i as u32, x))
            .collect();
        Codeword { entries }
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n];
        for &(p, x) in &self.entries {
            if (p as usize) < n {
                v[p as usize] = x;
            }
        }
        v
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn support(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, pos: u32) -> u32 {
        match self.entries.binary_search_by_key(&pos, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0,
        }
    }

    pub fn weight(&self) -> u32 {
        l1_weight(self)
    }

    pub fn max_value(&self) -> u32 {
        self.entries.iter().map(|e| e.1).max().unwrap_or(0)
    }

    pub fn max_position(&self) -> Option<u32> {
        self.entries.last().map(|e| e.0)
    }

    /// Type signature `[(value, multiplicity)]`, ascending by value.
    pub fn signature(&self) -> Vec<(u32, u32)> {
        let mut m: BTreeMap<u32, u32> = BTreeMap::new();
        for &(_, x) in &self.entries {
            *m.entry(x).or_default() += 1;
        }
        m.into_iter().collect()
    }

    /// Positions relabelled through `f`; values untouched.
    pub fn map_positions(&self, mut f: impl FnMut(u32) -> u32) -> Self {
        let mut e: Vec<(u32, u32)> = self.entries.iter().map(|&(p, x)| (f(p), x)).collect();
        e.sort_unstable();
        Codeword { entries: e }
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, x)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}_{x}")?;
        }
        write!(f, "}}")
    }
}

/// `n`, alphabet bound `q` (0 = unbounded), weight `w`, even distance `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodeParams {
    pub n: u32,
    pub q: u32,
    pub w: u32,
    pub d: u32,
}

pub const UNBOUNDED: u32 = 0;

impl CodeParams {
    /// Validates and rounds an odd distance up; the second value is the
    /// notice to show when that happened.
    pub fn normalize(n: u32, q: u32, w: u32, d: u32) -> Result<(Self, Option<String>)> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if w == 0 {
            return Err(Error::InvalidParams("w must be at least 1".into()));
        }
        if q == 1 {
            return Err(Error::InvalidParams("q must be at least 2 or unbounded".into()));
        }
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        let (d, notice) = if d % 2 == 1 {
            (d + 1, Some(format!("odd distance {d} replaced by {}", d + 1)))
        } else {
            (d, None)
        };
        Ok((CodeParams { n, q, w, d }, notice))
    }

    pub fn new(n: u32, q: u32, w: u32, d: u32) -> Result<Self> {
        let (p, notice) = Self::normalize(n, q, w, d)?;
        if let Some(msg) = notice {
            log::info!("{msg}");
        }
        Ok(p)
    }

    pub fn ternary(n: u32, w: u32, d: u32) -> Self {
        Self::new(n, 3, w, d).expect("valid ternary parameters")
    }

    pub fn unbounded(n: u32, w: u32, d: u32) -> Self {
        Self::new(n, UNBOUNDED, w, d).expect("valid parameters")
    }

    pub fn is_unbounded(&self) -> bool {
        self.q == UNBOUNDED
    }

    /// Largest entry a codeword may hold.
    pub fn max_entry(&self) -> u32 {
        if self.is_unbounded() {
            self.w
        } else {
            (self.q - 1).min(self.w)
        }
    }

    pub fn t(&self) -> u32 {
        self.d / 2
    }

    pub fn tau(&self) -> i64 {
        self.w as i64 - self.t() as i64 + 1
    }

    pub fn q_label(&self) -> String {
        if self.is_unbounded() {
            "inf".into()
        } else {
            self.q.to_string()
        }
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})_{}", self.n, self.d, self.w, self.q_label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    pub params: CodeParams,
    pub words: Vec<Codeword>,
}

impl Code {
    pub fn new(params: CodeParams, words: Vec<Codeword>) -> Self {
        Code { params, words }
    }

    /// Sorted and deduplicated copy.
    pub fn canonical(params: CodeParams, mut words: Vec<Codeword>) -> Self {
        words.sort();
        words.dedup();
        Code { params, words }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn canonicalize(&mut self) {
        self.words.sort();
        self.words.dedup();
    }
}

pub fn l1_weight(u: &Codeword) -> u32 {
    u.entries.iter().map(|e| e.1).sum()
}

pub fn l1_distance(u: &Codeword, v: &Codeword) -> u32 {
    let (a, b) = (&u.entries, &v.entries);
    let (mut i, mut j, mut d) = (0, 0, 0u32);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                d += a[i].1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                d += b[j].1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                d += a[i].1.abs_diff(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    d + a[i..].iter().map(|e| e.1).sum::<u32>() + b[j..].iter().map(|e| e.1).sum::<u32>()
}

/// Sum over common support of `min(u_x, v_x)`.
pub fn overlap(u: &Codeword, v: &Codeword) -> u32 {
    let (a, b) = (&u.entries, &v.entries);
    let (mut i, mut j, mut s) = (0, 0, 0u32);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1.min(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// `2w - 2 * overlap(u, v)` for two words of the same weight `w`.
pub fn distance_via_overlap(u: &Codeword, v: &Codeword) -> Result<u32> {
    let (wu, wv) = (l1_weight(u), l1_weight(v));
    if wu != wv {
        return Err(Error::WeightMismatch(wu, wv));
    }
    Ok(2 * wu - 2 * overlap(u, v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MinDistance {
    /// Fewer than two words.
    Unconstrained,
    Value(u32),
}

impl MinDistance {
    pub fn value(self) -> Option<u32> {
        match self {
            MinDistance::Unconstrained => None,
            MinDistance::Value(v) => Some(v),
        }
    }

    pub fn at_least(self, d: u32) -> bool {
        match self {
            MinDistance::Unconstrained => true,
            MinDistance::Value(v) => v >= d,
        }
    }
}

impl fmt::Display for MinDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinDistance::Unconstrained => write!(f, "unconstrained"),
            MinDistance::Value(v) => write!(f, "{v}"),
        }
    }
}

/// Cap on how many short pairs a report lists.
pub const MAX_LISTED_PAIRS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub params: CodeParams,
    pub size: usize,
    pub min_distance: MinDistance,
    pub closest_pair: Option<(usize, usize)>,
    pub weight_violations: Vec<usize>,
    pub alphabet_violations: Vec<usize>,
    pub length_violations: Vec<usize>,
    pub duplicate_count: usize,
    /// Number of pairs closer than `d`.
    pub short_pairs: usize,
    /// The first few of them as `(i, j, distance)`.
    pub distance_violations: Vec<(usize, usize, u32)>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.weight_violations.is_empty()
            && self.alphabet_violations.is_empty()
            && self.length_violations.is_empty()
            && self.duplicate_count == 0
            && self.short_pairs == 0
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "params        {}", self.params)?;
        writeln!(f, "size          {}", self.size)?;
        writeln!(f, "min distance  {}", self.min_distance)?;
        if let Some((i, j)) = self.closest_pair {
            writeln!(f, "closest pair  words {i} and {j}")?;
        }
        writeln!(f, "weight violations   {:?}", self.weight_violations)?;
        writeln!(f, "alphabet violations {:?}", self.alphabet_violations)?;
        writeln!(f, "length violations   {:?}", self.length_violations)?;
        writeln!(f, "duplicates          {}", self.duplicate_count)?;
        writeln!(f, "pairs below d       {}", self.short_pairs)?;
        for (i, j, dist) in &self.distance_violations {
            writeln!(f, "  words {i} and {j} at distance {dist}")?;
        }
        write!(f, "valid         {}", self.is_valid())
    }
}

pub fn verify_code(code: &Code) -> VerificationReport {
    verify_code_with(code, Strategy::default())
}

pub fn verify_code_with(code: &Code, strategy: Strategy) -> VerificationReport {
    let p = code.params;
    let words = &code.words;
    let mut weight_violations = Vec::new();
    let mut alphabet_violations = Vec::new();
    let mut length_violations = Vec::new();
    for (i, u) in words.iter().enumerate() {
        if u.weight() != p.w {
            weight_violations.push(i);
        }
        if u.max_value() > p.max_entry() {
            alphabet_violations.push(i);
        }
        if u.max_position().is_some_and(|m| m >= p.n) {
            length_violations.push(i);
        }
    }

    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| words[a].cmp(&words[b]));
    let duplicate_count = order.windows(2).filter(|w| words[w[0]] == words[w[1]]).count();

    // Per-row scan: (closest j, its distance, short count, first short pairs).
    let rows = par::map_indexed(strategy, words.len(), |i| {
        let mut best: Option<(u32, usize)> = None;
        let mut short = 0usize;
        let mut listed = Vec::new();
        for j in i + 1..words.len() {
            let dist = l1_distance(&words[i], &words[j]);
            if best.is_none_or(|(b, _)| dist < b) {
                best = Some((dist, j));
            }
            if dist < p.d {
                short += 1;
                if listed.len() < MAX_LISTED_PAIRS {
                    listed.push((i, j, dist));
                }
            }
        }
        (best, short, listed)
    });

    let mut min: Option<(u32, usize, usize)> = None;
    let mut short_pairs = 0;
    let mut distance_violations = Vec::new();
    for (i, (best, short, listed)) in rows.into_iter().enumerate() {
        if let Some((dist, j)) = best {
            if min.is_none_or(|(m, _, _)| dist < m) {
                min = Some((dist, i, j));
            }
        }
        short_pairs += short;
        for v in listed {
            if distance_violations.len() < MAX_LISTED_PAIRS {
                distance_violations.push(v);
            }
        }
    }

    VerificationReport {
        params: p,
        size: words.len(),
        min_distance: min.map_or(MinDistance::Unconstrained, |m| MinDistance::Value(m.0)),
        closest_pair: min.map(|m| (m.1, m.2)),
        weight_violations,
        alphabet_violations,
        length_violations,
        duplicate_count,
        short_pairs,
        distance_violations,
    }
}

/// Calls `f` on every `k`-subset of the sorted slice `s`.
pub(crate) fn for_each_subset(s: &[u32], k: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(s: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..s.len() {
            if s.len() - i < need {
                break;
            }
            cur.push(s[i]);
            rec(s, k, i + 1, cur, f);
            cur.pop();
        }
    }
    if k > s.len() {
        return;
    }
    let mut cur = Vec::with_capacity(k);
    rec(s, k, 0, &mut cur, f);
}

/// Supports of size at least tau, checked to form a tau-packing.
pub fn unc_packing(code: &Code) -> Result<SetSystem> {
    let tau = code.params.tau().max(1) as usize;
    let mut blocks: Vec<Vec<u32>> = Vec::new();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    for u in &code.words {
        let s = u.support();
        if s.len() < tau {
            continue;
        }
        let idx = blocks.len();
        let mut clash = None;
        for_each_subset(&s, tau, &mut |sub| {
            if clash.is_some() {
                return;
            }
            if let Some(&other) = seen.get(sub) {
                clash = Some((sub.to_vec(), other));
            } else {
                seen.insert(sub.to_vec(), idx);
            }
        });
        if let Some((sub, other)) = clash {
            return Err(Error::PackingViolation {
                tau_subset: sub,
                block1: blocks[other].clone(),
                block2: s,
            });
        }
        blocks.push(s);
    }
    Ok(SetSystem::new(code.params.n, blocks))
}

/// Histogram of type signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TypeCensus {
    pub counts: BTreeMap<Vec<(u32, u32)>, usize>,
}

impl TypeCensus {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn get(&self, signature: &[(u32, u32)]) -> usize {
        self.counts.get(signature).copied().unwrap_or(0)
    }

    /// Counts of `1^4`, `1^2 2^1` and `2^2` words.
    pub fn xyz(&self) -> (usize, usize, usize) {
        (self.get(&[(1, 4)]), self.get(&[(1, 2), (2, 1)]), self.get(&[(2, 2)]))
    }

    pub fn label(signature: &[(u32, u32)]) -> String {
        signature.iter().map(|(v, c)| format!("{v}^{c}")).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for TypeCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.counts.iter().map(|(k, c)| format!("{}: {c}", Self::label(k))).collect();
        write!(f, "{}", parts.join(", "))
    }
}

pub fn type_census(code: &Code) -> TypeCensus {
    let mut counts = BTreeMap::new();
    for u in &code.words {
        *counts.entry(u.signature()).or_default() += 1;
    }
    TypeCensus { counts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Codeword {
        Codeword::from_dense(&s.bytes().map(|b| (b - b'0') as u32).collect::<Vec<_>>())
    }

    #[test]
    fn weights() {
        assert_eq!(l1_weight(&w("1200")), 3);
        assert_eq!(l1_weight(&Codeword::default()), 0);
        assert_eq!(l1_weight(&w("210100")), 4);
    }

    #[test]
    fn distances() {
        assert_eq!(l1_distance(&w("210100"), &w("021010")), 6);
        assert_eq!(l1_distance(&w("210100"), &w("210100")), 0);
        assert_eq!(l1_distance(&w("1200"), &w("0120")), 4);
        assert_eq!(distance_via_overlap(&w("210100"), &w("021010")).unwrap(), 6);
        assert_eq!(distance_via_overlap(&w("110000"), &w("000011")).unwrap(), 4);
        assert_eq!(distance_via_overlap(&w("2101"), &w("2101")).unwrap(), 0);
        assert!(matches!(
            distance_via_overlap(&w("21"), &w("1")),
            Err(Error::WeightMismatch(3, 1))
        ));
    }

    #[test]
    fn codeword_rejects_bad_entries() {
        assert!(Codeword::new(vec![(1, 1), (1, 2)]).is_err());
        assert!(Codeword::new(vec![(1, 0)]).is_err());
        assert_eq!(Codeword::new(vec![(3, 1), (0, 2)]).unwrap().entries(), &[(0, 2), (3, 1)]);
    }

    #[test]
    fn odd_distance_rounds_up() {
        let (p, notice) = CodeParams::normalize(5, 3, 4, 5).unwrap();
        assert_eq!(p.d, 6);
        assert!(notice.is_some());
        assert!(CodeParams::normalize(5, 3, 4, 0).is_err());
        assert!(CodeParams::normalize(0, 3, 4, 2).is_err());
    }

    fn six_code() -> Code {
        let words = ["210100", "021010", "002101", "100012"].iter().map(|s| w(s)).collect();
        Code::new(CodeParams::ternary(6, 4, 6), words)
    }

    #[test]
    fn verify_small_codes() {
        let r = verify_code(&six_code());
        assert!(r.is_valid());
        assert_eq!(r.min_distance, MinDistance::Value(6));

        let single = Code::new(CodeParams::ternary(6, 4, 6), vec![w("210100")]);
        let r = verify_code(&single);
        assert!(r.is_valid());
        assert_eq!(r.min_distance, MinDistance::Unconstrained);

        let dup = Code::new(CodeParams::ternary(6, 4, 6), vec![w("210100"), w("210100")]);
        let r = verify_code(&dup);
        assert_eq!(r.duplicate_count, 1);
        assert!(!r.is_valid());
    }

    #[test]
    fn verify_flags_each_violation_kind() {
        let p = CodeParams::ternary(4, 3, 4);
        let code = Code::new(p, vec![w("3000"), w("1100"), Codeword::binary(&[0, 1, 5])]);
        let r = verify_code(&code);
        assert_eq!(r.alphabet_violations, vec![0]);
        assert_eq!(r.weight_violations, vec![1]);
        assert_eq!(r.length_violations, vec![2]);
    }

    #[test]
    fn sequential_and_parallel_reports_agree() {
        let c = six_code();
        assert_eq!(
            verify_code_with(&c, Strategy::Sequential),
            verify_code_with(&c, Strategy::Parallel)
        );
    }

    #[test]
    fn unc_packing_cases() {
        let seven: Vec<Codeword> = (0..7u32)
            .map(|i| Codeword::new(vec![(i, 2), ((i + 1) % 7, 1), ((i + 3) % 7, 1)]).unwrap())
            .collect();
        let ss = unc_packing(&Code::new(CodeParams::ternary(7, 4, 6), seven)).unwrap();
        assert_eq!(ss.blocks.len(), 7);

        let disjoint = Code::new(CodeParams::ternary(6, 4, 6), vec![w("220000"), w("001111")]);
        assert!(unc_packing(&disjoint).is_ok());

        let clash =
            Code::new(CodeParams::ternary(5, 4, 6), vec![Codeword::binary(&[0, 1, 2, 3]), Codeword::binary(&[0, 1, 2, 4])]);
        assert!(matches!(unc_packing(&clash), Err(Error::PackingViolation { .. })));
    }

    #[test]
    fn census_of_small_codes() {
        let six = Code::new(
            CodeParams::ternary(6, 4, 6),
            vec![
                Codeword::new(vec![(0, 2), (1, 1), (3, 1)]).unwrap(),
                Codeword::new(vec![(1, 2), (2, 1), (4, 1)]).unwrap(),
                Codeword::new(vec![(2, 2), (3, 1), (5, 1)]).unwrap(),
                Codeword::new(vec![(4, 1), (5, 2), (0, 1)]).unwrap(),
                Codeword::new(vec![(3, 2), (4, 2)]).unwrap(),
            ],
        );
        let c = type_census(&six);
        assert_eq!(c.xyz(), (0, 4, 1));
        assert_eq!(c.counts.len(), 2);

        let bin = Code::new(CodeParams::ternary(4, 2, 2), vec![w("1100"), w("0011")]);
        let c = type_census(&bin);
        assert_eq!(c.counts.len(), 1);
        assert_eq!(c.get(&[(1, 2)]), 2);
    }
}
