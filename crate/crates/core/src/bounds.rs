//! Closed-form packing numbers, code-size bounds, the known-value ledger
//! and 4-GDD existence lookups.

use std::fmt;

use serde::Serialize;

use crate::code::CodeParams;
use crate::error::{Error, Result};

/// Maximum number of triples with every pair covered at most once.
pub fn d_triples_pairs(n: u64) -> u64 {
    let base = n * ((n.saturating_sub(1)) / 2) / 3;
    if n % 6 == 5 {
        base - 1
    } else {
        base
    }
}

/// Maximum number of quadruples with every pair covered at most once.
pub fn d_quads_pairs(n: u64) -> u64 {
    match n {
        8 => return 2,
        9 => return 3,
        10 => return 5,
        11 => return 6,
        17 => return 20,
        19 => return 25,
        _ => {}
    }
    let base = n * ((n.saturating_sub(1)) / 3) / 4;
    if n % 12 == 7 || n % 12 == 10 {
        base - 1
    } else {
        base
    }
}

/// Maximum number of quadruples with every triple covered at most once.
pub fn d_quads_triples(n: u64) -> u64 {
    if n < 4 {
        return 0;
    }
    let inner = (n - 1) * ((n - 2) / 2) / 3;
    if n.is_multiple_of(6) {
        n * (inner - 1) / 4
    } else {
        n * inner / 4
    }
}

/// `floor(n(n+5)/12)`: size cap for ternary weight-4 distance-6 codes.
pub fn u_bound(n: u64) -> u64 {
    n * (n + 5) / 12
}

/// `floor(n(n-1-(w-1)(w-2)) / (w(w-1)))`; negative for small `n`.
pub fn b_bound(n: u64, w: u64) -> i64 {
    let (n, w) = (n as i64, w as i64);
    (n * (n - 1 - (w - 1) * (w - 2))).div_euclid(w * (w - 1))
}

/// `floor((n^2+3n)/6)`: size of optimal ternary weight-3 distance-4 codes.
pub fn weight3_ternary_value(n: u64) -> u64 {
    (n * n + 3 * n) / 6
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Number of length-`n` vectors with entries below `q` (0 = unbounded)
/// summing to `w`. `None` on overflow.
pub fn count_weight_vectors(n: u64, q: u64, w: u64) -> Option<u128> {
    if n == 0 {
        return Some(u128::from(w == 0));
    }
    if q == 0 || q > w {
        return binomial(n + w - 1, w);
    }
    let mut total: i128 = 0;
    for j in 0..=(w / q) {
        if j > n {
            break;
        }
        let rest = w - j * q;
        let term = binomial(n, j)?.checked_mul(binomial(n - 1 + rest, rest)?)?;
        let term = i128::try_from(term).ok()?;
        total = if j % 2 == 0 { total.checked_add(term)? } else { total.checked_sub(term)? };
    }
    u128::try_from(total).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    Exact(u128),
    UpperOnly(u128),
    Range(u128, u128),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub source: String,
}

impl BoundResult {
    fn exact(v: u128, source: &str) -> Self {
        BoundResult { kind: BoundKind::Exact(v), source: source.into() }
    }

    fn upper(v: u128, source: &str) -> Self {
        BoundResult { kind: BoundKind::UpperOnly(v), source: source.into() }
    }

    /// Largest value consistent with the result.
    pub fn upper_value(&self) -> u128 {
        match self.kind {
            BoundKind::Exact(v) | BoundKind::UpperOnly(v) | BoundKind::Range(_, v) => v,
        }
    }

    /// Best certified lower value, if any.
    pub fn lower_value(&self) -> Option<u128> {
        match self.kind {
            BoundKind::Exact(v) | BoundKind::Range(v, _) => Some(v),
            BoundKind::UpperOnly(_) => None,
        }
    }
}

impl fmt::Display for BoundResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            BoundKind::Exact(v) => write!(f, "Exact {v} ({})", self.source),
            BoundKind::UpperOnly(v) => write!(f, "UpperOnly {v} ({})", self.source),
            BoundKind::Range(lo, hi) => write!(f, "Range {lo}..{hi} ({})", self.source),
        }
    }
}

/// The alphabet bound stops mattering once every entry up to `w` fits.
fn effectively_unbounded(p: &CodeParams) -> bool {
    p.is_unbounded() || p.q > p.w
}

pub fn trivial_value(p: &CodeParams) -> Option<BoundResult> {
    let (n, w, d) = (p.n as u64, p.w as u64, p.d as u64);
    let q = if effectively_unbounded(p) { 0 } else { p.q as u64 };
    let count = count_weight_vectors(n, q, w);
    if count == Some(0) {
        return Some(BoundResult::exact(0, "no vector of this weight"));
    }
    if 2 * w < d {
        return Some(BoundResult::exact(1, "weight below half the distance"));
    }
    if d == 2 * w {
        let v = if q == 0 { n } else { n / w.div_ceil(q - 1) };
        return Some(BoundResult::exact(v as u128, "disjoint supports"));
    }
    if d == 2 {
        return count.map(|c| BoundResult::exact(c, "all vectors of weight w"));
    }
    None
}

pub fn upper_bound(p: &CodeParams) -> Result<BoundResult> {
    if let Some(t) = trivial_value(p) {
        return Ok(t);
    }
    let (n, w, d) = (p.n as u64, p.w, p.d);
    let pairs = binomial(n, 2).unwrap_or(0);
    if effectively_unbounded(p) {
        let v = match (w, d) {
            (3, 4) => d_triples_pairs(n) as u128 + n as u128,
            (4, 4) => d_quads_triples(n) as u128 + pairs + n as u128,
            (4, 6) => d_quads_pairs(n) as u128 + n as u128,
            _ => return Err(Error::Unsupported(format!("no bound for {p}"))),
        };
        return Ok(BoundResult::upper(v, "packing count over the nonnegative integers"));
    }
    if p.q == 3 {
        match (w, d) {
            (3, 4) => return Ok(BoundResult::upper(weight3_ternary_value(n) as u128, "pair and symbol-2 count")),
            (4, 4) => {
                return Ok(BoundResult::upper(d_quads_triples(n) as u128 + pairs, "triple packing plus 2^2 words"))
            }
            (4, 6) => return Ok(BoundResult::upper(u_bound(n) as u128, "pair and symbol-2 count")),
            _ if w >= 3 && d == 2 * w - 2 => {
                let v = (b_bound(n, w as u64) + n as i64).max(0) as u128;
                return Ok(BoundResult::upper(v, "pair and symbol-2 count, general weight"));
            }
            _ => {}
        }
    }
    Err(Error::Unsupported(format!("no bound for {p}")))
}

/// Lengths whose ternary weight-4 distance-6 value is only bracketed.
pub const OPEN_RANGES: [(u64, u64, u64); 22] = [
    (14, 21, 22),
    (17, 30, 31),
    (18, 33, 34),
    (24, 55, 58),
    (35, 114, 116),
    (42, 161, 164),
    (44, 176, 179),
    (47, 200, 203),
    (56, 280, 284),
    (59, 310, 314),
    (68, 409, 413),
    (71, 445, 449),
    (72, 461, 462),
    (78, 538, 539),
    (80, 562, 566),
    (83, 603, 608),
    (84, 616, 623),
    (90, 705, 712),
    (92, 738, 743),
    (95, 786, 791),
    (96, 803, 808),
    (102, 901, 909),
];

/// Lengths where the ternary weight-4 distance-6 optimum is `U(n) - 1`.
pub const U_MINUS_ONE: [u64; 4] = [3, 4, 5, 12];

pub fn open_range(n: u64) -> Option<(u64, u64)> {
    OPEN_RANGES.iter().find(|r| r.0 == n).map(|r| (r.1, r.2))
}

pub fn known_value(p: &CodeParams) -> BoundResult {
    if let Some(t) = trivial_value(p) {
        return t;
    }
    let (n, w, d) = (p.n as u64, p.w, p.d);
    let pairs = binomial(n, 2).unwrap_or(0);
    if effectively_unbounded(p) {
        match (w, d) {
            (3, 4) => {
                return BoundResult::exact(d_triples_pairs(n) as u128 + n as u128, "triple packing plus singletons")
            }
            (4, 4) => {
                return BoundResult::exact(
                    d_quads_triples(n) as u128 + pairs + n as u128,
                    "triple-packing quadruples plus 2^2 and 4^1 words",
                )
            }
            (4, 6) => {
                return BoundResult::exact(d_quads_pairs(n) as u128 + n as u128, "pair-packing quadruples plus singletons")
            }
            _ => {}
        }
    } else if p.q == 3 {
        match (w, d) {
            (3, 4) => return BoundResult::exact(weight3_ternary_value(n) as u128, "congruence-class constructions"),
            (4, 4) => return BoundResult::exact(d_quads_triples(n) as u128 + pairs, "triple packing plus 2^2 words"),
            (4, 6) => {
                let u = u_bound(n) as u128;
                if U_MINUS_ONE.contains(&n) {
                    return BoundResult::exact(u - 1, &format!("length-{n} exception"));
                }
                if let Some((lo, hi)) = open_range(n) {
                    return BoundResult {
                        kind: BoundKind::Range(lo as u128, hi as u128),
                        source: "open length, bracketed".into(),
                    };
                }
                return BoundResult::exact(u, "meets the pair and symbol-2 count");
            }
            _ => {}
        }
    }
    match upper_bound(p) {
        Ok(b) => b,
        Err(_) => match count_weight_vectors(n, if effectively_unbounded(p) { 0 } else { p.q as u64 }, w as u64) {
            Some(c) => BoundResult::upper(c, "total number of weight-w vectors"),
            None => BoundResult::upper(u128::MAX, "count overflows"),
        },
    }
}

/// Cap on the number of 2^2 words in a code meeting `U(n)`.
pub fn z_cap(n: u64) -> u64 {
    match n % 12 {
        0 | 3 | 4 | 7 => 0,
        2 | 5 => 1,
        1 | 6 | 9 | 10 => 3,
        _ => 4,
    }
}

/// 4-GDD type `g^u m^1`; `m = 0` means no tail group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GddType {
    pub g: u64,
    pub u: u64,
    pub m: u64,
}

impl GddType {
    pub fn new(g: u64, u: u64, m: u64) -> Self {
        GddType { g, u, m }
    }

    pub fn order(&self) -> u64 {
        self.g * self.u + self.m
    }

    pub fn group_count(&self) -> u64 {
        self.u + u64::from(self.m > 0)
    }
}

impl fmt::Display for GddType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.g, self.u)?;
        if self.m > 0 {
            write!(f, " {}^1", self.m)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GddStatus {
    Exists,
    DoesNotExist,
    /// Listed as a possible exception; unresolved.
    OpenInLiterature,
    /// Outside every clause of the lookup.
    NotCovered,
}

const SPORADIC: [(u64, u64, u64); 14] = [
    (6, 7, 0),
    (6, 15, 0),
    (6, 11, 30),
    (6, 12, 30),
    (7, 4, 0),
    (7, 12, 10),
    (9, 4, 0),
    (9, 4, 6),
    (9, 5, 0),
    (9, 5, 6),
    (27, 4, 0),
    (27, 4, 9),
    (27, 5, 0),
    (39, 4, 6),
];

const POSSIBLE_EXCEPTIONS: [(u64, u64, u64); 9] = [
    (2, 33, 23),
    (2, 33, 29),
    (2, 39, 35),
    (6, 13, 27),
    (6, 13, 33),
    (6, 17, 39),
    (6, 19, 45),
    (6, 19, 51),
    (6, 23, 63),
];

fn status_raw(t: GddType) -> GddStatus {
    let GddType { g, u, m } = t;
    if g == 0 || u == 0 {
        return GddStatus::NotCovered;
    }
    if POSSIBLE_EXCEPTIONS.contains(&(g, u, m)) {
        return GddStatus::OpenInLiterature;
    }
    if SPORADIC.contains(&(g, u, m)) {
        return GddStatus::Exists;
    }
    let groups = t.group_count();
    if groups <= 1 {
        // No cross pairs, so the empty block set works.
        return GddStatus::Exists;
    }
    if groups < 4 {
        // A block of size 4 needs four distinct groups.
        return GddStatus::DoesNotExist;
    }
    match g {
        2 => {
            if (u, m) == (6, 5) {
                GddStatus::DoesNotExist
            } else if u >= 6 && u % 3 == 0 && m % 3 == 2 && m >= 2 && m < u {
                GddStatus::Exists
            } else {
                GddStatus::NotCovered
            }
        }
        12 => {
            let ok = (u == 3 && m == 12) || (u >= 4 && m % 3 == 0 && m <= 6 * (u - 1));
            if ok {
                GddStatus::Exists
            } else {
                GddStatus::DoesNotExist
            }
        }
        15 => {
            let ok = match u % 4 {
                0 => m % 3 == 0 && 2 * m + 18 <= 15 * u,
                1 => m % 6 == 0 && 2 * m + 15 <= 15 * u,
                3 => m % 6 == 3 && m > 0 && 2 * m + 15 <= 15 * u,
                _ => false,
            };
            if ok {
                GddStatus::Exists
            } else {
                GddStatus::DoesNotExist
            }
        }
        24 | 36 if u >= 4 => {
            let cap = if g == 24 { 12 } else { 18 } * (u - 1);
            if m % 3 == 0 && m <= cap {
                GddStatus::Exists
            } else {
                GddStatus::DoesNotExist
            }
        }
        _ => GddStatus::NotCovered,
    }
}

/// Existence lookup. A tail group of size `g` is folded into the groups.
pub fn gdd4_status(t: GddType) -> GddStatus {
    let s = status_raw(t);
    if t.m == t.g && t.m > 0 {
        let folded = status_raw(GddType::new(t.g, t.u + 1, 0));
        let rank = |s: GddStatus| match s {
            GddStatus::Exists => 3,
            GddStatus::DoesNotExist => 2,
            GddStatus::OpenInLiterature => 1,
            GddStatus::NotCovered => 0,
        };
        if rank(folded) > rank(s) {
            return folded;
        }
    }
    s
}

pub fn gdd4_exists(t: GddType) -> bool {
    gdd4_status(t) == GddStatus::Exists
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_number_examples() {
        assert_eq!(d_triples_pairs(7), 7);
        assert_eq!(d_triples_pairs(5), 2);
        assert_eq!(d_triples_pairs(3), 1);
        assert_eq!(d_quads_pairs(8), 2);
        assert_eq!(d_quads_pairs(13), 13);
        assert_eq!(d_quads_pairs(4), 1);
        assert_eq!(d_quads_triples(6), 3);
        assert_eq!(d_quads_triples(4), 1);
        // Steiner quadruple system of order 8.
        assert_eq!(d_quads_triples(8), 14);
    }

    #[test]
    fn u_and_b_examples() {
        assert_eq!(u_bound(12), 17);
        assert_eq!(u_bound(6), 5);
        for n in 3..=100 {
            assert_eq!(b_bound(n, 3) + n as i64, weight3_ternary_value(n) as i64, "n={n}");
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_weight_vectors(3, 2, 2), Some(3));
        assert_eq!(count_weight_vectors(5, 3, 0), Some(1));
        assert_eq!(count_weight_vectors(2, 3, 2), Some(3));
        assert_eq!(count_weight_vectors(2, 3, 4), Some(1));
        assert_eq!(count_weight_vectors(4, 3, 3), Some(16));
        assert_eq!(count_weight_vectors(4, 0, 3), Some(20));
    }

    #[test]
    fn trivial_examples() {
        let p = CodeParams::ternary(6, 4, 8);
        assert_eq!(trivial_value(&p).unwrap().kind, BoundKind::Exact(3));
        let p = CodeParams::unbounded(5, 2, 6);
        assert_eq!(trivial_value(&p).unwrap().kind, BoundKind::Exact(1));
        let p = CodeParams::new(3, 2, 2, 2).unwrap();
        assert_eq!(trivial_value(&p).unwrap().kind, BoundKind::Exact(3));
        assert_eq!(trivial_value(&CodeParams::ternary(9, 4, 6)), None);
    }

    #[test]
    fn upper_examples() {
        assert_eq!(upper_bound(&CodeParams::ternary(9, 3, 4)).unwrap().kind, BoundKind::UpperOnly(18));
        assert_eq!(upper_bound(&CodeParams::ternary(12, 4, 6)).unwrap().kind, BoundKind::UpperOnly(17));
        let v = (b_bound(41, 5) + 41) as u128;
        assert_eq!(upper_bound(&CodeParams::ternary(41, 5, 8)).unwrap().kind, BoundKind::UpperOnly(v));
        assert!(upper_bound(&CodeParams::new(10, 2, 4, 4).unwrap()).is_err());
    }

    #[test]
    fn known_examples() {
        assert_eq!(known_value(&CodeParams::ternary(12, 4, 6)).kind, BoundKind::Exact(16));
        assert_eq!(known_value(&CodeParams::ternary(14, 4, 6)).kind, BoundKind::Range(21, 22));
        assert_eq!(known_value(&CodeParams::unbounded(7, 3, 4)).kind, BoundKind::Exact(14));
        assert_eq!(known_value(&CodeParams::ternary(36, 4, 6)).kind, BoundKind::Exact(123));
    }

    #[test]
    fn z_cap_examples() {
        assert_eq!(z_cap(12), 0);
        assert_eq!(z_cap(26), 1);
        assert_eq!(z_cap(20), 4);
        assert_eq!(z_cap(13), 3);
    }

    #[test]
    fn gdd_examples() {
        assert!(!gdd4_exists(GddType::new(2, 6, 5)));
        assert_eq!(gdd4_status(GddType::new(2, 6, 5)), GddStatus::DoesNotExist);
        assert!(gdd4_exists(GddType::new(36, 4, 0)));
        assert!(gdd4_exists(GddType::new(6, 7, 0)));
        assert_eq!(gdd4_status(GddType::new(2, 33, 23)), GddStatus::OpenInLiterature);
        assert!(!gdd4_exists(GddType::new(2, 33, 23)));
        assert!(gdd4_exists(GddType::new(12, 3, 12)));
        assert!(gdd4_exists(GddType::new(12, 4, 0)));
        assert!(!gdd4_exists(GddType::new(12, 4, 1)));
        assert!(gdd4_exists(GddType::new(15, 4, 0)));
        assert!(gdd4_exists(GddType::new(15, 3, 9)));
        assert!(gdd4_exists(GddType::new(24, 4, 36)));
        assert!(!gdd4_exists(GddType::new(24, 4, 39)));
        // Two mutually orthogonal latin squares of order 6 do not exist.
        assert_eq!(gdd4_status(GddType::new(6, 4, 0)), GddStatus::NotCovered);
        assert_eq!(gdd4_status(GddType::new(5, 2, 0)), GddStatus::DoesNotExist);
    }
}
