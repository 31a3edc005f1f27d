//! Explicit constructions of optimal and near-optimal codes.

use std::collections::BTreeMap;

use crate::bounds::{
    b_bound, binomial, d_quads_pairs, d_quads_triples, known_value, u_bound, weight3_ternary_value,
    BoundKind,
};
use crate::code::{type_census, unc_packing, verify_code, Code, CodeParams, Codeword};
use crate::designs::{
    catalog, find_packing, gdd_3_type3u, packing_with_leave, sts, Gdd, HillClimbBudget, LeaveSpec,
    PackSearch, SetSystem, DEFAULT_SEED,
};
use crate::develop::{table_for_length, table_text, verify_table_text, TABLES};
use crate::error::{Error, Result};
use crate::par::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub seed: u64,
    pub hill_climb: HillClimbBudget,
    /// Node budget for exact packing searches.
    pub packing_nodes: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { seed: DEFAULT_SEED, hill_climb: HillClimbBudget::default(), packing_nodes: 20_000_000 }
    }
}

fn word(entries: &[(u32, u32)]) -> Codeword {
    Codeword::new(entries.to_vec()).expect("distinct positions")
}

/// Verifies and canonicalizes; an invalid result is an internal error.
fn finish(params: CodeParams, words: Vec<Codeword>, what: &str) -> Result<Code> {
    let code = Code::canonical(params, words);
    let rep = verify_code(&code);
    if !rep.is_valid() {
        return Err(Error::Verification(format!("{what}: {} pairs below d, first {:?}", rep.short_pairs, rep.distance_violations.first())));
    }
    Ok(code)
}

fn blocks_as_words(ss: &SetSystem) -> impl Iterator<Item = Codeword> + '_ {
    ss.blocks.iter().map(|b| Codeword::binary(b))
}

/// Maximum triangle packing with the standard leave for each residue of `n` mod 6.
pub fn optimal_triple_packing(n: u32, opts: &BuildOptions) -> Result<SetSystem> {
    if n < 3 {
        return Ok(SetSystem::new(n, Vec::new()));
    }
    let spec = match n % 6 {
        1 | 3 => return sts(n),
        0 | 2 => LeaveSpec::ExplicitEdges((0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect()),
        4 => {
            let mut e = vec![(0, 1), (0, 2), (0, 3)];
            e.extend((2..n / 2).map(|i| (2 * i, 2 * i + 1)));
            LeaveSpec::ExplicitEdges(e)
        }
        _ => LeaveSpec::FourCycleOnFirst,
    };
    packing_with_leave(n, &spec, opts.hill_climb, opts.seed).map_err(|_| Error::PackingUnavailable(n))
}

/// Maximum `t`-packing by quadruples via exact search.
pub fn optimal_quad_packing(n: u32, t: usize, opts: &BuildOptions) -> Result<SetSystem> {
    let target = if t == 2 { d_quads_pairs(n as u64) } else { d_quads_triples(n as u64) } as usize;
    match find_packing(n, 4, t, target, opts.packing_nodes, Strategy::default()) {
        PackSearch::Found(s) => Ok(s),
        _ => Err(Error::PackingUnavailable(n)),
    }
}

/// Triple packing as `1^3` words plus every `3^1` word.
pub fn build_z_w3_d4(n: u32) -> Result<Code> {
    build_z_w3_d4_with(n, &BuildOptions::default())
}

pub fn build_z_w3_d4_with(n: u32, opts: &BuildOptions) -> Result<Code> {
    let ss = optimal_triple_packing(n, opts)?;
    let mut words: Vec<Codeword> = blocks_as_words(&ss).collect();
    words.extend((0..n).map(|i| word(&[(i, 3)])));
    finish(CodeParams::unbounded(n, 3, 4), words, "z w3 d4")
}

/// Triple-packing quadruples plus every `2^2` and `4^1` word.
pub fn build_z_w4_d4(n: u32) -> Result<Code> {
    build_z_w4_d4_with(n, &BuildOptions::default())
}

pub fn build_z_w4_d4_with(n: u32, opts: &BuildOptions) -> Result<Code> {
    let ss = optimal_quad_packing(n, 3, opts)?;
    let mut words: Vec<Codeword> = blocks_as_words(&ss).collect();
    words.extend(all_two_two(n));
    words.extend((0..n).map(|i| word(&[(i, 4)])));
    finish(CodeParams::unbounded(n, 4, 4), words, "z w4 d4")
}

/// Pair-packing quadruples plus every `4^1` word.
pub fn build_z_w4_d6(n: u32) -> Result<Code> {
    build_z_w4_d6_with(n, &BuildOptions::default())
}

pub fn build_z_w4_d6_with(n: u32, opts: &BuildOptions) -> Result<Code> {
    let ss = optimal_quad_packing(n, 2, opts)?;
    let mut words: Vec<Codeword> = blocks_as_words(&ss).collect();
    words.extend((0..n).map(|i| word(&[(i, 4)])));
    finish(CodeParams::unbounded(n, 4, 6), words, "z w4 d6")
}

fn all_two_two(n: u32) -> impl Iterator<Item = Codeword> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| word(&[(i, 2), (j, 2)])))
}

/// Optimal ternary weight-3 distance-4 code, one recipe per residue of `n` mod 6.
pub fn build_t3_w3_d4(n: u32) -> Result<Code> {
    build_t3_w3_d4_with(n, &BuildOptions::default())
}

pub fn build_t3_w3_d4_with(n: u32, opts: &BuildOptions) -> Result<Code> {
    let p = CodeParams::ternary(n, 3, 4);
    let mut words = Vec::new();
    match n {
        0 | 1 => {}
        2 => words.push(word(&[(0, 1), (1, 2)])),
        _ => match n % 6 {
            2 | 4 => {
                let inf = n - 1;
                words.extend(blocks_as_words(&sts(n - 1)?));
                words.extend((0..inf).map(|i| word(&[(i, 2), (inf, 1)])));
            }
            3 => {
                if n > 3 {
                    words.extend(gdd_3_type3u(n / 3)?.blocks.iter().map(|b| Codeword::binary(b)));
                }
                for g in 0..n / 3 {
                    let (a, b, c) = (3 * g, 3 * g + 1, 3 * g + 2);
                    words.push(word(&[(a, 1), (b, 2)]));
                    words.push(word(&[(b, 1), (c, 2)]));
                    words.push(word(&[(c, 1), (a, 2)]));
                }
            }
            1 | 5 => {
                let m = n - 1;
                let ss = packing_with_leave(n, &LeaveSpec::CycleOnFirst(m), opts.hill_climb, opts.seed)
                    .map_err(|_| Error::PackingUnavailable(n))?;
                words.extend(blocks_as_words(&ss));
                words.extend((0..m).map(|i| word(&[(i, 1), ((i + 1) % m, 2)])));
            }
            _ => {
                // n = 0 mod 6: leave is the cycle (0 1 2 3) on n-1 points, infinity is n-1.
                let inf = n - 1;
                let ss = packing_with_leave(n - 1, &LeaveSpec::FourCycleOnFirst, opts.hill_climb, opts.seed)
                    .map_err(|_| Error::PackingUnavailable(n))?;
                words.extend(blocks_as_words(&ss));
                words.push(word(&[(1, 1), (2, 1), (inf, 1)]));
                words.push(word(&[(0, 2), (inf, 1)]));
                words.push(word(&[(0, 1), (1, 2)]));
                words.push(word(&[(2, 2), (3, 1)]));
                words.push(word(&[(0, 1), (3, 2)]));
                words.push(word(&[(3, 1), (inf, 2)]));
                words.extend((4..inf).map(|i| word(&[(i, 2), (inf, 1)])));
            }
        },
    }
    let code = finish(p, words, "t3 w3 d4")?;
    debug_assert_eq!(code.len() as u64, weight3_ternary_value(n as u64));
    Ok(code)
}

/// Triple-packing quadruples plus every `2^2` word.
pub fn build_t3_w4_d4(n: u32) -> Result<Code> {
    build_t3_w4_d4_with(n, &BuildOptions::default())
}

pub fn build_t3_w4_d4_with(n: u32, opts: &BuildOptions) -> Result<Code> {
    let ss = optimal_quad_packing(n, 3, opts)?;
    let mut words: Vec<Codeword> = blocks_as_words(&ss).collect();
    words.extend(all_two_two(n));
    finish(CodeParams::ternary(n, 4, 4), words, "t3 w4 d4")
}

/// Short codes for lengths 1 to 4: `2^2` words on disjoint pairs.
fn tiny_w4_d6(n: u32) -> Code {
    let words = (0..n / 2).map(|i| word(&[(2 * i, 2), (2 * i + 1, 2)])).collect();
    Code::new(CodeParams::ternary(n, 4, 6), words)
}

/// A recipe that fills the groups of a catalog 4-GDD.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GddRecipe {
    pub n: u32,
    pub gdd: &'static str,
    /// Points adjoined to every group.
    pub extra: u32,
    pub group_table: &'static str,
}

pub const GDD_RECIPES: [GddRecipe; 9] = [
    GddRecipe { n: 28, gdd: "7^4", extra: 0, group_table: "n7" },
    GddRecipe { n: 37, gdd: "9^4", extra: 1, group_table: "n10" },
    GddRecipe { n: 42, gdd: "6^7", extra: 0, group_table: "n6" },
    GddRecipe { n: 49, gdd: "12^4", extra: 1, group_table: "eg13" },
    GddRecipe { n: 60, gdd: "15^4", extra: 0, group_table: "tab-15" },
    GddRecipe { n: 98, gdd: "24^4", extra: 2, group_table: "eg26" },
    GddRecipe { n: 108, gdd: "27^4", extra: 0, group_table: "tab-27" },
    GddRecipe { n: 110, gdd: "27^4", extra: 2, group_table: "tab-29" },
    GddRecipe { n: 144, gdd: "36^4", extra: 0, group_table: "eg36" },
];

pub fn table_code(id: &str) -> Result<Code> {
    Ok(verify_table_text(id, &table_text(id)?)?.code)
}

/// Lengths `build_t3_w4_d6` can produce.
pub fn covered_w4_d6_lengths() -> Vec<u32> {
    let mut v: Vec<u32> = (1..=4).collect();
    for (id, _) in TABLES {
        let s = id.trim_start_matches("tab-").trim_start_matches("eg").trim_start_matches('n');
        if let Ok(n) = s.parse() {
            v.push(n);
        }
    }
    v.extend(GDD_RECIPES.iter().map(|r| r.n));
    v.sort_unstable();
    v.dedup();
    v
}

/// How `build_t3_w4_d6` obtained its code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum W4D6Source {
    Tiny,
    Table(&'static str),
    Gdd(GddRecipe),
}

/// Ternary weight-4 distance-6 code of the best known size for the lengths
/// covered by bundled tables and GDD recipes.
pub fn build_t3_w4_d6(n: u32) -> Result<Code> {
    Ok(build_t3_w4_d6_sourced(n)?.0)
}

pub fn build_t3_w4_d6_sourced(n: u32) -> Result<(Code, W4D6Source)> {
    let (code, src) = if n <= 4 {
        (tiny_w4_d6(n), W4D6Source::Tiny)
    } else if let Some(id) = table_for_length(n) {
        (table_code(id)?, W4D6Source::Table(id))
    } else if let Some(r) = GDD_RECIPES.iter().find(|r| r.n == n) {
        (build_from_recipe(r)?, W4D6Source::Gdd(*r))
    } else {
        let cov = covered_w4_d6_lengths();
        let mut nearest: Vec<u32> = cov.clone();
        nearest.sort_by_key(|&m| (m.abs_diff(n), m));
        nearest.truncate(2);
        nearest.sort_unstable();
        return Err(Error::NoRecipe { n, nearest });
    };
    let rep = verify_code(&code);
    if !rep.is_valid() {
        return Err(Error::Verification(format!("length {n}: {} short pairs", rep.short_pairs)));
    }
    let kv = known_value(&code.params);
    let want = match kv.kind {
        BoundKind::Exact(v) | BoundKind::Range(v, _) => v,
        BoundKind::UpperOnly(v) => v,
    };
    if code.len() as u128 != want {
        return Err(Error::Verification(format!("length {n}: size {} but the known value is {kv}", code.len())));
    }
    Ok((code, src))
}

pub fn build_from_recipe(r: &GddRecipe) -> Result<Code> {
    let g = catalog(r.gdd)?;
    let group_code = table_code(r.group_table)?;
    if r.extra == 0 {
        let mut codes = BTreeMap::new();
        codes.insert(group_code.params.n as usize, group_code);
        gdd_fill(&g, &codes)
    } else {
        let tail = tiny_w4_d6(r.extra);
        gdd_fill_extra(&g, r.extra, &group_code, &tail)
    }
}

/// Blocks as `1^w` words; each group carries a copy of the code for its size.
pub fn gdd_fill(g: &Gdd, group_codes: &BTreeMap<usize, Code>) -> Result<Code> {
    let first = group_codes
        .values()
        .next()
        .ok_or_else(|| Error::GroupCodeMismatch("no group codes supplied".into()))?;
    let base = first.params;
    for (&size, c) in group_codes {
        let p = c.params;
        if p.n as usize != size {
            return Err(Error::GroupCodeMismatch(format!("code of length {} filed under size {size}", p.n)));
        }
        if (p.q, p.w) != (base.q, base.w) || p.d < base.d {
            return Err(Error::GroupCodeMismatch(format!("{p} does not match {base}")));
        }
        if !verify_code(c).is_valid() {
            return Err(Error::GroupCodeMismatch(format!("group code of length {size} is invalid")));
        }
    }
    if let Some(b) = g.blocks.iter().find(|b| b.len() as u32 != base.w) {
        return Err(Error::GroupCodeMismatch(format!("block {b:?} does not have size w={}", base.w)));
    }
    let mut words: Vec<Codeword> = g.blocks.iter().map(|b| Codeword::binary(b)).collect();
    for grp in &g.groups {
        let c = group_codes
            .get(&grp.len())
            .ok_or_else(|| Error::GroupCodeMismatch(format!("no code for groups of size {}", grp.len())))?;
        words.extend(c.words.iter().map(|u| u.map_positions(|p| grp[p as usize])));
    }
    let params = CodeParams::new(g.point_count, base.q, base.w, base.d)?;
    finish(params, words, "gdd fill")
}

fn positions_with_two(c: &Code) -> Vec<bool> {
    let mut has = vec![false; c.params.n as usize];
    for u in &c.words {
        for &(p, v) in u.entries() {
            if v >= 2 {
                has[p as usize] = true;
            }
        }
    }
    has
}

fn two_two_support(c: &Code) -> Option<Vec<u32>> {
    c.words.iter().find(|u| u.signature() == [(2, 2)]).map(|u| u.support())
}

/// Positions of a group code that play the adjoined points: the unique
/// position without symbol 2 (`t = 1`), or the support of the `2^2` word (`t = 2`).
pub fn detect_extra_points(c: &Code, t: u32) -> Result<Vec<u32>> {
    match t {
        1 => {
            let has = positions_with_two(c);
            let free: Vec<u32> = (0..c.params.n).filter(|&p| !has[p as usize]).collect();
            match free.as_slice() {
                [p] => Ok(vec![*p]),
                [] => Err(Error::PropertyViolation('A', "every position carries symbol 2".into())),
                _ if c.params.n <= 1 => Ok(vec![0]),
                _ => Ok(vec![*free.last().unwrap()]),
            }
        }
        2 => two_two_support(c).ok_or_else(|| Error::PropertyViolation('B', "no word of type 2^2".into())),
        _ => Err(Error::InvalidParams(format!("t must be 1 or 2, got {t}"))),
    }
}

/// GDD filling with `t` points adjoined to every group. Extra points are
/// detected from the group and tail codes.
pub fn gdd_fill_extra(g: &Gdd, t: u32, group_code: &Code, tail_code: &Code) -> Result<Code> {
    let gx = detect_extra_points(group_code, t)?;
    let tx = if tail_code.params.n == t {
        (0..t).collect()
    } else {
        detect_extra_points(tail_code, t)?
    };
    gdd_fill_extra_at(g, t, group_code, &gx, tail_code, &tx)
}

/// GDD filling with explicit extra positions in the group and tail codes.
pub fn gdd_fill_extra_at(
    g: &Gdd,
    t: u32,
    group_code: &Code,
    group_extra: &[u32],
    tail_code: &Code,
    tail_extra: &[u32],
) -> Result<Code> {
    if !(1..=2).contains(&t) || group_extra.len() != t as usize || tail_extra.len() != t as usize {
        return Err(Error::InvalidParams(format!("need exactly t = {t} extra points, t in {{1, 2}}")));
    }
    let gs = group_code.params.n - t;
    match t {
        1 if !check_property_a(group_code) => {
            return Err(Error::PropertyViolation('A', format!("group code of length {}", group_code.params.n)))
        }
        2 if !check_property_b(group_code) => {
            return Err(Error::PropertyViolation('B', format!("group code of length {}", group_code.params.n)))
        }
        _ => {}
    }
    let has = positions_with_two(group_code);
    if t == 1 {
        if has[group_extra[0] as usize] {
            return Err(Error::Symbol2OnExtraPoint(group_extra[0]));
        }
    } else {
        let mut s = group_extra.to_vec();
        s.sort_unstable();
        if two_two_support(group_code) != Some(s) {
            return Err(Error::PropertyViolation('B', "the 2^2 word is not on the adjoined points".into()));
        }
    }
    let big: Vec<&Vec<u32>> = g.groups.iter().filter(|grp| grp.len() as u32 == gs).collect();
    let tail: Vec<&Vec<u32>> = g.groups.iter().filter(|grp| grp.len() as u32 != gs).collect();
    if tail.len() > 1 {
        return Err(Error::GroupCodeMismatch("more than one group of another size".into()));
    }
    let tail_size = tail.first().map_or(0, |grp| grp.len() as u32);
    if tail_code.params.n != tail_size + t {
        return Err(Error::GroupCodeMismatch(format!(
            "tail code has length {} but the tail group needs {}",
            tail_code.params.n,
            tail_size + t
        )));
    }
    let n0 = g.point_count;
    let place = |code: &Code, extra: &[u32], points: &[u32]| -> Vec<Codeword> {
        let mut map = vec![0u32; code.params.n as usize];
        let mut next = 0;
        for p in 0..code.params.n {
            if let Some(k) = extra.iter().position(|&e| e == p) {
                map[p as usize] = n0 + k as u32;
            } else {
                map[p as usize] = points[next];
                next += 1;
            }
        }
        code.words.iter().map(|u| u.map_positions(|p| map[p as usize])).collect()
    };
    let mut words: Vec<Codeword> = g.blocks.iter().map(|b| Codeword::binary(b)).collect();
    let shared = word(&[(n0, 2), (n0 + 1, 2)]);
    for grp in big {
        let mut copy = place(group_code, group_extra, grp);
        if t == 2 {
            copy.retain(|u| u != &shared);
        }
        words.extend(copy);
    }
    let tail_points: Vec<u32> = tail.first().map_or(Vec::new(), |g| (*g).clone());
    words.extend(place(tail_code, tail_extra, &tail_points));
    let p = group_code.params;
    finish(CodeParams::new(n0 + t, p.q, p.w, p.d)?, words, "gdd fill with extra points")
}

fn is_w4_d6_ternary(c: &Code) -> bool {
    let p = c.params;
    p.q == 3 && p.w == 4 && p.d == 6
}

/// Size `U(n)`, exactly `n - 1` words of type `1^2 2^1`, none of type `2^2`,
/// and every pair covered by a support.
pub fn check_property_a(c: &Code) -> bool {
    if !is_w4_d6_ternary(c) || !verify_code(c).is_valid() || unc_packing(c).is_err() {
        return false;
    }
    let n = c.params.n as u64;
    let (x, y, z) = type_census(c).xyz();
    c.len() as u64 == u_bound(n)
        && x + y == c.len()
        && y as u64 == n.saturating_sub(1)
        && z == 0
        && (6 * x + 3 * y) as u128 == binomial(n, 2).unwrap()
}

/// Size `U(n)`, exactly `n - 2` words of type `1^2 2^1`, one of type `2^2`,
/// and every pair but that word's support covered by another word.
pub fn check_property_b(c: &Code) -> bool {
    if !is_w4_d6_ternary(c) || !verify_code(c).is_valid() || unc_packing(c).is_err() {
        return false;
    }
    let n = c.params.n as u64;
    let (x, y, z) = type_census(c).xyz();
    c.len() as u64 == u_bound(n)
        && x + y + z == c.len()
        && y as u64 == n.saturating_sub(2)
        && z == 1
        && (6 * x + 3 * y) as u128 + 1 == binomial(n, 2).unwrap()
}

/// `k` residues mod `n` with distinct nonzero pairwise differences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ruler {
    pub n: u32,
    pub marks: Vec<u32>,
}

impl Ruler {
    pub fn is_valid(&self) -> bool {
        let n = self.n as usize;
        let mut seen = vec![false; n];
        for (i, &a) in self.marks.iter().enumerate() {
            for (j, &b) in self.marks.iter().enumerate() {
                if i != j {
                    let d = (a as usize + n - b as usize) % n;
                    if d == 0 || seen[d] {
                        return false;
                    }
                    seen[d] = true;
                }
            }
        }
        true
    }
}

/// Lexicographically first modular Golomb ruler with first mark 0.
pub fn golomb_ruler(n: u32, k: u32, node_budget: u64) -> Result<Ruler> {
    if (k as u64) * (k as u64).saturating_sub(1) >= n as u64 && k > 1 {
        return Err(Error::InfeasibleByCount { n, k });
    }
    if k == 0 {
        return Ok(Ruler { n, marks: Vec::new() });
    }
    fn rec(n: u32, k: usize, marks: &mut Vec<u32>, used: &mut [bool], nodes: &mut u64, budget: u64) -> Option<bool> {
        if marks.len() == k {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let start = marks.last().unwrap() + 1;
        let need = (k - marks.len()) as u32;
        for c in start..n {
            if n - c < need {
                break;
            }
            let diffs: Vec<usize> = marks
                .iter()
                .flat_map(|&a| [((c - a) % n) as usize, ((n + a - c) % n) as usize])
                .collect();
            let mut ok = true;
            for (i, &d) in diffs.iter().enumerate() {
                if used[d] || diffs[..i].contains(&d) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            for &d in &diffs {
                used[d] = true;
            }
            marks.push(c);
            match rec(n, k, marks, used, nodes, budget) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            marks.pop();
            for &d in &diffs {
                used[d] = false;
            }
        }
        Some(false)
    }
    let mut marks = vec![0];
    let mut used = vec![false; n as usize];
    used[0] = true;
    let mut nodes = 0;
    match rec(n, k as usize, &mut marks, &mut used, &mut nodes, node_budget) {
        Some(true) => Ok(Ruler { n, marks }),
        _ => Err(Error::RulerUnavailable { n, k }),
    }
}

/// Simple graph with adjacency bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub vertex_count: u32,
    adj: Vec<Vec<u64>>,
}

impl Graph {
    pub fn empty(n: u32) -> Self {
        Graph { vertex_count: n, adj: vec![vec![0; (n as usize).div_ceil(64)]; n as usize] }
    }

    pub fn complete(n: u32) -> Self {
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize][b as usize / 64] >> (b % 64) & 1 == 1
    }

    pub fn add_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize][b as usize / 64] |= 1 << (b % 64);
        self.adj[b as usize][a as usize / 64] |= 1 << (a % 64);
    }

    pub fn remove_edge(&mut self, a: u32, b: u32) {
        self.adj[a as usize][b as usize / 64] &= !(1 << (b % 64));
        self.adj[b as usize][a as usize / 64] &= !(1 << (a % 64));
    }

    pub fn degree(&self, v: u32) -> u32 {
        self.adj[v as usize].iter().map(|w| w.count_ones()).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count).map(|v| self.degree(v) as usize).sum::<usize>() / 2
    }

    pub fn min_degree(&self) -> u32 {
        (0..self.vertex_count).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    fn remove_clique(&mut self, c: &[u32]) {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                self.remove_edge(a, b);
            }
        }
    }

    fn add_clique(&mut self, c: &[u32]) {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                self.add_edge(a, b);
            }
        }
    }

    /// Cliques of size `k` containing all of `seed` (sorted), extending with
    /// vertices above `floor`, in lexicographic order, at most `cap` of them.
    fn cliques_through(&self, seed: &[u32], k: usize, cap: usize) -> Vec<Vec<u32>> {
        let words = self.adj.first().map_or(0, |r| r.len());
        let mut cand = vec![u64::MAX; words];
        for &s in seed {
            for (c, a) in cand.iter_mut().zip(&self.adj[s as usize]) {
                *c &= a;
            }
        }
        let mut out = Vec::new();
        let mut cur = seed.to_vec();
        self.extend_cliques(&mut cur, &cand, 0, k, cap, &mut out);
        out
    }

    fn extend_cliques(&self, cur: &mut Vec<u32>, cand: &[u64], from: u32, k: usize, cap: usize, out: &mut Vec<Vec<u32>>) {
        if out.len() >= cap {
            return;
        }
        if cur.len() == k {
            let mut c = cur.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        for v in from..self.vertex_count {
            if cand[v as usize / 64] >> (v % 64) & 1 == 0 || cur.contains(&v) {
                continue;
            }
            let next: Vec<u64> = cand.iter().zip(&self.adj[v as usize]).map(|(a, b)| a & b).collect();
            cur.push(v);
            self.extend_cliques(cur, &next, v + 1, k, cap, out);
            cur.pop();
            if out.len() >= cap {
                return;
            }
        }
    }
}

/// Greedy lexicographic edge-disjoint `K_k` packing, followed by swaps that
/// replace one clique with two. Consumes the edges it uses from `g`.
pub fn pack_cliques(g: &mut Graph, k: usize, swap_rounds: u32) -> Vec<Vec<u32>> {
    let n = g.vertex_count;
    let mut blocks = Vec::new();
    for v in 0..n {
        loop {
            let found = g.cliques_through(&[v], k, 1);
            match found.into_iter().next() {
                Some(c) => {
                    g.remove_clique(&c);
                    blocks.push(c);
                }
                None => break,
            }
        }
    }
    for _ in 0..swap_rounds {
        let mut improved = false;
        let mut i = 0;
        while i < blocks.len() {
            let b = blocks[i].clone();
            g.add_clique(&b);
            let mut cands: Vec<Vec<u32>> = Vec::new();
            for (x, &a) in b.iter().enumerate() {
                for &c in &b[x + 1..] {
                    for cl in g.cliques_through(&[a, c], k, 64) {
                        if cl != b && !cands.contains(&cl) {
                            cands.push(cl);
                        }
                    }
                }
            }
            let shares_edge = |p: &[u32], q: &[u32]| p.iter().filter(|x| q.contains(x)).count() >= 2;
            let pair = (0..cands.len())
                .flat_map(|x| (x + 1..cands.len()).map(move |y| (x, y)))
                .find(|&(x, y)| !shares_edge(&cands[x], &cands[y]));
            match pair {
                Some((x, y)) => {
                    let (p, q) = (cands[x].clone(), cands[y].clone());
                    g.remove_clique(&p);
                    g.remove_clique(&q);
                    blocks[i] = p;
                    blocks.push(q);
                    improved = true;
                }
                None => g.remove_clique(&b),
            }
            i += 1;
        }
        if !improved {
            break;
        }
    }
    blocks.sort();
    blocks
}

#[derive(Clone, Debug)]
pub struct GeneralBuild {
    pub code: Code,
    pub ruler: Ruler,
    /// `B(n, w) + n`.
    pub upper: i64,
    pub ruler_words: usize,
    pub clique_words: usize,
    pub min_degree_after_ruler: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralBudget {
    pub ruler_nodes: u64,
    pub swap_rounds: u32,
}

impl Default for GeneralBudget {
    fn default() -> Self {
        GeneralBudget { ruler_nodes: 10_000_000, swap_rounds: 3 }
    }
}

/// Ternary weight-`w` distance-`2w-2` code: shifted ruler words of type
/// `1^{w-2} 2^1`, plus a clique packing of the pairs they leave free.
pub fn build_t3_general(n: u32, w: u32, budget: GeneralBudget) -> Result<GeneralBuild> {
    if w < 3 {
        return Err(Error::InvalidParams(format!("weight {w} below 3")));
    }
    let ruler = golomb_ruler(n, w - 1, budget.ruler_nodes).map_err(|e| match e {
        Error::InfeasibleByCount { .. } => Error::RulerUnavailable { n, k: w - 1 },
        other => other,
    })?;
    let mut g = Graph::complete(n);
    let mut words = Vec::new();
    for i in 0..n {
        let pts: Vec<u32> = ruler.marks.iter().map(|a| (a + i) % n).collect();
        let mut entries: Vec<(u32, u32)> = pts.iter().map(|&p| (p, 1)).collect();
        entries[0].1 = 2;
        words.push(word(&entries));
        for (x, &a) in pts.iter().enumerate() {
            for &b in &pts[x + 1..] {
                debug_assert!(g.has_edge(a, b), "ruler shifts overlap");
                g.remove_edge(a, b);
            }
        }
    }
    let min_degree_after_ruler = g.min_degree();
    let blocks = pack_cliques(&mut g, w as usize, budget.swap_rounds);
    let clique_words = blocks.len();
    words.extend(blocks.iter().map(|b| Codeword::binary(b)));
    let code = finish(CodeParams::ternary(n, w, 2 * w - 2), words, "general weight")?;
    Ok(GeneralBuild {
        code,
        ruler,
        upper: b_bound(n as u64, w as u64) + n as i64,
        ruler_words: n as usize,
        clique_words,
        min_degree_after_ruler,
    })
}

/// A constructed code with a description of how it was obtained.
#[derive(Clone, Debug)]
pub struct Built {
    pub code: Code,
    pub recipe: String,
}

/// Dispatches on the parameter family.
pub fn construct(p: &CodeParams, opts: &BuildOptions) -> Result<Built> {
    let n = p.n;
    let unbounded = p.is_unbounded() || p.q > p.w;
    let built = |code: Code, recipe: String| Ok(Built { code, recipe });
    match (unbounded, p.q, p.w, p.d) {
        (true, _, 3, 4) => built(
            build_z_w3_d4_with(n, opts)?,
            format!("maximum triple packing as 1^3 words plus {n} words 3^1; optimum D(n,3,2)+n"),
        ),
        (true, _, 4, 4) => built(
            build_z_w4_d4_with(n, opts)?,
            "maximum triple-covering quadruple packing as 1^4 words plus all 2^2 and 4^1 words".into(),
        ),
        (true, _, 4, 6) => built(
            build_z_w4_d6_with(n, opts)?,
            "maximum pair-covering quadruple packing as 1^4 words plus all 4^1 words".into(),
        ),
        (false, 3, 3, 4) => {
            let how = match n % 6 {
                _ if n <= 2 => "short code",
                2 | 4 => "triple system on n-1 points plus words {i_2, inf_1}",
                3 => "3-GDD of type 3^u plus three 1^1 2^1 words per group",
                1 | 5 => "triple packing with a Hamiltonian leave cycle plus cycle words",
                _ => "triple packing with a 4-cycle leave plus the six words around the cycle",
            };
            built(build_t3_w3_d4_with(n, opts)?, how.into())
        }
        (false, 3, 4, 4) => built(
            build_t3_w4_d4_with(n, opts)?,
            "maximum triple-covering quadruple packing as 1^4 words plus all 2^2 words".into(),
        ),
        (false, 3, 4, 6) => {
            let (code, src) = build_t3_w4_d6_sourced(n)?;
            let how = match src {
                W4D6Source::Tiny => "disjoint 2^2 words".to_string(),
                W4D6Source::Table(id) => format!("bundled table {id}, developed"),
                W4D6Source::Gdd(r) => match r.extra {
                    0 => format!("4-GDD of type {} with groups filled by table {}", r.gdd, r.group_table),
                    t => format!(
                        "4-GDD of type {} with {t} adjoined point(s), groups filled by table {}",
                        r.gdd, r.group_table
                    ),
                },
            };
            built(code, how)
        }
        (false, 3, w, d) if w >= 5 && d == 2 * w - 2 => {
            let g = build_t3_general(n, w, GeneralBudget::default())?;
            let how = format!(
                "ruler {:?} mod {n} plus clique packing; size {} against upper bound {}",
                g.ruler.marks,
                g.code.len(),
                g.upper
            );
            built(g.code, how)
        }
        _ => Err(Error::Unsupported(format!("no construction for {p}"))),
    }
}

/// Checks the triple packing substrate of an unbounded weight-3 code.
pub fn triple_packing_of(code: &Code) -> SetSystem {
    let blocks = code.words.iter().filter(|u| u.support_len() == 3).map(|u| u.support()).collect();
    SetSystem::new(code.params.n, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::d_triples_pairs;
    use crate::designs::verify_packing;

    #[test]
    fn weight3_ternary_spot_values() {
        for (n, size) in [(1, 0), (2, 1), (3, 3), (4, 4), (5, 6), (6, 9), (7, 11), (8, 14), (9, 18)] {
            assert_eq!(build_t3_w3_d4(n).unwrap().len(), size, "n={n}");
        }
    }

    #[test]
    fn unbounded_families() {
        assert_eq!(build_z_w3_d4(2).unwrap().len(), 2);
        assert_eq!(build_z_w3_d4(3).unwrap().len(), 4);
        assert_eq!(build_z_w3_d4(7).unwrap().len(), 14);
        assert_eq!(build_z_w4_d4(4).unwrap().len(), 11);
        assert_eq!(build_z_w4_d4(6).unwrap().len(), 24);
        assert_eq!(build_z_w4_d4(5).unwrap().len(), 1 + 10 + 5);
        assert_eq!(build_z_w4_d6(4).unwrap().len(), 5);
        assert_eq!(build_z_w4_d6(8).unwrap().len(), 10);
        assert_eq!(build_z_w4_d6(13).unwrap().len(), 26);
    }

    #[test]
    fn weight4_distance4_ternary() {
        assert_eq!(build_t3_w4_d4(4).unwrap().len(), 7);
        assert_eq!(build_t3_w4_d4(6).unwrap().len(), 18);
    }

    #[test]
    fn weight4_distance6_dispatch() {
        assert_eq!(build_t3_w4_d6(7).unwrap().len(), 7);
        assert_eq!(build_t3_w4_d6(12).unwrap().len(), 16);
        assert_eq!(build_t3_w4_d6(4).unwrap().len(), 2);
        match build_t3_w4_d6(43) {
            Err(Error::NoRecipe { n: 43, nearest }) => assert_eq!(nearest, vec![41, 42]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn properties() {
        assert!(check_property_a(&table_code("eg13").unwrap()));
        assert!(check_property_a(&table_code("n10").unwrap()));
        let b = table_code("eg26").unwrap();
        assert!(check_property_b(&b));
        assert!(!check_property_a(&b));
        assert_eq!(two_two_support(&b), Some(vec![24, 25]));
        assert_eq!(detect_extra_points(&table_code("n10").unwrap(), 1).unwrap(), vec![0]);
    }

    #[test]
    fn rulers() {
        assert_eq!(golomb_ruler(7, 3, 1000).unwrap().marks, vec![0, 1, 3]);
        assert_eq!(golomb_ruler(13, 4, 1000).unwrap().marks, vec![0, 1, 3, 9]);
        assert!(matches!(golomb_ruler(6, 3, 1000), Err(Error::InfeasibleByCount { n: 6, k: 3 })));
        assert!(golomb_ruler(21, 5, 1_000_000).unwrap().is_valid());
    }

    #[test]
    fn general_pipeline_small() {
        let g = build_t3_general(13, 4, GeneralBudget::default()).unwrap();
        assert!(g.code.len() as i64 <= g.upper);
        assert!(g.code.len() >= 13);
        let g = build_t3_general(13, 3, GeneralBudget::default()).unwrap();
        assert!(g.code.len() as u64 <= weight3_ternary_value(13));
    }

    #[test]
    fn z_w3_packing_is_maximum() {
        for n in 3..=14 {
            let c = build_z_w3_d4(n).unwrap();
            let ss = triple_packing_of(&c);
            assert!(verify_packing(&ss, 2).ok);
            assert_eq!(ss.len() as u64, d_triples_pairs(n as u64), "n={n}");
        }
    }
}
