//! Exact maximum codes by branch and bound over the compatibility graph,
//! and a greedy heuristic.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{binomial, count_weight_vectors, upper_bound};
use crate::code::{l1_distance, verify_code, Code, CodeParams, Codeword};
use crate::designs::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::par::{self, Strategy};

/// Largest candidate universe the searches accept.
pub const CANDIDATE_CAP: u128 = 20_000;

/// All weight-`w` words over the alphabet, sorted.
pub fn enumerate_candidates(p: &CodeParams) -> Result<Vec<Codeword>> {
    enumerate_candidates_capped(p, CANDIDATE_CAP)
}

pub fn enumerate_candidates_capped(p: &CodeParams, cap: u128) -> Result<Vec<Codeword>> {
    let q = if p.is_unbounded() { 0 } else { p.q as u64 };
    let count = count_weight_vectors(p.n as u64, q, p.w as u64).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::TooLarge(format!("{count} candidate words for {p}")));
    }
    fn rec(pos: u32, n: u32, left: u32, max: u32, cur: &mut Vec<(u32, u32)>, out: &mut Vec<Codeword>) {
        if left == 0 {
            out.push(Codeword::from_sorted(cur.clone()));
            return;
        }
        if pos == n {
            return;
        }
        for v in (1..=max.min(left)).rev() {
            cur.push((pos, v));
            rec(pos + 1, n, left - v, max, cur, out);
            cur.pop();
        }
        rec(pos + 1, n, left, max, cur, out);
    }
    let mut out = Vec::with_capacity(count as usize);
    rec(0, p.n, p.w, p.max_entry(), &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

/// Node and/or wall-clock limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Budget {
    pub nodes: Option<u64>,
    pub time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { nodes: Some(n), time: None }
    }

    pub fn time(d: Duration) -> Self {
        Budget { nodes: None, time: Some(d) }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.nodes, self.time) {
            (None, None) => write!(f, "unlimited"),
            (Some(n), None) => write!(f, "{n}nodes"),
            (None, Some(t)) => write!(f, "{}s", t.as_secs_f64()),
            (Some(n), Some(t)) => write!(f, "{n}nodes,{}s", t.as_secs_f64()),
        }
    }
}

/// Accepts `60s`, `500ms`, `1e7nodes`, `250000nodes`, comma-joined combinations.
impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("bad budget `{s}`; use e.g. 60s or 1e7nodes"));
        let mut b = Budget::default();
        for part in s.split(',').map(str::trim) {
            if let Some(x) = part.strip_suffix("nodes") {
                let v: f64 = x.parse().map_err(|_| bad())?;
                if !(v >= 1.0) {
                    return Err(bad());
                }
                b.nodes = Some(v as u64);
            } else if let Some(x) = part.strip_suffix("ms") {
                let v: f64 = x.parse().map_err(|_| bad())?;
                b.time = Some(Duration::from_secs_f64(v / 1000.0));
            } else if let Some(x) = part.strip_suffix('s') {
                let v: f64 = x.parse().map_err(|_| bad())?;
                if !(v > 0.0) {
                    return Err(bad());
                }
                b.time = Some(Duration::from_secs_f64(v));
            } else {
                return Err(bad());
            }
        }
        Ok(b)
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub budget: Budget,
    pub seed: u64,
    pub prune_with_census: bool,
    pub initial_lower: Option<Code>,
    pub strategy: Strategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: Budget::unlimited(),
            seed: DEFAULT_SEED,
            prune_with_census: false,
            initial_lower: None,
            strategy: Strategy::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub code: Code,
    pub proven_optimal: bool,
    pub budget_exhausted: bool,
    pub nodes: u64,
    /// Global cutoff used, if any.
    pub upper: Option<u128>,
}

/// Unbounded knapsack table: most words that fit `rp` free pairs and `r2`
/// free symbol-2 positions, for ternary distance `2w - 2`.
struct CensusTable {
    cols: usize,
    f: Vec<u16>,
}

impl CensusTable {
    fn new(n: u32, w: u32) -> Self {
        let pairs = binomial(n as u64, 2).unwrap() as usize;
        let cols = n as usize + 1;
        // Word types 1^(w-2y) 2^y: support w-y, pair cost C(w-y,2), symbol-2 cost y.
        let items: Vec<(usize, usize)> = (0..=w / 2)
            .map(|y| (binomial((w - y) as u64, 2).unwrap() as usize, y as usize))
            .collect();
        let mut f = vec![0u16; (pairs + 1) * cols];
        for rp in 0..=pairs {
            for r2 in 0..cols {
                let mut best = 0u16;
                for &(cp, c2) in &items {
                    if cp <= rp && c2 <= r2 && (cp, c2) != (0, 0) {
                        best = best.max(1 + f[(rp - cp) * cols + r2 - c2]);
                    }
                }
                f[rp * cols + r2] = best;
            }
        }
        CensusTable { cols, f }
    }

    fn get(&self, rp: usize, r2: usize) -> usize {
        self.f[rp * self.cols + r2] as usize
    }
}

struct Graph {
    words: usize,
    adj: Vec<Vec<u64>>,
    pair_cost: Vec<usize>,
    two_cost: Vec<usize>,
}

fn bit(set: &[u64], v: usize) -> bool {
    set[v / 64] >> (v % 64) & 1 == 1
}

/// Suffix colour counts: `bounds[k]` colours a greedy colouring built from
/// the end uses on `cand[k..]`.
fn suffix_colour_bounds(g: &Graph, cand: &[usize]) -> Vec<usize> {
    let mut classes: Vec<Vec<u64>> = Vec::new();
    let mut bounds = vec![0; cand.len() + 1];
    for k in (0..cand.len()).rev() {
        let v = cand[k];
        let slot = classes.iter().position(|c| c.iter().zip(&g.adj[v]).all(|(a, b)| a & b == 0));
        match slot {
            Some(i) => classes[i][v / 64] |= 1 << (v % 64),
            None => {
                let mut c = vec![0u64; g.words];
                c[v / 64] |= 1 << (v % 64);
                classes.push(c);
            }
        }
        bounds[k] = classes.len();
    }
    bounds
}

struct Shared<'a> {
    nodes: AtomicU64,
    node_limit: u64,
    deadline: Option<Instant>,
    exhausted: AtomicBool,
    /// Best size known anywhere, including the warm start.
    best: AtomicUsize,
    upper: usize,
    /// Lowest branch index that reached `upper`.
    done_at: AtomicUsize,
    census: Option<&'a CensusTable>,
}

struct Branch<'a> {
    g: &'a Graph,
    sh: &'a Shared<'a>,
    index: usize,
    cur: Vec<usize>,
    best: Vec<usize>,
    rp: usize,
    r2: usize,
}

impl Branch<'_> {
    fn stop(&self) -> bool {
        self.sh.exhausted.load(Ordering::Relaxed) || self.sh.done_at.load(Ordering::Relaxed) < self.index
    }

    fn tick(&self) -> bool {
        let k = self.sh.nodes.fetch_add(1, Ordering::Relaxed);
        if k >= self.sh.node_limit {
            self.sh.exhausted.store(true, Ordering::Relaxed);
            return false;
        }
        if k.is_multiple_of(1024) {
            if let Some(d) = self.sh.deadline {
                if Instant::now() >= d {
                    self.sh.exhausted.store(true, Ordering::Relaxed);
                    return false;
                }
            }
        }
        true
    }

    /// Cannot beat this branch's best, nor reach the shared best.
    fn hopeless(&self, bound: usize) -> bool {
        bound <= self.best.len() || bound < self.sh.best.load(Ordering::Relaxed)
    }

    fn record(&mut self) {
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
            self.sh.best.fetch_max(self.best.len(), Ordering::Relaxed);
            if self.best.len() >= self.sh.upper {
                self.sh.done_at.fetch_min(self.index, Ordering::Relaxed);
            }
        }
    }

    fn expand(&mut self, cand: &[usize]) {
        if !self.tick() || self.stop() {
            return;
        }
        if cand.is_empty() {
            self.record();
            return;
        }
        let bounds = suffix_colour_bounds(self.g, cand);
        for k in 0..cand.len() {
            let mut bound = self.cur.len() + bounds[k];
            if let Some(t) = self.sh.census {
                bound = bound.min(self.cur.len() + t.get(self.rp, self.r2));
            }
            if self.hopeless(bound) {
                return;
            }
            let v = cand[k];
            let (pc, tc) = (self.g.pair_cost[v], self.g.two_cost[v]);
            if self.sh.census.is_some() && (pc > self.rp || tc > self.r2) {
                continue;
            }
            let next: Vec<usize> = cand[k + 1..].iter().copied().filter(|&u| bit(&self.g.adj[v], u)).collect();
            self.cur.push(v);
            // only read under census pruning, where the check above keeps them nonnegative
            self.rp = self.rp.wrapping_sub(pc);
            self.r2 = self.r2.wrapping_sub(tc);
            if next.is_empty() {
                if !self.tick() {
                    return;
                }
                self.record();
            } else {
                self.expand(&next);
            }
            self.rp = self.rp.wrapping_add(pc);
            self.r2 = self.r2.wrapping_add(tc);
            self.cur.pop();
            if self.stop() {
                return;
            }
        }
    }
}

/// Exact maximum code; candidates enumerated in sorted order.
pub fn max_code_exact(p: &CodeParams, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let cands = enumerate_candidates(p)?;
    max_code_exact_over(p, cands, cfg)
}

/// Exact maximum clique over the given candidate list. Among maximum codes
/// the lexicographically least one in candidate order is returned.
pub fn max_code_exact_over(p: &CodeParams, cands: Vec<Codeword>, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let m = cands.len();
    let words = m.div_ceil(64).max(1);
    let rows = par::map_indexed(cfg.strategy, m, |i| {
        let mut row = vec![0u64; words];
        for j in 0..m {
            if i != j && l1_distance(&cands[i], &cands[j]) >= p.d {
                row[j / 64] |= 1 << (j % 64);
            }
        }
        row
    });
    let census_ok = cfg.prune_with_census && p.q == 3 && p.w >= 3 && p.d == 2 * p.w - 2;
    let g = Graph {
        words,
        adj: rows,
        pair_cost: cands.iter().map(|u| binomial(u.support_len() as u64, 2).unwrap() as usize).collect(),
        two_cost: cands.iter().map(|u| u.entries().iter().filter(|e| e.1 == 2).count()).collect(),
    };
    let table = census_ok.then(|| CensusTable::new(p.n, p.w));
    let upper = upper_bound(p).ok().map(|b| b.upper_value());

    let warm = match &cfg.initial_lower {
        Some(c) if c.params == *p && verify_code(c).is_valid() => Some(c.clone()),
        Some(_) => return Err(Error::InvalidParams("warm start is not a valid code for these parameters".into())),
        None => None,
    };
    let sh = Shared {
        nodes: AtomicU64::new(0),
        node_limit: cfg.budget.nodes.unwrap_or(u64::MAX),
        deadline: cfg.budget.time.map(|t| Instant::now() + t),
        exhausted: AtomicBool::new(false),
        best: AtomicUsize::new(warm.as_ref().map_or(0, |c| c.len())),
        upper: upper.map_or(usize::MAX, |u| u.min(usize::MAX as u128) as usize),
        done_at: AtomicUsize::new(usize::MAX),
        census: table.as_ref(),
    };
    let rp0 = binomial(p.n as u64, 2).unwrap() as usize;
    let r20 = p.n as usize;

    // Top level: branch i holds the cliques whose first vertex is i.
    let all: Vec<usize> = (0..m).collect();
    let top_bounds = suffix_colour_bounds(&g, &all);
    let results: Mutex<Vec<(usize, Vec<usize>)>> = Mutex::new(Vec::new());
    par::map_indexed(cfg.strategy, m, |i| {
        let mut br = Branch { g: &g, sh: &sh, index: i, cur: Vec::new(), best: Vec::new(), rp: rp0, r2: r20 };
        if br.stop() || top_bounds[i] < sh.best.load(Ordering::Relaxed) {
            return;
        }
        if table.is_some() && (g.pair_cost[i] > rp0 || g.two_cost[i] > r20) {
            return;
        }
        let next: Vec<usize> = ((i + 1)..m).filter(|&u| bit(&g.adj[i], u)).collect();
        br.cur.push(i);
        br.rp -= g.pair_cost[i];
        br.r2 -= g.two_cost[i];
        if next.is_empty() {
            br.record();
        } else {
            br.expand(&next);
        }
        if !br.best.is_empty() {
            results.lock().unwrap().push((i, br.best));
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(i, b)| (std::cmp::Reverse(b.len()), *i));
    let exhausted = sh.exhausted.load(Ordering::Relaxed);
    let found = results.into_iter().next().map(|(_, b)| b).unwrap_or_default();
    let code = match warm {
        Some(w) if w.len() > found.len() => w,
        _ => Code::canonical(*p, found.iter().map(|&v| cands[v].clone()).collect()),
    };
    let hit_upper = upper.is_some_and(|u| code.len() as u128 >= u);
    Ok(SearchOutcome {
        proven_optimal: !exhausted || hit_upper,
        budget_exhausted: exhausted && !hit_upper,
        nodes: sh.nodes.load(Ordering::Relaxed),
        upper,
        code,
    })
}

/// Random-order greedy maximal code, deterministic per seed.
pub fn max_code_greedy(p: &CodeParams, seed: u64) -> Result<Code> {
    let mut cands = enumerate_candidates(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    cands.shuffle(&mut rng);
    let mut chosen: Vec<Codeword> = Vec::new();
    for u in cands {
        if chosen.iter().all(|v| l1_distance(&u, v) >= p.d) {
            chosen.push(u);
        }
    }
    Ok(Code::canonical(*p, chosen))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_counts() {
        assert_eq!(enumerate_candidates(&CodeParams::ternary(4, 3, 4)).unwrap().len(), 16);
        let two = enumerate_candidates(&CodeParams::ternary(2, 4, 6)).unwrap();
        assert_eq!(two, vec![Codeword::from_dense(&[2, 2])]);
        assert_eq!(enumerate_candidates(&CodeParams::new(3, 2, 2, 2).unwrap()).unwrap().len(), 3);
        assert!(matches!(
            enumerate_candidates(&CodeParams::ternary(60, 6, 10)),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn budget_parsing() {
        assert_eq!("60s".parse::<Budget>().unwrap(), Budget::time(Duration::from_secs(60)));
        assert_eq!("1e7nodes".parse::<Budget>().unwrap(), Budget::nodes(10_000_000));
        assert!("fast".parse::<Budget>().is_err());
        assert!("0s".parse::<Budget>().is_err());
    }

    #[test]
    fn small_exact_values() {
        for (n, v) in [(1, 0), (2, 1), (3, 1), (4, 2), (5, 3), (6, 5), (7, 7)] {
            let out = max_code_exact(&CodeParams::ternary(n, 4, 6), &SearchConfig::default()).unwrap();
            assert!(out.proven_optimal);
            assert_eq!(out.code.len(), v, "n={n}");
            assert!(verify_code(&out.code).is_valid());
        }
    }

    #[test]
    fn witness_is_strategy_independent() {
        let p = CodeParams::ternary(6, 4, 6);
        let mut cfg = SearchConfig { strategy: Strategy::Sequential, ..Default::default() };
        let a = max_code_exact(&p, &cfg).unwrap();
        cfg.strategy = Strategy::Parallel;
        let b = max_code_exact(&p, &cfg).unwrap();
        assert_eq!(a.code, b.code);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let p = CodeParams::ternary(8, 4, 6);
        let cfg = SearchConfig { budget: Budget::nodes(3), ..Default::default() };
        let out = max_code_exact(&p, &cfg).unwrap();
        assert!(out.budget_exhausted && !out.proven_optimal);
        assert!(verify_code(&out.code).is_valid());
    }

    #[test]
    fn greedy_is_valid() {
        let p = CodeParams::ternary(7, 4, 6);
        let c = max_code_greedy(&p, 1).unwrap();
        assert!(verify_code(&c).is_valid());
        assert_eq!(c, max_code_greedy(&p, 1).unwrap());
        let p = CodeParams::ternary(4, 3, 2);
        assert_eq!(max_code_greedy(&p, 7).unwrap().len(), 16);
    }
}
