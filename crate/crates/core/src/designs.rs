//! Set systems, group divisible designs, triple systems, prescribed-leave
//! packings and an exact packing finder.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::binomial;
use crate::code::for_each_subset;
use crate::error::{Error, Result};
use crate::par::{self, Strategy};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    pub point_count: u32,
    pub blocks: Vec<Vec<u32>>,
}

impl SetSystem {
    /// Sorts every block; block order is kept.
    pub fn new(point_count: u32, mut blocks: Vec<Vec<u32>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        SetSystem { point_count, blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Sorted copy of the block list.
    pub fn sorted(&self) -> Self {
        let mut s = self.clone();
        s.blocks.sort();
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeaveGraph {
    pub point_count: u32,
    pub edges: BTreeSet<(u32, u32)>,
}

impl LeaveGraph {
    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    /// True if the edges form one cycle through exactly the listed points in order.
    pub fn is_cycle(&self, order: &[u32]) -> bool {
        if order.len() < 3 || self.edges.len() != order.len() {
            return false;
        }
        (0..order.len()).all(|i| {
            let (a, b) = (order[i], order[(i + 1) % order.len()]);
            self.edges.contains(&(a.min(b), a.max(b)))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingCheck {
    pub ok: bool,
    /// First t-subset found in two blocks.
    pub repeated: Option<Vec<u32>>,
    /// Uncovered t-subsets in lexicographic order.
    pub leave: Vec<Vec<u32>>,
}

impl PackingCheck {
    pub fn leave_graph(&self, point_count: u32) -> LeaveGraph {
        LeaveGraph {
            point_count,
            edges: self.leave.iter().filter(|s| s.len() == 2).map(|s| (s[0], s[1])).collect(),
        }
    }
}

/// Rank of a sorted subset in colex order.
fn colex_rank(s: &[u32]) -> usize {
    s.iter().enumerate().map(|(i, &x)| binomial(x as u64, i as u64 + 1).unwrap_or(0) as usize).sum()
}

fn colex_unrank(mut r: usize, k: usize, out: &mut Vec<u32>) {
    out.clear();
    out.resize(k, 0);
    for i in (0..k).rev() {
        let mut x = i as u64;
        while binomial(x + 1, i as u64 + 1).unwrap() as usize <= r {
            x += 1;
        }
        out[i] = x as u32;
        r -= binomial(x, i as u64 + 1).unwrap() as usize;
    }
}

pub fn verify_packing(ss: &SetSystem, t: usize) -> PackingCheck {
    let n = ss.point_count;
    let total = binomial(n as u64, t as u64).unwrap_or(0) as usize;
    let mut hits = vec![0u8; total];
    let mut repeated = None;
    let mut out_of_range = false;
    for b in &ss.blocks {
        if b.iter().any(|&p| p >= n) || b.windows(2).any(|w| w[0] >= w[1]) {
            out_of_range = true;
            continue;
        }
        for_each_subset(b, t, &mut |sub| {
            let r = colex_rank(sub);
            if hits[r] == 1 && repeated.is_none() {
                repeated = Some(sub.to_vec());
            }
            hits[r] = hits[r].saturating_add(1);
        });
    }
    let mut leave = Vec::new();
    let mut buf = Vec::new();
    for (r, &h) in hits.iter().enumerate() {
        if h == 0 {
            colex_unrank(r, t, &mut buf);
            leave.push(buf.clone());
        }
    }
    leave.sort();
    PackingCheck { ok: repeated.is_none() && !out_of_range, repeated, leave }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gdd {
    pub point_count: u32,
    pub groups: Vec<Vec<u32>>,
    pub blocks: Vec<Vec<u32>>,
}

impl Gdd {
    pub fn new(point_count: u32, mut groups: Vec<Vec<u32>>, mut blocks: Vec<Vec<u32>>) -> Self {
        for g in &mut groups {
            g.sort_unstable();
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        Gdd { point_count, groups, blocks }
    }

    /// Type string such as `6^7` or `12^4 3^1`, largest groups first.
    pub fn type_string(&self) -> String {
        let mut sizes: Vec<usize> = self.groups.iter().map(|g| g.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let mut parts: Vec<(usize, usize)> = Vec::new();
        for s in sizes {
            match parts.last_mut() {
                Some((size, c)) if *size == s => *c += 1,
                _ => parts.push((s, 1)),
            }
        }
        parts.iter().map(|(s, c)| format!("{s}^{c}")).collect::<Vec<_>>().join(" ")
    }
}

/// Checks the three design axioms; the error names the first failure.
pub fn check_gdd(g: &Gdd, block_sizes: &[usize]) -> std::result::Result<(), String> {
    let n = g.point_count as usize;
    let mut group_of = vec![usize::MAX; n];
    for (i, grp) in g.groups.iter().enumerate() {
        for &p in grp {
            if p as usize >= n {
                return Err(format!("group point {p} out of range"));
            }
            if group_of[p as usize] != usize::MAX {
                return Err(format!("point {p} in two groups"));
            }
            group_of[p as usize] = i;
        }
    }
    if let Some(p) = group_of.iter().position(|&x| x == usize::MAX) {
        return Err(format!("point {p} in no group"));
    }
    let mut seen = vec![false; n * n];
    for b in &g.blocks {
        if !block_sizes.contains(&b.len()) {
            return Err(format!("block {b:?} has size {}", b.len()));
        }
        for (i, &x) in b.iter().enumerate() {
            if x as usize >= n {
                return Err(format!("block point {x} out of range"));
            }
            for &y in &b[i + 1..] {
                if x == y {
                    return Err(format!("block {b:?} repeats a point"));
                }
                if group_of[x as usize] == group_of[y as usize] {
                    return Err(format!("pair {{{x},{y}}} lies in a group and in block {b:?}"));
                }
                let k = x as usize * n + y as usize;
                if seen[k] {
                    return Err(format!("pair {{{x},{y}}} covered twice"));
                }
                seen[k] = true;
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            if group_of[x] != group_of[y] && !seen[x * n + y] {
                return Err(format!("cross pair {{{x},{y}}} not covered"));
            }
        }
    }
    Ok(())
}

pub fn verify_gdd(g: &Gdd, block_sizes: &[usize]) -> bool {
    check_gdd(g, block_sizes).is_ok()
}

/// Steiner triple system of order `n` (1 or 3 mod 6).
pub fn sts(n: u32) -> Result<SetSystem> {
    if n < 3 || !(n % 6 == 1 || n % 6 == 3) {
        return Err(Error::BadOrder { n, reason: "triple systems need n = 1 or 3 mod 6".into() });
    }
    let blocks = if n % 6 == 3 { bose_blocks(n / 3, true) } else { skolem_blocks(n) };
    Ok(SetSystem::new(n, blocks))
}

/// Triple system blocks on `3v` points from the commutative idempotent
/// quasigroup of odd order `v`; point `(x, i)` is `3x + i`.
fn bose_blocks(v: u32, with_groups: bool) -> Vec<Vec<u32>> {
    let half = v.div_ceil(2);
    let op = |x: u32, y: u32| ((x + y) * half) % v;
    let mut blocks = Vec::new();
    if with_groups {
        for x in 0..v {
            blocks.push(vec![3 * x, 3 * x + 1, 3 * x + 2]);
        }
    }
    for x in 0..v {
        for y in x + 1..v {
            for i in 0..3 {
                blocks.push(vec![3 * x + i, 3 * y + i, 3 * op(x, y) + (i + 1) % 3]);
            }
        }
    }
    blocks
}

/// Triple system on `6k + 1` points from the half-idempotent commutative
/// quasigroup of order `2k`; point `(x, i)` is `3x + i`, infinity is `6k`.
fn skolem_blocks(n: u32) -> Vec<Vec<u32>> {
    let k = (n - 1) / 6;
    let v = 2 * k;
    let inf = n - 1;
    let op = |x: u32, y: u32| {
        let s = (x + y) % v;
        if s.is_multiple_of(2) {
            s / 2
        } else {
            (s - 1) / 2 + k
        }
    };
    let pt = |x: u32, i: u32| 3 * x + i % 3;
    let mut blocks = Vec::new();
    for x in 0..k {
        blocks.push(vec![pt(x, 0), pt(x, 1), pt(x, 2)]);
        for i in 0..3 {
            blocks.push(vec![inf, pt(x + k, i), pt(x, i + 1)]);
        }
    }
    for x in 0..v {
        for y in x + 1..v {
            for i in 0..3 {
                blocks.push(vec![pt(x, i), pt(y, i), pt(op(x, y), i + 1)]);
            }
        }
    }
    blocks
}

/// 3-GDD of type `3^u` for odd `u >= 3`, groups `{3i, 3i+1, 3i+2}`.
pub fn gdd_3_type3u(u: u32) -> Result<Gdd> {
    if u < 3 || u.is_multiple_of(2) {
        return Err(Error::BadOrder { n: u, reason: "3-GDD of type 3^u needs odd u >= 3".into() });
    }
    let groups = (0..u).map(|x| vec![3 * x, 3 * x + 1, 3 * x + 2]).collect();
    Ok(Gdd::new(3 * u, groups, bose_blocks(u, false)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeaveSpec {
    Empty,
    /// Cycle `(0, 1, ..., len-1)`.
    CycleOnFirst(u32),
    /// Cycle `(0, 1, 2, 3)`.
    FourCycleOnFirst,
    ExplicitEdges(Vec<(u32, u32)>),
}

impl LeaveSpec {
    pub fn edges(&self, n: u32) -> Result<BTreeSet<(u32, u32)>> {
        let cycle = |len: u32| -> Result<BTreeSet<(u32, u32)>> {
            if len < 3 || len > n {
                return Err(Error::InconsistentSpec(format!("cycle of length {len} on {n} points")));
            }
            Ok((0..len).map(|i| (i.min((i + 1) % len), i.max((i + 1) % len))).collect())
        };
        match self {
            LeaveSpec::Empty => Ok(BTreeSet::new()),
            LeaveSpec::CycleOnFirst(len) => cycle(*len),
            LeaveSpec::FourCycleOnFirst => cycle(4),
            LeaveSpec::ExplicitEdges(es) => {
                let mut set = BTreeSet::new();
                for &(a, b) in es {
                    if a == b || a >= n || b >= n {
                        return Err(Error::InconsistentSpec(format!("bad edge ({a},{b})")));
                    }
                    if !set.insert((a.min(b), a.max(b))) {
                        return Err(Error::InconsistentSpec(format!("edge ({a},{b}) listed twice")));
                    }
                }
                Ok(set)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HillClimbBudget {
    pub moves_per_restart: u64,
    pub restarts: u32,
}

impl Default for HillClimbBudget {
    fn default() -> Self {
        HillClimbBudget { moves_per_restart: 2_000_000, restarts: 20 }
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed_c0de;

const NONE: u32 = u32::MAX;

/// Incremental triangle decomposition state over a graph on `n` vertices.
struct TriangleState {
    n: usize,
    in_g: Vec<bool>,
    third: Vec<u32>,
    unc: Vec<Vec<u32>>,
    pos: Vec<u32>,
    live: Vec<u32>,
    live_pos: Vec<u32>,
    blocks: usize,
}

impl TriangleState {
    fn new(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut s = TriangleState {
            n,
            in_g: vec![false; n * n],
            third: vec![NONE; n * n],
            unc: vec![Vec::new(); n],
            pos: vec![NONE; n * n],
            live: Vec::new(),
            live_pos: vec![NONE; n],
            blocks: 0,
        };
        for &(a, b) in edges {
            s.in_g[a as usize * n + b as usize] = true;
            s.in_g[b as usize * n + a as usize] = true;
            s.push_unc(a, b);
            s.push_unc(b, a);
        }
        s
    }

    fn push_unc(&mut self, a: u32, b: u32) {
        let n = self.n;
        if self.unc[a as usize].is_empty() {
            self.live_pos[a as usize] = self.live.len() as u32;
            self.live.push(a);
        }
        self.pos[a as usize * n + b as usize] = self.unc[a as usize].len() as u32;
        self.unc[a as usize].push(b);
    }

    fn drop_unc(&mut self, a: u32, b: u32) {
        let n = self.n;
        let i = self.pos[a as usize * n + b as usize] as usize;
        let list = &mut self.unc[a as usize];
        let last = *list.last().unwrap();
        list.swap_remove(i);
        if last != b {
            self.pos[a as usize * n + last as usize] = i as u32;
        }
        self.pos[a as usize * n + b as usize] = NONE;
        if self.unc[a as usize].is_empty() {
            let li = self.live_pos[a as usize] as usize;
            let moved = *self.live.last().unwrap();
            self.live.swap_remove(li);
            if moved != a {
                self.live_pos[moved as usize] = li as u32;
            }
            self.live_pos[a as usize] = NONE;
        }
    }

    fn cover(&mut self, a: u32, b: u32, c: u32) {
        let n = self.n;
        self.third[a as usize * n + b as usize] = c;
        self.third[b as usize * n + a as usize] = c;
        self.drop_unc(a, b);
        self.drop_unc(b, a);
    }

    fn uncover(&mut self, a: u32, b: u32) {
        let n = self.n;
        self.third[a as usize * n + b as usize] = NONE;
        self.third[b as usize * n + a as usize] = NONE;
        self.push_unc(a, b);
        self.push_unc(b, a);
    }

    fn add_block(&mut self, x: u32, y: u32, z: u32) {
        self.cover(x, y, z);
        self.cover(x, z, y);
        self.cover(y, z, x);
        self.blocks += 1;
    }

    fn remove_block(&mut self, x: u32, y: u32, z: u32) {
        self.uncover(x, y);
        self.uncover(x, z);
        self.uncover(y, z);
        self.blocks -= 1;
    }

    /// One switch move; false if the picked pair is not an edge.
    fn step(&mut self, rng: &mut ChaCha8Rng) -> bool {
        let n = self.n;
        let x = self.live[rng.gen_range(0..self.live.len())];
        let nb = &self.unc[x as usize];
        if nb.len() < 2 {
            return false;
        }
        let i = rng.gen_range(0..nb.len());
        let mut j = rng.gen_range(0..nb.len() - 1);
        if j >= i {
            j += 1;
        }
        let (y, z) = (nb[i], nb[j]);
        if !self.in_g[y as usize * n + z as usize] {
            return false;
        }
        let w = self.third[y as usize * n + z as usize];
        if w != NONE {
            self.remove_block(y, z, w);
        }
        self.add_block(x, y, z);
        true
    }

    fn blocks(&self) -> Vec<Vec<u32>> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.blocks);
        for a in 0..n {
            for b in a + 1..n {
                let c = self.third[a * n + b];
                if c != NONE && c as usize > b {
                    out.push(vec![a as u32, b as u32, c]);
                }
            }
        }
        out
    }
}

/// Triangle decomposition of `K_n` minus `leave`, by randomized switching.
/// The result is a maximum-size packing whose leave is exactly `leave`.
pub fn packing_with_leave(n: u32, spec: &LeaveSpec, budget: HillClimbBudget, seed: u64) -> Result<SetSystem> {
    let leave = spec.edges(n)?;
    let mut deg = vec![n.saturating_sub(1); n as usize];
    for &(a, b) in &leave {
        deg[a as usize] -= 1;
        deg[b as usize] -= 1;
    }
    let total = binomial(n as u64, 2).unwrap() as usize - leave.len();
    if !total.is_multiple_of(3) {
        return Err(Error::InconsistentSpec(format!("{total} remaining edges is not a multiple of 3")));
    }
    if let Some(v) = deg.iter().position(|d| d % 2 == 1) {
        return Err(Error::InconsistentSpec(format!("vertex {v} keeps odd degree {}", deg[v])));
    }
    let target = total / 3;
    let mut edges = Vec::with_capacity(total);
    for a in 0..n {
        for b in a + 1..n {
            if !leave.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
    }
    if target == 0 {
        return Ok(SetSystem::new(n, Vec::new()));
    }
    for r in 0..budget.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let mut order = edges.clone();
        order.shuffle(&mut rng);
        let mut st = TriangleState::new(n as usize, &order);
        let mut moves = 0;
        while st.blocks < target && moves < budget.moves_per_restart {
            st.step(&mut rng);
            moves += 1;
        }
        if st.blocks == target {
            log::debug!("leave packing n={n}: {moves} moves, restart {r}");
            let mut blocks = st.blocks();
            blocks.sort();
            return Ok(SetSystem::new(n, blocks));
        }
    }
    Err(Error::NotFound(format!("triangle decomposition of K_{n} minus leave")))
}

/// Outcome of an exact packing search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackSearch {
    Found(SetSystem),
    Infeasible,
    Exhausted,
}

/// Precomputed incidence for `t`-packings by `k`-subsets of `n` points.
struct PackIndex {
    n: u32,
    blocks: Vec<Vec<u32>>,
    block_tsubs: Vec<Vec<u32>>,
    tsub_blocks: Vec<Vec<u32>>,
    tsub_parents: Vec<Vec<u32>>,
    parent_count: usize,
    /// Max blocks through a (t-1)-subset per free t-subset: `k - t + 1`.
    per_parent: u32,
    /// (t-1)-subsets per block: `C(k, t-1)`.
    parents_per_block: u32,
    ct: usize,
}

impl PackIndex {
    fn new(n: u32, k: usize, t: usize) -> Self {
        let tsub_total = binomial(n as u64, t as u64).unwrap() as usize;
        let parent_count = binomial(n as u64, t as u64 - 1).unwrap() as usize;
        let mut blocks = Vec::new();
        let points: Vec<u32> = (0..n).collect();
        for_each_subset(&points, k, &mut |b| blocks.push(b.to_vec()));
        blocks.sort();
        let mut block_tsubs = Vec::with_capacity(blocks.len());
        let mut tsub_blocks = vec![Vec::new(); tsub_total];
        for (bi, b) in blocks.iter().enumerate() {
            let mut ts = Vec::new();
            for_each_subset(b, t, &mut |s| ts.push(colex_rank(s) as u32));
            for &s in &ts {
                tsub_blocks[s as usize].push(bi as u32);
            }
            block_tsubs.push(ts);
        }
        let mut tsub_parents = vec![Vec::new(); tsub_total];
        let mut buf = Vec::new();
        for (r, parents) in tsub_parents.iter_mut().enumerate() {
            colex_unrank(r, t, &mut buf);
            for_each_subset(&buf, t - 1, &mut |s| parents.push(colex_rank(s) as u32));
        }
        // Branch on t-subsets in lexicographic order of their points.
        let mut lex: Vec<u32> = (0..tsub_total as u32).collect();
        lex.sort_by_key(|&r| {
            colex_unrank(r as usize, t, &mut buf);
            buf.clone()
        });
        let mut relabel = vec![0u32; tsub_total];
        for (i, &r) in lex.iter().enumerate() {
            relabel[r as usize] = i as u32;
        }
        for ts in &mut block_tsubs {
            for s in ts.iter_mut() {
                *s = relabel[*s as usize];
            }
        }
        let tsub_blocks = lex.iter().map(|&r| tsub_blocks[r as usize].clone()).collect();
        let tsub_parents = lex.iter().map(|&r| tsub_parents[r as usize].clone()).collect();
        PackIndex {
            n,
            blocks,
            block_tsubs,
            tsub_blocks,
            tsub_parents,
            parent_count,
            per_parent: (k - t + 1) as u32,
            parents_per_block: binomial(k as u64, t as u64 - 1).unwrap() as u32,
            ct: binomial(k as u64, t as u64).unwrap() as usize,
        }
    }
}

struct PackState<'a> {
    ix: &'a PackIndex,
    free: Vec<bool>,
    parent_free: Vec<u32>,
    parent_sum: u64,
    chosen: Vec<u32>,
    left: usize,
}

impl<'a> PackState<'a> {
    fn new(ix: &'a PackIndex) -> Self {
        let mut parent_free = vec![0u32; ix.parent_count];
        for ps in &ix.tsub_parents {
            for &p in ps {
                parent_free[p as usize] += 1;
            }
        }
        let parent_sum = parent_free.iter().map(|&f| (f / ix.per_parent) as u64).sum();
        PackState { ix, free: vec![true; ix.tsub_blocks.len()], parent_free, parent_sum, chosen: Vec::new(), left: 0 }
    }

    fn set_free(&mut self, s: u32, value: bool) {
        self.free[s as usize] = value;
        for &p in &self.ix.tsub_parents[s as usize] {
            let f = &mut self.parent_free[p as usize];
            let before = (*f / self.ix.per_parent) as u64;
            if value {
                *f += 1;
            } else {
                *f -= 1;
            }
            let after = (*f / self.ix.per_parent) as u64;
            self.parent_sum = self.parent_sum + after - before;
        }
    }

    fn bound(&self) -> usize {
        self.chosen.len() + (self.parent_sum / self.ix.parents_per_block as u64) as usize
    }

    fn block_fits(&self, b: u32) -> bool {
        self.ix.block_tsubs[b as usize].iter().all(|&s| self.free[s as usize])
    }

    fn take(&mut self, b: u32) {
        for i in 0..self.ix.block_tsubs[b as usize].len() {
            let s = self.ix.block_tsubs[b as usize][i];
            self.set_free(s, false);
        }
        self.chosen.push(b);
    }

    fn untake(&mut self) {
        let b = self.chosen.pop().unwrap();
        for i in 0..self.ix.block_tsubs[b as usize].len() {
            let s = self.ix.block_tsubs[b as usize][i];
            self.set_free(s, true);
        }
    }
}

struct PackCtl<'a> {
    target: usize,
    slack: usize,
    nodes: &'a AtomicU64,
    node_budget: u64,
    exhausted: &'a AtomicBool,
    /// Lowest branch index that already succeeded.
    winner: &'a AtomicUsize,
    branch: usize,
}

impl PackCtl<'_> {
    fn should_stop(&self) -> bool {
        self.exhausted.load(Ordering::Relaxed) || self.winner.load(Ordering::Relaxed) < self.branch
    }
}

/// Depth-first search branching on the first free t-subset: cover it or give it up.
fn pack_dfs(st: &mut PackState, cursor: usize, ctl: &PackCtl) -> bool {
    if st.chosen.len() == ctl.target {
        return true;
    }
    if ctl.nodes.fetch_add(1, Ordering::Relaxed) >= ctl.node_budget {
        ctl.exhausted.store(true, Ordering::Relaxed);
        return false;
    }
    if ctl.should_stop() || st.bound() < ctl.target {
        return false;
    }
    let mut c = cursor;
    while c < st.free.len() && !st.free[c] {
        c += 1;
    }
    if c == st.free.len() {
        return false;
    }
    for bi in 0..st.ix.tsub_blocks[c].len() {
        let b = st.ix.tsub_blocks[c][bi];
        if st.block_fits(b) {
            st.take(b);
            if pack_dfs(st, c + 1, ctl) {
                return true;
            }
            st.untake();
            if ctl.should_stop() {
                return false;
            }
        }
    }
    if st.left < ctl.slack {
        st.left += 1;
        st.set_free(c as u32, false);
        let ok = pack_dfs(st, c + 1, ctl);
        if ok {
            return true;
        }
        st.set_free(c as u32, true);
        st.left -= 1;
    }
    false
}

/// Looks for `target` blocks of size `k` covering every `t`-subset at most once.
/// The witness is the first one in branching order, for any strategy.
pub fn find_packing(n: u32, k: usize, t: usize, target: usize, node_budget: u64, strategy: Strategy) -> PackSearch {
    if target == 0 {
        return PackSearch::Found(SetSystem::new(n, Vec::new()));
    }
    if t == 0 || k < t || (n as usize) < k {
        return PackSearch::Infeasible;
    }
    let ix = PackIndex::new(n, k, t);
    let total = ix.tsub_blocks.len();
    if ix.ct * target > total {
        return PackSearch::Infeasible;
    }
    let slack = total - ix.ct * target;
    let nodes = AtomicU64::new(0);
    let exhausted = AtomicBool::new(false);
    let winner = AtomicUsize::new(usize::MAX);

    // Top-level branches on t-subset 0: each block through it, then "leave it".
    let mut firsts: Vec<Option<u32>> = ix.tsub_blocks[0].iter().map(|&b| Some(b)).collect();
    if slack > 0 {
        firsts.push(None);
    }
    let results = par::map_indexed(strategy, firsts.len(), |i| {
        let ctl = PackCtl {
            target,
            slack,
            nodes: &nodes,
            node_budget,
            exhausted: &exhausted,
            winner: &winner,
            branch: i,
        };
        let mut st = PackState::new(&ix);
        match firsts[i] {
            Some(b) => st.take(b),
            None => {
                st.left = 1;
                st.set_free(0, false);
            }
        }
        if pack_dfs(&mut st, 1, &ctl) {
            winner.fetch_min(i, Ordering::Relaxed);
            Some(st.chosen.clone())
        } else {
            None
        }
    });
    if let Some(chosen) = results.into_iter().flatten().next() {
        let blocks = chosen.iter().map(|&b| ix.blocks[b as usize].clone()).collect();
        return PackSearch::Found(SetSystem::new(ix.n, blocks));
    }
    if exhausted.load(Ordering::Relaxed) {
        PackSearch::Exhausted
    } else {
        PackSearch::Infeasible
    }
}

/// Nested-floor cap `floor(n/k floor((n-1)/(k-1) ... ))`.
pub fn johnson_bound(n: u64, k: u64, t: u64) -> u64 {
    let mut v = 1u64;
    for i in (0..t).rev() {
        if n < i || k <= i {
            return 0;
        }
        v = (n - i) * v / (k - i);
    }
    v
}

/// Candidate-block cap for the exhaustive oracle.
pub const ORACLE_BLOCK_LIMIT: u128 = 5_000;

/// Exact packing number by exhaustive search, trying targets downward.
pub fn brute_force_packing_number(n: u32, k: usize, t: usize) -> Result<usize> {
    brute_force_packing_number_with(n, k, t, Strategy::default())
}

pub fn brute_force_packing_number_with(n: u32, k: usize, t: usize, strategy: Strategy) -> Result<usize> {
    let cands = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
    if cands > ORACLE_BLOCK_LIMIT {
        return Err(Error::TooLarge(format!("C({n},{k}) = {cands} candidate blocks")));
    }
    if (n as usize) < k {
        return Ok(0);
    }
    let mut target = johnson_bound(n as u64, k as u64, t as u64) as usize;
    loop {
        match find_packing(n, k, t, target, u64::MAX, strategy) {
            PackSearch::Found(_) => return Ok(target),
            PackSearch::Infeasible => target -= 1,
            PackSearch::Exhausted => unreachable!("unbounded budget"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Design {
    Packing { system: SetSystem, strength: usize },
    Gdd(Gdd),
}

pub fn parse_design(text: &str) -> Result<Design> {
    let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "design v1")) => {}
        Some((i, _)) => return Err(perr(i, "expected header `design v1`")),
        None => return Err(perr(0, "empty design file")),
    }
    let mut points: Option<u32> = None;
    let mut strength = 2usize;
    let mut groups = Vec::new();
    let mut blocks = Vec::new();
    for (i, l) in lines {
        let mut it = l.split_whitespace();
        let key = it.next().unwrap();
        let nums: std::result::Result<Vec<u32>, _> = it.map(|s| s.parse::<u32>()).collect();
        let nums = nums.map_err(|_| perr(i, "expected integers"))?;
        match key {
            "points" if nums.len() == 1 => points = Some(nums[0]),
            "strength" if nums.len() == 1 => strength = nums[0] as usize,
            "group" => groups.push(nums),
            "block" => blocks.push(nums),
            _ => return Err(perr(i, &format!("unexpected line `{l}`"))),
        }
    }
    let n = points.ok_or_else(|| perr(0, "missing `points` line"))?;
    for b in groups.iter().chain(blocks.iter()) {
        if let Some(&p) = b.iter().find(|&&p| p >= n) {
            return Err(Error::PointOutOfRange { point: p as u64, n });
        }
    }
    if groups.is_empty() {
        Ok(Design::Packing { system: SetSystem::new(n, blocks), strength })
    } else {
        Ok(Design::Gdd(Gdd::new(n, groups, blocks)))
    }
}

/// Parses and verifies; verification failures are errors.
pub fn load_design_str(text: &str) -> Result<Design> {
    let d = parse_design(text)?;
    match &d {
        Design::Packing { system, strength } => {
            let chk = verify_packing(system, *strength);
            if !chk.ok {
                return Err(Error::Verification(format!(
                    "{}-subset {:?} repeated",
                    strength,
                    chk.repeated.unwrap_or_default()
                )));
            }
        }
        Design::Gdd(g) => {
            let mut sizes: Vec<usize> = g.blocks.iter().map(|b| b.len()).collect();
            sizes.sort_unstable();
            sizes.dedup();
            check_gdd(g, &sizes).map_err(Error::Verification)?;
        }
    }
    Ok(d)
}

pub fn load_design(path: &Path) -> Result<Design> {
    load_design_str(&std::fs::read_to_string(path)?)
}

pub fn write_design(d: &Design) -> String {
    let mut s = String::from("design v1\n");
    let line = |s: &mut String, key: &str, b: &[u32]| {
        let _ = writeln!(s, "{key} {}", b.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "));
    };
    match d {
        Design::Packing { system, strength } => {
            let _ = writeln!(s, "points {}", system.point_count);
            if *strength != 2 {
                let _ = writeln!(s, "strength {strength}");
            }
            for b in &system.blocks {
                line(&mut s, "block", b);
            }
        }
        Design::Gdd(g) => {
            let _ = writeln!(s, "points {}", g.point_count);
            for grp in &g.groups {
                line(&mut s, "group", grp);
            }
            for b in &g.blocks {
                line(&mut s, "block", b);
            }
        }
    }
    s
}

/// Bundled 4-GDDs: `(id, file name, contents)`.
pub const GDD_CATALOG: [(&str, &str, &str); 8] = [
    ("6^7", "6-7.txt", include_str!("../data/gdd/6-7.txt")),
    ("7^4", "7-4.txt", include_str!("../data/gdd/7-4.txt")),
    ("9^4", "9-4.txt", include_str!("../data/gdd/9-4.txt")),
    ("12^4", "12-4.txt", include_str!("../data/gdd/12-4.txt")),
    ("15^4", "15-4.txt", include_str!("../data/gdd/15-4.txt")),
    ("24^4", "24-4.txt", include_str!("../data/gdd/24-4.txt")),
    ("27^4", "27-4.txt", include_str!("../data/gdd/27-4.txt")),
    ("36^4", "36-4.txt", include_str!("../data/gdd/36-4.txt")),
];

/// Environment variable naming a directory that overrides bundled data.
pub const CATALOG_DIR_ENV: &str = "L1CWC_CATALOG_DIR";

pub fn catalog_dir() -> Option<std::path::PathBuf> {
    std::env::var_os(CATALOG_DIR_ENV).map(Into::into)
}

/// Provenance comment lines (without `#`) of a catalog text.
pub fn provenance(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect()
}

/// Catalog lookup: bundled 4-GDDs, an override directory, or `3^u` built on the fly.
pub fn catalog(id: &str) -> Result<Gdd> {
    catalog_in(id, catalog_dir().as_deref())
}

pub fn catalog_in(id: &str, dir: Option<&Path>) -> Result<Gdd> {
    let id = id.trim();
    if let Some(entry) = GDD_CATALOG.iter().find(|e| e.0 == id) {
        let text = match dir.map(|d| d.join("gdd").join(entry.1)) {
            Some(p) if p.exists() => std::fs::read_to_string(p)?,
            _ => entry.2.to_string(),
        };
        return match load_design_str(&text)? {
            Design::Gdd(g) => Ok(g),
            Design::Packing { .. } => Err(Error::Verification(format!("{id} has no groups"))),
        };
    }
    if let Some(dir) = dir {
        let p = dir.join("gdd").join(format!("{}.txt", id.replace('^', "-").replace(' ', "_")));
        if p.exists() {
            if let Design::Gdd(g) = load_design(&p)? {
                return Ok(g);
            }
        }
    }
    if let Some(u) = id.strip_prefix("3^").and_then(|s| s.parse::<u32>().ok()) {
        let g = gdd_3_type3u(u)?;
        check_gdd(&g, &[3]).map_err(Error::Verification)?;
        return Ok(g);
    }
    Err(Error::UnknownEntry(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_roundtrip() {
        let mut buf = Vec::new();
        for r in 0..binomial(9, 3).unwrap() as usize {
            colex_unrank(r, 3, &mut buf);
            assert_eq!(colex_rank(&buf), r);
        }
    }

    #[test]
    fn sts_orders() {
        for n in [3u32, 7, 9, 13, 15, 19, 21, 25, 27, 31, 33, 37, 39, 43, 45] {
            let s = sts(n).unwrap();
            assert_eq!(s.len() as u32, n * (n - 1) / 6, "n={n}");
            let chk = verify_packing(&s, 2);
            assert!(chk.ok && chk.leave.is_empty(), "n={n}");
        }
        assert!(matches!(sts(5), Err(Error::BadOrder { .. })));
    }

    #[test]
    fn three_gdds() {
        assert_eq!(gdd_3_type3u(3).unwrap().blocks.len(), 9);
        assert_eq!(gdd_3_type3u(5).unwrap().blocks.len(), 30);
        assert!(gdd_3_type3u(4).is_err());
        for u in [3, 5, 7, 9, 11] {
            let g = gdd_3_type3u(u).unwrap();
            assert!(verify_gdd(&g, &[3]));
            let mut broken = g.clone();
            broken.blocks.pop();
            assert!(!verify_gdd(&broken, &[3]));
        }
    }

    #[test]
    fn verify_packing_cases() {
        let chk = verify_packing(&sts(7).unwrap(), 2);
        assert!(chk.ok && chk.leave.is_empty());
        let bad = SetSystem::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]]);
        assert!(!verify_packing(&bad, 2).ok);
        assert_eq!(verify_packing(&bad, 2).repeated, Some(vec![0, 1]));
    }

    #[test]
    fn leave_packings() {
        let b = HillClimbBudget::default();
        let p = packing_with_leave(9, &LeaveSpec::CycleOnFirst(9), b, DEFAULT_SEED).unwrap();
        assert_eq!(p.len(), 9);
        let chk = verify_packing(&p, 2);
        assert!(chk.ok && chk.leave_graph(9).is_cycle(&(0..9).collect::<Vec<_>>()));

        let p = packing_with_leave(7, &LeaveSpec::CycleOnFirst(6), b, DEFAULT_SEED).unwrap();
        assert_eq!(p.len(), 5);
        let chk = verify_packing(&p, 2);
        assert!(chk.leave_graph(7).is_cycle(&[0, 1, 2, 3, 4, 5]));
        assert_eq!(chk.leave_graph(7).degree(6), 0);

        let p = packing_with_leave(5, &LeaveSpec::FourCycleOnFirst, b, DEFAULT_SEED).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 2, 4], vec![1, 3, 4]]);

        assert!(matches!(
            packing_with_leave(6, &LeaveSpec::Empty, b, DEFAULT_SEED),
            Err(Error::InconsistentSpec(_))
        ));
    }

    #[test]
    fn exact_packings() {
        assert_eq!(brute_force_packing_number(7, 3, 2).unwrap(), 7);
        assert_eq!(brute_force_packing_number(6, 4, 3).unwrap(), 3);
        assert_eq!(brute_force_packing_number(4, 4, 2).unwrap(), 1);
        assert!(matches!(brute_force_packing_number(30, 4, 2), Err(Error::TooLarge(_))));
        match find_packing(13, 4, 2, 13, 1_000_000, Strategy::Sequential) {
            PackSearch::Found(s) => assert!(verify_packing(&s, 2).ok),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn packing_witness_is_strategy_independent() {
        let a = find_packing(9, 3, 2, 12, u64::MAX, Strategy::Sequential);
        let b = find_packing(9, 3, 2, 12, u64::MAX, Strategy::Parallel);
        assert_eq!(a, b);
    }

    #[test]
    fn design_files() {
        let g = gdd_3_type3u(3).unwrap();
        let text = write_design(&Design::Gdd(g.clone()));
        assert_eq!(load_design_str(&text).unwrap(), Design::Gdd(g));
        assert!(matches!(load_design_str("design v1\npoints x\n"), Err(Error::Parse { .. })));
        assert!(matches!(load_design_str("nonsense"), Err(Error::Parse { .. })));
        let twice = "design v1\npoints 4\nblock 0 1 2\nblock 0 1 3\n";
        assert!(matches!(load_design_str(twice), Err(Error::Verification(_))));
    }

    #[test]
    fn catalog_entries_verify() {
        let g = catalog("6^7").unwrap();
        assert_eq!(g.point_count, 42);
        assert_eq!(g.blocks.len(), 126);
        assert!(verify_gdd(&g, &[4]));
        for (id, _, _) in GDD_CATALOG {
            let g = catalog(id).unwrap();
            assert_eq!(g.type_string(), id);
        }
        assert_eq!(catalog("3^5").unwrap().blocks.len(), 30);
        assert!(matches!(catalog("5^5"), Err(Error::UnknownEntry(_))));
    }
}
