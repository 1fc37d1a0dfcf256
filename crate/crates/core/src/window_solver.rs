//! The window subproblem: the cheapest system of paths inside a window with
//! prescribed per-slot endpoints that jointly visits exactly `k` points.
//!
//! Sweeps talk to the subsolver only through [`WindowOracle`]. Any oracle
//! whose answers are within `(1 + accuracy)` of the window optimum keeps the
//! sweep guarantees; [`ExactWindowSolver`] answers exactly with bitmask
//! dynamic programs and therefore satisfies the contract for every accuracy.
//!
//! Sharing rule inside a window: a point may be visited by several slots
//! only if it is a prescribed endpoint of each of them. Interior visits are
//! exclusive and never touch a prescribed endpoint.

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::path::Path;

pub const DEFAULT_POINT_CAP: usize = 18;

/// Per-slot window endpoints; `None` plays the role of a null point.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EndpointArrays {
    pub sources: Vec<Option<usize>>,
    pub sinks: Vec<Option<usize>>,
}

impl EndpointArrays {
    pub fn new(sources: Vec<Option<usize>>, sinks: Vec<Option<usize>>) -> Result<Self> {
        if sources.len() != sinks.len() {
            return Err(Error::InvalidInput(format!(
                "endpoint arrays differ in length: {} sources, {} sinks",
                sources.len(),
                sinks.len()
            )));
        }
        Ok(Self { sources, sinks })
    }

    pub fn single(source: usize, sink: usize) -> Self {
        Self {
            sources: vec![Some(source)],
            sinks: vec![Some(sink)],
        }
    }

    pub fn slots(&self) -> usize {
        self.sources.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowSolution {
    /// `None` when no path system satisfies the query.
    pub total_length: Option<f64>,
    /// One path per slot; `None` for ignored (null) slots.
    pub paths: Vec<Option<Path>>,
    pub visited_count: usize,
}

impl WindowSolution {
    pub fn infeasible(slots: usize) -> Self {
        Self {
            total_length: None,
            paths: vec![None; slots],
            visited_count: 0,
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.total_length.is_some()
    }
}

/// Master endpoints of one path of a multi-path problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub source: usize,
    pub sink: usize,
}

/// A partial multi-path after the sweep has passed some prefix of points:
/// the current end of each slot (`None` if the slot has not started) and
/// how many distinct points have been visited.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrontierState {
    pub ends: Vec<Option<usize>>,
    pub count: usize,
}

/// Parameters shared by every input of one [`WindowOracle::advance`] call.
#[derive(Debug, Clone, Copy)]
pub struct AdvanceQuery<'a> {
    pub slots: &'a [Slot],
    /// Outputs may not visit more than this many points in total.
    pub max_count: usize,
    /// Partial systems that provably cannot finish within this total length
    /// may be dropped (`INFINITY` disables pruning).
    pub cost_limit: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierInput {
    pub state: FrontierState,
    pub cost: f64,
}

/// Best extension of some input through one window.
#[derive(Debug, Clone, PartialEq)]
pub struct Advance {
    pub state: FrontierState,
    pub cost: f64,
    /// Index of the input this extension starts from.
    pub from: usize,
    /// Where each slot enters the window (`None` if it does not).
    pub entries: Vec<Option<usize>>,
}

pub trait WindowOracle {
    fn point_cap(&self) -> usize;

    /// Solves one window query. `accuracy` is the relative error the caller
    /// can afford.
    fn solve(
        &self,
        points: &PointSet,
        window: &[usize],
        endpoints: &EndpointArrays,
        k: usize,
        accuracy: f64,
    ) -> Result<WindowSolution>;

    /// Single-slot lengths from `source` to every window point: entry
    /// `[i][kappa]` is the query value for sink `window[i]` visiting `kappa`
    /// points (`INFINITY` when infeasible; index 0 is unused).
    fn path_lengths(
        &self,
        points: &PointSet,
        window: &[usize],
        source: usize,
        max_k: usize,
        accuracy: f64,
    ) -> Result<Vec<Vec<f64>>> {
        let mut table = vec![vec![f64::INFINITY; max_k + 1]; window.len()];
        for (i, &sink) in window.iter().enumerate() {
            for (kappa, slot) in table[i].iter_mut().enumerate().skip(1) {
                let sol = self.solve(
                    points,
                    window,
                    &EndpointArrays::single(source, sink),
                    kappa,
                    accuracy,
                )?;
                if let Some(len) = sol.total_length {
                    *slot = len;
                }
            }
        }
        Ok(table)
    }

    /// Extends every input frontier through `window` (a contiguous block of
    /// the sweep order lying entirely after the inputs' points): each slot
    /// either skips the window, starts at its master source inside it, or
    /// bridges from its current end to an entry point and continues. Returns
    /// the cheapest result per output state. Extensions that visit nothing
    /// are not reported.
    fn advance(
        &self,
        points: &PointSet,
        window: &[usize],
        query: &AdvanceQuery,
        inputs: &[FrontierInput],
    ) -> Result<Vec<Advance>> {
        advance_by_queries(self, points, window, query, inputs)
    }
}

/// Exact subsolver: enumerates visit subsets with bitmask dynamic programs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactWindowSolver {
    pub cap: usize,
}

impl Default for ExactWindowSolver {
    fn default() -> Self {
        Self {
            cap: DEFAULT_POINT_CAP,
        }
    }
}

impl ExactWindowSolver {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    fn check_window(&self, points: &PointSet, window: &[usize]) -> Result<()> {
        if window.len() > self.cap {
            return Err(Error::Capacity {
                what: "window point count",
                size: window.len(),
                limit: self.cap,
            });
        }
        let mut seen = vec![false; points.len()];
        for &id in window {
            points.check_id(id)?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::InvalidInput(format!(
                    "point {id} listed twice in window"
                )));
            }
        }
        Ok(())
    }
}

const NONE: u8 = u8::MAX;

impl WindowOracle for ExactWindowSolver {
    fn point_cap(&self) -> usize {
        self.cap
    }

    fn solve(
        &self,
        points: &PointSet,
        window: &[usize],
        endpoints: &EndpointArrays,
        k: usize,
        _accuracy: f64,
    ) -> Result<WindowSolution> {
        self.check_window(points, window)?;
        let m = endpoints.slots();
        let local = |id: usize| window.iter().position(|&w| w == id);

        let mut active: Vec<(usize, usize, usize)> = Vec::new();
        let mut half_open = false;
        for slot in 0..m {
            match (endpoints.sources[slot], endpoints.sinks[slot]) {
                (Some(s), Some(t)) => {
                    let (Some(ls), Some(lt)) = (local(s), local(t)) else {
                        return Err(Error::InvalidInput(format!(
                            "slot {slot} endpoints ({s}, {t}) are not inside the window"
                        )));
                    };
                    active.push((slot, ls, lt));
                }
                (None, None) => {}
                _ => half_open = true,
            }
        }
        let w = window.len();
        let terminal_mask: u32 = active
            .iter()
            .fold(0, |acc, &(_, s, t)| acc | 1 << s | 1 << t);
        if half_open
            || k > w
            || (k as u32) < terminal_mask.count_ones()
            || (active.is_empty() && k > 0)
        {
            return Ok(WindowSolution::infeasible(m));
        }
        if active.is_empty() {
            return Ok(WindowSolution {
                total_length: Some(0.0),
                paths: vec![None; m],
                visited_count: 0,
            });
        }

        let dist: Vec<f64> = (0..w * w)
            .map(|ij| points.distance(window[ij / w], window[ij % w]))
            .collect();
        let masks = 1usize << w;
        let mut start = vec![f64::INFINITY; masks];
        start[0] = 0.0;
        let mut walk = vec![f64::INFINITY; masks * w];
        // Per active slot: walk parents, start-state origins and finish parents.
        let mut walk_parent: Vec<Vec<u8>> = Vec::with_capacity(active.len());
        let mut start_origin: Vec<Vec<u32>> = Vec::with_capacity(active.len());
        let mut finish_parent: Vec<Vec<(u32, u8)>> = Vec::with_capacity(active.len());

        for &(_, s, t) in &active {
            let mut next = vec![f64::INFINITY; masks];
            let mut fpar = vec![(0u32, NONE); masks];
            let mut wpar = Vec::new();
            let mut sorig = Vec::new();
            if s == t {
                for mask in 0..masks {
                    let out = mask | 1 << s;
                    if start[mask] < next[out] {
                        next[out] = start[mask];
                        fpar[out] = (mask as u32, s as u8);
                    }
                }
            } else {
                walk.iter_mut().for_each(|x| *x = f64::INFINITY);
                wpar = vec![NONE; masks * w];
                sorig = vec![0u32; masks];
                for mask in 0..masks {
                    let out = mask | 1 << s;
                    if start[mask] < walk[out * w + s] {
                        walk[out * w + s] = start[mask];
                        sorig[out] = mask as u32;
                    }
                }
                for mask in 0..masks {
                    for cur in 0..w {
                        let here = walk[mask * w + cur];
                        if !here.is_finite() {
                            continue;
                        }
                        let fin = mask | 1 << t;
                        let cand = here + dist[cur * w + t];
                        if cand < next[fin] {
                            next[fin] = cand;
                            fpar[fin] = (mask as u32, cur as u8);
                        }
                        for nxt in 0..w {
                            let bit = 1 << nxt;
                            if mask & bit != 0 || terminal_mask & bit as u32 != 0 {
                                continue;
                            }
                            let to = (mask | bit) * w + nxt;
                            let cand = here + dist[cur * w + nxt];
                            if cand < walk[to] {
                                walk[to] = cand;
                                wpar[to] = cur as u8;
                            }
                        }
                    }
                }
            }
            walk_parent.push(wpar);
            start_origin.push(sorig);
            finish_parent.push(fpar);
            start = next;
        }

        let best = (0..masks)
            .filter(|m| m.count_ones() as usize == k)
            .filter(|&m| start[m].is_finite())
            .min_by(|&a, &b| start[a].total_cmp(&start[b]));
        let Some(mut mask) = best else {
            return Ok(WindowSolution::infeasible(m));
        };
        let total = start[mask];

        let mut paths = vec![None; m];
        for (idx, &(slot, s, t)) in active.iter().enumerate().rev() {
            let (before, last) = finish_parent[idx][mask];
            let mut visits = vec![window[t]];
            if s != t {
                let mut cur_mask = before as usize;
                let mut cur = last as usize;
                loop {
                    visits.push(window[cur]);
                    if cur == s {
                        mask = start_origin[idx][cur_mask] as usize;
                        break;
                    }
                    let prev = walk_parent[idx][cur_mask * w + cur] as usize;
                    cur_mask ^= 1 << cur;
                    cur = prev;
                }
                visits.reverse();
            } else {
                mask = before as usize;
            }
            paths[slot] = Some(Path::new(visits)?);
        }

        Ok(WindowSolution {
            total_length: Some(total),
            paths,
            visited_count: k,
        })
    }

    fn path_lengths(
        &self,
        points: &PointSet,
        window: &[usize],
        source: usize,
        max_k: usize,
        _accuracy: f64,
    ) -> Result<Vec<Vec<f64>>> {
        self.check_window(points, window)?;
        let Some(s) = window.iter().position(|&w| w == source) else {
            return Err(Error::InvalidInput(format!(
                "source {source} is not inside the window"
            )));
        };
        let w = window.len();
        let dist: Vec<f64> = (0..w * w)
            .map(|ij| points.distance(window[ij / w], window[ij % w]))
            .collect();
        let masks = 1usize << w;
        let mut walk = vec![f64::INFINITY; masks * w];
        walk[(1 << s) * w + s] = 0.0;
        let mut table = vec![vec![f64::INFINITY; max_k + 1]; w];
        for mask in 0..masks {
            let size = mask.count_ones() as usize;
            for cur in 0..w {
                let here = walk[mask * w + cur];
                if !here.is_finite() {
                    continue;
                }
                if size <= max_k && here < table[cur][size] {
                    table[cur][size] = here;
                }
                if size >= max_k {
                    continue;
                }
                for nxt in 0..w {
                    let bit = 1 << nxt;
                    if mask & bit != 0 {
                        continue;
                    }
                    let to = (mask | bit) * w + nxt;
                    let cand = here + dist[cur * w + nxt];
                    if cand < walk[to] {
                        walk[to] = cand;
                    }
                }
            }
        }
        Ok(table)
    }

    fn advance(
        &self,
        points: &PointSet,
        window: &[usize],
        query: &AdvanceQuery,
        inputs: &[FrontierInput],
    ) -> Result<Vec<Advance>> {
        self.check_window(points, window)?;
        FusedAdvance::new(points, window, query)?.run(inputs)
    }
}

/// Largest id the packed frontier keys can hold.
const MAX_PACKED_ID: usize = 30;
/// Largest slot count the packed frontier keys can hold.
pub const MAX_PACKED_SLOTS: usize = 7;

const ID_BITS: u32 = 5;
const COUNT_SHIFT: u32 = 35;
const MASK_SHIFT: u32 = 40;

#[derive(Debug, Clone, Copy)]
struct Partial {
    cost: f64,
    from: u32,
    entries: u64,
}

/// Slot-by-slot walk through one window shared by all input frontiers.
///
/// Keys pack the per-slot ends (5 bits each, 0 = not started), the input
/// count and the mask of window points used so far.
struct FusedAdvance<'a> {
    window: &'a [usize],
    slots: &'a [Slot],
    local: Vec<Option<usize>>,
    terminal: Vec<bool>,
    /// `dist[id * w + c]`: distance from any point to window point `c`.
    dist: Vec<f64>,
    /// `to_sink[slot * n + id]`: distance from any point to the slot's sink.
    to_sink: Vec<f64>,
    n: usize,
    max_count: usize,
    cost_limit: f64,
}

fn get_end(key: u64, slot: usize) -> Option<usize> {
    let v = (key >> (slot as u32 * ID_BITS)) & 0x1f;
    (v != 0).then(|| v as usize - 1)
}

fn set_end(key: u64, slot: usize, id: usize) -> u64 {
    let shift = slot as u32 * ID_BITS;
    (key & !(0x1f << shift)) | ((id as u64 + 1) << shift)
}

fn used_mask(key: u64) -> u32 {
    (key >> MASK_SHIFT) as u32
}

fn with_mask(key: u64, mask: u32) -> u64 {
    (key & ((1 << MASK_SHIFT) - 1)) | (u64::from(mask) << MASK_SHIFT)
}

fn key_count(key: u64) -> usize {
    ((key >> COUNT_SHIFT) & 0x1f) as usize
}

fn relax(map: &mut FxHashMap<u64, Partial>, key: u64, cand: Partial) {
    map.entry(key)
        .and_modify(|cur| {
            if cand.cost < cur.cost {
                *cur = cand;
            }
        })
        .or_insert(cand);
}

impl<'a> FusedAdvance<'a> {
    fn new(points: &PointSet, window: &'a [usize], query: &AdvanceQuery<'a>) -> Result<Self> {
        let (slots, max_count) = (query.slots, query.max_count);
        let n = points.len();
        if n > MAX_PACKED_ID || max_count > MAX_PACKED_ID {
            return Err(Error::Capacity {
                what: "point count for the multi-path sweep",
                size: n,
                limit: MAX_PACKED_ID,
            });
        }
        if slots.len() > MAX_PACKED_SLOTS {
            return Err(Error::Capacity {
                what: "slot count",
                size: slots.len(),
                limit: MAX_PACKED_SLOTS,
            });
        }
        let w = window.len();
        let mut local = vec![None; n];
        for (c, &id) in window.iter().enumerate() {
            local[id] = Some(c);
        }
        let mut terminal = vec![false; n];
        for s in slots {
            terminal[s.source] = true;
            terminal[s.sink] = true;
        }
        let mut dist = vec![0.0; n * w];
        for id in 0..n {
            for (c, &wid) in window.iter().enumerate() {
                dist[id * w + c] = points.distance(id, wid);
            }
        }
        let to_sink = slots
            .iter()
            .flat_map(|s| (0..n).map(move |id| points.distance(id, s.sink)))
            .collect();
        Ok(Self {
            window,
            slots,
            local,
            terminal,
            dist,
            to_sink,
            n,
            max_count,
            cost_limit: query.cost_limit,
        })
    }

    fn fits(&self, key: u64, mask: u32) -> bool {
        key_count(key) + mask.count_ones() as usize <= self.max_count
    }

    /// Cost plus the straight-line distance every slot still has to cover.
    fn viable(&self, key: u64, cost: f64) -> bool {
        if self.cost_limit == f64::INFINITY {
            return true;
        }
        let mut bound = cost;
        for (slot, slot_def) in self.slots.iter().enumerate() {
            let from = get_end(key, slot).unwrap_or(slot_def.source);
            bound += self.to_sink[slot * self.n + from];
        }
        bound <= self.cost_limit
    }

    fn push(&self, map: &mut FxHashMap<u64, Partial>, key: u64, cand: Partial) {
        if self.viable(key, cand.cost) {
            relax(map, key, cand);
        }
    }

    /// Whether `slot` may step onto window point `c` given the used mask.
    fn may_enter(&self, slot: usize, c: usize, used: u32) -> bool {
        let id = self.window[c];
        if self.terminal[id] {
            id == self.slots[slot].sink
        } else {
            used & (1 << c) == 0
        }
    }

    fn run(&self, inputs: &[FrontierInput]) -> Result<Vec<Advance>> {
        let w = self.window.len();
        let m = self.slots.len();
        let mut pending: FxHashMap<u64, Partial> = FxHashMap::default();
        for (idx, input) in inputs.iter().enumerate() {
            if input.state.ends.len() != m {
                return Err(Error::InvalidInput(
                    "frontier state has the wrong slot count".into(),
                ));
            }
            let mut key = (input.state.count as u64) << COUNT_SHIFT;
            for (slot, end) in input.state.ends.iter().enumerate() {
                if let Some(id) = *end {
                    if self.local[id].is_some() {
                        return Err(Error::InvalidInput(format!(
                            "frontier end {id} lies inside the window being added"
                        )));
                    }
                    key = set_end(key, slot, id);
                }
            }
            relax(
                &mut pending,
                key,
                Partial {
                    cost: input.cost,
                    from: idx as u32,
                    entries: 0,
                },
            );
        }

        for slot in 0..m {
            let sink = self.slots[slot].sink;
            let mut next = pending.clone();
            let mut levels: Vec<FxHashMap<u64, Partial>> = vec![FxHashMap::default(); w + 1];

            for (&key, &val) in &pending {
                let used = used_mask(key);
                match get_end(key, slot) {
                    None => {
                        let source = self.slots[slot].source;
                        let Some(c) = self.local[source] else {
                            continue;
                        };
                        let mask = used | 1 << c;
                        if !self.fits(key, mask) {
                            continue;
                        }
                        let nk = with_mask(set_end(key, slot, source), mask);
                        let entries = set_end(val.entries, slot, source);
                        self.push(
                            &mut levels[mask.count_ones() as usize],
                            nk,
                            Partial { entries, ..val },
                        );
                    }
                    Some(end) if end == sink => {}
                    Some(end) => {
                        for c in 0..w {
                            if !self.may_enter(slot, c, used) {
                                continue;
                            }
                            let mask = used | 1 << c;
                            if !self.fits(key, mask) {
                                continue;
                            }
                            let id = self.window[c];
                            let cand = Partial {
                                cost: val.cost + self.dist[end * w + c],
                                from: val.from,
                                entries: set_end(val.entries, slot, id),
                            };
                            let nk = with_mask(set_end(key, slot, id), mask);
                            if id == sink {
                                self.push(&mut next, nk, cand);
                            } else {
                                self.push(&mut levels[mask.count_ones() as usize], nk, cand);
                            }
                        }
                    }
                }
            }

            for lvl in 0..=w {
                let layer = std::mem::take(&mut levels[lvl]);
                for (&key, &val) in &layer {
                    relax(&mut next, key, val);
                    let used = used_mask(key);
                    let cur = get_end(key, slot).expect("walking slot has an end");
                    for c in 0..w {
                        if !self.may_enter(slot, c, used) {
                            continue;
                        }
                        let mask = used | 1 << c;
                        if !self.fits(key, mask) {
                            continue;
                        }
                        let id = self.window[c];
                        let cand = Partial {
                            cost: val.cost + self.dist[cur * w + c],
                            ..val
                        };
                        let nk = with_mask(set_end(key, slot, id), mask);
                        if id == sink {
                            self.push(&mut next, nk, cand);
                        } else {
                            self.push(&mut levels[mask.count_ones() as usize], nk, cand);
                        }
                    }
                }
            }
            pending = next;
        }

        let mut best: FxHashMap<u64, Partial> = FxHashMap::default();
        for (&key, &val) in &pending {
            let used = used_mask(key);
            if used == 0 {
                continue;
            }
            let count = key_count(key) + used.count_ones() as usize;
            let out = (key & ((1 << COUNT_SHIFT) - 1)) | (count as u64) << COUNT_SHIFT;
            relax(&mut best, out, val);
        }
        let mut out: Vec<Advance> = best
            .into_iter()
            .map(|(key, val)| Advance {
                state: FrontierState {
                    ends: (0..m).map(|s| get_end(key, s)).collect(),
                    count: key_count(key),
                },
                cost: val.cost,
                from: val.from as usize,
                entries: (0..m).map(|s| get_end(val.entries, s)).collect(),
            })
            .collect();
        out.sort_by(|a, b| (&a.state.ends, a.state.count).cmp(&(&b.state.ends, b.state.count)));
        Ok(out)
    }
}

/// Reference implementation of [`WindowOracle::advance`] built only from
/// [`WindowOracle::solve`] queries. Exponential in the slot count; intended
/// for oracles without a batched path and for cross-checking.
pub fn advance_by_queries<O: WindowOracle + ?Sized>(
    oracle: &O,
    points: &PointSet,
    window: &[usize],
    query: &AdvanceQuery,
    inputs: &[FrontierInput],
) -> Result<Vec<Advance>> {
    let (slots, max_count, accuracy) = (query.slots, query.max_count, query.accuracy);
    let m = slots.len();
    let mut terminal = vec![false; points.len()];
    for s in slots {
        terminal[s.source] = true;
        terminal[s.sink] = true;
    }
    let in_window = |id: usize| window.contains(&id);
    let mut best: FxHashMap<FrontierState, Advance> = FxHashMap::default();

    for (idx, input) in inputs.iter().enumerate() {
        // Per-slot options: None = skip, Some((entry, exit)).
        let mut options: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(m);
        for (slot, slot_def) in slots.iter().enumerate() {
            let mut opts = vec![None];
            match input.state.ends[slot] {
                None if in_window(slot_def.source) => {
                    for &exit in window {
                        if !terminal[exit] || exit == slot_def.sink || exit == slot_def.source {
                            opts.push(Some((slot_def.source, exit)));
                        }
                    }
                }
                None => {}
                Some(end) if end == slot_def.sink => {}
                Some(_) => {
                    for &entry in window {
                        if terminal[entry] && entry != slot_def.sink {
                            continue;
                        }
                        for &exit in window {
                            if terminal[exit] && exit != slot_def.sink {
                                continue;
                            }
                            if entry == slot_def.sink && exit != slot_def.sink {
                                continue;
                            }
                            opts.push(Some((entry, exit)));
                        }
                    }
                }
            }
            options.push(opts);
        }

        let mut choice = vec![0usize; m];
        'combos: loop {
            let picked: Vec<Option<(usize, usize)>> =
                (0..m).map(|s| options[s][choice[s]]).collect();
            if picked.iter().any(Option::is_some) && non_terminals_distinct(&picked, &terminal) {
                let endpoints = EndpointArrays {
                    sources: picked.iter().map(|p| p.map(|x| x.0)).collect(),
                    sinks: picked.iter().map(|p| p.map(|x| x.1)).collect(),
                };
                let bridges: f64 = picked
                    .iter()
                    .zip(&input.state.ends)
                    .map(|(p, end)| match (p, end) {
                        (Some((entry, _)), Some(e)) => points.distance(*e, *entry),
                        _ => 0.0,
                    })
                    .sum();
                for kappa in 1..=max_count.saturating_sub(input.state.count) {
                    let sol = oracle.solve(points, window, &endpoints, kappa, accuracy)?;
                    let Some(len) = sol.total_length else {
                        continue;
                    };
                    let state = FrontierState {
                        ends: picked
                            .iter()
                            .zip(&input.state.ends)
                            .map(|(p, end)| p.map(|x| x.1).or(*end))
                            .collect(),
                        count: input.state.count + kappa,
                    };
                    let cand = Advance {
                        state: state.clone(),
                        cost: input.cost + bridges + len,
                        from: idx,
                        entries: endpoints.sources.clone(),
                    };
                    if cand.cost > query.cost_limit {
                        continue;
                    }
                    match best.get(&state) {
                        Some(cur) if cur.cost <= cand.cost => {}
                        _ => {
                            best.insert(state, cand);
                        }
                    }
                }
            }
            for s in 0..m {
                choice[s] += 1;
                if choice[s] < options[s].len() {
                    continue 'combos;
                }
                choice[s] = 0;
            }
            break;
        }
    }
    let mut out: Vec<Advance> = best.into_values().collect();
    out.sort_by(|a, b| (&a.state.ends, a.state.count).cmp(&(&b.state.ends, b.state.count)));
    Ok(out)
}

/// Non-terminal query endpoints may not be shared between slots.
fn non_terminals_distinct(picked: &[Option<(usize, usize)>], terminal: &[bool]) -> bool {
    let mut seen: Vec<usize> = Vec::new();
    for &(entry, exit) in picked.iter().flatten() {
        let mut own = vec![entry];
        if exit != entry {
            own.push(exit);
        }
        for id in own {
            if !terminal[id] {
                if seen.contains(&id) {
                    return false;
                }
                seen.push(id);
            }
        }
    }
    true
}

/// Exposes only [`WindowOracle::solve`] of the wrapped oracle, so every
/// batched query falls back to the generic per-query implementations.
#[derive(Debug, Clone, Default)]
pub struct QueryOnly<O>(pub O);

impl<O: WindowOracle> WindowOracle for QueryOnly<O> {
    fn point_cap(&self) -> usize {
        self.0.point_cap()
    }

    fn solve(
        &self,
        points: &PointSet,
        window: &[usize],
        endpoints: &EndpointArrays,
        k: usize,
        accuracy: f64,
    ) -> Result<WindowSolution> {
        self.0.solve(points, window, endpoints, k, accuracy)
    }
}

type MemoKey = (Vec<usize>, EndpointArrays, usize);

/// Lazily memoized window queries: each distinct query is answered once by
/// the wrapped oracle, and batched queries are assembled from cached ones.
#[derive(Debug, Default)]
pub struct Memoized<O> {
    inner: O,
    cache: std::cell::RefCell<FxHashMap<MemoKey, WindowSolution>>,
}

impl<O> Memoized<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            cache: Default::default(),
        }
    }

    pub fn cached_queries(&self) -> usize {
        self.cache.borrow().len()
    }
}

impl<O: WindowOracle> WindowOracle for Memoized<O> {
    fn point_cap(&self) -> usize {
        self.inner.point_cap()
    }

    fn solve(
        &self,
        points: &PointSet,
        window: &[usize],
        endpoints: &EndpointArrays,
        k: usize,
        accuracy: f64,
    ) -> Result<WindowSolution> {
        let key = (window.to_vec(), endpoints.clone(), k);
        if let Some(hit) = self.cache.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let sol = self.inner.solve(points, window, endpoints, k, accuracy)?;
        self.cache.borrow_mut().insert(key, sol.clone());
        Ok(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointSet {
        PointSet::from_coords(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn direct_edge() {
        let pts = square();
        let sol = ExactWindowSolver::default()
            .solve(&pts, &[0, 3], &EndpointArrays::single(0, 3), 2, 0.1)
            .unwrap();
        assert!((sol.total_length.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(sol.paths[0].as_ref().unwrap().visits(), &[0, 3]);
    }

    #[test]
    fn single_point_slot() {
        let pts = square();
        let sol = ExactWindowSolver::default()
            .solve(&pts, &[2], &EndpointArrays::single(2, 2), 1, 0.1)
            .unwrap();
        assert_eq!(sol.total_length, Some(0.0));
        assert_eq!(sol.visited_count, 1);
    }

    #[test]
    fn half_null_slot_is_infeasible() {
        let pts = square();
        let ends = EndpointArrays::new(vec![Some(0)], vec![None]).unwrap();
        let sol = ExactWindowSolver::default()
            .solve(&pts, &[0, 1], &ends, 1, 0.1)
            .unwrap();
        assert!(!sol.is_feasible());
    }

    #[test]
    fn too_many_points_requested() {
        let pts = square();
        let sol = ExactWindowSolver::default()
            .solve(&pts, &[0, 3], &EndpointArrays::single(0, 3), 3, 0.1)
            .unwrap();
        assert!(!sol.is_feasible());
    }

    #[test]
    fn capacity_is_enforced() {
        let pts = square();
        let err = ExactWindowSolver::with_cap(2)
            .solve(&pts, &[0, 1, 2], &EndpointArrays::single(0, 1), 2, 0.1)
            .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn endpoints_outside_window_are_rejected() {
        let pts = square();
        let err = ExactWindowSolver::default()
            .solve(&pts, &[0, 1], &EndpointArrays::single(0, 3), 2, 0.1)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn shared_junction_counts_once() {
        let pts =
            PointSet::from_coords(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let ends = EndpointArrays::new(vec![Some(0), Some(1)], vec![Some(1), Some(2)]).unwrap();
        let sol = ExactWindowSolver::default()
            .solve(&pts, &[0, 1, 2], &ends, 3, 0.1)
            .unwrap();
        assert_eq!(sol.total_length, Some(2.0));
        assert_eq!(sol.paths[0].as_ref().unwrap().visits(), &[0, 1]);
        assert_eq!(sol.paths[1].as_ref().unwrap().visits(), &[1, 2]);
    }

    #[test]
    fn batched_lengths_match_queries() {
        let pts = PointSet::from_coords(vec![
            vec![0.0, 0.0],
            vec![0.4, 0.9],
            vec![1.3, -0.2],
            vec![2.0, 0.5],
            vec![0.9, 0.3],
        ])
        .unwrap();
        let window = [0, 1, 2, 3, 4];
        let exact = ExactWindowSolver::default();
        let fast = exact.path_lengths(&pts, &window, 1, 5, 0.0).unwrap();
        for (i, &sink) in window.iter().enumerate() {
            for kappa in 1..=5 {
                let q = exact
                    .solve(&pts, &window, &EndpointArrays::single(1, sink), kappa, 0.0)
                    .unwrap()
                    .total_length
                    .unwrap_or(f64::INFINITY);
                let f = fast[i][kappa];
                assert!(
                    (q.is_infinite() && f.is_infinite()) || (q - f).abs() < 1e-12,
                    "sink {sink} kappa {kappa}: {q} vs {f}"
                );
            }
        }
    }

    #[test]
    fn key_packing_round_trips() {
        let key = set_end(set_end(0, 0, 4), 2, 29);
        assert_eq!(get_end(key, 0), Some(4));
        assert_eq!(get_end(key, 1), None);
        assert_eq!(get_end(key, 2), Some(29));
        let key = with_mask(key | 7 << COUNT_SHIFT, 0b1011);
        assert_eq!(used_mask(key), 0b1011);
        assert_eq!(key_count(key), 7);
        assert_eq!(get_end(key, 2), Some(29));
    }
}
