//! Multi-path plane sweep for the rooted (m,k)-TSP problem.
//!
//! The space is first rotated so that every source-to-sink segment (after
//! swapping the pairs that point backwards) lies in a cone around the sweep
//! axis. Layer `i` of the table holds frontier states over the first `i`
//! ranks: where each slot's partial path currently ends and how many points
//! have been visited. Layer `i` is reached from any earlier layer `j` by one
//! call to the window oracle on ranks `j..i`.

use rustc_hash::FxHashMap;

use crate::direction::{orient_pairs, Orientation};
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::path::{MultiPath, Path};
use crate::window::ids_between;
use crate::window_solver::{
    AdvanceQuery, EndpointArrays, ExactWindowSolver, FrontierInput, FrontierState, Slot,
    WindowOracle, MAX_PACKED_SLOTS,
};

pub const DEFAULT_MAX_SLOTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MktspConfig {
    pub delta: f64,
    /// Constant `c` in the window accuracy `c * delta / m^5.5`. With an exact
    /// window oracle its value does not affect results.
    pub excess_constant: f64,
    /// Largest accepted number of paths; the state space grows quickly in it.
    pub max_slots: usize,
    /// Seed for the random sweep direction.
    pub seed: u64,
}

impl Default for MktspConfig {
    fn default() -> Self {
        Self {
            delta: 0.5,
            excess_constant: 1.0,
            max_slots: DEFAULT_MAX_SLOTS,
            seed: 0,
        }
    }
}

impl MktspConfig {
    pub fn window_accuracy(&self, m: usize) -> f64 {
        self.excess_constant * self.delta / (m as f64).powf(5.5)
    }

    fn validate(&self, m: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "delta must lie in (0, 1], got {}",
                self.delta
            )));
        }
        if !(self.excess_constant > 0.0 && self.excess_constant.is_finite()) {
            return Err(Error::InvalidInput(
                "excess constant must be positive".into(),
            ));
        }
        let limit = self.max_slots.min(MAX_PACKED_SLOTS);
        if m == 0 {
            return Err(Error::InvalidInput(
                "need at least one source/sink pair".into(),
            ));
        }
        if m > limit {
            return Err(Error::Capacity {
                what: "number of paths",
                size: m,
                limit,
            });
        }
        if self.max_slots > DEFAULT_MAX_SLOTS {
            log::warn!(
                "path limit raised to {}; the sweep state space grows steeply with it",
                self.max_slots
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MktspSolution {
    pub paths: MultiPath,
    pub length: f64,
    pub visited: usize,
    pub window_accuracy: f64,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy)]
struct Back {
    layer: usize,
    from: usize,
}

#[derive(Debug, Default)]
struct Layer {
    states: Vec<FrontierInput>,
    index: FxHashMap<FrontierState, usize>,
    back: Vec<Option<(Back, Vec<Option<usize>>)>>,
}

impl Layer {
    fn relax(&mut self, state: FrontierState, cost: f64, back: Back, entries: Vec<Option<usize>>) {
        match self.index.get(&state) {
            Some(&at) => {
                if cost < self.states[at].cost {
                    self.states[at].cost = cost;
                    self.back[at] = Some((back, entries));
                }
            }
            None => {
                self.index.insert(state.clone(), self.states.len());
                self.states.push(FrontierInput { state, cost });
                self.back.push(Some((back, entries)));
            }
        }
    }
}

/// A filled sweep table. One table answers every visit count up to the
/// count it was built for.
#[derive(Debug)]
pub struct MktspSweep {
    pairs: Vec<(usize, usize)>,
    slots: Vec<Slot>,
    orientation: Orientation,
    rank_ids: Vec<usize>,
    layers: Vec<Layer>,
    terminals: usize,
    accuracy: f64,
}

impl MktspSweep {
    /// Fills the table for all counts up to `max_count`, dropping partial
    /// systems that cannot finish within `cost_limit`.
    pub fn build<O: WindowOracle + ?Sized>(
        oracle: &O,
        points: &PointSet,
        pairs: &[(usize, usize)],
        max_count: usize,
        cost_limit: f64,
        config: &MktspConfig,
    ) -> Result<Self> {
        let m = pairs.len();
        config.validate(m)?;
        for &(s, t) in pairs {
            points.check_id(s)?;
            points.check_id(t)?;
            if s == t {
                return Err(Error::Degenerate(format!(
                    "pair ({s}, {t}) starts where it ends"
                )));
            }
        }
        let orientation = orient_pairs(points, pairs, config.seed)?;
        let slots: Vec<Slot> = pairs
            .iter()
            .zip(&orientation.swapped)
            .map(|(&(s, t), &swap)| {
                if swap {
                    Slot { source: t, sink: s }
                } else {
                    Slot { source: s, sink: t }
                }
            })
            .collect();
        let mut terminal_ids: Vec<usize> = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
        terminal_ids.sort_unstable();
        terminal_ids.dedup();

        let frame = orientation.transform.apply_set(points);
        let order = frame.sweep_order();
        let n = points.len();
        let accuracy = config.window_accuracy(m);
        let max_count = max_count.min(n);

        let mut layers: Vec<Layer> = Vec::with_capacity(n + 1);
        let mut base = Layer::default();
        let start = FrontierState {
            ends: vec![None; m],
            count: 0,
        };
        base.index.insert(start.clone(), 0);
        base.states.push(FrontierInput {
            state: start,
            cost: 0.0,
        });
        base.back.push(None);
        layers.push(base);

        let query = AdvanceQuery {
            slots: &slots,
            max_count,
            cost_limit,
            accuracy,
        };
        for i in 1..=n {
            let mut layer = Layer::default();
            for j in 0..i {
                let inputs: Vec<FrontierInput> = layers[j]
                    .states
                    .iter()
                    .filter(|s| s.state.count < max_count)
                    .cloned()
                    .collect();
                if inputs.is_empty() {
                    continue;
                }
                let window = ids_between(&order, j, i - 1);
                for adv in oracle.advance(points, &window, &query, &inputs)? {
                    // `inputs` is a filtered copy: map back to the layer index.
                    let from = layers[j].index[&inputs[adv.from].state];
                    layer.relax(adv.state, adv.cost, Back { layer: j, from }, adv.entries);
                }
            }
            layers.push(layer);
        }

        Ok(Self {
            pairs: pairs.to_vec(),
            slots,
            orientation,
            rank_ids: order.ids().to_vec(),
            layers,
            terminals: terminal_ids.len(),
            accuracy,
        })
    }

    fn goal(&self, count: usize) -> FrontierState {
        FrontierState {
            ends: self.slots.iter().map(|s| Some(s.sink)).collect(),
            count,
        }
    }

    /// Cheapest total length of a system visiting exactly `count` points.
    pub fn exact(&self, count: usize) -> Option<f64> {
        let last = self.layers.last()?;
        last.index
            .get(&self.goal(count))
            .map(|&at| last.states[at].cost)
    }

    /// Cheapest system visiting at least `k` points, as `(count, length)`.
    /// Ties prefer more visits.
    pub fn at_least(&self, k: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for count in k.max(self.terminals)..=self.rank_ids.len() {
            if let Some(len) = self.exact(count) {
                if best.is_none_or(|(_, b)| len <= b) {
                    best = Some((count, len));
                }
            }
        }
        best
    }

    /// Replays the table for the system with exactly `count` visits.
    pub fn reconstruct<O: WindowOracle + ?Sized>(
        &self,
        oracle: &O,
        points: &PointSet,
        count: usize,
    ) -> Result<MultiPath> {
        let m = self.slots.len();
        let last = self.layers.len() - 1;
        let Some(&goal_at) = self.layers[last].index.get(&self.goal(count)) else {
            return Err(Error::Infeasible(format!(
                "no path system visits exactly {count} points"
            )));
        };
        let expected = self.layers[last].states[goal_at].cost;

        let mut pieces: Vec<Vec<Vec<usize>>> = vec![Vec::new(); m];
        let (mut layer, mut at) = (last, goal_at);
        while let Some((back, entries)) = &self.layers[layer].back[at] {
            let out = &self.layers[layer].states[at].state;
            let input = &self.layers[back.layer].states[back.from].state;
            let window: Vec<usize> = self.rank_ids[back.layer..layer].to_vec();
            let sinks = entries
                .iter()
                .zip(&out.ends)
                .map(|(e, end)| e.and(*end))
                .collect();
            let endpoints = EndpointArrays::new(entries.clone(), sinks)?;
            let sol = oracle.solve(
                points,
                &window,
                &endpoints,
                out.count - input.count,
                self.accuracy,
            )?;
            if !sol.is_feasible() {
                return Err(Error::Internal(format!(
                    "window query for ranks {}..{} is infeasible on replay",
                    back.layer, layer
                )));
            }
            for (slot, path) in sol.paths.into_iter().enumerate() {
                if let Some(p) = path {
                    pieces[slot].push(p.visits().to_vec());
                }
            }
            (layer, at) = (back.layer, back.from);
        }

        let mut paths = Vec::with_capacity(m);
        for (slot, segs) in pieces.into_iter().enumerate() {
            let visits: Vec<usize> = segs.into_iter().rev().flatten().collect();
            let path = Path::new(visits)?;
            let slot_def = self.slots[slot];
            if path.source() != slot_def.source || path.sink() != slot_def.sink {
                return Err(Error::Internal(format!(
                    "slot {slot} does not join its endpoints"
                )));
            }
            paths.push(if self.orientation.swapped[slot] {
                path.reversed()
            } else {
                path
            });
        }
        let multi = MultiPath::new(paths)?;
        let total = multi.total_length(points);
        if (total - expected).abs() > points.length_slack() {
            return Err(Error::Internal(format!(
                "reconstructed length {total} differs from table value {expected}"
            )));
        }
        debug_assert!(multi
            .paths()
            .iter()
            .zip(&self.pairs)
            .all(|(p, &(s, t))| p.source() == s && p.sink() == t));
        Ok(multi)
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn window_accuracy(&self) -> f64 {
        self.accuracy
    }
}

pub fn solve_mktsp(
    points: &PointSet,
    pairs: &[(usize, usize)],
    k: usize,
    config: &MktspConfig,
) -> Result<MktspSolution> {
    solve_mktsp_with(&ExactWindowSolver::default(), points, pairs, k, config)
}

pub fn solve_mktsp_with<O: WindowOracle + ?Sized>(
    oracle: &O,
    points: &PointSet,
    pairs: &[(usize, usize)],
    k: usize,
    config: &MktspConfig,
) -> Result<MktspSolution> {
    let n = points.len();
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Infeasible(format!(
            "cannot visit {k} points out of {n}"
        )));
    }
    // Visiting more points than requested never helps once every terminal
    // is in: the optimum visits exactly max(k, #terminals) points.
    let mut terminals: Vec<usize> = pairs.iter().flat_map(|&(s, t)| [s, t]).collect();
    terminals.sort_unstable();
    terminals.dedup();
    let target = k.max(terminals.len());
    let sweep = MktspSweep::build(oracle, points, pairs, target, f64::INFINITY, config)?;
    if sweep.exact(target).is_none() {
        return Err(Error::Infeasible(format!(
            "no path system visits {k} points"
        )));
    }
    let paths = sweep.reconstruct(oracle, points, target)?;
    Ok(MktspSolution {
        length: paths.total_length(points),
        visited: paths.visited_count(),
        paths,
        window_accuracy: sweep.window_accuracy(),
        orientation: sweep.orientation.clone(),
    })
}
