//! Topology-only seed selection heuristics.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

pub const DEFAULT_SIMULATIONS: usize = 200;

fn check_k(g: &Graph, k: usize) -> Result<()> {
    if k > g.node_count() {
        return Err(Error::Validation(format!(
            "k = {k} exceeds {} nodes",
            g.node_count()
        )));
    }
    Ok(())
}

/// `k` nodes of largest weighted degree, lowest id on ties. Ascending.
pub fn baseline_degree(g: &Graph, k: usize) -> Result<Vec<usize>> {
    check_k(g, k)?;
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&u, &v| {
        g.weighted_degree(v)
            .total_cmp(&g.weighted_degree(u))
            .then(u.cmp(&v))
    });
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

/// Uniform `k`-subset. Ascending.
pub fn baseline_random(g: &Graph, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(g, k)?;
    let mut rng = seed::rng(seed);
    let mut set = index::sample(&mut rng, g.node_count(), k).into_vec();
    set.sort_unstable();
    Ok(set)
}

/// Independent-cascade worlds under the weighted cascade model: arc `u → v`
/// is live with probability `w_uv / wdeg(v)`. Liveness is a fixed function of
/// `(seed, world, u, v)`, so every spread estimate sees the same worlds and
/// the estimated spread is submodular.
pub struct CascadeWorlds<'g> {
    graph: &'g Graph,
    seed: u64,
    worlds: usize,
    wdeg: Vec<f64>,
}

impl<'g> CascadeWorlds<'g> {
    pub fn new(graph: &'g Graph, worlds: usize, seed: u64) -> Self {
        let wdeg = (0..graph.node_count())
            .map(|u| graph.weighted_degree(u))
            .collect();
        Self {
            graph,
            seed,
            worlds,
            wdeg,
        }
    }

    pub fn world_count(&self) -> usize {
        self.worlds
    }

    fn live(&self, world: usize, u: usize, v: usize, w: f64) -> bool {
        seed::hash_unit(self.seed, world as u64, u as u64, v as u64) < w / self.wdeg[v]
    }

    /// Nodes reached from `source` in `world` that are not yet `active`.
    /// `mark` is scratch space of length n, all false on entry and exit.
    fn reach(
        &self,
        world: usize,
        source: usize,
        active: &[bool],
        out: &mut Vec<usize>,
        mark: &mut [bool],
    ) {
        out.clear();
        if active[source] {
            return;
        }
        mark[source] = true;
        out.push(source);
        let mut head = 0;
        while head < out.len() {
            let u = out[head];
            head += 1;
            for (v, w) in self.graph.neighbors(u) {
                if !active[v] && !mark[v] && self.live(world, u, v, w) {
                    mark[v] = true;
                    out.push(v);
                }
            }
        }
        for &v in out.iter() {
            mark[v] = false;
        }
    }

    /// Total number of activated nodes over all worlds when seeding `set`.
    pub fn total_spread(&self, set: &[usize]) -> u64 {
        let n = self.graph.node_count();
        (0..self.worlds)
            .into_par_iter()
            .map(|world| {
                let mut active = vec![false; n];
                let mut buf = Vec::new();
                let mut mark = vec![false; n];
                let mut count = 0;
                for &s in set {
                    self.reach(world, s, &active, &mut buf, &mut mark);
                    for &v in &buf {
                        active[v] = true;
                    }
                    count += buf.len() as u64;
                }
                count
            })
            .sum()
    }

    /// Mean number of activated nodes when seeding `set`.
    pub fn expected_spread(&self, set: &[usize]) -> f64 {
        self.total_spread(set) as f64 / self.worlds as f64
    }
}

/// Greedy spread maximization with lazy re-evaluation. Ascending.
pub fn baseline_influence_max(
    g: &Graph,
    k: usize,
    seed: u64,
    simulations: usize,
) -> Result<Vec<usize>> {
    check_k(g, k)?;
    if simulations == 0 {
        return Err(Error::Validation(
            "at least one simulation is required".into(),
        ));
    }
    let n = g.node_count();
    if k == n {
        return Ok((0..n).collect());
    }
    let worlds = CascadeWorlds::new(g, simulations, seed);
    let mut active = vec![vec![false; n]; simulations];
    let gain_of = |u: usize, active: &[Vec<bool>]| -> u64 {
        let mut buf = Vec::new();
        let mut mark = vec![false; n];
        (0..simulations)
            .map(|w| {
                worlds.reach(w, u, &active[w], &mut buf, &mut mark);
                buf.len() as u64
            })
            .sum()
    };

    let initial: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|u| gain_of(u, &active))
        .collect();
    let mut heap: BinaryHeap<(u64, Reverse<usize>, usize)> = initial
        .into_iter()
        .enumerate()
        .map(|(u, c)| (c, Reverse(u), 0))
        .collect();
    let mut chosen = Vec::with_capacity(k);
    while chosen.len() < k {
        let (count, Reverse(u), round) = heap.pop().expect("candidates remain while k < n");
        if round == chosen.len() {
            chosen.push(u);
            let mut buf = Vec::new();
            let mut mark = vec![false; n];
            for (w, act) in active.iter_mut().enumerate() {
                worlds.reach(w, u, act, &mut buf, &mut mark);
                for &v in &buf {
                    act[v] = true;
                }
            }
        } else {
            let fresh = gain_of(u, &active);
            debug_assert!(fresh <= count);
            heap.push((fresh, Reverse(u), chosen.len()));
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}
