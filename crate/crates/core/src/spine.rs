//! Spine graphs and reduced edge walks.
//!
//! A piece's base surface is modelled through a finite spine graph. Positions
//! in the universal cover are addressed by reduced edge walks from a fixed
//! base vertex, so all metric computations reduce to word combinatorics here.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// One signed traversal of a spine edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Step {
    pub edge: u32,
    pub rev: bool,
}

impl Step {
    pub fn fwd(edge: u32) -> Self {
        Step { edge, rev: false }
    }

    pub fn inverse(self) -> Self {
        Step {
            edge: self.edge,
            rev: !self.rev,
        }
    }
}

pub type Walk = Vec<Step>;

/// Finite connected graph with labelled edges (loops and multi-edges allowed).
#[derive(Clone, Debug)]
pub struct SpineGraph {
    pub vertex_count: usize,
    /// (src, dst) per edge; traversing `rev` swaps the roles.
    pub edges: Vec<(usize, usize)>,
    pub labels: Vec<String>,
}

impl SpineGraph {
    pub fn step_src(&self, s: Step) -> usize {
        let (a, b) = self.edges[s.edge as usize];
        if s.rev {
            b
        } else {
            a
        }
    }

    pub fn step_dst(&self, s: Step) -> usize {
        let (a, b) = self.edges[s.edge as usize];
        if s.rev {
            a
        } else {
            b
        }
    }

    /// Endpoint of a walk starting at `start`, or None if steps do not chain.
    pub fn walk_end(&self, start: usize, walk: &[Step]) -> Option<usize> {
        let mut at = start;
        for &s in walk {
            if self.step_src(s) != at {
                return None;
            }
            at = self.step_dst(s);
        }
        Some(at)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (e, &(a, b)) in self.edges.iter().enumerate() {
                let _ = e;
                if a == v && !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
                if b == v && !seen[a] {
                    seen[a] = true;
                    queue.push_back(a);
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// First Betti number E - V + 1 of a connected graph.
    pub fn betti(&self) -> isize {
        self.edges.len() as isize - self.vertex_count as isize + 1
    }

    /// Shortest walk between two vertices; ties broken lexicographically so
    /// the result is deterministic.
    pub fn shortest_path(&self, from: usize, to: usize) -> Walk {
        if from == to {
            return Vec::new();
        }
        let mut best: Vec<Option<(usize, Step)>> = vec![None; self.vertex_count];
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[from] = 0;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            let mut out: Vec<Step> = Vec::new();
            for e in 0..self.edges.len() {
                for rev in [false, true] {
                    let s = Step { edge: e as u32, rev };
                    if self.step_src(s) == v {
                        out.push(s);
                    }
                }
            }
            out.sort();
            for s in out {
                let w = self.step_dst(s);
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    best[w] = Some((v, s));
                    queue.push_back(w);
                }
            }
        }
        let mut path = Vec::new();
        let mut at = to;
        while at != from {
            let (prev, s) = best[at].expect("graph connected");
            path.push(s);
            at = prev;
        }
        path.reverse();
        path
    }

    pub fn label_of(&self, s: Step) -> String {
        if s.rev {
            format!("{}^-1", self.labels[s.edge as usize])
        } else {
            self.labels[s.edge as usize].clone()
        }
    }

    pub fn parse_step(&self, token: &str) -> Result<Step> {
        let (name, rev) = match token.strip_suffix("^-1") {
            Some(base) => (base, true),
            None => (token, false),
        };
        let edge = self
            .labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::Parse(format!("unknown edge label {token:?}")))?;
        Ok(Step {
            edge: edge as u32,
            rev,
        })
    }

    pub fn parse_walk(&self, tokens: &[String]) -> Result<Walk> {
        tokens.iter().map(|t| self.parse_step(t)).collect()
    }

    pub fn display_walk(&self, walk: &[Step]) -> String {
        if walk.is_empty() {
            return "1".to_string();
        }
        walk.iter()
            .map(|&s| self.label_of(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// All reduced walks from `base` back to `base` of length <= `max_len`,
    /// including the empty walk. Deterministic order.
    pub fn closed_walks(&self, base: usize, max_len: usize) -> Vec<Walk> {
        let mut out = vec![Vec::new()];
        let mut frontier: Vec<Walk> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                let at = self.walk_end(base, w).unwrap();
                for e in 0..self.edges.len() {
                    for rev in [false, true] {
                        let s = Step { edge: e as u32, rev };
                        if self.step_src(s) != at {
                            continue;
                        }
                        if w.last() == Some(&s.inverse()) {
                            continue;
                        }
                        let mut w2 = w.clone();
                        w2.push(s);
                        if self.step_dst(s) == base {
                            out.push(w2.clone());
                        }
                        next.push(w2);
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// Removes backtracks `s s^{-1}`; preserves the homotopy class rel endpoints.
pub fn reduce_walk(walk: &[Step]) -> Walk {
    let mut out: Walk = Vec::with_capacity(walk.len());
    for &s in walk {
        if out.last() == Some(&s.inverse()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

pub fn is_reduced(walk: &[Step]) -> bool {
    walk.windows(2).all(|w| w[1] != w[0].inverse())
}

pub fn invert_walk(walk: &[Step]) -> Walk {
    walk.iter().rev().map(|s| s.inverse()).collect()
}

pub fn concat_reduce(a: &[Step], b: &[Step]) -> Walk {
    let mut out = a.to_vec();
    for &s in b {
        if out.last() == Some(&s.inverse()) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Longest common prefix length of two reduced walks.
pub fn lcp_len(a: &[Step], b: &[Step]) -> usize {
    a.iter().zip(b.iter()).take_while(|(x, y)| x == y).count()
}

/// Combinatorial tree distance between two reduced addresses.
pub fn tree_steps(a: &[Step], b: &[Step]) -> usize {
    let l = lcp_len(a, b);
    a.len() + b.len() - 2 * l
}

/// Shortlex order: length first, then component-wise step order.
pub fn shortlex_cmp(a: &[Step], b: &[Step]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn is_cyclically_reduced(walk: &[Step]) -> bool {
    if walk.is_empty() {
        return true;
    }
    is_reduced(walk) && walk[0] != walk[walk.len() - 1].inverse()
}

/// Cyclic reduction of a closed walk: returns (core, conjugator) with
/// walk = conjugator . core . conjugator^{ -1 } after reduction.
pub fn cyclic_reduce(walk: &[Step]) -> (Walk, Walk) {
    let mut core = reduce_walk(walk);
    let mut conj = Vec::new();
    while core.len() >= 2 && core[0] == core[core.len() - 1].inverse() {
        conj.push(core[0]);
        core.pop();
        core.remove(0);
    }
    (core, conj)
}

/// Whether a cyclically reduced walk is a proper power as a cyclic word.
pub fn is_proper_power_cyclic(walk: &[Step]) -> bool {
    let n = walk.len();
    if n < 2 {
        return false;
    }
    for d in 1..n {
        if n % d != 0 {
            continue;
        }
        if (0..n).all(|i| walk[i] == walk[(i + d) % n]) {
            return true;
        }
    }
    false
}

/// Reduced form of gamma^m (m may be negative).
pub fn power_walk(gamma: &[Step], m: i64) -> Walk {
    let base: Walk = if m >= 0 {
        gamma.to_vec()
    } else {
        invert_walk(gamma)
    };
    let mut out = Vec::new();
    for _ in 0..m.unsigned_abs() {
        out = concat_reduce(&out, &base);
    }
    out
}

/// Solves w = gamma^m exactly, if possible.
pub fn power_of(gamma: &[Step], w: &[Step]) -> Option<i64> {
    let g = reduce_walk(gamma);
    let w = reduce_walk(w);
    if w.is_empty() {
        return Some(0);
    }
    if g.is_empty() {
        return None;
    }
    let (core, _) = cyclic_reduce(&g);
    let step = core.len().max(1);
    let bound = (w.len() / step + 2) as i64;
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for m in 1..=bound {
        pos = concat_reduce(&pos, &g);
        if pos == w {
            return Some(m);
        }
        neg = concat_reduce(&neg, &invert_walk(&g));
        if neg == w {
            return Some(-m);
        }
    }
    None
}

/// Canonical representative of the coset u<gamma>: the shortlex-least element
/// among u gamma^m. Returns (rep, m) with u = rep . gamma^m.
pub fn coset_split(u: &[Step], gamma: &[Step]) -> (Walk, i64) {
    let g = reduce_walk(gamma);
    let u = reduce_walk(u);
    assert!(!g.is_empty(), "coset of a trivial loop");
    let ginv = invert_walk(&g);
    let eval = |m: i64| -> Walk {
        // u . gamma^m computed incrementally by the caller loop below in
        // practice; direct form is fine at the word lengths we use.
        concat_reduce(&u, &power_walk(&g, m))
    };
    // March toward the minimum of m -> |u gamma^m| (unimodal with a plateau
    // of bounded width), then take the shortlex-least over the plateau.
    let mut m = 0i64;
    let mut cur = u.clone();
    loop {
        let up = concat_reduce(&cur, &g);
        let down = concat_reduce(&cur, &ginv);
        if up.len() < cur.len() {
            cur = up;
            m += 1;
        } else if down.len() < cur.len() {
            cur = down;
            m -= 1;
        } else {
            break;
        }
    }
    // Scan the plateau around m for ties.
    let min_len = cur.len();
    let mut best = (cur, m);
    for dm in 1..=2i64 {
        for cand_m in [m - dm, m + dm] {
            let w = eval(cand_m);
            if w.len() == min_len && shortlex_cmp(&w, &best.0).is_lt() {
                best = (w, cand_m);
            }
        }
    }
    // u = rep . gamma^{-m_found}? We have rep = u gamma^{m*}, so
    // u = rep gamma^{-m*}.
    let (rep, m_star) = best;
    (rep, -m_star)
}
