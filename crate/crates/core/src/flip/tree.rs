//! Exact geometry of one piece's base tree.
//!
//! Vertices of the scaled tree are addressed by reduced walks from the base
//! vertex; boundary-line elevations are bi-infinite periodic walks. All
//! positions and distances here are exact rationals.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::flip::spec::PieceSpec;
use crate::num::{rat_int, Rat};
use crate::spine::{concat_reduce, invert_walk, reduce_walk, tree_steps, Step, Walk};

/// A position in the scaled base tree: a vertex or an interior edge point.
///
/// Edge points are canonical: `from . step` is a reduced extension (the
/// endpoint closer to the root is the anchor) and 0 < offset < edge length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasePos {
    Vertex(Walk),
    Edge { from: Walk, step: Step, offset: Rat },
}

impl BasePos {
    pub fn root() -> Self {
        BasePos::Vertex(Vec::new())
    }

    /// Builds a canonical position `offset` along `step` out of `from`.
    pub fn edge_point(piece: &PieceSpec, from: Walk, step: Step, offset: Rat) -> Self {
        let scale = piece.base_scale.clone();
        debug_assert!(offset >= rat_int(0) && offset <= scale);
        let from = reduce_walk(&from);
        if offset == rat_int(0) {
            return BasePos::Vertex(from);
        }
        let other = concat_reduce(&from, &[step]);
        if offset == scale {
            return BasePos::Vertex(other);
        }
        if other.len() > from.len() {
            BasePos::Edge { from, step, offset }
        } else {
            BasePos::Edge {
                from: other,
                step: step.inverse(),
                offset: scale - offset,
            }
        }
    }

    /// The nearest vertex anchors with their rational distances to `self`.
    fn anchors(&self, piece: &PieceSpec) -> Vec<(Walk, Rat)> {
        match self {
            BasePos::Vertex(v) => vec![(v.clone(), rat_int(0))],
            BasePos::Edge { from, step, offset } => vec![
                (from.clone(), offset.clone()),
                (
                    concat_reduce(from, &[*step]),
                    piece.base_scale.clone() - offset.clone(),
                ),
            ],
        }
    }

    /// Spine vertex under this position (for edge points: the anchor's).
    pub fn spine_vertex(&self, piece: &PieceSpec) -> usize {
        match self {
            BasePos::Vertex(v) => piece.spine.walk_end(0, v).expect("valid address"),
            BasePos::Edge { from, .. } => piece.spine.walk_end(0, from).expect("valid address"),
        }
    }
}

/// Exact path metric of the scaled base tree.
pub fn base_dist(piece: &PieceSpec, p: &BasePos, q: &BasePos) -> Rat {
    if p == q {
        return rat_int(0);
    }
    if let (
        BasePos::Edge {
            from: f1,
            step: s1,
            offset: o1,
        },
        BasePos::Edge {
            from: f2,
            step: s2,
            offset: o2,
        },
    ) = (p, q)
    {
        if f1 == f2 && s1 == s2 {
            return (o1.clone() - o2.clone()).abs();
        }
    }
    let scale = &piece.base_scale;
    let mut best: Option<Rat> = None;
    for (va, da) in p.anchors(piece) {
        for (vb, db) in q.anchors(piece) {
            let mid = scale.clone() * rat_int(tree_steps(&va, &vb) as i64);
            let total = da.clone() + mid + db;
            if best.as_ref().map_or(true, |b| &total < b) {
                best = Some(total);
            }
        }
    }
    best.unwrap()
}

/// Deck translation of a position by a loop at the base vertex.
pub fn translate_pos(piece: &PieceSpec, loop_walk: &Walk, pos: &BasePos) -> BasePos {
    match pos {
        BasePos::Vertex(v) => BasePos::Vertex(concat_reduce(loop_walk, v)),
        BasePos::Edge { from, step, offset } => BasePos::edge_point(
            piece,
            concat_reduce(loop_walk, from),
            *step,
            offset.clone(),
        ),
    }
}

/// One boundary-line elevation in a piece's base tree: the bi-infinite
/// periodic walk `base . cycle^inf`, with arclength measured from the base
/// vertex in the cycle direction.
pub struct WallLine<'a> {
    piece: &'a PieceSpec,
    cycle: Walk,
    cycle_inv: Walk,
    fwd: Vec<Walk>,
    bwd: Vec<Walk>,
}

impl<'a> WallLine<'a> {
    /// Line of the coset `rep <cycle loop>`; `rep` is a loop at the base
    /// vertex (use the canonical representative for wall identity).
    pub fn new(piece: &'a PieceSpec, cycle_id: usize, rep: &Walk) -> Self {
        let data = &piece.cycles[cycle_id];
        let base = concat_reduce(rep, &data.conn);
        WallLine {
            piece,
            cycle: data.walk.clone(),
            cycle_inv: invert_walk(&data.walk),
            fwd: vec![base.clone()],
            bwd: vec![base],
        }
    }

    pub fn scale(&self) -> &Rat {
        &self.piece.base_scale
    }

    pub fn period_steps(&self) -> usize {
        self.cycle.len()
    }

    /// Address of the k-th line vertex (k may be negative).
    pub fn vertex(&mut self, k: i64) -> Walk {
        if k >= 0 {
            let k = k as usize;
            while self.fwd.len() <= k {
                let i = self.fwd.len() - 1;
                let step = self.cycle[i % self.cycle.len()];
                let next = concat_reduce(&self.fwd[i], &[step]);
                self.fwd.push(next);
            }
            self.fwd[k].clone()
        } else {
            let k = (-k) as usize;
            while self.bwd.len() <= k {
                let i = self.bwd.len() - 1;
                let step = self.cycle_inv[i % self.cycle_inv.len()];
                let next = concat_reduce(&self.bwd[i], &[step]);
                self.bwd.push(next);
            }
            self.bwd[k].clone()
        }
    }

    /// Step from line vertex k to line vertex k + 1.
    fn step_at(&self, k: i64) -> Step {
        let n = self.cycle.len() as i64;
        let idx = ((k % n) + n) % n;
        self.cycle[idx as usize]
    }

    /// Index of `v` on the line, if it lies on it.
    pub fn vertex_index(&mut self, v: &Walk) -> Option<i64> {
        let d = tree_steps(&self.vertex(0), v) as i64;
        if d == 0 {
            return Some(0);
        }
        if self.vertex(d) == *v {
            return Some(d);
        }
        if self.vertex(-d) == *v {
            return Some(-d);
        }
        None
    }

    /// Arclength of a position on the line, if the position lies on it.
    pub fn locate(&mut self, pos: &BasePos) -> Option<Rat> {
        let scale = self.scale().clone();
        match pos {
            BasePos::Vertex(v) => self
                .vertex_index(v)
                .map(|k| scale * rat_int(k)),
            BasePos::Edge { from, step, offset } => {
                let k = self.vertex_index(from)?;
                let other = concat_reduce(from, &[*step]);
                if self.vertex(k + 1) == other {
                    Some(scale * rat_int(k) + offset.clone())
                } else if self.vertex(k - 1) == other {
                    Some(scale * rat_int(k) - offset.clone())
                } else {
                    None
                }
            }
        }
    }

    /// Position at a given arclength.
    pub fn point_at(&mut self, arc: &Rat) -> BasePos {
        let scale = self.scale().clone();
        let k = (arc / &scale).floor();
        let k_int: i64 = num_traits::ToPrimitive::to_i64(&k.to_integer()).expect("desk scale arc");
        let off = arc.clone() - scale * rat_int(k_int);
        if off == rat_int(0) {
            BasePos::Vertex(self.vertex(k_int))
        } else {
            let from = self.vertex(k_int);
            BasePos::edge_point(self.piece, from, self.step_at(k_int), off)
        }
    }

    /// Nearest line vertex to an arbitrary tree vertex: (index, step count).
    pub fn project_vertex(&mut self, v: &Walk) -> (i64, usize) {
        let d0 = tree_steps(&self.vertex(0), v);
        let mut k = 0i64;
        let mut d = d0;
        loop {
            let du = tree_steps(&self.vertex(k + 1), v);
            let dd = tree_steps(&self.vertex(k - 1), v);
            if du < d {
                k += 1;
                d = du;
            } else if dd < d {
                k -= 1;
                d = dd;
            } else {
                return (k, d);
            }
        }
    }

    /// Nearest point of the line to `pos` with the exact distance.
    pub fn project(&mut self, pos: &BasePos) -> (BasePos, Rat) {
        if let Some(arc) = self.locate(pos) {
            let _ = arc;
            return (pos.clone(), rat_int(0));
        }
        let scale = self.scale().clone();
        match pos {
            BasePos::Vertex(v) => {
                let (k, d) = self.project_vertex(v);
                (
                    BasePos::Vertex(self.vertex(k)),
                    scale * rat_int(d as i64),
                )
            }
            BasePos::Edge { from, step, offset } => {
                let other = concat_reduce(from, &[*step]);
                let (ka, da) = self.project_vertex(from);
                let (kb, db) = self.project_vertex(&other);
                let cost_a = offset.clone() + scale.clone() * rat_int(da as i64);
                let cost_b =
                    (scale.clone() - offset.clone()) + scale.clone() * rat_int(db as i64);
                if cost_a <= cost_b {
                    (BasePos::Vertex(self.vertex(ka)), cost_a)
                } else {
                    (BasePos::Vertex(self.vertex(kb)), cost_b)
                }
            }
        }
    }
}

/// Relative position of two boundary lines in a common base tree.
#[derive(Clone, Debug)]
pub enum LineRelation {
    /// Disjoint lines with the unique shortest bridge between them.
    Disjoint {
        foot_a: i64,
        foot_b: i64,
        /// Scaled distance between the feet.
        dist: Rat,
    },
    /// Lines meeting in exactly one vertex.
    Touch { idx_a: i64, idx_b: i64 },
    /// Lines sharing a segment: inclusive vertex-index ranges on each line.
    Overlap {
        a_range: (i64, i64),
        b_range: (i64, i64),
    },
}

/// Computes how two lines of one chart sit relative to each other.
pub fn line_relation(a: &mut WallLine, b: &mut WallLine) -> Result<LineRelation> {
    let origin_a = a.vertex(0);
    let (kb, _) = b.project_vertex(&origin_a);
    let q = b.vertex(kb);
    let (ka, d) = a.project_vertex(&q);
    if d > 0 {
        // Re-project to land exactly on the bridge feet.
        let p = a.vertex(ka);
        let (kb2, d2) = b.project_vertex(&p);
        let dist = a.scale().clone() * rat_int(d2 as i64);
        return Ok(LineRelation::Disjoint {
            foot_a: ka,
            foot_b: kb2,
            dist,
        });
    }
    // Shared vertex: a.vertex(ka) == b.vertex(kb'): measure the overlap.
    let kb = b.vertex_index(&a.vertex(ka)).ok_or_else(|| {
        Error::Inconsistency("projection landed off the line".into())
    })?;
    let cap = 4 * (a.period_steps() + b.period_steps()) as i64 + 64;
    let mut hi = 0i64;
    while hi < cap && b.vertex_index(&a.vertex(ka + hi + 1)).is_some() {
        hi += 1;
    }
    let mut lo = 0i64;
    while lo < cap && b.vertex_index(&a.vertex(ka - lo - 1)).is_some() {
        lo += 1;
    }
    if hi >= cap || lo >= cap {
        return Err(Error::Inconsistency(
            "boundary lines overlap beyond the safety cap; cycles are not in general position"
                .into(),
        ));
    }
    if hi == 0 && lo == 0 {
        return Ok(LineRelation::Touch { idx_a: ka, idx_b: kb });
    }
    let a_lo = ka - lo;
    let a_hi = ka + hi;
    let b_lo = b
        .vertex_index(&a.vertex(a_lo))
        .expect("overlap endpoint on both lines");
    let b_hi = b
        .vertex_index(&a.vertex(a_hi))
        .expect("overlap endpoint on both lines");
    Ok(LineRelation::Overlap {
        a_range: (a_lo, a_hi),
        b_range: (b_lo.min(b_hi), b_lo.max(b_hi)),
    })
}

/// Unique shortest bridge between two disjoint lines.
///
/// Raises an internal-consistency error when the lines meet; enumerating
/// callers treat that as a tangency of wall elevations and skip the pair.
pub fn line_bridge(a: &mut WallLine, b: &mut WallLine) -> Result<(BasePos, BasePos, Rat)> {
    match line_relation(a, b)? {
        LineRelation::Disjoint {
            foot_a,
            foot_b,
            dist,
        } => Ok((
            BasePos::Vertex(a.vertex(foot_a)),
            BasePos::Vertex(b.vertex(foot_b)),
            dist,
        )),
        _ => Err(Error::Inconsistency(
            "lines intersect; no positive bridge exists".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::spec::two_piece_reference;
    use crate::num::rat_frac;
    use crate::spine::power_walk;

    fn walk(piece: &PieceSpec, s: &str) -> Walk {
        if s == "1" {
            return Vec::new();
        }
        let toks: Vec<String> = s.split_whitespace().map(|t| t.to_string()).collect();
        piece.spine.parse_walk(&toks).unwrap()
    }

    #[test]
    fn tree_metric_basics() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let u = BasePos::Vertex(walk(p, "a b"));
        let v = BasePos::Vertex(walk(p, "b^-1"));
        assert_eq!(base_dist(p, &u, &u), rat_int(0));
        // |(ab)^{-1} b^{-1}| = |b^-1 a^-1 b^-1| = 3 edges, each of length 1/4.
        assert_eq!(base_dist(p, &u, &v), rat_frac(3, 4));
        // Adjacent vertices sit one scaled edge apart.
        let w = BasePos::Vertex(walk(p, "a"));
        assert_eq!(
            base_dist(p, &BasePos::root(), &w),
            rat_frac(1, 4)
        );
    }

    #[test]
    fn metric_axioms_on_sampled_triples() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let verts: Vec<BasePos> = ["1", "a", "b", "a b", "a b^-1", "b a", "a b a", "b^-1 a^-1"]
            .iter()
            .map(|s| BasePos::Vertex(walk(p, s)))
            .collect();
        for x in &verts {
            for y in &verts {
                let dxy = base_dist(p, x, y);
                assert_eq!(dxy, base_dist(p, y, x));
                assert_eq!(dxy == rat_int(0), x == y);
                for z in &verts {
                    let dxz = base_dist(p, x, z);
                    let dzy = base_dist(p, z, y);
                    assert!(dxy <= dxz + dzy);
                }
            }
        }
    }

    #[test]
    fn edge_points_are_canonical() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let step_a = p.spine.parse_step("a").unwrap();
        // The anchor is always the endpoint nearer the root.
        let pos = BasePos::edge_point(p, Vec::new(), step_a.inverse(), rat_frac(1, 8));
        match &pos {
            BasePos::Edge { from, step, offset } => {
                assert!(from.is_empty());
                assert_eq!(*step, step_a.inverse());
                assert_eq!(offset, &rat_frac(1, 8));
            }
            other => panic!("expected edge point, got {other:?}"),
        }
        // The same point described from the far endpoint canonicalises back.
        let q = BasePos::edge_point(p, walk(p, "a^-1"), step_a, rat_frac(1, 8));
        assert_eq!(pos, q);
    }

    #[test]
    fn line_projection_exactness() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        // Line of the commutator through the root.
        let mut line = WallLine::new(p, 0, &Vec::new());
        assert_eq!(line.vertex(0), walk(p, "1"));
        assert_eq!(line.vertex(1), walk(p, "a"));
        assert_eq!(line.vertex(2), walk(p, "a b"));
        assert_eq!(line.vertex(4), walk(p, "a b a^-1 b^-1"));
        assert_eq!(line.vertex(-1), walk(p, "b"));

        // Projection fixes points of the line.
        let on = BasePos::Vertex(walk(p, "a b"));
        let (foot, d) = line.project(&on);
        assert_eq!(foot, on);
        assert_eq!(d, rat_int(0));

        // One edge off the line.
        let off = BasePos::Vertex(walk(p, "a a"));
        let (foot, d) = line.project(&off);
        assert_eq!(foot, BasePos::Vertex(walk(p, "a")));
        assert_eq!(d, rat_frac(1, 4));

        // Exactness identity d(p, q) = d(p, foot) + d(foot, q) for q on the line.
        for k in -4..=4 {
            let q = BasePos::Vertex(line.vertex(k));
            let lhs = base_dist(p, &off, &q);
            let rhs = base_dist(p, &off, &foot) + base_dist(p, &foot, &q);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn locate_and_point_at_round_trip() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let mut line = WallLine::new(p, 0, &Vec::new());
        for k in [-5i64, -1, 0, 1, 7] {
            let arc = rat_frac(k, 4) + rat_frac(1, 16);
            let pos = line.point_at(&arc);
            assert_eq!(line.locate(&pos), Some(arc));
        }
        let v = line.point_at(&rat_frac(-3, 4));
        assert_eq!(v, BasePos::Vertex(line.vertex(-3)));
    }

    #[test]
    fn disjoint_lines_have_unique_bridge() {
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let c = &p.cycles[0].based_loop.clone();
        let mut l0 = WallLine::new(p, 0, &Vec::new());
        // Coset of a^2: its line stays distance > 0 from the trivial line.
        let rep = walk(p, "a a");
        let mut l1 = WallLine::new(p, 0, &rep);
        match line_relation(&mut l0, &mut l1).unwrap() {
            LineRelation::Disjoint { dist, .. } => {
                assert!(dist > rat_int(0));
            }
            other => panic!("expected disjoint, got {other:?}"),
        }
        // Deck-translating both lines by c keeps the bridge length.
        let repc = concat_reduce(&power_walk(c, 1), &rep);
        let mut l0c = WallLine::new(p, 0, &power_walk(c, 1));
        let mut l1c = WallLine::new(p, 0, &repc);
        let (_, _, d1) = line_bridge(&mut l0, &mut l1).unwrap();
        let (_, _, d2) = line_bridge(&mut l0c, &mut l1c).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn commutator_cosets_can_overlap() {
        // The elevations along cosets <c> and a<c> share the edge (a, ab):
        // a model tangency that enumerating callers skip.
        let spec = two_piece_reference();
        let p = spec.piece(0);
        let mut l0 = WallLine::new(p, 0, &Vec::new());
        let mut l1 = WallLine::new(p, 0, &walk(p, "a"));
        match line_relation(&mut l0, &mut l1).unwrap() {
            LineRelation::Overlap { a_range, .. } => {
                assert_eq!(a_range, (1, 2));
            }
            other => panic!("expected overlap, got {other:?}"),
        }
        assert!(line_bridge(&mut l0, &mut l1).is_err());
    }
}
