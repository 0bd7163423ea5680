//! Special paths: piecewise geodesics routed through wall crossings.
//!
//! Between pieces, the path enters each wall at the intersection of the two
//! fiber-direction coordinate lines through the adjacent feet: the exit foot
//! (nearest line point, or bridge foot) on one side and the entry foot on
//! the other. Within a piece the path is a product-metric geodesic.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::flip::model::{CopyAddress, Crossing, Model, PointCoord};
use crate::flip::tree::{base_dist, line_relation, BasePos, LineRelation};
use crate::num::{hypot_rat, rat_int, rat_to_f64, Rat};

/// A wall passage: the same geometric point in the chart before and after.
#[derive(Clone, Debug, PartialEq)]
pub struct WallPoint {
    pub before: PointCoord,
    pub after: PointCoord,
}

/// Shortest connector between the entry and exit lines of one piece.
#[derive(Clone, Debug)]
pub struct Bridge {
    pub chart: CopyAddress,
    pub entry_foot: BasePos,
    pub exit_foot: BasePos,
    pub gap: Rat,
}

#[derive(Clone, Debug)]
pub struct SpecialPath {
    pub start: PointCoord,
    pub end: PointCoord,
    pub walls: Vec<WallPoint>,
    pub bridges: Vec<Bridge>,
    /// Same-chart endpoint pairs, one per piece the path visits.
    pub segments: Vec<(PointCoord, PointCoord)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Metric {
    L1,
    L2,
}

impl SpecialPath {
    /// Breakpoints x_0 .. x_{n+1}, wall points anchored on the chart they
    /// are entered from.
    pub fn breakpoints(&self) -> Vec<PointCoord> {
        let mut out = vec![self.start.clone()];
        out.extend(self.walls.iter().map(|w| w.before.clone()));
        out.push(self.end.clone());
        out
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn length_l1(&self, model: &Model) -> Rat {
        let mut total = rat_int(0);
        for (a, b) in &self.segments {
            let piece = model.piece_of_addr(&a.addr).expect("segment chart valid");
            total = total + model.chart_dist_l1(piece, a, b);
        }
        total
    }

    pub fn length_l2(&self, model: &Model) -> f64 {
        self.segments
            .iter()
            .map(|(a, b)| {
                let piece = model.piece_of_addr(&a.addr).expect("segment chart valid");
                model.chart_dist_l2(piece, a, b)
            })
            .sum()
    }

    pub fn length(&self, model: &Model, metric: Metric) -> f64 {
        match metric {
            Metric::L1 => rat_to_f64(&self.length_l1(model)),
            Metric::L2 => self.length_l2(model),
        }
    }
}

/// Chart sequence along the dual geodesic from x's chart to y's chart.
pub fn chain_charts(
    model: &Model,
    x: &PointCoord,
    y: &PointCoord,
) -> (Vec<CopyAddress>, Vec<(CopyAddress, Crossing)>) {
    let chain = model.geodesic_crossings(&x.addr, &y.addr);
    let mut charts = vec![x.addr.clone()];
    for (chart, crossing) in &chain {
        debug_assert_eq!(chart, charts.last().unwrap());
        charts.push(model.neighbor_addr(chart, crossing));
    }
    debug_assert_eq!(charts.last().unwrap(), &y.addr);
    (charts, chain)
}

/// Connector feet between the entry and exit lines of an interior chart.
/// Touching or overlapping elevations degenerate to a shared point (the
/// overlap midpoint, which keeps the construction reversal-symmetric).
fn connector_feet(
    model: &Model,
    entry: &crate::flip::model::WallId,
    exit: &crate::flip::model::WallId,
) -> Result<(BasePos, BasePos, Rat)> {
    let mut lin = model.line_of_wall(entry)?;
    let mut lout = model.line_of_wall(exit)?;
    match line_relation(&mut lin, &mut lout)? {
        LineRelation::Disjoint {
            foot_a,
            foot_b,
            dist,
        } => Ok((
            BasePos::Vertex(lin.vertex(foot_a)),
            BasePos::Vertex(lout.vertex(foot_b)),
            dist,
        )),
        LineRelation::Touch { idx_a, .. } => {
            let p = BasePos::Vertex(lin.vertex(idx_a));
            Ok((p.clone(), p, rat_int(0)))
        }
        LineRelation::Overlap { a_range, .. } => {
            let scale = lin.scale().clone();
            let mid = (rat_int(a_range.0) + rat_int(a_range.1)) * scale / rat_int(2);
            let p = lin.point_at(&mid);
            Ok((p.clone(), p, rat_int(0)))
        }
    }
}

/// Builds the special path from x to y.
pub fn special_path(model: &Model, x: &PointCoord, y: &PointCoord) -> Result<SpecialPath> {
    if x.addr == y.addr {
        return Ok(SpecialPath {
            start: x.clone(),
            end: y.clone(),
            walls: Vec::new(),
            bridges: Vec::new(),
            segments: vec![(x.clone(), y.clone())],
        });
    }
    let (charts, chain) = chain_charts(model, x, y);
    let n = chain.len();
    // Wall descriptions seen from each side.
    let mut here_walls = Vec::with_capacity(n);
    let mut there_walls = Vec::with_capacity(n);
    for (chart, crossing) in &chain {
        let (here, there, _) = model.wall_sides(chart, crossing)?;
        here_walls.push(here);
        there_walls.push(there);
    }
    // Exit feet per chart 0..n-1 and entry feet per chart 1..n.
    let mut exit_foot: Vec<Option<BasePos>> = vec![None; n];
    let mut entry_foot: Vec<Option<BasePos>> = vec![None; n + 1];
    let mut bridges = Vec::new();
    {
        let mut l0 = model.line_of_wall(&here_walls[0])?;
        let (foot, _) = l0.project(&x.pos);
        exit_foot[0] = Some(foot);
    }
    {
        let mut ln = model.line_of_wall(&there_walls[n - 1])?;
        let (foot, _) = ln.project(&y.pos);
        entry_foot[n] = Some(foot);
    }
    for i in 1..n {
        let (p, q, gap) = connector_feet(model, &there_walls[i - 1], &here_walls[i])?;
        bridges.push(Bridge {
            chart: charts[i].clone(),
            entry_foot: p.clone(),
            exit_foot: q.clone(),
            gap,
        });
        entry_foot[i] = Some(p);
        exit_foot[i] = Some(q);
    }
    // Wall points: fiber chosen so the flip lands on the far entry foot.
    let mut walls = Vec::with_capacity(n);
    for i in 0..n {
        let mut lout = model.line_of_wall(&here_walls[i])?;
        let exit = exit_foot[i].clone().expect("exit foot set");
        let s_exit = lout
            .locate(&exit)
            .ok_or_else(|| Error::Inconsistency("exit foot not on its line".into()))?;
        let _ = s_exit;
        let mut lin = model.line_of_wall(&there_walls[i])?;
        let entry = entry_foot[i + 1].clone().expect("entry foot set");
        let s_entry = lin
            .locate(&entry)
            .ok_or_else(|| Error::Inconsistency("entry foot not on its line".into()))?;
        let g = &model.spec.gluings[chain[i].1.gluing as usize];
        let fiber = if chain[i].1.forward {
            s_entry.clone() - g.offset_s.clone()
        } else {
            s_entry.clone() + g.offset_t.clone()
        };
        let before = PointCoord {
            addr: charts[i].clone(),
            pos: exit,
            fiber,
        };
        let after = model.cross_point(&before, &chain[i].1)?;
        debug_assert_eq!(after.pos, entry);
        walls.push(WallPoint { before, after });
    }
    let mut segments = Vec::with_capacity(n + 1);
    segments.push((x.clone(), walls[0].before.clone()));
    for i in 1..n {
        segments.push((walls[i - 1].after.clone(), walls[i].before.clone()));
    }
    segments.push((walls[n - 1].after.clone(), y.clone()));
    Ok(SpecialPath {
        start: x.clone(),
        end: y.clone(),
        walls,
        bridges,
        segments,
    })
}

/// Distance lower bound from the crossing structure: a path through k walls
/// spends at least the wall gap between consecutive crossings, plus the
/// base-distance from each endpoint to its first wall plane.
pub fn distance_lower_bound(model: &Model, gap: &Rat, x: &PointCoord, y: &PointCoord) -> f64 {
    if x.addr == y.addr {
        let piece = model.piece_of_addr(&x.addr).expect("valid chart");
        return model.chart_dist_l2(piece, x, y);
    }
    let (_, chain) = chain_charts(model, x, y);
    let k = chain.len() as i64;
    let lb_walls = rat_to_f64(gap) * (k - 1).max(0) as f64;
    let ends = (|| -> Result<f64> {
        let (here0, _, _) = model.wall_sides(&chain[0].0, &chain[0].1)?;
        let mut l0 = model.line_of_wall(&here0)?;
        let (_, dx) = l0.project(&x.pos);
        let (_, theren, _) = model.wall_sides(&chain[n_last(chain.len())].0, &chain[chain.len() - 1].1)?;
        let mut ln = model.line_of_wall(&theren)?;
        let (_, dy) = ln.project(&y.pos);
        Ok(rat_to_f64(&dx) + rat_to_f64(&dy))
    })()
    .unwrap_or(0.0);
    lb_walls.max(ends)
}

fn n_last(n: usize) -> usize {
    n - 1
}

/// Horizontal slide: replaces an on-wall via-point by the one over the
/// projection foot of x's base, keeping its fiber-line coordinate.
/// Returns the slid point and the L1 defect
/// (|x-w| + |w-z|) - (|x-y| + |y-z|), an exact rational.
pub fn horizontal_slide(
    model: &Model,
    x: &PointCoord,
    y: &PointCoord,
    z: &PointCoord,
) -> Result<(PointCoord, Rat)> {
    // The crossing from x's chart to z's chart; y must lie on that wall.
    let crossing: Crossing = if z.addr.len() == x.addr.len() + 1 && z.addr.starts_with(&x.addr) {
        z.addr.last().unwrap().clone()
    } else if x.addr.len() == z.addr.len() + 1 && x.addr.starts_with(&z.addr) {
        let last = x.addr.last().unwrap();
        Crossing {
            gluing: last.gluing,
            forward: !last.forward,
            coset: Vec::new(),
        }
    } else {
        return Err(Error::NotOnWall);
    };
    if y.addr != x.addr {
        return Err(Error::NotOnWall);
    }
    let (here, _, _) = model.wall_sides(&x.addr, &crossing)?;
    let mut line = model.line_of_wall(&here)?;
    if line.locate(&y.pos).is_none() {
        return Err(Error::NotOnWall);
    }
    let (foot, _) = line.project(&x.pos);
    let w = PointCoord {
        addr: x.addr.clone(),
        pos: foot,
        fiber: y.fiber.clone(),
    };
    let piece = model.piece_of_addr(&x.addr)?;
    let w_far = model.cross_point(&w, &crossing)?;
    let y_far = model.cross_point(y, &crossing)?;
    let far_piece = model.piece_of_addr(&z.addr)?;
    let new_len = model.chart_dist_l1(piece, x, &w) + model.chart_dist_l1(far_piece, &w_far, z);
    let old_len = model.chart_dist_l1(piece, x, y) + model.chart_dist_l1(far_piece, &y_far, z);
    Ok((w, new_len - old_len))
}

/// Exact distance from a point to a same-chart geodesic segment.
///
/// The base distance to the moving point is |s - s*| + h with s* the Gromov
/// product and h the distance to the base geodesic; the fiber interpolates
/// linearly in s. Both metrics are minimised in closed form per linear piece.
pub fn segment_point_dist(
    model: &Model,
    a: &PointCoord,
    b: &PointCoord,
    p: &PointCoord,
    metric: Metric,
) -> f64 {
    debug_assert_eq!(a.addr, b.addr);
    debug_assert_eq!(a.addr, p.addr);
    let piece = model
        .piece_of_addr(&a.addr)
        .expect("segment chart is valid");
    let spec = model.piece(piece);
    let blen = base_dist(spec, &a.pos, &b.pos);
    let dpa = base_dist(spec, &p.pos, &a.pos);
    let dpb = base_dist(spec, &p.pos, &b.pos);
    if blen == rat_int(0) {
        // Vertical segment: base fixed, fiber spans an interval.
        let (flo, fhi) = if a.fiber <= b.fiber {
            (a.fiber.clone(), b.fiber.clone())
        } else {
            (b.fiber.clone(), a.fiber.clone())
        };
        let df = if p.fiber < flo {
            flo - p.fiber.clone()
        } else if p.fiber > fhi {
            p.fiber.clone() - fhi
        } else {
            rat_int(0)
        };
        return match metric {
            Metric::L2 => hypot_rat(&dpa, &df),
            Metric::L1 => rat_to_f64(&(dpa + df)),
        };
    }
    let two = rat_int(2);
    let s_star = (dpa.clone() + blen.clone() - dpb) / two;
    let h = dpa - s_star.clone();
    let df_total = b.fiber.clone() - a.fiber.clone();
    let fiber_at = |s: &Rat| a.fiber.clone() + df_total.clone() * s.clone() / blen.clone();
    let value = |s: &Rat| -> f64 {
        let db = (s.clone() - s_star.clone()).abs() + h.clone();
        let df = (p.fiber.clone() - fiber_at(s)).abs();
        match metric {
            Metric::L2 => hypot_rat(&db, &df),
            Metric::L1 => rat_to_f64(&(db + df)),
        }
    };
    let mut candidates: Vec<Rat> = vec![rat_int(0), blen.clone()];
    if s_star > rat_int(0) && s_star < blen {
        candidates.push(s_star.clone());
    }
    // Fiber term zero crossing.
    if df_total != rat_int(0) {
        let s0 = (p.fiber.clone() - a.fiber.clone()) * blen.clone() / df_total.clone();
        if s0 > rat_int(0) && s0 < blen {
            candidates.push(s0);
        }
    }
    if metric == Metric::L2 {
        // Stationary point of each smooth quadratic piece:
        // minimize (h + eps (s - s*))^2 + (c + d s)^2 over s.
        let d = df_total.clone() / blen.clone();
        let c = a.fiber.clone() - p.fiber.clone();
        for eps in [rat_int(1), rat_int(-1)] {
            let denom = rat_int(1) + d.clone() * d.clone();
            // derivative: (s - s*) + eps h ... solving
            // eps(h + eps(s - s*)) + d(c + d s) = 0 with eps^2 = 1:
            // s (1 + d^2) = s* - eps h - d c
            let s = (s_star.clone() - eps.clone() * h.clone() - d.clone() * c.clone()) / denom;
            let valid = if eps == rat_int(1) {
                s >= s_star && s <= blen
            } else {
                s >= rat_int(0) && s <= s_star
            };
            if valid {
                candidates.push(s);
            }
        }
    }
    candidates
        .iter()
        .map(|s| value(s))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum distance from p to any segment of a special path that lies in
/// p's own chart (exact); segments in other charts are skipped.
pub fn same_chart_path_dist(model: &Model, path: &SpecialPath, p: &PointCoord) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (a, b) in &path.segments {
        if a.addr != p.addr {
            continue;
        }
        let d = segment_point_dist(model, a, b, p, Metric::L2);
        best = Some(best.map_or(d, |x: f64| x.min(d)));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::spec::two_piece_reference;
    use crate::flip::tree::WallLine;
    use crate::num::{rat_frac, rat_int};
    use crate::sampling::{fork, random_point};

    fn model() -> Model {
        Model::new(two_piece_reference())
    }

    fn vertex_point(m: &Model, addr: CopyAddress, walk: &str, fiber: Rat) -> PointCoord {
        let piece = m.piece_of_addr(&addr).unwrap();
        let w = if walk == "1" {
            Vec::new()
        } else {
            let toks: Vec<String> = walk.split_whitespace().map(|t| t.to_string()).collect();
            m.piece(piece).spine.parse_walk(&toks).unwrap()
        };
        PointCoord {
            addr,
            pos: BasePos::Vertex(w),
            fiber,
        }
    }

    #[test]
    fn degenerate_and_same_piece_paths() {
        let m = model();
        let x = PointCoord::root();
        let p = special_path(&m, &x, &x).unwrap();
        assert_eq!(p.length_l1(&m), rat_int(0));
        assert_eq!(p.length_l2(&m), 0.0);

        // Base distance 1 (4 edges at 1/4), fiber difference 3/4:
        // L2 = 5/4, L1 = 7/4.
        let y = vertex_point(&m, Vec::new(), "a b a b", rat_frac(3, 4));
        let p = special_path(&m, &x, &y).unwrap();
        assert_eq!(p.length_l1(&m), rat_frac(7, 4));
        assert!((p.length_l2(&m) - 1.25).abs() < 1e-12);
        assert!((p.length_l1(&m).clone() * rat_int(0) == rat_int(0)));
    }

    #[test]
    fn cross_wall_path_matches_hand_construction() {
        let m = model();
        // y across the trivial-coset wall of gluing 0.
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let addr1 = m.neighbor_addr(&[], &cross);
        let x = vertex_point(&m, Vec::new(), "a a", rat_frac(1, 2));
        let y = vertex_point(&m, addr1, "b", rat_frac(-1, 4));
        let path = special_path(&m, &x, &y).unwrap();
        assert_eq!(path.wall_count(), 1);
        // Exit foot: projection of a^2 onto the commutator line through the
        // root is the vertex "a" (arc 1/4).
        let wall = &path.walls[0];
        let here = crate::flip::model::WallId {
            owner: Vec::new(),
            cycle: 0,
            coset: Vec::new(),
        };
        let mut line = m.line_of_wall(&here).unwrap();
        assert_eq!(line.locate(&wall.before.pos), Some(rat_frac(1, 4)));
        // Entry foot: projection of "b" onto piece 1's trivial commutator
        // line is the vertex "b" itself (arc -1/4); with zero offsets the
        // before-side fiber equals that arc.
        assert_eq!(wall.before.fiber, rat_frac(-1, 4));
        // After-side fiber is the before-side arc.
        assert_eq!(wall.after.fiber, rat_frac(1, 4));
        // Segment chain is consistent.
        assert_eq!(path.segments.len(), 2);
        assert_eq!(path.segments[0].0, x);
        assert_eq!(path.segments[1].1, y);
        // Length adds the two product-metric legs.
        let l0 = m.chart_dist_l2(0, &x, &wall.before);
        let l1 = m.chart_dist_l2(1, &wall.after, &y);
        assert!((path.length_l2(&m) - (l0 + l1)).abs() < 1e-12);
    }

    #[test]
    fn reversal_symmetry_is_exact() {
        let m = model();
        for i in 0..40u64 {
            let mut rng = fork(21, i);
            let x = random_point(&mut rng, &m, 3, 2);
            let y = random_point(&mut rng, &m, 3, 2);
            let fwd = special_path(&m, &x, &y).unwrap();
            let rev = special_path(&m, &y, &x).unwrap();
            assert_eq!(fwd.wall_count(), rev.wall_count());
            let n = fwd.wall_count();
            for k in 0..n {
                assert_eq!(fwd.walls[k].before, rev.walls[n - 1 - k].after);
                assert_eq!(fwd.walls[k].after, rev.walls[n - 1 - k].before);
            }
            assert_eq!(fwd.length_l1(&m), rev.length_l1(&m));
        }
    }

    #[test]
    fn breakpoint_restriction_reproduces_interior_walls() {
        let m = model();
        let mut checked = 0;
        for i in 0..60u64 {
            let mut rng = fork(33, i);
            let x = random_point(&mut rng, &m, 4, 2);
            let y = random_point(&mut rng, &m, 4, 2);
            let path = special_path(&m, &x, &y).unwrap();
            let n = path.wall_count();
            if n < 3 {
                continue;
            }
            let sub = special_path(&m, &path.walls[0].after, &path.walls[n - 1].before).unwrap();
            assert_eq!(sub.wall_count(), n - 2);
            for k in 0..n - 2 {
                assert_eq!(sub.walls[k], path.walls[k + 1]);
            }
            checked += 1;
        }
        assert!(checked >= 3, "want several multi-wall samples");
    }

    #[test]
    fn l1_l2_norm_equivalence() {
        let m = model();
        for i in 0..60u64 {
            let mut rng = fork(55, i);
            let x = random_point(&mut rng, &m, 3, 2);
            let y = random_point(&mut rng, &m, 3, 2);
            let p = special_path(&m, &x, &y).unwrap();
            let l1 = rat_to_f64(&p.length_l1(&m));
            let l2 = p.length_l2(&m);
            assert!(l1 >= l2 - 1e-9);
            assert!(l2 >= l1 / std::f64::consts::SQRT_2 - 1e-9);
        }
    }

    #[test]
    fn slide_defect_is_nonpositive_exactly() {
        let m = model();
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let addr1 = m.neighbor_addr(&[], &cross);
        let here = crate::flip::model::WallId {
            owner: Vec::new(),
            cycle: 0,
            coset: Vec::new(),
        };
        for i in 0..200u64 {
            let mut rng = fork(99, i);
            let x = random_point(&mut rng, &m, 0, 3);
            let mut z = random_point(&mut rng, &m, 0, 3);
            z.addr = addr1.clone();
            let mut line = m.line_of_wall(&here).unwrap();
            let arc = crate::sampling::random_dyadic(&mut rng, 3);
            let y = PointCoord {
                addr: Vec::new(),
                pos: line.point_at(&arc),
                fiber: crate::sampling::random_dyadic(&mut rng, 3),
            };
            let (w, defect) = horizontal_slide(&m, &x, &y, &z).unwrap();
            assert!(defect <= rat_int(0), "defect {defect} at sample {i}");
            // A minimizing y slides to itself.
            let (_, d0) = horizontal_slide(&m, &x, &w, &z).unwrap();
            assert_eq!(d0, rat_int(0));
        }
    }

    #[test]
    fn segment_point_distance_matches_brute_force() {
        let m = model();
        for i in 0..30u64 {
            let mut rng = fork(77, i);
            let a = random_point(&mut rng, &m, 0, 2);
            let mut b = random_point(&mut rng, &m, 0, 2);
            b.addr = a.addr.clone();
            let mut p = random_point(&mut rng, &m, 0, 2);
            p.addr = a.addr.clone();
            let exact = segment_point_dist(&m, &a, &b, &p, Metric::L2);
            // Brute force over a fine grid of the joint geodesic parameter.
            let spec = m.piece(0);
            let blen = base_dist(spec, &a.pos, &b.pos);
            let dpa = base_dist(spec, &p.pos, &a.pos);
            let dpb = base_dist(spec, &p.pos, &b.pos);
            let s_star = (dpa.clone() + blen.clone() - dpb) / rat_int(2);
            let h = dpa - s_star.clone();
            let mut best = f64::INFINITY;
            let steps = 400;
            for k in 0..=steps {
                let theta = rat_frac(k, steps);
                let s = blen.clone() * theta.clone();
                let db = (s - s_star.clone()).abs() + h.clone();
                let f = a.fiber.clone() + (b.fiber.clone() - a.fiber.clone()) * theta;
                let df = (p.fiber.clone() - f).abs();
                best = best.min(hypot_rat(&db, &df));
            }
            assert!(exact <= best + 1e-9, "closed form must not exceed grid");
            assert!(best <= exact + 0.02, "grid close to closed form");
        }
    }

    #[test]
    fn lower_bound_stays_below_path_length() {
        let m = model();
        let gap = m.min_wall_separation(3).unwrap().gap;
        for i in 0..60u64 {
            let mut rng = fork(13, i);
            let x = random_point(&mut rng, &m, 4, 2);
            let y = random_point(&mut rng, &m, 4, 2);
            let p = special_path(&m, &x, &y).unwrap();
            let lb = distance_lower_bound(&m, &gap, &x, &y);
            assert!(lb <= rat_to_f64(&p.length_l1(&m)) + 1e-9);
        }
    }

    #[test]
    fn wall_line_type_is_exported() {
        let m = model();
        let _line: WallLine = m.wall_line(0, 0, &Vec::new());
    }
}
