//! The universal-cover model: a lazily explored tree of piece charts.
//!
//! Each chart is a fresh scaled base tree crossed with a fiber line; charts
//! are glued along wall planes by the flip map (s, t) -> (t + sigma, s + tau).
//! A copy is addressed by its reduced crossing sequence from the root chart.

use std::collections::HashSet;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::flip::spec::{FlipManifoldSpec, PieceSpec};
use crate::flip::tree::{base_dist, line_relation, BasePos, LineRelation, WallLine};
use crate::num::{rat_int, Rat};
use crate::spine::{coset_split, Walk};

/// One wall crossing: which gluing, which direction, and the coset of the
/// crossed elevation in the chart being exited (canonical representative).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub gluing: u32,
    pub forward: bool,
    pub coset: Walk,
}

pub type CopyAddress = Vec<Crossing>;

/// A point of the universal cover: chart address, base position, fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCoord {
    pub addr: CopyAddress,
    pub pos: BasePos,
    pub fiber: Rat,
}

impl PointCoord {
    pub fn root() -> Self {
        PointCoord {
            addr: Vec::new(),
            pos: BasePos::root(),
            fiber: rat_int(0),
        }
    }
}

/// A wall of a given chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WallId {
    pub owner: CopyAddress,
    pub cycle: usize,
    pub coset: Walk,
}

#[derive(Clone, Debug)]
pub struct WallGapReport {
    pub gap: Rat,
    pub radius_used: usize,
    pub pairs_examined: usize,
    pub skipped_tangencies: usize,
}

pub struct Model {
    pub spec: FlipManifoldSpec,
    pub root_piece: usize,
}

impl Model {
    pub fn new(spec: FlipManifoldSpec) -> Self {
        Model {
            spec,
            root_piece: 0,
        }
    }

    pub fn piece(&self, i: usize) -> &PieceSpec {
        &self.spec.pieces[i]
    }

    /// (piece, cycle) on the side a crossing exits from.
    pub fn exit_side(&self, gluing: u32, forward: bool) -> (usize, usize) {
        let g = &self.spec.gluings[gluing as usize];
        if forward {
            g.from
        } else {
            g.to
        }
    }

    /// (piece, cycle) on the side a crossing enters.
    pub fn enter_side(&self, gluing: u32, forward: bool) -> (usize, usize) {
        let g = &self.spec.gluings[gluing as usize];
        if forward {
            g.to
        } else {
            g.from
        }
    }

    /// Piece type of a chart, validating the crossing chain.
    pub fn piece_of_addr(&self, addr: &[Crossing]) -> Result<usize> {
        let mut at = self.root_piece;
        for c in addr {
            let (p, _) = self.exit_side(c.gluing, c.forward);
            if p != at {
                return Err(Error::Inconsistency(format!(
                    "crossing of gluing {} does not exit piece {at}",
                    c.gluing
                )));
            }
            at = self.enter_side(c.gluing, c.forward).0;
        }
        Ok(at)
    }

    /// Flip map on wall coordinates in the direction of the crossing.
    pub fn flip_coords(&self, gluing: u32, forward: bool, s: &Rat, t: &Rat) -> (Rat, Rat) {
        let g = &self.spec.gluings[gluing as usize];
        if forward {
            (t.clone() + g.offset_s.clone(), s.clone() + g.offset_t.clone())
        } else {
            (t.clone() - g.offset_t.clone(), s.clone() - g.offset_s.clone())
        }
    }

    /// Whether applying `crossing` from the chart at `addr` returns to the
    /// parent chart.
    pub fn is_back_crossing(&self, addr: &[Crossing], crossing: &Crossing) -> bool {
        crossing.coset.is_empty()
            && addr.last().map_or(false, |last| {
                last.gluing == crossing.gluing && last.forward == !crossing.forward
            })
    }

    /// Address of the neighbor chart across a wall: reduced (pop on the
    /// parent wall, push otherwise).
    pub fn neighbor_addr(&self, addr: &[Crossing], crossing: &Crossing) -> CopyAddress {
        let mut out = addr.to_vec();
        if self.is_back_crossing(addr, crossing) {
            out.pop();
        } else {
            out.push(crossing.clone());
        }
        out
    }

    /// The wall's (cycle, coset) as seen from each side of a crossing applied
    /// from `addr`, plus the neighbor address.
    pub fn wall_sides(
        &self,
        addr: &[Crossing],
        crossing: &Crossing,
    ) -> Result<(WallId, WallId, CopyAddress)> {
        let here_piece = self.piece_of_addr(addr)?;
        let (exit_piece, exit_cycle) = self.exit_side(crossing.gluing, crossing.forward);
        if exit_piece != here_piece {
            return Err(Error::Inconsistency(
                "crossing does not exit the current piece".into(),
            ));
        }
        let here = WallId {
            owner: addr.to_vec(),
            cycle: exit_cycle,
            coset: crossing.coset.clone(),
        };
        let next = self.neighbor_addr(addr, crossing);
        let there = if self.is_back_crossing(addr, crossing) {
            let popped = addr.last().expect("back crossing has a parent");
            let (_, parent_cycle) = self.exit_side(popped.gluing, popped.forward);
            WallId {
                owner: next.clone(),
                cycle: parent_cycle,
                coset: popped.coset.clone(),
            }
        } else {
            let (_, enter_cycle) = self.enter_side(crossing.gluing, crossing.forward);
            WallId {
                owner: next.clone(),
                cycle: enter_cycle,
                coset: Vec::new(),
            }
        };
        Ok((here, there, next))
    }

    pub fn wall_line<'a>(&'a self, piece: usize, cycle: usize, coset: &Walk) -> WallLine<'a> {
        WallLine::new(self.piece(piece), cycle, coset)
    }

    pub fn line_of_wall<'a>(&'a self, wall: &WallId) -> Result<WallLine<'a>> {
        let piece = self.piece_of_addr(&wall.owner)?;
        Ok(self.wall_line(piece, wall.cycle, &wall.coset))
    }

    /// Transports a point lying on the crossed wall into the neighbor chart.
    pub fn cross_point(&self, x: &PointCoord, crossing: &Crossing) -> Result<PointCoord> {
        let (here, there, next) = self.wall_sides(&x.addr, crossing)?;
        let mut line = self.line_of_wall(&here)?;
        let s = line.locate(&x.pos).ok_or(Error::NotOnWall)?;
        let (s2, t2) = self.flip_coords(crossing.gluing, crossing.forward, &s, &x.fiber);
        let mut entry = self.line_of_wall(&there)?;
        Ok(PointCoord {
            addr: next,
            pos: entry.point_at(&s2),
            fiber: t2,
        })
    }

    /// Wall-chart coordinates (arclength, fiber) of an on-wall point.
    pub fn wall_coords(&self, wall: &WallId, x: &PointCoord) -> Result<(Rat, Rat)> {
        if x.addr != wall.owner {
            return Err(Error::NotOnWall);
        }
        let mut line = self.line_of_wall(wall)?;
        let s = line.locate(&x.pos).ok_or(Error::NotOnWall)?;
        Ok((s, x.fiber.clone()))
    }

    /// Exact product-metric distance between two points of one chart.
    pub fn chart_dist_l2(&self, piece: usize, a: &PointCoord, b: &PointCoord) -> f64 {
        let db = base_dist(self.piece(piece), &a.pos, &b.pos);
        let df = a.fiber.clone() - b.fiber.clone();
        crate::num::hypot_rat(&db, &df)
    }

    pub fn chart_dist_l1(&self, piece: usize, a: &PointCoord, b: &PointCoord) -> Rat {
        let db = base_dist(self.piece(piece), &a.pos, &b.pos);
        let df = (a.fiber.clone() - b.fiber.clone()).abs();
        db + df
    }

    /// The unique reduced crossing sequence from chart `a` to chart `b`,
    /// with the chart each crossing is applied from.
    pub fn geodesic_crossings(
        &self,
        a: &[Crossing],
        b: &[Crossing],
    ) -> Vec<(CopyAddress, Crossing)> {
        let mut k = 0;
        while k < a.len() && k < b.len() && a[k] == b[k] {
            k += 1;
        }
        let mut out = Vec::new();
        for i in (k..a.len()).rev() {
            let chart = a[..=i].to_vec();
            let back = Crossing {
                gluing: a[i].gluing,
                forward: !a[i].forward,
                coset: Vec::new(),
            };
            out.push((chart, back));
        }
        for i in k..b.len() {
            out.push((b[..i].to_vec(), b[i].clone()));
        }
        out
    }

    /// Dual-tree distance between two charts.
    pub fn dual_distance(&self, a: &[Crossing], b: &[Crossing]) -> usize {
        let mut k = 0;
        while k < a.len() && k < b.len() && a[k] == b[k] {
            k += 1;
        }
        (a.len() - k) + (b.len() - k)
    }

    /// Canonicalises a coset representative for a wall of a given piece.
    pub fn canonical_coset(&self, piece: usize, cycle: usize, rep: &Walk) -> (Walk, i64) {
        let gamma = &self.piece(piece).cycles[cycle].based_loop;
        coset_split(rep, gamma)
    }

    /// Minimum positive separation between distinct wall elevations whose
    /// canonical representatives have length at most `radius`.
    ///
    /// Pairs of elevations that touch or overlap (tangencies of the squashed
    /// tree model) are skipped and counted separately; the report carries the
    /// radius actually used. If no positive pair shows up the radius is grown.
    pub fn min_wall_separation(&self, radius: usize) -> Result<WallGapReport> {
        for r in radius..=radius + 6 {
            let mut gap: Option<Rat> = None;
            let mut pairs = 0usize;
            let mut skipped = 0usize;
            for piece in &self.spec.pieces {
                let mut walls: Vec<(usize, Walk)> = Vec::new();
                let mut seen: HashSet<(usize, Walk)> = HashSet::new();
                for (ci, _) in piece.cycles.iter().enumerate() {
                    let gamma = &piece.cycles[ci].based_loop;
                    for u in piece.spine.closed_walks(0, r) {
                        let (rep, _) = coset_split(&u, gamma);
                        if rep.len() <= r && seen.insert((ci, rep.clone())) {
                            walls.push((ci, rep));
                        }
                    }
                }
                for i in 0..walls.len() {
                    for j in (i + 1)..walls.len() {
                        let mut la = WallLine::new(piece, walls[i].0, &walls[i].1);
                        let mut lb = WallLine::new(piece, walls[j].0, &walls[j].1);
                        pairs += 1;
                        match line_relation(&mut la, &mut lb)? {
                            LineRelation::Disjoint { dist, .. } => {
                                if gap.as_ref().map_or(true, |g| &dist < g) {
                                    gap = Some(dist);
                                }
                            }
                            _ => skipped += 1,
                        }
                    }
                }
            }
            if let Some(gap) = gap {
                return Ok(WallGapReport {
                    gap,
                    radius_used: r,
                    pairs_examined: pairs,
                    skipped_tangencies: skipped,
                });
            }
        }
        Err(Error::Inconsistency(
            "no positively separated wall pair within the exploration radius".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::spec::{self_glued_reference, two_piece_reference};
    use crate::num::{rat_frac, rat_to_f64};

    fn walk(m: &Model, piece: usize, s: &str) -> Walk {
        if s == "1" {
            return Vec::new();
        }
        let toks: Vec<String> = s.split_whitespace().map(|t| t.to_string()).collect();
        m.piece(piece).spine.parse_walk(&toks).unwrap()
    }

    #[test]
    fn neighbor_round_trip() {
        let m = Model::new(two_piece_reference());
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: walk(&m, 0, "a a"),
        };
        let addr = m.neighbor_addr(&[], &cross);
        assert_eq!(addr.len(), 1);
        assert_eq!(m.piece_of_addr(&addr).unwrap(), 1);
        let back = Crossing {
            gluing: 0,
            forward: false,
            coset: Vec::new(),
        };
        assert!(m.is_back_crossing(&addr, &back));
        assert!(m.neighbor_addr(&addr, &back).is_empty());
        // Two distinct walls give distinct neighbor addresses.
        let cross2 = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        assert_ne!(m.neighbor_addr(&[], &cross2), addr);
    }

    #[test]
    fn flip_round_trip_is_identity_on_wall_points() {
        let m = Model::new(two_piece_reference());
        // Points on the trivial-coset wall of the root chart.
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let wall = WallId {
            owner: Vec::new(),
            cycle: 0,
            coset: Vec::new(),
        };
        let mut line = m.line_of_wall(&wall).unwrap();
        for k in -6..=6 {
            for df in [-2i64, 0, 1, 3] {
                let arc = rat_frac(k, 4) + rat_frac(1, 8);
                let x = PointCoord {
                    addr: Vec::new(),
                    pos: line.point_at(&arc),
                    fiber: rat_frac(df, 2),
                };
                let over = m.cross_point(&x, &cross).unwrap();
                assert_eq!(m.piece_of_addr(&over.addr).unwrap(), 1);
                let back = Crossing {
                    gluing: 0,
                    forward: false,
                    coset: Vec::new(),
                };
                let round = m.cross_point(&over, &back).unwrap();
                assert_eq!(round, x);
            }
        }
    }

    #[test]
    fn wall_coords_origin_convention() {
        let m = Model::new(two_piece_reference());
        let wall = WallId {
            owner: Vec::new(),
            cycle: 0,
            coset: Vec::new(),
        };
        let x = PointCoord::root();
        // The root vertex lies on the trivial commutator elevation at arc 0.
        let (s, t) = m.wall_coords(&wall, &x).unwrap();
        assert_eq!(s, rat_int(0));
        assert_eq!(t, rat_int(0));
        // One scaled edge along the line with fiber 5/2.
        let mut line = m.line_of_wall(&wall).unwrap();
        let y = PointCoord {
            addr: Vec::new(),
            pos: line.point_at(&rat_frac(1, 4)),
            fiber: rat_frac(5, 2),
        };
        let (s, t) = m.wall_coords(&wall, &y).unwrap();
        assert_eq!(s, rat_frac(1, 4));
        assert_eq!(t, rat_frac(5, 2));
    }

    #[test]
    fn geodesic_crossings_reduce_and_concatenate() {
        let m = Model::new(two_piece_reference());
        let c1 = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let c2 = Crossing {
            gluing: 0,
            forward: false,
            coset: walk(&m, 1, "b b"),
        };
        let a: CopyAddress = vec![c1.clone()];
        let b: CopyAddress = vec![c1.clone(), c2.clone()];
        assert!(m.geodesic_crossings(&a, &a).is_empty());
        let ab = m.geodesic_crossings(&a, &b);
        assert_eq!(ab.len(), 1);
        let root_to_b = m.geodesic_crossings(&[], &b);
        assert_eq!(root_to_b.len(), 2);
        // No immediate backtrack along the way.
        for w in root_to_b.windows(2) {
            let (_, ref x) = w[0];
            let (ref chart, ref y) = w[1];
            assert!(!(m.is_back_crossing(chart, y) && chart.last() == Some(x)));
        }
        assert_eq!(m.dual_distance(&[], &b), 2);
        assert_eq!(m.dual_distance(&a, &b), 1);
    }

    #[test]
    fn wall_separation_positive_and_monotone() {
        let m = Model::new(two_piece_reference());
        let r2 = m.min_wall_separation(2).unwrap();
        let r3 = m.min_wall_separation(3).unwrap();
        assert!(rat_to_f64(&r2.gap) > 0.0);
        assert!(r3.gap <= r2.gap);
        assert!(r2.skipped_tangencies > 0, "tangencies are expected and skipped");
    }

    #[test]
    fn self_glued_spec_walls() {
        let m = Model::new(self_glued_reference());
        let r = m.min_wall_separation(1).unwrap();
        assert!(rat_to_f64(&r.gap) > 0.0);
        // Crossing forward from the root enters the same piece type.
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let addr = m.neighbor_addr(&[], &cross);
        assert_eq!(m.piece_of_addr(&addr).unwrap(), 0);
    }
}
