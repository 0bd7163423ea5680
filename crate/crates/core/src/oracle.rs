//! Independent distance oracle: layered shortest path through wall portals.
//!
//! Any path between charts crosses, inside each intervening piece, the
//! projection feet connecting the entry and exit wall lines (bridge feet for
//! disjoint lines, the shared segment for tangent ones). Placing fiber grids
//! on those feet and joining consecutive layers with exact in-piece and
//! across-wall leg costs gives an upper bound within O(resolution x walls)
//! of the true distance; every graph path is a realizable path, so the value
//! never undercuts the metric.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::flip::model::{Model, PointCoord};
use crate::flip::tree::{base_dist, line_relation, BasePos, LineRelation};
use crate::num::{rat_from_f64, rat_int, rat_to_f64, Rat};
use crate::paths::{special_path, SpecialPath};

#[derive(Clone, Debug)]
pub struct OracleOptions {
    pub resolution: f64,
    pub max_walls: usize,
    pub max_nodes: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            resolution: 0.25,
            max_walls: 12,
            max_nodes: 400_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub value: f64,
    pub walls: usize,
    pub nodes: usize,
}

#[derive(Clone)]
struct PortalBase {
    /// Arc of the base point on the chart's entry line (incoming side).
    arc_in: Option<f64>,
    /// Arc on the chart's exit line (outgoing side).
    arc_out: Option<f64>,
    pos: BasePos,
}

struct Layer {
    bases: Vec<PortalBase>,
    fibers: Vec<f64>,
}

enum Hop {
    /// Same chart: exact product-metric legs between portal bases.
    Within { base_dists: Vec<Vec<f64>> },
    /// Across a wall: closed-form two-leg minimum through the plane.
    Cross { sigma: f64, tau: f64, forward: bool },
}

fn fiber_grid(lo: &Rat, hi: &Rat, pitch: &Rat, bonus: &[Rat], cap: usize) -> Result<Vec<f64>> {
    let j_lo = (lo / pitch)
        .floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::BudgetExceeded("fiber window out of range".into()))?;
    let j_hi = (hi / pitch)
        .ceil()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::BudgetExceeded("fiber window out of range".into()))?;
    if j_hi < j_lo || (j_hi - j_lo) as usize > cap {
        return Err(Error::BudgetExceeded(format!(
            "fiber grid of {} nodes exceeds the cap {cap}",
            j_hi - j_lo
        )));
    }
    let mut vals: Vec<Rat> = (j_lo..=j_hi).map(|j| rat_int(j) * pitch.clone()).collect();
    vals.extend_from_slice(bonus);
    vals.sort();
    vals.dedup();
    Ok(vals.iter().map(rat_to_f64).collect())
}

/// Discretized distance between two model points.
pub fn approx_distance_with(
    model: &Model,
    x: &PointCoord,
    y: &PointCoord,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    if x.addr == y.addr {
        let piece = model.piece_of_addr(&x.addr)?;
        return Ok(OracleResult {
            value: model.chart_dist_l2(piece, x, y),
            walls: 0,
            nodes: 2,
        });
    }
    let path = special_path(model, x, y)?;
    let n = path.wall_count();
    if n > opts.max_walls {
        return Err(Error::BudgetExceeded(format!(
            "{n} walls exceed the oracle limit {}",
            opts.max_walls
        )));
    }
    let (charts, chain) = crate::paths::chain_charts(model, x, y);
    let pitch = rat_from_f64(opts.resolution)? / rat_int(2);
    if pitch <= rat_int(0) {
        return Err(Error::BudgetExceeded("resolution must be positive".into()));
    }
    let halfwidth = path.length_l1(model) * rat_int(2) + rat_int(1);

    let mut here_walls = Vec::with_capacity(n);
    let mut there_walls = Vec::with_capacity(n);
    for (chart, crossing) in &chain {
        let (here, there, _) = model.wall_sides(chart, crossing)?;
        here_walls.push(here);
        there_walls.push(there);
    }

    // Reference fibers per chart come from the special path, which the true
    // geodesic fellow-travels within twice the L1 length.
    let chart_refs = |i: usize| -> Vec<Rat> {
        if i == 0 {
            vec![x.fiber.clone(), path.walls[0].before.fiber.clone()]
        } else if i == n {
            vec![path.walls[n - 1].after.fiber.clone(), y.fiber.clone()]
        } else {
            vec![
                path.walls[i - 1].after.fiber.clone(),
                path.walls[i].before.fiber.clone(),
            ]
        }
    };
    let grid_for = |i: usize| -> Result<Vec<f64>> {
        let refs = chart_refs(i);
        let lo = refs.iter().min().unwrap().clone() - halfwidth.clone();
        let hi = refs.iter().max().unwrap().clone() + halfwidth.clone();
        fiber_grid(&lo, &hi, &pitch, &refs, opts.max_nodes)
    };
    let cross_hop = |k: usize| -> Hop {
        let g = &model.spec.gluings[chain[k].1.gluing as usize];
        Hop::Cross {
            sigma: rat_to_f64(&g.offset_s),
            tau: rat_to_f64(&g.offset_t),
            forward: chain[k].1.forward,
        }
    };

    let mut layers: Vec<Layer> = Vec::new();
    let mut hops: Vec<Hop> = Vec::new();

    // Chart 0: single portal at the projection foot of x.
    {
        let mut line = model.line_of_wall(&here_walls[0])?;
        let foot = path.walls[0].before.pos.clone();
        let arc = line
            .locate(&foot)
            .ok_or_else(|| Error::Inconsistency("portal foot off its line".into()))?;
        layers.push(Layer {
            bases: vec![PortalBase {
                arc_in: None,
                arc_out: Some(rat_to_f64(&arc)),
                pos: foot,
            }],
            fibers: grid_for(0)?,
        });
    }
    for i in 1..n {
        hops.push(cross_hop(i - 1));
        let piece = model.piece_of_addr(&charts[i])?;
        let spec = model.piece(piece);
        let mut lin = model.line_of_wall(&there_walls[i - 1])?;
        let mut lout = model.line_of_wall(&here_walls[i])?;
        let rel = line_relation(&mut lin, &mut lout)?;
        let fibers = grid_for(i)?;
        let (bases_in, bases_out): (Vec<PortalBase>, Vec<PortalBase>) = match rel {
            LineRelation::Disjoint { foot_a, foot_b, .. } => {
                let pa = BasePos::Vertex(lin.vertex(foot_a));
                let pb = BasePos::Vertex(lout.vertex(foot_b));
                let arc_a = lin.locate(&pa).expect("foot on entry line");
                let arc_b = lout.locate(&pb).expect("foot on exit line");
                (
                    vec![PortalBase {
                        arc_in: Some(rat_to_f64(&arc_a)),
                        arc_out: None,
                        pos: pa,
                    }],
                    vec![PortalBase {
                        arc_in: None,
                        arc_out: Some(rat_to_f64(&arc_b)),
                        pos: pb,
                    }],
                )
            }
            LineRelation::Touch { idx_a, .. } => {
                let p = BasePos::Vertex(lin.vertex(idx_a));
                let base = PortalBase {
                    arc_in: lin.locate(&p).as_ref().map(rat_to_f64),
                    arc_out: lout.locate(&p).as_ref().map(rat_to_f64),
                    pos: p,
                };
                (vec![base.clone()], vec![base])
            }
            LineRelation::Overlap { a_range, .. } => {
                let scale = spec.base_scale.clone();
                let lo_arc = scale.clone() * rat_int(a_range.0);
                let hi_arc = scale * rat_int(a_range.1);
                let mut arcs = vec![
                    lo_arc.clone(),
                    hi_arc.clone(),
                    (lo_arc.clone() + hi_arc.clone()) / rat_int(2),
                ];
                let mut a = lo_arc.clone();
                while a < hi_arc {
                    arcs.push(a.clone());
                    a = a + pitch.clone();
                }
                arcs.sort();
                arcs.dedup();
                let mut bases = Vec::with_capacity(arcs.len());
                for arc in &arcs {
                    let p = lin.point_at(arc);
                    bases.push(PortalBase {
                        arc_in: Some(rat_to_f64(arc)),
                        arc_out: lout.locate(&p).map(|v| rat_to_f64(&v)),
                        pos: p,
                    });
                }
                (bases.clone(), bases)
            }
        };
        let mut base_dists = Vec::with_capacity(bases_in.len());
        for pb in &bases_in {
            let row: Vec<f64> = bases_out
                .iter()
                .map(|qb| rat_to_f64(&base_dist(spec, &pb.pos, &qb.pos)))
                .collect();
            base_dists.push(row);
        }
        layers.push(Layer {
            bases: bases_in,
            fibers: fibers.clone(),
        });
        hops.push(Hop::Within { base_dists });
        layers.push(Layer {
            bases: bases_out,
            fibers,
        });
    }
    {
        hops.push(cross_hop(n - 1));
        let mut line = model.line_of_wall(&there_walls[n - 1])?;
        let foot = path.walls[n - 1].after.pos.clone();
        let arc = line
            .locate(&foot)
            .ok_or_else(|| Error::Inconsistency("portal foot off its line".into()))?;
        layers.push(Layer {
            bases: vec![PortalBase {
                arc_in: Some(rat_to_f64(&arc)),
                arc_out: None,
                pos: foot,
            }],
            fibers: grid_for(n)?,
        });
    }

    let total_nodes: usize = layers.iter().map(|l| l.bases.len() * l.fibers.len()).sum();
    if total_nodes > opts.max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "{total_nodes} oracle nodes exceed the cap {}",
            opts.max_nodes
        )));
    }

    // Forward DP across the layered graph.
    let x_piece = model.piece_of_addr(&x.addr)?;
    let x_fiber = rat_to_f64(&x.fiber);
    let d0 = rat_to_f64(&base_dist(
        model.piece(x_piece),
        &x.pos,
        &layers[0].bases[0].pos,
    ));
    let mut dist: Vec<f64> = layers[0]
        .bases
        .iter()
        .flat_map(|_| {
            layers[0]
                .fibers
                .iter()
                .map(|&f| d0.hypot(x_fiber - f))
                .collect::<Vec<_>>()
        })
        .collect();
    for (k, hop) in hops.iter().enumerate() {
        let prev = &layers[k];
        let next = &layers[k + 1];
        let mut out = vec![f64::INFINITY; next.bases.len() * next.fibers.len()];
        for (bi, pb) in prev.bases.iter().enumerate() {
            for (fi, &phi) in prev.fibers.iter().enumerate() {
                let d = dist[bi * prev.fibers.len() + fi];
                if !d.is_finite() {
                    continue;
                }
                for (bj, qb) in next.bases.iter().enumerate() {
                    for (fj, &psi) in next.fibers.iter().enumerate() {
                        let c = match hop {
                            Hop::Within { base_dists } => {
                                base_dists[bi][bj].hypot(phi - psi)
                            }
                            Hop::Cross {
                                sigma,
                                tau,
                                forward,
                            } => {
                                let alpha = pb.arc_out.expect("exit arc");
                                let alpha2 = qb.arc_in.expect("entry arc");
                                if *forward {
                                    (alpha - psi + tau).hypot(phi - alpha2 + sigma)
                                } else {
                                    (alpha - psi - sigma).hypot(phi - alpha2 - tau)
                                }
                            }
                        };
                        let idx = bj * next.fibers.len() + fj;
                        if d + c < out[idx] {
                            out[idx] = d + c;
                        }
                    }
                }
            }
        }
        dist = out;
    }
    let y_piece = model.piece_of_addr(&y.addr)?;
    let y_fiber = rat_to_f64(&y.fiber);
    let last = layers.last().unwrap();
    let dn = rat_to_f64(&base_dist(
        model.piece(y_piece),
        &y.pos,
        &last.bases[0].pos,
    ));
    let mut best = f64::INFINITY;
    for (bi, _) in last.bases.iter().enumerate() {
        for (fi, &phi) in last.fibers.iter().enumerate() {
            let total = dist[bi * last.fibers.len() + fi] + dn.hypot(phi - y_fiber);
            best = best.min(total);
        }
    }
    Ok(OracleResult {
        value: best,
        walls: n,
        nodes: total_nodes,
    })
}

pub fn approx_distance(
    model: &Model,
    x: &PointCoord,
    y: &PointCoord,
    resolution: f64,
) -> Result<f64> {
    let opts = OracleOptions {
        resolution,
        ..OracleOptions::default()
    };
    Ok(approx_distance_with(model, x, y, &opts)?.value)
}

/// One sampled pair in a quasi-geodesy fit.
#[derive(Clone, Debug, serde::Serialize)]
pub struct QgSample {
    pub index: u64,
    pub walls: usize,
    pub length_l1: f64,
    pub length_l2: f64,
    pub oracle: f64,
    pub lower_bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct QgReport {
    pub kappa: f64,
    pub samples: usize,
    pub worst_ratio: f64,
    pub resolution: f64,
    pub seed: u64,
    pub rows: Vec<QgSample>,
}

/// Samples endpoint pairs, compares special-path length against the oracle,
/// and fits the least kappa with length_l1 <= kappa * distance + kappa.
pub fn qg_fit(
    model: &Model,
    seed: u64,
    samples: u64,
    max_walls: usize,
    resolution: f64,
) -> Result<QgReport> {
    use rayon::prelude::*;
    let opts = OracleOptions {
        resolution,
        max_walls,
        ..OracleOptions::default()
    };
    let gap = model.min_wall_separation(3)?.gap;
    let rows: Vec<QgSample> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<QgSample> {
            let mut rng = crate::sampling::fork(seed, i);
            let x = crate::sampling::random_point(&mut rng, model, 1, 2);
            let y =
                crate::sampling::random_point(&mut rng, model, max_walls.saturating_sub(1), 2);
            let path = special_path(model, &x, &y)?;
            let oracle = approx_distance_with(model, &x, &y, &opts)?;
            let l1 = rat_to_f64(&path.length_l1(model));
            let l2 = path.length_l2(model);
            let lb = crate::paths::distance_lower_bound(model, &gap, &x, &y);
            let ratio = if oracle.value > 1e-9 {
                l1 / oracle.value
            } else {
                1.0
            };
            Ok(QgSample {
                index: i,
                walls: path.wall_count(),
                length_l1: l1,
                length_l2: l2,
                oracle: oracle.value,
                lower_bound: lb,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let kappa = rows
        .iter()
        .map(|r| r.length_l1 / (r.oracle + 1.0))
        .fold(1.0f64, f64::max);
    let worst_ratio = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);
    Ok(QgReport {
        kappa,
        samples: rows.len(),
        worst_ratio,
        resolution,
        seed,
        rows,
    })
}

/// Special path plus oracle value from one computation.
pub fn path_and_oracle(
    model: &Model,
    x: &PointCoord,
    y: &PointCoord,
    opts: &OracleOptions,
) -> Result<(SpecialPath, OracleResult)> {
    let p = special_path(model, x, y)?;
    let o = approx_distance_with(model, x, y, opts)?;
    Ok((p, o))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::model::Crossing;
    use crate::flip::spec::two_piece_reference;
    use crate::num::rat_frac;
    use crate::sampling::{fork, random_point};

    fn model() -> Model {
        Model::new(two_piece_reference())
    }

    #[test]
    fn same_chart_is_exact() {
        let m = model();
        let x = PointCoord::root();
        let y = PointCoord {
            addr: Vec::new(),
            pos: BasePos::Vertex(
                m.piece(0)
                    .spine
                    .parse_walk(&["a".into(), "b".into()])
                    .unwrap(),
            ),
            fiber: rat_frac(3, 2),
        };
        let d = approx_distance(&m, &x, &y, 0.25).unwrap();
        let exact = m.chart_dist_l2(0, &x, &y);
        assert!((d - exact).abs() < 1e-12);
    }

    #[test]
    fn adjacent_chart_distance_matches_transported_exact_value() {
        let m = model();
        let cross = Crossing {
            gluing: 0,
            forward: true,
            coset: Vec::new(),
        };
        let addr1 = m.neighbor_addr(&[], &cross);
        // x on the shared wall: its transported copy lives in chart 1, so
        // the true distance is the exact product distance there.
        let wall = crate::flip::model::WallId {
            owner: Vec::new(),
            cycle: 0,
            coset: Vec::new(),
        };
        let mut line = m.line_of_wall(&wall).unwrap();
        let x = PointCoord {
            addr: Vec::new(),
            pos: line.point_at(&rat_frac(3, 4)),
            fiber: rat_frac(-1, 2),
        };
        let x_far = m.cross_point(&x, &cross).unwrap();
        let y = PointCoord {
            addr: addr1,
            pos: BasePos::Vertex(m.piece(1).spine.parse_walk(&["b".into()]).unwrap()),
            fiber: rat_frac(1, 4),
        };
        let exact = m.chart_dist_l2(1, &x_far, &y);
        let d = approx_distance(&m, &x, &y, 0.05).unwrap();
        assert!(d >= exact - 1e-9, "oracle never undercuts: {d} vs {exact}");
        assert!(d <= exact + 0.06, "oracle within O(res): {d} vs {exact}");
    }

    #[test]
    fn oracle_bounded_by_special_path_and_lower_bound() {
        let m = model();
        let gap = m.min_wall_separation(3).unwrap().gap;
        for i in 0..40u64 {
            let mut rng = fork(5, i);
            let x = random_point(&mut rng, &m, 2, 2);
            let y = random_point(&mut rng, &m, 3, 2);
            let path = special_path(&m, &x, &y).unwrap();
            let d = approx_distance(&m, &x, &y, 0.25).unwrap();
            assert!(
                d <= path.length_l2(&m) + 1e-9,
                "oracle exceeds special path: {d} vs {}",
                path.length_l2(&m)
            );
            let lb = crate::paths::distance_lower_bound(&m, &gap, &x, &y);
            assert!(d >= lb - 1e-9, "oracle {d} under lower bound {lb}");
        }
    }

    #[test]
    fn halving_resolution_never_increases_value() {
        let m = model();
        for i in 0..25u64 {
            let mut rng = fork(17, i);
            let x = random_point(&mut rng, &m, 2, 2);
            let y = random_point(&mut rng, &m, 3, 2);
            let c = approx_distance(&m, &x, &y, 0.5).unwrap();
            let f = approx_distance(&m, &x, &y, 0.25).unwrap();
            let f2 = approx_distance(&m, &x, &y, 0.125).unwrap();
            assert!(f <= c + 1e-9);
            assert!(f2 <= f + 1e-9);
        }
    }

    #[test]
    fn single_piece_paths_are_geodesic() {
        let m = model();
        let mut worst: f64 = 1.0;
        for i in 0..100u64 {
            let mut rng = fork(23, i);
            let x = random_point(&mut rng, &m, 0, 3);
            let y = random_point(&mut rng, &m, 0, 3);
            let path = special_path(&m, &x, &y).unwrap();
            let d = approx_distance(&m, &x, &y, 0.25).unwrap();
            if d > 1e-9 {
                worst = worst.max(path.length_l2(&m) / d);
            }
        }
        assert!((worst - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qg_fit_report_is_deterministic() {
        let m = model();
        let a = qg_fit(&m, 42, 60, 6, 0.25).unwrap();
        let b = qg_fit(&m, 42, 60, 6, 0.25).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert!(a.kappa >= 1.0);
        assert!(a.kappa < 10.0, "kappa stays desk-scale: {}", a.kappa);
    }
}
