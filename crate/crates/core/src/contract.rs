//! Contracting-projection tests on candidate subsets.
//!
//! A subset is stored as bounded per-chart slices over a connected dual
//! subtree. Projection sends a point to the slice center of the dual-nearest
//! chart. The contraction test checks that whenever two projections are far
//! apart, every special path between the sampled points passes close to both
//! projections; a full wall plane serves as the flat negative control.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::flip::model::{CopyAddress, Crossing, Model, PointCoord, WallId};
use crate::flip::tree::BasePos;
use crate::num::{rat_to_f64, Rat};
use crate::oracle::{approx_distance_with, OracleOptions};
use crate::paths::{distance_lower_bound, segment_point_dist, special_path, Metric, SpecialPath};
use crate::sampling::{fork, random_dyadic, random_walk};
use crate::spine::{concat_reduce, reduce_walk};
use crate::words::GroupWord;

/// Bounded slice of the subset inside one chart.
#[derive(Clone, Debug)]
pub struct SliceData {
    pub chart: CopyAddress,
    pub center: PointCoord,
    pub points: Vec<PointCoord>,
    pub diameter: f64,
}

#[derive(Clone, Debug)]
pub struct WallDisc {
    pub wall: WallId,
    pub center: PointCoord,
    pub radius: f64,
}

/// A subset satisfying the bounded-slice and dual-subtree hypotheses.
#[derive(Clone, Debug)]
pub struct SubsetModel {
    pub slices: Vec<SliceData>,
    pub chart_lookup: HashMap<CopyAddress, usize>,
    /// Maximum slice diameter.
    pub delta: f64,
    pub wall_discs: Vec<WallDisc>,
}

impl SubsetModel {
    pub fn slice_of(&self, chart: &CopyAddress) -> Option<&SliceData> {
        self.chart_lookup.get(chart).map(|&i| &self.slices[i])
    }

    /// Dual-tree distance from a chart to the subset's subtree.
    pub fn dual_gap(&self, model: &Model, chart: &CopyAddress) -> usize {
        self.slices
            .iter()
            .map(|s| model.dual_distance(&s.chart, chart))
            .min()
            .unwrap_or(usize::MAX)
    }
}

/// Builds the axis subset of a Morse element: the union of special paths
/// between consecutive orbit points of the basepoint, bucketed per chart.
pub fn subset_from_morse(
    model: &Model,
    g: &GroupWord,
    basepoint: &PointCoord,
    steps: usize,
) -> Result<SubsetModel> {
    if !model.is_morse(g)? {
        return Err(Error::NotMorse);
    }
    let mut orbit = Vec::with_capacity(2 * steps + 2);
    let mut fwd = basepoint.clone();
    let mut bwd = basepoint.clone();
    orbit.push(basepoint.clone());
    let ginv = g.inverse();
    for _ in 0..steps + 1 {
        fwd = model.act_on_point(g, &fwd)?;
        orbit.push(fwd.clone());
    }
    for _ in 0..steps {
        bwd = model.act_on_point(&ginv, &bwd)?;
        orbit.insert(0, bwd.clone());
    }
    let mut slices: Vec<SliceData> = Vec::new();
    let mut chart_lookup: HashMap<CopyAddress, usize> = HashMap::new();
    let mut discs: HashMap<WallId, Vec<PointCoord>> = HashMap::new();
    let mut disc_order: Vec<WallId> = Vec::new();
    fn add_point(
        slices: &mut Vec<SliceData>,
        chart_lookup: &mut HashMap<CopyAddress, usize>,
        p: &PointCoord,
    ) {
        let idx = *chart_lookup.entry(p.addr.clone()).or_insert_with(|| {
            slices.push(SliceData {
                chart: p.addr.clone(),
                center: p.clone(),
                points: Vec::new(),
                diameter: 0.0,
            });
            slices.len() - 1
        });
        if !slices[idx].points.contains(p) {
            slices[idx].points.push(p.clone());
        }
    }
    for pair in orbit.windows(2) {
        let path = special_path(model, &pair[0], &pair[1])?;
        for (a, b) in &path.segments {
            add_point(&mut slices, &mut chart_lookup, a);
            add_point(&mut slices, &mut chart_lookup, b);
        }
        let (_, chain) = crate::paths::chain_charts(model, &pair[0], &pair[1]);
        for (k, wall_point) in path.walls.iter().enumerate() {
            let (here, _, _) = model.wall_sides(&chain[k].0, &chain[k].1)?;
            if !discs.contains_key(&here) {
                disc_order.push(here.clone());
            }
            discs
                .entry(here)
                .or_default()
                .push(wall_point.before.clone());
        }
    }
    for slice in &mut slices {
        let piece = model.piece_of_addr(&slice.chart)?;
        let mut diam: f64 = 0.0;
        for i in 0..slice.points.len() {
            for j in (i + 1)..slice.points.len() {
                diam = diam.max(model.chart_dist_l2(piece, &slice.points[i], &slice.points[j]));
            }
        }
        slice.diameter = diam;
    }
    // The dual subtree is a union of end-to-end geodesics, hence connected.
    for slice in &slices {
        if slice.chart.is_empty() {
            continue;
        }
        let has_neighbor = slices
            .iter()
            .any(|s| model.dual_distance(&s.chart, &slice.chart) == 1);
        if !has_neighbor {
            return Err(Error::Inconsistency(
                "axis subset charts are not dual-connected".into(),
            ));
        }
    }
    let delta = slices.iter().map(|s| s.diameter).fold(0.0f64, f64::max);
    let wall_discs = disc_order
        .into_iter()
        .map(|wall| {
            let pts = &discs[&wall];
            let piece = model.piece_of_addr(&wall.owner).expect("wall chart valid");
            let center = pts[0].clone();
            let radius = pts
                .iter()
                .map(|p| model.chart_dist_l2(piece, &center, p))
                .fold(0.0f64, f64::max);
            WallDisc {
                wall,
                center,
                radius,
            }
        })
        .collect();
    Ok(SubsetModel {
        slices,
        chart_lookup,
        delta,
        wall_discs,
    })
}

/// Projection: dual-nearest chart's slice center. Deterministic; factors
/// through the dual-tree vertex of the argument.
pub fn ps_projection(model: &Model, subset: &SubsetModel, x: &PointCoord) -> PointCoord {
    let mut best = (usize::MAX, 0usize);
    for (i, slice) in subset.slices.iter().enumerate() {
        let d = model.dual_distance(&slice.chart, &x.addr);
        if d < best.0 {
            best = (d, i);
        }
    }
    subset.slices[best.1].center.clone()
}

/// Upper bound on the distance from p to the subset: nearest slice points of
/// dual-nearby charts, exact in p's own chart and oracle-measured otherwise.
pub fn dist_to_subset_upper(
    model: &Model,
    subset: &SubsetModel,
    p: &PointCoord,
    opts: &OracleOptions,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    let near = subset.dual_gap(model, &p.addr);
    for slice in &subset.slices {
        let d = model.dual_distance(&slice.chart, &p.addr);
        if d > near + 2 {
            continue;
        }
        if d == 0 {
            let piece = model.piece_of_addr(&p.addr)?;
            for q in &slice.points {
                best = best.min(model.chart_dist_l2(piece, p, q));
            }
        } else {
            best = best.min(approx_distance_with(model, p, &slice.center, opts)?.value);
        }
    }
    Ok(best)
}

/// Lower bound on the distance from p to the subset.
pub fn dist_to_subset_lower(model: &Model, subset: &SubsetModel, gap: &Rat, p: &PointCoord) -> f64 {
    let near = subset.dual_gap(model, &p.addr);
    if near == 0 {
        return 0.0;
    }
    rat_to_f64(gap) * (near as f64 - 1.0).max(0.0)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ContractionWitness {
    pub sample_index: u64,
    pub measured: f64,
    pub constant: f64,
    pub side: &'static str,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ContractionReport {
    pub passed: bool,
    pub constant: f64,
    pub samples: u64,
    pub triggered: u64,
    pub vacuous: bool,
    pub condition1_max: f64,
    pub max_projection_gap: f64,
    pub violations: u64,
    pub witness: Option<ContractionWitness>,
    pub seed: u64,
}

/// Distance from a projection point to a special path, bounded from above:
/// exact in the projection's chart, oracle-measured on nearby breakpoints.
fn dist_point_to_path_upper(
    model: &Model,
    p: &PointCoord,
    path: &SpecialPath,
    budget: f64,
    opts: &OracleOptions,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (a, b) in &path.segments {
        if a.addr == p.addr {
            best = best.min(segment_point_dist(model, a, b, p, Metric::L2));
            if best <= budget {
                return Ok(best);
            }
        }
    }
    let mut candidates: Vec<(usize, PointCoord)> = Vec::new();
    for (a, b) in &path.segments {
        let d = model.dual_distance(&a.addr, &p.addr);
        if d <= 4 {
            candidates.push((d, a.clone()));
            let mid = PointCoord {
                addr: a.addr.clone(),
                pos: a.pos.clone(),
                fiber: (a.fiber.clone() + b.fiber.clone()) / crate::num::rat_int(2),
            };
            candidates.push((d, mid));
            candidates.push((d, b.clone()));
        }
    }
    candidates.sort_by_key(|(d, _)| *d);
    for (_, q) in candidates {
        if q.addr == p.addr {
            let piece = model.piece_of_addr(&p.addr)?;
            best = best.min(model.chart_dist_l2(piece, p, &q));
        } else {
            best = best.min(approx_distance_with(model, p, &q, opts)?.value);
        }
        if best <= budget {
            return Ok(best);
        }
    }
    Ok(best)
}

/// Samples a point in the tube around a random slice of the subset.
pub fn sample_near_subset(
    rng: &mut impl Rng,
    model: &Model,
    subset: &SubsetModel,
    base_jitter: usize,
    fiber_jitter: i64,
) -> PointCoord {
    let slice = &subset.slices[rng.gen_range(0..subset.slices.len())];
    let center = &slice.center;
    let piece = model.piece_of_addr(&center.addr).expect("chart valid");
    let spine = &model.piece(piece).spine;
    let len = rng.gen_range(0..=base_jitter);
    let start = center.pos.spine_vertex(model.piece(piece));
    let jitter = random_walk(rng, spine, start, len);
    let pos = match &center.pos {
        BasePos::Vertex(v) => BasePos::Vertex(reduce_walk(&concat_reduce(v, &jitter))),
        BasePos::Edge { from, .. } => BasePos::Vertex(reduce_walk(&concat_reduce(from, &jitter))),
    };
    PointCoord {
        addr: center.addr.clone(),
        pos,
        fiber: center.fiber.clone() + random_dyadic(rng, fiber_jitter),
    }
}

/// Contraction test against the subset's projection.
pub fn check_contracting(
    model: &Model,
    subset: &SubsetModel,
    constant: f64,
    samples: u64,
    seed: u64,
) -> Result<ContractionReport> {
    let opts = OracleOptions::default();
    let gap = model.min_wall_separation(3)?.gap;
    // Condition (1): subset points project within the constant.
    let mut condition1_max: f64 = 0.0;
    for slice in &subset.slices {
        let piece = model.piece_of_addr(&slice.chart)?;
        for p in &slice.points {
            condition1_max = condition1_max.max(model.chart_dist_l2(piece, p, &slice.center));
        }
    }
    let mut report = ContractionReport {
        passed: condition1_max <= constant,
        constant,
        samples,
        triggered: 0,
        vacuous: true,
        condition1_max,
        max_projection_gap: 0.0,
        violations: 0,
        witness: None,
        seed,
    };
    for i in 0..samples {
        let mut rng = fork(seed, i);
        let x = sample_near_subset(&mut rng, model, subset, 3, 2);
        let y = sample_near_subset(&mut rng, model, subset, 3, 2);
        let px = ps_projection(model, subset, &x);
        let py = ps_projection(model, subset, &y);
        // Trigger only when the projections are certified far apart.
        let lb = distance_lower_bound(model, &gap, &px, &py);
        if lb < constant {
            continue;
        }
        report.triggered += 1;
        report.vacuous = false;
        let path = special_path(model, &x, &y)?;
        for (p, side) in [(&px, "start"), (&py, "end")] {
            let measured = dist_point_to_path_upper(model, p, &path, constant, &opts)?;
            if measured.is_finite() {
                report.max_projection_gap = report.max_projection_gap.max(measured);
            }
            if measured > constant {
                report.violations += 1;
                report.passed = false;
                if report.witness.is_none() {
                    report.witness = Some(ContractionWitness {
                        sample_index: i,
                        measured,
                        constant,
                        side,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// A single wall plane, the flat negative control.
#[derive(Clone, Debug)]
pub struct PlaneSubset {
    pub chart: CopyAddress,
    pub crossing: Crossing,
}

pub struct PlaneProjector {
    plane: PlaneSubset,
    here: WallId,
    neighbor: CopyAddress,
}

impl PlaneSubset {
    pub fn projector(&self, model: &Model) -> Result<PlaneProjector> {
        let (here, _, neighbor) = model.wall_sides(&self.chart, &self.crossing)?;
        Ok(PlaneProjector {
            plane: self.clone(),
            here,
            neighbor,
        })
    }
}

impl PlaneProjector {
    /// Nearest-point projection onto the plane, expressed in the owner chart.
    /// Defined for points of the two adjacent charts.
    pub fn project(&self, model: &Model, x: &PointCoord) -> Result<PointCoord> {
        if x.addr == self.plane.chart {
            let mut line = model.line_of_wall(&self.here)?;
            let (foot, _) = line.project(&x.pos);
            Ok(PointCoord {
                addr: x.addr.clone(),
                pos: foot,
                fiber: x.fiber.clone(),
            })
        } else if x.addr == self.neighbor {
            let back = Crossing {
                gluing: self.plane.crossing.gluing,
                forward: !self.plane.crossing.forward,
                coset: Vec::new(),
            };
            let (far_wall, _, _) = model.wall_sides(&self.neighbor, &back)?;
            let mut line = model.line_of_wall(&far_wall)?;
            let (foot, _) = line.project(&x.pos);
            let on_wall = PointCoord {
                addr: x.addr.clone(),
                pos: foot,
                fiber: x.fiber.clone(),
            };
            model.cross_point(&on_wall, &back)
        } else {
            Err(Error::NotOnWall)
        }
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PlaneControlReport {
    pub constant: f64,
    pub samples: u64,
    pub triggered: u64,
    pub violations: u64,
    pub sampled_diameter: f64,
    pub witness: Option<ContractionWitness>,
    pub seed: u64,
}

/// Negative control: sample points off a wall plane on both sides and check
/// how the nearest-point projection fails the contraction condition. All
/// distances here are exact (the two charts and the plane are convex).
pub fn check_plane_control(
    model: &Model,
    plane: &PlaneSubset,
    constant: f64,
    samples: u64,
    extent: i64,
    seed: u64,
) -> Result<PlaneControlReport> {
    let projector = plane.projector(model)?;
    let (here, _, neighbor) = model.wall_sides(&plane.chart, &plane.crossing)?;
    let owner_piece = model.piece_of_addr(&plane.chart)?;
    let back = Crossing {
        gluing: plane.crossing.gluing,
        forward: !plane.crossing.forward,
        coset: Vec::new(),
    };
    let mut report = PlaneControlReport {
        constant,
        samples,
        triggered: 0,
        violations: 0,
        sampled_diameter: 0.0,
        witness: None,
        seed,
    };
    for i in 0..samples {
        let mut rng = fork(seed, i);
        let x = sample_off_plane(&mut rng, model, &here, extent)?;
        let (far_wall, _, _) = model.wall_sides(&neighbor, &back)?;
        let y = sample_off_plane(&mut rng, model, &far_wall, extent)?;
        let px = projector.project(model, &x)?;
        let py = projector.project(model, &y)?;
        let d_proj = model.chart_dist_l2(owner_piece, &px, &py);
        report.sampled_diameter = report.sampled_diameter.max(d_proj);
        if d_proj < constant {
            continue;
        }
        report.triggered += 1;
        let path = special_path(model, &x, &y)?;
        for (p, side) in [(&px, "start"), (&py, "end")] {
            let mut best = f64::INFINITY;
            for (a, b) in &path.segments {
                let q = if a.addr == p.addr {
                    p.clone()
                } else {
                    // p lies on the wall: transport into the segment's chart.
                    let dir = if a.addr == neighbor {
                        plane.crossing.clone()
                    } else {
                        back.clone()
                    };
                    let moved = model.cross_point(p, &dir)?;
                    if moved.addr != a.addr {
                        continue;
                    }
                    moved
                };
                best = best.min(segment_point_dist(model, a, b, &q, Metric::L2));
            }
            if best > constant {
                report.violations += 1;
                if report.witness.is_none() {
                    report.witness = Some(ContractionWitness {
                        sample_index: i,
                        measured: best,
                        constant,
                        side,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Point at extent-scale metric distance off a wall line, over a random arc.
fn sample_off_plane(
    rng: &mut impl Rng,
    model: &Model,
    wall: &WallId,
    extent: i64,
) -> Result<PointCoord> {
    let piece = model.piece_of_addr(&wall.owner)?;
    let spec = model.piece(piece);
    let scale = rat_to_f64(&spec.base_scale);
    let mut line = model.line_of_wall(wall)?;
    let arc_span = ((4 * extent) as f64 / scale).ceil() as i64;
    let k = rng.gen_range(-arc_span..=arc_span);
    let anchor = line.vertex(k);
    let unit = ((extent.max(1)) as f64 / scale).ceil() as usize;
    let depth = rng.gen_range(unit..=2 * unit);
    // March away from the line: the first step must leave it.
    let mut walk = anchor.clone();
    let mut placed = 0usize;
    let mut guard = 0usize;
    while placed < depth && guard < 40 * depth + 200 {
        guard += 1;
        let at = spec.spine.walk_end(0, &walk).unwrap();
        let step = random_walk(rng, &spec.spine, at, 1);
        if step.is_empty() {
            break;
        }
        let cand = concat_reduce(&walk, &step);
        if cand.len() <= walk.len() {
            continue;
        }
        if placed == 0 && line.vertex_index(&cand).is_some() {
            continue;
        }
        walk = cand;
        placed += 1;
    }
    Ok(PointCoord {
        addr: wall.owner.clone(),
        pos: BasePos::Vertex(walk),
        fiber: random_dyadic(rng, 4 * extent),
    })
}

/// Constants of the contraction data: R is derived as cbar^2 (1 + 2C).
#[derive(Clone, Debug, serde::Serialize)]
pub struct ContractionParams {
    pub c_const: f64,
    pub k_const: f64,
    pub cbar: f64,
    pub big_r: f64,
}

impl ContractionParams {
    pub fn new(c_const: f64, k_const: f64, lambda: f64) -> Self {
        let cbar = k_const.max(lambda).max(1.0);
        ContractionParams {
            c_const,
            k_const,
            cbar,
            big_r: cbar * cbar * (1.0 + 2.0 * c_const),
        }
    }

    /// Neighborhood radius every certified quasi-geodesic must respect.
    pub fn quasiconvexity_bound(&self) -> f64 {
        4.0 * self.cbar * self.cbar * (self.big_r + 2.0)
    }
}

/// Measures how far special paths between subset points stray from the
/// per-chart slices (the tube radius of the path family).
pub fn measure_tube_radius(
    model: &Model,
    subset: &SubsetModel,
    samples: u64,
    seed: u64,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let mut rng = fork(seed, i);
        let a = &subset.slices[rng.gen_range(0..subset.slices.len())];
        let b = &subset.slices[rng.gen_range(0..subset.slices.len())];
        let pa = a.points[rng.gen_range(0..a.points.len())].clone();
        let pb = b.points[rng.gen_range(0..b.points.len())].clone();
        let path = special_path(model, &pa, &pb)?;
        for (sa, sb) in &path.segments {
            let slice = match subset.slice_of(&sa.addr) {
                Some(s) => s,
                None => {
                    return Err(Error::Inconsistency(
                        "special path between subset points left the subtree".into(),
                    ))
                }
            };
            let piece = model.piece_of_addr(&sa.addr)?;
            for q in [sa, sb] {
                let d = slice
                    .points
                    .iter()
                    .map(|p| model.chart_dist_l2(piece, q, p))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BallProjReport {
    pub least_k: f64,
    pub samples: u64,
    pub skipped_small_radius: u64,
    pub seed: u64,
}

/// Sweeps for the least k satisfying both projection properties on samples:
/// d(x, pi(x)) <= k d(x, A) + k, and diam(pi(B_r(x))) <= C at
/// r = d(x, A)/k - k.
pub fn ball_projection_check(
    model: &Model,
    subset: &SubsetModel,
    c_const: f64,
    samples: u64,
    seed: u64,
) -> Result<BallProjReport> {
    let opts = OracleOptions::default();
    let gap = model.min_wall_separation(3)?.gap;
    struct Sample {
        d_pi: f64,
        d_lo: f64,
        d_up: f64,
        ball_diam_at: Vec<(f64, f64)>,
    }
    let mut data = Vec::new();
    for i in 0..samples {
        let mut rng = fork(seed, i);
        let x = sample_near_subset(&mut rng, model, subset, 5, 3);
        let px = ps_projection(model, subset, &x);
        let d_pi = if px.addr == x.addr {
            model.chart_dist_l2(model.piece_of_addr(&x.addr)?, &x, &px)
        } else {
            approx_distance_with(model, &x, &px, &opts)?.value
        };
        let d_lo = dist_to_subset_lower(model, subset, &gap, &x);
        let d_up = dist_to_subset_upper(model, subset, &x, &opts)?;
        let mut ball_diam_at = Vec::new();
        for r_steps in [1usize, 2, 4] {
            let r = r_steps as f64 * 0.5;
            let mut centers: Vec<PointCoord> = Vec::new();
            for _ in 0..6 {
                let piece = model.piece_of_addr(&x.addr)?;
                let spine = &model.piece(piece).spine;
                let start = x.pos.spine_vertex(model.piece(piece));
                let scale = rat_to_f64(&model.piece(piece).base_scale);
                let max_steps = (r / scale).floor() as usize;
                let len = rng.gen_range(0..=max_steps);
                let jitter = random_walk(&mut rng, spine, start, len);
                let pos = match &x.pos {
                    BasePos::Vertex(v) => BasePos::Vertex(reduce_walk(&concat_reduce(v, &jitter))),
                    BasePos::Edge { from, .. } => {
                        BasePos::Vertex(reduce_walk(&concat_reduce(from, &jitter)))
                    }
                };
                let y = PointCoord {
                    addr: x.addr.clone(),
                    pos,
                    fiber: x.fiber.clone(),
                };
                centers.push(ps_projection(model, subset, &y));
            }
            let mut diam: f64 = 0.0;
            for a in 0..centers.len() {
                for b in (a + 1)..centers.len() {
                    let d = if centers[a].addr == centers[b].addr {
                        model.chart_dist_l2(
                            model.piece_of_addr(&centers[a].addr)?,
                            &centers[a],
                            &centers[b],
                        )
                    } else {
                        approx_distance_with(model, &centers[a], &centers[b], &opts)?.value
                    };
                    diam = diam.max(d);
                }
            }
            ball_diam_at.push((r, diam));
        }
        data.push(Sample {
            d_pi,
            d_lo,
            d_up,
            ball_diam_at,
        });
    }
    let mut skipped = 0u64;
    let grid: Vec<f64> = (1..=80).map(|j| j as f64 * 0.5).collect();
    let mut least_k = f64::INFINITY;
    'sweep: for &k in &grid {
        skipped = 0;
        for s in &data {
            if s.d_pi > k * s.d_lo + k {
                continue 'sweep;
            }
            let r_allow = s.d_up / k - k;
            if r_allow <= 0.0 {
                skipped += 1;
                continue;
            }
            for &(r, diam) in &s.ball_diam_at {
                if r <= r_allow && diam > c_const {
                    continue 'sweep;
                }
            }
        }
        least_k = k;
        break;
    }
    Ok(BallProjReport {
        least_k,
        samples,
        skipped_small_radius: skipped,
        seed,
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct QcRadiusReport {
    pub measured: f64,
    pub bound: f64,
    pub lambda: f64,
    pub certified: u64,
    pub attempted: u64,
    pub seed: u64,
}

/// Generates detoured paths with endpoints on the subset, certifies each as
/// a (lambda, lambda)-quasi-geodesic against certified distance lower
/// bounds, and measures the farthest excursion from the subset.
pub fn quasiconvexity_radius(
    model: &Model,
    subset: &SubsetModel,
    lambda: f64,
    params: &ContractionParams,
    samples: u64,
    seed: u64,
) -> Result<QcRadiusReport> {
    let opts = OracleOptions::default();
    // Certification legs can span the whole detoured path.
    let cert_opts = OracleOptions {
        resolution: 0.25,
        max_walls: 96,
        max_nodes: 4_000_000,
    };
    let gap = model.min_wall_separation(3)?.gap;
    let mut measured: f64 = 0.0;
    let mut certified = 0u64;
    let n = subset.slices.len();
    if n < 8 {
        return Err(Error::NoCertifiedSamples);
    }
    for i in 0..samples {
        let mut rng = fork(seed, i);
        let ia = rng.gen_range(0..n / 3);
        let ib = rng.gen_range(2 * n / 3..n);
        let a = subset.slices[ia].center.clone();
        let b = subset.slices[ib].center.clone();
        let mid_idx = (ia + ib) / 2;
        let detour = (lambda * subset.delta).max(1.0) as i64;
        let mut mid = sample_near_slice(&mut rng, model, subset, mid_idx, detour);
        mid.fiber = mid.fiber + random_dyadic(&mut rng, detour);
        let p1 = special_path(model, &a, &mid)?;
        let p2 = special_path(model, &mid, &b)?;
        // Breakpoints and cumulative lengths of the concatenation.
        let mut pts: Vec<PointCoord> = Vec::new();
        let mut cum: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (path, skip_first) in [(&p1, false), (&p2, true)] {
            let mut local = vec![path.start.clone()];
            local.extend(path.walls.iter().map(|w| w.before.clone()));
            local.push(path.end.clone());
            for (j, p) in local.iter().enumerate() {
                if skip_first && j == 0 {
                    continue;
                }
                if j > 0 {
                    let (sa, sb) = &path.segments[j - 1];
                    let piece = model.piece_of_addr(&sa.addr)?;
                    acc += model.chart_dist_l2(piece, sa, sb);
                }
                pts.push(p.clone());
                cum.push(acc);
            }
        }
        // Certify at dyadic index gaps.
        let mut ok = true;
        let mut span = 1usize;
        'cert: while span < pts.len() {
            for s in (0..pts.len() - span).step_by(span) {
                let (u, v) = (&pts[s], &pts[s + span]);
                let seg_len = cum[s + span] - cum[s];
                if seg_len <= lambda {
                    continue;
                }
                let d_lb = if u.addr == v.addr {
                    model.chart_dist_l2(model.piece_of_addr(&u.addr)?, u, v)
                } else {
                    let cheap = distance_lower_bound(model, &gap, u, v);
                    if seg_len <= lambda * cheap + lambda {
                        cheap
                    } else {
                        let o = approx_distance_with(model, u, v, &cert_opts)?;
                        (o.value - o.walls as f64 * cert_opts.resolution).max(cheap)
                    }
                };
                if seg_len > lambda * d_lb + lambda {
                    ok = false;
                    break 'cert;
                }
            }
            span *= 2;
        }
        if !ok {
            continue;
        }
        certified += 1;
        for p in &pts {
            let d = dist_to_subset_upper(model, subset, p, &opts)?;
            measured = measured.max(d);
        }
    }
    if certified == 0 {
        return Err(Error::NoCertifiedSamples);
    }
    Ok(QcRadiusReport {
        measured,
        bound: params.quasiconvexity_bound(),
        lambda,
        certified,
        attempted: samples,
        seed,
    })
}

fn sample_near_slice(
    rng: &mut impl Rng,
    model: &Model,
    subset: &SubsetModel,
    idx: usize,
    jitter: i64,
) -> PointCoord {
    let slice = &subset.slices[idx];
    let piece = model.piece_of_addr(&slice.chart).expect("chart valid");
    let spec = model.piece(piece);
    let scale = rat_to_f64(&spec.base_scale);
    let steps = ((jitter as f64) / scale).floor() as usize;
    let start = slice.center.pos.spine_vertex(spec);
    let len = rng.gen_range(0..=steps.min(6));
    let jw = random_walk(rng, &spec.spine, start, len);
    let pos = match &slice.center.pos {
        BasePos::Vertex(v) => BasePos::Vertex(reduce_walk(&concat_reduce(v, &jw))),
        BasePos::Edge { from, .. } => BasePos::Vertex(reduce_walk(&concat_reduce(from, &jw))),
    };
    PointCoord {
        addr: slice.chart.clone(),
        pos,
        fiber: slice.center.fiber.clone(),
    }
}
