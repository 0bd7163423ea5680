//! Manifold spec files: schema, parsing, and validation.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::num::{parse_rat, rat_display, rat_from_f64, rat_int, Rat};
use crate::spine::{
    cyclic_reduce, invert_walk, is_proper_power_cyclic, is_reduced, reduce_walk, SpineGraph, Walk,
};

/// One boundary cycle with its based-loop data.
#[derive(Clone, Debug)]
pub struct CycleData {
    /// The cycle as given: a cyclically reduced closed walk.
    pub walk: Walk,
    /// Start vertex of the walk.
    pub start: usize,
    /// Connecting path from the base vertex to `start`.
    pub conn: Walk,
    /// Loop at the base vertex representing the cycle's conjugacy class.
    pub based_loop: Walk,
}

#[derive(Clone, Debug)]
pub struct PieceSpec {
    pub spine: SpineGraph,
    pub cycles: Vec<CycleData>,
    /// Edge length of the scaled spine tree.
    pub base_scale: Rat,
    /// Fiber translation of the fiber generator.
    pub fiber_period: Rat,
}

#[derive(Clone, Debug)]
pub struct GluingSpec {
    pub from: (usize, usize),
    pub to: (usize, usize),
    /// Wall-chart offsets (sigma, tau): crossing forward maps
    /// (s, t) -> (t + sigma, s + tau).
    pub offset_s: Rat,
    pub offset_t: Rat,
}

#[derive(Clone, Debug)]
pub struct FlipManifoldSpec {
    pub pieces: Vec<PieceSpec>,
    pub gluings: Vec<GluingSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Num(f64),
    Str(String),
}

impl NumOrStr {
    fn to_rat(&self) -> Result<Rat> {
        match self {
            NumOrStr::Num(x) => rat_from_f64(*x),
            NumOrStr::Str(s) => parse_rat(s),
        }
    }
}

#[derive(Deserialize)]
struct RawSpine {
    vertices: usize,
    edges: Vec<(usize, usize, String)>,
}

#[derive(Deserialize)]
struct RawPiece {
    spine: RawSpine,
    boundary_cycles: Vec<Vec<String>>,
    base_scale: NumOrStr,
    fiber_period: NumOrStr,
}

#[derive(Deserialize)]
struct RawGluing {
    from: (usize, usize),
    to: (usize, usize),
    #[serde(default)]
    offsets: Option<(NumOrStr, NumOrStr)>,
}

#[derive(Deserialize)]
struct RawSpec {
    pieces: Vec<RawPiece>,
    gluings: Vec<RawGluing>,
}

/// Parses and validates a manifold spec file.
pub fn load_spec(text: &str) -> Result<FlipManifoldSpec> {
    let raw: RawSpec =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec file: {e}")))?;
    let mut pieces = Vec::new();
    for (pi, rp) in raw.pieces.iter().enumerate() {
        pieces.push(build_piece(pi, rp)?);
    }
    let mut gluings = Vec::new();
    for rg in &raw.gluings {
        let (offset_s, offset_t) = match &rg.offsets {
            Some((s, t)) => (s.to_rat()?, t.to_rat()?),
            None => (rat_int(0), rat_int(0)),
        };
        gluings.push(GluingSpec {
            from: rg.from,
            to: rg.to,
            offset_s,
            offset_t,
        });
    }
    let spec = FlipManifoldSpec { pieces, gluings };
    validate(&spec)?;
    Ok(spec)
}

fn build_piece(pi: usize, rp: &RawPiece) -> Result<PieceSpec> {
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for (a, b, label) in &rp.spine.edges {
        if *a >= rp.spine.vertices || *b >= rp.spine.vertices {
            return Err(Error::Parse(format!(
                "piece {pi}: edge {label:?} references a vertex out of range"
            )));
        }
        if labels.contains(label) {
            return Err(Error::Parse(format!(
                "piece {pi}: duplicate edge label {label:?}"
            )));
        }
        labels.push(label.clone());
        edges.push((*a, *b));
    }
    let spine = SpineGraph {
        vertex_count: rp.spine.vertices,
        edges,
        labels,
    };
    let mut cycles = Vec::new();
    for (ci, tokens) in rp.boundary_cycles.iter().enumerate() {
        let walk = spine.parse_walk(tokens)?;
        cycles.push(build_cycle(pi, ci, &spine, walk)?);
    }
    Ok(PieceSpec {
        spine,
        cycles,
        base_scale: rp.base_scale.to_rat()?,
        fiber_period: rp.fiber_period.to_rat()?,
    })
}

pub(crate) fn build_cycle(
    pi: usize,
    ci: usize,
    spine: &SpineGraph,
    walk: Walk,
) -> Result<CycleData> {
    if walk.is_empty() {
        return Err(Error::BadBoundaryCycle {
            piece: pi,
            cycle: ci,
            reason: "empty cycle".into(),
        });
    }
    let start = spine.step_src(walk[0]);
    match spine.walk_end(start, &walk) {
        Some(end) if end == start => {}
        _ => {
            return Err(Error::BadBoundaryCycle {
                piece: pi,
                cycle: ci,
                reason: "walk is not a closed edge path".into(),
            })
        }
    }
    if !is_reduced(&walk) || walk.first() == walk.last().map(|s| s.inverse()).as_ref() {
        return Err(Error::BadBoundaryCycle {
            piece: pi,
            cycle: ci,
            reason: "walk is not cyclically reduced".into(),
        });
    }
    let conn = spine.shortest_path(0, start);
    let based_loop = reduce_walk(&[conn.clone(), walk.clone(), invert_walk(&conn)].concat());
    let (core, _) = cyclic_reduce(&based_loop);
    if core.is_empty() {
        return Err(Error::BadBoundaryCycle {
            piece: pi,
            cycle: ci,
            reason: "cycle is null-homotopic".into(),
        });
    }
    if is_proper_power_cyclic(&core) {
        return Err(Error::BadBoundaryCycle {
            piece: pi,
            cycle: ci,
            reason: "cycle is a proper power; its wall elevations would coincide".into(),
        });
    }
    Ok(CycleData {
        walk,
        start,
        conn,
        based_loop,
    })
}

fn cyclic_words_equal(a: &[crate::spine::Step], b: &[crate::spine::Step]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    if n == 0 {
        return true;
    }
    (0..n).any(|r| (0..n).all(|i| a[i] == b[(i + r) % n]))
}

fn validate(spec: &FlipManifoldSpec) -> Result<()> {
    if spec.pieces.is_empty() {
        return Err(Error::Parse("spec has no pieces".into()));
    }
    for (pi, piece) in spec.pieces.iter().enumerate() {
        if !piece.spine.is_connected() {
            return Err(Error::SpineDisconnected { piece: pi });
        }
        let betti = piece.spine.betti();
        if betti < 2 {
            return Err(Error::BettiTooSmall { piece: pi, betti });
        }
        if piece.cycles.is_empty() {
            return Err(Error::BadBoundaryCycle {
                piece: pi,
                cycle: 0,
                reason: "piece has no boundary cycles".into(),
            });
        }
        if piece.base_scale <= rat_int(0) || piece.fiber_period <= rat_int(0) {
            return Err(Error::Parse(format!(
                "piece {pi}: base_scale and fiber_period must be positive"
            )));
        }
        // Distinct cycles must define distinct wall families.
        for i in 0..piece.cycles.len() {
            for j in (i + 1)..piece.cycles.len() {
                let (ci, _) = cyclic_reduce(&piece.cycles[i].based_loop);
                let (cj, _) = cyclic_reduce(&piece.cycles[j].based_loop);
                if cyclic_words_equal(&ci, &cj) || cyclic_words_equal(&ci, &invert_walk(&cj)) {
                    return Err(Error::BadBoundaryCycle {
                        piece: pi,
                        cycle: j,
                        reason: format!("conjugate to boundary cycle {i}; walls would coincide"),
                    });
                }
            }
        }
    }
    // Perfect matching on (piece, cycle) ends.
    let mut refs: std::collections::HashMap<(usize, usize), usize> = Default::default();
    for (gi, g) in spec.gluings.iter().enumerate() {
        if g.from == g.to {
            return Err(Error::DegenerateGluing(gi));
        }
        for end in [g.from, g.to] {
            if end.0 >= spec.pieces.len() || end.1 >= spec.pieces[end.0].cycles.len() {
                return Err(Error::Parse(format!(
                    "gluing {gi}: end ({}, {}) out of range",
                    end.0, end.1
                )));
            }
            *refs.entry(end).or_insert(0) += 1;
        }
    }
    for (pi, piece) in spec.pieces.iter().enumerate() {
        for ci in 0..piece.cycles.len() {
            let count = refs.get(&(pi, ci)).copied().unwrap_or(0);
            if count != 1 {
                return Err(Error::UnmatchedCycle {
                    piece: pi,
                    cycle: ci,
                    count,
                });
            }
        }
    }
    // Flip compatibility: scaled cycle length matches the partner fiber period.
    for (gi, g) in spec.gluings.iter().enumerate() {
        for (here, there) in [(g.from, g.to), (g.to, g.from)] {
            let p = &spec.pieces[here.0];
            let len = p.base_scale.clone() * rat_int(p.cycles[here.1].walk.len() as i64);
            let partner = &spec.pieces[there.0].fiber_period;
            if &len != partner {
                return Err(Error::FlipIncompatible {
                    gluing: gi,
                    cycle_len: rat_display(&len),
                    fiber_period: rat_display(partner),
                });
            }
        }
    }
    Ok(())
}

impl FlipManifoldSpec {
    pub fn piece(&self, i: usize) -> &PieceSpec {
        &self.pieces[i]
    }

    pub fn cycle(&self, piece: usize, cycle: usize) -> &CycleData {
        &self.pieces[piece].cycles[cycle]
    }
}

/// Built-in spec: two wedge-of-two-circles pieces with commutator boundaries,
/// base scale 1/4 and fiber period 1, joined by a single flip gluing.
pub fn two_piece_reference() -> FlipManifoldSpec {
    load_spec(TWO_PIECE_JSON).expect("reference spec is valid")
}

pub const TWO_PIECE_JSON: &str = r#"{
  "pieces": [
    {
      "spine": {"vertices": 1, "edges": [[0, 0, "a"], [0, 0, "b"]]},
      "boundary_cycles": [["a", "b", "a^-1", "b^-1"]],
      "base_scale": "1/4",
      "fiber_period": "1"
    },
    {
      "spine": {"vertices": 1, "edges": [[0, 0, "a"], [0, 0, "b"]]},
      "boundary_cycles": [["a", "b", "a^-1", "b^-1"]],
      "base_scale": "1/4",
      "fiber_period": "1"
    }
  ],
  "gluings": [
    {"from": [0, 0], "to": [1, 0], "offsets": [0, 0]}
  ]
}"#;

/// Built-in spec: one wedge-of-two-circles piece whose two one-edge boundary
/// cycles are flip-glued to each other (an HNN-style fixture).
pub fn self_glued_reference() -> FlipManifoldSpec {
    load_spec(SELF_GLUED_JSON).expect("reference spec is valid")
}

pub const SELF_GLUED_JSON: &str = r#"{
  "pieces": [
    {
      "spine": {"vertices": 1, "edges": [[0, 0, "a"], [0, 0, "b"]]},
      "boundary_cycles": [["a"], ["b"]],
      "base_scale": "1",
      "fiber_period": "1"
    }
  ],
  "gluings": [
    {"from": [0, 0], "to": [0, 1], "offsets": [0, 0]}
  ]
}"#;
