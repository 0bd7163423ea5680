//! Words in the fundamental group of the glued manifold.
//!
//! Vertex groups are (spine free group) x (fiber Z); one stable letter per
//! gluing. Britton reduction rewrites pinches t^e u t^-e through the flip
//! isomorphism of edge groups: the boundary generator on one side conjugates
//! to the fiber generator on the other, and vice versa.

use crate::error::{Error, Result};
use crate::flip::model::{CopyAddress, Crossing, Model, PointCoord};
use crate::flip::tree::translate_pos;
use crate::num::rat_int;
use crate::spine::{concat_reduce, coset_split, power_of, power_walk, reduce_walk, Walk};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Syllable {
    Vertex { piece: usize, walk: Walk, fiber: i64 },
    Stable { gluing: u32, inverse: bool },
}

impl Syllable {
    pub fn is_identity_vertex(&self) -> bool {
        matches!(self, Syllable::Vertex { walk, fiber, .. } if walk.is_empty() && *fiber == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupWord {
    pub syllables: Vec<Syllable>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn vertex(piece: usize, walk: Walk, fiber: i64) -> Self {
        GroupWord {
            syllables: vec![Syllable::Vertex { piece, walk, fiber }],
        }
    }

    pub fn stable(gluing: u32, inverse: bool) -> Self {
        GroupWord {
            syllables: vec![Syllable::Stable { gluing, inverse }],
        }
    }

    pub fn concat(words: &[&GroupWord]) -> Self {
        GroupWord {
            syllables: words
                .iter()
                .flat_map(|w| w.syllables.iter().cloned())
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        GroupWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| match s {
                    Syllable::Vertex { piece, walk, fiber } => Syllable::Vertex {
                        piece: *piece,
                        walk: crate::spine::invert_walk(walk),
                        fiber: -fiber,
                    },
                    Syllable::Stable { gluing, inverse } => Syllable::Stable {
                        gluing: *gluing,
                        inverse: !inverse,
                    },
                })
                .collect(),
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            out.syllables.extend(base.syllables.iter().cloned());
        }
        out
    }

    pub fn stable_count(&self) -> usize {
        self.syllables
            .iter()
            .filter(|s| matches!(s, Syllable::Stable { .. }))
            .count()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub reduced: GroupWord,
    pub stable_count: usize,
    /// Conjugator recorded during cyclic reduction:
    /// original = conjugator . reduced . conjugator^{-1}.
    pub conjugator: GroupWord,
}

impl Model {
    fn syllable_ends(&self, s: &Syllable) -> (usize, usize) {
        match s {
            Syllable::Vertex { piece, .. } => (*piece, *piece),
            Syllable::Stable { gluing, inverse } => {
                let g = &self.spec.gluings[*gluing as usize];
                if *inverse {
                    (g.to.0, g.from.0)
                } else {
                    (g.from.0, g.to.0)
                }
            }
        }
    }

    /// Start and end piece of the syllable path.
    pub fn word_path(&self, w: &GroupWord) -> Result<Option<(usize, usize)>> {
        let mut it = w.syllables.iter();
        let first = match it.next() {
            None => return Ok(None),
            Some(s) => s,
        };
        let (start, mut at) = self.syllable_ends(first);
        for s in it {
            let (a, b) = self.syllable_ends(s);
            if a != at {
                return Err(Error::MalformedWord(format!(
                    "syllable path breaks: expected piece {at}, found piece {a}"
                )));
            }
            at = b;
        }
        Ok(Some((start, at)))
    }

    fn require_loop_at(&self, w: &GroupWord, piece: usize) -> Result<()> {
        match self.word_path(w)? {
            None => Ok(()),
            Some((s, e)) if s == e && s == piece => Ok(()),
            Some((s, e)) => Err(Error::NotALoop {
                expected: piece,
                start: s,
                end: e,
            }),
        }
    }

    pub(crate) fn gamma(&self, piece: usize, cycle: usize) -> &Walk {
        &self.spec.pieces[piece].cycles[cycle].based_loop
    }

    /// Power p with walk = gamma^p, if the walk lies in the boundary line.
    fn boundary_power(&self, piece: usize, cycle: usize, walk: &Walk) -> Option<i64> {
        power_of(self.gamma(piece, cycle), walk)
    }

    /// One Britton pass: merges vertex syllables, drops identities, and
    /// rewrites the first pinch found. Returns true if anything changed.
    fn britton_pass(&self, syl: &mut Vec<Syllable>) -> Result<bool> {
        let mut changed = false;
        let mut i = 0;
        while i < syl.len() {
            if syl[i].is_identity_vertex() {
                syl.remove(i);
                changed = true;
                continue;
            }
            if i + 1 < syl.len() {
                if let (
                    Syllable::Vertex {
                        piece: p1,
                        walk: w1,
                        fiber: f1,
                    },
                    Syllable::Vertex {
                        piece: p2,
                        walk: w2,
                        fiber: f2,
                    },
                ) = (&syl[i], &syl[i + 1])
                {
                    if p1 != p2 {
                        return Err(Error::MalformedWord(
                            "adjacent vertex syllables of different pieces".into(),
                        ));
                    }
                    let merged = Syllable::Vertex {
                        piece: *p1,
                        walk: concat_reduce(w1, w2),
                        fiber: f1 + f2,
                    };
                    syl.splice(i..=i + 1, [merged]);
                    changed = true;
                    continue;
                }
            }
            i += 1;
        }
        for i in 0..syl.len() {
            let (g, inv) = match &syl[i] {
                Syllable::Stable { gluing, inverse } => (*gluing, *inverse),
                _ => continue,
            };
            let gl = &self.spec.gluings[g as usize];
            // Side the sandwiched element lives on, and the far side.
            let (mid_side, far_side) = if inv {
                (gl.from, gl.to)
            } else {
                (gl.to, gl.from)
            };
            for (j, mid) in [(i + 1, None), (i + 2, Some(i + 1))] {
                if j >= syl.len() {
                    continue;
                }
                let closes = matches!(
                    &syl[j],
                    Syllable::Stable { gluing, inverse } if *gluing == g && *inverse == !inv
                );
                if !closes {
                    continue;
                }
                let (walk_pow, fiber) = match mid {
                    None => (Some(0), 0),
                    Some(k) => match &syl[k] {
                        Syllable::Vertex { piece, walk, fiber } if *piece == mid_side.0 => {
                            (self.boundary_power(mid_side.0, mid_side.1, walk), *fiber)
                        }
                        _ => (None, 0),
                    },
                };
                let Some(p) = walk_pow else { continue };
                // Flip: boundary exponent becomes fiber exponent and back.
                let replacement = Syllable::Vertex {
                    piece: far_side.0,
                    walk: power_walk(self.gamma(far_side.0, far_side.1), fiber),
                    fiber: p,
                };
                syl.splice(i..=j, [replacement]);
                return Ok(true);
            }
        }
        Ok(changed)
    }

    /// Britton normal form of a path-consistent word.
    pub fn britton_reduce(&self, w: &GroupWord) -> Result<NormalForm> {
        self.word_path(w)?;
        let mut syl = w.syllables.clone();
        for s in &mut syl {
            if let Syllable::Vertex { walk, .. } = s {
                *walk = reduce_walk(walk);
            }
        }
        while self.britton_pass(&mut syl)? {}
        let reduced = GroupWord { syllables: syl };
        let stable_count = reduced.stable_count();
        Ok(NormalForm {
            reduced,
            stable_count,
            conjugator: GroupWord::identity(),
        })
    }

    /// Cyclic Britton reduction of a loop word.
    pub fn cyclic_reduce(&self, w: &GroupWord) -> Result<NormalForm> {
        if let Some((s, e)) = self.word_path(w)? {
            if s != e {
                return Err(Error::NotALoop {
                    expected: s,
                    start: s,
                    end: e,
                });
            }
        }
        let mut conj = GroupWord::identity();
        let mut cur = self.britton_reduce(w)?.reduced;
        loop {
            if cur.syllables.len() <= 1 {
                break;
            }
            let first = cur.syllables[0].clone();
            match &first {
                Syllable::Vertex { .. } => {
                    // Rotate the leading vertex syllable to the end.
                    cur.syllables.rotate_left(1);
                    conj.syllables.push(first);
                    cur = self.britton_reduce(&cur)?.reduced;
                }
                Syllable::Stable { gluing, inverse } => {
                    let n = cur.syllables.len();
                    let seam_pinch = match &cur.syllables[n - 1] {
                        Syllable::Stable {
                            gluing: g2,
                            inverse: i2,
                        } => g2 == gluing && *i2 == !*inverse,
                        Syllable::Vertex { .. } if n >= 2 => matches!(
                            &cur.syllables[n - 2],
                            Syllable::Stable { gluing: g2, inverse: i2 }
                                if g2 == gluing && *i2 == !*inverse
                        ),
                        _ => false,
                    };
                    if !seam_pinch {
                        break;
                    }
                    let before = cur.stable_count();
                    let mut rotated = cur.clone();
                    rotated.syllables.rotate_left(1);
                    let reduced = self.britton_reduce(&rotated)?.reduced;
                    if reduced.stable_count() < before {
                        conj.syllables.push(first);
                        cur = reduced;
                    } else {
                        break;
                    }
                }
            }
        }
        let stable_count = cur.stable_count();
        Ok(NormalForm {
            reduced: cur,
            stable_count,
            conjugator: self.britton_reduce(&conj)?.reduced,
        })
    }

    /// Dual-tree translation length: stable letters in the cyclic reduction.
    pub fn translation_length(&self, w: &GroupWord) -> Result<usize> {
        Ok(self.cyclic_reduce(w)?.stable_count)
    }

    /// A nontrivial element is Morse exactly when it does not fix a dual-tree
    /// vertex, i.e. its translation length is positive.
    pub fn is_morse(&self, w: &GroupWord) -> Result<bool> {
        let nf = self.britton_reduce(w)?;
        if nf.reduced.is_identity() {
            return Err(Error::IdentityWord);
        }
        Ok(self.translation_length(w)? > 0)
    }

    /// Deck action of a loop word at the root piece on a point of the model.
    pub fn act_on_point(&self, w: &GroupWord, x: &PointCoord) -> Result<PointCoord> {
        self.require_loop_at(w, self.root_piece)?;
        let mut piece = self.root_piece;
        let mut addr: CopyAddress = Vec::new();
        let mut pending_walk: Walk = Vec::new();
        let mut pending_fiber: i64 = 0;

        enum Item<'a> {
            Syl(&'a Syllable),
            Cross(&'a Crossing),
        }
        let items = w
            .syllables
            .iter()
            .map(Item::Syl)
            .chain(x.addr.iter().map(Item::Cross));

        for item in items {
            let (gluing, forward, extra_coset): (u32, bool, &[_]) = match item {
                Item::Syl(Syllable::Vertex {
                    piece: p,
                    walk,
                    fiber,
                }) => {
                    if *p != piece {
                        return Err(Error::MalformedWord(format!(
                            "vertex syllable of piece {p} applied in piece {piece}"
                        )));
                    }
                    pending_walk = concat_reduce(&pending_walk, walk);
                    pending_fiber += fiber;
                    continue;
                }
                Item::Syl(Syllable::Stable { gluing, inverse }) => (*gluing, !*inverse, &[]),
                Item::Cross(c) => (c.gluing, c.forward, c.coset.as_slice()),
            };
            let (exit_piece, exit_cycle) = self.exit_side(gluing, forward);
            if exit_piece != piece {
                return Err(Error::MalformedWord(format!(
                    "crossing of gluing {gluing} applied in piece {piece}"
                )));
            }
            let rep_in = concat_reduce(&pending_walk, extra_coset);
            let (rep, shift) = coset_split(&rep_in, self.gamma(piece, exit_cycle));
            let crossing = Crossing {
                gluing,
                forward,
                coset: rep,
            };
            addr = self.neighbor_addr(&addr, &crossing);
            let (enter_piece, enter_cycle) = self.enter_side(gluing, forward);
            pending_walk = power_walk(self.gamma(enter_piece, enter_cycle), pending_fiber);
            pending_fiber = shift;
            piece = enter_piece;
        }
        let spec_piece = self.piece(piece);
        let pos = translate_pos(spec_piece, &pending_walk, &x.pos);
        let fiber = x.fiber.clone() + rat_int(pending_fiber) * spec_piece.fiber_period.clone();
        Ok(PointCoord { addr, pos, fiber })
    }
}

/// Fitted two-sided bound between generator word length and dual-tree
/// displacement of the translated basepoint.
#[derive(Clone, Debug, serde::Serialize)]
pub struct QiReport {
    pub multiplicative: f64,
    pub additive: f64,
    pub sample_radius: usize,
    pub samples: usize,
    pub max_upper_residual: f64,
    pub max_lower_residual: f64,
}

/// Enumerates reduced words over the generators (free cancellation only) up
/// to the given length, maps each to its dual-tree vertex, and fits the
/// least two-sided linear bound.
pub fn orbit_qi_test(
    model: &Model,
    generators: &[GroupWord],
    radius: usize,
    basepoint: &PointCoord,
) -> Result<QiReport> {
    for (index, g) in generators.iter().enumerate() {
        if !model.is_morse(g)? {
            let nf = model.cyclic_reduce(g)?;
            let piece = match nf.reduced.syllables.first() {
                Some(Syllable::Vertex { piece, .. }) => *piece,
                _ => model.root_piece,
            };
            return Err(Error::BoundedOrbit { index, piece });
        }
    }
    let mut samples: Vec<(usize, usize)> = vec![(0, 0)];
    let mut frontier: Vec<(GroupWord, isize)> = vec![(GroupWord::identity(), 0)];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for (w, last) in &frontier {
            for (gi, g) in generators.iter().enumerate() {
                for (sign, sym) in [(1isize, g.clone()), (-1, g.inverse())] {
                    let code = sign * (gi as isize + 1);
                    if *last == -code {
                        continue;
                    }
                    let word = GroupWord::concat(&[w, &sym]);
                    let image = model.act_on_point(&word, basepoint)?;
                    samples.push((depth, model.dual_distance(&basepoint.addr, &image.addr)));
                    next.push((word, code));
                }
            }
        }
        frontier = next;
    }
    Ok(fit_qi(&samples, radius))
}

fn fit_qi(samples: &[(usize, usize)], radius: usize) -> QiReport {
    let mut mult: f64 = 1.0;
    for &(n, d) in samples {
        if n == 0 || d == 0 {
            continue;
        }
        let (n, d) = (n as f64, d as f64);
        mult = mult.max(d / n).max(n / d);
    }
    let mut up = 0.0f64;
    let mut lo = 0.0f64;
    for &(n, d) in samples {
        let (n, d) = (n as f64, d as f64);
        up = up.max(d - mult * n);
        lo = lo.max(n / mult - d);
    }
    QiReport {
        multiplicative: mult,
        additive: up.max(lo),
        sample_radius: radius,
        samples: samples.len(),
        max_upper_residual: up,
        max_lower_residual: lo,
    }
}

/// Ball-scale freeness certificate: no nonempty reduced generator word of
/// length <= radius represents the identity.
pub fn free_basis_check(model: &Model, generators: &[GroupWord], radius: usize) -> Result<bool> {
    let mut frontier: Vec<(GroupWord, isize)> = vec![(GroupWord::identity(), 0)];
    for _ in 1..=radius {
        let mut next = Vec::new();
        for (w, last) in &frontier {
            for (gi, g) in generators.iter().enumerate() {
                for (sign, sym) in [(1isize, g.clone()), (-1, g.inverse())] {
                    let code = sign * (gi as isize + 1);
                    if *last == -code {
                        continue;
                    }
                    let word = GroupWord::concat(&[w, &sym]);
                    if model.britton_reduce(&word)?.reduced.is_identity() {
                        return Ok(false);
                    }
                    next.push((word, code));
                }
            }
        }
        frontier = next;
    }
    Ok(true)
}

/// Parses the CLI word literal: semicolon-separated syllables, e.g.
/// `v0: a b a^-1 | f 2 ; t0 ; v1: b | f -1`.
pub fn parse_word(model: &Model, text: &str) -> Result<GroupWord> {
    let mut syllables = Vec::new();
    for raw in text.split(';') {
        let tok = raw.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some(rest) = tok.strip_prefix('v') {
            let (id, body) = rest
                .split_once(':')
                .ok_or_else(|| Error::MalformedWord(format!("vertex syllable {tok:?}")))?;
            let piece: usize = id
                .trim()
                .parse()
                .map_err(|_| Error::MalformedWord(format!("piece id in {tok:?}")))?;
            if piece >= model.spec.pieces.len() {
                return Err(Error::MalformedWord(format!("piece {piece} out of range")));
            }
            let (walk_part, fiber_part) = match body.split_once('|') {
                Some((w, f)) => (w, Some(f)),
                None => (body, None),
            };
            let tokens: Vec<String> = walk_part
                .split_whitespace()
                .map(|t| t.to_string())
                .collect();
            let walk = model.piece(piece).spine.parse_walk(&tokens)?;
            let fiber = match fiber_part {
                None => 0,
                Some(f) => {
                    let f = f.trim();
                    let f = f.strip_prefix('f').unwrap_or(f).trim();
                    f.parse()
                        .map_err(|_| Error::MalformedWord(format!("fiber exponent in {tok:?}")))?
                }
            };
            syllables.push(Syllable::Vertex {
                piece,
                walk: reduce_walk(&walk),
                fiber,
            });
        } else if let Some(rest) = tok.strip_prefix('t') {
            let (id, inverse) = match rest.strip_suffix("^-1") {
                Some(base) => (base, true),
                None => (rest, false),
            };
            let gluing: u32 = id
                .trim()
                .parse()
                .map_err(|_| Error::MalformedWord(format!("stable letter {tok:?}")))?;
            if gluing as usize >= model.spec.gluings.len() {
                return Err(Error::MalformedWord(format!(
                    "gluing {gluing} out of range"
                )));
            }
            syllables.push(Syllable::Stable { gluing, inverse });
        } else {
            return Err(Error::MalformedWord(format!("unknown syllable {tok:?}")));
        }
    }
    Ok(GroupWord { syllables })
}

pub fn display_word(model: &Model, w: &GroupWord) -> String {
    if w.syllables.is_empty() {
        return "1".to_string();
    }
    w.syllables
        .iter()
        .map(|s| match s {
            Syllable::Vertex { piece, walk, fiber } => {
                let mut out = format!(
                    "v{piece}: {}",
                    model.piece(*piece).spine.display_walk(walk)
                );
                if *fiber != 0 {
                    out.push_str(&format!(" | f {fiber}"));
                }
                out
            }
            Syllable::Stable { gluing, inverse } => {
                if *inverse {
                    format!("t{gluing}^-1")
                } else {
                    format!("t{gluing}")
                }
            }
        })
        .collect::<Vec<_>>()
        .join(" ; ")
}

/// Enumerates loop words at the root piece over a small syllable alphabet,
/// breadth-first, up to `max_syllables` and at most `cap` words.
pub fn enumerate_loop_words(model: &Model, max_syllables: usize, cap: usize) -> Vec<GroupWord> {
    let mut alphabet: Vec<Syllable> = Vec::new();
    for (pi, piece) in model.spec.pieces.iter().enumerate() {
        for e in 0..piece.spine.edges.len().min(2) {
            for rev in [false, true] {
                alphabet.push(Syllable::Vertex {
                    piece: pi,
                    walk: vec![crate::spine::Step {
                        edge: e as u32,
                        rev,
                    }],
                    fiber: 0,
                });
            }
        }
        alphabet.push(Syllable::Vertex {
            piece: pi,
            walk: Vec::new(),
            fiber: 1,
        });
    }
    for g in 0..model.spec.gluings.len() {
        for inverse in [false, true] {
            alphabet.push(Syllable::Stable {
                gluing: g as u32,
                inverse,
            });
        }
    }
    let root = model.root_piece;
    let mut out = Vec::new();
    let mut frontier: Vec<(Vec<Syllable>, usize)> = vec![(Vec::new(), root)];
    'grow: for _ in 1..=max_syllables {
        let mut next = Vec::new();
        for (w, at) in &frontier {
            for s in &alphabet {
                let (a, b) = model.syllable_ends(s);
                if a != *at {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(s.clone());
                if b == root {
                    out.push(GroupWord {
                        syllables: w2.clone(),
                    });
                    if out.len() >= cap {
                        break 'grow;
                    }
                }
                next.push((w2, b));
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flip::spec::{self_glued_reference, two_piece_reference};
    use crate::flip::tree::BasePos;
    use crate::num::rat_frac;

    fn two_piece() -> Model {
        Model::new(two_piece_reference())
    }

    fn hnn() -> Model {
        Model::new(self_glued_reference())
    }

    fn parse(m: &Model, s: &str) -> GroupWord {
        parse_word(m, s).unwrap()
    }

    #[test]
    fn pinch_rewrites_boundary_to_fiber() {
        let m = two_piece();
        // t . (commutator of piece 1, fiber 0) . t^-1 -> fiber of piece 0.
        let w = parse(&m, "t0 ; v1: a b a^-1 b^-1 ; t0^-1");
        let nf = m.britton_reduce(&w).unwrap();
        assert_eq!(nf.stable_count, 0);
        assert_eq!(
            nf.reduced.syllables,
            vec![Syllable::Vertex {
                piece: 0,
                walk: Vec::new(),
                fiber: 1
            }]
        );
    }

    #[test]
    fn non_edge_element_blocks_pinch() {
        let m = two_piece();
        let w = parse(&m, "t0 ; v1: a ; t0^-1");
        let nf = m.britton_reduce(&w).unwrap();
        assert_eq!(nf.stable_count, 2);
        assert_eq!(nf.reduced.syllables.len(), 3);
    }

    #[test]
    fn empty_word_reduces_to_identity() {
        let m = two_piece();
        let nf = m.britton_reduce(&GroupWord::identity()).unwrap();
        assert!(nf.reduced.is_identity());
        assert_eq!(nf.stable_count, 0);
        assert!(matches!(
            m.is_morse(&GroupWord::identity()),
            Err(Error::IdentityWord)
        ));
    }

    #[test]
    fn britton_is_idempotent() {
        let m = two_piece();
        for text in [
            "t0 ; v1: a b a^-1 b^-1 | f 2 ; t0^-1 ; v0: a",
            "v0: a b ; t0 ; v1: b ; t0^-1 ; v0: b^-1 a^-1",
            "t0 ; v1: a b a^-1 b^-1 a ; t0^-1",
        ] {
            let w = parse(&m, text);
            let once = m.britton_reduce(&w).unwrap().reduced;
            let twice = m.britton_reduce(&once).unwrap().reduced;
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn translation_length_basics() {
        let m = two_piece();
        // Vertex elements are elliptic.
        assert_eq!(m.translation_length(&parse(&m, "v0: a | f 3")).unwrap(), 0);
        // Conjugates of elliptic elements are elliptic.
        let w = parse(&m, "t0 ; v1: b ; t0^-1");
        assert_eq!(m.translation_length(&w).unwrap(), 0);
        // A genuinely crossing loop word.
        let g = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        assert_eq!(m.translation_length(&g).unwrap(), 2);
        assert!(m.is_morse(&g).unwrap());
        // Power law.
        for n in 1..=5 {
            assert_eq!(m.translation_length(&g.pow(n)).unwrap(), 2 * n as usize);
        }
    }

    #[test]
    fn hnn_stable_letter_is_hyperbolic() {
        let m = hnn();
        let t = parse(&m, "t0");
        assert_eq!(m.translation_length(&t).unwrap(), 1);
        let w = parse(&m, "t0 ; v0: a b");
        assert_eq!(m.translation_length(&w).unwrap(), 1);
        assert!(m.is_morse(&w).unwrap());
        // Fiber generator is elliptic.
        assert!(!m.is_morse(&parse(&m, "v0: | f 1")).unwrap());
    }

    #[test]
    fn conjugation_invariance_of_translation_length() {
        let m = two_piece();
        let g = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        let conjugators = [
            parse(&m, "v0: a"),
            parse(&m, "v0: b^-1 a"),
            parse(&m, "t0 ; v1: b ; t0^-1"),
            parse(&m, "v0: | f 2"),
            parse(&m, "t0 ; v1: a b ; t0^-1 ; v0: a"),
        ];
        let tau = m.translation_length(&g).unwrap();
        for c in &conjugators {
            let conj = GroupWord::concat(&[c, &g, &c.inverse()]);
            assert_eq!(m.translation_length(&conj).unwrap(), tau);
        }
    }

    #[test]
    fn cyclic_reduction_records_a_valid_conjugator() {
        let m = two_piece();
        let c = parse(&m, "v0: a b");
        let g = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        let w = GroupWord::concat(&[&c, &g, &c.inverse()]);
        let nf = m.cyclic_reduce(&w).unwrap();
        assert_eq!(nf.stable_count, 2);
        let recomposed =
            GroupWord::concat(&[&nf.conjugator, &nf.reduced, &nf.conjugator.inverse()]);
        // Same group element: identical action on a point.
        let x = PointCoord::root();
        let a1 = m.act_on_point(&w, &x).unwrap();
        let a2 = m.act_on_point(&recomposed, &x).unwrap();
        assert_eq!(a1, a2);
    }

    #[test]
    fn action_axioms_hold_exactly() {
        let m = two_piece();
        let idw = GroupWord::identity();
        let x = PointCoord {
            addr: Vec::new(),
            pos: BasePos::Vertex(m.piece(0).spine.parse_walk(&["a".into()]).unwrap()),
            fiber: rat_frac(3, 2),
        };
        assert_eq!(m.act_on_point(&idw, &x).unwrap(), x);

        let w1 = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        let w2 = parse(&m, "v0: a | f 1");
        let composite = GroupWord::concat(&[&w1, &w2]);
        let lhs = m.act_on_point(&composite, &x).unwrap();
        let rhs = m
            .act_on_point(&w1, &m.act_on_point(&w2, &x).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fiber_generator_translates_fiber() {
        let m = two_piece();
        let w = parse(&m, "v0: | f 1");
        let x = PointCoord::root();
        let y = m.act_on_point(&w, &x).unwrap();
        assert_eq!(y.addr, x.addr);
        assert_eq!(y.pos, x.pos);
        assert_eq!(y.fiber, rat_int(1));
    }

    #[test]
    fn action_agrees_with_britton_reduction() {
        let m = two_piece();
        let words = [
            "t0 ; v1: a b a^-1 b^-1 ; t0^-1",
            "t0 ; v1: a b a^-1 b^-1 | f 2 ; t0^-1 ; v0: a b",
            "v0: a ; t0 ; v1: b ; t0^-1 ; v0: a^-1",
        ];
        let xs = [
            PointCoord::root(),
            PointCoord {
                addr: vec![Crossing {
                    gluing: 0,
                    forward: true,
                    coset: Vec::new(),
                }],
                pos: BasePos::root(),
                fiber: rat_frac(1, 3),
            },
        ];
        for text in words {
            let w = parse(&m, text);
            let r = m.britton_reduce(&w).unwrap().reduced;
            for x in &xs {
                assert_eq!(
                    m.act_on_point(&w, x).unwrap(),
                    m.act_on_point(&r, x).unwrap()
                );
            }
        }
    }

    #[test]
    fn loop_requirement_is_enforced() {
        let m = two_piece();
        let w = parse(&m, "t0 ; v1: a");
        assert!(matches!(
            m.act_on_point(&w, &PointCoord::root()),
            Err(Error::NotALoop { .. })
        ));
        // Non-loop words still Britton-reduce.
        assert_eq!(m.britton_reduce(&w).unwrap().stable_count, 1);
    }

    #[test]
    fn orbit_qi_on_cyclic_morse_subgroup() {
        let m = two_piece();
        let g = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        let report = orbit_qi_test(&m, &[g], 6, &PointCoord::root()).unwrap();
        assert!(report.multiplicative >= 1.0 && report.multiplicative <= 2.5);
        assert!(report.additive <= 2.0);
        // Vertex generator produces a bounded-orbit error.
        let bad = parse(&m, "v0: a");
        assert!(matches!(
            orbit_qi_test(&m, &[bad], 3, &PointCoord::root()),
            Err(Error::BoundedOrbit { index: 0, piece: 0 })
        ));
    }

    #[test]
    fn free_basis_checks() {
        let m = two_piece();
        let g1 = parse(&m, "t0 ; v1: a ; t0^-1 ; v0: b");
        let g2 = parse(&m, "t0 ; v1: b ; t0^-1 ; v0: a");
        assert!(free_basis_check(&m, &[g1.clone(), g2.clone()], 4).unwrap());
        assert!(!free_basis_check(&m, &[g1.clone(), g1.clone()], 2).unwrap());
        // A conjugated basis is still free.
        let h = GroupWord::concat(&[&g1.inverse(), &g2, &g1]);
        assert!(free_basis_check(&m, &[g1, h], 4).unwrap());
    }

    #[test]
    fn word_literal_round_trip() {
        let m = two_piece();
        let w = parse(&m, "v0: a b a^-1 | f 2 ; t0 ; v1: b | f -1 ; t0^-1");
        let shown = display_word(&m, &w);
        let back = parse(&m, &shown);
        assert_eq!(w, back);
    }

    #[test]
    fn loop_word_enumeration_is_path_consistent() {
        let m = two_piece();
        let words = enumerate_loop_words(&m, 4, 500);
        assert!(!words.is_empty());
        for w in &words {
            if let Some((s, e)) = m.word_path(w).unwrap() {
                assert_eq!(s, m.root_piece);
                assert_eq!(e, m.root_piece);
            }
        }
        assert!(words.iter().any(|w| w.stable_count() == 0));
        assert!(words.iter().any(|w| w.stable_count() >= 2));
    }
}
