//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("piece {piece}: Betti number < 2 (got {betti})")]
    BettiTooSmall { piece: usize, betti: isize },
    #[error("piece {piece}: spine graph is not connected")]
    SpineDisconnected { piece: usize },
    #[error("piece {piece}, cycle {cycle}: {reason}")]
    BadBoundaryCycle {
        piece: usize,
        cycle: usize,
        reason: String,
    },
    #[error("unmatched cycle: piece {piece}, cycle {cycle} is referenced by {count} gluing ends (want exactly 1)")]
    UnmatchedCycle {
        piece: usize,
        cycle: usize,
        count: usize,
    },
    #[error("gluing {gluing}: flip-compatibility violation: scaled cycle length {cycle_len} != partner fiber period {fiber_period}")]
    FlipIncompatible {
        gluing: usize,
        cycle_len: String,
        fiber_period: String,
    },
    #[error("gluing {0}: both ends reference the same boundary cycle")]
    DegenerateGluing(usize),
    #[error("internal consistency: {0}")]
    Inconsistency(String),
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("word is not a loop at piece {expected}: syllable path runs {start} -> {end}")]
    NotALoop {
        expected: usize,
        start: usize,
        end: usize,
    },
    #[error("identity element has no Morse classification")]
    IdentityWord,
    #[error("generator {index} is not Morse: conjugate into the vertex group of piece {piece}")]
    BoundedOrbit { index: usize, piece: usize },
    #[error("subset construction requires a Morse element (translation length 0)")]
    NotMorse,
    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("point does not lie on the requested wall")]
    NotOnWall,
    #[error("height bound requires an aperiodic automorphism (some power fixes a lattice vector)")]
    PeriodicAutomorphism,
    #[error("matrix is not in GL_k(Z): determinant {0}")]
    NotUnimodular(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no certifiable quasi-geodesic samples were generated")]
    NoCertifiedSamples,
}

pub type Result<T> = std::result::Result<T, Error>;
