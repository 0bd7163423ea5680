//! Property-based invariants of the word algebra, the tree metric, and the
//! semidirect-product arithmetic.

use proptest::prelude::*;

use qclab::abc;
use qclab::flip::{two_piece_reference, BasePos, Crossing, Model, PointCoord, WallId};
use qclab::num::{rat_frac, rat_int};
use qclab::spine::{concat_reduce, invert_walk, is_reduced, reduce_walk, Step, Walk};
use qclab::words::{parse_word, GroupWord, Syllable};

fn step_strategy() -> impl Strategy<Value = Step> {
    (0u32..2, any::<bool>()).prop_map(|(edge, rev)| Step { edge, rev })
}

fn walk_strategy(max_len: usize) -> impl Strategy<Value = Walk> {
    prop::collection::vec(step_strategy(), 0..max_len)
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_sound(w in walk_strategy(16)) {
        let r = reduce_walk(&w);
        prop_assert!(is_reduced(&r));
        prop_assert_eq!(reduce_walk(&r), r);
    }

    #[test]
    fn walk_inverse_cancels(w in walk_strategy(16)) {
        let r = reduce_walk(&w);
        prop_assert!(concat_reduce(&r, &invert_walk(&r)).is_empty());
    }

    #[test]
    fn tree_metric_axioms(a in walk_strategy(10), b in walk_strategy(10), c in walk_strategy(10)) {
        let spec = two_piece_reference();
        let piece = spec.piece(0);
        let pa = BasePos::Vertex(reduce_walk(&a));
        let pb = BasePos::Vertex(reduce_walk(&b));
        let pc = BasePos::Vertex(reduce_walk(&c));
        let dab = qclab::flip::base_dist(piece, &pa, &pb);
        prop_assert_eq!(dab.clone(), qclab::flip::base_dist(piece, &pb, &pa));
        prop_assert_eq!(dab == rat_int(0), pa == pb);
        let dac = qclab::flip::base_dist(piece, &pa, &pc);
        let dcb = qclab::flip::base_dist(piece, &pc, &pb);
        prop_assert!(dab <= dac + dcb);
    }

    #[test]
    fn projection_exactness(v in walk_strategy(10), k in -6i64..6) {
        let spec = two_piece_reference();
        let piece = spec.piece(0);
        let mut line = qclab::flip::WallLine::new(piece, 0, &Vec::new());
        let p = BasePos::Vertex(reduce_walk(&v));
        let (foot, d) = line.project(&p);
        let q = BasePos::Vertex(line.vertex(k));
        let through = qclab::flip::base_dist(piece, &p, &foot) + qclab::flip::base_dist(piece, &foot, &q);
        prop_assert_eq!(qclab::flip::base_dist(piece, &p, &q), through);
        prop_assert_eq!(d, qclab::flip::base_dist(piece, &p, &foot));
    }

    #[test]
    fn flip_round_trip_identity(arc_num in -24i64..24, fiber_num in -24i64..24) {
        let m = Model::new(two_piece_reference());
        let wall = WallId { owner: Vec::new(), cycle: 0, coset: Vec::new() };
        let mut line = m.line_of_wall(&wall).unwrap();
        let x = PointCoord {
            addr: Vec::new(),
            pos: line.point_at(&rat_frac(arc_num, 8)),
            fiber: rat_frac(fiber_num, 8),
        };
        let cross = Crossing { gluing: 0, forward: true, coset: Vec::new() };
        let back = Crossing { gluing: 0, forward: false, coset: Vec::new() };
        let round = m.cross_point(&m.cross_point(&x, &cross).unwrap(), &back).unwrap();
        prop_assert_eq!(round, x);
    }
}

fn syllable_pool(m: &Model) -> Vec<Syllable> {
    let mut pool = Vec::new();
    for text in [
        "v0: a",
        "v0: b^-1",
        "v0: | f 1",
        "v1: a",
        "v1: b",
        "v1: a b a^-1 b^-1",
        "v1: | f -1",
    ] {
        pool.extend(parse_word(m, text).unwrap().syllables);
    }
    pool.push(Syllable::Stable { gluing: 0, inverse: false });
    pool.push(Syllable::Stable { gluing: 0, inverse: true });
    pool
}

/// Builds a loop word at the root piece from arbitrary pool picks by
/// keeping only path-compatible syllables and closing with stable letters.
fn loop_word_from(m: &Model, picks: &[u8]) -> GroupWord {
    let pool = syllable_pool(m);
    let mut syllables = Vec::new();
    let mut at = 0usize;
    for &p in picks {
        let s = pool[p as usize % pool.len()].clone();
        let (start, end) = match &s {
            Syllable::Vertex { piece, .. } => (*piece, *piece),
            Syllable::Stable { inverse, .. } => {
                if *inverse {
                    (1, 0)
                } else {
                    (0, 1)
                }
            }
        };
        if start == at {
            at = end;
            syllables.push(s);
        }
    }
    if at == 1 {
        syllables.push(Syllable::Stable { gluing: 0, inverse: true });
    }
    GroupWord { syllables }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn britton_reduction_is_idempotent_and_action_safe(picks in prop::collection::vec(any::<u8>(), 0..10)) {
        let m = Model::new(two_piece_reference());
        let w = loop_word_from(&m, &picks);
        let once = m.britton_reduce(&w).unwrap().reduced;
        prop_assert_eq!(m.britton_reduce(&once).unwrap().reduced.clone(), once.clone());
        // Reduction preserves the deck action.
        let x = PointCoord::root();
        prop_assert_eq!(
            m.act_on_point(&w, &x).unwrap(),
            m.act_on_point(&once, &x).unwrap()
        );
        // Translation length is conjugation-invariant.
        let conj = parse_word(&m, "v0: a b").unwrap();
        let conjugated = GroupWord::concat(&[&conj, &w, &conj.inverse()]);
        prop_assert_eq!(
            m.translation_length(&w).unwrap(),
            m.translation_length(&conjugated).unwrap()
        );
    }
}

fn unimodular_from(ops: &[(u8, u8, i8)]) -> abc::IntMatrix {
    let mut m = abc::IntMatrix::identity(2);
    for &(kind, pos, coeff) in ops {
        let mut e = abc::IntMatrix::identity(2);
        match kind % 3 {
            0 => {
                let i = (pos % 2) as usize;
                e.entries[i * 2 + (1 - i)] = num_bigint::BigInt::from(coeff as i64 % 3);
            }
            1 => {
                e.entries = vec![
                    num_bigint::BigInt::from(0),
                    num_bigint::BigInt::from(1),
                    num_bigint::BigInt::from(-1),
                    num_bigint::BigInt::from(0),
                ];
            }
            _ => {
                let i = (pos % 2) as usize;
                e.entries[i * 2 + i] = num_bigint::BigInt::from(-1);
            }
        }
        m = m.mul(&e);
    }
    m
}

proptest! {
    #[test]
    fn abc_group_law(
        ops in prop::collection::vec((any::<u8>(), any::<u8>(), any::<i8>()), 0..8),
        m1 in -3i64..3, x1 in -4i64..4, y1 in -4i64..4,
        m2 in -3i64..3, x2 in -4i64..4, y2 in -4i64..4,
    ) {
        let phi = unimodular_from(&ops);
        let group = abc::AbcGroup::new(phi.clone()).unwrap();
        let a = abc::AbcElement::new(m1, vec![x1, y1]);
        let b = abc::AbcElement::new(m2, vec![x2, y2]);
        // Defining relation t z t^-1 = phi(z).
        let t = abc::AbcElement::new(1, vec![0, 0]);
        let z = abc::AbcElement::new(0, vec![x1, y1]);
        let conj = group.mul(&group.mul(&t, &z), &group.inverse(&t));
        prop_assert_eq!(conj.vec, phi.apply(&z.vec));
        // Inverses and associativity with a third element.
        prop_assert!(group.mul(&a, &group.inverse(&a)).is_identity());
        let c = group.mul(&a, &b);
        prop_assert_eq!(
            group.mul(&c, &a),
            group.mul(&a, &group.mul(&b, &a))
        );
    }

    #[test]
    fn periodicity_routes_agree(ops in prop::collection::vec((any::<u8>(), any::<u8>(), any::<i8>()), 0..10)) {
        let phi = unimodular_from(&ops);
        prop_assert_eq!(
            abc::periodic_order(&phi).unwrap(),
            abc::periodic_order_cyclotomic(&phi)
        );
    }
}
