//! Exact analyzer for abelian-by-cyclic groups Z^k x|_Phi Z.
//!
//! Everything here is integer arithmetic: fixed lattices of matrix powers
//! via Smith normal form, the periodicity criterion through two independent
//! routes (power-kernel enumeration and cyclotomic factors of the
//! characteristic polynomial), exact semidirect-product algebra, and
//! ball-scale conjugate-intersection probes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub k: usize,
    /// Row-major entries.
    pub entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let k = rows.len();
        let mut entries = Vec::with_capacity(k * k);
        for r in rows {
            assert_eq!(r.len(), k, "square matrix expected");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix { k, entries }
    }

    pub fn identity(k: usize) -> Self {
        let mut m = IntMatrix {
            k,
            entries: vec![BigInt::zero(); k * k],
        };
        for i in 0..k {
            m.entries[i * k + i] = BigInt::one();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.k + j]
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let k = self.k;
        let mut out = IntMatrix {
            k,
            entries: vec![BigInt::zero(); k * k],
        };
        for i in 0..k {
            for l in 0..k {
                let a = self.at(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..k {
                    let add = a * other.at(l, j);
                    out.entries[i * k + j] += add;
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        IntMatrix {
            k: self.k,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// Fraction-free determinant.
    pub fn det(&self) -> BigInt {
        let k = self.k;
        if k == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..k)
            .map(|i| (0..k).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for p in 0..k {
            if m[p][p].is_zero() {
                match (p + 1..k).find(|&r| !m[r][p].is_zero()) {
                    Some(r) => {
                        m.swap(p, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in p + 1..k {
                for j in p + 1..k {
                    let num = &m[p][p] * &m[i][j] - &m[i][p] * &m[p][j];
                    m[i][j] = &num / &prev;
                }
                m[i][p] = BigInt::zero();
            }
            prev = m[p][p].clone();
        }
        sign * m[k - 1][k - 1].clone()
    }

    /// Exact inverse of a unimodular matrix.
    pub fn inverse(&self) -> Result<IntMatrix> {
        let det = self.det();
        if !det.clone().abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        use crate::num::Rat;
        let k = self.k;
        let mut a: Vec<Vec<Rat>> = (0..k)
            .map(|i| {
                (0..2 * k)
                    .map(|j| {
                        if j < k {
                            Rat::from_integer(self.at(i, j).clone())
                        } else if j - k == i {
                            Rat::from_integer(BigInt::one())
                        } else {
                            Rat::from_integer(BigInt::zero())
                        }
                    })
                    .collect()
            })
            .collect();
        for p in 0..k {
            let pivot = (p..k)
                .find(|&r| !a[r][p].is_zero())
                .ok_or_else(|| Error::NotUnimodular("singular".into()))?;
            a.swap(p, pivot);
            let inv = a[p][p].clone();
            for j in 0..2 * k {
                a[p][j] = a[p][j].clone() / inv.clone();
            }
            for r in 0..k {
                if r == p || a[r][p].is_zero() {
                    continue;
                }
                let f = a[r][p].clone();
                for j in 0..2 * k {
                    a[r][j] = a[r][j].clone() - f.clone() * a[p][j].clone();
                }
            }
        }
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let v = &a[i][k + j];
                if !v.is_integer() {
                    return Err(Error::NotUnimodular("inverse is not integral".into()));
                }
                entries.push(v.to_integer());
            }
        }
        Ok(IntMatrix { k, entries })
    }

    pub fn pow(&self, e: i64) -> Result<IntMatrix> {
        let base = if e >= 0 { self.clone() } else { self.inverse()? };
        let mut out = IntMatrix::identity(self.k);
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.k)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.k).map(|i| self.at(i, i).clone()).sum()
    }
}

/// Smith normal form with transforms: s = u * m * v, u and v unimodular.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let k = m.k;
    let mut s = m.clone();
    let mut u = IntMatrix::identity(k);
    let mut v = IntMatrix::identity(k);
    let idx = |i: usize, j: usize| i * k + j;

    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..k {
                    if !s.entries[idx(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| {
                            s.entries[idx(i, j)].clone().abs()
                                < s.entries[idx(bi, bj)].clone().abs()
                        })
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return (s, u, v) };
            if bi != t {
                for j in 0..k {
                    s.entries.swap(idx(t, j), idx(bi, j));
                    u.entries.swap(idx(t, j), idx(bi, j));
                }
            }
            if bj != t {
                for i in 0..k {
                    s.entries.swap(idx(i, t), idx(i, bj));
                    v.entries.swap(idx(i, t), idx(i, bj));
                }
            }
            let mut done = true;
            for i in t + 1..k {
                if s.entries[idx(i, t)].is_zero() {
                    continue;
                }
                let q = div_round(&s.entries[idx(i, t)], &s.entries[idx(t, t)]);
                for j in 0..k {
                    let sub = &q * &s.entries[idx(t, j)];
                    s.entries[idx(i, j)] -= sub;
                    let subu = &q * &u.entries[idx(t, j)];
                    u.entries[idx(i, j)] -= subu;
                }
                if !s.entries[idx(i, t)].is_zero() {
                    done = false;
                }
            }
            for j in t + 1..k {
                if s.entries[idx(t, j)].is_zero() {
                    continue;
                }
                let q = div_round(&s.entries[idx(t, j)], &s.entries[idx(t, t)]);
                for i in 0..k {
                    let sub = &q * &s.entries[idx(i, t)];
                    s.entries[idx(i, j)] -= sub;
                    let subv = &q * &v.entries[idx(i, t)];
                    v.entries[idx(i, j)] -= subv;
                }
                if !s.entries[idx(t, j)].is_zero() {
                    done = false;
                }
            }
            if done
                && (t + 1..k).all(|i| s.entries[idx(i, t)].is_zero())
                && (t + 1..k).all(|j| s.entries[idx(t, j)].is_zero())
            {
                break;
            }
        }
    }
    (s, u, v)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = (a / b, a % b);
    if &r.clone().abs() * &two > b.clone().abs() {
        if (r < BigInt::zero()) == (*b < BigInt::zero()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Integer kernel basis of a square matrix.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (s, _u, v) = smith_normal_form(m);
    let k = m.k;
    let mut basis = Vec::new();
    for j in 0..k {
        if s.at(j, j).is_zero() {
            basis.push((0..k).map(|i| v.at(i, j).clone()).collect());
        }
    }
    basis
}

/// Basis of the fixed lattice of phi^l (empty means only the origin).
pub fn fixed_lattice(phi: &IntMatrix, l: i64) -> Result<Vec<Vec<BigInt>>> {
    if l == 0 {
        return Err(Error::Parse("power must be nonzero".into()));
    }
    let p = phi.pow(l.abs())?;
    Ok(kernel_basis(&p.sub(&IntMatrix::identity(phi.k))))
}

fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Candidate orders of root-of-unity eigenvalues of a k x k integer matrix.
pub fn order_candidates(k: usize) -> Vec<i64> {
    let bound = (2 * k * k + 4) as u64;
    (1..=bound)
        .filter(|&n| euler_phi(n) <= k as u64)
        .map(|n| n as i64)
        .collect()
}

/// Least l > 0 whose power fixes a nonzero lattice vector, if any,
/// by kernel enumeration over the finite candidate list.
pub fn periodic_order(phi: &IntMatrix) -> Result<Option<i64>> {
    for n in order_candidates(phi.k) {
        if !fixed_lattice(phi, n)?.is_empty() {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

// Polynomials over Z, ascending coefficients.
type Poly = Vec<BigInt>;

fn poly_trim(p: &mut Poly) {
    while p.len() > 1 && p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            let add = ca * cb;
            out[i + j] += add;
        }
    }
    poly_trim(&mut out);
    out
}

/// Exact division; None when a remainder or non-integer quotient appears.
fn poly_div_exact(num: &Poly, den: &Poly) -> Option<Poly> {
    let mut rem = num.clone();
    poly_trim(&mut rem);
    let mut den = den.clone();
    poly_trim(&mut den);
    if den.len() > rem.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); rem.len() - den.len() + 1];
    let lead = den.last().unwrap().clone();
    for pos in (0..q.len()).rev() {
        let top = rem[pos + den.len() - 1].clone();
        if top.is_zero() {
            continue;
        }
        if !(&top % &lead).is_zero() {
            return None;
        }
        let c = &top / &lead;
        q[pos] = c.clone();
        for (j, d) in den.iter().enumerate() {
            let sub = &c * d;
            rem[pos + j] -= sub;
        }
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(q)
    } else {
        None
    }
}

/// Characteristic polynomial det(xI - M) by cofactor expansion over Z[x].
pub fn char_poly(m: &IntMatrix) -> Poly {
    fn det_rec(rows: &[usize], cols: &[usize], entry: &dyn Fn(usize, usize) -> Poly) -> Poly {
        if rows.len() == 1 {
            return entry(rows[0], cols[0]);
        }
        let mut acc: Poly = vec![BigInt::zero()];
        let rest: Vec<usize> = rows[1..].to_vec();
        for (ci, &c) in cols.iter().enumerate() {
            let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = poly_mul(&entry(rows[0], c), &det_rec(&rest, &minor_cols, entry));
            for (i, t) in term.iter().enumerate() {
                if acc.len() <= i {
                    acc.resize(i + 1, BigInt::zero());
                }
                if ci % 2 == 0 {
                    acc[i] += t;
                } else {
                    acc[i] -= t;
                }
            }
        }
        poly_trim(&mut acc);
        acc
    }
    let k = m.k;
    let entry = |i: usize, j: usize| -> Poly {
        if i == j {
            vec![-m.at(i, j).clone(), BigInt::one()]
        } else {
            vec![-m.at(i, j).clone()]
        }
    };
    let all: Vec<usize> = (0..k).collect();
    det_rec(&all, &all, &entry)
}

/// n-th cyclotomic polynomial.
pub fn cyclotomic(n: u64) -> Poly {
    let mut num: Poly = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut den: Poly = vec![BigInt::one()];
    for d in 1..n {
        if n % d == 0 {
            den = poly_mul(&den, &cyclotomic(d));
        }
    }
    poly_div_exact(&num, &den).expect("cyclotomic division is exact")
}

/// Independent periodicity route: least candidate n whose cyclotomic
/// polynomial divides the characteristic polynomial.
pub fn periodic_order_cyclotomic(phi: &IntMatrix) -> Option<i64> {
    let chi = char_poly(phi);
    for n in order_candidates(phi.k) {
        let cyc = cyclotomic(n as u64);
        if poly_div_exact(&chi, &cyc).is_some() {
            return Some(n);
        }
    }
    None
}

/// A proper nontrivial finite-height subgroup exists exactly when no power
/// of the automorphism fixes a nonzero lattice vector.
pub fn exists_proper_finite_height(phi: &IntMatrix) -> Result<bool> {
    Ok(periodic_order(phi)?.is_none())
}

/// Group elements t^m z with the fixed convention
/// (m1, z1) (m2, z2) = (m1 + m2, phi^{-m2}(z1) + z2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbcElement {
    pub t_exp: i64,
    pub vec: Vec<BigInt>,
}

impl AbcElement {
    pub fn new(t_exp: i64, vec: Vec<i64>) -> Self {
        AbcElement {
            t_exp,
            vec: vec.into_iter().map(BigInt::from).collect(),
        }
    }

    pub fn identity(k: usize) -> Self {
        AbcElement {
            t_exp: 0,
            vec: vec![BigInt::zero(); k],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.t_exp == 0 && self.vec.iter().all(|x| x.is_zero())
    }
}

/// The group context: the automorphism and its exact inverse.
pub struct AbcGroup {
    pub phi: IntMatrix,
    phi_inv: IntMatrix,
}

impl AbcGroup {
    pub fn new(phi: IntMatrix) -> Result<Self> {
        let phi_inv = phi.inverse()?;
        Ok(AbcGroup { phi, phi_inv })
    }

    pub fn k(&self) -> usize {
        self.phi.k
    }

    pub fn apply_power(&self, m: i64, v: &[BigInt]) -> Vec<BigInt> {
        let mat = if m >= 0 { &self.phi } else { &self.phi_inv };
        let mut out = v.to_vec();
        for _ in 0..m.unsigned_abs() {
            out = mat.apply(&out);
        }
        out
    }

    pub fn mul(&self, a: &AbcElement, b: &AbcElement) -> AbcElement {
        let moved = self.apply_power(-b.t_exp, &a.vec);
        AbcElement {
            t_exp: a.t_exp + b.t_exp,
            vec: moved.into_iter().zip(&b.vec).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn inverse(&self, a: &AbcElement) -> AbcElement {
        AbcElement {
            t_exp: -a.t_exp,
            vec: self
                .apply_power(a.t_exp, &a.vec)
                .into_iter()
                .map(|x| -x)
                .collect(),
        }
    }

    pub fn pow(&self, a: &AbcElement, n: i64) -> AbcElement {
        let base = if n >= 0 { a.clone() } else { self.inverse(a) };
        let mut out = AbcElement::identity(self.k());
        for _ in 0..n.unsigned_abs() {
            out = self.mul(&out, &base);
        }
        out
    }

    pub fn conjugate(&self, g: &AbcElement, h: &AbcElement) -> AbcElement {
        self.mul(&self.mul(g, h), &self.inverse(g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    Trivial,
    FiniteIndex,
    CandidateFiniteHeight { height_bound: i64 },
    NotFiniteHeight { reason: String },
}

/// Row-style canonical basis of the lattice spanned by the given vectors.
fn lattice_canon(rows: &[Vec<BigInt>], k: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| !r.iter().all(|x| x.is_zero()))
        .cloned()
        .collect();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..k {
        loop {
            let mut nonzero: Vec<usize> = (0..m.len()).filter(|&i| !m[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            nonzero.sort_by_key(|&i| m[i][col].clone().abs());
            let pivot = nonzero[0];
            if nonzero.len() == 1 {
                let mut row = m.remove(pivot);
                if row[col] < BigInt::zero() {
                    for x in &mut row {
                        *x = -x.clone();
                    }
                }
                out.push(row);
                break;
            }
            let other = nonzero[1];
            let q = div_round(&m[other][col], &m[pivot][col]);
            for j in 0..k {
                let sub = &q * &m[pivot][j];
                m[other][j] -= sub;
            }
            m.retain(|r| !r.iter().all(|x| x.is_zero()));
        }
    }
    // Reduce entries above each pivot for canonicity.
    for i in (0..out.len()).rev() {
        let lead = out[i].iter().position(|x| !x.is_zero()).unwrap();
        for r in 0..i {
            if out[r][lead].is_zero() {
                continue;
            }
            let q = div_round(&out[r][lead], &out[i][lead]);
            if q.is_zero() {
                continue;
            }
            for j in 0..k {
                let sub = &q * &out[i][j];
                out[r][j] -= sub;
            }
        }
    }
    out
}

/// Smallest phi^{+-d}-invariant lattice containing the given vectors.
fn invariant_closure(group: &AbcGroup, d: i64, vecs: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let k = group.k();
    let mut basis = lattice_canon(vecs, k);
    loop {
        let mut extended = basis.clone();
        for v in &basis {
            extended.push(group.apply_power(d, v));
            extended.push(group.apply_power(-d, v));
        }
        let new_basis = lattice_canon(&extended, k);
        if new_basis == basis {
            return basis;
        }
        basis = new_basis;
    }
}

/// Classifies the subgroup generated by the given elements.
pub fn classify_subgroup(group: &AbcGroup, gens: &[AbcElement]) -> Result<Classification> {
    let k = group.k();
    let gens: Vec<AbcElement> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
    if gens.is_empty() {
        return Ok(Classification::Trivial);
    }
    // Stable-letter exponents generate d Z; build a witness with exponent d.
    let mut d: i64 = 0;
    let mut w0 = AbcElement::identity(k);
    for g in &gens {
        if g.t_exp == 0 {
            continue;
        }
        if d == 0 {
            w0 = if g.t_exp > 0 { g.clone() } else { group.inverse(g) };
            d = w0.t_exp;
        } else {
            let (mut a, mut b) = (w0.clone(), g.clone());
            while b.t_exp != 0 {
                let q = a.t_exp.div_euclid(b.t_exp);
                let next = group.mul(&a, &group.pow(&b, -q));
                a = b;
                b = next;
            }
            w0 = if a.t_exp >= 0 { a } else { group.inverse(&a) };
            d = w0.t_exp;
        }
    }
    if d == 0 {
        return Ok(Classification::NotFiniteHeight {
            reason: "subgroup lies in the abelian kernel at infinite index".into(),
        });
    }
    // Kernel vectors: cancel each generator's stable exponent against w0.
    let mut vecs: Vec<Vec<BigInt>> = Vec::new();
    for g in &gens {
        debug_assert_eq!(g.t_exp % d, 0);
        let h = group.mul(&group.pow(&w0, -(g.t_exp / d)), g);
        debug_assert_eq!(h.t_exp, 0);
        if !h.vec.iter().all(|x| x.is_zero()) {
            vecs.push(h.vec);
        }
    }
    let lattice = invariant_closure(group, d, &vecs);
    let rank = lattice.len();
    if rank == k {
        return Ok(Classification::FiniteIndex);
    }
    if rank == 0 {
        if periodic_order(&group.phi)?.is_none() {
            return Ok(Classification::CandidateFiniteHeight { height_bound: d });
        }
        return Ok(Classification::NotFiniteHeight {
            reason: "a power of the automorphism fixes a lattice vector".into(),
        });
    }
    Ok(Classification::NotFiniteHeight {
        reason: "infinite-index subgroup meets the abelian kernel nontrivially".into(),
    })
}

/// Height bound for a cyclic subgroup generated by t^m z.
pub fn height_bound_cyclic(phi: &IntMatrix, m: i64) -> Result<i64> {
    if periodic_order(phi)?.is_some() {
        return Err(Error::PeriodicAutomorphism);
    }
    Ok(m)
}

/// Powers h^p (0 < |p| <= radius) with g h^p g^{-1} back in <h>.
pub fn ball_conjugate_intersection(
    group: &AbcGroup,
    h: &AbcElement,
    g: &AbcElement,
    radius: i64,
) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in -radius..=radius {
        if p == 0 {
            continue;
        }
        let hp = group.pow(h, p);
        let c = group.conjugate(g, &hp);
        if h.t_exp != 0 {
            if c.t_exp % h.t_exp != 0 {
                continue;
            }
            let q = c.t_exp / h.t_exp;
            if group.pow(h, q) == c {
                out.push((p, q));
            }
        } else {
            for q in -4 * radius..=4 * radius {
                if group.pow(h, q) == c {
                    out.push((p, q));
                    break;
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SqClass {
    Trivial,
    FiniteIndex,
    NotStronglyQuasiconvex,
}

/// Strong-quasiconvexity classification: only the trivial and finite-index
/// subgroups qualify in this group class.
pub fn sq_classification(group: &AbcGroup, gens: &[AbcElement]) -> Result<SqClass> {
    Ok(match classify_subgroup(group, gens)? {
        Classification::Trivial => SqClass::Trivial,
        Classification::FiniteIndex => SqClass::FiniteIndex,
        _ => SqClass::NotStronglyQuasiconvex,
    })
}

/// Parses a row-major integer list like "2 1 1 1" into a square matrix.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let nums: Vec<i64> = text
        .split([' ', ',', ';'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad matrix entry {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = (nums.len() as f64).sqrt() as usize;
    if k * k != nums.len() || k == 0 {
        return Err(Error::Parse(format!(
            "{} entries do not form a square matrix",
            nums.len()
        )));
    }
    let rows: Vec<Vec<i64>> = nums.chunks(k).map(|c| c.to_vec()).collect();
    let m = IntMatrix::from_rows(&rows);
    let det = m.det();
    if !det.clone().abs().is_one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    Ok(m)
}

/// Random element of GL_k(Z) as a product of elementary matrices.
pub fn random_unimodular(rng: &mut impl rand::Rng, k: usize, ops: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(k);
    for _ in 0..ops {
        let mut e = IntMatrix::identity(k);
        match rng.gen_range(0..3) {
            0 => {
                if k > 1 {
                    let i = rng.gen_range(0..k);
                    let mut j = rng.gen_range(0..k);
                    if i == j {
                        j = (j + 1) % k;
                    }
                    e.entries[i * k + j] = BigInt::from(rng.gen_range(-2i64..=2));
                }
            }
            1 => {
                if k > 1 {
                    let i = rng.gen_range(0..k);
                    let mut j = rng.gen_range(0..k);
                    if i == j {
                        j = (j + 1) % k;
                    }
                    e.entries[i * k + i] = BigInt::zero();
                    e.entries[j * k + j] = BigInt::zero();
                    e.entries[i * k + j] = BigInt::one();
                    e.entries[j * k + i] = -BigInt::one();
                }
            }
            _ => {
                let i = rng.gen_range(0..k);
                e.entries[i * k + i] = -BigInt::one();
            }
        }
        m = m.mul(&e);
    }
    m
}
