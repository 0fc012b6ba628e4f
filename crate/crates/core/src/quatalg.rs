//! Exact quaternions over ℚ(√2, √5), the binary polyhedral groups, and the
//! central product of the binary icosahedral and binary octahedral groups
//! acting on the unit quaternions by `q ↦ a·q·b⁻¹`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::permgrp::{Permutation, PermutationGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuatError {
    #[error("division by zero")]
    DivisionByZero,
}

/// `a + b√2 + c√5 + d√10` with rational coefficients.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FieldElem {
    pub a: Rational64,
    pub b: Rational64,
    pub c: Rational64,
    pub d: Rational64,
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl FieldElem {
    pub const fn new(a: Rational64, b: Rational64, c: Rational64, d: Rational64) -> Self {
        FieldElem { a, b, c, d }
    }

    pub fn rational(q: Rational64) -> Self {
        FieldElem::new(
            q,
            Rational64::zero(),
            Rational64::zero(),
            Rational64::zero(),
        )
    }

    pub fn int(n: i64) -> Self {
        FieldElem::rational(Rational64::from_integer(n))
    }

    pub fn zero() -> Self {
        FieldElem::int(0)
    }

    pub fn one() -> Self {
        FieldElem::int(1)
    }

    pub fn sqrt2() -> Self {
        FieldElem::new(r(0, 1), r(1, 1), r(0, 1), r(0, 1))
    }

    pub fn sqrt5() -> Self {
        FieldElem::new(r(0, 1), r(0, 1), r(1, 1), r(0, 1))
    }

    pub fn sqrt10() -> Self {
        FieldElem::new(r(0, 1), r(0, 1), r(0, 1), r(1, 1))
    }

    /// The golden ratio (1 + √5)/2.
    pub fn phi() -> Self {
        FieldElem::new(r(1, 2), r(0, 1), r(1, 2), r(0, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn scale(&self, q: Rational64) -> Self {
        FieldElem::new(self.a * q, self.b * q, self.c * q, self.d * q)
    }

    pub fn embed_real(&self) -> f64 {
        let f = |q: Rational64| *q.numer() as f64 / *q.denom() as f64;
        f(self.a)
            + f(self.b) * std::f64::consts::SQRT_2
            + f(self.c) * 5f64.sqrt()
            + f(self.d) * 10f64.sqrt()
    }

    pub fn inv(&self) -> Result<Self, QuatError> {
        if self.is_zero() {
            return Err(QuatError::DivisionByZero);
        }
        // x = p + q√5 with p, q in ℚ(√2); 1/x = (p − q√5)/(p² − 5q²)
        let p = Q2(self.a, self.b);
        let q = Q2(self.c, self.d);
        let n = p.mul(p).sub(q.mul(q).scale(r(5, 1)));
        let ninv = n.inv();
        let num_p = p.mul(ninv);
        let num_q = q.mul(ninv).scale(r(-1, 1));
        Ok(FieldElem::new(num_p.0, num_p.1, num_q.0, num_q.1))
    }

    /// Exact sign of the real value.
    pub fn signum(&self) -> i32 {
        let p = Q2(self.a, self.b);
        let q = Q2(self.c, self.d);
        let (sp, sq) = (p.signum(), q.signum());
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        let diff = p.mul(p).sub(q.mul(q).scale(r(5, 1))).signum();
        if sp > 0 {
            diff
        } else {
            -diff
        }
    }
}

/// Element `x + y√2` of ℚ(√2), used for inversion and sign tests.
#[derive(Clone, Copy)]
struct Q2(Rational64, Rational64);

impl Q2 {
    fn mul(self, o: Q2) -> Q2 {
        Q2(
            self.0 * o.0 + r(2, 1) * self.1 * o.1,
            self.0 * o.1 + self.1 * o.0,
        )
    }

    fn sub(self, o: Q2) -> Q2 {
        Q2(self.0 - o.0, self.1 - o.1)
    }

    fn scale(self, k: Rational64) -> Q2 {
        Q2(self.0 * k, self.1 * k)
    }

    fn inv(self) -> Q2 {
        let n = self.0 * self.0 - r(2, 1) * self.1 * self.1;
        Q2(self.0 / n, -self.1 / n)
    }

    fn signum(self) -> i32 {
        let s = |q: Rational64| {
            if q.is_positive() {
                1
            } else if q.is_negative() {
                -1
            } else {
                0
            }
        };
        let (sx, sy) = (s(self.0), s(self.1));
        if sy == 0 {
            return sx;
        }
        if sx == 0 || sx == sy {
            return sy;
        }
        let diff = s(self.0 * self.0 - r(2, 1) * self.1 * self.1);
        if sx > 0 {
            diff
        } else {
            -diff
        }
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: Self) -> Self {
        FieldElem::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: Self) -> Self {
        FieldElem::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        FieldElem::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: Self) -> Self {
        let two = r(2, 1);
        let five = r(5, 1);
        let ten = r(10, 1);
        FieldElem::new(
            self.a * o.a + two * self.b * o.b + five * self.c * o.c + ten * self.d * o.d,
            self.a * o.b + self.b * o.a + five * (self.c * o.d + self.d * o.c),
            self.a * o.c + self.c * o.a + two * (self.b * o.d + self.d * o.b),
            self.a * o.d + self.d * o.a + self.b * o.c + self.c * o.b,
        )
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by real value.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (*self - *other).signum().cmp(&0)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (coef, unit) in [
            (self.a, ""),
            (self.b, "√2"),
            (self.c, "√5"),
            (self.d, "√10"),
        ] {
            if coef.is_zero() {
                continue;
            }
            if wrote {
                f.write_str(if coef.is_negative() { " - " } else { " + " })?;
            } else if coef.is_negative() {
                f.write_str("-")?;
            }
            let m = coef.abs();
            if unit.is_empty() || !m.is_one() {
                write!(f, "{m}")?;
            }
            f.write_str(unit)?;
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `w + x·i + y·j + z·k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    pub w: FieldElem,
    pub x: FieldElem,
    pub y: FieldElem,
    pub z: FieldElem,
}

impl Quaternion {
    pub fn new(w: FieldElem, x: FieldElem, y: FieldElem, z: FieldElem) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn one() -> Self {
        let (o, z) = (FieldElem::one(), FieldElem::zero());
        Quaternion::new(o, z, z, z)
    }

    pub fn i() -> Self {
        let (o, z) = (FieldElem::one(), FieldElem::zero());
        Quaternion::new(z, o, z, z)
    }

    pub fn j() -> Self {
        let (o, z) = (FieldElem::one(), FieldElem::zero());
        Quaternion::new(z, z, o, z)
    }

    pub fn k() -> Self {
        let (o, z) = (FieldElem::one(), FieldElem::zero());
        Quaternion::new(z, z, z, o)
    }

    pub fn from_array(c: [FieldElem; 4]) -> Self {
        Quaternion::new(c[0], c[1], c[2], c[3])
    }

    pub fn coords(&self) -> [FieldElem; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm(&self) -> FieldElem {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn inverse(&self) -> Result<Self, QuatError> {
        let n = self.norm().inv()?;
        let c = self.conj();
        Ok(Quaternion::new(c.w * n, c.x * n, c.y * n, c.z * n))
    }

    pub fn neg(&self) -> Self {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(&self, s: FieldElem) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Real inner product of the coordinate vectors.
    pub fn dot(&self, o: &Quaternion) -> FieldElem {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn to_f64(&self) -> [f64; 4] {
        self.coords().map(|c| c.embed_real())
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.w, self.x, self.y, self.z)
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryKind {
    T,
    O,
    I,
}

impl BinaryKind {
    pub fn order(self) -> usize {
        match self {
            BinaryKind::T => 24,
            BinaryKind::O => 48,
            BinaryKind::I => 120,
        }
    }
}

pub(crate) fn signed_placements(values: [FieldElem; 4], perms: &[[usize; 4]]) -> Vec<Quaternion> {
    let mut out = Vec::new();
    for p in perms {
        for signs in 0..16u32 {
            let mut c = [FieldElem::zero(); 4];
            for k in 0..4 {
                let v = values[k];
                c[p[k]] = if signs >> k & 1 == 1 { -v } else { v };
            }
            out.push(Quaternion::from_array(c));
        }
    }
    out
}

pub(crate) fn all_perms4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut s = p;
                    s.sort_unstable();
                    if s == [0, 1, 2, 3] {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

pub(crate) fn is_even(p: &[usize; 4]) -> bool {
    let inversions = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    inversions % 2 == 0
}

pub(crate) fn dedup_sorted(v: Vec<Quaternion>) -> Vec<Quaternion> {
    let set: HashSet<Quaternion> = v.into_iter().collect();
    let mut out: Vec<Quaternion> = set.into_iter().collect();
    out.sort();
    out
}

fn coordinate_set(kind: BinaryKind) -> Vec<Quaternion> {
    let z = FieldElem::zero();
    let one = FieldElem::one();
    let half = FieldElem::rational(r(1, 2));
    let perms = all_perms4();
    let mut out = signed_placements([one, z, z, z], &perms);
    out.extend(signed_placements([half; 4], &perms[..1]));
    match kind {
        BinaryKind::T => {}
        BinaryKind::O => {
            let s = FieldElem::sqrt2().scale(r(1, 2));
            out.extend(signed_placements([s, s, z, z], &perms));
        }
        BinaryKind::I => {
            let phi = FieldElem::phi();
            let phi_inv = phi - one;
            let even: Vec<[usize; 4]> = perms.iter().copied().filter(is_even).collect();
            out.extend(signed_placements(
                [z, half, phi_inv.scale(r(1, 2)), phi.scale(r(1, 2))],
                &even,
            ));
        }
    }
    dedup_sorted(out)
}

fn assert_closed(kind: BinaryKind, elems: &[Quaternion]) {
    let set: HashSet<&Quaternion> = elems.iter().collect();
    assert_eq!(
        elems.len(),
        kind.order(),
        "binary group {kind:?} has wrong size"
    );
    for a in elems {
        assert!(a.norm() == FieldElem::one(), "{a} is not a unit");
        for b in elems {
            assert!(set.contains(&(*a * *b)), "binary group {kind:?} not closed");
        }
    }
}

/// The binary polyhedral group as a sorted list of unit quaternions. The
/// product table is checked exhaustively on first use.
pub fn binary_group(kind: BinaryKind) -> &'static [Quaternion] {
    static T: OnceLock<Vec<Quaternion>> = OnceLock::new();
    static O: OnceLock<Vec<Quaternion>> = OnceLock::new();
    static I: OnceLock<Vec<Quaternion>> = OnceLock::new();
    let cell = match kind {
        BinaryKind::T => &T,
        BinaryKind::O => &O,
        BinaryKind::I => &I,
    };
    cell.get_or_init(|| {
        let g = coordinate_set(kind);
        assert_closed(kind, &g);
        g
    })
}

/// Finite subgroup of SO(4) given by quaternion pairs acting on a point set.
#[derive(Debug, Clone)]
pub struct QuatPairGroup {
    /// One representative of each class `{(a, b), (−a, −b)}`.
    pub pairs: Vec<(Quaternion, Quaternion)>,
    /// The point set, in increasing order.
    pub orbit: Vec<Quaternion>,
    /// Pairs used as generators of `perm_rep`.
    pub generator_pairs: Vec<(Quaternion, Quaternion)>,
    pub perm_rep: PermutationGroup,
}

/// `a·q·b⁻¹` for unit `b`.
pub fn act(pair: &(Quaternion, Quaternion), q: &Quaternion) -> Quaternion {
    pair.0 * *q * pair.1.conj()
}

impl QuatPairGroup {
    pub fn index_of_point(&self, q: &Quaternion) -> Option<usize> {
        self.orbit.binary_search(q).ok()
    }

    /// The permutation of the point set induced by a pair.
    pub fn permutation_of(&self, pair: &(Quaternion, Quaternion)) -> Option<Permutation> {
        let images = self
            .orbit
            .iter()
            .map(|q| self.index_of_point(&act(pair, q)).map(|i| i as u32))
            .collect::<Option<Vec<u32>>>()?;
        Permutation::from_images(images).ok()
    }

    /// Pairs `(a, b)` acting trivially on every point.
    pub fn kernel(
        &self,
        left: &[Quaternion],
        right: &[Quaternion],
    ) -> Vec<(Quaternion, Quaternion)> {
        // a·1·b⁻¹ = 1 forces a = b
        let rset: HashSet<&Quaternion> = right.iter().collect();
        left.iter()
            .filter(|a| rset.contains(a))
            .map(|a| (*a, *a))
            .filter(|p| self.orbit.iter().all(|q| act(p, q) == *q))
            .collect()
    }
}

/// Greedy generating set of a finite quaternion group.
fn quaternion_generators(group: &[Quaternion]) -> Vec<Quaternion> {
    let mut gens: Vec<Quaternion> = Vec::new();
    let mut span: HashSet<Quaternion> = HashSet::from([Quaternion::one()]);
    for g in group {
        if span.len() == group.len() {
            break;
        }
        if span.contains(g) {
            continue;
        }
        gens.push(*g);
        let mut frontier: Vec<Quaternion> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = x * *s;
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

fn build_pair_group(left: &[Quaternion], right: &[Quaternion]) -> QuatPairGroup {
    let orbit = dedup_sorted(
        left.iter()
            .flat_map(|a| right.iter().map(move |b| *a * *b))
            .collect(),
    );
    let pairs = left
        .iter()
        .flat_map(|a| right.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| (*a, *b) >= (a.neg(), b.neg()))
        .collect();
    let one = Quaternion::one();
    let generator_pairs: Vec<(Quaternion, Quaternion)> = quaternion_generators(left)
        .into_iter()
        .map(|a| (a, one))
        .chain(quaternion_generators(right).into_iter().map(|b| (one, b)))
        .collect();
    let mut g = QuatPairGroup {
        pairs,
        orbit,
        generator_pairs,
        perm_rep: PermutationGroup::trivial(1),
    };
    let gens = g
        .generator_pairs
        .iter()
        .map(|p| g.permutation_of(p).expect("pair group preserves its orbit"))
        .collect();
    g.perm_rep = PermutationGroup::closure(g.orbit.len(), gens).expect("pair group closure");
    g
}

/// The central product of 2I and 2O acting on Q = 2I·2O.
pub fn central_product_io() -> &'static QuatPairGroup {
    static IO: OnceLock<QuatPairGroup> = OnceLock::new();
    IO.get_or_init(|| {
        let left = binary_group(BinaryKind::I);
        let right = binary_group(BinaryKind::O);
        let g = build_pair_group(left, right);
        let kernel = g.kernel(left, right);
        assert_eq!(
            kernel.len(),
            2,
            "action of 2I x 2O has kernel other than ±(1,1)"
        );
        assert_eq!(
            g.perm_rep.order(),
            g.pairs.len(),
            "permutation image is not faithful"
        );
        g
    })
}

/// Coordinates of 2I as floating point, for geometry.
pub fn binary_icosahedral_f64() -> Vec<[f64; 4]> {
    binary_group(BinaryKind::I)
        .iter()
        .map(Quaternion::to_f64)
        .collect()
}

/// Point to position lookup.
pub fn index_map(points: &[Quaternion]) -> HashMap<Quaternion, usize> {
    points.iter().enumerate().map(|(i, q)| (*q, i)).collect()
}
