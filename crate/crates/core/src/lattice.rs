//! Intersection lattices of blown-up projective planes.
//!
//! Classes are written in the basis `(L, E_1, ..., E_k)` where `L` is the
//! class of a line and `E_i` are the exceptional divisors. The form is
//! `diag(+1, -1, ..., -1)` and the canonical class is `K = -3L + E_1 + ... + E_k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest blowup count handled by the enumerators (del Pezzo range).
pub const MAX_BLOWUPS: usize = 8;

/// An integer coordinate vector in some lattice basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyClass(Vec<i64>);

impl HomologyClass {
    pub fn new(coords: Vec<i64>) -> Self {
        HomologyClass(coords)
    }

    pub fn zero(rank: usize) -> Self {
        HomologyClass(vec![0; rank])
    }

    /// The `i`-th standard basis vector.
    pub fn unit(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        HomologyClass(c)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Greatest common divisor of the coordinates (0 for the zero class).
    pub fn content(&self) -> i64 {
        self.0
            .iter()
            .fold(0i64, |g, &c| num_integer::gcd(g, c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Representative with first nonzero coordinate positive.
    pub fn sign_normalized(&self) -> Self {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => -self.clone(),
            _ => self.clone(),
        }
    }

    pub fn scaled(&self, s: i64) -> Self {
        HomologyClass(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: i64, other: &HomologyClass) -> Self {
        debug_assert_eq!(self.rank(), other.rank());
        HomologyClass(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }
}

impl From<Vec<i64>> for HomologyClass {
    fn from(v: Vec<i64>) -> Self {
        HomologyClass(v)
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl Add for &HomologyClass {
    type Output = HomologyClass;
    fn add(self, rhs: &HomologyClass) -> HomologyClass {
        self.add_scaled(1, rhs)
    }
}

impl Sub for &HomologyClass {
    type Output = HomologyClass;
    fn sub(self, rhs: &HomologyClass) -> HomologyClass {
        self.add_scaled(-1, rhs)
    }
}

impl Add for HomologyClass {
    type Output = HomologyClass;
    fn add(self, rhs: HomologyClass) -> HomologyClass {
        &self + &rhs
    }
}

impl Sub for HomologyClass {
    type Output = HomologyClass;
    fn sub(self, rhs: HomologyClass) -> HomologyClass {
        &self - &rhs
    }
}

impl Neg for HomologyClass {
    type Output = HomologyClass;
    fn neg(self) -> HomologyClass {
        self.scaled(-1)
    }
}

impl Mul<&HomologyClass> for i64 {
    type Output = HomologyClass;
    fn mul(self, rhs: &HomologyClass) -> HomologyClass {
        rhs.scaled(self)
    }
}

/// `H_2(CP^2 # k CP^2-bar; Z)` with its intersection form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlowupLattice {
    k: usize,
    canonical: HomologyClass,
}

impl BlowupLattice {
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=MAX_BLOWUPS).contains(&k) {
            return Err(Error::UnsupportedRank {
                k,
                allowed: "1..=8",
            });
        }
        let mut c = vec![1; k + 1];
        c[0] = -3;
        Ok(BlowupLattice {
            k,
            canonical: HomologyClass(c),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.k + 1
    }

    /// Diagonal entry of the Gram matrix at index `i`.
    #[inline]
    pub fn gram_diag(&self, i: usize) -> i64 {
        if i == 0 {
            1
        } else {
            -1
        }
    }

    pub fn gram(&self) -> Vec<Vec<i64>> {
        (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| if i == j { self.gram_diag(i) } else { 0 })
                    .collect()
            })
            .collect()
    }

    pub fn canonical(&self) -> &HomologyClass {
        &self.canonical
    }

    pub fn line(&self) -> HomologyClass {
        HomologyClass::unit(self.rank(), 0)
    }

    /// `E_i` for `1 <= i <= k`.
    pub fn exceptional_divisor(&self, i: usize) -> HomologyClass {
        assert!((1..=self.k).contains(&i), "E_{i} outside 1..={}", self.k);
        HomologyClass::unit(self.rank(), i)
    }

    /// Builds a class from `(a, [b_1..b_k])` meaning `aL - sum b_i E_i`.
    pub fn class_from_line_form(&self, a: i64, b: &[i64]) -> Result<HomologyClass> {
        self.check_len(b.len() + 1)?;
        let mut c = Vec::with_capacity(self.rank());
        c.push(a);
        c.extend(b.iter().map(|x| -x));
        Ok(HomologyClass(c))
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got,
            });
        }
        Ok(())
    }

    pub fn check_class(&self, x: &HomologyClass) -> Result<()> {
        self.check_len(x.rank())
    }

    pub fn pairing(&self, x: &HomologyClass, y: &HomologyClass) -> Result<i64> {
        self.check_len(x.rank())?;
        self.check_len(y.rank())?;
        Ok(self.pairing_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn pairing_unchecked(&self, x: &HomologyClass, y: &HomologyClass) -> i64 {
        pair_diag(&x.0, &y.0)
    }

    pub fn square(&self, x: &HomologyClass) -> Result<i64> {
        self.pairing(x, x)
    }

    /// `c_1(A) = -K.A`.
    pub fn c1(&self, a: &HomologyClass) -> Result<i64> {
        Ok(-self.pairing(&self.canonical, a)?)
    }

    pub fn is_root(&self, l: &HomologyClass) -> Result<bool> {
        Ok(self.square(l)? == -2)
    }

    pub fn ensure_root(&self, l: &HomologyClass) -> Result<()> {
        let sq = self.square(l)?;
        if sq != -2 {
            return Err(Error::NotARoot {
                class: l.0.clone(),
                square: sq,
            });
        }
        Ok(())
    }

    /// Picard-Lefschetz reflection `x + (x.l) l` in a (-2)-class `l`.
    pub fn reflect(&self, l: &HomologyClass, x: &HomologyClass) -> Result<HomologyClass> {
        self.ensure_root(l)?;
        self.check_class(x)?;
        Ok(self.reflect_unchecked(l, x))
    }

    #[inline]
    pub(crate) fn reflect_unchecked(&self, l: &HomologyClass, x: &HomologyClass) -> HomologyClass {
        let c = self.pairing_unchecked(x, l);
        x.add_scaled(c, l)
    }

    /// Simple roots `E_1-E_2, ..., E_{k-1}-E_k` and, for `k >= 3`, `L-E_1-E_2-E_3`.
    ///
    /// For `k >= 3` they form a Z-basis of `K^perp`.
    pub fn simple_roots(&self) -> Vec<HomologyClass> {
        let n = self.rank();
        let mut roots = Vec::new();
        for i in 1..self.k {
            let mut c = vec![0; n];
            c[i] = 1;
            c[i + 1] = -1;
            roots.push(HomologyClass(c));
        }
        if self.k >= 3 {
            let mut c = vec![0; n];
            c[0] = 1;
            c[1] = -1;
            c[2] = -1;
            c[3] = -1;
            roots.push(HomologyClass(c));
        }
        roots
    }

    /// Exceptional classes: `c_1(A) = 1`, `A.A = -1`.
    pub fn enumerate_exceptional(&self) -> ClassSet {
        // aL - sum b_i E_i with sum b_i = 3a - 1, sum b_i^2 = a^2 + 1
        let members = self.enumerate_line_forms(
            |a| 3 * a - 1,
            |a| a * a + 1,
        );
        ClassSet::from_members(self.clone(), ClassPredicate::Exceptional, members)
    }

    /// Roots: `A.K = 0`, `A.A = -2`.
    pub fn enumerate_roots(&self) -> ClassSet {
        let members = self.enumerate_line_forms(|a| 3 * a, |a| a * a + 2);
        ClassSet::from_members(self.clone(), ClassPredicate::Root, members)
    }

    /// Integers `a` admitted by Cauchy-Schwarz `sum(a)^2 <= k * sq(a)`.
    fn line_coefficient_range(
        &self,
        sum: impl Fn(i64) -> i64,
        sq: impl Fn(i64) -> i64,
    ) -> Vec<i64> {
        let k = self.k as i64;
        // (9-k)a^2 dominates for k <= 8, so |a| <= 64 is far outside the feasible set
        (-64..=64)
            .filter(|&a| {
                let s = sum(a);
                s * s <= k * sq(a)
            })
            .collect()
    }

    fn enumerate_line_forms(
        &self,
        sum: impl Fn(i64) -> i64 + Copy,
        sq: impl Fn(i64) -> i64 + Copy,
    ) -> Vec<HomologyClass> {
        let mut out = Vec::new();
        let mut b = vec![0i64; self.k];
        for a in self.line_coefficient_range(sum, sq) {
            fill_b(&mut b, 0, sum(a), sq(a), &mut |b| {
                let mut c = Vec::with_capacity(self.rank());
                c.push(a);
                c.extend(b.iter().map(|x| -x));
                out.push(HomologyClass(c));
            });
        }
        out
    }

    /// `A -> (k-6)(A.K)K - A`, defined for `k` in `{7, 8}`.
    pub fn bar_involution(&self, a: &HomologyClass) -> Result<HomologyClass> {
        if !(7..=8).contains(&self.k) {
            return Err(Error::UnsupportedRank {
                k: self.k,
                allowed: "7..=8",
            });
        }
        let ak = self.pairing(a, &self.canonical)?;
        let coef = (self.k as i64 - 6) * ak;
        Ok(self.canonical.scaled(coef) - a.clone())
    }
}

#[inline]
pub(crate) fn pair_diag(x: &[i64], y: &[i64]) -> i64 {
    let mut s = x[0] * y[0];
    for i in 1..x.len() {
        s -= x[i] * y[i];
    }
    s
}

/// Fills `b[i..]` with all integer vectors of the remaining `sum` and
/// `sq` (sum of squares), pruning by Cauchy-Schwarz.
fn fill_b(b: &mut [i64], i: usize, sum: i64, sq: i64, emit: &mut impl FnMut(&[i64])) {
    let rem = (b.len() - i) as i64;
    if rem == 0 {
        if sum == 0 && sq == 0 {
            emit(b);
        }
        return;
    }
    if sq < 0 || sum * sum > rem * sq {
        return;
    }
    let bound = isqrt(sq);
    for x in -bound..=bound {
        b[i] = x;
        fill_b(b, i + 1, sum - x, sq - x * x, emit);
    }
    b[i] = 0;
}

pub(crate) fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassPredicate {
    Exceptional,
    Root,
}

impl ClassPredicate {
    pub fn holds(&self, lat: &BlowupLattice, a: &HomologyClass) -> bool {
        let sq = lat.pairing_unchecked(a, a);
        let ak = lat.pairing_unchecked(a, lat.canonical());
        match self {
            ClassPredicate::Exceptional => sq == -1 && ak == -1,
            ClassPredicate::Root => sq == -2 && ak == 0,
        }
    }
}

/// A sorted, deduplicated set of classes satisfying a predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassSet {
    lattice: BlowupLattice,
    predicate: ClassPredicate,
    members: Vec<HomologyClass>,
}

impl ClassSet {
    fn from_members(
        lattice: BlowupLattice,
        predicate: ClassPredicate,
        mut members: Vec<HomologyClass>,
    ) -> Self {
        members.sort();
        members.dedup();
        debug_assert!(members.iter().all(|m| predicate.holds(&lattice, m)));
        ClassSet {
            lattice,
            predicate,
            members,
        }
    }

    pub fn lattice(&self) -> &BlowupLattice {
        &self.lattice
    }

    pub fn predicate(&self) -> ClassPredicate {
        self.predicate
    }

    pub fn members(&self) -> &[HomologyClass] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &HomologyClass) -> bool {
        self.members.binary_search(a).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, HomologyClass> {
        self.members.iter()
    }

    /// Members up to sign, each sign-normalized, sorted.
    pub fn sign_representatives(&self) -> Vec<HomologyClass> {
        let mut v: Vec<_> = self.members.iter().map(|m| m.sign_normalized()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "header": {
                "k": self.lattice.k(),
                "predicate": self.predicate,
                "count": self.members.len(),
            },
            "classes": self.members,
        })
    }

    /// One class per line, comma-separated coordinates.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for m in &self.members {
            let row: Vec<String> = m.coords().iter().map(|c| c.to_string()).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

impl<'a> IntoIterator for &'a ClassSet {
    type Item = &'a HomologyClass;
    type IntoIter = std::slice::Iter<'a, HomologyClass>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(k: usize) -> BlowupLattice {
        BlowupLattice::new(k).unwrap()
    }

    fn conic(l: &BlowupLattice) -> HomologyClass {
        // 2L - E_1 - ... - E_5
        l.class_from_line_form(2, &[1, 1, 1, 1, 1]).unwrap()
    }

    #[test]
    fn gram_and_canonical() {
        for k in 1..=8 {
            let l = lat(k);
            let kk = l.square(l.canonical()).unwrap();
            assert_eq!(kk, 9 - k as i64);
            let g = l.gram();
            assert_eq!(g[0][0], 1);
            assert!((1..=k).all(|i| g[i][i] == -1));
        }
    }

    #[test]
    fn pairing_examples() {
        let l = lat(5);
        let line = l.line();
        let e1 = l.exceptional_divisor(1);
        assert_eq!(l.pairing(&line, &line).unwrap(), 1);
        assert_eq!(l.pairing(&e1, &e1).unwrap(), -1);
        assert_eq!(l.pairing(&conic(&l), &e1).unwrap(), 1);
    }

    #[test]
    fn pairing_dimension_mismatch() {
        let l = lat(5);
        let bad = HomologyClass::zero(4);
        assert!(matches!(
            l.pairing(&bad, &l.line()),
            Err(Error::DimensionMismatch { expected: 6, got: 4 })
        ));
    }

    #[test]
    fn c1_examples() {
        let l = lat(5);
        assert_eq!(l.c1(&l.exceptional_divisor(1)).unwrap(), 1);
        assert_eq!(l.c1(&l.line()).unwrap(), 3);
        assert_eq!(l.c1(&conic(&l)).unwrap(), 1);
    }

    #[test]
    fn reflect_examples() {
        let l = lat(4);
        let e1 = l.exceptional_divisor(1);
        let e2 = l.exceptional_divisor(2);
        let r = &e1 - &e2;
        assert_eq!(l.reflect(&r, &e1).unwrap(), e2);
        assert_eq!(l.reflect(&r, &r).unwrap(), -r.clone());
        let x = l.exceptional_divisor(3);
        assert_eq!(l.reflect(&r, &x).unwrap(), x);
        assert!(matches!(
            l.reflect(&e1, &e2),
            Err(Error::NotARoot { square: -1, .. })
        ));
    }

    #[test]
    fn small_counts() {
        assert_eq!(lat(5).enumerate_exceptional().len(), 16);
        assert!(lat(5).enumerate_exceptional().contains(&conic(&lat(5))));
        assert_eq!(lat(6).enumerate_exceptional().len(), 27);
        assert_eq!(lat(4).enumerate_roots().len(), 20);
        let l = lat(4);
        assert!(l
            .enumerate_roots()
            .contains(&(&l.exceptional_divisor(1) - &l.exceptional_divisor(2))));
        assert_eq!(lat(1).enumerate_roots().len(), 0);
    }

    #[test]
    fn unsupported_rank() {
        assert!(matches!(
            BlowupLattice::new(9),
            Err(Error::UnsupportedRank { k: 9, .. })
        ));
        assert!(BlowupLattice::new(0).is_err());
    }

    #[test]
    fn bar_involution_example() {
        let l = lat(8);
        let e1 = l.exceptional_divisor(1);
        let b = l.bar_involution(&e1).unwrap();
        let expected = l
            .class_from_line_form(6, &[3, 2, 2, 2, 2, 2, 2, 2])
            .unwrap();
        assert_eq!(b, expected);
        assert_eq!(l.c1(&b).unwrap(), 1);
        assert_eq!(l.square(&b).unwrap(), -1);
        assert!(lat(6).bar_involution(&lat(6).line()).is_err());
    }

    #[test]
    fn simple_roots_are_roots_orthogonal_to_k() {
        for k in 3..=8 {
            let l = lat(k);
            let sr = l.simple_roots();
            assert_eq!(sr.len(), k);
            for r in &sr {
                assert_eq!(l.square(r).unwrap(), -2);
                assert_eq!(l.pairing(r, l.canonical()).unwrap(), 0);
            }
        }
    }

    #[test]
    fn sign_normalization() {
        let c = HomologyClass::new(vec![0, -1, 1]);
        assert_eq!(c.sign_normalized(), HomologyClass::new(vec![0, 1, -1]));
        assert_eq!(c.sign_normalized().sign_normalized(), c.sign_normalized());
        assert!(HomologyClass::zero(3).sign_normalized().is_zero());
    }

    #[test]
    fn class_set_json_header() {
        let s = lat(3).enumerate_exceptional();
        let j = s.to_json();
        assert_eq!(j["header"]["count"], 6);
        assert_eq!(j["header"]["predicate"], "exceptional");
        assert_eq!(j["classes"].as_array().unwrap().len(), 6);
    }
}
