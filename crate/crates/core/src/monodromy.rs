//! Hurwitz moves on ordered tuples of vanishing cycles, at the level of homology.
//!
//! Two lattice flavours are supported:
//!
//! - reflection mode: a blowup lattice, cycles are (-2)-classes and each
//!   twist acts by the Picard-Lefschetz reflection `x + (x.l) l`;
//! - transvection mode: `H_1` of a closed genus-`g` surface with basis
//!   `(a_1, b_1, ..., a_g, b_g)`, `a_i.b_i = 1`, twists `x + (x.c) c`.
//!
//! Cycles are unoriented and stored with first nonzero coordinate positive.
//! Products are composed so that the first cycle of a tuple acts last:
//! `total_monodromy(c_1, ..., c_m) = T_1 T_2 ... T_m` on column vectors.
//! Agreement of total monodromies only shows that a relation is
//! homologically consistent; it never proves the relation among actual twists.

use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BlowupLattice, HomologyClass};
use crate::weyl::{Capped, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Reflection,
    Transvection,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reflect" | "reflection" => Ok(Mode::Reflection),
            "transvect" | "transvection" => Ok(Mode::Transvection),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// `H_1` of a closed surface of genus `g` with its standard symplectic form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymplecticLattice {
    genus: usize,
}

impl SymplecticLattice {
    pub fn new(genus: usize) -> Result<Self> {
        if genus == 0 {
            return Err(Error::UnsupportedRank {
                k: 0,
                allowed: "genus >= 1",
            });
        }
        Ok(SymplecticLattice { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    fn pairing_unchecked(&self, x: &[i64], y: &[i64]) -> i64 {
        x.chunks(2)
            .zip(y.chunks(2))
            .map(|(p, q)| p[0] * q[1] - p[1] * q[0])
            .sum()
    }
}

/// The lattice a tuple of cycles lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CycleLattice {
    Reflection(BlowupLattice),
    Transvection(SymplecticLattice),
}

impl CycleLattice {
    /// Lattice of the given mode and rank (`k + 1` or `2g`).
    pub fn for_rank(mode: Mode, rank: usize) -> Result<Self> {
        match mode {
            Mode::Reflection => Ok(CycleLattice::Reflection(BlowupLattice::new(
                rank.saturating_sub(1),
            )?)),
            Mode::Transvection => {
                if rank & 1 == 1 {
                    return Err(Error::DimensionMismatch {
                        expected: rank + 1,
                        got: rank,
                    });
                }
                Ok(CycleLattice::Transvection(SymplecticLattice::new(rank / 2)?))
            }
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            CycleLattice::Reflection(_) => Mode::Reflection,
            CycleLattice::Transvection(_) => Mode::Transvection,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            CycleLattice::Reflection(l) => l.rank(),
            CycleLattice::Transvection(s) => s.rank(),
        }
    }

    fn check(&self, x: &HomologyClass) -> Result<()> {
        if x.rank() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: x.rank(),
            });
        }
        Ok(())
    }

    pub fn pairing(&self, x: &HomologyClass, y: &HomologyClass) -> Result<i64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.pairing_unchecked(x, y))
    }

    fn pairing_unchecked(&self, x: &HomologyClass, y: &HomologyClass) -> i64 {
        match self {
            CycleLattice::Reflection(l) => l.pairing_unchecked(x, y),
            CycleLattice::Transvection(s) => s.pairing_unchecked(x.coords(), y.coords()),
        }
    }

    /// Checks that `c` may carry a twist: a root, or a primitive class.
    pub fn validate_cycle(&self, c: &HomologyClass) -> Result<()> {
        self.check(c)?;
        match self {
            CycleLattice::Reflection(l) => l.ensure_root(c),
            CycleLattice::Transvection(_) => {
                if !c.is_primitive() {
                    return Err(Error::NotPrimitive {
                        class: c.coords().to_vec(),
                    });
                }
                Ok(())
            }
        }
    }

    /// `T_c(x) = x + (x.c) c`.
    pub fn twist(&self, c: &HomologyClass, x: &HomologyClass) -> HomologyClass {
        x.add_scaled(self.pairing_unchecked(x, c), c)
    }

    /// `x + sign (x.c) c` in `i128`, `None` if a coordinate leaves `i64`.
    fn checked_twist(&self, c: &HomologyClass, x: &HomologyClass, sign: i128) -> Option<HomologyClass> {
        let (xs, cs) = (x.coords(), c.coords());
        let p: i128 = match self {
            CycleLattice::Reflection(l) => (0..xs.len())
                .map(|i| l.gram_diag(i) as i128 * xs[i] as i128 * cs[i] as i128)
                .sum(),
            CycleLattice::Transvection(_) => xs
                .chunks(2)
                .zip(cs.chunks(2))
                .map(|(a, b)| a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128)
                .sum(),
        };
        let coords = xs
            .iter()
            .zip(cs)
            .map(|(&xi, &ci)| {
                let v = (xi as i128).checked_add(sign.checked_mul(p)?.checked_mul(ci as i128)?)?;
                i64::try_from(v).ok()
            })
            .collect::<Option<Vec<i64>>>()?;
        Some(HomologyClass::new(coords))
    }

    /// `T_c^{-1}(x)`; equal to `T_c(x)` in reflection mode.
    pub fn inverse_twist(&self, c: &HomologyClass, x: &HomologyClass) -> HomologyClass {
        match self {
            CycleLattice::Reflection(_) => self.twist(c, x),
            CycleLattice::Transvection(_) => x.add_scaled(-self.pairing_unchecked(x, c), c),
        }
    }

    pub fn form_matrix(&self) -> IntMatrix {
        let n = self.rank();
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        self.pairing_unchecked(&HomologyClass::unit(n, i), &HomologyClass::unit(n, j))
                    })
                    .collect()
            })
            .collect();
        IntMatrix::from_rows(&rows)
    }
}

/// Matrix of the twist along `c`.
pub fn twist_matrix(lat: &CycleLattice, c: &HomologyClass) -> Result<IntMatrix> {
    lat.validate_cycle(c)?;
    twist_matrix_unchecked(lat, c)
}

fn twist_matrix_unchecked(lat: &CycleLattice, c: &HomologyClass) -> Result<IntMatrix> {
    let n = lat.rank();
    let cols = (0..n)
        .map(|j| {
            lat.checked_twist(c, &HomologyClass::unit(n, j), 1)
                .ok_or_else(|| Error::Overflow(format!("twist matrix of {c}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntMatrix::from_columns(&cols))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Inverse move: `(c, d) -> (d, T_d^{-1}(c))`.
    Left,
    /// `(c, d) -> (T_c(d), c)`.
    Right,
}

/// An ordered tuple of sign-normalized vanishing cycles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VanishingTuple {
    lattice: CycleLattice,
    cycles: Vec<HomologyClass>,
}

impl VanishingTuple {
    pub fn new(lattice: CycleLattice, cycles: Vec<HomologyClass>) -> Result<Self> {
        for c in &cycles {
            lattice.validate_cycle(c)?;
        }
        Ok(VanishingTuple {
            lattice,
            cycles: cycles.iter().map(|c| c.sign_normalized()).collect(),
        })
    }

    pub fn lattice(&self) -> &CycleLattice {
        &self.lattice
    }

    pub fn cycles(&self) -> &[HomologyClass] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Elementary Hurwitz move on positions `index`, `index + 1` (0-based).
    pub fn hurwitz_move(&self, index: usize, dir: Direction) -> Result<VanishingTuple> {
        if index + 1 >= self.cycles.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.cycles.len(),
            });
        }
        let mut cycles = self.cycles.clone();
        apply_move(&self.lattice, &mut cycles, index, dir)?;
        Ok(VanishingTuple {
            lattice: self.lattice.clone(),
            cycles,
        })
    }

    /// `T_1 T_2 ... T_m`; the first cycle acts last.
    pub fn total_monodromy(&self) -> Result<IntMatrix> {
        let n = self.lattice.rank();
        self.cycles.iter().try_fold(IntMatrix::identity(n), |acc, c| {
            acc.checked_mul(&twist_matrix_unchecked(&self.lattice, c)?)
                .ok_or_else(|| Error::Overflow(format!("total monodromy of {self}")))
        })
    }

    /// Whether the total monodromy equals `target`.
    pub fn verify_relation(&self, target: &IntMatrix) -> Result<bool> {
        Ok(target.dim() == self.lattice.rank() && self.total_monodromy()? == *target)
    }

    /// Size of the orbit under all elementary moves, breadth first.
    pub fn hurwitz_orbit(&self, cap: usize) -> Result<Capped> {
        let mut seen: IndexSet<Vec<HomologyClass>> = IndexSet::new();
        seen.insert(self.cycles.clone());
        let mut cursor = 0;
        let m = self.cycles.len();
        while cursor < seen.len() {
            let current = seen[cursor].clone();
            cursor += 1;
            for index in 0..m.saturating_sub(1) {
                for dir in [Direction::Right, Direction::Left] {
                    let mut next = current.clone();
                    apply_move(&self.lattice, &mut next, index, dir)?;
                    seen.insert(next);
                    if seen.len() > cap {
                        return Ok(Capped::CapExceeded {
                            partial: seen.len(),
                            cap,
                        });
                    }
                }
            }
        }
        Ok(Capped::Complete { size: seen.len() })
    }

    /// One line of the batch format: classes as comma-separated integers,
    /// separated by `|`.
    pub fn to_batch_line(&self) -> String {
        self.cycles
            .iter()
            .map(|c| {
                c.coords()
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mode": self.lattice.mode(),
            "rank": self.lattice.rank(),
            "cycles": self.cycles,
        })
    }
}

impl fmt::Display for VanishingTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_batch_line())
    }
}

fn apply_move(lat: &CycleLattice, cycles: &mut [HomologyClass], i: usize, dir: Direction) -> Result<()> {
    let (c, d) = (cycles[i].clone(), cycles[i + 1].clone());
    let overflow = || Error::Overflow(format!("Hurwitz move at {i} on {c} | {d}"));
    match dir {
        Direction::Right => {
            cycles[i] = lat.checked_twist(&c, &d, 1).ok_or_else(overflow)?.sign_normalized();
            cycles[i + 1] = c.clone();
        }
        Direction::Left => {
            let sign = match lat {
                CycleLattice::Reflection(_) => 1,
                CycleLattice::Transvection(_) => -1,
            };
            cycles[i] = d.clone();
            cycles[i + 1] = lat.checked_twist(&d, &c, sign).ok_or_else(overflow)?.sign_normalized();
        }
    }
    Ok(())
}

/// Parses one batch line. Blank lines and `#` comments yield `None`.
pub fn parse_batch_line(line: &str, mode: Mode) -> Result<Option<VanishingTuple>> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let cycles: Vec<HomologyClass> = line
        .split('|')
        .map(|part| {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()
                .map(HomologyClass::new)
        })
        .collect::<Result<_>>()?;
    let rank = cycles[0].rank();
    let lattice = CycleLattice::for_rank(mode, rank)?;
    VanishingTuple::new(lattice, cycles).map(Some)
}

/// Parses a whole batch file.
pub fn parse_batch(text: &str, mode: Mode) -> Result<Vec<VanishingTuple>> {
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            parse_batch_line(line, mode)
                .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))
                .transpose()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BraidRelation {
    Commute,
    Braid,
    Neither,
}

/// Classifies the pair of twists by matrix products.
pub fn braid_relation_check(
    lat: &CycleLattice,
    a: &HomologyClass,
    b: &HomologyClass,
) -> Result<BraidRelation> {
    let ta = twist_matrix(lat, a)?;
    let tb = twist_matrix(lat, b)?;
    let mul = |x: &IntMatrix, y: &IntMatrix| {
        x.checked_mul(y)
            .ok_or_else(|| Error::Overflow(format!("braid check of {a} and {b}")))
    };
    let ab = mul(&ta, &tb)?;
    let ba = mul(&tb, &ta)?;
    if ab == ba {
        return Ok(BraidRelation::Commute);
    }
    if mul(&ab, &ta)? == mul(&ba, &tb)? {
        return Ok(BraidRelation::Braid);
    }
    Ok(BraidRelation::Neither)
}

/// Roots `l_1..l_n` with `|l_i.l_{i+1}| = 1` cyclically and all other
/// pairings zero, found by backtracking over sign-normalized roots.
pub fn find_cycle_configuration(lat: &BlowupLattice, n: usize) -> Result<Vec<HomologyClass>> {
    if n < 3 {
        return Err(Error::Config("cycle configurations need n >= 3".into()));
    }
    let roots = lat.enumerate_roots().sign_representatives();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    if search_cycle(lat, &roots, n, &mut chosen) {
        Ok(chosen.into_iter().map(|i| roots[i].clone()).collect())
    } else {
        Err(Error::NotFound(format!(
            "no {n}-cycle of roots at k = {} ({} roots up to sign)",
            lat.k(),
            roots.len()
        )))
    }
}

fn search_cycle(
    lat: &BlowupLattice,
    roots: &[HomologyClass],
    n: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    let pos = chosen.len();
    if pos == n {
        return true;
    }
    for (idx, r) in roots.iter().enumerate() {
        if chosen.contains(&idx) {
            continue;
        }
        let ok = chosen.iter().enumerate().all(|(j, &c)| {
            let p = lat.pairing_unchecked(r, &roots[c]).abs();
            let adjacent = j + 1 == pos || (pos == n - 1 && j == 0);
            if adjacent {
                p == 1
            } else {
                p == 0
            }
        });
        if ok {
            chosen.push(idx);
            if search_cycle(lat, roots, n, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Checks the cyclic pairing pattern of a configuration.
pub fn is_cycle_configuration(lat: &BlowupLattice, roots: &[HomologyClass]) -> bool {
    let n = roots.len();
    roots.iter().all(|r| lat.is_root(r).unwrap_or(false))
        && (0..n).all(|i| {
            (0..n).filter(|&j| j != i).all(|j| {
                let p = lat.pairing_unchecked(&roots[i], &roots[j]).abs();
                let adjacent = (i + 1) % n == j || (j + 1) % n == i;
                p == if adjacent { 1 } else { 0 }
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn refl(k: usize) -> (BlowupLattice, CycleLattice) {
        let l = BlowupLattice::new(k).unwrap();
        (l.clone(), CycleLattice::Reflection(l))
    }

    fn e_diff(l: &BlowupLattice, i: usize, j: usize) -> HomologyClass {
        &l.exceptional_divisor(i) - &l.exceptional_divisor(j)
    }

    #[test]
    fn reflection_twist_is_involution() {
        let (l, cl) = refl(4);
        let m = twist_matrix(&cl, &e_diff(&l, 1, 2)).unwrap();
        assert!(m.mul(&m).is_identity());
        let g = e_diff(&l, 1, 2);
        assert_eq!(m.apply(&g), -g);
        assert!(twist_matrix(&cl, &l.line()).is_err());
    }

    #[test]
    fn transvection_genus_one() {
        let cl = CycleLattice::Transvection(SymplecticLattice::new(1).unwrap());
        let a = HomologyClass::new(vec![1, 0]);
        let b = HomologyClass::new(vec![0, 1]);
        let m = twist_matrix(&cl, &a).unwrap();
        // b -> b + (b.a) a = b - a
        assert_eq!(m.apply(&b), HomologyClass::new(vec![-1, 1]));
        assert_eq!(m.apply(&a), a);
        assert!(m.preserves_form(&cl.form_matrix()));
        assert!(!m.mul(&m).is_identity());
        assert!(matches!(
            twist_matrix(&cl, &HomologyClass::new(vec![2, 0])),
            Err(Error::NotPrimitive { .. })
        ));
    }

    #[test]
    fn composition_order_first_acts_last() {
        let (l, cl) = refl(4);
        let a = e_diff(&l, 1, 2);
        let b = e_diff(&l, 2, 3);
        let t = VanishingTuple::new(cl.clone(), vec![a.clone(), b.clone()]).unwrap();
        let x = l.exceptional_divisor(3);
        let expected = cl.twist(&a, &cl.twist(&b, &x));
        assert_eq!(t.total_monodromy().unwrap().apply(&x), expected);
        assert_ne!(cl.twist(&b, &cl.twist(&a, &x)), expected);
    }

    #[test]
    fn empty_and_repeated_tuples() {
        let (l, cl) = refl(3);
        let empty = VanishingTuple::new(cl.clone(), vec![]).unwrap();
        assert!(empty.total_monodromy().unwrap().is_identity());
        let g = e_diff(&l, 1, 2);
        let gg = VanishingTuple::new(cl, vec![g.clone(), g]).unwrap();
        assert!(gg.total_monodromy().unwrap().is_identity());
        assert!(gg.verify_relation(&IntMatrix::identity(4)).unwrap());
    }

    #[test]
    fn disjoint_pair_swaps() {
        let (l, cl) = refl(4);
        let a = e_diff(&l, 1, 2);
        let b = e_diff(&l, 3, 4);
        let t = VanishingTuple::new(cl, vec![a.clone(), b.clone()]).unwrap();
        let moved = t.hurwitz_move(0, Direction::Right).unwrap();
        assert_eq!(moved.cycles(), &[b, a]);
        assert_eq!(t.hurwitz_orbit(100).unwrap(), Capped::Complete { size: 2 });
    }

    #[test]
    fn equal_pair_is_fixed() {
        let (l, cl) = refl(4);
        let g = e_diff(&l, 1, 2);
        let t = VanishingTuple::new(cl, vec![g.clone(), g]).unwrap();
        assert_eq!(t.hurwitz_move(0, Direction::Right).unwrap(), t);
        assert_eq!(t.hurwitz_orbit(100).unwrap(), Capped::Complete { size: 1 });
    }

    #[test]
    fn left_undoes_right() {
        let (l, cl) = refl(5);
        let t = VanishingTuple::new(
            cl,
            vec![e_diff(&l, 1, 2), e_diff(&l, 2, 3), e_diff(&l, 4, 5)],
        )
        .unwrap();
        for i in 0..2 {
            let back = t
                .hurwitz_move(i, Direction::Right)
                .unwrap()
                .hurwitz_move(i, Direction::Left)
                .unwrap();
            assert_eq!(back, t);
        }
        assert!(matches!(
            t.hurwitz_move(2, Direction::Right),
            Err(Error::IndexOutOfRange { index: 2, len: 3 })
        ));
    }

    #[test]
    fn braid_examples() {
        let (l, cl) = refl(4);
        let a = e_diff(&l, 1, 2);
        assert_eq!(
            braid_relation_check(&cl, &a, &e_diff(&l, 3, 4)).unwrap(),
            BraidRelation::Commute
        );
        assert_eq!(
            braid_relation_check(&cl, &a, &e_diff(&l, 2, 3)).unwrap(),
            BraidRelation::Braid
        );
        // genus 2: a_1 . (2 b_1 + a_2) = 2
        let sl = CycleLattice::Transvection(SymplecticLattice::new(2).unwrap());
        let a1 = HomologyClass::new(vec![1, 0, 0, 0]);
        let c = HomologyClass::new(vec![0, 2, 1, 0]);
        assert_eq!(sl.pairing(&a1, &c).unwrap(), 2);
        assert_eq!(
            braid_relation_check(&sl, &a1, &c).unwrap(),
            BraidRelation::Neither
        );
    }

    #[test]
    fn pentagon_at_k4() {
        let l = BlowupLattice::new(4).unwrap();
        let conf = find_cycle_configuration(&l, 5).unwrap();
        assert_eq!(conf.len(), 5);
        assert!(is_cycle_configuration(&l, &conf));

        let witness = vec![
            e_diff(&l, 1, 2),
            e_diff(&l, 2, 3),
            e_diff(&l, 3, 4),
            l.class_from_line_form(1, &[1, 1, 1, 0]).unwrap(),
            l.class_from_line_form(1, &[0, 1, 1, 1]).unwrap(),
        ];
        assert!(is_cycle_configuration(&l, &witness));
    }

    #[test]
    fn pentagon_absent_at_k2() {
        let l = BlowupLattice::new(2).unwrap();
        assert!(matches!(
            find_cycle_configuration(&l, 5),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn batch_round_trip() {
        let text = "# pentagon\n0,1,-1,0,0|0,0,1,-1,0\n\n0,0,0,1,-1\n";
        let tuples = parse_batch(text, Mode::Reflection).unwrap();
        assert_eq!(tuples.len(), 2);
        assert_eq!(tuples[0].to_batch_line(), "0,1,-1,0,0|0,0,1,-1,0");
        let again = parse_batch(&tuples[0].to_batch_line(), Mode::Reflection).unwrap();
        assert_eq!(again[0], tuples[0]);
        assert!(parse_batch("1,x", Mode::Reflection).is_err());
        // sign normalization on input
        let neg = parse_batch("0,-1,1,0,0", Mode::Reflection).unwrap();
        assert_eq!(neg[0].cycles()[0].coords(), &[0, 1, -1, 0, 0]);
        let tv = parse_batch("1,0,0,1|0,1,0,0", Mode::Transvection).unwrap();
        assert_eq!(tv[0].lattice().rank(), 4);
        assert!(parse_batch("1,0,0", Mode::Transvection).is_err());
    }
}
