//! Reflection groups generated by roots, by breadth-first closure.

use std::collections::VecDeque;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BlowupLattice, HomologyClass};

/// Default element cap for group closures. `W(E_7)` and `W(E_8)` exceed it.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

/// Dense square integer matrix acting on column vectors, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        IntMatrix { n, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        IntMatrix {
            n,
            data: rows.concat(),
        }
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: &[HomologyClass]) -> Self {
        let n = cols.len();
        let mut data = vec![0; n * n];
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.rank(), n);
            for i in 0..n {
                data[i * n + j] = c.coords()[i];
            }
        }
        IntMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        IntMatrix { n, data }
    }

    /// `None` on `i64` overflow.
    pub fn checked_mul(&self, rhs: &IntMatrix) -> Option<IntMatrix> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut data = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = a.checked_mul(rhs.data[k * n + j])?;
                    data[i * n + j] = data[i * n + j].checked_add(t)?;
                }
            }
        }
        Some(IntMatrix { n, data })
    }

    pub fn apply(&self, x: &HomologyClass) -> HomologyClass {
        assert_eq!(x.rank(), self.n);
        let c = x.coords();
        HomologyClass::new(
            (0..self.n)
                .map(|i| (0..self.n).map(|j| self.get(i, j) * c[j]).sum())
                .collect(),
        )
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        IntMatrix { n, data }
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.n)
    }

    /// `M^T G M == G`.
    pub fn preserves_form(&self, gram: &IntMatrix) -> bool {
        self.transpose().mul(gram).mul(self) == *gram
    }

    /// Compact row-major byte encoding used as a dedup key.
    ///
    /// Entries of Weyl group elements in the blowup basis are bounded by 17
    /// for `k <= 8`, so `i8` is enough; `None` if an entry does not fit.
    pub fn canonical_bytes(&self) -> Option<Box<[i8]>> {
        self.data.iter().map(|&x| i8::try_from(x).ok()).collect()
    }

    fn from_bytes(n: usize, bytes: &[i8]) -> IntMatrix {
        IntMatrix {
            n,
            data: bytes.iter().map(|&b| b as i64).collect(),
        }
    }
}

/// Matrix of `x -> x + (x.l) l` in the lattice basis.
pub fn reflection_matrix(lat: &BlowupLattice, l: &HomologyClass) -> Result<IntMatrix> {
    lat.ensure_root(l)?;
    let n = lat.rank();
    let cols: Vec<_> = (0..n)
        .map(|j| lat.reflect_unchecked(l, &HomologyClass::unit(n, j)))
        .collect();
    Ok(IntMatrix::from_columns(&cols))
}

pub fn gram_matrix(lat: &BlowupLattice) -> IntMatrix {
    IntMatrix::from_rows(&lat.gram())
}

/// Outcome of a capped breadth-first enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Capped {
    Complete { size: usize },
    CapExceeded { partial: usize, cap: usize },
}

impl Capped {
    pub fn size(&self) -> Option<usize> {
        match self {
            Capped::Complete { size } => Some(*size),
            Capped::CapExceeded { .. } => None,
        }
    }
}

/// All elements of the group generated by reflections in `generators`,
/// or `Err(partial)` once more than `cap` elements have been found.
pub fn weyl_group_elements(
    lat: &BlowupLattice,
    generators: &[HomologyClass],
    cap: usize,
) -> Result<std::result::Result<Vec<IntMatrix>, usize>> {
    let set = closure_set(lat, generators, cap)?;
    let n = lat.rank();
    match set {
        Ok(set) => Ok(Ok(set
            .iter()
            .map(|b| IntMatrix::from_bytes(n, b))
            .collect())),
        Err(partial) => Ok(Err(partial)),
    }
}

/// Order of the group generated by reflections in `generators`.
pub fn weyl_closure(lat: &BlowupLattice, generators: &[HomologyClass], cap: usize) -> Result<Capped> {
    Ok(match closure_set(lat, generators, cap)? {
        Ok(set) => Capped::Complete { size: set.len() },
        Err(partial) => Capped::CapExceeded { partial, cap },
    })
}

fn closure_set(
    lat: &BlowupLattice,
    generators: &[HomologyClass],
    cap: usize,
) -> Result<std::result::Result<IndexSet<Box<[i8]>>, usize>> {
    if cap == 0 {
        return Err(Error::Config("closure cap must be positive".into()));
    }
    for g in generators {
        lat.ensure_root(g)?;
    }
    let n = lat.rank();
    // right multiplication by s_r is the rank-one update M + (M r)(r^T G)
    let dual: Vec<Vec<i64>> = generators
        .iter()
        .map(|r| (0..n).map(|j| lat.gram_diag(j) * r.coords()[j]).collect())
        .collect();

    let mut seen: IndexSet<Box<[i8]>> = IndexSet::new();
    seen.insert(IntMatrix::identity(n).canonical_bytes().expect("identity fits"));
    let mut cursor = 0;
    let mut buf = vec![0i64; n * n];
    let mut mr = vec![0i64; n];
    let mut m = vec![0i64; n * n];
    while cursor < seen.len() {
        for (dst, &src) in m.iter_mut().zip(seen[cursor].iter()) {
            *dst = src as i64;
        }
        cursor += 1;
        for (r, rd) in generators.iter().zip(&dual) {
            let rc = r.coords();
            for i in 0..n {
                mr[i] = (0..n).map(|k| m[i * n + k] * rc[k]).sum();
            }
            for i in 0..n {
                for j in 0..n {
                    buf[i * n + j] = m[i * n + j] + mr[i] * rd[j];
                }
            }
            let key: Box<[i8]> = buf
                .iter()
                .map(|&x| i8::try_from(x))
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config("group element entry exceeds i8 encoding".into()))?;
            seen.insert(key);
            if seen.len() > cap {
                return Ok(Err(seen.len()));
            }
        }
    }
    Ok(Ok(seen))
}

/// Orbit of `start` under the reflections in `generators`.
pub fn reflection_orbit(
    lat: &BlowupLattice,
    generators: &[HomologyClass],
    start: &HomologyClass,
    cap: usize,
) -> Result<(Capped, Vec<HomologyClass>)> {
    for g in generators {
        lat.ensure_root(g)?;
    }
    lat.check_class(start)?;
    let mut seen: IndexSet<HomologyClass> = IndexSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = lat.reflect_unchecked(g, &x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    let partial = seen.len();
                    return Ok((Capped::CapExceeded { partial, cap }, seen.into_iter().collect()));
                }
                queue.push_back(y);
            }
        }
    }
    let size = seen.len();
    let mut members: Vec<_> = seen.into_iter().collect();
    members.sort();
    Ok((Capped::Complete { size }, members))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(k: usize) -> BlowupLattice {
        BlowupLattice::new(k).unwrap()
    }

    #[test]
    fn single_generator_has_order_two() {
        let l = lat(3);
        let r = &l.exceptional_divisor(1) - &l.exceptional_divisor(2);
        assert_eq!(
            weyl_closure(&l, &[r], 100).unwrap(),
            Capped::Complete { size: 2 }
        );
    }

    #[test]
    fn d5_order() {
        let l = lat(5);
        // |W(D_5)| = 2^4 * 5!
        assert_eq!(
            weyl_closure(&l, &l.simple_roots(), DEFAULT_CLOSURE_CAP)
                .unwrap()
                .size(),
            Some(16 * 120)
        );
    }

    #[test]
    fn a4_order_at_k4() {
        let l = lat(4);
        assert_eq!(
            weyl_closure(&l, &l.simple_roots(), 1000).unwrap().size(),
            Some(120)
        );
    }

    #[test]
    fn elements_preserve_form_and_fix_k() {
        let l = lat(5);
        let g = gram_matrix(&l);
        let elems = weyl_group_elements(&l, &l.simple_roots(), 10_000)
            .unwrap()
            .unwrap();
        assert_eq!(elems.len(), 1920);
        for m in &elems {
            assert!(m.preserves_form(&g));
            assert_eq!(m.apply(l.canonical()), *l.canonical());
        }
    }

    #[test]
    fn cap_exceeded_reports_partial() {
        let l = lat(5);
        match weyl_closure(&l, &l.simple_roots(), 100).unwrap() {
            Capped::CapExceeded { partial, cap } => {
                assert_eq!(cap, 100);
                assert!(partial > 100);
            }
            other => panic!("expected cap exceeded, got {other:?}"),
        }
    }

    #[test]
    fn non_root_generator_rejected() {
        let l = lat(5);
        assert!(matches!(
            weyl_closure(&l, &[l.line()], 10),
            Err(Error::NotARoot { .. })
        ));
    }

    #[test]
    fn reflection_matrix_is_involution() {
        let l = lat(6);
        for r in l.enumerate_roots().iter() {
            let m = reflection_matrix(&l, r).unwrap();
            assert!(m.mul(&m).is_identity());
            assert!(m.preserves_form(&gram_matrix(&l)));
        }
    }
}
