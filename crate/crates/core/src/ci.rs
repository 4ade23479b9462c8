//! Complete-intersection surfaces in `CP^{n+2}`: Euler characteristic,
//! first Chern class and the verdict on squared Dehn twists.
//!
//! Surfaces are simply connected, so `b1 = 0` and `b2 = chi - 2`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{general_type_dimensions, general_type_obstruction, Alpha2, DelPezzoQH};

/// Largest `b2` evaluated with the exact product model.
const EXACT_B2_LIMIT: usize = 64;

/// Sorted degrees `>= 2`; empty denotes the plane (all input degrees were 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(Vec<u64>);

impl DegreeVector {
    /// Drops degree-1 entries and sorts. Rejects empty input and degrees `<= 0`.
    pub fn new(raw: &[i64]) -> Result<Self> {
        if raw.is_empty() || raw.iter().any(|&d| d <= 0) {
            return Err(Error::InvalidDegrees(raw.to_vec()));
        }
        let mut d: Vec<u64> = raw.iter().filter(|&&d| d > 1).map(|&d| d as u64).collect();
        d.sort_unstable();
        Ok(DegreeVector(d))
    }

    pub fn degrees(&self) -> &[u64] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn is_plane(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> Option<u64> {
        self.0.iter().try_fold(1u64, |acc, &d| acc.checked_mul(d))
    }

    /// Parses `"2,3"`, `"(2,3)"` or `"2 3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let raw = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad degree {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&raw)
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn overflow(d: &DegreeVector) -> Error {
    Error::InvalidDegrees(d.0.iter().map(|&x| x as i64).collect())
}

/// `chi = (prod d)((sum d - (n+3))^2 + sum d^2 - (n+3)) / 2`.
pub fn euler_char(d: &DegreeVector) -> Result<i64> {
    let n3 = d.n() as i128 + 3;
    let sum: i128 = d.0.iter().map(|&x| x as i128).sum();
    let sum_sq: i128 = d.0.iter().map(|&x| (x as i128) * (x as i128)).sum();
    let prod = d
        .0
        .iter()
        .try_fold(1i128, |acc, &x| acc.checked_mul(x as i128))
        .ok_or_else(|| overflow(d))?;
    let inner = (sum - n3).pow(2) + sum_sq - n3;
    let chi = prod.checked_mul(inner).ok_or_else(|| overflow(d))? / 2;
    i64::try_from(chi).map_err(|_| overflow(d))
}

/// `c1 = (n + 3 - sum d) [hyperplane]`.
pub fn c1_coefficient(d: &DegreeVector) -> i64 {
    d.n() as i64 + 3 - d.0.iter().map(|&x| x as i64).sum::<i64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k")]
pub enum Category {
    ExcludedCP2,
    ExcludedQuadric,
    DelPezzoObstruction(usize),
    K3MinimalCriterion,
    GeneralTypeMinimalCriterion,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::DelPezzoObstruction(k) => write!(f, "DelPezzoObstruction({k})"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceVerdict {
    pub degrees: DegreeVector,
    pub chi: i64,
    pub c1_coeff: i64,
    pub b2: i64,
    pub category: Category,
    pub tau_squared_nontrivial: bool,
}

fn del_pezzo_violated(k: usize) -> Result<bool> {
    static CACHE: OnceLock<Mutex<HashMap<usize, bool>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().expect("cache poisoned").get(&k) {
        return Ok(v);
    }
    let qh = DelPezzoQH::new(k)?;
    let lat = qh.lattice();
    let root = &lat.exceptional_divisor(1) - &lat.exceptional_divisor(2);
    let violated = qh.frobenius_obstruction(&root, Alpha2::Formal)?.violated;
    cache.lock().expect("cache poisoned").insert(k, violated);
    Ok(violated)
}

fn minimal_violated(b2: i64) -> Result<bool> {
    let b2 = usize::try_from(b2).map_err(|_| Error::Config(format!("negative b2 = {b2}")))?;
    let report = if b2 <= EXACT_B2_LIMIT {
        general_type_obstruction(b2)?
    } else {
        general_type_dimensions(b2)?
    };
    Ok(report.violated)
}

/// Verdict on whether the squared Dehn twist along a vanishing sphere is
/// nontrivial in the symplectic mapping class group.
pub fn classify(d: &DegreeVector) -> Result<SurfaceVerdict> {
    let chi = euler_char(d)?;
    let c1_coeff = c1_coefficient(d);
    let b2 = chi - 2;
    let (category, nontrivial) = match d.degrees() {
        [] => (Category::ExcludedCP2, false),
        [2] => (Category::ExcludedQuadric, false),
        [3] => (Category::DelPezzoObstruction(6), del_pezzo_violated(6)?),
        [2, 2] => (Category::DelPezzoObstruction(5), del_pezzo_violated(5)?),
        [4] | [2, 3] | [2, 2, 2] => (Category::K3MinimalCriterion, minimal_violated(b2)?),
        _ => {
            let check = general_type_checks(d)?;
            if !check.holds {
                return Err(Error::NotGeneralType(d.0.clone()));
            }
            (Category::GeneralTypeMinimalCriterion, minimal_violated(b2)?)
        }
    };
    Ok(SurfaceVerdict {
        degrees: d.clone(),
        chi,
        c1_coeff,
        b2,
        category,
        tau_squared_nontrivial: nontrivial,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralTypeCheck {
    pub degrees: DegreeVector,
    pub chi: i64,
    /// `sum d (d - 1)`.
    pub bound: i64,
    pub b2: i64,
    pub c1_coeff: i64,
    /// `c1_coeff < 0` and `chi > bound >= 6`.
    pub holds: bool,
}

/// Checks `chi > sum d(d-1) >= 6` for a surface with negative `c1`.
pub fn general_type_checks(d: &DegreeVector) -> Result<GeneralTypeCheck> {
    let c1_coeff = c1_coefficient(d);
    if c1_coeff >= 0 {
        return Err(Error::NotGeneralType(d.0.clone()));
    }
    let chi = euler_char(d)?;
    let bound: i64 = d.0.iter().map(|&x| (x * (x - 1)) as i64).sum();
    Ok(GeneralTypeCheck {
        degrees: d.clone(),
        chi,
        bound,
        b2: chi - 2,
        c1_coeff,
        holds: chi > bound && bound >= 6,
    })
}

/// All normalized degree vectors with `prod d <= max_product`, in
/// lexicographic order, excluding the plane.
pub fn degree_vectors(max_product: u64) -> Vec<DegreeVector> {
    fn go(start: u64, budget: u64, cur: &mut Vec<u64>, out: &mut Vec<DegreeVector>) {
        for d in start..=budget {
            cur.push(d);
            out.push(DegreeVector(cur.clone()));
            go(d, budget / d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(2, max_product, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Verdicts for the plane followed by every vector from [`degree_vectors`].
pub fn sweep(max_product: u64) -> Result<Vec<SurfaceVerdict>> {
    std::iter::once(DegreeVector(Vec::new()))
        .chain(degree_vectors(max_product))
        .map(|d| classify(&d))
        .collect()
}

pub const CSV_HEADER: &str = "degrees,chi,c1_coeff,b2,category,tau_squared_nontrivial";

impl SurfaceVerdict {
    /// Degrees are `;`-separated within the first field.
    pub fn to_csv_row(&self) -> String {
        let degrees = if self.degrees.is_plane() {
            "1".to_string()
        } else {
            let parts: Vec<String> = self.degrees.0.iter().map(u64::to_string).collect();
            parts.join(";")
        };
        format!(
            "{degrees},{},{},{},{},{}",
            self.chi, self.c1_coeff, self.b2, self.category, self.tau_squared_nontrivial
        )
    }
}

pub fn to_csv(rows: &[SurfaceVerdict]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv_row());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(d: &[i64]) -> DegreeVector {
        DegreeVector::new(d).unwrap()
    }

    #[test]
    fn euler_characteristics() {
        for (d, chi) in [
            (&[2][..], 4),
            (&[3], 9),
            (&[2, 2], 8),
            (&[4], 24),
            (&[2, 3], 24),
            (&[2, 2, 2], 24),
            (&[5], 55),
            (&[2, 4], 64),
            (&[1, 1], 3),
        ] {
            assert_eq!(euler_char(&dv(d)).unwrap(), chi, "{d:?}");
        }
    }

    #[test]
    fn chern_coefficients() {
        assert_eq!(c1_coefficient(&dv(&[2, 2])), 1);
        assert_eq!(c1_coefficient(&dv(&[2, 3])), 0);
        assert_eq!(c1_coefficient(&dv(&[5])), -1);
    }

    #[test]
    fn normalization() {
        assert_eq!(dv(&[3, 1, 2]), dv(&[2, 3]));
        assert!(dv(&[1, 1]).is_plane());
        assert_eq!(dv(&[2, 1, 1]).to_string(), "(2)");
        assert!(matches!(DegreeVector::new(&[2, 0]), Err(Error::InvalidDegrees(_))));
        assert!(DegreeVector::new(&[]).is_err());
        assert_eq!(DegreeVector::parse("(2, 3)").unwrap(), dv(&[2, 3]));
        assert!(DegreeVector::parse("2,x").is_err());
    }

    #[test]
    fn verdicts() {
        let v = classify(&dv(&[2, 2])).unwrap();
        assert_eq!(v.category, Category::DelPezzoObstruction(5));
        assert!(v.tau_squared_nontrivial);
        let v = classify(&dv(&[3])).unwrap();
        assert_eq!(v.category, Category::DelPezzoObstruction(6));
        assert!(v.tau_squared_nontrivial);
        let v = classify(&dv(&[2, 2, 2])).unwrap();
        assert_eq!(v.category, Category::K3MinimalCriterion);
        assert!(v.tau_squared_nontrivial);
        assert_eq!(v.b2, 22);
        assert_eq!(classify(&dv(&[1, 1])).unwrap().category, Category::ExcludedCP2);
        let q = classify(&dv(&[2, 1])).unwrap();
        assert_eq!(q.category, Category::ExcludedQuadric);
        assert!(!q.tau_squared_nontrivial);
        let g = classify(&dv(&[5])).unwrap();
        assert_eq!(g.category, Category::GeneralTypeMinimalCriterion);
        assert!(g.tau_squared_nontrivial);
    }

    #[test]
    fn general_type_examples() {
        let c = general_type_checks(&dv(&[5])).unwrap();
        assert_eq!((c.chi, c.bound, c.b2, c.holds), (55, 20, 53, true));
        let c = general_type_checks(&dv(&[2, 4])).unwrap();
        assert_eq!((c.chi, c.bound, c.holds), (64, 14, true));
        assert!(matches!(
            general_type_checks(&dv(&[2, 2])),
            Err(Error::NotGeneralType(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        let all = degree_vectors(8);
        let shown: Vec<String> = all.iter().map(|d| d.to_string()).collect();
        assert_eq!(
            shown,
            ["(2)", "(2,2)", "(2,2,2)", "(2,3)", "(2,4)", "(3)", "(4)", "(5)", "(6)", "(7)", "(8)"]
        );
    }

    #[test]
    fn csv_row() {
        let v = classify(&dv(&[2, 3])).unwrap();
        assert_eq!(v.to_csv_row(), "2;3,24,0,22,K3MinimalCriterion,true");
        let p = classify(&dv(&[1])).unwrap();
        assert_eq!(p.to_csv_row(), "1,3,3,1,ExcludedCP2,false");
    }

    #[test]
    fn overflow_is_reported() {
        assert!(euler_char(&dv(&[i64::MAX / 2, 3])).is_err());
    }
}
