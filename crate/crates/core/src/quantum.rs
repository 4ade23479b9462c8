//! Truncated quantum homology of monotone `CP^2 # k CP^2-bar`, `5 <= k <= 8`.
//!
//! With the monotone normalization only `q^0, q^1, q^2` occur in products
//! of degree-two classes:
//!
//! ```text
//! x * y = (x.y)[point] + (x *1 y) q + (x *2 y)[M] q^2
//! x *1 y = sum over exceptional A of (x.A)(y.A) A
//! ```
//!
//! On `K^perp` the degree-two part is a formal multiple `alpha2` of the
//! intersection form; the pipeline in [`DelPezzoQH::frobenius_obstruction`]
//! checks at runtime that this is the only invariant choice.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BlowupLattice, ClassSet, HomologyClass};
use crate::scalar::{rank, Scalar, Var};

/// `alpha2` is either kept formal or replaced by a rational number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alpha2 {
    Formal,
    Value(i64),
}

impl Alpha2 {
    pub fn scalar(&self) -> Scalar {
        match self {
            Alpha2::Formal => Scalar::var(Var::ALPHA2),
            Alpha2::Value(v) => Scalar::int(*v),
        }
    }
}

/// Element of `QH_*` in the graded basis `([point], H_2, [M])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QHElement {
    pub point: Scalar,
    pub h2: Vec<Scalar>,
    pub fundamental: Scalar,
}

impl QHElement {
    pub fn zero(rank: usize) -> Self {
        QHElement {
            point: Scalar::zero(),
            h2: vec![Scalar::zero(); rank],
            fundamental: Scalar::zero(),
        }
    }

    /// Degree-two class `x q^0`.
    pub fn from_class(x: &HomologyClass) -> Self {
        QHElement {
            point: Scalar::zero(),
            h2: x.coords().iter().map(|&c| Scalar::int(c)).collect(),
            fundamental: Scalar::zero(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        QHElement {
            point: &self.point * s,
            h2: self.h2.iter().map(|c| c * s).collect(),
            fundamental: &self.fundamental * s,
        }
    }

    /// Coordinates `(point, h2..., fundamental)`.
    pub fn to_vector(&self) -> Vec<Scalar> {
        let mut v = Vec::with_capacity(self.h2.len() + 2);
        v.push(self.point.clone());
        v.extend(self.h2.iter().cloned());
        v.push(self.fundamental.clone());
        v
    }

    pub fn substitute(&self, v: Var, value: &BigRational) -> Option<QHElement> {
        Some(QHElement {
            point: self.point.substitute(v, value)?,
            h2: self
                .h2
                .iter()
                .map(|c| c.substitute(v, value))
                .collect::<Option<_>>()?,
            fundamental: self.fundamental.substitute(v, value)?,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "point": self.point.to_string(),
            "h2": self.h2.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "fundamental": self.fundamental.to_string(),
        })
    }
}

/// Result of a sweep over identities: pass/fail plus the first failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub pass: bool,
    pub checked: usize,
    pub failure: Option<Vec<Vec<i64>>>,
}

impl CheckReport {
    fn new() -> Self {
        CheckReport {
            pass: true,
            checked: 0,
            failure: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<Vec<i64>>) {
        self.checked += 1;
        if !ok && self.pass {
            self.pass = false;
            self.failure = Some(witness());
        }
    }
}

/// Which parts of an obstruction report were computed and which were assumed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub computed: Vec<String>,
    pub assumed: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub k: usize,
    pub root: Vec<i64>,
    pub dual_vector: Vec<i64>,
    pub c_k: i64,
    pub alpha2: Alpha2,
    pub invariant_form_dim: usize,
    pub l_star_l: serde_json::Value,
    pub dim_total: usize,
    pub dim_ideal: usize,
    pub dim_quotient: usize,
    pub dim_isotropic: usize,
    pub violated: bool,
    pub module_identities: CheckReport,
    pub witnesses: Vec<[Vec<i64>; 2]>,
    pub provenance: Provenance,
}

impl ObstructionReport {
    /// The fields that must not depend on the choice of `alpha2` or `w`.
    pub fn dimensions(&self) -> (usize, usize, usize, usize, bool, i64) {
        (
            self.dim_total,
            self.dim_ideal,
            self.dim_quotient,
            self.dim_isotropic,
            self.violated,
            self.c_k,
        )
    }
}

/// The degree-one product and derived checks on one del Pezzo lattice.
#[derive(Clone, Debug)]
pub struct DelPezzoQH {
    lat: BlowupLattice,
    exceptional: ClassSet,
    valid: bool,
}

impl DelPezzoQH {
    /// Monotone range `5 <= k <= 8`, where the exceptional sum is the true product.
    pub fn new(k: usize) -> Result<Self> {
        if !(5..=8).contains(&k) {
            return Err(Error::UnsupportedRank {
                k,
                allowed: "5..=8",
            });
        }
        Self::raw(k)
    }

    /// Any `1 <= k <= 8`; outside `5..=8` the sum is computed but flagged invalid.
    pub fn raw(k: usize) -> Result<Self> {
        let lat = BlowupLattice::new(k)?;
        let exceptional = lat.enumerate_exceptional();
        Ok(DelPezzoQH {
            lat,
            exceptional,
            valid: (5..=8).contains(&k),
        })
    }

    pub fn lattice(&self) -> &BlowupLattice {
        &self.lat
    }

    pub fn k(&self) -> usize {
        self.lat.k()
    }

    /// Whether [`Self::star1`] equals the genuine degree-one product.
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn exceptional(&self) -> &ClassSet {
        &self.exceptional
    }

    /// `x *1 y = sum_{A in E} (x.A)(y.A) A`.
    pub fn star1(&self, x: &HomologyClass, y: &HomologyClass) -> Result<HomologyClass> {
        self.lat.check_class(x)?;
        self.lat.check_class(y)?;
        Ok(self.star1_unchecked(x, y))
    }

    fn star1_unchecked(&self, x: &HomologyClass, y: &HomologyClass) -> HomologyClass {
        let mut acc = HomologyClass::zero(self.lat.rank());
        for a in &self.exceptional {
            let c = self.lat.pairing_unchecked(x, a) * self.lat.pairing_unchecked(y, a);
            if c != 0 {
                acc = acc.add_scaled(c, a);
            }
        }
        acc
    }

    /// If `v = m K` for an integer `m`, returns `m`.
    fn k_multiple(&self, v: &HomologyClass) -> Option<i64> {
        let m = v.coords()[1];
        (self.lat.canonical().scaled(m) == *v).then_some(m)
    }

    /// The integer `c` with `x *1 y = c (x.y) K` on all pairs of simple roots.
    pub fn kperp_proportionality(&self) -> Result<i64> {
        let basis = self.kperp_basis()?;
        let mut c: Option<i64> = None;
        for (i, x) in basis.iter().enumerate() {
            for y in &basis[i..] {
                let prod = self.star1_unchecked(x, y);
                let xy = self.lat.pairing_unchecked(x, y);
                let fail = || Error::NotProportional {
                    x: x.coords().to_vec(),
                    y: y.coords().to_vec(),
                    product: prod.coords().to_vec(),
                };
                let Some(m) = self.k_multiple(&prod) else {
                    return Err(fail());
                };
                if xy == 0 {
                    if m != 0 {
                        return Err(fail());
                    }
                    continue;
                }
                if m % xy != 0 {
                    return Err(fail());
                }
                match c {
                    None => c = Some(m / xy),
                    Some(c0) if c0 * xy != m => return Err(fail()),
                    _ => {}
                }
            }
        }
        c.ok_or_else(|| Error::NotFound("K-perp basis has no non-orthogonal pair".into()))
    }

    fn kperp_basis(&self) -> Result<Vec<HomologyClass>> {
        if self.lat.k() < 3 {
            return Err(Error::UnsupportedRank {
                k: self.lat.k(),
                allowed: "3..=8",
            });
        }
        Ok(self.lat.simple_roots())
    }

    /// `s(x *1 y) == s(x) *1 s(y)` for every simple reflection and basis pair.
    pub fn check_w_equivariance(&self) -> CheckReport {
        let n = self.lat.rank();
        let mut report = CheckReport::new();
        for s in self.lat.simple_roots() {
            for i in 0..n {
                for j in i..n {
                    let x = HomologyClass::unit(n, i);
                    let y = HomologyClass::unit(n, j);
                    self.equivariance_case(&s, &x, &y, &mut report);
                }
            }
        }
        report
    }

    /// Random reflections in arbitrary roots applied to random small classes.
    pub fn check_w_equivariance_sampled(&self, samples: usize, rng: &mut impl Rng) -> CheckReport {
        let roots = self.lat.enumerate_roots();
        let n = self.lat.rank();
        let mut report = CheckReport::new();
        let random_class = |rng: &mut _| -> HomologyClass {
            HomologyClass::new((0..n).map(|_| Rng::gen_range(rng, -3..=3)).collect())
        };
        for _ in 0..samples {
            let s = &roots.members()[rng.gen_range(0..roots.len())];
            let x = random_class(rng);
            let y = random_class(rng);
            self.equivariance_case(s, &x, &y, &mut report);
        }
        report
    }

    fn equivariance_case(
        &self,
        s: &HomologyClass,
        x: &HomologyClass,
        y: &HomologyClass,
        report: &mut CheckReport,
    ) {
        let lhs = self.lat.reflect_unchecked(s, &self.star1_unchecked(x, y));
        let rhs = self.star1_unchecked(
            &self.lat.reflect_unchecked(s, x),
            &self.lat.reflect_unchecked(s, y),
        );
        report.record(lhs == rhs, || {
            vec![s.coords().to_vec(), x.coords().to_vec(), y.coords().to_vec()]
        });
    }

    /// Dimension of the space of symmetric bilinear forms on `K^perp`
    /// invariant under the reflections in the simple roots.
    pub fn invariant_form_dimension(&self) -> Result<usize> {
        let k = self.lat.k();
        self.invariant_form_dimension_with(&(0..k).collect::<Vec<_>>())
    }

    /// As [`Self::invariant_form_dimension`], using only the simple roots
    /// with the given indices as generators.
    pub fn invariant_form_dimension_with(&self, generators: &[usize]) -> Result<usize> {
        let basis = self.kperp_basis()?;
        let d = basis.len();
        // unknowns B_uv, u <= v
        let idx = |u: usize, v: usize| -> usize {
            let (u, v) = if u <= v { (u, v) } else { (v, u) };
            u * d - u * (u + 1) / 2 + v
        };
        let unknowns = d * (d + 1) / 2;
        let gram: Vec<Vec<i64>> = basis
            .iter()
            .map(|x| {
                basis
                    .iter()
                    .map(|y| self.lat.pairing_unchecked(x, y))
                    .collect()
            })
            .collect();
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        for &g in generators {
            if g >= d {
                return Err(Error::IndexOutOfRange { index: g, len: d });
            }
            // B(s b_a, s b_b) - B(b_a, b_b) with s b = b + (b.r) r and r = b_g
            for a in 0..d {
                for b in a..d {
                    let (ca, cb) = (gram[a][g], gram[b][g]);
                    let mut row = vec![0i64; unknowns];
                    row[idx(a, g)] += cb;
                    row[idx(g, b)] += ca;
                    row[idx(g, g)] += ca * cb;
                    if row.iter().any(|&c| c != 0) {
                        rows.push(row.into_iter().map(Scalar::int).collect());
                    }
                }
            }
        }
        Ok(unknowns - rank(&rows))
    }

    /// An integral `w` with `w.l = 1`, from the extended gcd of the coordinates.
    pub fn dual_vector(&self, l: &HomologyClass) -> Result<HomologyClass> {
        self.lat.check_class(l)?;
        let coefs = bezout(l.coords()).ok_or_else(|| Error::NotPrimitive {
            class: l.coords().to_vec(),
        })?;
        // w.l = w_0 l_0 - sum w_i l_i
        let w: Vec<i64> = coefs
            .iter()
            .enumerate()
            .map(|(i, &c)| if i == 0 { c } else { -c })
            .collect();
        let w = HomologyClass::new(w);
        debug_assert_eq!(self.lat.pairing_unchecked(&w, l), 1);
        Ok(w)
    }

    /// Degree-one shadows of the two Picard-Lefschetz identities for the
    /// module structure, with `w.l = 1`, plus the expanded identity
    /// `s_l(w *1 x) = s_l(w) *1 s_l(x)` for every pair of basis vectors.
    pub fn module_identities(&self, l: &HomologyClass, w: &HomologyClass) -> Result<CheckReport> {
        self.lat.ensure_root(l)?;
        self.lat.check_class(w)?;
        if self.lat.pairing_unchecked(w, l) != 1 {
            return Err(Error::Config(format!("dual vector {w} must pair to 1 with {l}")));
        }
        let lat = &self.lat;
        let n = lat.rank();
        let mut report = CheckReport::new();
        let wl = self.star1_unchecked(w, l);
        let ll = self.star1_unchecked(l, l);

        // s_l(w * l) + w * l + l * l = 0
        let first = &(&lat.reflect_unchecked(l, &wl) + &wl) + &ll;
        report.record(first.is_zero(), || vec![w.coords().to_vec(), l.coords().to_vec()]);

        // s_l(w * x) = w * x + l * x + (x.l)(w * l + l * l)
        for j in 0..n {
            let x = HomologyClass::unit(n, j);
            let wx = self.star1_unchecked(w, &x);
            let lx = self.star1_unchecked(l, &x);
            let xl = lat.pairing_unchecked(&x, l);
            let rhs = (&wx + &lx).add_scaled(xl, &(&wl + &ll));
            report.record(lat.reflect_unchecked(l, &wx) == rhs, || {
                vec![w.coords().to_vec(), x.coords().to_vec()]
            });
        }

        // general w' with c = w'.l
        for i in 0..n {
            let wi = HomologyClass::unit(n, i);
            let c = lat.pairing_unchecked(&wi, l);
            let wil = self.star1_unchecked(&wi, l);
            for j in 0..n {
                let x = HomologyClass::unit(n, j);
                let xl = lat.pairing_unchecked(&x, l);
                let wx = self.star1_unchecked(&wi, &x);
                let rhs = wx
                    .add_scaled(xl, &wil)
                    .add_scaled(c, &self.star1_unchecked(l, &x))
                    .add_scaled(c * xl, &ll);
                report.record(lat.reflect_unchecked(l, &wx) == rhs, || {
                    vec![wi.coords().to_vec(), x.coords().to_vec()]
                });
            }
        }
        Ok(report)
    }

    /// `x * y` for `x, y` in `K^perp`, where every term is determined.
    pub fn kperp_product(&self, x: &HomologyClass, y: &HomologyClass, alpha2: &Scalar) -> Result<QHElement> {
        for v in [x, y] {
            self.lat.check_class(v)?;
            if self.lat.pairing_unchecked(v, self.lat.canonical()) != 0 {
                return Err(Error::UnknownProduct(format!(
                    "{v} is not orthogonal to K; its degree-two product is not determined"
                )));
            }
        }
        let xy = Scalar::int(self.lat.pairing_unchecked(x, y));
        let q = Scalar::q();
        let s1 = self.star1_unchecked(x, y);
        Ok(QHElement {
            point: xy.clone(),
            h2: s1.coords().iter().map(|&c| &Scalar::int(c) * &q).collect(),
            fundamental: &(&xy * alpha2) * &(&q * &q),
        })
    }

    /// Runs the whole obstruction pipeline for the root `l`.
    pub fn frobenius_obstruction(&self, l: &HomologyClass, alpha2: Alpha2) -> Result<ObstructionReport> {
        let w = self.dual_vector(l)?;
        self.frobenius_obstruction_with(l, &w, alpha2)
    }

    pub fn frobenius_obstruction_with(
        &self,
        l: &HomologyClass,
        w: &HomologyClass,
        alpha2: Alpha2,
    ) -> Result<ObstructionReport> {
        let lat = &self.lat;
        lat.ensure_root(l)?;
        if lat.pairing_unchecked(l, lat.canonical()) != 0 {
            return Err(Error::UnknownProduct(format!(
                "root {l} is not orthogonal to K"
            )));
        }
        let k = lat.k();
        let a2 = alpha2.scalar();

        let c_k = self.kperp_proportionality()?;
        let form_dim = self.invariant_form_dimension()?;
        if form_dim != 1 {
            return Err(Error::ReducibleAction { dim: form_dim });
        }
        let identities = self.module_identities(l, w)?;

        let ll = self.kperp_product(l, l, &a2)?;
        // closed form -2[point] + c_k (l.l) K q + (l.l) alpha2 [M] q^2
        let q = Scalar::q();
        let expected_ll = QHElement {
            point: Scalar::int(-2),
            h2: lat
                .canonical()
                .coords()
                .iter()
                .map(|&c| &Scalar::int(-2 * c_k * c) * &q)
                .collect(),
            fundamental: &(&Scalar::int(-2) * &a2) * &(&q * &q),
        };
        if ll != expected_ll {
            return Err(Error::NotProportional {
                x: l.coords().to_vec(),
                y: l.coords().to_vec(),
                product: self.star1_unchecked(l, l).into_coords(),
            });
        }

        let ideal = vec![QHElement::from_class(l).to_vector(), ll.to_vector()];
        let dim_ideal = rank(&ideal);
        let dim_total = k + 3;
        let dim_quotient = dim_total - dim_ideal;

        let basis = self.kperp_basis()?;
        let mut stacked = ideal.clone();
        stacked.extend(basis.iter().map(|b| QHElement::from_class(b).to_vector()));
        let dim_isotropic = rank(&stacked) - dim_ideal;

        // x * y = -(x.y)/2 l*l, hence in the ideal
        let half_ll = ll.scale(&Scalar::rational(-1, 2));
        let mut witnesses = Vec::new();
        for (i, x) in basis.iter().enumerate() {
            for y in &basis[i..] {
                let xy = self.kperp_product(x, y, &a2)?;
                let target = half_ll.scale(&Scalar::int(lat.pairing_unchecked(x, y)));
                let mut with = ideal.clone();
                with.push(xy.to_vector());
                if xy != target || rank(&with) != dim_ideal {
                    return Err(Error::NotProportional {
                        x: x.coords().to_vec(),
                        y: y.coords().to_vec(),
                        product: self.star1_unchecked(x, y).into_coords(),
                    });
                }
                witnesses.push([x.coords().to_vec(), y.coords().to_vec()]);
            }
        }

        let violated = 2 * dim_isotropic > dim_quotient;
        Ok(ObstructionReport {
            k,
            root: l.coords().to_vec(),
            dual_vector: w.coords().to_vec(),
            c_k,
            alpha2,
            invariant_form_dim: form_dim,
            l_star_l: ll.to_json(),
            dim_total,
            dim_ideal,
            dim_quotient,
            dim_isotropic,
            violated,
            module_identities: identities,
            witnesses,
            provenance: Provenance {
                computed: vec![
                    "c_k from the exceptional-class sum on all simple-root pairs".into(),
                    "uniqueness of the invariant form on K-perp (nullspace dimension)".into(),
                    "independence of l and l*l (rank of the ideal spanning set)".into(),
                    "image of K-perp in the quotient (exact rank over Q(q, alpha2))".into(),
                    "isotropy: x*y = -(x.y)/2 l*l for all simple-root pairs".into(),
                    "degree-one shadows of the reflection identities".into(),
                ],
                assumed: vec![
                    "the ideal generated by l has dimension at most 2 (input; lower bound verified)".into(),
                    "the degree-one product is the exceptional-class sum, valid for 5 <= k <= 8".into(),
                    "the degree-two product on K-perp is alpha2 times the intersection form (alpha2 unknown)".into(),
                ],
            },
        })
    }
}

/// Integer coefficients `c` with `sum c_i v_i = 1`, if the entries are coprime.
fn bezout(v: &[i64]) -> Option<Vec<i64>> {
    let mut coefs = vec![0i64; v.len()];
    let mut g = 0i64;
    for (i, &x) in v.iter().enumerate() {
        if x == 0 {
            continue;
        }
        if g == 0 {
            g = x;
            coefs[i] = 1;
            continue;
        }
        let e = num_integer::Integer::extended_gcd(&g, &x);
        // e.gcd = e.x * g + e.y * x
        for c in coefs.iter_mut().take(i) {
            *c *= e.x;
        }
        coefs[i] = e.y;
        g = e.gcd;
    }
    match g {
        1 => Some(coefs),
        -1 => Some(coefs.into_iter().map(|c| -c).collect()),
        _ => None,
    }
}

/// Dimensions in the obstruction argument for a minimal surface where the
/// quantum product is the classical intersection product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralTypeReport {
    pub b2: usize,
    pub dim_quotient: usize,
    pub dim_isotropic: usize,
    pub violated: bool,
}

/// Builds `H_* = <[point]> + H_2 + <[M]>` with the classical product and a
/// nondegenerate rational form in which the first basis vector `l` has
/// square `-2`, then measures the quotient by `I_l = <l, [point]>`.
pub fn general_type_obstruction(b2: usize) -> Result<GeneralTypeReport> {
    if b2 == 0 {
        return Err(Error::Config("b2 must be at least 1".into()));
    }
    let total = b2 + 2;
    let unit = |i: usize| -> Vec<Scalar> {
        (0..total)
            .map(|j| Scalar::int((i == j) as i64))
            .collect()
    };
    let square = |i: usize| -> i64 { if i == 0 { -2 } else { 1 } };
    // l * l = (l.l)[point]
    let l = unit(1);
    let ll: Vec<Scalar> = unit(0)
        .iter()
        .map(|c| c * &Scalar::int(square(0)))
        .collect();
    let ideal = vec![l, ll];
    let dim_ideal = rank(&ideal);
    let mut everything = ideal.clone();
    everything.extend((0..total).map(unit));
    let dim_quotient = rank(&everything) - dim_ideal;

    let mut h2 = ideal.clone();
    h2.extend((1..=b2).map(unit));
    let dim_isotropic = rank(&h2) - dim_ideal;
    // products of degree-two classes are multiples of [point], inside I_l
    for i in 0..b2 {
        let prod: Vec<Scalar> = unit(0)
            .iter()
            .map(|c| c * &Scalar::int(square(i)))
            .collect();
        let mut with = ideal.clone();
        with.push(prod);
        if rank(&with) != dim_ideal {
            return Err(Error::UnknownProduct(format!(
                "classical product of basis vector {i} leaves the ideal"
            )));
        }
    }
    Ok(GeneralTypeReport {
        b2,
        dim_quotient,
        dim_isotropic,
        violated: 2 * dim_isotropic > dim_quotient,
    })
}

/// Closed form of [`general_type_obstruction`]: the quotient has dimension
/// `b2` and the isotropic image `b2 - 1`. Used where `b2` is too large for
/// the exact model.
pub fn general_type_dimensions(b2: usize) -> Result<GeneralTypeReport> {
    if b2 == 0 {
        return Err(Error::Config("b2 must be at least 1".into()));
    }
    Ok(GeneralTypeReport {
        b2,
        dim_quotient: b2,
        dim_isotropic: b2 - 1,
        violated: 2 * (b2 - 1) > b2,
    })
}

/// Convenience: `BigRational` from an integer.
pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
