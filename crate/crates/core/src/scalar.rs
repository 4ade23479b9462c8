//! Exact scalars: rational functions in `q` and formal unknowns over `Q`.
//!
//! Polynomials are sparse maps from monomials to rational coefficients.
//! Rational functions are kept as unreduced `num / den` pairs; equality is
//! tested by cross-multiplication, so no gcd computation is ever needed.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A polynomial variable. `Var::Q` is the Novikov variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u16);

impl Var {
    pub const Q: Var = Var(0);
    /// Coefficient of the degree-two correction on `K^perp`.
    pub const ALPHA2: Var = Var(1);

    pub fn name(&self) -> String {
        match self.0 {
            0 => "q".into(),
            1 => "alpha2".into(),
            i => format!("u{i}"),
        }
    }
}

/// Exponent vector indexed by variable number, trailing zeros trimmed.
/// The derived `Ord` is lexicographic with `q` most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, exp: u32) -> Self {
        let mut e = vec![0; v.0 as usize + 1];
        e[v.0 as usize] = exp;
        Monomial(e).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.get(v.0 as usize).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&0) + other.0.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut e = self.0.clone();
        for (i, &x) in other.0.iter().enumerate() {
            e[i] = e[i].checked_sub(x)?;
        }
        Some(Monomial(e).trimmed())
    }

    fn without(&self, v: Var) -> Monomial {
        let mut e = self.0.clone();
        if let Some(x) = e.get_mut(v.0 as usize) {
            *x = 0;
        }
        Monomial(e).trimmed()
    }
}

/// Sparse multivariate polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat(n))
    }

    pub fn var(v: Var) -> Self {
        Poly::monomial(rat(1), Monomial::var(v, 1))
    }

    pub fn monomial(c: BigRational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x * c))
                .collect(),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(dm)?;
            let c = rc / dc;
            let t = Poly::monomial(c, m);
            rem = &rem - &(&t * d);
            quot = &quot + &t;
        }
        Some(quot)
    }

    /// Substitutes `v = value`.
    pub fn substitute(&self, v: Var, value: &BigRational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            let factor = num_traits::pow(value.clone(), e as usize);
            out.add_term(m.without(v), c * factor);
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mut factors = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(abs.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                let name = Var(i as u16).name();
                match e {
                    0 => {}
                    1 => factors.push(name),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

/// Exact element of `Q(q, alpha2, ...)`.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn int(n: i64) -> Self {
        Scalar::from_poly(Poly::int(n))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Scalar::from_poly(Poly::constant(BigRational::new(n.into(), d.into())))
    }

    pub fn var(v: Var) -> Self {
        Scalar::from_poly(Poly::var(v))
    }

    pub fn q() -> Self {
        Scalar::var(Var::Q)
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::int(1),
        }
    }

    /// `num / den`; panics if `den` is zero.
    pub fn fraction(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Scalar { num, den }.normalized()
    }

    fn normalized(self) -> Self {
        if self.num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = self.den.as_constant() {
            return Scalar::from_poly(self.num.scale(&c.recip()));
        }
        match self.num.div_exact(&self.den) {
            Some(q) => Scalar::from_poly(q),
            None => self,
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value as a polynomial, when the denominator is constant.
    pub fn as_poly(&self) -> Option<Poly> {
        self.den
            .as_constant()
            .map(|c| self.num.scale(&c.recip()))
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_poly().and_then(|p| p.as_constant())
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        if rhs.is_zero() {
            return None;
        }
        Some(Scalar::fraction(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    /// Substitutes `v = value`; `None` if the denominator vanishes there.
    pub fn substitute(&self, v: Var, value: &BigRational) -> Option<Scalar> {
        let den = self.den.substitute(v, value);
        if den.is_zero() {
            return None;
        }
        Some(Scalar::fraction(self.num.substitute(v, value), den))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Scalar) -> bool {
        (&self.num * &other.den) == (&other.num * &self.den)
    }
}

impl Eq for Scalar {}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Poly> for Scalar {
    fn from(p: Poly) -> Self {
        Scalar::from_poly(p)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.den == rhs.den {
            return Scalar::fraction(&self.num + &rhs.num, self.den.clone());
        }
        Scalar::fraction(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::fraction(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_poly() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({}) / ({})", self.num, self.den),
        }
    }
}

/// Rank over the field of fractions, by fraction-free (Bareiss) elimination.
///
/// Rows are first cleared of denominators; all later divisions are exact.
pub fn rank(rows: &[Vec<Scalar>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let constants: Option<Vec<Vec<BigRational>>> = rows
        .iter()
        .map(|row| row.iter().map(Scalar::as_rational).collect())
        .collect();
    if let Some(m) = constants {
        return rank_rational(m);
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Poly>> = rows
        .iter()
        .map(|row| {
            assert_eq!(row.len(), ncols, "ragged matrix");
            let common = row
                .iter()
                .fold(Poly::int(1), |acc, s| &acc * s.denominator());
            row.iter()
                .map(|s| {
                    let cofactor = common
                        .div_exact(s.denominator())
                        .expect("denominator divides product");
                    &s.num * &cofactor
                })
                .collect()
        })
        .collect();
    let nrows = m.len();
    let mut prev = Poly::int(1);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let t = &(&m[r][c] * &m[i][j]) - &(&m[i][c] * &m[r][j]);
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][c] = Poly::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Gaussian elimination over `Q`; rows with a zero in the pivot column are skipped.
#[allow(clippy::needless_range_loop)] // pivot and target rows share one matrix
fn rank_rational(mut m: Vec<Vec<BigRational>>) -> usize {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..nrows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            for j in c..ncols {
                if !m[r][j].is_zero() {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}
