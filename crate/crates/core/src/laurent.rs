//! Sparse Laurent polynomials in x-variables with rational exponents, and
//! rational functions whose denominators are kept as multisets of factors.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;

use crate::weight::{XWeight, XDEN};

/// The prime used for randomised identity testing: the first prime above 2^61.
pub const MODP: u64 = 2_305_843_009_213_693_967;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<XWeight, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(XWeight::one(nvars), c);
        p
    }

    /// A signed monomial; the sign moves into the coefficient.
    pub fn monomial(w: &XWeight) -> Self {
        let mut p = Self::zero(w.len());
        p.add_term(w.unsigned(), BigInt::from(w.sign()));
        p
    }

    /// `x_var` (0-based) to the integer power `e`.
    pub fn var(nvars: usize, var: usize, e: i64) -> Self {
        Self::monomial(&XWeight::var(nvars, var, e, 1))
    }

    /// `a + b` for two signed monomials.
    pub fn binomial(a: &XWeight, b: &XWeight) -> Self {
        Self::monomial(a).add(&Self::monomial(b))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, w: XWeight, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let (w, c) = if w.sign() < 0 {
            (w.unsigned(), -c)
        } else {
            (w, c)
        };
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&XWeight, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (w, c) in &other.terms {
            p.add_term(w.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut acc: std::collections::HashMap<XWeight, BigInt> = std::collections::HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *acc.entry(a.mul(b)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let mut p = Self::zero(self.nvars.max(other.nvars));
        p.terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        p
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale_monomial(&self, w: &XWeight) -> LaurentPoly {
        let s = BigInt::from(w.sign());
        let u = w.unsigned();
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(&u), c * &s))
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> LaurentPoly {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Single term as a signed monomial, if the polynomial has one term with
    /// unit coefficient.
    pub fn as_unit_monomial(&self) -> Option<XWeight> {
        if self.terms.len() != 1 {
            return None;
        }
        let (w, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some(w.clone())
        } else if (-c).is_one() {
            Some(w.negated())
        } else {
            None
        }
    }

    /// Componentwise minimum of the exponents.
    pub fn min_exponents(&self) -> XWeight {
        let mut e: Vec<i64> = vec![i64::MAX; self.nvars];
        for w in self.terms.keys() {
            for (k, v) in w.scaled().iter().enumerate() {
                e[k] = e[k].min(*v);
            }
        }
        XWeight::from_scaled(
            e.into_iter()
                .map(|v| if v == i64::MAX { 0 } else { v })
                .collect(),
        )
    }

    pub fn denominator_lcm(&self) -> i64 {
        self.terms
            .keys()
            .fold(1, |acc, w| num_integer::lcm(acc, w.denominator_lcm()))
    }

    /// Degree range of one variable (scaled exponents).
    pub fn degree_range(&self, var: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|w| w.scaled()[var]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Terms of lowest (or highest) degree in `var`, with that variable
    /// kept.
    pub fn extreme_part(&self, var: usize, lowest: bool) -> LaurentPoly {
        let Some((lo, hi)) = self.degree_range(var) else {
            return self.clone();
        };
        let target = if lowest { lo } else { hi };
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.scaled()[var] == target)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `x_var = 1`.
    pub fn at_one(&self, var: usize) -> LaurentPoly {
        let mut p = Self::zero(self.nvars);
        for (w, c) in &self.terms {
            let mut e: Vec<i64> = w.scaled().to_vec();
            e[var] = 0;
            p.add_term(XWeight::from_scaled(e.into_iter().collect()), c.clone());
        }
        p
    }

    /// Substitutes `x_var -> x_var^{-1}`.
    pub fn invert_var(&self, var: usize) -> LaurentPoly {
        let mut p = Self::zero(self.nvars);
        for (w, c) in &self.terms {
            let mut e: Vec<i64> = w.scaled().to_vec();
            e[var] = -e[var];
            p.add_term(XWeight::from_scaled(e.into_iter().collect()), c.clone());
        }
        p
    }

    /// Value at `x_i = s_i^L` modulo [`MODP`], where `L` clears all exponent
    /// denominators.
    pub fn eval_modp(&self, point: &ModpPoint) -> u64 {
        let mut acc = 0u64;
        for (w, c) in &self.terms {
            let cm = bigint_mod(c);
            let v = point.monomial(w);
            acc = addm(acc, mulm(cm, v));
        }
        acc
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            let neg = c.is_negative();
            if !first {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            if w.is_unit_monomial() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{a}*{w}")?;
            }
        }
        Ok(())
    }
}

/// `num / Π den_k^{m_k}` with canonicalised denominator factors.
#[derive(Clone, Debug)]
pub struct RationalFn {
    num: LaurentPoly,
    den: BTreeMap<LaurentPoly, u32>,
}

impl RationalFn {
    pub fn from_poly(p: LaurentPoly) -> Self {
        RationalFn {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::zero(nvars))
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(LaurentPoly::one(nvars))
    }

    pub fn monomial(w: &XWeight) -> Self {
        Self::from_poly(LaurentPoly::monomial(w))
    }

    /// `1 / p`.
    pub fn recip(p: &LaurentPoly) -> Self {
        let mut r = Self::one(p.nvars());
        r.divide_by(p, 1);
        r
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator_factors(&self) -> impl Iterator<Item = (&LaurentPoly, &u32)> {
        self.den.iter()
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn divide_by(&mut self, p: &LaurentPoly, mult: u32) {
        assert!(!p.is_zero(), "division by zero polynomial");
        if mult == 0 {
            return;
        }
        if let Some(m) = p.as_unit_monomial() {
            self.num = self.num.scale_monomial(&m.inv().pow(mult as i64));
            return;
        }
        let (factor, unit) = canonical_factor(p);
        self.num = self.num.scale_monomial(&unit.inv().pow(mult as i64));
        *self.den.entry(factor).or_insert(0) += mult;
    }

    pub fn mul(&self, other: &RationalFn) -> RationalFn {
        let mut r = RationalFn {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (f, m) in &other.den {
            *r.den.entry(f.clone()).or_insert(0) += m;
        }
        r
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> RationalFn {
        RationalFn {
            num: self.num.mul(p),
            den: self.den.clone(),
        }
    }

    pub fn scale_monomial(&self, w: &XWeight) -> RationalFn {
        RationalFn {
            num: self.num.scale_monomial(w),
            den: self.den.clone(),
        }
    }

    pub fn div_poly(&self, p: &LaurentPoly) -> RationalFn {
        let mut r = self.clone();
        r.divide_by(p, 1);
        r
    }

    /// Reciprocal; the numerator must be nonzero.
    pub fn recip_fn(&self) -> RationalFn {
        let mut r = RationalFn::from_poly(LaurentPoly::one(self.nvars()));
        for (f, m) in &self.den {
            r.num = r.num.mul(&f.pow(*m));
        }
        r.divide_by(&self.num, 1);
        r
    }

    pub fn div(&self, other: &RationalFn) -> RationalFn {
        self.mul(&other.recip_fn())
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    fn over_common(&self, common: &BTreeMap<LaurentPoly, u32>) -> LaurentPoly {
        let mut n = self.num.clone();
        for (f, m) in common {
            let have = self.den.get(f).copied().unwrap_or(0);
            for _ in have..*m {
                n = n.mul(f);
            }
        }
        n
    }

    fn common_den(a: &RationalFn, b: &RationalFn) -> BTreeMap<LaurentPoly, u32> {
        let mut common = a.den.clone();
        for (f, m) in &b.den {
            let e = common.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        common
    }

    pub fn add(&self, other: &RationalFn) -> RationalFn {
        let common = Self::common_den(self, other);
        RationalFn {
            num: self.over_common(&common).add(&other.over_common(&common)),
            den: common,
        }
    }

    pub fn sub(&self, other: &RationalFn) -> RationalFn {
        self.add(&other.neg())
    }

    /// Exact equality by cross multiplication over the common denominator.
    pub fn eq_exact(&self, other: &RationalFn) -> bool {
        let common = Self::common_den(self, other);
        self.over_common(&common) == other.over_common(&common)
    }

    pub fn denominator_lcm(&self) -> i64 {
        self.den.keys().fold(self.num.denominator_lcm(), |acc, f| {
            num_integer::lcm(acc, f.denominator_lcm())
        })
    }

    /// Value at a point, or `None` if a denominator factor vanishes there.
    pub fn eval_modp(&self, point: &ModpPoint) -> Option<u64> {
        let mut den = 1u64;
        for (f, m) in &self.den {
            let v = f.eval_modp(point);
            if v == 0 {
                return None;
            }
            den = mulm(den, powm(v, *m as u64));
        }
        Some(mulm(self.num.eval_modp(point), invm(den)))
    }

    /// Lowest- or highest-order part in one variable, taken factor by
    /// factor. This is the leading behaviour as `x_var → 0` or `∞`.
    pub fn extreme_part(&self, var: usize, lowest: bool) -> RationalFn {
        let mut r = RationalFn::from_poly(self.num.extreme_part(var, lowest));
        for (f, m) in &self.den {
            r.divide_by(&f.extreme_part(var, lowest), *m);
        }
        r
    }

    /// Substitutes `x_var = 1`; fails if a denominator factor vanishes.
    pub fn at_one(&self, var: usize) -> Option<RationalFn> {
        let mut r = RationalFn::from_poly(self.num.at_one(var));
        for (f, m) in &self.den {
            let g = f.at_one(var);
            if g.is_zero() {
                return None;
            }
            r.divide_by(&g, *m);
        }
        Some(r)
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.num)?;
        for (p, m) in &self.den {
            if *m == 1 {
                write!(f, " / ({p})")?;
            } else {
                write!(f, " / ({p})^{m}")?;
            }
        }
        Ok(())
    }
}

/// Splits `p = unit · factor` where `unit` is a signed monomial and `factor`
/// has componentwise minimal exponent zero and a positive leading coefficient.
fn canonical_factor(p: &LaurentPoly) -> (LaurentPoly, XWeight) {
    let m = p.min_exponents();
    let mut q = p.scale_monomial(&m.inv());
    let lead_neg = q
        .terms
        .iter()
        .next_back()
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    let mut unit = m;
    if lead_neg {
        q = q.neg();
        unit = unit.negated();
    }
    (q, unit)
}

pub fn addm(a: u64, b: u64) -> u64 {
    ((a as u128 + b as u128) % MODP as u128) as u64
}

pub fn subm(a: u64, b: u64) -> u64 {
    addm(a, MODP - b % MODP)
}

pub fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODP as u128) as u64
}

pub fn powm(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    b %= MODP;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b);
        }
        b = mulm(b, b);
        e >>= 1;
    }
    r
}

pub fn invm(a: u64) -> u64 {
    assert!(a % MODP != 0, "inverse of zero");
    powm(a, MODP - 2)
}

pub fn bigint_mod(c: &BigInt) -> u64 {
    let p = BigInt::from(MODP);
    let r = ((c % &p) + &p) % &p;
    r.to_u64().expect("reduced residue")
}

/// A sample point: `x_i = s_i^L` with `L` clearing every exponent
/// denominator in play.
#[derive(Clone, Debug)]
pub struct ModpPoint {
    base: Vec<u64>,
    inv: Vec<u64>,
    lcm: i64,
}

impl ModpPoint {
    pub fn random<R: Rng>(nvars: usize, lcm: i64, rng: &mut R) -> Self {
        let base: Vec<u64> = (0..nvars).map(|_| rng.gen_range(2..MODP - 1)).collect();
        let inv = base.iter().map(|&b| invm(b)).collect();
        ModpPoint { base, inv, lcm }
    }

    /// The sampled bases `s_i`.
    pub fn bases(&self) -> &[u64] {
        &self.base
    }

    pub fn lcm(&self) -> i64 {
        self.lcm
    }

    pub fn monomial(&self, w: &XWeight) -> u64 {
        let mut v = if w.sign() < 0 { MODP - 1 } else { 1 };
        for (k, &e) in w.scaled().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let num = e * self.lcm;
            assert_eq!(num % XDEN, 0, "exponent denominator not cleared");
            let p = num / XDEN;
            v = if p > 0 {
                mulm(v, powm(self.base[k], p as u64))
            } else {
                mulm(v, powm(self.inv[k], (-p) as u64))
            };
        }
        v
    }
}

/// Outcome of a randomised comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModpOutcome {
    pub equal: bool,
    pub trials: usize,
    pub resamples: usize,
}

/// Compares two rational functions at `trials` random points.
pub fn modp_equal<R: Rng>(
    a: &RationalFn,
    b: &RationalFn,
    trials: usize,
    rng: &mut R,
) -> ModpOutcome {
    let nvars = a.nvars().max(b.nvars());
    let lcm = num_integer::lcm(a.denominator_lcm(), b.denominator_lcm());
    let mut done = 0;
    let mut resamples = 0;
    while done < trials {
        let pt = ModpPoint::random(nvars, lcm, rng);
        match (a.eval_modp(&pt), b.eval_modp(&pt)) {
            (Some(x), Some(y)) => {
                if x != y {
                    return ModpOutcome {
                        equal: false,
                        trials: done + 1,
                        resamples,
                    };
                }
                done += 1;
            }
            _ => {
                resamples += 1;
                assert!(resamples < 1000, "denominator vanishes too often");
            }
        }
    }
    ModpOutcome {
        equal: true,
        trials: done,
        resamples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn x(n: usize, i: usize) -> LaurentPoly {
        LaurentPoly::var(n, i, 1)
    }

    #[test]
    fn prime_is_above_two_to_sixty() {
        assert!(MODP > 1u64 << 61);
        // Fermat check on a few bases
        for a in [2u64, 3, 5, 7, 11] {
            assert_eq!(powm(a, MODP - 1), 1);
        }
    }

    #[test]
    fn geometric_identity() {
        // 1/(1-x) - x/(1-x) = 1
        let one = LaurentPoly::one(1);
        let f = one.sub(&x(1, 0));
        let a = RationalFn::recip(&f);
        let b = RationalFn::from_poly(x(1, 0)).div_poly(&f);
        assert!(a.sub(&b).eq_exact(&RationalFn::one(1)));
    }

    #[test]
    fn factors_are_canonical() {
        // (x - 1) and (1 - x) and (x^{-1} - 1) share a factor
        let one = LaurentPoly::one(1);
        let p = x(1, 0).sub(&one);
        let q = one.sub(&x(1, 0));
        let r = LaurentPoly::var(1, 0, -1).sub(&one);
        let s = RationalFn::recip(&p)
            .mul(&RationalFn::recip(&q))
            .mul(&RationalFn::recip(&r));
        assert_eq!(s.denominator_factors().count(), 1);
        assert_eq!(*s.denominator_factors().next().unwrap().1, 3);
    }

    #[test]
    fn half_exponents_modp() {
        // (x^{1/2} + x^{-1/2})^2 = x + 2 + x^{-1}
        let h = LaurentPoly::monomial(&XWeight::var(1, 0, 1, 2))
            .add(&LaurentPoly::monomial(&XWeight::var(1, 0, -1, 2)));
        let lhs = RationalFn::from_poly(h.mul(&h));
        let rhs = RationalFn::from_poly(
            x(1, 0)
                .add(&LaurentPoly::constant(1, BigInt::from(2)))
                .add(&LaurentPoly::var(1, 0, -1)),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(modp_equal(&lhs, &rhs, 3, &mut rng).equal);
        assert!(lhs.eq_exact(&rhs));
        let wrong = rhs.add(&RationalFn::one(1));
        assert!(!modp_equal(&lhs, &wrong, 3, &mut rng).equal);
    }

    #[test]
    fn extreme_parts() {
        // (1 - x y)(x - y) → lowest in x: -y ; highest in x: -y x^2
        let n = 2;
        let one = LaurentPoly::one(n);
        let p = one.sub(&x(n, 0).mul(&x(n, 1))).mul(&x(n, 0).sub(&x(n, 1)));
        assert_eq!(p.extreme_part(0, true), x(n, 1).neg());
        assert_eq!(
            p.extreme_part(0, false),
            x(n, 0).mul(&x(n, 0)).mul(&x(n, 1)).neg()
        );
        assert_eq!(p.at_one(0), one.sub(&x(n, 1)).mul(&one.sub(&x(n, 1))));
    }

    proptest! {
        #[test]
        fn ring_laws(a in proptest::collection::vec((-3i64..3, -3i64..3, -4i64..4), 1..5),
                     b in proptest::collection::vec((-3i64..3, -3i64..3, -4i64..4), 1..5)) {
            let mk = |v: &[(i64, i64, i64)]| {
                let mut p = LaurentPoly::zero(2);
                for &(e0, e1, c) in v {
                    p.add_term(XWeight::var(2, 0, e0, 1).mul(&XWeight::var(2, 1, e1, 1)), BigInt::from(c));
                }
                p
            };
            let (p, q) = (mk(&a), mk(&b));
            prop_assert_eq!(p.mul(&q), q.mul(&p));
            prop_assert!(p.add(&q).sub(&q) == p);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let pt = ModpPoint::random(2, 1, &mut rng);
            prop_assert_eq!(p.mul(&q).eval_modp(&pt), mulm(p.eval_modp(&pt), q.eval_modp(&pt)));
        }

        #[test]
        fn rational_add_matches_modp(c in 1i64..5, d in 1i64..5) {
            // 1/(1 - c x) + 1/(1 - d y) evaluated two ways
            let n = 2;
            let one = LaurentPoly::one(n);
            let f = one.sub(&x(n, 0).scale(&BigInt::from(c)));
            let g = one.sub(&x(n, 1).scale(&BigInt::from(d)));
            let s = RationalFn::recip(&f).add(&RationalFn::recip(&g));
            let mut rng = ChaCha8Rng::seed_from_u64((c * 10 + d) as u64);
            let pt = ModpPoint::random(n, 1, &mut rng);
            let direct = addm(invm(f.eval_modp(&pt)), invm(g.eval_modp(&pt)));
            prop_assert_eq!(s.eval_modp(&pt), Some(direct));
        }
    }
}
