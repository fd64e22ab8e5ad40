//! Truncated formal series in ℓ-monomials, graded by root height.
//!
//! A series carries an upper bound `top` for the weights of its terms (in
//! simple-root coordinates) and a truncation bound. Every term has height
//! `ht(top - wt) >= 0`, and every term of height at most the bound is exact.
//! Terms above the bound are never stored.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::laurent::LaurentPoly;
use crate::monomial::LMonomial;
use crate::root_data::{AlgebraContext, AlphaCoords};
use crate::weight::{XWeight, XDEN};

#[derive(Clone, Debug)]
pub struct GradedSeries {
    ctx: AlgebraContext,
    terms: HashMap<LMonomial, BigInt>,
    top: AlphaCoords,
    bound: i64,
}

impl GradedSeries {
    /// The zero series with the given top weight and truncation.
    pub fn zero(ctx: AlgebraContext, top: &XWeight, truncation: u32) -> Self {
        GradedSeries {
            ctx,
            terms: HashMap::new(),
            top: ctx.alpha_coords(top),
            bound: truncation as i64 * XDEN,
        }
    }

    pub fn one(ctx: AlgebraContext, truncation: u32) -> Self {
        Self::monomial(ctx, LMonomial::one(ctx.num_x()), BigInt::one(), truncation)
    }

    /// A single term; its weight becomes the top.
    pub fn monomial(ctx: AlgebraContext, m: LMonomial, coeff: BigInt, truncation: u32) -> Self {
        let mut s = GradedSeries {
            ctx,
            terms: HashMap::new(),
            top: ctx.alpha_coords(m.x()),
            bound: truncation as i64 * XDEN,
        };
        if !coeff.is_zero() {
            s.terms.insert(m, coeff);
        }
        s
    }

    pub(crate) fn from_raw(
        ctx: AlgebraContext,
        top: AlphaCoords,
        bound: i64,
        terms: HashMap<LMonomial, BigInt>,
    ) -> Self {
        let mut s = GradedSeries {
            ctx,
            terms,
            top,
            bound,
        };
        s.terms.retain(|_, c| !c.is_zero());
        debug_assert!(s.terms.keys().all(|m| {
            let h = s.height_scaled(m);
            h >= 0 && h <= s.bound
        }));
        s
    }

    /// Adds a term, merging coefficients. Terms above the bound are ignored.
    pub fn add_term(&mut self, m: LMonomial, coeff: BigInt) {
        let h = self.height_scaled(&m);
        assert!(h >= 0, "term {m} lies above the top weight");
        if h > self.bound || coeff.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn ctx(&self) -> AlgebraContext {
        self.ctx
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

    pub fn terms(&self) -> impl Iterator<Item = (&LMonomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &LMonomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn top_coords(&self) -> &[i64] {
        &self.top
    }

    pub fn top_weight(&self) -> XWeight {
        self.ctx.from_alpha_coords(&self.top)
    }

    pub fn bound_scaled(&self) -> i64 {
        self.bound
    }

    pub fn truncation(&self) -> Ratio<i64> {
        Ratio::new(self.bound, XDEN)
    }

    pub fn height_scaled(&self, m: &LMonomial) -> i64 {
        self.ctx.height_below(&self.top, m.x())
    }

    pub fn height(&self, m: &LMonomial) -> Ratio<i64> {
        Ratio::new(self.height_scaled(m), XDEN)
    }

    /// Lowers the truncation bound, dropping terms above it.
    pub fn truncated(&self, truncation: Ratio<i64>) -> Self {
        let b = (truncation * XDEN).to_integer();
        let mut s = self.clone();
        if b < s.bound {
            s.bound = b;
            let ctx = s.ctx;
            let top = s.top.clone();
            s.terms.retain(|m, _| ctx.height_below(&top, m.x()) <= b);
        }
        s
    }

    /// Raises the top weight to `top` (componentwise at least the current
    /// one); the truncation shrinks by the height difference.
    fn lifted(&self, top: &[i64]) -> (i64, i64) {
        let diff: i64 = top.iter().zip(self.top.iter()).map(|(a, b)| a - b).sum();
        debug_assert!(top.iter().zip(self.top.iter()).all(|(a, b)| a >= b));
        (diff, self.bound + diff)
    }

    pub fn add(&self, other: &GradedSeries) -> GradedSeries {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let top: AlphaCoords = self
            .top
            .iter()
            .zip(other.top.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        let (_, b1) = self.lifted(&top);
        let (_, b2) = other.lifted(&top);
        let bound = b1.min(b2);
        let mut terms: HashMap<LMonomial, BigInt> =
            HashMap::with_capacity(self.len() + other.len());
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            if self.ctx.height_below(&top, m.x()) > bound {
                continue;
            }
            *terms.entry(m.clone()).or_insert_with(BigInt::zero) += c;
        }
        GradedSeries::from_raw(self.ctx, top, bound, terms)
    }

    pub fn neg(&self) -> GradedSeries {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = -c.clone();
        }
        s
    }

    pub fn sub(&self, other: &GradedSeries) -> GradedSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &GradedSeries) -> GradedSeries {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let top: AlphaCoords = self
            .top
            .iter()
            .zip(other.top.iter())
            .map(|(a, b)| a + b)
            .collect();
        let bound = self.bound.min(other.bound);
        let lhs = self.by_height();
        let rhs = other.by_height();
        let mut terms: HashMap<LMonomial, BigInt> = HashMap::new();
        for (ha, ma, ca) in &lhs {
            if *ha > bound {
                break;
            }
            for (hb, mb, cb) in &rhs {
                if ha + hb > bound {
                    break;
                }
                *terms.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += *ca * *cb;
            }
        }
        GradedSeries::from_raw(self.ctx, top, bound, terms)
    }

    fn by_height(&self) -> Vec<(i64, &LMonomial, &BigInt)> {
        let mut v: Vec<_> = self
            .terms
            .iter()
            .map(|(m, c)| (self.height_scaled(m), m, c))
            .collect();
        v.sort_by_key(|t| t.0);
        v
    }

    /// Multiplies by a signed x-monomial.
    pub fn scale_x(&self, w: &XWeight) -> GradedSeries {
        let shift = self.ctx.alpha_coords(&w.unsigned());
        let top: AlphaCoords = self
            .top
            .iter()
            .zip(shift.iter())
            .map(|(a, b)| a + b)
            .collect();
        let neg = w.sign() < 0;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.times_x(w), if neg { -c.clone() } else { c.clone() }))
            .collect();
        GradedSeries::from_raw(self.ctx, top, self.bound, terms)
    }

    pub fn scale_int(&self, k: &BigInt) -> GradedSeries {
        let mut s = self.clone();
        if k.is_zero() {
            s.terms.clear();
        } else {
            for c in s.terms.values_mut() {
                *c *= k;
            }
        }
        s
    }

    /// Multiplies by a monomial with a positive x-part.
    pub fn scale_monomial(&self, m: &LMonomial) -> GradedSeries {
        let shift = self.ctx.alpha_coords(m.x());
        let top: AlphaCoords = self
            .top
            .iter()
            .zip(shift.iter())
            .map(|(a, b)| a + b)
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.mul(m), c.clone()))
            .collect();
        GradedSeries::from_raw(self.ctx, top, self.bound, terms)
    }

    /// `z ↦ q^{c/2} z`.
    pub fn shift(&self, c: i32) -> GradedSeries {
        if c == 0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (m.shifted(c), v.clone()))
            .collect();
        GradedSeries::from_raw(self.ctx, self.top.clone(), self.bound, terms)
    }

    /// Relabels nodes by `perm` (1-based, `perm[i-1]` is the image of node
    /// `i`) and moves the series into `target`. Weights are transported by
    /// permuting simple-root coordinates.
    pub fn relabel_nodes(&self, perm: &[usize], target: AlgebraContext) -> GradedSeries {
        assert_eq!(perm.len(), self.ctx.rank);
        assert_eq!(target.rank, self.ctx.rank);
        let move_coords = |c: &[i64]| -> AlphaCoords {
            let mut out: AlphaCoords = smallvec::SmallVec::from_elem(0, c.len());
            for (i, &v) in c.iter().enumerate() {
                out[perm[i] - 1] = v;
            }
            out
        };
        let top = move_coords(&self.top);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let x = target.from_alpha_coords(&move_coords(&self.ctx.alpha_coords(m.x())));
                (m.relabeled(|k| perm[k as usize - 1] as u8, x), c.clone())
            })
            .collect();
        GradedSeries::from_raw(target, top, self.bound, terms)
    }

    /// The specialisation `𝒴 ↦ 1`, keeping the x-weights.
    pub fn varpi(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero(self.ctx.num_x());
        for (m, c) in &self.terms {
            p.add_term(m.x().clone(), c.clone());
        }
        p
    }

    /// Same specialisation, kept as a truncated series so that truncation
    /// bookkeeping survives.
    pub fn varpi_series(&self) -> GradedSeries {
        let mut terms: HashMap<LMonomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            *terms
                .entry(LMonomial::from_x(m.x().clone()))
                .or_insert_with(BigInt::zero) += c;
        }
        GradedSeries::from_raw(self.ctx, self.top.clone(), self.bound, terms)
    }

    /// Number of stored terms at each height.
    pub fn height_profile(&self) -> BTreeMap<Ratio<i64>, usize> {
        let mut out = BTreeMap::new();
        for m in self.terms.keys() {
            *out.entry(self.height(m)).or_insert(0) += 1;
        }
        out
    }

    pub fn lowest_height(&self) -> Option<Ratio<i64>> {
        self.height_profile().keys().next().copied()
    }

    /// The terms sorted in canonical order.
    pub fn sorted_terms(&self) -> Vec<(&LMonomial, &BigInt)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    /// Deterministic text form: a header line, then one term per line in
    /// lexicographic order on the 𝒴-factors and then the x-part.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        let t = self.truncation();
        let tr = if t.is_integer() {
            t.numer().to_string()
        } else {
            format!("{}/{}", t.numer(), t.denom())
        };
        let _ = writeln!(out, "# {} trunc={} top={}", self.ctx, tr, self.top_weight());
        for (m, c) in self.sorted_terms() {
            let sign = if c.is_negative() { "-" } else { "+" };
            let _ = writeln!(out, "{}{} {}", sign, c.abs(), m);
        }
        out
    }

    /// Equal term sets (ignores top and bound).
    pub fn same_terms(&self, other: &GradedSeries) -> bool {
        self.terms == other.terms
    }

    /// Restriction to terms of height at most `h` relative to this top.
    pub fn terms_up_to(&self, h: Ratio<i64>) -> HashMap<LMonomial, BigInt> {
        let b = (h * XDEN).to_integer();
        self.terms
            .iter()
            .filter(|(m, _)| self.height_scaled(m) <= b)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect()
    }
}

/// Sums a list of series; `None` for an empty list.
pub fn sum_all<'a>(items: impl IntoIterator<Item = &'a GradedSeries>) -> Option<GradedSeries> {
    let mut acc: Option<GradedSeries> = None;
    for s in items {
        acc = Some(match acc {
            None => s.clone(),
            Some(a) => a.add(s),
        });
    }
    acc
}
