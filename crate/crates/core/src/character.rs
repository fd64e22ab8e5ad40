//! Character-level identities: closed forms of the specialised
//! determinants, their expansion against the series, and the rational
//! identities behind the relations of types B, C and D.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::builders::{BuildError, SeriesBank, SpinSign};
use crate::determinant::casorati;
use crate::identities::x_small;
use crate::laurent::{addm, invm, mulm, subm, LaurentPoly, ModpPoint, RationalFn, MODP};
use crate::root_data::{
    format_tuple, has_duplicates, remove_entry, AlgebraContext, AlgebraType, BoxIndex,
};
use crate::weight::{XWeight, XDEN};

#[derive(Debug, Error)]
pub enum CharError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("tuple {0} has repeated entries")]
    Duplicates(String),
    #[error("tuple {0} is not increasing")]
    NotIncreasing(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("size constraint violated: {0}")]
    Size(String),
    #[error("parity constraint violated: {0}")]
    Parity(String),
    #[error("expansion variable {0} is not in the negative root cone")]
    NotRootNegative(String),
    #[error("denominators vanished at {0} sample points")]
    Degenerate(usize),
    #[error("specialisation failed: {0}")]
    Specialisation(String),
}

type Result<T> = std::result::Result<T, CharError>;

/// How an identity between rational functions is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Cross-multiplied polynomial equality.
    Exact,
    /// Equality at `trials` random points modulo [`MODP`].
    Modp { trials: usize, seed: u64 },
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::Exact => "exact".into(),
            Mode::Modp { trials, seed } => format!("modp(trials={trials},seed={seed})"),
        }
    }
}

/// Outcome of one character-level identity instance.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CharVerdict {
    pub identity: String,
    pub parameters: String,
    pub mode: String,
    pub equal: bool,
    /// First nonzero term of the difference, or the failing sample point.
    pub witness: Option<String>,
    /// Rests on the conjectured spin characters.
    pub conditional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PitOutcome {
    pub equal: bool,
    pub witness: Option<String>,
}

/// A product `unit · Π num / Π den` kept unexpanded.
#[derive(Clone, Debug)]
pub struct Term {
    unit: XWeight,
    num: Vec<LaurentPoly>,
    den: Vec<LaurentPoly>,
}

impl Term {
    pub fn one(nvars: usize) -> Self {
        Term {
            unit: XWeight::one(nvars),
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn monomial(w: &XWeight) -> Self {
        Term {
            unit: w.clone(),
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.unit.len()
    }

    pub fn times_monomial(mut self, w: &XWeight) -> Self {
        self.unit = self.unit.mul(w);
        self
    }

    pub fn times(mut self, p: LaurentPoly) -> Self {
        match p.as_unit_monomial() {
            Some(m) => self.unit = self.unit.mul(&m),
            None => self.num.push(p),
        }
        self
    }

    pub fn over(mut self, p: LaurentPoly) -> Self {
        assert!(!p.is_zero(), "division by zero polynomial");
        match p.as_unit_monomial() {
            Some(m) => self.unit = self.unit.div(&m),
            None => self.den.push(p),
        }
        self
    }

    pub fn neg(mut self) -> Self {
        self.unit = self.unit.negated();
        self
    }

    pub fn mul(&self, other: &Term) -> Term {
        let mut t = self.clone();
        t.unit = t.unit.mul(&other.unit);
        t.num.extend(other.num.iter().cloned());
        t.den.extend(other.den.iter().cloned());
        t
    }

    pub fn div(&self, other: &Term) -> Term {
        let mut t = self.clone();
        t.unit = t.unit.div(&other.unit);
        t.num.extend(other.den.iter().cloned());
        t.den.extend(other.num.iter().cloned());
        t
    }

    pub fn to_rational(&self) -> RationalFn {
        let mut p = LaurentPoly::monomial(&self.unit);
        for f in &self.num {
            p = p.mul(f);
        }
        let mut r = RationalFn::from_poly(p);
        for f in &self.den {
            r = r.div_poly(f);
        }
        r
    }

    fn denominator_lcm(&self) -> i64 {
        self.num
            .iter()
            .chain(&self.den)
            .fold(self.unit.denominator_lcm(), |acc, f| {
                num_integer::lcm(acc, f.denominator_lcm())
            })
    }

    pub fn eval_modp(&self, pt: &ModpPoint) -> Option<u64> {
        let mut v = pt.monomial(&self.unit);
        for f in &self.num {
            v = mulm(v, f.eval_modp(pt));
        }
        let mut d = 1u64;
        for f in &self.den {
            let e = f.eval_modp(pt);
            if e == 0 {
                return None;
            }
            d = mulm(d, e);
        }
        Some(mulm(v, invm(d)))
    }

    fn map_factors(&self, unit: XWeight, op: impl Fn(&LaurentPoly) -> LaurentPoly) -> Result<Term> {
        let mut t = Term::monomial(&unit);
        for f in &self.num {
            t = t.times(op(f));
        }
        for f in &self.den {
            let g = op(f);
            if g.is_zero() {
                return Err(CharError::Specialisation(format!(
                    "denominator factor {f} vanishes"
                )));
            }
            t = t.over(g);
        }
        Ok(t)
    }
}

fn with_exponent(w: &XWeight, var: usize, e: i64) -> XWeight {
    let mut v: Vec<i64> = w.scaled().to_vec();
    v[var] = e;
    let u = XWeight::from_scaled(v.into_iter().collect());
    if w.sign() < 0 {
        u.negated()
    } else {
        u
    }
}

fn sum_rational(nvars: usize, terms: &[Term]) -> RationalFn {
    terms
        .iter()
        .fold(RationalFn::zero(nvars), |acc, t| acc.add(&t.to_rational()))
}

fn witness_of(p: &LaurentPoly) -> Option<String> {
    p.terms().next().map(|(w, c)| format!("{c} {w}"))
}

/// Samples points until `trials` of them are usable and compares the two
/// values `eval` returns at each.
fn modp_compare(
    nvars: usize,
    lcm: i64,
    trials: usize,
    seed: u64,
    eval: impl Fn(&ModpPoint) -> Option<(u64, u64)>,
) -> Result<PitOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut misses = 0;
    while done < trials {
        let pt = ModpPoint::random(nvars, lcm, &mut rng);
        match eval(&pt) {
            Some((a, b)) if a == b => done += 1,
            Some((a, b)) => {
                return Ok(PitOutcome {
                    equal: false,
                    witness: Some(format!(
                        "x_i = s_i^{} with s = {:?}: lhs {a}, rhs {b} (mod {MODP})",
                        pt.lcm(),
                        pt.bases()
                    )),
                })
            }
            None => {
                misses += 1;
                if misses >= 1000 {
                    return Err(CharError::Degenerate(misses));
                }
            }
        }
    }
    Ok(PitOutcome {
        equal: true,
        witness: None,
    })
}

fn eval_sum(terms: &[Term], pt: &ModpPoint) -> Option<u64> {
    terms
        .iter()
        .try_fold(0u64, |acc, t| t.eval_modp(pt).map(|v| addm(acc, v)))
}

/// Decides `Σ lhs = Σ rhs`.
pub fn pit_equal_sums(nvars: usize, lhs: &[Term], rhs: &[Term], mode: Mode) -> Result<PitOutcome> {
    match mode {
        Mode::Exact => {
            let diff = sum_rational(nvars, lhs).sub(&sum_rational(nvars, rhs));
            Ok(PitOutcome {
                equal: diff.is_zero(),
                witness: witness_of(diff.numerator()),
            })
        }
        Mode::Modp { trials, seed } => {
            let lcm = lhs
                .iter()
                .chain(rhs)
                .fold(1, |acc, t| num_integer::lcm(acc, t.denominator_lcm()));
            modp_compare(nvars, lcm, trials, seed, |pt| {
                Some((eval_sum(lhs, pt)?, eval_sum(rhs, pt)?))
            })
        }
    }
}

pub fn pit_equal(lhs: &RationalFn, rhs: &RationalFn, mode: Mode) -> Result<PitOutcome> {
    let as_term = |r: &RationalFn| {
        let mut t = Term::one(r.nvars()).times(r.numerator().clone());
        for (f, m) in r.denominator_factors() {
            for _ in 0..*m {
                t = t.over(f.clone());
            }
        }
        t
    };
    let n = lhs.nvars().max(rhs.nvars());
    pit_equal_sums(n, &[as_term(lhs)], &[as_term(rhs)], mode)
}

fn verdict(
    identity: &str,
    parameters: String,
    mode: Mode,
    out: PitOutcome,
    conditional: bool,
) -> CharVerdict {
    CharVerdict {
        identity: identity.to_string(),
        parameters,
        mode: mode.label(),
        equal: out.equal,
        witness: if out.equal { None } else { out.witness },
        conditional,
    }
}

fn binom(a: &XWeight, b: &XWeight) -> LaurentPoly {
    LaurentPoly::binomial(a, b)
}

/// `1 - w`.
fn one_minus(w: &XWeight) -> LaurentPoly {
    binom(&XWeight::one(w.len()), &w.negated())
}

/// `1 + w`.
fn one_plus(w: &XWeight) -> LaurentPoly {
    binom(&XWeight::one(w.len()), w)
}

/// The factor `f_{j,k}` of the character formulas.
pub fn f_factor(ctx: &AlgebraContext, j: BoxIndex, k: BoxIndex) -> Term {
    let nv = ctx.num_x();
    let xj = ctx.x_of(j);
    let ratio = ctx.x_of(k).div(&xj);
    if ctx.ty == AlgebraType::D && k == j.bar() {
        return Term::one(nv);
    }
    let mut t = Term::one(nv).over(one_minus(&ratio));
    match ctx.ty {
        AlgebraType::B if k == j.bar() => t = t.times(one_plus(&xj.inv())),
        AlgebraType::C if k == BoxIndex::Zero => t = t.over(one_plus(&ratio)),
        _ => {}
    }
    t
}

fn require_tuple(ctx: &AlgebraContext, j: &[BoxIndex]) -> Result<()> {
    for &b in j {
        ctx.check(b)
            .map_err(|e| CharError::Unsupported(e.to_string()))?;
    }
    if has_duplicates(j) {
        return Err(CharError::Duplicates(format_tuple(j)));
    }
    if !ctx.is_increasing(j) {
        return Err(CharError::NotIncreasing(format_tuple(j)));
    }
    Ok(())
}

/// The closed form of `ϖ(Q^{(a)}_J)` as an unexpanded product.
pub fn qbar_term(ctx: &AlgebraContext, j: &[BoxIndex]) -> Result<Term> {
    require_tuple(ctx, j)?;
    let star = ctx.complement(j);
    let mut t = Term::one(ctx.num_x());
    for &a in j {
        for &b in &star {
            if ctx.precedes(a, b) {
                t = t.mul(&f_factor(ctx, a, b));
            }
        }
    }
    // an incomparable pair inside J is ordered as listed
    for (p, &a) in j.iter().enumerate() {
        for &b in &j[p + 1..] {
            if ctx.precedes(a, b) || !ctx.comparable(a, b) {
                t = t
                    .times(binom(&ctx.x_of(b), &ctx.x_of(a).negated()))
                    .mul(&f_factor(ctx, a, b));
            }
        }
    }
    Ok(t)
}

pub fn qbar_closed(ctx: &AlgebraContext, j: &[BoxIndex]) -> Result<RationalFn> {
    Ok(qbar_term(ctx, j)?.to_rational())
}

fn level(ctx: &AlgebraContext, w: &XWeight) -> i64 {
    ctx.alpha_coords(&w.unsigned()).iter().sum()
}

/// Writes `p = lead · (1 + rest)`. A denominator must already have the form
/// `1 + rest` with every monomial of `rest` a nonzero element of the
/// negative root cone, so that `rest` is the expansion variable. A
/// numerator only needs no monomial above its lead.
fn split_leading(
    ctx: &AlgebraContext,
    p: &LaurentPoly,
    denominator: bool,
) -> Result<(XWeight, LaurentPoly)> {
    let top = if denominator {
        p.terms().find(|(w, _)| w.is_unit_monomial())
    } else {
        p.terms().max_by_key(|(w, _)| level(ctx, w))
    };
    let (lw, lc) = top.ok_or_else(|| CharError::NotRootNegative(p.to_string()))?;
    let lead = if lc.is_one() {
        lw.clone()
    } else if (-lc).is_one() {
        lw.negated()
    } else {
        return Err(CharError::Unsupported(format!(
            "leading coefficient {lc} of {p} is not a unit"
        )));
    };
    let mut rest = LaurentPoly::zero(p.nvars());
    for (w, c) in p.terms() {
        if w == lw {
            continue;
        }
        let r = w.div(lw);
        let coords = ctx.alpha_coords(&r);
        let outside = if denominator {
            coords.iter().any(|&c| c > 0) || coords.iter().all(|&c| c == 0)
        } else {
            coords.iter().sum::<i64>() > 0
        };
        if outside {
            return Err(CharError::NotRootNegative(r.to_string()));
        }
        let c = if lead.sign() < 0 { -c } else { c.clone() };
        rest.add_term(r, c);
    }
    Ok((lead, rest))
}

fn cut(ctx: &AlgebraContext, p: &LaurentPoly, depth: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero(p.nvars());
    for (w, c) in p.terms() {
        if -level(ctx, w) <= depth {
            out.add_term(w.clone(), c.clone());
        }
    }
    out
}

/// Expands a product in the negative root cone up to height `depth`.
/// Returns the leading monomial and the expansion relative to it.
pub fn expand_term(ctx: &AlgebraContext, t: &Term, depth: u32) -> Result<(XWeight, LaurentPoly)> {
    let d = depth as i64 * XDEN;
    let nv = t.nvars();
    let one = LaurentPoly::one(nv);
    let mut lead = t.unit.clone();
    let mut rel = one.clone();
    for f in &t.num {
        let (l, r) = split_leading(ctx, f, false)?;
        lead = lead.mul(&l);
        rel = cut(ctx, &rel.mul(&one.add(&r)), d);
    }
    for f in &t.den {
        let (l, r) = split_leading(ctx, f, true)?;
        lead = lead.div(&l);
        let step = r.neg();
        let mut geo = one.clone();
        let mut pw = one.clone();
        loop {
            pw = cut(ctx, &pw.mul(&step), d);
            if pw.is_zero() {
                break;
            }
            geo = geo.add(&pw);
        }
        rel = cut(ctx, &rel.mul(&geo), d);
    }
    Ok((lead, rel))
}

/// Compares `ϖ` of the Casorati determinant with the expansion of its
/// closed form, through height `depth` below the leading term.
pub fn series_vs_char(
    bank: &SeriesBank,
    ctx: &AlgebraContext,
    j: &[BoxIndex],
    depth: u32,
) -> Result<CharVerdict> {
    let t = qbar_term(ctx, j)?;
    let (lead, rel) = expand_term(ctx, &t, depth)?;
    let expected = rel.scale_monomial(&lead);
    let want = depth as i64 * XDEN;
    let top = lead.unsigned();
    let mut trunc = depth;
    let mut tries = 0;
    let (s, margin) = loop {
        let s = casorati(ctx, j, trunc, 0, bank)?;
        let have = (s.truncation() * Ratio::from_integer(XDEN)).to_integer();
        let margin = have - ctx.height_below(s.top_coords(), &top);
        tries += 1;
        if margin >= want || tries > 6 {
            break (s, margin);
        }
        trunc += ((want - margin + XDEN - 1) / XDEN) as u32;
    };
    let top_coords = ctx.alpha_coords(&top);
    let mut got = LaurentPoly::zero(ctx.num_x());
    for (w, c) in s.varpi().terms() {
        if ctx.height_below(&top_coords, w) <= want {
            got.add_term(w.clone(), c.clone());
        }
    }
    let diff = got.sub(&expected);
    let out = if margin < want {
        PitOutcome {
            equal: false,
            witness: Some(format!("series exact only to scaled height {margin}")),
        }
    } else {
        PitOutcome {
            equal: diff.is_zero(),
            witness: witness_of(&diff),
        }
    };
    Ok(verdict(
        "char-bridge",
        format!("{ctx} J={} D={depth}", format_tuple(j)),
        Mode::Exact,
        out,
        false,
    ))
}

/// The conjectured character of the spin module labelled by `eps`; the
/// rank is the length of `eps`.
pub fn expected_spin_char(ty: AlgebraType, eps: &SpinSign) -> Result<RationalFn> {
    if !matches!(ty, AlgebraType::C | AlgebraType::D) {
        return Err(CharError::Unsupported(format!(
            "spin characters need type C or D, got {ty:?}"
        )));
    }
    let n = eps.len();
    if n == 0 || eps.0.iter().any(|&e| e != 1 && e != -1) {
        return Err(CharError::Size(format!("invalid sign vector {eps}")));
    }
    let xe = |i: usize| XWeight::var(n, i, -eps.0[i] as i64, 1);
    let mut t = Term::one(n);
    for i in 0..n {
        if ty == AlgebraType::C {
            t = t.over(one_minus(&xe(i).pow(2)));
        }
        for k in i + 1..n {
            t = t.over(one_minus(&xe(i).mul(&xe(k))));
        }
    }
    Ok(t.to_rational())
}

// ---- type B: the identity behind the last-node relation ----

fn half(ctx: &AlgebraContext, j: BoxIndex, num: i64) -> XWeight {
    ctx.x_of(j).pow_ratio(Ratio::new(num, 2))
}

/// `h_J = Π_{k, k̄ ∈ J} (x_k^{1/2} + x_k^{-1/2})`.
pub fn h_factor(ctx: &AlgebraContext, j: &[BoxIndex]) -> Term {
    let mut t = Term::one(ctx.num_x());
    for &k in j {
        if let BoxIndex::Plain(_) = k {
            if j.contains(&k.bar()) {
                t = t.times(binom(&half(ctx, k, 1), &half(ctx, k, -1)));
            }
        }
    }
    t
}

/// `g_{i,j} = f_{i,j} x_j^{1 - δ_{j,ī}/2}`.
pub fn g_factor(ctx: &AlgebraContext, i: BoxIndex, j: BoxIndex) -> Term {
    let e = if j == i.bar() { 1 } else { 2 };
    f_factor(ctx, i, j).times_monomial(&half(ctx, j, e))
}

fn g_over(ctx: &AlgebraContext, i: BoxIndex, j: &[BoxIndex]) -> Term {
    j.iter()
        .filter(|&&k| k != i)
        .fold(Term::one(ctx.num_x()), |t, &k| t.mul(&g_factor(ctx, i, k)))
}

/// `x̃_{i,J}`.
pub fn x_tilde(ctx: &AlgebraContext, i: BoxIndex, j: &[BoxIndex]) -> XWeight {
    let mut w = ctx.x_one();
    for &k in j {
        if ctx.precedes(k, i) {
            let e = if i == k.bar() { -1 } else { -2 };
            w = w.mul(&half(ctx, i, e).negated());
        }
    }
    for k in ctx.complement(j) {
        if ctx.precedes(i, k) {
            let e = if k == i.bar() { 1 } else { 2 };
            w = w.mul(&half(ctx, k, e));
        }
    }
    w
}

fn require_b(ctx: &AlgebraContext) -> Result<()> {
    if ctx.ty == AlgebraType::B {
        Ok(())
    } else {
        Err(CharError::Unsupported(format!("needs type B, got {ctx}")))
    }
}

/// Both sides of the type-B character identity for `J1, J2 ∈ 𝒥^n`.
pub fn char_b_sides(
    ctx: &AlgebraContext,
    j1: &[BoxIndex],
    j2: &[BoxIndex],
) -> Result<(Vec<Term>, Vec<Term>)> {
    require_b(ctx)?;
    let n = ctx.rank;
    if j1.len() != n || j2.len() != n {
        return Err(CharError::Size(format!(
            "tuples of sizes {} and {} for rank {n}",
            j1.len(),
            j2.len()
        )));
    }
    require_tuple(ctx, j1)?;
    require_tuple(ctx, j2)?;
    let xt = |j: &[BoxIndex], e: i64| ctx.x_of_tuple(j).pow_ratio(Ratio::new(e, 2));
    let b1 = ctx.bar_tuple(&ctx.complement(j1));
    let b2 = ctx.bar_tuple(&ctx.complement(j2));
    let lhs = vec![
        Term::monomial(&xt(j1, -1))
            .mul(&h_factor(ctx, &b1))
            .mul(&h_factor(ctx, j2)),
        Term::monomial(&xt(j2, -1))
            .mul(&h_factor(ctx, &b2))
            .mul(&h_factor(ctx, j1))
            .neg(),
    ];
    let star1 = ctx.complement(j1);
    let star2 = ctx.complement(j2);
    let mut rhs = Vec::new();
    for &j in j2 {
        if j1.contains(&j) {
            continue;
        }
        let t = Term::monomial(&xt(j1, 1).mul(&xt(j2, -2)).mul(&half(ctx, j, 3)))
            .mul(&g_over(ctx, j, &star1).div(&g_over(ctx, j, &star2)))
            .mul(&h_factor(ctx, &remove_entry(j2, j)))
            .mul(&h_factor(ctx, &remove_entry(&b1, j.bar())));
        rhs.push(t);
    }
    Ok((lhs, rhs))
}

pub fn check_char_b(
    ctx: &AlgebraContext,
    j1: &[BoxIndex],
    j2: &[BoxIndex],
    mode: Mode,
) -> Result<CharVerdict> {
    let (lhs, rhs) = char_b_sides(ctx, j1, j2)?;
    let out = pit_equal_sums(ctx.num_x(), &lhs, &rhs, mode)?;
    Ok(verdict(
        "char-b",
        format!("{ctx} J1={} J2={}", format_tuple(j1), format_tuple(j2)),
        mode,
        out,
        false,
    ))
}

fn f_block(ctx: &AlgebraContext, left: &[BoxIndex], right: &[BoxIndex]) -> Term {
    let mut t = Term::one(ctx.num_x());
    for &a in left {
        for &b in right {
            if ctx.precedes(a, b) {
                t = t.mul(&f_factor(ctx, a, b));
            }
        }
    }
    t
}

/// All subsets of the index set, as increasing tuples.
fn all_subsets(ctx: &AlgebraContext) -> Vec<Vec<BoxIndex>> {
    let idx = ctx.indices();
    (0..1u32 << idx.len())
        .map(|mask| {
            idx.iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &b)| b)
                .collect()
        })
        .collect()
}

fn first_failure(
    identity: &str,
    ctx: &AlgebraContext,
    mode: Mode,
    cases: impl IntoIterator<Item = (String, Result<PitOutcome>)>,
) -> Result<CharVerdict> {
    let mut count = 0usize;
    for (label, out) in cases {
        let out = out?;
        count += 1;
        if !out.equal {
            let witness = format!("{label}: {}", out.witness.unwrap_or_default());
            return Ok(verdict(
                identity,
                format!("{ctx}"),
                mode,
                PitOutcome {
                    equal: false,
                    witness: Some(witness),
                },
                false,
            ));
        }
    }
    Ok(verdict(
        identity,
        format!("{ctx} instances={count}"),
        mode,
        PitOutcome {
            equal: true,
            witness: None,
        },
        false,
    ))
}

/// The product and quotient identities among the `f`, `g` and `x̃`
/// factors used to reduce the type-B identity, over every subset `J`.
pub fn appendix_c_helpers(ctx: &AlgebraContext, mode: Mode) -> Result<Vec<CharVerdict>> {
    require_b(ctx)?;
    let nv = ctx.num_x();
    let subsets = all_subsets(ctx);
    let idx = ctx.indices();
    let mut out = Vec::new();

    let bar_product = subsets.iter().map(|j| {
        let star = ctx.complement(j);
        let lhs = f_block(ctx, &ctx.bar_tuple(&star), &ctx.bar_tuple(j));
        let rhs = f_block(ctx, j, &star);
        (format_tuple(j), pit_equal_sums(nv, &[lhs], &[rhs], mode))
    });
    out.push(first_failure("char-b-bar-product", ctx, mode, bar_product)?);

    let bar_row = subsets.iter().flat_map(|j| {
        idx.iter().map(move |&i| {
            let barred = ctx.bar_tuple(j);
            let mut lhs = Term::one(nv);
            for &k in &barred {
                if ctx.precedes(i.bar(), k) {
                    lhs = lhs.mul(&f_factor(ctx, i.bar(), k));
                }
            }
            let mut rhs = Term::one(nv);
            for &k in j {
                if ctx.precedes(k, i) {
                    rhs = rhs.mul(&f_factor(ctx, k, i));
                }
            }
            (
                format!("J={} i={i}", format_tuple(j)),
                pit_equal_sums(nv, &[lhs], &[rhs], mode),
            )
        })
    });
    out.push(first_failure("char-b-bar-row", ctx, mode, bar_row)?);

    let quotient = subsets.iter().flat_map(|j| {
        j.iter().map(move |&jk| {
            let jm = remove_entry(j, jk);
            let lhs =
                f_block(ctx, &jm, &ctx.complement(&jm)).div(&f_block(ctx, j, &ctx.complement(j)));
            let mut num = Term::one(nv);
            for &i in j {
                if ctx.precedes(i, jk) {
                    num = num.mul(&g_factor(ctx, jk, i));
                }
            }
            let mut den = Term::one(nv);
            for k in ctx.complement(j) {
                if ctx.precedes(jk, k) {
                    den = den.mul(&g_factor(ctx, jk, k));
                }
            }
            let rhs = num.div(&den).times_monomial(&x_tilde(ctx, jk, j));
            (
                format!("J={} j={jk}", format_tuple(j)),
                pit_equal_sums(nv, &[lhs], &[rhs], mode),
            )
        })
    });
    out.push(first_failure("char-b-quotient", ctx, mode, quotient)?);

    let tuples: Vec<&Vec<BoxIndex>> = subsets.iter().filter(|j| j.len() == ctx.rank).collect();
    let mut ratio = Vec::new();
    for j1 in &tuples {
        for j2 in &tuples {
            for &j in j2.iter() {
                if j1.contains(&j) {
                    continue;
                }
                let lhs = x_small(ctx, j, j1)
                    .mul(&x_tilde(ctx, j, j2))
                    .div(&x_small(ctx, j, j2))
                    .div(&x_tilde(ctx, j, j1));
                let rhs = ctx
                    .x_of(j)
                    .pow(2)
                    .mul(&ctx.x_of_tuple(j1))
                    .div(&ctx.x_of_tuple(j2))
                    .negated();
                let equal = lhs == rhs;
                ratio.push((
                    format!("J1={} J2={} j={j}", format_tuple(j1), format_tuple(j2)),
                    Ok(PitOutcome {
                        equal,
                        witness: (!equal).then(|| format!("{lhs} vs {rhs}")),
                    }),
                ));
            }
        }
    }
    out.push(first_failure("char-b-x-ratio", ctx, Mode::Exact, ratio)?);
    Ok(out)
}

// ---- types C and D: partition sums ----

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ChVariant {
    C1,
    C2,
    C3,
    C4,
    D1,
    D2,
}

impl ChVariant {
    pub const ALL: [ChVariant; 6] = [
        ChVariant::C1,
        ChVariant::C2,
        ChVariant::C3,
        ChVariant::C4,
        ChVariant::D1,
        ChVariant::D2,
    ];

    /// `#η - #σ`.
    pub fn excess(self) -> usize {
        match self {
            ChVariant::C1 | ChVariant::C4 | ChVariant::D2 => 1,
            ChVariant::C2 | ChVariant::D1 => 2,
            ChVariant::C3 => 0,
        }
    }

    pub fn is_d(self) -> bool {
        matches!(self, ChVariant::D1 | ChVariant::D2)
    }

    pub fn id(self) -> &'static str {
        match self {
            ChVariant::C1 => "ch-c1",
            ChVariant::C2 => "ch-c2",
            ChVariant::C3 => "ch-c3",
            ChVariant::C4 => "ch-c4",
            ChVariant::D1 => "ch-d1",
            ChVariant::D2 => "ch-d2",
        }
    }
}

fn sign_pow(e: usize) -> bool {
    e % 2 == 1
}

fn set_string(s: &[usize]) -> String {
    let v: Vec<String> = s.iter().map(|k| k.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Both sides of a partition-sum identity. `sigma` and `eta` are disjoint
/// subsets of `1..=n`; `parity` fixes `#γ mod 2` in type D.
pub fn ch_sides(
    variant: ChVariant,
    n: usize,
    sigma: &[usize],
    eta: &[usize],
    parity: Option<u8>,
) -> Result<(Vec<Term>, Vec<Term>)> {
    let u = sigma.len();
    if eta.len() != u + variant.excess() {
        return Err(CharError::Size(format!(
            "{} needs #η = #σ + {}, got σ={} η={}",
            variant.id(),
            variant.excess(),
            set_string(sigma),
            set_string(eta)
        )));
    }
    let all: Vec<usize> = sigma.iter().chain(eta).copied().collect();
    let mut seen = vec![false; n + 1];
    for &k in &all {
        if k == 0 || k > n || seen[k] {
            return Err(CharError::Size(format!(
                "σ={} η={} are not disjoint subsets of 1..{n}",
                set_string(sigma),
                set_string(eta)
            )));
        }
        seen[k] = true;
    }
    match (variant.is_d(), parity) {
        (true, Some(p)) if p < 2 => {}
        (true, _) => return Err(CharError::Parity("type D sums need a parity 0 or 1".into())),
        (false, None) => {}
        (false, Some(_)) => return Err(CharError::Parity("type C sums take no parity".into())),
    }
    let x = |k: usize| XWeight::var(n, k - 1, 1, 1);
    let prod_x = |s: &[usize]| s.iter().fold(XWeight::one(n), |w, &k| w.mul(&x(k)));
    let signed = |t: Term, odd: bool| if odd { t.neg() } else { t };

    let mut lhs = Term::one(n);
    for &a in sigma {
        for &b in eta {
            lhs = lhs
                .over(one_minus(&x(a).mul(&x(b))))
                .over(binom(&x(a), &x(b).negated()));
        }
    }
    let xs = prod_x(sigma);
    lhs = match variant {
        ChVariant::C1 => signed(lhs.times_monomial(&xs.pow(2)), sign_pow(u * (u + 1) / 2)),
        ChVariant::C2 => signed(
            lhs.times_monomial(&xs.pow(2)),
            sign_pow(u * u.saturating_sub(1) / 2),
        ),
        ChVariant::C3 => signed(lhs.times_monomial(&xs), sign_pow(u * (u + 1) / 2)),
        ChVariant::C4 => signed(
            lhs.times_monomial(&xs),
            sign_pow(u * u.saturating_sub(1) / 2),
        ),
        ChVariant::D1 => signed(lhs.times_monomial(&xs), sign_pow(u * (u + 1) / 2)),
        ChVariant::D2 => signed(lhs, sign_pow(u * u.saturating_sub(1) / 2)),
    };
    match variant {
        ChVariant::C1 | ChVariant::C3 => {
            for &k in eta {
                lhs = lhs.times(one_minus(&x(k).pow(2)));
            }
        }
        ChVariant::C2 | ChVariant::C4 => {
            for &k in sigma {
                lhs = lhs.times(one_minus(&x(k)));
            }
            for &k in eta {
                lhs = lhs.times(one_plus(&x(k)));
            }
        }
        ChVariant::D1 | ChVariant::D2 => {
            for &k in sigma {
                lhs = lhs.times(one_minus(&x(k).pow(2)));
            }
        }
    }

    let mut rhs = Vec::new();
    for mask in 0..1u32 << eta.len() {
        let mut gamma = sigma.to_vec();
        let mut delta = Vec::new();
        for (b, &k) in eta.iter().enumerate() {
            if mask >> b & 1 == 1 {
                gamma.push(k);
            } else {
                delta.push(k);
            }
        }
        let (s, t) = (gamma.len(), delta.len());
        if let Some(p) = parity {
            if s % 2 != p as usize {
                continue;
            }
        }
        let mut core = Term::one(n);
        for part in [&gamma, &delta] {
            for a in 0..part.len() {
                for b in a + 1..part.len() {
                    core = core.over(one_minus(&x(part[a]).mul(&x(part[b]))));
                }
            }
        }
        for &a in &gamma {
            for &b in &delta {
                core = core.over(binom(&x(a), &x(b).negated()));
            }
        }
        let xg = prod_x(&gamma);
        let term = match variant {
            ChVariant::C1 => signed(core.times_monomial(&xg.pow(2)), sign_pow(s * (s + 1) / 2)),
            ChVariant::C2 => signed(
                core.times_monomial(&xg.pow(2)),
                sign_pow(s * s.saturating_sub(1) / 2),
            ),
            ChVariant::C3 => signed(core.times_monomial(&xg), sign_pow(s * (s + 1) / 2)),
            ChVariant::C4 => signed(
                core.times_monomial(&xg),
                sign_pow(s * s.saturating_sub(1) / 2),
            ),
            ChVariant::D1 => signed(
                core.times_monomial(&prod_x(&delta)),
                sign_pow(t * (t + 1) / 2),
            ),
            ChVariant::D2 => signed(core, sign_pow(s * s.saturating_sub(1) / 2)),
        };
        rhs.push(term);
    }
    Ok((vec![lhs], rhs))
}

fn ch_parameters(n: usize, sigma: &[usize], eta: &[usize], parity: Option<u8>) -> String {
    let mut p = format!("n={n} σ={} η={}", set_string(sigma), set_string(eta));
    if let Some(par) = parity {
        p.push_str(&format!(" parity={par}"));
    }
    p
}

pub fn check_ch(
    variant: ChVariant,
    n: usize,
    sigma: &[usize],
    eta: &[usize],
    parity: Option<u8>,
    mode: Mode,
) -> Result<CharVerdict> {
    let (lhs, rhs) = ch_sides(variant, n, sigma, eta, parity)?;
    let out = pit_equal_sums(n, &lhs, &rhs, mode)?;
    Ok(verdict(
        variant.id(),
        ch_parameters(n, sigma, eta, parity),
        mode,
        out,
        true,
    ))
}

fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..items.len() {
            cur.push(items[p]);
            rec(items, k, p + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Every `(σ, η, parity)` meeting the size constraint of `variant` at rank `n`.
pub fn ch_instances(variant: ChVariant, n: usize) -> Vec<(Vec<usize>, Vec<usize>, Option<u8>)> {
    let all: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    let mut u = 0;
    while 2 * u + variant.excess() <= n {
        for sigma in subsets_of(&all, u) {
            let rest: Vec<usize> = all.iter().copied().filter(|k| !sigma.contains(k)).collect();
            for eta in subsets_of(&rest, u + variant.excess()) {
                if variant.is_d() {
                    for p in 0..2 {
                        out.push((sigma.clone(), eta.clone(), Some(p)));
                    }
                } else {
                    out.push((sigma.clone(), eta.clone(), None));
                }
            }
        }
        u += 1;
    }
    out
}

/// The specialisations linking the partition-sum identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Chain {
    /// `x_{σ_u} → 0` in the third C identity gives the first.
    C3ToC1,
    /// `x_{σ_u} → 0` in the fourth gives the second.
    C4ToC2,
    /// `x_{σ_u} = 1` in the third gives the fourth.
    C3ToC4,
    /// `x_{σ_u} → ∞` in the second D identity gives the first.
    D2ToD1,
}

impl Chain {
    pub const ALL: [Chain; 4] = [Chain::C3ToC1, Chain::C4ToC2, Chain::C3ToC4, Chain::D2ToD1];

    pub fn endpoints(self) -> (ChVariant, ChVariant) {
        match self {
            Chain::C3ToC1 => (ChVariant::C3, ChVariant::C1),
            Chain::C4ToC2 => (ChVariant::C4, ChVariant::C2),
            Chain::C3ToC4 => (ChVariant::C3, ChVariant::C4),
            Chain::D2ToD1 => (ChVariant::D2, ChVariant::D1),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Chain::C3ToC1 => "chain-c3-c1",
            Chain::C4ToC2 => "chain-c4-c2",
            Chain::C3ToC4 => "chain-c3-c4",
            Chain::D2ToD1 => "chain-d2-d1",
        }
    }
}

/// Lowest-order coefficient of a product in `x_var`, with its order.
fn lowest_coefficient(t: &Term, var: usize) -> Result<(i64, Term)> {
    let mut order = t.unit.scaled()[var];
    for f in &t.num {
        order += f.degree_range(var).map(|r| r.0).unwrap_or(0);
    }
    for f in &t.den {
        order -= f.degree_range(var).map(|r| r.0).unwrap_or(0);
    }
    let coeff = t.map_factors(with_exponent(&t.unit, var, 0), |f| {
        f.extreme_part(var, true).at_one(var)
    })?;
    Ok((order, coeff))
}

fn leading_side(terms: &[Term], var: usize) -> Result<(i64, Vec<Term>)> {
    let parts: Vec<(i64, Term)> = terms
        .iter()
        .map(|t| lowest_coefficient(t, var))
        .collect::<Result<_>>()?;
    let min = parts.iter().map(|p| p.0).min().unwrap_or(0);
    Ok((
        min,
        parts
            .into_iter()
            .filter(|p| p.0 == min)
            .map(|p| p.1)
            .collect(),
    ))
}

fn specialise(terms: &[Term], chain: Chain, var: usize) -> Result<(i64, Vec<Term>)> {
    match chain {
        Chain::C3ToC1 | Chain::C4ToC2 => leading_side(terms, var),
        Chain::C3ToC4 => {
            let out = terms
                .iter()
                .map(|t| t.map_factors(with_exponent(&t.unit, var, 0), |f| f.at_one(var)))
                .collect::<Result<_>>()?;
            Ok((0, out))
        }
        Chain::D2ToD1 => {
            let inverted: Vec<Term> = terms
                .iter()
                .map(|t| {
                    let e = -t.unit.scaled()[var];
                    t.map_factors(with_exponent(&t.unit, var, e), |f| f.invert_var(var))
                })
                .collect::<Result<_>>()?;
            leading_side(&inverted, var)
        }
    }
}

/// Checks that specialising `x_{σ_u}` in both sides of the source identity
/// gives the sides of the target identity times a fixed factor.
pub fn check_chain(
    chain: Chain,
    n: usize,
    sigma: &[usize],
    eta: &[usize],
    parity: Option<u8>,
    mode: Mode,
) -> Result<CharVerdict> {
    let (from, to) = chain.endpoints();
    let Some((&last, rest_sigma)) = sigma.split_last() else {
        return Err(CharError::Size("specialisation needs a nonempty σ".into()));
    };
    let var = last - 1;
    let (fl, fr) = ch_sides(from, n, sigma, eta, parity)?;
    let to_parity = parity.map(|p| (p + 1) % 2);
    let (tl, tr) = ch_sides(to, n, rest_sigma, eta, to_parity)?;
    let (ol, sl) = specialise(&fl, chain, var)?;
    let (or, sr) = specialise(&fr, chain, var)?;
    let params = format!("{} x_{last}", ch_parameters(n, sigma, eta, parity));
    if ol != or {
        let out = PitOutcome {
            equal: false,
            witness: Some(format!(
                "leading orders differ: {} vs {}",
                Ratio::new(ol, XDEN),
                Ratio::new(or, XDEN)
            )),
        };
        return Ok(verdict(chain.id(), params, mode, out, true));
    }
    let others: Vec<usize> = rest_sigma.iter().chain(eta).copied().collect();
    let x_rest = others.iter().fold(XWeight::one(n), |w, &k| {
        w.mul(&XWeight::var(n, k - 1, 1, 1))
    });
    let factor = match chain {
        Chain::C3ToC1 | Chain::C4ToC2 => Term::monomial(&x_rest.inv()),
        Chain::C3ToC4 => others
            .iter()
            .fold(Term::one(n), |t, &k| {
                t.over(one_minus(&XWeight::var(n, k - 1, 1, 1)))
            })
            .neg(),
        Chain::D2ToD1 => {
            let t = Term::monomial(&x_rest.inv());
            if rest_sigma.len() % 2 == 0 {
                t.neg()
            } else {
                t
            }
        }
    };
    let scaled = |v: &[Term]| v.iter().map(|t| t.mul(&factor)).collect::<Vec<_>>();
    let left = pit_equal_sums(n, &sl, &scaled(&tl), mode)?;
    let right = pit_equal_sums(n, &sr, &scaled(&tr), mode)?;
    let out = match (left.equal, right.equal) {
        (true, true) => left,
        (false, _) => PitOutcome {
            equal: false,
            witness: left.witness.map(|w| format!("lhs: {w}")),
        },
        (true, false) => PitOutcome {
            equal: false,
            witness: right.witness.map(|w| format!("rhs: {w}")),
        },
    };
    Ok(verdict(chain.id(), params, mode, out, true))
}

// ---- the polynomial forms and the Weyl denominators ----

/// Variables `x_1..x_m, y_1..y_n` of the polynomial forms.
struct XY {
    m: usize,
    n: usize,
}

impl XY {
    fn nvars(&self) -> usize {
        self.m + self.n
    }
    fn x(&self, i: usize) -> XWeight {
        XWeight::var(self.nvars(), i, 1, 1)
    }
    fn y(&self, j: usize) -> XWeight {
        XWeight::var(self.nvars(), self.m + j, 1, 1)
    }

    fn f_poly(&self) -> Term {
        let mut t = Term::one(self.nvars());
        for i in 0..self.m {
            for k in i + 1..self.m {
                t = t.times(one_minus(&self.x(i).mul(&self.x(k))));
            }
        }
        for i in 0..self.n {
            for k in i + 1..self.n {
                t = t
                    .times(one_minus(&self.y(i).mul(&self.y(k))))
                    .times(binom(&self.y(k), &self.y(i).negated()));
            }
        }
        t
    }

    /// `(-1)^{δ(J1,J2)} G_{J1,J2}` for the partition coded by `mask`
    /// (bit set means the index is in `J2`).
    fn g_poly(&self, mask: u32) -> Term {
        let in2 = |j: usize| mask >> j & 1 == 1;
        let mut t = Term::one(self.nvars());
        for i in 0..self.m {
            for j in 0..self.n {
                t = if in2(j) {
                    t.times(binom(&self.x(i), &self.y(j).negated()))
                } else {
                    t.times(one_minus(&self.x(i).mul(&self.y(j))))
                };
            }
        }
        let mut crossings = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                t = match (in2(i), in2(j)) {
                    (false, false) => t.times(binom(&self.y(j), &self.y(i).negated())),
                    (true, true) => t.times(binom(&self.y(i), &self.y(j).negated())),
                    (a, _) => {
                        if !a {
                            crossings += 1;
                        }
                        t.times(one_minus(&self.y(i).mul(&self.y(j))))
                    }
                };
            }
        }
        if crossings % 2 == 1 {
            t.neg()
        } else {
            t
        }
    }
}

/// The signed partition sum for the C-type polynomial form against its
/// closed product.
pub fn check_fg1(m: usize, n: usize, mode: Mode) -> Result<CharVerdict> {
    if n < 2 || m > n {
        return Err(CharError::Size(format!(
            "needs n ≥ 2 and m ≤ n, got m={m} n={n}"
        )));
    }
    if (n - m) % 2 != 0 {
        return Err(CharError::Parity(format!(
            "needs m ≡ n mod 2, got m={m} n={n}"
        )));
    }
    let v = XY { m, n };
    let mut lhs = Vec::new();
    if m == n {
        let mut t = v.f_poly();
        for j in 0..n {
            t = t.times(one_minus(&v.y(j).pow(2)));
        }
        lhs.push(t);
    }
    let rhs: Vec<Term> = (0..1u32 << n)
        .map(|mask| {
            let ys = (0..n)
                .filter(|&j| mask >> j & 1 == 1)
                .fold(XWeight::one(v.nvars()), |w, j| w.mul(&v.y(j)));
            v.g_poly(mask).times_monomial(&ys)
        })
        .collect();
    let out = pit_equal_sums(v.nvars(), &lhs, &rhs, mode)?;
    Ok(verdict("fg1", format!("m={m} n={n}"), mode, out, false))
}

/// The D-type analogue with the sign `eps = ±1`.
pub fn check_fg2(m: usize, n: usize, eps: i8, mode: Mode) -> Result<CharVerdict> {
    if n < 3 || m + 1 > n {
        return Err(CharError::Size(format!(
            "needs n ≥ 3 and m ≤ n - 1, got m={m} n={n}"
        )));
    }
    if eps != 1 && eps != -1 {
        return Err(CharError::Unsupported(format!(
            "sign must be ±1, got {eps}"
        )));
    }
    let v = XY { m, n };
    let mut lhs = Vec::new();
    if eps == 1 && m + 1 == n {
        let mut t = v
            .f_poly()
            .times(LaurentPoly::constant(v.nvars(), BigInt::from(2)));
        for i in 0..m {
            t = t.times(one_minus(&v.x(i).pow(2)));
        }
        lhs.push(t);
    }
    let rhs: Vec<Term> = (0..1u32 << n)
        .map(|mask| {
            let t = v.g_poly(mask);
            if eps < 0 && mask.count_ones() % 2 == 1 {
                t.neg()
            } else {
                t
            }
        })
        .collect();
    let out = pit_equal_sums(v.nvars(), &lhs, &rhs, mode)?;
    Ok(verdict(
        "fg2",
        format!("m={m} n={n} eps={eps}"),
        mode,
        out,
        false,
    ))
}

fn det_poly(rows: &[Vec<LaurentPoly>], nvars: usize) -> LaurentPoly {
    fn rec(rows: &[Vec<LaurentPoly>], r: usize, used: u32, nvars: usize) -> LaurentPoly {
        if r == rows.len() {
            return LaurentPoly::one(nvars);
        }
        let mut acc = LaurentPoly::zero(nvars);
        let mut sign = false;
        for c in 0..rows.len() {
            if used >> c & 1 == 1 {
                continue;
            }
            if !rows[r][c].is_zero() {
                let term = rows[r][c].mul(&rec(rows, r + 1, used | 1 << c, nvars));
                acc = if sign { acc.sub(&term) } else { acc.add(&term) };
            }
            sign = !sign;
        }
        acc
    }
    rec(rows, 0, 0, nvars)
}

fn det_modp(mut a: Vec<Vec<u64>>) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if p != c {
            a.swap(p, c);
            det = subm(0, det);
        }
        det = mulm(det, a[c][c]);
        let inv = invm(a[c][c]);
        for r in c + 1..n {
            let k = mulm(a[r][c], inv);
            if k == 0 {
                continue;
            }
            for j in c..n {
                let v = mulm(k, a[c][j]);
                a[r][j] = subm(a[r][j], v);
            }
        }
    }
    det
}

/// The Weyl denominator identity of type C, or of type D with sign `eps`,
/// in rank `n`.
pub fn weyl_denominator(ty: AlgebraType, n: usize, eps: i8, mode: Mode) -> Result<CharVerdict> {
    if n < 2 {
        return Err(CharError::Size(format!("needs n ≥ 2, got {n}")));
    }
    let y = |i: usize, e: i64| XWeight::var(n, i, e, 1);
    let (rows, mut rhs, label) = match ty {
        AlgebraType::C => {
            let rows: Vec<Vec<LaurentPoly>> = (0..n)
                .map(|i| {
                    (1..=n as i64)
                        .map(|j| {
                            binom(
                                &y(i, -(n as i64) + j - 1),
                                &y(i, n as i64 - j + 1).negated(),
                            )
                        })
                        .collect()
                })
                .collect();
            let mut t = Term::one(n);
            for i in 0..n {
                t = t.times(one_minus(&y(i, 2)));
            }
            (rows, t, format!("C{n}"))
        }
        AlgebraType::D => {
            if eps != 1 && eps != -1 {
                return Err(CharError::Unsupported(format!(
                    "sign must be ±1, got {eps}"
                )));
            }
            let rows: Vec<Vec<LaurentPoly>> = (0..n)
                .map(|i| {
                    (1..=n as i64)
                        .map(|j| {
                            let b = y(i, n as i64 - j);
                            binom(
                                &y(i, -(n as i64) + j),
                                &if eps < 0 { b.negated() } else { b },
                            )
                        })
                        .collect()
                })
                .collect();
            let t = Term::one(n).times(LaurentPoly::constant(n, BigInt::from(1 + eps as i64)));
            (rows, t, format!("D{n} eps={eps}"))
        }
        _ => {
            return Err(CharError::Unsupported(format!(
                "Weyl denominator check covers types C and D, got {ty:?}"
            )))
        }
    };
    for i in 0..n {
        for k in i + 1..n {
            rhs = rhs
                .times(one_minus(&y(i, 1).mul(&y(k, 1))))
                .times(binom(&y(k, 1), &y(i, 1).negated()));
        }
    }
    let lift = if ty == AlgebraType::D {
        n as i64 - 1
    } else {
        n as i64
    };
    let scale = (0..n).fold(XWeight::one(n), |w, i| w.mul(&y(i, lift)));
    let zero_rhs = rhs.num.iter().any(|p| p.is_zero());
    let out = match mode {
        Mode::Exact => {
            let lhs = det_poly(&rows, n).scale_monomial(&scale);
            let rhs = if zero_rhs {
                LaurentPoly::zero(n)
            } else {
                rhs.to_rational().numerator().clone()
            };
            let diff = lhs.sub(&rhs);
            PitOutcome {
                equal: diff.is_zero(),
                witness: witness_of(&diff),
            }
        }
        Mode::Modp { trials, seed } => modp_compare(n, 1, trials, seed, |pt| {
            let m: Vec<Vec<u64>> = rows
                .iter()
                .map(|r| r.iter().map(|p| p.eval_modp(pt)).collect())
                .collect();
            let l = mulm(det_modp(m), pt.monomial(&scale));
            let r = if zero_rhs { 0 } else { rhs.eval_modp(pt)? };
            Some((l, r))
        })?,
    };
    Ok(verdict("weyl-denominator", label, mode, out, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::increasing_tuples;
    use crate::root_data::parse_tuple;
    use proptest::prelude::*;

    const MODP3: Mode = Mode::Modp {
        trials: 3,
        seed: 11,
    };

    fn x(n: usize, i: usize, e: i64) -> XWeight {
        XWeight::var(n, i, e, 1)
    }

    #[test]
    fn pit_basics() {
        let one = RationalFn::one(1);
        let xx = RationalFn::monomial(&x(1, 0, 1));
        for mode in [Mode::Exact, MODP3] {
            assert!(pit_equal(&xx.div(&xx), &one, mode).unwrap().equal);
            let lhs =
                RationalFn::from_poly(one_minus(&x(1, 0, 2))).div_poly(&one_minus(&x(1, 0, 1)));
            let rhs = RationalFn::from_poly(one_plus(&x(1, 0, 1)));
            assert!(pit_equal(&lhs, &rhs, mode).unwrap().equal);
            let out = pit_equal(&lhs, &rhs.add(&one), mode).unwrap();
            assert!(!out.equal);
            assert!(out.witness.is_some());
        }
    }

    #[test]
    fn qbar_singletons() {
        let a2 = AlgebraContext::a(2);
        let got = qbar_closed(&a2, &parse_tuple("1").unwrap()).unwrap();
        let idx = a2.indices();
        let want = f_factor(&a2, idx[0], idx[1])
            .mul(&f_factor(&a2, idx[0], idx[2]))
            .to_rational();
        assert!(got.eq_exact(&want));

        let b2 = AlgebraContext::b(2);
        let one = parse_tuple("1").unwrap()[0];
        let got = qbar_closed(&b2, &[one]).unwrap();
        let want = b2
            .indices()
            .into_iter()
            .filter(|&k| k != one)
            .fold(Term::one(2), |t, k| t.mul(&f_factor(&b2, one, k)))
            .to_rational();
        assert!(got.eq_exact(&want));
    }

    #[test]
    fn qbar_of_full_set_is_a_monomial() {
        let a2 = AlgebraContext::a(2);
        let r = qbar_closed(&a2, &a2.indices()).unwrap();
        let idx = a2.indices();
        let mut w = a2.x_one();
        for a in 0..3 {
            for _ in a + 1..3 {
                w = w.mul(&a2.x_of(idx[a]).negated());
            }
        }
        assert!(r.eq_exact(&RationalFn::monomial(&w)));
    }

    #[test]
    fn qbar_rejects_duplicates() {
        let a2 = AlgebraContext::a(2);
        let j = parse_tuple("1,1").unwrap();
        assert!(matches!(
            qbar_closed(&a2, &j),
            Err(CharError::Duplicates(_))
        ));
    }

    #[test]
    fn bridge_small_cases() {
        let bank = SeriesBank::new();
        for (ctx, j) in [
            (AlgebraContext::a(2), "3"),
            (AlgebraContext::a(2), "1,2"),
            (AlgebraContext::b(2), "1b"),
            (AlgebraContext::b(2), "1"),
            (AlgebraContext::c(2), "1"),
            (AlgebraContext::c(2), "0"),
        ] {
            let v = series_vs_char(&bank, &ctx, &parse_tuple(j).unwrap(), 4).unwrap();
            assert!(v.equal, "{v:?}");
        }
    }

    #[test]
    fn expansion_rejects_positive_direction() {
        let a1 = AlgebraContext::a(1);
        // 1/(1 - x_1/x_2) expands in a positive root
        let idx = a1.indices();
        let t = f_factor(&a1, idx[1], idx[0]);
        assert!(matches!(
            expand_term(&a1, &t, 2),
            Err(CharError::NotRootNegative(_))
        ));
    }

    #[test]
    fn spin_characters() {
        let r = expected_spin_char(AlgebraType::C, &SpinSign(vec![1])).unwrap();
        assert!(r.eq_exact(&RationalFn::recip(&one_minus(&x(1, 0, -2)))));
        let r = expected_spin_char(AlgebraType::D, &SpinSign(vec![1, -1])).unwrap();
        assert!(r.eq_exact(&RationalFn::recip(&one_minus(
            &x(2, 0, -1).mul(&x(2, 1, 1))
        ))));
        let r = expected_spin_char(AlgebraType::C, &SpinSign(vec![-1, -1])).unwrap();
        let want = RationalFn::recip(&one_minus(&x(2, 0, 2)))
            .div_poly(&one_minus(&x(2, 1, 2)))
            .div_poly(&one_minus(&x(2, 0, 1).mul(&x(2, 1, 1))));
        assert!(r.eq_exact(&want));
    }

    #[test]
    fn char_b_rank_two_all_pairs() {
        let b2 = AlgebraContext::b(2);
        let tuples = increasing_tuples(&b2, 2);
        assert_eq!(tuples.len(), 6);
        for j1 in &tuples {
            for j2 in &tuples {
                let v = check_char_b(&b2, j1, j2, Mode::Exact).unwrap();
                assert!(v.equal, "{v:?}");
            }
        }
    }

    #[test]
    fn char_b_equal_tuples_have_empty_sum() {
        let b2 = AlgebraContext::b(2);
        let j = parse_tuple("1,2").unwrap();
        let (_, rhs) = char_b_sides(&b2, &j, &j).unwrap();
        assert!(rhs.is_empty());
    }

    #[test]
    fn helpers_rank_two() {
        let b2 = AlgebraContext::b(2);
        for v in appendix_c_helpers(&b2, Mode::Exact).unwrap() {
            assert!(v.equal, "{v:?}");
        }
    }

    #[test]
    fn partition_sums_small_rank() {
        for variant in ChVariant::ALL {
            for n in 2..=3 {
                for (s, e, p) in ch_instances(variant, n) {
                    let v = check_ch(variant, n, &s, &e, p, Mode::Exact).unwrap();
                    assert!(v.equal, "{v:?}");
                    assert!(v.conditional);
                }
            }
        }
    }

    #[test]
    fn trivial_partition_sum() {
        let (l, r) = ch_sides(ChVariant::C3, 3, &[], &[], None).unwrap();
        assert_eq!(r.len(), 1);
        assert!(l[0].to_rational().eq_exact(&RationalFn::one(3)));
        assert!(r[0].to_rational().eq_exact(&RationalFn::one(3)));
    }

    #[test]
    fn d_sum_both_parities() {
        for p in 0..2 {
            let v = check_ch(ChVariant::D2, 3, &[1], &[2, 3], Some(p), Mode::Exact).unwrap();
            assert!(v.equal, "{v:?}");
        }
    }

    #[test]
    fn size_and_parity_errors() {
        assert!(matches!(
            ch_sides(ChVariant::C1, 3, &[1], &[2], None),
            Err(CharError::Size(_))
        ));
        assert!(matches!(
            ch_sides(ChVariant::D2, 3, &[1], &[2, 3], None),
            Err(CharError::Parity(_))
        ));
        assert!(matches!(
            check_fg1(1, 2, Mode::Exact),
            Err(CharError::Parity(_))
        ));
    }

    #[test]
    fn perturbed_sum_is_caught() {
        let (l, mut r) = ch_sides(ChVariant::C3, 4, &[1, 2], &[3, 4], None).unwrap();
        r[1] = r[1].clone().neg();
        assert!(!pit_equal_sums(4, &l, &r, MODP3).unwrap().equal);
        assert!(!pit_equal_sums(4, &l, &r, Mode::Exact).unwrap().equal);
    }

    #[test]
    fn chains_small_rank() {
        for chain in Chain::ALL {
            let (from, _) = chain.endpoints();
            for (s, e, p) in ch_instances(from, 4) {
                if s.is_empty() {
                    continue;
                }
                let v = check_chain(chain, 4, &s, &e, p, Mode::Exact).unwrap();
                assert!(v.equal, "{v:?}");
            }
        }
    }

    #[test]
    fn polynomial_forms_small() {
        assert!(check_fg1(0, 2, Mode::Exact).unwrap().equal);
        assert!(check_fg1(2, 2, Mode::Exact).unwrap().equal);
        assert!(check_fg1(1, 3, Mode::Exact).unwrap().equal);
        for m in 0..3 {
            for eps in [1, -1] {
                let v = check_fg2(m, 3, eps, Mode::Exact).unwrap();
                assert!(v.equal, "{v:?}");
            }
        }
    }

    #[test]
    fn weyl_denominators() {
        assert!(
            weyl_denominator(AlgebraType::C, 2, 1, Mode::Exact)
                .unwrap()
                .equal
        );
        assert!(
            weyl_denominator(AlgebraType::D, 3, -1, Mode::Exact)
                .unwrap()
                .equal
        );
        assert!(
            weyl_denominator(AlgebraType::D, 3, 1, Mode::Exact)
                .unwrap()
                .equal
        );
        assert!(weyl_denominator(AlgebraType::C, 4, 1, MODP3).unwrap().equal);
    }

    #[test]
    fn modes_agree_on_small_instances() {
        for (s, e, p) in ch_instances(ChVariant::C4, 3) {
            let a = check_ch(ChVariant::C4, 3, &s, &e, p, Mode::Exact).unwrap();
            let b = check_ch(ChVariant::C4, 3, &s, &e, p, MODP3).unwrap();
            assert_eq!(a.equal, b.equal);
        }
        let b2 = AlgebraContext::b(2);
        let t = increasing_tuples(&b2, 2);
        let a = check_char_b(&b2, &t[0], &t[5], Mode::Exact).unwrap();
        let b = check_char_b(&b2, &t[0], &t[5], MODP3).unwrap();
        assert_eq!(a.equal, b.equal);
    }

    proptest! {
        #[test]
        fn f_block_reflection(mask in 0u32..256) {
            let b3 = AlgebraContext::b(3);
            let idx = b3.indices();
            let j: Vec<BoxIndex> = idx.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &b)| b).collect();
            let star = b3.complement(&j);
            let lhs = f_block(&b3, &b3.bar_tuple(&star), &b3.bar_tuple(&j));
            let rhs = f_block(&b3, &j, &star);
            prop_assert!(pit_equal_sums(3, &[lhs], &[rhs], MODP3).unwrap().equal);
        }
    }
}
