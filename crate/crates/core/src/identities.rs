//! Residual checkers for the bilinear relations among the `Q` and `R`
//! series. Each checker returns `LHS - RHS`; a relation holds up to the
//! truncation when the residual has no terms.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use thiserror::Error;

use crate::builders::{
    build_q1_hat, w1_doubled, w2_doubled, BuildError, SeriesBank, SpinProvider, SpinSign,
    SwapProvider,
};
use crate::determinant::{casorati, wronskian_det};
use crate::root_data::{format_tuple, remove_entry, AlgebraContext, AlgebraType, BoxIndex};
use crate::series::{sum_all, GradedSeries};
use crate::weight::XWeight;

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("tuples of different sizes {0} and {1}")]
    SizeMismatch(usize, usize),
    #[error("tuple {0} is not increasing")]
    NotIncreasing(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("no R-series provider for {0}")]
    NoProvider(AlgebraContext),
}

type Result<T> = std::result::Result<T, IdentityError>;

/// Caches one-box series and Casorati determinants, and supplies spin series.
pub struct Engine {
    bank: SeriesBank,
    dets: RwLock<HashMap<(AlgebraContext, Vec<BoxIndex>, u32), Arc<GradedSeries>>>,
    spin: Arc<dyn SpinProvider>,
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Self::with_provider(Arc::new(SwapProvider::new()))
    }

    pub fn with_provider(spin: Arc<dyn SpinProvider>) -> Self {
        Engine {
            bank: SeriesBank::new(),
            dets: RwLock::new(HashMap::new()),
            spin,
        }
    }

    pub fn bank(&self) -> &SeriesBank {
        &self.bank
    }

    /// `Q^{(a)}_{J, q^{shift/2} z}`.
    pub fn q(
        &self,
        ctx: &AlgebraContext,
        j: &[BoxIndex],
        trunc: u32,
        shift: i32,
    ) -> Result<GradedSeries> {
        let key = (*ctx, j.to_vec(), trunc);
        if let Some(s) = self.dets.read().unwrap().get(&key) {
            return Ok(s.shift(shift));
        }
        let s = Arc::new(casorati(ctx, j, trunc, 0, &self.bank)?);
        self.dets.write().unwrap().insert(key, s.clone());
        Ok(s.shift(shift))
    }

    /// `R^{(node)}_{ε, q^{shift/2} z}`.
    pub fn r(
        &self,
        ctx: &AlgebraContext,
        node: usize,
        eps: &SpinSign,
        trunc: u32,
        shift: i32,
    ) -> Result<GradedSeries> {
        self.spin
            .spin_series(ctx, node, eps, trunc)
            .map(|s| s.shift(shift))
            .ok_or(IdentityError::NoProvider(*ctx))
    }
}

/// Builds at increasing depth until the result is exact to height `d`
/// relative to its own top, then cuts it there.
pub fn certify(d: u32, build: impl Fn(u32) -> Result<GradedSeries>) -> Result<GradedSeries> {
    let want = Ratio::from_integer(d as i64);
    let mut depth = d;
    for _ in 0..6 {
        let s = build(depth)?;
        let have = s.truncation();
        if have >= want {
            return Ok(s.truncated(want));
        }
        depth += (want - have).ceil().to_integer() as u32;
    }
    build(depth)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Witness {
    pub monomial: String,
    pub coefficient: String,
    pub height: String,
}

/// Outcome of one identity instance.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Verdict {
    pub identity: String,
    pub algebra: String,
    pub parameters: String,
    pub degree: u32,
    /// Height up to which the residual is exact.
    pub certified: String,
    pub holds: bool,
    /// Vanishing of the residual at each height `0..=degree`.
    pub heights: Vec<bool>,
    pub witness: Option<Witness>,
    /// Rests on the spin series supplied by a provider.
    pub conditional: bool,
}

fn ratio_string(r: Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn verdict(
    identity: &str,
    ctx: &AlgebraContext,
    parameters: String,
    degree: u32,
    residual: &GradedSeries,
    conditional: bool,
) -> Verdict {
    let certified = residual.truncation();
    let nonzero = residual.height_profile();
    let heights = (0..=degree as i64)
        .map(|h| {
            !nonzero
                .keys()
                .any(|k| *k >= Ratio::from_integer(h) && *k < Ratio::from_integer(h + 1))
        })
        .collect();
    let witness = residual.sorted_terms().first().map(|(m, c)| Witness {
        monomial: m.to_string(),
        coefficient: c.to_string(),
        height: ratio_string(residual.height(m)),
    });
    Verdict {
        identity: identity.to_string(),
        algebra: ctx.to_string(),
        parameters,
        degree,
        certified: ratio_string(certified),
        holds: residual.is_zero() && certified >= Ratio::from_integer(degree as i64),
        heights,
        witness,
        conditional,
    }
}

fn require_increasing(ctx: &AlgebraContext, j: &[BoxIndex]) -> Result<()> {
    if ctx.is_increasing(j) {
        Ok(())
    } else {
        Err(IdentityError::NotIncreasing(format_tuple(j)))
    }
}

/// All increasing `a`-tuples of the index set, in canonical order.
pub fn increasing_tuples(ctx: &AlgebraContext, a: usize) -> Vec<Vec<BoxIndex>> {
    fn rec(
        ctx: &AlgebraContext,
        idx: &[BoxIndex],
        start: usize,
        a: usize,
        cur: &mut Vec<BoxIndex>,
        out: &mut Vec<Vec<BoxIndex>>,
    ) {
        if cur.len() == a {
            if ctx.is_increasing(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for p in start..idx.len() {
            cur.push(idx[p]);
            rec(ctx, idx, p + 1, a, cur, out);
            cur.pop();
        }
    }
    let idx = ctx.indices();
    let mut out = Vec::new();
    rec(ctx, &idx, 0, a, &mut Vec::new(), &mut out);
    out
}

/// A deterministic sample of `k` items (all of them if fewer).
pub fn sample<T: Clone>(items: &[T], k: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut rng);
    idx.truncate(k);
    idx.sort_unstable();
    idx.into_iter().map(|i| items[i].clone()).collect()
}

fn signed(w: XWeight, negative: bool) -> XWeight {
    if negative {
        w.negated()
    } else {
        w
    }
}

/// Residual of the Plücker relation. With `mutate` the sign of the first
/// right-hand term that is not identically zero is flipped, which must
/// break the relation.
pub fn plucker(
    engine: &Engine,
    ctx: &AlgebraContext,
    j1: &[BoxIndex],
    j2: &[BoxIndex],
    d: u32,
    mutate: bool,
) -> Result<GradedSeries> {
    if j1.len() != j2.len() {
        return Err(IdentityError::SizeMismatch(j1.len(), j2.len()));
    }
    require_increasing(ctx, j1)?;
    require_increasing(ctx, j2)?;
    let q1 = ctx.q1_shift();
    certify(d, |t| {
        let lhs = engine
            .q(ctx, j1, t, -q1)?
            .mul(&engine.q(ctx, j2, t, q1)?)
            .sub(
                &engine
                    .q(ctx, j1, t, q1)?
                    .mul(&engine.q(ctx, j2, t, -q1)?)
                    .scale_x(&ctx.x_of_tuple(j1).div(&ctx.x_of_tuple(j2))),
            );
        let mut parts = Vec::new();
        let mut flip_pending = mutate;
        for (k, &jk) in j2.iter().enumerate() {
            let minus = remove_entry(j2, jk);
            let mut plus = vec![jk];
            plus.extend_from_slice(j1);
            let odd = (k + 1) % 2 == 1;
            let product = engine
                .q(ctx, &minus, t, 0)?
                .mul(&engine.q(ctx, &plus, t, 0)?);
            let flip = flip_pending && !product.is_zero();
            flip_pending &= !flip;
            let term = product.scale_x(&signed(ctx.x_of(jk).inv(), odd != flip));
            parts.push(term);
        }
        let rhs = sum_all(&parts).expect("nonempty tuple");
        Ok(lhs.sub(&rhs))
    })
}

/// Residual of the type-A Wronskian identity `det(...) = 1`.
pub fn wronskian(engine: &Engine, n: usize, d: u32) -> Result<GradedSeries> {
    let ctx = AlgebraContext::a(n);
    certify(d, |t| {
        Ok(wronskian_det(&ctx, t, engine.bank())?.sub(&GradedSeries::one(ctx, t)))
    })
}

fn half_pow(ctx: &AlgebraContext, j: BoxIndex, num: i64) -> XWeight {
    ctx.x_of(j).pow_ratio(Ratio::new(num, 2))
}

/// `X_J = Π_{μ≺ν ∈ J} (-x_μ^{δ_{μ,ν̄}/2 - 1})`.
pub fn x_big(ctx: &AlgebraContext, j: &[BoxIndex]) -> XWeight {
    let mut w = ctx.x_one();
    for &mu in j {
        for &nu in j {
            if ctx.precedes(mu, nu) {
                let e = if mu == nu.bar() { -1 } else { -2 };
                w = w.mul(&half_pow(ctx, mu, e).negated());
            }
        }
    }
    w
}

/// `x_{i,J} = Π_{j∈J, i≺j} (-x_i^{1-δ_{j,ī}/2}) Π_{j∈J*, j≺i} x_j^{δ_{i,j̄}/2-1}`.
pub fn x_small(ctx: &AlgebraContext, i: BoxIndex, j: &[BoxIndex]) -> XWeight {
    let mut w = ctx.x_one();
    for &k in j {
        if ctx.precedes(i, k) {
            let e = if k == i.bar() { 1 } else { 2 };
            w = w.mul(&half_pow(ctx, i, e).negated());
        }
    }
    for k in ctx.complement(j) {
        if ctx.precedes(k, i) {
            let e = if i == k.bar() { -1 } else { -2 };
            w = w.mul(&half_pow(ctx, k, e));
        }
    }
    w
}

/// `J̄*` in increasing order.
pub fn bar_star(ctx: &AlgebraContext, j: &[BoxIndex]) -> Vec<BoxIndex> {
    ctx.bar_tuple(&ctx.complement(j))
}

/// Residual of the last-node relation of type B for `J1, J2 ∈ 𝒥^n`.
pub fn conj_b(
    engine: &Engine,
    ctx: &AlgebraContext,
    j1: &[BoxIndex],
    j2: &[BoxIndex],
    d: u32,
) -> Result<GradedSeries> {
    if ctx.ty != AlgebraType::B {
        return Err(IdentityError::Unsupported(format!(
            "the last-node relation of type B needs type B, got {ctx}"
        )));
    }
    let n = ctx.rank;
    if j1.len() != n || j2.len() != n {
        return Err(IdentityError::SizeMismatch(j1.len(), j2.len()));
    }
    require_increasing(ctx, j1)?;
    require_increasing(ctx, j2)?;
    let half_inv = |j: &[BoxIndex]| ctx.x_of_tuple(j).pow_ratio(Ratio::new(-1, 2));
    let b1 = bar_star(ctx, j1);
    let b2 = bar_star(ctx, j2);
    let star1 = ctx.complement(j1);
    certify(d, |t| {
        let first = engine
            .q(ctx, &b1, t, 0)?
            .mul(&engine.q(ctx, j2, t, 2)?)
            .scale_x(&x_big(ctx, &b1).mul(&x_big(ctx, j2)).mul(&half_inv(j1)));
        let second = engine
            .q(ctx, &b2, t, 0)?
            .mul(&engine.q(ctx, j1, t, 2)?)
            .scale_x(&x_big(ctx, &b2).mul(&x_big(ctx, j1)).mul(&half_inv(j2)));
        let mut acc = first.sub(&second);
        for &jk in j2.iter().filter(|jk| star1.contains(jk)) {
            let left = remove_entry(j2, jk);
            let right = remove_entry(&b1, jk.bar());
            let coeff = x_big(ctx, &left)
                .mul(&x_big(ctx, &right))
                .mul(&x_small(ctx, jk, j1))
                .div(&x_small(ctx, jk, j2))
                .mul(&half_inv(j1))
                .mul(&half_inv(&[jk]));
            let term = engine
                .q(ctx, &left, t, 0)?
                .mul(&engine.q(ctx, &right, t, 2)?)
                .scale_x(&coeff);
            acc = acc.add(&term);
        }
        Ok(acc)
    })
}

/// The block decomposition of an increasing tuple of type C or D.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Blocks {
    /// `k` with only `k` in `J`.
    pub alpha: Vec<usize>,
    /// `k` with only `k̄` in `J`.
    pub beta: Vec<usize>,
    /// `k` with both `k` and `k̄` in `J`.
    pub sigma: Vec<usize>,
    /// `k` with neither in `J`.
    pub eta: Vec<usize>,
    pub has_zero: bool,
}

pub fn blocks(ctx: &AlgebraContext, j: &[BoxIndex]) -> Blocks {
    let mut b = Blocks {
        has_zero: j.contains(&BoxIndex::Zero),
        ..Blocks::default()
    };
    for k in 1..=ctx.rank {
        let p = j.contains(&BoxIndex::Plain(k as u8));
        let m = j.contains(&BoxIndex::Barred(k as u8));
        match (p, m) {
            (true, false) => b.alpha.push(k),
            (false, true) => b.beta.push(k),
            (true, true) => b.sigma.push(k),
            (false, false) => b.eta.push(k),
        }
    }
    b
}

/// Which sign sets and parity constraint a condition uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `ε, ε' ∈ E_n`.
    C,
    /// `ε, ε' ∈ E_{n,ς}` and `t ≡ r + ς`.
    DVarsigma(u8),
    /// `ε ∈ E_{n,1}`, `ε' ∈ E_{n,0}` and `t ≡ r + 1`.
    DMixed,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConditionPair {
    pub eps: String,
    pub eps_prime: String,
    pub gamma: Vec<usize>,
    pub delta: Vec<usize>,
    #[serde(skip)]
    pub signs: (SpinSign, SpinSign),
}

fn pair(e: SpinSign, f: SpinSign) -> ConditionPair {
    let gamma = (0..e.len())
        .filter(|&i| e.0[i] > 0 && f.0[i] < 0)
        .map(|i| i + 1)
        .collect();
    let delta = (0..e.len())
        .filter(|&i| e.0[i] < 0 && f.0[i] > 0)
        .map(|i| i + 1)
        .collect();
    ConditionPair {
        eps: e.to_string(),
        eps_prime: f.to_string(),
        gamma,
        delta,
        signs: (e, f),
    }
}

fn sign_sets(n: usize, cond: Condition) -> (Vec<SpinSign>, Vec<SpinSign>) {
    match cond {
        Condition::C => (SpinSign::all(n), SpinSign::all(n)),
        Condition::DVarsigma(p) => (SpinSign::with_parity(n, p), SpinSign::with_parity(n, p)),
        Condition::DMixed => (SpinSign::with_parity(n, 1), SpinSign::with_parity(n, 0)),
    }
}

fn admissible(b: &Blocks, p: &ConditionPair, cond: Condition) -> bool {
    let r = b.beta.len();
    b.sigma.iter().all(|s| p.gamma.contains(s))
        && match cond {
            Condition::C => true,
            Condition::DVarsigma(v) => (p.delta.len() + r + v as usize) % 2 == 0,
            // membership of ε in E_{n,1} forces t ≡ r + 1
            Condition::DMixed => (p.delta.len() + r) % 2 == 1,
        }
}

/// The pairs `(ε, ε')` satisfying the condition for `J`, built block by
/// block: fixed signs on `α` and `β`, `σ` in `γ`, and each `η` in `γ` or `δ`.
pub fn enumerate_condition(
    ctx: &AlgebraContext,
    j: &[BoxIndex],
    cond: Condition,
) -> Result<Vec<ConditionPair>> {
    require_increasing(ctx, j)?;
    let n = ctx.rank;
    let b = blocks(ctx, j);
    let (left, right) = sign_sets(n, cond);
    let mut out = Vec::new();
    for mask in 0..1u32 << b.eta.len() {
        let mut e = vec![0i8; n];
        let mut f = vec![0i8; n];
        for &k in &b.alpha {
            e[k - 1] = 1;
            f[k - 1] = 1;
        }
        for &k in &b.beta {
            e[k - 1] = -1;
            f[k - 1] = -1;
        }
        for &k in &b.sigma {
            e[k - 1] = 1;
            f[k - 1] = -1;
        }
        for (p, &k) in b.eta.iter().enumerate() {
            let up = mask >> p & 1 == 1;
            e[k - 1] = if up { 1 } else { -1 };
            f[k - 1] = -e[k - 1];
        }
        let (e, f) = (SpinSign(e), SpinSign(f));
        if !left.contains(&e) || !right.contains(&f) {
            continue;
        }
        let p = pair(e, f);
        if admissible(&b, &p, cond) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// The same set by filtering the full product of sign sets.
pub fn enumerate_condition_brute(
    ctx: &AlgebraContext,
    j: &[BoxIndex],
    cond: Condition,
) -> Vec<ConditionPair> {
    let n = ctx.rank;
    let b = blocks(ctx, j);
    let w2 = w2_doubled(n, j);
    let (left, right) = sign_sets(n, cond);
    let mut out = Vec::new();
    for e in &left {
        for f in &right {
            let sum: Vec<i64> = w1_doubled(e)
                .iter()
                .zip(w1_doubled(f))
                .map(|(a, b)| a + b)
                .collect();
            if sum != w2 {
                continue;
            }
            let p = pair(e.clone(), f.clone());
            if admissible(&b, &p, cond) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn x_set(ctx: &AlgebraContext, set: &[usize], e: i64) -> XWeight {
    set.iter()
        .fold(ctx.x_one(), |acc, &k| acc.mul(&ctx.x_var(k, e, 1)))
}

/// `Π_{a∈A, b∈B, a>b} (-x_a/x_b)`.
fn cross(ctx: &AlgebraContext, a: &[usize], b: &[usize]) -> XWeight {
    let mut w = ctx.x_one();
    for &i in a {
        for &k in b {
            if i > k {
                w = w.mul(&ctx.x_var(i, 1, 1).div(&ctx.x_var(k, 1, 1)).negated());
            }
        }
    }
    w
}

/// `Π_{i≺j ∈ J} (-x_i^{-1})`, skipping `j = ī` in type D.
fn pair_product(ctx: &AlgebraContext, j: &[BoxIndex]) -> XWeight {
    let mut w = ctx.x_one();
    for &i in j {
        for &k in j {
            if ctx.precedes(i, k) && !(ctx.ty == AlgebraType::D && k == i.bar()) {
                w = w.mul(&ctx.x_of(i).inv().negated());
            }
        }
    }
    w
}

fn sign_pow(k: usize) -> bool {
    (k * k.saturating_sub(1) / 2) % 2 == 1
}

fn sign_pow_plus(k: usize) -> bool {
    (k * (k + 1) / 2) % 2 == 1
}

/// Shape of one spin-node relation.
struct SpinShape {
    size: usize,
    cond: Condition,
    lhs_sigma: i64,
    lhs_eta: i64,
    /// Sign exponent choice on the right: `(use_t, plus)` for
    /// `(-1)^{k(k±1)/2}` with `k = t` or `s`.
    rhs_sign: (bool, bool),
    rhs_gamma: i64,
    /// `x_δ` exponent is `delta_base - t`.
    delta_base: i64,
    shifts: (i32, i32),
    nodes: (usize, usize),
}

fn spin_shape(ctx: &AlgebraContext, variant: u8, u: i64, varsigma: u8) -> Result<SpinShape> {
    let n = ctx.rank;
    let bad = || IdentityError::Unsupported(format!("no spin relation {variant} for {ctx}"));
    Ok(match (ctx.ty, variant) {
        (AlgebraType::C, 1..=4) => {
            let small = variant <= 2;
            SpinShape {
                size: if small { n - 1 } else { n },
                cond: Condition::C,
                lhs_sigma: -2 * u,
                lhs_eta: if small { 2 - u } else { 1 - u },
                rhs_sign: match variant {
                    1 => (true, true),
                    2 => (true, false),
                    _ => (false, false),
                },
                rhs_gamma: if small { 2 - 2 * u } else { 1 - 2 * u },
                delta_base: match variant {
                    1 => 1,
                    2 => 2,
                    3 => 0,
                    _ => 1,
                },
                shifts: if small { (2, -2) } else { (1, -1) },
                nodes: (n, n),
            }
        }
        (AlgebraType::D, 1) => SpinShape {
            size: n - 2,
            cond: Condition::DVarsigma(varsigma),
            lhs_sigma: -1 - 2 * u,
            lhs_eta: 1 - u,
            rhs_sign: (false, true),
            rhs_gamma: -2 * u,
            delta_base: 3,
            // R_ε at q^{-1}z and R_ε' at qz
            shifts: (-2, 2),
            nodes: (n - varsigma as usize, n - varsigma as usize),
        },
        (AlgebraType::D, 2) => SpinShape {
            size: n - 1,
            cond: Condition::DMixed,
            lhs_sigma: -1 - 2 * u,
            lhs_eta: -u,
            rhs_sign: (true, false),
            rhs_gamma: -2 * u,
            delta_base: 1,
            shifts: (0, 0),
            nodes: (n - 1, n),
        },
        _ => return Err(bad()),
    })
}

/// The increasing tuples a spin-node relation is stated for.
pub fn spin_tuples(ctx: &AlgebraContext, variant: u8) -> Result<Vec<Vec<BoxIndex>>> {
    let shape = spin_shape(ctx, variant, 0, 0)?;
    let wants_zero = variant == 2 || variant == 4;
    Ok(increasing_tuples(ctx, shape.size)
        .into_iter()
        .filter(|j| ctx.ty != AlgebraType::C || blocks(ctx, j).has_zero == wants_zero)
        .collect())
}

/// Residual of a spin-node relation: variants 1 to 4 of type C (the
/// variant fixes `|J|` and whether `0 ∈ J`) and variants 1, 2 of type D
/// (`varsigma` selects the spin node for variant 1).
pub fn conj_spin(
    engine: &Engine,
    ctx: &AlgebraContext,
    variant: u8,
    j: &[BoxIndex],
    varsigma: u8,
    d: u32,
) -> Result<GradedSeries> {
    require_increasing(ctx, j)?;
    let b = blocks(ctx, j);
    let u = b.sigma.len() as i64;
    let shape = spin_shape(ctx, variant, u, varsigma)?;
    if j.len() != shape.size {
        return Err(IdentityError::SizeMismatch(j.len(), shape.size));
    }
    if ctx.ty == AlgebraType::C {
        let wants_zero = variant == 2 || variant == 4;
        if b.has_zero != wants_zero {
            return Err(IdentityError::Unsupported(format!(
                "relation {variant} of type C {} 0 in J",
                if wants_zero { "needs" } else { "excludes" }
            )));
        }
    }
    let pairs = enumerate_condition(ctx, j, shape.cond)?;
    let lhs_x = signed(
        x_set(ctx, &b.sigma, shape.lhs_sigma)
            .mul(&x_set(ctx, &b.eta, shape.lhs_eta))
            .mul(&pair_product(ctx, j))
            .mul(&cross(ctx, &b.sigma, &b.eta)),
        sign_pow(b.sigma.len()),
    );
    certify(d, |t| {
        let mut acc = engine.q(ctx, j, t, 0)?.scale_x(&lhs_x);
        for p in &pairs {
            let (s, tt) = (p.gamma.len(), p.delta.len());
            let k = if shape.rhs_sign.0 { tt } else { s };
            let neg = if shape.rhs_sign.1 {
                sign_pow_plus(k)
            } else {
                sign_pow(k)
            };
            let coeff = signed(
                x_set(ctx, &p.gamma, shape.rhs_gamma)
                    .mul(&x_set(ctx, &p.delta, shape.delta_base - tt as i64))
                    .mul(&cross(ctx, &p.gamma, &p.delta)),
                neg,
            );
            let term = engine
                .r(ctx, shape.nodes.0, &p.signs.0, t, shape.shifts.0)?
                .mul(&engine.r(ctx, shape.nodes.1, &p.signs.1, t, shape.shifts.1)?)
                .scale_x(&coeff);
            acc = acc.sub(&term);
        }
        Ok(acc)
    })
}

/// Residuals of the two rank-two relations separating the hatted parts of
/// `Q^{(1)}_0` in type C.
pub fn c2_remark(engine: &Engine, which: u8, d: u32) -> Result<GradedSeries> {
    let ctx = AlgebraContext::c(2);
    let one = BoxIndex::Plain(1);
    let x1 = ctx.x_var(1, 1, 1);
    let pp: SpinSign = "(++)".parse().expect("literal");
    let pm: SpinSign = "(+-)".parse().expect("literal");
    certify(d, |t| {
        let hat_even = build_q1_hat(&ctx, false, t)?;
        let hat_odd = build_q1_hat(&ctx, true, t)?;
        let (first_hat, second_hat) = match which {
            1 => (&hat_even, &hat_odd),
            2 => (&hat_odd, &hat_even),
            _ => {
                return Err(IdentityError::Unsupported(format!(
                    "no rank-two relation {which}"
                )))
            }
        };
        let lhs = engine.q(&ctx, &[one], t, -1)?.mul(&first_hat.shift(1)).sub(
            &second_hat
                .shift(-1)
                .mul(&engine.q(&ctx, &[one], t, 1)?)
                .scale_x(&x1),
        );
        let rhs = match which {
            1 => engine
                .r(&ctx, 2, &pp, t, -1)?
                .mul(&engine.r(&ctx, 2, &pm, t, 1)?)
                .scale_x(&x1.div(&ctx.x_var(2, 1, 1)).negated()),
            _ => engine
                .r(&ctx, 2, &pm, t, -1)?
                .mul(&engine.r(&ctx, 2, &pp, t, 1)?)
                .scale_x(&x1.negated()),
        };
        Ok(lhs.sub(&rhs))
    })
}
