//! Explicit series: prefactors `Φ`, the one-box series `Q^{(1)}_{i,z}` of all
//! four types, spin monomials `M_ε` and the spin series obtained from node
//! swaps in ranks `C2` and `D4`.

use num_bigint::BigInt;
use num_traits::One;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};
use thiserror::Error;

use crate::monomial::{a_inv, y_product, LMonomial};
use crate::root_data::{AlgebraContext, AlgebraType, BoxIndex};
use crate::series::GradedSeries;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("index {0} is not valid for {1}")]
    InvalidIndex(BoxIndex, AlgebraContext),
    #[error("{0} requires type {1}")]
    WrongType(&'static str, AlgebraType),
    #[error("no spin series provider for {0}")]
    NoProvider(AlgebraContext),
    #[error("sign vector {0} has length {1}, expected {2}")]
    BadLength(SpinSign, usize, usize),
    #[error("tuple is not increasing")]
    NotIncreasing,
}

/// `(c + Σ coefs_v k_v) / div`.
#[derive(Clone, Debug)]
struct LinForm {
    c: i64,
    coefs: Vec<i64>,
    div: i64,
}

impl LinForm {
    fn constant(nvars: usize, c: i64) -> Self {
        LinForm {
            c,
            coefs: vec![0; nvars],
            div: 1,
        }
    }

    /// Sum of the variables at positions `from..`, i.e. a running sum `K`.
    fn tail(nvars: usize, from: usize) -> Self {
        let mut f = Self::constant(nvars, 0);
        for v in from..nvars {
            f.coefs[v] = 1;
        }
        f
    }

    fn plus(mut self, c: i64) -> Self {
        self.c += c * self.div;
        self
    }

    fn numerator(&self, k: &[i64]) -> i64 {
        self.c + self.coefs.iter().zip(k).map(|(a, b)| a * b).sum::<i64>()
    }

    fn eval(&self, k: &[i64]) -> i64 {
        let n = self.numerator(k);
        debug_assert_eq!(n % self.div, 0);
        n / self.div
    }
}

/// `Π_{l=1}^{count} A^{-1}_{node, shift + slope·l}`.
#[derive(Clone, Debug)]
struct Family {
    node: usize,
    count: LinForm,
    shift: LinForm,
    slope: i32,
}

#[derive(Clone, Debug)]
struct SumSpec {
    prefix: LMonomial,
    mins: Vec<i64>,
    families: Vec<Family>,
    parity: Option<(LinForm, i64)>,
}

impl SumSpec {
    fn new(prefix: LMonomial, nvars: usize) -> Self {
        SumSpec {
            prefix,
            mins: vec![0; nvars],
            families: Vec::new(),
            parity: None,
        }
    }

    fn nvars(&self) -> usize {
        self.mins.len()
    }

    fn family(&mut self, node: usize, count: LinForm, shift: i32, slope: i32) {
        let n = self.nvars();
        self.families.push(Family {
            node,
            count,
            shift: LinForm::constant(n, shift as i64),
            slope,
        });
    }

    /// Twice the height for a given assignment, computed without rounding.
    fn height_x2(&self, k: &[i64]) -> i64 {
        self.families
            .iter()
            .map(|f| {
                assert!(f.count.div == 1 || f.count.div == 2);
                2 * f.count.numerator(k) / f.count.div
            })
            .sum()
    }

    /// Adds every term of height at most `trunc` into `out`.
    fn enumerate_into(&self, ctx: &AlgebraContext, trunc: u32, out: &mut GradedSeries) {
        let mut cache: HashMap<(usize, i32), LMonomial> = HashMap::new();
        let mut k = self.mins.clone();
        self.dfs(ctx, 0, &mut k, 2 * trunc as i64, &mut cache, out);
    }

    fn dfs(
        &self,
        ctx: &AlgebraContext,
        pos: usize,
        k: &mut Vec<i64>,
        limit_x2: i64,
        cache: &mut HashMap<(usize, i32), LMonomial>,
        out: &mut GradedSeries,
    ) {
        if pos == k.len() {
            if let Some((form, r)) = &self.parity {
                if form.numerator(k).rem_euclid(2) != *r {
                    return;
                }
            }
            let mut m = self.prefix.clone();
            for f in &self.families {
                let count = f.count.eval(k);
                let base = f.shift.eval(k) as i32;
                for l in 1..=count as i32 {
                    let key = (f.node, base + f.slope * l);
                    let a = cache.entry(key).or_insert_with(|| a_inv(ctx, key.0, key.1));
                    m = m.mul(a);
                }
            }
            out.add_term(m, BigInt::one());
            return;
        }
        let start = self.mins[pos];
        let mut v = start;
        loop {
            k[pos] = v;
            if self.height_x2(k) > limit_x2 + 1 {
                break;
            }
            self.dfs(ctx, pos + 1, k, limit_x2, cache, out);
            v += 1;
        }
        k[pos] = start;
    }
}

fn y(ctx: &AlgebraContext, f: &[(usize, i32, i32)]) -> LMonomial {
    y_product(ctx, f)
}

/// `Φ_{i,z}` at `z ↦ q^{s/2} z`.
pub fn phi(ctx: &AlgebraContext, i: BoxIndex, s: i32) -> Result<LMonomial, BuildError> {
    ctx.check(i)
        .map_err(|_| BuildError::InvalidIndex(i, *ctx))?;
    let n = ctx.rank as i32;
    let m = match (ctx.ty, i) {
        (AlgebraType::A, BoxIndex::Plain(k)) | (AlgebraType::B, BoxIndex::Plain(k)) => {
            let k = k as i32;
            y(
                ctx,
                &[(k as usize - 1, 2 * k, -1), (k as usize, 2 * (k - 1), 1)],
            )
        }
        (AlgebraType::B, BoxIndex::Barred(k)) => {
            let k = k as i32;
            y(
                ctx,
                &[
                    (k as usize - 1, 2 * (2 * n - k - 1), 1),
                    (k as usize, 2 * (2 * n - k), -1),
                ],
            )
        }
        (AlgebraType::C, BoxIndex::Plain(k)) if (k as i32) < n => {
            let k = k as i32;
            y(ctx, &[(k as usize - 1, k, -1), (k as usize, k - 1, 1)])
        }
        (AlgebraType::C, BoxIndex::Plain(_)) => {
            let nu = n as usize;
            y(ctx, &[(nu - 1, n, -1), (nu, n - 2, 1), (nu, n, 1)])
        }
        (AlgebraType::C, BoxIndex::Barred(k)) if (k as i32) < n => {
            let k = k as i32;
            y(
                ctx,
                &[
                    (k as usize - 1, 2 * n + 2 - k, 1),
                    (k as usize, 2 * n + 3 - k, -1),
                ],
            )
        }
        (AlgebraType::C, BoxIndex::Barred(_)) => {
            let nu = n as usize;
            y(ctx, &[(nu - 1, n + 2, 1), (nu, n + 2, -1), (nu, n + 4, -1)])
        }
        (AlgebraType::C, BoxIndex::Zero) => {
            let nu = n as usize;
            y(ctx, &[(nu, n, 1), (nu, n + 2, -1)])
        }
        (AlgebraType::C, BoxIndex::BarZero) => {
            let nu = n as usize;
            y(
                ctx,
                &[
                    (nu - 1, n, -1),
                    (nu - 1, n + 2, 1),
                    (nu, n - 2, 1),
                    (nu, n + 4, -1),
                ],
            )
        }
        (AlgebraType::D, BoxIndex::Plain(k)) => {
            let (k, nu) = (k as i32, n as usize);
            if k <= n - 2 {
                y(
                    ctx,
                    &[(k as usize - 1, 2 * k, -1), (k as usize, 2 * k - 2, 1)],
                )
            } else if k == n - 1 {
                y(
                    ctx,
                    &[
                        (nu - 2, 2 * n - 2, -1),
                        (nu - 1, 2 * n - 4, 1),
                        (nu, 2 * n - 4, 1),
                    ],
                )
            } else {
                y(ctx, &[(nu - 1, 2 * n, -1), (nu, 2 * n - 4, 1)])
            }
        }
        (AlgebraType::D, BoxIndex::Barred(k)) => {
            let (k, nu) = (k as i32, n as usize);
            if k <= n - 2 {
                y(
                    ctx,
                    &[
                        (k as usize - 1, 2 * (2 * n - 2 - k), 1),
                        (k as usize, 2 * (2 * n - 1 - k), -1),
                    ],
                )
            } else if k == n - 1 {
                y(
                    ctx,
                    &[(nu - 2, 2 * n - 2, 1), (nu - 1, 2 * n, -1), (nu, 2 * n, -1)],
                )
            } else {
                y(ctx, &[(nu - 1, 2 * n - 4, 1), (nu, 2 * n, -1)])
            }
        }
        _ => return Err(BuildError::InvalidIndex(i, *ctx)),
    };
    Ok(m.shifted(s))
}

/// `Φ_{J,z} = Π_k Φ_{j_k, q_1^{a+1-2k} z}`.
pub fn phi_tuple(ctx: &AlgebraContext, j: &[BoxIndex], s: i32) -> Result<LMonomial, BuildError> {
    if !ctx.is_increasing(j) {
        return Err(BuildError::NotIncreasing);
    }
    let a = j.len() as i32;
    let q1 = ctx.q1_shift();
    let mut m = LMonomial::one(ctx.num_x());
    for (k, &b) in j.iter().enumerate() {
        m = m.mul(&phi(ctx, b, s + q1 * (a + 1 - 2 * (k as i32 + 1)))?);
    }
    Ok(m)
}

/// The multi-sums making up `Q^{(1)}_{i,z}` (or a hatted summand).
fn sum_specs(ctx: &AlgebraContext, i: BoxIndex) -> Result<Vec<SumSpec>, BuildError> {
    let n = ctx.rank;
    let ni = n as i32;
    let pre = phi(ctx, i, 0)?;
    let mut specs = Vec::new();
    match (ctx.ty, i) {
        (AlgebraType::A, BoxIndex::Plain(i)) => {
            // variables k_{i+1}..k_{n+1}; K_{j+1} starts at position j - i
            let i = i as usize;
            let m = n + 1 - i;
            let mut s = SumSpec::new(pre, m);
            for j in i..=n {
                s.family(j, LinForm::tail(m, j - i), 2 * (j as i32 + 1), -4);
            }
            specs.push(s);
        }
        (AlgebraType::B, BoxIndex::Plain(i)) => {
            // chain i+1..n, n̄..1̄
            let i = i as usize;
            let plain = n - i;
            let m = plain + n;
            let bar_pos = |j: usize| plain + (n - j);
            for extra in [0, 1] {
                let mut s = SumSpec::new(pre.clone(), m);
                for j in i..=n {
                    s.family(
                        j,
                        LinForm::tail(m, j - i).plus(extra),
                        2 * (j as i32 + 1),
                        -4,
                    );
                }
                for j in 1..=n {
                    s.family(j, LinForm::tail(m, bar_pos(j)), 2 * (2 * ni - j as i32), -4);
                }
                specs.push(s);
            }
        }
        (AlgebraType::B, BoxIndex::Barred(i)) => {
            let i = i as usize;
            let m = i - 1;
            let mut s = SumSpec::new(pre, m);
            for j in 1..i {
                s.family(j, LinForm::tail(m, i - 1 - j), 2 * (2 * ni - j as i32), -4);
            }
            specs.push(s);
        }
        (AlgebraType::C, BoxIndex::Plain(i)) => {
            // chain i+1..n, 0, n̄..1̄ ; K_l for l ≺ 0 counts k_0 twice
            let i = i as usize;
            let plain = n - i;
            let zero = plain;
            let m = plain + 1 + n;
            let bar_pos = |j: usize| plain + 1 + (n - j);
            let mut s = SumSpec::new(pre, m);
            for j in i..n {
                let mut k = LinForm::tail(m, j + 1 - i - 1);
                k.coefs[zero] = 2;
                s.family(j, k, 1 + j as i32, -2);
            }
            for j in 1..n {
                s.family(j, LinForm::tail(m, bar_pos(j)), 2 * ni + 3 - j as i32, -2);
            }
            let k_bar_n = LinForm::tail(m, bar_pos(n));
            s.family(n, k_bar_n.clone(), ni + 2, -2);
            let mut count0 = LinForm::constant(m, 0);
            count0.coefs[zero] = 1;
            let mut shift0 = LinForm::constant(m, (ni + 2) as i64);
            for (v, c) in k_bar_n.coefs.iter().enumerate() {
                shift0.coefs[v] = -2 * c;
            }
            s.families.push(Family {
                node: n,
                count: count0,
                shift: shift0,
                slope: -4,
            });
            specs.push(s);
        }
        (AlgebraType::C, BoxIndex::Zero) => {
            specs.extend(sum_specs(ctx, BoxIndex::BarZero)?);
            specs.insert(0, hatted_spec(ctx, false, pre));
        }
        (AlgebraType::C, BoxIndex::BarZero) => {
            let prefix = pre.times_x(&ctx.x_var(n, -1, 1));
            specs.push(hatted_spec(ctx, true, prefix));
        }
        (AlgebraType::C, BoxIndex::Barred(i)) => {
            let i = i as usize;
            let m = i - 1;
            let mut s = SumSpec::new(pre, m);
            for j in 1..i {
                s.family(j, LinForm::tail(m, i - 1 - j), 2 * ni + 3 - j as i32, -2);
            }
            specs.push(s);
        }
        (AlgebraType::D, BoxIndex::Plain(i)) if (i as usize) < n => {
            let i = i as usize;
            // first sum: chain i+1..n-1, n, (n-1)‾..1̄
            let plain = n - i;
            let m = plain + n - 1;
            let bar_pos = |j: usize| plain + (n - 1 - j);
            let mut s = SumSpec::new(pre.clone(), m);
            for j in 1..=n - 2 {
                s.family(
                    j,
                    LinForm::tail(m, bar_pos(j)),
                    2 * (2 * ni - 1 - j as i32),
                    -4,
                );
            }
            s.family(n, LinForm::tail(m, bar_pos(n - 1)), 2 * ni, -4);
            for j in i..n {
                s.family(j, LinForm::tail(m, j - i), 2 * (j as i32 + 1), -4);
            }
            specs.push(s);
            // second sum: chain i+1..n-1, n̄ (at least one), (n-1)‾..1̄
            let mut s = SumSpec::new(pre, m);
            let nbar = n - 1 - i;
            s.mins[nbar] = 1;
            for j in 1..n {
                s.family(
                    j,
                    LinForm::tail(m, bar_pos(j)),
                    2 * (2 * ni - 1 - j as i32),
                    -4,
                );
            }
            s.family(n, LinForm::tail(m, nbar), 2 * ni, -4);
            for j in i..=n.saturating_sub(2) {
                s.family(j, LinForm::tail(m, j - i), 2 * (j as i32 + 1), -4);
            }
            specs.push(s);
        }
        (AlgebraType::D, BoxIndex::Plain(_)) => {
            let m = n - 1;
            let bar_pos = |j: usize| n - 1 - j;
            let mut s = SumSpec::new(pre, m);
            for j in 1..=n - 2 {
                s.family(
                    j,
                    LinForm::tail(m, bar_pos(j)),
                    2 * (2 * ni - 1 - j as i32),
                    -4,
                );
            }
            s.family(n, LinForm::tail(m, bar_pos(n - 1)), 2 * ni, -4);
            specs.push(s);
        }
        (AlgebraType::D, BoxIndex::Barred(i)) => {
            let i = i as usize;
            let m = i - 1;
            let mut s = SumSpec::new(pre, m);
            for j in 1..i {
                s.family(
                    j,
                    LinForm::tail(m, i - 1 - j),
                    2 * (2 * ni - 1 - j as i32),
                    -4,
                );
            }
            specs.push(s);
        }
        _ => return Err(BuildError::InvalidIndex(i, *ctx)),
    }
    Ok(specs)
}

/// The even (`odd = false`) or odd part of the zero-weight series of type C.
fn hatted_spec(ctx: &AlgebraContext, odd: bool, prefix: LMonomial) -> SumSpec {
    let n = ctx.rank;
    let ni = n as i32;
    let m = n;
    let bar_pos = |j: usize| n - j;
    let mut s = SumSpec::new(prefix, m);
    for j in 1..n {
        s.family(j, LinForm::tail(m, bar_pos(j)), 2 * ni + 3 - j as i32, -2);
    }
    let k = LinForm::tail(m, bar_pos(n));
    let mut half = k.clone();
    half.div = 2;
    if odd {
        half.c = -1;
        s.family(n, half, ni + 2, -4);
    } else {
        s.family(n, half, ni + 4, -4);
    }
    s.parity = Some((k, odd as i64));
    s
}

/// `Q^{(1)}_{i,z}` truncated at A-height `trunc`. In type C the index `0`
/// gives the sum of both hatted parts and `0̄` the odd part alone.
pub fn build_q1(ctx: &AlgebraContext, i: BoxIndex, trunc: u32) -> Result<GradedSeries, BuildError> {
    let specs = sum_specs(ctx, i)?;
    let mut parts: Vec<GradedSeries> = Vec::new();
    for s in &specs {
        let mut g = GradedSeries::zero(*ctx, s.prefix.x(), trunc);
        s.enumerate_into(ctx, trunc, &mut g);
        parts.push(g);
    }
    let mut acc = parts[0].clone();
    for p in &parts[1..] {
        acc = acc.add(p);
    }
    Ok(acc)
}

/// `Q̂^{(1)}_{0,z}` (`odd = false`) or `Q̂^{(1)}_{0̄,z}` (`odd = true`).
pub fn build_q1_hat(
    ctx: &AlgebraContext,
    odd: bool,
    trunc: u32,
) -> Result<GradedSeries, BuildError> {
    if ctx.ty != AlgebraType::C {
        return Err(BuildError::WrongType("hatted zero series", AlgebraType::C));
    }
    if odd {
        build_q1(ctx, BoxIndex::BarZero, trunc)
    } else {
        let pre = phi(ctx, BoxIndex::Zero, 0)?;
        let s = hatted_spec(ctx, false, pre);
        let mut g = GradedSeries::zero(*ctx, s.prefix.x(), trunc);
        s.enumerate_into(ctx, trunc, &mut g);
        Ok(g)
    }
}

/// Thread-safe memo of one-box series.
#[derive(Default)]
pub struct SeriesBank {
    q1: RwLock<HashMap<(AlgebraContext, BoxIndex, u32), Arc<GradedSeries>>>,
}

impl SeriesBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn q1(
        &self,
        ctx: &AlgebraContext,
        i: BoxIndex,
        trunc: u32,
    ) -> Result<Arc<GradedSeries>, BuildError> {
        let key = (*ctx, i, trunc);
        if let Some(s) = self.q1.read().expect("bank lock").get(&key) {
            return Ok(s.clone());
        }
        let s = Arc::new(build_q1(ctx, i, trunc)?);
        self.q1
            .write()
            .expect("bank lock")
            .entry(key)
            .or_insert_with(|| s.clone());
        Ok(s)
    }
}

/// A sign vector `ε ∈ E_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinSign(pub Vec<i8>);

impl SpinSign {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of minus signs modulo 2.
    pub fn parity(&self) -> u8 {
        (self.0.iter().filter(|&&e| e < 0).count() % 2) as u8
    }

    pub fn negated(&self) -> SpinSign {
        SpinSign(self.0.iter().map(|e| -e).collect())
    }

    /// All of `E_n` in lexicographic order with `+` first.
    pub fn all(n: usize) -> Vec<SpinSign> {
        (0..1u32 << n)
            .map(|mask| {
                SpinSign(
                    (0..n)
                        .map(|b| if mask >> (n - 1 - b) & 1 == 1 { -1 } else { 1 })
                        .collect(),
                )
            })
            .collect()
    }

    /// `E_{n,ς}`.
    pub fn with_parity(n: usize, parity: u8) -> Vec<SpinSign> {
        Self::all(n)
            .into_iter()
            .filter(|e| e.parity() == parity)
            .collect()
    }
}

impl fmt::Display for SpinSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for &e in &self.0 {
            write!(f, "{}", if e > 0 { '+' } else { '-' })?;
        }
        write!(f, ")")
    }
}

impl FromStr for SpinSign {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        t.chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(format!("bad sign `{other}` in `{s}`")),
            })
            .collect::<Result<Vec<i8>, _>>()
            .map(SpinSign)
    }
}

/// `2 w_1(ε)` in the `ϵ`-basis.
pub fn w1_doubled(eps: &SpinSign) -> Vec<i64> {
    eps.0.iter().map(|&e| e as i64).collect()
}

/// `2 w_2(J)` in the `ϵ`-basis; zero contributes nothing.
pub fn w2_doubled(n: usize, j: &[BoxIndex]) -> Vec<i64> {
    let mut v = vec![0i64; n];
    for b in j {
        if let Some(k) = b.coordinate() {
            v[k - 1] += 2 * b.sgn() as i64;
        }
    }
    v
}

/// Twice the weight `Σ_i (Σ exps at node i) ω_i` of the 𝒴-part, with `ω_i`
/// the fundamental weights of the dual family (B for a C context, D for a
/// D context), in the `ϵ`-basis.
pub fn dual_weight_doubled(ctx: &AlgebraContext, m: &LMonomial) -> Vec<i64> {
    let n = ctx.rank;
    let mut v = vec![0i64; n];
    for f in m.ys() {
        let node = f.node as usize;
        let e = f.exp as i64;
        let spin_from = match ctx.ty {
            AlgebraType::C => n,
            AlgebraType::D => n - 1,
            _ => n + 1,
        };
        if node < spin_from {
            for c in v.iter_mut().take(node) {
                *c += 2 * e;
            }
        } else {
            for c in v.iter_mut().take(n - 1) {
                *c += e;
            }
            let last = if ctx.ty == AlgebraType::D && node == n - 1 {
                -e
            } else {
                e
            };
            v[n - 1] += last;
        }
    }
    v
}

/// Rule for the `(-+ξ)` branch of the type-D recursion:
/// `𝒴^{-1}_{node, l}` with doubled shift `l = mul·n + off` at current rank `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DBranchRule {
    pub last_node: bool,
    pub mul: i32,
    pub off: i32,
}

/// The rule singled out by [`d4_branch_rules`]: `𝒴^{-1}_{1, q^n z}`.
pub const D_BRANCH_RULE: DBranchRule = DBranchRule {
    last_node: false,
    mul: 2,
    off: 0,
};

/// `M_{ε,z}` of type C.
pub fn build_m_eps_c(eps: &SpinSign) -> LMonomial {
    let n = eps.len();
    let ctx = AlgebraContext::c(n.max(2));
    m_eps_rec(
        &ctx,
        &eps.0,
        |rank, rest_plus| {
            if rest_plus {
                (1, rank as i32 + 2, 2)
            } else {
                (1, rank as i32, 2)
            }
        },
        Base::C,
    )
}

/// `M_{ε,z}` of type D with an explicit rule for the undetermined branch.
pub fn build_m_eps_d(eps: &SpinSign, rule: DBranchRule) -> LMonomial {
    let n = eps.len();
    let ctx = AlgebraContext::d(n.max(3));
    m_eps_rec(
        &ctx,
        &eps.0,
        |rank, rest_plus| {
            if rest_plus {
                let node = if rule.last_node { rank } else { 1 };
                (node, rule.mul * rank as i32 + rule.off, 4)
            } else {
                (1, 2 * rank as i32 - 4, 4)
            }
        },
        Base::D,
    )
}

#[derive(Clone, Copy)]
enum Base {
    C,
    D,
}

/// Shared recursion. `branch(rank, minus_plus)` returns the extra factor's
/// node and doubled shift, and the doubled `τ^z` step: for `minus_plus` the
/// `(-+ξ)` case, otherwise the `(+-ξ)` case.
fn m_eps_rec(
    ctx: &AlgebraContext,
    eps: &[i8],
    branch: impl Fn(usize, bool) -> (usize, i32, i32) + Copy,
    base: Base,
) -> LMonomial {
    let n = eps.len();
    let one = || LMonomial::one(ctx.num_x());
    let yv = |node: usize, s: i32, e: i32| one().mul(&y_product(ctx, &[(node, s, e)]));
    match (base, n) {
        (Base::C, 1) => {
            return if eps[0] > 0 {
                yv(1, 0, 1)
            } else {
                yv(1, 4, -1)
            };
        }
        (Base::D, 2) => {
            return match (eps[0], eps[1]) {
                (1, 1) => yv(2, 0, 1),
                (-1, -1) => yv(2, 4, -1),
                (1, -1) => yv(1, 0, 1),
                _ => yv(1, 4, -1),
            };
        }
        _ => {}
    }
    let rest = m_eps_rec(ctx, &eps[1..], branch, base);
    let raised = rest.node_raised();
    let (_, _, tau) = branch(n, true);
    match (eps[0], eps[1]) {
        (1, 1) => raised,
        (1, _) => {
            let (node, s, _) = branch(n, false);
            yv(node, s, 1).mul(&raised)
        }
        (_, 1) => {
            let (node, s, _) = branch(n, true);
            yv(node, s, -1).mul(&raised.shifted(tau))
        }
        _ => raised.shifted(tau),
    }
}

/// A source of spin series `R^{(node)}_{ε,z}`.
pub trait SpinProvider: Send + Sync {
    /// `None` when the provider has no series for this context.
    fn spin_series(
        &self,
        ctx: &AlgebraContext,
        node: usize,
        eps: &SpinSign,
        trunc: u32,
    ) -> Option<GradedSeries>;
}

/// Doubled shift applied to the swapped `B2` series. Zero is the value
/// under which both extra rank-two identities hold.
pub const C2_SPIN_SHIFT: i32 = 0;

/// Spin series from Dynkin diagram symmetries: `B2 → C2` by exchanging the
/// two nodes, and `D4` by exchanging node 1 with a spin node.
#[derive(Default)]
pub struct SwapProvider {
    bank: SeriesBank,
}

impl SwapProvider {
    pub fn new() -> Self {
        Self::default()
    }

    /// Source context, node permutation and the shift applied afterwards.
    fn plan(ctx: &AlgebraContext, node: usize) -> Option<(AlgebraContext, Vec<usize>, i32)> {
        match (ctx.ty, ctx.rank, node) {
            (AlgebraType::C, 2, 2) => Some((AlgebraContext::b(2), vec![2, 1], C2_SPIN_SHIFT)),
            (AlgebraType::D, 4, 3) => Some((*ctx, vec![3, 2, 1, 4], 0)),
            (AlgebraType::D, 4, 4) => Some((*ctx, vec![4, 2, 3, 1], 0)),
            _ => None,
        }
    }

    /// The source index whose swapped leading term carries the label `eps`.
    pub fn source_index(ctx: &AlgebraContext, node: usize, eps: &SpinSign) -> Option<BoxIndex> {
        let (src, perm, _) = Self::plan(ctx, node)?;
        src.indices().into_iter().find(|&i| {
            let lead = phi(&src, i, 0).expect("valid index");
            let moved = lead.relabeled(|k| perm[k as usize - 1] as u8, ctx.x_one());
            dual_weight_doubled(ctx, &moved) == w1_doubled(eps)
        })
    }

    pub fn supports(ctx: &AlgebraContext) -> bool {
        matches!(
            (ctx.ty, ctx.rank),
            (AlgebraType::C, 2) | (AlgebraType::D, 4)
        )
    }
}

impl SpinProvider for SwapProvider {
    fn spin_series(
        &self,
        ctx: &AlgebraContext,
        node: usize,
        eps: &SpinSign,
        trunc: u32,
    ) -> Option<GradedSeries> {
        let (src, perm, shift) = Self::plan(ctx, node)?;
        if eps.len() != ctx.rank {
            return None;
        }
        if ctx.ty == AlgebraType::D && ctx.rank - eps.parity() as usize != node {
            return None;
        }
        let i = Self::source_index(ctx, node, eps)?;
        let q = self.bank.q1(&src, i, trunc).ok()?;
        Some(q.relabel_nodes(&perm, *ctx).shift(shift))
    }
}

/// The spin node carrying `ε`: `n` in type C, `n - ς` in type D.
pub fn spin_node(ctx: &AlgebraContext, eps: &SpinSign) -> usize {
    match ctx.ty {
        AlgebraType::D => ctx.rank - eps.parity() as usize,
        _ => ctx.rank,
    }
}

/// Leading 𝒴-monomial (height zero part) of a series, if unique.
pub fn leading_monomial(s: &GradedSeries) -> Option<LMonomial> {
    let mut lead = s.terms().filter(|(m, _)| s.height_scaled(m) == 0);
    let (m, c) = lead.next()?;
    if lead.next().is_some() || !c.is_one() {
        return None;
    }
    Some(m.clone())
}

/// Searches the type-D branch rules for those under which `M_ε` has dual
/// weight `w_1(ε)` and equals the leading monomial of the provided spin
/// series for every `ε ∈ E_4`.
pub fn d4_branch_rules(provider: &dyn SpinProvider) -> Vec<DBranchRule> {
    let ctx = AlgebraContext::d(4);
    let leads: Vec<(SpinSign, Option<LMonomial>)> = SpinSign::all(4)
        .into_iter()
        .map(|e| {
            let node = spin_node(&ctx, &e);
            let r = provider.spin_series(&ctx, node, &e, 0);
            (e, r.as_ref().and_then(leading_monomial))
        })
        .collect();
    let mut found = Vec::new();
    for last_node in [false, true] {
        for mul in 0..=2 {
            for off in -8..=8 {
                let rule = DBranchRule {
                    last_node,
                    mul,
                    off,
                };
                let ok = leads.iter().all(|(e, lead)| {
                    let m = build_m_eps_d(e, rule);
                    dual_weight_doubled(&ctx, &m) == w1_doubled(e)
                        && lead.as_ref() == Some(&m.y_part())
                });
                if ok {
                    found.push(rule);
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::{a_var, y_var};
    use crate::root_data::parse_tuple;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn bi(s: &str) -> BoxIndex {
        s.parse().unwrap()
    }

    fn lead_of(ctx: &AlgebraContext, i: &str, d: u32) -> GradedSeries {
        build_q1(ctx, bi(i), d).unwrap()
    }

    #[test]
    fn phi_examples() {
        let a2 = AlgebraContext::a(2);
        assert_eq!(phi(&a2, bi("3"), 0).unwrap(), y_var(&a2, 2, 6).inv());
        let c2 = AlgebraContext::c(2);
        assert_eq!(phi(&c2, bi("1b"), 0).unwrap(), y_var(&c2, 1, 6).inv());
        let d5 = AlgebraContext::d(5);
        assert_eq!(
            phi(&d5, bi("5"), 0).unwrap(),
            y_var(&d5, 4, 10).inv().mul(&y_var(&d5, 5, 6))
        );
    }

    #[test]
    fn phi_tuple_staggers() {
        let a2 = AlgebraContext::a(2);
        let j = parse_tuple("1,2").unwrap();
        let expect = phi(&a2, bi("1"), 2)
            .unwrap()
            .mul(&phi(&a2, bi("2"), -2).unwrap());
        assert_eq!(phi_tuple(&a2, &j, 0).unwrap(), expect);
        let b2 = AlgebraContext::b(2);
        let j = parse_tuple("1,1b").unwrap();
        let expect = phi(&b2, bi("1"), 2)
            .unwrap()
            .mul(&phi(&b2, bi("1b"), -2).unwrap());
        assert_eq!(phi_tuple(&b2, &j, 0).unwrap(), expect);
        assert!(phi_tuple(&b2, &parse_tuple("2,1").unwrap(), 0).is_err());
    }

    #[test]
    fn b2_small_series() {
        let b2 = AlgebraContext::b(2);
        let s = lead_of(&b2, "1b", 5);
        assert_eq!(s.len(), 1);
        assert_eq!(leading_monomial(&s).unwrap(), y_var(&b2, 1, 6).inv());
        // Y_{1,q} Y^{-1}_{2,q^2} (1 + A^{-1}_{1,q})
        let s = lead_of(&b2, "2b", 1);
        let p = y_var(&b2, 1, 2).mul(&y_var(&b2, 2, 4).inv());
        let mut e = GradedSeries::monomial(b2, p.clone(), BigInt::one(), 1);
        e.add_term(p.mul(&a_var(&b2, 1, 2).inv()), BigInt::one());
        assert!(s.same_terms(&e));
    }

    #[test]
    fn a2_height_zero() {
        let a2 = AlgebraContext::a(2);
        let s = lead_of(&a2, "1", 0);
        assert_eq!(s.len(), 1);
        assert_eq!(leading_monomial(&s).unwrap(), y_var(&a2, 1, 0));
    }

    #[test]
    fn c2_hatted_parts() {
        let c2 = AlgebraContext::c(2);
        let even = build_q1_hat(&c2, false, 0).unwrap();
        assert_eq!(
            leading_monomial(&even).unwrap(),
            y_var(&c2, 2, 2).mul(&y_var(&c2, 2, 4).inv())
        );
        let odd = build_q1_hat(&c2, true, 3).unwrap();
        let (m, _) = odd
            .terms()
            .find(|(m, _)| odd.height_scaled(m) == 0)
            .unwrap();
        assert_eq!(m.x(), &c2.x_var(2, -1, 1));
        for ctx in [AlgebraContext::c(2), AlgebraContext::c(3)] {
            for d in 0..=3 {
                let sum = build_q1_hat(&ctx, false, d)
                    .unwrap()
                    .add(&build_q1_hat(&ctx, true, d).unwrap());
                assert!(sum.same_terms(&build_q1(&ctx, BoxIndex::Zero, d).unwrap()));
            }
        }
    }

    #[test]
    fn every_series_leads_with_phi() {
        for ctx in [
            AlgebraContext::a(3),
            AlgebraContext::b(3),
            AlgebraContext::c(3),
            AlgebraContext::d(4),
        ] {
            for i in ctx.indices() {
                let s = build_q1(&ctx, i, 2).unwrap();
                let lead = leading_monomial(&s).unwrap_or_else(|| panic!("{ctx} {i}"));
                assert_eq!(lead, phi(&ctx, i, 0).unwrap(), "{ctx} {i}");
            }
        }
    }

    #[test]
    fn m_eps_base_cases() {
        let c = AlgebraContext::c(2);
        assert_eq!(
            build_m_eps_c(&"(+)".parse().unwrap()).ys(),
            y_var(&c, 1, 0).ys()
        );
        assert_eq!(
            build_m_eps_c(&"(-)".parse().unwrap()).ys(),
            y_var(&c, 1, 4).inv().ys()
        );
        assert_eq!(
            build_m_eps_c(&"(--)".parse().unwrap()).ys(),
            y_var(&c, 2, 6).inv().ys()
        );
        let rule = D_BRANCH_RULE;
        let d = AlgebraContext::d(4);
        assert_eq!(
            build_m_eps_d(&"(+-)".parse().unwrap(), rule).ys(),
            y_var(&d, 1, 0).ys()
        );
        assert_eq!(
            build_m_eps_d(&"(----)".parse().unwrap(), rule).ys(),
            y_var(&d, 4, 12).inv().ys()
        );
    }

    #[test]
    fn weights() {
        let j = parse_tuple("1,0,2b").unwrap();
        assert_eq!(w2_doubled(3, &j), vec![2, -2, 0]);
        let e: SpinSign = "(+-+)".parse().unwrap();
        let sum: Vec<i64> = w1_doubled(&e)
            .iter()
            .zip(w1_doubled(&e.negated()))
            .map(|(a, b)| a + b)
            .collect();
        assert_eq!(sum, vec![0, 0, 0]);
    }

    #[test]
    fn c2_swap_labels_match_the_fixed_map() {
        let c2 = AlgebraContext::c(2);
        for (eps, src) in [("(++)", "1"), ("(+-)", "2"), ("(-+)", "2b"), ("(--)", "1b")] {
            let e: SpinSign = eps.parse().unwrap();
            assert_eq!(
                SwapProvider::source_index(&c2, 2, &e),
                Some(bi(src)),
                "{eps}"
            );
        }
    }

    #[test]
    fn d4_swap_displays() {
        let d4 = AlgebraContext::d(4);
        let p = SwapProvider::new();
        let r = p
            .spin_series(&d4, 4, &"(----)".parse().unwrap(), 3)
            .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(leading_monomial(&r).unwrap(), y_var(&d4, 4, 12).inv());
        let r = p
            .spin_series(&d4, 3, &"(---+)".parse().unwrap(), 3)
            .unwrap();
        assert_eq!(leading_monomial(&r).unwrap(), y_var(&d4, 3, 12).inv());
        let r = p
            .spin_series(&d4, 3, &"(--+-)".parse().unwrap(), 1)
            .unwrap();
        assert_eq!(
            leading_monomial(&r).unwrap(),
            y_var(&d4, 2, 10).inv().mul(&y_var(&d4, 3, 8))
        );
        assert_eq!(r.len(), 2);
        // wrong parity for the node
        assert!(p
            .spin_series(&d4, 4, &"(---+)".parse().unwrap(), 1)
            .is_none());
    }

    #[test]
    fn c2_m_eps_match_swapped_leads() {
        let c2 = AlgebraContext::c(2);
        let p = SwapProvider::new();
        for e in SpinSign::all(2) {
            let r = p.spin_series(&c2, 2, &e, 0).unwrap();
            let m = build_m_eps_c(&e);
            assert_eq!(leading_monomial(&r).unwrap().ys(), m.ys(), "{e}");
            assert_eq!(dual_weight_doubled(&c2, &m), w1_doubled(&e));
        }
    }

    #[test]
    fn d4_branch_rule_is_unique() {
        let rules = d4_branch_rules(&SwapProvider::new());
        assert_eq!(rules, vec![D_BRANCH_RULE]);
    }

    #[test]
    fn varpi_of_leading_terms_is_trivial() {
        let b3 = AlgebraContext::b(3);
        for i in b3.indices() {
            let s = build_q1(&b3, i, 0).unwrap();
            assert!(s.top_weight().is_unit_monomial());
        }
        let c2 = AlgebraContext::c(2);
        let odd = build_q1_hat(&c2, true, 0).unwrap();
        assert_eq!(odd.top_weight(), c2.x_var(2, -1, 1));
        assert_eq!(odd.truncation(), Ratio::from_integer(0));
    }

    proptest! {
        #[test]
        fn truncation_is_monotone(d in 0u32..4, which in 0usize..8) {
            let ctx = AlgebraContext::b(2);
            let i = ctx.indices()[which % ctx.indices().len()];
            let lo = build_q1(&ctx, i, d).unwrap();
            let hi = build_q1(&ctx, i, d + 1).unwrap();
            prop_assert!(hi.truncated(Ratio::from_integer(d as i64)).same_terms(&lo));
        }

        #[test]
        fn m_eps_weight_law_c(bits in 0u32..64, n in 1usize..=6) {
            let e = SpinSign::all(n)[(bits as usize) % (1 << n)].clone();
            let ctx = AlgebraContext::c(n.max(2));
            if n >= 2 {
                prop_assert_eq!(dual_weight_doubled(&ctx, &build_m_eps_c(&e)), w1_doubled(&e));
            }
        }
    }
}
