//! Root data for the untwisted affine types A, B, C, D and the index set of
//! the vector representation of the Langlands dual.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::weight::{Exps, XWeight, XDEN};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootDataError {
    #[error("rank {rank} is not supported for type {ty}")]
    UnsupportedRank { ty: AlgebraType, rank: usize },
    #[error("unknown algebra type `{0}`")]
    UnknownType(String),
    #[error("cannot parse index `{0}`")]
    BadIndex(String),
    #[error("index {index} does not belong to type {ty}{rank}")]
    ForeignIndex {
        index: BoxIndex,
        ty: AlgebraType,
        rank: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgebraType {
    A,
    B,
    C,
    D,
}

impl fmt::Display for AlgebraType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraType::A => "A",
            AlgebraType::B => "B",
            AlgebraType::C => "C",
            AlgebraType::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for AlgebraType {
    type Err = RootDataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(AlgebraType::A),
            "B" | "b" => Ok(AlgebraType::B),
            "C" | "c" => Ok(AlgebraType::C),
            "D" | "d" => Ok(AlgebraType::D),
            other => Err(RootDataError::UnknownType(other.to_string())),
        }
    }
}

/// An element of the index set. `BarZero` only labels the second summand of
/// the zero-weight series in type C and is not part of the index set itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoxIndex {
    Plain(u8),
    Zero,
    BarZero,
    Barred(u8),
}

impl BoxIndex {
    pub fn bar(self) -> BoxIndex {
        match self {
            BoxIndex::Plain(k) => BoxIndex::Barred(k),
            BoxIndex::Barred(k) => BoxIndex::Plain(k),
            z => z,
        }
    }

    /// The underlying coordinate `k` of `k` or `k̄`; `None` for zero.
    pub fn coordinate(self) -> Option<usize> {
        match self {
            BoxIndex::Plain(k) | BoxIndex::Barred(k) => Some(k as usize),
            _ => None,
        }
    }

    pub fn is_barred(self) -> bool {
        matches!(self, BoxIndex::Barred(_))
    }

    /// `+1` for `j ⪯ n`, `0` for zero, `-1` for barred indices.
    pub fn sgn(self) -> i32 {
        match self {
            BoxIndex::Plain(_) => 1,
            BoxIndex::Barred(_) => -1,
            _ => 0,
        }
    }
}

impl fmt::Display for BoxIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxIndex::Plain(k) => write!(f, "{k}"),
            BoxIndex::Barred(k) => write!(f, "{k}b"),
            BoxIndex::Zero => write!(f, "0"),
            BoxIndex::BarZero => write!(f, "0b"),
        }
    }
}

impl FromStr for BoxIndex {
    type Err = RootDataError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || RootDataError::BadIndex(s.to_string());
        let (body, barred) = if let Some(b) = t.strip_suffix('b') {
            (b, true)
        } else if let Some(b) = t.strip_prefix('~') {
            (b, true)
        } else {
            (t, false)
        };
        let k: u8 = body.parse().map_err(|_| bad())?;
        Ok(match (k, barred) {
            (0, false) => BoxIndex::Zero,
            (0, true) => BoxIndex::BarZero,
            (k, false) => BoxIndex::Plain(k),
            (k, true) => BoxIndex::Barred(k),
        })
    }
}

/// Parses `"1,2b,0"` style tuples.
pub fn parse_tuple(s: &str) -> Result<Vec<BoxIndex>, RootDataError> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(BoxIndex::from_str).collect()
}

pub fn format_tuple(j: &[BoxIndex]) -> String {
    let parts: Vec<String> = j.iter().map(|b| b.to_string()).collect();
    format!("({})", parts.join(","))
}

pub type AlphaCoords = SmallVec<[i64; 8]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraContext {
    pub ty: AlgebraType,
    pub rank: usize,
}

impl fmt::Display for AlgebraContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ty, self.rank)
    }
}

impl AlgebraContext {
    pub fn new(ty: AlgebraType, rank: usize) -> Result<Self, RootDataError> {
        let ok = match ty {
            AlgebraType::A => (1..=15).contains(&rank),
            AlgebraType::B | AlgebraType::C => (2..=12).contains(&rank),
            AlgebraType::D => (3..=12).contains(&rank),
        };
        if ok {
            Ok(AlgebraContext { ty, rank })
        } else {
            Err(RootDataError::UnsupportedRank { ty, rank })
        }
    }

    pub fn a(rank: usize) -> Self {
        Self::new(AlgebraType::A, rank).expect("rank")
    }
    pub fn b(rank: usize) -> Self {
        Self::new(AlgebraType::B, rank).expect("rank")
    }
    pub fn c(rank: usize) -> Self {
        Self::new(AlgebraType::C, rank).expect("rank")
    }
    pub fn d(rank: usize) -> Self {
        Self::new(AlgebraType::D, rank).expect("rank")
    }

    /// Lacing number of the dual: `q_1 = q^{1/t}`.
    pub fn t(&self) -> u32 {
        if self.ty == AlgebraType::C {
            2
        } else {
            1
        }
    }

    pub fn dual_coxeter(&self) -> u32 {
        let n = self.rank as u32;
        match self.ty {
            AlgebraType::A => n + 1,
            AlgebraType::B => 2 * n - 1,
            AlgebraType::C => n + 1,
            AlgebraType::D => 2 * n - 2,
        }
    }

    /// Number of x-variables.
    pub fn num_x(&self) -> usize {
        if self.ty == AlgebraType::A {
            self.rank + 1
        } else {
            self.rank
        }
    }

    /// `q_1` expressed as a shift in doubled units (one unit is `q^{1/2}`).
    pub fn q1_shift(&self) -> i32 {
        2 / self.t() as i32
    }

    /// `2 d_i` with long roots normalised to `d_i = 1`.
    pub fn d2(&self, i: usize) -> i32 {
        let n = self.rank;
        match self.ty {
            AlgebraType::A | AlgebraType::D => 2,
            AlgebraType::B => {
                if i == n {
                    1
                } else {
                    2
                }
            }
            AlgebraType::C => {
                if i == n {
                    2
                } else {
                    1
                }
            }
        }
    }

    /// Cartan entry `c_ij = 2(α_i, α_j)/(α_i, α_i)`, nodes 1-based.
    pub fn cartan(&self, i: usize, j: usize) -> i32 {
        let n = self.rank;
        if i == j {
            return 2;
        }
        match self.ty {
            AlgebraType::A => {
                if i.abs_diff(j) == 1 {
                    -1
                } else {
                    0
                }
            }
            AlgebraType::B => {
                if i.abs_diff(j) != 1 {
                    0
                } else if i == n {
                    -2
                } else {
                    -1
                }
            }
            AlgebraType::C => {
                if i.abs_diff(j) != 1 {
                    0
                } else if i == n - 1 && j == n {
                    -2
                } else {
                    -1
                }
            }
            AlgebraType::D => {
                let adjacent = |a: usize, b: usize| {
                    (a.abs_diff(b) == 1 && a.max(b) <= n - 1)
                        || (a.min(b) == n - 2 && a.max(b) == n)
                };
                if adjacent(i, j) {
                    -1
                } else {
                    0
                }
            }
        }
    }

    /// The index set in its canonical listing order.
    pub fn indices(&self) -> Vec<BoxIndex> {
        let n = self.rank as u8;
        let mut v: Vec<BoxIndex> = Vec::new();
        match self.ty {
            AlgebraType::A => v.extend((1..=n + 1).map(BoxIndex::Plain)),
            AlgebraType::B | AlgebraType::D => {
                v.extend((1..=n).map(BoxIndex::Plain));
                v.extend((1..=n).rev().map(BoxIndex::Barred));
            }
            AlgebraType::C => {
                v.extend((1..=n).map(BoxIndex::Plain));
                v.push(BoxIndex::Zero);
                v.extend((1..=n).rev().map(BoxIndex::Barred));
            }
        }
        v
    }

    pub fn contains(&self, j: BoxIndex) -> bool {
        let n = self.rank as u8;
        match (self.ty, j) {
            (AlgebraType::A, BoxIndex::Plain(k)) => (1..=n + 1).contains(&k),
            (AlgebraType::A, _) => false,
            (_, BoxIndex::Plain(k)) | (_, BoxIndex::Barred(k)) => (1..=n).contains(&k),
            (AlgebraType::C, BoxIndex::Zero) => true,
            _ => false,
        }
    }

    pub fn check(&self, j: BoxIndex) -> Result<(), RootDataError> {
        if self.contains(j) || (self.ty == AlgebraType::C && j == BoxIndex::BarZero) {
            Ok(())
        } else {
            Err(RootDataError::ForeignIndex {
                index: j,
                ty: self.ty,
                rank: self.rank,
            })
        }
    }

    /// Level in the partial order. `j ≺ k` iff `level(j) < level(k)`; in type
    /// D the indices `n` and `n̄` share a level and are incomparable.
    pub fn level(&self, j: BoxIndex) -> i32 {
        let n = self.rank as i32;
        match (self.ty, j) {
            (_, BoxIndex::Plain(k)) => k as i32,
            (AlgebraType::C, BoxIndex::Zero) | (AlgebraType::C, BoxIndex::BarZero) => n + 1,
            (AlgebraType::C, BoxIndex::Barred(k)) => 2 * n + 2 - k as i32,
            (AlgebraType::D, BoxIndex::Barred(k)) if k as i32 == n => n,
            (AlgebraType::D, BoxIndex::Barred(k)) => 2 * n - k as i32,
            (_, BoxIndex::Barred(k)) => 2 * n + 1 - k as i32,
            _ => 0,
        }
    }

    /// Total order refining `≺`, used for canonical listings.
    pub fn sort_key(&self, j: BoxIndex) -> i32 {
        let tie = match (self.ty, j) {
            (AlgebraType::D, BoxIndex::Barred(k)) if k as usize == self.rank => 1,
            (AlgebraType::C, BoxIndex::BarZero) => 1,
            _ => 0,
        };
        2 * self.level(j) + tie
    }

    pub fn precedes(&self, a: BoxIndex, b: BoxIndex) -> bool {
        self.level(a) < self.level(b)
    }

    pub fn comparable(&self, a: BoxIndex, b: BoxIndex) -> bool {
        a == b || self.level(a) != self.level(b)
    }

    /// Each consecutive pair strictly increases; the incomparable pair
    /// `{n, n̄}` of type D may appear adjacent in either order.
    pub fn is_increasing(&self, j: &[BoxIndex]) -> bool {
        j.windows(2)
            .all(|w| self.precedes(w[0], w[1]) || (w[0] != w[1] && !self.comparable(w[0], w[1])))
            && !has_duplicates(j)
    }

    pub fn sort_canonical(&self, j: &mut [BoxIndex]) {
        j.sort_by_key(|&b| self.sort_key(b));
    }

    /// `J*`: the remaining indices in canonical order.
    pub fn complement(&self, j: &[BoxIndex]) -> Vec<BoxIndex> {
        self.indices()
            .into_iter()
            .filter(|b| !j.contains(b))
            .collect()
    }

    /// `J̄ = (j̄_a, …, j̄_1)`.
    pub fn bar_tuple(&self, j: &[BoxIndex]) -> Vec<BoxIndex> {
        j.iter().rev().map(|b| b.bar()).collect()
    }

    /// Signature of the permutation taking the canonical listing to the
    /// concatenation `(J, J*)`.
    pub fn signature(&self, j: &[BoxIndex]) -> i32 {
        let mut seq: Vec<i32> = j.iter().map(|&b| self.sort_key(b)).collect();
        seq.extend(self.complement(j).iter().map(|&b| self.sort_key(b)));
        let mut inversions = 0usize;
        for a in 0..seq.len() {
            for b in a + 1..seq.len() {
                if seq[a] > seq[b] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `c(j)` of the invariant pairing in type B.
    pub fn pairing_sign(&self, j: BoxIndex) -> i32 {
        match j {
            BoxIndex::Plain(k) => {
                if k % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            BoxIndex::Barred(k) => {
                if (k - 1) % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            _ => 1,
        }
    }

    pub fn normalize(&self, w: &mut XWeight) {
        if self.ty != AlgebraType::A {
            return;
        }
        let m = self.num_x() as i64;
        let sum: i64 = w.scaled().iter().sum();
        assert_eq!(sum % m, 0, "weight leaves the exponent scale");
        let shift = sum / m;
        for e in w.exps_mut().iter_mut() {
            *e -= shift;
        }
    }

    /// `x_i^(num/den)` (normalised in type A).
    pub fn x_var(&self, i: usize, num: i64, den: i64) -> XWeight {
        let mut w = XWeight::var(self.num_x(), i - 1, num, den);
        self.normalize(&mut w);
        w
    }

    pub fn x_one(&self) -> XWeight {
        XWeight::one(self.num_x())
    }

    /// `x_j` for an index: `x_k`, `x_k^{-1}` for `k̄`, and `1` for zero.
    pub fn x_of(&self, j: BoxIndex) -> XWeight {
        match j {
            BoxIndex::Plain(k) => self.x_var(k as usize, 1, 1),
            BoxIndex::Barred(k) => self.x_var(k as usize, -1, 1),
            _ => self.x_one(),
        }
    }

    pub fn x_of_tuple(&self, j: &[BoxIndex]) -> XWeight {
        j.iter()
            .fold(self.x_one(), |acc, &b| acc.mul(&self.x_of(b)))
    }

    fn from_eps(&self, v: &[Ratio<i64>]) -> XWeight {
        let mut w = XWeight::from_ratios(v);
        self.normalize(&mut w);
        w
    }

    /// `e^{ω_i}` as an x-monomial.
    pub fn omega_x(&self, i: usize) -> XWeight {
        let n = self.rank;
        let m = self.num_x();
        let one = Ratio::from_integer(1);
        let zero = Ratio::from_integer(0);
        let half = Ratio::new(1, 2);
        let mut v = vec![zero; m];
        match self.ty {
            AlgebraType::A | AlgebraType::C => {
                for e in v.iter_mut().take(i) {
                    *e = one;
                }
            }
            AlgebraType::B => {
                if i < n {
                    for e in v.iter_mut().take(i) {
                        *e = one;
                    }
                } else {
                    v.iter_mut().for_each(|e| *e = half);
                }
            }
            AlgebraType::D => {
                if i <= n - 2 {
                    for e in v.iter_mut().take(i) {
                        *e = one;
                    }
                } else {
                    v.iter_mut().for_each(|e| *e = half);
                    if i == n - 1 {
                        v[n - 1] = -half;
                    }
                }
            }
        }
        self.from_eps(&v)
    }

    /// `e^{α_i}` as an x-monomial.
    pub fn alpha_x(&self, i: usize) -> XWeight {
        let n = self.rank;
        let m = self.num_x();
        let mut v = vec![Ratio::from_integer(0); m];
        match (self.ty, i == n) {
            (AlgebraType::B, true) => v[n - 1] = Ratio::from_integer(1),
            (AlgebraType::C, true) => v[n - 1] = Ratio::from_integer(2),
            (AlgebraType::D, true) => {
                v[n - 2] = Ratio::from_integer(1);
                v[n - 1] = Ratio::from_integer(1);
            }
            _ => {
                v[i - 1] = Ratio::from_integer(1);
                v[i] = Ratio::from_integer(-1);
            }
        }
        self.from_eps(&v)
    }

    /// Coordinates of a weight in the basis of simple roots, scaled by
    /// [`XDEN`].
    pub fn alpha_coords(&self, w: &XWeight) -> AlphaCoords {
        let e = w.scaled();
        let n = self.rank;
        let mut c: AlphaCoords = SmallVec::with_capacity(n);
        let mut run = 0i64;
        match self.ty {
            AlgebraType::A | AlgebraType::B => {
                for &x in e.iter().take(n) {
                    run += x;
                    c.push(run);
                }
            }
            AlgebraType::C => {
                for &x in e.iter().take(n - 1) {
                    run += x;
                    c.push(run);
                }
                let s = run + e[n - 1];
                assert_eq!(s % 2, 0);
                c.push(s / 2);
            }
            AlgebraType::D => {
                for &x in e.iter().take(n - 2) {
                    run += x;
                    c.push(run);
                }
                let s = run + e[n - 2];
                assert_eq!((s - e[n - 1]) % 2, 0);
                c.push((s - e[n - 1]) / 2);
                c.push((s + e[n - 1]) / 2);
            }
        }
        c
    }

    /// Inverse of [`Self::alpha_coords`].
    pub fn from_alpha_coords(&self, c: &[i64]) -> XWeight {
        let n = self.rank;
        let prev = |k: usize| if k == 0 { 0 } else { c[k - 1] };
        let mut e: Exps = SmallVec::from_elem(0, self.num_x());
        match self.ty {
            AlgebraType::A => {
                for k in 0..n {
                    e[k] = c[k] - prev(k);
                }
                e[n] = -c[n - 1];
            }
            AlgebraType::B => {
                for k in 0..n {
                    e[k] = c[k] - prev(k);
                }
            }
            AlgebraType::C => {
                for k in 0..n - 1 {
                    e[k] = c[k] - prev(k);
                }
                e[n - 1] = 2 * c[n - 1] - prev(n - 1);
            }
            AlgebraType::D => {
                for k in 0..n - 2 {
                    e[k] = c[k] - prev(k);
                }
                e[n - 2] = c[n - 1] + c[n - 2] - prev(n - 2);
                e[n - 1] = c[n - 1] - c[n - 2];
            }
        }
        XWeight::from_scaled(e)
    }

    /// Height of `top - w` in scaled units.
    pub fn height_below(&self, top: &[i64], w: &XWeight) -> i64 {
        let c = self.alpha_coords(w);
        top.iter().zip(c.iter()).map(|(t, x)| t - x).sum()
    }

    /// Pairing `⟨λ, α_j^∨⟩` of a weight with a simple coroot.
    pub fn coroot_pairing(&self, w: &XWeight, j: usize) -> Ratio<i64> {
        let c = self.alpha_coords(w);
        let n = self.rank;
        let mut s = Ratio::from_integer(0);
        for i in 1..=n {
            // ⟨α_i, α_j^∨⟩ = c_ji
            s += Ratio::new(c[i - 1] * self.cartan(j, i) as i64, XDEN);
        }
        s
    }
}

pub fn has_duplicates(j: &[BoxIndex]) -> bool {
    (0..j.len()).any(|a| j[a + 1..].contains(&j[a]))
}

/// The tuple with one entry removed.
pub fn remove_entry(j: &[BoxIndex], x: BoxIndex) -> Vec<BoxIndex> {
    j.iter().copied().filter(|&b| b != x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_contexts() -> Vec<AlgebraContext> {
        let mut v = Vec::new();
        for n in 1..=5 {
            v.push(AlgebraContext::a(n));
        }
        for n in 2..=5 {
            v.push(AlgebraContext::b(n));
            v.push(AlgebraContext::c(n));
        }
        for n in 3..=6 {
            v.push(AlgebraContext::d(n));
        }
        v
    }

    #[test]
    fn index_set_sizes() {
        assert_eq!(AlgebraContext::a(3).indices().len(), 4);
        assert_eq!(AlgebraContext::b(3).indices().len(), 6);
        assert_eq!(AlgebraContext::c(3).indices().len(), 7);
        assert_eq!(AlgebraContext::d(4).indices().len(), 8);
    }

    #[test]
    fn dual_coxeter_numbers() {
        assert_eq!(AlgebraContext::a(4).dual_coxeter(), 5);
        assert_eq!(AlgebraContext::b(3).dual_coxeter(), 5);
        assert_eq!(AlgebraContext::c(3).dual_coxeter(), 4);
        assert_eq!(AlgebraContext::d(5).dual_coxeter(), 8);
    }

    #[test]
    fn cartan_b2_c2() {
        let b = AlgebraContext::b(2);
        assert_eq!((b.cartan(1, 2), b.cartan(2, 1)), (-1, -2));
        let c = AlgebraContext::c(2);
        assert_eq!((c.cartan(1, 2), c.cartan(2, 1)), (-2, -1));
        let d = AlgebraContext::d(4);
        assert_eq!(d.cartan(2, 4), -1);
        assert_eq!(d.cartan(3, 4), 0);
        assert_eq!(d.cartan(2, 3), -1);
    }

    #[test]
    fn symmetrized_cartan() {
        // d_i c_ij must be symmetric
        for ctx in all_contexts() {
            for i in 1..=ctx.rank {
                for j in 1..=ctx.rank {
                    assert_eq!(
                        ctx.d2(i) * ctx.cartan(i, j),
                        ctx.d2(j) * ctx.cartan(j, i),
                        "{ctx} {i} {j}"
                    );
                }
            }
        }
    }

    #[test]
    fn omega_pairs_with_coroots() {
        for ctx in all_contexts() {
            for i in 1..=ctx.rank {
                for j in 1..=ctx.rank {
                    let expect = if i == j { 1 } else { 0 };
                    assert_eq!(
                        ctx.coroot_pairing(&ctx.omega_x(i), j),
                        Ratio::from_integer(expect),
                        "{ctx} ω{i} α{j}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_coords_of_simple_roots() {
        for ctx in all_contexts() {
            for i in 1..=ctx.rank {
                let c = ctx.alpha_coords(&ctx.alpha_x(i));
                for (k, &v) in c.iter().enumerate() {
                    assert_eq!(v, if k + 1 == i { XDEN } else { 0 }, "{ctx} α{i}");
                }
            }
        }
    }

    #[test]
    fn orders() {
        let d = AlgebraContext::d(4);
        let n = BoxIndex::Plain(4);
        let nb = BoxIndex::Barred(4);
        assert!(!d.comparable(n, nb));
        assert!(d.precedes(BoxIndex::Plain(3), nb));
        assert!(d.precedes(n, BoxIndex::Barred(3)));
        assert!(d.is_increasing(&[BoxIndex::Plain(3), nb, n, BoxIndex::Barred(2)]));
        let c = AlgebraContext::c(2);
        assert!(c.is_increasing(&[BoxIndex::Plain(2), BoxIndex::Zero, BoxIndex::Barred(2)]));
        assert!(!c.is_increasing(&[BoxIndex::Zero, BoxIndex::Plain(2)]));
    }

    #[test]
    fn complement_and_bar() {
        let b = AlgebraContext::b(2);
        let j = vec![BoxIndex::Plain(2), BoxIndex::Barred(1)];
        assert_eq!(
            b.complement(&j),
            vec![BoxIndex::Plain(1), BoxIndex::Barred(2)]
        );
        assert_eq!(
            b.bar_tuple(&j),
            vec![BoxIndex::Plain(1), BoxIndex::Barred(2)]
        );
    }

    #[test]
    fn pairing_signs() {
        let b = AlgebraContext::b(3);
        assert_eq!(b.pairing_sign(BoxIndex::Plain(1)), -1);
        assert_eq!(b.pairing_sign(BoxIndex::Barred(1)), 1);
        assert_eq!(b.pairing_sign(BoxIndex::Plain(2)), 1);
        assert_eq!(b.pairing_sign(BoxIndex::Barred(2)), -1);
    }

    #[test]
    fn parse_roundtrip() {
        let j = parse_tuple("(2,2b,1b)").unwrap();
        assert_eq!(
            j,
            vec![BoxIndex::Plain(2), BoxIndex::Barred(2), BoxIndex::Barred(1)]
        );
        assert_eq!(format_tuple(&j), "(2,2b,1b)");
        assert_eq!(
            parse_tuple("0,~3").unwrap(),
            vec![BoxIndex::Zero, BoxIndex::Barred(3)]
        );
    }

    // sign by cycle decomposition, independent of the inversion count
    fn cycle_sign(ctx: &AlgebraContext, j: &[BoxIndex]) -> i32 {
        let canon = ctx.indices();
        let mut seq = j.to_vec();
        seq.extend(ctx.complement(j));
        let perm: Vec<usize> = seq
            .iter()
            .map(|b| canon.iter().position(|c| c == b).unwrap())
            .collect();
        let mut seen = vec![false; perm.len()];
        let mut sign = 1;
        for s in 0..perm.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = perm[k];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    fn arb_subset() -> impl Strategy<Value = (usize, Vec<bool>)> {
        (2usize..=5).prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), 2 * n)))
    }

    proptest! {
        #[test]
        fn signature_agrees_with_cycles((n, mask) in arb_subset(), seed in any::<u64>()) {
            let ctx = AlgebraContext::b(n);
            let mut j: Vec<BoxIndex> = ctx.indices().into_iter().zip(&mask).filter(|(_, &m)| m).map(|(b, _)| b).collect();
            // scramble deterministically
            let len = j.len();
            if len > 1 {
                let mut s = seed;
                for k in (1..len).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    j.swap(k, (s >> 33) as usize % (k + 1));
                }
            }
            prop_assert_eq!(ctx.signature(&j), cycle_sign(&ctx, &j));
        }

        #[test]
        fn complement_partitions((n, mask) in arb_subset()) {
            let ctx = AlgebraContext::d(n.max(3));
            let idx = ctx.indices();
            let j: Vec<BoxIndex> = idx.iter().zip(mask.iter().cycle()).filter(|(_, &m)| m).map(|(b, _)| *b).collect();
            let c = ctx.complement(&j);
            prop_assert_eq!(j.len() + c.len(), idx.len());
            prop_assert!(c.iter().all(|b| !j.contains(b)));
            prop_assert!(ctx.is_increasing(&c));
        }

        #[test]
        fn bar_is_involution((n, mask) in arb_subset()) {
            let ctx = AlgebraContext::c(n);
            let j: Vec<BoxIndex> = ctx.indices().into_iter().zip(mask.iter().cycle()).filter(|(_, &m)| m).map(|(b, _)| b).collect();
            prop_assert_eq!(ctx.bar_tuple(&ctx.bar_tuple(&j)), j.clone());
            prop_assert!(ctx.is_increasing(&ctx.bar_tuple(&j)));
        }

        #[test]
        fn alpha_coords_roundtrip(n in 2usize..=6, e in proptest::collection::vec(-6i64..=6, 7), ty in 0usize..4) {
            let ctx = match ty { 0 => AlgebraContext::a(n), 1 => AlgebraContext::b(n), 2 => AlgebraContext::c(n), _ => AlgebraContext::d(n.max(3)) };
            let mut w = ctx.x_one();
            for i in 1..=ctx.rank {
                w = w.mul(&ctx.alpha_x(i).pow(e[i - 1]));
            }
            let c = ctx.alpha_coords(&w);
            for i in 0..ctx.rank {
                prop_assert_eq!(c[i], e[i] * XDEN);
            }
            prop_assert_eq!(ctx.from_alpha_coords(&c), w);
        }
    }
}
