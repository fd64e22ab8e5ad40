//! Casorati determinants of one-box series and the type-A `Δ` machinery
//! behind the Wronskian identity.

use num_bigint::BigInt;
use num_traits::One;
use std::collections::HashMap;

use crate::builders::{build_q1, BuildError, SeriesBank};
use crate::monomial::{y_product, y_var, LMonomial};
use crate::root_data::{has_duplicates, AlgebraContext, AlgebraType, BoxIndex};
use crate::series::{sum_all, GradedSeries};
use crate::weight::XWeight;

/// Largest size expanded by the Leibniz formula; larger matrices use
/// cofactor expansion with memoised minors.
pub const LEIBNIZ_MAX: usize = 4;

/// Determinant of a square matrix of series, `rows[μ][ν]`.
pub fn det(ctx: AlgebraContext, rows: &[Vec<GradedSeries>], trunc: u32) -> GradedSeries {
    if rows.is_empty() {
        return GradedSeries::one(ctx, trunc);
    }
    if rows.len() <= LEIBNIZ_MAX {
        det_leibniz(ctx, rows, trunc)
    } else {
        det_laplace(ctx, rows, trunc)
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    // Heap's algorithm; sign flips with every swap
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut sign = 1;
    out.push((p.clone(), sign));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            sign = -sign;
            out.push((p.clone(), sign));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

pub fn det_leibniz(ctx: AlgebraContext, rows: &[Vec<GradedSeries>], trunc: u32) -> GradedSeries {
    let n = rows.len();
    if n == 0 {
        return GradedSeries::one(ctx, trunc);
    }
    let terms: Vec<GradedSeries> = permutations(n)
        .into_iter()
        .map(|(p, sign)| {
            let mut acc = rows[0][p[0]].clone();
            for (mu, &nu) in p.iter().enumerate().skip(1) {
                acc = acc.mul(&rows[mu][nu]);
            }
            if sign < 0 {
                acc.neg()
            } else {
                acc
            }
        })
        .collect();
    sum_all(&terms).expect("nonempty")
}

pub fn det_laplace(ctx: AlgebraContext, rows: &[Vec<GradedSeries>], trunc: u32) -> GradedSeries {
    let n = rows.len();
    assert!(n < 32);
    let mut memo: HashMap<u32, GradedSeries> = HashMap::new();
    minor(ctx, rows, trunc, (1u32 << n) - 1, &mut memo)
}

/// Determinant of the bottom rows against the columns in `cols`.
fn minor(
    ctx: AlgebraContext,
    rows: &[Vec<GradedSeries>],
    trunc: u32,
    cols: u32,
    memo: &mut HashMap<u32, GradedSeries>,
) -> GradedSeries {
    let k = cols.count_ones() as usize;
    if k == 0 {
        return GradedSeries::one(ctx, trunc);
    }
    if let Some(s) = memo.get(&cols) {
        return s.clone();
    }
    let row = rows.len() - k;
    let mut parts = Vec::with_capacity(k);
    let mut pos = 0;
    for c in 0..rows.len() {
        if cols >> c & 1 == 0 {
            continue;
        }
        let sub = minor(ctx, rows, trunc, cols & !(1 << c), memo);
        let t = rows[row][c].mul(&sub);
        parts.push(if pos % 2 == 0 { t } else { t.neg() });
        pos += 1;
    }
    let s = sum_all(&parts).expect("nonempty");
    memo.insert(cols, s.clone());
    s
}

/// `Q^{(a)}_{J, q^{s/2} z}`: the Casorati determinant
/// `det(Q^{(1)}_{j_ν, q_1^{-a-1+2μ} z} x_{j_ν}^{μ-1})`.
pub fn casorati(
    ctx: &AlgebraContext,
    j: &[BoxIndex],
    trunc: u32,
    shift: i32,
    bank: &SeriesBank,
) -> Result<GradedSeries, BuildError> {
    for &b in j {
        ctx.check(b)
            .map_err(|_| BuildError::InvalidIndex(b, *ctx))?;
    }
    if j.is_empty() {
        return Ok(GradedSeries::one(*ctx, trunc));
    }
    if has_duplicates(j) {
        return Ok(GradedSeries::zero(*ctx, &ctx.x_one(), trunc));
    }
    let a = j.len() as i32;
    let q1 = ctx.q1_shift();
    let cols: Vec<std::sync::Arc<GradedSeries>> = j
        .iter()
        .map(|&b| bank.q1(ctx, b, trunc))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<GradedSeries>> = (1..=a)
        .map(|mu| {
            j.iter()
                .zip(&cols)
                .map(|(&b, q)| {
                    q.shift(shift + q1 * (-a - 1 + 2 * mu))
                        .scale_x(&ctx.x_of(b).pow((mu - 1) as i64))
                })
                .collect()
        })
        .collect();
    Ok(det(*ctx, &rows, trunc))
}

/// `𝒜_{i,z} = 𝒴^{-1}_{i,q^{-1}z} 𝒴^{-1}_{i,qz} 𝒴_{i-1,z} 𝒴_{i+1,z}` (type A).
pub fn script_a(ctx: &AlgebraContext, i: usize, s: i32) -> LMonomial {
    y_product(
        ctx,
        &[(i, s - 2, -1), (i, s + 2, -1), (i - 1, s, 1), (i + 1, s, 1)],
    )
}

fn require_a(ctx: &AlgebraContext) -> Result<(), BuildError> {
    if ctx.ty == AlgebraType::A {
        Ok(())
    } else {
        Err(BuildError::WrongType("the Δ recursion", AlgebraType::A))
    }
}

/// `Δ^{(0)}, …, Δ^{(amax)}` for the index `i`, by the defining recursion.
pub fn delta_series(
    ctx: &AlgebraContext,
    i: usize,
    amax: usize,
    trunc: u32,
) -> Result<Vec<GradedSeries>, BuildError> {
    require_a(ctx)?;
    let n = ctx.rank;
    assert!(amax <= n, "a out of range");
    let q = build_q1(ctx, BoxIndex::Plain(i as u8), trunc)?;
    let mut out = vec![q.scale_monomial(&y_var(ctx, n, 2 * (n as i32 + 1)))];
    for a in 1..=amax {
        let prev = &out[a - 1];
        let ratio = ctx.x_var(n + 2 - a, 1, 1).div(&ctx.x_var(i, 1, 1));
        let diff = prev.sub(&prev.shift(-4).scale_x(&ratio));
        let node = n + 1 - a;
        out.push(diff.scale_monomial(&script_a(ctx, node, 2 * node as i32)));
    }
    Ok(out)
}

/// The closed form of `Δ^{(a)}_{i,z}`: a multi-sum for `a < n+1-i`, one at
/// `a = n+1-i`, zero beyond.
pub fn delta_closed_form(
    ctx: &AlgebraContext,
    i: usize,
    a: usize,
    trunc: u32,
) -> Result<GradedSeries, BuildError> {
    require_a(ctx)?;
    let n = ctx.rank;
    if a + i == n + 1 {
        return Ok(GradedSeries::one(*ctx, trunc));
    }
    if a + i > n + 1 {
        return Ok(GradedSeries::zero(*ctx, &ctx.x_one(), trunc));
    }
    // variables k_{i+1} … k_{n+1-a}; term height Σ_μ k_μ (μ - i)
    let last = n + 1 - a;
    let mut out = GradedSeries::zero(*ctx, &ctx.x_one(), trunc);
    let mut k = vec![0i64; last - i];
    loop {
        let height: i64 = k.iter().enumerate().map(|(p, v)| v * (p as i64 + 1)).sum();
        if height <= trunc as i64 {
            let mut m = LMonomial::one(ctx.num_x());
            let mut x = ctx.x_one();
            for j in i..=n - a {
                let kj = k[j - i];
                x = x.mul(&ctx.x_var(j + 1, 1, 1).div(&ctx.x_var(i, 1, 1)).pow(kj));
                let tail: i64 = k[j - i..].iter().sum();
                m = m.mul(&script_a(ctx, j, 2 * (j as i32 - 2 * tail as i32)).inv());
            }
            out.add_term(m.times_x(&x), BigInt::one());
        }
        // odometer over the box of heights ≤ trunc
        let mut p = 0;
        loop {
            if p == k.len() {
                return Ok(out);
            }
            k[p] += 1;
            let h: i64 = k.iter().enumerate().map(|(q, v)| v * (q as i64 + 1)).sum();
            if h <= trunc as i64 {
                break;
            }
            k[p] = 0;
            p += 1;
        }
    }
}

/// `𝒴^{-1}_{n+1-a, q^{n+1} z} det(Δ^{(μ-1)}_{j_ν, q^{-a-1+2μ} z} x_{j_ν}^{μ-1})`.
pub fn newrep_det(
    ctx: &AlgebraContext,
    j: &[BoxIndex],
    trunc: u32,
) -> Result<GradedSeries, BuildError> {
    require_a(ctx)?;
    let n = ctx.rank;
    let a = j.len();
    if a == 0 {
        return Ok(GradedSeries::one(*ctx, trunc));
    }
    let deltas: Vec<Vec<GradedSeries>> = j
        .iter()
        .map(|b| match b {
            BoxIndex::Plain(i) => delta_series(ctx, *i as usize, a - 1, trunc),
            other => Err(BuildError::InvalidIndex(*other, *ctx)),
        })
        .collect::<Result<_, _>>()?;
    let ai = a as i32;
    let rows: Vec<Vec<GradedSeries>> = (1..=ai)
        .map(|mu| {
            j.iter()
                .zip(&deltas)
                .map(|(&b, d)| {
                    d[(mu - 1) as usize]
                        .shift(2 * (-ai - 1 + 2 * mu))
                        .scale_x(&ctx.x_of(b).pow((mu - 1) as i64))
                })
                .collect()
        })
        .collect();
    let node = n + 1 - a;
    let pre = y_var(ctx, node, 2 * (n as i32 + 1)).inv();
    Ok(det(*ctx, &rows, trunc).scale_monomial(&pre))
}

/// The Wronskian matrix `det(Q^{(1)}_{ν, q^{n+2-2μ} z} x_ν^{ν-μ})` of type A.
pub fn wronskian_det(
    ctx: &AlgebraContext,
    trunc: u32,
    bank: &SeriesBank,
) -> Result<GradedSeries, BuildError> {
    require_a(ctx)?;
    let m = ctx.rank as i32 + 1;
    let rows: Vec<Vec<GradedSeries>> = (1..=m)
        .map(|mu| {
            (1..=m)
                .map(|nu| {
                    let q = bank.q1(ctx, BoxIndex::Plain(nu as u8), trunc)?;
                    Ok(q.shift(2 * (m + 1 - 2 * mu))
                        .scale_x(&ctx.x_var(nu as usize, 1, 1).pow((nu - mu) as i64)))
                })
                .collect::<Result<Vec<_>, BuildError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok(det(*ctx, &rows, trunc))
}

/// `(-1)^{n(n+1)/2} Π_{b=1}^{n} x_b^{n+1-b}`, the constant linking the
/// Wronskian matrix to the full Casorati determinant.
pub fn wronskian_constant(ctx: &AlgebraContext) -> XWeight {
    let n = ctx.rank as i64;
    let mut w = ctx.x_one();
    for b in 1..=n {
        w = w.mul(&ctx.x_var(b as usize, n + 1 - b, 1));
    }
    if (n * (n + 1) / 2) % 2 == 1 {
        w.negated()
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::parse_tuple;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn t(s: &str) -> Vec<BoxIndex> {
        parse_tuple(s).unwrap()
    }

    #[test]
    fn permutations_have_correct_signs() {
        let ps = permutations(4);
        assert_eq!(ps.len(), 24);
        for (p, s) in ps {
            let mut inv = 0;
            for a in 0..4 {
                for b in a + 1..4 {
                    if p[a] > p[b] {
                        inv += 1;
                    }
                }
            }
            assert_eq!(s, if inv % 2 == 0 { 1 } else { -1 });
        }
    }

    #[test]
    fn empty_and_duplicate() {
        let bank = SeriesBank::new();
        let ctx = AlgebraContext::b(2);
        let one = casorati(&ctx, &[], 3, 0, &bank).unwrap();
        assert_eq!(one.len(), 1);
        assert!(casorati(&ctx, &t("1,1"), 3, 0, &bank).unwrap().is_zero());
    }

    #[test]
    fn remark_b2_three_box_determinant() {
        // -x2 Y^{-1}_{1,q^4} Y^{-1}_{2,q^2} Y_{2,q^3} - Y^{-1}_{1,q^2} Y_{2,q^3} Y^{-1}_{2,q^4}
        let ctx = AlgebraContext::b(2);
        let bank = SeriesBank::new();
        let s = casorati(&ctx, &t("2,2b,1b"), 6, 0, &bank).unwrap();
        let m1 = y_product(&ctx, &[(1, 8, -1), (2, 4, -1), (2, 6, 1)]).times_x(&ctx.x_var(2, 1, 1));
        let m2 = y_product(&ctx, &[(1, 4, -1), (2, 6, 1), (2, 8, -1)]);
        assert_eq!(s.len(), 2, "{}", s.to_canonical_string());
        assert_eq!(s.coeff(&m1), BigInt::from(-1));
        assert_eq!(s.coeff(&m2), BigInt::from(-1));
    }

    #[test]
    fn leibniz_and_laplace_agree() {
        let ctx = AlgebraContext::a(3);
        let bank = SeriesBank::new();
        let j = t("1,2,3,4");
        let d = 3;
        let a = j.len() as i32;
        let rows: Vec<Vec<GradedSeries>> = (1..=a)
            .map(|mu| {
                j.iter()
                    .map(|&b| {
                        bank.q1(&ctx, b, d)
                            .unwrap()
                            .shift(2 * (-a - 1 + 2 * mu))
                            .scale_x(&ctx.x_of(b).pow((mu - 1) as i64))
                    })
                    .collect()
            })
            .collect();
        let l = det_leibniz(ctx, &rows, d);
        let c = det_laplace(ctx, &rows, d);
        assert!(l.sub(&c).is_zero());
        assert_eq!(l.truncation(), c.truncation());
    }

    #[test]
    fn delta_boundary_cases() {
        for n in 1..=3 {
            let ctx = AlgebraContext::a(n);
            for i in 1..=n + 1 {
                let ds = delta_series(&ctx, i, n, 4).unwrap();
                for (a, d) in ds.iter().enumerate() {
                    if a + i == n + 1 {
                        assert_eq!(d.len(), 1);
                        assert!(d.terms().next().unwrap().0.is_one());
                    } else if a + i > n + 1 {
                        assert!(d.is_zero(), "n={n} i={i} a={a}");
                    }
                }
            }
        }
    }

    #[test]
    fn a2_delta_zero_for_last_index() {
        let ctx = AlgebraContext::a(2);
        let d = delta_series(&ctx, 3, 0, 3).unwrap();
        assert_eq!(d[0].len(), 1);
        assert!(d[0].terms().next().unwrap().0.is_one());
    }

    #[test]
    fn wronskian_constant_matches_full_casorati() {
        let bank = SeriesBank::new();
        for n in 1..=2 {
            let ctx = AlgebraContext::a(n);
            let j: Vec<BoxIndex> = (1..=n as u8 + 1).map(BoxIndex::Plain).collect();
            let c = casorati(&ctx, &j, 3, 0, &bank).unwrap();
            let w = wronskian_det(&ctx, 3, &bank).unwrap();
            let k = wronskian_constant(&ctx);
            assert!(c.sub(&w.scale_x(&k)).is_zero(), "n={n}");
            assert!(w.truncation() >= Ratio::from_integer(3));
        }
    }

    #[test]
    fn delta_recursion_matches_closed_form() {
        for n in 1..=3 {
            let ctx = AlgebraContext::a(n);
            for i in 1..=n + 1 {
                let ds = delta_series(&ctx, i, n, 4).unwrap();
                for (a, d) in ds.iter().enumerate() {
                    let c = delta_closed_form(&ctx, i, a, 4).unwrap();
                    assert!(d.sub(&c).is_zero(), "n={n} i={i} a={a}");
                }
            }
        }
    }

    #[test]
    fn alternate_representation_matches_casorati() {
        let bank = SeriesBank::new();
        for (n, js) in [
            (2, vec!["1,2", "1,3", "2,3", "1,2,3"]),
            (3, vec!["1,3", "2,4", "1,2,4", "2,3,4"]),
        ] {
            let ctx = AlgebraContext::a(n);
            for j in js {
                let j = t(j);
                let c = casorati(&ctx, &j, 3, 0, &bank).unwrap();
                let r = newrep_det(&ctx, &j, 3).unwrap();
                assert!(c.sub(&r).is_zero(), "n={n} {j:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn column_swap_negates(which in 0usize..6, d in 0u32..3) {
            let ctx = AlgebraContext::b(2);
            let bank = SeriesBank::new();
            let idx = ctx.indices();
            let pairs: Vec<(usize, usize)> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).collect();
            let (p, q) = pairs[which % pairs.len()];
            let j1 = vec![idx[p], idx[q]];
            let j2 = vec![idx[q], idx[p]];
            let s1 = casorati(&ctx, &j1, d, 0, &bank).unwrap();
            let s2 = casorati(&ctx, &j2, d, 0, &bank).unwrap();
            prop_assert!(s1.add(&s2).is_zero());
        }
    }
}
