//! Laurent monomials in the ℓ-weight variables `𝒴_{i,q^s z}` times an
//! x-monomial, and the standard monomials `Y_{i,z}`, `A_{i,z}` built from
//! them.
//!
//! Spectral shifts are stored in doubled units: the shift `s` stands for
//! `q^{s/2} z`.

use smallvec::SmallVec;
use std::fmt;

use crate::root_data::{AlgebraContext, AlgebraType};
use crate::weight::XWeight;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct YFactor {
    pub node: u8,
    pub shift: i32,
    pub exp: i32,
}

/// `Π 𝒴_{node, shift}^{exp} · x^e`. The x-part is always a positive monomial;
/// signs live in series coefficients.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct LMonomial {
    ys: SmallVec<[YFactor; 6]>,
    x: XWeight,
}

impl LMonomial {
    pub fn one(num_x: usize) -> Self {
        LMonomial {
            ys: SmallVec::new(),
            x: XWeight::one(num_x),
        }
    }

    pub fn from_x(x: XWeight) -> Self {
        assert_eq!(x.sign(), 1, "monomial x-part must be positive");
        LMonomial {
            ys: SmallVec::new(),
            x,
        }
    }

    pub fn from_parts(mut ys: Vec<YFactor>, x: XWeight) -> Self {
        ys.sort_by_key(|f| (f.node, f.shift));
        let mut out: SmallVec<[YFactor; 6]> = SmallVec::new();
        for f in ys {
            match out.last_mut() {
                Some(l) if l.node == f.node && l.shift == f.shift => l.exp += f.exp,
                _ => out.push(f),
            }
        }
        out.retain(|f| f.exp != 0);
        assert_eq!(x.sign(), 1);
        LMonomial { ys: out, x }
    }

    pub fn ys(&self) -> &[YFactor] {
        &self.ys
    }

    pub fn x(&self) -> &XWeight {
        &self.x
    }

    pub fn is_one(&self) -> bool {
        self.ys.is_empty() && self.x.is_unit_monomial()
    }

    pub fn y_part(&self) -> LMonomial {
        LMonomial {
            ys: self.ys.clone(),
            x: XWeight::one(self.x.len()),
        }
    }

    pub fn mul(&self, other: &LMonomial) -> LMonomial {
        let mut ys: SmallVec<[YFactor; 6]> =
            SmallVec::with_capacity(self.ys.len() + other.ys.len());
        let (a, b) = (&self.ys, &other.ys);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a =
                j >= b.len() || (i < a.len() && (a[i].node, a[i].shift) < (b[j].node, b[j].shift));
            let take_b =
                i >= a.len() || (j < b.len() && (b[j].node, b[j].shift) < (a[i].node, a[i].shift));
            if take_a {
                ys.push(a[i]);
                i += 1;
            } else if take_b {
                ys.push(b[j]);
                j += 1;
            } else {
                let e = a[i].exp + b[j].exp;
                if e != 0 {
                    ys.push(YFactor { exp: e, ..a[i] });
                }
                i += 1;
                j += 1;
            }
        }
        LMonomial {
            ys,
            x: self.x.mul(&other.x),
        }
    }

    pub fn inv(&self) -> LMonomial {
        LMonomial {
            ys: self
                .ys
                .iter()
                .map(|f| YFactor { exp: -f.exp, ..*f })
                .collect(),
            x: self.x.inv(),
        }
    }

    pub fn pow(&self, k: i32) -> LMonomial {
        if k == 0 {
            return LMonomial::one(self.x.len());
        }
        LMonomial {
            ys: self
                .ys
                .iter()
                .map(|f| YFactor {
                    exp: f.exp * k,
                    ..*f
                })
                .collect(),
            x: self.x.pow(k as i64),
        }
    }

    pub fn times_x(&self, w: &XWeight) -> LMonomial {
        LMonomial {
            ys: self.ys.clone(),
            x: self.x.mul(&w.unsigned()),
        }
    }

    /// `z ↦ q^{c/2} z`.
    pub fn shifted(&self, c: i32) -> LMonomial {
        LMonomial {
            ys: self
                .ys
                .iter()
                .map(|f| YFactor {
                    shift: f.shift + c,
                    ..*f
                })
                .collect(),
            x: self.x.clone(),
        }
    }

    /// Relabels nodes and replaces the x-part.
    pub fn relabeled(&self, perm: impl Fn(u8) -> u8, x: XWeight) -> LMonomial {
        LMonomial::from_parts(
            self.ys
                .iter()
                .map(|f| YFactor {
                    node: perm(f.node),
                    ..*f
                })
                .collect(),
            x,
        )
    }

    /// Raises every node label by one.
    pub fn node_raised(&self) -> LMonomial {
        self.relabeled(|k| k + 1, self.x.clone())
    }

    /// Total 𝒴-degree, used as a cheap sanity measure.
    pub fn y_degree(&self) -> i32 {
        self.ys.iter().map(|f| f.exp).sum()
    }
}

fn fmt_shift(s: i32) -> String {
    if s % 2 == 0 {
        format!("{}", s / 2)
    } else {
        format!("{s}/2")
    }
}

impl fmt::Display for LMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .ys
            .iter()
            .map(|y| {
                if y.exp == 1 {
                    format!("Y[{},{}]", y.node, fmt_shift(y.shift))
                } else {
                    format!("Y[{},{}]^{}", y.node, fmt_shift(y.shift), y.exp)
                }
            })
            .collect();
        if !self.x.is_unit_monomial() {
            parts.push(self.x.to_string());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// `𝒴_{node, q^{shift/2} z}`, with `𝒴_0 ≡ 1` and, in type A, `𝒴_{n+1} ≡ 1`.
pub fn y_var(ctx: &AlgebraContext, node: usize, shift: i32) -> LMonomial {
    if node == 0 || node > ctx.rank {
        assert!(
            node == 0 || (ctx.ty == AlgebraType::A && node == ctx.rank + 1),
            "node {node} out of range for {ctx}"
        );
        return LMonomial::one(ctx.num_x());
    }
    LMonomial::from_parts(
        vec![YFactor {
            node: node as u8,
            shift,
            exp: 1,
        }],
        ctx.x_one(),
    )
}

pub fn y_inv(ctx: &AlgebraContext, node: usize, shift: i32) -> LMonomial {
    y_var(ctx, node, shift).inv()
}

/// Product of `𝒴^{exp}` factors given as `(node, shift, exp)`.
pub fn y_product(ctx: &AlgebraContext, factors: &[(usize, i32, i32)]) -> LMonomial {
    factors
        .iter()
        .fold(LMonomial::one(ctx.num_x()), |acc, &(n, s, e)| {
            acc.mul(&y_var(ctx, n, s).pow(e))
        })
}

/// `Y_{i,z} = e^{ω_i} 𝒴_{i, q_i z} 𝒴^{-1}_{i, q_i^{-1} z}`.
pub fn big_y(ctx: &AlgebraContext, i: usize, shift: i32) -> LMonomial {
    let d = ctx.d2(i);
    LMonomial::from_x(ctx.omega_x(i))
        .mul(&y_var(ctx, i, shift + d))
        .mul(&y_inv(ctx, i, shift - d))
}

/// `A_{i,z}` from the Cartan data.
pub fn a_var(ctx: &AlgebraContext, i: usize, shift: i32) -> LMonomial {
    let di = ctx.d2(i);
    let mut m = big_y(ctx, i, shift - di).mul(&big_y(ctx, i, shift + di));
    for j in 1..=ctx.rank {
        if j == i {
            continue;
        }
        let dj = ctx.d2(j);
        let offsets: &[i32] = match ctx.cartan(j, i) {
            -1 => &[0],
            -2 => &[-dj, dj],
            -3 => &[-2 * dj, 0, 2 * dj],
            _ => &[],
        };
        for &o in offsets {
            m = m.mul(&big_y(ctx, j, shift + o).inv());
        }
    }
    m
}

pub fn a_inv(ctx: &AlgebraContext, i: usize, shift: i32) -> LMonomial {
    a_var(ctx, i, shift).inv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn a_carries_alpha() {
        for ctx in [
            AlgebraContext::a(3),
            AlgebraContext::b(3),
            AlgebraContext::c(3),
            AlgebraContext::d(4),
        ] {
            for i in 1..=ctx.rank {
                assert_eq!(a_var(&ctx, i, 0).x(), &ctx.alpha_x(i), "{ctx} {i}");
            }
        }
    }

    #[test]
    fn a2_inverse_root() {
        // A_{1,z}^{-1} for A_2: e^{-α1} 𝒴_{1,q^{-2}} 𝒴^{-1}_{1,q^2} 𝒴_{2,q} 𝒴^{-1}_{2,q^{-1}}
        let ctx = AlgebraContext::a(2);
        let expect = LMonomial::from_x(ctx.alpha_x(1).inv()).mul(&y_product(
            &ctx,
            &[(1, -4, 1), (1, 4, -1), (2, 2, 1), (2, -2, -1)],
        ));
        assert_eq!(a_inv(&ctx, 1, 0), expect);
    }

    #[test]
    fn b2_short_root() {
        // c_12 = -1 and c_21 = -2 give A_2 = Y_{2,q^{-1/2}} Y_{2,q^{1/2}} Y_1^{-1}
        let ctx = AlgebraContext::b(2);
        let expect = big_y(&ctx, 2, -1)
            .mul(&big_y(&ctx, 2, 1))
            .mul(&big_y(&ctx, 1, 0).inv());
        assert_eq!(a_var(&ctx, 2, 0), expect);
        let expect1 = big_y(&ctx, 1, -2)
            .mul(&big_y(&ctx, 1, 2))
            .mul(&big_y(&ctx, 2, -1).inv())
            .mul(&big_y(&ctx, 2, 1).inv());
        assert_eq!(a_var(&ctx, 1, 0), expect1);
    }

    #[test]
    fn boundary_nodes_are_trivial() {
        let ctx = AlgebraContext::a(2);
        assert!(y_var(&ctx, 0, 5).is_one());
        assert!(y_var(&ctx, 3, 5).is_one());
    }

    #[test]
    fn display_form() {
        let ctx = AlgebraContext::c(2);
        let m = y_product(&ctx, &[(1, 1, -1), (2, 0, 1), (2, 2, 1)]);
        assert_eq!(m.to_string(), "Y[1,1/2]^-1 Y[2,0] Y[2,1]");
    }

    fn arb_mono() -> impl Strategy<Value = LMonomial> {
        proptest::collection::vec((1usize..=3, -6i32..=6, -2i32..=2), 0..6).prop_map(|fs| {
            let ctx = AlgebraContext::b(3);
            y_product(&ctx, &fs.into_iter().collect::<Vec<_>>())
        })
    }

    proptest! {
        #[test]
        fn mul_is_commutative_and_invertible(a in arb_mono(), b in arb_mono()) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert!(a.mul(&a.inv()).is_one());
            prop_assert_eq!(a.mul(&b).shifted(3), a.shifted(3).mul(&b.shifted(3)));
        }

        #[test]
        fn factors_stay_sorted(a in arb_mono(), b in arb_mono()) {
            let p = a.mul(&b);
            prop_assert!(p.ys().windows(2).all(|w| (w[0].node, w[0].shift) < (w[1].node, w[1].shift)));
            prop_assert!(p.ys().iter().all(|f| f.exp != 0));
        }
    }
}
