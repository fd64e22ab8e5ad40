//! Signed monomials `±x^e` in the formal x-variables.
//!
//! Exponents are rational. They are stored as integer numerators over the
//! fixed scale [`XDEN`], which keeps arithmetic exact and hashing cheap.

use num_rational::Ratio;
use smallvec::SmallVec;
use std::fmt;

/// Common denominator for all stored exponents (lcm of 1..=16).
pub const XDEN: i64 = 720_720;

pub type Exps = SmallVec<[i64; 8]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct XWeight {
    exps: Exps,
    sign: i8,
}

impl XWeight {
    pub fn one(len: usize) -> Self {
        XWeight {
            exps: SmallVec::from_elem(0, len),
            sign: 1,
        }
    }

    /// `x_var^(num/den)`.
    pub fn var(len: usize, var: usize, num: i64, den: i64) -> Self {
        let mut w = Self::one(len);
        w.exps[var] = scale(num, den);
        w
    }

    pub fn from_ratios(exps: &[Ratio<i64>]) -> Self {
        XWeight {
            exps: exps.iter().map(|r| scale(*r.numer(), *r.denom())).collect(),
            sign: 1,
        }
    }

    pub fn from_scaled(exps: Exps) -> Self {
        XWeight { exps, sign: 1 }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn scaled(&self) -> &[i64] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> Ratio<i64> {
        Ratio::new(self.exps[i], XDEN)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_one(&self) -> bool {
        self.sign == 1 && self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_unit_monomial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn negated(&self) -> Self {
        XWeight {
            exps: self.exps.clone(),
            sign: -self.sign,
        }
    }

    pub fn unsigned(&self) -> Self {
        XWeight {
            exps: self.exps.clone(),
            sign: 1,
        }
    }

    pub fn mul(&self, other: &XWeight) -> XWeight {
        assert_eq!(self.len(), other.len(), "weight length mismatch");
        XWeight {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
            sign: self.sign * other.sign,
        }
    }

    pub fn inv(&self) -> XWeight {
        XWeight {
            exps: self.exps.iter().map(|e| -e).collect(),
            sign: self.sign,
        }
    }

    pub fn div(&self, other: &XWeight) -> XWeight {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> XWeight {
        XWeight {
            exps: self.exps.iter().map(|e| e * k).collect(),
            sign: if k % 2 == 0 { 1 } else { self.sign },
        }
    }

    /// Rational power. Only defined for positive monomials.
    pub fn pow_ratio(&self, p: Ratio<i64>) -> XWeight {
        if p.is_integer() {
            return self.pow(*p.numer());
        }
        assert_eq!(self.sign, 1, "fractional power of a negative monomial");
        XWeight {
            exps: self
                .exps
                .iter()
                .map(|&e| {
                    let num = e * p.numer();
                    assert_eq!(num % p.denom(), 0, "exponent leaves the scale");
                    num / p.denom()
                })
                .collect(),
            sign: 1,
        }
    }

    /// Least common denominator of the exponents.
    pub fn denominator_lcm(&self) -> i64 {
        self.exps.iter().fold(1, |acc, &e| {
            let d = *Ratio::new(e, XDEN).denom();
            num_integer::lcm(acc, d)
        })
    }

    pub(crate) fn exps_mut(&mut self) -> &mut Exps {
        &mut self.exps
    }
}

fn scale(num: i64, den: i64) -> i64 {
    assert!(
        den != 0 && XDEN % den == 0,
        "denominator {den} not supported"
    );
    num * (XDEN / den)
}

impl fmt::Display for XWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign < 0 {
            write!(f, "-")?;
        }
        let mut any = false;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if any {
                write!(f, " ")?;
            }
            any = true;
            let r = Ratio::new(e, XDEN);
            if r == Ratio::from_integer(1) {
                write!(f, "x{}", i + 1)?;
            } else if r.is_integer() {
                write!(f, "x{}^{}", i + 1, r.numer())?;
            } else {
                write!(f, "x{}^({}/{})", i + 1, r.numer(), r.denom())?;
            }
        }
        if !any {
            write!(f, "1")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_powers_are_exact() {
        let w = XWeight::var(2, 0, 1, 1).mul(&XWeight::var(2, 1, -3, 1));
        let h = w.pow_ratio(Ratio::new(1, 2));
        assert_eq!(h.exponent(0), Ratio::new(1, 2));
        assert_eq!(h.exponent(1), Ratio::new(-3, 2));
        assert_eq!(h.mul(&h), w);
        assert_eq!(h.denominator_lcm(), 2);
    }

    #[test]
    fn sign_follows_products() {
        let a = XWeight::var(3, 2, 1, 1).negated();
        assert_eq!(a.mul(&a).sign(), 1);
        assert_eq!(a.pow(3).sign(), -1);
        assert_eq!(a.inv().sign(), -1);
        assert!(a.mul(&a.inv()).is_unit_monomial());
    }

    #[test]
    fn display() {
        let w = XWeight::var(3, 0, 1, 1).mul(&XWeight::var(3, 2, -1, 2));
        assert_eq!(w.to_string(), "x1 x3^(-1/2)");
        assert_eq!(XWeight::one(2).negated().to_string(), "-1");
    }
}
