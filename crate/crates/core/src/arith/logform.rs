//! Logarithmic 1-forms `f(x) dx` and their residues, including at infinity.

use num_traits::Zero;

use super::point::ProjPoint;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::rational::Rational;
use crate::error::{Error, Result};

/// A 1-form `f dx` with simple poles contained in a fixed pole set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogForm {
    value: RatFunc,
}

impl LogForm {
    /// Validates that every pole of `f dx` is simple and lies in `allowed`.
    pub fn new(value: RatFunc, allowed: &[ProjPoint]) -> Result<Self> {
        if !value.is_zero() {
            let at_inf = form_pole_order_at_infinity(&value);
            if at_inf > 1 {
                return Err(Error::NotLogarithmic("inf".into()));
            }
            if at_inf == 1 && !allowed.contains(&ProjPoint::Infinity) {
                return Err(Error::PoleOutsideDivisor("inf".into()));
            }
            for (root, mult) in finite_poles(value.den()) {
                let p = ProjPoint::Finite(root);
                if mult > 1 {
                    return Err(Error::NotLogarithmic(p.to_string()));
                }
                if !allowed.contains(&p) {
                    return Err(Error::PoleOutsideDivisor(p.to_string()));
                }
            }
        }
        Ok(LogForm { value })
    }

    pub fn value(&self) -> &RatFunc {
        &self.value
    }

    pub fn residue(&self, p: &ProjPoint) -> Result<Rational> {
        residue(&self.value, p)
    }

    /// Pole order of the form (not the function) at `p`.
    pub fn pole_order(&self, p: &ProjPoint) -> Result<i64> {
        if self.value.is_zero() {
            return Err(Error::OrderUndefined);
        }
        Ok(match p {
            ProjPoint::Finite(_) => self.value.pole_order(p)?,
            ProjPoint::Infinity => form_pole_order_at_infinity(&self.value),
        })
    }
}

/// Pole order of `f dx` at infinity: in `w = 1/x`, `dx = -dw/w^2`.
pub fn form_pole_order_at_infinity(f: &RatFunc) -> i64 {
    f.num().deg() - f.den().deg() + 2
}

/// Residue of `f dx` at `p`; fails on poles of order two or more.
pub fn residue(f: &RatFunc, p: &ProjPoint) -> Result<Rational> {
    if f.is_zero() {
        return Ok(Rational::zero());
    }
    match p {
        ProjPoint::Finite(a) => match f.den().root_multiplicity(a) {
            0 => Ok(Rational::zero()),
            1 => {
                let rest = f.den().exact_div(&Poly::linear(a))?;
                Ok(f.num().eval(a) / rest.eval(a))
            }
            _ => Err(Error::NotLogarithmic(p.to_string())),
        },
        ProjPoint::Infinity => match form_pole_order_at_infinity(f) {
            o if o <= 0 => Ok(Rational::zero()),
            1 => Ok(-(f.num().leading() / f.den().leading())),
            _ => Err(Error::NotLogarithmic("inf".into())),
        },
    }
}

/// Rational roots of `den` with multiplicity. Irrational roots are ignored;
/// every denominator built in this crate splits over the rationals.
fn finite_poles(den: &Poly) -> Vec<(Rational, usize)> {
    rational_roots(den)
        .into_iter()
        .map(|r| {
            let m = den.root_multiplicity(&r);
            (r, m)
        })
        .collect()
}

/// Distinct rational roots of a nonzero polynomial, by the rational root
/// theorem applied to the primitive integer multiple.
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{One, Signed};

    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = p.clone();
    // Strip roots at zero first.
    if cur.coeff(0).is_zero() {
        out.push(Rational::zero());
        while cur.coeff(0).is_zero() {
            cur = cur.exact_div(&Poly::x()).expect("x divides");
        }
    }
    if cur.degree().unwrap_or(0) == 0 {
        return out;
    }
    let den = super::rational::common_denominator(cur.coeffs());
    let ints: Vec<BigInt> = cur
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let a0 = ints[0].abs();
    let an = ints.last().unwrap().abs();
    let divisors = |n: &BigInt| -> Vec<BigInt> {
        let mut v = Vec::new();
        let mut k = BigInt::one();
        while &k * &k <= *n {
            if (n % &k).is_zero() {
                v.push(k.clone());
                let o = n / &k;
                if o != k {
                    v.push(o);
                }
            }
            k += 1;
        }
        v
    };
    for num in divisors(&a0) {
        for dd in divisors(&an) {
            if !num.gcd(&dd).is_one() {
                continue;
            }
            for sign in [1, -1] {
                let r = Rational::new(&num * BigInt::from(sign), dd.clone());
                if !out.contains(&r) && cur.eval(&r).is_zero() {
                    out.push(r);
                }
            }
        }
    }
    out
}
