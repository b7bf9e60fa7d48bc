//! Rational functions `num / den` in lowest terms with a monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::point::ProjPoint;
use super::poly::Poly;
use super::rational::{format_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Reduces `num / den`. Fails on a zero denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(RatFunc::zero());
        }
        let g = num.gcd(&den);
        let num = num.exact_div(&g)?;
        let den = den.exact_div(&g)?;
        let lc = den.leading();
        let inv = Rational::one() / lc;
        Ok(RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    /// `c / (x - p)`.
    pub fn simple_pole(c: Rational, p: &Rational) -> Self {
        RatFunc::new(Poly::constant(c), Poly::linear(p)).expect("nonzero denominator")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Polynomial view, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&Poly> {
        (self.den.degree() == Some(0)).then_some(&self.num)
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        RatFunc::new(&self.num * p, self.den.clone()).expect("denominator is nonzero")
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn inverse(&self) -> Result<RatFunc> {
        RatFunc::one().checked_div(self)
    }

    pub fn derivative(&self) -> RatFunc {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFunc::new(n, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Value at a finite point, or `None` at a pole.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// Pole order at `p`: positive for poles, zero where regular and nonzero,
    /// negative for zeros. At infinity this is `deg num - deg den`.
    pub fn pole_order(&self, p: &ProjPoint) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::OrderUndefined);
        }
        Ok(match p {
            ProjPoint::Finite(a) => {
                self.den.root_multiplicity(a) as i64 - self.num.root_multiplicity(a) as i64
            }
            ProjPoint::Infinity => self.num.deg() - self.den.deg(),
        })
    }

    /// Value at infinity when the function is regular there.
    pub fn value_at_infinity(&self) -> Option<Rational> {
        match self.num.deg().cmp(&self.den.deg()) {
            std::cmp::Ordering::Less => Some(Rational::zero()),
            std::cmp::Ordering::Equal => Some(self.num.leading() / self.den.leading()),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Value at a point of P^1, `None` at a pole.
    pub fn value_at(&self, p: &ProjPoint) -> Option<Rational> {
        match p {
            ProjPoint::Finite(a) => self.eval(a),
            ProjPoint::Infinity => self.value_at_infinity(),
        }
    }

    /// Leading Laurent coefficient at `p` together with the pole order:
    /// `f = c * (x - p)^(-m) + ...` (at infinity, `f = c * x^m + ...`).
    pub fn leading_term(&self, p: &ProjPoint) -> Result<(i64, Rational)> {
        let m = self.pole_order(p)?;
        let c = match p {
            ProjPoint::Finite(a) => {
                let lin = Poly::linear(a);
                let nm = self.num.root_multiplicity(a);
                let dm = self.den.root_multiplicity(a);
                let n = (0..nm).fold(self.num.clone(), |acc, _| acc.exact_div(&lin).unwrap());
                let d = (0..dm).fold(self.den.clone(), |acc, _| acc.exact_div(&lin).unwrap());
                n.eval(a) / d.eval(a)
            }
            ProjPoint::Infinity => self.num.leading() / self.den.leading(),
        };
        Ok((m, c))
    }

    /// Evaluates `x^k * f` at infinity, where `k` is chosen by the caller so
    /// the product is regular; returns `None` if it is not.
    pub fn scaled_value_at_infinity(&self, k: i64) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let order = self.num.deg() - self.den.deg() + k;
        match order.cmp(&0) {
            std::cmp::Ordering::Less => Some(Rational::zero()),
            std::cmp::Ordering::Equal => Some(self.num.leading() / self.den.leading()),
            std::cmp::Ordering::Greater => None,
        }
    }

    /// Multiplies by `x^k` for any integer `k`.
    pub fn mul_x_pow(&self, k: i64) -> RatFunc {
        if k >= 0 {
            self.mul_poly(&Poly::monomial(Rational::one(), k as usize))
        } else {
            RatFunc::new(
                self.num.clone(),
                &self.den * &Poly::monomial(Rational::one(), (-k) as usize),
            )
            .expect("nonzero denominator")
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).unwrap();
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .unwrap()
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).unwrap()
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

/// Parses `"num/den"` or a bare polynomial in `x`, where each side is a sum
/// of terms `c`, `c*x`, `c*x^k`, `x`, `x^k` with rational `c`, optionally
/// wrapped in parentheses.
pub fn parse_ratfunc(s: &str) -> Result<RatFunc> {
    let s = s.trim();
    let (n, d) = split_top_level_slash(s);
    let num = parse_poly_expr(n)?;
    let den = match d {
        Some(d) => parse_poly_expr(d)?,
        None => Poly::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    RatFunc::new(num, den)
}

/// Formats a rational function as `"(num)/(den)"` with the polynomial
/// syntax accepted by `parse_ratfunc`.
pub fn format_ratfunc(f: &RatFunc) -> String {
    let n = format_poly_expr(f.num());
    if f.den().degree() == Some(0) {
        n
    } else {
        format!("({})/({})", n, format_poly_expr(f.den()))
    }
}

fn format_poly_expr(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| {
            let cs = format_rational(c);
            match k {
                0 => cs,
                1 => format!("{cs}*x"),
                _ => format!("{cs}*x^{k}"),
            }
        })
        .collect();
    terms.join(" + ")
}

fn split_top_level_slash(s: &str) -> (&str, Option<&str>) {
    // A slash inside a coefficient like "3/4*x" is not a top-level split;
    // the quotient form requires parentheses around both sides.
    let t = s.trim();
    if t.starts_with('(') {
        let mut depth = 0;
        for (i, ch) in t.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        let rest = t[i + 1..].trim_start();
                        if let Some(r) = rest.strip_prefix('/') {
                            return (&t[..=i], Some(r));
                        }
                        break;
                    }
                }
                _ => {}
            }
        }
    }
    (t, None)
}

fn parse_poly_expr(s: &str) -> Result<Poly> {
    let mut t = s.trim();
    while t.starts_with('(') && t.ends_with(')') {
        t = t[1..t.len() - 1].trim();
    }
    let bad = || Error::Parse(format!("malformed polynomial {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let cleaned = t.replace(' ', "");
    // Split into signed terms, keeping '-' attached to the term.
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in cleaned.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') && !cur.is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        if ch != '+' {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        terms.push(cur);
    }
    let mut acc = Poly::zero();
    for term in terms {
        let (coef, power) = match term.find('x') {
            None => (term.as_str(), 0usize),
            Some(pos) => {
                let c = term[..pos].trim_end_matches('*');
                let rest = &term[pos + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .ok_or_else(bad)?
                        .parse::<usize>()
                        .map_err(|_| bad())?
                };
                (c, k)
            }
        };
        let c = match coef {
            "" => Rational::one(),
            "-" => -Rational::one(),
            c => super::rational::parse_rational(c).map_err(|_| bad())?,
        };
        acc = &acc + &Poly::monomial(c, power);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, q};

    fn inv_lin(p: i64) -> RatFunc {
        RatFunc::simple_pole(int(1), &int(p))
    }

    #[test]
    fn sum_of_simple_fractions_uses_common_denominator() {
        // 1/x + 1/(x-1) = (2x-1)/(x(x-1))
        let s = &inv_lin(0) + &inv_lin(1);
        let expected = RatFunc::new(
            Poly::new(vec![int(-1), int(2)]),
            Poly::from_roots(&[int(0), int(1)]),
        )
        .unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn products_and_quotients() {
        let f = &inv_lin(2) + &RatFunc::constant(q(1, 3));
        assert!((&f * &RatFunc::zero()).is_zero());
        assert_eq!(f.checked_div(&f).unwrap(), RatFunc::one());
        assert_eq!(f.checked_div(&RatFunc::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn pole_orders() {
        let f = RatFunc::new(Poly::one(), Poly::linear(&int(1)).pow(2)).unwrap();
        assert_eq!(f.pole_order(&ProjPoint::Finite(int(1))).unwrap(), 2);
        let cube = RatFunc::from_poly(Poly::monomial(int(1), 3));
        assert_eq!(cube.pole_order(&ProjPoint::Infinity).unwrap(), 3);
        let t = q(5, 7);
        let g = RatFunc::new(Poly::linear(&t), Poly::linear(&t)).unwrap();
        assert_eq!(g.pole_order(&ProjPoint::Finite(t)).unwrap(), 0);
        assert_eq!(
            RatFunc::zero().pole_order(&ProjPoint::Infinity),
            Err(Error::OrderUndefined)
        );
    }

    #[test]
    fn parses_and_formats() {
        let f = parse_ratfunc("(2*x + -1)/(x^2 - x)").unwrap();
        assert_eq!(f, &inv_lin(0) + &inv_lin(1));
        assert_eq!(parse_ratfunc(&format_ratfunc(&f)).unwrap(), f);
        let g = parse_ratfunc("3/4*x^2 - x + 1/2").unwrap();
        assert_eq!(g.num().coeff(2), q(3, 4));
        assert_eq!(parse_ratfunc(&format_ratfunc(&g)).unwrap(), g);
        assert!(parse_ratfunc("(1)/(0)").is_err());
        assert!(parse_ratfunc("x^").is_err());
    }

    #[test]
    fn derivative_matches_quotient_rule() {
        // d/dx 1/(x-2) = -1/(x-2)^2
        let d = inv_lin(2).derivative();
        let expected = RatFunc::new(Poly::constant(int(-1)), Poly::linear(&int(2)).pow(2)).unwrap();
        assert_eq!(d, expected);
    }
}
