//! Dense polynomials in `t` over the rationals, lowest degree first.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QPoly(Vec<BigRational>);

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn one() -> Self {
        QPoly(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let n = self.0.len().max(other.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &QPoly) -> QPoly {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut v = vec![BigRational::zero(); k];
        v.extend(self.0.iter().cloned());
        QPoly(v)
    }

    pub fn truncate(&self, len: usize) -> QPoly {
        QPoly::new(self.0.iter().take(len).cloned().collect())
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let f = &rem[i] / &lead;
            for (j, c) in d.0.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = &rem[k] - &f * c;
            }
            quot[i - dd] = f;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        match a.0.last() {
            Some(l) => a.scale(&l.recip()),
            None => a,
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Integer coefficients after scaling by `factor` (which must clear denominators).
    pub fn integer_coeffs(&self, factor: &BigRational) -> Vec<BigInt> {
        self.0
            .iter()
            .map(|c| {
                let v = c * factor;
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect()
    }
}

/// Formats integer coefficients as a polynomial in `t`, lowest degree first.
pub fn format_int_poly(coeffs: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let abs = c.abs();
        let body = match i {
            0 => abs.to_string(),
            _ => {
                let mono = if i == 1 { "t".to_string() } else { format!("t^{i}") };
                if abs.is_one() {
                    mono
                } else {
                    format!("{abs}*{mono}")
                }
            }
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = BigRational::from_integer(self.denominator_lcm());
        if l.is_one() {
            write!(f, "{}", format_int_poly(&self.integer_coeffs(&l)))
        } else {
            write!(f, "({})/{}", format_int_poly(&self.integer_coeffs(&l)), l)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_and_division() {
        // (1 - t)(1 - 3t) and (1 - t)(2 + t)
        let a = QPoly::from_ints(&[1, -1]).mul(&QPoly::from_ints(&[1, -3]));
        let b = QPoly::from_ints(&[1, -1]).mul(&QPoly::from_ints(&[2, 1]));
        assert_eq!(a.gcd(&b), QPoly::from_ints(&[-1, 1]));
        let (q, r) = a.div_rem(&QPoly::from_ints(&[1, -1]));
        assert!(r.is_zero());
        assert_eq!(q, QPoly::from_ints(&[1, -3]));
    }

    #[test]
    fn printing() {
        assert_eq!(QPoly::from_ints(&[0, 4, -6]).to_string(), "4*t - 6*t^2");
        assert_eq!(QPoly::from_ints(&[1, -1]).to_string(), "1 - t");
        assert_eq!(QPoly::zero().to_string(), "0");
        let half = QPoly::new(vec![BigRational::new(1.into(), 2.into())]);
        assert_eq!(half.to_string(), "(1)/2");
    }
}
