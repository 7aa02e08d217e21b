//! Dense univariate polynomials with coefficients given as field codes.
//!
//! Every operation takes the coefficient [`Field`] explicitly; the polynomial itself
//! is just a coefficient vector, lowest degree first, with no trailing zeros.

use super::Field;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        UniPoly::new(vec![c])
    }

    /// The monomial `t`.
    pub fn x() -> Self {
        UniPoly { coeffs: vec![0, 1] }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, f: &Field, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add_raw(f.mul_raw(acc, x), c))
    }

    pub fn add(&self, f: &Field, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
        UniPoly::new(
            (0..n)
                .map(|i| f.add_raw(get(&self.coeffs, i), get(&other.coeffs, i)))
                .collect(),
        )
    }

    pub fn sub(&self, f: &Field, other: &UniPoly) -> UniPoly {
        self.add(f, &other.neg(f))
    }

    pub fn neg(&self, f: &Field) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&c| f.neg_raw(c)).collect())
    }

    pub fn mul(&self, f: &Field, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add_raw(out[i + j], f.mul_raw(a, b));
            }
        }
        UniPoly::new(out)
    }

    pub fn scale(&self, f: &Field, c: u64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&a| f.mul_raw(a, c)).collect())
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn div_rem(&self, f: &Field, divisor: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv_raw(divisor.lead()).unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let factor = f.mul_raw(c, lead_inv);
            quot[i - dd] = factor;
            for (j, &dj) in divisor.coeffs.iter().enumerate() {
                let k = i - dd + j;
                rem[k] = f.sub_raw(rem[k], f.mul_raw(factor, dj));
            }
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn rem(&self, f: &Field, divisor: &UniPoly) -> UniPoly {
        self.div_rem(f, divisor).1
    }

    pub fn monic(&self, f: &Field) -> UniPoly {
        match f.inv_raw(self.lead()) {
            Some(inv) => self.scale(f, inv),
            None => UniPoly::zero(),
        }
    }

    /// Monic gcd; zero only if both inputs are zero.
    pub fn gcd(&self, f: &Field, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn derivative(&self, f: &Field) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| f.mul_raw(c, f.reduce_i64(i as i64)))
                .collect(),
        )
    }

    /// `self^e mod modulus`.
    pub fn pow_mod(&self, f: &Field, e: u128, modulus: &UniPoly) -> UniPoly {
        let mut base = self.rem(f, modulus);
        let mut acc = UniPoly::constant(1).rem(f, modulus);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, modulus);
            }
            base = base.mul(f, &base).rem(f, modulus);
            e >>= 1;
        }
        acc
    }

    /// Whether the polynomial is squarefree with nonzero leading term of the given degree.
    pub fn is_separable(&self, f: &Field) -> bool {
        match self.degree() {
            None => false,
            Some(0) => true,
            Some(_) => self.gcd(f, &self.derivative(f)).degree() == Some(0),
        }
    }
}

/// Degrees of the irreducible factors of a squarefree polynomial, ascending.
///
/// Distinct-degree splitting only: `gcd(g, t^{Q^i} - t)` collects the product of all
/// degree-`i` factors, so its degree divided by `i` is the number of such factors.
pub fn factor_degrees(f: &Field, g: &UniPoly) -> Vec<usize> {
    let q = f.size() as u128;
    let mut rest = g.monic(f);
    let mut degrees = Vec::new();
    let mut h = UniPoly::x();
    let mut i = 0;
    while let Some(d) = rest.degree() {
        if d == 0 {
            break;
        }
        i += 1;
        if 2 * i > d {
            degrees.push(d);
            break;
        }
        h = h.pow_mod(f, q, &rest);
        let common = rest.gcd(f, &h.sub(f, &UniPoly::x()));
        let cd = common.degree().unwrap_or(0);
        if cd > 0 {
            degrees.extend(std::iter::repeat(i).take(cd / i));
            rest = rest.div_rem(f, &common).0;
            h = h.rem(f, &rest);
        }
    }
    degrees.sort_unstable();
    degrees
}

/// Rabin's test over the field of coefficients.
pub fn is_irreducible(f: &Field, g: &UniPoly) -> bool {
    let n = match g.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let q = f.size() as u128;
    let x = UniPoly::x();
    // x^{q^k} mod g
    let frob_power = |k: usize| {
        let mut h = x.clone();
        for _ in 0..k {
            h = h.pow_mod(f, q, g);
        }
        h
    };
    if frob_power(n).sub(f, &x).rem(f, g) != UniPoly::zero() {
        return false;
    }
    super::prime_factors(n as u64).into_iter().all(|r| {
        let h = frob_power(n / r as usize);
        g.gcd(f, &h.sub(f, &x)).degree() == Some(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;

    fn linear_root(f: &Field, r: u64) -> UniPoly {
        UniPoly::new(vec![f.neg_raw(r), 1])
    }

    #[test]
    fn division_round_trips() {
        let f = make_field(7, 1).unwrap();
        let a = UniPoly::new(vec![3, 0, 5, 1, 6]);
        let b = UniPoly::new(vec![2, 4, 1]);
        let (q, r) = a.div_rem(&f, &b);
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(q.mul(&f, &b).add(&f, &r), a);
    }

    #[test]
    fn factor_degrees_of_products() {
        let f = make_field(5, 1).unwrap();
        // (t-1)(t-2)(t^2+2): t^2+2 is irreducible since -2 = 3 is a non-square mod 5
        let g = linear_root(&f, 1)
            .mul(&f, &linear_root(&f, 2))
            .mul(&f, &UniPoly::new(vec![2, 0, 1]));
        assert_eq!(factor_degrees(&f, &g), vec![1, 1, 2]);
        assert!(g.is_separable(&f));
        let sq = linear_root(&f, 3).mul(&f, &linear_root(&f, 3));
        assert!(!sq.is_separable(&f));
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // number of monic irreducibles of degree 4 over F_2 is (16 - 4)/4 = 3
        let f = make_field(2, 1).unwrap();
        let count = (0..16u64)
            .filter(|k| {
                let mut c: Vec<u64> = (0..4).map(|i| (k >> i) & 1).collect();
                c.push(1);
                is_irreducible(&f, &UniPoly::new(c))
            })
            .count();
        assert_eq!(count, 3);
    }

    #[test]
    fn factor_degrees_over_extension() {
        let f = make_field(2, 2).unwrap();
        // t^3 - 1 splits completely over F_4
        let g = UniPoly::new(vec![1, 0, 0, 1]);
        assert_eq!(factor_degrees(&f, &g), vec![1, 1, 1]);
    }
}
