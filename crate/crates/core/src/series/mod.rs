//! Rational generating functions: recurrence fitting, zeta functions and the
//! logarithmic-derivative identity `t Z'/Z = P`.

mod qpoly;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use qpoly::{format_int_poly, QPoly};

/// Spare coefficients required beyond the `2L` consumed by Berlekamp-Massey.
pub const DEFAULT_MARGIN: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("empty sequence")]
    Empty,
    #[error("series known to order {got}, order {needed} requested")]
    TooShort { needed: usize, got: usize },
    #[error("zeta series must have constant term 1, found {0}")]
    ZetaConstant(BigRational),
}

/// `numerator / denominator` with `denominator(0) = 1` and coprime parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    numerator: QPoly,
    denominator: QPoly,
}

impl RationalFunction {
    /// Panics if the denominator vanishes at `t = 0`.
    pub fn new(numerator: QPoly, denominator: QPoly) -> Self {
        let c0 = denominator.coeff(0);
        assert!(!c0.is_zero(), "denominator must be invertible at t = 0");
        let g = numerator.gcd(&denominator);
        let (mut n, mut d) = if g.is_zero() || g.degree() == Some(0) {
            (numerator, denominator)
        } else {
            (numerator.div_rem(&g).0, denominator.div_rem(&g).0)
        };
        if n.is_zero() {
            d = QPoly::one();
        }
        let s = d.coeff(0).recip();
        n = n.scale(&s);
        d = d.scale(&s);
        RationalFunction {
            numerator: n,
            denominator: d,
        }
    }

    pub fn zero() -> Self {
        RationalFunction::new(QPoly::zero(), QPoly::one())
    }

    pub fn numerator(&self) -> &QPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &QPoly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Power-series coefficients of `t^0 .. t^{len-1}`.
    pub fn expand(&self, len: usize) -> Vec<BigRational> {
        let d = self.denominator.coeffs();
        let mut out: Vec<BigRational> = Vec::with_capacity(len);
        for i in 0..len {
            let mut c = self.numerator.coeff(i);
            for j in 1..d.len().min(i + 1) {
                c -= &d[j] * &out[i - j];
            }
            out.push(c);
        }
        out
    }

    /// `deg(numerator) + deg(denominator)`, with the zero function at degree 0.
    pub fn total_degree(&self) -> usize {
        match self.numerator.degree() {
            None => 0,
            Some(n) => n + self.denominator.degree().unwrap_or(0),
        }
    }

    pub fn is_proper(&self) -> bool {
        self.numerator.degree().unwrap_or(0) <= self.denominator.degree().unwrap_or(0)
    }

    /// Numerator and denominator scaled to coprime integer coefficients with
    /// positive constant term in the denominator.
    pub fn integer_parts(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let l = self
            .numerator
            .denominator_lcm()
            .lcm(&self.denominator.denominator_lcm());
        let l = BigRational::from_integer(l);
        let mut n = self.numerator.integer_coeffs(&l);
        let mut d = self.denominator.integer_coeffs(&l);
        let content = n
            .iter()
            .chain(d.iter())
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !content.is_zero() && !content.is_one() {
            n.iter_mut().for_each(|c| *c /= &content);
            d.iter_mut().for_each(|c| *c /= &content);
        }
        (n, d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_parts();
        if d.len() == 1 && d[0].is_one() {
            return write!(f, "{}", format_int_poly(&n));
        }
        write!(f, "({})/({})", format_int_poly(&n), format_int_poly(&d))
    }
}

/// Outcome of fitting a rational function to `a_1, a_2, ..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFit {
    /// `P(t) = sum a_m t^m`, or `None` when there are too few spare coefficients.
    pub result: Option<RationalFunction>,
    /// Linear complexity of the sequence as found by Berlekamp-Massey.
    pub recurrence_order: usize,
    pub coefficients_used: usize,
    pub margin: usize,
}

impl SeriesFit {
    pub fn is_fit(&self) -> bool {
        self.result.is_some()
    }

    pub fn spare(&self) -> usize {
        self.coefficients_used.saturating_sub(2 * self.recurrence_order)
    }
}

/// Berlekamp-Massey over the rationals: returns the connection polynomial
/// `C(t) = 1 + c_1 t + ..` and the linear complexity `L`.
pub fn berlekamp_massey(s: &[BigRational]) -> (QPoly, usize) {
    let mut c = QPoly::one();
    let mut b = QPoly::one();
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut last = BigRational::one();
    for n in 0..s.len() {
        let mut disc = s[n].clone();
        for i in 1..=l {
            disc += c.coeff(i) * &s[n - i];
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let factor = &disc / &last;
        let next = c.sub(&b.scale(&factor).shift(shift));
        if 2 * l <= n {
            b = c;
            l = n + 1 - l;
            last = disc;
            shift = 1;
        } else {
            shift += 1;
        }
        c = next;
    }
    (c, l)
}

pub fn fit_rational(seq: &[BigInt]) -> Result<SeriesFit, SeriesError> {
    fit_rational_with_margin(seq, DEFAULT_MARGIN)
}

pub fn fit_rational_with_margin(seq: &[BigInt], margin: usize) -> Result<SeriesFit, SeriesError> {
    let q: Vec<BigRational> = seq.iter().cloned().map(BigRational::from_integer).collect();
    fit_rational_q(&q, margin)
}

/// Fits `P(t) = sum_{m>=1} a_m t^m` to rational `a_1 .. a_N`.
pub fn fit_rational_q(seq: &[BigRational], margin: usize) -> Result<SeriesFit, SeriesError> {
    if seq.is_empty() {
        return Err(SeriesError::Empty);
    }
    let (c, l) = berlekamp_massey(seq);
    let mut fit = SeriesFit {
        result: None,
        recurrence_order: l,
        coefficients_used: seq.len(),
        margin,
    };
    if seq.len() < 2 * l + margin {
        return Ok(fit);
    }
    let a = QPoly::new(seq.to_vec());
    let num = c.mul(&a).truncate(l).shift(1);
    let r = RationalFunction::new(num, c);
    let expanded = r.expand(seq.len() + 1);
    if expanded[0].is_zero() && expanded[1..] == *seq {
        fit.result = Some(r);
    }
    Ok(fit)
}

/// Coefficients `z_0 .. z_order` of `Z = exp(sum p_m t^m / m)`, where `p[0] = p_1`.
pub fn zeta_from_poincare(p: &[BigRational], order: usize) -> Result<Vec<BigRational>, SeriesError> {
    if p.len() < order {
        return Err(SeriesError::TooShort {
            needed: order,
            got: p.len(),
        });
    }
    let mut z = vec![BigRational::one()];
    for n in 1..=order {
        let mut acc = BigRational::zero();
        for i in 1..=n {
            acc += &p[i - 1] * &z[n - i];
        }
        z.push(acc / BigRational::from_integer(n.into()));
    }
    Ok(z)
}

pub fn zeta_from_integers(p: &[BigInt], order: usize) -> Result<Vec<BigRational>, SeriesError> {
    let q: Vec<BigRational> = p.iter().cloned().map(BigRational::from_integer).collect();
    zeta_from_poincare(&q, order)
}

/// Checks `t Z'(t) = P(t) Z(t)` through `t^order`. `z[0]` is the constant term,
/// `p[0]` the coefficient of `t`.
pub fn verify_log_derivative(
    z: &[BigRational],
    p: &[BigRational],
    order: usize,
) -> Result<bool, SeriesError> {
    let z0 = z.first().cloned().ok_or(SeriesError::Empty)?;
    if !z0.is_one() {
        return Err(SeriesError::ZetaConstant(z0));
    }
    let got = (z.len() - 1).min(p.len());
    if got < order {
        return Err(SeriesError::TooShort { needed: order, got });
    }
    for n in 1..=order {
        let mut rhs = BigRational::zero();
        for i in 1..=n {
            rhs += &p[i - 1] * &z[n - i];
        }
        if &z[n] * BigRational::from_integer(n.into()) != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Zeta series together with a rational fit of `Z` when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaReport {
    pub series: Vec<BigRational>,
    pub integral: bool,
    pub rational: Option<RationalFunction>,
}

pub fn zeta_report(p: &[BigRational], order: usize, margin: usize) -> Result<ZetaReport, SeriesError> {
    let series = zeta_from_poincare(p, order)?;
    let integral = series.iter().all(BigRational::is_integer);
    let rational = if order == 0 {
        Some(RationalFunction::new(QPoly::one(), QPoly::one()))
    } else {
        fit_rational_q(&series[1..], margin)?.result.map(|f| {
            let d = f.denominator().clone();
            RationalFunction::new(f.numerator().add(&d), d)
        })
    };
    Ok(ZetaReport {
        series,
        integral,
        rational,
    })
}

/// When the denominator of `P` splits as a product of distinct `(1 - q^a t)` and
/// `P` is proper, returns weights `w_a` with `a_m = sum w_a q^{a m}` for all `m >= 1`.
pub fn power_sum_form(p: &RationalFunction, q: u64) -> Option<Vec<(u32, BigRational)>> {
    let den = p.denominator();
    let deg = den.degree()?;
    if !p.is_proper() {
        return None;
    }
    if !p.numerator().coeff(0).is_zero() {
        return None;
    }
    let qb = BigRational::from_integer(q.into());
    let mut exps = Vec::new();
    let mut rest = den.clone();
    let mut a = 0u32;
    let mut root = BigRational::one();
    while exps.len() < deg {
        if root.numer().bits() > 64 * (deg as u64 + 4) {
            return None;
        }
        let factor = QPoly::new(vec![BigRational::one(), -root.clone()]);
        let (quo, rem) = rest.div_rem(&factor);
        if rem.is_zero() {
            exps.push(a);
            rest = quo;
        }
        a += 1;
        root *= &qb;
    }
    let roots: Vec<BigRational> = exps.iter().map(|&e| num_traits::pow(qb.clone(), e as usize)).collect();
    let k = roots.len();
    let coeffs = p.expand(2 * k + 2);
    // Vandermonde system in the first k coefficients.
    let mut rows: Vec<Vec<BigRational>> = (1..=k)
        .map(|m| {
            let mut row: Vec<BigRational> = roots.iter().map(|r| num_traits::pow(r.clone(), m)).collect();
            row.push(coeffs[m].clone());
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, piv);
        let inv = rows[col][col].recip();
        rows[col].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..k {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot = rows[col].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot.iter()) {
                    *x -= &f * y;
                }
            }
        }
    }
    let weights: Vec<BigRational> = rows.iter().map(|r| r[k].clone()).collect();
    for (m, c) in coeffs.iter().enumerate().skip(1) {
        let v: BigRational = weights
            .iter()
            .zip(&roots)
            .map(|(w, r)| w * num_traits::pow(r.clone(), m))
            .sum();
        if &v != c {
            return None;
        }
    }
    Some(exps.into_iter().zip(weights).filter(|(_, w)| !w.is_zero()).collect())
}

/// True when every weight in a power-sum form is an integer.
pub fn is_integer_combination(form: &[(u32, BigRational)]) -> bool {
    form.iter().all(|(_, w)| w.is_integer())
}

pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| x.into()).collect()
    }

    fn rats(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
    }

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::new(QPoly::from_ints(n), QPoly::from_ints(d))
    }

    #[test]
    fn geometric_sequence() {
        let fit = fit_rational(&ints(&[5, 25, 125, 625])).unwrap();
        let r = fit.result.unwrap();
        assert_eq!(r, rf(&[0, 5], &[1, -5]));
        assert_eq!(r.to_string(), "(5*t)/(1 - 5*t)");
        assert_eq!(fit.recurrence_order, 1);
    }

    #[test]
    fn zero_sequence_fits_zero() {
        let fit = fit_rational(&ints(&[0, 0, 0, 0])).unwrap();
        assert_eq!(fit.result.unwrap(), RationalFunction::zero());
        assert_eq!(fit.recurrence_order, 0);
    }

    #[test]
    fn two_roots_need_margin() {
        // 3^m + 1: order 2, five terms leave one spare coefficient.
        let seq = ints(&[4, 10, 28, 82, 244]);
        let strict = fit_rational(&seq).unwrap();
        assert!(strict.result.is_none());
        assert_eq!(strict.recurrence_order, 2);
        let loose = fit_rational_with_margin(&seq, 1).unwrap();
        let r = loose.result.unwrap();
        assert_eq!(r, rf(&[0, 4, -6], &[1, -4, 3]));
        assert_eq!(r.total_degree(), 4);
        let six = fit_rational(&ints(&[4, 10, 28, 82, 244, 730])).unwrap();
        assert_eq!(six.result.unwrap(), r);
    }

    #[test]
    fn total_degrees() {
        assert_eq!(rf(&[0, 5], &[1, -5]).total_degree(), 2);
        assert_eq!(RationalFunction::zero().total_degree(), 0);
        assert_eq!(rf(&[0, 4, -6], &[1, -4, 3]).total_degree(), 4);
        assert_eq!(rf(&[1], &[1, -1, 1]).total_degree(), 2);
    }

    #[test]
    fn fit_with_transient() {
        // a_1 = 7 then 2^m: recurrence order exceeds the denominator degree.
        let seq = ints(&[7, 4, 8, 16, 32, 64, 128]);
        let fit = fit_rational(&seq).unwrap();
        let r = fit.result.unwrap();
        assert_eq!(r.denominator().degree(), Some(1));
        assert_eq!(fit.recurrence_order, 2);
        let e = r.expand(8);
        assert_eq!(&e[1..], rats(&[7, 4, 8, 16, 32, 64, 128]).as_slice());
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(fit_rational(&[]), Err(SeriesError::Empty));
    }

    #[test]
    fn zeta_of_affine_line() {
        // P = 5t/(1-5t) so Z = 1/(1-5t).
        let z = zeta_from_integers(&ints(&[5, 25, 125, 625]), 4).unwrap();
        assert_eq!(z, rats(&[1, 5, 25, 125, 625]));
    }

    #[test]
    fn zeta_of_two_points_plus_line() {
        let p = rats(&[4, 10, 28, 82, 244, 730]);
        let rep = zeta_report(&p, 6, DEFAULT_MARGIN).unwrap();
        assert!(rep.integral);
        // 1/((1-t)(1-3t))
        assert_eq!(rep.series, rats(&[1, 4, 13, 40, 121, 364, 1093]));
        assert_eq!(rep.rational, Some(rf(&[1], &[1, -4, 3])));
    }

    #[test]
    fn zeta_with_half_weights() {
        // (3^m + 1)/2: Z^2 = 1/((1-t)(1-3t)).
        let p = rats(&[2, 5, 14, 41, 122, 365]);
        let z = zeta_from_poincare(&p, 6).unwrap();
        assert!(!z.iter().all(BigRational::is_integer));
        let mut sq = vec![BigRational::zero(); 7];
        for i in 0..7 {
            for j in 0..7 - i {
                sq[i + j] += &z[i] * &z[j];
            }
        }
        assert_eq!(sq, rats(&[1, 4, 13, 40, 121, 364, 1093]));
    }

    #[test]
    fn log_derivative_identity() {
        let z = rats(&[1, 5, 25, 125, 625, 3125, 15625, 78125, 390625, 1953125, 9765625]);
        let p = rats(&[5, 25, 125, 625, 3125, 15625, 78125, 390625, 1953125, 9765625]);
        assert_eq!(verify_log_derivative(&z, &p, 10), Ok(true));
        let q = rats(&[5, 20, 80, 320]);
        assert_eq!(verify_log_derivative(&z, &q, 3), Ok(false));
        assert!(matches!(
            verify_log_derivative(&rats(&[2, 1]), &q, 1),
            Err(SeriesError::ZetaConstant(_))
        ));
        assert!(matches!(
            verify_log_derivative(&z, &q, 5),
            Err(SeriesError::TooShort { needed: 5, got: 4 })
        ));
    }

    #[test]
    fn power_sums() {
        let r = rf(&[0, 4, -6], &[1, -4, 3]);
        let form = power_sum_form(&r, 3).unwrap();
        let one = BigRational::one();
        assert_eq!(form, vec![(0, one.clone()), (1, one)]);
        assert!(is_integer_combination(&form));
        let half = fit_rational(&ints(&[2, 5, 14, 41, 122, 365])).unwrap().result.unwrap();
        let form = power_sum_form(&half, 3).unwrap();
        assert!(!is_integer_combination(&form));
        assert!(power_sum_form(&rf(&[0, 1], &[1, -2]), 3).is_none());
    }

    proptest! {
        #[test]
        fn fit_reproduces_sums_of_powers(
            ws in proptest::collection::vec(-5i64..6, 1..4),
            extra in 0usize..3,
        ) {
            let q = 3i64;
            let n = 2 * ws.len() + DEFAULT_MARGIN + extra;
            let seq: Vec<BigInt> = (1..=n as u32)
                .map(|m| ws.iter().enumerate().map(|(a, w)| BigInt::from(*w) * BigInt::from(q).pow(a as u32 * m)).sum())
                .collect();
            let fit = fit_rational(&seq).unwrap();
            let nonzero = ws.iter().filter(|w| **w != 0).count();
            prop_assert_eq!(fit.recurrence_order, nonzero);
            let r = fit.result.unwrap();
            let e = r.expand(n + 1);
            prop_assert!(e[0].is_zero());
            for (x, y) in e[1..].iter().zip(&seq) {
                prop_assert_eq!(x, &BigRational::from_integer(y.clone()));
            }
            let z = zeta_from_integers(&seq, n).unwrap();
            let p: Vec<BigRational> = seq.iter().cloned().map(BigRational::from_integer).collect();
            prop_assert_eq!(verify_log_derivative(&z, &p, n), Ok(true));
            prop_assert!(z.iter().all(BigRational::is_integer));
        }
    }
}
