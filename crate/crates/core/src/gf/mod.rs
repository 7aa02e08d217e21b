//! Arithmetic in finite fields `F_{p^n}`.
//!
//! Elements are stored as a single integer *code* `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
//! where `(c_0, ..., c_{n-1})` are the coordinates in the power basis of a root of the
//! field modulus. Code order is the enumeration order used everywhere in the crate.
//!
//! Hot loops work directly on codes through the `*_raw` methods of [`Field`];
//! [`FieldElement`] is the owning, operator-overloaded wrapper for everything else.
//!
//! Fields up to [`TABLE_LIMIT`] elements carry exp/log/Zech tables, so addition and
//! multiplication are a handful of lookups. Larger fields (up to [`MAX_FIELD_SIZE`])
//! fall back to coordinate arithmetic.

pub mod poly;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

pub use poly::UniPoly;

/// Largest supported field cardinality.
pub const MAX_FIELD_SIZE: u64 = 1 << 40;
/// Characteristic bound; keeps every product of two coordinates inside a `u64`.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;
/// Fields at most this large get exp/log/Zech tables.
pub const TABLE_LIMIT: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field {p}^{n} exceeds the supported size of 2^40 elements")]
    TooLarge { p: u64, n: u32 },
    #[error("subfield degree {d} does not divide the extension degree {n}")]
    NotADivisor { d: u32, n: u32 },
    #[error("malformed field descriptor `{0}` (expected `p^n` or a prime power)")]
    BadDescriptor(String),
    #[error("coordinate vector does not describe an element of F_{p}^{n}")]
    BadCoords { p: u64, n: u32 },
}

/// A `(p, n)` pair naming the field with `p^n` elements, written `p^n` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u32,
}

impl FieldSpec {
    pub fn new(p: u64, n: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        Ok(FieldSpec { p, n })
    }

    /// Cardinality `p^n`, or `None` on overflow.
    pub fn size(&self) -> Option<u128> {
        checked_pow(self.p as u128, self.n as u64)
    }

    /// The degree-`m` extension: `F_{q^m}` for `q = p^n`.
    pub fn extension(&self, m: u32) -> FieldSpec {
        FieldSpec { p: self.p, n: self.n * m }
    }

    pub fn field(&self) -> Result<Field, FieldError> {
        make_field(self.p, self.n)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `p^n` or a bare prime power such as `9`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadDescriptor(s.to_string());
        let t = s.trim();
        if let Some((ps, ns)) = t.split_once('^') {
            let p: u64 = ps.trim().parse().map_err(|_| bad())?;
            let n: u32 = ns.trim().parse().map_err(|_| bad())?;
            return FieldSpec::new(p, n);
        }
        let q: u64 = t.parse().map_err(|_| bad())?;
        if q < 2 {
            return Err(bad());
        }
        let p = smallest_prime_factor(q);
        let mut n = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            n += 1;
        }
        if r != 1 {
            return Err(bad());
        }
        FieldSpec::new(p, n)
    }
}

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, `NO_LOG` when `1 + g^k = 0`.
    zech: Vec<u32>,
}

struct FieldInner {
    p: u64,
    n: u32,
    size: u64,
    modulus: Vec<u64>,
    pow_p: Vec<u64>,
    tables: Option<Tables>,
    primitive: OnceLock<u64>,
}

/// The finite field `F_{p^n}`. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.n == other.0.n && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.0.p)
            .field("n", &self.0.n)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.0.p, self.0.n)
    }
}

/// Builds `F_{p^n}` with the lexicographically smallest monic irreducible modulus,
/// coefficients compared lowest degree first.
///
/// Fields are cached per `(p, n)`, so repeated calls return the same object.
pub fn make_field(p: u64, n: u32) -> Result<Field, FieldError> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Field>>> = OnceLock::new();

    if !is_prime(p) || p >= MAX_CHARACTERISTIC {
        return Err(FieldError::NotPrime(p));
    }
    if n == 0 {
        return Err(FieldError::ZeroDegree);
    }
    match checked_pow(p as u128, n as u64) {
        Some(q) if q <= MAX_FIELD_SIZE as u128 => {}
        _ => return Err(FieldError::TooLarge { p, n }),
    }

    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(f.clone());
    }
    let field = if n == 1 {
        Field::prime(p)
    } else {
        let modulus = smallest_irreducible(p, n);
        Field::with_modulus(p, modulus)
    };
    cache.lock().unwrap().insert((p, n), field.clone());
    Ok(field)
}

fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    let fp = Field::prime(p);
    let n = n as usize;
    let count = p.pow(n as u32);
    // Candidate k lists (c_0, ..., c_{n-1}) with c_0 as the most significant digit;
    // c_0 = 0 means t divides the candidate, so start at c_0 = 1.
    for k in count / p..count {
        let mut coeffs = vec![0u64; n + 1];
        let mut r = k;
        for i in (0..n).rev() {
            coeffs[i] = r % p;
            r /= p;
        }
        coeffs[n] = 1;
        let f = UniPoly::new(coeffs.clone());
        if poly::is_irreducible(&fp, &f) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl Field {
    fn prime(p: u64) -> Field {
        Field(Arc::new(FieldInner {
            p,
            n: 1,
            size: p,
            modulus: vec![0, 1],
            pow_p: vec![1, p],
            tables: None,
            primitive: OnceLock::new(),
        }))
    }

    fn with_modulus(p: u64, modulus: Vec<u64>) -> Field {
        let n = (modulus.len() - 1) as u32;
        let pow_p: Vec<u64> = (0..=n).map(|i| p.pow(i)).collect();
        let size = pow_p[n as usize];
        let mut inner = FieldInner {
            p,
            n,
            size,
            modulus,
            pow_p,
            tables: None,
            primitive: OnceLock::new(),
        };
        if size <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Field(Arc::new(inner))
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.0.p, n: self.0.n }
    }

    /// Monic modulus, lowest degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// Wraps a code. Panics if the code is out of range.
    pub fn element(&self, code: u64) -> FieldElement {
        assert!(code < self.0.size, "code {code} out of range for {self}");
        FieldElement { field: self.clone(), code }
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement, FieldError> {
        let bad = FieldError::BadCoords { p: self.0.p, n: self.0.n };
        if coords.len() != self.0.n as usize || coords.iter().any(|&c| c >= self.0.p) {
            return Err(bad);
        }
        let code = coords
            .iter()
            .zip(&self.0.pow_p)
            .map(|(c, w)| c * w)
            .sum();
        Ok(self.element(code))
    }

    /// Image of an integer under `Z -> F_p -> F_{p^n}`.
    pub fn from_i64(&self, v: i64) -> FieldElement {
        self.element(self.reduce_i64(v))
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0.p as i64) as u64
    }

    pub fn reduce_bigint(&self, v: &num_bigint::BigInt) -> u64 {
        use num_integer::Integer;
        use num_traits::ToPrimitive;
        let p = num_bigint::BigInt::from(self.0.p);
        v.mod_floor(&p).to_u64().expect("residue fits in u64")
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.size).map(move |c| self.element(c))
    }

    pub fn coords_of(&self, code: u64) -> Vec<u64> {
        let p = self.0.p;
        let mut r = code;
        (0..self.0.n)
            .map(|_| {
                let d = r % p;
                r /= p;
                d
            })
            .collect()
    }

    #[inline]
    pub fn add_raw(&self, a: u64, b: u64) -> u64 {
        let f = &*self.0;
        if f.n == 1 {
            let s = a + b;
            return if s >= f.p { s - f.p } else { s };
        }
        if f.p == 2 {
            return a ^ b;
        }
        if let Some(t) = &f.tables {
            if a == 0 {
                return b;
            }
            if b == 0 {
                return a;
            }
            let order = f.size - 1;
            let la = t.log[a as usize] as u64;
            let lb = t.log[b as usize] as u64;
            let k = if lb >= la { lb - la } else { lb + order - la };
            let z = t.zech[k as usize];
            if z == NO_LOG {
                return 0;
            }
            let e = la + z as u64;
            return t.exp[(if e >= order { e - order } else { e }) as usize] as u64;
        }
        digit_add(f, a, b)
    }

    #[inline]
    pub fn neg_raw(&self, a: u64) -> u64 {
        let f = &*self.0;
        if a == 0 || f.p == 2 {
            return a;
        }
        if f.n == 1 {
            return f.p - a;
        }
        let mut r = a;
        let mut out = 0;
        for w in &f.pow_p[..f.n as usize] {
            let d = r % f.p;
            r /= f.p;
            if d != 0 {
                out += (f.p - d) * w;
            }
        }
        out
    }

    #[inline]
    pub fn sub_raw(&self, a: u64, b: u64) -> u64 {
        self.add_raw(a, self.neg_raw(b))
    }

    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        let f = &*self.0;
        if f.n == 1 {
            return a * b % f.p;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        if let Some(t) = &f.tables {
            let order = f.size - 1;
            let e = t.log[a as usize] as u64 + t.log[b as usize] as u64;
            return t.exp[(if e >= order { e - order } else { e }) as usize] as u64;
        }
        coord_mul(f, a, b)
    }

    pub fn pow_raw(&self, a: u64, e: u128) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let f = &*self.0;
        if let Some(t) = &f.tables {
            let order = (f.size - 1) as u128;
            let idx = (t.log[a as usize] as u128 * (e % order)) % order;
            return t.exp[idx as usize] as u64;
        }
        let mut base = a;
        let mut acc = 1;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv_raw(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        let f = &*self.0;
        if let Some(t) = &f.tables {
            let order = f.size - 1;
            let l = t.log[a as usize] as u64;
            return Some(t.exp[((order - l) % order) as usize] as u64);
        }
        Some(self.pow_raw(a, f.size as u128 - 2))
    }

    /// `a^(p^k)`, applying the p-power map `k mod n` times.
    pub fn frobenius_raw(&self, a: u64, k: u64) -> u64 {
        let mut x = a;
        for _ in 0..(k % self.0.n as u64) {
            x = self.pow_raw(x, self.0.p as u128);
        }
        x
    }

    /// A generator of the multiplicative group (smallest by code).
    pub fn primitive_element(&self) -> u64 {
        *self.0.primitive.get_or_init(|| {
            if let Some(t) = &self.0.tables {
                return t.exp[1] as u64;
            }
            find_primitive(self.0.size, |a, e| self.pow_raw(a, e))
        })
    }

    /// Codes of the subfield `F_{p^d}`, i.e. the fixed points of `Fr^d`, in code order.
    pub fn subfield_codes(&self, d: u32) -> Result<Vec<u64>, FieldError> {
        let n = self.0.n;
        if d == 0 || n % d != 0 {
            return Err(FieldError::NotADivisor { d, n });
        }
        if d == n {
            return Ok((0..self.0.size).collect());
        }
        let sub_order = self.0.p.pow(d) - 1;
        let h = self.pow_raw(
            self.primitive_element(),
            ((self.0.size - 1) / sub_order) as u128,
        );
        let mut out = Vec::with_capacity(sub_order as usize + 1);
        out.push(0);
        let mut x = 1;
        for _ in 0..sub_order {
            out.push(x);
            x = self.mul_raw(x, h);
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn subfield_elements(&self, d: u32) -> Result<Vec<FieldElement>, FieldError> {
        Ok(self
            .subfield_codes(d)?
            .into_iter()
            .map(|c| self.element(c))
            .collect())
    }

    /// Whether `a` lies in `F_{p^d}`, tested as a fixed point of `Fr^d`.
    pub fn in_subfield(&self, a: u64, d: u32) -> bool {
        self.frobenius_raw(a, d as u64) == a
    }
}

/// Exposed for tests that build independent oracles.
pub fn subfield_elements(field: &Field, d: u32) -> Result<Vec<FieldElement>, FieldError> {
    field.subfield_elements(d)
}

pub fn frobenius(a: &FieldElement, k: u64) -> FieldElement {
    a.frobenius(k)
}

fn digit_add(f: &FieldInner, a: u64, b: u64) -> u64 {
    let (mut ra, mut rb, mut out) = (a, b, 0);
    for w in &f.pow_p[..f.n as usize] {
        let s = ra % f.p + rb % f.p;
        ra /= f.p;
        rb /= f.p;
        out += (if s >= f.p { s - f.p } else { s }) * w;
    }
    out
}

fn coord_mul(f: &FieldInner, a: u64, b: u64) -> u64 {
    let n = f.n as usize;
    let p = f.p;
    let da = digits(f, a);
    let db = digits(f, b);
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for i in (n..2 * n - 1).rev() {
        let c = prod[i];
        if c == 0 {
            continue;
        }
        for j in 0..n {
            let m = f.modulus[j];
            if m != 0 {
                let t = c * m % p;
                let k = i - n + j;
                prod[k] = (prod[k] + p - t) % p;
            }
        }
    }
    prod[..n].iter().zip(&f.pow_p).map(|(c, w)| c * w).sum()
}

fn digits(f: &FieldInner, code: u64) -> Vec<u64> {
    let mut r = code;
    (0..f.n)
        .map(|_| {
            let d = r % f.p;
            r /= f.p;
            d
        })
        .collect()
}

fn build_tables(f: &FieldInner) -> Tables {
    let order = (f.size - 1) as usize;
    let slow_pow = |a: u64, e: u128| {
        let (mut base, mut acc, mut e) = (a, 1u64, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = coord_mul(f, acc, base);
            }
            base = coord_mul(f, base, base);
            e >>= 1;
        }
        acc
    };
    let g = find_primitive(f.size, slow_pow);
    let mut exp = vec![0u32; order];
    let mut log = vec![NO_LOG; f.size as usize];
    let mut x = 1u64;
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = x as u32;
        log[x as usize] = i as u32;
        x = coord_mul(f, x, g);
    }
    let zech = exp
        .iter()
        .map(|&e| {
            let s = digit_add(f, 1, e as u64);
            if s == 0 {
                NO_LOG
            } else {
                log[s as usize]
            }
        })
        .collect();
    Tables { exp, log, zech }
}

fn find_primitive(size: u64, pow: impl Fn(u64, u128) -> u64) -> u64 {
    let order = size - 1;
    if order == 1 {
        return 1;
    }
    let primes = prime_factors(order);
    (2..size)
        .find(|&a| primes.iter().all(|&r| pow(a, (order / r) as u128) != 1))
        .expect("multiplicative group of a finite field is cyclic")
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_prime_factor(n: u64) -> u64 {
    prime_factors(n).first().copied().unwrap_or(n)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn checked_pow(base: u128, exp: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// An element together with the field it lives in.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    code: u64,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn coords(&self) -> Vec<u64> {
        self.field.coords_of(self.code)
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn inv(&self) -> Option<FieldElement> {
        self.field.inv_raw(self.code).map(|c| self.field.element(c))
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        self.field.element(self.field.pow_raw(self.code, e as u128))
    }

    /// `self^(p^k)`.
    pub fn frobenius(&self, k: u64) -> FieldElement {
        self.field.element(self.field.frobenius_raw(self.code, k))
    }

    /// If the element lies in the prime field, its residue in `[0, p)`.
    pub fn as_prime_residue(&self) -> Option<u64> {
        (self.code < self.field.characteristic()).then_some(self.code)
    }

    fn check_same(&self, other: &FieldElement) {
        assert!(
            self.field == other.field,
            "mixing elements of {} and {}",
            self.field,
            other.field
        );
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self, self.field)
    }
}

impl fmt::Display for FieldElement {
    /// Prime-field elements print as integers, the rest as `[c0,c1,...]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            return write!(f, "{}", self.code);
        }
        let cs: Vec<String> = self.coords().iter().map(u64::to_string).collect();
        write!(f, "[{}]", cs.join(","))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $raw:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.check_same(rhs);
                FieldElement {
                    code: self.field.$raw(self.code, rhs.code),
                    field: self.field.clone(),
                }
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add_raw);
binop!(Sub, sub, sub_raw);
binop!(Mul, mul, mul_raw);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.field.element(self.field.neg_raw(self.code))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rootlessness decides irreducibility for quadratics and cubics.
    fn first_rootless_monic(p: u64, n: usize) -> Vec<u64> {
        let count = p.pow(n as u32);
        for k in 0..count {
            let mut c = vec![0u64; n + 1];
            let mut r = k;
            for i in (0..n).rev() {
                c[i] = r % p;
                r /= p;
            }
            c[n] = 1;
            let has_root = (0..p).any(|x| {
                c.iter()
                    .rev()
                    .fold(0u64, |acc, &ci| (acc * x + ci) % p)
                    == 0
            });
            if !has_root {
                return c;
            }
        }
        unreachable!()
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.size(), 5);
    }

    #[test]
    fn f4_modulus() {
        assert_eq!(make_field(2, 2).unwrap().modulus(), &[1, 1, 1]);
    }

    #[test]
    fn f9_modulus_matches_rootless_enumeration() {
        let expected = first_rootless_monic(3, 2);
        assert_eq!(expected, vec![1, 0, 1]);
        assert_eq!(make_field(3, 2).unwrap().modulus(), expected.as_slice());
    }

    #[test]
    fn cubic_moduli_match_rootless_enumeration() {
        for p in [2, 3, 5, 7] {
            let f = make_field(p, 3).unwrap();
            assert_eq!(f.modulus(), first_rootless_monic(p, 3).as_slice(), "p={p}");
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(make_field(1, 1).unwrap_err(), FieldError::NotPrime(1));
        assert_eq!(make_field(5, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(make_field(2, 41), Err(FieldError::TooLarge { .. })));
    }

    #[test]
    fn make_field_is_deterministic() {
        for (p, n) in [(2, 8), (3, 5), (7, 3), (2, 30)] {
            let a = Field::with_modulus(p, smallest_irreducible(p, n));
            let b = make_field(p, n).unwrap();
            assert_eq!(a.modulus(), b.modulus());
        }
    }

    #[test]
    fn frobenius_on_f4() {
        let f = make_field(2, 2).unwrap();
        // a = root of x^2 + x + 1, code 2 = coordinates (0, 1)
        let a = f.element(2);
        let conj = a.frobenius(1);
        assert_eq!(conj, &a + &f.one());
        assert_eq!(conj, &a * &a);
        assert_eq!(a.frobenius(0), a);
        assert_eq!(a.frobenius(2), a);
    }

    #[test]
    fn frobenius_full_power_is_identity() {
        for (p, n) in [(3, 4), (5, 3), (2, 7)] {
            let f = make_field(p, n).unwrap();
            assert!(f.elements().all(|a| a.frobenius(n as u64) == a));
        }
    }

    #[test]
    fn subfield_of_f16() {
        let f = make_field(2, 4).unwrap();
        let sub = f.subfield_elements(2).unwrap();
        let filtered: Vec<_> = f.elements().filter(|a| a.pow(4) == *a).collect();
        assert_eq!(sub, filtered);
        assert_eq!(sub.len(), 4);
        for a in &sub {
            for b in &sub {
                assert!(sub.contains(&(a + b)));
                assert!(sub.contains(&(a * b)));
            }
        }
    }

    #[test]
    fn trivial_subfields() {
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(f4.subfield_codes(1).unwrap(), vec![0, 1]);
        assert_eq!(f4.subfield_codes(2).unwrap().len(), 4);
        assert_eq!(
            f4.subfield_codes(3).unwrap_err(),
            FieldError::NotADivisor { d: 3, n: 2 }
        );
    }

    #[test]
    fn untabled_field_agrees_with_frobenius_filter() {
        // 2^21 elements: above the table limit.
        let f = make_field(2, 21).unwrap();
        let sub = f.subfield_codes(7).unwrap();
        assert_eq!(sub.len(), 128);
        assert!(sub.iter().all(|&a| f.in_subfield(a, 7)));
        let g = f.primitive_element();
        assert_ne!(f.pow_raw(g, ((f.size() - 1) / 7) as u128), 1);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("5^2".parse::<FieldSpec>().unwrap(), FieldSpec { p: 5, n: 2 });
        assert_eq!("9".parse::<FieldSpec>().unwrap(), FieldSpec { p: 3, n: 2 });
        assert_eq!("7".parse::<FieldSpec>().unwrap(), FieldSpec { p: 7, n: 1 });
        assert!("12".parse::<FieldSpec>().is_err());
        assert!("4^2".parse::<FieldSpec>().is_err());
        assert!("x".parse::<FieldSpec>().is_err());
        assert_eq!(FieldSpec { p: 5, n: 2 }.to_string(), "5^2");
    }

    #[test]
    fn inverse_and_display() {
        let f = make_field(3, 2).unwrap();
        for a in f.elements().skip(1) {
            assert_eq!(&a * &a.inv().unwrap(), f.one());
        }
        assert!(f.zero().inv().is_none());
        assert_eq!(f.element(5).to_string(), "[2,1]");
        assert_eq!(make_field(5, 1).unwrap().element(3).to_string(), "3");
    }
}
