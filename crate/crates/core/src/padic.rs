//! Exact scalars of `F = Q_p` (p odd) read p-adically, square classes,
//! Hilbert symbols and the unramified quadratic extension `E = F(√u)`.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational used for every element of `F`.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("valuation of zero")]
    Zero,
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// The ambient field: an odd prime `p`, the least quadratic non-residue `u`
/// (a non-square unit) and the uniformizer `π = p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicContext {
    p: u64,
    u: i64,
}

impl Default for PadicContext {
    fn default() -> Self {
        PadicContext::new(5).expect("5 is an odd prime")
    }
}

impl PadicContext {
    pub fn new(p: u64) -> Result<Self, PadicError> {
        if p == 2 || !is_prime(p) || p > (1 << 31) {
            return Err(PadicError::BadPrime(p));
        }
        let u = (2..p)
            .find(|&a| pow_mod(a, (p - 1) / 2, p) == p - 1)
            .expect("every odd prime has a non-residue");
        Ok(PadicContext { p, u: u as i64 })
    }

    /// Context from `PGO_PRIME`, falling back to p = 5.
    pub fn from_env() -> Result<Self, PadicError> {
        match std::env::var("PGO_PRIME") {
            Ok(s) => {
                let p = s.trim().parse::<u64>().map_err(|_| PadicError::Parse(s.clone()))?;
                PadicContext::new(p)
            }
            Err(_) => Ok(PadicContext::default()),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn pi(&self) -> i64 {
        self.p as i64
    }

    pub fn u_q(&self) -> Q {
        q(self.u)
    }

    pub fn pi_q(&self) -> Q {
        q(self.pi())
    }

    /// Representative of a square class: one of `1, u, π, uπ`.
    pub fn rep(&self, c: SquareClass) -> Q {
        let mut r = 1i64;
        if c.has_u() {
            r *= self.u;
        }
        if c.has_pi() {
            r *= self.pi();
        }
        q(r)
    }

    pub fn valuation(&self, x: &Q) -> Result<i64, PadicError> {
        if x.is_zero() {
            return Err(PadicError::Zero);
        }
        let p = BigInt::from(self.p);
        let count = |n: &BigInt| {
            let mut n = n.abs();
            let mut v = 0i64;
            loop {
                let (qt, r) = n.div_rem(&p);
                if !r.is_zero() {
                    break v;
                }
                n = qt;
                v += 1;
            }
        };
        Ok(count(x.numer()) - count(x.denom()))
    }

    /// `x / p^v(x)`, a p-adic unit.
    pub fn unit_part(&self, x: &Q) -> Result<Q, PadicError> {
        let v = self.valuation(x)?;
        Ok(x / pow_q(&self.pi_q(), v))
    }

    /// Reduction mod p of a p-adic unit.
    fn residue(&self, unit: &Q) -> u64 {
        let p = BigInt::from(self.p);
        let n = unit.numer().mod_floor(&p).to_u64().unwrap();
        let d = unit.denom().mod_floor(&p).to_u64().unwrap();
        debug_assert!(d != 0 && n != 0);
        let dinv = pow_mod(d, self.p - 2, self.p);
        ((n as u128 * dinv as u128) % self.p as u128) as u64
    }

    /// Legendre symbol of a residue that is nonzero mod p.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if pow_mod(a, (self.p - 1) / 2, self.p) == 1 {
            1
        } else {
            -1
        }
    }

    fn unit_legendre(&self, unit: &Q) -> i8 {
        self.legendre(self.residue(unit))
    }

    pub fn square_class(&self, x: &Q) -> Result<SquareClass, PadicError> {
        let v = self.valuation(x)?;
        let unit = x / pow_q(&self.pi_q(), v);
        Ok(SquareClass::from_bits(v.rem_euclid(2) == 1, self.unit_legendre(&unit) == -1))
    }

    pub fn is_square(&self, x: &Q) -> bool {
        x.is_zero() || self.square_class(x) == Ok(SquareClass::One)
    }

    /// Closed form for odd p: with `a = p^α a'`, `b = p^β b'`,
    /// `(a,b) = (-1)^{αβ(p-1)/2} (a'|p)^β (b'|p)^α`.
    pub fn hilbert_symbol(&self, a: &Q, b: &Q) -> Result<i8, PadicError> {
        let al = self.valuation(a)?;
        let be = self.valuation(b)?;
        let ua = self.unit_legendre(&self.unit_part(a)?);
        let ub = self.unit_legendre(&self.unit_part(b)?);
        let eps = ((self.p - 1) / 2) as i64;
        let mut s = 1i8;
        if (al * be * eps).rem_euclid(2) == 1 {
            s = -s;
        }
        if be.rem_euclid(2) == 1 {
            s *= ua;
        }
        if al.rem_euclid(2) == 1 {
            s *= ub;
        }
        Ok(s)
    }

    /// The same rule evaluated on the representatives `1, u, π, uπ`.
    pub fn hilbert_classes(&self, a: SquareClass, b: SquareClass) -> i8 {
        let eps_odd = (self.p - 1) / 2 % 2 == 1;
        let mut s = 1i8;
        if a.has_pi() && b.has_pi() && eps_odd {
            s = -s;
        }
        if b.has_pi() && a.has_u() {
            s = -s;
        }
        if a.has_pi() && b.has_u() {
            s = -s;
        }
        s
    }

    /// Membership in `N(E*) = F*² ∪ uF*²`.
    pub fn is_norm(&self, x: &Q) -> Result<bool, PadicError> {
        Ok(self.valuation(x)?.rem_euclid(2) == 0)
    }

    pub fn minus_one_class(&self) -> SquareClass {
        self.square_class(&q(-1)).expect("-1 is nonzero")
    }

    /// Parses `1`, `u`, `pi`, `upi` (optionally negated) or a rational `a/b`.
    pub fn parse_scalar(&self, token: &str) -> Result<Q, PadicError> {
        let t = token.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, t),
        };
        let v = match body.to_ascii_lowercase().as_str() {
            "u" => self.u_q(),
            "pi" => self.pi_q(),
            "upi" | "piu" => self.u_q() * self.pi_q(),
            other => {
                let (n, d) = match other.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (other, "1"),
                };
                let n = n.parse::<BigInt>().map_err(|_| PadicError::Parse(token.into()))?;
                let d = d.parse::<BigInt>().map_err(|_| PadicError::Parse(token.into()))?;
                if d.is_zero() {
                    return Err(PadicError::DivisionByZero);
                }
                Q::new(n, d)
            }
        };
        Ok(if neg { -v } else { v })
    }
}

pub fn pow_q(x: &Q, e: i64) -> Q {
    let mut r = Q::one();
    let base = if e >= 0 { x.clone() } else { x.recip() };
    for _ in 0..e.unsigned_abs() {
        r *= &base;
    }
    r
}

/// An element of `F*/F*² = {1, u, π, uπ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SquareClass {
    One,
    U,
    Pi,
    UPi,
}

impl SquareClass {
    pub const ALL: [SquareClass; 4] = [SquareClass::One, SquareClass::U, SquareClass::Pi, SquareClass::UPi];

    pub fn from_bits(pi: bool, u: bool) -> Self {
        match (pi, u) {
            (false, false) => SquareClass::One,
            (false, true) => SquareClass::U,
            (true, false) => SquareClass::Pi,
            (true, true) => SquareClass::UPi,
        }
    }

    pub fn has_pi(self) -> bool {
        matches!(self, SquareClass::Pi | SquareClass::UPi)
    }

    pub fn has_u(self) -> bool {
        matches!(self, SquareClass::U | SquareClass::UPi)
    }

    pub fn mul(self, o: SquareClass) -> SquareClass {
        SquareClass::from_bits(self.has_pi() ^ o.has_pi(), self.has_u() ^ o.has_u())
    }

    pub fn tag(self) -> &'static str {
        match self {
            SquareClass::One => "1",
            SquareClass::U => "u",
            SquareClass::Pi => "pi",
            SquareClass::UPi => "upi",
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for SquareClass {
    type Err = PadicError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "one" => Ok(SquareClass::One),
            "u" => Ok(SquareClass::U),
            "pi" => Ok(SquareClass::Pi),
            "upi" => Ok(SquareClass::UPi),
            _ => Err(PadicError::Parse(s.into())),
        }
    }
}

/// `a + b√u ∈ E`. The non-square `u` travels with the value so that
/// arithmetic needs no context argument.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ext {
    pub a: Q,
    pub b: Q,
    pub u: i64,
}

impl Ext {
    pub fn new(a: Q, b: Q, u: i64) -> Self {
        Ext { a, b, u }
    }

    pub fn from_q(a: Q, u: i64) -> Self {
        Ext { a, b: Q::zero(), u }
    }

    pub fn zero(u: i64) -> Self {
        Ext::from_q(Q::zero(), u)
    }

    pub fn one(u: i64) -> Self {
        Ext::from_q(Q::one(), u)
    }

    pub fn sqrt_u(u: i64) -> Self {
        Ext { a: Q::zero(), b: Q::one(), u }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Ext {
        Ext { a: self.a.clone(), b: -&self.b, u: self.u }
    }

    /// `N(a + b√u) = a² - u b²`.
    pub fn norm(&self) -> Q {
        &self.a * &self.a - q(self.u) * &self.b * &self.b
    }

    pub fn add(&self, o: &Ext) -> Ext {
        Ext { a: &self.a + &o.a, b: &self.b + &o.b, u: self.u }
    }

    pub fn sub(&self, o: &Ext) -> Ext {
        Ext { a: &self.a - &o.a, b: &self.b - &o.b, u: self.u }
    }

    pub fn neg(&self) -> Ext {
        Ext { a: -&self.a, b: -&self.b, u: self.u }
    }

    pub fn mul(&self, o: &Ext) -> Ext {
        debug_assert_eq!(self.u, o.u);
        Ext {
            a: &self.a * &o.a + q(self.u) * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
            u: self.u,
        }
    }

    pub fn scale(&self, s: &Q) -> Ext {
        Ext { a: &self.a * s, b: &self.b * s, u: self.u }
    }

    pub fn inv(&self) -> Result<Ext, PadicError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(PadicError::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}√u", self.a, self.b)
        }
    }
}
