//! Exact scalar arithmetic.
//!
//! Coefficients live in the multiplicative lattice generated by prime powers
//! with rational exponents and roots of unity: a nonzero scalar is
//! `e^(2*pi*i*turn) * prod(p_k^(e_k))` with `turn` rational in `[0, 1)` and
//! each `e_k` a nonzero rational.  This is closed under multiplication,
//! inversion and rational powers, supports exact equality, and admits just
//! enough addition (doubling, cancellation, rational plus rational) for the
//! operations of the engine.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, the exponent and parameter type everywhere.
pub type Rat = num_rational::BigRational;

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the rational integer `n`.
pub fn rat_i(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Fractional part in `[0, 1)`.
pub fn frac_mod1(q: &Rat) -> Rat {
    q - q.floor()
}

/// Least multiple of `step` strictly greater than `x`.  `step` must be
/// positive.
pub fn next_multiple_above(step: &Rat, x: &Rat) -> Rat {
    debug_assert!(step > &Rat::zero());
    let k = (x / step).floor() + Rat::one();
    step * k
}

/// A point of the Riemann sphere with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpherePoint {
    Infinity,
    Finite(ExactScalar),
}

impl SpherePoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(a) => write!(f, "{a}"),
        }
    }
}

/// An exact scalar: zero, or a product of prime powers and a root of unity.
///
/// Invariants: if `zero` is set, `magnitude` is empty and `turn` is `0`;
/// otherwise `magnitude` maps distinct primes to nonzero rational exponents
/// and `turn` lies in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    zero: bool,
    magnitude: BTreeMap<BigUint, Rat>,
    turn: Rat,
}

// Rational values sort numerically so that, for instance, finite points on
// the sphere come out in the usual order; everything else sorts after them
// by structure. Numeric equality of two rationals implies structural
// equality, so the order is consistent with `Eq`.
impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.to_rat(), other.to_rat()) {
            (Some(a), Some(b)) => a.cmp(&b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => (&self.magnitude, &self.turn).cmp(&(&other.magnitude, &other.turn)),
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar { zero: true, magnitude: BTreeMap::new(), turn: Rat::zero() }
    }

    pub fn one() -> Self {
        ExactScalar { zero: false, magnitude: BTreeMap::new(), turn: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    pub fn is_one(&self) -> bool {
        !self.zero && self.magnitude.is_empty() && self.turn.is_zero()
    }

    /// Angular part as a fraction of a full turn, in `[0, 1)`.
    pub fn turn(&self) -> &Rat {
        &self.turn
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(&rat_i(n))
    }

    /// Embeds a rational number, factoring numerator and denominator.
    pub fn from_rat(q: &Rat) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let turn = if q.is_negative() { rat(1, 2) } else { Rat::zero() };
        let mut magnitude = BTreeMap::new();
        for (p, e) in factor_map(q.numer().abs().to_biguint().expect("abs")) {
            magnitude.insert(p, rat_i(e as i64));
        }
        for (p, e) in factor_map(q.denom().abs().to_biguint().expect("abs")) {
            *magnitude.entry(p).or_insert_with(Rat::zero) -= rat_i(e as i64);
        }
        magnitude.retain(|_, e| !e.is_zero());
        ExactScalar { zero: false, magnitude, turn }
    }

    pub fn mul(&self, other: &ExactScalar) -> ExactScalar {
        if self.zero || other.zero {
            return Self::zero();
        }
        let mut magnitude = self.magnitude.clone();
        for (p, e) in &other.magnitude {
            *magnitude.entry(p.clone()).or_insert_with(Rat::zero) += e;
        }
        magnitude.retain(|_, e| !e.is_zero());
        ExactScalar { zero: false, magnitude, turn: frac_mod1(&(&self.turn + &other.turn)) }
    }

    /// Multiplies by the unit `e^(2*pi*i*t)`.
    pub fn mul_turn(&self, t: &Rat) -> ExactScalar {
        if self.zero {
            return Self::zero();
        }
        ExactScalar {
            zero: false,
            magnitude: self.magnitude.clone(),
            turn: frac_mod1(&(&self.turn + t)),
        }
    }

    pub fn neg(&self) -> ExactScalar {
        self.mul_turn(&rat(1, 2))
    }

    pub fn inv(&self) -> Result<ExactScalar> {
        self.pow(&rat_i(-1))
    }

    /// Raises to a rational power.  Zero base demands a positive exponent.
    pub fn pow(&self, e: &Rat) -> Result<ExactScalar> {
        if self.zero {
            return if e > &Rat::zero() { Ok(Self::zero()) } else { Err(Error::ZeroPower) };
        }
        if e.is_zero() {
            return Ok(Self::one());
        }
        let mut magnitude = BTreeMap::new();
        for (p, k) in &self.magnitude {
            let scaled = k * e;
            if !scaled.is_zero() {
                magnitude.insert(p.clone(), scaled);
            }
        }
        Ok(ExactScalar { zero: false, magnitude, turn: frac_mod1(&(&self.turn * e)) })
    }

    /// Exact addition where the lattice permits it: either operand zero,
    /// equal operands (doubling), opposite operands (cancellation), or both
    /// operands rational.
    pub fn try_add(&self, other: &ExactScalar) -> Result<ExactScalar> {
        if self.zero {
            return Ok(other.clone());
        }
        if other.zero {
            return Ok(self.clone());
        }
        if self == other {
            return Ok(self.mul(&Self::from_int(2)));
        }
        if self.neg() == *other {
            return Ok(Self::zero());
        }
        match (self.to_rat(), other.to_rat()) {
            (Some(a), Some(b)) => Ok(Self::from_rat(&(a + b))),
            _ => Err(Error::NotRepresentable),
        }
    }

    /// The value as a rational number, when it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.zero {
            return Some(Rat::zero());
        }
        let sign = if self.turn.is_zero() {
            BigInt::one()
        } else if self.turn == rat(1, 2) {
            -BigInt::one()
        } else {
            return None;
        };
        let mut numer = BigUint::one();
        let mut denom = BigUint::one();
        for (p, e) in &self.magnitude {
            if !e.is_integer() {
                return None;
            }
            let k = e.to_integer();
            let exp = k.abs().to_biguint().expect("abs");
            let exp: u64 = exp.try_into().ok()?;
            let pk = Pow::pow(p, exp);
            if k.is_negative() {
                denom *= pk;
            } else {
                numer *= pk;
            }
        }
        Some(Rat::new(sign * BigInt::from(numer), BigInt::from(denom)))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rat() {
            if q.is_integer() {
                return write!(f, "{}", q.to_integer());
            }
            return write!(f, "{}/{}", q.numer(), q.denom());
        }
        let mut parts = Vec::new();
        if !self.turn.is_zero() {
            parts.push(format!("e({})", self.turn));
        }
        for (p, e) in &self.magnitude {
            if e.is_one() {
                parts.push(format!("{p}"));
            } else {
                parts.push(format!("{p}^({e})"));
            }
        }
        if parts.is_empty() {
            parts.push("1".to_string());
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Prime factorization of a positive integer: trial division through the
/// 20-bit range, then Miller-Rabin plus Pollard rho for what remains.
fn factor_map(n: BigUint) -> BTreeMap<BigUint, u64> {
    let mut out = BTreeMap::new();
    let mut n = n;
    if n <= BigUint::one() {
        return out;
    }
    let two = BigUint::from(2u32);
    while (&n % &two).is_zero() {
        *out.entry(two.clone()).or_insert(0) += 1;
        n /= &two;
    }
    let limit = BigUint::from(1u32 << 20);
    let mut d = BigUint::from(3u32);
    let mut exhausted = false;
    loop {
        if &d * &d > n {
            exhausted = true;
            break;
        }
        if d > limit {
            break;
        }
        while (&n % &d).is_zero() {
            *out.entry(d.clone()).or_insert(0) += 1;
            n /= &d;
        }
        d += 2u32;
    }
    if n.is_one() {
        return out;
    }
    if exhausted {
        *out.entry(n).or_insert(0) += 1;
        return out;
    }
    split_big(n, &mut out);
    out
}

fn split_big(n: BigUint, out: &mut BTreeMap<BigUint, u64>) {
    if is_prime(&n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = pollard_rho(&n);
    let q = &n / &d;
    split_big(d, out);
    split_big(q, out);
}

/// Miller-Rabin with the first twelve prime bases, deterministic well past
/// any integer a user will type.
fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if (n % &two).is_zero() {
        return *n == two;
    }
    let n_minus_1 = n - BigUint::one();
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'bases: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Finds a nontrivial factor of an odd composite.
fn pollard_rho(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if (n % &two).is_zero() {
        return two;
    }
    for c in 1u32.. {
        let c = BigUint::from(c);
        let mut x = two.clone();
        let mut y = two.clone();
        let step = |v: &BigUint| (v * v + &c) % n;
        loop {
            x = step(&x);
            y = step(&step(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            let g = diff.gcd(n);
            if !g.is_one() {
                if g == *n {
                    break;
                }
                return g;
            }
        }
    }
    unreachable!("every odd composite has a factor")
}
