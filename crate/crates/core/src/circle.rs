//! Stokes circles: Galois orbits of exponential factors at a point of the
//! sphere, together with the numerical data read off them (ramification,
//! slope, irregularity, levels) and the pairwise operations (truncation,
//! common part, fission exponent, Hom irregularity).

use crate::exact::{frac_mod1, next_multiple_above, rat_i, ExactScalar, Rat, SpherePoint};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;
use std::fmt;

/// A finite sum of terms `c * x^k` with strictly positive rational exponents
/// and nonzero coefficients, anchored at a point of the sphere. `x` is the
/// local coordinate there: `z` at infinity, `1/(z - a)` at a finite point `a`.
///
/// Terms are kept sorted by strictly decreasing exponent; the zero sum (no
/// terms) is the tame factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpFactor {
    point: SpherePoint,
    terms: Vec<(Rat, ExactScalar)>,
}

impl ExpFactor {
    /// Builds a factor from unsorted terms, merging repeated exponents and
    /// dropping zero coefficients. Fails on a non-positive exponent, or when
    /// merging lands outside the coefficient lattice.
    pub fn new(point: SpherePoint, terms: Vec<(Rat, ExactScalar)>) -> Result<Self> {
        let mut sorted = terms;
        sorted.sort_by(|a, b| b.0.cmp(&a.0));
        let mut merged: Vec<(Rat, ExactScalar)> = Vec::with_capacity(sorted.len());
        for (k, c) in sorted {
            if !k.is_positive() {
                return Err(Error::Invalid(format!(
                    "exponent {k} is not strictly positive"
                )));
            }
            match merged.last_mut() {
                Some((k0, c0)) if *k0 == k => *c0 = c0.try_add(&c)?,
                _ => merged.push((k, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Ok(ExpFactor {
            point,
            terms: merged,
        })
    }

    /// The zero (tame) factor at `point`.
    pub fn zero(point: SpherePoint) -> Self {
        ExpFactor {
            point,
            terms: Vec::new(),
        }
    }

    pub fn point(&self) -> &SpherePoint {
        &self.point
    }

    /// Terms in strictly decreasing exponent order.
    pub fn terms(&self) -> &[(Rat, ExactScalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Top exponent, or zero for the tame factor.
    pub fn slope(&self) -> Rat {
        self.terms
            .first()
            .map(|(k, _)| k.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Least common multiple of the exponent denominators.
    pub fn ram(&self) -> u64 {
        self.terms.iter().fold(1u64, |acc, (k, _)| {
            let d = k
                .denom()
                .to_u64()
                .expect("exponent denominator exceeds u64");
            acc.lcm(&d)
        })
    }

    /// Coefficient at exponent `k`, zero if absent.
    pub fn coeff(&self, k: &Rat) -> ExactScalar {
        self.terms
            .iter()
            .find(|(e, _)| e == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(ExactScalar::zero)
    }

    /// Termwise difference `self - other`. Both factors must sit at the same
    /// point; fails when a coefficient difference leaves the lattice.
    pub fn sub(&self, other: &ExpFactor) -> Result<Self> {
        if self.point != other.point {
            return Err(Error::DifferentPoints);
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(k, c)| (k.clone(), c.neg())));
        ExpFactor::new(self.point.clone(), terms)
    }
}

impl fmt::Display for ExpFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if !c.is_one() {
                write!(f, "{c}*")?;
            }
            if k.is_one() {
                write!(f, "x")?;
            } else {
                write!(f, "x^({k})")?;
            }
        }
        Ok(())
    }
}

/// Applies the `j`-th Galois conjugation: each term `c * x^(k)` becomes
/// `c * e(-j*k) * x^(k)` where `e(t) = exp(2*pi*i*t)`.
pub fn conjugate(q: &ExpFactor, j: u64) -> ExpFactor {
    let terms = q
        .terms
        .iter()
        .map(|(k, c)| {
            let shift = frac_mod1(&(-k * rat_i(j as i64)));
            (k.clone(), c.mul_turn(&shift))
        })
        .collect();
    ExpFactor {
        point: q.point.clone(),
        terms,
    }
}

/// A Stokes circle: the Galois orbit of an exponential factor, stored through
/// its canonical representative (the lexicographically least conjugate).
/// Equality of circles is plain equality of canonical representatives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StokesCircle {
    rep: ExpFactor,
    ram: u64,
}

impl StokesCircle {
    /// Wraps a factor into its orbit, canonicalizing eagerly. Among the
    /// conjugates the one whose coefficients turn least wins, so an orbit
    /// containing a positive real representative is shown by it.
    pub fn new(q: ExpFactor) -> Self {
        let ram = q.ram();
        let key = |f: &ExpFactor| -> Vec<(Rat, Rat, ExactScalar)> {
            f.terms
                .iter()
                .map(|(k, c)| (-k.clone(), c.turn().clone(), c.clone()))
                .collect()
        };
        let rep = (0..ram)
            .map(|j| conjugate(&q, j))
            .min_by(|a, b| key(a).cmp(&key(b)))
            .unwrap_or(q);
        StokesCircle { rep, ram }
    }

    /// The tame circle `<0>` at `point`.
    pub fn tame(point: SpherePoint) -> Self {
        StokesCircle {
            rep: ExpFactor::zero(point),
            ram: 1,
        }
    }

    pub fn point(&self) -> &SpherePoint {
        self.rep.point()
    }

    /// Canonical representative factor.
    pub fn rep(&self) -> &ExpFactor {
        &self.rep
    }

    pub fn is_tame(&self) -> bool {
        self.rep.is_zero()
    }

    /// Ramification: the number of Galois conjugates of the representative.
    pub fn ram(&self) -> u64 {
        self.ram
    }

    /// Slope: top exponent of the representative, zero if tame.
    pub fn slope(&self) -> Rat {
        self.rep.slope()
    }

    /// Irregularity: ramification times slope, always an integer.
    pub fn irr(&self) -> u64 {
        let v = self.slope() * rat_i(self.ram as i64);
        debug_assert!(v.is_integer());
        v.to_integer().to_u64().expect("irregularity exceeds u64")
    }

    /// Levels: for each nontrivial conjugation the top exponent it moves.
    /// Computed directly from that description.
    pub fn levels(&self) -> BTreeSet<Rat> {
        let mut out = BTreeSet::new();
        for j in 1..self.ram {
            let jr = rat_i(j as i64);
            for (k, _) in &self.rep.terms {
                if !(k * &jr).is_integer() {
                    out.insert(k.clone());
                    break;
                }
            }
        }
        out
    }
}

impl fmt::Display for StokesCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.rep)
    }
}

/// Which side of the cutoff a truncation keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncMode {
    /// Keep exponents `>= c`.
    Ge,
    /// Keep exponents `> c`.
    Gt,
    /// Keep exponents `<= c`.
    Le,
    /// Keep exponents `< c`.
    Lt,
}

/// Keeps the terms of the representative whose exponents pass the cutoff
/// test, then re-canonicalizes. Well defined on circles since conjugation
/// preserves exponents.
pub fn truncate(circle: &StokesCircle, mode: TruncMode, cutoff: &Rat) -> StokesCircle {
    let keep = |k: &Rat| match mode {
        TruncMode::Ge => k >= cutoff,
        TruncMode::Gt => k > cutoff,
        TruncMode::Le => k <= cutoff,
        TruncMode::Lt => k < cutoff,
    };
    let terms = circle
        .rep
        .terms
        .iter()
        .filter(|(k, _)| keep(k))
        .cloned()
        .collect();
    StokesCircle::new(ExpFactor {
        point: circle.rep.point.clone(),
        terms,
    })
}

/// The common part of two circles at the same point: the finest upper
/// truncation on which they agree, together with the grid cutoff that
/// achieves it. Agreement is upward closed in the cutoff, so scanning the
/// candidate cutoffs in increasing order finds the minimal one; candidates
/// live on the `1/(ram_I * ram_J)` grid just above each exponent.
pub fn common_part(i: &StokesCircle, j: &StokesCircle) -> Result<(StokesCircle, Rat)> {
    if i.point() != j.point() {
        return Err(Error::DifferentPoints);
    }
    let step = rat_i(1) / rat_i((i.ram * j.ram) as i64);
    let mut candidates: BTreeSet<Rat> = BTreeSet::new();
    candidates.insert(Rat::zero());
    for (k, _) in i.rep.terms.iter().chain(j.rep.terms.iter()) {
        candidates.insert(next_multiple_above(&step, k));
    }
    for c in candidates {
        let ti = truncate(i, TruncMode::Ge, &c);
        let tj = truncate(j, TruncMode::Ge, &c);
        if ti == tj {
            return Ok((ti, c));
        }
    }
    unreachable!("truncation above every exponent is tame on both sides");
}

/// The fission exponent of two circles at the same point: the larger of the
/// slopes left below the common-part cutoff. Zero exactly when the circles
/// coincide.
pub fn fission_exponent(i: &StokesCircle, j: &StokesCircle) -> Result<Rat> {
    let (_, cutoff) = common_part(i, j)?;
    let bi = truncate(i, TruncMode::Lt, &cutoff);
    let bj = truncate(j, TruncMode::Lt, &cutoff);
    Ok(bi.slope().max(bj.slope()))
}

/// Top exponent at which two factors at the same point differ, zero if they
/// are equal termwise. Only coefficient equality is consulted, so this never
/// leaves the lattice.
fn diff_slope(a: &ExpFactor, b: &ExpFactor) -> Rat {
    let mut ia = a.terms.iter().peekable();
    let mut ib = b.terms.iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((ka, ca)), Some((kb, cb))) => {
                if ka == kb {
                    if ca != cb {
                        return ka.clone();
                    }
                    ia.next();
                    ib.next();
                } else if ka > kb {
                    return ka.clone();
                } else {
                    return kb.clone();
                }
            }
            (Some((ka, _)), None) => return ka.clone(),
            (None, Some((kb, _))) => return kb.clone(),
            (None, None) => return Rat::zero(),
        }
    }
}

/// Irregularity of the Hom circle: the sum, over all ordered pairs of
/// conjugates of the two representatives, of the top exponent where the pair
/// differs. Always an integer.
pub fn irr_hom(i: &StokesCircle, j: &StokesCircle) -> Result<u64> {
    if i.point() != j.point() {
        return Err(Error::DifferentPoints);
    }
    let mut total = Rat::zero();
    for a in 0..i.ram {
        let qa = conjugate(&i.rep, a);
        for b in 0..j.ram {
            let qb = conjugate(&j.rep, b);
            total += diff_slope(&qa, &qb);
        }
    }
    debug_assert!(total.is_integer());
    Ok(total
        .to_integer()
        .to_u64()
        .expect("Hom irregularity exceeds u64"))
}
