//! Conjugacy-class decorations on Stokes circles and global formal data.
//!
//! A global class lists, for finitely many points of the sphere, the Stokes
//! circles present there, each with a multiplicity and a conjugacy class of
//! matching dimension. Data comes in two flavors: unmodified (equal rank at
//! every singular point) and modified (trivial tame blocks at finite points
//! stripped away).

use crate::circle::{ExpFactor, StokesCircle};
use crate::exact::{ExactScalar, SpherePoint};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// An eigenvalue of a formal monodromy block: either an exact nonzero scalar
/// or a named symbol. Symbols are generic: distinct from every exact value
/// and from each other, so the only arithmetic they support is negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EigVal {
    Exact(ExactScalar),
    Symbolic { name: String, sign: i8 },
}

impl EigVal {
    pub fn symbolic(name: &str) -> Self {
        EigVal::Symbolic {
            name: name.to_string(),
            sign: 1,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            EigVal::Exact(s) => EigVal::Exact(s.neg()),
            EigVal::Symbolic { name, sign } => EigVal::Symbolic {
                name: name.clone(),
                sign: -sign,
            },
        }
    }

    /// Multiplies by a nonzero exact scalar; symbols only admit signs.
    pub fn scale(&self, gamma: &ExactScalar) -> Result<Self> {
        match self {
            EigVal::Exact(s) => Ok(EigVal::Exact(s.mul(gamma))),
            EigVal::Symbolic { .. } => {
                if gamma.is_one() {
                    Ok(self.clone())
                } else if gamma.neg().is_one() {
                    Ok(self.neg())
                } else {
                    Err(Error::SymbolicScale)
                }
            }
        }
    }

    fn is_unit(&self) -> bool {
        matches!(self, EigVal::Exact(s) if s.is_one())
    }
}

impl fmt::Display for EigVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigVal::Exact(s) => write!(f, "{s}"),
            EigVal::Symbolic { name, sign } => {
                if *sign < 0 {
                    write!(f, "-{name}")
                } else {
                    write!(f, "{name}")
                }
            }
        }
    }
}

/// A conjugacy class recorded by its spectrum: distinct eigenvalues, each
/// with a multiset of Jordan block sizes (kept in decreasing order).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ConjClass {
    spectrum: BTreeMap<EigVal, Vec<u64>>,
}

impl ConjClass {
    pub fn new(pairs: Vec<(EigVal, Vec<u64>)>) -> Result<Self> {
        let mut spectrum = BTreeMap::new();
        for (eig, mut blocks) in pairs {
            if let EigVal::Exact(s) = &eig {
                if s.is_zero() {
                    return Err(Error::Invalid("eigenvalue must be nonzero".into()));
                }
            }
            if blocks.is_empty() || blocks.iter().any(|&b| b == 0) {
                return Err(Error::Invalid(format!(
                    "eigenvalue {eig} needs positive block sizes"
                )));
            }
            blocks.sort_unstable_by(|a, b| b.cmp(a));
            if spectrum.insert(eig.clone(), blocks).is_some() {
                return Err(Error::Invalid(format!("eigenvalue {eig} repeated")));
            }
        }
        Ok(ConjClass { spectrum })
    }

    /// The identity class of the given dimension: `mult` unit blocks.
    pub fn trivial(mult: u64) -> Self {
        let mut spectrum = BTreeMap::new();
        if mult > 0 {
            spectrum.insert(EigVal::Exact(ExactScalar::one()), vec![1; mult as usize]);
        }
        ConjClass { spectrum }
    }

    pub fn spectrum(&self) -> &BTreeMap<EigVal, Vec<u64>> {
        &self.spectrum
    }

    pub fn dim(&self) -> u64 {
        self.spectrum.values().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }

    /// Negates every eigenvalue.
    pub fn neg(&self) -> Self {
        let spectrum = self
            .spectrum
            .iter()
            .map(|(e, b)| (e.neg(), b.clone()))
            .collect();
        ConjClass { spectrum }
    }

    /// Scales every eigenvalue by a nonzero exact scalar.
    pub fn scale(&self, gamma: &ExactScalar) -> Result<Self> {
        if gamma.is_zero() {
            return Err(Error::Invalid("cannot scale a class by zero".into()));
        }
        let mut spectrum = BTreeMap::new();
        for (e, b) in &self.spectrum {
            spectrum.insert(e.scale(gamma)?, b.clone());
        }
        Ok(ConjClass { spectrum })
    }

    /// Shrinks every unit-eigenvalue block by one, dropping those that
    /// vanish. Everything else is untouched. May come out empty.
    pub fn child(&self) -> Self {
        let mut spectrum = BTreeMap::new();
        for (e, blocks) in &self.spectrum {
            let blocks: Vec<u64> = if e.is_unit() {
                blocks.iter().map(|b| b - 1).filter(|&b| b > 0).collect()
            } else {
                blocks.clone()
            };
            if !blocks.is_empty() {
                spectrum.insert(e.clone(), blocks);
            }
        }
        ConjClass { spectrum }
    }

    /// Grows every unit-eigenvalue block by one, then pads with fresh unit
    /// blocks of size one until the dimension reaches `target`. Inverse to
    /// [`ConjClass::child`].
    pub fn parent(&self, target: u64) -> Result<Self> {
        let unit = EigVal::Exact(ExactScalar::one());
        let grown = self.spectrum.get(&unit).map_or(0, |b| b.len() as u64);
        if target < self.dim() + grown {
            return Err(Error::TargetTooSmall);
        }
        let pad = target - self.dim() - grown;
        let mut spectrum = self.spectrum.clone();
        let blocks = spectrum.entry(unit).or_default();
        for b in blocks.iter_mut() {
            *b += 1;
        }
        blocks.extend(std::iter::repeat(1).take(pad as usize));
        blocks.sort_unstable_by(|a, b| b.cmp(a));
        if blocks.is_empty() {
            return Err(Error::Invalid("parent of an empty class needs a positive target".into()));
        }
        Ok(ConjClass { spectrum })
    }
}

impl fmt::Display for ConjClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for (e, blocks) in &self.spectrum {
            if !first {
                write!(f, "; ")?;
            }
            first = false;
            let sizes: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
            write!(f, "{e}:[{}]", sizes.join(","))?;
        }
        write!(f, "}}")
    }
}

/// One entry of a local class: a circle with its multiplicity and a
/// conjugacy class of dimension equal to that multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalEntry {
    pub circle: StokesCircle,
    pub mult: u64,
    pub class: ConjClass,
}

/// The formal data at one point: finitely many distinct circles with
/// multiplicities and classes, sorted canonically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalClass {
    point: SpherePoint,
    entries: Vec<LocalEntry>,
}

impl LocalClass {
    pub fn new(point: SpherePoint, entries: Vec<LocalEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid(format!("no circles at {point}")));
        }
        let mut entries = entries;
        entries.sort();
        for e in &entries {
            if e.circle.point() != &point {
                return Err(Error::DifferentPoints);
            }
            if e.mult == 0 {
                return Err(Error::Invalid(format!(
                    "circle {} carries multiplicity zero",
                    e.circle
                )));
            }
            if e.class.dim() != e.mult {
                return Err(Error::Invalid(format!(
                    "class dimension {} does not match multiplicity {} on {}",
                    e.class.dim(),
                    e.mult,
                    e.circle
                )));
            }
        }
        for w in entries.windows(2) {
            if w[0].circle == w[1].circle {
                return Err(Error::Invalid(format!(
                    "circle {} listed twice at {point}",
                    w[0].circle
                )));
            }
        }
        Ok(LocalClass { point, entries })
    }

    pub fn point(&self) -> &SpherePoint {
        &self.point
    }

    pub fn entries(&self) -> &[LocalEntry] {
        &self.entries
    }

    /// Rank contributed at this point: multiplicity times ramification,
    /// summed over entries.
    pub fn rank(&self) -> u64 {
        self.entries.iter().map(|e| e.mult * e.circle.ram()).sum()
    }
}

/// Whether trivial tame blocks at finite points are present or stripped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Unmodified,
    Modified,
}

/// Formal data on the whole sphere: local classes at finitely many points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalClass {
    flavor: Flavor,
    locals: Vec<LocalClass>,
}

impl GlobalClass {
    pub fn new(flavor: Flavor, locals: Vec<LocalClass>) -> Result<Self> {
        let mut locals = locals;
        locals.sort_by(|a, b| a.point.cmp(&b.point));
        for w in locals.windows(2) {
            if w[0].point == w[1].point {
                return Err(Error::Invalid(format!(
                    "point {} listed twice",
                    w[0].point
                )));
            }
        }
        let g = GlobalClass { flavor, locals };
        if flavor == Flavor::Unmodified {
            let n = g.rank_at(&SpherePoint::Infinity);
            for l in &g.locals {
                if l.rank() != n {
                    return Err(Error::Invalid(format!(
                        "unmodified data must have equal rank everywhere; {} has rank {}, infinity has {}",
                        l.point,
                        l.rank(),
                        n
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn locals(&self) -> &[LocalClass] {
        &self.locals
    }

    pub fn local_at(&self, p: &SpherePoint) -> Option<&LocalClass> {
        self.locals.iter().find(|l| &l.point == p)
    }

    pub fn rank_at(&self, p: &SpherePoint) -> u64 {
        self.local_at(p).map_or(0, |l| l.rank())
    }

    /// Modified data never carries more rank at a finite point than at
    /// infinity.
    pub fn is_compatible(&self) -> bool {
        let n = self.rank_at(&SpherePoint::Infinity);
        self.locals
            .iter()
            .filter(|l| !l.point.is_infinity())
            .all(|l| l.rank() <= n)
    }

    /// Strips trivial tame blocks at finite points: each tame entry is
    /// replaced by its child class, and dropped if nothing remains. Entries
    /// at infinity and wild entries are untouched.
    pub fn modify(&self) -> Result<GlobalClass> {
        if self.flavor != Flavor::Unmodified {
            return Err(Error::ExpectedUnmodified);
        }
        let mut locals = Vec::new();
        for l in &self.locals {
            if l.point.is_infinity() {
                locals.push(l.clone());
                continue;
            }
            let mut entries = Vec::new();
            for e in &l.entries {
                if e.circle.is_tame() {
                    let child = e.class.child();
                    if !child.is_empty() {
                        entries.push(LocalEntry {
                            circle: e.circle.clone(),
                            mult: child.dim(),
                            class: child,
                        });
                    }
                } else {
                    entries.push(e.clone());
                }
            }
            if !entries.is_empty() {
                locals.push(LocalClass::new(l.point.clone(), entries)?);
            }
        }
        GlobalClass::new(Flavor::Modified, locals)
    }

    /// Restores trivial tame blocks so that every finite point present
    /// reaches the rank at infinity. Inverse to [`GlobalClass::modify`] on
    /// the points that survive it.
    pub fn unmodify(&self) -> Result<GlobalClass> {
        if self.flavor != Flavor::Modified {
            return Err(Error::ExpectedModified);
        }
        if !self.is_compatible() {
            return Err(Error::Incompatible);
        }
        let n = self.rank_at(&SpherePoint::Infinity);
        let mut locals = Vec::new();
        for l in &self.locals {
            if l.point.is_infinity() {
                locals.push(l.clone());
                continue;
            }
            let deficit = n - l.rank();
            let mut entries: Vec<LocalEntry> = Vec::new();
            let mut seen_tame = false;
            for e in &l.entries {
                if e.circle.is_tame() {
                    seen_tame = true;
                    let class = e.class.parent(e.mult + deficit)?;
                    entries.push(LocalEntry {
                        circle: e.circle.clone(),
                        mult: class.dim(),
                        class,
                    });
                } else {
                    entries.push(e.clone());
                }
            }
            if !seen_tame && deficit > 0 {
                entries.push(LocalEntry {
                    circle: StokesCircle::tame(l.point.clone()),
                    mult: deficit,
                    class: ConjClass::trivial(deficit),
                });
            }
            locals.push(LocalClass::new(l.point.clone(), entries)?);
        }
        GlobalClass::new(Flavor::Unmodified, locals)
    }
}

/// Twists the data at one point by a rank-one factor: subtracts `q0` from
/// every circle there and multiplies every class by `gamma`. Other points
/// are untouched.
pub fn formal_twist(
    g: &GlobalClass,
    a: &SpherePoint,
    q0: &ExpFactor,
    gamma: &ExactScalar,
) -> Result<GlobalClass> {
    if q0.point() != a {
        return Err(Error::DifferentPoints);
    }
    let mut locals = Vec::new();
    for l in &g.locals {
        if &l.point != a {
            locals.push(l.clone());
            continue;
        }
        let mut entries = Vec::new();
        for e in &l.entries {
            let moved = e.circle.rep().sub(q0)?;
            entries.push(LocalEntry {
                circle: StokesCircle::new(moved),
                mult: e.mult,
                class: e.class.scale(gamma)?,
            });
        }
        locals.push(LocalClass::new(l.point.clone(), entries)?);
    }
    GlobalClass::new(g.flavor, locals)
}
