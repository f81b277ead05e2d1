//! The SL2 action on formal data.
//!
//! Twists, scalings, and the Fourier transform act on classes through a
//! coarse "shape" of each circle: the coefficients at the two lowest
//! exponents at infinity plus the level data of the rest. Shapes carry
//! exactly enough to push fission forests through arbitrary words, without
//! tracking full exponential factors.

use crate::circle::fission_exponent;
use crate::exact::{rat, rat_i, ExactScalar, Rat, SpherePoint};
use crate::fission::{build_tree, FissionDatum, FissionEntry, FissionForest, LevelDatum};
use crate::formal::{ConjClass, Flavor, GlobalClass};
use crate::{Error, Result};
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Generators of the rational SL2 action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elementary {
    /// Add a quadratic exponential: shifts every quadratic coefficient at
    /// infinity down by half the parameter.
    Twist(Rat),
    /// Rescale the coordinate by a nonzero rational.
    Scale(Rat),
    Fourier,
}

impl fmt::Display for Elementary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elementary::Twist(l) => write!(f, "twist({l})"),
            Elementary::Scale(v) => write!(f, "scale({v})"),
            Elementary::Fourier => write!(f, "fourier"),
        }
    }
}

/// A determinant-one rational two by two matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sl2Elem {
    a: Rat,
    b: Rat,
    c: Rat,
    d: Rat,
}

impl Sl2Elem {
    pub fn new(a: Rat, b: Rat, c: Rat, d: Rat) -> Result<Self> {
        if &a * &d - &b * &c != rat_i(1) {
            return Err(Error::Invalid("matrix determinant must be one".into()));
        }
        Ok(Sl2Elem { a, b, c, d })
    }

    pub fn identity() -> Self {
        Sl2Elem {
            a: rat_i(1),
            b: Rat::zero(),
            c: Rat::zero(),
            d: rat_i(1),
        }
    }

    pub fn entries(&self) -> (&Rat, &Rat, &Rat, &Rat) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn mul(&self, rhs: &Sl2Elem) -> Sl2Elem {
        Sl2Elem {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn of_elementary(e: &Elementary) -> Result<Sl2Elem> {
        Ok(match e {
            Elementary::Twist(l) => Sl2Elem {
                a: rat_i(1),
                b: l.clone(),
                c: Rat::zero(),
                d: rat_i(1),
            },
            Elementary::Scale(v) => {
                if v.is_zero() {
                    return Err(Error::Invalid("cannot scale by zero".into()));
                }
                Sl2Elem {
                    a: rat_i(1) / v,
                    b: Rat::zero(),
                    c: Rat::zero(),
                    d: v.clone(),
                }
            }
            Elementary::Fourier => Sl2Elem {
                a: Rat::zero(),
                b: rat_i(1),
                c: rat_i(-1),
                d: Rat::zero(),
            },
        })
    }

    /// The matrix of a word, first letter applied first.
    pub fn of_word(word: &[Elementary]) -> Result<Sl2Elem> {
        let mut acc = Sl2Elem::identity();
        for e in word {
            acc = Sl2Elem::of_elementary(e)?.mul(&acc);
        }
        Ok(acc)
    }
}

/// Factors a matrix into a word of elementary transformations whose product
/// (first letter applied first) is the matrix back.
pub fn sl2_factor(g: &Sl2Elem) -> Vec<Elementary> {
    if g.c.is_zero() {
        vec![
            Elementary::Twist(&g.b / &g.a),
            Elementary::Scale(rat_i(1) / &g.a),
        ]
    } else {
        vec![
            Elementary::Twist(&g.d / &g.c),
            Elementary::Scale(rat_i(-1) / &g.c),
            Elementary::Fourier,
            Elementary::Twist(&g.a / &g.c),
        ]
    }
}

/// Möbius action of a matrix on a lambda parameter, `None` playing infinity.
pub fn homography(g: &Sl2Elem, lam: Option<&ExactScalar>) -> Result<Option<ExactScalar>> {
    match lam {
        None => {
            if g.c.is_zero() {
                Ok(None)
            } else {
                Ok(Some(ExactScalar::from_rat(&(&g.a / &g.c))))
            }
        }
        Some(x) => {
            let denom = ExactScalar::from_rat(&g.c)
                .mul(x)
                .try_add(&ExactScalar::from_rat(&g.d))?;
            if denom.is_zero() {
                return Ok(None);
            }
            let numer = ExactScalar::from_rat(&g.a)
                .mul(x)
                .try_add(&ExactScalar::from_rat(&g.b))?;
            Ok(Some(numer.mul(&denom.inv()?)))
        }
    }
}

/// The part of a circle beyond the quadratic and linear coefficients: its
/// level data, ramification, and irregularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeepPart {
    pub levels: LevelDatum,
    pub ram: u64,
    pub irr: u64,
}

impl DeepPart {
    pub fn tame() -> Self {
        DeepPart {
            levels: LevelDatum::default(),
            ram: 1,
            irr: 0,
        }
    }

    pub fn is_tame(&self) -> bool {
        self.irr == 0
    }

    pub fn slope(&self) -> Rat {
        rat(self.irr as i64, self.ram as i64)
    }
}

/// Stationary-phase rescaling of a deep part: levels scale by `r/m`, the
/// image slope `s/m` joins them when fractional, and integer artifacts drop
/// out of the level data.
fn scaled_deep(levels: &LevelDatum, r: u64, s: u64, m: u64) -> DeepPart {
    let factor = rat(r as i64, m as i64);
    let mut exps: Vec<Rat> = levels.levels().iter().map(|l| l * &factor).collect();
    let slope = rat(s as i64, m as i64);
    if !slope.is_integer() {
        exps.push(slope);
    }
    let levels = LevelDatum::from_exponents(exps);
    debug_assert_eq!(levels.ram(), m, "rescaled levels must generate the image ramification");
    DeepPart { levels, ram: m, irr: s }
}

/// The shape of a circle: where it lives, its quadratic and linear
/// coefficients (meaningful at infinity only), and the deep part. At a
/// finite point the whole factor counts as deep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleShape {
    pub point: SpherePoint,
    pub quad: ExactScalar,
    pub linear: ExactScalar,
    pub deep: DeepPart,
}

impl CircleShape {
    pub fn tame_at(point: SpherePoint) -> Self {
        CircleShape {
            point,
            quad: ExactScalar::zero(),
            linear: ExactScalar::zero(),
            deep: DeepPart::tame(),
        }
    }

    pub fn slope_total(&self) -> Rat {
        let mut slope = self.deep.slope();
        if self.point.is_infinity() {
            if !self.quad.is_zero() {
                slope = slope.max(rat_i(2));
            }
            if !self.linear.is_zero() {
                slope = slope.max(rat_i(1));
            }
        }
        slope
    }

    pub fn ram_total(&self) -> u64 {
        self.deep.ram
    }

    pub fn irr_total(&self) -> u64 {
        let irr = self.slope_total() * rat_i(self.ram_total() as i64);
        debug_assert!(irr.is_integer());
        irr.to_integer().to_u64().expect("irregularity exceeds u64")
    }

    /// Levels of the whole circle; integer exponents never contribute, so
    /// these are the deep levels.
    pub fn levels_total(&self) -> &LevelDatum {
        &self.deep.levels
    }

    pub fn is_tame_total(&self) -> bool {
        self.quad.is_zero() && self.linear.is_zero() && self.deep.is_tame()
    }
}

/// One circle shape with its multiplicity and conjugacy class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeEntry {
    pub shape: CircleShape,
    pub mult: u64,
    pub class: ConjClass,
}

/// A global class seen through shapes: entries sorted by point (infinity
/// first), with the fission exponent of every same-point pair alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeClass {
    entries: Vec<ShapeEntry>,
    fission: BTreeMap<(usize, usize), Rat>,
}

impl ShapeClass {
    fn assemble(tagged: Vec<ShapeEntry>, fission: BTreeMap<(usize, usize), Rat>) -> ShapeClass {
        let mut order: Vec<usize> = (0..tagged.len()).collect();
        order.sort_by(|&i, &j| {
            tagged[i]
                .shape
                .point
                .cmp(&tagged[j].shape.point)
                .then(i.cmp(&j))
        });
        let mut position = vec![0usize; tagged.len()];
        for (new_idx, &old_idx) in order.iter().enumerate() {
            position[old_idx] = new_idx;
        }
        let mut entries: Vec<Option<ShapeEntry>> = tagged.into_iter().map(Some).collect();
        let entries = order
            .iter()
            .map(|&old| entries[old].take().expect("each index moves once"))
            .collect();
        let fission = fission
            .into_iter()
            .map(|((i, j), f)| {
                let (ni, nj) = (position[i], position[j]);
                ((ni.min(nj), ni.max(nj)), f)
            })
            .collect();
        ShapeClass { entries, fission }
    }

    pub fn entries(&self) -> &[ShapeEntry] {
        &self.entries
    }

    /// Fission exponent between two entries at the same point.
    pub fn fission_between(&self, i: usize, j: usize) -> Option<&Rat> {
        self.fission.get(&(i.min(j), i.max(j)))
    }

    pub fn rank(&self) -> u64 {
        self.entries.iter().map(|e| e.mult * e.shape.ram_total()).sum()
    }

    pub fn rank_at(&self, p: &SpherePoint) -> u64 {
        self.entries
            .iter()
            .filter(|e| &e.shape.point == p)
            .map(|e| e.mult * e.shape.ram_total())
            .sum()
    }

    pub fn points(&self) -> Vec<SpherePoint> {
        let mut out = Vec::new();
        for e in &self.entries {
            if out.last() != Some(&e.shape.point) {
                out.push(e.shape.point.clone());
            }
        }
        out
    }

    /// No finite point may carry more rank than infinity does.
    pub fn is_compatible(&self) -> bool {
        let n = self.rank_at(&SpherePoint::Infinity);
        self.points()
            .iter()
            .filter(|p| !p.is_infinity())
            .all(|p| self.rank_at(p) <= n)
    }
}

fn shape_of_circle(c: &crate::circle::StokesCircle) -> CircleShape {
    let point = c.point().clone();
    if point.is_infinity() {
        let quad = c.rep().coeff(&rat_i(2));
        let linear = c.rep().coeff(&rat_i(1));
        let deep_terms: Vec<(Rat, ExactScalar)> = c
            .rep()
            .terms()
            .iter()
            .filter(|(k, _)| *k != rat_i(1) && *k != rat_i(2))
            .cloned()
            .collect();
        let deep_factor = crate::circle::ExpFactor::new(point.clone(), deep_terms)
            .expect("deep terms keep positive exponents");
        let deep_circle = crate::circle::StokesCircle::new(deep_factor);
        let deep = DeepPart {
            levels: LevelDatum::new(deep_circle.levels()).expect("levels are positive"),
            ram: deep_circle.ram(),
            irr: deep_circle.irr(),
        };
        CircleShape { point, quad, linear, deep }
    } else {
        let deep = DeepPart {
            levels: LevelDatum::new(c.levels()).expect("levels are positive"),
            ram: c.ram(),
            irr: c.irr(),
        };
        CircleShape {
            point,
            quad: ExactScalar::zero(),
            linear: ExactScalar::zero(),
            deep,
        }
    }
}

/// Reads the shape class off a modified global class, computing the fission
/// exponent of every same-point pair from the actual circles.
pub fn shape_of(g: &GlobalClass) -> Result<ShapeClass> {
    if g.flavor() != Flavor::Modified {
        return Err(Error::ExpectedModified);
    }
    let mut entries = Vec::new();
    let mut fission = BTreeMap::new();
    for l in g.locals() {
        let base = entries.len();
        for e in l.entries() {
            entries.push(ShapeEntry {
                shape: shape_of_circle(&e.circle),
                mult: e.mult,
                class: e.class.clone(),
            });
        }
        for i in 0..l.entries().len() {
            for j in i + 1..l.entries().len() {
                let f = fission_exponent(&l.entries()[i].circle, &l.entries()[j].circle)?;
                fission.insert((base + i, base + j), f);
            }
        }
    }
    Ok(ShapeClass { entries, fission })
}

/// Twist: subtract half the parameter from every quadratic coefficient at
/// infinity. Finite points, deep parts, and fission exponents are untouched.
pub fn twist(sc: &ShapeClass, lam: &Rat) -> Result<ShapeClass> {
    let shift = ExactScalar::from_rat(&(-(lam / rat_i(2))));
    let mut entries = sc.entries.clone();
    for e in &mut entries {
        if e.shape.point.is_infinity() {
            e.shape.quad = e.shape.quad.try_add(&shift)?;
        }
    }
    Ok(ShapeClass {
        entries,
        fission: sc.fission.clone(),
    })
}

/// Scale: divide finite positions and the linear coefficient by the factor,
/// the quadratic coefficient by its square. Exponents do not move, so deep
/// parts and fission exponents are untouched.
pub fn scale(sc: &ShapeClass, v: &Rat) -> Result<ShapeClass> {
    if v.is_zero() {
        return Err(Error::Invalid("cannot scale by zero".into()));
    }
    let inv = ExactScalar::from_rat(&(rat_i(1) / v));
    let inv2 = inv.mul(&inv);
    let entries = sc
        .entries
        .iter()
        .map(|e| {
            let mut shape = e.shape.clone();
            match &shape.point {
                SpherePoint::Infinity => {
                    shape.quad = shape.quad.mul(&inv2);
                    shape.linear = shape.linear.mul(&inv);
                }
                SpherePoint::Finite(a) => {
                    shape.point = SpherePoint::Finite(a.mul(&inv));
                }
            }
            ShapeEntry {
                shape,
                mult: e.mult,
                class: e.class.clone(),
            }
        })
        .collect();
    Ok(ShapeClass::assemble(entries, sc.fission.clone()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ImageKind {
    /// An entry at infinity of slope at most one, sent to a finite point.
    FromTameLine,
    /// An entry at infinity of slope above one, kept at infinity.
    StayedAtInfinity,
    /// An entry from a finite point, sent to infinity.
    FromFinite,
}

fn signed_class(c: &ConjClass, s: u64) -> ConjClass {
    if s % 2 == 1 {
        c.neg()
    } else {
        c.clone()
    }
}

/// Fourier transform of a shape class.
///
/// Entries at infinity of slope above one stay there with their slope `s/r`
/// turned into `s/(s-r)`; slope-two entries invert their quadratic
/// coefficient and keep their deep part. Entries at infinity of slope at
/// most one land at the finite point named by their linear coefficient, and
/// entries at a finite point `a` move to infinity with linear coefficient
/// `-a` and slope `s/r` turned into `s/(r+s)`. Fission exponents follow the
/// same rescaling wherever a common part survives, and jump to the larger
/// image slope where none does.
pub fn fourier(sc: &ShapeClass) -> Result<ShapeClass> {
    if sc.entries.len() == 1 {
        let e = &sc.entries[0];
        if e.shape.point.is_infinity()
            && e.mult == 1
            && e.shape.quad.is_zero()
            && e.shape.deep.is_tame()
        {
            return Err(Error::ExcludedRankOne);
        }
    }
    let one = rat_i(1);
    let two = rat_i(2);
    let mut images = Vec::with_capacity(sc.entries.len());
    let mut kinds = Vec::with_capacity(sc.entries.len());
    for e in &sc.entries {
        let shape = &e.shape;
        let (image, class, kind) = match &shape.point {
            SpherePoint::Infinity => {
                let st = shape.slope_total();
                if st <= one {
                    let point = SpherePoint::Finite(shape.linear.clone());
                    if shape.deep.is_tame() {
                        (CircleShape::tame_at(point), e.class.neg(), ImageKind::FromTameLine)
                    } else {
                        let (r, s) = (shape.deep.ram, shape.deep.irr);
                        let image = CircleShape {
                            point,
                            quad: ExactScalar::zero(),
                            linear: ExactScalar::zero(),
                            deep: scaled_deep(&shape.deep.levels, r, s, r - s),
                        };
                        (image, signed_class(&e.class, s), ImageKind::FromTameLine)
                    }
                } else {
                    let r = shape.ram_total();
                    let s = shape.irr_total();
                    let image = if st == two {
                        // The quadratic coefficient dominates: it inverts
                        // and the deep part rides along unchanged.
                        let quad = shape.quad.mul(&ExactScalar::from_int(4)).inv()?.neg();
                        let linear = shape
                            .linear
                            .mul(&shape.quad.mul(&ExactScalar::from_int(2)).inv()?)
                            .neg();
                        CircleShape {
                            point: SpherePoint::Infinity,
                            quad,
                            linear,
                            deep: shape.deep.clone(),
                        }
                    } else {
                        CircleShape {
                            point: SpherePoint::Infinity,
                            quad: ExactScalar::zero(),
                            linear: ExactScalar::zero(),
                            deep: scaled_deep(&shape.deep.levels, r, s, s - r),
                        }
                    };
                    (image, signed_class(&e.class, s), ImageKind::StayedAtInfinity)
                }
            }
            SpherePoint::Finite(a) => {
                let linear = a.neg();
                if shape.deep.is_tame() {
                    let image = CircleShape {
                        point: SpherePoint::Infinity,
                        quad: ExactScalar::zero(),
                        linear,
                        deep: DeepPart::tame(),
                    };
                    (image, e.class.neg(), ImageKind::FromFinite)
                } else {
                    let (r, s) = (shape.deep.ram, shape.deep.irr);
                    let image = CircleShape {
                        point: SpherePoint::Infinity,
                        quad: ExactScalar::zero(),
                        linear,
                        deep: scaled_deep(&shape.deep.levels, r, s, r + s),
                    };
                    (image, signed_class(&e.class, s), ImageKind::FromFinite)
                }
            }
        };
        images.push(ShapeEntry {
            shape: image,
            mult: e.mult,
            class,
        });
        kinds.push(kind);
    }
    let mut fission = BTreeMap::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].shape.point != images[j].shape.point {
                continue;
            }
            let f = image_fission(sc, &images, &kinds, i, j)?;
            debug_assert!(f > Rat::zero());
            fission.insert((i, j), f);
        }
    }
    Ok(ShapeClass::assemble(images, fission))
}

/// Fission exponent between two Fourier images at the same point.
fn image_fission(
    sc: &ShapeClass,
    images: &[ShapeEntry],
    kinds: &[ImageKind],
    i: usize,
    j: usize,
) -> Result<Rat> {
    let one = rat_i(1);
    let si = &sc.entries[i].shape;
    let sj = &sc.entries[j].shape;
    let input_f = || -> Result<Rat> {
        sc.fission_between(i, j).cloned().ok_or_else(|| {
            Error::Invalid("missing fission exponent for a same-point pair".into())
        })
    };
    match (kinds[i], kinds[j]) {
        (ImageKind::FromTameLine, ImageKind::FromTameLine) => {
            // Same image point means same linear coefficient; the deep parts
            // carry the splitting.
            let f = input_f()?;
            let (ki, kj) = (si.deep.slope(), sj.deep.slope());
            if f < ki.clone().min(kj.clone()) {
                Ok(f / (&one - &ki))
            } else {
                Ok((ki.clone() / (&one - &ki)).max(kj.clone() / (&one - &kj)))
            }
        }
        (ImageKind::StayedAtInfinity, ImageKind::StayedAtInfinity) => {
            let f = input_f()?;
            let (ki, kj) = (si.slope_total(), sj.slope_total());
            if f < ki.clone().min(kj.clone()) {
                Ok(f / (&ki - &one))
            } else {
                Ok((ki.clone() / (&ki - &one)).max(kj.clone() / (&kj - &one)))
            }
        }
        (ImageKind::FromFinite, ImageKind::FromFinite) => {
            if si.point == sj.point {
                let f = input_f()?;
                let (ki, kj) = (si.slope_total(), sj.slope_total());
                if f < ki.clone().min(kj.clone()) {
                    Ok(f / (&ki + &one))
                } else {
                    Ok((ki.clone() / (&ki + &one)).max(kj.clone() / (&kj + &one)))
                }
            } else {
                // Distinct finite points split at the linear term.
                Ok(one)
            }
        }
        (ImageKind::StayedAtInfinity, ImageKind::FromFinite) => {
            Ok(images[i].shape.slope_total())
        }
        (ImageKind::FromFinite, ImageKind::StayedAtInfinity) => {
            Ok(images[j].shape.slope_total())
        }
        _ => unreachable!("entries sent to a finite point never share it with these"),
    }
}

/// Applies a word of elementary transformations, first letter first.
pub fn apply_word(sc: &ShapeClass, word: &[Elementary]) -> Result<ShapeClass> {
    let mut cur = sc.clone();
    for e in word {
        cur = match e {
            Elementary::Twist(l) => twist(&cur, l)?,
            Elementary::Scale(v) => scale(&cur, v)?,
            Elementary::Fourier => fourier(&cur)?,
        };
    }
    Ok(cur)
}

/// The lambda parameter of a shape: minus twice the quadratic coefficient
/// for entries at infinity of slope at most two, and `None` (infinity on the
/// lambda line) for finite entries and steeper ones.
pub fn lambda_coeff(shape: &CircleShape) -> Option<ExactScalar> {
    if !shape.point.is_infinity() || shape.slope_total() > rat_i(2) {
        return None;
    }
    Some(shape.quad.mul(&ExactScalar::from_int(-2)))
}

/// Twists by the least admissible nonnegative integer and applies Fourier,
/// so that every entry lands at infinity with slope at most two wherever it
/// started below, and no lambda parameter sits at infinity's image. Returns
/// the transformed class and the word used.
pub fn genericize(sc: &ShapeClass) -> Result<(ShapeClass, Vec<Elementary>)> {
    if sc.entries.len() == 1 {
        let e = &sc.entries[0];
        if e.shape.point.is_infinity()
            && e.mult == 1
            && e.shape.quad.is_zero()
            && e.shape.deep.is_tame()
        {
            return Err(Error::ExcludedRankOne);
        }
    }
    if !sc.is_compatible() {
        return Err(Error::Incompatible);
    }
    let bad: BTreeSet<ExactScalar> = sc
        .entries
        .iter()
        .filter_map(|e| lambda_coeff(&e.shape))
        .map(|l| l.neg())
        .collect();
    let mut rho = 0i64;
    while bad.contains(&ExactScalar::from_int(rho)) {
        rho += 1;
    }
    let word = vec![Elementary::Twist(rat_i(rho)), Elementary::Fourier];
    let out = apply_word(sc, &word)?;
    Ok((out, word))
}

/// The fission forest of a shape class: one tree per point, built from the
/// recorded levels, slopes, and pairwise fission exponents.
/// Fission datum spanned by the given entry indices, which must all sit at
/// the same point of the sphere.
pub(crate) fn shape_datum(sc: &ShapeClass, idxs: &[usize]) -> Result<FissionDatum> {
    let entries: Vec<FissionEntry> = idxs
        .iter()
        .map(|&k| {
            let e = &sc.entries[k];
            FissionEntry {
                levels: e.shape.levels_total().clone(),
                slope: e.shape.slope_total(),
                mult: e.mult,
                class: e.class.clone(),
            }
        })
        .collect();
    let n = idxs.len();
    let mut fmat = vec![vec![Rat::zero(); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let f = sc
                .fission_between(idxs[a], idxs[b])
                .cloned()
                .ok_or_else(|| {
                    Error::Invalid("missing fission exponent for a same-point pair".into())
                })?;
            fmat[a][b] = f.clone();
            fmat[b][a] = f;
        }
    }
    FissionDatum::new(entries, fmat)
}

pub fn forest_of_shapes(sc: &ShapeClass) -> Result<FissionForest> {
    let mut trees = Vec::new();
    let mut i = 0;
    while i < sc.entries.len() {
        let point = sc.entries[i].shape.point.clone();
        let mut idxs = Vec::new();
        while i < sc.entries.len() && sc.entries[i].shape.point == point {
            idxs.push(i);
            i += 1;
        }
        let datum = shape_datum(sc, &idxs)?;
        let mut tree = build_tree(&datum)?;
        tree.point = Some(point);
        trees.push(tree);
    }
    Ok(FissionForest { trees })
}
