//! Homogeneous iterated function systems, cylinder boxes, and the
//! complete-overlap class check.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::{exact_log, parse_expr, pow, Affine, LambdaPoly, Rational, SyntaxError};

/// Largest overlap exponent `k` recognised in `|f_i ∩ f_{i+1}| = λ^k`.
pub const MAX_OVERLAP_EXPONENT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IfsError {
    #[error("contraction ratio {0} is not in (0, 1)")]
    RatioOutOfRange(Rational),
    #[error("dimension {0} unsupported (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("at least 2 maps required, got {0}")]
    TooFewMaps(usize),
    #[error("map {index} has {got} coordinates, expected {expected}")]
    Ragged {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("map index {index} out of range 1..={map_count}")]
    IndexOutOfRange { index: usize, map_count: usize },
    #[error("map {map}, coordinate {coord}")]
    Syntax {
        map: usize,
        coord: usize,
        source: SyntaxError,
    },
}

/// Axis-aligned box with exact rational corners.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactBox {
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl ExactBox {
    pub fn unit(dim: usize) -> Self {
        Self {
            lower: vec![Rational::zero(); dim],
            upper: vec![Rational::one(); dim],
        }
    }

    /// `map([0,1]^dim)`; `map.scale` must be positive.
    pub fn image_of_unit(map: &Affine) -> Self {
        Self {
            lower: map.shift.clone(),
            upper: map.shift.iter().map(|s| s + &map.scale).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Side length along the first axis (all cylinder boxes are cubes).
    pub fn side(&self) -> Rational {
        &self.upper[0] - &self.lower[0]
    }

    pub fn intersection(&self, other: &ExactBox) -> Option<ExactBox> {
        let mut lower = Vec::with_capacity(self.dim());
        let mut upper = Vec::with_capacity(self.dim());
        for axis in 0..self.dim() {
            let lo = (&self.lower[axis]).max(&other.lower[axis]).clone();
            let hi = (&self.upper[axis]).min(&other.upper[axis]).clone();
            if lo > hi {
                return None;
            }
            lower.push(lo);
            upper.push(hi);
        }
        Some(ExactBox { lower, upper })
    }

    pub fn contains(&self, other: &ExactBox) -> bool {
        (0..self.dim())
            .all(|a| self.lower[a] <= other.lower[a] && other.upper[a] <= self.upper[a])
    }

    pub fn contains_point(&self, point: &[Rational]) -> bool {
        (0..self.dim()).all(|a| self.lower[a] <= point[a] && point[a] <= self.upper[a])
    }

    /// Per-axis gaps (zero where the projections overlap).
    pub fn axis_gaps(&self, other: &ExactBox) -> Vec<Rational> {
        (0..self.dim())
            .map(|a| {
                let left = &other.lower[a] - &self.upper[a];
                let right = &self.lower[a] - &other.upper[a];
                let gap = left.max(right);
                if gap.is_positive() {
                    gap
                } else {
                    Rational::zero()
                }
            })
            .collect()
    }

    /// Squared Euclidean distance between the two boxes.
    pub fn gap_sq(&self, other: &ExactBox) -> Rational {
        self.axis_gaps(other)
            .into_iter()
            .fold(Rational::zero(), |acc, g| acc + &g * &g)
    }

    pub fn diameter_sq(&self) -> Rational {
        (0..self.dim()).fold(Rational::zero(), |acc, a| {
            let w = &self.upper[a] - &self.lower[a];
            acc + &w * &w
        })
    }

    pub fn midpoint(&self) -> Vec<Rational> {
        let two = Rational::from_integer(2.into());
        (0..self.dim())
            .map(|a| (&self.lower[a] + &self.upper[a]) / &two)
            .collect()
    }

    /// Smallest box containing every box of a nonempty iterator.
    pub fn hull<'a>(mut boxes: impl Iterator<Item = &'a ExactBox>) -> Option<ExactBox> {
        let first = boxes.next()?.clone();
        Some(boxes.fold(first, |mut acc, b| {
            for a in 0..acc.dim() {
                if b.lower[a] < acc.lower[a] {
                    acc.lower[a] = b.lower[a].clone();
                }
                if b.upper[a] > acc.upper[a] {
                    acc.upper[a] = b.upper[a].clone();
                }
            }
            acc
        }))
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.lower.iter().map(crate::algebra::to_f64).collect(),
            self.upper.iter().map(crate::algebra::to_f64).collect(),
        )
    }
}

impl fmt::Display for ExactBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.dim() {
            if a > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "[{}, {}]", self.lower[a], self.upper[a])?;
        }
        Ok(())
    }
}

/// `{ f_i(x) = λx + a_i : 1 ≤ i ≤ m }` in dimension 1 or 2, translations kept
/// symbolic in λ alongside their values at the concrete λ.
///
/// Map indices are 1-based throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousIfs {
    lambda: Rational,
    dim: usize,
    translations: Vec<Vec<LambdaPoly>>,
    maps: Vec<Affine>,
}

impl HomogeneousIfs {
    pub fn new(lambda: Rational, translations: Vec<Vec<LambdaPoly>>) -> Result<Self, IfsError> {
        if !lambda.is_positive() || lambda >= Rational::one() {
            return Err(IfsError::RatioOutOfRange(lambda));
        }
        if translations.len() < 2 {
            return Err(IfsError::TooFewMaps(translations.len()));
        }
        let dim = translations[0].len();
        if dim != 1 && dim != 2 {
            return Err(IfsError::UnsupportedDimension(dim));
        }
        if let Some((i, t)) = translations.iter().enumerate().find(|(_, t)| t.len() != dim) {
            return Err(IfsError::Ragged {
                index: i + 1,
                got: t.len(),
                expected: dim,
            });
        }
        let maps = translations
            .iter()
            .map(|t| Affine::new(lambda.clone(), t.iter().map(|p| p.eval(&lambda)).collect()))
            .collect();
        Ok(Self {
            lambda,
            dim,
            translations,
            maps,
        })
    }

    /// Builds from expression strings, one inner slice per map.
    pub fn parse<S: AsRef<str>>(lambda: Rational, maps: &[Vec<S>]) -> Result<Self, IfsError> {
        let mut translations = Vec::with_capacity(maps.len());
        for (i, coords) in maps.iter().enumerate() {
            let mut parsed = Vec::with_capacity(coords.len());
            for (c, text) in coords.iter().enumerate() {
                parsed.push(parse_expr(text.as_ref()).map_err(|source| IfsError::Syntax {
                    map: i + 1,
                    coord: c + 1,
                    source,
                })?);
            }
            translations.push(parsed);
        }
        Self::new(lambda, translations)
    }

    /// One-dimensional shorthand for [`HomogeneousIfs::parse`].
    pub fn parse_1d(lambda: Rational, exprs: &[&str]) -> Result<Self, IfsError> {
        let maps: Vec<Vec<&str>> = exprs.iter().map(|e| vec![*e]).collect();
        Self::parse(lambda, &maps)
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn translations(&self) -> &[Vec<LambdaPoly>] {
        &self.translations
    }

    /// The map `f_index` evaluated at λ.
    pub fn map(&self, index: usize) -> Result<&Affine, IfsError> {
        index
            .checked_sub(1)
            .and_then(|i| self.maps.get(i))
            .ok_or(IfsError::IndexOutOfRange {
                index,
                map_count: self.map_count(),
            })
    }

    pub fn maps(&self) -> &[Affine] {
        &self.maps
    }

    /// `f_{w₁} ∘ … ∘ f_{w_k}`.
    pub fn word_map(&self, word: &[usize]) -> Result<Affine, IfsError> {
        let mut acc = Affine::identity(self.dim);
        for &index in word {
            acc = acc
                .compose(self.map(index)?)
                .expect("maps share the IFS dimension");
        }
        Ok(acc)
    }

    /// Exact image of `[0,1]^dim` under the word.
    pub fn cylinder(&self, word: &[usize]) -> Result<ExactBox, IfsError> {
        Ok(ExactBox::image_of_unit(&self.word_map(word)?))
    }

    /// Same translations, different concrete ratio.
    pub fn with_lambda(&self, lambda: Rational) -> Result<Self, IfsError> {
        Self::new(lambda, self.translations.clone())
    }

    /// True when every map sends `[0,1]^dim` into itself.
    pub fn maps_unit_cube_into_itself(&self) -> bool {
        let top = Rational::one() - &self.lambda;
        self.maps
            .iter()
            .all(|m| m.shift.iter().all(|s| !s.is_negative() && *s <= top))
    }
}

/// Which outer map has no overlapping neighbour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FreeSide {
    /// `f_1([0,1])` meets no other image.
    Left,
    /// `f_m([0,1])` meets no other image.
    Right,
    Both,
}

impl fmt::Display for FreeSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FreeSide::Left => "left-free",
            FreeSide::Right => "right-free",
            FreeSide::Both => "both",
        })
    }
}

/// `|f_index([0,1]) ∩ f_{index+1}([0,1])| = λ^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Overlap {
    pub index: usize,
    pub exponent: u32,
}

/// Evidence that an IFS belongs to the complete-overlap class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCertificate {
    pub map_count: usize,
    /// Distinct overlap exponents, strictly decreasing.
    pub k_vector: Vec<u32>,
    /// Sorted by index.
    pub overlaps: Vec<Overlap>,
    /// `gamma[ℓ]` holds the indices whose overlap exponent is `k_vector[ℓ]`.
    pub gamma: Vec<Vec<usize>>,
    /// Indices in `1..m` carrying no overlap.
    pub gamma_rest: Vec<usize>,
    pub side: FreeSide,
}

impl ClassCertificate {
    /// Overlap exponent of the pair `(index, index+1)`, if any.
    pub fn exponent_at(&self, index: usize) -> Option<u32> {
        self.overlaps
            .iter()
            .find(|o| o.index == index)
            .map(|o| o.exponent)
    }

    /// The relabelling `h`: `γ₁` in increasing order first, then `γ₂`, …,
    /// then the free indices. Entry `j-1` holds `h(j)` for `1 ≤ j < m`.
    pub fn relabeling(&self) -> Vec<usize> {
        let mut h = vec![0; self.map_count - 1];
        let order = self.gamma.iter().flatten().chain(&self.gamma_rest);
        for (label, &j) in order.enumerate() {
            h[j - 1] = label + 1;
        }
        h
    }

    pub fn largest_exponent(&self) -> Option<u32> {
        self.k_vector.first().copied()
    }
}

/// `(#γ₁, …, #γ_n)`.
pub fn gamma_signature(cert: &ClassCertificate) -> Vec<usize> {
    cert.gamma.iter().map(Vec::len).collect()
}

/// Which of the three class conditions a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    MapCount,
    Dimension,
    /// Ordering and endpoints of the translations.
    I,
    /// Overlap structure.
    II,
    /// One outer map must be free.
    III,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassViolation {
    #[error("class analysis needs m >= 3 maps, got {0}")]
    TooFewMaps(usize),
    #[error("class analysis is one-dimensional, got dimension {0}")]
    NotOneDimensional(usize),
    #[error("condition (I): a_1 = {0}, expected 0")]
    FirstNotZero(Rational),
    #[error("condition (I): a_m = {value}, expected 1 - λ = {expected}")]
    LastNotEnd { value: Rational, expected: Rational },
    #[error("condition (I): a_{index} = {left} is not below a_{next} = {right}", next = .index + 1)]
    NotIncreasing {
        index: usize,
        left: Rational,
        right: Rational,
    },
    #[error("condition (II): images {indices:?} share the box {witness}")]
    TripleIntersection {
        indices: [usize; 3],
        witness: ExactBox,
    },
    #[error("condition (II): non-adjacent images {i} and {j} meet in {witness}")]
    NonAdjacentOverlap {
        i: usize,
        j: usize,
        witness: ExactBox,
    },
    #[error("condition (II): overlap of images {i} and {j} has length {length}, not λ^k with k >= 2")]
    OverlapNotPower {
        i: usize,
        j: usize,
        length: Rational,
    },
    #[error("condition (II): overlap of images {i} and {j} has length {length} < λ^{max}", max = MAX_OVERLAP_EXPONENT)]
    ExponentBeyondBound {
        i: usize,
        j: usize,
        length: Rational,
    },
    #[error("condition (II): identity f_{index}∘f_m^{k} = f_{next}∘f_1^{k} fails", k = .exponent - 1, next = .index + 1)]
    OverlapIdentityFails { index: usize, exponent: u32 },
    #[error("condition (III): both f_1 (overlap exponent {left}) and f_m (overlap exponent {right}) overlap a neighbour")]
    BothSidesOverlap { left: u32, right: u32 },
}

impl ClassViolation {
    pub fn condition(&self) -> Condition {
        use ClassViolation::*;
        match self {
            TooFewMaps(_) => Condition::MapCount,
            NotOneDimensional(_) => Condition::Dimension,
            FirstNotZero(_) | LastNotEnd { .. } | NotIncreasing { .. } => Condition::I,
            TripleIntersection { .. }
            | NonAdjacentOverlap { .. }
            | OverlapNotPower { .. }
            | ExponentBeyondBound { .. }
            | OverlapIdentityFails { .. } => Condition::II,
            BothSidesOverlap { .. } => Condition::III,
        }
    }
}

/// Checks conditions (I)–(III) exactly and returns the overlap certificate.
pub fn validate_class(ifs: &HomogeneousIfs) -> Result<ClassCertificate, ClassViolation> {
    let m = ifs.map_count();
    if ifs.dim() != 1 {
        return Err(ClassViolation::NotOneDimensional(ifs.dim()));
    }
    if m < 3 {
        return Err(ClassViolation::TooFewMaps(m));
    }
    let lambda = ifs.lambda();
    let a: Vec<&Rational> = ifs.maps().iter().map(|f| &f.shift[0]).collect();

    // (I)
    if !a[0].is_zero() {
        return Err(ClassViolation::FirstNotZero(a[0].clone()));
    }
    for i in 0..m - 1 {
        if a[i] >= a[i + 1] {
            return Err(ClassViolation::NotIncreasing {
                index: i + 1,
                left: a[i].clone(),
                right: a[i + 1].clone(),
            });
        }
    }
    let end = Rational::one() - lambda;
    if *a[m - 1] != end {
        return Err(ClassViolation::LastNotEnd {
            value: a[m - 1].clone(),
            expected: end,
        });
    }

    // (II): no point lies in three images
    let images: Vec<ExactBox> = (1..=m)
        .map(|i| ifs.cylinder(&[i]).expect("index in range"))
        .collect();
    for i in 0..m {
        for j in i + 1..m {
            let Some(ij) = images[i].intersection(&images[j]) else {
                continue;
            };
            for t in j + 1..m {
                if let Some(witness) = ij.intersection(&images[t]) {
                    return Err(ClassViolation::TripleIntersection {
                        indices: [i + 1, j + 1, t + 1],
                        witness,
                    });
                }
            }
        }
    }

    // (II): overlaps are adjacent with length λ^k, k >= 2
    let mut overlaps = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let Some(witness) = images[i].intersection(&images[j]) else {
                continue;
            };
            if j != i + 1 {
                return Err(ClassViolation::NonAdjacentOverlap {
                    i: i + 1,
                    j: j + 1,
                    witness,
                });
            }
            let length = witness.side();
            let exponent = match exact_log(&length, lambda, MAX_OVERLAP_EXPONENT) {
                Some(k) if k >= 2 => k as u32,
                _ if length.is_positive()
                    && length < pow(lambda, MAX_OVERLAP_EXPONENT) =>
                {
                    return Err(ClassViolation::ExponentBeyondBound {
                        i: i + 1,
                        j: j + 1,
                        length,
                    })
                }
                _ => {
                    return Err(ClassViolation::OverlapNotPower {
                        i: i + 1,
                        j: j + 1,
                        length,
                    })
                }
            };
            let index = i + 1;
            let k = exponent as usize;
            let lhs = ifs
                .word_map(&overlap_word(index, m, k))
                .expect("indices in range");
            let rhs = ifs
                .word_map(&overlap_partner_word(index, k))
                .expect("indices in range");
            if lhs != rhs {
                return Err(ClassViolation::OverlapIdentityFails { index, exponent });
            }
            overlaps.push(Overlap { index, exponent });
        }
    }

    // (III)
    let left = overlaps.iter().find(|o| o.index == 1).map(|o| o.exponent);
    let right = overlaps.iter().find(|o| o.index == m - 1).map(|o| o.exponent);
    let side = match (left, right) {
        (Some(left), Some(right)) => return Err(ClassViolation::BothSidesOverlap { left, right }),
        (Some(_), None) => FreeSide::Right,
        (None, Some(_)) => FreeSide::Left,
        (None, None) => FreeSide::Both,
    };

    let k_vector: Vec<u32> = overlaps
        .iter()
        .map(|o| o.exponent)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .rev()
        .collect();
    let gamma: Vec<Vec<usize>> = k_vector
        .iter()
        .map(|&k| {
            overlaps
                .iter()
                .filter(|o| o.exponent == k)
                .map(|o| o.index)
                .collect()
        })
        .collect();
    let gamma_rest = (1..m)
        .filter(|j| overlaps.iter().all(|o| o.index != *j))
        .collect();

    Ok(ClassCertificate {
        map_count: m,
        k_vector,
        overlaps,
        gamma,
        gamma_rest,
        side,
    })
}

/// `i m^{k-1}`: the word whose cylinder is the right end of `f_i`'s overlap.
pub fn overlap_word(index: usize, map_count: usize, exponent: usize) -> Vec<usize> {
    std::iter::once(index)
        .chain(std::iter::repeat(map_count).take(exponent - 1))
        .collect()
}

/// `(i+1) 1^{k-1}`: the same cylinder reached from the right neighbour.
pub fn overlap_partner_word(index: usize, exponent: usize) -> Vec<usize> {
    std::iter::once(index + 1)
        .chain(std::iter::repeat(1).take(exponent - 1))
        .collect()
}

/// The mirror image `1 - K`: translations `c_i = 1 - λ - a_{m+1-i}`,
/// applied coordinate-wise.
pub fn reflect(ifs: &HomogeneousIfs) -> HomogeneousIfs {
    let top = &LambdaPoly::one() - &LambdaPoly::lambda();
    let translations = ifs
        .translations()
        .iter()
        .rev()
        .map(|t| t.iter().map(|p| &top - p).collect())
        .collect();
    HomogeneousIfs::new(ifs.lambda().clone(), translations)
        .expect("reflection preserves ratio, dimension and map count")
}

/// An IFS in the class with `f_m` free, with its certificate.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub ifs: HomogeneousIfs,
    pub cert: ClassCertificate,
    pub reflected: bool,
}

/// Reflects the IFS when `f_{m-1}` overlaps `f_m`, so that `f_m` is free.
pub fn normalize_right_free(ifs: &HomogeneousIfs) -> Result<Normalized, ClassViolation> {
    let cert = validate_class(ifs)?;
    if cert.exponent_at(cert.map_count - 1).is_none() {
        return Ok(Normalized {
            ifs: ifs.clone(),
            cert,
            reflected: false,
        });
    }
    let reflected = reflect(ifs);
    let cert = validate_class(&reflected)?;
    Ok(Normalized {
        ifs: reflected,
        cert,
        reflected: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn example2_a(lambda: Rational) -> HomogeneousIfs {
        HomogeneousIfs::parse_1d(lambda, &["0", "l*(1-l)", "2*l*(1-l)", "3*l", "1-l"]).unwrap()
    }

    fn example2_b(lambda: Rational) -> HomogeneousIfs {
        HomogeneousIfs::parse_1d(lambda, &["0", "l*(1-l)", "2*l", "3*l-l^2", "1-l"]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            HomogeneousIfs::parse_1d(int(1), &["0", "0"]).unwrap_err(),
            IfsError::RatioOutOfRange(int(1))
        );
        assert_eq!(
            HomogeneousIfs::parse_1d(rat(1, 3), &["0"]).unwrap_err(),
            IfsError::TooFewMaps(1)
        );
        let ragged = HomogeneousIfs::parse(rat(1, 3), &[vec!["0"], vec!["0", "0"]]);
        assert!(matches!(ragged, Err(IfsError::Ragged { index: 2, .. })));
        let bad = HomogeneousIfs::parse_1d(rat(1, 3), &["0", "l**2"]);
        assert!(matches!(bad, Err(IfsError::Syntax { map: 2, coord: 1, .. })));
    }

    #[test]
    fn cylinders() {
        let ifs = example2_a(rat(1, 6));
        let c = ifs.cylinder(&[2]).unwrap();
        assert_eq!((c.lower[0].clone(), c.upper[0].clone()), (rat(5, 36), rat(11, 36)));
        assert_eq!(ifs.cylinder(&[]).unwrap(), ExactBox::unit(1));
        let ones = ifs.cylinder(&[1, 1, 1, 1]).unwrap();
        assert_eq!(ones.lower[0], int(0));
        assert_eq!(ones.upper[0], rat(1, 1296));
        assert_eq!(
            ifs.cylinder(&[6]).unwrap_err(),
            IfsError::IndexOutOfRange { index: 6, map_count: 5 }
        );
        assert!(ifs.cylinder(&[0]).is_err());
    }

    #[test]
    fn example2_certificates() {
        let a = validate_class(&example2_a(rat(1, 6))).unwrap();
        assert_eq!(a.k_vector, vec![2]);
        assert_eq!(
            a.overlaps,
            vec![Overlap { index: 1, exponent: 2 }, Overlap { index: 2, exponent: 2 }]
        );
        assert_eq!(a.gamma, vec![vec![1, 2]]);
        assert_eq!(a.gamma_rest, vec![3, 4]);
        assert_eq!(a.side, FreeSide::Right);
        assert_eq!(gamma_signature(&a), vec![2]);

        let b = validate_class(&example2_b(rat(1, 6))).unwrap();
        assert_eq!(b.gamma, vec![vec![1, 3]]);
        assert_eq!(b.gamma_rest, vec![2, 4]);
        assert_eq!(b.relabeling(), vec![1, 3, 2, 4]);
    }

    #[test]
    fn example4_line_certificate() {
        let ifs = HomogeneousIfs::parse_1d(
            rat(1, 8),
            &["0", "2*l", "3*l-l^2", "4*l-2*l^2", "5*l", "1-l"],
        )
        .unwrap();
        let cert = validate_class(&ifs).unwrap();
        assert_eq!(cert.k_vector, vec![2]);
        assert_eq!(cert.gamma, vec![vec![2, 3]]);
        assert_eq!(cert.side, FreeSide::Both);
        assert_eq!(gamma_signature(&cert), vec![2]);
    }

    #[test]
    fn no_overlap_certificate_is_empty() {
        let ifs = HomogeneousIfs::parse_1d(rat(1, 5), &["0", "1/2 - 1/2*l", "1-l"]).unwrap();
        let cert = validate_class(&ifs).unwrap();
        assert!(cert.k_vector.is_empty());
        assert!(gamma_signature(&cert).is_empty());
        assert_eq!(cert.gamma_rest, vec![1, 2]);
        assert_eq!(cert.side, FreeSide::Both);
    }

    #[test]
    fn violations() {
        let half = HomogeneousIfs::parse_1d(rat(1, 6), &["0", "1/2*l", "1-l"]).unwrap();
        assert_eq!(
            validate_class(&half).unwrap_err(),
            ClassViolation::OverlapNotPower { i: 1, j: 2, length: rat(1, 12) }
        );

        // a_3 = a_1 + λ/2 keeps three images over [λ/2, λ]
        let triple =
            HomogeneousIfs::parse_1d(rat(1, 6), &["0", "1/4*l", "1/2*l", "1-l"]).unwrap();
        let err = validate_class(&triple).unwrap_err();
        assert_eq!(err.condition(), Condition::II);
        match err {
            ClassViolation::TripleIntersection { indices, witness } => {
                assert_eq!(indices, [1, 2, 3]);
                assert_eq!(witness.lower[0], rat(1, 12));
                assert_eq!(witness.upper[0], rat(1, 6));
            }
            other => panic!("unexpected {other:?}"),
        }

        let touching = HomogeneousIfs::parse_1d(rat(1, 6), &["0", "l", "1-l"]).unwrap();
        assert!(matches!(
            validate_class(&touching).unwrap_err(),
            ClassViolation::OverlapNotPower { i: 1, j: 2, .. }
        ));

        let both = HomogeneousIfs::parse_1d(rat(1, 6), &["0", "l-l^2", "1-2*l+l^2", "1-l"]).unwrap();
        assert_eq!(
            validate_class(&both).unwrap_err(),
            ClassViolation::BothSidesOverlap { left: 2, right: 2 }
        );

        let at_half = example2_a(rat(1, 2));
        assert_eq!(validate_class(&at_half).unwrap_err().condition(), Condition::I);

        let two = HomogeneousIfs::parse_1d(rat(1, 3), &["0", "1-l"]).unwrap();
        assert_eq!(validate_class(&two).unwrap_err(), ClassViolation::TooFewMaps(2));

        let unordered = HomogeneousIfs::parse_1d(rat(1, 6), &["0", "1-l", "1/2"]).unwrap();
        assert!(matches!(
            validate_class(&unordered).unwrap_err(),
            ClassViolation::NotIncreasing { index: 2, .. }
        ));

        let shifted = HomogeneousIfs::parse_1d(rat(1, 6), &["1/100", "1/2", "1-l"]).unwrap();
        assert_eq!(
            validate_class(&shifted).unwrap_err(),
            ClassViolation::FirstNotZero(rat(1, 100))
        );

        let deep = HomogeneousIfs::parse_1d(rat(1, 10), &["0", "l - l^70", "1-l"]).unwrap();
        assert!(matches!(
            validate_class(&deep).unwrap_err(),
            ClassViolation::ExponentBeyondBound { i: 1, j: 2, .. }
        ));
    }

    #[test]
    fn reflection() {
        let a = example2_a(rat(1, 6));
        let c = reflect(&a);
        let expected = HomogeneousIfs::parse_1d(
            rat(1, 6),
            &["0", "1-4*l", "1-l-2*l*(1-l)", "1-l-l*(1-l)", "1-l"],
        )
        .unwrap();
        assert_eq!(c.translations(), expected.translations());
        assert_eq!(reflect(&c).translations(), a.translations());
        let cert_a = validate_class(&a).unwrap();
        let cert_c = validate_class(&c).unwrap();
        assert_eq!(cert_c.k_vector, cert_a.k_vector);
        assert_eq!(gamma_signature(&cert_c), gamma_signature(&cert_a));
        assert_eq!(cert_c.side, FreeSide::Left);
    }

    #[test]
    fn normalization() {
        let a = example2_a(rat(1, 6));
        let n = normalize_right_free(&a).unwrap();
        assert!(!n.reflected);
        assert_eq!(n.ifs, a);

        // only overlap sits at (m-1, m)
        let right = HomogeneousIfs::parse_1d(rat(1, 6), &["0", "1-2*l+l^2", "1-l"]).unwrap();
        let n = normalize_right_free(&right).unwrap();
        assert!(n.reflected);
        assert_eq!(n.cert.overlaps, vec![Overlap { index: 1, exponent: 2 }]);
        let again = normalize_right_free(&n.ifs).unwrap();
        assert!(!again.reflected);
        assert_eq!(again.ifs, n.ifs);
    }
}
