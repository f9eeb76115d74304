//! Ordered abelian value groups, their extension by infinity, and the
//! Ostrowski index selection over finite increasing prefixes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("group descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(GroupDescriptor, GroupDescriptor),
    #[error("unknown group descriptor `{0}`")]
    UnknownDescriptor(String),
    #[error("arity {found} does not match descriptor {descriptor}")]
    ArityMismatch { descriptor: GroupDescriptor, found: usize },
    #[error("betas and slopes must have the same positive length (got {betas} and {ts})")]
    LengthMismatch { betas: usize, ts: usize },
    #[error("slopes must be pairwise distinct (t[{0}] = t[{1}])")]
    DuplicateSlope(usize, usize),
    #[error("gammas must be non-empty and strictly increasing (violated at index {0})")]
    NotStrictlyIncreasing(usize),
    #[error("pair ({0}, {1}) has not reached its asymptotic order within the prefix")]
    PrefixTooShort(usize, usize),
}

/// Which ordered abelian group a value lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupDescriptor {
    Integers,
    Rationals,
    /// `Z^n` with the lexicographic order.
    LexInt(usize),
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Integers => write!(f, "Z"),
            GroupDescriptor::Rationals => write!(f, "Q"),
            GroupDescriptor::LexInt(n) => write!(f, "Z^{n}:lex"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = ValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "Z" => Ok(GroupDescriptor::Integers),
            "Q" => Ok(GroupDescriptor::Rationals),
            other => other
                .strip_prefix("Z^")
                .and_then(|rest| rest.strip_suffix(":lex"))
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .map(GroupDescriptor::LexInt)
                .ok_or_else(|| ValueError::UnknownDescriptor(s.to_string())),
        }
    }
}

/// An element of one of the supported ordered groups. Arithmetic is exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Int(BigInt),
    Rat(BigRational),
    Lex(Vec<BigInt>),
}

impl GroupElement {
    pub fn zero(descriptor: GroupDescriptor) -> Self {
        match descriptor {
            GroupDescriptor::Integers => GroupElement::Int(BigInt::zero()),
            GroupDescriptor::Rationals => GroupElement::Rat(BigRational::zero()),
            GroupDescriptor::LexInt(n) => GroupElement::Lex(vec![BigInt::zero(); n]),
        }
    }

    pub fn int(v: i64) -> Self {
        GroupElement::Int(BigInt::from(v))
    }

    pub fn rat(num: i64, den: i64) -> Self {
        GroupElement::Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn lex<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        GroupElement::Lex(coords.into_iter().map(BigInt::from).collect())
    }

    /// Builds an element from integer coordinates, checking the arity.
    pub fn from_coords(descriptor: GroupDescriptor, coords: &[BigRational]) -> Result<Self, ValueError> {
        let arity = match descriptor {
            GroupDescriptor::LexInt(n) => n,
            _ => 1,
        };
        if coords.len() != arity {
            return Err(ValueError::ArityMismatch { descriptor, found: coords.len() });
        }
        let as_int = |q: &BigRational| {
            if q.is_integer() {
                Ok(q.to_integer())
            } else {
                Err(ValueError::ArityMismatch { descriptor, found: coords.len() })
            }
        };
        Ok(match descriptor {
            GroupDescriptor::Integers => GroupElement::Int(as_int(&coords[0])?),
            GroupDescriptor::Rationals => GroupElement::Rat(coords[0].clone()),
            GroupDescriptor::LexInt(_) => {
                GroupElement::Lex(coords.iter().map(as_int).collect::<Result<_, _>>()?)
            }
        })
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        match self {
            GroupElement::Int(_) => GroupDescriptor::Integers,
            GroupElement::Rat(_) => GroupDescriptor::Rationals,
            GroupElement::Lex(c) => GroupDescriptor::LexInt(c.len()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElement::Int(a) => a.is_zero(),
            GroupElement::Rat(a) => a.is_zero(),
            GroupElement::Lex(c) => c.iter().all(Zero::is_zero),
        }
    }

    fn same_descriptor(&self, other: &Self) -> Result<(), ValueError> {
        if self.descriptor() == other.descriptor() {
            Ok(())
        } else {
            Err(ValueError::DescriptorMismatch(self.descriptor(), other.descriptor()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ValueError> {
        self.same_descriptor(other)?;
        Ok(match (self, other) {
            (GroupElement::Int(a), GroupElement::Int(b)) => GroupElement::Int(a + b),
            (GroupElement::Rat(a), GroupElement::Rat(b)) => GroupElement::Rat(a + b),
            (GroupElement::Lex(a), GroupElement::Lex(b)) => {
                GroupElement::Lex(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => unreachable!("descriptors checked above"),
        })
    }

    pub fn neg(&self) -> Self {
        match self {
            GroupElement::Int(a) => GroupElement::Int(-a),
            GroupElement::Rat(a) => GroupElement::Rat(-a),
            GroupElement::Lex(a) => GroupElement::Lex(a.iter().map(|x| -x).collect()),
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ValueError> {
        self.checked_add(&other.neg())
    }

    /// The `t`-fold sum of `self` (negative `t` negates).
    pub fn scalar_mul(&self, t: i64) -> Self {
        let t = BigInt::from(t);
        match self {
            GroupElement::Int(a) => GroupElement::Int(a * &t),
            GroupElement::Rat(a) => GroupElement::Rat(a * BigRational::from_integer(t)),
            GroupElement::Lex(a) => GroupElement::Lex(a.iter().map(|x| x * &t).collect()),
        }
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering, ValueError> {
        self.same_descriptor(other)?;
        Ok(match (self, other) {
            (GroupElement::Int(a), GroupElement::Int(b)) => a.cmp(b),
            (GroupElement::Rat(a), GroupElement::Rat(b)) => a.cmp(b),
            (GroupElement::Lex(a), GroupElement::Lex(b)) => a.cmp(b),
            _ => unreachable!("descriptors checked above"),
        })
    }

    pub fn is_positive(&self) -> bool {
        match self {
            GroupElement::Int(a) => a.is_positive(),
            GroupElement::Rat(a) => a.is_positive(),
            GroupElement::Lex(c) => c.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_positive),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.compare(other).ok()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(a) => write!(f, "{a}"),
            GroupElement::Rat(a) => write!(f, "{a}"),
            GroupElement::Lex(c) => {
                write!(f, "(")?;
                for (k, x) in c.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A group value extended by a top element, the value of zero.
///
/// The derived order puts every `Finite` below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<G> {
    Finite(G),
    Infinity,
}

pub type ExtendedValue = Extended<GroupElement>;

impl<G> Extended<G> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn finite(&self) -> Option<&G> {
        match self {
            Extended::Finite(g) => Some(g),
            Extended::Infinity => None,
        }
    }

    pub fn map<H, F: FnOnce(G) -> H>(self, f: F) -> Extended<H> {
        match self {
            Extended::Finite(g) => Extended::Finite(f(g)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl Add for Extended<i64> {
    type Output = Extended<i64>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinity,
        }
    }
}

impl From<Extended<i64>> for ExtendedValue {
    fn from(v: Extended<i64>) -> Self {
        v.map(GroupElement::int)
    }
}

impl fmt::Display for Extended<i64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinity => write!(f, "inf"),
        }
    }
}

impl ExtendedValue {
    pub fn checked_add(&self, other: &Self) -> Result<Self, ValueError> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Ok(Extended::Finite(a.checked_add(b)?)),
            _ => Ok(Extended::Infinity),
        }
    }
}

/// Total order on extended values; infinity is the maximum.
pub fn compare(a: &ExtendedValue, b: &ExtendedValue) -> Result<Ordering, ValueError> {
    match (a, b) {
        (Extended::Finite(x), Extended::Finite(y)) => x.compare(y),
        (Extended::Finite(_), Extended::Infinity) => Ok(Ordering::Less),
        (Extended::Infinity, Extended::Finite(_)) => Ok(Ordering::Greater),
        (Extended::Infinity, Extended::Infinity) => Ok(Ordering::Equal),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OstrowskiSelection {
    /// Every index `s >= nu` (hence every `s > nu`) has the lines
    /// `beta_i + t_i * gamma_s` pairwise distinct with line `r` strictly lowest.
    pub nu: usize,
    /// Index of the smallest slope, the eventual strict minimum.
    pub r: usize,
}

/// Finds the stabilization index of the lines `beta_i + t_i * gamma_s`.
///
/// For every pair the line with the smaller slope must end up strictly below
/// the other one; the comparison is done on integer multiples,
/// `(t_j - t_i) * gamma_s` against `beta_i - beta_j`, so no division in the
/// group is needed.
pub fn ostrowski_select(
    betas: &[GroupElement],
    ts: &[i64],
    gammas: &[GroupElement],
) -> Result<OstrowskiSelection, ValueError> {
    if betas.is_empty() || betas.len() != ts.len() {
        return Err(ValueError::LengthMismatch { betas: betas.len(), ts: ts.len() });
    }
    if gammas.is_empty() {
        return Err(ValueError::NotStrictlyIncreasing(0));
    }
    let descriptor = gammas[0].descriptor();
    for g in betas.iter().chain(gammas) {
        if g.descriptor() != descriptor {
            return Err(ValueError::DescriptorMismatch(descriptor, g.descriptor()));
        }
    }
    for (s, w) in gammas.windows(2).enumerate() {
        if w[0].compare(&w[1])? != Ordering::Less {
            return Err(ValueError::NotStrictlyIncreasing(s + 1));
        }
    }
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            if ts[i] == ts[j] {
                return Err(ValueError::DuplicateSlope(i, j));
            }
        }
    }

    let r = (0..ts.len()).min_by_key(|&i| ts[i]).expect("non-empty");
    let mut nu = 0;
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            let (lo, hi) = if ts[i] < ts[j] { (i, j) } else { (j, i) };
            let gap = betas[lo].checked_sub(&betas[hi])?;
            let ordered_at = |s: usize| -> Result<bool, ValueError> {
                let lhs = gammas[s].scalar_mul(ts[hi] - ts[lo]);
                Ok(lhs.compare(&gap)? == Ordering::Greater)
            };
            let mut first = gammas.len();
            while first > 0 && ordered_at(first - 1)? {
                first -= 1;
            }
            if first == gammas.len() {
                return Err(ValueError::PrefixTooShort(i, j));
            }
            nu = nu.max(first);
        }
    }
    Ok(OstrowskiSelection { nu, r })
}
