//! Exact scalar kernel: arbitrary-precision rationals, q-integers, and
//! randomized non-singular parameter points.
//!
//! A `ParamPoint` fixes the deformation parameter through its 2n-th root
//! tau (q = tau^{2n}) and each dynamical coordinate through omega_i
//! (u_i = omega_i^{2n} plays the role of q^{y_i}, w_i = omega_i^n the role
//! of q^{y_i/2}). Storing roots instead of q and y keeps every power of q
//! needed downstream, including the 1/n powers from the dual Cartan basis
//! and the 1/2 powers from half-coordinates, an exact Laurent monomial with
//! rational value. Nothing in this crate ever leaves the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sampling exhausted after {attempts} attempts; enlarge the bound")]
    SamplingExhausted { attempts: u32 },
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("operator is not nilpotent within the dimension bound {dim}")]
    NonNilpotent { dim: usize },
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

/// Exact rational number. Always stored reduced with a positive denominator.
///
/// Serializes as the string "p/q" ("p" when the denominator is 1), which is
/// also the `Display`/`FromStr` round-trip format.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    /// p/q from machine integers. Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(k: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Rat> {
        if self.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }

    /// Integer power by repeated squaring. Panics on 0^e with e < 0.
    pub fn powi(&self, e: i64) -> Rat {
        self.checked_powi(e).expect("zero base with negative exponent")
    }

    /// Integer power; `None` only for 0^e with e < 0.
    pub fn checked_powi(&self, e: i64) -> Option<Rat> {
        if e == 0 {
            return Some(Rat::one());
        }
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut acc = Rat::one();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat, Error> {
        let bad = || Error::InvalidArgument(format!("malformed rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {s:?}")));
        }
        Ok(Rat(BigRational::new(num, den)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e| D::Error::custom(format!("{e}")))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat((self.0).$m(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat((self.0).$m(&rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat((&self.0).$m(rhs.0))
            }
        }
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |a, b| a * b)
    }
}

/// Symmetric q-integer [m] = (q^m - q^{-m})/(q - q^{-1}).
///
/// Requires q outside {0, 1, -1}; [0] = 0, [1] = 1, [-m] = -[m].
pub fn qint(m: i64, q: &Rat) -> Rat {
    debug_assert!(!q.is_zero() && !(q * q).is_one(), "qint needs q outside {{0, 1, -1}}");
    (q.powi(m) - q.powi(-m)) / (q - q.powi(-1))
}

/// q-factorial [m]! = [1][2]...[m], with [0]! = 1.
pub fn qfactorial(m: i64, q: &Rat) -> Result<Rat, Error> {
    if m < 0 {
        return Err(Error::InvalidArgument(format!("qfactorial of negative {m}")));
    }
    let mut acc = Rat::one();
    for k in 1..=m {
        acc *= &qint(k, q);
    }
    Ok(acc)
}

/// Exact specialization of the deformation and dynamical parameters.
///
/// tau is the 2n-th root of q; omega_i is the 2n-th root of u_i = q^{y_i}.
/// The non-singularity invariants guarantee that every denominator used by
/// the twist and coupling layers is nonzero at this point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub n: usize,
    pub l: usize,
    pub tau: Rat,
    pub omega: Vec<Rat>,
}

/// View of a point through q and u_i = q^{y_i}, for layers that only need
/// integer powers of q and ratios of the u_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoint {
    pub n: usize,
    pub l: usize,
    pub q: Rat,
    pub u: Vec<Rat>,
}

/// View of a point through q and w_i = q^{t_i} = q^{y_i/2}, the coordinates
/// of the difference-operator layer. u_i = w_i^2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WPoint {
    pub n: usize,
    pub q: Rat,
    pub w: Vec<Rat>,
}

impl ParamPoint {
    pub fn q(&self) -> Rat {
        self.tau.powi(2 * self.n as i64)
    }

    /// omega_i, 1-indexed as in the formulas.
    pub fn omega(&self, i: usize) -> &Rat {
        assert!(1 <= i && i <= self.n, "omega index {i} out of 1..={}", self.n);
        &self.omega[i - 1]
    }

    /// u_i = omega_i^{2n}, 1-indexed.
    pub fn u(&self, i: usize) -> Rat {
        self.omega(i).powi(2 * self.n as i64)
    }

    /// w_i = omega_i^n, 1-indexed.
    pub fn w(&self, i: usize) -> Rat {
        self.omega(i).powi(self.n as i64)
    }

    pub fn u_point(&self) -> UPoint {
        UPoint {
            n: self.n,
            l: self.l,
            q: self.q(),
            u: (1..=self.n).map(|i| self.u(i)).collect(),
        }
    }

    pub fn w_point(&self) -> WPoint {
        WPoint {
            n: self.n,
            q: self.q(),
            w: (1..=self.n).map(|i| self.w(i)).collect(),
        }
    }

    /// Checks the full non-singularity contract:
    /// tau outside {0, 1, -1}; omega_i nonzero; and for all i < j the ratio
    /// u_j/u_i avoids {1, q^2, q^{-2}, q^{-2l-2}, q^{2l}} so that every
    /// denominator of the twist recursions and of the coupling function is
    /// nonzero.
    pub fn validate(&self) -> Result<(), Error> {
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n < 2 {
            return fail(format!("n = {} but n >= 2 required", self.n));
        }
        if self.l < 1 {
            return fail(format!("l = {} but l >= 1 required", self.l));
        }
        if self.omega.len() != self.n {
            return fail(format!("{} omegas for n = {}", self.omega.len(), self.n));
        }
        if self.tau.is_zero() || (&self.tau * &self.tau).is_one() {
            return fail("tau must avoid {0, 1, -1}".into());
        }
        if self.omega.iter().any(Rat::is_zero) {
            return fail("every omega_i must be nonzero".into());
        }
        let q = self.q();
        let l = self.l as i64;
        let forbidden = [
            (Rat::one(), "1"),
            (q.powi(2), "q^2"),
            (q.powi(-2), "q^-2"),
            (q.powi(-2 * l - 2), "q^{-2l-2}"),
            (q.powi(2 * l), "q^{2l}"),
        ];
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                let r = self.u(j) / self.u(i);
                for (value, name) in &forbidden {
                    if &r == value {
                        return Err(Error::SingularPoint(format!(
                            "u_{j}/u_{i} = {name} at this point"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Retry budget for rejection sampling, shared by every sampling loop.
pub const SAMPLE_BUDGET: u32 = 10_000;

/// Draws a valid `ParamPoint` for (n, l), deterministically in the seed.
///
/// tau and the omega_i are positive rationals with numerator and denominator
/// in 1..=bound, rejection-sampled until `validate` passes. Positivity makes
/// q positive and distinct from 1, so every q-integer is automatically
/// nonzero. Small bounds can exhaust the retry budget (bound = 1 always
/// does, since tau = 1 is the only candidate).
pub fn sample_point(n: usize, l: usize, seed: u64, bound: i64) -> Result<ParamPoint, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_point_with(&mut rng, n, l, bound)
}

/// As `sample_point`, drawing from a caller-owned stream so that successive
/// samples are independent but reproducible.
pub fn sample_point_with(
    rng: &mut ChaCha8Rng,
    n: usize,
    l: usize,
    bound: i64,
) -> Result<ParamPoint, Error> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} but n >= 2 required")));
    }
    if l < 1 {
        return Err(Error::InvalidArgument(format!("l = {l} but l >= 1 required")));
    }
    if bound < 1 {
        return Err(Error::InvalidArgument(format!("bound = {bound} but bound >= 1 required")));
    }
    let draw = |rng: &mut ChaCha8Rng| {
        let num = rng.gen_range(1..=bound);
        let den = rng.gen_range(1..=bound);
        Rat::new(num, den)
    };
    for _ in 0..SAMPLE_BUDGET {
        let pt = ParamPoint {
            n,
            l,
            tau: draw(rng),
            omega: (0..n).map(|_| draw(rng)).collect(),
        };
        if pt.validate().is_ok() {
            return Ok(pt);
        }
    }
    Err(Error::SamplingExhausted { attempts: SAMPLE_BUDGET })
}
