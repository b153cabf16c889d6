//! Coefficient modes for the series ring.
//!
//! All series coefficients are *real*: exact arbitrary-precision rationals
//! (`Rat`) or double-double floats (`Fl`, ~106-bit significand). Complex
//! numbers only appear at point evaluation. Reality of a series is the
//! Hermitian symmetry coeff(j,k) = coeff(k,j), which needs no conjugation on
//! the coefficient itself.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use twofloat::TwoFloat;

use crate::error::{KErr, KResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    Exact,
    Float,
}

impl CoeffMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CoeffMode::Exact => "exact",
            CoeffMode::Float => "float",
        }
    }

    pub fn parse(s: &str) -> KResult<Self> {
        match s {
            "exact" => Ok(CoeffMode::Exact),
            "float" => Ok(CoeffMode::Float),
            other => Err(KErr::Schema(format!("unknown mode {other:?}"))),
        }
    }
}

/// Default comparison tolerance for float-mode verdicts. Exact mode ignores
/// tolerances entirely.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A real coefficient ring element. Both implementations are field elements;
/// `try_sqrt` is partial in exact mode (rational squares only).
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const MODE: CoeffMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_int(v: i64) -> Self;
    fn from_fraction(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Square root when representable: always for non-negative floats, only
    /// for rational squares in exact mode. Negative input yields None.
    fn try_sqrt(&self) -> Option<Self>;
    fn is_positive(&self) -> bool;
    /// Decimal (num, den) strings for the JSON interchange format.
    fn to_num_den(&self) -> (String, String);
    fn from_num_den(num: &str, den: &str) -> KResult<Self>;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Zero test used by verdicts: exact equality in exact mode, |x| <= tol in
    /// float mode.
    fn approx_zero(&self, tol: f64) -> bool {
        match Self::MODE {
            CoeffMode::Exact => self.is_zero(),
            CoeffMode::Float => self.abs_f64() <= tol,
        }
    }
}

/// Exact mode: arbitrary-precision rationals.
pub type Rat = BigRational;

impl Scalar for Rat {
    const MODE: CoeffMode = CoeffMode::Exact;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        // Good enough for residual norms and report rendering; exact values
        // of interest are small. num's ToPrimitive handles the general case.
        num::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn try_sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if <BigRational as Zero>::is_zero(self) {
            return Some(<BigRational as Zero>::zero());
        }
        let (n, d) = (self.numer(), self.denom());
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(BigRational::new(rn, rd))
        } else {
            None
        }
    }

    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }

    fn to_num_den(&self) -> (String, String) {
        (self.numer().to_string(), self.denom().to_string())
    }

    fn from_num_den(num: &str, den: &str) -> KResult<Self> {
        let n = BigInt::from_str(num).map_err(|e| KErr::Schema(format!("bad num {num:?}: {e}")))?;
        let d = BigInt::from_str(den).map_err(|e| KErr::Schema(format!("bad den {den:?}: {e}")))?;
        if <BigInt as Zero>::is_zero(&d) {
            return Err(KErr::Schema("zero denominator".into()));
        }
        Ok(BigRational::new(n, d))
    }
}

/// Float mode: double-double (~106-bit significand). Comparisons against
/// verdict thresholds use `DEFAULT_TOL` unless the caller overrides it.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Fl(pub TwoFloat);

impl Fl {
    pub fn new(v: f64) -> Self {
        Fl(TwoFloat::from(v))
    }
}

impl fmt::Display for Fl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", f64::from(self.0))
    }
}

impl Add for Fl {
    type Output = Fl;
    fn add(self, o: Fl) -> Fl {
        Fl(self.0 + o.0)
    }
}

impl Sub for Fl {
    type Output = Fl;
    fn sub(self, o: Fl) -> Fl {
        Fl(self.0 - o.0)
    }
}

impl Mul for Fl {
    type Output = Fl;
    fn mul(self, o: Fl) -> Fl {
        Fl(self.0 * o.0)
    }
}

impl Div for Fl {
    type Output = Fl;
    fn div(self, o: Fl) -> Fl {
        // twofloat's `/` only carries f64 accuracy (its low word comes back
        // zero); one Newton step against the accurate mul/sub restores the
        // full double-double precision.
        let q = self.0 / o.0;
        let r = self.0 - q * o.0;
        Fl(q + r / o.0)
    }
}

impl Neg for Fl {
    type Output = Fl;
    fn neg(self) -> Fl {
        Fl(-self.0)
    }
}

impl Scalar for Fl {
    const MODE: CoeffMode = CoeffMode::Float;

    fn zero() -> Self {
        Fl(TwoFloat::from(0.0))
    }

    fn one() -> Self {
        Fl(TwoFloat::from(1.0))
    }

    fn is_zero(&self) -> bool {
        self.0 == TwoFloat::from(0.0)
    }

    fn from_int(v: i64) -> Self {
        // i64 -> f64 is exact for |v| < 2^53; all integer constants we build
        // (exponents, multinomials, small curvature factors) are far below.
        debug_assert!(v.abs() < (1i64 << 53));
        Fl(TwoFloat::from(v as f64))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64 {
        f64::from(self.0)
    }

    fn try_sqrt(&self) -> Option<Self> {
        if f64::from(self.0) < 0.0 {
            None
        } else {
            Some(Fl(self.0.sqrt()))
        }
    }

    fn is_positive(&self) -> bool {
        f64::from(self.0) > 0.0
    }

    fn to_num_den(&self) -> (String, String) {
        // Interchange precision is f64 (shortest round-trip); internal
        // arithmetic carries ~106 bits. The gap is far below DEFAULT_TOL.
        (format!("{:?}", f64::from(self.0)), "1".to_string())
    }

    fn from_num_den(num: &str, den: &str) -> KResult<Self> {
        let n: f64 = num
            .parse()
            .map_err(|e| KErr::Schema(format!("bad num {num:?}: {e}")))?;
        let d: f64 = den
            .parse()
            .map_err(|e| KErr::Schema(format!("bad den {den:?}: {e}")))?;
        if d == 0.0 {
            return Err(KErr::Schema("zero denominator".into()));
        }
        if !n.is_finite() || !d.is_finite() {
            return Err(KErr::Schema("non-finite coefficient".into()));
        }
        Ok(Fl(TwoFloat::from(n) / TwoFloat::from(d)))
    }
}
