//! Two-tier scalars: exact Gaussian rationals and complex doubles.
//!
//! The algebraic layer runs entirely on [`Scalar::Exact`]; the analytic layer
//! (real powers `λ^{it}`, irrational square roots) promotes to
//! [`Scalar::Float`]. Promotion is one-way: nothing converts a float back.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AqgError;

/// Default tolerance for float-tier comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// An element of `ℚ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Self::real(&self.re * &o.re);
        }
        if self.im.is_zero() {
            return Self { re: &self.re * &o.re, im: &self.re * &o.im };
        }
        if o.im.is_zero() {
            return Self { re: &self.re * &o.re, im: &self.im * &o.re };
        }
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator/denominator: scale down by bit length first.
            let shift = r.denom().bits().max(r.numer().bits()).saturating_sub(900);
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

/// The coefficient field of every element, tensor and operator.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussianRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(GaussianRational::one())
    }

    /// The exact imaginary unit.
    pub fn i() -> Self {
        Scalar::Exact(GaussianRational::new(BigRational::zero(), BigRational::one()))
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(GaussianRational::real(BigRational::from_integer(BigInt::from(n))))
    }

    /// `p/q` as an exact scalar. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Exact(GaussianRational::real(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(GaussianRational::real(r))
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(GaussianRational::new(re, im))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Exact zero test for the exact tier; `0.0 + 0.0i` for floats.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Scalar::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    /// Zero test with an explicit tolerance (exact scalars ignore it).
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.norm() <= tol,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_complex(),
            Scalar::Float(c) => *c,
        }
    }

    /// Promotes to the float tier. Float inputs are returned unchanged.
    pub fn to_float(&self) -> Self {
        Scalar::Float(self.to_complex())
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn as_exact(&self) -> Option<&GaussianRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Float(_) => None,
        }
    }

    /// The rational value when the scalar is an exact real.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => Some(&g.re),
            _ => None,
        }
    }

    pub fn inv(&self) -> Result<Self, AqgError> {
        match self {
            Scalar::Exact(g) => g.inv().map(Scalar::Exact).ok_or(AqgError::DivisionByZero),
            Scalar::Float(c) => {
                if c.norm() == 0.0 {
                    Err(AqgError::DivisionByZero)
                } else {
                    Ok(Scalar::Float(c.inv()))
                }
            }
        }
    }

    /// `self^n` for an integer exponent.
    pub fn powi(&self, n: i64) -> Result<Self, AqgError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Float-aware approximate equality; exact scalars compare exactly.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => (self.to_complex() - other.to_complex()).norm() <= tol,
        }
    }

    /// Exact square root of a nonnegative rational, when it is a perfect square.
    pub fn exact_sqrt(&self) -> Option<Scalar> {
        let r = self.as_rational()?;
        rational_sqrt(r).map(Scalar::from_rational)
    }
}

/// Square root of a rational when numerator and denominator are perfect squares.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

fn binop(a: &Scalar, b: &Scalar, fe: impl Fn(&GaussianRational, &GaussianRational) -> GaussianRational, ff: impl Fn(Complex64, Complex64) -> Complex64) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(fe(x, y)),
        _ => Scalar::Float(ff(a.to_complex(), b.to_complex())),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussianRational::add, |x, y| x + y)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussianRational::sub, |x, y| x - y)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        binop(self, rhs, GaussianRational::mul, |x, y| x * y)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on exact division by zero; use [`Scalar::inv`] for a checked path.
    fn div(self, rhs: &Scalar) -> Scalar {
        let inv = rhs.inv().expect("division by zero scalar");
        self * &inv
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussianRational { re: -g.re.clone(), im: -g.im.clone() }),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<Complex64> for Scalar {
    fn from(c: Complex64) -> Self {
        Scalar::Float(c)
    }
}

// ---------------------------------------------------------------------------
// Text syntax: "p/q", "p/q+r/s*i" (exact) and decimal literals (float).

fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_f64(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => {
                if g.im.is_zero() {
                    write!(f, "{}", fmt_ratio(&g.re))
                } else if g.re.is_zero() {
                    write!(f, "{}*i", fmt_ratio(&g.im))
                } else {
                    let sign = if g.im.is_negative() { '-' } else { '+' };
                    write!(f, "{}{}{}*i", fmt_ratio(&g.re), sign, fmt_ratio(&g.im.abs()))
                }
            }
            Scalar::Float(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", fmt_f64(c.re))
                } else {
                    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
                    write!(f, "{}{}{}*i", fmt_f64(c.re), sign, fmt_f64(c.im.abs()))
                }
            }
        }
    }
}

fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad integer '{n}'"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad integer '{d}'"))?;
    if d.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(BigRational::new(n, d))
}

/// Splits "x+y*i" at the sign introducing the imaginary part. Returns (real, imag) strings.
fn split_complex(s: &str) -> Result<(Option<&str>, Option<String>), String> {
    let s = s.trim();
    let Some(body) = s.strip_suffix("*i") else {
        if let Some(b) = s.strip_suffix('i') {
            // bare "i", "-i", "2+i"
            let head = b.trim_end();
            if head.is_empty() || head == "+" || head == "-" || head.ends_with('+') || head.ends_with('-') {
                let (re, sign) = match head.char_indices().rev().find(|&(i, c)| (c == '+' || c == '-') && i > 0) {
                    Some((i, c)) => (Some(&head[..i]), c),
                    None => (None, if head.starts_with('-') { '-' } else { '+' }),
                };
                let im = if sign == '-' { "-1".to_string() } else { "1".to_string() };
                return Ok((re, Some(im)));
            }
        }
        return Ok((Some(s), None));
    };
    // Find the last '+'/'-' that is not at position 0 and not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    match split {
        Some(i) => Ok((Some(&body[..i]), Some(body[i..].trim_start_matches('+').to_string()))),
        None => Ok((None, Some(body.to_string()))),
    }
}

impl FromStr for Scalar {
    type Err = AqgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: String| AqgError::Parse { line: 0, message: format!("scalar '{s}': {m}") };
        let t = s.trim();
        if t.is_empty() {
            return Err(err("empty".into()));
        }
        let is_float = t.contains('.') || t.contains('e') || t.contains('E');
        let (re, im) = split_complex(t).map_err(err)?;
        if is_float {
            let re = match re {
                Some(r) => r.trim().parse::<f64>().map_err(|e| err(e.to_string()))?,
                None => 0.0,
            };
            let im = match im {
                Some(i) => i.trim().parse::<f64>().map_err(|e| err(e.to_string()))?,
                None => 0.0,
            };
            Ok(Scalar::float(re, im))
        } else {
            let re = match re {
                Some(r) => parse_ratio(r).map_err(err)?,
                None => BigRational::zero(),
            };
            let im = match im {
                Some(i) => parse_ratio(&i).map_err(err)?,
                None => BigRational::zero(),
            };
            Ok(Scalar::gaussian(re, im))
        }
    }
}

// ---------------------------------------------------------------------------
// Positive spectra and complex powers.

/// An eigenvalue certified to be strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveEigenvalue {
    pub value: Scalar,
    pub certified_positive: bool,
}

impl PositiveEigenvalue {
    /// Certifies `value > 0`: exactly for the exact tier, up to `tol` for floats.
    pub fn certify(value: Scalar, tol: f64) -> Result<Self, AqgError> {
        let ok = match &value {
            Scalar::Exact(g) => g.im.is_zero() && g.re.is_positive(),
            Scalar::Float(c) => c.re > tol && c.im.abs() <= tol,
        };
        if ok {
            Ok(Self { value, certified_positive: true })
        } else {
            Err(AqgError::SpectrumViolation(value.to_string()))
        }
    }

    fn ln(&self) -> Result<f64, AqgError> {
        if !self.certified_positive {
            return Err(AqgError::SpectrumViolation(self.value.to_string()));
        }
        let v = self.value.to_complex().re;
        if v <= 0.0 {
            return Err(AqgError::SpectrumViolation(self.value.to_string()));
        }
        Ok(v.ln())
    }

    fn is_exact_one(&self) -> bool {
        self.value.is_exact() && self.value.is_one()
    }
}

/// `λ^{it} = exp(i t ln λ)`.
///
/// Returns exact `1` when `t == 0` or `λ` is exactly `1`; otherwise a float.
pub fn scalar_pow_it(lambda: &PositiveEigenvalue, t: f64) -> Result<Scalar, AqgError> {
    let ln = lambda.ln()?;
    if t == 0.0 || lambda.is_exact_one() {
        return Ok(Scalar::one());
    }
    Ok(Scalar::Float(Complex64::new(0.0, t * ln).exp()))
}

/// Analytic extension `λ^{iz} = exp(i z ln λ)`.
///
/// Stays exact when `iz` is an integer or a half-integer whose square root is
/// rational (e.g. `z = -i` gives `λ`, `z = -i/2` gives `λ^{1/2}`).
pub fn scalar_pow_z(lambda: &PositiveEigenvalue, z: Complex64) -> Result<Scalar, AqgError> {
    let ln = lambda.ln()?;
    if lambda.value.is_exact() {
        // iz = -im(z) + i re(z); exact only when iz is real.
        if z.re == 0.0 {
            let e = -z.im;
            if e == e.trunc() && e.abs() < 1e6 {
                return lambda.value.powi(e as i64);
            }
            let twice = 2.0 * e;
            if twice == twice.trunc() && twice.abs() < 1e6 {
                if let Some(root) = lambda.value.exact_sqrt() {
                    return root.powi(twice as i64);
                }
            }
        }
        if lambda.is_exact_one() {
            return Ok(Scalar::one());
        }
    }
    let iz = Complex64::new(0.0, 1.0) * z;
    Ok(Scalar::Float((iz * ln).exp()))
}

/// Total order on exact reals, used for sorting spectra.
pub fn cmp_real(a: &Scalar, b: &Scalar) -> Ordering {
    match (a.as_rational(), b.as_rational()) {
        (Some(x), Some(y)) => x.cmp(y),
        _ => a.to_complex().re.partial_cmp(&b.to_complex().re).unwrap_or(Ordering::Equal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pe(s: Scalar) -> PositiveEigenvalue {
        PositiveEigenvalue::certify(s, DEFAULT_TOLERANCE).unwrap()
    }

    #[test]
    fn exact_field_ops() {
        let a: Scalar = "1/2+3/4*i".parse().unwrap();
        let b: Scalar = "-2/3".parse().unwrap();
        let p = &a * &b;
        assert_eq!(p.to_string(), "-1/3-1/2*i");
        assert_eq!(&(&p / &b) - &a, Scalar::zero());
        assert_eq!((&a * &a.conj()).to_string(), "13/16");
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "-3/5", "1/2+3/4*i", "-1/2-3/4*i", "5/7*i", "-1*i"] {
            let x: Scalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            assert!(x.is_exact());
        }
        let i: Scalar = "i".parse().unwrap();
        assert_eq!(i, Scalar::i());
        let f: Scalar = "1.5-2.0*i".parse().unwrap();
        assert_eq!(f, Scalar::float(1.5, -2.0));
        assert_eq!(f.to_string(), "1.5-2.0*i");
        let e: Scalar = "1e-3".parse().unwrap();
        assert!(!e.is_exact());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn promotion_is_one_way() {
        let x = Scalar::ratio(1, 3);
        let y = Scalar::float(1.0, 0.0);
        assert!(!(&x + &y).is_exact());
        assert!((&x * &x).is_exact());
    }

    #[test]
    fn pow_it_examples() {
        assert_eq!(scalar_pow_it(&pe(Scalar::one()), 3.7).unwrap(), Scalar::one());
        let v = scalar_pow_it(&pe(Scalar::ratio(1, 4)), 1.0).unwrap();
        let expected = Complex64::new(0.0, -(4f64).ln()).exp();
        assert!((v.to_complex() - expected).norm() < 1e-12);
        assert!((v.abs() - 1.0).abs() < 1e-12);
        assert_eq!(scalar_pow_it(&pe(Scalar::int(5)), 0.0).unwrap(), Scalar::one());
    }

    #[test]
    fn pow_z_examples() {
        let nine = pe(Scalar::int(9));
        assert_eq!(scalar_pow_z(&nine, Complex64::new(0.0, -1.0)).unwrap(), Scalar::int(9));
        assert_eq!(scalar_pow_z(&nine, Complex64::new(0.0, -0.5)).unwrap(), Scalar::int(3));
        assert_eq!(scalar_pow_z(&nine, Complex64::new(0.0, 0.5)).unwrap(), Scalar::ratio(1, 3));
        let two = scalar_pow_z(&pe(Scalar::int(2)), Complex64::new(0.0, -0.5)).unwrap();
        assert!(!two.is_exact());
        assert!((two.to_complex().re - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn spectrum_violation() {
        assert!(PositiveEigenvalue::certify(Scalar::int(-1), 1e-9).is_err());
        assert!(PositiveEigenvalue::certify(Scalar::zero(), 1e-9).is_err());
        assert!(PositiveEigenvalue::certify(Scalar::i(), 1e-9).is_err());
        let bogus = PositiveEigenvalue { value: Scalar::int(-2), certified_positive: true };
        assert!(matches!(scalar_pow_it(&bogus, 1.0), Err(AqgError::SpectrumViolation(_))));
    }

    #[test]
    fn rational_sqrt_detection() {
        assert_eq!(Scalar::ratio(9, 16).exact_sqrt(), Some(Scalar::ratio(3, 4)));
        assert_eq!(Scalar::ratio(2, 1).exact_sqrt(), None);
        assert_eq!(Scalar::ratio(-4, 1).exact_sqrt(), None);
    }
}
