//! Conversions between exact values and floats, and the `{num, den}` wire form.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact fraction serialized as decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for Fraction {
    fn from(r: &BigRational) -> Self {
        Fraction {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl Fraction {
    pub fn to_rational(&self) -> Option<BigRational> {
        let num: BigInt = self.num.parse().ok()?;
        let den: BigInt = self.den.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    }
}

/// Natural log of `|x|`, valid far beyond the `f64` range. `-inf` for zero.
pub fn ln_abs(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Nearest `f64`; saturates to `±inf` outside the representable range.
pub fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(match x.sign() {
        Sign::Minus => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    })
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * (ln_abs(r.numer()) - ln_abs(r.denom())).exp()
}

/// Shortest round-trip decimal, switching to exponent form for very large or
/// very small magnitudes so output stays compact and stable.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn ln_abs_large_values() {
        let x = BigInt::one() << 5000u32;
        let expected = 5000.0 * std::f64::consts::LN_2;
        assert!((ln_abs(&x) - expected).abs() < 1e-9);
        assert!((ln_abs(&BigInt::from(-7)) - 7f64.ln()).abs() < 1e-15);
        assert_eq!(ln_abs(&BigInt::zero()), f64::NEG_INFINITY);
    }

    #[test]
    fn ratio_conversion_with_huge_parts() {
        let num = -(BigInt::from(3) << 3000u32);
        let den = BigInt::one() << 3002u32;
        let r = BigRational::new(num, den);
        assert!((ratio_to_f64(&r) + 0.75).abs() < 1e-12);
    }

    #[test]
    fn fraction_wire_form() {
        let r = BigRational::new(BigInt::from(-25), BigInt::from(256));
        let f = Fraction::from(&r);
        assert_eq!(f.num, "-25");
        assert_eq!(f.den, "256");
        assert_eq!(f.to_rational().unwrap(), r);
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(-0.09765625), "-0.09765625");
        assert_eq!(format_float(3.0), "3");
        assert_eq!(format_float(1e300), "1e300");
    }
}
