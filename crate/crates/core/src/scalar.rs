//! Score scalars.
//!
//! Every kernel that orders items by model output is generic over [`Score`].
//! Floats work out of the box; [`BigRational`] gives exact comparisons of
//! scores read from decimal text, so two distinct decimals never collapse
//! into an accidental tie.

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, ToPrimitive};

/// A totally ordered (on finite values) model output.
pub trait Score: Clone + PartialOrd + Debug + ToPrimitive {
    /// `false` for NaN and the infinities.
    fn is_finite_score(&self) -> bool;

    /// Parses decimal text such as `0.25`, `-3`, or `1.5e-3`.
    fn parse_decimal(text: &str) -> Option<Self>;
}

macro_rules! float_score {
    ($($t:ty),*) => {$(
        impl Score for $t {
            fn is_finite_score(&self) -> bool {
                self.is_finite()
            }

            fn parse_decimal(text: &str) -> Option<Self> {
                text.trim().parse().ok()
            }
        }
    )*};
}

macro_rules! int_score {
    ($($t:ty),*) => {$(
        impl Score for $t {
            fn is_finite_score(&self) -> bool {
                true
            }

            fn parse_decimal(text: &str) -> Option<Self> {
                text.trim().parse().ok()
            }
        }
    )*};
}

float_score!(f32, f64);
int_score!(i32, i64);

impl Score for BigRational {
    fn is_finite_score(&self) -> bool {
        true
    }

    fn parse_decimal(text: &str) -> Option<Self> {
        parse_exact_decimal(text)
    }
}

fn parse_exact_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, unsigned) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut digits = BigInt::from_str(&format!("0{int_part}{frac_part}")).ok()?;
    if negative {
        digits = -digits;
    }
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * Pow::pow(&ten, scale.unsigned_abs()))
    } else {
        BigRational::new(digits, Pow::pow(&ten, scale.unsigned_abs()))
    };
    Some(value)
}
