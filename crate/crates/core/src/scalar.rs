//! Exact rational-complex coefficients.

use num::{BigInt, BigRational, Complex, One, Zero};
use serde_json::{json, Value};

use crate::error::{AlgebraError, Result};

pub type Scalar = Complex<BigRational>;

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn from_int(n: i64) -> Scalar {
    Scalar::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
}

/// `(re_num / re_den) + (im_num / im_den) i`
pub fn rational(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Scalar {
    Scalar::new(
        BigRational::new(re_num.into(), re_den.into()),
        BigRational::new(im_num.into(), im_den.into()),
    )
}

pub fn imaginary_unit() -> Scalar {
    Scalar::i()
}

pub fn encode(c: &Scalar) -> Value {
    json!({ "re": c.re.to_string(), "im": c.im.to_string() })
}

pub fn decode(v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(from_int)
            .ok_or_else(|| AlgebraError::Parse(format!("coefficient {n} is not an integer"))),
        Value::Object(map) => {
            let part = |key: &str| -> Result<BigRational> {
                match map.get(key) {
                    None => Ok(BigRational::zero()),
                    Some(Value::Number(n)) => n
                        .as_i64()
                        .map(|i| BigRational::from_integer(i.into()))
                        .ok_or_else(|| AlgebraError::Parse(format!("bad {key} part {n}"))),
                    Some(Value::String(s)) => s
                        .parse::<BigRational>()
                        .map_err(|e| AlgebraError::Parse(format!("bad {key} part {s:?}: {e}"))),
                    Some(other) => Err(AlgebraError::Parse(format!("bad {key} part {other}"))),
                }
            };
            Ok(Scalar::new(part("re")?, part("im")?))
        }
        other => Err(AlgebraError::Parse(format!("bad coefficient {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_and_products_are_exact() {
        let a = rational(1, 3, 2, 5);
        let b = a.conj();
        let n = &a * &b;
        assert_eq!(n, rational(25 + 4 * 9, 225, 0, 1));
        assert_eq!(&a + &zero(), a);
    }

    #[test]
    fn json_roundtrip() {
        let a = rational(-7, 4, 3, 1);
        assert_eq!(decode(&encode(&a)).unwrap(), a);
        assert_eq!(decode(&json!(5)).unwrap(), from_int(5));
    }
}
