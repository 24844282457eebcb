//! Arithmetic in the Gaussian integers ℤ[i].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, Integer, One, Signed, Zero};

use crate::error::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gaussian {
    pub re: BigInt,
    pub im: BigInt,
}

impl Gaussian {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        Gaussian {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Gaussian::new(0, 0)
    }

    pub fn one() -> Self {
        Gaussian::new(1, 0)
    }

    pub fn i() -> Self {
        Gaussian::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        Gaussian {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Gaussian::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// The quotient `self / d` when `d` divides `self` exactly.
    pub fn div_exact(&self, d: &Gaussian) -> Option<Gaussian> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm();
        let num = self * &d.conj();
        let (qr, rr) = num.re.div_rem(&n);
        let (qi, ri) = num.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(Gaussian { re: qr, im: qi })
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Gaussian) -> bool {
        other.div_exact(self).is_some()
    }

    /// Euclidean division with the quotient rounded to the nearest lattice point,
    /// so that `N(r) <= N(d) / 2`.
    pub fn div_rem_nearest(&self, d: &Gaussian) -> (Gaussian, Gaussian) {
        let n = d.norm();
        let num = self * &d.conj();
        let round = |x: &BigInt| -> BigInt {
            let two = BigInt::from(2);
            (x * &two + &n).div_floor(&(&n * &two))
        };
        let q = Gaussian {
            re: round(&num.re),
            im: round(&num.im),
        };
        let r = self - &(&q * d);
        (q, r)
    }

    /// The associate `u * self` lying in the half-open first quadrant (re > 0, im >= 0).
    pub fn first_quadrant(&self) -> Gaussian {
        self.normalize_by(4)
    }

    /// Normalizes modulo the cyclic unit subgroup of the given order (1, 2 or 4).
    pub fn normalize_by(&self, unit_order: u8) -> Gaussian {
        match unit_order {
            4 if !self.is_zero() => {
                let mut z = self.clone();
                while !(z.re.is_positive() && !z.im.is_negative()) {
                    z = &z * &Gaussian::i();
                }
                z
            }
            2 if self.re.is_negative() || (self.re.is_zero() && self.im.is_negative()) => -self,
            _ => self.clone(),
        }
    }

    /// Index `k` with `self == i^k`, if `self` is a unit.
    pub fn unit_index(&self) -> Option<u8> {
        let mut z = Gaussian::one();
        for k in 0..4u8 {
            if &z == self {
                return Some(k);
            }
            z = &z * &Gaussian::i();
        }
        None
    }
}

/// `(d, s, t)` with `s a + t b = d` and `d` a gcd of `a` and `b`.
pub fn ext_gcd(a: &Gaussian, b: &Gaussian) -> (Gaussian, Gaussian, Gaussian) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Gaussian::one(), Gaussian::zero());
    let (mut t0, mut t1) = (Gaussian::zero(), Gaussian::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem_nearest(&r1);
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &(&q * &s1);
        s0 = std::mem::replace(&mut s1, s);
        let t = &t0 - &(&q * &t1);
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0, s0, t0)
}

pub fn gcd(a: &Gaussian, b: &Gaussian) -> Gaussian {
    ext_gcd(a, b).0.first_quadrant()
}

impl<'a> Add<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn add(self, o: &Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn sub(self, o: &Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a Gaussian> for &'a Gaussian {
    type Output = Gaussian;
    fn mul(self, o: &Gaussian) -> Gaussian {
        Gaussian {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        Gaussian {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &Gaussian {
    type Output = Gaussian;
    fn neg(self) -> Gaussian {
        -(self.clone())
    }
}

impl fmt::Display for Gaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigInt| -> String {
            if im.is_one() {
                "i".to_string()
            } else if *im == -BigInt::one() {
                "-i".to_string()
            } else {
                format!("{im}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "{}{}", self.re, im)
                } else {
                    write!(f, "{}+{}", self.re, im)
                }
            }
        }
    }
}

impl FromStr for Gaussian {
    type Err = AlgebraError;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, `a+i`, `a-i` (whitespace ignored).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || AlgebraError::Parse(format!("not a Gaussian integer: {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err());
        }
        let parse_int = |x: &str| -> Result<BigInt, AlgebraError> {
            match x {
                "" | "+" => Ok(BigInt::one()),
                "-" => Ok(-BigInt::one()),
                _ => x.parse::<BigInt>().map_err(|_| err()),
            }
        };
        if let Some(body) = t.strip_suffix('i') {
            // Split at the last sign that is not the leading one.
            let split = body
                .char_indices()
                .skip(1)
                .filter(|(_, c)| *c == '+' || *c == '-')
                .map(|(i, _)| i)
                .last();
            match split {
                Some(k) => {
                    let re = body[..k].parse::<BigInt>().map_err(|_| err())?;
                    let im = parse_int(&body[k..])?;
                    Ok(Gaussian { re, im })
                }
                None => Ok(Gaussian {
                    re: BigInt::zero(),
                    im: parse_int(body)?,
                }),
            }
        } else {
            Ok(Gaussian {
                re: t.parse::<BigInt>().map_err(|_| err())?,
                im: BigInt::zero(),
            })
        }
    }
}
