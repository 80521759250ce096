//! Exact scalar fields: the rationals and prime fields `F_p`.
//!
//! Scalars do not carry their field. Every container that holds scalars
//! (series, matrices, tensors) carries a [`Field`] and routes arithmetic
//! through it, so mixing two fields is detected once at the container
//! boundary instead of on every scalar operation.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// The field all scalars of one computation live in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Field {
    Rationals,
    Prime(Arc<BigUint>),
}

/// A field element. Which variant is valid is decided by the owning [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Mod(BigUint),
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Field {
    /// Prime field with a primality check on `p`.
    pub fn prime(p: BigUint) -> Result<Self> {
        if !is_prime(&p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(Field::Prime(Arc::new(p)))
    }

    pub fn prime_u64(p: u64) -> Result<Self> {
        Self::prime(BigUint::from(p))
    }

    pub fn modulus(&self) -> Option<&BigUint> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(p),
        }
    }

    /// The modulus as a machine word when it fits below 2^63.
    pub fn small_modulus(&self) -> Option<u64> {
        self.modulus()
            .and_then(|p| p.to_u64())
            .filter(|&p| p < (1u64 << 63))
    }

    pub fn ensure_same(&self, other: &Field) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::zero()),
            Field::Prime(_) => Scalar::Mod(BigUint::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::one()),
            Field::Prime(_) => Scalar::Mod(BigUint::one()),
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rat(BigRational::from_integer(v.clone())),
            Field::Prime(p) => Scalar::Mod(reduce_signed(v, p)),
        }
    }

    /// Maps a rational into the field; fails in `F_p` when `p` divides the denominator.
    pub fn from_rational(&self, v: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rationals => Ok(Scalar::Rat(v.clone())),
            Field::Prime(p) => {
                let num = reduce_signed(v.numer(), p);
                let den = reduce_signed(v.denom(), p);
                let den_inv = mod_inverse(&den, p)
                    .ok_or_else(|| Error::Parse(format!("denominator of {v} vanishes mod {p}")))?;
                Ok(Scalar::Mod(num * den_inv % p.as_ref()))
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Mod(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rat(x) => x.is_one(),
            Scalar::Mod(x) => x.is_one(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p.as_ref()),
            _ => unreachable!("scalar does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (Field::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (Field::Prime(p), Scalar::Mod(x)) => {
                if x.is_zero() {
                    Scalar::Mod(BigUint::zero())
                } else {
                    Scalar::Mod(p.as_ref() - x)
                }
            }
            _ => unreachable!("scalar does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (Field::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (Field::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x * y) % p.as_ref()),
            _ => unreachable!("scalar does not belong to {self}"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (Field::Rationals, Scalar::Rat(x)) => Some(Scalar::Rat(x.recip())),
            (Field::Prime(p), Scalar::Mod(x)) => mod_inverse(x, p).map(Scalar::Mod),
            _ => unreachable!("scalar does not belong to {self}"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// Lifts a scalar to a rational, using the symmetric residue range for `F_p`.
    pub fn to_rational(&self, a: &Scalar) -> BigRational {
        match (self, a) {
            (_, Scalar::Rat(x)) => x.clone(),
            (Field::Prime(p), Scalar::Mod(x)) => {
                let half: BigUint = p.as_ref() >> 1;
                let v = if *x > half {
                    BigInt::from_biguint(Sign::Minus, p.as_ref() - x)
                } else {
                    BigInt::from(x.clone())
                };
                BigRational::from_integer(v)
            }
            (Field::Rationals, Scalar::Mod(_)) => unreachable!("residue in the rationals"),
        }
    }

    /// Canonical string: `"a/b"` or `"a"` for rationals, `"k"` for residues.
    pub fn format(&self, a: &Scalar) -> String {
        match a {
            Scalar::Rat(x) => {
                if x.denom().is_one() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Mod(x) => x.to_string(),
        }
    }

    /// Parses `"a"`, `"-a"` or `"a/b"`. Residues may be given unreduced or negative.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed scalar {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (
                n.trim().parse::<BigInt>().map_err(|_| bad())?,
                d.trim().parse::<BigInt>().map_err(|_| bad())?,
            ),
            None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        self.from_rational(&BigRational::new(num, den))
    }

    /// Uniform residue in `F_p`, or a small random rational in `[-bound, bound]`
    /// (with denominators up to 3) over `Q`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        match self {
            Field::Rationals => {
                let num = rng.gen_range(-bound..=bound);
                let den = rng.gen_range(1..=3i64);
                Scalar::Rat(BigRational::new(num.into(), den.into()))
            }
            Field::Prime(p) => {
                let v = match p.to_u64() {
                    Some(pv) => BigUint::from(rng.gen_range(0..pv)),
                    None => {
                        let bytes: Vec<u8> = (0..(p.bits() / 8 + 8)).map(|_| rng.gen()).collect();
                        BigUint::from_bytes_le(&bytes) % p.as_ref()
                    }
                };
                Scalar::Mod(v)
            }
        }
    }

    /// Random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> Scalar {
        loop {
            let v = self.random(rng, bound.max(1));
            if !self.is_zero(&v) {
                return v;
            }
        }
    }
}

fn reduce_signed(v: &BigInt, p: &BigUint) -> BigUint {
    let p_int = BigInt::from(p.clone());
    v.mod_floor(&p_int).to_biguint().expect("mod_floor is nonnegative")
}

fn mod_inverse(a: &BigUint, p: &BigUint) -> Option<BigUint> {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(p.clone());
    let g = a.extended_gcd(&m);
    if !g.gcd.is_one() {
        return None;
    }
    g.x.mod_floor(&m).to_biguint()
}

const SMALL_PRIMES: [u32; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Miller-Rabin with the first twenty primes as bases.
///
/// Deterministic for every `p < 3.3 * 10^24` (the first thirteen bases already
/// suffice there); above that the fixed base set makes it a strong probable
/// prime test.
pub fn is_prime(p: &BigUint) -> bool {
    if *p < BigUint::from(2u32) {
        return false;
    }
    for &q in &SMALL_PRIMES {
        let q = BigUint::from(q);
        if *p == q {
            return true;
        }
        if (p % &q).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let p_minus_one = p - &one;
    let mut d = p_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&d, p);
        if x == one || x == p_minus_one {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % p;
            if x == p_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime in `[2^(bits-1), 2^bits)`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> u64 {
    assert!((3..=63).contains(&bits), "prime size must be 3..=63 bits");
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    loop {
        let candidate = rng.gen_range(lo..hi) | 1;
        if is_prime(&BigUint::from(candidate)) {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primality_small_values() {
        let primes: Vec<u64> = (0..200).filter(|&n| is_prime(&BigUint::from(n))).collect();
        let sieve: Vec<u64> = (2..200u64)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(primes, sieve);
    }

    #[test]
    fn primality_rejects_carmichael_and_strong_pseudoprimes() {
        for n in [561u64, 1105, 1729, 2047, 3215031751, 3825123056546413051] {
            assert!(!is_prime(&BigUint::from(n)), "{n} is composite");
        }
        assert!(is_prime(&BigUint::from((1u64 << 61) - 1)));
        assert!(is_prime(&BigUint::from(18446744073709551557u64)));
    }

    #[test]
    fn non_prime_field_is_rejected() {
        assert!(matches!(Field::prime_u64(91), Err(Error::NotPrime(_))));
        assert!(Field::prime_u64(101).is_ok());
    }

    #[test]
    fn random_prime_has_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let p = random_prime(&mut rng, 62);
            assert!(p >= 1 << 61 && p < 1 << 62);
            assert!(is_prime(&BigUint::from(p)));
        }
    }

    #[test]
    fn rationals_are_canonical() {
        let q = Field::Rationals;
        let a = q.parse("6/-4").unwrap();
        assert_eq!(q.format(&a), "-3/2");
        assert_eq!(q.format(&q.parse("4/2").unwrap()), "2");
        assert!(q.parse("1/0").is_err());
        assert!(q.parse("x").is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime_u64(7).unwrap();
        let a = f.parse("-1").unwrap();
        assert_eq!(f.format(&a), "6");
        let half = f.parse("1/2").unwrap();
        assert_eq!(f.format(&half), "4");
        assert!(f.is_one(&f.mul(&half, &f.from_i64(2))));
        assert!(f.parse("1/7").is_err());
        assert_eq!(f.inv(&f.zero()), None);
        assert_eq!(f.format(&f.sub(&f.from_i64(2), &f.from_i64(5))), "4");
    }

    #[test]
    fn symmetric_lift() {
        let f = Field::prime_u64(11).unwrap();
        assert_eq!(f.to_rational(&f.from_i64(-3)), BigRational::from_integer((-3).into()));
        assert_eq!(f.to_rational(&f.from_i64(5)), BigRational::from_integer(5.into()));
    }
}
