//! Small exact-arithmetic helpers shared by the lattice modules.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of a negative number");
    n.sqrt()
}

/// `Some(r)` with `r >= 0` and `r * r == n`, if `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = isqrt(n);
    (&r * &r == *n).then_some(r)
}

pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Returns `(g, a, b)` with `a*x + b*y = g = gcd(x, y) >= 0`.
pub fn ext_gcd(x: &BigInt, y: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = x.extended_gcd(y);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Integer `t` with `t*t <= x` for a non-negative rational, i.e. floor(sqrt(x)).
pub fn floor_sqrt_q(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    // floor(sqrt(p/q)) = floor(sqrt(p*q)/q)
    let p = x.numer();
    let d = x.denom();
    let mut t = isqrt(&(p * d)) / d;
    while qi(&((&t + 1u32) * (&t + 1u32))) <= *x {
        t += 1u32;
    }
    while qi(&(&t * &t)) > *x {
        t -= 1u32;
    }
    t
}

/// Sign of `a + b*sqrt(d)` for rationals `a`, `b` and a non-negative integer `d`.
pub fn sign_surd(a: &Q, b: &Q, d: &BigInt) -> i32 {
    let sa = sgn_q(a);
    let sb = if d.is_zero() { 0 } else { sgn_q(b) };
    if sa == 0 {
        return sb;
    }
    if sb == 0 || sa == sb {
        return sa;
    }
    // opposite signs: compare a^2 with b^2 d
    let lhs = a * a;
    let rhs = b * b * qi(d);
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => 0,
    }
}

pub fn sgn_q(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub fn sgn(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix, by
/// symmetric Gaussian elimination with 2x2 pivot fallback.
pub fn inertia(m: &[Vec<Q>]) -> (usize, usize, usize) {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    loop {
        let n = a.len();
        if n == 0 {
            break;
        }
        if let Some(i) = (0..n).find(|&i| !a[i][i].is_zero()) {
            let p = a[i][i].clone();
            if p.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let b = rest
                .iter()
                .map(|&r| {
                    rest.iter()
                        .map(|&c| &a[r][c] - &a[r][i] * &a[i][c] / &p)
                        .collect()
                })
                .collect();
            a = b;
            continue;
        }
        // zero diagonal: find an off-diagonal entry
        let off = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| i < j && !a[i][j].is_zero());
        match off {
            None => {
                zero += n;
                break;
            }
            Some((i, j)) => {
                // a 2x2 block [[0,x],[x,0]] contributes one positive and one negative
                pos += 1;
                neg += 1;
                let x = a[i][j].clone();
                let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
                // Schur complement of [[0,x],[x,0]], whose inverse is [[0,1/x],[1/x,0]]
                let b = rest
                    .iter()
                    .map(|&r| {
                        rest.iter()
                            .map(|&c| {
                                let corr = (&a[r][i] * &a[j][c] + &a[r][j] * &a[i][c]) / &x;
                                &a[r][c] - corr
                            })
                            .collect()
                    })
                    .collect();
                a = b;
            }
        }
    }
    (pos, neg, zero)
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Parse a JSON integer given either as a number or a decimal string.
pub fn int_from_json(v: &serde_json::Value) -> Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| format!("not an integer: {n}")),
        serde_json::Value::String(s) => s.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {s:?}")),
        other => Err(format!("expected integer, got {other}")),
    }
}

/// Parse a rational written `p`, `p/q` (string) or a JSON integer.
pub fn rational_from_json(v: &serde_json::Value) -> Result<Q, String> {
    match v {
        serde_json::Value::String(s) => parse_rational(s),
        _ => int_from_json(v).map(Q::from_integer),
    }
}

pub fn parse_rational(s: &str) -> Result<Q, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| format!("not a rational: {s:?}")),
        Some((p, d)) => {
            let p: BigInt = p.trim().parse().map_err(|_| format!("not a rational: {s:?}"))?;
            let d: BigInt = d.trim().parse().map_err(|_| format!("not a rational: {s:?}"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(p, d))
        }
    }
}

pub fn rational_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapters writing integers and rationals as decimal strings.
pub mod serde_str {
    use super::{int_from_json, rational_from_json, rational_to_string, Q};
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        int_from_json(&serde_json::Value::deserialize(de)?).map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<BigInt>, ser: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => ser.serialize_some(&x.to_string()),
                None => ser.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<BigInt>, D::Error> {
            match serde_json::Value::deserialize(de)? {
                serde_json::Value::Null => Ok(None),
                v => int_from_json(&v).map(Some).map_err(D::Error::custom),
            }
        }
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Q, ser: S) -> Result<S::Ok, S::Error> {
            ser.serialize_str(&rational_to_string(x))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Q, D::Error> {
            rational_from_json(&serde_json::Value::deserialize(de)?).map_err(D::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_sqrt_of_rationals() {
        assert_eq!(floor_sqrt_q(&Q::new(int(9), int(4))), int(1));
        assert_eq!(floor_sqrt_q(&q(16)), int(4));
        assert_eq!(floor_sqrt_q(&Q::new(int(17), int(1))), int(4));
        assert_eq!(floor_sqrt_q(&Q::new(int(1), int(5))), int(0));
    }

    #[test]
    fn surd_signs() {
        // 3 - 2*sqrt(2) > 0, 1 - sqrt(2) < 0
        assert_eq!(sign_surd(&q(3), &q(-2), &int(2)), 1);
        assert_eq!(sign_surd(&q(1), &q(-1), &int(2)), -1);
        assert_eq!(sign_surd(&q(-2), &q(1), &int(4)), 0);
    }

    #[test]
    fn inertia_of_hyperbolic_plane_and_e8() {
        let u = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(inertia(&u), (1, 1, 0));
        let d = vec![vec![q(1), q(-1)], vec![q(-1), q(0)]];
        assert_eq!(inertia(&d), (1, 1, 0));
    }

    #[test]
    fn bareiss_det() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(2)]];
        assert_eq!(det(&m), int(3));
        let z = vec![vec![int(0), int(1), int(0)], vec![int(1), int(0), int(0)], vec![int(0), int(0), int(-2)]];
        assert_eq!(det(&z), int(2));
    }
}

/// `Vec<BigInt>` as a list of decimal strings.
pub mod serde_str_vec {
    use super::serde_str;
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "serde_str")] BigInt);

    pub fn serialize<S: Serializer>(xs: &[BigInt], ser: S) -> Result<S::Ok, S::Error> {
        xs.iter().map(|x| Item(x.clone())).collect::<Vec<_>>().serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigInt>, D::Error> {
        Ok(Vec::<Item>::deserialize(de)?.into_iter().map(|i| i.0).collect())
    }
}

/// `(BigInt, BigInt)` as two decimal strings.
pub mod serde_str_pair {
    use super::serde_str_vec;
    use num_bigint::BigInt;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &(BigInt, BigInt), ser: S) -> Result<S::Ok, S::Error> {
        serde_str_vec::serialize(&[x.0.clone(), x.1.clone()], ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<(BigInt, BigInt), D::Error> {
        let v = serde_str_vec::deserialize(de)?;
        match <[BigInt; 2]>::try_from(v) {
            Ok([a, b]) => Ok((a, b)),
            Err(_) => Err(D::Error::custom("expected two integers")),
        }
    }
}
