//! Exact rational and modular integer arithmetic.
//!
//! Everything here is exact: intermediates are widened to `i128` and any
//! result that does not fit back into `i64` is reported as
//! [`Error::Overflow`] rather than wrapped.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn narrow(x: i128, what: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(what))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Non-negative gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

/// Reduced fraction with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRational", into = "RawRational")]
pub struct Rational {
    num: i64,
    den: i64,
}

#[derive(Serialize, Deserialize)]
struct RawRational {
    num: i64,
    den: i64,
}

impl TryFrom<RawRational> for Rational {
    type Error = Error;
    fn try_from(raw: RawRational) -> Result<Self> {
        Rational::new(raw.num, raw.den)
    }
}

impl From<Rational> for RawRational {
    fn from(r: Rational) -> Self {
        RawRational { num: r.num, den: r.den }
    }
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Ok(Rational {
            num: narrow(num, "rational numerator")?,
            den: narrow(den, "rational denominator")?,
        })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn in_open_unit_interval(&self) -> bool {
        self.num > 0 && self.num < self.den
    }

    /// `1 - self`.
    pub fn complement(&self) -> Result<Self> {
        Self::from_i128(self.den as i128 - self.num as i128, self.den as i128)
    }

    pub fn checked_add(&self, other: &Rational) -> Result<Self> {
        let num = self.num as i128 * other.den as i128 + other.num as i128 * self.den as i128;
        Self::from_i128(num, self.den as i128 * other.den as i128)
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Self> {
        Self::from_i128(
            self.num as i128 * other.num as i128,
            self.den as i128 * other.den as i128,
        )
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parses `a/b`, an integer, or a finite decimal such as `0.37`.
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse rational from {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return Rational::new(a, b);
        }
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 18
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: i128 = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        Rational::from_i128(num, 10i128.pow(frac_part.len() as u32))
    }
}

/// Integers with `alpha·modulus_q + beta·modulus_m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BezoutPair {
    pub alpha: i64,
    pub beta: i64,
    pub modulus_q: i64,
    pub modulus_m: i64,
}

impl BezoutPair {
    pub fn solve(modulus_q: i64, modulus_m: i64) -> Result<Self> {
        if modulus_q <= 0 || modulus_m <= 0 {
            return Err(Error::InvalidArgument(format!(
                "Bézout moduli must be positive, got {modulus_q} and {modulus_m}"
            )));
        }
        let (g, alpha, beta) = extended_gcd(modulus_q, modulus_m)?;
        if g != 1 {
            return Err(Error::Inadmissible(format!(
                "gcd({modulus_q}, {modulus_m}) = {g}, no Bézout identity equal to 1"
            )));
        }
        Ok(BezoutPair {
            alpha,
            beta,
            modulus_q,
            modulus_m,
        })
    }

    pub fn holds(&self) -> bool {
        self.alpha as i128 * self.modulus_q as i128 + self.beta as i128 * self.modulus_m as i128 == 1
    }
}

/// Returns `(g, x, y)` with `g = gcd(a, b) > 0` and `a·x + b·y = g`.
pub fn extended_gcd(a: i64, b: i64) -> Result<(i64, i64, i64)> {
    if a == 0 && b == 0 {
        return Err(Error::InvalidArgument("extended_gcd(0, 0) is undefined".into()));
    }
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        old_r = -old_r;
        old_s = -old_s;
        old_t = -old_t;
    }
    Ok((
        narrow(old_r, "extended_gcd")?,
        narrow(old_s, "extended_gcd")?,
        narrow(old_t, "extended_gcd")?,
    ))
}

/// Inverse of `r` modulo `n`, in `[0, n)`.
pub fn mod_inverse(r: i64, n: i64) -> Result<i64> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("modulus must be positive, got {n}")));
    }
    let reduced = r.rem_euclid(n);
    let (g, x, _) = if reduced == 0 {
        (n, 0, 1)
    } else {
        extended_gcd(reduced, n)?
    };
    if g != 1 {
        return Err(Error::NotInvertible { r, n });
    }
    Ok(x.rem_euclid(n))
}

/// Exact `q / (q + p·d1·d2)`.
pub fn eta_for(q: i64, p: i64, d1: i64, d2: i64) -> Result<Rational> {
    if q < 1 || p < 1 || d1 < 1 || d2 < 1 {
        return Err(Error::InvalidArgument(format!(
            "q, p, d1, d2 must all be >= 1, got ({q}, {p}, {d1}, {d2})"
        )));
    }
    let pd = (p as i128)
        .checked_mul(d1 as i128 * d2 as i128)
        .ok_or(Error::Overflow("p·d1·d2"))?;
    Rational::from_i128(q as i128, q as i128 + pd)
}

/// An admissible transmissivity together with its minimal `(q, p)` and gauge dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaClass {
    pub eta: Rational,
    pub q: i64,
    pub p: i64,
    pub n: i64,
}

/// Recovers `(q, p, n)` with `eta = q/(q + p·d1·d2)` and `gcd(q, p·d1·d2) = 1`.
///
/// Writing `eta = a/b`, every solution is a multiple of the minimal one
/// `q = a·D/g`, `p = (b − a)/g` with `D = d1·d2` and `g = gcd(a·D, b − a)`.
/// Non-minimal solutions share a factor between `q` and `p·D`, so the
/// minimal one is the only candidate for the coprimality test.
pub fn classify_eta(eta: Rational, d1: i64, d2: i64) -> Result<EtaClass> {
    if !eta.in_open_unit_interval() {
        return Err(Error::InvalidArgument(format!(
            "transmissivity must lie in (0, 1), got {eta}"
        )));
    }
    if d1 < 1 || d2 < 1 {
        return Err(Error::InvalidArgument(format!(
            "code dimensions must be >= 1, got ({d1}, {d2})"
        )));
    }
    let a = eta.num() as i128;
    let b = eta.den() as i128;
    let dd = d1 as i128 * d2 as i128;
    let ad = a.checked_mul(dd).ok_or(Error::Overflow("a·d1·d2"))?;
    let g = gcd_u128(ad as u128, (b - a) as u128) as i128;
    let q = ad / g;
    let p = (b - a) / g;
    let pd = p.checked_mul(dd).ok_or(Error::Overflow("p·d1·d2"))?;
    let common = gcd_u128(q as u128, pd as u128);
    if common != 1 {
        return Err(Error::Inadmissible(format!(
            "{eta} needs q = {q}, p = {p} for d1 = {d1}, d2 = {d2}, but gcd(q, p·d1·d2) = {common}"
        )));
    }
    Ok(EtaClass {
        eta,
        q: narrow(q, "q")?,
        p: narrow(p, "p")?,
        n: narrow(q + pd, "n")?,
    })
}

/// All admissible transmissivities reachable with `q <= q_max`, `p <= p_max`,
/// sorted ascending; for repeated values the smallest `n` is kept.
pub fn enumerate_admissible_etas(d1: i64, d2: i64, q_max: i64, p_max: i64) -> Result<Vec<EtaClass>> {
    if d1 < 1 || d2 < 1 || q_max < 1 || p_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "dimensions and bounds must be >= 1, got d1={d1} d2={d2} q_max={q_max} p_max={p_max}"
        )));
    }
    let dd = d1.checked_mul(d2).ok_or(Error::Overflow("d1·d2"))?;
    let mut found: Vec<EtaClass> = Vec::new();
    for q in 1..=q_max {
        for p in 1..=p_max {
            let pd = p.checked_mul(dd).ok_or(Error::Overflow("p·d1·d2"))?;
            if gcd(q, pd) != 1 {
                continue;
            }
            let n = q.checked_add(pd).ok_or(Error::Overflow("n"))?;
            found.push(EtaClass {
                eta: Rational::new(q, n)?,
                q,
                p,
                n,
            });
        }
    }
    found.sort_by(|x, y| x.eta.cmp(&y.eta).then(x.n.cmp(&y.n)));
    found.dedup_by(|later, kept| later.eta == kept.eta);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b).unwrap()
    }

    #[test]
    fn rational_is_canonical() {
        let x = r(6, -8);
        assert_eq!((x.num(), x.den()), (-3, 4));
        assert_eq!(r(0, 5), r(0, 1));
        assert!(Rational::new(1, 0).is_err());
        assert!(r(1, 3) < r(1, 2));
        assert_eq!(r(1, 5).complement().unwrap(), r(4, 5));
    }

    #[test]
    fn rational_parsing() {
        assert_eq!("1/5".parse::<Rational>().unwrap(), r(1, 5));
        assert_eq!("0.37".parse::<Rational>().unwrap(), r(37, 100));
        assert_eq!("0.2".parse::<Rational>().unwrap(), r(1, 5));
        assert_eq!("-1.5".parse::<Rational>().unwrap(), r(-3, 2));
        assert_eq!("3".parse::<Rational>().unwrap(), r(3, 1));
        assert_eq!(".5".parse::<Rational>().unwrap(), r(1, 2));
        for bad in ["", ".", "1/0", "abc", "1e-3", "0.1.2"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn eta_for_examples() {
        assert_eq!(eta_for(1, 1, 2, 2).unwrap(), r(1, 5));
        assert_eq!(eta_for(1, 1, 1, 1).unwrap(), r(1, 2));
        assert_eq!(eta_for(2, 1, 2, 3).unwrap(), r(1, 4));
        assert_eq!(eta_for(2, 2, 2, 3).unwrap(), r(1, 7));
        assert!(eta_for(0, 1, 2, 2).is_err());
        assert!(eta_for(1, -1, 2, 2).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify_eta(r(1, 5), 2, 2).unwrap();
        assert_eq!((c.q, c.p, c.n), (1, 1, 5));
        let c = classify_eta(r(1, 2), 1, 1).unwrap();
        assert_eq!((c.q, c.p, c.n), (1, 1, 2));
        assert!(matches!(classify_eta(r(1, 3), 2, 2), Err(Error::Inadmissible(_))));
        assert!(matches!(classify_eta(r(1, 1), 2, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(classify_eta(r(3, 2), 2, 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn enumerate_examples() {
        let one = enumerate_admissible_etas(2, 2, 1, 1).unwrap();
        assert_eq!(one, vec![EtaClass { eta: r(1, 5), q: 1, p: 1, n: 5 }]);
        let small = enumerate_admissible_etas(1, 1, 2, 2).unwrap();
        let rows: Vec<_> = small.iter().map(|c| (c.eta, c.q, c.p, c.n)).collect();
        assert_eq!(
            rows,
            vec![(r(1, 3), 1, 2, 3), (r(1, 2), 1, 1, 2), (r(2, 3), 2, 1, 3)]
        );
    }

    #[test]
    fn dedup_keeps_minimal_n() {
        // q=1,p=1 and q=2,p=2 both give 1/2 at d=1, but only the first is coprime;
        // q=3,p=3 likewise. Check the kept representative is the smallest.
        let all = enumerate_admissible_etas(1, 1, 6, 6).unwrap();
        let half = all.iter().find(|c| c.eta == r(1, 2)).unwrap();
        assert_eq!(half.n, 2);
    }

    #[test]
    fn extended_gcd_examples() {
        assert_eq!(extended_gcd(1, 4).unwrap(), (1, 1, 0));
        let (g, x, y) = extended_gcd(3, 4).unwrap();
        assert_eq!(g, 1);
        assert_eq!(3 * x + 4 * y, 1);
        assert_eq!(extended_gcd(2, 4).unwrap(), (2, 1, 0));
        let (g, x, y) = extended_gcd(-6, 4).unwrap();
        assert_eq!(g, 2);
        assert_eq!(-6 * x + 4 * y, 2);
        assert!(extended_gcd(0, 0).is_err());
        assert_eq!(extended_gcd(0, -7).unwrap().0, 7);
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(4, 5).unwrap(), 4);
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(-1, 5).unwrap(), 4);
        assert_eq!(mod_inverse(2, 4), Err(Error::NotInvertible { r: 2, n: 4 }));
        assert!(mod_inverse(0, 1).is_ok());
        assert!(mod_inverse(0, 3).is_err());
    }

    #[test]
    fn bezout_pair() {
        let b = BezoutPair::solve(3, 8).unwrap();
        assert!(b.holds());
        assert!(matches!(BezoutPair::solve(2, 4), Err(Error::Inadmissible(_))));
    }
}
