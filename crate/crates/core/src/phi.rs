//! The problem datum `φ`, with `f(z) = z(1 - φ(z))` and `φ(0) = 0`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::arith::{format_rational, parse_rational, rational_to_f64, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum PhiKind {
    /// `φ_1, ..., φ_m`; the constant term is implicit and zero.
    Explicit(Vec<Rational>),
    /// `φ(z) = z`, the q-Catalan case.
    Catalan,
    /// `φ(z) = 1 - (1 - z)^ρ`, `0 < ρ < 1`.
    FractionalCatalan(f64),
    /// `φ(z) = e^λ (e^z - 1)`, `λ ≥ 0`.
    Exponential(f64),
    /// `φ(-z)` where `φ` is the inner spec.
    Alternating(Box<PhiSpec>),
}

/// A `φ` together with its metadata: `zeta`, the smallest positive root of
/// `φ(x) = 1` when known in closed form, and `rho`, the regular-variation
/// index of the renewal sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec {
    kind: PhiKind,
    zeta: Option<f64>,
    rho: f64,
}

/// A single coefficient `φ_n`: exact when the datum is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum PhiCoeff {
    Exact(Rational),
    Real(f64),
}

impl PhiCoeff {
    pub fn to_f64(&self) -> f64 {
        match self {
            PhiCoeff::Exact(r) => rational_to_f64(r),
            PhiCoeff::Real(x) => *x,
        }
    }
}

impl PhiSpec {
    pub fn catalan() -> Self {
        Self { kind: PhiKind::Catalan, zeta: Some(1.0), rho: 1.0 }
    }

    /// `coeffs` are `φ_1, φ_2, ...`. Trailing zeros are dropped.
    pub fn explicit(mut coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidArgument(
                "explicit phi coefficients must be nonnegative (wrap in alt: for signs)".into(),
            ));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let sum: Rational = coeffs.iter().sum();
        let zeta = sum.is_one().then_some(1.0);
        Ok(Self { kind: PhiKind::Explicit(coeffs), zeta, rho: 1.0 })
    }

    pub fn fractional(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidArgument(format!("fractional rho must lie in (0,1), got {rho}")));
        }
        Ok(Self { kind: PhiKind::FractionalCatalan(rho), zeta: Some(1.0), rho })
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("exponential lambda must be >= 0, got {lambda}")));
        }
        let zeta = (-lambda).exp().ln_1p();
        Ok(Self { kind: PhiKind::Exponential(lambda), zeta: Some(zeta), rho: 1.0 })
    }

    /// `φ(-z)` built from an inner spec; the metadata of the inner spec is
    /// the one that matters for the asymptotic statements.
    pub fn alternating(inner: PhiSpec) -> Result<Self> {
        if matches!(inner.kind, PhiKind::Alternating(_)) {
            return Err(Error::InvalidArgument("nested alternating wrappers are not supported".into()));
        }
        let (zeta, rho) = (inner.zeta, inner.rho);
        Ok(Self { kind: PhiKind::Alternating(Box::new(inner)), zeta, rho })
    }

    /// Overrides `ρ`. Values above 1 are impossible for a nonnegative `φ`.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidArgument(format!("rho must lie in (0,1], got {rho}")));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn kind(&self) -> &PhiKind {
        &self.kind
    }

    pub fn zeta(&self) -> Option<f64> {
        self.zeta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Exact `ζ` when it is known to be rational (here: `ζ = 1`).
    pub fn zeta_exact(&self) -> Option<Rational> {
        match &self.kind {
            PhiKind::Catalan => Some(Rational::one()),
            PhiKind::Explicit(_) if self.zeta == Some(1.0) => Some(Rational::one()),
            _ => None,
        }
    }

    pub fn inner(&self) -> Option<&PhiSpec> {
        match &self.kind {
            PhiKind::Alternating(inner) => Some(inner),
            _ => None,
        }
    }

    /// True when every coefficient is rational.
    pub fn is_exact(&self) -> bool {
        match &self.kind {
            PhiKind::Explicit(_) | PhiKind::Catalan => true,
            PhiKind::Alternating(inner) => inner.is_exact(),
            _ => false,
        }
    }

    /// Degree of `φ` when it is a polynomial.
    pub fn degree(&self) -> Option<usize> {
        match &self.kind {
            PhiKind::Explicit(c) => Some(c.len()),
            PhiKind::Catalan => Some(1),
            PhiKind::Alternating(inner) => inner.degree(),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self.kind, PhiKind::Alternating(_))
    }

    /// `φ_n` for `n ≥ 1`; `φ_0 = 0`.
    pub fn phi_coeff(&self, n: usize) -> PhiCoeff {
        if n == 0 {
            return PhiCoeff::Exact(Rational::zero());
        }
        match &self.kind {
            PhiKind::Explicit(c) => PhiCoeff::Exact(c.get(n - 1).cloned().unwrap_or_else(Rational::zero)),
            PhiKind::Catalan => PhiCoeff::Exact(if n == 1 { Rational::one() } else { Rational::zero() }),
            PhiKind::FractionalCatalan(rho) => PhiCoeff::Real(fractional_coeffs(*rho, n)[n]),
            PhiKind::Exponential(lambda) => PhiCoeff::Real(exponential_coeffs(*lambda, n)[n]),
            PhiKind::Alternating(inner) => match inner.phi_coeff(n) {
                PhiCoeff::Exact(r) if n % 2 == 1 => PhiCoeff::Exact(-r),
                PhiCoeff::Real(x) if n % 2 == 1 => PhiCoeff::Real(-x),
                c => c,
            },
        }
    }

    /// `φ_0..=φ_max` as rationals; fails for irrational data.
    pub fn exact_coeffs(&self, max_n: usize) -> Result<Vec<Rational>> {
        if !self.is_exact() {
            return Err(Error::NotExact(format!("{self} has irrational coefficients")));
        }
        Ok((0..=max_n)
            .map(|n| match self.phi_coeff(n) {
                PhiCoeff::Exact(r) => r,
                PhiCoeff::Real(_) => unreachable!("exact spec produced a real coefficient"),
            })
            .collect())
    }

    /// `φ_0..=φ_max` in floating point.
    pub fn float_coeffs(&self, max_n: usize) -> Vec<f64> {
        match &self.kind {
            PhiKind::FractionalCatalan(rho) => fractional_coeffs(*rho, max_n),
            PhiKind::Exponential(lambda) => exponential_coeffs(*lambda, max_n),
            PhiKind::Alternating(inner) => inner
                .float_coeffs(max_n)
                .into_iter()
                .enumerate()
                .map(|(n, c)| if n % 2 == 1 { -c } else { c })
                .collect(),
            _ => (0..=max_n).map(|n| self.phi_coeff(n).to_f64()).collect(),
        }
    }
}

/// `ρ(1-ρ)(2-ρ)...(n-1-ρ)/n!` for `n = 0..=max_n`.
fn fractional_coeffs(rho: f64, max_n: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_n + 1];
    if max_n >= 1 {
        out[1] = rho;
    }
    for n in 2..=max_n {
        out[n] = out[n - 1] * (n as f64 - 1.0 - rho) / n as f64;
    }
    out
}

/// `e^λ / n!` for `n = 1..=max_n`.
fn exponential_coeffs(lambda: f64, max_n: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_n + 1];
    let mut c = lambda.exp();
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        c /= n as f64;
        *slot = c;
    }
    out
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            PhiKind::Catalan => write!(f, "catalan"),
            PhiKind::FractionalCatalan(rho) => write!(f, "fractional:{rho}"),
            PhiKind::Exponential(lambda) => write!(f, "exponential:{lambda}"),
            PhiKind::Explicit(c) => {
                let parts: Vec<String> = c
                    .iter()
                    .map(|r| if r.is_integer() { r.numer().to_string() } else { format_rational(r) })
                    .collect();
                write!(f, "explicit:{}", parts.join(","))
            }
            PhiKind::Alternating(inner) => write!(f, "alt:{inner}"),
        }
    }
}

/// Grammar: `catalan`, `fractional:<rho>`, `exponential:<lambda>`,
/// `explicit:<c1,c2,...>` (rationals as `a/b`), and the prefix `alt:`.
impl FromStr for PhiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("alt:") {
            return PhiSpec::alternating(rest.parse()?);
        }
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let real = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Parse(format!("{head} needs a parameter")))?;
            a.trim()
                .parse::<f64>()
                .or_else(|_| parse_rational(a).map(|r| rational_to_f64(&r)))
                .map_err(|_| Error::Parse(format!("bad parameter {a:?} for {head}")))
        };
        match head {
            "catalan" if arg.is_none() => Ok(PhiSpec::catalan()),
            "fractional" => PhiSpec::fractional(real(arg)?),
            "exponential" => PhiSpec::exponential(real(arg)?),
            "explicit" => {
                let a = arg.ok_or_else(|| Error::Parse("explicit needs coefficients".into()))?;
                let coeffs = a.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
                PhiSpec::explicit(coeffs)
            }
            _ => Err(Error::Parse(format!("unknown phi spec {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn coefficient_examples() {
        let c = PhiSpec::catalan();
        assert_eq!(c.phi_coeff(1), PhiCoeff::Exact(int(1)));
        assert_eq!(c.phi_coeff(2), PhiCoeff::Exact(int(0)));
        let fr = PhiSpec::fractional(0.5).unwrap();
        assert!((fr.phi_coeff(2).to_f64() - 0.125).abs() < 1e-16);
        let ex = PhiSpec::exponential(0.0).unwrap();
        assert!((ex.phi_coeff(3).to_f64() - 1.0 / 6.0).abs() < 1e-16);
        let alt = PhiSpec::alternating(PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap()).unwrap();
        assert_eq!(alt.phi_coeff(1), PhiCoeff::Exact(rat(-1, 2)));
        assert_eq!(alt.phi_coeff(2), PhiCoeff::Exact(rat(1, 2)));
        assert_eq!(alt.phi_coeff(0), PhiCoeff::Exact(int(0)));
    }

    #[test]
    fn metadata() {
        let e = PhiSpec::explicit(vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(e.zeta(), Some(1.0));
        assert_eq!(e.zeta_exact(), Some(int(1)));
        assert_eq!(PhiSpec::explicit(vec![rat(1, 2)]).unwrap().zeta(), None);
        let x = PhiSpec::exponential(1.0).unwrap();
        assert!((x.zeta().unwrap() - 0.313_261_687_518_222_8).abs() < 1e-15);
        assert!(PhiSpec::explicit(vec![int(-1)]).is_err());
        assert!(PhiSpec::fractional(1.0).is_err());
        assert!(PhiSpec::catalan().with_rho(1.5).is_err());
        assert_eq!(PhiSpec::fractional(0.3).unwrap().rho(), 0.3);
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["catalan", "fractional:0.5", "exponential:1", "explicit:1/2,0,1/2", "alt:catalan", "alt:explicit:1/2,1/2"] {
            let spec: PhiSpec = s.parse().unwrap();
            let again: PhiSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again, "{s}");
        }
        assert!("alt:alt:catalan".parse::<PhiSpec>().is_err());
        assert!("bogus".parse::<PhiSpec>().is_err());
        assert!("explicit:".parse::<PhiSpec>().is_err());
        assert!("fractional".parse::<PhiSpec>().is_err());
    }

    #[test]
    fn float_and_exact_coeffs_agree() {
        let e: PhiSpec = "alt:explicit:1/3,0,2/3".parse().unwrap();
        let ex = e.exact_coeffs(5).unwrap();
        let fl = e.float_coeffs(5);
        for (a, b) in ex.iter().zip(&fl) {
            assert_eq!(rational_to_f64(a), *b);
        }
        assert!(PhiSpec::exponential(1.0).unwrap().exact_coeffs(3).is_err());
    }
}
