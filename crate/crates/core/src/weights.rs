//! Closed-form critical quantities as functions of the rhombus half-angle.
//!
//! Everything here is generic over [`Real`] so the same formulas serve the
//! `f64` pipeline and cheap `f32` tabulation.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::lobachevsky;

fn open_unit_quarter<T: Real>(theta: T, what: &'static str) -> Result<T> {
    if theta > T::zero() && theta < T::FRAC_PI_2() {
        Ok(theta)
    } else {
        Err(Error::OutOfRange { what, value: theta.to_f64().unwrap_or(f64::NAN) })
    }
}

/// Critical Ising coupling J(θ) = ½ log((1 + sin θ)/cos θ).
pub fn critical_coupling<T: Real>(theta: T) -> Result<T> {
    let t = open_unit_quarter(theta, "critical_coupling")?;
    Ok(((T::one() + t.sin()) / t.cos()).ln() / T::lit(2.0))
}

/// Critical dimer weight ν(θ) = cot(θ/2) on the edge joining two decorations.
///
/// Accepts θ = π/2 as well, where the weight is exactly 1.
pub fn critical_dimer_weight<T: Real>(theta: T) -> Result<T> {
    if theta > T::zero() && theta <= T::FRAC_PI_2() {
        Ok(T::one() / (theta / T::lit(2.0)).tan())
    } else {
        Err(Error::OutOfRange { what: "critical_dimer_weight", value: theta.to_f64().unwrap_or(f64::NAN) })
    }
}

/// sinh J(θ) through the half-angle identity √(tan(θ/2) tan θ / 2).
pub fn sinh_coupling<T: Real>(theta: T) -> Result<T> {
    let t = open_unit_quarter(theta, "sinh_coupling")?;
    Ok(((t / T::lit(2.0)).tan() * t.tan() / T::lit(2.0)).sqrt())
}

/// Single-edge classes of the Fisher graph with a closed-form probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Triangle edge w_k z_k.
    Wz,
    /// Ring edge w_k z_{k+1}.
    WzNext,
    /// Triangle edge w_k v_k (or z_k v_k, same value).
    WvOrZv,
    /// Edge v_k(x) v_l(y) between two decorations.
    Vv,
}

impl std::str::FromStr for EdgeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wz" => Ok(EdgeKind::Wz),
            "wznext" | "wz_next" => Ok(EdgeKind::WzNext),
            "wv" | "zv" | "wv_or_zv" => Ok(EdgeKind::WvOrZv),
            "vv" => Ok(EdgeKind::Vv),
            other => Err(Error::Parse(format!("unknown edge kind `{other}`"))),
        }
    }
}

/// Probability that a single edge of the given kind is covered by the
/// critical Gibbs measure, at an edge with rhombus half-angle θ.
pub fn edge_probability_closed_form<T: Real>(kind: EdgeKind, theta: T) -> Result<T> {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    if kind == EdgeKind::WzNext {
        return Ok(half);
    }
    if !(theta > T::zero() && theta <= T::FRAC_PI_2()) {
        return Err(Error::OutOfRange { what: "edge_probability_closed_form", value: theta.to_f64().unwrap_or(f64::NAN) });
    }
    let pi = T::PI();
    // (π − 2θ)/cos θ → 2 as θ → π/2; use the limit directly at the endpoint.
    let ratio = if theta == T::FRAC_PI_2() { T::lit(2.0) } else { (pi - theta - theta) / theta.cos() };
    let base = ratio / (T::lit(4.0) * pi);
    Ok(match kind {
        EdgeKind::Wz => quarter + base,
        EdgeKind::WvOrZv => quarter - base,
        EdgeKind::Vv => half + base + base,
        EdgeKind::WzNext => unreachable!(),
    })
}

/// Probability that the two dual spins across an edge are both `+`, in
/// terms of the dual rhombus half-angle φ = π/2 − θ.
pub fn spin_same_sign_probability<T: Real>(phi: T) -> Result<T> {
    if !(phi >= T::zero() && phi <= T::FRAC_PI_2()) {
        return Err(Error::OutOfRange { what: "spin_same_sign_probability", value: phi.to_f64().unwrap_or(f64::NAN) });
    }
    let ratio = if phi == T::zero() { T::one() } else { phi / phi.sin() };
    Ok(T::lit(0.25) + ratio / (T::lit(2.0) * T::PI()))
}

/// Per-edge bracket of the dimer free energy:
/// ((π−2θ)/2π) log tan θ − ½ log cot(θ/2) − (L(θ) + L(π/2 − θ))/π.
pub fn free_energy_summand<T: Real>(theta: T) -> Result<T> {
    let t = open_unit_quarter(theta, "free_energy_summand")?;
    let pi = T::PI();
    let two = T::lit(2.0);
    let lob = lobachevsky(t) + lobachevsky(T::FRAC_PI_2() - t);
    Ok((pi - two * t) / (two * pi) * t.tan().ln() - (T::one() / (t / two).tan()).ln() / two - lob / pi)
}

/// Per-edge bracket of the Ising free energy: (θ/π) log tan θ + (L(θ) + L(π/2 − θ))/π.
pub fn ising_free_energy_summand<T: Real>(theta: T) -> Result<T> {
    let t = open_unit_quarter(theta, "ising_free_energy_summand")?;
    let pi = T::PI();
    let lob = lobachevsky(t) + lobachevsky(T::FRAC_PI_2() - t);
    Ok(t / pi * t.tan().ln() + lob / pi)
}

/// Per-edge entropy summand s(θ) of the dimer model.
///
/// Extends continuously to s(0⁺) = −½ log 2 and s(π/2) = 0.
pub fn entropy_summand<T: Real>(theta: T) -> Result<T> {
    if !(theta >= T::zero() && theta <= T::FRAC_PI_2()) {
        return Err(Error::OutOfRange { what: "entropy_summand", value: theta.to_f64().unwrap_or(f64::NAN) });
    }
    let two = T::lit(2.0);
    if theta == T::zero() {
        return Ok(-two.ln() / two);
    }
    if theta == T::FRAC_PI_2() {
        return Ok(T::zero());
    }
    let pi = T::PI();
    let cot = T::one() / theta.tan();
    let cot_half = T::one() / (theta / two).tan();
    let lob = lobachevsky(theta) + lobachevsky(T::FRAC_PI_2() - theta);
    Ok((pi - two * theta) / (two * pi) * (cot.ln() - cot_half.ln() / theta.cos()) + lob / pi)
}

/// The critical quantities attached to one rhombus half-angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalWeights<T: Real> {
    pub theta: T,
    pub coupling: T,
    pub sinh_coupling: T,
    pub dimer_weight: T,
}

pub type CriticalWeights64 = CriticalWeights<f64>;
pub type CriticalWeights32 = CriticalWeights<f32>;

impl<T: Real> CriticalWeights<T> {
    pub fn new(theta: T) -> Result<Self> {
        Ok(Self { theta, coupling: critical_coupling(theta)?, sinh_coupling: sinh_coupling(theta)?, dimer_weight: critical_dimer_weight(theta)? })
    }

    pub fn edge_probability(&self, kind: EdgeKind) -> T {
        edge_probability_closed_form(kind, self.theta).expect("theta validated at construction")
    }
}
