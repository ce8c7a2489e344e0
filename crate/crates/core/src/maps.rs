//! Entrywise scalar maps and the centrality models built from them.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("power exponent must be finite and nonzero, got {0}")]
    InvalidExponent(f64),
    #[error("{map} is undefined at index {index} (value {value})")]
    Domain {
        map: NonlinearMap,
        index: usize,
        value: f64,
    },
    #[error("{map} produced a non-finite value at index {index} (input {value})")]
    NonFinite {
        map: NonlinearMap,
        index: usize,
        value: f64,
    },
    #[error("invalid model parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// A scalar map applied componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "lowercase")]
pub enum NonlinearMap {
    /// `t -> t^a`; the identity is `Power(1.0)`.
    Power(f64),
    /// Natural logarithm.
    Log,
    /// Natural exponential.
    Exp,
}

/// Homogeneity degree of a map: `map(c t) = c^d map(t)` for all `c > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Homogeneity {
    Degree(f64),
    NonHomogeneous,
}

impl Homogeneity {
    pub fn degree(self) -> Option<f64> {
        match self {
            Homogeneity::Degree(d) => Some(d),
            Homogeneity::NonHomogeneous => None,
        }
    }
}

impl NonlinearMap {
    pub const IDENTITY: NonlinearMap = NonlinearMap::Power(1.0);

    pub fn power(exponent: f64) -> Result<Self, MapError> {
        if exponent.is_finite() && exponent != 0.0 {
            Ok(NonlinearMap::Power(exponent))
        } else {
            Err(MapError::InvalidExponent(exponent))
        }
    }

    pub fn homogeneity(&self) -> Homogeneity {
        match *self {
            NonlinearMap::Power(a) => Homogeneity::Degree(a),
            NonlinearMap::Log | NonlinearMap::Exp => Homogeneity::NonHomogeneous,
        }
    }

    /// Whether the map sends every positive number to a positive number.
    pub fn is_positive(&self) -> bool {
        !matches!(self, NonlinearMap::Log)
    }

    pub fn is_identity(&self) -> bool {
        *self == NonlinearMap::IDENTITY
    }

    fn apply(&self, t: f64) -> Option<f64> {
        match *self {
            NonlinearMap::Power(a) => {
                if t < 0.0 && a.fract() != 0.0 {
                    return None;
                }
                if t == 0.0 && a < 0.0 {
                    return None;
                }
                if a == 1.0 {
                    Some(t)
                } else if a == 0.5 {
                    Some(t.sqrt())
                } else if a.fract() == 0.0 && a.abs() <= i32::MAX as f64 {
                    Some(t.powi(a as i32))
                } else {
                    Some(t.powf(a))
                }
            }
            NonlinearMap::Log => (t > 0.0).then(|| t.ln()),
            NonlinearMap::Exp => Some(t.exp()),
        }
    }

    /// Evaluates the map at a single point.
    pub fn eval_scalar(&self, t: f64) -> Result<f64, MapError> {
        let mut buf = [t];
        self.eval_in_place(&mut buf)?;
        Ok(buf[0])
    }

    pub fn eval(&self, v: &[f64]) -> Result<Vec<f64>, MapError> {
        let mut out = v.to_vec();
        self.eval_in_place(&mut out)?;
        Ok(out)
    }

    /// Overwrites `v` with the map applied entrywise. On error `v` is left
    /// partially transformed.
    pub fn eval_in_place(&self, v: &mut [f64]) -> Result<(), MapError> {
        if self.is_identity() {
            return match v.iter().position(|t| !t.is_finite()) {
                Some(index) => Err(MapError::NonFinite {
                    map: *self,
                    index,
                    value: v[index],
                }),
                None => Ok(()),
            };
        }
        for (index, slot) in v.iter_mut().enumerate() {
            let value = *slot;
            let out = self.apply(value).ok_or(MapError::Domain {
                map: *self,
                index,
                value,
            })?;
            if !out.is_finite() {
                return Err(MapError::NonFinite {
                    map: *self,
                    index,
                    value,
                });
            }
            *slot = out;
        }
        Ok(())
    }
}

impl fmt::Display for NonlinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearMap::Power(a) if *a == 1.0 => write!(f, "id"),
            NonlinearMap::Power(a) => write!(f, "x^{a}"),
            NonlinearMap::Log => write!(f, "ln"),
            NonlinearMap::Exp => write!(f, "exp"),
        }
    }
}

/// The four maps defining a node/edge centrality:
///
/// ```text
/// lambda x = g(B W f(y))
/// mu y     = psi(B^T N phi(x))
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityModel {
    pub name: String,
    pub f: NonlinearMap,
    pub g: NonlinearMap,
    pub phi: NonlinearMap,
    pub psi: NonlinearMap,
}

impl CentralityModel {
    pub fn new(
        name: impl Into<String>,
        f: NonlinearMap,
        g: NonlinearMap,
        phi: NonlinearMap,
        psi: NonlinearMap,
    ) -> Self {
        CentralityModel {
            name: name.into(),
            f,
            g,
            phi,
            psi,
        }
    }

    /// All four maps are the identity.
    pub fn linear() -> Self {
        let id = NonlinearMap::IDENTITY;
        Self::new("linear", id, id, id, id)
    }

    /// `f = id`, `g = t^(1/(p+1))`, `phi = ln`, `psi = exp`. On a uniform
    /// hypergraph with unit node weights, the node vector is an l^p tensor
    /// eigenvector of the adjacency tensor.
    pub fn log_exp(p: f64) -> Result<Self, MapError> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(MapError::InvalidParameter {
                name: "p",
                value: p,
                reason: "must be finite and >= 1",
            });
        }
        Ok(Self::new(
            "logexp",
            NonlinearMap::IDENTITY,
            NonlinearMap::power(1.0 / (p + 1.0))?,
            NonlinearMap::Log,
            NonlinearMap::Exp,
        ))
    }

    /// `f = g = id`, `phi = t^alpha`, `psi = t^(1/alpha)`: the edge update is
    /// a soft maximum of its members' scores.
    pub fn max(alpha: f64) -> Result<Self, MapError> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(MapError::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be finite and >= 1",
            });
        }
        Ok(Self::new(
            "max",
            NonlinearMap::IDENTITY,
            NonlinearMap::IDENTITY,
            NonlinearMap::power(alpha)?,
            NonlinearMap::power(1.0 / alpha)?,
        ))
    }

    /// Homogeneity degrees of `(f, g, phi, psi)`.
    pub fn degrees(&self) -> [Homogeneity; 4] {
        [
            self.f.homogeneity(),
            self.g.homogeneity(),
            self.phi.homogeneity(),
            self.psi.homogeneity(),
        ]
    }

    /// `|alpha beta gamma delta|`, or `None` if any map is not homogeneous.
    pub fn rho(&self) -> Option<f64> {
        self.degrees()
            .iter()
            .map(|h| h.degree())
            .try_fold(1.0, |acc, d| d.map(|d| acc * d))
            .map(f64::abs)
    }

    pub fn maps(&self) -> [NonlinearMap; 4] {
        [self.f, self.g, self.phi, self.psi]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        assert_eq!(
            NonlinearMap::power(0.5).unwrap().eval(&[4.0, 9.0]).unwrap(),
            vec![2.0, 3.0]
        );
        let logged = NonlinearMap::Log.eval(&[1.0, std::f64::consts::E]).unwrap();
        assert_eq!(logged[0], 0.0);
        assert!((logged[1] - 1.0).abs() < 1e-15);
        assert_eq!(
            NonlinearMap::power(10.0)
                .unwrap()
                .eval(&[1.0, 2.0])
                .unwrap(),
            vec![1.0, 1024.0]
        );
    }

    #[test]
    fn domain_errors_name_the_index() {
        assert_eq!(
            NonlinearMap::Log.eval(&[1.0, 0.0]),
            Err(MapError::Domain {
                map: NonlinearMap::Log,
                index: 1,
                value: 0.0
            })
        );
        assert!(matches!(
            NonlinearMap::Power(-1.0).eval(&[2.0, 0.0, 1.0]),
            Err(MapError::Domain { index: 1, .. })
        ));
        assert!(matches!(
            NonlinearMap::Power(0.5).eval(&[-4.0]),
            Err(MapError::Domain { index: 0, .. })
        ));
        // integer powers of negative numbers are fine
        assert_eq!(NonlinearMap::Power(3.0).eval(&[-2.0]).unwrap(), vec![-8.0]);
        assert!(matches!(
            NonlinearMap::Exp.eval(&[1.0, 1e4]),
            Err(MapError::NonFinite { index: 1, .. })
        ));
        assert!(NonlinearMap::power(0.0).is_err());
        assert!(NonlinearMap::power(f64::NAN).is_err());
    }

    #[test]
    fn rho_of_models() {
        assert_eq!(CentralityModel::linear().rho(), Some(1.0));
        let max = CentralityModel::max(10.0).unwrap();
        assert!((max.rho().unwrap() - 1.0).abs() < 1e-15);
        let id = NonlinearMap::IDENTITY;
        let half = CentralityModel::new("half", id, id, id, NonlinearMap::Power(0.5));
        assert_eq!(half.rho(), Some(0.5));
        assert_eq!(CentralityModel::log_exp(1.0).unwrap().rho(), None);
    }

    #[test]
    fn presets() {
        let lin = CentralityModel::linear();
        assert_eq!(
            lin.degrees().map(|h| h.degree()),
            [Some(1.0), Some(1.0), Some(1.0), Some(1.0)]
        );

        let le = CentralityModel::log_exp(1.0).unwrap();
        assert_eq!(le.f, NonlinearMap::IDENTITY);
        assert_eq!(le.g, NonlinearMap::Power(0.5));
        assert_eq!(le.phi, NonlinearMap::Log);
        assert_eq!(le.psi, NonlinearMap::Exp);

        let mx = CentralityModel::max(10.0).unwrap();
        assert_eq!(
            mx.degrees().map(|h| h.degree()),
            [Some(1.0), Some(1.0), Some(10.0), Some(0.1)]
        );

        assert!(CentralityModel::log_exp(0.5).is_err());
        assert!(CentralityModel::max(0.9).is_err());
        assert!(CentralityModel::max(f64::INFINITY).is_err());
    }

    #[test]
    fn serde_form() {
        let json = serde_json::to_string(&CentralityModel::log_exp(1.0).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"name":"logexp","f":{"kind":"power","exponent":1.0},"g":{"kind":"power","exponent":0.5},"phi":{"kind":"log"},"psi":{"kind":"exp"}}"#
        );
        let back: CentralityModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, CentralityModel::log_exp(1.0).unwrap());
    }

    proptest! {
        #[test]
        fn power_maps_are_homogeneous(
            a in prop_oneof![Just(1.0), Just(0.5), Just(10.0), Just(0.1), -3.0..3.0f64],
            v in prop::collection::vec(0.01..100.0f64, 1..20),
            t in 0.01..100.0f64,
        ) {
            prop_assume!(a != 0.0);
            let map = NonlinearMap::power(a).unwrap();
            let base = map.eval(&v).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| t * x).collect();
            let out = map.eval(&scaled).unwrap();
            let factor = t.powf(a);
            for (o, b) in out.iter().zip(&base) {
                prop_assert!((o - factor * b).abs() <= 1e-12 * (factor * b).abs());
            }
        }

        #[test]
        fn max_model_softmax_sandwich(
            alpha in 1.0..20.0f64,
            v in prop::collection::vec(0.01..10.0f64, 1..30),
        ) {
            let model = CentralityModel::max(alpha).unwrap();
            let powered = model.phi.eval(&v).unwrap();
            let soft = model.psi.eval_scalar(powered.iter().sum()).unwrap();
            let max = v.iter().copied().fold(0.0, f64::max);
            let upper = (v.len() as f64).powf(1.0 / alpha) * max;
            prop_assert!(max <= soft * (1.0 + 1e-12));
            prop_assert!(soft <= upper * (1.0 + 1e-12));
        }

        #[test]
        fn log_exp_rho_always_undefined(p in 1.0..50.0f64) {
            prop_assert_eq!(CentralityModel::log_exp(p).unwrap().rho(), None);
        }
    }
}
