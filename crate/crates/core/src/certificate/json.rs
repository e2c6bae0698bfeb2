//! JSON encoding of certificates. Reals are written with 17 significant
//! digits so that every `f64` survives a round trip bit for bit.

use num_complex::Complex64;
use serde::de::{self, Deserializer};
use serde::ser::{self, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{CertParams, Certificate, MinorCertificate};
use crate::lattice::{Int, LatticeVector};

#[derive(Clone, Copy, Debug, PartialEq)]
struct Decimal(f64);

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(ser::Error::custom(format!("non-finite decimal {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        if !x.is_finite() {
            return Err(de::Error::custom("non-finite decimal"));
        }
        Ok(Decimal(x))
    }
}

fn pair(v: &LatticeVector) -> [Int; 2] {
    match v.coords() {
        [a, b] => [*a, *b],
        _ => unreachable!("certificate vectors are planar"),
    }
}

fn witness_out(w: &[Complex64]) -> Vec<[Decimal; 2]> {
    w.iter().map(|z| [Decimal(z.re), Decimal(z.im)]).collect()
}

fn witness_in(w: Vec<[Decimal; 2]>) -> Vec<Complex64> {
    w.into_iter().map(|[re, im]| Complex64::new(re.0, im.0)).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FullJson {
    xi: [Int; 2],
    d: u32,
    #[serde(rename = "N")]
    n: u128,
    epsilon: Decimal,
    p: Decimal,
    l_star: u32,
    witness: Vec<[Decimal; 2]>,
    value: Decimal,
    avg_value: Decimal,
    generators: Vec<[Int; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MinorJson {
    kind: String,
    xi: [Int; 2],
    p: Decimal,
    witness: Vec<[Decimal; 2]>,
    value: Decimal,
    generators: Vec<[Int; 2]>,
}

#[derive(Deserialize)]
struct Probe {
    kind: Option<String>,
}

/// Either certificate form, as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum CertificateFile {
    Full(Certificate),
    Minor(MinorCertificate),
}

impl CertificateFile {
    pub fn to_json(&self) -> String {
        let out = match self {
            CertificateFile::Full(c) => serde_json::to_string_pretty(&FullJson {
                xi: pair(&c.params.xi),
                d: c.params.d,
                n: c.params.n,
                epsilon: Decimal(c.params.epsilon),
                p: Decimal(c.p),
                l_star: c.l_star,
                witness: witness_out(&c.witness),
                value: Decimal(c.value),
                avg_value: Decimal(c.avg_value),
                generators: c.generators.iter().map(pair).collect(),
            }),
            CertificateFile::Minor(m) => serde_json::to_string_pretty(&MinorJson {
                kind: "minor".into(),
                xi: pair(&m.xi),
                p: Decimal(m.p),
                witness: witness_out(&m.witness),
                value: Decimal(m.value),
                generators: m.generators.iter().map(pair).collect(),
            }),
        };
        out.expect("certificate values are finite")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let probe: Probe = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let to_vecs = |g: Vec<[Int; 2]>| g.into_iter().map(|[a, b]| LatticeVector::pair(a, b)).collect();
        match probe.kind.as_deref() {
            None => {
                let j: FullJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
                Ok(CertificateFile::Full(Certificate {
                    params: CertParams {
                        xi: LatticeVector::pair(j.xi[0], j.xi[1]),
                        d: j.d,
                        n: j.n,
                        epsilon: j.epsilon.0,
                    },
                    p: j.p.0,
                    l_star: j.l_star,
                    generators: to_vecs(j.generators),
                    witness: witness_in(j.witness),
                    value: j.value.0,
                    avg_value: j.avg_value.0,
                }))
            }
            Some("minor") => {
                let j: MinorJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
                Ok(CertificateFile::Minor(MinorCertificate {
                    xi: LatticeVector::pair(j.xi[0], j.xi[1]),
                    p: j.p.0,
                    generators: to_vecs(j.generators),
                    witness: witness_in(j.witness),
                    value: j.value.0,
                }))
            }
            Some(other) => Err(format!("unknown certificate kind {other:?}")),
        }
    }
}

impl Certificate {
    pub fn to_json(&self) -> String {
        CertificateFile::Full(self.clone()).to_json()
    }
}

impl MinorCertificate {
    pub fn to_json(&self) -> String {
        CertificateFile::Minor(self.clone()).to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        Certificate {
            params: CertParams {
                xi: LatticeVector::pair(2, 2),
                d: 26,
                n: 6_351_700_570_607_027_828_292_452_352_000_000,
                epsilon: 3.846_153_846_153_849_4e-4,
            },
            p: 0.2,
            l_star: 3,
            generators: vec![LatticeVector::pair(0, 0), LatticeVector::pair(-170_141_183_460_469_231_731_687_303_715_884_105_727, 6)],
            witness: vec![Complex64::new(-5.2, 0.0), Complex64::new(1.0, -0.1)],
            value: -0.123_456_789_012_345_67,
            avg_value: -1.0 / 3.0,
        }
    }

    #[test]
    fn full_round_trip() {
        let c = sample();
        let text = c.to_json();
        assert!(text.contains("\"N\": 6351700570607027828292452352000000"));
        assert!(text.contains("2.0000000000000001e-1"));
        assert_eq!(CertificateFile::from_json(&text).unwrap(), CertificateFile::Full(c));
    }

    #[test]
    fn minor_round_trip() {
        let m = MinorCertificate {
            xi: LatticeVector::pair(1, 1),
            p: 1.5,
            generators: vec![LatticeVector::pair(0, 0), LatticeVector::pair(1, 1)],
            witness: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            value: -1.0,
        };
        let text = m.to_json();
        assert!(text.contains("\"kind\": \"minor\""));
        assert_eq!(CertificateFile::from_json(&text).unwrap(), CertificateFile::Minor(m));
    }

    #[test]
    fn malformed_inputs() {
        assert!(CertificateFile::from_json("{").is_err());
        assert!(CertificateFile::from_json(r#"{"kind":"other"}"#).is_err());
        let text = sample().to_json().replace("\"l_star\"", "\"extra\": 1, \"l_star\"");
        assert!(CertificateFile::from_json(&text).is_err());
    }
}
