//! JSON encodings of forms, systems and point sets, with readers that accept
//! everything the writers emit.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::apolarity::FormSystem;
use crate::error::{Error, Result};
use crate::field::{ComplexDouble, Field, PrimeField, Rationals};
use crate::monomial::Monomial;
use crate::points::PointSet;
use crate::poly::{GradedForm, Poly, Side};

/// A coefficient: `{"num","den"}` for exact fields, `{"re","im"}` for complex doubles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Rational { num: String, den: String },
    Complex { re: f64, im: f64 },
}

/// Fields whose elements have a JSON encoding.
pub trait JsonField: Field {
    fn encode(&self, a: &Self::Elem) -> CoeffJson;
    fn decode(&self, c: &CoeffJson) -> Result<Self::Elem>;
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn parse_rational(num: &str, den: &str) -> Result<BigRational> {
    let (n, d) = (parse_int(num)?, parse_int(den)?);
    if d == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

impl JsonField for Rationals {
    fn encode(&self, a: &BigRational) -> CoeffJson {
        CoeffJson::Rational { num: a.numer().to_string(), den: a.denom().to_string() }
    }

    fn decode(&self, c: &CoeffJson) -> Result<BigRational> {
        match c {
            CoeffJson::Rational { num, den } => parse_rational(num, den),
            CoeffJson::Complex { .. } => Err(Error::Parse("complex coefficient in a rational form".into())),
        }
    }
}

impl JsonField for PrimeField {
    fn encode(&self, a: &u64) -> CoeffJson {
        CoeffJson::Rational { num: a.to_string(), den: "1".into() }
    }

    fn decode(&self, c: &CoeffJson) -> Result<u64> {
        let q = Rationals.decode(c)?;
        let (n, d) = (self.reduce_bigint(q.numer()), self.reduce_bigint(q.denom()));
        let inv = self.inv(&d).ok_or_else(|| Error::Parse("denominator vanishes mod p".into()))?;
        Ok(self.mul(&n, &inv))
    }
}

impl JsonField for ComplexDouble {
    fn encode(&self, a: &Complex64) -> CoeffJson {
        CoeffJson::Complex { re: a.re, im: a.im }
    }

    fn decode(&self, c: &CoeffJson) -> Result<Complex64> {
        match c {
            CoeffJson::Complex { re, im } => Ok(Complex64::new(*re, *im)),
            CoeffJson::Rational { num, den } => {
                let q = parse_rational(num, den)?;
                Ok(Complex64::new(crate::field::rational_to_f64(&q), 0.0))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    #[serde(flatten)]
    pub coeff: CoeffJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub side: Side,
    pub nvars: usize,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemJson {
    pub n: usize,
    pub d: u32,
    pub r: usize,
    pub basis: Vec<FormJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointsJson {
    pub n: usize,
    pub points: Vec<Vec<CoeffJson>>,
}

pub fn form_to_json<F: JsonField>(f: &GradedForm<F>) -> FormJson {
    FormJson {
        side: f.side(),
        nvars: f.nvars(),
        degree: f.degree(),
        terms: f
            .poly()
            .terms()
            .iter()
            .map(|(m, c)| TermJson { exp: (0..f.nvars()).map(|k| m.exp(k)).collect(), coeff: f.field().encode(c) })
            .collect(),
    }
}

pub fn form_from_json<F: JsonField>(field: &F, j: &FormJson) -> Result<GradedForm<F>> {
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        if t.exp.len() != j.nvars {
            return Err(Error::Parse(format!("exponent {:?} does not have {} entries", t.exp, j.nvars)));
        }
        terms.push((Monomial::new(&t.exp), field.decode(&t.coeff)?));
    }
    GradedForm::new(j.side, j.degree, Poly::from_terms(field, j.nvars, terms))
}

pub fn system_to_json<F: JsonField>(lambda: &FormSystem<F>) -> SystemJson {
    SystemJson { n: lambda.n(), d: lambda.d(), r: lambda.r(), basis: lambda.basis().iter().map(form_to_json).collect() }
}

pub fn system_from_json<F: JsonField>(field: &F, j: &SystemJson) -> Result<FormSystem<F>> {
    let basis = j.basis.iter().map(|f| form_from_json(field, f)).collect::<Result<Vec<_>>>()?;
    let sys = FormSystem::new(basis)?;
    if (sys.n(), sys.d(), sys.r()) != (j.n, j.d, j.r) {
        return Err(Error::Parse(format!(
            "header ({},{},{}) disagrees with the basis ({},{},{})",
            j.n,
            j.d,
            j.r,
            sys.n(),
            sys.d(),
            sys.r()
        )));
    }
    Ok(sys)
}

pub fn points_to_json<F: JsonField>(z: &PointSet<F>) -> PointsJson {
    PointsJson { n: z.n(), points: z.points().iter().map(|p| p.iter().map(|c| z.field().encode(c)).collect()).collect() }
}

pub fn points_from_json<F: JsonField>(field: &F, j: &PointsJson) -> Result<PointSet<F>> {
    let pts = j
        .points
        .iter()
        .map(|p| p.iter().map(|c| field.decode(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(field, j.n, pts)
}

pub fn complex_vec_json(v: &[Complex64]) -> Vec<CoeffJson> {
    v.iter().map(|c| CoeffJson::Complex { re: c.re, im: c.im }).collect()
}

/// Parses a rational system such as a `net.json` or `pencil.json` input.
pub fn read_system(text: &str) -> Result<FormSystem<Rationals>> {
    let j: SystemJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    system_from_json(&Rationals, &j)
}

pub fn write_system(lambda: &FormSystem<Rationals>) -> String {
    serde_json::to_string_pretty(&system_to_json(lambda)).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_general_system, rng};

    #[test]
    fn system_round_trip() {
        let lam = random_general_system(&mut rng(3), 2, 3, 3).unwrap();
        let text = write_system(&lam);
        assert_eq!(read_system(&text).unwrap(), lam);
    }

    #[test]
    fn form_encoding_matches_layout() {
        let f = GradedForm::from_int_terms(&Rationals, Side::S, &[(&[2, 0], 3), (&[1, 1], -1)]).unwrap();
        let v = serde_json::to_value(form_to_json(&f)).unwrap();
        assert_eq!(v["side"], "S");
        assert_eq!(v["degree"], 2);
        let t = &v["terms"][0];
        assert!(t["exp"].is_array() && t["num"].is_string() && t["den"] == "1");
    }

    #[test]
    fn complex_points_round_trip() {
        let cc = ComplexDouble::default();
        let z = PointSet::new(
            &cc,
            1,
            vec![vec![Complex64::new(1.0, 0.5), Complex64::new(2.0, 0.0)], vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]],
        )
        .unwrap();
        let text = serde_json::to_string(&points_to_json(&z)).unwrap();
        let back = points_from_json(&cc, &serde_json::from_str(&text).unwrap()).unwrap();
        assert!(back.same_set(&z));
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        assert!(matches!(read_system("{\"n\":2"), Err(Error::Parse(_))));
        let bad = r#"{"n":1,"d":1,"r":1,"basis":[{"side":"S","nvars":2,"degree":1,"terms":[{"exp":[1,0],"num":"1","den":"0"}]}]}"#;
        assert!(matches!(read_system(bad), Err(Error::Parse(_))));
    }
}
