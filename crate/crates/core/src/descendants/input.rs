//! JSON description of a degenerating plane-curve family with its component `B`.

use serde::{Deserialize, Serialize};

use super::family::{ComponentB, PlaneCurveFamily};
use super::record::TSequence;
use crate::algebra::{HomogeneousForm, Poly, Scalar};
use crate::error::{Error, Result};

/// A form given either as text (`"x*z - y^2"`) or in the coefficient-map shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Text(String),
    Json(HomogeneousForm),
}

impl FormSpec {
    pub fn form(&self) -> Result<HomogeneousForm> {
        match self {
            FormSpec::Text(s) => HomogeneousForm::parse(s, 3),
            FormSpec::Json(f) => Ok(f.clone()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyPart {
    pub tpow: usize,
    pub form: FormSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentInput {
    #[serde(rename = "P")]
    pub p: FormSpec,
    pub param: Vec<String>,
    pub transversal: Vec<Scalar>,
}

fn default_p_list() -> Vec<u32> {
    vec![1, 2]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyInput {
    #[serde(rename = "F")]
    pub f: Vec<FamilyPart>,
    #[serde(rename = "B")]
    pub b: ComponentInput,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<u32>,
    #[serde(default)]
    pub t_sequence: TSequence,
}

impl FamilyInput {
    pub fn build(&self) -> Result<(PlaneCurveFamily, ComponentB)> {
        let top = self.f.iter().map(|p| p.tpow).max().ok_or_else(|| Error::Invalid("family has no parts".into()))?;
        let mut parts: Vec<Option<HomogeneousForm>> = vec![None; top + 1];
        for part in &self.f {
            let f = part.form.form()?;
            parts[part.tpow] = Some(match parts[part.tpow].take() {
                Some(g) => g.add(&f)?,
                None => f,
            });
        }
        let d = parts.iter().flatten().next().map(HomogeneousForm::degree).unwrap_or(0);
        let parts = parts.into_iter().map(|f| f.unwrap_or_else(|| HomogeneousForm::zero(3, d))).collect();
        let fam = PlaneCurveFamily::new(parts)?;
        let param = self.b.param.iter().map(|s| Poly::parse(s, 'v')).collect::<Result<Vec<_>>>()?;
        let b = ComponentB::new(&fam, self.b.p.form()?, param, self.b.transversal.clone())?;
        Ok((fam, b))
    }

    fn conic_family(f0: &str, f1: &str) -> Self {
        let text = |s: &str| FormSpec::Text(s.into());
        Self {
            f: vec![FamilyPart { tpow: 0, form: text(f0) }, FamilyPart { tpow: 1, form: text(f1) }],
            b: ComponentInput { p: text("x*z - y^2"), param: vec!["1".into(), "v".into(), "v^2".into()], transversal: vec![Scalar::zero(), Scalar::zero(), Scalar::one()] },
            p_list: default_p_list(),
            t_sequence: TSequence::default(),
        }
    }

    /// `F = P·L + t·G` with `P = xz − y²`, `L = x − z`, `G = x³ + y³ + z³`.
    pub fn worked_example() -> Self {
        Self::conic_family("x^2*z - x*z^2 - x*y^2 + y^2*z", "x^3 + y^3 + z^3")
    }

    /// `F = P·(L + t·y) + t·L·x²`, where `P + t·x²` vanishes to order 2 along `B`.
    pub fn second_order_example() -> Self {
        Self::conic_family("x^2*z - x*z^2 - x*y^2 + y^2*z", "x*y*z - y^3 + x^3 - x^2*z")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let inp = FamilyInput::worked_example();
        let text = serde_json::to_string(&inp).unwrap();
        let back: FamilyInput = serde_json::from_str(&text).unwrap();
        let (fam, b) = back.build().unwrap();
        assert_eq!(fam.degree(), 3);
        assert_eq!(b.residual, HomogeneousForm::parse("x - z", 3).unwrap());
    }

    #[test]
    fn coefficient_map_forms() {
        let text = r#"{"F":[{"tpow":0,"form":{"degree":3,"coeffs":{"2,0,1":"1","1,0,2":"-1","1,2,0":"-1","0,2,1":"1"}}},
            {"tpow":1,"form":"x^3 + y^3 + z^3"}],
            "B":{"P":{"degree":2,"coeffs":{"1,0,1":"1","0,2,0":"-1"}},"param":["1","v","v^2"],"transversal":[0,0,1]},
            "p_list":[1,2],"t_sequence":{"base":"1/2","count":20}}"#;
        let inp: FamilyInput = serde_json::from_str(text).unwrap();
        assert!(inp.build().is_ok());
        assert_eq!(inp.t_sequence.count, 20);
    }
}
