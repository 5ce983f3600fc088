//! JSON wire formats. Matrices are `{"rows", "cols", "data": [[re, im], ...]}`
//! row-major; everything else is built from them.

use serde::de::DeserializeOwned;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::channel::{GibbsSpec, LinearMap, QuantumChannel, StinespringDilation};
use crate::classical::{ClassicalDilation, ProbabilityVector, StochasticMatrix};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator, C64};
use crate::reversibility::NSteadyChannel;
use crate::tolerance::Tolerances;

/// Types that can be read from their JSON form, validating invariants on the way.
pub trait FromJson: Sized {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self>;
}

pub fn from_str<T: FromJson>(text: &str, tol: &Tolerances) -> Result<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    T::from_json(&v, tol)
}

fn decode<T: DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field `{key}`")))
}

impl FromJson for ComplexMatrix {
    fn from_json(v: &Value, _: &Tolerances) -> Result<Self> {
        decode(v, "matrix")
    }
}

impl FromJson for HermitianOperator {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        HermitianOperator::new(ComplexMatrix::from_json(v, tol)?, tol)
    }
}

impl FromJson for UnitaryOperator {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        UnitaryOperator::new(ComplexMatrix::from_json(v, tol)?, tol)
    }
}

impl FromJson for DensityOperator {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let rho = DensityOperator::new(ComplexMatrix::from_json(v, tol)?, tol)?;
        let dim = |k: &str| v.get(k).map(|x| decode::<usize>(x, k)).transpose();
        match (dim("d_A")?, dim("d_B")?) {
            (Some(a), Some(b)) => rho.with_bipartition(a, b),
            (None, None) => Ok(rho),
            _ => Err(Error::Parse("d_A and d_B must be given together".into())),
        }
    }
}

/// Kets are column matrices; they are normalized on input.
impl FromJson for Vec<C64> {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let m = ComplexMatrix::from_json(v, tol)?;
        if m.cols() != 1 {
            return Err(Error::Parse(format!("ket must have one column, found {}", m.cols())));
        }
        let psi = m.column(0);
        let n = crate::linalg::vec_norm(&psi);
        if n == 0.0 {
            return Err(Error::InvalidState("zero ket".into()));
        }
        Ok(psi.iter().map(|z| z / n).collect())
    }
}

impl FromJson for ProbabilityVector {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        ProbabilityVector::new(decode(field(v, "probs")?, "probs")?, tol)
    }
}

#[derive(Deserialize)]
struct StochasticWire {
    d_out: usize,
    d_in: usize,
    data: Vec<f64>,
}

impl FromJson for StochasticMatrix {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let w: StochasticWire = decode(field(v, "stochastic")?, "stochastic")?;
        StochasticMatrix::new(w.d_out, w.d_in, w.data, tol)
    }
}

impl FromJson for ClassicalDilation {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let cond = match v.get("env_conditional") {
            None | Some(Value::Null) => None,
            Some(c) => Some(StochasticMatrix::from_json(c, tol)?),
        };
        ClassicalDilation::new(
            StochasticMatrix::from_json(field(v, "global")?, tol)?,
            ProbabilityVector::from_json(field(v, "env")?, tol)?,
            cond,
        )
    }
}

impl FromJson for StinespringDilation {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        StinespringDilation::new(
            UnitaryOperator::from_json(field(v, "U")?, tol)?,
            DensityOperator::from_json(field(v, "beta")?, tol)?,
        )
    }
}

impl FromJson for QuantumChannel {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        let kind: String = decode(field(v, "kind")?, "kind")?;
        let d_in: usize = decode(field(v, "d_in")?, "d_in")?;
        let d_out: usize = decode(field(v, "d_out")?, "d_out")?;
        let ch = match kind.as_str() {
            "choi" => QuantumChannel::from_choi(d_in, d_out, ComplexMatrix::from_json(field(v, "choi")?, tol)?, tol)?,
            "kraus" => {
                let ops: Vec<ComplexMatrix> = decode(field(v, "kraus")?, "kraus")?;
                QuantumChannel::from_kraus(ops, tol)?
            }
            "stinespring" => StinespringDilation::from_json(v, tol)?.channel(tol)?,
            other => return Err(Error::Parse(format!("unknown channel kind `{other}`"))),
        };
        if (ch.d_in(), ch.d_out()) != (d_in, d_out) {
            return Err(Error::mismatch(
                "channel dimensions",
                d_in * d_out,
                ch.d_in() * ch.d_out(),
            ));
        }
        Ok(ch)
    }
}

impl FromJson for GibbsSpec {
    fn from_json(v: &Value, tol: &Tolerances) -> Result<Self> {
        Ok(GibbsSpec {
            h: HermitianOperator::from_json(field(v, "H")?, tol)?,
            kappa: decode(field(v, "kappa")?, "kappa")?,
        })
    }
}

impl Serialize for ProbabilityVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ProbabilityVector", 1)?;
        st.serialize_field("probs", self.probs())?;
        st.end()
    }
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Inner<'a> {
            d_out: usize,
            d_in: usize,
            data: &'a [f64],
        }
        let mut st = s.serialize_struct("StochasticMatrix", 1)?;
        st.serialize_field(
            "stochastic",
            &Inner {
                d_out: self.d_out(),
                d_in: self.d_in(),
                data: self.data(),
            },
        )?;
        st.end()
    }
}

impl Serialize for ClassicalDilation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassicalDilation", 3)?;
        st.serialize_field("global", self.global())?;
        st.serialize_field("env", self.env())?;
        st.serialize_field("env_conditional", &self.env_conditional())?;
        st.end()
    }
}

fn serialize_choi<S: Serializer>(
    s: S,
    d_in: usize,
    d_out: usize,
    choi: &ComplexMatrix,
) -> std::result::Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Channel", 4)?;
    st.serialize_field("kind", "choi")?;
    st.serialize_field("d_in", &d_in)?;
    st.serialize_field("d_out", &d_out)?;
    st.serialize_field("choi", choi)?;
    st.end()
}

impl Serialize for LinearMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_choi(s, self.d_in(), self.d_out(), self.choi())
    }
}

impl Serialize for QuantumChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_choi(s, self.d_in(), self.d_out(), self.choi())
    }
}

impl Serialize for StinespringDilation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("StinespringDilation", 2)?;
        st.serialize_field("U", self.unitary())?;
        st.serialize_field("beta", self.beta())?;
        st.end()
    }
}

impl Serialize for GibbsSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("GibbsSpec", 2)?;
        st.serialize_field("H", &self.h)?;
        st.serialize_field("kappa", &self.kappa)?;
        st.end()
    }
}

impl Serialize for NSteadyChannel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("NSteadyChannel", 4)?;
        st.serialize_field("dilation", &self.dilation)?;
        st.serialize_field("priors", &self.priors)?;
        st.serialize_field("beta_prime", &self.beta_prime)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

/// A ket as a one-column matrix.
pub fn ket_matrix(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_columns(&[psi.to_vec()])
}
