//! Serde adapters writing `BigInt` as a JSON number when it fits in `i64` and
//! as a decimal string otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

struct Big<'a>(&'a BigInt);

impl Serialize for Big<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Str(String),
}

impl Num {
    fn into_big<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            Num::Int(v) => Ok(BigInt::from(v)),
            Num::Str(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    Big(x).serialize(s)
}

#[allow(dead_code)]
pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    Num::deserialize(d)?.into_big()
}

pub mod seq {
    use super::*;

    pub fn serialize<S: Serializer, T: AsRef<[BigInt]>>(xs: &T, s: S) -> Result<S::Ok, S::Error> {
        let xs = xs.as_ref();
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Big(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: TryFrom<Vec<BigInt>>>(d: D) -> Result<T, D::Error> {
        let v: Vec<Num> = Vec::deserialize(d)?;
        let v = v.into_iter().map(Num::into_big).collect::<Result<Vec<_>, _>>()?;
        let n = v.len();
        T::try_from(v).map_err(|_| D::Error::custom(format!("unexpected length {n}")))
    }
}

pub mod seq2 {
    use super::*;

    struct Row<'a>(&'a [BigInt]);

    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::seq::serialize(&self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(xs: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for row in xs {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let v: Vec<Vec<Num>> = Vec::deserialize(d)?;
        v.into_iter().map(|r| r.into_iter().map(Num::into_big).collect()).collect()
    }
}

pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&Big(x)),
            None => s.serialize_none(),
        }
    }

    #[allow(dead_code)]
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<Num>::deserialize(d)?.map(Num::into_big).transpose()
    }
}
