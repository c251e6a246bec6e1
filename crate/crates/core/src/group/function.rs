use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{Carrier, CarrierTag};
use crate::error::{Error, Result};
use crate::{real, Real, Scalar};

/// A complex-valued function on every element of a carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction<T> {
    carrier: CarrierTag,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> GroupFunction<T> {
    pub fn new(carrier: &impl Carrier, values: Vec<Complex<T>>) -> Result<Self> {
        Self::with_tag(carrier.tag(), carrier.size(), values)
    }

    pub(crate) fn with_tag(tag: CarrierTag, size: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != size {
            return Err(Error::InvalidParameter(format!(
                "function on {tag} needs {size} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            carrier: tag,
            values,
        })
    }

    pub fn from_fn(carrier: &impl Carrier, f: impl FnMut(usize) -> Complex<T>) -> Self {
        Self {
            carrier: carrier.tag(),
            values: (0..carrier.size()).map(f).collect(),
        }
    }

    pub fn from_real_fn(carrier: &impl Carrier, mut f: impl FnMut(usize) -> T) -> Self {
        Self::from_fn(carrier, |x| Complex::new(f(x), T::zero()))
    }

    pub fn constant(carrier: &impl Carrier, c: Complex<T>) -> Self {
        Self::from_fn(carrier, |_| c.clone())
    }

    pub fn ones(carrier: &impl Carrier) -> Self {
        Self::constant(carrier, Complex::new(T::one(), T::zero()))
    }

    pub fn zeros(carrier: &impl Carrier) -> Self {
        Self::constant(carrier, Complex::new(T::zero(), T::zero()))
    }

    pub fn delta(carrier: &impl Carrier, at: usize) -> Self {
        Self::from_real_fn(carrier, |x| if x == at { T::one() } else { T::zero() })
    }

    pub fn indicator(carrier: &impl Carrier, set: &[usize]) -> Self {
        let mut f = Self::zeros(carrier);
        for &x in set {
            f.values[x] = Complex::new(T::one(), T::zero());
        }
        f
    }

    pub fn carrier(&self) -> &CarrierTag {
        &self.carrier
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize) -> &Complex<T> {
        &self.values[x]
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn set(&mut self, x: usize, v: Complex<T>) {
        self.values[x] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re.is_zero() && v.im.is_zero())
    }

    pub fn ensure_same_carrier(&self, other: &Self) -> Result<()> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch(
                self.carrier.to_string(),
                other.carrier.to_string(),
            ));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Complex<T>, &Complex<T>) -> Complex<T>,
    ) -> Result<Self> {
        self.ensure_same_carrier(other)?;
        Ok(Self {
            carrier: self.carrier.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn map(&self, f: impl Fn(&Complex<T>) -> Complex<T>) -> Self {
        Self {
            carrier: self.carrier.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `x ↦ φ(x⁻¹)`.
    pub fn inversion(&self, carrier: &impl Carrier) -> Self {
        Self {
            carrier: self.carrier.clone(),
            values: (0..self.len())
                .map(|x| self.values[carrier.inverse(x)].clone())
                .collect(),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| !(self.values[x].re.is_zero() && self.values[x].im.is_zero()))
            .collect()
    }
}

impl<T: Real> GroupFunction<T> {
    pub fn ensure_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(format!("function on {}", self.carrier)))
        }
    }

    pub fn sup_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(crate::cabs(*v)))
    }

    pub fn l1_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |s, v| s + crate::cabs(*v))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.sup_norm())
    }

    pub fn to_file(&self, carrier: &impl Carrier) -> FunctionFile {
        let mut map = BTreeMap::new();
        for (x, v) in self.values.iter().enumerate() {
            map.insert(carrier.element_name(x), [crate::to_f64(v.re), crate::to_f64(v.im)]);
        }
        FunctionFile {
            group_ref: Some(self.carrier.to_string()),
            values: FunctionValues::Map(map),
        }
    }

    pub fn from_file(carrier: &impl Carrier, file: &FunctionFile) -> Result<Self> {
        let c = |p: &[f64; 2]| Complex::new(real::<T>(p[0]), real::<T>(p[1]));
        let f = match &file.values {
            FunctionValues::Array(vals) => Self::new(carrier, vals.iter().map(c).collect())?,
            FunctionValues::Map(map) => {
                let mut f = Self::zeros(carrier);
                for (name, v) in map {
                    let x = carrier
                        .parse_element(name)
                        .ok_or_else(|| Error::Parse(format!("unknown element '{name}'")))?;
                    f.values[x] = c(v);
                }
                f
            }
        };
        f.ensure_finite()?;
        Ok(f)
    }
}

/// Function file: `{"group_ref": "...", "values": [[re, im], ...] | {"elem": [re, im]}}`.
///
/// In the map form, missing elements default to zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_ref: Option<String>,
    pub values: FunctionValues,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionValues {
    Array(Vec<[f64; 2]>),
    Map(BTreeMap<String, [f64; 2]>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{FiniteGroup, FreeBall};

    #[test]
    fn file_forms_agree() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let arr: FunctionFile =
            serde_json::from_str(r#"{"values": [[1,0],[0,2],[0,0]]}"#).unwrap();
        let map: FunctionFile =
            serde_json::from_str(r#"{"group_ref":"cyclic:3","values": {"0":[1,0],"1":[0,2]}}"#)
                .unwrap();
        let a = GroupFunction::<f64>::from_file(&g, &arr).unwrap();
        let b = GroupFunction::<f64>::from_file(&g, &map).unwrap();
        assert_eq!(a, b);
        let ball = FreeBall::new(2, 1).unwrap();
        let f = GroupFunction::<f64>::delta(&ball, 1);
        let back = GroupFunction::<f64>::from_file(&ball, &f.to_file(&ball)).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn wrong_length_and_mismatch_are_rejected() {
        let g = FiniteGroup::cyclic(3).unwrap();
        assert!(GroupFunction::<f64>::new(&g, vec![Complex::new(1.0, 0.0)]).is_err());
        let h = FiniteGroup::cyclic(4).unwrap();
        let a = GroupFunction::<f64>::ones(&g);
        let b = GroupFunction::<f64>::ones(&h);
        assert!(matches!(a.add(&b), Err(Error::CarrierMismatch(..))));
    }
}
