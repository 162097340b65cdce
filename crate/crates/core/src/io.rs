//! JSON file formats for shapes, point sets and enumerations.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::anchoring::{Certificate, GoodEnumeration};
use crate::dense_set::{Flags, PointSet, Window};
use crate::error::{Error, Result};
use crate::geometry::{LpShape, NormShape, Polygon, Vec2};
use crate::scalar::{Coord, Scalar};

pub const DEFAULT_GENERATOR_BUDGET: usize = 256;

fn default_budget() -> usize {
    DEFAULT_GENERATOR_BUDGET
}

pub type CoordPair = [Coord; 2];

pub fn vec_to_pair<S: Scalar>(v: &Vec2<S>) -> CoordPair {
    [v.x.to_coord(), v.y.to_coord()]
}

pub fn pair_to_vec<S: Scalar>(c: &CoordPair) -> Result<Vec2<S>> {
    let x = S::from_coord(&c[0])?;
    let y = S::from_coord(&c[1])?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::Parse("non-finite coordinate".into()));
    }
    Ok(Vec2::new(x, y))
}

/// `{"kind": "polygonal", "generators": [[ax, ay], ...]}` or `{"kind": "lp", "p": 3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeSpec {
    Polygonal {
        generators: Vec<CoordPair>,
    },
    Lp {
        p: f64,
        #[serde(default = "default_budget")]
        generator_budget: usize,
    },
}

impl ShapeSpec {
    pub fn from_polygon<S: Scalar>(poly: &Polygon<S>) -> Self {
        ShapeSpec::Polygonal {
            generators: poly.generators().iter().map(vec_to_pair).collect(),
        }
    }

    pub fn from_norm_shape(shape: &NormShape) -> Self {
        match shape {
            NormShape::Polygonal(p) => Self::from_polygon(p),
            NormShape::SmoothLp(s) => ShapeSpec::Lp {
                p: s.p,
                generator_budget: s.generator_budget,
            },
        }
    }

    pub fn polygon<S: Scalar>(&self) -> Result<Polygon<S>> {
        match self {
            ShapeSpec::Polygonal { generators } => Polygon::new(
                generators
                    .iter()
                    .map(pair_to_vec)
                    .collect::<Result<Vec<_>>>()?,
            ),
            ShapeSpec::Lp { .. } => Err(Error::Unsupported(
                "smooth shapes are only available in floating mode".into(),
            )),
        }
    }

    pub fn norm_shape(&self) -> Result<NormShape> {
        match self {
            ShapeSpec::Polygonal { .. } => self.polygon::<f64>().map(NormShape::Polygonal),
            ShapeSpec::Lp {
                p,
                generator_budget,
            } => LpShape::new(*p, *generator_budget).map(NormShape::SmoothLp),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdfFlag {
    pub generator: CoordPair,
    pub idf: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FlagsFile {
    #[serde(default)]
    pub idf_per_generator: Vec<IdfFlag>,
    #[serde(default)]
    pub pairwise_noninteger: Option<bool>,
}

/// `{seed, alpha, window, mode, points, flags}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSetFile {
    pub seed: u64,
    pub alpha: Coord,
    pub window: Window,
    pub mode: Mode,
    pub points: Vec<CoordPair>,
    #[serde(default)]
    pub flags: FlagsFile,
}

impl PointSetFile {
    pub fn from_point_set<S: Scalar>(ps: &PointSet<S>) -> Self {
        Self {
            seed: ps.seed,
            alpha: ps.alpha.to_coord(),
            window: ps.window,
            mode: if S::EXACT { Mode::Rational } else { Mode::Float },
            points: ps.points.iter().map(vec_to_pair).collect(),
            flags: FlagsFile {
                idf_per_generator: ps
                    .flags
                    .idf_per_generator
                    .iter()
                    .map(|(a, idf)| IdfFlag {
                        generator: vec_to_pair(a),
                        idf: *idf,
                    })
                    .collect(),
                pairwise_noninteger: ps.flags.pairwise_noninteger,
            },
        }
    }

    /// Reads the coordinates in the scalar type `S`, whatever mode was recorded.
    pub fn to_point_set<S: Scalar>(&self) -> Result<PointSet<S>> {
        let points = self
            .points
            .iter()
            .map(pair_to_vec)
            .collect::<Result<Vec<_>>>()?;
        let mut ps = PointSet::new(points, self.window, self.seed)?;
        ps.alpha = S::from_coord(&self.alpha)?;
        ps.flags = Flags {
            idf_per_generator: self
                .flags
                .idf_per_generator
                .iter()
                .map(|f| Ok((pair_to_vec(&f.generator)?, f.idf)))
                .collect::<Result<Vec<_>>>()?,
            pairwise_noninteger: self.flags.pairwise_noninteger,
        };
        Ok(ps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub position: usize,
    pub refs: [usize; 3],
    pub directions: [CoordPair; 3],
}

/// Enumeration output: order, unplaced points and per-position certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationFile {
    pub order: Vec<usize>,
    pub unplaced: Vec<usize>,
    pub certificates: Vec<CertificateFile>,
}

impl EnumerationFile {
    pub fn from_enumeration<S: Scalar>(e: &GoodEnumeration<S>) -> Self {
        Self {
            order: e.order.clone(),
            unplaced: e.unplaced.clone(),
            certificates: e
                .certificates
                .iter()
                .enumerate()
                .filter_map(|(position, c)| {
                    c.as_ref().map(|c| CertificateFile {
                        position,
                        refs: c.refs,
                        directions: [
                            vec_to_pair(&c.directions[0]),
                            vec_to_pair(&c.directions[1]),
                            vec_to_pair(&c.directions[2]),
                        ],
                    })
                })
                .collect(),
        }
    }

    pub fn to_enumeration<S: Scalar>(&self) -> Result<GoodEnumeration<S>> {
        let mut certificates = vec![None; self.order.len()];
        for c in &self.certificates {
            let slot = certificates.get_mut(c.position).ok_or_else(|| {
                Error::InvalidEnumeration(format!("certificate position {} out of range", c.position))
            })?;
            *slot = Some(Certificate {
                refs: c.refs,
                directions: [
                    pair_to_vec(&c.directions[0])?,
                    pair_to_vec(&c.directions[1])?,
                    pair_to_vec(&c.directions[2])?,
                ],
            });
        }
        Ok(GoodEnumeration {
            order: self.order.clone(),
            certificates,
            unplaced: self.unplaced.clone(),
        })
    }
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let f = File::open(path.as_ref())?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let f = File::create(path.as_ref())?;
    serde_json::to_writer_pretty(BufWriter::new(f), value)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense_set::sample_poisson_window;
    use crate::scalar::Rational;

    #[test]
    fn shape_json_forms() {
        let spec: ShapeSpec =
            serde_json::from_str(r#"{"kind":"polygonal","generators":[["1/2","0"],[0,1]]}"#)
                .unwrap();
        let poly = spec.polygon::<Rational>().unwrap();
        assert_eq!(poly.generators()[0], Vec2::new(Rational::from_ratio(1, 2), Rational::from_i64(0)));
        let lp: ShapeSpec = serde_json::from_str(r#"{"kind":"lp","p":3}"#).unwrap();
        assert_eq!(
            lp,
            ShapeSpec::Lp {
                p: 3.0,
                generator_budget: DEFAULT_GENERATOR_BUDGET
            }
        );
        assert!(lp.polygon::<f64>().is_err());
        assert!(matches!(lp.norm_shape().unwrap(), NormShape::SmoothLp(_)));
        let text = serde_json::to_string(&ShapeSpec::from_polygon(&Polygon::<Rational>::l1())).unwrap();
        assert_eq!(text, r#"{"kind":"polygonal","generators":[["1","1"],["1","-1"]]}"#);
    }

    #[test]
    fn point_set_round_trip() {
        let mut ps = sample_poisson_window::<Rational>(&Window::unit(), 20.0, 4).unwrap();
        ps.update_idf_flags(&[Vec2::from_ints(1, 0)]);
        let file = PointSetFile::from_point_set(&ps);
        assert_eq!(file.mode, Mode::Rational);
        let text = serde_json::to_string(&file).unwrap();
        let back: PointSetFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_point_set::<Rational>().unwrap(), ps);
        let float = back.to_point_set::<f64>().unwrap();
        assert_eq!(float.len(), ps.len());
    }
}
