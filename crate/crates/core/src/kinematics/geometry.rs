use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ik::inverse_kinematics;
use super::pose::PlatformPose;
use super::KinematicsError;

/// Number of scalars in the full geometric parameter vector: 18 rail anchor
/// components, 18 platform joint components and 6 arm lengths.
pub const PARAMETER_COUNT: usize = 42;

/// Frame-fixing constraints imposed on the parameter vector.
pub const CONSTRAINT_NAMES: [&str; 7] = [
    "S2x = 0",
    "S2y = 0",
    "S2z = 0",
    "S3z = 0",
    "B2x = B3z",
    "B3z = B5z",
    "B2y = B5y",
];

pub const FREE_PARAMETER_COUNT: usize = PARAMETER_COUNT - CONSTRAINT_NAMES.len();

pub const CONSTRAINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("constraint {name} violated (residual {residual:e} m)")]
    Constraint { name: &'static str, residual: f64 },
    #[error("arm length l{limb} must be positive, got {length}")]
    ArmLength { limb: usize, length: f64 },
    #[error("rail travel of limb {limb} must satisfy min < max, got [{min}, {max}]")]
    Travel { limb: usize, min: f64, max: f64 },
    #[error("`{field}` must have 6 entries, got {got}")]
    Count { field: &'static str, got: usize },
    #[error("geometry contains a non-finite value")]
    NonFinite,
    #[error("home pose is outside the workspace: {0}")]
    HomeUnreachable(#[source] KinematicsError),
    #[error("malformed geometry document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read geometry file: {0}")]
    Io(#[from] std::io::Error),
}

/// Geometric parameters of a Hexaglide.
///
/// All rails run parallel to the base X axis. Limbs are indexed 0..6 here;
/// messages and file documentation number them 1..=6.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineGeometry {
    /// Mid-point of each limb's rail, base frame, meters.
    pub rail_anchor: [Vector3<f64>; 6],
    /// Universal joint centers in the platform frame, meters.
    pub platform_joint: [Vector3<f64>; 6],
    pub arm_length: [f64; 6],
    /// Slider limits `(min, max)` relative to the rail anchor.
    pub rail_travel: [(f64, f64); 6],
    pub home_pose: PlatformPose,
}

impl MachineGeometry {
    pub fn new(
        rail_anchor: [Vector3<f64>; 6],
        platform_joint: [Vector3<f64>; 6],
        arm_length: [f64; 6],
        rail_travel: [(f64, f64); 6],
        home_pose: PlatformPose,
    ) -> Result<Self, GeometryError> {
        let geom = Self {
            rail_anchor,
            platform_joint,
            arm_length,
            rail_travel,
            home_pose,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Illustrative desk-scale machine shipped with the crate; also stored as
    /// `configs/reference_geometry.json`. These are not measurements of any
    /// built machine.
    pub fn reference() -> Self {
        let v = Vector3::new;
        Self::new(
            [
                v(0.0, -0.3, 0.0),
                v(0.0, 0.0, 0.0),
                v(0.0, 0.3, 0.0),
                v(0.0, -0.3, 0.0),
                v(0.0, 0.0, 0.0),
                v(0.0, 0.3, 0.0),
            ],
            [
                v(-0.05, -0.08, 0.0),
                v(0.0, 0.0, 0.0),
                v(-0.05, 0.12, 0.0),
                v(0.05, -0.08, 0.0),
                v(0.0, 0.0, 0.0),
                v(0.05, 0.12, 0.0),
            ],
            [0.5; 6],
            [(-0.6, 0.6); 6],
            PlatformPose::from_array([0.0, 0.0, 0.35, 0.0, 0.0, 0.0]),
        )
        .expect("reference geometry is valid")
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let finite = self
            .parameter_vector()
            .iter()
            .chain(self.rail_travel.iter().flat_map(|(a, b)| [a, b]))
            .all(|v| v.is_finite());
        if !finite || !self.home_pose.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        for (i, &l) in self.arm_length.iter().enumerate() {
            if l <= 0.0 {
                return Err(GeometryError::ArmLength {
                    limb: i + 1,
                    length: l,
                });
            }
        }
        for (i, &(min, max)) in self.rail_travel.iter().enumerate() {
            if min >= max {
                return Err(GeometryError::Travel {
                    limb: i + 1,
                    min,
                    max,
                });
            }
        }
        for (name, residual) in self.constraint_residuals() {
            if residual.abs() > CONSTRAINT_TOLERANCE {
                return Err(GeometryError::Constraint { name, residual });
            }
        }
        Ok(())
    }

    pub fn constraint_residuals(&self) -> [(&'static str, f64); 7] {
        let s = &self.rail_anchor;
        let b = &self.platform_joint;
        let r = [
            s[1].x,
            s[1].y,
            s[1].z,
            s[2].z,
            b[1].x - b[2].z,
            b[2].z - b[4].z,
            b[1].y - b[4].y,
        ];
        let mut out = [("", 0.0); 7];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (CONSTRAINT_NAMES[k], r[k]);
        }
        out
    }

    /// `[B1 .. B6, S1 .. S6, l1 .. l6]` flattened.
    pub fn parameter_vector(&self) -> [f64; PARAMETER_COUNT] {
        let mut d = [0.0; PARAMETER_COUNT];
        for i in 0..6 {
            d[3 * i..3 * i + 3].copy_from_slice(self.platform_joint[i].as_slice());
            d[18 + 3 * i..18 + 3 * i + 3].copy_from_slice(self.rail_anchor[i].as_slice());
        }
        d[36..].copy_from_slice(&self.arm_length);
        d
    }

    /// Hex SHA-256 over every parameter, the rail limits and the home pose.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for v in self.parameter_vector() {
            h.update(v.to_le_bytes());
        }
        for (a, b) in self.rail_travel {
            h.update(a.to_le_bytes());
            h.update(b.to_le_bytes());
        }
        for v in self.home_pose.to_array() {
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let doc: GeometryDocument = serde_json::from_str(text)?;
        let geom = doc.into_geometry()?;
        inverse_kinematics(&geom, &geom.home_pose).map_err(GeometryError::HomeUnreachable)?;
        Ok(geom)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GeometryError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GeometryDocument::from(self)).expect("geometry serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RailEntry {
    #[serde(rename = "S")]
    anchor: [f64; 3],
    travel: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct PlatformEntry {
    #[serde(rename = "B")]
    joint: [f64; 3],
}

/// On-disk JSON layout.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryDocument {
    rails: Vec<RailEntry>,
    platform: Vec<PlatformEntry>,
    arms: Vec<f64>,
    home_pose: [f64; 6],
}

fn six<T, U>(field: &'static str, items: &[T], f: impl Fn(&T) -> U) -> Result<[U; 6], GeometryError> {
    if items.len() != 6 {
        return Err(GeometryError::Count {
            field,
            got: items.len(),
        });
    }
    Ok(std::array::from_fn(|i| f(&items[i])))
}

impl GeometryDocument {
    fn into_geometry(self) -> Result<MachineGeometry, GeometryError> {
        let rail_anchor = six("rails", &self.rails, |r| Vector3::from(r.anchor))?;
        let rail_travel = six("rails", &self.rails, |r| (r.travel[0], r.travel[1]))?;
        let platform_joint = six("platform", &self.platform, |p| Vector3::from(p.joint))?;
        let arm_length = six("arms", &self.arms, |&l| l)?;
        MachineGeometry::new(
            rail_anchor,
            platform_joint,
            arm_length,
            rail_travel,
            PlatformPose::from_array(self.home_pose),
        )
    }
}

impl From<&MachineGeometry> for GeometryDocument {
    fn from(g: &MachineGeometry) -> Self {
        Self {
            rails: (0..6)
                .map(|i| RailEntry {
                    anchor: g.rail_anchor[i].into(),
                    travel: [g.rail_travel[i].0, g.rail_travel[i].1],
                })
                .collect(),
            platform: g
                .platform_joint
                .iter()
                .map(|b| PlatformEntry { joint: (*b).into() })
                .collect(),
            arms: g.arm_length.to_vec(),
            home_pose: g.home_pose.to_array(),
        }
    }
}
