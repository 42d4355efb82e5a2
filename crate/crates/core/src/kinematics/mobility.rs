use std::fmt;

/// Link and joint census of a mechanism, the input to Gruebler's count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobilitySpec {
    /// Degrees of freedom of the ambient space: 6 spatial, 3 planar.
    pub space_dof: i64,
    /// Number of links, ground included.
    pub link_count: i64,
    pub joint_dof: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MobilityError {
    #[error("space dof must be 3 or 6, got {0}")]
    SpaceDof(i64),
    #[error("joint {index} has {dof} degrees of freedom, expected 1..=3")]
    JointDof { index: usize, dof: i64 },
}

impl MobilitySpec {
    pub fn new(space_dof: i64, link_count: i64, joint_dof: Vec<i64>) -> Result<Self, MobilityError> {
        if space_dof != 3 && space_dof != 6 {
            return Err(MobilityError::SpaceDof(space_dof));
        }
        if let Some((index, &dof)) = joint_dof
            .iter()
            .enumerate()
            .find(|(_, f)| !(1..=3).contains(*f))
        {
            return Err(MobilityError::JointDof { index, dof });
        }
        Ok(Self {
            space_dof,
            link_count,
            joint_dof,
        })
    }

    /// The Hexaglide: 14 links, six spherical, six universal and six
    /// prismatic joints.
    pub fn hexaglide() -> Self {
        let mut f = vec![3; 6];
        f.extend([2; 6]);
        f.extend([1; 6]);
        Self {
            space_dof: 6,
            link_count: 14,
            joint_dof: f,
        }
    }

    pub fn joint_count(&self) -> i64 {
        self.joint_dof.len() as i64
    }

    pub fn joint_dof_sum(&self) -> i64 {
        self.joint_dof.iter().sum()
    }
}

/// Gruebler's count `λ(L - j - 1) + Σ f_i`.
pub fn mobility(spec: &MobilitySpec) -> i64 {
    spec.space_dof * (spec.link_count - spec.joint_count() - 1) + spec.joint_dof_sum()
}

/// The count with its operands spelled out, e.g. `6(14-18-1)+36 = 6`.
pub struct MobilityReport<'a>(pub &'a MobilitySpec);

impl fmt::Display for MobilityReport<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        write!(
            f,
            "{}({}-{}-1)+{} = {}",
            s.space_dof,
            s.link_count,
            s.joint_count(),
            s.joint_dof_sum(),
            mobility(s)
        )
    }
}
