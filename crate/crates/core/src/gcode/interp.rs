use std::f64::consts::{PI, TAU};

use nalgebra::{Vector2, Vector3};

use super::lexer::{Block, Letter, Word};
use super::GcodeError;
use crate::kinematics::PlatformPose;

/// Largest start/end radius difference accepted for an arc, millimeters.
pub const ARC_RADIUS_TOLERANCE_MM: f64 = 1e-4;

// Endpoints closer than this (mm) make an I/J arc a full circle.
const COINCIDENT_MM: f64 = 1e-9;

const MM_PER_INCH: f64 = 25.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionMode {
    Rapid,
    Linear,
    ArcCw,
    ArcCcw,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Millimeters,
    Inches,
}

impl Units {
    fn to_mm(self, v: f64) -> f64 {
        match self {
            Units::Millimeters => v,
            Units::Inches => v * MM_PER_INCH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Absolute,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    XY,
}

/// Interpreter state persisting across blocks.
///
/// Program coordinates are millimeters and degrees relative to
/// `work_origin`, the machine pose that program zero maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub motion_mode: MotionMode,
    /// mm/min, unset until the first `F` word.
    pub feed_rate: Option<f64>,
    pub units: Units,
    pub distance_mode: DistanceMode,
    pub plane: Plane,
    /// mm
    pub current_point: Vector3<f64>,
    /// degrees
    pub current_orientation: [f64; 3],
    pub work_origin: PlatformPose,
}

impl Default for ModalState {
    fn default() -> Self {
        Self {
            motion_mode: MotionMode::None,
            feed_rate: None,
            units: Units::Millimeters,
            distance_mode: DistanceMode::Absolute,
            plane: Plane::XY,
            current_point: Vector3::zeros(),
            current_orientation: [0.0; 3],
            work_origin: PlatformPose::identity(),
        }
    }
}

impl ModalState {
    /// Program zero placed at the machine's home pose.
    pub fn at_home(home: PlatformPose) -> Self {
        Self {
            work_origin: home,
            ..Self::default()
        }
    }

    /// Machine pose (SI) for program coordinates in mm and degrees.
    pub fn machine_pose(&self, point_mm: &Vector3<f64>, angles_deg: &[f64; 3]) -> PlatformPose {
        let o = self.work_origin.angles();
        PlatformPose::new(
            self.work_origin.position() + point_mm / 1000.0,
            std::array::from_fn(|k| o[k] + angles_deg[k].to_radians()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcSense {
    Cw,
    Ccw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionKind {
    Rapid,
    Linear,
    /// Circular move in the machine XY plane. `center` is in machine
    /// coordinates (meters) at the start height; `sweep` is the unsigned
    /// angle travelled in the direction of `sense`, in (0, 2π].
    Arc {
        center: Vector3<f64>,
        sense: ArcSense,
        sweep: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionCommand {
    pub kind: MotionKind,
    /// End pose in machine coordinates, SI.
    pub target: PlatformPose,
    /// Commanded speed in m/s; `None` for rapids.
    pub feed: Option<f64>,
    pub source_line: usize,
}

/// A non-motion word kept for the record (`M`, `S`, `T`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annotation {
    pub word: Word,
    pub source_line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub commands: Vec<MotionCommand>,
    pub annotations: Vec<Annotation>,
    /// Modal state after the last interpreted block.
    pub final_state: Option<ModalState>,
}

fn code(word: &Word) -> Option<u32> {
    (word.value.fract() == 0.0 && word.value >= 0.0).then_some(word.value as u32)
}

fn unsupported(line: usize, word: &Word) -> GcodeError {
    GcodeError::UnsupportedCode {
        line,
        word: format!("{}{}", word.letter.as_char(), word.value),
    }
}

/// Words of one block sorted by role.
#[derive(Default)]
struct BlockWords {
    axes: [Option<f64>; 6],
    ij: [Option<f64>; 2],
    radius: Option<f64>,
    feed: Option<f64>,
    motion: Option<MotionMode>,
    units: Option<Units>,
    distance: Option<DistanceMode>,
    end_program: bool,
}

fn classify(block: &Block, annotations: &mut Vec<Annotation>) -> Result<BlockWords, GcodeError> {
    let line = block.source_line;
    let mut out = BlockWords::default();
    let mut seen: Vec<Letter> = Vec::new();
    for w in &block.words {
        let repeatable = matches!(w.letter, Letter::G | Letter::M);
        if !repeatable {
            if seen.contains(&w.letter) {
                return Err(GcodeError::InvalidWord {
                    line,
                    word: w.to_string(),
                    reason: "word repeated in one block",
                });
            }
            seen.push(w.letter);
        }
        match w.letter {
            Letter::G => match code(w) {
                Some(0) => out.motion = Some(MotionMode::Rapid),
                Some(1) => out.motion = Some(MotionMode::Linear),
                Some(2) => out.motion = Some(MotionMode::ArcCw),
                Some(3) => out.motion = Some(MotionMode::ArcCcw),
                Some(17) => {}
                Some(20) => out.units = Some(Units::Inches),
                Some(21) => out.units = Some(Units::Millimeters),
                Some(90) => out.distance = Some(DistanceMode::Absolute),
                Some(91) => out.distance = Some(DistanceMode::Incremental),
                _ => return Err(unsupported(line, w)),
            },
            Letter::M => match code(w) {
                Some(0 | 3 | 5) => annotations.push(Annotation {
                    word: *w,
                    source_line: line,
                }),
                Some(2 | 30) => {
                    annotations.push(Annotation {
                        word: *w,
                        source_line: line,
                    });
                    out.end_program = true;
                }
                _ => return Err(unsupported(line, w)),
            },
            Letter::S | Letter::T => annotations.push(Annotation {
                word: *w,
                source_line: line,
            }),
            Letter::X => out.axes[0] = Some(w.value),
            Letter::Y => out.axes[1] = Some(w.value),
            Letter::Z => out.axes[2] = Some(w.value),
            Letter::A => out.axes[3] = Some(w.value),
            Letter::B => out.axes[4] = Some(w.value),
            Letter::C => out.axes[5] = Some(w.value),
            Letter::I => out.ij[0] = Some(w.value),
            Letter::J => out.ij[1] = Some(w.value),
            // the helix axis offset has no role in the XY plane
            Letter::K => {}
            Letter::R => out.radius = Some(w.value),
            Letter::F => out.feed = Some(w.value),
            Letter::N => {}
        }
    }
    Ok(out)
}

fn sweep_between(start: Vector2<f64>, end: Vector2<f64>, center: Vector2<f64>, sense: ArcSense) -> f64 {
    if (end - start).norm() < COINCIDENT_MM {
        return TAU;
    }
    let a0 = (start.y - center.y).atan2(start.x - center.x);
    let a1 = (end.y - center.y).atan2(end.x - center.x);
    let raw = match sense {
        ArcSense::Ccw => a1 - a0,
        ArcSense::Cw => a0 - a1,
    };
    let s = raw.rem_euclid(TAU);
    if s == 0.0 {
        TAU
    } else {
        s
    }
}

fn radius_center(
    line: usize,
    start: Vector2<f64>,
    end: Vector2<f64>,
    r: f64,
    sense: ArcSense,
) -> Result<Vector2<f64>, GcodeError> {
    let chord = end - start;
    let d = chord.norm();
    if d < COINCIDENT_MM {
        return Err(GcodeError::BadArc {
            line,
            detail: "radius form cannot describe a full circle, use I/J".into(),
        });
    }
    if r == 0.0 {
        return Err(GcodeError::BadArc {
            line,
            detail: "zero radius".into(),
        });
    }
    let half = d / 2.0;
    let mut h2 = r * r - half * half;
    if h2 < 0.0 {
        if r.abs() < half - ARC_RADIUS_TOLERANCE_MM {
            return Err(GcodeError::BadArc {
                line,
                detail: format!("radius {} mm shorter than half chord {half} mm", r.abs()),
            });
        }
        h2 = 0.0;
    }
    let h = h2.sqrt();
    let mid = start + chord / 2.0;
    let normal = Vector2::new(-chord.y, chord.x) / d;
    let want_short = r > 0.0;
    [mid + normal * h, mid - normal * h]
        .into_iter()
        .find(|c| (sweep_between(start, end, *c, sense) <= PI) == want_short)
        .ok_or_else(|| GcodeError::BadArc {
            line,
            detail: "no center matches the radius sign".into(),
        })
}

/// Applies modal semantics to tokenized blocks and resolves every motion
/// block into a machine-frame command.
///
/// Interpretation stops after `M2` or `M30`.
pub fn interpret(blocks: &[Block], initial: &ModalState) -> Result<Program, GcodeError> {
    let mut state = initial.clone();
    let mut program = Program::default();

    for block in blocks {
        let line = block.source_line;
        let words = classify(block, &mut program.annotations)?;

        if let Some(u) = words.units {
            state.units = u;
        }
        if let Some(d) = words.distance {
            state.distance_mode = d;
        }
        if let Some(f) = words.feed {
            if f.is_nan() || f <= 0.0 {
                return Err(GcodeError::InvalidWord {
                    line,
                    word: format!("F{f}"),
                    reason: "feed rate must be positive",
                });
            }
            state.feed_rate = Some(state.units.to_mm(f));
        }
        if let Some(m) = words.motion {
            state.motion_mode = m;
        }

        let has_axes = words.axes.iter().any(Option::is_some);
        let has_arc_words = words.ij.iter().any(Option::is_some) || words.radius.is_some();
        let arc_mode = matches!(state.motion_mode, MotionMode::ArcCw | MotionMode::ArcCcw);
        if has_arc_words && !arc_mode {
            return Err(GcodeError::InvalidWord {
                line,
                word: "I/J/R".into(),
                reason: "arc parameters outside G2/G3",
            });
        }

        if has_axes {
            if state.motion_mode == MotionMode::None {
                return Err(GcodeError::NoMotionMode { line });
            }
            let cmd = resolve_motion(&mut state, &words, line)?;
            program.commands.push(cmd);
        } else if arc_mode && has_arc_words {
            return Err(GcodeError::BadArc {
                line,
                detail: "arc without end point".into(),
            });
        }

        if words.end_program {
            break;
        }
    }
    program.final_state = Some(state);
    Ok(program)
}

fn resolve_motion(state: &mut ModalState, words: &BlockWords, line: usize) -> Result<MotionCommand, GcodeError> {
    let start_point = state.current_point;
    let start_angles = state.current_orientation;
    let mut end_point = start_point;
    let mut end_angles = start_angles;
    let incremental = state.distance_mode == DistanceMode::Incremental;
    for k in 0..6 {
        let Some(v) = words.axes[k] else { continue };
        if k < 3 {
            let v = state.units.to_mm(v);
            end_point[k] = if incremental { start_point[k] + v } else { v };
        } else {
            end_angles[k - 3] = if incremental { start_angles[k - 3] + v } else { v };
        }
    }

    let feed = match state.motion_mode {
        MotionMode::Rapid => None,
        _ => Some(state.feed_rate.ok_or(GcodeError::MissingFeed { line })? / 60_000.0),
    };

    let kind = match state.motion_mode {
        MotionMode::Rapid => MotionKind::Rapid,
        MotionMode::Linear => MotionKind::Linear,
        MotionMode::ArcCw | MotionMode::ArcCcw => {
            let sense = if state.motion_mode == MotionMode::ArcCw {
                ArcSense::Cw
            } else {
                ArcSense::Ccw
            };
            let s = start_point.xy();
            let e = end_point.xy();
            let center = match (words.ij, words.radius) {
                ([None, None], Some(r)) => radius_center(line, s, e, state.units.to_mm(r), sense)?,
                ([None, None], None) => {
                    return Err(GcodeError::BadArc {
                        line,
                        detail: "arc needs I/J or R".into(),
                    })
                }
                ([i, j], None) => {
                    s + Vector2::new(
                        state.units.to_mm(i.unwrap_or(0.0)),
                        state.units.to_mm(j.unwrap_or(0.0)),
                    )
                }
                _ => {
                    return Err(GcodeError::BadArc {
                        line,
                        detail: "I/J and R given together".into(),
                    })
                }
            };
            let r0 = (s - center).norm();
            let r1 = (e - center).norm();
            if r0 == 0.0 {
                return Err(GcodeError::BadArc {
                    line,
                    detail: "zero radius".into(),
                });
            }
            if (r0 - r1).abs() > ARC_RADIUS_TOLERANCE_MM {
                return Err(GcodeError::BadArc {
                    line,
                    detail: format!("radius mismatch {:.6} mm", (r0 - r1).abs()),
                });
            }
            let sweep = sweep_between(s, e, center, sense);
            let center_machine = state
                .machine_pose(&Vector3::new(center.x, center.y, start_point.z), &start_angles)
                .position();
            MotionKind::Arc {
                center: center_machine,
                sense,
                sweep,
            }
        }
        MotionMode::None => unreachable!("checked by caller"),
    };

    state.current_point = end_point;
    state.current_orientation = end_angles;
    Ok(MotionCommand {
        kind,
        target: state.machine_pose(&end_point, &end_angles),
        feed,
        source_line: line,
    })
}
