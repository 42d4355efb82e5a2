//! Kinematics of the Hexaglide six-axis parallel machine and a compiler from
//! standard G-Code to per-rail joint trajectories and drive command streams.
//!
//! The pipeline runs [`gcode`] (text to motion commands), [`trajectory`]
//! (interpolation, inverse kinematics and workspace checks) and [`drive`]
//! (quantized velocity commands), all built on [`kinematics`]. The
//! [`cli`] module wires them into the `hexakine` command, with [`plot`] for
//! SVG output.

pub mod kinematics;
pub mod gcode;
pub mod trajectory;
pub mod drive;
pub mod plot;
pub mod cli;
