//! The `hexakine` command line.
//!
//! Exit status: 0 success, 2 usage, I/O or configuration error, 3 G-Code
//! parse error, 4 workspace violation, 5 numerical failure. Failures print
//! one `key=value` line on standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::drive::{self, DriveConfig, DriveError, FrameHeader};
use crate::gcode::{compile, GcodeError, ModalState, MotionCommand};
use crate::kinematics::{
    forward_kinematics, inverse_kinematics, KinematicsError, MachineGeometry, MobilityReport, MobilitySpec,
    PlatformPose,
};
use crate::plot::render_svg;
use crate::trajectory::{
    plan, read_csv, resample, sidecar_path, verify, write_csv, JointTrajectory, PlanError, PlannerConfig,
    TrajectorySidecar,
};

pub const GEOMETRY_ENV: &str = "HEXAKINE_GEOMETRY";

#[derive(Debug, Parser)]
#[command(name = "hexakine", version, about = "Hexaglide kinematics and G-Code to joint trajectory compiler")]
struct Cli {
    /// Machine geometry (JSON). Falls back to $HEXAKINE_GEOMETRY.
    #[arg(long, global = true, value_name = "FILE")]
    geometry: Option<PathBuf>,

    /// Override a planner or drive setting, e.g. `--set max_cartesian_step=1e-5`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Slider positions for a platform pose.
    Ik {
        /// px,py,pz,alpha,beta,gamma in meters and radians
        #[arg(long, allow_hyphen_values = true)]
        pose: String,
    },
    /// Platform pose for slider positions.
    Fk {
        /// q1,...,q6 in meters
        #[arg(long, allow_hyphen_values = true)]
        joints: String,
        /// Starting pose for the solver; home by default.
        #[arg(long, allow_hyphen_values = true)]
        guess: Option<String>,
    },
    /// Mobility of the Hexaglide by Gruebler's formula.
    Dof,
    /// Compile a G-Code program into a trajectory CSV and JSON sidecar.
    Translate {
        program: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Write samples on the uniform sample_rate clock instead of the
        /// interpolation points.
        #[arg(long)]
        resample: bool,
    },
    /// Replay a trajectory through the forward kinematics.
    Verify {
        trajectory: PathBuf,
        /// Also measure the distance from the programmed path.
        #[arg(long)]
        program: Option<PathBuf>,
    },
    /// Write the drive frame stream, plus a CSV twin with extension `.frames.csv`.
    Emit {
        trajectory: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Render the XY path and slider curves as SVG.
    Plot {
        trajectory: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse { line: usize, message: String },
    Workspace { line: Option<usize>, message: String },
    Numerical { sample: Option<usize>, message: String },
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Parse { .. } => 3,
            Failure::Workspace { .. } => 4,
            Failure::Numerical { .. } => 5,
        }
    }

    fn diagnostic(&self) -> String {
        let (kind, key, value, message) = match self {
            Failure::Usage(m) => ("usage", None, None, m),
            Failure::Parse { line, message } => ("parse", Some("line"), Some(*line), message),
            Failure::Workspace { line, message } => ("workspace", Some("line"), *line, message),
            Failure::Numerical { sample, message } => ("numerical", Some("sample"), *sample, message),
        };
        let location = match (key, value) {
            (Some(k), Some(v)) => format!(" {k}={v}"),
            _ => String::new(),
        };
        let message = message.replace(['\n', '\r'], " ").replace('"', "'");
        format!("hexakine: error={kind}{location} message=\"{message}\"")
    }
}

impl From<GcodeError> for Failure {
    fn from(e: GcodeError) -> Self {
        Failure::Parse {
            line: e.line(),
            message: e.to_string(),
        }
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::WorkspaceViolation { line, .. } => Failure::Workspace {
                line: Some(line),
                message: e.to_string(),
            },
            PlanError::Config(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<KinematicsError> for Failure {
    fn from(e: KinematicsError) -> Self {
        match e {
            KinematicsError::Unreachable { .. } => Failure::Workspace {
                line: None,
                message: e.to_string(),
            },
            _ => Failure::Numerical {
                sample: None,
                message: e.to_string(),
            },
        }
    }
}

impl From<DriveError> for Failure {
    fn from(e: DriveError) -> Self {
        match e {
            DriveError::Config(_) | DriveError::Format(_) => Failure::Usage(e.to_string()),
            DriveError::RailOverrun { frame, .. } | DriveError::Kinematics { frame, .. } => Failure::Numerical {
                sample: Some(frame),
                message: e.to_string(),
            },
        }
    }
}

struct Settings {
    planner: PlannerConfig,
    drive: DriveConfig,
}

/// Defaults, or `planner` when given, with the `--set` overrides applied.
fn settings(overrides: &[String], planner: Option<PlannerConfig>) -> Result<Settings, Failure> {
    let mut s = Settings {
        planner: planner.unwrap_or_default(),
        drive: DriveConfig::default(),
    };
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects KEY=VALUE, got `{o}`")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--set {key}: `{}` is not a number", value.trim())))?;
        if !(s.planner.set(key, value) || s.drive.set(key, value)) {
            return Err(Failure::Usage(format!(
                "--set: unknown key `{key}` (known: {}, {})",
                PlannerConfig::KEYS.join(", "),
                DriveConfig::KEYS.join(", ")
            )));
        }
    }
    s.planner.validate()?;
    s.drive.validate()?;
    Ok(s)
}

fn geometry(path: Option<&Path>) -> Result<MachineGeometry, Failure> {
    let path = match path {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(GEOMETRY_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .ok_or_else(|| Failure::Usage(format!("no geometry: pass --geometry or set {GEOMETRY_ENV}")))?,
    };
    MachineGeometry::load(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn six(text: &str, what: &str) -> Result<[f64; 6], Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(Failure::Usage(format!("{what} needs 6 comma-separated numbers, got {}", parts.len())));
    }
    let mut out = [0.0; 6];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Failure::Usage(format!("{what}: `{p}` is not a number")))?;
    }
    Ok(out)
}

fn joined(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.12}")).collect::<Vec<_>>().join(",")
}

fn compile_program(path: &Path, geom: &MachineGeometry) -> Result<Vec<MotionCommand>, Failure> {
    let text = read_text(path)?;
    Ok(compile(&text, &ModalState::at_home(geom.home_pose))?.commands)
}

/// Loads a trajectory CSV and checks its sidecar, when present, against the
/// geometry in use.
fn load_trajectory(path: &Path, geom: &MachineGeometry) -> Result<(JointTrajectory, Option<TrajectorySidecar>), Failure> {
    let text = read_text(path)?;
    let mut traj = read_csv(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let side_path = sidecar_path(path);
    let sidecar = match fs::read_to_string(&side_path) {
        Ok(text) => Some(
            TrajectorySidecar::from_json(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", side_path.display())))?,
        ),
        Err(_) => None,
    };
    let fingerprint = geom.fingerprint();
    if let Some(side) = &sidecar {
        if side.geometry_fingerprint != fingerprint {
            return Err(Failure::Usage(format!(
                "{} was planned for geometry {}, not {}",
                path.display(),
                side.geometry_fingerprint,
                fingerprint
            )));
        }
    }
    traj.geometry_fingerprint = fingerprint;
    Ok((traj, sidecar))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Usage(format!("stdout: {e}"));
    let cfg = settings(&cli.overrides, None)?;
    if let Command::Dof = cli.command {
        writeln!(out, "{}", MobilityReport(&MobilitySpec::hexaglide())).map_err(io)?;
        return Ok(());
    }
    let geom = geometry(cli.geometry.as_deref())?;

    match cli.command {
        Command::Dof => unreachable!("handled above"),
        Command::Ik { pose } => {
            let pose = PlatformPose::from_array(six(&pose, "--pose")?);
            let q = inverse_kinematics(&geom, &pose)?;
            writeln!(out, "{}", joined(&q.0)).map_err(io)?;
        }
        Command::Fk { joints, guess } => {
            let q = crate::kinematics::JointVector(six(&joints, "--joints")?);
            let guess = match guess {
                Some(g) => PlatformPose::from_array(six(&g, "--guess")?),
                None => geom.home_pose,
            };
            let sol = forward_kinematics(&geom, &q, &guess)?;
            writeln!(out, "{}", joined(&sol.pose.to_array())).map_err(io)?;
        }
        Command::Translate {
            program,
            output,
            resample: uniform,
        } => {
            let commands = compile_program(&program, &geom)?;
            let mut traj = plan(&commands, &geom, &cfg.planner)?;
            if uniform {
                traj = resample(&traj, &geom, &cfg.planner)?;
            }
            write_file(&output, write_csv(&traj).as_bytes())?;
            let side = TrajectorySidecar::describe(&traj, &cfg.planner);
            write_file(&sidecar_path(&output), side.to_json().as_bytes())?;
            writeln!(out, "samples={} duration={:.9}", traj.samples.len(), traj.duration()).map_err(io)?;
        }
        Command::Verify { trajectory, program } => {
            let (traj, _) = load_trajectory(&trajectory, &geom)?;
            let commands = program.map(|p| compile_program(&p, &geom)).transpose()?;
            let report = verify(&traj, &geom, commands.as_deref()).map_err(|e| Failure::Numerical {
                sample: Some(e.sample),
                message: e.to_string(),
            })?;
            let mut lines = vec![
                format!("samples={}", report.samples),
                format!("max_position_error={:.3e}", report.max_position_error),
                format!("max_angle_error={:.3e}", report.max_angle_error),
                format!("max_closure_residual={:.3e}", report.max_closure_residual),
                format!("max_joint_speed={:.6e}", report.max_joint_speed),
                format!("max_fk_iterations={}", report.max_fk_iterations),
            ];
            if let Some(path) = report.path {
                lines.push(format!("max_linear_deviation={:.3e}", path.max_linear));
                lines.push(format!("max_arc_radial_error={:.3e}", path.max_arc_radial));
            }
            writeln!(out, "{}", lines.join("\n")).map_err(io)?;
        }
        Command::Emit { trajectory, output } => {
            let (traj, sidecar) = load_trajectory(&trajectory, &geom)?;
            // the planner settings recorded at translation time, unless overridden
            let planner = settings(&cli.overrides, sidecar.map(|s| s.planner))?.planner;
            let traj = if traj.uniform_rate() == Some(planner.sample_rate) {
                traj
            } else {
                resample(&traj, &geom, &planner)?
            };
            let rate = planner.sample_rate;
            let emission = drive::emit(&traj, &cfg.drive);
            let header = FrameHeader {
                dac_bits: cfg.drive.dac_bits as u16,
                sample_rate: rate,
            };
            write_file(&output, &drive::write_frame_file(&emission.frames, &header))?;
            write_file(
                &output.with_extension("frames.csv"),
                drive::write_frame_csv(&emission.frames).as_bytes(),
            )?;
            writeln!(out, "frames={} clamped={}", emission.frames.len(), emission.clamped).map_err(io)?;
        }
        Command::Plot { trajectory, output } => {
            let (traj, _) = load_trajectory(&trajectory, &geom)?;
            write_file(&output, render_svg(&traj).as_bytes())?;
        }
    }
    Ok(())
}

/// Runs the command line on `args` (program name first) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            let first = first.trim_start_matches("error: ").to_string();
            let _ = writeln!(err, "{}", Failure::Usage(first).diagnostic());
            return 2;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.diagnostic());
            f.code()
        }
    }
}
