//! Numerical lab for the normal deformation family of a plane curve germ:
//! Verdier and strong Thom inequalities on horn covers, and Kuo's vector field.

pub mod family;
pub mod flow;
pub mod horn;
pub mod path;
pub mod rk45;
pub mod verify;

use germ_core::GermError;

pub use family::{DeformationSpace, FamilyEval, NormalFamily, ParamPoint};
pub use flow::{flow_trivialize, kuo_field, FlowConfig, FlowReport, Stratum};
pub use horn::{HornCover, HornMode, HornRegion, LocalizedFactorization};
pub use path::{joint_path, normal_form_path, ParamPath};
pub use verify::{verify_w, verify_wf_on_horns, VerificationConfig, WReport, WfReport};

pub type C<T> = num_complex::Complex<T>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] GermError),
    #[error("germs are not equivalent: {0}")]
    Inequivalent(String),
    #[error("|y| = {y} lies outside the validity radius {radius}")]
    OutsideValidity { y: f64, radius: f64 },
    #[error("parameter point has the wrong shape: {0}")]
    Shape(String),
    #[error("no admissible path after {0} retries")]
    RetryBudget(usize),
    #[error("family data mismatch: {0}")]
    Mismatch(String),
    #[error("integrator step size collapsed at v = {v}")]
    StepCollapse { v: f64 },
    #[error("gradient vanishes off the parameter stratum at ({x}, {y})")]
    VanishingGradient { x: String, y: String },
}

impl LabError {
    pub fn code(&self) -> &'static str {
        match self {
            LabError::Core(e) => e.code(),
            LabError::Inequivalent(_) => "compare.inequivalent",
            LabError::OutsideValidity { .. } => "lab.validity",
            LabError::Shape(_) => "lab.shape",
            LabError::RetryBudget(_) => "lab.path-retries",
            LabError::Mismatch(_) => "lab.mismatch",
            LabError::StepCollapse { .. } => "lab.step-collapse",
            LabError::VanishingGradient { .. } => "lab.vanishing-gradient",
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Lossless-enough conversion of an `f64` constant.
pub fn cast<T: num_traits::Float>(x: f64) -> T {
    T::from(x).expect("float conversion")
}

pub fn to_c<T: num_traits::Float>(z: num_complex::Complex64) -> C<T> {
    C::new(cast(z.re), cast(z.im))
}
