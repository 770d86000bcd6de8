//! The frequency-conversion stage: single-photon mode transform, the
//! postselected polarization channel, named operating points, and the
//! pump-power efficiency model.

mod channel;
mod efficiency;

pub use channel::{
    apply_qfc_postselected, classify_operating_point, conversion_kraus, mode_transform, reduce_phase, Arm,
    FourModeState, FrequencyMeta, OperatingPoint, QfcConfig,
};
pub use efficiency::{
    efficiency, fit_efficiency, fit_efficiency_with, parse_calibration, EfficiencyFit, EfficiencyModel, FitOptions,
};
