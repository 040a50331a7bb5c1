//! Norm machinery and estimate probes.

pub mod bilinear;
pub mod pvar;
pub mod scan;
pub mod scattering;
pub mod strichartz;
pub mod xnorm;

pub use bilinear::{bilinear_exponent, bilinear_ratio, bilinear_ratio_packets, Packet};
pub use pvar::{
    p_variation, variation_profile, variation_tail_start, vp_delta_norm, VariationSample,
};
pub use scan::{
    bilinear_scan, bound_exponent, least_squares_slope, random_windowed_field, strichartz_scan,
    strichartz_window_profile, BilinearScan, EstimateScanReport, ScanRow, StrichartzScan,
};
pub use scattering::{scattering_profile, ScatteringProfile};
pub use strichartz::{check_admissible, strichartz_ratio, TimeWindow};
pub use xnorm::{x_norm_proxy, x_norm_proxy_blocks, XNormProxy};
