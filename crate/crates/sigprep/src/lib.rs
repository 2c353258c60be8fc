//! Signature-image preprocessing toolkit.
//!
//! The pipeline mirrors the classical offline-signature preparation sequence:
//! grayscale conversion, size normalization, Otsu binarization, morphological
//! cleanup (bridge, remove, skeletonize), edge detection, and content-based
//! auto-cropping to the inked region of interest. A discrete Radon transform
//! doubles as the cost probe for comparing processing time across image kinds
//! and between original and cropped images.

pub mod bench;
pub mod cli;
pub mod edges;
mod error;
pub mod generate;
pub mod image;
pub mod morph;
pub mod netpbm;
pub mod pipeline;
pub mod radon;
pub mod roi;
pub mod threshold;

pub use error::{Error, Result};
pub use image::{invert, resize_bilinear, rgb_to_gray, BinaryImage, Convention, GrayImage, RgbImage};
pub use roi::BoundingBox;
pub use threshold::{binarize, histogram, otsu_threshold, Histogram256, ThresholdResult};
