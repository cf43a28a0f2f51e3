//! Downlink association, coverage, rate and energy-efficiency analysis for a
//! two-tier cellular network of macro cells and cooperating small cells.

pub mod analytic;
pub mod geometry;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
