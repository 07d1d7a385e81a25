//! Wraps SystemC TLM target modules as FMI 3.0 Co-Simulation FMUs and runs
//! multi-rate co-simulations of FMU networks.
//!
//! The pipeline is [`tlm_scan`] (find the payload and its field directions),
//! [`fmi_map`] (types and `modelDescription.xml`), [`codegen`] (wrapper
//! sources), [`package`] (the `.fmu` archive) and [`cosim`] (the master).

pub mod behavioral;
pub mod bench;
pub mod cli;
pub mod codegen;
pub mod config;
pub mod cosim;
pub mod diag;
pub mod fmi_map;
pub mod package;
pub mod time;
pub mod tlm_scan;
