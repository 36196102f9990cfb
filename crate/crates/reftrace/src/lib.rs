pub mod analyze;
pub mod cli;
pub mod config;
pub mod orchestrator;
pub mod output;
pub mod provider;
pub mod report;
pub mod sample;
pub mod store;
pub mod variants;
