//! Experiment runner for the untrusted-relay library: figure tables,
//! parameter sweeps and lattice-chain checks, written as CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod table;

pub use config::{Experiment, ExperimentConfig, Scale, SweepAxis};
pub use experiments::run;
pub use table::Table;

use thiserror::Error;

pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("invalid config: {0}")]
    Model(#[from] untrusted_relay::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for anything wrong with the configuration, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Model(_) => 2,
            RunError::Io { .. } => 3,
        }
    }
}

/// `name vX.Y.Z`, as echoed into every table.
pub fn version() -> String {
    format!("{} v{}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Writes `table` to `out`, or to standard output when `out` is `None`.
pub fn write_table(table: &Table, out: Option<&std::path::Path>) -> Result<(), RunError> {
    use std::io::Write;
    match out {
        Some(path) => {
            let io_err = |source| RunError::Io {
                context: format!("writing {}", path.display()),
                source,
            };
            let file = std::fs::File::create(path).map_err(io_err)?;
            let mut w = std::io::BufWriter::new(file);
            table.write_csv(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            table
                .write_csv(&mut w)
                .and_then(|_| w.flush())
                .map_err(|source| RunError::Io {
                    context: "writing standard output".into(),
                    source,
                })
        }
    }
}
