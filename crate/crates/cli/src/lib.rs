//! Library side of the `bmt` command-line tool: subcommand implementations
//! and the scripted, seeded experiment pipelines.

pub mod commands;
pub mod experiments;

/// Exit codes: 0 success, 2 validation failure, 3 solver non-convergence, 4 I/O.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    if let Some(core) = err.downcast_ref::<bmt_core::Error>() {
        match core {
            bmt_core::Error::SinkhornNonConvergence { .. }
            | bmt_core::Error::SimplexNonConvergence(_) => 3,
            bmt_core::Error::Io(_) => 4,
            _ => 2,
        }
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        4
    } else {
        2
    }
}
