//! A small emit/repeat machine standing in for a self-delimiting universal
//! machine: programs, execution, replication and an exact shortest-program
//! search.

pub mod machine;
pub mod oracle;
pub mod program;

pub use machine::{execute, repair, replicate, reversibility_test, run, run_encoded, Replica, Reversibility, RobotState};
pub use oracle::{shortest_program, OracleOutcome, OracleResult};
pub use program::{Instruction, TinyProgram};
