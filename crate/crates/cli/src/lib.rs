//! Command-line front end for `conecommit`: protocol and program files,
//! reports and the `analyze`, `generate` and `solve` commands.
//!
//! Exit codes: 0 pass, 1 I/O error, 2 parse error, 3 invalid protocol,
//! 4 solver or numerical failure, 5 failed check (including the trade-off
//! bound and oracle cross-checks), 6 trade-off bound inapplicable.

pub mod commands;
pub mod files;
pub mod report;
