//! Acceptance suite for `wvrecon`; see `tests/acceptance.rs`.
