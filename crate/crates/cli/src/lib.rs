//! File formats, parallel study runner and command-line front end for
//! `weibcv-core`.

pub mod analysis;
pub mod app;
pub mod io;
pub mod study;
pub mod table;
