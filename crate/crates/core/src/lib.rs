//! Exact-arithmetic rational homotopy workbench.
//!
//! Sullivan algebras and their minimality tests, graded Lie algebras and
//! their lower central series, Cartan–Chevalley–Eilenberg cdgas, Magnus
//! expansions of free groups, and tables for orbit configuration spaces of
//! surfaces. All arithmetic is over the rationals and exact.

pub mod exactla;
pub mod gca;
pub mod gradedlie;
pub mod poly;
pub mod sullivan;
pub mod cce;
pub mod malcev;
pub mod catalog;
