//! Exact enumeration of fusion modules, bimodules and multiplication maps
//! over the Asaeda-Haagerup fusion rings, with a rule-based deduction of
//! which bimodules are realized and a subfactor census.

pub mod exactnum;
pub mod fusionring;
pub mod io;
pub mod gramdecomp;
pub mod nimrep;
pub mod bimodule;
pub mod multcompat;
pub mod groupoid;
pub mod subfactors;
pub mod workspace;
pub mod report;
