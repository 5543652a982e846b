pub mod distmodel;
pub mod error;
pub mod extreal;
pub mod numeric;
pub mod posterior;
pub mod hpd;
pub mod scan;
pub mod coverage;
pub mod postselect;
pub mod config;
pub mod figures;
