pub mod inequalities;
pub mod simulate;
pub mod sweep;
pub mod weight_check;
