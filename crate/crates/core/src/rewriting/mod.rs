pub mod finite;
pub mod zhang;
