pub mod analyze;
pub mod corpus;
pub mod selftest;
