pub mod canonical;
pub mod config;
pub mod diffpoly;
pub mod kdv;
pub mod numlab;
