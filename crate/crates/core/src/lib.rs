pub mod polycore;
pub mod realroots;
pub mod linalg;
pub mod classify;
pub mod connection;
pub mod holonomy;
pub mod geoverify;
pub mod density;
pub mod cli;
