pub mod cli;
pub mod core;
pub mod enumerate;
pub mod heights;
pub mod localdens;
pub mod mahler;
pub mod p1lab;
pub mod toric;
pub mod verdict;
