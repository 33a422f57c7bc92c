pub mod cli;
pub mod dynamics;
pub mod output;
pub mod symbolic;
pub mod system;
pub mod theorems;
pub mod transforms;
pub mod verdict;
