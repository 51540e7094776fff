pub mod cli;
pub mod compose;
pub mod elements;
pub mod planner;
pub mod tether;
pub mod world;
