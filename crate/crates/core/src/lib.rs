pub mod cellular;
pub mod engine;
pub mod harness;
pub mod linalg;
pub mod scalars;
pub mod symgrp;
pub mod tabcomb;
