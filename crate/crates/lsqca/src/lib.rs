pub mod analysis;
pub mod cli;
pub mod floorplan;
pub mod frontend;
pub mod isa;
pub mod msf;
pub mod sam;
pub mod sim;
