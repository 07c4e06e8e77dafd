pub mod chart;
pub mod curve;
pub mod family;
pub mod filtration;
pub mod input;
pub mod record;
pub mod web;
