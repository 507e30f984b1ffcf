pub mod convert;
pub mod evaluate;
pub mod sharpen;
pub mod simulate;
pub mod verify;
