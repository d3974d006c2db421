pub mod bounds;
pub mod corpus;
pub mod domains;
pub mod forgetting;
pub mod harness;
pub mod logic;
pub mod metarule;
pub mod mil;
pub mod multitask;
pub mod signature;
