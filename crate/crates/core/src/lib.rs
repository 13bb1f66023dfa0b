#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geom;
pub mod model;
pub mod reduction;
pub mod feasibility;
pub mod limb_ik;
pub mod oracle;
pub mod posegen;
pub mod io;
pub mod motion;
pub mod bench;
