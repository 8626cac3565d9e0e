pub mod bdgraph;
pub mod decompose;
pub mod dual;
pub mod geodesic;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod rounding;
pub mod skflow;
