pub mod bounds;
pub mod config;
pub mod curvature;
pub mod error;
pub mod exact;
pub mod expr;
pub mod mesh;
pub mod poly;
pub mod ramification;
pub mod rational;
pub mod report;
pub mod roots;
pub mod sphere;
pub mod weierstrass;
