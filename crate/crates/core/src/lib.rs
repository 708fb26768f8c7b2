//! Exact homological algebra for the 3x3 diagram extension problem over
//! `Z` and `Z/m`: presented modules, Ext via free resolutions, Yoneda
//! products and Baer sums, extendability of 3x3 diagrams, compatible
//! isomorphisms, and hexagon frames solved through the same machinery.

pub mod cli;
pub mod diagram;
pub mod document;
pub mod ext;
pub mod fgmod;
pub mod fuzz;
pub mod generate;
pub mod hexagon;
pub mod linalg;
pub mod oracle;
