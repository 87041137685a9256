//! Metric systems, orbit segments, periodic orbits and quasi-orbits.

mod countable;
mod orbit;
mod symbolic;
mod system;

pub use countable::{CountableProduct, ValueSeq};
pub use orbit::{assemble_quasi_orbit, orbit_segment, periodic_orbit, PeriodicOrbit, PointSeq, QuasiOrbit};
pub use symbolic::{
    format_word, is_primitive, parse_word, shift_metric, EventuallyPeriodic, FullShift, ShiftDistance,
    SymbolicPoint, DEFAULT_DEPTH,
};
pub use system::{CircleRotation, MetricSystem, PointKind, RealLine};
pub(crate) use system::wrap;
