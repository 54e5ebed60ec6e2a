pub mod cells;
pub mod join;
pub mod polygon;
pub mod proj;
pub mod rtree;
pub mod sfha;
pub mod slr;

pub use cells::{all_cell_polygons, cell_polygon, CellGeometry};
pub use join::{build_cell_index, surge_above_ground, zone_cell_join, zone_max_surge, JoinError, SurgeValue, ZoneCellJoin, ZoneRecord};
pub use polygon::{intersection_area, interiors_overlap, Aabb, MultiPolygon, Polygon, Pt, Ring};
pub use proj::LocalProjection;
pub use rtree::StrTree;
pub use sfha::{sfha_area_share, shared_projection, SfhaError};
pub use slr::{slr_inundation, zone_slr_flags, DemRaster, SlrError};
