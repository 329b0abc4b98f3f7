//! Order-event ingestion, trading-desk reconstruction and the per-day
//! market-order stream.

pub mod desks;
pub mod events;
pub mod stream;

pub use desks::{build_desk_map, desk_map_from_pairs, DeskMap, UnionFind};
pub use events::{ingest_events, Action, EventFormat, Ingested, OrderEvent, Side};
pub use stream::{
    build_market_order_stream, build_stream_with_desks, read_flags, read_stream, write_stream,
    DayFlags, DayStream, DropReason, DroppedDay, ExclusionReason, FlagTable, MarketOrderRecord,
    StreamBuild, Tick,
};
