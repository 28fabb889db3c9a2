//! Loading and saving: native containers, PGM frames, phantoms and run
//! manifests.

mod container;
mod frames;
mod manifest;
mod outputs;
mod pgm;
mod phantom;

pub use container::{
    decode_masks, decode_measurement, decode_nls_code, decode_signal, encode_masks, encode_measurement,
    encode_nls_code, encode_signal, load_masks, load_measurement, load_nls_code, load_signal, save_masks,
    save_measurement, save_nls_code, save_signal, ContainerKind, Header, HEADER_LEN, VERSION,
};
pub use frames::{load_frame_files, load_frames};
pub use manifest::{creation_timestamp, RunManifest, MANIFEST_FILE};
pub use outputs::{save_outputs, write_metrics_csv, OutputPaths, RunReport, METRICS_CSV_HEADER};
pub use pgm::{decode_pgm, encode_pgm, preview_8bit, quantize, read_pgm, write_pgm, PgmImage};
pub use phantom::{make_phantom, PhantomKind};
