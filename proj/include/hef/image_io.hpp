#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hef/frame.hpp"

namespace hef {

/// Ordered frame sources for one detection run.
struct SequenceManifest {
    struct Entry {
        std::string path;
        Timestamp timestamp = 0;
    };
    std::vector<Entry> entries; // strictly increasing timestamps
    double cadence_hint_s = 0.0;
};

/// Reads a frame from 16-bit binary PGM or FITS (primary HDU, 2D).
/// Values are converted to float without rescaling. The timestamp comes from
/// DATE-OBS when present, else from a "*_YYYYMMDD_HHMMSS.*" filename pattern;
/// a frame without either is rejected (MissingTimestamp).
FrameBuffer load_frame(const std::string& path, int index);

/// Binary P5 PGM, maxval up to 65535 (two-byte samples are big-endian).
FrameBuffer read_pgm(const std::string& path);
void write_pgm16(const std::string& path, const FrameBuffer& frame);

/// 8-bit PGM used for label masks and debug output.
void write_pgm8(const std::string& path, const std::vector<std::uint8_t>& data, int width,
                int height);
std::vector<std::uint8_t> read_pgm8(const std::string& path, int& width, int& height);

/// FITS primary HDU, BITPIX 16 or -32, NAXIS=2. BZERO/BSCALE are applied on
/// read. The writer emits BITPIX 16 for integral data and a DATE-OBS card.
FrameBuffer read_fits(const std::string& path);
void write_fits16(const std::string& path, const FrameBuffer& frame);
void write_fits_float(const std::string& path, const FrameBuffer& frame);

/// Native cache: "HEF1", u32 width, u32 height, i64 unix-micros timestamp
/// (all little-endian), then width*height little-endian f32 samples.
/// Round-trips bit-exactly.
void write_cache(const std::string& path, const FrameBuffer& frame);
FrameBuffer read_cache(const std::string& path);

/// Builds a manifest from frame files, reading each timestamp. Entries are
/// sorted; duplicate or non-increasing timestamps are rejected. The cadence
/// hint is the median inter-frame gap.
SequenceManifest build_manifest(const std::vector<std::string>& paths);

/// All *.pgm / *.fits / *.fit / *.hef files directly inside a directory,
/// lexically sorted.
std::vector<std::string> list_frame_files(const std::string& directory);

} // namespace hef
