#include "hef/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "hef/error.hpp"

namespace hef {

namespace {

std::string lower_ext(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

void read_exact(std::ifstream& in, char* dst, std::size_t n, const std::string& path) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw_error(ErrorCode::CorruptHeader, "short read in " + path);
    }
}

int pgm_next_token(std::ifstream& in, const std::string& path) {
    // skips whitespace and '#' comments, then reads one unsigned integer
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF || !std::isdigit(c)) {
        throw_error(ErrorCode::CorruptHeader, "malformed PGM header in " + path);
    }
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > 1 << 30) throw_error(ErrorCode::CorruptHeader, "PGM header overflow");
        c = in.get();
    }
    return static_cast<int>(value);
}

// FITS cards are 80 bytes; headers come in 2880-byte blocks.
constexpr std::size_t kFitsBlock = 2880;
constexpr std::size_t kFitsCard = 80;

std::string fits_card(const std::string& key, const std::string& value,
                      bool quoted_string = false) {
    char buf[kFitsCard + 1];
    if (quoted_string) {
        std::snprintf(buf, sizeof(buf), "%-8s= '%s'", key.c_str(), value.c_str());
    } else {
        std::snprintf(buf, sizeof(buf), "%-8s= %20s", key.c_str(), value.c_str());
    }
    std::string card = buf;
    card.resize(kFitsCard, ' ');
    return card;
}

void write_fits_header(std::ofstream& out, int bitpix, int width, int height,
                       Timestamp timestamp) {
    std::string header;
    std::string end = "END";
    end.resize(kFitsCard, ' ');
    std::string simple = "SIMPLE  =                    T";
    simple.resize(kFitsCard, ' ');
    header += simple;
    header += fits_card("BITPIX", std::to_string(bitpix));
    header += fits_card("NAXIS", "2");
    header += fits_card("NAXIS1", std::to_string(width));
    header += fits_card("NAXIS2", std::to_string(height));
    header += fits_card("DATE-OBS", format_rfc3339(timestamp).substr(0, 19), true);
    header += end;
    header.resize(((header.size() + kFitsBlock - 1) / kFitsBlock) * kFitsBlock, ' ');
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void pad_to_block(std::ofstream& out, std::size_t written) {
    const std::size_t rem = written % kFitsBlock;
    if (rem != 0) {
        std::string pad(kFitsBlock - rem, '\0');
        out.write(pad.data(), static_cast<std::streamsize>(pad.size()));
    }
}

} // namespace

FrameBuffer read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
    char magic[2];
    read_exact(in, magic, 2, path);
    if (magic[0] != 'P' || magic[1] != '5') {
        throw_error(ErrorCode::UnsupportedFormat, "not a binary PGM: " + path);
    }
    const int width = pgm_next_token(in, path);
    const int height = pgm_next_token(in, path);
    const int maxval = pgm_next_token(in, path);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw_error(ErrorCode::CorruptHeader, "bad PGM dimensions in " + path);
    }
    // single whitespace after maxval already consumed by token reader
    FrameBuffer frame(width, height);
    const std::size_t count = frame.size();
    if (maxval < 256) {
        std::vector<std::uint8_t> raw(count);
        read_exact(in, reinterpret_cast<char*>(raw.data()), count, path);
        for (std::size_t i = 0; i < count; ++i) frame.data[i] = static_cast<float>(raw[i]);
    } else {
        std::vector<std::uint8_t> raw(count * 2);
        read_exact(in, reinterpret_cast<char*>(raw.data()), count * 2, path);
        for (std::size_t i = 0; i < count; ++i) {
            frame.data[i] = static_cast<float>((raw[2 * i] << 8) | raw[2 * i + 1]);
        }
    }
    return frame;
}

void write_pgm16(const std::string& path, const FrameBuffer& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    out << "P5\n" << frame.width << " " << frame.height << "\n65535\n";
    std::vector<std::uint8_t> raw(frame.size() * 2);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const float clamped = std::clamp(frame.data[i], 0.0f, 65535.0f);
        const std::uint16_t v = static_cast<std::uint16_t>(std::lround(clamped));
        raw[2 * i] = static_cast<std::uint8_t>(v >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw_error(ErrorCode::IoError, "write failed: " + path);
}

void write_pgm8(const std::string& path, const std::vector<std::uint8_t>& data, int width,
                int height) {
    if (static_cast<std::size_t>(width) * height != data.size()) {
        throw_error(ErrorCode::DimensionMismatch, "mask size does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw_error(ErrorCode::IoError, "write failed: " + path);
}

std::vector<std::uint8_t> read_pgm8(const std::string& path, int& width, int& height) {
    FrameBuffer frame = read_pgm(path);
    width = frame.width;
    height = frame.height;
    std::vector<std::uint8_t> data(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        data[i] = static_cast<std::uint8_t>(std::clamp(frame.data[i], 0.0f, 255.0f));
    }
    return data;
}

FrameBuffer read_fits(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);

    int bitpix = 0, naxis = -1, naxis1 = 0, naxis2 = 0;
    double bzero = 0.0, bscale = 1.0;
    std::string date_obs;
    bool simple_seen = false;
    bool end_seen = false;
    std::size_t header_blocks = 0;

    char block[kFitsBlock];
    while (!end_seen) {
        in.read(block, kFitsBlock);
        if (static_cast<std::size_t>(in.gcount()) != kFitsBlock) {
            throw_error(ErrorCode::CorruptHeader, "truncated FITS header in " + path);
        }
        ++header_blocks;
        for (std::size_t off = 0; off < kFitsBlock; off += kFitsCard) {
            std::string card(block + off, kFitsCard);
            const std::string key = card.substr(0, 8);
            if (key == "END     ") {
                end_seen = true;
                break;
            }
            if (card.size() < 10 || card[8] != '=') continue;
            std::string value = card.substr(10);
            // strip surrounding quotes/comment
            const std::size_t slash = value.find('/');
            if (slash != std::string::npos && value.find('\'') == std::string::npos) {
                value = value.substr(0, slash);
            }
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t'");
                const auto e = s.find_last_not_of(" \t'");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            value = trim(value);
            if (key == "SIMPLE  ") simple_seen = value.starts_with("T");
            else if (key == "BITPIX  ") bitpix = std::atoi(value.c_str());
            else if (key == "NAXIS   ") naxis = std::atoi(value.c_str());
            else if (key == "NAXIS1  ") naxis1 = std::atoi(value.c_str());
            else if (key == "NAXIS2  ") naxis2 = std::atoi(value.c_str());
            else if (key == "BZERO   ") bzero = std::atof(value.c_str());
            else if (key == "BSCALE  ") bscale = std::atof(value.c_str());
            else if (key == "DATE-OBS") date_obs = value;
        }
        if (header_blocks == 1 && !simple_seen) {
            throw_error(ErrorCode::UnsupportedFormat, "missing SIMPLE card: " + path);
        }
        if (header_blocks > 64) {
            throw_error(ErrorCode::CorruptHeader, "unterminated FITS header in " + path);
        }
    }

    if (naxis != 2 || naxis1 <= 0 || naxis2 <= 0) {
        throw_error(ErrorCode::UnsupportedFormat,
                    "only 2D primary HDUs are supported: " + path);
    }
    if (bitpix != 16 && bitpix != -32) {
        throw_error(ErrorCode::UnsupportedFormat,
                    "BITPIX " + std::to_string(bitpix) + " not supported: " + path);
    }

    FrameBuffer frame(naxis1, naxis2);
    const std::size_t count = frame.size();
    if (bitpix == 16) {
        std::vector<std::uint8_t> raw(count * 2);
        read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
        for (std::size_t i = 0; i < count; ++i) {
            const std::int16_t v =
                static_cast<std::int16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
            frame.data[i] = static_cast<float>(bzero + bscale * v);
        }
    } else {
        std::vector<std::uint8_t> raw(count * 4);
        read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t bits = (static_cast<std::uint32_t>(raw[4 * i]) << 24) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 1]) << 16) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 2]) << 8) |
                                 static_cast<std::uint32_t>(raw[4 * i + 3]);
            float v;
            std::memcpy(&v, &bits, 4);
            frame.data[i] = static_cast<float>(bzero + bscale * v);
        }
    }
    if (!all_finite(frame)) {
        throw_error(ErrorCode::CorruptHeader, "non-finite samples in " + path);
    }
    if (!date_obs.empty()) {
        if (auto ts = parse_rfc3339(date_obs)) frame.timestamp = *ts;
    }
    return frame;
}

void write_fits16(const std::string& path, const FrameBuffer& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    write_fits_header(out, 16, frame.width, frame.height, frame.timestamp);
    std::vector<std::uint8_t> raw(frame.size() * 2);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const float clamped = std::clamp(frame.data[i], -32768.0f, 32767.0f);
        const std::int16_t v = static_cast<std::int16_t>(std::lround(clamped));
        raw[2 * i] = static_cast<std::uint8_t>((v >> 8) & 0xff);
        raw[2 * i + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    pad_to_block(out, raw.size());
    if (!out) throw_error(ErrorCode::IoError, "write failed: " + path);
}

void write_fits_float(const std::string& path, const FrameBuffer& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    write_fits_header(out, -32, frame.width, frame.height, frame.timestamp);
    std::vector<std::uint8_t> raw(frame.size() * 4);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &frame.data[i], 4);
        raw[4 * i] = static_cast<std::uint8_t>(bits >> 24);
        raw[4 * i + 1] = static_cast<std::uint8_t>((bits >> 16) & 0xff);
        raw[4 * i + 2] = static_cast<std::uint8_t>((bits >> 8) & 0xff);
        raw[4 * i + 3] = static_cast<std::uint8_t>(bits & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    pad_to_block(out, raw.size());
    if (!out) throw_error(ErrorCode::IoError, "write failed: " + path);
}

void write_cache(const std::string& path, const FrameBuffer& frame) {
    static_assert(sizeof(float) == 4);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_error(ErrorCode::IoError, "cannot write " + path);
    const char magic[4] = {'H', 'E', 'F', '1'};
    out.write(magic, 4);
    const std::uint32_t w = static_cast<std::uint32_t>(frame.width);
    const std::uint32_t h = static_cast<std::uint32_t>(frame.height);
    const std::int64_t ts = frame.timestamp;
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(&ts), 8);
    out.write(reinterpret_cast<const char*>(frame.data.data()),
              static_cast<std::streamsize>(frame.size() * 4));
    if (!out) throw_error(ErrorCode::IoError, "write failed: " + path);
}

FrameBuffer read_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_error(ErrorCode::IoError, "cannot open " + path);
    char magic[4];
    read_exact(in, magic, 4, path);
    if (std::memcmp(magic, "HEF1", 4) != 0) {
        throw_error(ErrorCode::UnsupportedFormat, "bad cache magic in " + path);
    }
    std::uint32_t w = 0, h = 0;
    std::int64_t ts = 0;
    read_exact(in, reinterpret_cast<char*>(&w), 4, path);
    read_exact(in, reinterpret_cast<char*>(&h), 4, path);
    read_exact(in, reinterpret_cast<char*>(&ts), 8, path);
    if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
        throw_error(ErrorCode::CorruptHeader, "bad cache dimensions in " + path);
    }
    FrameBuffer frame(static_cast<int>(w), static_cast<int>(h));
    frame.timestamp = ts;
    read_exact(in, reinterpret_cast<char*>(frame.data.data()), frame.size() * 4, path);
    return frame;
}

FrameBuffer load_frame(const std::string& path, int index) {
    const std::string ext = lower_ext(path);
    FrameBuffer frame;
    if (ext == ".pgm") {
        frame = read_pgm(path);
    } else if (ext == ".fits" || ext == ".fit" || ext == ".fts") {
        frame = read_fits(path);
    } else if (ext == ".hef") {
        frame = read_cache(path);
    } else {
        throw_error(ErrorCode::UnsupportedFormat, "unrecognized frame format: " + path);
    }
    if (frame.timestamp == 0) {
        const std::string name = std::filesystem::path(path).filename().string();
        if (auto ts = parse_filename_timestamp(name)) {
            frame.timestamp = *ts;
        } else {
            throw_error(ErrorCode::MissingTimestamp,
                        "no DATE-OBS and no _YYYYMMDD_HHMMSS filename pattern: " + path);
        }
    }
    frame.frame_index = index;
    return frame;
}

SequenceManifest build_manifest(const std::vector<std::string>& paths) {
    SequenceManifest manifest;
    manifest.entries.reserve(paths.size());
    for (const std::string& path : paths) {
        const std::string ext = lower_ext(path);
        Timestamp ts = 0;
        if (ext == ".fits" || ext == ".fit" || ext == ".fts") {
            ts = read_fits(path).timestamp;
        } else if (ext == ".hef") {
            ts = read_cache(path).timestamp;
        }
        if (ts == 0) {
            const std::string name = std::filesystem::path(path).filename().string();
            if (auto parsed = parse_filename_timestamp(name)) {
                ts = *parsed;
            } else {
                throw_error(ErrorCode::MissingTimestamp, "no timestamp for " + path);
            }
        }
        manifest.entries.push_back({path, ts});
    }
    std::stable_sort(manifest.entries.begin(), manifest.entries.end(),
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    std::vector<double> gaps;
    for (std::size_t i = 1; i < manifest.entries.size(); ++i) {
        if (manifest.entries[i].timestamp <= manifest.entries[i - 1].timestamp) {
            throw_error(ErrorCode::InvalidScenario,
                        "timestamps not strictly increasing at " + manifest.entries[i].path);
        }
        gaps.push_back(static_cast<double>(manifest.entries[i].timestamp -
                                           manifest.entries[i - 1].timestamp) /
                       kMicrosPerSecond);
    }
    if (!gaps.empty()) {
        std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
        manifest.cadence_hint_s = gaps[gaps.size() / 2];
    }
    return manifest;
}

std::vector<std::string> list_frame_files(const std::string& directory) {
    std::vector<std::string> files;
    if (!std::filesystem::is_directory(directory)) {
        throw_error(ErrorCode::IoError, "not a directory: " + directory);
    }
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lower_ext(entry.path().string());
        if (ext == ".pgm" || ext == ".fits" || ext == ".fit" || ext == ".fts" || ext == ".hef") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace hef
