#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bkhm/dynamics.hpp"
#include "bkhm/field.hpp"

namespace bkhm {

inline constexpr std::uint16_t snapshot_version = 1;

/// Decoded snapshot file: headers plus the interior vorticity samples.
struct Snapshot {
    ChannelGrid grid;
    PhysicsParams physics;
    double t = 0.0;
    std::int64_t step_index = 0;
    PhysicalField omega;

    FlowState state() const;
};

/// Layout: "BKHM", u16 version, L a b (f64), N1 N2 (u32), nu alpha beta f0
/// (f64), t (f64), step_index (i64), N1*N2 f64 samples (x2 outer), then the
/// 64-bit FNV-1a hash of every preceding byte. Little-endian throughout.
std::string encode_snapshot(const FlowState& s, const PhysicsParams& p);
Snapshot decode_snapshot(const std::string& bytes);

void write_snapshot(const std::filesystem::path& path, const FlowState& s, const PhysicsParams& p);
Snapshot read_snapshot(const std::filesystem::path& path);
/// As above, but throws GridMismatchError unless the file's grid is `expected`.
Snapshot read_snapshot(const std::filesystem::path& path, const ChannelGrid& expected);

/// Regular files named *.bkhm in `dir`, sorted by name.
std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir);
std::string snapshot_name(std::int64_t index);

std::uint64_t fnv1a64(const char* data, std::size_t n);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Write via a temporary in the same directory, then rename over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    CsvWriter& row(const std::vector<double>& values);
    CsvWriter& row(const std::vector<std::string>& cells);
    const std::string& text() const { return text_; }
    void save(const std::filesystem::path& path) const { write_file_atomic(path, text_); }

private:
    std::size_t columns_;
    std::string text_;
};

}  // namespace bkhm
