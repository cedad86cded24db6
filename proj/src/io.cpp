#include "bkhm/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "bkhm/error.hpp"
#include "bkhm/operators.hpp"
#include "bkhm/transform.hpp"

namespace bkhm {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char magic[4] = {'B', 'K', 'H', 'M'};
constexpr std::size_t header_bytes = 4 + 2 + 3 * 8 + 2 * 4 + 4 * 8 + 8 + 8;

template <class T>
void put(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Cursor {
public:
    explicit Cursor(const std::string& s) : s_(s) {}
    template <class T>
    T take() {
        if (pos_ + sizeof(T) > s_.size()) throw TruncatedFileError("snapshot: file ends inside the header");
        T v;
        std::memcpy(&v, s_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::size_t pos() const { return pos_; }

private:
    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t fnv1a64(const char* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ull;
    }
    return h;
}

FlowState Snapshot::state() const {
    SpectralField w = transform_forward_dealiased(omega);
    return FlowState(std::move(w), t, step_index);
}

std::string encode_snapshot(const FlowState& s, const PhysicsParams& p) {
    const ChannelGrid& g = s.omega.grid;
    const PhysicalField w = transform_inverse(s.omega);
    std::string out;
    out.reserve(header_bytes + w.values.size() * 8 + 8);
    out.append(magic, 4);
    put<std::uint16_t>(out, snapshot_version);
    put(out, g.L());
    put(out, g.a());
    put(out, g.b());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.N1()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.N2()));
    put(out, p.nu);
    put(out, p.alpha);
    put(out, p.beta);
    put(out, p.f0);
    put(out, s.t);
    put<std::int64_t>(out, s.step_index);
    for (double v : w.values) put(out, v);
    put(out, fnv1a64(out.data(), out.size()));
    return out;
}

Snapshot decode_snapshot(const std::string& bytes) {
    if (bytes.size() < 6) throw TruncatedFileError("snapshot: file shorter than its header");
    if (std::memcmp(bytes.data(), magic, 4) != 0) throw FormatError("snapshot: bad magic bytes");
    Cursor c(bytes);
    c.take<std::uint32_t>();
    const auto version = c.take<std::uint16_t>();
    if (version != snapshot_version)
        throw VersionError("snapshot: format version " + std::to_string(version) + ", expected " +
                           std::to_string(snapshot_version));
    const double L = c.take<double>(), a = c.take<double>(), b = c.take<double>();
    const auto n1 = c.take<std::uint32_t>(), n2 = c.take<std::uint32_t>();
    PhysicsParams p;
    p.nu = c.take<double>();
    p.alpha = c.take<double>();
    p.beta = c.take<double>();
    p.f0 = c.take<double>();
    const double t = c.take<double>();
    const auto step = c.take<std::int64_t>();

    const std::size_t count = static_cast<std::size_t>(n1) * n2;
    if (n1 > (1u << 20) || n2 > (1u << 20)) throw FormatError("snapshot: implausible grid size");
    const std::size_t expected = header_bytes + 8 * count + 8;
    if (bytes.size() < expected) throw TruncatedFileError("snapshot: payload truncated");
    if (bytes.size() > expected) throw FormatError("snapshot: trailing bytes after checksum");
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + expected - 8, 8);
    if (stored != fnv1a64(bytes.data(), expected - 8)) throw ChecksumError("snapshot: checksum mismatch");

    ChannelGrid g = [&] {
        try {
            return ChannelGrid(L, a, b, static_cast<int>(n1), static_cast<int>(n2));
        } catch (const ValidationError& e) {
            throw FormatError(std::string("snapshot: invalid grid header: ") + e.what());
        }
    }();
    std::vector<double> v(count);
    std::memcpy(v.data(), bytes.data() + c.pos(), 8 * count);
    return Snapshot{g, p, t, step, PhysicalField(g, std::move(v))};
}

void write_snapshot(const std::filesystem::path& path, const FlowState& s, const PhysicsParams& p) {
    write_file_atomic(path, encode_snapshot(s, p));
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("snapshot: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string where = path.string() + ": ";
    try {
        return decode_snapshot(ss.str());
    } catch (const ChecksumError& e) {
        throw ChecksumError(where + e.what());
    } catch (const VersionError& e) {
        throw VersionError(where + e.what());
    } catch (const TruncatedFileError& e) {
        throw TruncatedFileError(where + e.what());
    } catch (const FormatError& e) {
        throw FormatError(where + e.what());
    }
}

Snapshot read_snapshot(const std::filesystem::path& path, const ChannelGrid& expected) {
    Snapshot s = read_snapshot(path);
    if (!(s.grid == expected))
        throw GridMismatchError(path.string() + ": snapshot grid " + std::to_string(s.grid.N1()) + "x" +
                                std::to_string(s.grid.N2()) + " does not match the configured grid " +
                                std::to_string(expected.N1()) + "x" + std::to_string(expected.N2()));
    return s;
}

std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".bkhm") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string snapshot_name(std::int64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%08lld.bkhm", static_cast<long long>(index));
    return buf;
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // no "-0" in text output
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row(header);
}

CsvWriter& CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    return row(cells);
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error("csv: row has " + std::to_string(cells.size()) + " cells, expected " +
                                              std::to_string(columns_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        text_ += cells[i];
    }
    text_ += '\n';
    return *this;
}

}  // namespace bkhm
