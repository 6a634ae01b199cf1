#include "scov/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scov::io {

static_assert(std::endian::native == std::endian::little,
              "binary format assumes a little-endian host");

namespace {

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
    std::ifstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

}  // namespace

ObservationMatrix read_csv(std::istream& in, bool skip_header) {
    ObservationMatrix m;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first && skip_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        std::size_t cols = 0;
        const char* s = line.data();
        const char* end = s + line.size();
        while (s < end) {
            const char* field_end = static_cast<const char*>(
                memchr(s, ',', static_cast<std::size_t>(end - s)));
            if (!field_end) field_end = end;
            double v{};
            while (s < field_end && (*s == ' ' || *s == '\t')) ++s;
            auto [ptr, ec] = std::from_chars(s, field_end, v);
            if (ec != std::errc{})
                throw std::runtime_error("csv: bad number in line: " + line);
            m.data.push_back(v);
            ++cols;
            s = field_end < end ? field_end + 1 : end;
        }
        if (m.p == 0)
            m.p = cols;
        else if (cols != m.p)
            throw std::runtime_error("csv: inconsistent column count");
        ++m.n;
    }
    return m;
}

ObservationMatrix read_csv_file(const std::string& path, bool skip_header) {
    auto f = open_in(path, std::ios::in);
    return read_csv(f, skip_header);
}

ObservationMatrix read_binary(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kBinaryMagic, 8) != 0)
        throw std::runtime_error("binary: bad magic");
    std::uint64_t n = 0, p = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&p), 8);
    if (!in) throw std::runtime_error("binary: truncated header");
    ObservationMatrix m;
    m.n = n;
    m.p = p;
    m.data.resize(n * p);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (!in) throw std::runtime_error("binary: truncated payload");
    return m;
}

ObservationMatrix read_binary_file(const std::string& path) {
    auto f = open_in(path, std::ios::binary);
    return read_binary(f);
}

void write_binary(std::ostream& out, const ObservationMatrix& m) {
    out.write(kBinaryMagic, 8);
    const std::uint64_t n = m.n, p = m.p;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&p), 8);
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(double)));
}

void write_binary_file(const std::string& path, const ObservationMatrix& m) {
    auto f = open_out(path, std::ios::binary);
    write_binary(f, m);
}

ObservationMatrix read_matrix_file(const std::string& path, bool skip_header) {
    {
        auto f = open_in(path, std::ios::binary);
        char magic[8] = {};
        f.read(magic, 8);
        if (f && std::memcmp(magic, kBinaryMagic, 8) == 0)
            return read_binary_file(path);
    }
    return read_csv_file(path, skip_header);
}

void write_entry_set(std::ostream& out, const SparseEntrySet& set) {
    out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& e : set.entries)
        out << e.i << ',' << e.j << ',' << e.value << '\n';
}

void write_entry_set_file(const std::string& path, const SparseEntrySet& set) {
    auto f = open_out(path, std::ios::out);
    write_entry_set(f, set);
}

SparseEntrySet read_entry_set_file(const std::string& path) {
    auto f = open_in(path, std::ios::in);
    SparseEntrySet set;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        SparseEntrySet::Entry e{};
        char c1, c2;
        if (!(ss >> e.i >> c1 >> e.j >> c2 >> e.value) || c1 != ',' ||
            c2 != ',')
            throw std::runtime_error("entry set: bad line: " + line);
        set.entries.push_back(e);
    }
    return set;
}

}  // namespace scov::io
