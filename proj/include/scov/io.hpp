#pragma once

#include <iosfwd>
#include <string>

#include "scov/linalg.hpp"

namespace scov::io {

// Binary layout: 8-byte magic "SCOVMAT1", little-endian u64 n, u64 p,
// then n*p little-endian f64, row-major.
inline constexpr char kBinaryMagic[8] = {'S', 'C', 'O', 'V',
                                         'M', 'A', 'T', '1'};

ObservationMatrix read_csv(std::istream& in, bool skip_header = false);
ObservationMatrix read_csv_file(const std::string& path,
                                bool skip_header = false);

ObservationMatrix read_binary(std::istream& in);
ObservationMatrix read_binary_file(const std::string& path);
void write_binary(std::ostream& out, const ObservationMatrix& m);
void write_binary_file(const std::string& path, const ObservationMatrix& m);

/// Sniffs the magic; falls back to CSV.
ObservationMatrix read_matrix_file(const std::string& path,
                                   bool skip_header = false);

/// Lines "i,j,value", 0-based, sorted by (i,j).
void write_entry_set(std::ostream& out, const SparseEntrySet& set);
void write_entry_set_file(const std::string& path, const SparseEntrySet& set);
SparseEntrySet read_entry_set_file(const std::string& path);

}  // namespace scov::io
