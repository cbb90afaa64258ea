#pragma once

#include <stdexcept>
#include <string>

namespace qrflow {

// Error taxonomy mirrored by the CLI exit codes: parse_error -> 2,
// everything else derived from error -> 1.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments or values (wrong width, duplicate labels, out-of-range index).
struct input_error : error {
  explicit input_error(const std::string& what) : error(what) {}
};

// Structurally malformed object (invalid infomorphism, missing role, cycle).
struct structure_error : error {
  explicit structure_error(const std::string& what) : error(what) {}
};

// Mathematically undefined result (conditioning on measure zero, zero norm).
struct domain_error : error {
  explicit domain_error(const std::string& what) : error(what) {}
};

// Unreadable input file or malformed syntax; position is a byte offset when
// known, -1 otherwise.
struct parse_error : error {
  long long position;
  explicit parse_error(const std::string& what, long long pos = -1)
      : error(what), position(pos) {}
};

}  // namespace qrflow
