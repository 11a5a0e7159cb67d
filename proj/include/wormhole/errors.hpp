#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wormhole {

// Input vector is zero, non-finite, or collapses to zero mid-computation.
struct degenerate_input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed binary or text input; carries the byte offset of the problem.
struct parse_error : std::runtime_error {
  std::size_t offset;
  parse_error(const std::string& msg, std::size_t byte_offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
};

// Invalid run configuration (bad field, unknown key, unusable combination).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem failure; message names the path involved.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wormhole
