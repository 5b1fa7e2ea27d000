#pragma once

#include <filesystem>
#include <iosfwd>

#include "whitham/spectral.hpp"

namespace whitham {

// Two-column text: one "x_j f(x_j)" line per collocation point, 17
// significant digits. The torus length is recovered from the spacing.
void write_field_text(const Field& f, std::ostream& out);
void write_field_text(const Field& f, const std::filesystem::path& path);
Field read_field_text(std::istream& in);
Field read_field_text(const std::filesystem::path& path);

// Binary: length (float64) and n_modes (uint64), both little-endian, followed
// by n_modes little-endian float64 collocation values.
void write_field_binary(const Field& f, std::ostream& out);
void write_field_binary(const Field& f, const std::filesystem::path& path);
Field read_field_binary(std::istream& in);
Field read_field_binary(const std::filesystem::path& path);

/// Picks the binary reader for a `.bin` extension, text otherwise.
Field read_field(const std::filesystem::path& path);

}  // namespace whitham
