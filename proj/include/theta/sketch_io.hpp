#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "theta/sketch.hpp"

namespace theta::io {

// Text format, version 1, one field per line:
//
//   thetasketch v1
//   tcf=<kmv|adaptive|pkmv|fixed|alpha|union|intersect|diff|biased>
//   k=<int>
//   seed=<16 hex digits>
//   theta=<16 hex digits of the binary64 bit pattern>
//   retain_ids=<0|1>
//   count=<int>
//   <16 hex digits of raw hash>[ <percent-encoded identifier>]   (count lines)
//
// Entries are written in ascending raw order. Identifiers escape '%', ' ',
// '\n' and '\r' as %25, %20, %0A, %0D.

/// Canonical bytes for a sketch; equal sketches serialize identically.
[[nodiscard]] std::string serialize_sketch(const ThetaSketch& sk);

/// Throws Error{ParseError} on malformed input or an unknown version and
/// Error{InvariantError} if the decoded sketch fails validate().
[[nodiscard]] ThetaSketch deserialize_sketch(std::string_view bytes);

[[nodiscard]] std::string percent_encode(std::string_view id);
/// Throws Error{ParseError} on a bad escape.
[[nodiscard]] std::string percent_decode(std::string_view text);

/// Newline-delimited identifiers; blank lines (and a trailing '\r') are
/// dropped, duplicates kept.
[[nodiscard]] std::vector<std::string> read_stream(std::istream& in);
/// Throws Error{IoError} if the file cannot be opened.
[[nodiscard]] std::vector<std::string> read_stream_file(const std::string& path);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace theta::io
