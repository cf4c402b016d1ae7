#include "theta/sketch_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "theta/error.hpp"

namespace theta::io {

namespace {

constexpr std::string_view kHeader = "thetasketch v1";

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex16(std::string_view text, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v, 16);
  if (text.size() != 16 || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 16 hex digits, got '" +
                                           std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v, 10);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected an integer, got '" +
                                           std::string(text) + "'");
  }
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::string_view bytes) : rest_(bytes) {}

  std::string_view next() {
    if (rest_.empty()) {
      throw Error(ErrorCode::ParseError, "unexpected end of input after line " + std::to_string(line_no_));
    }
    ++line_no_;
    const auto nl = rest_.find('\n');
    std::string_view line = rest_.substr(0, nl);
    rest_ = nl == std::string_view::npos ? std::string_view{} : rest_.substr(nl + 1);
    return line;
  }

  std::string_view field(std::string_view key) {
    const std::string_view line = next();
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != '=') {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no_) + ": expected '" + std::string(key) +
                                             "=', got '" + std::string(line) + "'");
    }
    return line.substr(key.size() + 1);
  }

  [[nodiscard]] std::size_t line_no() const noexcept { return line_no_; }
  [[nodiscard]] bool done() const noexcept { return rest_.empty(); }

 private:
  std::string_view rest_;
  std::size_t line_no_ = 0;
};

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::string percent_encode(std::string_view id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    switch (c) {
      case '%': out += "%25"; break;
      case ' ': out += "%20"; break;
      case '\n': out += "%0A"; break;
      case '\r': out += "%0D"; break;
      default: out += c;
    }
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '%') {
      out += text[i];
      continue;
    }
    if (i + 2 >= text.size()) {
      throw Error(ErrorCode::ParseError, "truncated percent escape");
    }
    const int hi = hex_digit(text[i + 1]);
    const int lo = hex_digit(text[i + 2]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::ParseError, "bad percent escape");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::string serialize_sketch(const ThetaSketch& sk) {
  ThetaSketch canon = sk;
  canonicalize(canon);
  std::string out;
  out.reserve(128 + 18 * canon.entries.size());
  out += kHeader;
  out += "\ntcf=";
  out += to_string(canon.tcf_kind);
  out += "\nk=" + std::to_string(canon.k);
  out += "\nseed=" + hex16(canon.hash_seed.value);
  out += "\ntheta=" + hex16(std::bit_cast<std::uint64_t>(canon.theta));
  out += std::string("\nretain_ids=") + (canon.retains_ids ? "1" : "0");
  out += "\ncount=" + std::to_string(canon.entries.size());
  out += '\n';
  for (const auto& e : canon.entries) {
    out += hex16(e.hash.raw);
    if (e.identifier) {
      out += ' ';
      out += percent_encode(*e.identifier);
    }
    out += '\n';
  }
  return out;
}

ThetaSketch deserialize_sketch(std::string_view bytes) {
  LineReader in(bytes);
  const std::string_view header = in.next();
  if (header != kHeader) {
    if (header.starts_with("thetasketch ")) {
      throw Error(ErrorCode::ParseError, "unsupported version '" + std::string(header.substr(12)) + "'");
    }
    throw Error(ErrorCode::ParseError, "missing 'thetasketch v1' header");
  }
  ThetaSketch sk;
  const std::string_view tcf = in.field("tcf");
  const auto kind = tcf_kind_from_string(tcf);
  if (!kind) throw Error(ErrorCode::ParseError, "unknown tcf '" + std::string(tcf) + "'");
  sk.tcf_kind = *kind;
  const std::uint64_t k = parse_uint(in.field("k"), in.line_no());
  if (k > UINT32_MAX) throw Error(ErrorCode::ParseError, "k out of range");
  sk.k = static_cast<std::uint32_t>(k);
  sk.hash_seed = HashSeed{parse_hex16(in.field("seed"), in.line_no())};
  sk.theta = std::bit_cast<double>(parse_hex16(in.field("theta"), in.line_no()));
  const std::string_view retain = in.field("retain_ids");
  if (retain != "0" && retain != "1") throw Error(ErrorCode::ParseError, "retain_ids must be 0 or 1");
  sk.retains_ids = retain == "1";
  const std::uint64_t count = parse_uint(in.field("count"), in.line_no());
  if (count > bytes.size()) throw Error(ErrorCode::ParseError, "count exceeds input size");
  sk.entries.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string_view line = in.next();
    const auto space = line.find(' ');
    Entry e{UnitHash::from_raw(parse_hex16(line.substr(0, space), in.line_no())), std::nullopt};
    if (space != std::string_view::npos) e.identifier = percent_decode(line.substr(space + 1));
    sk.entries.push_back(std::move(e));
  }
  if (!in.done()) throw Error(ErrorCode::ParseError, "trailing data after line " + std::to_string(in.line_no()));

  const auto problems = validate(sk);
  if (!problems.empty()) throw Error(ErrorCode::InvariantError, problems.front());
  return sk;
}

std::vector<std::string> read_stream(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(std::move(line));
  }
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed");
  return out;
}

std::vector<std::string> read_stream_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_stream(f);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace theta::io
