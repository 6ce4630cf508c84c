#include "metspace/rmf_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "rmf payloads are little-endian; big-endian hosts need byte swaps");

namespace metspace {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T, typename Fmt>
std::string join(const std::array<T, 4>& a, int dim, Fmt fmt) {
  std::string s;
  for (int i = 0; i < dim; ++i) {
    if (i) s += ",";
    s += fmt(a[i]);
  }
  return s;
}

std::string kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::Metric: return "metric";
    case FieldKind::Ell: return "ell";
    default: return "scalar";
  }
}

std::string make_header(const GridChart& c, FieldKind kind) {
  std::string h = "RMF1";
  h += " dim=" + std::to_string(c.dim);
  h += " shape=" + join(c.shape, c.dim, [](std::int64_t v) { return std::to_string(v); });
  h += " spacing=" + join(c.spacing, c.dim, format_double);
  h += " origin=" + join(c.origin, c.dim, format_double);
  h += " periodic=" + join(c.periodic, c.dim,
                           [](bool v) { return std::string(v ? "1" : "0"); });
  h += " kind=" + kind_name(kind);
  h += "\n";
  return h;
}

std::uint32_t payload_crc(const std::vector<double>& payload) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
              static_cast<uInt>(payload.size() * sizeof(double))));
}

void write_file(const std::string& path, const GridChart& chart, FieldKind kind,
                const std::vector<double>& payload,
                const std::vector<std::uint8_t>& mask) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("write_field: cannot open " + path);
  const std::string header = make_header(chart, kind);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(mask.data()),
            static_cast<std::streamsize>(mask.size()));
  const std::uint32_t crc = payload_crc(payload);
  std::uint8_t crc_bytes[4] = {
      static_cast<std::uint8_t>(crc & 0xffu),
      static_cast<std::uint8_t>((crc >> 8) & 0xffu),
      static_cast<std::uint8_t>((crc >> 16) & 0xffu),
      static_cast<std::uint8_t>((crc >> 24) & 0xffu)};
  out.write(reinterpret_cast<const char*>(crc_bytes), 4);
  if (!out) throw Error("write_field: short write to " + path);
}

int tri_count(int dim) { return dim * (dim + 1) / 2; }

struct ParsedFile {
  GridChart chart;
  FieldKind kind;
  std::vector<double> payload;
  std::vector<std::uint8_t> mask;
};

[[noreturn]] void format_error(const std::string& what, std::size_t offset) {
  throw FormatError(what + " (byte offset " + std::to_string(offset) + ")");
}

std::string field_value(const std::string& header, const std::string& key,
                        std::size_t header_len) {
  const std::string pat = " " + key + "=";
  const auto pos = header.find(pat);
  if (pos == std::string::npos) format_error("rmf header missing " + key, header_len);
  const auto start = pos + pat.size();
  auto end = header.find(' ', start);
  if (end == std::string::npos) end = header.size();
  return header.substr(start, end - start);
}

template <typename T, typename Parse>
void parse_list(const std::string& s, int dim, std::array<T, 4>& out, Parse parse,
                std::size_t header_len) {
  std::stringstream ss(s);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= dim) format_error("rmf header list too long: " + s, header_len);
    out[i++] = parse(item);
  }
  if (i != dim) format_error("rmf header list too short: " + s, header_len);
}

ParsedFile read_file(const std::string& path, FieldKind expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_field: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) format_error("rmf missing header line", 0);
  const std::size_t header_len = header.size() + 1;
  if (header.rfind("RMF1", 0) != 0)
    format_error("rmf bad magic or unknown version", 0);

  ParsedFile pf;
  const std::string kind = field_value(header, "kind", header_len);
  if (kind == "metric") pf.kind = FieldKind::Metric;
  else if (kind == "ell") pf.kind = FieldKind::Ell;
  else if (kind == "scalar") pf.kind = FieldKind::Scalar;
  else format_error("rmf unknown kind '" + kind + "'", header_len);
  if (pf.kind != expected)
    throw Error("read_field: file " + path + " holds kind '" + kind + "'");

  GridChart& c = pf.chart;
  c.dim = std::stoi(field_value(header, "dim", header_len));
  if (c.dim < 1 || c.dim > 4) format_error("rmf dim out of range", header_len);
  parse_list<std::int64_t>(field_value(header, "shape", header_len), c.dim, c.shape,
                           [](const std::string& s) { return std::stoll(s); },
                           header_len);
  parse_list<double>(field_value(header, "spacing", header_len), c.dim, c.spacing,
                     [](const std::string& s) { return std::stod(s); }, header_len);
  parse_list<double>(field_value(header, "origin", header_len), c.dim, c.origin,
                     [](const std::string& s) { return std::stod(s); }, header_len);
  parse_list<bool>(field_value(header, "periodic", header_len), c.dim, c.periodic,
                   [](const std::string& s) { return s != "0"; }, header_len);
  c.validate();

  const NodeIndex n = c.node_count();
  const std::size_t per_node =
      pf.kind == FieldKind::Scalar ? 1 : static_cast<std::size_t>(tri_count(c.dim));
  const std::size_t payload_doubles = per_node * static_cast<std::size_t>(n);

  pf.payload.resize(payload_doubles);
  in.read(reinterpret_cast<char*>(pf.payload.data()),
          static_cast<std::streamsize>(payload_doubles * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != payload_doubles * sizeof(double))
    format_error("rmf truncated payload",
                 header_len + static_cast<std::size_t>(std::max<std::streamsize>(in.gcount(), 0)));

  pf.mask.resize(static_cast<std::size_t>(n));
  in.read(reinterpret_cast<char*>(pf.mask.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != static_cast<std::size_t>(n))
    format_error("rmf truncated mask",
                 header_len + payload_doubles * sizeof(double) +
                     static_cast<std::size_t>(std::max<std::streamsize>(in.gcount(), 0)));

  std::uint8_t crc_bytes[4];
  in.read(reinterpret_cast<char*>(crc_bytes), 4);
  if (in.gcount() != 4)
    format_error("rmf truncated checksum",
                 header_len + payload_doubles * sizeof(double) +
                     static_cast<std::size_t>(n));
  const std::uint32_t stored = static_cast<std::uint32_t>(crc_bytes[0]) |
                               (static_cast<std::uint32_t>(crc_bytes[1]) << 8) |
                               (static_cast<std::uint32_t>(crc_bytes[2]) << 16) |
                               (static_cast<std::uint32_t>(crc_bytes[3]) << 24);
  if (stored != payload_crc(pf.payload))
    throw ChecksumMismatch("read_field: payload CRC32 mismatch in " + path);
  return pf;
}

std::vector<double> pack_matrices(const std::vector<SmallMat>& values, int dim) {
  std::vector<double> payload;
  payload.reserve(values.size() * static_cast<std::size_t>(tri_count(dim)));
  for (const auto& m : values)
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) payload.push_back(m(i, j));
  return payload;
}

std::vector<SmallMat> unpack_matrices(const std::vector<double>& payload, int dim,
                                      NodeIndex n) {
  std::vector<SmallMat> values(static_cast<std::size_t>(n));
  std::size_t k = 0;
  for (NodeIndex node = 0; node < n; ++node) {
    SmallMat m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        m(i, j) = payload[k];
        m(j, i) = payload[k];
        ++k;
      }
    values[static_cast<std::size_t>(node)] = m;
  }
  return values;
}

}  // namespace

FieldKind peek_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("peek_kind: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) format_error("rmf missing header line", 0);
  const std::string kind = field_value(header, "kind", header.size() + 1);
  if (kind == "metric") return FieldKind::Metric;
  if (kind == "ell") return FieldKind::Ell;
  if (kind == "scalar") return FieldKind::Scalar;
  format_error("rmf unknown kind '" + kind + "'", header.size() + 1);
}

void write_field(const MetricField& g, const std::string& path) {
  write_file(path, g.chart(), FieldKind::Metric,
             pack_matrices(g.values(), g.chart().dim), g.mask());
}

void write_field(const EllField& b, const std::string& path) {
  std::vector<std::uint8_t> mask(b.values.size(), 0);
  write_file(path, b.chart, FieldKind::Ell, pack_matrices(b.values, b.chart.dim),
             mask);
}

void write_field(const ScalarField& u, const std::string& path) {
  std::vector<std::uint8_t> mask = u.mask;
  if (mask.empty()) mask.assign(u.values.size(), 0);
  write_file(path, u.chart, FieldKind::Scalar, u.values, mask);
}

MetricField read_metric_field(const std::string& path, double sing_fraction_max) {
  ParsedFile pf = read_file(path, FieldKind::Metric);
  auto values = unpack_matrices(pf.payload, pf.chart.dim, pf.chart.node_count());
  return MetricField(pf.chart, std::move(values), std::move(pf.mask), path,
                     sing_fraction_max);
}

EllField read_ell_field(const std::string& path) {
  ParsedFile pf = read_file(path, FieldKind::Ell);
  EllField f;
  f.chart = pf.chart;
  f.values = unpack_matrices(pf.payload, pf.chart.dim, pf.chart.node_count());
  return f;
}

ScalarField read_scalar_field(const std::string& path) {
  ParsedFile pf = read_file(path, FieldKind::Scalar);
  ScalarField f;
  f.chart = pf.chart;
  f.values = std::move(pf.payload);
  f.mask = std::move(pf.mask);
  return f;
}

}  // namespace metspace
