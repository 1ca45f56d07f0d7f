#include "qgsaddle/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qgsaddle {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put(std::ostream& out, T value) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), bytes.size());
}

template <class T>
bool get(std::istream& in, T& value) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), bytes.size())) return false;
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  value = std::bit_cast<T>(bytes);
  return true;
}

std::uint32_t model_code(ModelTag m) {
  switch (m) {
    case ModelTag::sqg: return 0;
    case ModelTag::euler2d: return 1;
    case ModelTag::clm1d: return 2;
  }
  return 0;
}

struct Column {
  const char* name;
  const char* doc;
};

// Order defines the file layout.
constexpr std::array<Column, 16> kColumns{{
    {"t", "simulation time"},
    {"sup_grad", "grid max of |grad-perp theta| (max |omega| for clm1d)"},
    {"max_u", "grid max of |u|"},
    {"l2_theta", "L2 norm of the state over the periodic box"},
    {"energy", "kinetic energy 0.5 * integral |u|^2"},
    {"bkm_accum", "trapezoid integral of sup_grad from the first snapshot"},
    {"sup_grad_xi_outside", "grid max of |grad xi| outside the tracked-saddle disc"},
    {"xi_coverage", "fraction of grid points where xi is defined"},
    {"saddle_x1", "tracked saddle position, x1 (empty without an active track)"},
    {"saddle_x2", "tracked saddle position, x2"},
    {"beta", "branch slope beta"},
    {"delta", "branch slope delta"},
    {"gamma", "opening angle atan(beta) + atan(delta), radians"},
    {"quality", "relative rms residual of the local quadratic model"},
    {"frame_angle", "direction of the opening-sector bisector, radians in [0, pi)"},
    {"out_of_model", "1 when beta + delta < 0 or a slope exceeds the cap"},
}};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw std::runtime_error(path + ":" + std::to_string(line) + ": cannot parse '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string header_line() {
  std::string h;
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i) h += ',';
    h += kColumns[i].name;
  }
  return h;
}

}  // namespace

void write_checkpoint(const std::string& path, const State& state, double t, ModelTag model) {
  const bool is_1d = std::holds_alternative<Field1D>(state);
  if (is_1d != (model == ModelTag::clm1d)) throw DimensionError("checkpoint: state dimension does not match model");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open '" + path + "' for writing");
  out.write(kCheckpointMagic, 8);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, model_code(model));
  const int n = std::visit([](const auto& f) { return f.n(); }, state);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<double>(out, t);
  for (double v : std::visit([](const auto& f) { return f.values(); }, state)) put<double>(out, v);
  if (!out) throw CheckpointError("write failed for '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8)) throw CheckpointError("truncated checkpoint header in '" + path + "'");
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0) throw CheckpointError("bad magic in '" + path + "'");

  std::uint32_t version = 0, model = 0, n = 0;
  double t = 0.0;
  if (!get(in, version) || !get(in, model) || !get(in, n) || !get(in, t))
    throw CheckpointError("truncated checkpoint header in '" + path + "'");
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) + " not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  if (model > 2) throw CheckpointError("unknown model code " + std::to_string(model));
  if (n < 8 || n % 2 != 0 || n > 65536) throw CheckpointError("invalid grid size " + std::to_string(n));

  const ModelTag tag = model == 0 ? ModelTag::sqg : model == 1 ? ModelTag::euler2d : ModelTag::clm1d;
  const std::size_t count = tag == ModelTag::clm1d ? n : static_cast<std::size_t>(n) * n;
  std::vector<double> values(count);
  for (auto& v : values)
    if (!get(in, v)) throw CheckpointError("truncated payload in '" + path + "'");
  if (in.peek() != std::char_traits<char>::eof()) throw CheckpointError("trailing bytes after payload in '" + path + "'");

  const int points = static_cast<int>(n);
  if (tag == ModelTag::clm1d) return {Field1D(points, std::move(values)), t, tag};
  return {Field2D(Grid2D(points), std::move(values)), t, tag};
}

const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : kColumns) v.emplace_back(c.name);
    return v;
  }();
  return names;
}

void append_series_row(const std::string& path, const SeriesRow& row) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for appending");
  if (fresh) {
    out << "# qgsaddle diagnostic series; one row per snapshot\n";
    for (const auto& c : kColumns) out << "# " << c.name << ": " << c.doc << '\n';
    out << header_line() << '\n';
  }
  const auto& d = row.diag;
  std::string line;
  for (double v : {d.t, d.sup_grad, d.max_u, d.l2_theta, d.energy, d.bkm_accum, d.sup_grad_xi_outside, d.xi_coverage}) {
    if (!line.empty()) line += ',';
    line += format_double(v);
  }
  if (row.saddle) {
    const auto& s = *row.saddle;
    for (double v : {s.x1, s.x2, s.beta, s.delta, s.gamma, s.quality, s.frame_angle}) line += ',' + format_double(v);
    line += s.out_of_model ? ",1" : ",0";
  } else {
    line += ",,,,,,,,";
  }
  out << line << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<SeriesRow> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series '" + path + "'");
  std::vector<SeriesRow> rows;
  std::string line;
  int number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != header_line()) throw std::runtime_error(path + ":" + std::to_string(number) + ": unexpected header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != kColumns.size())
      throw std::runtime_error(path + ":" + std::to_string(number) + ": expected " + std::to_string(kColumns.size()) +
                               " columns, found " + std::to_string(cells.size()));
    SeriesRow r;
    auto num = [&](std::size_t i) { return parse_double(cells[i], path, number); };
    r.diag = {num(0), num(1), num(2), num(3), num(4), num(5), num(6), num(7)};
    if (!cells[8].empty()) {
      SaddleRecord s;
      s.t = r.diag.t;
      s.x1 = num(8);
      s.x2 = num(9);
      s.beta = num(10);
      s.delta = num(11);
      s.gamma = num(12);
      s.quality = num(13);
      s.frame_angle = num(14);
      s.out_of_model = cells[15] == "1";
      r.saddle = s;
    }
    rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error(path + ": no header line");
  return rows;
}

Series series_column(const std::vector<SeriesRow>& rows, const std::string& column) {
  const auto& names = series_columns();
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end() || column == "out_of_model") throw std::invalid_argument("unknown series column '" + column + "'");
  const auto index = static_cast<std::size_t>(it - names.begin());
  Series s;
  for (const auto& r : rows) {
    double v;
    const auto& d = r.diag;
    if (index < 8) {
      const double diag[] = {d.t, d.sup_grad, d.max_u, d.l2_theta, d.energy, d.bkm_accum, d.sup_grad_xi_outside,
                             d.xi_coverage};
      v = diag[index];
    } else {
      if (!r.saddle) continue;
      const auto& q = *r.saddle;
      const double sad[] = {q.x1, q.x2, q.beta, q.delta, q.gamma, q.quality, q.frame_angle};
      v = sad[index - 8];
    }
    s.t.push_back(d.t);
    s.g.push_back(v);
  }
  return s;
}

}  // namespace qgsaddle
