#include "sdcluster/coefficient_matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdcluster/digest.hpp"
#include "sdcluster/parallel.hpp"
#include "text_util.hpp"

namespace sdclust {

using detail::format_double;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == line.npos ? line.npos : pos - start)));
    if (pos == line.npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view s, const std::string& where) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw DataError(where + ": cannot parse '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void SDMatrix::validate() const {
  const std::size_t n = tickers.size();
  if (values.rows() != n || values.cols() != n) throw DataError("SD matrix is not square over its tickers");
  for (std::size_t i = 0; i < n; ++i) {
    if (values(i, i) != 0.0) throw DataError("SD matrix diagonal must be 0 (" + tickers[i] + ")");
    for (std::size_t k = 0; k < n; ++k) {
      const double v = values(i, k);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw DataError("SD matrix entry outside [0, 1]");
      if (std::abs(v - values(k, i)) > 1e-12) {
        throw DataError("SD matrix is not symmetric at (" + tickers[i] + ", " + tickers[k] + ")");
      }
    }
  }
}

SDMatrix SDMatrix::permuted(const std::vector<std::size_t>& order) const {
  SDMatrix out = *this;
  const std::size_t n = order.size();
  out.tickers.clear();
  out.values = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out.tickers.push_back(tickers.at(order[i]));
    for (std::size_t k = 0; k < n; ++k) out.values(i, k) = values(order[i], order[k]);
  }
  return out;
}

std::uint64_t pair_seed(std::uint64_t root, std::string_view a, std::string_view b, SdOrder j) {
  if (b < a) std::swap(a, b);
  return derive_seed(root, {fnv1a("pair"), fnv1a(a), fnv1a(b), static_cast<std::uint64_t>(j.value())});
}

std::string config_digest(const BootstrapConfig& cfg, const std::string& panel_digest) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(cfg.reps))
      .add(cfg.seed)
      .add(static_cast<std::uint64_t>(cfg.grid_points))
      .add(cfg.var_floor)
      .add(static_cast<std::uint64_t>(cfg.order.value()))
      .add(to_string(cfg.direction))
      .add(panel_digest);
  return h.hex();
}

SDMatrix build_matrix(const ReturnPanel& panel, const BootstrapConfig& cfg, int workers,
                      const std::function<void(std::size_t, std::size_t)>& progress) {
  cfg.validate();
  panel.validate();
  const std::size_t n = panel.assets();
  if (n < 2) throw DataError("SD matrix needs at least 2 assets");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) pairs.emplace_back(i, k);

  std::vector<double> coeff(pairs.size());
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(pairs.size(), workers, [&](std::size_t p) {
    auto [i, k] = pairs[p];
    // Canonical argument order by ticker keeps the result independent of column order.
    if (panel.tickers[k] < panel.tickers[i]) std::swap(i, k);
    const auto seed = pair_seed(cfg.seed, panel.tickers[i], panel.tickers[k], cfg.order);
    try {
      coeff[p] = pair_test(panel.columns[i], panel.columns[k], cfg.with_seed(seed)).coefficient;
    } catch (const NumericalError& e) {
      throw NumericalError("pair (" + panel.tickers[i] + ", " + panel.tickers[k] + "): " + e.what());
    }
    const std::size_t finished = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(finished, pairs.size());
    }
  });

  SDMatrix m;
  m.tickers = panel.tickers;
  m.order = cfg.order;
  m.direction = cfg.direction;
  m.values = Matrix(n, n, 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, k] = pairs[p];
    m.values(i, k) = coeff[p];
    m.values(k, i) = coeff[p];
  }
  m.seed = cfg.seed;
  m.reps = cfg.reps;
  m.grid_points = cfg.grid_points;
  m.panel_digest = panel_digest(panel);
  m.config_digest = config_digest(cfg, m.panel_digest);
  return m;
}

SDMatrix make_sd_matrix(std::vector<std::string> tickers, Matrix values, SdOrder j, Direction dir) {
  SDMatrix m;
  m.tickers = std::move(tickers);
  m.values = std::move(values);
  m.order = j;
  m.direction = dir;
  m.validate();
  return m;
}

std::string matrix_to_csv(const SDMatrix& m) {
  std::string out;
  out += "# order=" + std::to_string(m.order.value()) + "\n";
  out += "# direction=" + std::string(to_string(m.direction)) + "\n";
  out += "# seed=" + std::to_string(m.seed) + "\n";
  out += "# reps=" + std::to_string(m.reps) + "\n";
  out += "# grid_points=" + std::to_string(m.grid_points) + "\n";
  out += "# panel_digest=" + m.panel_digest + "\n";
  out += "# config_digest=" + m.config_digest + "\n";
  out += "ticker";
  for (const auto& t : m.tickers) out += "," + t;
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += m.tickers[i];
    for (std::size_t k = 0; k < m.size(); ++k) out += "," + format_double(m.values(i, k));
    out += "\n";
  }
  return out;
}

SDMatrix parse_matrix_csv(std::string_view text) {
  SDMatrix m;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_names;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    const auto line = trim(text.substr(start, end == text.npos ? text.npos : end - start));
    start = end == text.npos ? text.size() : end + 1;
    ++line_no;
    const std::string where = "matrix line " + std::to_string(line_no);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == body.npos) continue;
      const auto key = trim(body.substr(0, eq));
      const auto value = trim(body.substr(eq + 1));
      if (key == "order") m.order = SdOrder(parse_number<int>(value, where));
      else if (key == "direction") m.direction = parse_direction(value);
      else if (key == "seed") m.seed = parse_number<std::uint64_t>(value, where);
      else if (key == "reps") m.reps = parse_number<std::size_t>(value, where);
      else if (key == "grid_points") m.grid_points = parse_number<std::size_t>(value, where);
      else if (key == "panel_digest") m.panel_digest = std::string(value);
      else if (key == "config_digest") m.config_digest = std::string(value);
      continue;
    }
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.empty() || fields[0] != "ticker") throw DataError(where + ": expected header 'ticker,...'");
      for (std::size_t i = 1; i < fields.size(); ++i) m.tickers.emplace_back(fields[i]);
      have_header = true;
      continue;
    }
    if (fields.size() != m.tickers.size() + 1) throw DataError(where + ": wrong field count");
    row_names.emplace_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i) row.push_back(parse_number<double>(fields[i], where));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("matrix file has no header");
  if (rows.size() != m.tickers.size()) throw DataError("matrix is not square");
  m.values = Matrix(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (row_names[i] != m.tickers[i]) throw DataError("row label " + row_names[i] + " does not match header");
    for (std::size_t k = 0; k < rows.size(); ++k) m.values(i, k) = rows[i][k];
  }
  m.validate();
  return m;
}

void save_matrix(const SDMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << matrix_to_csv(m);
}

SDMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix_csv(ss.str());
}

bool matches_panel(const SDMatrix& m, const ReturnPanel& panel) {
  return m.panel_digest == panel_digest(panel);
}

}  // namespace sdclust
