#include "sdcluster/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "sdcluster/digest.hpp"
#include "text_util.hpp"

namespace sdclust {

using detail::format_double;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    lines.push_back(text.substr(start, stop - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw DataError(where + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Date parse_date(std::string_view text) {
  text = trim(text);
  auto digits = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') throw DataError("bad date '" + std::string(text) + "'");
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw DataError("bad date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const Date d{std::chrono::year{digits(0, 4)}, std::chrono::month{static_cast<unsigned>(digits(5, 2))},
               std::chrono::day{static_cast<unsigned>(digits(8, 2))}};
  if (!d.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return d;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

IsoWeek iso_week(Date d) {
  using namespace std::chrono;
  const sys_days day{d};
  const weekday wd{day};
  const unsigned iso_wd = wd.iso_encoding();  // Mon=1..Sun=7
  const sys_days thursday = day - days{iso_wd - 1} + days{3};
  const year_month_day thu{thursday};
  const sys_days jan1{thu.year() / January / 1};
  const auto ordinal = (thursday - jan1).count();
  return IsoWeek{static_cast<int>(thu.year()), static_cast<unsigned>(ordinal / 7 + 1)};
}

std::size_t PricePanel::missing_count() const noexcept {
  std::size_t n = 0;
  for (const auto& row : prices)
    for (const auto& cell : row) n += cell.has_value() ? 0 : 1;
  return n;
}

void PricePanel::validate() const {
  if (prices.size() != dates.size()) throw DataError("price rows do not match dates");
  for (std::size_t r = 1; r < dates.size(); ++r) {
    if (!(dates[r - 1] < dates[r])) throw DataError("dates must be strictly increasing");
  }
  std::unordered_set<std::string> seen;
  for (const auto& t : tickers) {
    if (!seen.insert(t).second) throw DataError("duplicate ticker " + t);
  }
  for (std::size_t r = 0; r < prices.size(); ++r) {
    if (prices[r].size() != tickers.size()) throw DataError("ragged price row");
    for (const auto& cell : prices[r]) {
      if (cell && !(*cell > 0.0 && std::isfinite(*cell))) {
        throw DataError("non-positive price on " + format_date(dates[r]));
      }
    }
  }
}

std::size_t ReturnPanel::index_of(std::string_view ticker) const {
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (tickers[i] == ticker) return i;
  throw DataError("unknown ticker " + std::string(ticker));
}

ReturnPanel ReturnPanel::select(const std::vector<std::string>& subset) const {
  ReturnPanel out;
  out.periods = periods;
  for (const auto& t : subset) {
    out.tickers.push_back(t);
    out.columns.push_back(columns[index_of(t)]);
  }
  return out;
}

void ReturnPanel::validate() const {
  if (columns.size() != tickers.size()) throw DataError("return columns do not match tickers");
  std::unordered_set<std::string> seen;
  for (const auto& t : tickers)
    if (!seen.insert(t).second) throw DataError("duplicate ticker " + t);
  for (const auto& c : columns) {
    if (c.size() != periods.size()) throw DataError("unbalanced return panel");
    for (double v : c)
      if (!std::isfinite(v)) throw DataError("non-finite return in panel");
  }
}

PricePanel parse_prices_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError("row 1: empty price file");
  const auto header = split_fields(lines[0]);
  if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" || header[2] != "close") {
    throw DataError("row 1: expected header 'date,ticker,close'");
  }
  if (lines.size() < 2) throw DataError("row 2: no price rows");

  std::map<Date, std::map<std::string, double>> by_date;
  std::vector<std::string> tickers;
  std::unordered_set<std::string> known;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "row " + std::to_string(i + 1);
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 3) throw DataError(where + ": expected 3 fields");
    const Date date = [&] {
      try {
        return parse_date(fields[0]);
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    }();
    if (fields[1].empty()) throw DataError(where + ": empty ticker");
    std::string ticker(fields[1]);
    const double close = parse_double(fields[2], where);
    if (!(close > 0.0) || !std::isfinite(close)) {
      throw DataError(where + ": non-positive price " + std::string(fields[2]));
    }
    if (!by_date[date].emplace(ticker, close).second) {
      throw DataError(where + ": duplicate key (" + std::string(fields[0]) + ", " + ticker + ")");
    }
    if (known.insert(ticker).second) tickers.push_back(ticker);
  }

  PricePanel panel;
  panel.tickers = tickers;
  for (const auto& [date, row] : by_date) {
    panel.dates.push_back(date);
    std::vector<std::optional<double>> cells(tickers.size());
    for (std::size_t c = 0; c < tickers.size(); ++c) {
      if (auto it = row.find(tickers[c]); it != row.end()) cells[c] = it->second;
    }
    panel.prices.push_back(std::move(cells));
  }
  return panel;
}

PricePanel load_prices(const std::filesystem::path& path) { return parse_prices_csv(read_file(path)); }

PricePanel to_weekly(const PricePanel& panel) {
  PricePanel out;
  out.tickers = panel.tickers;
  std::optional<IsoWeek> current;
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    const IsoWeek w = iso_week(panel.dates[r]);
    if (!current || w != *current) {
      current = w;
      out.dates.push_back(panel.dates[r]);
      out.prices.emplace_back(panel.cols());
    }
    out.dates.back() = panel.dates[r];
    auto& row = out.prices.back();
    for (std::size_t c = 0; c < panel.cols(); ++c) {
      if (panel.prices[r][c]) row[c] = panel.prices[r][c];
    }
  }
  return out;
}

ReturnPanel log_returns(const PricePanel& panel, double min_coverage, FilterReport* report) {
  if (panel.rows() < 2) throw DataError("need at least 2 price rows for returns");
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) throw ConfigError("min_coverage must be in [0, 1]");

  FilterReport local;
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < panel.cols(); ++c) {
    std::size_t present = 0;
    for (std::size_t r = 0; r < panel.rows(); ++r) present += panel.prices[r][c].has_value();
    const double coverage = static_cast<double>(present) / static_cast<double>(panel.rows());
    if (coverage < min_coverage || present == 0) {
      local.dropped_tickers.push_back(panel.tickers[c]);
      local.dropped_coverage.push_back(coverage);
    } else {
      kept.push_back(c);
    }
  }
  if (kept.empty()) throw DataError("every asset was dropped by the coverage filter");

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    const bool complete = std::all_of(kept.begin(), kept.end(),
                                      [&](std::size_t c) { return panel.prices[r][c].has_value(); });
    if (complete) rows.push_back(r);
  }
  local.dropped_rows = panel.rows() - rows.size();
  if (rows.size() < 2) throw DataError("fewer than 2 complete price rows after filtering");

  ReturnPanel out;
  for (std::size_t c : kept) out.tickers.push_back(panel.tickers[c]);
  out.columns.resize(kept.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.periods.push_back(panel.dates[rows[i]]);
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const double prev = *panel.prices[rows[i - 1]][kept[k]];
      const double cur = *panel.prices[rows[i]][kept[k]];
      out.columns[k].push_back(std::log(cur / prev));
    }
  }
  if (report) *report = std::move(local);
  return out;
}

std::string returns_to_csv(const ReturnPanel& panel) {
  std::string out = "period";
  for (const auto& t : panel.tickers) out += "," + t;
  out += "\n";
  for (std::size_t r = 0; r < panel.periods.size(); ++r) {
    out += format_date(panel.periods[r]);
    for (const auto& col : panel.columns) out += "," + format_double(col[r]);
    out += "\n";
  }
  return out;
}

ReturnPanel parse_returns_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw DataError("row 1: empty returns file");
  const auto header = split_fields(lines[0]);
  if (header.empty() || header[0] != "period") throw DataError("row 1: expected header 'period,...'");
  ReturnPanel panel;
  for (std::size_t i = 1; i < header.size(); ++i) panel.tickers.emplace_back(header[i]);
  panel.columns.resize(panel.tickers.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string where = "row " + std::to_string(i + 1);
    const auto fields = split_fields(lines[i]);
    if (fields.size() != header.size()) throw DataError(where + ": wrong field count");
    panel.periods.push_back(parse_date(fields[0]));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      panel.columns[c - 1].push_back(parse_double(fields[c], where));
    }
  }
  panel.validate();
  return panel;
}

void save_returns(const ReturnPanel& panel, const std::filesystem::path& path) {
  write_file(path, returns_to_csv(panel));
}

ReturnPanel load_returns(const std::filesystem::path& path) { return parse_returns_csv(read_file(path)); }

std::string panel_digest(const ReturnPanel& panel) {
  Fnv1a h;
  for (const auto& t : panel.tickers) h.add(t).add(std::string_view("\x1f", 1));
  for (const auto& d : panel.periods) h.add(format_date(d));
  for (const auto& c : panel.columns) h.add(std::span<const double>(c));
  return h.hex();
}

Series mean_series(const ReturnPanel& panel, const std::vector<std::size_t>& members) {
  if (members.empty()) throw DataError("mean of an empty set of series");
  Series out(panel.periods.size(), 0.0);
  for (std::size_t m : members) {
    const auto& col = panel.columns.at(m);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += col[t];
  }
  const double n = static_cast<double>(members.size());
  for (double& v : out) v /= n;
  return out;
}

}  // namespace sdclust
