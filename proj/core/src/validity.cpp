#include "sdcluster/validity.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "sdcluster/digest.hpp"
#include "sdcluster/parallel.hpp"
#include "sdcluster/sd_hierarchical.hpp"
#include "text_util.hpp"

namespace sdclust {

using detail::format_double;

Silhouette silhouette(const Matrix& dist, std::span<const std::size_t> labels, std::size_t k) {
  const std::size_t n = labels.size();
  if (dist.rows() != n || dist.cols() != n) throw DataError("distance matrix does not match labels");
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : labels) {
    if (l >= k) throw DataError("label out of range");
    ++sizes[l];
  }
  const auto nonempty = std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; });
  if (nonempty < 2) throw ConfigError("silhouette needs at least two non-empty clusters");

  Silhouette out;
  out.per_point.assign(n, 0.0);
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = labels[i];
    if (sizes[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x)
      if (x != i) sums[labels[x]] += dist(i, x);
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    const double denom = std::max(a, b);
    out.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : out.per_point) total += s;
  out.value = total / static_cast<double>(n);
  return out;
}

Silhouette sd_sc(const SDMatrix& matrix, const Clustering& clustering) {
  if (clustering.k < 2) throw ConfigError("SD-SC needs K >= 2");
  if (clustering.tickers.size() != matrix.size()) {
    throw DataError("clustering and matrix cover different assets");
  }
  std::vector<std::size_t> labels(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) labels[i] = clustering.label_of(matrix.tickers[i]);
  return silhouette(matrix.values, labels, clustering.k);
}

double dbi_from_components(std::span<const double> compactness, const Matrix& separation) {
  const std::size_t k = compactness.size();
  if (k < 2) throw ConfigError("SD-DBI needs K >= 2");
  if (separation.rows() != k || separation.cols() != k) throw DataError("separation matrix must be K x K");
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (c == i) continue;
      const double m = separation(i, c);
      if (!(m > 0.0)) {
        throw NumericalError("zero separation between cluster centers " + std::to_string(i) +
                             " and " + std::to_string(c));
      }
      worst = std::max(worst, (compactness[i] + compactness[c]) / m);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

DbiDetail sd_dbi(const ReturnPanel& panel, const Clustering& clustering, const BootstrapConfig& cfg,
                 int workers) {
  cfg.validate();
  if (clustering.k < 2) throw ConfigError("SD-DBI needs K >= 2");
  Clustering c = clustering;
  attach_centers(c, panel);
  const std::size_t n = c.tickers.size();
  const std::size_t k = c.k;

  std::vector<double> member(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto seed = derive_seed(cfg.seed, {fnv1a("dbi-member"), fnv1a(c.tickers[i]), c.labels[i]});
    const auto& series = panel.columns[panel.index_of(c.tickers[i])];
    member[i] = pair_test(series, c.centers[c.labels[i]], cfg.with_seed(seed)).coefficient;
  });

  DbiDetail out;
  out.compactness.assign(k, 0.0);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    out.compactness[c.labels[i]] += member[i];
    ++sizes[c.labels[i]];
  }
  for (std::size_t t = 0; t < k; ++t) out.compactness[t] /= static_cast<double>(sizes[t]);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
  out.separation = Matrix(k, k, 0.0);
  parallel_for(pairs.size(), workers, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    const auto seed = derive_seed(cfg.seed, {fnv1a("dbi-center"), a, b});
    const double v = pair_test(c.centers[a], c.centers[b], cfg.with_seed(seed)).coefficient;
    out.separation(a, b) = v;
    out.separation(b, a) = v;
  });
  out.value = dbi_from_components(out.compactness, out.separation);
  return out;
}

std::string_view to_string(Algorithm a) noexcept {
  return a == Algorithm::KMeans ? "kmeans" : "hierarchical";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "kmeans" || text == "k-means") return Algorithm::KMeans;
  if (text == "hier" || text == "hierarchical") return Algorithm::Hierarchical;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected kmeans or hierarchical)");
}

SelectKResult select_k(const SDMatrix& matrix, const ReturnPanel* panel, const BootstrapConfig& cfg,
                       const SelectKOptions& options) {
  const std::size_t n = matrix.size();
  if (options.k_min < 2 || options.k_min > options.k_max || options.k_max > n) {
    throw ConfigError("K range [" + std::to_string(options.k_min) + ", " +
                      std::to_string(options.k_max) + "] must satisfy 2 <= K_min <= K_max <= " +
                      std::to_string(n));
  }
  if (options.algorithm == Algorithm::KMeans && panel == nullptr) {
    throw ConfigError("K-means selection needs the return panel");
  }

  SelectKResult out;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
    Clustering c;
    if (options.algorithm == Algorithm::Hierarchical) {
      c = sd_hierarchical(matrix, k).clustering;
    } else {
      KMeansOptions ko = options.kmeans;
      ko.k = k;
      ko.workers = options.workers;
      c = sd_kmeans(panel->select(matrix.tickers), cfg, ko);
    }
    const auto sc = sd_sc(matrix, c);
    ValidityReport report;
    report.k = k;
    report.sd_sc = sc.value;
    report.tickers = matrix.tickers;
    report.per_point_silhouette = sc.per_point;
    if (panel != nullptr && options.compute_dbi) {
      report.sd_dbi = sd_dbi(*panel, c, cfg, options.workers).value;
    }
    if (sc.value > best) {
      best = sc.value;
      out.best_k = k;
    }
    out.reports.push_back(std::move(report));
    out.clusterings.push_back(std::move(c));
  }
  return out;
}

std::string validity_to_json(const ValidityReport& report) {
  nlohmann::ordered_json j;
  j["K"] = report.k;
  j["sd_sc"] = report.sd_sc;
  j["sd_dbi"] = report.sd_dbi ? nlohmann::ordered_json(*report.sd_dbi) : nlohmann::ordered_json(nullptr);
  auto per_point = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < report.tickers.size(); ++i) {
    per_point[report.tickers[i]] = report.per_point_silhouette.at(i);
  }
  j["per_point_silhouette"] = per_point;
  return j.dump(2) + "\n";
}

std::string select_k_csv(const SelectKResult& result) {
  std::string out = "K,sd_sc,sd_dbi\n";
  for (const auto& r : result.reports) {
    out += std::to_string(r.k) + "," + format_double(r.sd_sc) + "," +
           (r.sd_dbi ? format_double(*r.sd_dbi) : std::string()) + "\n";
  }
  return out;
}

}  // namespace sdclust
