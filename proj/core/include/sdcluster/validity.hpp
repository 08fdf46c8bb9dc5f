#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdcluster/bootstrap.hpp"
#include "sdcluster/clustering.hpp"
#include "sdcluster/coefficient_matrix.hpp"
#include "sdcluster/sd_kmeans.hpp"

namespace sdclust {

struct Silhouette {
  double value = 0.0;
  std::vector<double> per_point;
};

/// Silhouette over an arbitrary distance matrix. Points in singleton clusters
/// score 0, as do points with a == b == 0. Requires at least two non-empty clusters.
Silhouette silhouette(const Matrix& dist, std::span<const std::size_t> labels, std::size_t k);

/// SD-SC: silhouette over SD-coefficient distances. Clustering tickers are
/// matched to matrix tickers by name.
Silhouette sd_sc(const SDMatrix& matrix, const Clustering& clustering);

/// DBI from per-cluster compactness S_i and center separations M_ik:
///   R_ik = (S_i + S_k) / M_ik, DBI = mean_i max_{k != i} R_ik.
/// Throws NumericalError when some M_ik is 0.
double dbi_from_components(std::span<const double> compactness, const Matrix& separation);

struct DbiDetail {
  std::vector<double> compactness;
  Matrix separation;
  double value = 0.0;
};

/// SD-DBI with fresh pair tests: stock vs own center for compactness,
/// center vs center for separation. Centers are recomputed from the panel.
DbiDetail sd_dbi(const ReturnPanel& panel, const Clustering& clustering,
                 const BootstrapConfig& cfg, int workers = 1);

struct ValidityReport {
  std::size_t k = 0;
  double sd_sc = 0.0;
  std::optional<double> sd_dbi;
  std::vector<std::string> tickers;
  std::vector<double> per_point_silhouette;
};

enum class Algorithm { KMeans, Hierarchical };
std::string_view to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(std::string_view text);

struct SelectKOptions {
  std::size_t k_min = 2;
  std::size_t k_max = 6;
  Algorithm algorithm = Algorithm::Hierarchical;
  KMeansOptions kmeans;  // k is overwritten per candidate
  bool compute_dbi = true;
  int workers = 1;
};

struct SelectKResult {
  std::size_t best_k = 0;
  std::vector<ValidityReport> reports;
  std::vector<Clustering> clusterings;  // parallel to reports
};

/// Runs the algorithm for each K in range, scores it by SD-SC, and returns
/// the maximiser (smallest K on ties). `panel` is required for K-means and
/// for SD-DBI; without it SD-DBI is omitted.
SelectKResult select_k(const SDMatrix& matrix, const ReturnPanel* panel,
                       const BootstrapConfig& cfg, const SelectKOptions& options);

std::string validity_to_json(const ValidityReport& report);
/// `K,sd_sc,sd_dbi` rows.
std::string select_k_csv(const SelectKResult& result);

}  // namespace sdclust
