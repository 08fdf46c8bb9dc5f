#include "sdcluster/clustering.hpp"

#include <json.hpp>

namespace sdclust {

using nlohmann::json;

std::vector<std::vector<std::size_t>> Clustering::members() const {
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t i = 0; i < labels.size(); ++i) out.at(labels[i]).push_back(i);
  return out;
}

std::vector<std::string> Clustering::member_tickers(std::size_t cluster) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == cluster) out.push_back(tickers[i]);
  return out;
}

std::size_t Clustering::label_of(std::string_view ticker) const {
  for (std::size_t i = 0; i < tickers.size(); ++i)
    if (tickers[i] == ticker) return labels[i];
  throw DataError("ticker " + std::string(ticker) + " is not in the clustering");
}

void Clustering::validate() const {
  if (labels.size() != tickers.size()) throw DataError("clustering labels do not match tickers");
  if (k == 0) throw DataError("clustering has no clusters");
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t l : labels) {
    if (l >= k) throw DataError("cluster label out of range");
    ++sizes[l];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (sizes[c] == 0) throw DataError("cluster " + std::to_string(c) + " is empty");
  if (!centers.empty() && centers.size() != k) throw DataError("center count does not match K");
}

void attach_centers(Clustering& clustering, const ReturnPanel& panel) {
  clustering.validate();
  std::vector<std::vector<std::size_t>> cols(clustering.k);
  for (std::size_t i = 0; i < clustering.tickers.size(); ++i) {
    cols[clustering.labels[i]].push_back(panel.index_of(clustering.tickers[i]));
  }
  clustering.centers.clear();
  for (const auto& c : cols) clustering.centers.push_back(mean_series(panel, c));
}

std::set<std::set<std::string>> partition_of(const Clustering& clustering) {
  std::vector<std::set<std::string>> groups(clustering.k);
  for (std::size_t i = 0; i < clustering.tickers.size(); ++i) {
    groups.at(clustering.labels[i]).insert(clustering.tickers[i]);
  }
  std::set<std::set<std::string>> out;
  for (auto& g : groups)
    if (!g.empty()) out.insert(std::move(g));
  return out;
}

std::string clustering_to_json(const Clustering& clustering) {
  json j;
  j["K"] = clustering.k;
  json assignments = json::object();
  for (std::size_t i = 0; i < clustering.tickers.size(); ++i) {
    assignments[clustering.tickers[i]] = clustering.labels[i];
  }
  j["assignments"] = assignments;
  j["tickers"] = clustering.tickers;
  j["iterations_used"] = clustering.iterations_used;
  j["converged"] = clustering.converged;
  if (!clustering.member_distance.empty()) {
    json dist = json::object();
    for (std::size_t i = 0; i < clustering.tickers.size(); ++i) {
      dist[clustering.tickers[i]] = clustering.member_distance[i];
    }
    j["member_distance"] = dist;
  }
  return j.dump(2) + "\n";
}

Clustering clustering_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("clustering JSON: ") + e.what());
  }
  try {
    Clustering c;
    c.k = j.at("K").get<std::size_t>();
    const auto& assignments = j.at("assignments");
    if (j.contains("tickers")) {
      c.tickers = j.at("tickers").get<std::vector<std::string>>();
    } else {
      for (const auto& [ticker, _] : assignments.items()) c.tickers.push_back(ticker);
    }
    for (const auto& t : c.tickers) c.labels.push_back(assignments.at(t).get<std::size_t>());
    c.iterations_used = j.value("iterations_used", std::size_t{0});
    c.converged = j.value("converged", true);
    if (j.contains("member_distance")) {
      for (const auto& t : c.tickers) c.member_distance.push_back(j["member_distance"].at(t).get<double>());
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("clustering JSON: ") + e.what());
  }
}

}  // namespace sdclust
