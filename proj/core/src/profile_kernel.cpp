#include "profile_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdclust::detail {

PairSupport make_support(SeriesView f, SeriesView g) {
  std::vector<std::pair<double, int>> tagged;
  tagged.reserve(f.size() + g.size());
  for (double v : f) tagged.emplace_back(v, 0);
  for (double v : g) tagged.emplace_back(v, 1);
  std::sort(tagged.begin(), tagged.end());

  PairSupport s;
  s.nf = static_cast<std::int64_t>(f.size());
  s.ng = static_cast<std::int64_t>(g.size());
  for (const auto& [v, which] : tagged) {
    if (s.values.empty() || s.values.back() != v) {
      s.values.push_back(v);
      s.f_counts.push_back(0);
      s.g_counts.push_back(0);
    }
    (which == 0 ? s.f_counts : s.g_counts).back() += 1;
  }
  return s;
}

namespace {

struct Accumulator {
  ProfileSummary summary{0.0, -std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity(), 0};
  std::vector<std::optional<double>>* out;

  void push(std::optional<double> t) {
    if (out) out->push_back(t);
    if (!t) return;
    ++summary.defined;
    summary.max = std::max(summary.max, *t);
    summary.min = std::min(summary.min, *t);
    summary.max_abs = std::max(summary.max_abs, std::abs(*t));
  }

  ProfileSummary finish() {
    if (summary.defined == 0) {
      summary.max = 0.0;
      summary.min = 0.0;
    }
    return summary;
  }
};

// Integer form of the first-order statistic. a and b count the mass on the
// dominated side of x; the numerator and each variance are exact functions of
// the counts, so replacing a by nf - a (the mirrored direction) negates T exactly.
std::optional<double> first_order_t(std::int64_t a, std::int64_t b, std::int64_t nf, std::int64_t ng,
                                    double var_floor) {
  const double nf3 = static_cast<double>(nf) * static_cast<double>(nf) * static_cast<double>(nf);
  const double ng3 = static_cast<double>(ng) * static_cast<double>(ng) * static_cast<double>(ng);
  const double var = static_cast<double>(a * (nf - a)) / nf3 + static_cast<double>(b * (ng - b)) / ng3;
  if (!(var > var_floor)) return std::nullopt;
  const double diff = static_cast<double>(a * ng - b * nf) / (static_cast<double>(nf) * static_cast<double>(ng));
  return diff / std::sqrt(var);
}

}  // namespace

ProfileSummary evaluate_profile(std::span<const double> values, std::span<const std::int64_t> f_counts,
                                std::span<const std::int64_t> g_counts, std::int64_t nf,
                                std::int64_t ng, std::span<const double> grid, SdOrder j,
                                Direction dir, double var_floor,
                                std::vector<std::optional<double>>* t_out) {
  Accumulator acc{{}, t_out};
  acc.summary = ProfileSummary{0.0, -std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity(), 0};
  if (t_out) {
    t_out->clear();
    t_out->reserve(grid.size());
  }
  const std::size_t m = values.size();

  if (j.value() == 1) {
    // Sweep: cf/cg hold counts of values strictly below (desc) or at-or-below (asc) x.
    std::size_t p = 0;
    std::int64_t cf = 0;
    std::int64_t cg = 0;
    for (double x : grid) {
      if (dir == Direction::Ascending) {
        while (p < m && values[p] <= x) {
          cf += f_counts[p];
          cg += g_counts[p];
          ++p;
        }
        acc.push(first_order_t(cf, cg, nf, ng, var_floor));
      } else {
        while (p < m && values[p] < x) {
          cf += f_counts[p];
          cg += g_counts[p];
          ++p;
        }
        acc.push(first_order_t(nf - cf, ng - cg, nf, ng, var_floor));
      }
    }
    return acc.finish();
  }

  const int power = j.value() - 1;
  const double fact = j.value() == 3 ? 2.0 : 1.0;
  const double dnf = static_cast<double>(nf);
  const double dng = static_cast<double>(ng);

  for (double x : grid) {
    double s1f = 0.0, s2f = 0.0, s1g = 0.0, s2g = 0.0;
    auto accumulate = [&](std::size_t k, double d) {
      const double pw = power == 1 ? d : d * d;
      const double pw2 = pw * pw;
      if (f_counts[k]) {
        const double c = static_cast<double>(f_counts[k]);
        s1f += c * pw;
        s2f += c * pw2;
      }
      if (g_counts[k]) {
        const double c = static_cast<double>(g_counts[k]);
        s1g += c * pw;
        s2g += c * pw2;
      }
    };
    if (dir == Direction::Ascending) {
      for (std::size_t k = 0; k < m && values[k] <= x; ++k) accumulate(k, x - values[k]);
    } else {
      for (std::size_t k = m; k-- > 0 && values[k] >= x;) accumulate(k, values[k] - x);
    }
    const double hf = s1f / (dnf * fact);
    const double hg = s1g / (dng * fact);
    const double vf = std::max(0.0, (s2f / (dnf * fact * fact) - hf * hf) / dnf);
    const double vg = std::max(0.0, (s2g / (dng * fact * fact) - hg * hg) / dng);
    const double var = vf + vg;
    if (var > var_floor) {
      acc.push((hf - hg) / std::sqrt(var));
    } else {
      acc.push(std::nullopt);
    }
  }
  return acc.finish();
}

}  // namespace sdclust::detail
