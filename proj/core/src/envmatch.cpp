#include "excir/envmatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "excir/error.hpp"
#include "excir/rng.hpp"
#include "parallel.hpp"

namespace excir::envmatch {
namespace {

using dimdist::DivergenceValue;
using dimdist::HistogramGrid;

void check_lengths(const OutputVector& y, const Dataset& d) {
  if (y.size() != d.n()) {
    throw DimensionError("output has " + std::to_string(y.size()) +
                         " values, dataset has " + std::to_string(d.n()) + " rows");
  }
}

// Feature-major sum over `rows`, divided by the row count.
double subset_distance(const Dataset& d, const OutputVector& y,
                       std::span<const std::size_t> rows) {
  double total = 0.0;
  for (const auto& f : d.features()) {
    for (std::size_t i : rows) {
      const double diff = y[i] - f[i];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(rows.size());
}

double all_rows_distance(const Dataset& d, const OutputVector& y) {
  double total = 0.0;
  for (const auto& f : d.features()) {
    for (std::size_t i = 0; i < d.n(); ++i) {
      const double diff = y[i] - f[i];
      total += diff * diff;
    }
  }
  return total / static_cast<double>(d.n());
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r, std::uint64_t cap) {
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // c * (n - r + i) / i stays integral at every step.
    c = c * (n - r + i) / i;
    if (c > cap) return cap + 1;
  }
  return c;
}

// Advances `idx` to the next r-combination of [0, n) in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t r = idx.size();
  std::size_t i = r;
  while (i > 0) {
    --i;
    if (idx[i] < n - r + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool exhaustive(std::size_t n, std::size_t n_prime) {
  return binomial_capped(n, n_prime, kExhaustiveBudget) <= kExhaustiveBudget;
}

// Shared state for one search over a fixed dataset.
struct Problem {
  const Dataset& data;
  const OutputVector& y;
  const RiskSearchConfig& cfg;
  double d2_full;
  std::vector<double> row_cost;  // local distance of every row

  Problem(const Dataset& d, const OutputVector& out, const RiskSearchConfig& c)
      : data(d), y(out), cfg(c), d2_full(all_rows_distance(d, out)) {
    row_cost.resize(d.n());
    std::vector<double> row(d.k());
    for (std::size_t i = 0; i < d.n(); ++i) {
      for (std::size_t j = 0; j < d.k(); ++j) row[j] = d.feature(j)[i];
      row_cost[i] = local_distance(y[i], row);
    }
  }

  double gap(std::span<const std::size_t> rows) const {
    return std::abs(d2_full - subset_distance(data, y, rows));
  }

  EnvGapResult result(std::vector<std::size_t> rows) const {
    std::sort(rows.begin(), rows.end());
    EnvGapResult r;
    r.d2_final = d2_full;
    r.d2_prime_final = subset_distance(data, y, rows);
    r.gap = std::abs(r.d2_final - r.d2_prime_final);
    r.selected_rows = std::move(rows);
    return r;
  }
};

// Greedy build: each pick is the remaining row whose cost is nearest the
// average the rest of the sample needs to land on the full-data mean.
std::vector<std::size_t> greedy_subset(const Problem& pb, std::size_t restart) {
  const std::size_t n = pb.data.n();
  const std::size_t np = pb.cfg.n_prime;
  const double target = pb.d2_full * static_cast<double>(np);
  std::set<std::pair<double, std::size_t>> pool;
  for (std::size_t i = 0; i < n; ++i) pool.emplace(pb.row_cost[i], i);

  CounterRng rng(pb.cfg.seed, restart);
  std::vector<std::size_t> chosen;
  chosen.reserve(np);
  const std::size_t first = static_cast<std::size_t>(rng.below(n));
  pool.erase({pb.row_cost[first], first});
  chosen.push_back(first);
  double sum = pb.row_cost[first];
  for (std::size_t t = 1; t < np; ++t) {
    const double need = (target - sum) / static_cast<double>(np - t);
    auto it = pool.lower_bound({need, 0});
    if (it == pool.end()) {
      it = std::prev(it);
    } else if (it != pool.begin()) {
      const auto before = std::prev(it);
      if (need - before->first < it->first - need) it = before;
    }
    sum += it->first;
    chosen.push_back(it->second);
    pool.erase(it);
  }
  return chosen;
}

// Best single swap until none shrinks |target - sum|.
void swap_descent(const Problem& pb, std::vector<std::size_t>& members) {
  const std::size_t n = pb.data.n();
  const double target = pb.d2_full * static_cast<double>(members.size());
  std::vector<char> in(n, 0);
  for (std::size_t i : members) in[i] = 1;
  std::vector<std::pair<double, std::size_t>> outside;
  outside.reserve(n - members.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!in[i]) outside.emplace_back(pb.row_cost[i], i);
  }
  std::sort(outside.begin(), outside.end());
  if (outside.empty()) return;

  double sum = 0.0;
  for (std::size_t i : members) sum += pb.row_cost[i];
  for (;;) {
    const double deficit = target - sum;
    double best = std::abs(deficit);
    std::size_t best_member = members.size();
    std::size_t best_out = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
      const double ci = pb.row_cost[members[a]];
      const double want = ci + deficit;
      auto it = std::lower_bound(outside.begin(), outside.end(),
                                 std::make_pair(want, std::size_t{0}));
      for (auto cand : {it, it == outside.begin() ? outside.end() : std::prev(it)}) {
        if (cand == outside.end()) continue;
        const double residual = std::abs(deficit - (cand->first - ci));
        if (residual < best) {
          best = residual;
          best_member = a;
          best_out = static_cast<std::size_t>(cand - outside.begin());
        }
      }
    }
    if (best_member == members.size()) return;
    const std::size_t leaving = members[best_member];
    const auto entering = outside[best_out];
    sum += entering.first - pb.row_cost[leaving];
    members[best_member] = entering.second;
    outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(best_out));
    const std::pair<double, std::size_t> back{pb.row_cost[leaving], leaving};
    outside.insert(std::lower_bound(outside.begin(), outside.end(), back), back);
  }
}

std::vector<std::vector<std::size_t>> gap_candidates(const Problem& pb) {
  std::vector<std::vector<std::size_t>> out(pb.cfg.candidates);
  detail::parallel_for(out.size(), pb.cfg.threads, [&](std::size_t r) {
    auto rows = greedy_subset(pb, r);
    swap_descent(pb, rows);
    std::sort(rows.begin(), rows.end());
    out[r] = std::move(rows);
  });
  return out;
}

// Output histogram on the grid covering the full outputs.
struct OutputBins {
  HistogramGrid grid;
  std::vector<std::size_t> cell;  // cell of every row
  std::vector<double> full_masses;
};

HistogramGrid output_grid(std::span<const double> a, std::span<const double> b,
                          std::size_t bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto values : {a, b}) {
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (lo == hi && bins > 1) {
    throw InputError("output support has zero width; use a single bin or vary the output");
  }
  const double pad = lo < hi ? 0.01 * (hi - lo) : 0.5;
  return HistogramGrid(bins, {lo - pad}, {hi + pad});
}

std::vector<double> masses_from_counts(std::span<const std::size_t> counts,
                                       std::size_t total) {
  std::vector<double> m(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    m[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  return m;
}

DivergenceValue divergence_from_counts(const HistogramGrid& layout,
                                       std::span<const std::size_t> sample_counts,
                                       std::size_t sample_size,
                                       std::span<const double> full_masses,
                                       const RiskSearchConfig& cfg) {
  HistogramGrid p = layout;
  p.set_masses(masses_from_counts(sample_counts, sample_size));
  HistogramGrid q = layout;
  q.set_masses({full_masses.begin(), full_masses.end()});
  return dimdist::f_divergence(p, q, cfg.divergence, cfg.epsilon);
}

std::vector<std::size_t> cell_counts(const HistogramGrid& grid,
                                     std::span<const double> values) {
  std::vector<std::size_t> counts(grid.cells(), 0);
  for (double v : values) ++counts[grid.cell_of(&v)];
  return counts;
}

OutputBins bin_outputs(const OutputVector& y, const RiskSearchConfig& cfg) {
  OutputBins ob{output_grid(y.values(), {}, cfg.bins), {}, {}};
  ob.cell.resize(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ob.cell[i] = ob.grid.cell_of(&y.values()[i]);
  ob.full_masses = masses_from_counts(cell_counts(ob.grid, y.values()), y.size());
  return ob;
}

double objective_of(const DivergenceValue& loss, double gap, double lambda) {
  if (loss.infinite) return std::numeric_limits<double>::infinity();
  return loss.bits + lambda * gap;
}

struct Scored {
  std::vector<std::size_t> rows;
  DivergenceValue loss;
  double gap;
  double objective;
};

Scored score(const Problem& pb, const OutputBins& ob, std::vector<std::size_t> rows) {
  std::vector<std::size_t> counts(ob.grid.cells(), 0);
  for (std::size_t i : rows) ++counts[ob.cell[i]];
  Scored s;
  s.loss = divergence_from_counts(ob.grid, counts, rows.size(), ob.full_masses, pb.cfg);
  s.gap = pb.gap(rows);
  s.objective = objective_of(s.loss, s.gap, pb.cfg.lambda);
  s.rows = std::move(rows);
  return s;
}

// Random single-swap proposals, kept when loss + lambda * gap drops.
std::vector<std::size_t> refine(const Problem& pb, const OutputBins& ob,
                                std::vector<std::size_t> members,
                                std::size_t restart) {
  const std::size_t n = pb.data.n();
  const std::size_t np = members.size();
  if (np == n || pb.cfg.refine_iters == 0) return members;
  std::vector<char> in(n, 0);
  for (std::size_t i : members) in[i] = 1;
  std::vector<std::size_t> outside;
  outside.reserve(n - np);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in[i]) outside.push_back(i);
  }
  std::vector<std::size_t> counts(ob.grid.cells(), 0);
  double sum = 0.0;
  for (std::size_t i : members) {
    ++counts[ob.cell[i]];
    sum += pb.row_cost[i];
  }
  const double inv = 1.0 / static_cast<double>(np);
  auto evaluate = [&](double s) {
    const auto loss =
        divergence_from_counts(ob.grid, counts, np, ob.full_masses, pb.cfg);
    return objective_of(loss, std::abs(pb.d2_full - s * inv), pb.cfg.lambda);
  };
  double current = evaluate(sum);
  // Streams above 2^32 keep refinement draws apart from the greedy starts.
  CounterRng rng(pb.cfg.seed, (std::uint64_t{1} << 32) + restart);
  for (std::size_t t = 0; t < pb.cfg.refine_iters; ++t) {
    const auto a = static_cast<std::size_t>(rng.below(np));
    const auto b = static_cast<std::size_t>(rng.below(outside.size()));
    const std::size_t leaving = members[a];
    const std::size_t entering = outside[b];
    --counts[ob.cell[leaving]];
    ++counts[ob.cell[entering]];
    const double s = sum - pb.row_cost[leaving] + pb.row_cost[entering];
    const double value = evaluate(s);
    if (value < current) {
      current = value;
      sum = s;
      members[a] = entering;
      outside[b] = leaving;
    } else {
      ++counts[ob.cell[leaving]];
      --counts[ob.cell[entering]];
    }
  }
  std::sort(members.begin(), members.end());
  return members;
}

}  // namespace

double local_distance(double y, std::span<const double> row) {
  double total = 0.0;
  for (double f : row) {
    const double diff = y - f;
    total += diff * diff;
  }
  return total;
}

double final_distance(const OutputVector& output, const Dataset& dataset) {
  check_lengths(output, dataset);
  return all_rows_distance(dataset, output);
}

EnvGapResult environment_gap(const Dataset& full, const OutputVector& y_full,
                             const Dataset& sample, const OutputVector& y_sample) {
  if (full.k() != sample.k()) {
    throw DimensionError("full data has " + std::to_string(full.k()) +
                         " features, sample has " + std::to_string(sample.k()));
  }
  EnvGapResult r;
  r.d2_final = final_distance(y_full, full);
  r.d2_prime_final = final_distance(y_sample, sample);
  r.gap = std::abs(r.d2_final - r.d2_prime_final);
  return r;
}

EnvGapResult environment_gap(const Dataset& full, const OutputVector& y_full,
                             std::span<const std::size_t> rows) {
  check_lengths(y_full, full);
  if (rows.empty()) throw InputError("sample has no rows");
  std::vector<std::size_t> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("sample rows must be distinct");
  }
  if (sorted.back() >= full.n()) {
    throw InputError("sample row " + std::to_string(sorted.back()) + " out of range");
  }
  EnvGapResult r;
  r.d2_final = all_rows_distance(full, y_full);
  r.d2_prime_final = subset_distance(full, y_full, sorted);
  r.gap = std::abs(r.d2_final - r.d2_prime_final);
  r.selected_rows = std::move(sorted);
  return r;
}

void RiskSearchConfig::validate(std::size_t n) const {
  if (n_prime < 1 || n_prime > n) {
    throw InputError("n' must lie in [1, " + std::to_string(n) + "], got " +
                     std::to_string(n_prime));
  }
  if (candidates < 1) throw InputError("candidates must be at least 1");
  if (bins < 1) throw InputError("bins must be at least 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("lambda must be finite and non-negative");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InputError("epsilon must be finite and non-negative");
  }
}

EnvGapResult select_lightweight_sample(const Dataset& dataset,
                                       const OutputVector& output,
                                       const RiskSearchConfig& cfg) {
  check_lengths(output, dataset);
  cfg.validate(dataset.n());
  const Problem pb(dataset, output, cfg);
  const std::size_t n = dataset.n();

  if (exhaustive(n, cfg.n_prime)) {
    std::vector<std::size_t> idx(cfg.n_prime);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::size_t> best = idx;
    double best_gap = pb.gap(idx);
    while (next_combination(idx, n)) {
      const double g = pb.gap(idx);
      if (g < best_gap) {
        best_gap = g;
        best = idx;
      }
    }
    return pb.result(std::move(best));
  }

  const auto cands = gap_candidates(pb);
  std::size_t best = 0;
  double best_gap = pb.gap(cands[0]);
  for (std::size_t r = 1; r < cands.size(); ++r) {
    const double g = pb.gap(cands[r]);
    if (g < best_gap) {
      best_gap = g;
      best = r;
    }
  }
  return pb.result(cands[best]);
}

DivergenceValue output_distribution_loss(const OutputVector& y_full,
                                         const OutputVector& y_sample,
                                         const RiskSearchConfig& cfg) {
  if (y_full.size() == 0 || y_sample.size() == 0) {
    throw InputError("output distributions need at least one value each");
  }
  if (cfg.bins < 1) throw InputError("bins must be at least 1");
  const auto grid = output_grid(y_full.values(), y_sample.values(), cfg.bins);
  const auto full = masses_from_counts(cell_counts(grid, y_full.values()), y_full.size());
  return divergence_from_counts(grid, cell_counts(grid, y_sample.values()),
                                y_sample.size(), full, cfg);
}

RiskResult risk_minimize(const Dataset& dataset, const OutputVector& output,
                         const RiskSearchConfig& cfg) {
  check_lengths(output, dataset);
  cfg.validate(dataset.n());
  const Problem pb(dataset, output, cfg);
  const OutputBins ob = bin_outputs(output, cfg);
  const std::size_t n = dataset.n();

  std::optional<Scored> best;
  std::size_t evaluated = 0;
  auto consider = [&](std::vector<std::size_t> rows) {
    ++evaluated;
    Scored s = score(pb, ob, std::move(rows));
    if (!best || s.objective < best->objective) best = std::move(s);
  };

  if (exhaustive(n, cfg.n_prime)) {
    std::vector<std::size_t> idx(cfg.n_prime);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    do {
      consider(idx);
    } while (next_combination(idx, n));
  } else {
    auto cands = gap_candidates(pb);
    std::vector<std::vector<std::size_t>> refined(cands.size());
    detail::parallel_for(cands.size(), cfg.threads, [&](std::size_t r) {
      refined[r] = refine(pb, ob, cands[r], r);
    });
    for (auto& c : cands) consider(std::move(c));
    for (auto& c : refined) consider(std::move(c));
  }

  RiskResult out;
  out.loss = best->loss;
  out.objective = best->objective;
  out.sample = pb.result(std::move(best->rows));
  out.candidates_evaluated = evaluated;
  return out;
}

RiskResult risk_minimize(const Dataset& dataset, const ModelHandle& model,
                         const RiskSearchConfig& cfg) {
  return risk_minimize(dataset, evaluate_model(model, dataset), cfg);
}

}  // namespace excir::envmatch
