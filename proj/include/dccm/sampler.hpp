// Metropolis-Hastings sampling of networks whose mixing/persistence
// properties follow a target Gaussian product distribution over congruence
// classes (graphs sharing identical property values).
//
// The Hastings correction uses exact single-toggle move counts between
// classes. For a dyad with endpoint-group pair (l, k), with E = current
// edge count of that pair, Ep = previous-slice count, P = persisting count,
// and T = all possible (l, k) dyads, the four cases by membership in
// (current, previous) give the forward count:
//
//   in both        -> P
//   current only   -> E - P
//   previous only  -> Ep - P
//   neither        -> T - E - Ep + P
//
// The reverse count is the post-toggle value of the opposite case. Every
// count is >= 1 for the proposed dyad itself, so the ratio is always finite.
#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "dccm/network.hpp"
#include "dccm/rng.hpp"
#include "dccm/stats.hpp"

namespace dccm {

/// Per-time-step Gaussian over property space (diagonal covariance).
/// Component order: static pairs in canonical pair order, then dynamic pairs.
struct PropertyDistribution {
  std::vector<double> mean;
  std::vector<double> variance;
  bool has_dynamic = false;

  std::size_t dimension() const { return mean.size(); }
};

inline void apply_variance_floor(PropertyDistribution& dist, double floor) {
  for (double& v : dist.variance) v = std::max(v, floor);
}

struct SamplerConfig {
  long long proposals_per_step = -1;  // -1: 100 sweeps (100 * C(n,2))
  long long burn_in = -1;             // -1: same as proposals_per_step
  std::uint64_t seed = 1;
  double variance_floor = 1e-8;

  long long resolved_proposals(long long n_dyads) const {
    return proposals_per_step >= 0 ? proposals_per_step : 100 * n_dyads;
  }
  long long resolved_burn_in(long long n_dyads) const {
    return burn_in >= 0 ? burn_in : resolved_proposals(n_dyads);
  }
};

/// Unnormalized log density of the independent-Gaussian product (constant
/// terms dropped; only ratios are ever consumed).
inline double log_density(const PropertyVector& props, const PropertyDistribution& dist) {
  if (props.dynamic_part.has_value() != dist.has_dynamic)
    throw std::invalid_argument("property vector / distribution dynamic-part mismatch");
  if (props.dimension() != dist.dimension())
    throw std::invalid_argument("property vector / distribution dimension mismatch");
  double sum = 0;
  std::size_t i = 0;
  auto accumulate = [&](const std::vector<double>& xs) {
    for (double x : xs) {
      double v = dist.variance[i];
      if (!(v > 0)) throw std::invalid_argument("nonpositive variance in distribution");
      double d = x - dist.mean[i];
      sum -= d * d / (2.0 * v);
      ++i;
    }
  };
  accumulate(props.static_part);
  if (props.dynamic_part) accumulate(*props.dynamic_part);
  return sum;
}

namespace detail {

/// The target compiled to count space for the hot loop: a Gaussian over the
/// normalized property x = c / M equals a Gaussian over the count c with
/// mu_c = mu * M and var_c = var * M^2 up to dropped constants.
struct CountTarget {
  std::vector<double> mu_s, inv2v_s;  // per pair
  std::vector<double> mu_d, inv2v_d;  // empty unless has_dynamic
  bool has_dynamic = false;
};

}  // namespace detail

/// MCMC state for one time step: the evolving current network plus the fixed
/// conditioning slice, with all pair counts maintained incrementally.
class SamplerState {
 public:
  /// `previous == nullptr` means an empty conditioning slice (static-only
  /// sampling); otherwise it is restricted to `current`'s roster and
  /// classified by `current`'s group labels.
  SamplerState(const Network& current, const Network* previous)
      : roster_(current.roster()),
        labels_(current.labels()),
        group_(current.groups()),
        n_(current.size()),
        n_pairs_(pair_count(current.n_labels())) {
    if (n_pairs_ > 65535) throw std::invalid_argument("too many group labels");
    n_dyads_ = static_cast<long long>(n_) * (n_ - 1) / 2;
    tally_ = current.tally();
    const int K = current.n_labels();
    totals_.assign(n_pairs_, 0);
    for (int l = 0; l < K; ++l)
      for (int k = l; k < K; ++k)
        totals_[pair_index(K, l, k)] =
            l == k ? tally_.counts[l] * (tally_.counts[l] - 1) / 2
                   : tally_.counts[l] * tally_.counts[k];

    pair_of_dyad_.resize(n_dyads_);
    long long d = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        pair_of_dyad_[d++] = static_cast<std::uint16_t>(pair_index(K, group_[i], group_[j]));

    std::size_t words = static_cast<std::size_t>((n_dyads_ + 63) / 64);
    cur_bits_.assign(words, 0);
    prev_bits_.assign(words, 0);
    cur_.assign(n_pairs_, 0);
    prev_count_.assign(n_pairs_, 0);
    persist_.assign(n_pairs_, 0);

    for (auto [a, b] : current.edges()) set_bit(cur_bits_, dyad_index(a, b));
    if (previous) {
      has_previous_ = true;
      for (auto [a, b] : previous->edges()) {
        int ia = current.index_of(previous->roster()[a]);
        int ib = current.index_of(previous->roster()[b]);
        if (ia < 0 || ib < 0) continue;
        set_bit(prev_bits_, dyad_index(ia, ib));
      }
    }
    for (long long t = 0; t < n_dyads_; ++t) {
      bool c = test_bit(cur_bits_, t), p = test_bit(prev_bits_, t);
      if (c) ++cur_[pair_of_dyad_[t]];
      if (p) ++prev_count_[pair_of_dyad_[t]];
      if (c && p) ++persist_[pair_of_dyad_[t]];
    }
  }

  int size() const { return n_; }
  long long n_dyads() const { return n_dyads_; }
  int n_labels() const { return static_cast<int>(labels_.size()); }
  bool has_previous() const { return has_previous_; }
  const GroupTally& tally() const { return tally_; }

  long long dyad_index(int a, int b) const {
    if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_)
      throw std::invalid_argument("bad dyad");
    if (a > b) std::swap(a, b);
    return static_cast<long long>(a) * (2 * n_ - a - 1) / 2 + (b - a - 1);
  }

  bool has_edge(int a, int b) const { return test_bit(cur_bits_, dyad_index(a, b)); }
  bool had_edge(int a, int b) const { return test_bit(prev_bits_, dyad_index(a, b)); }

  MixingCounts mixing() const { return as_counts(cur_); }
  MixingCounts persisting() const { return as_counts(persist_); }
  MixingCounts prev_mixing() const { return as_counts(prev_count_); }

  /// Normalized property views recomputed from the integer counts.
  PropertyVector properties(bool with_dynamic) const {
    PropertyVector pv;
    pv.normalizer = tally_;
    pv.static_part = normalize_mixing(mixing(), tally_);
    if (with_dynamic) pv.dynamic_part = normalize_mixing(persisting(), tally_);
    return pv;
  }

  /// Exact one-toggle move counts into the proposal's class and back.
  std::pair<long long, long long> forward_reverse_counts(int a, int b) const {
    return forward_reverse_counts_by_index(dyad_index(a, b));
  }

  std::pair<long long, long long> forward_reverse_counts_by_index(long long d) const {
    const int pp = pair_of_dyad_[d];
    const bool in_cur = test_bit(cur_bits_, d), in_prev = test_bit(prev_bits_, d);
    const long long E = cur_[pp], Ep = prev_count_[pp], P = persist_[pp], T = totals_[pp];
    long long fwd, rev;
    if (in_cur) {
      if (in_prev) { fwd = P;          rev = Ep - P + 1; }
      else         { fwd = E - P;      rev = T - E - Ep + P + 1; }
    } else {
      if (in_prev) { fwd = Ep - P;     rev = P + 1; }
      else         { fwd = T - E - Ep + P; rev = E + 1 - P; }
    }
    assert(fwd >= 1 && "chosen dyad must witness its own class move");
    return {fwd, rev};
  }

  /// Flip one dyad, updating every count in O(1).
  void toggle(int a, int b) { toggle_by_index(dyad_index(a, b)); }

  void toggle_by_index(long long d) {
    const int pp = pair_of_dyad_[d];
    const bool in_prev = test_bit(prev_bits_, d);
    if (test_bit(cur_bits_, d)) {
      --cur_[pp];
      if (in_prev) --persist_[pp];
    } else {
      ++cur_[pp];
      if (in_prev) ++persist_[pp];
    }
    flip_bit(cur_bits_, d);
  }

  /// Materialize the current network.
  Network snapshot() const {
    std::vector<Edge> edges;
    long long d = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j, ++d)
        if (test_bit(cur_bits_, d)) edges.emplace_back(i, j);
    return build_network_indexed(roster_, group_, labels_, std::move(edges));
  }

  friend bool operator==(const SamplerState& x, const SamplerState& y) {
    return x.cur_bits_ == y.cur_bits_ && x.prev_bits_ == y.prev_bits_ &&
           x.cur_ == y.cur_ && x.persist_ == y.persist_ && x.prev_count_ == y.prev_count_;
  }

  // hot-loop internals
  int pair_of(long long d) const { return pair_of_dyad_[d]; }
  long long cur_count(int pp) const { return cur_[pp]; }
  long long persist_count(int pp) const { return persist_[pp]; }
  long long previous_count(int pp) const { return prev_count_[pp]; }
  long long total_dyads(int pp) const { return totals_[pp]; }
  bool test_cur(long long d) const { return test_bit(cur_bits_, d); }
  bool test_prev(long long d) const { return test_bit(prev_bits_, d); }

  detail::CountTarget compile_target(const PropertyDistribution& dist) const {
    if (dist.dimension() != static_cast<std::size_t>(dist.has_dynamic ? 2 * n_pairs_ : n_pairs_))
      throw std::invalid_argument("distribution dimension does not match label pairs");
    detail::CountTarget t;
    t.has_dynamic = dist.has_dynamic;
    t.mu_s.resize(n_pairs_);
    t.inv2v_s.resize(n_pairs_);
    if (dist.has_dynamic) {
      t.mu_d.resize(n_pairs_);
      t.inv2v_d.resize(n_pairs_);
    }
    const int K = n_labels();
    for (int pp = 0; pp < n_pairs_; ++pp) {
      auto [l, k] = pair_labels(K, pp);
      double M = static_cast<double>(tally_.counts[l]);
      auto fill = [&](double mu, double var, double& mu_c, double& inv2v) {
        if (!(var > 0)) throw std::invalid_argument("nonpositive variance in distribution");
        if (M == 0) { mu_c = 0; inv2v = 0; return; }  // pair has no dyads
        mu_c = mu * M;
        inv2v = 1.0 / (2.0 * var * M * M);
      };
      fill(dist.mean[pp], dist.variance[pp], t.mu_s[pp], t.inv2v_s[pp]);
      if (dist.has_dynamic)
        fill(dist.mean[n_pairs_ + pp], dist.variance[n_pairs_ + pp], t.mu_d[pp], t.inv2v_d[pp]);
    }
    return t;
  }

 private:
  MixingCounts as_counts(const std::vector<long long>& v) const {
    MixingCounts m(n_labels());
    m.counts = v;
    return m;
  }
  static void set_bit(std::vector<std::uint64_t>& bits, long long d) {
    bits[d >> 6] |= 1ULL << (d & 63);
  }
  static void flip_bit(std::vector<std::uint64_t>& bits, long long d) {
    bits[d >> 6] ^= 1ULL << (d & 63);
  }
  static bool test_bit(const std::vector<std::uint64_t>& bits, long long d) {
    return (bits[d >> 6] >> (d & 63)) & 1;
  }

  std::vector<std::string> roster_;
  std::vector<std::string> labels_;
  std::vector<int> group_;
  int n_ = 0;
  int n_pairs_ = 0;
  long long n_dyads_ = 0;
  bool has_previous_ = false;
  GroupTally tally_;
  std::vector<long long> totals_;
  std::vector<std::uint16_t> pair_of_dyad_;
  std::vector<std::uint64_t> cur_bits_, prev_bits_;
  std::vector<long long> cur_, prev_count_, persist_;
};

namespace detail {

/// Log acceptance ratio for toggling dyad `d` (before min with 0).
inline double log_accept_ratio(const SamplerState& state, const CountTarget& target, long long d) {
  const int pp = state.pair_of(d);
  const bool in_cur = state.test_cur(d), in_prev = state.test_prev(d);
  const long long E = state.cur_count(pp), Ep = state.previous_count(pp),
                  P = state.persist_count(pp), T = state.total_dyads(pp);
  long long fwd, rev;
  if (in_cur) {
    if (in_prev) { fwd = P;          rev = Ep - P + 1; }
    else         { fwd = E - P;      rev = T - E - Ep + P + 1; }
  } else {
    if (in_prev) { fwd = Ep - P;     rev = P + 1; }
    else         { fwd = T - E - Ep + P; rev = E + 1 - P; }
  }
  assert(fwd >= 1);
  const double delta = in_cur ? -1.0 : 1.0;
  // change of -(c - mu)^2 / (2 var) under c -> c + delta
  double dc = static_cast<double>(E) - target.mu_s[pp];
  double dlog = -delta * (2.0 * dc + delta) * target.inv2v_s[pp];
  if (target.has_dynamic && in_prev) {
    double dp = static_cast<double>(P) - target.mu_d[pp];
    dlog += -delta * (2.0 * dp + delta) * target.inv2v_d[pp];
  }
  return std::log(static_cast<double>(rev) / static_cast<double>(fwd)) + dlog;
}

/// The chain kernel: uniform dyad proposal, Hastings-corrected acceptance.
inline void run_chain(SamplerState& state, const CountTarget& target, long long iterations,
                      Rng& rng) {
  const long long D = state.n_dyads();
  if (D == 0) return;
  for (long long it = 0; it < iterations; ++it) {
    const long long d = static_cast<long long>(bounded(rng, static_cast<std::uint64_t>(D)));
    const double lr = log_accept_ratio(state, target, d);
    if (lr >= 0 || canonical(rng) < std::exp(lr)) state.toggle_by_index(d);
  }
}

}  // namespace detail

/// Eq-(7)-style acceptance probability for proposing the toggle of `dyad`:
/// min(1, (reverse count / forward count) * density ratio).
inline double acceptance_probability(const SamplerState& state, Edge dyad,
                                     const PropertyDistribution& dist) {
  auto target = state.compile_target(dist);
  double lr = detail::log_accept_ratio(state, target, state.dyad_index(dyad.first, dyad.second));
  return std::min(1.0, std::exp(lr));
}

/// One MH proposal; state is updated in place when accepted.
inline void mh_step(SamplerState& state, const PropertyDistribution& dist, Rng& rng) {
  auto target = state.compile_target(dist);
  detail::run_chain(state, target, 1, rng);
}

/// One conditioned draw: the chain starts at the previous slice (a feasible
/// class with dynamic properties at their maximum) and runs a fixed number
/// of proposals; the final element is the sample.
inline Network sample_network(const Network& prev, const PropertyDistribution& dist,
                              const SamplerConfig& config, Rng& rng) {
  if (!dist.has_dynamic)
    throw std::invalid_argument("sample_network requires a dynamic-part distribution");
  PropertyDistribution floored = dist;
  apply_variance_floor(floored, config.variance_floor);
  SamplerState state(prev, &prev);
  auto target = state.compile_target(floored);
  detail::run_chain(state, target, config.resolved_proposals(state.n_dyads()), rng);
  return state.snapshot();
}

/// Sequence-start draw over static properties only, burned in from the
/// empty graph. `roster_carrier` supplies roster and labels; its edges are
/// ignored.
inline Network sample_initial_network(const Network& roster_carrier,
                                      const PropertyDistribution& dist,
                                      const SamplerConfig& config, Rng& rng) {
  if (dist.has_dynamic)
    throw std::invalid_argument("sample_initial_network requires a static-only distribution");
  PropertyDistribution floored = dist;
  apply_variance_floor(floored, config.variance_floor);
  Network empty = roster_carrier.edgeless();
  SamplerState state(empty, nullptr);
  auto target = state.compile_target(floored);
  detail::run_chain(state, target,
                    config.resolved_burn_in(state.n_dyads()) +
                        config.resolved_proposals(state.n_dyads()),
                    rng);
  return state.snapshot();
}

/// Whole dynamic network: slice t conditions on slice t-1 restricted to
/// slice t's roster. Either dists[0] is static-only or `seed_network` gives
/// an explicit predecessor for the first step.
inline DynamicNetwork sample_dynamic_network(const std::vector<Network>& roster_seq,
                                             const std::vector<PropertyDistribution>& dists,
                                             const SamplerConfig& config, Rng& rng,
                                             const Network* seed_network = nullptr) {
  if (roster_seq.size() != dists.size())
    throw std::invalid_argument("roster sequence and distribution sequence lengths differ");
  if (roster_seq.empty()) return {};
  if (dists[0].has_dynamic && !seed_network)
    throw std::invalid_argument("first distribution has a dynamic part but no seed network given");
  DynamicNetwork out;
  out.slices.reserve(roster_seq.size());
  for (std::size_t t = 0; t < roster_seq.size(); ++t) {
    const Network* prev = nullptr;
    Network conditioned;
    if (t > 0) {
      conditioned = restrict_to_roster(out.slices.back(), roster_seq[t]);
      prev = &conditioned;
    } else if (seed_network) {
      conditioned = restrict_to_roster(*seed_network, roster_seq[t]);
      prev = &conditioned;
    }
    if (dists[t].has_dynamic) {
      if (!prev) throw std::invalid_argument("dynamic distribution with no predecessor slice");
      out.slices.push_back(sample_network(*prev, dists[t], config, rng));
    } else {
      out.slices.push_back(sample_initial_network(roster_seq[t], dists[t], config, rng));
    }
  }
  return out;
}

/// Exact target distribution over congruence classes for small instances,
/// found by enumerating every graph on the carrier's roster.
struct ClassInfo {
  double probability = 0;
  long long size = 0;  // number of graphs in the class
};

using ClassSignature = std::vector<long long>;  // static counts, then dynamic

inline ClassSignature class_signature(const SamplerState& state, bool with_dynamic) {
  ClassSignature sig = state.mixing().counts;
  if (with_dynamic) {
    auto p = state.persisting().counts;
    sig.insert(sig.end(), p.begin(), p.end());
  }
  return sig;
}

inline std::map<ClassSignature, ClassInfo> enumerate_target(const Network& roster_carrier,
                                                            const Network* prev,
                                                            const PropertyDistribution& dist) {
  const int n = roster_carrier.size();
  const long long n_dyads = static_cast<long long>(n) * (n - 1) / 2;
  if (n_dyads > 20) throw std::invalid_argument("enumeration limited to 20 dyads");
  if (dist.has_dynamic && !prev)
    throw std::invalid_argument("dynamic distribution requires a previous network");

  Network empty = roster_carrier.edgeless();
  SamplerState probe(empty, dist.has_dynamic ? prev : nullptr);
  const int K = roster_carrier.n_labels();
  const int n_pairs = pair_count(K);
  const GroupTally tally = probe.tally();

  // log weight of a class from its counts (matches log_density up to the
  // same dropped constants)
  auto log_weight = [&](const ClassSignature& sig) {
    double sum = 0;
    for (int c = 0; c < static_cast<int>(dist.dimension()); ++c) {
      auto [l, k] = pair_labels(K, c % n_pairs);
      double x = normalize_count(sig[c], tally.counts[l]);
      double d = x - dist.mean[c];
      sum -= d * d / (2.0 * dist.variance[c]);
    }
    return sum;
  };

  std::map<ClassSignature, ClassInfo> classes;
  std::map<ClassSignature, double> logw;
  for (std::uint64_t mask = 0; mask < (1ULL << n_dyads); ++mask) {
    // incremental Gray-code walk keeps the probe state in sync
    if (mask != 0) {
      std::uint64_t gray_prev = (mask - 1) ^ ((mask - 1) >> 1);
      std::uint64_t gray = mask ^ (mask >> 1);
      long long d = static_cast<long long>(__builtin_ctzll(gray ^ gray_prev));
      probe.toggle_by_index(d);
    }
    ClassSignature sig = class_signature(probe, dist.has_dynamic);
    auto [it, fresh] = classes.try_emplace(sig);
    ++it->second.size;
    if (fresh) logw.emplace(sig, log_weight(sig));
  }

  double max_lw = -std::numeric_limits<double>::infinity();
  for (auto& [sig, lw] : logw) max_lw = std::max(max_lw, lw);
  double z = 0;
  for (auto& [sig, lw] : logw) z += std::exp(lw - max_lw);
  for (auto& [sig, info] : classes) info.probability = std::exp(logw[sig] - max_lw) / z;
  return classes;
}

}  // namespace dccm
