#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace reapnvm {

/// Which NVM operation a visit to a state costs.
enum class OpTag { None, Set, Reset };

inline std::string_view to_string(OpTag t) {
  switch (t) {
    case OpTag::Set: return "set";
    case OpTag::Reset: return "reset";
    case OpTag::None: break;
  }
  return "none";
}

inline OpTag op_tag_from_string(std::string_view s) {
  if (s == "set") return OpTag::Set;
  if (s == "reset") return OpTag::Reset;
  if (s == "none") return OpTag::None;
  throw ParseError("unknown op_tag '" + std::string(s) + "'");
}

struct StateSpec {
  std::size_t id = 0;
  std::string label;
  OpTag op_tag = OpTag::None;

  friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

/// Labeled absorbing Markov chain describing what one cell goes through while
/// the PUF answers a single challenge. Row-major dense transition matrix.
struct MarkovChainSpec {
  std::vector<StateSpec> states;
  std::vector<double> transition;  // size() * size()
  std::size_t initial = 0;
  std::vector<std::size_t> terminal;

  std::size_t size() const noexcept { return states.size(); }

  double prob(std::size_t from, std::size_t to) const { return transition[from * size() + to]; }
  double& prob(std::size_t from, std::size_t to) { return transition[from * size() + to]; }

  bool is_terminal(std::size_t s) const {
    return std::find(terminal.begin(), terminal.end(), s) != terminal.end();
  }

  std::vector<std::size_t> states_tagged(OpTag tag) const {
    std::vector<std::size_t> out;
    for (const auto& st : states)
      if (st.op_tag == tag) out.push_back(st.id);
    return out;
  }

  friend bool operator==(const MarkovChainSpec&, const MarkovChainSpec&) = default;
};

inline constexpr double kRowSumTolerance = 1e-9;

namespace detail {
inline std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}
}  // namespace detail

/// Lists every violated invariant. An empty result means the chain is usable
/// for analysis.
inline std::vector<std::string> validate(const MarkovChainSpec& spec) {
  std::vector<std::string> out;
  const std::size_t n = spec.size();
  if (n == 0) {
    out.emplace_back("chain has no states");
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (spec.states[i].id != i)
      out.push_back("state at position " + std::to_string(i) + " has id " +
                    std::to_string(spec.states[i].id) + " (ids must be dense 0..S-1)");
  if (spec.transition.size() != n * n) {
    out.push_back("transition matrix has " + std::to_string(spec.transition.size()) +
                  " entries, expected " + std::to_string(n * n));
    return out;
  }
  if (spec.initial >= n) out.push_back("initial state " + std::to_string(spec.initial) + " out of range");
  if (spec.terminal.empty()) out.emplace_back("no terminal state");

  std::vector<bool> seen(n, false);
  for (auto t : spec.terminal) {
    if (t >= n) {
      out.push_back("terminal state " + std::to_string(t) + " out of range");
      continue;
    }
    if (seen[t]) out.push_back("terminal state " + std::to_string(t) + " listed twice");
    seen[t] = true;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    bool entries_ok = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = spec.prob(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) entries_ok = false;
      sum += p;
    }
    if (!entries_ok) out.push_back("row " + std::to_string(i) + " has entries outside [0,1]");
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      out.push_back("row " + std::to_string(i) + " sums to " + detail::fmt_num(sum));
  }

  for (auto t : spec.terminal) {
    if (t >= n) continue;
    if (spec.prob(t, t) != 1.0)
      out.push_back("terminal state " + std::to_string(t) + " not absorbing (self-loop " +
                    detail::fmt_num(spec.prob(t, t)) + ")");
    if (spec.states[t].op_tag != OpTag::None)
      out.push_back("terminal state " + std::to_string(t) + " carries op_tag " +
                    std::string(to_string(spec.states[t].op_tag)));
  }

  if (spec.initial < n && !spec.terminal.empty()) {
    // Absorption is certain iff every state reachable from the initial state
    // can itself reach a terminal state.
    std::vector<bool> reach(n, false);
    std::deque<std::size_t> q{spec.initial};
    reach[spec.initial] = true;
    while (!q.empty()) {
      auto s = q.front();
      q.pop_front();
      for (std::size_t j = 0; j < n; ++j)
        if (spec.prob(s, j) > 0.0 && !reach[j]) reach[j] = true, q.push_back(j);
    }
    std::vector<bool> co(n, false);
    for (auto t : spec.terminal)
      if (t < n) co[t] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (co[i]) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (spec.prob(i, j) > 0.0 && co[j]) {
            co[i] = changed = true;
            break;
          }
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i] && !co[i])
        out.push_back("state " + std::to_string(i) + " is reachable but cannot reach a terminal state");
  }
  return out;
}

inline void require_valid(const MarkovChainSpec& spec) {
  auto v = validate(spec);
  if (!v.empty()) throw ValidationError("invalid Markov chain:", std::move(v));
}

// ---------------------------------------------------------------------------
// Built-in chains

/// How the set loop is expanded into states.
///  Geometric: one Set state with a self-loop; sojourn is geometric with mean
///    mean_set_pulses.
///  LevelExpanded: uniform target level L in [0, n_levels), max(L, 1) pulses
///    laid out as a ladder of Set states. Each rung repeats with probability
///    1 - pulse_success (a failed program-and-verify pulse), so the mean is
///    E[max(L,1)] / pulse_success.
enum class SetModel { Geometric, LevelExpanded };

struct ChainParams {
  int n_pairs = 128;
  int n_levels = 8;
  double mean_set_pulses = 3.5;
  double reset_pulses = 1.0;
  SetModel set_model = SetModel::Geometric;
  double pulse_success = 1.0;
};

inline std::vector<std::string> validate(const ChainParams& p) {
  std::vector<std::string> out;
  if (p.n_pairs < 1) out.emplace_back("n_pairs must be >= 1");
  if (p.n_levels < 2 || (p.n_levels & (p.n_levels - 1)) != 0)
    out.emplace_back("n_levels must be a power of two >= 2");
  if (!(p.mean_set_pulses >= 1.0) || !std::isfinite(p.mean_set_pulses))
    out.emplace_back("mean_set_pulses must be >= 1");
  if (!(p.reset_pulses >= 1.0) || !std::isfinite(p.reset_pulses))
    out.emplace_back("reset_pulses must be >= 1");
  if (!(p.pulse_success > 0.0 && p.pulse_success <= 1.0))
    out.emplace_back("pulse_success must be in (0, 1]");
  return out;
}

/// Mean pulses per set under the level-expanded convention with perfect
/// pulses: E[max(L, 1)] for L uniform in [0, n_levels).
inline double level_expanded_base_mean(int n_levels) {
  double s = 0.0;
  for (int l = 0; l < n_levels; ++l) s += std::max(l, 1);
  return s / n_levels;
}

namespace detail {

class ChainBuilder {
 public:
  std::size_t add(std::string label, OpTag tag) {
    const auto id = states_.size();
    states_.push_back({id, std::move(label), tag});
    edges_.emplace_back();
    return id;
  }
  void edge(std::size_t from, std::size_t to, double p) {
    if (p > 0.0) edges_[from].push_back({to, p});
  }
  MarkovChainSpec finish(std::size_t initial, std::size_t terminal) {
    MarkovChainSpec spec;
    spec.states = states_;
    const auto n = states_.size();
    spec.transition.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (auto [j, p] : edges_[i]) spec.transition[i * n + j] += p;
    spec.transition[terminal * n + terminal] = 1.0;
    spec.initial = initial;
    spec.terminal = {terminal};
    return spec;
  }

 private:
  struct Edge {
    std::size_t to;
    double p;
  };
  std::vector<StateSpec> states_;
  std::vector<std::vector<Edge>> edges_;
};

inline void require_valid_params(const ChainParams& p) {
  auto v = validate(p);
  if (!v.empty()) throw ValidationError("invalid chain parameters:", std::move(v));
}

/// Adds the set branch. Returns the entry points with their relative weight
/// (summing to 1) and wires every exit to `exit`.
inline std::vector<std::pair<std::size_t, double>> add_set_branch(ChainBuilder& b, const ChainParams& p,
                                                                  std::size_t exit) {
  if (p.set_model == SetModel::Geometric) {
    const auto s = b.add("Set Loop", OpTag::Set);
    const double stay = 1.0 - 1.0 / p.mean_set_pulses;
    b.edge(s, s, stay);
    b.edge(s, exit, 1.0 - stay);
    return {{s, 1.0}};
  }
  const int rungs = p.n_levels - 1;
  std::vector<std::size_t> ladder;
  for (int r = 0; r < rungs; ++r) ladder.push_back(b.add("Set Pulse " + std::to_string(r + 1), OpTag::Set));
  for (int r = 0; r < rungs; ++r) {
    const auto next = r + 1 < rungs ? ladder[r + 1] : exit;
    b.edge(ladder[r], ladder[r], 1.0 - p.pulse_success);
    b.edge(ladder[r], next, p.pulse_success);
  }
  // k pulses enter the ladder k rungs before the exit.
  std::vector<double> weight(rungs + 1, 0.0);
  for (int l = 0; l < p.n_levels; ++l) weight[std::max(l, 1)] += 1.0 / p.n_levels;
  std::vector<std::pair<std::size_t, double>> entries;
  for (int k = 1; k <= rungs; ++k)
    if (weight[k] > 0.0) entries.emplace_back(ladder[rungs - k], weight[k]);
  return entries;
}

inline std::size_t add_reset(ChainBuilder& b, const ChainParams& p, std::size_t exit) {
  const auto r = b.add("Reset", OpTag::Reset);
  const double stay = 1.0 - 1.0 / p.reset_pulses;
  b.edge(r, r, stay);
  b.edge(r, exit, 1.0 - stay);
  return r;
}

}  // namespace detail

/// Per-cell chain for REAP-NVM: per challenge, a cell's pair is programmed
/// with probability 1/n_pairs, reset (it was the previous challenge's pair)
/// with probability 1/n_pairs, and otherwise left alone.
inline MarkovChainSpec build_reap_nvm_chain(const ChainParams& p = {}) {
  detail::require_valid_params(p);
  if (p.n_pairs < 2) throw ValidationError("REAP-NVM chain needs n_pairs >= 2");
  detail::ChainBuilder b;
  const auto start = b.add("Receive Challenge", OpTag::None);
  // Layout: start, set states, reset, terminal.
  const std::size_t set_states = p.set_model == SetModel::Geometric ? 1 : static_cast<std::size_t>(p.n_levels - 1);
  const std::size_t term = set_states + 2;
  auto set_entries = detail::add_set_branch(b, p, term);
  const auto reset = detail::add_reset(b, p, term);
  b.add("Propagate Signals Through Cells", OpTag::None);

  const double hit = 1.0 / p.n_pairs;
  for (auto [s, w] : set_entries) b.edge(start, s, hit * w);
  b.edge(start, reset, hit);
  b.edge(start, term, static_cast<double>(p.n_pairs - 2) / p.n_pairs);
  return b.finish(start, term);
}

/// Per-cell chain for A-MPUF: every challenge programs every cell, then
/// resets it before the signals propagate. n_pairs is not used.
inline MarkovChainSpec build_ampuf_chain(const ChainParams& p = {}) {
  detail::require_valid_params(p);
  detail::ChainBuilder b;
  const auto start = b.add("Receive Challenge", OpTag::None);
  const std::size_t set_states = p.set_model == SetModel::Geometric ? 1 : static_cast<std::size_t>(p.n_levels - 1);
  const std::size_t reset_id = 1 + set_states;
  const std::size_t term = reset_id + 1;
  auto set_entries = detail::add_set_branch(b, p, reset_id);
  detail::add_reset(b, p, term);
  b.add("Propagate Signals Through Cells", OpTag::None);
  for (auto [s, w] : set_entries) b.edge(start, s, w);
  return b.finish(start, term);
}

// ---------------------------------------------------------------------------
// JSON chain-spec documents

inline nlohmann::ordered_json to_json(const MarkovChainSpec& spec) {
  nlohmann::ordered_json doc;
  auto& states = doc["states"] = nlohmann::ordered_json::array();
  for (const auto& s : spec.states)
    states.push_back({{"id", s.id}, {"label", s.label}, {"op_tag", std::string(to_string(s.op_tag))}});
  auto& rows = doc["transition"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < spec.size(); ++j) row.push_back(spec.prob(i, j));
    rows.push_back(std::move(row));
  }
  doc["initial"] = spec.initial;
  doc["terminal"] = spec.terminal;
  return doc;
}

inline std::string export_chain(const MarkovChainSpec& spec) { return to_json(spec).dump(2) + "\n"; }

/// Parses and validates a chain-spec document.
inline MarkovChainSpec load_chain(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("chain document is not valid JSON: ") + e.what());
  }
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("chain document missing '") + key + "'");
    return doc.at(key);
  };
  MarkovChainSpec spec;
  try {
    for (const auto& s : need("states")) {
      StateSpec st;
      st.id = s.at("id").get<std::size_t>();
      st.label = s.at("label").get<std::string>();
      st.op_tag = op_tag_from_string(s.at("op_tag").get<std::string>());
      spec.states.push_back(std::move(st));
    }
    const auto& rows = need("transition");
    if (!rows.is_array() || rows.size() != spec.size())
      throw ParseError("'transition' must have one row per state");
    for (const auto& row : rows) {
      if (!row.is_array() || row.size() != spec.size())
        throw ParseError("'transition' rows must have one entry per state");
      for (const auto& x : row) {
        if (!x.is_number()) throw ParseError("'transition' entries must be numbers");
        spec.transition.push_back(x.get<double>());
      }
    }
    spec.initial = need("initial").get<std::size_t>();
    spec.terminal = need("terminal").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed chain document: ") + e.what());
  }
  require_valid(spec);
  return spec;
}

}  // namespace reapnvm
