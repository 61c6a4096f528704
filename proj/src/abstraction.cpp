#include "petc/abstraction.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "petc/errors.hpp"

namespace petc {

namespace {

using Clock = std::chrono::steady_clock;

struct Trie {
  struct Node {
    std::map<int, int> child;
    long state = -1;
  };
  std::vector<Node> nodes{Node{}};

  void insert(const Word& w, size_t state) {
    int cur = 0;
    for (int k : w) {
      auto it = nodes[static_cast<size_t>(cur)].child.find(k);
      if (it == nodes[static_cast<size_t>(cur)].child.end()) {
        nodes.push_back(Node{});
        const int id = static_cast<int>(nodes.size() - 1);
        nodes[static_cast<size_t>(cur)].child[k] = id;
        cur = id;
      } else {
        cur = it->second;
      }
    }
    nodes[static_cast<size_t>(cur)].state = static_cast<long>(state);
  }

  // States whose word starts with `prefix`.
  std::vector<size_t> with_prefix(Word::const_iterator begin, Word::const_iterator end) const {
    int cur = 0;
    for (auto it = begin; it != end; ++it) {
      auto c = nodes[static_cast<size_t>(cur)].child.find(*it);
      if (c == nodes[static_cast<size_t>(cur)].child.end()) return {};
      cur = c->second;
    }
    std::vector<size_t> out;
    std::vector<int> stack{cur};
    while (!stack.empty()) {
      const Node& n = nodes[static_cast<size_t>(stack.back())];
      stack.pop_back();
      if (n.state >= 0) out.push_back(static_cast<size_t>(n.state));
      for (auto it = n.child.rbegin(); it != n.child.rend(); ++it) stack.push_back(it->second);
    }
    return out;
  }
};

TrafficModel from_map(ModelKind kind, const DiscretizedPetc& disc, std::map<Word, std::optional<RatVector>> states,
                      bool over) {
  TrafficModel m;
  m.kind = kind;
  m.h = disc.h;
  m.h_P = disc.h_P;
  m.k_lo = disc.k_lo;
  m.k_bar = disc.k_bar;
  m.over_approximation = over;
  for (auto& [w, x] : states) {
    m.states.push_back(w);
    m.witnesses.push_back(std::move(x));
  }
  rebuild_edges(m);
  return m;
}

std::string json_rational(const Rational& q) { return to_string(q); }

Rational rational_field(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw ConfigError("model JSON: rational fields must be strings");
}

}  // namespace

const char* kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Trivial: return "trivial";
    case ModelKind::MpetcBisim: return "mpetc_bisim";
    case ModelKind::PetcSim: return "petc_sim";
  }
  return "?";
}

ModelKind parse_kind(const std::string& s) {
  if (s == "trivial") return ModelKind::Trivial;
  if (s == "mpetc_bisim" || s == "bisim") return ModelKind::MpetcBisim;
  if (s == "petc_sim" || s == "petc-sim") return ModelKind::PetcSim;
  throw ConfigError("unknown model kind '" + s + "'");
}

std::optional<size_t> TrafficModel::find(const Word& w) const {
  auto it = std::lower_bound(states.begin(), states.end(), w);
  if (it == states.end() || *it != w) return std::nullopt;
  return static_cast<size_t>(it - states.begin());
}

bool TrafficModel::has_edge(size_t from, size_t to) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(from, to));
}

Rational TrafficModel::output(size_t i) const {
  const Word& w = states.at(i);
  return w.empty() ? h_P : Rational(h * w.front());
}

size_t TrafficModel::count(bool include_eps) const {
  const bool has_eps = !states.empty() && states.front().empty();
  return states.size() - ((has_eps && !include_eps) ? 1 : 0);
}

std::vector<size_t> TrafficModel::out_degrees() const {
  std::vector<size_t> d(states.size());
  for (const auto& e : edges) ++d[e.first];
  return d;
}

void rebuild_edges(TrafficModel& m) {
  m.edges.clear();
  if (m.kind == ModelKind::PetcSim) {
    Trie trie;
    for (size_t i = 0; i < m.states.size(); ++i) trie.insert(m.states[i], i);
    for (size_t i = 0; i < m.states.size(); ++i) {
      const Word& w = m.states[i];
      if (w.empty()) continue;
      for (size_t j : trie.with_prefix(w.begin() + 1, w.end()))
        if (!m.states[j].empty()) m.edges.emplace_back(i, j);
    }
  } else {
    for (size_t i = 0; i < m.states.size(); ++i) {
      const Word& w = m.states[i];
      if (w.empty()) {
        m.edges.emplace_back(i, i);
        continue;
      }
      if (auto j = m.find(Word(w.begin() + 1, w.end()))) m.edges.emplace_back(i, *j);
    }
  }
  std::sort(m.edges.begin(), m.edges.end());
}

TrafficModel build_trivial(int k_lo, int k_bar, int N, const Rational& h, const Rational& h_P, std::uint64_t cap) {
  if (k_lo < 1 || k_bar < k_lo) throw ConfigError("build_trivial: need 1 ≤ k_lo ≤ k_bar");
  if (N < 0) throw ConfigError("build_trivial: N must be non-negative");
  const std::uint64_t K = static_cast<std::uint64_t>(k_bar - k_lo + 1);
  std::uint64_t total = 1, level = 1;
  for (int i = 1; i <= N; ++i) {
    if (level > cap / K) throw ConfigError("build_trivial: state count exceeds cap " + std::to_string(cap));
    level *= K;
    total += level;
    if (total > cap) throw ConfigError("build_trivial: state count exceeds cap " + std::to_string(cap));
  }
  TrafficModel m;
  m.kind = ModelKind::Trivial;
  m.h = h;
  m.h_P = h_P;
  m.k_lo = k_lo;
  m.k_bar = k_bar;
  std::vector<Word> frontier{Word{}};
  m.states.push_back(Word{});
  for (int len = 1; len <= N; ++len) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (int k = k_lo; k <= k_bar; ++k) {
        Word x = w;
        x.push_back(k);
        next.push_back(std::move(x));
      }
    m.states.insert(m.states.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(m.states.begin(), m.states.end());
  m.witnesses.assign(m.states.size(), std::nullopt);
  rebuild_edges(m);
  return m;
}

TrafficModel build_mpetc_bisim(const DiscretizedPetc& disc, int N, const BisimOptions& opt, BuildStats* stats) {
  if (N < 1) throw ConfigError("build_mpetc_bisim: N must be at least 1");
  const auto t0 = Clock::now();
  BuildStats st;
  std::map<Word, std::optional<RatVector>> states;
  states[Word{}] = RatVector(static_cast<size_t>(disc.nx()));
  bool over = false;

  auto decide = [&](const std::vector<Word>& words, bool terminal) {
    std::vector<SatQuery> qs;
    qs.reserve(words.size());
    for (const auto& w : words) qs.push_back(sequence_query(disc, w, Shell::Sublevel, terminal));
    auto res = check_all(qs, opt.solver);
    st.queries += qs.size();
    for (size_t i = 0; i < res.size(); ++i) {
      st.solver_calls += static_cast<size_t>(res[i].solver_calls);
      st.solver_seconds += res[i].solver_time;
      if (res[i].status == SatStatus::Unknown) {
        ++st.unknowns;
        if (!opt.assume_sat)
          throw SolverUnknownError("solver could not decide " + std::string(terminal ? "" : "prefix of ") +
                                   word_to_string(words[i]) + (res[i].note.empty() ? "" : ": " + res[i].note) +
                                   " (rerun with assume_sat for an over-approximating model)");
        over = true;
      }
    }
    return res;
  };

  std::vector<Word> frontier{Word{}};  // prefixes (pruning mode) or states (suffix mode) of length level-1
  for (int level = 1; level <= N && !frontier.empty(); ++level) {
    std::vector<Word> cands;
    for (const auto& p : frontier)
      for (int k = disc.k_lo; k <= disc.k_bar; ++k) {
        Word w;
        if (opt.prefix_pruning) {
          w = p;
          w.push_back(k);
        } else {
          w.push_back(k);
          w.insert(w.end(), p.begin(), p.end());
        }
        cands.push_back(std::move(w));
      }
    std::sort(cands.begin(), cands.end());
    auto full = decide(cands, true);
    std::vector<Word> next, undecided;
    size_t added = 0;
    for (size_t i = 0; i < cands.size(); ++i) {
      if (full[i].status == SatStatus::Unsat) {
        undecided.push_back(cands[i]);
        continue;
      }
      states[cands[i]] = full[i].witness;
      ++added;
      next.push_back(cands[i]);
    }
    if (opt.prefix_pruning && level < N && !undecided.empty()) {
      auto pre = decide(undecided, false);
      for (size_t i = 0; i < undecided.size(); ++i)
        if (pre[i].status != SatStatus::Unsat) next.push_back(undecided[i]);
    }
    std::sort(next.begin(), next.end());
    st.states_per_level.push_back(added);
    if (opt.progress) opt.progress(level, added);
    frontier = std::move(next);
  }

  TrafficModel m = from_map(ModelKind::MpetcBisim, disc, std::move(states), over);
  st.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (stats) *stats = st;
  return m;
}

TrafficModel build_petc_sim(const DiscretizedPetc& disc, const TrafficModel& bisim, const BisimOptions& opt,
                            BuildStats* stats) {
  if (bisim.kind != ModelKind::MpetcBisim) throw ConfigError("build_petc_sim: needs an mpetc_bisim model");
  const auto t0 = Clock::now();
  BuildStats st;
  std::vector<Word> cands;
  for (const auto& w : bisim.states)
    if (!w.empty()) cands.push_back(w);
  std::vector<SatQuery> qs;
  for (const auto& w : cands) qs.push_back(sequence_query(disc, w, Shell::UnitLevel, true));
  auto res = check_all(qs, opt.solver);
  st.queries = qs.size();
  std::map<Word, std::optional<RatVector>> states;
  bool over = bisim.over_approximation;
  for (size_t i = 0; i < res.size(); ++i) {
    st.solver_calls += static_cast<size_t>(res[i].solver_calls);
    st.solver_seconds += res[i].solver_time;
    if (res[i].status == SatStatus::Unsat) continue;
    if (res[i].status == SatStatus::Unknown) {
      ++st.unknowns;
      if (!opt.assume_sat)
        throw SolverUnknownError("solver could not decide unit-shell " + word_to_string(cands[i]) +
                                 (res[i].note.empty() ? "" : ": " + res[i].note));
      over = true;
    }
    states[cands[i]] = res[i].witness;
  }
  std::vector<size_t> per_level;
  for (const auto& [w, _] : states) {
    if (per_level.size() < w.size()) per_level.resize(w.size());
    ++per_level[w.size() - 1];
  }
  st.states_per_level = per_level;
  TrafficModel m = from_map(ModelKind::PetcSim, disc, std::move(states), over);
  st.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (stats) *stats = st;
  return m;
}

nlohmann::json model_to_json(const TrafficModel& m) {
  nlohmann::json j;
  j["kind"] = kind_name(m.kind);
  j["h"] = json_rational(m.h);
  j["h_P"] = json_rational(m.h_P);
  j["k_lo"] = m.k_lo;
  j["k_bar"] = m.k_bar;
  j["over_approximation"] = m.over_approximation;
  auto states = nlohmann::json::array();
  for (size_t i = 0; i < m.states.size(); ++i) {
    nlohmann::json s;
    s["word"] = m.states[i];
    s["output"] = json_rational(m.output(i));
    if (m.witnesses[i]) {
      auto w = nlohmann::json::array();
      for (const auto& xi : *m.witnesses[i]) w.push_back(json_rational(xi));
      s["witness"] = w;
    }
    states.push_back(std::move(s));
  }
  j["states"] = std::move(states);
  auto edges = nlohmann::json::array();
  for (const auto& [a, b] : m.edges) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  return j;
}

TrafficModel model_from_json(const nlohmann::json& j) {
  try {
    TrafficModel m;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    m.h = rational_field(j.at("h"));
    m.h_P = rational_field(j.at("h_P"));
    m.k_lo = j.value("k_lo", 1);
    m.k_bar = j.value("k_bar", 1);
    m.over_approximation = j.value("over_approximation", false);
    for (const auto& s : j.at("states")) {
      m.states.push_back(s.at("word").get<Word>());
      if (s.contains("witness")) {
        RatVector x;
        for (const auto& v : s["witness"]) x.push_back(rational_field(v));
        m.witnesses.emplace_back(std::move(x));
      } else {
        m.witnesses.emplace_back(std::nullopt);
      }
    }
    if (!std::is_sorted(m.states.begin(), m.states.end()))
      throw ConfigError("model JSON: states must be sorted lexicographically");
    for (const auto& e : j.at("edges")) {
      const auto a = e.at(0).get<size_t>(), b = e.at(1).get<size_t>();
      if (a >= m.states.size() || b >= m.states.size()) throw ConfigError("model JSON: edge index out of range");
      m.edges.emplace_back(a, b);
    }
    std::sort(m.edges.begin(), m.edges.end());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
}

std::string model_to_dot(const TrafficModel& m) {
  std::ostringstream os;
  os << "digraph " << kind_name(m.kind) << " {\n  rankdir=LR;\n";
  for (size_t i = 0; i < m.states.size(); ++i)
    os << "  n" << i << " [label=\"" << word_to_string(m.states[i]) << "\"];\n";
  for (const auto& [a, b] : m.edges) os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace petc
