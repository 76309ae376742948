#include "lrlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lrlab/errors.hpp"

namespace lrlab {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Collects violations instead of stopping at the first one.
class Reader {
public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool is_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void known_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) error(join_path(path, k), "unknown key");
  }

  void read(const json& j, const std::string& path, double& out) {
    if (j.is_number()) out = j.get<double>();
    else error(path, "expected a number");
  }
  void read(const json& j, const std::string& path, int& out) {
    if (j.is_number_integer()) out = j.get<int>();
    else error(path, "expected an integer");
  }
  void read(const json& j, const std::string& path, std::uint64_t& out) {
    if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) out = j.get<std::uint64_t>();
    else error(path, "expected a non-negative integer");
  }
  void read(const json& j, const std::string& path, std::string& out) {
    if (j.is_string()) out = j.get<std::string>();
    else error(path, "expected a string");
  }
  template <class T>
  void read(const json& j, const std::string& path, std::vector<T>& out) {
    if (!j.is_array()) {
      error(path, "expected an array");
      return;
    }
    std::vector<T> v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) read(j[i], index_path(path, i), v[i]);
    out = std::move(v);
  }

  template <class T>
  void get(const json& obj, const char* key, const std::string& path, T& out) {
    if (obj.contains(key)) read(obj.at(key), join_path(path, key), out);
  }

  /// Scalar or array of numbers.
  void get_values(const json& obj, const char* key, const std::string& path, std::vector<double>& out) {
    if (!obj.contains(key)) return;
    const json& j = obj.at(key);
    if (j.is_number()) out = {j.get<double>()};
    else read(j, join_path(path, key), out);
  }

  void positive(const std::string& path, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) error(path, "must be > 0 (got " + fmt(v) + ")");
  }
  void non_negative(const std::string& path, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) error(path, "must be >= 0 (got " + fmt(v) + ")");
  }
};

void parse_sampler(Reader& r, const json& j, const std::string& path, SamplerSpec& s) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path, {"n", "radius", "seed", "refine", "workers"});
  r.get(j, "n", path, s.n);
  r.get(j, "radius", path, s.radius);
  r.get(j, "seed", path, s.seed);
  r.get(j, "refine", path, s.refine);
  r.get(j, "workers", path, s.workers);
  if (s.n < 1) r.error(join_path(path, "n"), "must be >= 1");
  r.positive(join_path(path, "radius"), s.radius);
  if (s.refine < 0) r.error(join_path(path, "refine"), "must be >= 0");
  if (s.workers < 0) r.error(join_path(path, "workers"), "must be >= 0 (0 = available parallelism)");
}

std::optional<SamplerSpec> parse_sampler_override(Reader& r, const json& parent, const std::string& path,
                                                  const SamplerSpec& base) {
  if (!parent.contains("sampler")) return std::nullopt;
  SamplerSpec s = base;
  parse_sampler(r, parent.at("sampler"), join_path(path, "sampler"), s);
  return s;
}

void parse_time_grid(Reader& r, const json& j, const std::string& path, TimeGrid& g) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path, {"min", "max", "count"});
  r.get(j, "min", path, g.min);
  r.get(j, "max", path, g.max);
  r.get(j, "count", path, g.count);
  if (g.count < 1) r.error(join_path(path, "count"), "must be >= 1");
  if (!std::isfinite(g.min) || !std::isfinite(g.max) || g.max < g.min) r.error(path, "need finite min <= max");
}

void parse_lattice(Reader& r, const json& j, const std::string& path, LatticeSpec& L) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path, {"family", "n", "origin", "nx", "ny", "coords", "dim", "box", "min_separation", "seed"});
  r.get(j, "family", path, L.family);
  r.get(j, "n", path, L.n);
  r.get(j, "origin", path, L.origin);
  r.get(j, "nx", path, L.nx);
  r.get(j, "ny", path, L.ny);
  r.get(j, "coords", path, L.coords);
  r.get(j, "dim", path, L.dim);
  r.get(j, "box", path, L.box);
  r.get(j, "min_separation", path, L.min_separation);
  r.get(j, "seed", path, L.seed);
  if (L.family == "chain") {
    if (L.n < 1) r.error(join_path(path, "n"), "must be >= 1");
  } else if (L.family == "grid") {
    if (L.nx < 1) r.error(join_path(path, "nx"), "must be >= 1");
    if (L.ny < 1) r.error(join_path(path, "ny"), "must be >= 1");
  } else if (L.family == "points") {
    if (L.coords.empty()) r.error(join_path(path, "coords"), "must list at least one point");
    for (std::size_t i = 0; i < L.coords.size(); ++i)
      if (L.coords[i].empty() || L.coords[i].size() != L.coords[0].size())
        r.error(index_path(join_path(path, "coords"), i), "all points need the same non-zero dimension");
  } else if (L.family == "random-points") {
    if (L.n < 1) r.error(join_path(path, "n"), "must be >= 1");
    if (L.dim < 1) r.error(join_path(path, "dim"), "must be >= 1");
    r.positive(join_path(path, "box"), L.box);
    r.non_negative(join_path(path, "min_separation"), L.min_separation);
  } else {
    r.error(join_path(path, "family"), "unknown lattice family '" + L.family + "' (chain, grid, points, random-points)");
  }
}

void parse_decay(Reader& r, const json& j, const std::string& path, DecaySpec& D) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path, {"family", "exponent", "rate", "r", "values"});
  r.get(j, "family", path, D.family);
  r.get(j, "exponent", path, D.exponent);
  r.get(j, "rate", path, D.rate);
  r.get(j, "r", path, D.table_r);
  r.get(j, "values", path, D.table_v);
  static const std::set<std::string> fams{"default", "power-law", "exp-power-law", "tabulated"};
  if (!fams.count(D.family)) r.error(join_path(path, "family"), "unknown decay family '" + D.family + "'");
  r.non_negative(join_path(path, "exponent"), D.exponent);
  r.non_negative(join_path(path, "rate"), D.rate);
  if (D.family == "tabulated") {
    try {
      DecayFunction::tabulated(D.table_r, D.table_v, D.rate);
    } catch (const DomainError& e) {
      r.error(path, e.what());
    }
  }
}

void parse_model(Reader& r, const json& j, const std::string& path, ModelSpec& M) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path, {"d", "masses", "force_constants", "potential", "strength", "r_cut"});
  r.get(j, "d", path, M.d);
  r.get_values(j, "masses", path, M.masses);
  r.get_values(j, "force_constants", path, M.force_constants);
  r.get(j, "strength", path, M.strength);
  r.get(j, "r_cut", path, M.r_cut);
  if (M.d < 1) r.error(join_path(path, "d"), "must be >= 1");
  auto check_all = [&](const char* key, const std::vector<double>& v) {
    const std::string p = join_path(path, key);
    if (v.empty()) r.error(p, "must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = j.contains(key) && j.at(key).is_array() ? index_path(p, i) : p;
      r.positive(pi, v[i]);
    }
  };
  check_all("masses", M.masses);
  check_all("force_constants", M.force_constants);
  if (!std::isfinite(M.strength) || M.strength < 0.0)
    r.error(join_path(path, "strength"), "must be finite and >= 0 (got " + fmt(M.strength) + ")");
  r.non_negative(join_path(path, "r_cut"), M.r_cut);
  if (j.contains("potential")) {
    const std::string pp = join_path(path, "potential");
    const json& pj = j.at("potential");
    if (r.is_object(pj, pp)) {
      r.known_keys(pj, pp, {"family", "radius", "r", "values"});
      r.get(pj, "family", pp, M.potential.family);
      r.get(pj, "radius", pp, M.potential.radius);
      r.get(pj, "r", pp, M.potential.table_r);
      r.get(pj, "values", pp, M.potential.table_v);
    }
    static const std::set<std::string> fams{"bump", "cosine-window", "tabulated", "zero"};
    if (!fams.count(M.potential.family))
      r.error(join_path(pp, "family"), "unknown potential family '" + M.potential.family + "'");
    if (M.potential.family == "bump" || M.potential.family == "cosine-window")
      r.positive(join_path(pp, "radius"), M.potential.radius);
    if (M.potential.family == "tabulated") {
      try {
        PairPotential::tabulated(M.potential.table_r, M.potential.table_v, std::max(1, M.d));
      } catch (const DomainError& e) {
        r.error(pp, e.what());
      }
    }
  }
}

void parse_observable(Reader& r, const json& j, const std::string& path, ObservableSpec& O) {
  if (!r.is_object(j, path)) return;
  r.known_keys(j, path,
               {"kind", "sites", "site", "sigma", "center_p", "center_q", "lambda", "part", "direction_p",
                "direction_q", "component", "coordinate"});
  r.get(j, "kind", path, O.kind);
  r.get(j, "sites", path, O.sites);
  if (j.contains("site")) {
    int s = 0;
    r.read(j.at("site"), join_path(path, "site"), s);
    O.sites = {s};
  }
  r.get(j, "sigma", path, O.sigma);
  r.get(j, "center_p", path, O.center_p);
  r.get(j, "center_q", path, O.center_q);
  r.get(j, "lambda", path, O.lambda);
  r.get(j, "part", path, O.part);
  r.get(j, "direction_p", path, O.direction_p);
  r.get(j, "direction_q", path, O.direction_q);
  r.get(j, "component", path, O.component);
  r.get(j, "coordinate", path, O.coordinate);
  if (O.kind == "gaussian-levee" || O.kind == "coordinate-window") {
    r.positive(join_path(path, "sigma"), O.sigma);
  } else if (O.kind == "resolvent") {
    if (O.lambda == 0.0 || !std::isfinite(O.lambda)) r.error(join_path(path, "lambda"), "must be non-zero");
    if (O.part != "real" && O.part != "imag") r.error(join_path(path, "part"), "must be 'real' or 'imag'");
  } else {
    r.error(join_path(path, "kind"), "unknown observable kind '" + O.kind + "'");
  }
  if (O.kind == "coordinate-window") {
    if (O.sites.size() != 1) r.error(join_path(path, "site"), "coordinate-window needs exactly one site");
    if (O.coordinate != "p" && O.coordinate != "q") r.error(join_path(path, "coordinate"), "must be 'p' or 'q'");
  }
}

int lattice_size(const LatticeSpec& L) {
  if (L.family == "chain" || L.family == "random-points") return L.n;
  if (L.family == "grid") return L.nx * L.ny;
  if (L.family == "points") return static_cast<int>(L.coords.size());
  return -1;
}

void check_sites(Reader& r, const std::vector<int>& sites, int n, const std::string& path) {
  if (sites.empty()) r.error(path, "must list at least one site");
  if (n < 0) return;
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (sites[i] < 0 || sites[i] >= n)
      r.error(index_path(path, i), "site " + std::to_string(sites[i]) + " does not exist (lattice has " +
                                       std::to_string(n) + " sites)");
}

void check_observable_sites(Reader& r, const ObservableSpec& O, int n, int d, const std::string& path) {
  check_sites(r, O.sites, n, join_path(path, "sites"));
  const std::size_t dof = SiteSet(O.sites).size() * static_cast<std::size_t>(std::max(1, d));
  auto len = [&](const std::vector<double>& v, const char* key) {
    if (!v.empty() && v.size() != dof)
      r.error(join_path(path, key), "needs " + std::to_string(dof) + " entries (sites x d)");
  };
  len(O.center_p, "center_p");
  len(O.center_q, "center_q");
  len(O.direction_p, "direction_p");
  len(O.direction_q, "direction_q");
  if (O.kind == "resolvent") {
    double nrm = 0.0;
    for (double v : O.direction_p) nrm += v * v;
    for (double v : O.direction_q) nrm += v * v;
    if (!(nrm > 0.0)) r.error(path, "resolvent direction must be non-zero");
  }
  if (O.kind == "coordinate-window" && (O.component < 0 || O.component >= d))
    r.error(join_path(path, "component"), "must be in [0, d)");
}

}  // namespace

ExperimentConfig parse_config_json(const json& j) {
  Reader r;
  ExperimentConfig c;
  if (!r.is_object(j, "<root>")) throw ConfigError(r.errors);
  r.known_keys(j, "", {"schema_version", "name", "lattice", "decay", "model", "dynamics", "sampler", "lr", "envelope",
                       "convergence", "interaction_picture", "output"});
  if (!j.contains("schema_version")) r.error("schema_version", "missing (expected " + std::to_string(kSchemaVersion) + ")");
  r.get(j, "schema_version", "", c.schema_version);
  if (c.schema_version != kSchemaVersion)
    r.error("schema_version", "unsupported version " + std::to_string(c.schema_version) + " (expected " +
                                  std::to_string(kSchemaVersion) + ")");
  r.get(j, "name", "", c.name);
  if (j.contains("lattice")) parse_lattice(r, j.at("lattice"), "lattice", c.lattice);
  if (j.contains("decay")) parse_decay(r, j.at("decay"), "decay", c.decay);
  if (j.contains("model")) parse_model(r, j.at("model"), "model", c.model);
  if (j.contains("dynamics")) {
    const json& dj = j.at("dynamics");
    if (r.is_object(dj, "dynamics")) {
      r.known_keys(dj, "dynamics", {"integrator", "h"});
      std::string integ = to_string(c.dynamics.integrator);
      r.get(dj, "integrator", "dynamics", integ);
      try {
        c.dynamics.integrator = integrator_from_string(integ);
      } catch (const DomainError& e) {
        r.error("dynamics.integrator", e.what());
      }
      r.get(dj, "h", "dynamics", c.dynamics.h);
      r.positive("dynamics.h", c.dynamics.h);
    }
  }
  if (j.contains("sampler")) parse_sampler(r, j.at("sampler"), "sampler", c.sampler);
  if (j.contains("output")) {
    const json& oj = j.at("output");
    if (r.is_object(oj, "output")) {
      r.known_keys(oj, "output", {"dir"});
      r.get(oj, "dir", "output", c.output_dir);
    }
  }

  const int n = lattice_size(c.lattice);
  const int d = c.model.d;
  auto check_per_site = [&](const std::vector<double>& v, const char* key) {
    if (n > 0 && v.size() != 1 && static_cast<int>(v.size()) != n)
      r.error(join_path("model", key), "needs one value or one per site (" + std::to_string(n) + ")");
  };
  check_per_site(c.model.masses, "masses");
  check_per_site(c.model.force_constants, "force_constants");

  if (j.contains("lr")) {
    const json& lj = j.at("lr");
    LRSpec L;
    if (r.is_object(lj, "lr")) {
      r.known_keys(lj, "lr", {"f", "g", "times", "mu", "onset"});
      if (lj.contains("f")) parse_observable(r, lj.at("f"), "lr.f", L.f);
      else r.error("lr.f", "missing");
      if (lj.contains("g")) parse_observable(r, lj.at("g"), "lr.g", L.g);
      else r.error("lr.g", "missing");
      if (lj.contains("times")) parse_time_grid(r, lj.at("times"), "lr.times", L.times);
      if (lj.contains("mu")) {
        const json& mj = lj.at("mu");
        if (r.is_object(mj, "lr.mu")) {
          r.known_keys(mj, "lr.mu", {"count", "min", "max"});
          r.get(mj, "count", "lr.mu", L.mu_count);
          r.get(mj, "min", "lr.mu", L.mu_min);
          r.get(mj, "max", "lr.mu", L.mu_max);
          if (L.mu_count < 1) r.error("lr.mu.count", "must be >= 1");
          r.positive("lr.mu.min", L.mu_min);
          if (!(L.mu_max >= L.mu_min)) r.error("lr.mu.max", "must be >= lr.mu.min");
        }
      }
      if (lj.contains("onset")) {
        const json& oj = lj.at("onset");
        if (r.is_object(oj, "lr.onset")) {
          r.known_keys(oj, "lr.onset", {"Y", "times", "sampler"});
          r.get(oj, "Y", "lr.onset", L.onset_Y);
          if (oj.contains("times")) parse_time_grid(r, oj.at("times"), "lr.onset.times", L.onset_times);
          L.onset_sampler = parse_sampler_override(r, oj, "lr.onset", c.sampler);
        }
      }
      check_observable_sites(r, L.f, n, d, "lr.f");
      check_observable_sites(r, L.g, n, d, "lr.g");
      const SiteSet X(L.f.sites), Y(L.g.sites);
      if (!X.empty() && !Y.empty() && !X.disjoint_from(Y))
        r.error("lr", "supports of f and g overlap; the lr experiment needs disjoint supports with dist(X,Y) > 0");
      for (std::size_t i = 0; i < L.onset_Y.size(); ++i) {
        const std::string p = index_path("lr.onset.Y", i);
        check_sites(r, L.onset_Y[i], n, p);
        if (!X.disjoint_from(SiteSet(L.onset_Y[i]))) r.error(p, "overlaps the support of f");
      }
    }
    c.lr = L;
  }

  if (j.contains("envelope")) {
    const json& ej = j.at("envelope");
    EnvelopeSpec E;
    if (r.is_object(ej, "envelope")) {
      r.known_keys(ej, "envelope", {"times", "pairs", "sampler"});
      if (ej.contains("times")) parse_time_grid(r, ej.at("times"), "envelope.times", E.times);
      if (ej.contains("pairs")) {
        std::vector<std::vector<int>> raw;
        r.get(ej, "pairs", "envelope", raw);
        for (std::size_t i = 0; i < raw.size(); ++i) {
          const std::string p = index_path("envelope.pairs", i);
          if (raw[i].size() != 2) {
            r.error(p, "expected [j, k]");
            continue;
          }
          check_sites(r, raw[i], n, p);
          if (raw[i][0] == raw[i][1]) r.error(p, "pairs must be off-diagonal (j != k)");
          E.pairs.emplace_back(raw[i][0], raw[i][1]);
        }
      }
      E.sampler = parse_sampler_override(r, ej, "envelope", c.sampler);
    }
    c.envelope = E;
  }

  if (j.contains("convergence")) {
    const json& cj = j.at("convergence");
    ConvergenceSpec C;
    if (r.is_object(cj, "convergence")) {
      r.known_keys(cj, "convergence", {"lattice", "X", "X_points", "radii", "T", "count", "f", "sampler"});
      if (cj.contains("lattice")) {
        LatticeSpec L;
        parse_lattice(r, cj.at("lattice"), "convergence.lattice", L);
        C.lattice = L;
      }
      r.get(cj, "X", "convergence", C.X);
      r.get(cj, "X_points", "convergence", C.X_points);
      r.get(cj, "radii", "convergence", C.radii);
      r.get(cj, "T", "convergence", C.T);
      r.get(cj, "count", "convergence", C.count);
      if (cj.contains("f")) parse_observable(r, cj.at("f"), "convergence.f", C.f);
      C.sampler = parse_sampler_override(r, cj, "convergence", c.sampler);
      const int cn = C.lattice ? lattice_size(*C.lattice) : n;
      if (C.X.empty() && C.X_points.empty()) r.error("convergence.X", "give X (site ids) or X_points (coordinates)");
      if (!C.X.empty()) check_sites(r, C.X, cn, "convergence.X");
      if (C.radii.size() < 2) r.error("convergence.radii", "need at least two radii");
      for (std::size_t i = 0; i < C.radii.size(); ++i) {
        r.non_negative(index_path("convergence.radii", i), C.radii[i]);
        if (i > 0 && !(C.radii[i] > C.radii[i - 1])) r.error(index_path("convergence.radii", i), "radii must increase");
      }
      if (!std::isfinite(C.T)) r.error("convergence.T", "must be finite");
      if (C.count < 1) r.error("convergence.count", "must be >= 1");
      if (C.lattice && cn > 0) {
        auto uniform = [&](const std::vector<double>& v, const char* key) {
          if (v.size() != 1 && static_cast<int>(v.size()) != cn)
            r.error(join_path("model", key), "must be uniform or match the convergence lattice");
        };
        uniform(c.model.masses, "masses");
        uniform(c.model.force_constants, "force_constants");
      }
    }
    c.convergence = C;
  }

  if (j.contains("interaction_picture")) {
    const json& ij = j.at("interaction_picture");
    InteractionPictureSpec I;
    if (r.is_object(ij, "interaction_picture")) {
      r.known_keys(ij, "interaction_picture", {"times", "f", "sampler"});
      r.get(ij, "times", "interaction_picture", I.times);
      if (ij.contains("f")) parse_observable(r, ij.at("f"), "interaction_picture.f", I.f);
      else r.error("interaction_picture.f", "missing");
      check_observable_sites(r, I.f, n, d, "interaction_picture.f");
      I.sampler = parse_sampler_override(r, ij, "interaction_picture", c.sampler);
    }
    c.interaction_picture = I;
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError({source + ": malformed JSON: " + e.what()});
  }
  try {
    return parse_config_json(j);
  } catch (const ConfigError& e) {
    std::vector<std::string> v;
    for (const auto& s : e.violations()) v.push_back(source + ": " + s);
    throw ConfigError(v);
  }
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Builders

Lattice build_lattice(const LatticeSpec& L) {
  if (L.family == "chain") return Lattice::chain(L.n, L.origin);
  if (L.family == "grid") return Lattice::grid(L.nx, L.ny);
  if (L.family == "points") {
    Mat c(static_cast<Eigen::Index>(L.coords.size()), static_cast<Eigen::Index>(L.coords.front().size()));
    for (std::size_t i = 0; i < L.coords.size(); ++i)
      for (std::size_t k = 0; k < L.coords[i].size(); ++k)
        c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = L.coords[i][k];
    return Lattice::from_points(std::move(c));
  }
  if (L.family == "random-points") return Lattice::random_points(L.n, L.dim, L.box, L.min_separation, L.seed);
  throw DomainError("unknown lattice family '" + L.family + "'");
}

DecayFunction build_decay(const DecaySpec& D, int embedding_dim) {
  if (D.family == "default") return DecayFunction::default_for_dimension(embedding_dim, D.rate);
  if (D.family == "power-law") return DecayFunction::power_law(D.exponent);
  if (D.family == "exp-power-law") return DecayFunction::exp_power_law(D.exponent, D.rate);
  if (D.family == "tabulated") return DecayFunction::tabulated(D.table_r, D.table_v, D.rate);
  throw DomainError("unknown decay family '" + D.family + "'");
}

PairPotential build_potential(const PotentialSpec& P, int d) {
  if (P.family == "bump") return PairPotential::bump(1.0, P.radius, d);
  if (P.family == "cosine-window") return PairPotential::cosine_window(1.0, P.radius, d);
  if (P.family == "tabulated") return PairPotential::tabulated(P.table_r, P.table_v, d);
  if (P.family == "zero") return PairPotential::zero(d);
  throw DomainError("unknown potential family '" + P.family + "'");
}

LatticeModel build_model(const ExperimentConfig& cfg, const Lattice& lattice) {
  const int n = lattice.size();
  auto expand = [&](const std::vector<double>& v) {
    if (v.size() == 1) return Vec::Constant(n, v[0]).eval();
    if (static_cast<int>(v.size()) != n) throw DomainError("per-site values do not match the lattice size");
    return Eigen::Map<const Vec>(v.data(), n).eval();
  };
  return LatticeModel::with_decay_couplings(lattice, build_decay(cfg.decay, lattice.embedding_dim()), cfg.model.d,
                                            expand(cfg.model.masses), expand(cfg.model.force_constants),
                                            build_potential(cfg.model.potential, cfg.model.d), cfg.model.strength,
                                            cfg.model.r_cut);
}

LatticeModel build_model(const ExperimentConfig& cfg) { return build_model(cfg, build_lattice(cfg.lattice)); }

Observable build_observable(const ObservableSpec& O, int d) {
  const SiteSet X(O.sites);
  const auto dof = static_cast<Eigen::Index>(X.size()) * d;
  auto vec = [&](const std::vector<double>& v) {
    if (v.empty()) return Vec::Zero(dof).eval();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())).eval();
  };
  if (O.kind == "gaussian-levee") return Observable::gaussian_levee(X, d, vec(O.center_p), vec(O.center_q), O.sigma);
  if (O.kind == "resolvent")
    return Observable::resolvent(X, d, vec(O.direction_p), vec(O.direction_q), O.lambda,
                                 O.part == "imag" ? ResolventPart::Imag : ResolventPart::Real);
  if (O.kind == "coordinate-window")
    return Observable::coordinate_window(X[0], O.component, O.coordinate == "p" ? Coordinate::P : Coordinate::Q, d,
                                         O.sigma);
  throw DomainError("unknown observable kind '" + O.kind + "'");
}

ConvergenceSetup build_convergence(const ExperimentConfig& cfg) {
  if (!cfg.convergence) throw DomainError("config has no convergence section");
  const ConvergenceSpec& C = *cfg.convergence;
  const Lattice lat = build_lattice(C.lattice ? *C.lattice : cfg.lattice);
  std::vector<int> xs = C.X;
  for (const auto& pt : C.X_points) {
    const auto s = lat.find_site(Eigen::Map<const Vec>(pt.data(), static_cast<Eigen::Index>(pt.size())));
    if (!s) throw DomainError("convergence.X_points: no site at the given coordinates");
    xs.push_back(*s);
  }
  const SiteSet X(xs);
  ObservableSpec fs = C.f;
  if (fs.sites.empty()) fs.sites = xs;
  std::vector<SiteSet> volumes;
  for (double r : C.radii) {
    SiteSet v;
    for (int x : X) v = v.set_union(lat.ball(x, r));
    volumes.push_back(v);
  }
  return {build_model(cfg, lat), std::move(volumes), build_observable(fs, cfg.model.d)};
}

}  // namespace lrlab
