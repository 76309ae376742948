#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrlab/experiments.hpp"

namespace lrlab {

inline constexpr int kSchemaVersion = 1;

struct LatticeSpec {
  std::string family = "chain";  ///< chain | grid | points | random-points
  int n = 8;
  int origin = 0;
  int nx = 1, ny = 1;
  std::vector<std::vector<double>> coords;  ///< points
  int dim = 2;                              ///< random-points
  double box = 1.0;
  double min_separation = 0.0;
  std::uint64_t seed = 1;
};

struct DecaySpec {
  std::string family = "default";  ///< default | power-law | exp-power-law | tabulated
  double exponent = 2.0;
  double rate = 0.0;
  std::vector<double> table_r, table_v;
};

struct PotentialSpec {
  std::string family = "bump";  ///< bump | cosine-window | tabulated | zero
  double radius = 1.5;
  std::vector<double> table_r, table_v;
};

struct ModelSpec {
  int d = 1;
  std::vector<double> masses{1.0};           ///< one value (uniform) or one per site
  std::vector<double> force_constants{1.0};  ///< one value (uniform) or one per site
  PotentialSpec potential;
  double strength = 1.0;
  double r_cut = 2.0;
};

struct ObservableSpec {
  std::string kind = "gaussian-levee";  ///< gaussian-levee | resolvent | coordinate-window
  std::vector<int> sites;
  double sigma = 1.0;
  std::vector<double> center_p, center_q;        ///< gaussian; empty means zero
  double lambda = 1.0;                           ///< resolvent
  std::string part = "real";                     ///< resolvent
  std::vector<double> direction_p, direction_q;  ///< resolvent; empty means zero
  int component = 0;                             ///< coordinate-window
  std::string coordinate = "q";                  ///< coordinate-window
};

struct TimeGrid {
  double min = 0.0;
  double max = 1.0;
  int count = 11;
  std::vector<double> values() const { return linspace(min, max, count); }
};

struct LRSpec {
  ObservableSpec f, g;
  TimeGrid times{-2.0, 2.0, 21};
  int mu_count = 16;
  double mu_min = 1e-2, mu_max = 10.0;
  std::vector<std::vector<int>> onset_Y;  ///< empty disables the onset sweep
  TimeGrid onset_times{0.0, 3.0, 31};
  std::optional<SamplerSpec> onset_sampler;
};

struct EnvelopeSpec {
  TimeGrid times{0.0, 2.0, 11};
  std::vector<std::pair<int, int>> pairs;  ///< empty means every off-diagonal pair
  std::optional<SamplerSpec> sampler;
};

struct ConvergenceSpec {
  std::optional<LatticeSpec> lattice;  ///< defaults to the main lattice
  std::vector<int> X;
  std::vector<std::vector<double>> X_points;  ///< alternative to X, by coordinates
  std::vector<double> radii{2, 4, 8, 16};
  double T = 1.0;
  int count = 11;
  ObservableSpec f;
  std::optional<SamplerSpec> sampler;
};

struct InteractionPictureSpec {
  std::vector<double> times{0.5, 1.0};
  ObservableSpec f;
  std::optional<SamplerSpec> sampler;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name = "unnamed";
  LatticeSpec lattice;
  DecaySpec decay;
  ModelSpec model;
  StepOptions dynamics;
  SamplerSpec sampler;
  std::optional<LRSpec> lr;
  std::optional<EnvelopeSpec> envelope;
  std::optional<ConvergenceSpec> convergence;
  std::optional<InteractionPictureSpec> interaction_picture;
  std::string output_dir = "out";
};

/// Parses and validates; on failure throws ConfigError listing every violation with its key path.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<string>");
ExperimentConfig parse_config_json(const nlohmann::json& j);

Lattice build_lattice(const LatticeSpec& spec);
DecayFunction build_decay(const DecaySpec& spec, int embedding_dim);
PairPotential build_potential(const PotentialSpec& spec, int d);
LatticeModel build_model(const ExperimentConfig& cfg, const Lattice& lattice);
LatticeModel build_model(const ExperimentConfig& cfg);
Observable build_observable(const ObservableSpec& spec, int d);

/// Nested volumes for the convergence experiment: balls of each radius around the support of f.
struct ConvergenceSetup {
  LatticeModel model;
  std::vector<SiteSet> volumes;
  Observable f;
};
ConvergenceSetup build_convergence(const ExperimentConfig& cfg);

}  // namespace lrlab
