#include "lrlab/report_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lrlab {

using nlohmann::json;

namespace {

/// Non-finite values become null; JSON has no inf.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json envelope_kinds(const std::array<std::vector<std::vector<double>>, 4>& a) {
  json out = json::object();
  for (int k = 0; k < 4; ++k) {
    json rows = json::array();
    for (const auto& r : a[static_cast<std::size_t>(k)]) rows.push_back(nums(r));
    out[to_string(static_cast<BlockKind>(k))] = rows;
  }
  return out;
}

json header(const char* kind) { return json{{"schema_version", kReportSchemaVersion}, {"report", kind}}; }

}  // namespace

json to_json(const BoundConstants& bc) {
  return json{{"inv_mass_sup", bc.inv_mass_sup}, {"nu_sup", bc.nu_sup}, {"d", bc.d},
              {"C_V", bc.C_V},                   {"psi_norm", bc.psi_norm}, {"norm_F", bc.norm_F},
              {"norm_F_unweighted", bc.norm_F_unweighted}, {"C_F", bc.C_F}, {"mu", bc.mu},
              {"C0", bc.C0},                     {"sqrt_C0", bc.sqrt_C0()}, {"provenance", bc.provenance}};
}

BoundConstants constants_from_json(const json& j) {
  BoundConstants bc;
  bc.inv_mass_sup = j.at("inv_mass_sup").get<double>();
  bc.nu_sup = j.at("nu_sup").get<double>();
  bc.d = j.at("d").get<int>();
  bc.C_V = j.at("C_V").get<double>();
  bc.psi_norm = j.at("psi_norm").get<double>();
  bc.norm_F = j.at("norm_F").get<double>();
  bc.norm_F_unweighted = j.at("norm_F_unweighted").get<double>();
  bc.C_F = j.at("C_F").get<double>();
  bc.mu = j.at("mu").get<double>();
  bc.C0 = j.at("C0").get<double>();
  if (j.contains("provenance")) bc.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
  return bc;
}

json to_json(const AssumptionReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return json{{"all_passed", r.all_passed()}, {"inf_inv_mass", r.inf_inv_mass}, {"sup_inv_mass", r.sup_inv_mass},
              {"inf_nu", r.inf_nu},           {"sup_nu", r.sup_nu},             {"psi_norm", num(r.psi_norm)},
              {"checks", checks}};
}

json to_json(const SamplerSpec& s) {
  return json{{"n", s.n}, {"radius", s.radius}, {"seed", s.seed}, {"refine", s.refine}};
}

json to_json(const LRReport& r) {
  json j = header("lr");
  j["verdict"] = r.pass ? "pass" : "fail";
  j["note"] =
      "measured LHS is a sampled lower estimate of the supremum; a pass is necessary but not sufficient evidence";
  j["volume"] = r.volume.sites();
  j["X"] = r.X.sites();
  j["Y"] = r.Y.sites();
  j["f"] = r.f_desc;
  j["g"] = r.g_desc;
  j["f_c1"] = r.f_c1;
  j["g_c1"] = r.g_c1;
  j["D_XY"] = r.D_XY;
  j["dist_XY"] = r.dist_XY;
  j["constants"] = to_json(r.constants);
  j["sampler"] = to_json(r.sampler);
  j["lhs_inflation"] = r.lhs_inflation;
  j["times"] = nums(r.times);
  j["lhs_measured"] = nums(r.lhs);
  j["lhs_unrefined"] = nums(r.lhs_sample);
  j["rhs_sinh"] = nums(r.rhs_sinh);
  j["rhs_exp"] = nums(r.rhs_exp);
  j["rhs_corollary_best_mu"] = nums(r.rhs_corollary);
  j["best_mu"] = nums(r.best_mu);
  j["velocity"] = nums(r.velocity);
  j["margin"] = nums(r.margin);
  double worst = std::numeric_limits<double>::infinity();
  for (double m : r.margin) worst = std::min(worst, m);
  j["worst_margin"] = num(worst);
  j["lhs_at_zero"] = r.lhs_at_zero;
  j["onset_time"] = num(r.onset_time);
  return j;
}

json to_json(const OnsetReport& r) {
  json j = header("onset");
  j["verdict"] = r.monotone ? "pass" : "fail";
  j["times"] = nums(r.times);
  j["sampler"] = to_json(r.sampler);
  json targets = json::array();
  for (std::size_t i = 0; i < r.targets.size(); ++i)
    targets.push_back(
        {{"Y", r.targets[i].sites()}, {"dist", r.dist[i]}, {"onset_time", num(r.onset[i])}, {"lhs", nums(r.lhs[i])}});
  j["targets"] = targets;
  return j;
}

json to_json(const EnvelopeReport& r) {
  json j = header("envelope");
  j["verdict"] = r.pass ? "pass" : "fail";
  j["volume"] = r.volume.sites();
  j["times"] = nums(r.times);
  json pairs = json::array();
  for (const auto& [a, b] : r.pairs) pairs.push_back({a, b});
  j["pairs"] = pairs;
  j["measured"] = envelope_kinds(r.measured);
  j["envelope"] = envelope_kinds(r.envelope);
  json wm = json::object();
  for (int k = 0; k < 4; ++k) wm[to_string(static_cast<BlockKind>(k))] = num(r.worst_margin[static_cast<std::size_t>(k)]);
  j["worst_margin"] = wm;
  json wr = json::object();
  for (int k = 0; k < 4; ++k) wr[to_string(static_cast<BlockKind>(k))] = num(r.worst_ratio[static_cast<std::size_t>(k)]);
  j["worst_ratio"] = wr;
  j["violations"] = r.violations;
  j["failed_samples"] = r.failed_samples;
  j["constants"] = to_json(r.constants);
  j["sampler"] = to_json(r.sampler);
  return j;
}

json to_json(const ConvergenceReport& r) {
  json j = header("convergence");
  j["verdict"] = r.consistent ? "consistent" : "inconsistent";
  json vols = json::array();
  for (const auto& v : r.volumes) vols.push_back(v.sites());
  j["volumes"] = vols;
  j["X"] = r.X.sites();
  j["times"] = nums(r.times);
  json diff = json::array();
  for (const auto& d : r.diff) diff.push_back(nums(d));
  j["diff"] = diff;
  j["sup_diff"] = nums(r.sup_diff);
  j["tail_D"] = nums(r.tail_D);
  j["bound"] = nums(r.bound);
  j["C0"] = r.C0;
  j["C_harm"] = r.C_harm;
  j["prefactor"] = r.prefactor;
  j["slack"] = r.slack;
  j["strictly_decreasing"] = r.strictly_decreasing;
  j["below_bound"] = r.below_bound;
  j["decay_ratio_ok"] = r.decay_ratio_ok;
  j["sampler"] = to_json(r.sampler);
  return j;
}

json to_json(const InteractionPictureReport& r) {
  json j = header("interaction_picture");
  j["verdict"] = r.pass ? "pass" : "fail";
  j["volume"] = r.volume.sites();
  j["times"] = nums(r.times);
  j["discrepancy"] = nums(r.discrepancy);
  j["gamma_deviation"] = nums(r.gamma_deviation);
  j["tolerance"] = r.tolerance;
  j["sampler"] = to_json(r.sampler);
  return j;
}

RhsInputs rhs_inputs(const LRReport& r) { return {r.constants, r.f_c1, r.g_c1, r.D_XY}; }

json to_json(const RhsInputs& in) {
  json j = header("constants");
  j["constants"] = to_json(in.constants);
  j["f_c1"] = in.f_c1;
  j["g_c1"] = in.g_c1;
  j["D_XY"] = in.D_XY;
  return j;
}

RhsInputs rhs_inputs_from_json(const json& j) {
  RhsInputs in;
  in.constants = constants_from_json(j.at("constants"));
  in.f_c1 = j.at("f_c1").get<double>();
  in.g_c1 = j.at("g_c1").get<double>();
  in.D_XY = j.at("D_XY").get<double>();
  return in;
}

std::string lr_csv(const LRReport& r) {
  std::ostringstream os;
  os << "t,lhs_measured,rhs_sinh,rhs_exp,rhs_corollary_best_mu\n";
  for (std::size_t n = 0; n < r.times.size(); ++n)
    os << csv_num(r.times[n]) << ',' << csv_num(r.lhs[n]) << ',' << csv_num(r.rhs_sinh[n]) << ','
       << csv_num(r.rhs_exp[n]) << ','
       << (n < r.rhs_corollary.size() ? csv_num(r.rhs_corollary[n]) : std::string("nan")) << '\n';
  return os.str();
}

std::string onset_csv(const OnsetReport& r) {
  std::ostringstream os;
  os << "dist,target,t,lhs_measured\n";
  for (std::size_t i = 0; i < r.targets.size(); ++i) {
    std::string tgt;
    for (int s : r.targets[i]) tgt += (tgt.empty() ? "" : " ") + std::to_string(s);
    for (std::size_t n = 0; n < r.times.size(); ++n)
      os << csv_num(r.dist[i]) << ',' << tgt << ',' << csv_num(r.times[n]) << ',' << csv_num(r.lhs[i][n]) << '\n';
  }
  return os.str();
}

std::string envelope_csv(const EnvelopeReport& r) {
  std::ostringstream os;
  os << "kind,j,k,t,measured,envelope\n";
  for (int k = 0; k < 4; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t p = 0; p < r.pairs.size(); ++p)
      for (std::size_t n = 0; n < r.times.size(); ++n)
        os << to_string(static_cast<BlockKind>(k)) << ',' << r.pairs[p].first << ',' << r.pairs[p].second << ','
           << csv_num(r.times[n]) << ',' << csv_num(r.measured[kk][p][n]) << ',' << csv_num(r.envelope[kk][p][n])
           << '\n';
  }
  return os.str();
}

std::string convergence_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "step,inner_sites,outer_sites,t,sup_diff\n";
  for (std::size_t i = 0; i < r.diff.size(); ++i)
    for (std::size_t n = 0; n < r.times.size(); ++n)
      os << i << ',' << r.volumes[i].size() << ',' << r.volumes[i + 1].size() << ',' << csv_num(r.times[n]) << ','
         << csv_num(r.diff[i][n]) << '\n';
  return os.str();
}

std::string interaction_picture_csv(const InteractionPictureReport& r) {
  std::ostringstream os;
  os << "t,discrepancy,gamma_deviation\n";
  for (std::size_t n = 0; n < r.times.size(); ++n)
    os << csv_num(r.times[n]) << ',' << csv_num(r.discrepancy[n]) << ',' << csv_num(r.gamma_deviation[n]) << '\n';
  return os.str();
}

json run_metadata(const std::string& command, const std::string& config_path, const SamplerSpec& sampler) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ts;
  ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return json{{"command", command}, {"config", config_path}, {"timestamp_utc", ts.str()},
              {"workers", sampler.workers}, {"seed", sampler.seed}};
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return json::parse(in);
}

}  // namespace lrlab
