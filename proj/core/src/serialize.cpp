#include "nuqs/serialize.hpp"

#include <cstdint>
#include <cstdio>

namespace nuqs {

using nlohmann::json;

void to_json(json& j, const ProbeState& s) {
  j = {{"R", s.R}, {"theta", s.theta}, {"r", s.r}, {"psi", s.psi}};
}

void from_json(const json& j, ProbeState& s) {
  j.at("R").get_to(s.R);
  j.at("theta").get_to(s.theta);
  j.at("r").get_to(s.r);
  j.at("psi").get_to(s.psi);
}

void to_json(json& j, const QuadratureStats& s) {
  j = {{"mu", s.mu}, {"v", s.v}};
}

void to_json(json& j, const Medium& m) { j = {{"T", m.T}, {"n_sat", m.n_sat}}; }

void from_json(const json& j, Medium& m) {
  j.at("T").get_to(m.T);
  j.at("n_sat").get_to(m.n_sat);
}

void to_json(json& j, const Response& r) {
  j = {{"phi", r.phi}, {"xi", r.xi}, {"gamma_bar", r.gamma_bar}};
}

void to_json(json& j, const FisherBreakdown& f) {
  j = {{"value", f.value}, {"mean_term", f.mean_term}, {"var_term", f.var_term}};
}

void to_json(json& j, const SearchBounds& b) {
  j = {{"nbar_max", b.nbar_max}, {"r_max", b.r_max}, {"delta_max", b.delta_max}};
}

void from_json(const json& j, SearchBounds& b) {
  j.at("nbar_max").get_to(b.nbar_max);
  j.at("r_max").get_to(b.r_max);
  j.at("delta_max").get_to(b.delta_max);
}

// threads is left out: results do not depend on it.
void to_json(json& j, const OptimizerConfig& c) {
  json seeds = json::array();
  for (const auto& s : c.extra_seeds) {
    seeds.push_back({{"state", s.state}, {"delta_bar", s.delta_bar}});
  }
  j = {{"bounds", c.bounds},
       {"tolerances",
        {{"tol_R", c.tolerances.tol_R},
         {"tol_r", c.tolerances.tol_r},
         {"tol_delta", c.tolerances.tol_delta}}},
       {"quasi_random_starts", c.quasi_random_starts},
       {"diameter_tol", c.diameter_tol},
       {"iterations_per_dim", c.iterations_per_dim},
       {"min_agreeing_starts", c.min_agreeing_starts},
       {"agreement_rel_tol", c.agreement_rel_tol},
       {"boundary_fraction", c.boundary_fraction},
       {"extra_seeds", seeds}};
}

void to_json(json& j, const OptimizationResult& r) {
  j = {{"family", to_string(r.family)},
       {"target", to_string(r.target)},
       {"medium", r.medium},
       {"value", r.value},
       {"state", r.state},
       {"delta_bar", r.delta_bar},
       {"nbar", r.nbar},
       {"regime", to_string(r.regime)},
       {"boundary_flag", r.boundary_flag},
       {"starts_agreeing", r.starts_agreeing},
       {"starts_total", r.starts_total},
       {"status", to_string(r.status)}};
}

void to_json(json& j, const AdvantageResult& a) {
  j = {{"I_sq", a.i_sq},
       {"I_coh", a.i_coh},
       {"advantage", a.advantage},
       {"boundary_flag", a.sq_result.boundary_flag || a.coh_result.boundary_flag},
       {"squeezed", a.sq_result},
       {"coherent", a.coh_result}};
}

void to_json(json& j, const AxisSpec& a) {
  j = {{"min", a.min}, {"max", a.max}, {"points", a.points}};
}

void from_json(const json& j, AxisSpec& a) {
  j.at("min").get_to(a.min);
  j.at("max").get_to(a.max);
  j.at("points").get_to(a.points);
}

void to_json(json& j, const GridSpec& g) {
  j = {{"n_sat", g.n_sat}, {"T", g.T}, {"target", to_string(g.target)}};
}

void from_json(const json& j, GridSpec& g) {
  j.at("n_sat").get_to(g.n_sat);
  j.at("T").get_to(g.T);
  g.target = parse_target(j.at("target").get<std::string>());
}

void to_json(json& j, const SweepCell& c) {
  j = {{"n_sat", c.n_sat},
       {"T", c.T},
       {"target", to_string(c.target)},
       {"I_coh", c.i_coh},
       {"I_sq", c.i_sq},
       {"advantage", c.advantage},
       {"R", c.state.R},
       {"theta", c.state.theta},
       {"r", c.state.r},
       {"psi", c.state.psi},
       {"delta_bar", c.delta_bar},
       {"nbar", c.nbar},
       {"regime", to_string(c.regime)},
       {"boundary_flag", c.boundary_flag},
       {"coh_R", c.coh_state.R},
       {"coh_theta", c.coh_state.theta},
       {"coh_r", c.coh_state.r},
       {"coh_psi", c.coh_state.psi},
       {"coh_delta_bar", c.coh_delta_bar},
       {"coh_nbar", c.coh_nbar},
       {"status", c.status}};
}

void from_json(const json& j, SweepCell& c) {
  j.at("n_sat").get_to(c.n_sat);
  j.at("T").get_to(c.T);
  c.target = parse_target(j.at("target").get<std::string>());
  j.at("I_coh").get_to(c.i_coh);
  j.at("I_sq").get_to(c.i_sq);
  j.at("advantage").get_to(c.advantage);
  j.at("R").get_to(c.state.R);
  j.at("theta").get_to(c.state.theta);
  j.at("r").get_to(c.state.r);
  j.at("psi").get_to(c.state.psi);
  j.at("delta_bar").get_to(c.delta_bar);
  j.at("nbar").get_to(c.nbar);
  c.regime = parse_regime(j.at("regime").get<std::string>());
  j.at("boundary_flag").get_to(c.boundary_flag);
  j.at("coh_R").get_to(c.coh_state.R);
  j.at("coh_theta").get_to(c.coh_state.theta);
  j.at("coh_r").get_to(c.coh_state.r);
  j.at("coh_psi").get_to(c.coh_state.psi);
  j.at("coh_delta_bar").get_to(c.coh_delta_bar);
  j.at("coh_nbar").get_to(c.coh_nbar);
  j.at("status").get_to(c.status);
}

void to_json(json& j, const SweepTable& t) {
  j = {{"metadata",
        {{"config_hash", t.metadata.config_hash},
         {"tool_version", t.metadata.tool_version},
         {"timestamp", t.metadata.timestamp}}},
       {"grid", t.grid},
       {"cells", t.cells}};
}

void from_json(const json& j, SweepTable& t) {
  const json& m = j.at("metadata");
  m.at("config_hash").get_to(t.metadata.config_hash);
  m.at("tool_version").get_to(t.metadata.tool_version);
  m.at("timestamp").get_to(t.metadata.timestamp);
  j.at("grid").get_to(t.grid);
  j.at("cells").get_to(t.cells);
}

void to_json(json& j, const SimConfig& c) {
  j = {{"n_samples", c.n_samples},
       {"n_repetitions", c.n_repetitions},
       {"seed", c.seed},
       {"target", to_string(c.target)},
       {"true_value", c.true_value ? json(*c.true_value) : json(nullptr)},
       {"bracket_lo", c.bracket_lo ? json(*c.bracket_lo) : json(nullptr)},
       {"bracket_hi", c.bracket_hi ? json(*c.bracket_hi) : json(nullptr)}};
}

void to_json(json& j, const EstimatorReport& r) {
  j = {{"true_value", r.true_value},
       {"bracket", {r.bracket_lo, r.bracket_hi}},
       {"n_samples", r.n_samples},
       {"n_repetitions", r.n_repetitions},
       {"seed", r.seed},
       {"analytic_fisher", r.analytic_fisher},
       {"empirical_fisher", r.empirical.value},
       {"empirical_fisher_se", r.empirical.standard_error},
       {"score_mean", r.empirical.score_mean},
       {"score_mean_se", r.empirical.score_mean_se},
       {"score_samples", r.empirical.samples},
       {"mle_mean", r.mle_mean},
       {"mle_variance", r.mle_variance},
       {"mle_variance_se", r.mle_variance_se},
       {"crb_ratio", r.crb_ratio},
       {"crb_ratio_se", r.crb_ratio_se},
       {"edge_hits", r.edge_hits}};
}

std::string content_hash(const json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char byte : j.dump()) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nuqs
