// crsegre <classify|chains|normalize|map-check> <manifest> [options]
//
// Exit codes: 0 success (inconclusive verdicts included), 1 usage or
// internal error, 2 manifest error, 3 reality failure, 4 map fails.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "crsegre/crsegre.hpp"

using namespace crsegre;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kSchema = 1;

struct RunConfig {
  std::string command;
  std::string manifest;
  std::optional<int> order;
  std::uint64_t seed = 0;
  int trials = 8;
  std::string format = "text";
  std::optional<int> degree_bound;
};

struct ExitError : std::runtime_error {
  int code;
  ExitError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

RankOptions rank_options(const RunConfig& cfg) {
  RankOptions o;
  o.seed = cfg.seed;
  o.trials = cfg.trials;
  return o;
}

std::string series_text(const Series& s, const std::vector<std::string>& names) {
  return to_string(s, names) + " + O(" + std::to_string(s.order() + 1) + ")";
}

Json verdict_json(Verdict v, int order, const std::string& confidence) {
  return Json{{"value", to_string(v)}, {"order", order}, {"confidence", confidence}};
}

Json rank_json(const RankVerdict& r) {
  return Json{{"value", r.value}, {"order", r.order}, {"confidence", to_string(r.confidence)}};
}

Json ints(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(x);
  return a;
}

Json strings(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

Json condition_json(const ConditionVerdict& c, int order, const std::string& confidence) {
  Json j = verdict_json(c.verdict, order, confidence);
  if (c.ell0) {
    j["ell"] = *c.ell0;
    j["ell_minimal"] = c.ell0_exact;
  }
  if (c.by_hierarchy) j["by_hierarchy"] = true;
  if (!c.basis.empty()) j["basis"] = c.basis;
  return j;
}

std::string data_confidence(bool exact) { return exact ? "exact" : "truncated"; }

Json classification_json(const ClassificationReport& r) {
  const std::string conf = data_confidence(r.exact_data);
  Json j;
  j["order"] = r.order;
  j["exact_data"] = r.exact_data;
  j["levi_nondegenerate"] = verdict_json(r.levi, r.order, conf);
  j["finitely_nondegenerate"] = condition_json(r.finite, r.order, conf);
  j["essentially_finite"] = condition_json(r.essentially_finite, r.order, conf);
  j["segre_nondegenerate"] = condition_json(r.segre, r.order, conf);
  j["holomorphically_nondegenerate"] = condition_json(r.holomorphic, r.order, conf);
  Json et;
  if (r.essential_type.value)
    et["value"] = *r.essential_type.value;
  else
    et["value"] = nullptr;
  et["exact"] = r.essential_type.exact;
  et["beta_bound"] = r.essential_type.beta_bound;
  et["stabilized_dims"] = ints({r.essential_type.dim_low, r.essential_type.dim_high});
  if (r.essential_type.infinite_witness) et["infinite_witness"] = *r.essential_type.infinite_witness;
  j["essential_type"] = et;
  j["jet_ranks"] = ints(r.ranks);
  if (r.levi_multitype) j["levi_multitype"] = ints(*r.levi_multitype);
  if (r.restricted_generic_rank) {
    j["restricted_generic_rank"] = *r.restricted_generic_rank;
    j["restricted_rank_exact"] = r.restricted_rank_exact;
  }
  j["normalization_identity"] = r.normalization_identity;
  j["hierarchy_consistent"] = r.hierarchy_consistent;
  if (!r.hierarchy_notes.empty()) j["hierarchy_notes"] = strings(r.hierarchy_notes);
  if (!r.notes.empty()) j["notes"] = strings(r.notes);
  return j;
}

Json holo_dimension_json(const EssentialHoloDimension& h) {
  Json j;
  j["n_M"] = h.n_M;
  j["ell_M"] = h.ell_M;
  j["multitype"] = ints(h.multitype);
  Json ranks = Json::array();
  for (const auto& r : h.jet_ranks) ranks.push_back(rank_json(r));
  j["jet_ranks"] = ranks;
  j["certain"] = h.certain;
  j["bound_holds"] = h.bound_holds;
  return j;
}

std::string point_text(const std::vector<GaussianRational>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + p[i].to_string();
  return s + ")";
}

// Manifold of a manifest block, with reality failures and invalid data mapped to exit codes.
GenericManifold build_manifold(ManifoldSpec spec, const RunConfig& cfg) {
  if (cfg.order) spec.order = *cfg.order;
  try {
    return from_spec(spec);
  } catch (const ManifoldError& e) {
    throw ExitError(e.kind() == ManifoldErrorKind::reality ? 3 : 2, "manifold '" + spec.name + "': " + e.what());
  } catch (const SeriesError& e) {
    throw ExitError(2, "manifold '" + spec.name + "': " + e.what());
  }
}

Json manifold_header(const ManifoldSpec& spec, const GenericManifold& M) {
  Json j;
  j["name"] = spec.name;
  j["m"] = M.m();
  j["d"] = M.d();
  j["order"] = M.order();
  j["style"] = spec.style == EquationStyle::real_graph ? "real_graph" : "complex_defining";
  j["equations"] = strings(spec.equation_text);
  if (M.exact_degree()) j["polynomial_degree"] = *M.exact_degree();
  return j;
}

Json cmd_classify(const Manifest& man, const RunConfig& cfg) {
  Json out = Json::array();
  const auto opt = rank_options(cfg);
  for (const auto& spec : man.manifolds) {
    const auto M = build_manifold(spec, cfg);
    Json j = manifold_header(spec, M);
    j["classification"] = classification_json(classify_at_origin(M, opt));
    j["essential_holomorphic_dimension"] = holo_dimension_json(essential_holo_dimension(M, opt));
    Json pts = Json::array();
    for (const auto& ps : spec.points) {
      Json pj;
      pj["point"] = ps.text;
      try {
        const auto p = surface_point(M, ps.z, ps.u);
        pj["t"] = point_text(p.t);
        pj["classification"] = classification_json(classify_at_point(M, p, opt));
      } catch (const ManifoldError& e) {
        pj["error"] = e.what();
      }
      pts.push_back(pj);
    }
    if (!pts.empty()) j["points"] = pts;
    out.push_back(j);
  }
  return out;
}

Json cmd_chains(const Manifest& man, const RunConfig& cfg) {
  Json out = Json::array();
  const auto opt = rank_options(cfg);
  for (const auto& spec : man.manifolds) {
    const auto M = build_manifold(spec, cfg);
    Json j = manifold_header(spec, M);
    const auto st = segre_type(M, opt);
    Json s;
    Json gr = Json::array();
    for (const auto& r : st.gamma_ranks) gr.push_back(rank_json(r));
    s["gamma_ranks"] = gr;
    s["multitype"] = ints(st.multitype);
    s["mu0"] = st.mu0;
    s["stabilized"] = st.stabilized;
    s["minimal"] = verdict_json(st.minimal, st.order, st.stabilized ? "exact" : "truncated");
    s["orbit_dim"] = st.orbit_dim;
    s["intrinsic_orbit_dim"] = st.intrinsic_orbit_dim;
    s["psi_identity_holds"] = st.psi_identity_holds;
    s["conjugate_symmetry_holds"] = st.conjugate_symmetry_holds;
    j["segre_type"] = s;
    const int kmax = std::max(1, std::min(st.mu0, M.order() - 1));
    const auto psi = psi_generic_ranks(M, kmax, opt);
    Json pr = Json::array();
    for (const auto& r : psi.ranks) pr.push_back(rank_json(r));
    j["psi"] = Json{{"ranks", pr}, {"nu0", psi.nu0}};
    const auto w = find_submersive_slice(M, st.mu0, st.minimal, cfg.trials, cfg.seed);
    Json sw;
    sw["found"] = w.found;
    if (w.found) {
      sw["chain_length"] = w.length;
      sw["point"] = point_text(w.point);
      sw["rank"] = w.rank;
      sw["leading_minor"] = w.leading_minor.to_string();
      sw["slice_length"] = w.slice_length;
      sw["slice_point"] = point_text(w.slice_point);
    } else {
      sw["reason"] = w.reason;
    }
    j["submersive_slice"] = sw;
    out.push_back(j);
  }
  return out;
}

Json cmd_normalize(const Manifest& man, const RunConfig& cfg) {
  Json out = Json::array();
  for (const auto& spec : man.manifolds) {
    const auto M = build_manifold(spec, cfg);
    Json j = manifold_header(spec, M);
    const auto nf = to_normal_coordinates(M);
    const auto names = theta_variable_names(M.m(), M.d());
    const auto tnames = holomorphic_variable_names(M.m(), M.d());
    j["identity"] = nf.identity;
    Json th = Json::array();
    for (const auto& s : nf.manifold.theta()) th.push_back(series_text(s, names));
    j["theta"] = th;
    Json ch = Json::array();
    for (const auto& s : nf.change) ch.push_back(series_text(s, tnames));
    j["change"] = ch;
    out.push_back(j);
  }
  return out;
}

Json horizontal_json(const HorizontalConditions& h, int order) {
  const std::string conf = data_confidence(h.exact);
  Json j;
  j["invertible"] = verdict_json(h.invertible, order, conf);
  j["submersive"] = verdict_json(h.submersive, order, conf);
  j["finite"] = verdict_json(h.finite, order, conf);
  if (h.finite_codim) j["finite_codimension"] = *h.finite_codim;
  j["dominating"] = verdict_json(h.dominating, order, conf);
  j["transversal"] = verdict_json(h.transversal, order, conf);
  j["annihilator_degree_bound"] = h.annihilator_degree;
  if (h.annihilator) j["annihilator"] = *h.annihilator;
  j["consistent"] = h.consistent;
  if (!h.notes.empty()) j["notes"] = strings(h.notes);
  return j;
}

Json cmd_map_check(const Manifest& man, const RunConfig& cfg, bool& any_failed) {
  if (man.maps.empty()) throw ExitError(2, "manifest declares no map");
  Json out = Json::array();
  const auto opt = rank_options(cfg);
  for (const auto& ms : man.maps) {
    Manifest local = man;
    for (auto& spec : local.manifolds) {
      if (spec.name != ms.source && spec.name != ms.target) continue;
      build_manifold(spec, cfg);  // reports reality failures with their own exit code
      if (cfg.order) spec.order = *cfg.order;
    }
    CRMapping map = [&] {
      try {
        return mapping_from_spec(local, ms);
      } catch (const ManifoldError& e) {
        throw ExitError(2, "map '" + ms.name + "': " + e.what());
      }
    }();
    Json j;
    j["name"] = ms.name;
    j["source"] = ms.source;
    j["target"] = ms.target;
    j["components"] = strings(ms.component_text);
    if (map.h_degree) j["polynomial_degree"] = *map.h_degree;
    const auto v = verify_cr_map(map);
    j["maps_into_target"] = Json{{"pass", v.pass}, {"order", v.order}};
    if (!v.pass) {
      j["maps_into_target"]["witness"] = v.first_offense;
      any_failed = true;
      out.push_back(j);
      continue;
    }
    const int order = std::min(map.source.order(), map.target.order());
    const int dg = cfg.degree_bound ? *cfg.degree_bound : -1;
    const auto mc = map_five_conditions(map, opt, dg);
    j["horizontal_part"] = horizontal_json(mc.horizontal, order);
    const std::string conf = data_confidence(mc.exact);
    Json c;
    c["levi_nondegenerate"] = condition_json(mc.levi, order, conf);
    c["finitely_nondegenerate"] = condition_json(mc.finite, order, conf);
    c["segre_finite"] = condition_json(mc.segre_finite, order, conf);
    if (mc.segre_finite_codim) c["segre_finite_codimension"] = *mc.segre_finite_codim;
    c["segre_nondegenerate"] = condition_json(mc.segre_nondegenerate, order, conf);
    if (mc.segre_rank) c["segre_rank"] = *mc.segre_rank;
    c["holomorphically_nondegenerate"] = condition_json(mc.holomorphic, order, conf);
    c["normalization_identity"] = mc.normalization_identity;
    if (!mc.notes.empty()) c["notes"] = strings(mc.notes);
    j["map_conditions"] = c;
    const auto target = classify_at_origin(map.target, opt);
    const auto tr = necessary_and_transfer_checks(map, mc, target, opt);
    Json t;
    t["cr_transversal"] = tr.cr_transversal;
    t["checked"] = tr.checked;
    t["skipped"] = tr.skipped;
    t["violations"] = strings(tr.violations);
    j["consistency"] = t;
    out.push_back(j);
  }
  return out;
}

// Indented "key: value" rendering of the JSON report.
std::string scalar_text(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

bool is_verdict(const Json& v) { return v.is_object() && v.contains("value") && v.contains("confidence"); }

std::string verdict_text(const Json& v) {
  std::string s = scalar_text(v["value"]) + " [order " + v["order"].dump() + ", " + scalar_text(v["confidence"]);
  for (const auto& [k, x] : v.items())
    if (k != "value" && k != "order" && k != "confidence") s += ", " + k + " " + scalar_text(x);
  return s + "]";
}

bool is_flat_array(const Json& v) {
  if (!v.is_array()) return false;
  for (const auto& x : v)
    if (x.is_structured() && !is_verdict(x)) return false;
  return true;
}

std::string flat_array_text(const Json& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += is_verdict(v[i]) ? verdict_text(v[i]) : scalar_text(v[i]);
  }
  return s + "]";
}

void render_text(const Json& j, std::ostream& os, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      os << pad << k << ":";
      if (is_verdict(v))
        os << " " << verdict_text(v) << "\n";
      else if (is_flat_array(v))
        os << " " << flat_array_text(v) << "\n";
      else if (v.is_structured()) {
        os << "\n";
        render_text(v, os, indent + 2);
      } else
        os << " " << scalar_text(v) << "\n";
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad << "- [" << i << "]\n";
      render_text(j[i], os, indent + 2);
    }
  }
}

int run(const RunConfig& cfg) {
  std::ifstream in(cfg.manifest);
  if (!in) throw ExitError(2, "cannot read manifest '" + cfg.manifest + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Manifest man;
  try {
    man = load_manifest(buf.str());
  } catch (const ParseError& e) {
    throw ExitError(2, cfg.manifest + ": " + e.what());
  }

  Json report;
  report["tool"] = "crsegre";
  report["version"] = kVersion;
  report["schema"] = kSchema;
  report["command"] = cfg.command;
  report["manifest"] = cfg.manifest;
  Json c;
  c["order"] = cfg.order ? Json(*cfg.order) : Json(nullptr);
  c["seed"] = cfg.seed;
  c["trials"] = cfg.trials;
  c["degree_bound"] = cfg.degree_bound ? Json(*cfg.degree_bound) : Json(nullptr);
  report["config"] = c;

  bool failed = false;
  if (cfg.command == "classify")
    report["manifolds"] = cmd_classify(man, cfg);
  else if (cfg.command == "chains")
    report["manifolds"] = cmd_chains(man, cfg);
  else if (cfg.command == "normalize")
    report["manifolds"] = cmd_normalize(man, cfg);
  else
    report["maps"] = cmd_map_check(man, cfg, failed);

  if (cfg.format == "json")
    std::cout << report.dump(2) << "\n";
  else
    render_text(report, std::cout, 0);
  return failed ? 4 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Segre-variety invariants of real-analytic generic submanifolds and CR maps"};
  app.set_version_flag("--version", kVersion);
  RunConfig cfg;
  app.add_option("command", cfg.command, "classify, chains, normalize or map-check")
      ->required()
      ->check(CLI::IsMember({"classify", "chains", "normalize", "map-check"}));
  app.add_option("manifest", cfg.manifest, "manifest file")->required();
  app.add_option("--order", cfg.order, "truncation order N (at least 4)")->check(CLI::Range(4, kMaxOrder));
  app.add_option("--seed", cfg.seed, "seed for sampled ranks");
  app.add_option("--trials", cfg.trials, "sample lines per rank decision")->check(CLI::Range(1, 1000));
  app.add_option("--degree-bound", cfg.degree_bound, "annihilator degree bound for CR-transversality")
      ->check(CLI::Range(1, 32));
  app.add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    return run(cfg);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ManifoldError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ManifoldErrorKind::reality ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
