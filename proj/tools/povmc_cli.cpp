// povmc: batch front-end over the toolkit.
//
// Exit codes: 0 = definitive answer backed by a verified certificate,
// 2 = heuristic answer only, 1 = validation error, refusal or solver failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmc/serialize.hpp"

using namespace povmc;
using io::json;

namespace {

constexpr int kCertified = 0;
constexpr int kFailure = 1;
constexpr int kHeuristic = 2;

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "json";
  double tol = 1e-7;
  std::optional<std::uint64_t> seed;
  int n = 2;
  int restarts = 20;
  int cap = kDefaultStrategyCap;
  std::string noise = "depolarizing";
  std::string direction;
};

struct Outcome {
  int code = kCertified;
  json doc;
  std::string text;  // csv output, when used
};

CompatOptions compat_options(const RunConfig& c) {
  CompatOptions o;
  o.strategy_cap = c.cap;
  o.sdp.tol = c.tol;
  return o;
}

json load(const RunConfig& c) {
  if (c.input.empty()) throw ValidationError("--input is required");
  return io::read_file(c.input);
}

json result_header(const std::string& command) {
  return json{{"schema", io::kSchema}, {"type", "result"}, {"command", command}};
}

Outcome cmd_validate(const RunConfig& c) {
  const json doc = load(c);
  const std::string type = io::document_type(doc);
  if (type == "state") io::read_state(doc);
  else if (type == "measurement_set") io::read_measurement_set(doc);
  else if (type == "assemblage") io::read_assemblage(doc);
  else if (type == "kraus_channel") io::read_kraus_channel(doc);
  else if (type == "choi") io::read_choi(doc);
  else if (type == "instrument") io::read_instrument(doc);
  else if (type == "pointwise_kraus_model") io::read_pointwise_model(doc);
  else if (type == "pure_decomposition") io::read_pure_decomposition(doc);
  else if (type == "parent_model") {
    const auto p = io::read_parent_model(doc);
    MeasurementSet check(p.reconstruct());
  } else if (type == "witness") io::read_witness(doc);
  else if (type == "lhs_model") io::read_lhs_model(doc);
  else if (type == "separable_preparation") {
    const auto p = io::read_separable_preparation(doc);
    Assemblage check(separable_preparation_to_lhs(p.ensemble, p.measurements).reconstruct());
  } else if (type == "preparation_model") io::read_preparation_model(doc);
  else if (type == "response_parent") io::read_response_parent(doc);
  else if (type == "weighted_kraus") io::read_weighted_kraus(doc).channel();
  else if (type == "cv_scan") io::read_scan(doc);
  else if (type == "cv_scan_config") io::read_scan_config(doc);
  else throw io::SchemaError("/type", "unknown document type \"" + type + "\"");
  if (type != "cv_scan_config" && doc.contains("sigma")) io::read_sigma_field(doc);
  Outcome out;
  out.doc = result_header("validate");
  out.doc["document_type"] = type;
  out.doc["valid"] = true;
  return out;
}

Outcome cmd_jm(const RunConfig& c) {
  const auto ms = io::read_measurement_set(load(c));
  const auto r = jm_test(ms, compat_options(c));
  Outcome out;
  out.doc = result_header("jm");
  out.doc["verdict"] = r.compatible ? "feasible" : (r.witness ? "infeasible" : "undecided");
  out.doc["certificate"] = io::encode(r.certificate);
  out.doc["sdp_status"] = to_string(r.sdp.status);
  if (r.parent) out.doc["parent"] = io::to_document(*r.parent);
  if (r.witness) out.doc["witness"] = io::to_document(*r.witness);
  out.code = r.certificate.ok && (r.compatible || r.witness) ? kCertified : kFailure;
  return out;
}

Outcome cmd_steer(const RunConfig& c) {
  const auto a = io::read_assemblage(load(c));
  const auto r = lhs_test(a, compat_options(c));
  Outcome out;
  out.doc = result_header("steer");
  out.doc["verdict"] = r.unsteerable ? "unsteerable" : (r.witness ? "steerable" : "undecided");
  out.doc["certificate"] = io::encode(r.certificate);
  out.doc["sdp_status"] = to_string(r.sdp.status);
  if (r.model) out.doc["lhs_model"] = io::to_document(*r.model);
  if (r.witness) out.doc["witness"] = io::to_document(*r.witness);
  out.code = r.certificate.ok && (r.unsteerable || r.witness) ? kCertified : kFailure;
  return out;
}

Outcome cmd_robustness(const RunConfig& c) {
  if (c.noise != "depolarizing") throw ValidationError("--noise: only \"depolarizing\" is supported");
  const json doc = load(c);
  const std::string type = io::document_type(doc);
  RobustnessResult r;
  if (type == "measurement_set") {
    r = jm_depolarizing_robustness(io::read_measurement_set(doc), compat_options(c), depolarizing_noise);
  } else if (type == "assemblage") {
    r = lhs_robustness(io::read_assemblage(doc), compat_options(c));
  } else {
    throw io::SchemaError("/type", "expected \"measurement_set\" or \"assemblage\"");
  }
  Outcome out;
  out.doc = result_header("robustness");
  out.doc["object"] = type;
  out.doc["noise"] = c.noise;
  out.doc["robustness"] = io::encode(r);
  out.code = r.certified ? kCertified : kFailure;
  return out;
}

Outcome cmd_compress(const RunConfig& c) {
  const json doc = load(c);
  const std::string type = io::document_type(doc);
  std::optional<Assemblage> target;
  if (type == "assemblage") {
    target.emplace(io::read_assemblage(doc));
  } else if (type == "measurement_set") {
    const auto ms = io::read_measurement_set(doc);
    const auto sigma = io::read_sigma_field(doc);
    target.emplace(sandwich(sigma ? *sigma : DensityState::maximally_mixed(ms.dim()), ms));
  } else {
    throw io::SchemaError("/type", "expected \"measurement_set\" or \"assemblage\"");
  }
  if (c.n < 1) throw ValidationError("--n must be at least 1");
  const int d = target->dim();
  Outcome out;
  out.doc = result_header("compress");
  out.doc["n"] = c.n;
  if (c.n == 1) {
    // Exact: 1-preparability is unsteerability.
    const auto r = lhs_test(*target, compat_options(c));
    out.doc["verdict"] = r.unsteerable ? "n-preparable" : (r.witness ? "not n-preparable" : "undecided");
    out.doc["certificate"] = io::encode(r.certificate);
    if (r.model) out.doc["model"] = io::to_document(lhs_to_separable_preparation(*r.model));
    if (r.witness) out.doc["witness"] = io::to_document(*r.witness);
    out.code = r.certificate.ok && (r.unsteerable || r.witness) ? kCertified : kFailure;
    return out;
  }
  const bool stochastic = c.n < d;
  if (stochastic && !c.seed) throw ValidationError("--seed is required for the see-saw search");
  SeesawOptions so;
  so.n = c.n;
  so.restarts = c.restarts;
  so.seed = c.seed.value_or(0);
  so.strategy_cap = c.cap;
  so.sdp.tol = c.tol;
  const auto r = seesaw_n_prep(*target, so);
  out.doc["visibility"] = r.visibility;
  out.doc["residual"] = r.residual;
  out.doc["converged"] = r.converged;
  out.doc["best_restart"] = r.best_restart;
  out.doc["restart_visibilities"] = r.restart_visibilities;
  if (r.model) out.doc["model"] = io::to_document(*r.model);
  if (r.simulation) out.doc["simulation"] = io::to_document(*r.simulation);
  if (!stochastic) {
    out.doc["verdict"] = "n-preparable";
    out.code = r.residual <= 1e-6 ? kCertified : kFailure;
  } else {
    out.doc["verdict"] = "lower bound";
    out.code = r.model ? kHeuristic : kFailure;
  }
  return out;
}

Outcome cmd_translate(const RunConfig& c) {
  const json doc = load(c);
  Outcome out;
  out.doc = result_header("translate");
  out.doc["direction"] = c.direction;
  auto sigma_of = [&](int d) {
    const auto s = io::read_sigma_field(doc);
    return s ? *s : DensityState::maximally_mixed(d);
  };
  if (c.direction == "prep-to-sim") {
    const auto pm = io::read_preparation_model(doc);
    const auto members = pm.reconstruct();
    const DensityState sigma = sigma_of(static_cast<int>(members.front().front().rows()));
    out.doc["model"] = io::to_document(prep_to_sim(pm, sigma));
  } else if (c.direction == "sim-to-prep") {
    const auto m = io::read_pointwise_model(doc);
    out.doc["model"] = io::to_document(sim_to_prep(m, sigma_of(m.dim())));
  } else if (c.direction == "jm-to-sim") {
    out.doc["model"] = io::to_document(one_sim_from_jm(io::read_parent_model(doc)));
  } else if (c.direction == "sim-to-jm") {
    out.doc["model"] = io::to_document(jm_from_one_sim(io::read_pointwise_model(doc)));
  } else if (c.direction == "lhs-to-sep") {
    out.doc["model"] = io::to_document(lhs_to_separable_preparation(io::read_lhs_model(doc)));
  } else if (c.direction == "sep-to-lhs") {
    const auto p = io::read_separable_preparation(doc);
    out.doc["model"] = io::to_document(separable_preparation_to_lhs(p.ensemble, p.measurements));
  } else {
    throw ValidationError("--direction: unknown direction \"" + c.direction + "\"");
  }
  return out;
}

Outcome cmd_choi(const RunConfig& c) {
  const json doc = load(c);
  const std::string type = io::document_type(doc);
  Outcome out;
  out.doc = result_header("choi");
  if (type == "kraus_channel") {
    out.doc["choi"] = io::to_document(choi_of_channel(io::read_kraus_channel(doc)));
  } else if (type == "choi") {
    out.doc["kraus_channel"] = io::to_document(kraus_of_choi(io::read_choi(doc)));
  } else {
    throw io::SchemaError("/type", "expected \"kraus_channel\" or \"choi\"");
  }
  return out;
}

ScanOptions scan_options(const RunConfig& c) {
  ScanOptions o = c.input.empty() ? ScanOptions{} : io::read_scan_config(io::read_file(c.input));
  o.compat = compat_options(c);
  o.seed = c.seed.value_or(0);
  return o;
}

Outcome cmd_cvscan(const RunConfig& c) {
  const ScanOptions o = scan_options(c);
  bool needs_seed = false;
  for (int d : o.dims)
    for (int n : o.seesaw_ns) needs_seed = needs_seed || (n >= 2 && n < d);
  if (needs_seed && !c.seed) throw ValidationError("--seed is required for the see-saw rows");
  const auto rows = incompressibility_scan(o);
  Outcome out;
  out.doc = io::to_document(rows);
  std::ostringstream csv;
  write_scan_csv(csv, rows);
  out.text = csv.str();
  for (const auto& r : rows) {
    if (r.cert_status.rfind("error", 0) == 0 || r.cert_status == "uncertified") out.code = kFailure;
    else if (r.cert_status == "heuristic" && out.code == kCertified) out.code = kHeuristic;
  }
  return out;
}

void emit(const RunConfig& c, const Outcome& o) {
  std::string body;
  if (c.format == "csv") {
    if (o.text.empty()) throw ValidationError("--format csv is only available for cvscan");
    body = o.text;
  } else {
    body = io::dump(o.doc);
  }
  if (c.output.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(c.output);
    if (!f) throw Error("cannot write " + c.output);
    f << body;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"povmc: measurement incompatibility, steering and compression toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::vector<CLI::Option*> seed_options;

  auto common = [&](CLI::App* sub, bool needs_input) {
    auto* in = sub->add_option("--input", cfg.input, "input document (schema povmc/1)");
    if (needs_input) in->required()->check(CLI::ExistingFile);
    else in->check(CLI::ExistingFile);
    sub->add_option("--output", cfg.output, "output path (default stdout)");
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", cfg.tol, "solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--cap", cfg.cap, "deterministic-strategy cap")->check(CLI::PositiveNumber);
  };

  struct Sub {
    const char* name;
    const char* help;
    Outcome (*run)(const RunConfig&);
  };
  const Sub subs[] = {
      {"validate", "check a document against its type invariants", cmd_validate},
      {"jm", "joint measurability with certificate", cmd_jm},
      {"steer", "LHS model or steering witness", cmd_steer},
      {"robustness", "noise robustness of joint measurability or unsteerability", cmd_robustness},
      {"compress", "n-preparability search", cmd_compress},
      {"translate", "convert between equivalent models", cmd_translate},
      {"choi", "Kraus <-> Choi", cmd_choi},
      {"cvscan", "binned position/momentum incompressibility scan", cmd_cvscan},
  };
  const Sub* chosen = nullptr;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    common(sub, std::string(s.name) != "cvscan");
    const std::string name = s.name;
    if (name == "robustness")
      sub->add_option("--noise", cfg.noise, "noise model")->check(CLI::IsMember({"depolarizing"}));
    if (name == "compress" || name == "cvscan") {
      seed_options.push_back(sub->add_option("--seed", seed, "RNG seed (required for see-saw searches)"));
    }
    if (name == "compress") {
      sub->add_option("--n", cfg.n, "compression dimension")->check(CLI::PositiveNumber);
      sub->add_option("--restarts", cfg.restarts, "see-saw restarts")->check(CLI::PositiveNumber);
    }
    if (name == "translate")
      sub->add_option("--direction", cfg.direction, "conversion")
          ->required()
          ->check(CLI::IsMember({"prep-to-sim", "sim-to-prep", "jm-to-sim", "sim-to-jm", "lhs-to-sep", "sep-to-lhs"}));
    sub->callback([&chosen, &s] { chosen = &s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kFailure;
  }
  for (auto* o : seed_options)
    if (o->count() > 0) cfg.seed = seed;

  try {
    const Outcome out = chosen->run(cfg);
    emit(cfg, out);
    return out.code;
  } catch (const io::SchemaError& e) {
    std::cerr << "povmc: schema error at " << e.what() << "\n";
  } catch (const RefusalError& e) {
    std::cerr << "povmc: refused: " << e.what() << "\n";
  } catch (const Error& e) {
    std::cerr << "povmc: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "povmc: internal error: " << e.what() << "\n";
  }
  return kFailure;
}
